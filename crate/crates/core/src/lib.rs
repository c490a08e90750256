//! Exact restricted-weight combinatorics and high-precision affine dynamics
//! for building and checking free affine groups with proper actions.

pub mod rat;
pub mod rootsys;
pub mod weights;
pub mod lp;
pub mod typing;
pub mod hp;
pub mod linalg;
pub mod matgroups;
pub mod affdyn;
pub mod proximal;
pub mod schottky;
pub mod verify;
pub mod cli;
