#![allow(dead_code)]

use std::collections::BTreeSet;

use margulis::rat::{self, Q, QVec};
use margulis::rootsys::RootSystem;
use num_traits::{Signed, ToPrimitive};

/// Dominant representative by repeated simple reflections.
pub fn dominant(rs: &RootSystem, x: &[Q]) -> QVec {
    let mut v = x.to_vec();
    'outer: loop {
        for (i, a) in rs.simple_roots.iter().enumerate() {
            if rs.inner(&v, a).is_negative() {
                v = rs.reflect(i, &v);
                continue 'outer;
            }
        }
        return v;
    }
}

/// `mu` lies in the convex hull of `W lambda` iff `lambda - dominant(mu)` is a
/// nonnegative combination of simple roots.
pub fn in_hull_by_dominance(rs: &RootSystem, lambda: &[Q], mu: &[Q]) -> bool {
    let d = dominant(rs, mu);
    rs.simple_coords(&rat::sub(lambda, &d)).iter().all(|c| !c.is_negative())
}

/// Lattice points `lambda - sum c_i alpha_i` with integer `c_i` in a box
/// wider than the hull, kept when they pass the dominance test.
pub fn dominance_oracle(rs: &RootSystem, lambda: &[Q]) -> BTreeSet<QVec> {
    let neg = rat::neg(lambda);
    let span = rs.simple_coords(&rat::add(lambda, &dominant(rs, &neg)));
    let hi: Vec<i64> = span.iter().map(|c| c.ceil().to_integer().to_i64().unwrap() + 1).collect();
    let mut out = BTreeSet::new();
    let mut c: Vec<i64> = vec![-1; rs.rank];
    loop {
        let shift = rs.combine(&c.iter().map(|&x| rat::q(x)).collect::<Vec<_>>());
        let mu = rat::sub(lambda, &shift);
        if in_hull_by_dominance(rs, lambda, &mu) {
            out.insert(mu);
        }
        let mut i = 0;
        while i < c.len() {
            c[i] += 1;
            if c[i] <= hi[i] {
                break;
            }
            c[i] = -1;
            i += 1;
        }
        if i == c.len() {
            return out;
        }
    }
}

/// Orbit of a regular vector: its size is `|W|`.
pub fn orbit_size(rs: &RootSystem, x: &[Q]) -> usize {
    let mut seen: BTreeSet<QVec> = BTreeSet::new();
    let mut stack = vec![x.to_vec()];
    while let Some(v) = stack.pop() {
        if !seen.insert(v.clone()) {
            continue;
        }
        for i in 0..rs.rank {
            let r = rs.reflect(i, &v);
            if !seen.contains(&r) {
                stack.push(r);
            }
        }
    }
    seen.len()
}
