//! Types of Cartan vectors, the swinging obstruction, extreme symmetric
//! reference vectors and the condition report.

use crate::lp;
use crate::rat::{self, fmt_qvec, q, Q, QVec};
use crate::rootsys::{
    acts_as_minus_identity, fundamental_weights, longest_element, minus_w0_permutation, weyl_group,
    RootSysError, RootSystem, WeylElement,
};
use crate::weights::{has_zero_weight, weight_set, WeightError, WeightSet};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypingError {
    #[error("input vector is not generic")]
    InputNotGeneric,
    #[error("input vector is not dominant")]
    InputNotDominant,
    #[error("no symmetric generic vector exists; swinging weight {0:?}")]
    NoSwingingViolated(Vec<String>),
    #[error("averaged vector is not extreme")]
    NotExtreme,
    #[error(transparent)]
    RootSys(#[from] RootSysError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypeClass {
    pub omega_pos: BTreeSet<QVec>,
    pub omega_neg: BTreeSet<QVec>,
    pub omega_zero: BTreeSet<QVec>,
}

impl TypeClass {
    pub fn is_generic(&self) -> bool {
        self.omega_zero.iter().all(|w| rat::is_zero(w))
    }

    /// Canonical key: the sorted positive set.
    pub fn key(&self) -> Vec<QVec> {
        self.omega_pos.iter().cloned().collect()
    }

    pub fn same_as(&self, other: &TypeClass) -> bool {
        self.omega_pos == other.omega_pos && self.omega_neg == other.omega_neg
    }
}

pub fn classify(x: &[Q], ws: &WeightSet) -> TypeClass {
    let mut t = TypeClass { omega_pos: BTreeSet::new(), omega_neg: BTreeSet::new(), omega_zero: BTreeSet::new() };
    for w in &ws.weights {
        let v = ws.rs.inner(w, x);
        if v.is_positive() {
            t.omega_pos.insert(w.clone());
        } else if v.is_negative() {
            t.omega_neg.insert(w.clone());
        } else {
            t.omega_zero.insert(w.clone());
        }
    }
    t
}

pub fn is_generic(x: &[Q], ws: &WeightSet) -> bool {
    ws.nonzero().all(|w| !ws.rs.inner(w, x).is_zero())
}

pub fn same_type(x: &[Q], y: &[Q], ws: &WeightSet) -> bool {
    ws.weights.iter().all(|w| rat::sign(&ws.rs.inner(w, x)) == rat::sign(&ws.rs.inner(w, y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Satisfied,
    Failed,
    NeedsNumeric,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Satisfied => "SATISFIED",
            Status::Failed => "FAILED",
            Status::NeedsNumeric => "NEEDS_NUMERIC",
        })
    }
}

/// Returns a nonzero weight fixed by `w0`, if any.
pub fn swinging_witness(ws: &WeightSet, w0: &WeylElement) -> Option<QVec> {
    if acts_as_minus_identity(&ws.rs, w0) {
        return None;
    }
    ws.nonzero().find(|w| w0.apply(w) == **w).cloned()
}

pub fn no_swinging(ws: &WeightSet, w0: &WeylElement) -> (Status, Option<QVec>) {
    match swinging_witness(ws, w0) {
        None => (Status::Satisfied, None),
        Some(w) => (Status::Failed, Some(w)),
    }
}

/// Dominant basis of `Fix(-w0)`: orbit sums of fundamental weights under `-w0`.
pub fn symmetric_dominant_basis(rs: &RootSystem, w0: &WeylElement) -> Vec<QVec> {
    let sigma = minus_w0_permutation(rs, w0);
    let fw = fundamental_weights(rs);
    (0..rs.rank)
        .filter(|&i| sigma[i] >= i)
        .map(|i| if sigma[i] == i { fw[i].clone() } else { rat::add(&fw[i], &fw[sigma[i]]) })
        .collect()
}

const GENERIC_SEARCH_CAP: i64 = 100_000;

/// Deterministic search `X_N = sum_i N^(i-1) b_i` for `N = 1, 2, ...`.
pub fn find_symmetric_generic(ws: &WeightSet, w0: &WeylElement) -> Result<QVec, TypingError> {
    if let Some(w) = swinging_witness(ws, w0) {
        return Err(TypingError::NoSwingingViolated(fmt_qvec(&w)));
    }
    let basis = symmetric_dominant_basis(&ws.rs, w0);
    for n in 1..=GENERIC_SEARCH_CAP {
        let mut x = rat::zeros(ws.rs.ambient_dim);
        let mut pw = Q::one();
        for b in &basis {
            x = rat::add(&x, &rat::scale(&pw, b));
            pw *= q(n);
        }
        if is_generic(&x, ws) {
            return Ok(x);
        }
    }
    Err(TypingError::InputNotGeneric)
}

pub fn weyl_stabilizer(x: &[Q], group: &[WeylElement]) -> Vec<WeylElement> {
    group.iter().filter(|w| w.apply(x) == x).cloned().collect()
}

/// `W_{rho,X}`: elements `w` such that `wX` has the type of `X`.
pub fn weyl_stabilizer_up_to_type(x: &[Q], ws: &WeightSet, group: &[WeylElement]) -> Vec<WeylElement> {
    group.iter().filter(|w| same_type(&w.apply(x), x, ws)).cloned().collect()
}

/// Indices of the simple roots vanishing on `x`.
pub fn pi_x(rs: &RootSystem, x: &[Q]) -> Vec<usize> {
    (0..rs.rank).filter(|&i| rs.inner(&rs.simple_roots[i], x).is_zero()).collect()
}

#[derive(Debug, Clone)]
pub struct ReferenceVector {
    pub x0: QVec,
    pub type_class: TypeClass,
    pub pi_x0: Vec<usize>,
    pub w_x0: Vec<WeylElement>,
}

pub fn extreme_representative(
    x: &[Q],
    ws: &WeightSet,
    group: &[WeylElement],
) -> Result<ReferenceVector, TypingError> {
    if !ws.rs.is_dominant(x) {
        return Err(TypingError::InputNotDominant);
    }
    if !is_generic(x, ws) {
        return Err(TypingError::InputNotGeneric);
    }
    let stab = weyl_stabilizer_up_to_type(x, ws, group);
    let x1 = stab.iter().fold(rat::zeros(x.len()), |acc, w| rat::add(&acc, &w.apply(x)));
    let same = same_type(&x1, x, ws);
    let w_x1 = weyl_stabilizer(&x1, group);
    let w_rho = weyl_stabilizer_up_to_type(&x1, ws, group);
    if !same || !ws.rs.is_dominant(&x1) || w_x1.len() != w_rho.len() {
        return Err(TypingError::NotExtreme);
    }
    Ok(ReferenceVector {
        type_class: classify(&x1, ws),
        pi_x0: pi_x(&ws.rs, &x1),
        w_x0: w_x1,
        x0: x1,
    })
}

/// The canonical extreme symmetric generic vector of `ws`.
pub fn reference_vector(ws: &WeightSet) -> Result<ReferenceVector, TypingError> {
    let group = weyl_group(&ws.rs)?;
    let w0 = longest_element(&ws.rs);
    let x = find_symmetric_generic(ws, &w0)?;
    extreme_representative(&x, ws, &group)
}

#[derive(Debug, Clone)]
pub struct GenericType {
    pub class: TypeClass,
    /// Interior point of the class inside the open Weyl chamber.
    pub witness: QVec,
}

fn normalize_form(h: &[Q]) -> Option<QVec> {
    let first = h.iter().find(|c| !c.is_zero())?;
    let f = first.abs();
    Some(h.iter().map(|c| c / &f).collect())
}

/// Chamber walk over the hyperplanes `ker lambda` inside the open Weyl chamber.
pub fn enumerate_generic_types(ws: &WeightSet) -> Result<Vec<GenericType>, TypingError> {
    let rs = &ws.rs;
    if rs.rank > crate::rootsys::DEFAULT_RANK_CAP {
        return Err(RootSysError::CapExceeded { rank: rs.rank, cap: crate::rootsys::DEFAULT_RANK_CAP }.into());
    }
    let r = rs.rank;
    let fw = fundamental_weights(rs);
    // x = sum t_j w_j; a weight lambda gives the linear form t -> sum t_j <lambda, w_j>
    let mut forms: BTreeSet<QVec> = BTreeSet::new();
    for w in ws.nonzero() {
        let h: QVec = fw.iter().map(|f| rs.inner(w, f)).collect();
        let pos = h.iter().any(|c| c.is_positive());
        let neg = h.iter().any(|c| c.is_negative());
        if pos && neg {
            let mut n = normalize_form(&h).expect("nonzero form");
            if n.iter().find(|c| !c.is_zero()).unwrap().is_negative() {
                n = rat::neg(&n);
            }
            forms.insert(n);
        }
    }
    let forms: Vec<QVec> = forms.into_iter().collect();
    let to_x = |t: &[Q]| {
        fw.iter().zip(t).fold(rat::zeros(rs.ambient_dim), |acc, (f, c)| rat::add(&acc, &rat::scale(c, f)))
    };
    // starting point (1, N, N^2, ...) off every hyperplane
    let mut start = None;
    for n in 1..=GENERIC_SEARCH_CAP {
        let t: QVec = (0..r).map(|i| num_traits::pow(q(n), i)).collect();
        if forms.iter().all(|h| !rat::dot(h, &t).is_zero()) {
            start = Some(t);
            break;
        }
    }
    let start = start.ok_or(TypingError::InputNotGeneric)?;
    let signs0: Vec<bool> = forms.iter().map(|h| rat::dot(h, &start).is_positive()).collect();
    let mut cells: BTreeMap<Vec<bool>, QVec> = BTreeMap::new();
    let mut queue = VecDeque::new();
    cells.insert(signs0.clone(), start);
    queue.push_back(signs0);
    while let Some(s) = queue.pop_front() {
        for k in 0..forms.len() {
            let mut s2 = s.clone();
            s2[k] = !s2[k];
            if cells.contains_key(&s2) {
                continue;
            }
            let mut rows: Vec<QVec> = (0..r)
                .map(|i| (0..r).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
                .collect();
            for (h, &p) in forms.iter().zip(&s2) {
                rows.push(if p { h.clone() } else { rat::neg(h) });
            }
            if let Some(t) = lp::strict_cone_point(r, &rows) {
                cells.insert(s2.clone(), t);
                queue.push_back(s2);
            }
        }
    }
    let mut out: Vec<GenericType> = cells
        .values()
        .map(|t| {
            let x = to_x(t);
            GenericType { class: classify(&x, ws), witness: x }
        })
        .collect();
    out.sort_by_cached_key(|t| t.class.key());
    Ok(out)
}

/// Real form of the group, needed for condition (i).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    Split,
    Adjoint,
    SoPq { p: usize, q: usize },
    Custom,
}

impl GroupKind {
    pub fn parse(s: &str) -> Option<GroupKind> {
        let t = s.trim().to_ascii_lowercase().replace(' ', "");
        match t.as_str() {
            "split" => return Some(GroupKind::Split),
            "adjoint" => return Some(GroupKind::Adjoint),
            "custom" => return Some(GroupKind::Custom),
            _ => {}
        }
        let inner = |pre: &str| t.strip_prefix(pre).and_then(|r| r.strip_suffix(')')).map(str::to_string);
        if let Some(args) = inner("so(") {
            let (p, q) = args.split_once(',')?;
            return Some(GroupKind::SoPq { p: p.parse().ok()?, q: q.parse().ok()? });
        }
        if inner("sl(").is_some() {
            return Some(GroupKind::Split);
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

impl Condition {
    fn ok() -> Self {
        Condition { status: Status::Satisfied, witness: None, reason: None }
    }

    fn failed(reason: &str, witness: Option<Vec<String>>) -> Self {
        Condition { status: Status::Failed, witness, reason: Some(reason.into()) }
    }

    fn numeric(reason: &str) -> Self {
        Condition { status: Status::NeedsNumeric, witness: None, reason: Some(reason.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub system: String,
    pub highest: Vec<String>,
    pub group: GroupKind,
    pub zero_weight: Condition,
    pub cond_ii_no_swinging: Condition,
    pub cond_ia_fixed_vector: Condition,
    pub cond_ib_w0_moves: Condition,
}

impl ConditionReport {
    pub fn conditions(&self) -> [&Condition; 4] {
        [&self.zero_weight, &self.cond_ii_no_swinging, &self.cond_ia_fixed_vector, &self.cond_ib_w0_moves]
    }

    pub fn all_satisfied(&self) -> bool {
        self.conditions().iter().all(|c| c.status == Status::Satisfied)
    }

    pub fn any_failed(&self) -> bool {
        self.conditions().iter().any(|c| c.status == Status::Failed)
    }
}

fn is_standard_so(rs: &RootSystem, lambda: &[Q]) -> bool {
    let mut e1 = rat::zeros(rs.ambient_dim);
    e1[0] = Q::one();
    lambda == e1.as_slice()
}

pub fn main_theorem_report(rs: &RootSystem, lambda: &[Q], kind: GroupKind) -> Result<ConditionReport, TypingError> {
    let ws = weight_set(rs, lambda)?;
    let w0 = longest_element(rs);
    let zero = has_zero_weight(&ws);
    let zero_weight = if zero {
        Condition::ok()
    } else {
        Condition::failed("0 is not a restricted weight", Some(fmt_qvec(lambda)))
    };
    let cond_ii = match no_swinging(&ws, &w0) {
        (Status::Satisfied, _) => Condition::ok(),
        (_, w) => Condition::failed("a nonzero weight is fixed by w0", w.map(|w| fmt_qvec(&w))),
    };
    let adjoint = kind == GroupKind::Adjoint || lambda == rs.highest_root().as_slice();
    let split = match kind {
        GroupKind::Split | GroupKind::Adjoint => true,
        GroupKind::SoPq { p, q } => p <= q + 1,
        GroupKind::Custom => false,
    };
    let cond_ia = if !zero {
        Condition::failed("V^0 is trivial", None)
    } else if split {
        Condition::ok()
    } else {
        Condition::numeric("fixed space of L in V^0 depends on the real form")
    };
    let cond_ib = if cond_ia.status == Status::Failed {
        Condition::failed("V^t_0 is trivial", None)
    } else if let GroupKind::SoPq { p, q } = kind {
        if p == q + 1 && is_standard_so(rs, lambda) {
            if q % 2 == 1 {
                Condition::ok()
            } else {
                Condition::failed("w0 acts trivially on V^t_0", Some(vec!["1".into()]))
            }
        } else if adjoint {
            Condition::ok()
        } else {
            Condition::numeric("action of w0 on V^t_0 not known in closed form")
        }
    } else if adjoint {
        Condition::ok()
    } else {
        Condition::numeric("action of w0 on V^t_0 not known in closed form")
    };
    Ok(ConditionReport {
        system: rs.name(),
        highest: fmt_qvec(lambda),
        group: kind,
        zero_weight,
        cond_ii_no_swinging: cond_ii,
        cond_ia_fixed_vector: cond_ia,
        cond_ib_w0_moves: cond_ib,
    })
}

/// Overwrites the numeric entries of a report from measured data.
pub fn settle_numeric(report: &mut ConditionReport, dim_vt0: usize, w0_nontrivial: bool) {
    if report.cond_ia_fixed_vector.status == Status::NeedsNumeric {
        report.cond_ia_fixed_vector =
            if dim_vt0 > 0 { Condition::ok() } else { Condition::failed("V^t_0 is trivial", None) };
    }
    if report.cond_ib_w0_moves.status == Status::NeedsNumeric {
        report.cond_ib_w0_moves = if dim_vt0 > 0 && w0_nontrivial {
            Condition::ok()
        } else {
            Condition::failed("w0 acts trivially on V^t_0", None)
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qvec;
    use crate::rootsys::RootLabel;

    fn ws(label: RootLabel, rank: usize, hw: &[i64]) -> WeightSet {
        let rs = RootSystem::build(label, rank).unwrap();
        weight_set(&rs, &qvec(hw)).unwrap()
    }

    #[test]
    fn classify_b2_standard() {
        let w = ws(RootLabel::B, 2, &[1, 0]);
        let t = classify(&qvec(&[2, 1]), &w);
        assert!(t.is_generic());
        assert_eq!(t.omega_pos.len(), 2);
        assert!(!classify(&qvec(&[1, 0]), &w).is_generic());
        assert_eq!(classify(&qvec(&[0, 0]), &w).omega_zero.len(), 5);
    }

    #[test]
    fn same_type_b2_35() {
        let w = ws(RootLabel::B, 2, &[2, 1]);
        assert!(!same_type(&qvec(&[3, 1]), &qvec(&[1, 1]), &w));
        let s = ws(RootLabel::B, 2, &[1, 0]);
        assert!(same_type(&qvec(&[2, 1]), &qvec(&[1, 1]), &s));
    }

    #[test]
    fn b2_extreme_vector_on_diagonal() {
        let w = ws(RootLabel::B, 2, &[1, 0]);
        let group = weyl_group(&w.rs).unwrap();
        assert_eq!(weyl_stabilizer_up_to_type(&qvec(&[2, 1]), &w, &group).len(), 2);
        let r = extreme_representative(&qvec(&[2, 1]), &w, &group).unwrap();
        assert_eq!(r.x0[0], r.x0[1]);
        assert_eq!(r.pi_x0, vec![0]);
        assert_eq!(r.w_x0.len(), 2);
    }

    #[test]
    fn group_kind_parsing() {
        assert_eq!(GroupKind::parse("so(4,3)"), Some(GroupKind::SoPq { p: 4, q: 3 }));
        assert_eq!(GroupKind::parse("sl(3)"), Some(GroupKind::Split));
        assert_eq!(GroupKind::parse("x"), None);
    }
}
