//! Restricted root systems in e-coordinates, their Weyl groups, fundamental
//! weights and longest elements. Everything here is exact.

use crate::rat::{self, fmt_qvec, q, qf, Q, QMat, QVec};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

pub const DEFAULT_RANK_CAP: usize = 6;
const ROOT_COUNT_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    BC,
}

impl fmt::Display for RootLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootLabel::A => "A",
            RootLabel::B => "B",
            RootLabel::C => "C",
            RootLabel::D => "D",
            RootLabel::E => "E",
            RootLabel::F => "F",
            RootLabel::G => "G",
            RootLabel::BC => "BC",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootSysError {
    #[error("unknown root system label {0:?}")]
    InvalidLabel(String),
    #[error("invalid rank {rank} for type {label}")]
    InvalidRank { label: RootLabel, rank: usize },
    #[error("Cartan integer at ({0}, {1}) is not a nonpositive integer")]
    NotCrystallographic(usize, usize),
    #[error("root closure did not terminate")]
    Infinite,
    #[error("rank {rank} exceeds the Weyl enumeration cap {cap}")]
    CapExceeded { rank: usize, cap: usize },
    #[error("simple roots must be linearly independent")]
    Dependent,
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub label: RootLabel,
    pub rank: usize,
    pub ambient_dim: usize,
    pub simple_roots: Vec<QVec>,
    /// Gram matrix of the pairing on the ambient space.
    pub pairing: QMat,
    /// `doubled[i]` is true when `2 alpha_i` is itself a root.
    pub doubled: Vec<bool>,
    roots: Vec<QVec>,
    positive: Vec<QVec>,
    simple_gram: QMat,
}

/// Parses labels such as `B2`, `E6`, `BC3`.
pub fn parse_system(s: &str) -> Result<(RootLabel, usize), RootSysError> {
    let t = s.trim().to_ascii_uppercase();
    let split = t.find(|c: char| c.is_ascii_digit()).ok_or_else(|| RootSysError::InvalidLabel(s.into()))?;
    let (l, r) = t.split_at(split);
    let label = match l {
        "A" => RootLabel::A,
        "B" => RootLabel::B,
        "C" => RootLabel::C,
        "D" => RootLabel::D,
        "E" => RootLabel::E,
        "F" => RootLabel::F,
        "G" => RootLabel::G,
        "BC" => RootLabel::BC,
        _ => return Err(RootSysError::InvalidLabel(s.into())),
    };
    let rank = r.parse().map_err(|_| RootSysError::InvalidLabel(s.into()))?;
    Ok((label, rank))
}

fn unit(n: usize, i: usize) -> QVec {
    let mut v = rat::zeros(n);
    v[i] = Q::one();
    v
}

fn diff(n: usize, i: usize, j: usize) -> QVec {
    let mut v = unit(n, i);
    v[j] = q(-1);
    v
}

fn e8_simple() -> Vec<QVec> {
    let h = qf(1, 2);
    let mut a1 = vec![-h.clone(); 8];
    a1[0] = h.clone();
    a1[7] = h;
    let mut a2 = rat::zeros(8);
    a2[0] = q(1);
    a2[1] = q(1);
    let mut v = vec![a1, a2];
    for i in 0..6 {
        v.push(diff(8, i + 1, i));
    }
    v
}

impl RootSystem {
    pub fn build(label: RootLabel, rank: usize) -> Result<Self, RootSysError> {
        let bad = || RootSysError::InvalidRank { label, rank };
        let n = rank;
        let (ambient, simple, doubled) = match label {
            RootLabel::A => {
                if n < 1 {
                    return Err(bad());
                }
                let s = (0..n).map(|i| diff(n + 1, i, i + 1)).collect();
                (n + 1, s, vec![false; n])
            }
            RootLabel::B | RootLabel::C | RootLabel::BC => {
                if n < 1 {
                    return Err(bad());
                }
                let mut s: Vec<QVec> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
                let mut last = unit(n, n - 1);
                if label == RootLabel::C {
                    last[n - 1] = q(2);
                }
                s.push(last);
                let mut d = vec![false; n];
                d[n - 1] = label == RootLabel::BC;
                (n, s, d)
            }
            RootLabel::D => {
                if n < 3 {
                    return Err(bad());
                }
                let mut s: Vec<QVec> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
                let mut last = unit(n, n - 2);
                last[n - 1] = q(1);
                s.push(last);
                (n, s, vec![false; n])
            }
            RootLabel::E => {
                if !(6..=8).contains(&n) {
                    return Err(bad());
                }
                (8, e8_simple().into_iter().take(n).collect(), vec![false; n])
            }
            RootLabel::F => {
                if n != 4 {
                    return Err(bad());
                }
                let h = qf(1, 2);
                let s = vec![
                    diff(4, 1, 2),
                    diff(4, 2, 3),
                    unit(4, 3),
                    vec![h.clone(), -h.clone(), -h.clone(), -h],
                ];
                (4, s, vec![false; 4])
            }
            RootLabel::G => {
                if n != 2 {
                    return Err(bad());
                }
                (3, vec![diff(3, 0, 1), rat::qvec(&[-2, 1, 1])], vec![false; 2])
            }
        };
        Self::from_simple_roots(label, simple, rat::identity(ambient), doubled)
    }

    pub fn from_label(s: &str) -> Result<Self, RootSysError> {
        let (l, r) = parse_system(s)?;
        Self::build(l, r)
    }

    pub fn from_simple_roots(
        label: RootLabel,
        simple_roots: Vec<QVec>,
        pairing: QMat,
        doubled: Vec<bool>,
    ) -> Result<Self, RootSysError> {
        let rank = simple_roots.len();
        let ambient_dim = pairing.len();
        let ip = |a: &[Q], b: &[Q]| rat::dot(a, &rat::mat_vec(&pairing, b));
        let simple_gram: QMat =
            simple_roots.iter().map(|a| simple_roots.iter().map(|b| ip(a, b)).collect()).collect();
        if rat::rank(&simple_gram) < rank {
            return Err(RootSysError::Dependent);
        }
        for i in 0..rank {
            for j in 0..rank {
                if i != j {
                    let c = q(2) * &simple_gram[i][j] / &simple_gram[j][j];
                    if !c.is_integer() || c.is_positive() {
                        return Err(RootSysError::NotCrystallographic(i, j));
                    }
                }
            }
        }
        let mut rs = RootSystem {
            label,
            rank,
            ambient_dim,
            simple_roots,
            pairing,
            doubled,
            roots: Vec::new(),
            positive: Vec::new(),
            simple_gram,
        };
        rs.generate_roots()?;
        Ok(rs)
    }

    fn generate_roots(&mut self) -> Result<(), RootSysError> {
        let mut seen: BTreeSet<QVec> = BTreeSet::new();
        let mut queue: VecDeque<QVec> = VecDeque::new();
        for (i, a) in self.simple_roots.iter().enumerate() {
            queue.push_back(a.clone());
            if self.doubled[i] {
                queue.push_back(rat::scale(&q(2), a));
            }
        }
        while let Some(r) = queue.pop_front() {
            if !seen.insert(r.clone()) {
                continue;
            }
            if seen.len() > ROOT_COUNT_LIMIT {
                return Err(RootSysError::Infinite);
            }
            for i in 0..self.rank {
                let s = self.reflect(i, &r);
                if !seen.contains(&s) {
                    queue.push_back(s);
                }
            }
        }
        self.roots = seen.into_iter().collect();
        self.positive = self.roots.iter().filter(|r| self.is_positive_root(r)).cloned().collect();
        Ok(())
    }

    fn is_positive_root(&self, r: &[Q]) -> bool {
        let c = self.simple_coords(r);
        c.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive())
    }

    pub fn inner(&self, a: &[Q], b: &[Q]) -> Q {
        rat::dot(a, &rat::mat_vec(&self.pairing, b))
    }

    pub fn norm2(&self, a: &[Q]) -> Q {
        self.inner(a, a)
    }

    /// Simple reflection `s_i`.
    pub fn reflect(&self, i: usize, x: &[Q]) -> QVec {
        let a = &self.simple_roots[i];
        let c = q(2) * self.inner(x, a) / &self.simple_gram[i][i];
        rat::sub(x, &rat::scale(&c, a))
    }

    pub fn reflection_matrix(&self, i: usize) -> QMat {
        let n = self.ambient_dim;
        let cols: Vec<QVec> = (0..n).map(|r| self.reflect(i, &unit(n, r))).collect();
        rat::transpose(&cols)
    }

    /// `s_i * m`, computed as a rank-one update.
    pub fn reflect_left(&self, i: usize, m: &QMat) -> QMat {
        let a = &self.simple_roots[i];
        let pa = rat::mat_vec(&self.pairing, a);
        let c = q(2) / &self.simple_gram[i][i];
        let n = m.first().map_or(0, Vec::len);
        let row: QVec = (0..n)
            .map(|b| &c * m.iter().zip(&pa).fold(Q::zero(), |acc, (mr, p)| acc + p * &mr[b]))
            .collect();
        m.iter()
            .zip(a)
            .map(|(mr, ai)| {
                if ai.is_zero() {
                    mr.clone()
                } else {
                    mr.iter().zip(&row).map(|(x, r)| x - ai * r).collect()
                }
            })
            .collect()
    }

    /// Coefficients of the projection of `x` onto the root span in the basis of simple roots.
    pub fn simple_coords(&self, x: &[Q]) -> QVec {
        let rhs: QVec = self.simple_roots.iter().map(|a| self.inner(x, a)).collect();
        rat::solve(&self.simple_gram, &rhs).expect("simple roots are independent")
    }

    pub fn in_root_span(&self, x: &[Q]) -> bool {
        let c = self.simple_coords(x);
        let back = self.combine(&c);
        back == x
    }

    pub fn combine(&self, coeffs: &[Q]) -> QVec {
        let mut v = rat::zeros(self.ambient_dim);
        for (c, a) in coeffs.iter().zip(&self.simple_roots) {
            v = rat::add(&v, &rat::scale(c, a));
        }
        v
    }

    pub fn roots(&self) -> &[QVec] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[QVec] {
        &self.positive
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| {
                        let c = q(2) * &self.simple_gram[i][j] / &self.simple_gram[j][j];
                        rat::to_f64(&c) as i64
                    })
                    .collect()
            })
            .collect()
    }

    /// `alpha'_i`: twice the simple root when that is a root, else the simple root.
    pub fn alpha_prime(&self, i: usize) -> QVec {
        if self.doubled[i] {
            rat::scale(&q(2), &self.simple_roots[i])
        } else {
            self.simple_roots[i].clone()
        }
    }

    pub fn is_dominant(&self, x: &[Q]) -> bool {
        self.simple_roots.iter().all(|a| !self.inner(x, a).is_negative())
    }

    pub fn is_strictly_dominant(&self, x: &[Q]) -> bool {
        self.simple_roots.iter().all(|a| self.inner(x, a).is_positive())
    }

    /// The positive root of greatest height.
    pub fn highest_root(&self) -> QVec {
        self.positive
            .iter()
            .max_by_key(|r| self.simple_coords(r).iter().fold(Q::zero(), |a, b| a + b))
            .cloned()
            .expect("nonempty root system")
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.label, self.rank)
    }

    pub fn describe_simple(&self) -> Vec<Vec<String>> {
        self.simple_roots.iter().map(|a| fmt_qvec(a)).collect()
    }
}

/// A Weyl group element acting on the ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    pub matrix: QMat,
    /// Simple reflection indices with `w = s_{word[0]} s_{word[1]} ...`.
    pub word: Vec<usize>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement { matrix: rat::identity(n), word: Vec::new() }
    }

    pub fn apply(&self, x: &[Q]) -> QVec {
        rat::mat_vec(&self.matrix, x)
    }

    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let mut word = self.word.clone();
        word.extend(&other.word);
        WeylElement { matrix: rat::mat_mul(&self.matrix, &other.matrix), word }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut word = self.word.clone();
        word.reverse();
        WeylElement { matrix: inverse_orthogonal(&self.matrix), word }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == rat::identity(self.matrix.len())
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }
}

fn inverse_orthogonal(m: &QMat) -> QMat {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e = unit(n, j);
        cols.push(rat::solve(m, &e).expect("Weyl matrices are invertible"));
    }
    rat::transpose(&cols)
}

pub fn rho(rs: &RootSystem) -> QVec {
    fundamental_weights(rs).iter().fold(rat::zeros(rs.ambient_dim), |acc, w| rat::add(&acc, w))
}

/// Enumerates the Weyl group by closing the simple reflections, shortest
/// elements first. The identity comes first.
pub fn weyl_group_capped(rs: &RootSystem, cap: usize) -> Result<Vec<WeylElement>, RootSysError> {
    if rs.rank > cap {
        return Err(RootSysError::CapExceeded { rank: rs.rank, cap });
    }
    let r = rho(rs);
    let id = WeylElement::identity(rs.ambient_dim);
    let mut seen: HashMap<QVec, usize> = HashMap::new();
    seen.insert(r.clone(), 0);
    let mut images = vec![r];
    let mut out = vec![id];
    let mut head = 0;
    while head < out.len() {
        for i in 0..rs.rank {
            let key = rs.reflect(i, &images[head]);
            if seen.contains_key(&key) {
                continue;
            }
            seen.insert(key.clone(), out.len());
            let w = &out[head];
            let mut word = vec![i];
            word.extend(&w.word);
            let m = rs.reflect_left(i, &w.matrix);
            out.push(WeylElement { matrix: m, word });
            images.push(key);
        }
        head += 1;
    }
    Ok(out)
}

pub fn weyl_group(rs: &RootSystem) -> Result<Vec<WeylElement>, RootSysError> {
    weyl_group_capped(rs, DEFAULT_RANK_CAP)
}

/// Reflects at the lowest-index simple root that is negative on `x` until
/// `x` is dominant. Returns the dominant vector `y` and `w` with `y = w(x)`.
pub fn dominant_representative(rs: &RootSystem, x: &[Q]) -> (QVec, WeylElement) {
    let mut y = x.to_vec();
    let mut applied = Vec::new();
    let mut m = rat::identity(rs.ambient_dim);
    loop {
        let neg = (0..rs.rank).find(|&i| rs.inner(&y, &rs.simple_roots[i]).is_negative());
        let Some(i) = neg else { break };
        y = rs.reflect(i, &y);
        m = rs.reflect_left(i, &m);
        applied.push(i);
    }
    applied.reverse();
    (y, WeylElement { matrix: m, word: applied })
}

/// The unique Weyl element sending the positive roots to the negative ones.
pub fn longest_element(rs: &RootSystem) -> WeylElement {
    let r = rho(rs);
    let (_, w) = dominant_representative(rs, &rat::neg(&r));
    w
}

/// Fundamental restricted weights, with `alpha'_j = 2 alpha_j` when `2 alpha_j` is a root.
pub fn fundamental_weights(rs: &RootSystem) -> Vec<QVec> {
    (0..rs.rank)
        .map(|i| {
            let rhs: QVec = (0..rs.rank)
                .map(|j| {
                    if i == j {
                        let ap = rs.alpha_prime(j);
                        let mult = if rs.doubled[j] { q(2) } else { q(1) };
                        // <w, alpha_j> = |alpha'_j|^2 / (2 m_j)
                        rs.norm2(&ap) / (q(2) * mult)
                    } else {
                        Q::zero()
                    }
                })
                .collect();
            let c = rat::solve(&rs.simple_gram, &rhs).expect("nonsingular Gram matrix");
            rs.combine(&c)
        })
        .collect()
}

/// Basis `H_j` of the root span dual to the fundamental weights: `w_i(H_j) = delta_ij`.
pub fn dual_basis(rs: &RootSystem) -> Vec<QVec> {
    let fw = fundamental_weights(rs);
    let gram: QMat = fw.iter().map(|a| fw.iter().map(|b| rs.inner(a, b)).collect()).collect();
    (0..rs.rank)
        .map(|j| {
            let e: QVec = (0..rs.rank).map(|i| if i == j { Q::one() } else { Q::zero() }).collect();
            let c = rat::solve(&gram, &e).expect("fundamental weights are independent");
            let mut v = rat::zeros(rs.ambient_dim);
            for (ci, w) in c.iter().zip(&fw) {
                v = rat::add(&v, &rat::scale(ci, w));
            }
            v
        })
        .collect()
}

/// The permutation `sigma` of simple root indices with `-w0(alpha_i) = alpha_sigma(i)`.
pub fn minus_w0_permutation(rs: &RootSystem, w0: &WeylElement) -> Vec<usize> {
    (0..rs.rank)
        .map(|i| {
            let img = rat::neg(&w0.apply(&rs.simple_roots[i]));
            rs.simple_roots.iter().position(|a| *a == img).expect("-w0 permutes the simple roots")
        })
        .collect()
}

/// Whether `w` acts as `-Id` on the root span.
pub fn acts_as_minus_identity(rs: &RootSystem, w: &WeylElement) -> bool {
    rs.simple_roots.iter().all(|a| w.apply(a) == rat::neg(a))
}

/// Classical Weyl group orders.
pub fn weyl_order(label: RootLabel, rank: usize) -> u64 {
    let fact = |n: u64| (1..=n).product::<u64>();
    let n = rank as u64;
    match label {
        RootLabel::A => fact(n + 1),
        RootLabel::B | RootLabel::C | RootLabel::BC => (1u64 << n) * fact(n),
        RootLabel::D => (1u64 << (n - 1)) * fact(n),
        RootLabel::E => match rank {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        RootLabel::F => 1152,
        RootLabel::G => 12,
    }
}

/// Number of roots for the classical types (BC counts the doubled roots).
pub fn root_count(label: RootLabel, rank: usize) -> usize {
    let n = rank;
    match label {
        RootLabel::A => n * (n + 1),
        RootLabel::B | RootLabel::C => 2 * n * n,
        RootLabel::BC => 2 * n * n + 2 * n,
        RootLabel::D => 2 * n * (n - 1),
        RootLabel::E => match rank {
            6 => 72,
            7 => 126,
            _ => 240,
        },
        RootLabel::F => 48,
        RootLabel::G => 12,
    }
}
