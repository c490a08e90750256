//! A 256-bit binary floating-point scalar.
//!
//! Products of contracting group elements reach norms around 1e30, and the
//! quantities measured on them are of order one, so double precision is not
//! enough. Values are `(-1)^neg * M * 2^(exp - 256)` with a 256-bit mantissa
//! `M` whose top bit is set; results are rounded to nearest.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

const LIMBS: usize = 4;
const BITS: i64 = 256;

#[derive(Clone, Copy)]
pub struct Hp {
    neg: bool,
    exp: i64,
    m: [u64; LIMBS],
}

fn top_bit(limbs: &[u64]) -> Option<i64> {
    limbs.iter().rposition(|&w| w != 0).map(|i| i as i64 * 64 + 63 - limbs[i].leading_zeros() as i64)
}

/// Bits `[pos, pos + 64)` of the little-endian integer `limbs`.
fn get64(limbs: &[u64], pos: i64) -> u64 {
    let len = limbs.len() as i64 * 64;
    if pos >= len || pos <= -64 {
        return 0;
    }
    if pos < 0 {
        return limbs[0] << (-pos);
    }
    let idx = (pos / 64) as usize;
    let off = pos % 64;
    let lo = limbs[idx] >> off;
    let hi = if off > 0 && idx + 1 < limbs.len() { limbs[idx + 1] << (64 - off) } else { 0 };
    lo | hi
}

fn bit(limbs: &[u64], pos: i64) -> bool {
    if pos < 0 || pos >= limbs.len() as i64 * 64 {
        return false;
    }
    (limbs[(pos / 64) as usize] >> (pos % 64)) & 1 == 1
}

impl Hp {
    pub const ZERO: Hp = Hp { neg: false, exp: 0, m: [0; LIMBS] };

    /// Builds a value from `W * 2^e0` with `W` given by little-endian limbs.
    fn from_wide(neg: bool, limbs: &[u64], e0: i64) -> Hp {
        let Some(h) = top_bit(limbs) else { return Hp::ZERO };
        let start = h - (BITS - 1);
        let mut m = [0u64; LIMBS];
        for (j, w) in m.iter_mut().enumerate() {
            *w = get64(limbs, start + 64 * j as i64);
        }
        let mut exp = h + 1 + e0;
        if bit(limbs, start - 1) {
            let mut carry = true;
            for w in m.iter_mut() {
                if carry {
                    let (v, c) = w.overflowing_add(1);
                    *w = v;
                    carry = c;
                }
            }
            if carry {
                m = [0, 0, 0, 1u64 << 63];
                exp += 1;
            }
        }
        Hp { neg, exp, m }
    }

    pub fn is_zero(&self) -> bool {
        self.m[LIMBS - 1] == 0
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.neg && !self.is_zero()
    }

    pub fn abs(self) -> Hp {
        Hp { neg: false, ..self }
    }

    pub fn signum(self) -> i32 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    pub fn one() -> Hp {
        Hp::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Hp {
        Hp::from_wide(v < 0, &[v.unsigned_abs()], 0)
    }

    pub fn from_f64(v: f64) -> Hp {
        if v == 0.0 || !v.is_finite() {
            return Hp::ZERO;
        }
        let bits = v.to_bits();
        let neg = bits >> 63 == 1;
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e2) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        Hp::from_wide(neg, &[mant], e2)
    }

    /// Exact value of a big integer given as little-endian limbs.
    pub fn from_limbs(neg: bool, limbs: &[u64]) -> Hp {
        Hp::from_wide(neg, limbs, 0)
    }

    pub fn from_q(x: &crate::rat::Q) -> Hp {
        use num_traits::Zero;
        if x.is_zero() {
            return Hp::ZERO;
        }
        let (sign, n) = x.numer().to_u64_digits();
        let (_, d) = x.denom().to_u64_digits();
        Hp::from_limbs(sign == num_bigint::Sign::Minus, &n) / Hp::from_limbs(false, &d)
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let top = self.m[LIMBS - 1] as f64;
        let v = ldexp(top, self.exp - 64);
        if self.neg {
            -v
        } else {
            v
        }
    }

    /// `self * 2^k`.
    pub fn mul_pow2(self, k: i64) -> Hp {
        if self.is_zero() {
            self
        } else {
            Hp { exp: self.exp + k, ..self }
        }
    }

    /// Binary exponent: `|self|` lies in `[2^(e-1), 2^e)`.
    pub fn exponent(self) -> i64 {
        self.exp
    }

    pub fn epsilon() -> Hp {
        Hp::one().mul_pow2(-(BITS - 1))
    }

    fn cmp_abs(&self, other: &Hp) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        self.exp.cmp(&other.exp).then_with(|| {
            for i in (0..LIMBS).rev() {
                match self.m[i].cmp(&other.m[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    fn add_signed(a: Hp, b: Hp) -> Hp {
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return b;
        }
        let (a, b) = if a.cmp_abs(&b) == Ordering::Less { (b, a) } else { (a, b) };
        let d = a.exp - b.exp;
        if d > BITS + 130 {
            return a;
        }
        // a occupies limbs 2..6 of a 7-limb buffer; b is shifted right by d
        let mut wa = [0u64; 7];
        wa[2..6].copy_from_slice(&a.m);
        let mut wb = [0u64; 7];
        for (j, w) in wb.iter_mut().enumerate().take(6) {
            *w = get64(&b.m, 64 * j as i64 - 128 + d);
        }
        let mut out = [0u64; 7];
        if a.neg == b.neg {
            let mut carry = 0u128;
            for j in 0..7 {
                let s = wa[j] as u128 + wb[j] as u128 + carry;
                out[j] = s as u64;
                carry = s >> 64;
            }
        } else {
            let mut borrow = 0i128;
            for j in 0..7 {
                let s = wa[j] as i128 - wb[j] as i128 - borrow;
                if s < 0 {
                    out[j] = (s + (1i128 << 64)) as u64;
                    borrow = 1;
                } else {
                    out[j] = s as u64;
                    borrow = 0;
                }
            }
        }
        Hp::from_wide(a.neg, &out, a.exp - BITS - 128)
    }

    fn mul_impl(a: Hp, b: Hp) -> Hp {
        if a.is_zero() || b.is_zero() {
            return Hp::ZERO;
        }
        let mut p = [0u64; 2 * LIMBS];
        for i in 0..LIMBS {
            let mut carry = 0u128;
            for j in 0..LIMBS {
                let t = a.m[i] as u128 * b.m[j] as u128 + p[i + j] as u128 + carry;
                p[i + j] = t as u64;
                carry = t >> 64;
            }
            p[i + LIMBS] = carry as u64;
        }
        Hp::from_wide(a.neg != b.neg, &p, a.exp + b.exp - 2 * BITS)
    }

    /// Division by a small positive integer.
    pub fn div_u64(self, n: u64) -> Hp {
        if self.is_zero() {
            return self;
        }
        // (M * 2^128) / n as six limbs
        let mut num = [0u64; 6];
        num[2..6].copy_from_slice(&self.m);
        let mut q = [0u64; 6];
        let mut rem = 0u128;
        for j in (0..6).rev() {
            let cur = (rem << 64) | num[j] as u128;
            q[j] = (cur / n as u128) as u64;
            rem = cur % n as u128;
        }
        Hp::from_wide(self.neg, &q, self.exp - BITS - 128)
    }

    pub fn recip(self) -> Hp {
        assert!(!self.is_zero(), "division by zero");
        let e = self.exp;
        let b = Hp { neg: false, exp: 0, m: self.m };
        let mut r = Hp::from_f64(1.0 / b.to_f64());
        let one = Hp::one();
        for _ in 0..4 {
            r = r + r * (one - b * r);
        }
        Hp { neg: self.neg, ..r }.mul_pow2(-e)
    }

    pub fn sqrt(self) -> Hp {
        if self.is_zero() {
            return self;
        }
        assert!(!self.neg, "sqrt of negative number");
        let k = self.exp.div_euclid(2);
        let a = Hp { exp: self.exp - 2 * k, ..self };
        let one = Hp::one();
        let mut y = Hp::from_f64(1.0 / a.to_f64().sqrt());
        for _ in 0..4 {
            y = y + (y * (one - a * y * y)).mul_pow2(-1);
        }
        let mut s = a * y;
        s = s + (y * (a - s * s)).mul_pow2(-1);
        s.mul_pow2(k)
    }

    pub fn ln2() -> Hp {
        static LN2: OnceLock<Hp> = OnceLock::new();
        *LN2.get_or_init(|| {
            let mut sum = Hp::ZERO;
            for k in 1..=300u64 {
                sum += Hp::one().mul_pow2(-(k as i64)).div_u64(k);
            }
            sum
        })
    }

    pub fn exp(self) -> Hp {
        if self.is_zero() {
            return Hp::one();
        }
        let xf = self.to_f64();
        assert!(xf.abs() < 1e15, "exp argument out of range");
        let k = (xf / std::f64::consts::LN_2).round() as i64;
        let r = (self - Hp::ln2() * Hp::from_i64(k)).mul_pow2(-10);
        let mut sum = Hp::one();
        let mut term = Hp::one();
        let tiny = Hp::one().mul_pow2(-BITS - 8);
        for n in 1..80u64 {
            term = (term * r).div_u64(n);
            sum += term;
            if term.cmp_abs(&tiny) == Ordering::Less {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum.mul_pow2(k)
    }

    pub fn ln(self) -> Hp {
        assert!(self.is_positive(), "ln of nonpositive number");
        let e = self.exp;
        let xs = Hp { exp: 0, ..self };
        let mut y = Hp::from_f64(xs.to_f64().ln());
        for _ in 0..3 {
            let ey = y.exp();
            y += ((xs - ey) / (xs + ey)).mul_pow2(1);
        }
        y + Hp::ln2() * Hp::from_i64(e)
    }

    pub fn powi(self, n: i32) -> Hp {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Hp::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    pub fn max(self, other: Hp) -> Hp {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Hp) -> Hp {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn hypot(self, other: Hp) -> Hp {
        (self * self + other * other).sqrt()
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

impl Default for Hp {
    fn default() -> Self {
        Hp::ZERO
    }
}

impl From<f64> for Hp {
    fn from(v: f64) -> Self {
        Hp::from_f64(v)
    }
}

impl From<i64> for Hp {
    fn from(v: i64) -> Self {
        Hp::from_i64(v)
    }
}

impl PartialEq for Hp {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Hp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        let c = self.cmp_abs(other);
        Some(if sa < 0 { c.reverse() } else { c })
    }
}

impl Neg for Hp {
    type Output = Hp;
    fn neg(self) -> Hp {
        if self.is_zero() {
            self
        } else {
            Hp { neg: !self.neg, ..self }
        }
    }
}

impl Add for Hp {
    type Output = Hp;
    fn add(self, rhs: Hp) -> Hp {
        Hp::add_signed(self, rhs)
    }
}

impl Sub for Hp {
    type Output = Hp;
    fn sub(self, rhs: Hp) -> Hp {
        Hp::add_signed(self, -rhs)
    }
}

impl Mul for Hp {
    type Output = Hp;
    fn mul(self, rhs: Hp) -> Hp {
        Hp::mul_impl(self, rhs)
    }
}

impl Div for Hp {
    type Output = Hp;
    fn div(self, rhs: Hp) -> Hp {
        self * rhs.recip()
    }
}

impl AddAssign for Hp {
    fn add_assign(&mut self, rhs: Hp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Hp {
    fn sub_assign(&mut self, rhs: Hp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Hp {
    fn mul_assign(&mut self, rhs: Hp) {
        *self = *self * rhs;
    }
}

impl DivAssign for Hp {
    fn div_assign(&mut self, rhs: Hp) {
        *self = *self / rhs;
    }
}

impl std::iter::Sum for Hp {
    fn sum<I: Iterator<Item = Hp>>(iter: I) -> Hp {
        iter.fold(Hp::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Display for Hp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Hp, b: Hp, rel_bits: i64) -> bool {
        let d = (a - b).abs();
        d.is_zero() || d <= a.abs().max(b.abs()).mul_pow2(-rel_bits)
    }

    #[test]
    fn f64_round_trip() {
        for v in [1.0, -3.5, 1e-300, 7.25e200, 0.1, -2.0f64.powi(-1060)] {
            assert_eq!(Hp::from_f64(v).to_f64(), v);
        }
    }

    #[test]
    fn arithmetic_identities() {
        let a = Hp::from_f64(0.1);
        let b = Hp::from_f64(3.7);
        assert!(close((a + b) - b, a, 240));
        assert!(close(a * b / b, a, 240));
        assert!(close(Hp::from_i64(2).sqrt() * Hp::from_i64(2).sqrt(), Hp::from_i64(2), 240));
        assert_eq!(Hp::from_i64(7) - Hp::from_i64(7), Hp::ZERO);
        assert!(Hp::from_i64(-2) < Hp::from_i64(1));
        assert!(Hp::from_f64(-0.5) > Hp::from_i64(-1));
    }

    #[test]
    fn one_third_has_full_precision() {
        let t = Hp::one().div_u64(3);
        let r = Hp::one() - t * Hp::from_i64(3);
        assert!(r.abs() <= Hp::one().mul_pow2(-250));
        assert!(close(Hp::one() / Hp::from_i64(3), t, 250));
    }

    #[test]
    fn exp_and_ln() {
        let ln2 = Hp::ln2();
        assert!((ln2.to_f64() - std::f64::consts::LN_2).abs() < 1e-16);
        assert!(close(ln2.exp(), Hp::from_i64(2), 235));
        for v in [0.3, 5.0, -12.5, 40.0] {
            let x = Hp::from_f64(v);
            assert!(close(x.exp().ln(), x, 225), "{v}");
            assert!((x.exp().to_f64() - v.exp()).abs() <= 1e-14 * v.exp());
        }
        let e = Hp::one().exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn cancellation_keeps_low_bits() {
        let big = Hp::from_f64(1e20);
        let small = Hp::from_f64(1e-30);
        assert!(close((big + small) - big, small, 100));
    }
}
