//! Exact numbers of the form `a + b·√c` with rational `a`, `b` and a
//! non-negative integer radicand `c`.
//!
//! Values with different radicands can be compared exactly; arithmetic is
//! only defined between values that share a radicand (or are rational),
//! which is all the terrain code ever needs: every coordinate of a single
//! circle/segment intersection lives in one extension field.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{parse_rational, Rational};

/// Small primes used to pull square factors out of radicands.
const SQUARE_SIEVE: &[u32] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421,
    431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541, 547,
    557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659,
    661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787, 797,
    809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911, 919, 929,
    937, 941, 947, 953, 967, 971, 977, 983, 991, 997,
];

#[derive(Clone, Debug)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
    c: BigInt,
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `a + b·√c` (c > 0 assumed when b != 0).
fn sign_single(a: &Rational, b: &Rational, c: &BigInt) -> i8 {
    let sa = sign_of(a);
    let sb = sign_of(b);
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let lhs = a * a;
    let rhs = b * b * Rational::from_integer(c.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Splits a positive integer into `(k, s)` with `n = k²·s`, removing the
/// square factors of small primes and detecting a perfect-square cofactor.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(n.sign() == Sign::Plus);
    if let Some(v) = n.to_u64() {
        return split_square_u64(v);
    }
    let mut k = BigInt::one();
    let mut s = n.clone();
    for &p in SQUARE_SIEVE {
        let p = BigInt::from(p);
        let p2 = &p * &p;
        while (&s % &p2).is_zero() {
            s /= &p2;
            k *= &p;
        }
    }
    let r = s.sqrt();
    if &r * &r == s {
        return (k * r, BigInt::one());
    }
    (k, s)
}

fn split_square_u64(mut s: u64) -> (BigInt, BigInt) {
    let mut k: u64 = 1;
    for &p in SQUARE_SIEVE {
        let p = p as u64;
        let p2 = p * p;
        if p2 > s {
            break;
        }
        while s.is_multiple_of(p2) {
            s /= p2;
            k *= p;
        }
    }
    let r = s.sqrt();
    if r * r == s {
        (BigInt::from(k) * BigInt::from(r), BigInt::one())
    } else {
        (BigInt::from(k), BigInt::from(s))
    }
}

impl QuadExt {
    pub fn from_rational(a: Rational) -> Self {
        QuadExt {
            a,
            b: Rational::zero(),
            c: BigInt::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(v)))
    }

    /// Builds `a + b·√c`, pulling square factors out of `c`.
    pub fn new(a: Rational, b: Rational, c: BigInt) -> Self {
        assert!(c.sign() != Sign::Minus, "negative radicand");
        if b.is_zero() || c.is_zero() {
            return Self::from_rational(a);
        }
        let (k, s) = split_square(&c);
        let b = b * Rational::from_integer(k);
        if s.is_one() {
            return Self::from_rational(a + b);
        }
        QuadExt { a, b, c: s }
    }

    /// `coef · √q` for a non-negative rational `q`.
    pub fn sqrt_times(coef: Rational, q: &Rational) -> Self {
        assert!(!q.is_negative(), "square root of a negative number");
        // √(n/d) = √(n·d) / d
        let n = q.numer() * q.denom();
        let scale = coef / Rational::from_integer(q.denom().clone());
        Self::new(Rational::zero(), scale, n)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_coefficient(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.c
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn signum(&self) -> i8 {
        sign_single(&self.a, &self.b, &self.c)
    }

    fn join_radicand(&self, other: &QuadExt) -> BigInt {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => BigInt::zero(),
            (false, true) => self.c.clone(),
            (true, false) => other.c.clone(),
            (false, false) => {
                assert_eq!(self.c, other.c, "arithmetic across different radicands");
                self.c.clone()
            }
        }
    }

    pub fn add(&self, other: &QuadExt) -> QuadExt {
        let c = self.join_radicand(other);
        Self::new(&self.a + &other.a, &self.b + &other.b, c)
    }

    pub fn sub(&self, other: &QuadExt) -> QuadExt {
        let c = self.join_radicand(other);
        Self::new(&self.a - &other.a, &self.b - &other.b, c)
    }

    pub fn mul(&self, other: &QuadExt) -> QuadExt {
        let c = self.join_radicand(other);
        let cr = Rational::from_integer(c.clone());
        let a = &self.a * &other.a + &self.b * &other.b * cr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Self::new(a, b, c)
    }

    pub fn add_rational(&self, r: &Rational) -> QuadExt {
        QuadExt {
            a: &self.a + r,
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }

    pub fn scale(&self, r: &Rational) -> QuadExt {
        if r.is_zero() {
            return Self::from_rational(Rational::zero());
        }
        QuadExt {
            a: &self.a * r,
            b: &self.b * r,
            c: self.c.clone(),
        }
    }

    pub fn neg(&self) -> QuadExt {
        QuadExt {
            a: -&self.a,
            b: -&self.b,
            c: self.c.clone(),
        }
    }

    /// Rational bounds `lo <= self <= hi` whose width shrinks like `2^-bits`.
    pub fn bounds(&self, bits: u32) -> (Rational, Rational) {
        if self.is_rational() {
            return (self.a.clone(), self.a.clone());
        }
        let scale = BigInt::one() << bits;
        let root = (&self.c * &scale * &scale).sqrt();
        let lo = Rational::new(root.clone(), scale.clone());
        let hi = Rational::new(root + 1, scale);
        let p = &self.a + &self.b * &lo;
        let q = &self.a + &self.b * &hi;
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    }

    /// A rational strictly between `lo` and `hi` (requires `lo < hi`).
    pub fn rational_between(lo: &QuadExt, hi: &QuadExt) -> Rational {
        assert!(lo < hi, "empty interval");
        if let (Some(a), Some(b)) = (lo.as_rational(), hi.as_rational()) {
            return (a + b) / Rational::from_integer(BigInt::from(2));
        }
        let mut bits = 16;
        loop {
            let (_, lo_hi) = lo.bounds(bits);
            let (hi_lo, _) = hi.bounds(bits);
            if lo_hi < hi_lo {
                let mid = (lo_hi + hi_lo) / Rational::from_integer(BigInt::from(2));
                debug_assert!(&QuadExt::from_rational(mid.clone()) > lo);
                return mid;
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        a + b * c.sqrt()
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::from_rational(r)
    }
}

impl From<&Rational> for QuadExt {
    fn from(r: &Rational) -> Self {
        QuadExt::from_rational(r.clone())
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        let da = &self.a - &other.a;
        let s = if self.is_rational() || other.is_rational() || self.c == other.c {
            let c = if self.is_rational() {
                &other.c
            } else {
                &self.c
            };
            sign_single(&da, &(&self.b - &other.b), c)
        } else {
            // sign of X + Y with X = da + b1·√c1 and Y = -b2·√c2
            let sx = sign_single(&da, &self.b, &self.c);
            let sy = -sign_of(&other.b);
            if sy == 0 {
                sx
            } else if sx == 0 || sx == sy {
                sy
            } else {
                // compare X² with Y²; X² = da² + b1²c1 + 2·da·b1·√c1
                let c1 = Rational::from_integer(self.c.clone());
                let c2 = Rational::from_integer(other.c.clone());
                let rat = &da * &da + &self.b * &self.b * c1 - &other.b * &other.b * c2;
                let rad = Rational::from_integer(BigInt::from(2)) * &da * &self.b;
                match sign_single(&rat, &rad, &self.c) {
                    1 => sx,
                    -1 => sy,
                    _ => 0,
                }
            }
        };
        s.cmp(&0)
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QuadExt {}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.c)
        }
    }
}

impl FromStr for QuadExt {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let Some(pos) = s.find("*sqrt(") else {
            return parse_rational(s).map(QuadExt::from_rational);
        };
        let inner = s[pos + 6..]
            .strip_suffix(')')
            .ok_or_else(|| format!("unterminated sqrt in {s:?}"))?;
        let c: BigInt = inner
            .trim()
            .parse()
            .map_err(|_| format!("bad radicand in {s:?}"))?;
        if c.is_negative() {
            return Err(format!("negative radicand in {s:?}"));
        }
        let head = &s[..pos];
        let split = head[1..]
            .find('+')
            .map(|i| i + 1)
            .ok_or_else(|| format!("missing '+' in {s:?}"))?;
        let a = parse_rational(&head[..split])?;
        let b = parse_rational(&head[split + 1..])?;
        Ok(QuadExt::new(a, b, c))
    }
}
