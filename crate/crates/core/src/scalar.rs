//! Coefficient fields: exact rationals and arbitrary-precision floats.
//!
//! Every series and tensor in the crate is generic over [`Scalar`]. The two
//! concrete fields never mix; a computation picks one at the top.

use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use malachite_base::num::arithmetic::traits::{Abs, CheckedSqrt};
use malachite_base::num::basic::traits::{One, Zero};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode as QRound;
use malachite_q::Rational;

/// A coefficient field.
///
/// Constructors take a context (`()` for rationals, the working precision for
/// floats) so that no precision has to live in global state.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    type Ctx: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    const EXACT: bool;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;
    fn ctx(&self) -> Self::Ctx;

    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self += a * b`.
    fn add_mul(&mut self, a: &Self, b: &Self);
    fn add_assign(&mut self, o: &Self);
    /// `None` when `o` is zero.
    fn div(&self, o: &Self) -> Option<Self>;
    fn sign(&self) -> Ordering;

    /// Exact mode only succeeds on squares of rationals.
    fn sqrt(&self) -> Option<Self>;
    /// Transcendental functions; `None` in exact mode.
    fn exp(&self) -> Option<Self>;
    fn sin(&self) -> Option<Self>;
    fn cos(&self) -> Option<Self>;

    /// Rational value when exact, `None` for floats.
    fn to_rational(&self) -> Option<Rational>;
    fn to_f64(&self) -> f64;
    /// `"p/q"` for rationals, a decimal string for floats.
    fn to_report_string(&self) -> String;
    /// Equality up to `rel` relative tolerance (exact equality for rationals).
    fn close_to(&self, o: &Self, rel: f64) -> bool;

    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_rational(ctx, &Rational::ONE)
    }

    fn from_i64(ctx: &Self::Ctx, v: i64) -> Self {
        Self::from_rational(ctx, &Rational::from(v))
    }

    fn from_ratio(ctx: &Self::Ctx, num: i64, den: i64) -> Self {
        Self::from_rational(ctx, &Rational::from_signeds(num, den))
    }

    fn scale_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(&self.ctx(), k))
    }
}

/// Exact rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Q {
    pub fn new(num: i64, den: i64) -> Self {
        Q(Rational::from_signeds(num, den))
    }

    pub fn int(v: i64) -> Self {
        Q(Rational::from(v))
    }

    pub fn inner(&self) -> &Rational {
        &self.0
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Scalar for Q {
    type Ctx = ();
    const EXACT: bool = true;

    fn zero(_: &()) -> Self {
        Q(Rational::ZERO)
    }
    fn from_rational(_: &(), q: &Rational) -> Self {
        Q(q.clone())
    }
    fn ctx(&self) {}
    fn is_zero(&self) -> bool {
        self.0 == Rational::ZERO
    }
    fn add(&self, o: &Self) -> Self {
        Q(&self.0 + &o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Q(&self.0 - &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Q(&self.0 * &o.0)
    }
    fn neg(&self) -> Self {
        Q(-&self.0)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        self.0 += &a.0 * &b.0;
    }
    fn add_assign(&mut self, o: &Self) {
        self.0 += &o.0;
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            None
        } else {
            Some(Q(&self.0 / &o.0))
        }
    }
    fn sign(&self) -> Ordering {
        self.0.cmp(&Rational::ZERO)
    }
    fn sqrt(&self) -> Option<Self> {
        (&self.0).checked_sqrt().map(Q)
    }
    fn exp(&self) -> Option<Self> {
        None
    }
    fn sin(&self) -> Option<Self> {
        None
    }
    fn cos(&self) -> Option<Self> {
        None
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.0.clone())
    }
    fn to_f64(&self) -> f64 {
        f64::rounding_from(&self.0, QRound::Nearest).0
    }
    fn to_report_string(&self) -> String {
        self.0.to_string()
    }
    fn close_to(&self, o: &Self, _rel: f64) -> bool {
        self == o
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Arbitrary-precision binary float with its working precision in bits.
#[derive(Clone, Debug)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn value(&self) -> &BigFloat {
        &self.v
    }

    fn wrap(&self, v: BigFloat) -> Self {
        Real { v, prec: self.prec }
    }

    fn consts() -> Consts {
        Consts::new().expect("astro-float constant cache")
    }

    fn nat_to_float(n: &malachite_nz::natural::Natural, prec: usize) -> BigFloat {
        let mut acc = BigFloat::from_u64(0, prec);
        let base = BigFloat::from_u64(1u64 << 32, prec);
        let limbs: Vec<u64> = n.to_limbs_asc();
        for limb in limbs.iter().rev() {
            let hi = BigFloat::from_u64(limb >> 32, prec);
            let lo = BigFloat::from_u64(limb & 0xffff_ffff, prec);
            acc = acc.mul(&base, prec, RM).add(&hi, prec, RM);
            acc = acc.mul(&base, prec, RM).add(&lo, prec, RM);
        }
        acc
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_report_string())
    }
}

impl Scalar for Real {
    type Ctx = usize;
    const EXACT: bool = false;

    fn zero(p: &usize) -> Self {
        Real { v: BigFloat::from_u64(0, *p), prec: *p }
    }
    fn from_rational(p: &usize, q: &Rational) -> Self {
        let (num, den) = q.to_numerator_and_denominator();
        let wp = *p + 64;
        let mut v = Self::nat_to_float(&num, wp).div(&Self::nat_to_float(&den, wp), *p, RM);
        if *q < Rational::ZERO {
            v.inv_sign();
        }
        Real { v, prec: *p }
    }
    fn ctx(&self) -> usize {
        self.prec
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self.wrap(self.v.add(&o.v, self.prec, RM))
    }
    fn sub(&self, o: &Self) -> Self {
        self.wrap(self.v.sub(&o.v, self.prec, RM))
    }
    fn mul(&self, o: &Self) -> Self {
        self.wrap(self.v.mul(&o.v, self.prec, RM))
    }
    fn neg(&self) -> Self {
        self.wrap(self.v.neg())
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        let t = a.v.mul(&b.v, self.prec, RM);
        self.v = self.v.add(&t, self.prec, RM);
    }
    fn add_assign(&mut self, o: &Self) {
        self.v = self.v.add(&o.v, self.prec, RM);
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            None
        } else {
            Some(self.wrap(self.v.div(&o.v, self.prec, RM)))
        }
    }
    fn sign(&self) -> Ordering {
        if self.v.is_zero() {
            Ordering::Equal
        } else if self.v.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn sqrt(&self) -> Option<Self> {
        if self.v.is_negative() {
            return None;
        }
        Some(self.wrap(self.v.sqrt(self.prec, RM)))
    }
    fn exp(&self) -> Option<Self> {
        Some(self.wrap(self.v.exp(self.prec, RM, &mut Self::consts())))
    }
    fn sin(&self) -> Option<Self> {
        Some(self.wrap(self.v.sin(self.prec, RM, &mut Self::consts())))
    }
    fn cos(&self) -> Option<Self> {
        Some(self.wrap(self.v.cos(self.prec, RM, &mut Self::consts())))
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
    fn to_f64(&self) -> f64 {
        self.to_report_string().parse().unwrap_or(f64::NAN)
    }
    fn to_report_string(&self) -> String {
        if self.v.is_zero() {
            return "0".to_string();
        }
        self.v
            .format(Radix::Dec, RM, &mut Self::consts())
            .unwrap_or_else(|_| "NaN".to_string())
    }
    fn close_to(&self, o: &Self, rel: f64) -> bool {
        let p = self.prec;
        let diff = self.v.sub(&o.v, p, RM).abs();
        let scale = self.v.abs().max(&o.v.abs());
        let tol = BigFloat::from_f64(rel, p).mul(&scale, p, RM);
        diff.cmp(&tol).map(|c| c <= 0).unwrap_or(false)
            || diff.cmp(&BigFloat::from_f64(1e-300, p)).map(|c| c <= 0).unwrap_or(false)
    }
}

/// Absolute value of a rational.
pub fn rational_abs(q: &Rational) -> Rational {
    q.abs()
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = Rational::ONE;
    for k in 2..=n {
        acc *= Rational::from(k);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip() {
        let a = Q::new(3, 4);
        let b = Q::new(-1, 6);
        assert_eq!(a.add(&b), Q::new(7, 12));
        assert_eq!(a.mul(&b), Q::new(-1, 8));
        assert_eq!(a.div(&b), Some(Q::new(-9, 2)));
        assert_eq!(a.div(&Q::int(0)), None);
        assert_eq!(Q::new(9, 4).sqrt(), Some(Q::new(3, 2)));
        assert_eq!(Q::int(2).sqrt(), None);
        assert_eq!(Q::new(-7, 3).to_report_string(), "-7/3");
        assert!(Q::int(1).exp().is_none());
    }

    #[test]
    fn float_basic() {
        let p = 128usize;
        let a = Real::from_rational(&p, &Rational::from_signeds(1, 3));
        let b = a.mul(&Real::from_i64(&p, 3));
        assert!(b.close_to(&Real::one(&p), 1e-30));
        let e = Real::one(&p).exp().unwrap();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-14);
        let big = Rational::from_signeds(123456789012345678i64, 7);
        let f = Real::from_rational(&p, &big);
        assert!((f.to_f64() - 123456789012345678.0 / 7.0).abs() / f.to_f64() < 1e-15);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), Rational::ONE);
        assert_eq!(factorial(5), Rational::from(120));
    }
}
