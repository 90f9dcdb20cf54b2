//! Exact arithmetic in an imaginary quadratic field `k = Q(sqrt(d))`.
//!
//! Elements are stored as `a + b*zeta` with rational `a`, `b`, where `zeta`
//! generates the maximal order: `O_k = Z + Z*zeta`. Real and imaginary parts
//! of field elements live in `Q(sqrt(|d|))`, represented by [`RealQuadVal`].

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: scale down before dividing.
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    Rat::from_str(s).ok()
}

/// `e(x) = exp(2 pi i x)`.
pub fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * x).exp()
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m = d.rem_euclid(4);
    if m == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if m == 0 {
        let q = d / 4;
        let r = q.rem_euclid(4);
        return (r == 2 || r == 3) && is_squarefree(q.unsigned_abs());
    }
    false
}

/// The field together with a fixed generator `zeta` of its maximal order.
///
/// `zeta = (t + sqrt(d)) / 2` with `t = zeta_re2` and `t = d (mod 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldSpec {
    disc: i64,
    zeta_re2: i64,
}

impl FieldSpec {
    /// Canonical choice: `Re zeta = 0` for even `d` and `1/2` for odd `d`.
    pub fn new(disc: i64) -> Result<Self> {
        let zeta_re2 = if disc.rem_euclid(4) == 0 { 0 } else { 1 };
        Self::with_zeta(disc, zeta_re2)
    }

    pub fn with_zeta(disc: i64, zeta_re2: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        if (zeta_re2 - disc).rem_euclid(2) != 0 {
            return Err(Error::BadZeta { disc, zeta_re2 });
        }
        Ok(FieldSpec { disc, zeta_re2 })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn abs_disc(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    /// `2 Re(zeta)`, which is also the trace of `zeta`.
    pub fn zeta_re2(&self) -> i64 {
        self.zeta_re2
    }

    pub fn zeta_re(&self) -> Rat {
        rat(self.zeta_re2, 2)
    }

    pub fn zeta_norm(&self) -> Rat {
        rat(self.zeta_re2 * self.zeta_re2 - self.disc, 4)
    }

    pub fn sqrt_abs_disc(&self) -> f64 {
        (self.abs_disc() as f64).sqrt()
    }

    pub fn zeta_complex(&self) -> Complex64 {
        Complex64::new(self.zeta_re2 as f64 / 2.0, self.sqrt_abs_disc() / 2.0)
    }

    pub fn elem(&self, a: Rat, b: Rat) -> FieldElem {
        FieldElem { field: *self, a, b }
    }

    pub fn from_ints(&self, a: i64, b: i64) -> FieldElem {
        self.elem(int(a), int(b))
    }

    pub fn rational(&self, a: Rat) -> FieldElem {
        self.elem(a, Rat::zero())
    }

    pub fn zero(&self) -> FieldElem {
        self.from_ints(0, 0)
    }

    pub fn one(&self) -> FieldElem {
        self.from_ints(1, 0)
    }

    pub fn zeta(&self) -> FieldElem {
        self.from_ints(0, 1)
    }

    /// `delta = sqrt(d) = 2 zeta - t`, a generator of the different.
    pub fn delta(&self) -> FieldElem {
        self.from_ints(-self.zeta_re2, 2)
    }

    pub fn delta_inv(&self) -> FieldElem {
        self.delta().inv().expect("delta is nonzero")
    }

    /// `|delta| = sqrt(|d|)`.
    pub fn abs_delta(&self) -> f64 {
        self.sqrt_abs_disc()
    }

    /// Parses `a`, `b*zeta`, `a + b*zeta`, `a - b*zeta` and similar forms
    /// with rational coefficients.
    pub fn parse_elem(&self, s: &str) -> Option<FieldElem> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return None;
        }
        let bytes = compact.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            let c = bytes[i];
            if (c == b'+' || c == b'-') && bytes[i - 1] != b'*' && bytes[i - 1] != b'/' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut a = Rat::zero();
        let mut b = Rat::zero();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-Rat::one(), rest),
                None => (Rat::one(), term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return None;
            }
            if let Some(coef) = body.strip_suffix("zeta") {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let c = if coef.is_empty() {
                    Rat::one()
                } else {
                    parse_rat(coef)?
                };
                b += sign * c;
            } else {
                a += sign * parse_rat(body)?;
            }
        }
        Some(self.elem(a, b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem {
    field: FieldSpec,
    a: Rat,
    b: Rat,
}

impl FieldElem {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> FieldElem {
        let t = int(self.field.zeta_re2);
        FieldElem {
            field: self.field,
            a: &self.a + &self.b * t,
            b: -&self.b,
        }
    }

    pub fn trace(&self) -> Rat {
        &self.a * int(2) + &self.b * int(self.field.zeta_re2)
    }

    pub fn norm(&self) -> Rat {
        let t = int(self.field.zeta_re2);
        &self.a * &self.a + &self.a * &self.b * t + &self.b * &self.b * self.field.zeta_norm()
    }

    pub fn re(&self) -> Rat {
        &self.a + &self.b * self.field.zeta_re()
    }

    /// Imaginary part as `(b/2) sqrt(|d|)`.
    pub fn im(&self) -> RealQuadVal {
        RealQuadVal::new(self.field.abs_disc(), Rat::zero(), &self.b / int(2))
    }

    /// `|delta| * Im(x) = b |d| / 2`, always rational.
    pub fn im_times_abs_delta(&self) -> Rat {
        &self.b * rat(self.field.abs_disc() as i64, 2)
    }

    /// `Im(x) / |delta| = b / 2`, always rational.
    pub fn im_over_abs_delta(&self) -> Rat {
        &self.b / int(2)
    }

    pub fn re_part(&self) -> RealQuadVal {
        RealQuadVal::from_rat(self.field.abs_disc(), self.re())
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Membership in the inverse different `delta^{-1} O_k`.
    pub fn in_inverse_different(&self) -> bool {
        (&self.field.delta() * self).is_integral()
    }

    pub fn inv(&self) -> Result<FieldElem> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, other: &FieldElem) -> Result<FieldElem> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, r: &Rat) -> FieldElem {
        FieldElem {
            field: self.field,
            a: &self.a * r,
            b: &self.b * r,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let z = self.field.zeta_complex();
        Complex64::new(rat_to_f64(&self.a), 0.0) + z * rat_to_f64(&self.b)
    }

    /// Re-expresses the same number with respect to another admissible `zeta`
    /// of the same field.
    pub fn rebase(&self, target: FieldSpec) -> Result<FieldElem> {
        if target.disc != self.field.disc {
            return Err(Error::InvalidArgument(format!(
                "cannot rebase from discriminant {} to {}",
                self.field.disc, target.disc
            )));
        }
        // zeta = zeta' - (t' - t)/2
        let shift = rat(target.zeta_re2 - self.field.zeta_re2, 2);
        Ok(FieldElem {
            field: target,
            a: &self.a - &self.b * shift,
            b: self.b.clone(),
        })
    }

    /// Coordinates rounded to the nearest integers.
    pub fn round(&self) -> FieldElem {
        FieldElem {
            field: self.field,
            a: self.a.round(),
            b: self.b.round(),
        }
    }

    /// Reduction of both coordinates into `[0, 1)`, i.e. modulo `O_k`.
    pub fn frac(&self) -> FieldElem {
        FieldElem {
            field: self.field,
            a: frac(&self.a),
            b: frac(&self.b),
        }
    }

    pub fn floor(&self) -> FieldElem {
        FieldElem {
            field: self.field,
            a: self.a.floor(),
            b: self.b.floor(),
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*zeta", self.b),
            (false, false) if self.b.is_negative() => write!(f, "{} - {}*zeta", self.a, -&self.b),
            (false, false) => write!(f, "{} + {}*zeta", self.a, self.b),
        }
    }
}

fn check_field(x: &FieldSpec, y: &FieldSpec) {
    assert_eq!(x, y, "mixing elements of different fields");
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        check_field(&self.field, &o.field);
        FieldElem {
            field: self.field,
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        check_field(&self.field, &o.field);
        FieldElem {
            field: self.field,
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        check_field(&self.field, &o.field);
        // zeta^2 = t zeta - N(zeta)
        let bd = &self.b * &o.b;
        FieldElem {
            field: self.field,
            a: &self.a * &o.a - &bd * self.field.zeta_norm(),
            b: &self.a * &o.b + &self.b * &o.a + bd * int(self.field.zeta_re2),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            field: self.field,
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<$t> for &'a $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                self.$m(&o)
            }
        }
    };
}

forward_binop!(Add, add, FieldElem);
forward_binop!(Sub, sub, FieldElem);
forward_binop!(Mul, mul, FieldElem);

impl AddAssign<&FieldElem> for FieldElem {
    fn add_assign(&mut self, o: &FieldElem) {
        *self = &*self + o;
    }
}

impl SubAssign<&FieldElem> for FieldElem {
    fn sub_assign(&mut self, o: &FieldElem) {
        *self = &*self - o;
    }
}

/// An element `r + s*w` of the real quadratic field `Q(w)`, `w = sqrt(|d|)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RealQuadVal {
    abs_disc: u64,
    r: Rat,
    s: Rat,
}

impl RealQuadVal {
    pub fn new(abs_disc: u64, r: Rat, s: Rat) -> Self {
        RealQuadVal { abs_disc, r, s }
    }

    pub fn zero(abs_disc: u64) -> Self {
        Self::new(abs_disc, Rat::zero(), Rat::zero())
    }

    pub fn from_rat(abs_disc: u64, r: Rat) -> Self {
        Self::new(abs_disc, r, Rat::zero())
    }

    pub fn abs_disc(&self) -> u64 {
        self.abs_disc
    }

    pub fn r(&self) -> &Rat {
        &self.r
    }

    pub fn s(&self) -> &Rat {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.abs_disc, &self.r * c, &self.s * c)
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.r) + rat_to_f64(&self.s) * (self.abs_disc as f64).sqrt()
    }

    /// Exact sign.
    pub fn signum(&self) -> i32 {
        let sr = sign_of(&self.r);
        let ss = sign_of(&self.s);
        if ss == 0 {
            return sr;
        }
        if sr == 0 || sr == ss {
            return ss;
        }
        let lhs = &self.r * &self.r;
        let rhs = &self.s * &self.s * int(self.abs_disc as i64);
        if lhs > rhs {
            sr
        } else if lhs < rhs {
            ss
        } else {
            0
        }
    }

    /// Parses the format produced by `Display`: `r+s*w` with `w = sqrt(|d|)`.
    pub fn parse(abs_disc: u64, s: &str) -> Option<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = compact.strip_suffix("*w") else {
            return Some(Self::from_rat(abs_disc, parse_rat(&compact)?));
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/')?;
        let r = parse_rat(&body[..split])?;
        let s = parse_rat(body[split..].strip_prefix('+').unwrap_or(&body[split..]))?;
        Some(Self::new(abs_disc, r, s))
    }
}

fn sign_of(x: &Rat) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for RealQuadVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.s.is_negative() {
            write!(f, "{}-{}*w", self.r, -&self.s)
        } else {
            write!(f, "{}+{}*w", self.r, self.s)
        }
    }
}

fn check_disc(x: u64, y: u64) {
    assert_eq!(x, y, "mixing elements of different real quadratic fields");
}

impl<'a> Add<&'a RealQuadVal> for &'a RealQuadVal {
    type Output = RealQuadVal;
    fn add(self, o: &RealQuadVal) -> RealQuadVal {
        check_disc(self.abs_disc, o.abs_disc);
        RealQuadVal::new(self.abs_disc, &self.r + &o.r, &self.s + &o.s)
    }
}

impl<'a> Sub<&'a RealQuadVal> for &'a RealQuadVal {
    type Output = RealQuadVal;
    fn sub(self, o: &RealQuadVal) -> RealQuadVal {
        check_disc(self.abs_disc, o.abs_disc);
        RealQuadVal::new(self.abs_disc, &self.r - &o.r, &self.s - &o.s)
    }
}

impl<'a> Mul<&'a RealQuadVal> for &'a RealQuadVal {
    type Output = RealQuadVal;
    fn mul(self, o: &RealQuadVal) -> RealQuadVal {
        check_disc(self.abs_disc, o.abs_disc);
        let dd = int(self.abs_disc as i64);
        RealQuadVal::new(
            self.abs_disc,
            &self.r * &o.r + &self.s * &o.s * dd,
            &self.r * &o.s + &self.s * &o.r,
        )
    }
}

impl Neg for &RealQuadVal {
    type Output = RealQuadVal;
    fn neg(self) -> RealQuadVal {
        RealQuadVal::new(self.abs_disc, -&self.r, -&self.s)
    }
}

impl Neg for RealQuadVal {
    type Output = RealQuadVal;
    fn neg(self) -> RealQuadVal {
        -&self
    }
}

forward_binop!(Add, add, RealQuadVal);
forward_binop!(Sub, sub, RealQuadVal);
forward_binop!(Mul, mul, RealQuadVal);

impl AddAssign<&RealQuadVal> for RealQuadVal {
    fn add_assign(&mut self, o: &RealQuadVal) {
        *self = &*self + o;
    }
}

/// Non-negative generator of the fractional ideal `aZ + bZ` of `Q`.
pub fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    let n = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Rat::new(n, a.denom() * b.denom())
}

pub fn rat_gcd_all<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Rat {
    values
        .into_iter()
        .fold(Rat::zero(), |acc, v| rat_gcd(&acc, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<FieldSpec> {
        [-3, -4, -7, -8, -11, -15, -20, -23, -24]
            .iter()
            .map(|&d| FieldSpec::new(d).unwrap())
            .collect()
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3, -4, -7, -8, -11, -15, -19, -20, -24, -40, -84] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [0, 1, 5, -1, -2, -5, -12, -16, -27, -28, -9, -36] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
        assert!(matches!(FieldSpec::new(-5), Err(Error::NotFundamental(-5))));
        assert!(FieldSpec::with_zeta(-3, 0).is_err());
        assert!(FieldSpec::with_zeta(-3, 3).is_ok());
    }

    #[test]
    fn zeta_basics() {
        for k in fields() {
            let z = k.zeta();
            // zeta is a root of x^2 - t x + N
            let lhs = &z * &z - k.rational(int(k.zeta_re2())) * &z + k.rational(k.zeta_norm());
            assert!(lhs.is_zero());
            assert!(z.is_integral());
            let d = k.delta();
            assert_eq!(&d * &d, k.rational(int(k.disc())));
            assert_eq!(d.conj(), -&d);
            assert!(k.delta_inv().in_inverse_different());
            assert!(!k.delta_inv().scale(&rat(1, 2)).in_inverse_different());
            let zc = k.zeta_complex();
            assert!((zc * zc - zc * k.zeta_re2() as f64 + rat_to_f64(&k.zeta_norm())).norm() < 1e-12);
        }
    }

    #[test]
    fn arithmetic_matches_complex_embedding() {
        for k in fields() {
            let x = k.elem(rat(3, 2), rat(-5, 7));
            let y = k.elem(rat(-1, 3), rat(2, 1));
            let (xc, yc) = (x.to_complex(), y.to_complex());
            assert!(((&x * &y).to_complex() - xc * yc).norm() < 1e-12);
            assert!(((&x + &y).to_complex() - (xc + yc)).norm() < 1e-12);
            assert!((x.conj().to_complex() - xc.conj()).norm() < 1e-12);
            assert!((rat_to_f64(&x.norm()) - xc.norm_sqr()).abs() < 1e-12);
            assert!((rat_to_f64(&x.trace()) - 2.0 * xc.re).abs() < 1e-12);
            assert!((x.im().to_f64() - xc.im).abs() < 1e-12);
            assert!((rat_to_f64(&x.re()) - xc.re).abs() < 1e-12);
            assert_eq!(&x * &x.inv().unwrap(), k.one());
            assert_eq!(x.div(&y).unwrap() * &y, x);
        }
    }

    #[test]
    fn rebase_preserves_value() {
        let k = FieldSpec::new(-7).unwrap();
        let k2 = FieldSpec::with_zeta(-7, 5).unwrap();
        let x = k.elem(rat(1, 3), rat(-2, 5));
        let y = x.rebase(k2).unwrap();
        assert!((x.to_complex() - y.to_complex()).norm() < 1e-12);
        assert_eq!(y.rebase(k).unwrap(), x);
    }

    #[test]
    fn parse_roundtrip() {
        let k = FieldSpec::new(-4).unwrap();
        for x in [
            k.elem(rat(1, 2), rat(-3, 4)),
            k.elem(rat(0, 1), rat(1, 1)),
            k.elem(rat(-7, 1), rat(0, 1)),
            k.elem(rat(2, 1), rat(5, 3)),
        ] {
            assert_eq!(k.parse_elem(&x.to_string()), Some(x));
        }
        assert_eq!(k.parse_elem("-zeta"), Some(k.from_ints(0, -1)));
        assert_eq!(k.parse_elem("1/2-1/2*zeta"), Some(k.elem(rat(1, 2), rat(-1, 2))));
        assert_eq!(k.parse_elem("zeta + 1"), Some(k.from_ints(1, 1)));
        assert_eq!(k.parse_elem("1 + x"), None);
        assert_eq!(k.parse_elem(""), None);
    }

    #[test]
    fn real_quad_ops() {
        let a = RealQuadVal::new(3, rat(1, 2), rat(-1, 3));
        let b = RealQuadVal::new(3, rat(2, 1), rat(1, 1));
        assert!(((&a * &b).to_f64() - a.to_f64() * b.to_f64()).abs() < 1e-12);
        assert_eq!(RealQuadVal::parse(3, &a.to_string()), Some(a.clone()));
        assert_eq!(RealQuadVal::parse(3, &b.to_string()), Some(b.clone()));
        assert_eq!(a.signum(), -1);
        assert_eq!(b.signum(), 1);
        assert_eq!(RealQuadVal::new(4, int(2), int(-1)).signum(), 0);
    }

    #[test]
    fn rational_gcd() {
        assert_eq!(rat_gcd(&rat(1, 2), &rat(1, 3)), rat(1, 6));
        assert_eq!(rat_gcd(&rat(3, 2), &rat(-9, 4)), rat(3, 4));
        assert_eq!(rat_gcd_all([&int(0), &rat(2, 3)]), rat(2, 3));
    }
}
