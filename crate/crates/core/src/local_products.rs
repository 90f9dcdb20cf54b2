//! Local Heegner divisors at a cusp, the local Borcherds products attached to
//! them, their automorphy factors and Chern cocycles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::cusp::{CuspData, HeisenbergElem, HeisenbergParams, SiegelPoint};
use crate::error::{Error, Result};
use crate::hlattice::{LatticeVector, NormCache};
use crate::qfield::{e, frac, int, rat, rat_to_f64, FieldElem, FieldSpec, Rat};

/// Finite map `(beta, m) -> c(beta, m)` with `beta` an index of `L'/L` in the
/// subgroup of cosets meeting `l^perp`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeegnerCombo {
    terms: BTreeMap<(usize, Rat), i64>,
}

impl HeegnerCombo {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates every key and the symmetry `c(beta, m) = c(-beta, m)`.
    pub fn new(cusp: &CuspData, terms: impl IntoIterator<Item = (usize, Rat, i64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (beta, m, c) in terms {
            check_key(cusp, beta, &m)?;
            if c == 0 {
                continue;
            }
            if let Some(old) = map.insert((beta, m.clone()), c) {
                if old != c {
                    return Err(Error::InvalidCombo(format!("conflicting coefficients for ({beta}, {m})")));
                }
            }
        }
        let combo = HeegnerCombo { terms: map };
        let disc = cusp.disc_group();
        for ((beta, m), c) in &combo.terms {
            let partner = combo.coeff(disc.neg(*beta), m);
            if partner != *c {
                return Err(Error::InvalidCombo(format!(
                    "c({beta}, {m}) = {c} but the coefficient at the negated coset is {partner}"
                )));
            }
        }
        Ok(combo)
    }

    /// Like `new`, but a term whose negated partner is missing gets the partner
    /// added with the same coefficient. Idempotent.
    pub fn symmetrized(cusp: &CuspData, terms: impl IntoIterator<Item = (usize, Rat, i64)>) -> Result<Self> {
        let disc = cusp.disc_group();
        let mut given: BTreeMap<(usize, Rat), i64> = BTreeMap::new();
        for (beta, m, c) in terms {
            check_key(cusp, beta, &m)?;
            if let Some(old) = given.insert((beta, m.clone()), c) {
                if old != c {
                    return Err(Error::InvalidCombo(format!("conflicting coefficients for ({beta}, {m})")));
                }
            }
        }
        let mut all = given.clone();
        for ((beta, m), c) in &given {
            let key = (disc.neg(*beta), m.clone());
            match given.get(&key) {
                Some(other) if other != c => {
                    return Err(Error::InvalidCombo(format!(
                        "c({beta}, {m}) = {c} conflicts with {other} at the negated coset"
                    )))
                }
                Some(_) => {}
                None => {
                    all.insert(key, *c);
                }
            }
        }
        Self::new(cusp, all.into_iter().map(|((b, m), c)| (b, m, c)))
    }

    pub fn coeff(&self, beta: usize, m: &Rat) -> i64 {
        self.terms.get(&(beta, m.clone())).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rat, i64)> + '_ {
        self.terms.iter().map(|((b, m), c)| (*b, m, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Largest `|m|` among the terms.
    pub fn max_abs_norm(&self) -> Rat {
        self.terms.keys().map(|(_, m)| m.abs()).max().unwrap_or_else(Rat::zero)
    }

    /// Copy with every coefficient multiplied by `k`.
    pub fn scaled(&self, k: i64) -> Self {
        let terms = if k == 0 {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(key, c)| (key.clone(), c * k)).collect()
        };
        HeegnerCombo { terms }
    }

    /// Sum of two combinations on the same cusp.
    pub fn plus(&self, other: &HeegnerCombo) -> Self {
        let mut terms = self.terms.clone();
        for (key, c) in &other.terms {
            *terms.entry(key.clone()).or_insert(0) += c;
        }
        terms.retain(|_, c| *c != 0);
        HeegnerCombo { terms }
    }
}

fn check_key(cusp: &CuspData, beta: usize, m: &Rat) -> Result<()> {
    if !cusp.disc_group().contains_index(beta) {
        return Err(Error::InvalidCombo(format!("coset index {beta} out of range")));
    }
    if !cusp.in_l_script(beta) {
        return Err(Error::InvalidCombo(format!("coset {beta} has no representative orthogonal to l")));
    }
    if !m.is_negative() {
        return Err(Error::InvalidCombo(format!("norm {m} must be negative")));
    }
    let q = cusp.disc_group().q_mod1(beta);
    if !(m - q).is_integer() {
        return Err(Error::InvalidCombo(format!("norm {m} is not congruent to Q(beta) = {q} mod 1")));
    }
    Ok(())
}

/// One `lambda = kappa + beta_dot` of a local Heegner divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedTerm {
    pub beta: usize,
    pub m: Rat,
    /// `lambda` in coordinates of `L`.
    pub lambda: LatticeVector,
    /// Definite part of `lambda` in coordinates of the basis of `D`.
    pub lambda_d: LatticeVector,
    /// `c(beta, m) / 2`.
    pub mult: Rat,
}

pub fn expand_divisor(cusp: &CuspData, cache: &NormCache, combo: &HeegnerCombo) -> Result<Vec<ExpandedTerm>> {
    let ddisc = cusp.definite_disc();
    let mut out = Vec::new();
    for (beta, m, c) in combo.terms() {
        check_key(cusp, beta, m)?;
        let lift = cusp.lift(beta).expect("validated coset");
        let ell_part = cusp.ell().scale(&lift.ell_coeff);
        let mult = rat(c, 2);
        for lambda_d in cache.vectors(ddisc, lift.pi, m)?.iter() {
            out.push(ExpandedTerm {
                beta,
                m: m.clone(),
                lambda: cusp.to_ambient(lambda_d).add(&ell_part),
                lambda_d: lambda_d.clone(),
                mult: mult.clone(),
            });
        }
    }
    Ok(out)
}

/// Which of the forms `F = B + H` a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormTag {
    F,
    B,
    H,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearFormValue {
    pub tag: FormTag,
    pub value: FieldElem,
}

fn pairing(cusp: &CuspData, t: &LatticeVector, lambda: &LatticeVector) -> FieldElem {
    cusp.lattice().inner(&cusp.to_ambient(t), lambda)
}

/// `F_lambda(t, t2) = 2 Re<t, lambda> <t2, lambda>`, `lambda` in coordinates of `L`.
pub fn eval_f(cusp: &CuspData, lambda: &LatticeVector, t: &LatticeVector, t2: &LatticeVector) -> BilinearFormValue {
    let a = pairing(cusp, t, lambda);
    let b = pairing(cusp, t2, lambda);
    BilinearFormValue {
        tag: FormTag::F,
        value: b.scale(&(a.re() * int(2))),
    }
}

/// `B_lambda(t, t2) = <t, lambda> <t2, lambda>`.
pub fn eval_b(cusp: &CuspData, lambda: &LatticeVector, t: &LatticeVector, t2: &LatticeVector) -> BilinearFormValue {
    let a = pairing(cusp, t, lambda);
    let b = pairing(cusp, t2, lambda);
    BilinearFormValue {
        tag: FormTag::B,
        value: &a * &b,
    }
}

/// `H_lambda(t, t2) = <t2, lambda> <lambda, t>`.
pub fn eval_h(cusp: &CuspData, lambda: &LatticeVector, t: &LatticeVector, t2: &LatticeVector) -> BilinearFormValue {
    let a = pairing(cusp, t, lambda);
    let b = pairing(cusp, t2, lambda);
    BilinearFormValue {
        tag: FormTag::H,
        value: &b * &a.conj(),
    }
}

fn check_lambda(cusp: &CuspData, lambda: &LatticeVector) -> Result<()> {
    let lat = cusp.lattice();
    if lambda.len() != lat.rank() {
        return Err(Error::Shape("lambda has the wrong length".into()));
    }
    if !lat.in_dual(lambda) {
        return Err(Error::NotInDual);
    }
    if !lat.inner(lambda, cusp.ell()).is_zero() {
        return Err(Error::InvalidArgument("lambda is not orthogonal to l".into()));
    }
    if !lat.norm(lambda).is_negative() {
        return Err(Error::InvalidArgument("lambda must have negative norm".into()));
    }
    Ok(())
}

/// A truncated product with an a-posteriori bound on `|value - limit|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Sum of principal logarithms of the factors of a truncated product, with a
/// bound on the modulus of the logarithm of the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogProductValue {
    pub log: Complex64,
    pub tail_bound: f64,
}

/// Factors with modulus below this count as zeros of the product.
pub const DIVISOR_HIT: f64 = 1e-12;

/// `prod_{0 <= p < |d|, |q| <= T} [1 - e(sgn(q) (<z, lambda> + (p + q zeta)/|d|))]`.
pub fn eval_local_product(
    cusp: &CuspData,
    lambda: &LatticeVector,
    p: &SiegelPoint,
    truncation: u32,
) -> Result<ProductValue> {
    let lp = eval_local_product_log(cusp, lambda, p, truncation)?;
    let value = lp.log.exp();
    Ok(ProductValue {
        value,
        tail_bound: value.norm() * (lp.tail_bound.exp() - 1.0),
    })
}

/// Logarithmic form of `eval_local_product`, usable where the product itself
/// over- or underflows.
pub fn eval_local_product_log(
    cusp: &CuspData,
    lambda: &LatticeVector,
    p: &SiegelPoint,
    truncation: u32,
) -> Result<LogProductValue> {
    check_lambda(cusp, lambda)?;
    if !cusp.in_domain(p) {
        return Err(Error::OutsideDomain);
    }
    if truncation == 0 {
        return Err(Error::InvalidArgument("truncation must be at least 1".into()));
    }
    let k = cusp.field();
    let w = z_lambda(cusp, lambda, p);
    let dd = k.abs_disc() as i64;
    let zeta = k.zeta_complex();
    let t = truncation as i64;
    let rows: Vec<Result<Complex64>> = (-t..=t)
        .into_par_iter()
        .map(|q| {
            let sign = if q < 0 { -1.0 } else { 1.0 };
            let mut acc = Complex64::new(0.0, 0.0);
            for pp in 0..dd {
                let arg = w + (Complex64::new(pp as f64, 0.0) + zeta * q as f64) / dd as f64;
                let factor = Complex64::new(1.0, 0.0) - e(arg * sign);
                let modulus = factor.norm();
                if modulus < DIVISOR_HIT {
                    return Err(Error::DivisorHit(modulus));
                }
                acc += factor.ln();
            }
            Ok(acc)
        })
        .collect();
    let mut log = Complex64::new(0.0, 0.0);
    for r in rows {
        log += r?;
    }
    // |e(sgn(q)(w + ...))| = exp(-2 pi sgn(q) Im w) rho^|q| with rho = exp(-pi/sqrt|d|).
    let rho = (-PI / k.sqrt_abs_disc()).exp();
    let worst = (2.0 * PI * w.im.abs()).exp();
    let eps = 2.0 * dd as f64 * worst * rho.powi(truncation as i32 + 1) / (1.0 - rho);
    let tail_bound = if eps < 0.5 { 2.0 * eps } else { f64::INFINITY };
    Ok(LogProductValue { log, tail_bound })
}

/// `<z(tau, sigma), lambda>`.
pub fn z_lambda(cusp: &CuspData, lambda: &LatticeVector, p: &SiegelPoint) -> Complex64 {
    let z = cusp.z_vector(p);
    cusp.lattice().inner_complex(&z, &lambda.to_complex())
}

/// Exact part `-2 R^2 zeta + R (zeta + 1)` of the exponent of `J_lambda`,
/// with `R = Re<t, lambda>` and the given choice of `zeta`, reduced mod 1 in
/// its rational coordinate.
fn exact_exponent(field: FieldSpec, r: &Rat) -> FieldElem {
    let zeta = field.zeta();
    let r_el = field.rational(r.clone());
    let x = -(&(&r_el * &r_el * field.rational(int(2))) * &zeta) + &r_el * &(&zeta + &field.one());
    field.elem(frac(x.a()), x.b().clone())
}

/// The closed-form automorphy factor `J_lambda([h, t], z)`.
pub fn automorphy_factor(
    cusp: &CuspData,
    lambda: &LatticeVector,
    g: &HeisenbergElem,
    p: &SiegelPoint,
) -> Result<Complex64> {
    Ok(e(automorphy_exponent(cusp, lambda, g, p, cusp.field().zeta_re2())?))
}

/// `J_lambda` computed with `2 Re(zeta) = zeta_re2` in place of the canonical choice.
pub fn automorphy_factor_with_zeta(
    cusp: &CuspData,
    lambda: &LatticeVector,
    g: &HeisenbergElem,
    p: &SiegelPoint,
    zeta_re2: i64,
) -> Result<Complex64> {
    Ok(e(automorphy_exponent(cusp, lambda, g, p, zeta_re2)?))
}

/// `A` with `J_lambda([h, t], z) = e(A)`, for the choice `2 Re(zeta) = zeta_re2`.
pub fn automorphy_exponent(
    cusp: &CuspData,
    lambda: &LatticeVector,
    g: &HeisenbergElem,
    p: &SiegelPoint,
    zeta_re2: i64,
) -> Result<Complex64> {
    check_lambda(cusp, lambda)?;
    if g.t.len() != cusp.n() {
        return Err(Error::Shape("t has the wrong length".into()));
    }
    let k = cusp.field();
    let alt = FieldSpec::with_zeta(k.disc(), zeta_re2)?;
    let r = pairing(cusp, &g.t, lambda).re();
    let w = z_lambda(cusp, lambda, p);
    let linear = w * (-2.0 * k.abs_disc() as f64 * rat_to_f64(&r));
    Ok(linear + exact_exponent(alt, &r).to_complex())
}

/// `|Psi(g z) / Psi(z) / J(g, z) - 1|` from truncated products, computed in
/// logarithmic form. Also returns the combined truncation bound.
pub fn automorphy_deviation(
    cusp: &CuspData,
    lambda: &LatticeVector,
    g: &HeisenbergElem,
    p: &SiegelPoint,
    truncation: u32,
) -> Result<(f64, f64)> {
    let gp = cusp.heisenberg_act(g, p)?;
    let a = eval_local_product_log(cusp, lambda, p, truncation)?;
    let b = eval_local_product_log(cusp, lambda, &gp, truncation)?;
    let exponent = automorphy_exponent(cusp, lambda, g, p, cusp.field().zeta_re2())?;
    let delta = (b.log - a.log) / Complex64::new(0.0, 2.0 * PI) - exponent;
    let delta = Complex64::new(delta.re - delta.re.round(), delta.im);
    Ok(((e(delta) - 1.0).norm(), a.tail_bound + b.tail_bound))
}

/// `c_lambda(g, g2) = -2 |delta| Re<t, lambda> Im<t2, lambda>` for `g, g2` in the
/// Heisenberg group described by `params`.
pub fn chern_cocycle(
    cusp: &CuspData,
    params: &HeisenbergParams,
    lambda: &LatticeVector,
    g: &HeisenbergElem,
    g2: &HeisenbergElem,
) -> Result<Rat> {
    for x in [g, g2] {
        if !params.contains(cusp, x) {
            return Err(Error::NotInGroup(format!("[{}, {}]", x.h, x.t)));
        }
    }
    Ok(cocycle_value(cusp, lambda, &g.t, &g2.t))
}

fn cocycle_value(cusp: &CuspData, lambda: &LatticeVector, t: &LatticeVector, t2: &LatticeVector) -> Rat {
    let r = pairing(cusp, t, lambda).re();
    let b = pairing(cusp, t2, lambda).im_times_abs_delta();
    -(r * b * int(2))
}

/// The same value computed as `Im(-|delta| F_lambda(t, t2))`.
pub fn chern_cocycle_via_f(cusp: &CuspData, lambda: &LatticeVector, t: &LatticeVector, t2: &LatticeVector) -> Rat {
    -eval_f(cusp, lambda, t, t2).value.im_times_abs_delta()
}

/// Basis pairs `(i, j)` of `D_{l,Gamma}` where `c_lambda` is not an integer.
pub fn cocycle_integrality_violations(
    cusp: &CuspData,
    params: &HeisenbergParams,
    lambda: &LatticeVector,
) -> Vec<(usize, usize, Rat)> {
    let basis = params.basis();
    let mut out = Vec::new();
    for (i, t) in basis.iter().enumerate() {
        for (j, t2) in basis.iter().enumerate() {
            let c = cocycle_value(cusp, lambda, t, t2);
            if !c.is_integer() {
                out.push((i, j, c));
            }
        }
    }
    out
}

/// `sum mult(lambda) c_lambda(t, t2)` over the expansion of `combo`.
pub fn chern_class_of_combo(
    cusp: &CuspData,
    params: &HeisenbergParams,
    cache: &NormCache,
    combo: &HeegnerCombo,
    t: &LatticeVector,
    t2: &LatticeVector,
) -> Result<Rat> {
    for x in [t, t2] {
        if !params.contains_t(cusp, x) {
            return Err(Error::NotInGroup(format!("[0, {x}]")));
        }
    }
    let terms = expand_divisor(cusp, cache, combo)?;
    Ok(terms
        .iter()
        .map(|term| &term.mult * cocycle_value(cusp, &term.lambda, t, t2))
        .sum())
}
