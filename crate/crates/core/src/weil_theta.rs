//! The dual Weil representation of the definite part, harmonic theta series,
//! and the obstruction pairing against local Heegner divisors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cusp::CuspData;
use crate::error::{Error, Result};
use crate::hlattice::{DiscriminantGroup, HermitianLattice, LatticeVector, NormCache};
use crate::linalg::rat_inverse;
use crate::local_products::HeegnerCombo;
use crate::qfield::{e, frac, int, rat_to_f64, Rat, RealQuadVal};

/// `rho_D^*` on the group algebra of `D'/D`.
#[derive(Clone, Debug)]
pub struct WeilRep {
    n: usize,
    /// `-Q(gamma) mod 1`.
    t_phases: Vec<Rat>,
    /// `b(gamma, delta) mod 1`.
    s_phases: Vec<Vec<Rat>>,
}

impl WeilRep {
    pub fn new(d: &HermitianLattice) -> Result<Self> {
        d.check_even()?;
        let disc = d.discriminant_group()?;
        Ok(Self::from_disc(&disc, d.rank()))
    }

    pub fn from_disc(disc: &DiscriminantGroup, n: usize) -> Self {
        let m = disc.order();
        let t_phases = (0..m).map(|g| frac(&-disc.q_mod1(g))).collect();
        let s_phases = (0..m)
            .map(|g| (0..m).map(|h| disc.bilinear_mod1(g, h)).collect())
            .collect();
        WeilRep { n, t_phases, s_phases }
    }

    pub fn dim(&self) -> usize {
        self.t_phases.len()
    }

    pub fn weight(&self) -> usize {
        self.n + 2
    }

    pub fn t_phases(&self) -> &[Rat] {
        &self.t_phases
    }

    pub fn s_phases(&self) -> &[Vec<Rat>] {
        &self.s_phases
    }

    /// `sqrt(i)^(-2n)`.
    pub fn s_global_phase(&self) -> Complex64 {
        Complex64::i().powi(-(self.n as i32))
    }

    pub fn s_scale(&self) -> f64 {
        1.0 / (self.dim() as f64).sqrt()
    }

    pub fn t_matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.dim();
        let mut out = zeros(m);
        for (g, p) in self.t_phases.iter().enumerate() {
            out[g][g] = e(Complex64::new(rat_to_f64(p), 0.0));
        }
        out
    }

    /// Column `gamma` is the image of `e_gamma`.
    pub fn s_matrix(&self) -> Vec<Vec<Complex64>> {
        let c = self.s_global_phase() * self.s_scale();
        self.s_phases
            .iter()
            .map(|row| row.iter().map(|p| c * e(Complex64::new(rat_to_f64(p), 0.0))).collect())
            .collect()
    }

    /// Order of `rho^*(T)`.
    pub fn t_order(&self) -> u64 {
        self.t_phases
            .iter()
            .map(|p| p.denom().try_into().unwrap_or(u64::MAX))
            .fold(1u64, num_integer::lcm)
    }

    pub fn relations(&self) -> WeilRelations {
        let s = self.s_matrix();
        let t = self.t_matrix();
        let m = self.dim();
        let id = identity(m);
        let sh = adjoint(&s);
        let s2 = mat_mul(&s, &s);
        let st = mat_mul(&s, &t);
        let st3 = mat_mul(&mat_mul(&st, &st), &st);
        WeilRelations {
            s_unitarity: max_diff(&mat_mul(&s, &sh), &id),
            t_unitarity: max_diff(&mat_mul(&t, &adjoint(&t)), &id),
            s2_vs_st3: max_diff(&s2, &st3),
            s4: max_diff(&mat_mul(&s2, &s2), &id),
            t_order: self.t_order(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeilRelations {
    pub s_unitarity: f64,
    pub t_unitarity: f64,
    pub s2_vs_st3: f64,
    pub s4: f64,
    pub t_order: u64,
}

type CMat = Vec<Vec<Complex64>>;

fn zeros(m: usize) -> CMat {
    vec![vec![Complex64::new(0.0, 0.0); m]; m]
}

fn identity(m: usize) -> CMat {
    let mut out = zeros(m);
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    out
}

fn adjoint(a: &CMat) -> CMat {
    let m = a.len();
    (0..m).map(|i| (0..m).map(|j| a[j][i].conj()).collect()).collect()
}

fn mat_mul(a: &CMat, b: &CMat) -> CMat {
    let m = a.len();
    let mut out = zeros(m);
    for i in 0..m {
        for k in 0..m {
            let x = a[i][k];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * b[k][j];
            }
        }
    }
    out
}

fn max_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// The harmonic polynomial `P(u, v) = 2 Re<u, v>^2 - (Q(u)/n) Q(v)` for
/// `v = x + i y` with `x`, `y` in `D (x) k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialP {
    pub re: LatticeVector,
    pub im: LatticeVector,
    pub label: String,
}

impl PolynomialP {
    pub fn new(re: LatticeVector, im: LatticeVector, label: impl Into<String>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::Shape("real and imaginary parts differ in length".into()));
        }
        Ok(PolynomialP {
            re,
            im,
            label: label.into(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `-i v`.
    pub fn neg_i(&self) -> PolynomialP {
        PolynomialP {
            re: self.im.clone(),
            im: self.re.neg(),
            label: format!("-i({})", self.label),
        }
    }

    pub fn scaled(&self, c: &Rat) -> PolynomialP {
        PolynomialP {
            re: self.re.scale_rat(c),
            im: self.im.scale_rat(c),
            label: format!("{c}*({})", self.label),
        }
    }

    pub fn plus(&self, o: &PolynomialP) -> PolynomialP {
        PolynomialP {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
            label: format!("{} + {}", self.label, o.label),
        }
    }

    /// `Re<u, v>`.
    pub fn re_pairing(&self, d: &HermitianLattice, u: &LatticeVector) -> RealQuadVal {
        let w = abs_disc(d);
        let r = RealQuadVal::from_rat(w, d.inner(u, &self.re).re());
        &r + &d.inner(u, &self.im).im()
    }

    /// `Im<u, v>`.
    pub fn im_pairing(&self, d: &HermitianLattice, u: &LatticeVector) -> RealQuadVal {
        let w = abs_disc(d);
        let r = RealQuadVal::from_rat(w, -d.inner(u, &self.im).re());
        &r + &d.inner(u, &self.re).im()
    }

    /// `Q(v)`.
    pub fn norm(&self, d: &HermitianLattice) -> RealQuadVal {
        let w = abs_disc(d);
        let r = RealQuadVal::from_rat(w, d.norm(&self.re) + d.norm(&self.im));
        let cross = d.inner(&self.re, &self.im).im();
        &r + &cross.scale(&int(2))
    }

    /// `<v, v2>` as `(Re, Im)`.
    pub fn inner(&self, d: &HermitianLattice, o: &PolynomialP) -> (RealQuadVal, RealQuadVal) {
        let w = abs_disc(d);
        let xx = d.inner(&self.re, &o.re);
        let yy = d.inner(&self.im, &o.im);
        let yx = d.inner(&self.im, &o.re);
        let xy = d.inner(&self.re, &o.im);
        let re_rat = RealQuadVal::from_rat(w, xx.re() + yy.re());
        let re = &(&re_rat - &yx.im()) + &xy.im();
        let im_irr = &xx.im() + &yy.im();
        let im = &im_irr + &RealQuadVal::from_rat(w, yx.re() - xy.re());
        (re, im)
    }

    /// `P(u, v)`.
    pub fn eval(&self, d: &HermitianLattice, u: &LatticeVector) -> RealQuadVal {
        let c = self.re_pairing(d, u);
        let q = d.norm(u) / int(d.rank() as i64);
        let lhs = (&c * &c).scale(&int(2));
        &lhs - &self.norm(d).scale(&q)
    }

    /// Coefficient matrix `A` with `P(sum x_k z_k, v) = x^T A x` in the
    /// `Z`-basis of `D`.
    pub fn quadratic_matrix(&self, d: &HermitianLattice) -> Vec<Vec<RealQuadVal>> {
        let m = 2 * d.rank();
        let c: Vec<RealQuadVal> = (0..m).map(|k| self.re_pairing(d, &d.z_basis_vector(k))).collect();
        let qv = self.norm(d).scale(&(int(1) / int(2 * d.rank() as i64)));
        let t = d.trace_gram();
        (0..m)
            .map(|k| {
                (0..m)
                    .map(|l| &(&c[k] * &c[l]).scale(&int(2)) - &qv.scale(&t[k][l]))
                    .collect()
            })
            .collect()
    }

    /// `sum (T^-1)_kl d_k d_l P` for the trace Gram `T`.
    pub fn laplacian(&self, d: &HermitianLattice) -> Result<RealQuadVal> {
        let a = self.quadratic_matrix(d);
        let ti = rat_inverse(d.trace_gram()).ok_or(Error::Degenerate)?;
        let mut acc = RealQuadVal::zero(abs_disc(d));
        for (k, row) in a.iter().enumerate() {
            for (l, x) in row.iter().enumerate() {
                acc += &x.scale(&(&ti[k][l] * int(2)));
            }
        }
        Ok(acc)
    }
}

fn abs_disc(d: &HermitianLattice) -> u64 {
    d.field().abs_disc()
}

/// `p1(u, v, w) = 2 Re<v, u> Re<w, u> - (Q(u)/n) Re<v, w>`.
pub fn p1(d: &HermitianLattice, u: &LatticeVector, v: &PolynomialP, w: &PolynomialP) -> RealQuadVal {
    let a = v.re_pairing(d, u);
    let b = w.re_pairing(d, u);
    let q = d.norm(u) / int(d.rank() as i64);
    &(&a * &b).scale(&int(2)) - &v.inner(d, w).0.scale(&q)
}

/// `p2(u, v, w) = 2 Re<v, u> Im<w, u> - (Q(u)/n) Im<w, v>`.
pub fn p2(d: &HermitianLattice, u: &LatticeVector, v: &PolynomialP, w: &PolynomialP) -> RealQuadVal {
    let a = v.re_pairing(d, u);
    // Im<w, u> = -Im<u, w>
    let b = -w.im_pairing(d, u);
    let q = d.norm(u) / int(d.rank() as i64);
    &(&a * &b).scale(&int(2)) - &w.inner(d, v).1.scale(&q)
}

/// `{e_a} u {e_a + e_b : a < b}` for the real basis `f_1, i f_1, ..., f_n, i f_n` of `W`.
pub fn spanning_set(cusp: &CuspData) -> Vec<PolynomialP> {
    let k = cusp.field();
    let n = cusp.n();
    let zero = LatticeVector::zero(k, n);
    let mut base = Vec::with_capacity(2 * n);
    for j in 0..n {
        let f = LatticeVector::unit(k, n, j);
        base.push(PolynomialP::new(f.clone(), zero.clone(), format!("f{}", j + 1)).unwrap());
        base.push(PolynomialP::new(zero.clone(), f, format!("i*f{}", j + 1)).unwrap());
    }
    let mut out = base.clone();
    for a in 0..base.len() {
        for b in a + 1..base.len() {
            out.push(base[a].plus(&base[b]));
        }
    }
    out
}

/// `a(gamma, m) = sum_{lambda in D' + gamma, Q(lambda) = -m} P(lambda, v)` for `0 < m <= max_norm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaExpansion {
    pub label: String,
    pub max_norm: Rat,
    pub abs_disc: u64,
    pub coeffs: BTreeMap<(usize, Rat), RealQuadVal>,
    pub counts: BTreeMap<(usize, Rat), usize>,
}

/// All `m` in `(0, max_norm]` with `m = -Q(gamma) mod 1`.
pub fn theta_norms(disc: &DiscriminantGroup, gamma: usize, max_norm: &Rat) -> Vec<Rat> {
    let mut m = frac(&-disc.q_mod1(gamma));
    if m.is_zero() {
        m = Rat::one();
    }
    let mut out = Vec::new();
    while &m <= max_norm {
        out.push(m.clone());
        m += Rat::one();
    }
    out
}

pub fn build_theta(cusp: &CuspData, cache: &NormCache, v: &PolynomialP, max_norm: &Rat) -> Result<ThetaExpansion> {
    Ok(build_thetas(cusp, cache, std::slice::from_ref(v), max_norm)?.remove(0))
}

/// `u -> Re<u, v>` on the `Z`-basis of `D`, as integers over a common denominator.
struct LinearForm {
    r: Vec<i128>,
    s: Vec<i128>,
    denom: i128,
    qv: RealQuadVal,
}

impl LinearForm {
    fn new(d: &HermitianLattice, v: &PolynomialP) -> Result<Self> {
        let c: Vec<RealQuadVal> = (0..2 * d.rank()).map(|k| v.re_pairing(d, &d.z_basis_vector(k))).collect();
        let denom = lcm_denoms(c.iter().flat_map(|x| [x.r(), x.s()]))?;
        let scaled = |x: &Rat| to_i128(&(x * Rat::from_integer(denom.into())));
        Ok(LinearForm {
            r: c.iter().map(|x| scaled(x.r())).collect::<Result<_>>()?,
            s: c.iter().map(|x| scaled(x.s())).collect::<Result<_>>()?,
            denom,
            qv: v.norm(d),
        })
    }
}

fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Result<i128> {
    let mut l: i128 = 1;
    for x in xs {
        l = num_integer::lcm(l, to_i128(&Rat::from_integer(x.denom().clone()))?);
    }
    Ok(l)
}

fn to_i128(x: &Rat) -> Result<i128> {
    if !x.is_integer() {
        return Err(Error::Consistency(format!("{x} is not an integer")));
    }
    i128::try_from(x.to_integer()).map_err(|_| Error::Consistency(format!("{x} exceeds 128 bits")))
}

/// Theta expansions for several polarization vectors, sharing one pass over
/// each enumerated cell. Every `u` in a cell has `Q(u) = -m`, so
/// `sum P(u, v) = 2 sum (R + S w)^2 + count (m/n) Q(v)` with `Re<u, v> = R + S w`.
pub fn build_thetas(
    cusp: &CuspData,
    cache: &NormCache,
    vs: &[PolynomialP],
    max_norm: &Rat,
) -> Result<Vec<ThetaExpansion>> {
    if !max_norm.is_positive() {
        return Err(Error::InvalidArgument(format!("max norm {max_norm} must be positive")));
    }
    let d = cusp.definite();
    let disc = cusp.definite_disc();
    let w = cusp.field().abs_disc();
    let n = int(cusp.n() as i64);
    let forms: Vec<LinearForm> = vs.iter().map(|v| LinearForm::new(d, v)).collect::<Result<_>>()?;
    let cells: Vec<(usize, Rat)> = (0..disc.order())
        .flat_map(|g| theta_norms(disc, g, max_norm).into_iter().map(move |m| (g, m)))
        .collect();
    type Cell = ((usize, Rat), Vec<RealQuadVal>, usize);
    let values: Vec<Cell> = cells
        .into_par_iter()
        .map(|(g, m)| {
            let vecs = cache.vectors(disc, g, &-m.clone())?;
            let coords: Vec<Vec<Rat>> = vecs.iter().map(|u| d.to_z(u)).collect();
            let l1 = lcm_denoms(coords.iter().flatten())?;
            let l1r = Rat::from_integer(l1.into());
            let xs: Vec<Vec<i128>> = coords
                .iter()
                .map(|c| c.iter().map(|x| to_i128(&(x * &l1r))).collect::<Result<_>>())
                .collect::<Result<_>>()?;
            let count = Rat::from_integer(vecs.len().into());
            let sums = forms
                .iter()
                .map(|f| {
                    let (mut rr, mut ss, mut rs) = (0i128, 0i128, 0i128);
                    for x in &xs {
                        let r: i128 = x.iter().zip(&f.r).map(|(a, b)| a * b).sum();
                        let s: i128 = x.iter().zip(&f.s).map(|(a, b)| a * b).sum();
                        rr += r * r;
                        ss += s * s;
                        rs += r * s;
                    }
                    let scale = Rat::from_integer((l1 * f.denom).into());
                    let scale2 = &scale * &scale;
                    let rat = (Rat::from_integer(rr.into()) + Rat::from_integer((ss * w as i128).into())) * int(2) / &scale2;
                    let irr = Rat::from_integer(rs.into()) * int(4) / &scale2;
                    let shift = f.qv.scale(&(&count * &m / &n));
                    &RealQuadVal::new(w, rat, irr) + &shift
                })
                .collect();
            Ok(((g, m), sums, vecs.len()))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<ThetaExpansion> = vs
        .iter()
        .map(|v| ThetaExpansion {
            label: v.label.clone(),
            max_norm: max_norm.clone(),
            abs_disc: w,
            coeffs: BTreeMap::new(),
            counts: BTreeMap::new(),
        })
        .collect();
    for (key, sums, count) in values {
        for (th, c) in out.iter_mut().zip(sums) {
            th.counts.insert(key.clone(), count);
            th.coeffs.insert(key.clone(), c);
        }
    }
    Ok(out)
}

impl ThetaExpansion {
    pub fn coeff(&self, gamma: usize, m: &Rat) -> Option<&RealQuadVal> {
        self.coeffs.get(&(gamma, m.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// The vector `f(tau) = sum a(gamma, m) e(m tau) e_gamma`.
    pub fn evaluate(&self, dim: usize, tau: Complex64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for ((g, m), c) in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            out[*g] += c.to_f64() * e(tau * rat_to_f64(m));
        }
        out
    }

    /// `gamma m coefficient` rows with the coefficient as `r + s*sqrt(|d|)`.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# theta v={} max_norm={}", self.label, self.max_norm).unwrap();
        writeln!(s, "# gamma m count coefficient").unwrap();
        for ((g, m), c) in &self.coeffs {
            let n = self.counts.get(&(*g, m.clone())).copied().unwrap_or(0);
            writeln!(s, "{g} {m} {n} {} + {}*sqrt({})", c.r(), c.s(), self.abs_disc).unwrap();
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularityDeviation {
    pub t_deviation: f64,
    pub s_deviation: f64,
}

/// Compares `f(tau + 1)` with `rho^*(T) f(tau)` and `f(-1/tau)` with
/// `tau^k rho^*(S) f(tau)`.
pub fn theta_modularity_check(rep: &WeilRep, theta: &ThetaExpansion, tau: Complex64) -> Result<ModularityDeviation> {
    let s_tau = -tau.inv();
    if tau.im < 0.8 || s_tau.im < 0.8 {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} needs Im(tau) >= 0.8 and Im(-1/tau) >= 0.8"
        )));
    }
    let dim = rep.dim();
    let f = theta.evaluate(dim, tau);
    let f_t = theta.evaluate(dim, tau + 1.0);
    let f_s = theta.evaluate(dim, s_tau);
    let t = rep.t_matrix();
    let s = rep.s_matrix();
    let factor = tau.powi(rep.weight() as i32);
    let mut t_dev = 0.0f64;
    let mut s_dev = 0.0f64;
    for g in 0..dim {
        let tf: Complex64 = (0..dim).map(|h| t[g][h] * f[h]).sum();
        let sf: Complex64 = (0..dim).map(|h| s[g][h] * f[h]).sum();
        t_dev = t_dev.max((f_t[g] - tf).norm());
        s_dev = s_dev.max((f_s[g] - factor * sf).norm());
    }
    Ok(ModularityDeviation {
        t_deviation: t_dev,
        s_deviation: s_dev,
    })
}

/// A failing spanning vector and its exact pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionWitness {
    pub v: PolynomialP,
    pub residual: RealQuadVal,
}

/// Theta expansions of the spanning set, shared across combinations.
pub struct ObstructionContext {
    thetas: Vec<(PolynomialP, ThetaExpansion)>,
    max_norm: Rat,
}

impl ObstructionContext {
    pub fn new(cusp: &CuspData, cache: &NormCache, max_norm: &Rat) -> Result<Self> {
        let span = spanning_set(cusp);
        let thetas = span.iter().cloned().zip(build_thetas(cusp, cache, &span, max_norm)?).collect();
        Ok(ObstructionContext {
            thetas,
            max_norm: max_norm.clone(),
        })
    }

    pub fn max_norm(&self) -> &Rat {
        &self.max_norm
    }

    pub fn thetas(&self) -> &[(PolynomialP, ThetaExpansion)] {
        &self.thetas
    }

    /// `sum c(beta, m) a(pi(beta), -m)` for every spanning `v`.
    pub fn pairings(&self, cusp: &CuspData, combo: &HeegnerCombo) -> Result<Vec<RealQuadVal>> {
        if combo.max_abs_norm() > self.max_norm {
            return Err(Error::InvalidArgument(format!(
                "combination reaches norm {} beyond the precomputed {}",
                combo.max_abs_norm(),
                self.max_norm
            )));
        }
        let w = cusp.field().abs_disc();
        let mut out = vec![RealQuadVal::zero(w); self.thetas.len()];
        for (beta, m, c) in combo.terms() {
            let pi = cusp
                .pi(beta)
                .ok_or_else(|| Error::InvalidCombo(format!("coset {beta} has no lift")))?;
            let key = -m.clone();
            for (acc, (_, th)) in out.iter_mut().zip(&self.thetas) {
                let a = th
                    .coeff(pi, &key)
                    .ok_or_else(|| Error::Consistency(format!("missing theta coefficient ({pi}, {key})")))?;
                *acc += &a.scale(&int(c));
            }
        }
        Ok(out)
    }

    pub fn check(&self, cusp: &CuspData, combo: &HeegnerCombo) -> Result<(bool, Vec<ObstructionWitness>)> {
        let pairings = self.pairings(cusp, combo)?;
        Ok(verdict_from_pairings(&self.thetas, pairings))
    }
}

pub fn verdict_from_pairings(
    thetas: &[(PolynomialP, ThetaExpansion)],
    pairings: Vec<RealQuadVal>,
) -> (bool, Vec<ObstructionWitness>) {
    let witnesses: Vec<ObstructionWitness> = thetas
        .iter()
        .zip(pairings)
        .filter(|(_, r)| !r.is_zero())
        .map(|((v, _), residual)| ObstructionWitness { v: v.clone(), residual })
        .collect();
    (witnesses.is_empty(), witnesses)
}

/// True iff the combination pairs to zero with every theta series of the span.
pub fn obstruction_check(
    cusp: &CuspData,
    cache: &NormCache,
    combo: &HeegnerCombo,
) -> Result<(bool, Vec<ObstructionWitness>)> {
    if combo.is_empty() {
        return Ok((true, Vec::new()));
    }
    ObstructionContext::new(cusp, cache, &combo.max_abs_norm())?.check(cusp, combo)
}
