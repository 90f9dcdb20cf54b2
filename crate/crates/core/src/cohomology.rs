//! Bilinear forms on the translation lattice `D_{l,Gamma}`, their classes in
//! `H^2(Gamma_l, Z)`, trivializing cochains, and the torsion criteria for
//! combinations of local Heegner divisors.

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::cusp::{CuspData, HeisenbergElem, HeisenbergParams, SiegelPoint};
use crate::error::{Error, Result};
use crate::hlattice::{HermitianLattice, LatticeVector, NormCache};
use crate::local_products::{chern_class_of_combo, expand_divisor, ExpandedTerm, HeegnerCombo};
use crate::qfield::{int, FieldElem, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    ImHermitian,
    ImSymmetric,
    Combination,
}

/// A real bilinear form, stored by its values on basis pairs of `D_{l,Gamma}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilZForm {
    pub kind: FormKind,
    values: Vec<Vec<Rat>>,
}

impl BilZForm {
    pub fn from_values(kind: FormKind, values: Vec<Vec<Rat>>) -> Result<Self> {
        let m = values.len();
        if values.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("form values must be square".into()));
        }
        Ok(BilZForm { kind, values })
    }

    /// `Im H(t, t') / |delta|` for the hermitian form with Gram matrix `h` on the
    /// basis of `D` (linear in the left argument).
    pub fn im_hermitian(params: &HeisenbergParams, h: &[Vec<FieldElem>]) -> Result<Self> {
        for (i, row) in h.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if *x != h[j][i].conj() {
                    return Err(Error::InvalidArgument(format!("entry ({i},{j}) breaks hermitian symmetry")));
                }
            }
        }
        let values = pair_table(params, |t, t2| {
            let mut acc = t.coords()[0].field().zero();
            for (i, ti) in t.coords().iter().enumerate() {
                for (j, tj) in t2.coords().iter().enumerate() {
                    acc += &(&(ti * &h[i][j]) * &tj.conj());
                }
            }
            acc.im_over_abs_delta()
        });
        Ok(BilZForm {
            kind: FormKind::ImHermitian,
            values,
        })
    }

    /// `Im G(t, t') / |delta|` for the symmetric bilinear form `G(x, y) = x^T g y`.
    pub fn im_symmetric(params: &HeisenbergParams, g: &[Vec<FieldElem>]) -> Result<Self> {
        for (i, row) in g.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if *x != g[j][i] {
                    return Err(Error::InvalidArgument(format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        let values = pair_table(params, |t, t2| {
            let mut acc = t.coords()[0].field().zero();
            for (i, ti) in t.coords().iter().enumerate() {
                for (j, tj) in t2.coords().iter().enumerate() {
                    acc += &(&(ti * &g[i][j]) * tj);
                }
            }
            acc.im_over_abs_delta()
        });
        Ok(BilZForm {
            kind: FormKind::ImSymmetric,
            values,
        })
    }

    /// The Chern class cocycle of a combination, on basis pairs.
    pub fn chern_form(
        cusp: &CuspData,
        params: &HeisenbergParams,
        cache: &NormCache,
        combo: &HeegnerCombo,
    ) -> Result<Self> {
        let basis = params.basis();
        let mut values = Vec::with_capacity(basis.len());
        for t in basis {
            let mut row = Vec::with_capacity(basis.len());
            for t2 in basis {
                row.push(chern_class_of_combo(cusp, params, cache, combo, t, t2)?);
            }
            values.push(row);
        }
        Ok(BilZForm {
            kind: FormKind::Combination,
            values,
        })
    }

    pub fn values(&self) -> &[Vec<Rat>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &Rat {
        &self.values[i][j]
    }

    /// Value at `sum a_i t_i`, `sum b_j t_j`.
    pub fn eval(&self, a: &[i64], b: &[i64]) -> Rat {
        let mut acc = Rat::zero();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                acc += &self.values[i][j] * int(ai * bj);
            }
        }
        acc
    }

    /// Membership in `BIL_Z`.
    pub fn is_integral(&self) -> bool {
        self.values.iter().flatten().all(|x| x.is_integer())
    }

    pub fn scaled(&self, c: &Rat) -> Self {
        BilZForm {
            kind: self.kind,
            values: self.values.iter().map(|r| r.iter().map(|x| x * c).collect()).collect(),
        }
    }

    pub fn plus(&self, other: &BilZForm) -> Self {
        BilZForm {
            kind: FormKind::Combination,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }
}

fn pair_table(params: &HeisenbergParams, f: impl Fn(&LatticeVector, &LatticeVector) -> Rat) -> Vec<Vec<Rat>> {
    let basis = params.basis();
    basis.iter().map(|t| basis.iter().map(|t2| f(t, t2)).collect()).collect()
}

/// `(1/N) Im<t, t'> / |delta|`, the generator of the kernel of `BIL_Z -> H^2`.
pub fn transgression_generator(cusp: &CuspData, params: &HeisenbergParams) -> Result<BilZForm> {
    let d = cusp.definite();
    let values = pair_table(params, |t, t2| d.inner(t, t2).im_over_abs_delta() / params.n());
    let form = BilZForm {
        kind: FormKind::ImHermitian,
        values,
    };
    if !form.is_integral() {
        return Err(Error::Consistency("transgression generator is not integral on the basis".into()));
    }
    Ok(form)
}

/// A basis pair where a torsion identity fails, with its exact residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub pair: (usize, usize),
    pub t: LatticeVector,
    pub t2: LatticeVector,
    pub residual: FieldElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionVerdict {
    pub is_torsion: bool,
    /// Proportionality constant when torsion.
    pub q_factor: Option<Rat>,
    pub witness: Option<Witness>,
}

impl TorsionVerdict {
    fn torsion(q: Rat) -> Self {
        TorsionVerdict {
            is_torsion: true,
            q_factor: Some(q),
            witness: None,
        }
    }

    fn failed(w: Witness) -> Self {
        TorsionVerdict {
            is_torsion: false,
            q_factor: None,
            witness: Some(w),
        }
    }
}

/// Decides whether `form = Q * Im<t, t'> / |delta|` on all basis pairs for some rational `Q`.
pub fn kernel_test(cusp: &CuspData, params: &HeisenbergParams, form: &BilZForm) -> TorsionVerdict {
    let d = cusp.definite();
    let basis = params.basis();
    let k = cusp.field();
    let reference = pair_table(params, |t, t2| d.inner(t, t2).im_over_abs_delta());
    let mut q: Option<Rat> = None;
    for (i, row) in reference.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            if !r.is_zero() {
                q = Some(form.value(i, j) / r);
                break;
            }
        }
        if q.is_some() {
            break;
        }
    }
    let q = q.unwrap_or_else(Rat::zero);
    for (i, row) in reference.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            let residual = form.value(i, j) - &q * r;
            if !residual.is_zero() {
                return TorsionVerdict::failed(Witness {
                    pair: (i, j),
                    t: basis[i].clone(),
                    t2: basis[j].clone(),
                    residual: k.rational(residual),
                });
            }
        }
    }
    TorsionVerdict::torsion(q)
}

/// `sum mult [F_lambda(t, t') - Q(lambda)/n <t', t>]` over the expansion, for
/// every basis pair of `D_{l,Gamma}`.
pub fn torsion_residuals(
    cusp: &CuspData,
    params: &HeisenbergParams,
    terms: &[ExpandedTerm],
) -> Vec<((usize, usize), FieldElem)> {
    let d = cusp.definite();
    let basis = params.basis();
    let n = int(cusp.n() as i64);
    let k = cusp.field();
    let pairings: Vec<Vec<FieldElem>> = terms
        .iter()
        .map(|term| basis.iter().map(|t| d.inner(t, &term.lambda_d)).collect())
        .collect();
    let coeff: Vec<Rat> = terms
        .iter()
        .map(|term| &term.mult * d.norm(&term.lambda_d) / &n)
        .collect();
    let q_sum: Rat = coeff.iter().sum();
    let m = basis.len();
    (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / m, idx % m);
            let mut acc = k.zero();
            for (term, p) in terms.iter().zip(&pairings) {
                let f = p[j].scale(&(p[i].re() * int(2)));
                acc += &f.scale(&term.mult);
            }
            acc -= &d.inner(&basis[j], &basis[i]).scale(&q_sum);
            ((i, j), acc)
        })
        .collect()
}

/// The same residual at one pair, evaluated through `F = B + H`.
fn residual_via_b_h(cusp: &CuspData, terms: &[ExpandedTerm], t: &LatticeVector, t2: &LatticeVector) -> FieldElem {
    let d = cusp.definite();
    let n = int(cusp.n() as i64);
    let mut acc = cusp.field().zero();
    for term in terms {
        let a = d.inner(t, &term.lambda_d);
        let b = d.inner(t2, &term.lambda_d);
        let bh = &(&a * &b) + &(&b * &a.conj());
        let shift = d.inner(t2, t).scale(&(d.norm(&term.lambda_d) / &n));
        acc += &(&bh - &shift).scale(&term.mult);
    }
    acc
}

/// `sum mult |d| Q(lambda) / n`.
pub fn combo_q_factor(cusp: &CuspData, terms: &[ExpandedTerm]) -> Rat {
    let d = cusp.definite();
    let scale = int(cusp.field().abs_disc() as i64) / int(cusp.n() as i64);
    terms.iter().map(|t| &t.mult * d.norm(&t.lambda_d) * &scale).sum()
}

/// Turns residuals into a verdict, re-checking a failing pair by the second
/// evaluation path.
pub fn verdict_from_residuals(
    cusp: &CuspData,
    params: &HeisenbergParams,
    terms: &[ExpandedTerm],
    residuals: &[((usize, usize), FieldElem)],
) -> Result<TorsionVerdict> {
    let basis = params.basis();
    match residuals.iter().find(|(_, r)| !r.is_zero()) {
        None => Ok(TorsionVerdict::torsion(combo_q_factor(cusp, terms))),
        Some(((i, j), r)) => {
            let again = residual_via_b_h(cusp, terms, &basis[*i], &basis[*j]);
            if again != *r {
                return Err(Error::Consistency(format!(
                    "residual at pair ({i},{j}) is {r} by F but {again} by B + H"
                )));
            }
            Ok(TorsionVerdict::failed(Witness {
                pair: (*i, *j),
                t: basis[*i].clone(),
                t2: basis[*j].clone(),
                residual: r.clone(),
            }))
        }
    }
}

/// Exact torsion verdict for a combination of local Heegner divisors.
pub fn torsion_check_combo(
    cusp: &CuspData,
    params: &HeisenbergParams,
    cache: &NormCache,
    combo: &HeegnerCombo,
) -> Result<TorsionVerdict> {
    let terms = expand_divisor(cusp, cache, combo)?;
    let residuals = torsion_residuals(cusp, params, &terms);
    verdict_from_residuals(cusp, params, &terms, &residuals)
}

/// `sum mult tr B_lambda` over an orthogonal basis of `W`; the combination can
/// only be torsion when this vanishes.
pub fn necessary_trace_condition(cusp: &CuspData, cache: &NormCache, combo: &HeegnerCombo) -> Result<(bool, FieldElem)> {
    let terms = expand_divisor(cusp, cache, combo)?;
    let basis = cusp.definite().orthogonal_basis()?;
    let mut acc = cusp.field().zero();
    for term in &terms {
        acc += &trace_b(cusp.definite(), &basis, &term.lambda_d).scale(&term.mult);
    }
    Ok((acc.is_zero(), acc))
}

/// `tr B_lambda = sum_j <e_j, lambda>^2` with `e_j = f_j / sqrt(-Q(f_j))`.
pub fn trace_b(d: &HermitianLattice, basis: &[(LatticeVector, Rat)], lambda_d: &LatticeVector) -> FieldElem {
    let mut acc = d.field().zero();
    for (f, q) in basis {
        let x = d.inner(f, lambda_d);
        acc += &(&x * &x).scale(&(-q.recip()));
    }
    acc
}

/// `tr H_lambda = sum_j H_lambda(e_j, e_j)`.
pub fn trace_h(d: &HermitianLattice, basis: &[(LatticeVector, Rat)], lambda_d: &LatticeVector) -> FieldElem {
    let mut acc = d.field().zero();
    for (f, q) in basis {
        let x = d.inner(f, lambda_d);
        acc += &(&x.conj() * &x).scale(&(-q.recip()));
    }
    acc
}

/// `tr <.,.>` on `W` over a normalized orthogonal basis.
pub fn trace_inner(d: &HermitianLattice, basis: &[(LatticeVector, Rat)]) -> FieldElem {
    let mut acc = d.field().zero();
    for (f, q) in basis {
        acc += &d.inner(f, f).scale(&(-q.recip()));
    }
    acc
}

/// Forms whose imaginary part is trivialized by an explicit cochain.
#[derive(Clone, Debug)]
pub enum CochainForm {
    /// `H(x, y) = sum x_i h_ij conj(y_j)`, `h` hermitian.
    Hermitian(Vec<Vec<Complex64>>),
    /// `G(x, y) = sum x_i g_ij y_j`, `g` symmetric.
    Symmetric(Vec<Vec<Complex64>>),
}

impl CochainForm {
    fn apply(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let (m, conj) = match self {
            CochainForm::Hermitian(m) => (m, true),
            CochainForm::Symmetric(m) => (m, false),
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                let yj = if conj { yj.conj() } else { *yj };
                acc += xi * m[i][j] * yj;
            }
        }
        acc
    }

    /// The right-hand side `Im H(t, t')` resp. `Im G(t', t)`.
    pub fn target(&self, t: &[Complex64], t2: &[Complex64]) -> f64 {
        match self {
            CochainForm::Hermitian(_) => self.apply(t, t2).im,
            CochainForm::Symmetric(_) => self.apply(t2, t).im,
        }
    }

    /// The cochain `u([h, t], z)`.
    pub fn cochain(&self, cusp: &CuspData, t: &[Complex64], p: &SiegelPoint) -> Complex64 {
        let c = cusp.ell_prime_ell().to_complex();
        let half_i = Complex64::new(0.0, 2.0).inv();
        match self {
            CochainForm::Hermitian(_) => half_i * (self.apply(&p.sigma, t) * 2.0 / c + self.apply(t, t)),
            CochainForm::Symmetric(_) => half_i * (self.apply(&p.sigma, t) / c + self.apply(t, t).conj() * 0.5),
        }
    }
}

/// `(du)(g, g2, z) = u(g2, g z) - u(g g2, z) + u(g, z)`.
pub fn cochain_coboundary(
    cusp: &CuspData,
    form: &CochainForm,
    g: &HeisenbergElem,
    g2: &HeisenbergElem,
    p: &SiegelPoint,
) -> Result<Complex64> {
    let t = g.t.to_complex();
    let t2 = g2.t.to_complex();
    let gg2 = cusp.compose(g, g2);
    let gp = cusp.heisenberg_act(g, p)?;
    Ok(form.cochain(cusp, &t2, &gp) - form.cochain(cusp, &gg2.t.to_complex(), p) + form.cochain(cusp, &t, p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CochainReport {
    /// Largest `|du - target|` over the samples.
    pub max_deviation: f64,
    /// Largest difference of `du` between two points for the same pair.
    pub max_z_spread: f64,
    pub passed: bool,
}

/// Checks `du = Im H(t, t')` (resp. `Im G(t', t)`) on random group elements and
/// points.
pub fn trivializing_cochain_check(
    cusp: &CuspData,
    params: &HeisenbergParams,
    form: &CochainForm,
    samples: usize,
    tolerance: f64,
    rng: &mut impl Rng,
) -> Result<CochainReport> {
    let mut max_deviation = 0.0f64;
    let mut max_z_spread = 0.0f64;
    for _ in 0..samples {
        let g = random_element(cusp, params, rng);
        let g2 = random_element(cusp, params, rng);
        let p1 = random_point(cusp, rng);
        let p2 = random_point(cusp, rng);
        let a = cochain_coboundary(cusp, form, &g, &g2, &p1)?;
        let b = cochain_coboundary(cusp, form, &g, &g2, &p2)?;
        let target = form.target(&g.t.to_complex(), &g2.t.to_complex());
        max_deviation = max_deviation.max((a - target).norm());
        max_z_spread = max_z_spread.max((a - b).norm());
    }
    Ok(CochainReport {
        max_deviation,
        max_z_spread,
        passed: max_deviation <= tolerance && max_z_spread <= tolerance,
    })
}

/// `[k N, sum c_i t_i]` with small random integers.
pub fn random_element(cusp: &CuspData, params: &HeisenbergParams, rng: &mut impl Rng) -> HeisenbergElem {
    let coeffs: Vec<i64> = (0..params.basis().len()).map(|_| rng.gen_range(-3..=3)).collect();
    let _ = cusp;
    params.element(rng.gen_range(-3..=3), &coeffs)
}

/// A point of the Siegel domain with `sigma` in a small box and `Im tau` large
/// enough for membership.
pub fn random_point(cusp: &CuspData, rng: &mut impl Rng) -> SiegelPoint {
    let sigma: Vec<Complex64> = (0..cusp.n())
        .map(|_| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
        .collect();
    let mut p = SiegelPoint {
        tau: Complex64::new(rng.gen_range(-0.5..0.5), 1.0),
        sigma,
    };
    while !cusp.in_domain(&p) {
        p.tau.im *= 2.0;
    }
    p.tau.im += rng.gen_range(0.0..1.0);
    p
}
