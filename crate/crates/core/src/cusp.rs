//! Cusp data at a primitive isotropic vector `l`: the definite part `D`,
//! the Siegel domain model, the Heisenberg group and its actions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hlattice::{field_mat_inverse, DiscriminantGroup, HermitianLattice, LatticeVector};
use crate::linalg::{self, IntMat, RatMat};
use crate::qfield::{int, rat_gcd_all, FieldElem, FieldSpec, Rat};

/// The fixed representative of a coset `beta` in `L' ∩ l^perp`, split as
/// `beta_dot = ell_coeff * l + (definite part)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub beta_dot: LatticeVector,
    pub ell_coeff: FieldElem,
    /// Definite part in coordinates of the basis of `D`.
    pub definite: LatticeVector,
    /// Index of the coset of the definite part in `D'/D`.
    pub pi: usize,
}

/// `v = a*l + b*l' + w` with `w` in `W = span(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub ell: FieldElem,
    pub ell_prime: FieldElem,
    pub definite: LatticeVector,
}

#[derive(Clone, Debug)]
pub struct CuspData {
    lattice: HermitianLattice,
    disc: DiscriminantGroup,
    ell: LatticeVector,
    ell_prime: LatticeVector,
    definite_basis: Vec<LatticeVector>,
    definite: HermitianLattice,
    definite_disc: DiscriminantGroup,
    definite_gram_inv: Vec<Vec<FieldElem>>,
    m1: Rat,
    m2: Rat,
    l_script: Vec<usize>,
    box_l_script: Vec<usize>,
    lifts: BTreeMap<usize, Lift>,
    ell_prime_ell: FieldElem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    pub tau: Complex64,
    /// Coordinates in `D ⊗ C` with respect to the basis of `D`.
    pub sigma: Vec<Complex64>,
}

/// `[h, t]` with `t` in coordinates of the basis of `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeisenbergElem {
    pub h: Rat,
    pub t: LatticeVector,
}

impl HeisenbergElem {
    pub fn new(h: Rat, t: LatticeVector) -> Self {
        HeisenbergElem { h, t }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        Self::new(Rat::zero(), LatticeVector::zero(field, n))
    }

    pub fn central(field: FieldSpec, n: usize, h: Rat) -> Self {
        Self::new(h, LatticeVector::zero(field, n))
    }

    pub fn translation(t: LatticeVector) -> Self {
        Self::new(Rat::zero(), t)
    }

    pub fn inverse(&self) -> Self {
        Self::new(-&self.h, self.t.neg())
    }
}

impl CuspData {
    pub fn new(lattice: HermitianLattice, ell: LatticeVector, ell_prime: LatticeVector) -> Result<Self> {
        build_cusp(lattice, ell, ell_prime)
    }

    pub fn field(&self) -> FieldSpec {
        self.lattice.field()
    }

    pub fn lattice(&self) -> &HermitianLattice {
        &self.lattice
    }

    pub fn disc_group(&self) -> &DiscriminantGroup {
        &self.disc
    }

    pub fn ell(&self) -> &LatticeVector {
        &self.ell
    }

    pub fn ell_prime(&self) -> &LatticeVector {
        &self.ell_prime
    }

    /// The definite lattice `D = L ∩ l^perp ∩ l'^perp` in its own basis.
    pub fn definite(&self) -> &HermitianLattice {
        &self.definite
    }

    /// Basis of `D` in coordinates of `L`.
    pub fn definite_basis(&self) -> &[LatticeVector] {
        &self.definite_basis
    }

    pub fn definite_disc(&self) -> &DiscriminantGroup {
        &self.definite_disc
    }

    /// Rank of `D`.
    pub fn n(&self) -> usize {
        self.definite.rank()
    }

    /// Positive generator of `2 Re <L, l>`.
    pub fn m1(&self) -> &Rat {
        &self.m1
    }

    /// Positive generator of `|delta| Im <L, l>`.
    pub fn m2(&self) -> &Rat {
        &self.m2
    }

    /// Cosets of `L'/L` that contain an element orthogonal to `l`.
    pub fn l_script(&self) -> &[usize] {
        &self.l_script
    }

    /// Cosets passing the congruence test modulo `M1`, `M2`; contains `l_script`.
    pub fn box_l_script(&self) -> &[usize] {
        &self.box_l_script
    }

    pub fn in_l_script(&self, beta: usize) -> bool {
        self.lifts.contains_key(&beta)
    }

    pub fn lift(&self, beta: usize) -> Option<&Lift> {
        self.lifts.get(&beta)
    }

    pub fn pi(&self, beta: usize) -> Option<usize> {
        self.lifts.get(&beta).map(|l| l.pi)
    }

    /// `<l', l> = -delta^{-1}`.
    pub fn ell_prime_ell(&self) -> &FieldElem {
        &self.ell_prime_ell
    }

    pub fn to_ambient(&self, t: &LatticeVector) -> LatticeVector {
        let r = self.lattice.rank();
        let mut acc = LatticeVector::zero(self.field(), r);
        for (c, b) in t.coords().iter().zip(&self.definite_basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }

    pub fn decompose(&self, v: &LatticeVector) -> Decomposition {
        let lat = &self.lattice;
        let b = lat.inner(v, &self.ell).div(&self.ell_prime_ell).expect("nonzero");
        let a = lat
            .inner(v, &self.ell_prime)
            .div(&self.ell_prime_ell.conj())
            .expect("nonzero");
        let w = v.sub(&self.ell.scale(&a)).sub(&self.ell_prime.scale(&b));
        let h: Vec<FieldElem> = self.definite_basis.iter().map(|d| lat.inner(&w, d)).collect();
        let n = self.n();
        let y = (0..n)
            .map(|j| {
                let mut acc = self.field().zero();
                for (k, hk) in h.iter().enumerate() {
                    acc += &(hk * &self.definite_gram_inv[k][j]);
                }
                acc
            })
            .collect();
        Decomposition {
            ell: a,
            ell_prime: b,
            definite: LatticeVector::new(y),
        }
    }

    pub fn compose(&self, g: &HeisenbergElem, g2: &HeisenbergElem) -> HeisenbergElem {
        let c = self.definite.inner(&g2.t, &g.t).im_over_abs_delta();
        HeisenbergElem::new(&g.h + &g2.h + c, g.t.add(&g2.t))
    }

    pub fn commutator(&self, g: &HeisenbergElem, g2: &HeisenbergElem) -> HeisenbergElem {
        let a = self.compose(g, g2);
        let b = self.compose(&a, &g.inverse());
        self.compose(&b, &g2.inverse())
    }

    /// Exact action of `[h, t] = [h, 0] ∘ [0, t]` on `V`.
    pub fn act_on_vector(&self, g: &HeisenbergElem, v: &LatticeVector) -> LatticeVector {
        let lat = &self.lattice;
        let k = self.field();
        let t = self.to_ambient(&g.t);
        let vl = lat.inner(v, &self.ell);
        let vt = lat.inner(v, &t);
        let qt = k.rational(self.definite.norm(&g.t));
        let half = k.rational(Rat::new(BigInt::one(), BigInt::from(2)));
        let coeff_ell = -(&vt + &(&half * &vl * &qt));
        let w = v.add(&t.scale(&vl)).add(&self.ell.scale(&coeff_ell));
        let wl = lat.inner(&w, &self.ell);
        let shift = -(&wl * &k.delta() * k.rational(g.h.clone()));
        w.add(&self.ell.scale(&shift))
    }

    /// Whether `g` maps `L` to itself and acts trivially on `L'/L`.
    pub fn in_discriminant_kernel(&self, g: &HeisenbergElem) -> bool {
        if g.t.len() != self.n() || !g.t.is_integral() {
            return false;
        }
        self.lattice
            .dual_z_basis()
            .iter()
            .all(|v| self.act_on_vector(g, v).sub(v).is_integral())
    }

    pub fn z_vector(&self, p: &SiegelPoint) -> Vec<Complex64> {
        let k = self.field();
        let coeff = -(k.delta().to_complex() * p.tau * self.ell_prime_ell.to_complex());
        let mut z: Vec<Complex64> = self
            .ell_prime
            .to_complex()
            .iter()
            .zip(self.ell.to_complex())
            .map(|(a, b)| a + coeff * b)
            .collect();
        for (s, d) in p.sigma.iter().zip(&self.definite_basis) {
            for (zi, di) in z.iter_mut().zip(d.to_complex()) {
                *zi += s * di;
            }
        }
        z
    }

    /// Reads `(tau, sigma)` off a vector of the form `l' + a*l + w`.
    pub fn point_from_vector(&self, z: &[Complex64]) -> SiegelPoint {
        let lat = &self.lattice;
        let ell = self.ell.to_complex();
        let ellp = self.ell_prime.to_complex();
        let lpl = self.ell_prime_ell.to_complex();
        let a = lat.inner_complex(z, &ellp) / lpl.conj();
        let b = lat.inner_complex(z, &ell) / lpl;
        let w: Vec<Complex64> = z
            .iter()
            .zip(ell.iter().zip(&ellp))
            .map(|(zi, (li, lpi))| zi - a * li - b * lpi)
            .collect();
        let h: Vec<Complex64> = self
            .definite_basis
            .iter()
            .map(|d| lat.inner_complex(&w, &d.to_complex()))
            .collect();
        let sigma = (0..self.n())
            .map(|j| {
                h.iter()
                    .enumerate()
                    .map(|(k, hk)| hk * self.definite_gram_inv[k][j].to_complex())
                    .sum()
            })
            .collect();
        let tau = -a / (self.field().delta().to_complex() * lpl);
        SiegelPoint { tau, sigma }
    }

    pub fn hermitian_value(&self, p: &SiegelPoint) -> f64 {
        let z = self.z_vector(p);
        self.lattice.inner_complex(&z, &z).re
    }

    pub fn in_domain(&self, p: &SiegelPoint) -> bool {
        p.sigma.len() == self.n() && self.hermitian_value(p) > 0.0
    }

    pub fn heisenberg_act(&self, g: &HeisenbergElem, p: &SiegelPoint) -> Result<SiegelPoint> {
        if !self.in_domain(p) {
            return Err(Error::OutsideDomain);
        }
        let k = self.field();
        let delta = k.delta().to_complex();
        let lpl = self.ell_prime_ell.to_complex();
        let t = g.t.to_complex();
        let st = self.definite.inner_complex(&p.sigma, &t);
        let qt = crate::qfield::rat_to_f64(&self.definite.norm(&g.t));
        let tau = p.tau + st / (delta * lpl) + 0.5 * qt / delta + crate::qfield::rat_to_f64(&g.h);
        let sigma = p.sigma.iter().zip(&t).map(|(s, ti)| s + lpl * ti).collect();
        Ok(SiegelPoint { tau, sigma })
    }

    pub fn in_neighborhood(&self, p: &SiegelPoint, eps: f64) -> bool {
        let z = self.z_vector(p);
        let zz = self.lattice.inner_complex(&z, &z).re;
        let zl = self.lattice.inner_complex(&z, &self.ell.to_complex()).norm_sqr();
        zz / zl * self.ell_prime_ell.to_complex().norm_sqr() > 1.0 / eps
    }
}

fn euclid_quotient(x: &FieldElem, y: &FieldElem) -> FieldElem {
    let k = x.field();
    let approx = x.div(y).expect("nonzero divisor").round();
    let mut best: Option<(Rat, FieldElem)> = None;
    for da in -1..=1 {
        for db in -1..=1 {
            let q = &approx + &k.from_ints(da, db);
            let n = (x - &(&q * y)).norm();
            if best.as_ref().is_none_or(|(bn, _)| &n < bn) {
                best = Some((n, q));
            }
        }
    }
    best.unwrap().1
}

/// O_k-basis of the kernel of `x -> (<x, l>, <x, l'>)` on `O_k^r` by
/// Euclidean row reduction.
fn definite_kernel(lat: &HermitianLattice, ell: &LatticeVector, ell_prime: &LatticeVector) -> Result<Vec<LatticeVector>> {
    let k = lat.field();
    let r = lat.rank();
    let mut rows: Vec<(Vec<FieldElem>, LatticeVector)> = (0..r)
        .map(|i| {
            let e = LatticeVector::unit(k, r, i);
            (vec![lat.inner(&e, ell), lat.inner(&e, ell_prime)], e)
        })
        .collect();
    let mut pivoted = vec![false; r];
    for col in 0..2 {
        loop {
            let active: Vec<usize> = (0..r)
                .filter(|&i| !pivoted[i] && !rows[i].0[col].is_zero())
                .collect();
            let Some(&p) = active.iter().min_by_key(|&&i| rows[i].0[col].norm()) else {
                break;
            };
            if active.len() == 1 {
                pivoted[p] = true;
                break;
            }
            let pivot = rows[p].clone();
            let pivot_norm = pivot.0[col].norm();
            for &i in &active {
                if i == p {
                    continue;
                }
                let q = euclid_quotient(&rows[i].0[col], &pivot.0[col]);
                for c in 0..2 {
                    let s = &q * &pivot.0[c];
                    rows[i].0[c] -= &s;
                }
                rows[i].1 = rows[i].1.sub(&pivot.1.scale(&q));
                if rows[i].0[col].norm() >= pivot_norm {
                    return Err(Error::NotEuclidean(k.disc()));
                }
            }
        }
    }
    Ok((0..r).filter(|&i| !pivoted[i]).map(|i| rows[i].1.clone()).collect())
}

fn is_primitive(ell: &LatticeVector) -> bool {
    if !ell.is_integral() || ell.is_zero() {
        return false;
    }
    let k = ell.coords()[0].field();
    let gens: IntMat = ell
        .coords()
        .iter()
        .flat_map(|c| [c.clone(), c * &k.zeta()])
        .map(|c| vec![c.a().to_integer(), c.b().to_integer()])
        .collect();
    let h = linalg::hnf_basis(&gens, 2);
    h.len() == 2 && linalg::rat_det(&linalg::to_rat(&h)).abs().is_one()
}

pub fn build_cusp(lattice: HermitianLattice, ell: LatticeVector, ell_prime: LatticeVector) -> Result<CuspData> {
    let k = lattice.field();
    let r = lattice.rank();
    lattice.check_even()?;
    if r < 3 {
        return Err(Error::InvalidCusp("lattice rank must be at least 3".into()));
    }
    lattice.check_signature((1, r - 1))?;
    if ell.len() != r || ell_prime.len() != r {
        return Err(Error::InvalidCusp("cusp vectors have the wrong length".into()));
    }
    if !lattice.norm(&ell).is_zero() {
        return Err(Error::InvalidCusp(format!("l is not isotropic: Q(l) = {}", lattice.norm(&ell))));
    }
    if !is_primitive(&ell) {
        return Err(Error::InvalidCusp("l is not a primitive lattice vector".into()));
    }
    if !lattice.in_dual(&ell_prime) {
        return Err(Error::InvalidCusp("l' is not in the dual lattice".into()));
    }
    if !lattice.norm(&ell_prime).is_zero() {
        return Err(Error::InvalidCusp(format!(
            "l' is not isotropic: Q(l') = {}",
            lattice.norm(&ell_prime)
        )));
    }
    let pairing = lattice.inner(&ell, &ell_prime);
    if pairing != k.delta_inv() {
        return Err(Error::InvalidCusp(format!(
            "<l, l'> = {pairing}, expected delta^-1 = {}",
            k.delta_inv()
        )));
    }
    let disc = lattice.discriminant_group()?;

    let definite_basis = definite_kernel(&lattice, &ell, &ell_prime)?;
    if definite_basis.len() != r - 2 {
        return Err(Error::Consistency("definite part has the wrong rank".into()));
    }
    let n = r - 2;
    let dgram: Vec<Vec<FieldElem>> = (0..n)
        .map(|i| (0..n).map(|j| lattice.inner(&definite_basis[i], &definite_basis[j])).collect())
        .collect();
    let definite = HermitianLattice::new(k, dgram.clone())?;
    definite.check_signature((0, n))?;
    let definite_disc = definite.discriminant_group()?;
    let definite_gram_inv = field_mat_inverse(k, &dgram).ok_or(Error::Degenerate)?;

    let images: Vec<FieldElem> = (0..2 * r)
        .map(|i| lattice.inner(&lattice.z_basis_vector(i), &ell))
        .collect();
    let re2: Vec<Rat> = images.iter().map(|x| x.re() * int(2)).collect();
    let imd: Vec<Rat> = images.iter().map(|x| x.im_times_abs_delta()).collect();
    let m1 = rat_gcd_all(&re2);
    let m2 = rat_gcd_all(&imd);

    let mut cusp = CuspData {
        lattice,
        disc,
        ell,
        ell_prime,
        definite_basis,
        definite,
        definite_disc,
        definite_gram_inv,
        m1,
        m2,
        l_script: Vec::new(),
        box_l_script: Vec::new(),
        lifts: BTreeMap::new(),
        ell_prime_ell: pairing.conj(),
    };

    let a_mat: RatMat = vec![
        images.iter().map(|x| x.a().clone()).collect(),
        images.iter().map(|x| x.b().clone()).collect(),
    ];
    for beta in 0..cusp.disc.order() {
        let rep = cusp.disc.rep(beta).clone();
        let target = cusp.lattice.inner(&rep, &cusp.ell);
        let in_box = (target.re() * int(2) / &cusp.m1).is_integer()
            && (target.im_times_abs_delta() / &cusp.m2).is_integer();
        if in_box {
            cusp.box_l_script.push(beta);
        }
        let Some(c) = linalg::solve_integer(&a_mat, &[target.a().clone(), target.b().clone()], 2 * r) else {
            continue;
        };
        let x = cusp.lattice.from_z(&c.into_iter().map(Rat::from_integer).collect::<Vec<_>>());
        let orth = rep.sub(&x);
        let dec = cusp.decompose(&orth);
        if !dec.ell_prime.is_zero() {
            return Err(Error::Consistency("lift is not orthogonal to l".into()));
        }
        let pi = cusp.definite_disc.index_of(&dec.definite)?;
        let w = cusp.definite_disc.rep(pi).clone();
        let ell_coeff = dec.ell.frac();
        let beta_dot = cusp.ell.scale(&ell_coeff).add(&cusp.to_ambient(&w));
        if !beta_dot.sub(&rep).is_integral() {
            return Err(Error::Consistency("lift left its coset".into()));
        }
        cusp.l_script.push(beta);
        cusp.lifts.insert(
            beta,
            Lift {
                beta_dot,
                ell_coeff,
                definite: w,
                pi,
            },
        );
    }
    Ok(cusp)
}

#[derive(Clone, Debug)]
pub struct HeisenbergParams {
    n: Rat,
    basis: Vec<LatticeVector>,
    basis_z: IntMat,
    basis_inv: RatMat,
    index: BigInt,
}

const MAX_STABILIZER_SEARCH: usize = 1 << 20;

impl HeisenbergParams {
    /// Generator `N` of the central part of the stabilizer.
    pub fn n(&self) -> &Rat {
        &self.n
    }

    /// Z-basis of `D_{l,Gamma}` in coordinates of the basis of `D`.
    pub fn basis(&self) -> &[LatticeVector] {
        &self.basis
    }

    /// Index of `D_{l,Gamma}` in `D`.
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    pub fn contains_t(&self, cusp: &CuspData, t: &LatticeVector) -> bool {
        if t.len() != cusp.n() {
            return false;
        }
        let x = cusp.definite.to_z(t);
        let m = self.basis_inv.len();
        (0..m).all(|j| {
            let c: Rat = x.iter().zip(&self.basis_inv).map(|(xi, row)| xi * &row[j]).sum();
            c.is_integer()
        })
    }

    pub fn contains(&self, cusp: &CuspData, g: &HeisenbergElem) -> bool {
        (&g.h / &self.n).is_integer() && self.contains_t(cusp, &g.t)
    }

    /// `[k N, sum c_i t_i]`.
    pub fn element(&self, k: i64, coeffs: &[i64]) -> HeisenbergElem {
        let field = self.basis[0].coords()[0].field();
        let len = self.basis[0].len();
        let mut t = LatticeVector::zero(field, len);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            t = t.add(&b.scale_rat(&int(*c)));
        }
        HeisenbergElem::new(&self.n * int(k), t)
    }

    /// Explicit parameters, validated for containment in `D` and closure.
    pub fn from_override(cusp: &CuspData, n: Rat, basis: Vec<LatticeVector>) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        let dim = 2 * cusp.n();
        if basis.len() != dim || basis.iter().any(|b| b.len() != cusp.n() || !b.is_integral()) {
            return Err(Error::InvalidArgument(format!(
                "D_sub needs {dim} vectors in D with integral coordinates"
            )));
        }
        let basis_z: IntMat = basis
            .iter()
            .map(|b| cusp.definite.to_z(b).iter().map(|x| x.to_integer()).collect())
            .collect();
        Self::assemble(cusp, n, basis_z)
    }

    fn assemble(cusp: &CuspData, n: Rat, basis_z: IntMat) -> Result<Self> {
        let rat_basis = linalg::to_rat(&basis_z);
        let basis_inv = linalg::rat_inverse(&rat_basis)
            .ok_or_else(|| Error::InvalidArgument("D_sub basis is not of full rank".into()))?;
        let index = linalg::rat_det(&rat_basis).abs().to_integer();
        let basis: Vec<LatticeVector> = rat_basis.iter().map(|row| cusp.definite.from_z(row)).collect();
        for a in &basis {
            for b in &basis {
                let c = cusp.definite.inner(b, a).im_over_abs_delta();
                if !(c / &n).is_integer() {
                    return Err(Error::InvalidArgument(format!(
                        "closure fails: Im<t',t>/|delta| for t = {a}, t' = {b} is not in N Z"
                    )));
                }
            }
        }
        Ok(HeisenbergParams {
            n,
            basis,
            basis_z,
            basis_inv,
            index,
        })
    }

    pub fn basis_z(&self) -> &IntMat {
        &self.basis_z
    }
}

/// `N` and `D_{l,Gamma}` for the discriminant kernel of `L`.
pub fn derive_heisenberg_params(cusp: &CuspData) -> Result<HeisenbergParams> {
    let lat = &cusp.lattice;
    let k = lat.field();
    let dual = lat.dual_z_basis();
    let b_gens: Vec<FieldElem> = dual.iter().map(|v| lat.inner(v, &cusp.ell)).collect();

    let delta = k.delta();
    let scaled: Vec<Rat> = b_gens
        .iter()
        .flat_map(|x| {
            let y = &delta * x;
            [y.a().clone(), y.b().clone()]
        })
        .collect();
    let n0 = rat_gcd_all(&scaled).recip();

    let n = cusp.n();
    let dim = 2 * n;
    let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let t = cusp.to_ambient(&cusp.definite.z_basis_vector(c));
        let mut col = Vec::new();
        for (v, vl) in dual.iter().zip(&b_gens) {
            let vt = lat.inner(v, &t);
            let w = t.scale(vl).sub(&cusp.ell.scale(&vt));
            col.extend(lat.to_z(&w));
        }
        columns.push(col);
    }
    let rows = columns[0].len();
    let r_mat: RatMat = (0..rows).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let lambda_lin = linalg::preimage_lattice(&r_mat, dim);
    if lambda_lin.len() != dim {
        return Err(Error::Consistency("translation lattice is not of full rank".into()));
    }

    let plain: Vec<Rat> = b_gens.iter().flat_map(|x| [x.a().clone(), x.b().clone()]).collect();
    let kq = int(2) / rat_gcd_all(&plain);
    let k_int = kq.numer().clone();

    let gens = if k_int.is_one() {
        lambda_lin.clone()
    } else {
        stabilizer_generators(cusp, &lambda_lin, &k_int)
    };
    let basis_z = linalg::hnf_basis(&gens, dim);
    let params = HeisenbergParams::assemble(cusp, n0.clone(), basis_z)?;

    for t in &params.basis {
        if !cusp.in_discriminant_kernel(&HeisenbergElem::translation(t.clone())) {
            return Err(Error::Consistency(format!("[0, {t}] is not in the discriminant kernel")));
        }
    }
    let central = HeisenbergElem::central(k, n, n0.clone());
    if !cusp.in_discriminant_kernel(&central) {
        return Err(Error::Consistency("[N, 0] is not in the discriminant kernel".into()));
    }
    let finer = HeisenbergElem::central(k, n, &n0 / int(2));
    if cusp.in_discriminant_kernel(&finer) {
        return Err(Error::Consistency("N is not minimal".into()));
    }
    Ok(params)
}

/// Generators of the stabilizer of `S = {t : K | Q(t)}` inside `lambda / K lambda`,
/// together with `K lambda`. The stabilizer is `S` intersected with the
/// `K`-orthogonal of the span of `S`.
fn stabilizer_generators(cusp: &CuspData, lambda: &IntMat, k_int: &BigInt) -> IntMat {
    let dim = lambda.len();
    let scaled: IntMat = lambda
        .iter()
        .map(|row| row.iter().map(|x| x * k_int).collect())
        .collect();
    let Some(kk) = k_int.to_i64() else { return scaled };
    let size = (kk as u128).checked_pow(dim as u32);
    let size = match size {
        Some(s) if s <= MAX_STABILIZER_SEARCH as u128 => s as usize,
        _ => return scaled,
    };
    let t_d = cusp.definite.trace_gram();
    let lam_rat: Vec<Vec<Rat>> = lambda.iter().map(|r| r.iter().cloned().map(Rat::from_integer).collect()).collect();
    // Gram of the trace form on the rows of lambda, reduced mod 2K.
    let modulus = 2 * kk;
    let gram: Vec<Vec<i64>> = lam_rat
        .iter()
        .map(|a| {
            let ta = linalg::mat_vec_rat(t_d, a);
            lam_rat
                .iter()
                .map(|b| {
                    let x: Rat = b.iter().zip(&ta).map(|(u, v)| u * v).sum();
                    x.to_integer().mod_floor(&BigInt::from(modulus)).to_i64().unwrap()
                })
                .collect()
        })
        .collect();
    let decode = |mut idx: usize| -> Vec<i64> {
        let mut a = vec![0i64; dim];
        for x in a.iter_mut() {
            *x = (idx % kk as usize) as i64;
            idx /= kk as usize;
        }
        a
    };
    let pair = |a: &[i64], b: &[i64]| -> i64 {
        let mut acc: i128 = 0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                acc += (*ai as i128) * (gram[i][j] as i128) * (*bj as i128);
            }
        }
        acc.rem_euclid(modulus as i128) as i64
    };
    let members: Vec<Vec<i64>> = (0..size)
        .map(decode)
        .filter(|a| pair(a, a) == 0)
        .collect();

    let span = ModSpan::spanned(dim, kk, &members);
    let stable: Vec<Vec<i64>> = members
        .into_iter()
        .filter(|h| span.rows.iter().all(|g| pair(h, g) % kk == 0))
        .collect();
    let stab = ModSpan::spanned(dim, kk, &stable);

    let mut gens = scaled;
    for a in &stab.rows {
        let mut v = vec![BigInt::zero(); dim];
        for (ai, row) in a.iter().zip(lambda) {
            for (vj, x) in v.iter_mut().zip(row) {
                *vj += x * BigInt::from(*ai);
            }
        }
        gens.push(v);
    }
    gens
}

/// A lattice between `K Z^n` and `Z^n`, kept as a row HNF with pivots dividing `K`.
struct ModSpan {
    rows: Vec<Vec<i64>>,
}

impl ModSpan {
    fn spanned(dim: usize, k: i64, vectors: &[Vec<i64>]) -> Self {
        let mut span = ModSpan {
            rows: (0..dim)
                .map(|i| {
                    let mut r = vec![0; dim];
                    r[i] = k;
                    r
                })
                .collect(),
        };
        for v in vectors {
            if !span.contains(v) {
                let mut gens: IntMat = span.rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
                gens.push(v.iter().map(|&x| BigInt::from(x)).collect());
                span.rows = linalg::hnf_basis(&gens, dim)
                    .into_iter()
                    .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
                    .collect();
            }
        }
        span
    }

    fn contains(&self, v: &[i64]) -> bool {
        let mut w = v.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let p = row[i];
            if w[i].rem_euclid(p) != 0 {
                return false;
            }
            let q = w[i].div_euclid(p);
            for (wj, rj) in w.iter_mut().zip(row) {
                *wj -= q * rj;
            }
        }
        true
    }
}
