//! Hermitian lattices `L = O_k^r` with a hermitian Gram matrix, their trace
//! forms, duals and discriminant groups.

mod cache;
mod enumerate;

pub use cache::{CacheKey, CacheStats, NormCache};
pub use enumerate::enumerate_norm_coset;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMat, RatMat};
use crate::qfield::{frac, int, FieldElem, FieldSpec, Rat};

/// Coordinates with respect to the O_k-basis of a lattice. Ordered
/// lexicographically by the `(a, b)` coordinates of each entry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector {
    coords: Vec<FieldElem>,
}

impl LatticeVector {
    pub fn new(coords: Vec<FieldElem>) -> Self {
        LatticeVector { coords }
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        Self::new(vec![field.zero(); n])
    }

    pub fn unit(field: FieldSpec, n: usize, i: usize) -> Self {
        let mut v = Self::zero(field, n);
        v.coords[i] = field.one();
        v
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|x| x.is_integral())
    }

    pub fn add(&self, o: &LatticeVector) -> LatticeVector {
        assert_eq!(self.len(), o.len());
        Self::new(self.coords.iter().zip(&o.coords).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, o: &LatticeVector) -> LatticeVector {
        assert_eq!(self.len(), o.len());
        Self::new(self.coords.iter().zip(&o.coords).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self) -> LatticeVector {
        Self::new(self.coords.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, c: &FieldElem) -> LatticeVector {
        Self::new(self.coords.iter().map(|x| c * x).collect())
    }

    pub fn scale_rat(&self, c: &Rat) -> LatticeVector {
        Self::new(self.coords.iter().map(|x| x.scale(c)).collect())
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coords.iter().map(|x| x.to_complex()).collect()
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Parses the format produced by `Display` for `LatticeVector`.
pub fn parse_vector(field: FieldSpec, s: &str) -> Option<LatticeVector> {
    let body = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    if body.trim().is_empty() {
        return Some(LatticeVector::new(Vec::new()));
    }
    body.split(';')
        .map(|t| field.parse_elem(t))
        .collect::<Option<Vec<_>>>()
        .map(LatticeVector::new)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianLattice {
    field: FieldSpec,
    gram: Vec<Vec<FieldElem>>,
    trace_gram: RatMat,
}

impl HermitianLattice {
    pub fn new(field: FieldSpec, gram: Vec<Vec<FieldElem>>) -> Result<Self> {
        let r = gram.len();
        if gram.iter().any(|row| row.len() != r) {
            return Err(Error::Shape("gram matrix is not square".into()));
        }
        if gram.iter().flatten().any(|x| x.field() != field) {
            return Err(Error::Shape("gram entries belong to a different field".into()));
        }
        for i in 0..r {
            for j in i..r {
                if gram[j][i] != gram[i][j].conj() {
                    return Err(Error::NotHermitian {
                        row: j,
                        col: i,
                        found: gram[j][i].to_string(),
                        expected: gram[i][j].conj().to_string(),
                    });
                }
            }
        }
        let trace_gram = compute_trace_gram(field, &gram);
        if r == 0 || linalg::rat_det(&trace_gram).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(HermitianLattice {
            field,
            gram,
            trace_gram,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<FieldElem>] {
        &self.gram
    }

    /// Gram matrix of `Tr <.,.>` on the Z-basis `b_1, zeta b_1, b_2, ...`.
    pub fn trace_gram(&self) -> &RatMat {
        &self.trace_gram
    }

    /// `<x, y> = sum x_i G_ij conj(y_j)`.
    pub fn inner(&self, x: &LatticeVector, y: &LatticeVector) -> FieldElem {
        let mut acc = self.field.zero();
        for (i, xi) in x.coords().iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coords().iter().enumerate() {
                if yj.is_zero() || self.gram[i][j].is_zero() {
                    continue;
                }
                acc += &(xi * &self.gram[i][j] * yj.conj());
            }
        }
        acc
    }

    /// `Q(x) = <x, x>`.
    pub fn norm(&self, x: &LatticeVector) -> Rat {
        self.inner(x, x).a().clone()
    }

    /// `Tr <x, y>`.
    pub fn bilinear(&self, x: &LatticeVector, y: &LatticeVector) -> Rat {
        self.inner(x, y).trace()
    }

    pub fn gram_complex(&self) -> Vec<Vec<Complex64>> {
        self.gram
            .iter()
            .map(|row| row.iter().map(|x| x.to_complex()).collect())
            .collect()
    }

    pub fn inner_complex(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += xi * self.gram[i][j].to_complex() * yj.conj();
            }
        }
        acc
    }

    /// Coordinates with respect to the Z-basis `b_1, zeta b_1, ...`.
    pub fn to_z(&self, x: &LatticeVector) -> Vec<Rat> {
        x.coords()
            .iter()
            .flat_map(|c| [c.a().clone(), c.b().clone()])
            .collect()
    }

    pub fn from_z(&self, c: &[Rat]) -> LatticeVector {
        LatticeVector::new(
            c.chunks(2)
                .map(|p| self.field.elem(p[0].clone(), p[1].clone()))
                .collect(),
        )
    }

    pub fn z_basis_vector(&self, k: usize) -> LatticeVector {
        let mut c = vec![Rat::zero(); 2 * self.rank()];
        c[k] = Rat::one();
        self.from_z(&c)
    }

    pub fn is_integral(&self) -> bool {
        self.trace_gram.iter().flatten().all(|x| x.is_integer())
    }

    pub fn is_even(&self) -> bool {
        self.is_integral() && (0..self.rank()).all(|i| self.gram[i][i].a().is_integer())
    }

    pub fn check_even(&self) -> Result<()> {
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                if !self.gram[i][j].in_inverse_different() {
                    return Err(Error::NotIntegral(format!(
                        "entry ({i},{j}) = {} is not in the inverse different",
                        self.gram[i][j]
                    )));
                }
            }
            if !self.gram[i][i].a().is_integer() {
                return Err(Error::NotEven(format!(
                    "diagonal entry {i} = {} is not an integer",
                    self.gram[i][i]
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        x.is_integral()
    }

    pub fn in_dual(&self, x: &LatticeVector) -> bool {
        (0..self.rank()).all(|i| {
            self.inner(x, &LatticeVector::unit(self.field, self.rank(), i))
                .in_inverse_different()
        })
    }

    /// An orthogonal k-basis `f_j` together with `Q(f_j)`.
    pub fn orthogonal_basis(&self) -> Result<Vec<(LatticeVector, Rat)>> {
        let r = self.rank();
        let mut pending: Vec<LatticeVector> =
            (0..r).map(|i| LatticeVector::unit(self.field, r, i)).collect();
        let mut out = Vec::with_capacity(r);
        while !pending.is_empty() {
            let pivot = match pending.iter().position(|v| !self.norm(v).is_zero()) {
                Some(p) => p,
                None => {
                    let pair = (0..pending.len()).find_map(|i| {
                        (0..pending.len())
                            .find(|&j| j != i && !self.inner(&pending[i], &pending[j]).is_zero())
                            .map(|j| (i, j))
                    });
                    let (i, j) = pair.ok_or(Error::Degenerate)?;
                    let c = self.inner(&pending[i], &pending[j]);
                    pending[i] = pending[i].add(&pending[j].scale(&c));
                    i
                }
            };
            let p = pending.remove(pivot);
            let q = self.norm(&p);
            let qf = self.field.rational(q.clone());
            for w in pending.iter_mut() {
                let c = self.inner(w, &p).div(&qf)?;
                *w = w.sub(&p.scale(&c));
            }
            out.push((p, q));
        }
        Ok(out)
    }

    /// `(positive, negative)` counts over C.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let basis = self.orthogonal_basis()?;
        let pos = basis.iter().filter(|(_, q)| q.is_positive()).count();
        Ok((pos, basis.len() - pos))
    }

    pub fn check_signature(&self, expected: (usize, usize)) -> Result<()> {
        let found = self.signature()?;
        if found != expected {
            return Err(Error::Signature { expected, found });
        }
        Ok(())
    }

    /// Z-basis of the dual lattice, dual to the Z-basis of `L` under `Tr <.,.>`.
    pub fn dual_z_basis(&self) -> Vec<LatticeVector> {
        let inv = linalg::rat_inverse(&self.trace_gram).expect("nondegenerate");
        inv.iter().map(|row| self.from_z(row)).collect()
    }

    pub fn discriminant_group(&self) -> Result<DiscriminantGroup> {
        DiscriminantGroup::new(self)
    }

    /// Hex digest identifying the field, the choice of zeta and the Gram matrix.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{};{};{};", self.field.disc(), self.field.zeta_re2(), self.rank()));
        for x in self.gram.iter().flatten() {
            h.update(format!("{},{};", x.a(), x.b()));
        }
        hex::encode(h.finalize())
    }

    pub fn negated(&self) -> HermitianLattice {
        let gram = self
            .gram
            .iter()
            .map(|row| row.iter().map(|x| -x).collect())
            .collect();
        HermitianLattice::new(self.field, gram).expect("negation keeps a valid lattice")
    }
}

fn compute_trace_gram(field: FieldSpec, gram: &[Vec<FieldElem>]) -> RatMat {
    let r = gram.len();
    let basis = [field.one(), field.zeta()];
    let mut t = vec![vec![Rat::zero(); 2 * r]; 2 * r];
    for i in 0..r {
        for j in 0..r {
            for p in 0..2 {
                for q in 0..2 {
                    t[2 * i + p][2 * j + q] = (&basis[p] * &gram[i][j] * basis[q].conj()).trace();
                }
            }
        }
    }
    t
}

const MAX_GROUP_ORDER: u64 = 1 << 22;

/// The finite group `L'/L` with canonical coset representatives.
///
/// Cosets are indexed in mixed radix by their coordinates with respect to the
/// invariant factors `d_1 | d_2 | ...` (only factors larger than one are kept);
/// index 0 is the trivial coset.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    lattice: HermitianLattice,
    factors: Vec<u64>,
    u_rows: IntMat,
    reps: Vec<LatticeVector>,
    q_mod1: Vec<Rat>,
}

impl DiscriminantGroup {
    fn new(lat: &HermitianLattice) -> Result<Self> {
        if !lat.is_integral() {
            return Err(Error::NotIntegral("trace form is not integral".into()));
        }
        let t = lat.trace_gram();
        let n = t.len();
        let ti: IntMat = t.iter().map(|row| row.iter().map(|x| x.to_integer()).collect()).collect();
        let snf = linalg::smith_normal_form(&ti, n, n);
        let mut factors = Vec::new();
        let mut u_rows = Vec::new();
        let mut u_inv_cols = Vec::new();
        for (i, d) in snf.diag.iter().enumerate() {
            if d > &BigInt::one() {
                factors.push(d.to_u64().ok_or_else(|| Error::InvalidArgument("discriminant group too large".into()))?);
                u_rows.push(snf.u[i].clone());
                u_inv_cols.push(snf.u_inv.iter().map(|row| row[i].clone()).collect::<Vec<_>>());
            }
        }
        let order = factors.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d));
        let order = match order {
            Some(o) if o <= MAX_GROUP_ORDER => o,
            _ => return Err(Error::InvalidArgument("discriminant group too large".into())),
        };
        let t_inv = linalg::rat_inverse(t).ok_or(Error::Degenerate)?;
        let mut reps = Vec::with_capacity(order as usize);
        for idx in 0..order {
            let c = mixed_radix(&factors, idx);
            let mut y = vec![BigInt::zero(); n];
            for (ci, col) in c.iter().zip(&u_inv_cols) {
                for k in 0..n {
                    y[k] += &col[k] * BigInt::from(*ci);
                }
            }
            let yr: Vec<Rat> = y.into_iter().map(Rat::from_integer).collect();
            let x: Vec<Rat> = linalg::mat_vec_rat(&t_inv, &yr).iter().map(frac).collect();
            reps.push(lat.from_z(&x));
        }
        let q_mod1 = reps.iter().map(|r| frac(&lat.norm(r))).collect();
        let g = DiscriminantGroup {
            lattice: lat.clone(),
            factors,
            u_rows,
            reps,
            q_mod1,
        };
        for (i, r) in g.reps.iter().enumerate() {
            if g.index_of(r)? != i {
                return Err(Error::Consistency("coset representative does not reproduce its index".into()));
            }
        }
        Ok(g)
    }

    pub fn lattice(&self) -> &HermitianLattice {
        &self.lattice
    }

    /// Invariant factors larger than one.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn rep(&self, i: usize) -> &LatticeVector {
        &self.reps[i]
    }

    pub fn reps(&self) -> &[LatticeVector] {
        &self.reps
    }

    /// `Q(gamma) mod 1` in `[0, 1)`; well defined when the lattice is even.
    pub fn q_mod1(&self, i: usize) -> &Rat {
        &self.q_mod1[i]
    }

    pub fn index_of(&self, x: &LatticeVector) -> Result<usize> {
        let lat = &self.lattice;
        let n = 2 * lat.rank();
        let mut y = Vec::with_capacity(n);
        for k in 0..n {
            let v = lat.bilinear(x, &lat.z_basis_vector(k));
            if !v.is_integer() {
                return Err(Error::NotInDual);
            }
            y.push(v.to_integer());
        }
        let coords: Vec<i64> = self
            .u_rows
            .iter()
            .zip(&self.factors)
            .map(|(row, &d)| {
                let w: BigInt = row.iter().zip(&y).map(|(a, b)| a * b).sum();
                w.mod_floor(&BigInt::from(d)).to_i64().unwrap()
            })
            .collect();
        Ok(self.index_of_coords(&coords))
    }

    pub fn coords_of(&self, idx: usize) -> Vec<i64> {
        mixed_radix(&self.factors, idx as u64)
    }

    pub fn index_of_coords(&self, coords: &[i64]) -> usize {
        let mut idx = 0u64;
        for (c, &d) in coords.iter().zip(&self.factors) {
            idx = idx * d + c.rem_euclid(d as i64) as u64;
        }
        idx as usize
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.coords_of(i), self.coords_of(j));
        let s: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        self.index_of_coords(&s)
    }

    pub fn neg(&self, i: usize) -> usize {
        let s: Vec<i64> = self.coords_of(i).iter().map(|x| -x).collect();
        self.index_of_coords(&s)
    }

    /// `Tr <gamma_i, gamma_j> mod 1`.
    pub fn bilinear_mod1(&self, i: usize, j: usize) -> Rat {
        frac(&self.lattice.bilinear(&self.reps[i], &self.reps[j]))
    }

    pub fn contains_index(&self, i: usize) -> bool {
        i < self.reps.len()
    }

    /// Exponent of the group (least common multiple of the factors).
    pub fn level(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &d| acc.lcm(&d))
    }
}

fn mixed_radix(factors: &[u64], mut idx: u64) -> Vec<i64> {
    let mut c = vec![0i64; factors.len()];
    for (k, &d) in factors.iter().enumerate().rev() {
        c[k] = (idx % d) as i64;
        idx /= d;
    }
    c
}

/// Inverse of a square matrix over `k`.
pub fn field_mat_inverse(field: FieldSpec, a: &[Vec<FieldElem>]) -> Option<Vec<Vec<FieldElem>>> {
    let n = a.len();
    let mut m: Vec<Vec<FieldElem>> = a.to_vec();
    let mut inv: Vec<Vec<FieldElem>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        inv.swap(p, c);
        let piv = m[c][c].inv().ok()?;
        for j in 0..n {
            m[c][j] = &m[c][j] * &piv;
            inv[c][j] = &inv[c][j] * &piv;
        }
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for j in 0..n {
                let s = &f * &m[c][j];
                m[r][j] -= &s;
                let s = &f * &inv[c][j];
                inv[r][j] -= &s;
            }
        }
    }
    Some(inv)
}

/// Lattice with Gram matrix given by rational-coefficient pairs `(a, b)`.
pub fn lattice_from_pairs(field: FieldSpec, entries: &[Vec<(Rat, Rat)>]) -> Result<HermitianLattice> {
    let gram = entries
        .iter()
        .map(|row| row.iter().map(|(a, b)| field.elem(a.clone(), b.clone())).collect())
        .collect();
    HermitianLattice::new(field, gram)
}

pub fn diagonal_lattice(field: FieldSpec, diag: &[i64]) -> Result<HermitianLattice> {
    let r = diag.len();
    let gram = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { field.rational(int(diag[i])) } else { field.zero() })
                .collect()
        })
        .collect();
    HermitianLattice::new(field, gram)
}
