use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{HermitianLattice, LatticeVector};
use crate::error::{Error, Result};
use crate::qfield::{int, rat_to_f64, Rat};

/// All `lambda` in the coset `gamma + L` with `Q(lambda) = m`, for a negative
/// definite integral lattice `L`, sorted lexicographically.
pub fn enumerate_norm_coset(
    lat: &HermitianLattice,
    gamma: &LatticeVector,
    m: &Rat,
) -> Result<Vec<LatticeVector>> {
    if gamma.len() != lat.rank() {
        return Err(Error::Shape("coset representative has the wrong length".into()));
    }
    if !lat.is_integral() {
        return Err(Error::NotIntegral("enumeration needs an integral lattice".into()));
    }
    lat.check_signature((0, lat.rank()))?;
    if !lat.in_dual(gamma) {
        return Err(Error::NotInDual);
    }
    if m.is_positive() {
        return Err(Error::InvalidArgument(format!("norm {m} must be non-positive on a negative definite lattice")));
    }
    if !(lat.norm(gamma) - m).is_integer() && lat.is_even() {
        return Ok(Vec::new());
    }

    let g = lat.to_z(gamma);
    let n = g.len();
    let t = lat.trace_gram();
    // x^T A x = -2 m with A = -T positive definite.
    let a: Vec<Vec<f64>> = t.iter().map(|row| row.iter().map(|x| -rat_to_f64(x)).collect()).collect();
    let q = cholesky_form(&a);
    let gf: Vec<f64> = g.iter().map(rat_to_f64).collect();
    let radius = -2.0 * rat_to_f64(m);
    let bound = radius * (1.0 + 1e-9) + 1e-9;

    let top = n - 1;
    let (lo, hi) = range_at(&q, top, &gf, &[], 0.0, bound);
    let tops: Vec<i64> = (lo..=hi).collect();
    let candidates: Vec<Vec<i64>> = tops
        .par_iter()
        .flat_map_iter(|&c_top| {
            let mut out = Vec::new();
            let mut c = vec![0i64; n];
            c[top] = c_top;
            let x_top = c_top as f64 + gf[top];
            let s = q[top][top] * x_top * x_top;
            if s <= bound {
                if top == 0 {
                    out.push(c.clone());
                } else {
                    descend(&q, &gf, top - 1, s, bound, &mut c, &mut out);
                }
            }
            out
        })
        .collect();

    let target = m * int(2);
    let mut found: Vec<LatticeVector> = candidates
        .into_par_iter()
        .filter_map(|c| {
            let x: Vec<Rat> = c.iter().zip(&g).map(|(ci, gi)| int(*ci) + gi).collect();
            let mut val = Rat::zero();
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for (j, xj) in x.iter().enumerate() {
                    if !t[i][j].is_zero() && !xj.is_zero() {
                        val += xi * &t[i][j] * xj;
                    }
                }
            }
            (val == target).then(|| lat.from_z(&x))
        })
        .collect();
    found.sort();
    Ok(found)
}

/// Decomposition `x^T A x = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2`.
fn cholesky_form(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut q = a.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    q
}

fn range_at(q: &[Vec<f64>], i: usize, g: &[f64], c: &[i64], partial: f64, bound: f64) -> (i64, i64) {
    let n = q.len();
    let mut center = 0.0;
    for j in i + 1..n {
        center -= q[i][j] * (c[j] as f64 + g[j]);
    }
    let rem = bound - partial;
    if rem < 0.0 {
        return (1, 0);
    }
    let r = (rem / q[i][i]).sqrt();
    let lo = (center - r - g[i] - 1e-9).ceil() as i64;
    let hi = (center + r - g[i] + 1e-9).floor() as i64;
    (lo, hi)
}

fn descend(
    q: &[Vec<f64>],
    g: &[f64],
    i: usize,
    partial: f64,
    bound: f64,
    c: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let n = q.len();
    let mut center = 0.0;
    for j in i + 1..n {
        center -= q[i][j] * (c[j] as f64 + g[j]);
    }
    let rem = bound - partial;
    if rem < 0.0 {
        return;
    }
    let r = (rem / q[i][i]).sqrt();
    let lo = (center - r - g[i] - 1e-9).ceil() as i64;
    let hi = (center + r - g[i] + 1e-9).floor() as i64;
    for ci in lo..=hi {
        let x = ci as f64 + g[i] - center;
        let s = partial + q[i][i] * x * x;
        if s > bound {
            continue;
        }
        c[i] = ci;
        if i == 0 {
            out.push(c.clone());
        } else {
            descend(q, g, i - 1, s, bound, c, out);
        }
    }
    c[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hlattice::diagonal_lattice;
    use crate::qfield::{rat, FieldSpec};

    #[test]
    fn gaussian_units() {
        let k = FieldSpec::new(-4).unwrap();
        let lat = diagonal_lattice(k, &[-1]).unwrap();
        let zero = LatticeVector::zero(k, 1);
        let v = enumerate_norm_coset(&lat, &zero, &int(-1)).unwrap();
        assert_eq!(v.len(), 4);
        let v2 = enumerate_norm_coset(&lat, &zero, &int(-2)).unwrap();
        assert_eq!(v2.len(), 4);
        let v3 = enumerate_norm_coset(&lat, &zero, &int(-3)).unwrap();
        assert!(v3.is_empty());
        let v5 = enumerate_norm_coset(&lat, &zero, &int(-5)).unwrap();
        assert_eq!(v5.len(), 8);
        let zero_norm = enumerate_norm_coset(&lat, &zero, &int(0)).unwrap();
        assert_eq!(zero_norm, vec![zero]);
    }

    #[test]
    fn shifted_coset() {
        let k = FieldSpec::new(-4).unwrap();
        let lat = diagonal_lattice(k, &[-1]).unwrap();
        let half = LatticeVector::new(vec![k.elem(rat(1, 2), rat(0, 1))]);
        let v = enumerate_norm_coset(&lat, &half, &rat(-1, 4)).unwrap();
        assert_eq!(v.len(), 2);
        let wrong = enumerate_norm_coset(&lat, &half, &rat(-1, 2)).unwrap();
        assert!(wrong.is_empty());
    }

    #[test]
    fn rejects_indefinite() {
        let k = FieldSpec::new(-4).unwrap();
        let lat = diagonal_lattice(k, &[-1, 1]).unwrap();
        let zero = LatticeVector::zero(k, 2);
        assert!(enumerate_norm_coset(&lat, &zero, &int(-1)).is_err());
    }
}
