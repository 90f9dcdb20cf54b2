//! Integer and rational linear algebra: Smith and Hermite normal forms,
//! integer kernels, preimage lattices and exact inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::qfield::Rat;

pub type IntMat = Vec<Vec<BigInt>>;
pub type RatMat = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> IntMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn rat_identity(n: usize) -> RatMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect()
}

pub fn to_rat(m: &[Vec<BigInt>]) -> RatMat {
    m.iter()
        .map(|row| row.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect()
}

pub fn mat_vec_int(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_vec_rat(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn mat_mul_int(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// `U * A * V = diag`, with `U`, `V` unimodular and `diag[i] | diag[i+1]`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub diag: Vec<BigInt>,
    pub u: IntMat,
    pub u_inv: IntMat,
    pub v: IntMat,
    pub rank: usize,
}

pub fn smith_normal_form(a: &[Vec<BigInt>], rows: usize, cols: usize) -> Snf {
    let mut a: IntMat = a.to_vec();
    let mut u = identity(rows);
    let mut u_inv = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    let mut rank = 0;

    for t in 0..steps {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, u_inv, v, rank, steps);
            };
            if pi != t {
                a.swap(pi, t);
                u.swap(pi, t);
                for row in u_inv.iter_mut() {
                    row.swap(pi, t);
                }
            }
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(pj, t);
                }
                for row in v.iter_mut() {
                    row.swap(pj, t);
                }
            }
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in 0..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                for j in 0..rows {
                    let s = &q * &u[t][j];
                    u[i][j] -= s;
                }
                for r in u_inv.iter_mut() {
                    let s = &q * &r[i];
                    r[t] += s;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for r in a.iter_mut() {
                    let s = &q * &r[t];
                    r[j] -= s;
                }
                for r in v.iter_mut() {
                    let s = &q * &r[t];
                    r[j] -= s;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero())
            });
            match bad {
                Some(i) => {
                    for j in 0..cols {
                        let s = a[i][j].clone();
                        a[t][j] += s;
                    }
                    for j in 0..rows {
                        let s = u[i][j].clone();
                        u[t][j] += s;
                    }
                    for r in u_inv.iter_mut() {
                        let s = r[t].clone();
                        r[i] -= s;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
            for r in u_inv.iter_mut() {
                r[t] = -&r[t];
            }
        }
        rank += 1;
    }
    finish(a, u, u_inv, v, rank, steps)
}

fn finish(a: IntMat, u: IntMat, u_inv: IntMat, v: IntMat, rank: usize, steps: usize) -> Snf {
    let diag = (0..steps).map(|i| a[i][i].clone()).collect();
    Snf {
        diag,
        u,
        u_inv,
        v,
        rank,
    }
}

/// Row Hermite normal form of the Z-span of `gens` (each of length `ncols`).
/// Returns the nonzero rows: a canonical basis of the span.
pub fn hnf_basis(gens: &[Vec<BigInt>], ncols: usize) -> IntMat {
    let mut rows: IntMat = gens
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut r = 0;
    for col in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let mut found = false;
        loop {
            let best = (r..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&i, &j| rows[i][col].abs().cmp(&rows[j][col].abs()));
            let Some(p) = best else { break };
            found = true;
            rows.swap(p, r);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[r][col]);
                for j in 0..ncols {
                    let s = &q * &rows[r][j];
                    rows[i][j] -= s;
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !found {
            continue;
        }
        if rows[r][col].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = rows[i][col].div_floor(&rows[r][col]);
            if q.is_zero() {
                continue;
            }
            for j in 0..ncols {
                let s = &q * &rows[r][j];
                rows[i][j] -= s;
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Z-basis of `{x in Z^n : A x = 0}` in Hermite normal form.
pub fn int_kernel(a: &[Vec<BigInt>], ncols: usize) -> IntMat {
    let rows = a.len();
    let snf = smith_normal_form(a, rows, ncols);
    let gens: IntMat = (snf.rank..ncols)
        .map(|j| snf.v.iter().map(|r| r[j].clone()).collect())
        .collect();
    hnf_basis(&gens, ncols)
}

/// Z-basis of `{x in Z^n : R x in Z^m}` for a rational `m x n` matrix `R`.
pub fn preimage_lattice(r: &[Vec<Rat>], ncols: usize) -> IntMat {
    let den = lcm_denominators(r.iter().flatten());
    let m = r.len();
    // [den R | den I] (x, y) = 0
    let big: IntMat = r
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out: Vec<BigInt> = row
                .iter()
                .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
                .collect();
            out.extend((0..m).map(|j| if i == j { den.clone() } else { BigInt::zero() }));
            out
        })
        .collect();
    let ker = int_kernel(&big, ncols + m);
    let gens: IntMat = ker.iter().map(|v| v[..ncols].to_vec()).collect();
    hnf_basis(&gens, ncols)
}

/// An integer solution of `A c = t` for rational `A`, if one exists.
pub fn solve_integer(a: &[Vec<Rat>], t: &[Rat], ncols: usize) -> Option<Vec<BigInt>> {
    let den = lcm_denominators(a.iter().flatten().chain(t.iter()));
    let dr = Rat::from_integer(den);
    let ai: IntMat = a
        .iter()
        .map(|row| row.iter().map(|x| (x * &dr).to_integer()).collect())
        .collect();
    let ti: Vec<BigInt> = t.iter().map(|x| (x * &dr).to_integer()).collect();
    let rows = a.len();
    let snf = smith_normal_form(&ai, rows, ncols);
    let s = mat_vec_int(&snf.u, &ti);
    let mut y = vec![BigInt::zero(); ncols];
    for i in 0..rows {
        if i < snf.rank {
            let (q, rem) = s[i].div_rem(&snf.diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !s[i].is_zero() {
            return None;
        }
    }
    Some(mat_vec_int(&snf.v, &y))
}

pub fn rat_inverse(a: &[Vec<Rat>]) -> Option<RatMat> {
    let n = a.len();
    let mut m: RatMat = a.to_vec();
    let mut inv = rat_identity(n);
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        inv.swap(p, c);
        let piv = m[c][c].recip();
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
                m[r][j] -= s;
                let s = &f * &inv[c][j];
                inv[r][j] -= s;
            }
        }
    }
    Some(inv)
}

pub fn rat_det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m: RatMat = a.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[c][c];
            for j in c..n {
                let s = &f * &m[c][j];
                m[r][j] -= s;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{int, rat};
    use proptest::prelude::*;

    fn im(rows: &[&[i64]]) -> IntMat {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn check_snf(a: &IntMat, rows: usize, cols: usize) {
        let s = smith_normal_form(a, rows, cols);
        let d = mat_mul_int(&mat_mul_int(&s.u, a), &s.v);
        for i in 0..rows {
            for j in 0..cols {
                if i == j {
                    assert_eq!(d[i][j], s.diag[i]);
                } else {
                    assert!(d[i][j].is_zero());
                }
            }
        }
        assert_eq!(mat_mul_int(&s.u, &s.u_inv), identity(rows));
        for w in s.diag.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        assert!(s.diag.iter().all(|x| !x.is_negative()));
        assert_eq!(s.diag.iter().filter(|x| !x.is_zero()).count(), s.rank);
        assert_eq!(rat_det(&to_rat(&s.v)).abs(), int(1));
    }

    #[test]
    fn snf_small() {
        let a = im(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        check_snf(&a, 3, 3);
        let s = smith_normal_form(&a, 3, 3);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        check_snf(&im(&[&[0, 0], &[0, 0]]), 2, 2);
        check_snf(&im(&[&[1, 2, 3]]), 1, 3);
        check_snf(&im(&[&[4], &[6]]), 2, 1);
    }

    proptest! {
        #[test]
        fn snf_random(entries in prop::collection::vec(-9i64..10, 12), rows in 1usize..4) {
            let cols = 12 / rows.max(1) ;
            let cols = cols.min(4);
            let a: IntMat = (0..rows)
                .map(|i| (0..cols).map(|j| BigInt::from(entries[i * cols + j])).collect())
                .collect();
            check_snf(&a, rows, cols);
        }

        #[test]
        fn kernel_is_kernel(entries in prop::collection::vec(-5i64..6, 8)) {
            let a: IntMat = (0..2)
                .map(|i| (0..4).map(|j| BigInt::from(entries[i * 4 + j])).collect())
                .collect();
            let k = int_kernel(&a, 4);
            for v in &k {
                prop_assert!(mat_vec_int(&a, v).iter().all(|x| x.is_zero()));
            }
            let rank = smith_normal_form(&a, 2, 4).rank;
            prop_assert_eq!(k.len(), 4 - rank);
        }
    }

    #[test]
    fn hnf_canonical() {
        let g = im(&[&[2, 0], &[0, 2], &[1, 1]]);
        let h = hnf_basis(&g, 2);
        assert_eq!(h, im(&[&[1, 1], &[0, 2]]));
        let g2 = im(&[&[1, 1], &[0, 2], &[4, 6]]);
        assert_eq!(hnf_basis(&g2, 2), h);
    }

    #[test]
    fn preimage_and_solve() {
        // {x : x0/2 + x1/3 in Z}
        let r = vec![vec![rat(1, 2), rat(1, 3)]];
        let b = preimage_lattice(&r, 2);
        assert_eq!(b.len(), 2);
        let det = rat_det(&to_rat(&b)).abs();
        assert_eq!(det, int(6));
        for v in &b {
            let x = Rat::from_integer(v[0].clone()) * rat(1, 2) + Rat::from_integer(v[1].clone()) * rat(1, 3);
            assert!(x.is_integer());
        }
        let a = vec![vec![int(2), int(4)], vec![int(0), int(3)]];
        let c = solve_integer(&a, &[int(6), int(3)], 2).unwrap();
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(1)]);
        assert!(solve_integer(&a, &[int(1), int(0)], 2).is_none());
    }

    #[test]
    fn inverse_and_det() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = rat_inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
        assert_eq!(rat_det(&a), int(1));
        assert!(rat_inverse(&[vec![int(1), int(2)], vec![int(2), int(4)]]).is_none());
    }
}
