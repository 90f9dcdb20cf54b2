//! Built-in example lattices of the form `H ⊕ D`, where `H` is the hyperbolic
//! plane spanned by `l`, `l'` with `<l, l'> = delta^{-1}` and `D` is negative
//! definite.

use crate::cusp::CuspData;
use crate::error::Result;
use crate::hlattice::{HermitianLattice, LatticeVector};
use crate::qfield::{int, rat, FieldElem, FieldSpec};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub lattice: HermitianLattice,
    pub ell: LatticeVector,
    pub ell_prime: LatticeVector,
}

impl Fixture {
    pub fn cusp(&self) -> Result<CuspData> {
        CuspData::new(self.lattice.clone(), self.ell.clone(), self.ell_prime.clone())
    }
}

pub fn hyperbolic_sum(name: &str, field: FieldSpec, definite: &[Vec<FieldElem>]) -> Result<Fixture> {
    let n = definite.len();
    let r = n + 2;
    let di = field.delta_inv();
    let mut gram = vec![vec![field.zero(); r]; r];
    gram[0][1] = di.clone();
    gram[1][0] = di.conj();
    for i in 0..n {
        for j in 0..n {
            gram[i + 2][j + 2] = definite[i][j].clone();
        }
    }
    Ok(Fixture {
        name: name.to_string(),
        lattice: HermitianLattice::new(field, gram)?,
        ell: LatticeVector::unit(field, r, 0),
        ell_prime: LatticeVector::unit(field, r, 1),
    })
}

fn diagonal(field: FieldSpec, diag: &[i64]) -> Vec<Vec<FieldElem>> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { field.rational(int(diag[i])) } else { field.zero() })
                .collect()
        })
        .collect()
}

fn field(d: i64) -> FieldSpec {
    FieldSpec::new(d).expect("fundamental discriminant")
}

/// `d = -4`, `D = (O_k, -x conj(y))`.
pub fn gaussian_n1() -> Fixture {
    let k = field(-4);
    hyperbolic_sum("gaussian-n1", k, &diagonal(k, &[-1])).unwrap()
}

/// `d = -3`, `D = (O_k, -x conj(y))`.
pub fn eisenstein_n1() -> Fixture {
    let k = field(-3);
    hyperbolic_sum("eisenstein-n1", k, &diagonal(k, &[-1])).unwrap()
}

/// `d = -7`, `D = (O_k, -x conj(y))`.
pub fn d7_n1() -> Fixture {
    let k = field(-7);
    hyperbolic_sum("d7-n1", k, &diagonal(k, &[-1])).unwrap()
}

/// `d = -4`, `D = O_k^2` with Gram `diag(-1, -1)`.
pub fn gaussian_n2() -> Fixture {
    let k = field(-4);
    hyperbolic_sum("gaussian-n2", k, &diagonal(k, &[-1, -1])).unwrap()
}

/// `d = -3`, `D = O_k^2` with Gram `[[-1, delta^-1], [-delta^-1, -1]]`.
pub fn eisenstein_n2() -> Fixture {
    let k = field(-3);
    let di = k.delta_inv();
    let d = vec![
        vec![k.from_ints(-1, 0), di.clone()],
        vec![di.conj(), k.from_ints(-1, 0)],
    ];
    hyperbolic_sum("eisenstein-n2", k, &d).unwrap()
}

/// `d = -4`, `D` a unimodular rank-4 Gaussian lattice (an E8 lattice over Z).
pub fn gaussian_e8() -> Fixture {
    let k = field(-4);
    let h = k.elem(rat(-1, 2), int(0));
    let x = k.elem(rat(-1, 2), rat(-1, 2));
    let mut d = diagonal(k, &[-1, -1, -1, -1]);
    d[0][3] = h.clone();
    d[3][0] = h.clone();
    d[1][2] = h.clone();
    d[2][1] = h;
    d[2][3] = x.clone();
    d[3][2] = x.conj();
    hyperbolic_sum("gaussian-e8", k, &d).unwrap()
}

pub fn all() -> Vec<Fixture> {
    vec![
        gaussian_n1(),
        eisenstein_n1(),
        d7_n1(),
        gaussian_n2(),
        eisenstein_n2(),
        gaussian_e8(),
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{smith_normal_form, IntMat};

    #[test]
    fn gaussian_e8_is_unimodular() {
        let f = gaussian_e8();
        let t: IntMat = f
            .lattice
            .trace_gram()
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        let s = smith_normal_form(&t, 12, 12);
        assert!(s.diag.iter().all(|d| *d == 1.into()));
        assert_eq!(f.lattice.discriminant_group().unwrap().order(), 1);
    }

    #[test]
    fn all_fixtures_build_cusps() {
        for f in all() {
            f.cusp().unwrap();
        }
    }
}
