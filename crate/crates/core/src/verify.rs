//! Seeded property suites over one cusp.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{random_element, trivializing_cochain_check, CochainForm};
use crate::cusp::{CuspData, HeisenbergParams, SiegelPoint};
use crate::error::{Error, Result};
use crate::hlattice::{LatticeVector, NormCache};
use crate::local_products::{
    automorphy_deviation, automorphy_exponent, chern_cocycle, chern_cocycle_via_f, expand_divisor, HeegnerCombo,
};
use crate::qfield::{e, int, Rat};
use crate::weil_theta::{build_theta, spanning_set, theta_modularity_check, WeilRep};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Cocycle,
    Automorphy,
    Weil,
    ThetaModularity,
    Cochain,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Cocycle,
        Suite::Automorphy,
        Suite::Weil,
        Suite::ThetaModularity,
        Suite::Cochain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cocycle => "cocycle",
            Suite::Automorphy => "automorphy",
            Suite::Weil => "weil",
            Suite::ThetaModularity => "theta-modularity",
            Suite::Cochain => "cochain",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s}")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    /// Product truncation `T` for the automorphy suite.
    pub truncation: u32,
    /// Replaces every default tolerance when set.
    pub tolerance: Option<f64>,
    /// Theta truncation; defaults by rank.
    pub theta_max_norm: Option<Rat>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            samples: 0,
            truncation: 40,
            tolerance: None,
            theta_max_norm: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Metric {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub metrics: Vec<Metric>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.metrics.iter().all(Metric::passed)
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

pub fn run_suite(
    cusp: &CuspData,
    params: &HeisenbergParams,
    cache: &NormCache,
    suite: Suite,
    config: &SuiteConfig,
) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tol = |default: f64| config.tolerance.unwrap_or(default);
    let samples = |default: usize| if config.samples == 0 { default } else { config.samples };
    let mut report = SuiteReport {
        suite,
        seed: config.seed,
        samples: 0,
        metrics: Vec::new(),
        failures: Vec::new(),
    };
    match suite {
        Suite::Cocycle => {
            let lambdas = sample_lambdas(cusp, cache, &mut rng, 8)?;
            let count = samples(1000);
            for i in 0..count {
                let lambda = lambdas.choose(&mut rng).expect("non-empty");
                let g: Vec<_> = (0..3).map(|_| random_element(cusp, params, &mut rng)).collect();
                let c = |a, b| chern_cocycle(cusp, params, lambda, a, b);
                let g01 = cusp.compose(&g[0], &g[1]);
                let g12 = cusp.compose(&g[1], &g[2]);
                let delta = c(&g[1], &g[2])? - c(&g01, &g[2])? + c(&g[0], &g12)? - c(&g[0], &g[1])?;
                if !delta.is_zero() {
                    report.failures.push(format!("sample {i}: coboundary {delta} at lambda {lambda}"));
                }
                if c(&g[0], &g[1])? != chern_cocycle_via_f(cusp, lambda, &g[0].t, &g[1].t) {
                    report.failures.push(format!("sample {i}: cocycle formulas differ at lambda {lambda}"));
                }
            }
            report.samples = count;
        }
        Suite::Automorphy => {
            let lambdas = sample_lambdas(cusp, cache, &mut rng, 8)?;
            let count = samples(20);
            let alt = cusp.field().zeta_re2() + 2;
            let mut max_dev = 0.0f64;
            let mut max_bound = 0.0f64;
            let mut max_zeta = 0.0f64;
            let mut done = 0;
            let mut attempts = 0;
            while done < count {
                attempts += 1;
                if attempts > 50 * count {
                    return Err(Error::Consistency("could not sample points away from the divisors".into()));
                }
                let lambda = lambdas.choose(&mut rng).expect("non-empty");
                let g = random_element(cusp, params, &mut rng);
                let p = automorphy_point(cusp, &mut rng);
                let (dev, bound) = match automorphy_deviation(cusp, lambda, &g, &p, config.truncation) {
                    Ok(x) => x,
                    Err(Error::DivisorHit(_)) => continue,
                    Err(e) => return Err(e),
                };
                if !bound.is_finite() || bound > 1e-10 {
                    continue;
                }
                let a = automorphy_exponent(cusp, lambda, &g, &p, cusp.field().zeta_re2())?;
                let b = automorphy_exponent(cusp, lambda, &g, &p, alt)?;
                max_zeta = max_zeta.max((e(b - a) - 1.0).norm());
                max_dev = max_dev.max(dev);
                max_bound = max_bound.max(bound);
                done += 1;
            }
            report.samples = done;
            report.metrics.push(Metric {
                name: "relative deviation".into(),
                value: max_dev,
                tolerance: tol(1e-8),
            });
            report.metrics.push(Metric {
                name: "truncation bound".into(),
                value: max_bound,
                tolerance: tol(1e-8),
            });
            report.metrics.push(Metric {
                name: "zeta dependence".into(),
                value: max_zeta,
                tolerance: tol(1e-12),
            });
        }
        Suite::Weil => {
            let rep = WeilRep::new(cusp.definite())?;
            let r = rep.relations();
            report.samples = rep.dim();
            report.metrics.push(Metric {
                name: "S unitarity".into(),
                value: r.s_unitarity,
                tolerance: tol(1e-12),
            });
            report.metrics.push(Metric {
                name: "T unitarity".into(),
                value: r.t_unitarity,
                tolerance: tol(1e-12),
            });
            report.metrics.push(Metric {
                name: "S^2 vs (ST)^3".into(),
                value: r.s2_vs_st3,
                tolerance: tol(1e-10),
            });
            report.metrics.push(Metric {
                name: "S^4 vs 1".into(),
                value: r.s4,
                tolerance: tol(1e-10),
            });
            let level = 2 * cusp.definite_disc().level();
            if level % r.t_order != 0 {
                report.failures.push(format!("T has order {} not dividing {level}", r.t_order));
            }
        }
        Suite::ThetaModularity => {
            let rep = WeilRep::new(cusp.definite())?;
            let max_norm = config
                .theta_max_norm
                .clone()
                .unwrap_or_else(|| int(if cusp.n() <= 2 { 25 } else { 6 }));
            let taus = [
                Complex64::new(0.0, 1.0),
                Complex64::new(0.3, 1.1),
                Complex64::new(rng.gen_range(-0.4..0.4), rng.gen_range(0.9..1.1)),
            ];
            let mut t_dev = 0.0f64;
            let mut s_dev = 0.0f64;
            let span = spanning_set(cusp);
            for v in &span {
                let th = build_theta(cusp, cache, v, &max_norm)?;
                for tau in taus {
                    let d = theta_modularity_check(&rep, &th, tau)?;
                    t_dev = t_dev.max(d.t_deviation);
                    s_dev = s_dev.max(d.s_deviation);
                }
            }
            report.samples = span.len() * taus.len();
            report.metrics.push(Metric {
                name: "T deviation".into(),
                value: t_dev,
                tolerance: tol(1e-10),
            });
            report.metrics.push(Metric {
                name: "S deviation".into(),
                value: s_dev,
                tolerance: tol(1e-6),
            });
        }
        Suite::Cochain => {
            let n = cusp.n();
            let count = samples(50);
            let herm = CochainForm::Hermitian(cusp.definite().gram_complex());
            let sym: Vec<Vec<Complex64>> = {
                let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
                for i in 0..n {
                    for j in i..n {
                        let x = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        g[i][j] = x;
                        g[j][i] = x;
                    }
                }
                g
            };
            let mut dev = 0.0f64;
            let mut spread = 0.0f64;
            for form in [herm, CochainForm::Symmetric(sym)] {
                let r = trivializing_cochain_check(cusp, params, &form, count, f64::INFINITY, &mut rng)?;
                dev = dev.max(r.max_deviation);
                spread = spread.max(r.max_z_spread);
            }
            report.samples = 2 * count;
            report.metrics.push(Metric {
                name: "coboundary deviation".into(),
                value: dev,
                tolerance: tol(1e-9),
            });
            report.metrics.push(Metric {
                name: "z spread".into(),
                value: spread,
                tolerance: tol(1e-10),
            });
        }
    }
    Ok(report)
}

/// Up to `count` vectors from local Heegner divisors of small norm.
pub fn sample_lambdas(cusp: &CuspData, cache: &NormCache, rng: &mut impl Rng, count: usize) -> Result<Vec<LatticeVector>> {
    let disc = cusp.disc_group();
    let mut pool = Vec::new();
    for &beta in cusp.box_l_script() {
        for shift in 1..=2 {
            let m = disc.q_mod1(beta) - int(shift);
            let combo = HeegnerCombo::symmetrized(cusp, [(beta, m, 1)])?;
            pool.extend(expand_divisor(cusp, cache, &combo)?.into_iter().map(|t| t.lambda));
        }
    }
    if pool.is_empty() {
        return Err(Error::Consistency("no local Heegner vectors of norm above -2".into()));
    }
    pool.shuffle(rng);
    pool.truncate(count);
    Ok(pool)
}

/// A point with `Im tau` in `[2, 4]` and small `sigma`, inside the domain.
pub fn automorphy_point(cusp: &CuspData, rng: &mut impl Rng) -> SiegelPoint {
    loop {
        let sigma = (0..cusp.n())
            .map(|_| Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)))
            .collect();
        let p = SiegelPoint {
            tau: Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(2.0..4.0)),
            sigma,
        };
        if cusp.in_domain(&p) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cusp::derive_heisenberg_params;
    use crate::fixtures;

    #[test]
    fn suites_pass_on_gaussian() {
        let cusp = fixtures::gaussian_n1().cusp().unwrap();
        let params = derive_heisenberg_params(&cusp).unwrap();
        let cache = NormCache::in_memory();
        let config = SuiteConfig {
            samples: 10,
            ..SuiteConfig::default()
        };
        for suite in Suite::ALL {
            let r = run_suite(&cusp, &params, &cache, suite, &config).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
