mod parse;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use heegner_core::cohomology::{torsion_residuals, verdict_from_residuals, TorsionVerdict};
use heegner_core::error::Error;
use heegner_core::hlattice::NormCache;
use heegner_core::local_products::expand_divisor;
use heegner_core::qfield::{parse_rat, Rat};
use heegner_core::verify::{run_suite, Suite, SuiteConfig};
use heegner_core::weil_theta::{build_theta, verdict_from_pairings, ObstructionContext};

use parse::{parse_divisor, parse_fixture, parse_v_spec, FixtureFile};

#[derive(Parser, Debug)]
#[command(name = "heegner", version, about = "Torsion tests for local Heegner divisors on hermitian lattices")]
struct Cli {
    /// Directory for the persistent enumeration cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Product truncation T.
    #[arg(long, global = true, default_value_t = 40)]
    truncation: u32,
    /// Overrides the default tolerances of a suite.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lattice, discriminant group and cusp invariants.
    LatticeInfo { fixture: PathBuf },
    /// Vectors of D' + gamma with Q = m in the definite part.
    Enumerate {
        fixture: PathBuf,
        #[arg(long)]
        gamma: usize,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long)]
        count_only: bool,
    },
    /// Torsion verdict for a combination of local Heegner divisors.
    Torsion {
        fixture: PathBuf,
        divisor: PathBuf,
        #[arg(long, value_enum, default_value_t = Route::Both)]
        route: Route,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Fourier coefficients of a harmonic theta series.
    Theta {
        fixture: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        max_norm: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property suite.
    Verify {
        fixture: PathBuf,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Bilinear,
    Theta,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Fault {
    Bilinear,
    Theta,
}

enum Failure {
    Input(String),
    Alarm(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(msg) => Failure::Alarm(msg),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CmdResult = std::result::Result<(Value, bool), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let cache = match &cli.cache_dir {
        Some(d) => match NormCache::with_dir(d) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => NormCache::in_memory(),
    };
    let result = run(&cli, &cache);
    match result {
        Ok((mut report, ok)) => {
            let stats = cache.stats();
            report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
            report["cache"] = json!({ "hits": stats.hits, "misses": stats.misses });
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Alarm(msg)) => {
            eprintln!("consistency alarm: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_fixture(path: &Path) -> std::result::Result<FixtureFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("fixture");
    parse_fixture(name, &text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_rat_arg(name: &str, s: &str) -> std::result::Result<Rat, Failure> {
    parse_rat(s.trim()).ok_or_else(|| Failure::Input(format!("--{name}: `{s}` is not a rational number")))
}

fn run(cli: &Cli, cache: &NormCache) -> CmdResult {
    match &cli.command {
        Command::LatticeInfo { fixture } => lattice_info(&load_fixture(fixture)?),
        Command::Enumerate {
            fixture,
            gamma,
            m,
            count_only,
        } => {
            let f = load_fixture(fixture)?;
            let m = parse_rat_arg("m", m)?;
            enumerate(&f, cache, *gamma, &m, *count_only)
        }
        Command::Torsion {
            fixture,
            divisor,
            route,
            inject_fault,
        } => {
            let f = load_fixture(fixture)?;
            let text =
                fs::read_to_string(divisor).map_err(|e| Failure::Input(format!("{}: {e}", divisor.display())))?;
            let combo = parse_divisor(&f.cusp, &text)
                .map_err(|e| Failure::Input(format!("{}: {e}", divisor.display())))?;
            torsion(&f, cache, &combo, *route, *inject_fault)
        }
        Command::Theta {
            fixture,
            v,
            max_norm,
            out,
        } => {
            let f = load_fixture(fixture)?;
            let v = parse_v_spec(&f.cusp, v)?;
            let max_norm = parse_rat_arg("max-norm", max_norm)?;
            let th = build_theta(&f.cusp, cache, &v, &max_norm)?;
            let table = th.to_table();
            let mut report = json!({
                "command": "theta",
                "fixture": f.name,
                "v": v.label,
                "max_norm": max_norm.to_string(),
                "rows": th.coeffs.len(),
                "zero": th.is_zero(),
            });
            match out {
                Some(path) => {
                    fs::write(path, &table).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    report["out"] = json!(path.display().to_string());
                }
                None => report["table"] = json!(table),
            }
            Ok((report, true))
        }
        Command::Verify {
            fixture,
            suite,
            samples,
        } => {
            let f = load_fixture(fixture)?;
            let suite: Suite = suite.parse()?;
            let config = SuiteConfig {
                seed: cli.seed,
                samples: *samples,
                truncation: cli.truncation,
                tolerance: cli.tolerance,
                theta_max_norm: None,
            };
            let r = run_suite(&f.cusp, &f.params, cache, suite, &config)?;
            let ok = r.passed();
            if !ok {
                eprintln!("suite {} failed; reproduce with --seed {}", r.suite, r.seed);
            }
            let metrics: Vec<Value> = r
                .metrics
                .iter()
                .map(|m| json!({ "name": m.name, "value": m.value, "tolerance": m.tolerance, "passed": m.passed() }))
                .collect();
            Ok((
                json!({
                    "command": "verify",
                    "fixture": f.name,
                    "suite": r.suite.name(),
                    "seed": r.seed,
                    "samples": r.samples,
                    "passed": ok,
                    "metrics": metrics,
                    "failures": r.failures,
                }),
                ok,
            ))
        }
    }
}

fn lattice_info(f: &FixtureFile) -> CmdResult {
    let cusp = &f.cusp;
    let lat = cusp.lattice();
    let (pos, neg) = lat.signature()?;
    let disc = cusp.disc_group();
    let basis: Vec<String> = f.params.basis().iter().map(|b| b.to_string()).collect();
    Ok((
        json!({
            "command": "lattice-info",
            "fixture": f.name,
            "field_disc": cusp.field().disc(),
            "rank": lat.rank(),
            "signature": [pos, neg],
            "disc_group_order": disc.order(),
            "disc_group_invariants": disc.invariant_factors(),
            "definite_rank": cusp.n(),
            "definite_disc_order": cusp.definite_disc().order(),
            "m1": cusp.m1().to_string(),
            "m2": cusp.m2().to_string(),
            "l_script_order": cusp.l_script().len(),
            "l_script_reps": cusp.box_l_script(),
            "heisenberg_n": f.params.n().to_string(),
            "translation_index": f.params.index().to_string(),
            "translation_basis": basis,
        }),
        true,
    ))
}

fn enumerate(f: &FixtureFile, cache: &NormCache, gamma: usize, m: &Rat, count_only: bool) -> CmdResult {
    use num_traits::Signed;
    if !m.is_negative() {
        return Err(Failure::Input(format!("--m must be negative, got {m}")));
    }
    let disc = f.cusp.definite_disc();
    if !disc.contains_index(gamma) {
        return Err(Failure::Input(format!("--gamma {gamma} is not below |D'/D| = {}", disc.order())));
    }
    let before = cache.stats();
    let mut report = json!({
        "command": "enumerate",
        "fixture": f.name,
        "gamma": gamma,
        "m": m.to_string(),
    });
    if count_only {
        report["count"] = json!(cache.count(disc, gamma, m)?);
    } else {
        let v = cache.vectors(disc, gamma, m)?;
        let mut vs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        vs.sort();
        report["count"] = json!(v.len());
        report["vectors"] = json!(vs);
    }
    report["cache_hit"] = json!(cache.stats().hits > before.hits);
    Ok((report, true))
}

fn bilinear_json(v: &TorsionVerdict) -> Value {
    json!({
        "is_torsion": v.is_torsion,
        "q_factor": v.q_factor.as_ref().map(|q| q.to_string()),
        "witness": v.witness.as_ref().map(|w| json!({
            "pair": [w.pair.0, w.pair.1],
            "t": w.t.to_string(),
            "t2": w.t2.to_string(),
            "residual": w.residual.to_string(),
        })),
    })
}

fn torsion(
    f: &FixtureFile,
    cache: &NormCache,
    combo: &heegner_core::local_products::HeegnerCombo,
    route: Route,
    fault: Option<Fault>,
) -> CmdResult {
    let cusp = &f.cusp;
    let mut report = json!({
        "command": "torsion",
        "fixture": f.name,
        "route": format!("{route:?}").to_lowercase(),
        "terms": combo.terms().map(|(b, m, c)| json!([b, m.to_string(), c])).collect::<Vec<_>>(),
    });
    let mut bilinear = None;
    let mut theta = None;
    if route != Route::Theta {
        let terms = expand_divisor(cusp, cache, combo)?;
        let mut residuals = torsion_residuals(cusp, &f.params, &terms);
        if fault == Some(Fault::Bilinear) {
            if let Some((_, r)) = residuals.first_mut() {
                *r = &*r + &cusp.field().one();
            }
        }
        let v = verdict_from_residuals(cusp, &f.params, &terms, &residuals)?;
        report["bilinear"] = bilinear_json(&v);
        bilinear = Some(v.is_torsion);
    }
    if route != Route::Bilinear {
        let (ok, witnesses) = if combo.is_empty() {
            (true, Vec::new())
        } else {
            let ctx = ObstructionContext::new(cusp, cache, &combo.max_abs_norm())?;
            let mut pairings = ctx.pairings(cusp, combo)?;
            if fault == Some(Fault::Theta) {
                if let Some(p) = pairings.first_mut() {
                    *p = &*p + &heegner_core::qfield::RealQuadVal::from_rat(p.abs_disc(), Rat::from_integer(1.into()));
                }
            }
            verdict_from_pairings(ctx.thetas(), pairings)
        };
        report["theta"] = json!({
            "is_torsion": ok,
            "witnesses": witnesses.iter().map(|w| json!({ "v": w.v.label, "residual": w.residual.to_string() })).collect::<Vec<_>>(),
        });
        theta = Some(ok);
    }
    let verdict = match (bilinear, theta) {
        (Some(a), Some(b)) if a != b => {
            return Err(Failure::Alarm(format!(
                "routes disagree: bilinear says {a}, theta says {b}\n{}",
                serde_json::to_string(&report).unwrap_or_default()
            )))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => unreachable!(),
    };
    report["is_torsion"] = json!(verdict);
    Ok((report, verdict))
}
