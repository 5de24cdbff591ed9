//! Subcommand table and handlers.

use serde::Serialize;
use serde_json::{json, Value};

use orbitope_core::grassmann::{
    comass, d_k_rect, default_k, kaehler_calibration, long_calibration_with, orbit_tensor_rank, special_lagrangian,
    AnyMultiVector, ExteriorTables, MultiVector, DEFAULT_MC_SAMPLES, DEFAULT_RESTARTS,
};
use orbitope_core::math::{RngSeed, SeededRng};
use orbitope_core::norms::{avg_sup_norm_experiment_with, sphere_sandwich, SandwichBound};
use orbitope_core::orbit::families::{asymmetric_tsp, grassmannian, pos_orbit, symmetric_tsp};
use orbitope_core::orbit::{orbit_second_moment, AnyEllipsoids, DEFAULT_EIG_GAP_TOL};
use orbitope_core::pos::{
    pos_ball_report, sq_bound_eval, volume_ratio_pos_with, volume_ratio_quadratic_oracle, VOLUME_GRID,
};
use orbitope_core::sphere::grid::{maximize_on_grid, sup_norm_on_grid, DEFAULT_GRID, DEFAULT_STARTS, DEFAULT_STEPS};
use orbitope_core::sphere::norm::exact_within_budget;
use orbitope_core::sphere::{AnyPoly, HomPoly, NormMethod, PolyEvaluator, SphereGrid};
use orbitope_core::tsp::{atn_report, stn_closed_forms, stn_symmetry_certificate};

use crate::params::Params;
use crate::verify::{self, Suite};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Value,
    Flag,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn v(name: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: Kind::Value,
        help,
    }
}

const fn flag(name: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: Kind::Flag,
        help,
    }
}

/// What a handler produced. `stdout` replaces the report on standard output.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub result: Value,
    pub pass: Option<bool>,
    pub seed: Option<u64>,
    pub stdout: Option<String>,
}

type Handler = fn(&mut Params) -> Result<Outcome, CliError>;

pub struct Subcommand {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [ParamSpec],
    /// Accepts list-valued grid parameters and CSV output.
    pub tabular: bool,
    pub handler: Handler,
}

const SEED: ParamSpec = v("seed", "64-bit RNG seed");

pub static SUBCOMMANDS: &[Subcommand] = &[
    Subcommand {
        name: "ellipsoid",
        about: "Löwner–John ellipsoids of an orbit from its second-moment form",
        params: &[
            v("family", "st | at | grassmann | pos"),
            v("n", "ambient size"),
            v("m", "Grassmannian degree"),
            v("k", "Pos half-degree"),
            v("samples", "Haar samples for compact families (default 100000)"),
            SEED,
            v("eig-gap-tol", "relative eigenvalue clustering tolerance (default 1e-6)"),
        ],
        tabular: false,
        handler: ellipsoid,
    },
    Subcommand {
        name: "tsp",
        about: "closed-form radii, symmetry certificates and boundary residuals for ST_n / AT_n",
        params: &[
            v("n", "list of n, e.g. 5,6 or 5..7"),
            v("variant", "sym | asym (default sym)"),
            v("check", "all | none (default all)"),
        ],
        tabular: true,
        handler: tsp,
    },
    Subcommand {
        name: "comass",
        about: "comass sandwich for a functional on the Grassmannian",
        params: &[
            v("n", "ambient dimension"),
            v("m", "plane dimension"),
            v("k", "tensor power (default ⌈mn ln(m+1)⌉)"),
            v("restarts", "ascent restarts (default 64)"),
            v("samples", "Monte Carlo samples for the 2k-norm (default 100000)"),
            SEED,
            v("calibration", "random | kaehler | sl | long (default random)"),
            v("pool", "candidate pool for --calibration long (default 50)"),
            v("multivector", "JSON multivector file; replaces --calibration"),
        ],
        tabular: false,
        handler: comass_cmd,
    },
    Subcommand {
        name: "sandwich",
        about: "L^2k sandwich bounds for the sup norm of a form on the sphere",
        params: &[
            v("poly", "JSON polynomial file"),
            v("k", "half exponent"),
            flag("centered", "one-sided bound for odd k and mean-zero p^k"),
            v("samples", "Monte Carlo samples if the exact expansion is too large (default 200000)"),
            SEED,
            v("grid", "also estimate the sup norm on a grid of this many points (n ≤ 4)"),
        ],
        tabular: false,
        handler: sandwich,
    },
    Subcommand {
        name: "avg-sup",
        about: "average sup norm of random unit forms in U_{m,n}",
        params: &[
            v("n", "list of n"),
            v("m", "list of degrees"),
            v("samples", "random forms per grid point (default 200)"),
            SEED,
            v("grid", "sphere grid size (default 200000)"),
        ],
        tabular: true,
        handler: avg_sup,
    },
    Subcommand {
        name: "pos-ball",
        about: "inscribed and circumscribed balls of the nonnegative cone slice",
        params: &[v("n", "list of n"), v("k", "list of half-degrees")],
        tabular: true,
        handler: pos_ball,
    },
    Subcommand {
        name: "pos-volume",
        about: "Monte Carlo volume ratio of the nonnegative cone slice to the unit ball",
        params: &[
            v("n", "list of n"),
            v("k", "list of half-degrees"),
            v("samples", "random directions (default 5000)"),
            SEED,
            v("grid", "sphere grid size per direction (default 20000)"),
            flag("oracle", "cross-check k = 1 against the eigenvalue oracle"),
        ],
        tabular: true,
        handler: pos_volume,
    },
    Subcommand {
        name: "dk",
        about: "dimension d_k of the span of k-th tensor powers of the Grassmannian",
        params: &[
            v("m", "list of plane dimensions"),
            v("n", "list of ambient dimensions"),
            v("k", "list of tensor powers"),
            v("rank-samples", "also measure the orbit-span rank from this many samples"),
            SEED,
        ],
        tabular: true,
        handler: dk,
    },
    Subcommand {
        name: "verify",
        about: "run the acceptance suite",
        params: &[v("suite", "fast | full (default fast)"), v("seed", "offset added to every criterion seed (default 0)")],
        tabular: false,
        handler: verify_cmd,
    },
];

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// One row is reported as an object, several as an array.
fn rows_value(mut rows: Vec<Value>) -> Value {
    if rows.len() == 1 {
        rows.pop().unwrap()
    } else {
        Value::Array(rows)
    }
}

fn seed(p: &mut Params) -> Result<u64, CliError> {
    p.required::<u64>("seed")
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))
}

fn ellipsoid(p: &mut Params) -> Result<Outcome, CliError> {
    let family = p.choice("family", "st", &["st", "at", "grassmann", "pos"])?;
    let n: usize = p.required("n")?;
    let tol: f64 = p.get("eig-gap-tol", DEFAULT_EIG_GAP_TOL)?;
    let (spec, sampling) = match family.as_str() {
        "st" => (symmetric_tsp(n)?, None),
        "at" => (asymmetric_tsp(n)?, None),
        "grassmann" => {
            let m: usize = p.required("m")?;
            (grassmannian(n, m)?, Some(()))
        }
        _ => {
            let k: u32 = p.required("k")?;
            (pos_orbit(n, k)?, Some(()))
        }
    };
    let (samples, s) = match sampling {
        Some(()) => (p.get("samples", 100_000usize)?, Some(seed(p)?)),
        None => (0, None),
    };
    let moment = orbit_second_moment(&spec, samples, RngSeed(s.unwrap_or(0)))?;
    let e = AnyEllipsoids::compute(&moment, tol)?;
    eprintln!(
        "{family} n={n}: affine dim {}, components {:?}, polarity defect {:.2e}",
        e.affine_dim(),
        e.component_dims(),
        e.polarity_defect()
    );
    Ok(Outcome {
        result: json!({
            "family": family,
            "ambient_dim": spec.ambient_dim(),
            "exact_moment": moment.is_exact(),
            "ellipsoids": e,
        }),
        seed: s,
        ..Outcome::default()
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn tsp(p: &mut Params) -> Result<Outcome, CliError> {
    let ns: Vec<usize> = p.list("n", None)?;
    let variant = p.choice("variant", "sym", &["sym", "asym"])?;
    let check = p.choice("check", "all", &["all", "none"])? == "all";
    let mut rows = Vec::new();
    let mut all = true;
    for n in ns {
        let (mut row, mut pass, line) = if variant == "sym" {
            let r = stn_closed_forms(n)?;
            let line = format!("ST_{n}: R_min = {} (R_min² = {})", r.r_min, orbitope_core::math::format_rat(&r.r_min_sq));
            (to_value(&r), r.all_pass(), line)
        } else {
            let r = atn_report(n)?;
            let line = format!("AT_{n}: {} vertices, {} off the ellipsoid", r.vertices, r.nonzero_residuals);
            (to_value(&r), r.all_pass(), line)
        };
        if check && variant == "sym" && n >= 5 {
            let cert = stn_symmetry_certificate(n)?;
            pass &= cert.membership.is_inside();
            row["symmetry_certificate"] = to_value(&cert);
        }
        if check {
            row["pass"] = json!(pass);
            eprintln!("{line} {}", verdict(pass));
            all &= pass;
        } else {
            eprintln!("{line}");
        }
        rows.push(row);
    }
    Ok(Outcome {
        result: rows_value(rows),
        pass: check.then_some(all),
        ..Outcome::default()
    })
}

fn comass_cmd(p: &mut Params) -> Result<Outcome, CliError> {
    let file = p.optional::<String>("multivector")?;
    let (n, m, given) = match &file {
        Some(path) => {
            let c = AnyMultiVector::from_json(&read_file(path)?)?;
            let (n, m) = match &c {
                AnyMultiVector::Exact(c) => (c.n(), c.m()),
                AnyMultiVector::Float(c) => (c.n(), c.m()),
            };
            for (key, val) in [("n", n), ("m", m)] {
                if let Some(x) = p.optional::<usize>(key)? {
                    if x != val {
                        return Err(CliError::usage(format!("--{key} {x} disagrees with the multivector ({val})")));
                    }
                }
            }
            (n, m, Some(c))
        }
        None => (p.required("n")?, p.required("m")?, None),
    };
    let k: usize = p.get("k", default_k(n, m))?;
    let restarts: usize = p.get("restarts", DEFAULT_RESTARTS)?;
    let samples: usize = p.get("samples", DEFAULT_MC_SAMPLES)?;
    let s = seed(p)?;
    let seed_ = RngSeed(s);
    let c = match given {
        Some(c) => c,
        None => match p.choice("calibration", "random", &["random", "kaehler", "sl", "long"])?.as_str() {
            "random" => {
                let t = ExteriorTables::new(n, m)?;
                let u = SeededRng::new(seed_.derive(u64::MAX)).unit_vector(t.len(m));
                AnyMultiVector::Float(MultiVector::from_dense(&t, m, &u)?)
            }
            "kaehler" => AnyMultiVector::Exact(kaehler_calibration(n, m)?),
            "sl" => {
                if n != 2 * m {
                    return Err(CliError::usage(format!("special Lagrangian needs n = 2m (n = {n}, m = {m})")));
                }
                AnyMultiVector::Exact(special_lagrangian(m)?)
            }
            _ => {
                let pool: usize = p.get("pool", 50)?;
                let (c, rep) = long_calibration_with(n, m, pool, k, samples, restarts, seed_)?;
                eprintln!("long calibration: ⟨c,c⟩ = {:.4}, ratio to C(n,m) {:.4}", rep.length_sq, rep.ratio_to_ceiling);
                return Ok(Outcome {
                    result: json!({ "functional": c, "report": rep }),
                    seed: Some(s),
                    ..Outcome::default()
                });
            }
        },
    };
    let est = match &c {
        AnyMultiVector::Exact(c) => comass(c, k, restarts, samples, seed_)?,
        AnyMultiVector::Float(c) => comass(c, k, restarts, samples, seed_)?,
    };
    eprintln!("comass in [{:.9}, {:.6} ± {:.2e}]", est.lower, est.upper, est.upper_std_err);
    let functional = match &c {
        AnyMultiVector::Exact(c) => to_value(c),
        AnyMultiVector::Float(c) => to_value(c),
    };
    Ok(Outcome {
        result: json!({ "functional": functional, "estimate": est }),
        seed: Some(s),
        ..Outcome::default()
    })
}

fn bound_for<S: orbitope_core::math::Scalar>(
    poly: &HomPoly<S>,
    k: u32,
    centered: bool,
    method: NormMethod,
) -> Result<SandwichBound, CliError> {
    Ok(sphere_sandwich(poly, k, centered, method)?)
}

fn sandwich(p: &mut Params) -> Result<Outcome, CliError> {
    let path: String = p.required("poly")?;
    let poly = AnyPoly::from_json(&read_file(&path)?)?;
    let k: u32 = p.required("k")?;
    let centered: bool = p.get("centered", false)?;
    let exact = exact_within_budget(poly.n(), poly.degree(), k);
    let s = p.optional::<u64>("seed")?;
    let method = match (exact, s) {
        (true, _) => {
            if p.has("samples") {
                return Err(CliError::usage("--samples is unused: the exact expansion fits the budget"));
            }
            NormMethod::Exact
        }
        (false, Some(s)) => NormMethod::Mc {
            samples: p.get("samples", 200_000usize)?,
            seed: RngSeed(s),
        },
        (false, None) => return Err(CliError::usage("--seed is required: the exact expansion exceeds the budget")),
    };
    let b = match &poly {
        AnyPoly::Exact(q) => bound_for(q, k, centered, method)?,
        AnyPoly::Float(q) => bound_for(q, k, centered, method)?,
    };
    let mut result = json!({ "bound": b });
    let mut pass = None;
    if let Some(points) = p.optional::<usize>("grid")? {
        let f = match &poly {
            AnyPoly::Exact(q) => q.to_f64(),
            AnyPoly::Float(q) => q.clone(),
        };
        let grid = SphereGrid::new(f.n(), points)?;
        let ev = PolyEvaluator::new(&f);
        let ext = if centered {
            maximize_on_grid(&ev, &grid, DEFAULT_STARTS, DEFAULT_STEPS)
        } else {
            sup_norm_on_grid(&ev, &grid, DEFAULT_STARTS, DEFAULT_STEPS)
        };
        let within = ext.value >= b.lower - 1e-9 && ext.value <= b.upper + 1e-6;
        eprintln!("grid estimate {:.9} in [{:.9}, {:.9}]: {}", ext.value, b.lower, b.upper, verdict(within));
        result["grid"] = json!({ "points": grid.len(), "estimate": ext.value, "within": within });
        pass = Some(within);
    } else {
        eprintln!("max |p| in [{:.9}, {:.9}]", b.lower, b.upper);
    }
    Ok(Outcome {
        result,
        pass,
        seed: s,
        ..Outcome::default()
    })
}

fn avg_sup(p: &mut Params) -> Result<Outcome, CliError> {
    let ns: Vec<usize> = p.list("n", None)?;
    let ms: Vec<u32> = p.list("m", None)?;
    let samples: usize = p.get("samples", 200)?;
    let s = seed(p)?;
    let grid: usize = p.get("grid", DEFAULT_GRID)?;
    let mut rows = Vec::new();
    for &n in &ns {
        for &m in &ms {
            let r = avg_sup_norm_experiment_with(n, m, samples, RngSeed(s), grid)?;
            eprintln!("n={n} m={m}: mean sup {:.4} ± {:.4}, ratio {:.4}", r.mean, r.std_err, r.ratio);
            rows.push(to_value(&r));
        }
    }
    Ok(Outcome {
        result: rows_value(rows),
        seed: Some(s),
        ..Outcome::default()
    })
}

fn pos_ball(p: &mut Params) -> Result<Outcome, CliError> {
    let ns: Vec<usize> = p.list("n", None)?;
    let ks: Vec<u32> = p.list("k", None)?;
    let mut rows = Vec::new();
    for &n in &ns {
        for &k in &ks {
            let mut row = to_value(&pos_ball_report(n, k)?);
            row["sq_bound"] = json!(sq_bound_eval(n, k)?);
            rows.push(row);
        }
    }
    Ok(Outcome {
        result: rows_value(rows),
        ..Outcome::default()
    })
}

fn pos_volume(p: &mut Params) -> Result<Outcome, CliError> {
    let ns: Vec<usize> = p.list("n", None)?;
    let ks: Vec<u32> = p.list("k", None)?;
    let samples: usize = p.get("samples", 5000)?;
    let s = seed(p)?;
    let grid: usize = p.get("grid", VOLUME_GRID)?;
    let oracle: bool = p.get("oracle", false)?;
    if oracle && ks.iter().any(|&k| k != 1) {
        return Err(CliError::usage("--oracle needs k = 1"));
    }
    let mut rows = Vec::new();
    let mut all = true;
    for &n in &ns {
        for &k in &ks {
            let r = volume_ratio_pos_with(n, k, samples, RngSeed(s), grid)?;
            eprintln!(
                "n={n} k={k}: ratio {:.4} ± {:.4} (robust {:.4} ± {:.4})",
                r.estimate, r.std_err, r.robust_estimate, r.robust_std_err
            );
            let mut row = to_value(&r);
            if oracle {
                let o = volume_ratio_quadratic_oracle(n, samples, RngSeed(s).derive(1))?;
                let sigma = (r.std_err.powi(2) + o.std_err.powi(2)).sqrt();
                let agrees = (r.estimate - o.estimate).abs() <= (0.05 * o.estimate).max(3.0 * sigma);
                eprintln!("  eigenvalue oracle {:.4} ± {:.4}: {}", o.estimate, o.std_err, verdict(agrees));
                row["oracle"] = to_value(&o);
                row["oracle_agrees"] = json!(agrees);
                all &= agrees;
            }
            rows.push(row);
        }
    }
    Ok(Outcome {
        result: rows_value(rows),
        pass: oracle.then_some(all),
        seed: Some(s),
        ..Outcome::default()
    })
}

fn dk(p: &mut Params) -> Result<Outcome, CliError> {
    let ms: Vec<usize> = p.list("m", None)?;
    let ns: Vec<usize> = p.list("n", None)?;
    let ks: Vec<usize> = p.list("k", None)?;
    let rank_samples = p.optional::<usize>("rank-samples")?;
    let s = match rank_samples {
        Some(_) => Some(seed(p)?),
        None => None,
    };
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut all = true;
    for &m in &ms {
        for &n in &ns {
            for &k in &ks {
                let d = d_k_rect(m, n, k)?;
                lines.push(d.to_string());
                let mut row = json!({ "m": m, "n": n, "k": k, "d_k": d.to_string() });
                if let (Some(samples), Some(s)) = (rank_samples, s) {
                    let r = orbit_tensor_rank(n, m, k, samples, RngSeed(s))?;
                    let agrees = d == r.rank.into();
                    row["rank"] = to_value(&r);
                    row["rank_matches"] = json!(agrees);
                    all &= agrees;
                }
                rows.push(row);
            }
        }
    }
    Ok(Outcome {
        result: rows_value(rows),
        pass: rank_samples.map(|_| all),
        seed: s,
        stdout: Some(lines.join("\n")),
    })
}

fn verify_cmd(p: &mut Params) -> Result<Outcome, CliError> {
    let suite = match p.choice("suite", "fast", &["fast", "full"])?.as_str() {
        "full" => Suite::Full,
        _ => Suite::Fast,
    };
    let s: u64 = p.get("seed", 0)?;
    let results = verify::run_suite(suite, s, |r| eprintln!("{}", r.line()));
    let pass = results.iter().all(|r| r.pass);
    Ok(Outcome {
        result: json!({ "suite": suite, "criteria": results }),
        pass: Some(pass),
        seed: Some(s),
        ..Outcome::default()
    })
}
