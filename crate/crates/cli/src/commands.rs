use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Deserialize;
use stardisc::applications::{
    backward_selection, evaluate, forward_selection, halton_fitness, optimize_halton_permutations, quality_report,
    EvalOptions, ExactMethod, Fallback, L2Method, Measure, TaVariant,
};
use stardisc::approx::TaConfig;
use stardisc::exact::{star_grid_enum_with, DEFAULT_BUDGET};
use stardisc::generators::{
    dominating_set_instance, first_primes, halton, midpoint_set, rank1_lattice, Graph, PermutationConfig,
};
use stardisc::{rng_from_seed, PointSet};

use crate::args::*;
use crate::error::CliError;
use crate::format::{parse_marginals, parse_measure, parse_pointset, write_measure, write_pointset};
use crate::report::{Record, RunReport};
use crate::selftest;

/// What a command prints on success.
pub enum Output {
    Report,
    /// Raw payload replacing the report, e.g. generated points.
    Raw(String),
}

pub struct Ctx<'a> {
    pub json: bool,
    pub report: &'a mut RunReport,
    /// Messages for standard error.
    pub notes: Vec<String>,
}

impl Ctx<'_> {
    fn seed(&mut self, given: Option<u64>) -> Result<u64, CliError> {
        match given {
            Some(s) => Ok(s),
            None if self.json => Err(CliError::usage("randomized commands require --seed with --json")),
            None => {
                let t = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
                let s = t.as_secs() ^ u64::from(t.subsec_nanos()).rotate_left(32);
                self.notes.push(format!("no --seed given, using --seed {s}"));
                Ok(s)
            }
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn execute(cmd: &Command, ctx: &mut Ctx) -> Result<Output, CliError> {
    match cmd {
        Command::Gen(a) => gen(a, ctx),
        Command::Disc(a) => disc(a, ctx),
        Command::Reduce(a) => reduce(a, ctx),
        Command::OptimizePerms(a) => optimize_perms(a, ctx),
        Command::Report(a) => report(a, ctx),
        Command::Selftest(a) => selftest::run(a, ctx.report),
    }
}

pub fn task_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gen(_) => "gen",
        Command::Disc(_) => "disc",
        Command::Reduce(_) => "reduce",
        Command::OptimizePerms(_) => "optimize-perms",
        Command::Report(_) => "report",
        Command::Selftest(_) => "selftest",
    }
}

fn gen(a: &GenArgs, ctx: &mut Ctx) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut rec = Record::new("gen");
    let x = match a.kind {
        GenType::Halton => halton(a.n, a.d, None)?,
        GenType::Ghalton => {
            let perms = match a.scramble {
                Scramble::Reverse => PermutationConfig::reverse(a.d),
                Scramble::Random => {
                    let seed = ctx.seed(a.seed)?;
                    rec.seed = Some(seed);
                    PermutationConfig::random(a.d, &mut rng_from_seed(seed))
                }
            };
            halton(a.n, a.d, Some(&perms))?
        }
        GenType::Lattice => {
            if a.z.is_empty() {
                return Err(CliError::usage("lattice needs --z"));
            }
            rank1_lattice(a.n, &a.z)?
        }
        GenType::Midpoint => {
            if a.d != 1 {
                return Err(CliError::usage("midpoint sets are one-dimensional"));
            }
            midpoint_set(a.n)?
        }
        GenType::Domset => {
            let g = match a.graph {
                GraphKind::Path => Graph::path(a.n),
                GraphKind::Cycle => Graph::cycle(a.n),
                GraphKind::Star => Graph::star(a.n),
                GraphKind::Complete => Graph::complete(a.n),
                GraphKind::Random => {
                    let seed = ctx.seed(a.seed)?;
                    rec.seed = Some(seed);
                    Graph::random(a.n, a.edge_prob, &mut rng_from_seed(seed))
                }
            };
            dominating_set_instance(&g, a.alpha, a.beta)?
        }
    };
    let text = write_pointset(&x);
    let Some(path) = &a.output else {
        return Ok(Output::Raw(text));
    };
    write_text(path, &text)?;
    rec.set = Some(path.display().to_string());
    rec.wall_time_secs = start.elapsed().as_secs_f64();
    ctx.report.records.push(rec.param("points", x.len()).param("dim", x.dim()));
    Ok(Output::Report)
}

fn broadcast(gamma: &[f64], d: usize) -> Result<Vec<f64>, CliError> {
    match gamma.len() {
        0 => Err(CliError::usage("this measure needs --gamma")),
        1 => Ok(vec![gamma[0]; d]),
        k if k == d => Ok(gamma.to_vec()),
        k => Err(CliError::usage(format!("--gamma has {k} entries, the points have dimension {d}"))),
    }
}

fn exact_method(s: Option<&str>) -> Result<ExactMethod, CliError> {
    Ok(match s.unwrap_or("auto") {
        "auto" => ExactMethod::Auto,
        "1d" => ExactMethod::OneD,
        "2d" => ExactMethod::TwoD,
        "3d" => ExactMethod::ThreeD,
        "grid" => ExactMethod::Grid,
        "dem" => ExactMethod::Dem,
        other => return Err(CliError::usage(format!("unknown star-linf method `{other}` (auto|1d|2d|3d|grid|dem)"))),
    })
}

fn l2_method(s: Option<&str>) -> Result<L2Method, CliError> {
    Ok(match s.unwrap_or("warnock") {
        "warnock" => L2Method::Warnock,
        "stable" => L2Method::Stable,
        "fast" => L2Method::Fast,
        other => return Err(CliError::usage(format!("unknown star-l2 method `{other}` (warnock|stable|fast)"))),
    })
}

fn disc(a: &DiscArgs, ctx: &mut Ctx) -> Result<Output, CliError> {
    let x = parse_pointset(&read_text(&a.input)?)?;
    let d = x.dim();
    let mut rec = Record::new("disc");
    rec.set = Some(a.input.display().to_string());
    let start = Instant::now();
    let method = a.method.as_deref();
    let measure = match a.measure {
        MeasureName::StarLinf => Measure::StarLinf {
            method: exact_method(method)?,
        },
        MeasureName::StarL2 => Measure::StarL2 {
            method: l2_method(method)?,
        },
        MeasureName::ExtremeL2 => Measure::ExtremeL2,
        MeasureName::ModifiedL2 => Measure::ModifiedL2,
        MeasureName::WeightedL2 => Measure::WeightedL2 {
            gamma: broadcast(&a.gamma, d)?,
        },
        MeasureName::LpEven => Measure::LpEven {
            p: a.p.ok_or_else(|| CliError::usage("lp-even needs --p"))?,
            gamma: if a.gamma.is_empty() { None } else { Some(broadcast(&a.gamma, d)?) },
        },
        MeasureName::CoverUpper => Measure::CoverUpper {
            delta: a.delta.ok_or_else(|| CliError::usage("cover-upper needs --delta"))?,
        },
        MeasureName::TaLower => Measure::TaLower {
            variant: match a.variant {
                Variant::Basic => TaVariant::Basic,
                Variant::Improved => TaVariant::Improved,
            },
            iterations: a.iterations,
            restarts: a.restarts,
            seed: ctx.seed(a.seed)?,
        },
        MeasureName::GaLower => Measure::GaLower {
            mu: a.mu,
            crossovers: a.lambda_c,
            mutations: a.lambda_m,
            stagnation: a.stagnation,
            seed: ctx.seed(a.seed)?,
        },
    };
    rec.measure = Some(measure.name().into());
    let eval = match (&a.gstar, &measure) {
        (Some(path), Measure::StarLinf { method: ExactMethod::Auto | ExactMethod::Grid }) => {
            let g = parse_marginals(&read_text(path)?)?;
            let r = star_grid_enum_with(&x, None, Some(&g), a.budget)?;
            rec = rec.param("gstar", path.display());
            stardisc::applications::Evaluation {
                value: stardisc::applications::CellValue::Value {
                    value: r.value,
                    squared: false,
                },
                method: r.method.as_str().into(),
                witness: Some(r.witness),
                kind: Some(r.kind),
                seed: None,
            }
        }
        (Some(_), _) => return Err(CliError::usage("--gstar applies to star-linf with method auto or grid")),
        (None, m) => {
            let opts = EvalOptions {
                budget: a.budget,
                ..EvalOptions::default()
            };
            evaluate(&x, m, &opts)?
        }
    };
    rec = rec.with_evaluation(eval);
    rec.params.extend(measure_params(&measure));
    rec.wall_time_secs = start.elapsed().as_secs_f64();
    ctx.report.records.push(rec);
    Ok(Output::Report)
}

fn measure_params(m: &Measure) -> Vec<(String, String)> {
    let json = serde_json::to_value(m).expect("measure serializes");
    let mut out = Vec::new();
    if let serde_json::Value::Object(map) = json {
        for (k, v) in map {
            if k == "measure" || k == "seed" {
                continue;
            }
            let s = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Array(a) => a.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","),
                serde_json::Value::Null => continue,
                other => other.to_string(),
            };
            out.push((k, s));
        }
    }
    out.sort();
    out
}

fn reduce(a: &ReduceArgs, ctx: &mut Ctx) -> Result<Output, CliError> {
    let p = parse_measure(&read_text(&a.input)?)?;
    let start = Instant::now();
    let r = match a.method {
        Selection::Forward => forward_selection(&p, a.n, a.exact_inner, a.budget)?,
        Selection::Backward => backward_selection(&p, a.n, a.exact_inner, a.budget)?,
    };
    if let Some(path) = &a.output {
        write_text(path, &write_measure(&r.measure))?;
    }
    let direction = match a.method {
        Selection::Forward => "forward",
        Selection::Backward => "backward",
    };
    let inner = if a.exact_inner { "lp" } else { "nearest" };
    let mut rec = Record::new("reduce");
    rec.set = Some(a.input.display().to_string());
    rec.measure = Some("star-distance".into());
    rec.value = Some(r.distance);
    rec.method = Some(format!("{direction}-{inner}"));
    let support: Vec<String> = r.support.iter().map(usize::to_string).collect();
    let trace: Vec<String> = r.trace.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    let weights: Vec<String> = r.measure.probs().iter().map(f64::to_string).collect();
    rec = rec
        .param("n", a.n)
        .param("support", support.join(","))
        .param("weights", weights.join(","))
        .param("trace", trace.join(","));
    rec.wall_time_secs = start.elapsed().as_secs_f64();
    ctx.report.records.push(rec);
    Ok(Output::Report)
}

fn perm_line(p: u64, perm: &[u64]) -> String {
    let digits: Vec<String> = perm.iter().map(u64::to_string).collect();
    format!("{p}: {}", digits.join(" "))
}

fn optimize_perms(a: &PermArgs, ctx: &mut Ctx) -> Result<Output, CliError> {
    let seed = ctx.seed(a.seed)?;
    let start = Instant::now();
    let cfg = optimize_halton_permutations(a.d, a.points, a.mu, a.lambda, a.generations, seed)?;
    let fitness = halton_fitness(a.points, &cfg)?;
    let plain = halton_fitness(a.points, &PermutationConfig::identity(a.d))?;
    let lines: Vec<String> = first_primes(a.d)
        .iter()
        .zip(cfg.perms())
        .map(|(&p, perm)| perm_line(p, perm))
        .collect();
    if let Some(path) = &a.output {
        write_text(path, &(lines.join("\n") + "\n"))?;
    }
    let mut rec = Record::new("optimize-perms");
    rec.measure = Some("modified-l2".into());
    rec.value = Some(fitness);
    rec.squared = Some(true);
    rec.method = Some("evolutionary".into());
    rec.seed = Some(seed);
    rec = rec
        .param("d", a.d)
        .param("points", a.points)
        .param("mu", a.mu)
        .param("lambda", a.lambda)
        .param("generations", a.generations)
        .param("identity_value", plain);
    for (&p, perm) in first_primes(a.d).iter().zip(cfg.perms()) {
        let digits: Vec<String> = perm.iter().map(u64::to_string).collect();
        rec = rec.param(&format!("perm.{p}"), digits.join(" "));
    }
    rec.wall_time_secs = start.elapsed().as_secs_f64();
    ctx.report.records.push(rec);
    Ok(Output::Report)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    sets: Vec<ManifestSet>,
    measures: Vec<Measure>,
    #[serde(default)]
    budget: Option<f64>,
    #[serde(default)]
    fallback: Option<ManifestFallback>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestSet {
    name: String,
    path: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFallback {
    delta: f64,
    iterations: u64,
    #[serde(default = "one")]
    restarts: usize,
    seed: u64,
}

fn one() -> usize {
    1
}

fn report(a: &ReportArgs, ctx: &mut Ctx) -> Result<Output, CliError> {
    let manifest: Manifest = serde_json::from_str(&read_text(&a.manifest)?)?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let mut sets: Vec<(String, PointSet)> = Vec::with_capacity(manifest.sets.len());
    for s in &manifest.sets {
        let path = base.join(&s.path);
        let x = parse_pointset(&read_text(&path)?).map_err(|e| match e {
            CliError::Parse { line, msg } => CliError::Parse {
                line,
                msg: format!("{}: {msg}", path.display()),
            },
            other => other,
        })?;
        sets.push((s.name.clone(), x));
    }
    let opts = EvalOptions {
        budget: manifest.budget.unwrap_or(DEFAULT_BUDGET),
        fallback: manifest.fallback.as_ref().map(|f| {
            let mut ta = TaConfig::new(f.iterations, f.seed);
            ta.restarts = f.restarts;
            Fallback { delta: f.delta, ta }
        }),
        ..EvalOptions::default()
    };
    for cell in quality_report(&sets, &manifest.measures, &opts) {
        let mut rec = Record::new("report");
        rec.set = Some(cell.set);
        rec.measure = Some(cell.measure);
        if let Some(e) = cell.outcome {
            rec = rec.with_evaluation(e);
        }
        rec.error = cell.error;
        rec.wall_time_secs = cell.runtime_secs;
        ctx.report.records.push(rec);
    }
    Ok(Output::Report)
}
