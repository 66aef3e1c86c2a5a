use rayon::prelude::*;
use serde::Serialize;

use semistable::ar1::{simulate_ar1, thinning_gap};
use semistable::verification::{
    check_cross_evaluator, check_functional_equation, check_semiselfsimilar, check_ssd_factor, check_stationarity,
    CalibrationConfig, SelfSimilarDesign, StationarityDesign,
};
use semistable::{Evaluator, LevySampler, SemiStableLaw, StreamId, TruncationScheme, VerificationReport};

use crate::cli::{CheckKind, Command, RunArgs, SimulateKind};
use crate::config::{GridSpec, RunConfig, TimeSpec};
use crate::error::CliError;
use crate::output::{ensure_dir, num, write_csv, write_json, SchemeEcho, Sidecar};

/// Whether every check of a command passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_reports(reports: &[VerificationReport]) -> Self {
        if reports.iter().all(|r| r.passed) {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

const VERIFY_GRID: GridSpec = GridSpec::log(1e-2, 50.0, 200);
const CHECK_GRID: GridSpec = GridSpec::log(0.05, 20.0, 40);
const PLOT_GRID: GridSpec = GridSpec::log(1e-3, 1e3, 2000);
const DRAWS_PER_STREAM: usize = 4096;
const HISTOGRAM_BINS: usize = 100;

#[derive(Serialize)]
struct ReportBundle<'a> {
    command: &'a str,
    passed: bool,
    reports: &'a [VerificationReport],
}

pub fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::VerifyCf(args) => verify_cf(&args),
        Command::Simulate { what, args } => simulate(what, &args),
        Command::Check { which, args } => check(which, &args),
        Command::Plotdata(args) => plotdata(&args),
    }
}

fn setup(args: &RunArgs) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::resolve(args)?;
    if let Some(threads) = cfg.threads {
        // a pool that already exists (tests running in-process) is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    ensure_dir(&cfg.out)?;
    Ok(cfg)
}

fn print_reports(reports: &[VerificationReport]) {
    for r in reports {
        println!("{r}");
    }
}

fn verify_cf(args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = setup(args)?;
    let grid_spec = cfg.grid.unwrap_or(VERIFY_GRID);
    let grid = grid_spec.points();
    let law = SemiStableLaw::new(cfg.params)?;
    let p = law.params();

    let quad: Vec<f64> = grid
        .par_iter()
        .map(|&u| law.exponent_quadrature(u).map(|e| e.psi))
        .collect::<Result<_, _>>()?;
    let rows = grid.iter().zip(&quad).map(|(&u, &q)| {
        let closed = law.psi(u);
        let residual = (closed - p.a() * law.psi(p.b() * u)).abs();
        vec![num(u), num(closed), num(q), num(residual)]
    });
    write_csv(&cfg.out.join("verify_cf.csv"), &["u", "psi_closed", "psi_quadrature", "residual"], rows)?;

    let mut reports = vec![
        check_functional_equation(&law, &grid, None, Evaluator::Closed, 1e-8)?,
        check_functional_equation(&law, &grid, None, Evaluator::Quadrature, 1e-6)?,
        check_cross_evaluator(&law, &grid, 1e-6)?,
    ];
    if let Some(e) = cfg.extra_epoch {
        reports.push(check_functional_equation(&law, &grid, Some(e), Evaluator::Closed, 1e-8)?);
    }
    let outcome = Outcome::from_reports(&reports);
    write_json(
        &cfg.out.join("verify_cf.json"),
        &ReportBundle {
            command: "verify-cf",
            passed: outcome == Outcome::Pass,
            reports: &reports,
        },
    )?;
    let mut meta = Sidecar::new("verify-cf", cfg.to_values(Some(grid_spec), None, None), p);
    meta.outputs = vec!["verify_cf.csv".into(), "verify_cf.json".into()];
    meta.write(&cfg.out, "verify_cf")?;
    print_reports(&reports);
    Ok(outcome)
}

fn simulate(what: SimulateKind, args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = setup(args)?;
    let law = SemiStableLaw::new(cfg.params)?;
    let scheme = TruncationScheme::build(&law, cfg.delta)?;
    let sampler = LevySampler::new(&law, scheme);
    let stream = StreamId::new(cfg.seed, 0);
    let (stem, command, n, times) = match what {
        SimulateKind::Path => {
            let times = cfg.times.unwrap_or(TimeSpec {
                start: 0.0,
                end: 1.0,
                steps: 100,
            });
            let path = sampler.sample_path(&times.points(), stream)?;
            let rows = path.times.iter().zip(&path.values).map(|(&t, &v)| vec![num(t), num(v)]);
            write_csv(&cfg.out.join("path.csv"), &["time", "value"], rows)?;
            ("path", "simulate path", None, Some(times))
        }
        SimulateKind::Ar1 => {
            let n = cfg.n.unwrap_or(1000);
            let series = simulate_ar1(&sampler, n, stream)?;
            let rows = series.values.iter().enumerate().map(|(k, &v)| vec![k.to_string(), num(v)]);
            write_csv(&cfg.out.join("ar1.csv"), &["index", "value"], rows)?;
            ("ar1", "simulate ar1", Some(n), None)
        }
        SimulateKind::Innovation => {
            let n = cfg.n.unwrap_or(100_000);
            let chunks: Vec<Vec<f64>> = (0..n.div_ceil(DRAWS_PER_STREAM))
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream.child(k as u64).rng();
                    (0..DRAWS_PER_STREAM.min(n - k * DRAWS_PER_STREAM))
                        .map(|_| sampler.sample_innovation(&mut rng))
                        .collect::<Result<_, _>>()
                })
                .collect::<Result<_, _>>()?;
            let rows = chunks.iter().flatten().enumerate().map(|(k, &v)| vec![k.to_string(), num(v)]);
            write_csv(&cfg.out.join("innovation.csv"), &["index", "value"], rows)?;
            ("innovation", "simulate innovation", Some(n), None)
        }
    };
    let mut meta = Sidecar::new(command, cfg.to_values(None, n, times), law.params());
    meta.scheme = Some(SchemeEcho::from(&scheme));
    meta.outputs = vec![format!("{stem}.csv")];
    meta.write(&cfg.out, stem)?;
    println!("wrote {}", cfg.out.join(format!("{stem}.csv")).display());
    Ok(Outcome::Pass)
}

fn check(which: CheckKind, args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = setup(args)?;
    let grid_spec = cfg.grid.unwrap_or(CHECK_GRID);
    let grid = grid_spec.points();
    let law = SemiStableLaw::new(cfg.params)?;
    let scheme = TruncationScheme::build(&law, cfg.delta)?;
    let sampler = LevySampler::new(&law, scheme);
    let seed = cfg.seed;

    let ssd = || check_ssd_factor(&law, &grid);
    let n_effective = cfg.n.unwrap_or(10_000);
    let stationarity = || -> Result<VerificationReport, CliError> {
        let gap = thinning_gap(law.params().b());
        let series = simulate_ar1(&sampler, n_effective * gap, StreamId::new(seed, 10))?;
        let design = StationarityDesign {
            gap: Some(gap),
            min_effective: n_effective,
        };
        Ok(check_stationarity(&law, &series, &grid, &design, &CalibrationConfig::new(StreamId::new(seed, 11)))?)
    };
    let n_paths = cfg.n.unwrap_or(100_000);
    let selfsimilar = || -> Result<VerificationReport, CliError> {
        let design = SelfSimilarDesign {
            epoch: cfg.epoch_override,
            joint: cfg.joint,
            grid: grid.clone(),
        };
        let calib = CalibrationConfig::new(StreamId::new(seed, 21));
        Ok(check_semiselfsimilar(&sampler, cfg.t0, n_paths, &design, &calib, StreamId::new(seed, 20))?)
    };

    let runs: Vec<(&str, VerificationReport)> = match which {
        CheckKind::Ssd => vec![("ssd", ssd()?)],
        CheckKind::Stationarity => vec![("stationarity", stationarity()?)],
        CheckKind::Selfsimilar => vec![("selfsimilar", selfsimilar()?)],
        CheckKind::All => vec![("ssd", ssd()?), ("stationarity", stationarity()?), ("selfsimilar", selfsimilar()?)],
    };
    let (kind, n_used) = match which {
        CheckKind::Ssd => ("ssd", None),
        CheckKind::Stationarity => ("stationarity", Some(n_effective)),
        CheckKind::Selfsimilar => ("selfsimilar", Some(n_paths)),
        CheckKind::All => ("all", cfg.n),
    };
    let mut outputs = Vec::new();
    for (name, report) in &runs {
        let file = format!("check_{name}.json");
        write_json(&cfg.out.join(&file), report)?;
        outputs.push(file);
    }
    let reports: Vec<VerificationReport> = runs.into_iter().map(|(_, r)| r).collect();
    let outcome = Outcome::from_reports(&reports);
    if which == CheckKind::All {
        write_json(
            &cfg.out.join("check_all.json"),
            &ReportBundle {
                command: "check all",
                passed: outcome == Outcome::Pass,
                reports: &reports,
            },
        )?;
        outputs.push("check_all.json".into());
    }
    let stem = format!("check_{kind}");
    let command = format!("check {kind}");
    let mut meta = Sidecar::new(&command, cfg.to_values(Some(grid_spec), n_used, None), law.params());
    meta.scheme = Some(SchemeEcho::from(&scheme));
    meta.outputs = outputs;
    meta.write(&cfg.out, &stem)?;
    print_reports(&reports);
    Ok(outcome)
}

fn plotdata(args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = setup(args)?;
    let grid_spec = cfg.grid.unwrap_or(PLOT_GRID);
    let grid = grid_spec.points();
    let law = SemiStableLaw::new(cfg.params)?;
    let p = *law.params();

    write_csv(
        &cfg.out.join("plot_cf.csv"),
        &["u", "cf"],
        grid.iter().map(|&u| vec![num(u), num(law.marginal_cf(u))]),
    )?;
    write_csv(
        &cfg.out.join("plot_ssd_factor.csv"),
        &["u", "ssd_factor"],
        grid.iter().map(|&u| vec![num(u), num(law.ssd_factor_exponent(u).exp())]),
    )?;
    write_csv(
        &cfg.out.join("plot_modulation.csv"),
        &["ln_u", "normalized_exponent"],
        grid.iter()
            .filter(|u| **u != 0.0)
            .map(|&u| vec![num(u.abs().ln()), num(-law.psi(u) / u.abs().powf(p.alpha()))]),
    )?;

    let n = cfg.n.unwrap_or(10_000);
    let scheme = TruncationScheme::build(&law, cfg.delta)?;
    let sampler = LevySampler::new(&law, scheme);
    let series = simulate_ar1(&sampler, n, StreamId::new(cfg.seed, 30))?;
    write_csv(&cfg.out.join("plot_histogram.csv"), &["bin_lo", "bin_hi", "count", "density"], histogram(&series.values))?;

    let mut meta = Sidecar::new("plotdata", cfg.to_values(Some(grid_spec), Some(n), None), &p);
    meta.scheme = Some(SchemeEcho::from(&scheme));
    meta.outputs = ["plot_cf.csv", "plot_ssd_factor.csv", "plot_modulation.csv", "plot_histogram.csv"]
        .map(String::from)
        .to_vec();
    meta.write(&cfg.out, "plotdata")?;
    println!("wrote plot data to {}", cfg.out.display());
    Ok(Outcome::Pass)
}

/// Equal-width bins between the 1% and 99% sample quantiles; heavier
/// tails fall outside the range and are not counted.
fn histogram(values: &[f64]) -> Vec<Vec<String>> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Vec::new();
    }
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
    let (lo, hi) = (q(0.01), q(0.99));
    if !(hi > lo) {
        return vec![vec![num(lo), num(hi), sorted.len().to_string(), num(f64::INFINITY)]];
    }
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut counts = vec![0usize; HISTOGRAM_BINS];
    for &v in &sorted {
        if v >= lo && v <= hi {
            let k = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[k] += 1;
        }
    }
    let total = sorted.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let a = lo + width * k as f64;
            vec![num(a), num(a + width), c.to_string(), num(c as f64 / (total * width))]
        })
        .collect()
}
