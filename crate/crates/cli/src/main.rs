//! Batch experiment driver. Each subcommand maps one core operation (or one
//! short pipeline) onto flags, emits a versioned JSON report on stdout, and
//! optionally writes plot-ready CSV series.
//!
//! Exit codes: 0 success, 1 invariant or baseline failure, 2 input error.
//! Without `--timings` the report for a fixed configuration and seed is
//! bit-identical across runs.

mod emit;
mod literal;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hrt_core::cf::continued_fraction;
use hrt_core::diophantine::{
    best_approximant_check, min_weighted_norm, scale_sequence, ScaleMode, ScaleSequence, Weight,
};
use hrt_core::mc::sample_rng;
use hrt_core::orbit::{
    an_profile, ball_count, conjugate_select, decay_probe, divergence_demo, fit_l,
    generic_reciprocal_sums, orbit_product, pair_compare_entry, periodic_product_check,
    phase_stream, ratio_pair_compare, riemann_deviation, strip_count, Direction, Orbit,
    PairComparison,
};
use hrt_core::trigpoly::{lower_bound_certificate, zeros, Coefficients, OrbitPolynomial};
use hrt_core::{configspace, Error, RealParam, Result};
use num_complex::Complex64;
use rand::Rng;
use serde_json::json;

use report::{Baselines, RunReport, DEFAULT_FACTOR};

#[derive(Parser)]
#[command(
    name = "hrt",
    version,
    about = "Desk-scale experiments with orbit products, scale sequences, and zero geometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Default decimal precision (digits) for real literals without an
    /// explicit ~digits suffix.
    #[arg(long, global = true, env = "HRT_PRECISION")]
    precision: Option<u32>,

    /// Directory for CSV series.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// What to emit: the JSON report, CSV series, or both.
    #[arg(long, global = true, value_enum, default_value_t = OutputKind::Json)]
    output: OutputKind,

    /// Baseline table (JSON object: constant name -> recorded value).
    #[arg(long, global = true)]
    baseline: Option<PathBuf>,

    /// Tolerated growth of a fitted constant over its baseline.
    #[arg(long, global = true, default_value_t = DEFAULT_FACTOR)]
    factor: f64,

    /// Include wall-clock timings (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputKind {
    Json,
    Csv,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dir {
    Forward,
    Backward,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Direction {
        match d {
            Dir::Forward => Direction::Forward,
            Dir::Backward => Direction::Backward,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Mult,
    Recip,
    Both,
}

/// Shared polynomial flags. One-frequency factors use --A/--B, two-frequency
/// triples --c0/--c1/--c2, ratio factors all of --A/--B/--C/--D.
#[derive(clap::Args, Clone)]
struct PolyFlags {
    #[arg(long = "A")]
    a: Option<String>,
    #[arg(long = "B")]
    b: Option<String>,
    #[arg(long = "C")]
    c: Option<String>,
    #[arg(long = "D")]
    d: Option<String>,
    #[arg(long)]
    c0: Option<String>,
    #[arg(long)]
    c1: Option<String>,
    #[arg(long)]
    c2: Option<String>,
}

impl PolyFlags {
    fn build(&self) -> Result<OrbitPolynomial> {
        let cx = |v: &Option<String>| -> Result<Option<Complex64>> {
            v.as_deref().map(literal::parse_complex).transpose()
        };
        let (a, b, c, d) = (cx(&self.a)?, cx(&self.b)?, cx(&self.c)?, cx(&self.d)?);
        let (c0, c1, c2) = (cx(&self.c0)?, cx(&self.c1)?, cx(&self.c2)?);
        if c.is_some() || d.is_some() {
            match (a, b, c, d) {
                (Some(a), Some(b), Some(c), Some(d)) => Ok(OrbitPolynomial::Ratio { a, b, c, d }),
                _ => Err(Error::Parameter(
                    "a ratio factor needs all of --A --B --C --D".into(),
                )),
            }
        } else if c0.is_some() || c1.is_some() || c2.is_some() {
            match (c0, c1, c2) {
                (Some(c0), Some(c1), Some(c2)) => Ok(OrbitPolynomial::TwoFreq { c0, c1, c2 }),
                _ => Err(Error::Parameter(
                    "a two-frequency factor needs all of --c0 --c1 --c2".into(),
                )),
            }
        } else {
            match (a, b) {
                (Some(a), Some(b)) => Ok(OrbitPolynomial::OneFreq { a, b }),
                _ => Err(Error::Parameter(
                    "supply --A --B, or --c0 --c1 --c2, or --A --B --C --D".into(),
                )),
            }
        }
    }

    /// Two-frequency triple with the symmetric default (1,1,1).
    fn build_two_freq_or_default(&self) -> Result<OrbitPolynomial> {
        if self.c0.is_none() && self.c1.is_none() && self.c2.is_none() {
            let one = Complex64::new(1.0, 0.0);
            return Ok(OrbitPolynomial::TwoFreq {
                c0: one,
                c1: one,
                c2: one,
            });
        }
        match self.build()? {
            p @ OrbitPolynomial::TwoFreq { .. } => Ok(p),
            _ => Err(Error::Parameter(
                "this subcommand takes a two-frequency triple --c0 --c1 --c2".into(),
            )),
        }
    }

    fn echo(&self, config: &mut BTreeMap<String, String>) {
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                config.insert(k.into(), v.clone());
            }
        };
        put("A", &self.a);
        put("B", &self.b);
        put("C", &self.c);
        put("D", &self.d);
        put("c0", &self.c0);
        put("c1", &self.c1);
        put("c2", &self.c2);
    }
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction: partial quotients, convergents, trust depth.
    Cf {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Verify convergents minimize n -> ||n x|| by exhaustive exact scan.
    Approx {
        #[arg(long)]
        x: String,
        /// Single level; omitted scans levels upward until the cap.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        cap: u64,
    },
    /// min over 2 <= n <= N of n ln(n) ||n x||.
    Khinchine {
        #[arg(long)]
        x: String,
        #[arg(long = "N", default_value_t = 100_000)]
        n: u64,
    },
    /// Certified scale sequence for a frequency pair and gap parameter.
    Scales {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value = "1/4")]
        s: String,
        /// Number of entries.
        #[arg(long, default_value_t = 6)]
        k: usize,
        /// Search bound for scale lengths.
        #[arg(long = "N", default_value_t = 100_000)]
        n: u64,
        /// Keep only levels with N ln(N) ||N r|| below this cap.
        #[arg(long)]
        kappa_max: Option<f64>,
    },
    /// Zero set of a two-frequency coefficient triple.
    Zeros {
        #[arg(long)]
        c0: String,
        #[arg(long)]
        c1: String,
        #[arg(long)]
        c2: String,
    },
    /// Grid lower bound |p(x,y)| >= c * bound_form(x,y).
    Lowerbound {
        #[arg(long)]
        c0: String,
        #[arg(long)]
        c1: String,
        #[arg(long)]
        c2: String,
        #[arg(long, default_value_t = 2000)]
        grid: u32,
    },
    /// Log-domain product of a polynomial along an orbit.
    Orbit {
        #[command(flatten)]
        poly: PolyFlags,
        #[arg(long)]
        x: String,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, value_enum, default_value_t = Dir::Forward)]
        direction: Dir,
    },
    /// Reciprocal-sum averages with an exceptional set removed.
    Avg {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "0")]
        x: String,
        /// Number of singular points streamed from the orbit.
        #[arg(long = "N", default_value_t = 200)]
        n: u64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Fixed log-sum threshold coefficient (else fitted).
        #[arg(long)]
        c_log: Option<f64>,
        /// Fixed quadratic-sum threshold (else fitted).
        #[arg(long)]
        c_plain: Option<f64>,
    },
    /// Strip occupancy and forbidden-pair scan along the scale sequence.
    Strips {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value = "1/4")]
        s: String,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long = "N", default_value_t = 100_000)]
        n: u64,
        #[command(flatten)]
        poly: PolyFlags,
    },
    /// Exact count of orbit points inside a ball against the counting bound.
    Ballcount {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        /// Ball center.
        #[arg(long)]
        x: String,
        #[arg(long)]
        radius: f64,
        #[arg(long = "N", default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Profile of the distance factors A_n along one orbit.
    Anprofile {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[command(flatten)]
        poly: PolyFlags,
        #[arg(long)]
        x: String,
        #[arg(long = "N", default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
    /// Paired-orbit comparison across scales with a fitted envelope L.
    Pair {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value = "1/4")]
        s: String,
        /// Scale indices: `3` or `1..6` (1-based).
        #[arg(long, default_value = "1..6")]
        k: String,
        #[arg(long = "N", default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        poly: PolyFlags,
        /// Reciprocal-average threshold coefficient for the bad-set test.
        #[arg(long, default_value_t = 20.0)]
        exceptional_coef: f64,
        /// Compare even when the base point fails the bad-set test.
        #[arg(long)]
        force: bool,
    },
    /// Paired comparison of a ratio polynomial at one base point.
    Ratiopair {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value = "1/4")]
        s: String,
        /// Scale index (1-based).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long = "N", default_value_t = 100_000)]
        n: u64,
        #[arg(long)]
        x: String,
        #[command(flatten)]
        poly: PolyFlags,
        #[arg(long)]
        exceptional_coef: Option<f64>,
        #[arg(long)]
        force: bool,
    },
    /// Mirror-orbit identity: P(y-n) = conj(P(x+n)) and the two psi sums.
    Conjugate {
        #[arg(long)]
        x: String,
        /// Constant term (real).
        #[arg(long = "A")]
        a: String,
        /// Oscillating coefficient (complex).
        #[arg(long = "B")]
        b: String,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0)]
        nprime: i64,
        #[arg(long = "N", default_value_t = 100)]
        n: u64,
    },
    /// Riemann-sum deviation of psi = ln|C + D e(.)| over a convergent scale.
    Riemann {
        #[arg(long = "C")]
        c: String,
        #[arg(long = "D")]
        d: String,
        #[arg(long)]
        beta: String,
        /// Convergent denominator of beta.
        #[arg(long)]
        q: u64,
        /// Base point of the sample stream.
        #[arg(long, default_value = "0")]
        x: String,
    },
    /// Period-product identity and the two-sided comparison constant.
    Periodcheck {
        #[arg(long = "C")]
        c: String,
        #[arg(long = "D")]
        d: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        z: String,
        /// Backward-orbit offset.
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long, default_value = "100,1000,10000,100000")]
        ladder: String,
    },
    /// Growth of the infimum reciprocal average along a ladder of lengths.
    Diverge {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "100,1000,10000,100000")]
        ladder: String,
        #[arg(long, default_value_t = 1000)]
        grid: u64,
    },
    /// Decay-obstruction probe over the scale sequence.
    Probe {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value = "1/4")]
        s: String,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long = "N", default_value_t = 100_000)]
        n: u64,
        #[command(flatten)]
        poly: PolyFlags,
        #[arg(long, default_value_t = 64)]
        samples: u64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        /// Decay exponent to test against (else fitted per entry).
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long, value_enum, default_value_t = Convention::Both)]
        convention: Convention,
    },
    /// Reduce a four-point configuration to special form.
    Normalize {
        /// JSON array of four [t, xi] exact coordinate pairs.
        #[arg(long)]
        config: String,
    },
    /// Classify a four-point configuration and its lattice status.
    Classify {
        #[arg(long)]
        config: String,
    },
}

enum CsvSeries {
    None,
    Pair(Vec<PairComparison>),
    Diverge(hrt_core::orbit::DivergenceReport),
    Strips(hrt_core::orbit::StripReport),
}

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(2);
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let baselines = match &cli.baseline {
        Some(p) => Baselines::load(p, cli.factor)?,
        None => Baselines::none(cli.factor),
    };
    let started = Instant::now();
    let (mut report, series) = dispatch(&cli, &baselines)?;
    report.precision = cli.precision;
    if cli.timings {
        let mut t = BTreeMap::new();
        t.insert("run_ms".to_string(), started.elapsed().as_secs_f64() * 1e3);
        report.timings_ms = Some(t);
    }
    if matches!(cli.output, OutputKind::Csv | OutputKind::Both) {
        let written = match &series {
            CsvSeries::Pair(samples) => Some(emit::pair_csv(&cli.out, samples)?),
            CsvSeries::Diverge(rep) => Some(emit::diverge_csv(&cli.out, rep)?),
            CsvSeries::Strips(rep) => Some(emit::strips_csv(&cli.out, rep)?),
            CsvSeries::None => None,
        };
        match written {
            Some(path) => eprintln!("wrote {}", path.display()),
            None => eprintln!("note: this subcommand has no CSV series"),
        }
    }
    if matches!(cli.output, OutputKind::Json | OutputKind::Both) {
        println!("{}", report.to_json());
    }
    Ok(report.exit_code())
}

fn real(cli: &Cli, s: &str) -> Result<RealParam> {
    literal::parse_real(s, cli.precision)
}

fn build_scales(
    cli: &Cli,
    alpha: &str,
    beta: &str,
    s: &str,
    count: usize,
    bound: u64,
    mode: ScaleMode,
) -> Result<ScaleSequence> {
    let a = real(cli, alpha)?;
    let b = real(cli, beta)?;
    let gap = literal::parse_exact_rational(s)?;
    scale_sequence(&a, &b, &gap, count, bound, mode)
}

fn echo(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

#[allow(clippy::too_many_lines)]
fn dispatch(cli: &Cli, baselines: &Baselines) -> Result<(RunReport, CsvSeries)> {
    match &cli.command {
        Command::Cf { x, depth } => {
            let mut rep = RunReport::new(
                "cf",
                echo(&[("x", x.clone()), ("depth", depth.to_string())]),
            );
            let cf = continued_fraction(&real(cli, x)?, *depth)?;
            rep.set_result(&cf)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Approx { x, level, cap } => {
            let mut config = echo(&[("x", x.clone()), ("cap", cap.to_string())]);
            if let Some(l) = level {
                config.insert("level".into(), l.to_string());
            }
            let mut rep = RunReport::new("approx", config);
            let xr = real(cli, x)?;
            let mut checks = Vec::new();
            match level {
                Some(l) => checks.push(best_approximant_check(&xr, *l, *cap)?),
                None => {
                    let mut l = 0usize;
                    loop {
                        match best_approximant_check(&xr, l, *cap) {
                            Ok(c) => {
                                checks.push(c);
                                l += 1;
                            }
                            Err(Error::CapExceeded { .. }) | Err(Error::PrecisionExceeded(_)) => {
                                break
                            }
                            // A rational runs out of convergents; that ends
                            // the scan rather than failing it.
                            Err(Error::Parameter(_)) if !checks.is_empty() => break,
                            Err(e) => return Err(e),
                        }
                    }
                    if checks.is_empty() {
                        return Err(Error::Parameter(
                            "no level fits under the scan cap".into(),
                        ));
                    }
                }
            }
            for c in &checks {
                rep.check(
                    c.holds,
                    &format!("level {}: q = {} is not the scan minimum", c.level, c.q),
                );
            }
            rep.set_result(&checks)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Khinchine { x, n } => {
            let mut rep = RunReport::new(
                "khinchine",
                echo(&[("x", x.clone()), ("N", n.to_string())]),
            );
            let stat = min_weighted_norm(&real(cli, x)?, *n, Weight::LinearLog)?;
            rep.push_fitted(
                "khinchine_min",
                stat.min,
                format!("horizon N = {n}, argmin n = {}", stat.argmin),
                baselines,
            );
            rep.set_result(&stat)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Scales {
            alpha,
            beta,
            s,
            k,
            n,
            kappa_max,
        } => {
            let mut config = echo(&[
                ("alpha", alpha.clone()),
                ("beta", beta.clone()),
                ("s", s.clone()),
                ("k", k.to_string()),
                ("N", n.to_string()),
            ]);
            let mode = match kappa_max {
                Some(cap) => {
                    config.insert("kappa_max".into(), cap.to_string());
                    ScaleMode::LogLinear { kappa_max: *cap }
                }
                None => ScaleMode::Standard,
            };
            let mut rep = RunReport::new("scales", config);
            let seq = build_scales(cli, alpha, beta, s, *k, *n, mode)?;
            if let Some(why) = &seq.shortfall {
                rep.check(false, &format!("requested {k} entries: {why}"));
            }
            rep.push_fitted(
                "D",
                seq.d,
                format!(
                    "{} entries up to N = {}, scales {:?}",
                    seq.entries.len(),
                    n,
                    seq.entries.iter().map(|e| e.n).collect::<Vec<_>>()
                ),
                baselines,
            );
            rep.set_result(&seq)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Zeros { c0, c1, c2 } => {
            let mut rep = RunReport::new(
                "zeros",
                echo(&[("c0", c0.clone()), ("c1", c1.clone()), ("c2", c2.clone())]),
            );
            let coeffs = Coefficients::new(
                literal::parse_complex(c0)?,
                literal::parse_complex(c1)?,
                literal::parse_complex(c2)?,
            )?;
            rep.set_result(&zeros(&coeffs))?;
            Ok((rep, CsvSeries::None))
        }

        Command::Lowerbound { c0, c1, c2, grid } => {
            let mut rep = RunReport::new(
                "lowerbound",
                echo(&[
                    ("c0", c0.clone()),
                    ("c1", c1.clone()),
                    ("c2", c2.clone()),
                    ("grid", grid.to_string()),
                ]),
            );
            let coeffs = Coefficients::new(
                literal::parse_complex(c0)?,
                literal::parse_complex(c1)?,
                literal::parse_complex(c2)?,
            )?;
            let cert = lower_bound_certificate(&coeffs, *grid)?;
            rep.check(
                cert.c_emp > 0.0,
                "grid constant is not strictly positive",
            );
            if cert.c_emp > 0.0 {
                rep.push_fitted(
                    "c_emp_reciprocal",
                    1.0 / cert.c_emp,
                    format!("reciprocal of the {grid}x{grid} grid constant; growth means a weaker bound"),
                    baselines,
                );
            }
            rep.set_result(&cert)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Orbit {
            poly,
            x,
            alpha,
            beta,
            n,
            direction,
        } => {
            let mut config = echo(&[
                ("x", x.clone()),
                ("alpha", alpha.clone()),
                ("beta", beta.clone()),
                ("N", n.to_string()),
                (
                    "direction",
                    match direction {
                        Dir::Forward => "forward".into(),
                        Dir::Backward => "backward".into(),
                    },
                ),
            ]);
            poly.echo(&mut config);
            let mut rep = RunReport::new("orbit", config);
            let orbit = Orbit {
                x: real(cli, x)?,
                len: *n,
                direction: (*direction).into(),
                polynomial: poly.build()?,
                alpha: real(cli, alpha)?,
                beta: real(cli, beta)?,
            };
            rep.set_result(&orbit_product(&orbit)?)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Avg {
            alpha,
            x,
            n,
            delta,
            samples,
            seed,
            c_log,
            c_plain,
        } => {
            let mut config = echo(&[
                ("alpha", alpha.clone()),
                ("x", x.clone()),
                ("N", n.to_string()),
                ("delta", delta.to_string()),
                ("samples", samples.to_string()),
                ("seed", seed.to_string()),
            ]);
            let thresholds = match (c_log, c_plain) {
                (Some(a), Some(b)) => {
                    config.insert("c_log".into(), a.to_string());
                    config.insert("c_plain".into(), b.to_string());
                    Some((*a, *b))
                }
                (None, None) => None,
                _ => {
                    return Err(Error::Parameter(
                        "--c-log and --c-plain come together".into(),
                    ))
                }
            };
            let mut rep = RunReport::new("avg", config);
            rep.seed = Some(*seed);
            let points = phase_stream(&real(cli, alpha)?, &real(cli, x)?, *n, true)?;
            let est = generic_reciprocal_sums(&points, *delta, *samples, *seed, thresholds)?;
            let provenance =
                format!("{n} singular points, {samples} samples, seed {seed}, delta {delta}");
            rep.push_fitted("c_log", est.c_log, provenance.clone(), baselines);
            rep.push_fitted("c_plain", est.c_plain, provenance, baselines);
            if thresholds.is_some() {
                rep.check(
                    est.violating_fraction <= *delta,
                    &format!(
                        "violating fraction {:.4} exceeds the removed measure {delta}",
                        est.violating_fraction
                    ),
                );
            }
            rep.set_result(&est)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Strips {
            alpha,
            beta,
            s,
            k,
            n,
            poly,
        } => {
            let mut config = echo(&[
                ("alpha", alpha.clone()),
                ("beta", beta.clone()),
                ("s", s.clone()),
                ("k", k.to_string()),
                ("N", n.to_string()),
            ]);
            poly.echo(&mut config);
            let mut rep = RunReport::new("strips", config);
            let polynomial = poly.build_two_freq_or_default()?;
            let OrbitPolynomial::TwoFreq { c0, c1, c2 } = polynomial else {
                unreachable!()
            };
            let zs = zeros(&Coefficients::new(c0, c1, c2)?);
            let Some(&zero) = zs.zeros.first() else {
                return Err(Error::Parameter(
                    "the coefficient triple has no zeros; strips need a zero direction".into(),
                ));
            };
            let seq = build_scales(cli, alpha, beta, s, *k, *n, ScaleMode::Standard)?;
            if let Some(why) = &seq.shortfall {
                rep.check(false, &format!("requested {k} entries: {why}"));
            }
            let ar = real(cli, alpha)?;
            let br = real(cli, beta)?;
            let mut reports = Vec::new();
            let mut max_occ = 0u64;
            for e in &seq.entries {
                let sr = strip_count(&ar, &br, e.m, e.p, e.p_floor as u64, zero)?;
                rep.check(
                    sr.violations.is_empty(),
                    &format!(
                        "scale {}: {} forbidden same-strip pairs",
                        e.index,
                        sr.violations.len()
                    ),
                );
                max_occ = max_occ.max(sr.max_occupancy);
                reports.push(sr);
            }
            rep.push_fitted(
                "max_occupancy",
                max_occ as f64,
                format!(
                    "max over scales {:?} at zero ({:.6}, {:.6})",
                    seq.entries.iter().map(|e| e.n).collect::<Vec<_>>(),
                    zero.0,
                    zero.1
                ),
                baselines,
            );
            rep.set_result(&json!({ "zero": zero, "entries": reports }))?;
            let last = reports.pop().expect("at least one scale entry");
            Ok((rep, CsvSeries::Strips(last)))
        }

        Command::Ballcount {
            alpha,
            beta,
            x,
            radius,
            n,
            gamma,
            epsilon,
        } => {
            let mut rep = RunReport::new(
                "ballcount",
                echo(&[
                    ("alpha", alpha.clone()),
                    ("beta", beta.clone()),
                    ("x", x.clone()),
                    ("radius", radius.to_string()),
                    ("N", n.to_string()),
                    ("gamma", gamma.to_string()),
                    ("epsilon", epsilon.to_string()),
                ]),
            );
            let ball = ball_count(
                &real(cli, alpha)?,
                &real(cli, beta)?,
                &real(cli, x)?,
                *radius,
                *n,
                *gamma,
                *epsilon,
            )?;
            rep.check(ball.count_ok, "count exceeds the counting bound");
            rep.check(ball.gap_ok, "two members violate the separation bound");
            rep.push_fitted(
                "count_over_bound",
                ball.count as f64 / ball.bound,
                format!("count {} against bound {:.3} at N = {n}", ball.count, ball.bound),
                baselines,
            );
            rep.set_result(&ball)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Anprofile {
            alpha,
            beta,
            poly,
            x,
            n,
            gamma,
            epsilon,
            delta,
        } => {
            let mut config = echo(&[
                ("alpha", alpha.clone()),
                ("beta", beta.clone()),
                ("x", x.clone()),
                ("N", n.to_string()),
                ("gamma", gamma.to_string()),
                ("epsilon", epsilon.to_string()),
                ("delta", delta.to_string()),
            ]);
            poly.echo(&mut config);
            let mut rep = RunReport::new("anprofile", config);
            let polynomial = poly.build_two_freq_or_default()?;
            let OrbitPolynomial::TwoFreq { c0, c1, c2 } = polynomial else {
                unreachable!()
            };
            let prof = an_profile(
                &real(cli, alpha)?,
                &real(cli, beta)?,
                &Coefficients::new(c0, c1, c2)?,
                &real(cli, x)?,
                *n,
                *gamma,
                *epsilon,
                *delta,
            )?;
            rep.check(
                prof.profile <= prof.fallback_profile + 1e-9,
                "profile exceeds its quadratic fallback bound",
            );
            for set in &prof.small_sets {
                rep.check(
                    set.within_bound,
                    &format!("resonant set at xi = {:.6} exceeds its cardinality bound", set.xi),
                );
            }
            rep.push_fitted(
                "profile",
                prof.profile,
                format!("N = {n}, gamma = {gamma}, branch {}", prof.branch),
                baselines,
            );
            rep.set_result(&prof)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Pair {
            alpha,
            beta,
            s,
            k,
            n,
            samples,
            seed,
            poly,
            exceptional_coef,
            force,
        } => {
            let mut config = echo(&[
                ("alpha", alpha.clone()),
                ("beta", beta.clone()),
                ("s", s.clone()),
                ("k", k.clone()),
                ("N", n.to_string()),
                ("samples", samples.to_string()),
                ("seed", seed.to_string()),
                ("exceptional_coef", exceptional_coef.to_string()),
                ("force", force.to_string()),
            ]);
            poly.echo(&mut config);
            let mut rep = RunReport::new("pair", config);
            rep.seed = Some(*seed);
            let ks = literal::parse_k_range(k)?;
            let deepest = *ks.iter().max().expect("nonempty range");
            let seq = build_scales(cli, alpha, beta, s, deepest, *n, ScaleMode::Standard)?;
            if seq.entries.len() < deepest {
                return Err(Error::Parameter(format!(
                    "scale sequence has {} entries, range asks for {}",
                    seq.entries.len(),
                    deepest
                )));
            }
            let polynomial = poly.build_two_freq_or_default()?;
            let ar = real(cli, alpha)?;
            let br = real(cli, beta)?;
            let mut compared = Vec::new();
            let mut refused = 0u64;
            for &kk in &ks {
                let entry = &seq.entries[kk - 1];
                let exact = &seq.exact[kk - 1];
                let mut accepted = 0u64;
                let mut draw = 0u64;
                while accepted < *samples {
                    if draw >= samples.saturating_mul(16) {
                        return Err(Error::NoAdmissibleSample {
                            budget: draw,
                            context: format!("scale {kk}: bad-set refusals dominate"),
                        });
                    }
                    let mut rng = sample_rng(*seed, kk as u64 * 1_000_000 + draw);
                    draw += 1;
                    let xr = RealParam::parse(
                        &format!("{}/131072", rng.gen_range(1..131_072u32)),
                        None,
                    )?;
                    match pair_compare_entry(
                        &ar,
                        &br,
                        &polynomial,
                        &exact.p,
                        entry.p_floor as u64,
                        entry.m,
                        seq.d,
                        kk,
                        &xr,
                        Some(*exceptional_coef),
                        *force,
                    ) {
                        Ok(cmp) => {
                            rep.check(
                                cmp.step_bound_ok,
                                &format!(
                                    "scale {kk}: per-step displacement {:.3e} over budget {:.3e}",
                                    cmp.step_lhs, cmp.step_rhs
                                ),
                            );
                            compared.push(cmp);
                            accepted += 1;
                        }
                        Err(Error::Parameter(_)) => refused += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
            let l = fit_l(&compared);
            rep.push_fitted(
                "L",
                l,
                format!(
                    "scales {ks:?}, {} comparisons ({refused} refused), seed {seed}, P_k in {:?}",
                    compared.len(),
                    ks.iter().map(|&kk| seq.entries[kk - 1].n).collect::<Vec<_>>()
                ),
                baselines,
            );
            rep.set_result(&json!({
                "d": seq.d,
                "refused": refused,
                "samples": compared,
            }))?;
            Ok((rep, CsvSeries::Pair(compared)))
        }

        Command::Ratiopair {
            alpha,
            beta,
            s,
            k,
            n,
            x,
            poly,
            exceptional_coef,
            force,
        } => {
            let mut config = echo(&[
                ("alpha", alpha.clone()),
                ("beta", beta.clone()),
                ("s", s.clone()),
                ("k", k.to_string()),
                ("N", n.to_string()),
                ("x", x.clone()),
                ("force", force.to_string()),
            ]);
            if let Some(c) = exceptional_coef {
                config.insert("exceptional_coef".into(), c.to_string());
            }
            poly.echo(&mut config);
            let mut rep = RunReport::new("ratiopair", config);
            if *k == 0 {
                return Err(Error::Parameter("scale indices are 1-based".into()));
            }
            let seq = build_scales(cli, alpha, beta, s, *k, *n, ScaleMode::Standard)?;
            if seq.entries.len() < *k {
                return Err(Error::Parameter(format!(
                    "scale sequence has {} entries, index asks for {k}",
                    seq.entries.len()
                )));
            }
            let cmp = ratio_pair_compare(
                &real(cli, alpha)?,
                &real(cli, beta)?,
                &poly.build()?,
                &seq,
                *k - 1,
                &real(cli, x)?,
                *exceptional_coef,
                *force,
            )?;
            rep.check(
                cmp.step_bound_ok,
                &format!(
                    "per-step displacement {:.3e} over budget {:.3e}",
                    cmp.step_lhs, cmp.step_rhs
                ),
            );
            if cmp.log_p > 0.0 {
                rep.push_fitted(
                    "L",
                    cmp.log_ratio.abs() / cmp.log_p,
                    format!("single comparison at scale {k}, P = {}", cmp.p),
                    baselines,
                );
            }
            rep.set_result(&cmp)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Conjugate {
            x,
            a,
            b,
            alpha,
            nprime,
            n,
        } => {
            let mut rep = RunReport::new(
                "conjugate",
                echo(&[
                    ("x", x.clone()),
                    ("A", a.clone()),
                    ("B", b.clone()),
                    ("alpha", alpha.clone()),
                    ("nprime", nprime.to_string()),
                    ("N", n.to_string()),
                ]),
            );
            let av = literal::parse_complex(a)?;
            if av.im != 0.0 {
                return Err(Error::Parameter(
                    "the constant term --A must be real".into(),
                ));
            }
            let conj = conjugate_select(
                &real(cli, x)?,
                av.re,
                literal::parse_complex(b)?,
                &real(cli, alpha)?,
                *nprime,
                *n,
            )?;
            rep.check(
                conj.pointwise_residual <= 1e-10,
                &format!("pointwise residual {:.3e} over 1e-10", conj.pointwise_residual),
            );
            rep.check(
                conj.sum_residual <= 1e-8,
                &format!("mirrored sum residual {:.3e} over 1e-8", conj.sum_residual),
            );
            rep.set_result(&conj)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Riemann { c, d, beta, q, x } => {
            let mut rep = RunReport::new(
                "riemann",
                echo(&[
                    ("C", c.clone()),
                    ("D", d.clone()),
                    ("beta", beta.clone()),
                    ("q", q.to_string()),
                    ("x", x.clone()),
                ]),
            );
            let out = riemann_deviation(
                literal::parse_complex(c)?,
                literal::parse_complex(d)?,
                &real(cli, beta)?,
                *q,
                &real(cli, x)?,
            )?;
            rep.check(out.residues_covered, "orbit misses residues mod q");
            rep.check(
                out.jensen_residual <= 1e-6,
                &format!(
                    "quadrature differs from ln max(|C|,|D|) by {:.3e}",
                    out.jensen_residual
                ),
            );
            rep.push_fitted(
                "deviation",
                out.deviation,
                format!("q = {q}, base point {x}"),
                baselines,
            );
            rep.set_result(&out)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Periodcheck {
            c,
            d,
            beta,
            x,
            z,
            m,
            ladder,
        } => {
            let mut rep = RunReport::new(
                "periodcheck",
                echo(&[
                    ("C", c.clone()),
                    ("D", d.clone()),
                    ("beta", beta.clone()),
                    ("x", x.clone()),
                    ("z", z.clone()),
                    ("m", m.to_string()),
                    ("ladder", ladder.clone()),
                ]),
            );
            let rungs = literal::parse_ladder(ladder)?;
            let out = periodic_product_check(
                literal::parse_complex(c)?,
                literal::parse_complex(d)?,
                &real(cli, beta)?,
                &real(cli, x)?,
                &real(cli, z)?,
                *m,
                &rungs,
            )?;
            rep.check(
                out.periodicity_residual <= 1e-10,
                &format!(
                    "period product moved by {:.3e} under a unit shift",
                    out.periodicity_residual
                ),
            );
            let prov = format!("branch {}, ladder {rungs:?}, offset m = {m}", out.branch);
            rep.push_fitted("K_abs", out.k_mean.abs(), prov.clone(), baselines);
            rep.push_fitted("K_spread", out.k_spread, prov, baselines);
            rep.set_result(&out)?;
            Ok((rep, CsvSeries::None))
        }

        Command::Diverge {
            alpha,
            ladder,
            grid,
        } => {
            let mut rep = RunReport::new(
                "diverge",
                echo(&[
                    ("alpha", alpha.clone()),
                    ("ladder", ladder.clone()),
                    ("grid", grid.to_string()),
                ]),
            );
            let rungs = literal::parse_ladder(ladder)?;
            let out = divergence_demo(&real(cli, alpha)?, &rungs, *grid)?;
            if out.irrational {
                for w in out.rows.windows(2) {
                    rep.check(
                        w[1].inf_avg > w[0].inf_avg,
                        &format!(
                            "infimum average fails to grow between N = {} and N = {}",
                            w[0].n, w[1].n
                        ),
                    );
                }
                let min_ratio = out
                    .rows
                    .iter()
                    .map(|r| r.ratio_to_log)
                    .fold(f64::INFINITY, f64::min);
                if min_ratio > 0.0 {
                    rep.push_fitted(
                        "ratio_reciprocal",
                        1.0 / min_ratio,
                        format!(
                            "reciprocal of min inf_avg / ln(m_N) over ladder {rungs:?}; growth means weaker divergence"
                        ),
                        baselines,
                    );
                } else {
                    rep.check(false, "infimum average ratio is not positive");
                }
            }
            rep.set_result(&out)?;
            Ok((rep, CsvSeries::Diverge(out)))
        }

        Command::Probe {
            alpha,
            beta,
            s,
            k,
            n,
            poly,
            samples,
            delta,
            seed,
            l,
            convention,
        } => {
            let mut config = echo(&[
                ("alpha", alpha.clone()),
                ("beta", beta.clone()),
                ("s", s.clone()),
                ("k", k.to_string()),
                ("N", n.to_string()),
                ("samples", samples.to_string()),
                ("delta", delta.to_string()),
                ("seed", seed.to_string()),
                (
                    "convention",
                    match convention {
                        Convention::Mult => "mult".into(),
                        Convention::Recip => "recip".into(),
                        Convention::Both => "both".into(),
                    },
                ),
            ]);
            if let Some(l) = l {
                config.insert("L".into(), l.to_string());
            }
            poly.echo(&mut config);
            let mut rep = RunReport::new("probe", config);
            rep.seed = Some(*seed);
            let seq = build_scales(cli, alpha, beta, s, *k, *n, ScaleMode::Standard)?;
            let polynomial = poly.build_two_freq_or_default()?;
            match decay_probe(
                &real(cli, alpha)?,
                &real(cli, beta)?,
                &polynomial,
                &seq,
                *samples,
                *delta,
                *seed,
                *l,
            ) {
                Ok(entries) => {
                    for e in &entries {
                        if matches!(convention, Convention::Mult | Convention::Both) {
                            rep.check(
                                e.margin_mult >= 0.0,
                                &format!(
                                    "scale {}: multiplicative margin {:.3e} below the decay line",
                                    e.k, e.margin_mult
                                ),
                            );
                        }
                        if matches!(convention, Convention::Recip | Convention::Both) {
                            rep.check(
                                e.margin_recip >= 0.0,
                                &format!(
                                    "scale {}: reciprocal margin {:.3e} below the decay line",
                                    e.k, e.margin_recip
                                ),
                            );
                        }
                    }
                    rep.set_result(&json!({ "admissible": true, "entries": entries }))?;
                }
                Err(Error::NoAdmissibleSample { budget, context }) => {
                    // The probe's designed outcome: the threshold refuses
                    // every draw, demonstrating the obstruction.
                    rep.set_result(&json!({
                        "admissible": false,
                        "budget": budget,
                        "context": context,
                    }))?;
                }
                Err(e) => return Err(e),
            }
            Ok((rep, CsvSeries::None))
        }

        Command::Normalize { config } => {
            let mut rep =
                RunReport::new("normalize", echo(&[("config", config.clone())]));
            let parsed = configspace::parse_configuration(config)?;
            let (map, special) = configspace::normalize(&parsed)?;
            rep.set_result(&json!({
                "configuration": parsed,
                "map": map,
                "special": special,
            }))?;
            Ok((rep, CsvSeries::None))
        }

        Command::Classify { config } => {
            let mut rep = RunReport::new("classify", echo(&[("config", config.clone())]));
            let parsed = configspace::parse_configuration(config)?;
            rep.set_result(&parsed)?;
            Ok((rep, CsvSeries::None))
        }
    }
}
