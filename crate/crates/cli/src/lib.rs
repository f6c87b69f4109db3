//! The `spectrunc` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or input error, 3 resource cap.
//! Output is buffered and only written once a command has succeeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use spectrunc_core::frame::{SolverOptions, SolverStatus};
use spectrunc_core::groupalg::{fejer_kernel, lipnorm, OpNormOptions};
use spectrunc_core::harness::{self, choose_s, parse_lambda_range, ExperimentConfig, SChoice};
use spectrunc_core::io;
use spectrunc_core::linalg::{spectral_norm, CMatrix};
use spectrunc_core::qmetric::{self, Domain, DistanceOptions, EpsilonSearch, State};
use spectrunc_core::scalar::format_sig;
use spectrunc_core::truncation::{self, compress, dirac_commutator, reconstruct, truncated_lipnorm};
use spectrunc_core::{
    AlgebraElementF64, CayleyGraph, Element, Error, ExactToeplitz, Group, ToeplitzF64,
};

const DIGITS: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "spectrunc", version, about = "Spectral truncations of group algebras of polynomial-growth groups")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared with experiment config files; flags override the file.
#[derive(Args, Debug, Default)]
struct Common {
    /// Group key: `z:<d>` or `heisenberg`.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Derivative order, or `auto`.
    #[arg(long, global = true)]
    s: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random starts for searches.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Config file, `key = value` lines or JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Report format for `converge`: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size of the ball B_R (and its elements with --list).
    Ball {
        #[arg(long, visible_alias = "lambda")]
        radius: u32,
        #[arg(long)]
        list: bool,
    },
    /// Ball sizes, boundary ratios and fitted growth exponents up to a radius.
    Growth {
        #[arg(long, visible_alias = "lambda")]
        radius: u32,
    },
    /// Fejér kernel values, exact; the whole kernel unless --at is given.
    Fejer {
        #[arg(long, visible_alias = "radius")]
        lambda: u32,
        /// Group element, coordinates separated by commas.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// L_s of an element file, or L_{s,Λ} of a Toeplitz file.
    Lipnorm {
        #[arg(long)]
        input: PathBuf,
        /// Largest compression radius for full-algebra norms.
        #[arg(long)]
        r_max: Option<u32>,
    },
    /// q_Λ of an element file.
    Truncate {
        #[arg(long, visible_alias = "radius")]
        lambda: u32,
        #[arg(long)]
        input: PathBuf,
    },
    /// r_Λ of a Toeplitz file.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
    },
    /// The commutator with the truncated Dirac operator, as a sparse matrix.
    Commutator {
        #[arg(long)]
        input: PathBuf,
        /// Print only its operator norm.
        #[arg(long)]
        norm: bool,
    },
    /// Lip-norm distance between two states of the truncation.
    Distance {
        #[arg(long, visible_alias = "radius")]
        lambda: u32,
        /// Vector (element file, normalized) or density matrix (sparse matrix file).
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        /// Also run the brute-force oracle when the instance is small enough.
        #[arg(long)]
        oracle: bool,
        /// Write the witness operator to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// ε estimates and the GH bound at one radius.
    Epsilon {
        #[arg(long, visible_alias = "radius")]
        lambda: u32,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Convergence sweep over a range of radii.
    Converge {
        /// `2,4,8,16` or `2..16`.
        #[arg(long)]
        lambda_range: Option<String>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Also write a gnuplot script next to CSV output.
        #[arg(long)]
        gnuplot: bool,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) if e.is_resource_cap() => 3,
            Failure::Core(Error::Io(_)) => 1,
            Failure::Core(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

/// Run one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            if let Some(path) = cli.common.output.as_ref().filter(|_| !matches!(cli.command, Command::Converge { .. })) {
                if let Err(e) = std::fs::write(path, &text) {
                    let _ = writeln!(err, "error: {e}");
                    return 1;
                }
                return 0;
            }
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

/// Defaults, then the config file, then flags.
fn layered_config(c: &Common) -> std::result::Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &c.config {
        cfg.apply_text(&std::fs::read_to_string(path).map_err(Error::from)?)?;
    }
    if let Some(g) = &c.group {
        cfg.group = g.parse()?;
    }
    if let Some(s) = &c.s {
        cfg.s = s.parse()?;
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = c.trials {
        cfg.trials = v;
    }
    if let Some(v) = c.tol {
        cfg.tol = v;
    }
    if let Some(p) = &c.output {
        cfg.output = Some(p.clone());
    }
    if let Some(f) = &c.format {
        cfg.format = f.parse()?;
    }
    Ok(cfg)
}

fn resolve_s(cfg: &ExperimentConfig) -> std::result::Result<u32, Failure> {
    Ok(match cfg.s {
        SChoice::Fixed(s) => s,
        SChoice::Auto => choose_s(&cfg.group)?,
    })
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    Ok(std::fs::read_to_string(path).map_err(Error::from)?)
}

fn parse_coords(text: &str, arity: usize) -> std::result::Result<Element, Failure> {
    let coords = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| Failure::Usage(format!("bad coordinate `{t}`"))))
        .collect::<std::result::Result<Vec<i64>, _>>()?;
    if coords.len() != arity {
        return Err(Failure::Usage(format!("expected {arity} coordinates, got {}", coords.len())));
    }
    Ok(Element::new(&coords))
}

fn execute(cli: &Cli) -> Outcome {
    let cfg = layered_config(&cli.common)?;
    let g = CayleyGraph::with_cap(cfg.group, cfg.ball_cap);
    match &cli.command {
        Command::Ball { radius, list } => {
            let ball = g.ball(*radius)?;
            let mut out = format!("{}\n", ball.len());
            if *list {
                for (x, l) in ball.iter() {
                    out.push_str(&format!("{l} {x}\n"));
                }
            }
            Ok(out)
        }
        Command::Growth { radius } => {
            let report = g.growth_report(*radius)?;
            let mut out = String::from("radius ball_size boundary_ratio\n");
            for r in 0..=*radius {
                out.push_str(&format!("{r} {} {}\n", report.ball_sizes[r as usize], report.boundary_ratio(r)));
            }
            out.push_str(&format!("fitted_beta {}\n", format_sig(report.fitted_beta, DIGITS)));
            out.push_str(&format!("fitted_degree {}\n", format_sig(report.fitted_degree, DIGITS)));
            out.push_str(&format!("fit_range {} {}\n", report.fit_range.0, report.fit_range.1));
            Ok(out)
        }
        Command::Fejer { lambda, at } => {
            let kernel = fejer_kernel(&g, *lambda)?;
            match at {
                Some(text) => {
                    let x = parse_coords(text, g.group().arity())?;
                    g.check(&x)?;
                    Ok(format!("{}\n", kernel.value(&x)))
                }
                None => {
                    let ball = g.ball(2 * lambda)?;
                    let mut out = format!("# folner_eps {}\n", kernel.folner_epsilon());
                    for x in ball.elements() {
                        out.push_str(&format!("{} 0 {x}\n", kernel.value(x)));
                    }
                    Ok(out)
                }
            }
        }
        Command::Lipnorm { input, r_max } => {
            let text = read(input)?;
            let s = resolve_s(&cfg)?;
            if io::has_header(&text, "lambda") {
                let t: ToeplitzF64 = io::parse_toeplitz(&text, &g)?;
                return Ok(format!("{}\n", format_sig(truncated_lipnorm(&t, s, &g)?, DIGITS)));
            }
            let f: AlgebraElementF64 = io::parse_element(&text, &g)?;
            let opts = OpNormOptions { tol: cli.common.tol.unwrap_or(OpNormOptions::default().tol), r_max: *r_max };
            let est = lipnorm(&f, s, &opts, &g)?;
            let mut out = format!("{}\n", format_sig(est.estimate, DIGITS));
            if !est.converged {
                out.push_str(&format!("# not converged at radius {}\n", est.last_r));
            }
            Ok(out)
        }
        Command::Truncate { lambda, input } => {
            let text = read(input)?;
            match io::parse_element::<spectrunc_core::ExactScalar, _>(&text, &g) {
                Ok(f) => Ok(io::format_toeplitz(&compress(&f, *lambda, &g)?)),
                Err(_) => {
                    let f: AlgebraElementF64 = io::parse_element(&text, &g)?;
                    Ok(io::format_toeplitz(&compress(&f, *lambda, &g)?))
                }
            }
        }
        Command::Reconstruct { input } => {
            let text = read(input)?;
            match io::parse_toeplitz::<spectrunc_core::ExactScalar, _>(&text, &g) {
                Ok(t) => Ok(io::format_element::<spectrunc_core::ExactScalar>(&reconstruct(&t, &g)?)),
                Err(Error::Parse { .. }) => {
                    let t: ToeplitzF64 = io::parse_toeplitz(&text, &g)?;
                    Ok(io::format_element(&reconstruct(&t, &g)?))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Commutator { input, norm } => {
            let text = read(input)?;
            let exact: Option<ExactToeplitz> = match io::parse_toeplitz(&text, &g) {
                Ok(t) => Some(t),
                Err(Error::Parse { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            match exact {
                Some(t) => {
                    let m = dirac_commutator(&t, &g)?;
                    if *norm {
                        return Ok(format!("{}\n", format_sig(spectral_norm(&m.map(|v| spectrunc_core::Scalar::to_c64(&v))), DIGITS)));
                    }
                    Ok(io::format_matrix(&m))
                }
                None => {
                    let t: ToeplitzF64 = io::parse_toeplitz(&text, &g)?;
                    let m = dirac_commutator(&t, &g)?;
                    if *norm {
                        return Ok(format!("{}\n", format_sig(truncation::commutator_seminorm(&t, &g)?, DIGITS)));
                    }
                    Ok(io::format_matrix(&m))
                }
            }
        }
        Command::Distance { lambda, phi, psi, oracle, witness } => {
            let s = resolve_s(&cfg)?;
            let load = |path: &Path| -> std::result::Result<State, Failure> {
                let text = read(path)?;
                if io::has_header(&text, "dim") {
                    let rho: CMatrix = io::parse_matrix(&text)?;
                    Ok(State::density(rho, *lambda, &g)?)
                } else {
                    let xi: AlgebraElementF64 = io::parse_element(&text, &g)?;
                    Ok(State::normalized_vector(xi, Domain::Truncated(*lambda), &g)?)
                }
            };
            let (a, b) = (load(phi)?, load(psi)?);
            let opts = DistanceOptions {
                solver: SolverOptions { starts: cfg.trials, seed: cfg.seed, ..SolverOptions::default() },
                check_oracle: *oracle,
                ..DistanceOptions::default()
            };
            let d = qmetric::lip_distance(&a, &b, s, *lambda, &opts, &g)?;
            if let Some(path) = witness {
                std::fs::write(path, io::format_toeplitz(&d.witness)).map_err(Error::from)?;
            }
            let status = match d.status {
                SolverStatus::Converged => "converged",
                SolverStatus::IterationCap => "iteration-cap",
            };
            let mut out = format!("distance {}\nstatus {status}\n", format_sig(d.value, DIGITS));
            if let Some(gap) = d.oracle_gap {
                out.push_str(&format!("oracle_gap {}\n", format_sig(gap, DIGITS)));
            }
            Ok(out)
        }
        Command::Epsilon { lambda, max_iters } => {
            let s = resolve_s(&cfg)?;
            let mut search: EpsilonSearch = cfg.search();
            if let Some(m) = max_iters {
                search.solver.max_iters = *m;
            }
            let full = qmetric::epsilon_full(&g, *lambda, s, &search)?;
            let trunc = qmetric::epsilon_truncated(&g, *lambda, s, &search)?;
            let gh = qmetric::gh_bound(full.value, trunc.value)?;
            let f = |v: f64| format_sig(v, DIGITS);
            Ok(format!(
                "s {s}\neps_full {}\neps_trunc {}\ngh_bound {}\neps_full_probe {}\neps_trunc_probe {}\nstarts {}\nmax_iters {}\ncompression_radius {}\n",
                f(full.value),
                f(trunc.value),
                f(gh),
                f(full.probe_floor),
                f(trunc.probe_floor),
                full.starts,
                full.max_iters,
                full.compression_radius
            ))
        }
        Command::Converge { lambda_range, max_iters, gnuplot } => {
            let mut cfg = cfg;
            if let Some(r) = lambda_range {
                cfg.lambda_range = parse_lambda_range(r)?;
            }
            if let Some(m) = max_iters {
                cfg.max_iters = *m;
            }
            cfg.gnuplot |= *gnuplot;
            let report = harness::run_convergence(&cfg)?;
            match &cfg.output {
                Some(path) => {
                    let written = harness::export_report(&report, cfg.format, path, cfg.gnuplot)?;
                    Ok(written.iter().map(|p| format!("{}\n", p.display())).collect())
                }
                None => Ok(harness::render_report(&report, cfg.format)?),
            }
        }
    }
}
