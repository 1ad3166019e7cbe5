use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cpbound::bqp::{is_facet, validate_inequality, write_facet_list};
use cpbound::certio;
use cpbound::configs::{
    distance_graph, generate_config, maximum_independent_set, read_config, ConfigName, FiniteGraph, PointConfig,
    DEFAULT_MATCH_TOL,
};
use cpbound::conic::{uniform_grid, DualCertificate};
use cpbound::finitetheta::{theta_finite, ThetaCone};
use cpbound::profiles::{centered_subgraph_profile, ConstraintProfile};
use cpbound::separation::{parse_classes, separation_loop, DualProblem, LoopOptions, MIN_SEPARATION};
use cpbound::specfun::{
    bessel_eval, gamma_fn, jacobi_eval, omega_deriv, omega_eval, surface_measure, Precision,
};
use cpbound::verifier::{
    verify_rn, verify_sphere, Status, DEFAULT_GRID_ACCURACY, DEFAULT_SLACK,
};

#[derive(Parser)]
#[command(name = "cpbound", version, about = "Conic upper bounds for distance-avoiding sets, with certificate verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a special function at high precision
    Specfun {
        #[command(subcommand)]
        cmd: SpecfunCmd,
    },
    /// Solve a dual program with separation rounds and write its certificate
    Bound {
        #[command(subcommand)]
        cmd: BoundCmd,
    },
    /// Verify a certificate, repairing it if needed
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// List inequalities of a class, optionally checking validity and facets
    Facets {
        /// Class list, e.g. `ie:3-6`, `clique:5`, `hyper:5`, `clique(6,2)`
        #[arg(long)]
        class: String,
        #[arg(long)]
        check: bool,
    },
    /// Independence number of the distance graph of a point file
    Alpha {
        points: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        forbidden: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_MATCH_TOL)]
        tol: f64,
    },
    /// Theta number of a small graph over the PSD or doubly nonnegative cone
    Theta {
        graph: PathBuf,
        #[arg(long, default_value = "psd")]
        cone: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    Jacobi,
    Omega,
    OmegaDeriv,
    Bessel,
    Gamma,
    Surface,
}

#[derive(Subcommand)]
enum SpecfunCmd {
    Eval {
        #[arg(value_enum)]
        function: Function,
        /// Dimension n (jacobi, omega, omega-deriv, surface)
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Degree k (jacobi)
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Order ν (bessel)
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        /// Argument
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 128)]
        precision_bits: u32,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 15)]
    rounds: usize,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Inequality classes searched in every round
    #[arg(long, default_value = "ie:2-5")]
    classes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Smallest pairwise distance in a separating configuration
    #[arg(long, default_value_t = MIN_SEPARATION)]
    min_separation: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BoundCmd {
    Sphere {
        #[command(flatten)]
        search: SearchArgs,
        /// cos θ of the forbidden inner product
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta_cos: f64,
        #[arg(long, default_value_t = 2000)]
        degree: usize,
    },
    Rn {
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 50.0)]
        grid_max: f64,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        /// Configurations whose unit-distance subgraphs give initial constraints
        #[arg(long, value_delimiter = ',')]
        graphs: Vec<String>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Sphere {
        cert: PathBuf,
        #[arg(long, default_value_t = 128)]
        precision_bits: u32,
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
        /// Where to write the report (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Rn {
        cert: PathBuf,
        #[arg(long = "L", default_value_t = 30.0)]
        l: f64,
        #[arg(long, default_value_t = 128)]
        precision_bits: u32,
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_ACCURACY)]
        grid_accuracy: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Specfun { cmd } => specfun(cmd),
        Cmd::Bound { cmd } => bound(cmd),
        Cmd::Verify { cmd } => verify(cmd),
        Cmd::Facets { class, check } => facets(&class, check),
        Cmd::Alpha { points, forbidden, tol } => alpha(&points, &forbidden, tol),
        Cmd::Theta { graph, cone } => theta(&graph, &cone),
    }
}

fn specfun(cmd: SpecfunCmd) -> Result<ExitCode> {
    let SpecfunCmd::Eval {
        function,
        n,
        k,
        nu,
        t,
        precision_bits,
    } = cmd;
    let prec = Precision::new(precision_bits)?;
    let v = match function {
        Function::Jacobi => jacobi_eval(n, k, t, prec)?,
        Function::Omega => omega_eval(n, t, prec)?,
        Function::OmegaDeriv => omega_deriv(n, t, prec)?,
        Function::Bessel => bessel_eval(nu, t, prec)?,
        Function::Gamma => gamma_fn(t, prec)?,
        Function::Surface => surface_measure(n, prec)?,
    };
    // digits carried by the working precision
    let digits = (precision_bits as f64 * std::f64::consts::LOG10_2).ceil() as usize;
    println!("{v:.digits$}");
    Ok(ExitCode::SUCCESS)
}

fn loop_options(s: &SearchArgs) -> LoopOptions {
    LoopOptions {
        rounds: s.rounds,
        restarts: s.restarts,
        seed: s.seed,
        min_separation: s.min_separation,
        ..LoopOptions::default()
    }
}

/// Subgraph constraint for a named configuration: U scaled to unit minimal
/// distance, x0 at its centroid.
fn subgraph_profile(name: &str, n: usize) -> Result<ConstraintProfile> {
    let which = match name {
        "simplex" => ConfigName::Simplex(n),
        other => other.parse()?,
    };
    let cfg = generate_config(&which)?.as_euclidean();
    if cfg.dim() != n {
        bail!("configuration {name} lives in dimension {}, not {n}", cfg.dim());
    }
    Ok(centered_subgraph_profile(&cfg)?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bound(cmd: BoundCmd) -> Result<ExitCode> {
    let (problem, search, initial) = match cmd {
        BoundCmd::Sphere {
            search,
            theta_cos,
            degree,
        } => (
            DualProblem::Sphere {
                n: search.n,
                cos_theta: theta_cos,
                degree,
            },
            search,
            Vec::new(),
        ),
        BoundCmd::Rn {
            search,
            grid_max,
            grid_step,
            graphs,
        } => {
            let mut initial = Vec::new();
            for g in &graphs {
                match subgraph_profile(g, search.n) {
                    Ok(p) => initial.push(p),
                    Err(e) => eprintln!("skipping {g}: {e:#}"),
                }
            }
            (
                DualProblem::Rn {
                    n: search.n,
                    grid: uniform_grid(grid_step, grid_max)?,
                },
                search,
                initial,
            )
        }
    };
    let classes = if search.rounds == 0 { Vec::new() } else { parse_classes(&search.classes)? };
    let out = separation_loop(&problem, &initial, &classes, loop_options(&search))?;
    for h in &out.history {
        eprintln!(
            "round {:>3}  objective {:.12}  added {}  best violation {:.3e}",
            h.round, h.objective, h.added, h.best_violation
        );
    }
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("objective (unverified) {}", out.certificate.objective);
    write_out(search.out.as_deref(), &certio::encode(&out.certificate))?;
    Ok(ExitCode::SUCCESS)
}

fn load(path: &Path) -> Result<DualCertificate> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(certio::decode(&text)?)
}

fn verify(cmd: VerifyCmd) -> Result<ExitCode> {
    let (report, out) = match cmd {
        VerifyCmd::Sphere {
            cert,
            precision_bits,
            slack,
            out,
        } => (verify_sphere(&load(&cert)?, Precision::new(precision_bits)?, slack)?, out),
        VerifyCmd::Rn {
            cert,
            l,
            precision_bits,
            slack,
            grid_accuracy,
            out,
        } => (
            verify_rn(&load(&cert)?, l, Precision::new(precision_bits)?, slack, grid_accuracy)?,
            out,
        ),
    };
    write_out(out.as_deref(), &certio::encode_report(&report))?;
    let (word, code) = match report.status {
        Status::Verified => ("verified", 0),
        Status::Repaired => ("repaired and verified", 2),
    };
    eprintln!("{word}: rigorous bound {}", report.rigorous_bound);
    Ok(ExitCode::from(code))
}

fn facets(class: &str, check: bool) -> Result<ExitCode> {
    let ineqs = parse_classes(class)?;
    if !check {
        print!("{}", write_facet_list(&ineqs)?);
        return Ok(ExitCode::SUCCESS);
    }
    let mut ok = true;
    for q in &ineqs {
        let v = validate_inequality(q)?;
        let facet = if q.size() <= 10 { Some(is_facet(q)?) } else { None };
        ok &= v.valid;
        println!(
            "{:<28} valid {:<5} facet {}",
            q.name(),
            v.valid,
            facet.map_or("skipped".into(), |f| f.to_string())
        );
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn alpha(points: &Path, forbidden: &[f64], tol: f64) -> Result<ExitCode> {
    let cfg: PointConfig = read_config(points)?;
    let g = distance_graph(&cfg, forbidden, tol);
    let set = maximum_independent_set(&g)?;
    println!("vertices {}  edges {}  alpha {}", g.vertex_count(), g.edges().len(), set.len());
    println!("independent set {set:?}");
    Ok(ExitCode::SUCCESS)
}

fn theta(path: &Path, cone: &str) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let g = FiniteGraph::parse(&text)?;
    let cone: ThetaCone = cone.parse()?;
    let r = theta_finite(&g, cone)?;
    println!(
        "theta({cone}) {:.10}  min eigenvalue {:.3e}  cuts {}",
        r.value, r.min_eigenvalue, r.cuts
    );
    Ok(ExitCode::SUCCESS)
}
