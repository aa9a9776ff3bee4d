use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use framebound::bounds::tables::{buckling_table, plate_table};
use framebound::bounds::{
    buckling_bound, fractional_bound, fractional_ellipse_perimeter_bound, john_domain_bound, klein_gordon_bound,
    plate_bound, subordinator_bound,
};
use framebound::frames::{
    fp_from_matrix, fp_montecarlo, fp_sphere_2d, nontight_sandwich, verify_tight_frame, DEFAULT_VERIFY_TOL,
};
use framebound::groups::build_group;
use framebound::linalg::squared_singular_values;
use framebound::moments::{moment_report, transformed_moment};
use framebound::symfunc::chi2_moment;
use framebound::{Error, FiniteGroup, FrameConstant, FrameMethod, GroupKind, Matrix, Result, Shape};
use num_rational::BigRational;
use num_traits::ToPrimitive;

mod report;

use report::{Format, Report, Rows};

#[derive(Parser, Debug)]
#[command(name = "framebound", version, about = "Frame constants, Molien series and eigenvalue bounds for transformed domains")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for every randomized step; printed in the report header.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frame constant F_p of a matrix.
    Fp(FpArgs),
    /// Check whether a group orbit forms a tight p-frame.
    VerifyFrame(VerifyArgs),
    /// Molien series of a group.
    Molien(MolienArgs),
    /// Largest p for which a group admits tight p-frames.
    MaxFrameOrder(MaxOrderArgs),
    /// Exact moment E(Σ a_i X_i²)^p.
    Chi2Moment(Chi2Args),
    /// Moment of mass of a shape, optionally after a linear map.
    Moments(MomentArgs),
    /// Eigenvalue bounds on transformed domains.
    Bounds {
        #[command(subcommand)]
        kind: BoundCommand,
    },
    /// Ellipse comparison tables.
    Tables {
        #[arg(value_enum)]
        kind: TableChoice,
    },
    /// Lower and upper bounds bracketing F_p.
    Sandwich(SandwichArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FpMethod {
    Auto,
    Exact,
    Mc,
    Sphere,
}

#[derive(Args, Debug)]
struct FpArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum, default_value_t = FpMethod::Auto)]
    method: FpMethod,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// `dihedral:5`, `hyperoctahedral:3`, `simplex:3`, `icosahedral:full|rot`,
    /// or a JSON file of generator matrices.
    #[arg(long)]
    group: String,
    /// Transformation T; identity when omitted.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct MolienArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 10)]
    max_degree: usize,
}

#[derive(Args, Debug)]
struct MaxOrderArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 8)]
    p_max: u32,
}

#[derive(Args, Debug)]
struct Chi2Args {
    /// Comma-separated nonnegative weights, e.g. `1,2` or `1/2,3`.
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<String>,
    #[arg(long)]
    p: u32,
    /// Two squared normals per weight.
    #[arg(long)]
    doubled: bool,
}

#[derive(Args, Debug)]
struct MomentArgs {
    /// JSON shape file.
    #[arg(long)]
    shape: PathBuf,
    #[arg(long)]
    p: u32,
    /// Apply this matrix and check the frame law against direct integration.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SandwichArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    p: u32,
}

#[derive(Subcommand, Debug)]
enum BoundCommand {
    /// Clamped plate with tension tau.
    Plate {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    Buckling {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Fractional Laplacian of order alpha.
    Fractional {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        sum: Option<f64>,
    },
    /// Klein-Gordon operator with mass m.
    Kg {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        mass: f64,
        #[arg(long)]
        sum: Option<f64>,
    },
    Subordinator {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        sum: Option<f64>,
    },
    /// Fractional bound on an ellipse with semiaxes a, b.
    Perimeter {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        sum: Option<f64>,
    },
    /// Domain whose John ellipse has semiaxes 1 and a.
    John {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        inradius: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableChoice {
    Plate,
    Buckling,
}

// Serialized name of a unit enum variant.
fn tag(v: &impl serde::Serialize) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn load_matrix(path: &Path) -> Result<Matrix> {
    Matrix::read_file(path)
}

fn load_group(spec: &str) -> Result<FiniteGroup> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)?;
        return FiniteGroup::from_generators_json(&text, spec);
    }
    build_group(spec.parse::<GroupKind>()?)
}

fn parse_weight(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<BigRational>() {
        return Ok(r);
    }
    s.parse::<f64>()
        .ok()
        .and_then(BigRational::from_float)
        .ok_or_else(|| Error::Domain(format!("bad weight {s:?}")))
}

fn run_fp(args: &FpArgs, seed: u64) -> Result<Report> {
    let t = load_matrix(&args.matrix)?;
    let integral = args.p >= 1.0 && args.p.fract() == 0.0;
    let method = match args.method {
        FpMethod::Auto if integral => FpMethod::Exact,
        FpMethod::Auto if t.cols() == 2 => FpMethod::Sphere,
        FpMethod::Auto => FpMethod::Mc,
        m => m,
    };
    let fc = match method {
        FpMethod::Exact => {
            if !integral {
                return Err(Error::Domain(format!("exact route needs an integer p >= 1, got {}", args.p)));
            }
            fp_from_matrix(&t, args.p as u32)?
        }
        FpMethod::Sphere => {
            if t.cols() != 2 {
                return Err(Error::Domain("sphere route needs a matrix with 2 columns".into()));
            }
            let s2 = squared_singular_values(&t)?;
            let s2 = [s2[0], *s2.get(1).unwrap_or(&0.0)];
            FrameConstant {
                p: args.p,
                d: 2,
                value: fp_sphere_2d(s2, args.p)?,
                method: FrameMethod::Sphere2d,
                std_error: None,
            }
        }
        FpMethod::Mc => {
            let (value, se) = fp_montecarlo(&t, args.p, args.samples, seed)?;
            FrameConstant { p: args.p, d: t.cols(), value, method: FrameMethod::MonteCarlo, std_error: Some(se) }
        }
        FpMethod::Auto => unreachable!(),
    };
    let mut rows = Rows::new();
    rows.push("p", fc.p).push("d", fc.d).push("method", tag(&fc.method)).push("value", fc.value);
    if let Some(se) = fc.std_error {
        rows.push("std_error", se);
    }
    Report::new(&fc, rows)
}

fn run_verify(args: &VerifyArgs, seed: u64) -> Result<Report> {
    let group = load_group(&args.group)?;
    let t = match &args.matrix {
        Some(path) => load_matrix(path)?,
        None => Matrix::identity(group.dimension()),
    };
    let v = verify_tight_frame(&group, &t, args.p, args.trials, args.tol, seed)?;
    let mut rows = Rows::new();
    rows.push("group", v.group)
        .push("order", group.order())
        .push("p", v.p)
        .push("trials", v.trials)
        .push("reference", v.reference)
        .push("orbit_min", v.orbit_min)
        .push("orbit_max", v.orbit_max)
        .push("max_deviation", v.max_deviation)
        .push("tolerance", v.tolerance)
        .push("verdict", tag(&v.verdict));
    Report::new(&v, rows)
}

fn run_molien(args: &MolienArgs) -> Result<Report> {
    let group = load_group(&args.group)?;
    let series = group.molien_series(args.max_degree)?;
    let mut rows = Rows::new();
    rows.push("group", group.kind())
        .push("order", group.order())
        .push("coefficients", format!("{:?}", series.coefficients))
        .push("series", series.to_polynomial_string());
    Report::new(&series, rows)
}

fn run_max_order(args: &MaxOrderArgs) -> Result<Report> {
    let group = load_group(&args.group)?;
    let p = group.max_frame_order(args.p_max)?;
    let mut rows = Rows::new();
    rows.push("group", group.kind()).push("p_max", args.p_max).push("max_frame_order", p);
    Report::new(&serde_json::json!({ "group": group.kind(), "p_max": args.p_max, "max_frame_order": p }), rows)
}

fn run_chi2(args: &Chi2Args) -> Result<Report> {
    let weights = args.weights.iter().map(|w| parse_weight(w)).collect::<Result<Vec<_>>>()?;
    let v = chi2_moment(&weights, args.p, args.doubled)?;
    let approx = v.to_f64().unwrap_or(f64::NAN);
    let mut rows = Rows::new();
    rows.push("p", args.p).push("doubled", args.doubled).push("exact", &v).push("value", approx);
    Report::new(
        &serde_json::json!({ "p": args.p, "doubled": args.doubled, "exact": v.to_string(), "value": approx }),
        rows,
    )
}

fn run_moments(args: &MomentArgs) -> Result<Report> {
    let text = std::fs::read_to_string(&args.shape)?;
    let shape = Shape::from_json_str(&text, &args.shape.display().to_string())?;
    let base = moment_report(&shape, args.p)?;
    let mut rows = Rows::new();
    rows.push("p", base.p).push("volume", base.volume).push("moment", base.moment).push("ratio", base.ratio);
    match &args.matrix {
        None => Report::new(&base, rows),
        Some(path) => {
            let t = load_matrix(path)?;
            let law = transformed_moment(&shape, &t, args.p)?;
            let image = moment_report(&shape.transformed(&t)?, args.p)?;
            rows.push("transformed_moment", law).push("transformed_ratio", image.ratio);
            Report::new(&serde_json::json!({ "original": base, "transformed": image }), rows)
        }
    }
}

fn run_sandwich(args: &SandwichArgs) -> Result<Report> {
    let t = load_matrix(&args.matrix)?;
    let (lower, upper) = nontight_sandwich(&t, args.p)?;
    let value = fp_from_matrix(&t, args.p)?.value;
    let equal = upper - lower <= 1e-10 * upper;
    let mut rows = Rows::new();
    rows.push("p", args.p)
        .push("lower", lower)
        .push("value", value)
        .push("upper", upper)
        .push("equality", equal);
    Report::new(
        &serde_json::json!({ "p": args.p, "lower": lower, "value": value, "upper": upper, "equality": equal }),
        rows,
    )
}

fn run_bounds(kind: &BoundCommand) -> Result<Report> {
    let r = match kind {
        BoundCommand::Plate { matrix, lambda, tau, order } => plate_bound(&load_matrix(matrix)?, *lambda, *tau, *order)?,
        BoundCommand::Buckling { matrix, lambda, order } => buckling_bound(&load_matrix(matrix)?, *lambda, *order)?,
        BoundCommand::Fractional { matrix, alpha, sum } => fractional_bound(&load_matrix(matrix)?, *alpha, *sum)?,
        BoundCommand::Kg { matrix, mass, sum } => klein_gordon_bound(&load_matrix(matrix)?, *mass, *sum)?,
        BoundCommand::Subordinator { matrix, beta, sum } => subordinator_bound(&load_matrix(matrix)?, *beta, *sum)?,
        BoundCommand::Perimeter { a, b, alpha, sum } => fractional_ellipse_perimeter_bound(*a, *b, *alpha, *sum)?,
        BoundCommand::John { a, alpha, lambda, symmetric, inradius } => {
            let j = john_domain_bound(*a, *alpha, *lambda, *symmetric, *inradius)?;
            let mut rows = Rows::new();
            rows.push("a", j.a).push("alpha", j.alpha).push("symmetric", j.symmetric).push("upper", j.upper).push("lower", j.lower);
            if let Some(b) = j.inradius_bound {
                rows.push("inradius_bound", b);
            }
            for n in &j.notes {
                rows.push("note", n);
            }
            return Report::new(&j, rows);
        }
    };
    let mut rows = Rows::new();
    rows.push("operator", &r.operator).push("factor", r.factor);
    if let Some(v) = r.value {
        rows.push("value", v);
    }
    if let Some(p) = &r.rescaled {
        rows.push(&format!("{} (rescaled)", p.name), p.rescaled);
    }
    rows.push("equality_case", r.equality_case);
    for (k, v) in &r.quantities {
        rows.push(k, v);
    }
    for n in &r.notes {
        rows.push("note", n);
    }
    Report::new(&r, rows)
}

fn run_tables(kind: TableChoice) -> Result<Report> {
    let table = match kind {
        TableChoice::Plate => plate_table()?,
        TableChoice::Buckling => buckling_table()?,
    };
    Report::with_text(&table, table.to_text())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fp(_) => "fp",
        Command::VerifyFrame(_) => "verify-frame",
        Command::Molien(_) => "molien",
        Command::MaxFrameOrder(_) => "max-frame-order",
        Command::Chi2Moment(_) => "chi2-moment",
        Command::Moments(_) => "moments",
        Command::Bounds { .. } => "bounds",
        Command::Tables { .. } => "tables",
        Command::Sandwich(_) => "sandwich",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numerical(_) | Error::Consistency(_) => 1,
        _ => 2,
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("FRAMEBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("FRAMEBOUND_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match &cli.command {
        Command::Fp(a) => run_fp(a, cli.seed),
        Command::VerifyFrame(a) => run_verify(a, cli.seed),
        Command::Molien(a) => run_molien(a),
        Command::MaxFrameOrder(a) => run_max_order(a),
        Command::Chi2Moment(a) => run_chi2(a),
        Command::Moments(a) => run_moments(a),
        Command::Bounds { kind } => run_bounds(kind),
        Command::Tables { kind } => run_tables(*kind),
        Command::Sandwich(a) => run_sandwich(a),
    };
    match outcome {
        Ok(report) => {
            print!("{}", report.render(cli.format, command_name(&cli.command), cli.seed));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            eprintln!("error: {line}");
            ExitCode::from(exit_code(&e))
        }
    }
}
