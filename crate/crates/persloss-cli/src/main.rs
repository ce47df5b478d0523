//! Command-line front end: validation pipeline, loss and bound computation
//! with strategy selection, constructible extension, and the distance
//! queries. All logic lives in the library; this file only parses
//! arguments, routes, and renders reports.
//!
//! Exit codes: 0 success, 1 validation failure, 2 computation error.

use clap::{Args, Parser, Subcommand};
use persloss::loss::{DiagramAlgorithm, LossError, Strategy};
use persloss::metric::Elem;
use persloss::problem::{parse_algorithm, parse_strategy, Problem, ProblemFile};
use persloss::rational::format_rat;
use persloss::report::{
    self, distance_to_wire, Certificate, LossSummary, ReportFile, ValidationSummary,
};
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "persloss", version, about = "Assignment-loss bounds for interleaving distances over finite posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a problem file and validate poset, flow, modules and assignment.
    Validate(FileArgs),
    /// Compute the loss report for the problem's assignment.
    Loss(LossArgs),
    /// Compute the interleaving-distance bound, optionally with a
    /// de-interleaved certificate.
    Bound(BoundArgs),
    /// Extend representative maps to a full constructible assignment and
    /// print the completed problem file.
    Extend(ExtendArgs),
    /// Reducing constants of a point on one of the modules.
    ReducingConstants(PointArgs),
    /// Merging distance between two elements of a module object.
    MergingDistance(DistanceArgs),
}

#[derive(Args)]
struct FileArgs {
    /// Problem file (JSON)
    path: PathBuf,
    /// Field characteristic override for vector modules
    #[arg(long)]
    field: Option<u64>,
}

#[derive(Args)]
struct LossArgs {
    #[command(flatten)]
    file: FileArgs,
    /// naive | predecessor | linear | grid
    #[arg(long)]
    strategy: Option<String>,
    /// naive | fc | vec
    #[arg(long)]
    algorithm: Option<String>,
    /// Re-run the naive strategy and fail on mismatch
    #[arg(long)]
    check_oracle: bool,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    file: FileArgs,
    /// De-interleave and embed the verified certificate
    #[arg(long)]
    certify: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    file: FileArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    file: FileArgs,
    /// F or G
    #[arg(long, default_value = "F")]
    module: String,
    /// Element label
    #[arg(long)]
    point: String,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    file: FileArgs,
    #[arg(long, default_value = "F")]
    module: String,
    #[arg(long)]
    point: String,
    /// Set-element label, or comma-separated GF(p) coordinates
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
}

/// Failure modes mapped onto exit codes.
enum CliError {
    /// Parse or validation problems: exit 1.
    Validation(String),
    /// Well-formed input that cannot be computed on: exit 2.
    Computation(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Computation(m) => write!(f, "computation error: {m}"),
        }
    }
}

fn validation(err: impl fmt::Display) -> CliError {
    CliError::Validation(err.to_string())
}

fn computation(err: impl fmt::Display) -> CliError {
    CliError::Computation(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Loss(args) => cmd_loss(args),
        Command::Bound(args) => cmd_bound(args),
        Command::Extend(args) => cmd_extend(args),
        Command::ReducingConstants(args) => cmd_reducing_constants(args),
        Command::MergingDistance(args) => cmd_merging_distance(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Validation(_) => ExitCode::from(1),
                CliError::Computation(_) => ExitCode::from(2),
            }
        }
    }
}

fn load(args: &FileArgs) -> Result<(ProblemFile, Problem), CliError> {
    let text = fs::read_to_string(&args.path)
        .map_err(|e| validation(format!("{}: {e}", args.path.display())))?;
    let file = ProblemFile::from_str(&text).map_err(validation)?;
    let problem = file.build(args.field).map_err(validation)?;
    Ok((file, problem))
}

fn validate_problem(problem: &Problem) -> ValidationSummary {
    let mut issues = Vec::new();
    let flow_report = problem.flow.validate(&problem.poset);
    let flow_ok = flow_report.is_valid();
    issues.extend(flow_report.issues().into_iter().map(|i| format!("flow: {i}")));
    let f_report = problem.module_f.validate();
    let module_f_ok = f_report.is_valid();
    issues.extend(f_report.shape_errors.iter().map(|e| format!("module F: {e}")));
    for (p, r, q) in &f_report.square_failures {
        issues.push(format!(
            "module F: paths through `{}` disagree between `{}` and `{}`",
            problem.poset.label(*r),
            problem.poset.label(*p),
            problem.poset.label(*q)
        ));
    }
    let g_report = problem.module_g.validate();
    let module_g_ok = g_report.is_valid();
    issues.extend(g_report.shape_errors.iter().map(|e| format!("module G: {e}")));
    for (p, r, q) in &g_report.square_failures {
        issues.push(format!(
            "module G: paths through `{}` disagree between `{}` and `{}`",
            problem.poset.label(*r),
            problem.poset.label(*p),
            problem.poset.label(*q)
        ));
    }
    ValidationSummary {
        poset_ok: true,
        flow_ok,
        module_f_ok,
        module_g_ok,
        assignment_ok: true,
        issues,
    }
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(computation),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_validate(args: FileArgs) -> Result<(), CliError> {
    let (_, problem) = load(&args)?;
    let summary = validate_problem(&problem);
    let ok = summary.all_ok();
    let report = report::validation_report(summary);
    print!("{}", report.to_json());
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation("problem failed validation".into()))
    }
}

fn require_valid(problem: &Problem) -> Result<ValidationSummary, CliError> {
    let summary = validate_problem(problem);
    if !summary.all_ok() {
        return Err(CliError::Validation(format!(
            "problem failed validation: {}",
            summary.issues.join("; ")
        )));
    }
    Ok(summary)
}

fn compute_loss(
    problem: &Problem,
    strategy: Strategy,
    algorithm: DiagramAlgorithm,
) -> Result<(LossSummary, Option<report::DecompositionDump>), CliError> {
    let asgn = problem
        .assignment
        .as_ref()
        .ok_or_else(|| validation("problem file carries no assignment"))?;
    match strategy {
        Strategy::Naive | Strategy::Predecessor => {
            let report = asgn
                .total_loss(&problem.flow, strategy, algorithm)
                .map_err(computation)?;
            Ok((report::loss_summary(&report, &problem.poset), None))
        }
        Strategy::Linear => {
            let (report, dec) =
                persloss::reduce::total_loss_linear(asgn, &problem.flow, algorithm)
                    .map_err(computation)?;
            Ok((
                report::loss_summary(&report, &problem.poset),
                Some(report::linear_dump(&dec, &problem.poset)),
            ))
        }
        Strategy::Grid => {
            let (report, dec) = persloss::reduce::total_loss_grid(asgn, &problem.flow, algorithm)
                .map_err(computation)?;
            Ok((
                report::loss_summary(&report, &problem.poset),
                Some(report::grid_dump(&dec, &problem.poset)),
            ))
        }
    }
}

fn cmd_loss(args: LossArgs) -> Result<(), CliError> {
    let (_, problem) = load(&args.file)?;
    let validation_summary = require_valid(&problem)?;
    let strategy = match args.strategy.as_deref() {
        Some(s) => parse_strategy(s).map_err(validation)?,
        None => problem.strategy.unwrap_or(Strategy::Naive),
    };
    let algorithm = match args.algorithm.as_deref() {
        Some(a) => parse_algorithm(a).map_err(validation)?,
        None => problem.algorithm.unwrap_or(DiagramAlgorithm::Naive),
    };
    let (summary, decomposition) = compute_loss(&problem, strategy, algorithm)?;
    if args.check_oracle && strategy != Strategy::Naive {
        let (oracle, _) = compute_loss(&problem, Strategy::Naive, DiagramAlgorithm::Naive)?;
        if oracle.total != summary.total {
            return Err(CliError::Computation(format!(
                "strategy {} total {} disagrees with the naive oracle {}",
                strategy.as_str(),
                summary.total,
                oracle.total
            )));
        }
    }
    let report = ReportFile {
        validation: validation_summary,
        loss: Some(summary),
        decomposition,
        certificate: None,
    };
    emit(args.output.as_ref(), &report.to_json())
}

fn cmd_bound(args: BoundArgs) -> Result<(), CliError> {
    let (_, problem) = load(&args.file)?;
    let validation_summary = require_valid(&problem)?;
    let (summary, _) = compute_loss(&problem, Strategy::Naive, DiagramAlgorithm::Naive)?;
    let asgn = problem.assignment.as_ref().expect("checked by compute_loss");
    let certificate = if args.certify {
        let (certified, delta) = asgn.deinterleave(&problem.flow).map_err(|e| match e {
            LossError::InfiniteLoss | LossError::InsufficientFlowRange { .. } => computation(e),
            other => computation(other),
        })?;
        let verified = certified
            .verify_interleaving()
            .map_err(computation)?
            .ok;
        let eps_total = certified
            .epsilon()
            .expect("certified assignments carry a flow label");
        Some(Certificate {
            delta: format_rat(&delta),
            epsilon_plus_delta: format_rat(&eps_total),
            verified,
            assignment: persloss::problem::assignment_to_section(&certified, eps_total),
        })
    } else {
        if summary.total == "inf" {
            return Err(CliError::Computation("total loss is infinite".into()));
        }
        None
    };
    let report = ReportFile {
        validation: validation_summary,
        loss: Some(summary),
        decomposition: None,
        certificate,
    };
    emit(args.output.as_ref(), &report.to_json())
}

fn cmd_extend(args: ExtendArgs) -> Result<(), CliError> {
    let (mut file, problem) = load(&args.file)?;
    require_valid(&problem)?;
    let Some((eps, phi_b, psi_b)) = problem.representative_maps.as_ref() else {
        return Err(validation("problem file carries no representative_maps section"));
    };
    let is_grid_like = problem
        .poset
        .grid_shape()
        .map(|s| s.len() > 1)
        .unwrap_or(false);
    let extended = if is_grid_like {
        persloss::reduce::extend_constructible_grid(
            problem.module_f.clone(),
            problem.module_g.clone(),
            &problem.flow,
            *eps,
            phi_b,
            psi_b,
        )
        .map_err(computation)?
    } else {
        persloss::reduce::extend_constructible(
            problem.module_f.clone(),
            problem.module_g.clone(),
            &problem.flow,
            *eps,
            phi_b,
            psi_b,
        )
        .map_err(computation)?
    };
    file.assignment = Some(persloss::problem::assignment_to_section(&extended, *eps));
    file.representative_maps = None;
    emit(args.output.as_ref(), &file.to_json())
}

fn pick_module<'a>(problem: &'a Problem, which: &str) -> Result<&'a persloss::PersModule, CliError> {
    match which {
        "F" | "f" => Ok(&problem.module_f),
        "G" | "g" => Ok(&problem.module_g),
        other => Err(validation(format!("unknown module `{other}`, expected F or G"))),
    }
}

fn cmd_reducing_constants(args: PointArgs) -> Result<(), CliError> {
    let (_, problem) = load(&args.file)?;
    require_valid(&problem)?;
    let module = pick_module(&problem, &args.module)?;
    let point = problem
        .poset
        .index_of(&args.point)
        .ok_or_else(|| validation(format!("unknown element `{}`", args.point)))?;
    let set = persloss::metric::reducing_constants(module, &problem.flow, point)
        .map_err(computation)?;
    let constants: Vec<String> = set.constants.iter().map(format_rat).collect();
    let out = serde_json::json!({
        "module": args.module,
        "point": args.point,
        "reducing_constants": constants,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    Ok(())
}

fn parse_elem(module: &persloss::PersModule, point: usize, spec: &str) -> Result<Elem, CliError> {
    match module.object(point) {
        persloss::Object::Set { labels } => labels
            .iter()
            .position(|l| l == spec)
            .map(Elem::Point)
            .ok_or_else(|| validation(format!("element `{spec}` is not in the object"))),
        persloss::Object::Space { dim, .. } => {
            let coords: Vec<u64> = spec
                .split(',')
                .map(|c| c.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| validation(format!("cannot parse vector `{spec}`")))?;
            if coords.len() != *dim {
                return Err(validation(format!(
                    "vector `{spec}` has {} coordinates, object has dim {dim}",
                    coords.len()
                )));
            }
            Ok(Elem::Vector(coords))
        }
    }
}

fn cmd_merging_distance(args: DistanceArgs) -> Result<(), CliError> {
    let (_, problem) = load(&args.file)?;
    require_valid(&problem)?;
    let module = pick_module(&problem, &args.module)?;
    let point = problem
        .poset
        .index_of(&args.point)
        .ok_or_else(|| validation(format!("unknown element `{}`", args.point)))?;
    let a = parse_elem(module, point, &args.a)?;
    let b = parse_elem(module, point, &args.b)?;
    let d = persloss::metric::merging_distance(module, &problem.flow, point, &a, &b)
        .map_err(computation)?;
    let out = serde_json::json!({
        "module": args.module,
        "point": args.point,
        "distance": distance_to_wire(&d),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    Ok(())
}
