use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use delpezzo::classes::{conic_classes, exceptional_classes, root_classes, sum_exceptional};
use delpezzo::classifier::{classify, ClassifyOptions};
use delpezzo::cohomology::h1_with_fallback;
use delpezzo::cohomology::invariant_lattice;
use delpezzo::cohomology::IntegerRep;
use delpezzo::error::Error;
use delpezzo::lattice::{DivClass, Kind};
use delpezzo::pencil::degeneracy_quintic;

use delpezzo_cli::job::{self, Job, Mode};
use delpezzo_cli::report::{
    emit, DegeneracyDoc, H1Doc, LinesDoc, NamedClass, ReportDoc, DEGENERACY_SCHEMA, H1_SCHEMA,
    LINES_SCHEMA, REPORT_SCHEMA,
};
use delpezzo_cli::survey::run_survey;

/// Exact lattice-side analysis of del Pezzo surfaces: descent flags,
/// Picard rank, Galois cohomology, and Amitsur-group constraints.
#[derive(Parser)]
#[command(name = "delpezzo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Job document (path, or `-` for stdin); flags below fill in a job
    /// when no document is given.
    #[arg(long)]
    job: Option<String>,
    #[arg(long)]
    degree: Option<i64>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Bound for subgroup surveys.
    #[arg(long = "max-subgroup-order")]
    max_order: Option<usize>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<String>,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum KindArg {
    Blowup,
    Product,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Blowup => Kind::Blowup,
            KindArg::Product => Kind::Product,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify one (degree, kind, Galois image) triple.
    Analyze(CommonArgs),
    /// Classify every subgroup conjugacy class of the symmetry group.
    Survey(CommonArgs),
    /// Enumerate the distinguished classes of a lattice.
    Lines(CommonArgs),
    /// Picard rank and first cohomology of one Galois image.
    H1(CommonArgs),
    /// Degeneracy quintic of a pencil of quadrics (requires a job file).
    Degeneracy(CommonArgs),
}

fn read_job(args: &CommonArgs, mode: Mode) -> Result<Job, Error> {
    if let Some(path) = &args.job {
        let text = if path == "-" {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?;
            buf
        } else {
            fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?
        };
        let job = job::parse_job(&text)?;
        return Ok(job);
    }
    let job = Job {
        schema: job::JOB_SCHEMA.to_string(),
        mode,
        degree: args.degree,
        kind: args.kind.map(Kind::from),
        generators: vec![],
        max_order: args.max_order,
        out: args.out.clone(),
        q0: None,
        q1: None,
    };
    // re-validate through the parser path so both entries share checks
    job::parse_job(&job::emit_job(&job))
}

fn write_output(args: &CommonArgs, job: &Job, text: &str) -> Result<(), Error> {
    let target = args.out.clone().or_else(|| job.out.clone());
    match target {
        Some(path) => {
            fs::write(&path, text).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze(args) => {
            let job = read_job(&args, Mode::Analyze)?;
            let group = job::job_group(&job)?;
            let report = classify(&group, &ClassifyOptions::default())?;
            let doc = ReportDoc {
                schema: REPORT_SCHEMA,
                report,
            };
            write_output(&args, &job, &emit(&doc))
        }
        Command::Survey(args) => {
            let job = read_job(&args, Mode::Survey)?;
            let lattice = job::job_lattice(&job)?;
            let max_order = args.max_order.or(job.max_order);
            let doc = run_survey(lattice.degree(), lattice.kind(), max_order)?;
            write_output(&args, &job, &emit(&doc))
        }
        Command::Lines(args) => {
            let job = read_job(&args, Mode::Lines)?;
            let lattice = job::job_lattice(&job)?;
            let named = |c: &DivClass| NamedClass {
                name: lattice.class_name(c),
                coeffs: c.0.clone(),
            };
            let classes = exceptional_classes(&lattice)?;
            let (sum, conics, roots) = if lattice.kind() == Kind::Blowup {
                (
                    sum_exceptional(&lattice)?,
                    conic_classes(&lattice)?,
                    root_classes(&lattice)?,
                )
            } else {
                (DivClass::zero(2), vec![], vec![])
            };
            let doc = LinesDoc {
                schema: LINES_SCHEMA,
                degree: lattice.degree(),
                kind: lattice.kind(),
                count: classes.len(),
                classes: classes.iter().map(&named).collect(),
                sum: named(&sum),
                conic_classes: conics.iter().map(&named).collect(),
                root_classes: roots.iter().map(&named).collect(),
            };
            write_output(&args, &job, &emit(&doc))
        }
        Command::H1(args) => {
            let job = read_job(&args, Mode::H1)?;
            let group = job::job_group(&job)?;
            let lattice = group.lattice().clone();
            let rep = IntegerRep::of_subgroup(&group);
            let (basis, rho) = invariant_lattice(&rep);
            let h1 = h1_with_fallback(&group, delpezzo::cohomology::DEFAULT_H1_BOUND)?;
            let doc = H1Doc {
                schema: H1_SCHEMA,
                degree: lattice.degree(),
                kind: lattice.kind(),
                group_order: group.order(),
                rho,
                invariant_basis: basis
                    .iter()
                    .map(|c| lattice.class_name(&DivClass(c.clone())))
                    .collect(),
                h1,
            };
            write_output(&args, &job, &emit(&doc))
        }
        Command::Degeneracy(args) => {
            let job = read_job(&args, Mode::Degeneracy)?;
            let q0 = job.q0.as_ref().expect("validated");
            let q1 = job.q1.as_ref().expect("validated");
            let report = degeneracy_quintic(q0, q1)?;
            let doc = DegeneracyDoc {
                schema: DEGENERACY_SCHEMA,
                report,
            };
            write_output(&args, &job, &emit(&doc))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) | Error::CohomologyBound { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
