//! Command-line front end.
//!
//! Subcommands: `spectrum` (solve a domain file), `oracle` (print exact
//! disk/rectangle spectra), `verify` (inequality harness, single domain or
//! family sweep), `greens` (sample the nonlocal kernel and cross-check a
//! solve against the finite element path).
//!
//! Exit codes: 0 success (for `verify`: every check passed), 1 a
//! verification check failed, 2 configuration or usage error, 3 solver
//! failure. Output files are written to a temporary sibling and renamed,
//! so failures leave no partial files; floats are printed with 17
//! significant digits so identical configurations give identical bytes.

use crate::analysis::{
    classify, inequality_report, sweep_family, Family, InequalityReport,
};
use crate::assembly::{apply_dirichlet, apply_nonlocal, assemble_free, Bc, OperatorMatrices};
use crate::eigensolve::smallest_eigenpairs;
use crate::expr::Expr;
use crate::geometry::{build_mesh, load_domain_file, DomainSpec, SymmetricMesh};
use crate::oracle::{
    disk_spectrum, green_p_disk, rectangle_spectrum, solve_via_green, LabeledEigenvalue, Problem,
};
use crate::{assembly, Error, Result};

use clap::{Args, Parser, Subcommand, ValueEnum};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "symmspec",
    version,
    about = "Spectral toolkit for the nonlocal antipodal Laplacian problem"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve K u = lambda M u on a domain described by a config file
    Spectrum(SpectrumArgs),
    /// Print exact reference spectra
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Run the spectral inequality harness
    Verify(VerifyArgs),
    /// Sample the nonlocal Green's kernel of the unit disk
    Greens(GreensArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BcArg {
    Nonlocal,
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Dirichlet,
    Neumann,
    P,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Dirichlet => Problem::Dirichlet,
            ProblemArg::Neumann => Problem::Neumann,
            ProblemArg::P => Problem::ProblemP,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Domain specification file (TOML)
    #[arg(long)]
    domain: PathBuf,
    /// Boundary condition
    #[arg(long, value_enum, default_value = "nonlocal")]
    bc: BcArg,
    /// Number of eigenpairs
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Mesh size; falls back to mesh.h from the domain file
    #[arg(long)]
    h: Option<f64>,
    /// Residual tolerance, in (0, 1e-2)
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Output file
    #[arg(long, default_value = "spectrum.csv")]
    out: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Relative tolerance for grouping degenerate eigenvalues
    #[arg(long, default_value_t = 1e-6)]
    cluster_tol: f64,
    /// Directory for coordinate-format dumps of the reduced matrices
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact disk spectrum from Bessel zeros
    Disk {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact rectangle spectrum by separation of variables
    Rect {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Domain specification file for a single-domain report
    #[arg(long, conflicts_with_all = ["family", "steps"])]
    domain: Option<PathBuf>,
    /// Domain family: ellipse, polar, or rectangle
    #[arg(long)]
    family: Option<String>,
    /// Number of family members (>= 2)
    #[arg(long)]
    steps: Option<usize>,
    /// Mesh size
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    /// Output file (single domain) or directory (family)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GreensArgs {
    /// Source point y, as "x1,x2" strictly inside the unit disk
    #[arg(long, allow_hyphen_values = true)]
    source: String,
    /// Sampling grid resolution per axis
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Source expression f(x, y); runs the Green-vs-FEM comparison
    #[arg(long)]
    solve: Option<String>,
    /// Quadrature/FEM mesh size for --solve
    #[arg(long, default_value_t = 0.03)]
    quad_h: f64,
    /// Output file
    #[arg(long, default_value = "greens.csv")]
    out: PathBuf,
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path as well
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { 0 } else { 2 };
        }
    };
    let outcome = match cli.cmd {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Greens(args) => cmd_greens(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Invalid(_)
        | Error::Io { .. }
        | Error::DomainError(_)
        | Error::MissingVectors
        | Error::CoincidentPoints(_)
        | Error::EvaluationTooClose(_, _) => 2,
        Error::MeshDegenerate(_)
        | Error::SymmetryBroken(_)
        | Error::AlreadyReduced(_)
        | Error::PairingIncomplete(_)
        | Error::NoConvergence(_)
        | Error::SingularShift(_)
        | Error::BracketingFailed { .. } => 3,
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, content).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path.display().to_string(), e)
    })
}

fn validate_run_config(k: usize, h: f64, tol: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Config(format!("h must be positive, got {h}")));
    }
    if !(tol > 0.0 && tol < 1e-2) {
        return Err(Error::Config(format!("tol must lie in (0, 1e-2), got {tol}")));
    }
    Ok(())
}

fn reduce_for(
    bc: BcArg,
    mesh: &SymmetricMesh,
) -> Result<(OperatorMatrices, Bc)> {
    let free = assemble_free(mesh);
    match bc {
        BcArg::Neumann => Ok((free, Bc::FreeNeumann)),
        BcArg::Dirichlet => {
            let ops = apply_dirichlet(&free, mesh)?;
            Ok((ops, Bc::Dirichlet))
        }
        BcArg::Nonlocal => {
            let ops = apply_nonlocal(&free, mesh)?;
            Ok((ops, Bc::NonlocalP))
        }
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<i32> {
    let file = load_domain_file(&args.domain)?;
    let h = args
        .h
        .or(file.mesh_h)
        .ok_or_else(|| Error::Config("no mesh size: pass --h or set [mesh] h".into()))?;
    validate_run_config(args.k, h, args.tol)?;
    let mesh = build_mesh(&file.spec, h)?;
    let (ops, bc) = reduce_for(args.bc, &mesh)?;
    let spec = smallest_eigenpairs(&ops, args.k, args.tol)?;
    let classified = classify(&spec, &ops, &mesh, args.cluster_tol)?;

    if let Some(dir) = &args.dump_matrices {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for (name, m) in [("stiffness.txt", &ops.stiffness), ("mass.txt", &ops.mass)] {
            let mut buf = Vec::new();
            m.write_coo(&mut buf)
                .map_err(|e| Error::io(name.to_string(), e))?;
            write_atomic(&dir.join(name), &String::from_utf8_lossy(&buf))?;
        }
    }

    let header = format!(
        "# symmspec spectrum\n# domain = {}\n# bc = {bc}, k = {}, h = {}, tol = {:e}, cluster_tol = {:e}\n# solver = shift-invert lanczos (deflated, envelope cholesky)\n",
        file.spec.id(),
        args.k,
        h,
        args.tol,
        args.cluster_tol
    );
    let content = match args.format {
        OutputFormat::Csv => {
            let mut s = header;
            s.push_str("index,lambda,parity,odd_residual,even_residual,cluster\n");
            for (i, e) in classified.entries.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{i},{},{},{},{},{}",
                    fmt_f(e.eigenvalue),
                    e.parity,
                    fmt_f(e.odd_residual),
                    fmt_f(e.even_residual),
                    e.cluster_id
                );
            }
            s
        }
        OutputFormat::Json => {
            let meta = serde_json::json!({
                "domain": file.spec.id(),
                "bc": bc.to_string(),
                "k": args.k,
                "h": h,
                "tol": args.tol,
                "cluster_tol": args.cluster_tol,
                "solver": "shift-invert lanczos (deflated, envelope cholesky)",
            });
            let body = serde_json::json!({
                "meta": meta,
                "entries": classified.entries,
                "residuals": spec.residuals,
            });
            serde_json::to_string_pretty(&body).expect("report serializes") + "\n"
        }
    };
    write_atomic(&args.out, &content)?;
    println!("{}", fmt_f(spec.eigenvalues[0]));
    Ok(0)
}

fn oracle_csv(entries: &[LabeledEigenvalue], header: &str) -> String {
    let mut s = String::from(header);
    s.push_str("index,value,problem,parity,m,n\n");
    for (i, e) in entries.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{}",
            fmt_f(e.value),
            e.problem,
            e.parity,
            e.indices.0,
            e.indices.1
        );
    }
    s
}

fn cmd_oracle(cmd: OracleCmd) -> Result<i32> {
    let (entries, header, out) = match cmd {
        OracleCmd::Disk {
            radius,
            problem,
            count,
            out,
        } => (
            disk_spectrum(radius, problem.into(), count)?,
            format!(
                "# symmspec oracle disk\n# radius = {radius}, problem = {}, count = {count}\n",
                Problem::from(problem)
            ),
            out,
        ),
        OracleCmd::Rect {
            a,
            b,
            problem,
            count,
            out,
        } => (
            rectangle_spectrum(a, b, problem.into(), count)?,
            format!(
                "# symmspec oracle rect\n# a = {a}, b = {b}, problem = {}, count = {count}\n",
                Problem::from(problem)
            ),
            out,
        ),
    };
    let content = oracle_csv(&entries, &header);
    match out {
        Some(path) => write_atomic(&path, &content)?,
        None => print!("{content}"),
    }
    Ok(0)
}

fn report_json(report: &InequalityReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

fn summary_line(parameter: f64, report: &InequalityReport) -> String {
    let margin = |name: &str| report.check(name).map(|c| c.margin).unwrap_or(f64::NAN);
    format!(
        "{},{},{},{},{},{},{},{},{}\n",
        report.domain_id,
        fmt_f(parameter),
        fmt_f(report.lambda1_p),
        fmt_f(report.lambda1_d),
        fmt_f(report.lambda2_n),
        fmt_f(margin("rayleigh_ball_max")),
        fmt_f(margin("ratio_vs_ball")),
        fmt_f(margin("gap_vs_ball")),
        report.all_pass()
    )
}

const SUMMARY_HEADER: &str =
    "domain_id,aspect,lambda1P,lambda1D,lambda2N,margin_13,margin_14,margin_15,all_pass\n";

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    if !(args.h > 0.0) {
        return Err(Error::Config(format!("h must be positive, got {}", args.h)));
    }
    match (&args.domain, &args.family) {
        (Some(path), None) => {
            let file = load_domain_file(path)?;
            let report = inequality_report(&file.spec, args.h)?;
            let out = args
                .out
                .unwrap_or_else(|| PathBuf::from("verify_report.json"));
            write_atomic(&out, &report_json(&report))?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}: {}", report.domain_id, if report.all_pass() { "pass" } else { "FAIL" });
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        (None, Some(name)) => {
            let family: Family = name.parse()?;
            let steps = args
                .steps
                .ok_or_else(|| Error::Config("--family requires --steps".into()))?;
            let entries = sweep_family(family, steps, args.h)?;
            let dir = args.out.unwrap_or_else(|| PathBuf::from("verify_out"));
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
            let mut summary = String::from(SUMMARY_HEADER);
            let mut all = true;
            for (i, entry) in entries.iter().enumerate() {
                write_atomic(
                    &dir.join(format!("report_{i}_{}.json", entry.report.domain_id)),
                    &report_json(&entry.report),
                )?;
                summary.push_str(&summary_line(entry.parameter, &entry.report));
                all &= entry.report.all_pass();
            }
            write_atomic(&dir.join("summary.csv"), &summary)?;
            for w in entries
                .first()
                .map(|e| e.report.warnings.as_slice())
                .unwrap_or(&[])
            {
                eprintln!("warning: {w}");
            }
            println!(
                "{} members: {}",
                entries.len(),
                if all { "all pass" } else { "FAIL" }
            );
            Ok(if all { 0 } else { 1 })
        }
        _ => Err(Error::Config(
            "pass exactly one of --domain FILE or --family NAME --steps N".into(),
        )),
    }
}

fn parse_point(s: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("expected \"x1,x2\", got \"{s}\"")));
    }
    let x: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad coordinate \"{}\"", parts[0])))?;
    let y: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad coordinate \"{}\"", parts[1])))?;
    Ok([x, y])
}

fn cmd_greens(args: GreensArgs) -> Result<i32> {
    let source = parse_point(&args.source)?;
    if source[0].hypot(source[1]) >= 1.0 {
        return Err(Error::Config(format!(
            "source point {:?} must lie strictly inside the unit disk",
            source
        )));
    }
    if args.grid < 2 {
        return Err(Error::Config("grid must be at least 2".into()));
    }

    match &args.solve {
        None => {
            let n = args.grid;
            let mut s = format!(
                "# symmspec greens\n# source = {},{}\n# grid = {n}\n",
                fmt_f(source[0]),
                fmt_f(source[1])
            );
            s.push_str("x1,x2,value\n");
            for j in 0..n {
                for i in 0..n {
                    let x = [
                        -1.0 + 2.0 * (i as f64 + 0.5) / n as f64,
                        -1.0 + 2.0 * (j as f64 + 0.5) / n as f64,
                    ];
                    if x[0].hypot(x[1]) >= 1.0 - 1e-9 {
                        continue;
                    }
                    match green_p_disk(x, source) {
                        Ok(v) => {
                            let _ = writeln!(s, "{},{},{}", fmt_f(x[0]), fmt_f(x[1]), fmt_f(v));
                        }
                        Err(Error::CoincidentPoints(_)) => continue,
                        Err(e) => return Err(e),
                    }
                }
            }
            write_atomic(&args.out, &s)?;
            Ok(0)
        }
        Some(expr_text) => {
            let expr = Expr::parse(expr_text)?;
            if !(args.quad_h > 0.0 && args.quad_h < 0.5) {
                return Err(Error::Config(format!(
                    "quad_h must lie in (0, 0.5), got {}",
                    args.quad_h
                )));
            }
            let mesh = build_mesh(&DomainSpec::Disk { radius: 1.0 }, args.quad_h)?;
            let f = |x: f64, y: f64| expr.eval(x, y);
            // ten fixed interior probes on two rings
            let mut points = Vec::new();
            for (r, count) in [(0.3, 5usize), (0.62, 5usize)] {
                for i in 0..count {
                    let th = 2.0 * std::f64::consts::PI * i as f64 / count as f64 + 0.137;
                    points.push([r * th.cos(), r * th.sin()]);
                }
            }
            let u_green = solve_via_green(&f, &points, &mesh)?;
            let free = assemble_free(&mesh);
            let non = apply_nonlocal(&free, &mesh)?;
            let load = assembly::assemble_load(&mesh, &f);
            let u_fem_nodal = assembly::solve_poisson(&non, &load)?;
            let scale = points
                .iter()
                .map(|p| {
                    assembly::eval_p1(&mesh, &u_fem_nodal, p[0], p[1])
                        .map(f64::abs)
                        .unwrap_or(0.0)
                })
                .fold(0.0f64, f64::max)
                .max(1e-300);
            let mut s = format!(
                "# symmspec greens --solve\n# source expression = {expr_text}\n# quad_h = {}\n# deviations relative to max |u_fem| over the probes\n",
                args.quad_h
            );
            s.push_str("x1,x2,u_green,u_fem,rel_dev\n");
            let mut max_dev = 0.0f64;
            for (p, ug) in points.iter().zip(&u_green) {
                let uf = assembly::eval_p1(&mesh, &u_fem_nodal, p[0], p[1]).unwrap_or(f64::NAN);
                let dev = (ug - uf).abs() / scale;
                max_dev = max_dev.max(dev);
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    fmt_f(p[0]),
                    fmt_f(p[1]),
                    fmt_f(*ug),
                    fmt_f(uf),
                    fmt_f(dev)
                );
            }
            let _ = writeln!(s, "# max_rel_dev = {}", fmt_f(max_dev));
            write_atomic(&args.out, &s)?;
            println!("{}", fmt_f(max_dev));
            Ok(0)
        }
    }
}
