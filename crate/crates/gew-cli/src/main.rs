//! Command-line front end for gew-core.
//!
//! Subcommands: classify, scan, horodecki, witness-check, shift, mesh.
//! Output is data for external tooling (JSON, CSV, or OBJ text), written to
//! stdout or to `--out FILE`; reruns with identical configuration produce
//! byte-identical output. Exit codes: 0 success, 1 I/O or parse failure,
//! 2 invalid state input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gew_core::bloch::{decompose_op, svo, weyl_basis};
use gew_core::criteria::{classify, ppt_check, realignment_check, Label, Verdict};
use gew_core::matcore::{CMat, DensityMatrix};
use gew_core::simplex3::mesh::{body_obj, pyramid_obj};
use gew_core::simplex3::scan::{rows_to_csv, scan_grid};
use gew_core::simplex3::surfaces::body_margin;
use gew_core::simplex3::tangency::{inside_out_tangency, plane_of, TangencyReport};
use gew_core::simplex3::{
    family_eigenvalues, family_state, g_re, horodecki, kernel_polygon_default, polygon_ops,
    to_euclid, EuclidPoint, FamilyPoint,
};
use gew_core::witness::{
    find_witness_crossing, is_witness, SeesawOpts, ShiftFamily, ShiftMode,
};
use gew_core::GewError;

#[derive(Parser)]
#[command(
    name = "gew",
    version,
    about = "Entanglement classification for bipartite states: spectra, partial \
             transposition, realignment, and geometric witness planes, with a \
             three-parameter two-qutrit family built in"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// See-saw restarts per witness evaluation.
    #[arg(long, global = true, default_value_t = 32)]
    restarts: usize,
    /// RNG seed for the see-saw restarts.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Bisection tolerance for λ and parameter searches.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Worker threads; 0 uses all cores. The GEW_JOBS environment variable
    /// takes precedence over this flag.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify one state: positivity, PPT margin, realignment sum, verdict.
    Classify(ClassifyArgs),
    /// Grid scan over the (α, β, γ) box; one row per point.
    Scan(ScanConfig),
    /// Sweep the Horodecki line b ∈ [0, 5] and locate the PPT boundaries.
    Horodecki(HorodeckiArgs),
    /// Fingerprint witness candidates: singular values, product minima.
    #[command(name = "witness-check")]
    WitnessCheck(WitnessArgs),
    /// Shift a geometric witness plane along a state segment and bisect
    /// for the crossing λ*.
    Shift(ShiftArgs),
    /// Emit OBJ meshes of the positivity pyramid or the PPT∩realignment body.
    Mesh(MeshArgs),
}

/// One input state: family coordinates, a Horodecki-line parameter, or a
/// matrix file.
#[derive(Args, Clone)]
struct StateArgs {
    /// Weight α on the n=0, m=0 Bell projector.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["horodecki_b", "matrix"])]
    alpha: Option<f64>,
    /// Weight β on the m=0 Bell-projector pair.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["horodecki_b", "matrix"])]
    beta: Option<f64>,
    /// Weight γ on the m=1 Bell-projector triple.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["horodecki_b", "matrix"])]
    gamma: Option<f64>,
    /// Horodecki 3⊗3 state parameter b ∈ [0, 5].
    #[arg(long, value_name = "B", allow_negative_numbers = true, conflicts_with = "matrix")]
    horodecki_b: Option<f64>,
    /// Density matrix file, JSON {"rows", "cols", "re", "im"} row-major.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    /// Local dimensions for --matrix, e.g. 3x3; square split by default.
    #[arg(long, value_name = "DAxDB", requires = "matrix")]
    dims: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    state: StateArgs,
}

#[derive(Args)]
struct ScanConfig {
    /// Grid resolution per axis (≥ 2).
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Parameter box as αlo:αhi,βlo:βhi,γlo:γhi.
    #[arg(
        long = "box",
        value_name = "BOX",
        default_value = "-1:1,-1:1,-1:1",
        allow_hyphen_values = true
    )]
    box_spec: String,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
}

#[derive(Args)]
struct HorodeckiArgs {
    /// Number of sample points along b ∈ [0, 5].
    #[arg(long, default_value_t = 51)]
    grid: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
}

#[derive(Args)]
struct WitnessArgs {
    /// Polygon operator by name; all four when no source is given.
    #[arg(long, value_parser = ["gu+", "gu-", "gd+", "gd-"])]
    op: Option<String>,
    /// Tangent operator on the realignment surface above (--beta, --gamma).
    #[arg(long = "g-re", conflicts_with = "op")]
    g_re: bool,
    /// Tangent-point β for --g-re.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Tangent-point γ for --g-re.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Operator matrix file, JSON {"rows", "cols", "re", "im"} row-major.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["op", "g_re"])]
    matrix: Option<PathBuf>,
    /// Local dimensions for --matrix, e.g. 3x3; square split by default.
    #[arg(long, value_name = "DAxDB", requires = "matrix")]
    dims: Option<String>,
    /// Evaluate every polygon plane at the kernel-polygon vertices instead
    /// of fingerprinting operators.
    #[arg(long, conflicts_with_all = ["op", "g_re", "matrix"])]
    kernel: bool,
    /// Kernel vertex override, JSON [[α, β, γ], ...].
    #[arg(long, value_name = "FILE", requires = "kernel")]
    vertices: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShiftArgs {
    /// Bisection direction along the segment.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Polygon operator for the inside-out tangency pipeline (touch point,
    /// outward shift, raw see-saw bisection, surface distance).
    #[arg(long, value_parser = ["gu+", "gu-", "gd+", "gd-"])]
    op: Option<String>,
    #[command(flatten)]
    state: StateArgs,
    /// ρ̃ endpoint α (maximally mixed when no tilde source is given).
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["tilde_horodecki_b", "tilde_matrix"])]
    tilde_alpha: Option<f64>,
    /// ρ̃ endpoint β.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["tilde_horodecki_b", "tilde_matrix"])]
    tilde_beta: Option<f64>,
    /// ρ̃ endpoint γ.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["tilde_horodecki_b", "tilde_matrix"])]
    tilde_gamma: Option<f64>,
    /// ρ̃ endpoint on the Horodecki line.
    #[arg(long, value_name = "B", allow_negative_numbers = true, conflicts_with = "tilde_matrix")]
    tilde_horodecki_b: Option<f64>,
    /// ρ̃ endpoint matrix file.
    #[arg(long, value_name = "FILE")]
    tilde_matrix: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    /// Which boundary to mesh.
    #[arg(long, value_enum, default_value = "pyramid")]
    surface: SurfaceArg,
    /// Sphere resolution for the body surface: rings; meridians are 2x.
    #[arg(long, default_value_t = 24)]
    grid: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Smallest λ where the shifted plane clears every product state.
    OutsideIn,
    /// Largest λ where a product state still reaches the plane.
    InsideOut,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfaceArg {
    Pyramid,
    Body,
}

/// Exit-code-carrying error: 1 for I/O, parse, and numerical-domain
/// failures, 2 for invalid state input.
#[derive(Debug)]
struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: 1, msg: msg.into() }
    }
}

impl From<GewError> for CliError {
    fn from(e: GewError) -> Self {
        let code = match &e {
            GewError::InvalidState(_) => 2,
            _ => 1,
        };
        CliError { code, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let jobs = resolve_jobs(cli.global.jobs)?;
    if jobs > 0 {
        // Ignore failure: the pool can only be set once per process.
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().ok();
    }
    if cli.global.tol.is_nan() || cli.global.tol <= 0.0 {
        return Err(CliError::usage(format!("--tol {} must be positive", cli.global.tol)));
    }
    let opts = SeesawOpts {
        restarts: cli.global.restarts.max(1),
        seed: cli.global.seed,
        parallel: true,
        ..SeesawOpts::default()
    };
    match &cli.cmd {
        Cmd::Classify(a) => run_classify(a),
        Cmd::Scan(a) => run_scan(a).map(|()| ExitCode::SUCCESS),
        Cmd::Horodecki(a) => run_horodecki(a, cli.global.tol).map(|()| ExitCode::SUCCESS),
        Cmd::WitnessCheck(a) => run_witness_check(a, &opts).map(|()| ExitCode::SUCCESS),
        Cmd::Shift(a) => run_shift(a, &opts, cli.global.tol).map(|()| ExitCode::SUCCESS),
        Cmd::Mesh(a) => run_mesh(a).map(|()| ExitCode::SUCCESS),
    }
}

/// GEW_JOBS wins over --jobs when set; empty or non-numeric values are
/// reported rather than ignored.
fn resolve_jobs(flag: usize) -> Result<usize, CliError> {
    match std::env::var("GEW_JOBS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::usage(format!("GEW_JOBS: cannot parse worker count from {s:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(CliError::usage(format!("GEW_JOBS: {e}"))),
    }
}

fn to_pretty<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::usage(format!("serialization: {e}")))
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    let body: String =
        if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// dA, dB for a loaded square matrix: explicit "dAxdB", or the square split
/// d = √(rows) when rows is a perfect square.
fn resolve_dims(m: &CMat, dims: Option<&str>) -> Result<(usize, usize), CliError> {
    if let Some(s) = dims {
        let parts: Vec<&str> = s.split(['x', 'X']).collect();
        if parts.len() == 2 {
            if let (Ok(da), Ok(db)) =
                (parts[0].trim().parse::<usize>(), parts[1].trim().parse::<usize>())
            {
                return Ok((da, db));
            }
        }
        return Err(CliError::usage(format!("--dims {s:?}: expected DAxDB, e.g. 3x3")));
    }
    let d = m.rows();
    let r = (d as f64).sqrt().round() as usize;
    if r * r == d && r > 0 {
        Ok((r, r))
    } else {
        Err(CliError::usage(format!(
            "matrix is {d}x{d} with no square split; pass --dims DAxDB",
            d = d
        )))
    }
}

/// Loads a state endpoint. The family point is kept when the input lives in
/// the (α, β, γ) family, so downstream output can report coordinates.
fn load_endpoint(
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    horodecki_b: Option<f64>,
    matrix: Option<&PathBuf>,
    dims: Option<&str>,
) -> Result<(Option<FamilyPoint>, DensityMatrix), CliError> {
    if let Some(path) = matrix {
        let text = read_file(path)?;
        let m = CMat::from_json_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let (da, db) = resolve_dims(&m, dims)?;
        let rho = DensityMatrix::new_relaxed(m, da, db)?;
        return Ok((None, rho));
    }
    if let Some(b) = horodecki_b {
        let (p, rho) = horodecki(b)?;
        return Ok((Some(p), rho));
    }
    let p = FamilyPoint::new(alpha.unwrap_or(0.0), beta.unwrap_or(0.0), gamma.unwrap_or(0.0));
    Ok((Some(p), family_state(p)))
}

fn load_state(st: &StateArgs) -> Result<(Option<FamilyPoint>, DensityMatrix), CliError> {
    load_endpoint(
        st.alpha,
        st.beta,
        st.gamma,
        st.horodecki_b,
        st.matrix.as_ref(),
        st.dims.as_deref(),
    )
}

fn run_classify(args: &ClassifyArgs) -> Result<ExitCode, CliError> {
    let verdict = match load_state(&args.state) {
        Ok((_, rho)) => classify(&rho, &[], false)?,
        // Constructor-level rejections (trace, Hermiticity, dimensions with
        // code 2) still yield a verdict so scripted callers see one schema.
        Err(e) if e.code == 2 => {
            eprintln!("note: {}", e.msg);
            Verdict {
                label: Label::InvalidState,
                ppt_margin: None,
                realignment_sum: None,
                witness_values: Vec::new(),
                evidence: Vec::new(),
            }
        }
        Err(e) => return Err(e),
    };
    println!("{}", to_pretty(&verdict)?);
    Ok(if verdict.label == Label::InvalidState {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

/// "αlo:αhi,βlo:βhi,γlo:γhi" → bounds array.
fn parse_box(spec: &str) -> Result<[[f64; 2]; 3], CliError> {
    let axes: Vec<&str> = spec.split(',').collect();
    if axes.len() != 3 {
        return Err(CliError::usage(format!(
            "--box {spec:?}: expected three comma-separated lo:hi ranges"
        )));
    }
    let mut bounds = [[0.0; 2]; 3];
    for (k, axis) in axes.iter().enumerate() {
        let ends: Vec<&str> = axis.split(':').collect();
        if ends.len() != 2 {
            return Err(CliError::usage(format!("--box axis {axis:?}: expected lo:hi")));
        }
        for (j, end) in ends.iter().enumerate() {
            bounds[k][j] = end.trim().parse::<f64>().map_err(|_| {
                CliError::usage(format!("--box axis {axis:?}: cannot parse {end:?}"))
            })?;
        }
    }
    Ok(bounds)
}

fn run_scan(args: &ScanConfig) -> Result<(), CliError> {
    let bounds = parse_box(&args.box_spec)?;
    let rows = scan_grid(bounds, args.grid)?;
    let text = match args.format {
        OutFormat::Csv => rows_to_csv(&rows),
        OutFormat::Json => to_pretty(&rows)?,
    };
    write_out(args.out.as_ref(), &text)
}

#[derive(Serialize)]
struct HorodeckiRow {
    b: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    pos_margin: f64,
    ppt_margin: f64,
    realign_sum: f64,
    label: Label,
}

#[derive(Serialize)]
struct HorodeckiOutput {
    rows: Vec<HorodeckiRow>,
    /// PPT-margin zero crossings along b, bisected on [0,2] and [2,5].
    ppt_crossings: [f64; 2],
}

fn horodecki_ppt_margin(b: f64) -> Result<f64, CliError> {
    let (_, rho) = horodecki(b)?;
    Ok(ppt_check(&rho)?)
}

fn bisect_zero(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    f: &dyn Fn(f64) -> Result<f64, CliError>,
) -> Result<f64, CliError> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if (flo < 0.0) == (fhi < 0.0) {
        return Err(CliError::usage(format!(
            "no sign change on [{lo}, {hi}]: f = {flo:.3e}, {fhi:.3e}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn run_horodecki(args: &HorodeckiArgs, tol: f64) -> Result<(), CliError> {
    if args.grid < 2 {
        return Err(CliError::usage(format!("--grid {} must be at least 2", args.grid)));
    }
    let mut rows = Vec::with_capacity(args.grid);
    for i in 0..args.grid {
        let b = if i == args.grid - 1 {
            5.0
        } else {
            5.0 * i as f64 / (args.grid - 1) as f64
        };
        let (p, rho) = horodecki(b)?;
        rows.push(HorodeckiRow {
            b,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            pos_margin: rho.min_eigenvalue()?,
            ppt_margin: ppt_check(&rho)?,
            realign_sum: realignment_check(&rho)?,
            label: classify(&rho, &[], false)?.label,
        });
    }
    let crossings = [
        bisect_zero(0.0, 2.0, tol, &horodecki_ppt_margin)?,
        bisect_zero(2.0, 5.0, tol, &horodecki_ppt_margin)?,
    ];
    match args.format {
        OutFormat::Csv => {
            let mut text =
                String::from("b,alpha,beta,gamma,pos_margin,ppt_margin,realign_sum,label\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.b, r.alpha, r.beta, r.gamma, r.pos_margin, r.ppt_margin, r.realign_sum,
                    r.label
                ));
            }
            write_out(args.out.as_ref(), &text)?;
            eprintln!("ppt crossings: b = {:.6} and b = {:.6}", crossings[0], crossings[1]);
        }
        OutFormat::Json => {
            let out = HorodeckiOutput { rows, ppt_crossings: crossings };
            write_out(args.out.as_ref(), &to_pretty(&out)?)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct WitnessReport {
    source: String,
    dims: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    tangent: Option<FamilyPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prefactor_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeff_c_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeff_c_im: Option<f64>,
    /// Normalized singular values s̃ descending; absent when Tr C ≈ 0 or the
    /// local dimensions differ.
    tilde_s: Option<Vec<f64>>,
    is_witness: bool,
    detecting: bool,
    min_normalized: f64,
    min_product_expectation: f64,
    s_min: Option<f64>,
}

fn witness_report(
    source: String,
    op: &CMat,
    dims: (usize, usize),
    opts: &SeesawOpts,
) -> Result<WitnessReport, CliError> {
    let chk = is_witness(op, dims, opts)?;
    let tilde_s = if dims.0 == dims.1 {
        let basis = weyl_basis(dims.0)?;
        decompose_op(op, &basis, &basis)
            .and_then(|dec| svo(&dec))
            .and_then(|form| form.tilde_s())
            .ok()
    } else {
        None
    };
    Ok(WitnessReport {
        source,
        dims: [dims.0, dims.1],
        tangent: None,
        prefactor_a: None,
        coeff_c_re: None,
        coeff_c_im: None,
        tilde_s,
        is_witness: chk.witness,
        detecting: chk.detecting,
        min_normalized: chk.min_normalized,
        min_product_expectation: chk.optimum.value,
        s_min: chk.optimum.s_min,
    })
}

#[derive(Serialize)]
struct PlaneValues {
    #[serde(rename = "gu+")]
    gu_plus: f64,
    #[serde(rename = "gu-")]
    gu_minus: f64,
    #[serde(rename = "gd+")]
    gd_plus: f64,
    #[serde(rename = "gd-")]
    gd_minus: f64,
}

#[derive(Serialize)]
struct KernelVertex {
    point: FamilyPoint,
    euclid: EuclidPoint,
    /// Smallest family-state eigenvalue; ≥ 0 on valid vertices.
    eigen_min: f64,
    /// Min over positivity, PPT, and realignment margins; ≈ 0 on the
    /// constraint boundary, > 0 strictly inside.
    body_margin: f64,
    /// Tr G ρ_v per polygon plane; the kernel sits on the nonnegative side.
    plane_values: PlaneValues,
}

fn load_vertices(path: Option<&PathBuf>) -> Result<Vec<FamilyPoint>, CliError> {
    match path {
        None => Ok(kernel_polygon_default().to_vec()),
        Some(p) => {
            let text = read_file(p)?;
            let raw: Vec<[f64; 3]> = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?;
            if raw.is_empty() {
                return Err(CliError::usage(format!("{}: no vertices", p.display())));
            }
            Ok(raw.into_iter().map(FamilyPoint::from_array).collect())
        }
    }
}

fn run_witness_check(args: &WitnessArgs, opts: &SeesawOpts) -> Result<(), CliError> {
    if args.kernel {
        let vertices = load_vertices(args.vertices.as_ref())?;
        let ops = polygon_ops();
        let mut planes = Vec::with_capacity(4);
        for (_, op) in ops.named() {
            planes.push(plane_of(op)?);
        }
        let report: Vec<KernelVertex> = vertices
            .into_iter()
            .map(|p| {
                let eigs = family_eigenvalues(p);
                KernelVertex {
                    point: p,
                    euclid: to_euclid(p),
                    eigen_min: eigs.iter().copied().fold(f64::INFINITY, f64::min),
                    body_margin: body_margin(p),
                    plane_values: PlaneValues {
                        gu_plus: planes[0].value(p),
                        gu_minus: planes[1].value(p),
                        gd_plus: planes[2].value(p),
                        gd_minus: planes[3].value(p),
                    },
                }
            })
            .collect();
        return write_out(args.out.as_ref(), &to_pretty(&report)?);
    }

    let mut reports = Vec::new();
    if args.g_re {
        let (bt, gt) = match (args.beta, args.gamma) {
            (Some(b), Some(g)) => (b, g),
            _ => {
                return Err(CliError::usage(
                    "--g-re needs the tangent point: --beta B --gamma G",
                ))
            }
        };
        let tw = g_re(bt, gt)?;
        let mut rep = witness_report("g_re".into(), &tw.op, (3, 3), opts)?;
        rep.tangent = Some(tw.tangent);
        rep.prefactor_a = Some(tw.a);
        rep.coeff_c_re = Some(tw.c.re);
        rep.coeff_c_im = Some(tw.c.im);
        reports.push(rep);
    } else if let Some(path) = &args.matrix {
        let text = read_file(path)?;
        let m = CMat::from_json_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let dims = resolve_dims(&m, args.dims.as_deref())?;
        reports.push(witness_report(path.display().to_string(), &m, dims, opts)?);
    } else {
        let ops = polygon_ops();
        for (name, op) in ops.named() {
            if args.op.as_deref().is_none_or(|want| want == name) {
                reports.push(witness_report(name.into(), op, (3, 3), opts)?);
            }
        }
    }
    write_out(args.out.as_ref(), &to_pretty(&reports)?)
}

#[derive(Serialize)]
struct TangencyOutput<'a> {
    op: &'a str,
    mode: &'static str,
    #[serde(flatten)]
    report: &'a TangencyReport,
}

#[derive(Serialize)]
struct ShiftOutput {
    mode: &'static str,
    lambda_star: f64,
    bracket: [f64; 2],
    /// Crossing-state coordinates; present when both endpoints are family
    /// points, absent for matrix-file segments.
    crossing: Option<FamilyPoint>,
    crossing_euclid: Option<EuclidPoint>,
    /// Every (λ, witness?) evaluation of the bisection, in order.
    trace: Vec<(f64, bool)>,
}

fn run_shift(args: &ShiftArgs, opts: &SeesawOpts, tol: f64) -> Result<(), CliError> {
    if let Some(name) = &args.op {
        if args.mode != ModeArg::InsideOut {
            return Err(CliError::usage("--op runs the tangency pipeline; use --mode inside-out"));
        }
        let ops = polygon_ops();
        let mut found = None;
        for (n, op) in ops.named() {
            if n == name.as_str() {
                found = Some(op.clone());
            }
        }
        let op = found.expect("value_parser admits polygon names only");
        let report = inside_out_tangency(&op, opts, tol)?;
        let out = TangencyOutput { op: name, mode: "inside-out", report: &report };
        return write_out(args.out.as_ref(), &to_pretty(&out)?);
    }

    let (p_rho, rho) = load_state(&args.state)?;
    // Tilde matrix files rely on the square dimension split; a segment with
    // mismatched local dimensions is rejected by ShiftFamily itself.
    let (p_tilde, rho_tilde) = load_endpoint(
        args.tilde_alpha,
        args.tilde_beta,
        args.tilde_gamma,
        args.tilde_horodecki_b,
        args.tilde_matrix.as_ref(),
        None,
    )?;
    let family = ShiftFamily::new(rho, rho_tilde)?;
    let mode = match args.mode {
        ModeArg::OutsideIn => ShiftMode::OutsideIn,
        ModeArg::InsideOut => ShiftMode::InsideOut,
    };
    let report = find_witness_crossing(&family, mode, tol, opts)?;
    let crossing = match (p_rho, p_tilde) {
        (Some(p), Some(q)) => {
            let l = report.lambda_star;
            Some(FamilyPoint::new(
                l * p.alpha + (1.0 - l) * q.alpha,
                l * p.beta + (1.0 - l) * q.beta,
                l * p.gamma + (1.0 - l) * q.gamma,
            ))
        }
        _ => None,
    };
    let out = ShiftOutput {
        mode: match args.mode {
            ModeArg::OutsideIn => "outside-in",
            ModeArg::InsideOut => "inside-out",
        },
        lambda_star: report.lambda_star,
        bracket: [report.bracket.0, report.bracket.1],
        crossing,
        crossing_euclid: crossing.map(to_euclid),
        trace: report.trace,
    };
    write_out(args.out.as_ref(), &to_pretty(&out)?)
}

fn run_mesh(args: &MeshArgs) -> Result<(), CliError> {
    let text = match args.surface {
        SurfaceArg::Pyramid => pyramid_obj(),
        SurfaceArg::Body => body_obj(args.grid, 2 * args.grid)?,
    };
    write_out(args.out.as_ref(), &text)
}
