use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ballkit::demos::{demo_advection_diffusion, demo_induction};
use ballkit::io::{emit_slice, fmt_g, load, parse_expr, save, write_slice_csv, Expr, ParseError, Plane};
use ballkit::{
    helmholtz_hodge, helmholtz_solve, pt_decompose, pt_to_vector, Axis, Ball, BallError, BallV, BcKind, BoundaryData,
    ConstructOptions, Coords, EulerAngles,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ballkit", version, about = "Spectral computations with functions on the unit ball")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoordsArg {
    Cart,
    Sph,
}

impl From<CoordsArg> for Coords {
    fn from(c: CoordsArg) -> Self {
        match c {
            CoordsArg::Cart => Coords::Cartesian,
            CoordsArg::Sph => Coords::Spherical,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum BcArg {
    Dirichlet,
    Neumann,
}

/// A scalar given either as an expression or as a coefficient file.
#[derive(Args)]
struct Source {
    /// Expression in x, y, z (or r, lam, th)
    #[arg(long, conflicts_with = "input", required_unless_present = "input", allow_hyphen_values = true)]
    expr: Option<String>,
    /// Coefficient file written by `construct` or another subcommand
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Coordinates used for sampling and for --point
    #[arg(long, value_enum, default_value = "cart")]
    coords: CoordsArg,
    /// Fixed sizes m,n,p instead of adaptive construction
    #[arg(long, value_parser = parse_size)]
    size: Option<[usize; 3]>,
}

/// A vector field given as three `;`-separated component expressions.
#[derive(Args)]
struct VectorSource {
    /// Components "vx; vy; vz" in x, y, z
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a function and save its coefficients
    Construct {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print sizes, scale and resolution status
    Info {
        #[command(flatten)]
        src: Source,
    },
    /// Evaluate at a point
    Eval {
        #[command(flatten)]
        src: Source,
        /// x,y,z (or r,lam,th with --coords sph)
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        point: [f64; 3],
    },
    /// Integral over the ball
    Integrate {
        #[command(flatten)]
        src: Source,
    },
    /// Partial derivative along a Cartesian axis
    Derive {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        point: Option<[f64; 3]>,
    },
    /// Rotate by Z-X-Z Euler angles
    Rotate {
        #[command(flatten)]
        src: Source,
        /// alpha,beta,gamma in radians
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        angles: [f64; 3],
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        point: Option<[f64; 3]>,
    },
    /// Solve Δu + K² u = rhs with boundary data
    Helmholtz {
        /// Right-hand side
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        /// Signed real K²
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k2: f64,
        #[arg(long, value_enum, default_value = "dirichlet")]
        bc_kind: BcArg,
        /// Boundary values (Dirichlet) or normal derivative (Neumann) in x, y, z
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        bc_expr: String,
        #[arg(long, value_parser = parse_size)]
        size: Option<[usize; 3]>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        point: Option<[f64; 3]>,
    },
    /// Poloidal-toroidal decomposition of a solenoidal field
    Ptdecomp {
        #[command(flatten)]
        src: VectorSource,
        /// Prefix for <prefix>_phi.bfn and <prefix>_psi.bfn
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Helmholtz-Hodge decomposition V = ∇f + ψ
    Hhd {
        #[command(flatten)]
        src: VectorSource,
        /// Prefix for <prefix>_f.bfn and <prefix>_psi{x,y,z}.bfn
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample on a plane (x=c, y=c, z=c) or on the sphere (r=1) as CSV
    Slice {
        #[command(flatten)]
        src: Source,
        #[arg(long, allow_hyphen_values = true)]
        plane: String,
        #[arg(long, default_value_t = 64)]
        res: usize,
        /// CSV file; standard output when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Advection-diffusion time stepping
    DemoAdvdiff {
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Discretisation size n (solves use n×n×n)
        #[arg(long, default_value_t = 30)]
        size: usize,
        /// Directory for c_NNN.bfn snapshots
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induction equation time stepping
    DemoInduction {
        #[arg(long, default_value_t = 2)]
        steps: usize,
        #[arg(long, default_value_t = 40)]
        size: usize,
        /// Directory for phi_NNN.bfn and psi_NNN.bfn snapshots
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected {N} comma-separated numbers"))
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_list::<3>(s)
}

fn parse_size(s: &str) -> Result<[usize; 3], String> {
    let v = parse_list::<3>(s)?;
    if v.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
        return Err("sizes must be positive integers".into());
    }
    Ok(v.map(|x| x as usize))
}

/// Failure categories mapped to exit codes.
enum Failure {
    Usage(String),
    Parse(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

impl From<BallError> for Failure {
    fn from(e: BallError) -> Self {
        match e {
            BallError::Format(_) => Failure::Parse(e.to_string()),
            BallError::Io(_) | BallError::Precondition(_) | BallError::OutsideBall(..) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn opts(size: Option<[usize; 3]>) -> ConstructOptions {
    size.map_or_else(ConstructOptions::default, |[m, n, p]| ConstructOptions::fixed(m, n, p))
}

fn build(expr: &Expr, coords: Coords, size: Option<[usize; 3]>) -> Result<Ball, Failure> {
    let f = expr.construct(coords, &opts(size))?;
    if !f.is_resolved() {
        log::warn!("function is not resolved at sizes {:?}", f.sizes());
    }
    Ok(f)
}

fn scalar(src: &Source) -> Result<Ball, Failure> {
    match (&src.expr, &src.input) {
        (Some(e), _) => build(&parse_expr(e)?, src.coords.into(), src.size),
        (None, Some(path)) => {
            let (f, _) = load::<f64>(path)?;
            Ok(match src.size {
                Some(s) => f.resized(s)?,
                None => f,
            })
        }
        (None, None) => Err(Failure::Usage("one of --expr or --in is required".into())),
    }
}

fn vector(src: &VectorSource) -> Result<BallV, Failure> {
    let parts: Vec<&str> = src.expr.split(';').collect();
    if parts.len() != 3 {
        return Err(Failure::Usage("a vector field needs three `;`-separated components".into()));
    }
    let mut comps = Vec::with_capacity(3);
    for p in parts {
        comps.push(build(&parse_expr(p)?, Coords::Cartesian, None)?);
    }
    let vz = comps.pop().expect("three");
    let vy = comps.pop().expect("three");
    let vx = comps.pop().expect("three");
    Ok(BallV::new(vx, vy, vz))
}

fn point_value(f: &Ball, coords: Coords, p: [f64; 3]) -> Result<f64, Failure> {
    match coords {
        Coords::Cartesian => Ok(f.eval(p[0], p[1], p[2])?),
        Coords::Spherical => {
            if !(0.0..=1.0).contains(&p[0]) {
                return Err(Failure::Usage(format!("radius {} is outside [0, 1]", p[0])));
            }
            Ok(f.eval_sph(p[0], p[1], p[2]).re)
        }
    }
}

/// Saves `f` if asked, then prints either its value at `point` or its sizes.
fn emit(f: &Ball, out: &Option<PathBuf>, coords: Coords, point: Option<[f64; 3]>) -> Outcome {
    if let Some(path) = out {
        save(f, coords, path)?;
    }
    match point {
        Some(q) => println!("{}", fmt_g(point_value(f, coords, q)?)),
        None => {
            let [m, n, p] = f.sizes();
            println!("sizes {m} {n} {p}");
        }
    }
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Construct { src, out } => {
            let f = scalar(&src)?;
            emit(&f, &Some(out), src.coords.into(), None)
        }
        Cmd::Info { src } => {
            let f = scalar(&src)?;
            let [m, n, p] = f.sizes();
            println!("sizes {m} {n} {p}");
            println!("vscale {}", fmt_g(f.vscale()));
            println!("resolved {}", f.is_resolved());
            println!("real {}", f.is_real());
            Ok(())
        }
        Cmd::Eval { src, point } => {
            let f = scalar(&src)?;
            println!("{}", fmt_g(point_value(&f, src.coords.into(), point)?));
            Ok(())
        }
        Cmd::Integrate { src } => {
            println!("{}", fmt_g(scalar(&src)?.sum3().re));
            Ok(())
        }
        Cmd::Derive { src, axis, out, point } => {
            let axis = match axis {
                AxisArg::X => Axis::X,
                AxisArg::Y => Axis::Y,
                AxisArg::Z => Axis::Z,
            };
            let d = scalar(&src)?.diff(axis);
            emit(&d, &out, src.coords.into(), point)
        }
        Cmd::Rotate { src, angles, out, point } => {
            let g = scalar(&src)?.rotate(EulerAngles::new(angles[0], angles[1], angles[2]))?;
            emit(&g, &out, src.coords.into(), point)
        }
        Cmd::Helmholtz { expr, k2, bc_kind, bc_expr, size, out, point } => {
            let rhs = build(&parse_expr(&expr)?, Coords::Cartesian, None)?;
            let g = parse_expr(&bc_expr)?;
            let kind = match bc_kind {
                BcArg::Dirichlet => BcKind::Dirichlet,
                BcArg::Neumann => BcKind::Neumann,
            };
            let sizes = size.unwrap_or_else(|| {
                let [m, n, p] = rhs.sizes();
                let even = |v: usize| (v.max(16) + 1) & !1;
                [m.max(16), even(n), even(p)]
            });
            let mut bad = None;
            let bc = BoundaryData::from_cart(kind, sizes[1], sizes[2], |x, y, z| match g.eval(x, y, z) {
                Ok(v) => v,
                Err(e) => {
                    bad.get_or_insert(e);
                    f64::NAN
                }
            })?;
            if let Some(e) = bad {
                return Err(Failure::Numerical(format!("boundary expression: {e}")));
            }
            let u = helmholtz_solve(&rhs, k2, &bc, sizes)?;
            emit(&u, &out, Coords::Cartesian, point)
        }
        Cmd::Ptdecomp { src, out } => {
            let v = vector(&src)?;
            let pt = pt_decompose(&v)?;
            let err = pt_to_vector(&pt).sub(&v).vscale();
            println!("phi sizes {:?}", pt.phi.sizes());
            println!("psi sizes {:?}", pt.psi.sizes());
            println!("reconstruction error {}", fmt_g(err));
            if let Some(prefix) = out {
                save(&pt.phi, Coords::Cartesian, with_suffix(&prefix, "_phi.bfn"))?;
                save(&pt.psi, Coords::Cartesian, with_suffix(&prefix, "_psi.bfn"))?;
            }
            Ok(())
        }
        Cmd::Hhd { src, out } => {
            let v = vector(&src)?;
            let h = helmholtz_hodge(&v)?;
            println!("f sizes {:?}", h.f.sizes());
            println!("max |div psi| {}", fmt_g(h.psi.div().vscale()));
            println!("max |psi.n| {}", fmt_g(h.psi.normal_trace().vscale()));
            let err = h.f.grad().add(&h.psi).sub(&v).vscale();
            println!("reconstruction error {}", fmt_g(err));
            if let Some(prefix) = out {
                save(&h.f, Coords::Cartesian, with_suffix(&prefix, "_f.bfn"))?;
                for (c, name) in h.psi.components().into_iter().zip(["_psix.bfn", "_psiy.bfn", "_psiz.bfn"]) {
                    save(c, Coords::Cartesian, with_suffix(&prefix, name))?;
                }
            }
            Ok(())
        }
        Cmd::Slice { src, plane, res, out } => {
            let f = scalar(&src)?;
            let plane = Plane::parse(&plane)?;
            let records = emit_slice(&f, plane, res)?;
            match out {
                Some(path) => write_slice_csv(plane, &records, std::fs::File::create(path)?)?,
                None => write_slice_csv(plane, &records, std::io::stdout().lock())?,
            }
            Ok(())
        }
        Cmd::DemoAdvdiff { steps, size, out } => {
            let snaps = demo_advection_diffusion(steps, size)?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
            }
            for (i, c) in snaps.iter().enumerate() {
                println!("step {i} mass {}", fmt_g(c.sum3().re));
                if let Some(dir) = &out {
                    save(c, Coords::Cartesian, dir.join(format!("c_{i:03}.bfn")))?;
                }
            }
            Ok(())
        }
        Cmd::DemoInduction { steps, size, out } => {
            let snaps = demo_induction(steps, size)?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
            }
            for (i, pt) in snaps.iter().enumerate() {
                let b = pt_to_vector(pt);
                println!(
                    "step {i} energy {} max |div B| {}",
                    fmt_g(b.dot(&b).sum3().re),
                    fmt_g(b.div().vscale())
                );
                if let Some(dir) = &out {
                    save(&pt.phi, Coords::Cartesian, dir.join(format!("phi_{i:03}.bfn")))?;
                    save(&pt.psi, Coords::Cartesian, dir.join(format!("psi_{i:03}.bfn")))?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
