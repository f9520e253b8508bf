//! Command-line laboratory for vanishing-E1 surfaces: pointwise
//! invariants, the rotationally symmetric families, the hyperbolic
//! Cauchy march and the Clifford-torus second variation.
//!
//! Exit codes: 0 success, 1 check failure, 2 domain/input error,
//! 3 numerical degeneration.

use clap::{Args, Parser, Subcommand};
use e1lab::cauchy::{
    eigen_system, exact_state, march_cauchy, uniqueness_experiment, CauchyGrid, MarchConfig,
    MarchStatus, Scheme,
};
use e1lab::error::E1Error;
use e1lab::jets::{self, SurfaceJet};
use e1lab::manifest::{self, RunManifest};
use e1lab::rotsym::{self, ProfileFamily};
use e1lab::secondvar::{self, TorusField};
use e1lab::surfaces::{PolySurface, SurfaceFamily};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "e1lab", version, about = "Numerical laboratory for vanishing-E1 surfaces")]
struct Cli {
    /// JSON config file with defaults for the shared numeric options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise invariants and the graph-equation residual at one point.
    Invariants(InvariantsArgs),
    /// Rotationally symmetric profiles: integrate, classify, glue, figures.
    Rotsym {
        #[command(subcommand)]
        command: RotsymCommand,
    },
    /// The hyperbolic system: march, eigen-structure, uniqueness probe.
    Cauchy {
        #[command(subcommand)]
        command: CauchyCommand,
    },
    /// Second variation at the Clifford torus.
    Secondvar(SecondvarArgs),
    /// Run the self-verification suites.
    Check(CheckArgs),
}

#[derive(Args)]
struct InvariantsArgs {
    /// parabola+ | parabola- | type1 | type2 | custom:<polynomial in x, y>
    #[arg(long)]
    surface: String,
    /// Sphere radius parameter for type1/type2.
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    /// Polar alternative to --x/--y.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
}

#[derive(Subcommand)]
enum RotsymCommand {
    /// Integrate the first-order profile equation from (r_start, w0).
    Integrate(IntegrateArgs),
    /// Integrate and classify the resulting profile against the families.
    Classify(ClassifyArgs),
    /// The C^2 gluing obstruction between the sphere families.
    Glue {
        #[arg(long, default_value_t = 1.0)]
        rho0: f64,
    },
    /// Emit the three reference profile CSVs.
    Figures {
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long, default_value_t = 1e-3)]
    r_start: f64,
    #[arg(long, allow_hyphen_values = true)]
    w0: f64,
    #[arg(long)]
    r_end: f64,
    /// RK4 base step; overridable via config/env.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    u0: Option<f64>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, default_value_t = 1e-3)]
    r_start: f64,
    #[arg(long, allow_hyphen_values = true)]
    w0: f64,
    #[arg(long)]
    r_end: f64,
    #[arg(long)]
    step: Option<f64>,
    /// Max deviation for a family to count as a match.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum CauchyCommand {
    /// March periodic Cauchy data of a family in the radius.
    March(MarchArgs),
    /// Characteristic speeds and eigenvectors at one state.
    Eigen {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1.0)]
        rho0: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Linear-response probe of uniqueness under data perturbations.
    Unique(UniqueArgs),
}

#[derive(Args)]
struct MarchArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    #[arg(long)]
    r_start: f64,
    #[arg(long)]
    r_end: f64,
    #[arg(long)]
    n_phi: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// lw (Lax-Wendroff) or upwind.
    #[arg(long, default_value = "lw")]
    scheme: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record a slice every this many steps into the CSV.
    #[arg(long, default_value_t = 0)]
    record_every: usize,
}

#[derive(Args)]
struct UniqueArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    #[arg(long)]
    r_start: f64,
    #[arg(long)]
    r_end: f64,
    #[arg(long)]
    n_phi: Option<usize>,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    #[arg(long, default_value_t = 3)]
    mode: usize,
}

#[derive(Args)]
struct SecondvarArgs {
    /// Largest diagonal cosine mode of the emitted spectrum.
    #[arg(long)]
    lmax: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also verify integration-by-parts adjointness on a random field.
    #[arg(long)]
    check_ibp: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also report the first-variation criticality at --rho1.
    #[arg(long)]
    criticality: bool,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    rho1: f64,
}

#[derive(Args)]
struct CheckArgs {
    /// Run every suite.
    #[arg(long)]
    all: bool,
    /// Run a single named suite.
    #[arg(long)]
    suite: Option<String>,
}

/// Shared numeric defaults, resolved as flags > E1LAB_* environment >
/// config file > built-in defaults.
#[derive(Debug, Clone, serde::Deserialize, Default)]
struct FileConfig {
    out_dir: Option<PathBuf>,
    n_phi: Option<usize>,
    cfl: Option<f64>,
    step: Option<f64>,
    lmax: Option<i64>,
    tol: Option<f64>,
}

#[derive(Debug, Clone)]
struct Config {
    out_dir: PathBuf,
    n_phi: usize,
    cfl: f64,
    step: f64,
    lmax: i64,
    tol: f64,
}

fn env_parse<T: std::str::FromStr>(key: &str) -> Result<Option<T>, E1Error> {
    match std::env::var(key) {
        Ok(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| E1Error::InvalidInput(format!("cannot parse {key}={v}"))),
        Err(_) => Ok(None),
    }
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, E1Error> {
        let file: FileConfig = match path {
            Some(p) => {
                let body = std::fs::read_to_string(p)
                    .map_err(|e| E1Error::InvalidInput(format!("read {}: {e}", p.display())))?;
                serde_json::from_str(&body)
                    .map_err(|e| E1Error::InvalidInput(format!("parse {}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        Ok(Config {
            out_dir: env_parse::<PathBuf>("E1LAB_OUT_DIR")?
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            n_phi: env_parse("E1LAB_N_PHI")?.or(file.n_phi).unwrap_or(256),
            cfl: env_parse("E1LAB_CFL")?.or(file.cfl).unwrap_or(0.8),
            step: env_parse("E1LAB_STEP")?.or(file.step).unwrap_or(1e-3),
            lmax: env_parse("E1LAB_LMAX")?.or(file.lmax).unwrap_or(8),
            tol: env_parse("E1LAB_TOL")?.or(file.tol).unwrap_or(1e-6),
        })
    }
}

fn parse_family(name: &str, rho0: f64) -> Result<SurfaceFamily, E1Error> {
    match name {
        "parabola+" => Ok(SurfaceFamily::ParabolaPlus),
        "parabola-" => Ok(SurfaceFamily::ParabolaMinus),
        "type1" => Ok(SurfaceFamily::TypeI { rho0 }),
        "type2" => Ok(SurfaceFamily::TypeII { rho0 }),
        other => Err(E1Error::InvalidInput(format!(
            "unknown family `{other}` (parabola+, parabola-, type1, type2)"
        ))),
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn run(cli: Cli) -> Result<u8, E1Error> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Invariants(args) => cmd_invariants(args),
        Command::Rotsym { command } => match command {
            RotsymCommand::Integrate(args) => cmd_integrate(args, &cfg),
            RotsymCommand::Classify(args) => cmd_classify(args, &cfg),
            RotsymCommand::Glue { rho0 } => cmd_glue(rho0),
            RotsymCommand::Figures { out_dir } => cmd_figures(out_dir, &cfg),
        },
        Command::Cauchy { command } => match command {
            CauchyCommand::March(args) => cmd_march(args, &cfg),
            CauchyCommand::Eigen {
                family,
                rho0,
                r,
                phi,
            } => cmd_eigen(&family, rho0, r, phi),
            CauchyCommand::Unique(args) => cmd_unique(args, &cfg),
        },
        Command::Secondvar(args) => cmd_secondvar(args, &cfg),
        Command::Check(args) => cmd_check(args),
    }
}

fn cmd_invariants(args: InvariantsArgs) -> Result<u8, E1Error> {
    let (x, y) = match (args.x, args.y, args.r, args.phi) {
        (Some(x), Some(y), None, None) => (x, y),
        (None, None, Some(r), Some(phi)) => (r * phi.cos(), r * phi.sin()),
        _ => {
            return Err(E1Error::InvalidInput(
                "give either --x and --y, or --r and --phi".into(),
            ))
        }
    };
    let jet: SurfaceJet = if let Some(expr) = args.surface.strip_prefix("custom:") {
        PolySurface::parse(expr)?.jet(x, y)
    } else {
        parse_family(&args.surface, args.rho0)?.jet(x, y)?
    };
    let inv = jets::invariants_from_jet(&jet)?;
    let residual = jets::e1_residual(&jet)?;
    let density = jets::e1_density(&jet)?;
    let (f_uxx, f_uxy, f_uyy, disc) = jets::hyperbolicity_witness(&jet)?;
    println!("point: x = {x}, y = {y}, u = {}", jet.u);
    println!("D       = {}", inv.d);
    println!("theta   = {}", inv.theta);
    println!("alpha   = {}", inv.alpha);
    println!("H       = {}", inv.h);
    println!("residual F = {residual}");
    println!("E1 density = {density}");
    println!("area element = {}", jets::area_element(&jet)?);
    println!("hyperbolicity witness: F_uxx = {f_uxx}, F_uxy = {f_uxy}, F_uyy = {f_uyy}, disc = {disc}");
    Ok(0)
}

fn cmd_integrate(args: IntegrateArgs, cfg: &Config) -> Result<u8, E1Error> {
    let step = args.step.unwrap_or(cfg.step);
    let (mut profile, status) = rotsym::integrate_w(args.r_start, args.w0, args.r_end, step)?;
    if let Some(u0) = args.u0 {
        rotsym::u_from_w(&mut profile, u0);
    }
    match status {
        rotsym::ProfileStatus::Completed => println!(
            "integrated {} samples to r = {}",
            profile.len(),
            profile.r.last().unwrap()
        ),
        rotsym::ProfileStatus::BlowUp { r } => println!("blow-up detected at r = {r}"),
    }
    if let Some(out) = args.out {
        let out = if out.is_absolute() {
            out
        } else {
            cfg.out_dir.join(out)
        };
        let rows = manifest::write_rotsym_csv(&out, &profile)?;
        let mut m = RunManifest::new("rotsym integrate");
        m.set_param("r_start", args.r_start);
        m.set_param("w0", args.w0);
        m.set_param("r_end", args.r_end);
        m.set_param("step", step);
        m.record_output(&out, rows);
        m.write(&manifest_path(&out))?;
        println!("wrote {}", out.display());
    }
    Ok(if matches!(status, rotsym::ProfileStatus::BlowUp { .. }) {
        3
    } else {
        0
    })
}

fn cmd_classify(args: ClassifyArgs, cfg: &Config) -> Result<u8, E1Error> {
    let step = args.step.unwrap_or(cfg.step);
    let tol = args.tol.unwrap_or(cfg.tol);
    let (profile, status) = rotsym::integrate_w(args.r_start, args.w0, args.r_end, step)?;
    if let rotsym::ProfileStatus::BlowUp { r } = status {
        println!("note: profile blew up at r = {r}; classifying the truncated samples");
    }
    let c = rotsym::classify(&profile, tol)?;
    println!(
        "classification: {} (max deviation {:.3e})",
        c.family.label(),
        c.max_deviation
    );
    Ok(0)
}

fn cmd_glue(rho0: f64) -> Result<u8, E1Error> {
    if rho0.is_nan() || rho0 <= 0.0 {
        return Err(E1Error::InvalidInput("rho0 must be positive".into()));
    }
    let report = rotsym::gluing_second_derivatives(rho0);
    println!("r''(0) on the type I curve:  {}", report.ruu_type1);
    println!(
        "r''(0) on the type II curve at the same radius: {}",
        report.ruu_type2_at_same_radius
    );
    println!(
        "ratio: {} (7 + 4 sqrt(3) = {})",
        report.ratio,
        7.0 + 4.0 * e1lab::surfaces::SQRT3
    );
    println!("the two curves meet at C^1 but never at C^2");
    Ok(0)
}

fn cmd_figures(out_dir: Option<PathBuf>, cfg: &Config) -> Result<u8, E1Error> {
    let dir = out_dir.unwrap_or_else(|| cfg.out_dir.clone());
    std::fs::create_dir_all(&dir)
        .map_err(|e| E1Error::InvalidInput(format!("create {}: {e}", dir.display())))?;
    let mut m = RunManifest::new("rotsym figures");
    let jobs: [(&str, ProfileFamily, f64); 3] = [
        ("profile_parabola.csv", ProfileFamily::ParabolaPlus, 2.0),
        (
            "profile_type1.csv",
            ProfileFamily::TypeI(1.0),
            0.98 * rotsym::blow_up_radius_type1(1.0),
        ),
        (
            "profile_type2.csv",
            ProfileFamily::TypeII(1.0),
            0.98 * rotsym::blow_up_radius_type2(1.0),
        ),
    ];
    for (name, family, r_end) in jobs {
        let mut profile = rotsym::sample_family(&family, 1e-4, r_end, 2001)?;
        rotsym::u_from_w(&mut profile, rotsym::standard_u0(&family));
        let path = dir.join(name);
        let rows = manifest::write_rotsym_csv(&path, &profile)?;
        m.record_output(&path, rows);
        println!("wrote {}", path.display());
    }
    m.write(&dir.join("figures.manifest.json"))?;
    Ok(0)
}

fn parse_scheme(name: &str) -> Result<Scheme, E1Error> {
    match name {
        "lw" | "lax-wendroff" => Ok(Scheme::LaxWendroff),
        "upwind" => Ok(Scheme::Upwind),
        other => Err(E1Error::InvalidInput(format!(
            "unknown scheme `{other}` (lw, upwind)"
        ))),
    }
}

fn cmd_march(args: MarchArgs, cfg: &Config) -> Result<u8, E1Error> {
    let family = parse_family(&args.family, args.rho0)?;
    let n_phi = args.n_phi.unwrap_or(cfg.n_phi);
    let march_cfg = MarchConfig {
        scheme: parse_scheme(&args.scheme)?,
        cfl: args.cfl.unwrap_or(cfg.cfl),
        record_every: args.record_every,
        ..MarchConfig::default()
    };
    let grid = CauchyGrid::from_family(&family, args.r_start, n_phi)?;
    let out = march_cauchy(&grid, args.r_end, &march_cfg)?;
    let code = match &out.status {
        MarchStatus::Completed => {
            println!(
                "march completed: r = {} after {} steps",
                out.final_grid.r, out.steps
            );
            0
        }
        MarchStatus::Halted { r, reason } => {
            println!("march halted at r = {r}: {reason}");
            3
        }
    };
    if let Some(path) = args.out {
        let path = if path.is_absolute() {
            path
        } else {
            cfg.out_dir.join(path)
        };
        let mut slices: Vec<&CauchyGrid> = out.snapshots.iter().collect();
        slices.push(&out.final_grid);
        let rows = manifest::write_cauchy_csv(&path, &slices)?;
        let mut m = RunManifest::new("cauchy march");
        m.set_param("family", family.label());
        m.set_param("r_start", args.r_start);
        m.set_param("r_end", args.r_end);
        m.set_param("n_phi", n_phi);
        m.set_param("cfl", march_cfg.cfl);
        m.set_param("scheme", args.scheme);
        m.record_output(&path, rows);
        m.write(&manifest_path(&path))?;
        println!("wrote {}", path.display());
    }
    Ok(code)
}

fn cmd_eigen(family: &str, rho0: f64, r: f64, phi: f64) -> Result<u8, E1Error> {
    let family = parse_family(family, rho0)?;
    let st = exact_state(&family, r, phi)?;
    let eig = eigen_system(&st, r, phi)?;
    println!(
        "state: theta = {}, alpha = {}, H = {}, m = {}",
        st.theta, st.alpha, st.h, st.m
    );
    println!("case: {:?}", eig.case);
    println!("speeds: {:?}", eig.lambdas);
    for k in 0..4 {
        println!(
            "xi_{} = [{}, {}, {}, {}]",
            k + 1,
            eig.r_mat[0][k],
            eig.r_mat[1][k],
            eig.r_mat[2][k],
            eig.r_mat[3][k]
        );
    }
    Ok(0)
}

fn cmd_unique(args: UniqueArgs, cfg: &Config) -> Result<u8, E1Error> {
    let family = parse_family(&args.family, args.rho0)?;
    let report = uniqueness_experiment(
        &family,
        args.r_start,
        args.r_end,
        args.n_phi.unwrap_or(cfg.n_phi),
        args.eps,
        args.mode,
        &MarchConfig::default(),
    )?;
    println!(
        "deviation at eps:     {:.6e}",
        report.deviation_eps
    );
    println!(
        "deviation at eps/2:   {:.6e}",
        report.deviation_half_eps
    );
    println!("ratio: {:.4} (linear response gives ~2)", report.ratio);
    Ok(0)
}

fn cmd_secondvar(args: SecondvarArgs, cfg: &Config) -> Result<u8, E1Error> {
    let lmax = args.lmax.unwrap_or(cfg.lmax);
    let spectrum = secondvar::mode_spectrum(lmax)?;
    println!("diagonal-mode spectrum (measure factor {}):", secondvar::measure_factor());
    for (l, q) in &spectrum {
        println!("  Q(v_{l}) = {q}");
    }
    if let Some(path) = args.out {
        let path = if path.is_absolute() {
            path
        } else {
            cfg.out_dir.join(path)
        };
        let rows = manifest::write_secondvar_csv(&path, &spectrum)?;
        let mut m = RunManifest::new("secondvar");
        m.set_param("lmax", lmax);
        m.record_output(&path, rows);
        m.write(&manifest_path(&path))?;
        println!("wrote {}", path.display());
    }
    if args.check_ibp {
        let f = TorusField::random(args.seed, 6)?;
        let g = TorusField::random(args.seed.wrapping_add(1), 6)?;
        let (de1, dt) = secondvar::ibp_adjointness(&f, &g);
        println!("adjointness defects (seed {}): e1 = {de1:.3e}, T = {dt:.3e}", args.seed);
    }
    if args.criticality {
        let bg = secondvar::TorusBackground::new(args.rho1)?;
        println!(
            "rho1 = {}: H = {}, Hcr = {}, first-variation density = {}",
            args.rho1,
            bg.mean_curvature(),
            bg.hcr(),
            bg.first_variation_density()
        );
    }
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> Result<u8, E1Error> {
    let results = if let Some(name) = args.suite {
        e1lab::check::run_suite(&name)
            .ok_or_else(|| E1Error::InvalidInput(format!("unknown suite `{name}`")))?
    } else if args.all {
        e1lab::check::run_all()
    } else {
        return Err(E1Error::InvalidInput(
            "give --all or --suite <name>".into(),
        ));
    };
    let mut failed = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    println!("{} checks, {} failed", results.len(), failed);
    Ok(if failed > 0 { 1 } else { 0 })
}

fn exit_code_for(err: &E1Error) -> u8 {
    match err {
        E1Error::SingularPoint { .. }
        | E1Error::DomainExceeded { .. }
        | E1Error::InvalidInput(_) => 2,
        E1Error::NearCharacteristic { .. }
        | E1Error::QuadratureUnstable { .. }
        | E1Error::AmbiguousFit { .. }
        | E1Error::StepTooLarge { .. }
        | E1Error::NonsmoothInitialData { .. }
        | E1Error::CflViolation { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
