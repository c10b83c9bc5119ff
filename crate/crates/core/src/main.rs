use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use shannon_bounds::bounds::{prop1_bound, tsan1_check, IndexVector, Method};
use shannon_bounds::coefficients::{coefficients, Family, MAX_CHEBYSHEV_DEGREE};
use shannon_bounds::designs::{
    builtin_design, export_csv, frame_potential, verify_design, BuiltinDesign, MomentVector, QuantumState,
};
use shannon_bounds::estimators::{verify_envelope, EnvelopeReport, GridSpec, Inequality};
use shannon_bounds::figures::{emit_figure, render_svg, FigureId, FigureSpec};
use shannon_bounds::relations::{prop2_bounds, state_independent_check, steering_bound, von_neumann_bounds};
use shannon_bounds::sampling::{min_over_samples, random_distribution};
use shannon_bounds::suite::{run_suite, SuiteConfig};
use shannon_bounds::Error;

#[derive(Parser)]
#[command(name = "shannon-bounds", version, about = "Two-sided Shannon entropy estimates from power sums")]
struct Cli {
    /// key=value file overriding grid sizes, sample counts and seeds
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Taylor,
    Cheb,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Taylor => vec![Method::Taylor],
            MethodArg::Cheb => vec![Method::Chebyshev],
            MethodArg::Both => Method::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact estimator coefficients: family c, a, b, wa or wb
    Coeffs {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
    },
    /// Sample the polynomial inequalities on a grid
    Verify {
        /// Degree; all of 2..15 when omitted
        #[arg(long)]
        n: Option<usize>,
        /// taylor-lower, taylor-upper, cheb-lower or cheb-upper; all when omitted
        #[arg(long)]
        tag: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Two-sided entropy bounds from I^(2), ..., I^(n)
    Bounds {
        #[arg(long = "L")]
        outcomes: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<f64>,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// Worst margin of the conjectured Shannon–Tsallis inequality on random distributions
    Conjecture {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Describe, verify or export a built-in design
    Design {
        #[arg(long)]
        name: String,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Average-entropy bounds for a design measurement on a given state
    Relate {
        #[arg(long)]
        design: String,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// bloch:nx,ny,nz
        #[arg(long)]
        state: String,
    },
    /// Von Neumann entropy bounds from tr rho^2, ..., tr rho^t
    Vn {
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        moments: Vec<f64>,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// State-independent steering bound, certified on random states
    Steer {
        #[arg(long)]
        design: String,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Random states used to certify the bound; 0 skips certification
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Tabulate one of the figures as CSV
    Figure {
        #[arg(long)]
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write an SVG next to the CSV
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Run every verification check
    Suite {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ConvergenceFailure(_) | Error::SandwichViolation { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

const CONFIG_KEYS: [&str; 7] = [
    "seed",
    "samples",
    "points",
    "grid_uniform",
    "grid_clustered",
    "cluster_width",
    "states",
];

struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut map = HashMap::new();
        let Some(path) = path else {
            return Ok(Self(map));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("line {}: expected key=value", no + 1)))?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(Failure::Usage(format!("line {}: unknown key {key}", no + 1)));
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self(map))
    }

    /// Flag value if given, else the config entry, else the default.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.0.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Failure::Usage(format!("config value {key}={raw} is invalid"))),
            None => Ok(default),
        }
    }

    fn grid(&self, uniform_flag: Option<usize>) -> Result<GridSpec, Failure> {
        let base = GridSpec::default();
        Ok(GridSpec {
            uniform: self.pick(uniform_flag, "grid_uniform", base.uniform)?,
            clustered: self.pick(None, "grid_clustered", base.clustered)?,
            cluster_width: self.pick(None, "cluster_width", base.cluster_width)?,
        })
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_design(name: &str) -> Result<BuiltinDesign, Failure> {
    Ok(name.parse::<BuiltinDesign>()?)
}

fn coeffs(family: &str, n: usize) -> CmdResult {
    let table = coefficients(family.parse::<Family>()?, n)?;
    println!("s,numerator,denominator,value");
    for (s, c) in table.entries() {
        println!("{s},{},{},{}", c.numer(), c.denom(), num(table.value(*s)));
    }
    Ok(())
}

fn verify(cfg: &Config, n: Option<usize>, tag: Option<&str>, grid: Option<usize>) -> CmdResult {
    let grid = cfg.grid(grid)?;
    let tags = match tag {
        Some(t) => vec![t.parse::<Inequality>()?],
        None => Inequality::ALL.to_vec(),
    };
    let degrees: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (2..=MAX_CHEBYSHEV_DEGREE).collect(),
    };
    println!("{}", EnvelopeReport::csv_header());
    let mut failed = Vec::new();
    for &n in &degrees {
        for &tag in &tags {
            let report = verify_envelope(n, tag, &grid)?;
            println!("{}", report.csv_row());
            if !report.holds() {
                failed.push(format!("n={n} {tag}"));
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("violated: {}", failed.join(", "))))
    }
}

fn bounds(outcomes: usize, indices: Vec<f64>, method: MethodArg) -> CmdResult {
    let idx = IndexVector::new(indices)?;
    println!("method,n,upsilon,lower,upper");
    for m in method.methods() {
        let b = prop1_bound(&idx, outcomes, m)?;
        println!("{m},{},{},{},{}", b.degree, num(b.upsilon), num(b.lower), num(b.upper));
    }
    Ok(())
}

fn conjecture(cfg: &Config, n: Option<usize>, samples: Option<usize>, seed: Option<u64>) -> CmdResult {
    let samples = cfg.pick(samples, "samples", 100_000)?;
    let seed = cfg.pick(seed, "seed", 2024)?;
    let degrees: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (2..=MAX_CHEBYSHEV_DEGREE).collect(),
    };
    println!("n,samples,worst_margin");
    let mut worst_all = f64::INFINITY;
    for n in degrees {
        let worst = min_over_samples(samples, seed, |rng| {
            let p = random_distribution(rng, 2, 64);
            Ok(tsan1_check(&p, n)?.margin())
        })?;
        worst_all = worst_all.min(worst);
        println!("{n},{samples},{}", num(worst));
    }
    if worst_all >= -1e-12 {
        Ok(())
    } else {
        Err(Failure::Check(format!("conjecture violated by {worst_all:e}")))
    }
}

fn design(name: &str, check: bool, export: Option<&Path>) -> CmdResult {
    let d = builtin_design(parse_design(name)?)?;
    println!("name,d,t,K,M,ell");
    println!(
        "{},{},{},{},{},{}",
        d.name(),
        d.dim(),
        d.strength(),
        d.len(),
        d.group_count(),
        d.outcomes_per_group()
    );
    if let Some(path) = export {
        fs::write(path, export_csv(&d)?)?;
    }
    if check {
        let r = verify_design(&d);
        println!("frame_potential,defect,tolerance,is_design");
        println!(
            "{},{},{},{}",
            num(frame_potential(&d, d.strength())),
            num(r.defect),
            num(r.tolerance),
            r.is_design
        );
        if !r.is_design {
            return Err(Failure::Check(format!("{name} is not a {}-design", d.strength())));
        }
    }
    Ok(())
}

fn parse_state(spec: &str) -> Result<QuantumState, Failure> {
    let usage = || Failure::Usage(format!("state must look like bloch:nx,ny,nz, got {spec}"));
    let body = spec.strip_prefix("bloch:").ok_or_else(usage)?;
    let parts: Vec<f64> = body
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage())?;
    let r: [f64; 3] = parts.try_into().map_err(|_| usage())?;
    Ok(QuantumState::from_bloch(r)?)
}

fn relate(design: &str, method: MethodArg, state: &str) -> CmdResult {
    let d = builtin_design(parse_design(design)?)?;
    let rho = parse_state(state)?;
    println!("design,method,lower,upper,upsilon,clipped,average_entropy");
    for m in method.methods() {
        let r = prop2_bounds(&d, &rho, m)?;
        println!(
            "{},{m},{},{},{},{},{}",
            d.name(),
            num(r.lower),
            num(r.upper),
            num(r.upsilon),
            r.clipped,
            num(r.average_entropy)
        );
    }
    Ok(())
}

fn vn(d: usize, moments: Vec<f64>, method: MethodArg) -> CmdResult {
    let mut values = vec![1.0];
    values.extend(moments);
    let m = MomentVector::new(d, values)?;
    println!("method,t,lambda,lower,upper");
    for method in method.methods() {
        let b = von_neumann_bounds(&m, method)?;
        println!("{method},{},{},{},{}", m.order(), num(b.upsilon), num(b.lower), num(b.upper));
    }
    Ok(())
}

fn steer(cfg: &Config, design: &str, method: MethodArg, samples: Option<usize>, seed: Option<u64>) -> CmdResult {
    let d = builtin_design(parse_design(design)?)?;
    let samples = cfg.pick(samples, "states", 10_000)?;
    let seed = cfg.pick(seed, "seed", 2024)?;
    println!("design,method,bound,certified,worst_margin");
    for m in method.methods() {
        let margin = if samples > 0 {
            state_independent_check(&d, m, samples, seed)?.worst_margin
        } else {
            f64::NAN
        };
        let s = steering_bound(&d, m)?;
        println!("{},{m},{},{},{}", d.name(), num(s.value), s.certified, num(margin));
    }
    Ok(())
}

fn figure(cfg: &Config, id: &str, out: Option<&Path>, svg: bool, points: Option<usize>) -> CmdResult {
    let id: FigureId = id.parse()?;
    let default_points = FigureSpec::new(id).points;
    let spec = FigureSpec::new(id).with_points(cfg.pick(points, "points", default_points)?);
    let table = emit_figure(&spec)?;
    let csv = table.to_csv();
    match out {
        Some(path) => {
            fs::write(path, &csv)?;
            if svg {
                fs::write(path.with_extension("svg"), render_svg(&table, id.tag()))?;
            }
        }
        None => {
            if svg {
                return Err(Failure::Usage("--svg needs --out".into()));
            }
            print!("{csv}");
        }
    }
    Ok(())
}

fn suite(cfg: &Config, quick: bool, seed: Option<u64>) -> CmdResult {
    let seed = cfg.pick(seed, "seed", 2024)?;
    let mut config = if quick {
        SuiteConfig::quick(seed)
    } else {
        SuiteConfig::full(seed)
    };
    config.grid = GridSpec {
        uniform: cfg.pick(None, "grid_uniform", config.grid.uniform)?,
        clustered: cfg.pick(None, "grid_clustered", config.grid.clustered)?,
        cluster_width: cfg.pick(None, "cluster_width", config.grid.cluster_width)?,
    };
    config.distributions = cfg.pick(None, "samples", config.distributions)?;
    config.states = cfg.pick(None, "states", config.states)?;
    let report = run_suite(&config);
    print!("{}", report.render());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failed: {}", report.failures().join(", "))))
    }
}

fn dispatch(cli: Cli) -> CmdResult {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Coeffs { family, n } => coeffs(&family, n),
        Command::Verify { n, tag, grid } => verify(&cfg, n, tag.as_deref(), grid),
        Command::Bounds {
            outcomes,
            indices,
            method,
        } => bounds(outcomes, indices, method),
        Command::Conjecture { n, samples, seed } => conjecture(&cfg, n, samples, seed),
        Command::Design { name, verify, export } => design(&name, verify, export.as_deref()),
        Command::Relate { design, method, state } => relate(&design, method, &state),
        Command::Vn { d, moments, method } => vn(d, moments, method),
        Command::Steer {
            design,
            method,
            samples,
            seed,
        } => steer(&cfg, &design, method, samples, seed),
        Command::Figure { id, out, svg, points } => figure(&cfg, &id, out.as_deref(), svg, points),
        Command::Suite { quick, seed } => suite(&cfg, quick, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
