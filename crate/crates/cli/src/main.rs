use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use brauer_census::analytic::{
    dirichlet_partial, exponents_inner, fit_count_table, leading_constant, moebius_sieve_constant,
    ConstantReport, Method,
};
use brauer_census::brauer::ProfileFile;
use brauer_census::census::{
    construct_witness, count_table, decide_existence, enumerate_census, CensusQuery,
    LocalConstraint,
};
use brauer_census::outer::{outer_summary, OuterFile};
use brauer_census::perm::Metric;
use brauer_census::setup::{FieldSetup, SetupFile};
use brauer_census::{Error, ErrorKind};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const THREADS_VAR: &str = "BRAUER_CENSUS_THREADS";

#[derive(Parser)]
#[command(
    name = "brauer-census",
    version,
    about = "Census and asymptotics of algebra extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth exponents a, b, b* and the group invariants behind them.
    Invariants(Common),
    /// Whether a (skew) extension with the given constraints exists.
    Exists {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        skew: bool,
    },
    /// All profiles with metric at most the bound, as TSV.
    Census {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[arg(long)]
        bound: String,
        #[arg(long)]
        skew: bool,
        /// Only generic primes of norm at most this value.
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Counts at each grid point, as TSV.
    Count {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        /// Comma-separated ascending bounds; `10^6` is accepted.
        #[arg(long)]
        grid: String,
    },
    /// Leading constant of the counting function for the disc metric.
    Constant {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        pmax: u64,
        /// Möbius-sieved constant counting skew fields only.
        #[arg(long)]
        skew: bool,
    },
    /// Compares direct enumeration with the character-sum expansion.
    IdentityCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[arg(long)]
        bound: String,
        #[arg(long, default_value_t = 50)]
        cutoff: u64,
    },
    /// Discriminant and skewness of an outer extension; `--setup` names the outer file.
    Outer {
        #[arg(long)]
        setup: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares exponents from a count table.
    Fit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        query: Query,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        skew: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    setup: PathBuf,
    /// JSON file with `xi` assignments and `tau`.
    #[arg(long)]
    constraint: Option<PathBuf>,
    /// Overrides the constraint file's τ.
    #[arg(long)]
    tau: Option<u64>,
    /// Overrides the seed of a sampled setup.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Query {
    #[arg(long, default_value = "disc")]
    metric: Metric,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Io(_) => 6,
            Failure::Lib(e) => match e.kind() {
                ErrorKind::Parse => 2,
                ErrorKind::Validation => 3,
                ErrorKind::Coverage => 4,
                ErrorKind::Unsupported => 5,
                ErrorKind::Capacity => 7,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(s) => write!(f, "io error: {s}"),
            Failure::Mismatch(s) => write!(f, "identity check failed: {s}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Floats are reported to 12 significant digits.
fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn parse_big(s: &str) -> Outcome<BigUint> {
    let s = s.trim();
    let bad = || Failure::Lib(Error::Parse(format!("bad bound `{s}`")));
    match s.split_once('^') {
        Some((b, e)) => {
            let b: BigUint = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            Ok(b.pow(e))
        }
        None => s.parse().map_err(|_| bad()),
    }
}

fn parse_grid(s: &str) -> Outcome<Vec<BigUint>> {
    s.split(',').map(parse_big).collect()
}

struct Loaded {
    setup: FieldSetup,
    constraint: LocalConstraint,
    digest: String,
    out: Option<PathBuf>,
}

fn load(common: &Common) -> Outcome<Loaded> {
    let text = read(&common.setup)?;
    let digest = digest(&text);
    let setup = match common.seed {
        None => FieldSetup::from_json(&text)?,
        Some(seed) => {
            let mut file: SetupFile =
                serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            if file.kind != "sampled" {
                return Err(
                    Error::InvalidSetup("--seed applies to sampled setups only".into()).into(),
                );
            }
            file.tail.get_or_insert_with(Default::default).seed = Some(seed);
            FieldSetup::build(file.into_spec()?)?
        }
    };
    let mut constraint = match &common.constraint {
        None => LocalConstraint::default(),
        Some(p) => LocalConstraint::from_json(&setup, &read(p)?)?,
    };
    if let Some(tau) = common.tau {
        constraint = constraint.with_tau(tau);
        constraint.check(&setup)?;
    }
    // the seed changes the setup, so it is part of the provenance
    let digest = match common.seed {
        Some(seed) => format!("{digest}+seed={seed}"),
        None => digest,
    };
    Ok(Loaded {
        setup,
        constraint,
        digest,
        out: common.out.clone(),
    })
}

fn emit(out: Option<&Path>, body: &str) -> Outcome<()> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn emit_json(out: Option<&Path>, digest: &str, mut value: Value) -> Outcome<()> {
    if let Value::Object(map) = &mut value {
        map.insert("setup_digest".into(), Value::String(digest.into()));
    }
    let mut text = serde_json::to_string_pretty(&value).expect("plain JSON values serialize");
    text.push('\n');
    emit(out, &text)
}

fn profile_json(p: &brauer_census::brauer::InvariantProfile) -> Value {
    serde_json::to_value(ProfileFile::from(p)).expect("profiles serialize")
}

fn constant_json(r: &ConstantReport) -> Value {
    let mut v = serde_json::to_value(r).expect("reports serialize");
    v["C"] = json!(round12(r.c));
    v["error_bound"] = json!(round12(r.error_bound));
    v
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Invariants(common) => {
            let l = load(&common)?;
            let report = exponents_inner(&l.setup)?;
            emit_json(
                l.out.as_deref(),
                &l.digest,
                serde_json::to_value(report).expect("serializes"),
            )
        }
        Command::Exists { common, skew } => {
            let l = load(&common)?;
            let e = decide_existence(&l.setup, &l.constraint, skew)?;
            let witness = match &e.certificate {
                Some(cert) => Some(profile_json(&construct_witness(
                    &l.setup,
                    &l.constraint,
                    cert,
                    skew,
                )?)),
                None => None,
            };
            let value = json!({
                "exists": e.exists,
                "skew": skew,
                "prefiltered": e.prefiltered,
                "certificate": e.certificate.as_ref().map(profile_json),
                "witness": witness,
            });
            emit_json(l.out.as_deref(), &l.digest, value)
        }
        Command::Census {
            common,
            query,
            bound,
            skew,
            cutoff,
        } => {
            let l = load(&common)?;
            let mut q = CensusQuery::new(query.metric, parse_big(&bound)?).skew_only(skew);
            if let Some(c) = cutoff {
                q = q.with_cutoff(c);
            }
            let rows = enumerate_census(&l.setup, &l.constraint, &q)?;
            let mut text = format!(
                "# setup_digest={}\nmetric_value\tdisc\tram\tindex\tis_skew\tprofile_json\n",
                l.digest
            );
            for r in &rows {
                text.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    r.metric(query.metric),
                    r.disc,
                    r.ram,
                    r.index,
                    r.is_skew,
                    profile_json(&r.profile)
                ));
            }
            emit(l.out.as_deref(), &text)
        }
        Command::Count {
            common,
            query,
            grid,
        } => {
            let l = load(&common)?;
            let table = count_table(
                &l.setup,
                &l.constraint,
                query.metric,
                &parse_grid(&grid)?,
                true,
            )?;
            let mut text = format!("# setup_digest={}\nX\ttotal\tskew\n", l.digest);
            for r in &table {
                text.push_str(&format!("{}\t{}\t{}\n", r.x, r.total, r.skew));
            }
            emit(l.out.as_deref(), &text)
        }
        Command::Constant { common, pmax, skew } => {
            let l = load(&common)?;
            let r = if skew {
                moebius_sieve_constant(&l.setup, &l.constraint, pmax)?
            } else {
                leading_constant(&l.setup, &l.constraint, pmax)?
            };
            emit_json(l.out.as_deref(), &l.digest, constant_json(&r))
        }
        Command::IdentityCheck {
            common,
            query,
            bound,
            cutoff,
        } => {
            let l = load(&common)?;
            let x = parse_big(&bound)?;
            let direct = dirichlet_partial(
                &l.setup,
                &l.constraint,
                query.metric,
                cutoff,
                &x,
                Method::Direct,
            )?;
            let charsum = dirichlet_partial(
                &l.setup,
                &l.constraint,
                query.metric,
                cutoff,
                &x,
                Method::Charsum,
            )?;
            let agree = direct == charsum;
            let value = json!({
                "agree": agree,
                "terms": direct.len(),
                "direct_total": direct.total().to_string(),
                "charsum_total": charsum.total().to_string(),
            });
            emit_json(l.out.as_deref(), &l.digest, value)?;
            if agree {
                Ok(())
            } else {
                Err(Failure::Mismatch(
                    "direct and character-sum coefficients differ".into(),
                ))
            }
        }
        Command::Outer { setup, out } => {
            let text = read(&setup)?;
            let (k, e, disc) = OuterFile::from_json(&text)?;
            let s = outer_summary(&k, &e, &disc)?;
            let value = json!({
                "delta": s.delta.to_string(),
                "d_l_over_k": s.d_l_over_k.to_string(),
                "is_skew": s.is_skew,
            });
            emit_json(out.as_deref(), &digest(&text), value)
        }
        Command::Fit {
            common,
            query,
            grid,
            skew,
        } => {
            let l = load(&common)?;
            let table = count_table(
                &l.setup,
                &l.constraint,
                query.metric,
                &parse_grid(&grid)?,
                true,
            )?;
            let f = fit_count_table(&table, skew)?;
            let value = json!({
                "alpha_hat": round12(f.alpha_hat),
                "b_hat": round12(f.b_hat),
                "intercept": round12(f.intercept),
                "points": f.points,
                "skew": skew,
            });
            emit_json(l.out.as_deref(), &l.digest, value)
        }
    }
}

fn init_threads() -> Outcome<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Lib(Error::Parse(format!(
            "{THREADS_VAR} must be a positive integer, got `{v}`"
        )))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("brauer-census: {f}");
            ExitCode::from(f.code())
        }
    }
}
