use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::json;

use hilbstar::completion::{
    codilation, codilator, douglas_factor, l2_product, monotone_infimum, monotone_supremum, Direction, L2Components,
    UniversalityStatus,
};
use hilbstar::harness::{run_suite, suite_names, Seed, SuiteReport};
use hilbstar::json::{ChainJson, MorphismJson, ObjectJson};
use hilbstar::linalg::{FieldTag, Tolerance};
use hilbstar::star::{Instance, Obj};
use hilbstar::urep::nhilb_obstruction_demo;

const DEFAULT_SEED: u64 = 0x5eed_0001;

#[derive(Parser)]
#[command(
    name = "hilbstar",
    version,
    about = "Numerical checks for dagger categories of Hilbert spaces"
)]
struct Cli {
    /// Relative tolerance handed to every algorithm (absolute floor stays 1e-12).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run property suites.
    Verify {
        #[arg(long, conflicts_with = "all")]
        suite: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, env = "HILBSTAR_SEED")]
        seed: Option<u64>,
        /// Number of cases (each suite's default when omitted).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Factor g through f when f*f = g*g; writes h as a morphism.
    Douglas {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Supremum (or infimum, for a decreasing chain) of a monotone chain.
    Sup {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Column codilation of a contraction, or its codilator.
    Dilate {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        codilator: bool,
    },
    /// Orthonormal l2-product of the listed components.
    L2prod {
        /// Comma-separated dimensions (e.g. `1,2,3`) or a JSON file with an
        /// array of objects. With `--truncate`, the list is repeated cyclically.
        #[arg(long)]
        components: String,
        #[arg(long, value_enum, default_value_t = FieldArg::R)]
        field: FieldArg,
        #[arg(long, requires = "eps")]
        truncate: Option<usize>,
        #[arg(long, requires = "truncate")]
        eps: Option<f64>,
    },
    /// The (n, ‖s_n e_n‖) table of the unbounded-norm diagram.
    DemoNhilb {
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    R,
    C,
}

impl From<FieldArg> for FieldTag {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::R => FieldTag::Real,
            FieldArg::C => FieldTag::Complex,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Write errors (a closed pipe, typically) are ignored.
fn emit(format: Format, text: String, value: serde_json::Value) {
    let out = match format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
    };
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

/// `Ok(true)` when every check passed.
fn verify(
    cli: &Cli,
    suite: &Option<String>,
    all: bool,
    seed: Option<u64>,
    count: Option<usize>,
    tol: &Tolerance,
) -> anyhow::Result<bool> {
    let names: Vec<&str> = match (suite, all) {
        (Some(s), _) => vec![s.as_str()],
        (None, true) => suite_names(),
        (None, false) => bail!(
            "verify needs --suite NAME or --all (suites: {})",
            suite_names().join(", ")
        ),
    };
    let seed = Seed(seed.unwrap_or(DEFAULT_SEED));
    let reports = names
        .iter()
        .map(|n| run_suite(n, seed, count, tol))
        .collect::<hilbstar::Result<Vec<SuiteReport>>>()?;
    let text: String = reports.iter().map(|r| r.to_text()).collect();
    emit(cli.format, text, serde_json::to_value(&reports)?);
    Ok(reports.iter().all(|r| r.passed()))
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let tol = Tolerance::new(Tolerance::default().atol, cli.tol, Tolerance::default().max_iter)?;
    match &cli.command {
        Command::Verify {
            suite,
            all,
            seed,
            count,
        } => verify(cli, suite, *all, *seed, *count, &tol),
        Command::Douglas { f, g, out } => {
            let f = read_json::<MorphismJson>(f)?.to_mor(&tol)?;
            let g = read_json::<MorphismJson>(g)?.to_mor(&tol)?;
            let t = douglas_factor(&f, &g, &tol)?;
            let h = MorphismJson::from_mor(&t.h);
            if let Some(out) = out {
                fs::write(out, serde_json::to_string_pretty(&h)?)
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            let r = t.residuals;
            let ok = r.factorization <= 1e-6 * g.mat().norm().max(f64::MIN_POSITIVE) && r.idempotence <= 1e-6;
            emit(
                cli.format,
                format!(
                    "iterations {}\n|hf - g| {:.3e}\n|d^2 - 2d| {:.3e}\n",
                    t.iterations, r.factorization, r.idempotence
                ),
                json!({"iterations": t.iterations, "factorization": r.factorization, "idempotence": r.idempotence, "h": h}),
            );
            Ok(ok)
        }
        Command::Sup { chain } => {
            let chain = read_json::<ChainJson>(chain)?.to_chain(&tol)?;
            let s = match chain.direction() {
                Direction::Increasing => monotone_supremum(&chain, &tol)?,
                Direction::Decreasing => monotone_infimum(&chain, &tol)?,
            };
            emit(
                cli.format,
                format!(
                    "index {}\nlast gap {:.3e}\n{}\n",
                    s.index,
                    s.last_gap,
                    serde_json::to_string(s.value.as_mat())?
                ),
                json!({"index": s.index, "last_gap": s.last_gap, "value": s.value.as_mat()}),
            );
            Ok(true)
        }
        Command::Dilate {
            f,
            codilator: universal,
        } => {
            let f = read_json::<MorphismJson>(f)?.to_mor(&tol)?;
            let (c, status) = if *universal {
                let c = codilator(&f, &tol)?;
                (c.codilation, Some(c.status))
            } else {
                (codilation(&f, &tol)?, None)
            };
            let r = c.residuals(&f);
            let scale = 1.0 + f.mat().norm();
            let ok = r.t1_isometry <= 1e-9 && r.t2_isometry <= 1e-9 && r.factorization <= 1e-9 * scale;
            let status = status.map(|s| match s {
                UniversalityStatus::Universal => "universal",
                UniversalityStatus::UniversalityUnverified => "universality-unverified",
            });
            let mut text = format!(
                "apex dim {}\njointly epic {}\nt1 isometry {:.3e}\nt2 isometry {:.3e}\nt2* t1 - f {:.3e}\n",
                c.apex.dim(),
                c.jointly_epic,
                r.t1_isometry,
                r.t2_isometry,
                r.factorization
            );
            if let Some(s) = status {
                text.push_str(&format!("status {s}\n"));
            }
            emit(
                cli.format,
                text,
                json!({
                    "apex_dim": c.apex.dim(),
                    "jointly_epic": c.jointly_epic,
                    "status": status,
                    "t1": MorphismJson::from_mor(&c.t1),
                    "t2": MorphismJson::from_mor(&c.t2),
                    "residuals": {"t1_isometry": r.t1_isometry, "t2_isometry": r.t2_isometry, "factorization": r.factorization},
                }),
            );
            Ok(ok)
        }
        Command::L2prod {
            components,
            field,
            truncate,
            eps,
        } => {
            let field = FieldTag::from(*field);
            let objs = parse_components(components, field, &tol)?;
            let instance = match objs.first() {
                Some(o) => o.instance(),
                None => Instance::Fd(field),
            };
            let comps = match (truncate, eps) {
                (Some(n), Some(eps)) => {
                    if objs.is_empty() {
                        bail!("--truncate needs at least one component");
                    }
                    let objs = Arc::new(objs);
                    L2Components::Truncated {
                        generator: Arc::new(move |j| objs[j % objs.len()].clone()),
                        n: *n,
                        eps: *eps,
                    }
                }
                _ => L2Components::Finite(objs),
            };
            let p = l2_product(&instance, &comps)?;
            let bp = &p.biproduct;
            let (orth, total) = p.equation_defects;
            emit(
                cli.format,
                format!(
                    "apex dim {}\ncomponents {}\nepsilon {:e}\nmax |p_j i_k - delta_jk| {:.3e}\n|sum i_j p_j - 1| {:.3e}\n",
                    bp.apex.dim(),
                    bp.len(),
                    p.epsilon,
                    orth,
                    total
                ),
                json!({
                    "apex_dim": bp.apex.dim(),
                    "epsilon": p.epsilon,
                    "equation_defects": [orth, total],
                    "injections": bp.injections.iter().map(MorphismJson::from_mor).collect::<Vec<_>>(),
                    "projections": bp.projections.iter().map(MorphismJson::from_mor).collect::<Vec<_>>(),
                }),
            );
            Ok(orth == 0.0 && total == 0.0)
        }
        Command::DemoNhilb { n } => {
            let rows = nhilb_obstruction_demo(*n)?;
            let ok = rows.iter().all(|r| r.norm == r.n);
            let mut text = String::from("n norm\n");
            for r in &rows {
                text.push_str(&format!("{} {}\n", r.n, r.norm));
            }
            emit(cli.format, text, serde_json::to_value(&rows)?);
            Ok(ok)
        }
    }
}

fn parse_components(arg: &str, field: FieldTag, tol: &Tolerance) -> anyhow::Result<Vec<Obj>> {
    let path = Path::new(arg);
    if path.is_file() {
        let objs: Vec<ObjectJson> = read_json(path)?;
        return objs
            .iter()
            .map(|o| match o {
                ObjectJson::Fd(d) => Ok(Obj::fd(d.dim, field)),
                ObjectJson::Rep(r) => Ok(Obj::Rep(Arc::new(r.to_rep()?.validated(tol)?))),
            })
            .collect();
    }
    arg.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map(|d| Obj::fd(d, field))
                .with_context(|| format!("component `{s}` is neither a file nor a dimension"))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
