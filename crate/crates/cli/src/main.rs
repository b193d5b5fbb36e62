use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use omc_core::error::{OmcError, Result};
use omc_core::json::{load_category, load_functor, load_polygraph};
use omc_core::ops::{self, Budgets, Outcome, TransportArgs};
use omc_core::suite::{SuiteConfig, SUITES};

/// Checks on finite strict ω-categories. Prints JSON; exits 0 when the check
/// holds, 1 when it fails, 2 when only inconclusive, 3 on usage or schema
/// errors. Budgets are read from OMC_BUDGET_CELLS, OMC_BUDGET_CYLINDERS,
/// OMC_BUDGET_NODES and OMC_BUDGET_FUNCTORS.
#[derive(Parser)]
#[command(name = "omc", version)]
struct Cli {
    /// Print single-line JSON.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the axioms of a category, functor or polygraph document.
    Validate { file: PathBuf },
    /// Decide whether a functor is a weak equivalence.
    IsWeq { functor: PathBuf },
    /// Decide whether a functor is a trivial fibration.
    IsTfib { functor: PathBuf },
    /// Decide x ≋ y, or list every ≋-class.
    Eqv {
        category: PathBuf,
        #[arg(long, requires_all = ["x", "y"])]
        dim: Option<usize>,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// Emit the category of cylinders ΓX.
    Gamma {
        category: PathBuf,
        /// Emit the structure report instead of the category.
        #[arg(long)]
        report: bool,
    },
    /// Emit the gluing category of a functor.
    Glue {
        functor: PathBuf,
        #[arg(long)]
        report: bool,
    },
    /// Transport a cell along two parallel cylinders given by their ΓX ids.
    Transport {
        category: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        z: String,
        #[arg(long)]
        bottom_up: bool,
    },
    /// Compare weq(f) against tfib(λf).
    Charweq { functor: PathBuf },
    /// Search for a lift in a commuting square.
    Lift { square: PathBuf },
    /// Search for an immersion certificate.
    IsImmersion { functor: PathBuf },
    /// Run small-object stages for X → Y (X empty by default).
    Soa {
        category: PathBuf,
        #[arg(long, default_value_t = 1)]
        stages: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, requires = "images")]
        source: Option<PathBuf>,
        /// Images of the source generators as [{dim, from, to}].
        #[arg(long, requires = "source")]
        images: Option<PathBuf>,
    },
    /// Quotient by reversible n-cells and truncate at n.
    Collapse {
        category: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// View an n-category as an ω-category with cap n.
    Include {
        category: PathBuf,
        #[arg(long)]
        cap: usize,
    },
    /// Forget cells above dimension n.
    Truncate {
        category: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// The free category on a polygraph.
    Free {
        polygraph: PathBuf,
        /// Read 2-generators as relations between 1-cells.
        #[arg(long)]
        presented: bool,
    },
    /// The n-globe, its boundary, or their polygraphs.
    Globe {
        n: usize,
        #[arg(long)]
        boundary: bool,
        #[arg(long)]
        polygraph: bool,
    },
    /// Pushout of two polygraph morphisms with a common domain.
    PushoutPoly { left: PathBuf, right: PathBuf },
    /// Search for an isomorphism between two categories.
    Iso { a: PathBuf, b: PathBuf },
    /// Run the cylinder law suite on seeded random categories.
    CylLaws {
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Run law suites; `--suite none` runs nothing.
    Suite {
        #[command(flatten)]
        gen: GenArgs,
        /// Suites to run, comma separated: all, none, or names from the list.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
        /// Random immersion pushouts.
        #[arg(long)]
        pushouts: Option<usize>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = SuiteConfig::default().count)]
    count: usize,
    #[arg(long, default_value_t = SuiteConfig::default().max_cells)]
    max_cells: usize,
    #[arg(long, default_value_t = SuiteConfig::default().max_cap)]
    max_cap: usize,
}

impl GenArgs {
    fn config(&self, b: Budgets, suites: Vec<String>) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            count: self.count,
            max_cells: self.max_cells,
            max_cap: self.max_cap,
            cylinder_budget: b.cylinders,
            functor_limit: b.functors,
            suites,
            ..SuiteConfig::default()
        }
    }
}

fn suites(names: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for n in names {
        match n.as_str() {
            "none" | "" => {}
            "all" => out.extend(SUITES.iter().map(|s| s.to_string())),
            s if SUITES.contains(&s) => out.push(s.to_string()),
            s => return Err(OmcError::Invalid(format!("unknown suite {s:?}; known: {}", SUITES.join(", ")))),
        }
    }
    Ok(out)
}

fn functor(p: &Path) -> Result<omc_core::functor::Functor> {
    load_functor(p)
}

fn run(cmd: Cmd) -> Result<Outcome> {
    let b = Budgets::from_env()?;
    match cmd {
        Cmd::Validate { file } => ops::validate(&file),
        Cmd::IsWeq { functor: f } => Ok(ops::is_weq(&functor(&f)?)),
        Cmd::IsTfib { functor: f } => Ok(ops::is_tfib(&functor(&f)?)),
        Cmd::Eqv { category, dim, x, y } => {
            let pair = match (dim, &x, &y) {
                (Some(d), Some(x), Some(y)) => Some((d, x.as_str(), y.as_str())),
                (None, None, None) => None,
                _ => return Err(OmcError::Invalid("--dim, --x and --y go together".into())),
            };
            ops::eqv(load_category(&category)?, pair)
        }
        Cmd::Gamma { category, report } => ops::gamma(load_category(&category)?, b, report),
        Cmd::Glue { functor: f, report } => ops::glue(&functor(&f)?, b, report),
        Cmd::Transport { category, dim, u, v, z, bottom_up } => ops::transport_cmd(
            load_category(&category)?,
            b,
            TransportArgs { dim, u: &u, v: &v, z: &z, bottom_up },
        ),
        Cmd::Charweq { functor: f } => ops::charweq(&functor(&f)?, b),
        Cmd::Lift { square } => ops::lift(&square, b),
        Cmd::IsImmersion { functor: f } => ops::is_immersion(&functor(&f)?, b),
        Cmd::Soa { category, stages, dim, source, images } => {
            let src = source.as_deref().zip(images.as_deref());
            ops::soa(load_category(&category)?, src, dim, stages)
        }
        Cmd::Collapse { category, dim } => ops::collapse_cmd(&load_category(&category)?, dim),
        Cmd::Include { category, cap } => ops::include_cmd(&load_category(&category)?, cap),
        Cmd::Truncate { category, dim } => Ok(ops::truncate_cmd(&load_category(&category)?, dim)),
        Cmd::Free { polygraph, presented } => ops::free(load_polygraph(&polygraph)?, b, presented),
        Cmd::Globe { n, boundary, polygraph } => ops::globe_cmd(n, boundary, polygraph),
        Cmd::PushoutPoly { left, right } => ops::pushout_poly(&left, &right),
        Cmd::Iso { a, b: bp } => ops::iso(load_category(&a)?, load_category(&bp)?, b),
        Cmd::CylLaws { gen } => ops::suite(&gen.config(b, vec!["cylinder-laws".into()])),
        Cmd::Suite { gen, suite, pushouts } => {
            let mut cfg = gen.config(b, suites(&suite)?);
            if let Some(p) = pushouts {
                cfg.pushouts = p;
            }
            ops::suite(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(o) => {
            let text = if cli.compact {
                serde_json::to_string(&o.value)
            } else {
                serde_json::to_string_pretty(&o.value)
            };
            println!("{}", text.expect("values serialize"));
            ExitCode::from(ops::exit_code(o.verdict) as u8)
        }
        Err(e) => {
            eprintln!("omc: {e}");
            ExitCode::from(ops::error_exit_code(&e) as u8)
        }
    }
}
