//! `raag-growth`: homology growth experiments from the command line.

mod cache;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use raag_growth::chain::reduced_betti;
use raag_growth::complex::{ComplexError, SimplicialComplex};
use raag_growth::davis::{davis_betti, mv_check, mv_check_all, DavisError, MvReport};
use raag_growth::library::{builtin, CATALOG};
use raag_growth::linalg::{Field, FieldError, PrimeField};
use raag_growth::nerve::{collapse_report, CollapseRow, NerveError};
use raag_growth::report::{betti_rows, rp2_verdict, CSV_HEADER};
use raag_growth::salvetti::{
    cover_betti, torsion_from_betti, BettiTable, CoverError, CoverSpec, RunOptions, TorsionProfile,
    DEFAULT_CELL_BUDGET,
};

use cache::Cache;

const CACHE_ENV: &str = "RAAG_GROWTH_CACHE_DIR";

#[derive(Parser)]
#[command(name = "raag-growth", version, about = "Homology growth of finite covers of Salvetti and Davis complexes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `builtin:NAME` or a path to a facet-list file.
    #[arg(long, global = true)]
    complex: Option<String>,
    /// `q` or `f:<prime>`.
    #[arg(long, global = true, default_value = "q")]
    field: Field,
    /// Uniform exponents, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "2")]
    n: Vec<u64>,
    /// Per-vertex exponents `v=n,w=m,...`; replaces `--n`.
    #[arg(long, global = true)]
    exponents: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
    /// Maximum number of cells in any one degree.
    #[arg(long, global = true, default_value_t = DEFAULT_CELL_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    out: Format,
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced Betti numbers of the complex itself.
    Betti,
    /// Normalized Betti numbers of the covers for each `--n`.
    CoverScan,
    /// Torsion ranks from Betti numbers over Q and the prime of `--field`.
    Torsion,
    /// Coefficient-system nerve lemma and the collapse report.
    NerveCheck,
    /// Betti numbers of the Davis complex `Y_L`.
    Davis,
    /// Mayer-Vietoris exactness at one vertex, or at every vertex.
    MvCheck {
        #[arg(long)]
        vertex: Option<String>,
    },
    /// List the builtin complexes.
    Library,
    /// Reproduction recipes.
    Repro {
        #[command(subcommand)]
        recipe: Recipe,
    },
}

#[derive(Subcommand)]
enum Recipe {
    /// Flag RP^2 at uniform n (default 2): Q and F_2 tables, torsion, verdict.
    Rp2,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Inconsistent(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Budget(_) => 2,
            Failure::Inconsistent(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Budget(m) | Failure::Inconsistent(m) => m,
        }
    }
}

impl From<ComplexError> for Failure {
    fn from(e: ComplexError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<CoverError> for Failure {
    fn from(e: CoverError) -> Self {
        let m = e.to_string();
        match e {
            CoverError::Budget { .. } => Failure::Budget(m),
            CoverError::NegativeTorsion { .. } | CoverError::Chain(_) => Failure::Inconsistent(m),
            _ => Failure::Usage(m),
        }
    }
}

impl From<DavisError> for Failure {
    fn from(e: DavisError) -> Self {
        let m = e.to_string();
        match e {
            DavisError::Budget { .. } => Failure::Budget(m),
            DavisError::UnknownVertex(_) => Failure::Usage(m),
            DavisError::BadLink(_) | DavisError::Chain(_) => Failure::Inconsistent(m),
        }
    }
}

impl From<NerveError> for Failure {
    fn from(e: NerveError) -> Self {
        match e {
            NerveError::Cover(c) => c.into(),
            NerveError::TooManyFacets { .. } => Failure::Budget(e.to_string()),
            NerveError::LemmaViolated { .. } => Failure::Inconsistent(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

struct Context {
    common: Common,
    cache: Cache,
}

impl Context {
    fn opts(&self) -> RunOptions {
        RunOptions {
            seed: self.common.seed,
            threads: self.common.threads as usize,
            budget: self.common.budget,
        }
    }

    fn complex(&self) -> Result<(String, SimplicialComplex)> {
        let source = self
            .common
            .complex
            .as_deref()
            .ok_or_else(|| Failure::Usage("--complex is required".into()))?;
        load_complex(source)
    }

    fn specs(&self, l: &SimplicialComplex) -> Result<Vec<CoverSpec>> {
        if let Some(text) = &self.common.exponents {
            let mut exponents = BTreeMap::new();
            for item in text.split(',').filter(|s| !s.trim().is_empty()) {
                let (v, n) = item
                    .split_once('=')
                    .ok_or_else(|| Failure::Usage(format!("bad exponent {item:?}; expected v=n")))?;
                let n: u64 = n
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("bad exponent {item:?}")))?;
                exponents.insert(v.trim().to_string(), n);
            }
            let spec = CoverSpec { exponents };
            spec.aligned(l)?;
            return Ok(vec![spec]);
        }
        if let Some(&bad) = self.common.n.iter().find(|&&n| n == 0) {
            return Err(Failure::Usage(format!("--n must be at least 1, got {bad}")));
        }
        Ok(self.common.n.iter().map(|&n| CoverSpec::uniform(l, n)).collect())
    }

    fn cache_key(&self, kind: &str, l: &SimplicialComplex, spec: &CoverSpec, field: Field) -> String {
        let spec = serde_json::to_string(spec).expect("spec serializes");
        Cache::key(&[kind, &l.to_text(), &spec, &field.to_string(), &self.common.seed.to_string()])
    }

    fn cover(&self, name: &str, l: &SimplicialComplex, spec: &CoverSpec, field: Field) -> Result<BettiTable> {
        let key = self.cache_key("cover", l, spec, field);
        if let Some(mut t) = self.cache.get::<BettiTable>(&key) {
            t.complex = name.to_string();
            return Ok(t);
        }
        let t = cover_betti(name, l, spec, field, self.opts())?;
        self.cache.put(&key, &t);
        Ok(t)
    }

    fn davis(&self, name: &str, l: &SimplicialComplex, field: Field) -> Result<BettiTable> {
        let key = self.cache_key("davis", l, &CoverSpec::uniform(l, 2), field);
        if let Some(mut t) = self.cache.get::<BettiTable>(&key) {
            t.complex = name.to_string();
            return Ok(t);
        }
        let t = davis_betti(name, l, field, self.opts())?;
        self.cache.put(&key, &t);
        Ok(t)
    }

    fn torsion(&self, name: &str, l: &SimplicialComplex, spec: &CoverSpec, p: PrimeField) -> Result<TorsionProfile> {
        let rational = self.cover(name, l, spec, Field::Rational)?;
        let modular = self.cover(name, l, spec, Field::Prime(p))?;
        let torsion = torsion_from_betti(&rational.betti, &modular.betti)?;
        Ok(TorsionProfile {
            rational,
            modular,
            p: p.p(),
            torsion,
        })
    }
}

/// `builtin:NAME`, a file path, or a bare builtin name.
fn load_complex(source: &str) -> Result<(String, SimplicialComplex)> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return Ok((name.to_string(), builtin(name)?));
    }
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{source}: {e}")))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| source.to_string());
        return Ok((name, SimplicialComplex::from_text(&text)?));
    }
    builtin(source)
        .map(|c| (source.to_string(), c))
        .map_err(|_| Failure::Usage(format!("{source:?} is neither a file nor a builtin complex")))
}

fn csv_text<R: AsRef<[u8]>, I: IntoIterator<Item = Vec<String>>>(header: &[R], rows: I) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn table_csv(tables: &[BettiTable]) -> String {
    csv_text(
        &CSV_HEADER,
        tables.iter().flat_map(betti_rows).map(|r| {
            vec![
                r.complex,
                r.index.to_string(),
                r.n,
                r.field,
                r.degree.to_string(),
                r.betti.to_string(),
                r.normalized,
                r.target,
            ]
        }),
    )
}

#[derive(Serialize)]
struct ComplexBetti {
    complex: String,
    field: Field,
    f_vector: Vec<usize>,
    is_flag: bool,
    reduced_betti: Vec<usize>,
}

#[derive(Serialize)]
struct NerveCheckOutput {
    complex: String,
    n: String,
    field: Field,
    rows: Vec<CollapseRow>,
}

fn run(ctx: &Context, command: &Command) -> Result<String> {
    let out = ctx.common.out;
    let field = ctx.common.field;
    Ok(match command {
        Command::Library => {
            let rows = CATALOG.iter().map(|(n, d)| vec![n.to_string(), d.to_string()]);
            match out {
                Format::Csv => csv_text(&["name", "description"], rows),
                Format::Json => json_text(&CATALOG.iter().map(|(n, d)| [n, d]).collect::<Vec<_>>()),
            }
        }
        Command::Betti => {
            let (name, l) = ctx.complex()?;
            let result = ComplexBetti {
                reduced_betti: reduced_betti(&l, field, ctx.common.seed),
                f_vector: l.f_vector().counts,
                is_flag: l.is_flag(),
                complex: name,
                field,
            };
            match out {
                Format::Csv => csv_text(
                    &["complex", "field", "dimension", "reduced_betti"],
                    result.reduced_betti.iter().enumerate().map(|(d, b)| {
                        vec![result.complex.clone(), field.to_string(), d.to_string(), b.to_string()]
                    }),
                ),
                Format::Json => json_text(&result),
            }
        }
        Command::CoverScan => {
            let (name, l) = ctx.complex()?;
            let tables = ctx
                .specs(&l)?
                .iter()
                .map(|s| ctx.cover(&name, &l, s, field))
                .collect::<Result<Vec<_>>>()?;
            match out {
                Format::Csv => table_csv(&tables),
                Format::Json => json_text(&tables),
            }
        }
        Command::Torsion => {
            let (name, l) = ctx.complex()?;
            let Field::Prime(p) = field else {
                return Err(Failure::Usage("torsion needs --field f:<prime>".into()));
            };
            let profiles = ctx
                .specs(&l)?
                .iter()
                .map(|s| ctx.torsion(&name, &l, s, p))
                .collect::<Result<Vec<_>>>()?;
            match out {
                Format::Csv => csv_text(
                    &["complex", "index", "n", "p", "degree", "betti_q", "betti_fp", "torsion"],
                    profiles.iter().flat_map(|pr| {
                        (0..pr.torsion.len()).map(move |i| {
                            vec![
                                pr.rational.complex.clone(),
                                pr.rational.index.to_string(),
                                pr.rational.spec.describe(),
                                pr.p.to_string(),
                                i.to_string(),
                                pr.rational.betti[i].to_string(),
                                pr.modular.betti[i].to_string(),
                                pr.torsion[i].to_string(),
                            ]
                        })
                    }),
                ),
                Format::Json => json_text(&profiles),
            }
        }
        Command::NerveCheck => {
            let (name, l) = ctx.complex()?;
            let reports = ctx
                .specs(&l)?
                .iter()
                .map(|s| {
                    Ok(NerveCheckOutput {
                        complex: name.clone(),
                        n: s.describe(),
                        field,
                        rows: collapse_report(&name, &l, s, field, ctx.opts())?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match out {
                Format::Csv => csv_text(
                    &[
                        "complex",
                        "n",
                        "field",
                        "degree",
                        "cover_normalized",
                        "nerve_normalized",
                        "e1_offrow_mass",
                        "projection_kernel",
                    ],
                    reports.iter().flat_map(|r| &r.rows).map(|r| {
                        vec![
                            r.complex.clone(),
                            r.n.clone(),
                            r.field.clone(),
                            r.degree.to_string(),
                            r.cover_normalized.fraction(),
                            r.nerve_normalized.fraction(),
                            r.e1_offrow_mass.fraction(),
                            r.projection_kernel.fraction(),
                        ]
                    }),
                ),
                Format::Json => json_text(&reports),
            }
        }
        Command::Davis => {
            let (name, l) = ctx.complex()?;
            let table = ctx.davis(&name, &l, field)?;
            match out {
                Format::Csv => table_csv(std::slice::from_ref(&table)),
                Format::Json => json_text(&table),
            }
        }
        Command::MvCheck { vertex } => {
            let (name, l) = ctx.complex()?;
            let reports: Vec<MvReport> = match vertex {
                Some(v) => vec![mv_check(&l, v, field, ctx.opts())?],
                None => mv_check_all(&l, field, ctx.opts())?,
            };
            let text = match out {
                Format::Csv => csv_text(
                    &[
                        "complex",
                        "vertex",
                        "field",
                        "degree",
                        "star",
                        "deletion",
                        "link",
                        "whole",
                        "alpha_rank",
                        "link_to_star_rank",
                        "exact",
                        "surjective",
                    ],
                    reports.iter().flat_map(|r| {
                        let name = name.clone();
                        (0..r.alpha_rank.len()).map(move |i| {
                            let at = |p: &[usize]| p.get(i).copied().unwrap_or(0).to_string();
                            vec![
                                name.clone(),
                                r.vertex.clone(),
                                r.field.to_string(),
                                i.to_string(),
                                at(&r.star.betti),
                                at(&r.deletion.betti),
                                at(&r.link.betti),
                                at(&r.whole.betti),
                                r.alpha_rank[i].to_string(),
                                r.link_to_star_rank[i].to_string(),
                                r.exact.to_string(),
                                r.surjective.to_string(),
                            ]
                        })
                    }),
                ),
                Format::Json => json_text(&reports),
            };
            if let Some(bad) = reports.iter().find(|r| !r.exact || !r.surjective) {
                print!("{text}");
                return Err(Failure::Inconsistent(format!(
                    "Mayer-Vietoris check failed at vertex {} (exact {}, surjective {})",
                    bad.vertex, bad.exact, bad.surjective
                )));
            }
            text
        }
        Command::Repro { recipe: Recipe::Rp2 } => {
            let l = builtin("rp2_flag")?;
            let n = match ctx.common.n.as_slice() {
                [n] if *n >= 1 => *n,
                _ => return Err(Failure::Usage("repro rp2 takes a single --n".into())),
            };
            let f2 = PrimeField::new(2)?;
            let profile = ctx.torsion("rp2_flag", &l, &CoverSpec::uniform(&l, n), f2)?;
            let verdict = rp2_verdict(&profile, n, ctx.common.seed);
            info!("rp2 verdict: pass = {}", verdict.pass);
            json_text(&verdict)
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Context {
        cache: Cache::new(cli.common.cache_dir.clone()),
        common: cli.common,
    };
    match run(&ctx, &cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
