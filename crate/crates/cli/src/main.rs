use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mulab_core::construct::{
    csaszar_torus, cyclic_boundary, octahedron, projective_plane, simplex_boundary, stacked_manifold, CertifiedComplex,
};
use mulab_core::corpus::{corpus_run, parse_config, reports_to_csv, CorpusConfig};
use mulab_core::io::{format_complex, read_facet_list, read_poset_json};
use mulab_core::mu::{mu_enumerated, mu_exact, mu_ordering, mu_sampled, VertexOrdering};
use mulab_core::pi1::m_bracket;
use mulab_core::poset::{poset_f_h, poset_mu_enumerated, poset_mu_exact, poset_mu_ordering, poset_ordering, RelativePosetPair};
use mulab_core::recognize::{is_buchsbaum, is_normal_pseudomanifold, is_pure, serre_condition};
use mulab_core::verify::{Context, Outcome, Subject, Theorem, VerificationReport, VerifyOptions};
use mulab_core::{reduced_betti, Budgets, FieldSpec, RelativePair};

#[derive(Parser)]
#[command(name = "mulab", version, about = "Face numbers, homology, mu-numbers and lower-bound checks for simplicial complexes and posets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Coefficient field: `q` or `p:<prime>`.
    #[arg(long, global = true, default_value = "q")]
    field: FieldSpec,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Orderings to sample.
    #[arg(long, global = true, default_value_t = 50)]
    samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest vertex count whose 2^n induced subsets may be summed.
    #[arg(long, global = true)]
    budget_subsets: Option<usize>,
    /// Maximum number of Tietze moves.
    #[arg(long, global = true)]
    budget_tietze: Option<usize>,
}

impl Global {
    fn budgets(&self) -> Budgets {
        let mut b = Budgets::default();
        if let Some(s) = self.budget_subsets {
            b.subsets = s;
        }
        if let Some(t) = self.budget_tietze {
            b.tietze = t;
        }
        b
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// A facet-list file, or `--poset file.json`.
#[derive(Args)]
struct Input {
    /// Facet-list file (`[DELTA]`/`[GAMMA]` sections for relative pairs).
    file: Option<PathBuf>,
    /// Simplicial poset in JSON instead of a facet list.
    #[arg(long, conflicts_with = "file")]
    poset: Option<PathBuf>,
}

enum Loaded {
    Complex(RelativePair),
    Poset(RelativePosetPair),
}

impl Input {
    fn load(&self) -> Result<Loaded> {
        match (&self.file, &self.poset) {
            (Some(f), None) => Ok(Loaded::Complex(read_facet_list(f).with_context(|| format!("reading {}", f.display()))?)),
            (None, Some(p)) => Ok(Loaded::Poset(read_poset_json(p).with_context(|| format!("reading {}", p.display()))?)),
            _ => bail!("give a facet-list file or --poset <file.json>"),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// f- and h-vectors, Betti numbers and recognizer verdicts.
    Inspect {
        #[command(flatten)]
        input: Input,
        /// Also report reduced Betti numbers over --field.
        #[arg(long)]
        betti: bool,
        /// Recognizers to run: pure, npm, serre:<r>, buchsbaum.
        #[arg(long, value_delimiter = ',')]
        check: Vec<String>,
    },
    /// μ-numbers.
    Mu {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Vertex labels (poset: vertex ids) for --method ordering.
        #[arg(long, value_delimiter = ',')]
        ordering: Vec<String>,
    },
    /// Bracket on the minimum number of generators of π₁.
    Pi1 {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11")]
        primes: Vec<u32>,
        /// Tietze move budget (overrides --budget-tietze).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Generate a complex as a facet list, with a JSON certificate sidecar.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output file; the certificate goes to `<file>.cert.json`.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Run verifiers on one subject.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Theorems to check (default: all that apply).
        #[arg(long, value_delimiter = ',')]
        theorem: Vec<String>,
        /// Serre parameter for hi_bounds (default: largest that holds).
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
        primes: Vec<u32>,
    },
    /// Run the verifiers over a corpus (the built-in one by default).
    Corpus {
        /// JSON config; relative paths inside resolve against its folder.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Folder receiving report.json and report.csv; stdout otherwise.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Fields to run (overrides the config).
        #[arg(long, value_delimiter = ',')]
        fields: Vec<FieldSpec>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Ordering,
    Exact,
    Enumerate,
    Sample,
}

#[derive(Subcommand)]
enum GenKind {
    Stacked {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        stackings: usize,
        #[arg(long, default_value_t = 0)]
        handles: usize,
    },
    Cyclic {
        #[arg(long)]
        n: usize,
    },
    SimplexBoundary {
        #[arg(long)]
        dim: usize,
    },
    Torus,
    ProjectivePlane,
    Octahedron,
}

fn main() -> ExitCode {
    if let Ok(t) = std::env::var("MULAB_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring MULAB_THREADS={t}"),
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Inspect { input, betti, check } => inspect(g, input, *betti, check)?,
        Cmd::Mu { input, method, ordering } => mu(g, input, *method, ordering)?,
        Cmd::Pi1 { input, primes, budget } => {
            let c = match input.load()? {
                Loaded::Complex(p) if p.is_absolute() => p.delta,
                Loaded::Complex(_) => bail!("π₁ needs an absolute complex"),
                Loaded::Poset(p) => p.sd_pair().delta,
            };
            print_json(&m_bracket(&c, primes, budget.unwrap_or(g.budgets().tietze))?)?;
        }
        Cmd::Gen { kind, output } => gen(kind, g.seed, output.as_deref())?,
        Cmd::Verify { input, theorem, r, primes } => return verify(g, input, theorem, *r, primes),
        Cmd::Corpus { config, output, fields } => return corpus(g, config.as_deref(), output.as_deref(), fields),
    }
    Ok(ExitCode::SUCCESS)
}

fn inspect(g: &Global, input: &Input, betti: bool, checks: &[String]) -> Result<()> {
    let mut out = serde_json::Map::new();
    match input.load()? {
        Loaded::Complex(p) => {
            let (f, h) = p.f_h_vectors();
            out.insert("vertices".into(), json!(p.vertices().len()));
            out.insert("dim".into(), json!(p.dim()));
            out.insert("void".into(), json!(p.is_void()));
            out.insert("f".into(), json!(f.f));
            out.insert("h".into(), json!(h.h));
            out.insert("g2".into(), json!(h.g2));
            if betti {
                let b = reduced_betti(&p, g.field, &g.budgets())?;
                out.insert("betti_reduced".into(), json!(b.reduced));
                out.insert("field".into(), json!(g.field.to_string()));
            }
            let mut verdicts = serde_json::Map::new();
            for c in checks {
                let v = match c.as_str() {
                    "pure" => serde_json::to_value(is_pure(&p))?,
                    "npm" => serde_json::to_value(is_normal_pseudomanifold(&p.delta))?,
                    "buchsbaum" => serde_json::to_value(is_buchsbaum(&p, g.field))?,
                    s if s.starts_with("serre:") => {
                        let r: usize = s[6..].parse().map_err(|_| anyhow!("bad check {s}"))?;
                        serde_json::to_value(serre_condition(&p, r, g.field, true)?)?
                    }
                    s => bail!("unknown check {s} (pure, npm, serre:<r>, buchsbaum)"),
                };
                verdicts.insert(c.clone(), v);
            }
            if !checks.is_empty() {
                out.insert("checks".into(), Value::Object(verdicts));
            }
        }
        Loaded::Poset(p) => {
            let (f, h) = poset_f_h(&p);
            out.insert("vertices".into(), json!(p.delta.n_vertices()));
            out.insert("dim".into(), json!(p.dim()));
            out.insert("f".into(), json!(f.f));
            out.insert("h".into(), json!(h.h));
            out.insert("g2".into(), json!(h.g2));
            out.insert("pure".into(), json!(p.is_pure()));
            if betti {
                out.insert("betti_reduced".into(), json!(p.reduced_betti(g.field)));
                out.insert("field".into(), json!(g.field.to_string()));
            }
            if !checks.is_empty() {
                bail!("--check applies to complexes");
            }
        }
    }
    print_json(&Value::Object(out))
}

fn mu(g: &Global, input: &Input, method: Method, ordering: &[String]) -> Result<()> {
    let b = g.budgets();
    let v = match (input.load()?, method) {
        (Loaded::Complex(p), Method::Ordering) => {
            let ord = if ordering.is_empty() {
                VertexOrdering::identity(&p)
            } else {
                VertexOrdering::from_labels(&p, ordering)?
            };
            mu_ordering(&p, &ord, g.field)?
        }
        (Loaded::Complex(p), Method::Exact) => mu_exact(&p, g.field, &b)?,
        (Loaded::Complex(p), Method::Enumerate) => mu_enumerated(&p, g.field, &b)?,
        (Loaded::Complex(p), Method::Sample) => mu_sampled(&p, g.field, g.samples, g.seed)?,
        (Loaded::Poset(p), Method::Ordering) => {
            let ids = if ordering.is_empty() {
                (0..p.delta.n_vertices()).map(|k| p.delta.id_of(k + 1)).collect()
            } else {
                ordering
                    .iter()
                    .map(|s| s.parse::<u64>().map_err(|_| anyhow!("poset vertices are numeric ids, got {s}")))
                    .collect::<Result<Vec<_>>>()?
            };
            poset_mu_ordering(&p, &poset_ordering(&p.delta, &ids)?, g.field)?
        }
        (Loaded::Poset(p), Method::Exact) => poset_mu_exact(&p, g.field, &b)?,
        (Loaded::Poset(p), Method::Enumerate) => poset_mu_enumerated(&p, g.field, &b)?,
        (Loaded::Poset(_), Method::Sample) => bail!("--method sample is available for complexes only"),
    };
    print_json(&v)
}

/// Stacked manifolds draw their handle pairs from `--seed`.
fn gen(kind: &GenKind, seed: u64, output: Option<&Path>) -> Result<()> {
    let c: CertifiedComplex = match *kind {
        GenKind::Stacked { dim, stackings, handles } => stacked_manifold(dim, stackings, handles, seed)?,
        GenKind::Cyclic { n } => cyclic_boundary(n)?,
        GenKind::SimplexBoundary { dim } => simplex_boundary(dim)?,
        GenKind::Torus => csaszar_torus(),
        GenKind::ProjectivePlane => projective_plane(),
        GenKind::Octahedron => octahedron(),
    };
    let text = format_complex(&c.complex);
    let cert = serde_json::to_string_pretty(&c.certificate)?;
    match output {
        Some(path) => {
            std::fs::write(path, text)?;
            let mut side = path.as_os_str().to_owned();
            side.push(".cert.json");
            std::fs::write(PathBuf::from(side), cert + "\n")?;
        }
        None => {
            print!("{text}");
            eprintln!("{cert}");
        }
    }
    Ok(())
}

fn emit_reports(g: &Global, reports: &[VerificationReport]) -> Result<()> {
    match g.format {
        Format::Json => print_json(&reports),
        Format::Csv => {
            print!("{}", reports_to_csv(reports));
            Ok(())
        }
    }
}

fn exit_for(reports: &[VerificationReport]) -> ExitCode {
    if reports.iter().any(|r| r.outcome == Outcome::Violated) {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn verify(g: &Global, input: &Input, theorems: &[String], r: Option<usize>, primes: &[u32]) -> Result<ExitCode> {
    let subject = match input.load()? {
        Loaded::Complex(pair) => Subject::Complex {
            pair,
            certificate: None,
        },
        Loaded::Poset(p) => Subject::Poset(p),
    };
    let id = input
        .file
        .as_ref()
        .or(input.poset.as_ref())
        .map(|p| p.display().to_string())
        .unwrap_or_default();
    let opts = VerifyOptions {
        samples: g.samples,
        seed: g.seed,
        primes: primes.to_vec(),
        budgets: g.budgets(),
        hi_r: r,
    };
    let selected: Vec<Theorem> = if theorems.is_empty() {
        Theorem::ALL.into_iter().filter(|t| t.applies_to(&subject)).collect()
    } else {
        theorems
            .iter()
            .map(|t| Theorem::parse(t).ok_or_else(|| anyhow!("unknown theorem {t}")))
            .collect::<Result<_>>()?
    };
    let ctx = Context::new(id, &subject, g.field, &opts);
    let reports: Vec<VerificationReport> = selected.into_iter().map(|t| t.run(&ctx)).collect();
    emit_reports(g, &reports)?;
    Ok(exit_for(&reports))
}

fn corpus(g: &Global, config: Option<&Path>, output: Option<&Path>, fields: &[FieldSpec]) -> Result<ExitCode> {
    let (mut cfg, base) = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            (parse_config(&text)?, path.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => {
            let mut c = CorpusConfig::default();
            c.options.samples = g.samples;
            c.options.seed = g.seed;
            c.options.budgets = g.budgets();
            (c, PathBuf::from("."))
        }
    };
    if !fields.is_empty() {
        cfg.fields = fields.to_vec();
    }
    let out = corpus_run(&cfg, &base)?;
    match output {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("report.json"), out.to_json() + "\n")?;
            std::fs::write(dir.join("report.csv"), out.to_csv())?;
            eprintln!(
                "{} reports: {} verified, {} inconclusive, {} not asserted, {} violated",
                out.reports.len(),
                out.count(Outcome::Verified),
                out.count(Outcome::Inconclusive),
                out.count(Outcome::NotAsserted),
                out.violations()
            );
        }
        None => emit_reports(g, &out.reports)?,
    }
    Ok(exit_for(&out.reports))
}
