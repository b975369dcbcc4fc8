//! Batch verification: a JSON config names subjects (generated or read from
//! files), fields and theorems; the run yields one report per subject, field
//! and theorem, in config order regardless of thread count.
//!
//! ```json
//! {
//!   "subjects": [
//!     {"kind": "stacked", "dim": 4, "stackings": 5, "handles": 1, "seed": 7},
//!     {"id": "mine", "kind": "file", "path": "mine.txt"},
//!     {"kind": "poset-file", "path": "p.json"}
//!   ],
//!   "fields": ["q", "p:2"],
//!   "theorems": ["g2_bound", "morse"],
//!   "samples": 50, "seed": 1, "primes": [2, 3, 5, 7],
//!   "budgets": {"subsets": 22, "tietze": 10000},
//!   "threads": 4
//! }
//! ```

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{
    csaszar_torus, cyclic_boundary, octahedron, projective_plane, random_complex, simplex_boundary, stacked_manifold,
};
use crate::error::{Error, Result};
use crate::homology::FieldSpec;
use crate::io::{read_facet_list, read_poset_json};
use crate::poset::{build_poset, random_poset, PosetRecord, RelativePosetPair, SimplicialPoset};
use crate::verify::{Context, Outcome, Subject, Theorem, VerificationReport, VerifyOptions, CSV_HEADER};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubjectSpec {
    SimplexBoundary { dim: usize },
    Stacked { dim: usize, stackings: usize, handles: usize, seed: u64 },
    Cyclic { n: usize },
    CsaszarTorus,
    ProjectivePlane,
    Octahedron,
    /// Cone over another complex subject.
    Cone { of: Box<SubjectSpec> },
    RandomComplex { n: usize, max_dim: usize, facets: usize, seed: u64 },
    /// Facet-list file; relative paths resolve against the config's folder.
    File { path: PathBuf },
    PosetFile { path: PathBuf },
    /// Two vertices joined by three edges.
    ParallelEdges,
    RandomPoset { n: usize, edges: usize, triangles: usize, seed: u64 },
    /// Face poset of a complex subject.
    FacePoset { of: Box<SubjectSpec> },
}

impl SubjectSpec {
    pub fn default_id(&self) -> String {
        match self {
            SubjectSpec::SimplexBoundary { dim } => format!("simplex-boundary-{dim}"),
            SubjectSpec::Stacked {
                dim,
                stackings,
                handles,
                seed,
            } => format!("stacked-{dim}-{stackings}-{handles}-s{seed}"),
            SubjectSpec::Cyclic { n } => format!("cyclic-{n}"),
            SubjectSpec::CsaszarTorus => "csaszar-torus".into(),
            SubjectSpec::ProjectivePlane => "projective-plane".into(),
            SubjectSpec::Octahedron => "octahedron".into(),
            SubjectSpec::Cone { of } => format!("cone({})", of.default_id()),
            SubjectSpec::RandomComplex { n, max_dim, facets, seed } => format!("random-{n}-{max_dim}-{facets}-s{seed}"),
            SubjectSpec::File { path } | SubjectSpec::PosetFile { path } => path.display().to_string(),
            SubjectSpec::ParallelEdges => "parallel-edges".into(),
            SubjectSpec::RandomPoset { n, edges, triangles, seed } => format!("poset-{n}-{edges}-{triangles}-s{seed}"),
            SubjectSpec::FacePoset { of } => format!("face-poset({})", of.default_id()),
        }
    }

    pub fn build(&self, base: &Path) -> Result<Subject> {
        let certified = |c: crate::construct::CertifiedComplex| Subject::certified(c.complex, c.certificate);
        Ok(match self {
            SubjectSpec::SimplexBoundary { dim } => certified(simplex_boundary(*dim)?),
            SubjectSpec::Stacked {
                dim,
                stackings,
                handles,
                seed,
            } => certified(stacked_manifold(*dim, *stackings, *handles, *seed)?),
            SubjectSpec::Cyclic { n } => certified(cyclic_boundary(*n)?),
            SubjectSpec::CsaszarTorus => certified(csaszar_torus()),
            SubjectSpec::ProjectivePlane => certified(projective_plane()),
            SubjectSpec::Octahedron => certified(octahedron()),
            SubjectSpec::Cone { of } => Subject::complex(complex_of(of, base)?.cone("apex")?),
            SubjectSpec::RandomComplex { n, max_dim, facets, seed } => {
                Subject::complex(random_complex(*n, *max_dim, *facets, *seed))
            }
            SubjectSpec::File { path } => Subject::Complex {
                pair: read_facet_list(&base.join(path))?,
                certificate: None,
            },
            SubjectSpec::PosetFile { path } => Subject::Poset(read_poset_json(&base.join(path))?),
            SubjectSpec::ParallelEdges => Subject::Poset(RelativePosetPair::absolute(parallel_edges())),
            SubjectSpec::RandomPoset { n, edges, triangles, seed } => {
                Subject::Poset(RelativePosetPair::absolute(random_poset(*n, *edges, *triangles, *seed)))
            }
            SubjectSpec::FacePoset { of } => {
                Subject::Poset(RelativePosetPair::absolute(SimplicialPoset::from_complex(&complex_of(of, base)?)?))
            }
        })
    }
}

fn complex_of(spec: &SubjectSpec, base: &Path) -> Result<crate::complex::SimplicialComplex> {
    match spec.build(base)? {
        Subject::Complex { pair, .. } if pair.is_absolute() => Ok(pair.delta),
        _ => Err(Error::Malformed(format!("{} is not an absolute complex", spec.default_id()))),
    }
}

pub fn parallel_edges() -> SimplicialPoset {
    let rec = |id, rank, covers: &[u64]| PosetRecord {
        id,
        rank,
        covers: covers.to_vec(),
    };
    build_poset(&[
        rec(1, 1, &[]),
        rec(2, 1, &[]),
        rec(3, 2, &[1, 2]),
        rec(4, 2, &[1, 2]),
        rec(5, 2, &[1, 2]),
    ])
    .expect("valid poset")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub spec: SubjectSpec,
}

impl SubjectEntry {
    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.spec.default_id())
    }
}

impl From<SubjectSpec> for SubjectEntry {
    fn from(spec: SubjectSpec) -> Self {
        SubjectEntry { id: None, spec }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub subjects: Vec<SubjectEntry>,
    pub fields: Vec<FieldSpec>,
    /// `None` runs every theorem that applies to a subject.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorems: Option<Vec<Theorem>>,
    #[serde(flatten)]
    pub options: VerifyOptions,
    /// Worker threads; `None` uses the ambient rayon pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            subjects: default_subjects(),
            fields: vec![FieldSpec::Rational, FieldSpec::Prime(2)],
            theorems: None,
            options: VerifyOptions::default(),
            threads: None,
        }
    }
}

/// Spheres, stacked manifolds in dimensions 3 and 4, cyclic polytope
/// boundaries, the torus, the projective plane and its cone, and posets.
pub fn default_subjects() -> Vec<SubjectEntry> {
    use SubjectSpec::*;
    let mut s = vec![
        SimplexBoundary { dim: 3 },
        SimplexBoundary { dim: 4 },
        SimplexBoundary { dim: 5 },
        Octahedron,
    ];
    for (dim, stackings, handles) in [(3, 4, 0), (3, 4, 1), (3, 5, 2), (4, 3, 0), (4, 5, 1), (4, 6, 2)] {
        s.push(Stacked {
            dim,
            stackings,
            handles,
            seed: 7,
        });
    }
    s.extend((6..=9).map(|n| Cyclic { n }));
    s.push(CsaszarTorus);
    s.push(ProjectivePlane);
    s.push(Cone {
        of: Box::new(ProjectivePlane),
    });
    s.push(ParallelEdges);
    s.push(FacePoset {
        of: Box::new(Octahedron),
    });
    for seed in 1..=3 {
        s.push(RandomPoset {
            n: 5,
            edges: 8,
            triangles: 5,
            seed,
        });
    }
    s.into_iter().map(SubjectEntry::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusOutput {
    pub reports: Vec<VerificationReport>,
}

impl CorpusOutput {
    pub fn violations(&self) -> usize {
        self.reports.iter().filter(|r| r.outcome == Outcome::Violated).count()
    }

    pub fn count(&self, o: Outcome) -> usize {
        self.reports.iter().filter(|r| r.outcome == o).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_csv(&self) -> String {
        reports_to_csv(&self.reports)
    }
}

pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record(r.csv_row()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn parse_config(text: &str) -> Result<CorpusConfig> {
    let c: CorpusConfig = serde_json::from_str(text)?;
    if c.fields.is_empty() {
        return Err(Error::Malformed("config lists no fields".into()));
    }
    Ok(c)
}

/// Runs every applicable verifier. `base` resolves relative file paths.
pub fn corpus_run(config: &CorpusConfig, base: &Path) -> Result<CorpusOutput> {
    let run = || -> Result<CorpusOutput> {
        let subjects: Vec<(String, Subject)> = config
            .subjects
            .par_iter()
            .map(|e| Ok((e.id(), e.spec.build(base)?)))
            .collect::<Result<_>>()?;
        let theorems: Vec<Theorem> = config.theorems.clone().unwrap_or_else(|| Theorem::ALL.to_vec());
        let jobs: Vec<(usize, FieldSpec)> = (0..subjects.len())
            .flat_map(|i| config.fields.iter().map(move |&f| (i, f)))
            .collect();
        let reports: Vec<Vec<VerificationReport>> = jobs
            .par_iter()
            .map(|&(i, field)| {
                let (id, subject) = &subjects[i];
                let ctx = Context::new(id.clone(), subject, field, &config.options);
                theorems
                    .iter()
                    .filter(|t| t.applies_to(subject))
                    .map(|t| t.run(&ctx))
                    .collect()
            })
            .collect();
        Ok(CorpusOutput {
            reports: reports.into_iter().flatten().collect(),
        })
    };
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Malformed(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}
