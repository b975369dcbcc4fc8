use std::path::Path;

use mulab_core::corpus::{corpus_run, CorpusConfig};
use mulab_core::verify::Outcome;

#[test]
fn default_corpus_has_no_violations() {
    let out = corpus_run(&CorpusConfig::default(), Path::new(".")).unwrap();
    for r in out.reports.iter().filter(|r| r.outcome != Outcome::Verified) {
        eprintln!("{} {}@{} {:?} {:?}", r.subject, r.theorem, r.field, r.outcome, r.notes);
    }
    assert_eq!(out.violations(), 0);
}
