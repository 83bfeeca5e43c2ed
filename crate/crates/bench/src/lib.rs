//! Fixtures shared by the criterion benchmarks.

use curvmax_core::corpus;
use curvmax_core::{Instance, LoadOptions};

/// Corpus instances with the given name fragment, built from the in-memory generator.
pub fn corpus_instances(fragment: &str) -> Vec<(String, Instance)> {
    corpus::generate()
        .expect("corpus generates")
        .into_iter()
        .filter(|e| e.name.contains(fragment))
        .map(|e| {
            let inst = e
                .file
                .into_instance(LoadOptions::default())
                .expect("corpus instance loads");
            (e.name, inst)
        })
        .collect()
}
