//! Combinatorial invariants of simplicial complexes, relative complexes and
//! simplicial posets: face numbers, homology over ℚ and prime fields, the
//! ordering-averaged Morse numbers μ, and checks of the lower bounds they give
//! for h-numbers.

pub mod complex;
pub mod construct;
pub mod corpus;
pub mod error;
pub mod face;
pub mod family;
pub mod homology;
pub mod io;
pub mod mu;
pub mod num;
pub mod pi1;
pub mod poset;
pub mod recognize;
pub mod verify;

pub use complex::{build_complex, f_h_vectors, FVector, HVector, RelativePair, SimplicialComplex, VertexTable};
pub use error::{Error, Result};
pub use face::{Face, VertexId};
pub use family::FaceFamily;
pub use homology::{boundary_matrices, reduced_betti, BettiVector, ChainComplex, FieldSpec};
pub use mu::{graded_betti, mu_enumerated, mu_exact, mu_ordering, mu_sampled, morse_defect, sigma_tilde, GradedBettiTable, MuVector, Provenance, SigmaVector, VertexOrdering};
pub use num::Rational;

use serde::{Deserialize, Serialize};

/// Resource limits; exceeding one is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Maximum number of faces materialised for one homology computation.
    pub faces: usize,
    /// Maximum vertex count of a pair whose `2^n` induced subsets are summed.
    pub subsets: usize,
    /// Maximum vertex count for enumerating all orderings.
    pub enumerate: usize,
    /// Maximum number of Tietze moves.
    pub tietze: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            faces: 5_000_000,
            subsets: 22,
            enumerate: 8,
            tietze: 10_000,
        }
    }
}
