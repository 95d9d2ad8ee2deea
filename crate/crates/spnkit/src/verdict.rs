//! Cone-membership verdicts with checkable certificates.

use serde::{Deserialize, Serialize};

use crate::matcore::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriState {
    True,
    False,
    Inconclusive,
}

impl TriState {
    pub fn is_true(self) -> bool {
        self == TriState::True
    }
    pub fn is_false(self) -> bool {
        self == TriState::False
    }
}

/// Which lemma or algorithm decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Plain eigenvalue threshold (PSD test).
    Eigenvalue,
    /// Negative diagonal entry or violated lower bound a_ij >= -sqrt(a_ii a_jj).
    Diananda,
    /// All entries nonnegative.
    NonnegativeEntries,
    /// Z-matrix: copositive iff positive semidefinite.
    ZMatrix,
    /// Unit diagonal, entries in {0, 1, -1}: triangle-free / distance-2 test.
    HoffmanPereira,
    /// Acyclic graph: copositive iff N(A) is positive semidefinite.
    AcyclicN,
    /// Matrix is c(I - vv^T): norm conditions on v_+ and v_-.
    Rank1Perturbation,
    /// Exhaustive principal-submatrix eigenvector criterion.
    Kaplan,
    /// Independent global minimization over the standard simplex.
    SimplexOracle,
    /// SPN pipeline: nonnegative split.
    Nonnegative,
    /// SPN pipeline: the matrix itself is positive semidefinite.
    Psd,
    /// SPN pipeline: recursion over connected components of G_-(A).
    GMinusSplit,
    /// SPN pipeline: order at most 4.
    NLe4,
    /// SPN pipeline: unit diagonal with connected spanning G_{-1}(A).
    GMinusOneCharacterization,
    /// SPN pipeline: Schur/deletion row reductions.
    SchurRowReduction,
    /// SPN pipeline: PSD principal submatrix of order n-1.
    PsdCornerConstruction,
    /// SPN pipeline: Dykstra alternating-projection feasibility.
    DykstraProjection,
    /// SPN pipeline: separating doubly nonnegative certificate.
    DualCertificate,
    /// No decision.
    Undecided,
}

/// A record refuting SPN membership through the G_{-1} characterization:
/// either an odd cycle in G_{-1}(A), or a pair at even G_{-1}-distance whose
/// entry is below 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GMinusOneRefutation {
    OddCycle { cycle: Vec<usize> },
    EvenDistancePair { i: usize, j: usize, distance: usize, entry: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// For copositivity: x >= 0 with x^T A x < 0. For PSD: any w with w^T A w < 0.
    Vector(Vec<f64>),
    /// A doubly nonnegative W with <A, W> < 0 (stored by the SPN layer).
    Matrix(SymMatrix),
    /// Structural refutation via the G_{-1} characterization.
    GMinusOne(GMinusOneRefutation),
}

/// Membership result plus a checkable certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub member: TriState,
    pub certificate: Option<Certificate>,
    pub method: Method,
    /// Decided quantity for the method: the violating quadratic-form value or
    /// minimum eigenvalue on `false`, a nonnegative slack on `true`.
    pub margin: f64,
}

impl ConeVerdict {
    pub fn member_true(method: Method, margin: f64) -> Self {
        ConeVerdict {
            member: TriState::True,
            certificate: None,
            method,
            margin,
        }
    }

    pub fn member_false(method: Method, certificate: Certificate, margin: f64) -> Self {
        ConeVerdict {
            member: TriState::False,
            certificate: Some(certificate),
            method,
            margin,
        }
    }

    pub fn inconclusive(method: Method) -> Self {
        ConeVerdict {
            member: TriState::Inconclusive,
            certificate: None,
            method,
            margin: 0.0,
        }
    }
}
