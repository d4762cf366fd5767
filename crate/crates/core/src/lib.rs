//! Exact classical and small quantum cohomology of the Hilbert scheme of two
//! points on `P1 x P1`, genus-zero Gromov-Witten invariants by WDVV recursion,
//! and hyperelliptic curve counts.

pub mod chow;
pub mod coeffring;
pub mod export;
pub mod gw_engine;
pub mod hyperelliptic;
pub mod linalg;
pub mod quantum;
pub mod relation;

pub use chow::{chow, BasisClass, Chow, CohVector, CurveClass, PairingMatrix};
pub use coeffring::{QMonomial, QSeries, Rational};
pub use gw_engine::{Derivation, Engine, EngineConfig, EngineError, InvariantKey, InvariantValue, SeedGroup, SeedTable};
pub use hyperelliptic::{HyperellipticQuery, HyperellipticTable};
pub use quantum::{QCohVector, SmallQuantum};
pub use relation::{standard_relations, Relation};
