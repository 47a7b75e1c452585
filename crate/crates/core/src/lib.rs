//! Proof search and certificate checking for system BV.

pub mod context;
pub mod enumerate;
pub mod structure;
pub mod syntax;

pub use context::{decompositions, Context, Frame};
pub use structure::{canonicalize, equivalent, Atom, Kind, Occurrence, Polarity, Structure, Term};
pub use syntax::{parse_context, parse_structure, SyntaxError};
pub mod web;
pub mod merge;
pub mod rules;
pub use rules::{conclusions, premisses, RuleId, RuleInstance, System, Witness};
pub mod derivation;
pub use derivation::{check_derivation, check_proof, Builder, CheckError, Derivation, Format, Proof};
pub mod expand;
pub mod search;
pub use search::{prove, Prover, SearchConfig, SearchError};
pub mod mll;
pub mod suite;
