//! Derivation engine and complexity judge for minimalist syntax.
//!
//! Syntactic objects are built by MERGE under economy conditions, searched
//! with iterative-deepening minimal search, flattened into symbol sequences,
//! and scored with a normalized LZ76 phrase count. Competing derivational
//! options are compared by that score: the more compressible option wins.
//!
//! Module map:
//!
//! * [`syntax`] — lexical items, syntactic objects, workspaces, MERGE and
//!   the No Tampering / Extension / Resource Restriction validators.
//! * [`bracket`] — labeled bracket notation (`.sbt` files).
//! * [`search`] — minimal search, labeling, traces, superiority ordering.
//! * [`encoding`] — encoding schemes, symbol sequences, calibration.
//! * [`lz`] — LZ76 exhaustive-history phrase count and normalization.
//! * [`fep`] — discrete free-energy quantities and their identities.
//! * [`derive`] — brute-force MERGE enumeration.
//! * [`tcc`] — the compression comparator and corpus evaluation.
//! * [`corpus`] — corpus manifests and fixture loading.
//! * [`report`] — deterministic JSON serialization helpers.

pub mod bracket;
pub mod corpus;
pub mod derive;
pub mod encoding;
pub mod fep;
pub mod lz;
pub mod report;
pub mod search;
pub mod syntax;
pub mod tcc;

pub use bracket::{parse_bracket, print_bracket, BracketError};
pub use encoding::{EncodingScheme, SchemeRegistry, SymbolSequence};
pub use lz::{ComplexityReport, LogBase};
pub use search::{SearchResult, SearchTarget, SearchTrace};
pub use syntax::{
    Category, EconomyVerdict, Feature, FeatureSet, LexicalItem, Path, Polarity, SyntacticObject,
    Workspace,
};
pub use tcc::{Candidate, TccVerdict};
