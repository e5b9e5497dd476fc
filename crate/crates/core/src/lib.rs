//! ALC ontologies, a tableau reasoner, refinement operators and ontology
//! repair by axiom weakening.

pub mod concept;
pub mod error;
pub mod evaluation;
pub mod generate;
pub mod ontology;
pub mod reasoner;
pub mod refinement;
pub mod repair;
pub mod syntax;

pub use concept::Concept;
pub use error::{Error, ParseError, Result};
pub use ontology::{Axiom, Ontology, Signature};
pub use reasoner::{is_consistent, ReasonerSession};
