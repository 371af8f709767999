//! Parsing, validation and analysis of IATC argument annotations.

pub mod analogy;
pub mod analysis;
pub mod diagnostic;
pub mod dialogue;
pub mod graph;
pub mod parser;
pub mod schema;
pub mod term;

pub use analogy::{align, apply_mapping, AnalogyMapping};
pub use analysis::{count_tags, TagCounts};
pub use diagnostic::{Diagnostic, Position, Severity, SourceSpan};
pub use dialogue::{Dialogue, Locution};
pub use graph::{build_graph, ArgGraph};
pub use parser::{parse_annotation_file, parse_stanza, validate, AnnotationDocument, Stanza};
pub use schema::{default_registry, GrammarCategory, SlotKind, TagRegistry, TagSignature};
pub use term::{Application, Atom, Term};
