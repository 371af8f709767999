//! Stanza and annotation-file parsing plus schema validation.

mod document;
mod stanza;
mod validate;

pub use document::{
    parse_annotation_file, AnnotationDocument, FatalFormatError, Stanza, SubgraphDef, HEADER,
};
pub use stanza::{parse_stanza, print_canonical, print_stanza, SyntaxError};
pub use validate::{validate, validate_document};
