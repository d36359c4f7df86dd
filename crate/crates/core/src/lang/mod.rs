//! The MiniJ source language.

pub mod annotate;
pub mod ast;
pub mod diag;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod signature;

pub use annotate::{annotate_errors, AnnotateError};
pub use ast::*;
pub use diag::{has_errors, Diagnostic, Severity};
pub use parser::{parse, parse_recovering, ParseOutcome};
pub use printer::{pretty_print, pretty_print_with, PrintOptions};
pub use signature::{member_signature, signatures, MemberSignature};
