//! Bytecode model, verifier, interpreter and test runner.

pub mod format;
pub mod interp;
pub mod model;
pub mod pool;
pub mod prelude;
pub mod testcase;
pub mod verify;

pub use format::{from_text, to_text, FormatError};
pub use interp::{execute, run_suite, Program, DEFAULT_FUEL};
pub use model::*;
pub use pool::{bytecode_equal, canonicalize_pool};
pub use testcase::{parse_tests, tests_to_text, Outcome, TestCase, TestReport, Verdict};
pub use verify::{verify, VerifyError};
