//! JSON batch interface: parse a problem description, run its queries, and
//! emit a report with certificates.

pub mod render;
pub mod run;
pub mod spec;

pub use run::{parse_error_report, run, Options, Outcome, QueryError, TOOL_VERSION};
pub use spec::{parse_spec, ParseError, ProblemSpec, Query};
