//! Basic graph pattern matching and the canned review reports.

mod bgp;
mod reports;
mod text;

pub use bgp::{is_var_name, match_bgp, pattern_variables, BindingSet, PatternTerm, TriplePattern};
pub use reports::{
    report_comments_per_section, report_common_targets, report_reviewer_section_matrix, Report, ReportKind, ReportRow,
    NO_SECTION,
};
pub use text::{parse_query, QueryError};
