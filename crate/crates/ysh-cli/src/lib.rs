//! Command-line surface over `ysh-core`: quiver and element files, the shared
//! expression grammar, command dispatch, and deterministic reports.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage
//! errors, malformed files, and tripped resource budgets. Reports carry no
//! clock or host data, so one `(argv, seed)` pair always produces the same
//! bytes.

pub mod commands;
pub mod files;
pub mod report;

use std::ffi::OsString;

pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    commands::run(args)
}
