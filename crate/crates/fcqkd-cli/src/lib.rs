//! Library half of the command-line front end: configuration ingestion
//! with unit conversion, report documents, and the subcommand
//! implementations.

pub mod commands;
pub mod config;
pub mod report;

/// Process exit codes, also documented in `--help`.
pub mod exit_codes {
    /// Success; for `simulate`, a Clean verdict.
    pub const OK: u8 = 0;
    /// Unexpected error (I/O, internal).
    pub const ERROR: u8 = 1;
    /// Configuration or parameter validation failure.
    pub const VALIDATION: u8 = 2;
    /// Too few timing-check rounds for a verdict.
    pub const INCONCLUSIVE: u8 = 3;
    /// The timing check flags an eavesdropper.
    pub const EAVESDROPPER: u8 = 4;
}
