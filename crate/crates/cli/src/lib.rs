//! Library side of the `lztime` command: run records, sweeps and their
//! serialized forms.

pub mod format;
pub mod record;
pub mod sweep;

pub use record::{evaluate, limits, Evaluation, LimitsRecord, RunRecord};
pub use sweep::{run_sweep, Spacing, SweepRow, SweepSpec};
