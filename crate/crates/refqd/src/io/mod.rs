//! Config files, run logs, archive snapshots, and plotting.

pub mod config;
pub mod log;
pub mod plot;
pub mod snapshot;

pub use config::{load_config, parse_config, LoadedRun};
pub use log::{read_log, write_log, RunRecord};
pub use plot::write_plot;
pub use snapshot::{load_snapshot, snapshot_archive, Snapshot, SNAPSHOT_SCHEMA_VERSION};
