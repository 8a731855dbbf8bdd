//! Command-line front end: configuration, the gen/detect/eval/report stages
//! and report emitters.

pub mod config;
pub mod layout;
pub mod pipeline;
pub mod report;

pub use config::{Cli, Command, Flags, RunConfig};
pub use pipeline::{run, Outcome};

/// Process exit status for a finished command.
pub fn exit_code(result: &detbias_core::Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.partial => 3,
        Ok(_) => 0,
        Err(e) if e.is_user_error() => 2,
        Err(_) => 1,
    }
}
