//! The `ibfair` command-line pipeline: generate benchmark graphs, run
//! detectors, evaluate IB/IB_G, quality and Φ, sweep perturbations, and
//! collect run reports into plot data.
//!
//! Every subcommand accepts `--config <file.json>` whose keys mirror the
//! long flags (with `_` for `-`); flags win over the file. A run report can
//! be passed as the config of `evaluate` to repeat that run.

pub mod args;
pub mod config;
pub mod detect;
pub mod evaluate;
pub mod generate;
pub mod output;
pub mod report;
pub mod svg;
pub mod sweep;

use std::io;

use args::{Cli, Command};

/// Version tag of the run-report JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "IBFAIR_OUT_DIR";

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(cmd) => generate::run(cmd),
        Command::Detect(flags) => detect::run(flags),
        Command::Evaluate(flags) => evaluate::run(flags),
        Command::Sweep(flags) => sweep::run(flags),
        Command::Report(flags) => report::run(flags),
    }
}

/// 2 when the failure bottoms out in an I/O error, 1 for everything else
/// (bad flags, bad config, unparsable input files).
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let io = err.chain().any(|e| {
        e.downcast_ref::<io::Error>().is_some()
            || e.downcast_ref::<ibfair_core::Error>()
                .is_some_and(|e| e.is_io())
            || e.downcast_ref::<serde_json::Error>()
                .is_some_and(|e| e.is_io())
    });
    if io {
        2
    } else {
        1
    }
}
