mod design;
mod evaluate;
mod plotdata;
mod roundtrip;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::config::RunConfig;
use crate::CliResult;

pub fn execute(config: &RunConfig) -> CliResult<()> {
    match config {
        RunConfig::Design(args) => design::run(args),
        RunConfig::Roundtrip(args) => roundtrip::run(args),
        RunConfig::Evaluate(args) => evaluate::run(args),
        RunConfig::Plotdata(args) => plotdata::run(args),
    }
}

/// Buffered writer on `path`, or on stdout when no path is given.
fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
