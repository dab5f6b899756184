//! Sub-Rayleigh imaging simulator CLI.
//!
//! Exit codes: 0 success, 2 usage error, 3 regime/validation error,
//! 4 I/O error.

mod config;
mod csvout;
mod object;
mod psf;
mod render;
mod scaling;

use clap::Parser;
use subrayleigh::Error;

#[derive(Parser)]
#[command(
    name = "subrayleigh",
    version,
    about = "Simulate conventional, N-photon SQL, and Heisenberg-limit imaging \
             through a finite-pupil lens"
)]
enum Cli {
    /// Render one image panel per engine mode from a PGM object
    Render(render::RenderArgs),
    /// Dump radial PSF profiles and the x_R / x_R(N) summary
    Psf(psf::PsfArgs),
    /// Tabulate and fit the resolution scaling laws
    Scaling(scaling::ScalingArgs),
    /// Generate a bundled test object as a PGM
    Object(object::ObjectArgs),
}

/// Marker wrapper: flag/mode misuse detected past clap, exits 2.
#[derive(Debug)]
struct UsageError(anyhow::Error);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage_error(err: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(UsageError(err.into()))
}

fn main() {
    let cli = Cli::parse(); // clap exits 2 on usage errors
    let result = match &cli {
        Cli::Render(args) => render::run(args),
        Cli::Psf(args) => psf::run(args),
        Cli::Scaling(args) => scaling::run(args),
        Cli::Object(args) => object::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Io(_) | Error::PgmParse { .. } => 4,
                _ => 3,
            };
        }
        if cause.is::<std::io::Error>() {
            return 4;
        }
    }
    3
}
