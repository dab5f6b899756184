//! `object`: generate the bundled test apertures (two-bar, two-point,
//! letter glyph) as PGM files for use with `render`.

use std::path::PathBuf;

use anyhow::Context;
use subrayleigh::scene::{objects, save_pgm, Axis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ObjectKind {
    /// Two vertical bars centered in the frame
    TwoBar,
    /// Two single-pixel point emitters
    TwoPoint,
    /// Blocky letter "E" with sub-Rayleigh strokes
    Letter,
}

#[derive(Debug, clap::Args)]
pub struct ObjectArgs {
    #[arg(value_enum)]
    pub kind: ObjectKind,
    /// Output PGM path
    #[arg(long)]
    pub out: PathBuf,
    /// Samples per side
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Center-to-center separation of the bars / points, image widths
    #[arg(long, default_value_t = 0.0958)]
    pub gap: f64,
    /// Bar width, image widths
    #[arg(long, default_value_t = 0.032)]
    pub bar_width: f64,
    /// Bar height, image widths
    #[arg(long, default_value_t = 0.3)]
    pub bar_height: f64,
}

pub fn run(args: &ObjectArgs) -> anyhow::Result<()> {
    let grid = match args.kind {
        ObjectKind::TwoBar => {
            objects::two_bar(args.size, 1.0, args.gap, args.bar_width, args.bar_height)?
        }
        ObjectKind::TwoPoint => {
            let (grid, actual) = objects::two_point(args.size, 1.0, args.gap, Axis::X)?;
            println!("realized separation = {actual:.6}");
            grid
        }
        ObjectKind::Letter => objects::letter_e(args.size, 1.0)?,
    };
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    save_pgm(&grid, &args.out, 1.0)?;
    Ok(())
}
