//! `render`: form one image per requested engine mode from a PGM object,
//! writing the panels plus a per-panel manifest and the resolved-config
//! manifest.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use subrayleigh::engines::{
    coincidence_postprocess, image_coherent, image_heisenberg, image_incoherent,
    image_sql_coherent, image_sql_coherent_exact, image_sql_incoherent, EngineMode, ImageGrid,
};
use subrayleigh::metrics::sharpness;
use subrayleigh::scene::{load_pgm, save_pgm, ApertureGrid};

use crate::config::{resolve, Overrides, Resolved};
use crate::csvout::{write_config_manifest, CsvWriter};

#[derive(Debug, clap::Args)]
pub struct RenderArgs {
    /// Object aperture as a square PGM (P2 or P5)
    #[arg(long)]
    pub input: PathBuf,
    /// Engine mode, repeatable: conventional-coherent, conventional-incoherent,
    /// coincidence:N, sql-coherent:N, sql-incoherent:N, heisenberg-coherent:N,
    /// heisenberg-incoherent:N
    #[arg(long = "mode", required = true)]
    pub modes: Vec<String>,
    /// Also run the exact Q-form engine for each sql-coherent mode and
    /// report its RMS deviation
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub overrides: Overrides,
}

pub fn run(args: &RenderArgs) -> anyhow::Result<()> {
    let modes: Vec<EngineMode> = args
        .modes
        .iter()
        .map(|s| s.parse::<EngineMode>().map_err(crate::usage_error))
        .collect::<anyhow::Result<_>>()?;

    let rc = resolve(&args.overrides)?;
    std::fs::create_dir_all(&rc.out_dir)
        .with_context(|| format!("creating output directory {}", rc.out_dir.display()))?;

    let grid = load_pgm(&args.input)?;
    if let Some(size) = rc.size {
        if size != grid.resolution() {
            return Err(crate::usage_error(anyhow::anyhow!(
                "--size {size} does not match the input resolution {}; renders run at \
                 the object's own grid (regenerate the object at the desired size)",
                grid.resolution()
            )));
        }
    }

    let mut manifest = CsvWriter::create(
        &rc.out_dir.join("manifest.csv"),
        &[
            "file",
            "engine",
            "n",
            "raw_peak_ln",
            "log_prefactor",
            "log_source_efficiency",
            "sharpness",
            "runtime_s",
            "rms_vs_exact",
        ],
    )?;

    for mode in &modes {
        let started = Instant::now();
        let image = run_engine(&grid, &rc, *mode)?;
        let runtime = started.elapsed().as_secs_f64();

        let filename = format!("{}.pgm", mode.to_string().replace(':', "_"));
        save_pgm(&image, rc.out_dir.join(&filename), rc.gamma)?;

        let rms_vs_exact = match (*mode, args.exact) {
            (EngineMode::SqlCoherent(n), true) => {
                let exact = image_sql_coherent_exact(&grid, &rc.optical, &rc.source(n))?;
                let exact_name = format!("sql-coherent-exact_{n}.pgm");
                save_pgm(&exact, rc.out_dir.join(&exact_name), rc.gamma)?;
                format!("{:.6}", rms(&exact, &image))
            }
            _ => String::new(),
        };

        manifest.row(&[
            filename,
            mode.to_string(),
            mode.photon_number().to_string(),
            format!("{:.6}", image.norm.raw_peak.ln()),
            format!("{:.6}", image.norm.log_prefactor),
            format!("{:.6}", image.norm.log_source_efficiency),
            format!("{:.6}", sharpness(&image)),
            format!("{runtime:.3}"),
            rms_vs_exact,
        ])?;
    }
    manifest.finish()?;

    let extra = vec![
        ("input".to_string(), args.input.display().to_string()),
        ("effective_size".to_string(), grid.resolution().to_string()),
        ("modes".to_string(), args.modes.join(" ")),
        ("exact".to_string(), args.exact.to_string()),
        (
            "coordinate_frame".to_string(),
            "object-registered".to_string(),
        ),
    ];
    write_config_manifest(&rc.out_dir.join("config.csv"), &rc.entries(), &extra)?;
    Ok(())
}

fn run_engine(grid: &ApertureGrid, rc: &Resolved, mode: EngineMode) -> anyhow::Result<ImageGrid> {
    let cfg = &rc.optical;
    let image = match mode {
        EngineMode::ConventionalCoherent => image_coherent(grid, cfg)?,
        EngineMode::ConventionalIncoherent => image_incoherent(grid, cfg)?,
        // Coincidence counting post-processes the conventional coherent image.
        EngineMode::Coincidence(n) => coincidence_postprocess(&image_coherent(grid, cfg)?, n)?,
        EngineMode::SqlCoherent(n) => image_sql_coherent(grid, cfg, &rc.source(n))?,
        EngineMode::SqlCoherentExact(n) => image_sql_coherent_exact(grid, cfg, &rc.source(n))?,
        EngineMode::SqlIncoherent(n) => image_sql_incoherent(grid, cfg, &rc.source(n))?,
        EngineMode::HeisenbergCoherent(n) => image_heisenberg(grid, cfg, &rc.source(n), true)?,
        EngineMode::HeisenbergIncoherent(n) => image_heisenberg(grid, cfg, &rc.source(n), false)?,
    };
    Ok(image)
}

fn rms(a: &ImageGrid, b: &ImageGrid) -> f64 {
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    (sum / a.values().len() as f64).sqrt()
}
