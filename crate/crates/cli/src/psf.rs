//! `psf`: dump radial PSF profiles (conventional somb, its 2N-th power, and
//! the Heisenberg somb at wavenumber N k) with a one-line x_R / x_R(N)
//! summary.

use anyhow::Context;
use subrayleigh::metrics::generalized_rayleigh_radius;
use subrayleigh::optics::{psf, psf_heisenberg, rayleigh_radius};

use crate::config::{resolve, Overrides};
use crate::csvout::{write_config_manifest, CsvWriter};

#[derive(Debug, clap::Args)]
pub struct PsfArgs {
    /// Photon number for the somb^{2N} and Heisenberg columns
    #[arg(long, default_value_t = 5)]
    pub n: u32,
    /// Number of radial sample rows
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    #[command(flatten)]
    pub overrides: Overrides,
}

pub fn run(args: &PsfArgs) -> anyhow::Result<()> {
    if args.n == 0 {
        return Err(crate::usage_error(anyhow::anyhow!("--n must be >= 1")));
    }
    let rc = resolve(&args.overrides)?;
    std::fs::create_dir_all(&rc.out_dir)
        .with_context(|| format!("creating output directory {}", rc.out_dir.display()))?;

    let cfg = &rc.optical;
    let x_r = rayleigh_radius(cfg);
    let x_r_n = generalized_rayleigh_radius(cfg, args.n)?;

    let mut profile = CsvWriter::create(
        &rc.out_dir.join("psf_profile.csv"),
        &["r", "somb", "somb_2n", "heisenberg_somb"],
    )?;
    let r_max = 3.0 * x_r;
    let m = cfg.magnification();
    for i in 0..args.points {
        // Image-plane radius; the PSF evaluators take object-registered
        // displacements, hence the 1/m.
        let r = r_max * i as f64 / (args.points - 1) as f64;
        let d = [r / m, 0.0];
        let base = psf(cfg, d);
        profile.row(&[
            format!("{r:.8}"),
            format!("{base:.9}"),
            format!("{:.9e}", base.powi(2 * args.n as i32)),
            format!("{:.9}", psf_heisenberg(cfg, args.n, d)),
        ])?;
    }
    profile.finish()?;

    let mut summary =
        CsvWriter::create(&rc.out_dir.join("psf_summary.csv"), &["x_r", "x_r_n", "n"])?;
    summary.row(&[
        format!("{x_r:.6}"),
        format!("{x_r_n:.6}"),
        args.n.to_string(),
    ])?;
    summary.finish()?;

    write_config_manifest(
        &rc.out_dir.join("config.csv"),
        &rc.entries(),
        &[
            ("n".to_string(), args.n.to_string()),
            ("points".to_string(), args.points.to_string()),
        ],
    )?;

    println!("x_R = {x_r:.6}  x_R({}) = {x_r_n:.6}", args.n);
    Ok(())
}
