//! `scaling`: tabulate x_R(N), the Heisenberg first zero, and the Monte
//! Carlo centroid spread over a photon-number range, fit the three power
//! laws, and gate the exit status on the slopes.

use anyhow::Context;
use subrayleigh::metrics::{
    fit_scaling, generalized_rayleigh_radius, mc_centroid_spread, McConfig,
};
use subrayleigh::optics::heisenberg_first_zero;

use crate::config::{resolve, Overrides};
use crate::csvout::{write_config_manifest, CsvWriter};

#[derive(Debug, clap::Args)]
pub struct ScalingArgs {
    /// Comma-separated photon numbers (>= 3 values, each >= 1)
    #[arg(long, default_value = "4,8,16,32,64", value_delimiter = ',')]
    pub n_list: Vec<u32>,
    /// Monte Carlo centroids per N
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Sensor truncation radius in units of x_R
    #[arg(long, default_value_t = 10.0)]
    pub truncation: f64,
    #[command(flatten)]
    pub overrides: Overrides,
}

struct Window {
    center: f64,
    half_width: f64,
}

pub fn run(args: &ScalingArgs) -> anyhow::Result<()> {
    if args.n_list.len() < 3 || args.n_list.contains(&0) {
        return Err(crate::usage_error(anyhow::anyhow!(
            "--n-list needs at least three photon numbers, all >= 1"
        )));
    }
    let rc = resolve(&args.overrides)?;
    std::fs::create_dir_all(&rc.out_dir)
        .with_context(|| format!("creating output directory {}", rc.out_dir.display()))?;
    let cfg = &rc.optical;

    let mut table = CsvWriter::create(
        &rc.out_dir.join("scaling.csv"),
        &["n", "x_r_n", "heisenberg_first_zero", "mc_spread"],
    )?;
    let mut sql_points = Vec::new();
    let mut heis_points = Vec::new();
    let mut mc_points = Vec::new();
    for &n in &args.n_list {
        let x = generalized_rayleigh_radius(cfg, n)?;
        let h = heisenberg_first_zero(cfg, n);
        let mc = McConfig::new(rc.seed, args.samples, args.truncation, n)?;
        let spread = mc_centroid_spread(cfg, &mc);
        table.row(&[
            n.to_string(),
            format!("{x:.9}"),
            format!("{h:.9}"),
            format!("{spread:.9}"),
        ])?;
        sql_points.push((n as f64, x));
        heis_points.push((n as f64, h));
        mc_points.push((n as f64, spread));
    }
    table.finish()?;

    let runs = [
        (
            "x_r_n",
            sql_points,
            Window {
                center: -0.5,
                half_width: 0.05,
            },
        ),
        (
            "heisenberg_first_zero",
            heis_points,
            Window {
                center: -1.0,
                half_width: 1e-6,
            },
        ),
        (
            "mc_spread",
            mc_points,
            Window {
                center: -0.5,
                half_width: 0.05,
            },
        ),
    ];

    let mut fits = CsvWriter::create(
        &rc.out_dir.join("fits.csv"),
        &[
            "quantity",
            "slope",
            "intercept",
            "r_squared",
            "window_center",
            "window_half_width",
            "in_window",
        ],
    )?;
    let mut all_ok = true;
    for (name, points, window) in &runs {
        let fit = fit_scaling(points)?;
        let ok = (fit.slope - window.center).abs() <= window.half_width;
        all_ok &= ok;
        fits.row(&[
            name.to_string(),
            format!("{:.9}", fit.slope),
            format!("{:.9}", fit.intercept),
            format!("{:.9}", fit.r_squared),
            format!("{}", window.center),
            format!("{:e}", window.half_width),
            ok.to_string(),
        ])?;
        println!(
            "{name}: slope = {:.6} (window {} +- {:e}) {}",
            fit.slope,
            window.center,
            window.half_width,
            if ok { "ok" } else { "OUT OF WINDOW" }
        );
    }
    fits.finish()?;

    write_config_manifest(
        &rc.out_dir.join("config.csv"),
        &rc.entries(),
        &[
            (
                "n_list".to_string(),
                args.n_list
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            ("samples".to_string(), args.samples.to_string()),
            ("truncation".to_string(), args.truncation.to_string()),
        ],
    )?;

    if !all_ok {
        anyhow::bail!("one or more fitted slopes fall outside their acceptance window");
    }
    Ok(())
}
