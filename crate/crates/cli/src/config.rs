//! Resolution of the run configuration: built-in reference defaults, overridden
//! by a `key = value` config file, overridden by command-line flags. The
//! output directory alone may also come from `SUBRAYLEIGH_OUTDIR`
//! (flag > env > file > default).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use subrayleigh::optics::{OpticalConfig, SourceConfig};

pub const OUTDIR_ENV: &str = "SUBRAYLEIGH_OUTDIR";

/// Optical/source/grid overrides shared by the subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Illumination wavenumber k (inverse image widths)
    #[arg(long)]
    pub k: Option<f64>,
    /// Lens pupil radius R
    #[arg(long)]
    pub lens_radius: Option<f64>,
    /// Lens-to-object distance D_o
    #[arg(long)]
    pub object_distance: Option<f64>,
    /// Magnification m = D_i/D_o
    #[arg(long)]
    pub magnification: Option<f64>,
    /// Transverse focusing bandwidth dk_t
    #[arg(long)]
    pub dkt: Option<f64>,
    /// Grid resolution (samples per side)
    #[arg(long)]
    pub size: Option<usize>,
    /// Display gamma applied when writing PGMs
    #[arg(long)]
    pub gamma: Option<f64>,
    /// RNG seed for the Monte Carlo columns
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (also settable via SUBRAYLEIGH_OUTDIR)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value file overriding the built-in defaults
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Overrides {
    /// Fill unset fields from another override set (lower precedence).
    fn or(self, lower: Overrides) -> Overrides {
        Overrides {
            k: self.k.or(lower.k),
            lens_radius: self.lens_radius.or(lower.lens_radius),
            object_distance: self.object_distance.or(lower.object_distance),
            magnification: self.magnification.or(lower.magnification),
            dkt: self.dkt.or(lower.dkt),
            size: self.size.or(lower.size),
            gamma: self.gamma.or(lower.gamma),
            seed: self.seed.or(lower.seed),
            out: self.out.or(lower.out),
            config: None,
        }
    }
}

/// Fully materialized run configuration. `size` stays optional so each
/// subcommand can apply its own default (render: the input's resolution;
/// object: 256).
#[derive(Debug, Clone)]
pub struct Resolved {
    pub optical: OpticalConfig,
    pub delta_k_t: f64,
    pub size: Option<usize>,
    pub gamma: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Resolved {
    pub fn source(&self, photon_number: u32) -> SourceConfig {
        SourceConfig {
            photon_number,
            delta_k_t: self.delta_k_t,
            ..SourceConfig::default()
        }
    }

    /// All materialized settings, for the reproducibility manifest.
    pub fn entries(&self) -> Vec<(String, String)> {
        vec![
            ("k".into(), format!("{}", self.optical.k)),
            (
                "lens_radius".into(),
                format!("{}", self.optical.lens_radius),
            ),
            (
                "object_distance".into(),
                format!("{}", self.optical.object_distance),
            ),
            (
                "image_distance".into(),
                format!("{}", self.optical.image_distance),
            ),
            (
                "magnification".into(),
                format!("{}", self.optical.magnification()),
            ),
            ("theta".into(), format!("{}", self.optical.theta)),
            ("delta_k_t".into(), format!("{}", self.delta_k_t)),
            ("gamma".into(), format!("{}", self.gamma)),
            ("seed".into(), format!("{}", self.seed)),
            ("out_dir".into(), self.out_dir.display().to_string()),
        ]
    }
}

pub fn resolve(flags: &Overrides) -> anyhow::Result<Resolved> {
    let from_file = match &flags.config {
        Some(path) => parse_config_file(path)?,
        None => Overrides::default(),
    };
    let merged = flags.clone().or(from_file);

    let k = merged.k.unwrap_or(6000.0);
    let lens_radius = merged.lens_radius.unwrap_or(1.0);
    let object_distance = merged.object_distance.unwrap_or(250.0);
    let magnification = merged.magnification.unwrap_or(1.0);
    let optical = OpticalConfig::new(k, lens_radius, object_distance, magnification)?;
    for w in optical.warnings() {
        eprintln!("warning: {w}");
    }

    let out_dir = flags
        .out
        .clone()
        .or_else(|| std::env::var_os(OUTDIR_ENV).map(PathBuf::from))
        .or(merged.out)
        .unwrap_or_else(|| PathBuf::from("."));

    Ok(Resolved {
        optical,
        delta_k_t: merged.dkt.unwrap_or(600.0),
        size: merged.size,
        gamma: merged.gamma.unwrap_or(1.0),
        seed: merged.seed.unwrap_or(42),
        out_dir,
    })
}

fn parse_config_file(path: &Path) -> anyhow::Result<Overrides> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut o = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key = value", path.display(), lineno + 1);
        };
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = || -> anyhow::Result<f64> {
            value.parse().with_context(|| {
                format!(
                    "{}:{}: invalid number {value:?}",
                    path.display(),
                    lineno + 1
                )
            })
        };
        match key {
            "k" => o.k = Some(parse_f64()?),
            "lens_radius" => o.lens_radius = Some(parse_f64()?),
            "object_distance" => o.object_distance = Some(parse_f64()?),
            "magnification" => o.magnification = Some(parse_f64()?),
            "dkt" | "delta_k_t" => o.dkt = Some(parse_f64()?),
            "size" => {
                o.size = Some(value.parse().with_context(|| {
                    format!("{}:{}: invalid size {value:?}", path.display(), lineno + 1)
                })?)
            }
            "gamma" => o.gamma = Some(parse_f64()?),
            "seed" => {
                o.seed = Some(value.parse().with_context(|| {
                    format!("{}:{}: invalid seed {value:?}", path.display(), lineno + 1)
                })?)
            }
            "out_dir" => o.out = Some(PathBuf::from(value)),
            other => bail!(
                "{}:{}: unknown config key {other:?}",
                path.display(),
                lineno + 1
            ),
        }
    }
    Ok(o)
}
