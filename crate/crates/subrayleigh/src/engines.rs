//! Image-formation engines: conventional coherent/incoherent imaging,
//! N-fold coincidence post-processing, the N-photon SQL engines (approximate
//! product form and exact Q-function form), and Heisenberg-limit imaging.
//!
//! All engines work in object-registered coordinates `u = -r_i / m`, where
//! each becomes a plain convolution of a transformed aperture against a
//! radially symmetric kernel sampled on pixel offsets:
//!
//! - conventional coherent:    `|(A (*) K)|^2`
//! - conventional incoherent:  `|A|^2 (*) K^2`
//! - SQL coherent (approx):    `|(A_tilde^N (*) K^N)|^2`
//! - SQL incoherent:           `|A_tilde|^{2N} (*) K^{2N}`
//! - Heisenberg:               `|(A_tilde^N (*) K_N)|^2`  /  `|A_tilde|^{2N} (*) K_N^2`
//!
//! with `K` the peak-normalized PSF and `K_N` the PSF at wavenumber `N k`.
//! Signed values are kept until the final squared modulus in the coherent
//! engines (odd powers of the PSF have negative lobes). Outputs are
//! peak-normalized; the physical scalars that would otherwise multiply the
//! image (`xi^N`, `(mu |alpha|^2)^N / N!`, prefactors) are recorded log-scale
//! in a [`NormalizationRecord`] and never applied to pixel data.

use std::fmt;
use std::str::FromStr;

use crate::conv::convolve;
pub use crate::conv::ConvPath;
use crate::error::{Error, Result};
use crate::optics::{
    efficiency_xi, ln_factorial, log_source_efficiency, psf_prefactor, require_focused_spot,
    OpticalConfig, SourceConfig,
};
use crate::scene::{require_pitch_resolves_kernel, smooth_with, ApertureGrid, SmoothOptions};
use crate::specfun::{somb_raw, J1_ZEROS};

/// Which engine produced an image, with its photon number where relevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    ConventionalCoherent,
    ConventionalIncoherent,
    Coincidence(u32),
    SqlCoherent(u32),
    SqlCoherentExact(u32),
    SqlIncoherent(u32),
    HeisenbergCoherent(u32),
    HeisenbergIncoherent(u32),
}

impl EngineMode {
    pub fn photon_number(&self) -> u32 {
        match self {
            EngineMode::ConventionalCoherent | EngineMode::ConventionalIncoherent => 1,
            EngineMode::Coincidence(n)
            | EngineMode::SqlCoherent(n)
            | EngineMode::SqlCoherentExact(n)
            | EngineMode::SqlIncoherent(n)
            | EngineMode::HeisenbergCoherent(n)
            | EngineMode::HeisenbergIncoherent(n) => *n,
        }
    }
}

impl fmt::Display for EngineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineMode::ConventionalCoherent => write!(f, "conventional-coherent"),
            EngineMode::ConventionalIncoherent => write!(f, "conventional-incoherent"),
            EngineMode::Coincidence(n) => write!(f, "coincidence:{n}"),
            EngineMode::SqlCoherent(n) => write!(f, "sql-coherent:{n}"),
            EngineMode::SqlCoherentExact(n) => write!(f, "sql-coherent-exact:{n}"),
            EngineMode::SqlIncoherent(n) => write!(f, "sql-incoherent:{n}"),
            EngineMode::HeisenbergCoherent(n) => write!(f, "heisenberg-coherent:{n}"),
            EngineMode::HeisenbergIncoherent(n) => write!(f, "heisenberg-incoherent:{n}"),
        }
    }
}

impl FromStr for EngineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, n) = match s.split_once(':') {
            Some((name, n)) => {
                let n: u32 = n.parse().map_err(|_| {
                    Error::Config(format!("invalid photon number in engine mode {s:?}"))
                })?;
                if n == 0 {
                    return Err(Error::Config(format!(
                        "photon number must be >= 1 in {s:?}"
                    )));
                }
                (name, Some(n))
            }
            None => (s, None),
        };
        let mode = match (name, n) {
            ("conventional-coherent", None) => EngineMode::ConventionalCoherent,
            ("conventional-incoherent", None) => EngineMode::ConventionalIncoherent,
            ("coincidence", Some(n)) => EngineMode::Coincidence(n),
            ("sql-coherent", Some(n)) => EngineMode::SqlCoherent(n),
            ("sql-coherent-exact", Some(n)) => EngineMode::SqlCoherentExact(n),
            ("sql-incoherent", Some(n)) => EngineMode::SqlIncoherent(n),
            ("heisenberg-coherent", Some(n)) => EngineMode::HeisenbergCoherent(n),
            ("heisenberg-incoherent", Some(n)) => EngineMode::HeisenbergIncoherent(n),
            _ => {
                return Err(Error::Config(format!(
                    "unknown engine mode {s:?} (expected conventional-coherent, \
                     conventional-incoherent, coincidence:N, sql-coherent:N, \
                     sql-incoherent:N, heisenberg-coherent:N or heisenberg-incoherent:N)"
                )))
            }
        };
        Ok(mode)
    }
}

/// Scalars factored out of the stored pixel values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRecord {
    /// Peak value of the computed intensity before peak normalization.
    pub raw_peak: f64,
    /// ln of the engine's physical prefactor (detection factors, `xi^N`,
    /// Q-form constants). Kept log-scale; `xi^N` underflows f64 directly.
    pub log_prefactor: f64,
    /// ln of the coherent-mixture count-rate scalar `(mu |alpha|^2)^N / N!`.
    /// Meaningful for the sigma-source engines; 0 elsewhere.
    pub log_source_efficiency: f64,
}

/// Coordinate convention marker carried by every image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinateFrame {
    /// Sampled at `u = -r_i / m`: upright and aligned with the object grid.
    ObjectRegistered,
}

impl fmt::Display for CoordinateFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "object-registered")
    }
}

/// Peak-normalized image-plane intensity on the object-registered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    side: f64,
    resolution: usize,
    values: Vec<f64>,
    pub mode: EngineMode,
    pub frame: CoordinateFrame,
    pub norm: NormalizationRecord,
}

impl ImageGrid {
    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn pitch(&self) -> f64 {
        self.side / self.resolution as f64
    }

    /// Normalized samples in `[0, 1]`, row-major, row 0 at the top.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_at(&self, j: usize) -> f64 {
        -self.side / 2.0 + (j as f64 + 0.5) * self.pitch()
    }

    pub fn y_at(&self, i: usize) -> f64 {
        self.side / 2.0 - (i as f64 + 0.5) * self.pitch()
    }

    #[cfg(test)]
    pub(crate) fn with_values(&self, values: Vec<f64>) -> ImageGrid {
        ImageGrid {
            values,
            ..self.clone()
        }
    }
}

/// Engine knobs. The defaults match the documented conventions; tests use
/// the rest to cross-check paths and truncations.
#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    pub path: ConvPath,
    /// PSF kernel truncated at this zero of somb (1-based, <= 8).
    pub psf_truncation_zero: usize,
    /// Focusing kernel truncated at this zero (1-based, <= 8).
    pub smoothing_truncation_zero: usize,
    /// Multiplier on the PSF truncation radius (tests double it to bound
    /// the truncation's effect).
    pub psf_truncation_radius_scale: f64,
    /// Lift the G <= 128 cost guard on the exact Q-form engine.
    pub allow_large_exact: bool,
    /// Skip the focused-spot regime check (diagnostic probes only).
    pub skip_regime_check: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            path: ConvPath::Fft,
            psf_truncation_zero: 8,
            smoothing_truncation_zero: 3,
            psf_truncation_radius_scale: 1.0,
            allow_large_exact: false,
            skip_regime_check: false,
        }
    }
}

impl EngineOptions {
    fn smooth_options(&self) -> SmoothOptions {
        SmoothOptions {
            truncation_zero: self.smoothing_truncation_zero,
            path: self.path,
        }
    }

    fn validate(&self) -> Result<()> {
        crate::scene::check_truncation_zero(self.psf_truncation_zero)?;
        crate::scene::check_truncation_zero(self.smoothing_truncation_zero)?;
        if !self.psf_truncation_radius_scale.is_finite() || self.psf_truncation_radius_scale <= 0.0
        {
            return Err(Error::Config(format!(
                "PSF truncation radius scale must be positive, got {}",
                self.psf_truncation_radius_scale
            )));
        }
        Ok(())
    }
}

/// PSF samples on pixel-offset displacements `-(G-1) ..= (G-1)`, truncated at
/// the requested somb zero; `harmonic` scales the wavenumber (`N k` for the
/// Heisenberg channel).
fn psf_kernel_samples(
    cfg: &OpticalConfig,
    grid_resolution: usize,
    pitch: f64,
    harmonic: u32,
    opts: &EngineOptions,
) -> Vec<f64> {
    let scale = cfg.psf_scale() * harmonic as f64;
    let radius = J1_ZEROS[opts.psf_truncation_zero - 1] / scale * opts.psf_truncation_radius_scale;
    let g = grid_resolution;
    let gk = 2 * g - 1;
    let mut kernel = Vec::with_capacity(gk * gk);
    for i in 0..gk {
        let dy = (i as isize - (g as isize - 1)) as f64 * pitch;
        for j in 0..gk {
            let dx = (j as isize - (g as isize - 1)) as f64 * pitch;
            let r = dx.hypot(dy);
            kernel.push(if r > radius { 0.0 } else { somb_raw(scale * r) });
        }
    }
    kernel
}

fn powi_all(values: &[f64], n: i32) -> Vec<f64> {
    values.iter().map(|v| v.powi(n)).collect()
}

/// Peak-normalize and attach the record; an identically-zero field is a
/// degenerate input, not an image.
fn finish(
    side: f64,
    resolution: usize,
    mut values: Vec<f64>,
    mode: EngineMode,
    log_prefactor: f64,
    log_source_eff: f64,
) -> Result<ImageGrid> {
    let raw_peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
    if raw_peak <= 0.0 {
        return Err(Error::Data(format!(
            "engine {mode} produced an identically zero intensity (empty aperture?)"
        )));
    }
    // Convolution roundoff leaves ~1e-16-scale negative dust where the true
    // intensity vanishes; anything larger is a real defect.
    let floor = -1e-9 * raw_peak;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < floor {
                return Err(Error::Data(format!(
                    "engine {mode} produced a significantly negative intensity {v}"
                )));
            }
            *v = 0.0;
        }
    }
    for v in values.iter_mut() {
        *v /= raw_peak;
    }
    Ok(ImageGrid {
        side,
        resolution,
        values,
        mode,
        frame: CoordinateFrame::ObjectRegistered,
        norm: NormalizationRecord {
            raw_peak,
            log_prefactor,
            log_source_efficiency: log_source_eff,
        },
    })
}

/// Amplitude-domain convolution `field (*) kernel^power`, including the
/// `d^2 r` measure.
fn convolve_field(
    field: &[f64],
    g: usize,
    pitch: f64,
    kernel: &[f64],
    power: i32,
    path: ConvPath,
) -> Vec<f64> {
    let k = if power == 1 {
        kernel.to_vec()
    } else {
        powi_all(kernel, power)
    };
    let mut out = convolve(field, g, &k, 2 * g - 1, path);
    let measure = pitch * pitch;
    for v in out.iter_mut() {
        *v *= measure;
    }
    out
}

/// Conventional coherent image `|(A (*) K)|^2` (collimated coherent-state
/// illumination).
///
/// The recorded prefactor folds in the detection factors `eta S I_o` at
/// their reference defaults: the conventional engines take no source
/// argument, and the pixels are peak-normalized regardless.
pub fn image_coherent(grid: &ApertureGrid, cfg: &OpticalConfig) -> Result<ImageGrid> {
    image_coherent_with(grid, cfg, &EngineOptions::default())
}

pub fn image_coherent_with(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    opts: &EngineOptions,
) -> Result<ImageGrid> {
    cfg.validate()?;
    opts.validate()?;
    let kernel = psf_kernel_samples(cfg, grid.resolution(), grid.pitch(), 1, opts);
    let amp = convolve_field(
        grid.values(),
        grid.resolution(),
        grid.pitch(),
        &kernel,
        1,
        opts.path,
    );
    let intensity: Vec<f64> = amp.iter().map(|a| a * a).collect();
    // eta S I_o at the reference defaults (c = 1, dt absorbed by the unit
    // system), plus the squared PSF magnitude prefactor.
    let src = SourceConfig::default();
    let log_pref = (src.eta * src.s_over_a * src.area * src.intensity).ln()
        + 2.0 * psf_prefactor(cfg, src.area).ln();
    finish(
        grid.side(),
        grid.resolution(),
        intensity,
        EngineMode::ConventionalCoherent,
        log_pref,
        0.0,
    )
}

/// Conventional incoherent image `|A|^2 (*) K^2` (independent beams from all
/// directions).
pub fn image_incoherent(grid: &ApertureGrid, cfg: &OpticalConfig) -> Result<ImageGrid> {
    image_incoherent_with(grid, cfg, &EngineOptions::default())
}

pub fn image_incoherent_with(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    opts: &EngineOptions,
) -> Result<ImageGrid> {
    cfg.validate()?;
    opts.validate()?;
    let kernel = psf_kernel_samples(cfg, grid.resolution(), grid.pitch(), 1, opts);
    let sq = powi_all(grid.values(), 2);
    let intensity = convolve_field(&sq, grid.resolution(), grid.pitch(), &kernel, 2, opts.path);
    let src = SourceConfig::default();
    let log_pref = (src.eta * src.s_over_a * src.area * src.intensity
        / (std::f64::consts::TAU * cfg.k * cfg.k * src.area))
        .ln()
        + 2.0 * psf_prefactor(cfg, src.area).ln();
    finish(
        grid.side(),
        grid.resolution(),
        intensity,
        EngineMode::ConventionalIncoherent,
        log_pref,
        0.0,
    )
}

/// N-fold coincidence post-processing `P_N = [P_1]^N / N!`: an elementwise
/// N-th power followed by renormalization. Zeros stay zeros and maxima stay
/// put; the `1/N!` lands in the normalization record.
pub fn coincidence_postprocess(image: &ImageGrid, n: u32) -> Result<ImageGrid> {
    if n == 0 {
        return Err(Error::Range("coincidence order must be >= 1".into()));
    }
    let values = powi_all(image.values(), n as i32);
    let nf = n as f64;
    finish(
        image.side,
        image.resolution,
        values,
        EngineMode::Coincidence(n),
        nf * image.norm.log_prefactor + nf * image.norm.raw_peak.ln() - ln_factorial(n),
        0.0,
    )
}

/// SQL coherent image in the focused-spot product form
/// `|(A_tilde^N (*) K^N)|^2`; requires `D_o/R > k/dk_t`.
pub fn image_sql_coherent(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
) -> Result<ImageGrid> {
    image_sql_coherent_with(grid, cfg, src, &EngineOptions::default())
}

pub fn image_sql_coherent_with(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
    opts: &EngineOptions,
) -> Result<ImageGrid> {
    cfg.validate()?;
    src.validate()?;
    opts.validate()?;
    if !opts.skip_regime_check {
        require_focused_spot(cfg, src)?;
    }
    let n = src.photon_number;
    let smoothed = smooth_with(grid, src, &opts.smooth_options())?;
    let field = powi_all(smoothed.values(), n as i32);
    let kernel = psf_kernel_samples(cfg, grid.resolution(), grid.pitch(), 1, opts);
    let amp = convolve_field(
        &field,
        grid.resolution(),
        grid.pitch(),
        &kernel,
        n as i32,
        opts.path,
    );
    let intensity: Vec<f64> = amp.iter().map(|a| a * a).collect();
    finish(
        grid.side(),
        grid.resolution(),
        intensity,
        EngineMode::SqlCoherent(n),
        sql_coherent_log_prefactor(src),
        0.0,
    )
}

/// `(dk_t^2 A / 16 pi) * xi^N`, log-scale.
fn sql_coherent_log_prefactor(src: &SourceConfig) -> f64 {
    (src.delta_k_t * src.delta_k_t * src.area / (16.0 * std::f64::consts::PI)).ln()
        + src.photon_number as f64 * efficiency_xi(src).ln()
}

/// SQL coherent image in the exact Q-function form: for each image point `u`,
/// `Q(u, r_o) = [(A K(.-u)) (*) F](r_o)`, raised to `N`, integrated over
/// `r_o` and squared. O(G^4) in the grid size; guarded at `G <= 128`.
pub fn image_sql_coherent_exact(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
) -> Result<ImageGrid> {
    image_sql_coherent_exact_with(grid, cfg, src, &EngineOptions::default())
}

pub fn image_sql_coherent_exact_with(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
    opts: &EngineOptions,
) -> Result<ImageGrid> {
    use rayon::prelude::*;

    cfg.validate()?;
    src.validate()?;
    opts.validate()?;
    let g = grid.resolution();
    if g > 128 && !opts.allow_large_exact {
        return Err(Error::Size(format!(
            "exact Q-form engine is O(G^4); G = {g} exceeds the guard of 128"
        )));
    }
    require_pitch_resolves_kernel(grid, src)?;
    let n = src.photon_number as i32;
    let pitch = grid.pitch();
    let measure = pitch * pitch;

    // Unit-mass focusing kernel on its truncated support.
    let f_radius = 2.0 * J1_ZEROS[opts.smoothing_truncation_zero - 1] / src.delta_k_t;
    let half = (f_radius / pitch).ceil() as isize;
    let fk = 2 * half + 1;
    let mut fker = Vec::with_capacity((fk * fk) as usize);
    for i in -half..=half {
        for j in -half..=half {
            let r = (i as f64 * pitch).hypot(j as f64 * pitch);
            fker.push(if r > f_radius {
                0.0
            } else {
                crate::optics::focusing_kernel(src, r)
            });
        }
    }
    let mass: f64 = fker.iter().sum::<f64>() * measure;
    for v in fker.iter_mut() {
        *v /= mass;
    }

    let psf = psf_kernel_samples(cfg, g, pitch, 1, opts);
    let gk = 2 * g - 1;
    let a = grid.values();

    let mut intensity = vec![0.0; g * g];
    intensity
        .par_chunks_mut(g)
        .enumerate()
        .for_each(|(iu, row)| {
            let mut masked = vec![0.0; g * g];
            let mut q = vec![0.0; g * g];
            for (ju, slot) in row.iter_mut().enumerate() {
                // masked(r) = A(r) * K(r - u); kernel indices are offsets
                // (ir - iu, jr - ju) into the (2G-1)^2 PSF table.
                for ir in 0..g {
                    let krow = (ir + g - 1 - iu) * gk;
                    let arow = ir * g;
                    for jr in 0..g {
                        masked[arow + jr] = a[arow + jr] * psf[krow + (jr + g - 1 - ju)];
                    }
                }
                // Q(u, r_o) on the same grid: small-kernel direct convolution.
                q.iter_mut().for_each(|v| *v = 0.0);
                for io in 0..g {
                    for jo in 0..g {
                        let mut acc = 0.0;
                        let p_lo = (io as isize - half).max(0);
                        let p_hi = (io as isize + half).min(g as isize - 1);
                        for p in p_lo..=p_hi {
                            let frow = ((io as isize - p + half) as usize) * fk as usize;
                            let mrow = (p as usize) * g;
                            let q_lo = (jo as isize - half).max(0);
                            let q_hi = (jo as isize + half).min(g as isize - 1);
                            for qq in q_lo..=q_hi {
                                acc += masked[mrow + qq as usize]
                                    * fker[frow + (jo as isize - qq + half) as usize];
                            }
                        }
                        q[io * g + jo] = acc * measure;
                    }
                }
                let integral: f64 = q.iter().map(|v| v.powi(n)).sum::<f64>() * measure;
                *slot = integral * integral;
            }
        });

    finish(
        grid.side(),
        g,
        intensity,
        EngineMode::SqlCoherentExact(src.photon_number),
        sql_coherent_log_prefactor(src),
        0.0,
    )
}

/// SQL incoherent image `|A_tilde|^{2N} (*) K^{2N}`. Pixel values are
/// identical for the focused-Fock and coherent-mixture (sigma) sources; the
/// sigma source's `(mu |alpha|^2)^N / N!` count-rate scalar is recorded.
pub fn image_sql_incoherent(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
) -> Result<ImageGrid> {
    image_sql_incoherent_with(grid, cfg, src, &EngineOptions::default())
}

pub fn image_sql_incoherent_with(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
    opts: &EngineOptions,
) -> Result<ImageGrid> {
    cfg.validate()?;
    src.validate()?;
    opts.validate()?;
    if !opts.skip_regime_check {
        require_focused_spot(cfg, src)?;
    }
    let n = src.photon_number;
    let smoothed = smooth_with(grid, src, &opts.smooth_options())?;
    let field = powi_all(smoothed.values(), 2 * n as i32);
    let kernel = psf_kernel_samples(cfg, grid.resolution(), grid.pitch(), 1, opts);
    let intensity = convolve_field(
        &field,
        grid.resolution(),
        grid.pitch(),
        &kernel,
        2 * n as i32,
        opts.path,
    );
    finish(
        grid.side(),
        grid.resolution(),
        intensity,
        EngineMode::SqlIncoherent(n),
        n as f64 * efficiency_xi(src).ln(),
        log_source_efficiency(src),
    )
}

/// Heisenberg-limit image with the PSF taken at wavenumber `N k`:
/// coherent `|(A_tilde^N (*) K_N)|^2`, incoherent `|A_tilde|^{2N} (*) K_N^2`.
/// The doppleron-screen scalar `gamma` is a separate informational quantity
/// ([`crate::optics::heisenberg_gamma`]); it is not recoverable from the
/// screen-free configuration and is not recorded here.
pub fn image_heisenberg(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
    coherent: bool,
) -> Result<ImageGrid> {
    image_heisenberg_with(grid, cfg, src, coherent, &EngineOptions::default())
}

pub fn image_heisenberg_with(
    grid: &ApertureGrid,
    cfg: &OpticalConfig,
    src: &SourceConfig,
    coherent: bool,
    opts: &EngineOptions,
) -> Result<ImageGrid> {
    cfg.validate()?;
    src.validate()?;
    opts.validate()?;
    if !opts.skip_regime_check {
        require_focused_spot(cfg, src)?;
    }
    let n = src.photon_number;
    let smoothed = smooth_with(grid, src, &opts.smooth_options())?;
    let kernel = psf_kernel_samples(cfg, grid.resolution(), grid.pitch(), n, opts);
    let (intensity, mode) = if coherent {
        let field = powi_all(smoothed.values(), n as i32);
        let amp = convolve_field(
            &field,
            grid.resolution(),
            grid.pitch(),
            &kernel,
            1,
            opts.path,
        );
        (
            amp.iter().map(|a| a * a).collect::<Vec<f64>>(),
            EngineMode::HeisenbergCoherent(n),
        )
    } else {
        let field = powi_all(smoothed.values(), 2 * n as i32);
        (
            convolve_field(
                &field,
                grid.resolution(),
                grid.pitch(),
                &kernel,
                2,
                opts.path,
            ),
            EngineMode::HeisenbergIncoherent(n),
        )
    };
    finish(
        grid.side(),
        grid.resolution(),
        intensity,
        mode,
        n as f64 * efficiency_xi(src).ln(),
        log_source_efficiency(src),
    )
}
