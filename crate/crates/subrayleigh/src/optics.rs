//! Optical-system configuration, point-spread-function evaluation, the
//! Rayleigh bound, the transverse focusing kernel, and the scalar efficiency
//! factors attached to (but never applied to) rendered images.
//!
//! Unit system: transverse lengths in the object and image planes are
//! measured in image widths (the rendered frame has side 1 by default);
//! wavenumbers `k` and `delta_k_t` are their inverses. `c = 1`, so detector
//! timing enters only through the dimensionless product `dw_dt`.

use crate::error::{Error, Result};
use crate::specfun::{somb_raw, J1_ZEROS};

/// Thin-lens imaging geometry and illumination wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalConfig {
    /// Illumination wavenumber, inverse image widths.
    pub k: f64,
    /// Lens pupil radius, same unit as the distances.
    pub lens_radius: f64,
    /// Lens-to-object distance.
    pub object_distance: f64,
    /// Lens-to-image-plane distance.
    pub image_distance: f64,
    /// PSF phase factor, radians. Neglected (zero) by default.
    pub theta: f64,
}

impl Default for OpticalConfig {
    /// The reference parameter set used by the demos and tests:
    /// `D_o/R = 250`, `m = 1`, `k = 6000`.
    fn default() -> Self {
        Self {
            k: 6000.0,
            lens_radius: 1.0,
            object_distance: 250.0,
            image_distance: 250.0,
            theta: 0.0,
        }
    }
}

impl OpticalConfig {
    /// Build a configuration from wavenumber, pupil radius, object distance
    /// and magnification (`D_i = m D_o`).
    pub fn new(k: f64, lens_radius: f64, object_distance: f64, magnification: f64) -> Result<Self> {
        let cfg = Self {
            k,
            lens_radius,
            object_distance,
            image_distance: magnification * object_distance,
            theta: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k", self.k),
            ("lens_radius", self.lens_radius),
            ("object_distance", self.object_distance),
            ("image_distance", self.image_distance),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.theta.is_finite() {
            return Err(Error::Config("theta must be finite".into()));
        }
        Ok(())
    }

    /// Magnification `m = D_i / D_o`.
    pub fn magnification(&self) -> f64 {
        self.image_distance / self.object_distance
    }

    /// Focal length from the thin-lens relation `1/D_o + 1/D_i = 1/f`.
    /// Derived, never set independently.
    pub fn focal_length(&self) -> f64 {
        1.0 / (1.0 / self.object_distance + 1.0 / self.image_distance)
    }

    /// PSF argument scale: `somb` is evaluated at `psf_scale * |d|` for an
    /// object-registered displacement `d`.
    pub fn psf_scale(&self) -> f64 {
        self.lens_radius * self.k / self.object_distance
    }

    /// Non-fatal sanity warnings (paraxial validity).
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let ratio = self.lens_radius / self.object_distance;
        if ratio >= 0.2 {
            w.push(format!(
                "paraxial approximation is questionable: R/D_o = {ratio:.3} >= 0.2"
            ));
        }
        w
    }
}

/// Illumination-source parameters for the N-photon engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceConfig {
    /// Photon number per detection event.
    pub photon_number: u32,
    /// Transverse focusing bandwidth, inverse image widths.
    pub delta_k_t: f64,
    /// Mean photon number `|alpha|^2` of the coherent-mixture source.
    pub alpha_sq: f64,
    /// Loss transmissivity, in (0, 1].
    pub mu: f64,
    /// Monochromaticity product `dw * dt` (dimensionless).
    pub dw_dt: f64,
    /// Detector quantum efficiency, in (0, 1].
    pub eta: f64,
    /// Detector-pixel-to-object-area ratio `S / A`.
    pub s_over_a: f64,
    /// Object-plane intensity scale.
    pub intensity: f64,
    /// Object area `A`, image widths squared. Fixed to the full unit frame.
    pub area: f64,
}

impl Default for SourceConfig {
    /// Reference defaults: `N = 5`, `delta_k_t = 600`.
    fn default() -> Self {
        Self {
            photon_number: 5,
            delta_k_t: 600.0,
            alpha_sq: 1.0,
            mu: 1.0,
            dw_dt: 0.01,
            eta: 1.0,
            s_over_a: 1e-4,
            intensity: 1.0,
            area: 1.0,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.photon_number == 0 {
            return Err(Error::Config("photon number must be >= 1".into()));
        }
        if !self.delta_k_t.is_finite() || self.delta_k_t <= 0.0 {
            return Err(Error::Config(format!(
                "delta_k_t must be positive, got {}",
                self.delta_k_t
            )));
        }
        if !self.alpha_sq.is_finite() || self.alpha_sq < 0.0 {
            return Err(Error::Config("alpha_sq must be nonnegative".into()));
        }
        if !self.mu.is_finite() || self.mu <= 0.0 || self.mu > 1.0 {
            return Err(Error::Config(format!(
                "mu must lie in (0, 1], got {}",
                self.mu
            )));
        }
        if !self.eta.is_finite() || self.eta <= 0.0 || self.eta > 1.0 {
            return Err(Error::Config(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        for (name, v) in [
            ("dw_dt", self.dw_dt),
            ("s_over_a", self.s_over_a),
            ("intensity", self.intensity),
            ("area", self.area),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_photon_number(mut self, n: u32) -> Self {
        self.photon_number = n;
        self
    }

    /// Non-fatal warnings on the focusing assumption.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let focusing = std::f64::consts::PI * self.delta_k_t * self.delta_k_t * self.area;
        if focusing < 10.0 {
            w.push(format!(
                "focusing assumption pi dk_t^2 A >> 1 is weak: got {focusing:.2}"
            ));
        }
        w
    }
}

/// Rayleigh diffraction bound `x_R = 0.61 * 2 pi m D_o / (k R)`, an
/// image-plane radius in image widths.
pub fn rayleigh_radius(cfg: &OpticalConfig) -> f64 {
    0.61 * std::f64::consts::TAU * cfg.magnification() * cfg.object_distance
        / (cfg.k * cfg.lens_radius)
}

/// Peak-normalized point-spread function `somb(R k |d| / D_o)` for an
/// object-registered displacement `d = r_o + r_i / m`.
///
/// The physical prefactor `R^2 k^2 A / (4 pi D_o D_i)` and the phase
/// `e^{i theta}` are never applied to samples; see [`psf_prefactor`].
pub fn psf(cfg: &OpticalConfig, displacement: [f64; 2]) -> f64 {
    let r = displacement[0].hypot(displacement[1]);
    somb_raw(cfg.psf_scale() * r)
}

/// PSF magnitude prefactor `R^2 k^2 A / (4 pi D_o D_i)`, recorded separately
/// from the peak-normalized samples.
pub fn psf_prefactor(cfg: &OpticalConfig, area: f64) -> f64 {
    let r = cfg.lens_radius;
    (r * r * cfg.k * cfg.k * area)
        / (4.0 * std::f64::consts::PI * cfg.object_distance * cfg.image_distance)
}

/// PSF of the N-photon Heisenberg-limit channel: `k` replaced by `N k`.
pub fn psf_heisenberg(cfg: &OpticalConfig, n: u32, displacement: [f64; 2]) -> f64 {
    let r = displacement[0].hypot(displacement[1]);
    somb_raw(cfg.psf_scale() * n as f64 * r)
}

/// First dark-ring radius of the conventional PSF in image-plane units.
pub fn psf_first_zero(cfg: &OpticalConfig) -> f64 {
    cfg.magnification() * J1_ZEROS[0] / cfg.psf_scale()
}

/// First dark-ring radius of the Heisenberg PSF; exactly `1/N` times the
/// conventional first zero.
pub fn heisenberg_first_zero(cfg: &OpticalConfig, n: u32) -> f64 {
    psf_first_zero(cfg) / n as f64
}

/// Peak-normalized transverse focusing kernel `somb(dk_t x / 2)`.
///
/// The physical prefactor `pi dk_t^2 A` is folded into the unit-mass
/// normalization applied where the kernel smooths an aperture.
pub fn focusing_kernel(src: &SourceConfig, distance: f64) -> f64 {
    somb_raw(0.5 * src.delta_k_t * distance)
}

/// First zero of the focusing kernel, `2 j_{1,1} / dk_t`.
pub fn focusing_first_zero(src: &SourceConfig) -> f64 {
    2.0 * J1_ZEROS[0] / src.delta_k_t
}

/// Detection-efficiency factor `xi = eta (dw dt) / (pi dk_t^2 A) * (S/A)`.
pub fn efficiency_xi(src: &SourceConfig) -> f64 {
    src.eta * src.dw_dt / (std::f64::consts::PI * src.delta_k_t * src.delta_k_t * src.area)
        * src.s_over_a
}

/// Count-rate scalar of the coherent-mixture source under loss:
/// `(mu |alpha|^2)^N / N!`. Informational; never applied to pixel data.
pub fn source_efficiency(src: &SourceConfig) -> f64 {
    let n = src.photon_number;
    (src.mu * src.alpha_sq).powi(n as i32) / factorial(n)
}

/// Natural log of [`source_efficiency`], safe for large `N`.
pub fn log_source_efficiency(src: &SourceConfig) -> f64 {
    let n = src.photon_number as f64;
    n * (src.mu * src.alpha_sq).ln() - ln_factorial(src.photon_number)
}

/// Fock-superposition normalization constant `M = 16 pi A / dk_t^2`.
pub fn fock_norm(src: &SourceConfig) -> f64 {
    16.0 * std::f64::consts::PI * src.area / (src.delta_k_t * src.delta_k_t)
}

/// Doppleron-screen resolution scalar `gamma = (s_F / (pi R^2))^N`.
pub fn heisenberg_gamma(cfg: &OpticalConfig, s_f: f64, n: u32) -> Result<f64> {
    let pupil = std::f64::consts::PI * cfg.lens_radius * cfg.lens_radius;
    if !s_f.is_finite() || s_f <= 0.0 || s_f > pupil {
        return Err(Error::Range(format!(
            "screen section area s_F = {s_f} must lie in (0, pi R^2 = {pupil}]"
        )));
    }
    if n == 0 {
        return Err(Error::Range("photon number must be >= 1".into()));
    }
    Ok((s_f / pupil).powi(n as i32))
}

/// Focused-spot condition required by the approximate N-photon engines.
pub fn focused_spot_satisfied(cfg: &OpticalConfig, src: &SourceConfig) -> bool {
    cfg.object_distance / cfg.lens_radius > cfg.k / src.delta_k_t
}

pub(crate) fn require_focused_spot(cfg: &OpticalConfig, src: &SourceConfig) -> Result<()> {
    if focused_spot_satisfied(cfg, src) {
        Ok(())
    } else {
        Err(Error::Regime(format!(
            "focused-spot condition D_o/R >> k/dk_t violated: D_o/R = {:.4}, k/dk_t = {:.4}",
            cfg.object_distance / cfg.lens_radius,
            cfg.k / src.delta_k_t
        )))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub(crate) fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn rayleigh_radius_at_reference_parameters() {
        let cfg = OpticalConfig::default();
        assert_abs_diff_eq!(rayleigh_radius(&cfg), 0.15970, epsilon = 1e-5);
    }

    #[test]
    fn rayleigh_radius_proportionalities() {
        let cfg = OpticalConfig::default();
        let base = rayleigh_radius(&cfg);
        let mut doubled_k = cfg;
        doubled_k.k *= 2.0;
        assert_eq!(rayleigh_radius(&doubled_k), base / 2.0);
        let mag2 = OpticalConfig::new(cfg.k, cfg.lens_radius, cfg.object_distance, 2.0).unwrap();
        assert_abs_diff_eq!(rayleigh_radius(&mag2), 2.0 * base, epsilon = 1e-15);
    }

    #[test]
    fn rayleigh_radius_matches_first_zero_within_tenth_percent() {
        // 0.61 * 2pi vs j_{1,1}: the rounded textbook constant.
        let cfg = OpticalConfig::default();
        assert_relative_eq!(
            rayleigh_radius(&cfg),
            psf_first_zero(&cfg),
            max_relative = 1e-3
        );
    }

    #[test]
    fn psf_peak_and_zero() {
        let cfg = OpticalConfig::default();
        assert_eq!(psf(&cfg, [0.0, 0.0]), 1.0);
        let r0 = crate::specfun::J1_ZEROS[0] * cfg.object_distance / (cfg.lens_radius * cfg.k);
        assert_abs_diff_eq!(psf(&cfg, [r0, 0.0]), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn psf_radially_symmetric() {
        use rand::{Rng, SeedableRng};
        let cfg = OpticalConfig::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r: f64 = rng.gen::<f64>() * 0.5;
            let a: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let b: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let pa = psf(&cfg, [r * a.cos(), r * a.sin()]);
            let pb = psf(&cfg, [r * b.cos(), r * b.sin()]);
            // Identical up to rounding in the norm computation.
            assert_abs_diff_eq!(pa, pb, epsilon = 1e-12);
        }
    }

    #[test]
    fn heisenberg_psf_is_substitution() {
        let cfg = OpticalConfig::default();
        let mut nk = cfg;
        nk.k *= 5.0;
        for i in 0..50 {
            let d = [i as f64 * 0.01, 0.02 * i as f64];
            assert_eq!(psf_heisenberg(&cfg, 5, d), psf(&nk, d));
            assert_eq!(psf_heisenberg(&cfg, 1, d), psf(&cfg, d));
        }
        assert_eq!(psf_heisenberg(&cfg, 5, [0.0, 0.0]), 1.0);
        // First zero scales exactly as 1/N.
        assert_eq!(heisenberg_first_zero(&cfg, 5), psf_first_zero(&cfg) / 5.0);
    }

    #[test]
    fn focusing_kernel_zero_location() {
        let src = SourceConfig::default();
        assert_eq!(focusing_kernel(&src, 0.0), 1.0);
        let z = focusing_first_zero(&src);
        assert_abs_diff_eq!(focusing_kernel(&src, z), 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(z, 0.01277, epsilon = 1e-5);
    }

    #[test]
    fn efficiency_xi_value_and_monotonicity() {
        let src = SourceConfig::default();
        assert_abs_diff_eq!(efficiency_xi(&src), 8.842e-13, epsilon = 1e-15);
        let mut half = src;
        half.eta = 0.5;
        assert!(efficiency_xi(&half) < efficiency_xi(&src));
        // The formula itself vanishes with eta (the config invariant keeps
        // eta positive, but the factor is exactly linear).
        let mut zero = src;
        zero.eta = 0.0;
        assert_eq!(efficiency_xi(&zero), 0.0);
        assert!(efficiency_xi(&src) < 1.0);
    }

    #[test]
    fn psf_squared_encircles_84_percent_within_rayleigh_radius() {
        // Independent in-test quadrature of the PSF intensity: the disk of
        // radius x_R/m around a point image holds ~84% of the light.
        let cfg = OpticalConfig::default();
        let ring = rayleigh_radius(&cfg) / cfg.magnification();
        let r_max = 40.0 * ring;
        let steps = 200_000;
        let h = r_max / steps as f64;
        let (mut inside, mut total) = (0.0, 0.0);
        for i in 0..steps {
            let r = (i as f64 + 0.5) * h;
            let w = psf(&cfg, [r, 0.0]).powi(2) * r * h;
            total += w;
            if r <= ring {
                inside += w;
            }
        }
        let fraction = inside / total;
        assert!((fraction - 0.838).abs() <= 0.005, "fraction {fraction}");
    }

    #[test]
    fn source_efficiency_values() {
        let mut src = SourceConfig {
            photon_number: 1,
            mu: 1.0,
            alpha_sq: 1.0,
            ..SourceConfig::default()
        };
        assert_eq!(source_efficiency(&src), 1.0);

        src.photon_number = 3;
        src.mu = 0.5;
        src.alpha_sq = 2.0;
        assert_abs_diff_eq!(source_efficiency(&src), 1.0 / 6.0, epsilon = 1e-12);

        // Invariant under trading loss for source power at fixed mu*|alpha|^2.
        let mut traded = src;
        traded.mu = 0.1;
        traded.alpha_sq = 10.0;
        assert_abs_diff_eq!(
            source_efficiency(&traded),
            source_efficiency(&src),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            log_source_efficiency(&src),
            source_efficiency(&src).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn fock_norm_value() {
        let src = SourceConfig::default();
        assert_abs_diff_eq!(fock_norm(&src), 1.3963e-4, epsilon = 1e-7);
    }

    #[test]
    fn heisenberg_gamma_values() {
        let cfg = OpticalConfig::default();
        let pupil = std::f64::consts::PI * cfg.lens_radius * cfg.lens_radius;
        assert_eq!(heisenberg_gamma(&cfg, pupil, 7).unwrap(), 1.0);
        assert_abs_diff_eq!(
            heisenberg_gamma(&cfg, pupil / 2.0, 2).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert!(heisenberg_gamma(&cfg, 0.0, 2).is_err());
        assert!(heisenberg_gamma(&cfg, pupil * 1.1, 2).is_err());
    }

    #[test]
    fn focused_spot_condition() {
        let cfg = OpticalConfig::default();
        let src = SourceConfig::default();
        assert!(focused_spot_satisfied(&cfg, &src)); // 250 > 10
        let tight = OpticalConfig::new(6000.0, 1.0, 5.0, 1.0).unwrap();
        assert!(!focused_spot_satisfied(&tight, &src));
        assert!(require_focused_spot(&tight, &src).is_err());
    }

    #[test]
    fn config_validation_and_warnings() {
        assert!(OpticalConfig::new(-1.0, 1.0, 250.0, 1.0).is_err());
        assert!(OpticalConfig::new(6000.0, 1.0, 250.0, 0.0).is_err());
        let cfg = OpticalConfig::default();
        assert!(cfg.warnings().is_empty());
        let fat = OpticalConfig::new(6000.0, 60.0, 250.0, 1.0).unwrap();
        assert_eq!(fat.warnings().len(), 1);

        let mut src = SourceConfig::default();
        assert!(src.warnings().is_empty());
        src.delta_k_t = 1.0;
        assert_eq!(src.warnings().len(), 1);
        src.mu = 0.0;
        assert!(src.validate().is_err());
    }

    #[test]
    fn thin_lens_relation() {
        let cfg = OpticalConfig::new(6000.0, 1.0, 250.0, 2.0).unwrap();
        let f = cfg.focal_length();
        assert_relative_eq!(
            1.0 / cfg.object_distance + 1.0 / cfg.image_distance,
            1.0 / f,
            max_relative = 1e-12
        );
        assert_eq!(cfg.magnification(), 2.0);
    }
}
