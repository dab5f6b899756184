//! Wave-optics simulation of sub-Rayleigh N-photon imaging.
//!
//! The library forms conventional, N-photon standard-quantum-limit (SQL) and
//! Heisenberg-limit images of a sampled object aperture seen through a
//! finite-pupil thin lens, and provides the quantitative metrics (generalized
//! Rayleigh radii, power-law scaling fits, two-point resolvability, a Monte
//! Carlo centroid oracle) used to verify the resolution-scaling claims
//! `x_R(N) ~ x_R / sqrt(N)` (SQL) and `x_R / N` (Heisenberg).
//!
//! Module map:
//!
//! - [`specfun`]: Bessel `J0`/`J1`, `somb`, encircled-energy quadrature.
//! - [`optics`]: lens/source configuration, PSF evaluation, Rayleigh bound,
//!   focusing kernel, efficiency scalars.
//! - [`scene`]: sampled apertures, PGM I/O, bundled test objects, and the
//!   focused-illumination smoothing `A -> A_tilde`.
//! - [`engines`]: all image-formation computations.
//! - [`metrics`]: resolution metrics and the Monte Carlo centroid oracle.
//!
//! Images are computed in object-registered coordinates (`u = -r_i / m`), so
//! every engine reduces to a plain convolution against a radially symmetric
//! kernel and outputs align with the object grid; the physical image is the
//! stored array inverted and magnified by `m`.
//!
//! ```
//! use subrayleigh::{image_sql_incoherent, rayleigh_radius, two_point_dip};
//! use subrayleigh::{scene::objects, Axis, OpticalConfig, SourceConfig};
//!
//! let cfg = OpticalConfig::default(); // D_o/R = 250, m = 1, k = 6000
//! let src = SourceConfig {
//!     photon_number: 5,
//!     delta_k_t: 120.0, // coarse-grid demo; the pitch must resolve 2 j11/dk_t
//!     ..SourceConfig::default()
//! };
//! let sep = 0.6 * rayleigh_radius(&cfg);
//! let (pair, realized) = objects::two_point(64, 1.0, sep, Axis::X)?;
//! let image = image_sql_incoherent(&pair, &cfg, &src)?;
//! let dip = two_point_dip(&image, Axis::X, realized)?;
//! assert!(dip > 0.0);
//! # Ok::<(), subrayleigh::Error>(())
//! ```

pub mod engines;
pub mod error;
pub mod metrics;
pub mod optics;
pub mod scene;
pub mod specfun;

mod conv;

pub use engines::{
    coincidence_postprocess, image_coherent, image_heisenberg, image_incoherent,
    image_sql_coherent, image_sql_coherent_exact, image_sql_incoherent, ConvPath, EngineMode,
    EngineOptions, ImageGrid, NormalizationRecord,
};
pub use error::{Error, Result};
pub use metrics::{
    fit_scaling, generalized_rayleigh_radius, mc_centroid_spread, sharpness, two_point_dip,
    McConfig, ScalingFit,
};
pub use optics::{
    efficiency_xi, focusing_kernel, heisenberg_first_zero, psf, psf_heisenberg, rayleigh_radius,
    source_efficiency, OpticalConfig, SourceConfig,
};
pub use scene::{load_pgm, save_pgm, smooth, ApertureGrid, Axis, SmoothedAperture};
pub use specfun::{
    airy_first_ring_fraction, bessel_j0, bessel_j1, encircled_energy, radius_for_fraction, somb,
    RadialProfile,
};
