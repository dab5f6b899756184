//! Quantitative resolution analysis: the generalized Rayleigh radius
//! `x_R(N)`, log-log power-law fits, two-point resolvability, image
//! sharpness, and the Monte Carlo centroid-averaging oracle behind the
//! classical-equivalence claim.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engines::ImageGrid;
use crate::error::{Error, Result};
use crate::optics::{rayleigh_radius, OpticalConfig};
use crate::scene::Axis;
use crate::specfun::{airy_first_ring_fraction, somb_raw, RadialProfile};

/// Least-squares power-law fit in log-log coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// The (N, value) pairs the fit consumed.
    pub points: Vec<(f64, f64)>,
}

/// Ordinary least squares on `(ln N, ln value)`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::Config(format!(
            "power-law fit needs >= 3 points, got {}",
            points.len()
        )));
    }
    for (n, v) in points {
        if !n.is_finite() || !v.is_finite() || *n <= 0.0 || *v <= 0.0 {
            return Err(Error::Domain(format!(
                "power-law fit needs positive data, got ({n}, {v})"
            )));
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(n, v)| (n.ln(), v.ln())).collect();
    let m = logs.len() as f64;
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / m;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in &logs {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("fit abscissae are all identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}

/// Generalized Rayleigh radius `x_R(N)`: the radius enclosing the Airy
/// first-ring fraction of the energy under `somb^{2N}`, mapped through the
/// PSF argument scaling to image-plane units. `x_R(1)` coincides with the
/// Rayleigh bound to within the rounding of the textbook 0.61 constant.
pub fn generalized_rayleigh_radius(cfg: &OpticalConfig, n: u32) -> Result<f64> {
    generalized_rayleigh_radius_with_fraction(cfg, n, airy_first_ring_fraction())
}

/// [`generalized_rayleigh_radius`] at a caller-chosen energy fraction.
pub fn generalized_rayleigh_radius_with_fraction(
    cfg: &OpticalConfig,
    n: u32,
    fraction: f64,
) -> Result<f64> {
    cfg.validate()?;
    let profile = RadialProfile::for_photon_number(n)?;
    let rho = crate::specfun::radius_for_fraction(&profile, fraction)?;
    Ok(rho * cfg.magnification() / cfg.psf_scale())
}

/// Visibility dip of a two-lobe profile: `1 - I_mid / I_peak`, where
/// `I_peak` averages the two lobe maxima along `axis` through the image
/// center and `I_mid` is the minimum between them. Returns 0 for a
/// single-lobed image.
pub fn two_point_dip(image: &ImageGrid, axis: Axis, separation: f64) -> Result<f64> {
    let g = image.resolution();
    let pitch = image.pitch();
    if !separation.is_finite() || separation <= 0.0 || separation >= image.side() {
        return Err(Error::Geometry(format!(
            "separation {separation} does not fit the frame (side {})",
            image.side()
        )));
    }

    // Profile along the requested axis through the frame center; the bundled
    // two-point objects sit on the row/column at index G/2 - 1.
    let center_line = g / 2 - 1;
    let profile: Vec<f64> = match axis {
        Axis::X => image.values()[center_line * g..(center_line + 1) * g].to_vec(),
        Axis::Y => (0..g)
            .map(|i| image.values()[i * g + center_line])
            .collect(),
    };

    let center = g as isize / 2;
    let offset = (separation / (2.0 * pitch)).round() as isize;
    let half_window = (offset / 2).max(1);
    let lobe = |at: isize| -> Result<(usize, f64)> {
        let lo = (at - half_window).max(0) as usize;
        let hi = ((at + half_window) as usize).min(g - 1);
        if lo >= hi {
            return Err(Error::Geometry(format!(
                "lobe window around index {at} is empty"
            )));
        }
        let (mut best_i, mut best_v) = (lo, profile[lo]);
        for (i, v) in profile.iter().enumerate().take(hi + 1).skip(lo) {
            if *v > best_v {
                best_v = *v;
                best_i = i;
            }
        }
        Ok((best_i, best_v))
    };

    let (i1, p1) = lobe(center - 1 - offset)?;
    let (i2, p2) = lobe(center + offset)?;
    if i1 >= i2 || p1 <= 0.0 || p2 <= 0.0 {
        return Err(Error::Geometry(
            "could not locate two distinct lobes".into(),
        ));
    }
    let peak = 0.5 * (p1 + p2);
    let mid = profile[i1..=i2]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Ok((1.0 - mid / peak).max(0.0))
}

/// Gradient-energy sharpness `sum |grad I|^2 / sum I^2` over interior pixels
/// (central differences in physical units). Scale invariant; 0 for a
/// constant image.
pub fn sharpness(image: &ImageGrid) -> f64 {
    let g = image.resolution();
    let inv2p = 1.0 / (2.0 * image.pitch());
    let v = image.values();
    let mut grad = 0.0;
    for i in 1..g - 1 {
        for j in 1..g - 1 {
            let gx = (v[i * g + j + 1] - v[i * g + j - 1]) * inv2p;
            let gy = (v[(i + 1) * g + j] - v[(i - 1) * g + j]) * inv2p;
            grad += gx * gx + gy * gy;
        }
    }
    let energy: f64 = v.iter().map(|x| x * x).sum();
    if energy == 0.0 {
        0.0
    } else {
        grad / energy
    }
}

/// Monte Carlo centroid-averaging configuration. Construct through
/// [`McConfig::new`]; the sampler assumes the invariants hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    /// Number of centroids (trials).
    pub samples: usize,
    /// Sensor truncation radius as a multiple of `x_R`.
    pub truncation_radius: f64,
    /// Photons averaged per centroid.
    pub batch_size: u32,
}

impl McConfig {
    pub fn new(seed: u64, samples: usize, truncation_radius: f64, batch_size: u32) -> Result<Self> {
        if samples < 1000 {
            return Err(Error::Config(format!(
                "reported statistics need >= 1000 centroid samples, got {samples}"
            )));
        }
        if !truncation_radius.is_finite() || truncation_radius < 3.0 {
            return Err(Error::Config(format!(
                "truncation radius must be >= 3 x_R, got {truncation_radius}"
            )));
        }
        if batch_size == 0 {
            return Err(Error::Config("batch size must be >= 1".into()));
        }
        Ok(Self {
            seed,
            samples,
            truncation_radius,
            batch_size,
        })
    }
}

/// Inverse-CDF table for the truncated Airy arrival density
/// `p(r) ∝ somb^2(scale r) r` on `[0, r_max]`.
struct ArrivalSampler {
    radii: Vec<f64>,
    cdf: Vec<f64>,
}

impl ArrivalSampler {
    const NODES: usize = 4096;

    fn new(scale: f64, r_max: f64) -> Self {
        let n = Self::NODES;
        let h = r_max / (n - 1) as f64;
        let f = |r: f64| somb_raw(scale * r).powi(2) * r;
        let mut radii = Vec::with_capacity(n);
        let mut cdf = Vec::with_capacity(n);
        radii.push(0.0);
        cdf.push(0.0);
        let mut acc = 0.0;
        let mut prev = f(0.0);
        for i in 1..n {
            let r = i as f64 * h;
            let cur = f(r);
            acc += 0.5 * (prev + cur) * h;
            radii.push(r);
            cdf.push(acc);
            prev = cur;
        }
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        *cdf.last_mut().unwrap() = 1.0;
        Self { radii, cdf }
    }

    fn radius(&self, u: f64) -> f64 {
        let idx = self
            .cdf
            .partition_point(|c| *c <= u)
            .min(self.cdf.len() - 1);
        let j = idx.saturating_sub(1);
        let (c0, c1) = (self.cdf[j], self.cdf[j + 1]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.radii[j] + t * (self.radii[j + 1] - self.radii[j])
    }

    /// RMS radius of the tabulated density (used as the N = 1 reference).
    #[cfg(test)]
    fn rms_radius(&self, scale: f64) -> f64 {
        let n = self.radii.len();
        let h = self.radii[1];
        let f = |r: f64| somb_raw(scale * r).powi(2) * r;
        let (mut m2, mut m0) = (0.0, 0.0);
        for i in 1..n {
            let r0 = self.radii[i - 1];
            let r1 = self.radii[i];
            m0 += 0.5 * (f(r0) + f(r1)) * h;
            m2 += 0.5 * (r0 * r0 * f(r0) + r1 * r1 * f(r1)) * h;
        }
        (m2 / m0).sqrt()
    }
}

/// Radial spread (RMS radius) of centroids obtained by averaging the arrival
/// positions of `batch_size` photons drawn from the truncated Airy density
/// of a point image. Deterministic for a fixed seed: centroid `i` draws its
/// photons from ChaCha8 stream `i`, independent of evaluation order.
pub fn mc_centroid_spread(cfg: &OpticalConfig, mc: &McConfig) -> f64 {
    let scale = cfg.psf_scale() / cfg.magnification();
    let r_max = mc.truncation_radius * rayleigh_radius(cfg);
    let sampler = ArrivalSampler::new(scale, r_max);

    let n = mc.batch_size;
    let mut sum_sq = 0.0;
    for i in 0..mc.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
        rng.set_stream(i as u64);
        let (mut cx, mut cy) = (0.0, 0.0);
        for _ in 0..n {
            let r = sampler.radius(rng.gen::<f64>());
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            cx += r * th.cos();
            cy += r * th.sin();
        }
        let inv = 1.0 / n as f64;
        cx *= inv;
        cy *= inv;
        sum_sq += cx * cx + cy * cy;
    }
    (sum_sq / mc.samples as f64).sqrt()
}
