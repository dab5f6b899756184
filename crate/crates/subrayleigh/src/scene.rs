//! Object apertures on a uniform grid, PGM ingestion/output, bundled test
//! objects, and the focused-illumination smoothing `A -> A_tilde`.
//!
//! Grid convention: `values` is row-major with row 0 at the top of the frame;
//! pixel `(i, j)` is centered at `x = -side/2 + (j + 0.5) * pitch`,
//! `y = side/2 - (i + 0.5) * pitch`.

use std::io::{Read, Write};
use std::path::Path;

use crate::conv::{convolve, ConvPath};
use crate::error::{Error, Result};
use crate::optics::{focusing_first_zero, focusing_kernel, SourceConfig};
use crate::specfun::{j0_raw, J1_ZEROS};

/// Principal axes of the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Sampled object aperture function with transmissivity values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureGrid {
    side: f64,
    resolution: usize,
    values: Vec<f64>,
}

impl ApertureGrid {
    pub const MIN_RESOLUTION: usize = 16;

    pub fn new(side: f64, resolution: usize, values: Vec<f64>) -> Result<Self> {
        if !side.is_finite() || side <= 0.0 {
            return Err(Error::Config(format!("side must be positive, got {side}")));
        }
        if resolution < Self::MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "grid resolution must be >= {}, got {resolution}",
                Self::MIN_RESOLUTION
            )));
        }
        if values.len() != resolution * resolution {
            return Err(Error::Config(format!(
                "expected {} values for a {resolution}x{resolution} grid, got {}",
                resolution * resolution,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Config(format!(
                "aperture transmissivity must lie in [0, 1], found {v}"
            )));
        }
        Ok(Self {
            side,
            resolution,
            values,
        })
    }

    /// Sample `f(x, y)` at pixel centers, clamping to `[0, 1]`.
    pub fn from_fn(side: f64, resolution: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let pitch = side / resolution as f64;
        let mut values = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            let y = side / 2.0 - (i as f64 + 0.5) * pitch;
            for j in 0..resolution {
                let x = -side / 2.0 + (j as f64 + 0.5) * pitch;
                values.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self::new(side, resolution, values)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn pitch(&self) -> f64 {
        self.side / self.resolution as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// x coordinate of column `j`.
    pub fn x_at(&self, j: usize) -> f64 {
        -self.side / 2.0 + (j as f64 + 0.5) * self.pitch()
    }

    /// y coordinate of row `i`.
    pub fn y_at(&self, i: usize) -> f64 {
        self.side / 2.0 - (i as f64 + 0.5) * self.pitch()
    }

    fn fnv1a_hash(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        for v in &self.values {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

/// Result of smoothing an aperture with the focusing kernel. Values carry
/// sign (the somb kernel has negative rings) and may exceed 1 locally; the
/// peak magnitude and provenance are recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedAperture {
    side: f64,
    resolution: usize,
    values: Vec<f64>,
    /// Largest |value| in the smoothed field.
    pub max_value: f64,
    /// FNV-1a hash of the source grid's sample bits.
    pub source_hash: u64,
    /// Focusing bandwidth the kernel was built from.
    pub delta_k_t: f64,
    /// Signed mass fraction of the kernel tail dropped by truncation.
    pub truncated_mass_fraction: f64,
}

impl SmoothedAperture {
    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn pitch(&self) -> f64 {
        self.side / self.resolution as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Knobs for [`smooth_with`]; tests use them to probe truncation and to
/// cross-check the convolution paths.
#[derive(Debug, Clone, Copy)]
pub struct SmoothOptions {
    /// Kernel truncated at this zero of somb (1-based).
    pub truncation_zero: usize,
    pub path: ConvPath,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        Self {
            truncation_zero: 3,
            path: ConvPath::Fft,
        }
    }
}

/// Focused-illumination smoothing `A_tilde = A (*) F_{dk_t}` with the kernel
/// normalized to unit mass, so a uniform aperture maps to itself.
pub fn smooth(grid: &ApertureGrid, src: &SourceConfig) -> Result<SmoothedAperture> {
    smooth_with(grid, src, &SmoothOptions::default())
}

pub fn smooth_with(
    grid: &ApertureGrid,
    src: &SourceConfig,
    opts: &SmoothOptions,
) -> Result<SmoothedAperture> {
    src.validate()?;
    check_truncation_zero(opts.truncation_zero)?;
    require_pitch_resolves_kernel(grid, src)?;

    let (kernel, gk) = focusing_kernel_samples(grid, src, opts.truncation_zero);
    let pitch_sq = grid.pitch() * grid.pitch();
    let mass: f64 = kernel.iter().sum::<f64>() * pitch_sq;
    let kernel: Vec<f64> = kernel.iter().map(|v| v / mass).collect();

    let mut values = convolve(grid.values(), grid.resolution, &kernel, gk, opts.path);
    for v in values.iter_mut() {
        *v *= pitch_sq;
    }
    let max_value = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // Signed tail mass beyond the truncation radius, relative to the full
    // kernel mass: |J0(x_t)| since int_0^x somb(t) t dt = 2 (1 - J0(x)).
    let x_t = J1_ZEROS[opts.truncation_zero - 1];
    let truncated_mass_fraction = j0_raw(x_t).abs();

    Ok(SmoothedAperture {
        side: grid.side,
        resolution: grid.resolution,
        values,
        max_value,
        source_hash: grid.fnv1a_hash(),
        delta_k_t: src.delta_k_t,
        truncated_mass_fraction,
    })
}

/// The discrete focusing kernel on pixel-offset displacements, truncated at
/// the requested somb zero. Unnormalized.
fn focusing_kernel_samples(
    grid: &ApertureGrid,
    src: &SourceConfig,
    truncation_zero: usize,
) -> (Vec<f64>, usize) {
    let pitch = grid.pitch();
    let radius = 2.0 * J1_ZEROS[truncation_zero - 1] / src.delta_k_t;
    let half = (radius / pitch).ceil() as usize;
    let gk = 2 * half + 1;
    let mut kernel = Vec::with_capacity(gk * gk);
    for i in 0..gk {
        let dy = (i as isize - half as isize) as f64 * pitch;
        for j in 0..gk {
            let dx = (j as isize - half as isize) as f64 * pitch;
            let r = dx.hypot(dy);
            kernel.push(if r > radius {
                0.0
            } else {
                focusing_kernel(src, r)
            });
        }
    }
    (kernel, gk)
}

pub(crate) fn check_truncation_zero(truncation_zero: usize) -> Result<()> {
    if !(1..=J1_ZEROS.len()).contains(&truncation_zero) {
        return Err(Error::Config(format!(
            "kernel truncation zero must lie in 1..={}, got {truncation_zero}",
            J1_ZEROS.len()
        )));
    }
    Ok(())
}

/// Required for the SQL engines: the grid pitch must be at most a quarter of
/// the focusing-kernel first-zero radius.
pub(crate) fn require_pitch_resolves_kernel(grid: &ApertureGrid, src: &SourceConfig) -> Result<()> {
    let first_zero = focusing_first_zero(src);
    if grid.pitch() > first_zero / 4.0 {
        let required = (4.0 * grid.side / first_zero).ceil() as usize;
        return Err(Error::Resolution(format!(
            "pixel pitch {:.3e} exceeds a quarter of the focusing-kernel first zero \
             {:.3e}; need resolution >= {required} at side {} (got {})",
            grid.pitch(),
            first_zero,
            grid.side,
            grid.resolution
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// PGM I/O (P2 / P5 read, P5 write at maxval 65535)
// ---------------------------------------------------------------------------

/// Anything with a square raster of f64 samples can be written as a PGM.
pub trait PixelRaster {
    fn resolution(&self) -> usize;
    fn samples(&self) -> &[f64];
}

impl PixelRaster for ApertureGrid {
    fn resolution(&self) -> usize {
        self.resolution
    }
    fn samples(&self) -> &[f64] {
        &self.values
    }
}

impl PixelRaster for SmoothedAperture {
    fn resolution(&self) -> usize {
        self.resolution
    }
    fn samples(&self) -> &[f64] {
        &self.values
    }
}

impl PixelRaster for crate::engines::ImageGrid {
    fn resolution(&self) -> usize {
        self.resolution()
    }
    fn samples(&self) -> &[f64] {
        self.values()
    }
}

struct PgmParser {
    bytes: Vec<u8>,
    pos: usize,
}

impl PgmParser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::PgmParse {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace_and_comments(&mut self) -> Result<()> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(b) = self.peek() {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn token(&mut self) -> Result<&str> {
        self.skip_whitespace_and_comments()?;
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("unexpected end of header");
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| Error::PgmParse {
            offset: start,
            message: "non-ASCII bytes in header".into(),
        })
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let start_err_pos = self.pos;
        let tok = self.token()?.to_owned();
        tok.parse::<usize>().map_err(|_| Error::PgmParse {
            offset: start_err_pos,
            message: format!("invalid {what}: {tok:?}"),
        })
    }
}

/// Read a square P2 (ASCII) or P5 (binary) PGM into an aperture grid with
/// side 1, mapping gray levels linearly onto `[0, 1]`.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<ApertureGrid> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_pgm(bytes)
}

fn parse_pgm(bytes: Vec<u8>) -> Result<ApertureGrid> {
    let mut p = PgmParser { bytes, pos: 0 };
    let magic = p.token()?.to_owned();
    if magic != "P2" && magic != "P5" {
        p.pos = 0;
        return p.err(format!("expected P2 or P5 magic, got {magic:?}"));
    }
    let width = p.number("width")?;
    let height = p.number("height")?;
    if width != height {
        p.pos = 0;
        return p.err(format!("image must be square, got {width}x{height}"));
    }
    let maxval = p.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return p.err(format!("maxval must lie in 1..=65535, got {maxval}"));
    }

    let count = width * height;
    let mut values = Vec::with_capacity(count);
    let scale = 1.0 / maxval as f64;
    if magic == "P2" {
        for _ in 0..count {
            let v = p.number("sample")?;
            if v > maxval {
                return p.err(format!("sample {v} exceeds maxval {maxval}"));
            }
            values.push(v as f64 * scale);
        }
    } else {
        // Exactly one whitespace byte separates the header from the raster.
        match p.peek() {
            Some(b) if b.is_ascii_whitespace() => p.pos += 1,
            _ => return p.err("expected single whitespace before binary raster"),
        }
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        if p.bytes.len() < p.pos + count * bytes_per {
            p.pos = p.bytes.len();
            return p.err(format!(
                "raster truncated: need {} bytes",
                count * bytes_per
            ));
        }
        for n in 0..count {
            let at = p.pos + n * bytes_per;
            let v = if bytes_per == 2 {
                // Big-endian sample order per the PGM specification.
                u16::from_be_bytes([p.bytes[at], p.bytes[at + 1]]) as usize
            } else {
                p.bytes[at] as usize
            };
            if v > maxval {
                p.pos = at;
                return p.err(format!("sample {v} exceeds maxval {maxval}"));
            }
            values.push(v as f64 * scale);
        }
    }
    ApertureGrid::new(1.0, width, values)
}

/// Write a raster as a 16-bit binary PGM (P5, maxval 65535), peak-normalizing
/// and applying an optional display gamma.
pub fn save_pgm(raster: &impl PixelRaster, path: impl AsRef<Path>, gamma: f64) -> Result<()> {
    let values = raster.samples();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("raster contains non-finite samples".into()));
    }
    if values.iter().any(|v| *v < 0.0) {
        return Err(Error::Data("raster contains negative samples".into()));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Config(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
    if peak == 0.0 {
        return Err(Error::Data("raster is identically zero".into()));
    }

    let g = raster.resolution();
    let mut out = Vec::with_capacity(32 + 2 * values.len());
    out.extend_from_slice(format!("P5\n{g} {g}\n65535\n").as_bytes());
    for v in values {
        let q = ((v / peak).powf(gamma) * 65535.0).round() as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Bundled test objects
// ---------------------------------------------------------------------------

/// Procedurally generated apertures used by the CLI and the test suite for
/// renders and resolution metrics.
pub mod objects {
    use super::{ApertureGrid, Axis};
    use crate::error::Result;

    /// Two single-pixel point emitters placed symmetrically about the center
    /// along `axis`. Returns the grid and the realized center-to-center
    /// separation (the nearest odd multiple of the pitch).
    pub fn two_point(
        resolution: usize,
        side: f64,
        separation: f64,
        axis: Axis,
    ) -> Result<(ApertureGrid, f64)> {
        let pitch = side / resolution as f64;
        if !separation.is_finite() || separation < 0.0 || separation >= side - 2.0 * pitch {
            return Err(crate::error::Error::Geometry(format!(
                "two-point separation {separation} does not fit a frame of side {side}"
            )));
        }
        let m = ((separation / pitch - 1.0) / 2.0).round().max(0.0) as usize;
        let c = resolution / 2;
        let (lo, hi) = (c - 1 - m, c + m);
        let mut values = vec![0.0; resolution * resolution];
        match axis {
            Axis::X => {
                values[(c - 1) * resolution + lo] = 1.0;
                values[(c - 1) * resolution + hi] = 1.0;
            }
            Axis::Y => {
                values[lo * resolution + (c - 1)] = 1.0;
                values[hi * resolution + (c - 1)] = 1.0;
            }
        }
        let actual = (hi - lo) as f64 * pitch;
        Ok((ApertureGrid::new(side, resolution, values)?, actual))
    }

    /// Two vertical bars with center-to-center gap `gap`, bar width
    /// `bar_width` and height `bar_height`, centered in the frame.
    pub fn two_bar(
        resolution: usize,
        side: f64,
        gap: f64,
        bar_width: f64,
        bar_height: f64,
    ) -> Result<ApertureGrid> {
        ApertureGrid::from_fn(side, resolution, |x, y| {
            let in_bar =
                ((x.abs() - gap / 2.0).abs() <= bar_width / 2.0) && (y.abs() <= bar_height / 2.0);
            if in_bar {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Soft-edged version of [`two_bar`] (logistic edges of scale `edge`);
    /// useful where binary edges would alias.
    pub fn soft_two_bar(
        resolution: usize,
        side: f64,
        gap: f64,
        bar_width: f64,
        bar_height: f64,
        edge: f64,
    ) -> Result<ApertureGrid> {
        let sig = |t: f64| 1.0 / (1.0 + (-t / edge).exp());
        ApertureGrid::from_fn(side, resolution, |x, y| {
            let bars = sig(bar_width / 2.0 - (x - gap / 2.0).abs())
                + sig(bar_width / 2.0 - (x + gap / 2.0).abs());
            bars * sig(bar_height / 2.0 - y.abs())
        })
    }

    /// Blocky letter "E" glyph filling most of the frame; its strokes are
    /// narrower than the default Rayleigh bound, so conventional renders of
    /// it are featureless blurs.
    pub fn letter_e(resolution: usize, side: f64) -> Result<ApertureGrid> {
        let h = side * 0.7; // glyph height
        let w = side * 0.45; // glyph width
        let t = side * 0.12; // stroke thickness
        ApertureGrid::from_fn(side, resolution, |x, y| {
            let x = x + w / 2.0; // left edge of the glyph at x = 0
            let inside = (0.0..=w).contains(&x) && y.abs() <= h / 2.0;
            if !inside {
                return 0.0;
            }
            let spine = x <= t;
            let arm = (h / 2.0 - y.abs()) <= t || y.abs() <= t / 2.0;
            if spine || arm {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Uniform aperture of the given transmissivity.
    pub fn uniform(resolution: usize, side: f64, value: f64) -> Result<ApertureGrid> {
        ApertureGrid::new(side, resolution, vec![value; resolution * resolution])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::SourceConfig;
    use approx::assert_abs_diff_eq;

    fn src_dkt(delta_k_t: f64) -> SourceConfig {
        SourceConfig {
            delta_k_t,
            ..SourceConfig::default()
        }
    }

    #[test]
    fn grid_validation() {
        assert!(ApertureGrid::new(1.0, 8, vec![0.0; 64]).is_err()); // too coarse
        assert!(ApertureGrid::new(1.0, 16, vec![0.5; 255]).is_err()); // wrong len
        assert!(ApertureGrid::new(1.0, 16, vec![1.5; 256]).is_err()); // out of range
        assert!(ApertureGrid::new(0.0, 16, vec![0.5; 256]).is_err());
        assert!(ApertureGrid::new(1.0, 16, vec![0.5; 256]).is_ok());
    }

    #[test]
    fn grid_coordinates() {
        let g = ApertureGrid::new(2.0, 16, vec![0.0; 256]).unwrap();
        assert_abs_diff_eq!(g.pitch(), 0.125);
        assert_abs_diff_eq!(g.x_at(0), -1.0 + 0.0625);
        assert_abs_diff_eq!(g.x_at(15), 1.0 - 0.0625);
        assert_abs_diff_eq!(g.y_at(0), 1.0 - 0.0625);
        assert_abs_diff_eq!(g.y_at(15), -1.0 + 0.0625);
    }

    #[test]
    fn pgm_roundtrip_binary_and_ascii() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gray.pgm");

        // All-white and all-black P5 files.
        let mut white = b"P5\n64 64\n255\n".to_vec();
        white.extend(std::iter::repeat(255u8).take(64 * 64));
        std::fs::write(&path, &white).unwrap();
        let g = load_pgm(&path).unwrap();
        assert!(g.values().iter().all(|v| *v == 1.0));

        let mut black = b"P5\n64 64\n255\n".to_vec();
        black.extend(std::iter::repeat(0u8).take(64 * 64));
        std::fs::write(&path, &black).unwrap();
        let g = load_pgm(&path).unwrap();
        assert!(g.values().iter().all(|v| *v == 0.0));

        // ASCII P2 with a comment line.
        let mut p2 = String::from("P2\n# comment\n16 16\n10\n");
        for i in 0..256 {
            p2.push_str(&format!("{} ", i % 11));
        }
        std::fs::write(&path, p2.as_bytes()).unwrap();
        let g = load_pgm(&path).unwrap();
        assert_abs_diff_eq!(g.values()[1], 0.1);
    }

    #[test]
    fn pgm_checkerboard_bit_exact_roundtrip() {
        // A 16-bit checkerboard written by save_pgm must reload and re-save
        // to identical bytes.
        let g = ApertureGrid::from_fn(
            1.0,
            32,
            |x, y| {
                if (x > 0.0) ^ (y > 0.0) {
                    1.0
                } else {
                    0.0
                }
            },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.pgm");
        let p2 = dir.path().join("b.pgm");
        save_pgm(&g, &p1, 1.0).unwrap();
        let loaded = load_pgm(&p1).unwrap();
        save_pgm(&loaded, &p2, 1.0).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn pgm_save_load_quantization_bound() {
        let g = ApertureGrid::from_fn(1.0, 24, |x, y| {
            0.5 + 0.4 * (8.0 * x).sin() * (5.0 * y).cos()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.pgm");
        save_pgm(&g, &path, 1.0).unwrap();
        let back = load_pgm(&path).unwrap();
        let peak = g.values().iter().fold(0.0f64, |m, v| m.max(*v));
        for (a, b) in g.values().iter().zip(back.values()) {
            assert!((a / peak - b).abs() <= 1.0 / 65535.0 + 1e-12);
        }
    }

    #[test]
    fn pgm_parse_errors_carry_offsets() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pgm");

        std::fs::write(&path, b"P6\n4 4\n255\n").unwrap();
        match load_pgm(&path) {
            Err(Error::PgmParse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }

        std::fs::write(&path, b"P2\n4 5\n255\n0").unwrap();
        assert!(matches!(load_pgm(&path), Err(Error::PgmParse { .. })));

        std::fs::write(&path, b"P2\n4 4\n0\n").unwrap();
        match load_pgm(&path) {
            Err(Error::PgmParse { offset, .. }) => assert!(offset > 0),
            other => panic!("expected parse error, got {other:?}"),
        }

        // Truncated binary raster.
        std::fs::write(&path, b"P5\n16 16\n255\nshort").unwrap();
        assert!(matches!(load_pgm(&path), Err(Error::PgmParse { .. })));
    }

    #[test]
    fn save_pgm_rejects_bad_data() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pgm");
        let g = objects::uniform(16, 1.0, 0.0).unwrap();
        assert!(matches!(save_pgm(&g, &path, 1.0), Err(Error::Data(_))));
        let g = objects::uniform(16, 1.0, 0.5).unwrap();
        assert!(save_pgm(&g, &path, 0.0).is_err());
        assert!(save_pgm(&g, &path, 1.0).is_ok());
    }

    #[test]
    fn smooth_requires_pitch_to_resolve_kernel() {
        let g = objects::uniform(64, 1.0, 1.0).unwrap();
        let err = smooth(&g, &src_dkt(600.0)).unwrap_err();
        match err {
            Error::Resolution(msg) => assert!(msg.contains("314"), "msg: {msg}"),
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn smooth_maps_uniform_to_uniform() {
        let g = objects::uniform(128, 1.0, 1.0).unwrap();
        let s = smooth(&g, &src_dkt(120.0)).unwrap();
        let margin = 2.0 * J1_ZEROS[2] / 120.0; // kernel radius
        for i in 0..128 {
            for j in 0..128 {
                let x = g.x_at(j).abs();
                let y = g.y_at(i).abs();
                if x < 0.5 - margin && y < 0.5 - margin {
                    assert_abs_diff_eq!(s.values()[i * 128 + j], 1.0, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn smooth_impulse_reproduces_kernel_shape() {
        // A single-pixel impulse comes back proportional to somb(dk_t r / 2).
        let res = 96;
        let mut values = vec![0.0; res * res];
        values[(res / 2) * res + res / 2] = 1.0;
        let g = ApertureGrid::new(1.0, res, values).unwrap();
        let src = src_dkt(60.0);
        let s = smooth(&g, &src).unwrap();

        let radius = 2.0 * J1_ZEROS[2] / src.delta_k_t;
        let center = res / 2;
        let (mut num, mut den) = (0.0, 0.0);
        let peak = s.values()[center * res + center];
        for i in 0..res {
            for j in 0..res {
                let dx = g.x_at(j) - g.x_at(center);
                let dy = g.y_at(i) - g.y_at(center);
                let r = dx.hypot(dy);
                if r > radius {
                    continue;
                }
                let expect = focusing_kernel(&src, r) * peak;
                let got = s.values()[i * res + j];
                num += (got - expect) * (got - expect);
                den += expect * expect;
            }
        }
        assert!(
            (num / den).sqrt() <= 1e-3,
            "rel L2 = {}",
            (num / den).sqrt()
        );
    }

    #[test]
    fn smooth_is_linear_and_mass_preserving() {
        let a = objects::two_bar(96, 1.0, 0.3, 0.1, 0.4).unwrap();
        let b = objects::letter_e(96, 1.0).unwrap();
        let src = src_dkt(120.0);
        let sa = smooth(&a, &src).unwrap();
        let sb = smooth(&b, &src).unwrap();

        let combo = ApertureGrid::new(
            1.0,
            96,
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| 0.4 * x + 0.3 * y)
                .collect(),
        )
        .unwrap();
        let sc = smooth(&combo, &src).unwrap();
        let scale: f64 = sc.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        for ((c, x), y) in sc.values().iter().zip(sa.values()).zip(sb.values()) {
            assert!((c - (0.4 * x + 0.3 * y)).abs() <= 1e-10 * scale);
        }

        // Mass preservation is exact (to rounding) when the smoothed support
        // stays in-frame: the unit-mass kernel redistributes without loss.
        let mass_a: f64 = a.values().iter().sum();
        let mass_sa: f64 = sa.values().iter().sum();
        assert!((mass_sa - mass_a).abs() / mass_a < 1e-9);
    }

    #[test]
    fn smooth_tightens_toward_identity_as_bandwidth_grows() {
        let g = objects::soft_two_bar(512, 1.0, 0.3, 0.12, 0.4, 0.02).unwrap();
        let mut prev = f64::INFINITY;
        for dkt in [120.0, 400.0, 980.0] {
            let s = smooth(&g, &src_dkt(dkt)).unwrap();
            let l2: f64 = s
                .values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(l2 < prev, "L2 did not shrink at dk_t = {dkt}");
            prev = l2;
        }
    }

    #[test]
    fn smooth_fft_matches_direct_quadrature() {
        let g = objects::two_bar(64, 1.0, 0.3, 0.12, 0.4).unwrap();
        let src = src_dkt(60.0);
        let fft = smooth_with(&g, &src, &SmoothOptions::default()).unwrap();
        let direct = smooth_with(
            &g,
            &src,
            &SmoothOptions {
                path: ConvPath::Direct,
                ..SmoothOptions::default()
            },
        )
        .unwrap();
        let peak = fft.max_value;
        for (a, b) in fft.values().iter().zip(direct.values()) {
            assert!((a - b).abs() <= 1e-8 * peak);
        }
        assert_eq!(fft.source_hash, direct.source_hash);
    }

    #[test]
    fn smooth_records_truncated_mass() {
        // The somb tail carries |J0(j_{1,3})| ~ 0.25 of the signed mass; the
        // record must say so rather than pretend the truncation is free.
        let g = objects::uniform(128, 1.0, 1.0).unwrap();
        let s = smooth(&g, &src_dkt(120.0)).unwrap();
        assert!((s.truncated_mass_fraction - 0.2497).abs() < 1e-3);
        assert_eq!(s.delta_k_t, 120.0);
        assert!(s.max_value > 0.0);
    }

    #[test]
    fn two_point_rejects_oversized_separation() {
        assert!(objects::two_point(64, 1.0, 2.0, Axis::X).is_err());
        assert!(objects::two_point(64, 1.0, f64::NAN, Axis::Y).is_err());
        let err = smooth_with(
            &objects::uniform(64, 1.0, 1.0).unwrap(),
            &src_dkt(60.0),
            &SmoothOptions {
                truncation_zero: 9,
                ..SmoothOptions::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn two_point_object_symmetric_separation() {
        let (g, actual) = objects::two_point(256, 1.0, 0.0958, Axis::X).unwrap();
        let ones: Vec<usize> = g
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(ones.len(), 2);
        let (a, b) = (ones[0], ones[1]);
        assert_eq!(a / 256, b / 256); // same row
        let dx = g.x_at(b % 256) - g.x_at(a % 256);
        assert_abs_diff_eq!(dx, actual, epsilon = 1e-12);
        // Symmetric about x = 0.
        assert_abs_diff_eq!(g.x_at(a % 256) + g.x_at(b % 256), 0.0, epsilon = 1e-12);
    }
}
