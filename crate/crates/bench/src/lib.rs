//! Shared fixtures for the benchmark targets.

use subrayleigh::optics::{OpticalConfig, SourceConfig};
use subrayleigh::scene::{objects, ApertureGrid};

pub fn bench_optics() -> OpticalConfig {
    OpticalConfig::default()
}

/// Source with a bandwidth that keeps the benchmark grids pitch-legal.
pub fn bench_source(n: u32, resolution: usize) -> SourceConfig {
    let delta_k_t = match resolution {
        0..=127 => 120.0,
        128..=255 => 240.0,
        _ => 480.0,
    };
    SourceConfig {
        photon_number: n,
        delta_k_t,
        ..SourceConfig::default()
    }
}

pub fn bench_object(resolution: usize) -> ApertureGrid {
    objects::two_bar(resolution, 1.0, 0.3, 0.1, 0.4).expect("valid bench object")
}
