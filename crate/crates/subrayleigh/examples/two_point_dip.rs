//! Resolve a sub-Rayleigh two-point pair with the N = 5 SQL engine.

use subrayleigh::{image_sql_incoherent, rayleigh_radius, two_point_dip};
use subrayleigh::{scene::objects, Axis, OpticalConfig, SourceConfig};

fn main() -> subrayleigh::Result<()> {
    let cfg = OpticalConfig::default(); // D_o/R = 250, m = 1, k = 6000
    let src = SourceConfig {
        photon_number: 5,
        delta_k_t: 480.0,
        ..SourceConfig::default()
    };
    let (pair, sep) = objects::two_point(256, 1.0, 0.6 * rayleigh_radius(&cfg), Axis::X)?;
    let image = image_sql_incoherent(&pair, &cfg, &src)?;
    println!("dip = {:.3}", two_point_dip(&image, Axis::X, sep)?);
    Ok(())
}
