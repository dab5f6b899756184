//! 2-D linear convolution against a centered, odd-sided kernel, with an FFT
//! path and a direct-quadrature path that agree to rounding.
//!
//! Both paths compute
//!
//! ```text
//! out[i][j] = sum_{p,q} a[p][q] * kernel[(i - p) + c][(j - q) + c]
//! ```
//!
//! where the kernel holds samples at displacement offsets `-c ..= c` and the
//! output has the shape of `a` (the input is zero outside its frame). The
//! kernel is radially symmetric everywhere in this crate, so convolution and
//! correlation coincide.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvPath {
    /// Zero-padded FFT convolution. Default.
    Fft,
    /// Direct O(G^2 * K^2) summation; the oracle path.
    Direct,
}

pub(crate) fn convolve(
    a: &[f64],
    ga: usize,
    kernel: &[f64],
    gk: usize,
    path: ConvPath,
) -> Vec<f64> {
    debug_assert_eq!(a.len(), ga * ga);
    debug_assert_eq!(kernel.len(), gk * gk);
    debug_assert_eq!(gk % 2, 1, "kernel side must be odd");
    match path {
        ConvPath::Fft => convolve_fft(a, ga, kernel, gk),
        ConvPath::Direct => convolve_direct(a, ga, kernel, gk),
    }
}

fn convolve_direct(a: &[f64], ga: usize, kernel: &[f64], gk: usize) -> Vec<f64> {
    use rayon::prelude::*;
    let c = (gk / 2) as isize;
    let mut out = vec![0.0; ga * ga];
    out.par_chunks_mut(ga).enumerate().for_each(|(i, row)| {
        let i = i as isize;
        for (j, slot) in row.iter_mut().enumerate() {
            let j = j as isize;
            // Fixed summation order per output pixel: row-major over the
            // kernel support clipped to the input frame.
            let mut acc = 0.0;
            let p_lo = (i - c).max(0);
            let p_hi = (i + c).min(ga as isize - 1);
            for p in p_lo..=p_hi {
                let krow = ((i - p + c) as usize) * gk;
                let arow = (p as usize) * ga;
                let q_lo = (j - c).max(0);
                let q_hi = (j + c).min(ga as isize - 1);
                for q in q_lo..=q_hi {
                    acc += a[arow + q as usize] * kernel[krow + (j - q + c) as usize];
                }
            }
            *slot = acc;
        }
    });
    out
}

fn convolve_fft(a: &[f64], ga: usize, kernel: &[f64], gk: usize) -> Vec<f64> {
    let c = gk / 2;
    let l = next_fast_len(ga + gk - 1);

    let mut fa = embed(a, ga, l, 0, 0);
    // Kernel centered at the origin with wrap-around indexing, so no output
    // shift is needed beyond the usual crop.
    let mut fk = vec![Complex::new(0.0, 0.0); l * l];
    for i in 0..gk {
        let wi = (i + l - c) % l;
        for j in 0..gk {
            let wj = (j + l - c) % l;
            fk[wi * l + wj].re = kernel[i * gk + j];
        }
    }

    let mut planner = FftPlanner::new();
    fft2(&mut fa, l, &mut planner, rustfft::FftDirection::Forward);
    fft2(&mut fk, l, &mut planner, rustfft::FftDirection::Forward);
    for (x, y) in fa.iter_mut().zip(fk.iter()) {
        *x *= *y;
    }
    fft2(&mut fa, l, &mut planner, rustfft::FftDirection::Inverse);

    let scale = 1.0 / (l * l) as f64;
    let mut out = vec![0.0; ga * ga];
    for i in 0..ga {
        for j in 0..ga {
            out[i * ga + j] = fa[i * l + j].re * scale;
        }
    }
    out
}

fn embed(a: &[f64], ga: usize, l: usize, oi: usize, oj: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); l * l];
    for i in 0..ga {
        for j in 0..ga {
            out[(i + oi) * l + (j + oj)].re = a[i * ga + j];
        }
    }
    out
}

fn fft2(
    data: &mut [Complex<f64>],
    l: usize,
    planner: &mut FftPlanner<f64>,
    dir: rustfft::FftDirection,
) {
    let fft = planner.plan_fft(l, dir);
    // Rows.
    for row in data.chunks_exact_mut(l) {
        fft.process(row);
    }
    // Columns via transpose, process, transpose back.
    transpose(data, l);
    for row in data.chunks_exact_mut(l) {
        fft.process(row);
    }
    transpose(data, l);
}

fn transpose(data: &mut [Complex<f64>], l: usize) {
    for i in 0..l {
        for j in (i + 1)..l {
            data.swap(i * l + j, j * l + i);
        }
    }
}

/// Smallest length >= `n` whose factors are all in {2, 3, 5}.
pub(crate) fn next_fast_len(n: usize) -> usize {
    let mut l = n.max(1);
    loop {
        let mut m = l;
        for f in [2, 3, 5] {
            while m % f == 0 {
                m /= f;
            }
        }
        if m == 1 {
            return l;
        }
        l += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn next_fast_len_values() {
        assert_eq!(next_fast_len(1), 1);
        assert_eq!(next_fast_len(17), 18);
        assert_eq!(next_fast_len(127), 128);
        assert_eq!(next_fast_len(766), 768);
    }

    #[test]
    fn fft_equals_direct_on_random_data() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (ga, gk) in [(16, 7), (24, 47), (32, 63)] {
            let a: Vec<f64> = (0..ga * ga).map(|_| rng.gen::<f64>() - 0.3).collect();
            let k: Vec<f64> = (0..gk * gk).map(|_| rng.gen::<f64>() - 0.5).collect();
            let f = convolve(&a, ga, &k, gk, ConvPath::Fft);
            let d = convolve(&a, ga, &k, gk, ConvPath::Direct);
            let peak = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (x, y) in f.iter().zip(d.iter()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10 * peak.max(1.0));
            }
        }
    }

    #[test]
    fn identity_kernel_is_identity() {
        let a: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let k = vec![1.0];
        for path in [ConvPath::Fft, ConvPath::Direct] {
            let out = convolve(&a, 8, &k, 1, path);
            for (x, y) in out.iter().zip(a.iter()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn impulse_reproduces_kernel() {
        let ga = 9;
        let mut a = vec![0.0; ga * ga];
        a[4 * ga + 4] = 1.0;
        let gk = 5;
        let k: Vec<f64> = (0..gk * gk).map(|i| i as f64).collect();
        let out = convolve(&a, ga, &k, gk, ConvPath::Direct);
        for di in 0..gk {
            for dj in 0..gk {
                assert_eq!(out[(2 + di) * ga + (2 + dj)], k[di * gk + dj]);
            }
        }
    }
}
