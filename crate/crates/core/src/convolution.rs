//! Real-coefficient polynomial multiplication for bucket-mass distributions.
//!
//! Small products use the exact quadratic loop; larger ones go through a
//! power-of-two FFT. Coefficients are probability masses, so tiny negative
//! values produced by inverse-transform round-off are clamped to zero.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::exec::map_indexed;

/// Below this output length the naive product is faster and exact.
pub const NAIVE_CROSSOVER: usize = 64;

/// Polynomial whose coefficient of `x^j` is the probability mass of
/// bucket `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassPolynomial {
    pub coeffs: Vec<f64>,
}

impl MassPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().sum()
    }
}

/// Exact quadratic product.
pub(crate) fn convolve_naive(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn convolve_fft(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut fa: Vec<Complex<f64>> = a
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut fb: Vec<Complex<f64>> = b
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft.process(&mut fa);

    let scale = 1.0 / size as f64;
    fa[..out_len]
        .iter()
        .map(|c| {
            let v = c.re * scale;
            debug_assert!(v > -1e-9, "clamped coefficient {v} exceeds round-off scale");
            v.max(0.0)
        })
        .collect()
}

pub(crate) fn convolve_slices(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.len() + b.len() - 1 < NAIVE_CROSSOVER {
        convolve_naive(a, b)
    } else {
        convolve_fft(a, b)
    }
}

/// Product of two mass polynomials. Output degree is `deg a + deg b`.
pub fn convolve(a: &MassPolynomial, b: &MassPolynomial) -> MassPolynomial {
    assert!(!a.is_empty() && !b.is_empty(), "convolve requires nonempty inputs");
    MassPolynomial::new(convolve_slices(&a.coeffs, &b.coeffs))
}

/// Product of all polynomials via balanced pairwise rounds: each round
/// multiplies consecutive pairs (an odd trailing element is carried to the
/// next round), so degrees double per round instead of growing one factor
/// at a time.
pub fn product_tree(polys: &[MassPolynomial]) -> MassPolynomial {
    assert!(!polys.is_empty(), "product_tree requires at least one polynomial");
    let mut layer: Vec<MassPolynomial> = polys.to_vec();
    while layer.len() > 1 {
        let pairs = layer.len() / 2;
        let mut next = map_indexed(pairs, |i| convolve(&layer[2 * i], &layer[2 * i + 1]));
        if layer.len() % 2 == 1 {
            next.push(layer.pop().unwrap());
        }
        layer = next;
    }
    layer.pop().unwrap()
}
