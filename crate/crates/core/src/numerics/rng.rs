//! Counter-based random streams keyed by `(seed, stream-id)`.
//!
//! Backed by ChaCha8, whose keystream is addressed by (key, stream, word
//! position); different stream ids therefore give disjoint sequences under
//! the same seed. Transcendentals go through `libm` so that Gaussian draws
//! are bit-identical across platforms.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::matrix::{CMatrix, C64};
use super::NumericsError;

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `(0, 1]`, 53 bits of resolution.
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals (Box–Muller).
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open0();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * libm::cos(theta), r * libm::sin(theta))
    }

    /// Circularly-symmetric complex Gaussian with unit variance: real and
    /// imaginary parts are independent N(0, 1/2).
    pub fn complex_normal(&mut self) -> C64 {
        let (a, b) = self.standard_normal_pair();
        C64::new(a * std::f64::consts::FRAC_1_SQRT_2, b * std::f64::consts::FRAC_1_SQRT_2)
    }

    /// Unit-modulus scalar with uniform phase.
    pub fn unit_phase(&mut self) -> C64 {
        let theta = 2.0 * std::f64::consts::PI * self.uniform();
        C64::new(libm::cos(theta), libm::sin(theta))
    }
}

/// Matrix of i.i.d. CN(0, 1) entries.
pub fn gaussian_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> Result<CMatrix, NumericsError> {
    if rows == 0 || cols == 0 {
        return Err(NumericsError::Dimension(format!(
            "gaussian matrix needs positive dimensions, got {rows}x{cols}"
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |_, _| rng.complex_normal()))
}
