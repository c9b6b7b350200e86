//! Deterministic counter-based random numbers.
//!
//! Every stochastic quantity in this crate flows through [`SplitMix64`], a
//! 64-bit counter generator with a fixed, platform-independent specification:
//!
//! ```text
//! state' = state + 0x9E3779B97F4A7C15                    (wrapping)
//! z = state'
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9               (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB               (wrapping)
//! output = z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits; standard normals come from the
//! Box-Muller transform (two uniforms per pair). Integer streams are
//! bit-identical everywhere; floating-point streams are identical on any
//! platform with IEEE-754 `ln`/`cos`/`sin`.
//!
//! Ensemble trials are decorrelated without coordination: trial `t` of a run
//! with base seed `s` uses [`trial_seed`]`(s, t)`, the first generator output
//! of a `SplitMix64` seeded with `s ^ t`.

use num_complex::Complex64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 generator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    fn next_f64_open_low(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A pair of independent standard normals (Box-Muller).
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_f64_open_low();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Circularly-symmetric complex Gaussian with unit total variance
    /// (variance 1/2 in each of the real and imaginary parts).
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let (re, im) = self.next_normal_pair();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// A random unit vector with i.i.d. complex Gaussian direction.
    pub fn next_unit_vector(&mut self, len: usize) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..len).map(|_| self.next_complex_gaussian()).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        }
    }
}

/// Seed for ensemble trial `index` under `base`: XOR, then one generator step.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    SplitMix64::new(base ^ index).next_u64()
}
