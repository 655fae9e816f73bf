//! Deterministic, splittable random streams.
//!
//! The generator identity is frozen: ChaCha12 keyed by `seed_from_u64`,
//! with the 64-bit ChaCha stream nonce carrying the stream id. Uniforms
//! take the top 53 bits of each `u64`; standard normals use the plain
//! Box-Muller cosine branch, consuming exactly two uniforms per draw.
//! Golden-value tests pin all of this down so results reproduce across
//! platforms and releases.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// One independently seeded draw sequence.
///
/// Identical `(seed, stream_id)` pairs yield identical sequences; distinct
/// stream ids from one seed select distinct ChaCha streams, which do not
/// overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha12Rng,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { rng, stream_id }
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53-bit resolution.
    pub fn next_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Standard normal draw via Box-Muller.
    pub fn next_standard_normal(&mut self) -> f64 {
        // 1 - U maps [0,1) onto (0,1], keeping the log finite.
        let u1 = 1.0 - self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Normal draw with the given mean and standard deviation.
    pub fn next_normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.next_standard_normal()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_stream_reproduce() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        assert_ne!(
            (0..8).map(|_| a.next_u64()).collect::<Vec<_>>(),
            (0..8).map(|_| b.next_u64()).collect::<Vec<_>>()
        );
    }

    // Golden vectors freezing the generator identity. Any change to the
    // generator, the uniform mapping, or the normal transform must show up
    // here.
    #[test]
    fn golden_u64_vector() {
        let mut s = RngStream::new(42, 0);
        let got: Vec<u64> = (0..4).map(|_| s.next_u64()).collect();
        assert_eq!(
            got,
            vec![
                9713269763989775522,
                10011513049433592189,
                11740708795755607249,
                7487565853151867058
            ]
        );
    }

    #[test]
    fn golden_uniform_and_normal_vectors() {
        let mut s = RngStream::new(42, 1);
        let u: Vec<f64> = (0..3).map(|_| s.next_uniform()).collect();
        assert_eq!(
            u,
            vec![0.28485844770176494, 0.465190377580861, 0.017337434836275922]
        );
        let mut s = RngStream::new(42, 1);
        let z: Vec<f64> = (0..3).map(|_| s.next_standard_normal()).collect();
        assert_eq!(
            z,
            vec![
                -0.7993629461886065,
                0.04566433784188991,
                0.19910322554951423
            ]
        );
    }

    #[test]
    fn uniforms_live_in_unit_interval() {
        let mut s = RngStream::new(123, 9);
        for _ in 0..10_000 {
            let u = s.next_uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
