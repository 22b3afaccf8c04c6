//! Seeded, splittable random number streams.
//!
//! Every stochastic routine in the crate derives its randomness from a
//! `(seed, stream)` pair: the seed keys the ChaCha state, the stream id
//! selects one of 2^64 independent streams. Worker `k` of a parallel sweep
//! uses stream `base + k`, which makes results independent of scheduling.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Scalar;

/// Stream bases, one block per purpose so different sweeps never overlap.
pub mod base {
    pub const HAAR: u64 = 0;
    pub const LIPSCHITZ_CHART: u64 = 1 << 32;
    pub const LIPSCHITZ_DIRECTION: u64 = 2 << 32;
    pub const CERTIFICATE_SAMPLE: u64 = 3 << 32;
    pub const EXPERIMENT_PLANE: u64 = 4 << 32;
    pub const ENERGY_PAIR: u64 = 5 << 32;
    pub const AUDIT_SAMPLE: u64 = 6 << 32;
}

/// RNG for stream `stream` of the generator keyed by `seed`.
pub fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One standard normal draw, sampled in `f64` and converted, so that all
/// scalar widths consume the stream identically.
pub fn standard_normal<T: Scalar, R: Rng>(rng: &mut R) -> T {
    let x: f64 = rng.sample(StandardNormal);
    T::from_f64(x).expect("normal draw converts into the scalar type")
}

/// Vector of independent standard normals.
pub fn normal_vector<T: Scalar, R: Rng>(rng: &mut R, len: usize) -> DVector<T> {
    DVector::from_fn(len, |_, _| standard_normal(rng))
}

/// Uniform point on the unit sphere of `R^len`.
pub fn unit_vector<T: Scalar, R: Rng>(rng: &mut R, len: usize) -> DVector<T> {
    loop {
        let v = normal_vector::<T, R>(rng, len);
        let norm = v.norm();
        if norm > crate::scalar::real(1e-8) {
            return v / norm;
        }
    }
}

/// Uniform point in the closed unit ball of `R^len`, scaled by `radius`.
pub fn ball_vector<T: Scalar, R: Rng>(rng: &mut R, len: usize, radius: T) -> DVector<T> {
    let dir = unit_vector::<T, R>(rng, len);
    let u: f64 = rng.random();
    let r = crate::scalar::real::<T>(u.powf(1.0 / len as f64)) * radius;
    dir * r
}
