//! Seeded random operators and states for property checks.

use ndarray::Array1;
use rand::Rng;

use crate::opcore::{Operator, C64};

/// Entries uniform in the square `[-scale, scale] + i[-scale, scale]`.
pub fn random_operator<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Operator {
    Operator::from_fn(dim, |_, _| {
        C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
    })
    .expect("random entries are finite")
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Operator {
    let a = random_operator(rng, dim, scale);
    (&a + &a.adjoint()).scale(C64::new(0.5, 0.0))
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Array1<C64> {
    let v = Array1::from_shape_fn(dim, |_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)));
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / norm)
}
