//! Seeded random polynomials for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::coeff::{crat, QCoefficient};
use super::poly::{Generator, QPolynomial, Word};

/// Up to `max_terms` words of length ≤ `max_degree` over `alphabet`, with
/// small Gaussian-integer coefficients times a random power of `q^{1/2}`.
pub fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &[Generator],
    max_terms: usize,
    max_degree: usize,
) -> QPolynomial {
    let mut out = QPolynomial::zero();
    let n_terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..n_terms {
        let len = rng.gen_range(0..=max_degree);
        let word: Vec<Generator> = (0..len).map(|_| *alphabet.choose(rng).expect("nonempty alphabet")).collect();
        let re = crat(rng.gen_range(-3..=3), 1);
        let im = crat(rng.gen_range(-2..=2), 1);
        let c = &QCoefficient::constant(re) + &(&QCoefficient::constant(im) * &QCoefficient::imag());
        let c = &c * &QCoefficient::sqrt_q_pow(rng.gen_range(-2..=2));
        out.add_term(Word(word), c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_bounds_and_seed() {
        let alphabet = [Generator::X, Generator::P, Generator::Lambda];
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_polynomial(&mut r1, &alphabet, 4, 4);
            let b = random_polynomial(&mut r2, &alphabet, 4, 4);
            assert_eq!(a, b);
            assert!(a.len() <= 4 && a.degree() <= 4);
            assert!(a.generators().iter().all(|g| alphabet.contains(g)));
        }
    }
}
