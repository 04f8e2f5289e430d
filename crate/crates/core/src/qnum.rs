//! q-basic numbers and q-deformed frequencies.
//!
//! Two basic-number variants coexist:
//!
//! * [`basic_number_paper`]: `[n] = (q^{2n} - 1) / (q^2 - 1)`, the q²-base form
//!   used by the polynomial evolution evaluator.
//! * [`basic_number_osc`]: `[n] = (q^n - 1) / (q - 1)`, the q-base form forced by
//!   the oscillator relation `a a† - q a† a = 1` (it satisfies `[n+1] = 1 + q[n]`).
//!
//! Both switch to the analytic limit `n` when `|q - 1|` drops below
//! [`Q_LIMIT_THRESHOLD`].

use thiserror::Error;

/// Below this distance from 1 the q-singular formulas use their analytic limits.
pub const Q_LIMIT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QnumError {
    #[error("deformation parameter must be positive and finite, got q = {0}")]
    NonPositiveQ(f64),
    #[error("frequency must be positive and finite, got {0}")]
    NonPositiveFrequency(f64),
    #[error("hbar must be positive and finite, got {0}")]
    NonPositiveHbar(f64),
    #[error("limit threshold must be positive, got {0}")]
    BadThreshold(f64),
}

fn check_q(q: f64) -> Result<(), QnumError> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(QnumError::NonPositiveQ(q))
    }
}

/// Deformation parameter together with the action scale and the q→1 switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParams {
    q: f64,
    hbar: f64,
    limit_threshold: f64,
}

impl QParams {
    pub fn new(q: f64, hbar: f64) -> Result<Self, QnumError> {
        Self::with_threshold(q, hbar, Q_LIMIT_THRESHOLD)
    }

    pub fn with_threshold(q: f64, hbar: f64, limit_threshold: f64) -> Result<Self, QnumError> {
        check_q(q)?;
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(QnumError::NonPositiveHbar(hbar));
        }
        if !(limit_threshold.is_finite() && limit_threshold > 0.0) {
            return Err(QnumError::BadThreshold(limit_threshold));
        }
        Ok(Self { q, hbar, limit_threshold })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn limit_threshold(&self) -> f64 {
        self.limit_threshold
    }

    /// True when formulas singular at q = 1 must take their analytic limit.
    pub fn is_classical(&self) -> bool {
        (self.q - 1.0).abs() < self.limit_threshold
    }

    pub fn basic_number_paper(&self, n: u32) -> f64 {
        geometric_ratio(self.q * self.q, n, self.is_classical())
    }

    pub fn basic_number_osc(&self, n: u32) -> f64 {
        geometric_ratio(self.q, n, self.is_classical())
    }

    pub fn q_frequency_osc(&self, omega: f64) -> Result<f64, QnumError> {
        q_frequency_osc(omega, self.q)
    }
}

/// `(base^n - 1) / (base - 1)`, or `n` in the classical limit.
fn geometric_ratio(base: f64, n: u32, classical: bool) -> f64 {
    if classical {
        return f64::from(n);
    }
    // The quotient cancels badly near base 1, so short sums are added directly.
    if n <= 256 {
        return (0..n).fold(0.0, |acc, _| acc * base + 1.0);
    }
    let n = i32::try_from(n).unwrap_or(i32::MAX);
    (base.powi(n) - 1.0) / (base - 1.0)
}

fn near_one(q: f64) -> bool {
    (q - 1.0).abs() < Q_LIMIT_THRESHOLD
}

/// q²-base basic number `(q^{2n} - 1)/(q^2 - 1)`.
pub fn basic_number_paper(n: u32, q: f64) -> Result<f64, QnumError> {
    check_q(q)?;
    Ok(geometric_ratio(q * q, n, near_one(q)))
}

/// q-base basic number `(q^n - 1)/(q - 1)`, the oscillator spectrum.
pub fn basic_number_osc(n: u32, q: f64) -> Result<f64, QnumError> {
    check_q(q)?;
    Ok(geometric_ratio(q, n, near_one(q)))
}

/// Oscillator q-frequency `ω [2]_q / (2 q²)` with the q²-base `[2]_q = 1 + q²`.
pub fn q_frequency_osc(omega: f64, q: f64) -> Result<f64, QnumError> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(QnumError::NonPositiveFrequency(omega));
    }
    let two = basic_number_paper(2, q)?;
    Ok(omega * two / (2.0 * q * q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paper_variant_examples() {
        assert_eq!(basic_number_paper(1, 2.0).unwrap(), 1.0);
        assert_eq!(basic_number_paper(0, 3.0).unwrap(), 0.0);
        // (16 - 1)/(4 - 1), cross-checked as q^0 + q^2
        assert_eq!(basic_number_paper(2, 2.0).unwrap(), 5.0);
        assert_eq!(1.0 + 2.0f64.powi(2), 5.0);
    }

    #[test]
    fn osc_variant_examples() {
        assert_eq!(basic_number_osc(1, 5.0).unwrap(), 1.0);
        assert_eq!(basic_number_osc(3, 2.0).unwrap(), 1.0 + 2.0 * (1.0 + 2.0 * 1.0));
        assert_eq!(basic_number_osc(4, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(q_frequency_osc(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(q_frequency_osc(2.0, 2.0).unwrap(), 1.25);
        let sweep: Vec<f64> = [1.1, 1.01, 1.001]
            .iter()
            .map(|&q| (q_frequency_osc(1.0, q).unwrap() - 1.0).abs())
            .collect();
        assert!(sweep[0] > sweep[1] && sweep[1] > sweep[2]);
        assert!(sweep[2] < 2e-3);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(basic_number_paper(2, 0.0), Err(QnumError::NonPositiveQ(0.0)));
        assert!(basic_number_osc(2, -1.0).is_err());
        assert!(basic_number_osc(2, f64::NAN).is_err());
        assert!(q_frequency_osc(0.0, 1.0).is_err());
        assert!(q_frequency_osc(1.0, -2.0).is_err());
        assert!(QParams::new(1.0, 0.0).is_err());
        assert!(QParams::with_threshold(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn analytic_branch_at_one() {
        let p = QParams::new(1.0 + 1e-13, 1.0).unwrap();
        assert!(p.is_classical());
        assert_eq!(p.basic_number_paper(7), 7.0);
        assert_eq!(p.basic_number_osc(7), 7.0);
        let p = QParams::new(1.0 + 1e-9, 1.0).unwrap();
        assert!(!p.is_classical());
    }

    #[test]
    fn both_variants_approach_n() {
        for &q in &[1.0 + 1e-3, 1.0 - 1e-3, 1.0 + 1e-6, 1.0 - 1e-6] {
            for n in 1..=5u32 {
                let nf = f64::from(n);
                let paper = basic_number_paper(n, q).unwrap();
                let osc = basic_number_osc(n, q).unwrap();
                assert!((paper - nf).abs() / nf < 1e-2, "paper n={n} q={q}");
                assert!((osc - nf).abs() / nf < 1e-2, "osc n={n} q={q}");
            }
        }
    }

    proptest! {
        #[test]
        fn paper_recursion(n in 0u32..20, q in 0.2f64..3.0) {
            let lhs = basic_number_paper(n + 1, q).unwrap();
            let rhs = 1.0 + q * q * basic_number_paper(n, q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        }

        #[test]
        fn osc_recursion(n in 0u32..20, q in 0.2f64..3.0) {
            let lhs = basic_number_osc(n + 1, q).unwrap();
            let rhs = 1.0 + q * basic_number_osc(n, q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        }
    }
}
