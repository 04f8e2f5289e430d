//! Bracket-convention comparison for the linear Hamiltonian `H = b x + c y`.
//!
//! The derivatives of the single generators `x` and `y` are computed under
//! each candidate bracket and compared with the stated targets
//! `i c q^{1/2} Λ` and `−i b q^{3/2} Λ`. Mismatches are data, not errors.

use std::fmt;

use super::{normal_order, parse_with, symb_bracket, ParseContext, QPolynomial, RuleSet, SymbBracket, SymbError};

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionRow {
    pub observable: &'static str,
    pub convention: &'static str,
    pub result: QPolynomial,
    pub target: QPolynomial,
    /// `result − target`, normal-ordered.
    pub residual: QPolynomial,
}

impl ConventionRow {
    pub fn matches(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionReport {
    pub hamiltonian: String,
    pub rows: Vec<ConventionRow>,
}

pub fn conventions() -> Vec<(&'static str, SymbBracket)> {
    vec![
        ("(1,1)", SymbBracket::commutator()),
        ("(1,q)", SymbBracket::q_commutator()),
        ("(q^1/2,q^-1/2)", SymbBracket::symmetric()),
    ]
}

pub fn convention_report() -> Result<ConventionReport, SymbError> {
    let rules = RuleSet::deformed_phase_space();
    let ctx = ParseContext::with_params(&["b", "c"]);
    let hamiltonian = "q*(b x + c y)";
    let qh = parse_with(hamiltonian, &ctx)?;
    let cases = [("x", "i c sqrtq L"), ("y", "-i b q sqrtq L")];
    let mut rows = Vec::new();
    for (obs, target) in cases {
        let f = parse_with(obs, &ctx)?;
        let target = normal_order(&parse_with(target, &ctx)?, &rules)?;
        for (label, spec) in conventions() {
            let result = symb_bracket(&f, &qh, &spec, &rules)?;
            let residual = normal_order(&(&result - &target), &rules)?;
            rows.push(ConventionRow { observable: obs, convention: label, result, target: target.clone(), residual });
        }
    }
    Ok(ConventionReport { hamiltonian: hamiltonian.to_string(), rows })
}

impl fmt::Display for ConventionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bracket conventions for [B, {}] (reported, not asserted)", self.hamiltonian)?;
        for r in &self.rows {
            writeln!(
                f,
                "  B={} {:<16} {:<8} result: {} | target: {} | residual: {}",
                r.observable,
                r.convention,
                if r.matches() { "match" } else { "MISMATCH" },
                r.result,
                r.target,
                r.residual
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsymb::Word;
    use crate::qsymb::Generator::*;

    #[test]
    fn no_convention_reproduces_both_targets() {
        let report = convention_report().unwrap();
        assert_eq!(report.rows.len(), 6);
        assert!(report.rows.iter().all(|r| !r.matches()));
        let ctx = ParseContext::with_params(&["b", "c"]);
        let rules = RuleSet::deformed_phase_space();
        let ord = |s: &str| normal_order(&parse_with(s, &ctx).unwrap(), &rules).unwrap();

        // Plain commutator: the Λ term is i q^{3/2} c, plus an x y residual.
        let plain = &report.rows[0];
        assert_eq!(plain.result, ord("q c (1 - q) x y + i q sqrtq c L"));
        // Symmetric bracket: i q c Λ, plus an x² term from b.
        let sym = &report.rows[2];
        assert_eq!(sym.result, ord("q b (sqrtq - 1/sqrtq) x x + i q c L"));
        assert!(sym.result.coefficient(&Word::new([Lambda])).is_some());
    }

    #[test]
    fn display_lists_every_row() {
        let text = convention_report().unwrap().to_string();
        assert_eq!(text.matches("MISMATCH").count(), 6);
    }
}
