//! TOML run configuration.
//!
//! ```toml
//! scenario = "q_oscillator"
//! q = 1.3
//! t_end = 7.69
//! steps = 2000
//!
//! [state]
//! kind = "coherent"
//! alpha = 0.5
//!
//! [q_oscillator]
//! n = 16
//! ```
//!
//! Unknown keys are rejected. [`RunConfig::resolve`] fills every default so
//! the echoed header re-parses to the same value.

use serde::{Deserialize, Serialize};

use crate::dynamics::closed::SolutionMode;
use crate::dynamics::poly::AlphaTerm;
use crate::dynamics::scenario::{
    EngineSelection, FreeParticleParams, InitialState, OscillatorParams, PolyParams, Scenario, ScenarioKind,
    SpinParams,
};
use crate::dynamics::spin::SpinField;
use crate::dynamics::{EquationForm, TimeGrid};

pub const ECHO_BEGIN: &str = "# --- config ---";
pub const ECHO_END: &str = "# --- end config ---";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    QOscillator,
    FreeParticle,
    SpinPrecession,
    PolyDynamics,
}

impl ScenarioName {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::QOscillator => "q_oscillator",
            ScenarioName::FreeParticle => "free_particle",
            ScenarioName::SpinPrecession => "spin_precession",
            ScenarioName::PolyDynamics => "poly_dynamics",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscillatorSection {
    pub n: usize,
    pub omega: f64,
    pub mass: f64,
}

impl Default for OscillatorSection {
    fn default() -> Self {
        Self { n: 16, omega: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeParticleSection {
    pub half_width: usize,
    pub p0: f64,
    pub mass: f64,
}

impl Default for FreeParticleSection {
    fn default() -> Self {
        Self { half_width: 8, p0: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinSection {
    pub b_field: f64,
    pub electron_mass: f64,
    pub light_speed: f64,
    /// Charge factor `e`; dropped in paper mode.
    pub charge: f64,
    pub lambda: f64,
    pub s0: [f64; 3],
}

impl Default for SpinSection {
    fn default() -> Self {
        Self { b_field: 1.0, electron_mass: 1.0, light_speed: 1.0, charge: 1.0, lambda: 1.0, s0: [1.0, 0.0, 0.0] }
    }
}

/// `α_nm(u) = Σ_k coeffs[k] u^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub n: u32,
    pub m: u32,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolySection {
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
    pub quad_steps: usize,
    pub terms: Vec<TermSpec>,
}

impl Default for PolySection {
    fn default() -> Self {
        Self {
            b: 1.0,
            c: 1.0,
            lambda: 1.0,
            quad_steps: 64,
            terms: vec![TermSpec { n: 1, m: 0, coeffs: vec![1.0] }, TermSpec { n: 0, m: 1, coeffs: vec![1.0] }],
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_t_end() -> f64 {
    10.0
}

fn default_steps() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioName,
    #[serde(default = "one")]
    pub q: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub form: EquationForm,
    /// Reproduce the printed closed forms instead of the corrected ones.
    #[serde(default)]
    pub paper_mode: bool,
    #[serde(default)]
    pub engines: EngineSelection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// CSV file name, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub state: InitialState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_oscillator: Option<OscillatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_particle: Option<FreeParticleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_precession: Option<SpinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_dynamics: Option<PolySection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Fills the scenario section and output name, and rejects sections that
    /// belong to a different scenario.
    pub fn resolve(mut self) -> Result<RunConfig, String> {
        let present = [
            (ScenarioName::QOscillator, self.q_oscillator.is_some()),
            (ScenarioName::FreeParticle, self.free_particle.is_some()),
            (ScenarioName::SpinPrecession, self.spin_precession.is_some()),
            (ScenarioName::PolyDynamics, self.poly_dynamics.is_some()),
        ];
        for (name, there) in present {
            if there && name != self.scenario {
                return Err(format!("section [{}] does not apply to scenario {}", name.as_str(), self.scenario.as_str()));
            }
        }
        match self.scenario {
            ScenarioName::QOscillator => {
                self.q_oscillator.get_or_insert_with(Default::default);
            }
            ScenarioName::FreeParticle => {
                self.free_particle.get_or_insert_with(Default::default);
            }
            ScenarioName::SpinPrecession => {
                self.spin_precession.get_or_insert_with(Default::default);
            }
            ScenarioName::PolyDynamics => {
                self.poly_dynamics.get_or_insert_with(Default::default);
            }
        }
        if self.output.is_none() {
            self.output = Some(format!("{}.csv", self.scenario.as_str()));
        }
        Ok(self)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The resolved config as `# `-prefixed lines between markers.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        out.push_str(ECHO_BEGIN);
        out.push('\n');
        for line in self.to_toml().lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(ECHO_END);
        out.push('\n');
        out
    }

    /// Recovers the config from an echoed header.
    pub fn from_echo(text: &str) -> Result<RunConfig, String> {
        let mut lines = text.lines().skip_while(|l| *l != ECHO_BEGIN);
        if lines.next().is_none() {
            return Err("no config header found".into());
        }
        let mut body = String::new();
        for line in lines.take_while(|l| *l != ECHO_END) {
            let stripped = line.strip_prefix("# ").or_else(|| line.strip_prefix('#')).unwrap_or(line);
            body.push_str(stripped);
            body.push('\n');
        }
        RunConfig::parse(&body)
    }

    pub fn output_name(&self) -> String {
        self.output.clone().unwrap_or_else(|| format!("{}.csv", self.scenario.as_str()))
    }

    /// Builds the scenario; the config must be resolved.
    pub fn scenario(&self) -> Result<Scenario, String> {
        let grid = TimeGrid::new(self.t_end, self.steps).map_err(|e| e.to_string())?;
        if let Some(tol) = self.tolerance {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(format!("tolerance must be positive, got {tol}"));
            }
        }
        let missing = || format!("missing [{}] section (config not resolved)", self.scenario.as_str());
        let kind = match self.scenario {
            ScenarioName::QOscillator => {
                let s = self.q_oscillator.as_ref().ok_or_else(missing)?;
                ScenarioKind::QOscillator(OscillatorParams { n: s.n, omega: s.omega, mass: s.mass })
            }
            ScenarioName::FreeParticle => {
                let s = self.free_particle.as_ref().ok_or_else(missing)?;
                ScenarioKind::FreeParticle(FreeParticleParams { half_width: s.half_width, p0: s.p0, mass: s.mass })
            }
            ScenarioName::SpinPrecession => {
                let s = self.spin_precession.as_ref().ok_or_else(missing)?;
                let field = SpinField {
                    b_field: s.b_field,
                    electron_mass: s.electron_mass,
                    light_speed: s.light_speed,
                    charge: s.charge,
                };
                ScenarioKind::SpinPrecession(SpinParams { field, lambda: s.lambda, s0: s.s0 })
            }
            ScenarioName::PolyDynamics => {
                let s = self.poly_dynamics.as_ref().ok_or_else(missing)?;
                let terms = s.terms.iter().map(|t| AlphaTerm::polynomial(t.n, t.m, t.coeffs.clone())).collect();
                ScenarioKind::PolyDynamics(PolyParams { b: s.b, c: s.c, lambda: s.lambda, quad_steps: s.quad_steps, terms })
            }
        };
        Ok(Scenario {
            kind,
            q: self.q,
            hbar: self.hbar,
            grid,
            form: self.form,
            mode: if self.paper_mode { SolutionMode::Paper } else { SolutionMode::Default },
            engines: self.engines,
            state: self.state.clone(),
            tolerance: self.tolerance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves() {
        let c = RunConfig::parse("scenario = \"q_oscillator\"").unwrap().resolve().unwrap();
        assert_eq!(c.q_oscillator, Some(OscillatorSection::default()));
        assert_eq!(c.output.as_deref(), Some("q_oscillator.csv"));
        assert_eq!(c.steps, 2000);
        assert!(c.scenario().is_ok());
    }

    #[test]
    fn unknown_and_missing_keys_rejected() {
        assert!(RunConfig::parse("q = 1.2").unwrap_err().contains("scenario"));
        assert!(RunConfig::parse("scenario = \"q_oscillator\"\nqq = 1.0").is_err());
        assert!(RunConfig::parse("scenario = \"q_oscillator\"\n[q_oscillator]\nomga = 2.0").is_err());
        assert!(RunConfig::parse("scenario = \"harmonic\"").is_err());
        let wrong = RunConfig::parse("scenario = \"q_oscillator\"\n[spin_precession]\nlambda = 2.0").unwrap();
        assert!(wrong.resolve().is_err());
    }

    #[test]
    fn echo_round_trips() {
        let text = r#"
scenario = "poly_dynamics"
q = 1.25
t_end = 0.5
steps = 10
paper_mode = true
tolerance = 1e-9

[state]
kind = "superposition"
indices = [1, 2]

[poly_dynamics]
c = 0.1
terms = [{ n = 2, m = 1, coeffs = [0.5, -1.0] }]
"#;
        let c = RunConfig::parse(text).unwrap().resolve().unwrap();
        let echo = c.echo();
        assert!(echo.lines().all(|l| l.starts_with('#')));
        assert_eq!(RunConfig::from_echo(&echo).unwrap(), c);
    }

    #[test]
    fn invalid_values_fail_in_scenario() {
        let c = RunConfig::parse("scenario = \"spin_precession\"\nsteps = 0").unwrap().resolve().unwrap();
        assert!(c.scenario().is_err());
        let c = RunConfig::parse("scenario = \"spin_precession\"\ntolerance = -1.0").unwrap().resolve().unwrap();
        assert!(c.scenario().is_err());
    }
}
