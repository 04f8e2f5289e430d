//! Named scenarios and engine cross-validation.

use std::fmt;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::opcore::{expectation, BracketSpec, Operator, C64};
use crate::qnum::QParams;
use crate::reps::{FockRep, LatticeRep, Representation, SpinRep};

use super::closed::{closed_free_particle_path, closed_oscillator, closed_result, closed_spin, SolutionMode};
use super::engines::unitary_path;
use super::poly::{poly_coeff_evolution, AlphaTerm, PolyEvalOptions};
use super::spin::{spin_exponential, spin_flow_matrix, spin_ode, spin_unitary, SpinField, SpinTrajectory};
use super::{
    evolve_liouville_with, evolve_ode_with, positive, DynError, Engine, EquationForm, EvolutionResult, OdeOptions,
    TimeGrid,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Basis { index: usize },
    /// Equal-weight superposition of basis states.
    Superposition { indices: Vec<usize> },
    /// Truncated q-coherent state `Σ αⁿ/√([n]!) |n⟩` (oscillator only).
    Coherent { alpha: f64 },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Basis { index: 1 }
    }
}

impl InitialState {
    /// Builds the state; every populated basis index must lie in `interior`.
    fn build(&self, interior: &[usize], dim: usize, fock: Option<&FockRep>) -> Result<Array1<C64>, DynError> {
        let bad = |msg: String| Err(DynError::MixedRepresentations(msg));
        let mut v = Array1::<C64>::zeros(dim);
        match self {
            InitialState::Basis { index } => {
                if !interior.contains(index) {
                    return bad(format!("basis index {index} is outside the interior {interior:?}"));
                }
                v[*index] = C64::new(1.0, 0.0);
            }
            InitialState::Superposition { indices } => {
                if indices.is_empty() {
                    return bad("superposition needs at least one index".into());
                }
                for i in indices {
                    if !interior.contains(i) {
                        return bad(format!("basis index {i} is outside the interior {interior:?}"));
                    }
                    v[*i] = C64::new(1.0, 0.0);
                }
            }
            InitialState::Coherent { alpha } => {
                let Some(rep) = fock else {
                    return bad("coherent states need the oscillator representation".into());
                };
                let mut c = 1.0;
                for &n in interior {
                    if n > 0 {
                        c *= alpha / rep.params().basic_number_osc(n as u32).sqrt();
                    }
                    v[n] = C64::new(c, 0.0);
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return bad("initial state vanishes".into());
        }
        Ok(v.mapv(|z| z / norm))
    }
}

fn interior_indices(p: &Operator) -> Vec<usize> {
    (0..p.dim()).filter(|&k| p.get(k, k).re != 0.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub n: usize,
    pub omega: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParticleParams {
    pub half_width: usize,
    pub p0: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinParams {
    pub field: SpinField,
    pub lambda: f64,
    pub s0: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct PolyParams {
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
    pub quad_steps: usize,
    pub terms: Vec<AlphaTerm>,
}

#[derive(Debug, Clone)]
pub enum ScenarioKind {
    QOscillator(OscillatorParams),
    FreeParticle(FreeParticleParams),
    SpinPrecession(SpinParams),
    PolyDynamics(PolyParams),
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::QOscillator(_) => "q_oscillator",
            ScenarioKind::FreeParticle(_) => "free_particle",
            ScenarioKind::SpinPrecession(_) => "spin_precession",
            ScenarioKind::PolyDynamics(_) => "poly_dynamics",
        }
    }

    /// The lattice model is singular at `q = 1`.
    pub fn rejects_classical_q(&self) -> bool {
        matches!(self, ScenarioKind::FreeParticle(_))
    }
}

/// Selected engines; the unitary oracle is added wherever it applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineSelection {
    Closed,
    Ode,
    Liouville,
    #[default]
    All,
}

impl EngineSelection {
    pub fn engines(self) -> Vec<Engine> {
        match self {
            EngineSelection::Closed => vec![Engine::Closed],
            EngineSelection::Ode => vec![Engine::Ode],
            EngineSelection::Liouville => vec![Engine::Liouville],
            EngineSelection::All => vec![Engine::Closed, Engine::Ode, Engine::Liouville],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub q: f64,
    pub hbar: f64,
    pub grid: TimeGrid,
    pub form: EquationForm,
    pub mode: SolutionMode,
    pub engines: EngineSelection,
    pub state: InitialState,
    /// Deviations and error estimates above this are flagged.
    pub tolerance: Option<f64>,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Bracket convention used by the engines, as printed in reports.
    pub fn convention(&self) -> String {
        match &self.kind {
            ScenarioKind::QOscillator(_) => "a: (1,q) on (B,qH); adag: (q,1) on (B,qH)".into(),
            ScenarioKind::FreeParticle(_) => "(1,1) on (B,qH)".into(),
            ScenarioKind::SpinPrecession(_) => "structure constants, [S_i,S_j] = i hbar lambda c^k_ij S_k".into(),
            ScenarioKind::PolyDynamics(_) => "stated solution and exponential forms (evaluator only)".into(),
        }
    }

    fn params(&self) -> Result<QParams, DynError> {
        Ok(QParams::new(self.q, self.hbar)?)
    }
}

/// Expectation (or scalar) series of one observable from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub observable: String,
    pub source: String,
    pub values: Vec<C64>,
}

/// Largest deviation between two sources over the grid (operator level:
/// interior Frobenius norm).
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub observable: String,
    pub left: String,
    pub right: String,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossReport {
    pub scenario: String,
    pub q: f64,
    pub convention: String,
    pub form: EquationForm,
    pub mode: SolutionMode,
    pub times: Vec<f64>,
    pub series: Vec<ObservableSeries>,
    pub deviations: Vec<Deviation>,
    pub diagnostics: Vec<(String, f64)>,
    pub tolerance_breached: bool,
}

impl CrossReport {
    pub fn deviation(&self, observable: &str, left: &str, right: &str) -> Option<f64> {
        self.deviations
            .iter()
            .find(|d| d.observable == observable && d.left == left && d.right == right)
            .map(|d| d.max)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

impl fmt::Display for CrossReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} q={} convention: {} form: {} mode: {:?}", self.scenario, self.q, self.convention, self.form, self.mode)?;
        for d in &self.deviations {
            writeln!(f, "  max |{} {} - {}| = {:.3e}", d.observable, d.left, d.right, d.max)?;
        }
        for (n, v) in &self.diagnostics {
            writeln!(f, "  {n} = {v:.6e}")?;
        }
        Ok(())
    }
}

/// Operator trajectories of several observables from one engine.
struct EngineRun {
    engine: Engine,
    observables: Vec<(String, Vec<Operator>)>,
}

fn operator_report(
    scenario: &Scenario,
    runs: Vec<EngineRun>,
    projector: &Operator,
    state: &Array1<C64>,
    mut diagnostics: Vec<(String, f64)>,
) -> Result<CrossReport, DynError> {
    let mut series = Vec::new();
    let mut deviations = Vec::new();
    if let Some(first) = runs.first() {
        for (oi, (name, _)) in first.observables.iter().enumerate() {
            for run in &runs {
                let values = run.observables[oi].1.iter().map(|b| expectation(state, b)).collect::<Result<_, _>>()?;
                series.push(ObservableSeries { observable: name.clone(), source: run.engine.label().into(), values });
            }
            for (i, r1) in runs.iter().enumerate() {
                for r2 in &runs[i + 1..] {
                    let max = super::max_deviation(&r1.observables[oi].1, &r2.observables[oi].1, Some(projector))?;
                    deviations.push(Deviation {
                        observable: name.clone(),
                        left: r1.engine.label().into(),
                        right: r2.engine.label().into(),
                        max,
                    });
                }
            }
        }
    }
    let breached = scenario.tolerance.is_some_and(|tol| {
        deviations.iter().any(|d| d.max > tol)
            || diagnostics.iter().any(|(n, v)| n.ends_with("error_estimate") && *v > tol)
    });
    diagnostics.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(CrossReport {
        scenario: scenario.name().into(),
        q: scenario.q,
        convention: scenario.convention(),
        form: scenario.form,
        mode: scenario.mode,
        times: scenario.grid.times(),
        series,
        deviations,
        diagnostics,
        tolerance_breached: breached,
    })
}

fn ode_opts(s: &Scenario, projector: &Operator) -> OdeOptions {
    OdeOptions { form: s.form, richardson: true, tolerance: s.tolerance, projector: Some(projector.clone()) }
}

fn linear_combo(a: &[Operator], b: &[Operator], ca: C64, cb: C64) -> Vec<Operator> {
    a.iter().zip(b).map(|(x, y)| &x.scale(ca) + &y.scale(cb)).collect()
}

fn oscillator(s: &Scenario, p: &OscillatorParams) -> Result<CrossReport, DynError> {
    positive("mass", p.mass)?;
    let rep = FockRep::new(p.n, s.params()?, p.omega)?;
    let proj = rep.interior_projector();
    let q = s.q;
    let grid = &s.grid;
    let sx = C64::new((rep.hbar() / (2.0 * p.mass * rep.omega_q())).sqrt(), 0.0);
    let sp = C64::new(0.0, (p.mass * rep.omega_q() * rep.hbar() / 2.0).sqrt());
    let h = rep.hamiltonian();
    let spec_a = BracketSpec::q_commutator(q);
    let spec_adag = BracketSpec::real(q, 1.0);
    let mut diagnostics = Vec::new();

    let assemble = |engine: Engine, a: Vec<Operator>, adag: Vec<Operator>| EngineRun {
        engine,
        observables: vec![
            ("x".to_string(), linear_combo(&a, &adag, sx, sx)),
            ("p".to_string(), linear_combo(&a, &adag, sp, -sp)),
            ("a".to_string(), a),
            ("adag".to_string(), adag),
        ],
    };
    let mut engines = s.engines.engines();
    if rep.params().is_classical() {
        engines.push(Engine::Unitary);
    }
    let mut runs = Vec::new();
    for engine in engines {
        let run = match engine {
            Engine::Closed => {
                let snaps = grid
                    .times()
                    .into_iter()
                    .map(|t| closed_oscillator(&rep, p.mass, t, s.mode))
                    .collect::<Result<Vec<_>, _>>()?;
                let one = Operator::identity(rep.dim());
                let pc = rep.interior_projector();
                let mut phase: f64 = 0.0;
                for sn in &snaps {
                    let rel = &(&(&sn.a * &sn.adag) - &(&sn.adag * &sn.a).scale(C64::new(q, 0.0))) - &one;
                    phase = phase.max(rel.sandwich(&pc)?.max_abs());
                }
                diagnostics.push(("closed_phase_cancellation_max".into(), phase));
                EngineRun {
                    engine,
                    observables: vec![
                        ("x".into(), snaps.iter().map(|s| s.x.clone()).collect()),
                        ("p".into(), snaps.iter().map(|s| s.p.clone()).collect()),
                        ("a".into(), snaps.iter().map(|s| s.a.clone()).collect()),
                        ("adag".into(), snaps.into_iter().map(|s| s.adag).collect()),
                    ],
                }
            }
            Engine::Ode => {
                let a = evolve_ode_with(rep.a(), h, spec_a, q, grid, rep.hbar(), ode_opts(s, &proj))?;
                let ad = evolve_ode_with(rep.adag(), h, spec_adag, q, grid, rep.hbar(), ode_opts(s, &proj))?;
                let est = a.error_estimate.unwrap_or(0.0).max(ad.error_estimate.unwrap_or(0.0));
                diagnostics.push(("ode_error_estimate".into(), est));
                assemble(engine, a.operators, ad.operators)
            }
            Engine::Liouville => {
                let a = evolve_liouville_with(rep.a(), h, spec_a, q, grid, rep.hbar(), s.form)?;
                let ad = evolve_liouville_with(rep.adag(), h, spec_adag, q, grid, rep.hbar(), s.form)?;
                assemble(engine, a.operators, ad.operators)
            }
            Engine::Unitary => {
                let a = unitary_path(rep.a(), h, grid, rep.hbar())?;
                let ad = unitary_path(rep.adag(), h, grid, rep.hbar())?;
                assemble(engine, a.operators, ad.operators)
            }
        };
        runs.push(run);
    }
    let defect = rep.relation_defect();
    let n = rep.dim();
    diagnostics.push(("omega_q".into(), rep.omega_q()));
    diagnostics.push(("q_omega_q".into(), q * rep.omega_q()));
    diagnostics.push(("fock_defect_boundary".into(), defect.get(n - 1, n - 1).norm()));
    diagnostics.push(("fock_defect_interior_max".into(), rep.on_interior(&defect).max_abs()));
    let state = s.state.build(&interior_indices(&proj), n, Some(&rep))?;
    operator_report(s, runs, &proj, &state, diagnostics)
}

fn free_particle(s: &Scenario, p: &FreeParticleParams) -> Result<CrossReport, DynError> {
    positive("mass", p.mass)?;
    let rep = LatticeRep::new(p.half_width, s.params()?, p.p0)?;
    let proj = rep.interior_projector();
    let q = s.q;
    let grid = &s.grid;
    let h = (rep.p() * rep.p()).scale(C64::new(1.0 / (2.0 * p.mass), 0.0));
    let qh = h.scale(C64::new(q, 0.0));
    let spec = BracketSpec::commutator();
    let mut diagnostics = Vec::new();
    let mut engines = s.engines.engines();
    // With the plain commutator the equation is the standard one for qH.
    if s.form == EquationForm::Heisenberg {
        engines.push(Engine::Unitary);
    }
    let constant = |b: &Operator| vec![b.clone(); grid.steps() + 1];
    let mut runs = Vec::new();
    for engine in engines {
        let (x, pp) = match engine {
            Engine::Closed => {
                let x = closed_free_particle_path(rep.x(), rep.p(), rep.lambda(), q, p.mass, grid)?;
                let mut second: f64 = 0.0;
                for w in x.operators.windows(3) {
                    second = second.max((&(&w[0] - &w[1].scale(C64::new(2.0, 0.0))) + &w[2]).max_abs());
                }
                diagnostics.push(("closed_second_difference_max".into(), second));
                (x, closed_result(grid, constant(rep.p())))
            }
            Engine::Ode => {
                let x = evolve_ode_with(rep.x(), &h, spec, q, grid, rep.hbar(), ode_opts(s, &proj))?;
                let pp = evolve_ode_with(rep.p(), &h, spec, q, grid, rep.hbar(), ode_opts(s, &proj))?;
                let est = x.error_estimate.unwrap_or(0.0).max(pp.error_estimate.unwrap_or(0.0));
                diagnostics.push(("ode_error_estimate".into(), est));
                (x, pp)
            }
            Engine::Liouville => (
                evolve_liouville_with(rep.x(), &h, spec, q, grid, rep.hbar(), s.form)?,
                evolve_liouville_with(rep.p(), &h, spec, q, grid, rep.hbar(), s.form)?,
            ),
            Engine::Unitary => (unitary_path(rep.x(), &qh, grid, rep.hbar())?, unitary_path(rep.p(), &qh, grid, rep.hbar())?),
        };
        runs.push(EngineRun { engine, observables: vec![("x".into(), x.operators), ("p".into(), pp.operators)] });
    }
    let defects = rep.relation_defects();
    let names = ["lattice_defect_lambda_p", "lattice_defect_lambda_x", "lattice_defect_xp"];
    for (name, d) in names.iter().zip(&defects) {
        diagnostics.push((format!("{name}_interior_max"), rep.on_interior(d).max_abs()));
    }
    let state = s.state.build(&interior_indices(&proj), rep.dim(), None)?;
    operator_report(s, runs, &proj, &state, diagnostics)
}

fn spin(s: &Scenario, p: &SpinParams) -> Result<CrossReport, DynError> {
    p.field.validate()?;
    let rep = SpinRep::new(p.lambda, s.hbar);
    let h = p.field.q_hamiltonian(s.q);
    let a = spin_flow_matrix(&rep, h);
    let omega = p.field.omega_q(s.q, p.lambda, s.mode == SolutionMode::Default);
    let grid = &s.grid;
    let mut engines = s.engines.engines();
    if s.params()?.is_classical() && p.lambda == 1.0 {
        engines.push(Engine::Unitary);
    }
    let mut trajs: Vec<SpinTrajectory> = Vec::new();
    for engine in engines {
        trajs.push(match engine {
            Engine::Closed => SpinTrajectory {
                engine,
                times: grid.times(),
                values: grid.times().iter().map(|&t| closed_spin(p.s0, omega, t, s.mode)).collect(),
            },
            Engine::Ode => spin_ode(p.s0, &a, grid),
            Engine::Liouville => spin_exponential(p.s0, &a, grid),
            Engine::Unitary => spin_unitary(p.s0, h, grid, s.hbar)?,
        });
    }
    let names = ["Sx", "Sy", "Sz"];
    let mut series = Vec::new();
    let mut deviations = Vec::new();
    let mut diagnostics = vec![("omega_q".to_string(), omega)];
    for (k, name) in names.iter().enumerate() {
        for tr in &trajs {
            series.push(ObservableSeries {
                observable: name.to_string(),
                source: tr.engine.label().into(),
                values: tr.values.iter().map(|v| C64::new(v[k], 0.0)).collect(),
            });
        }
        for (i, t1) in trajs.iter().enumerate() {
            for t2 in &trajs[i + 1..] {
                let max = t1.values.iter().zip(&t2.values).map(|(u, v)| (u[k] - v[k]).abs()).fold(0.0, f64::max);
                deviations.push(Deviation {
                    observable: name.to_string(),
                    left: t1.engine.label().into(),
                    right: t2.engine.label().into(),
                    max,
                });
            }
        }
    }
    for tr in &trajs {
        diagnostics.push((format!("{}_transverse_drift", tr.engine.label()), tr.transverse_drift()));
    }
    diagnostics.sort_by(|a, b| a.0.cmp(&b.0));
    let breached = s.tolerance.is_some_and(|tol| deviations.iter().any(|d| d.max > tol));
    Ok(CrossReport {
        scenario: s.name().into(),
        q: s.q,
        convention: s.convention(),
        form: s.form,
        mode: s.mode,
        times: grid.times(),
        series,
        deviations,
        diagnostics,
        tolerance_breached: breached,
    })
}

fn poly(s: &Scenario, p: &PolyParams) -> Result<CrossReport, DynError> {
    let opts = PolyEvalOptions { q: s.q, b: p.b, c: p.c, lambda: p.lambda, quad_steps: p.quad_steps, mode: s.mode };
    let times = s.grid.times();
    let reports = times.iter().map(|&t| poly_coeff_evolution(&p.terms, &opts, t)).collect::<Result<Vec<_>, _>>()?;
    let mut series = Vec::new();
    let mut deviations = Vec::new();
    let mut diagnostics = Vec::new();
    if let Some(first) = reports.first() {
        for (k, single) in first.single.iter().enumerate() {
            let name = single.generator.name().to_string();
            let pick = |f: fn(&super::poly::SingleTermReport) -> C64| reports.iter().map(|r| f(&r.single[k])).collect();
            series.push(ObservableSeries { observable: name.clone(), source: "linear".into(), values: pick(|r| r.linear) });
            series.push(ObservableSeries { observable: name.clone(), source: "exponential".into(), values: pick(|r| r.exponential) });
            let max = reports.iter().map(|r| r.single[k].difference).fold(0.0, f64::max);
            deviations.push(Deviation { observable: name.clone(), left: "linear".into(), right: "exponential".into(), max });
            diagnostics.push((format!("{name}_omega"), single.omega));
        }
        for pc in &first.prefactors {
            let name = pc.generator.name();
            diagnostics.push((format!("{name}_prefactor_solution_im"), pc.from_solution.im));
            diagnostics.push((format!("{name}_prefactor_derivative_im"), pc.from_derivative.im));
        }
    }
    diagnostics.sort_by(|a, b| a.0.cmp(&b.0));
    let breached = s.tolerance.is_some_and(|tol| deviations.iter().any(|d| d.max > tol));
    Ok(CrossReport {
        scenario: s.name().into(),
        q: s.q,
        convention: s.convention(),
        form: s.form,
        mode: s.mode,
        times,
        series,
        deviations,
        diagnostics,
        tolerance_breached: breached,
    })
}

/// Runs every applicable engine and reports pairwise deviations plus
/// truncation diagnostics. Deviations are data, never errors.
pub fn cross_validate(scenario: &Scenario) -> Result<CrossReport, DynError> {
    match &scenario.kind {
        ScenarioKind::QOscillator(p) => oscillator(scenario, p),
        ScenarioKind::FreeParticle(p) => free_particle(scenario, p),
        ScenarioKind::SpinPrecession(p) => spin(scenario, p),
        ScenarioKind::PolyDynamics(p) => poly(scenario, p),
    }
}

/// Operator trajectory of the closed-form oscillator annihilator, for callers
/// that need matrices rather than expectation values.
pub fn closed_oscillator_path(rep: &FockRep, mass: f64, grid: &TimeGrid, mode: SolutionMode) -> Result<EvolutionResult, DynError> {
    let ops = grid
        .times()
        .into_iter()
        .map(|t| closed_oscillator(rep, mass, t, mode).map(|s| s.a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(closed_result(grid, ops))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: ScenarioKind, q: f64, t_end: f64, steps: usize) -> Scenario {
        Scenario {
            kind,
            q,
            hbar: 1.0,
            grid: TimeGrid::new(t_end, steps).unwrap(),
            form: EquationForm::Heisenberg,
            mode: SolutionMode::Default,
            engines: EngineSelection::All,
            state: InitialState::Coherent { alpha: 0.8 },
            tolerance: None,
        }
    }

    #[test]
    fn oscillator_engines_agree() {
        let s = base(ScenarioKind::QOscillator(OscillatorParams { n: 8, omega: 1.0, mass: 1.0 }), 1.3, 5.0, 1000);
        let r = cross_validate(&s).unwrap();
        for obs in ["a", "adag", "x", "p"] {
            assert!(r.deviation(obs, "closed", "ode").unwrap() < 1e-6, "{obs}");
            assert!(r.deviation(obs, "closed", "liouville").unwrap() < 1e-6, "{obs}");
        }
        assert!(r.deviation("a", "closed", "unitary").is_none());
        assert_eq!(r.series.len(), 4 * 3);
        assert!(r.diagnostic("fock_defect_boundary").unwrap() > 1.0);
    }

    #[test]
    fn oscillator_classical_has_unitary() {
        let s = base(ScenarioKind::QOscillator(OscillatorParams { n: 8, omega: 1.0, mass: 1.0 }), 1.0, 3.0, 600);
        let r = cross_validate(&s).unwrap();
        assert!(r.deviation("x", "closed", "unitary").unwrap() < 1e-8);
    }

    #[test]
    fn free_particle_reports_closed_form_gap() {
        let mut s = base(
            ScenarioKind::FreeParticle(FreeParticleParams { half_width: 4, p0: 1.0, mass: 1.0 }),
            1.5,
            1.0,
            400,
        );
        s.state = InitialState::Superposition { indices: vec![3, 4, 5] };
        let r = cross_validate(&s).unwrap();
        assert!(r.deviation("x", "ode", "unitary").unwrap() < 1e-8);
        assert!(r.deviation("x", "liouville", "unitary").unwrap() < 1e-8);
        assert!(r.deviation("x", "closed", "ode").unwrap() > 1e-3);
        assert!(r.diagnostic("closed_second_difference_max").unwrap() < 1e-12);
        let mut bad = s.clone();
        bad.q = 1.0;
        assert!(cross_validate(&bad).is_err());
    }

    #[test]
    fn coherent_state_rejected_on_lattice() {
        let s = base(ScenarioKind::FreeParticle(FreeParticleParams { half_width: 4, p0: 1.0, mass: 1.0 }), 1.5, 1.0, 10);
        assert!(cross_validate(&s).is_err());
    }

    #[test]
    fn basis_state_must_be_interior() {
        let mut s = base(ScenarioKind::QOscillator(OscillatorParams { n: 5, omega: 1.0, mass: 1.0 }), 1.1, 1.0, 10);
        s.state = InitialState::Basis { index: 4 };
        assert!(cross_validate(&s).is_err());
        s.state = InitialState::Basis { index: 3 };
        assert!(cross_validate(&s).is_ok());
    }

    #[test]
    fn spin_engines_agree() {
        let field = SpinField { b_field: 1.0, electron_mass: 1.0, light_speed: 1.0, charge: 1.0 };
        let p = SpinParams { field, lambda: 1.0, s0: [0.5, 0.0, 0.2] };
        let s = base(ScenarioKind::SpinPrecession(p), 1.0, 10.0, 2000);
        let r = cross_validate(&s).unwrap();
        for d in &r.deviations {
            assert!(d.max < 1e-8, "{d:?}");
        }
        assert!(r.diagnostic("ode_transverse_drift").unwrap() < 1e-10);
    }

    #[test]
    fn poly_scenario_series() {
        let p = PolyParams {
            b: 1.0,
            c: 2.0,
            lambda: 1.0,
            quad_steps: 16,
            terms: vec![AlphaTerm::constant(1, 0, 1.0), AlphaTerm::constant(0, 1, 1.0)],
        };
        let s = base(ScenarioKind::PolyDynamics(p), 1.2, 0.1, 10);
        let r = cross_validate(&s).unwrap();
        assert_eq!(r.series.len(), 4);
        assert_eq!(r.series[0].values[0], C64::new(1.0, 0.0));
    }
}
