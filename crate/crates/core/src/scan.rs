//! Spectrum scans over the probe detuning.
//!
//! A [`SpectrumMethod`] evaluates the state at one detuning; methods are
//! registered by name in a [`MethodRegistry`] and selected at run time.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::closedform;
use crate::error::{Error, Result};
use crate::master;
use crate::params::SystemParams;
use crate::state::BlochState;

/// One scan point. `state` is absent for methods that only yield ρ₁₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub delta2: f64,
    pub rho11: f64,
    pub state: Option<BlochState>,
}

impl SpectrumRow {
    pub fn full(delta2: f64, state: BlochState) -> Self {
        SpectrumRow { delta2, rho11: state.rho11(), state: Some(state) }
    }

    pub fn population_only(delta2: f64, rho11: f64) -> Self {
        SpectrumRow { delta2, rho11, state: None }
    }

    /// `[ρ₁₁, ρ₂₂, ρ₃₃, Re ρ₁₂, Im ρ₁₂, Re ρ₁₃, Im ρ₁₃, Re ρ₂₃, Im ρ₂₃]`,
    /// with `None` for quantities the method does not provide.
    pub fn observables(&self) -> [Option<f64>; 9] {
        match &self.state {
            Some(s) => {
                let x = s.0;
                [
                    Some(x[0]),
                    Some(x[1]),
                    Some(s.rho33()),
                    Some(x[2]),
                    Some(x[3]),
                    Some(x[4]),
                    Some(x[5]),
                    Some(x[6]),
                    Some(x[7]),
                ]
            }
            None => {
                let mut out = [None; 9];
                out[0] = Some(self.rho11);
                out
            }
        }
    }
}

pub const OBSERVABLE_NAMES: [&str; 9] = [
    "rho11", "rho22", "rho33", "re_rho12", "im_rho12", "re_rho13", "im_rho13", "re_rho23", "im_rho23",
];

pub trait SpectrumMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Reject parameters the method cannot handle before any work is done.
    fn check(&self, _p: &SystemParams) -> Result<()> {
        Ok(())
    }

    fn sample(&self, p: &SystemParams, delta2: f64) -> Result<SpectrumRow>;
}

/// Direct steady-state solve of the full optical Bloch equations.
pub struct Numeric;

impl SpectrumMethod for Numeric {
    fn name(&self) -> &'static str {
        "numeric"
    }

    fn description(&self) -> &'static str {
        "steady state of the full optical Bloch equations (LU solve)"
    }

    fn sample(&self, p: &SystemParams, delta2: f64) -> Result<SpectrumRow> {
        let s = master::solve(&p.delta2(delta2))?;
        Ok(SpectrumRow::full(delta2, s))
    }
}

fn require_resonant_pump(p: &SystemParams) -> Result<()> {
    if p.delta1 != 0.0 {
        return Err(Error::WrongBranch { delta1: p.delta1 });
    }
    Ok(())
}

/// Closed-form population for a resonant pump.
pub struct ClosedForm;

impl SpectrumMethod for ClosedForm {
    fn name(&self) -> &'static str {
        "closedform"
    }

    fn description(&self) -> &'static str {
        "closed-form excited-state population, resonant pump only"
    }

    fn check(&self, p: &SystemParams) -> Result<()> {
        require_resonant_pump(p)
    }

    fn sample(&self, p: &SystemParams, delta2: f64) -> Result<SpectrumRow> {
        Ok(SpectrumRow::population_only(delta2, closedform::rho11_closed(p, delta2)?))
    }
}

/// Baseline plus coherence and depletion Lorentzians, for the CIC regime.
pub struct CicTerms;

impl SpectrumMethod for CicTerms {
    fn name(&self) -> &'static str {
        "cic-terms"
    }

    fn description(&self) -> &'static str {
        "three-Lorentzian decomposition for strong clock lasers, resonant pump only"
    }

    fn check(&self, p: &SystemParams) -> Result<()> {
        require_resonant_pump(p)
    }

    fn sample(&self, p: &SystemParams, delta2: f64) -> Result<SpectrumRow> {
        let d = closedform::cic_decomposition(p)?.value;
        Ok(SpectrumRow::population_only(delta2, d.total(delta2)))
    }
}

#[derive(Clone)]
pub struct MethodRegistry {
    methods: BTreeMap<&'static str, Arc<dyn SpectrumMethod>>,
}

impl MethodRegistry {
    pub fn empty() -> Self {
        MethodRegistry { methods: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Numeric));
        r.register(Arc::new(ClosedForm));
        r.register(Arc::new(CicTerms));
        r
    }

    /// Insert a method, replacing any previous one with the same name.
    pub fn register(&mut self, method: Arc<dyn SpectrumMethod>) {
        self.methods.insert(method.name(), method);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SpectrumMethod>> {
        self.methods.get(name).cloned().ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.methods.keys().copied()
    }
}

impl Default for MethodRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumScan {
    pub grid: Vec<f64>,
    pub rows: Vec<SpectrumRow>,
    pub method: String,
    pub params: SystemParams,
}

impl SpectrumScan {
    pub fn rho11(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.rho11).collect()
    }
}

/// Map `f` over `items` on `threads` workers (all available when `None`),
/// keeping input order.
pub fn parallel_map<T, U, F>(items: &[T], threads: Option<usize>, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    let run = || items.par_iter().map(&f).collect::<Vec<U>>();
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => items.iter().map(&f).collect(),
        },
        None => run(),
    }
}

/// Evaluate `method` at every point of `grid`.
///
/// The first failing grid point (in grid order) is reported.
pub fn scan(p: &SystemParams, grid: &[f64], method: &dyn SpectrumMethod, threads: Option<usize>) -> Result<SpectrumScan> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty detuning grid".into()));
    }
    method.check(p)?;
    let rows = parallel_map(grid, threads, |&d| method.sample(p, d))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumScan { grid: grid.to_vec(), rows, method: method.name().to_string(), params: *p })
}
