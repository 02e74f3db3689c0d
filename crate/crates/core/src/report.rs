//! Regime reports and the ATS/CIC border.

use serde::Serialize;

use crate::closedform::{self, ClosedFormWarning, LambdaPair, RegimeTag};
use crate::params::{self, LimitWarning, SystemParams, DEFAULT_LIMIT_FACTOR};
use crate::poleatlas::{self, PoleSet};

/// Relative tolerance, against the largest pole modulus, below which a real
/// part counts as zero when tagging from poles.
pub const POLE_RE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TagSource {
    ClosedForm,
    Poles,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub params: SystemParams,
    pub eps2_c: f64,
    pub eps2_c_strong: f64,
    pub regime: RegimeTag,
    pub tag_source: TagSource,
    /// Resonant-pump closed-form pair at the same Rabi frequencies.
    pub lambdas: LambdaPair,
    /// Exact poles at the requested δ₁; only computed when δ₁ ≠ 0.
    pub poles: Option<PoleSet>,
    pub limit_warnings: Vec<LimitWarning>,
    pub warnings: Vec<String>,
}

fn describe(w: &ClosedFormWarning) -> String {
    match w {
        ClosedFormWarning::UnexpectedRegime { expected, found } => {
            format!("closed form meant for {expected} evaluated in {found}")
        }
        ClosedFormWarning::WeakPump { eps1 } => {
            format!("strong-pump border law used at eps1 = {eps1} < 10 gamma1")
        }
        ClosedFormWarning::DegenerateCritical { b_squared } => {
            format!("b^2 = {b_squared:e} inside the critical band; lambda1 = lambda2")
        }
        ClosedFormWarning::CicRelationViolated { a_plus_b, a_minus_b } => {
            format!("a + b = {a_plus_b:e}, a - b = {a_minus_b:e}: expected both negative")
        }
    }
}

/// Tag from a pole set: CIC when every physical pole lies on the imaginary
/// axis, Critical when the two upper poles coincide there.
pub fn tag_from_poles(set: &PoleSet) -> RegimeTag {
    let scale = set.physical().map(|p| p.location.norm()).fold(0.0, f64::max);
    let tol = POLE_RE_TOL * scale.max(f64::MIN_POSITIVE);
    let up = set.upper();
    if up.len() == 2 && (up[0].location - up[1].location).norm() < tol {
        return RegimeTag::Critical;
    }
    if set.physical().all(|p| p.location.re.abs() < tol) {
        RegimeTag::Cic
    } else {
        RegimeTag::Ats
    }
}

/// Classify `p` and collect everything needed to judge the closed forms.
///
/// With a resonant pump the tag is the sign of `b²`. Otherwise the exact
/// poles of the resonant-pump problem at the same Rabi frequencies decide,
/// and the poles at the requested δ₁ are attached. Failures of the pole fit
/// are reported as warnings, never as errors.
pub fn regime_report(p: &SystemParams) -> RegimeReport {
    let resonant = p.delta1(0.0);
    let pair = closedform::lambdas(&resonant);
    let strong = closedform::critical_eps2_strong(&resonant);
    let mut warnings: Vec<String> = pair.warnings.iter().chain(strong.warnings.iter()).map(describe).collect();

    let mut regime = pair.value.regime.tag;
    let mut tag_source = TagSource::ClosedForm;
    let mut poles = None;
    if p.delta1 != 0.0 {
        match poleatlas::physical_poles(&resonant) {
            Ok(set) => {
                regime = tag_from_poles(&set);
                tag_source = TagSource::Poles;
            }
            Err(e) => warnings.push(format!("pole tagging failed, using closed form: {e}")),
        }
        match poleatlas::physical_poles(p) {
            Ok(set) => poles = Some(set),
            Err(e) => warnings.push(format!("poles at delta1 = {}: {e}", p.delta1)),
        }
    }

    RegimeReport {
        params: *p,
        eps2_c: closedform::critical_eps2(&resonant),
        eps2_c_strong: strong.value,
        regime,
        tag_source,
        lambdas: pair.value,
        poles,
        limit_warnings: params::check_limit_hierarchy(p, DEFAULT_LIMIT_FACTOR),
        warnings,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BorderPoint {
    pub eps1: f64,
    pub eps2_c: f64,
    pub eps2_c_strong: f64,
}

/// Critical clock Rabi frequency along a grid of pump Rabi frequencies.
pub fn border(p: &SystemParams, eps1_grid: &[f64]) -> Vec<BorderPoint> {
    eps1_grid
        .iter()
        .map(|&e1| {
            let q = p.eps1(e1).delta1(0.0);
            BorderPoint {
                eps1: e1,
                eps2_c: closedform::critical_eps2(&q),
                eps2_c_strong: closedform::critical_eps2_strong(&q).value,
            }
        })
        .collect()
}
