//! Model parameters and the weak-probe limit hierarchy.
//!
//! Every rate, Rabi frequency and detuning is measured in units of the
//! half-decay-rate Γ₁ of the fast upper level. [`SystemParams::normalize`]
//! brings raw values (for example in Hz) into that convention.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-decay-rate of the metastable level for In⁺ (0.41 Hz / 180 kHz).
pub const INDIUM_NU: f64 = 2.28e-6;
/// Default clock-laser linewidth.
pub const DEFAULT_GAMMA_L: f64 = 1e-4;
/// Ratio that operationalizes "much greater than" for limit warnings.
pub const DEFAULT_LIMIT_FACTOR: f64 = 10.0;

/// Parameters of the driven V-system.
///
/// Level |3⟩ is the ground state, |1⟩ the short-lived upper level of the
/// cooling transition and |2⟩ the metastable upper level of the clock
/// transition. Only detunings appear; absolute frequencies drop out in the
/// rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Half-decay-rate of |1⟩.
    pub gamma1: f64,
    /// Half-decay-rate of |2⟩.
    pub nu: f64,
    /// Clock-laser linewidth.
    pub gamma_l: f64,
    /// Rabi frequency on |3⟩–|1⟩.
    pub eps1: f64,
    /// Rabi frequency on |3⟩–|2⟩.
    pub eps2: f64,
    /// Pump detuning ω_l1 − ω₁.
    pub delta1: f64,
    /// Probe detuning ω_l2 − ω₂.
    pub delta2: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            gamma1: 1.0,
            nu: INDIUM_NU,
            gamma_l: DEFAULT_GAMMA_L,
            eps1: 0.0,
            eps2: 0.0,
            delta1: 0.0,
            delta2: 0.0,
        }
    }
}

impl SystemParams {
    /// In⁺-like defaults with the given Rabi frequencies, both lasers on resonance.
    pub fn with_rabi(eps1: f64, eps2: f64) -> Self {
        SystemParams { eps1, eps2, ..Default::default() }
    }

    pub fn eps1(mut self, v: f64) -> Self {
        self.eps1 = v;
        self
    }

    pub fn eps2(mut self, v: f64) -> Self {
        self.eps2 = v;
        self
    }

    pub fn nu(mut self, v: f64) -> Self {
        self.nu = v;
        self
    }

    pub fn gamma_l(mut self, v: f64) -> Self {
        self.gamma_l = v;
        self
    }

    pub fn delta1(mut self, v: f64) -> Self {
        self.delta1 = v;
        self
    }

    pub fn delta2(mut self, v: f64) -> Self {
        self.delta2 = v;
        self
    }

    /// Rescale every field by `gamma1` so that the result has `gamma1 == 1`.
    ///
    /// Idempotent bit-for-bit, since dividing by exactly 1.0 is exact.
    pub fn normalize(&self) -> Result<SystemParams> {
        if !(self.gamma1 > 0.0) {
            return Err(Error::NonPositiveRate { name: "gamma1", value: self.gamma1 });
        }
        if !(self.nu > 0.0) {
            return Err(Error::NonPositiveRate { name: "nu", value: self.nu });
        }
        for (name, value) in [("gamma_l", self.gamma_l), ("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(value >= 0.0) {
                return Err(Error::NegativeParameter { name, value });
            }
        }
        let s = self.gamma1;
        Ok(SystemParams {
            gamma1: 1.0,
            nu: self.nu / s,
            gamma_l: self.gamma_l / s,
            eps1: self.eps1 / s,
            eps2: self.eps2 / s,
            delta1: self.delta1 / s,
            delta2: self.delta2 / s,
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.gamma1 == 1.0
    }
}

/// A quantity taking part in the limit hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    Gamma1,
    Eps1,
    GammaL,
    Eps2,
    Nu,
}

impl Quantity {
    fn value(self, p: &SystemParams) -> f64 {
        match self {
            Quantity::Gamma1 => p.gamma1,
            Quantity::Eps1 => p.eps1,
            Quantity::GammaL => p.gamma_l,
            Quantity::Eps2 => p.eps2,
            Quantity::Nu => p.nu,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Gamma1 => "gamma1",
            Quantity::Eps1 => "eps1",
            Quantity::GammaL => "gamma_l",
            Quantity::Eps2 => "eps2",
            Quantity::Nu => "nu",
        })
    }
}

/// One violated `larger ≫ smaller` clause.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitWarning {
    pub larger: Quantity,
    pub smaller: Quantity,
    pub ratio: f64,
    pub factor: f64,
}

impl fmt::Display for LimitWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} >> {} violated: ratio {:.4} < {}",
            self.larger, self.smaller, self.ratio, self.factor
        )
    }
}

const CLAUSES: [(Quantity, Quantity); 6] = [
    (Quantity::Gamma1, Quantity::GammaL),
    (Quantity::Gamma1, Quantity::Eps2),
    (Quantity::Eps1, Quantity::GammaL),
    (Quantity::Eps1, Quantity::Eps2),
    (Quantity::GammaL, Quantity::Nu),
    (Quantity::Eps2, Quantity::Nu),
];

/// Check `Γ₁, ε₁ ≫ γ_l, ε₂ ≫ ν` clause by clause at the given ratio.
///
/// A middle-tier quantity (γ_l or ε₂) that is exactly zero is absent from
/// the model and its `≫ ν` clause is skipped. Never fails: the numeric
/// solver is valid everywhere, only the closed forms degrade.
pub fn check_limit_hierarchy(p: &SystemParams, factor: f64) -> Vec<LimitWarning> {
    CLAUSES
        .iter()
        .filter_map(|&(larger, smaller)| {
            let big = larger.value(p);
            let small = smaller.value(p);
            if smaller == Quantity::Nu && big == 0.0 {
                return None;
            }
            let ratio = if small == 0.0 { f64::INFINITY } else { big / small };
            (ratio < factor).then_some(LimitWarning { larger, smaller, ratio, factor })
        })
        .collect()
}

/// Smallest ratio over all active clauses; `check_limit_hierarchy(p, f)` is
/// empty exactly when this is at least `f`.
pub fn hierarchy_margin(p: &SystemParams) -> f64 {
    CLAUSES
        .iter()
        .filter_map(|&(larger, smaller)| {
            let big = larger.value(p);
            let small = smaller.value(p);
            if smaller == Quantity::Nu && big == 0.0 {
                return None;
            }
            Some(if small == 0.0 { f64::INFINITY } else { big / small })
        })
        .fold(f64::INFINITY, f64::min)
}

/// Flat JSON parameter file.
///
/// `gamma1_hz` switches every other key to Hz; otherwise values are in
/// units of Γ₁ (with `gamma1` optionally given, defaulting to 1). Missing
/// keys take the In⁺-like defaults in Γ₁ units.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
}

impl ParamFile {
    pub fn from_json(text: &str) -> Result<ParamFile> {
        serde_json::from_str(text).map_err(|e| Error::ParamFile(e.to_string()))
    }

    pub fn read(path: &std::path::Path) -> Result<ParamFile> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Raw parameters as written in the file, with `gamma1` set to the scale.
    pub fn to_raw(&self) -> Result<SystemParams> {
        let scale = match (self.gamma1_hz, self.gamma1) {
            (Some(_), Some(_)) => {
                return Err(Error::ParamFile("give either gamma1_hz or gamma1, not both".into()))
            }
            (Some(hz), None) => hz,
            (None, Some(g)) => g,
            (None, None) => 1.0,
        };
        let d = SystemParams::default();
        Ok(SystemParams {
            gamma1: scale,
            nu: self.nu.unwrap_or(d.nu * scale),
            gamma_l: self.gamma_l.unwrap_or(d.gamma_l * scale),
            eps1: self.eps1.unwrap_or(d.eps1 * scale),
            eps2: self.eps2.unwrap_or(d.eps2 * scale),
            delta1: self.delta1.unwrap_or(d.delta1 * scale),
            delta2: self.delta2.unwrap_or(d.delta2 * scale),
        })
    }

    pub fn to_params(&self) -> Result<SystemParams> {
        self.to_raw()?.normalize()
    }
}
