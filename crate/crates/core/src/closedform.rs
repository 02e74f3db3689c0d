//! Analytical results for a resonant pump (δ₁ = 0) in the limit
//! `Γ₁, ε₁ ≫ γ_l, ε₂ ≫ ν`.
//!
//! The excited-state population has the form
//!
//! ```text
//! ρ₁₁(δ₂) = ε₁²/S · [1 − W (δ₂² + Γ₁²) / ((δ₂² − λ₁²)(δ₂² − λ₂²))]
//! S = 2ε₁² + Γ₁²,   W = ε₁²ε₂²Γ₁ / (S ν),   λ₁,₂² = a ± b
//! ```
//!
//! The sign of `b²` separates the Autler-Townes regime (`b² < 0`, a pair of
//! split resonances of equal width) from the clock-laser-induced coherence
//! regime (`b² > 0`, two opposed Lorentzians at line centre).
//!
//! The population formula does not contain γ_l, whereas the resonance position
//! [`ats_position`] does; both are kept as derived.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Default half-width of the `Critical` band of `b²`.
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeTag {
    /// Autler-Townes splitting.
    Ats,
    /// Clock-laser-induced coherence.
    Cic,
    /// `b² ≈ 0`, on the border between the two.
    Critical,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RegimeTag::Ats => "ATS",
            RegimeTag::Cic => "CIC",
            RegimeTag::Critical => "Critical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub b_squared: f64,
}

impl Regime {
    pub fn classify(b_squared: f64, tol: f64) -> Regime {
        let tag = if b_squared < -tol {
            RegimeTag::Ats
        } else if b_squared > tol {
            RegimeTag::Cic
        } else {
            RegimeTag::Critical
        };
        Regime { tag, b_squared }
    }
}

/// Non-fatal notes attached to closed-form results whose preconditions are
/// only approximately met.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ClosedFormWarning {
    /// Result meant for one regime, evaluated in another.
    UnexpectedRegime { expected: RegimeTag, found: RegimeTag },
    /// The strong-pump border law used below ε₁ = 10 Γ₁.
    WeakPump { eps1: f64 },
    /// `|b²|` inside the critical tolerance: λ₁ and λ₂ coincide.
    DegenerateCritical { b_squared: f64 },
    /// `a ± b < 0` failed in the CIC regime.
    CicRelationViolated { a_plus_b: f64, a_minus_b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flagged<T> {
    pub value: T,
    pub warnings: Vec<ClosedFormWarning>,
}

impl<T> Flagged<T> {
    fn clean(value: T) -> Self {
        Flagged { value, warnings: Vec::new() }
    }
}

fn pump_sum(p: &SystemParams) -> f64 {
    2.0 * p.eps1 * p.eps1 + p.gamma1 * p.gamma1
}

/// `ε₁²ε₂²Γ₁`, the combination through which the clock laser enters.
fn clock_strength(p: &SystemParams) -> f64 {
    p.eps1 * p.eps1 * p.eps2 * p.eps2 * p.gamma1
}

/// `W = ε₁²ε₂²Γ₁ / ((2ε₁² + Γ₁²) ν)`.
pub fn clock_width_squared(p: &SystemParams) -> f64 {
    clock_strength(p) / (pump_sum(p) * p.nu)
}

/// Population of |1⟩ without the clock laser, `ε₁² / (2ε₁² + Γ₁²)`.
pub fn baseline(p: &SystemParams) -> f64 {
    p.eps1 * p.eps1 / pump_sum(p)
}

/// `η₁,₂ = 3(2ε₁² + Γ₁²) ± 2√(9ε₁⁴ + 10ε₁²Γ₁² + 2Γ₁⁴)`, with `η₁ ≥ η₂`.
pub fn eta_pair(p: &SystemParams) -> (f64, f64) {
    let e2 = p.eps1 * p.eps1;
    let g2 = p.gamma1 * p.gamma1;
    let root = (9.0 * e2 * e2 + 10.0 * e2 * g2 + 2.0 * g2 * g2).sqrt();
    let s = 3.0 * (2.0 * e2 + g2);
    (s + 2.0 * root, s - 2.0 * root)
}

/// `a` and the signed radicand `b²`.
pub fn ab(p: &SystemParams) -> (f64, f64) {
    let s = pump_sum(p);
    let k = clock_strength(p);
    let g4 = p.gamma1.powi(4);
    let e4 = p.eps1.powi(4);
    let denom = 2.0 * s * p.nu;
    let a = ((4.0 * e4 - g4) * p.nu - k) / denom;
    let (eta1, eta2) = eta_pair(p);
    let b_squared = (k - s * p.nu * eta1) * (k - s * p.nu * eta2) / (denom * denom);
    (a, b_squared)
}

/// `λ₁²λ₂² = a² − b² = 2W(ε₁² + Γ₁²) + ε₁⁴`, free of the cancellation in `a² − b²`.
pub fn lambda_product(p: &SystemParams) -> f64 {
    2.0 * clock_width_squared(p) * (p.eps1 * p.eps1 + p.gamma1 * p.gamma1) + p.eps1.powi(4)
}

/// The two zeros λ₁, λ₂ of the ρ₁₁(δ₂) denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaPair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub a: f64,
    pub b_squared: f64,
    pub regime: Regime,
    /// `Re λ₁` in the ATS regime (line position).
    pub lambda0: Option<f64>,
    /// `Im λ₁` in the ATS regime (common half-width).
    pub gamma0: Option<f64>,
}

impl LambdaPair {
    /// `(δ₂² − λ₁²)(δ₂² − λ₂²)`, real for real δ₂.
    pub fn denominator(&self, delta2: f64) -> f64 {
        let d2 = Complex64::new(delta2 * delta2, 0.0);
        ((d2 - self.lambda1 * self.lambda1) * (d2 - self.lambda2 * self.lambda2)).re
    }

    /// All four zeros of the quartic denominator, `±λ₁, ±λ₂`.
    pub fn quartic_roots(&self) -> [Complex64; 4] {
        [self.lambda1, -self.lambda1, self.lambda2, -self.lambda2]
    }
}

/// Square-root branch with non-negative real part, and non-negative
/// imaginary part on the negative real axis.
fn canonical_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re == 0.0 && r.im < 0.0 {
        -r
    } else {
        r
    }
}

pub fn lambdas(p: &SystemParams) -> Flagged<LambdaPair> {
    lambdas_with_tol(p, DEFAULT_CRITICAL_TOL)
}

pub fn lambdas_with_tol(p: &SystemParams, tol: f64) -> Flagged<LambdaPair> {
    let (a, b_squared) = ab(p);
    let regime = Regime::classify(b_squared, tol);
    let mut warnings = Vec::new();
    let (lambda1, lambda2, lambda0, gamma0) = match regime.tag {
        RegimeTag::Ats => {
            let l1 = canonical_sqrt(Complex64::new(a, (-b_squared).sqrt()));
            (l1, l1.conj(), Some(l1.re), Some(l1.im))
        }
        RegimeTag::Cic => {
            let b = b_squared.sqrt();
            let product = lambda_product(p);
            // the two roots a ± b share a sign; recover the small one from the product
            let (plus, minus) = if a < 0.0 {
                (product / (a - b), a - b)
            } else {
                (a + b, product / (a + b))
            };
            if !(plus < 0.0 && minus < 0.0) {
                warnings.push(ClosedFormWarning::CicRelationViolated { a_plus_b: plus, a_minus_b: minus });
            }
            let l1 = canonical_sqrt(Complex64::new(plus, 0.0));
            let l2 = canonical_sqrt(Complex64::new(minus, 0.0));
            (l1, l2, None, None)
        }
        RegimeTag::Critical => {
            warnings.push(ClosedFormWarning::DegenerateCritical { b_squared });
            let l = canonical_sqrt(Complex64::new(a, 0.0));
            (l, l, None, None)
        }
    };
    Flagged {
        value: LambdaPair { lambda1, lambda2, a, b_squared, regime, lambda0, gamma0 },
        warnings,
    }
}

fn require_resonant_pump(p: &SystemParams) -> Result<()> {
    if p.delta1 != 0.0 {
        return Err(Error::WrongBranch { delta1: p.delta1 });
    }
    Ok(())
}

fn rho11_from_denominator(p: &SystemParams, delta2: f64, denominator: f64) -> f64 {
    let d2 = delta2 * delta2;
    let g2 = p.gamma1 * p.gamma1;
    baseline(p) * (1.0 - clock_width_squared(p) * (d2 + g2) / denominator)
}

/// Closed-form excited-state population at probe detuning `delta2`.
///
/// Independent of γ_l. Requires δ₁ = 0.
pub fn rho11_closed(p: &SystemParams, delta2: f64) -> Result<f64> {
    require_resonant_pump(p)?;
    let pair = lambdas(p).value;
    Ok(rho11_from_denominator(p, delta2, pair.denominator(delta2)))
}

/// Same population written as two equal-width Lorentzians at `±λ₀`.
pub fn rho11_ats_form(p: &SystemParams, delta2: f64) -> Result<f64> {
    require_resonant_pump(p)?;
    let pair = lambdas(p).value;
    let (l0, g0) = match (pair.lambda0, pair.gamma0) {
        (Some(l0), Some(g0)) => (l0, g0),
        _ => {
            return Err(Error::InvalidGrid(format!(
                "two-Lorentzian ATS form needs the ATS regime, found {}",
                pair.regime.tag
            )))
        }
    };
    let g2 = g0 * g0;
    let den = ((delta2 - l0).powi(2) + g2) * ((delta2 + l0).powi(2) + g2);
    Ok(rho11_from_denominator(p, delta2, den))
}

/// Same population written with the two CIC widths `|λ₁|`, `|λ₂|` at line centre.
pub fn rho11_cic_form(p: &SystemParams, delta2: f64) -> Result<f64> {
    require_resonant_pump(p)?;
    let pair = lambdas(p).value;
    if pair.regime.tag != RegimeTag::Cic {
        return Err(Error::InvalidGrid(format!(
            "line-centre CIC form needs the CIC regime, found {}",
            pair.regime.tag
        )));
    }
    let d2 = delta2 * delta2;
    let den = (d2 + pair.lambda1.norm_sqr()) * (d2 + pair.lambda2.norm_sqr());
    Ok(rho11_from_denominator(p, delta2, den))
}

/// Approximate position `λ₀` of the Autler-Townes resonances:
///
/// ```text
/// λ₀ = ε₁ √( √(1 + 2(Γ₁/ε₁)² + (ε₂/ε₁)² Γ₁/ν) − γ_l/Γ₁ − (Γ₁/ε₁)² )
/// ```
pub fn ats_position(p: &SystemParams) -> Result<Flagged<f64>> {
    require_resonant_pump(p)?;
    let q = p.gamma1 / p.eps1;
    let r = p.eps2 / p.eps1;
    let inner = (1.0 + 2.0 * q * q + r * r * p.gamma1 / p.nu).sqrt();
    let radicand = inner - p.gamma_l / p.gamma1 - q * q;
    if !(radicand >= 0.0) {
        return Err(Error::NegativeRadicand { radicand });
    }
    let mut out = Flagged::clean(p.eps1 * radicand.sqrt());
    let found = lambdas(p).value.regime.tag;
    if found != RegimeTag::Ats {
        out.warnings.push(ClosedFormWarning::UnexpectedRegime { expected: RegimeTag::Ats, found });
    }
    Ok(out)
}

/// Critical clock Rabi frequency ε₂ᶜ where `b² = 0` (upper root of `b²`).
///
/// Infinite for ε₁ = 0, where no splitting develops.
pub fn critical_eps2(p: &SystemParams) -> f64 {
    if p.eps1 <= 0.0 {
        return f64::INFINITY;
    }
    let q2 = (p.gamma1 / p.eps1).powi(2);
    let inner = 9.0 + 10.0 * q2 + 2.0 * q2 * q2;
    p.eps1 * ((2.0 + q2) * (6.0 + 3.0 * q2 + 2.0 * inner.sqrt()) * p.nu / p.gamma1).sqrt()
}

/// Strong-pump border law `ε₂ᶜ = ε₁ √24 √(ν/Γ₁)`.
pub fn critical_eps2_strong(p: &SystemParams) -> Flagged<f64> {
    let mut out = Flagged::clean(p.eps1 * 24f64.sqrt() * (p.nu / p.gamma1).sqrt());
    if p.eps1 < 10.0 * p.gamma1 {
        out.warnings.push(ClosedFormWarning::WeakPump { eps1: p.eps1 });
    }
    out
}

/// Three-term form of ρ₁₁ for the CIC regime:
///
/// ```text
/// ρ₁₁ ≈ ε₁²/S + ε₁²/(δ₂² + 2(ε₁² + Γ₁²)) − ε₁⁴ε₂²Γ₁ / (S² ν (δ₂² + W))
/// ```
///
/// The middle term is the positive coherence resonance whose width is set
/// by the pump; the last is the negative depletion Lorentzian whose width
/// `√W` grows linearly with ε₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CicDecomposition {
    pub baseline: f64,
    pub coherence_amplitude: f64,
    /// Half-width at half-maximum of the coherence term, `√(2(ε₁² + Γ₁²))`.
    pub coherence_width: f64,
    pub depletion_amplitude: f64,
    /// Half-width at half-maximum of the depletion term, `√W`.
    pub depletion_width: f64,
    /// `√6 ε₂/ε₂ᶜ`, the strong-pump estimate of the width ratio.
    pub predicted_width_ratio: f64,
}

impl CicDecomposition {
    pub fn coherence_peak(&self, delta2: f64) -> f64 {
        self.coherence_amplitude / (delta2 * delta2 + self.coherence_width * self.coherence_width)
    }

    /// Negative for every δ₂.
    pub fn depletion_dip(&self, delta2: f64) -> f64 {
        -self.depletion_amplitude / (delta2 * delta2 + self.depletion_width * self.depletion_width)
    }

    pub fn total(&self, delta2: f64) -> f64 {
        self.baseline + self.coherence_peak(delta2) + self.depletion_dip(delta2)
    }

    /// Depletion width over coherence width.
    pub fn width_ratio(&self) -> f64 {
        self.depletion_width / self.coherence_width
    }
}

pub fn cic_decomposition(p: &SystemParams) -> Result<Flagged<CicDecomposition>> {
    require_resonant_pump(p)?;
    let s = pump_sum(p);
    let e2 = p.eps1 * p.eps1;
    let w = clock_width_squared(p);
    let value = CicDecomposition {
        baseline: baseline(p),
        coherence_amplitude: e2,
        coherence_width: (2.0 * (e2 + p.gamma1 * p.gamma1)).sqrt(),
        depletion_amplitude: e2 * e2 * p.eps2 * p.eps2 * p.gamma1 / (s * s * p.nu),
        depletion_width: w.sqrt(),
        predicted_width_ratio: 6f64.sqrt() * p.eps2 / critical_eps2(p),
    };
    let mut out = Flagged::clean(value);
    let found = lambdas(p).value.regime.tag;
    if found != RegimeTag::Cic {
        out.warnings.push(ClosedFormWarning::UnexpectedRegime { expected: RegimeTag::Cic, found });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(eps1: f64, eps2: f64, nu: f64) -> SystemParams {
        SystemParams::with_rabi(eps1, eps2).nu(nu)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn eta_unit_pump() {
        let (e1, e2) = eta_pair(&p(1.0, 0.0, 1e-5));
        let r21 = 21f64.sqrt();
        assert!((e1 - (9.0 + 2.0 * r21)).abs() < 1e-13);
        assert!((e2 - (9.0 - 2.0 * r21)).abs() < 1e-13);
        assert!((e1 - 18.1652).abs() < 1e-4);
        assert!((e2 + 0.1652).abs() < 1e-4);
        assert!((e1 * e2 + 3.0).abs() < 1e-12);
    }

    #[test]
    fn eta_without_pump() {
        let (e1, e2) = eta_pair(&p(0.0, 0.0, 1e-5));
        assert!((e1 - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!((e2 - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn eta_vanishing_decay() {
        let q = SystemParams { gamma1: 1e-9, ..p(1.0, 0.0, 1e-5) };
        let (e1, e2) = eta_pair(&q);
        assert!((e1 - 12.0).abs() < 1e-9);
        assert!(e2.abs() < 1e-9);
    }

    #[test]
    fn b_squared_without_clock_laser() {
        // ε₂ = 0: b² = η₁η₂/4 exactly; at ε₁ = 2 that is (1 − 16)/4
        let q = p(2.0, 0.0, 1e-5);
        let (a, b2) = ab(&q);
        assert!((b2 + 15.0 / 4.0).abs() < 1e-12);
        assert!((a - (64.0 - 1.0) / (2.0 * 9.0)).abs() < 1e-12);
        assert_eq!(lambdas(&q).value.regime.tag, RegimeTag::Ats);
    }

    #[test]
    fn product_identity() {
        for (e1, e2, nu) in [(2.0, 0.01, 1e-5), (0.3, 0.2, 1e-4), (10.0, 1.0, 2.28e-6)] {
            let q = p(e1, e2, nu);
            let (a, b2) = ab(&q);
            assert!(rel(a * a - b2, lambda_product(&q)) < 1e-9);
        }
    }

    #[test]
    fn cic_above_critical() {
        let q = p(2.0, 0.0, 1e-5);
        let c = critical_eps2(&q);
        assert!((c - 0.034946).abs() < 1e-6, "{c}");
        let (_, b2) = ab(&q.eps2(10.0 * c));
        assert!(b2 > 0.0);
        let pair = lambdas(&q.eps2(0.1)).value;
        assert_eq!(pair.regime.tag, RegimeTag::Cic);
        assert!(pair.lambda1.re.abs() < 1e-12 && pair.lambda2.re.abs() < 1e-12);
        assert!(pair.lambda1.im > 0.0 && pair.lambda2.im > pair.lambda1.im);
    }

    #[test]
    fn ats_pair_is_conjugate() {
        let pair = lambdas(&p(2.0, 0.01, 1e-5)).value;
        assert_eq!(pair.regime.tag, RegimeTag::Ats);
        assert_eq!(pair.lambda1, pair.lambda2.conj());
        assert!(pair.lambda0.unwrap() > 0.0 && pair.gamma0.unwrap() > 0.0);
    }

    #[test]
    fn critical_tag_within_tolerance() {
        let pair = lambdas_with_tol(&p(2.0, 0.01, 1e-5), 1e9).value;
        assert_eq!(pair.regime.tag, RegimeTag::Critical);
        assert_eq!(pair.lambda1, pair.lambda2);
    }

    #[test]
    fn weak_clock_limit_is_two_level() {
        let q = p(2.0, 1e-9, 1e-5);
        for d in [-5.0, 0.0, 0.3, 7.0] {
            assert!(rel(rho11_closed(&q, d).unwrap(), 4.0 / 9.0) < 1e-9);
        }
        let q = p(2.0, 0.05, 1e-5);
        assert!(rel(rho11_closed(&q, 1e6).unwrap(), 4.0 / 9.0) < 1e-6);
    }

    #[test]
    fn rho11_requires_resonant_pump() {
        assert!(matches!(
            rho11_closed(&p(2.0, 0.01, 1e-5).delta1(0.5), 0.0),
            Err(Error::WrongBranch { .. })
        ));
    }

    #[test]
    fn rho11_ignores_linewidth() {
        let q = p(2.0, 0.03, 2.28e-6);
        for d in [-3.0, -0.1, 0.0, 2.0] {
            let a = rho11_closed(&q.gamma_l(0.0), d).unwrap();
            let b = rho11_closed(&q.gamma_l(1e-2), d).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn ats_position_strong_pump() {
        let q = p(1000.0, 0.0, 1e-5).gamma_l(0.0);
        assert!(rel(ats_position(&q).unwrap().value, 1000.0) < 1e-6);
    }

    #[test]
    fn ats_position_indium() {
        // (ε₂/ε₁)² Γ₁/ν = 1e-8 / 2.28e-6
        let q = p(10.0, 1e-3, 2.28e-6).gamma_l(0.0);
        let expected = 10.0 * ((1.0 + 0.02 + 1e-8 / 2.28e-6f64).sqrt() - 0.01f64).sqrt();
        let got = ats_position(&q).unwrap();
        assert!(rel(got.value, expected) < 1e-14);
        assert!((got.value - 10.0106).abs() < 1e-4);
        assert!(got.warnings.is_empty());
    }

    #[test]
    fn ats_position_negative_radicand() {
        let q = p(0.1, 0.0, 1e-5).gamma_l(0.5);
        assert!(matches!(ats_position(&q), Err(Error::NegativeRadicand { .. })));
    }

    #[test]
    fn ats_position_warns_in_cic() {
        let out = ats_position(&p(2.0, 0.5, 1e-5)).unwrap();
        assert!(matches!(out.warnings[0], ClosedFormWarning::UnexpectedRegime { .. }));
    }

    #[test]
    fn strong_border_law() {
        let q = p(100.0, 0.0, 1e-5);
        let s = critical_eps2_strong(&q);
        assert!((s.value - 1.549).abs() < 1e-3);
        assert!(s.warnings.is_empty());
        assert_eq!(critical_eps2_strong(&q.eps1(200.0)).value, 2.0 * s.value);
        assert!(rel(critical_eps2(&q), s.value) < 0.01);
        let q = p(1000.0, 0.0, 1e-5);
        assert!(rel(critical_eps2(&q), critical_eps2_strong(&q).value) < 1e-3);
        assert!(!critical_eps2_strong(&p(2.0, 0.0, 1e-5)).warnings.is_empty());
    }

    #[test]
    fn border_scales_as_root_nu() {
        let a = critical_eps2(&p(2.0, 0.0, 1e-5));
        let b = critical_eps2(&p(2.0, 0.0, 4e-5));
        assert!((b / a - 2.0).abs() < 1e-12);
        assert_eq!(critical_eps2(&p(0.0, 0.0, 1e-5)), f64::INFINITY);
    }

    #[test]
    fn cic_terms() {
        let q = p(2.0, 0.3, 1e-5);
        let d = cic_decomposition(&q).unwrap();
        assert!(d.warnings.is_empty());
        let d = d.value;
        assert_eq!(d.baseline, 4.0 / 9.0);
        for x in [-50.0, -1.0, 0.0, 3.0, 1e3] {
            assert!(d.coherence_peak(x) > 0.0);
            assert!(d.depletion_dip(x) < 0.0);
        }
        let wide = cic_decomposition(&q.eps2(0.6)).unwrap().value;
        assert!(rel(wide.depletion_width, 2.0 * d.depletion_width) < 1e-15);
        assert_eq!(wide.coherence_width, d.coherence_width);
    }

    #[test]
    fn cic_sum_at_line_centre() {
        for e1 in [5.0, 10.0] {
            for f in [3.0, 5.0, 20.0] {
                let q = p(e1, 0.0, 2.28e-6);
                let q = q.eps2(f * critical_eps2(&q));
                let d = cic_decomposition(&q).unwrap().value;
                assert!(rel(d.total(0.0), rho11_closed(&q, 0.0).unwrap()) < 0.01);
            }
        }
    }
}
