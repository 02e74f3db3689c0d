//! Detuning and sweep grids.

use serde::Serialize;

use crate::closedform::{self, RegimeTag};
use crate::error::{Error, Result};
use crate::params::SystemParams;

pub const DEFAULT_POINTS: usize = 400;
pub const DEFAULT_REFINED_POINTS: usize = 200;

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(lo.is_finite() && hi.is_finite()) || (n > 1 && !(lo < hi)) {
        return Err(Error::InvalidGrid(format!("uniform grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + h * i as f64 }).collect())
}

/// Uniform grid on `[-half_span, half_span]` whose points are exact mirror
/// images of each other, so `-x` is on the grid bit-for-bit whenever `x` is.
pub fn symmetric(half_span: f64, n: usize) -> Result<Vec<f64>> {
    let full = uniform(-half_span, half_span, n)?;
    let mut g = full.clone();
    for i in 0..n / 2 {
        g[n - 1 - i] = -full[i];
    }
    if n % 2 == 1 {
        g[n / 2] = 0.0;
    }
    Ok(g)
}

/// `n` logarithmically spaced points from `lo` to `hi` (both positive).
pub fn logarithmic(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidGrid(format!("log grid needs 0 < lo < hi, got [{lo}, {hi}]")));
    }
    Ok(uniform(lo.ln(), hi.ln(), n)?.into_iter().map(f64::exp).collect())
}

/// Points clustered logarithmically around `centre`, from `1e-3·width` out
/// to `10·width` on each side.
pub fn refined_around(centre: f64, width: f64, n: usize) -> Result<Vec<f64>> {
    let side = logarithmic(1e-3 * width, 10.0 * width, n / 2)?;
    let mut g: Vec<f64> = side.iter().map(|d| centre - d).chain(side.iter().map(|d| centre + d)).collect();
    g.push(centre);
    Ok(g)
}

/// Sorted union with exact duplicates removed.
pub fn merge(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// How the default δ₂ grid was chosen; written to output metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_span: f64,
    pub points: usize,
    pub refined_centre: Option<f64>,
    pub refined_width: Option<f64>,
    pub refined_points: usize,
    pub total_points: usize,
}

/// Largest resonance scale of the resonant-pump closed form: the splitting
/// `λ₀` in the ATS regime, the widest `|λ|` otherwise.
pub fn resonance_scale(p: &SystemParams) -> f64 {
    let pair = closedform::lambdas(&p.delta1(0.0)).value;
    match pair.lambda0 {
        Some(l0) => l0,
        None => pair.lambda1.norm().max(pair.lambda2.norm()),
    }
}

/// Default probe-detuning grid: `DEFAULT_POINTS` uniform points over
/// `±3·max(resonance scale, Γ₁, ε₁)`, plus `DEFAULT_REFINED_POINTS`
/// clustered around the narrow two-photon resonance (at δ₂ = δ₁) in the
/// CIC regime.
pub fn default_delta2(p: &SystemParams) -> Result<(Vec<f64>, GridSpec)> {
    let scale = resonance_scale(p);
    let half_span = 3.0 * [scale, p.gamma1, p.eps1].into_iter().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let base = symmetric(half_span, DEFAULT_POINTS)?;
    let pair = closedform::lambdas(&p.delta1(0.0)).value;
    let mut spec = GridSpec {
        half_span,
        points: DEFAULT_POINTS,
        refined_centre: None,
        refined_width: None,
        refined_points: 0,
        total_points: base.len(),
    };
    if pair.regime.tag != RegimeTag::Cic {
        return Ok((base, spec));
    }
    let width = pair.lambda1.norm().min(pair.lambda2.norm());
    if !(width > 0.0) {
        return Ok((base, spec));
    }
    let fine = refined_around(p.delta1, width, DEFAULT_REFINED_POINTS)?;
    let g = merge(&base, &fine);
    spec.refined_centre = Some(p.delta1);
    spec.refined_width = Some(width);
    spec.refined_points = DEFAULT_REFINED_POINTS;
    spec.total_points = g.len();
    Ok((g, spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_endpoints() {
        let g = uniform(-1.0, 3.0, 5).unwrap();
        assert_eq!(g, vec![-1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(uniform(2.0, 2.0, 1).unwrap(), vec![2.0]);
        assert!(uniform(1.0, 0.0, 3).is_err());
        assert!(uniform(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn symmetric_is_mirror_exact() {
        for n in [4, 5, 400, 401] {
            let g = symmetric(7.3, n).unwrap();
            for i in 0..n {
                assert_eq!(g[i], -g[n - 1 - i]);
            }
            assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn log_grid() {
        let g = logarithmic(1e-3, 10.0, 5).unwrap();
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[4] - 10.0).abs() < 1e-12);
        assert!((g[1] / g[0] - 10.0).abs() < 1e-10);
        assert!(logarithmic(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn default_grid_refines_cic_only() {
        let (ats, spec) = default_delta2(&SystemParams::with_rabi(2.0, 0.005)).unwrap();
        assert_eq!(ats.len(), DEFAULT_POINTS);
        assert!(spec.refined_centre.is_none());
        let (cic, spec) = default_delta2(&SystemParams::with_rabi(0.8, 0.2)).unwrap();
        assert_eq!(spec.refined_centre, Some(0.0));
        assert!(cic.len() > DEFAULT_POINTS + 150);
        assert!(cic.windows(2).all(|w| w[0] < w[1]));
        for &x in &cic {
            assert!(cic.binary_search_by(|v| v.partial_cmp(&-x).unwrap()).is_ok());
        }
    }
}
