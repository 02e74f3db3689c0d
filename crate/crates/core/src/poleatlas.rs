//! Poles of ρ₁₁(δ₂) for arbitrary pump detuning.
//!
//! `det A(δ₂)` is a quartic in δ₂ because δ₂ enters four rows of the
//! generator affinely. Its coefficients are recovered by interpolation at
//! five Chebyshev nodes, its zeros by a companion-matrix eigenvalue solve, and
//! the weight of each zero by a contour integral of the Cramer ratio
//! `ρ₁₁ = det A₁(δ₂) / det A(δ₂)` around it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::master::{complex_generator, ComplexMatrix8};
use crate::params::SystemParams;
use crate::poly;
use crate::state::RHO11;

/// Held-out relative error above which the determinant fit is rejected.
pub const FIT_TOLERANCE: f64 = 1e-8;
/// Relative residue below which a zero is treated as cancelled by the numerator.
pub const DEFAULT_CANCEL_THRESHOLD: f64 = 1e-10;
/// Quadrature points on the residue contour.
const CONTOUR_POINTS: usize = 64;

fn det(m: ComplexMatrix8) -> Complex64 {
    m.lu().determinant()
}

fn generator_det(p: &SystemParams, delta2: Complex64) -> Complex64 {
    det(complex_generator(p, delta2).0)
}

/// Cramer numerator for ρ₁₁: `A` with its ρ₁₁ column replaced by `−c`.
fn numerator_det(p: &SystemParams, delta2: Complex64) -> Complex64 {
    let (mut m, c) = complex_generator(p, delta2);
    m.set_column(RHO11, &(-c));
    det(m)
}

/// Quartic `det A(δ₂)` in monic form plus the leading coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenominatorPoly {
    /// Ascending, `coeffs[4] == 1`.
    pub coeffs: [f64; 5],
    pub leading: f64,
    pub half_span: f64,
}

impl DenominatorPoly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        poly::eval_complex(&self.coeffs, z) * self.leading
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Half-width of the interpolation interval, `max(10, 3ε₁)` in units of Γ₁.
pub fn node_half_span(p: &SystemParams) -> f64 {
    (10.0 * p.gamma1).max(3.0 * p.eps1)
}

pub fn denominator_poly(p: &SystemParams) -> Result<DenominatorPoly> {
    let half_span = node_half_span(p);
    let nodes = poly::chebyshev_nodes(5, half_span);
    let values: Vec<f64> = nodes.iter().map(|&x| generator_det(p, Complex64::new(x, 0.0)).re).collect();
    let raw = poly::interpolate(&nodes, &values, half_span)
        .ok_or(Error::IllConditionedFit { relative_error: f64::INFINITY })?;

    let held_out = 0.3711 * half_span;
    let expected = generator_det(p, Complex64::new(held_out, 0.0)).re;
    let scale = values.iter().fold(expected.abs(), |m, v| m.max(v.abs()));
    let relative_error = (poly::eval(&raw, held_out) - expected).abs() / scale;
    if !(relative_error <= FIT_TOLERANCE) || raw[4] == 0.0 {
        return Err(Error::IllConditionedFit { relative_error });
    }
    let m = poly::monic(&raw);
    Ok(DenominatorPoly { coeffs: [m[0], m[1], m[2], m[3], m[4]], leading: raw[4], half_span })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    /// Location in the complex δ₂ plane.
    pub location: Complex64,
    pub residue: Complex64,
    /// Zero of the determinant that the numerator cancels.
    pub cancelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleSet {
    /// Parameter value of the sweep point, when part of a sweep.
    pub sweep_value: Option<f64>,
    pub poles: Vec<Pole>,
    pub denom_coeffs: [f64; 5],
}

impl PoleSet {
    pub fn physical(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(|p| !p.cancelled)
    }

    /// Physical poles in the upper half plane, narrowest first.
    ///
    /// Poles of the real spectrum come in conjugate pairs; these are the two
    /// representatives plotted as λ₁, λ₂.
    pub fn upper(&self) -> Vec<Pole> {
        let mut up: Vec<Pole> = self.physical().filter(|p| p.location.im > 0.0).copied().collect();
        up.sort_by(|a, b| a.location.im.total_cmp(&b.location.im).then(a.location.re.total_cmp(&b.location.re)));
        up
    }

    /// The pole with the smallest positive imaginary part.
    pub fn narrow(&self) -> Option<Pole> {
        self.upper().first().copied()
    }

    /// The pole with the largest positive imaginary part.
    pub fn broad(&self) -> Option<Pole> {
        self.upper().last().copied()
    }
}

/// `(1/2πi) ∮ f dz` on a circle of radius `r` around `z0`.
fn contour_residue(f: impl Fn(Complex64) -> Complex64, z0: Complex64, r: f64) -> Complex64 {
    let sum: Complex64 = (0..CONTOUR_POINTS)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / CONTOUR_POINTS as f64;
            let dz = Complex64::from_polar(r, theta);
            f(z0 + dz) * dz
        })
        .sum();
    sum / CONTOUR_POINTS as f64
}

pub fn physical_poles(p: &SystemParams) -> Result<PoleSet> {
    physical_poles_with_threshold(p, DEFAULT_CANCEL_THRESHOLD)
}

pub fn physical_poles_with_threshold(p: &SystemParams, threshold: f64) -> Result<PoleSet> {
    let den = denominator_poly(p)?;
    let mut locations = poly::roots(&den.coeffs).ok_or(Error::RootsNotConverged)?;
    locations.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let rho11 = |z: Complex64| numerator_det(p, z) / den.eval(z);
    let amplitude = poly::chebyshev_nodes(5, den.half_span)
        .into_iter()
        .chain(locations.iter().map(|z| z.re))
        .map(|x| rho11(Complex64::new(x, 0.0)).norm())
        .fold(0.0, f64::max);

    let poles = locations
        .into_iter()
        .map(|z| {
            let residue = contour_residue(rho11, z, 1e-3 * z.norm() + 1e-6);
            Pole { location: z, residue, cancelled: residue.norm() < threshold * amplitude }
        })
        .collect();
    Ok(PoleSet { sweep_value: None, poles, denom_coeffs: den.coeffs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    Eps2,
    Delta1,
}

impl SweepVariable {
    pub fn apply(self, p: &SystemParams, value: f64) -> SystemParams {
        match self {
            SweepVariable::Eps2 => p.eps2(value),
            SweepVariable::Delta1 => p.delta1(value),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Eps2 => "eps2",
            SweepVariable::Delta1 => "delta1",
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps2" => Ok(SweepVariable::Eps2),
            "delta1" => Ok(SweepVariable::Delta1),
            other => Err(Error::InvalidGrid(format!("cannot sweep `{other}`; use eps2 or delta1"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TrackWarning {
    /// Poles moved far more than the neighbouring steps suggest; the grid
    /// probably misses a crossing.
    TrajectoryJump { index: usize, displacement: f64, expected: f64 },
    /// Two assignments are nearly equally good, as at a collision of poles;
    /// labels may exchange here.
    AmbiguousPairing { index: usize, best: f64, runner_up: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectories {
    pub variable: SweepVariable,
    /// Pole sets in grid order; pole `k` of every set belongs to trajectory `k`.
    pub sets: Vec<PoleSet>,
    pub warnings: Vec<TrackWarning>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut perm = rest.clone();
            perm.insert(pos, n - 1);
            out.push(perm);
        }
    }
    out
}

/// Pole sets along a sweep, reordered into continuous trajectories by the
/// assignment of minimal total displacement between neighbouring points.
pub fn track(p: &SystemParams, sweep: &Sweep) -> Result<Trajectories> {
    if sweep.grid.is_empty() {
        return Err(Error::InvalidGrid("empty sweep grid".into()));
    }
    if sweep.grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid("sweep grid must be strictly increasing".into()));
    }
    let results: Vec<Result<PoleSet>> = sweep
        .grid
        .par_iter()
        .map(|&v| {
            let mut set = physical_poles(&sweep.variable.apply(p, v))?;
            set.sweep_value = Some(v);
            Ok(set)
        })
        .collect();
    let mut sets = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut last_step: Option<(f64, f64)> = None;
    for i in 1..sets.len() {
        let (prev, cur) = (&sets[i - 1].poles, &sets[i].poles);
        if prev.len() != cur.len() {
            last_step = None;
            continue;
        }
        let mut costs: Vec<(f64, Vec<usize>)> = permutations(cur.len())
            .into_iter()
            .map(|perm| {
                let cost = perm.iter().enumerate().map(|(k, &j)| (cur[j].location - prev[k].location).norm()).sum();
                (cost, perm)
            })
            .collect();
        costs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (best, perm) = costs[0].clone();
        let reordered: Vec<Pole> = perm.iter().map(|&j| cur[j]).collect();
        sets[i].poles = reordered;

        if let Some(&(runner_up, _)) = costs.get(1) {
            if runner_up - best <= 1e-3 * best {
                warnings.push(TrackWarning::AmbiguousPairing { index: i, best, runner_up });
            }
        }
        let step = sweep.grid[i] - sweep.grid[i - 1];
        let floor = 1e-6 * (1.0 + sets[i - 1].poles.iter().map(|p| p.location.norm()).fold(0.0, f64::max));
        if let Some((prev_disp, prev_step)) = last_step {
            let expected = prev_disp * step / prev_step;
            if best > 10.0 * expected && best > floor {
                warnings.push(TrackWarning::TrajectoryJump { index: i, displacement: best, expected });
            }
        }
        last_step = Some((best, step));
    }
    Ok(Trajectories { variable: sweep.variable, sets, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform;

    #[test]
    fn undriven_quartic_factorizes() {
        // ε₁ = ε₂ = 0: only the ρ₁₂ and ρ₂₃ blocks carry δ₂, giving
        // (δ₂ − δ₁)² + (Γ₁ + ν)² and δ₂² + (ν + γ_l)²
        let p = SystemParams::default().nu(1e-3).gamma_l(1e-2).delta1(0.5);
        let den = denominator_poly(&p).unwrap();
        let mut roots = poly::roots(&den.coeffs).unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let expected = [
            Complex64::new(0.0, -(1e-3 + 1e-2)),
            Complex64::new(0.0, 1e-3 + 1e-2),
            Complex64::new(0.5, -(1.0 + 1e-3)),
            Complex64::new(0.5, 1.0 + 1e-3),
        ];
        for (a, b) in roots.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn leading_coefficient_nonzero() {
        for (e1, e2, d1) in [(2.0, 0.01, 0.0), (10.0, 1e-3, 7.0), (0.8, 0.2, -3.0), (0.0, 0.0, 0.0)] {
            let den = denominator_poly(&SystemParams::with_rabi(e1, e2).delta1(d1)).unwrap();
            assert!(den.leading.abs() > 0.0);
            assert_eq!(den.coeffs[4], 1.0);
        }
    }

    #[test]
    fn resonant_pump_gives_even_quartic() {
        let den = denominator_poly(&SystemParams::with_rabi(2.0, 0.05)).unwrap();
        let max = den.max_coeff();
        assert!(den.coeffs[1].abs() < 1e-10 * max);
        assert!(den.coeffs[3].abs() < 1e-10 * max);
    }

    #[test]
    fn poles_match_closed_form_below_border() {
        let p = SystemParams::with_rabi(2.0, 0.01).nu(1e-5);
        let set = physical_poles(&p).unwrap();
        assert_eq!(set.physical().count(), 4);
        let pair = closedform::lambdas(&p).value;
        for root in pair.quartic_roots() {
            let nearest = set.poles.iter().map(|q| (q.location - root).norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 2e-3 * root.norm(), "{root}: {nearest}");
        }
    }

    #[test]
    fn residual_of_reported_poles() {
        for p in [
            SystemParams::with_rabi(10.0, 1e-3).delta1(7.0),
            SystemParams::with_rabi(0.8, 0.2).delta1(3.0),
        ] {
            let set = physical_poles(&p).unwrap();
            let max = set.denom_coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            for pole in &set.poles {
                assert!(poly::eval_complex(&set.denom_coeffs, pole.location).norm() < 1e-9 * max);
            }
        }
    }

    #[test]
    fn residue_matches_cramer_ratio() {
        // simple pole: residue = N(z₀) / D'(z₀)
        let p = SystemParams::with_rabi(0.8, 0.2).delta1(3.0);
        let set = physical_poles(&p).unwrap();
        let den = denominator_poly(&p).unwrap();
        for pole in &set.poles {
            let z = pole.location;
            let h = 1e-6 * (1.0 + z.norm());
            let d = (den.eval(z + h) - den.eval(z - h)) / (2.0 * h);
            let expected = numerator_det(&p, z) / d;
            assert!((pole.residue - expected).norm() < 1e-5 * expected.norm(), "{} vs {}", pole.residue, expected);
        }
    }

    #[test]
    fn spectator_zeros_are_cancelled() {
        // without the clock laser the ρ₁₂/ρ₂₃ zeros do not reach ρ₁₁
        let p = SystemParams::with_rabi(1.0, 0.0).delta1(0.4);
        let set = physical_poles(&p).unwrap();
        assert!(set.poles.iter().all(|q| q.cancelled));
        assert!(set.upper().is_empty());
    }

    #[test]
    fn single_point_sweep() {
        let p = SystemParams::with_rabi(10.0, 1e-3);
        let tr = track(&p, &Sweep { variable: SweepVariable::Delta1, grid: vec![7.0] }).unwrap();
        let direct = physical_poles(&p.delta1(7.0)).unwrap();
        assert_eq!(tr.sets.len(), 1);
        assert_eq!(tr.sets[0].poles, direct.poles);
        assert_eq!(tr.sets[0].sweep_value, Some(7.0));
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        let p = SystemParams::with_rabi(1.0, 0.1);
        assert!(track(&p, &Sweep { variable: SweepVariable::Eps2, grid: vec![] }).is_err());
        assert!(track(&p, &Sweep { variable: SweepVariable::Eps2, grid: vec![0.2, 0.1] }).is_err());
    }

    #[test]
    fn trajectories_are_continuous() {
        let p = SystemParams::with_rabi(0.8, 0.2);
        let grid: Vec<f64> = (0..=40).map(|i| -7.0 + 14.0 * i as f64 / 40.0).collect();
        let tr = track(&p, &Sweep { variable: SweepVariable::Delta1, grid }).unwrap();
        for w in tr.sets.windows(2) {
            for (k, (a, b)) in w[0].poles.iter().zip(w[1].poles.iter()).enumerate() {
                let gap = w[0]
                    .poles
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, o)| (o.location - a.location).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!((a.location - b.location).norm() < 0.5 * gap, "{} -> {}", a.location, b.location);
            }
        }
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
