//! Optical Bloch equations of the V-system as an affine real system.
//!
//! With ρ₃₃ eliminated by the trace condition the master equation becomes
//! `dx/dt = A·x + c` for the 8-component [`BlochState`] `x`. The damping
//! terms are taken exactly as written in the model: the clock-laser
//! linewidth γ_l damps ρ₁₃ and ρ₂₃, while ρ₁₂ decays at Γ₁ + ν only.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::state::*;

pub type Matrix8 = SMatrix<f64, 8, 8>;
pub type ComplexMatrix8 = SMatrix<Complex64, 8, 8>;
pub type ComplexVector8 = SVector<Complex64, 8>;

/// Condition estimate above which the generator is treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;
/// Component magnitude beyond which [`evolve`] reports divergence.
pub const DIVERGENCE_BOUND: f64 = 10.0;

/// `dx/dt = a·x + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineGenerator {
    pub a: Matrix8,
    pub c: Vector8,
    /// Detuning the generator was built for; attached to solver errors.
    pub delta2: f64,
}

/// Entries of `A` that carry δ₂, as `(row, col, sign)`: `A[row, col] += sign·δ₂`.
pub(crate) const DELTA2_ENTRIES: [(usize, usize, f64); 4] = [
    (RE_RHO12, IM_RHO12, -1.0),
    (IM_RHO12, RE_RHO12, 1.0),
    (RE_RHO23, IM_RHO23, 1.0),
    (IM_RHO23, RE_RHO23, -1.0),
];

/// Generator with δ₂ = 0; the δ₂ part is added through [`DELTA2_ENTRIES`].
fn base_matrix(p: &SystemParams) -> (Matrix8, Vector8) {
    let SystemParams { gamma1: g1, nu, gamma_l: gl, eps1: e1, eps2: e2, delta1: d1, .. } = *p;
    let mut a = Matrix8::zeros();
    let mut c = Vector8::zeros();

    // dρ₁₁/dt = −2Γ₁ρ₁₁ + 2ε₁ Im ρ₁₃
    a[(RHO11, RHO11)] = -2.0 * g1;
    a[(RHO11, IM_RHO13)] = 2.0 * e1;

    // dρ₂₂/dt = −2νρ₂₂ + 2ε₂ Im ρ₂₃
    a[(RHO22, RHO22)] = -2.0 * nu;
    a[(RHO22, IM_RHO23)] = 2.0 * e2;

    // dρ₁₂/dt = −(Γ₁ + ν + i(δ₁ − δ₂))ρ₁₂ + iε₁ρ₃₂ − iε₂ρ₁₃
    a[(RE_RHO12, RE_RHO12)] = -(g1 + nu);
    a[(RE_RHO12, IM_RHO12)] = d1;
    a[(RE_RHO12, IM_RHO23)] = e1;
    a[(RE_RHO12, IM_RHO13)] = e2;
    a[(IM_RHO12, IM_RHO12)] = -(g1 + nu);
    a[(IM_RHO12, RE_RHO12)] = -d1;
    a[(IM_RHO12, RE_RHO23)] = e1;
    a[(IM_RHO12, RE_RHO13)] = -e2;

    // dρ₁₃/dt = −(Γ₁ + γ_l + iδ₁)ρ₁₃ − iε₂ρ₁₂ − iε₁(ρ₁₁ − ρ₃₃)
    a[(RE_RHO13, RE_RHO13)] = -(g1 + gl);
    a[(RE_RHO13, IM_RHO13)] = d1;
    a[(RE_RHO13, IM_RHO12)] = e2;
    a[(IM_RHO13, IM_RHO13)] = -(g1 + gl);
    a[(IM_RHO13, RE_RHO13)] = -d1;
    a[(IM_RHO13, RE_RHO12)] = -e2;
    a[(IM_RHO13, RHO11)] = -2.0 * e1;
    a[(IM_RHO13, RHO22)] = -e1;
    c[IM_RHO13] = e1;

    // dρ₂₃/dt = −(ν + γ_l + iδ₂)ρ₂₃ − iε₁ρ₂₁ − iε₂(ρ₂₂ − ρ₃₃)
    a[(RE_RHO23, RE_RHO23)] = -(nu + gl);
    a[(RE_RHO23, IM_RHO12)] = -e1;
    a[(IM_RHO23, IM_RHO23)] = -(nu + gl);
    a[(IM_RHO23, RE_RHO12)] = -e1;
    a[(IM_RHO23, RHO11)] = -e2;
    a[(IM_RHO23, RHO22)] = -2.0 * e2;
    c[IM_RHO23] = e2;

    (a, c)
}

/// Affine generator for the parameters (δ₂ taken from `p.delta2`).
pub fn build_generator(p: &SystemParams) -> AffineGenerator {
    let (mut a, c) = base_matrix(p);
    for &(r, col, sign) in &DELTA2_ENTRIES {
        a[(r, col)] += sign * p.delta2;
    }
    AffineGenerator { a, c, delta2: p.delta2 }
}

/// `A(δ₂)` continued to complex δ₂, with the constant vector.
///
/// Its determinant is a polynomial of degree at most four in δ₂, since δ₂
/// enters four rows affinely.
pub fn complex_generator(p: &SystemParams, delta2: Complex64) -> (ComplexMatrix8, ComplexVector8) {
    let (a, c) = base_matrix(p);
    let mut m = a.map(|v| Complex64::new(v, 0.0));
    for &(r, col, sign) in &DELTA2_ENTRIES {
        m[(r, col)] += delta2 * sign;
    }
    (m, c.map(|v| Complex64::new(v, 0.0)))
}

impl AffineGenerator {
    pub fn rate(&self, x: &Vector8) -> Vector8 {
        self.a * x + self.c
    }

    pub fn residual(&self, s: &BlochState) -> f64 {
        self.rate(&s.to_vector()).amax()
    }

    /// Row-sum norm ‖A‖∞.
    pub fn norm_inf(&self) -> f64 {
        self.a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest step accepted by [`evolve`].
    pub fn stable_step(&self) -> f64 {
        0.1 / self.norm_inf()
    }

    fn singular(&self, condition: f64) -> Error {
        Error::SingularGenerator { condition, delta2: Some(self.delta2) }
    }
}

fn norm1(m: &Matrix8) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Fixed point of `A·x + c = 0` by partial-pivot LU with one refinement step.
pub fn steady_state(g: &AffineGenerator) -> Result<BlochState> {
    let lu = g.a.lu();
    let inverse = lu.try_inverse().ok_or_else(|| g.singular(f64::INFINITY))?;
    let condition = norm1(&g.a) * norm1(&inverse);
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(g.singular(condition));
    }
    let rhs = -g.c;
    let mut x = lu.solve(&rhs).ok_or_else(|| g.singular(condition))?;
    let r = rhs - g.a * x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(BlochState::from_vector(&x))
}

/// Convenience: build the generator and solve for the steady state.
pub fn solve(p: &SystemParams) -> Result<BlochState> {
    steady_state(&build_generator(p))
}

/// Classical fourth-order Runge-Kutta integration of `dx/dt = A·x + c` from
/// `x0` up to `t_final` with steps no longer than `dt`.
///
/// The last step is shortened so that the returned state sits exactly at
/// `t_final`. `dt` must not exceed [`AffineGenerator::stable_step`].
pub fn evolve(g: &AffineGenerator, x0: &BlochState, t_final: f64, dt: f64) -> Result<BlochState> {
    let bound = g.stable_step();
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, bound });
    }
    if !(t_final >= 0.0) {
        return Err(Error::InvalidGrid(format!("t_final must be >= 0, got {t_final}")));
    }
    let mut x = x0.to_vector();
    if t_final == 0.0 {
        return Ok(*x0);
    }
    let steps = (t_final / dt).ceil() as u64;
    let h = t_final / steps as f64;
    for k in 0..steps {
        let k1 = g.rate(&x);
        let k2 = g.rate(&(x + k1 * (h / 2.0)));
        let k3 = g.rate(&(x + k2 * (h / 2.0)));
        let k4 = g.rate(&(x + k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let magnitude = x.amax();
        if !magnitude.is_finite() || magnitude > DIVERGENCE_BOUND {
            return Err(Error::UnstableStep { t: (k + 1) as f64 * h, magnitude });
        }
    }
    Ok(BlochState::from_vector(&x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(eps1: f64, eps2: f64) -> SystemParams {
        SystemParams::with_rabi(eps1, eps2)
    }

    #[test]
    fn undriven_generator_is_block_diagonal_with_ground_fixed_point() {
        let g = build_generator(&params(0.0, 0.0).delta1(0.3).delta2(-1.2));
        assert_eq!(g.c, Vector8::zeros());
        // populations decouple from coherences
        for r in [RHO11, RHO22] {
            for col in 2..8 {
                assert_eq!(g.a[(r, col)], 0.0);
                assert_eq!(g.a[(col, r)], 0.0);
            }
        }
        let s = steady_state(&g).unwrap();
        assert_eq!(s, BlochState::GROUND);
    }

    #[test]
    fn excited_population_row() {
        let g = build_generator(&params(1.7, 0.2));
        let mut expected = [0.0; 8];
        expected[RHO11] = -2.0;
        expected[IM_RHO13] = 2.0 * 1.7;
        assert_eq!(g.a.row(RHO11).iter().copied().collect::<Vec<_>>(), expected.to_vec());
        assert_eq!(g.c[RHO11], 0.0);
    }

    #[test]
    fn delta2_touches_only_four_coherence_rows() {
        let p = params(2.0, 0.03).delta1(0.7).delta2(0.4);
        let shift = 1.25;
        let g0 = build_generator(&p);
        let g1 = build_generator(&p.delta2(0.4 + shift));
        let diff = g1.a - g0.a;
        let mut touched = 0;
        for r in 0..8 {
            for col in 0..8 {
                let d = diff[(r, col)];
                if d != 0.0 {
                    touched += 1;
                    assert!([RE_RHO12, IM_RHO12, RE_RHO23, IM_RHO23].contains(&r));
                    assert!((d.abs() - shift).abs() < 1e-14);
                }
            }
        }
        assert_eq!(touched, 4);
        assert_eq!(g0.c, g1.c);
    }

    #[test]
    fn complex_generator_matches_real_on_real_axis() {
        let p = params(1.3, 0.4).delta1(-0.5).nu(1e-3).gamma_l(1e-2);
        let (m, c) = complex_generator(&p, Complex64::new(0.9, 0.0));
        let g = build_generator(&p.delta2(0.9));
        assert!((m.map(|z| z.re) - g.a).amax() < 1e-15);
        assert_eq!(m.map(|z| z.im), Matrix8::zeros());
        assert_eq!(c.map(|z| z.re), g.c);
    }

    #[test]
    fn two_level_saturation() {
        for (eps1, delta1) in [(1.0, 0.0), (0.3, 2.0), (5.0, -1.5)] {
            let p = params(eps1, 0.0).gamma_l(0.0).delta1(delta1);
            let s = solve(&p).unwrap();
            let expected = eps1 * eps1 / (2.0 * eps1 * eps1 + 1.0 + delta1 * delta1);
            assert!((s.rho11() - expected).abs() < 1e-13, "{} vs {}", s.rho11(), expected);
            assert!(s.rho22().abs() < 1e-15);
        }
        let s = solve(&params(1.0, 0.0).gamma_l(0.0)).unwrap();
        assert!((s.rho11() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn steady_state_residual_and_physicality() {
        let p = params(2.0, 0.03).delta2(0.37);
        let g = build_generator(&p);
        let s = steady_state(&g).unwrap();
        assert!(g.residual(&s) < 1e-12 * g.c.amax().max(1.0));
        assert!(s.is_physical(1e-10));
    }

    #[test]
    fn singular_generator_reported_with_detuning() {
        let mut g = build_generator(&params(1.0, 0.1).delta2(0.5));
        g.a.fill_row(3, 0.0);
        match steady_state(&g) {
            Err(Error::SingularGenerator { delta2, .. }) => assert_eq!(delta2, Some(0.5)),
            other => panic!("expected singular generator, got {other:?}"),
        }
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let g = build_generator(&params(1.0, 0.1));
        let x0 = BlochState([0.2, 0.1, 0.05, -0.02, 0.1, 0.0, 0.0, 0.03]);
        assert_eq!(evolve(&g, &x0, 0.0, g.stable_step()).unwrap(), x0);
    }

    #[test]
    fn evolve_free_decay() {
        let g = build_generator(&params(0.0, 0.0));
        let mut x = [0.0; 8];
        x[RHO11] = 1.0;
        let s = evolve(&g, &BlochState(x), 1.0, g.stable_step() / 10.0).unwrap();
        assert!((s.rho11() - (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn evolve_rejects_large_step() {
        let g = build_generator(&params(1.0, 0.1));
        assert!(matches!(
            evolve(&g, &BlochState::GROUND, 1.0, 2.0 * g.stable_step()),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn evolve_reports_divergence() {
        let mut g = build_generator(&params(1.0, 0.1));
        g.a[(RHO11, RHO11)] = 2.0;
        let dt = g.stable_step();
        let mut x = [0.0; 8];
        x[RHO11] = 1.0;
        assert!(matches!(evolve(&g, &BlochState(x), 50.0, dt), Err(Error::UnstableStep { .. })));
    }

    #[test]
    fn evolve_relaxes_to_steady_state() {
        let p = params(1.0, 0.3).nu(1e-2).gamma_l(1e-2).delta2(0.2);
        let g = build_generator(&p);
        let target = steady_state(&g).unwrap();
        let s = evolve(&g, &BlochState::GROUND, 20.0 / p.nu, g.stable_step()).unwrap();
        assert!(s.max_abs_diff(&target) < 1e-6);
    }
}
