//! Real 8-component encoding of the reduced density matrix.

use nalgebra::{Matrix3, SVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Vector8 = SVector<f64, 8>;

pub const RHO11: usize = 0;
pub const RHO22: usize = 1;
pub const RE_RHO12: usize = 2;
pub const IM_RHO12: usize = 3;
pub const RE_RHO13: usize = 4;
pub const IM_RHO13: usize = 5;
pub const RE_RHO23: usize = 6;
pub const IM_RHO23: usize = 7;

/// Density matrix with ρ₃₃ eliminated through the trace condition.
///
/// Component order: `[ρ₁₁, ρ₂₂, Re ρ₁₂, Im ρ₁₂, Re ρ₁₃, Im ρ₁₃, Re ρ₂₃, Im ρ₂₃]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState(pub [f64; 8]);

impl BlochState {
    /// Everything in |3⟩.
    pub const GROUND: BlochState = BlochState([0.0; 8]);

    pub fn from_vector(v: &Vector8) -> Self {
        let mut x = [0.0; 8];
        x.copy_from_slice(v.as_slice());
        BlochState(x)
    }

    pub fn to_vector(&self) -> Vector8 {
        Vector8::from_column_slice(&self.0)
    }

    /// Build from the upper triangle of a density matrix; ρ₃₃ is implied.
    pub fn from_upper(rho11: f64, rho22: f64, rho12: Complex64, rho13: Complex64, rho23: Complex64) -> Self {
        BlochState([rho11, rho22, rho12.re, rho12.im, rho13.re, rho13.im, rho23.re, rho23.im])
    }

    pub fn rho11(&self) -> f64 {
        self.0[RHO11]
    }

    pub fn rho22(&self) -> f64 {
        self.0[RHO22]
    }

    pub fn rho33(&self) -> f64 {
        1.0 - self.0[RHO11] - self.0[RHO22]
    }

    pub fn rho12(&self) -> Complex64 {
        Complex64::new(self.0[RE_RHO12], self.0[IM_RHO12])
    }

    pub fn rho13(&self) -> Complex64 {
        Complex64::new(self.0[RE_RHO13], self.0[IM_RHO13])
    }

    pub fn rho23(&self) -> Complex64 {
        Complex64::new(self.0[RE_RHO23], self.0[IM_RHO23])
    }

    /// Full 3×3 Hermitian, unit-trace density matrix (basis order |1⟩, |2⟩, |3⟩).
    pub fn reconstruct(&self) -> Matrix3<Complex64> {
        let re = |v: f64| Complex64::new(v, 0.0);
        let (r12, r13, r23) = (self.rho12(), self.rho13(), self.rho23());
        Matrix3::new(
            re(self.rho11()), r12, r13,
            r12.conj(), re(self.rho22()), r23,
            r13.conj(), r23.conj(), re(self.rho33()),
        )
    }

    /// Eigenvalues of the reconstructed matrix, ascending.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let eig = SymmetricEigen::new(self.reconstruct());
        let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Populations in [0, 1] and a positive semidefinite matrix, both up to `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let pops = [self.rho11(), self.rho22(), self.rho33()];
        pops.iter().all(|&p| p >= -tol && p <= 1.0 + tol) && self.eigenvalues()[0] >= -tol
    }

    pub fn max_abs_diff(&self, other: &BlochState) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state() {
        let m = BlochState::GROUND.reconstruct();
        assert_eq!(m, Matrix3::from_diagonal(&nalgebra::Vector3::new(0.0, 0.0, 1.0).map(|v| Complex64::new(v, 0.0))));
    }

    #[test]
    fn fully_excited() {
        let mut x = [0.0; 8];
        x[RHO11] = 1.0;
        let m = BlochState(x).reconstruct();
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(2, 2)].re, 0.0);
    }

    #[test]
    fn conjugate_lower_triangle() {
        let s = BlochState([0.25, 0.25, 0.1, -0.1, 0.0, 0.0, 0.0, 0.0]);
        let m = s.reconstruct();
        assert_eq!(m[(2, 2)], Complex64::new(0.5, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.1, 0.1));
        assert_eq!(m, m.adjoint());
        assert!(s.is_physical(1e-12));
    }

    #[test]
    fn unphysical_coherence_detected() {
        let s = BlochState([0.5, 0.5, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(!s.is_physical(1e-9));
    }

    proptest::proptest! {
        #[test]
        fn reconstruct_is_hermitian_unit_trace(x in proptest::array::uniform8(-1.0f64..1.0)) {
            let m = BlochState(x).reconstruct();
            proptest::prop_assert_eq!(m, m.adjoint());
            let tr = m.trace();
            proptest::prop_assert_eq!(tr.im, 0.0);
            proptest::prop_assert!((tr.re - 1.0).abs() <= 2.0 * f64::EPSILON);
        }
    }
}
