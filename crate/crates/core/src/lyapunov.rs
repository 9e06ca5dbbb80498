//! Steady-state covariance from the Lyapunov equation AV + VAᵀ = −D.
//!
//! Independent of the frequency-domain route. Only the open-loop, Markovian
//! case has an exact finite-dimensional representation; closed-loop noise is
//! colored through |g(ω)|² and must go through quadrature instead.

use nalgebra::{DMatrix, DVector, Matrix6};

use crate::drift::{is_stable, DriftMatrix};
use crate::error::{Error, Result};
use crate::params::OperatingPoint;

/// Diffusion matrix of the open-loop system with a white (Markovian)
/// mechanical bath.
pub fn diffusion_matrix(op: &OperatingPoint) -> Matrix6<f64> {
    let p = &op.params;
    let n = &op.occupations;
    let da = p.kappa_a * (2.0 * n.cavity + 1.0);
    let dm = p.kappa_m * (2.0 * n.magnon + 1.0);
    let db = p.gamma_b * (2.0 * n.phonon + 1.0);
    Matrix6::from_diagonal(&nalgebra::Vector6::new(da, da, dm, dm, 0.0, db))
}

/// Solve AV + VAᵀ = −D by vectorization, (I⊗A + A⊗I)·vec V = −vec D.
pub fn lyapunov_covariance(a: &DriftMatrix, d: &Matrix6<f64>) -> Result<Matrix6<f64>> {
    is_stable(a)?.require_stable()?;
    let a_dyn = DMatrix::from_column_slice(6, 6, a.entries.as_slice());
    let eye = DMatrix::<f64>::identity(6, 6);
    let system = eye.kronecker(&a_dyn) + a_dyn.kronecker(&eye);
    let rhs = DVector::from_iterator(36, d.iter().map(|x| -x));
    let vec_v = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Lyapunov("singular Kronecker system".into()))?;
    let v = Matrix6::from_column_slice(vec_v.as_slice());
    Ok(0.5 * (v + v.transpose()))
}

/// Position and momentum variances read off the covariance.
pub fn mechanical_variances(v: &Matrix6<f64>) -> (f64, f64) {
    (v[(4, 4)], v[(5, 5)])
}
