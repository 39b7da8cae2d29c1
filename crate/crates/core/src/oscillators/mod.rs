//! Special functions, the radial eigensolver and the oscillator states.

mod ho3d;
mod nc;
mod radial;
mod special;

pub use ho3d::{
    ho3d_hamiltonian, ho3d_idempotency, ho3d_params, ho3d_polynomial, ho3d_state, ho3d_wigner,
    Idempotency,
};
pub use nc::{
    nc_coordinates, nc_hamiltonian, nc_omega, nc_params, nc_state, nc_wigner, NcCoordinates,
    NcWigner,
};
pub use radial::{
    box_length, radial_eigensolve, RadialMatrix, RadialSpectrum, DEFAULT_GRID_N, DRIFT_LIMIT,
    MIN_GRID_N,
};
pub use special::{kummer_coefficients, kummer_m, laguerre, KUMMER_TERM_CAP};

use serde_json::{json, Value};

use crate::scalar::Scalar;
use crate::star::PolyGaussForm;

/// A star-eigenstate with its energy and eigen defect.
#[derive(Clone, Debug)]
pub struct SpectrumResult<C: Scalar> {
    /// `[n]` or `[n_x, n_y]`.
    pub quantum_numbers: Vec<u32>,
    pub energy: f64,
    pub exact_energy: Option<C>,
    pub is_eigen: bool,
    /// Relative coefficient norm of `H⋆ψ − Eψ`.
    pub residual: f64,
    pub theta: f64,
    pub state: PolyGaussForm<C>,
}

impl<C: Scalar> SpectrumResult<C> {
    pub fn to_json(&self) -> Value {
        json!({
            "quantum_numbers": self.quantum_numbers,
            "energy": self.energy,
            "exact_energy": self.exact_energy.as_ref().map(|e| e.fmt_coeff()),
            "is_eigen": self.is_eigen,
            "residual": self.residual,
            "theta": self.theta,
            "state": self.state.to_json(),
        })
    }
}
