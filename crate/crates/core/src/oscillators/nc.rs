//! The 2D oscillator `H = (x² + y² + p_x² + p_y²)/2` under the deformed product
//! with `ħ = 1` and noncommutativity `θ`.
//!
//! The tilde variables `x̃ = x`, `ỹ = (y − θp_x)/ω`, `p̃_x = (p_x + θy)/ω`,
//! `p̃_y = p_y` with `ω = (1+θ²)^{1/2}` are two commuting canonical pairs with
//! effective Planck constant `ω`, so the spectrum is `ω(n_x + n_y + 1)` and the
//! ground state is the Gaussian `e^{−S/ω}`. Exact arithmetic runs in `Q(ω)[i]`.

use num_complex::Complex64;

use super::special::laguerre;
use super::SpectrumResult;
use crate::error::{PsqmError, Result};
use crate::grid::{Field, PhaseGrid};
use crate::scalar::{rational_from_f64, QuadSurd, Rational, Scalar};
use crate::star::{
    bopp_operator, check_star_eigen, polygauss_apply, NcParams, PolyGaussForm, PolynomialSymbol,
};
use crate::weyl::WeylOperator;

type P = PolynomialSymbol<QuadSurd>;
type W = WeylOperator<QuadSurd>;

fn exact_theta(theta: f64) -> Result<Rational> {
    rational_from_f64(theta)
        .ok_or_else(|| PsqmError::InvalidParameter(format!("theta must be finite, got {theta}")))
}

/// `ω = (1 + θ²)^{1/2}` exactly.
pub fn nc_omega(theta: &Rational) -> QuadSurd {
    QuadSurd::sqrt_rational(&(Rational::from_integer(1.into()) + theta * theta)).expect("positive")
}

pub fn nc_params(theta: &Rational) -> NcParams<QuadSurd> {
    NcParams::new(QuadSurd::one(), QuadSurd::from_rational(theta)).expect("real theta")
}

/// `H = S/2` in the variables `x, y, p_x, p_y`.
pub fn nc_hamiltonian() -> P {
    P::radius_squared(2).scale(&QuadSurd::ratio(1, 2))
}

/// Tilde coordinates as symbols and as star operators.
#[derive(Clone, Debug)]
pub struct NcCoordinates {
    pub theta: Rational,
    pub omega: QuadSurd,
    /// `x̃, ỹ, p̃_x, p̃_y` as linear symbols.
    pub symbols: [P; 4],
    /// The same as left star operators.
    pub operators: [W; 4],
}

impl NcCoordinates {
    pub fn new(theta: f64) -> Result<Self> {
        let theta = exact_theta(theta)?;
        let omega = nc_omega(&theta);
        let inv = omega.recip().expect("omega > 0");
        let t = QuadSurd::from_rational(&theta);
        let z = QuadSurd::zero;
        let one = QuadSurd::one;
        let symbols = [
            P::linear(2, &[one(), z(), z(), z()]),
            P::linear(2, &[z(), inv.clone(), t.mul(&inv).neg(), z()]),
            P::linear(2, &[z(), t.mul(&inv), inv.clone(), z()]),
            P::linear(2, &[z(), z(), z(), one()]),
        ];
        let nc = nc_params(&theta);
        let mut ops = Vec::with_capacity(4);
        for s in &symbols {
            ops.push(bopp_operator(s, &nc)?);
        }
        let operators: [W; 4] = ops.try_into().expect("four operators");
        Ok(NcCoordinates {
            theta,
            omega,
            symbols,
            operators,
        })
    }

    fn ladder(&self, axis: usize, sign: i64) -> Result<W> {
        // axis 0: (x̃, p̃_x); axis 1: (ỹ, p̃_y)
        let (q, p) = if axis == 0 {
            (&self.operators[0], &self.operators[2])
        } else {
            (&self.operators[1], &self.operators[3])
        };
        q.plus(&p.scale(&QuadSurd::i().mul(&QuadSurd::from_int(sign))))
    }

    /// `√2 ã_i⋆ = q̃_i⋆ + i p̃_i⋆`.
    ///
    /// The `1/√2` is left out so that coefficients stay in `Q(ω)[i]`.
    pub fn lowering(&self, axis: usize) -> Result<W> {
        self.ladder(axis, 1)
    }

    /// `√2 ã_i†⋆ = q̃_i⋆ − i p̃_i⋆`.
    pub fn raising(&self, axis: usize) -> Result<W> {
        self.ladder(axis, -1)
    }

    /// The 2×2 table `[ã_i⋆, ã_j†⋆] = [lowering_i, raising_j]/2`.
    pub fn ladder_commutators(&self) -> Result<[[W; 2]; 2]> {
        let half = QuadSurd::ratio(1, 2);
        let c = |i, j| -> Result<W> {
            Ok(self
                .lowering(i)?
                .commutator(&self.raising(j)?)?
                .scale(&half))
        };
        Ok([[c(0, 0)?, c(0, 1)?], [c(1, 0)?, c(1, 1)?]])
    }
}

pub fn nc_coordinates(theta: f64) -> Result<NcCoordinates> {
    NcCoordinates::new(theta)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `ψ_{n_x n_y} = (n_x! n_y!)^{−1/2} (ã_x†⋆)^{n_x} (ã_y†⋆)^{n_y} ψ₀₀` with
/// `ψ₀₀ = (1/π) e^{−S/ω}`, checked exactly against `H`.
pub fn nc_state(nx: u32, ny: u32, theta: f64) -> Result<SpectrumResult<QuadSurd>> {
    let coords = NcCoordinates::new(theta)?;
    let width = coords.omega.recip().expect("omega > 0");
    let mut state = PolyGaussForm::isotropic(P::one(2), width)?.with_prefactor(
        std::f64::consts::FRAC_1_PI
            / (2f64.powi((nx + ny) as i32) * factorial(nx) * factorial(ny)).sqrt(),
    );
    let ax = coords.raising(0)?;
    let ay = coords.raising(1)?;
    for _ in 0..nx {
        state = polygauss_apply(&ax, &state)?;
    }
    for _ in 0..ny {
        state = polygauss_apply(&ay, &state)?;
    }
    let check = check_star_eigen(&nc_hamiltonian(), &state, &nc_params(&coords.theta))?;
    Ok(SpectrumResult {
        quantum_numbers: vec![nx, ny],
        energy: check.energy.to_c64().re,
        exact_energy: Some(check.energy.clone()),
        is_eigen: check.is_eigen,
        residual: check.relative_residual,
        theta,
        state,
    })
}

/// Closed-form Wigner function of `ψ_{n_x n_y}`:
/// `L_{n_x}(2z_x/ω) L_{n_y}(2z_y/ω) e^{−(z_x+z_y)/ω}` with `z_x = x̃² + p̃_x²`, `z_y = ỹ² + p̃_y²`.
#[derive(Clone, Copy, Debug)]
pub struct NcWigner {
    pub nx: u32,
    pub ny: u32,
    pub theta: f64,
    pub omega: f64,
    /// `(−1)^{n_x+n_y} / (π ω)²`, which makes the integral 1.
    pub norm: f64,
}

impl NcWigner {
    pub fn new(nx: u32, ny: u32, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(PsqmError::InvalidParameter("theta must be finite".into()));
        }
        let omega = (1.0 + theta * theta).sqrt();
        let sign = if (nx + ny).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let norm = sign / (std::f64::consts::PI * omega).powi(2);
        Ok(NcWigner {
            nx,
            ny,
            theta,
            omega,
            norm,
        })
    }

    /// `(z_x, z_y)` at `u = (x, y, p_x, p_y)`.
    pub fn invariants(&self, u: &[f64]) -> (f64, f64) {
        let (x, y, px, py) = (u[0], u[1], u[2], u[3]);
        let beta = 1.0 / (self.omega * self.omega);
        let zx = x * x + beta * (px + self.theta * y).powi(2);
        let zy = beta * (y - self.theta * px).powi(2) + py * py;
        (zx, zy)
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        let (zx, zy) = self.invariants(u);
        let w = self.omega;
        self.norm
            * laguerre(self.nx, 2.0 * zx / w)
            * laguerre(self.ny, 2.0 * zy / w)
            * (-(zx + zy) / w).exp()
    }

    /// Sample on a 4D grid and rescale so that the grid integral is 1.
    pub fn sample(&self, grid: std::sync::Arc<PhaseGrid>) -> Result<Field> {
        if grid.dim() != 2 {
            return Err(PsqmError::DimensionMismatch(format!(
                "Wigner function needs d = 2, got {}",
                grid.dim()
            )));
        }
        let f = Field::sample(grid, |u| Complex64::new(self.eval(u), 0.0))?;
        let total = f.integrate().re;
        if total == 0.0 {
            return Err(PsqmError::ZeroState);
        }
        Ok(f.scale(Complex64::new(1.0 / total, 0.0)))
    }
}

pub fn nc_wigner(nx: u32, ny: u32, theta: f64) -> Result<NcWigner> {
    NcWigner::new(nx, ny, theta)
}
