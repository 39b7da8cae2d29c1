//! Wigner functions `f_W = ψ ⋆ ψ†`, marginals, expectation values and
//! Schrödinger evolution `iħ ∂_t ψ = H ⋆ ψ` of quasi-amplitudes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PsqmError, Result};
use crate::grid::{Axis, Field};
use crate::scalar::Scalar;
use crate::star::{bopp_operator, NcParams, PolynomialSymbol};
use crate::star_grid::{star_series, GridOperator};

/// Largest imaginary part of a constructed Wigner function, relative to its norm.
pub const WIGNER_IMAG_TOL: f64 = 1e-6;
/// Largest imaginary part of an expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-8;
/// Relative norm drift that aborts [`evolve`].
pub const NORM_DRIFT_LIMIT: f64 = 1e-4;
/// `|λ dt|` bound of classical RK4 on the imaginary axis.
pub const RK4_IMAGINARY_BOUND: f64 = 2.8284271247461903;

/// Output of [`wigner_from_amplitude`].
#[derive(Clone, Debug)]
pub struct WignerField {
    /// Real part of the series, scaled to unit integral.
    pub field: Field,
    /// `∫ ψ⋆ψ†` before rescaling.
    pub raw_integral: f64,
    /// `‖Im f‖ / ‖f‖` of the discarded imaginary part.
    pub imag_residue: f64,
    pub order: usize,
    /// Relative size of the last series order.
    pub relative_last: f64,
    pub converged: bool,
}

/// `f_W = ψ ⋆ ψ†` by the truncated star series, normalised to `∫ f_W = 1`.
pub fn wigner_from_amplitude<C: Scalar>(
    psi: &Field,
    order: usize,
    nc: &NcParams<C>,
) -> Result<WignerField> {
    let s = star_series(psi, &psi.conj(), order, nc)?;
    let norm = s.field.norm();
    if !(norm > 0.0) {
        return Err(PsqmError::ZeroState);
    }
    let imag = s.field.map(|v| Complex64::new(v.im, 0.0)).norm() / norm;
    if imag > WIGNER_IMAG_TOL {
        return Err(PsqmError::ImaginaryResidue {
            residue: imag,
            tol: WIGNER_IMAG_TOL,
        });
    }
    let real = s.field.map(|v| Complex64::new(v.re, 0.0));
    let raw = real.integrate().re;
    if raw == 0.0 {
        return Err(PsqmError::ZeroState);
    }
    Ok(WignerField {
        field: real.scale(Complex64::new(1.0 / raw, 0.0)),
        raw_integral: raw,
        imag_residue: imag,
        order: s.order,
        relative_last: s.relative_last,
        converged: s.converged,
    })
}

/// A density on a subset of the phase-space axes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Marginal {
    pub axes: Vec<Axis>,
    pub names: Vec<String>,
    /// Row-major over the kept axes, last fastest.
    pub values: Vec<f64>,
    /// Largest imaginary part that was dropped.
    pub imag_max: f64,
}

impl Marginal {
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, o: &Marginal) -> Result<f64> {
        if self.axes != o.axes {
            return Err(PsqmError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Integrate out every axis not in `keep` with the cell measure.
pub fn marginal(f: &Field, keep: &[usize]) -> Result<Marginal> {
    let grid = f.grid();
    let na = grid.naxes();
    if keep.is_empty() {
        return Err(PsqmError::InvalidParameter(
            "marginal needs at least one kept axis".into(),
        ));
    }
    for (i, &k) in keep.iter().enumerate() {
        grid.check_axis(k)?;
        if keep[..i].contains(&k) || (i > 0 && keep[i - 1] > k) {
            return Err(PsqmError::InvalidParameter(
                "kept axes must be distinct and increasing".into(),
            ));
        }
    }
    let shape = grid.shape();
    let out_shape: Vec<usize> = keep.iter().map(|&k| shape[k]).collect();
    let out_len: usize = out_shape.iter().product();
    let dropped: f64 = (0..na)
        .filter(|a| !keep.contains(a))
        .map(|a| grid.axes()[a].spacing())
        .product();
    // Each output cell sums its fibre in flat-index order, so the result is deterministic.
    let values: Vec<Complex64> = (0..out_len)
        .into_par_iter()
        .map(|o| {
            let mut idx = vec![0usize; na];
            let mut rem = o;
            for (j, &k) in keep.iter().enumerate().rev() {
                idx[k] = rem % out_shape[j];
                rem /= out_shape[j];
            }
            let free: Vec<usize> = (0..na).filter(|a| !keep.contains(a)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            loop {
                acc += f.values()[grid.flat_index(&idx)];
                let mut j = free.len();
                loop {
                    if j == 0 {
                        return acc * dropped;
                    }
                    j -= 1;
                    idx[free[j]] += 1;
                    if idx[free[j]] < shape[free[j]] {
                        break;
                    }
                    idx[free[j]] = 0;
                }
            }
        })
        .collect();
    let names = grid.axis_names();
    Ok(Marginal {
        axes: keep.iter().map(|&k| grid.axes()[k]).collect(),
        names: keep.iter().map(|&k| names[k].clone()).collect(),
        imag_max: values.iter().fold(0.0, |m, v| m.max(v.im.abs())),
        values: values.iter().map(|v| v.re).collect(),
    })
}

/// Comparison of the marginal of `f_W` with that of `|ψ|²`, both normalised to 1.
#[derive(Clone, Debug, Serialize)]
pub struct MarginalIdentity {
    pub star: Marginal,
    pub pointwise: Marginal,
    pub max_diff: f64,
    pub star_min: f64,
    pub pointwise_min: f64,
}

impl MarginalIdentity {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_diff <= tol
    }

    pub fn nonnegative(&self, tol: f64) -> bool {
        self.star_min >= -tol && self.pointwise_min >= -tol
    }
}

/// Test whether the star can be dropped under a partial integral:
/// marginal of `f_W = ψ⋆ψ†` against the marginal of `ψ ψ†`.
pub fn marginal_identity(f_w: &Field, psi: &Field, keep: &[usize]) -> Result<MarginalIdentity> {
    f_w.check_same_grid(psi)?;
    let unit = |f: &Field| -> Result<Field> {
        let t = f.integrate().re;
        if t == 0.0 {
            return Err(PsqmError::ZeroState);
        }
        Ok(f.scale(Complex64::new(1.0 / t, 0.0)))
    };
    let star = marginal(&unit(f_w)?, keep)?;
    let pointwise = marginal(
        &unit(&psi.map(|v| Complex64::new(v.norm_sqr(), 0.0)))?,
        keep,
    )?;
    Ok(MarginalIdentity {
        max_diff: star.max_abs_diff(&pointwise)?,
        star_min: star.min(),
        pointwise_min: pointwise.min(),
        star,
        pointwise,
    })
}

/// `⟨a⟩ = ∫ a f_W` for a real symbol.
pub fn expectation<C: Scalar>(a: &PolynomialSymbol<C>, f_w: &Field) -> Result<f64> {
    if !a.is_real() {
        return Err(PsqmError::InvalidParameter(
            "observable must have real coefficients".into(),
        ));
    }
    let av = Field::sample_symbol(f_w.grid().clone(), a)?;
    let v = av.mul(f_w)?.integrate();
    let scale = v.re.abs().max(1.0);
    if v.im.abs() > EXPECTATION_IMAG_TOL * scale {
        return Err(PsqmError::ImaginaryResidue {
            residue: v.im.abs(),
            tol: EXPECTATION_IMAG_TOL,
        });
    }
    Ok(v.re)
}

/// Output of [`evolve`].
#[derive(Clone, Debug)]
pub struct Evolution {
    pub field: Field,
    pub steps: usize,
    pub dt: f64,
    /// Largest `|‖ψ(t)‖/‖ψ(0)‖ − 1|` seen.
    pub norm_drift: f64,
    /// Power-iteration estimate of the spectral radius of `H⋆/ħ`.
    pub spectral_radius: f64,
    /// `spectral_radius · dt` within the RK4 bound.
    pub stable: bool,
}

const POWER_ITERATIONS: usize = 30;

/// Spectral radius of a compiled operator by power iteration from a fixed start.
pub fn spectral_radius(op: &GridOperator) -> Result<f64> {
    let grid = op.grid().clone();
    // deterministic, broadband start vector
    let mut v = Field::from_values(
        grid.clone(),
        (0..grid.len())
            .map(|k| Complex64::new((k as f64 * 0.618_033_988_749_895).fract() - 0.5, 0.0))
            .collect(),
    )?
    .normalize()?;
    let mut rho = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = op.apply(&v)?;
        rho = w.norm();
        if rho == 0.0 {
            break;
        }
        v = w.scale(Complex64::new(1.0 / rho, 0.0));
    }
    Ok(rho)
}

/// Integrate `iħ ∂_t ψ = H⋆ψ` to `t_final` with classical RK4.
///
/// The number of steps is `⌈t_final/dt⌉` with the step shrunk to land on
/// `t_final`. A step size beyond the RK4 stability bound only logs a warning;
/// a relative norm drift above [`NORM_DRIFT_LIMIT`] aborts.
pub fn evolve<C: Scalar>(
    psi: &Field,
    h: &PolynomialSymbol<C>,
    t_final: f64,
    dt: f64,
    nc: &NcParams<C>,
) -> Result<Evolution> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(PsqmError::InvalidParameter(format!(
            "t_final must be finite and nonnegative, got {t_final}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PsqmError::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !h.is_real() {
        return Err(PsqmError::InvalidParameter(
            "Hamiltonian must have real coefficients".into(),
        ));
    }
    let hbar = nc.hbar().to_c64().re;
    let op = GridOperator::compile(&bopp_operator(h, nc)?, psi.grid().clone())?;
    let rho = spectral_radius(&op)? / hbar;
    let steps = (t_final / dt).ceil() as usize;
    let step = if steps == 0 {
        dt
    } else {
        t_final / steps as f64
    };
    let stable = rho * step <= RK4_IMAGINARY_BOUND;
    if !stable {
        log::warn!("dt = {step:e} exceeds the RK4 bound for spectral radius {rho:.3e}");
    }
    let minus_i_over_hbar = Complex64::new(0.0, -1.0 / hbar);
    let rhs = |f: &Field| -> Result<Field> { Ok(op.apply(f)?.scale(minus_i_over_hbar)) };
    let n0 = psi.norm();
    if !(n0 > 0.0) {
        return Err(PsqmError::ZeroState);
    }
    let mut f = psi.clone();
    let mut drift: f64 = 0.0;
    for s in 0..steps {
        let c = |x: f64| Complex64::new(x, 0.0);
        let k1 = rhs(&f)?;
        let k2 = rhs(&f.add(&k1.scale(c(0.5 * step)))?)?;
        let k3 = rhs(&f.add(&k2.scale(c(0.5 * step)))?)?;
        let k4 = rhs(&f.add(&k3.scale(c(step)))?)?;
        let incr = k1
            .add(&k2.scale(c(2.0)))?
            .add(&k3.scale(c(2.0)))?
            .add(&k4)?;
        f = f.add(&incr.scale(c(step / 6.0)))?;
        let d = (f.norm() / n0 - 1.0).abs();
        drift = drift.max(d);
        if !(d <= NORM_DRIFT_LIMIT) {
            return Err(PsqmError::NormDrift {
                drift: d,
                time: (s + 1) as f64 * step,
                limit: NORM_DRIFT_LIMIT,
            });
        }
    }
    Ok(Evolution {
        field: f,
        steps,
        dt: step,
        norm_drift: drift,
        spectral_radius: rho,
        stable,
    })
}

/// `(1/π) e^{−(q² + p²)}` on a one-dimensional phase space: the ground-state Wigner function.
pub fn ground_wigner_1d(u: &[f64]) -> f64 {
    (-(u[0] * u[0] + u[1] * u[1])).exp() / PI
}
