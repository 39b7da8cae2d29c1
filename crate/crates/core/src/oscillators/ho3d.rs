//! The isotropic 3D oscillator `H = Σ (q_i² + p_i²)/2` with `ħ = m = ω = 1`.
//!
//! With `S = Σ (q_i² + p_i²)` the star-eigenfunctions are
//! `Ψ_n = e^{−S} M(−n, 3, 2S)` with energy `n + 3/2`.

use super::special::kummer_coefficients;
use super::SpectrumResult;
use crate::error::Result;
use crate::scalar::{ExactComplex, Rational, Scalar};
use crate::star::{check_star_eigen, GaussSandwich, NcParams, PolyGaussForm, PolynomialSymbol};

type P = PolynomialSymbol<ExactComplex>;

fn ex(n: i64, d: i64) -> ExactComplex {
    ExactComplex::ratio(n, d)
}

/// `H = S/2` on six phase variables.
pub fn ho3d_hamiltonian() -> P {
    P::radius_squared(3).scale(&ex(1, 2))
}

pub fn ho3d_params() -> NcParams {
    NcParams::moyal(ExactComplex::one()).expect("unit hbar")
}

/// `M(−n, 3, 2S)` expanded in the phase variables.
pub fn ho3d_polynomial(n: u32) -> P {
    let s2 = P::radius_squared(3).scale(&ex(2, 1));
    let mut out = P::zero(3);
    let mut power = P::one(3);
    for c in kummer_coefficients(n, 3) {
        out = out.plus(&power.scale(&ExactComplex::from_rational(&c)));
        power = power.times(&s2);
    }
    out
}

/// `Ψ_n` with its exact eigenvalue check.
pub fn ho3d_state(n: u32) -> Result<SpectrumResult<ExactComplex>> {
    let state = PolyGaussForm::isotropic(ho3d_polynomial(n), ExactComplex::one())?;
    let check = check_star_eigen(&ho3d_hamiltonian(), &state, &ho3d_params())?;
    Ok(SpectrumResult {
        quantum_numbers: vec![n],
        energy: check.energy.to_c64().re,
        exact_energy: Some(check.energy.clone()),
        is_eigen: check.is_eigen,
        residual: check.relative_residual,
        theta: 0.0,
        state,
    })
}

/// `f_W^n ∝ Ψ_n`, scaled so that its phase-space integral is 1.
pub fn ho3d_wigner(n: u32) -> Result<PolyGaussForm<ExactComplex>> {
    let shape = PolyGaussForm::isotropic(ho3d_polynomial(n), ExactComplex::one())?;
    let total = shape.integral()?.re;
    Ok(shape.with_prefactor(1.0 / total))
}

/// Outcome of [`ho3d_idempotency`].
#[derive(Clone, Debug)]
pub struct Idempotency {
    /// `c` in `W = c Ψ_n`, where `W` is the shell projector.
    pub shape_ratio: ExactComplex,
    /// `κ` in `W ⋆ W = κ W`.
    pub square_ratio: ExactComplex,
    /// Both relations hold exactly.
    pub exact: bool,
}

/// Exact ratio `a = c b` of two polynomials, if one exists.
fn proportional(a: &P, b: &P) -> Option<ExactComplex> {
    let (k, cb) = b.terms().next()?;
    let c = a.coefficient(k).div(cb)?;
    (a == &b.scale(&c)).then_some(c)
}

/// Checks that `Ψ_n ⋆ Ψ_n ∝ Ψ_n` exactly.
///
/// `Ψ_n` is proportional to the energy-shell projector
/// `W = Σ_{|m|=n} (1/m!) z^m ⋆ G ⋆ z̄^m` with `z_i = q_i − i p_i`, `G = e^{−S}`.
/// Both the shape and the square of `W` are computed without truncation.
pub fn ho3d_idempotency(n: u32) -> Result<Idempotency> {
    let nc = ho3d_params();
    let vac = GaussSandwich::vacuum(3, ExactComplex::one(), &nc)?;
    let i = ExactComplex::i();
    let z: Vec<P> = (0..3)
        .map(|k| P::var(3, k).minus(&P::var(3, k + 3).scale(&i)))
        .collect();
    let zb: Vec<P> = z.iter().map(|p| p.conj()).collect();
    let mut terms = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            let m = [a, b, n - a - b];
            let mut fact = Rational::from_integer(1.into());
            let mut ket = P::one(3);
            let mut bra = P::one(3);
            for k in 0..3 {
                ket = ket.times(&z[k].pow(m[k]));
                bra = bra.times(&zb[k].pow(m[k]));
                for j in 1..=m[k] as i64 {
                    fact *= Rational::from_integer(j.into());
                }
            }
            terms.push((
                ket.scale(&ExactComplex::from_rational(&fact).recip().expect("nonzero")),
                bra,
            ));
        }
    }
    let w = vac.with_terms(terms);
    let shape = w.to_polygauss()?.poly;
    let square = w.star(&w)?.to_polygauss()?.poly;
    let psi = ho3d_polynomial(n);
    let shape_ratio = proportional(&shape, &psi);
    let square_ratio = proportional(&square, &shape);
    Ok(Idempotency {
        exact: shape_ratio.is_some() && square_ratio.is_some(),
        shape_ratio: shape_ratio.unwrap_or_else(ExactComplex::zero),
        square_ratio: square_ratio.unwrap_or_else(ExactComplex::zero),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state() {
        let r = ho3d_state(0).unwrap();
        assert!(r.is_eigen);
        assert_eq!(r.exact_energy, Some(ex(3, 2)));
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.state.poly, P::one(3));
    }

    #[test]
    fn excited_states_exact() {
        for n in 1..=3 {
            let r = ho3d_state(n).unwrap();
            assert!(r.is_eigen, "n = {n}");
            assert_eq!(r.exact_energy, Some(ex(2 * n as i64 + 3, 2)));
        }
    }

    #[test]
    fn psi1_at_origin() {
        let s = ho3d_state(1).unwrap().state;
        assert_eq!(s.eval(&[0.0; 6]).re, 1.0);
    }

    #[test]
    fn wigner_normalisation_and_sign_change() {
        let w0 = ho3d_wigner(0).unwrap();
        let pi3 = std::f64::consts::PI.powi(3);
        assert!((w0.eval(&[0.0; 6]).re - 1.0 / pi3).abs() < 1e-15);
        let w1 = ho3d_wigner(1).unwrap();
        assert!((w1.integral().unwrap().re - 1.0).abs() < 1e-14);
        // zero of 1 − 4ζ/3 at ζ = (q² + p²)/2 = 3/4
        let at = |zeta: f64| w1.eval(&[(2.0 * zeta).sqrt(), 0.0, 0.0, 0.0, 0.0, 0.0]).re;
        assert!(at(0.74) * at(0.76) < 0.0);
        assert!(at(0.75).abs() < 1e-15);
    }

    #[test]
    fn idempotency_small_n() {
        for n in 0..=2 {
            let r = ho3d_idempotency(n).unwrap();
            assert!(r.exact, "n = {n}");
        }
        // G ⋆ G = G/8 in three dimensions
        assert_eq!(ho3d_idempotency(0).unwrap().square_ratio, ex(1, 8));
    }
}
