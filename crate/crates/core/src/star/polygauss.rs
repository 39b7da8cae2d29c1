use std::collections::HashMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::{bopp_operator, NcParams, PolynomialSymbol};
use crate::error::{PsqmError, Result};
use crate::scalar::{ExactComplex, Scalar};
use crate::weyl::WeylOperator;

/// `prefactor · poly(u) · exp(−uᵀ A u)` with `A` real, symmetric and positive definite.
///
/// The prefactor is a floating-point normalisation that stays outside the
/// exact calculus; operators act on `poly` only.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGaussForm<C: Scalar = ExactComplex> {
    pub poly: PolynomialSymbol<C>,
    quad: Vec<Vec<C>>,
    pub prefactor: f64,
}

fn leading_minors_positive(a: &[Vec<f64>]) -> bool {
    // Cholesky succeeds iff every leading principal minor is positive.
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

impl<C: Scalar> PolyGaussForm<C> {
    pub fn new(poly: PolynomialSymbol<C>, quad: Vec<Vec<C>>) -> Result<Self> {
        let n = poly.nvars();
        if quad.len() != n || quad.iter().any(|r| r.len() != n) {
            return Err(PsqmError::DimensionMismatch(format!(
                "quadratic form must be {n}x{n}"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if quad[i][j] != quad[j][i] || quad[i][j].conj() != quad[i][j] {
                    return Err(PsqmError::InvalidParameter(
                        "quadratic form must be real symmetric".into(),
                    ));
                }
            }
        }
        let f: Vec<Vec<f64>> = quad
            .iter()
            .map(|r| r.iter().map(|c| c.to_c64().re).collect())
            .collect();
        if !leading_minors_positive(&f) {
            return Err(PsqmError::InvalidParameter(
                "quadratic form is not positive definite".into(),
            ));
        }
        Ok(PolyGaussForm {
            poly,
            quad,
            prefactor: 1.0,
        })
    }

    /// `poly · exp(−a Σ u²)`.
    pub fn isotropic(poly: PolynomialSymbol<C>, a: C) -> Result<Self> {
        let n = poly.nvars();
        let quad = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { a.clone() } else { C::zero() })
                    .collect()
            })
            .collect();
        Self::new(poly, quad)
    }

    pub fn with_prefactor(mut self, prefactor: f64) -> Self {
        self.prefactor = prefactor;
        self
    }

    /// Same Gaussian, different polynomial.
    pub fn with_poly(&self, poly: PolynomialSymbol<C>) -> Self {
        assert_eq!(poly.dim(), self.dim());
        PolyGaussForm {
            poly,
            quad: self.quad.clone(),
            prefactor: self.prefactor,
        }
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn quad(&self) -> &[Vec<C>] {
        &self.quad
    }

    /// The diagonal of `A` if `A` is diagonal.
    pub fn diagonal(&self) -> Option<Vec<C>> {
        let n = self.quad.len();
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.quad[i][j].is_zero() {
                    return None;
                }
            }
        }
        Some((0..n).map(|i| self.quad[i][i].clone()).collect())
    }

    /// The common diagonal value if `A = a·I`.
    pub fn isotropic_width(&self) -> Option<C> {
        let d = self.diagonal()?;
        d.iter().all(|x| *x == d[0]).then(|| d[0].clone())
    }

    pub fn quad_f64(&self) -> Vec<Vec<f64>> {
        self.quad
            .iter()
            .map(|r| r.iter().map(|c| c.to_c64().re).collect())
            .collect()
    }

    /// `uᵀ A u` in floating point.
    pub fn exponent(&self, u: &[f64]) -> f64 {
        let a = self.quad_f64();
        let mut s = 0.0;
        for i in 0..u.len() {
            for j in 0..u.len() {
                s += u[i] * a[i][j] * u[j];
            }
        }
        s
    }

    pub fn eval(&self, u: &[f64]) -> Complex64 {
        self.poly.eval(u) * (self.prefactor * (-self.exponent(u)).exp())
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// `D_k p = ∂_k p − 2 (A u)_k p`, so that `∂_k[p·G] = (D_k p)·G`.
    fn d_poly(&self, p: &PolynomialSymbol<C>, k: usize) -> PolynomialSymbol<C> {
        let dim = p.dim();
        let two = C::from_int(2);
        let mut lin = vec![C::zero(); 2 * dim];
        for (j, l) in lin.iter_mut().enumerate() {
            *l = self.quad[k][j].mul(&two).neg();
        }
        p.derivative(k)
            .plus(&p.times(&PolynomialSymbol::linear(dim, &lin)))
    }

    /// Exact integral against the Gaussian, divided by `∫ exp(−uᵀAu)`. Needs diagonal `A`.
    pub fn gaussian_average(&self, w: &PolynomialSymbol<C>) -> Result<C> {
        let diag = self.diagonal().ok_or_else(|| {
            PsqmError::InvalidParameter("exact moments need a diagonal quadratic form".into())
        })?;
        gaussian_moment_diag(w, &diag)
    }

    /// `∫ self du` in floating point (diagonal `A` only).
    pub fn integral(&self) -> Result<Complex64> {
        let diag = self.diagonal().ok_or_else(|| {
            PsqmError::InvalidParameter("exact moments need a diagonal quadratic form".into())
        })?;
        let avg = gaussian_moment_diag(&self.poly, &diag)?.to_c64();
        let vol: f64 = diag
            .iter()
            .map(|a| (std::f64::consts::PI / a.to_c64().re).sqrt())
            .product();
        Ok(avg * vol * self.prefactor)
    }

    pub fn to_complex64(&self) -> PolyGaussForm<Complex64> {
        PolyGaussForm {
            poly: self.poly.to_complex64(),
            quad: self
                .quad
                .iter()
                .map(|r| r.iter().map(|c| c.to_c64()).collect())
                .collect(),
            prefactor: self.prefactor,
        }
    }

    pub fn to_json(&self) -> Value {
        let quad: Vec<Value> = self.quad.iter().flatten().map(|c| c.to_json()).collect();
        json!({
            "dim": self.dim(),
            "poly": self.poly.to_json(),
            "quad": quad,
            "prefactor": self.prefactor,
        })
    }
}

/// `⟨u^α⟩` under `exp(−Σ a_k u_k²)`, normalised: `Π (2m−1)!! / (2a)^m` for `α = 2m`.
pub(crate) fn gaussian_moment_diag<C: Scalar>(w: &PolynomialSymbol<C>, diag: &[C]) -> Result<C> {
    let mut total = C::zero();
    'terms: for (exps, c) in w.terms() {
        let mut v = c.clone();
        for (k, &e) in exps.iter().enumerate() {
            if e % 2 == 1 {
                continue 'terms;
            }
            let two_a = diag[k].mul(&C::from_int(2));
            let inv = two_a
                .recip()
                .ok_or_else(|| PsqmError::InvalidParameter("zero Gaussian width".into()))?;
            for m in 1..=(e / 2) as i64 {
                v = v.mul(&C::from_int(2 * m - 1)).mul(&inv);
            }
        }
        total = total.add(&v);
    }
    Ok(total)
}

/// Apply a differential operator to a polynomial-Gaussian state; the quadratic form is unchanged.
pub fn polygauss_apply<C: Scalar>(
    op: &WeylOperator<C>,
    s: &PolyGaussForm<C>,
) -> Result<PolyGaussForm<C>> {
    if op.dim() != s.dim() {
        return Err(PsqmError::DimensionMismatch(format!(
            "operator d = {}, state d = {}",
            op.dim(),
            s.dim()
        )));
    }
    let n = s.poly.nvars();
    let mut memo: HashMap<Vec<u16>, PolynomialSymbol<C>> = HashMap::new();
    memo.insert(vec![0; n], s.poly.clone());
    let mut out = PolynomialSymbol::zero(s.dim());
    for (coords, derivs, c) in op.terms() {
        let dp = derive(s, derivs, &mut memo);
        if !dp.is_zero() {
            out = out.plus(&dp.times_monomial(coords, c));
        }
    }
    Ok(s.with_poly(out))
}

fn derive<C: Scalar>(
    s: &PolyGaussForm<C>,
    beta: &[u16],
    memo: &mut HashMap<Vec<u16>, PolynomialSymbol<C>>,
) -> PolynomialSymbol<C> {
    if let Some(p) = memo.get(beta) {
        return p.clone();
    }
    let k = beta
        .iter()
        .position(|&b| b > 0)
        .expect("zero multi-index is seeded");
    let mut lower = beta.to_vec();
    lower[k] -= 1;
    let base = derive(s, &lower, memo);
    let p = s.d_poly(&base, k);
    memo.insert(beta.to_vec(), p.clone());
    p
}

/// Outcome of an eigenvalue test `H ⋆ s = E s`.
#[derive(Clone, Debug)]
pub struct EigenCheck<C: Scalar> {
    pub is_eigen: bool,
    pub energy: C,
    /// `H⋆s − E s`; zero when `is_eigen`.
    pub residual: PolyGaussForm<C>,
    /// Coefficient norm of the residual relative to that of `s`.
    pub relative_residual: f64,
}

const EIGEN_TOL: f64 = 1e-12;

/// Least-squares eigenvalue of `r ≈ λ s` on the coefficient vectors.
fn ls_ratio<C: Scalar>(r: &PolynomialSymbol<C>, s: &PolynomialSymbol<C>) -> C {
    let mut num = C::zero();
    let mut den = C::zero();
    for (k, c) in s.terms() {
        num = num.add(&c.conj().mul(&r.coefficient(k)));
        den = den.add(&c.conj().mul(c));
    }
    num.div(&den).expect("s is nonzero")
}

/// Decide whether `s` is a star-eigenfunction of the symbol `h`.
pub fn check_star_eigen<C: Scalar>(
    h: &PolynomialSymbol<C>,
    s: &PolyGaussForm<C>,
    nc: &NcParams<C>,
) -> Result<EigenCheck<C>> {
    if s.is_zero() {
        return Err(PsqmError::ZeroState);
    }
    let r = polygauss_apply(&bopp_operator(h, nc)?, s)?;
    let lambda = ls_ratio(&r.poly, &s.poly);
    let resid = r.poly.minus(&s.poly.scale(&lambda));
    let rel = resid.coeff_norm() / s.poly.coeff_norm();
    let is_eigen = if C::EXACT {
        resid.is_zero()
    } else {
        resid.coeff_norm() <= EIGEN_TOL * r.poly.coeff_norm().max(f64::MIN_POSITIVE)
    };
    let residual = if is_eigen {
        s.with_poly(PolynomialSymbol::zero(s.dim()))
    } else {
        s.with_poly(resid)
    };
    Ok(EigenCheck {
        is_eigen,
        energy: lambda,
        residual,
        relative_residual: if is_eigen { 0.0 } else { rel },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    type P = PolynomialSymbol<ExactComplex>;
    fn ex(n: i64, d: i64) -> ExactComplex {
        ExactComplex::ratio(n, d)
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = PolyGaussForm::isotropic(P::var(1, 0).pow(2), ex(1, 1)).unwrap();
        let r = polygauss_apply(&WeylOperator::identity(1), &s).unwrap();
        assert_eq!(r, s);
    }

    #[test]
    fn bopp_q_on_gaussian() {
        let nc = NcParams::moyal(ex(1, 1)).unwrap();
        let s = PolyGaussForm::isotropic(P::one(1), ex(1, 1)).unwrap();
        let r = polygauss_apply(&bopp_operator(&P::var(1, 0), &nc).unwrap(), &s).unwrap();
        let expect = P::var(1, 0).minus(&P::var(1, 1).scale(&ExactComplex::i()));
        assert_eq!(r.poly, expect);
    }

    #[test]
    fn rejects_bad_forms() {
        let bad = vec![vec![ex(1, 1), ex(2, 1)], vec![ex(2, 1), ex(1, 1)]];
        assert!(PolyGaussForm::new(P::one(1), bad).is_err());
        let asym = vec![vec![ex(1, 1), ex(0, 1)], vec![ex(1, 2), ex(1, 1)]];
        assert!(PolyGaussForm::new(P::one(1), asym).is_err());
        assert!(PolyGaussForm::isotropic(P::one(1), ex(-1, 1)).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let s = PolyGaussForm::isotropic(P::one(1), ex(1, 1)).unwrap();
        assert!(matches!(
            polygauss_apply(&WeylOperator::identity(2), &s),
            Err(PsqmError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn moments_and_integral() {
        // ∫ q² e^{−q²−p²} = π/2, ∫ e^{−q²−p²} = π
        let s = PolyGaussForm::isotropic(P::var(1, 0).pow(2), ex(1, 1)).unwrap();
        assert_eq!(s.gaussian_average(&P::var(1, 0).pow(2)).unwrap(), ex(1, 2));
        assert!((s.integral().unwrap().re - std::f64::consts::PI / 2.0).abs() < 1e-14);
        assert!(s.gaussian_average(&P::var(1, 0)).unwrap().is_zero());
    }

    #[test]
    fn ground_state_eigen_exact_and_float() {
        let nc = NcParams::moyal(ex(1, 1)).unwrap();
        let h = P::radius_squared(1).scale(&ex(1, 2));
        let s = PolyGaussForm::isotropic(P::one(1), ex(1, 1)).unwrap();
        let e = check_star_eigen(&h, &s, &nc).unwrap();
        assert!(e.is_eigen);
        assert_eq!(e.energy, ex(1, 2));
        let ef =
            check_star_eigen(&h.to_complex64(), &s.to_complex64(), &nc.to_complex64()).unwrap();
        assert!(ef.is_eigen);
        assert!((ef.energy.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wrong_width_is_not_eigen() {
        let nc = NcParams::moyal(ex(1, 1)).unwrap();
        let h = P::radius_squared(1).scale(&ex(1, 2));
        let s = PolyGaussForm::isotropic(P::one(1), ex(1, 2)).unwrap();
        let e = check_star_eigen(&h, &s, &nc).unwrap();
        assert!(!e.is_eigen);
        assert!(!e.residual.is_zero());
        assert!(e.relative_residual > 0.1);
    }

    #[test]
    fn zero_state_errors() {
        let nc = NcParams::moyal(ex(1, 1)).unwrap();
        let s = PolyGaussForm::isotropic(P::zero(1), ex(1, 1)).unwrap();
        assert_eq!(
            check_star_eigen(&P::one(1), &s, &nc).unwrap_err(),
            PsqmError::ZeroState
        );
    }

    #[test]
    fn eval_at_origin() {
        let s =
            PolyGaussForm::isotropic(P::one(3), ExactComplex::from_rational(&rat(1, 1))).unwrap();
        assert_eq!(s.eval(&[0.0; 6]).re, 1.0);
        let u = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!((s.eval(&u).re - (-1.0f64).exp()).abs() < 1e-15);
    }
}
