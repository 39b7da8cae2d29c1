//! Exact star products of states built on a single isotropic Gaussian.
//!
//! When `ΩᵀΩ = ω² I`, the Gaussian `G = exp(−S/ω)` with `S = Σ u²` is
//! proportional to a pure-state projector: `G ⋆ G = 2^{−d} G` and
//! `G ⋆ w ⋆ G = ⟨w⟩ G ⋆ G` where `⟨w⟩ = ∫ w G / ∫ G`. States of the form
//! `Σ P_j ⋆ G ⋆ Q_j` are therefore closed under `⋆` with no series truncation.

use super::polygauss::gaussian_moment_diag;
use super::{
    bopp_operator, polygauss_apply, right_bopp_operator, star_poly, NcParams, PolyGaussForm,
    PolynomialSymbol,
};
use crate::error::{PsqmError, Result};
use crate::scalar::{ExactComplex, Scalar};

/// `⟨w⟩` under `exp(−a Σ u²)`, normalised to `⟨1⟩ = 1`.
pub fn gaussian_moment<C: Scalar>(w: &PolynomialSymbol<C>, a: &C) -> Result<C> {
    gaussian_moment_diag(w, &vec![a.clone(); w.nvars()])
}

fn omega_squared<C: Scalar>(dim: usize, nc: &NcParams<C>) -> Result<C> {
    nc.poisson_entries(dim)?;
    Ok(nc.omega_squared())
}

/// `exp(−aS) ⋆ exp(−bS) = (1 + abω²)^{−d} exp(−(a+b)/(1+abω²) S)`.
pub fn isotropic_gaussian_star<C: Scalar>(
    dim: usize,
    a: &C,
    b: &C,
    nc: &NcParams<C>,
) -> Result<PolyGaussForm<C>> {
    let w2 = omega_squared(dim, nc)?;
    let den = C::one().add(&a.mul(b).mul(&w2));
    let inv = den
        .recip()
        .ok_or_else(|| PsqmError::InvalidParameter("degenerate Gaussian product".into()))?;
    let width = a.add(b).mul(&inv);
    let mut coef = C::one();
    for _ in 0..dim {
        coef = coef.mul(&inv);
    }
    PolyGaussForm::isotropic(PolynomialSymbol::constant(dim, coef), width)
}

/// `Σ_j P_j ⋆ G ⋆ Q_j` for the projector Gaussian `G = exp(−S/ω)`.
#[derive(Clone, Debug)]
pub struct GaussSandwich<C: Scalar = ExactComplex> {
    nc: NcParams<C>,
    dim: usize,
    width: C,
    pub terms: Vec<(PolynomialSymbol<C>, PolynomialSymbol<C>)>,
}

impl<C: Scalar> GaussSandwich<C> {
    /// The bare projector Gaussian with width `a`; requires `a²ω² = 1`.
    pub fn vacuum(dim: usize, a: C, nc: &NcParams<C>) -> Result<Self> {
        let w2 = omega_squared(dim, nc)?;
        let prod = a.mul(&a).mul(&w2);
        let ok = if C::EXACT {
            prod.is_one()
        } else {
            (prod.to_c64() - 1.0).norm() < 1e-12
        };
        if !ok {
            return Err(PsqmError::InvalidParameter(format!(
                "Gaussian width {} is not a projector for omega^2 = {}",
                a.fmt_coeff(),
                w2.fmt_coeff()
            )));
        }
        let one = PolynomialSymbol::one(dim);
        Ok(GaussSandwich {
            nc: nc.clone(),
            dim,
            width: a,
            terms: vec![(one.clone(), one)],
        })
    }

    /// `P ⋆ G`.
    pub fn ket(&self, p: PolynomialSymbol<C>) -> Self {
        self.with_terms(vec![(p, PolynomialSymbol::one(self.dim))])
    }

    /// `G ⋆ Q`.
    pub fn bra(&self, q: PolynomialSymbol<C>) -> Self {
        self.with_terms(vec![(PolynomialSymbol::one(self.dim), q)])
    }

    pub fn with_terms(&self, terms: Vec<(PolynomialSymbol<C>, PolynomialSymbol<C>)>) -> Self {
        GaussSandwich {
            nc: self.nc.clone(),
            dim: self.dim,
            width: self.width.clone(),
            terms,
        }
    }

    pub fn width(&self) -> &C {
        &self.width
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn same_gaussian(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim || self.width != o.width || self.nc != o.nc {
            return Err(PsqmError::DimensionMismatch(
                "sandwiches built on different Gaussians".into(),
            ));
        }
        Ok(())
    }

    pub fn plus(&self, o: &Self) -> Result<Self> {
        self.same_gaussian(o)?;
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        Ok(self.with_terms(t))
    }

    pub fn scale(&self, c: &C) -> Self {
        self.with_terms(
            self.terms
                .iter()
                .map(|(p, q)| (p.scale(c), q.clone()))
                .collect(),
        )
    }

    /// `⟨w⟩` under the Gaussian.
    pub fn average(&self, w: &PolynomialSymbol<C>) -> Result<C> {
        gaussian_moment(w, &self.width)
    }

    /// Exact star product.
    pub fn star(&self, o: &Self) -> Result<Self> {
        self.same_gaussian(o)?;
        // G⋆G = 2^{−d} G
        let lambda = C::ratio(1, 1i64 << self.dim);
        let mut t = Vec::new();
        for (p, q) in &self.terms {
            for (p2, q2) in &o.terms {
                let avg = self.average(&star_poly(q, p2, &self.nc)?)?;
                if !avg.is_zero() {
                    t.push((p.scale(&avg.mul(&lambda)), q2.clone()));
                }
            }
        }
        Ok(self.with_terms(t))
    }

    /// `∫ (this) du / ∫ G du`, using `∫ P⋆G⋆Q = ∫ (Q⋆P) G`.
    pub fn relative_trace(&self) -> Result<C> {
        let mut s = C::zero();
        for (p, q) in &self.terms {
            s = s.add(&self.average(&star_poly(q, p, &self.nc)?)?);
        }
        Ok(s)
    }

    /// Expand into a single polynomial-Gaussian.
    pub fn to_polygauss(&self) -> Result<PolyGaussForm<C>> {
        let g = PolyGaussForm::isotropic(PolynomialSymbol::one(self.dim), self.width.clone())?;
        let mut poly = PolynomialSymbol::zero(self.dim);
        for (p, q) in &self.terms {
            let right = polygauss_apply(&right_bopp_operator(q, &self.nc)?, &g)?;
            let both = polygauss_apply(&bopp_operator(p, &self.nc)?, &right)?;
            poly = poly.plus(&both.poly);
        }
        Ok(g.with_poly(poly))
    }
}
