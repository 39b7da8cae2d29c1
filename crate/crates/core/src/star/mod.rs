//! Star-product calculus on polynomial symbols.
//!
//! The product is `exp((i/2) Σ Ω_ab ←∂_a →∂_b)` with the antisymmetric
//! Poisson matrix `Ω`: `Ω(q_i, p_i) = ħ`, and for `d = 2` additionally
//! `Ω(x, y) = θ`, `Ω(p_x, p_y) = −θ`. Left multiplication `a⋆` is the Bopp
//! operator of `a`; it is built by expanding the bidifferential series, which
//! gives the Weyl-symmetric result directly in normal order.

mod gauss;
mod polygauss;
mod symbol;

use std::collections::BTreeMap;

pub use gauss::{gaussian_moment, isotropic_gaussian_star, GaussSandwich};
pub use polygauss::{check_star_eigen, polygauss_apply, EigenCheck, PolyGaussForm};
pub use symbol::PolynomialSymbol;

use crate::error::{PsqmError, Result};
use crate::scalar::{ExactComplex, Scalar};
use crate::weyl::WeylOperator;

/// Deformation parameters `ħ > 0` and real `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NcParams<C: Scalar = ExactComplex> {
    hbar: C,
    theta: C,
}

impl<C: Scalar> NcParams<C> {
    pub fn new(hbar: C, theta: C) -> Result<Self> {
        let h = hbar.to_c64();
        if hbar.conj() != hbar || !(h.re > 0.0) {
            return Err(PsqmError::InvalidParameter(format!(
                "hbar must be real and positive, got {h}"
            )));
        }
        if theta.conj() != theta || !theta.to_c64().re.is_finite() {
            return Err(PsqmError::InvalidParameter("theta must be real".into()));
        }
        Ok(NcParams { hbar, theta })
    }

    /// Commutative parameters.
    pub fn moyal(hbar: C) -> Result<Self> {
        Self::new(hbar, C::zero())
    }

    pub fn hbar(&self) -> &C {
        &self.hbar
    }

    pub fn theta(&self) -> &C {
        &self.theta
    }

    pub fn is_commutative(&self) -> bool {
        self.theta.is_zero()
    }

    pub fn to_complex64(&self) -> NcParams<num_complex::Complex64> {
        NcParams {
            hbar: self.hbar.to_c64(),
            theta: self.theta.to_c64(),
        }
    }

    /// Nonzero entries `(a, b, Ω_ab)` of the Poisson matrix on `2·dim` variables.
    pub fn poisson_entries(&self, dim: usize) -> Result<Vec<(usize, usize, C)>> {
        if dim == 0 {
            return Err(PsqmError::InvalidParameter(
                "dimension must be positive".into(),
            ));
        }
        if !self.theta.is_zero() && dim != 2 {
            return Err(PsqmError::DimensionMismatch(format!(
                "theta needs d = 2, got d = {dim}"
            )));
        }
        let mut out = Vec::new();
        for i in 0..dim {
            out.push((i, dim + i, self.hbar.clone()));
            out.push((dim + i, i, self.hbar.neg()));
        }
        if !self.theta.is_zero() {
            let t = &self.theta;
            out.push((0, 1, t.clone()));
            out.push((1, 0, t.neg()));
            out.push((2, 3, t.neg()));
            out.push((3, 2, t.clone()));
        }
        out.sort_by_key(|e| (e.0, e.1));
        Ok(out)
    }

    /// `ω² = ħ² + θ²`, the common value of the diagonal of `ΩᵀΩ`.
    pub fn omega_squared(&self) -> C {
        self.hbar.mul(&self.hbar).add(&self.theta.mul(&self.theta))
    }

    fn flipped(&self) -> Self {
        NcParams {
            hbar: self.hbar.neg(),
            theta: self.theta.neg(),
        }
    }
}

/// One bidifferential term `c · ←∂^L →∂^R`.
#[derive(Clone, Debug, PartialEq)]
pub struct StarTerm<C: Scalar> {
    pub left: Vec<u16>,
    pub right: Vec<u16>,
    pub coeff: C,
}

/// The star series up to `max_order`, grouped by order. Each group is sorted
/// lexicographically by `(left, right)`, and the order-`k` coefficients
/// already contain `(i/2)^k / k!`.
pub fn star_expansion<C: Scalar>(
    dim: usize,
    nc: &NcParams<C>,
    max_order: usize,
) -> Result<Vec<Vec<StarTerm<C>>>> {
    let pairs = nc.poisson_entries(dim)?;
    let n = 2 * dim;
    let half_i = C::i().mul(&C::ratio(1, 2));
    let mut cur: BTreeMap<(Vec<u16>, Vec<u16>), C> = BTreeMap::new();
    cur.insert((vec![0; n], vec![0; n]), C::one());
    let mut out = Vec::with_capacity(max_order + 1);
    for k in 0..=max_order {
        out.push(
            cur.iter()
                .map(|((l, r), c)| StarTerm {
                    left: l.clone(),
                    right: r.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        );
        if k == max_order {
            break;
        }
        let step = half_i.mul(&C::ratio(1, (k + 1) as i64));
        let mut next: BTreeMap<(Vec<u16>, Vec<u16>), C> = BTreeMap::new();
        for ((l, r), c) in &cur {
            for (a, b, w) in &pairs {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2[*a] += 1;
                r2[*b] += 1;
                let v = c.mul(w).mul(&step);
                let e = next.entry((l2, r2)).or_insert_with(C::zero);
                *e = e.add(&v);
            }
        }
        next.retain(|_, c| !c.is_zero());
        cur = next;
    }
    Ok(out)
}

fn bopp_from_terms<C: Scalar>(
    a: &PolynomialSymbol<C>,
    nc: &NcParams<C>,
    swap: bool,
) -> Result<WeylOperator<C>> {
    let dim = a.dim();
    let series = star_expansion(dim, nc, a.degree())?;
    let mut op = WeylOperator::zero(dim);
    for t in series.iter().flatten() {
        let (on_a, on_f) = if swap {
            (&t.right, &t.left)
        } else {
            (&t.left, &t.right)
        };
        let da = a.partial(on_a);
        for (exps, c) in da.terms() {
            let mut key = exps.to_vec();
            key.extend_from_slice(on_f);
            op.accumulate(key, c.mul(&t.coeff));
        }
    }
    Ok(op)
}

/// The operator `f ↦ a ⋆ f`.
pub fn bopp_operator<C: Scalar>(
    a: &PolynomialSymbol<C>,
    nc: &NcParams<C>,
) -> Result<WeylOperator<C>> {
    bopp_from_terms(a, nc, false)
}

/// The operator `f ↦ f ⋆ a`.
pub fn right_bopp_operator<C: Scalar>(
    a: &PolynomialSymbol<C>,
    nc: &NcParams<C>,
) -> Result<WeylOperator<C>> {
    bopp_from_terms(a, nc, true)
}

/// Left multiplication in the complex-conjugate convention (`q − (iħ/2)∂p`, ...).
pub fn conjugate_bopp_operator<C: Scalar>(
    a: &PolynomialSymbol<C>,
    nc: &NcParams<C>,
) -> Result<WeylOperator<C>> {
    bopp_from_terms(a, &nc.flipped(), false)
}

/// Apply a differential operator to a polynomial.
pub fn apply_to_polynomial<C: Scalar>(
    op: &WeylOperator<C>,
    f: &PolynomialSymbol<C>,
) -> Result<PolynomialSymbol<C>> {
    if op.dim() != f.dim() {
        return Err(PsqmError::DimensionMismatch(format!(
            "operator d = {}, symbol d = {}",
            op.dim(),
            f.dim()
        )));
    }
    let mut out = PolynomialSymbol::zero(f.dim());
    for (coords, derivs, c) in op.terms() {
        let df = f.partial(derivs);
        if !df.is_zero() {
            out = out.plus(&df.times_monomial(coords, c));
        }
    }
    Ok(out)
}

/// Exact star product of two polynomial symbols.
pub fn star_poly<C: Scalar>(
    a: &PolynomialSymbol<C>,
    b: &PolynomialSymbol<C>,
    nc: &NcParams<C>,
) -> Result<PolynomialSymbol<C>> {
    apply_to_polynomial(&bopp_operator(a, nc)?, b)
}

/// Constant commutators of the Bopp-shifted phase variables, indexed `[i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorTable<C: Scalar> {
    pub qq: Vec<Vec<C>>,
    pub pp: Vec<Vec<C>>,
    pub qp: Vec<Vec<C>>,
}

impl<C: Scalar> CommutatorTable<C> {
    /// Compare with `[q_i,p_j] = iħδ_ij`, `[q_i,q_j] = iθ_ij`, `[p_i,p_j] = −iθ_ij`.
    pub fn matches_canonical(&self, nc: &NcParams<C>) -> bool {
        let d = self.qq.len();
        let i = C::i();
        let theta_hat = |a: usize, b: usize| -> C {
            if d == 2 && a != b {
                if a < b {
                    nc.theta.clone()
                } else {
                    nc.theta.neg()
                }
            } else {
                C::zero()
            }
        };
        (0..d).all(|a| {
            (0..d).all(|b| {
                let delta = if a == b { nc.hbar.clone() } else { C::zero() };
                self.qp[a][b] == i.mul(&delta)
                    && self.qq[a][b] == i.mul(&theta_hat(a, b))
                    && self.pp[a][b] == i.mul(&theta_hat(a, b)).neg()
            })
        })
    }
}

/// Commutators `[u_a⋆, u_b⋆]` computed in the Weyl algebra for the given dimension.
pub fn star_commutator_constants<C: Scalar>(
    dim: usize,
    nc: &NcParams<C>,
) -> Result<CommutatorTable<C>> {
    let ops: Vec<WeylOperator<C>> = (0..2 * dim)
        .map(|k| bopp_operator(&PolynomialSymbol::var(dim, k), nc))
        .collect::<Result<_>>()?;
    let c = |a: usize, b: usize| -> Result<C> {
        let com = ops[a].commutator(&ops[b])?;
        com.as_constant().ok_or_else(|| {
            PsqmError::InvalidParameter(format!("commutator [{a},{b}] is not a constant"))
        })
    };
    let mut t = CommutatorTable {
        qq: Vec::new(),
        pp: Vec::new(),
        qp: Vec::new(),
    };
    for i in 0..dim {
        let mut qq = Vec::new();
        let mut pp = Vec::new();
        let mut qp = Vec::new();
        for j in 0..dim {
            qq.push(c(i, j)?);
            pp.push(c(dim + i, dim + j)?);
            qp.push(c(i, dim + j)?);
        }
        t.qq.push(qq);
        t.pp.push(pp);
        t.qp.push(qp);
    }
    Ok(t)
}
