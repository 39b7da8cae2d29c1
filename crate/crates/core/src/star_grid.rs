//! Star products of sampled fields.
//!
//! Two independent routes: [`star_apply_poly`] applies the finite Bopp
//! operator of a polynomial symbol with spectral derivatives, and
//! [`star_series`] sums the truncated bidifferential series for two arbitrary
//! fields. Each serves as the other's oracle where both apply.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{PsqmError, Result};
use crate::grid::{fft_axis_into, ifft_axis_prescaled_into, Field, PhaseGrid};
use crate::scalar::Scalar;
use crate::star::{bopp_operator, star_expansion, NcParams, PolynomialSymbol};
use crate::weyl::WeylOperator;

/// Highest truncation order accepted by [`star_series`].
pub const SERIES_ORDER_CAP: usize = 24;

/// Relative size of the last series order above which a warning is logged.
pub const SERIES_TOL: f64 = 1e-12;

/// Mixed spectral partials of one field, cached along a chain of axes.
///
/// Level `j` holds the derivative along the first `j+1` axes of `order`;
/// requests in lexicographic order reuse every unchanged prefix, and each
/// level keeps the axis transform of its parent so changing only the last
/// exponent costs one inverse transform.
struct DerivStack {
    shape: Vec<usize>,
    order: Vec<usize>,
    base: Vec<Complex64>,
    mults: Vec<Vec<Vec<Complex64>>>,
    levels: Vec<Level>,
}

#[derive(Default)]
struct Level {
    m: Option<u16>,
    hat: Vec<Complex64>,
    hat_ok: bool,
    value: Vec<Complex64>,
    value_ok: bool,
}

impl DerivStack {
    fn new(field: &Field, order: Vec<usize>, max_m: usize) -> Self {
        let grid = field.grid();
        let mults = grid
            .axes()
            .iter()
            .map(|a| {
                (0..=max_m as u32)
                    .map(|m| a.derivative_multipliers_prescaled(m))
                    .collect()
            })
            .collect();
        let levels = order.iter().map(|_| Level::default()).collect();
        DerivStack {
            shape: grid.shape(),
            order,
            base: field.values().to_vec(),
            mults,
            levels,
        }
    }

    /// `∂^β` of the base field, where `beta` is indexed by grid axis.
    fn get(&mut self, beta: &[u16]) -> &[Complex64] {
        let depth = self.order.len();
        let first = (0..depth)
            .find(|&j| self.levels[j].m != Some(beta[self.order[j]]))
            .unwrap_or(depth);
        for j in first..depth {
            let m = beta[self.order[j]];
            let (before, rest) = self.levels.split_at_mut(j);
            let lvl = &mut rest[0];
            if j > first {
                lvl.hat_ok = false;
            }
            lvl.m = Some(m);
            lvl.value_ok = false;
            if m == 0 {
                continue;
            }
            let axis = self.order[j];
            let parent = before
                .iter()
                .rev()
                .find(|l| l.value_ok)
                .map_or(&self.base[..], |l| &l.value[..]);
            if !lvl.hat_ok {
                fft_axis_into(parent, &mut lvl.hat, &self.shape, axis);
                lvl.hat_ok = true;
            }
            ifft_axis_prescaled_into(
                &lvl.hat,
                &mut lvl.value,
                &self.shape,
                axis,
                &self.mults[axis][m as usize],
            );
            lvl.value_ok = true;
        }
        self.levels
            .iter()
            .rev()
            .find(|l| l.value_ok)
            .map_or(&self.base[..], |l| &l.value[..])
    }
}

/// A polynomial-coefficient differential operator compiled for one grid:
/// `Σ_β M_β(u) ∂^β` with the multiplier fields `M_β` sampled once.
pub struct GridOperator {
    grid: Arc<PhaseGrid>,
    groups: Vec<(Vec<u16>, Vec<Complex64>)>,
    max_order: usize,
}

impl GridOperator {
    pub fn compile<C: Scalar>(op: &WeylOperator<C>, grid: Arc<PhaseGrid>) -> Result<Self> {
        if op.dim() != grid.dim() {
            return Err(PsqmError::DimensionMismatch(format!(
                "operator d = {}, grid d = {}",
                op.dim(),
                grid.dim()
            )));
        }
        let mut polys: BTreeMap<Vec<u16>, PolynomialSymbol<Complex64>> = BTreeMap::new();
        for (coords, derivs, c) in op.terms() {
            let p = polys
                .entry(derivs.to_vec())
                .or_insert_with(|| PolynomialSymbol::zero(op.dim()));
            *p = p.plus(&PolynomialSymbol::monomial(
                op.dim(),
                coords.to_vec(),
                c.to_c64(),
            ));
        }
        let mut groups = Vec::new();
        for (beta, p) in polys {
            let m = Field::sample_symbol(grid.clone(), &p)?;
            groups.push((beta, m.into_values()));
        }
        Ok(GridOperator {
            grid,
            groups,
            max_order: op.derivative_order(),
        })
    }

    pub fn grid(&self) -> &Arc<PhaseGrid> {
        &self.grid
    }

    pub fn apply(&self, psi: &Field) -> Result<Field> {
        if **psi.grid() != *self.grid {
            return Err(PsqmError::GridMismatch);
        }
        let naxes = self.grid.naxes();
        let mut stack = DerivStack::new(psi, (0..naxes).collect(), self.max_order);
        let mut acc = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (beta, m) in &self.groups {
            let d = stack.get(beta);
            acc.par_iter_mut()
                .zip(m.par_iter().zip(d))
                .for_each(|(a, (m, d))| *a += m * d);
        }
        Field::from_values(psi.grid().clone(), acc)
    }
}

/// `a ⋆ ψ` via the Bopp operator of `a` and spectral derivatives.
pub fn star_apply_poly<C: Scalar>(
    a: &PolynomialSymbol<C>,
    psi: &Field,
    nc: &NcParams<C>,
) -> Result<Field> {
    let op = bopp_operator(a, nc)?;
    GridOperator::compile(&op, psi.grid().clone())?.apply(psi)
}

/// Output of [`star_series`].
#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub field: Field,
    pub order: usize,
    pub terms: usize,
    /// `‖order-K contribution‖ / ‖sum‖` in the grid L² norm.
    pub relative_last: f64,
    pub converged: bool,
}

/// Truncated star series `Σ_{k≤K} (i/2)^k/k! B_k(f, g)`.
pub fn star_series<C: Scalar>(
    f: &Field,
    g: &Field,
    k_max: usize,
    nc: &NcParams<C>,
) -> Result<SeriesResult> {
    f.check_same_grid(g)?;
    if k_max > SERIES_ORDER_CAP {
        return Err(PsqmError::OrderCap {
            order: k_max,
            cap: SERIES_ORDER_CAP,
        });
    }
    let grid = f.grid().clone();
    let dim = grid.dim();
    let nc = nc.to_complex64();
    let series = star_expansion(dim, &nc, k_max)?;
    // g's derivatives mostly fall on the conjugate axis of f's, so its stack
    // walks the axes with q and p swapped to keep lexicographic prefixes
    // shared. The innermost (most often changed) axis is p_d for f, q_d for
    // g: both strided, which keeps the column transforms in play.
    let swap = |a: usize| if a < dim { a + dim } else { a - dim };
    let mut f_order: Vec<usize> = (0..2 * dim).collect();
    f_order.swap(2 * dim - 1, 2 * dim - 2);
    if dim == 1 {
        f_order = vec![0, 1];
    }
    let g_order: Vec<usize> = f_order.iter().map(|&a| swap(a)).collect();
    // One lexicographic walk over all orders, so consecutive terms differ
    // mostly in the innermost exponent.
    let key = |order: &[usize], m: &[u16]| -> Vec<u16> { order.iter().map(|&i| m[i]).collect() };
    let mut terms: Vec<(Vec<u16>, Vec<u16>, usize, Complex64)> = series
        .iter()
        .enumerate()
        .flat_map(|(k, group)| group.iter().map(move |t| (t, k)))
        .map(|(t, k)| (key(&f_order, &t.left), key(&g_order, &t.right), k, t.coeff))
        .collect();
    terms.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    let unpermute = |order: &[usize], kk: &[u16]| -> Vec<u16> {
        let mut m = vec![0u16; kk.len()];
        for (&ax, &e) in order.iter().zip(kk) {
            m[ax] = e;
        }
        m
    };
    // With g = conj(f) the term (R, L) is the conjugate of (L, R): keep one
    // of each pair and let both stacks differentiate f.
    let hermitian = f
        .values()
        .iter()
        .zip(g.values())
        .all(|(a, b)| a.conj() == *b);
    let pairs_kept = terms.len();
    if hermitian {
        terms.retain(|t| unpermute(&f_order, &t.0) <= unpermute(&g_order, &t.1));
    }
    let mut fs = DerivStack::new(f, f_order.clone(), k_max);
    let mut gs = DerivStack::new(if hermitian { f } else { g }, g_order.clone(), k_max);
    let n = f.len();
    let mut total = vec![Complex64::new(0.0, 0.0); n];
    let mut last = vec![Complex64::new(0.0, 0.0); n];
    for (lk, rk, k, c) in &terms {
        let (l, r) = (unpermute(&f_order, lk), unpermute(&g_order, rk));
        let df = fs.get(&l);
        let dg = gs.get(&r);
        let c = *c;
        let doubled = hermitian && l != r;
        let term = |x: &Complex64, y: &Complex64| {
            if !hermitian {
                c * x * y
            } else if doubled {
                Complex64::new(2.0 * (c * x * y.conj()).re, 0.0)
            } else {
                c * x * y.conj()
            }
        };
        if *k == k_max {
            last.par_iter_mut()
                .zip(df.par_iter().zip(dg))
                .for_each(|(a, (x, y))| *a += term(x, y));
        }
        total
            .par_iter_mut()
            .zip(df.par_iter().zip(dg))
            .for_each(|(a, (x, y))| *a += term(x, y));
    }
    let nterms = pairs_kept;
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tn = norm(&total);
    let relative_last = if tn > 0.0 { norm(&last) / tn } else { 0.0 };
    let converged = relative_last < SERIES_TOL;
    if !converged {
        log::warn!("star series at order {k_max}: last order relative size {relative_last:.3e}");
    }
    Ok(SeriesResult {
        field: Field::from_values(grid, total)?,
        order: k_max,
        terms: nterms,
        relative_last,
        converged,
    })
}
