//! Uniform phase-space grids and complex fields on them.
//!
//! Axes are ordered `q₁..q_d, p₁..p_d`; values are row-major with the last
//! axis fastest. Nodes are cell centred. Derivatives are spectral under a
//! periodic-box assumption, so fields should decay at the box edge.

mod fft;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

pub use fft::Fft;

use crate::error::{PsqmError, Result};
use crate::scalar::Scalar;
use crate::star::{NcParams, PolyGaussForm, PolynomialSymbol};
use crate::weyl::phase_names;

/// Default cap on complex values per field.
pub const DEFAULT_MEM_CAP: u128 = 1 << 30;

/// The configured cap, from `PSQM_MEM_CAP` if set.
pub fn memory_cap() -> u128 {
    std::env::var("PSQM_MEM_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MEM_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Axis { min, max, n }
    }

    pub fn symmetric(half_width: f64, n: usize) -> Self {
        Axis {
            min: -half_width,
            max: half_width,
            n,
        }
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + (i as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Angular wavenumber of DFT mode `j`: `(2π/L)·{0..n/2−1, −n/2..−1}`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 {
            j as f64
        } else {
            j as f64 - self.n as f64
        };
        2.0 * PI * m / self.length()
    }

    /// `derivative_multipliers(order) / n`, ready for an unnormalised inverse.
    pub(crate) fn derivative_multipliers_prescaled(&self, order: u32) -> Vec<Complex64> {
        let n = self.n as f64;
        self.derivative_multipliers(order)
            .into_iter()
            .map(|m| m / n)
            .collect()
    }

    /// Mode multipliers `(ik)^order`, Nyquist zeroed for odd orders.
    pub fn derivative_multipliers(&self, order: u32) -> Vec<Complex64> {
        (0..self.n)
            .map(|j| {
                if order % 2 == 1 && j == self.n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, self.wavenumber(j)).powu(order)
                }
            })
            .collect()
    }

    fn validate(&self, k: usize) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(PsqmError::InvalidParameter(format!(
                "axis {k}: need finite max > min"
            )));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(PsqmError::InvalidParameter(format!(
                "axis {k}: n = {} must be a power of two >= 8",
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    dim: usize,
    axes: Vec<Axis>,
    hbar: f64,
    theta: f64,
}

impl PhaseGrid {
    pub fn new(dim: usize, axes: Vec<Axis>, hbar: f64, theta: f64) -> Result<Self> {
        if dim == 0 || axes.len() != 2 * dim {
            return Err(PsqmError::DimensionMismatch(format!(
                "need {} axes for d = {dim}, got {}",
                2 * dim,
                axes.len()
            )));
        }
        for (k, a) in axes.iter().enumerate() {
            a.validate(k)?;
        }
        if !(hbar > 0.0 && hbar.is_finite()) || !theta.is_finite() {
            return Err(PsqmError::InvalidParameter(
                "need hbar > 0 and finite theta".into(),
            ));
        }
        let points: u128 = axes.iter().map(|a| a.n as u128).product();
        let cap = memory_cap();
        if points > cap {
            return Err(PsqmError::MemoryCap { points, cap });
        }
        Ok(PhaseGrid {
            dim,
            axes,
            hbar,
            theta,
        })
    }

    /// All axes `[−half_width, half_width]` with `n` nodes.
    pub fn uniform(dim: usize, half_width: f64, n: usize, hbar: f64, theta: f64) -> Result<Self> {
        Self::new(
            dim,
            vec![Axis::symmetric(half_width, n); 2 * dim],
            hbar,
            theta,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn naxes(&self) -> usize {
        self.axes.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn nc_params(&self) -> Result<NcParams<Complex64>> {
        NcParams::new(
            Complex64::new(self.hbar, 0.0),
            Complex64::new(self.theta, 0.0),
        )
    }

    pub fn axis_names(&self) -> Vec<String> {
        phase_names(self.dim)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    /// Stride of an axis in the flat array.
    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.n).product()
    }

    /// Node coordinates of a flat index.
    pub fn coords_into(&self, mut flat: usize, out: &mut [f64]) {
        for k in (0..self.axes.len()).rev() {
            let n = self.axes[k].n;
            out[k] = self.axes[k].node(flat % n);
            flat /= n;
        }
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.axes.len()];
        self.coords_into(flat, &mut v);
        v
    }

    /// Flat index of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (i, a)| acc * a.n + i)
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.axes.len() {
            return Err(PsqmError::AxisOutOfRange {
                axis,
                naxes: self.axes.len(),
            });
        }
        Ok(())
    }
}

// Column width of the blocks transformed together along strided axes.
const COLUMN_BLOCK: usize = 64;

/// `dst = T_axis(mult · src)` where `T` is the forward DFT or the inverse
/// DFT without `1/n` along `axis`, and `mult` scales entry `i` of every line.
///
/// Contiguous lines are transformed one at a time; strided lines are
/// transformed in blocks of adjacent columns so the butterflies vectorise.
/// The arithmetic per line does not depend on the blocking or on threads.
fn axis_transform(
    src: &[Complex64],
    dst: &mut Vec<Complex64>,
    shape: &[usize],
    axis: usize,
    mult: Option<&[Complex64]>,
    inverse: bool,
) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let plan = Fft::new(n);
    dst.resize(src.len(), Complex64::new(0.0, 0.0));
    let scale = |i: usize, v: Complex64| mult.map_or(v, |m| v * m[i]);
    if stride == 1 {
        dst.par_chunks_mut(n * 64)
            .zip(src.par_chunks(n * 64))
            .for_each(|(d, s)| {
                for (dl, sl) in d.chunks_mut(n).zip(s.chunks(n)) {
                    for (i, (o, v)) in dl.iter_mut().zip(sl).enumerate() {
                        *o = scale(i, *v);
                    }
                    if inverse {
                        plan.inverse_unscaled(dl)
                    } else {
                        plan.forward(dl)
                    }
                }
            });
        return;
    }
    dst.par_chunks_mut(n * stride)
        .zip(src.par_chunks(n * stride))
        .for_each(|(blk, sblk)| {
            let mut re = vec![0.0; n * COLUMN_BLOCK];
            let mut im = vec![0.0; n * COLUMN_BLOCK];
            let mut c0 = 0;
            while c0 < stride {
                let w = COLUMN_BLOCK.min(stride - c0);
                for i in 0..n {
                    let row = &sblk[i * stride + c0..i * stride + c0 + w];
                    for (l, v) in row.iter().enumerate() {
                        let v = scale(i, *v);
                        re[i * w + l] = v.re;
                        im[i * w + l] = v.im;
                    }
                }
                plan.run_columns_split(&mut re[..n * w], &mut im[..n * w], w, inverse);
                for i in 0..n {
                    let row = &mut blk[i * stride + c0..i * stride + c0 + w];
                    for (l, v) in row.iter_mut().enumerate() {
                        *v = Complex64::new(re[i * w + l], im[i * w + l]);
                    }
                }
                c0 += w;
            }
        });
}

/// Forward DFT along one axis.
pub(crate) fn fft_axis_into(
    src: &[Complex64],
    dst: &mut Vec<Complex64>,
    shape: &[usize],
    axis: usize,
) {
    axis_transform(src, dst, shape, axis, None, false);
}

/// `dst = IFFT_axis(mult · src)`, where `mult` already includes the `1/n`.
pub(crate) fn ifft_axis_prescaled_into(
    src: &[Complex64],
    dst: &mut Vec<Complex64>,
    shape: &[usize],
    axis: usize,
    mult: &[Complex64],
) {
    axis_transform(src, dst, shape, axis, Some(mult), true);
}

const SUM_CHUNK: usize = 4096;

/// Sum with a fixed chunking so the result does not depend on thread count.
fn stable_sum(values: impl IndexedParallelIterator<Item = Complex64>) -> Complex64 {
    let partial: Vec<Complex64> = values
        .chunks(SUM_CHUNK)
        .map(|c| c.into_iter().sum())
        .collect();
    partial.into_iter().sum()
}

/// A complex field sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Arc<PhaseGrid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn from_values(grid: Arc<PhaseGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PsqmError::DimensionMismatch(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(PsqmError::NonFinite(i));
        }
        Ok(Field { grid, values })
    }

    pub fn constant(grid: Arc<PhaseGrid>, c: Complex64) -> Self {
        let n = grid.len();
        Field {
            grid,
            values: vec![c; n],
        }
    }

    /// Sample a pointwise function at the cell-centred nodes.
    pub fn sample<F>(grid: Arc<PhaseGrid>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let na = grid.naxes();
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; na],
                |u, k| {
                    grid.coords_into(k, u);
                    f(u)
                },
            )
            .collect();
        Self::from_values(grid, values)
    }

    pub fn sample_polygauss<C: Scalar>(grid: Arc<PhaseGrid>, s: &PolyGaussForm<C>) -> Result<Self> {
        if s.dim() != grid.dim() {
            return Err(PsqmError::DimensionMismatch(format!(
                "state d = {}, grid d = {}",
                s.dim(),
                grid.dim()
            )));
        }
        let s = s.to_complex64();
        Self::sample(grid, |u| s.eval(u))
    }

    pub fn sample_symbol<C: Scalar>(grid: Arc<PhaseGrid>, a: &PolynomialSymbol<C>) -> Result<Self> {
        if a.dim() != grid.dim() {
            return Err(PsqmError::DimensionMismatch(format!(
                "symbol d = {}, grid d = {}",
                a.dim(),
                grid.dim()
            )));
        }
        let a = a.to_complex64();
        Self::sample(grid, |u| a.eval(u))
    }

    pub fn grid(&self) -> &Arc<PhaseGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grid contents, not necessarily the same allocation.
    pub fn check_same_grid(&self, o: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &o.grid) || *self.grid == *o.grid {
            Ok(())
        } else {
            Err(PsqmError::GridMismatch)
        }
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Field {
        Field {
            grid: self.grid.clone(),
            values,
        }
    }

    fn zip_with(
        &self,
        o: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64 + Sync,
    ) -> Result<Field> {
        self.check_same_grid(o)?;
        Ok(self.with_values(
            self.values
                .par_iter()
                .zip(&o.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        ))
    }

    pub fn add(&self, o: &Field) -> Result<Field> {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Field) -> Result<Field> {
        self.zip_with(o, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, o: &Field) -> Result<Field> {
        self.zip_with(o, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Field {
        self.with_values(self.values.par_iter().map(|v| f(*v)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_abs_diff(&self, o: &Field) -> Result<f64> {
        Ok(self.sub(o)?.max_abs())
    }

    /// Riemann cell sum `Σ f · ΠΔ`.
    pub fn integrate(&self) -> Complex64 {
        stable_sum(self.values.par_iter().copied()) * self.grid.cell_volume()
    }

    /// `∫ conj(f) g`.
    pub fn inner(&self, o: &Field) -> Result<Complex64> {
        self.check_same_grid(o)?;
        let s = stable_sum(
            self.values
                .par_iter()
                .zip(&o.values)
                .map(|(a, b)| a.conj() * b),
        );
        Ok(s * self.grid.cell_volume())
    }

    pub fn norm(&self) -> f64 {
        let s = stable_sum(
            self.values
                .par_iter()
                .map(|a| Complex64::new(a.norm_sqr(), 0.0)),
        );
        (s.re * self.grid.cell_volume()).sqrt()
    }

    pub fn normalize(&self) -> Result<Field> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(PsqmError::ZeroState);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// Multiply DFT modes along `axis` by `mult`.
    pub fn apply_axis_multiplier(&self, axis: usize, mult: &[Complex64]) -> Result<Field> {
        self.grid.check_axis(axis)?;
        if mult.len() != self.grid.axes[axis].n {
            return Err(PsqmError::DimensionMismatch("multiplier length".into()));
        }
        let shape = self.grid.shape();
        let mut hat = Vec::new();
        let mut out = Vec::new();
        fft_axis_into(&self.values, &mut hat, &shape, axis);
        let n = mult.len() as f64;
        let scaled: Vec<Complex64> = mult.iter().map(|m| m / n).collect();
        ifft_axis_prescaled_into(&hat, &mut out, &shape, axis, &scaled);
        Ok(self.with_values(out))
    }

    /// `∂^order/∂u_axis^order` by spectral differentiation.
    pub fn spectral_partial(&self, axis: usize, order: u32) -> Result<Field> {
        self.grid.check_axis(axis)?;
        if order < 1 {
            return Err(PsqmError::InvalidParameter(
                "derivative order must be >= 1".into(),
            ));
        }
        self.apply_axis_multiplier(axis, &self.grid.axes[axis].derivative_multipliers(order))
    }

    /// Mixed partial `∂^β`, applied axis by axis.
    pub fn partial(&self, beta: &[u16]) -> Result<Field> {
        let mut f = self.clone();
        for (k, &b) in beta.iter().enumerate() {
            if b > 0 {
                f = f.spectral_partial(k, b as u32)?;
            }
        }
        Ok(f)
    }

    /// Unnormalised multi-dimensional DFT of the values.
    pub fn dft(&self) -> Vec<Complex64> {
        let shape = self.grid.shape();
        let mut v = self.values.clone();
        let mut tmp = Vec::new();
        for axis in 0..shape.len() {
            fft_axis_into(&v, &mut tmp, &shape, axis);
            std::mem::swap(&mut v, &mut tmp);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(half: f64, n: usize) -> Arc<PhaseGrid> {
        Arc::new(PhaseGrid::uniform(1, half, n, 1.0, 0.0).unwrap())
    }

    #[test]
    fn cell_centred_nodes() {
        let a = Axis::symmetric(4.0, 8);
        assert_eq!(a.nodes(), vec![-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5]);
    }

    #[test]
    fn sample_constant_and_coordinate() {
        let g = Arc::new(PhaseGrid::uniform(1, 4.0, 8, 1.0, 0.0).unwrap());
        let one = Field::sample(g.clone(), |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(one.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let q = Field::sample(g.clone(), |u| Complex64::new(u[0], 0.0)).unwrap();
        let first_row: Vec<f64> = (0..8)
            .map(|i| q.values()[g.flat_index(&[i, 0])].re)
            .collect();
        assert_eq!(first_row, Axis::symmetric(4.0, 8).nodes());
    }

    #[test]
    fn sample_rejects_non_finite() {
        let g = grid1(4.0, 8);
        let r = Field::sample(g, |u| Complex64::new(1.0 / (u[0] - 0.5), 0.0));
        assert!(matches!(r, Err(PsqmError::NonFinite(_))));
    }

    #[test]
    fn derivative_of_single_mode_is_exact() {
        let g = grid1(1.0, 32);
        let l = 2.0;
        let f = Field::sample(g.clone(), |u| {
            Complex64::new((2.0 * PI * u[0] / l).sin(), 0.0)
        })
        .unwrap();
        let d = f.spectral_partial(0, 1).unwrap();
        let e = Field::sample(g, |u| {
            Complex64::new(2.0 * PI / l * (2.0 * PI * u[0] / l).cos(), 0.0)
        })
        .unwrap();
        assert!(d.max_abs_diff(&e).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_of_gaussian() {
        let g = Arc::new(
            PhaseGrid::new(
                1,
                vec![Axis::symmetric(8.0, 128), Axis::symmetric(8.0, 8)],
                1.0,
                0.0,
            )
            .unwrap(),
        );
        let f = Field::sample(g.clone(), |u| Complex64::new((-u[0] * u[0]).exp(), 0.0)).unwrap();
        let d = f.spectral_partial(0, 1).unwrap();
        let e = Field::sample(g, |u| {
            Complex64::new(-2.0 * u[0] * (-u[0] * u[0]).exp(), 0.0)
        })
        .unwrap();
        assert!(d.max_abs_diff(&e).unwrap() < 1e-10);
    }

    #[test]
    fn second_derivative_of_constant() {
        let g = grid1(8.0, 16);
        let c = Field::constant(g, Complex64::new(3.0, -1.0));
        assert!(c.spectral_partial(1, 2).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn derivative_errors() {
        let c = Field::constant(grid1(8.0, 16), Complex64::new(1.0, 0.0));
        assert_eq!(
            c.spectral_partial(2, 1).unwrap_err(),
            PsqmError::AxisOutOfRange { axis: 2, naxes: 2 }
        );
        assert!(matches!(
            c.spectral_partial(0, 0),
            Err(PsqmError::InvalidParameter(_))
        ));
    }

    #[test]
    fn gaussian_integral() {
        let g = grid1(8.0, 64);
        let f = Field::sample(g, |u| {
            Complex64::new((-(u[0] * u[0] + u[1] * u[1])).exp(), 0.0)
        })
        .unwrap();
        assert!((f.integrate() - Complex64::new(PI, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn normalize_and_mismatch() {
        let g = grid1(8.0, 16);
        let f = Field::sample(g.clone(), |u| {
            Complex64::new((-u[0] * u[0] - u[1] * u[1]).exp(), u[0])
        })
        .unwrap();
        let a = f.scale(Complex64::new(2.0, 0.0)).normalize().unwrap();
        let b = f.normalize().unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
        assert!((b.norm() - 1.0).abs() < 1e-14);
        assert_eq!(
            Field::constant(g, Complex64::new(0.0, 0.0))
                .normalize()
                .unwrap_err(),
            PsqmError::ZeroState
        );
        let other = Field::constant(grid1(4.0, 16), Complex64::new(1.0, 0.0));
        assert_eq!(f.inner(&other).unwrap_err(), PsqmError::GridMismatch);
    }

    #[test]
    fn grid_validation() {
        assert!(PhaseGrid::uniform(1, 8.0, 12, 1.0, 0.0).is_err());
        assert!(PhaseGrid::uniform(1, 8.0, 4, 1.0, 0.0).is_err());
        assert!(PhaseGrid::new(
            1,
            vec![Axis::new(1.0, 1.0, 8), Axis::symmetric(1.0, 8)],
            1.0,
            0.0
        )
        .is_err());
        assert!(PhaseGrid::uniform(1, 8.0, 8, 0.0, 0.0).is_err());
        assert!(PhaseGrid::new(2, vec![Axis::symmetric(1.0, 8); 3], 1.0, 0.0).is_err());
        // 2^16 points per axis in 4D is far above the default cap
        assert!(matches!(
            PhaseGrid::uniform(2, 8.0, 1 << 16, 1.0, 0.0),
            Err(PsqmError::MemoryCap { .. })
        ));
    }

    #[test]
    fn strided_axis_matches_transpose() {
        let g = Arc::new(PhaseGrid::uniform(2, 6.0, 16, 1.0, 0.0).unwrap());
        let f = Field::sample(g, |u| {
            Complex64::new(
                (-(u[0] * u[0] + 0.5 * u[1] * u[1] + u[2] * u[2] + u[3] * u[3])).exp()
                    * (1.0 + u[1]),
                0.0,
            )
        })
        .unwrap();
        let d01 = f
            .spectral_partial(0, 1)
            .unwrap()
            .spectral_partial(1, 1)
            .unwrap();
        let d10 = f
            .spectral_partial(1, 1)
            .unwrap()
            .spectral_partial(0, 1)
            .unwrap();
        assert!(d01.max_abs_diff(&d10).unwrap() < 1e-12);
    }
}
