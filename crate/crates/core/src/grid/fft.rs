//! Iterative radix-2 FFT.

use std::f64::consts::PI;

use num_complex::Complex64;

/// A plan for transforms of one power-of-two length.
#[derive(Clone, Debug)]
pub struct Fft {
    n: usize,
    swaps: Vec<(usize, usize)>,
    // per stage, exp(∓iπk/h) for k < h; computed directly rather than by recurrence
    fwd: Vec<Vec<Complex64>>,
    inv: Vec<Vec<Complex64>>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length must be a power of two");
        let bits = n.trailing_zeros();
        let swaps = (0..n)
            .filter_map(|i| {
                let j = if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                };
                (i < j).then_some((i, j))
            })
            .collect();
        let mut fwd = Vec::new();
        let mut half = 1;
        while half < n {
            fwd.push(
                (0..half)
                    .map(|k| {
                        let a = -PI * k as f64 / half as f64;
                        Complex64::new(a.cos(), a.sin())
                    })
                    .collect::<Vec<_>>(),
            );
            half *= 2;
        }
        let inv = fwd
            .iter()
            .map(|t| t.iter().map(|w| w.conj()).collect())
            .collect();
        Fft { n, swaps, fwd, inv }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn run(&self, x: &mut [Complex64], inverse: bool) {
        assert_eq!(x.len(), self.n);
        for &(i, j) in &self.swaps {
            x.swap(i, j);
        }
        let stages = if inverse { &self.inv } else { &self.fwd };
        for tw in stages {
            let half = tw.len();
            for chunk in x.chunks_exact_mut(2 * half) {
                let (lo, hi) = chunk.split_at_mut(half);
                for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
        }
    }

    /// Transform every column of an `n × row` block held as separate real and
    /// imaginary planes. Butterflies run along rows of plain `f64`, which
    /// vectorises; each column sees exactly the arithmetic of [`Fft::forward`].
    pub fn run_columns_split(&self, re: &mut [f64], im: &mut [f64], row: usize, inverse: bool) {
        assert_eq!(re.len(), self.n * row);
        assert_eq!(im.len(), self.n * row);
        for &(i, j) in &self.swaps {
            for x in [&mut *re, &mut *im] {
                let (a, b) = x.split_at_mut(j * row);
                a[i * row..(i + 1) * row].swap_with_slice(&mut b[..row]);
            }
        }
        let stages = if inverse { &self.inv } else { &self.fwd };
        for tw in stages {
            let half = tw.len();
            for (cr, ci) in re
                .chunks_exact_mut(2 * half * row)
                .zip(im.chunks_exact_mut(2 * half * row))
            {
                let (lor, hir) = cr.split_at_mut(half * row);
                let (loi, hii) = ci.split_at_mut(half * row);
                for (k, w) in tw.iter().enumerate() {
                    let r = k * row..(k + 1) * row;
                    let (ar, br) = (&mut lor[r.clone()], &mut hir[r.clone()]);
                    let (ai, bi) = (&mut loi[r.clone()], &mut hii[r]);
                    let (wr, wi) = (w.re, w.im);
                    for l in 0..row {
                        let (tr, ti) = if k == 0 {
                            (br[l], bi[l])
                        } else {
                            (br[l] * wr - bi[l] * wi, br[l] * wi + bi[l] * wr)
                        };
                        br[l] = ar[l] - tr;
                        bi[l] = ai[l] - ti;
                        ar[l] += tr;
                        ai[l] += ti;
                    }
                }
            }
        }
    }

    fn run_columns(&self, x: &mut [Complex64], row: usize, inverse: bool) {
        let mut re: Vec<f64> = x.iter().map(|v| v.re).collect();
        let mut im: Vec<f64> = x.iter().map(|v| v.im).collect();
        self.run_columns_split(&mut re, &mut im, row, inverse);
        for (v, (r, i)) in x.iter_mut().zip(re.into_iter().zip(im)) {
            *v = Complex64::new(r, i);
        }
    }

    /// Forward transform of each column of an `n × row` block.
    pub fn forward_columns(&self, x: &mut [Complex64], row: usize) {
        self.run_columns(x, row, false);
    }

    /// Inverse transform (with `1/n`) of each column of an `n × row` block.
    pub fn inverse_columns(&self, x: &mut [Complex64], row: usize) {
        self.run_columns(x, row, true);
        let s = 1.0 / self.n as f64;
        for v in x.iter_mut() {
            *v *= s;
        }
    }

    /// Inverse transform of one line without the `1/n` factor.
    pub fn inverse_unscaled(&self, x: &mut [Complex64]) {
        self.run(x, true);
    }

    /// Unnormalised forward transform `X_k = Σ x_j e^{−2πijk/n}`.
    pub fn forward(&self, x: &mut [Complex64]) {
        self.run(x, false);
    }

    /// Inverse transform including the `1/n` factor.
    pub fn inverse(&self, x: &mut [Complex64]) {
        self.run(x, true);
        let s = 1.0 / self.n as f64;
        for v in x.iter_mut() {
            *v *= s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn column_transform_matches_lines() {
        let n = 16;
        let row = 5;
        let x: Vec<Complex64> = (0..n * row)
            .map(|i| Complex64::new((i as f64 * 0.37).cos(), i as f64 * 0.01))
            .collect();
        let plan = Fft::new(n);
        let mut cols = x.clone();
        plan.forward_columns(&mut cols, row);
        for l in 0..row {
            let mut line: Vec<Complex64> = (0..n).map(|i| x[i * row + l]).collect();
            plan.forward(&mut line);
            for i in 0..n {
                assert!((line[i] - cols[i * row + l]).norm() < 1e-12);
            }
        }
        plan.inverse_columns(&mut cols, row);
        for (a, b) in cols.iter().zip(&x) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_naive_dft() {
        for n in [1, 2, 8, 32] {
            let x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new((i as f64).sin(), (i * i) as f64 * 0.1))
                .collect();
            let mut y = x.clone();
            Fft::new(n).forward(&mut y);
            for (a, b) in y.iter().zip(naive(&x)) {
                assert!((a - b).norm() < 1e-10);
            }
            Fft::new(n).inverse(&mut y);
            for (a, b) in y.iter().zip(&x) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
