//! The radial Kummer equation `rχ″ + (3 − r)χ′ + λχ = 0` as a Sturm–Liouville problem.
//!
//! In self-adjoint form `−(r³e^{−r}χ′)′ = λ r²e^{−r} χ` on `(0, R]`. The
//! discretisation is finite-volume: `N` equal cells, fluxes `p = r³e^{−r}` on
//! the faces (zero at `r = 0` and at `R`), exact cell masses of the weight.
//! It is second order in `h = R/N`. Energies are `E = λ + 3/2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PsqmError, Result};

pub const DEFAULT_GRID_N: usize = 2000;
pub const MIN_GRID_N: usize = 200;
/// Smallest box; it is widened when higher states need more room.
pub const MIN_BOX: f64 = 40.0;
/// Allowed spread between the two Richardson estimates.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// `∫_0^x r² e^{−r} dr`, accurate for small `x`.
fn weight_lower(x: f64) -> f64 {
    if x < 1.0 {
        // 2e^{−x} Σ_{k≥3} x^k/k!
        let mut t = x * x * x / 6.0;
        let mut s = 0.0;
        let mut k = 3.0;
        while t > 1e-18 * s {
            s += t;
            k += 1.0;
            t *= x / k;
        }
        2.0 * (-x).exp() * s
    } else {
        2.0 - weight_upper(x)
    }
}

/// `∫_x^∞ r² e^{−r} dr`.
fn weight_upper(x: f64) -> f64 {
    (-x).exp() * (x * x + 2.0 * x + 2.0)
}

/// `∫_a^b r² e^{−r} dr` without cancellation at either end.
fn cell_mass(a: f64, b: f64) -> f64 {
    if a >= 1.0 {
        weight_upper(a) - weight_upper(b)
    } else {
        weight_lower(b) - weight_lower(a)
    }
}

/// Box length for states up to `λ = n`: `r^{2n+2} e^{−r}` must fall
/// below `1e−14` of its peak and `r² e^{−r}` below `1e−14`.
pub fn box_length(n_max: u32) -> f64 {
    let m = 2.0 * n_max as f64 + 2.0;
    let log_peak = m * m.ln() - m;
    let mut r = MIN_BOX;
    while m * r.ln() - r > log_peak + 1e-14f64.ln() {
        r += 1.0;
    }
    r
}

/// Symmetric tridiagonal matrix `W^{−1/2} K W^{−1/2}` plus the cell masses.
#[derive(Clone, Debug)]
pub struct RadialMatrix {
    pub r_max: f64,
    pub centers: Vec<f64>,
    pub mass: Vec<f64>,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl RadialMatrix {
    pub fn new(n: usize, r_max: f64) -> Self {
        let h = r_max / n as f64;
        let flux = |j: usize| {
            // interior faces only
            if j == 0 || j == n {
                0.0
            } else {
                let f = j as f64 * h;
                f * f * f * (-f).exp() / h
            }
        };
        let mass: Vec<f64> = (0..n)
            .map(|i| cell_mass(i as f64 * h, (i + 1) as f64 * h))
            .collect();
        let diag = (0..n).map(|i| (flux(i) + flux(i + 1)) / mass[i]).collect();
        let off = (0..n - 1)
            .map(|i| -flux(i + 1) / (mass[i] * mass[i + 1]).sqrt())
            .collect();
        let centers = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        RadialMatrix {
            r_max,
            centers,
            mass,
            diag,
            off,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let b2 = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `k` smallest eigenvalues, bisected independently.
    pub fn lowest(&self, k: usize) -> Vec<f64> {
        (0..k).into_par_iter().map(|i| self.eigenvalue(i)).collect()
    }

    /// Eigenfunction `χ` at the cell centres for eigenvalue `lambda`, by
    /// inverse iteration; scaled so that `χ` at the first cell is 1.
    pub fn eigenfunction(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda + 1e-10 * (1.0 + lambda.abs());
        let mut y = vec![1.0; n];
        for _ in 0..3 {
            y = solve_tridiagonal(&self.diag, &self.off, shift, &y);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
        }
        let chi: Vec<f64> = y
            .iter()
            .zip(&self.mass)
            .map(|(v, w)| v / w.sqrt())
            .collect();
        let c0 = chi[0];
        chi.into_iter().map(|v| v / c0).collect()
    }
}

/// Solve `(T − σ I) x = b` for symmetric tridiagonal `T`, Gaussian elimination with partial pivoting.
fn solve_tridiagonal(diag: &[f64], off: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // rows kept as (a[i][i], a[i][i+1], a[i][i+2]) after pivoting
    let mut d: Vec<f64> = diag.iter().map(|v| v - sigma).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut l = off.to_vec();
    let mut rhs = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        if l[i].abs() > d[i].abs() {
            // swap rows i and i+1
            let (d1, u11) = (d[i + 1], if i + 1 < n - 1 { u1[i + 1] } else { 0.0 });
            let (a0, a1, a2) = (l[i], d1, u11);
            let (b0, b1) = (d[i], u1[i]);
            d[i] = a0;
            u1[i] = a1;
            u2[i] = a2;
            rhs.swap(i, i + 1);
            let m = b0 / a0;
            d[i + 1] = b1 - m * a1;
            if i + 1 < n - 1 {
                u1[i + 1] = -m * a2;
            }
            rhs[i + 1] -= m * rhs[i];
        } else {
            let m = if d[i] == 0.0 { 0.0 } else { l[i] / d[i] };
            d[i + 1] -= m * u1[i];
            rhs[i + 1] -= m * rhs[i];
        }
        l[i] = 0.0;
    }
    let tiny = f64::EPSILON * d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        let p = if d[i].abs() < tiny {
            tiny.max(f64::MIN_POSITIVE)
        } else {
            d[i]
        };
        x[i] = s / p;
    }
    x
}

/// Result of [`radial_eigensolve`].
#[derive(Clone, Debug, Serialize)]
pub struct RadialSpectrum {
    /// Energies extrapolated from `grid_n` and `2·grid_n` cells.
    pub energies: Vec<f64>,
    /// Unextrapolated energies at `grid_n` cells.
    pub raw: Vec<f64>,
    pub grid_n: usize,
    pub r_max: f64,
    /// Largest gap between the `(N, 2N)` and `(2N, 4N)` extrapolations.
    pub drift: f64,
}

/// All energies `E ≤ e_max` of the radial problem.
pub fn radial_eigensolve(e_max: f64, grid_n: usize) -> Result<RadialSpectrum> {
    if !e_max.is_finite() {
        return Err(PsqmError::InvalidParameter("e_max must be finite".into()));
    }
    if grid_n < MIN_GRID_N {
        return Err(PsqmError::InvalidParameter(format!(
            "grid_n must be at least {MIN_GRID_N}, got {grid_n}"
        )));
    }
    let lambda_max = e_max - 1.5;
    let n_guess = if lambda_max >= 0.0 {
        lambda_max.floor() as u32
    } else {
        0
    };
    let r_max = box_length(n_guess);
    let coarse = RadialMatrix::new(grid_n, r_max);
    let k = if lambda_max < 0.0 {
        0
    } else {
        coarse.count_below(lambda_max + f64::EPSILON * lambda_max.abs())
    };
    let levels: Vec<Vec<f64>> = [1, 2, 4]
        .iter()
        .map(|&m| {
            if m == 1 {
                coarse.lowest(k)
            } else {
                RadialMatrix::new(m * grid_n, r_max).lowest(k)
            }
        })
        .collect();
    let richardson = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| (4.0 * y - x) / 3.0).collect()
    };
    let first = richardson(&levels[0], &levels[1]);
    let second = richardson(&levels[1], &levels[2]);
    let drift = first
        .iter()
        .zip(&second)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if drift > DRIFT_LIMIT {
        return Err(PsqmError::TooCoarse {
            drift,
            limit: DRIFT_LIMIT,
        });
    }
    Ok(RadialSpectrum {
        energies: first.iter().map(|l| l + 1.5).collect(),
        raw: levels[0].iter().map(|l| l + 1.5).collect(),
        grid_n,
        r_max,
        drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_masses_are_accurate() {
        assert!((weight_lower(1.0 - 1e-12) - weight_lower(1.0)).abs() < 1e-12);
        let x = 1e-3f64;
        let series = x.powi(3) / 3.0 - x.powi(4) / 4.0 + x.powi(5) / 10.0;
        assert!((weight_lower(x) / series - 1.0).abs() < 1e-9);
        // far tail: relative accuracy, not absolute
        let m = cell_mass(60.0, 60.01);
        let approx = 0.01 * 60.005f64.powi(2) * (-60.005f64).exp();
        assert!((m / approx - 1.0).abs() < 1e-4);
        assert!((cell_mass(0.0, 300.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_up_to_five() {
        let s = radial_eigensolve(5.0, 2000).unwrap();
        assert_eq!(s.energies.len(), 4);
        for (n, e) in s.energies.iter().enumerate() {
            assert!((e - (n as f64 + 1.5)).abs() < 1e-6, "n = {n}: {e}");
        }
    }

    #[test]
    fn below_ground_is_empty() {
        assert!(radial_eigensolve(1.0, 2000).unwrap().energies.is_empty());
    }

    #[test]
    fn rejects_coarse_or_bad_input() {
        assert!(matches!(
            radial_eigensolve(5.0, 100),
            Err(PsqmError::InvalidParameter(_))
        ));
        assert!(radial_eigensolve(f64::NAN, 2000).is_err());
    }

    #[test]
    fn ground_state_is_constant() {
        let m = RadialMatrix::new(400, 40.0);
        let lam = m.eigenvalue(0);
        assert!(lam.abs() < 1e-12);
        let chi = m.eigenfunction(lam);
        assert!(chi.iter().all(|c| (c - 1.0).abs() < 1e-8));
    }

    #[test]
    fn first_excited_eigenfunction_is_kummer() {
        // χ ∝ M(−1, 3, r) = 1 − r/3
        let m = RadialMatrix::new(2000, 40.0);
        let lam = m.eigenvalue(1);
        let chi = m.eigenfunction(lam);
        let r0 = m.centers[0];
        for (r, c) in m.centers.iter().zip(&chi).step_by(50).take(20) {
            let expect = (1.0 - r / 3.0) / (1.0 - r0 / 3.0);
            assert!((c - expect).abs() < 1e-3, "r = {r}: {c} vs {expect}");
        }
    }

    #[test]
    fn tridiagonal_solve_matches_dense() {
        let diag = [0.0, 2.0, -1.0, 4.0];
        let off = [3.0, 0.5, -2.0];
        let b = [1.0, -1.0, 2.0, 0.5];
        let x = solve_tridiagonal(&diag, &off, 0.25, &b);
        for i in 0..4 {
            let mut s = (diag[i] - 0.25) * x[i];
            if i > 0 {
                s += off[i - 1] * x[i - 1];
            }
            if i < 3 {
                s += off[i] * x[i + 1];
            }
            assert!((s - b[i]).abs() < 1e-12);
        }
    }
}
