//! Acceptance criteria for the psqm workspace.
//!
//! Each criterion runs a check and reports PASS or FAIL with the measured
//! numbers. The `acceptance` test target prints one line per criterion.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use psqm_core::oscillators::{
    box_length, ho3d_state, nc_coordinates, nc_state, nc_wigner, radial_eigensolve, RadialMatrix,
};
use psqm_core::star::{bopp_operator, polygauss_apply, star_expansion, star_poly};
use psqm_core::star_grid::{star_apply_poly, star_series};
use psqm_core::weyl::{
    boost_checks, casimir_check, galilei_generators, verify_galilei_algebra, WeylOperator,
};
use psqm_core::wigner::{evolve, marginal_identity};
use psqm_core::{
    rat, ExactComplex, Field, NcParams, PhaseGrid, PolyGaussForm, PolynomialSymbol, QuadSurd,
    Scalar,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type P = PolynomialSymbol<ExactComplex>;

/// A criterion's title and its check.
pub type Criterion = (&'static str, fn() -> Verdict);

/// Outcome of one criterion with the measured numbers.
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn grid(dim: usize, half: f64, n: usize, hbar: f64, theta: f64) -> Arc<PhaseGrid> {
    Arc::new(PhaseGrid::uniform(dim, half, n, hbar, theta).expect("grid"))
}

fn c1() -> Verdict {
    let start = Instant::now();
    let mut out = Vec::new();
    let code = psqm_cli::run(["psqm", "algebra", "verify"], &mut out);
    let cli_secs = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&out);
    let pass_lines = stdout.lines().filter(|l| l.starts_with("PASS")).count();
    let fail_lines = stdout.lines().filter(|l| l.starts_with("FAIL")).count();

    // the same checks over other parameter values, in process
    let mut params_ok = true;
    for (m, t, h) in [
        ((3, 2), (-5, 7), (1, 3)),
        ((7, 1), (0, 1), (2, 1)),
        ((1, 9), (4, 3), (5, 8)),
    ] {
        let g =
            galilei_generators(rat(m.0, m.1), rat(t.0, t.1), rat(h.0, h.1)).expect("generators");
        let v = [rat(1, 2), rat(-3, 1), rat(2, 5)];
        params_ok &= verify_galilei_algebra(&g).all_pass()
            && boost_checks(&g, &v).iter().all(|b| b.pass)
            && casimir_check(&g).pass();
    }
    let pass = code == 0 && pass_lines == 55 && fail_lines == 0 && params_ok && cli_secs < 1.0;
    verdict(
        pass,
        format!(
            "{pass_lines} PASS / {fail_lines} FAIL commutator lines, boosts and Casimirs exact, other (m,t,hbar) {}, cli {cli_secs:.3} s",
            if params_ok { "exact" } else { "FAILED" }
        ),
    )
}

fn c2() -> Verdict {
    let start = Instant::now();
    let s = match radial_eigensolve(6.6, 2000) {
        Ok(s) => s,
        Err(e) => return verdict(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let err = s
        .energies
        .iter()
        .enumerate()
        .map(|(n, e)| (e - (n as f64 + 1.5)).abs())
        .fold(0.0, f64::max);
    let pass = s.energies.len() == 6 && err < 1e-6 && secs < 5.0;
    verdict(
        pass,
        format!(
            "{} levels, max |E - (n+3/2)| = {err:.2e}, solve {secs:.3} s",
            s.energies.len()
        ),
    )
}

fn c3() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut worst = String::new();
    for n in 0..=6u32 {
        match ho3d_state(n) {
            Ok(r) => {
                let exact = ExactComplex::ratio(2 * n as i64 + 3, 2);
                if !(r.is_eigen && r.exact_energy.as_ref() == Some(&exact)) {
                    ok = false;
                    worst = format!("n = {n}: energy {}", r.energy);
                }
            }
            Err(e) => {
                ok = false;
                worst = format!("n = {n}: {e}");
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = if ok {
        "exact E = n + 3/2 for n = 0..6".to_string()
    } else {
        worst
    };
    verdict(ok && secs < 2.0, format!("{detail}, {secs:.3} s"))
}

fn c4() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut exact = true;
    let mut count = 0;
    for theta in [0.0, 0.5, 1.0, 2.0] {
        let omega = (1.0f64 + theta * theta).sqrt();
        for nx in 0..=4u32 {
            for ny in 0..=4 - nx {
                match nc_state(nx, ny, theta) {
                    Ok(r) => {
                        count += 1;
                        exact &= r.is_eigen;
                        worst = worst
                            .max(r.residual)
                            .max((r.energy - omega * (nx + ny + 1) as f64).abs());
                    }
                    Err(_) => exact = false,
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        exact && worst < 1e-10 && secs < 10.0,
        format!("{count} states, all exact eigenstates: {exact}, max residual or energy error {worst:.1e}, {secs:.3} s"),
    )
}

fn c5() -> Verdict {
    let mut ok = true;
    let mut shown = Vec::new();
    for theta in [0.0, 0.5, 1.0, 2.0] {
        let coords = match nc_coordinates(theta) {
            Ok(c) => c,
            Err(e) => return verdict(false, e.to_string()),
        };
        let table = coords.ladder_commutators().expect("commutators");
        for (i, row) in table.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                let expected = if i == j {
                    WeylOperator::<QuadSurd>::constant(2, coords.omega.clone())
                } else {
                    WeylOperator::<QuadSurd>::zero(2)
                };
                ok &= *w == expected;
            }
        }
        shown.push(format!("theta={theta}: {}", table[0][0]));
    }
    verdict(
        ok,
        format!(
            "[a_i, a_j^dag] = omega delta_ij exactly ({}); the value is real, not i*omega",
            shown.join(", ")
        ),
    )
}

fn c6() -> Verdict {
    let start = Instant::now();
    let g = grid(2, 6.0, 32, 1.0, 0.0);
    let state = nc_state(1, 1, 0.0).expect("state").state;
    let psi = Field::sample_polygauss(g.clone(), &state).expect("sample");
    let nc = NcParams::moyal(Complex64::new(1.0, 0.0)).expect("params");
    let series = match star_series(&psi, &psi.conj(), 20, &nc) {
        Ok(s) => s,
        Err(e) => return verdict(false, e.to_string()),
    };
    let total = series.field.integrate().re;
    let fw = series.field.map(|v| Complex64::new(v.re / total, 0.0));
    let closed = nc_wigner(1, 1, 0.0)
        .expect("wigner")
        .sample(g)
        .expect("sample");
    let diff = fw.max_abs_diff(&closed).expect("same grid");
    let secs = start.elapsed().as_secs_f64();
    verdict(
        diff < 1e-5 && secs < 120.0,
        format!(
            "max |series - closed form| = {diff:.3e}, last-order relative size {:.3e}, converged {}, {secs:.1} s",
            series.relative_last, series.converged
        ),
    )
}

fn random_symbol(rng: &mut ChaCha8Rng, dim: usize, max_deg: u16) -> P {
    let mut s = P::zero(dim);
    for _ in 0..rng.random_range(1..=4) {
        let exps: Vec<u16> = (0..2 * dim)
            .map(|_| rng.random_range(0..=max_deg))
            .collect();
        if exps.iter().sum::<u16>() > max_deg {
            continue;
        }
        let c = ExactComplex::new(
            rat(rng.random_range(-4..=4), rng.random_range(1..=3)),
            rat(rng.random_range(-2..=2), 2),
        );
        s = s.plus(&P::monomial(dim, exps, c));
    }
    s
}

fn c7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = grid(1, 10.0, 128, 1.0, 0.0);
    let nc = NcParams::moyal(ExactComplex::from_int(1)).expect("params");
    let widths = [
        ExactComplex::ratio(1, 2),
        ExactComplex::from_int(1),
        ExactComplex::ratio(3, 2),
    ];
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = random_symbol(&mut rng, 1, 3);
        let poly = random_symbol(&mut rng, 1, 2).plus(&P::one(1));
        let s =
            PolyGaussForm::isotropic(poly, widths[rng.random_range(0..3)].clone()).expect("state");
        let exact = polygauss_apply(&bopp_operator(&a, &nc).expect("bopp"), &s).expect("apply");
        let lhs = star_apply_poly(
            &a,
            &Field::sample_polygauss(g.clone(), &s).expect("sample"),
            &nc,
        )
        .expect("grid apply");
        let rhs = Field::sample_polygauss(g.clone(), &exact).expect("sample");
        worst = worst.max(lhs.max_abs_diff(&rhs).expect("same grid"));
    }
    verdict(
        worst < 1e-9,
        format!("100 random pairs, max discrepancy {worst:.2e}"),
    )
}

fn c8() -> Verdict {
    let g = grid(2, 6.0, 32, 1.0, 0.0);
    let mut worst_diff = 0.0f64;
    let mut worst_min = f64::INFINITY;
    let mut cases = 0;
    for theta in [0.0, 0.5, 1.0, 2.0] {
        let gt = Arc::new(PhaseGrid::new(2, g.axes().to_vec(), 1.0, theta).expect("grid"));
        for (nx, ny) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)] {
            let state = nc_state(nx, ny, theta).expect("state").state;
            let psi = Field::sample_polygauss(gt.clone(), &state).expect("sample");
            let fw = nc_wigner(nx, ny, theta)
                .expect("wigner")
                .sample(gt.clone())
                .expect("sample");
            for keep in [[0usize, 1], [2, 3]] {
                let m = marginal_identity(&fw, &psi, &keep).expect("marginals");
                cases += 1;
                worst_diff = worst_diff.max(m.max_diff);
                worst_min = worst_min.min(m.star_min).min(m.pointwise_min);
            }
        }
    }
    verdict(
        worst_diff < 1e-6 && worst_min > -1e-8,
        format!("{cases} marginals, max |star - pointwise| = {worst_diff:.3e}, min value {worst_min:.3e}"),
    )
}

fn c9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let hbar = ExactComplex::ratio(3, 7);
    let deformed = NcParams::new(hbar.clone(), ExactComplex::zero()).expect("params");
    let moyal = NcParams::moyal(hbar).expect("params");
    let mut ok = deformed == moyal;
    for order in 0..=4 {
        ok &= star_expansion(2, &deformed, order).expect("terms")
            == star_expansion(2, &moyal, order).expect("terms");
    }
    for _ in 0..200 {
        let a = random_symbol(&mut rng, 2, 3);
        let b = random_symbol(&mut rng, 2, 3);
        ok &=
            star_poly(&a, &b, &deformed).expect("star") == star_poly(&a, &b, &moyal).expect("star");
    }
    let g = grid(1, 6.0, 32, 1.0, 0.0);
    let f = Field::sample(g.clone(), |u| {
        Complex64::new(
            (-(u[0] * u[0] + u[1] * u[1])).exp() * (1.0 + u[0]),
            u[1] * 0.1,
        )
    })
    .expect("sample");
    let h = Field::sample(g, |u| {
        Complex64::new((-(u[0] - 0.5).powi(2) - u[1] * u[1]).exp(), 0.0)
    })
    .expect("sample");
    let a = star_series(
        &f,
        &h,
        6,
        &NcParams::new(Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)).expect("params"),
    );
    let b = star_series(
        &f,
        &h,
        6,
        &NcParams::moyal(Complex64::new(0.5, 0.0)).expect("params"),
    );
    let bitwise = matches!((&a, &b), (Ok(a), Ok(b)) if a.field.values().iter().zip(b.field.values())
        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    verdict(ok && bitwise, format!("exact symbol products equal over 200 random pairs: {ok}, grid series bitwise equal: {bitwise}"))
}

fn c10() -> Verdict {
    let g = grid(1, 6.0, 32, 1.0, 0.0);
    let psi0 = Field::sample(g.clone(), |u| {
        Complex64::new((-(u[0] * u[0] + u[1] * u[1])).exp(), 0.0)
    })
    .expect("sample");
    let h = PolynomialSymbol::<Complex64>::radius_squared(1).scale(&Complex64::new(0.5, 0.0));
    let nc = g.nc_params().expect("params");
    let period = 2.0 * PI;
    let mut rows = Vec::new();
    for dt in [0.025, 0.0125] {
        let ev = match evolve(&psi0, &h, period, dt, &nc) {
            Ok(ev) => ev,
            Err(e) => return verdict(false, e.to_string()),
        };
        let overlap = psi0.inner(&ev.field).expect("same grid");
        let n0 = psi0.inner(&psi0).expect("same grid").re;
        let n1 = ev.field.inner(&ev.field).expect("same grid").re;
        let fidelity = overlap.norm_sqr() / (n0 * n1);
        // E = 1/2, so one period multiplies the state by e^{-iπ} = -1
        let phase_err = (-overlap).arg().abs();
        rows.push((ev.dt, fidelity, ev.norm_drift, phase_err, ev.stable));
    }
    let ratio = rows[0].3 / rows[1].3;
    let expected = (rows[0].0 / rows[1].0).powi(4);
    let fid = rows.iter().map(|r| r.1).fold(1.0, f64::min);
    let drift = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let stable = rows.iter().all(|r| r.4);
    let pass = fid > 1.0 - 1e-6 && drift < 1e-6 && (ratio / 16.0 - 1.0).abs() <= 0.25 && stable;
    verdict(
        pass,
        format!(
            "fidelity {:.12}, norm drift {drift:.2e}, phase errors {:.3e} / {:.3e}, ratio {ratio:.2} (step ratio^4 {expected:.2}), stable {stable}",
            fid, rows[0].3, rows[1].3
        ),
    )
}

fn c11() -> Verdict {
    // Moyal bracket against Poisson bracket as ħ halves
    let g = grid(1, 8.0, 64, 1.0, 0.0);
    let f = Field::sample(g.clone(), |u| {
        Complex64::new(
            (1.0 + u[0] * u[1]) * (-(u[0] * u[0] + u[1] * u[1]) / 2.0).exp(),
            0.0,
        )
    })
    .expect("sample");
    let h = Field::sample(g.clone(), |u| {
        Complex64::new(
            (u[0] + u[1] * u[1]) * (-((u[0] - 0.5).powi(2) + u[1] * u[1]) / 2.0).exp(),
            0.0,
        )
    })
    .expect("sample");
    let pb = f
        .spectral_partial(0, 1)
        .and_then(|fq| fq.mul(&h.spectral_partial(1, 1)?))
        .and_then(|a| a.sub(&f.spectral_partial(1, 1)?.mul(&h.spectral_partial(0, 1)?)?))
        .expect("poisson bracket");
    let mut errs = Vec::new();
    for hbar in [0.2, 0.1, 0.05] {
        let nc = NcParams::moyal(Complex64::new(hbar, 0.0)).expect("params");
        let fh = star_series(&f, &h, 12, &nc).expect("series").field;
        let hf = star_series(&h, &f, 12, &nc).expect("series").field;
        let mb = fh
            .sub(&hf)
            .expect("same grid")
            .scale(Complex64::new(0.0, -1.0 / hbar));
        errs.push(mb.max_abs_diff(&pb).expect("same grid"));
    }
    let bracket_ratios = [errs[0] / errs[1], errs[1] / errs[2]];

    // radial eigensolver at N, 2N, 4N cells
    let r_max = box_length(5);
    let errors: Vec<Vec<f64>> = [500, 1000, 2000]
        .iter()
        .map(|&n| {
            RadialMatrix::new(n, r_max)
                .lowest(6)
                .iter()
                .enumerate()
                .map(|(k, l)| (l - k as f64).abs())
                .collect()
        })
        .collect();
    // the ground level is exact on every grid
    let radial_ratios: Vec<f64> = (1..6)
        .flat_map(|k| [errors[0][k] / errors[1][k], errors[1][k] / errors[2][k]])
        .collect();
    let in_window = |r: &f64| (r / 4.0 - 1.0).abs() <= 0.2;
    let pass = bracket_ratios.iter().all(in_window) && radial_ratios.iter().all(in_window);
    let (lo, hi) = radial_ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    verdict(
        pass,
        format!(
            "bracket error ratios {:.3}, {:.3}; radial error ratios in [{lo:.3}, {hi:.3}]; window 4 +/- 20%",
            bracket_ratios[0], bracket_ratios[1]
        ),
    )
}

/// All criteria in order; criterion `k` is at index `k - 1`.
pub const CRITERIA: [Criterion; 11] = [
    ("Galilei algebra", c1),
    ("3D oscillator radial spectrum", c2),
    ("closed-form 3D eigenstates", c3),
    ("noncommutative spectrum", c4),
    ("ladder algebra", c5),
    ("Wigner series against closed form", c6),
    ("grid against exact star application", c7),
    ("marginals", c8),
    ("theta = 0 reduction", c9),
    ("RK4 evolution", c10),
    ("convergence orders", c11),
];
