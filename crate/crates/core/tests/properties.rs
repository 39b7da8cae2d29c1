use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use psqm_core::grid::Fft;
use psqm_core::io::{decode_field, encode_field};
use psqm_core::oscillators::{kummer_m, laguerre};
use psqm_core::parse::parse_symbol;
use psqm_core::star::star_poly;
use psqm_core::wigner::marginal;
use psqm_core::{rat, ExactComplex, Field, NcParams, PhaseGrid, PolynomialSymbol, Scalar};

type P = PolynomialSymbol<ExactComplex>;

fn symbol(dim: usize, max_deg: u16) -> impl Strategy<Value = P> {
    let term = (
        prop::collection::vec(0..=max_deg, 2 * dim),
        -5i64..=5,
        1i64..=4,
        -3i64..=3,
    );
    prop::collection::vec(term, 1..4).prop_map(move |terms| {
        let mut s = P::zero(dim);
        for (exps, re, den, im) in terms {
            if exps.iter().sum::<u16>() <= max_deg {
                s = s.plus(&P::monomial(
                    dim,
                    exps,
                    ExactComplex::new(rat(re, den), rat(im, den)),
                ));
            }
        }
        s
    })
}

fn params() -> impl Strategy<Value = NcParams> {
    (1i64..=5, 1i64..=4, -3i64..=3, 1i64..=4).prop_map(|(hn, hd, tn, td)| {
        NcParams::new(ExactComplex::ratio(hn, hd), ExactComplex::ratio(tn, td)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_is_associative(a in symbol(2, 2), b in symbol(2, 2), c in symbol(2, 2), nc in params()) {
        let left = star_poly(&star_poly(&a, &b, &nc).unwrap(), &c, &nc).unwrap();
        let right = star_poly(&a, &star_poly(&b, &c, &nc).unwrap(), &nc).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn conjugation_reverses_products(a in symbol(2, 3), b in symbol(2, 3), nc in params()) {
        let lhs = star_poly(&a, &b, &nc).unwrap().conj();
        let rhs = star_poly(&b.conj(), &a.conj(), &nc).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_zero_is_moyal(a in symbol(2, 3), b in symbol(2, 3), h in 1i64..=9) {
        let hbar = ExactComplex::ratio(h, 3);
        let deformed = NcParams::new(hbar.clone(), ExactComplex::zero()).unwrap();
        let moyal = NcParams::moyal(hbar).unwrap();
        prop_assert_eq!(star_poly(&a, &b, &deformed).unwrap(), star_poly(&a, &b, &moyal).unwrap());
    }

    #[test]
    fn quadratic_commutator_is_the_poisson_bracket(a in symbol(1, 2), b in symbol(1, 4), h in 1i64..=6) {
        // with a of degree two the Moyal bracket has no corrections
        let hbar = ExactComplex::ratio(h, 2);
        let nc = NcParams::moyal(hbar.clone()).unwrap();
        let comm = star_poly(&a, &b, &nc).unwrap().minus(&star_poly(&b, &a, &nc).unwrap());
        let poisson = a.derivative(0).times(&b.derivative(1)).minus(&a.derivative(1).times(&b.derivative(0)));
        prop_assert_eq!(comm, poisson.scale(&ExactComplex::i().mul(&hbar)));
    }

    #[test]
    fn unit_is_neutral(a in symbol(2, 3), nc in params()) {
        let one = P::one(2);
        prop_assert_eq!(star_poly(&one, &a, &nc).unwrap(), a.clone());
        prop_assert_eq!(star_poly(&a, &one, &nc).unwrap(), a);
    }

    #[test]
    fn field_files_round_trip(vals in prop::collection::vec((any::<f64>(), any::<f64>()), 64), hbar in 0.01f64..10.0) {
        let g = Arc::new(PhaseGrid::uniform(1, 3.0, 8, hbar, 0.0).unwrap());
        let f = Field::from_values(g, vals.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap();
        let back = decode_field(&encode_field(&f)).unwrap();
        prop_assert_eq!(f.grid(), back.grid());
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn fft_round_trip(log_n in 0u32..9, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let x: Vec<Complex64> = (0..n)
            .map(|i| {
                let t = (seed.wrapping_mul(i as u64 + 1) % 1000) as f64 / 500.0 - 1.0;
                Complex64::new(t, 0.5 * t * t)
            })
            .collect();
        let plan = Fft::new(n);
        let mut y = x.clone();
        plan.forward(&mut y);
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let spectral: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        prop_assert!((energy - spectral).abs() <= 1e-12 * energy.max(1.0));
        plan.inverse(&mut y);
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn laguerre_is_terminating_kummer(n in 0u32..12, x in 0.0f64..20.0) {
        let l = laguerre(n, x);
        let m = kummer_m(-(n as f64), 1.0, x).unwrap();
        prop_assert!((l - m).abs() <= 1e-9 * l.abs().max(1.0));
    }

    #[test]
    fn marginals_keep_the_integral(a in -1.0f64..1.0, b in 0.5f64..2.0) {
        let g = Arc::new(PhaseGrid::uniform(2, 4.0, 8, 1.0, 0.0).unwrap());
        let f = Field::sample(g, |u| Complex64::new((-(b * u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3])).exp() * (1.0 + a * u[1]), 0.0)).unwrap();
        let total = f.integrate().re;
        for keep in [vec![0], vec![1, 3], vec![0, 1, 2]] {
            let m = marginal(&f, &keep).unwrap();
            prop_assert!((m.integrate() - total).abs() <= 1e-12 * total.abs());
        }
    }

    #[test]
    fn parsed_sums_match_constructed(coeffs in prop::collection::vec((-20i64..20, 1i64..6), 4)) {
        let names = ["x", "y*px", "py^2", "x*y*py"];
        let exps: [[u16; 4]; 4] = [[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 2], [1, 1, 0, 1]];
        let src = coeffs
            .iter()
            .zip(names)
            .map(|((n, d), v)| format!("({n})/{d}*{v}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let parsed = parse_symbol(&src, None).unwrap();
        let mut expected = P::zero(2);
        for ((n, d), e) in coeffs.iter().zip(exps) {
            expected = expected.plus(&P::monomial(2, e.to_vec(), ExactComplex::ratio(*n, *d)));
        }
        prop_assert_eq!(parsed, expected);
    }
}
