//! The centrally extended Galilei algebra realised by Bopp-shifted operators in three dimensions.

use num_traits::Signed;
use serde::Serialize;

use super::WeylOperator;
use crate::error::{PsqmError, Result};
use crate::scalar::{ExactComplex, Rational, Scalar};

type W = WeylOperator<ExactComplex>;

/// Maximum number of nested commutators tried by [`boost_adjoint`].
pub const BOOST_ORDER_CAP: usize = 8;

const DIM: usize = 3;

/// Exact generators for mass `m`, time `t` and Planck constant `hbar`.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub m: Rational,
    pub t: Rational,
    pub hbar: Rational,
    pub q: [W; 3],
    pub p: [W; 3],
    pub k: [W; 3],
    pub l: [W; 3],
    pub h: W,
}

fn c(r: &Rational) -> ExactComplex {
    ExactComplex::from_rational(r)
}

fn levi(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Build `Q̂, P̂, K̂, L̂, Ĥ` exactly.
pub fn galilei_generators(m: Rational, t: Rational, hbar: Rational) -> Result<GeneratorSet> {
    if !m.is_positive() {
        return Err(PsqmError::InvalidParameter(format!(
            "mass must be positive, got {m}"
        )));
    }
    if !hbar.is_positive() {
        return Err(PsqmError::InvalidParameter(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    let ih2 = ExactComplex::i()
        .mul(&c(&hbar))
        .mul(&ExactComplex::ratio(1, 2));
    let q: [W; 3] = std::array::from_fn(|i| {
        W::coord(DIM, i)
            .plus(&W::deriv(DIM, DIM + i).scale(&ih2))
            .unwrap()
    });
    let p: [W; 3] = std::array::from_fn(|i| {
        W::coord(DIM, DIM + i)
            .minus(&W::deriv(DIM, i).scale(&ih2))
            .unwrap()
    });
    let k: [W; 3] = std::array::from_fn(|i| q[i].scale(&c(&m)).minus(&p[i].scale(&c(&t))).unwrap());
    let l: [W; 3] = std::array::from_fn(|i| cross_component(i, &q, &p));
    let h = kinetic(&p, &m);
    Ok(GeneratorSet {
        m,
        t,
        hbar,
        q,
        p,
        k,
        l,
        h,
    })
}

fn cross_component(i: usize, a: &[W; 3], b: &[W; 3]) -> W {
    let mut out = W::zero(DIM);
    for j in 0..3 {
        for k in 0..3 {
            let e = levi(i, j, k);
            if e != 0 {
                let prod = a[j]
                    .compose(&b[k])
                    .unwrap()
                    .scale(&ExactComplex::from_int(e));
                out = out.plus(&prod).unwrap();
            }
        }
    }
    out
}

fn kinetic(p: &[W; 3], m: &Rational) -> W {
    let mut sq = W::zero(DIM);
    for pi in p {
        sq = sq.plus(&pi.compose(pi).unwrap()).unwrap();
    }
    sq.scale(&c(
        &(Rational::from_integer(1.into()) / (m * Rational::from_integer(2.into())))
    ))
}

impl GeneratorSet {
    /// The ten generators in report order `L1..L3, K1..K3, P1..P3, H`.
    pub fn named(&self) -> Vec<(String, &W)> {
        let mut v = Vec::new();
        for (tag, set) in [("L", &self.l), ("K", &self.k), ("P", &self.p)] {
            for (i, g) in set.iter().enumerate() {
                v.push((format!("{tag}{}", i + 1), g));
            }
        }
        v.push(("H".to_string(), &self.h));
        v
    }

    /// Multiplication operator `q_i · 1`.
    pub fn q_bar(&self, i: usize) -> W {
        W::coord(DIM, i)
    }

    /// Multiplication operator `p_i · 1`.
    pub fn p_bar(&self, i: usize) -> W {
        W::coord(DIM, DIM + i)
    }

    fn i_hbar(&self) -> ExactComplex {
        ExactComplex::i().mul(&c(&self.hbar))
    }

    /// Expected commutator of two named generators according to the algebra table.
    fn expected(&self, a: &str, b: &str) -> W {
        let (ta, ia) = split_name(a);
        let (tb, ib) = split_name(b);
        let ih = self.i_hbar();
        let eps_sum = |set: &[W; 3]| {
            let mut out = W::zero(DIM);
            for k in 0..3 {
                let e = levi(ia, ib, k);
                if e != 0 {
                    out = out
                        .plus(&set[k].scale(&ih.mul(&ExactComplex::from_int(e))))
                        .unwrap();
                }
            }
            out
        };
        let rev = |w: W| w.scale(&ExactComplex::from_int(-1));
        match (ta, tb) {
            ('L', 'L') => eps_sum(&self.l),
            ('L', 'K') => eps_sum(&self.k),
            ('L', 'P') => eps_sum(&self.p),
            ('K', 'L') | ('P', 'L') => rev(self.expected(b, a)),
            ('K', 'P') if ia == ib => W::constant(DIM, ih.mul(&c(&self.m))),
            ('P', 'K') if ia == ib => W::constant(DIM, ih.mul(&c(&self.m)).neg()),
            ('K', 'H') => self.p[ia].scale(&ih),
            ('H', 'K') => self.p[ib].scale(&ih.neg()),
            _ => W::zero(DIM),
        }
    }
}

fn split_name(s: &str) -> (char, usize) {
    let mut ch = s.chars();
    let t = ch.next().unwrap();
    let idx = ch.as_str().parse::<usize>().map(|i| i - 1).unwrap_or(0);
    (t, idx)
}

#[derive(Clone, Debug)]
pub struct AlgebraEntry {
    pub left: String,
    pub right: String,
    pub computed: W,
    pub expected: W,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct AlgebraReport {
    pub entries: Vec<AlgebraEntry>,
}

impl AlgebraReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AlgebraEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

/// Check every unordered pair (self-pairs included) of the ten generators: 55 entries.
pub fn verify_galilei_algebra(g: &GeneratorSet) -> AlgebraReport {
    let named = g.named();
    let mut entries = Vec::new();
    for i in 0..named.len() {
        for j in i..named.len() {
            let (na, a) = &named[i];
            let (nb, b) = &named[j];
            let computed = a.commutator(b).expect("generators share dim");
            let expected = g.expected(na, nb);
            let pass = computed == expected;
            entries.push(AlgebraEntry {
                left: na.clone(),
                right: nb.clone(),
                computed,
                expected,
                pass,
            });
        }
    }
    AlgebraReport { entries }
}

/// `exp(−i v·K/ħ) X exp(i v·K/ħ)` by its adjoint series, stopping at the first vanishing term.
pub fn boost_adjoint(g: &GeneratorSet, x: &W, v: &[Rational; 3]) -> Result<W> {
    let mut y = W::zero(DIM);
    let minus_i_over_hbar = ExactComplex::i()
        .neg()
        .mul(&c(&(Rational::from_integer(1.into()) / &g.hbar)));
    for (kj, vj) in g.k.iter().zip(v) {
        y = y.plus(&kj.scale(&minus_i_over_hbar.mul(&c(vj))))?;
    }
    let mut result = x.clone();
    let mut term = x.clone();
    for order in 1..=BOOST_ORDER_CAP + 1 {
        term = y
            .commutator(&term)?
            .scale(&ExactComplex::ratio(1, order as i64));
        if term.is_zero() {
            return Ok(result);
        }
        if order > BOOST_ORDER_CAP {
            break;
        }
        result = result.plus(&term)?;
    }
    Err(PsqmError::NonNilpotent(BOOST_ORDER_CAP))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoostCheck {
    pub name: String,
    pub got: String,
    pub expected: String,
    pub pass: bool,
}

/// The boost identities for every component: `Q̂ → Q̂ + vt`, `P̂ → P̂ + mv`,
/// `Q̄ → Q̄ + vt/2`, `P̄ → P̄ + mv/2`.
pub fn boost_checks(g: &GeneratorSet, v: &[Rational; 3]) -> Vec<BoostCheck> {
    let mut out = Vec::new();
    let half = Rational::new(1.into(), 2.into());
    for i in 0..3 {
        let shift_q = &v[i] * &g.t;
        let shift_p = &v[i] * &g.m;
        let cases = [
            (format!("Q{}", i + 1), g.q[i].clone(), shift_q.clone()),
            (format!("P{}", i + 1), g.p[i].clone(), shift_p.clone()),
            (format!("Qbar{}", i + 1), g.q_bar(i), &shift_q * &half),
            (format!("Pbar{}", i + 1), g.p_bar(i), &shift_p * &half),
        ];
        for (name, x, shift) in cases {
            let expected = x.plus(&W::constant(DIM, c(&shift))).unwrap();
            let (got, pass) = match boost_adjoint(g, &x, v) {
                Ok(b) => {
                    let pass = b == expected;
                    (b.to_string(), pass)
                }
                Err(e) => (e.to_string(), false),
            };
            out.push(BoostCheck {
                name,
                got,
                expected: expected.to_string(),
                pass,
            });
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CasimirReport {
    pub i1: W,
    pub i2: [W; 3],
}

impl CasimirReport {
    pub fn pass(&self) -> bool {
        self.i1.is_zero() && self.i2.iter().all(|w| w.is_zero())
    }
}

/// `I₁ = Ĥ − P̂²/2m` and `I₂ = L̂ − (1/m) K̂×P̂`.
pub fn casimir_check(g: &GeneratorSet) -> CasimirReport {
    let i1 = g.h.minus(&kinetic(&g.p, &g.m)).unwrap();
    let inv_m = c(&(Rational::from_integer(1.into()) / &g.m));
    let i2 = std::array::from_fn(|i| {
        g.l[i]
            .minus(&cross_component(i, &g.k, &g.p).scale(&inv_m))
            .unwrap()
    });
    CasimirReport { i1, i2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn gens(m: i64, t: i64) -> GeneratorSet {
        galilei_generators(rat(m, 1), rat(t, 1), rat(1, 1)).unwrap()
    }

    #[test]
    fn q_hat_matches_bopp_form() {
        let g = gens(1, 0);
        assert_eq!(g.q[0].to_string(), "q1 + (i/2) d/dp1");
        assert_eq!(g.k[0], g.q[0]);
    }

    #[test]
    fn hamiltonian_for_mass_two() {
        let g = gens(2, 1);
        let mut want = W::zero(3);
        for i in 0..3 {
            want = want.plus(&g.p[i].compose(&g.p[i]).unwrap()).unwrap();
        }
        assert_eq!(g.h, want.scale(&ExactComplex::ratio(1, 4)));
    }

    #[test]
    fn full_table_passes() {
        let r = verify_galilei_algebra(&gens(1, 0));
        assert_eq!(r.entries.len(), 55);
        assert!(
            r.all_pass(),
            "{:?}",
            r.failures()
                .map(|e| (&e.left, &e.right))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn central_charge_scales_with_mass() {
        let g = gens(3, 2);
        let kp = g.k[0].commutator(&g.p[0]).unwrap();
        assert_eq!(
            kp.as_constant(),
            Some(ExactComplex::i().mul(&ExactComplex::from_int(3)))
        );
        assert!(verify_galilei_algebra(&g).all_pass());
    }

    #[test]
    fn commutator_examples() {
        let g = gens(1, 0);
        assert_eq!(
            g.q[0].commutator(&g.p[0]).unwrap().as_constant(),
            Some(ExactComplex::i())
        );
        assert!(g.q_bar(0).commutator(&g.p_bar(0)).unwrap().is_zero());
        assert_eq!(
            g.k[0].commutator(&g.h).unwrap(),
            g.p[0].scale(&ExactComplex::i())
        );
    }

    #[test]
    fn tampered_boost_fails_k_h_check() {
        let mut g = gens(1, 0);
        g.k[0] = g.k[0].plus(&g.p[0]).unwrap();
        let r = verify_galilei_algebra(&g);
        assert!(!r.all_pass());
        // [P1, H] = 0, so the K1–H entry cannot see this tampering; the L–K entries do
        let kh = r
            .entries
            .iter()
            .find(|e| e.left == "K1" && e.right == "H")
            .unwrap();
        assert!(kh.pass);
        assert!(r.failures().any(|e| e.left == "L2" && e.right == "K1"));
    }

    #[test]
    fn boosts_shift_by_central_terms() {
        let g = gens(2, 3);
        let v = [rat(5, 7), rat(0, 1), rat(0, 1)];
        let q = boost_adjoint(&g, &g.q[0], &v).unwrap();
        assert_eq!(
            q.minus(&g.q[0]).unwrap().as_constant(),
            Some(ExactComplex::ratio(15, 7))
        );
        let p = boost_adjoint(&g, &g.p[0], &v).unwrap();
        assert_eq!(
            p.minus(&g.p[0]).unwrap().as_constant(),
            Some(ExactComplex::ratio(10, 7))
        );
        let qb = boost_adjoint(&g, &g.q_bar(0), &v).unwrap();
        assert_eq!(
            qb.minus(&g.q_bar(0)).unwrap().as_constant(),
            Some(ExactComplex::ratio(15, 14))
        );
        assert!(boost_checks(&g, &[rat(1, 2), rat(-3, 1), rat(2, 5)])
            .iter()
            .all(|b| b.pass));
    }

    #[test]
    fn non_nilpotent_adjoint_is_rejected() {
        let g = gens(1, 0);
        let x = W::coord(3, 3).compose(&W::coord(3, 3)).unwrap();
        let v = [rat(1, 1), rat(0, 1), rat(0, 1)];
        // [K1, p1²] is linear in p1, so this terminates at order 3
        assert!(boost_adjoint(&g, &x, &v).is_ok());
        // a rotation generator in place of K1 never terminates
        let mut g2 = g.clone();
        g2.k[0] = g.l[2].clone();
        let err = boost_adjoint(&g2, &g.q[0], &v).unwrap_err();
        assert_eq!(err, PsqmError::NonNilpotent(BOOST_ORDER_CAP));
    }

    #[test]
    fn casimirs_vanish() {
        for (m, t) in [(1, 0), (5, 3)] {
            let r = casimir_check(&gens(m, t));
            assert!(r.pass());
        }
        let mut g = gens(1, 0);
        g.h = g.h.plus(&W::identity(3)).unwrap();
        let r = casimir_check(&g);
        assert_eq!(r.i1.as_constant(), Some(ExactComplex::one()));
        assert!(!r.pass());
    }

    #[test]
    fn invalid_parameters() {
        assert!(galilei_generators(rat(0, 1), rat(0, 1), rat(1, 1)).is_err());
        assert!(galilei_generators(rat(1, 1), rat(0, 1), rat(-1, 1)).is_err());
    }
}
