//! Exact noncommutative polynomials in phase-space coordinates and their derivatives.
//!
//! A term `c · u^α ∂^β` is stored under the key `α ‖ β` (coordinates first), which is the
//! normal order. Composition re-normalises with the generalised Leibniz rule
//! `∂^b ∘ u^a = Σ_j C(b,j) a!/(a−j)! u^{a−j} ∂^{b−j}` applied independently per variable.

mod galilei;

pub use galilei::{
    boost_adjoint, boost_checks, casimir_check, galilei_generators, verify_galilei_algebra,
    AlgebraEntry, AlgebraReport, BoostCheck, CasimirReport, GeneratorSet, BOOST_ORDER_CAP,
};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{PsqmError, Result};
use crate::scalar::{ExactComplex, Rational, Scalar};

/// Names of the `2d` phase-space variables: `q,p` for one dimension, `x,y,px,py` for two,
/// `q1..q3,p1..p3` for three.
pub fn phase_names(dim: usize) -> Vec<String> {
    match dim {
        1 => vec!["q".into(), "p".into()],
        2 => vec!["x".into(), "y".into(), "px".into(), "py".into()],
        _ => (1..=dim)
            .map(|i| format!("q{i}"))
            .chain((1..=dim).map(|i| format!("p{i}")))
            .collect(),
    }
}

fn binomial(n: u16, k: u16) -> BigInt {
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn falling(n: u16, k: u16) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i))
}

#[derive(Clone, PartialEq)]
pub struct WeylOperator<C: Scalar = ExactComplex> {
    dim: usize,
    terms: BTreeMap<Vec<u16>, C>,
}

impl<C: Scalar> fmt::Debug for WeylOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylOperator(d={}, {})", self.dim, self)
    }
}

impl<C: Scalar> WeylOperator<C> {
    pub fn zero(dim: usize) -> Self {
        WeylOperator {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        let mut op = Self::zero(dim);
        op.accumulate(vec![0; 4 * dim], c);
        op
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    /// Multiplication by the phase variable `u_k` (`k < 2d`).
    pub fn coord(dim: usize, k: usize) -> Self {
        Self::monomial(dim, &unit(2 * dim, k), &vec![0; 2 * dim], C::one())
    }

    /// The derivative `∂/∂u_k`.
    pub fn deriv(dim: usize, k: usize) -> Self {
        Self::monomial(dim, &vec![0; 2 * dim], &unit(2 * dim, k), C::one())
    }

    pub fn monomial(dim: usize, coords: &[u16], derivs: &[u16], c: C) -> Self {
        assert_eq!(coords.len(), 2 * dim);
        assert_eq!(derivs.len(), 2 * dim);
        let mut op = Self::zero(dim);
        op.accumulate([coords, derivs].concat(), c);
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        2 * self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient vanishes (no stored terms).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate `(coordinate exponents, derivative exponents, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &[u16], &C)> {
        let n = self.nvars();
        self.terms.iter().map(move |(k, c)| (&k[..n], &k[n..], c))
    }

    pub fn coefficient(&self, coords: &[u16], derivs: &[u16]) -> C {
        self.terms
            .get(&[coords, derivs].concat())
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// The value if the operator is a multiple of the identity (zero included).
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                k.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Highest derivative order over all terms.
    pub fn derivative_order(&self) -> usize {
        let n = self.nvars();
        self.terms
            .keys()
            .map(|k| k[n..].iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn accumulate(&mut self, key: Vec<u16>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check_dim(&self, o: &Self) -> Result<()> {
        if self.dim == o.dim {
            Ok(())
        } else {
            Err(PsqmError::DimensionMismatch(format!(
                "operators of dimension {} and {}",
                self.dim, o.dim
            )))
        }
    }

    pub fn plus(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.accumulate(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn minus(&self, o: &Self) -> Result<Self> {
        self.plus(&o.scale(&C::one().neg()))
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), c.mul(s));
        }
        out
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> WeylOperator<D> {
        let mut out = WeylOperator::zero(self.dim);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), f(c));
        }
        out
    }

    pub fn to_complex64(&self) -> WeylOperator<num_complex::Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// Normal-ordered product `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let n = self.nvars();
        let mut out = Self::zero(self.dim);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let cab = ca.mul(cb);
                let top: Vec<u16> = (0..n).map(|k| ka[n + k].min(kb[k])).collect();
                let mut j = vec![0u16; n];
                loop {
                    let mut f = BigInt::from(1);
                    let mut key = vec![0u16; 2 * n];
                    for k in 0..n {
                        if j[k] > 0 {
                            f *= binomial(ka[n + k], j[k]) * falling(kb[k], j[k]);
                        }
                        key[k] = ka[k] + kb[k] - j[k];
                        key[n + k] = ka[n + k] + kb[n + k] - j[k];
                    }
                    out.accumulate(key, cab.mul(&C::from_rational(&Rational::from_integer(f))));
                    if !odometer(&mut j, &top) {
                        break;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ o − o ∘ self`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.compose(o)?.minus(&o.compose(self)?)
    }

    /// Rebuild every term as `u^α ∘ ∂^β` through `compose`; a stored operator is a fixed point.
    pub fn renormalized(&self) -> Self {
        let n = self.nvars();
        let zeros = vec![0u16; n];
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            let left = Self::monomial(self.dim, &k[..n], &zeros, c.clone());
            let right = Self::monomial(self.dim, &zeros, &k[n..], C::one());
            out = out
                .plus(&left.compose(&right).expect("same dim"))
                .expect("same dim");
        }
        out
    }

    /// Machine-readable dump: one entry per term with its multi-index and coefficient.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(a, b, c)| json!({ "coords": a, "derivs": b, "coeff": c.to_json() }))
            .collect();
        json!({ "dim": self.dim, "variables": phase_names(self.dim), "terms": terms })
    }
}

fn unit(n: usize, k: usize) -> Vec<u16> {
    let mut v = vec![0u16; n];
    v[k] = 1;
    v
}

/// Advance a mixed-radix counter bounded by `top` (inclusive); false once it wraps.
pub(crate) fn odometer(j: &mut [u16], top: &[u16]) -> bool {
    for k in (0..j.len()).rev() {
        if j[k] < top[k] {
            j[k] += 1;
            return true;
        }
        j[k] = 0;
    }
    false
}

fn fmt_factor(name: &str, e: u16, deriv: bool) -> String {
    match (deriv, e) {
        (false, 1) => name.to_string(),
        (false, _) => format!("{name}^{e}"),
        (true, 1) => format!("d/d{name}"),
        (true, _) => format!("d^{e}/d{name}^{e}"),
    }
}

/// Render `coeff · monomial` terms as `a + b - c`, given each term's factor strings.
pub(crate) fn fmt_terms<C: Scalar>(items: Vec<(Vec<String>, C)>) -> String {
    if items.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (idx, (factors, c)) in items.into_iter().enumerate() {
        let mut coeff = c.fmt_coeff();
        let negative = coeff.starts_with('-');
        if negative {
            coeff.remove(0);
        }
        if idx == 0 {
            if negative {
                s.push('-');
            }
        } else {
            s.push_str(if negative { " - " } else { " + " });
        }
        let body = factors.join(" ");
        if body.is_empty() {
            s.push_str(&coeff);
        } else if coeff == "1" {
            s.push_str(&body);
        } else {
            s.push_str(&coeff);
            s.push(' ');
            s.push_str(&body);
        }
    }
    s
}

impl<C: Scalar> fmt::Display for WeylOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nvars();
        let names = phase_names(self.dim);
        let mut keyed: Vec<(&Vec<u16>, &C)> = self.terms.iter().collect();
        // coordinates before derivatives, higher coordinate degree first
        keyed.sort_by(|(a, _), (b, _)| {
            let da: u16 = a[n..].iter().sum();
            let db: u16 = b[n..].iter().sum();
            let ca: u16 = a[..n].iter().sum();
            let cb: u16 = b[..n].iter().sum();
            da.cmp(&db).then(cb.cmp(&ca)).then(b.cmp(a))
        });
        let items = keyed
            .into_iter()
            .map(|(k, c)| {
                let mut fs: Vec<String> = (0..n)
                    .filter(|&i| k[i] > 0)
                    .map(|i| fmt_factor(&names[i], k[i], false))
                    .collect();
                fs.extend(
                    (0..n)
                        .filter(|&i| k[n + i] > 0)
                        .map(|i| fmt_factor(&names[i], k[n + i], true)),
                );
                (fs, c.clone())
            })
            .collect();
        write!(f, "{}", fmt_terms(items))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    type W = WeylOperator<ExactComplex>;

    fn half_i() -> ExactComplex {
        ExactComplex::i().mul(&ExactComplex::ratio(1, 2))
    }

    #[test]
    fn leibniz_swap() {
        let q = W::coord(1, 0);
        let dq = W::deriv(1, 0);
        let got = dq.compose(&q).unwrap();
        let want = W::monomial(1, &[1, 0], &[1, 0], ExactComplex::one())
            .plus(&W::identity(1))
            .unwrap();
        assert_eq!(got, want);
        assert_eq!(
            q.compose(&dq).unwrap(),
            W::monomial(1, &[1, 0], &[1, 0], ExactComplex::one())
        );
    }

    #[test]
    fn higher_order_reordering() {
        // ∂² ∘ q² = q²∂² + 4q∂ + 2
        let d2 = W::monomial(1, &[0, 0], &[2, 0], ExactComplex::one());
        let q2 = W::monomial(1, &[2, 0], &[0, 0], ExactComplex::one());
        let got = d2.compose(&q2).unwrap();
        assert_eq!(got.coefficient(&[2, 0], &[2, 0]), ExactComplex::one());
        assert_eq!(got.coefficient(&[1, 0], &[1, 0]), ExactComplex::from_int(4));
        assert_eq!(got.coefficient(&[0, 0], &[0, 0]), ExactComplex::from_int(2));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn bopp_pair_commutes_to_i_hbar() {
        let qh = W::coord(1, 0)
            .plus(&W::deriv(1, 1).scale(&half_i()))
            .unwrap();
        let ph = W::coord(1, 1)
            .minus(&W::deriv(1, 0).scale(&half_i()))
            .unwrap();
        assert_eq!(
            qh.commutator(&ph).unwrap(),
            W::constant(1, ExactComplex::i())
        );
        // multiplication operators commute
        assert!(W::coord(1, 0)
            .commutator(&W::coord(1, 1))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn pretty_printer() {
        let qh = W::coord(3, 0)
            .plus(&W::deriv(3, 3).scale(&half_i()))
            .unwrap();
        assert_eq!(qh.to_string(), "q1 + (i/2) d/dp1");
        let ph = W::coord(1, 1)
            .minus(&W::deriv(1, 0).scale(&half_i()))
            .unwrap();
        assert_eq!(ph.to_string(), "p - (i/2) d/dq");
        assert_eq!(W::zero(1).to_string(), "0");
        let sq = ph.compose(&ph).unwrap();
        assert_eq!(sq.to_string(), "p^2 - i p d/dq - 1/4 d^2/dq^2");
    }

    #[test]
    fn json_dump_lists_rational_parts() {
        let op = W::deriv(1, 1).scale(&half_i());
        let v = op.to_json();
        assert_eq!(v["terms"][0]["coeff"], json!(["0", "1", "1", "2"]));
        assert_eq!(v["terms"][0]["derivs"], json!([0, 1]));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = W::coord(1, 0).compose(&W::coord(2, 0)).unwrap_err();
        assert!(matches!(err, PsqmError::DimensionMismatch(_)));
    }

    #[test]
    fn constant_detection() {
        assert_eq!(W::zero(2).as_constant(), Some(ExactComplex::zero()));
        assert_eq!(W::identity(2).as_constant(), Some(ExactComplex::one()));
        assert_eq!(W::coord(2, 1).as_constant(), None);
    }
}
