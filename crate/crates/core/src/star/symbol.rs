use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::scalar::{ExactComplex, Scalar};
use crate::weyl::{fmt_terms, phase_names};

/// A commutative polynomial in the `2d` phase variables (`q₁..q_d, p₁..p_d`).
///
/// Arithmetic between symbols of different dimension is a logic error and panics.
#[derive(Clone, PartialEq)]
pub struct PolynomialSymbol<C: Scalar = ExactComplex> {
    dim: usize,
    terms: BTreeMap<Vec<u16>, C>,
}

impl<C: Scalar> fmt::Debug for PolynomialSymbol<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolynomialSymbol(d={}, {})", self.dim, self)
    }
}

impl<C: Scalar> PolynomialSymbol<C> {
    pub fn zero(dim: usize) -> Self {
        PolynomialSymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        let mut s = Self::zero(dim);
        s.accumulate(vec![0; 2 * dim], c);
        s
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C::one())
    }

    /// The phase variable `u_k`.
    pub fn var(dim: usize, k: usize) -> Self {
        let mut e = vec![0u16; 2 * dim];
        e[k] = 1;
        Self::monomial(dim, e, C::one())
    }

    pub fn monomial(dim: usize, exps: Vec<u16>, c: C) -> Self {
        assert_eq!(exps.len(), 2 * dim);
        let mut s = Self::zero(dim);
        s.accumulate(exps, c);
        s
    }

    /// `Σ_k c_k u_k`.
    pub fn linear(dim: usize, coeffs: &[C]) -> Self {
        assert_eq!(coeffs.len(), 2 * dim);
        let mut s = Self::zero(dim);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0u16; 2 * dim];
            e[k] = 1;
            s.accumulate(e, c.clone());
        }
        s
    }

    /// `Σ_k u_k²`.
    pub fn radius_squared(dim: usize) -> Self {
        let mut s = Self::zero(dim);
        for k in 0..2 * dim {
            let mut e = vec![0u16; 2 * dim];
            e[k] = 2;
            s.accumulate(e, C::one());
        }
        s
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &C)> {
        self.terms.iter().map(|(k, c)| (k.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u16]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|k| k.iter().map(|&e| e as usize).sum())
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

    fn same_dim(&self, o: &Self) {
        assert_eq!(self.dim, o.dim, "symbols of different dimension");
    }

    pub fn plus(&self, o: &Self) -> Self {
        self.same_dim(o);
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.accumulate(k.clone(), c.clone());
        }
        out
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scale(&C::one().neg()))
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), c.mul(s));
        }
        out
    }

    /// Pointwise product.
    pub fn times(&self, o: &Self) -> Self {
        self.same_dim(o);
        let mut out = Self::zero(self.dim);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let key = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.accumulate(key, ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.dim), |acc, _| acc.times(self))
    }

    /// Multiply by the monomial `u^α` with coefficient `c`.
    pub fn times_monomial(&self, alpha: &[u16], c: &C) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, v) in &self.terms {
            let key = k.iter().zip(alpha).map(|(a, b)| a + b).collect();
            out.accumulate(key, v.mul(c));
        }
        out
    }

    /// `∂/∂u_k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (key, c) in &self.terms {
            if key[k] > 0 {
                let mut e = key.clone();
                e[k] -= 1;
                out.accumulate(e, c.mul(&C::from_int(key[k] as i64)));
            }
        }
        out
    }

    /// Mixed partial `∂^β`.
    pub fn partial(&self, beta: &[u16]) -> Self {
        let mut out = self.clone();
        for (k, &b) in beta.iter().enumerate() {
            for _ in 0..b {
                out = out.derivative(k);
                if out.is_zero() {
                    return out;
                }
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> PolynomialSymbol<D> {
        let mut out = PolynomialSymbol::zero(self.dim);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), f(c));
        }
        out
    }

    pub fn to_complex64(&self) -> PolynomialSymbol<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// True if every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.conj() == *c)
    }

    /// Floating-point evaluation at a phase point.
    pub fn eval(&self, u: &[f64]) -> Complex64 {
        assert_eq!(u.len(), self.nvars());
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let mut m = 1.0;
            for (x, &e) in u.iter().zip(k) {
                m *= x.powi(e as i32);
            }
            acc += c.to_c64() * m;
        }
        acc
    }

    /// Euclidean norm of the coefficient vector, in floating point.
    pub fn coeff_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(k, c)| json!({ "exps": k, "coeff": c.to_json() }))
            .collect();
        json!({ "dim": self.dim, "variables": phase_names(self.dim), "terms": terms })
    }
}

impl<C: Scalar> fmt::Display for PolynomialSymbol<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = phase_names(self.dim);
        let mut keyed: Vec<(&Vec<u16>, &C)> = self.terms.iter().collect();
        keyed.sort_by(|(a, _), (b, _)| {
            let da: u16 = a.iter().sum();
            let db: u16 = b.iter().sum();
            db.cmp(&da).then(b.cmp(a))
        });
        let items = keyed
            .into_iter()
            .map(|(k, c)| {
                let fs = k
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            names[i].clone()
                        } else {
                            format!("{}^{e}", names[i])
                        }
                    })
                    .collect();
                (fs, c.clone())
            })
            .collect();
        write!(f, "{}", fmt_terms(items))
    }
}
