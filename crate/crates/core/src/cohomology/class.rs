use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use super::ring::RingModel;
use crate::error::{Error, Result};
use crate::scalars::{Coeff, Rat, SymScalar};

/// A cohomology class: coefficients over the basis of its ring.
#[derive(Clone, Debug)]
pub struct CohClass<S> {
    ring: Arc<RingModel>,
    coeffs: Vec<S>,
}

impl<S: PartialEq> PartialEq for CohClass<S> {
    fn eq(&self, other: &Self) -> bool {
        self.ring.name() == other.ring.name() && self.coeffs == other.coeffs
    }
}

pub fn same_ring(a: &RingModel, b: &RingModel) -> Result<()> {
    if std::ptr::eq(a, b) || a.name() == b.name() {
        Ok(())
    } else {
        Err(Error::RingMismatch {
            left: a.name().to_string(),
            right: b.name().to_string(),
        })
    }
}

impl<S: Coeff> CohClass<S> {
    pub fn zero(ring: &Arc<RingModel>) -> Self {
        CohClass {
            ring: ring.clone(),
            coeffs: vec![S::zero(); ring.rank()],
        }
    }

    pub fn one(ring: &Arc<RingModel>) -> Self {
        CohClass::basis_element(ring, 0)
    }

    pub fn basis_element(ring: &Arc<RingModel>, i: usize) -> Self {
        let mut c = CohClass::zero(ring);
        c.coeffs[i] = S::one();
        c
    }

    /// Reduced normal form of the monomial with exponent vector `e`.
    pub fn monomial(ring: &Arc<RingModel>, e: &[u32]) -> Self {
        let mut c = CohClass::zero(ring);
        for (i, v) in ring.reduce_monomial(e) {
            c.coeffs[i] = S::from_rat(v);
        }
        c
    }

    pub fn generator(ring: &Arc<RingModel>, name: &str) -> Result<Self> {
        let g = ring.generator_index(name)?;
        let mut e = vec![0; ring.generators().len()];
        e[g] = 1;
        Ok(CohClass::monomial(ring, &e))
    }

    pub fn from_coeffs(ring: &Arc<RingModel>, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), ring.rank(), "coefficient vector length");
        CohClass {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn coeff(&self, e: &[u32]) -> S {
        self.ring
            .basis_index(e)
            .map_or_else(S::zero, |i| self.coeffs[i].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }

    pub fn map_coeffs<T: Coeff>(&self, f: impl Fn(&S) -> T) -> CohClass<T> {
        CohClass {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        same_ring(&self.ring, &other.ring)?;
        Ok(CohClass {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.plus(b)).collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        same_ring(&self.ring, &other.ring)?;
        let mut out = vec![S::zero(); self.coeffs.len()];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let ab = ca.times(cb);
                for (i, c) in self.ring.product_of_basis(a, b) {
                    out[*i] = out[*i].plus(&ab.scaled(c));
                }
            }
        }
        Ok(CohClass {
            ring: self.ring.clone(),
            coeffs: out,
        })
    }

    pub fn scale(&self, r: &Rat) -> Self {
        self.map_coeffs(|c| c.scaled(r))
    }

    pub fn scale_by(&self, s: &S) -> Self {
        self.map_coeffs(|c| c.times(s))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = CohClass::one(&self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// ∫ against the integration vector.
    pub fn integrate(&self) -> S {
        let mut s = S::zero();
        for (c, w) in self.coeffs.iter().zip(self.ring.integration()) {
            if !w.is_zero() {
                s = s.plus(&c.scaled(w));
            }
        }
        s
    }

    /// Complex degrees with a nonzero component, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.coeffs.len())
            .filter(|&i| !self.coeffs[i].is_zero())
            .map(|i| self.ring.degree(i))
            .collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn homogeneous_part(&self, deg: usize) -> Self {
        let mut c = self.clone();
        for (i, x) in c.coeffs.iter_mut().enumerate() {
            if self.ring.degree(i) != deg {
                *x = S::zero();
            }
        }
        c
    }

    pub fn constant_term(&self) -> S {
        self.coeffs[0].clone()
    }

    /// Applies a componentwise rational weight depending on degree.
    pub fn weight_by_degree(&self, f: impl Fn(usize) -> S) -> Self {
        CohClass {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.times(&f(self.ring.degree(i))))
                .collect(),
        }
    }

    /// Σ_k c_k x^k with the sum cut at the ring dimension; x must be nilpotent.
    pub fn power_series(&self, coeffs: &[S]) -> Self {
        let mut out = CohClass::zero(&self.ring);
        let mut p = CohClass::one(&self.ring);
        for (k, c) in coeffs.iter().enumerate().take(self.ring.dim() + 1) {
            if k > 0 {
                p = &p * self;
            }
            out = &out + &p.scale_by(c);
        }
        out
    }

    /// exp(x) for x without constant term.
    pub fn exp(&self) -> Self {
        assert!(self.constant_term().is_zero(), "exp needs a nilpotent class");
        let coeffs: Vec<S> = (0..=self.ring.dim())
            .map(|k| S::from_rat(Rat::factorial(k as u32).recip()))
            .collect();
        self.power_series(&coeffs)
    }

    /// Multiplicative inverse of a class with invertible rational constant
    /// term c: (c + n)^{-1} = Σ (−n)^k / c^{k+1}.
    pub fn inverse_with(&self, c0_inv: &S) -> Self {
        let n = &self.clone() - &CohClass::one(&self.ring).scale_by(&self.constant_term());
        let step = n.scale_by(c0_inv).scale(&Rat::from_int(-1));
        let ones: Vec<S> = vec![S::one(); self.ring.dim() + 1];
        step.power_series(&ones).scale_by(c0_inv)
    }
}

impl CohClass<Rat> {
    pub fn to_sym(&self) -> CohClass<SymScalar> {
        self.map_coeffs(|c| SymScalar::constant(c.clone()))
    }

    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::Singular("class with zero constant term".into()));
        }
        Ok(self.inverse_with(&c.recip()))
    }
}

impl<S: Coeff + Serialize> CohClass<S> {
    /// {"ring": ..., "terms": [{"mono": [...], "coeff": ...}]}
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| json!({"mono": self.ring.basis()[i], "coeff": c}))
            .collect();
        json!({"ring": self.ring.name(), "terms": terms})
    }
}

impl<S: Coeff + std::fmt::Display> std::fmt::Display for CohClass<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})·{}", self.ring.monomial_name(&self.ring.basis()[i])))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<S: Coeff> Add for &CohClass<S> {
    type Output = CohClass<S>;
    fn add(self, rhs: &CohClass<S>) -> CohClass<S> {
        self.checked_add(rhs).expect("ring mismatch in add")
    }
}

impl<S: Coeff> Sub for &CohClass<S> {
    type Output = CohClass<S>;
    fn sub(self, rhs: &CohClass<S>) -> CohClass<S> {
        self + &(-rhs)
    }
}

impl<S: Coeff> Neg for &CohClass<S> {
    type Output = CohClass<S>;
    fn neg(self) -> CohClass<S> {
        self.map_coeffs(Coeff::negated)
    }
}

impl<S: Coeff> Mul for &CohClass<S> {
    type Output = CohClass<S>;
    fn mul(self, rhs: &CohClass<S>) -> CohClass<S> {
        self.checked_mul(rhs).expect("ring mismatch in mul")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gen(ring: &Arc<RingModel>, name: &str) -> CohClass<Rat> {
        CohClass::generator(ring, name).unwrap()
    }

    #[test]
    fn local_p1_products() {
        let p = RingModel::local_p(1);
        let x = gen(&p, "ξ");
        let h = gen(&p, "h");
        let x2 = &x * &x;
        assert_eq!(&x * &x2, (&h * &x2).scale(&Rat::from_int(2)));
        assert_eq!(&CohClass::one(&p) * &x2, x2);
        assert_eq!((&h * &x2).integrate(), Rat::one());
        assert_eq!(x.pow(3).integrate(), Rat::from_int(2));
    }

    #[test]
    fn blowup_relation() {
        let w = RingModel::blowup_w(1);
        let z = gen(&w, "ζ");
        let s = &gen(&w, "h₁") + &gen(&w, "h₂");
        assert_eq!(&z * &z, &s * &z);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a: CohClass<Rat> = CohClass::one(&RingModel::proj(1));
        let b: CohClass<Rat> = CohClass::one(&RingModel::proj(2));
        assert!(matches!(a.checked_mul(&b), Err(Error::RingMismatch { .. })));
    }

    #[test]
    fn degrees_of_inhomogeneous_class() {
        let p = RingModel::local_p(1);
        let c = &CohClass::one(&p) + &gen(&p, "ξ").pow(2);
        assert_eq!(c.degrees(), vec![0, 2]);
        assert!(CohClass::<Rat>::zero(&p).degrees().is_empty());
    }

    #[test]
    fn exp_and_inverse() {
        let p = RingModel::local_p(2);
        let x = &gen(&p, "ξ") + &gen(&p, "h").scale(&Rat::from_int(3));
        let e = x.exp();
        assert_eq!(&e * &(-&x).exp(), CohClass::one(&p));
        let inv = e.inverse().unwrap();
        assert_eq!(&inv * &e, CohClass::one(&p));
    }

    #[test]
    fn json_shape() {
        let p = RingModel::proj(1);
        let c = &CohClass::one(&p) + &gen(&p, "h").scale(&Rat::new(1, 2));
        assert_eq!(
            c.to_json().to_string(),
            r#"{"ring":"Proj(1)","terms":[{"coeff":"1/1","mono":[0]},{"coeff":"1/2","mono":[1]}]}"#
        );
    }

    fn class_strategy(ring: Arc<RingModel>) -> impl Strategy<Value = CohClass<Rat>> {
        let n = ring.rank();
        prop::collection::vec(-4i64..5, n)
            .prop_map(move |v| CohClass::from_coeffs(&ring, v.into_iter().map(Rat::from_int).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn ring_axioms_local_p2(
            a in class_strategy(RingModel::local_p(2)),
            b in class_strategy(RingModel::local_p(2)),
            c in class_strategy(RingModel::local_p(2)),
        ) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn integration_only_sees_top_degree(a in class_strategy(RingModel::blowup_w(1))) {
            let top = a.homogeneous_part(3);
            prop_assert_eq!(a.integrate(), top.integrate());
        }
    }
}
