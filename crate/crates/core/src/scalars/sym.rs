use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;
use crate::error::Error;

/// Largest zeta index accepted by default.
pub const DEFAULT_MAX_ZETA: u8 = 12;

/// Formal generators: Euler–Mascheroni γ, ζ(k), π, the imaginary unit and a
/// reserved regularization symbol λ that must never reach evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    EulerGamma,
    Zeta(u8),
    Pi,
    I,
    Lambda,
}

impl Gen {
    pub fn name(&self) -> String {
        match self {
            Gen::EulerGamma => "γ".to_string(),
            Gen::Zeta(k) => format!("ζ{k}"),
            Gen::Pi => "π".to_string(),
            Gen::I => "i".to_string(),
            Gen::Lambda => "λ".to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "γ" => Ok(Gen::EulerGamma),
            "π" => Ok(Gen::Pi),
            "i" => Ok(Gen::I),
            "λ" => Ok(Gen::Lambda),
            _ => s
                .strip_prefix('ζ')
                .and_then(|k| k.parse::<u8>().ok())
                .filter(|k| *k >= 2)
                .map(Gen::Zeta)
                .ok_or_else(|| Error::UnresolvedSymbol(s.to_string())),
        }
    }
}

/// Product of generator powers; zero exponents are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Gen, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn gen(g: Gen) -> Self {
        Monomial::from_pairs([(g, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Gen, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (g, e) in pairs {
            if e > 0 {
                *m.entry(g).or_insert(0) += e;
            }
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, g: Gen) -> u32 {
        self.0.get(&g).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Gen, u32)> + '_ {
        self.0.iter().map(|(g, e)| (*g, *e))
    }

    fn product(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (g, e) in &other.0 {
            *m.entry(*g).or_insert(0) += e;
        }
        Monomial(m)
    }
}

/// Polynomial in the formal generators with rational coefficients, kept in
/// normal form: i appears to power at most one and no coefficient is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SymScalar {
    terms: BTreeMap<Monomial, Rat>,
}

impl SymScalar {
    pub fn zero() -> Self {
        SymScalar::default()
    }

    pub fn one() -> Self {
        SymScalar::constant(Rat::one())
    }

    pub fn constant(r: Rat) -> Self {
        SymScalar::from_terms([(Monomial::one(), r)])
    }

    pub fn gen(g: Gen) -> Self {
        SymScalar::from_terms([(Monomial::gen(g), Rat::one())])
    }

    pub fn euler_gamma() -> Self {
        SymScalar::gen(Gen::EulerGamma)
    }

    pub fn zeta(k: u8) -> Self {
        assert!(k >= 2, "zeta index must be >= 2");
        SymScalar::gen(Gen::Zeta(k))
    }

    pub fn pi() -> Self {
        SymScalar::gen(Gen::Pi)
    }

    pub fn i() -> Self {
        SymScalar::gen(Gen::I)
    }

    /// 2πi as a formal scalar.
    pub fn two_pi_i() -> Self {
        SymScalar::from_terms([(
            Monomial::from_pairs([(Gen::Pi, 1), (Gen::I, 1)]),
            Rat::from_int(2),
        )])
    }

    /// Builds a scalar from arbitrary (possibly non-normal) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut out = BTreeMap::new();
        for (mono, c) in terms {
            let (mono, sign) = reduce_i(mono);
            let c = if sign { -c } else { c };
            let slot = out.entry(mono).or_insert_with(Rat::zero);
            *slot += &c;
        }
        out.retain(|_, c: &mut Rat| !c.is_zero());
        SymScalar { terms: out }
    }

    /// Re-applies the normal form. Scalars built through the public API are
    /// already normal, so this is the identity on them.
    pub fn normalize(&self) -> Self {
        SymScalar::from_terms(self.terms.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value if no generator occurs.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rat {
        self.terms.get(mono).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn generators(&self) -> Vec<Gen> {
        let mut gens: Vec<Gen> = self
            .terms
            .keys()
            .flat_map(|m| m.0.keys().copied())
            .collect();
        gens.sort();
        gens.dedup();
        gens
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return SymScalar::zero();
        }
        SymScalar {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * r))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = SymScalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

/// i² = −1: returns the monomial with i-exponent reduced mod 2 and whether
/// the coefficient flips sign.
fn reduce_i(mut mono: Monomial) -> (Monomial, bool) {
    let e = mono.exponent(Gen::I);
    if e < 2 {
        mono.0.retain(|_, e| *e > 0);
        return (mono, false);
    }
    let sign = (e / 2) % 2 == 1;
    if e % 2 == 0 {
        mono.0.remove(&Gen::I);
    } else {
        mono.0.insert(Gen::I, 1);
    }
    mono.0.retain(|_, e| *e > 0);
    (mono, sign)
}

impl Add<&SymScalar> for &SymScalar {
    type Output = SymScalar;
    fn add(self, rhs: &SymScalar) -> SymScalar {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let slot = terms.entry(m.clone()).or_insert_with(Rat::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        SymScalar { terms }
    }
}

impl Sub<&SymScalar> for &SymScalar {
    type Output = SymScalar;
    fn sub(self, rhs: &SymScalar) -> SymScalar {
        self + &(-rhs)
    }
}

impl Mul<&SymScalar> for &SymScalar {
    type Output = SymScalar;
    fn mul(self, rhs: &SymScalar) -> SymScalar {
        SymScalar::from_terms(self.terms.iter().flat_map(|(m1, c1)| {
            rhs.terms
                .iter()
                .map(move |(m2, c2)| (m1.product(m2), c1 * c2))
        }))
    }
}

impl Neg for &SymScalar {
    type Output = SymScalar;
    fn neg(self) -> SymScalar {
        SymScalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for SymScalar {
    type Output = SymScalar;
    fn add(self, rhs: SymScalar) -> SymScalar {
        &self + &rhs
    }
}

impl Sub for SymScalar {
    type Output = SymScalar;
    fn sub(self, rhs: SymScalar) -> SymScalar {
        &self - &rhs
    }
}

impl Mul for SymScalar {
    type Output = SymScalar;
    fn mul(self, rhs: SymScalar) -> SymScalar {
        &self * &rhs
    }
}

impl Neg for SymScalar {
    type Output = SymScalar;
    fn neg(self) -> SymScalar {
        -&self
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, e)| {
                if *e == 1 {
                    g.name()
                } else {
                    format!("{}^{}", g.name(), e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl fmt::Display for SymScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = *c < Rat::zero();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == Rat::one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}·{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    mono: BTreeMap<String, u32>,
    coeff: Rat,
}

impl Serialize for SymScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(m, c)| TermRepr {
                mono: m.iter().map(|(g, e)| (g.name(), e)).collect(),
                coeff: c.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let mut pairs = Vec::new();
            for (name, e) in t.mono {
                pairs.push((Gen::parse(&name).map_err(serde::de::Error::custom)?, e));
            }
            out.push((Monomial::from_pairs(pairs), t.coeff));
        }
        Ok(SymScalar::from_terms(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gen_strategy() -> impl Strategy<Value = Gen> {
        prop_oneof![
            Just(Gen::EulerGamma),
            (2u8..6).prop_map(Gen::Zeta),
            Just(Gen::Pi),
            Just(Gen::I),
        ]
    }

    fn sym_strategy() -> impl Strategy<Value = SymScalar> {
        prop::collection::vec(
            (
                prop::collection::vec((gen_strategy(), 0u32..4), 0..3),
                -6i64..6,
                1i64..4,
            ),
            0..4,
        )
        .prop_map(|terms| {
            SymScalar::from_terms(
                terms
                    .into_iter()
                    .map(|(m, p, q)| (Monomial::from_pairs(m), Rat::new(p, q))),
            )
        })
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = SymScalar::i();
        assert_eq!(&i * &i, SymScalar::constant(Rat::from_int(-1)));
        assert_eq!(i.pow(4), SymScalar::one());
        assert_eq!(i.pow(3), -&i);
    }

    #[test]
    fn display_is_readable() {
        let g = SymScalar::euler_gamma();
        let s = &g.pow(2).scale(&Rat::new(9, 2)) + &SymScalar::zeta(2).scale(&Rat::new(3, 2));
        assert_eq!(s.to_string(), "9/2·γ^2 + 3/2·ζ2");
        assert_eq!(SymScalar::zero().to_string(), "0");
    }

    #[test]
    fn json_shape() {
        let s = &SymScalar::two_pi_i() + &SymScalar::constant(Rat::new(1, 3));
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(
            js,
            r#"[{"mono":{},"coeff":"1/3"},{"mono":{"i":1,"π":1},"coeff":"2/1"}]"#
        );
        let back: SymScalar = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #[test]
        fn ring_axioms(a in sym_strategy(), b in sym_strategy(), c in sym_strategy()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
        }

        #[test]
        fn normalize_idempotent(raw in prop::collection::vec(
            (prop::collection::vec((gen_strategy(), 0u32..7), 0..3), -5i64..5), 0..5)) {
            let x = SymScalar::from_terms(raw.into_iter().map(|(m, c)| (Monomial::from_pairs(m), Rat::from_int(c))));
            prop_assert_eq!(x.normalize(), x.clone());
            prop_assert_eq!(x.normalize().normalize(), x.normalize());
            prop_assert!(x.terms().all(|(m, _)| m.exponent(Gen::I) <= 1));
        }
    }
}
