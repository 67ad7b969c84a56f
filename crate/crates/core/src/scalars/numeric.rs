use std::sync::OnceLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::{json, Value};

use super::{Gen, Rat, SymScalar, DEFAULT_MAX_ZETA};
use crate::error::{Error, Result};

/// Arbitrary-precision complex scalar.
pub type BigC = Complex;

/// Working precision in decimal digits, fixed once per run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    pub digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { digits: 60 }
    }
}

impl Precision {
    pub fn new(digits: u32) -> Self {
        Precision { digits }
    }

    /// Binary precision with a 16-bit guard.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
    }

    /// 10^-digits, the nominal unit of agreement.
    pub fn epsilon(&self) -> Float {
        Float::with_val(self.bits(), 10).pow(-(self.digits as i32))
    }

    pub fn zero(&self) -> BigC {
        Complex::new(self.bits())
    }

    pub fn one(&self) -> BigC {
        Complex::with_val(self.bits(), 1)
    }

    pub fn real(&self, x: f64) -> BigC {
        Complex::with_val(self.bits(), x)
    }

    pub fn rat(&self, r: &Rat) -> BigC {
        Complex::with_val(self.bits(), r.inner())
    }

    pub fn complex_rat(&self, re: &Rat, im: &Rat) -> BigC {
        Complex::with_val(self.bits(), (re.inner(), im.inner()))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// 2πi at working precision.
    pub fn two_pi_i(&self) -> BigC {
        let tau = self.pi() * 2u32;
        Complex::with_val(self.bits(), (0, tau))
    }
}

/// Modulus of a complex value as a float at the value's precision.
pub fn cabs(c: &BigC) -> Float {
    Float::with_val(c.prec().0, c.abs_ref())
}

fn bernoulli_table() -> &'static [Rat] {
    static TABLE: OnceLock<Vec<Rat>> = OnceLock::new();
    TABLE.get_or_init(|| {
        const COUNT: usize = 400;
        let mut b = vec![Rat::one()];
        let mut row = vec![Rat::one(), Rat::one()];
        for n in 1..COUNT {
            // row becomes C(n+1, k)
            let mut next = vec![Rat::one(); n + 2];
            for k in 1..=n {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
            let mut acc = Rat::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += &(&row[k] * bk);
            }
            b.push(-(acc / Rat::from_int(n as i64 + 1)));
        }
        b
    })
}

/// Bernoulli number B_n with B_1 = -1/2.
pub fn bernoulli(n: usize) -> Rat {
    bernoulli_table()[n].clone()
}

fn euler_maclaurin_cutoff(prec: Precision) -> u32 {
    prec.digits + 10
}

/// ζ(k) by Euler–Maclaurin summation.
pub fn zeta_value(k: u32, prec: Precision) -> Result<BigC> {
    if k < 2 {
        return Err(Error::ZetaIndex(k));
    }
    Ok(Complex::with_val(prec.bits(), zeta_real(k, prec)))
}

fn zeta_real(k: u32, prec: Precision) -> Float {
    let bits = prec.bits();
    let n = euler_maclaurin_cutoff(prec);
    let s = k as i32;
    let mut sum = Float::new(bits);
    for m in 1..n {
        sum += Float::with_val(bits, m).pow(-s);
    }
    let nf = Float::with_val(bits, n);
    sum += Float::with_val(bits, (&nf).pow(1 - s)) / (s - 1);
    sum += Float::with_val(bits, (&nf).pow(-s)) / 2u32;
    let tol = Float::with_val(bits, 2).pow(-(bits as i32));
    // rising factorial s(s+1)...(s+2j-2) and N^{-s-2j+1}
    let mut rising = Float::with_val(bits, s);
    let mut npow = Float::with_val(bits, (&nf).pow(-s - 1));
    let mut fact = Float::with_val(bits, 2);
    let n2 = Float::with_val(bits, &nf * &nf);
    for j in 1..(bernoulli_table().len() / 2) {
        let b = bernoulli(2 * j).to_float(bits);
        let term = Float::with_val(bits, &b * &rising) * &npow / &fact;
        sum += &term;
        if term.abs() < tol {
            break;
        }
        rising *= (s + 2 * j as i32 - 1) as i64;
        rising *= (s + 2 * j as i32) as i64;
        npow /= &n2;
        fact *= ((2 * j + 1) * (2 * j + 2)) as u64;
    }
    sum
}

/// Euler–Mascheroni constant at the default cutoff.
pub fn euler_gamma(prec: Precision) -> BigC {
    euler_gamma_with_cutoff(prec, euler_maclaurin_cutoff(prec))
}

/// γ = H_{N-1} - ln N + 1/(2N) + Σ B_{2k}/(2k N^{2k}).
pub fn euler_gamma_with_cutoff(prec: Precision, n: u32) -> BigC {
    let bits = prec.bits();
    let mut sum = Float::new(bits);
    for m in 1..n {
        sum += Float::with_val(bits, 1) / m;
    }
    let nf = Float::with_val(bits, n);
    sum -= Float::with_val(bits, nf.ln_ref());
    sum += Float::with_val(bits, 1) / (2 * n);
    let tol = Float::with_val(bits, 2).pow(-(bits as i32));
    let n2 = Float::with_val(bits, &nf * &nf);
    let mut npow = Float::with_val(bits, &n2);
    for k in 1..(bernoulli_table().len() / 2) {
        let term = bernoulli(2 * k).to_float(bits) / (2 * k as u32) / &npow;
        sum += &term;
        if term.abs() < tol {
            break;
        }
        npow *= &n2;
    }
    Complex::with_val(bits, sum)
}

/// Precomputed transcendental values for one precision.
#[derive(Clone, Debug)]
pub struct Constants {
    pub precision: Precision,
    pi: Float,
    gamma: Float,
    zeta: Vec<Float>,
}

impl Constants {
    pub fn new(precision: Precision) -> Self {
        Constants::with_max_zeta(precision, DEFAULT_MAX_ZETA)
    }

    pub fn with_max_zeta(precision: Precision, max_zeta: u8) -> Self {
        let zeta = (2..=max_zeta as u32)
            .map(|k| zeta_real(k, precision))
            .collect();
        Constants {
            precision,
            pi: precision.pi(),
            gamma: euler_gamma(precision).real().clone(),
            zeta,
        }
    }

    pub fn max_zeta(&self) -> u8 {
        (self.zeta.len() + 1) as u8
    }

    fn gen_value(&self, g: Gen) -> Result<BigC> {
        let bits = self.precision.bits();
        Ok(match g {
            Gen::EulerGamma => Complex::with_val(bits, &self.gamma),
            Gen::Pi => Complex::with_val(bits, &self.pi),
            Gen::I => Complex::with_val(bits, (0, 1)),
            Gen::Zeta(k) => match self.zeta.get((k as usize).wrapping_sub(2)) {
                Some(v) => Complex::with_val(bits, v),
                None => return Err(Error::UnresolvedSymbol(g.name())),
            },
            Gen::Lambda => return Err(Error::UnresolvedSymbol(g.name())),
        })
    }

    pub fn eval(&self, s: &SymScalar) -> Result<BigC> {
        let mut acc = self.precision.zero();
        for (mono, c) in s.terms() {
            let mut t = self.precision.rat(c);
            for (g, e) in mono.iter() {
                let v = self.gen_value(g)?;
                t *= Complex::with_val(self.precision.bits(), (&v).pow(e));
            }
            acc += t;
        }
        Ok(acc)
    }
}

/// Evaluates a formal scalar at the given precision.
pub fn eval_sym(s: &SymScalar, prec: Precision) -> Result<BigC> {
    let max_zeta = s
        .generators()
        .iter()
        .filter_map(|g| match g {
            Gen::Zeta(k) => Some(*k),
            _ => None,
        })
        .max()
        .unwrap_or(1)
        .max(DEFAULT_MAX_ZETA);
    Constants::with_max_zeta(prec, max_zeta).eval(s)
}

/// {"re": "...", "im": "..."} with `digits` significant digits.
pub fn bigc_to_json(c: &BigC, digits: u32) -> Value {
    let d = Some(digits as usize);
    json!({
        "re": c.real().to_string_radix(10, d),
        "im": c.imag().to_string_radix(10, d),
    })
}

pub fn bigc_from_json(v: &Value, prec: Precision) -> Result<BigC> {
    let part = |key: &str| -> Result<Float> {
        let s = v
            .get(key)
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse(format!("missing `{key}` in complex value")))?;
        let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        Ok(Float::with_val(prec.bits(), parsed))
    };
    Ok(Complex::with_val(prec.bits(), (part("re")?, part("im")?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Monomial;
    use proptest::prelude::*;

    fn close(a: &BigC, b: &BigC, tol: &Float) -> bool {
        cabs(&Complex::with_val(a.prec().0, a - b)) < *tol
    }

    fn tol(prec: Precision, slack: i32) -> Float {
        Float::with_val(prec.bits(), 10).pow(-(prec.digits as i32 - slack))
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), Rat::new(-1, 2));
        assert_eq!(bernoulli(2), Rat::new(1, 6));
        assert_eq!(bernoulli(12), Rat::new(-691, 2730));
        assert_eq!(bernoulli(13), Rat::zero());
    }

    #[test]
    fn zeta_closed_forms() {
        let p = Precision::default();
        let pi = p.pi();
        let z2 = zeta_value(2, p).unwrap();
        let z4 = zeta_value(4, p).unwrap();
        let pi2 = Complex::with_val(p.bits(), Float::with_val(p.bits(), pi.square_ref()) / 6u32);
        let pi4 = Complex::with_val(p.bits(), Float::with_val(p.bits(), (&pi).pow(4u32)) / 90u32);
        assert!(close(&z2, &pi2, &tol(p, 2)));
        assert!(close(&z4, &pi4, &tol(p, 2)));
        assert_eq!(zeta_value(1, p).unwrap_err(), Error::ZetaIndex(1));
    }

    #[test]
    fn odd_zeta_against_mpfr() {
        let p = Precision::new(80);
        for k in [3u32, 5, 7, 11] {
            let ours = zeta_value(k, p).unwrap();
            let mpfr = Complex::with_val(p.bits(), Float::with_val(p.bits(), Float::zeta_u(k)));
            assert!(close(&ours, &mpfr, &tol(p, 2)), "zeta({k})");
        }
    }

    #[test]
    fn gamma_two_cutoffs_and_mpfr() {
        let p = Precision::default();
        let a = euler_gamma_with_cutoff(p, 70);
        let b = euler_gamma_with_cutoff(p, 151);
        assert!(close(&a, &b, &tol(p, 2)));
        let mpfr = Complex::with_val(p.bits(), Float::with_val(p.bits(), Constant::Euler));
        assert!(close(&a, &mpfr, &tol(p, 2)));
        let lo = euler_gamma(Precision::new(30));
        let hi = euler_gamma(Precision::new(60));
        assert!(close(&Complex::with_val(p.bits(), &lo), &hi, &tol(Precision::new(30), 1)));
    }

    #[test]
    fn eval_passthrough_and_lambda() {
        let p = Precision::default();
        let half = eval_sym(&SymScalar::constant(Rat::new(1, 2)), p).unwrap();
        assert_eq!(half, Complex::with_val(p.bits(), 0.5));
        let lam = SymScalar::gen(Gen::Lambda);
        assert!(matches!(eval_sym(&lam, p), Err(Error::UnresolvedSymbol(_))));
        let two_pi_i = eval_sym(&SymScalar::two_pi_i(), p).unwrap();
        assert!(close(&two_pi_i, &p.two_pi_i(), &tol(p, 2)));
    }

    #[test]
    fn json_roundtrip() {
        let p = Precision::default();
        let c = Complex::with_val(p.bits(), (Float::with_val(p.bits(), 1) / 3u32, -2.5));
        let v = bigc_to_json(&c, 60);
        let back = bigc_from_json(&v, p).unwrap();
        assert!(close(&c, &back, &tol(p, 3)));
        assert!(v["im"].as_str().unwrap().starts_with("-2.5000000"));
    }

    fn small_sym() -> impl Strategy<Value = SymScalar> {
        let g = prop_oneof![
            Just(Gen::EulerGamma),
            (2u8..5).prop_map(Gen::Zeta),
            Just(Gen::Pi),
            Just(Gen::I)
        ];
        prop::collection::vec((prop::collection::vec((g, 0u32..3), 0..3), -9i64..9, 1i64..5), 0..4)
            .prop_map(|ts| {
                SymScalar::from_terms(
                    ts.into_iter()
                        .map(|(m, a, b)| (Monomial::from_pairs(m), Rat::new(a, b))),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn eval_is_homomorphism(a in small_sym(), b in small_sym()) {
            let consts = Constants::new(Precision::default());
            let bits = consts.precision.bits();
            let ea = consts.eval(&a).unwrap();
            let eb = consts.eval(&b).unwrap();
            let prod = consts.eval(&(&a * &b)).unwrap();
            let direct = Complex::with_val(bits, &ea * &eb);
            let scale = Float::with_val(bits, cabs(&ea) * cabs(&eb)) + 1u32;
            let ulp = Float::with_val(bits, 2).pow(-(bits as i32) + 8);
            prop_assert!(cabs(&Complex::with_val(bits, &prod - &direct)) <= scale * ulp);
        }
    }
}
