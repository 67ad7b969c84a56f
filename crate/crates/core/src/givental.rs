//! The multi-valued Givental space, the grading operators and the map Ψ.

use std::collections::BTreeMap;
use std::sync::Arc;

use rug::{Complex, Float};
use serde_json::{json, Value};

use crate::charclass::RootBundle;
use crate::cohomology::{same_ring, CohClass, RingModel};
use crate::error::{Error, Result};
use crate::fm::KClass;
use crate::scalars::{cabs, BigC, Coeff, Constants, Rat, SymScalar};

/// deg₀: multiplies the real-degree-k part by k.
pub fn deg0<S: Coeff>(phi: &CohClass<S>) -> CohClass<S> {
    phi.weight_by_degree(|m| S::from_rat(Rat::from_int(2 * m as i64)))
}

/// μ: multiplies the real-degree-k part by k/2 − dim/2.
pub fn mu<S: Coeff>(phi: &CohClass<S>) -> CohClass<S> {
    let dim = phi.ring().dim() as i64;
    phi.weight_by_degree(|m| S::from_rat(Rat::new(2 * m as i64 - dim, 2)))
}

/// ρ: cup product with c₁ of the tangent bundle.
pub fn rho<S: Coeff>(phi: &CohClass<S>) -> Result<CohClass<S>> {
    let c1 = RootBundle::tangent(phi.ring())?.c1();
    c1.map_coeffs(|c| S::from_rat(c.clone())).checked_mul(phi)
}

/// Finitely supported map (z-exponent, log z-exponent) → class. The
/// z-exponent is stored doubled so that half-integers stay exact.
#[derive(Clone, Debug, PartialEq)]
pub struct GiventalElement {
    ring: Arc<RingModel>,
    terms: BTreeMap<(i64, u32), CohClass<SymScalar>>,
}

impl GiventalElement {
    pub fn zero(ring: &Arc<RingModel>) -> Self {
        GiventalElement {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The class placed at z^{twice_zpow/2} (log z)^{logpow}.
    pub fn monomial(class: CohClass<SymScalar>, twice_zpow: i64, logpow: u32) -> Self {
        let mut g = GiventalElement::zero(class.ring());
        g.push(twice_zpow, logpow, class);
        g
    }

    fn push(&mut self, twice_zpow: i64, logpow: u32, class: CohClass<SymScalar>) {
        if class.is_zero() {
            return;
        }
        let key = (twice_zpow, logpow);
        let merged = match self.terms.remove(&key) {
            Some(old) => &old + &class,
            None => class,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// ((2·z-exponent, log z-exponent), class) in ascending key order.
    pub fn terms(&self) -> impl Iterator<Item = (&(i64, u32), &CohClass<SymScalar>)> {
        self.terms.iter()
    }

    pub fn get(&self, twice_zpow: i64, logpow: u32) -> Option<&CohClass<SymScalar>> {
        self.terms.get(&(twice_zpow, logpow))
    }

    pub fn twice_zpows(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.terms.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    pub fn max_logpow(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn add(&self, other: &GiventalElement) -> Result<GiventalElement> {
        same_ring(&self.ring, &other.ring)?;
        let mut out = self.clone();
        for ((zp, lp), c) in &other.terms {
            out.push(*zp, *lp, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rat) -> GiventalElement {
        let mut out = GiventalElement::zero(&self.ring);
        for ((zp, lp), c) in &self.terms {
            out.push(*zp, *lp, c.scale(r));
        }
        out
    }

    /// z^{sign·ρ} = Σ_k (sign·log z)^k ρ^k / k!.
    pub fn z_rho(&self, sign: i64) -> Result<GiventalElement> {
        let mut out = GiventalElement::zero(&self.ring);
        for ((zp, lp), c) in &self.terms {
            let mut t = c.clone();
            for k in 0..=self.ring.dim() as u32 {
                if t.is_zero() {
                    break;
                }
                out.push(*zp, lp + k, t.clone());
                t = rho(&t)?.scale(&Rat::new(sign, k as i64 + 1));
            }
        }
        Ok(out)
    }

    /// z^{−μ}: the degree-m part gains z^{dim/2 − m}.
    pub fn z_minus_mu(&self) -> GiventalElement {
        let dim = self.ring.dim() as i64;
        let mut out = GiventalElement::zero(&self.ring);
        for ((zp, lp), c) in &self.terms {
            for m in c.degrees() {
                out.push(zp + dim - 2 * m as i64, *lp, c.homogeneous_part(m));
            }
        }
        out
    }

    /// [{"zpow": "p/2", "logpow": k, "class": ...}]
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|((zp, lp), c)| {
                    json!({"zpow": Rat::new(*zp, 2).to_pq_string(), "logpow": lp, "class": c.to_json()})
                })
                .collect(),
        )
    }
}

/// Ψ(E) = z^{−μ} z^{ρ} (Γ ∪ (2πi)^{deg₀/2} ch E).
pub fn psi(e: &KClass) -> Result<GiventalElement> {
    psi_of_ch(&e.ch())
}

pub fn psi_of_ch(ch: &CohClass<Rat>) -> Result<GiventalElement> {
    let gamma = RootBundle::tangent(ch.ring())?.gamma_class();
    psi_with_gamma(ch, &gamma)
}

/// Ψ with a precomputed Gamma class of the ring.
pub fn psi_with_gamma(ch: &CohClass<Rat>, gamma: &CohClass<SymScalar>) -> Result<GiventalElement> {
    let two_pi_i = SymScalar::two_pi_i();
    let twisted = ch.to_sym().weight_by_degree(|m| two_pi_i.pow(m as u32));
    let v = gamma.checked_mul(&twisted)?;
    Ok(GiventalElement::monomial(v, 0, 0).z_rho(1)?.z_minus_mu())
}

/// Evaluates at z = z0 on the branch log z = log_z0, returning the
/// coefficient vector in the monomial basis.
pub fn eval_givental(g: &GiventalElement, z0: &BigC, log_z0: &BigC, consts: &Constants) -> Result<Vec<BigC>> {
    let prec = consts.precision;
    let bits = prec.bits();
    if z0.is_zero() {
        return Err(Error::Branch("z0 = 0".into()));
    }
    let back = Complex::with_val(bits, log_z0.exp_ref());
    let miss = cabs(&Complex::with_val(bits, &back - z0));
    let tol = Float::with_val(bits, 10).pow_i32(-(prec.digits as i32 - 10)) * (cabs(z0) + 1u32);
    if miss > tol {
        return Err(Error::Branch(miss.to_string_radix(10, Some(6))));
    }
    let mut out = vec![prec.zero(); g.ring.rank()];
    for ((zp, lp), c) in &g.terms {
        let w = Complex::with_val(bits, log_z0 * Rat::new(*zp, 2).to_float(bits));
        let mut factor = Complex::with_val(bits, w.exp_ref());
        for _ in 0..*lp {
            factor *= log_z0;
        }
        for (i, s) in c.coeffs().iter().enumerate() {
            if !s.is_zero() {
                out[i] += Complex::with_val(bits, consts.eval(s)? * &factor);
            }
        }
    }
    Ok(out)
}

trait PowI32 {
    fn pow_i32(self, e: i32) -> Float;
}

impl PowI32 for Float {
    fn pow_i32(self, e: i32) -> Float {
        use rug::ops::Pow;
        self.pow(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::scalars::Precision;

    fn h(ring: &Arc<RingModel>) -> CohClass<Rat> {
        CohClass::generator(ring, "h").unwrap()
    }

    #[test]
    fn grading_operators() {
        let p2 = RingModel::proj(2);
        assert_eq!(deg0(&h(&p2)), h(&p2).scale(&Rat::from_int(2)));
        let lp = RingModel::local_p(1);
        let one = CohClass::<Rat>::one(&lp);
        assert_eq!(mu(&one), one.scale(&Rat::new(-3, 2)));
        let xi = CohClass::<Rat>::generator(&lp, "ξ").unwrap();
        assert_eq!(rho(&one).unwrap(), xi.scale(&Rat::from_int(3)));
    }

    #[test]
    fn psi_of_structure_sheaf_on_p1() {
        let p1 = RingModel::proj(1);
        let o = KClass::line_bundle(&p1, 0, 0).unwrap();
        let g = psi(&o).unwrap();
        let one = CohClass::<Rat>::one(&p1).to_sym();
        let hs = h(&p1).to_sym();
        let mut expect = GiventalElement::monomial(one, 1, 0);
        expect = expect
            .add(&GiventalElement::monomial(hs.scale(&Rat::from_int(2)), -1, 1))
            .unwrap();
        expect = expect
            .add(&GiventalElement::monomial(
                hs.scale_by(&SymScalar::euler_gamma().scale(&Rat::from_int(-2))),
                -1,
                0,
            ))
            .unwrap();
        assert_eq!(g, expect);
        assert_eq!(psi(&o.add(&o).unwrap()).unwrap(), g.scale(&Rat::from_int(2)));
    }

    #[test]
    fn rho_series_inverts() {
        let lp = RingModel::local_p(2);
        let e = KClass::line_bundle(&lp, 1, 2).unwrap();
        let g = GiventalElement::monomial(e.ch().to_sym(), 0, 0);
        assert_eq!(g.z_rho(1).unwrap().z_rho(-1).unwrap(), g);
    }

    #[test]
    fn psi_structure_on_local_models() {
        for r in 1..=2 {
            let lp = RingModel::local_p(r);
            let dim = lp.dim() as i64;
            for e in KClass::basis(&lp) {
                let g = psi(&e).unwrap();
                let allowed: Vec<i64> = (0..=dim).map(|k| dim - 2 * k).collect();
                assert!(g.twice_zpows().iter().all(|zp| allowed.contains(zp)));
                assert!(g.max_logpow() as i64 <= dim);
            }
            let o = psi(&KClass::line_bundle(&lp, 0, 0).unwrap()).unwrap();
            assert_eq!(o.get(dim, 0).unwrap().constant_term(), SymScalar::one());
        }
    }

    #[test]
    fn evaluation() {
        let prec = Precision::default();
        let consts = Constants::new(prec);
        let p1 = RingModel::proj(1);
        let g = psi(&KClass::line_bundle(&p1, 0, 0).unwrap()).unwrap();
        let v = eval_givental(&g, &prec.one(), &prec.zero(), &consts).unwrap();
        assert_eq!(v[0], prec.one());
        let gamma = consts.eval(&SymScalar::euler_gamma()).unwrap();
        assert_eq!(v[1], Complex::with_val(prec.bits(), &gamma * -2));

        let z1 = GiventalElement::monomial(CohClass::one(&p1), 2, 0);
        let two = prec.real(2.0);
        let log2 = Complex::with_val(prec.bits(), two.ln_ref());
        let v = eval_givental(&z1, &two, &log2, &consts).unwrap();
        assert!(cabs(&Complex::with_val(prec.bits(), &v[0] - &two)) < 1e-55);

        let shifted = eval_givental(&g, &prec.one(), &prec.two_pi_i(), &consts).unwrap();
        // z^{±1/2} flips sign on the next sheet; the log term gains 2·2πi.
        let base = v_at_zero(&g, &consts);
        let sum = Complex::with_val(prec.bits(), &shifted[0] + &base[0]);
        assert!(cabs(&sum) < 1e-50);
        let diff = Complex::with_val(prec.bits(), &shifted[1] + &base[1]);
        let expect = Complex::with_val(prec.bits(), prec.two_pi_i() * -2);
        assert!(cabs(&Complex::with_val(prec.bits(), &diff - &expect)) < 1e-50);

        assert!(matches!(
            eval_givental(&g, &two, &prec.zero(), &consts),
            Err(Error::Branch(_))
        ));
    }

    fn v_at_zero(g: &GiventalElement, consts: &Constants) -> Vec<BigC> {
        let p = consts.precision;
        eval_givental(g, &p.one(), &p.zero(), consts).unwrap()
    }

    #[test]
    fn psi_is_injective_on_basis() {
        let prec = Precision::default();
        let consts = Constants::new(prec);
        for r in 1..=2 {
            let lp = RingModel::local_p(r);
            let z = prec.real(1.3);
            let logz = Complex::with_val(prec.bits(), z.ln_ref());
            let cols: Vec<Vec<BigC>> = KClass::basis(&lp)
                .iter()
                .map(|e| eval_givental(&psi(e).unwrap(), &z, &logz, &consts).unwrap())
                .collect();
            let det = CMatrix::from_columns(&cols, prec).det();
            assert!(cabs(&det) > 1e-20);
        }
    }
}
