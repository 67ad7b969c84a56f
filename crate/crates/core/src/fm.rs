//! Line-bundle K-lattice, Euler pairing, and the Fourier–Mukai transform
//! through the common blowup, realized on Chern characters by GRR.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::charclass::RootBundle;
use crate::cohomology::{same_ring, CohClass, RingKind, RingMap, RingModel};
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::scalars::Rat;

/// Σ mult·[𝒪(aH + bΞ)], with H and Ξ the divisors of the first and second
/// generator (Ξ absent on projective spaces).
#[derive(Clone, Debug, PartialEq)]
pub struct KClass {
    ring: Arc<RingModel>,
    terms: BTreeMap<(i64, i64), i64>,
}

impl KClass {
    pub fn zero(ring: &Arc<RingModel>) -> Self {
        KClass {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn line_bundle(ring: &Arc<RingModel>, a: i64, b: i64) -> Result<Self> {
        KClass::from_terms(ring, [(a, b, 1)])
    }

    pub fn from_terms(ring: &Arc<RingModel>, terms: impl IntoIterator<Item = (i64, i64, i64)>) -> Result<Self> {
        let mut k = KClass::zero(ring);
        for (a, b, m) in terms {
            if b != 0 && ring.generators().len() < 2 {
                return Err(Error::Unsupported(format!("{} has no divisor Ξ", ring.name())));
            }
            *k.terms.entry((a, b)).or_insert(0) += m;
        }
        k.terms.retain(|_, m| *m != 0);
        Ok(k)
    }

    /// The basis {𝒪(iH + jΞ)} indexed like the monomial basis h^iξ^j.
    pub fn basis(ring: &Arc<RingModel>) -> Vec<KClass> {
        ring.basis()
            .iter()
            .map(|e| {
                let a = e[0] as i64;
                let b = e.get(1).copied().unwrap_or(0) as i64;
                KClass::line_bundle(ring, a, b).expect("basis exponents fit the ring")
            })
            .collect()
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), i64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn add(&self, other: &KClass) -> Result<KClass> {
        same_ring(&self.ring, &other.ring)?;
        KClass::from_terms(
            &self.ring,
            self.terms().chain(other.terms()).map(|((a, b), m)| (a, b, m)),
        )
    }

    pub fn dual(&self) -> KClass {
        KClass {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|((a, b), m)| ((-a, -b), *m)).collect(),
        }
    }

    pub fn ch(&self) -> CohClass<Rat> {
        let gens = self.ring.generators();
        let h = CohClass::<Rat>::generator(&self.ring, &gens[0]).expect("first generator");
        let x = gens.get(1).map(|g| CohClass::<Rat>::generator(&self.ring, g).expect("second generator"));
        let mut acc = CohClass::zero(&self.ring);
        for ((a, b), m) in self.terms() {
            let mut c1 = h.scale(&Rat::from_int(a));
            if let Some(x) = &x {
                c1 = &c1 + &x.scale(&Rat::from_int(b));
            }
            acc = &acc + &c1.exp().scale(&Rat::from_int(m));
        }
        acc
    }
}

/// ch(E^∨) from ch(E): the degree-k part picks up (−1)^k.
pub fn ch_dual(ch: &CohClass<Rat>) -> CohClass<Rat> {
    ch.weight_by_degree(|k| Rat::from_int(if k % 2 == 0 { 1 } else { -1 }))
}

/// χ(E, F) = ∫ ch(E^∨)·ch(F)·Td from Chern characters.
pub fn euler_pairing_ch(ch_e: &CohClass<Rat>, ch_f: &CohClass<Rat>) -> Result<Rat> {
    same_ring(ch_e.ring(), ch_f.ring())?;
    let td = RootBundle::tangent(ch_e.ring())?.todd();
    let chi = (&(&ch_dual(ch_e) * ch_f) * &td).integrate();
    if !chi.is_integer() {
        return Err(Error::NonIntegral(chi.to_string()));
    }
    Ok(chi)
}

pub fn euler_pairing(e: &KClass, f: &KClass) -> Result<Rat> {
    same_ring(&e.ring, &f.ring)?;
    euler_pairing_ch(&e.ch(), &f.ch())
}

/// FM_H(α) = Td(P′)^{−1} · p′_*(p*(α) · Td(W)) and the graph correspondence
/// F(α) = p′_*(p*(α)), for the local model of rank r.
#[derive(Clone, Debug)]
pub struct FmTransform {
    r: usize,
    p: RingMap,
    p_prime: RingMap,
    td_w: CohClass<Rat>,
    td_target_inv: CohClass<Rat>,
    matrix: RatMatrix,
    graph: RatMatrix,
}

impl FmTransform {
    pub fn new(r: usize) -> Result<Self> {
        let p = RingMap::blowup_p(r)?;
        let p_prime = RingMap::blowup_p_prime(r)?;
        let td_w = RootBundle::tangent(p.target())?.todd();
        let td_target_inv = RootBundle::tangent(p_prime.source())?.todd_inverse();
        let mut t = FmTransform {
            r,
            p,
            p_prime,
            td_w,
            td_target_inv,
            matrix: RatMatrix::zeros(0, 0),
            graph: RatMatrix::zeros(0, 0),
        };
        let src = t.source().clone();
        let n = src.rank();
        let mut cols = Vec::with_capacity(n);
        let mut gcols = Vec::with_capacity(n);
        for i in 0..n {
            let e = CohClass::<Rat>::basis_element(&src, i);
            cols.push(t.apply(&e)?.into_coeffs());
            gcols.push(t.graph_correspondence(&e)?.into_coeffs());
        }
        t.matrix = RatMatrix::from_columns(n, &cols);
        t.graph = RatMatrix::from_columns(n, &gcols);
        Ok(t)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn source(&self) -> &Arc<RingModel> {
        self.p.source()
    }

    pub fn target(&self) -> &Arc<RingModel> {
        self.p_prime.source()
    }

    pub fn apply(&self, alpha: &CohClass<Rat>) -> Result<CohClass<Rat>> {
        let up = &self.p.pullback(alpha)? * &self.td_w;
        Ok(&self.td_target_inv * &self.p_prime.pushforward(&up)?)
    }

    pub fn graph_correspondence(&self, alpha: &CohClass<Rat>) -> Result<CohClass<Rat>> {
        self.p_prime.pushforward(&self.p.pullback(alpha)?)
    }

    /// FM_H in the monomial bases.
    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// F in the monomial bases.
    pub fn graph_matrix(&self) -> &RatMatrix {
        &self.graph
    }

    /// FM_H expressed in the line-bundle bases of both sides.
    pub fn lattice_matrix(&self) -> Result<RatMatrix> {
        let n = self.source().rank();
        let chs = |ring: &Arc<RingModel>| -> RatMatrix {
            let cols: Vec<Vec<Rat>> = KClass::basis(ring).iter().map(|k| k.ch().into_coeffs()).collect();
            RatMatrix::from_columns(n, &cols)
        };
        let l = chs(self.source());
        let l_prime = chs(self.target());
        l_prime.solve(&self.matrix.mul(&l))
    }

    /// {"schema", "r", "basis", "matrix"} with "p/q" entries.
    pub fn to_json(&self) -> Value {
        let src = self.source();
        let basis: Vec<String> = src.basis().iter().map(|e| src.monomial_name(e)).collect();
        json!({
            "schema": crate::SCHEMA,
            "r": self.r,
            "basis": basis,
            "matrix": self.matrix.to_strings(),
        })
    }
}

/// Whether a ring is one of the local models.
pub fn is_local_model(ring: &RingModel) -> bool {
    matches!(ring.kind(), RingKind::LocalP { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projective_pairings() {
        let p1 = RingModel::proj(1);
        let o = KClass::line_bundle(&p1, 0, 0).unwrap();
        let om1 = KClass::line_bundle(&p1, -1, 0).unwrap();
        assert_eq!(euler_pairing(&o, &om1).unwrap(), Rat::zero());
        let p2 = RingModel::proj(2);
        let o = KClass::line_bundle(&p2, 0, 0).unwrap();
        let o3 = KClass::line_bundle(&p2, 3, 0).unwrap();
        assert_eq!(euler_pairing(&o, &o3).unwrap(), Rat::from_int(10));
    }

    #[test]
    fn structure_sheaf_of_local_model() {
        let lp = RingModel::local_p(1);
        let o = KClass::line_bundle(&lp, 0, 0).unwrap();
        assert_eq!(euler_pairing(&o, &o).unwrap(), Rat::one());
        let w = RingModel::blowup_w(1);
        assert_eq!(RootBundle::tangent(&w).unwrap().todd().integrate(), Rat::one());
    }

    #[test]
    fn fm_basic_values() {
        for r in 1..=2 {
            let fm = FmTransform::new(r).unwrap();
            let src = fm.source().clone();
            let one = CohClass::<Rat>::one(&src);
            assert_eq!(fm.apply(&one).unwrap(), CohClass::one(fm.target()));
            assert!(fm.apply(&CohClass::zero(&src)).unwrap().is_zero());
            for k in KClass::basis(&src) {
                assert_eq!(fm.apply(&k.ch()).unwrap().constant_term(), Rat::one());
            }
        }
    }

    #[test]
    fn fm_is_unimodular_and_integral() {
        for r in 1..=2 {
            let fm = FmTransform::new(r).unwrap();
            assert_eq!(fm.matrix().det().abs(), Rat::one());
            let lat = fm.lattice_matrix().unwrap();
            assert!(lat.is_integral());
            assert_eq!(lat.det().abs(), Rat::one());
        }
    }

    #[test]
    fn fm_differs_from_graph() {
        let fm = FmTransform::new(1).unwrap();
        assert_ne!(fm.matrix(), fm.graph_matrix());
    }

    #[test]
    fn dual_and_sum() {
        let lp = RingModel::local_p(1);
        let a = KClass::line_bundle(&lp, 1, 2).unwrap();
        assert_eq!(a.dual().dual(), a);
        assert_eq!(ch_dual(&a.ch()), a.dual().ch());
        let twice = a.add(&a).unwrap();
        assert_eq!(twice.ch(), a.ch().scale(&Rat::from_int(2)));
        assert!(KClass::line_bundle(&RingModel::proj(1), 0, 1).is_err());
    }

    fn k_class() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
        proptest::collection::vec((-3i64..=3, -3i64..=3, -4i64..=4), 1..4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn fm_preserves_rank_and_pairing(e in k_class(), f in k_class()) {
            let fm = FmTransform::new(1).unwrap();
            let lp = fm.source().clone();
            let (e, f) = (KClass::from_terms(&lp, e).unwrap(), KClass::from_terms(&lp, f).unwrap());
            let (fe, ff) = (fm.apply(&e.ch()).unwrap(), fm.apply(&f.ch()).unwrap());
            prop_assert_eq!(fe.constant_term(), e.ch().constant_term());
            prop_assert_eq!(euler_pairing_ch(&fe, &ff).unwrap(), euler_pairing(&e, &f).unwrap());
            let sum = fm.apply(&e.add(&f).unwrap().ch()).unwrap();
            prop_assert_eq!(sum, &fe + &ff);
        }

        #[test]
        fn ch_is_multiplicative_on_line_bundles(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4, d in -4i64..=4) {
            let lp = RingModel::local_p(2);
            let l = |x, y| KClass::line_bundle(&lp, x, y).unwrap().ch();
            prop_assert_eq!(&l(a, b) * &l(c, d), l(a + c, b + d));
        }
    }
}
