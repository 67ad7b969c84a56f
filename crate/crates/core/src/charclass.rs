//! Chern character, Chern and Todd classes, and the Gamma class from
//! Chern-root data.

use std::sync::Arc;

use crate::cohomology::{CohClass, RingKind, RingMap, RingModel};
use crate::error::{Error, Result};
use crate::scalars::{Rat, SymScalar};

/// A bundle given by a multiset of degree-2 Chern roots. Negative
/// multiplicities stand for virtual (dual-quotient) summands.
#[derive(Clone, Debug)]
pub struct RootBundle {
    ring: Arc<RingModel>,
    roots: Vec<(CohClass<Rat>, i64)>,
}

fn gen(ring: &Arc<RingModel>, name: &str) -> CohClass<Rat> {
    CohClass::generator(ring, name).expect("shipped generator")
}

impl RootBundle {
    pub fn new(ring: &Arc<RingModel>, roots: Vec<(CohClass<Rat>, i64)>) -> Result<Self> {
        for (root, _) in &roots {
            crate::cohomology::same_ring(root.ring(), ring)?;
            if root.degrees().iter().any(|&d| d != 1) {
                return Err(Error::Unsupported("Chern roots must be homogeneous of degree 2".into()));
            }
        }
        Ok(RootBundle {
            ring: ring.clone(),
            roots,
        })
    }

    pub fn trivial(ring: &Arc<RingModel>, rank: i64) -> Self {
        RootBundle {
            ring: ring.clone(),
            roots: vec![(CohClass::zero(ring), rank)],
        }
    }

    /// The tangent bundle of a shipped model.
    pub fn tangent(ring: &Arc<RingModel>) -> Result<Self> {
        let roots = match ring.kind() {
            RingKind::Proj(r) => vec![(gen(ring, "h"), *r as i64 + 1)],
            RingKind::LocalP { r, .. } => {
                let h = gen(ring, &ring.generators()[0]);
                let x = gen(ring, &ring.generators()[1]);
                let m = *r as i64 + 1;
                vec![(h.clone(), m), (x.clone(), 1), (&x - &h, m)]
            }
            RingKind::BlowupW(r) => {
                let h1 = gen(ring, "h₁");
                let h2 = gen(ring, "h₂");
                let z = gen(ring, "ζ");
                let m = *r as i64 + 1;
                let e = &(&z - &h1) - &h2;
                vec![(h1, m), (h2, m), (z, 1), (e, 1)]
            }
            RingKind::Product(a, b) => {
                let ra = RingModel::by_name(&a.to_string())?;
                let rb = RingModel::by_name(&b.to_string())?;
                let ia = RingMap::product_factor(&ra, ring, true)?;
                let ib = RingMap::product_factor(&rb, ring, false)?;
                let mut roots = Vec::new();
                for (bundle, map) in [(RootBundle::tangent(&ra)?, ia), (RootBundle::tangent(&rb)?, ib)] {
                    for (root, m) in bundle.roots {
                        roots.push((map.pullback(&root)?, m));
                    }
                }
                roots
            }
        };
        RootBundle::new(ring, roots)
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn roots(&self) -> &[(CohClass<Rat>, i64)] {
        &self.roots
    }

    pub fn rank(&self) -> i64 {
        self.roots.iter().map(|(_, m)| m).sum()
    }

    /// Multiplicative class ∏ f(root)^m for a power series f with f(0) = 1.
    fn multiplicative(&self, series: &[Rat]) -> CohClass<Rat> {
        let mut acc = CohClass::one(&self.ring);
        for (root, m) in &self.roots {
            let f = root.power_series(series);
            let f = if *m < 0 { f.inverse().expect("f(0) = 1") } else { f };
            acc = &acc * &f.pow(m.unsigned_abs() as u32);
        }
        acc
    }

    fn truncation(&self) -> usize {
        self.ring.dim() + 1
    }

    pub fn total_chern(&self) -> CohClass<Rat> {
        let mut s = vec![Rat::zero(); self.truncation()];
        s[0] = Rat::one();
        if s.len() > 1 {
            s[1] = Rat::one();
        }
        self.multiplicative(&s)
    }

    /// c_k, the degree-k part of the total Chern class.
    pub fn chern(&self, k: usize) -> CohClass<Rat> {
        self.total_chern().homogeneous_part(k)
    }

    pub fn c1(&self) -> CohClass<Rat> {
        let mut acc = CohClass::zero(&self.ring);
        for (root, m) in &self.roots {
            acc = &acc + &root.scale(&Rat::from_int(*m));
        }
        acc
    }

    pub fn chern_character(&self) -> CohClass<Rat> {
        let mut acc = CohClass::zero(&self.ring);
        for (root, m) in &self.roots {
            acc = &acc + &root.exp().scale(&Rat::from_int(*m));
        }
        acc
    }

    pub fn todd(&self) -> CohClass<Rat> {
        self.multiplicative(&todd_series(self.truncation()))
    }

    pub fn todd_inverse(&self) -> CohClass<Rat> {
        self.multiplicative(&inverse_todd_series(self.truncation()))
    }

    /// Power sums p_k of the roots, computed from the Chern classes by
    /// Newton's identities; index 0 is unused.
    pub fn power_sums(&self) -> Vec<CohClass<Rat>> {
        let n = self.ring.dim();
        let c: Vec<CohClass<Rat>> = (0..=n).map(|k| self.chern(k)).collect();
        let mut p: Vec<CohClass<Rat>> = vec![CohClass::zero(&self.ring)];
        for k in 1..=n {
            let sign = |e: usize| Rat::from_int(if e % 2 == 0 { 1 } else { -1 });
            let mut pk = c[k].scale(&(sign(k - 1) * Rat::from_int(k as i64)));
            for i in 1..k {
                pk = &pk + &(&c[k - i] * &p[i]).scale(&sign(k - 1 + i));
            }
            p.push(pk);
        }
        p
    }

    /// Γ = exp(−γ p₁ + Σ_{k≥2} (−1)^k ζ(k)/k · p_k).
    pub fn gamma_class(&self) -> CohClass<SymScalar> {
        let p = self.power_sums();
        let mut log = p[1].to_sym().scale_by(&(-SymScalar::euler_gamma()));
        for (k, pk) in p.iter().enumerate().skip(2) {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = SymScalar::zeta(k as u8).scale(&Rat::new(sign, k as i64));
            log = &log + &pk.to_sym().scale_by(&c);
        }
        log.exp()
    }
}

/// Coefficients of x/(1 − e^{−x}).
pub fn todd_series(len: usize) -> Vec<Rat> {
    // (1 − e^{−x})/x = Σ (−1)^k x^k/(k+1)!, inverted term by term
    let inv = inverse_todd_series(len);
    invert_series(&inv)
}

/// Coefficients of (1 − e^{−x})/x.
pub fn inverse_todd_series(len: usize) -> Vec<Rat> {
    (0..len)
        .map(|k| {
            let s = if k % 2 == 0 { 1 } else { -1 };
            Rat::from_int(s) * Rat::factorial(k as u32 + 1).recip()
        })
        .collect()
}

fn invert_series(a: &[Rat]) -> Vec<Rat> {
    let mut b = vec![Rat::zero(); a.len()];
    if a.is_empty() {
        return b;
    }
    b[0] = a[0].recip();
    for n in 1..a.len() {
        let mut s = Rat::zero();
        for k in 1..=n {
            s += &(&a[k] * &b[n - k]);
        }
        b[n] = -(s * &b[0]);
    }
    b
}

/// ch of the line bundle with first Chern class `c`.
pub fn line_bundle_ch(c: &CohClass<Rat>) -> CohClass<Rat> {
    c.exp()
}

/// External product a ⊠ b on the product ring.
pub fn boxtimes<S: crate::scalars::Coeff>(
    a: &CohClass<S>,
    b: &CohClass<S>,
    product: &Arc<RingModel>,
) -> Result<CohClass<S>> {
    let ia = RingMap::product_factor(a.ring(), product, true)?;
    let ib = RingMap::product_factor(b.ring(), product, false)?;
    ia.pullback(a)?.checked_mul(&ib.pullback(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Gen;

    fn h(ring: &Arc<RingModel>) -> CohClass<Rat> {
        gen(ring, "h")
    }

    #[test]
    fn todd_coefficients() {
        assert_eq!(
            todd_series(4),
            vec![Rat::one(), Rat::new(1, 2), Rat::new(1, 12), Rat::zero()]
        );
    }

    #[test]
    fn todd_projective() {
        let p1 = RingModel::proj(1);
        assert_eq!(RootBundle::tangent(&p1).unwrap().todd(), &CohClass::one(&p1) + &h(&p1));
        let p2 = RingModel::proj(2);
        let expect = &(&CohClass::one(&p2) + &h(&p2).scale(&Rat::new(3, 2))) + &h(&p2).pow(2);
        assert_eq!(RootBundle::tangent(&p2).unwrap().todd(), expect);
        assert_eq!(RootBundle::trivial(&p2, 3).todd(), CohClass::one(&p2));
    }

    #[test]
    fn ch_examples() {
        let p1 = RingModel::proj(1);
        assert_eq!(line_bundle_ch(&h(&p1)), &CohClass::one(&p1) + &h(&p1));
        let lp = RingModel::local_p(1);
        let x = gen(&lp, "ξ");
        let expect = &(&(&CohClass::one(&lp) + &x) + &x.pow(2).scale(&Rat::new(1, 2)))
            + &(&h(&lp) * &x.pow(2)).scale(&Rat::new(1, 3));
        assert_eq!(line_bundle_ch(&x), expect);
    }

    #[test]
    fn gamma_projective() {
        let p1 = RingModel::proj(1);
        let g1 = RootBundle::tangent(&p1).unwrap().gamma_class();
        let expect = &CohClass::one(&p1).to_sym()
            + &h(&p1).to_sym().scale_by(&SymScalar::euler_gamma().scale(&Rat::from_int(-2)));
        assert_eq!(g1, expect);

        let p2 = RingModel::proj(2);
        let g2 = RootBundle::tangent(&p2).unwrap().gamma_class();
        let gamma = SymScalar::euler_gamma();
        let quad = &gamma.pow(2).scale(&Rat::new(9, 2)) + &SymScalar::zeta(2).scale(&Rat::new(3, 2));
        let expect = &(&CohClass::one(&p2).to_sym()
            + &h(&p2).to_sym().scale_by(&gamma.scale(&Rat::from_int(-3))))
            + &h(&p2).pow(2).to_sym().scale_by(&quad);
        assert_eq!(g2, expect);
        assert_eq!(RootBundle::trivial(&p2, 2).gamma_class(), CohClass::one(&p2).to_sym());
    }

    #[test]
    fn gamma_of_local_model_only_uses_low_zetas() {
        let lp = RingModel::local_p(2);
        let g = RootBundle::tangent(&lp).unwrap().gamma_class();
        let gens: Vec<Gen> = g.coeffs().iter().flat_map(|c| c.generators()).collect();
        assert!(gens.iter().all(|g| matches!(g, Gen::EulerGamma | Gen::Zeta(2..=5))));
        assert_eq!(g.constant_term(), SymScalar::one());
    }

    #[test]
    fn newton_matches_direct_power_sums() {
        for ring in [RingModel::local_p(2), RingModel::blowup_w(1), RingModel::proj(3)] {
            let t = RootBundle::tangent(&ring).unwrap();
            let p = t.power_sums();
            for (k, pk) in p.iter().enumerate().skip(1) {
                let mut direct = CohClass::zero(&ring);
                for (root, m) in t.roots() {
                    direct = &direct + &root.pow(k as u32).scale(&Rat::from_int(*m));
                }
                assert_eq!(*pk, direct, "{} p_{k}", ring.name());
            }
        }
    }

    #[test]
    fn first_chern_classes() {
        for r in 1..=3 {
            let lp = RingModel::local_p(r);
            let c1 = RootBundle::tangent(&lp).unwrap().c1();
            assert_eq!(c1, gen(&lp, "ξ").scale(&Rat::from_int(r as i64 + 2)));
        }
    }

    #[test]
    fn crepancy() {
        for r in 1..=3 {
            let p = RingMap::blowup_p(r).unwrap();
            let w = p.target().clone();
            let cw = RootBundle::tangent(&w).unwrap().c1();
            let cp = p.pullback(&RootBundle::tangent(p.source()).unwrap().c1()).unwrap();
            let e = &(&gen(&w, "ζ") - &gen(&w, "h₁")) - &gen(&w, "h₂");
            assert_eq!(cw, &cp - &e.scale(&Rat::from_int(r as i64)));
        }
    }
}
