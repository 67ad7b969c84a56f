use std::sync::Arc;

use super::class::{same_ring, CohClass};
use super::ring::{Poly, RingModel};
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::scalars::{Coeff, Rat};

/// A pullback homomorphism source → target given by generator images,
/// together with its adjoint pushforward.
#[derive(Clone, Debug)]
pub struct RingMap {
    name: String,
    source: Arc<RingModel>,
    target: Arc<RingModel>,
    images: Vec<CohClass<Rat>>,
    matrix: RatMatrix,
    push: Option<RatMatrix>,
}

fn eval_poly(p: &Poly, images: &[CohClass<Rat>], target: &Arc<RingModel>) -> CohClass<Rat> {
    let mut acc = CohClass::zero(target);
    for (e, c) in p {
        let mut t = CohClass::one(target);
        for (g, k) in e.iter().enumerate() {
            if *k > 0 {
                t = &t * &images[g].pow(*k);
            }
        }
        acc = &acc + &t.scale(c);
    }
    acc
}

impl RingMap {
    /// Builds the map, verifying that every source relation maps to zero.
    pub fn new(
        name: &str,
        source: &Arc<RingModel>,
        target: &Arc<RingModel>,
        images: Vec<CohClass<Rat>>,
    ) -> Result<Self> {
        assert_eq!(images.len(), source.generators().len(), "one image per generator");
        for img in &images {
            same_ring(img.ring(), target)?;
        }
        for (rel, p) in source.relations() {
            if !eval_poly(p, &images, target).is_zero() {
                return Err(Error::RelationViolation {
                    map: name.to_string(),
                    relation: rel.clone(),
                });
            }
        }
        let columns: Vec<Vec<Rat>> = source
            .basis()
            .iter()
            .map(|e| eval_poly(&vec![(e.clone(), Rat::one())], &images, target).into_coeffs())
            .collect();
        let matrix = RatMatrix::from_columns(target.rank(), &columns);
        let gs = source.pairing_matrix();
        let gt = target.pairing_matrix();
        let push = gs.solve(&matrix.transpose().mul(&gt)).ok();
        Ok(RingMap {
            name: name.to_string(),
            source: source.clone(),
            target: target.clone(),
            images,
            matrix,
            push,
        })
    }

    pub fn identity(ring: &Arc<RingModel>) -> Self {
        let images = ring
            .generators()
            .iter()
            .map(|g| CohClass::generator(ring, g).unwrap())
            .collect();
        RingMap::new("id", ring, ring, images).expect("identity is a ring map")
    }

    /// p*: LocalP(r) → BlowupW(r), h ↦ h₁, ξ ↦ ζ.
    pub fn blowup_p(r: usize) -> Result<Self> {
        RingMap::to_blowup("p*", &RingModel::local_p(r), &RingModel::blowup_w(r), "h₁")
    }

    /// p′*: LocalP′(r) → BlowupW(r), h′ ↦ h₂, ξ′ ↦ ζ.
    pub fn blowup_p_prime(r: usize) -> Result<Self> {
        RingMap::to_blowup("p'*", &RingModel::local_p_prime(r), &RingModel::blowup_w(r), "h₂")
    }

    pub fn to_blowup(name: &str, src: &Arc<RingModel>, w: &Arc<RingModel>, h_image: &str) -> Result<Self> {
        RingMap::new(
            name,
            src,
            w,
            vec![CohClass::generator(w, h_image)?, CohClass::generator(w, "ζ")?],
        )
    }

    /// π*: Proj(r) → LocalP(r), h ↦ h.
    pub fn bundle_projection(r: usize) -> Result<Self> {
        let p = RingModel::local_p(r);
        RingMap::new("π*", &RingModel::proj(r), &p, vec![CohClass::generator(&p, "h")?])
    }

    /// Inclusion of a factor into a product ring, a ↦ a⊗1 or b ↦ 1⊗b.
    pub fn product_factor(factor: &Arc<RingModel>, product: &Arc<RingModel>, left: bool) -> Result<Self> {
        let prefix: Vec<String> = factor
            .generators()
            .iter()
            .map(|g| if left { format!("{g}⊗1") } else { format!("1⊗{g}") })
            .collect();
        let images = prefix
            .iter()
            .map(|g| CohClass::generator(product, g))
            .collect::<Result<Vec<_>>>()?;
        RingMap::new(if left { "pr₁*" } else { "pr₂*" }, factor, product, images)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<RingModel> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RingModel> {
        &self.target
    }

    pub fn images(&self) -> &[CohClass<Rat>] {
        &self.images
    }

    /// Pullback matrix (target rank × source rank).
    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// Adjoint pushforward matrix (source rank × target rank).
    pub fn push_matrix(&self) -> Result<&RatMatrix> {
        self.push
            .as_ref()
            .ok_or_else(|| Error::Singular(format!("pairing of {}", self.source.name())))
    }

    pub fn pullback<S: Coeff>(&self, a: &CohClass<S>) -> Result<CohClass<S>> {
        same_ring(a.ring(), &self.source)?;
        Ok(CohClass::from_coeffs(&self.target, self.matrix.apply(a.coeffs())))
    }

    /// The unique f_* with ∫_source f_*(b)·y = ∫_target b·f*(y).
    pub fn pushforward<S: Coeff>(&self, b: &CohClass<S>) -> Result<CohClass<S>> {
        same_ring(b.ring(), &self.target)?;
        Ok(CohClass::from_coeffs(&self.source, self.push_matrix()?.apply(b.coeffs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(ring: &Arc<RingModel>, n: &str) -> CohClass<Rat> {
        CohClass::generator(ring, n).unwrap()
    }

    #[test]
    fn blowup_maps_are_ring_maps() {
        for r in 1..=3 {
            let p = RingMap::blowup_p(r).unwrap();
            let w = p.target().clone();
            assert_eq!(p.pullback(&g(p.source(), "h")).unwrap(), g(&w, "h₁"));
            let pp = RingMap::blowup_p_prime(r).unwrap();
            assert_eq!(pp.pullback(&g(pp.source(), "ξ′")).unwrap(), g(&w, "ζ"));
        }
    }

    #[test]
    fn wrong_images_are_rejected() {
        let w = RingModel::blowup_w(1);
        let err = RingMap::new("bad", &RingModel::local_p(1), &w, vec![g(&w, "ζ"), g(&w, "ζ")]).unwrap_err();
        assert_eq!(
            err,
            Error::RelationViolation {
                map: "bad".into(),
                relation: "h^2".into()
            }
        );
    }

    #[test]
    fn r1_graph_correspondence_oracle() {
        let p = RingMap::blowup_p(1).unwrap();
        let pp = RingMap::blowup_p_prime(1).unwrap();
        let src = p.source().clone();
        let dst = pp.source().clone();
        let fh = pp.pushforward(&p.pullback(&g(&src, "h")).unwrap()).unwrap();
        assert_eq!(fh, &g(&dst, "ξ′") - &g(&dst, "h′"));
        let fx = pp.pushforward(&p.pullback(&g(&src, "ξ")).unwrap()).unwrap();
        assert_eq!(fx, g(&dst, "ξ′"));
    }

    #[test]
    fn projection_and_adjunction() {
        for r in 1..=2 {
            let p = RingMap::blowup_p(r).unwrap();
            let src = p.source().clone();
            let w = p.target().clone();
            for a in 0..src.rank() {
                let x = CohClass::<Rat>::basis_element(&src, a);
                assert_eq!(p.pushforward(&p.pullback(&x).unwrap()).unwrap(), x);
                for b in 0..w.rank() {
                    let y = CohClass::<Rat>::basis_element(&w, b);
                    let lhs = p.pushforward(&(&y * &p.pullback(&x).unwrap())).unwrap();
                    let rhs = &p.pushforward(&y).unwrap() * &x;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn segre_pushforward() {
        // π_* ξ^{r+1+k} = s_k(𝒪(−1)^{r+1} ⊕ 𝒪) = C(r+k, k) h^k
        for r in 1..=3 {
            let pi = RingMap::bundle_projection(r).unwrap();
            let p = pi.target().clone();
            let base = pi.source().clone();
            for k in 0..=r {
                let push = pi.pushforward(&g(&p, "ξ").pow((r + 1 + k) as u32)).unwrap();
                let expect = g(&base, "h").pow(k as u32).scale(&Rat::binomial((r + k) as i64, k as i64));
                assert_eq!(push, expect);
            }
        }
    }
}
