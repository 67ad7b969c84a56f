//! Both sides of Ψ′∘𝔽𝕄 = 𝕌∘Ψ on the line-bundle basis of the local model.

use rug::{Complex, Float};

use crate::charclass::RootBundle;
use crate::error::Result;
use crate::fm::{FmTransform, KClass};
use crate::givental::{eval_givental, psi_with_gamma};
use crate::linalg::{rel_vec_distance, CMatrix};
use crate::scalars::{BigC, Constants};

/// Evaluated Ψ(E) and Ψ′(𝔽𝕄(E)) for every basis line bundle E.
#[derive(Clone, Debug)]
pub struct Images {
    pub psi: Vec<Vec<BigC>>,
    pub psi_fm: Vec<Vec<BigC>>,
}

/// Images at z = z0 on the real branch log z0.
pub fn images(fm: &FmTransform, z0: &BigC, consts: &Constants) -> Result<Images> {
    let bits = consts.precision.bits();
    let log_z0 = Complex::with_val(bits, z0.ln_ref());
    let src = fm.source();
    let tgt = fm.target();
    let gamma = RootBundle::tangent(src)?.gamma_class();
    let gamma_prime = RootBundle::tangent(tgt)?.gamma_class();
    let mut psi = Vec::new();
    let mut psi_fm = Vec::new();
    for e in KClass::basis(src) {
        let ch = e.ch();
        let g = psi_with_gamma(&ch, &gamma)?;
        psi.push(eval_givental(&g, z0, &log_z0, consts)?);
        let g = psi_with_gamma(&fm.apply(&ch)?, &gamma_prime)?;
        psi_fm.push(eval_givental(&g, z0, &log_z0, consts)?);
    }
    Ok(Images { psi, psi_fm })
}

/// ‖Ψ′(𝔽𝕄 E) − 𝕌Ψ(E)‖/‖𝕌Ψ(E)‖ per basis bundle.
pub fn residuals(u: &CMatrix, images: &Images) -> Vec<Float> {
    images
        .psi
        .iter()
        .zip(&images.psi_fm)
        .map(|(a, b)| rel_vec_distance(b, &u.apply(a)))
        .collect()
}

pub fn max_residual(u: &CMatrix, images: &Images) -> Float {
    let bits = u.precision().bits();
    residuals(u, images)
        .into_iter()
        .fold(Float::with_val(bits, 0), |m, x| if x > m { x } else { m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::CohClass;
    use crate::scalars::{Precision, Rat};

    fn eval(ch: &CohClass<Rat>, fm_side: bool, fm: &FmTransform, consts: &Constants) -> Vec<BigC> {
        let prec = consts.precision;
        let z0 = prec.real(2.0);
        let log_z0 = Complex::with_val(prec.bits(), z0.ln_ref());
        let (ring, ch) = if fm_side {
            (fm.target(), fm.apply(ch).unwrap())
        } else {
            (fm.source(), ch.clone())
        };
        let gamma = RootBundle::tangent(ring).unwrap().gamma_class();
        eval_givental(&psi_with_gamma(&ch, &gamma).unwrap(), &z0, &log_z0, consts).unwrap()
    }

    #[test]
    fn zero_class_maps_to_zero_on_both_sides() {
        let fm = FmTransform::new(1).unwrap();
        let consts = Constants::new(Precision::new(50));
        let zero = CohClass::<Rat>::zero(fm.source());
        assert!(fm.apply(&zero).unwrap().is_zero());
        for side in [false, true] {
            assert!(eval(&zero, side, &fm, &consts).iter().all(|x| x.is_zero()));
        }
        let u = CMatrix::identity(fm.source().rank(), consts.precision);
        let im = images(&fm, &consts.precision.real(2.0), &consts).unwrap();
        assert!(u.apply(&vec![consts.precision.zero(); u.rows()]).iter().all(|x| x.is_zero()));
        assert_eq!(residuals(&u, &im).len(), im.psi.len());
    }

    #[test]
    fn both_sides_are_additive() {
        let fm = FmTransform::new(1).unwrap();
        let consts = Constants::new(Precision::new(50));
        let basis = KClass::basis(fm.source());
        let (a, b) = (basis[1].ch(), basis[4].ch());
        let sum = &a + &b;
        for side in [false, true] {
            let (ea, eb, es) = (eval(&a, side, &fm, &consts), eval(&b, side, &fm, &consts), eval(&sum, side, &fm, &consts));
            let added: Vec<BigC> = ea.iter().zip(&eb).map(|(x, y)| Complex::with_val(x.prec().0, x + y)).collect();
            assert!(rel_vec_distance(&added, &es) < 1e-40);
        }
    }
}
