//! Exact check suites for cohomology, characteristic classes, the
//! Fourier–Mukai transform and the quantum differential equation.

use std::sync::Arc;

use flopcheck_core::charclass::{boxtimes, RootBundle};
use flopcheck_core::cohomology::{CohClass, RingMap, RingModel};
use flopcheck_core::fm::{euler_pairing_ch, FmTransform, KClass};
use flopcheck_core::quantum::{mirror_map_check, qde_operator_check, ISeries, JetSystem};
use flopcheck_core::scalars::{Rat, SymScalar};
use flopcheck_core::Result;

use crate::report::{Check, Timer};

fn gen(ring: &Arc<RingModel>, name: &str) -> Result<CohClass<Rat>> {
    CohClass::generator(ring, name)
}

/// Runs `f`, turning an error into a failed check of the same name.
fn guarded(timer: &mut Timer, name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    let c = f().unwrap_or_else(|e| Check::failed_with(name, e));
    timer.stamp(c)
}

fn mismatches(name: &str, bad: Vec<String>) -> Check {
    let ok = bad.is_empty();
    Check::exact(name, ok, (!ok).then(|| bad.join("; ")))
}

/// ∫_{ℙ^r} ch(𝒪(k))·Td = C(k+r, r) for −r ≤ k ≤ 6.
pub fn grr_suite(max_r: usize) -> Vec<Check> {
    let mut t = Timer::default();
    (1..=max_r)
        .map(|r| {
            let name = format!("grr.chi[Proj({r})]");
            guarded(&mut t, &name.clone(), || {
                let p = RingModel::proj(r);
                let h = gen(&p, "h")?;
                let td = RootBundle::tangent(&p)?.todd();
                let mut bad = Vec::new();
                for k in -(r as i64)..=6 {
                    let chi = (&h.scale(&Rat::from_int(k)).exp() * &td).integrate();
                    let expect = Rat::binomial(k + r as i64, r as i64);
                    if chi != expect {
                        bad.push(format!("k={k}: {chi} != {expect}"));
                    }
                }
                Ok(mismatches(&name, bad))
            })
        })
        .collect()
}

/// Ring relations, intersection numbers, push-pull identities and crepancy
/// for the local model of rank r. `corrupt` replaces LocalP(r) by a copy
/// with a broken rewrite rule.
pub fn intersection_suite(r: usize, corrupt: bool) -> Vec<Check> {
    let mut t = Timer::default();
    let mut out = Vec::new();
    let mut rings = vec![
        RingModel::proj(r),
        RingModel::local_p(r),
        RingModel::local_p_prime(r),
        RingModel::blowup_w(r),
    ];
    if corrupt {
        match RingModel::local_p(r).with_corrupted_rule() {
            Ok(bad) => rings[1] = bad,
            Err(e) => out.push(Check::failed_with("cohomology.corruption", e)),
        }
    }
    for ring in &rings {
        let name = format!("cohomology.relations[{}]", ring.name());
        let c = match ring.relations_hold() {
            Ok(()) => Check::exact(&name, true, None),
            Err(rel) => Check::exact(&name, false, Some(format!("relation `{rel}` fails"))),
        };
        out.push(t.stamp(c));
    }

    out.push(guarded(&mut t, "cohomology.intersections", || {
        let lp = RingModel::local_p(r);
        let (h, xi) = (gen(&lp, "h")?, gen(&lp, "ξ")?);
        let mut bad = Vec::new();
        for i in 0..=r {
            let v = (&h.pow(i as u32) * &xi.pow((2 * r + 1 - i) as u32)).integrate();
            let expect = Rat::binomial((2 * r - i) as i64, (r - i) as i64);
            if v != expect {
                bad.push(format!("i={i}: {v} != {expect}"));
            }
        }
        Ok(mismatches("cohomology.intersections", bad))
    }));

    out.push(guarded(&mut t, "cohomology.push_pull", || {
        let mut bad = Vec::new();
        for p in [RingMap::blowup_p(r)?, RingMap::blowup_p_prime(r)?] {
            let src = p.source().clone();
            for i in 0..src.rank() {
                let e = CohClass::<Rat>::basis_element(&src, i);
                if p.pushforward(&p.pullback(&e)?)? != e {
                    bad.push(format!("{} on basis {i}", p.name()));
                }
            }
        }
        Ok(mismatches("cohomology.push_pull", bad))
    }));

    out.push(guarded(&mut t, "cohomology.graph_correspondence", || {
        let fm = FmTransform::new(r)?;
        let (src, tgt) = (fm.source(), fm.target());
        let (hp, xp) = (gen(tgt, "h′")?, gen(tgt, "ξ′")?);
        let fh = fm.graph_correspondence(&gen(src, "h")?)?;
        let fx = fm.graph_correspondence(&gen(src, "ξ")?)?;
        let mut bad = Vec::new();
        if fh != &xp - &hp {
            bad.push(format!("F(h) = {fh}"));
        }
        if fx != xp {
            bad.push(format!("F(ξ) = {fx}"));
        }
        Ok(mismatches("cohomology.graph_correspondence", bad))
    }));

    out.push(guarded(&mut t, "cohomology.segre", || {
        let pi = RingMap::bundle_projection(r)?;
        let (lp, pr) = (pi.target().clone(), pi.source().clone());
        let (xi, h) = (gen(&lp, "ξ")?, gen(&pr, "h")?);
        let mut bad = Vec::new();
        for k in 0..=r {
            let v = pi.pushforward(&xi.pow((r + 1 + k) as u32))?;
            let expect = h.pow(k as u32).scale(&Rat::binomial((r + k) as i64, k as i64));
            if v != expect {
                bad.push(format!("k={k}: {v}"));
            }
        }
        Ok(mismatches("cohomology.segre", bad))
    }));

    out.push(guarded(&mut t, "charclass.crepancy", || {
        let p = RingMap::blowup_p(r)?;
        let w = p.target().clone();
        let cw = RootBundle::tangent(&w)?.c1();
        let cp = p.pullback(&RootBundle::tangent(p.source())?.c1())?;
        let e = &(&gen(&w, "ζ")? - &gen(&w, "h₁")?) - &gen(&w, "h₂")?;
        let ok = cw == &cp - &e.scale(&Rat::from_int(r as i64));
        Ok(Check::exact("charclass.crepancy", ok, None))
    }));
    out
}

/// FM_H(ch 𝒪) = 1, rank and Euler pairing preservation, unimodularity.
pub fn fm_suite(r: usize) -> Vec<Check> {
    let mut t = Timer::default();
    let fm = match FmTransform::new(r) {
        Ok(f) => f,
        Err(e) => return vec![Check::failed_with("fm.construct", e)],
    };
    let src = fm.source().clone();
    let basis = KClass::basis(&src);
    let mut out = Vec::new();
    out.push(guarded(&mut t, "fm.structure_sheaf", || {
        let one = KClass::line_bundle(&src, 0, 0)?.ch();
        Ok(Check::exact(
            "fm.structure_sheaf",
            fm.apply(&one)? == CohClass::one(fm.target()),
            None,
        ))
    }));
    let images: Result<Vec<CohClass<Rat>>> = basis.iter().map(|e| fm.apply(&e.ch())).collect();
    let images = match images {
        Ok(i) => i,
        Err(e) => {
            out.push(Check::failed_with("fm.apply", e));
            return out;
        }
    };
    out.push(guarded(&mut t, "fm.rank", || {
        let bad = images
            .iter()
            .enumerate()
            .filter(|(_, c)| c.constant_term() != Rat::one())
            .map(|(i, c)| format!("basis {i}: rank {}", c.constant_term()))
            .collect();
        Ok(mismatches("fm.rank", bad))
    }));
    out.push(guarded(&mut t, "fm.euler_pairing", || {
        let mut bad = Vec::new();
        for (i, e) in basis.iter().enumerate() {
            for (j, f) in basis.iter().enumerate() {
                let before = euler_pairing_ch(&e.ch(), &f.ch())?;
                let after = euler_pairing_ch(&images[i], &images[j])?;
                if before != after {
                    bad.push(format!("({i},{j}): {before} -> {after}"));
                }
            }
        }
        Ok(mismatches("fm.euler_pairing", bad))
    }));
    out.push(guarded(&mut t, "fm.unimodular", || {
        let det = fm.matrix().det();
        let lat = fm.lattice_matrix()?;
        let ok = det.abs() == Rat::one() && lat.is_integral() && lat.det().abs() == Rat::one();
        Ok(Check::exact("fm.unimodular", ok, Some(format!("det = {det}"))))
    }));
    out
}

/// Gamma classes of ℙ¹ and ℙ² and multiplicativity on products.
pub fn gamma_suite() -> Vec<Check> {
    let mut t = Timer::default();
    let mut out = Vec::new();
    out.push(guarded(&mut t, "gamma.projective", || {
        let gamma = SymScalar::euler_gamma();
        let p1 = RingModel::proj(1);
        let h1 = gen(&p1, "h")?.to_sym();
        let e1 = &CohClass::one(&p1) + &h1.scale_by(&gamma.scale(&Rat::from_int(-2)));
        let p2 = RingModel::proj(2);
        let h2 = gen(&p2, "h")?.to_sym();
        let quad = &gamma.pow(2).scale(&Rat::new(9, 2)) + &SymScalar::zeta(2).scale(&Rat::new(3, 2));
        let e2 = &(&CohClass::one(&p2) + &h2.scale_by(&gamma.scale(&Rat::from_int(-3)))) + &h2.pow(2).scale_by(&quad);
        let g1 = RootBundle::tangent(&p1)?.gamma_class();
        let g2 = RootBundle::tangent(&p2)?.gamma_class();
        let mut bad = Vec::new();
        if g1 != e1 {
            bad.push(format!("Proj(1): {g1}"));
        }
        if g2 != e2 {
            bad.push(format!("Proj(2): {g2}"));
        }
        Ok(mismatches("gamma.projective", bad))
    }));
    for (a, b) in [(1, 1), (1, 2)] {
        let name = format!("gamma.kunneth[Proj({a})xProj({b})]");
        out.push(guarded(&mut t, &name.clone(), || {
            let (pa, pb) = (RingModel::proj(a), RingModel::proj(b));
            let prod = RingModel::product(&pa, &pb);
            let lhs = RootBundle::tangent(&prod)?.gamma_class();
            let rhs = boxtimes(
                &RootBundle::tangent(&pa)?.gamma_class(),
                &RootBundle::tangent(&pb)?.gamma_class(),
                &prod,
            )?;
            Ok(Check::exact(&name, lhs == rhs, None))
        }));
    }
    out
}

/// Exact operator, mirror-map, jet-closure and ξ-commutation checks.
pub fn qde_suite(r: usize, order: usize) -> Vec<Check> {
    let mut t = Timer::default();
    let lp = RingModel::local_p(r);
    let series = match ISeries::extremal(&lp, order) {
        Ok(s) => s,
        Err(e) => return vec![Check::failed_with("quantum.series", e)],
    };
    let sys = match JetSystem::new(&lp) {
        Ok(s) => s,
        Err(e) => return vec![Check::failed_with("quantum.system", e)],
    };
    let name = |what: &str| format!("quantum.{what}[r={r},D={order}]");
    vec![
        guarded(&mut t, &name("homogeneity"), || {
            series.check_homogeneity()?;
            Ok(Check::exact(name("homogeneity"), true, None))
        }),
        guarded(&mut t, &name("operator"), || {
            qde_operator_check(&series)?;
            Ok(Check::exact(name("operator"), true, None))
        }),
        guarded(&mut t, &name("mirror_map"), || {
            let bad = mirror_map_check(&series)
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(d, c)| format!("d={}: {c}", d + 1))
                .collect();
            Ok(mismatches(&name("mirror_map"), bad))
        }),
        guarded(&mut t, &name("jet_closure"), || {
            sys.jet_closure_check(&series)?;
            Ok(Check::exact(name("jet_closure"), true, None))
        }),
        t.stamp(Check::exact(name("xi_commutes"), sys.xi_commutes(), None)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_for_small_rank() {
        let all: Vec<Check> = grr_suite(2)
            .into_iter()
            .chain(intersection_suite(1, false))
            .chain(fm_suite(1))
            .chain(gamma_suite())
            .chain(qde_suite(1, 6))
            .collect();
        for c in &all {
            assert!(c.passed(), "{c:?}");
        }
    }

    #[test]
    fn corruption_is_named() {
        let checks = intersection_suite(1, true);
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed()).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].name, "cohomology.relations[LocalP(1)[corrupted]]");
    }
}
