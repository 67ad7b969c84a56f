use flopcheck_core::continuation::{apply_convention, extract_u, joint_path, Convention, LocalSetup, PathSpec};
use flopcheck_core::fm::FmTransform;
use flopcheck_core::linalg::CMatrix;
use flopcheck_core::scalars::{cabs, Constants, Precision};
use flopcheck_core::theorem::{images, max_residual};

fn setup(r: usize, z: f64, digits: u32) -> LocalSetup {
    let prec = Precision::new(digits);
    LocalSetup::new(r, &prec.real(z), 24, prec).unwrap()
}

#[test]
fn extraction_residuals() {
    for r in 1..=2 {
        let s = setup(r, 1.0, 60);
        let u = extract_u(&s, &PathSpec::default_route()).unwrap();
        let res = &u.residuals;
        assert!(res.stability < 1e-12);
        assert!(res.recheck < 1e-12);
        assert!(res.det_abs > 1e-10);
        assert!(res.xi_intertwining < 1e-10);
        assert_eq!(u.matrix.rows(), s.n());
    }
}

#[test]
fn path_functoriality() {
    let s = setup(1, 1.0, 60);
    let route = PathSpec::default_route();
    let upper = extract_u(&s, &route).unwrap();
    for k in [-1, 1] {
        let deformed = extract_u(&s, &joint_path(&route, k).unwrap()).unwrap();
        let predicted = apply_convention(&s, Convention::Joint(k as i8), &upper, None).unwrap();
        assert!(deformed.matrix.sub(&predicted.matrix).max_abs() < 1e-10);
    }
}

#[test]
fn precision_doubling() {
    let lo = extract_u(&setup(1, 1.0, 60), &PathSpec::default_route()).unwrap();
    let hi = extract_u(&setup(1, 1.0, 100), &PathSpec::default_route()).unwrap();
    let drift = hi.matrix.sub(&lo.matrix.with_precision(hi.matrix.precision())).max_abs();
    assert!(drift < 1e-40);
}

#[test]
fn exactly_one_convention_class_commutes() {
    let prec = Precision::new(60);
    let consts = Constants::new(prec);
    let fm = FmTransform::new(1).unwrap();
    let s = setup(1, 1.0, 60);
    let upper = extract_u(&s, &PathSpec::default_route()).unwrap();
    let lower = extract_u(&s, &PathSpec::default_route().reflected()).unwrap();
    let im = images(&fm, &prec.one(), &consts).unwrap();
    let passing: Vec<(Convention, CMatrix)> = Convention::all()
        .into_iter()
        .map(|c| (c, apply_convention(&s, c, &upper, Some(&lower)).unwrap().matrix))
        .filter(|(_, u)| max_residual(u, &im) < 1e-8)
        .collect();
    assert!(!passing.is_empty());
    let rep = &passing[0].1;
    assert!(passing.iter().all(|(_, u)| u.rel_distance(rep) < 1e-20));
    assert!(passing.iter().any(|(c, _)| *c == Convention::Joint(-1)));
    assert!(cabs(&rep.det()) > 1e-10);
}
