//! Numeric suites: transport, 𝕌 extraction and the commutativity check.

use std::collections::BTreeMap;

use flopcheck_core::continuation::{
    apply_convention, extract_u, monodromy, numerical_rank, stack_jets, Convention, LocalSetup, PathSpec, UMatrix,
};
use flopcheck_core::fm::FmTransform;
use flopcheck_core::linalg::CMatrix;
use flopcheck_core::scalars::{Constants, Precision, Rat};
use flopcheck_core::theorem::{images, max_residual};
use flopcheck_core::Result;
use serde_json::{json, Value};

use crate::config::{Config, Tolerances};
use crate::report::{Check, Timer};

fn z_label(z: &Rat) -> String {
    z.to_string()
}

fn route(cfg: &Config) -> Result<PathSpec> {
    cfg.path_spec().map_err(|e| flopcheck_core::Error::Parse(e.to_string()))
}

pub fn setup(cfg: &Config, r: usize, z: &Rat, prec: Precision) -> Result<LocalSetup> {
    LocalSetup::new(r, &prec.rat(z), cfg.order, prec)
}

/// Within-disk transport against the series, null-loop and q = 0 loop
/// monodromies, and the rank report for the loop around the conifold point.
pub fn transport_suite(cfg: &Config, r: usize, z: &Rat) -> Vec<Check> {
    let tol = &cfg.tolerances;
    let mut t = Timer::default();
    let tag = format!("r={r},z={}", z_label(z));
    let s = match setup(cfg, r, z, cfg.precision()) {
        Ok(s) => s,
        Err(e) => return vec![Check::failed_with(format!("transport.setup[{tag}]"), e)],
    };
    let n = s.n();
    let id = CMatrix::identity(n, s.prec);
    let base = PathSpec::default_route().start().clone();
    let mut out = Vec::new();

    let name = format!("transport.series[{tag}]");
    let c = (|| -> Result<Check> {
        let seg = PathSpec::new(vec![(Rat::new(1, 5), Rat::zero()), (Rat::new(1, 2), Rat::zero())], 0)?;
        let moved = s.transport_from_start(&seg)?;
        let direct = stack_jets(&s.series.jets(&moved.q, &moved.log_q)?, s.prec);
        Ok(Check::below(&name, moved.state.rel_distance(&direct).to_f64(), tol.transport))
    })();
    out.push(t.stamp(c.unwrap_or_else(|e| Check::failed_with(&name, e))));

    let name = format!("transport.null_loop[{tag}]");
    let c = monodromy(&s, &PathSpec::null_loop())
        .map(|m| Check::below(&name, m.sub(&id).max_abs().to_f64(), tol.null_loop));
    out.push(t.stamp(c.unwrap_or_else(|e| Check::failed_with(&name, e))));

    let name = format!("transport.loop_zero[{tag}]");
    let c = monodromy(&s, &PathSpec::loop_around_zero(&base, true))
        .map(|m| Check::below(&name, m.sub(&s.monodromy_zero(1)).max_abs().to_f64(), tol.monodromy_zero));
    out.push(t.stamp(c.unwrap_or_else(|e| Check::failed_with(&name, e))));

    let name = format!("transport.loop_conifold[{tag}]");
    let c = monodromy(&s, &PathSpec::loop_around_conifold(&base, s.system.s())).map(|m| {
        let rank = numerical_rank(&m.sub(&id), 1e-20);
        Check::info(&name, Some(rank as f64), format!("rank(M - Id) = {rank} of {n}"))
    });
    out.push(t.stamp(c.unwrap_or_else(|e| Check::failed_with(&name, e))));
    out
}

/// Residual checks recorded with an extraction.
pub fn extraction_checks(u: &UMatrix, tol: &Tolerances, tag: &str) -> Vec<Check> {
    let res = &u.residuals;
    vec![
        Check::below(format!("u.stability[{tag}]"), res.stability.to_f64(), tol.stability),
        Check::below(format!("u.recheck[{tag}]"), res.recheck.to_f64(), tol.recheck),
        Check::above(format!("u.det[{tag}]"), res.det_abs.to_f64(), tol.det),
        Check::below(format!("u.xi_intertwining[{tag}]"), res.xi_intertwining.to_f64(), tol.intertwining),
        Check::info(
            format!("u.frame_condition[{tag}]"),
            Some(res.cond_p.to_f64().max(res.cond_p_prime.to_f64())),
            "largest frame condition number",
        ),
    ]
}

/// 𝕌 at `digits` and at digits + 40 along the configured route.
pub fn drift_check(cfg: &Config, r: usize, z: &Rat, lo: &UMatrix) -> Check {
    let name = format!("u.precision_drift[r={r},z={}]", z_label(z));
    let hi_prec = Precision::new(cfg.digits + 40);
    let res = (|| -> Result<f64> {
        let s = setup(cfg, r, z, hi_prec)?;
        let path = route(cfg)?;
        let hi = extract_u(&s, &path)?;
        Ok(hi.matrix.sub(&lo.matrix.with_precision(hi_prec)).max_abs().to_f64())
    })();
    match res {
        Ok(d) => Check::below(&name, d, cfg.tolerances.drift).with_detail(format!("{} vs {} digits", cfg.digits, cfg.digits + 40)),
        Err(e) => Check::failed_with(&name, e),
    }
}

/// Extraction, residual and drift checks for each configured z.
pub fn u_suite(cfg: &Config, r: usize) -> Vec<Check> {
    let mut t = Timer::default();
    let mut out = Vec::new();
    for z in &cfg.z {
        let tag = format!("r={r},z={}", z_label(z));
        let res = (|| -> Result<UMatrix> {
            let s = setup(cfg, r, z, cfg.precision())?;
            let path = route(cfg)?;
            extract_u(&s, &path)
        })();
        match res {
            Ok(u) => {
                let mut cs = extraction_checks(&u, &cfg.tolerances, &tag);
                cs.push(drift_check(cfg, r, z, &u));
                out.extend(cs.into_iter().map(|c| t.stamp(c)));
            }
            Err(e) => out.push(t.stamp(Check::failed_with(format!("u.extract[{tag}]"), e))),
        }
    }
    out
}

/// Outcome of the convention scan at one z.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub residuals: BTreeMap<String, f64>,
    /// Conventions grouped by equal 𝕌, in scan order.
    pub classes: Vec<Vec<Convention>>,
    pub passing: Vec<usize>,
}

impl ScanResult {
    pub fn to_json(&self) -> Value {
        let names = |c: &Vec<Convention>| c.iter().map(Convention::name).collect::<Vec<_>>();
        json!({
            "residuals": self.residuals,
            "classes": self.classes.iter().map(names).collect::<Vec<_>>(),
            "passing": self.passing.iter().map(|i| names(&self.classes[*i])).collect::<Vec<_>>(),
        })
    }
}

/// Evaluates every convention, groups those giving the same 𝕌 and marks
/// the classes meeting the commutativity tolerance.
pub fn scan(
    s: &LocalSetup,
    upper: &UMatrix,
    lower: &UMatrix,
    im: &flopcheck_core::theorem::Images,
    tol: f64,
) -> Result<(ScanResult, Vec<(Convention, UMatrix)>)> {
    let mut all = Vec::new();
    let mut residuals = BTreeMap::new();
    let mut classes: Vec<Vec<Convention>> = Vec::new();
    let mut reps: Vec<CMatrix> = Vec::new();
    for c in Convention::all() {
        let u = apply_convention(s, c, upper, Some(lower))?;
        let res = max_residual(&u.matrix, im).to_f64();
        residuals.insert(c.name(), res);
        match reps.iter().position(|m| u.matrix.rel_distance(m) < 1e-30) {
            Some(i) => classes[i].push(c),
            None => {
                reps.push(u.matrix.clone());
                classes.push(vec![c]);
            }
        }
        all.push((c, u));
    }
    let passing = classes
        .iter()
        .enumerate()
        .filter(|(_, cl)| residuals[&cl[0].name()] < tol)
        .map(|(i, _)| i)
        .collect();
    Ok((
        ScanResult {
            residuals,
            classes,
            passing,
        },
        all,
    ))
}

/// The 𝕌 used for the commutativity check at one z, and how it was chosen.
pub struct Selection {
    pub convention: Convention,
    pub aliases: Vec<Convention>,
    pub u: UMatrix,
    pub residual: f64,
    pub scan: Option<ScanResult>,
    pub upper: UMatrix,
}

/// Fixed convention if configured, else the default route when it passes,
/// else the unique passing class of the scan.
pub fn select(cfg: &Config, r: usize, z: &Rat, fm: &FmTransform, consts: &Constants) -> Result<Selection> {
    let prec = cfg.precision();
    let s = setup(cfg, r, z, prec)?;
    let path = route(cfg)?;
    let upper = extract_u(&s, &path)?;
    let im = images(fm, &prec.rat(z), consts)?;
    let tol = cfg.tolerances.commutativity;
    let fixed = cfg.convention().map_err(|e| flopcheck_core::Error::Parse(e.to_string()))?;
    if let Some(c) = fixed {
        let lower = if c == Convention::Lower {
            Some(extract_u(&s, &path.reflected())?)
        } else {
            None
        };
        let u = apply_convention(&s, c, &upper, lower.as_ref())?;
        let residual = max_residual(&u.matrix, &im).to_f64();
        return Ok(Selection {
            convention: c,
            aliases: vec![],
            u,
            residual,
            scan: None,
            upper,
        });
    }
    let lower = extract_u(&s, &path.reflected())?;
    let (scan, all) = scan(&s, &upper, &lower, &im, tol)?;
    let chosen = if scan.residuals[&Convention::Upper.name()] < tol {
        0
    } else if scan.passing.len() == 1 {
        scan.passing[0]
    } else {
        // no unique class: report the default, which fails
        0
    };
    let class = scan.classes[chosen].clone();
    // prefer a convention realized directly by a path deformation
    let convention = class
        .iter()
        .copied()
        .find(|c| matches!(c, Convention::Joint(_)))
        .unwrap_or(class[0]);
    let u = all.into_iter().find(|(c, _)| *c == convention).expect("scanned").1;
    let residual = scan.residuals[&convention.name()];
    Ok(Selection {
        convention,
        aliases: class.into_iter().filter(|c| *c != convention).collect(),
        u,
        residual,
        scan: Some(scan),
        upper,
    })
}

/// The commutativity check for every configured z, plus the extraction
/// residuals, the convention record and the z-dependence report.
pub fn verify(cfg: &Config, r: usize) -> (Vec<Check>, serde_json::Map<String, Value>) {
    let mut t = Timer::default();
    let mut out = Vec::new();
    let mut extra = serde_json::Map::new();
    let consts = Constants::new(cfg.precision());
    let fm = match FmTransform::new(r) {
        Ok(f) => f,
        Err(e) => return (vec![Check::failed_with("verify.fm", e)], extra),
    };
    let mut conventions = BTreeMap::new();
    let mut chosen: Vec<(Rat, Selection)> = Vec::new();
    for z in &cfg.z {
        let tag = format!("r={r},z={}", z_label(z));
        match select(cfg, r, z, &fm, &consts) {
            Ok(sel) => {
                out.extend(extraction_checks(&sel.upper, &cfg.tolerances, &tag).into_iter().map(|c| t.stamp(c)));
                if let Some(scan) = &sel.scan {
                    let default_ok = scan.residuals[&Convention::Upper.name()] < cfg.tolerances.commutativity;
                    let c = if default_ok {
                        Check::exact(format!("convention.scan[{tag}]"), true, Some("default route passes".into()))
                    } else {
                        Check::exact(
                            format!("convention.scan[{tag}]"),
                            scan.passing.len() == 1,
                            Some(format!("{} passing class(es)", scan.passing.len())),
                        )
                    };
                    out.push(t.stamp(c));
                }
                let detail = format!("convention {}", sel.convention);
                out.push(t.stamp(
                    Check::below(format!("main.commutativity[{tag}]"), sel.residual, cfg.tolerances.commutativity)
                        .with_detail(detail),
                ));
                conventions.insert(
                    z_label(z),
                    json!({
                        "selected": sel.convention.name(),
                        "aliases": sel.aliases.iter().map(Convention::name).collect::<Vec<_>>(),
                        "residual": sel.residual,
                        "scan": sel.scan.as_ref().map(ScanResult::to_json),
                    }),
                );
                chosen.push((z.clone(), sel));
            }
            Err(e) => out.push(t.stamp(Check::failed_with(format!("main.commutativity[{tag}]"), e))),
        }
    }
    if chosen.len() > 1 {
        let first = chosen[0].1.convention;
        let consistent = chosen.iter().all(|(_, s)| s.convention == first);
        out.push(Check::exact(
            format!("convention.consistent[r={r}]"),
            consistent,
            Some(first.name()),
        ));
        let (za, a) = &chosen[0];
        let (zb, b) = &chosen[1];
        let diff = a.u.matrix.sub(&b.u.matrix).max_abs().to_f64();
        out.push(Check::info(
            format!("u.z_dependence[r={r}]"),
            Some(diff),
            format!("max |U(z={}) - U(z={})|", z_label(za), z_label(zb)),
        ));
    }
    if let Some((_, s)) = chosen.first() {
        extra.insert("convention".into(), json!(s.convention.name()));
    }
    extra.insert("conventions".into(), Value::Object(conventions.into_iter().collect()));
    (out, extra)
}
