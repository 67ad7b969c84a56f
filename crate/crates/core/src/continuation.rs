//! Transport of I-function jets along q-paths, extraction of the
//! connection matrix 𝕌 and monodromy utilities.

use std::fmt;
use std::str::FromStr;

use rug::{Complex, Float};
use serde_json::{json, Value};

use crate::cohomology::RingModel;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quantum::{Frame, FrameRule, ISeries, JetSystem, NumericSeries};
use crate::scalars::{bigc_to_json, cabs, BigC, Precision, Rat};

/// Minimum distance between a path and a singular point.
pub const MIN_CLEARANCE: f64 = 0.1;

/// Taylor steps span at most this fraction of the distance to the nearest
/// singular point.
const STEP_FRACTION: f64 = 0.4;

const MAX_TAYLOR_TERMS: usize = 20_000;

/// Polygonal q-path with exact waypoints. The branch of log q at the first
/// waypoint is the principal value plus 2πi·sheet.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub waypoints: Vec<(Rat, Rat)>,
    pub sheet: i64,
}

fn pt(re: (i64, i64), im: (i64, i64)) -> (Rat, Rat) {
    (Rat::new(re.0, re.1), Rat::new(im.0, im.1))
}

impl PathSpec {
    pub fn new(waypoints: Vec<(Rat, Rat)>, sheet: i64) -> Result<PathSpec> {
        if waypoints.is_empty() {
            return Err(Error::Parse("path needs at least one waypoint".into()));
        }
        Ok(PathSpec { waypoints, sheet })
    }

    /// 0.4 → 0.4+1.2i → 2.5+1.2i → 2.5
    pub fn default_route() -> PathSpec {
        PathSpec {
            waypoints: vec![
                pt((2, 5), (0, 1)),
                pt((2, 5), (6, 5)),
                pt((5, 2), (6, 5)),
                pt((5, 2), (0, 1)),
            ],
            sheet: 0,
        }
    }

    /// Mirror image in the real axis.
    pub fn reflected(&self) -> PathSpec {
        PathSpec {
            waypoints: self.waypoints.iter().map(|(a, b)| (a.clone(), -b)).collect(),
            sheet: -self.sheet,
        }
    }

    pub fn reversed(&self) -> PathSpec {
        let mut w = self.waypoints.clone();
        w.reverse();
        PathSpec {
            waypoints: w,
            sheet: self.sheet,
        }
    }

    /// This path followed by `other`, which must start where this one ends.
    pub fn then(&self, other: &PathSpec) -> Result<PathSpec> {
        if self.waypoints.last() != other.waypoints.first() {
            return Err(Error::Parse("paths do not connect".into()));
        }
        let mut w = self.waypoints.clone();
        w.extend(other.waypoints.iter().skip(1).cloned());
        Ok(PathSpec {
            waypoints: w,
            sheet: self.sheet,
        })
    }

    pub fn start(&self) -> &(Rat, Rat) {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &(Rat, Rat) {
        self.waypoints.last().expect("nonempty path")
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// Square loop b → ib → −b → −ib → b around q = 0, counterclockwise
    /// when `ccw`.
    pub fn loop_around_zero(base: &(Rat, Rat), ccw: bool) -> PathSpec {
        let (x, y) = base.clone();
        let rot = |(a, b): &(Rat, Rat)| (-b, a.clone());
        let mut w = vec![(x, y)];
        for _ in 0..4 {
            let next = rot(w.last().unwrap());
            w.push(next);
        }
        let p = PathSpec { waypoints: w, sheet: 0 };
        if ccw {
            p
        } else {
            p.reversed()
        }
    }

    /// Counterclockwise lasso from `base` around the point s = ±1 only:
    /// out along Im q = 1/2, once around a square of half-width 1/2
    /// centred at s, and back.
    pub fn loop_around_conifold(base: &(Rat, Rat), s: i64) -> PathSpec {
        let half = Rat::new(1, 2);
        let sr = Rat::from_int(s);
        let c = |dx: i64, dy: i64| (&sr + &(&half * &Rat::from_int(dx)), &half * &Rat::from_int(dy));
        // corner nearest the base first, then counterclockwise
        let corners = if s > 0 {
            [c(-1, 1), c(-1, -1), c(1, -1), c(1, 1), c(-1, 1)]
        } else {
            [c(1, 1), c(-1, 1), c(-1, -1), c(1, -1), c(1, 1)]
        };
        let lift = (base.0.clone(), half.clone());
        let mut w = vec![base.clone(), lift.clone()];
        w.extend(corners.iter().cloned());
        w.push(lift);
        w.push(base.clone());
        PathSpec { waypoints: w, sheet: 0 }
    }

    /// 0.4 → 0.4+0.3i → 0.7+0.3i → 0.7 → 0.4
    pub fn null_loop() -> PathSpec {
        PathSpec {
            waypoints: vec![
                pt((2, 5), (0, 1)),
                pt((2, 5), (3, 10)),
                pt((7, 10), (3, 10)),
                pt((7, 10), (0, 1)),
                pt((2, 5), (0, 1)),
            ],
            sheet: 0,
        }
    }

    /// Rejects paths passing within [`MIN_CLEARANCE`] of 0 or s.
    pub fn validate(&self, s: i64) -> Result<()> {
        let pts: Vec<(f64, f64)> = self.waypoints.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect();
        for p in [(0.0, 0.0), (s as f64, 0.0)] {
            let mut best = f64::INFINITY;
            if pts.len() == 1 {
                best = (pts[0].0 - p.0).hypot(pts[0].1 - p.1);
            }
            for w in pts.windows(2) {
                best = best.min(segment_distance(w[0], w[1], p));
            }
            if best < MIN_CLEARANCE {
                return Err(Error::PathTooClose {
                    point: format!("{}", p.0),
                    distance: format!("{best:.3}"),
                });
            }
        }
        Ok(())
    }

    pub fn points(&self, prec: Precision) -> Vec<BigC> {
        self.waypoints.iter().map(|(a, b)| prec.complex_rat(a, b)).collect()
    }

    /// log q at the first waypoint.
    pub fn log_seed(&self, prec: Precision) -> BigC {
        let q0 = &self.points(prec)[0];
        let l = Complex::with_val(prec.bits(), q0.ln_ref());
        l + Complex::with_val(prec.bits(), prec.two_pi_i() * self.sheet)
    }

    /// {"waypoints": [["re", "im"], …], "sheet": k}
    pub fn to_json(&self) -> Value {
        json!({
            "waypoints": self.waypoints.iter()
                .map(|(a, b)| json!([a.to_pq_string(), b.to_pq_string()]))
                .collect::<Vec<_>>(),
            "sheet": self.sheet,
        })
    }

    pub fn from_json(v: &Value) -> Result<PathSpec> {
        let num = |x: &Value| -> Result<Rat> {
            match x {
                Value::String(s) => Rat::from_str(s).map_err(|e| Error::Parse(format!("{s}: {e}"))),
                Value::Number(n) => Rat::from_str(&n.to_string()).map_err(|e| Error::Parse(format!("{n}: {e}"))),
                _ => Err(Error::Parse(format!("not a number: {x}"))),
            }
        };
        let wps = v
            .get("waypoints")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing waypoints".into()))?;
        let mut w = Vec::with_capacity(wps.len());
        for p in wps {
            let pair = p
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Parse(format!("waypoint must be [re, im]: {p}")))?;
            w.push((num(&pair[0])?, num(&pair[1])?));
        }
        let sheet = v.get("sheet").and_then(Value::as_i64).unwrap_or(0);
        PathSpec::new(w, sheet)
    }
}

impl fmt::Display for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .waypoints
            .iter()
            .map(|(a, b)| format!("{}{:+}i", a.to_f64(), b.to_f64()))
            .collect();
        write!(f, "{}", parts.join(" -> "))
    }
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (a.0 + t * dx - p.0).hypot(a.1 + t * dy - p.1)
}

/// Integrates z q(1 − s q) g′ = ((1 − s q)N₀ + q B) g by Taylor series
/// in q − q_c at working precision.
#[derive(Clone, Debug)]
pub struct Transporter {
    s: i64,
    z0: BigC,
    prec: Precision,
    n0: CMatrix,
    b: CMatrix,
}

/// Result of a transport: final state, endpoint and continued log q.
#[derive(Clone, Debug)]
pub struct Transported {
    pub state: CMatrix,
    pub q: BigC,
    pub log_q: BigC,
    pub steps: usize,
}

impl Transporter {
    pub fn new(sys: &JetSystem, z0: &BigC, prec: Precision) -> Transporter {
        let (n0, b) = sys.numeric(prec);
        Transporter {
            s: sys.s(),
            z0: Complex::with_val(prec.bits(), z0),
            prec,
            n0,
            b,
        }
    }

    fn clearance(&self, q: &BigC) -> Float {
        let bits = self.prec.bits();
        let d0 = cabs(q);
        let d1 = cabs(&Complex::with_val(bits, q - self.s));
        if d0 < d1 {
            d0
        } else {
            d1
        }
    }

    /// One Taylor step from qc by delta.
    fn step(&self, state: &CMatrix, qc: &BigC, delta: &BigC) -> Result<CMatrix> {
        let bits = self.prec.bits();
        let prec = self.prec;
        let s = Complex::with_val(bits, self.s);
        let one_m_sq = Complex::with_val(bits, 1 - Complex::with_val(bits, &s * qc));
        let p0 = Complex::with_val(bits, &one_m_sq * qc);
        let p1 = Complex::with_val(bits, 1 - Complex::with_val(bits, &s * qc) * 2u32);
        let p2 = Complex::with_val(bits, -&s);
        let zinv = Complex::with_val(bits, self.z0.recip_ref());
        let m0 = self
            .n0
            .scale(&Complex::with_val(bits, &one_m_sq * &zinv))
            .add(&self.b.scale(&Complex::with_val(bits, qc * &zinv)));
        let m1 = self
            .n0
            .scale(&Complex::with_val(bits, &p2 * &zinv))
            .add(&self.b.scale(&zinv));
        let delta2 = Complex::with_val(bits, delta.square_ref());
        let eps = prec.epsilon() * Float::with_val(bits, 1e-5);
        let mut prev = CMatrix::zeros(state.rows(), state.cols(), prec);
        let mut cur = state.clone();
        let mut sum = state.clone();
        let mut small = 0;
        for n in 0..MAX_TAYLOR_TERMS {
            let nn = Complex::with_val(bits, n as u32);
            // Δ(M0/z − p1 n) y_n + Δ²(M1/z − p2 (n−1)) y_{n−1}
            let mut a = m0.mul(&cur).sub(&cur.scale(&Complex::with_val(bits, &p1 * &nn)));
            a = a.scale(delta);
            if n > 0 {
                let nm1 = Complex::with_val(bits, (n - 1) as u32);
                let b = m1.mul(&prev).sub(&prev.scale(&Complex::with_val(bits, &p2 * &nm1)));
                a = a.add(&b.scale(&delta2));
            }
            let den = Complex::with_val(bits, &p0 * (n as u32 + 1));
            let next = a.scale(&Complex::with_val(bits, den.recip_ref()));
            sum = sum.add(&next);
            let size = next.max_abs();
            let bound = Float::with_val(bits, &eps * &sum.max_abs());
            if n >= 8 && size <= bound {
                small += 1;
                if small >= 3 {
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
            prev = cur;
            cur = next;
        }
        Err(Error::StepUnderflow(format!("{}", qc.to_string_radix(10, Some(8)))))
    }

    /// Transports a state with (r+1)N rows along the path, continuing
    /// log q from `log_start`.
    pub fn transport(&self, state: &CMatrix, path: &PathSpec, log_start: &BigC) -> Result<Transported> {
        path.validate(self.s)?;
        let bits = self.prec.bits();
        let pts = path.points(self.prec);
        let mut q = pts[0].clone();
        let mut log_q = Complex::with_val(bits, log_start);
        let mut state = state.clone();
        let mut steps = 0;
        let min_step = Float::with_val(bits, 1e-8);
        for target in &pts[1..] {
            loop {
                let rest = Complex::with_val(bits, target - &q);
                let remaining = cabs(&rest);
                if remaining.is_zero() {
                    break;
                }
                let reach = self.clearance(&q) * STEP_FRACTION;
                if reach < min_step {
                    return Err(Error::StepUnderflow(q.to_string_radix(10, Some(8))));
                }
                let last = remaining <= reach;
                let delta = if last {
                    rest
                } else {
                    Complex::with_val(bits, &rest * Float::with_val(bits, &reach / &remaining))
                };
                state = self.step(&state, &q, &delta)?;
                let q_new = if last {
                    target.clone()
                } else {
                    Complex::with_val(bits, &q + &delta)
                };
                let ratio = Complex::with_val(bits, &q_new / &q);
                log_q += Complex::with_val(bits, ratio.ln_ref());
                q = q_new;
                steps += 1;
                if last {
                    break;
                }
            }
        }
        Ok(Transported { state, q, log_q, steps })
    }
}

/// Stacks jets g_0, …, g_r into a single column.
pub fn stack_jets(jets: &[Vec<BigC>], prec: Precision) -> CMatrix {
    let col: Vec<BigC> = jets.iter().flatten().cloned().collect();
    CMatrix::from_columns(&[col], prec)
}

pub fn unstack_jets(state: &CMatrix, n: usize) -> Vec<Vec<BigC>> {
    let col = state.column(0);
    col.chunks(n).map(<[BigC]>::to_vec).collect()
}

/// Both sides of the flop at one evaluation point z0.
#[derive(Clone, Debug)]
pub struct LocalSetup {
    pub r: usize,
    pub prec: Precision,
    pub z0: BigC,
    pub system: JetSystem,
    pub series: NumericSeries,
    pub series_prime: NumericSeries,
    pub transporter: Transporter,
}

impl LocalSetup {
    pub fn new(r: usize, z0: &BigC, order: usize, prec: Precision) -> Result<LocalSetup> {
        let p = RingModel::local_p(r);
        let pp = RingModel::local_p_prime(r);
        let system = JetSystem::new(&p)?;
        let series = NumericSeries::new(&ISeries::extremal(&p, order)?, z0, prec)?;
        let series_prime = NumericSeries::new(&ISeries::extremal(&pp, order)?, z0, prec)?;
        let transporter = Transporter::new(&system, z0, prec);
        Ok(LocalSetup {
            r,
            prec,
            z0: Complex::with_val(prec.bits(), z0),
            system,
            series,
            series_prime,
            transporter,
        })
    }

    pub fn n(&self) -> usize {
        self.series.ring().rank()
    }

    /// e^{2πi h/z}: the action of a counterclockwise loop around q = 0.
    pub fn monodromy_zero(&self, power: i64) -> CMatrix {
        let c = Complex::with_val(self.prec.bits(), self.prec.two_pi_i() * power / &self.z0);
        self.series.h_matrix().scale(&c).exp_nilpotent()
    }

    /// e^{2πi(ξ′ − h′)/z}: the loop around q′ = 0 seen from the P′ side.
    pub fn monodromy_infinity(&self, power: i64) -> CMatrix {
        let c = Complex::with_val(self.prec.bits(), self.prec.two_pi_i() * power / &self.z0);
        let m = self.series_prime.xi_matrix().sub(self.series_prime.h_matrix());
        m.scale(&c).exp_nilpotent()
    }

    /// Jets at the start of `path` transported to its end.
    pub fn transport_from_start(&self, path: &PathSpec) -> Result<Transported> {
        let pts = path.points(self.prec);
        let log0 = path.log_seed(self.prec);
        let jets = self.series.jets(&pts[0], &log0)?;
        self.transporter.transport(&stack_jets(&jets, self.prec), path, &log0)
    }

    /// 𝕌 from transported jets at q with continued log ℓ:
    /// e^{ℓξ′/z} C̃′(1/q; −ℓ) C_P^{-1}.
    fn u_at(&self, jets: &[Vec<BigC>], q: &BigC, log_q: &BigC) -> Result<(CMatrix, Float, Float)> {
        let cp = Frame::from_jets(self.series.ring(), self.series.xi_matrix(), jets, FrameRule::Plain, self.prec)?;
        let (target, cond) = self.flopped_target(q, log_q)?;
        Ok((target.right_divide(&cp.matrix)?, cp.condition, cond))
    }

    /// e^{ℓξ′/z}·C̃′(1/q; −ℓ) and its frame condition number.
    fn flopped_target(&self, q: &BigC, log_q: &BigC) -> Result<(CMatrix, Float)> {
        let bits = self.prec.bits();
        let qp = Complex::with_val(bits, q.recip_ref());
        let lp = Complex::with_val(bits, -log_q);
        let f = self.series_prime.frame(&qp, &lp, FrameRule::Flopped)?;
        let c = Complex::with_val(bits, log_q / &self.z0);
        let e = self.series_prime.xi_matrix().scale(&c).exp_nilpotent();
        Ok((e.mul(&f.matrix), f.condition))
    }
}

/// Residual metadata recorded with an extracted 𝕌.
#[derive(Clone, Debug)]
pub struct UResiduals {
    /// max |𝕌(q1) − 𝕌(7q1/5)| entrywise
    pub stability: Float,
    /// relative intertwining residual at 6q1/5
    pub recheck: Float,
    pub det_abs: Float,
    /// max |𝕌ξ − ξ′𝕌| entrywise
    pub xi_intertwining: Float,
    pub cond_p: Float,
    pub cond_p_prime: Float,
}

#[derive(Clone, Debug)]
pub struct UMatrix {
    pub r: usize,
    pub z0: BigC,
    pub path: PathSpec,
    pub matrix: CMatrix,
    pub residuals: UResiduals,
    pub steps: usize,
}

impl UMatrix {
    pub fn to_json(&self) -> Value {
        let d = self.matrix.precision().digits;
        let rows: Vec<Value> = (0..self.matrix.rows())
            .map(|i| {
                Value::Array(
                    (0..self.matrix.cols())
                        .map(|j| bigc_to_json(&self.matrix[(i, j)], d))
                        .collect(),
                )
            })
            .collect();
        let f = |x: &Float| json!(x.to_f64());
        json!({
            "schema": crate::SCHEMA,
            "r": self.r,
            "z0": bigc_to_json(&self.z0, d),
            "path": self.path.to_json(),
            "matrix": rows,
            "residuals": {
                "stability": f(&self.residuals.stability),
                "recheck": f(&self.residuals.recheck),
                "det_abs": f(&self.residuals.det_abs),
                "xi_intertwining": f(&self.residuals.xi_intertwining),
                "cond_p": f(&self.residuals.cond_p),
                "cond_p_prime": f(&self.residuals.cond_p_prime),
            },
        })
    }

    /// The same data with the matrix replaced.
    pub fn with_matrix(&self, matrix: CMatrix) -> UMatrix {
        UMatrix {
            matrix,
            ..self.clone()
        }
    }
}

/// Extracts 𝕌 along `path`, which must start inside and end outside the
/// unit disk. Re-checks on the radial extension to 6q1/5 and 7q1/5.
pub fn extract_u(setup: &LocalSetup, path: &PathSpec) -> Result<UMatrix> {
    let prec = setup.prec;
    let bits = prec.bits();
    let n = setup.n();
    let end = path.end().clone();
    let pts = path.points(prec);
    if cabs(&pts[0]) >= 1 || cabs(pts.last().unwrap()) <= 1 {
        return Err(Error::Unsupported("path must run from |q| < 1 to |q| > 1".into()));
    }
    let t1 = setup.transport_from_start(path)?;
    let jets1 = unstack_jets(&t1.state, n);
    let (u, cond_p, cond_pp) = setup.u_at(&jets1, &t1.q, &t1.log_q)?;

    let scaled = |f: (i64, i64)| {
        let k = Rat::new(f.0, f.1);
        (&end.0 * &k, &end.1 * &k)
    };
    let ext = PathSpec::new(vec![end.clone(), scaled((6, 5)), scaled((7, 5))], 0)?;
    let first = PathSpec::new(ext.waypoints[..2].to_vec(), 0)?;
    let second = PathSpec::new(ext.waypoints[1..].to_vec(), 0)?;
    let t2 = setup.transporter.transport(&t1.state, &first, &t1.log_q)?;
    let t3 = setup.transporter.transport(&t2.state, &second, &t2.log_q)?;

    let jets2 = unstack_jets(&t2.state, n);
    let cp2 = Frame::from_jets(setup.series.ring(), setup.series.xi_matrix(), &jets2, FrameRule::Plain, prec)?;
    let (target2, _) = setup.flopped_target(&t2.q, &t2.log_q)?;
    let recheck = u.mul(&cp2.matrix).rel_distance(&target2);

    let jets3 = unstack_jets(&t3.state, n);
    let (u3, _, _) = setup.u_at(&jets3, &t3.q, &t3.log_q)?;
    let stability = u.sub(&u3).max_abs();

    let xi = setup.series.xi_matrix();
    let xi_p = setup.series_prime.xi_matrix();
    let xi_intertwining = u.mul(xi).sub(&xi_p.mul(&u)).max_abs();
    let det_abs = cabs(&u.det());
    if det_abs < Float::with_val(bits, 1e-30) {
        return Err(Error::IllConditioned(format!("|det U| = {}", det_abs.to_f64())));
    }
    Ok(UMatrix {
        r: setup.r,
        z0: setup.z0.clone(),
        path: path.clone(),
        matrix: u,
        residuals: UResiduals {
            stability,
            recheck,
            det_abs,
            xi_intertwining,
            cond_p,
            cond_p_prime: cond_pp,
        },
        steps: t1.steps + t2.steps + t3.steps,
    })
}

/// Frame-conjugated monodromy C_P(after)·C_P(before)^{-1} of a closed loop.
pub fn monodromy(setup: &LocalSetup, path: &PathSpec) -> Result<CMatrix> {
    if !path.is_closed() {
        return Err(Error::Parse("monodromy needs a closed loop".into()));
    }
    let prec = setup.prec;
    let n = setup.n();
    let pts = path.points(prec);
    let log0 = path.log_seed(prec);
    let jets0 = setup.series.jets(&pts[0], &log0)?;
    let t = setup.transporter.transport(&stack_jets(&jets0, prec), path, &log0)?;
    let jets1 = unstack_jets(&t.state, n);
    let ring = setup.series.ring();
    let xi = setup.series.xi_matrix();
    let before = Frame::from_jets(ring, xi, &jets0, FrameRule::Plain, prec)?;
    let after = Frame::from_jets(ring, xi, &jets1, FrameRule::Plain, prec)?;
    after.matrix.right_divide(&before.matrix)
}

/// Rank by Gaussian elimination with full pivoting, treating pivots below
/// tol·max|A| as zero.
pub fn numerical_rank(m: &CMatrix, tol: f64) -> usize {
    let bits = m.precision().bits();
    let mut a = m.clone();
    let cutoff = m.max_abs() * Float::with_val(bits, tol);
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut used_cols = vec![false; cols];
    let mut used_rows = vec![false; rows];
    loop {
        let mut best: Option<(usize, usize, Float)> = None;
        for i in (0..rows).filter(|i| !used_rows[*i]) {
            for j in (0..cols).filter(|j| !used_cols[*j]) {
                let v = cabs(&a[(i, j)]);
                if best.as_ref().map_or(true, |b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        if v <= cutoff || v.is_zero() {
            break;
        }
        used_rows[pi] = true;
        used_cols[pj] = true;
        rank += 1;
        let inv = Complex::with_val(bits, a[(pi, pj)].recip_ref());
        for i in (0..rows).filter(|i| !used_rows[*i]) {
            let f = Complex::with_val(bits, &a[(i, pj)] * &inv);
            for j in 0..cols {
                let d = Complex::with_val(bits, &f * &a[(pi, j)]);
                a[(i, j)] -= d;
            }
        }
    }
    rank
}

/// Alternative path/branch conventions for 𝕌.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    /// the default upper-half-plane route
    Upper,
    /// the route reflected into the lower half-plane
    Lower,
    /// 𝕌·M₀^k
    LoopZero(i8),
    /// M_∞^k·𝕌
    LoopInfinity(i8),
    /// M_∞^k·𝕌·M₀^{−k}: the upper route preceded by k loops around q = 0
    Joint(i8),
}

impl Convention {
    pub fn all() -> [Convention; 8] {
        [
            Convention::Upper,
            Convention::Lower,
            Convention::LoopZero(1),
            Convention::LoopZero(-1),
            Convention::LoopInfinity(1),
            Convention::LoopInfinity(-1),
            Convention::Joint(1),
            Convention::Joint(-1),
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Convention::Upper => "upper".into(),
            Convention::Lower => "lower".into(),
            Convention::LoopZero(k) => format!("upper*M0^{k}"),
            Convention::LoopInfinity(k) => format!("Minf^{k}*upper"),
            Convention::Joint(k) => format!("Minf^{k}*upper*M0^{}", -k),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Convention::all()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown convention `{s}`")))
    }
}

/// 𝕌 under a convention, given the upper-route extraction (and the lower
/// one when needed).
pub fn apply_convention(setup: &LocalSetup, conv: Convention, upper: &UMatrix, lower: Option<&UMatrix>) -> Result<UMatrix> {
    let u = &upper.matrix;
    let m = match conv {
        Convention::Upper => u.clone(),
        Convention::Lower => {
            return lower
                .cloned()
                .ok_or_else(|| Error::Unsupported("lower route not extracted".into()))
        }
        Convention::LoopZero(k) => u.mul(&setup.monodromy_zero(k as i64)),
        Convention::LoopInfinity(k) => setup.monodromy_infinity(k as i64).mul(u),
        Convention::Joint(k) => setup
            .monodromy_infinity(k as i64)
            .mul(u)
            .mul(&setup.monodromy_zero(-(k as i64))),
    };
    Ok(upper.with_matrix(m))
}

/// The upper route preceded by |k| loops around q = 0 (counterclockwise for
/// k > 0); its 𝕌 realizes `Convention::Joint(k)`.
pub fn joint_path(route: &PathSpec, k: i64) -> Result<PathSpec> {
    let mut p = PathSpec::new(vec![route.start().clone()], route.sheet)?;
    for _ in 0..k.unsigned_abs() {
        p = p.then(&PathSpec::loop_around_zero(route.start(), k > 0))?;
    }
    let mut out = p.then(route)?;
    out.sheet = route.sheet;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(r: usize, digits: u32) -> LocalSetup {
        let prec = Precision::new(digits);
        LocalSetup::new(r, &prec.one(), 24, prec).unwrap()
    }

    #[test]
    fn path_validation() {
        assert!(PathSpec::default_route().validate(1).is_ok());
        assert!(PathSpec::default_route().validate(-1).is_ok());
        let bad = PathSpec::new(vec![pt((2, 5), (0, 1)), pt((2, 1), (0, 1))], 0).unwrap();
        assert!(matches!(bad.validate(1), Err(Error::PathTooClose { .. })));
        for s in [1, -1] {
            PathSpec::loop_around_conifold(PathSpec::default_route().start(), s)
                .validate(s)
                .unwrap();
        }
        let p = PathSpec::default_route();
        assert_eq!(PathSpec::from_json(&p.to_json()).unwrap(), p);
        let z = PathSpec::loop_around_zero(p.start(), true);
        assert!(z.is_closed());
        assert_eq!(z.waypoints[1], pt((0, 1), (2, 5)));
    }

    #[test]
    fn zero_length_path_is_identity() {
        let s = setup(1, 40);
        let start = PathSpec::default_route().start().clone();
        let p = PathSpec::new(vec![start.clone(), start], 0).unwrap();
        let id = CMatrix::identity(2 * s.n(), s.prec);
        let t = s.transporter.transport(&id, &p, &s.prec.zero()).unwrap();
        assert_eq!(t.state, id);
        assert_eq!(t.steps, 0);
    }

    #[test]
    fn transport_matches_series_inside_disk() {
        let s = setup(1, 60);
        let prec = s.prec;
        let p = PathSpec::new(vec![pt((1, 5), (0, 1)), pt((1, 2), (0, 1))], 0).unwrap();
        let t = s.transport_from_start(&p).unwrap();
        let direct = s.series.jets(&t.q, &t.log_q).unwrap();
        let direct = stack_jets(&direct, prec);
        assert!(t.state.rel_distance(&direct) < 1e-30);
    }

    #[test]
    fn transport_is_multiplicative() {
        let s = setup(1, 40);
        let prec = s.prec;
        let a = PathSpec::new(vec![pt((2, 5), (0, 1)), pt((2, 5), (1, 2)), pt((-1, 2), (1, 2))], 0).unwrap();
        let b = PathSpec::new(vec![pt((-1, 2), (1, 2)), pt((-1, 2), (-1, 2))], 0).unwrap();
        let id = CMatrix::identity(2 * s.n(), prec);
        let ta = s.transporter.transport(&id, &a, &prec.zero()).unwrap();
        let tb = s.transporter.transport(&id, &b, &prec.zero()).unwrap();
        let tab = s.transporter.transport(&id, &a.then(&b).unwrap(), &prec.zero()).unwrap();
        assert!(tab.state.rel_distance(&tb.state.mul(&ta.state)) < 1e-20);
    }

    #[test]
    fn monodromies() {
        for r in 1..=2 {
            let s = setup(r, 50);
            let id = CMatrix::identity(s.n(), s.prec);
            let null = monodromy(&s, &PathSpec::null_loop()).unwrap();
            assert!(null.sub(&id).max_abs() < 1e-25);
            let base = PathSpec::default_route().start().clone();
            let m0 = monodromy(&s, &PathSpec::loop_around_zero(&base, true)).unwrap();
            assert!(m0.sub(&s.monodromy_zero(1)).max_abs() < 1e-20);
            let ms = monodromy(&s, &PathSpec::loop_around_conifold(&base, s.system.s())).unwrap();
            let rank = numerical_rank(&ms.sub(&id), 1e-20);
            assert!(rank >= 1 && rank < s.n(), "rank {rank}");
        }
    }

    #[test]
    fn numerical_rank_basics() {
        let prec = Precision::new(30);
        let mut m = CMatrix::identity(3, prec);
        assert_eq!(numerical_rank(&m, 1e-20), 3);
        m[(2, 2)] = prec.zero();
        assert_eq!(numerical_rank(&m, 1e-20), 2);
        assert_eq!(numerical_rank(&CMatrix::zeros(2, 2, prec), 1e-20), 0);
    }

    #[test]
    fn convention_names_round_trip() {
        for c in Convention::all() {
            assert_eq!(c.name().parse::<Convention>().unwrap(), c);
        }
    }
}
