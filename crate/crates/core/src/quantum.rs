//! The extremal I-function of the local models, its differential operator,
//! the companion jet system and numeric solution frames.

use std::collections::BTreeMap;
use std::sync::Arc;

use rug::ops::NegAssign;
use rug::{Complex, Float};
use serde_json::{json, Value};

use crate::cohomology::{CohClass, RingKind, RingModel};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RatMatrix};
use crate::scalars::{cabs, BigC, Precision, Rat};

/// Class-valued Laurent polynomial in z, keyed by the z-exponent.
pub type ZLaurent = BTreeMap<i64, CohClass<Rat>>;

fn local_rank(ring: &RingModel) -> Result<usize> {
    match ring.kind() {
        RingKind::LocalP { r, .. } => Ok(*r),
        _ => Err(Error::Unsupported(format!("{} is not a local model", ring.name()))),
    }
}

fn gens(ring: &Arc<RingModel>) -> (CohClass<Rat>, CohClass<Rat>) {
    let g = ring.generators();
    (
        CohClass::generator(ring, &g[0]).expect("first generator"),
        CohClass::generator(ring, &g[1]).expect("second generator"),
    )
}

fn push_term(out: &mut ZLaurent, zpow: i64, class: CohClass<Rat>) {
    if class.is_zero() {
        return;
    }
    let merged = match out.remove(&zpow) {
        Some(old) => &old + &class,
        None => class,
    };
    if !merged.is_zero() {
        out.insert(zpow, merged);
    }
}

/// a·(c + t z)
fn mul_linear(a: &ZLaurent, c: &CohClass<Rat>, t: &Rat) -> ZLaurent {
    let mut out = ZLaurent::new();
    for (p, x) in a {
        push_term(&mut out, *p, x * c);
        if !t.is_zero() {
            push_term(&mut out, p + 1, x.scale(t));
        }
    }
    out
}

/// a·(c + t z)^{-1} for nilpotent c and t ≠ 0.
fn div_linear(a: &ZLaurent, c: &CohClass<Rat>, t: &Rat) -> ZLaurent {
    let dim = c.ring().dim() as i64;
    let tinv = Rat::one() / t;
    let mut out = ZLaurent::new();
    for (p, x) in a {
        let mut term = x.scale(&tinv);
        for k in 0..=dim {
            if term.is_zero() {
                break;
            }
            push_term(&mut out, p - k - 1, term.clone());
            term = (&term * c).scale(&(-&tinv));
        }
    }
    out
}

fn sub_laurent(a: &ZLaurent, b: &ZLaurent) -> ZLaurent {
    let mut out = a.clone();
    for (p, x) in b {
        push_term(&mut out, *p, -x);
    }
    out
}

fn laurent_json(a: &ZLaurent) -> Value {
    Value::Array(
        a.iter()
            .map(|(p, c)| json!({"zpow": p, "class": c.to_json()}))
            .collect(),
    )
}

/// Ĩ(q, z) = Σ_d q^d a_d(z) truncated at order D, with exact coefficients.
#[derive(Clone, Debug)]
pub struct ISeries {
    ring: Arc<RingModel>,
    r: usize,
    coeffs: Vec<ZLaurent>,
    /// Whether evaluation multiplies by q^{h/z}.
    prefactor: bool,
}

impl ISeries {
    /// a_d = [∏_{m=1}^{d}(h+mz)]^{−(r+1)} [∏_{m=0}^{d−1}(ξ−h−mz)]^{r+1}.
    pub fn extremal(ring: &Arc<RingModel>, order: usize) -> Result<ISeries> {
        let r = local_rank(ring)?;
        if order < 1 {
            return Err(Error::Unsupported("truncation order must be at least 1".into()));
        }
        let (h, xi) = gens(ring);
        let xmh = &xi - &h;
        let mut coeffs = Vec::with_capacity(order + 1);
        for d in 0..=order {
            let mut a = ZLaurent::new();
            a.insert(0, CohClass::one(ring));
            for m in 0..d as i64 {
                for _ in 0..=r {
                    a = mul_linear(&a, &xmh, &Rat::from_int(-m));
                }
            }
            for m in 1..=d as i64 {
                for _ in 0..=r {
                    a = div_linear(&a, &h, &Rat::from_int(m));
                }
            }
            coeffs.push(a);
        }
        Ok(ISeries {
            ring: ring.clone(),
            r,
            coeffs,
            prefactor: true,
        })
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn has_prefactor(&self) -> bool {
        self.prefactor
    }

    pub fn without_prefactor(mut self) -> Self {
        self.prefactor = false;
        self
    }

    pub fn coefficient(&self, d: usize) -> &ZLaurent {
        &self.coeffs[d]
    }

    /// A copy with the order-d coefficient negated.
    pub fn with_negated_term(&self, d: usize) -> ISeries {
        let mut out = self.clone();
        out.coeffs[d] = out.coeffs[d].iter().map(|(p, c)| (*p, -c)).collect();
        out
    }

    /// Every stored term z^p·φ has φ of pure complex degree −p.
    pub fn check_homogeneity(&self) -> Result<()> {
        for (d, a) in self.coeffs.iter().enumerate() {
            for (p, c) in a {
                if c.degrees() != vec![(-p) as usize] || *p > 0 {
                    return Err(Error::Unsupported(format!("inhomogeneous term at q^{d}, z^{p}")));
                }
            }
        }
        Ok(())
    }

    /// [{"d": d, "terms": [{"zpow", "class"}]}]
    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::SCHEMA,
            "ring": self.ring.name(),
            "order": self.order(),
            "prefactor": self.prefactor,
            "coefficients": self.coeffs.iter().enumerate()
                .map(|(d, a)| json!({"d": d, "terms": laurent_json(a)}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Verifies L(q^{h/z}Ĩ) = 0 through q^D for L = (zθ)^{r+1} − q(ξ − zθ)^{r+1}.
/// The order-d part is (h+dz)^{r+1}a_d − (ξ−h−(d−1)z)^{r+1}a_{d−1}.
pub fn qde_operator_check(series: &ISeries) -> Result<()> {
    let (h, xi) = gens(&series.ring);
    let xmh = &xi - &h;
    for d in 0..=series.order() {
        let mut lhs = series.coeffs[d].clone();
        for _ in 0..=series.r {
            lhs = mul_linear(&lhs, &h, &Rat::from_int(d as i64));
        }
        let mut res = lhs;
        if d > 0 {
            let mut rhs = series.coeffs[d - 1].clone();
            for _ in 0..=series.r {
                rhs = mul_linear(&rhs, &xmh, &Rat::from_int(1 - d as i64));
            }
            res = sub_laurent(&res, &rhs);
        }
        if !res.is_empty() {
            return Err(Error::QdeResidue { order: d });
        }
    }
    Ok(())
}

/// The z^{−1}, degree-one part of Ĩ − 1, one class per order d = 1..=D.
pub fn mirror_map_check(series: &ISeries) -> Vec<CohClass<Rat>> {
    series.coeffs[1..]
        .iter()
        .map(|a| {
            a.get(&-1)
                .map(|c| c.homogeneous_part(1))
                .unwrap_or_else(|| CohClass::zero(&series.ring))
        })
        .collect()
}

/// Companion form of the operator on jets (g_0, …, g_r):
/// zθ g_k = g_{k+1} for k < r and
/// zθ g_r = q/(1 − s q) Σ_k C(r+1,k)(−1)^k ξ^{r+1−k} g_k with s = (−1)^{r+1}.
#[derive(Clone, Debug)]
pub struct JetSystem {
    r: usize,
    ring: Arc<RingModel>,
    shift: RatMatrix,
    last_row: RatMatrix,
}

impl JetSystem {
    pub fn new(ring: &Arc<RingModel>) -> Result<JetSystem> {
        let r = local_rank(ring)?;
        let n = ring.rank();
        let big = (r + 1) * n;
        let xi = ring.generator_matrix(&ring.generators()[1])?;
        let mut shift = RatMatrix::zeros(big, big);
        for k in 0..r {
            for i in 0..n {
                shift[(k * n + i, (k + 1) * n + i)] = Rat::one();
            }
        }
        let mut last_row = RatMatrix::zeros(big, big);
        let mut xpow = vec![RatMatrix::identity(n)];
        for k in 1..=r + 1 {
            xpow.push(xpow[k - 1].mul(&xi));
        }
        for k in 0..=r {
            let c = JetSystem::coefficient(r, k);
            let m = &xpow[r + 1 - k];
            for i in 0..n {
                for j in 0..n {
                    last_row[(r * n + i, k * n + j)] = &m[(i, j)] * &c;
                }
            }
        }
        Ok(JetSystem {
            r,
            ring: ring.clone(),
            shift,
            last_row,
        })
    }

    fn coefficient(r: usize, k: usize) -> Rat {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        Rat::binomial(r as i64 + 1, k as i64) * Rat::from_int(sign)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    /// The singular point other than 0 and ∞.
    pub fn s(&self) -> i64 {
        if self.r % 2 == 0 {
            -1
        } else {
            1
        }
    }

    pub fn singular_points(&self) -> [i64; 2] {
        [0, self.s()]
    }

    /// Block shift part (constant in q).
    pub fn shift_block(&self) -> &RatMatrix {
        &self.shift
    }

    /// Last-row block multiplying q/(1 − s q).
    pub fn last_row_block(&self) -> &RatMatrix {
        &self.last_row
    }

    /// A(q) at a rational point other than s.
    pub fn matrix_at(&self, q: &Rat) -> Result<RatMatrix> {
        let den = Rat::one() - &(q * &Rat::from_int(self.s()));
        if den.is_zero() {
            return Err(Error::Singular(format!("A(q) at q = {q}")));
        }
        let c = q / &den;
        let n = self.shift.rows();
        let mut a = self.shift.clone();
        for i in 0..n {
            for j in 0..n {
                if !self.last_row[(i, j)].is_zero() {
                    a[(i, j)] = &a[(i, j)] + &(&self.last_row[(i, j)] * &c);
                }
            }
        }
        Ok(a)
    }

    fn xi_block(&self) -> RatMatrix {
        let xi = self.ring.generator_matrix(&self.ring.generators()[1]).expect("ξ");
        let n = self.ring.rank();
        let big = (self.r + 1) * n;
        let mut x = RatMatrix::zeros(big, big);
        for k in 0..=self.r {
            for i in 0..n {
                for j in 0..n {
                    x[(k * n + i, k * n + j)] = xi[(i, j)].clone();
                }
            }
        }
        x
    }

    /// Block-diagonal ξ∪ commutes with both parts of A(q).
    pub fn xi_commutes(&self) -> bool {
        let x = self.xi_block();
        self.shift.mul(&x) == x.mul(&self.shift) && self.last_row.mul(&x) == x.mul(&self.last_row)
    }

    /// Checks zθ g_r against the system right-hand side as exact q-series:
    /// G_{r+1}(d+1) − s G_{r+1}(d) = Σ_{k≤r} C(r+1,k)(−1)^k ξ^{r+1−k} G_k(d),
    /// where G_k(d) = (h+dz)^k a_d.
    pub fn jet_closure_check(&self, series: &ISeries) -> Result<()> {
        let (h, xi) = gens(&self.ring);
        let jet = |d: usize, k: usize| -> ZLaurent {
            let mut g = series.coeffs[d].clone();
            for _ in 0..k {
                g = mul_linear(&g, &h, &Rat::from_int(d as i64));
            }
            g
        };
        let zero = CohClass::<Rat>::zero(&self.ring);
        for d in 0..series.order() {
            let mut lhs = jet(d + 1, self.r + 1);
            let prev = jet(d, self.r + 1);
            for (p, c) in &prev {
                push_term(&mut lhs, *p, c.scale(&Rat::from_int(-self.s())));
            }
            let mut rhs = ZLaurent::new();
            for k in 0..=self.r {
                let m = xi.pow((self.r + 1 - k) as u32).scale(&JetSystem::coefficient(self.r, k));
                for (p, c) in jet(d, k) {
                    push_term(&mut rhs, p, &c * &m);
                }
            }
            if !sub_laurent(&lhs, &rhs).values().all(|c| *c == zero) {
                return Err(Error::QdeResidue { order: d + 1 });
            }
        }
        Ok(())
    }

    pub fn numeric(&self, prec: Precision) -> (CMatrix, CMatrix) {
        (self.shift.to_complex(prec), self.last_row.to_complex(prec))
    }
}

/// Numeric evaluation of the I-function and its jets at fixed z0. The
/// truncation adapts to the working precision and never falls below `min_order`.
#[derive(Clone, Debug)]
pub struct NumericSeries {
    ring: Arc<RingModel>,
    r: usize,
    z0: BigC,
    prec: Precision,
    min_order: usize,
    prefactor: bool,
    h: CMatrix,
    xi: CMatrix,
}

const MAX_TERMS: usize = 200_000;

impl NumericSeries {
    pub fn new(series: &ISeries, z0: &BigC, prec: Precision) -> Result<NumericSeries> {
        if z0.is_zero() {
            return Err(Error::Unsupported("z0 = 0".into()));
        }
        let ring = series.ring.clone();
        let g = ring.generators();
        Ok(NumericSeries {
            h: ring.generator_matrix(&g[0])?.to_complex(prec),
            xi: ring.generator_matrix(&g[1])?.to_complex(prec),
            r: series.r,
            ring,
            z0: Complex::with_val(prec.bits(), z0),
            prec,
            min_order: series.order(),
            prefactor: series.prefactor,
        })
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn h_matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn xi_matrix(&self) -> &CMatrix {
        &self.xi
    }

    pub fn z0(&self) -> &BigC {
        &self.z0
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    /// (M + c)^{-1}v for nilpotent M.
    fn div_shifted(&self, m: &CMatrix, c: &BigC, v: &[BigC]) -> Vec<BigC> {
        let bits = self.prec.bits();
        let cinv = Complex::with_val(bits, c.recip_ref());
        let mut term: Vec<BigC> = v.iter().map(|x| Complex::with_val(bits, x * &cinv)).collect();
        let mut out = term.clone();
        for _ in 0..self.ring.dim() {
            term = m.apply(&term);
            for x in term.iter_mut() {
                *x *= &cinv;
                x.neg_assign();
            }
            for (o, x) in out.iter_mut().zip(&term) {
                *o += x;
            }
        }
        out
    }

    /// (M + c)v
    fn mul_shifted(&self, m: &CMatrix, c: &BigC, v: &[BigC]) -> Vec<BigC> {
        let bits = self.prec.bits();
        m.apply(v)
            .into_iter()
            .zip(v)
            .map(|(a, x)| Complex::with_val(bits, &a + &Complex::with_val(bits, x * c)))
            .collect()
    }

    /// Jets g_k = q^{h/z} Σ_d q^d (h+dz)^k a_d for k = 0..=r, on the branch
    /// log q = log_q.
    pub fn jets(&self, q: &BigC, log_q: &BigC) -> Result<Vec<Vec<BigC>>> {
        let prec = self.prec;
        let bits = prec.bits();
        let n = self.ring.rank();
        let qa = cabs(q);
        if qa >= 1 {
            return Err(Error::Unsupported(format!("|q| = {} outside the unit disk", qa.to_f64())));
        }
        let xmh = self.xi.sub(&self.h);
        let mut a: Vec<BigC> = (0..n).map(|i| if i == 0 { prec.one() } else { prec.zero() }).collect();
        let mut qd = prec.one();
        let mut sums = vec![vec![prec.zero(); n]; self.r + 1];
        let eps = prec.epsilon() * Float::with_val(bits, 1e-6);
        let mut small = 0;
        for d in 0..MAX_TERMS {
            let dz = Complex::with_val(bits, &self.z0 * d as u32);
            let mut v: Vec<BigC> = a.iter().map(|x| Complex::with_val(bits, x * &qd)).collect();
            let mut biggest = Float::new(bits);
            for sum in sums.iter_mut() {
                for (s, x) in sum.iter_mut().zip(&v) {
                    *s += x;
                    let ax = cabs(x);
                    if ax > biggest {
                        biggest = ax;
                    }
                }
                v = self.mul_shifted(&self.h, &dz, &v);
            }
            let scale = sums
                .iter()
                .flat_map(|s| s.iter().map(cabs))
                .fold(Float::with_val(bits, 1), |m, x| if x > m { x } else { m });
            if d >= self.min_order && biggest <= Float::with_val(bits, &eps * &scale) {
                small += 1;
                if small >= 4 {
                    break;
                }
            } else {
                small = 0;
            }
            if d + 1 == MAX_TERMS {
                return Err(Error::Unsupported("I-series did not converge".into()));
            }
            let shift = Complex::with_val(bits, -&dz);
            for _ in 0..=self.r {
                a = self.mul_shifted(&xmh, &shift, &a);
            }
            let next = Complex::with_val(bits, &dz + &self.z0);
            for _ in 0..=self.r {
                a = self.div_shifted(&self.h, &next, &a);
            }
            qd *= q;
        }
        if self.prefactor {
            let p = self.prefactor_matrix(log_q);
            sums = sums.iter().map(|s| p.apply(s)).collect();
        }
        Ok(sums)
    }

    /// e^{log q · h/z}
    pub fn prefactor_matrix(&self, log_q: &BigC) -> CMatrix {
        let bits = self.prec.bits();
        let c = Complex::with_val(bits, log_q / &self.z0);
        self.h.scale(&c).exp_nilpotent()
    }

    /// Ĩ (or I with the prefactor) at q.
    pub fn eval(&self, q: &BigC, log_q: &BigC) -> Result<Vec<BigC>> {
        Ok(self.jets(q, log_q)?.swap_remove(0))
    }

    pub fn frame(&self, q: &BigC, log_q: &BigC, rule: FrameRule) -> Result<Frame> {
        let jets = self.jets(q, log_q)?;
        Frame::from_jets(&self.ring, &self.xi, &jets, rule, self.prec)
    }
}

/// How frame columns are built from jets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameRule {
    /// column (i,j) = ξ^j g_i
    Plain,
    /// column (i,j) = Σ_k C(i,k)(−1)^k ξ^{i−k+j} g_k, i.e. (ξ − zθ)^i ξ^j
    /// in the inverted variable.
    Flopped,
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub matrix: CMatrix,
    pub condition: Float,
}

impl Frame {
    pub fn from_jets(
        ring: &Arc<RingModel>,
        xi: &CMatrix,
        jets: &[Vec<BigC>],
        rule: FrameRule,
        prec: Precision,
    ) -> Result<Frame> {
        let r = jets.len() - 1;
        let n = ring.rank();
        let bits = prec.bits();
        // xpow[m][k] = ξ^m g_k
        let mut xpow: Vec<Vec<Vec<BigC>>> = vec![jets.to_vec()];
        for m in 1..=2 * r + 1 {
            let next = xpow[m - 1].iter().map(|g| xi.apply(g)).collect();
            xpow.push(next);
        }
        let mut cols = vec![Vec::new(); n];
        for i in 0..=r {
            for j in 0..=r + 1 {
                let col = match rule {
                    FrameRule::Plain => xpow[j][i].clone(),
                    FrameRule::Flopped => {
                        let mut acc = vec![prec.zero(); n];
                        for k in 0..=i {
                            let c = Rat::binomial(i as i64, k as i64).to_float(bits)
                                * if k % 2 == 0 { 1 } else { -1 };
                            for (a, x) in acc.iter_mut().zip(&xpow[i - k + j][k]) {
                                *a += Complex::with_val(bits, x * &c);
                            }
                        }
                        acc
                    }
                };
                let idx = ring
                    .basis_index(&[i as u32, j as u32])
                    .expect("frame index inside the basis");
                cols[idx] = col;
            }
        }
        let matrix = CMatrix::from_columns(&cols, prec);
        let condition = matrix
            .condition_number()
            .map_err(|_| Error::IllConditioned("singular frame".into()))?;
        Ok(Frame { matrix, condition })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_coefficients() {
        let lp = RingModel::local_p(1);
        let s = ISeries::extremal(&lp, 3).unwrap();
        let mut one = ZLaurent::new();
        one.insert(0, CohClass::one(&lp));
        assert_eq!(s.coefficient(0), &one);
        let (h, xi) = gens(&lp);
        let x2 = (&xi - &h).pow(2);
        let mut a1 = ZLaurent::new();
        a1.insert(-2, x2.clone());
        a1.insert(-3, (&x2 * &h).scale(&Rat::from_int(-2)));
        a1.retain(|_, c| !c.is_zero());
        assert_eq!(s.coefficient(1), &a1);
        s.check_homogeneity().unwrap();
    }

    #[test]
    fn operator_annihilates_series() {
        for r in 1..=2 {
            let s = ISeries::extremal(&RingModel::local_p(r), 10).unwrap();
            qde_operator_check(&s).unwrap();
            assert_eq!(
                qde_operator_check(&s.with_negated_term(3)),
                Err(Error::QdeResidue { order: 3 })
            );
            assert!(mirror_map_check(&s).iter().all(CohClass::is_zero));
            let sys = JetSystem::new(s.ring()).unwrap();
            sys.jet_closure_check(&s).unwrap();
            assert!(sys.jet_closure_check(&s.with_negated_term(2)).is_err());
            assert!(sys.xi_commutes());
        }
    }

    #[test]
    fn xi_annihilates_higher_terms() {
        let lp = RingModel::local_p(2);
        let s = ISeries::extremal(&lp, 4).unwrap();
        let (_, xi) = gens(&lp);
        for d in 1..=4 {
            assert!(s.coefficient(d).values().all(|c| (&xi * c).is_zero()));
        }
    }

    #[test]
    fn system_matrix_pole() {
        let sys = JetSystem::new(&RingModel::local_p(1)).unwrap();
        assert_eq!(sys.singular_points(), [0, 1]);
        assert!(sys.matrix_at(&Rat::one()).is_err());
        assert_eq!(&sys.matrix_at(&Rat::zero()).unwrap(), sys.shift_block());
    }

    #[test]
    fn numeric_series_matches_exact_coefficients() {
        let prec = Precision::new(40);
        let lp = RingModel::local_p(1);
        let s = ISeries::extremal(&lp, 6).unwrap().without_prefactor();
        let z0 = prec.real(1.5);
        let q = prec.real(0.01);
        let num = NumericSeries::new(&s, &z0, prec).unwrap().eval(&q, &prec.zero()).unwrap();
        let mut direct = vec![prec.zero(); lp.rank()];
        let bits = prec.bits();
        for d in 0..=6 {
            let qd = Complex::with_val(bits, rug::ops::Pow::pow(&q, d as u32));
            for (p, c) in s.coefficient(d) {
                let zp = Complex::with_val(bits, rug::ops::Pow::pow(&z0, *p as i32));
                for (i, x) in c.coeffs().iter().enumerate() {
                    direct[i] += Complex::with_val(bits, &qd * &zp) * x.to_float(bits);
                }
            }
        }
        let d = crate::linalg::rel_vec_distance(&num, &direct);
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn frame_near_zero_is_monomial_basis() {
        let prec = Precision::default();
        for r in 1..=2 {
            let lp = RingModel::local_p(r);
            let s = ISeries::extremal(&lp, 24).unwrap();
            let num = NumericSeries::new(&s, &prec.one(), prec).unwrap();
            let q = prec.complex_rat(&Rat::new(1, 1), &Rat::zero()) * Float::with_val(prec.bits(), 1e-30);
            let q = Complex::with_val(prec.bits(), q);
            let log_q = Complex::with_val(prec.bits(), q.ln_ref());
            let f = num.frame(&q, &log_q, FrameRule::Plain).unwrap();
            let neg = Complex::with_val(prec.bits(), -&log_q);
            let stripped = num.prefactor_matrix(&neg).mul(&f.matrix);
            let id = CMatrix::identity(lp.rank(), prec);
            assert!(stripped.sub(&id).max_abs() < 1e-25);
            let i0 = num.eval(&q, &log_q).unwrap();
            assert_eq!(f.matrix.column(0), i0);
        }
    }

    #[test]
    fn frame_condition_at_base_point() {
        let prec = Precision::default();
        let lp = RingModel::local_p(1);
        let s = ISeries::extremal(&lp, 24).unwrap();
        let num = NumericSeries::new(&s, &prec.one(), prec).unwrap();
        let q = prec.real(0.4);
        let log_q = Complex::with_val(prec.bits(), q.ln_ref());
        let f = num.frame(&q, &log_q, FrameRule::Plain).unwrap();
        assert!(f.condition < 1e6, "{}", f.condition.to_f64());
        assert!(cabs(&f.matrix.det()) > 1e-20);
        let g = num.frame(&q, &log_q, FrameRule::Flopped).unwrap();
        assert!(cabs(&g.matrix.det()) > 1e-20);
    }
}
