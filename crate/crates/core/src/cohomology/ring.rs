use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::scalars::Rat;

/// Polynomial in the generators: (exponent vector, coefficient) pairs.
pub type Poly = Vec<(Vec<u32>, Rat)>;

/// Sparse coefficient vector over the basis.
pub type Sparse = Vec<(usize, Rat)>;

/// Which shipped presentation a ring is.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    Proj(usize),
    LocalP { r: usize, primed: bool },
    BlowupW(usize),
    Product(Box<RingKind>, Box<RingKind>),
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::Proj(r) => write!(f, "Proj({r})"),
            RingKind::LocalP { r, primed: false } => write!(f, "LocalP({r})"),
            RingKind::LocalP { r, primed: true } => write!(f, "LocalP'({r})"),
            RingKind::BlowupW(r) => write!(f, "BlowupW({r})"),
            RingKind::Product(a, b) => write!(f, "{a}x{b}"),
        }
    }
}

/// Rewrite rule g^power = rhs; an empty rhs means g^power = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Rule {
    gen: usize,
    power: u32,
    rhs: Poly,
}

/// Graded commutative algebra with a fixed monomial basis, confluent rewrite
/// rules and an integration functional. All generators have degree 2.
#[derive(PartialEq, Eq)]
pub struct RingModel {
    kind: RingKind,
    name: String,
    gens: Vec<String>,
    bounds: Vec<u32>,
    rules: Vec<Rule>,
    relations: Vec<(String, Poly)>,
    top: Vec<(Vec<u32>, Rat)>,
    dim: usize,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    integration: Vec<Rat>,
    table: Vec<Vec<Sparse>>,
}

impl fmt::Debug for RingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingModel({})", self.name)
    }
}

fn mono(pairs: &[(usize, u32)], ngens: usize) -> Vec<u32> {
    let mut e = vec![0; ngens];
    for &(g, p) in pairs {
        e[g] += p;
    }
    e
}

/// Expands Π (Σ c·x_g) factors into a polynomial.
fn expand(factors: &[(Poly, u32)], ngens: usize) -> Poly {
    let mut acc: HashMap<Vec<u32>, Rat> = HashMap::from([(vec![0; ngens], Rat::one())]);
    for (f, times) in factors {
        for _ in 0..*times {
            let mut next: HashMap<Vec<u32>, Rat> = HashMap::new();
            for (m, c) in &acc {
                for (fm, fc) in f {
                    let e: Vec<u32> = m.iter().zip(fm).map(|(a, b)| a + b).collect();
                    *next.entry(e).or_insert_with(Rat::zero) += &(c * fc);
                }
            }
            acc = next;
        }
    }
    let mut out: Poly = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    out.sort();
    out
}

impl RingModel {
    /// ℚ[h]/(h^{r+1}), ∫h^r = 1.
    pub fn proj(r: usize) -> Arc<RingModel> {
        let p = (r + 1) as u32;
        Arc::new(RingModel::build(
            RingKind::Proj(r),
            vec!["h".into()],
            vec![r as u32],
            vec![Rule { gen: 0, power: p, rhs: vec![] }],
            vec![(format!("h^{p}"), vec![(vec![p], Rat::one())])],
            vec![(vec![r as u32], Rat::one())],
        ))
    }

    /// ℚ[h, ξ]/(h^{r+1}, ξ(ξ−h)^{r+1}), ∫h^rξ^{r+1} = 1.
    pub fn local_p(r: usize) -> Arc<RingModel> {
        Arc::new(RingModel::local_p_model(r, false))
    }

    /// The flopped side, same presentation in h′, ξ′.
    pub fn local_p_prime(r: usize) -> Arc<RingModel> {
        Arc::new(RingModel::local_p_model(r, true))
    }

    fn local_p_model(r: usize, primed: bool) -> RingModel {
        let (h, x) = if primed { ("h′", "ξ′") } else { ("h", "ξ") };
        let p = (r + 1) as u32;
        // ξ^{r+2} = −Σ_{k=1}^{r+1} C(r+1,k)(−h)^k ξ^{r+2−k}
        let rhs: Poly = (1..=r as i64 + 1)
            .map(|k| {
                let sign = if k % 2 == 0 { -1 } else { 1 };
                (
                    mono(&[(0, k as u32), (1, p + 1 - k as u32)], 2),
                    Rat::binomial(r as i64 + 1, k) * Rat::from_int(sign),
                )
            })
            .collect();
        let xi_minus_h = vec![(mono(&[(1, 1)], 2), Rat::one()), (mono(&[(0, 1)], 2), Rat::from_int(-1))];
        let rel = expand(&[(vec![(mono(&[(1, 1)], 2), Rat::one())], 1), (xi_minus_h, p)], 2);
        RingModel::build(
            RingKind::LocalP { r, primed },
            vec![h.into(), x.into()],
            vec![r as u32, p],
            vec![
                Rule { gen: 0, power: p, rhs: vec![] },
                Rule { gen: 1, power: p + 1, rhs },
            ],
            vec![
                (format!("{h}^{p}"), vec![(mono(&[(0, p)], 2), Rat::one())]),
                (format!("{x}({x}-{h})^{p}"), rel),
            ],
            vec![(mono(&[(0, r as u32), (1, p)], 2), Rat::one())],
        )
    }

    /// ℚ[h₁, h₂, ζ]/(h₁^{r+1}, h₂^{r+1}, ζ(ζ−h₁−h₂)), ∫h₁^r h₂^r ζ = 1.
    pub fn blowup_w(r: usize) -> Arc<RingModel> {
        let p = (r + 1) as u32;
        let rhs = vec![
            (mono(&[(0, 1), (2, 1)], 3), Rat::one()),
            (mono(&[(1, 1), (2, 1)], 3), Rat::one()),
        ];
        let rel = vec![
            (mono(&[(2, 2)], 3), Rat::one()),
            (mono(&[(0, 1), (2, 1)], 3), Rat::from_int(-1)),
            (mono(&[(1, 1), (2, 1)], 3), Rat::from_int(-1)),
        ];
        Arc::new(RingModel::build(
            RingKind::BlowupW(r),
            vec!["h₁".into(), "h₂".into(), "ζ".into()],
            vec![r as u32, r as u32, 1],
            vec![
                Rule { gen: 0, power: p, rhs: vec![] },
                Rule { gen: 1, power: p, rhs: vec![] },
                Rule { gen: 2, power: 2, rhs },
            ],
            vec![
                (format!("h₁^{p}"), vec![(mono(&[(0, p)], 3), Rat::one())]),
                (format!("h₂^{p}"), vec![(mono(&[(1, p)], 3), Rat::one())]),
                ("ζ(ζ-h₁-h₂)".into(), rel),
            ],
            vec![(mono(&[(0, r as u32), (1, r as u32), (2, 1)], 3), Rat::one())],
        ))
    }

    /// Künneth product A ⊗ B; generators of B are listed after those of A.
    pub fn product(a: &RingModel, b: &RingModel) -> Arc<RingModel> {
        let na = a.gens.len();
        let nb = b.gens.len();
        let widen = |e: &[u32], left: bool| -> Vec<u32> {
            let mut v = vec![0; na + nb];
            let off = if left { 0 } else { na };
            for (i, x) in e.iter().enumerate() {
                v[off + i] = *x;
            }
            v
        };
        let widen_poly = |p: &Poly, left: bool| -> Poly {
            p.iter().map(|(e, c)| (widen(e, left), c.clone())).collect()
        };
        let mut gens: Vec<String> = a.gens.iter().map(|g| format!("{g}⊗1")).collect();
        gens.extend(b.gens.iter().map(|g| format!("1⊗{g}")));
        let mut rules = Vec::new();
        for (side, ring) in [(true, a), (false, b)] {
            let off = if side { 0 } else { na };
            for rule in &ring.rules {
                rules.push(Rule {
                    gen: rule.gen + off,
                    power: rule.power,
                    rhs: widen_poly(&rule.rhs, side),
                });
            }
        }
        let mut relations = Vec::new();
        for (side, ring) in [(true, a), (false, b)] {
            for (name, p) in &ring.relations {
                relations.push((name.clone(), widen_poly(p, side)));
            }
        }
        let mut top = Vec::new();
        for (ea, ca) in &a.top {
            for (eb, cb) in &b.top {
                let mut e = ea.clone();
                e.extend(eb);
                top.push((e, ca * cb));
            }
        }
        let mut bounds = a.bounds.clone();
        bounds.extend(&b.bounds);
        Arc::new(RingModel::build(
            RingKind::Product(Box::new(a.kind.clone()), Box::new(b.kind.clone())),
            gens,
            bounds,
            rules,
            relations,
            top,
        ))
    }

    /// Ring by name: "Proj(2)", "LocalP(1)", "LocalP'(1)", "BlowupW(2)",
    /// and products joined by "x".
    pub fn by_name(name: &str) -> Result<Arc<RingModel>> {
        let name = name.trim();
        if let Some((a, b)) = name.split_once('x') {
            return Ok(RingModel::product(&*RingModel::by_name(a)?, &*RingModel::by_name(b)?));
        }
        let bad = || Error::Parse(format!("unknown ring `{name}`"));
        let (head, rest) = name.split_once('(').ok_or_else(bad)?;
        let r: usize = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        match head.trim() {
            "Proj" | "P" => Ok(RingModel::proj(r)),
            "LocalP" => Ok(RingModel::local_p(r)),
            "LocalP'" | "LocalP′" => Ok(RingModel::local_p_prime(r)),
            "BlowupW" | "W" => Ok(RingModel::blowup_w(r)),
            _ => Err(bad()),
        }
    }

    fn build(
        kind: RingKind,
        gens: Vec<String>,
        bounds: Vec<u32>,
        rules: Vec<Rule>,
        relations: Vec<(String, Poly)>,
        top: Vec<(Vec<u32>, Rat)>,
    ) -> RingModel {
        let mut basis = vec![vec![]];
        for b in &bounds {
            basis = basis
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=*b).map(move |e| {
                        let mut v = prefix.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        let index: HashMap<Vec<u32>, usize> =
            basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let dim = top.first().map_or(0, |(e, _)| e.iter().sum::<u32>() as usize);
        let mut integration = vec![Rat::zero(); basis.len()];
        for (e, c) in &top {
            integration[index[e]] = c.clone();
        }
        let mut ring = RingModel {
            name: kind.to_string(),
            kind,
            gens,
            bounds,
            rules,
            relations,
            top,
            dim,
            basis,
            index,
            integration,
            table: vec![],
        };
        ring.rebuild_table();
        ring
    }

    fn rebuild_table(&mut self) {
        let mut memo = HashMap::new();
        let n = self.basis.len();
        let mut table = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in a..n {
                let e: Vec<u32> = self.basis[a].iter().zip(&self.basis[b]).map(|(x, y)| x + y).collect();
                let v = self.reduce_memo(&e, &mut memo);
                table[b][a] = v.clone();
                table[a][b] = v;
            }
        }
        self.table = table;
    }

    fn reduce_memo(&self, e: &[u32], memo: &mut HashMap<Vec<u32>, Sparse>) -> Sparse {
        if let Some(v) = memo.get(e) {
            return v.clone();
        }
        let rule = self.rules.iter().find(|r| e[r.gen] >= r.power);
        let out = match rule {
            None => vec![(self.index[e], Rat::one())],
            Some(rule) => {
                let mut acc: HashMap<usize, Rat> = HashMap::new();
                for (re, rc) in &rule.rhs {
                    let mut next = e.to_vec();
                    next[rule.gen] -= rule.power;
                    for (x, y) in next.iter_mut().zip(re) {
                        *x += y;
                    }
                    for (i, c) in self.reduce_memo(&next, memo) {
                        *acc.entry(i).or_insert_with(Rat::zero) += &(rc * &c);
                    }
                }
                let mut v: Sparse = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                v.sort_by_key(|(i, _)| *i);
                v
            }
        };
        memo.insert(e.to_vec(), out.clone());
        out
    }

    /// Normal form of an arbitrary monomial.
    pub fn reduce_monomial(&self, e: &[u32]) -> Sparse {
        assert_eq!(e.len(), self.gens.len(), "exponent arity");
        self.reduce_memo(e, &mut HashMap::new())
    }

    /// Normal form of a polynomial.
    pub fn reduce_poly(&self, p: &Poly) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.basis.len()];
        let mut memo = HashMap::new();
        for (e, c) in p {
            for (i, v) in self.reduce_memo(e, &mut memo) {
                out[i] += &(c * &v);
            }
        }
        out
    }

    /// Test hook: a copy whose leading rewrite rule has one coefficient
    /// perturbed, so that its own relations no longer hold.
    pub fn with_corrupted_rule(&self) -> Result<Arc<RingModel>> {
        let mut ring = RingModel {
            kind: self.kind.clone(),
            name: format!("{}[corrupted]", self.name),
            gens: self.gens.clone(),
            bounds: self.bounds.clone(),
            rules: self.rules.clone(),
            relations: self.relations.clone(),
            top: self.top.clone(),
            dim: self.dim,
            basis: self.basis.clone(),
            index: self.index.clone(),
            integration: self.integration.clone(),
            table: vec![],
        };
        let rule = ring
            .rules
            .iter_mut()
            .find(|r| !r.rhs.is_empty())
            .ok_or_else(|| Error::Unsupported(format!("{} has no rewrite rule to corrupt", self.name)))?;
        rule.rhs[0].1 += &Rat::one();
        ring.rebuild_table();
        Ok(Arc::new(ring))
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::Parse(format!("ring {} has no generator `{name}`", self.name)))
    }

    pub fn relations(&self) -> &[(String, Poly)] {
        &self.relations
    }

    /// Complex dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn basis_index(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Complex degree of the i-th basis monomial.
    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].iter().sum::<u32>() as usize
    }

    pub fn integration(&self) -> &[Rat] {
        &self.integration
    }

    pub(crate) fn product_of_basis(&self, a: usize, b: usize) -> &Sparse {
        &self.table[a][b]
    }

    pub fn monomial_name(&self, e: &[u32]) -> String {
        let parts: Vec<String> = e
            .iter()
            .zip(&self.gens)
            .filter(|(x, _)| **x > 0)
            .map(|(x, g)| if *x == 1 { g.clone() } else { format!("{g}^{x}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("")
        }
    }

    /// Whether every relation reduces to zero.
    pub fn relations_hold(&self) -> std::result::Result<(), String> {
        for (name, p) in &self.relations {
            if self.reduce_poly(p).iter().any(|c| !c.is_zero()) {
                return Err(name.clone());
            }
        }
        Ok(())
    }

    /// (α, β) ↦ ∫αβ on the basis.
    pub fn pairing_matrix(&self) -> RatMatrix {
        let n = self.basis.len();
        let mut m = RatMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut s = Rat::zero();
                for (i, c) in &self.table[a][b] {
                    s += &(c * &self.integration[*i]);
                }
                m[(a, b)] = s;
            }
        }
        m
    }

    /// Matrix of multiplication by the given basis monomial.
    pub fn mult_matrix(&self, a: usize) -> RatMatrix {
        let n = self.basis.len();
        let mut m = RatMatrix::zeros(n, n);
        for b in 0..n {
            for (i, c) in &self.table[a][b] {
                m[(*i, b)] = c.clone();
            }
        }
        m
    }

    /// Matrix of multiplication by the named generator.
    pub fn generator_matrix(&self, name: &str) -> Result<RatMatrix> {
        let g = self.generator_index(name)?;
        let mut e = vec![0; self.gens.len()];
        e[g] = 1;
        Ok(self.mult_matrix(self.index[&e]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes_and_order() {
        let p = RingModel::local_p(1);
        assert_eq!(p.rank(), 6);
        assert_eq!(p.dim(), 3);
        assert_eq!(p.basis()[1], vec![0, 1]);
        assert_eq!(p.basis()[3], vec![1, 0]);
        let w = RingModel::blowup_w(2);
        assert_eq!(w.rank(), 18);
        assert_eq!(w.dim(), 5);
        assert_eq!(RingModel::local_p(3).rank(), 20);
    }

    #[test]
    fn xi_cubed_rewrite() {
        let p = RingModel::local_p(1);
        let v = p.reduce_monomial(&[0, 3]);
        assert_eq!(v, vec![(p.basis_index(&[1, 2]).unwrap(), Rat::from_int(2))]);
    }

    #[test]
    fn relations_hold_for_shipped_models() {
        for r in 1..=3 {
            assert!(RingModel::local_p(r).relations_hold().is_ok());
            assert!(RingModel::blowup_w(r).relations_hold().is_ok());
            assert!(RingModel::proj(r).relations_hold().is_ok());
        }
    }

    #[test]
    fn corrupted_rule_is_detected() {
        let bad = RingModel::local_p(1).with_corrupted_rule().unwrap();
        assert_eq!(bad.relations_hold(), Err("ξ(ξ-h)^2".to_string()));
        assert!(RingModel::proj(1).with_corrupted_rule().is_err());
    }

    #[test]
    fn pairings_nondegenerate() {
        for r in 1..=3 {
            for ring in [RingModel::proj(r), RingModel::local_p(r), RingModel::blowup_w(r)] {
                assert!(!ring.pairing_matrix().det().is_zero(), "{}", ring.name());
            }
        }
        let prod = RingModel::product(&RingModel::proj(1), &RingModel::proj(2));
        assert!(!prod.pairing_matrix().det().is_zero());
    }

    #[test]
    fn names_parse() {
        assert_eq!(RingModel::by_name("Proj(2)").unwrap().name(), "Proj(2)");
        assert_eq!(RingModel::by_name("Proj(1)xProj(2)").unwrap().rank(), 6);
        assert_eq!(RingModel::by_name("LocalP'(1)").unwrap().generators()[1], "ξ′");
        assert!(RingModel::by_name("Grass(2)").is_err());
    }
}
