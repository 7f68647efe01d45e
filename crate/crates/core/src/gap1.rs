//! Fake simplified gap-1 morasses.
//!
//! A fake gap-1 morass is a sequence of levels `φ_0 ..= φ_θ` together with
//! families `𝔊_{ζξ}` of order maps `φ_ζ → φ_ξ`. Everything is finite, so the
//! limit clauses never fire.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{compose, critical_point, OrderMap, Ordinal};
use crate::report::{AxiomReport, LemmaReport, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Cardinality clauses suspended.
    Fake,
    /// Cardinality clauses read literally with `κ⁺ = κ + 1`.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FakeGap1Morass {
    theta: Ordinal,
    phi: Vec<Ordinal>,
    families: BTreeMap<(Ordinal, Ordinal), BTreeSet<OrderMap>>,
    identities: Vec<BTreeSet<OrderMap>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TreeNode {
    pub level: Ordinal,
    pub index: Ordinal,
}

impl TreeNode {
    pub fn new(level: Ordinal, index: Ordinal) -> Self {
        TreeNode { level, index }
    }
}

impl std::fmt::Display for TreeNode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<{},{}>", self.level, self.index)
    }
}

/// Nodes of the morass tree together with the strict order `≺`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
    pub below: BTreeSet<(TreeNode, TreeNode)>,
}

impl Tree {
    pub fn precedes(&self, s: TreeNode, t: TreeNode) -> bool {
        self.below.contains(&(s, t))
    }

    pub fn predecessors(&self, t: TreeNode) -> Vec<TreeNode> {
        self.below.iter().filter(|(_, u)| *u == t).map(|(s, _)| *s).collect()
    }
}

impl FakeGap1Morass {
    /// Assembles a structure without checking the axioms.
    ///
    /// `phi` must be non-empty; `theta` is `phi.len() - 1`.
    pub fn new(
        phi: Vec<Ordinal>,
        families: BTreeMap<(Ordinal, Ordinal), BTreeSet<OrderMap>>,
    ) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::Precondition("phi must contain at least one level".into()));
        }
        if let Some(&(z, x)) = families.keys().find(|&&(z, x)| z >= x || x >= phi.len()) {
            return Err(Error::OutOfRange(format!("family index ({z},{x})")));
        }
        let identities =
            phi.iter().map(|&p| std::iter::once(OrderMap::identity(p)).collect()).collect();
        Ok(FakeGap1Morass { theta: phi.len() - 1, phi, families, identities })
    }

    /// The unique morass with the given split points.
    ///
    /// Successor levels are forced by (P3) and (P5): `φ_{ζ+1} = 2φ_ζ - σ_ζ`,
    /// and longer families are the compositions demanded by (P2).
    pub fn from_splits(splits: &[Ordinal]) -> Result<Self> {
        let mut phi = vec![1];
        for (z, &d) in splits.iter().enumerate() {
            if d >= phi[z] {
                return Err(Error::Precondition(format!(
                    "split point {d} at level {z} must be below {}",
                    phi[z]
                )));
            }
            phi.push(2 * phi[z] - d);
        }
        let mut families: BTreeMap<(Ordinal, Ordinal), BTreeSet<OrderMap>> = BTreeMap::new();
        for (z, &d) in splits.iter().enumerate() {
            let (lo, hi) = (phi[z], phi[z + 1]);
            let split = (0..lo).map(|x| if x < d { x } else { lo + (x - d) }).collect();
            let succ: BTreeSet<_> =
                [OrderMap::from_raw((0..lo).collect(), hi), OrderMap::from_raw(split, hi)]
                    .into_iter()
                    .collect();
            families.insert((z, z + 1), succ);
        }
        let theta = splits.len();
        for len in 2..=theta {
            for z in 0..=theta - len {
                let x = z + len;
                let mut fam = BTreeSet::new();
                for f in &families[&(z + 1, x)] {
                    for g in &families[&(z, z + 1)] {
                        fam.insert(compose(f, g)?);
                    }
                }
                families.insert((z, x), fam);
            }
        }
        Self::new(phi, families)
    }

    pub fn theta(&self) -> Ordinal {
        self.theta
    }

    pub fn phi(&self, level: Ordinal) -> Ordinal {
        self.phi[level]
    }

    pub fn phis(&self) -> &[Ordinal] {
        &self.phi
    }

    pub fn families(&self) -> &BTreeMap<(Ordinal, Ordinal), BTreeSet<OrderMap>> {
        &self.families
    }

    /// `𝔊_{ζξ}`; for `ζ = ξ` this is `{id}`. Missing families read as empty.
    pub fn family(&self, z: Ordinal, x: Ordinal) -> &BTreeSet<OrderMap> {
        static EMPTY: BTreeSet<OrderMap> = BTreeSet::new();
        if z == x {
            return self.identities.get(z).unwrap_or(&EMPTY);
        }
        self.families.get(&(z, x)).unwrap_or(&EMPTY)
    }

    /// The initial segment with levels `0 ..= top`.
    pub fn truncate(&self, top: Ordinal) -> Result<Self> {
        if top > self.theta {
            return Err(Error::OutOfRange(format!("truncate at {top} > theta {}", self.theta)));
        }
        let families =
            self.families.iter().filter(|((_, x), _)| *x <= top).map(|(k, v)| (*k, v.clone()));
        Self::new(self.phi[..=top].to_vec(), families.collect())
    }

    /// Whether `self` is an initial segment of `other`.
    pub fn is_initial_segment_of(&self, other: &Self) -> bool {
        self.theta <= other.theta
            && other.truncate(self.theta).is_ok_and(|seg| &seg == self)
    }

    /// The non-identity member of `𝔊_{ζ,ζ+1}`.
    pub fn successor_map(&self, z: Ordinal) -> Result<&OrderMap> {
        if z >= self.theta {
            return Err(Error::OutOfRange(format!("level {z} has no successor (theta {})", self.theta)));
        }
        successor_violation(self, z).map_or(Ok(()), |w| Err(Error::AxiomViolated(w)))?;
        Ok(self.family(z, z + 1).iter().find(|b| !b.is_identity()).expect("checked by P3"))
    }

    /// The split point `σ_ζ`.
    pub fn split_point(&self, z: Ordinal) -> Result<Ordinal> {
        let b = self.successor_map(z)?;
        Ok(critical_point(b).expect("non-identity map has a critical point"))
    }

    pub fn check_axioms(&self, mode: Mode) -> AxiomReport {
        let mut r = AxiomReport::new();
        let theta = self.theta;

        let mut p0a = None;
        if self.phi[0] != 1 {
            p0a = Some(format!("phi_0 = {} != 1", self.phi[0]));
        } else if let Some(z) = self.phi.iter().position(|&p| p == 0) {
            p0a = Some(format!("phi_{z} = 0"));
        }
        r.check("P0(a)", p0a);
        match mode {
            Mode::Fake => r.push("P0(a)-card", Status::Suspended),
            Mode::Full => {
                let top_ok = self.phi[theta] == theta + 1;
                let bad = (0..theta).find(|&z| self.phi[z] >= theta);
                let w = if !top_ok {
                    Some(format!("phi_theta = {} != theta+1 = {}", self.phi[theta], theta + 1))
                } else {
                    bad.map(|z| format!("phi_{z} = {} >= theta", self.phi[z]))
                };
                r.check("P0(a)-card", w);
            }
        }

        let mut p0b = None;
        'outer: for z in 0..theta {
            for x in z + 1..=theta {
                let Some(fam) = self.families.get(&(z, x)) else {
                    p0b = Some(format!("family ({z},{x}) missing"));
                    break 'outer;
                };
                if let Some(f) =
                    fam.iter().find(|f| f.dom() != self.phi[z] || f.cod() != self.phi[x])
                {
                    p0b = Some(format!("({z},{x}) map {f:?} is not phi_{z} -> phi_{x}"));
                    break 'outer;
                }
            }
        }
        r.check("P0(b)", p0b);

        match mode {
            Mode::Fake => r.push("P1", Status::Suspended),
            Mode::Full => {
                let w = self
                    .families
                    .iter()
                    .find(|((_, x), fam)| *x < theta && fam.len() >= theta)
                    .map(|((z, x), fam)| format!("|G_({z},{x})| = {} >= {theta}", fam.len()));
                r.check("P1", w);
            }
        }

        r.check("P2", self.composition_violation());
        r.check("P3", (0..theta).find_map(|z| successor_violation(self, z)));
        // Index sets are finite: there are no limit levels.
        r.push("P4", Status::Vacuous);
        r.check("P5", self.covering_violation());
        r
    }

    fn composition_violation(&self) -> Option<String> {
        let theta = self.theta;
        for z in 0..theta {
            for x in z + 1..theta {
                for y in x + 1..=theta {
                    let mut composed = BTreeSet::new();
                    for f in self.family(x, y) {
                        for g in self.family(z, x) {
                            match compose(f, g) {
                                Ok(h) => {
                                    composed.insert(h);
                                }
                                Err(e) => return Some(format!("({z},{x},{y}): {e}")),
                            }
                        }
                    }
                    let fam = self.family(z, y);
                    if let Some(h) = composed.difference(fam).next() {
                        return Some(format!("({z},{x},{y}): composite {h:?} not in G_({z},{y})"));
                    }
                    if let Some(h) = fam.difference(&composed).next() {
                        return Some(format!("({z},{x},{y}): {h:?} in G_({z},{y}) is no composite"));
                    }
                }
            }
        }
        None
    }

    fn covering_violation(&self) -> Option<String> {
        for a in 1..=self.theta {
            let covered: BTreeSet<Ordinal> = (0..a)
                .flat_map(|b| self.family(b, a).iter().flat_map(|f| f.values().iter().copied()))
                .collect();
            if covered != (0..self.phi[a]).collect() {
                let missing = (0..self.phi[a]).find(|v| !covered.contains(v));
                return Some(format!("level {a}: point {missing:?} not covered"));
            }
        }
        None
    }

    pub fn nodes(&self) -> Vec<TreeNode> {
        (0..=self.theta)
            .flat_map(|l| (0..self.phi[l]).map(move |i| TreeNode::new(l, i)))
            .collect()
    }

    pub fn precedes(&self, s: TreeNode, t: TreeNode) -> bool {
        s.level < t.level
            && t.level <= self.theta
            && self.family(s.level, t.level).iter().any(|f| f.apply(s.index) == Some(t.index))
    }

    pub fn tree(&self) -> Tree {
        let nodes = self.nodes();
        let mut below = BTreeSet::new();
        for &s in &nodes {
            for &t in nodes.iter().filter(|t| t.level > s.level) {
                if self.precedes(s, t) {
                    below.insert((s, t));
                }
            }
        }
        Tree { nodes, below }
    }

    /// `π_{st}`: the common restriction to `ν(s)+1` of every map sending `ν(s)` to `ν(t)`.
    pub fn pi_st(&self, s: TreeNode, t: TreeNode) -> Result<OrderMap> {
        if s.level >= t.level || t.level > self.theta {
            return Err(Error::NotRelated(format!("{s} vs {t}")));
        }
        let mut found: Option<OrderMap> = None;
        for f in self.family(s.level, t.level) {
            if f.apply(s.index) == Some(t.index) {
                let r = f.restrict(s.index + 1);
                match &found {
                    None => found = Some(r),
                    Some(prev) if *prev != r => {
                        return Err(Error::LemmaViolation(format!(
                            "pi_st({s},{t}) not well defined: {prev:?} vs {r:?}"
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        found.ok_or_else(|| Error::NotRelated(format!("{s} is not below {t}")))
    }

    /// `π_{st}` when `s ≺ t`, the identity on `ν(t)+1` when `s = t`.
    pub fn pi_st_or_id(&self, s: TreeNode, t: TreeNode) -> Result<OrderMap> {
        if s == t {
            return OrderMap::inclusion(t.index + 1, self.phi[t.level]);
        }
        self.pi_st(s, t)
    }

    /// The unique node at `level` on the branch below `t` (or `t` itself).
    pub fn branch_node(&self, t: TreeNode, level: Ordinal) -> Option<TreeNode> {
        if level == t.level {
            return Some(t);
        }
        if level > t.level {
            return None;
        }
        (0..self.phi[level])
            .map(|i| TreeNode::new(level, i))
            .find(|&s| self.precedes(s, t))
    }
}

fn successor_violation(m: &FakeGap1Morass, z: Ordinal) -> Option<String> {
    let fam = m.family(z, z + 1);
    let lo = m.phi[z];
    if fam.len() != 2 {
        return Some(format!("G_({z},{}) has {} maps, expected 2", z + 1, fam.len()));
    }
    let incl: Vec<Ordinal> = (0..lo).collect();
    if !fam.iter().any(|f| f.values() == incl.as_slice()) {
        return Some(format!("G_({z},{}) lacks the identity", z + 1));
    }
    let b = fam.iter().find(|f| f.values() != incl.as_slice()).expect("two distinct maps");
    match critical_point(b) {
        Some(d) if d < lo && b.values()[d] >= lo => None,
        _ => Some(format!("G_({z},{}): {b:?} has no critical point mapped to >= {lo}", z + 1)),
    }
}

/// Every fake gap-1 morass with `theta <= theta_max` and all `phi <= phi_max`,
/// in order of `theta`, then split sequence.
pub fn generate_gap1(theta_max: Ordinal, phi_max: Ordinal) -> Vec<FakeGap1Morass> {
    let mut out = Vec::new();
    if phi_max == 0 {
        return out;
    }
    for theta in 0..=theta_max {
        let mut splits = Vec::new();
        split_sequences(theta, phi_max, 1, &mut splits, &mut |s| {
            out.push(FakeGap1Morass::from_splits(s).expect("valid split sequence"))
        });
    }
    out
}

fn split_sequences(
    remaining: usize,
    phi_max: Ordinal,
    current_phi: Ordinal,
    acc: &mut Vec<Ordinal>,
    emit: &mut dyn FnMut(&[Ordinal]),
) {
    if remaining == 0 {
        emit(acc);
        return;
    }
    for d in 0..current_phi {
        let next = 2 * current_phi - d;
        if next > phi_max {
            continue;
        }
        acc.push(d);
        split_sequences(remaining - 1, phi_max, next, acc, emit);
        acc.pop();
    }
}

/// Coherence: `f₁(τ₁) = f₂(τ₂)` forces `τ₁ = τ₂` and `f₁↾τ₁ = f₂↾τ₁`.
pub fn lemma_3_1(m: &FakeGap1Morass, fixture: &str) -> LemmaReport {
    let mut rep = LemmaReport::new("3.1", fixture);
    for ((z, x), fam) in m.families() {
        for f1 in fam {
            for f2 in fam {
                for t1 in 0..m.phi(*z) {
                    for t2 in 0..m.phi(*z) {
                        if f1.apply(t1) != f2.apply(t2) {
                            continue;
                        }
                        let ok = t1 == t2 && f1.restrict(t1) == f2.restrict(t1);
                        rep.record(ok, || format!("({z},{x}) {f1:?}({t1}) = {f2:?}({t2})"));
                    }
                }
            }
        }
    }
    rep.vacuous = rep.instances == 0;
    rep
}

/// Tree structure, composition of `π`, restriction and the limit clause.
pub fn lemma_3_2(m: &FakeGap1Morass, fixture: &str) -> LemmaReport {
    let mut rep = LemmaReport::new("3.2", fixture);
    let tree = m.tree();

    // (a) predecessors form a chain with exactly one node per lower level.
    for &t in &tree.nodes {
        let preds = tree.predecessors(t);
        for level in 0..t.level {
            let n = preds.iter().filter(|s| s.level == level).count();
            rep.record(n == 1, || format!("(a) {t} has {n} predecessors at level {level}"));
        }
        for &s1 in &preds {
            for &s2 in preds.iter().filter(|s2| s2.level > s1.level) {
                rep.record(tree.precedes(s1, s2), || format!("(a) {s1}, {s2} below {t} unrelated"));
            }
        }
    }

    // (b) corrected form, plus the printed form as an observation.
    let mut printed_holds = 0u64;
    let mut printed_checked = 0u64;
    for &(t0, t1) in &tree.below {
        for &(_, t2) in tree.below.iter().filter(|(u, _)| *u == t1) {
            let p01 = m.pi_st(t0, t1);
            let p12 = m.pi_st(t1, t2);
            let p02 = m.pi_st(t0, t2);
            let (Ok(p01), Ok(p12), Ok(p02)) = (p01, p12, p02) else {
                rep.record(false, || format!("(b) pi undefined on {t0} < {t1} < {t2}"));
                continue;
            };
            let inner = p01.with_cod(t1.index + 1).expect("values bounded by nu(t1)");
            let composed = compose(&p12, &inner).expect("dimensions agree");
            rep.record(composed == p02, || format!("(b) {t0} < {t1} < {t2}: {composed:?} != {p02:?}"));
            printed_checked += 1;
            if composed.values() == p01.values() {
                printed_holds += 1;
            }
        }
    }
    rep.observations.push(format!(
        "(b) printed form pi_t0t1 = pi_t1t2 o pi_t0t1 holds on {printed_holds} of {printed_checked} triples"
    ));

    // (c) restriction of pi along the map it induces.
    for &(s, t) in &tree.below {
        let Ok(pi) = m.pi_st(s, t) else { continue };
        for nu in 0..=s.index {
            let tau = pi.values()[nu];
            let (s2, t2) = (TreeNode::new(s.level, nu), TreeNode::new(t.level, tau));
            let ok = tree.precedes(s2, t2)
                && m.pi_st(s2, t2).is_ok_and(|p| p == pi.restrict(nu + 1));
            rep.record(ok, || format!("(c) {s} < {t}, nu'={nu}"));
        }
    }
    rep.observations.push("(d) vacuous: no limit levels".into());
    rep
}

/// `id↾φ_ζ ∈ 𝔊_{ζξ}` for every `ζ < ξ`.
pub fn lemma_3_5a(m: &FakeGap1Morass, fixture: &str) -> LemmaReport {
    let mut rep = LemmaReport::new("3.5a", fixture);
    for ((z, x), fam) in m.families() {
        let incl = OrderMap::inclusion(m.phi(*z), m.phi(*x));
        let ok = incl.is_ok_and(|i| fam.contains(&i));
        rep.record(ok, || format!("id on phi_{z} missing from G_({z},{x})"));
    }
    rep.vacuous = rep.instances == 0;
    rep
}
