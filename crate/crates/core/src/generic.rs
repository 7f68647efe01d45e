//! Finite generic filters over `ℙ` and the objects read off them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::{leq, Condition, Variant};
use crate::gap1_thinning::in_p_top;
use crate::gap2::FakeGap2Morass;
use crate::gap2_thinning::in_pp;
use crate::harness::{extend_add_column, extend_adf_total, extend_separate};
use crate::order::Ordinal;

/// A finite stand-in for one of the dense sets used to build the generic
/// objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DenseSetSpec {
    /// `α ∈ a_r`.
    AddColumn { alpha: Ordinal },
    /// `r(α,β) = 0` and `r(γ,β) = 1` (chain).
    Separate { alpha: Ordinal, gamma: Ordinal, beta: Ordinal },
    /// At least `n` columns in `X_α − X_β`, for `β < α` (chain).
    GrowDifference { alpha: Ordinal, beta: Ordinal, n: usize },
    /// `(α, ξ)` is decided (adf).
    AdfTotal { alpha: Ordinal, xi: Ordinal },
}

impl DenseSetSpec {
    pub fn variant(self) -> Option<Variant> {
        match self {
            DenseSetSpec::AddColumn { .. } => None,
            DenseSetSpec::Separate { .. } | DenseSetSpec::GrowDifference { .. } => Some(Variant::Chain),
            DenseSetSpec::AdfTotal { .. } => Some(Variant::Adf),
        }
    }

    /// Parameters lie inside the fixture and fit the variant.
    pub fn validate(self, m2: &FakeGap2Morass, variant: Variant) -> Result<()> {
        let amb = m2.ambient();
        let (rows, kappa) = (amb.phi(amb.theta()), m2.kappa());
        if self.variant().is_some_and(|v| v != variant) {
            return Err(Error::VariantMismatch);
        }
        let ok = match self {
            DenseSetSpec::AddColumn { alpha } => alpha < rows,
            DenseSetSpec::Separate { alpha, gamma, beta } => alpha < gamma && gamma < rows && beta < kappa,
            DenseSetSpec::GrowDifference { alpha, beta, n } => beta < alpha && alpha < rows && n >= 1,
            DenseSetSpec::AdfTotal { alpha, xi } => alpha < rows && xi < kappa,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("{self} outside φ_top = {rows}, κ = {kappa}")))
        }
    }

    pub fn is_met_by(self, r: &Condition) -> bool {
        match self {
            DenseSetSpec::AddColumn { alpha } => r.rows().binary_search(&alpha).is_ok(),
            DenseSetSpec::Separate { alpha, gamma, beta } => {
                r.get(alpha, beta) == Some(0) && r.get(gamma, beta) == Some(1)
            }
            DenseSetSpec::GrowDifference { alpha, beta, n } => {
                let grown = r.cols().iter().filter(|&&c| r.get(alpha, c) == Some(1) && r.get(beta, c) == Some(0));
                grown.count() >= n
            }
            DenseSetSpec::AdfTotal { alpha, xi } => r.get(alpha, xi).is_some(),
        }
    }

    /// The density construction aimed at this set, applied below `p`.
    fn construct(self, m2: &FakeGap2Morass, p: &Condition) -> Option<Condition> {
        match self {
            DenseSetSpec::AddColumn { alpha } => extend_add_column(m2, p, alpha).ok(),
            DenseSetSpec::Separate { alpha, gamma, beta } => extend_separate(m2, p, alpha, gamma, beta).ok(),
            DenseSetSpec::GrowDifference { alpha, beta, .. } => {
                let mut q = p.clone();
                for c in 0..m2.kappa() {
                    if self.is_met_by(&q) {
                        break;
                    }
                    if q.cols().binary_search(&c).is_err() {
                        q = extend_separate(m2, &q, beta, alpha, c).ok()?;
                    }
                }
                Some(q)
            }
            DenseSetSpec::AdfTotal { alpha, xi } => extend_adf_total(m2, p, alpha, xi).ok(),
        }
    }
}

impl fmt::Display for DenseSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match *self {
            DenseSetSpec::AddColumn { alpha } => write!(f, "add-column({alpha})"),
            DenseSetSpec::Separate { alpha, gamma, beta } => write!(f, "separate({alpha},{gamma},{beta})"),
            DenseSetSpec::GrowDifference { alpha, beta, n } => write!(f, "grow-difference({alpha},{beta},{n})"),
            DenseSetSpec::AdfTotal { alpha, xi } => write!(f, "adf-total({alpha},{xi})"),
        }
    }
}

impl FromStr for DenseSetSpec {
    type Err = Error;

    /// Parses the `Display` form, e.g. `separate(0,1,0)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { path: "dense".into(), message: format!("cannot read dense set `{s}`") };
        let (kind, rest) = s.trim().split_once('(').ok_or_else(bad)?;
        let args: Vec<usize> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Ok(match (kind.trim(), args.as_slice()) {
            ("add-column", &[alpha]) => DenseSetSpec::AddColumn { alpha },
            ("separate", &[alpha, gamma, beta]) => DenseSetSpec::Separate { alpha, gamma, beta },
            ("grow-difference", &[alpha, beta, n]) => DenseSetSpec::GrowDifference { alpha, beta, n },
            ("adf-total", &[alpha, xi]) => DenseSetSpec::AdfTotal { alpha, xi },
            _ => return Err(bad()),
        })
    }
}

/// `ℙ` for one fixture: membership by the pullback characterisation, and
/// an enumerated member list searched when a construction falls short.
pub struct EnumeratedForcing<'a> {
    m2: &'a FakeGap2Morass,
    variant: Variant,
    members: Vec<Condition>,
}

impl<'a> EnumeratedForcing<'a> {
    /// Members are searched smallest rectangle first, then in `Ord` order.
    pub fn new(m2: &'a FakeGap2Morass, variant: Variant, members: impl IntoIterator<Item = Condition>) -> Self {
        let mut members: Vec<Condition> = members.into_iter().filter(|c| c.variant() == variant).collect();
        members.sort_by(|a, b| order_key(a).cmp(&order_key(b)));
        members.dedup();
        EnumeratedForcing { m2, variant, members }
    }

    pub fn morass(&self) -> &FakeGap2Morass {
        self.m2
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn members(&self) -> &[Condition] {
        &self.members
    }

    pub fn contains(&self, r: &Condition) -> bool {
        r.variant() == self.variant && in_pp(self.m2, r) && in_p_top(self.m2.ambient(), r)
    }

    /// Some enumerated member below `p` meets every set in `dense`.
    pub fn realizable_below(&self, p: &Condition, dense: &[DenseSetSpec]) -> bool {
        self.members.iter().any(|r| dense.iter().all(|d| d.is_met_by(r)) && leq(r, p).unwrap_or(false))
    }

    pub fn realizable(&self, dense: &[DenseSetSpec]) -> bool {
        self.realizable_below(&Condition::empty(self.variant), dense)
    }
}

/// A descending sequence `p₀ ≥ p₁ ≥ …` and the filter it generates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericFilter {
    pub dense: Vec<DenseSetSpec>,
    /// `sequence[i + 1]` meets `dense[i]`.
    pub sequence: Vec<Condition>,
}

impl GenericFilter {
    pub fn generator(&self) -> &Condition {
        self.sequence.last().expect("sequence starts with the empty condition")
    }

    /// Upward closure of the sequence.
    pub fn contains(&self, r: &Condition) -> bool {
        leq(self.generator(), r).unwrap_or(false)
    }

    pub fn meets_all(&self) -> bool {
        self.dense.iter().all(|d| d.is_met_by(self.generator()))
    }
}

/// Builds a filter meeting every set in `dense`.
///
/// Step `i` first tries the density construction below the current
/// condition, then the enumerated members below it in search order, and
/// backtracks when the remaining sets cannot be met below the choice.
pub fn generic_filter(poset: &EnumeratedForcing, dense: &[DenseSetSpec]) -> Result<GenericFilter> {
    for d in dense {
        d.validate(poset.m2, poset.variant)?;
    }
    let start = Condition::empty(poset.variant);
    let mut sequence = vec![start];
    let mut deepest = (0, sequence[0].clone());
    if descend(poset, dense, &mut sequence, &mut deepest) {
        let filter = GenericFilter { dense: dense.to_vec(), sequence };
        debug_assert!(filter.sequence.windows(2).all(|w| leq(&w[1], &w[0]).unwrap_or(false)));
        Ok(filter)
    } else {
        // Name the first set whose prefix can no longer be met jointly.
        let (deep, blocking) = deepest;
        let root = Condition::empty(poset.variant);
        let i = (0..dense.len()).find(|&k| !poset.realizable_below(&root, &dense[..=k])).unwrap_or(deep);
        Err(Error::Unrealizable { spec: dense[i].to_string(), blocking: blocking.to_string() })
    }
}

fn descend(
    poset: &EnumeratedForcing,
    dense: &[DenseSetSpec],
    sequence: &mut Vec<Condition>,
    deepest: &mut (usize, Condition),
) -> bool {
    let step = sequence.len() - 1;
    let Some(&spec) = dense.get(step) else { return true };
    let cur = sequence[step].clone();
    if step >= deepest.0 {
        *deepest = (step, cur.clone());
    }
    let mut candidates = Vec::new();
    if spec.is_met_by(&cur) {
        candidates.push(cur.clone());
    } else if let Some(q) = spec.construct(poset.m2, &cur) {
        if spec.is_met_by(&q) && poset.contains(&q) && leq(&q, &cur).unwrap_or(false) {
            candidates.push(q);
        }
    }
    let rest = &dense[step + 1..];
    let searched = poset.members().iter().filter(|r| spec.is_met_by(r) && leq(r, &cur).unwrap_or(false));
    for q in candidates.iter().cloned().chain(searched.cloned()) {
        // Only enumerated members can be pruned; a constructed condition
        // outside the list (fresh adf values) is always tried.
        let member = poset.members().binary_search_by(|m| order_key(m).cmp(&order_key(&q))).is_ok();
        if member && !poset.realizable_below(&q, rest) {
            continue;
        }
        sequence.push(q);
        if descend(poset, dense, sequence, deepest) {
            return true;
        }
        sequence.pop();
    }
    false
}

fn order_key(c: &Condition) -> (usize, &Condition) {
    (c.rows().len() + c.cols().len(), c)
}

/// What a filter decides: the chain `⟨X_α⟩` or the functions `⟨f_α⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum GenericObjects {
    Chain { sets: BTreeMap<Ordinal, BTreeSet<Ordinal>> },
    Adf { functions: BTreeMap<Ordinal, BTreeMap<Ordinal, u32>> },
}

/// Reads the generic objects off the union of the filter.
pub fn extract_objects(filter: &GenericFilter) -> Result<GenericObjects> {
    let top = filter.generator();
    for p in &filter.sequence {
        if !leq(top, p)? {
            return Err(Error::InconsistentFilter(format!("{p} is not above the generator {top}")));
        }
    }
    Ok(match top.variant() {
        Variant::Chain => GenericObjects::Chain {
            sets: top
                .rows()
                .iter()
                .map(|&a| (a, top.cols().iter().copied().filter(|&c| top.get(a, c) == Some(1)).collect()))
                .collect(),
        },
        Variant::Adf => GenericObjects::Adf {
            functions: top
                .rows()
                .iter()
                .map(|&a| (a, top.cols().iter().map(|&c| (c, top.get(a, c).expect("decided"))).collect()))
                .collect(),
        },
    })
}

/// Columns `ξ` on which no `f ∈ F_{ξ+1,κ}` sees both rows `a` and `b`;
/// agreement (adf) and `X_b − X_a` (chain) may only live here.
pub fn root_columns(m2: &FakeGap2Morass, a: Ordinal, b: Ordinal) -> BTreeSet<Ordinal> {
    let kappa = m2.kappa();
    (0..kappa)
        .filter(|&xi| {
            !m2.family(xi + 1, kappa).iter().any(|f| {
                let g = f.level(m2.theta(xi + 1));
                g.in_range(a) && g.in_range(b)
            })
        })
        .collect()
}

/// Violations of the properties the extracted objects must have.
pub fn check_objects(m2: &FakeGap2Morass, filter: &GenericFilter, objects: &GenericObjects) -> Vec<String> {
    let mut bad = Vec::new();
    let top = filter.generator();
    match objects {
        GenericObjects::Chain { sets } => {
            for (&a, xa) in sets {
                for (&b, xb) in sets.range(..a) {
                    let decided: BTreeSet<_> = top.cols().iter().copied().collect();
                    let leak: BTreeSet<_> = xb.difference(xa).filter(|c| decided.contains(c)).copied().collect();
                    if !leak.is_subset(&root_columns(m2, a, b)) {
                        bad.push(format!("X_{b} − X_{a} = {leak:?} outside the root columns"));
                    }
                }
            }
            for d in &filter.dense {
                if let DenseSetSpec::GrowDifference { alpha, beta, n } = *d {
                    let empty = BTreeSet::new();
                    let (xa, xb) = (sets.get(&alpha).unwrap_or(&empty), sets.get(&beta).unwrap_or(&empty));
                    let grown = xa.difference(xb).count();
                    if grown < n {
                        bad.push(format!("|X_{alpha} − X_{beta}| = {grown} < {n}"));
                    }
                }
            }
        }
        GenericObjects::Adf { functions } => {
            for (&a, fa) in functions {
                for (&b, fb) in functions.range(..a) {
                    // Two functions sharing only root columns are not yet
                    // told apart; that is undecided rather than wrong.
                    let agree: BTreeSet<_> = fa.iter().filter(|(c, v)| fb.get(c) == Some(v)).map(|(&c, _)| c).collect();
                    if !agree.is_subset(&root_columns(m2, a, b)) {
                        bad.push(format!("f_{a} and f_{b} agree on {agree:?} outside the root columns"));
                    }
                }
            }
        }
    }
    for d in &filter.dense {
        if !d.is_met_by(top) {
            bad.push(format!("{d} is not met"));
        }
    }
    bad
}

/// Every valid dense set for the fixture, grow-difference up to `max_n`.
pub fn dense_catalogue(m2: &FakeGap2Morass, variant: Variant, max_n: usize) -> Vec<DenseSetSpec> {
    let amb = m2.ambient();
    let (rows, kappa) = (amb.phi(amb.theta()), m2.kappa());
    let mut out: Vec<DenseSetSpec> = (0..rows).map(|alpha| DenseSetSpec::AddColumn { alpha }).collect();
    for alpha in 0..rows {
        for other in 0..rows {
            match variant {
                Variant::Chain if alpha < other => {
                    out.extend((0..kappa).map(|beta| DenseSetSpec::Separate { alpha, gamma: other, beta }));
                }
                Variant::Chain if other < alpha => {
                    out.extend((1..=max_n).map(|n| DenseSetSpec::GrowDifference { alpha, beta: other, n }));
                }
                _ => {}
            }
        }
        if variant == Variant::Adf {
            out.extend((0..kappa).map(|xi| DenseSetSpec::AdfTotal { alpha, xi }));
        }
    }
    out
}

/// Desk-scale dense lists: every list of at most two catalogue entries,
/// then windows of lengths `3..=max_len` at every offset and two strides.
pub fn dense_lists(catalogue: &[DenseSetSpec], max_len: usize) -> Vec<Vec<DenseSetSpec>> {
    let mut lists = vec![Vec::new()];
    lists.extend(catalogue.iter().map(|&d| vec![d]));
    for &a in catalogue {
        lists.extend(catalogue.iter().map(|&b| vec![a, b]));
    }
    for len in 3..=max_len {
        for stride in 1..=2 {
            for start in 0..catalogue.len() {
                let list: Vec<_> = (0..len).map(|k| catalogue[(start + k * stride) % catalogue.len()]).collect();
                lists.push(list);
            }
        }
    }
    lists
}
