//! Thinning the naive forcing along a fake gap-1 morass.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forcing::{enumerate_conditions, map_condition, map_condition_inverse, Condition, Variant};
use crate::gap1::{FakeGap1Morass, TreeNode};
use crate::order::{OrderMap, Ordinal};
use crate::report::LemmaReport;

/// Columns allowed at the top of a morass with top level `theta`.
pub fn column_bound(theta: Ordinal) -> Ordinal {
    theta.max(1)
}

/// The recursion-built sets `P_{φ_β}`, one per level `β`.
#[derive(Debug, Clone)]
pub struct PFamily {
    variant: Variant,
    phis: Vec<Ordinal>,
    levels: Vec<HashSet<Condition>>,
}

impl PFamily {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `P_{φ_β}`.
    pub fn level(&self, beta: Ordinal) -> &HashSet<Condition> {
        &self.levels[beta]
    }

    pub fn top(&self) -> &HashSet<Condition> {
        self.levels.last().expect("at least one level")
    }

    /// The level `β` whose block `(φ_{β-1}, φ_β]` contains `nu`.
    fn block_of(&self, nu: Ordinal) -> Option<Ordinal> {
        self.phis.iter().position(|&p| nu <= p)
    }

    /// Membership in `P_ν`.
    pub fn contains(&self, nu: Ordinal, p: &Condition) -> bool {
        let Some(beta) = self.block_of(nu) else { return false };
        p.rows().last().is_none_or(|&r| r < nu) && self.levels[beta].contains(p)
    }

    /// `P_ν`, sorted.
    pub fn members(&self, nu: Ordinal) -> Vec<Condition> {
        let Some(beta) = self.block_of(nu) else { return Vec::new() };
        let mut v: Vec<_> =
            self.levels[beta].iter().filter(|p| p.rows().last().is_none_or(|&r| r < nu)).cloned().collect();
        v.sort();
        v
    }
}

/// Builds `P_{φ_β}` for every level by the successor recursion, never
/// consulting the pullback characterisation. Columns are capped at
/// `col_cap`; the cap commutes with the recursion because restrictions
/// only remove columns.
pub fn build_p(m: &FakeGap1Morass, variant: Variant, alphabet: u32, col_cap: Ordinal) -> PFamily {
    let theta = m.theta();
    let base: HashSet<Condition> =
        enumerate_conditions(variant, 1, 1.min(col_cap), alphabet).into_iter().collect();
    let mut levels = vec![base];
    for beta in 1..=theta {
        let alpha = beta - 1;
        let f = m.successor_map(alpha).expect("successor map").clone();
        let phi_a = m.phi(alpha);
        let prev = &levels[alpha];
        let cands = enumerate_conditions(variant, m.phi(beta), beta.min(col_cap), alphabet);
        let next: HashSet<Condition> = cands
            .into_par_iter()
            .filter(|p| {
                let pulled = map_condition_inverse(&f, p).restrict_below(phi_a, alpha);
                let kept = p.restrict_below(phi_a, alpha);
                prev.contains(&pulled)
                    && prev.contains(&kept)
                    && p.column(alpha).is_none_or(|c| variant.column_ok(&c))
            })
            .collect();
        levels.push(next);
    }
    PFamily { variant, phis: m.phis().to_vec(), levels }
}

/// The pullback characterisation of the top level.
pub fn in_p_top(m: &FakeGap1Morass, p: &Condition) -> bool {
    let theta = m.theta();
    if !p.within(m.phi(theta), column_bound(theta)) {
        return false;
    }
    (0..theta).all(|alpha| {
        p.cols().binary_search(&alpha).is_err()
            || m.family(alpha + 1, theta).iter().all(|f| {
                let col = map_condition_inverse(f, p).column(alpha).unwrap_or_default();
                p.variant().column_ok(&col)
            })
    })
}

/// `σ_st(p) = π_st[p]`.
pub fn sigma(m: &FakeGap1Morass, s: TreeNode, t: TreeNode, p: &Condition) -> Result<Condition> {
    map_condition(&m.pi_st(s, t)?, p)
}

/// A condition written along a branch: `values[α]` for `α0 ≤ α ≤ top`, plus
/// the levels where it changes non-canonically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarDecomposition<V> {
    pub alpha0: Ordinal,
    pub top: Ordinal,
    pub values: BTreeMap<Ordinal, V>,
    pub support: BTreeSet<Ordinal>,
}

impl<V: Clone> StarDecomposition<V> {
    /// `p* ↾ supp(p)`.
    pub fn on_support(&self) -> BTreeMap<Ordinal, V> {
        self.support.iter().map(|a| (*a, self.values[a].clone())).collect()
    }
}

/// The branch maps `π_{s_α t}` for `α0 ≤ α ≤ θ`, where `α0` is the least
/// level whose branch node's map covers `delta`.
pub fn branch_maps(m: &FakeGap1Morass, delta: &BTreeSet<Ordinal>) -> Result<(Ordinal, Vec<OrderMap>)> {
    let theta = m.theta();
    let Some(&eta) = delta.last() else {
        return Err(Error::Precondition("empty delta".into()));
    };
    if eta >= m.phi(theta) {
        return Err(Error::Precondition(format!("delta reaches {eta} >= phi_top {}", m.phi(theta))));
    }
    let t = TreeNode::new(theta, eta);
    let mut maps = Vec::new();
    let mut alpha0 = None;
    for alpha in 0..=theta {
        let Some(s) = m.branch_node(t, alpha) else { continue };
        let pi = m.pi_st_or_id(s, t)?;
        if alpha0.is_none() && delta.iter().all(|&d| pi.in_range(d)) {
            alpha0 = Some(alpha);
        }
        if alpha0.is_some() {
            maps.push(pi);
        }
    }
    let alpha0 = alpha0.ok_or_else(|| Error::LemmaViolation(format!("no branch node covers {delta:?}")))?;
    Ok((alpha0, maps))
}

/// `p*` and `supp(p)` relative to `delta ⊇ a_p`.
pub fn star_gap1(m: &FakeGap1Morass, p: &Condition, delta: &BTreeSet<Ordinal>) -> Result<StarDecomposition<Condition>> {
    if let Some(r) = p.rows().iter().find(|r| !delta.contains(r)) {
        return Err(Error::Precondition(format!("row {r} of p outside delta")));
    }
    let theta = m.theta();
    let (alpha0, maps) = branch_maps(m, delta)?;
    let mut values = BTreeMap::new();
    for (k, pi) in maps.iter().enumerate() {
        let alpha = alpha0 + k;
        let cut = if alpha == theta { p.clone() } else { p.restrict_cols_below(alpha) };
        values.insert(alpha, map_condition_inverse(pi, &cut));
    }
    let mut support = BTreeSet::from([alpha0]);
    for alpha in alpha0..theta {
        let (lo, hi) = (&values[&alpha], &values[&(alpha + 1)]);
        let pushed = map_condition(m.successor_map(alpha)?, lo)?;
        if hi != lo && *hi != pushed {
            support.insert(alpha + 1);
        }
    }
    Ok(StarDecomposition { alpha0, top: theta, values, support })
}

/// The delta used for `p` itself: its rows, or `{0}` when it has none.
pub fn default_delta(p: &Condition) -> BTreeSet<Ordinal> {
    if p.rows().is_empty() {
        BTreeSet::from([0])
    } else {
        p.rows().iter().copied().collect()
    }
}

/// Recursion-built top level against the pullback predicate, as sets.
pub fn lemma_4_1(m: &FakeGap1Morass, variant: Variant, alphabet: u32, fixture: &str) -> LemmaReport {
    let mut rep = LemmaReport::new("4.1", fixture);
    let fam = build_p(m, variant, alphabet, usize::MAX);
    let universe = enumerate_conditions(variant, m.phi(m.theta()), column_bound(m.theta()), alphabet);
    let mismatches: Vec<String> = universe
        .par_iter()
        .filter_map(|p| {
            let (built, pred) = (fam.top().contains(p), in_p_top(m, p));
            (built != pred).then(|| format!("{variant:?} {p}: recursion {built}, predicate {pred}"))
        })
        .collect();
    rep.instances = universe.len() as u64;
    let mut mismatches = mismatches;
    mismatches.sort();
    rep.violations = mismatches;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap1::generate_gap1;

    fn chain(rows: &[usize], cols: &[usize], vals: &[u32]) -> Condition {
        Condition::new(Variant::Chain, rows.iter().copied().collect(), cols.iter().copied().collect(), vals.to_vec())
            .unwrap()
    }

    fn m1() -> FakeGap1Morass {
        FakeGap1Morass::from_splits(&[0]).unwrap()
    }

    #[test]
    fn base_level_has_five_chain_conditions() {
        for m in generate_gap1(2, 3) {
            assert_eq!(build_p(&m, Variant::Chain, 2, usize::MAX).level(0).len(), 5);
        }
    }

    #[test]
    fn decreasing_column_is_excluded() {
        let m = m1();
        let fam = build_p(&m, Variant::Chain, 2, usize::MAX);
        let bad = chain(&[0, 1], &[0], &[1, 0]);
        assert!(!fam.top().contains(&bad));
        assert!(!in_p_top(&m, &bad));
        assert!(in_p_top(&m, &Condition::empty(Variant::Chain)));
        assert!(fam.top().contains(&chain(&[0, 1], &[0], &[0, 1])));
    }

    #[test]
    fn levels_increase() {
        for m in generate_gap1(3, 4) {
            let fam = build_p(&m, Variant::Chain, 2, usize::MAX);
            let top = m.phi(m.theta());
            for nu in 1..top {
                let lo: HashSet<_> = fam.members(nu).into_iter().collect();
                let hi: HashSet<_> = fam.members(nu + 1).into_iter().collect();
                assert!(lo.is_subset(&hi), "nu={nu}");
            }
        }
    }

    #[test]
    fn sigma_maps_levels_into_levels() {
        for m in generate_gap1(3, 4) {
            let fam = build_p(&m, Variant::Chain, 2, usize::MAX);
            let tree = m.tree();
            for (s, t) in &tree.below {
                for p in fam.members(s.index + 1) {
                    let q = sigma(&m, *s, *t, &p).unwrap();
                    assert!(fam.contains(t.index + 1, &q), "{s}->{t}: {p} -> {q}");
                }
            }
        }
    }

    #[test]
    fn empty_condition_has_trivial_support() {
        let m = FakeGap1Morass::from_splits(&[0, 1]).unwrap();
        let star = star_gap1(&m, &Condition::empty(Variant::Chain), &BTreeSet::from([0])).unwrap();
        assert_eq!(star.support, BTreeSet::from([star.alpha0]));
    }

    #[test]
    fn support_sees_split_image() {
        // phi = (1, 2, 3); the split map at level 1 sends 1 to 2.
        let m = FakeGap1Morass::from_splits(&[0, 1]).unwrap();
        let p = chain(&[2], &[0, 1], &[1, 1]);
        let star = star_gap1(&m, &p, &BTreeSet::from([2])).unwrap();
        assert_eq!(star.alpha0, 0);
        assert_eq!(star.support, BTreeSet::from([0, 1, 2]));
        // Column 0 alone is carried up by the split map, so level 2 is canonical.
        let q = chain(&[2], &[0], &[1]);
        let star = star_gap1(&m, &q, &BTreeSet::from([2])).unwrap();
        assert_eq!(star.support, BTreeSet::from([0, 1]));
    }

    #[test]
    fn support_is_bounded_by_columns() {
        for m in generate_gap1(3, 4) {
            let fam = build_p(&m, Variant::Chain, 2, usize::MAX);
            for p in fam.top() {
                let delta = default_delta(p);
                let star = star_gap1(&m, p, &delta).unwrap();
                assert!(star.support.len() <= p.cols().len() + 1, "{p}: {:?}", star.support);
                if !p.rows().is_empty() {
                    assert!(star.support.len() <= p.cells().count() + 1);
                }
                assert_eq!(star.values[&m.theta()], *p);
            }
        }
    }

    #[test]
    fn recursion_matches_predicate_on_small_morasses() {
        for (i, m) in generate_gap1(2, 3).iter().enumerate() {
            for v in [Variant::Chain, Variant::Adf] {
                let rep = lemma_4_1(m, v, 3, &format!("g{i}"));
                assert!(rep.passed(), "{:?}", &rep.violations[..rep.violations.len().min(3)]);
            }
        }
    }
}
