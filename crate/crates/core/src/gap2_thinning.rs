//! Thinning the gap-1 thinned forcing further along a fake gap-2 morass.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::{is_right_branching, Gap1Embedding};
use crate::error::{Error, Result};
use crate::forcing::{enumerate_conditions, leq_same, map_condition, map_condition_inverse, subsets, Condition, Variant};
use crate::gap1::{FakeGap1Morass, TreeNode};
use crate::gap1_thinning::{build_p, default_delta, star_gap1, PFamily, StarDecomposition};
use crate::gap2::{bar_decompose, FakeGap2Morass};
use crate::order::{OrderMap, Ordinal};
use crate::report::LemmaReport;

/// A finite map from gap-1 levels to conditions.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct QCondition(pub BTreeMap<Ordinal, Condition>);

impl QCondition {
    pub fn dom(&self) -> impl Iterator<Item = Ordinal> + '_ {
        self.0.keys().copied()
    }

    pub fn get(&self, eta: Ordinal) -> Option<&Condition> {
        self.0.get(&eta)
    }

    pub fn dom_below(&self, nu: Ordinal) -> bool {
        self.0.keys().next_back().is_none_or(|&k| k < nu)
    }
}

impl fmt::Display for QCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (eta, c)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{eta}: {c}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for QCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `p ≤ q` in `Q`: larger domain, entrywise stronger.
pub fn q_leq(p: &QCondition, q: &QCondition) -> bool {
    q.0.iter().all(|(eta, c)| p.0.get(eta).is_some_and(|d| leq_same(d, c)))
}

/// The bar part of an embedding: `ζ ↦ (f̄(ζ), f̄_ζ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarMap(pub Vec<(Ordinal, OrderMap)>);

impl BarMap {
    /// Bar maps of `f` at every level `ζ ≤ upto`.
    pub fn of(ambient: &FakeGap1Morass, f: &Gap1Embedding, upto: Ordinal) -> Result<BarMap> {
        (0..=upto)
            .map(|z| bar_decompose(ambient, f, z).map(|d| (d.bar_f_at, d.bar_level_map)))
            .collect::<Result<_>>()
            .map(BarMap)
    }

    /// Bar maps below the source top, with the top itself sent to `dst_top`
    /// by the level map there.
    pub fn with_top(ambient: &FakeGap1Morass, f: &Gap1Embedding, src_top: Ordinal, dst_top: Ordinal) -> Result<BarMap> {
        let mut points: Vec<_> = (0..src_top)
            .map(|z| bar_decompose(ambient, f, z).map(|d| (d.bar_f_at, d.bar_level_map)))
            .collect::<Result<_>>()?;
        points.push((dst_top, f.level(src_top).clone()));
        Ok(BarMap(points))
    }

    pub fn identity(ambient: &FakeGap1Morass, upto: Ordinal) -> BarMap {
        BarMap((0..=upto).map(|z| (z, OrderMap::identity(ambient.phi(z)))).collect())
    }

    pub fn points(&self) -> impl Iterator<Item = Ordinal> + '_ {
        self.0.iter().map(|(p, _)| *p)
    }

    pub fn contains_point(&self, eta: Ordinal) -> bool {
        self.0.iter().any(|(p, _)| *p == eta)
    }
}

/// `f̄[q]`: entries moved to `f̄(η)` and relabelled by `f̄_η`.
pub fn bar_image(bar: &BarMap, q: &QCondition) -> Result<QCondition> {
    let mut out = BTreeMap::new();
    for (&eta, c) in &q.0 {
        let (to, map) =
            bar.0.get(eta).ok_or_else(|| Error::OutOfRange(format!("level {eta} outside the bar map")))?;
        out.insert(*to, map_condition(map, c)?);
    }
    Ok(QCondition(out))
}

/// `f̄⁻¹[q]` on levels below `dom_limit`, with entries cut to columns below
/// `cols`.
pub fn bar_preimage(bar: &BarMap, q: &QCondition, cols: Ordinal, dom_limit: Ordinal) -> QCondition {
    let mut out = BTreeMap::new();
    for (z, (to, map)) in bar.0.iter().enumerate().take(dom_limit) {
        if let Some(c) = q.0.get(to) {
            out.insert(z, map_condition_inverse(map, &c.restrict_cols_below(cols)));
        }
    }
    QCondition(out)
}

/// Everything needed to run the second thinning on one fixture.
pub struct Gap2Context<'a> {
    pub m2: &'a FakeGap2Morass,
    pub variant: Variant,
    pub alphabet: u32,
    /// Gap-1 thinned sets of the ambient morass, columns below `max(κ, 1)`.
    pub pfam: PFamily,
    /// Right-branching member of `F_{α,α+1}` and its bar map, per `α`.
    pub right: Vec<(Gap1Embedding, BarMap)>,
    /// Bar maps of every member of `F_{α,α+1}`, per `α`, in two readings:
    /// the plain bar on levels `≤ θ_α`, and the bar below `θ_α` with the top
    /// sent to `θ_{α+1}` by the level map there.
    pub step_bars: Vec<Vec<BarMap>>,
}

impl<'a> Gap2Context<'a> {
    pub fn new(m2: &'a FakeGap2Morass, variant: Variant, alphabet: u32) -> Result<Self> {
        let pfam = build_p(m2.ambient(), variant, alphabet, m2.kappa().max(1));
        let mut right = Vec::new();
        let mut step_bars = Vec::new();
        for a in 0..m2.kappa() {
            let (lo, hi) = (m2.segment(a), m2.segment(a + 1));
            let (ta, tb) = (m2.theta(a), m2.theta(a + 1));
            let fam = m2.family(a, a + 1);
            let f = fam
                .iter()
                .find(|f| is_right_branching(f, lo, hi).is_yes())
                .ok_or_else(|| Error::AxiomViolated(format!("no right-branching embedding at {a}")))?;
            right.push((f.clone(), BarMap::with_top(m2.ambient(), f, ta, tb)?));
            let mut bars = Vec::new();
            for g in &fam {
                bars.push(BarMap::of(m2.ambient(), g, ta)?);
                bars.push(BarMap::with_top(m2.ambient(), g, ta, tb)?);
            }
            bars.sort_by(|x, y| x.0.cmp(&y.0));
            bars.dedup();
            step_bars.push(bars);
        }
        Ok(Gap2Context { m2, variant, alphabet, pfam, right, step_bars })
    }

    pub fn ambient(&self) -> &FakeGap1Morass {
        self.m2.ambient()
    }

    /// The column bound of the second thinning.
    pub fn col_bound(&self) -> Ordinal {
        self.m2.kappa()
    }

    /// Members of the gap-1 top level whose columns lie below `κ`.
    pub fn base_conditions(&self) -> Vec<Condition> {
        let k = self.col_bound();
        let mut v: Vec<_> = self.pfam.top().iter().filter(|p| p.cols().last().is_none_or(|&c| c < k)).cloned().collect();
        v.sort();
        v
    }
}

/// The part of `Q` the recursion can reach: every `p* ↾ supp(p)` over
/// `a_p ⊆ Δ ⊆ φ_top` (with `p` from the gap-1 top level, columns below `κ`),
/// the empty map, and everything obtained from these by the two
/// bar-preimages of each successor step.
pub fn q_universe(ctx: &Gap2Context) -> HashSet<QCondition> {
    let amb = ctx.ambient();
    let top_phi = amb.phi(amb.theta());
    let deltas: Vec<BTreeSet<Ordinal>> =
        subsets(top_phi).into_iter().filter(|d| !d.is_empty()).map(|d| d.into_iter().collect()).collect();
    let mut seen: HashSet<QCondition> = ctx
        .base_conditions()
        .par_iter()
        .flat_map_iter(|p| {
            deltas
                .iter()
                .filter(|d| p.rows().iter().all(|r| d.contains(r)))
                .map(|d| QCondition(star_gap1(amb, p, d).expect("delta covers p").on_support()))
                .collect::<Vec<_>>()
        })
        .chain(rayon::iter::once(QCondition::default()))
        .collect();
    let pulls: Vec<(Ordinal, Ordinal, &BarMap)> = (0..ctx.m2.kappa())
        .flat_map(|a| ctx.step_bars[a].iter().map(move |b| (a, ctx.m2.theta(a), b)))
        .collect();
    let mut frontier: Vec<QCondition> = seen.iter().cloned().collect();
    while !frontier.is_empty() {
        let found: HashSet<QCondition> = frontier
            .par_iter()
            .flat_map_iter(|q| {
                pulls.iter().map(move |(a, ta, bar)| bar_preimage(bar, q, *a, ta + 1))
            })
            .collect();
        frontier = found.into_iter().filter(|q| !seen.contains(q)).collect();
        seen.extend(frontier.iter().cloned());
    }
    seen
}

/// The recursion-built sets `ℚ_{θ_β}`, one per gap-2 level `β`.
pub struct QFamily {
    thetas: Vec<Ordinal>,
    levels: Vec<HashSet<QCondition>>,
}

impl QFamily {
    pub fn level(&self, beta: Ordinal) -> &HashSet<QCondition> {
        &self.levels[beta]
    }

    pub fn top(&self) -> &HashSet<QCondition> {
        self.levels.last().expect("at least one level")
    }

    /// Membership in `ℚ_ν`: domain within levels `≤ ν`.
    pub fn contains(&self, nu: Ordinal, q: &QCondition) -> bool {
        let Some(beta) = self.thetas.iter().position(|&t| nu <= t) else { return false };
        q.dom_below(nu + 1) && self.levels[beta].contains(q)
    }
}

/// Levels of `ℚ_{θ_β}` run over `0..=θ_β`, the levels of the segment; the
/// finite top is a successor level and carries support of its own.
pub fn build_q(ctx: &Gap2Context, universe: &HashSet<QCondition>) -> QFamily {
    let m2 = ctx.m2;
    let amb = ctx.ambient();
    let base: HashSet<QCondition> = universe.iter().filter(|q| q.dom_below(m2.theta(0) + 1)).cloned().collect();
    let mut levels = vec![base];
    for beta in 1..=m2.kappa() {
        let alpha = beta - 1;
        let (ta, tb) = (m2.theta(alpha), m2.theta(beta));
        let prev = &levels[alpha];
        let bars = &ctx.step_bars[alpha];
        let next: HashSet<QCondition> = universe
            .par_iter()
            .filter(|q| {
                q.dom_below(tb + 1)
                    && bars.iter().all(|bar| prev.contains(&bar_preimage(bar, q, alpha, ta + 1)))
                    && q.0.iter().all(|(&eta, c)| {
                        c.within(amb.phi(eta), beta) && c.column(alpha).is_none_or(|col| ctx.variant.column_ok(&col))
                    })
            })
            .cloned()
            .collect();
        levels.push(next);
    }
    QFamily { thetas: m2.thetas().to_vec(), levels }
}

/// `ℙ`: gap-1 top-level conditions whose support part lies in the top of `ℚ`.
pub fn build_pp(ctx: &Gap2Context, qfam: &QFamily) -> HashSet<Condition> {
    let amb = ctx.ambient();
    ctx.base_conditions()
        .into_par_iter()
        .filter(|p| {
            let star = star_gap1(amb, p, &default_delta(p)).expect("rows lie below phi_top");
            qfam.top().contains(&QCondition(star.on_support()))
        })
        .collect()
}

/// The pullback characterisation through the gap-2 families.
pub fn in_pp(m2: &FakeGap2Morass, p: &Condition) -> bool {
    let amb = m2.ambient();
    let kappa = m2.kappa();
    if !p.within(amb.phi(amb.theta()), kappa) {
        return false;
    }
    (0..kappa).all(|alpha| {
        p.cols().binary_search(&alpha).is_err()
            || m2.family(alpha + 1, kappa).iter().all(|f| {
                let g = f.level(m2.theta(alpha + 1));
                let col = map_condition_inverse(g, p).column(alpha).unwrap_or_default();
                p.variant().column_ok(&col)
            })
    })
}

/// Result of comparing `ℙ` with the pullback predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma52Outcome {
    pub report: LemmaReport,
    pub predicate_alone: bool,
    pub with_gap1_predicate: bool,
}

/// `ℙ` against the pullback predicate over every condition with rows below
/// `φ_top` and columns below `κ`. Violations are disagreements with the
/// predicate taken together with gap-1 top-level membership; agreement of
/// the predicate on its own is reported separately.
pub fn lemma_5_2(m2: &FakeGap2Morass, variant: Variant, alphabet: u32, fixture: &str) -> Result<Lemma52Outcome> {
    let ctx = Gap2Context::new(m2, variant, alphabet)?;
    let universe = q_universe(&ctx);
    let qfam = build_q(&ctx, &universe);
    let pp = build_pp(&ctx, &qfam);
    let amb = m2.ambient();
    let conds = enumerate_conditions(variant, amb.phi(amb.theta()), m2.kappa(), ctx.alphabet);
    let rows: Vec<(bool, bool, bool)> = conds
        .par_iter()
        .map(|p| (pp.contains(p), in_pp(m2, p), crate::gap1_thinning::in_p_top(amb, p)))
        .collect();
    let mut rep = LemmaReport::new("5.2", fixture);
    rep.instances = conds.len() as u64;
    let mut alone = true;
    let mut both = true;
    for (p, &(built, pred, gap1)) in conds.iter().zip(&rows) {
        alone &= built == pred;
        if built != (pred && gap1) {
            both = false;
            rep.violations.push(format!("{variant:?} {p}: built {built}, predicate {pred}, gap-1 predicate {gap1}"));
        }
    }
    rep.observations.push(format!(
        "{variant:?}: |P| = {}; predicate alone {}; conjunction with the gap-1 predicate {}",
        pp.len(),
        if alone { "matches" } else { "differs" },
        if both { "matches" } else { "differs" }
    ));
    Ok(Lemma52Outcome { report: rep, predicate_alone: alone, with_gap1_predicate: both })
}

/// `p* ↾ supp(p)` along the derived tree, for `q ∈ ℚ_{Δ,Γ}`.
pub fn star_gap2(
    ctx: &Gap2Context,
    q: &QCondition,
    gamma: &BTreeSet<Ordinal>,
) -> Result<StarDecomposition<QCondition>> {
    let m2 = ctx.m2;
    let amb = ctx.ambient();
    let kappa = m2.kappa();
    let delta: BTreeSet<Ordinal> = q.dom().collect();
    let Some(&eta) = delta.last() else {
        return Err(Error::Precondition("q has empty domain".into()));
    };
    let Some(&gmax) = gamma.last() else {
        return Err(Error::Precondition("empty gamma".into()));
    };
    // Γ pulled back to level η of the ambient tree.
    let t_amb = TreeNode::new(amb.theta(), gmax);
    let s_amb = amb
        .branch_node(t_amb, eta)
        .ok_or_else(|| Error::Precondition(format!("no node at level {eta} below {t_amb}")))?;
    let pi = amb.pi_st_or_id(s_amb, t_amb)?;
    let gamma_bar: BTreeSet<Ordinal> = pi.preimage_of(gamma);
    if gamma_bar.len() != gamma.len() {
        return Err(Error::Precondition(format!("gamma {gamma:?} not in the range at level {eta}")));
    }

    let derived = m2.derived_gap1()?;
    let t = TreeNode::new(kappa, eta);
    let mut values = BTreeMap::new();
    let mut alpha0 = None;
    for alpha in 0..=kappa {
        let Some(s) = derived.branch_node(t, alpha) else { continue };
        let (bar, level_eta) = if alpha == kappa {
            (BarMap::identity(amb, eta), OrderMap::identity(amb.phi(eta)))
        } else {
            let f = m2.pi_prime(s, t)?;
            let decs = m2.pi_prime_bar(s, t)?;
            let bar = BarMap(decs.into_iter().map(|d| (d.bar_f_at, d.bar_level_map)).collect());
            // (π′_st)_{η̄} with π′_st(η̄) = η, i.e. η̄ = ν(s).
            (bar, f.level(s.index).clone())
        };
        if alpha0.is_none() {
            let covers = delta.iter().all(|&d| bar.contains_point(d))
                && gamma_bar.iter().all(|&g| level_eta.in_range(g));
            if !covers {
                continue;
            }
            alpha0 = Some(alpha);
        }
        let v = if alpha == kappa { q.clone() } else { bar_preimage(&bar, q, alpha, s.index + 1) };
        values.insert(alpha, v);
    }
    let alpha0 = alpha0.ok_or_else(|| Error::LemmaViolation(format!("no node of the derived tree covers {q}")))?;
    let mut support = BTreeSet::from([alpha0]);
    for alpha in alpha0..kappa {
        let (lo, hi) = (&values[&alpha], &values[&(alpha + 1)]);
        let pushed = bar_image(&ctx.right[alpha].1, lo)?;
        if hi != lo && *hi != pushed {
            support.insert(alpha + 1);
        }
    }
    Ok(StarDecomposition { alpha0, top: kappa, values, support })
}

/// `ℚ_{Δ,Γ}` for every `(Δ, Γ)` that occurs, built from `ℙ`.
pub fn q_delta_gamma(
    ctx: &Gap2Context,
    pp: &HashSet<Condition>,
) -> BTreeMap<(BTreeSet<Ordinal>, BTreeSet<Ordinal>), BTreeSet<QCondition>> {
    let amb = ctx.ambient();
    let mut out: BTreeMap<_, BTreeSet<QCondition>> = BTreeMap::new();
    for p in pp.iter().filter(|p| !p.rows().is_empty()) {
        let gamma: BTreeSet<Ordinal> = p.rows().iter().copied().collect();
        let star = star_gap1(amb, p, &gamma).expect("rows of p");
        out.entry((star.support.clone(), gamma)).or_default().insert(QCondition(star.on_support()));
    }
    out
}

/// Transport of support sequences under bar images, along every embedding
/// of the fixture.
pub fn lemma_5_1(m2: &FakeGap2Morass, fixture: &str) -> Result<LemmaReport> {
    let amb = m2.ambient();
    let mut rep = LemmaReport::new("5.1", fixture);
    let pfam = build_p(amb, Variant::Chain, 2, usize::MAX);
    let mut printed_holds = 0u64;
    let mut plain_image_holds = 0u64;
    let mut consecutive = 0u64;
    // (η̄, Δ̄) -> star values of every p̄ with rows in Δ̄.
    let mut sources: HashMap<(Ordinal, BTreeSet<Ordinal>), Vec<QCondition>> = HashMap::new();
    for eta_bar in 0..=amb.theta() {
        let seg = amb.truncate(eta_bar)?;
        for d in subsets(amb.phi(eta_bar)).into_iter().filter(|d| !d.is_empty()) {
            let d: BTreeSet<Ordinal> = d.into_iter().collect();
            let mut stars = Vec::new();
            for p in pfam.level(eta_bar).iter().filter(|p| p.rows().iter().all(|r| d.contains(r))) {
                stars.push(QCondition(star_gap1(&seg, p, &d)?.on_support()));
            }
            stars.sort();
            stars.dedup();
            sources.insert((eta_bar, d), stars);
        }
    }

    for a in 0..m2.kappa() {
        for b in a + 1..=m2.kappa() {
            for f in m2.family(a, b) {
                let bar = BarMap::of(amb, &f, m2.theta(a))?;
                for (eta_bar, (eta, fmap)) in bar.0.iter().enumerate() {
                    let eta = *eta;
                    for ((eb, d_bar), stars) in sources.iter().filter(|((eb, _), _)| *eb == eta_bar) {
                        let _ = eb;
                        let d: BTreeSet<Ordinal> = fmap.image_of(d_bar);
                        let t = TreeNode::new(eta, *d.last().unwrap());
                        for p_bar in stars {
                            let p = bar_image(&bar, p_bar)?;
                            let dom: Vec<Ordinal> = p.dom().collect();
                            let src: Vec<Ordinal> = p_bar.dom().collect();
                            for i in 0..dom.len().saturating_sub(1) {
                                let (bi, bn) = (dom[i], dom[i + 1]);
                                let an = src[i + 1];
                                if bn == 0 || an == 0 {
                                    continue;
                                }
                                consecutive += 1;
                                let node = |lvl| amb.branch_node(t, lvl).expect("branch node");
                                let (s_bi, s_prev, s_bn) = (node(bi), node(bn - 1), node(bn));
                                let lifted = map_condition_inverse(&amb.pi_st_or_id(s_prev, s_bn)?, &p.0[&bn]);
                                let across = amb.pi_st_or_id(s_bi, s_prev)?;
                                let image = map_condition(&across, &p.0[&bi])?;
                                let cut = lifted.restrict_cols_below(an - 1);
                                if lifted == image {
                                    plain_image_holds += 1;
                                }
                                if lifted == map_condition_inverse(&across, &p.0[&bi]) {
                                    printed_holds += 1;
                                }
                                rep.record(cut == image, || {
                                    format!(
                                        "f={:?} eta_bar={eta_bar} {p_bar} -> {p}: level {} gives {cut}, transport gives {image}",
                                        f.base,
                                        bn - 1
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    rep.observations.push(format!(
        "{consecutive} consecutive pairs; image form without the column cut holds on {plain_image_holds}; \
         inverse-image form holds on {printed_holds}"
    ));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap2::{generate_gap2, Gap2Bounds};

    fn fixtures() -> Vec<FakeGap2Morass> {
        generate_gap2(Gap2Bounds::default())
    }

    #[test]
    fn bar_identity_round_trip() {
        let m2 = &fixtures()[1];
        let amb = m2.ambient();
        let id = BarMap::identity(amb, 1);
        let c = Condition::from_fn(Variant::Chain, [0], [0], |_, _| 1).unwrap();
        let q = QCondition(BTreeMap::from([(1, c)]));
        assert_eq!(bar_image(&id, &q).unwrap(), q);
        assert_eq!(bar_preimage(&id, &q, 5, 2), q);
    }

    #[test]
    fn bar_round_trip_on_right_branching() {
        for m2 in fixtures().iter().filter(|m| m.kappa() >= 1) {
            let ctx = Gap2Context::new(m2, Variant::Chain, 2).unwrap();
            let bar = &ctx.right[0].1;
            for q in q_universe(&ctx).iter().filter(|q| q.dom_below(m2.theta(0))) {
                let img = bar_image(bar, q).unwrap();
                assert_eq!(bar_preimage(bar, &img, usize::MAX, m2.theta(0)), *q);
            }
        }
    }

    #[test]
    fn base_level_of_q() {
        for m2 in fixtures() {
            let ctx = Gap2Context::new(&m2, Variant::Chain, 2).unwrap();
            let u = q_universe(&ctx);
            let qf = build_q(&ctx, &u);
            assert!(qf.level(0).iter().all(|q| q.dom_below(2)));
            assert_eq!(qf.level(0).len(), u.iter().filter(|q| q.dom_below(2)).count());
        }
    }

    #[test]
    fn pullback_characterisation_on_default_fixtures() {
        for (i, m2) in fixtures().iter().enumerate() {
            for (v, a) in [(Variant::Chain, 2), (Variant::Adf, 3)] {
                let out = lemma_5_2(m2, v, a, &format!("g2-{i}")).unwrap();
                assert!(out.report.passed(), "{:?}", out.report.violations);
                assert!(out.predicate_alone);
            }
        }
    }

    #[test]
    fn gap2_pullback_excludes_a_gap1_member() {
        // θ = [1, 2, 3] over φ = [1, 2, 3, 4]: column 0 read through the
        // inclusion-topped member of F_12 decreases.
        let m2 = fixtures().into_iter().find(|m| m.thetas() == [1, 2, 3]).unwrap();
        let p = Condition::from_fn(Variant::Chain, [1, 2], [0], |r, _| u32::from(r == 1)).unwrap();
        assert!(crate::gap1_thinning::in_p_top(m2.ambient(), &p));
        assert!(!in_pp(&m2, &p));
        let ctx = Gap2Context::new(&m2, Variant::Chain, 2).unwrap();
        let pp = build_pp(&ctx, &build_q(&ctx, &q_universe(&ctx)));
        assert!(!pp.contains(&p));
    }

    #[test]
    fn transport_identity_holds() {
        for (i, m2) in fixtures().iter().enumerate() {
            let rep = lemma_5_1(m2, &format!("g2-{i}")).unwrap();
            assert!(rep.passed(), "{:?}", rep.violations);
        }
    }

    #[test]
    fn star_gap2_on_q_delta_gamma() {
        for m2 in fixtures() {
            let ctx = Gap2Context::new(&m2, Variant::Chain, 2).unwrap();
            let pp = build_pp(&ctx, &build_q(&ctx, &q_universe(&ctx)));
            for ((delta, gamma), qs) in q_delta_gamma(&ctx, &pp) {
                for q in qs {
                    assert_eq!(q.dom().collect::<BTreeSet<_>>(), delta);
                    let st = star_gap2(&ctx, &q, &gamma).unwrap();
                    assert!(st.support.contains(&st.alpha0));
                    assert!(st.support.iter().all(|&a| a <= m2.kappa()));
                    assert_eq!(st.values[&m2.kappa()], q);
                }
            }
        }
    }

    #[test]
    fn empty_condition_in_pp_both_ways() {
        for m2 in fixtures() {
            let ctx = Gap2Context::new(&m2, Variant::Chain, 2).unwrap();
            let u = q_universe(&ctx);
            let pp = build_pp(&ctx, &build_q(&ctx, &u));
            let e = Condition::empty(Variant::Chain);
            assert!(pp.contains(&e));
            assert!(in_pp(&m2, &e));
        }
    }
}
