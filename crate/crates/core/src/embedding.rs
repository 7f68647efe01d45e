//! Embeddings between fake gap-1 morasses, left/right-branching embeddings
//! and amalgamations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap1::FakeGap1Morass;
use crate::order::{compose, OrderMap, Ordinal};
use crate::report::AxiomReport;

pub type FamilyTable = BTreeMap<OrderMap, OrderMap>;

/// A three-part embedding `f`: a map on level indices, one map per level and
/// one function per family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gap1Embedding {
    pub base: OrderMap,
    pub level_maps: Vec<OrderMap>,
    pub family_maps: BTreeMap<(Ordinal, Ordinal), FamilyTable>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RightBranching {
    Yes { eta: Ordinal },
    No { clause: u8, witness: String },
}

impl RightBranching {
    pub fn is_yes(&self) -> bool {
        matches!(self, RightBranching::Yes { .. })
    }
}

impl Gap1Embedding {
    pub fn source_theta(&self) -> Ordinal {
        self.base.dom().saturating_sub(1)
    }

    pub fn target_theta(&self) -> Ordinal {
        self.base.cod().saturating_sub(1)
    }

    pub fn at(&self, z: Ordinal) -> Ordinal {
        self.base.values()[z]
    }

    pub fn level(&self, z: Ordinal) -> &OrderMap {
        &self.level_maps[z]
    }

    /// `f_{ζξ}(b)`, with `f_{ζζ}(id) = id` on the target level.
    pub fn family_map(&self, z: Ordinal, x: Ordinal, b: &OrderMap, target: &FakeGap1Morass) -> Option<OrderMap> {
        if z == x {
            return b.is_identity().then(|| OrderMap::identity(target.phi(self.at(z))));
        }
        self.family_maps.get(&(z, x))?.get(b).cloned()
    }

    pub fn identity(m: &FakeGap1Morass) -> Self {
        let theta = m.theta();
        let family_maps = m
            .families()
            .iter()
            .map(|(k, fam)| (*k, fam.iter().map(|b| (b.clone(), b.clone())).collect()))
            .collect();
        Gap1Embedding {
            base: OrderMap::identity(theta + 1),
            level_maps: m.phis().iter().map(|&p| OrderMap::identity(p)).collect(),
            family_maps,
        }
    }

    /// Restriction to the part of the domain at or below the level `top`.
    pub fn restrict_to(&self, top: Ordinal) -> Gap1Embedding {
        Gap1Embedding {
            base: self.base.restrict(top + 1),
            level_maps: self.level_maps[..=top].to_vec(),
            family_maps: self
                .family_maps
                .iter()
                .filter(|((_, x), _)| *x <= top)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }
}

fn dims_match(f: &Gap1Embedding, m: &FakeGap1Morass, m2: &FakeGap1Morass) -> Result<()> {
    if f.base.dom() != m.theta() + 1 || f.base.cod() != m2.theta() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "base {:?} vs theta {} -> {}",
            f.base,
            m.theta(),
            m2.theta()
        )));
    }
    if f.level_maps.len() != m.theta() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} level maps for theta {}",
            f.level_maps.len(),
            m.theta()
        )));
    }
    Ok(())
}

/// Checks the six embedding properties of `f : m → m2`.
pub fn check_embedding(f: &Gap1Embedding, m: &FakeGap1Morass, m2: &FakeGap1Morass) -> Result<AxiomReport> {
    dims_match(f, m, m2)?;
    let theta = m.theta();
    let mut r = AxiomReport::new();

    r.check(
        "(1)",
        (f.at(theta) != m2.theta()).then(|| format!("f(theta) = {} != {}", f.at(theta), m2.theta())),
    );

    r.check(
        "(2)",
        (0..=theta).find_map(|z| {
            let fz = f.level(z);
            (fz.dom() != m.phi(z) || fz.cod() != m2.phi(f.at(z)))
                .then(|| format!("f_{z} = {fz:?} is not phi_{z} -> phi'_{}", f.at(z)))
        }),
    );

    let mut w3 = None;
    'three: for z in 0..theta {
        for x in z + 1..=theta {
            let table = f.family_maps.get(&(z, x));
            for b in m.family(z, x) {
                match table.and_then(|t| t.get(b)) {
                    None => {
                        w3 = Some(format!("f_({z},{x}) undefined at {b:?}"));
                        break 'three;
                    }
                    Some(c) if !m2.family(f.at(z), f.at(x)).contains(c) => {
                        w3 = Some(format!(
                            "f_({z},{x})({b:?}) = {c:?} not in G'_({},{})",
                            f.at(z),
                            f.at(x)
                        ));
                        break 'three;
                    }
                    Some(_) => {}
                }
            }
            if let Some(extra) = table.and_then(|t| t.keys().find(|b| !m.family(z, x).contains(*b))) {
                w3 = Some(format!("f_({z},{x}) defined on {extra:?} outside G_({z},{x})"));
                break 'three;
            }
        }
    }
    let three_ok = w3.is_none();
    r.check("(3)", w3);

    r.check(
        "(4)",
        (0..theta).find_map(|z| {
            let (Ok(s), Ok(s2)) = (m.split_point(z), m2.split_point(f.at(z))) else {
                return Some(format!("split point undefined at {z}"));
            };
            (f.level(z).apply(s) != Some(s2))
                .then(|| format!("zeta={z}: f_{z}({s}) = {:?} != {s2}", f.level(z).apply(s)))
        }),
    );

    // (5) and (6) only make sense once the tables are total.
    if !three_ok {
        r.check("(5)", Some("family tables incomplete".into()));
        r.check("(6)", Some("family tables incomplete".into()));
        return Ok(r);
    }
    let fm = |z: Ordinal, x: Ordinal, b: &OrderMap| f.family_maps[&(z, x)][b].clone();

    let mut w5 = None;
    'five: for z in 0..theta {
        for x in z + 1..theta {
            for y in x + 1..=theta {
                for b in m.family(z, x) {
                    for c in m.family(x, y) {
                        let cb = compose(c, b)?;
                        let lhs = f.family_maps[&(z, y)].get(&cb).cloned();
                        let rhs = compose(&fm(x, y, c), &fm(z, x, b)).ok();
                        if lhs.is_none() || lhs != rhs {
                            w5 = Some(format!("({z},{x},{y}) b={b:?} c={c:?}"));
                            break 'five;
                        }
                    }
                }
            }
        }
    }
    r.check("(5)", w5);

    let mut w6 = None;
    'six: for z in 0..theta {
        for x in z + 1..=theta {
            for b in m.family(z, x) {
                let lhs = compose(f.level(x), b).ok();
                let rhs = compose(&fm(z, x, b), f.level(z)).ok();
                if lhs.is_none() || lhs != rhs {
                    w6 = Some(format!("({z},{x}) b={b:?}"));
                    break 'six;
                }
            }
        }
    }
    r.check("(6)", w6);
    Ok(r)
}

/// `f ∘ g`, defined componentwise.
pub fn compose_embeddings(f: &Gap1Embedding, g: &Gap1Embedding) -> Result<Gap1Embedding> {
    if g.target_theta() != f.source_theta() {
        return Err(Error::DimensionMismatch(format!(
            "g lands in theta {} but f starts at theta {}",
            g.target_theta(),
            f.source_theta()
        )));
    }
    let base = compose(&f.base, &g.base)?;
    let level_maps = (0..g.level_maps.len())
        .map(|z| compose(f.level(g.at(z)), g.level(z)))
        .collect::<Result<Vec<_>>>()?;
    let mut family_maps = BTreeMap::new();
    for (&(z, x), table) in &g.family_maps {
        let (gz, gx) = (g.at(z), g.at(x));
        let outer = f.family_maps.get(&(gz, gx));
        let mut out = FamilyTable::new();
        for (b, c) in table {
            let image = outer.and_then(|t| t.get(c)).ok_or_else(|| {
                Error::DimensionMismatch(format!("f_({gz},{gx}) undefined at {c:?}"))
            })?;
            out.insert(b.clone(), image.clone());
        }
        family_maps.insert((z, x), out);
    }
    Ok(Gap1Embedding { base, level_maps, family_maps })
}

fn extends(m: &FakeGap1Morass, m2: &FakeGap1Morass) -> bool {
    m.theta() < m2.theta() && m.is_initial_segment_of(m2)
}

/// The left-branching embedding of `m` into its end-extension `m2` with
/// top-level map `f_theta`.
pub fn left_branching(m: &FakeGap1Morass, m2: &FakeGap1Morass, f_theta: &OrderMap) -> Result<Gap1Embedding> {
    if !extends(m, m2) {
        return Err(Error::Precondition("target does not end-extend the source".into()));
    }
    let (theta, theta2) = (m.theta(), m2.theta());
    if !m2.family(theta, theta2).contains(f_theta) {
        return Err(Error::Precondition(format!("{f_theta:?} is not in G'_({theta},{theta2})")));
    }
    let mut base: Vec<Ordinal> = (0..theta).collect();
    base.push(theta2);
    let mut level_maps: Vec<OrderMap> = (0..theta).map(|z| OrderMap::identity(m.phi(z))).collect();
    level_maps.push(f_theta.clone());
    let mut family_maps = BTreeMap::new();
    for (&(z, x), fam) in m.families() {
        let table: FamilyTable = if x < theta {
            fam.iter().map(|b| (b.clone(), b.clone())).collect()
        } else {
            fam.iter().map(|b| Ok((b.clone(), compose(f_theta, b)?))).collect::<Result<_>>()?
        };
        family_maps.insert((z, x), table);
    }
    Ok(Gap1Embedding { base: OrderMap::new(base, theta2 + 1)?, level_maps, family_maps })
}

/// All left-branching embeddings, one per member of `G'_{θθ'}`.
pub fn all_left_branching(m: &FakeGap1Morass, m2: &FakeGap1Morass) -> Result<Vec<Gap1Embedding>> {
    m2.family(m.theta(), m2.theta()).iter().map(|g| left_branching(m, m2, g)).collect()
}

/// Classifies `f : m → m2`, reporting the first violated clause otherwise.
pub fn is_right_branching(f: &Gap1Embedding, m: &FakeGap1Morass, m2: &FakeGap1Morass) -> RightBranching {
    let no = |clause, witness: String| RightBranching::No { clause, witness };
    let theta = m.theta();
    let Some(eta) = f.base.preimage(theta).filter(|&e| e < theta) else {
        return no(2, format!("no eta < {theta} with f(eta) = {theta}"));
    };
    if let Some(z) = (0..eta).find(|&z| f.at(z) != z) {
        return no(1, format!("f({z}) = {} with eta = {eta}", f.at(z)));
    }
    if let Some(k) = (0..=theta - eta).find(|&k| f.at(eta + k) != theta + k) {
        return no(2, format!("f({}) = {} != {}", eta + k, f.at(eta + k), theta + k));
    }
    if let Some(z) = (0..eta).find(|&z| !f.level(z).is_identity()) {
        return no(3, format!("f_{z} = {:?} is not the identity", f.level(z)));
    }
    for ((z, x), table) in &f.family_maps {
        if *x < eta {
            if let Some((b, c)) = table.iter().find(|(b, c)| b != c) {
                return no(4, format!("f_({z},{x})({b:?}) = {c:?}"));
            }
        }
    }
    let f_eta = f.level(eta);
    if !m.family(eta, theta).iter().any(|g| g.values() == f_eta.values()) {
        return no(5, format!("f_{eta} = {f_eta:?} not in G_({eta},{theta})"));
    }
    for z in eta..theta {
        for x in z + 1..=theta {
            let image: BTreeSet<&OrderMap> =
                f.family_maps.get(&(z, x)).map(|t| t.values().collect()).unwrap_or_default();
            let target = m2.family(f.at(z), f.at(x));
            if let Some(missed) = target.iter().find(|c| !image.contains(c)) {
                return no(6, format!("f_({z},{x}) misses {missed:?}"));
            }
        }
    }
    RightBranching::Yes { eta }
}

/// Checks that `family` is exactly the left-branching embeddings plus one
/// right-branching embedding.
pub fn is_amalgamation(family: &BTreeSet<Gap1Embedding>, m: &FakeGap1Morass, m2: &FakeGap1Morass) -> AxiomReport {
    let mut r = AxiomReport::new();
    let bad = family.iter().find_map(|f| match check_embedding(f, m, m2) {
        Err(e) => Some(format!("{e}")),
        Ok(rep) => rep.failures().next().map(|c| format!("{:?} fails {}", f.base, c.clause)),
    });
    r.check("embeddings", bad);

    match all_left_branching(m, m2) {
        Err(e) => r.check("left-branching", Some(format!("{e}"))),
        Ok(lefts) => {
            let missing = lefts.iter().find(|l| !family.contains(*l));
            r.check(
                "left-branching",
                missing.map(|l| format!("missing the left-branching embedding with f_theta = {:?}", l.level(m.theta()))),
            );
            let rights: Vec<_> =
                family.iter().filter(|f| is_right_branching(f, m, m2).is_yes()).collect();
            r.check(
                "right-branching",
                (rights.len() != 1).then(|| format!("{} right-branching embeddings", rights.len())),
            );
            let other = family.iter().find(|f| !lefts.contains(f) && !rights.contains(f));
            r.check("nothing-else", other.map(|f| format!("{:?} is neither left- nor right-branching", f.base)));
        }
    }
    r
}

/// Every right-branching embedding of `m` into its end-extension `m2`.
pub fn right_branching_candidates(m: &FakeGap1Morass, m2: &FakeGap1Morass) -> Vec<Gap1Embedding> {
    let (theta, theta2) = (m.theta(), m2.theta());
    if !extends(m, m2) || theta2 > 2 * theta {
        return Vec::new();
    }
    let eta = 2 * theta - theta2;
    if eta >= theta {
        return Vec::new();
    }
    let base: Vec<Ordinal> = (0..=theta).map(|z| if z < eta { z } else { theta + (z - eta) }).collect();
    let base = OrderMap::from_raw(base, theta2 + 1);
    let mut out = Vec::new();
    let mut levels = Vec::new();
    search_levels(m, m2, &base, eta, &mut levels, &mut out);
    out.retain(|f| {
        check_embedding(f, m, m2).is_ok_and(|r| r.passed()) && is_right_branching(f, m, m2).is_yes()
    });
    out.sort();
    out.dedup();
    out
}

fn search_levels(
    m: &FakeGap1Morass,
    m2: &FakeGap1Morass,
    base: &OrderMap,
    eta: Ordinal,
    levels: &mut Vec<OrderMap>,
    out: &mut Vec<Gap1Embedding>,
) {
    let theta = m.theta();
    let x = levels.len();
    if x > theta {
        search_families(m, m2, base, eta, levels, out);
        return;
    }
    let target = base.values()[x];
    let candidates: Vec<OrderMap> = if x < eta {
        vec![OrderMap::from_raw((0..m.phi(x)).collect(), m2.phi(target))]
    } else if x == eta {
        m.family(eta, theta)
            .iter()
            .filter_map(|g| g.with_cod(m2.phi(target)).ok())
            .collect()
    } else {
        OrderMap::all(m.phi(x), m2.phi(target))
    };
    for cand in candidates {
        if x < theta {
            let (Ok(s), Ok(s2)) = (m.split_point(x), m2.split_point(target)) else { continue };
            if cand.apply(s) != Some(s2) {
                continue;
            }
        }
        let consistent = (0..x).all(|z| {
            m.family(z, x).iter().all(|b| {
                let lhs = compose(&cand, b).expect("dims");
                m2.family(base.values()[z], target)
                    .iter()
                    .any(|c| compose(c, &levels[z]).is_ok_and(|r| r == lhs))
            })
        });
        if !consistent {
            continue;
        }
        levels.push(cand);
        search_levels(m, m2, base, eta, levels, out);
        levels.pop();
    }
}

fn search_families(
    m: &FakeGap1Morass,
    m2: &FakeGap1Morass,
    base: &OrderMap,
    eta: Ordinal,
    levels: &[OrderMap],
    out: &mut Vec<Gap1Embedding>,
) {
    // For each (ζ, ξ, b), the members c with f_ξ ∘ b = c ∘ f_ζ.
    let mut slots: Vec<((Ordinal, Ordinal), OrderMap, Vec<OrderMap>)> = Vec::new();
    for (&(z, x), fam) in m.families() {
        for b in fam {
            let opts: Vec<OrderMap> = if x < eta {
                vec![b.clone()]
            } else {
                let lhs = compose(&levels[x], b).expect("dims");
                m2.family(base.values()[z], base.values()[x])
                    .iter()
                    .filter(|c| compose(c, &levels[z]).is_ok_and(|r| r == lhs))
                    .cloned()
                    .collect()
            };
            if opts.is_empty() {
                return;
            }
            slots.push(((z, x), b.clone(), opts));
        }
    }
    let mut choice = vec![0usize; slots.len()];
    loop {
        let mut family_maps: BTreeMap<(Ordinal, Ordinal), FamilyTable> = BTreeMap::new();
        for (k, (key, b, opts)) in slots.iter().enumerate() {
            family_maps.entry(*key).or_default().insert(b.clone(), opts[choice[k]].clone());
        }
        for key in m.families().keys() {
            family_maps.entry(*key).or_default();
        }
        out.push(Gap1Embedding { base: base.clone(), level_maps: levels.to_vec(), family_maps });
        // odometer
        let mut i = 0;
        loop {
            if i == slots.len() {
                return;
            }
            choice[i] += 1;
            if choice[i] < slots[i].2.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(splits: &[usize], top: usize) -> (FakeGap1Morass, FakeGap1Morass) {
        let full = FakeGap1Morass::from_splits(splits).unwrap();
        (full.truncate(top).unwrap(), full)
    }

    #[test]
    fn identity_embedding_passes() {
        let m = FakeGap1Morass::from_splits(&[0, 1]).unwrap();
        let id = Gap1Embedding::identity(&m);
        assert!(check_embedding(&id, &m, &m).unwrap().passed());
        assert!(matches!(is_right_branching(&id, &m, &m), RightBranching::No { clause: 2, .. }));
    }

    #[test]
    fn left_branching_one_per_choice() {
        let (m, m2) = seg(&[0, 1], 1);
        let lefts = all_left_branching(&m, &m2).unwrap();
        assert_eq!(lefts.len(), 2);
        assert_ne!(lefts[0], lefts[1]);
        for l in &lefts {
            assert!(check_embedding(l, &m, &m2).unwrap().passed());
        }
        let id = OrderMap::inclusion(m.phi(1), m2.phi(2)).unwrap();
        let l = left_branching(&m, &m2, &id).unwrap();
        assert!(l.level_maps.iter().all(|f| f.is_identity()));
        let bogus = OrderMap::new(vec![1, 2], 3).unwrap();
        assert!(left_branching(&m, &m2, &bogus).is_err());
    }

    #[test]
    fn broken_split_point_is_reported() {
        let (m, m2) = seg(&[0, 1], 1);
        let mut l = all_left_branching(&m, &m2).unwrap().remove(0);
        // f_0 = id on 1; send the split point somewhere else.
        l.level_maps[0] = OrderMap::new(vec![1], 2).unwrap();
        let rep = check_embedding(&l, &m, &m2).unwrap();
        match rep.status_of("(4)") {
            Some(crate::report::Status::Fail(w)) => assert!(w.contains("zeta=0")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn right_branching_found_and_amalgamation_holds() {
        for splits in [[0usize, 0], [0, 1]] {
            let (m, m2) = seg(&splits, 1);
            let rights = right_branching_candidates(&m, &m2);
            assert_eq!(rights.len(), 1, "{splits:?}");
            let mut fam: BTreeSet<_> = all_left_branching(&m, &m2).unwrap().into_iter().collect();
            fam.insert(rights[0].clone());
            assert!(is_amalgamation(&fam, &m, &m2).passed());
            assert_eq!(fam.len(), m2.family(1, 2).len() + 1);

            let mut missing = fam.clone();
            let first = all_left_branching(&m, &m2).unwrap().remove(0);
            missing.remove(&first);
            let rep = is_amalgamation(&missing, &m, &m2);
            assert!(!rep.passed());
        }
    }

    #[test]
    fn hand_computed_right_branchings() {
        let (m, m2) = seg(&[0, 1], 1);
        let r = right_branching_candidates(&m, &m2).remove(0);
        assert_eq!(r.base.values(), &[1, 2]);
        assert_eq!(r.level(0).values(), &[1]);
        assert_eq!(r.level(1).values(), &[1, 2]);

        let (m, m2) = seg(&[0, 0], 1);
        let r = right_branching_candidates(&m, &m2).remove(0);
        assert_eq!(r.level(0).values(), &[0]);
        assert_eq!(r.level(1).values(), &[0, 2]);

        let (m, m2) = seg(&[0, 1, 2], 2);
        let r = right_branching_candidates(&m, &m2).remove(0);
        assert_eq!(r.base.values(), &[0, 2, 3]);
        assert_eq!(r.level(1).values(), &[0, 2]);
        assert_eq!(r.level(2).values(), &[0, 2, 3]);
    }

    #[test]
    fn mutated_right_branching_fails_clause_five() {
        let (m, m2) = seg(&[0, 1, 2], 2);
        let mut r = right_branching_candidates(&m, &m2).remove(0);
        assert_eq!(is_right_branching(&r, &m, &m2), RightBranching::Yes { eta: 1 });
        r.level_maps[1] = OrderMap::new(vec![1, 2], 3).unwrap();
        assert!(matches!(is_right_branching(&r, &m, &m2), RightBranching::No { clause: 5, .. }));
    }

    #[test]
    fn composition_with_identity() {
        let (m, m2) = seg(&[0, 1], 1);
        let l = all_left_branching(&m, &m2).unwrap().remove(1);
        let id_src = Gap1Embedding::identity(&m);
        let id_tgt = Gap1Embedding::identity(&m2);
        assert_eq!(compose_embeddings(&l, &id_src).unwrap(), l);
        assert_eq!(compose_embeddings(&id_tgt, &l).unwrap(), l);
        assert!(compose_embeddings(&l, &l).is_err());
    }
}
