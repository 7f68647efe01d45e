//! JSON spec files for gap-1 and gap-2 morasses.
//!
//! Maps are written as dense value vectors; codomains are implied by the
//! levels a map connects. Pair keys are strings `"ζ,ξ"`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::embedding::{FamilyTable, Gap1Embedding};
use crate::error::{Error, Result};
use crate::gap1::FakeGap1Morass;
use crate::gap2::FakeGap2Morass;
use crate::order::{OrderMap, Ordinal};

pub const GAP1_SCHEMA: &str = "morass-gap1/1";
pub const GAP2_SCHEMA: &str = "morass-gap2/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gap1Spec {
    pub schema: String,
    pub theta: Ordinal,
    pub phi: Vec<Ordinal>,
    pub families: BTreeMap<String, Vec<Vec<Ordinal>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gap2Spec {
    pub schema: String,
    pub kappa: Ordinal,
    pub theta: Vec<Ordinal>,
    pub ambient: Gap1Spec,
    pub embeddings: BTreeMap<String, Vec<EmbeddingSpec>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub base: Vec<Ordinal>,
    pub level_maps: Vec<Vec<Ordinal>>,
    /// Per family `"ζ,ξ"`: each member `b` with its image `f_{ζξ}(b)`.
    pub family_maps: BTreeMap<String, Vec<FamilyEntry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntry {
    pub map: Vec<Ordinal>,
    pub image: Vec<Ordinal>,
}

/// A parsed spec file of either kind.
#[derive(Debug, Clone)]
pub enum MorassFile {
    Gap1(FakeGap1Morass),
    Gap2(FakeGap2Morass),
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_err(path, e.into_inner().to_string())
    })
}

/// Reads either schema, dispatching on the `schema` tag.
pub fn parse_morass(text: &str) -> Result<MorassFile> {
    #[derive(Deserialize)]
    struct Tag {
        schema: Option<String>,
    }
    let tag: Tag = from_json(text)?;
    match tag.schema.as_deref() {
        Some(GAP1_SCHEMA) => Ok(MorassFile::Gap1(from_json::<Gap1Spec>(text)?.build()?)),
        Some(GAP2_SCHEMA) => Ok(MorassFile::Gap2(from_json::<Gap2Spec>(text)?.build()?)),
        Some(other) => Err(parse_err("schema", format!("unknown schema `{other}`"))),
        None => Err(parse_err("schema", "missing schema tag")),
    }
}

pub fn parse_gap1(text: &str) -> Result<FakeGap1Morass> {
    from_json::<Gap1Spec>(text)?.build()
}

pub fn parse_gap2(text: &str) -> Result<FakeGap2Morass> {
    from_json::<Gap2Spec>(text)?.build()
}

fn pair_key((a, b): (Ordinal, Ordinal)) -> String {
    format!("{a},{b}")
}

fn parse_pair(path: &str, key: &str) -> Result<(Ordinal, Ordinal)> {
    let bad = || parse_err(format!("{path}.{key}"), "expected a key of the form \"a,b\"");
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn order_map(path: impl Into<String>, values: &[Ordinal], cod: Ordinal) -> Result<OrderMap> {
    OrderMap::new(values.to_vec(), cod).map_err(|e| parse_err(path, e.to_string()))
}

impl Gap1Spec {
    pub fn build(&self) -> Result<FakeGap1Morass> {
        if self.schema != GAP1_SCHEMA {
            return Err(parse_err("schema", format!("expected `{GAP1_SCHEMA}`, found `{}`", self.schema)));
        }
        if self.phi.len() != self.theta + 1 {
            return Err(parse_err("phi", format!("{} levels listed for theta = {}", self.phi.len(), self.theta)));
        }
        let mut families = BTreeMap::new();
        for (key, maps) in &self.families {
            let (z, x) = parse_pair("families", key)?;
            if z >= x || x > self.theta {
                return Err(parse_err(format!("families.{key}"), "need ζ < ξ ≤ theta"));
            }
            let fam: BTreeSet<OrderMap> = maps
                .iter()
                .enumerate()
                .map(|(i, v)| order_map(format!("families.{key}[{i}]"), v, self.phi[x]))
                .collect::<Result<_>>()?;
            families.insert((z, x), fam);
        }
        FakeGap1Morass::new(self.phi.clone(), families)
    }

    pub fn of(m: &FakeGap1Morass) -> Self {
        Gap1Spec {
            schema: GAP1_SCHEMA.into(),
            theta: m.theta(),
            phi: m.phis().to_vec(),
            families: m
                .families()
                .iter()
                .map(|(&k, fam)| (pair_key(k), fam.iter().map(|f| f.values().to_vec()).collect()))
                .collect(),
        }
    }
}

impl Gap2Spec {
    pub fn build(&self) -> Result<FakeGap2Morass> {
        if self.schema != GAP2_SCHEMA {
            return Err(parse_err("schema", format!("expected `{GAP2_SCHEMA}`, found `{}`", self.schema)));
        }
        if self.theta.len() != self.kappa + 1 {
            return Err(parse_err("theta", format!("{} levels listed for kappa = {}", self.theta.len(), self.kappa)));
        }
        let ambient = self.ambient.build().map_err(|e| match e {
            Error::Parse { path, message } => parse_err(format!("ambient.{path}"), message),
            other => other,
        })?;
        let theta_of = |a: Ordinal, path: &str| {
            self.theta.get(a).copied().ok_or_else(|| parse_err(path.to_string(), format!("no level {a}")))
        };
        let phi_of = |z: Ordinal, path: &str| {
            (z <= ambient.theta())
                .then(|| ambient.phi(z))
                .ok_or_else(|| parse_err(path.to_string(), format!("level {z} above the ambient top")))
        };
        let mut families = BTreeMap::new();
        for (key, members) in &self.embeddings {
            let (a, b) = parse_pair("embeddings", key)?;
            let here = format!("embeddings.{key}");
            if a >= b {
                return Err(parse_err(here, "need α < β"));
            }
            let (ta, tb) = (theta_of(a, &here)?, theta_of(b, &here)?);
            let mut fam = BTreeSet::new();
            for (i, e) in members.iter().enumerate() {
                let at = format!("{here}[{i}]");
                let base = order_map(format!("{at}.base"), &e.base, tb + 1)?;
                if base.dom() != ta + 1 {
                    return Err(parse_err(format!("{at}.base"), format!("expected {} entries", ta + 1)));
                }
                let level_maps = e
                    .level_maps
                    .iter()
                    .enumerate()
                    .map(|(z, v)| {
                        let path = format!("{at}.level_maps[{z}]");
                        let target = base.apply(z).ok_or_else(|| parse_err(&path, "no base value for this level"))?;
                        order_map(&path, v, phi_of(target, &path)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut family_maps = BTreeMap::new();
                for (fkey, entries) in &e.family_maps {
                    let path = format!("{at}.family_maps.{fkey}");
                    let (z, x) = parse_pair(&format!("{at}.family_maps"), fkey)?;
                    let target = base.apply(x).ok_or_else(|| parse_err(&path, "family above the source top"))?;
                    let table: FamilyTable = entries
                        .iter()
                        .enumerate()
                        .map(|(j, en)| {
                            let p = format!("{path}[{j}]");
                            Ok((
                                order_map(format!("{p}.map"), &en.map, phi_of(x, &p)?)?,
                                order_map(format!("{p}.image"), &en.image, phi_of(target, &p)?)?,
                            ))
                        })
                        .collect::<Result<_>>()?;
                    family_maps.insert((z, x), table);
                }
                fam.insert(Gap1Embedding { base, level_maps, family_maps });
            }
            families.insert((a, b), fam);
        }
        FakeGap2Morass::new(self.theta.clone(), ambient, families)
    }

    pub fn of(m2: &FakeGap2Morass) -> Self {
        let embedding = |f: &Gap1Embedding| EmbeddingSpec {
            base: f.base.values().to_vec(),
            level_maps: f.level_maps.iter().map(|g| g.values().to_vec()).collect(),
            family_maps: f
                .family_maps
                .iter()
                .map(|(&k, table)| {
                    let entries = table
                        .iter()
                        .map(|(b, img)| FamilyEntry { map: b.values().to_vec(), image: img.values().to_vec() })
                        .collect();
                    (pair_key(k), entries)
                })
                .collect(),
        };
        Gap2Spec {
            schema: GAP2_SCHEMA.into(),
            kappa: m2.kappa(),
            theta: m2.thetas().to_vec(),
            ambient: Gap1Spec::of(m2.ambient()),
            embeddings: m2
                .families()
                .iter()
                .map(|(&k, fam)| (pair_key(k), fam.iter().map(embedding).collect()))
                .collect(),
        }
    }
}

pub fn to_json<T: Serialize>(spec: &T) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("spec types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap1::{generate_gap1, Mode};
    use crate::gap2::{generate_gap2, Gap2Bounds};

    const M1: &str = r#"{
        "schema": "morass-gap1/1",
        "theta": 1,
        "phi": [1, 2],
        "families": { "0,1": [[0], [1]] }
    }"#;

    #[test]
    fn hand_written_m1_passes() {
        let m = parse_gap1(M1).unwrap();
        assert_eq!(m.phis(), &[1, 2]);
        assert!(m.check_axioms(Mode::Fake).passed());
        assert!(matches!(parse_morass(M1).unwrap(), MorassFile::Gap1(_)));
    }

    #[test]
    fn errors_carry_the_field_path() {
        let bad_type = M1.replace("[[0], [1]]", r#"[[0], ["x"]]"#);
        match parse_gap1(&bad_type) {
            Err(Error::Parse { path, message }) => {
                assert_eq!(path, "families.0,1[1][0]");
                assert!(message.contains("line 5"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let not_monotone = M1.replace(r#""phi": [1, 2]"#, r#""phi": [1, 1]"#).replace("[[0], [1]]", "[[0], [2]]");
        assert!(matches!(parse_gap1(&not_monotone), Err(Error::Parse { path, .. }) if path == "families.0,1[1]"));
        let unknown = M1.replace(r#""theta": 1,"#, r#""theta": 1, "psi": 0,"#);
        assert!(matches!(parse_gap1(&unknown), Err(Error::Parse { .. })));
        assert!(matches!(parse_morass("{}"), Err(Error::Parse { path, .. }) if path == "schema"));
    }

    #[test]
    fn gap1_round_trip() {
        for m in generate_gap1(3, 5) {
            let text = to_json(&Gap1Spec::of(&m));
            assert_eq!(parse_gap1(&text).unwrap(), m);
        }
    }

    #[test]
    fn gap2_round_trip() {
        for m2 in generate_gap2(Gap2Bounds::default()) {
            let spec = Gap2Spec::of(&m2);
            let back = parse_gap2(&to_json(&spec)).unwrap();
            assert_eq!(Gap2Spec::of(&back), spec);
            assert_eq!(back.check_axioms(Mode::Fake).passed(), m2.check_axioms(Mode::Fake).passed());
        }
    }
}
