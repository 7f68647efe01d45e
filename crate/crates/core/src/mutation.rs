//! Single-field mutations of spec files, for testing the axiom checkers.

use serde::Serialize;

use crate::gap1::Mode;
use crate::spec_file::{Gap1Spec, Gap2Spec};

/// How many mutants the axiom checks (or the loader) rejected.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MutationReport {
    pub fixture: String,
    pub total: usize,
    pub killed: usize,
    pub survivors: Vec<String>,
}

impl MutationReport {
    pub fn kill_rate(&self) -> f64 {
        if self.total == 0 {
            return 1.0;
        }
        self.killed as f64 / self.total as f64
    }

    fn record(&mut self, label: String, rejected: bool) {
        self.total += 1;
        if rejected {
            self.killed += 1;
        } else {
            self.survivors.push(label);
        }
    }
}

/// Another value in `0..cod`, if there is one.
fn flip(v: usize, cod: usize) -> Option<usize> {
    if v + 1 < cod {
        Some(v + 1)
    } else {
        v.checked_sub(1)
    }
}

/// Every mutant of `spec`, labelled.
pub fn gap1_mutants(spec: &Gap1Spec) -> Vec<(String, Gap1Spec)> {
    let mut out = Vec::new();
    for i in 0..spec.phi.len() {
        let mut m = spec.clone();
        m.phi[i] += 1;
        out.push((format!("phi[{i}] += 1"), m));
    }
    for (key, maps) in &spec.families {
        let cod = key
            .split_once(',')
            .and_then(|(_, x)| x.parse::<usize>().ok())
            .and_then(|x| spec.phi.get(x).copied())
            .unwrap_or(0);
        for (i, map) in maps.iter().enumerate() {
            for (j, &v) in map.iter().enumerate() {
                if let Some(w) = flip(v, cod) {
                    let mut m = spec.clone();
                    m.families.get_mut(key).expect("present")[i][j] = w;
                    out.push((format!("families.{key}[{i}][{j}]: {v} -> {w}"), m));
                }
            }
            let mut m = spec.clone();
            m.families.get_mut(key).expect("present").remove(i);
            out.push((format!("families.{key}: drop member {i}"), m));
        }
    }
    out
}

pub fn gap2_mutants(spec: &Gap2Spec) -> Vec<(String, Gap2Spec)> {
    let mut out: Vec<(String, Gap2Spec)> = gap1_mutants(&spec.ambient)
        .into_iter()
        .map(|(label, amb)| (format!("ambient.{label}"), Gap2Spec { ambient: amb, ..spec.clone() }))
        .collect();
    for i in 0..spec.theta.len() {
        let mut m = spec.clone();
        m.theta[i] += 1;
        out.push((format!("theta[{i}] += 1"), m));
    }
    let phi = &spec.ambient.phi;
    let tb = |key: &str| key.split_once(',').and_then(|(_, b)| b.parse::<usize>().ok()).and_then(|b| spec.theta.get(b).copied());
    for (key, members) in &spec.embeddings {
        let top = tb(key).unwrap_or(0);
        for (i, e) in members.iter().enumerate() {
            let at = format!("embeddings.{key}[{i}]");
            let edit = |f: &dyn Fn(&mut Gap2Spec)| {
                let mut m = spec.clone();
                f(&mut m);
                m
            };
            for (j, &v) in e.base.iter().enumerate() {
                if let Some(w) = flip(v, top + 1) {
                    out.push((
                        format!("{at}.base[{j}]: {v} -> {w}"),
                        edit(&|m| m.embeddings.get_mut(key).unwrap()[i].base[j] = w),
                    ));
                }
            }
            for (z, g) in e.level_maps.iter().enumerate() {
                let cod = e.base.get(z).and_then(|&t| phi.get(t)).copied().unwrap_or(0);
                for (j, &v) in g.iter().enumerate() {
                    if let Some(w) = flip(v, cod) {
                        out.push((
                            format!("{at}.level_maps[{z}][{j}]: {v} -> {w}"),
                            edit(&|m| m.embeddings.get_mut(key).unwrap()[i].level_maps[z][j] = w),
                        ));
                    }
                }
            }
            for (fkey, entries) in &e.family_maps {
                let x = fkey.split_once(',').and_then(|(_, x)| x.parse::<usize>().ok()).unwrap_or(0);
                let cod = e.base.get(x).and_then(|&t| phi.get(t)).copied().unwrap_or(0);
                for (k, entry) in entries.iter().enumerate() {
                    for (j, &v) in entry.image.iter().enumerate() {
                        if let Some(w) = flip(v, cod) {
                            out.push((
                                format!("{at}.family_maps.{fkey}[{k}].image[{j}]: {v} -> {w}"),
                                edit(&|m| {
                                    m.embeddings.get_mut(key).unwrap()[i].family_maps.get_mut(fkey).unwrap()[k].image[j] = w
                                }),
                            ));
                        }
                    }
                }
            }
            out.push((
                format!("embeddings.{key}: drop member {i}"),
                edit(&|m| {
                    m.embeddings.get_mut(key).unwrap().remove(i);
                }),
            ));
        }
    }
    out
}

pub fn mutate_gap1(fixture: &str, spec: &Gap1Spec) -> MutationReport {
    let mut rep = MutationReport { fixture: fixture.into(), ..Default::default() };
    for (label, m) in gap1_mutants(spec) {
        let rejected = m.build().map_or(true, |g| !g.check_axioms(Mode::Fake).passed());
        rep.record(label, rejected);
    }
    rep
}

pub fn mutate_gap2(fixture: &str, spec: &Gap2Spec) -> MutationReport {
    let mut rep = MutationReport { fixture: fixture.into(), ..Default::default() };
    for (label, m) in gap2_mutants(spec) {
        let rejected = m.build().map_or(true, |g| !g.check_axioms(Mode::Fake).passed());
        rep.record(label, rejected);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap1::FakeGap1Morass;

    #[test]
    fn m1_mutants_are_all_rejected() {
        let m1 = FakeGap1Morass::from_splits(&[0]).unwrap();
        let spec = Gap1Spec::of(&m1);
        let rep = mutate_gap1("m1", &spec);
        // phi bumps, one flip per value of both maps, two drops.
        assert_eq!(rep.total, 2 + 2 + 2);
        assert_eq!(rep.killed, rep.total, "{:?}", rep.survivors);
    }

    #[test]
    fn flip_stays_in_range() {
        assert_eq!(flip(0, 1), None);
        assert_eq!(flip(0, 2), Some(1));
        assert_eq!(flip(1, 2), Some(0));
    }
}
