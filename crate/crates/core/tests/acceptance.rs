//! Acceptance criteria 1–9, one printed line each.
//!
//! Bounds, alphabets and time limits are pinned below. The run asserts that
//! the failing criteria are exactly `KNOWN_FAILURES`; see the README for the
//! analysis behind each entry.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use morass_core::forcing::{enumerate_conditions, Variant};
use morass_core::gap1::{generate_gap1, Mode};
use morass_core::gap1_thinning::in_p_top;
use morass_core::gap2::{generate_gap2, FakeGap2Morass, Gap2Bounds};
use morass_core::gap2_thinning::{in_pp, lemma_5_2};
use morass_core::generic::{check_objects, dense_catalogue, dense_lists, extract_objects, generic_filter, EnumeratedForcing};
use morass_core::mutation::{mutate_gap1, mutate_gap2};
use morass_core::report::LemmaReport;
use morass_core::spec_file::{parse_morass, Gap1Spec, Gap2Spec, MorassFile};
use morass_core::suites::{run_all, run_suite, Alphabets, Fixture};
use rayon::prelude::*;

const KNOWN_FAILURES: &[u32] = &[7];

const MIN_MUTATIONS: usize = 50;
const LIMIT_1: Duration = Duration::from_secs(10);
const LIMIT_2: Duration = Duration::from_secs(60);
const LIMIT_3: Duration = Duration::from_secs(60);
const LIMIT_4: Duration = Duration::from_secs(300);
const LIMIT_5: Duration = Duration::from_secs(600);
const LIMIT_6: Duration = Duration::from_secs(300);
const LIMIT_7: Duration = Duration::from_secs(120);
const LIMIT_8: Duration = Duration::from_secs(120);

/// Gap-1 bounds for criterion 2 and for criteria 4 and 6.
const GAP1_STRUCTURE: (usize, usize) = (3, 5);
const GAP1_FORCING: (usize, usize) = (3, 4);
const ADF_ALPHABET: u32 = 3;
/// Extended gap-2 fixtures used by the structural criteria and by 8.
const EXTENDED: Gap2Bounds = Gap2Bounds { kappa_max: 3, theta_max: 4, phi_max: 6 };
const MAX_DENSE: usize = 8;
const MAX_GROW: usize = 3;

struct Line {
    id: u32,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn shipped() -> Vec<(String, String, MorassFile)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths
        .into_iter()
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let m = parse_morass(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, text, m)
        })
        .collect()
}

fn gap1_fixtures((theta, phi): (usize, usize)) -> Vec<Fixture> {
    generate_gap1(theta, phi)
        .into_iter()
        .map(|morass| Fixture::Gap1 { name: format!("g1-{:?}", morass.phis()), morass })
        .collect()
}

fn gap2_named(bounds: Gap2Bounds, tag: &str) -> Vec<Fixture> {
    generate_gap2(bounds)
        .into_iter()
        .enumerate()
        .map(|(i, morass)| Fixture::Gap2 { name: format!("{tag}-{i}-k{}-{:?}", morass.kappa(), morass.ambient().phis()), morass })
        .collect()
}

/// Shipped gap-2 files, the default-bound generator and the extended one.
fn all_gap2() -> Vec<Fixture> {
    let mut fx: Vec<Fixture> = shipped()
        .into_iter()
        .filter_map(|(name, _, m)| match m {
            MorassFile::Gap2(morass) => Some(Fixture::Gap2 { name, morass }),
            MorassFile::Gap1(_) => None,
        })
        .collect();
    fx.extend(gap2_named(Gap2Bounds::default(), "g2"));
    fx.extend(gap2_named(EXTENDED, "g2x"));
    fx
}

fn summarize(reports: &[LemmaReport]) -> (bool, String) {
    let instances: u64 = reports.iter().map(|r| r.instances).sum();
    let bad: Vec<&LemmaReport> = reports.iter().filter(|r| !r.passed()).collect();
    let vacuous = reports.iter().filter(|r| r.vacuous).count();
    let mut detail = format!("{} reports, {instances} instances, {vacuous} vacuous", reports.len());
    for r in bad.iter().take(4) {
        detail.push_str(&format!("; {} {} has {} violations", r.suite, r.fixture, r.violations.len()));
        if let Some(w) = r.violations.first() {
            detail.push_str(&format!(" (first: {w})"));
        }
    }
    (bad.is_empty() && instances > 0, detail)
}

fn timed(id: u32, limit: Duration, f: impl FnOnce() -> (bool, String)) -> Line {
    let t = Instant::now();
    let (ok, detail) = f();
    let elapsed = t.elapsed();
    let within = elapsed < limit;
    let detail = if within { detail } else { format!("{detail}; over the {limit:?} limit") };
    Line { id, pass: ok && within, detail, elapsed }
}

fn criterion_1() -> Line {
    timed(1, LIMIT_1, || {
        let mut total = 0;
        let mut killed = 0;
        let mut notes = Vec::new();
        for (name, _, m) in shipped() {
            let (accepted, rep) = match &m {
                MorassFile::Gap1(g) => (g.check_axioms(Mode::Fake).passed(), mutate_gap1(&name, &Gap1Spec::of(g))),
                MorassFile::Gap2(g) => (g.check_axioms(Mode::Fake).passed(), mutate_gap2(&name, &Gap2Spec::of(g))),
            };
            if !accepted {
                notes.push(format!("{name} rejected"));
            }
            total += rep.total;
            killed += rep.killed;
            notes.extend(rep.survivors.iter().take(2).map(|s| format!("{name}: survivor {s}")));
        }
        let ok = notes.is_empty() && total >= MIN_MUTATIONS && killed == total;
        (ok, format!("{killed}/{total} mutations killed{}", notes.iter().map(|n| format!("; {n}")).collect::<String>()))
    })
}

fn criterion_2() -> Line {
    timed(2, LIMIT_2, || {
        let mut fx = gap1_fixtures(GAP1_STRUCTURE);
        fx.extend(all_gap2());
        let mut reports = Vec::new();
        for s in ["3.1", "3.2", "3.4", "3.5"] {
            reports.extend(run_suite(s, &fx, &[], Alphabets { adf: ADF_ALPHABET }).unwrap());
        }
        summarize(&reports)
    })
}

fn criterion_3() -> Line {
    timed(3, LIMIT_3, || summarize(&run_suite("3.6", &all_gap2(), &[], Alphabets { adf: ADF_ALPHABET }).unwrap()))
}

fn criterion_4() -> Line {
    timed(4, LIMIT_4, || {
        let fx = gap1_fixtures(GAP1_FORCING);
        summarize(&run_suite("4.1", &fx, &[Variant::Chain, Variant::Adf], Alphabets { adf: ADF_ALPHABET }).unwrap())
    })
}

fn criterion_5() -> Line {
    timed(5, LIMIT_5, || {
        let mut reports = Vec::new();
        let mut notes = Vec::new();
        for m2 in generate_gap2(Gap2Bounds::default()) {
            for (v, a) in [(Variant::Chain, 2), (Variant::Adf, ADF_ALPHABET)] {
                let name = format!("k{}-{:?}", m2.kappa(), m2.ambient().phis());
                let out = lemma_5_2(&m2, v, a, &name).unwrap();
                notes.push(format!(
                    "{name} {v:?}: predicate alone {}, with the gap-1 predicate {}",
                    if out.predicate_alone { "equal" } else { "differs" },
                    if out.with_gap1_predicate { "equal" } else { "differs" }
                ));
                reports.push(out.report);
            }
        }
        let (ok, detail) = summarize(&reports);
        (ok, format!("{detail}; {}", notes.join("; ")))
    })
}

fn criterion_6() -> Line {
    timed(6, LIMIT_6, || {
        let mut reports = Vec::new();
        let g1 = gap1_fixtures(GAP1_FORCING);
        // About three minutes of this is adf pairs on φ = [1,2,3,4].
        reports.extend(run_suite("4.2", &g1, &[Variant::Chain, Variant::Adf], Alphabets { adf: ADF_ALPHABET }).unwrap());
        let g2 = gap2_named(Gap2Bounds::default(), "g2");
        reports.extend(run_suite("5.3", &g2, &[Variant::Chain, Variant::Adf], Alphabets { adf: ADF_ALPHABET }).unwrap());
        summarize(&reports)
    })
}

fn criterion_7() -> Line {
    timed(7, LIMIT_7, || {
        let g2 = gap2_named(Gap2Bounds::default(), "g2");
        let reports = run_suite("5.4", &g2, &[Variant::Chain, Variant::Adf], Alphabets { adf: ADF_ALPHABET }).unwrap();
        let (ok, mut detail) = summarize(&reports);
        for r in &reports {
            for o in &r.observations {
                detail.push_str(&format!("; {}: {o}", r.fixture));
            }
        }
        (ok, detail)
    })
}

fn generic_members(m2: &FakeGap2Morass, v: Variant, alphabet: u32) -> Vec<morass_core::forcing::Condition> {
    let amb = m2.ambient();
    enumerate_conditions(v, amb.phi(amb.theta()), m2.kappa(), alphabet)
        .into_par_iter()
        .filter(|c| in_pp(m2, c) && in_p_top(amb, c))
        .collect()
}

fn criterion_8() -> Line {
    timed(8, LIMIT_8, || {
        let mut fixtures: Vec<(FakeGap2Morass, u32)> =
            generate_gap2(Gap2Bounds::default()).into_iter().map(|m| (m, ADF_ALPHABET)).collect();
        fixtures.extend(generate_gap2(EXTENDED).into_iter().filter(|m| m.kappa() == 3).map(|m| (m, 2)));
        let (mut lists, mut met, mut failures) = (0usize, 0usize, Vec::new());
        let mut grow_max = 0;
        for (m2, adf_alphabet) in &fixtures {
            for (v, a) in [(Variant::Chain, 2), (Variant::Adf, *adf_alphabet)] {
                let poset = EnumeratedForcing::new(m2, v, generic_members(m2, v, a));
                let candidates = dense_lists(&dense_catalogue(m2, v, MAX_GROW), MAX_DENSE);
                let outcomes: Vec<(bool, Option<String>, usize)> = candidates
                    .par_iter()
                    .filter(|l| poset.realizable(l))
                    .map(|l| {
                        let grow = l
                            .iter()
                            .filter_map(|d| match d {
                                morass_core::generic::DenseSetSpec::GrowDifference { n, .. } => Some(*n),
                                _ => None,
                            })
                            .max()
                            .unwrap_or(0);
                        match generic_filter(&poset, l) {
                            Ok(f) => {
                                let objects = extract_objects(&f).expect("descending sequence");
                                let bad = check_objects(m2, &f, &objects);
                                let chain_ok = f.sequence.windows(2).all(|w| morass_core::forcing::leq(&w[1], &w[0]).unwrap());
                                let ok = bad.is_empty() && chain_ok && f.meets_all();
                                (ok, (!ok).then(|| format!("{l:?}: {bad:?}")), grow)
                            }
                            Err(e) => (false, Some(format!("{l:?}: {e}")), grow),
                        }
                    })
                    .collect();
                for (ok, why, grow) in outcomes {
                    lists += 1;
                    if ok {
                        met += 1;
                        grow_max = grow_max.max(grow);
                    } else if let Some(w) = why {
                        failures.push(w);
                    }
                }
            }
        }
        let detail = format!(
            "{met}/{lists} realizable lists met on {} fixtures, largest grow-difference met n = {grow_max}{}",
            fixtures.len(),
            failures.first().map(|w| format!("; first failure {w}")).unwrap_or_default()
        );
        (failures.is_empty() && lists > 0 && grow_max == MAX_GROW, detail)
    })
}

fn criterion_9() -> Line {
    timed(9, Duration::MAX, || {
        let mut fx: Vec<Fixture> = shipped()
            .into_iter()
            .map(|(name, _, m)| match m {
                MorassFile::Gap1(morass) => Fixture::Gap1 { name, morass },
                MorassFile::Gap2(morass) => Fixture::Gap2 { name, morass },
            })
            .collect();
        fx.extend(gap1_fixtures((2, 3)));
        let run = || {
            let reports = run_all(&fx, &[Variant::Chain, Variant::Adf], Alphabets { adf: 2 }).unwrap();
            serde_json::to_vec_pretty(&reports).unwrap()
        };
        let (a, b) = (run(), run());
        (a == b, format!("{} bytes per full-suite report over {} fixtures", a.len(), fx.len()))
    })
}

#[test]
fn acceptance() {
    let lines = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    for l in &lines {
        println!("criterion {}: {} ({:.1?}) {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.elapsed, l.detail);
    }
    let failing: BTreeSet<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    let known: BTreeSet<u32> = KNOWN_FAILURES.iter().copied().collect();
    assert_eq!(failing, known, "failing criteria differ from the documented set");
}
