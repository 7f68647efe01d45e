//! Named lemma suites run over a fixture set.

use crate::error::{Error, Result};
use crate::forcing::Variant;
use crate::gap1::{lemma_3_1, lemma_3_2, lemma_3_5a, FakeGap1Morass};
use crate::gap1_thinning::lemma_4_1;
use crate::gap2::{lemma_3_4, lemma_3_5b, lemma_3_6, FakeGap2Morass};
use crate::gap2_thinning::{lemma_5_1, lemma_5_2};
use crate::harness::{lemma42_suite, lemma53_suite, lemma54_suite, lemma55_suite};
use crate::report::LemmaReport;

pub const SUITES: [&str; 12] = ["3.1", "3.2", "3.4", "3.5", "3.6", "4.1", "4.2", "5.1", "5.2", "5.3", "5.4", "5.5"];

#[derive(Debug, Clone)]
pub enum Fixture {
    Gap1 { name: String, morass: FakeGap1Morass },
    Gap2 { name: String, morass: FakeGap2Morass },
}

impl Fixture {
    pub fn name(&self) -> &str {
        match self {
            Fixture::Gap1 { name, .. } | Fixture::Gap2 { name, .. } => name,
        }
    }
}

/// Value alphabet per variant: chains are 0/1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabets {
    pub adf: u32,
}

impl Alphabets {
    pub fn of(self, variant: Variant) -> u32 {
        match variant {
            Variant::Chain => 2,
            Variant::Adf => self.adf,
        }
    }
}

/// Runs `suite` on every fixture it applies to, in fixture order, once per
/// variant where the suite is variant-dependent. Violations are sorted so
/// reports do not depend on set iteration order.
pub fn run_suite(suite: &str, fixtures: &[Fixture], variants: &[Variant], alphabets: Alphabets) -> Result<Vec<LemmaReport>> {
    if !SUITES.contains(&suite) {
        return Err(Error::Precondition(format!("unknown suite `{suite}`")));
    }
    let mut out = Vec::new();
    for fx in fixtures {
        match (suite, fx) {
            ("3.1", Fixture::Gap1 { name, morass }) => out.push(lemma_3_1(morass, name)),
            ("3.2", Fixture::Gap1 { name, morass }) => out.push(lemma_3_2(morass, name)),
            ("3.5", Fixture::Gap1 { name, morass }) => out.push(lemma_3_5a(morass, name)),
            ("3.4", Fixture::Gap2 { name, morass }) => out.push(lemma_3_4(morass, name)),
            ("3.5", Fixture::Gap2 { name, morass }) => out.push(lemma_3_5b(morass, name)),
            ("3.6", Fixture::Gap2 { name, morass }) => out.push(lemma_3_6(morass, name)),
            ("5.1", Fixture::Gap2 { name, morass }) => out.push(lemma_5_1(morass, name)?),
            ("4.1" | "4.2", Fixture::Gap1 { name, morass }) => {
                for &v in variants {
                    let a = alphabets.of(v);
                    out.push(match suite {
                        "4.1" => lemma_4_1(morass, v, a, name),
                        _ => lemma42_suite(morass, v, a, name)?,
                    });
                }
            }
            ("5.2" | "5.3" | "5.4" | "5.5", Fixture::Gap2 { name, morass }) => {
                for &v in variants {
                    let a = alphabets.of(v);
                    out.push(match suite {
                        "5.2" => lemma_5_2(morass, v, a, name)?.report,
                        "5.3" => lemma53_suite(morass, v, a, name)?,
                        "5.4" => lemma54_suite(morass, v, a, name)?,
                        _ => lemma55_suite(morass, v, a, name)?,
                    });
                }
            }
            _ => {}
        }
    }
    for r in &mut out {
        r.violations.sort();
    }
    Ok(out)
}

/// Every suite in `SUITES` order.
pub fn run_all(fixtures: &[Fixture], variants: &[Variant], alphabets: Alphabets) -> Result<Vec<LemmaReport>> {
    let mut out = Vec::new();
    for s in SUITES {
        out.extend(run_suite(s, fixtures, variants, alphabets)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap1::generate_gap1;
    use crate::gap2::{generate_gap2, Gap2Bounds};

    fn small() -> Vec<Fixture> {
        let mut fx: Vec<Fixture> = generate_gap1(2, 3)
            .into_iter()
            .enumerate()
            .map(|(i, morass)| Fixture::Gap1 { name: format!("g1-{i}"), morass })
            .collect();
        let b = Gap2Bounds { kappa_max: 1, theta_max: 2, phi_max: 3 };
        fx.extend(generate_gap2(b).into_iter().enumerate().map(|(i, morass)| Fixture::Gap2 { name: format!("g2-{i}"), morass }));
        fx
    }

    #[test]
    fn every_suite_reports_on_its_fixture_kind() {
        let fx = small();
        let reports = run_all(&fx, &[Variant::Chain, Variant::Adf], Alphabets { adf: 2 }).unwrap();
        for s in SUITES {
            assert!(reports.iter().any(|r| r.suite.starts_with(s)), "no report for {s}");
        }
        assert!(run_suite("9.9", &fx, &[], Alphabets { adf: 2 }).is_err());
    }
}
