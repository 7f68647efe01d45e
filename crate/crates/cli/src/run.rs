use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use morass_core::error::Error;
use morass_core::forcing::{Condition, Variant};
use morass_core::gap1::{FakeGap1Morass, Mode};
use morass_core::gap1_thinning::build_p;
use morass_core::gap2::FakeGap2Morass;
use morass_core::gap2_thinning::{build_pp, build_q, q_universe, Gap2Context};
use morass_core::generic::{check_objects, extract_objects, generic_filter, EnumeratedForcing, GenericObjects};
use morass_core::report::{AxiomReport, LemmaReport};
use morass_core::suites::{run_all, run_suite, Alphabets, Fixture, SUITES};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{self, canonical_text, digest, info, variants, Bounds, FixtureInfo, VariantArg};
use crate::{exit, Cli, ForcingCmd, Format, GenericCmd, Group, Kind, LemmasCmd, MorassCmd};

pub const REPORT_SCHEMA: &str = "morass-report/1";

/// Echo of the effective configuration, embedded in every report.
#[derive(Debug, Serialize)]
struct ConfigEcho {
    bounds: String,
    variant: Option<VariantArg>,
    suite: Option<String>,
    inputs: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Envelope {
    schema: &'static str,
    command: &'static str,
    config: ConfigEcho,
    fixtures: Vec<FixtureInfo>,
    passed: bool,
    results: Value,
}

struct Outcome {
    envelope: Envelope,
    text: String,
    code: u8,
}

pub fn run(cli: &Cli) -> Result<u8, String> {
    let out = match &cli.group {
        Group::Morass(MorassCmd::Check { files }) => check(cli, files)?,
        Group::Morass(MorassCmd::Generate { kind, dir }) => generate(cli, *kind, dir)?,
        Group::Forcing(ForcingCmd::Enumerate { files }) => enumerate(cli, files)?,
        Group::Lemmas(LemmasCmd::Run { suite, files }) => lemmas(cli, suite, files)?,
        Group::Generic(GenericCmd::Extract { file, dense }) => generic(cli, file, dense)?,
    };
    let rendered = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.envelope).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
        Format::Text => {
            let e = &out.envelope;
            let mut s = format!("# {} {} bounds={}\n", e.schema, e.command, e.config.bounds);
            for f in &e.fixtures {
                let _ = writeln!(s, "# fixture {} {} sha256={}", f.name, f.kind, f.sha256);
            }
            s.push_str(&out.text);
            let _ = writeln!(s, "{}", if e.passed { "PASS" } else { "FAIL" });
            s
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(out.code)
}

fn echo(cli: &Cli, suite: Option<&str>, inputs: &[PathBuf]) -> ConfigEcho {
    ConfigEcho {
        bounds: cli.bounds.to_string(),
        variant: cli.variant,
        suite: suite.map(str::to_string),
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
    }
}

fn envelope(cli: &Cli, command: &'static str, suite: Option<&str>, inputs: &[PathBuf], fixtures: &[Fixture]) -> Envelope {
    Envelope {
        schema: REPORT_SCHEMA,
        command,
        config: echo(cli, suite, inputs),
        fixtures: fixtures.iter().map(info).collect(),
        passed: true,
        results: Value::Null,
    }
}

fn code_of(passed: bool) -> u8 {
    if passed {
        exit::PASS
    } else {
        exit::FAIL
    }
}

/// Explicit files, else the fixture directory.
fn inputs_or_dir(cli: &Cli, files: &[PathBuf]) -> Result<Vec<Fixture>, String> {
    if !files.is_empty() {
        return files.iter().map(|p| config::load_file(p)).collect();
    }
    match &cli.fixtures {
        Some(dir) => config::load_dir(dir),
        None => Err("no input files and no fixture directory (--fixtures or MORASS_FIXTURE_DIR)".into()),
    }
}

fn check(cli: &Cli, files: &[PathBuf]) -> Result<Outcome, String> {
    let fixtures = inputs_or_dir(cli, files)?;
    let mut env = envelope(cli, "morass check", None, files, &fixtures);
    let mut text = String::new();
    let mut results = Vec::new();
    for fx in &fixtures {
        let rep: AxiomReport = match fx {
            Fixture::Gap1 { morass, .. } => morass.check_axioms(Mode::Fake),
            Fixture::Gap2 { morass, .. } => morass.check_axioms(Mode::Fake),
        };
        env.passed &= rep.passed();
        let _ = writeln!(text, "{}: {}", fx.name(), if rep.passed() { "pass" } else { "FAIL" });
        for line in rep.to_string().lines() {
            let _ = writeln!(text, "  {line}");
        }
        results.push(json!({ "fixture": fx.name(), "passed": rep.passed(), "clauses": rep.clauses }));
    }
    env.results = Value::Array(results);
    let code = code_of(env.passed);
    Ok(Outcome { envelope: env, text, code })
}

fn generate(cli: &Cli, kind: Kind, dir: &std::path::Path) -> Result<Outcome, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let fixtures: Vec<Fixture> = config::generated(&cli.bounds)
        .into_iter()
        .filter(|f| matches!((kind, f), (Kind::Gap1, Fixture::Gap1 { .. }) | (Kind::Gap2, Fixture::Gap2 { .. })))
        .collect();
    let mut env = envelope(cli, "morass generate", None, &[], &fixtures);
    let mut text = String::new();
    let mut written = Vec::new();
    for fx in &fixtures {
        let path = dir.join(format!("{}.json", fx.name()));
        let body = canonical_text(fx);
        std::fs::write(&path, &body).map_err(|e| format!("{}: {e}", path.display()))?;
        let _ = writeln!(text, "{} sha256={}", path.display(), digest(&body));
        written.push(path.display().to_string());
    }
    env.results = json!({ "count": written.len(), "files": written });
    Ok(Outcome { envelope: env, text, code: exit::PASS })
}

fn sorted_encoded<'a>(items: impl Iterator<Item = &'a Condition>, bounds: &Bounds) -> Vec<String> {
    let mut v: Vec<&Condition> = items.filter(|c| c.within(bounds.rows, bounds.cols)).collect();
    v.sort();
    v.into_iter().map(Condition::encode).collect()
}

fn enumerate_gap1(m: &FakeGap1Morass, v: Variant, bounds: &Bounds, text: &mut String) -> Value {
    let fam = build_p(m, v, Alphabets { adf: bounds.alphabet }.of(v), usize::MAX);
    let levels: Vec<Value> = (0..=m.theta())
        .map(|beta| {
            let members = sorted_encoded(fam.level(beta).iter(), bounds);
            let _ = writeln!(text, "  {v:?} P_{} (level {beta}): {}", m.phi(beta), fam.level(beta).len());
            for c in &members {
                let _ = writeln!(text, "    {c}");
            }
            json!({ "level": beta, "phi": m.phi(beta), "count": fam.level(beta).len(), "members": members })
        })
        .collect();
    json!({ "variant": v, "p_levels": levels })
}

fn enumerate_gap2(m2: &FakeGap2Morass, v: Variant, bounds: &Bounds, text: &mut String) -> Result<Value, String> {
    let ctx = Gap2Context::new(m2, v, Alphabets { adf: bounds.alphabet }.of(v)).map_err(|e| e.to_string())?;
    let qfam = build_q(&ctx, &q_universe(&ctx));
    let q_levels: Vec<Value> = (0..=m2.kappa())
        .map(|beta| {
            let n = qfam.level(beta).len();
            let _ = writeln!(text, "  {v:?} Q_{} (level {beta}): {n}", m2.theta(beta));
            json!({ "level": beta, "theta": m2.theta(beta), "count": n })
        })
        .collect();
    let pp: HashSet<Condition> = build_pp(&ctx, &qfam);
    let members = sorted_encoded(pp.iter(), bounds);
    let _ = writeln!(text, "  {v:?} final poset: {}", pp.len());
    for c in &members {
        let _ = writeln!(text, "    {c}");
    }
    Ok(json!({ "variant": v, "q_levels": q_levels, "poset": { "count": pp.len(), "members": members } }))
}

fn enumerate(cli: &Cli, files: &[PathBuf]) -> Result<Outcome, String> {
    let Some(variant) = cli.variant else { return Err("forcing enumerate needs --variant".into()) };
    let v: Variant = variant.into();
    let fixtures =
        if files.is_empty() { config::generated(&cli.bounds) } else { inputs_or_dir(cli, files)? };
    let mut env = envelope(cli, "forcing enumerate", None, files, &fixtures);
    let mut text = String::new();
    let mut results = Vec::new();
    for fx in &fixtures {
        let _ = writeln!(text, "{}:", fx.name());
        let body = match fx {
            Fixture::Gap1 { morass, .. } => enumerate_gap1(morass, v, &cli.bounds, &mut text),
            Fixture::Gap2 { morass, .. } => enumerate_gap2(morass, v, &cli.bounds, &mut text)?,
        };
        results.push(json!({ "fixture": fx.name(), "listing": body }));
    }
    env.results = Value::Array(results);
    Ok(Outcome { envelope: env, text, code: exit::PASS })
}

fn render_lemma(r: &LemmaReport, text: &mut String) {
    let status = match (r.passed(), r.vacuous) {
        (false, _) => "FAIL",
        (true, true) => "vacuous",
        (true, false) => "pass",
    };
    let _ = writeln!(text, "{} {}: {status} instances={} violations={}", r.suite, r.fixture, r.instances, r.violations.len());
    for w in r.violations.iter().take(5) {
        let _ = writeln!(text, "  violation: {w}");
    }
    for o in &r.observations {
        let _ = writeln!(text, "  note: {o}");
    }
}

fn lemmas(cli: &Cli, suite: &str, files: &[PathBuf]) -> Result<Outcome, String> {
    if suite != "all" && !SUITES.contains(&suite) {
        return Err(format!("unknown suite `{suite}`; expected one of {} or all", SUITES.join(", ")));
    }
    let fixtures = if files.is_empty() {
        let mut fx = config::generated(&cli.bounds);
        if let Some(dir) = &cli.fixtures {
            fx.extend(config::load_dir(dir)?);
        }
        fx
    } else {
        inputs_or_dir(cli, files)?
    };
    let alphabets = Alphabets { adf: cli.bounds.alphabet };
    let vs = variants(cli.variant);
    let reports = if suite == "all" {
        run_all(&fixtures, &vs, alphabets)
    } else {
        run_suite(suite, &fixtures, &vs, alphabets)
    }
    .map_err(|e| e.to_string())?;
    let mut env = envelope(cli, "lemmas run", Some(suite), files, &fixtures);
    let mut text = String::new();
    for r in &reports {
        env.passed &= r.passed();
        render_lemma(r, &mut text);
    }
    env.results = serde_json::to_value(&reports).map_err(|e| e.to_string())?;
    let code = code_of(env.passed);
    Ok(Outcome { envelope: env, text, code })
}

fn generic(cli: &Cli, file: &PathBuf, dense: &[morass_core::generic::DenseSetSpec]) -> Result<Outcome, String> {
    let Some(variant) = cli.variant else { return Err("generic extract needs --variant".into()) };
    let v: Variant = variant.into();
    let fx = config::load_file(file)?;
    let Fixture::Gap2 { morass: m2, .. } = &fx else { return Err(format!("{}: generic extract needs a gap-2 morass", file.display())) };
    let ctx = Gap2Context::new(m2, v, Alphabets { adf: cli.bounds.alphabet }.of(v)).map_err(|e| e.to_string())?;
    let members = build_pp(&ctx, &build_q(&ctx, &q_universe(&ctx)));
    let poset = EnumeratedForcing::new(m2, v, members);
    let mut env = envelope(cli, "generic extract", None, std::slice::from_ref(file), std::slice::from_ref(&fx));
    let dense_text: Vec<String> = dense.iter().map(ToString::to_string).collect();
    let mut text = format!("dense: {}\n", dense_text.join(" "));
    match generic_filter(&poset, dense) {
        Ok(filter) => {
            let objects = extract_objects(&filter).map_err(|e| e.to_string())?;
            let violations = check_objects(m2, &filter, &objects);
            env.passed = violations.is_empty();
            for (i, p) in filter.sequence.iter().enumerate() {
                let _ = writeln!(text, "p{i} = {p}");
            }
            match &objects {
                GenericObjects::Chain { sets } => {
                    for (a, x) in sets {
                        let _ = writeln!(text, "X_{a} = {x:?}");
                    }
                }
                GenericObjects::Adf { functions } => {
                    for (a, f) in functions {
                        let _ = writeln!(text, "f_{a} = {f:?}");
                    }
                }
            }
            for w in &violations {
                let _ = writeln!(text, "violation: {w}");
            }
            env.results = json!({
                "dense": dense_text,
                "sequence": filter.sequence.iter().map(Condition::encode).collect::<Vec<_>>(),
                "objects": objects,
                "violations": violations,
            });
            let code = code_of(env.passed);
            Ok(Outcome { envelope: env, text, code })
        }
        Err(Error::Unrealizable { spec, blocking }) => {
            env.passed = false;
            let _ = writeln!(text, "unrealizable: {spec} below {blocking}");
            env.results = json!({ "dense": dense_text, "unrealizable": { "spec": spec, "blocking": blocking } });
            Ok(Outcome { envelope: env, text, code: exit::UNREALIZABLE })
        }
        Err(e) => Err(e.to_string()),
    }
}
