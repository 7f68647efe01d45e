use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use morass_core::forcing::Variant;
use morass_core::gap1::generate_gap1;
use morass_core::gap2::{generate_gap2, Gap2Bounds};
use morass_core::spec_file::{parse_morass, to_json, Gap1Spec, Gap2Spec, MorassFile};
use morass_core::suites::Fixture;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Enumeration bounds, written `key=value,...` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub theta: usize,
    pub phi: usize,
    pub kappa: usize,
    /// Listing filter for `forcing enumerate`: rows below this.
    pub rows: usize,
    /// Listing filter for `forcing enumerate`: columns below this.
    pub cols: usize,
    pub alphabet: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { theta: 3, phi: 4, kappa: 2, rows: usize::MAX, cols: usize::MAX, alphabet: 3 }
    }
}

impl FromStr for Bounds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut b = Bounds::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let n: usize = value.trim().parse().map_err(|_| format!("`{value}` is not a natural number"))?;
            if n == 0 {
                return Err(format!("bound `{key}` must be positive"));
            }
            match key.trim() {
                "theta" => b.theta = n,
                "phi" => b.phi = n,
                "kappa" => b.kappa = n,
                "rows" => b.rows = n,
                "cols" => b.cols = n,
                "alphabet" => b.alphabet = u32::try_from(n).map_err(|_| "alphabet too large".to_string())?,
                other => return Err(format!("unknown bound `{other}`")),
            }
        }
        Ok(b)
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "theta={},phi={},kappa={},alphabet={}", self.theta, self.phi, self.kappa, self.alphabet)?;
        if self.rows != usize::MAX {
            write!(f, ",rows={}", self.rows)?;
        }
        if self.cols != usize::MAX {
            write!(f, ",cols={}", self.cols)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Chain,
    Adf,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Chain => Variant::Chain,
            VariantArg::Adf => Variant::Adf,
        }
    }
}

/// The variants a command runs: the requested one, or both.
pub fn variants(v: Option<VariantArg>) -> Vec<Variant> {
    match v {
        Some(v) => vec![v.into()],
        None => vec![Variant::Chain, Variant::Adf],
    }
}

/// A fixture with the digest of its canonical spec text.
#[derive(Debug, Clone, Serialize)]
pub struct FixtureInfo {
    pub name: String,
    pub kind: &'static str,
    pub sha256: String,
}

pub fn canonical_text(fx: &Fixture) -> String {
    match fx {
        Fixture::Gap1 { morass, .. } => to_json(&Gap1Spec::of(morass)),
        Fixture::Gap2 { morass, .. } => to_json(&Gap2Spec::of(morass)),
    }
}

pub fn digest(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

pub fn info(fx: &Fixture) -> FixtureInfo {
    let kind = match fx {
        Fixture::Gap1 { .. } => "gap1",
        Fixture::Gap2 { .. } => "gap2",
    };
    FixtureInfo { name: fx.name().to_string(), kind, sha256: digest(&canonical_text(fx)) }
}

pub fn load_file(path: &Path) -> Result<Fixture, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    match parse_morass(&text).map_err(|e| format!("{}: {e}", path.display()))? {
        MorassFile::Gap1(morass) => Ok(Fixture::Gap1 { name, morass }),
        MorassFile::Gap2(morass) => Ok(Fixture::Gap2 { name, morass }),
    }
}

/// Every `*.json` file in `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<Fixture>, String> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_file(p)).collect()
}

pub fn split_name(phis: &[usize]) -> String {
    phis.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("-")
}

/// Generated gap-1 fixtures within `theta`/`phi`, then gap-2 fixtures
/// within `kappa`/`theta`/`phi`.
pub fn generated(bounds: &Bounds) -> Vec<Fixture> {
    let mut out: Vec<Fixture> = generate_gap1(bounds.theta, bounds.phi)
        .into_iter()
        .map(|morass| Fixture::Gap1 { name: format!("gen-g1-phi-{}", split_name(morass.phis())), morass })
        .collect();
    let b2 = Gap2Bounds { kappa_max: bounds.kappa, theta_max: bounds.theta, phi_max: bounds.phi };
    for (i, morass) in generate_gap2(b2).into_iter().enumerate() {
        let name = format!("gen-g2-{i}-k{}-phi-{}", morass.kappa(), split_name(morass.ambient().phis()));
        out.push(Fixture::Gap2 { name, morass });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_parse_and_print() {
        let b: Bounds = "theta=2, phi=3,alphabet=2".parse().unwrap();
        assert_eq!((b.theta, b.phi, b.kappa, b.alphabet), (2, 3, 2, 2));
        assert_eq!(b.to_string(), "theta=2,phi=3,kappa=2,alphabet=2");
        assert_eq!(b.to_string().parse::<Bounds>().unwrap(), b);
        assert!("theta=0".parse::<Bounds>().is_err());
        assert!("depth=2".parse::<Bounds>().is_err());
        assert!("theta".parse::<Bounds>().is_err());
    }
}
