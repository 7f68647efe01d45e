//! Finite ordinals and strictly increasing maps between them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite ordinal, identified with the set `[0, n)`.
pub type Ordinal = usize;

/// A strictly increasing map from the ordinal `dom` into the ordinal `cod`.
///
/// Stored densely: `values[i]` is the image of `i`, so `dom == values.len()`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrderMap {
    values: Vec<Ordinal>,
    cod: Ordinal,
}

impl OrderMap {
    pub fn new(values: Vec<Ordinal>, cod: Ordinal) -> Result<Self> {
        if let Some(w) = values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::NotOrderPreserving(format!("{} !< {}", w[0], w[1])));
        }
        if let Some(&last) = values.last() {
            if last >= cod {
                return Err(Error::NotOrderPreserving(format!(
                    "value {last} outside codomain {cod}"
                )));
            }
        }
        Ok(OrderMap { values, cod })
    }

    /// Builds without validation; callers guarantee the invariants.
    pub(crate) fn from_raw(values: Vec<Ordinal>, cod: Ordinal) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(values.last().is_none_or(|&v| v < cod));
        OrderMap { values, cod }
    }

    pub fn identity(n: Ordinal) -> Self {
        OrderMap { values: (0..n).collect(), cod: n }
    }

    /// The identity on `dom` viewed as a map into the larger ordinal `cod`.
    pub fn inclusion(dom: Ordinal, cod: Ordinal) -> Result<Self> {
        OrderMap::new((0..dom).collect(), cod)
    }

    pub fn dom(&self) -> Ordinal {
        self.values.len()
    }

    pub fn cod(&self) -> Ordinal {
        self.cod
    }

    pub fn values(&self) -> &[Ordinal] {
        &self.values
    }

    pub fn apply(&self, x: Ordinal) -> Option<Ordinal> {
        self.values.get(x).copied()
    }

    /// The unique preimage of `y`, if any.
    pub fn preimage(&self, y: Ordinal) -> Option<Ordinal> {
        self.values.binary_search(&y).ok()
    }

    pub fn range(&self) -> BTreeSet<Ordinal> {
        self.values.iter().copied().collect()
    }

    pub fn in_range(&self, y: Ordinal) -> bool {
        self.values.binary_search(&y).is_ok()
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Restriction to the initial segment `[0, n)`.
    pub fn restrict(&self, n: Ordinal) -> Self {
        OrderMap { values: self.values[..n.min(self.dom())].to_vec(), cod: self.cod }
    }

    /// Same values, different declared codomain.
    pub fn with_cod(&self, cod: Ordinal) -> Result<Self> {
        OrderMap::new(self.values.clone(), cod)
    }

    /// Image of a set of ordinals; points outside the domain are ignored.
    pub fn image_of<'a>(&self, xs: impl IntoIterator<Item = &'a Ordinal>) -> BTreeSet<Ordinal> {
        xs.into_iter().filter_map(|&x| self.apply(x)).collect()
    }

    /// Pointwise preimage of a set of ordinals.
    pub fn preimage_of<'a>(&self, ys: impl IntoIterator<Item = &'a Ordinal>) -> BTreeSet<Ordinal> {
        ys.into_iter().filter_map(|&y| self.preimage(y)).collect()
    }

    /// All order maps from `dom` into `cod`, in lexicographic order of values.
    pub fn all(dom: Ordinal, cod: Ordinal) -> Vec<OrderMap> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(dom);
        fn rec(dom: usize, cod: usize, cur: &mut Vec<usize>, out: &mut Vec<OrderMap>) {
            if cur.len() == dom {
                out.push(OrderMap { values: cur.clone(), cod });
                return;
            }
            let start = cur.last().map_or(0, |&v| v + 1);
            let remaining = dom - cur.len();
            for v in start..cod {
                if cod - v < remaining {
                    break;
                }
                cur.push(v);
                rec(dom, cod, cur, out);
                cur.pop();
            }
        }
        rec(dom, cod, &mut cur, &mut out);
        out
    }
}

impl fmt::Debug for OrderMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}->{}", self.values, self.dom(), self.cod)
    }
}

impl fmt::Display for OrderMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `f ∘ g`: first `g`, then `f`. Requires `g.cod() == f.dom()`.
pub fn compose(f: &OrderMap, g: &OrderMap) -> Result<OrderMap> {
    if g.cod != f.dom() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose {f:?} after {g:?}: {} != {}",
            g.cod,
            f.dom()
        )));
    }
    Ok(OrderMap {
        values: g.values.iter().map(|&x| f.values[x]).collect(),
        cod: f.cod,
    })
}

/// Strict supremum: the least ordinal containing every element of `xs`.
pub fn ssup<'a>(xs: impl IntoIterator<Item = &'a Ordinal>) -> Ordinal {
    xs.into_iter().map(|&x| x + 1).max().unwrap_or(0)
}

/// Least point moved by `b`, or `None` when `b` is the identity on its domain.
pub fn critical_point(b: &OrderMap) -> Option<Ordinal> {
    b.values.iter().enumerate().find(|(i, &v)| *i != v).map(|(i, _)| i)
}
