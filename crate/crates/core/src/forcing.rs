//! Finite rectangle conditions for the chain and almost-disjoint-functions
//! forcings.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{OrderMap, Ordinal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Chain,
    Adf,
}

impl Variant {
    /// Column test used throughout: monotone for chains, injective for adf.
    pub fn column_ok(self, column: &[u32]) -> bool {
        match self {
            Variant::Chain => column.windows(2).all(|w| w[0] <= w[1]),
            Variant::Adf => {
                let mut seen = BTreeSet::new();
                column.iter().all(|v| seen.insert(*v))
            }
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(Variant::Chain),
            "adf" => Ok(Variant::Adf),
            _ => Err(Error::Parse { path: "variant".into(), message: format!("unknown variant {s:?}") }),
        }
    }
}

/// `p : a × b → values`, rows `a` (first coordinate) and columns `b`.
///
/// Values are stored row-major over the sorted rows and columns.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Condition {
    variant: Variant,
    rows: Vec<Ordinal>,
    cols: Vec<Ordinal>,
    values: Vec<u32>,
}

impl Condition {
    pub fn new(variant: Variant, rows: BTreeSet<Ordinal>, cols: BTreeSet<Ordinal>, values: Vec<u32>) -> Result<Self> {
        let (rows, cols): (Vec<_>, Vec<_>) = (rows.into_iter().collect(), cols.into_iter().collect());
        if values.len() != rows.len() * cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}x{} rectangle",
                values.len(),
                rows.len(),
                cols.len()
            )));
        }
        if variant == Variant::Chain && values.iter().any(|&v| v > 1) {
            return Err(Error::OutOfRange("chain values must be 0 or 1".into()));
        }
        Ok(Condition { variant, rows, cols, values })
    }

    /// Builds from a value function on the rectangle.
    pub fn from_fn(
        variant: Variant,
        rows: impl IntoIterator<Item = Ordinal>,
        cols: impl IntoIterator<Item = Ordinal>,
        f: impl Fn(Ordinal, Ordinal) -> u32,
    ) -> Result<Self> {
        let rows: BTreeSet<_> = rows.into_iter().collect();
        let cols: BTreeSet<_> = cols.into_iter().collect();
        let values = rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r, c))).map(|(r, c)| f(r, c)).collect();
        Condition::new(variant, rows, cols, values)
    }

    pub fn empty(variant: Variant) -> Self {
        Condition { variant, rows: Vec::new(), cols: Vec::new(), values: Vec::new() }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn rows(&self) -> &[Ordinal] {
        &self.rows
    }

    pub fn cols(&self) -> &[Ordinal] {
        &self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() && self.cols.is_empty()
    }

    pub fn get(&self, row: Ordinal, col: Ordinal) -> Option<u32> {
        let i = self.rows.binary_search(&row).ok()?;
        let j = self.cols.binary_search(&col).ok()?;
        Some(self.values[i * self.cols.len() + j])
    }

    pub fn cells(&self) -> impl Iterator<Item = ((Ordinal, Ordinal), u32)> + '_ {
        let w = self.cols.len();
        self.values.iter().enumerate().map(move |(k, &v)| ((self.rows[k / w], self.cols[k % w]), v))
    }

    /// The values of column `col` down the rows, in row order.
    pub fn column(&self, col: Ordinal) -> Option<Vec<u32>> {
        let j = self.cols.binary_search(&col).ok()?;
        let w = self.cols.len();
        Some((0..self.rows.len()).map(|i| self.values[i * w + j]).collect())
    }

    /// Column `col` restricted to the rows in `rows`.
    pub fn column_on(&self, col: Ordinal, rows: &[Ordinal]) -> Option<Vec<u32>> {
        self.cols.binary_search(&col).ok()?;
        Some(rows.iter().filter_map(|&r| self.get(r, col)).collect())
    }

    pub fn max_value(&self) -> Option<u32> {
        self.values.iter().copied().max()
    }

    /// Restriction to the rectangle `(rows ∩ keep_row) × (cols ∩ keep_col)`.
    pub fn restrict(&self, keep_row: impl Fn(Ordinal) -> bool, keep_col: impl Fn(Ordinal) -> bool) -> Condition {
        let ri: Vec<usize> = (0..self.rows.len()).filter(|&i| keep_row(self.rows[i])).collect();
        let ci: Vec<usize> = (0..self.cols.len()).filter(|&j| keep_col(self.cols[j])).collect();
        let w = self.cols.len();
        Condition {
            variant: self.variant,
            rows: ri.iter().map(|&i| self.rows[i]).collect(),
            cols: ci.iter().map(|&j| self.cols[j]).collect(),
            values: ri.iter().flat_map(|&i| ci.iter().map(move |&j| i * w + j)).map(|k| self.values[k]).collect(),
        }
    }

    /// `p ↾ (rows < r × cols < c)`.
    pub fn restrict_below(&self, r: Ordinal, c: Ordinal) -> Condition {
        self.restrict(|x| x < r, |y| y < c)
    }

    /// `p ↾ (ω × c)`: keeps the columns below `c`.
    pub fn restrict_cols_below(&self, c: Ordinal) -> Condition {
        self.restrict(|_| true, |y| y < c)
    }

    /// Is `self` contained in `other`, as functions with rectangles?
    pub fn is_sub(&self, other: &Condition) -> bool {
        self.rows.iter().all(|r| other.rows.binary_search(r).is_ok())
            && self.cols.iter().all(|c| other.cols.binary_search(c).is_ok())
            && self.cells().all(|((r, c), v)| other.get(r, c) == Some(v))
    }

    /// Does every row and column lie inside `rows × cols`?
    pub fn within(&self, rows: Ordinal, cols: Ordinal) -> bool {
        self.rows.last().is_none_or(|&r| r < rows) && self.cols.last().is_none_or(|&c| c < cols)
    }

    /// Canonical text form: rows, columns and the sorted cell list.
    pub fn encode(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={:?} b={:?} {{", self.rows, self.cols)?;
        for (k, ((r, c), v)) in self.cells().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({r},{c})={v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `p ≤ q`: `p` extends `q` and every new column is monotone (chain) or
/// injective (adf) on the rows of `q`.
pub fn leq(p: &Condition, q: &Condition) -> Result<bool> {
    if p.variant != q.variant {
        return Err(Error::VariantMismatch);
    }
    Ok(leq_same(p, q))
}

pub(crate) fn leq_same(p: &Condition, q: &Condition) -> bool {
    if !q.is_sub(p) {
        return false;
    }
    let mut col = Vec::with_capacity(q.rows.len());
    for &c in &p.cols {
        if q.cols.binary_search(&c).is_ok() {
            continue;
        }
        col.clear();
        col.extend(q.rows.iter().map(|&r| p.get(r, c).expect("q rows lie in p")));
        if !p.variant.column_ok(&col) {
            return false;
        }
    }
    true
}

/// Searches the union rectangle for a common extension accepted by
/// `ambient`. Values for free cells range over `0..alphabet` (adf) or `0..2`.
pub fn compatible(
    p: &Condition,
    q: &Condition,
    alphabet: Option<u32>,
    ambient: impl Fn(&Condition) -> bool,
) -> Result<Option<Condition>> {
    if p.variant != q.variant {
        return Err(Error::VariantMismatch);
    }
    let variant = p.variant;
    let rows: BTreeSet<Ordinal> = p.rows.iter().chain(&q.rows).copied().collect();
    let cols: BTreeSet<Ordinal> = p.cols.iter().chain(&q.cols).copied().collect();
    let (rows, cols): (Vec<_>, Vec<_>) = (rows.into_iter().collect(), cols.into_iter().collect());
    let alpha = match variant {
        Variant::Chain => 2,
        Variant::Adf => alphabet.unwrap_or(rows.len() as u32 + 1),
    };

    // Fixed cells, then a column-by-column search so each column's order
    // clauses prune early.
    let w = cols.len();
    let mut cells: Vec<Option<u32>> = vec![None; rows.len() * w];
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            let (vp, vq) = (p.get(r, c), q.get(r, c));
            cells[i * w + j] = match (vp, vq) {
                (Some(x), Some(y)) if x != y => return Ok(None),
                (Some(x), _) | (_, Some(x)) => Some(x),
                _ => None,
            };
        }
    }
    let mut search = Search { variant, rows: &rows, cols: &cols, alpha, p, q, cells, ambient: &ambient };
    Ok(search.column(0))
}

struct Search<'a, F: Fn(&Condition) -> bool> {
    variant: Variant,
    rows: &'a [Ordinal],
    cols: &'a [Ordinal],
    alpha: u32,
    p: &'a Condition,
    q: &'a Condition,
    cells: Vec<Option<u32>>,
    ambient: &'a F,
}

impl<F: Fn(&Condition) -> bool> Search<'_, F> {
    fn column(&mut self, j: usize) -> Option<Condition> {
        let w = self.cols.len();
        if j == w {
            let values = self.cells.iter().map(|c| c.expect("filled")).collect();
            let r = Condition { variant: self.variant, rows: self.rows.to_vec(), cols: self.cols.to_vec(), values };
            return (leq_same(&r, self.p) && leq_same(&r, self.q) && (self.ambient)(&r)).then_some(r);
        }
        let free: Vec<usize> = (0..self.rows.len()).filter(|&i| self.cells[i * w + j].is_none()).collect();
        let mut digits = vec![0u32; free.len()];
        loop {
            for (k, &i) in free.iter().enumerate() {
                self.cells[i * w + j] = Some(digits[k]);
            }
            if self.column_admissible(j) {
                if let Some(r) = self.column(j + 1) {
                    return Some(r);
                }
            }
            let mut k = 0;
            loop {
                if k == digits.len() {
                    for &i in &free {
                        self.cells[i * w + j] = None;
                    }
                    return None;
                }
                digits[k] += 1;
                if digits[k] < self.alpha {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    fn column_admissible(&self, j: usize) -> bool {
        let w = self.cols.len();
        let c = self.cols[j];
        [self.p, self.q].iter().all(|s| {
            if s.cols.binary_search(&c).is_ok() {
                return true;
            }
            let col: Vec<u32> = s
                .rows
                .iter()
                .map(|r| self.cells[self.rows.binary_search(r).unwrap() * w + j].unwrap())
                .collect();
            self.variant.column_ok(&col)
        })
    }
}

/// Relabels rows through `π`.
pub fn map_condition(pi: &OrderMap, p: &Condition) -> Result<Condition> {
    let rows = p
        .rows
        .iter()
        .map(|&r| pi.apply(r).ok_or_else(|| Error::OutOfRange(format!("row {r} outside dom {}", pi.dom()))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Condition { variant: p.variant, rows, cols: p.cols.clone(), values: p.values.clone() })
}

/// Pulls rows back through `π`, dropping rows outside its range.
pub fn map_condition_inverse(pi: &OrderMap, p: &Condition) -> Condition {
    let keep = p.restrict(|r| pi.in_range(r), |_| true);
    let rows = keep.rows.iter().map(|&r| pi.preimage(r).unwrap()).collect();
    Condition { rows, ..keep }
}

/// Every condition with rows in `0..row_bound`, columns in `0..col_bound`
/// and values below `alphabet` (2 for chains).
pub fn enumerate_conditions(variant: Variant, row_bound: Ordinal, col_bound: Ordinal, alphabet: u32) -> Vec<Condition> {
    let alpha = if variant == Variant::Chain { 2 } else { alphabet };
    let mut out = Vec::new();
    for rows in subsets(row_bound) {
        for cols in subsets(col_bound) {
            let n = rows.len() * cols.len();
            let mut digits = vec![0u32; n];
            loop {
                out.push(Condition { variant, rows: rows.clone(), cols: cols.clone(), values: digits.clone() });
                let mut k = 0;
                loop {
                    if k == n {
                        break;
                    }
                    digits[k] += 1;
                    if digits[k] < alpha {
                        break;
                    }
                    digits[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
    }
    out
}

/// All subsets of `0..n`, as sorted vectors, ordered by bitmask.
pub fn subsets(n: Ordinal) -> Vec<Vec<Ordinal>> {
    (0u64..1 << n).map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()).collect()
}
