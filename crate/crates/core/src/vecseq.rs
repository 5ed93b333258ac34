//! Finite windows of number and vector sequences, checked under the
//! boundedness reading of asymptotic equivalence.
//!
//! True asymptotic equivalence quantifies over infinitely many positions.
//! On a window it is replaced by a transfer-bound pair `(B, B')`: two number
//! windows are equivalent when every position where one is at most `B` has
//! the other at most `B'`, and symmetrically. Growing the window with fixed
//! parameters is how callers probe stabilization.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VecSeqError {
    #[error("window must have at least one position")]
    EmptyWindow,
    #[error("vector at position {0} has dimension 0")]
    EmptyVector(usize),
    #[error("window lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("selection index {index} at position {pos} exceeds dimension {dim}")]
    SelectionOutOfRange { pos: usize, index: usize, dim: usize },
    #[error("{what} needs {needed} selections, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },
    #[error("bounded threshold {b} exceeds transfer bound {b_prime}")]
    ParamOrder { b: u64, b_prime: u64 },
    #[error("dimensions differ at position {0}")]
    DimensionMismatch(usize),
    #[error("grid of side {side} in dimension {dim} is empty or too large")]
    BadGrid { dim: usize, side: usize },
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Finite truncation of a number sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct NumberWindow(Vec<u64>);

impl NumberWindow {
    pub fn new(values: Vec<u64>) -> Result<Self, VecSeqError> {
        if values.is_empty() {
            return Err(VecSeqError::EmptyWindow);
        }
        Ok(NumberWindow(values))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn from_json(text: &str) -> Result<Self, VecSeqError> {
        serde_json::from_str(text).map_err(|e| VecSeqError::Json(e.to_string()))
    }
}

impl TryFrom<Vec<u64>> for NumberWindow {
    type Error = VecSeqError;

    fn try_from(v: Vec<u64>) -> Result<Self, VecSeqError> {
        NumberWindow::new(v)
    }
}

impl From<NumberWindow> for Vec<u64> {
    fn from(w: NumberWindow) -> Vec<u64> {
        w.0
    }
}

/// Finite truncation of a vector sequence; dimensions may vary by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct VectorWindow(Vec<Vec<u64>>);

impl VectorWindow {
    /// Every vector must have dimension at least 1.
    pub fn new(vectors: Vec<Vec<u64>>) -> Result<Self, VecSeqError> {
        if let Some(pos) = vectors.iter().position(Vec::is_empty) {
            return Err(VecSeqError::EmptyVector(pos));
        }
        VectorWindow::allowing_empty(vectors)
    }

    /// Like [`VectorWindow::new`] but admits zero-dimensional vectors.
    pub fn allowing_empty(vectors: Vec<Vec<u64>>) -> Result<Self, VecSeqError> {
        if vectors.is_empty() {
            return Err(VecSeqError::EmptyWindow);
        }
        Ok(VectorWindow(vectors))
    }

    pub fn vectors(&self) -> &[Vec<u64>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.0.iter().map(Vec::len).collect()
    }

    /// The common dimension, if every position has the same one.
    pub fn fixed_dimension(&self) -> Option<usize> {
        let d = self.0[0].len();
        self.0.iter().all(|v| v.len() == d).then_some(d)
    }

    /// Number of selections, saturating at `u128::MAX`.
    pub fn selection_count(&self) -> u128 {
        self.0.iter().fold(1u128, |acc, v| acc.saturating_mul(v.len() as u128))
    }

    /// Multiplies every entry by `factor`.
    pub fn scaled(&self, factor: u64) -> VectorWindow {
        VectorWindow(self.0.iter().map(|v| v.iter().map(|x| x * factor).collect()).collect())
    }

    pub fn from_json(text: &str) -> Result<Self, VecSeqError> {
        serde_json::from_str(text).map_err(|e| VecSeqError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("plain data")
    }
}

impl TryFrom<Vec<Vec<u64>>> for VectorWindow {
    type Error = VecSeqError;

    fn try_from(v: Vec<Vec<u64>>) -> Result<Self, VecSeqError> {
        VectorWindow::new(v)
    }
}

impl From<VectorWindow> for Vec<Vec<u64>> {
    fn from(w: VectorWindow) -> Vec<Vec<u64>> {
        w.0
    }
}

impl From<NumberWindow> for VectorWindow {
    fn from(w: NumberWindow) -> VectorWindow {
        VectorWindow(w.0.into_iter().map(|x| vec![x]).collect())
    }
}

/// Transfer-bound pair `(B, B')` with `B <= B'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquivParams {
    b: u64,
    b_prime: u64,
}

impl EquivParams {
    pub fn new(b: u64, b_prime: u64) -> Result<Self, VecSeqError> {
        if b > b_prime {
            return Err(VecSeqError::ParamOrder { b, b_prime });
        }
        Ok(EquivParams { b, b_prime })
    }

    pub fn bounded(&self) -> u64 {
        self.b
    }

    pub fn transfer(&self) -> u64 {
        self.b_prime
    }
}

/// One coordinate index per position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Selection(pub Vec<usize>);

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Projects `F` through a selection.
pub fn select(window: &VectorWindow, s: &Selection) -> Result<NumberWindow, VecSeqError> {
    if s.0.len() != window.len() {
        return Err(VecSeqError::LengthMismatch(window.len(), s.0.len()));
    }
    let values = window
        .0
        .iter()
        .zip(&s.0)
        .enumerate()
        .map(|(pos, (v, &index))| {
            v.get(index).copied().ok_or(VecSeqError::SelectionOutOfRange { pos, index, dim: v.len() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NumberWindow(values))
}

/// All selections of a window in lexicographic order (last position varies
/// fastest). Empty if some position has dimension 0.
pub fn selections(window: &VectorWindow) -> Selections {
    let dims = window.dimensions();
    let current = if dims.contains(&0) { None } else { Some(vec![0; dims.len()]) };
    Selections { dims, current }
}

pub struct Selections {
    dims: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Iterator for Selections {
    type Item = Selection;

    fn next(&mut self) -> Option<Selection> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked");
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.dims[i] {
                break;
            }
            cur[i] = 0;
        }
        Some(Selection(out))
    }
}

/// The `h ∈ F` relation: every value of `h` appears among the coordinates of
/// the vector at the same position.
pub fn contains(window: &VectorWindow, h: &NumberWindow) -> bool {
    window.len() == h.len() && window.0.iter().zip(&h.0).all(|(v, x)| v.contains(x))
}

fn transfers(x: u64, y: u64, p: EquivParams) -> bool {
    (x > p.b || y <= p.b_prime) && (y > p.b || x <= p.b_prime)
}

/// Windowed asymptotic equivalence under the transfer bounds `p`.
pub fn window_equiv(f: &NumberWindow, g: &NumberWindow, p: EquivParams) -> Result<bool, VecSeqError> {
    if f.len() != g.len() {
        return Err(VecSeqError::LengthMismatch(f.len(), g.len()));
    }
    Ok(f.0.iter().zip(&g.0).all(|(&x, &y)| transfers(x, y, p)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MixOutcome {
    Mix,
    /// The least selection of `F` (lexicographically) with no equivalent
    /// selection of `G`.
    NotMix { counterexample: Selection },
}

impl MixOutcome {
    pub fn is_mix(&self) -> bool {
        matches!(self, MixOutcome::Mix)
    }
}

/// Windowed asymptotic mix: every selection of `F` is equivalent to some
/// selection of `G`. Both selection counts must fit in `budget`.
///
/// Selections of `F` are enumerated; the matching choice in `G` is made
/// position by position.
pub fn is_window_mix(
    f: &VectorWindow,
    g: &VectorWindow,
    p: EquivParams,
    budget: u128,
) -> Result<MixOutcome, VecSeqError> {
    if f.len() != g.len() {
        return Err(VecSeqError::LengthMismatch(f.len(), g.len()));
    }
    for (what, w) in [("F", f), ("G", g)] {
        let needed = w.selection_count();
        if needed > budget {
            return Err(VecSeqError::BudgetExceeded { what, needed, budget });
        }
    }
    // For each position and each coordinate of F, whether G has a matching
    // coordinate there.
    let matchable: Vec<Vec<bool>> = f
        .0
        .iter()
        .zip(&g.0)
        .map(|(fv, gv)| fv.iter().map(|&x| gv.iter().any(|&y| transfers(x, y, p))).collect())
        .collect();
    for s in selections(f) {
        if !s.0.iter().enumerate().all(|(i, &c)| matchable[i][c]) {
            return Ok(MixOutcome::NotMix { counterexample: s });
        }
    }
    Ok(MixOutcome::Mix)
}

/// Pointwise minimum `g(i) = min(h(i), f(i))`.
pub fn min_dominate(h: &NumberWindow, f: &NumberWindow) -> Result<NumberWindow, VecSeqError> {
    if h.len() != f.len() {
        return Err(VecSeqError::LengthMismatch(h.len(), f.len()));
    }
    Ok(NumberWindow(h.0.iter().zip(&f.0).map(|(&a, &b)| a.min(b)).collect()))
}

/// Condition under which `min_dominate(h, f)` is equivalent to `h` for `p`:
/// wherever `h` exceeds `B'`, `f` exceeds `B`.
pub fn domination_precondition(h: &NumberWindow, f: &NumberWindow, p: EquivParams) -> bool {
    h.len() == f.len() && h.0.iter().zip(&f.0).all(|(&x, &y)| x <= p.b_prime || y > p.b)
}

/// Coordinatewise minimum of two windows of matching dimensions.
pub fn min_dominate_vectors(h: &VectorWindow, f: &VectorWindow) -> Result<VectorWindow, VecSeqError> {
    if h.len() != f.len() {
        return Err(VecSeqError::LengthMismatch(h.len(), f.len()));
    }
    let vectors = h
        .0
        .iter()
        .zip(&f.0)
        .enumerate()
        .map(|(pos, (a, b))| {
            if a.len() != b.len() {
                return Err(VecSeqError::DimensionMismatch(pos));
            }
            Ok(a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorWindow(vectors))
}

/// Coordinatewise order: equal dimensions and entries at most those of `g`.
pub fn coordinatewise_le(f: &VectorWindow, g: &VectorWindow) -> bool {
    f.len() == g.len()
        && f.0.iter().zip(&g.0).all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y))
}

/// For each `(n, cutoff)`, every vector from position `cutoff` on has all
/// coordinates at least `n`. A cutoff past the window holds vacuously.
pub fn tends_to_infinity_window(window: &VectorWindow, thresholds: &[(u64, usize)]) -> bool {
    thresholds.iter().all(|&(n, cutoff)| {
        window.0.iter().skip(cutoff).all(|v| v.iter().all(|&x| x >= n))
    })
}

/// Positions where `F1` has strictly higher dimension than `F2`.
pub fn dimension_compare(f1: &VectorWindow, f2: &VectorWindow) -> Result<Vec<usize>, VecSeqError> {
    if f1.len() != f2.len() {
        return Err(VecSeqError::LengthMismatch(f1.len(), f2.len()));
    }
    Ok(f1.0.iter().zip(&f2.0).enumerate().filter(|(_, (a, b))| a.len() > b.len()).map(|(i, _)| i).collect())
}

/// Upper bound on grid windows, to keep enumeration finite in practice.
pub const MAX_GRID_POINTS: usize = 1 << 22;

/// Every point of `{0..side-1}^d` as its own vector, ordered by coordinate
/// sum and then lexicographically.
pub fn identity_grid_window(dim: usize, side: usize) -> Result<VectorWindow, VecSeqError> {
    let bad = VecSeqError::BadGrid { dim, side };
    if dim == 0 || side == 0 {
        return Err(bad);
    }
    let total = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(side)).filter(|&t| t <= MAX_GRID_POINTS);
    let total = total.ok_or(bad)?;
    let mut points: Vec<Vec<u64>> = Vec::with_capacity(total);
    let mut cur = vec![0u64; dim];
    for _ in 0..total {
        points.push(cur.clone());
        for i in (0..dim).rev() {
            cur[i] += 1;
            if cur[i] < side as u64 {
                break;
            }
            cur[i] = 0;
        }
    }
    points.sort_by(|a, b| a.iter().sum::<u64>().cmp(&b.iter().sum::<u64>()).then_with(|| a.cmp(b)));
    Ok(VectorWindow(points))
}

/// Result of testing one coordinate projection of a grid window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionRefutation {
    /// Coordinate chosen at each position to build the 1-dimensional candidate.
    pub projection: Selection,
    /// Selection of the grid window with no equivalent in the candidate, or
    /// `None` if the candidate is a mix at window scale.
    pub counterexample: Option<Selection>,
}

/// Tests `F` against every 1-dimensional window obtained by picking one of
/// its coordinates per position.
pub fn refute_projections(
    f: &VectorWindow,
    p: EquivParams,
    budget: u128,
) -> Result<Vec<ProjectionRefutation>, VecSeqError> {
    let candidates = f.selection_count();
    if candidates > budget {
        return Err(VecSeqError::BudgetExceeded { what: "projections", needed: candidates, budget });
    }
    selections(f)
        .map(|proj| {
            let g: VectorWindow = select(f, &proj)?.into();
            let outcome = is_window_mix(f, &g, p, budget)?;
            Ok(ProjectionRefutation {
                projection: proj,
                counterexample: match outcome {
                    MixOutcome::Mix => None,
                    MixOutcome::NotMix { counterexample } => Some(counterexample),
                },
            })
        })
        .collect()
}
