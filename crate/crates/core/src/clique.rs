//! Discrete cliques: the squares of a cover that share a witness point.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{left_to_right, Point, SquareId, SquareIndex, UnitSquare};

/// Axis-aligned rectangle `[x_l, x_r] × [y_b, y_t]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_l: f64,
    pub x_r: f64,
    pub y_b: f64,
    pub y_t: f64,
}

impl Rect {
    pub fn is_empty(&self) -> bool {
        self.x_l > self.x_r || self.y_b > self.y_t
    }
}

/// Squares containing a common witness, ordered left to right, together
/// with their common intersection (the ply region).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clique {
    pub squares: Vec<UnitSquare>,
    pub witness: Point,
    pub ply_region: Rect,
}

impl Clique {
    /// Builds a clique from squares that all contain `witness`.
    fn from_members(mut squares: Vec<UnitSquare>, witness: Point) -> Self {
        squares.sort_by(left_to_right);
        let ply_region = Rect {
            x_l: squares.iter().map(|s| s.x).fold(f64::NEG_INFINITY, f64::max),
            x_r: squares.iter().map(|s| s.right()).fold(f64::INFINITY, f64::min),
            y_b: squares.iter().map(|s| s.y).fold(f64::NEG_INFINITY, f64::max),
            y_t: squares.iter().map(|s| s.top()).fold(f64::INFINITY, f64::min),
        };
        Self {
            squares,
            witness,
            ply_region,
        }
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn x_l(&self) -> f64 {
        self.ply_region.x_l
    }

    pub fn x_r(&self) -> f64 {
        self.ply_region.x_r
    }

    pub fn sorted_ids(&self) -> Vec<SquareId> {
        let mut ids: Vec<SquareId> = self.squares.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        ids
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliqueKind {
    Asc,
    Desc,
    DescAsc,
    Illegal,
}

impl CliqueKind {
    pub fn is_legal(self) -> bool {
        self != CliqueKind::Illegal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueType {
    pub kind: CliqueKind,
    /// Position of the bottom-most square; set only for `DescAsc`.
    pub transition_index: Option<usize>,
}

impl CliqueType {
    const fn plain(kind: CliqueKind) -> Self {
        Self {
            kind,
            transition_index: None,
        }
    }
}

/// The clique of all squares of `sol` containing `witness`.
pub fn discrete_clique_at(witness: Point, sol: &[UnitSquare]) -> Result<Clique> {
    let members: Vec<UnitSquare> = sol.iter().copied().filter(|s| s.contains(witness)).collect();
    if members.is_empty() {
        return Err(Error::NoCoveringSquare(witness));
    }
    Ok(Clique::from_members(members, witness))
}

/// One clique per witness covered by `sol`, in witness order.
pub fn discrete_cliques(sol: &[UnitSquare], witnesses: &[Point]) -> Vec<Clique> {
    let index = SquareIndex::new(sol);
    witnesses
        .iter()
        .filter_map(|&w| {
            let hits = index.containing(w);
            (!hits.is_empty()).then(|| Clique::from_members(hits.iter().map(|&i| sol[i]).collect(), w))
        })
        .collect()
}

/// Ranking used to pick the leftmost maximum clique: larger first, then
/// smaller `x_r`, then the lexicographically smaller sorted id list.
fn precedence(a: &Clique, b: &Clique) -> Ordering {
    b.len()
        .cmp(&a.len())
        .then(a.x_r().total_cmp(&b.x_r()))
        .then_with(|| a.sorted_ids().cmp(&b.sorted_ids()))
}

/// The maximum-cardinality discrete clique with the smallest right edge of
/// its ply region, or `None` if no witness is covered.
pub fn leftmost_maximum_clique(sol: &[UnitSquare], witnesses: &[Point]) -> Option<Clique> {
    discrete_cliques(sol, witnesses)
        .into_iter()
        .min_by(precedence)
}

/// Classifies the y-sequence of a clique read left to right, for a
/// top-anchored (points below the line) orientation.
pub fn classify_clique(q: &Clique) -> CliqueType {
    let ys: Vec<f64> = q.squares.iter().map(|s| s.y).collect();
    classify_heights(&ys)
}

pub(crate) fn classify_heights(ys: &[f64]) -> CliqueType {
    if ys.len() <= 1 {
        return CliqueType::plain(CliqueKind::Asc);
    }
    let rising = |w: &[f64]| w[0] < w[1];
    let falling = |w: &[f64]| w[0] > w[1];
    if ys.windows(2).all(rising) {
        return CliqueType::plain(CliqueKind::Asc);
    }
    if ys.windows(2).all(falling) {
        return CliqueType::plain(CliqueKind::Desc);
    }
    let b = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if b > 0
        && b + 1 < ys.len()
        && ys[..=b].windows(2).all(falling)
        && ys[b..].windows(2).all(rising)
    {
        return CliqueType {
            kind: CliqueKind::DescAsc,
            transition_index: Some(b),
        };
    }
    CliqueType::plain(CliqueKind::Illegal)
}
