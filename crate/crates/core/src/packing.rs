//! Separated subsets of sampled point sets, certified entropy bounds and
//! log–log exponent fits.
//!
//! The entropy of a set is the largest size of a subset whose pairwise
//! distances are all at least 1. A greedy maximal subset gives a lower bound;
//! the number of occupied cells of diameter below 1 gives an upper bound.

use serde::Serialize;
use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::vecmath::lex_cmp;

/// Upper bound on how many points with pairwise distances `>= 1` fit within
/// distance `< 1` of a single point: their disjoint balls of radius 1/2 lie in
/// a ball of radius 3/2, so at most `3^d`.
pub fn local_packing_bound(d: usize) -> usize {
    3usize.pow(d as u32)
}

fn cell_of(p: &[f64], side: f64) -> Vec<i64> {
    p.iter().map(|v| (v / side).floor() as i64).collect()
}

/// Points with pairwise distances at least `separation`, indexed by a grid
/// of cell side `separation` so each query inspects only `3^d` cells.
#[derive(Debug, Clone)]
pub struct SeparatedSet {
    dim: usize,
    separation: f64,
    points: Vec<Vec<f64>>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl SeparatedSet {
    pub fn new(dim: usize, separation: f64) -> Result<Self> {
        if !(separation.is_finite() && separation > 0.0) {
            return Err(Error::domain(format!("separation must be positive, got {separation}")));
        }
        Ok(SeparatedSet {
            dim,
            separation,
            points: Vec::new(),
            cells: HashMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }

    /// Whether `p` keeps distance at least `separation` from every member.
    pub fn admits(&self, p: &[f64]) -> bool {
        let s2 = self.separation * self.separation;
        let base = cell_of(p, self.separation);
        let mut offset = vec![-1i64; self.dim];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(members) = self.cells.get(&key) {
                for &i in members {
                    let d2: f64 = self.points[i]
                        .iter()
                        .zip(p)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d2 < s2 {
                        return false;
                    }
                }
            }
            // Odometer over {-1, 0, 1}^d.
            let mut j = 0;
            while j < self.dim {
                offset[j] += 1;
                if offset[j] <= 1 {
                    break;
                }
                offset[j] = -1;
                j += 1;
            }
            if j == self.dim {
                return true;
            }
        }
    }

    /// Inserts `p` if it is separated from all members; returns whether it was.
    pub fn try_insert(&mut self, p: &[f64]) -> bool {
        if p.len() != self.dim || !self.admits(p) {
            return false;
        }
        let key = cell_of(p, self.separation);
        self.cells.entry(key).or_default().push(self.points.len());
        self.points.push(p.to_vec());
        true
    }
}

/// Order in which candidates are offered to the greedy packer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanOrder {
    Lexicographic,
    Reverse,
}

fn ordered(points: &[Vec<f64>], order: ScanOrder) -> Vec<&Vec<f64>> {
    let mut refs: Vec<&Vec<f64>> = points.iter().collect();
    refs.sort_by(|a, b| lex_cmp(a, b));
    if order == ScanOrder::Reverse {
        refs.reverse();
    }
    refs
}

/// A greedy maximal separated subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Packing {
    pub count: usize,
    pub retained: Vec<Vec<f64>>,
}

/// Greedy packing in lexicographic order with the grid hash.
pub fn greedy_pack(points: &[Vec<f64>], separation: f64) -> Result<Packing> {
    greedy_pack_ordered(points, separation, ScanOrder::Lexicographic)
}

pub fn greedy_pack_ordered(points: &[Vec<f64>], separation: f64, order: ScanOrder) -> Result<Packing> {
    let Some(first) = points.first() else {
        SeparatedSet::new(1, separation)?;
        return Ok(Packing {
            count: 0,
            retained: Vec::new(),
        });
    };
    let mut set = SeparatedSet::new(first.len(), separation)?;
    for p in ordered(points, order) {
        set.try_insert(p);
    }
    let retained = set.into_points();
    Ok(Packing {
        count: retained.len(),
        retained,
    })
}

/// The same greedy scan comparing against every retained point.
pub fn greedy_pack_naive(points: &[Vec<f64>], separation: f64, order: ScanOrder) -> Packing {
    let s2 = separation * separation;
    let mut retained: Vec<Vec<f64>> = Vec::new();
    for p in ordered(points, order) {
        let ok = retained.iter().all(|q| {
            q.iter().zip(p.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() >= s2
        });
        if ok {
            retained.push(p.clone());
        }
    }
    Packing {
        count: retained.len(),
        retained,
    }
}

/// Brute-force check that all pairwise distances are at least `separation`.
pub fn is_separated(points: &[Vec<f64>], separation: f64) -> bool {
    let s2 = separation * separation;
    points.iter().enumerate().all(|(i, p)| {
        points[i + 1..].iter().all(|q| {
            p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() >= s2
        })
    })
}

/// Side of the cells used by [`cell_upper_bound`]: diameter `0.99 < 1`.
pub fn upper_cell_side(d: usize) -> f64 {
    0.99 / (d as f64).sqrt()
}

/// Number of occupied cells of side `0.99/√d`. A 1-separated subset has at
/// most one point per cell, so this bounds the entropy of the sample.
pub fn cell_upper_bound(points: &[Vec<f64>], d: usize) -> usize {
    let side = upper_cell_side(d);
    let mut cells: Vec<Vec<i64>> = points.iter().map(|p| cell_of(p, side)).collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Least-squares line through `(log R, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_exponent(rows: &[(f64, f64)]) -> Result<ExponentFit> {
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "an exponent fit needs at least 3 rows, got {}",
            rows.len()
        )));
    }
    if let Some(&(r, v)) = rows.iter().find(|(r, v)| !(*r > 0.0 && *v > 0.0)) {
        return Err(Error::domain(format!("log-log fit needs positive values, got ({r}, {v})")));
    }
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), (r, _)| (lo.min(*r), hi.max(*r)));
    if hi < 4.0 * lo {
        return Err(Error::InsufficientData(format!(
            "R values must span a factor of 4, got [{lo}, {hi}]"
        )));
    }
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// Entropy bounds of one sampled set at radius `R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub r: f64,
    pub entropy_lower: usize,
    pub entropy_upper: usize,
    pub samples: usize,
    pub tol: f64,
}

impl ScalingRow {
    /// Packs `points` and records both bounds.
    pub fn measure(r: f64, points: &[Vec<f64>], d: usize, tol: f64) -> Result<Self> {
        let lower = greedy_pack(points, 1.0)?.count;
        Ok(ScalingRow {
            r,
            entropy_lower: lower,
            entropy_upper: cell_upper_bound(points, d),
            samples: points.len(),
            tol,
        })
    }
}

/// Entropy bounds across radii with fitted exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub body: String,
    pub eta: Vec<f64>,
    pub rows: Vec<ScalingRow>,
    pub lower_fit: ExponentFit,
    pub upper_fit: ExponentFit,
}

impl ScalingReport {
    /// Fits both bounds. Counts enter the fit as at least 1, so a sample set
    /// that stays empty at every radius fits with slope 0.
    pub fn new(body: String, eta: Vec<f64>, mut rows: Vec<ScalingRow>) -> Result<Self> {
        rows.sort_by(|a, b| a.r.partial_cmp(&b.r).unwrap_or(Ordering::Equal));
        let lower: Vec<(f64, f64)> = rows.iter().map(|r| (r.r, r.entropy_lower.max(1) as f64)).collect();
        let upper: Vec<(f64, f64)> = rows.iter().map(|r| (r.r, r.entropy_upper.max(1) as f64)).collect();
        Ok(ScalingReport {
            body,
            eta,
            lower_fit: fit_exponent(&lower)?,
            upper_fit: fit_exponent(&upper)?,
            rows,
        })
    }

    /// Whether `lower <= upper` holds on every row.
    pub fn sandwich_holds(&self) -> bool {
        self.rows.iter().all(|r| r.entropy_lower <= r.entropy_upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_visits_all_neighbour_cells() {
        let mut set = SeparatedSet::new(3, 1.0).unwrap();
        assert!(set.try_insert(&[0.5, 0.5, 0.5]));
        for dx in [-0.8, 0.0, 0.8] {
            for dy in [-0.4, 0.4] {
                assert!(!set.admits(&[0.5 + dx, 0.5 + dy, 0.5 - 0.3]));
            }
        }
        assert!(set.admits(&[1.5, 0.5, 0.5]));
    }

    #[test]
    fn local_bound() {
        assert_eq!(local_packing_bound(2), 9);
        assert_eq!(local_packing_bound(3), 27);
    }
}
