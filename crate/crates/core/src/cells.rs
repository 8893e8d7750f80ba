//! Uniform-grid neighbour search.

use std::collections::HashMap;

/// Buckets point indices by square cells of side `cell`. Any two points
/// whose max-norm distance is at most `cell` are in adjacent cells.
#[derive(Clone, Debug)]
pub struct CellList {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl CellList {
    pub fn new(cell: f64) -> Self {
        let cell = if cell.is_finite() && cell > 0.0 { cell } else { 1.0 };
        CellList { cell, buckets: HashMap::new() }
    }

    pub fn from_points<'a>(cell: f64, points: impl IntoIterator<Item = &'a [f64; 2]>) -> Self {
        let mut c = CellList::new(cell);
        for (i, x) in points.into_iter().enumerate() {
            c.insert(i, *x);
        }
        c
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn key(&self, x: [f64; 2]) -> (i64, i64) {
        ((x[0] / self.cell).floor() as i64, (x[1] / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, idx: usize, x: [f64; 2]) {
        let k = self.key(x);
        self.buckets.entry(k).or_default().push(idx);
    }

    /// Removes `idx` stored at `x`; returns whether it was present.
    pub fn remove(&mut self, idx: usize, x: [f64; 2]) -> bool {
        let k = self.key(x);
        if let Some(v) = self.buckets.get_mut(&k) {
            if let Some(p) = v.iter().position(|&i| i == idx) {
                v.remove(p);
                if v.is_empty() {
                    self.buckets.remove(&k);
                }
                return true;
            }
        }
        false
    }

    /// Renames index `from` (stored at `x`) to `to`.
    pub fn relabel(&mut self, from: usize, to: usize, x: [f64; 2]) {
        let k = self.key(x);
        if let Some(v) = self.buckets.get_mut(&k) {
            for i in v.iter_mut() {
                if *i == from {
                    *i = to;
                }
            }
        }
    }

    /// Indices in the 3×3 block of cells around `x`, in a fixed order.
    pub fn neighbours(&self, x: [f64; 2]) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = self.key(x);
        (-1..=1).flat_map(move |dx| {
            (-1..=1).flat_map(move |dy| {
                self.buckets.get(&(cx + dx, cy + dy)).into_iter().flat_map(|v| v.iter().copied())
            })
        })
    }
}
