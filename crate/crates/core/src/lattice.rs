//! The cube `V = [0, n]^d ∩ Z^d` with directed up-right adjacency.
//!
//! Vertices are flat row-major indices; coordinate 0 is the most significant
//! digit. Every directed edge increases the index, so index order is a
//! topological order of the cube.

use crate::error::{Error, Result};

/// Default cap on `(n + 1)^d`.
pub const DEFAULT_VERTEX_BUDGET: usize = 1 << 26;

/// Default cap on the number of paths `enumerate_paths` will produce.
pub const DEFAULT_PATH_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    n: usize,
    d: usize,
    len: usize,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        Self::with_budget(n, d, DEFAULT_VERTEX_BUDGET)
    }

    pub fn with_budget(n: usize, d: usize, budget: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(d));
        }
        if n == 0 {
            return Err(Error::SideLength);
        }
        let too_large = Error::GridTooLarge { n, d, budget };
        let side = n.checked_add(1).ok_or(too_large.clone())?;
        let len = u32::try_from(d)
            .ok()
            .and_then(|e| side.checked_pow(e))
            .ok_or(too_large.clone())?;
        if len > budget {
            return Err(too_large);
        }
        let mut strides = vec![1usize; d];
        for i in (0..d - 1).rev() {
            strides[i] = strides[i + 1] * side;
        }
        Ok(Self { n, d, len, strides })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of vertices `(n + 1)^d`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn origin(&self) -> usize {
        0
    }

    pub fn target(&self) -> usize {
        self.len - 1
    }

    /// Number of vertices on every up-right path, `d·n + 1`.
    pub fn path_len(&self) -> usize {
        self.d * self.n + 1
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.d || coords.iter().any(|&c| c > self.n) {
            return Err(Error::VertexOutOfRange(coords.to_vec()));
        }
        Ok(coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum())
    }

    pub fn coords_of(&self, v: usize) -> Vec<usize> {
        debug_assert!(v < self.len);
        self.strides.iter().map(|&s| (v / s) % (self.n + 1)).collect()
    }

    /// Coordinate `i` of vertex `v`.
    #[inline]
    pub fn coord(&self, v: usize, i: usize) -> usize {
        (v / self.strides[i]) % (self.n + 1)
    }

    /// Layer `ℓ(v)`, the coordinate sum.
    pub fn layer(&self, v: usize) -> usize {
        (0..self.d).map(|i| self.coord(v, i)).sum()
    }

    /// `{v + e_i : v_i < n}` as coordinates.
    pub fn up_neighbors(&self, coords: &[usize]) -> Result<Vec<Vec<usize>>> {
        let v = self.index_of(coords)?;
        Ok(self.up_neighbor_indices(v).into_iter().map(|u| self.coords_of(u)).collect())
    }

    pub fn up_neighbor_indices(&self, v: usize) -> Vec<usize> {
        (0..self.d)
            .filter(|&i| self.coord(v, i) < self.n)
            .map(|i| v + self.strides[i])
            .collect()
    }

    pub fn down_neighbor_indices(&self, v: usize) -> Vec<usize> {
        (0..self.d)
            .filter(|&i| self.coord(v, i) > 0)
            .map(|i| v - self.strides[i])
            .collect()
    }

    /// Layer of every vertex, indexed by vertex.
    pub fn layers(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.len];
        let mut coords = vec![0usize; self.d];
        let mut sum = 0usize;
        for slot in out.iter_mut() {
            *slot = sum;
            // odometer step, last coordinate fastest
            for i in (0..self.d).rev() {
                if coords[i] < self.n {
                    coords[i] += 1;
                    sum += 1;
                    break;
                }
                sum -= coords[i];
                coords[i] = 0;
            }
        }
        out
    }

    /// Vertices sorted by layer, ties broken by index.
    pub fn layer_order(&self) -> Vec<usize> {
        let layers = self.layers();
        let mut order: Vec<usize> = (0..self.len).collect();
        order.sort_by_key(|&v| (layers[v], v));
        order
    }

    /// Number of up-right paths from origin to target, `(dn)! / (n!)^d`,
    /// or `None` if it does not fit in `u128`.
    pub fn path_count(&self) -> Option<u128> {
        // product of binomials C(k·n, n) for k = 2..=d
        let mut total: u128 = 1;
        for k in 2..=self.d {
            total = total.checked_mul(binomial((k * self.n) as u128, self.n as u128)?)?;
        }
        Some(total)
    }

    pub fn enumerate_paths(&self) -> Result<PathIter<'_>> {
        self.enumerate_paths_capped(DEFAULT_PATH_CAP)
    }

    /// Iterates over every directed path from origin to target, each as a
    /// vertex sequence of length `d·n + 1`.
    pub fn enumerate_paths_capped(&self, cap: u128) -> Result<PathIter<'_>> {
        let count = self.path_count().unwrap_or(u128::MAX);
        if count > cap {
            return Err(Error::PathCapExceeded { count, cap });
        }
        let steps = (0..self.d).flat_map(|i| std::iter::repeat_n(i, self.n)).collect();
        Ok(PathIter { grid: self, steps, done: false })
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Paths in lexicographic order of their step sequences.
pub struct PathIter<'g> {
    grid: &'g Grid,
    steps: Vec<usize>,
    done: bool,
}

impl Iterator for PathIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let mut path = Vec::with_capacity(self.steps.len() + 1);
        let mut v = 0usize;
        path.push(v);
        for &dir in &self.steps {
            v += self.grid.strides[dir];
            path.push(v);
        }
        self.done = !next_permutation(&mut self.steps);
        Some(path)
    }
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("successor exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// Coordinates of consecutive row-major indices, advanced in place.
pub(crate) struct Odometer {
    pub(crate) coords: Vec<usize>,
    n: usize,
}

impl Odometer {
    pub(crate) fn at_origin(grid: &Grid) -> Self {
        Self { coords: vec![0; grid.d], n: grid.n }
    }

    pub(crate) fn at_target(grid: &Grid) -> Self {
        Self { coords: vec![grid.n; grid.d], n: grid.n }
    }

    pub(crate) fn increment(&mut self) {
        for c in self.coords.iter_mut().rev() {
            if *c < self.n {
                *c += 1;
                return;
            }
            *c = 0;
        }
    }

    pub(crate) fn decrement(&mut self) {
        for c in self.coords.iter_mut().rev() {
            if *c > 0 {
                *c -= 1;
                return;
            }
            *c = self.n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn construction_guards() {
        assert!(matches!(Grid::new(3, 1), Err(Error::Dimension(1))));
        assert!(matches!(Grid::new(0, 2), Err(Error::SideLength)));
        assert!(matches!(Grid::new(1000, 4), Err(Error::GridTooLarge { .. })));
        assert!(matches!(Grid::new(usize::MAX, 2), Err(Error::GridTooLarge { .. })));
        assert!(matches!(Grid::with_budget(10, 2, 100), Err(Error::GridTooLarge { .. })));
        assert_eq!(Grid::new(3, 3).unwrap().len(), 64);
    }

    #[test]
    fn up_neighbor_examples() {
        let g = Grid::new(3, 2).unwrap();
        let mut nb = g.up_neighbors(&[1, 1]).unwrap();
        nb.sort();
        assert_eq!(nb, vec![vec![1, 2], vec![2, 1]]);
        assert!(g.up_neighbors(&[3, 3]).unwrap().is_empty());
        assert!(g.up_neighbors(&[4, 0]).is_err());
        assert!(g.up_neighbors(&[1, 1, 1]).is_err());
        let g3 = Grid::new(1, 3).unwrap();
        assert_eq!(g3.up_neighbors(&[0, 0, 0]).unwrap().len(), 3);
    }

    #[test]
    fn adjacency_invariants() {
        for (n, d) in [(3, 2), (2, 3), (1, 4), (4, 2)] {
            let g = Grid::new(n, d).unwrap();
            let layers = g.layers();
            for v in 0..g.len() {
                let coords = g.coords_of(v);
                assert_eq!(g.index_of(&coords).unwrap(), v);
                assert_eq!(layers[v], coords.iter().sum::<usize>());
                let ups = g.up_neighbor_indices(v);
                let expected = coords.iter().filter(|&&c| c < n).count();
                assert_eq!(ups.len(), expected);
                if v != g.target() {
                    assert!(!ups.is_empty() && ups.len() <= d);
                }
                for u in ups {
                    assert_eq!(layers[u], layers[v] + 1);
                    assert!(g.down_neighbor_indices(u).contains(&v));
                }
            }
        }
    }

    #[test]
    fn layer_order_examples() {
        let g = Grid::new(1, 2).unwrap();
        let order = g.layer_order();
        assert_eq!(g.coords_of(order[0]), vec![0, 0]);
        assert_eq!(g.coords_of(*order.last().unwrap()), vec![1, 1]);
        let g = Grid::new(2, 2).unwrap();
        let order = g.layer_order();
        assert_eq!(order.len(), 9);
        let mut sizes = vec![0; 5];
        for &v in &order {
            sizes[g.layer(v)] += 1;
        }
        assert_eq!(sizes, vec![1, 2, 3, 2, 1]);
        let g = Grid::new(3, 3).unwrap();
        let order = g.layer_order();
        assert!(order.windows(2).all(|w| g.layer(w[0]) <= g.layer(w[1])));
        assert_eq!(order, g.layer_order());
    }

    #[test]
    fn path_enumeration_counts() {
        assert_eq!(Grid::new(4, 2).unwrap().enumerate_paths().unwrap().count(), 70);
        assert_eq!(Grid::new(1, 2).unwrap().enumerate_paths().unwrap().count(), 2);
        assert_eq!(Grid::new(2, 3).unwrap().enumerate_paths().unwrap().count(), 90);
        assert!(matches!(
            Grid::new(20, 2).unwrap().enumerate_paths(),
            Err(Error::PathCapExceeded { .. })
        ));
    }

    #[test]
    fn enumerated_paths_are_valid_and_distinct() {
        fn factorial(k: u128) -> u128 {
            (1..=k).product()
        }
        for (n, d) in [(1, 2), (3, 2), (5, 2), (1, 3), (2, 3), (1, 4), (2, 4)] {
            let g = Grid::new(n, d).unwrap();
            let expected = factorial((d * n) as u128) / factorial(n as u128).pow(d as u32);
            let mut seen = HashSet::new();
            for path in g.enumerate_paths().unwrap() {
                assert_eq!(path.len(), d * n + 1);
                assert_eq!(path[0], g.origin());
                assert_eq!(*path.last().unwrap(), g.target());
                let mut per_coord = vec![0; d];
                for w in path.windows(2) {
                    assert_eq!(g.layer(w[1]), g.layer(w[0]) + 1);
                    let dir = g.strides().iter().position(|&s| w[1] - w[0] == s).unwrap();
                    assert_eq!(g.coord(w[1], dir), g.coord(w[0], dir) + 1);
                    per_coord[dir] += 1;
                }
                assert!(per_coord.iter().all(|&c| c == n));
                assert!(seen.insert(path));
            }
            assert_eq!(seen.len() as u128, expected);
            assert_eq!(g.path_count(), Some(expected));
        }
    }
}
