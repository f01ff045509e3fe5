use crate::error::{Error, Result};

/// Union-find over `0..len` with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(len: usize) -> Self {
        DisjointSet { parent: (0..len).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// True iff the open sites of `x` connect the top row to the bottom row.
pub fn grid_has_crossing(side: usize, x: u64) -> bool {
    let n = side * side;
    let (top, bottom) = (n, n + 1);
    let mut ds = DisjointSet::new(n + 2);
    let open = |i: usize| (x >> i) & 1 == 1;
    for r in 0..side {
        for c in 0..side {
            let i = r * side + c;
            if !open(i) {
                continue;
            }
            if r == 0 {
                ds.union(i, top);
            }
            if r + 1 == side {
                ds.union(i, bottom);
            }
            if c + 1 < side && open(i + 1) {
                ds.union(i, i + 1);
            }
            if r + 1 < side && open(i + side) {
                ds.union(i, i + side);
            }
        }
    }
    ds.connected(top, bottom)
}

/// Parses a grid written row by row, e.g. `"10/10"`.
pub fn grid_word(rows: &str) -> Result<Vec<bool>> {
    let rows: Vec<&str> = rows.split('/').collect();
    let side = rows.len();
    let mut out = Vec::with_capacity(side * side);
    for row in rows {
        if row.len() != side {
            return Err(Error::SizeMismatch { expected: side, got: row.len() });
        }
        out.extend(super::parse_bits(row)?);
    }
    Ok(out)
}

/// Vertices of the `d`-ary tree with `levels` edges from root to leaf.
pub fn tree_vertex_count(d: usize, levels: usize) -> usize {
    (0..=levels).map(|i| d.pow(i as u32)).sum()
}

/// Number of all-open root-to-leaf paths. Vertices are in breadth-first
/// order; the children of vertex `v` are `d*v + 1 ..= d*v + d`.
pub fn tree_path_count(d: usize, levels: usize, open: &[bool]) -> Result<u64> {
    if d == 0 {
        return Err(Error::invalid("tree arity must be >= 1"));
    }
    let total = tree_vertex_count(d, levels);
    if open.len() != total {
        return Err(Error::SizeMismatch { expected: total, got: open.len() });
    }
    let first_leaf = total - d.pow(levels as u32);
    let mut paths = vec![0u64; total];
    for v in (0..total).rev() {
        if !open[v] {
            continue;
        }
        paths[v] = if v >= first_leaf { 1 } else { (1..=d).map(|c| paths[d * v + c]).sum() };
    }
    Ok(paths[0])
}
