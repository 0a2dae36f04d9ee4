//! Canonical sign-pattern matrices parameterizing the extreme rays of the
//! free-spectrum cone.
//!
//! Every outcome-pair difference vector `w` with `w_i = v_{c_i} - v_{c'_i}`
//! admits a unique factorization `w = P t` where `t` collects the
//! independent value differences and `P` is an `n x (d-1)` matrix over
//! `{-1, 0, 1}`:
//!
//! 1. the first nonzero row of `P` is `(1, 0, ..., 0)`;
//! 2. the running count `N(j)` of used columns grows by at most one per row;
//! 3. a row that opens a new column is a unit row.
//!
//! Patterns whose rows span fewer than `d - 1` parameters generate cones
//! contained in those of fuller patterns, so only patterns with
//! `N(n) = d - 1` are kept.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Enumerating all outcome pairs is capped at this many `(c, c')`
/// combinations.
pub const PAIR_ENUMERATION_LIMIT: usize = 40_000_000;

/// An `n x (d-1)` matrix over `{-1, 0, 1}` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalP {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl CanonicalP {
    /// Validates the canonical-form conditions (including full column use,
    /// which also forces full column rank: each column is opened by a unit
    /// row).
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows} x {cols} pattern",
                entries.len()
            )));
        }
        if entries.iter().any(|&e| !(-1..=1).contains(&e)) {
            return Err(Error::InvalidArgument(
                "pattern entries must lie in {-1, 0, 1}".into(),
            ));
        }
        let p = Self {
            rows,
            cols,
            entries,
        };
        let mut used = 0usize; // N(j): number of columns opened so far
        for i in 0..rows {
            let row_max = (0..cols)
                .rev()
                .find(|&k| p.get(i, k) != 0)
                .map(|k| k + 1)
                .unwrap_or(0);
            if row_max > used {
                if row_max != used + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "row {i} jumps to column {row_max} with only {used} columns open"
                    )));
                }
                let is_unit = (0..cols).all(|k| p.get(i, k) == i8::from(k + 1 == row_max));
                if !is_unit {
                    return Err(Error::InvalidArgument(format!(
                        "row {i} opens column {row_max} but is not the corresponding unit row"
                    )));
                }
                used = row_max;
            }
        }
        if used != cols {
            return Err(Error::InvalidArgument(format!(
                "pattern uses {used} of {cols} columns"
            )));
        }
        Ok(p)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0i8; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, k: usize) -> i8 {
        self.entries[i * self.cols + k]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, k| self.get(i, k) as f64)
    }

    pub fn row_vec(&self, i: usize) -> Vec<i8> {
        (0..self.cols).map(|k| self.get(i, k)).collect()
    }
}

/// A canonical pattern together with an outcome pair realizing it and, when
/// the rows are dependent, a `{-1,0,1}` row combination annihilating them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnumeratedP {
    pub p: CanonicalP,
    pub witness_c: Vec<usize>,
    pub witness_c_prime: Vec<usize>,
    /// Nonzero `s in {-1,0,1}^n` with `s^T P = 0`, when one exists.
    pub null_vector: Option<Vec<i8>>,
}

// adjacency entry: (edge id, other endpoint, stored orientation leaves here)
type Adjacency = Vec<Vec<(usize, usize, bool)>>;

/// Builds the canonical pattern of the difference vector of `(c, c')`:
/// walking rows top to bottom, an edge `(c_i, c'_i)` joining two previously
/// disconnected outcome values opens a new independent column, any other
/// nonzero row is the signed path combination of earlier basis edges.
/// Returns the per-row coefficient lists (over basis indices) and the number
/// of basis edges, i.e. `N(n)`.
pub fn pattern_of_pair(c: &[usize], c_prime: &[usize], d: usize) -> (Vec<Vec<i8>>, usize) {
    let n = c.len();
    debug_assert_eq!(c_prime.len(), n);
    let mut adj: Adjacency = vec![Vec::new(); d + 1];
    let mut n_basis = 0usize;
    let mut rows: Vec<Vec<i8>> = Vec::with_capacity(n);

    for i in 0..n {
        let (u, v) = (c[i], c_prime[i]);
        if u == v {
            rows.push(Vec::new());
            continue;
        }
        if let Some(row) = forest_path_coefficients(&adj, u, v, d, n_basis) {
            rows.push(row);
        } else {
            // basis edge k represents the parameter t_k = value(u) - value(v)
            let id = n_basis;
            n_basis += 1;
            adj[u].push((id, v, true));
            adj[v].push((id, u, false));
            let mut row = vec![0i8; id + 1];
            row[id] = 1;
            rows.push(row);
        }
    }
    (rows, n_basis)
}

/// Coefficients over basis edges expressing `value(u) - value(v)` as the
/// telescoping sum along the forest path from `u` to `v`; `None` when the
/// two values are not connected yet.
fn forest_path_coefficients(
    adj: &Adjacency,
    u: usize,
    v: usize,
    d: usize,
    n_basis: usize,
) -> Option<Vec<i8>> {
    if u == v {
        return Some(vec![0i8; n_basis]);
    }
    let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; d + 1];
    let mut seen = vec![false; d + 1];
    let mut queue = std::collections::VecDeque::from([u]);
    seen[u] = true;
    'bfs: while let Some(x) = queue.pop_front() {
        for &(edge_id, y, forward) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, edge_id, forward));
                if y == v {
                    break 'bfs;
                }
                queue.push_back(y);
            }
        }
    }
    if !seen[v] {
        return None;
    }
    let mut coeffs = vec![0i8; n_basis];
    let mut cur = v;
    while cur != u {
        let (from, edge_id, forward) = prev[cur].expect("path exists");
        // step from -> cur contributes +t when it follows the stored
        // orientation, -t against it
        coeffs[edge_id] = if forward { 1 } else { -1 };
        cur = from;
    }
    Some(coeffs)
}

/// Enumerates the complete, duplicate-free set of canonical patterns for
/// `n`-row, `d`-level systems by scanning all outcome pairs `(c, c')`.
/// Output is sorted lexicographically on the pattern entries; the witnessing
/// pair is the first one encountered in lexicographic `(c, c')` order.
///
/// For `d > n + 1` the cone is already full at `d = n + 1`, no patterns are
/// returned.
pub fn enumerate_canonical_p(n: usize, d: usize) -> Result<Vec<EnumeratedP>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "pattern enumeration needs d >= 2, got {d}"
        )));
    }
    if d > n + 1 {
        return Ok(Vec::new());
    }
    let pairs = (d as u128).pow(2 * n as u32);
    if pairs > PAIR_ENUMERATION_LIMIT as u128 {
        return Err(Error::InvalidArgument(format!(
            "enumerating {pairs} outcome pairs exceeds the limit of {PAIR_ENUMERATION_LIMIT}"
        )));
    }

    let mut found: std::collections::BTreeMap<Vec<i8>, EnumeratedP> =
        std::collections::BTreeMap::new();
    let mut digits = vec![1usize; 2 * n]; // (c, c') as one odometer, 1-based
    loop {
        let (c, c_prime) = digits.split_at(n);
        let (rows, rank) = pattern_of_pair(c, c_prime, d);
        if rank == d - 1 {
            let mut entries = vec![0i8; n * (d - 1)];
            for (i, row) in rows.iter().enumerate() {
                for (k, &e) in row.iter().enumerate() {
                    entries[i * (d - 1) + k] = e;
                }
            }
            found.entry(entries.clone()).or_insert_with(|| {
                let p = CanonicalP::new(n, d - 1, entries).expect("constructed canonically");
                let null_vector = lemma_null_vector(c, c_prime, d);
                EnumeratedP {
                    p,
                    witness_c: c.to_vec(),
                    witness_c_prime: c_prime.to_vec(),
                    null_vector,
                }
            });
        }
        // advance odometer
        let mut pos = 2 * n;
        loop {
            if pos == 0 {
                return Ok(found.into_values().collect());
            }
            pos -= 1;
            if digits[pos] < d {
                digits[pos] += 1;
                break;
            }
            digits[pos] = 1;
        }
    }
}

/// Constructive dependency of difference rows: given the edges
/// `(c_i, c'_i)`, returns a nonzero `s in {-1,0,1}^n` with
/// `sum_i s_i (e_{c_i} - e_{c'_i}) = 0` when the rows are dependent
/// (a zero row, or a cycle in the edge multigraph), `None` otherwise.
pub fn lemma_null_vector(c: &[usize], c_prime: &[usize], d: usize) -> Option<Vec<i8>> {
    let n = c.len();
    for i in 0..n {
        if c[i] == c_prime[i] {
            let mut s = vec![0i8; n];
            s[i] = 1;
            return Some(s);
        }
    }
    // cycle search in the edge multigraph; a directed traversal of a cycle
    // telescopes to zero
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d + 1];
    for i in 0..n {
        adj[c[i]].push((i, c_prime[i]));
        adj[c_prime[i]].push((i, c[i]));
    }
    let mut color = vec![0u8; d + 1]; // 0 unvisited, 1 on stack, 2 done
    let mut pos_in_path: Vec<usize> = vec![usize::MAX; d + 1];
    for start in 1..=d {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(start, None, 0)];
        let mut on_path: Vec<(usize, bool)> = Vec::new(); // (edge id, traversed forward)
        color[start] = 1;
        pos_in_path[start] = 0;
        while let Some(&(vertex, in_edge, next_idx)) = stack.last() {
            if next_idx < adj[vertex].len() {
                stack.last_mut().expect("nonempty").2 += 1;
                let (edge_id, other) = adj[vertex][next_idx];
                if Some(edge_id) == in_edge {
                    continue;
                }
                let forward = c[edge_id] == vertex;
                if color[other] == 1 {
                    // cycle: edges after `other` on the path, plus this one
                    let mut s = vec![0i8; n];
                    for &(e, fwd) in &on_path[pos_in_path[other]..] {
                        s[e] = if fwd { 1 } else { -1 };
                    }
                    s[edge_id] = if forward { 1 } else { -1 };
                    return Some(s);
                }
                if color[other] == 0 {
                    color[other] = 1;
                    // cycle slices start after this vertex's entering edge
                    pos_in_path[other] = on_path.len() + 1;
                    on_path.push((edge_id, forward));
                    stack.push((other, Some(edge_id), 0));
                }
            } else {
                stack.pop();
                color[vertex] = 2;
                if vertex != start {
                    on_path.pop();
                }
            }
        }
    }
    None
}
