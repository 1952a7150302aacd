//! Per-block graphs and the Q-normalized Laplacian block transform.
//!
//! For a block with combinatorial Laplacian `L = D - W` and node weights
//! `Q = diag(q)`, the transform is `Phi^T` where `Q^{-1/2} L Q^{-1/2} =
//! Phi Lambda Phi^T`. Its first row is `sqrt(q) / sqrt(sum q)`, so the first
//! output is the block's DC and the rest are AC detail coefficients.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues closer than this are treated as one multiplicity.
pub const EIGEN_TIE_TOL: f64 = 1e-9;

/// Weighted undirected graph over a block's child nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockGraph {
    pub coords: Vec<[u32; 3]>,
    /// Undirected edges `(j, k, w)` with `j < k`.
    pub edges: Vec<(usize, usize, f64)>,
    pub node_weights: Vec<f64>,
    /// Number of bridge edges added to connect components.
    pub bridges: usize,
}

impl BlockGraph {
    pub fn len(&self) -> usize {
        self.node_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_weights.is_empty()
    }

    /// Dense symmetric weight matrix `W`.
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut w = DMatrix::zeros(n, n);
        for &(j, k, wt) in &self.edges {
            w[(j, k)] += wt;
            w[(k, j)] += wt;
        }
        w
    }

    /// Combinatorial Laplacian `D - W`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut l = DMatrix::zeros(n, n);
        for &(j, k, w) in &self.edges {
            l[(j, j)] += w;
            l[(k, k)] += w;
            l[(j, k)] -= w;
            l[(k, j)] -= w;
        }
        l
    }
}

fn distance(a: [u32; 3], b: [u32; 3]) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(&x, &y)| {
            let d = f64::from(x) - f64::from(y);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Connect nodes closer than `threshold` with weight `1 / distance`.
///
/// Distances are measured on the children's integer grid. Disconnected
/// graphs are joined by repeatedly adding the shortest edge between two
/// different components (lowest index pair on ties).
pub fn build_block_graph(coords: &[[u32; 3]], node_weights: &[f64], threshold: f64) -> BlockGraph {
    let n = coords.len();
    debug_assert_eq!(n, node_weights.len());
    let mut edges = Vec::new();
    let mut sets = DisjointSet::new(n);
    let mut components = n;
    for j in 0..n {
        for k in j + 1..n {
            let d = distance(coords[j], coords[k]);
            if d > 0.0 && d <= threshold {
                edges.push((j, k, 1.0 / d));
                if sets.union(j, k) {
                    components -= 1;
                }
            }
        }
    }

    let mut bridges = 0;
    while components > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for j in 0..n {
            let rj = sets.find(j);
            for k in j + 1..n {
                if sets.find(k) == rj {
                    continue;
                }
                let d = distance(coords[j], coords[k]);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, j, k));
                }
            }
        }
        let (d, j, k) = best.expect("more than one component implies a cross pair");
        edges.push((j, k, 1.0 / d.max(f64::MIN_POSITIVE)));
        sets.union(j, k);
        components -= 1;
        bridges += 1;
    }

    BlockGraph {
        coords: coords.to_vec(),
        edges,
        node_weights: node_weights.to_vec(),
        bridges,
    }
}

/// `Q^{-1/2} (D - W) Q^{-1/2}`.
pub fn q_normalized_laplacian(g: &BlockGraph) -> Result<DMatrix<f64>> {
    for (index, &weight) in g.node_weights.iter().enumerate() {
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::NonPositiveWeight { index, weight });
        }
    }
    let inv_sqrt: Vec<f64> = g.node_weights.iter().map(|q| 1.0 / q.sqrt()).collect();
    let mut l = g.laplacian();
    let n = g.len();
    for j in 0..n {
        for k in 0..n {
            l[(j, k)] *= inv_sqrt[j] * inv_sqrt[k];
        }
    }
    Ok(l)
}

/// Orthonormal block transform: rows of `basis` are eigenvectors of `L_Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTransform {
    /// Row-major `n x n` matrix `Phi^T`.
    basis: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl BlockTransform {
    pub fn identity(n: usize) -> Self {
        let mut basis = vec![0.0; n * n];
        for i in 0..n {
            basis[i * n + i] = 1.0;
        }
        Self {
            basis,
            eigenvalues: vec![0.0; n],
        }
    }

    /// Build from rows of `Phi^T` and eigenvalues. Rows must be orthonormal.
    pub fn from_rows(rows: Vec<Vec<f64>>, eigenvalues: Vec<f64>) -> Self {
        let n = rows.len();
        debug_assert!(rows.iter().all(|r| r.len() == n));
        debug_assert_eq!(eigenvalues.len(), n);
        Self {
            basis: rows.into_iter().flatten().collect(),
            eigenvalues,
        }
    }

    /// Two-node closed form `[[a, b], [-b, a]]` with `a = sqrt(q1 / (q1 + q2))`,
    /// row signs normalized like [`block_transform`].
    pub fn butterfly(q1: f64, q2: f64) -> Self {
        let s = (q1 + q2).sqrt();
        let a = q1.sqrt() / s;
        let b = q2.sqrt() / s;
        let ac = canonical_sign(vec![-b, a]);
        Self::from_rows(vec![vec![a, b], ac], vec![0.0, 1.0 / q1 + 1.0 / q2])
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.basis[i * n..(i + 1) * n]
    }

    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_row_slice(n, n, &self.basis)
    }

    /// `out = Phi^T x`.
    pub fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            *o = self.basis[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = Phi y`.
    pub fn inverse_into(&self, y: &[f64], out: &mut [f64]) {
        let n = self.len();
        out[..n].fill(0.0);
        for (i, &yi) in y.iter().enumerate().take(n) {
            if yi == 0.0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(&self.basis[i * n..(i + 1) * n]) {
                *o += b * yi;
            }
        }
    }
}

/// Flip `v` so its largest-magnitude entry (lowest index within tolerance) is positive.
fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = EIGEN_TIE_TOL * max.max(1.0);
    if let Some(lead) = v.iter().find(|x| x.abs() >= max - tol) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > EIGEN_TIE_TOL {
            return x.total_cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

/// Eigen-decompose `L_Q` into a [`BlockTransform`].
///
/// Eigenvalues ascend; eigenvectors within a multiplicity are ordered
/// lexicographically after sign normalization. The first row is set to the
/// exact DC vector `sqrt(q) / sqrt(sum q)`. The graph must be connected.
pub fn block_transform(g: &BlockGraph) -> Result<BlockTransform> {
    let n = g.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty block".into()));
    }
    let lq = q_normalized_laplacian(g)?;
    if n == 1 {
        return Ok(BlockTransform::identity(1));
    }

    let eig = SymmetricEigen::try_new(lq, f64::EPSILON, 0).ok_or(Error::Eigensolver { level: 0, block: 0 })?;
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let lambda = eig.eigenvalues[i];
            let lambda = if (-1e-12..0.0).contains(&lambda) { 0.0 } else { lambda };
            (
                lambda,
                canonical_sign(eig.eigenvectors.column(i).iter().copied().collect()),
            )
        })
        .collect();
    if pairs
        .iter()
        .any(|(l, v)| !l.is_finite() || v.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::Eigensolver { level: 0, block: 0 });
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // reorder each run of tied eigenvalues lexicographically
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[start].0 <= EIGEN_TIE_TOL {
            end += 1;
        }
        if end - start > 1 && start > 0 {
            pairs[start..end].sort_by(|a, b| lex_cmp(&a.1, &b.1));
        }
        start = end;
    }

    let total: f64 = g.node_weights.iter().sum();
    let dc: Vec<f64> = g.node_weights.iter().map(|q| (q / total).sqrt()).collect();
    pairs[0] = (0.0, dc);

    let (eigenvalues, rows): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().unzip();
    Ok(BlockTransform::from_rows(rows, eigenvalues))
}

/// Apply `Phi^T` to one channel; entry 0 of the result is the DC.
pub fn apply_block(t: &BlockTransform, signal: &[f64]) -> Result<Vec<f64>> {
    if signal.len() != t.len() {
        return Err(Error::LengthMismatch {
            expected: t.len(),
            found: signal.len(),
        });
    }
    let mut out = vec![0.0; t.len()];
    t.forward_into(signal, &mut out);
    Ok(out)
}
