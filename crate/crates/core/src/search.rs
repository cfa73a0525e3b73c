//! Numerical search for unit vectors unbiased to both members of a pair,
//! their orthogonality graph, and cliques that would extend the pair by a
//! third basis.
//!
//! Each restart minimizes
//! `f(v) = sum_b (|<b|v>|^2 - 1/d)^2` over the unit sphere, first by
//! projected gradient descent and then by a damped Gauss-Newton polish.
//! Restart `k` draws its start from stream `k` of a ChaCha8 generator seeded
//! with the master seed, so results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bases::{Basis, MuPair};
use crate::error::{Error, Result};
use crate::linalg::{inner, norm, Complex64, StateVector, Tolerance, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub master_seed: u64,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub cluster_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 20_000,
            master_seed: 0,
            max_iters: 2000,
            residual_tol: 1e-20,
            cluster_tol: 1e-6,
        }
    }
}

impl SearchConfig {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64, reason| Err(Error::ParameterRange { name, value, reason });
        if self.restarts == 0 {
            return bad("restarts", 0.0, "must be at least 1");
        }
        if self.max_iters == 0 {
            return bad("max_iters", 0.0, "must be at least 1");
        }
        if !(self.residual_tol.is_finite() && self.residual_tol > 0.0) {
            return bad("residual_tol", self.residual_tol, "must be positive");
        }
        if !(self.cluster_tol.is_finite() && self.cluster_tol > 0.0) {
            return bad("cluster_tol", self.cluster_tol, "must be positive");
        }
        Ok(())
    }
}

/// Sum over the `2d` basis vectors of `(|<b|v>|^2 - 1/d)^2`.
pub fn mu_residual(v: &StateVector, pair: &MuPair) -> Result<f64> {
    if v.dim() != pair.dim() {
        return Err(Error::DimensionMismatch {
            left: v.dim(),
            right: pair.dim(),
        });
    }
    Ok(Problem::new(pair).residual(v.components()))
}

/// Conjugated basis vectors of both members, stored row by row, so that
/// `<b|v>` is a plain dot product.
struct Problem {
    d: usize,
    rows: Vec<Complex64>,
}

impl Problem {
    fn new(pair: &MuPair) -> Self {
        let d = pair.dim();
        let mut rows = Vec::with_capacity(2 * d * d);
        for basis in [&pair.first, &pair.second] {
            for k in 0..d {
                rows.extend(basis.matrix().column(k).iter().map(|z| z.conj()));
            }
        }
        Problem { d, rows }
    }

    fn nb(&self) -> usize {
        2 * self.d
    }

    fn overlaps(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (b, c) in out.iter_mut().enumerate() {
            let row = &self.rows[b * self.d..(b + 1) * self.d];
            *c = row.iter().zip(v).map(|(x, y)| x * y).sum();
        }
    }

    fn residual(&self, v: &[Complex64]) -> f64 {
        let inv_d = 1.0 / self.d as f64;
        let mut c = vec![ZERO; self.nb()];
        self.overlaps(v, &mut c);
        c.iter().map(|c| (c.norm_sqr() - inv_d).powi(2)).sum()
    }

    /// Tangent component of the gradient at a unit vector `v`.
    fn gradient(&self, v: &[Complex64], grad: &mut [Complex64]) {
        let d = self.d;
        let inv_d = 1.0 / d as f64;
        let mut c = vec![ZERO; self.nb()];
        self.overlaps(v, &mut c);
        grad.fill(ZERO);
        for (b, cb) in c.iter().enumerate() {
            let w = 4.0 * (cb.norm_sqr() - inv_d) * cb;
            let row = &self.rows[b * d..(b + 1) * d];
            for (g, x) in grad.iter_mut().zip(row) {
                *g += w * x.conj();
            }
        }
        let radial = inner(v, grad).re;
        for (g, x) in grad.iter_mut().zip(v) {
            *g -= radial * x;
        }
    }

    /// Residuals and Jacobian with respect to the real and imaginary parts
    /// of `v`, including the effect of renormalization.
    fn jacobian(&self, v: &[Complex64], r: &mut [f64], jac: &mut [f64]) {
        let d = self.d;
        let n = 2 * d;
        let inv_d = 1.0 / d as f64;
        let mut c = vec![ZERO; self.nb()];
        self.overlaps(v, &mut c);
        for (b, cb) in c.iter().enumerate() {
            let p = cb.norm_sqr();
            r[b] = p - inv_d;
            let row = &self.rows[b * d..(b + 1) * d];
            for m in 0..d {
                // row holds conj(b_m)
                let t = cb.conj() * row[m];
                jac[b * n + m] = 2.0 * t.re - 2.0 * p * v[m].re;
                jac[b * n + d + m] = -2.0 * t.im - 2.0 * p * v[m].im;
            }
        }
    }
}

fn normalize(v: &mut [Complex64]) -> bool {
    let n = norm(v);
    if !(n.is_finite() && n > 0.0) {
        return false;
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    true
}

/// Solves `a x = b` for symmetric positive definite `a` (row-major, n x n).
fn cholesky_solve(a: &mut [f64], b: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut s = a[j * n + j];
        for k in 0..j {
            s -= a[j * n + k] * a[j * n + k];
        }
        if s.is_nan() || s <= 0.0 {
            return false;
        }
        let l = s.sqrt();
        a[j * n + j] = l;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / l;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

/// Residual below which first-order descent hands over to the polish.
const POLISH_START: f64 = 1e-8;
/// Residual at which polishing stops improving in double precision.
const POLISH_FLOOR: f64 = 1e-30;

fn descend(p: &Problem, v: &mut [Complex64], max_iters: usize) -> f64 {
    let mut f = p.residual(v);
    let mut step = 0.1;
    let mut grad = vec![ZERO; p.d];
    let mut trial = vec![ZERO; p.d];
    for _ in 0..max_iters {
        if f < POLISH_START {
            break;
        }
        p.gradient(v, &mut grad);
        loop {
            for ((t, x), g) in trial.iter_mut().zip(v.iter()).zip(&grad) {
                *t = x - step * g;
            }
            let ft = if normalize(&mut trial) { p.residual(&trial) } else { f64::INFINITY };
            if ft < f {
                v.copy_from_slice(&trial);
                f = ft;
                step *= 2.0;
                break;
            }
            step *= 0.5;
            if step < 1e-16 {
                return f;
            }
        }
    }
    f
}

fn polish(p: &Problem, v: &mut [Complex64]) -> f64 {
    let d = p.d;
    let n = 2 * d;
    let nb = p.nb();
    let mut f = p.residual(v);
    let mut lambda = 1e-6;
    let mut r = vec![0.0; nb];
    let mut jac = vec![0.0; nb * n];
    let mut trial = vec![ZERO; d];
    for _ in 0..100 {
        if f <= POLISH_FLOOR {
            break;
        }
        p.jacobian(v, &mut r, &mut jac);
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for b in 0..nb {
            let row = &jac[b * n..(b + 1) * n];
            for i in 0..n {
                jtr[i] -= row[i] * r[b];
                for k in 0..=i {
                    jtj[i * n + k] += row[i] * row[k];
                }
            }
        }
        for i in 0..n {
            for k in 0..i {
                jtj[k * n + i] = jtj[i * n + k];
            }
        }
        let mut improved = false;
        while lambda < 1e10 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[i * n + i] += lambda;
            }
            let mut delta = jtr.clone();
            if cholesky_solve(&mut a, &mut delta, n) {
                for m in 0..d {
                    trial[m] = v[m] + Complex64::new(delta[m], delta[d + m]);
                }
                if normalize(&mut trial) {
                    let ft = p.residual(&trial);
                    if ft < f {
                        v.copy_from_slice(&trial);
                        f = ft;
                        lambda = (lambda * 0.1).max(1e-15);
                        improved = true;
                        break;
                    }
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    f
}

/// Multiplies by a global phase so that the first component whose modulus
/// is within `1e-6` of the largest becomes real positive.
pub fn gauge_fix(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() >= max - 1e-6).copied() {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Distance between the rays through two unit vectors:
/// `min_theta |u - e^{i theta} v| = sqrt(2 - 2 |<u|v>|)`.
pub fn ray_distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    (2.0 - 2.0 * inner(u, v).norm()).max(0.0).sqrt()
}

fn run_restart(p: &Problem, cfg: &SearchConfig, index: usize) -> Option<(Vec<Complex64>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
    rng.set_stream(index as u64);
    let mut v: Vec<Complex64> = (0..p.d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    if !normalize(&mut v) {
        return None;
    }
    descend(p, &mut v, cfg.max_iters);
    let f = polish(p, &mut v);
    (f <= cfg.residual_tol).then(|| {
        gauge_fix(&mut v);
        (v, f)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuCluster {
    pub vector: StateVector,
    pub residual: f64,
    pub hits: usize,
}

/// Deduplicated solutions of one search.
#[derive(Clone, Debug, PartialEq)]
pub struct MuVectorSet {
    pub pair: MuPair,
    pub clusters: Vec<MuCluster>,
    pub restarts: usize,
    /// Restarts that reached `residual_tol`.
    pub converged: usize,
    /// Set when the clusters look like samples of a continuum rather than a
    /// finite solution set.
    pub manifold_warning: bool,
}

impl MuVectorSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn vectors(&self) -> Vec<StateVector> {
        self.clusters.iter().map(|c| c.vector.clone()).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.clusters.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Greedy clustering in restart order; a cluster keeps its lowest-residual
/// member as representative. Output is sorted lexicographically.
fn cluster(solutions: Vec<(Vec<Complex64>, f64)>, cluster_tol: f64) -> Vec<MuCluster> {
    let mut reps: Vec<(Vec<Complex64>, f64, usize)> = Vec::new();
    for (v, f) in solutions {
        match reps.iter_mut().find(|(r, _, _)| ray_distance(r, &v) < cluster_tol) {
            Some(rep) => {
                rep.2 += 1;
                if f < rep.1 {
                    rep.0 = v;
                    rep.1 = f;
                }
            }
            None => reps.push((v, f, 1)),
        }
    }
    reps.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    reps.into_iter()
        .map(|(v, residual, hits)| MuCluster {
            vector: StateVector::from_raw(v),
            residual,
            hits,
        })
        .collect()
}

/// A finite solution set is hit repeatedly and its points are well
/// separated; a continuum gives mostly single hits or close neighbours.
fn looks_like_manifold(clusters: &[MuCluster], converged: usize) -> bool {
    if clusters.len() < 2 {
        return false;
    }
    let singles = clusters.iter().filter(|c| c.hits == 1).count();
    if converged >= 20 && 2 * singles > clusters.len() {
        return true;
    }
    let mut nearest = f64::INFINITY;
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            nearest = nearest.min(ray_distance(a.vector.components(), b.vector.components()));
        }
    }
    nearest < 1e-3
}

pub fn find_mu_vectors(pair: &MuPair, cfg: &SearchConfig) -> Result<MuVectorSet> {
    cfg.validate()?;
    let p = Problem::new(pair);
    let solutions: Vec<(Vec<Complex64>, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run_restart(&p, cfg, k))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let converged = solutions.len();
    let clusters = cluster(solutions, cfg.cluster_tol);
    let manifold_warning = looks_like_manifold(&clusters, converged);
    Ok(MuVectorSet {
        pair: pair.clone(),
        clusters,
        restarts: cfg.restarts,
        converged,
        manifold_warning,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoGraph {
    pub nodes: usize,
    /// Pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Smallest and largest `|<u|v>|` over distinct nodes; `None` for fewer
    /// than two nodes.
    pub min_abs_overlap: Option<f64>,
    pub max_abs_overlap: Option<f64>,
    adjacency: Vec<Vec<bool>>,
}

impl OrthoGraph {
    pub fn from_vectors(vectors: &[StateVector], ortho_tol: f64) -> Self {
        let n = vectors.len();
        let mut adjacency = vec![vec![false; n]; n];
        let mut edges = Vec::new();
        let mut min: Option<f64> = None;
        let mut max: Option<f64> = None;
        for i in 0..n {
            for j in i + 1..n {
                let o = inner(vectors[i].components(), vectors[j].components()).norm();
                min = Some(min.map_or(o, |m| m.min(o)));
                max = Some(max.map_or(o, |m| m.max(o)));
                if o <= ortho_tol {
                    adjacency[i][j] = true;
                    adjacency[j][i] = true;
                    edges.push((i, j));
                }
            }
        }
        OrthoGraph {
            nodes: n,
            edges,
            min_abs_overlap: min,
            max_abs_overlap: max,
            adjacency,
        }
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&a| a).count()
    }

    /// A maximum clique, found by exhaustive branch and bound. Stops early
    /// once a clique of size `stop_at` is found.
    pub fn max_clique(&self, stop_at: usize) -> Vec<usize> {
        let mut best = Vec::new();
        let mut current = Vec::new();
        let candidates: Vec<usize> = (0..self.nodes).collect();
        self.expand(&mut current, candidates, &mut best, stop_at);
        best
    }

    fn expand(&self, current: &mut Vec<usize>, candidates: Vec<usize>, best: &mut Vec<usize>, stop_at: usize) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        for (i, &v) in candidates.iter().enumerate() {
            if best.len() >= stop_at || current.len() + candidates.len() - i <= best.len() {
                return;
            }
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&u| self.adjacency[v][u])
                .collect();
            current.push(v);
            self.expand(current, next, best, stop_at);
            current.pop();
        }
    }
}

pub fn orthogonality_graph(set: &MuVectorSet, tol: &Tolerance) -> OrthoGraph {
    OrthoGraph::from_vectors(&set.vectors(), tol.ortho_tol)
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub set: MuVectorSet,
    pub graph: OrthoGraph,
    pub max_clique: usize,
    /// A `d`-clique of the graph, as a basis.
    pub basis: Option<Basis>,
}

pub fn find_extension_basis(pair: &MuPair, cfg: &SearchConfig, tol: &Tolerance) -> Result<ExtensionResult> {
    let set = find_mu_vectors(pair, cfg)?;
    let graph = orthogonality_graph(&set, tol);
    let d = pair.dim();
    let clique = graph.max_clique(d);
    let basis = if clique.len() == d {
        let vectors: Vec<StateVector> = clique.iter().map(|&i| set.clusters[i].vector.clone()).collect();
        Some(Basis::from_vectors(&vectors, tol)?)
    } else {
        None
    };
    Ok(ExtensionResult {
        max_clique: clique.len(),
        set,
        graph,
        basis,
    })
}
