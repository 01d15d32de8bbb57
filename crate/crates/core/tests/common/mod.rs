//! Independent reference implementations shared by the integration tests and
//! the acceptance suite. Nothing here calls the code paths it checks.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hawkes_granger::graph::{CausalityGraph, UndirectedGraph, VertexSet};
use hawkes_granger::{BinnedSeries, EventStream, IntensityModel, LinkKernel};
use rand::Rng;

// ---------------------------------------------------------------------------
// Least squares

/// Literal moments: stacked lag vectors, their means over `t = k+1..T_h`, and
/// sample (cross-)covariances with divisor `T_h − k`.
pub struct LiteralMoments {
    pub gamma: Vec<Vec<f64>>,     // d × kd
    pub big_gamma: Vec<Vec<f64>>, // kd × kd
    pub ybar: Vec<f64>,
    pub ybark: Vec<f64>,
}

pub fn literal_moments(b: &BinnedSeries, k: usize) -> LiteralMoments {
    let d = b.dim();
    let len = b.len();
    let kd = k * d;
    let rows: Vec<usize> = (k..len).collect(); // 0-based t with t ≥ k
    let n = rows.len() as f64;
    let target = |t: usize| -> Vec<f64> { (0..d).map(|i| b.count(i, t) as f64).collect() };
    let stacked = |t: usize| -> Vec<f64> {
        let mut v = Vec::with_capacity(kd);
        for u in 1..=k {
            for i in 0..d {
                v.push(b.count(i, t - u) as f64);
            }
        }
        v
    };
    let mut ybar = vec![0.0; d];
    let mut ybark = vec![0.0; kd];
    for &t in &rows {
        for (a, v) in ybar.iter_mut().zip(target(t)) {
            *a += v / n;
        }
        for (a, v) in ybark.iter_mut().zip(stacked(t)) {
            *a += v / n;
        }
    }
    let mut gamma = vec![vec![0.0; kd]; d];
    let mut big_gamma = vec![vec![0.0; kd]; kd];
    for &t in &rows {
        let y = target(t);
        let x = stacked(t);
        for i in 0..d {
            for c in 0..kd {
                gamma[i][c] += (y[i] - ybar[i]) * (x[c] - ybark[c]) / n;
            }
        }
        for r in 0..kd {
            for c in 0..kd {
                big_gamma[r][c] += (x[r] - ybark[r]) * (x[c] - ybark[c]) / n;
            }
        }
    }
    LiteralMoments { gamma, big_gamma, ybar, ybark }
}

/// Gaussian elimination with partial pivoting; solves `A x = b` for every
/// column of `rhs`.
pub fn gauss_solve(a: &[Vec<f64>], rhs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = rhs[0].len();
    let mut aug: Vec<Vec<f64>> = a.iter().zip(rhs).map(|(r, b)| r.iter().chain(b).copied().collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs())).unwrap();
        aug.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = aug[r][col] / aug[col][col];
                if f != 0.0 {
                    for c in col..n + m {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    (0..n).map(|r| (0..m).map(|c| aug[r][n + c] / aug[r][r]).collect()).collect()
}

/// `(g, ν̂)` from the literal moments: `g Γ = γ`, `ν̂ = ȳ − g ȳ^{(k)}`.
pub fn literal_fit(b: &BinnedSeries, k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mom = literal_moments(b, k);
    let d = b.dim();
    let kd = k * d;
    // Γ is symmetric, so gᵀ = Γ⁻¹ γᵀ.
    let rhs: Vec<Vec<f64>> = (0..kd).map(|r| (0..d).map(|i| mom.gamma[i][r]).collect()).collect();
    let gt = gauss_solve(&mom.big_gamma, &rhs);
    let g: Vec<Vec<f64>> = (0..d).map(|i| (0..kd).map(|r| gt[r][i]).collect()).collect();
    let nu = (0..d)
        .map(|i| mom.ybar[i] - (0..kd).map(|c| g[i][c] * mom.ybark[c]).sum::<f64>())
        .collect();
    (g, nu)
}

/// Random count series with some serial and cross dependence.
pub fn random_series<R: Rng>(rng: &mut R, d: usize, len: usize, h: f64) -> BinnedSeries {
    let mut rows = vec![vec![0u32; len]; d];
    for t in 0..len {
        for i in 0..d {
            let mut rate = 0.3 + 0.1 * i as f64;
            if t > 0 {
                rate += 0.3 * rows[(i + 1) % d][t - 1] as f64;
            }
            let mut c = 0;
            let mut acc: f64 = rng.random::<f64>();
            let lim = (-rate).exp();
            while acc > lim {
                c += 1;
                acc *= rng.random::<f64>();
            }
            rows[i][t] = c;
        }
    }
    BinnedSeries::from_counts(h, rows).unwrap()
}

// ---------------------------------------------------------------------------
// Graphs

/// B-pointing walks from `A`: every sequence of non-loop edges starting in `A`
/// and ending with an arrowhead at some `b ∈ B`, in which no edge is traversed
/// twice in the same direction. Returns true when all of them are blocked by
/// `S ∖ A` under the literal collider rule.
pub fn brute_noncausal(g: &CausalityGraph, a: &VertexSet, b: &VertexSet, s: &VertexSet) -> bool {
    let cond: VertexSet = s.difference(a).copied().collect();
    // Directed traversals: (from, to, arrowhead at `to`).
    let edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|(x, y)| x != y).collect();
    let mut moves: Vec<(usize, usize, bool, usize)> = Vec::new(); // (from, to, head_at_to, id)
    for (n, &(x, y)) in edges.iter().enumerate() {
        moves.push((x, y, true, 2 * n));
        moves.push((y, x, false, 2 * n + 1));
    }

    fn open_at(v: usize, head_in: bool, head_out_at_v: bool, cond: &VertexSet) -> bool {
        let collider = head_in && head_out_at_v;
        collider == cond.contains(&v)
    }

    fn extend(
        v: usize,
        head_in: bool,
        used: &mut Vec<bool>,
        moves: &[(usize, usize, bool, usize)],
        b: &VertexSet,
        cond: &VertexSet,
    ) -> bool {
        for &(from, to, head_to, id) in moves {
            if from != v || used[id] {
                continue;
            }
            // Leaving v along this move: arrowhead at v iff the edge points into v.
            let head_at_v = !head_to;
            if !open_at(v, head_in, head_at_v, cond) {
                continue;
            }
            if head_to && b.contains(&to) {
                return true;
            }
            used[id] = true;
            let found = extend(to, head_to, used, moves, b, cond);
            used[id] = false;
            if found {
                return true;
            }
        }
        false
    }

    let mut used = vec![false; moves.len()];
    for &start in a {
        for &(from, to, head_to, id) in &moves {
            if from != start {
                continue;
            }
            if head_to && b.contains(&to) {
                return false;
            }
            used[id] = true;
            let found = extend(to, head_to, &mut used, &moves, b, &cond);
            used[id] = false;
            if found {
                return false;
            }
        }
    }
    true
}

/// Simple-path enumeration: true when every path from `A` to `B` hits `C`.
pub fn brute_separated(u: &UndirectedGraph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> bool {
    fn dfs(u: &UndirectedGraph, v: usize, visited: &mut Vec<bool>, b: &VertexSet, c: &VertexSet) -> bool {
        if b.contains(&v) {
            return true;
        }
        for &(x, y) in u.edges() {
            let w = if x == v {
                y
            } else if y == v {
                x
            } else {
                continue;
            };
            if visited[w] || c.contains(&w) {
                continue;
            }
            visited[w] = true;
            if dfs(u, w, visited, b, c) {
                return true;
            }
            visited[w] = false;
        }
        false
    }
    for &start in a {
        if c.contains(&start) {
            continue;
        }
        let mut visited = vec![false; u.d()];
        visited[start] = true;
        if dfs(u, start, &mut visited, b, c) {
            return false;
        }
    }
    true
}

/// Transitive closure over non-loop edges.
pub fn brute_ancestors(g: &CausalityGraph, b: &VertexSet) -> VertexSet {
    let d = g.d();
    let mut reach = vec![vec![false; d]; d];
    for &(x, y) in g.edges() {
        if x != y {
            reach[x][y] = true;
        }
    }
    for m in 0..d {
        for x in 0..d {
            for y in 0..d {
                if reach[x][m] && reach[m][y] {
                    reach[x][y] = true;
                }
            }
        }
    }
    (0..d).filter(|&x| b.iter().any(|&y| reach[x][y])).collect()
}

/// Literal rule over all vertex triples.
pub fn brute_moral(g: &CausalityGraph) -> BTreeSet<(usize, usize)> {
    let vs: Vec<usize> = g.vertices().iter().copied().collect();
    let mut out = BTreeSet::new();
    for &i in &vs {
        for &j in &vs {
            if i >= j {
                continue;
            }
            let adjacent = g.has_edge(i, j) || g.has_edge(j, i);
            let married = vs.iter().any(|&k| k != i && k != j && g.has_edge(i, k) && g.has_edge(j, k));
            if adjacent || married {
                out.insert((i, j));
            }
        }
    }
    out
}

pub fn brute_reduce(h: &UndirectedGraph, s: &VertexSet) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for &i in s {
        for &j in s {
            if i >= j {
                continue;
            }
            let mut rest = s.clone();
            rest.remove(&i);
            rest.remove(&j);
            let si: VertexSet = [i].into_iter().collect();
            let sj: VertexSet = [j].into_iter().collect();
            if h.has_edge(i, j) || !brute_separated(h, &si, &sj, &rest) {
                out.insert((i, j));
            }
        }
    }
    out
}

pub fn random_digraph<R: Rng>(rng: &mut R, d: usize, p: f64) -> CausalityGraph {
    let mut g = CausalityGraph::new(d);
    for x in 0..d {
        for y in 0..d {
            if rng.random::<f64>() < p {
                g.add_edge(x, y).unwrap();
            }
        }
    }
    g
}

pub fn random_subset<R: Rng>(rng: &mut R, from: &[usize], p: f64) -> VertexSet {
    from.iter().copied().filter(|_| rng.random::<f64>() < p).collect()
}

// ---------------------------------------------------------------------------
// Quadrature

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫₀^t max(λ_i(s), 0) ds` by adaptive quadrature of the intensity evaluated
/// from its definition, split at every discontinuity.
pub fn quadrature_compensator<M: IntensityModel>(model: &M, stream: &EventStream, i: usize, t: f64) -> f64 {
    let d = model.dim();
    let lambda = |s: f64| -> f64 {
        let mut lam = model.baseline(i);
        for j in 0..d {
            let k = model.kernel(i, j);
            for &tau in &stream.components()[j] {
                if tau < s {
                    lam += k.eval(s - tau);
                }
            }
        }
        lam.max(0.0)
    };
    let mut cuts = vec![0.0, t];
    for j in 0..d {
        let k = model.kernel(i, j);
        for &tau in &stream.components()[j] {
            cuts.push(tau);
            if let LinkKernel::StepFunction { h, values } = k {
                cuts.extend((1..=values.len()).map(|m| tau + m as f64 * h));
            }
        }
    }
    cuts.retain(|&c| c >= 0.0 && c <= t);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            // Evaluate strictly inside each piece so jump points never bias it.
            let (a, b) = (w[0], w[1]);
            let eps = (b - a) * 1e-13;
            adaptive_simpson(&lambda, a + eps, b - eps, 1e-13 * (1.0 + b - a)) + 2.0 * eps * lambda(0.5 * (a + b))
        })
        .sum()
}
