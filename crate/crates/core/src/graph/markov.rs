use std::collections::VecDeque;

use super::{CausalityGraph, Direction, Path, UndirectedGraph, VertexSet};
use crate::error::{Error, Result};
use crate::estimate::{LinkEstimate, ThresholdRule};
use crate::model::{HawkesModel, IntensityModel};

/// Edge `j → i` iff `φ_ij` is not identically zero.
pub fn graph_from_model(model: &HawkesModel) -> CausalityGraph {
    let mut g = CausalityGraph::new(model.dim());
    for ((i, j), k) in model.kernels() {
        if !k.is_zero() {
            g.add_edge(j, i).expect("indices in range");
        }
    }
    g
}

/// Edge `j → i` for every link the threshold rule calls nonzero.
pub fn graph_from_estimate(estimate: &LinkEstimate, rule: &ThresholdRule) -> CausalityGraph {
    let mut g = CausalityGraph::new(estimate.d);
    for (i, row) in rule.flags(estimate).iter().enumerate() {
        for (j, &on) in row.iter().enumerate() {
            if on {
                g.add_edge(j, i).expect("indices in range");
            }
        }
    }
    g
}

/// Both steps around interior vertex `position` point into it.
pub fn is_collider(path: &Path, position: usize) -> Result<bool> {
    let n = path.len();
    if position == 0 || position >= n {
        return Err(Error::PositionOutOfRange { position, steps: n });
    }
    let steps = path.steps();
    Ok(steps[position - 1] == Direction::Forward && steps[position] == Direction::Backward)
}

/// Blocked iff some interior collider lies outside `c` or some interior
/// non-collider lies inside it. Endpoints are never tested.
pub fn is_blocked(path: &Path, c: &VertexSet) -> bool {
    (1..path.len()).any(|pos| {
        let v = path.vertices()[pos];
        let collider = is_collider(path, pos).expect("interior position");
        collider != c.contains(&v)
    })
}

fn check_members(vertices: &VertexSet, sets: &[&VertexSet]) -> Result<()> {
    for set in sets {
        if let Some(v) = set.iter().find(|v| !vertices.contains(v)) {
            return Err(Error::InvalidParameter(format!("vertex {} not in graph", v + 1)));
        }
    }
    Ok(())
}

fn check_disjoint(a: &VertexSet, b: &VertexSet) -> Result<()> {
    match a.intersection(b).next() {
        Some(v) => Err(Error::OverlappingSets(format!("vertex {} is in both A and B", v + 1))),
        None => Ok(()),
    }
}

/// True when every path from `A` ending with an arrowhead at some `b ∈ B` is
/// blocked by `S ∖ A`, i.e. `N_A` does not Granger-cause `N_B` with respect to
/// `N_S`.
///
/// Reachability over `(vertex, arrived through an arrowhead)` states: a walk
/// may continue through `v` when `v` is a collider in `S ∖ A` or a
/// non-collider outside it.
pub fn granger_noncausal(g: &CausalityGraph, a: &VertexSet, b: &VertexSet, s: &VertexSet) -> Result<bool> {
    check_members(g.vertices(), &[a, b, s])?;
    check_disjoint(a, b)?;
    let cond: VertexSet = s.difference(a).copied().collect();
    let d = g.d();
    let mut seen = vec![[false; 2]; d];
    let mut queue = VecDeque::new();

    let mut push = |v: usize, head: bool, queue: &mut VecDeque<(usize, bool)>| -> bool {
        if head && b.contains(&v) {
            return true;
        }
        if !seen[v][head as usize] {
            seen[v][head as usize] = true;
            queue.push_back((v, head));
        }
        false
    };

    for &start in a {
        for w in g.children(start) {
            if push(w, true, &mut queue) {
                return Ok(false);
            }
        }
        for w in g.parents(start) {
            if push(w, false, &mut queue) {
                return Ok(false);
            }
        }
    }
    while let Some((v, head)) = queue.pop_front() {
        let in_cond = cond.contains(&v);
        // Leaving through a tail: v is a non-collider.
        if !in_cond {
            for w in g.children(v) {
                if push(w, true, &mut queue) {
                    return Ok(false);
                }
            }
        }
        // Leaving against an arrow into v: collider iff we also arrived through a head.
        if head == in_cond {
            for w in g.parents(v) {
                if push(w, false, &mut queue) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Vertices with a directed path of length >= 1 into `b`.
pub fn ancestors(g: &CausalityGraph, b: &VertexSet) -> VertexSet {
    let mut out = VertexSet::new();
    let mut queue: VecDeque<usize> = b.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for p in g.parents(v) {
            if out.insert(p) {
                queue.push_back(p);
            }
        }
    }
    out
}

/// Join adjacent vertices and parents sharing a child; self-loops dropped.
pub fn moral_graph(g: &CausalityGraph) -> UndirectedGraph {
    let mut m = UndirectedGraph::on_vertices(g.d(), g.vertices().clone()).expect("same vertex set");
    for &(a, b) in g.edges() {
        if a != b {
            m.add_edge(a, b).expect("vertices in graph");
        }
    }
    for &child in g.vertices() {
        let parents: Vec<usize> = g.parents(child).collect();
        for (n, &p) in parents.iter().enumerate() {
            for &q in &parents[n + 1..] {
                m.add_edge(p, q).expect("vertices in graph");
            }
        }
    }
    m
}

/// True when every path between `A` and `B` in `u` contains a vertex of `C`.
pub fn separated(u: &UndirectedGraph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
    check_members(u.vertices(), &[a, b])?;
    check_disjoint(a, b)?;
    let mut seen: VertexSet = a.difference(c).copied().collect();
    let mut queue: VecDeque<usize> = seen.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for w in u.neighbors(v) {
            if c.contains(&w) {
                continue;
            }
            if b.contains(&w) {
                return Ok(false);
            }
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    Ok(true)
}

/// `(G_{an(S) ∪ S})^m`, the graph for which the subprocess `N_S` is globally
/// Markov.
pub fn markov_subprocess_graph(g: &CausalityGraph, s: &VertexSet) -> Result<UndirectedGraph> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("S must be nonempty".into()));
    }
    check_members(g.vertices(), &[s])?;
    let mut keep = ancestors(g, s);
    keep.extend(s.iter().copied());
    Ok(moral_graph(&g.induced(&keep)))
}

/// `H(S)`: the subgraph `H_S` plus an edge `i -- j` whenever `i` and `j` are not
/// separated by `S ∖ {i, j}` in `H`.
pub fn reduce(h: &UndirectedGraph, s: &VertexSet) -> Result<UndirectedGraph> {
    check_members(h.vertices(), &[s])?;
    let mut out = h.induced(s);
    let members: Vec<usize> = s.iter().copied().collect();
    for (n, &i) in members.iter().enumerate() {
        for &j in &members[n + 1..] {
            if out.has_edge(i, j) {
                continue;
            }
            let mut rest = s.clone();
            rest.remove(&i);
            rest.remove(&j);
            let si: VertexSet = [i].into_iter().collect();
            let sj: VertexSet = [j].into_iter().collect();
            if !separated(h, &si, &sj, &rest)? {
                out.add_edge(i, j)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::LinkKernel;
    use Direction::{Backward, Forward};

    fn set(v: &[usize]) -> VertexSet {
        v.iter().map(|x| x - 1).collect()
    }

    fn dg(d: usize, edges: &[(usize, usize)]) -> CausalityGraph {
        let e: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (a - 1, b - 1)).collect();
        CausalityGraph::from_edges(d, &e).unwrap()
    }

    fn ug(d: usize, edges: &[(usize, usize)]) -> UndirectedGraph {
        let e: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (a - 1, b - 1)).collect();
        UndirectedGraph::from_edges(d, &e).unwrap()
    }

    #[test]
    fn graph_from_model_transposes() {
        let e = LinkKernel::exponential(0.3, 1.0).unwrap();
        let z = LinkKernel::Zero;
        let m = HawkesModel::new(vec![1.0, 1.0], vec![vec![z.clone(), z.clone()], vec![e.clone(), z.clone()]]).unwrap();
        assert_eq!(graph_from_model(&m), dg(2, &[(1, 2)]));
        let zero = HawkesModel::poisson(vec![1.0; 3]).unwrap();
        assert!(graph_from_model(&zero).edges().is_empty());
        let full = HawkesModel::new(vec![1.0; 2], vec![vec![e.clone(); 2]; 2]).unwrap();
        assert_eq!(graph_from_model(&full).edges().len(), 4);
    }

    #[test]
    fn collider_and_blocking() {
        let g = dg(3, &[(1, 2), (3, 2), (2, 3)]);
        let coll = Path::new(&g, vec![0, 1, 2], vec![Forward, Backward]).unwrap();
        let chain = Path::new(&g, vec![0, 1, 2], vec![Forward, Forward]).unwrap();
        assert!(is_collider(&coll, 1).unwrap());
        assert!(!is_collider(&chain, 1).unwrap());
        assert!(matches!(is_collider(&chain, 0), Err(Error::PositionOutOfRange { .. })));
        assert!(matches!(is_collider(&chain, 2), Err(Error::PositionOutOfRange { .. })));
        let fork_g = dg(3, &[(2, 1), (2, 3)]);
        let fork = Path::new(&fork_g, vec![0, 1, 2], vec![Backward, Forward]).unwrap();
        assert!(!is_collider(&fork, 1).unwrap());

        assert!(is_blocked(&chain, &set(&[2])));
        assert!(is_blocked(&coll, &set(&[])));
        assert!(!is_blocked(&coll, &set(&[2])));
        assert!(!is_blocked(&chain, &set(&[])));
    }

    #[test]
    fn noncausality_examples() {
        let chain = dg(3, &[(1, 2), (2, 3)]);
        assert!(granger_noncausal(&chain, &set(&[1]), &set(&[3]), &set(&[1, 2, 3])).unwrap());
        assert!(!granger_noncausal(&chain, &set(&[1]), &set(&[3]), &set(&[1, 3])).unwrap());
        let coll = dg(3, &[(1, 2), (3, 2)]);
        for s in [set(&[1, 3]), set(&[1, 2, 3]), set(&[])] {
            assert!(granger_noncausal(&coll, &set(&[1]), &set(&[3]), &s).unwrap());
        }
        assert!(matches!(
            granger_noncausal(&chain, &set(&[1]), &set(&[1]), &set(&[1])),
            Err(Error::OverlappingSets(_))
        ));
    }

    #[test]
    fn noncausality_through_conditioned_descendant() {
        // 1 → 2 ← 4 → 3 and 2 → 5; conditioning on 5 opens the collider at 2
        // only for walks that go down to 5 and back.
        let g = dg(5, &[(1, 2), (4, 2), (4, 3), (2, 5)]);
        assert!(!granger_noncausal(&g, &set(&[1]), &set(&[3]), &set(&[1, 3, 5])).unwrap());
        assert!(granger_noncausal(&g, &set(&[1]), &set(&[3]), &set(&[1, 3])).unwrap());
    }

    #[test]
    fn ancestors_examples() {
        assert_eq!(ancestors(&dg(3, &[(1, 2), (2, 3)]), &set(&[3])), set(&[1, 2]));
        assert_eq!(ancestors(&CausalityGraph::new(3), &set(&[1])), set(&[]));
        assert_eq!(ancestors(&dg(2, &[(1, 2), (2, 1)]), &set(&[1])), set(&[1, 2]));
    }

    #[test]
    fn moral_examples() {
        assert_eq!(moral_graph(&dg(3, &[(1, 3), (2, 3)])), ug(3, &[(1, 3), (2, 3), (1, 2)]));
        assert_eq!(moral_graph(&dg(3, &[(1, 2), (2, 3)])), ug(3, &[(1, 2), (2, 3)]));
        assert_eq!(moral_graph(&CausalityGraph::new(3)), UndirectedGraph::new(3));
        assert_eq!(moral_graph(&dg(2, &[(1, 1)])), UndirectedGraph::new(2));
    }

    #[test]
    fn separation_examples() {
        let u = ug(3, &[(1, 2), (2, 3)]);
        assert!(separated(&u, &set(&[1]), &set(&[3]), &set(&[2])).unwrap());
        assert!(!separated(&u, &set(&[1]), &set(&[3]), &set(&[])).unwrap());
        assert!(separated(&u, &set(&[1]), &set(&[3]), &set(&[1])).unwrap());
        assert!(matches!(
            separated(&u, &set(&[1, 2]), &set(&[2]), &set(&[])),
            Err(Error::OverlappingSets(_))
        ));
    }

    #[test]
    fn subprocess_and_reduction_examples() {
        let chain = dg(3, &[(1, 2), (2, 3)]);
        assert_eq!(markov_subprocess_graph(&chain, &set(&[1, 3])).unwrap(), ug(3, &[(1, 2), (2, 3)]));
        let two = dg(4, &[(1, 2), (3, 4)]);
        let h = markov_subprocess_graph(&two, &set(&[1, 2])).unwrap();
        assert_eq!(h.vertices(), &set(&[1, 2]));
        assert_eq!(h.edges().len(), 1);
        assert!(h.has_edge(0, 1));
        assert!(markov_subprocess_graph(&two, &set(&[])).is_err());

        let h = ug(3, &[(1, 2), (2, 3)]);
        let r = reduce(&h, &set(&[1, 3])).unwrap();
        assert_eq!(r.vertices(), &set(&[1, 3]));
        assert!(r.has_edge(0, 2) && r.edges().len() == 1);
        assert_eq!(reduce(&h, &set(&[1, 2, 3])).unwrap(), h);
    }
}
