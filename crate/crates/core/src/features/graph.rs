//! Natural visibility graph of the RR series and its network indices.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Whether sample `c` lies strictly below the segment joining `a` and `b`
/// (`a < c < b`), cross-multiplied to avoid division.
#[inline]
pub fn below_segment(t: &[f64], y: &[f64], a: usize, c: usize, b: usize) -> bool {
    (y[c] - y[b]) * (t[b] - t[a]) < (y[a] - y[b]) * (t[b] - t[c])
}

/// Sorted adjacency lists of the natural visibility graph.
///
/// For each node `a` the scan keeps the intermediate node of largest slope
/// seen from `a`; node `b` is visible exactly when that node lies below the
/// segment `a`–`b`, so each row costs `O(n)`.
pub fn visibility_graph(t: &[f64], y: &[f64]) -> Vec<Vec<usize>> {
    let n = y.len();
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        let mut blocker: Option<usize> = None;
        for b in a + 1..n {
            let visible = match blocker {
                None => true,
                Some(c) => below_segment(t, y, a, c, b),
            };
            if visible {
                adj[a].push(b);
                adj[b].push(a);
            }
            // keep the steepest node from a
            let steeper = match blocker {
                None => true,
                Some(c) => (y[b] - y[a]) * (t[c] - t[a]) > (y[c] - y[a]) * (t[b] - t[a]),
            };
            if steeper {
                blocker = Some(b);
            }
        }
    }
    for row in adj.iter_mut() {
        row.sort_unstable();
    }
    adj
}

/// Mean shortest-path length over ordered pairs of distinct, connected nodes.
pub fn mean_shortest_path(adj: &[Vec<usize>]) -> f64 {
    let n = adj.len();
    let mut total = 0u64;
    let mut pairs = 0u64;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    total += dist[v] as u64;
                    pairs += 1;
                    queue.push_back(v);
                }
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        total as f64 / pairs as f64
    }
}

/// Per-node triangle counts.
fn triangles(adj: &[Vec<usize>]) -> Vec<u64> {
    let n = adj.len();
    let mut mark = vec![false; n];
    let mut tri = vec![0u64; n];
    for u in 0..n {
        for &v in &adj[u] {
            mark[v] = true;
        }
        for &v in &adj[u] {
            for &w in &adj[v] {
                if w > v && mark[w] {
                    tri[u] += 1;
                }
            }
        }
        for &v in &adj[u] {
            mark[v] = false;
        }
    }
    tri
}

/// ShortPathLen, GlobClusterCoef, mean LocalClusterCoef, mean Degree.
pub fn graph_metrics(adj: &[Vec<usize>]) -> [f64; 4] {
    let n = adj.len();
    let tri = triangles(adj);
    let mut closed = 0.0;
    let mut triples = 0.0;
    let mut local = 0.0;
    for u in 0..n {
        let k = adj[u].len() as f64;
        let pairs = k * (k - 1.0) / 2.0;
        closed += tri[u] as f64;
        triples += pairs;
        if pairs > 0.0 {
            local += tri[u] as f64 / pairs;
        }
    }
    let degree = adj.iter().map(|r| r.len()).sum::<usize>() as f64 / n as f64;
    [mean_shortest_path(adj), if triples > 0.0 { closed / triples } else { 0.0 }, local / n as f64, degree]
}

/// Network indices with the beat index as time axis.
pub fn visibility_rr(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 10 {
        return Err(Error::InsufficientData { what: "visibility graph (intervals)", needed: 10, got: x.len() });
    }
    let t: Vec<f64> = (0..x.len()).map(|i| i as f64).collect();
    Ok(graph_metrics(&visibility_graph(&t, x)).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn convex_series_is_complete() {
        let y: Vec<f64> = (0..6).map(|i| (i * i) as f64).collect();
        let m = graph_metrics(&visibility_graph(&index(6), &y));
        assert_eq!(m, [1.0, 1.0, 1.0, 5.0]);
    }

    #[test]
    fn two_nodes_form_one_edge() {
        let m = graph_metrics(&visibility_graph(&index(2), &[1.0, 3.0]));
        assert_eq!(m[3], 1.0);
        assert_eq!(m[0], 1.0);
    }

    #[test]
    fn collinear_points_only_see_neighbours() {
        let adj = visibility_graph(&index(5), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(adj[0], vec![1]);
        assert_eq!(adj[2], vec![1, 3]);
    }
}
