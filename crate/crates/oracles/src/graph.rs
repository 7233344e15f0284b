/// Natural visibility graph on the index axis: every pair checked against
/// every intermediate sample. Neighbour lists are sorted.
pub fn visibility_edges(y: &[f64]) -> Vec<Vec<usize>> {
    let n = y.len();
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            let t = |i: usize| i as f64;
            let ok = (a + 1..b).all(|c| y[c] < y[b] + (y[a] - y[b]) * (t(b) - t(c)) / (t(b) - t(a)));
            if ok {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    for r in adj.iter_mut() {
        r.sort_unstable();
    }
    adj
}
