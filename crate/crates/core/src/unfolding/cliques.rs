use std::collections::BTreeSet;

/// Maximal cliques of an undirected graph given by adjacency sets over
/// vertices `0..n`. Bron–Kerbosch with Tomita pivoting.
///
/// Each clique is sorted and the list is sorted, so output does not depend on
/// exploration order. Isolated vertices come out as singleton cliques.
pub fn maximal_cliques(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if adj.is_empty() {
        return out;
    }
    let p: BTreeSet<usize> = (0..adj.len()).collect();
    bron_kerbosch(adj, &mut Vec::new(), p, BTreeSet::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|u| (adj[*u].intersection(&p).count(), std::cmp::Reverse(*u)))
        .expect("p is nonempty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        r.push(v);
        let np = p.intersection(&adj[v]).copied().collect();
        let nx = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}
