//! Connectivity helpers over a dense weight matrix. An edge exists where the
//! weight is strictly positive.

use crate::matrix::DenseMatrix;

fn out_neighbors(w: &DenseMatrix, i: usize) -> Vec<usize> {
    (0..w.cols()).filter(|&j| j != i && w.get(i, j) > 0.0).collect()
}

/// Strongly connected components (iterative Tarjan), each sorted ascending;
/// components ordered by their smallest member.
pub fn strongly_connected_components(w: &DenseMatrix) -> Vec<Vec<usize>> {
    let n = w.rows();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut comps: Vec<Vec<usize>> = Vec::new();

    // explicit DFS frames: (node, neighbor list, cursor)
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut frames: Vec<(usize, Vec<usize>, usize)> = vec![(start, out_neighbors(w, start), 0)];
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(frame) = frames.last_mut() {
            let (v, neighbors, cursor) = (frame.0, frame.1.clone(), frame.2);
            if cursor < neighbors.len() {
                frame.2 += 1;
                let u = neighbors[cursor];
                if index[u] == usize::MAX {
                    index[u] = next_index;
                    low[u] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u] = true;
                    frames.push((u, out_neighbors(w, u), 0));
                } else if on_stack[u] {
                    low[v] = low[v].min(index[u]);
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let u = stack.pop().unwrap();
                        on_stack[u] = false;
                        comp.push(u);
                        if u == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Weakly connected components: BFS over the symmetrized edge set.
pub fn weak_components(w: &DenseMatrix) -> Vec<Vec<usize>> {
    let n = w.rows();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for (u, seen_u) in seen.iter_mut().enumerate() {
                if !*seen_u && u != v && (w.get(v, u) > 0.0 || w.get(u, v) > 0.0) {
                    *seen_u = true;
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Aperiodicity of a strongly connected graph: the gcd of closed-walk
/// lengths is 1. Computed from BFS level differences.
pub fn is_aperiodic(w: &DenseMatrix) -> bool {
    let n = w.rows();
    if n == 0 {
        return true;
    }
    if n == 1 {
        return w.get(0, 0) > 0.0;
    }
    let mut dist = vec![usize::MAX; n];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for u in out_neighbors(w, v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let mut g: i64 = 0;
    for v in 0..n {
        if dist[v] == usize::MAX {
            // not strongly connected; callers should have checked
            return false;
        }
        for u in out_neighbors(w, v) {
            let diff = dist[v] as i64 + 1 - dist[u] as i64;
            g = gcd(g, diff.abs());
        }
        if w.get(v, v) > 0.0 {
            g = gcd(g, 1);
        }
    }
    g == 1
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<f64>>) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn two_sccs_for_one_directed_edge() {
        let w = m(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        let comps = strongly_connected_components(&w);
        assert_eq!(comps, vec![vec![0], vec![1]]);
        assert_eq!(weak_components(&w), vec![vec![0, 1]]);
    }

    #[test]
    fn cycle_periodicity() {
        let cycle3 = m(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ]);
        assert!(!is_aperiodic(&cycle3)); // period 3
        let mut with_chord = cycle3.clone();
        with_chord[(0, 2)] = 1.0; // adds a 2-cycle 0->2->0; gcd(3,2)=1
        assert!(is_aperiodic(&with_chord));
    }

    #[test]
    fn self_loop_makes_aperiodic() {
        let mut w = m(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(!is_aperiodic(&w)); // bipartite, period 2
        w[(0, 0)] = 0.5;
        assert!(is_aperiodic(&w));
    }

    #[test]
    fn nested_sccs() {
        // 0 <-> 1, 2 <-> 3, edge 1 -> 2
        let w = m(vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        let comps = strongly_connected_components(&w);
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
    }
}
