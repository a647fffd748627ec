//! Girth and short-cycle counts on bipartite check/variable graphs.
//!
//! Cycles are edge sets: two parity checks joining the same pair of variables
//! close distinct cycles. Node numbering inside this module puts variable `j`
//! at `j` and check row `r` at `n_cols + r`.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::access::SlotAssignment;
use crate::graph::{build_graph, CheckMatrix, GraphError, ThreeLayerGraph};
use crate::ldpc::LdpcCode;

/// Node limit of the exhaustive enumerator.
pub const BRUTEFORCE_MAX_NODES: usize = 200;

/// Cycle lengths handled by [`count_cycles`].
pub const FAST_LENGTHS: [usize; 3] = [4, 6, 8];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("cycle length {0} not supported")]
    UnsupportedLength(usize),
    #[error("graph has {nodes} nodes, exhaustive enumeration is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn adjacency<M: CheckMatrix + ?Sized>(m: &M) -> Vec<Vec<usize>> {
    let n = m.n_cols();
    let rows = m.check_rows();
    let mut adj = vec![Vec::new(); n + rows.len()];
    for (r, row) in rows.iter().enumerate() {
        for &j in row {
            adj[j].push(n + r);
            adj[n + r].push(j);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Every simple cycle of length `len`, each listed once as a node sequence
/// starting at its smallest node, in the direction of its smaller neighbour.
pub fn enumerate_cycles_bruteforce<M: CheckMatrix + ?Sized>(
    m: &M,
    len: usize,
) -> Result<Vec<Vec<usize>>, CycleError> {
    if len < 4 || !len.is_multiple_of(2) {
        return Err(CycleError::UnsupportedLength(len));
    }
    let adj = adjacency(m);
    if adj.len() > BRUTEFORCE_MAX_NODES {
        return Err(CycleError::TooLarge {
            nodes: adj.len(),
            limit: BRUTEFORCE_MAX_NODES,
        });
    }

    fn dfs(
        adj: &[Vec<usize>],
        start: usize,
        len: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().expect("path starts at the root");
        for &next in &adj[last] {
            if next == start && path.len() == len {
                // keep one of the two traversal directions
                if path[1] < path[len - 1] {
                    out.push(path.clone());
                }
            } else if next > start && !on_path[next] && path.len() < len {
                on_path[next] = true;
                path.push(next);
                dfs(adj, start, len, path, on_path, out);
                path.pop();
                on_path[next] = false;
            }
        }
    }

    let mut out = Vec::new();
    let mut on_path = vec![false; adj.len()];
    for start in 0..adj.len() {
        let mut path = vec![start];
        on_path[start] = true;
        dfs(&adj, start, len, &mut path, &mut on_path, &mut out);
        on_path[start] = false;
    }
    Ok(out)
}

/// Exhaustive cycle count; the oracle for [`count_cycles`].
pub fn count_cycles_bruteforce<M: CheckMatrix + ?Sized>(
    m: &M,
    len: usize,
) -> Result<u64, CycleError> {
    Ok(enumerate_cycles_bruteforce(m, len)?.len() as u64)
}

/// Variable co-occurrence graph: for each variable, the other variables it
/// shares a check with, together with the sorted list of shared checks.
struct CoOccurrence {
    nbrs: Vec<Vec<(usize, Vec<usize>)>>,
    cols: Vec<Vec<usize>>,
}

impl CoOccurrence {
    fn new<M: CheckMatrix + ?Sized>(m: &M) -> Self {
        let n = m.n_cols();
        let rows = m.check_rows();
        let mut cols = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for &j in row {
                cols[j].push(r);
            }
        }
        let nbrs = (0..n)
            .map(|v| {
                let mut pairs: Vec<(usize, usize)> = cols[v]
                    .iter()
                    .flat_map(|&r| rows[r].iter().filter(|&&w| w != v).map(move |&w| (w, r)))
                    .collect();
                pairs.sort_unstable();
                let mut grouped: Vec<(usize, Vec<usize>)> = Vec::new();
                for (w, r) in pairs {
                    match grouped.last_mut() {
                        Some((last, checks)) if *last == w => checks.push(r),
                        _ => grouped.push((w, vec![r])),
                    }
                }
                grouped
            })
            .collect();
        CoOccurrence { nbrs, cols }
    }

    fn common(&self, a: usize, b: usize) -> Option<&[usize]> {
        let list = &self.nbrs[a];
        list.binary_search_by_key(&b, |(w, _)| *w)
            .ok()
            .map(|i| list[i].1.as_slice())
    }

    fn count4(&self) -> u64 {
        self.nbrs
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |(b, _)| *b > a))
            .map(|(_, checks)| {
                let c = checks.len() as u64;
                c * c.saturating_sub(1) / 2
            })
            .sum()
    }

    fn count6(&self) -> u64 {
        let mut total: i64 = 0;
        for (a, list) in self.nbrs.iter().enumerate() {
            for (bi, (b, ab)) in list.iter().enumerate() {
                if *b <= a {
                    continue;
                }
                for (c, ac) in &list[bi + 1..] {
                    let Some(bc) = self.common(*b, *c) else {
                        continue;
                    };
                    let triple = intersect_len(ab, &self.cols[*c]) as i64;
                    let (x, y, z) = (ab.len() as i64, bc.len() as i64, ac.len() as i64);
                    total += x * y * z - triple * (x + y + z) + 2 * triple;
                }
            }
        }
        total as u64
    }

    fn count8(&self) -> u64 {
        let partitions = set_partitions(4);
        let n = self.nbrs.len();
        let mut mids: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut touched: Vec<usize> = Vec::new();
        let mut total: i64 = 0;
        for v1 in 0..n {
            for (x, _) in &self.nbrs[v1] {
                if *x <= v1 {
                    continue;
                }
                for (v3, _) in &self.nbrs[*x] {
                    if *v3 <= v1 {
                        continue;
                    }
                    if mids[*v3].is_empty() {
                        touched.push(*v3);
                    }
                    mids[*v3].push(*x);
                }
            }
            for &v3 in &touched {
                let m = &mids[v3];
                for (i, &x) in m.iter().enumerate() {
                    for &y in &m[i + 1..] {
                        let sets = [
                            self.common(v1, x).expect("wedge edge"),
                            self.common(x, v3).expect("wedge edge"),
                            self.common(v3, y).expect("wedge edge"),
                            self.common(y, v1).expect("wedge edge"),
                        ];
                        total += injective_choices(&sets, &partitions);
                    }
                }
            }
            for v3 in touched.drain(..) {
                mids[v3].clear();
            }
        }
        total as u64
    }
}

fn intersect_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .filter(|x| b.binary_search(x).is_ok())
        .copied()
        .collect()
}

/// All set partitions of `0..n`, each block given as a bit mask.
fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn grow(i: usize, n: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            grow(i + 1, n, blocks, out);
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        grow(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    grow(0, n, &mut Vec::new(), &mut out);
    out
}

/// Number of tuples `(c_0, .., c_{k-1})` with `c_i` in `sets[i]` and all
/// entries distinct, by Möbius inversion over set partitions.
fn injective_choices(sets: &[&[usize]], partitions: &[Vec<u32>]) -> i64 {
    let k = sets.len();
    let mut sizes = vec![0i64; 1 << k];
    for mask in 1..(1u32 << k) {
        let mut members = (0..k).filter(|i| mask & (1 << i) != 0);
        let first = members.next().expect("nonempty mask");
        let mut acc = sets[first].to_vec();
        for i in members {
            acc = intersect(&acc, sets[i]);
        }
        sizes[mask as usize] = acc.len() as i64;
    }
    partitions
        .iter()
        .map(|blocks| {
            blocks
                .iter()
                .map(|&b| {
                    let size = b.count_ones() as i64;
                    let factorial: i64 = (1..size).product();
                    let sign = if size % 2 == 1 { 1 } else { -1 };
                    sign * factorial * sizes[b as usize]
                })
                .product::<i64>()
        })
        .sum()
}

/// Exact number of cycles of length 4, 6 or 8.
pub fn count_cycles<M: CheckMatrix + ?Sized>(m: &M, len: usize) -> Result<u64, CycleError> {
    if !FAST_LENGTHS.contains(&len) {
        return Err(CycleError::UnsupportedLength(len));
    }
    let co = CoOccurrence::new(m);
    Ok(match len {
        4 => co.count4(),
        6 => co.count6(),
        _ => co.count8(),
    })
}

/// Length of the shortest cycle, `None` for a forest.
pub fn girth<M: CheckMatrix + ?Sized>(m: &M) -> Option<usize> {
    let adj = adjacency(m);
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; adj.len()];
    let mut parent = vec![usize::MAX; adj.len()];
    let mut seen = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..adj.len() {
        dist[root] = 0;
        seen.push(root);
        queue.push_back(root);
        'bfs: while let Some(u) = queue.pop_front() {
            if 2 * dist[u] >= best {
                break;
            }
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    seen.push(w);
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                    if 2 * dist[u] >= best {
                        break 'bfs;
                    }
                }
            }
        }
        for v in seen.drain(..) {
            dist[v] = usize::MAX;
            parent[v] = usize::MAX;
        }
        queue.clear();
    }
    (best != usize::MAX).then_some(best)
}

/// Girth plus the 4-, 6- and 8-cycle counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleProfile {
    pub girth: Option<usize>,
    pub counts: BTreeMap<usize, u64>,
}

impl CycleProfile {
    pub fn of<M: CheckMatrix + ?Sized>(m: &M) -> Self {
        let co = CoOccurrence::new(m);
        let counts = BTreeMap::from([(4, co.count4()), (6, co.count6()), (8, co.count8())]);
        CycleProfile {
            girth: girth(m),
            counts,
        }
    }

    pub fn count(&self, len: usize) -> u64 {
        self.counts.get(&len).copied().unwrap_or(0)
    }
}

/// 8-cycles `va1 - s1 - vb1 - lb - vb2 - s2 - va2 - la - va1` through two
/// slots shared by users `a != b`. These are all the global 8-cycles, and no
/// global cycle is shorter.
pub fn count_global8(graph: &ThreeLayerGraph) -> u64 {
    let common = |a: usize, b: usize| intersect_len(graph.var_ldpc(a), graph.var_ldpc(b)) as u64;
    let occupant = |slot: usize, user: usize| {
        graph.sa_checks()[slot]
            .iter()
            .copied()
            .find(|&v| graph.owner(v).0 == user)
    };
    let mut total = 0u64;
    // each check la joining (va1, va2) is one choice of la
    for (c, row) in graph.ldpc_checks().iter().enumerate() {
        let a = graph.ldpc_owner(c);
        for (i, &va1) in row.iter().enumerate() {
            for &va2 in &row[i + 1..] {
                let (s1, s2) = (graph.slot_of_var(va1), graph.slot_of_var(va2));
                for &vb1 in &graph.sa_checks()[s1] {
                    let b = graph.owner(vb1).0;
                    if b <= a {
                        continue;
                    }
                    if let Some(vb2) = occupant(s2, b) {
                        total += common(vb1, vb2);
                    }
                }
            }
        }
    }
    total
}

/// Local, joint and global cycle statistics of one multi-user frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScramCycleReport {
    pub local: Vec<CycleProfile>,
    pub joint: CycleProfile,
    pub global8: u64,
    /// `C6(joint) == sum of local C6`.
    pub c6_additive: bool,
    /// `C8(joint) == sum of local C8 + global8`.
    pub c8_additive: bool,
}

pub fn scram_cycle_report(
    codes: &[&LdpcCode],
    assignment: &SlotAssignment,
) -> Result<ScramCycleReport, CycleError> {
    let graph = build_graph(codes, assignment, assignment.n_slots())?;
    let mut cache: Vec<(*const LdpcCode, CycleProfile)> = Vec::new();
    let local: Vec<CycleProfile> = codes
        .iter()
        .map(|&code| {
            let key = code as *const LdpcCode;
            if let Some((_, p)) = cache.iter().find(|(k, _)| *k == key) {
                return p.clone();
            }
            let p = CycleProfile::of(code);
            cache.push((key, p.clone()));
            p
        })
        .collect();
    let joint = CycleProfile::of(&graph.to_joint_matrix());
    let global8 = count_global8(&graph);
    let sum = |len| local.iter().map(|p| p.count(len)).sum::<u64>();
    Ok(ScramCycleReport {
        c6_additive: joint.count(6) == sum(6),
        c8_additive: joint.count(8) == sum(8) + global8,
        local,
        joint,
        global8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{assign_cod, assign_interleaved, assign_random, assign_sequential};
    use crate::access::{AccessParams, Scheme};
    use crate::ldpc::random_regular;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Rows(usize, Vec<Vec<usize>>);

    impl CheckMatrix for Rows {
        fn n_cols(&self) -> usize {
            self.0
        }
        fn check_rows(&self) -> &[Vec<usize>] {
            &self.1
        }
    }

    fn random_rows(rng: &mut impl Rng, n: usize, m: usize, density: f64) -> Rows {
        let rows = (0..m)
            .map(|_| (0..n).filter(|_| rng.random_bool(density)).collect())
            .collect();
        Rows(n, rows)
    }

    #[test]
    fn square_and_k23() {
        let square = Rows(2, vec![vec![0, 1], vec![0, 1]]);
        assert_eq!(count_cycles_bruteforce(&square, 4).unwrap(), 1);
        assert_eq!(count_cycles(&square, 4).unwrap(), 1);
        assert_eq!(girth(&square), Some(4));

        // K_{2,3}: two checks on three variables
        let k23 = Rows(3, vec![vec![0, 1, 2], vec![0, 1, 2]]);
        assert_eq!(count_cycles_bruteforce(&k23, 4).unwrap(), 3);
        assert_eq!(count_cycles_bruteforce(&k23, 6).unwrap(), 0);
        assert_eq!(count_cycles(&k23, 4).unwrap(), 3);
        assert_eq!(count_cycles(&k23, 6).unwrap(), 0);
    }

    #[test]
    fn trees_have_no_cycles() {
        let tree = Rows(5, vec![vec![0, 1, 2], vec![2, 3], vec![3, 4]]);
        for len in [4, 6, 8] {
            assert_eq!(count_cycles_bruteforce(&tree, len).unwrap(), 0);
            assert_eq!(count_cycles(&tree, len).unwrap(), 0);
        }
        assert_eq!(girth(&tree), None);
        assert_eq!(girth(&Rows(0, vec![])), None);
    }

    #[test]
    fn complete_bipartite_counts() {
        // K_{3,3}: 9 four-cycles, 6 six-cycles
        let k33 = Rows(3, vec![vec![0, 1, 2]; 3]);
        assert_eq!(count_cycles(&k33, 4).unwrap(), 9);
        assert_eq!(count_cycles(&k33, 6).unwrap(), 6);
        assert_eq!(count_cycles_bruteforce(&k33, 6).unwrap(), 6);
        // K_{4,4}: C(4,2)^2 = 36 four-cycles; 8-cycles = 4!*3!/2 = 72
        let k44 = Rows(4, vec![vec![0, 1, 2, 3]; 4]);
        assert_eq!(count_cycles(&k44, 4).unwrap(), 36);
        assert_eq!(count_cycles_bruteforce(&k44, 8).unwrap(), 72);
        assert_eq!(count_cycles(&k44, 8).unwrap(), 72);
    }

    #[test]
    fn unsupported_lengths_and_size_guard() {
        let square = Rows(2, vec![vec![0, 1], vec![0, 1]]);
        assert!(count_cycles(&square, 10).is_err());
        assert!(count_cycles_bruteforce(&square, 5).is_err());
        let big = Rows(150, vec![(0..150).collect(); 60]);
        assert!(matches!(
            count_cycles_bruteforce(&big, 4),
            Err(CycleError::TooLarge { nodes: 210, .. })
        ));
    }

    #[test]
    fn partitions_of_four() {
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(set_partitions(3).len(), 5);
    }

    #[test]
    fn fast_counts_match_bruteforce_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.random_range(3..=14);
            let m = rng.random_range(2..=9);
            let g = random_rows(&mut rng, n, m, 0.35);
            for len in [4, 6, 8] {
                assert_eq!(
                    count_cycles(&g, len).unwrap(),
                    count_cycles_bruteforce(&g, len).unwrap(),
                    "len {len} rows {:?}",
                    g.1
                );
            }
            let shortest = [4, 6, 8, 10, 12]
                .into_iter()
                .find(|&l| count_cycles_bruteforce(&g, l).unwrap() > 0);
            if let Some(l) = shortest {
                assert_eq!(girth(&g), Some(l));
            } else {
                assert!(girth(&g).is_none_or(|gg| gg > 12));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn fast_equals_bruteforce(seed in any::<u64>(), density in 0.1f64..0.5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_rows(&mut rng, 12, 8, density);
            for len in [4, 6, 8] {
                prop_assert_eq!(count_cycles(&g, len).unwrap(), count_cycles_bruteforce(&g, len).unwrap());
            }
        }
    }

    fn two_user_pair_code() -> LdpcCode {
        LdpcCode::from_rows(2, vec![vec![0, 1]]).unwrap()
    }

    #[test]
    fn global8_single_shared_pair() {
        let code = two_user_pair_code();
        let shared = SlotAssignment::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let g = build_graph(&[&code, &code], &shared, 2).unwrap();
        assert_eq!(count_global8(&g), 1);
        let eight = enumerate_cycles_bruteforce(&g.to_joint_matrix(), 8).unwrap();
        assert_eq!(eight.len(), 1);

        let disjoint = SlotAssignment::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = build_graph(&[&code, &code], &disjoint, 4).unwrap();
        assert_eq!(count_global8(&g), 0);
    }

    fn is_global(g: &ThreeLayerGraph, cycle: &[usize]) -> bool {
        let n = g.n_vars();
        let mut users: Vec<usize> = cycle
            .iter()
            .filter(|&&x| x < n)
            .map(|&v| g.owner(v).0)
            .collect();
        users.sort_unstable();
        users.dedup();
        users.len() >= 2
    }

    #[test]
    fn global8_matches_filtered_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..20 {
            let n = 8;
            let codes: Vec<LdpcCode> = (0..2)
                .map(|_| loop {
                    let rows: Vec<Vec<usize>> = (0..4)
                        .map(|_| {
                            let mut r: Vec<usize> =
                                (0..n).filter(|_| rng.random_bool(0.4)).collect();
                            if r.is_empty() {
                                r.push(rng.random_range(0..n));
                            }
                            r
                        })
                        .collect();
                    if let Ok(c) = LdpcCode::from_rows(n, rows) {
                        break c;
                    }
                })
                .collect();
            let p = AccessParams::new(2, n, 12, Scheme::Random, 0);
            let a = assign_random(&p, &mut rng).unwrap();
            let g = build_graph(&[&codes[0], &codes[1]], &a, 12).unwrap();
            let j = g.to_joint_matrix();
            for len in [4, 6] {
                let cycles = enumerate_cycles_bruteforce(&j, len).unwrap();
                assert!(cycles.iter().all(|c| !is_global(&g, c)), "trial {trial}");
            }
            let eight = enumerate_cycles_bruteforce(&j, 8).unwrap();
            let global = eight.iter().filter(|c| is_global(&g, c)).count() as u64;
            assert_eq!(count_global8(&g), global, "trial {trial}");
        }
    }

    #[test]
    fn table_identities_on_desk_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let code = random_regular(48, 3, 6, &mut rng).unwrap();
        let p = AccessParams::new(4, 48, 96, Scheme::Cod, 5);
        for scheme in Scheme::ALL {
            let a = match scheme {
                Scheme::Random => assign_random(&p, &mut rng).unwrap(),
                Scheme::Sequential => assign_sequential(&p).unwrap(),
                Scheme::Interleaved => assign_interleaved(&p).unwrap(),
                Scheme::Cod => assign_cod(&p, None).unwrap(),
            };
            let r = scram_cycle_report(&[&code; 4], &a).unwrap();
            assert!(r.c6_additive && r.c8_additive, "{scheme}: {r:?}");
            assert_eq!(r.joint.count(6), 4 * r.local[0].count(6));
            assert_eq!(r.joint.count(4), 0);
        }
    }
}
