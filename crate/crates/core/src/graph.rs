//! Three-layer Tanner graph: slot checks, variable nodes, parity checks.

use thiserror::Error;

use crate::access::SlotAssignment;
use crate::ldpc::{alist, LdpcCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("{codes} codes supplied for {users} users")]
    UserCount { codes: usize, users: usize },
    #[error("user {user}: code length {code_n} but {assigned} symbols assigned")]
    LengthMismatch {
        user: usize,
        code_n: usize,
        assigned: usize,
    },
    #[error("assignment uses {assigned} slots, expected {n_slots}")]
    SlotCount { assigned: usize, n_slots: usize },
}

/// Bipartite check/variable incidence, the common input of the cycle tools.
pub trait CheckMatrix {
    fn n_cols(&self) -> usize;
    fn check_rows(&self) -> &[Vec<usize>];
}

impl CheckMatrix for LdpcCode {
    fn n_cols(&self) -> usize {
        self.n()
    }

    fn check_rows(&self) -> &[Vec<usize>] {
        self.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeLayerGraph {
    /// First variable index of each user's block.
    offsets: Vec<usize>,
    /// (user, symbol) of each variable node.
    owner: Vec<(usize, usize)>,
    var_slot: Vec<usize>,
    /// Variables on each slot, ascending.
    sa_checks: Vec<Vec<usize>>,
    /// Parity checks in user order, each with absolute variable indices.
    ldpc_checks: Vec<Vec<usize>>,
    ldpc_owner: Vec<usize>,
    /// Parity checks of each variable, ascending.
    var_ldpc: Vec<Vec<usize>>,
}

/// Variable `i` of user `u` gets index `offset(u) + i`, which is `i + u * n`
/// for equal-length users.
pub fn build_graph(
    codes: &[&LdpcCode],
    assignment: &SlotAssignment,
    n_slots: usize,
) -> Result<ThreeLayerGraph, GraphError> {
    if codes.len() != assignment.n_users() {
        return Err(GraphError::UserCount {
            codes: codes.len(),
            users: assignment.n_users(),
        });
    }
    if assignment.n_slots() != n_slots {
        return Err(GraphError::SlotCount {
            assigned: assignment.n_slots(),
            n_slots,
        });
    }

    let mut offsets = Vec::with_capacity(codes.len());
    let mut owner = Vec::new();
    let mut var_slot = Vec::new();
    let mut ldpc_checks = Vec::new();
    let mut ldpc_owner = Vec::new();
    for (u, code) in codes.iter().enumerate() {
        let slots = assignment.slots(u);
        if slots.len() != code.n() {
            return Err(GraphError::LengthMismatch {
                user: u,
                code_n: code.n(),
                assigned: slots.len(),
            });
        }
        let base = owner.len();
        offsets.push(base);
        owner.extend((0..code.n()).map(|i| (u, i)));
        var_slot.extend_from_slice(slots);
        for row in code.rows() {
            ldpc_checks.push(row.iter().map(|&j| base + j).collect::<Vec<_>>());
            ldpc_owner.push(u);
        }
    }

    let n_vars = owner.len();
    let mut sa_checks = vec![Vec::new(); n_slots];
    for (v, &s) in var_slot.iter().enumerate() {
        sa_checks[s].push(v);
    }
    let mut var_ldpc = vec![Vec::new(); n_vars];
    for (c, row) in ldpc_checks.iter().enumerate() {
        for &v in row {
            var_ldpc[v].push(c);
        }
    }

    Ok(ThreeLayerGraph {
        offsets,
        owner,
        var_slot,
        sa_checks,
        ldpc_checks,
        ldpc_owner,
        var_ldpc,
    })
}

impl ThreeLayerGraph {
    pub fn n_users(&self) -> usize {
        self.offsets.len()
    }

    pub fn n_vars(&self) -> usize {
        self.owner.len()
    }

    pub fn n_slots(&self) -> usize {
        self.sa_checks.len()
    }

    pub fn n_ldpc(&self) -> usize {
        self.ldpc_checks.len()
    }

    pub fn var_index(&self, user: usize, symbol: usize) -> usize {
        self.offsets[user] + symbol
    }

    pub fn user_offset(&self, user: usize) -> usize {
        self.offsets[user]
    }

    pub fn owner(&self, v: usize) -> (usize, usize) {
        self.owner[v]
    }

    pub fn slot_of_var(&self, v: usize) -> usize {
        self.var_slot[v]
    }

    pub fn sa_checks(&self) -> &[Vec<usize>] {
        &self.sa_checks
    }

    pub fn ldpc_checks(&self) -> &[Vec<usize>] {
        &self.ldpc_checks
    }

    pub fn ldpc_owner(&self, c: usize) -> usize {
        self.ldpc_owner[c]
    }

    pub fn var_ldpc(&self, v: usize) -> &[usize] {
        &self.var_ldpc[v]
    }

    pub fn sa_degrees(&self) -> Vec<usize> {
        self.sa_checks.iter().map(Vec::len).collect()
    }

    pub fn to_joint_matrix(&self) -> JointMatrix {
        let mut rows = self.sa_checks.clone();
        rows.extend(self.ldpc_checks.iter().cloned());
        JointMatrix {
            n_sa: self.n_slots(),
            n_cols: self.n_vars(),
            rows,
        }
    }
}

/// Joint parity-check matrix: slot rows first, then parity rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointMatrix {
    n_sa: usize,
    n_cols: usize,
    rows: Vec<Vec<usize>>,
}

impl JointMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_sa(&self) -> usize {
        self.n_sa
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn sa_rows(&self) -> &[Vec<usize>] {
        &self.rows[..self.n_sa]
    }

    pub fn ldpc_rows(&self) -> &[Vec<usize>] {
        &self.rows[self.n_sa..]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    /// Column adjacency, each list ascending.
    pub fn cols(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                cols[c].push(r);
            }
        }
        cols
    }

    pub fn to_alist(&self) -> String {
        alist::write(self.n_cols, &self.rows)
    }
}

impl CheckMatrix for JointMatrix {
    fn n_cols(&self) -> usize {
        self.n_cols
    }

    fn check_rows(&self) -> &[Vec<usize>] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{assign_cod, assign_sequential, AccessParams, Scheme};
    use crate::ldpc::random_regular;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// 5x6 check matrix with column weights 2 or 1, rank 5.
    fn small_code() -> LdpcCode {
        LdpcCode::from_rows(
            6,
            vec![
                vec![0, 1],
                vec![1, 2, 3],
                vec![3, 4],
                vec![4, 5],
                vec![0, 5],
            ],
        )
        .unwrap()
    }

    fn fig1_graph(scheme: Scheme) -> ThreeLayerGraph {
        let code = small_code();
        let p = AccessParams::new(4, 6, 12, scheme, 0);
        let a = match scheme {
            Scheme::Cod => assign_cod(&p, None).unwrap(),
            _ => assign_sequential(&p).unwrap(),
        };
        build_graph(&[&code; 4], &a, 12).unwrap()
    }

    #[test]
    fn fig1_dimensions() {
        for scheme in [Scheme::Sequential, Scheme::Cod] {
            let g = fig1_graph(scheme);
            assert_eq!(g.n_vars(), 24);
            assert_eq!(g.n_ldpc(), 20);
            assert_eq!(g.n_slots(), 12);
            assert_eq!(g.sa_degrees().iter().sum::<usize>(), 24);
            assert!(g.sa_degrees().iter().all(|&d| d == 2));
            let j = g.to_joint_matrix();
            assert_eq!((j.n_rows(), j.n_cols()), (32, 24));
            for (v, col) in j.cols().iter().enumerate() {
                assert_eq!(col.len(), 1 + g.var_ldpc(v).len());
                assert_eq!(col.iter().filter(|&&r| r < 12).count(), 1);
            }
        }
    }

    #[test]
    fn user_blocks_reproduce_each_code() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = random_regular(48, 3, 6, &mut rng).unwrap();
        let p = AccessParams::new(4, 48, 96, Scheme::Cod, 1);
        let a = assign_cod(&p, None).unwrap();
        let g = build_graph(&[&code; 4], &a, 96).unwrap();
        for c in 0..g.n_ldpc() {
            let u = g.ldpc_owner(c);
            let local: Vec<usize> = g.ldpc_checks()[c]
                .iter()
                .map(|&v| v - g.user_offset(u))
                .collect();
            assert_eq!(local, code.rows()[c - u * code.m()]);
        }
        for v in 0..g.n_vars() {
            let (u, i) = g.owner(v);
            assert_eq!(g.var_index(u, i), v);
            assert_eq!(v, i + u * 48);
            assert_eq!(g.slot_of_var(v), a.slots(u)[i]);
        }
    }

    #[test]
    fn single_user_identity_assignment() {
        let code = small_code();
        let a = SlotAssignment::new(8, vec![(0..6).collect()]).unwrap();
        let g = build_graph(&[&code], &a, 8).unwrap();
        assert!(g.sa_degrees().iter().all(|&d| d <= 1));
    }

    #[test]
    fn joint_matrix_round_trip() {
        let g = fig1_graph(Scheme::Cod);
        let j = g.to_joint_matrix();
        assert_eq!(j.sa_rows(), g.sa_checks());
        assert_eq!(j.ldpc_rows(), g.ldpc_checks());
        for (r, row) in j.rows().iter().enumerate() {
            for c in 0..24 {
                assert_eq!(j.get(r, c), row.contains(&c));
            }
        }
        let parsed = alist::parse(&j.to_alist()).unwrap();
        assert_eq!(parsed.rows, j.rows);
    }

    #[test]
    fn empty_graph() {
        let a = SlotAssignment::new(0, vec![]).unwrap();
        let j = build_graph(&[], &a, 0).unwrap().to_joint_matrix();
        assert_eq!((j.n_rows(), j.n_cols()), (0, 0));
    }

    #[test]
    fn dimension_errors() {
        let code = small_code();
        let a = SlotAssignment::new(8, vec![(0..5).collect()]).unwrap();
        assert!(matches!(
            build_graph(&[&code], &a, 8),
            Err(GraphError::LengthMismatch { .. })
        ));
        assert!(matches!(
            build_graph(&[&code, &code], &a, 8),
            Err(GraphError::UserCount { .. })
        ));
        let a = SlotAssignment::new(8, vec![(0..6).collect()]).unwrap();
        assert!(matches!(
            build_graph(&[&code], &a, 9),
            Err(GraphError::SlotCount { .. })
        ));
    }
}
