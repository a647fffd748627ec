use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{LdpcCode, LdpcError};

const MAX_RESTARTS: usize = 2000;

/// Random `(col_weight, row_weight)`-regular code of length `n` without
/// 4-cycles, built column by column. Each column takes rows with the most
/// remaining capacity, skipping any row that already shares a column with a
/// row picked for the current column. Dead ends restart the whole draw.
///
/// Intended for generating desk-scale test codes, not for code design.
pub fn random_regular<R: Rng + ?Sized>(
    n: usize,
    col_weight: usize,
    row_weight: usize,
    rng: &mut R,
) -> Result<LdpcCode, LdpcError> {
    let fail = |reason: &str| LdpcError::Construction {
        n,
        col_weight,
        row_weight,
        reason: reason.to_string(),
    };
    if col_weight == 0 || row_weight == 0 || !(n * col_weight).is_multiple_of(row_weight) {
        return Err(fail(
            "n * col_weight must be a positive multiple of row_weight",
        ));
    }
    let m = n * col_weight / row_weight;
    if col_weight > m {
        return Err(fail("column weight exceeds the number of rows"));
    }

    'restart: for _ in 0..MAX_RESTARTS {
        let mut capacity = vec![row_weight; m];
        let mut rows: Vec<Vec<usize>> = vec![Vec::with_capacity(row_weight); m];
        let mut row_pairs: HashSet<(usize, usize)> = HashSet::new();

        for col in 0..n {
            let mut chosen: Vec<usize> = Vec::with_capacity(col_weight);
            for _ in 0..col_weight {
                let allowed: Vec<usize> = (0..m)
                    .filter(|&r| capacity[r] > 0 && !chosen.contains(&r))
                    .filter(|&r| {
                        chosen
                            .iter()
                            .all(|&c| !row_pairs.contains(&(c.min(r), c.max(r))))
                    })
                    .collect();
                let Some(best) = allowed.iter().map(|&r| capacity[r]).max() else {
                    continue 'restart;
                };
                let top: Vec<usize> = allowed
                    .into_iter()
                    .filter(|&r| capacity[r] == best)
                    .collect();
                chosen.push(*top.choose(rng).expect("nonempty"));
            }
            for (a, &r1) in chosen.iter().enumerate() {
                for &r2 in &chosen[a + 1..] {
                    row_pairs.insert((r1.min(r2), r1.max(r2)));
                }
            }
            for &r in &chosen {
                capacity[r] -= 1;
                rows[r].push(col);
            }
        }
        return LdpcCode::from_rows(n, rows);
    }
    Err(fail("too many restarts"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regular_and_free_of_four_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let code = random_regular(96, 3, 6, &mut rng).unwrap();
        assert_eq!(code.m(), 48);
        assert!(code.cols().iter().all(|c| c.len() == 3));
        assert!(code.rows().iter().all(|r| r.len() == 6));
        for (a, ca) in code.cols().iter().enumerate() {
            for cb in &code.cols()[a + 1..] {
                let shared = ca.iter().filter(|r| cb.contains(r)).count();
                assert!(shared <= 1);
            }
        }
        assert!(code.k() >= 48);
    }

    #[test]
    fn rejects_incompatible_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_regular(10, 3, 4, &mut rng).is_err());
    }
}
