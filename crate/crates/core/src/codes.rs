//! Small code constructors used by tests, examples and the simulation CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf2::BinaryMatrix;

/// The (7,4) Hamming code; column `j` (1-based) is the binary expansion of `j`.
pub fn hamming_7_4() -> BinaryMatrix {
    BinaryMatrix::from_dense(&[[1, 0, 1, 0, 1, 0, 1], [0, 1, 1, 0, 0, 1, 1], [0, 0, 0, 1, 1, 1, 1]])
        .expect("static matrix")
}

/// Random `rows x cols` matrix in which every column has `col_weight` ones
/// on distinct rows. Used for small test codes; no structure is imposed.
pub fn random_column_weight(rows: usize, cols: usize, col_weight: usize, seed: u64) -> BinaryMatrix {
    assert!(col_weight <= rows);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all_rows: Vec<usize> = (0..rows).collect();
    let entries = (0..cols).flat_map(|c| {
        all_rows
            .choose_multiple(&mut rng, col_weight)
            .map(move |&r| (r, c))
            .collect::<Vec<_>>()
    });
    BinaryMatrix::from_entries(rows, cols, entries.collect::<Vec<_>>()).expect("entries in range")
}

/// Dense uniformly random `rows x cols` matrix.
pub fn random_dense(rows: usize, cols: usize, seed: u64) -> BinaryMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dense: Vec<Vec<u8>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..2)).collect())
        .collect();
    BinaryMatrix::from_dense(&dense).expect("rectangular")
}

/// Regular `(col_weight, row_weight)` parity-check matrix with no 4-cycles.
///
/// Sockets are matched by a random permutation; the matching is then
/// repaired by swapping row sockets until no column hits a row twice and no
/// two columns share more than one row. Returns `None` if repair does not
/// finish within `max_sweeps` passes.
pub fn regular_without_4_cycles(
    cols: usize,
    col_weight: usize,
    row_weight: usize,
    seed: u64,
    max_sweeps: usize,
) -> Option<BinaryMatrix> {
    assert_eq!((cols * col_weight) % row_weight, 0, "degrees must balance");
    let rows = cols * col_weight / row_weight;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // socket s belongs to column s / col_weight; sockets[s] is its row
    let mut sockets: Vec<usize> = (0..rows).flat_map(|r| std::iter::repeat_n(r, row_weight)).collect();
    sockets.shuffle(&mut rng);

    let col_rows =
        |sockets: &[usize], c: usize| -> Vec<usize> { sockets[c * col_weight..(c + 1) * col_weight].to_vec() };

    for _ in 0..max_sweeps {
        // row -> columns incidence from the current socket assignment
        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); rows];
        for (s, &r) in sockets.iter().enumerate() {
            row_cols[r].push(s / col_weight);
        }
        let mut bad = Vec::new();
        for c in 0..cols {
            let rs = col_rows(&sockets, c);
            let mut seen = std::collections::HashSet::new();
            let mut conflict = false;
            for (k, &r) in rs.iter().enumerate() {
                if !seen.insert(r) {
                    conflict = true;
                }
                // another column sharing two rows with c
                for &r2 in &rs[k + 1..] {
                    if r2 != r && row_cols[r].iter().any(|&c2| c2 != c && row_cols[r2].contains(&c2)) {
                        conflict = true;
                    }
                }
            }
            if conflict {
                bad.push(c);
            }
        }
        if bad.is_empty() {
            let entries: Vec<(usize, usize)> = sockets.iter().enumerate().map(|(s, &r)| (r, s / col_weight)).collect();
            return BinaryMatrix::from_entries(rows, cols, entries).ok();
        }
        // swap one socket of every offending column with a random socket
        for c in bad {
            let s = c * col_weight + rng.gen_range(0..col_weight);
            let other = rng.gen_range(0..sockets.len());
            sockets.swap(s, other);
        }
    }
    None
}

/// Whether two columns of `h` share more than one row.
pub fn has_4_cycle(h: &BinaryMatrix) -> bool {
    for r in 0..h.rows() {
        let cols = h.row(r);
        for (i, &a) in cols.iter().enumerate() {
            for &b in &cols[i + 1..] {
                let shared = h.col(a).iter().filter(|x| h.col(b).binary_search(x).is_ok()).count();
                if shared > 1 {
                    return true;
                }
            }
        }
    }
    false
}
