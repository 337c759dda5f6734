use super::{BinaryMatrix, BitRow, Gf2Error, Permutation};

/// Systematic form of `H` under a caller-chosen column order.
///
/// Columns are visited in `column_order`; a column dependent on the pivots
/// chosen so far is deferred. `fixup` moves the pivot columns leftmost while
/// keeping both the pivots and the deferred columns in visit order, so that
/// after `column_order` then `fixup` the first `rank` positions hold an
/// identity block.
///
/// The row operations are tracked by eliminating an `M x M` identity
/// alongside `H`. Its first `rank` rows map a right-hand side onto the reduced
/// system; the remaining rows span the left null space of `H` and must
/// annihilate any syndrome.
#[derive(Clone, Debug)]
pub struct EliminationResult {
    rows: usize,
    rank: usize,
    column_order: Permutation,
    fixup: Permutation,
    combined: Permutation,
    reduced: Vec<BitRow>,
    transform: Vec<BitRow>,
}

/// Gauss-Jordan elimination of `h` visiting columns in `column_order`.
///
/// Rank deficiency is handled, never rejected.
pub fn eliminate(h: &BinaryMatrix, column_order: &Permutation) -> EliminationResult {
    let m = h.rows();
    let n = h.cols();
    assert_eq!(column_order.len(), n, "column order must cover every column");

    // Dense copy with columns already in visit order.
    let mut a: Vec<BitRow> = vec![BitRow::zeros(n); m];
    for j in 0..n {
        for &r in h.col(column_order.source(j)) {
            a[r].set(j);
        }
    }
    let mut e: Vec<BitRow> = (0..m)
        .map(|r| {
            let mut row = BitRow::zeros(m);
            row.set(r);
            row
        })
        .collect();

    let mut pivots = Vec::with_capacity(m);
    let mut deferred = Vec::with_capacity(n.saturating_sub(m));
    for j in 0..n {
        let p = pivots.len();
        if p == m {
            deferred.push(j);
            continue;
        }
        let Some(found) = (p..m).find(|&r| a[r].get(j)) else {
            deferred.push(j);
            continue;
        };
        a.swap(p, found);
        e.swap(p, found);
        let (pivot_a, pivot_e) = (a[p].clone(), e[p].clone());
        for r in 0..m {
            if r != p && a[r].get(j) {
                a[r].xor_assign(&pivot_a);
                e[r].xor_assign(&pivot_e);
            }
        }
        pivots.push(j);
    }

    let rank = pivots.len();
    let fixup = Permutation::new(pivots.iter().chain(&deferred).copied().collect())
        .expect("pivots and deferred columns partition the column range");
    let combined = column_order.then(&fixup);

    let reduced = a[..rank]
        .iter()
        .map(|row| {
            let mut out = BitRow::zeros(n);
            for t in 0..n {
                if row.get(fixup.source(t)) {
                    out.set(t);
                }
            }
            out
        })
        .collect();

    EliminationResult {
        rows: m,
        rank,
        column_order: column_order.clone(),
        fixup,
        combined,
        reduced,
        transform: e,
    }
}

impl EliminationResult {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of rows `M` of the eliminated matrix.
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.combined.len()
    }

    /// The column order the elimination visited.
    pub fn column_order(&self) -> &Permutation {
        &self.column_order
    }

    /// Column fixup (the deferral permutation) applied after the visit order.
    pub fn fixup(&self) -> &Permutation {
        &self.fixup
    }

    /// Visit order followed by the fixup: position `t` of the reduced matrix
    /// is original column `combined().source(t)`.
    pub fn combined(&self) -> &Permutation {
        &self.combined
    }

    /// Reduced rows (`rank` rows of `N` bits, final column numbering).
    pub fn reduced_rows(&self) -> &[BitRow] {
        &self.reduced
    }

    /// Column `t` (final numbering) of the reduced matrix as a `rank`-bit
    /// vector.
    pub fn reduced_column(&self, t: usize) -> BitRow {
        let mut col = BitRow::zeros(self.rank);
        for (r, row) in self.reduced.iter().enumerate() {
            if row.get(t) {
                col.set(r);
            }
        }
        col
    }

    /// All `M` rows of the accumulated row-operation matrix. The first `rank`
    /// rows produced the reduced matrix; the rest combine `H` rows to zero.
    pub fn transform_rows(&self) -> &[BitRow] {
        &self.transform
    }

    /// Applies the recorded row operations to `rhs` (length `M`) and keeps
    /// the `rank` independent rows.
    pub fn apply_row_transform(&self, rhs: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        if rhs.len() != self.rows {
            return Err(Gf2Error::LengthMismatch {
                expected: self.rows,
                got: rhs.len(),
            });
        }
        let packed = BitRow::from_bits(rhs);
        if let Some(row) = (self.rank..self.rows).find(|&r| self.transform[r].dot(&packed)) {
            return Err(Gf2Error::Inconsistent { row });
        }
        Ok(self.transform[..self.rank]
            .iter()
            .map(|e| e.dot(&packed) as u8)
            .collect())
    }
}
