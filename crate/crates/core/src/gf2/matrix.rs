use super::{BitRow, Gf2Error};

/// Sparse binary parity-check matrix `H` (`rows` x `cols`), stored as both
/// row and column adjacency lists.
///
/// Both views always describe the same set of entries and every list is
/// strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    col_adj: Vec<Vec<usize>>,
    row_adj: Vec<Vec<usize>>,
}

impl BinaryMatrix {
    /// Builds a matrix from `(row, col)` positions holding a 1. Duplicate
    /// positions cancel in pairs (GF(2) addition).
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, Gf2Error> {
        let mut row_adj = vec![Vec::new(); rows];
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(Gf2Error::OutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            row_adj[r].push(c);
        }
        for list in &mut row_adj {
            list.sort_unstable();
            let mut kept: Vec<usize> = Vec::with_capacity(list.len());
            for &c in list.iter() {
                if kept.last() == Some(&c) {
                    kept.pop();
                } else {
                    kept.push(c);
                }
            }
            *list = kept;
        }
        Ok(Self::from_row_adjacency(rows, cols, row_adj))
    }

    /// Builds from dense 0/1 rows. All rows must have the same length.
    pub fn from_dense<R: AsRef<[u8]>>(dense: &[R]) -> Result<Self, Gf2Error> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Gf2Error::LengthMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().enumerate().filter(|(_, &b)| b != 0).map(|(c, _)| (r, c)));
        }
        Self::from_entries(rows, cols, entries)
    }

    // row lists must already be sorted and deduplicated
    pub(crate) fn from_row_adjacency(rows: usize, cols: usize, row_adj: Vec<Vec<usize>>) -> Self {
        let mut col_adj = vec![Vec::new(); cols];
        for (r, list) in row_adj.iter().enumerate() {
            for &c in list {
                col_adj[c].push(r);
            }
        }
        Self {
            rows,
            cols,
            col_adj,
            row_adj,
        }
    }

    /// Number of checks `M`.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Code length `N`.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row indices holding a 1 in column `c`.
    #[inline]
    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_adj[c]
    }

    /// Column indices holding a 1 in row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_adj[r]
    }

    pub fn nnz(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_adj[r].binary_search(&c).is_ok()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        self.col_adj.iter().map(Vec::len).collect()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.row_adj.iter().map(Vec::len).collect()
    }

    /// `H · v` over GF(2).
    pub fn syndrome(&self, v: &[u8]) -> Result<Vec<u8>, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(self
            .row_adj
            .iter()
            .map(|list| list.iter().fold(0u8, |acc, &c| acc ^ (v[c] & 1)))
            .collect())
    }

    /// True when every check is satisfied. Panics on a length mismatch.
    pub fn is_codeword(&self, v: &[u8]) -> bool {
        assert_eq!(v.len(), self.cols, "word length does not match code length");
        self.row_adj
            .iter()
            .all(|list| list.iter().fold(0u8, |acc, &c| acc ^ (v[c] & 1)) == 0)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.row_adj
            .iter()
            .map(|list| {
                let mut row = vec![0u8; self.cols];
                for &c in list {
                    row[c] = 1;
                }
                row
            })
            .collect()
    }

    /// Column `c` packed as an `M`-bit vector.
    pub fn packed_col(&self, c: usize) -> BitRow {
        let mut v = BitRow::zeros(self.rows);
        for &r in &self.col_adj[c] {
            v.set(r);
        }
        v
    }
}
