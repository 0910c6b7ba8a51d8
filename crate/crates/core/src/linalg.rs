//! Sparse matrix storage and the direct solvers behind the Newton
//! iteration: a banded LU with partial pivoting for 1D systems and a
//! sparse LU (via `faer`) for 2D systems.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use std::sync::Once;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("singular matrix (pivot {0})")]
    SingularMatrix(usize),
}

/// Compressed sparse row matrix with summed duplicate entries.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            per_row[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for &(j, v) in row.iter() {
                if last == Some(j) {
                    *data.last_mut().unwrap() += v;
                } else {
                    indices.push(j);
                    data.push(v);
                    last = Some(j);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            n,
            indptr,
            indices,
            data,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        self.indices[lo..hi]
            .iter()
            .copied()
            .zip(self.data[lo..hi].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    /// Maximum relative asymmetry `|A_ij - A_ji| / max|A|`.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    pub fn bandwidth(&self) -> usize {
        let mut b = 0usize;
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                b = b.max(i.abs_diff(j));
            }
        }
        b
    }
}

/// Banded LU with partial pivoting (LAPACK-style band storage of width
/// `2*kl + ku + 1` so row swaps stay inside the band).
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// ab[r][j] stores A(i, j) at r = i - j + kl + ku.
    ab: Vec<Vec<f64>>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self, LinalgError> {
        let n = a.n;
        let band = a.bandwidth();
        let (kl, ku) = (band, band);
        let rows = 2 * kl + ku + 1;
        let mut ab = vec![vec![0.0; n]; rows];
        for i in 0..n {
            for (j, v) in a.row(i) {
                ab[i + kl + ku - j][j] = v;
            }
        }
        let mut pivots = vec![0usize; n];
        for col in 0..n {
            // Partial pivot within the column band.
            let reach = kl.min(n - 1 - col);
            let mut piv = 0usize;
            let mut best = ab[kl + ku][col].abs();
            for r in 1..=reach {
                let v = ab[kl + ku + r][col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Err(LinalgError::SingularMatrix(col));
            }
            pivots[col] = piv;
            if piv != 0 {
                // Swap rows col and col+piv across the band columns.
                let width = (ku + kl).min(n - 1 - col);
                for c in 0..=width {
                    let j = col + c;
                    let r1 = col + kl + ku - j;
                    let r2 = col + piv + kl + ku - j;
                    let tmp = ab[r1][j];
                    ab[r1][j] = ab[r2][j];
                    ab[r2][j] = tmp;
                }
            }
            let diag = ab[kl + ku][col];
            for r in 1..=reach {
                let factor = ab[kl + ku + r][col] / diag;
                ab[kl + ku + r][col] = factor;
                let width = (ku + kl).min(n - 1 - col);
                for c in 1..=width {
                    let j = col + c;
                    let target = col + r + kl + ku - j;
                    let source = col + kl + ku - j;
                    let sub = factor * ab[source][j];
                    ab[target][j] -= sub;
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ab,
            pivots,
        })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut x = rhs.to_vec();
        for col in 0..n {
            let piv = self.pivots[col];
            if piv != 0 {
                x.swap(col, col + piv);
            }
            let reach = kl.min(n - 1 - col);
            for r in 1..=reach {
                x[col + r] -= self.ab[kl + ku + r][col] * x[col];
            }
        }
        for col in (0..n).rev() {
            x[col] /= self.ab[kl + ku][col];
            let lo = col.saturating_sub(ku + kl);
            for i in lo..col {
                x[i] -= self.ab[i + kl + ku - col][col] * x[col];
            }
        }
        x
    }
}

static FAER_SEQ: Once = Once::new();

/// Direct sparse solve of `A x = rhs`. Dispatches on the bandwidth: narrow
/// systems (1D discretisations) go through the banded LU, everything else
/// through the sparse LU.
pub fn linear_solve(a: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if a.n == 0 {
        return Ok(Vec::new());
    }
    if a.bandwidth() <= 16 {
        let lu = BandedLu::factor(a)?;
        return Ok(lu.solve(rhs));
    }
    // Sequential sparse factorization keeps runs bit-reproducible.
    FAER_SEQ.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
    let mut trips = Vec::with_capacity(a.data.len());
    for i in 0..a.n {
        for (j, v) in a.row(i) {
            trips.push(Triplet::new(i, j, v));
        }
    }
    let mat = SparseColMat::try_new_from_triplets(a.n, a.n, &trips)
        .map_err(|_| LinalgError::SingularMatrix(0))?;
    let lu = mat
        .as_ref()
        .sp_lu()
        .map_err(|_| LinalgError::SingularMatrix(0))?;
    let b = Mat::from_fn(a.n, 1, |i, _| rhs[i]);
    let x = lu.solve(b.as_ref());
    Ok((0..a.n).map(|i| x[(i, 0)]).collect())
}
