use nalgebra::{DMatrix, DVector};

use super::StatsError;

/// Row-major regression design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Design {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, StatsError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(StatsError::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self, StatsError> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        for c in columns {
            if c.as_ref().len() != rows {
                return Err(StatsError::DimensionMismatch {
                    expected: rows,
                    got: c.as_ref().len(),
                });
            }
        }
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, &v) in c.as_ref().iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn predict(&self, coefficients: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(coefficients).map(|(x, b)| x * b).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    /// `sqrt(diag(s² (XᵀX)⁻¹))`; NaN when there are no residual degrees of freedom.
    pub standard_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub residual_sum_squares: f64,
    pub degrees_of_freedom: usize,
    pub n_observations: usize,
    pub n_params: usize,
}

impl OlsFit {
    /// Residual variance `SSR / (n - p)`.
    pub fn sigma2(&self) -> f64 {
        if self.degrees_of_freedom == 0 {
            f64::NAN
        } else {
            self.residual_sum_squares / self.degrees_of_freedom as f64
        }
    }
}

/// Singular-design cutoff: a pivot below this fraction of the largest one
/// marks the design as rank deficient.
pub const RANK_RTOL: f64 = 1e-10;

/// Least squares via Householder QR with column pivoting.
///
/// The design is rejected as rank deficient when a pivot of `R` falls below
/// `RANK_RTOL` times the largest pivot.
pub fn ols_fit(design: &Design, response: &[f64]) -> Result<OlsFit, StatsError> {
    let (n, p) = (design.rows, design.cols);
    if response.len() != n {
        return Err(StatsError::DimensionMismatch {
            expected: n,
            got: response.len(),
        });
    }
    if p == 0 || n < p {
        return Err(StatsError::Underdetermined { rows: n, cols: p });
    }
    if design.data.iter().chain(response).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }

    let x = DMatrix::from_row_slice(n, p, &design.data);
    let y = DVector::from_column_slice(response);
    let qr = x.clone().col_piv_qr();
    let r = qr.r();
    let pivots: Vec<f64> = r.diagonal().iter().map(|d| d.abs()).collect();
    let largest = pivots[0];
    let rank = pivots.iter().filter(|&&d| d > RANK_RTOL * largest).count();
    if rank < p || largest == 0.0 {
        return Err(StatsError::RankDeficient { rank, cols: p });
    }

    // X P = Q R, so beta = P R⁻¹ Qᵀ y
    let qty = qr.q().transpose() * &y;
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or(StatsError::RankDeficient { rank, cols: p })?;
    let mut beta = &r_inv * qty;
    qr.p().inv_permute_rows(&mut beta);

    let fitted = &x * &beta;
    let residuals: Vec<f64> = response.iter().zip(fitted.iter()).map(|(y, f)| y - f).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let df = n - p;

    let s2 = if df == 0 { f64::NAN } else { ssr / df as f64 };
    // (XᵀX)⁻¹ = P R⁻¹ R⁻ᵀ Pᵀ; its diagonal is the squared row norms of R⁻¹, permuted
    let mut diag = DVector::from_iterator(p, (0..p).map(|i| r_inv.row(i).norm_squared()));
    qr.p().inv_permute_rows(&mut diag);
    let standard_errors = diag.iter().map(|d| (s2 * d).sqrt()).collect();

    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        standard_errors,
        residuals,
        residual_sum_squares: ssr,
        degrees_of_freedom: df,
        n_observations: n,
        n_params: p,
    })
}
