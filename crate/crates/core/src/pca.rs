//! Principal components of the three raw performance measures (speed time,
//! boulder tops, lead holds), computed from their correlation matrix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::RoundResult;

pub const VARIABLES: [&str; 3] = ["speed_time", "boulder_tops", "lead_hold"];

pub type Matrix3 = [[f64; 3]; 3];

/// One row per climber: speed time (s), boulder tops, lead holds reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceMatrix {
    rows: Vec<[f64; 3]>,
}

impl PerformanceMatrix {
    pub fn new(rows: Vec<[f64; 3]>) -> Result<Self> {
        if rows.len() < 3 {
            return Err(Error::Domain(format!("PCA needs at least 3 rows, got {}", rows.len())));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("performance matrix has non-finite values".into()));
        }
        Ok(PerformanceMatrix { rows })
    }

    /// Rows for climbers with a timed speed run, a boulder result and a lead
    /// result. Returns the kept entry indices alongside the matrix.
    pub fn from_round(round: &RoundResult) -> Result<(Self, Vec<usize>)> {
        let mut rows = Vec::new();
        let mut kept = Vec::new();
        for (i, e) in round.entries().iter().enumerate() {
            if let (Some(s), Some(b), Some(l)) = (e.raw.speed, e.raw.boulder, e.raw.lead) {
                if !s.dnf {
                    rows.push([s.time, f64::from(b.tops), f64::from(l.highest_hold)]);
                    kept.push(i);
                }
            }
        }
        Ok((PerformanceMatrix::new(rows)?, kept))
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaResult {
    /// `loadings[j][k]`: weight of variable j on component k. Columns are
    /// orthonormal.
    pub loadings: Matrix3,
    pub eigenvalues: [f64; 3],
    pub explained: [f64; 3],
    /// Per-climber component scores, `Z * loadings` for standardized `Z`.
    /// Their sample variances equal the eigenvalues.
    pub scores: Vec<[f64; 3]>,
    pub means: [f64; 3],
    /// Sample standard deviations (n - 1 denominator).
    pub std_devs: [f64; 3],
}

impl PcaResult {
    pub fn loading(&self, variable: usize, component: usize) -> f64 {
        self.loadings[variable][component]
    }
}

/// Symmetric 3x3 eigendecomposition by cyclic Jacobi rotations. Returns
/// eigenvalues and eigenvectors as columns, unsorted.
pub fn symmetric_eigen(a: &Matrix3) -> ([f64; 3], Matrix3) {
    let mut m = *a;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..64 {
        let off = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
        if off < 1e-30 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if m[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // m <- J^T m J with J the (p, q) rotation.
            for k in 0..3 {
                let mkp = m[k][p];
                let mkq = m[k][q];
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m[p][k];
                let mqk = m[q][k];
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    ([m[0][0], m[1][1], m[2][2]], v)
}

pub fn correlation_matrix(data: &PerformanceMatrix) -> Result<(Matrix3, [f64; 3], [f64; 3])> {
    for j in 0..3 {
        let first = data.rows[0][j];
        if data.rows.iter().all(|r| r[j] == first) {
            return Err(Error::Domain(format!("column {} has zero variance", VARIABLES[j])));
        }
    }
    let n = data.rows.len() as f64;
    let mut means = [0.0; 3];
    for row in &data.rows {
        for j in 0..3 {
            means[j] += row[j] / n;
        }
    }
    let mut cov = [[0.0; 3]; 3];
    for row in &data.rows {
        for a in 0..3 {
            for b in 0..3 {
                cov[a][b] += (row[a] - means[a]) * (row[b] - means[b]) / (n - 1.0);
            }
        }
    }
    let sd = [cov[0][0].sqrt(), cov[1][1].sqrt(), cov[2][2].sqrt()];
    let mut corr = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            corr[a][b] = if a == b { 1.0 } else { cov[a][b] / (sd[a] * sd[b]) };
        }
    }
    Ok((corr, means, sd))
}

/// PCA on standardized columns. Components are sorted by explained
/// variance and each loading column is oriented so that its largest-
/// magnitude entry is positive.
pub fn pca(data: &PerformanceMatrix) -> Result<PcaResult> {
    let (corr, means, std_devs) = correlation_matrix(data)?;
    let (vals, vecs) = symmetric_eigen(&corr);

    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut loadings = [[0.0; 3]; 3];
    let mut eigenvalues = [0.0; 3];
    for (k, &src) in order.iter().enumerate() {
        eigenvalues[k] = vals[src].max(0.0);
        let col = [vecs[0][src], vecs[1][src], vecs[2][src]];
        let pivot = col
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for j in 0..3 {
            loadings[j][k] = sign * col[j];
        }
    }
    let total: f64 = eigenvalues.iter().sum();
    let explained = eigenvalues.map(|e| e / total);

    let scores = data
        .rows
        .iter()
        .map(|row| {
            let z: Vec<f64> = (0..3).map(|j| (row[j] - means[j]) / std_devs[j]).collect();
            let mut s = [0.0; 3];
            for (k, slot) in s.iter_mut().enumerate() {
                *slot = (0..3).map(|j| z[j] * loadings[j][k]).sum();
            }
            s
        })
        .collect();

    Ok(PcaResult {
        loadings,
        eigenvalues,
        explained,
        scores,
        means,
        std_devs,
    })
}
