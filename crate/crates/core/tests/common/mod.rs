//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's GP code.
#![allow(dead_code)]

pub fn rbf(a: (f64, f64), b: (f64, f64), lengthscale_sq: f64) -> f64 {
    let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
    (-d2 / (2.0 * lengthscale_sq)).exp()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        assert!(p != 0.0, "singular matrix in oracle");
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    inv
}

pub fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub struct DirectGp {
    pub inputs: Vec<(f64, f64)>,
    pub lengthscale_sq: f64,
    pub prior_mean: f64,
    pub k_inv: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl DirectGp {
    pub fn new(
        inputs: &[(f64, f64)],
        values: &[f64],
        lengthscale_sq: f64,
        noise_var: f64,
        prior_mean: f64,
    ) -> Self {
        let n = inputs.len();
        let k: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        rbf(inputs[i], inputs[j], lengthscale_sq)
                            + if i == j { noise_var } else { 0.0 }
                    })
                    .collect()
            })
            .collect();
        let k_inv = invert(k);
        let centered: Vec<f64> = values.iter().map(|v| v - prior_mean).collect();
        let weights = matvec(&k_inv, &centered);
        DirectGp {
            inputs: inputs.to_vec(),
            lengthscale_sq,
            prior_mean,
            k_inv,
            weights,
        }
    }

    /// `(mean, variance)` with variance clamped at 0.
    pub fn predict(&self, q: (f64, f64)) -> (f64, f64) {
        let ks: Vec<f64> = self
            .inputs
            .iter()
            .map(|&x| rbf(x, q, self.lengthscale_sq))
            .collect();
        let mean = self.prior_mean
            + ks.iter()
                .zip(&self.weights)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        let kinv_k = matvec(&self.k_inv, &ks);
        let var = 1.0 - ks.iter().zip(&kinv_k).map(|(a, b)| a * b).sum::<f64>();
        (mean, var.max(0.0))
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Uniform grid over [0,1]², row-major with x varying fastest.
pub fn grid_points(resolution: usize) -> Vec<(f64, f64)> {
    let c = |k: usize| k as f64 / (resolution - 1) as f64;
    let mut out = Vec::new();
    for row in 0..resolution {
        for col in 0..resolution {
            out.push((c(col), c(row)));
        }
    }
    out
}

/// First index holding the maximum among unmasked entries.
pub fn brute_argmax(field: &[f64], excluded: &[bool]) -> Option<usize> {
    let mut best = None;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..field.len() {
        if !excluded[i] && field[i] > best_v {
            best_v = field[i];
            best = Some(i);
        }
    }
    best
}
