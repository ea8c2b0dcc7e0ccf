//! Truncated rank-2 singular value decomposition.
//!
//! Power iteration with deflation on the Gram matrix of the smaller side.
//! The degree-by-hour inputs here are at most a few hundred by 24, so the
//! Gram matrix stays tiny and iteration cost is negligible.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Top-2 factors of a real matrix.
///
/// Vectors are unit-norm and orthonormal within each side for components
/// with a positive singular value; a zero singular value gets zero vectors.
/// Signs are fixed by making each right vector's largest-magnitude entry
/// positive.
#[derive(Debug, Clone)]
pub struct Svd2 {
    pub singular_values: [f64; 2],
    pub left: [Array1<f64>; 2],
    pub right: [Array1<f64>; 2],
    /// Fraction of squared Frobenius norm carried by each component.
    pub explained: [f64; 2],
}

impl Svd2 {
    /// Rank-r reconstruction from the leading factors (r = 1 or 2).
    pub fn reconstruct(&self, rank: usize) -> Array2<f64> {
        let (r, c) = (self.left[0].len(), self.right[0].len());
        let mut out = Array2::<f64>::zeros((r, c));
        for comp in 0..rank.min(2) {
            let s = self.singular_values[comp];
            for i in 0..r {
                for j in 0..c {
                    out[[i, j]] += s * self.left[comp][i] * self.right[comp][j];
                }
            }
        }
        out
    }
}

/// Computes the top-2 singular triplets of `m`.
pub fn top2_svd(m: &Array2<f64>) -> Svd2 {
    let (rows, cols) = m.dim();
    let frob2: f64 = m.iter().map(|x| x * x).sum();
    let zero = |len: usize| Array1::<f64>::zeros(len);
    if frob2 == 0.0 || rows == 0 || cols == 0 {
        return Svd2 {
            singular_values: [0.0, 0.0],
            left: [zero(rows), zero(rows)],
            right: [zero(cols), zero(cols)],
            explained: [0.0, 0.0],
        };
    }

    // Gram matrix on the smaller side.
    let left_side = rows <= cols;
    let dim = rows.min(cols);
    let mut gram = Array2::<f64>::zeros((dim, dim));
    for a in 0..dim {
        for b in a..dim {
            let dot = if left_side {
                (0..cols).map(|j| m[[a, j]] * m[[b, j]]).sum::<f64>()
            } else {
                (0..rows).map(|i| m[[i, a]] * m[[i, b]]).sum::<f64>()
            };
            gram[[a, b]] = dot;
            gram[[b, a]] = dot;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let (lam1, w1) = top_eigenpair(&gram, &mut rng);
    // deflate and repeat
    let mut gram2 = gram.clone();
    for a in 0..dim {
        for b in 0..dim {
            gram2[[a, b]] -= lam1 * w1[a] * w1[b];
        }
    }
    let (lam2, w2_raw) = top_eigenpair(&gram2, &mut rng);

    let sigma1 = lam1.max(0.0).sqrt();
    let rel_floor = 1e-14 * sigma1;
    let sigma2 = {
        let s = lam2.max(0.0).sqrt();
        if s <= rel_floor {
            0.0
        } else {
            s
        }
    };
    // re-orthogonalize the second vector against the first
    let w2 = if sigma2 > 0.0 {
        let proj: f64 = w1.iter().zip(w2_raw.iter()).map(|(a, b)| a * b).sum();
        let mut w = &w2_raw - &(proj * &w1);
        let norm = w.dot(&w).sqrt();
        if norm > 0.0 {
            w /= norm;
        }
        w
    } else {
        zero(dim)
    };

    let other = |w: &Array1<f64>, sigma: f64| -> Array1<f64> {
        let len = if left_side { cols } else { rows };
        if sigma == 0.0 {
            return zero(len);
        }
        let mut v = Array1::<f64>::zeros(len);
        if left_side {
            for j in 0..cols {
                v[j] = (0..rows).map(|i| m[[i, j]] * w[i]).sum::<f64>() / sigma;
            }
        } else {
            for i in 0..rows {
                v[i] = (0..cols).map(|j| m[[i, j]] * w[j]).sum::<f64>() / sigma;
            }
        }
        // normalize away accumulated rounding
        let norm = v.dot(&v).sqrt();
        if norm > 0.0 {
            v /= norm;
        }
        v
    };

    let (mut left, mut right) = if left_side {
        let v1 = other(&w1, sigma1);
        let v2 = other(&w2, sigma2);
        ([w1, w2], [v1, v2])
    } else {
        let u1 = other(&w1, sigma1);
        let u2 = other(&w2, sigma2);
        ([u1, u2], [w1, w2])
    };

    // sign convention on the right vectors
    for comp in 0..2 {
        let Some(peak) = right[comp]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(j, _)| j)
        else {
            continue;
        };
        if right[comp][peak] < 0.0 {
            right[comp].mapv_inplace(|x| -x);
            left[comp].mapv_inplace(|x| -x);
        }
    }

    Svd2 {
        singular_values: [sigma1, sigma2],
        explained: [sigma1 * sigma1 / frob2, sigma2 * sigma2 / frob2],
        left,
        right,
    }
}

/// Dominant eigenpair of a symmetric positive semidefinite matrix.
fn top_eigenpair(g: &Array2<f64>, rng: &mut ChaCha8Rng) -> (f64, Array1<f64>) {
    let dim = g.dim().0;
    let gnorm: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if gnorm == 0.0 {
        let mut w = Array1::<f64>::zeros(dim);
        w[0] = 1.0;
        return (0.0, w);
    }
    let mut w = Array1::<f64>::from_iter((0..dim).map(|_| rng.gen::<f64>() - 0.5));
    let norm = w.dot(&w).sqrt();
    w /= norm;
    let mut lambda = 0.0;
    for _ in 0..200_000 {
        let next = g.dot(&w);
        let next_norm = next.dot(&next).sqrt();
        if next_norm <= 1e-300 {
            // start vector sits in the null space; perturb and continue
            w = Array1::from_iter((0..dim).map(|_| rng.gen::<f64>() - 0.5));
            let n = w.dot(&w).sqrt();
            w /= n;
            continue;
        }
        let next = next / next_norm;
        let new_lambda = next.dot(&g.dot(&next));
        let delta: f64 = w
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        w = next;
        let stalled = (new_lambda - lambda).abs() <= 1e-15 * new_lambda.abs().max(1e-300);
        lambda = new_lambda;
        if delta <= 1e-15 && stalled {
            break;
        }
    }
    (lambda, w)
}
