//! Partition recovery scoring and closed-form identity auditing.

use crate::error::{Error, Result};
use crate::net::MultilayerNetwork;
use crate::tdd::mle_given_labels;

fn pairs(x: u64) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index between two labelings of the same items.
///
/// Permutation-invariant and symmetric; 1 for identical partitions, near
/// 0 for independent ones, negative for disagreement beyond chance. Both
/// partitions trivial in the same way (pure chance has no room to act)
/// scores 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "labelings cover {} and {} items",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Dimension(
            "rand index needs at least two items".into(),
        ));
    }
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let index: f64 = table.iter().flatten().map(|&n| pairs(n)).sum();
    let rows: f64 = table
        .iter()
        .map(|row| pairs(row.iter().sum::<u64>()))
        .sum();
    let cols: f64 = (0..kb)
        .map(|j| pairs(table.iter().map(|row| row[j]).sum::<u64>()))
        .sum();
    let expected = rows * cols / pairs(a.len() as u64);
    let ceiling = 0.5 * (rows + cols);
    if ceiling == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (ceiling - expected))
}

/// How far the fitted discrete model drifts from reproducing observed
/// node degrees.
///
/// At the closed-form parameter estimates the expected total degree of
/// every node equals its observed degree exactly, for any labeling. This
/// audits that identity by brute force: it sums the model rates over all
/// destinations, origins, and hours per node and returns the worst
/// relative gap. Cleaned data should stay at floating-point noise.
pub fn degree_identity_residual(net: &MultilayerNetwork, labels: &[usize]) -> Result<f64> {
    let k = labels.iter().max().map_or(0, |m| m + 1).max(1);
    let model = mle_given_labels(net, labels, k)?;
    let degrees = net.degree_summary();
    let n = net.n_nodes();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut expected = 0.0;
        for t in 0..net.n_layers() {
            for j in 0..n {
                expected += model.rate(i, j, t) + model.rate(j, i, t);
            }
        }
        let observed = degrees.k[i] as f64;
        let gap = (expected - observed).abs() / observed.max(1.0);
        worst = worst.max(gap);
    }
    Ok(worst)
}
