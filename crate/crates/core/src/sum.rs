//! Order-fixed summation.
//!
//! All reductions over bootstrap replicates go through [`tree_sum`], whose
//! association order depends only on the slice length. Results are therefore
//! bit-identical no matter how many workers produced the summands.

const LEAF: usize = 16;

/// Pairwise sum with a fixed split point (`len / 2`) and sequential leaves.
pub fn tree_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    tree_sum(lo) + tree_sum(hi)
}

pub fn tree_mean(xs: &[f64]) -> f64 {
    tree_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance (divisor `len - 1`) around the tree mean.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mean = tree_mean(xs);
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    tree_sum(&dev) / (xs.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_large_inputs() {
        assert_eq!(tree_sum(&[]), 0.0);
        assert_eq!(tree_sum(&[1.0, 2.0, 3.0]), 6.0);
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(tree_sum(&xs), 500_500.0);
        assert_eq!(tree_mean(&xs), 500.5);
    }

    #[test]
    fn variance_of_known_values() {
        let v = sample_variance(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert!((v - 32.0 / 7.0).abs() < 1e-12);
        assert!(sample_variance(&[1.0]).is_nan());
    }
}
