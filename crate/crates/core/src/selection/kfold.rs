use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Shuffle `0..n` with a seeded generator and deal it into `k` folds.
///
/// Fold sizes differ by at most one (the first `n % k` folds get the extra
/// index); indices inside each fold are sorted.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::BadK { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = base + usize::from(i < extra);
        let mut fold = order[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partition(folds: &[Vec<usize>], n: usize) {
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn ten_into_five() {
        let folds = kfold_split(10, 5, 7).unwrap();
        assert_eq!(folds.len(), 5);
        assert!(folds.iter().all(|f| f.len() == 2));
        check_partition(&folds, 10);
    }

    #[test]
    fn uneven_sizes() {
        let folds = kfold_split(127, 5, 1).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, [25, 25, 25, 26, 26]);
        check_partition(&folds, 127);
    }

    #[test]
    fn leave_one_out() {
        let folds = kfold_split(4, 4, 99).unwrap();
        assert!(folds.iter().all(|f| f.len() == 1));
        check_partition(&folds, 4);
    }

    #[test]
    fn seeded_and_validated() {
        assert_eq!(kfold_split(30, 3, 5).unwrap(), kfold_split(30, 3, 5).unwrap());
        assert_ne!(kfold_split(30, 3, 5).unwrap(), kfold_split(30, 3, 6).unwrap());
        assert!(matches!(kfold_split(3, 4, 0), Err(Error::BadK { n: 3, k: 4 })));
        assert!(matches!(kfold_split(3, 1, 0), Err(Error::BadK { .. })));
    }
}
