#![allow(dead_code)]

use modelxp::{Classifier, Example};

/// Truth table indexed by `sum e[i] << i`.
pub fn table(m: &dyn Classifier) -> Vec<bool> {
    let n = m.num_features();
    (0..1u64 << n)
        .map(|i| m.classify(&Example::from_index(n, i)))
        .collect()
}

fn agrees(x: u64, e: u64, mask: u64) -> bool {
    (x ^ e) & mask == 0
}

/// Size of the smallest local explanation, found over all feature masks.
pub fn naive_local_min(t: &[bool], n: usize, e: u64, contrastive: bool) -> Option<usize> {
    let c = t[e as usize];
    let all = (1u64 << n) - 1;
    (0..1u64 << n)
        .filter(|&mask| {
            if contrastive {
                (0..1u64 << n).any(|x| agrees(x, e, all & !mask) && t[x as usize] != c)
            } else {
                (0..1u64 << n).all(|x| !agrees(x, e, mask) || t[x as usize] == c)
            }
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
}

/// Size of the smallest global explanation for class `c`, found over all
/// `3^n` partial assignments.
pub fn naive_global_min(t: &[bool], n: usize, c: bool, contrastive: bool) -> Option<usize> {
    let want = c != contrastive;
    let mut best: Option<usize> = None;
    let mut code = vec![0u8; n];
    loop {
        let mask: u64 = (0..n).filter(|&i| code[i] != 0).map(|i| 1 << i).sum();
        let vals: u64 = (0..n).filter(|&i| code[i] == 2).map(|i| 1 << i).sum();
        if (0..1u64 << n).all(|x| !agrees(x, vals, mask) || t[x as usize] == want) {
            let size = mask.count_ones() as usize;
            best = Some(best.map_or(size, |b: usize| b.min(size)));
        }
        let mut i = 0;
        while i < n && code[i] == 2 {
            code[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
        code[i] += 1;
    }
}

pub fn index_of(e: &[bool]) -> u64 {
    e.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum()
}
