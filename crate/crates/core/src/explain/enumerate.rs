use crate::models::PartialExample;

/// `k`-element subsets of `0..n` as ascending vectors, in lexicographic order.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// All assignments to `set` in binary counting order, the first feature of
/// `set` being the most significant bit.
pub fn assignments(n: usize, set: &[usize]) -> impl Iterator<Item = PartialExample> + '_ {
    let s = set.len();
    (0..1u64 << s).map(move |a| {
        PartialExample::from_pairs(
            n,
            set.iter()
                .enumerate()
                .map(|(i, &f)| (f, a >> (s - 1 - i) & 1 == 1)),
        )
    })
}
