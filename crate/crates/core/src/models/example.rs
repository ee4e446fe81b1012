use std::ops::Deref;

/// A total assignment of Boolean values to the features of a model, indexed
/// by feature position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Example(Vec<bool>);

impl Example {
    pub fn new(bits: Vec<bool>) -> Self {
        Example(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Example(vec![false; n])
    }

    /// Decodes `index` so that bit `i` becomes the value of feature `i`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Example((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    /// The example obtained by flipping every feature in `set`.
    pub fn flip(&self, set: &[usize]) -> Example {
        let mut bits = self.0.clone();
        for &f in set {
            bits[f] = !bits[f];
        }
        Example(bits)
    }

    /// The partial example that keeps only the features in `set`.
    pub fn restrict(&self, set: &[usize]) -> PartialExample {
        let mut tau = PartialExample::new(self.len());
        for &f in set {
            tau.set(f, Some(self.0[f]));
        }
        tau
    }

    pub fn agrees_with(&self, tau: &PartialExample) -> bool {
        tau.iter().all(|(f, b)| self.0[f] == b)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &Example) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl Deref for Example {
    type Target = [bool];
    fn deref(&self) -> &[bool] {
        &self.0
    }
}

impl From<Vec<bool>> for Example {
    fn from(bits: Vec<bool>) -> Self {
        Example(bits)
    }
}

/// An assignment to a subset of the features. Unassigned features are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialExample {
    values: Vec<Option<bool>>,
}

impl PartialExample {
    pub fn new(n: usize) -> Self {
        PartialExample {
            values: vec![None; n],
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, bool)>) -> Self {
        let mut tau = PartialExample::new(n);
        for (f, b) in pairs {
            tau.values[f] = Some(b);
        }
        tau
    }

    /// Number of features in the underlying universe.
    pub fn universe(&self) -> usize {
        self.values.len()
    }

    /// Number of assigned features.
    pub fn size(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn get(&self, f: usize) -> Option<bool> {
        self.values[f]
    }

    pub fn set(&mut self, f: usize, value: Option<bool>) {
        self.values[f] = value;
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    /// Assigned features in ascending order.
    pub fn domain(&self) -> Vec<usize> {
        self.iter().map(|(f, _)| f).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(f, v)| v.map(|b| (f, b)))
    }

    /// Fills unassigned features with `default`.
    pub fn complete_with(&self, default: bool) -> Example {
        Example(self.values.iter().map(|v| v.unwrap_or(default)).collect())
    }

    pub fn without(&self, f: usize) -> PartialExample {
        let mut tau = self.clone();
        tau.values[f] = None;
        tau
    }
}
