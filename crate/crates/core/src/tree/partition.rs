use serde::{Deserialize, Serialize};

/// Nonincreasing sequence of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct Partition(Vec<u64>);

impl Partition {
    /// Sorts `parts` into nonincreasing order.
    pub fn new(mut parts: Vec<u64>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Parts followed by zeros up to length `len`.
    pub fn padded(&self, len: usize) -> Vec<u64> {
        let mut v = self.0.clone();
        v.resize(len.max(v.len()), 0);
        v
    }

    /// Positive parts only.
    pub fn positive(&self) -> Vec<u64> {
        self.0.iter().copied().filter(|&x| x > 0).collect()
    }
}

impl From<Vec<u64>> for Partition {
    fn from(v: Vec<u64>) -> Self {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u64> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
