use std::fmt;

use crate::error::{Error, Result};

/// One tensor factor: a label and its Hilbert-space dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labeled tensor factors.
///
/// Amplitudes over a signature are stored row-major: the first entry is the
/// most significant digit of the flat index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SubsystemSignature {
    entries: Vec<Subsystem>,
}

impl SubsystemSignature {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out = Self::default();
        for (label, dim) in entries {
            out.push(label.into(), dim)?;
        }
        Ok(out)
    }

    /// Signature made of qubits only.
    pub fn qubits<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new(labels.iter().map(|l| (l.as_ref().to_string(), 2)))
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    fn push(&mut self, label: String, dim: usize) -> Result<()> {
        if dim < 2 {
            return Err(Error::InvalidDimension { label, dim });
        }
        if self.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        self.entries.push(Subsystem { label, dim });
        Ok(())
    }

    pub fn entries(&self) -> &[Subsystem] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.label.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|e| e.dim).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.entries[p].dim)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Concatenation `self ⊗ other`; labels must be disjoint.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for e in &other.entries {
            out.push(e.label.clone(), e.dim)?;
        }
        Ok(out)
    }

    /// Sub-signature in the given label order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut out = Self::default();
        for l in labels {
            let l = l.as_ref();
            let dim = self.dim_of(l)?;
            out.push(l.to_string(), dim)?;
        }
        Ok(out)
    }

    /// Positions of `labels` in this signature, rejecting unknown or repeated labels.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut seen = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let p = self
                .position(l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            if seen.contains(&p) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            seen.push(p);
        }
        Ok(seen)
    }

    /// Row-major strides for each entry.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.entries.len()];
        for k in (0..self.entries.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.entries[k + 1].dim;
        }
        strides
    }

    /// Same factors with the labels' set equal; order ignored.
    pub fn same_factors(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .all(|e| other.dim_of(&e.label).map_or(false, |d| d == e.dim))
    }

    /// Flat offsets of every multi-index over the entries at `positions`,
    /// enumerated row-major in the order `positions` is given.
    pub(crate) fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &p in positions {
            let dim = self.entries[p].dim;
            let mut next = Vec::with_capacity(offsets.len() * dim);
            for &o in &offsets {
                for d in 0..dim {
                    next.push(o + d * strides[p]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

impl fmt::Display for SubsystemSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", e.label, e.dim)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_label_is_named() {
        let err = SubsystemSignature::qubits(&["a", "b", "a"]).unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel(ref l) if l == "a"));
    }

    #[test]
    fn dimension_one_rejected() {
        assert!(SubsystemSignature::single("q", 1).is_err());
    }

    #[test]
    fn strides_row_major() {
        let s = SubsystemSignature::new([("a", 2), ("b", 3), ("c", 4)]).unwrap();
        assert_eq!(s.strides(), vec![12, 4, 1]);
        assert_eq!(s.total_dim(), 24);
    }

    #[test]
    fn offsets_follow_requested_order() {
        let s = SubsystemSignature::new([("a", 2), ("b", 3)]).unwrap();
        assert_eq!(s.offsets(&[1, 0]), vec![0, 3, 1, 4, 2, 5]);
        assert_eq!(s.offsets(&[]), vec![0]);
    }

    #[test]
    fn select_preserves_given_order() {
        let s = SubsystemSignature::qubits(&["a", "b", "c"]).unwrap();
        let t = s.select(&["c", "a"]).unwrap();
        assert_eq!(t.labels().collect::<Vec<_>>(), vec!["c", "a"]);
        assert!(matches!(s.select::<&str>(&[]), Err(Error::EmptySelection)));
        assert!(matches!(s.select(&["z"]), Err(Error::UnknownLabel(_))));
    }
}
