use serde::Serialize;

use crate::config::MAX_TOTAL_DIM;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
    labels: Vec<String>,
    strides: Vec<usize>,
    total: usize,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        let labels = (0..dims.len()).map(|i| format!("r{i}")).collect();
        Self::with_labels(dims, labels)
    }

    pub fn uniform(sites: usize, dim: usize) -> Result<Self> {
        Self::new(vec![dim; sites])
    }

    pub fn with_labels(dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} sites",
                labels.len(),
                dims.len()
            )));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Config(format!("site dimension {d} is below 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or_else(|| {
                    Error::ResourceGuard(format!(
                        "total dimension of {dims:?} exceeds the guard of {MAX_TOTAL_DIM}"
                    ))
                })?;
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(Self { dims, labels, strides, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    pub fn stride(&self, site: usize) -> usize {
        self.strides[site]
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    /// Digit of `index` on `site`.
    #[inline]
    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.dims[site]
    }

    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} digits for {} sites",
                digits.len(),
                self.dims.len()
            )));
        }
        digits.iter().zip(&self.dims).zip(&self.strides).try_fold(0, |acc, ((&x, &d), &s)| {
            if x >= d {
                Err(Error::DimensionMismatch(format!("digit {x} out of range for dimension {d}")))
            } else {
                Ok(acc + x * s)
            }
        })
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::with_labels(dims, labels)
    }

    /// Product of the dimensions of `sites`, after checking they are distinct and in range.
    pub fn local_dim(&self, sites: &[usize]) -> Result<usize> {
        for (i, &s) in sites.iter().enumerate() {
            if s >= self.dims.len() {
                return Err(Error::DimensionMismatch(format!(
                    "site {s} outside a {}-site layout",
                    self.dims.len()
                )));
            }
            if sites[..i].contains(&s) {
                return Err(Error::DimensionMismatch(format!("site {s} listed twice")));
            }
        }
        Ok(sites.iter().map(|&s| self.dims[s]).product())
    }

    /// Offsets of every local basis state of `sites` (first listed site most significant),
    /// and the base indices of all states whose digits on `sites` are zero.
    pub(crate) fn split(&self, sites: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut offsets = vec![0usize];
        for &s in sites {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[s]);
            for &o in &offsets {
                for x in 0..self.dims[s] {
                    next.push(o + x * self.strides[s]);
                }
            }
            offsets = next;
        }
        let mut bases = vec![0usize];
        for s in (0..self.dims.len()).filter(|s| !sites.contains(s)) {
            let mut next = Vec::with_capacity(bases.len() * self.dims[s]);
            for &b in &bases {
                for x in 0..self.dims[s] {
                    next.push(b + x * self.strides[s]);
                }
            }
            bases = next;
        }
        (offsets, bases)
    }
}
