use super::{QcoreError, Result};

/// Largest register the dense representation accepts unless raised explicitly.
pub const DEFAULT_MAX_SITES: usize = 13;

/// Labelled register of spin-1/2 sites.
///
/// Equality compares labels only; the site cap is a construction guard, not
/// part of the space's identity.
#[derive(Clone, Debug)]
pub struct SpinSpace {
    labels: Vec<String>,
    max_sites: usize,
}

impl PartialEq for SpinSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl SpinSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::with_max_sites(labels, DEFAULT_MAX_SITES)
    }

    pub fn with_max_sites<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        max_sites: usize,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(QcoreError::EmptySpace);
        }
        if labels.len() > max_sites {
            return Err(QcoreError::Capacity {
                requested: labels.len(),
                cap: max_sites,
            });
        }
        Ok(Self { labels, max_sites })
    }

    /// Space with generated labels `q0`, `q1`, ...
    pub fn anonymous(n_sites: usize) -> Result<Self> {
        Self::new((0..n_sites).map(|i| format!("q{i}")))
    }

    pub fn single() -> Self {
        Self {
            labels: vec!["q0".to_string()],
            max_sites: DEFAULT_MAX_SITES,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, site: usize) -> Option<&str> {
        self.labels.get(site).map(String::as_str)
    }

    pub fn max_sites(&self) -> usize {
        self.max_sites
    }

    pub fn site_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            Err(QcoreError::SiteOutOfRange {
                site,
                n_sites: self.n_sites(),
            })
        } else {
            Ok(())
        }
    }

    /// Bit mask of `site` inside a basis index.
    pub fn bit(&self, site: usize) -> usize {
        1 << (self.n_sites() - 1 - site)
    }

    /// Sub-register made of `sites`, in the order given.
    pub fn select(&self, sites: &[usize]) -> Result<Self> {
        if sites.is_empty() {
            return Err(QcoreError::EmptyKeep);
        }
        let mut seen = vec![false; self.n_sites()];
        for &s in sites {
            self.check_site(s)?;
            if seen[s] {
                return Err(QcoreError::DuplicateSite(s));
            }
            seen[s] = true;
        }
        Ok(Self {
            labels: sites.iter().map(|&s| self.labels[s].clone()).collect(),
            max_sites: self.max_sites,
        })
    }

    /// Concatenation `self ⊗ other`. The tighter of the two caps applies.
    pub fn join(&self, other: &Self) -> Result<Self> {
        Self::with_max_sites(
            self.labels.iter().chain(other.labels.iter()).cloned(),
            self.max_sites.min(other.max_sites),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_is_power_of_two() {
        for n in 1..=DEFAULT_MAX_SITES {
            let s = SpinSpace::anonymous(n).unwrap();
            assert_eq!(s.dim(), 1 << n);
        }
    }

    #[test]
    fn cap_is_enforced_and_configurable() {
        assert!(matches!(
            SpinSpace::anonymous(14),
            Err(QcoreError::Capacity { requested: 14, cap: 13 })
        ));
        assert!(SpinSpace::with_max_sites((0..3).map(|i| i.to_string()), 2).is_err());
        assert!(SpinSpace::with_max_sites((0..15).map(|i| i.to_string()), 16).is_ok());
        assert_eq!(SpinSpace::anonymous(0), Err(QcoreError::EmptySpace));
    }

    #[test]
    fn bits_are_big_endian() {
        let s = SpinSpace::anonymous(3).unwrap();
        assert_eq!(s.bit(0), 4);
        assert_eq!(s.bit(2), 1);
    }

    #[test]
    fn select_rejects_duplicates() {
        let s = SpinSpace::new(["a", "b", "c"]).unwrap();
        assert_eq!(s.select(&[2, 0]).unwrap().labels(), ["c", "a"]);
        assert_eq!(s.select(&[1, 1]), Err(QcoreError::DuplicateSite(1)));
        assert!(s.select(&[3]).is_err());
    }
}
