use serde::Serialize;
use std::fmt;

/// A finite union of closed intervals with integer endpoints, kept sorted
/// and merged (touching intervals coalesce).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalUnion(Vec<(usize, usize)>);

impl IntervalUnion {
    pub fn empty() -> IntervalUnion {
        IntervalUnion(Vec::new())
    }

    pub fn point(i: usize) -> IntervalUnion {
        IntervalUnion(vec![(i, i)])
    }

    pub fn interval(lo: usize, hi: usize) -> IntervalUnion {
        assert!(lo <= hi, "empty interval [{lo},{hi}]");
        IntervalUnion(vec![(lo, hi)])
    }

    pub fn from_intervals(parts: impl IntoIterator<Item = (usize, usize)>) -> IntervalUnion {
        let mut v: Vec<(usize, usize)> = parts.into_iter().collect();
        v.sort();
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            assert!(lo <= hi, "empty interval [{lo},{hi}]");
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalUnion(out)
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first_point(&self) -> Option<usize> {
        self.0.first().map(|p| p.0)
    }

    pub fn last_point(&self) -> Option<usize> {
        self.0.last().map(|p| p.1)
    }

    /// `[min, max]`, when non-empty.
    pub fn hull(&self) -> Option<(usize, usize)> {
        Some((self.first_point()?, self.last_point()?))
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::from_intervals(self.0.iter().chain(&other.0).copied())
    }

    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.0
            .iter()
            .all(|&(lo, hi)| other.0.iter().any(|&(a, b)| a <= lo && hi <= b))
    }

    /// Every point of `self` is at or before every point of `later`.
    /// Vacuous when either is empty.
    pub fn precedes(&self, later: &IntervalUnion) -> bool {
        match (self.last_point(), later.first_point()) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        }
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        for (i, (lo, hi)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "[{lo},{hi}]")?;
        }
        Ok(())
    }
}

impl Serialize for IntervalUnion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Whether the time points named by a constraint's `(series l1 ... lk)`
/// are in order. Labels that were never realized are empty and constrain
/// nothing.
pub fn series_constraint_check(labels: &[IntervalUnion]) -> bool {
    let present: Vec<&IntervalUnion> = labels.iter().filter(|u| !u.is_empty()).collect();
    present.windows(2).all(|w| w[0].precedes(w[1]))
}
