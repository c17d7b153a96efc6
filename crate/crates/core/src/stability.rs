//! Site stabilities and their rank-ordered form.

use std::cmp::Ordering;

use crate::error::{MrfError, Result};
use crate::mrf::{local_energies_into, Configuration, DataTerm, Field, Label, UNCOMMITTED};

/// A site's stability together with its rank, ordered lexicographically.
///
/// `movable` is false only for committed sites with non-negative stability,
/// which never change. It is compared between value and rank, so it only
/// matters when an uncommitted site and a settled committed site both sit at
/// exactly zero: the uncommitted one then orders first and is never blocked.
#[derive(Debug, Clone, Copy)]
pub struct StabilityRecord {
    pub value: f64,
    pub movable: bool,
    pub rank: u32,
}

impl StabilityRecord {
    pub fn new(value: f64, committed: bool, rank: u32) -> Self {
        // +0.0 normalizes -0.0 so that total ordering treats both zeros alike
        let value = value + 0.0;
        Self {
            value,
            movable: !committed || value < 0.0,
            rank,
        }
    }
}

impl PartialEq for StabilityRecord {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for StabilityRecord {}

impl PartialOrd for StabilityRecord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StabilityRecord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.movable.cmp(&self.movable))
            .then_with(|| self.rank.cmp(&other.rank))
    }
}

/// Result of evaluating one site against the current configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteEval {
    /// Lowest-energy label, smallest index on ties.
    pub best: Label,
    pub best_energy: f64,
    pub stability: f64,
}

/// Stability and best label from precomputed local energies.
pub(crate) fn eval_from_energies(energies: &[f64], current: Label) -> SiteEval {
    let mut best = 0usize;
    for (l, &e) in energies.iter().enumerate().skip(1) {
        if e < energies[best] {
            best = l;
        }
    }
    let best_energy = energies[best];
    let stability = if current == UNCOMMITTED {
        let second = energies
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != best)
            .map(|(_, &e)| e)
            .fold(f64::INFINITY, f64::min);
        -(second - best_energy)
    } else {
        let own = energies[current as usize];
        let alt = energies
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != current as usize)
            .map(|(_, &e)| e)
            .fold(f64::INFINITY, f64::min);
        alt - own
    };
    SiteEval {
        best: best as Label,
        best_energy,
        stability: stability + 0.0,
    }
}

/// Evaluates `site`, reusing `scratch` for the per-label energies.
pub(crate) fn eval_site(
    field: &Field,
    data: &DataTerm,
    labels: &[Label],
    site: usize,
    scratch: &mut Vec<f64>,
) -> SiteEval {
    local_energies_into(field, data, labels, site, scratch);
    eval_from_energies(scratch, labels[site])
}

/// The label minimizing the site's local energy, and that energy.
pub fn best_label(field: &Field, data: &DataTerm, config: &Configuration, site: usize) -> (Label, f64) {
    let e = eval_site(field, data, config.as_slice(), site, &mut Vec::new());
    (e.best, e.best_energy)
}

/// Stability of `site`.
///
/// Uncommitted: minus the gap between the best and second-best local
/// energy (never positive). Committed: the gap from the current label to the
/// best alternative (negative iff some other label is strictly better).
pub fn stability(field: &Field, data: &DataTerm, config: &Configuration, site: usize) -> Result<f64> {
    if field.label_count() < 2 {
        return Err(MrfError::SingleLabel);
    }
    Ok(eval_site(field, data, config.as_slice(), site, &mut Vec::new()).stability)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{make_chain_fixture, EDGE, NON_EDGE};
    use crate::mrf::LabelSet;

    #[test]
    fn chain_best_labels() {
        let (field, data) = make_chain_fixture();
        let empty = Configuration::uncommitted(8);
        assert_eq!(best_label(&field, &data, &empty, 0), (EDGE, -4.0));
        assert_eq!(best_label(&field, &data, &empty, 3), (NON_EDGE, 0.0));
    }

    #[test]
    fn tie_prefers_label_zero() {
        let field = Field::new(LabelSet::new(3).unwrap(), vec![vec![]], vec![]).unwrap();
        let data = DataTerm::new(3, vec![1.0, 1.0, 1.0]).unwrap();
        let c = Configuration::uncommitted(1);
        assert_eq!(best_label(&field, &data, &c, 0), (0, 1.0));
        assert_eq!(stability(&field, &data, &c, 0).unwrap().to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn chain_stabilities() {
        let (field, data) = make_chain_fixture();
        let empty = Configuration::uncommitted(8);
        assert_eq!(stability(&field, &data, &empty, 0).unwrap(), -4.0);
        assert!((stability(&field, &data, &empty, 5).unwrap() + 0.1).abs() < 1e-15);
        let expected = [-4.0, -0.2, -0.4, -0.5, -0.3, -0.1, -0.3, -0.4];
        for (s, want) in expected.iter().enumerate() {
            assert!((stability(&field, &data, &empty, s).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn committed_unique_argmin_is_positive() {
        let (field, data) = make_chain_fixture();
        let mut c = Configuration::uncommitted(8);
        c.set(0, EDGE);
        assert!(stability(&field, &data, &c, 0).unwrap() > 0.0);
        c.set(0, NON_EDGE);
        assert_eq!(stability(&field, &data, &c, 0).unwrap(), -4.0);
    }

    #[test]
    fn single_label_rejected() {
        let field = Field::new(LabelSet::new(1).unwrap(), vec![vec![]], vec![]).unwrap();
        let data = DataTerm::new(1, vec![0.0]).unwrap();
        assert_eq!(
            stability(&field, &data, &Configuration::uncommitted(1), 0),
            Err(MrfError::SingleLabel)
        );
    }

    #[test]
    fn record_ordering() {
        let a = StabilityRecord::new(-1.0, false, 3);
        let b = StabilityRecord::new(-1.0, true, 1);
        assert!(b < a);
        let zero_unc = StabilityRecord::new(-0.0, false, 9);
        let zero_com = StabilityRecord::new(0.0, true, 0);
        assert!(zero_unc < zero_com);
        assert!(StabilityRecord::new(-2.0, true, 9) < StabilityRecord::new(-1.0, false, 0));
    }
}
