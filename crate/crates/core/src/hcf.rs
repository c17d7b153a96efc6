//! Serial Highest Confidence First.
//!
//! Every site starts uncommitted. The site with the smallest ordered
//! stability is repeatedly switched to its best label, after which its own
//! stability and its neighbors' are refreshed in an addressable heap. The
//! run stops once the smallest stability is non-negative.

use crate::error::{MrfError, Result};
use crate::heap::IndexedMinHeap;
use crate::local::{assign_ranks, check_ranks, RankMode};
use crate::mrf::{check_estimator_inputs, Configuration, DataTerm, Field, Label, UNCOMMITTED};
use crate::stability::{eval_site, StabilityRecord};
use crate::trace::RunTrace;

#[derive(Debug, Clone, PartialEq)]
pub struct HcfOptions {
    pub rank_mode: RankMode,
    /// Defaults to `100 * num_sites * label_count`.
    pub max_steps: Option<usize>,
}

impl Default for HcfOptions {
    fn default() -> Self {
        Self {
            rank_mode: RankMode::SiteIndex,
            max_steps: None,
        }
    }
}

/// One state change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcfStep {
    pub step: usize,
    pub site: usize,
    pub previous: Label,
    pub label: Label,
    /// Stability of `site` when it was selected.
    pub stability: f64,
    /// Augmented energy after the change, accumulated from local deltas.
    pub energy_after: f64,
    pub committed_after: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HcfTrace {
    pub steps: Vec<HcfStep>,
}

impl HcfTrace {
    /// One trace row per step.
    pub fn to_run_trace(&self) -> RunTrace {
        let mut t = RunTrace::starting_at(0.0, 0);
        for s in &self.steps {
            t.push(s.energy_after, s.committed_after, 1);
        }
        t.steps = self.steps.len() + 1;
        t
    }
}

pub(crate) fn default_cap(field: &Field) -> usize {
    100usize
        .saturating_mul(field.num_sites())
        .saturating_mul(field.label_count() as usize)
}

/// Stepwise HCF state. [`hcf_run`] drives it to completion; tests can step it
/// by hand and inspect the heap between steps.
#[derive(Debug)]
pub struct Hcf<'a> {
    field: &'a Field,
    data: &'a DataTerm,
    config: Configuration,
    ranks: Vec<u32>,
    heap: IndexedMinHeap<StabilityRecord>,
    best: Vec<Label>,
    scratch: Vec<f64>,
    energy: f64,
    committed: usize,
    steps: usize,
}

impl<'a> Hcf<'a> {
    pub fn new(field: &'a Field, data: &'a DataTerm, ranks: Vec<u32>) -> Result<Self> {
        check_estimator_inputs(field, data)?;
        check_ranks(&ranks, field.num_sites())?;
        let config = Configuration::uncommitted(field.num_sites());
        let mut scratch = Vec::new();
        let mut best = Vec::with_capacity(field.num_sites());
        let mut keys = Vec::with_capacity(field.num_sites());
        for (s, &rank) in ranks.iter().enumerate() {
            let e = eval_site(field, data, config.as_slice(), s, &mut scratch);
            best.push(e.best);
            keys.push(StabilityRecord::new(e.stability, false, rank));
        }
        Ok(Self {
            field,
            data,
            config,
            ranks,
            heap: IndexedMinHeap::from_keys(keys),
            best,
            scratch,
            energy: 0.0,
            committed: 0,
            steps: 0,
        })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn into_config(self) -> Configuration {
        self.config
    }

    /// Current ordered stability of `site`.
    pub fn record(&self, site: usize) -> StabilityRecord {
        self.heap.key(site)
    }

    /// Site at the top of the heap.
    pub fn peek(&self) -> Option<(usize, StabilityRecord)> {
        self.heap.peek()
    }

    pub fn is_done(&self) -> bool {
        self.heap.peek().is_none_or(|(_, rec)| !rec.movable)
    }

    /// Changes the top site if its stability allows it.
    pub fn step(&mut self) -> Option<HcfStep> {
        let (site, rec) = self.heap.peek()?;
        if !rec.movable {
            return None;
        }
        let previous = self.config.get(site);
        let label = self.best[site];
        let labels = self.config.as_slice();
        let before = if previous == UNCOMMITTED {
            0.0
        } else {
            crate::mrf::local_energy_unchecked(self.field, self.data, labels, site, previous)
        };
        let after = crate::mrf::local_energy_unchecked(self.field, self.data, labels, site, label);
        self.config.set(site, label);
        self.energy += after - before;
        if previous == UNCOMMITTED {
            self.committed += 1;
        }
        self.refresh(site);
        for i in 0..self.field.neighbors(site).len() {
            let r = self.field.neighbors(site)[i];
            self.refresh(r);
        }
        self.steps += 1;
        Some(HcfStep {
            step: self.steps,
            site,
            previous,
            label,
            stability: rec.value,
            energy_after: self.energy,
            committed_after: self.committed,
        })
    }

    fn refresh(&mut self, site: usize) {
        let e = eval_site(self.field, self.data, self.config.as_slice(), site, &mut self.scratch);
        self.best[site] = e.best;
        let rec = StabilityRecord::new(e.stability, self.config.is_committed(site), self.ranks[site]);
        self.heap.update(site, rec);
    }
}

/// Runs HCF from the all-uncommitted configuration to termination.
pub fn hcf_run(field: &Field, data: &DataTerm, options: &HcfOptions) -> Result<(Configuration, HcfTrace)> {
    let ranks = assign_ranks(field.num_sites(), options.rank_mode);
    let cap = options.max_steps.unwrap_or_else(|| default_cap(field));
    let mut hcf = Hcf::new(field, data, ranks)?;
    let mut trace = HcfTrace::default();
    while let Some(step) = hcf.step() {
        if trace.steps.len() >= cap {
            return Err(MrfError::IterationCap { cap });
        }
        trace.steps.push(step);
    }
    Ok((hcf.into_config(), trace))
}
