//! Local HCF: the synchronous parallel form of HCF.
//!
//! Each iteration reads every site's stability from the same configuration,
//! then simultaneously changes every site whose ordered stability is
//! negative and strictly below that of all its neighbors. Changed sites are
//! therefore never neighbors, and the energy change of an iteration is the
//! sum of the changed sites' individual deltas.
//!
//! The read phase may run on a rayon pool. Each site's evaluation only reads
//! the input configuration, so results are bit-identical for every thread
//! count.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{MrfError, Result};
use crate::hcf::default_cap;
use crate::mrf::{augmented_energy, check_estimator_inputs, Configuration, DataTerm, Field};
use crate::rng;
use crate::stability::{eval_site, SiteEval, StabilityRecord};
use crate::trace::RunTrace;

/// How distinct site ranks are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankMode {
    /// Rank equals site id.
    #[default]
    SiteIndex,
    /// A seeded random permutation.
    Seeded(u64),
}

/// Distinct ranks `0..num_sites`, one per site.
pub fn assign_ranks(num_sites: usize, mode: RankMode) -> Vec<u32> {
    let mut ranks: Vec<u32> = (0..num_sites as u32).collect();
    if let RankMode::Seeded(seed) = mode {
        let mut r = rng::stream(seed, rng::RANK_STREAM);
        ranks.shuffle(&mut r);
    }
    ranks
}

pub(crate) fn check_ranks(ranks: &[u32], num_sites: usize) -> Result<()> {
    if ranks.len() != num_sites {
        return Err(MrfError::Shape(format!(
            "{} ranks for {num_sites} sites",
            ranks.len()
        )));
    }
    let mut seen = vec![false; num_sites];
    for &r in ranks {
        match seen.get_mut(r as usize) {
            Some(s) if !*s => *s = true,
            _ => {
                return Err(MrfError::InvalidParameter(format!(
                    "ranks are not a permutation of 0..{num_sites}"
                )))
            }
        }
    }
    Ok(())
}

/// Outcome of one synchronous iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    /// Ascending site ids.
    pub changed_sites: Vec<usize>,
    /// Stability of each changed site, read before the iteration.
    pub changed_stabilities: Vec<f64>,
    pub new_commits: usize,
    pub energy_after: f64,
    pub any_change: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalHcfOptions {
    /// Defaults to `100 * num_sites * label_count`.
    pub max_iterations: Option<usize>,
    /// 1 runs on the calling thread; 0 uses rayon's global pool.
    pub threads: usize,
}

impl Default for LocalHcfOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            threads: 1,
        }
    }
}

enum Exec<'p> {
    Sequential,
    Pool(Option<&'p rayon::ThreadPool>),
}

impl Exec<'_> {
    fn map_sites<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &mut Vec<f64>) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => {
                let mut scratch = Vec::new();
                (0..n).map(|s| f(s, &mut scratch)).collect()
            }
            Exec::Pool(pool) => {
                let run = || {
                    (0..n)
                        .into_par_iter()
                        .map_with(Vec::new(), |scratch, s| f(s, scratch))
                        .collect()
                };
                match pool {
                    Some(p) => p.install(run),
                    None => run(),
                }
            }
        }
    }
}

fn step_with(
    field: &Field,
    data: &DataTerm,
    config: &Configuration,
    ranks: &[u32],
    exec: &Exec<'_>,
) -> (Configuration, StepResult) {
    let labels = config.as_slice();
    let evals: Vec<SiteEval> = exec.map_sites(field.num_sites(), |s, scratch| {
        eval_site(field, data, labels, s, scratch)
    });
    let records: Vec<StabilityRecord> = evals
        .iter()
        .enumerate()
        .map(|(s, e)| StabilityRecord::new(e.stability, config.is_committed(s), ranks[s]))
        .collect();
    let eligible: Vec<bool> = exec.map_sites(field.num_sites(), |s, _| {
        let own = records[s];
        own.movable && field.neighbors(s).iter().all(|&r| own < records[r])
    });

    let mut next = config.clone();
    let mut changed_sites = Vec::new();
    let mut changed_stabilities = Vec::new();
    let mut new_commits = 0;
    for (s, _) in eligible.iter().enumerate().filter(|(_, &e)| e) {
        if !config.is_committed(s) {
            new_commits += 1;
        }
        next.set(s, evals[s].best);
        changed_sites.push(s);
        changed_stabilities.push(evals[s].stability);
    }
    let energy_after = augmented_energy(field, data, &next);
    let any_change = !changed_sites.is_empty();
    (
        next,
        StepResult {
            changed_sites,
            changed_stabilities,
            new_commits,
            energy_after,
            any_change,
        },
    )
}

/// One synchronous iteration on the calling thread.
pub fn local_hcf_step(
    field: &Field,
    data: &DataTerm,
    config: &Configuration,
    ranks: &[u32],
) -> Result<(Configuration, StepResult)> {
    data.check_against(field)?;
    config.check_against(field)?;
    check_ranks(ranks, field.num_sites())?;
    if field.label_count() < 2 {
        return Err(MrfError::SingleLabel);
    }
    Ok(step_with(field, data, config, ranks, &Exec::Sequential))
}

/// Iterates from the all-uncommitted configuration until nothing changes.
pub fn local_hcf_run(
    field: &Field,
    data: &DataTerm,
    ranks: &[u32],
    options: &LocalHcfOptions,
) -> Result<(Configuration, RunTrace)> {
    check_estimator_inputs(field, data)?;
    check_ranks(ranks, field.num_sites())?;
    let pool = match options.threads {
        0 | 1 => None,
        n => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| MrfError::InvalidParameter(format!("thread pool: {e}")))?,
        ),
    };
    let exec = match options.threads {
        1 => Exec::Sequential,
        _ => Exec::Pool(pool.as_ref()),
    };
    let cap = options.max_iterations.unwrap_or_else(|| default_cap(field));

    let mut config = Configuration::uncommitted(field.num_sites());
    let mut trace = RunTrace::starting_at(0.0, 0);
    let mut committed = 0;
    loop {
        if trace.steps >= cap {
            return Err(MrfError::IterationCap { cap });
        }
        let (next, step) = step_with(field, data, &config, ranks, &exec);
        trace.steps += 1;
        if !step.any_change {
            break;
        }
        committed += step.new_commits;
        trace.push(step.energy_after, committed, step.changed_sites.len());
        config = next;
    }
    Ok((config, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{make_chain_fixture, EDGE, NON_EDGE};
    use crate::mrf::{energy, Clique, LabelSet};

    const E: u32 = EDGE;
    const N: u32 = NON_EDGE;

    #[test]
    fn ranks() {
        assert_eq!(assign_ranks(4, RankMode::SiteIndex), vec![0, 1, 2, 3]);
        let a = assign_ranks(50, RankMode::Seeded(7));
        assert_eq!(a, assign_ranks(50, RankMode::Seeded(7)));
        assert_ne!(a, assign_ranks(50, RankMode::SiteIndex));
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert!(check_ranks(&[0, 0, 1], 3).is_err());
        assert!(check_ranks(&[0, 1], 3).is_err());
    }

    #[test]
    fn chain_first_iteration() {
        let (field, data) = make_chain_fixture();
        let ranks = assign_ranks(8, RankMode::SiteIndex);
        let (next, step) =
            local_hcf_step(&field, &data, &Configuration::uncommitted(8), &ranks).unwrap();
        assert_eq!(step.changed_sites, vec![0, 3, 7]);
        assert_eq!(step.new_commits, 3);
        assert_eq!(next.get(0), E);
        assert_eq!(next.get(3), N);
        assert_eq!(next.get(7), N);
    }

    #[test]
    fn chain_run() {
        let (field, data) = make_chain_fixture();
        let ranks = assign_ranks(8, RankMode::SiteIndex);
        let (config, trace) = local_hcf_run(&field, &data, &ranks, &LocalHcfOptions::default()).unwrap();
        assert_eq!(config.as_slice(), &[E, N, N, N, N, N, N, N]);
        assert_eq!(trace.iterations(), 3);
        assert_eq!(trace.steps, 4);
        assert_eq!(energy(&field, &data, &config).unwrap(), -6.0);
        let committed: Vec<_> = trace.rows.iter().map(|r| r.committed).collect();
        assert_eq!(committed, vec![0, 3, 6, 8]);
    }

    #[test]
    fn local_minimum_is_fixed_point() {
        let (field, data) = make_chain_fixture();
        let ranks = assign_ranks(8, RankMode::SiteIndex);
        let opt = Configuration::from_labels(vec![E, N, N, N, N, N, N, N]);
        let (next, step) = local_hcf_step(&field, &data, &opt, &ranks).unwrap();
        assert!(!step.any_change);
        assert_eq!(next, opt);
    }

    #[test]
    fn equal_neighbors_lower_rank_wins() {
        let field = Field::new(
            LabelSet::new(2).unwrap(),
            vec![vec![1], vec![0]],
            vec![Clique::pair(0, 1, vec![0.0; 4])],
        )
        .unwrap();
        let data = DataTerm::new(2, vec![0.0, -1.0, 0.0, -1.0]).unwrap();
        let empty = Configuration::uncommitted(2);
        let (_, step) = local_hcf_step(&field, &data, &empty, &[0, 1]).unwrap();
        assert_eq!(step.changed_sites, vec![0]);
        let (_, step) = local_hcf_step(&field, &data, &empty, &[1, 0]).unwrap();
        assert_eq!(step.changed_sites, vec![1]);
    }

    #[test]
    fn single_site_terminates_on_second_iteration() {
        let field = Field::new(LabelSet::new(2).unwrap(), vec![vec![]], vec![]).unwrap();
        let data = DataTerm::new(2, vec![0.5, 0.0]).unwrap();
        let (config, trace) = local_hcf_run(&field, &data, &[0], &LocalHcfOptions::default()).unwrap();
        assert_eq!(config.as_slice(), &[1]);
        assert_eq!(trace.iterations(), 1);
        assert_eq!(trace.steps, 2);
    }

    #[test]
    fn tied_uncommitted_sites_commit() {
        let field = Field::new(
            LabelSet::new(2).unwrap(),
            vec![vec![1], vec![0, 2], vec![1]],
            vec![Clique::pair(0, 1, vec![0.0; 4]), Clique::pair(1, 2, vec![0.0; 4])],
        )
        .unwrap();
        let data = DataTerm::zeros(3, 2);
        let (config, _) = local_hcf_run(&field, &data, &[0, 1, 2], &LocalHcfOptions::default()).unwrap();
        assert!(config.is_fully_committed());
    }

    #[test]
    fn threads_match_sequential() {
        let (field, data) = make_chain_fixture();
        let ranks = assign_ranks(8, RankMode::Seeded(3));
        let seq = local_hcf_run(&field, &data, &ranks, &LocalHcfOptions::default()).unwrap();
        for threads in [0, 2, 4] {
            let opts = LocalHcfOptions {
                threads,
                ..LocalHcfOptions::default()
            };
            assert_eq!(local_hcf_run(&field, &data, &ranks, &opts).unwrap(), seq);
        }
    }
}
