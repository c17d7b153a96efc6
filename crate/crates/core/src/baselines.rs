//! Comparison estimators: likelihood thresholding, ICM, simulated annealing
//! and Monte Carlo MPM.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{MrfError, Result};
use crate::mrf::{
    augmented_energy, check_estimator_inputs, energy, local_energies_into, Configuration, DataTerm,
    Field, Label,
};
use crate::rng::{self, Rng};
use crate::stability::eval_from_energies;
use crate::trace::RunTrace;

/// Per-site argmin of the data term, ignoring all cliques. Ties go to the
/// smallest label.
pub fn tlr(field: &Field, data: &DataTerm) -> Configuration {
    let labels = (0..field.num_sites())
        .map(|s| {
            let row = data.site(s);
            let mut best = 0;
            for (l, &v) in row.iter().enumerate().skip(1) {
                if v < row[best] {
                    best = l;
                }
            }
            best as Label
        })
        .collect();
    Configuration::from_labels(labels)
}

fn require_committed(field: &Field, data: &DataTerm, init: &Configuration) -> Result<()> {
    check_estimator_inputs(field, data)?;
    init.check_against(field)?;
    if let Some(site) = init.first_uncommitted() {
        return Err(MrfError::Uncommitted { site });
    }
    Ok(())
}

/// Site visiting order for ICM sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcmOrder {
    Scan,
    /// A fresh seeded permutation per sweep.
    Random(u64),
}

/// Iterated conditional modes.
///
/// Sites are visited in `order` and updated in place. A site only moves when
/// another label is strictly better, so a sweep without changes leaves a
/// single-flip local minimum. One trace row per sweep that changed something.
pub fn icm_run(
    field: &Field,
    data: &DataTerm,
    init: &Configuration,
    order: IcmOrder,
    max_sweeps: Option<usize>,
) -> Result<(Configuration, RunTrace)> {
    require_committed(field, data, init)?;
    let n = field.num_sites();
    let cap = max_sweeps.unwrap_or_else(|| crate::hcf::default_cap(field));
    let mut config = init.clone();
    let mut trace = RunTrace::starting_at(energy(field, data, &config)?, n);
    let mut visit: Vec<usize> = (0..n).collect();
    let mut rng = match order {
        IcmOrder::Random(seed) => Some(rng::stream(seed, rng::ICM_STREAM)),
        IcmOrder::Scan => None,
    };
    let mut scratch = Vec::new();
    loop {
        if trace.steps >= cap {
            return Err(MrfError::IterationCap { cap });
        }
        if let Some(r) = rng.as_mut() {
            visit.shuffle(r);
        }
        let mut changed = 0;
        for &s in &visit {
            local_energies_into(field, data, config.as_slice(), s, &mut scratch);
            let eval = eval_from_energies(&scratch, config.get(s));
            if eval.stability < 0.0 {
                config.set(s, eval.best);
                changed += 1;
            }
        }
        trace.steps += 1;
        if changed == 0 {
            break;
        }
        trace.push(energy(field, data, &config)?, n, changed);
    }
    Ok((config, trace))
}

/// Geometric cooling: sweep `k` runs at `t0 * alpha^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub alpha: f64,
    pub sweeps: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            t0: 2.0,
            alpha: 0.95,
            sweeps: 500,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(MrfError::InvalidParameter(format!(
                "initial temperature must be positive, got {}",
                self.t0
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(MrfError::InvalidParameter(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Temperature of sweep `k`, floored at the smallest positive normal.
    pub fn temperature(&self, k: usize) -> f64 {
        let t = self.t0 * self.alpha.powi(k.min(i32::MAX as usize) as i32);
        t.max(f64::MIN_POSITIVE)
    }
}

/// Draws a label with probability proportional to `exp(-E(l) / t)`.
fn sample_label(energies: &[f64], t: f64, rng: &mut Rng, weights: &mut Vec<f64>) -> Label {
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    weights.clear();
    weights.extend(energies.iter().map(|&e| (-(e - min) / t).exp()));
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (l, &w) in weights.iter().enumerate() {
        if u < w {
            return l as Label;
        }
        u -= w;
    }
    // rounding left u just above the last weight; take the last positive one
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0) as Label
}

/// One Gibbs sweep in scan order; returns the number of sites that moved.
fn gibbs_sweep(
    field: &Field,
    data: &DataTerm,
    config: &mut Configuration,
    t: f64,
    rng: &mut Rng,
    energies: &mut Vec<f64>,
    weights: &mut Vec<f64>,
) -> usize {
    let mut changed = 0;
    for s in 0..field.num_sites() {
        local_energies_into(field, data, config.as_slice(), s, energies);
        let l = sample_label(energies, t, rng, weights);
        if l != config.get(s) {
            config.set(s, l);
            changed += 1;
        }
    }
    changed
}

/// Simulated annealing with a Gibbs sampler. Returns the lowest-energy
/// configuration seen (including `init`); the trace follows the chain.
pub fn anneal_run(
    field: &Field,
    data: &DataTerm,
    init: &Configuration,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<(Configuration, RunTrace)> {
    require_committed(field, data, init)?;
    schedule.validate()?;
    let n = field.num_sites();
    let mut rng = rng::stream(seed, rng::ANNEAL_STREAM);
    let mut config = init.clone();
    let mut best = config.clone();
    let mut best_energy = energy(field, data, &config)?;
    let mut trace = RunTrace::starting_at(best_energy, n);
    let (mut energies, mut weights) = (Vec::new(), Vec::new());
    for k in 0..schedule.sweeps {
        let t = schedule.temperature(k);
        let changed = gibbs_sweep(field, data, &mut config, t, &mut rng, &mut energies, &mut weights);
        let e = augmented_energy(field, data, &config);
        if e < best_energy {
            best_energy = e;
            best.clone_from(&config);
        }
        trace.push(e, n, changed);
    }
    trace.steps = schedule.sweeps;
    Ok((best, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MpmParams {
    pub burn_in: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MpmParams {
    fn default() -> Self {
        Self {
            burn_in: 50,
            samples: 200,
            seed: 0,
        }
    }
}

/// Full MPM output, including the empirical marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct MpmResult {
    pub config: Configuration,
    /// Row-major `num_sites x label_count` label frequencies.
    pub marginals: Vec<f64>,
    pub trace: RunTrace,
}

/// Gibbs sampling at temperature 1 with per-site label tallies.
pub fn mpm_sample(field: &Field, data: &DataTerm, init: &Configuration, params: &MpmParams) -> Result<MpmResult> {
    require_committed(field, data, init)?;
    if params.samples == 0 {
        return Err(MrfError::InvalidParameter("MPM needs at least one sample sweep".into()));
    }
    let n = field.num_sites();
    let lc = field.label_count() as usize;
    let mut rng = rng::stream(params.seed, rng::MPM_STREAM);
    let mut config = init.clone();
    let mut trace = RunTrace::starting_at(energy(field, data, &config)?, n);
    let mut counts = vec![0u64; n * lc];
    let (mut energies, mut weights) = (Vec::new(), Vec::new());
    for sweep in 0..params.burn_in + params.samples {
        let changed = gibbs_sweep(field, data, &mut config, 1.0, &mut rng, &mut energies, &mut weights);
        if sweep >= params.burn_in {
            for (s, &l) in config.as_slice().iter().enumerate() {
                counts[s * lc + l as usize] += 1;
            }
        }
        trace.push(augmented_energy(field, data, &config), n, changed);
    }
    trace.steps = params.burn_in + params.samples;
    let labels = counts
        .chunks(lc)
        .map(|row| {
            let mut best = 0;
            for (l, &c) in row.iter().enumerate().skip(1) {
                if c > row[best] {
                    best = l;
                }
            }
            best as Label
        })
        .collect();
    let marginals = counts
        .iter()
        .map(|&c| c as f64 / params.samples as f64)
        .collect();
    Ok(MpmResult {
        config: Configuration::from_labels(labels),
        marginals,
        trace,
    })
}

/// Maximizer of posterior marginals: per-site most frequent label.
pub fn mpm_run(
    field: &Field,
    data: &DataTerm,
    init: &Configuration,
    params: &MpmParams,
) -> Result<(Configuration, RunTrace)> {
    let r = mpm_sample(field, data, init, params)?;
    Ok((r.config, r.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{make_chain_fixture, EDGE, NON_EDGE};
    use crate::mrf::{Clique, LabelSet};
    use crate::oracle::{brute_force_map, is_local_minimum};

    const E: Label = EDGE;
    const N: Label = NON_EDGE;

    fn single(d: [f64; 2]) -> (Field, DataTerm) {
        (
            Field::new(LabelSet::new(2).unwrap(), vec![vec![]], vec![]).unwrap(),
            DataTerm::new(2, d.to_vec()).unwrap(),
        )
    }

    #[test]
    fn tlr_cases() {
        let (field, data) = make_chain_fixture();
        assert_eq!(tlr(&field, &data).as_slice(), &[E, N, N, N, N, E, N, N]);
        assert_eq!(tlr(&field, &DataTerm::zeros(8, 2)), Configuration::uniform(8, 0));
        let (f, d) = single([3.0, 1.0]);
        assert_eq!(tlr(&f, &d).as_slice(), &[1]);
    }

    #[test]
    fn icm_keeps_global_minimum() {
        let (field, data) = make_chain_fixture();
        let map = brute_force_map(&field, &data).unwrap();
        for order in [IcmOrder::Scan, IcmOrder::Random(4)] {
            let (out, trace) = icm_run(&field, &data, &map.config, order, None).unwrap();
            assert_eq!(out, map.config);
            assert_eq!(trace.iterations(), 0);
        }
    }

    #[test]
    fn icm_single_site() {
        let (f, d) = single([3.0, 1.0]);
        let (out, _) = icm_run(&f, &d, &Configuration::uniform(1, 0), IcmOrder::Scan, None).unwrap();
        assert_eq!(out.as_slice(), &[1]);
    }

    #[test]
    fn icm_from_tlr_on_chain() {
        let (field, data) = make_chain_fixture();
        let init = tlr(&field, &data);
        let (out, trace) = icm_run(&field, &data, &init, IcmOrder::Scan, None).unwrap();
        assert!(energy(&field, &data, &out).unwrap() <= energy(&field, &data, &init).unwrap());
        assert!(is_local_minimum(&field, &data, &out).unwrap());
        assert!(trace.rows.windows(2).all(|w| w[1].energy <= w[0].energy));
    }

    #[test]
    fn icm_rejects_uncommitted() {
        let (field, data) = make_chain_fixture();
        let init = Configuration::uncommitted(8);
        assert!(matches!(
            icm_run(&field, &data, &init, IcmOrder::Scan, None),
            Err(MrfError::Uncommitted { site: 0 })
        ));
    }

    #[test]
    fn anneal_zero_sweeps_returns_init() {
        let (field, data) = make_chain_fixture();
        let init = tlr(&field, &data);
        let schedule = AnnealSchedule { sweeps: 0, ..AnnealSchedule::default() };
        assert_eq!(anneal_run(&field, &data, &init, &schedule, 1).unwrap().0, init);
    }

    #[test]
    fn anneal_is_seeded() {
        let (field, data) = make_chain_fixture();
        let init = tlr(&field, &data);
        let s = AnnealSchedule { sweeps: 50, ..AnnealSchedule::default() };
        assert_eq!(
            anneal_run(&field, &data, &init, &s, 11).unwrap(),
            anneal_run(&field, &data, &init, &s, 11).unwrap()
        );
    }

    #[test]
    fn anneal_finds_chain_optimum() {
        let (field, data) = make_chain_fixture();
        let init = tlr(&field, &data);
        let best = (0..10)
            .map(|seed| {
                let (c, _) = anneal_run(&field, &data, &init, &AnnealSchedule::default(), seed).unwrap();
                energy(&field, &data, &c).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, -6.0);
    }

    #[test]
    fn anneal_rejects_bad_schedule() {
        let (field, data) = make_chain_fixture();
        let init = tlr(&field, &data);
        for s in [
            AnnealSchedule { t0: 0.0, ..AnnealSchedule::default() },
            AnnealSchedule { alpha: 1.0, ..AnnealSchedule::default() },
            AnnealSchedule { t0: f64::NAN, ..AnnealSchedule::default() },
        ] {
            assert!(matches!(
                anneal_run(&field, &data, &init, &s, 0),
                Err(MrfError::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn frozen_sweep_acts_like_icm_scan() {
        let (field, data) = make_chain_fixture();
        let init = tlr(&field, &data);
        let cold = AnnealSchedule { t0: 1e-12, alpha: 1e-3, sweeps: 1 };
        let (_, trace) = anneal_run(&field, &data, &init, &cold, 5).unwrap();
        // one frozen sweep equals one ICM scan sweep
        let mut manual = init.clone();
        let mut scratch = Vec::new();
        for s in 0..8 {
            local_energies_into(&field, &data, manual.as_slice(), s, &mut scratch);
            let ev = eval_from_energies(&scratch, manual.get(s));
            if ev.stability < 0.0 {
                manual.set(s, ev.best);
            }
        }
        assert_eq!(trace.rows[1].energy, energy(&field, &data, &manual).unwrap());
    }

    #[test]
    fn mpm_strong_data() {
        let (f, d) = single([0.0, 10.0]);
        let p = MpmParams { burn_in: 5, samples: 100, seed: 2 };
        let (c, _) = mpm_run(&f, &d, &Configuration::uniform(1, 1), &p).unwrap();
        assert_eq!(c.as_slice(), &[0]);
        assert_eq!(
            mpm_run(&f, &d, &Configuration::uniform(1, 1), &p).unwrap(),
            mpm_run(&f, &d, &Configuration::uniform(1, 1), &p).unwrap()
        );
        let zero = MpmParams { samples: 0, ..p };
        assert!(mpm_run(&f, &d, &Configuration::uniform(1, 1), &zero).is_err());
    }

    #[test]
    fn mpm_symmetric_pair() {
        let field = Field::new(
            LabelSet::new(2).unwrap(),
            vec![vec![1], vec![0]],
            vec![Clique::pair(0, 1, vec![-0.3, 0.2, 0.2, -0.3])],
        )
        .unwrap();
        let data = DataTerm::new(2, vec![0.0, 0.4, 0.0, 0.4]).unwrap();
        let exact = crate::oracle::exact_marginals(&field, &data, 1.0).unwrap();
        assert_eq!(exact[0..2], exact[2..4]);
        let p = MpmParams { burn_in: 100, samples: 20_000, seed: 8 };
        let r = mpm_sample(&field, &data, &Configuration::uniform(2, 0), &p).unwrap();
        assert_eq!(r.config.get(0), r.config.get(1));
        for s in 0..2 {
            assert!((r.marginals[2 * s] - exact[2 * s]).abs() < 0.03);
        }
    }
}
