//! Exact answers for small instances: exhaustive MAP, dynamic programming on
//! chains, single-flip local-minimum checks and exact marginals.
//!
//! Ties are broken towards the lexicographically smallest configuration,
//! comparing sites in id order and preferring label 0.

use crate::error::{MrfError, Result};
use crate::mrf::{check_estimator_inputs, energy, Configuration, DataTerm, Field, Label, UNCOMMITTED};

/// Largest number of configurations [`brute_force_map`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 24;

/// Absolute slack allowed by [`is_local_minimum`].
pub const LOCAL_MIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub config: Configuration,
    pub energy: f64,
    /// Number of configurations attaining exactly `energy`.
    pub optimal_count: u64,
}

fn configuration_count(field: &Field) -> f64 {
    (field.label_count() as f64).powi(field.num_sites() as i32)
}

fn check_size(field: &Field) -> Result<()> {
    let count = configuration_count(field);
    if count > BRUTE_FORCE_LIMIT as f64 {
        return Err(MrfError::TooLarge {
            labels: field.label_count(),
            sites: field.num_sites(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(())
}

/// Visits every fully committed configuration in lexicographic order.
fn for_each_config(field: &Field, mut f: impl FnMut(&Configuration)) {
    let n = field.num_sites();
    let lc = field.label_count();
    let mut config = Configuration::uniform(n, 0);
    loop {
        f(&config);
        // odometer increment, last site fastest
        let mut s = n;
        loop {
            if s == 0 {
                return;
            }
            s -= 1;
            let next = config.get(s) + 1;
            if next < lc {
                config.set(s, next);
                break;
            }
            config.set(s, 0);
        }
    }
}

/// Exhaustive MAP search. Refuses fields with more than
/// [`BRUTE_FORCE_LIMIT`] configurations.
pub fn brute_force_map(field: &Field, data: &DataTerm) -> Result<OracleResult> {
    data.check_against(field)?;
    check_size(field)?;
    let mut best: Option<(Configuration, f64)> = None;
    let mut ties = 0u64;
    for_each_config(field, |c| {
        let e = energy(field, data, c).expect("enumerated configurations are committed");
        match &best {
            Some((_, b)) if e > *b => {}
            Some((_, b)) if e == *b => ties += 1,
            _ => {
                best = Some((c.clone(), e));
                ties = 1;
            }
        }
    });
    let (config, energy) = best.expect("at least one configuration");
    Ok(OracleResult {
        config,
        energy,
        optimal_count: ties,
    })
}

/// Sites of a simple path, starting from the endpoint with the smaller id.
fn path_order(field: &Field) -> Result<Vec<usize>> {
    let n = field.num_sites();
    if n == 1 {
        return if field.neighbors(0).is_empty() {
            Ok(vec![0])
        } else {
            Err(MrfError::NotAChain("a lone site has neighbors".into()))
        };
    }
    let mut ends = Vec::new();
    for s in 0..n {
        match field.neighbors(s).len() {
            1 => ends.push(s),
            2 => {}
            d => return Err(MrfError::NotAChain(format!("site {s} has {d} neighbors"))),
        }
    }
    if ends.len() != 2 {
        return Err(MrfError::NotAChain(format!("{} endpoints", ends.len())));
    }
    let mut order = vec![ends[0]];
    let mut prev = usize::MAX;
    let mut cur = ends[0];
    while order.len() < n {
        let next = field.neighbors(cur).iter().copied().find(|&r| r != prev);
        match next {
            Some(r) if !order.contains(&r) => {
                order.push(r);
                prev = cur;
                cur = r;
            }
            _ => return Err(MrfError::NotAChain("neighborhood graph is disconnected".into())),
        }
    }
    Ok(order)
}

fn first_argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0usize, f64::INFINITY);
    for (l, v) in values.enumerate() {
        if v < best.1 {
            best = (l, v);
        }
    }
    best.0
}

/// Exact MAP for fields whose neighborhood graph is a simple path and whose
/// cliques are unary or pairs of path neighbors.
///
/// Cost-to-go is computed from the far end, then labels are chosen from the
/// near end taking the smallest optimal label each time. When site ids run
/// along the path this reproduces [`brute_force_map`]'s tie-break. Ties are
/// counted with exact comparisons in the DP's own summation order.
pub fn chain_dp_map(field: &Field, data: &DataTerm) -> Result<OracleResult> {
    check_estimator_inputs(field, data).or_else(|e| match e {
        MrfError::SingleLabel => Ok(()),
        e => Err(e),
    })?;
    let order = path_order(field)?;
    let n = order.len();
    let lc = field.label_count() as usize;
    let mut position = vec![0usize; n];
    for (i, &s) in order.iter().enumerate() {
        position[s] = i;
    }

    // unary[i][l]: data plus unary cliques at path position i
    // pair[i][a * lc + b]: cliques between positions i and i + 1
    let mut unary: Vec<Vec<f64>> = order.iter().map(|&s| data.site(s).to_vec()).collect();
    let mut pair = vec![vec![0.0; lc * lc]; n.saturating_sub(1)];
    for (c, clique) in field.cliques().iter().enumerate() {
        match *clique.members() {
            [s] => {
                for (l, u) in unary[position[s]].iter_mut().enumerate() {
                    *u += clique.table()[l];
                }
            }
            [a, b] => {
                let (pa, pb) = (position[a], position[b]);
                let (lo, flipped) = match pb.checked_sub(pa) {
                    Some(1) => (pa, false),
                    _ if pa.checked_sub(pb) == Some(1) => (pb, true),
                    _ => {
                        return Err(MrfError::NotAChain(format!(
                            "clique {c} joins sites that are not path neighbors"
                        )))
                    }
                };
                for x in 0..lc {
                    for y in 0..lc {
                        let v = if flipped {
                            clique.table()[y * lc + x]
                        } else {
                            clique.table()[x * lc + y]
                        };
                        pair[lo][x * lc + y] += v;
                    }
                }
            }
            _ => {
                return Err(MrfError::NotAChain(format!(
                    "clique {c} has {} members",
                    clique.members().len()
                )))
            }
        }
    }

    // cost[i][l]: best energy of positions i..n given label l at i
    // ways[i][l]: number of labelings of i..n achieving cost[i][l]
    let mut cost = vec![vec![0.0; lc]; n];
    let mut ways = vec![vec![1u64; lc]; n];
    cost[n - 1].clone_from(&unary[n - 1]);
    for i in (0..n - 1).rev() {
        for x in 0..lc {
            let steps: Vec<f64> = (0..lc).map(|y| pair[i][x * lc + y] + cost[i + 1][y]).collect();
            let tail = steps.iter().copied().fold(f64::INFINITY, f64::min);
            cost[i][x] = unary[i][x] + tail;
            ways[i][x] = (0..lc)
                .filter(|&y| steps[y] == tail)
                .fold(0u64, |acc, y| acc.saturating_add(ways[i + 1][y]));
        }
    }
    let best = cost[0].iter().copied().fold(f64::INFINITY, f64::min);
    let optimal_count = (0..lc)
        .filter(|&x| cost[0][x] == best)
        .fold(0u64, |acc, x| acc.saturating_add(ways[0][x]));
    let mut labels = vec![UNCOMMITTED; n];
    let mut prev = first_argmin(cost[0].iter().copied());
    labels[order[0]] = prev as Label;
    for i in 1..n {
        let p = &pair[i - 1];
        let next = first_argmin((0..lc).map(|y| p[prev * lc + y] + cost[i][y]));
        labels[order[i]] = next as Label;
        prev = next;
    }
    let config = Configuration::from_labels(labels);
    let e = energy(field, data, &config)?;
    Ok(OracleResult {
        config,
        energy: e,
        optimal_count,
    })
}

/// True iff no single-site label change lowers the energy by more than
/// [`LOCAL_MIN_TOLERANCE`]. Each candidate is scored with a full energy
/// evaluation.
pub fn is_local_minimum(field: &Field, data: &DataTerm, config: &Configuration) -> Result<bool> {
    data.check_against(field)?;
    config.check_against(field)?;
    let base = energy(field, data, config)?;
    let mut probe = config.clone();
    for s in 0..field.num_sites() {
        let own = config.get(s);
        for l in field.labels().iter().filter(|&l| l != own) {
            probe.set(s, l);
            if energy(field, data, &probe)? < base - LOCAL_MIN_TOLERANCE {
                return Ok(false);
            }
        }
        probe.set(s, own);
    }
    Ok(true)
}

/// Exact marginals of `P(w) ~ exp(-U(w) / temperature)` by enumeration,
/// row-major `num_sites x label_count`.
pub fn exact_marginals(field: &Field, data: &DataTerm, temperature: f64) -> Result<Vec<f64>> {
    data.check_against(field)?;
    check_size(field)?;
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(MrfError::InvalidParameter(format!("temperature {temperature}")));
    }
    let lc = field.label_count() as usize;
    let mut energies = Vec::new();
    for_each_config(field, |c| energies.push(energy(field, data, c).expect("committed")));
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut marginals = vec![0.0; field.num_sites() * lc];
    let mut z = 0.0;
    let mut k = 0;
    for_each_config(field, |c| {
        let w = (-(energies[k] - min) / temperature).exp();
        k += 1;
        z += w;
        for (s, &l) in c.as_slice().iter().enumerate() {
            marginals[s * lc + l as usize] += w;
        }
    });
    marginals.iter_mut().for_each(|m| *m /= z);
    Ok(marginals)
}
