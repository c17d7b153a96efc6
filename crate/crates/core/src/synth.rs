//! Seeded random instances for experiments and tests.

use rand::Rng as _;

use crate::mrf::{Clique, DataTerm, Field, LabelSet};
use crate::rng;

fn uniform_table(r: &mut rng::Rng, len: usize, half_width: f64) -> Vec<f64> {
    (0..len).map(|_| r.random_range(-half_width..half_width)).collect()
}

/// Path of `n` sites in id order with one random pair clique per link.
/// Potentials are uniform on [-1, 1), data on [-2, 2).
pub fn random_chain(n: usize, labels: u32, seed: u64) -> (Field, DataTerm) {
    assert!(n >= 1 && labels >= 1);
    let mut r = rng::stream(seed, rng::SYNTH_STREAM);
    let lc = labels as usize;
    let adjacency = (0..n)
        .map(|s| {
            let mut v = Vec::new();
            if s > 0 {
                v.push(s - 1);
            }
            if s + 1 < n {
                v.push(s + 1);
            }
            v
        })
        .collect();
    let cliques = (0..n.saturating_sub(1))
        .map(|s| Clique::pair(s, s + 1, uniform_table(&mut r, lc * lc, 1.0)))
        .collect();
    let data = DataTerm::new(labels, uniform_table(&mut r, n * lc, 2.0)).expect("finite");
    let field = Field::new(LabelSet::new(labels).expect("labels"), adjacency, cliques).expect("chain");
    (field, data)
}

/// Random graph on `n` sites: each pair is linked with probability
/// `edge_prob` and gets a pair clique; every triangle found gets a triple
/// clique with probability 1/2; some sites get a unary clique. Potentials
/// are uniform on [-1, 1), data on [-2, 2).
pub fn random_field(n: usize, labels: u32, edge_prob: f64, seed: u64) -> (Field, DataTerm) {
    assert!(n >= 1 && labels >= 1);
    let mut r = rng::stream(seed, rng::SYNTH_STREAM);
    let lc = labels as usize;
    let mut adjacency = vec![Vec::new(); n];
    let mut cliques = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(edge_prob) {
                adjacency[a].push(b);
                adjacency[b].push(a);
                cliques.push(Clique::pair(a, b, uniform_table(&mut r, lc * lc, 1.0)));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let tri = adjacency[a].contains(&b) && adjacency[a].contains(&c) && adjacency[b].contains(&c);
                if tri && r.random_bool(0.5) {
                    cliques.push(Clique::new(vec![a, b, c], uniform_table(&mut r, lc * lc * lc, 1.0)));
                }
            }
        }
    }
    for s in 0..n {
        if r.random_bool(0.3) {
            cliques.push(Clique::unary(s, uniform_table(&mut r, lc, 1.0)));
        }
    }
    let data = DataTerm::new(labels, uniform_table(&mut r, n * lc, 2.0)).expect("finite");
    let field = Field::new(LabelSet::new(labels).expect("labels"), adjacency, cliques).expect("field");
    (field, data)
}
