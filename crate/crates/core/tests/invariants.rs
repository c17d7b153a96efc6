//! Property tests over random fields. Potentials and data are rounded to
//! multiples of 1/16 so that energy identities hold exactly.

use proptest::prelude::*;

use localhcf::baselines::{icm_run, tlr, IcmOrder};
use localhcf::hcf::{hcf_run, Hcf, HcfOptions};
use localhcf::local::{assign_ranks, local_hcf_run, local_hcf_step, LocalHcfOptions, RankMode};
use localhcf::oracle::{brute_force_map, is_local_minimum};
use localhcf::synth::random_field;
use localhcf::{
    augmented_energy, energy, local_energy, stability, validate_field, Clique, Configuration, DataTerm, Field,
    UNCOMMITTED,
};

fn dyadic(x: f64) -> f64 {
    (x * 16.0).round() / 16.0
}

fn dyadic_field(n: usize, labels: u32, seed: u64) -> (Field, DataTerm) {
    let (field, data) = random_field(n, labels, 0.4, seed);
    let cliques = field
        .cliques()
        .iter()
        .map(|c| Clique::new(c.members().to_vec(), c.table().iter().copied().map(dyadic).collect()))
        .collect();
    let field = Field::new(field.labels(), field.adjacency().to_vec(), cliques).unwrap();
    let data = DataTerm::new(labels, data.values().iter().copied().map(dyadic).collect()).unwrap();
    (field, data)
}

fn problem() -> impl Strategy<Value = (Field, DataTerm, u64)> {
    (2usize..14, 2u32..4, any::<u64>()).prop_map(|(n, l, seed)| {
        let (f, d) = dyadic_field(n, l, seed);
        (f, d, seed)
    })
}

/// A partial labeling: each site uncommitted or a random label.
fn partial(field: &Field, picks: &[u32]) -> Configuration {
    let lc = field.label_count();
    Configuration::from_labels(
        (0..field.num_sites())
            .map(|s| match picks[s % picks.len()] % (lc + 1) {
                l if l == lc => UNCOMMITTED,
                l => l,
            })
            .collect(),
    )
}

/// The field restricted to `keep`, with sites renumbered in order.
fn sub_field(field: &Field, data: &DataTerm, keep: &[usize]) -> (Field, DataTerm) {
    let mut index = vec![None; field.num_sites()];
    for (i, &s) in keep.iter().enumerate() {
        index[s] = Some(i);
    }
    let adjacency = keep
        .iter()
        .map(|&s| field.neighbors(s).iter().filter_map(|&t| index[t]).collect())
        .collect();
    let cliques = field
        .cliques()
        .iter()
        .filter_map(|c| {
            let members: Option<Vec<usize>> = c.members().iter().map(|&m| index[m]).collect();
            members.map(|m| Clique::new(m, c.table().to_vec()))
        })
        .collect();
    let rows: Vec<Vec<f64>> = keep.iter().map(|&s| data.site(s).to_vec()).collect();
    let sub = Field::new(field.labels(), adjacency, cliques).unwrap();
    (sub, DataTerm::from_rows(&rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_fields_are_valid((field, _data, _seed) in problem()) {
        prop_assert!(validate_field(&field).is_empty());
    }

    #[test]
    fn augmented_energy_is_energy_of_committed_sub_field(
        (field, data, _seed) in problem(),
        picks in prop::collection::vec(0u32..8, 1..20),
    ) {
        let config = partial(&field, &picks);
        let keep: Vec<usize> = (0..field.num_sites()).filter(|&s| config.is_committed(s)).collect();
        let augmented = augmented_energy(&field, &data, &config);
        if keep.is_empty() {
            prop_assert_eq!(augmented, 0.0);
        } else {
            let (sub, sub_data) = sub_field(&field, &data, &keep);
            let sub_config = Configuration::from_labels(keep.iter().map(|&s| config.get(s)).collect());
            prop_assert_eq!(augmented, energy(&sub, &sub_data, &sub_config).unwrap());
        }
    }

    #[test]
    fn local_energy_differences_match_energy(
        (field, data, _seed) in problem(),
        picks in prop::collection::vec(0u32..8, 1..20),
        site in any::<prop::sample::Index>(),
    ) {
        let config = partial(&field, &picks);
        let s = site.index(field.num_sites());
        let here = |l| local_energy(&field, &data, &config, s, l).unwrap();
        for l in field.labels().iter() {
            for k in field.labels().iter() {
                let delta = augmented_energy(&field, &data, &config.with(s, l))
                    - augmented_energy(&field, &data, &config.with(s, k));
                prop_assert_eq!(here(l) - here(k), delta);
            }
        }
        let g = stability(&field, &data, &config, s).unwrap();
        if config.is_committed(s) {
            let best_other = field.labels().iter().filter(|&l| l != config.get(s)).map(here).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(g, best_other - here(config.get(s)));
        } else {
            prop_assert!(g <= 0.0);
        }
    }

    #[test]
    fn per_site_data_shift_changes_nothing_but_energy(
        (field, data, seed) in problem(),
        shift in -8i32..8,
    ) {
        let c = shift as f64 / 4.0;
        let lc = field.label_count() as usize;
        let shifted: Vec<f64> = data
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| v + if (i / lc).is_multiple_of(2) { c } else { 0.0 })
            .collect();
        let shifted = DataTerm::new(field.label_count(), shifted).unwrap();
        let ranks = assign_ranks(field.num_sites(), RankMode::Seeded(seed));
        let opts = LocalHcfOptions::default();
        let (a, _) = local_hcf_run(&field, &data, &ranks, &opts).unwrap();
        let (b, _) = local_hcf_run(&field, &shifted, &ranks, &opts).unwrap();
        prop_assert_eq!(&a, &b);
        let (a, _) = hcf_run(&field, &data, &HcfOptions::default()).unwrap();
        let (b, _) = hcf_run(&field, &shifted, &HcfOptions::default()).unwrap();
        prop_assert_eq!(&a, &b);
        let touched = field.num_sites().div_ceil(2) as f64;
        prop_assert_eq!(energy(&field, &shifted, &a).unwrap(), energy(&field, &data, &a).unwrap() + c * touched);
    }

    #[test]
    fn local_hcf_steps_keep_invariants((field, data, seed) in problem()) {
        let ranks = assign_ranks(field.num_sites(), RankMode::Seeded(seed));
        let mut config = Configuration::uncommitted(field.num_sites());
        for _ in 0..1000 {
            let before = augmented_energy(&field, &data, &config);
            let any_negative = (0..field.num_sites())
                .any(|s| stability(&field, &data, &config, s).unwrap() < 0.0);
            let (next, step) = local_hcf_step(&field, &data, &config, &ranks).unwrap();
            if any_negative {
                prop_assert!(step.any_change);
            }
            if !step.any_change {
                break;
            }
            for (i, &a) in step.changed_sites.iter().enumerate() {
                for &b in &step.changed_sites[i + 1..] {
                    prop_assert!(!field.are_neighbors(a, b));
                }
            }
            for s in 0..field.num_sites() {
                prop_assert!(!config.is_committed(s) || next.is_committed(s));
            }
            if step.new_commits == 0 {
                let after = augmented_energy(&field, &data, &next);
                prop_assert!(after < before);
                prop_assert_eq!(after - before, step.changed_stabilities.iter().sum::<f64>());
            }
            prop_assert_eq!(step.energy_after, augmented_energy(&field, &data, &next));
            config = next;
        }
        prop_assert!(config.is_fully_committed());
        prop_assert!(is_local_minimum(&field, &data, &config).unwrap());
    }

    #[test]
    fn estimators_never_beat_the_optimum((field, data, seed) in problem()) {
        let best = brute_force_map(&field, &data).unwrap();
        let ranks = assign_ranks(field.num_sites(), RankMode::Seeded(seed));
        let (local, _) = local_hcf_run(&field, &data, &ranks, &LocalHcfOptions::default()).unwrap();
        let (serial, _) = hcf_run(&field, &data, &HcfOptions::default()).unwrap();
        let (icm, _) = icm_run(&field, &data, &tlr(&field, &data), IcmOrder::Random(seed), None).unwrap();
        for c in [&local, &serial, &icm] {
            prop_assert!(energy(&field, &data, c).unwrap() >= best.energy);
            prop_assert!(is_local_minimum(&field, &data, c).unwrap());
        }
        prop_assert!(is_local_minimum(&field, &data, &best.config).unwrap());
    }

    #[test]
    fn local_hcf_ignores_thread_count((field, data, seed) in problem(), threads in 2usize..5) {
        let ranks = assign_ranks(field.num_sites(), RankMode::Seeded(seed));
        let one = local_hcf_run(&field, &data, &ranks, &LocalHcfOptions::default()).unwrap();
        let many = local_hcf_run(&field, &data, &ranks, &LocalHcfOptions { threads, ..Default::default() }).unwrap();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn hcf_trace_energy_tracks_recomputation(n in 2usize..30, labels in 2u32..4, seed in any::<u64>()) {
        let (field, data) = random_field(n, labels, 0.4, seed);
        let mut hcf = Hcf::new(&field, &data, assign_ranks(n, RankMode::Seeded(seed))).unwrap();
        while let Some(step) = hcf.step() {
            let direct = augmented_energy(&field, &data, hcf.config());
            prop_assert!((direct - step.energy_after).abs() <= 1e-9, "{} vs {}", direct, step.energy_after);
        }
    }
}
