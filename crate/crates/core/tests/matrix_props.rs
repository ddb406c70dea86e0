use blockra_core::algorithms::{block_ra1, block_ra2, standard_ra, BlockRaConfig};
use blockra_core::depmeasure::spearman;
use blockra_core::matrix::RearrangementMatrix;
use blockra_core::mcmc::{mcmc_block_ra, McmcConfig};
use blockra_core::oracle::shuffle_columns;
use blockra_core::partition::all_canonical;
use blockra_core::stats::{sample_covariance, sample_variance};
use proptest::prelude::*;

fn matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = RearrangementMatrix> {
    (2..=max_m, 2..=max_n).prop_flat_map(|(m, n)| {
        prop::collection::vec(-10.0f64..10.0, m * n)
            .prop_map(move |data| RearrangementMatrix::from_column_major(m, n, data).unwrap())
    })
}

fn sorted_columns(x: &RearrangementMatrix) -> Vec<Vec<u64>> {
    x.columns()
        .map(|c| {
            let mut v: Vec<f64> = c.to_vec();
            v.sort_by(f64::total_cmp);
            v.into_iter().map(f64::to_bits).collect()
        })
        .collect()
}

fn non_increasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0]))
}

fn cfg(seed: u64) -> BlockRaConfig {
    BlockRaConfig { seed, max_sweeps: 50, ..BlockRaConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn margins_survive_every_operation(x in matrix(12, 6), seed in any::<u64>()) {
        let before = sorted_columns(&x);
        for p in all_canonical(x.n()) {
            let mut y = x.clone();
            y.countermonotone_rearrange(&p).unwrap();
            prop_assert_eq!(&sorted_columns(&y), &before);
        }
        let mut y = x.clone();
        for j in 0..x.n() {
            y.countermonotone_column(j).unwrap();
        }
        prop_assert_eq!(&sorted_columns(&y), &before);
        let rev: Vec<usize> = (0..x.m()).rev().collect();
        prop_assert_eq!(&sorted_columns(&x.with_permuted_column(0, &rev).unwrap()), &before);
        prop_assert_eq!(&sorted_columns(&shuffle_columns(&x, seed)), &before);
        prop_assert_eq!(&sorted_columns(&standard_ra(&x, &cfg(seed)).unwrap().final_matrix), &before);
        prop_assert_eq!(&sorted_columns(&block_ra2(&x, &cfg(seed)).unwrap().final_matrix), &before);
        prop_assert_eq!(&sorted_columns(&block_ra1(&x, &cfg(seed)).unwrap().final_matrix), &before);
        let chain = McmcConfig { n_iter: 200, seed, ..McmcConfig::default() };
        prop_assert_eq!(&sorted_columns(&mcmc_block_ra(&x, &chain).unwrap().best_matrix), &before);
    }

    #[test]
    fn variance_decomposes_over_any_partition(x in matrix(15, 7)) {
        let total = x.variance();
        for p in all_canonical(x.n()) {
            let (a, b) = x.partition_sums(&p).unwrap();
            let parts = sample_variance(&a) + sample_variance(&b) + 2.0 * sample_covariance(&a, &b);
            let scale = 1.0 + sample_variance(&a) + sample_variance(&b);
            prop_assert!((total - parts).abs() <= 1e-10 * scale, "{} vs {}", total, parts);
        }
    }

    #[test]
    fn countermonotone_step_never_raises_variance(x in matrix(12, 6)) {
        for p in all_canonical(x.n()) {
            let y = x.countermonotone_rearranged(&p).unwrap();
            prop_assert!(y.variance() <= x.variance() + 1e-12 * (1.0 + x.variance()));
            prop_assert!(y.is_countermonotone(&p).unwrap());
        }
    }

    #[test]
    fn variance_traces_are_monotone(x in matrix(12, 7), seed in any::<u64>()) {
        let ra = standard_ra(&x, &cfg(seed)).unwrap();
        let b2 = block_ra2(&x, &cfg(seed)).unwrap();
        let b1 = block_ra1(&x, &cfg(seed)).unwrap();
        for run in [&ra, &b2, &b1] {
            prop_assert!(non_increasing(&run.variance_trace), "{:?}", run.variance_trace);
            prop_assert!(run.final_objective <= x.variance() + 1e-12 * (1.0 + x.variance()));
            prop_assert_eq!(run.final_objective, run.final_matrix.variance());
        }
    }

    #[test]
    fn permutation_inverse_round_trips(x in matrix(10, 4), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = blockra_core::rng::seeded(seed);
        let mut sigma: Vec<usize> = (0..x.m()).collect();
        sigma.shuffle(&mut rng);
        let mut inv = vec![0; x.m()];
        for (i, &s) in sigma.iter().enumerate() {
            inv[s] = i;
        }
        let y = x.with_permuted_column(1, &sigma).unwrap().with_permuted_column(1, &inv).unwrap();
        prop_assert_eq!(y, x);
    }
}

#[test]
fn distinct_sums_become_exactly_countermonotone() {
    // integer-valued columns chosen so block sums never tie
    let cols: Vec<Vec<f64>> = vec![
        vec![1.0, 4.0, 9.0, 16.0, 25.0, 36.0],
        vec![100.0, 300.0, 200.0, 600.0, 500.0, 400.0],
        vec![7000.0, 3000.0, 1000.0, 2000.0, 6000.0, 5000.0],
    ];
    let x = RearrangementMatrix::from_columns(&cols).unwrap();
    for p in all_canonical(3) {
        let y = x.countermonotone_rearranged(&p).unwrap();
        let (a, b) = y.partition_sums(&p).unwrap();
        assert_eq!(spearman(&a, &b).unwrap(), -1.0);
    }
}

#[test]
fn bra_runs_terminate_on_larger_inputs() {
    let x = blockra_core::oracle::uniform_start(50, 8, 3).unwrap();
    let run = block_ra2(&x, &BlockRaConfig { seed: 1, ..BlockRaConfig::default() }).unwrap();
    assert!(run.sweeps < BlockRaConfig::default().max_sweeps);
    assert!(run.final_objective < x.variance());
}
