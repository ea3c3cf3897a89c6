use climbrank::copula::{rank_values, sample_gaussian_pairs, sample_rank_field, tau_to_rho, CorrelationSpec};
use climbrank::montecarlo::{
    conditional_rank_distribution, conditional_win_probability, expected_score_by_placement, run_simulation, Condition,
    RoundSize, SimulationConfig,
};
use climbrank::stats::{kendall_tau, PairedRanks};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tau_u32(x: &[u32], y: &[u32]) -> f64 {
    kendall_tau(&PairedRanks::from_ranks(x, y).unwrap()).unwrap()
}

fn simulate(round: RoundSize, tau: f64, reps: usize, seed: u64) -> climbrank::montecarlo::ReplicateSet {
    run_simulation(&SimulationConfig::new(
        round,
        CorrelationSpec::new(tau).unwrap(),
        reps,
        seed,
    ))
    .unwrap()
}

#[test]
fn copula_reproduces_target_tau() {
    let set = simulate(RoundSize::Qualification, 0.5, 10_000, 3);
    let mean_bl: f64 = set
        .replicates
        .iter()
        .map(|r| tau_u32(&r.field.boulder, &r.field.lead))
        .sum::<f64>()
        / 10_000.0;
    let mean_sb: f64 = set
        .replicates
        .iter()
        .map(|r| tau_u32(&r.field.speed, &r.field.boulder))
        .sum::<f64>()
        / 10_000.0;
    assert!((mean_bl - 0.5).abs() < 0.02, "boulder/lead tau {mean_bl}");
    assert!(mean_sb.abs() < 0.02, "speed/boulder tau {mean_sb}");
}

#[test]
fn ranking_preserves_tau_of_latent_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rho = tau_to_rho(0.3).unwrap();
    for _ in 0..50 {
        let pairs = sample_gaussian_pairs(20, rho, &mut rng);
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let raw = kendall_tau(&PairedRanks::new(a.clone(), b.clone()).unwrap()).unwrap();
        assert!((raw - tau_u32(&rank_values(&a), &rank_values(&b))).abs() < 1e-12);
    }
}

#[test]
fn marginal_ranks_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 8;
    let reps = 40_000;
    let mut counts = [[0usize; 8]; 3];
    for _ in 0..reps {
        let f = sample_rank_field(n, CorrelationSpec::new(0.6).unwrap(), &mut rng).unwrap();
        counts[0][f.speed[0] as usize - 1] += 1;
        counts[1][f.boulder[0] as usize - 1] += 1;
        counts[2][f.lead[0] as usize - 1] += 1;
    }
    for row in counts {
        for c in row {
            assert!((c as f64 / reps as f64 - 0.125).abs() < 0.01);
        }
    }
}

#[test]
fn perfect_correlation_shares_boulder_and_lead() {
    let set = simulate(RoundSize::Final, 1.0, 200, 1);
    assert!(set.replicates.iter().all(|r| r.field.boulder == r.field.lead));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = SimulationConfig::new(RoundSize::Final, CorrelationSpec::new(0.4).unwrap(), 3_000, 77);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let set = run_simulation(&cfg).unwrap();
            (
                conditional_rank_distribution(&set, Condition::WonBoulderOrLead),
                expected_score_by_placement(&set),
                set,
            )
        })
    };
    let (d1, s1, set1) = run(1);
    let (d4, s4, set4) = run(4);
    assert_eq!(set1, set4);
    assert_eq!(d1, d4);
    assert_eq!(s1, s4);
}

#[test]
fn different_seeds_differ() {
    let a = simulate(RoundSize::Final, 0.4, 50, 1);
    let b = simulate(RoundSize::Final, 0.4, 50, 2);
    assert_ne!(a.replicates, b.replicates);
}

#[test]
fn independent_disciplines_are_interchangeable() {
    let set = simulate(RoundSize::Final, 0.0, 10_000, 21);
    let s = conditional_win_probability(&set, Condition::WonSpeed);
    for c in [Condition::WonBoulder, Condition::WonLead, Condition::WonBoulderOrLead] {
        assert!((conditional_win_probability(&set, c) - s).abs() < 0.02, "{c:?}");
    }
}

#[test]
fn boulder_or_lead_advantage_grows_with_tau() {
    let mut last = 0.0;
    for tau in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let set = simulate(RoundSize::Final, tau, 5_000, 8);
        let p = conditional_win_probability(&set, Condition::WonBoulderOrLead);
        assert!(p >= last - 0.02, "tau {tau}: {p} after {last}");
        last = p;
    }
}

#[test]
fn distribution_and_scores_are_well_formed() {
    let set = simulate(RoundSize::Qualification, 0.3, 2_000, 4);
    for c in Condition::ALL {
        let t = conditional_rank_distribution(&set, c);
        assert_eq!(t.probabilities.len(), 20);
        assert!((t.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(*t.cumulative.last().unwrap(), 1.0);
        assert!(t.cumulative.windows(2).all(|w| w[0] <= w[1]));
    }
    let scores = expected_score_by_placement(&set);
    assert!(scores.windows(2).all(|w| w[0].mean < w[1].mean));
    assert!(scores
        .iter()
        .all(|s| s.lower <= s.mean && s.mean <= s.upper && s.mean >= 1.0));
    let total: usize = scores.iter().map(|s| s.count).sum();
    assert_eq!(total, 2_000 * 20);
}
