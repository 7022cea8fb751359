use ideal_core::analytics::{
    pivot_analysis, ppc_p_value, quantile, summarize, summarize_values, ParameterSummary,
};
use ideal_core::data::{filter_matrix, LegislatorMeta, MotionMeta};
use ideal_core::draws::{ChainDraws, DrawsMeta};
use ideal_core::identify::orient_draws;
use ideal_core::model::{log_likelihood, vote_probability};
use ideal_core::party::{party_log_likelihood, PartyModelParameters};
use ideal_core::{ModelParameters, ParamIndex, PosteriorDraws, RollCallMatrix, SamplerConfig, Vote};
use proptest::prelude::*;

fn vote_strategy(missing: bool) -> impl Strategy<Value = Vote> {
    let weights = if missing { 1 } else { 0 };
    prop_oneof![
        3 => Just(Vote::Yea),
        3 => Just(Vote::Nay),
        weights => Just(Vote::Missing),
    ]
}

fn matrix_strategy(missing: bool) -> impl Strategy<Value = RollCallMatrix> {
    (2usize..9, 1usize..9).prop_flat_map(move |(n, m)| {
        prop::collection::vec(prop::collection::vec(vote_strategy(missing), m), n).prop_map(
            move |rows| {
                RollCallMatrix::from_rows(
                    (0..n).map(|i| LegislatorMeta::new(format!("L{i}"))).collect(),
                    (0..m).map(|j| MotionMeta::new(format!("M{j}"))).collect(),
                    rows,
                )
                .unwrap()
            },
        )
    })
}

fn params_for(n: usize, m: usize, d: usize) -> impl Strategy<Value = ModelParameters> {
    (
        prop::collection::vec(-3.0f64..3.0, m),
        prop::collection::vec(-3.0f64..3.0, m * d),
        prop::collection::vec(-3.0f64..3.0, n * d),
    )
        .prop_map(move |(mu, alpha, beta)| ModelParameters::new(d, mu, alpha, beta).unwrap())
}

fn matrix_and_params(d: usize) -> impl Strategy<Value = (RollCallMatrix, ModelParameters)> {
    matrix_strategy(true).prop_flat_map(move |mat| {
        let (n, m) = (mat.n(), mat.m());
        (Just(mat), params_for(n, m, d))
    })
}

/// Draws object holding the given parameter states as one chain per entry.
fn draws_from(states: &[Vec<ModelParameters>]) -> PosteriorDraws {
    let first = &states[0][0];
    let (n, m, d) = (first.n(), first.m(), first.d());
    let chains = states
        .iter()
        .map(|chain| ChainDraws {
            iterations: (1..=chain.len()).collect(),
            mu: chain.iter().flat_map(|p| p.mu.clone()).collect(),
            alpha: chain.iter().flat_map(|p| p.alpha.clone()).collect(),
            beta: chain.iter().flat_map(|p| p.beta.clone()).collect(),
            delta: None,
        })
        .collect();
    PosteriorDraws {
        meta: DrawsMeta {
            n,
            m,
            d,
            legislator_ids: (0..n).map(|i| format!("L{i}")).collect(),
            motion_ids: (0..m).map(|j| format!("M{j}")).collect(),
            anchored: vec![false; n],
            config: SamplerConfig {
                iterations: states[0].len(),
                burn_in: 0,
                thin: 1,
                chains: states.len(),
                seed: 0,
                d,
            },
            group: None,
        },
        chains,
        wall_time_secs: 0.0,
        jitter_events: 0,
        notes: Vec::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn filter_without_participation_threshold_is_idempotent(mat in matrix_strategy(true)) {
        if let Ok((once, _)) = filter_matrix(&mat, 0.0, true) {
            let (twice, report) = filter_matrix(&once, 0.0, true).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(report.is_empty());
        }
    }

    #[test]
    fn filter_is_idempotent_on_complete_matrices(
        mat in matrix_strategy(false),
        threshold in 0.0f64..1.0,
    ) {
        if let Ok((once, _)) = filter_matrix(&mat, threshold, true) {
            let (twice, report) = filter_matrix(&once, threshold, true).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(report.is_empty());
        }
    }

    #[test]
    fn filter_only_removes_rows_and_columns(
        mat in matrix_strategy(true),
        threshold in 0.0f64..1.0,
        drop_unanimous in any::<bool>(),
    ) {
        if let Ok((out, report)) = filter_matrix(&mat, threshold, drop_unanimous) {
            prop_assert_eq!(report.n_after, out.n());
            prop_assert_eq!(report.m_after, out.m());
            for i in 0..out.n() {
                let src_i = mat.legislator_index(&out.legislators()[i].id).unwrap();
                for j in 0..out.m() {
                    let src_j = mat.motions().iter().position(|mo| mo.id == out.motions()[j].id).unwrap();
                    prop_assert_eq!(out.vote(i, j), mat.vote(src_i, src_j));
                }
            }
            for j in 0..out.m() {
                let (yea, nay) = out.motion_tally(j);
                prop_assert!(yea + nay > 0);
                if drop_unanimous {
                    prop_assert!(yea > 0 && nay > 0);
                }
            }
        }
    }

    #[test]
    fn likelihood_is_rotation_invariant(
        (mat, params) in matrix_and_params(2),
        theta in 0.0f64..std::f64::consts::TAU,
        reflect in any::<bool>(),
    ) {
        let (c, s) = (theta.cos(), theta.sin());
        let sign = if reflect { -1.0 } else { 1.0 };
        // Q = [[c, -s], [sign·s, sign·c]] is orthogonal.
        let rotate = |v: &[f64]| -> Vec<f64> {
            v.chunks(2).flat_map(|x| [c * x[0] - s * x[1], sign * (s * x[0] + c * x[1])]).collect()
        };
        let rotated = ModelParameters::new(2, params.mu.clone(), rotate(&params.alpha), rotate(&params.beta)).unwrap();
        let a = log_likelihood(&mat, &params).unwrap();
        let b = log_likelihood(&mat, &rotated).unwrap();
        prop_assert!(a.is_finite());
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn vote_probability_increases_in_mu(
        mu in -8.0f64..8.0,
        step in 1e-3f64..2.0,
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let lo = vote_probability(mu, &[alpha], &[beta]).unwrap();
        let hi = vote_probability(mu + step, &[alpha], &[beta]).unwrap();
        prop_assert!(hi >= lo);
        // Strict where the change is representable in double precision.
        let eta = mu + alpha * beta;
        if eta.abs() < 5.0 && (eta + step).abs() < 5.0 {
            prop_assert!(hi > lo);
        }
    }

    #[test]
    fn likelihood_finite_for_extreme_parameters(
        mat in matrix_strategy(true),
        scale in 1.0f64..1e3,
    ) {
        let (n, m) = (mat.n(), mat.m());
        let p = ModelParameters::new(1, vec![scale; m], vec![-scale; m], vec![scale; n]).unwrap();
        prop_assert!(log_likelihood(&mat, &p).unwrap().is_finite());
    }

    #[test]
    fn orient_preserves_every_draw_likelihood(
        (mat, p0) in matrix_and_params(2),
        signs in prop::collection::vec(prop_oneof![Just(-1.0), Just(1.0)], 2),
    ) {
        let flipped = ModelParameters::new(
            2,
            p0.mu.clone(),
            p0.alpha.iter().map(|a| -a).collect(),
            p0.beta.iter().map(|b| -b).collect(),
        ).unwrap();
        let draws = draws_from(&[vec![p0.clone(), flipped.clone()], vec![flipped, p0]]);
        let oriented = orient_draws(&draws, "L1", &signs).unwrap();
        for c in 0..2 {
            for t in 0..2 {
                let before = log_likelihood(&mat, &draws.parameters(c, t)).unwrap();
                let after = log_likelihood(&mat, &oriented.parameters(c, t)).unwrap();
                prop_assert!(((before - after) / before.abs().max(1e-300)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn significance_survives_reflection(values in prop::collection::vec(-5.0f64..5.0, 20..200)) {
        let s = summarize_values(ParamIndex::Mu(0), String::new(), &values, 0.95);
        let neg: Vec<f64> = values.iter().map(|v| -v).collect();
        let r = summarize_values(ParamIndex::Mu(0), String::new(), &neg, 0.95);
        prop_assert_eq!(s.significant, r.significant);
        prop_assert!((s.ci_lower + r.ci_upper).abs() < 1e-12);
        prop_assert!((s.ci_upper + r.ci_lower).abs() < 1e-12);
    }

    #[test]
    fn ppc_p_value_is_antitone(
        reps in prop::collection::vec(-3.0f64..3.0, 1..300),
        a in -4.0f64..4.0,
        b in -4.0f64..4.0,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(ppc_p_value(lo, &reps) >= ppc_p_value(hi, &reps));
    }

    #[test]
    fn pivot_occupancy_sums_to_one(
        draws in (2usize..7, 1usize..30).prop_flat_map(|(n, t)| {
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, n), t)
        }),
        rank_frac in 0.0f64..1.0,
    ) {
        let n = draws[0].len();
        let states: Vec<ModelParameters> = draws
            .into_iter()
            .map(|beta| ModelParameters::new(1, Vec::new(), Vec::new(), beta).unwrap())
            .collect();
        let rank = 1 + ((n - 1) as f64 * rank_frac) as usize;
        let post = draws_from(&[states]);
        let report = &pivot_analysis(&post, &[rank]).unwrap()[0];
        let count: usize = report.occupancy.iter().map(|o| o.count).sum();
        prop_assert_eq!(count, report.draws_used);
        let total: f64 = report.occupancy.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_is_monotone_and_bounded(
        mut values in prop::collection::vec(-10.0f64..10.0, 1..100),
        p in 0.0f64..1.0,
        q in 0.0f64..1.0,
    ) {
        values.sort_by(f64::total_cmp);
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let (a, b) = (quantile(&values, lo), quantile(&values, hi));
        prop_assert!(a <= b);
        prop_assert!(values[0] <= a && b <= values[values.len() - 1]);
    }

    #[test]
    fn party_group_shift_is_unidentified(
        (mat, base) in matrix_and_params(1),
        c in -2.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let (n, m) = (mat.n(), mat.m());
        let group: Vec<u8> = (0..n).map(|i| ((seed >> (i % 64)) & 1) as u8).collect();
        let delta: Vec<f64> = (0..m).map(|j| (j as f64 * 0.7).sin()).collect();
        let p = PartyModelParameters::new(base.clone(), delta.clone(), group.clone()).unwrap();
        let beta: Vec<f64> = base.beta.iter().zip(&group).map(|(b, &g)| b + c * f64::from(g)).collect();
        let shifted_delta: Vec<f64> = delta.iter().zip(&base.alpha).map(|(dl, a)| dl - a * c).collect();
        let q = PartyModelParameters::new(
            ModelParameters::new(1, base.mu.clone(), base.alpha.clone(), beta).unwrap(),
            shifted_delta,
            group,
        ).unwrap();
        let a = party_log_likelihood(&mat, &p).unwrap();
        let b = party_log_likelihood(&mat, &q).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn interval_need_not_contain_mean_for_skewed_draws() {
    let draws = [0.0, 0.0, 0.0, 0.0, 100.0];
    let s = summarize_values(ParamIndex::Mu(0), String::new(), &draws, 0.5);
    assert_eq!(s.mean, 20.0);
    assert_eq!((s.ci_lower, s.ci_upper), (0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_contains_mean_for_symmetric_draws(
        values in prop::collection::vec(-5.0f64..5.0, 100..300),
        level in 0.5f64..0.99,
    ) {
        // Symmetrized sample: the mean is the median.
        let mut all = values.clone();
        all.extend(values.iter().map(|v| -v));
        let s: ParameterSummary = summarize_values(ParamIndex::Mu(0), String::new(), &all, level);
        prop_assert!(s.ci_lower <= s.mean + 1e-12 && s.mean <= s.ci_upper + 1e-12);
    }
}

#[test]
fn summarize_covers_every_parameter() {
    let p = ModelParameters::new(1, vec![0.0, 1.0], vec![1.0, -1.0], vec![0.5, -0.5, 0.0]).unwrap();
    let draws = draws_from(&[vec![p; 120]]);
    assert_eq!(summarize(&draws, 0.9).unwrap().len(), 2 + 2 + 3);
}
