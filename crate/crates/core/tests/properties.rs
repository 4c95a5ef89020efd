//! Property tests for the game-core primitives and the detector mapping.

use proptest::prelude::*;

use sigev_core::game::{
    expected_utilities, posterior_from_evidence, posterior_from_message, DetectorModel, GameSpec,
    PayoffTable, Posterior, Prior, ReceiverStrategy, SenderStrategy,
};

fn prob() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn payoff() -> impl Strategy<Value = f64> {
    -25.0..25.0f64
}

prop_compose! {
    fn arb_payoffs()(
        s in prop::array::uniform4(payoff()),
        r in prop::array::uniform4(payoff()),
    ) -> PayoffTable {
        PayoffTable::new([[s[0], s[1]], [s[2], s[3]]], [[r[0], r[1]], [r[2], r[3]]]).unwrap()
    }
}

prop_compose! {
    fn arb_sender()(s0 in prob(), s1 in prob()) -> SenderStrategy {
        SenderStrategy::new(s0, s1).unwrap()
    }
}

prop_compose! {
    fn arb_detector()(l in prop::array::uniform4(prob())) -> DetectorModel {
        DetectorModel::from_lambda1([[l[0], l[1]], [l[2], l[3]]]).unwrap()
    }
}

prop_compose! {
    fn arb_receiver_ev()(a in prop::array::uniform4(prob())) -> ReceiverStrategy {
        ReceiverStrategy::with_evidence([[a[0], a[1]], [a[2], a[3]]]).unwrap()
    }
}

proptest! {
    /// Every posterior is a probability, for any strategy, prior and kernel.
    #[test]
    fn posteriors_stay_in_unit_interval(
        p0 in prob(),
        sender in arb_sender(),
        det in arb_detector(),
        mu in prob(),
    ) {
        let spec = GameSpec::new(
            PayoffTable::new([[0.0; 2]; 2], [[0.0; 2]; 2]).unwrap(),
            Prior::new(p0).unwrap(),
            None,
        );
        for n in 0..2 {
            if let Posterior::OnPath(x) = posterior_from_message(&spec, &sender, n) {
                prop_assert!((0.0..=1.0).contains(&x));
            }
            for e in 0..2 {
                if let Posterior::OnPath(x) = posterior_from_evidence(&det, mu, n, e) {
                    prop_assert!((0.0..=1.0).contains(&x));
                }
            }
        }
    }

    /// Bayes plausibility: posteriors average back to the prior under the
    /// message marginals.
    #[test]
    fn posteriors_average_to_prior(p0 in prob(), sender in arb_sender()) {
        let spec = GameSpec::new(
            PayoffTable::new([[0.0; 2]; 2], [[0.0; 2]; 2]).unwrap(),
            Prior::new(p0).unwrap(),
            None,
        );
        let mut avg = 0.0;
        for n in 0..2 {
            let marginal = spec.prior.p0() * sender.prob(n, 0) + spec.prior.p1() * sender.prob(n, 1);
            match posterior_from_message(&spec, &sender, n) {
                Posterior::OnPath(mu) => avg += marginal * mu,
                Posterior::OffPath => prop_assert!(marginal == 0.0),
            }
        }
        prop_assert!((avg - spec.prior.p1()).abs() < 1e-12);
    }

    /// Two-step collapse: a kernel that does not depend on the type leaves
    /// every on-path belief unchanged.
    #[test]
    fn type_independent_evidence_is_uninformative(
        mu in prob(),
        c0 in prob(),
        c1 in prob(),
    ) {
        let det = DetectorModel::from_lambda1([[c0, c1], [c0, c1]]).unwrap();
        for n in 0..2 {
            for e in 0..2 {
                if let Posterior::OnPath(out) = posterior_from_evidence(&det, mu, n, e) {
                    prop_assert!((out - mu).abs() < 1e-12);
                }
            }
        }
    }

    /// The closed-form expectation equals the brute-force sum over all 16
    /// (type, message, evidence, action) outcomes.
    #[test]
    fn expected_utilities_match_brute_force(
        payoffs in arb_payoffs(),
        p0 in prob(),
        sender in arb_sender(),
        det in arb_detector(),
        receiver in arb_receiver_ev(),
    ) {
        let spec = GameSpec::new(payoffs, Prior::new(p0).unwrap(), Some(det));
        let (u_s, u_r) = expected_utilities(&spec, &sender, &receiver).unwrap();
        let mut b_s = 0.0;
        let mut b_r = 0.0;
        for m in 0..2 {
            for n in 0..2 {
                for e in 0..2 {
                    for y in 0..2 {
                        let act1 = receiver.act1(n, e);
                        let p = spec.prior.p(m)
                            * sender.prob(n, m)
                            * det.lam(e, m, n)
                            * if y == 1 { act1 } else { 1.0 - act1 };
                        b_s += p * payoffs.sender_u(y, m);
                        b_r += p * payoffs.receiver_u(y, m);
                    }
                }
            }
        }
        prop_assert!((u_s - b_s).abs() < 1e-12);
        prop_assert!((u_r - b_r).abs() < 1e-12);
    }

    /// The two exact relabelings of the evidence game. Swapping eps and delta
    /// is a message relabeling (payoffs are message-independent), and
    /// complementing both rates is an evidence relabeling; under the matching
    /// strategy re-indexing the expected utilities are identical.
    #[test]
    fn relabel_symmetries_preserve_utilities(
        payoffs in arb_payoffs(),
        p0 in prob(),
        sender in arb_sender(),
        receiver in arb_receiver_ev(),
        eps in prob(),
        del in prob(),
    ) {
        let spec = |e, d| GameSpec::new(
            payoffs,
            Prior::new(p0).unwrap(),
            Some(DetectorModel::symmetric(e, d).unwrap()),
        );
        let base = expected_utilities(&spec(eps, del), &sender, &receiver).unwrap();

        // Message relabel n -> 1-n: swap (eps, del), flip the sender, swap
        // the receiver's message index.
        let flipped_sender = SenderStrategy::new(1.0 - sender.sig1(0), 1.0 - sender.sig1(1)).unwrap();
        let n_flipped = ReceiverStrategy::with_evidence([
            [receiver.act1(1, 0), receiver.act1(1, 1)],
            [receiver.act1(0, 0), receiver.act1(0, 1)],
        ]).unwrap();
        let swapped = expected_utilities(&spec(del, eps), &flipped_sender, &n_flipped).unwrap();
        prop_assert!((base.0 - swapped.0).abs() < 1e-12);
        prop_assert!((base.1 - swapped.1).abs() < 1e-12);

        // Evidence relabel e -> 1-e: complement both rates, swap the
        // receiver's evidence index.
        let e_flipped = ReceiverStrategy::with_evidence([
            [receiver.act1(0, 1), receiver.act1(0, 0)],
            [receiver.act1(1, 1), receiver.act1(1, 0)],
        ]).unwrap();
        let complement =
            expected_utilities(&spec(1.0 - eps, 1.0 - del), &sender, &e_flipped).unwrap();
        prop_assert!((base.0 - complement.0).abs() < 1e-12);
        prop_assert!((base.1 - complement.1).abs() < 1e-12);
    }
}

mod solver_props {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use sigev_core::analytic::{cb_constants, omnipotent_equilibria};
    use sigev_core::game::{DetectorModel, GameSpec, PayoffTable, Prior};
    use sigev_core::numeric::{solve_mixed_pbe, SolveOptions};

    /// With a perfect detector the numeric solver's utilities agree with the
    /// complete-information analysis, payoffs unrestricted.
    #[test]
    fn omnipotent_solver_agreement_on_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(360);
        let mut done = 0;
        while done < 100 {
            let mut u = || rng.random_range(-25.0..25.0);
            let payoffs =
                PayoffTable::new([[u(), u()], [u(), u()]], [[u(), u()], [u(), u()]]).unwrap();
            let p0: f64 = rng.random_range(0.0..1.0);
            let (cb0, cb1) = cb_constants(&payoffs);
            if (p0 * cb0 - (1.0 - p0) * cb1).abs() < 1e-6 {
                continue;
            }
            done += 1;
            let spec = GameSpec::new(
                payoffs,
                Prior::new(p0).unwrap(),
                Some(DetectorModel::symmetric(1.0, 0.0).unwrap()),
            );
            let analytic = omnipotent_equilibria(&spec).unwrap();
            for eq in solve_mixed_pbe(&spec, &SolveOptions::default()).unwrap() {
                assert!(
                    analytic.iter().any(|a| {
                        (a.utilities.sender - eq.utilities.sender).abs() < 1e-9
                            && (a.utilities.receiver - eq.utilities.receiver).abs() < 1e-9
                    }),
                    "utilities {:?} not in the analytic set\n{}",
                    eq.utilities,
                    spec.to_json()
                );
            }
        }
    }
}

mod detector_props {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use sigev_core::detector::{rates_from_threshold, Threshold, TimingModel};

    /// With equal stddevs, thresholds at or beyond the equal-density crossing
    /// (the midpoint) keep 0 <= delta <= eps <= 1.
    #[test]
    fn rates_ordered_beyond_crossing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mu0 = rng.random_range(-50.0..50.0);
            let gap = rng.random_range(0.1..40.0);
            let sigma = rng.random_range(0.1..15.0);
            let model = TimingModel::new(mu0, sigma, mu0 + gap, sigma).unwrap();
            let midpoint = mu0 + 0.5 * gap;
            let t = midpoint + rng.random_range(0.0..30.0);
            let (delta, epsilon) = rates_from_threshold(&model, Threshold::new(t).unwrap());
            assert!((0.0..=1.0).contains(&delta));
            assert!((0.0..=1.0).contains(&epsilon));
            assert!(delta <= epsilon + 1e-15, "delta {delta} > epsilon {epsilon}");
        }
    }

    /// Monte Carlo agreement within 3 standard errors (smaller sample than
    /// the acceptance run; same estimator).
    #[test]
    fn rates_agree_with_monte_carlo() {
        let model = TimingModel::new(40.0, 7.0, 65.0, 12.0).unwrap();
        let t_d = 52.0;
        let (delta, epsilon) = rates_from_threshold(&model, Threshold::new(t_d).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5150);
        let n = 200_000usize;
        let mut sample = |mu: f64, sigma: f64| -> f64 {
            let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            mu + sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let mut hits0 = 0;
        let mut hits1 = 0;
        for _ in 0..n {
            if sample(40.0, 7.0) > t_d {
                hits0 += 1;
            }
            if sample(65.0, 12.0) > t_d {
                hits1 += 1;
            }
        }
        let se = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
        assert!((delta - hits0 as f64 / n as f64).abs() <= 3.0 * se(delta));
        assert!((epsilon - hits1 as f64 / n as f64).abs() <= 3.0 * se(epsilon));
    }
}
