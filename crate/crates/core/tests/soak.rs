// One-off soak (not part of the committed suite): broad randomized stress of
// the mixed solver, including extreme detector rates and near-degenerate
// priors. Run with: cargo test --test soak -- --ignored --nocapture
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigev_core::analytic::cb_constants;
use sigev_core::game::{DetectorModel, GameSpec, PayoffTable, Prior};
use sigev_core::numeric::{solve_mixed_pbe, verify_pbe, SolveOptions};

#[test]
#[ignore]
fn soak_mixed_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(987654321);
    let start = std::time::Instant::now();
    let mut count = 0usize;
    let mut eq_total = 0usize;
    while count < 20_000 {
        let mut u = || rng.random_range(-25.0..25.0);
        let payoffs = PayoffTable::new([[u(), u()], [u(), u()]], [[u(), u()], [u(), u()]]).unwrap();
        // stratified priors: plain uniform, near-degenerate, exact degenerate
        let p0: f64 = match rng.random_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            2 => rng.random_range(0.0..1e-6),
            3 => 1.0 - rng.random_range(0.0..1e-6),
            _ => rng.random_range(0.0..1.0),
        };
        let (cb0, cb1) = cb_constants(&payoffs);
        if (p0 * cb0 - (1.0 - p0) * cb1).abs() < 1e-6 {
            continue;
        }
        // stratified detectors: interior, conservative, aggressive, omnipotent,
        // weak-ish, inverted (eps < del), asymmetric table
        let det = match rng.random_range(0..8) {
            0 => DetectorModel::symmetric(1.0, rng.random_range(0.0..1.0)).unwrap(),
            1 => DetectorModel::symmetric(rng.random_range(0.0..1.0), 0.0).unwrap(),
            2 => DetectorModel::symmetric(1.0, 0.0).unwrap(),
            3 => {
                let r = rng.random_range(0.0..1.0);
                DetectorModel::symmetric(r, r).unwrap()
            }
            4 => DetectorModel::symmetric(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))
                .unwrap(),
            5 => DetectorModel::from_lambda1([
                [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
                [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
            ])
            .unwrap(),
            6 => DetectorModel::symmetric(rng.random_range(0.0..0.05), rng.random_range(0.95..1.0))
                .unwrap(),
            _ => {
                let a: f64 = rng.random_range(0.0..1.0);
                let b: f64 = rng.random_range(0.0..1.0);
                DetectorModel::symmetric(a.max(b), a.min(b)).unwrap()
            }
        };
        count += 1;
        let spec = GameSpec::new(payoffs, Prior::new(p0).unwrap(), Some(det));
        match solve_mixed_pbe(&spec, &SolveOptions::default()) {
            Ok(eqs) => {
                eq_total += eqs.len();
                for eq in &eqs {
                    let v = verify_pbe(&spec, eq, 1e-9);
                    assert!(v.pass, "game {count} verify fail: {:?}\n{}", v.failures, spec.to_json());
                }
            }
            Err(e) => panic!("game {count}: {e}\n{}", spec.to_json()),
        }
        // no-evidence side every 4th game
        if count % 4 == 0 {
            let plain = GameSpec::new(payoffs, Prior::new(p0).unwrap(), None);
            match solve_mixed_pbe(&plain, &SolveOptions::default()) {
                Ok(eqs) => {
                    for eq in &eqs {
                        assert!(verify_pbe(&plain, eq, 1e-9).pass);
                    }
                }
                Err(e) => panic!("plain game {count}: {e}\n{}", plain.to_json()),
            }
        }
    }
    println!("soak: 20000 evidence + 5000 plain games, {eq_total} equilibria, {:?}", start.elapsed());
}
