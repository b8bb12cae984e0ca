use super::*;

fn table_one(delta_rao: u32, m: u32) -> SystemConfig {
    SystemConfig { delta_rao, m, ..SystemConfig::default() }
}

fn seconds(system: SystemConfig, secs: u64, seed: u64) -> SimConfig {
    SimConfig::new(system, secs * 1000).with_seed(seed)
}

#[test]
fn zero_load_reports_undefined_outage() {
    let s = run(&seconds(table_one(5, 9), 2, 1), 0.0).unwrap();
    assert_eq!(s.arrivals, 0);
    assert_eq!(s.transmissions, 0);
    assert!(!s.outage_defined);
    assert_eq!(s.outage_fraction, 0.0);
}

#[test]
fn rejects_invalid_input() {
    let mut cfg = seconds(table_one(5, 9), 1, 0);
    assert!(run(&cfg, -1.0).is_err());
    assert!(run(&cfg, f64::NAN).is_err());
    cfg.warmup = cfg.duration;
    assert!(run(&cfg, 1.0).is_err());
    let bad = SimConfig::new(SystemConfig { d: 0, ..table_one(5, 9) }, 1000);
    assert!(run(&bad, 1.0).is_err());
    assert!(run_replications(&seconds(table_one(5, 9), 1, 0), 1.0, 1).is_err());
}

#[test]
fn identical_seed_is_bit_identical() {
    let cfg = seconds(table_one(5, 9), 5, 42);
    assert_eq!(run(&cfg, 2.0).unwrap(), run(&cfg, 2.0).unwrap());
}

#[test]
fn replications_use_distinct_streams() {
    let cfg = seconds(table_one(5, 9), 2, 42);
    let summary = run_replications(&cfg, 2.0, 2).unwrap();
    assert_ne!(summary.reps[0], summary.reps[1]);
    assert_eq!(summary.reps[0], run_stream(&cfg, 2.0, 0).unwrap());
    assert_eq!(summary.reps[1], run_stream(&cfg, 2.0, 1).unwrap());
    let other_seed = run(&cfg.with_seed(43), 2.0).unwrap();
    assert_ne!(summary.reps[0], other_seed);
}

#[test]
fn every_packet_is_accounted_for() {
    for (lambda, delta, m) in [(0.3, 5, 9), (2.0, 5, 9), (2.6, 1, 9), (4.0, 5, 9), (1.0, 1, 0)] {
        let s = run(&seconds(table_one(delta, m), 10, 3), lambda).unwrap();
        assert!(s.arrivals > 0);
        assert_eq!(s.arrivals, s.connects + s.drops + s.in_flight, "lambda {lambda}");
        assert_eq!(s.completed(), s.connects + s.drops);
        if s.outage_defined {
            assert_eq!(s.outage_fraction, s.drops as f64 / s.completed() as f64);
        }
        assert!(s.mean_tx >= 1.0 && s.mean_tx <= f64::from(m + 1));
    }
}

#[test]
fn grant_and_preamble_caps_hold() {
    let sys = SystemConfig { d: 6, ..table_one(5, 9) };
    for lambda in [0.5, 3.0, 10.0] {
        let s = run(&seconds(sys, 5, 9), lambda).unwrap();
        assert!(s.max_grants_per_subframe <= sys.mu);
        assert!(s.max_activations_per_rao <= sys.d);
    }
    let s = run(&seconds(table_one(1, 9), 5, 9), 5.0).unwrap();
    assert_eq!(s.max_grants_per_subframe, 3);
}

#[test]
fn no_contention_means_no_outage() {
    // Preambles never clash and the grant queue never fills.
    let sys = SystemConfig { d: 1_000_000_000, mu: 1000, ..table_one(5, 9) };
    let s = run(&seconds(sys, 10, 5), 3.0).unwrap();
    assert!(s.connects > 20_000);
    assert_eq!(s.drops, 0);
    assert_eq!(s.collided_transmissions, 0);
    assert_eq!(s.failures.total(), 0);
    assert_eq!(s.mean_tx, 1.0);
}

#[test]
fn single_shot_outage_is_the_per_ue_collision_at_low_load() {
    // With m = 0 and an idle grant queue, a packet fails exactly when
    // another UE picks its preamble in the same RAO.
    let sys = table_one(5, 0);
    let lambda = 0.1;
    let summary = run_replications(&seconds(sys, 400, 8), lambda, 4).unwrap();
    let exact = -(-lambda * 5.0 / 54.0f64).exp_m1();
    let o = summary.outage;
    assert!((o.mean - exact).abs() < 4.0 * o.std_err.max(1e-4), "{o:?} vs {exact}");
}

#[test]
fn collisions_and_expiries_are_separated() {
    let small_d = SystemConfig { d: 2, ..table_one(5, 0) };
    let s = run(&seconds(small_d, 5, 2), 0.3).unwrap();
    assert!(s.failures.msg3_collision > 0);
    assert_eq!(s.failures.rar_expired, 0);

    let no_clash = SystemConfig { d: 1_000_000_000, ..table_one(1, 0) };
    let s = run(&seconds(no_clash, 5, 2), 4.0).unwrap();
    assert!(s.failures.rar_expired > 0);
    assert_eq!(s.failures.msg3_collision, 0);
    assert!(s.grants_expired > 0);
}

#[test]
fn observed_rates_track_offered_load() {
    let s = run(&seconds(table_one(5, 9), 20, 4), 0.5).unwrap();
    assert!((s.lambda_t - 0.5).abs() < 0.03, "{}", s.lambda_t);
    assert!(s.lambda_a <= s.lambda_t);
}

#[test]
fn outage_blows_up_at_2250_per_second() {
    let summary = run_replications(&seconds(table_one(5, 9), 300, 1), 2.25, 4).unwrap();
    assert!(summary.outage.mean >= 0.1, "{:?}", summary.outage);
}

#[test]
fn confidence_interval_narrows_with_more_replications() {
    let cfg = seconds(table_one(5, 9), 2, 6);
    let few = run_replications(&cfg, 1.5, 4).unwrap();
    let many = run_replications(&cfg, 1.5, 64).unwrap();
    let width = |e: &Estimate| e.ci_high - e.ci_low;
    assert!(width(&many.lambda_t) < width(&few.lambda_t));
}
