//! Release gate. Each test checks one shipping criterion and prints a single
//! verdict line; run `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria as well.

use ndarray::{Array2, Array3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tdsbm::analysis::{
    adjusted_rand_index, degree_identity_residual, label_blocks, param_count, sample_network,
    ModelKind, Role, RoleConfig,
};
use tdsbm::ingest::{clean_trips, parse_trips, CleaningPolicy, ColumnMap};
use tdsbm::seed::unit_rng;
use tdsbm::tdd::{
    fit_discrete, fit_static, mle_given_labels, profile_objective, KlConfig, DiscreteModel,
};
use tdsbm::tdmm::{fit, init_params, GdConfig, MixedModel};
use tdsbm::MultilayerNetwork;

fn criterion(number: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {number:>2} [{verdict}] {name}: {detail}");
    assert!(ok, "criterion {number} ({name}) failed: {detail}");
}

fn skip(number: u32, name: &str, detail: &str) {
    println!("criterion {number:>2} [SKIP] {name}: {detail}");
}

/// Random sparse network where every node is anchored with at least one
/// departure and one arrival, so degrees are positive under any labeling.
fn random_net(n: usize, t: usize, rng: &mut ChaCha8Rng) -> MultilayerNetwork {
    let mut cells = Vec::new();
    for i in 0..n {
        cells.push((i, (i + 1) % n, rng.gen_range(0..t), rng.gen_range(1u64..4)));
    }
    for _ in 0..rng.gen_range(2 * n..6 * n) {
        cells.push((
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(0..t),
            rng.gen_range(1u64..6),
        ));
    }
    MultilayerNetwork::new(n, t, cells).unwrap()
}

#[test]
fn c01_parameter_counts_match_the_published_table() {
    let tdmm = [426, 711, 1044, 1425, 1854];
    let tdd = [426, 545, 712, 927, 1190];
    let mut ok = true;
    for (i, k) in (2..=6).enumerate() {
        ok &= param_count(ModelKind::Tdmm, 166, k, 24).unwrap() == tdmm[i];
        ok &= param_count(ModelKind::Tdd, 166, k, 24).unwrap() == tdd[i];
        ok &= param_count(ModelKind::Static, 166, k, 24).unwrap() == tdd[i];
    }
    criterion(
        1,
        "parameter counts",
        ok,
        "all ten published values reproduced exactly for N=166, T=24, K=2..6",
    );
}

#[test]
fn c02_fitted_models_preserve_every_degree() {
    let mut worst = 0.0f64;
    for round in 0..100u64 {
        let mut rng = unit_rng(0xacc2, round);
        let n = rng.gen_range(2..=50);
        let t = 24;
        let k = rng.gen_range(1..=5).min(n);
        let net = random_net(n, t, &mut rng);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let residual = degree_identity_residual(&net, &labels).unwrap();
        worst = worst.max(residual);
    }
    criterion(
        2,
        "degree preservation",
        worst <= 1e-9,
        &format!("worst relative residual {worst:.3e} over 100 random networks (tolerance 1e-9)"),
    );
}

#[test]
fn c03_analytic_gradients_match_finite_differences() {
    let h = 1e-6;
    let mut rng = unit_rng(0xacc3, 0);
    // Light fixture: a small trip mass keeps |loglik| small, so the
    // difference quotient's cancellation noise stays far below tolerance.
    let mut cells = Vec::new();
    for i in 0..6 {
        cells.push((i, (i + 1) % 6, rng.gen_range(0..4), 1u64));
    }
    for _ in 0..8 {
        cells.push((
            rng.gen_range(0..6),
            rng.gen_range(0..6),
            rng.gen_range(0..4),
            rng.gen_range(1u64..3),
        ));
    }
    let net = MultilayerNetwork::new(6, 4, cells).unwrap();
    let mut worst_rel = 0.0f64;
    let mut smallest = f64::INFINITY;
    let mut ok = true;

    let mut check = |analytic: f64, fd: f64| {
        if analytic.abs() < 1e-8 {
            ok &= (analytic - fd).abs() <= 1e-8;
        } else {
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs());
            worst_rel = worst_rel.max(rel);
            smallest = smallest.min(analytic.abs());
            ok &= rel <= 1e-5;
        }
    };

    for point in 0..20u64 {
        let model = init_params(&net, 2, &mut unit_rng(0xacc3, point + 1));
        let (grad_c, grad_omega) = model.gradient(&net).unwrap();

        for i in 0..6 {
            for g in 0..2 {
                let mut plus = model.clone();
                plus.c[[i, g]] += h;
                let mut minus = model.clone();
                minus.c[[i, g]] -= h;
                let fd = (plus.log_likelihood(&net).unwrap()
                    - minus.log_likelihood(&net).unwrap())
                    / (2.0 * h);
                check(grad_c[[i, g]], fd);
            }
        }
        for g in 0..2 {
            for hh in 0..2 {
                for t in 0..4 {
                    let mut plus = model.clone();
                    plus.omega[[g, hh, t]] += h;
                    let mut minus = model.clone();
                    minus.omega[[g, hh, t]] -= h;
                    let fd = (plus.log_likelihood(&net).unwrap()
                        - minus.log_likelihood(&net).unwrap())
                        / (2.0 * h);
                    check(grad_omega[[g, hh, t]], fd);
                }
            }
        }
    }
    criterion(
        3,
        "gradient correctness",
        ok,
        &format!(
            "20 random points on N=6/K=2/T=4, worst relative error {worst_rel:.3e} \
             (tolerance 1e-5; smallest checked component {smallest:.3e})"
        ),
    );
}

#[test]
fn c04_rescaling_leaves_the_likelihood_unchanged() {
    let mut worst = 0.0f64;
    for round in 0..50u64 {
        let mut rng = unit_rng(0xacc4, round);
        let n = rng.gen_range(3..=16);
        let t = rng.gen_range(2..=8);
        let k = rng.gen_range(1..=4).min(n);
        let net = random_net(n, t, &mut rng);
        let mut model = init_params(&net, k, &mut rng);
        let before = model.log_likelihood(&net).unwrap();
        model.normalize();
        let after = model.log_likelihood(&net).unwrap();
        worst = worst.max((before - after).abs());
    }
    criterion(
        4,
        "rescaling equivalence",
        worst <= 1e-9,
        &format!("worst |loglik drift| {worst:.3e} across 50 random mixed models (tolerance 1e-9)"),
    );
}

#[test]
fn c05_closed_form_estimates_read_off_the_counts() {
    let mut omega_exact = true;
    let mut worst_theta = 0.0f64;
    for round in 0..10u64 {
        let mut rng = unit_rng(0xacc5, round);
        let n = rng.gen_range(4..=20);
        let t = rng.gen_range(2..=8);
        let k = rng.gen_range(1..=4).min(n);
        let net = random_net(n, t, &mut rng);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();

        let model = mle_given_labels(&net, &labels, k).unwrap();
        let counts = net.block_counts(&labels, k).unwrap();
        let summary = net.degree_summary();
        for (&w, &m) in model.omega.iter().zip(counts.m.iter()) {
            omega_exact &= w == m as f64;
        }
        for (i, &label) in labels.iter().enumerate() {
            let expected = summary.k[i] as f64 / counts.kappa[label] as f64;
            worst_theta = worst_theta.max((model.theta[i] - expected).abs());
        }
    }
    criterion(
        5,
        "closed-form estimates",
        omega_exact && worst_theta <= 1e-12,
        &format!(
            "omega equals block counts exactly; worst theta deviation {worst_theta:.3e} (tolerance 1e-12)"
        ),
    );
}

#[test]
fn c06_sweeps_find_the_enumerated_optimum() {
    let mut hits = 0;
    for round in 0..20u64 {
        let mut rng = unit_rng(0xacc6, round);
        let n = rng.gen_range(4..=8);
        let net = random_net(n, 4, &mut rng);

        let mut best_enumerated = f64::NEG_INFINITY;
        for mask in 0..(1u32 << n) {
            let labels: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            best_enumerated = best_enumerated.max(profile_objective(&net, &labels, 2).unwrap());
        }

        let config = KlConfig {
            runs: 50,
            seed: round,
            ..KlConfig::default()
        };
        let (model, _) = fit_discrete(&net, 2, &config).unwrap();
        let fitted = profile_objective(&net, &model.labels, 2).unwrap();
        if fitted >= best_enumerated - 1e-9 {
            hits += 1;
        }
    }
    criterion(
        6,
        "exhaustive optimality",
        hits >= 19,
        &format!("sweep fitter matched the global optimum on {hits}/20 networks (needs 19)"),
    );
}

/// Two-block commuter town: morning home-to-work surge, evening return
/// surge, weak background traffic, node activities drawn heterogeneously.
fn planted_commuter_model(rng: &mut ChaCha8Rng) -> DiscreteModel {
    let n = 60;
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= 30)).collect();
    let mut theta = vec![0.0; n];
    for g in 0..2 {
        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == g).collect();
        let raw: Vec<f64> = members.iter().map(|_| rng.gen_range(0.3..3.0)).collect();
        let total: f64 = raw.iter().sum();
        for (&i, &r) in members.iter().zip(&raw) {
            theta[i] = r / total;
        }
    }
    let mut omega = Array3::from_elem((2, 2, 24), 50.0);
    for t in [7, 8] {
        omega[[0, 1, t]] = 4000.0;
    }
    for t in [17, 18] {
        omega[[1, 0, t]] = 4000.0;
    }
    DiscreteModel {
        labels,
        theta,
        omega,
    }
}

#[test]
fn c07_planted_commuters_are_recovered_with_roles() {
    let mut rng = unit_rng(0xacc7, 0);
    let planted = planted_commuter_model(&mut rng);
    let expected_total: f64 = planted.omega.iter().sum();
    assert!(expected_total >= 20000.0, "fixture mass {expected_total}");

    let net = sample_network(&planted, 0xacc7);
    let config = KlConfig {
        seed: 0xacc7,
        ..KlConfig::default()
    };
    let (fitted, _) = fit_discrete(&net, 2, &config).unwrap();
    let ari = adjusted_rand_index(&planted.labels, &fitted.labels).unwrap();

    let roles = label_blocks(&fitted.omega, &RoleConfig::default()).unwrap();
    let home = roles.iter().find(|r| r.role == Role::Home);
    let work = roles.iter().find(|r| r.role == Role::Work);
    let roles_ok = match (home, work) {
        (Some(home), Some(work)) => {
            // The planted home side is the block holding nodes 0..30.
            let home_votes = (0..30).filter(|&i| fitted.labels[i] == home.block).count();
            let work_votes = (30..60).filter(|&i| fitted.labels[i] == work.block).count();
            home_votes >= 16 && work_votes >= 16
        }
        _ => false,
    };

    criterion(
        7,
        "planted recovery",
        ari >= 0.9 && roles_ok,
        &format!(
            "ARI {ari:.4} (needs 0.9); home/work labels sit on the planted blocks: {roles_ok}"
        ),
    );
}

/// Two blocks whose aggregate block-to-block totals are all equal, so the
/// collapsed network carries no signal, while hourly profiles are disjoint:
/// block 0 trips among itself in the morning, block 1 in the evening.
fn opposed_profile_model(n: usize) -> DiscreteModel {
    let labels: Vec<usize> = (0..n).map(|i| usize::from(i >= n / 2)).collect();
    let per_block = (n / 2) as f64;
    let theta = vec![1.0 / per_block; n];
    let total_per_pair = 600.0;
    let mut omega = Array3::zeros((2, 2, 24));
    for t in 0..24 {
        omega[[0, 1, t]] = total_per_pair / 24.0;
        omega[[1, 0, t]] = total_per_pair / 24.0;
    }
    for t in [6, 7, 8, 9] {
        omega[[0, 0, t]] = total_per_pair / 4.0;
    }
    for t in [16, 17, 18, 19] {
        omega[[1, 1, t]] = total_per_pair / 4.0;
    }
    DiscreteModel {
        labels,
        theta,
        omega,
    }
}

#[test]
fn c08_hourly_structure_is_invisible_to_the_static_fit() {
    let planted = opposed_profile_model(40);
    let agg: ndarray::Array2<f64> = planted
        .omega
        .sum_axis(ndarray::Axis(2));
    for g in 0..2 {
        for h in 0..2 {
            assert!(
                (agg[[g, h]] - 600.0).abs() < 1e-9,
                "fixture must have uniform aggregate totals"
            );
        }
    }

    let mut temporal_sum = 0.0;
    let mut static_sum = 0.0;
    let mut temporal_min = f64::INFINITY;
    let mut static_max = f64::NEG_INFINITY;
    for round in 0..10u64 {
        let net = sample_network(&planted, 0xacc8 + round);
        let config = KlConfig {
            seed: round,
            ..KlConfig::default()
        };
        let (temporal, _) = fit_discrete(&net, 2, &config).unwrap();
        let (collapsed, _) = fit_static(&net, 2, &config).unwrap();
        let ari_t = adjusted_rand_index(&planted.labels, &temporal.labels).unwrap();
        let ari_s = adjusted_rand_index(&planted.labels, &collapsed.labels).unwrap();
        temporal_sum += ari_t;
        static_sum += ari_s;
        temporal_min = temporal_min.min(ari_t);
        static_max = static_max.max(ari_s);
    }
    let temporal_mean = temporal_sum / 10.0;
    let static_mean = static_sum / 10.0;
    criterion(
        8,
        "temporal vs static separation",
        temporal_mean >= 0.9 && static_mean <= 0.2,
        &format!(
            "mean ARI over 10 networks: hourly fit {temporal_mean:.4} (worst {temporal_min:.4}, needs >= 0.9), \
             static fit {static_mean:.4} (worst {static_max:.4}, needs <= 0.2)"
        ),
    );
}

#[test]
fn c09_mixed_memberships_dominate_hard_labels_on_mixed_data() {
    // City-sized generator with genuinely mixed stations, so hard labels
    // are a constrained special case and must score no higher.
    let n = 166;
    let t = 24;
    let mut rng = unit_rng(0xacc9, 0);
    let mut c = Array2::zeros((n, 2));
    for i in 0..n {
        let strength = rng.gen_range(0.5..1.5);
        let lean = rng.gen_range(0.25..0.75);
        c[[i, 0]] = strength * lean;
        c[[i, 1]] = strength * (1.0 - lean);
    }
    for g in 0..2 {
        let total = c.column(g).sum();
        c.column_mut(g).mapv_inplace(|v| v / total);
    }
    let mut omega = Array3::zeros((2, 2, t));
    for tt in 0..t {
        omega[[0, 0, tt]] = 50.0;
        omega[[1, 1, tt]] = 50.0;
        omega[[0, 1, tt]] = 50.0;
        omega[[1, 0, tt]] = 50.0;
    }
    for tt in [7, 8] {
        omega[[0, 1, tt]] = 3000.0;
    }
    for tt in [17, 18] {
        omega[[1, 0, tt]] = 3000.0;
    }
    let generator = MixedModel { c, omega };
    let net = sample_network(&generator, 0xacc9);

    let np_mixed = param_count(ModelKind::Tdmm, n, 2, t).unwrap();
    let np_discrete = param_count(ModelKind::Tdd, n, 2, t).unwrap();

    let gd = GdConfig {
        restarts: 3,
        max_iters: 4000,
        seed: 2,
        ..GdConfig::default()
    };
    let (mixed, _) = fit(&net, 2, &gd).unwrap();
    let mixed_loglik = mixed.log_likelihood(&net).unwrap();

    let kl = KlConfig {
        seed: 2,
        ..KlConfig::default()
    };
    let (discrete, _) = fit_discrete(&net, 2, &kl).unwrap();
    let discrete_loglik = tdsbm::tdd::log_likelihood_discrete(&net, &discrete).unwrap();

    criterion(
        9,
        "mixed vs discrete likelihood ordering",
        np_mixed == np_discrete && mixed_loglik >= discrete_loglik,
        &format!(
            "N=166/T=24/K=2: equal parameter counts ({np_mixed}); mixed loglik {mixed_loglik:.1} \
             vs discrete {discrete_loglik:.1} (margin {:+.1})",
            mixed_loglik - discrete_loglik
        ),
    );
}

#[test]
fn c10_published_city_datasets_if_present() {
    let Some(dir) = std::env::var_os("TDSBM_DATA_DIR") else {
        skip(
            10,
            "real-data reproduction",
            "optional; set TDSBM_DATA_DIR containing la.csv / sf.csv / nyc.csv to run",
        );
        return;
    };
    let dir = std::path::PathBuf::from(dir);

    // (file, zone, max duration, expected removal %, stations, degree r)
    let cities = [
        ("la.csv", "America/Los_Angeles", 90.0, 7.1, 61, 0.91),
        ("sf.csv", "America/Los_Angeles", 90.0, 4.5, 35, 0.98),
        ("nyc.csv", "America/New_York", 120.0, 1.4, 601, 0.99),
    ];
    let mut ran_any = false;
    let mut all_ok = true;
    let mut details = Vec::new();
    for (file, zone, max_minutes, removal_pct, stations, degree_r) in cities {
        let path = dir.join(file);
        if !path.exists() {
            details.push(format!("{file} absent"));
            continue;
        }
        ran_any = true;
        let tz: chrono_tz::Tz = zone.parse().unwrap();
        let reader = std::fs::File::open(&path).unwrap();
        let (trips, row_errors) = parse_trips(reader, &ColumnMap::default(), tz).unwrap();
        assert!(
            row_errors.is_empty(),
            "{file}: {} unparseable rows",
            row_errors.len()
        );
        let policy = CleaningPolicy {
            max_duration_minutes: max_minutes,
            timezone: tz,
            ..CleaningPolicy::default()
        };
        let (kept, report) = clean_trips(trips, &policy);
        let net = tdsbm::ingest::build_network(&kept, 24, None).unwrap();

        let removal = 100.0 * report.removal_fraction;
        let r = net.in_out_degree_correlation();
        let svd = tdsbm::net::top2_svd(&net.degree_hour_matrix(tdsbm::net::Direction::Out));
        let explained = svd.explained[0] + svd.explained[1];

        let ok = (removal - removal_pct).abs() <= 0.5
            && net.n_nodes() == stations
            && (r - degree_r).abs() <= 0.02
            && explained >= 0.88;
        all_ok &= ok;
        details.push(format!(
            "{file}: removal {removal:.1}% (want {removal_pct}±0.5), stations {} (want {stations}), \
             r {r:.2} (want {degree_r}±0.02), svd mass {explained:.2} (want >=0.88)",
            net.n_nodes()
        ));
    }
    if !ran_any {
        skip(10, "real-data reproduction", &details.join("; "));
        return;
    }
    criterion(10, "real-data reproduction", all_ok, &details.join("; "));
}

#[test]
fn c11_sweep_runs_climb_and_ignore_thread_count() {
    let mut monotone = true;
    let mut identical = true;
    for round in 0..3u64 {
        let mut rng = unit_rng(0xaccb, round);
        let net = random_net(30, 6, &mut rng);
        let config = KlConfig {
            runs: 8,
            seed: 41 + round,
            ..KlConfig::default()
        };

        let fit_under = |threads: Option<usize>| {
            let serial = KlConfig {
                parallel: threads.is_none(),
                ..config.clone()
            };
            match threads {
                None => fit_discrete(&net, 2, &serial).unwrap(),
                Some(count) => rayon::ThreadPoolBuilder::new()
                    .num_threads(count)
                    .build()
                    .unwrap()
                    .install(|| fit_discrete(&net, 2, &serial).unwrap()),
            }
        };

        let baseline = fit_under(None);
        for pool in [1, 2, 8] {
            let (model, report) = fit_under(Some(pool));
            identical &= model.labels == baseline.0.labels;
            identical &= model
                .theta
                .iter()
                .zip(&baseline.0.theta)
                .all(|(a, b)| a.to_bits() == b.to_bits());
            identical &= model
                .omega
                .iter()
                .zip(baseline.0.omega.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits());
            identical &= report.final_objective.unwrap().to_bits()
                == baseline.1.final_objective.unwrap().to_bits();
            identical &= report.trace.len() == baseline.1.trace.len()
                && report
                    .trace
                    .iter()
                    .zip(&baseline.1.trace)
                    .all(|(a, b)| a.to_bits() == b.to_bits());
        }

        monotone &= baseline
            .1
            .trace
            .windows(2)
            .all(|pair| pair[1] >= pair[0]);
    }
    criterion(
        11,
        "sweep monotonicity and determinism",
        monotone && identical,
        "per-sweep best objective never falls; serial and 1/2/8-thread pools agree bit for bit",
    );
}
