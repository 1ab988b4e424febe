//! Property tests of the model invariants.

use d2d_coop::bandwidth::{optimize_eta, BandwidthProblem};
use d2d_coop::catalog::PopularityModel;
use d2d_coop::cluster::{coop_probability, expected_active_coop, hit_probability, optimize_cluster_size, ClusterPlan};
use d2d_coop::geometry::{interference_pdf, path_gain_moments, signal_pdf};
use d2d_coop::netsim::{drop_snapshot, Role, SimConfig, Strategy};
use d2d_coop::netsim::snapshot::cell_origin;
use d2d_coop::population::{
    configuration_probability, expected_cellular_and_noncoop, expected_coop_users_exact, expected_coop_users_mc,
    for_each_composition, RequestConfiguration,
};
use d2d_coop::rates::{network_throughput, RadioParams};
use proptest::prelude::*;

fn zipf(groups: usize, beta: f64) -> PopularityModel<f64> {
    PopularityModel::zipf(groups * 20, 20, beta).unwrap()
}

proptest! {
    #[test]
    fn plan_tiles_the_hotspot(k in 1usize..20, b in 1usize..40, side in 1.0f64..500.0) {
        let plan = ClusterPlan::new(side, k * b, k).unwrap();
        prop_assert_eq!(plan.n_clusters * plan.users_per_cluster, plan.n_users);
        let expected = side / (b as f64).sqrt();
        prop_assert!((plan.cluster_side - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn cluster_probabilities(groups in 2usize..20, beta in 0.0f64..2.0, m_factor in 1usize..40) {
        let model = zipf(groups, beta);
        let n_users = groups * m_factor;
        let mut last_hit = vec![0.0; groups];
        let mut last_pc = 0.0;
        for k in 1..=groups {
            let hit = hit_probability(&model, k).unwrap();
            for (h, l) in hit.iter().zip(&last_hit) {
                prop_assert!(*h >= *l);
            }
            last_hit = hit;
            let b = n_users as f64 / k as f64;
            let pc = coop_probability(&model, k, b).unwrap();
            prop_assert!(pc >= last_pc * (1.0 - 1e-12), "P^c fell at K={}: {} < {}", k, pc, last_pc);
            last_pc = pc;
            let active = expected_active_coop(&model, n_users, k).unwrap();
            prop_assert!((0.0..=b).contains(&active));
        }
        let search = optimize_cluster_size(&model, n_users).unwrap();
        let best = search.profile.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        prop_assert_eq!(search.objective, best);
        prop_assert_eq!(search.profile[search.k_star - 1].1, best);
    }

    #[test]
    fn densities_are_non_negative(r in 0.0f64..2.3) {
        prop_assert!(signal_pdf(r).unwrap() >= 0.0);
        prop_assert!(interference_pdf(r).unwrap() >= 0.0);
    }

    #[test]
    fn moments_split_and_fall_with_truncation(alpha in 0.0f64..4.0, r1 in 0.01f64..0.95, dr in 0.01f64..0.3) {
        let near = path_gain_moments(alpha, r1).unwrap();
        let far = path_gain_moments(alpha, r1 + dr).unwrap();
        for g in [near, far] {
            prop_assert!(g.signal_moment >= 0.0 && g.q2 >= 0.0);
            prop_assert!((g.q1 - (g.signal_moment + 8.0 * g.q2)).abs() <= 1e-12 * g.q1);
        }
        prop_assert!(far.q1 < near.q1);
        prop_assert!(far.q2 < near.q2);
    }

    #[test]
    fn throughput_is_affine_in_eta(pc in 0.0f64..1.0, rc in 0.0f64..30.0, rn in 0.0f64..10.0, b in 1.0f64..30.0) {
        let w = 20e6;
        let t = |eta: f64| network_throughput(pc, eta, rc, rn, w, b);
        let slope = w * b * pc * (rc - rn);
        let scale = w * b * rc.max(rn).max(1.0);
        prop_assert!(((t(0.5) - t(0.1)) / 0.4 - slope).abs() <= 1e-9 * scale);
        prop_assert!(((t(0.9) - t(0.5)) / 0.4 - slope).abs() <= 1e-9 * scale);
        prop_assert_eq!(t(0.0), w * b * rn);
        prop_assert!((network_throughput(1.0, 0.7, rc, rn, w, b) - w * b * (0.7 * rc + 0.3 * rn)).abs() <= 1e-6 * scale);
        prop_assert_eq!(network_throughput(pc, 0.3, rc, rn, 2.0 * w, b), 2.0 * t(0.3));
        for eta in [0.0, 0.3, 1.0] {
            prop_assert!(t(eta) >= 0.0 && t(eta) <= w * b * rc.max(rn) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bandwidth_solution_invariants(
        pc in 0.01f64..1.0,
        rc in 0.1f64..20.0,
        rn in 0.1f64..20.0,
        b in 1usize..25,
        nc in 0.0f64..60.0,
        nn in 0.0f64..120.0,
        mu in 1e4f64..1e7,
        shrink in 0.1f64..1.0,
    ) {
        let problem = BandwidthProblem {
            pc, rc, rn, bandwidth_hz: 20e6, n_clusters: b as f64, coop_users: nc, noncoop_users: nn, mu,
        };
        let s = optimize_eta(&problem);
        prop_assert_eq!(s.objective, problem.throughput(s.eta_star));
        if s.feasible {
            let (coop, noncoop) = problem.user_rates(s.eta_star);
            for rate in [coop, noncoop].into_iter().flatten() {
                prop_assert!(rate >= mu * (1.0 - 1e-9));
            }
        }
        let easier = optimize_eta(&BandwidthProblem { mu: mu * shrink, ..problem });
        if s.feasible {
            prop_assert!(easier.feasible);
            // the upper limit binds when coop links are faster, the lower one otherwise
            if rc > rn {
                prop_assert!(easier.eta_star >= s.eta_star - 1e-12);
            } else {
                prop_assert!(easier.eta_star <= s.eta_star + 1e-12);
            }
        }
    }

    #[test]
    fn composition_mass_and_counts(groups in 1usize..5, k in 1usize..5, b in 1usize..4, beta in 0.0f64..1.5) {
        prop_assume!(k <= groups);
        let model = zipf(groups, beta);
        let mut total = 0.0;
        for_each_composition(k, groups, |row| {
            let config = RequestConfiguration::new(vec![row.to_vec()], k).unwrap();
            total += configuration_probability(&config, &model).unwrap();
        });
        prop_assert!((total - 1.0).abs() < 1e-12);

        let n_users = k * b;
        let exact = expected_coop_users_exact(&model, k, b, u128::MAX).unwrap();
        let m = n_users as f64;
        prop_assert!((exact.coop_mean + exact.cellular_mean + exact.noncoop_mean - m).abs() <= 1e-9);
        for v in [exact.coop_mean, exact.cellular_mean, exact.noncoop_mean] {
            prop_assert!((0.0..=m).contains(&v));
        }
        let (cellular, noncoop) = expected_cellular_and_noncoop(&model, n_users, k, exact.coop_mean).unwrap();
        prop_assert!((cellular - exact.cellular_mean).abs() <= 1e-9);
        prop_assert!((noncoop - exact.noncoop_mean).abs() <= 1e-9);
    }

    #[test]
    fn snapshot_invariants(side in 1usize..4, k in 1usize..8, beta in 0.0f64..1.5, seed in any::<u64>(), trial in 0u64..1000) {
        let b = side * side;
        let model = zipf(8, beta);
        let plan = ClusterPlan::new(60.0, k * b, k).unwrap();
        let cell = plan.cluster_side;
        let config = SimConfig::new(plan, RadioParams::reference(), model, Strategy::Coop { eta: 0.5 }, 1, seed).unwrap();
        let s = drop_snapshot(&config, trial);
        prop_assert_eq!(s.positions.len(), k * b);
        for c in 0..b {
            let members = s.members(c);
            prop_assert_eq!(members.len(), k);
            let mut groups: Vec<usize> = members.clone().map(|u| s.cache_group_of[u]).collect();
            groups.sort_unstable();
            prop_assert_eq!(groups, (0..k).collect::<Vec<_>>());
            let origin = cell_origin(c, side, cell);
            for u in members {
                prop_assert_eq!(s.cluster_of[u], c);
                let p = s.positions[u];
                prop_assert!(p[0] >= origin[0] && p[0] <= origin[0] + cell);
                prop_assert!(p[1] >= origin[1] && p[1] <= origin[1] + cell);
            }
        }
        let hit: Vec<usize> = (0..k)
            .filter(|&g| (0..b).all(|c| s.members(c).any(|u| s.request_of[u] == g)))
            .collect();
        prop_assert_eq!(&s.hit_groups, &hit);
        prop_assert_eq!(s.mode() == 1, !hit.is_empty());
        for u in 0..k * b {
            let r = s.request_of[u];
            let expected = if hit.contains(&r) {
                Role::Coop
            } else if r >= k {
                Role::Cellular
            } else {
                Role::Noncoop
            };
            prop_assert_eq!(s.roles[u], expected);
        }
    }
}

/// Skewed popularity concentrates requests on commonly hit cached groups.
#[test]
fn coop_users_grow_with_skew() {
    let mut last: Option<(f64, f64)> = None;
    for i in 0..=6 {
        let beta = 0.2 * i as f64;
        let est = expected_coop_users_mc(&zipf(15, beta), 15, 9, 20_000, 17).unwrap();
        if let Some((mean, se)) = last {
            assert!(est.coop_mean >= mean - 3.0 * se.hypot(est.std_error), "beta={beta}: {} < {mean}", est.coop_mean);
        }
        last = Some((est.coop_mean, est.std_error));
    }
}
