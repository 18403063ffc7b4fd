//! Property checks shared by the proptest suites and the acceptance harness.
#![allow(dead_code)]

use netmon::anomaly::{odds_ratio_scale_bernoulli, AnomalyFamily, AnomalySpec, Profile};
use netmon::ddcsbm::{self, rescale_propensities, DdcsbmConfig, Rescale};
use netmon::dlsm::{self, DlsmConfig};
use netmon::edgelist::{read_edge_list, write_edge_list};
use netmon::eval::roc_auc;
use netmon::monitor::{self, calibrate_q, null_far, ChartState, SigmaEstimator};
use netmon::network::Violation;
use netmon::stats::{self, density, diff_stat, max_degree, neighborhood_size, sum_stat};
use netmon::{DynamicNetwork, EdgeKind, Snapshot, StatKind, StatSeries};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 1000;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn arb_snapshot(max_n: usize, max_w: u32) -> impl Strategy<Value = Snapshot> {
    (2..=max_n, any::<bool>(), any::<bool>()).prop_flat_map(move |(n, directed, binary)| {
        let top = if binary { 1 } else { max_w };
        proptest::collection::vec(0..=top, n * n).prop_map(move |raw| {
            let kind = if binary { EdgeKind::Binary } else { EdgeKind::Count };
            let mut s = Snapshot::empty(n, directed, kind);
            for i in 0..n {
                for j in 0..n {
                    if i == j || (!directed && j < i) {
                        continue;
                    }
                    s.set_edge(i, j, raw[i * n + j]);
                }
            }
            s
        })
    })
}

pub fn arb_network(max_n: usize, max_len: usize) -> impl Strategy<Value = DynamicNetwork> {
    (2..=max_n, 2..=max_len, any::<bool>(), any::<bool>()).prop_flat_map(|(n, len, directed, binary)| {
        let top = if binary { 1u32 } else { 4 };
        (
            proptest::collection::vec(proptest::collection::vec(0..=top, n * n), len),
            1..len,
        )
            .prop_map(move |(raws, t1)| {
                let kind = if binary { EdgeKind::Binary } else { EdgeKind::Count };
                let snaps = raws
                    .iter()
                    .map(|raw| {
                        let mut s = Snapshot::empty(n, directed, kind);
                        for i in 0..n {
                            for j in 0..n {
                                if i != j && (directed || i < j) {
                                    s.set_edge(i, j, raw[i * n + j]);
                                }
                            }
                        }
                        s
                    })
                    .collect();
                DynamicNetwork::new(snaps, t1)
            })
    })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

pub fn permutation_invariance(cases: u32) -> Result<(), String> {
    let strat = arb_snapshot(9, 5).prop_flat_map(|s| {
        let n = s.n();
        (Just(s), arb_perm(n))
    });
    check(cases, strat, |(s, perm)| {
        let p = s.permuted(&perm);
        let n = s.n();
        let (w, wp) = (density(&s).unwrap(), density(&p).unwrap());
        let (d, dp) = (max_degree(&s), max_degree(&p));
        prop_assert_eq!(w, wp);
        prop_assert_eq!(d, dp);
        prop_assert_eq!(diff_stat(d, w, n), diff_stat(dp, wp, n));
        prop_assert_eq!(sum_stat(d, w, n), sum_stat(dp, wp, n));
        Ok(())
    })
}

pub fn sum_diff_identity(cases: u32) -> Result<(), String> {
    check(cases, arb_snapshot(10, 9), |s| {
        let n = s.n();
        let (w, d) = (density(&s).unwrap(), max_degree(&s));
        let gap = sum_stat(d, w, n) - (diff_stat(d, w, n) + 2.0 * w);
        prop_assert!(gap.abs() <= 1e-12, "M+ - (M- + 2W) = {gap}");
        Ok(())
    })
}

pub fn binary_bounds(cases: u32) -> Result<(), String> {
    check(cases, arb_snapshot(10, 1), |s| {
        let n = s.n() as f64;
        let w = density(&s).unwrap();
        // Density is doubled, so a full network reaches 2.
        prop_assert!((0.0..=2.0).contains(&w));
        let cap = if s.directed() { 2.0 * (n - 1.0) } else { n - 1.0 };
        prop_assert!(max_degree(&s) <= cap);
        Ok(())
    })
}

pub fn neighborhood_monotone(cases: u32) -> Result<(), String> {
    check(cases, arb_snapshot(8, 3), |s| {
        let deg = stats::degrees(&s);
        for (i, &d) in deg.iter().enumerate() {
            let sizes: Vec<f64> = (0..=2).map(|k| neighborhood_size(&s, i, k).unwrap()).collect();
            prop_assert_eq!(sizes[0], d);
            prop_assert!(sizes[1] <= sizes[2]);
        }
        Ok(())
    })
}

pub fn odds_ratio_identity(cases: u32) -> Result<(), String> {
    check(cases, (0.001f64..0.999, 0.05f64..20.0, 0.05f64..20.0), |(p0, a, b)| {
        let p1 = odds_ratio_scale_bernoulli(p0, a);
        prop_assert!(p1 > 0.0 && p1 < 1.0);
        let ratio = (p1 / (1.0 - p1)) / (p0 / (1.0 - p0));
        prop_assert!((ratio / a - 1.0).abs() < 1e-9, "odds ratio {ratio} vs {a}");
        prop_assert!((odds_ratio_scale_bernoulli(p0, 1.0) - p0).abs() < 1e-15);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(odds_ratio_scale_bernoulli(p0, lo) <= odds_ratio_scale_bernoulli(p0, hi));
        Ok(())
    })
}

pub fn rescaled_mean_one(cases: u32) -> Result<(), String> {
    let strat = (1usize..6, 2usize..40).prop_flat_map(|(k, n)| {
        (
            proptest::collection::vec(0.01f64..10.0, n),
            proptest::collection::vec(0..k, n),
        )
    });
    check(cases, strat, |(theta, labels)| {
        let out = rescale_propensities(&theta, &labels, Rescale::Mean);
        let k = labels.iter().max().unwrap() + 1;
        for c in 0..k {
            let members: Vec<f64> = labels
                .iter()
                .zip(&out)
                .filter(|(l, _)| **l == c)
                .map(|(_, v)| *v)
                .collect();
            if members.is_empty() {
                continue;
            }
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            prop_assert!((mean - 1.0).abs() <= 1e-12, "community {c} mean {mean}");
        }
        Ok(())
    })
}

fn small_dlsm(seed: u64, binary: bool) -> DlsmConfig {
    let kind = if binary { EdgeKind::Binary } else { EdgeKind::Count };
    DlsmConfig::new(7, 12, 0.5, 0.0015, kind, seed)
}

fn small_ddcsbm(seed: u64, binary: bool) -> DdcsbmConfig {
    let kind = if binary { EdgeKind::Binary } else { EdgeKind::Count };
    DdcsbmConfig::new(7, 12, 0.5, 0.16, kind, seed)
}

pub fn determinism(cases: u32) -> Result<(), String> {
    check(cases, (any::<u64>(), any::<bool>()), |(seed, binary)| {
        let a = dlsm::generate(&small_dlsm(seed, binary), None).unwrap();
        let b = dlsm::generate(&small_dlsm(seed, binary), None).unwrap();
        prop_assert_eq!(a, b);
        let c = ddcsbm::generate(&small_ddcsbm(seed, binary), None).unwrap();
        let d = ddcsbm::generate(&small_ddcsbm(seed, binary), None).unwrap();
        prop_assert_eq!(c, d);
        Ok(())
    })
}

pub fn anomaly_outside_window_unchanged(cases: u32) -> Result<(), String> {
    let strat = (
        any::<u64>(),
        any::<bool>(),
        any::<bool>(),
        any::<bool>(),
        1usize..7,
        7usize..11,
        1usize..3,
    );
    check(cases, strat, |(seed, binary, odds, gradual, count, start, cpl)| {
        let family = if odds {
            AnomalyFamily::OddsRatio
        } else {
            AnomalyFamily::DegreeParam
        };
        let profile = if gradual { Profile::Gradual } else { Profile::Sustained };
        let lsm_mag = if odds { 3.0 } else { 0.1 };
        let a = AnomalySpec::first_nodes(family, profile, count, start, cpl, lsm_mag);
        let b = AnomalySpec::first_nodes(family, profile, count, start, cpl, 3.0);
        let nets = [
            (
                dlsm::generate(&small_dlsm(seed, binary), None).unwrap(),
                dlsm::generate(&small_dlsm(seed, binary), Some(&a)).unwrap(),
            ),
            (
                ddcsbm::generate(&small_ddcsbm(seed, binary), None).unwrap(),
                ddcsbm::generate(&small_ddcsbm(seed, binary), Some(&b)).unwrap(),
            ),
        ];
        for (plain, planted) in &nets {
            for t in 1..=plain.len() {
                if !a.is_active(t) {
                    prop_assert_eq!(plain.at(t), planted.at(t), "t={}", t);
                }
            }
        }
        Ok(())
    })
}

fn arb_series() -> impl Strategy<Value = (StatSeries, SigmaEstimator)> {
    (
        proptest::collection::vec(-5.0f64..5.0, 30..60),
        prop_oneof![
            Just(SigmaEstimator::Amr),
            Just(SigmaEstimator::Mmr),
            Just(SigmaEstimator::CorrSd)
        ],
        prop_oneof![Just(StatKind::Density), Just(StatKind::Diff)],
    )
        .prop_map(|(v, est, kind)| (StatSeries::dense(kind, v), est))
}

pub fn far_monotone(cases: u32) -> Result<(), String> {
    check(cases, (arb_series(), 0.0f64..6.0, 0.0f64..6.0), |((s, est), a, b)| {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let t1 = 20;
        prop_assert!(null_far(&s, t1, est, hi).unwrap() <= null_far(&s, t1, est, lo).unwrap());
        let wide = monitor::monitor(&s, t1, est, hi).unwrap();
        let narrow = monitor::monitor(&s, t1, est, lo).unwrap();
        for ((_, x), (_, y)) in wide.iter().zip(narrow.iter()) {
            prop_assert!(!x || y, "signal at wider limit missing at narrower limit");
        }
        let chart = ChartState::fit(&s, t1, est, lo).unwrap();
        prop_assert!(chart.upper() >= chart.lower());
        let cal = calibrate_q(std::slice::from_ref(&s), t1, est, 0.05).unwrap();
        prop_assert!(cal.curve.windows(2).all(|w| w[1].1 <= w[0].1));
        prop_assert_eq!(cal, calibrate_q(std::slice::from_ref(&s), t1, est, 0.05).unwrap());
        Ok(())
    })
}

/// Scores at the centres of distinct ROC grid cells, so every grid sweep
/// resolves their order exactly.
fn cell_centre(k: usize) -> f64 {
    -6.0 + (k as f64 + 0.5) * 0.05
}

pub fn roc_monotone_transform(cases: u32) -> Result<(), String> {
    let cells = || proptest::sample::subsequence((0..240).collect::<Vec<usize>>(), 20);
    let strat = (
        cells(),
        cells(),
        Just((0..20).collect::<Vec<usize>>()).prop_shuffle(),
        21usize..28,
    );
    check(cases, strat, |(from, to, order, start)| {
        // `from` and `to` are sorted; mapping rank r of one onto rank r of the
        // other is strictly increasing.
        let mk = |cells: &[usize]| {
            let mut values = vec![None; 30];
            for (slot, &rank) in order.iter().enumerate() {
                values[10 + slot] = Some(cell_centre(cells[rank]));
            }
            StatSeries::new(StatKind::Scan, Some(5), values)
        };
        let window = (start, start + 2);
        let a = roc_auc(&mk(&from), 20, SigmaEstimator::CorrSd, window).unwrap();
        let b = roc_auc(&mk(&to), 20, SigmaEstimator::CorrSd, window).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        Ok(())
    })
}

pub fn edge_list_round_trip(cases: u32) -> Result<(), String> {
    check(cases, arb_network(7, 6), |net| {
        let mut buf = Vec::new();
        write_edge_list(&net, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back, net);
        Ok(())
    })
}

pub fn validate_soundness(cases: u32) -> Result<(), String> {
    let strat = arb_network(6, 5).prop_flat_map(|net| {
        let (n, len) = (net.n(), net.len());
        (Just(net), 0usize..3, 1..=len, 0..n, 0..n, 2u32..5)
    });
    check(cases, strat, |(net, class, t, i, j, w)| {
        prop_assert!(net.validate().is_empty());
        let mut snaps = net.clone().into_snapshots();
        let directed = net.directed();
        let binary = net.kind() == EdgeKind::Binary;
        let expected = match class {
            0 => {
                snaps[t - 1].set_entry(i, i, w);
                Violation::SelfLoop { t, node: i, weight: w }
            }
            1 if binary && i != j => {
                snaps[t - 1].set_edge(i, j, w);
                let (a, b) = if directed { (i, j) } else { (i.min(j), i.max(j)) };
                Violation::NonBinaryWeight {
                    t,
                    i: a,
                    j: b,
                    weight: w,
                }
            }
            _ if !directed && i != j => {
                let (a, b) = (i.min(j), i.max(j));
                let old = snaps[t - 1].weight(a, b);
                let new = if old == 0 { 1 } else { 0 };
                snaps[t - 1].set_entry(a, b, new);
                Violation::Asymmetric { t, i: a, j: b }
            }
            _ => {
                let t1 = net.len();
                prop_assert_eq!(
                    DynamicNetwork::new(snaps, t1).validate(),
                    vec![Violation::PhaseCutoff { t1, len: net.len() }]
                );
                return Ok(());
            }
        };
        let broken = DynamicNetwork::new(snaps, net.t1()).validate();
        if let Violation::NonBinaryWeight { .. } = expected {
            if !directed {
                // Both stored directions carry the bad weight.
                prop_assert!(!broken.is_empty());
                let only_weight = broken
                    .iter()
                    .all(|v| matches!(v, Violation::NonBinaryWeight { t: vt, weight, .. } if *vt == t && *weight == w));
                prop_assert!(only_weight, "unexpected violations {:?}", broken);
                return Ok(());
            }
        }
        prop_assert_eq!(broken, vec![expected]);
        Ok(())
    })
}

/// Every invariant suite, by name.
pub type Property = fn(u32) -> Result<(), String>;

pub fn all() -> Vec<(&'static str, Property)> {
    vec![
        ("permutation invariance", permutation_invariance),
        ("sum = diff + 2 density", sum_diff_identity),
        ("binary bounds", binary_bounds),
        ("neighborhood monotone", neighborhood_monotone),
        ("odds-ratio identity", odds_ratio_identity),
        ("rescaled propensity mean", rescaled_mean_one),
        ("seeded determinism", determinism),
        ("anomaly hooks are local", anomaly_outside_window_unchanged),
        ("FAR monotone in q", far_monotone),
        ("ROC order invariance", roc_monotone_transform),
        ("edge-list round trip", edge_list_round_trip),
        ("validate soundness", validate_soundness),
    ]
}
