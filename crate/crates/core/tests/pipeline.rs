use ibfair_core::bias::ib_all_fast;
use ibfair_core::detect::{louvain, run_detector, DetectorSpec};
use ibfair_core::group::{min_max_normalize, ols_slope, phi, Property, Score};
use ibfair_core::perturb::{perturb, run_sweep_with, Scenario, SweepConfig, Target};
use ibfair_core::quality::{modularity, nmi, NmiNorm};
use ibfair_core::synth::{generate_abcd_lite, generate_planted, AbcdParams, Synthetic};
use ibfair_core::{Execution, Partition};
use proptest::prelude::*;

fn inter_fraction(s: &Synthetic) -> f64 {
    let edges = s.graph.edges();
    let inter = edges
        .iter()
        .filter(|&&(u, v)| s.planted.label(u) != s.planted.label(v))
        .count();
    inter as f64 / edges.len() as f64
}

fn scaled(xi: f64, seed: u64) -> AbcdParams {
    AbcdParams {
        n: 2_000,
        c_min: 50,
        c_max: 400,
        xi,
        seed,
        ..AbcdParams::default()
    }
}

#[test]
fn abcd_default_parameters() {
    let s = generate_abcd_lite(&AbcdParams::default()).unwrap();
    let g = &s.graph;
    assert_eq!(g.n(), 10_000);
    let mean_degree = 2.0 * g.m() as f64 / g.n() as f64;
    assert!((5.0..=50.0).contains(&mean_degree), "{mean_degree}");
    assert!((10..=100).contains(&s.planted.k()), "{}", s.planted.k());
    assert!(s
        .planted
        .sizes()
        .iter()
        .all(|&c| (100..=1_000).contains(&c)));
    assert!((inter_fraction(&s) - 0.2).abs() <= 0.05);
    assert!(g.degrees().iter().all(|&d| d <= 50));
}

#[test]
fn abcd_xi_tracks_realized_mixing() {
    for xi in [0.1, 0.3, 0.5, 0.7] {
        let p = AbcdParams {
            n: 5_000,
            c_min: 50,
            c_max: 500,
            xi,
            ..AbcdParams::default()
        };
        let s = generate_abcd_lite(&p).unwrap();
        assert!(
            (inter_fraction(&s) - xi).abs() <= 0.05,
            "xi={xi}: {}",
            inter_fraction(&s)
        );
    }
    let s = generate_abcd_lite(&scaled(0.0, 3)).unwrap();
    assert_eq!(inter_fraction(&s), 0.0);
}

#[test]
fn abcd_is_seed_deterministic() {
    let a = generate_abcd_lite(&scaled(0.3, 11)).unwrap();
    let b = generate_abcd_lite(&scaled(0.3, 11)).unwrap();
    let c = generate_abcd_lite(&scaled(0.3, 12)).unwrap();
    assert_eq!(a.graph.edges(), b.graph.edges());
    assert_eq!(a.planted, b.planted);
    assert_ne!(a.graph.edges(), c.graph.edges());
}

#[test]
fn abcd_rejects_out_of_range_xi() {
    assert!(generate_abcd_lite(&AbcdParams {
        xi: 1.5,
        ..scaled(0.2, 0)
    })
    .is_err());
}

#[test]
fn louvain_recovers_well_separated_planting() {
    let p = AbcdParams {
        n: 1_000,
        c_min: 50,
        c_max: 200,
        xi: 0.2,
        seed: 4,
        ..AbcdParams::default()
    };
    let s = generate_abcd_lite(&p).unwrap();
    let pred = louvain(&s.graph, 0, 1.0).unwrap();
    let score = nmi(&s.planted, &pred, NmiNorm::Arithmetic).unwrap();
    assert!(score >= 0.9, "{score}");
    let q = modularity(&s.graph, &pred).unwrap();
    assert!(q >= modularity(&s.graph, &Partition::singletons(s.graph.n())).unwrap());
}

#[test]
fn detectors_are_deterministic_and_cover_all_nodes() {
    let (g, _) = generate_planted(&[30, 40, 50], 0.3, 0.02, 9).unwrap();
    for spec in ["lpa:seed=5", "louvain:seed=5", "cnm"] {
        let spec: DetectorSpec = spec.parse().unwrap();
        let a = run_detector(&spec, &g).unwrap();
        let b = run_detector(&spec, &g).unwrap();
        assert_eq!(a, b, "{spec}");
        assert_eq!(a.n(), g.n());
        assert_eq!(a.sizes().iter().sum::<usize>(), g.n());
        let q = modularity(&g, &a).unwrap();
        assert!(q > 0.3, "{spec}: Q = {q}");
    }
}

#[test]
fn unknown_detector_and_param_are_rejected() {
    let (g, _) = generate_planted(&[10, 10], 0.5, 0.05, 1).unwrap();
    assert!(run_detector(&"nope".parse().unwrap(), &g).is_err());
    assert!(run_detector(&"louvain:bogus=1".parse().unwrap(), &g).is_err());
}

#[test]
fn perturbations_hit_requested_counts() {
    let gt = Partition::from_labels(&[[0usize; 20].as_slice(), &[1; 80]].concat());
    for (focal, own) in [(0usize, 20usize), (50, 80)] {
        let other = 100 - own;
        for step in 0..=10 {
            let ratio = step as f64 / 10.0;
            let expand = perturb(Scenario::Expand, &gt, focal, ratio, 7).unwrap();
            let added = (ratio * other as f64).round() as usize;
            assert_eq!(expand.size(expand.label(focal)), own + added);
            let shrink = perturb(Scenario::Shrink, &gt, focal, ratio, 7).unwrap();
            let removed = (ratio * (own - 1) as f64).round() as usize;
            assert_eq!(shrink.size(shrink.label(focal)), own - removed);
            let ib = ib_all_fast(&gt, &shrink).unwrap().ib[focal];
            let s = own as f64;
            assert!((ib - (1.0 - ((s - removed as f64) / s).sqrt())).abs() < 1e-12);
        }
    }
}

#[test]
fn sweep_is_identical_across_execution_modes() {
    let mut cfg = SweepConfig::new(Scenario::Change, Target::Minority, 300);
    cfg.runs = 8;
    let seq = run_sweep_with(&cfg, Execution::Sequential).unwrap();
    let par = run_sweep_with(&cfg, Execution::default()).unwrap();
    assert_eq!(seq, par);
}

/// Communities of sizes 5, 5, 5, 5 and 40 with dense interiors.
fn mixed_sizes() -> (ibfair_core::Graph, Partition) {
    generate_planted(&[5, 5, 5, 5, 40], 0.9, 0.01, 2).unwrap()
}

#[test]
fn phi_sign_follows_which_communities_are_shattered() {
    let (g, gt) = mixed_sizes();
    let shatter = |small: bool| {
        let labels: Vec<usize> = (0..gt.n())
            .map(|i| {
                let hit = (gt.size(gt.label(i)) < 10) == small;
                if hit {
                    1000 + i
                } else {
                    gt.label(i)
                }
            })
            .collect();
        Partition::from_labels(&labels)
    };
    let small = phi(&g, &gt, &shatter(true)).unwrap();
    let large = phi(&g, &gt, &shatter(false)).unwrap();
    assert!(small.phi.get(Property::Size, Score::Fccn).unwrap() > 0.0);
    assert!(large.phi.get(Property::Size, Score::Fccn).unwrap() < 0.0);
    let perfect = phi(&g, &gt, &gt).unwrap();
    for score in Score::ALL {
        assert_eq!(perfect.phi.get(Property::Size, score), Some(0.0));
    }
}

#[test]
fn three_point_slope() {
    let slope = ols_slope(&[0.0, 0.5, 1.0], &[0.2, 0.5, 0.8]).unwrap();
    assert!((slope - 0.6).abs() < 1e-12);
    assert_eq!(min_max_normalize(&[3.0, 3.0]), None);
}

proptest! {
    #[test]
    fn phi_pipeline_is_affine_invariant(
        xy in proptest::collection::vec((-100.0f64..100.0, 0.0f64..1.0), 3..30),
        scale in 0.01f64..100.0,
        offset in -1e3f64..1e3,
    ) {
        let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
        let y: Vec<f64> = xy.iter().map(|p| p.1).collect();
        let moved: Vec<f64> = x.iter().map(|v| scale * v + offset).collect();
        match (min_max_normalize(&x), min_max_normalize(&moved)) {
            (Some(a), Some(b)) => {
                let (sa, sb) = (ols_slope(&a, &y).unwrap(), ols_slope(&b, &y).unwrap());
                prop_assert!((sa - sb).abs() < 1e-6, "{} vs {}", sa, sb);
            }
            (a, b) => prop_assert_eq!(a.is_none(), b.is_none()),
        }
    }
}
