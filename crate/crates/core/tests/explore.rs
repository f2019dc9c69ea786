// SPDX-License-Identifier: Apache-2.0

mod common;

use bmf_synth::bmf::AssoConfig;
use bmf_synth::explore::{assemble, explore, pareto_report, profile_all, ExploreConfig, Exploration, ProfileCache};
use bmf_synth::fixtures;
use bmf_synth::netlist::Netlist;
use bmf_synth::partition::{decompose, Partition};
use bmf_synth::qor::{Evaluator, Metric, OutputInterpretation, Sampling};
use bmf_synth::resynth::area_proxy;

struct Run {
    n: Netlist,
    p: Partition,
    cache: ProfileCache,
    cfg: ExploreConfig,
    e: Exploration,
}

fn run(n: Netlist, interp: Option<&OutputInterpretation>, metric: Metric, threshold: f64) -> Run {
    let p = decompose(&n, 10, 10).unwrap();
    let cache = profile_all(&n, &p, &AssoConfig::default()).unwrap();
    let cfg = ExploreConfig { metric, threshold, samples: 100_000, probe_samples: 20_000, seed: 42 };
    let e = explore(&n, &p, &cache, interp, &cfg).unwrap();
    Run { n, p, cache, cfg, e }
}

/// Replays the trajectory and checks every structural invariant.
fn check(r: &Run, interp: Option<&OutputInterpretation>) {
    let t = &r.e.trajectory;
    assert_eq!(t[0].subcircuit, None);
    assert_eq!(t[0].error, 0.0);
    assert_eq!(t[0].area, r.cache.original_area().value());
    let commit = Evaluator::new(&r.n, interp, Sampling::MonteCarlo { samples: r.cfg.samples, seed: r.cfg.seed }).unwrap();
    let mut degrees = r.cache.exact_degrees();
    for (i, s) in t.iter().enumerate().skip(1) {
        assert_eq!(s.step, i);
        let id = s.subcircuit.unwrap();
        assert_eq!(s.f_before, degrees[id]);
        assert_eq!(s.f_after + 1, s.f_before);
        assert!(s.f_after >= 1);
        let mut d = degrees.clone();
        d[id] -= 1;
        // Stored values recompute exactly from the degree vector.
        let circuit = assemble(&r.n, &r.p, &r.cache, &d).unwrap();
        let again = commit.evaluate(&circuit).unwrap();
        assert_eq!(again.value(r.cfg.metric).unwrap(), s.error);
        assert_eq!(again.hamming.mean, s.hamming);
        assert_eq!(s.area, r.cache.area(&d).value());
        assert_eq!(s.area, area_proxy(&circuit).value());
        if s.accepted {
            assert!(s.error <= r.cfg.threshold);
            degrees = d;
        } else {
            assert!(s.error > r.cfg.threshold);
            assert_eq!(i, t.len() - 1, "a rejected step ends the search");
        }
    }
    assert_eq!(degrees, r.e.degrees);
    assert!(r.e.degrees.iter().zip(r.cache.exact_degrees()).all(|(&f, m)| 1 <= f && f <= m));
    assert_eq!(r.e.final_area.value(), area_proxy(&r.e.netlist).value());
    assert!(r.e.final_error <= r.cfg.threshold);
    assert!(assemble(&r.n, &r.p, &r.cache, &degrees).unwrap().structurally_eq(&r.e.netlist));

    let csv = pareto_report(t).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(reader.records().count(), t.len());
}

#[test]
fn multiplier_trajectory_invariants() {
    let r = run(fixtures::array_multiplier(6), None, Metric::Relative, 0.05);
    assert!(r.e.committed_steps() > 0);
    check(&r, None);
    let again = run(fixtures::array_multiplier(6), None, Metric::Relative, 0.05);
    assert_eq!(r.e.trajectory, again.e.trajectory);
    assert_eq!(r.e.degrees, again.e.degrees);
}

#[test]
fn hamming_and_absolute_trajectories() {
    let r = run(fixtures::ripple_carry_adder(12), None, Metric::Hamming, 0.02);
    check(&r, None);
    let words = fixtures::butterfly_words(6);
    let r = run(fixtures::butterfly(6), Some(&words), Metric::Absolute, 1.5);
    check(&r, Some(&words));
}

#[test]
fn tiny_threshold_keeps_the_function() {
    // Every decrement of the adder's blocks costs accuracy.
    let r = run(fixtures::ripple_carry_adder(8), None, Metric::Relative, 1e-9);
    assert_eq!(r.e.committed_steps(), 0);
    assert_eq!(r.e.area_saving(), 0.0);
    assert!(r.e.netlist.structurally_eq(&r.n));
    check(&r, None);
    // The multiplier has a block with an exact lower-degree factorization,
    // which a zero measured error lets through.
    let r = run(fixtures::array_multiplier(4), None, Metric::Relative, 1e-9);
    assert!(r.e.trajectory.iter().filter(|s| s.accepted).all(|s| s.error == 0.0));
    assert_eq!(r.e.netlist.truth_table().unwrap(), r.n.truth_table().unwrap());
    check(&r, None);
}

#[test]
fn cache_entries_realize_their_factorizations() {
    let n = fixtures::array_multiplier(8);
    let p = decompose(&n, 10, 10).unwrap();
    let cache = profile_all(&n, &p, &AssoConfig::default()).unwrap();
    for prof in &cache.subcircuits {
        assert_eq!(prof.entries.len(), prof.outputs.saturating_sub(1));
        for (i, a) in prof.entries.iter().enumerate() {
            assert_eq!(a.factor.degree, i + 1);
            assert_eq!(a.netlist.truth_table().unwrap(), a.table);
            assert_eq!(a.area, area_proxy(&a.netlist));
        }
    }
}
