// SPDX-License-Identifier: Apache-2.0

mod common;

use bmf_synth::bmf::AssoConfig;
use bmf_synth::fixtures;
use bmf_synth::netlist::{Netlist, Simulator};
use bmf_synth::partition::{decompose, extract, substitute, substitute_many, Subcircuit};
use bmf_synth::resynth::approximate_subcircuit;
use common::{count_mismatches, random_netlist, validate_partition};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn adder_four_by_four_is_valid() {
    let n = fixtures::ripple_carry_adder(8);
    let p = decompose(&n, 4, 4).unwrap();
    validate_partition(&n, &p).unwrap();
    assert!(p.len() > 1);
}

#[test]
fn corpus_partitions_are_valid_and_deterministic() {
    for f in common::corpus() {
        for (k, m) in [(10, 10), (6, 4), (4, 6), (3, 3)] {
            let p = decompose(&f.netlist, k, m).unwrap();
            validate_partition(&f.netlist, &p).unwrap_or_else(|e| panic!("{} {k}x{m}: {e}", f.name));
            assert_eq!(p, decompose(&f.netlist, k, m).unwrap());
        }
    }
}

/// Boundary net values of `s` in the parent under one primary input vector,
/// probed by exposing them as extra outputs of a rebuilt copy.
fn parent_boundary(n: &Netlist, s: &Subcircuit, input: &[bool]) -> (Vec<bool>, Vec<bool>) {
    let mut b = n.to_builder();
    for name in s.inputs.iter().chain(&s.outputs) {
        let id = b.net(name);
        b.output(id);
    }
    let probe = b.build().unwrap();
    let words: Vec<u64> = input.iter().map(|&x| x as u64).collect();
    let mut out = vec![0u64; probe.outputs().len()];
    Simulator::new(&probe).run(&words, &mut out);
    let base = n.outputs().len();
    let ins = out[base..base + s.inputs.len()].iter().map(|w| w & 1 == 1).collect();
    let outs = out[base + s.inputs.len()..].iter().map(|w| w & 1 == 1).collect();
    (ins, outs)
}

#[test]
fn extraction_co_simulates_with_parent() {
    let n = fixtures::ripple_carry_adder(8);
    let p = decompose(&n, 5, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for s in &p.subcircuits {
        let sub = extract(&n, s).unwrap();
        assert_eq!(sub.input_names(), s.inputs.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(sub.output_names(), s.outputs.iter().map(String::as_str).collect::<Vec<_>>());
        for _ in 0..100 {
            let input: Vec<bool> = (0..n.inputs().len()).map(|_| rng.random()).collect();
            let (boundary_in, boundary_out) = parent_boundary(&n, s, &input);
            assert_eq!(sub.simulate(&boundary_in).unwrap(), boundary_out, "block {}", s.id);
        }
    }
}

#[test]
fn self_substitution_is_neutral() {
    for f in common::corpus() {
        let p = decompose(&f.netlist, 10, 10).unwrap();
        for s in &p.subcircuits {
            let sub = extract(&f.netlist, s).unwrap();
            let back = substitute(&f.netlist, s, &sub).unwrap();
            if f.netlist.inputs().len() <= 16 {
                assert_eq!(back.truth_table_capped(16).unwrap(), f.netlist.truth_table_capped(16).unwrap());
            } else {
                assert_eq!(count_mismatches(&f.netlist, &back, 20_000, s.id as u64), 0, "{} block {}", f.name, s.id);
            }
        }
    }
}

#[test]
fn multiplier_exact_resynthesis_is_equivalent() {
    let n = fixtures::array_multiplier(8);
    let p = decompose(&n, 10, 10).unwrap();
    let cfg = AssoConfig::default();
    let mut all = Vec::new();
    for s in &p.subcircuits {
        let sub = extract(&n, s).unwrap();
        let exact = approximate_subcircuit(&sub, s.outputs.len(), &cfg).unwrap();
        assert_eq!(exact.table, sub.truth_table().unwrap());
        let swapped = substitute(&n, s, &exact.netlist).unwrap();
        assert_eq!(count_mismatches(&n, &swapped, 100_000, 7 + s.id as u64), 0, "block {}", s.id);
        all.push(exact.netlist);
    }
    let pairs: Vec<(&Subcircuit, &Netlist)> = p.subcircuits.iter().zip(&all).collect();
    let everything = substitute_many(&n, &pairs).unwrap();
    assert_eq!(count_mismatches(&n, &everything, 100_000, 99), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_partitions_are_valid(seed in any::<u64>(), k in 3usize..8, m in 1usize..6) {
        let n = random_netlist(seed, 7, 50, 6);
        let p = decompose(&n, k, m).unwrap();
        prop_assert_eq!(validate_partition(&n, &p), Ok(()));
        for s in &p.subcircuits {
            let sub = extract(&n, s).unwrap();
            let back = substitute(&n, s, &sub).unwrap();
            prop_assert_eq!(back.truth_table().unwrap(), n.truth_table().unwrap());
        }
    }
}
