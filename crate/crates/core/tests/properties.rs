mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, TAU};

use echo_compiler::colouring::{
    colour_single_pattern, colour_two_patterns, diagonal_distinctness, Colouring, SinglePattern,
};
use echo_compiler::compile::{compile, CompileOptions};
use echo_compiler::lattice::{
    islands, nearest_pairs, LatticeSpec, Orientation, Pair, TargetPattern,
};
use echo_compiler::ops::OpCounter;
use echo_compiler::schedule::Schedule;
use echo_compiler::time::Time;
use echo_compiler::timing::{plan_binary, plan_nested};
use echo_compiler::verify::{effective_evolution, verify_target};
use echo_compiler::walsh::{assign_walsh, embed_z_rotations, emit_schedule};
use proptest::prelude::*;

fn grid(rows: usize, cols: usize) -> LatticeSpec {
    LatticeSpec::uniform(rows, cols, 1.0, vec![]).unwrap()
}

/// Lattice dimensions plus a keep/drop mask over its couplings.
fn lattice_and_mask(max_side: usize) -> impl Strategy<Value = (usize, usize, Vec<bool>)> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(r, c)| {
        let n_edges = r * (c - 1) + c * (r - 1);
        (
            Just(r),
            Just(c),
            prop::collection::vec(any::<bool>(), n_edges),
        )
    })
}

fn masked_edges(rows: usize, cols: usize, mask: &[bool]) -> BTreeSet<Pair> {
    nearest_pairs(rows, cols)
        .zip(mask)
        .filter(|(_, &k)| k)
        .map(|(p, _)| p)
        .collect()
}

/// Closes a random edge set into complete islands, so the single pattern
/// has a chance to be feasible.
fn complete_islands(lattice: &LatticeSpec, edges: &BTreeSet<Pair>) -> TargetPattern {
    let t = TargetPattern::uniform(edges.iter().copied(), FRAC_PI_2);
    let d = islands(lattice, &t).unwrap();
    TargetPattern::uniform(
        lattice
            .couplings()
            .keys()
            .copied()
            .filter(|p| d.island_of[p.0] == d.island_of[p.1]),
        FRAC_PI_2,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn islands_partition_the_lattice((r, c, mask) in lattice_and_mask(6)) {
        let lattice = grid(r, c);
        let target = TargetPattern::uniform(masked_edges(r, c, &mask), 1.0);
        let d = islands(&lattice, &target).unwrap();
        let mut seen = vec![0; lattice.n_qubits()];
        for (i, members) in d.islands.iter().enumerate() {
            for &q in members {
                seen[q] += 1;
                prop_assert_eq!(d.island_of[q], i);
            }
        }
        prop_assert!(seen.iter().all(|&n| n == 1));
        for p in target.retained.keys() {
            prop_assert_eq!(d.island_of[p.0], d.island_of[p.1]);
        }
        for &(a, b) in &d.adjacency {
            prop_assert!(a < b);
            prop_assert!(d.neighbours(b).any(|x| x == a));
        }
    }

    #[test]
    fn two_patterns_retain_exactly_the_target((r, c, mask) in lattice_and_mask(5)) {
        let lattice = grid(r, c);
        let edges = masked_edges(r, c, &mask);
        let (row, col) = colour_two_patterns(&lattice, &edges).unwrap();
        let horizontal: BTreeSet<Pair> =
            edges.iter().copied().filter(|&p| lattice.orientation(p) == Some(Orientation::Horizontal)).collect();
        let vertical: BTreeSet<Pair> = edges.difference(&horizontal).copied().collect();
        prop_assert_eq!(row.retained_edges(), &horizontal);
        prop_assert_eq!(col.retained_edges(), &vertical);
        prop_assert!(row.n_colours() <= 4 && col.n_colours() <= 4);
    }

    #[test]
    fn two_patterns_keep_diagonals_apart((r, c, mask) in lattice_and_mask(5)) {
        let lattice = grid(r, c).with_diagonals(BTreeMap::new()).unwrap();
        let edges = masked_edges(r, c, &mask);
        let (row, col) = colour_two_patterns(&lattice, &edges).unwrap();
        prop_assert!(diagonal_distinctness(&lattice, &row));
        prop_assert!(diagonal_distinctness(&lattice, &col));
    }

    #[test]
    fn feasible_single_pattern_is_exact((r, c, mask) in lattice_and_mask(6)) {
        let lattice = grid(r, c);
        let target = complete_islands(&lattice, &masked_edges(r, c, &mask));
        if let SinglePattern::Feasible(col) = colour_single_pattern(&lattice, &target).unwrap() {
            prop_assert!(col.n_colours() <= 4);
            prop_assert_eq!(col.retained_edges(), &target.edges());
            let d = islands(&lattice, &target).unwrap();
            for p in lattice.hardware_pairs() {
                if d.island_of[p.0] != d.island_of[p.1] {
                    prop_assert_ne!(col.colour(p.0), col.colour(p.1));
                }
            }
        }
    }

    #[test]
    fn sign_matrix_round_trips(r in 1usize..=6, c in 1usize..=6, seed in any::<u64>()) {
        let lattice = grid(r, c);
        let n = r * c;
        let colours: Vec<u8> = (0..n).map(|q| ((seed >> (q % 32 * 2)) & 3) as u8).collect();
        let colouring = Colouring::new(&lattice, colours, 2).unwrap();
        let m = assign_walsh(&colouring, Time::new(3, 2), 1.0).unwrap();
        let s = emit_schedule(&m, None);
        let trace = s.sign_trace();
        let recovered: Vec<&Vec<i8>> =
            trace.durations.iter().zip(&trace.signs).filter(|(d, _)| !d.is_zero()).map(|(_, s)| s).collect();
        prop_assert_eq!(recovered.len(), m.n_slots());
        for (slot, signs) in recovered.iter().enumerate() {
            for q in 0..n {
                prop_assert_eq!(signs[q], m.rows[q][slot]);
            }
        }
        prop_assert!(trace.final_signs.iter().all(|&x| x == 1));
        prop_assert_eq!(s.pulse_count(), m.pulse_count());
        for q in 0..n {
            prop_assert!(m.row_integral(q).is_zero());
            for q2 in q + 1..n {
                let same = colouring.colour(q) == colouring.colour(q2);
                let want = if same { Time::new(3, 2) } else { Time::ZERO };
                prop_assert_eq!(m.weighted_product(q, q2), want);
            }
        }
    }

    #[test]
    fn single_pattern_pulse_bounds(side in 4usize..=5, mask in prop::collection::vec(any::<bool>(), 40)) {
        let lattice = grid(side, side);
        let q = side * side;
        let edges: BTreeSet<Pair> =
            lattice.couplings().keys().copied().zip(&mask).filter(|(_, &k)| k).map(|(p, _)| p).collect();
        let target = complete_islands(&lattice, &edges);
        if let SinglePattern::Feasible(col) = colour_single_pattern(&lattice, &target).unwrap() {
            let m = assign_walsh(&col, Time::ONE, 1.0).unwrap();
            let pulses = emit_schedule(&m, None).pulse_count();
            prop_assert!((2 * q..=3 * q).contains(&pulses), "{} pulses for q = {}", pulses, q);
        }
    }

    // On 2x2 the island is the most common colour and gets a cheap function.
    #[test]
    fn lone_coupling_costs_2q_plus_4(side in 3usize..=5, pick in any::<prop::sample::Index>()) {
        let lattice = grid(side, side);
        let pairs: Vec<Pair> = lattice.couplings().keys().copied().collect();
        let p = pairs[pick.index(pairs.len())];
        let c = compile(&lattice, &TargetPattern::uniform([p], FRAC_PI_2), CompileOptions::default()).unwrap();
        prop_assert_eq!(c.schedule.pulse_count(), 2 * side * side + 4);
    }

    #[test]
    fn z_embedding_leaves_pairs_untouched(
        (r, c, mask) in lattice_and_mask(4),
        z in prop::collection::vec(-20.0f64..20.0, 16),
    ) {
        let lattice = grid(r, c);
        let bare = TargetPattern::uniform(masked_edges(r, c, &mask), FRAC_PI_2);
        let a = compile(&lattice, &bare, CompileOptions::default()).unwrap().schedule;
        let zmap: BTreeMap<usize, f64> = (0..r * c).map(|q| (q, z[q])).collect();
        let b = embed_z_rotations(&a, &zmap).unwrap();
        let ea = effective_evolution(&a, &lattice).unwrap();
        let eb = effective_evolution(&b, &lattice).unwrap();
        for (p, pa) in &ea.pairs {
            prop_assert_eq!(pa.integral, eb.pairs[p].integral);
            prop_assert_eq!(pa.angle.map(f64::to_bits), eb.pairs[p].angle.map(f64::to_bits));
        }
        for (&q, &angle) in &zmap {
            prop_assert_eq!(eb.phase_z[q] - ea.phase_z[q], angle.rem_euclid(TAU));
        }
    }

    #[test]
    fn nested_is_exact_and_short(
        r in 1usize..=5,
        c in 2usize..=5,
        seed in any::<u64>(),
        fractions in prop::collection::vec(0.01f64..=1.0, 40),
    ) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let lattice = echo_compiler::bench::random_strength_lattice(r, c, &mut rng).unwrap();
        let mut target = TargetPattern::empty();
        for (p, f) in lattice.couplings().keys().zip(&fractions) {
            target.retained.insert(*p, FRAC_PI_2 * f);
        }
        let plan = plan_nested(&lattice, &target, &mut OpCounter::default()).unwrap();
        prop_assert!(plan.total_time() <= Time::from_integer(2));
        let s = plan.to_schedule(&lattice).unwrap();
        prop_assert_eq!(s.pulse_count(), plan.pulse_count(&lattice));
        let report = verify_target(&s, &lattice, &target, 1e-12);
        prop_assert!(report.passed && report.exact, "{:?}", report.error);
        let ints = common::integrals(&s, &common::all_local_pairs(&lattice));
        prop_assert!(ints.offsets.iter().all(|t| t.is_zero()));
    }

    #[test]
    fn binary_error_bound_and_monotone_in_k(
        c in 2usize..=5,
        angles in prop::collection::vec(1e-6f64..=FRAC_PI_2, 8),
        k in 1u32..=30,
    ) {
        let lattice = grid(2, c);
        let mut target = TargetPattern::empty();
        for (p, a) in lattice.couplings().keys().zip(&angles) {
            target.retained.insert(*p, *a);
        }
        let coarse = plan_binary(&lattice, &target, k, &mut OpCounter::default()).unwrap();
        let fine = plan_binary(&lattice, &target, k + 1, &mut OpCounter::default()).unwrap();
        prop_assert!(coarse.total_time() < Time::from_integer(2));
        let s = coarse.to_schedule(&lattice).unwrap();
        let report = verify_target(&s, &lattice, &target, 1.0);
        for (p, &theta) in &target.retained {
            let range = coarse.angle_range(&lattice, *p);
            let realized = report.pair(*p).unwrap().realized_rad;
            let err = (realized - theta).abs();
            prop_assert!(err <= range * 0.5f64.powi(k as i32) + 1e-14, "{} > bound at k = {}", err, k);
            let e_coarse = coarse.required[p] - coarse.realized[p];
            let e_fine = fine.required[p] - fine.realized[p];
            prop_assert!(e_fine <= e_coarse && !e_fine.0.numer().is_negative());
        }
    }

    #[test]
    fn concatenation_adds_evolutions((r, c, m1) in lattice_and_mask(4), m2 in prop::collection::vec(any::<bool>(), 24)) {
        let offsets: Vec<f64> = (0..r * c).map(|q| q as f64 * 0.3 - 1.0).collect();
        let lattice = LatticeSpec::uniform(r, c, 1.0, offsets).unwrap();
        let t1 = TargetPattern::uniform(masked_edges(r, c, &m1), FRAC_PI_2);
        let t2 = TargetPattern::uniform(masked_edges(r, c, &m2[..m1.len()]), FRAC_PI_2 / 3.0);
        let a = compile(&lattice, &t1, CompileOptions::default()).unwrap().schedule;
        let b = compile(&lattice, &t2, CompileOptions::default()).unwrap().schedule;
        let mut ab: Schedule = a.clone();
        ab.append(b.clone()).unwrap();
        let (ea, eb, eab) = (
            effective_evolution(&a, &lattice).unwrap(),
            effective_evolution(&b, &lattice).unwrap(),
            effective_evolution(&ab, &lattice).unwrap(),
        );
        for (p, x) in &eab.pairs {
            prop_assert_eq!(x.integral, ea.pairs[p].integral + eb.pairs[p].integral);
            let sum = ea.pairs[p].angle.unwrap() + eb.pairs[p].angle.unwrap();
            prop_assert!((x.angle.unwrap() - sum).abs() < 1e-12);
        }
        for q in 0..r * c {
            prop_assert_eq!(eab.offset_integrals[q], ea.offset_integrals[q] + eb.offset_integrals[q]);
        }
    }

    #[test]
    fn scaling_durations_scales_angles((r, c, mask) in lattice_and_mask(4), shift in 0i32..6, num in 1i128..20, den in 1i128..20) {
        let lattice = grid(r, c);
        let target = TargetPattern::uniform(masked_edges(r, c, &mask), FRAC_PI_2);
        let s = compile(&lattice, &target, CompileOptions::default()).unwrap().schedule;
        let e = effective_evolution(&s, &lattice).unwrap();

        // Power-of-two factors scale floats exactly; other rationals are
        // checked on the exact integrals.
        let pow = Time::from_integer(1 << shift);
        let rat = Time::new(num, den);
        for (factor, exact_angles) in [(pow, true), (rat, false)] {
            let mut scaled = s.clone();
            for seg in &mut scaled.segments {
                seg.duration = seg.duration * factor;
            }
            let es = effective_evolution(&scaled, &lattice).unwrap();
            for (p, x) in &e.pairs {
                prop_assert_eq!(es.pairs[p].integral, x.integral * factor);
                if exact_angles {
                    prop_assert_eq!(es.pairs[p].angle.unwrap(), x.angle.unwrap() * factor.to_f64());
                }
            }
        }
    }
}
