// Copyright 2026 The mmfock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use super::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn fock(n: usize) -> OccupationAmplitudes {
    OccupationAmplitudes::new(1, n, vec![(vec![n], Complex64::new(1.0, 0.0))]).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

#[test]
fn zero_phase_is_identity() {
    let s = Preset::Psi1(3).arm_state().unwrap();
    let input = TwoArmState::product(&s, &s).unwrap();
    let out = evolve(&s, &s, 0.0).unwrap();
    assert_eq!(input.amps.len(), out.amps.len());
    for (k, z) in &input.amps {
        assert!((out.amps[k] - z).norm() < 1e-15);
    }
}

#[test]
fn hong_ou_mandel() {
    let one = fock(1);
    let out = evolve(&one, &one, PI / 2.0).unwrap();
    assert!((out.amplitude(&[2], &[0]).norm_sqr() - 0.5).abs() < 1e-14);
    assert!((out.amplitude(&[0], &[2]).norm_sqr() - 0.5).abs() < 1e-14);
    assert!(out.amplitude(&[1], &[1]).norm() < 1e-15);
}

#[test]
fn half_turn_swaps_arms() {
    let a = Preset::Psi1(2).arm_state().unwrap();
    let b = Preset::Psi2(3).arm_state().unwrap();
    let input = TwoArmState::product(&a, &b).unwrap();
    let out = evolve(&a, &b, PI).unwrap();
    for ((ta, tb), z) in &input.amps {
        let moved: usize = tb.iter().sum();
        let sign = if moved % 2 == 1 { -1.0 } else { 1.0 };
        assert!((out.amplitude(tb, ta) - z * sign).norm() < 1e-14);
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let a = Preset::Psi1(3).arm_state().unwrap();
    let b = Preset::Psi2(2).arm_state().unwrap();
    let (phi, h) = (0.37, 1e-5);
    let dpsi = derivative_state(&a, &b, phi).unwrap();
    let plus = evolve(&a, &b, phi + h).unwrap();
    let minus = evolve(&a, &b, phi - h).unwrap();
    for (k, z) in &plus.amps {
        let fd = (z - minus.amps.get(k).copied().unwrap_or_default()) / (2.0 * h);
        let exact = dpsi.amps.get(k).copied().unwrap_or_default();
        assert!((fd - exact).norm() < 1e-8, "{k:?}: {fd} vs {exact}");
    }
    // Tangent vector is orthogonal to the state.
    let psi = evolve(&a, &b, phi).unwrap();
    assert!(psi.inner(&dpsi).norm() < 1e-12);
}

#[test]
fn vacuum_has_no_derivative() {
    let vac = OccupationAmplitudes::new(2, 0, vec![(vec![0, 0], Complex64::new(1.0, 0.0))]).unwrap();
    assert!(derivative_state(&vac, &vac, 0.3).unwrap().amps.is_empty());
    assert_eq!(qfi_pure(&vac, &vac).unwrap(), 0.0);
}

#[test]
fn occupation_formula() {
    for n in [2usize, 4, 10, 100] {
        let h = n as f64 / 2.0;
        let q = qfi_from_occupations(&[h], &[h]).unwrap();
        assert_eq!(q, n as f64 * (1.0 + n as f64 / 2.0));
    }
    assert_eq!(qfi_from_occupations(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
    assert!(qfi_from_occupations(&[-0.1], &[1.0]).is_err());
    assert!(qfi_from_occupations(&[1.0], &[1.0, 2.0]).is_err());
    // Twin superradiant shares of 0.45N, 0.04N, 0.01N per arm.
    let n = 100.0;
    let occ = [0.45 * n, 0.04 * n, 0.01 * n];
    let q = qfi_from_occupations(&occ, &occ).unwrap();
    assert!((q - n) / (n * n) > 0.40 && (q - n) / (n * n) < 0.42);
}

#[test]
fn pure_qfi_matches_closed_forms() {
    let tf = Preset::TwinFock(2).arm_state().unwrap();
    assert!((qfi_pure(&tf, &tf).unwrap() - 4.0).abs() < 1e-12);
    let tf = Preset::TwinFock(10).arm_state().unwrap();
    assert!((qfi_pure(&tf, &tf).unwrap() - 60.0).abs() < 1e-10);

    // Diagonal one-body density: the occupation formula holds.
    let s2 = Preset::Psi2(5).arm_state().unwrap();
    let occ = s2.occupations();
    let q2 = qfi_pure(&s2, &s2).unwrap();
    assert!((q2 - qfi_from_occupations(&occ, &occ).unwrap()).abs() < 1e-10);
    assert!((q2 - 35.0).abs() < 1e-10);

    // psi1 carries inter-mode coherence, which the density form accounts for.
    let s1 = Preset::Psi1(5).arm_state().unwrap();
    let rho = one_body_density(&s1);
    let q1 = qfi_pure(&s1, &s1).unwrap();
    assert!((q1 - qfi_from_densities(&rho, &rho).unwrap()).abs() < 1e-10);
    assert!(q1 > 35.0);
}

#[test]
fn qfi_is_phase_independent() {
    let s = Preset::Psi1(4).arm_state().unwrap();
    let q0 = qfi_pure(&s, &s).unwrap();
    for phi in [0.2, 1.1, 2.9] {
        let psi = evolve(&s, &s, phi).unwrap();
        let dpsi = derivative_state(&s, &s, phi).unwrap();
        let q = 4.0 * (dpsi.norm_sqr() - dpsi.inner(&psi).norm_sqr());
        assert!((q - q0).abs() < 1e-10);
    }
}

#[test]
fn lossless_and_fully_lossy_limits() {
    let s = Preset::Psi2(3).arm_state().unwrap();
    let lossless = lossy_distribution(&s, &s, 0.4, 1.0, Granularity::Mnr).unwrap();
    let psi = evolve(&s, &s, 0.4).unwrap();
    for o in &lossless.entries {
        assert!((o.p - psi.amplitude(&o.a, &o.b).norm_sqr()).abs() < 1e-15);
    }
    let dark = lossy_distribution(&s, &s, 0.4, 0.0, Granularity::Nr).unwrap();
    assert_eq!(dark.entries.len(), 1);
    assert_eq!((dark.entries[0].a.clone(), dark.entries[0].b.clone()), (vec![0], vec![0]));
    assert!((dark.entries[0].p - 1.0).abs() < 1e-14);
    assert!(lossy_distribution(&s, &s, 0.4, 1.2, Granularity::Nr).is_err());
}

#[test]
fn distributions_are_normalized() {
    let s = Preset::Psi1(3).arm_state().unwrap();
    for eta in [1.0, 0.95, 0.9, 0.5] {
        for g in [Granularity::Mnr, Granularity::Nr] {
            let dist = lossy_distribution(&s, &s, 0.8, eta, g).unwrap();
            assert!((dist.total() - 1.0).abs() < 1e-12);
            assert!(dist.entries.iter().map(|o| o.dp).sum::<f64>().abs() < 1e-12);
            assert!(dist.entries.iter().all(|o| o.p >= 0.0));
        }
    }
}

#[test]
fn twin_fock_limit_at_zero_phase() {
    let tf = Preset::TwinFock(2).arm_state().unwrap();
    for g in [Granularity::Mnr, Granularity::Nr] {
        let dist = lossy_distribution(&tf, &tf, 0.0, 1.0, g).unwrap();
        let rep = cfi_report(&dist);
        assert!((rep.value - 4.0).abs() < 1e-12);
        assert!(rep.dropped_mass < 1e-14);
    }
}

#[test]
fn mode_resolved_counting_saturates_qfi() {
    for s in [Preset::Psi1(5).arm_state().unwrap(), Preset::Psi2(5).arm_state().unwrap()] {
        let q = qfi_pure(&s, &s).unwrap();
        for phi in [0.1, 0.5, 1.0] {
            let c = cfi(&lossy_distribution(&s, &s, phi, 1.0, Granularity::Mnr).unwrap());
            assert!(close(c, q, 1e-9), "{c} vs {q}");
        }
        let c = cfi(&lossy_distribution(&s, &s, 1e-4, 1.0, Granularity::Nr).unwrap());
        assert!(close(c, q, 1e-3));
    }
    let s = Preset::Psi2(5).arm_state().unwrap();
    let nr = cfi(&lossy_distribution(&s, &s, PI / 4.0, 1.0, Granularity::Nr).unwrap());
    let mnr = cfi(&lossy_distribution(&s, &s, PI / 4.0, 1.0, Granularity::Mnr).unwrap());
    assert!(nr < mnr - 1e-6);
}

#[test]
fn scan_rows_follow_grid() {
    let s = Preset::Psi2(2).arm_state().unwrap();
    let rows = cfi_scan(&s, &s, &[0.1, 0.2], &[1.0, 0.9], Granularity::Nr).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[1].eta, rows[1].phi), (1.0, 0.2));
    assert_eq!(rows[0].snl, 4.0);
    let single = cfi(&lossy_distribution(&s, &s, 0.2, 0.9, Granularity::Nr).unwrap());
    assert_eq!(rows[3].c, single);
    assert!(cfi_scan(&s, &s, &[], &[1.0], Granularity::Nr).is_err());
}

#[test]
fn presets_parse_and_normalize() {
    assert_eq!("twin-fock 10".parse::<Preset>().unwrap(), Preset::TwinFock(10));
    assert_eq!("psi1=5".parse::<Preset>().unwrap(), Preset::Psi1(5));
    assert_eq!(Preset::Psi2(5).to_string(), "psi2 5");
    assert!("psi3 5".parse::<Preset>().is_err());
    assert!(Preset::TwinFock(3).arm_state().is_err());
    for p in [Preset::TwinFock(4), Preset::Psi1(5), Preset::Psi2(5)] {
        assert!((p.arm_state().unwrap().norm - 1.0).abs() < 1e-14);
    }
}

#[test]
fn limits_are_enforced() {
    let big = fock(13);
    assert!(matches!(TwoArmState::product(&big, &big), Err(Error::BudgetExceeded { .. })));
    let lim = Limits { max_arm_photons: 13, max_modes: 3 };
    assert!(TwoArmState::product_with(&big, &big, &lim).is_ok());
    let two = Preset::Psi2(1).arm_state().unwrap();
    assert!(TwoArmState::product(&big, &two).is_err());
}

fn arb_arm(d: usize, n: usize) -> impl Strategy<Value = OccupationAmplitudes> {
    let tuples = crate::numeric::compositions(n, d);
    let len = tuples.len();
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |c| {
        let amps = tuples.iter().cloned().zip(c.into_iter().map(|(re, im)| Complex64::new(re, im))).collect();
        let s = OccupationAmplitudes::new(d, n, amps).unwrap();
        if s.norm > 1e-6 { s.normalized().unwrap() } else { s }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn evolution_is_unitary(
        (a, b) in (0usize..=5, 0usize..=5).prop_flat_map(|(n, m)| (arb_arm(2, n), arb_arm(2, m))),
        phi in -3.2f64..3.2,
    ) {
        let input = TwoArmState::product(&a, &b).unwrap();
        let out = evolve(&a, &b, phi).unwrap();
        prop_assert!((out.norm_sqr() - input.norm_sqr()).abs() < 1e-10);
        prop_assert_eq!(out.photon_totals(), input.photon_totals());
    }

    #[test]
    fn coarse_graining_loses_information(
        (a, b) in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| (arb_arm(2, n), arb_arm(2, m))),
        phi in 0.05f64..3.0,
        eta in prop_oneof![Just(1.0), 0.5f64..1.0],
    ) {
        prop_assume!(a.norm > 1e-6 && b.norm > 1e-6);
        let mnr = cfi(&lossy_distribution(&a, &b, phi, eta, Granularity::Mnr).unwrap());
        let nr = cfi(&lossy_distribution(&a, &b, phi, eta, Granularity::Nr).unwrap());
        prop_assert!(nr <= mnr * (1.0 + 1e-9) + 1e-9);
        prop_assert!(mnr <= qfi_pure(&a, &b).unwrap() * (1.0 + 1e-9) + 1e-9);
    }
}
