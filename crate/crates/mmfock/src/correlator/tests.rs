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

use num_complex::{Complex, Complex64};
use proptest::prelude::*;

use super::*;
use crate::emitter::{kerr_spec, superradiant_spec};
use crate::modes::commutator;
use crate::numeric::{lower, Mp};
use crate::oracle;

fn mode(g: f64, w: f64) -> ExpMode {
    ExpMode::new(g, w).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn norm_examples() {
    assert!((norm::<f64>(&superradiant_spec(1, 2.5, 0.3).unwrap()).unwrap() - 1.0).abs() < 1e-15);
    assert!((norm::<f64>(&superradiant_spec(3, 1.0, 0.0).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    assert!((norm::<f64>(&kerr_spec(5, 1.0, 0.0, 0.3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn chain_dimension_matches_state_count() {
    assert_eq!(chain_dimension(10, 2), Some(16 * 9));
    assert_eq!(chain_dimension(3, 4), None);
    let s = superradiant_spec(5, 1.0, 0.0).unwrap();
    let m = [mode(1.0, 0.0), mode(2.0, 0.1), mode(0.5, -0.2)];
    for q in 0..=3 {
        let sc = SparseChain::<f64>::build(&s, &m[..q], &m[..q]).unwrap();
        assert_eq!(sc.dim, chain_dimension(5, q).unwrap());
    }
}

#[test]
fn sparse_operator_power_reproduces_sweep() {
    let s = kerr_spec(4, 1.0, 0.4, 0.25).unwrap();
    let l = [mode(1.3, 0.2), mode(0.6, 0.9)];
    let r = [mode(2.0, -0.1), mode(0.9, 0.3)];
    let sc = SparseChain::<f64>::build(&s, &l, &r).unwrap();
    let mut v = vec![Complex64::new(0.0, 0.0); sc.dim];
    // Longest path has N + q transitions.
    for _ in 0..=(4 + 2) {
        v = sc.apply(&v);
    }
    let again = sc.apply(&v);
    assert!(again.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-15));
    let g = normal_ordered::<f64>(&s, &l, &r).unwrap();
    assert!(rel(v[sc.target], g) < 1e-13);
}

#[test]
fn chain_single_photon_examples() {
    let g1 = 1.7;
    let w1 = 0.35;
    let s = superradiant_spec(1, g1, w1).unwrap();
    let matched = chain_i::<f64>(&s, &[mode(g1, w1)], &[mode(g1, w1)]).unwrap();
    assert!((matched - 1.0).norm() < 1e-14);
    let (x, y, xt, yt) = (0.8, -0.3, 2.4, 1.1);
    let got = chain_i::<f64>(&s, &[mode(x, y)], &[mode(xt, yt)]).unwrap();
    let ket = (x * g1).sqrt() / Complex64::new((x + g1) / 2.0, w1 - y);
    let bra = (xt * g1).sqrt() / Complex64::new((xt + g1) / 2.0, -(w1 - yt));
    assert!(rel(got, ket * bra) < 1e-14);
}

#[test]
fn correlator_single_photon_matched() {
    let s = superradiant_spec(1, 1.0, 0.0).unwrap();
    let m = mode(1.0, 0.0);
    assert!((correlator::<f64>(&s, &[m], &[m]).unwrap() - 2.0).norm() < 1e-14);
    assert!((photon_number::<f64>(&s, &m).unwrap() - 1.0).abs() < 1e-14);
    let far = photon_number::<f64>(&s, &mode(1.0, 1e6)).unwrap();
    assert!(far < 1e-11);
}

#[test]
fn rejects_bad_requests() {
    let s = superradiant_spec(2, 1.0, 0.0).unwrap();
    let m = mode(1.0, 0.0);
    assert!(matches!(correlator::<f64>(&s, &[m, m, m], &[m, m, m]), Err(Error::OrderExceedsPhotons { .. })));
    assert!(matches!(correlator::<f64>(&s, &[m], &[m, m]), Err(Error::UnbalancedRequest { .. })));
    assert!(chain_i::<f64>(&s, &[m, m, m], &[m, m, m]).is_err());
    assert!(CorrelatorRequest::new(s.clone(), vec![], vec![]).is_err());
    assert_eq!(normal_ordered::<f64>(&s, &[m, m, m], &[m, m, m]).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn two_photon_expansion_matches_explicit_formula() {
    let s = superradiant_spec(2, 1.0, 0.2).unwrap();
    let (l1, l2) = (mode(1.1, 0.3), mode(2.2, 0.0));
    let (r1, r2) = (mode(0.7, 0.4), mode(1.6, -0.1));
    let c = commutator;
    let i1 = |a: ExpMode, b: ExpMode| chain_i::<f64>(&s, &[a], &[b]).unwrap();
    let n = 2.0;
    let explicit = c(&l1, &r1) * c(&l2, &r2)
        + c(&l1, &r2) * c(&l2, &r1)
        + n * (c(&l1, &r1) * i1(l2, r2) + c(&l1, &r2) * i1(l2, r1) + c(&l2, &r1) * i1(l1, r2) + c(&l2, &r2) * i1(l1, r1))
        + n * (n - 1.0) * chain_i::<f64>(&s, &[l1, l2], &[r1, r2]).unwrap();
    let got = correlator::<f64>(&s, &[l1, l2], &[r1, r2]).unwrap();
    assert!(rel(got, explicit) < 1e-13);
    let direct = oracle::correlator_direct(&s, &[l1, l2], &[r1, r2]).unwrap();
    assert!(rel(got, direct) < 1e-10);
}

// Reference value from the brute-force oracle, frozen.
#[test]
fn frozen_three_photon_second_order_value() {
    let s = superradiant_spec(3, 1.0, 0.3).unwrap();
    let l = [mode(1.1, 0.2), mode(2.3, -0.4)];
    let r = [mode(0.9, 0.1), mode(1.7, 0.5)];
    let got = correlator::<f64>(&s, &l, &r).unwrap();
    let frozen = Complex64::new(FROZEN_RE, FROZEN_IM);
    assert!(rel(got, frozen) < 1e-10, "{got}");
}
const FROZEN_RE: f64 = 14.19747026605776;
const FROZEN_IM: f64 = -6.055034162462364;

#[test]
fn extended_precision_agrees_with_f64() {
    let s = kerr_spec(30, 1.0, 0.5, 0.2).unwrap();
    let l = [mode(3.0, 2.0), mode(9.0, 5.0)];
    let r = [mode(4.0, 1.0), mode(6.0, 3.0)];
    let a = correlator::<f64>(&s, &l, &r).unwrap();
    let b: Complex<Mp> = correlator::<Mp>(&s, &l, &r).unwrap();
    assert!(rel(a, lower(&b)) < 1e-10);
    assert!((norm::<Mp>(&s).unwrap().to_f64() - 1.0).abs() < 1e-30);
}

#[test]
fn overlap_examples() {
    let s = superradiant_spec(1, 1.4, 0.6).unwrap();
    let m = [mode(1.4, 0.6)];
    assert!((overlap_amplitude::<f64>(&s, &m, &[1]).unwrap() - 1.0).norm() < 1e-14);
    assert_eq!(overlap_amplitude::<f64>(&s, &m, &[2]).unwrap(), Complex64::new(0.0, 0.0));
    let (x, y) = (0.5, -1.2);
    let got = overlap_amplitude::<f64>(&s, &[mode(x, y)], &[1]).unwrap();
    let expect = (x * 1.4f64).sqrt() / Complex64::new((x + 1.4) / 2.0, 0.6 - y);
    assert!(rel(got, expect) < 1e-14);
    assert_eq!(overlap_dimension(&[2, 0, 3]), 12);
    assert!(overlap_amplitude::<f64>(&s, &m, &[1, 0]).is_err());
}

#[test]
fn overlap_matches_oracle_examples() {
    let s = superradiant_spec(2, 1.0, 0.1).unwrap();
    let base = [mode(1.5, 0.1), mode(3.0, 0.4)];
    let a = overlap_amplitude::<f64>(&s, &base, &[1, 1]).unwrap();
    assert!(rel(a, oracle::overlap_direct(&s, &base, &[1, 1]).unwrap()) < 1e-9);
    let s = superradiant_spec(3, 1.0, 0.1).unwrap();
    let a = overlap_amplitude::<f64>(&s, &base, &[2, 1]).unwrap();
    assert!(rel(a, oracle::overlap_direct(&s, &base, &[2, 1]).unwrap()) < 1e-9);
}

#[test]
fn cache_counts_and_round_trip() {
    let s = superradiant_spec(3, 1.0, 0.0).unwrap();
    let base = crate::modes::ladder_family(8.0, 8, 0.0).unwrap();
    let cache = CorrelatorCache::<f64>::build(&s, &base, 2).unwrap();
    assert_eq!(cache.len(), 64 + 36 * 36);

    let small = crate::modes::ladder_family(3.0, 3, 0.0).unwrap();
    let cache = CorrelatorCache::<Mp>::build(&s, &small, 2).unwrap();
    let dir = std::env::temp_dir().join(format!("mmfock-cache-test-{}", std::process::id()));
    let path = cache.save(&dir).unwrap();
    let back = CorrelatorCache::<Mp>::load(&path, &s, &small, 2).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!(back.get1(i, j).unwrap() == cache.get1(i, j).unwrap());
            for k in 0..3 {
                for l in 0..3 {
                    assert!(back.get2(i, j, k, l).unwrap() == cache.get2(i, j, k, l).unwrap());
                }
            }
        }
    }
    let fresh = correlator::<Mp>(&s, &small[..1], &small[..1]).unwrap();
    assert!(fresh == cache.get1(0, 0).unwrap());
    let other = superradiant_spec(3, 1.0, 0.1).unwrap();
    assert!(matches!(
        CorrelatorCache::<Mp>::load(&path, &other, &small, 2),
        Err(Error::CacheMismatch { .. })
    ));
    assert!(matches!(CorrelatorCache::<f64>::load(&path, &s, &small, 2), Err(Error::CacheMismatch { .. })));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cache_symmetries() {
    let s = kerr_spec(3, 1.0, 0.3, 0.2).unwrap();
    let base = [mode(1.0, 0.2), mode(2.0, 0.5), mode(3.5, -0.3)];
    let cache = CorrelatorCache::<f64>::build(&s, &base, 2).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((cache.get1(i, j).unwrap() - cache.get1(j, i).unwrap().conj()).norm() < 1e-13);
            let direct = correlator::<f64>(&s, &[base[j], base[i]], &[base[0], base[2]]).unwrap();
            assert!(rel(cache.get2(i, j, 2, 0).unwrap(), direct) < 1e-13);
        }
    }
    assert!(CorrelatorCache::<f64>::build(&s, &base, 3).is_err());
}

#[test]
fn second_order_cache_at_one_photon() {
    let s = superradiant_spec(1, 1.0, 0.0).unwrap();
    let base = [mode(1.0, 0.0), mode(2.0, 0.0)];
    let cache = CorrelatorCache::<f64>::build(&s, &base, 2).unwrap();
    // b b b† b† on a single photon in the exact mode: 2 (pairings) + 4 n.
    let v = cache.get2(0, 0, 0, 0).unwrap();
    assert!((v - 6.0).norm() < 1e-13);
}

fn arb_mode() -> impl Strategy<Value = ExpMode> {
    (0.2f64..6.0, -3.0f64..3.0).prop_map(|(g, w)| mode(g, w))
}

fn arb_spec(n: usize) -> impl Strategy<Value = EmitterSpec> {
    (proptest::collection::vec(0.2f64..5.0, n), proptest::collection::vec(-3.0f64..3.0, n)).prop_map(|(g, w)| {
        let mut gamma = vec![0.0];
        gamma.extend(g);
        let mut omega = vec![0.0];
        omega.extend(w);
        EmitterSpec::new(omega, gamma).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hermiticity(spec in arb_spec(4), l in proptest::collection::vec(arb_mode(), 2), r in proptest::collection::vec(arb_mode(), 2)) {
        let a = correlator::<f64>(&spec, &l, &r).unwrap();
        let b = correlator::<f64>(&spec, &r, &l).unwrap();
        prop_assert!(rel(a, b.conj()) < 1e-12);
    }

    #[test]
    fn engine_matches_oracle(spec in arb_spec(3), l in proptest::collection::vec(arb_mode(), 2), r in proptest::collection::vec(arb_mode(), 2)) {
        for q in 0..=2 {
            let e = correlator::<f64>(&spec, &l[..q], &r[..q]).unwrap();
            let o = oracle::correlator_direct(&spec, &l[..q], &r[..q]).unwrap();
            prop_assert!(rel(e, o) < 1e-9, "q={} engine={} oracle={}", q, e, o);
        }
    }

    #[test]
    fn norm_is_one_for_random_ladders(spec in arb_spec(40)) {
        prop_assert!((norm::<f64>(&spec).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn photon_number_is_bounded(n in 1usize..60, g in 0.05f64..4.0, w in -2.0f64..2.0) {
        let s = superradiant_spec(n, 1.0, 0.0).unwrap();
        let v = photon_number::<f64>(&s, &mode(g * n as f64, w)).unwrap();
        prop_assert!(v >= -1e-12 && v <= n as f64 + 1e-9);
    }
}
