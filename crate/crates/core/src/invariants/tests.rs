use super::*;
use crate::ambient::derived::{k_tensor, obstruction};
use crate::ambient::tests::{diag, metric_in, random_four, trace_free_sample};
use crate::scalar::Q;

fn agree(x: &MultiJet<Q>, y: &MultiJet<Q>) -> bool {
    jets_match(x, y)
}

fn random_six(order: u32) -> MetricData<Q> {
    metric_in(
        6,
        &[(0, 0, "1 + x2^2 - x1*x3/2"), (0, 1, "x3^2 + x1*x2"), (2, 3, "x1^2/3 - x2*x5"), (4, 5, "x1*x3 + x6^2"), (5, 5, "1 + x2*x4")],
        order,
        &[0, 1, 2, 3, 4, 5],
    )
}

#[test]
fn strength_counts_index_weights() {
    assert_eq!(strength(4, &[0]), 0);
    assert_eq!(strength(4, &[5, 5]), 4);
    assert_eq!(strength(4, &[5, 1, 2, 5]), 6);
    assert_eq!(strength(6, &[7, 1, 2, 7, 7]), 8);
    assert_eq!(strength(4, &[5, 1, 2, 5]), 4 + 2);
}

#[test]
fn flat_curvature_vanishes() {
    let m = diag(4, "1").metric_data::<Q>((), 4, &[0, 1]).unwrap();
    let sm = SmoothAmbient::new(&m, None).unwrap();
    let r = sm.ambient_curv_derivs(1).unwrap();
    assert!(r.comps.comps.iter().all(|c| c.is_zero()));
    let v = evaluate_contraction(library().find("curvature_norm").unwrap(), &sm).unwrap();
    assert!(v.scalar().unwrap().is_zero());
}

#[test]
fn infinity_component_is_half_k() {
    let m = random_four(0, 6);
    let sm = SmoothAmbient::new(&m, None).unwrap();
    let r = sm.ambient_curv_derivs(0).unwrap();
    let k = k_tensor(&m).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert!(agree(&r.get(&[5, i + 1, j + 1, 5]).scale_i64(2), k.get(&[i, j])));
        }
    }
    assert!(!r.is_natural(&[5, 1, 2, 5]));
    assert!(r.is_natural(&[5, 1, 2, 3]));
}

#[test]
fn tangential_curvature_is_weyl_in_dimension_six() {
    let m = random_six(4);
    let sm = SmoothAmbient::new(&m, None).unwrap();
    let r = sm.ambient_curv_derivs(0).unwrap().tangential();
    let w = m.weyl().unwrap();
    for (x, y) in r.comps.iter().zip(&w.comps) {
        assert!(agree(x, y));
    }
}

#[test]
fn ambient_obstruction_restricts_to_the_obstruction() {
    let m = random_four(1, 6);
    let sm = SmoothAmbient::new(&m, None).unwrap();
    let o_amb = sm.ambient_obstruction(0).unwrap();
    let o = obstruction(&m).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert!(agree(o_amb.get(&[i + 1, j + 1]), o.get(&[i, j])));
        }
    }
    for i in 0..6 {
        assert!(o_amb.get(&[0, i]).is_zero() && o_amb.get(&[0, i]).order() >= 0);
    }
    let v = evaluate_contraction(library().find("obstruction_norm").unwrap(), &sm).unwrap();
    assert_eq!(v.weight, -8);
    assert!(agree(v.scalar().unwrap(), &base::inner(&m, &o, &o)));
}

#[test]
fn weyl_weyl_obstruction_matches_the_base_formula() {
    let m = random_six(7);
    let sm = SmoothAmbient::new(&m, None).unwrap();
    let v = evaluate_contraction(library().find("weyl_weyl_obstruction").unwrap(), &sm).unwrap();
    let o = obstruction(&m).unwrap();
    let want = base::weyl_weyl_obstruction(&m, &o).unwrap();
    assert!(!want.is_zero());
    assert!(agree(v.scalar().unwrap(), &want), "{:?} vs {want:?}", v.scalar());
}

#[test]
fn hessian_invariant_uses_the_modified_ambiguity_in_dimension_four() {
    let m = random_four(0, 7);
    let a = trace_free_sample(&m);
    for with_a in [false, true] {
        let a_opt = with_a.then_some(a.as_slice());
        let sm = SmoothAmbient::new(&m, a_opt).unwrap();
        let v = evaluate_contraction(library().find("curvature_obstruction_hessian").unwrap(), &sm).unwrap();
        let o = obstruction(&m).unwrap();
        let k = k_tensor(&m).unwrap();
        let a_mod = if with_a { k.add(&Tensor { dim: 4, rank: 2, comps: a.clone() }) } else { k };
        let want = base::curvature_obstruction_hessian(&m, &o, Some(&a_mod)).unwrap();
        assert!(agree(v.scalar().unwrap(), &want));
    }
}

fn jet(m: &MetricData<Q>, s: &str) -> MultiJet<Q> {
    let n = m.dim();
    crate::expr::Expr::parse(s, n).unwrap().to_jet(m.space(), &vec![Q::int(0); n]).unwrap()
}

fn chiral_four(k: usize, order: u32) -> MetricData<Q> {
    let cells: &[(usize, usize, &str)] = match k {
        0 => &[(0, 1, "x3*x4 + x1*x3"), (2, 3, "x1*x2 - x2*x4/2"), (0, 0, "1 + x2*x3"), (1, 2, "x1*x4")],
        1 => &[(0, 2, "x2*x4 - x1*x3"), (1, 3, "x1*x2 + 2*x3*x4"), (1, 1, "4 + x1*x4"), (0, 3, "x2*x3/3")],
        _ => &[(0, 1, "x1*x3 - 3*x2*x4"), (0, 3, "x1*x2 + x3^2"), (2, 2, "9/4 + x2*x4 - x1^3"), (1, 2, "x3*x4 + x1*x4")],
    };
    metric_in(4, cells, order, &[0, 1, 2, 3])
}

/// `η^{IJKL}R̃_{IJ}{}^{AB}R̃_{KLAB} = K (|W⁺|² - |W⁻|²)`.
const PONTRYAGIN_RATIO: i64 = 2;

#[test]
fn first_exceptional_invariant_is_a_fixed_multiple_of_the_signature_density() {
    for m in [random_four(0, 5), chiral_four(0, 5), chiral_four(1, 5), chiral_four(2, 5)] {
        let sm = SmoothAmbient::new(&m, None).unwrap();
        let v = evaluate_contraction(library().find("pontryagin").unwrap(), &sm).unwrap();
        assert_eq!(v.parity, Parity::Odd);
        assert_eq!(v.weight, -4);
        let sd = base::self_dual_difference(&m, &sm.volume_density().unwrap()).unwrap();
        assert!(agree(v.scalar().unwrap(), &sd.scale_i64(PONTRYAGIN_RATIO)));
    }
    assert!(!base::self_dual_difference(&random_four(0, 3), &MultiJet::from_i64(random_four(0, 3).space(), 1))
        .unwrap()
        .is_zero());
}

#[test]
fn exceptional_invariants_ignore_the_ambiguity_and_flip_with_orientation() {
    let m = chiral_four(1, 5);
    let a = trace_free_sample(&m);
    let twice: Vec<MultiJet<Q>> = a.iter().map(|c| c.scale_i64(2)).collect();
    let (f0, s0) = exceptional_n4(&SmoothAmbient::new(&m, None).unwrap()).unwrap();
    assert!(!f0.is_zero() && !s0.is_zero());
    for a in [&a, &twice] {
        let (f, s) = exceptional_n4(&SmoothAmbient::new(&m, Some(a)).unwrap()).unwrap();
        assert!(agree(&f, &f0) && agree(&s, &s0));
    }
    let r = m.reflect(0).unwrap();
    let (fr, sr) = exceptional_n4(&SmoothAmbient::new(&r, None).unwrap()).unwrap();
    assert!(agree(&fr, &f0.reflect(0).neg()));
    assert!(agree(&sr, &s0.reflect(0).neg()));
    let even = evaluate_contraction(library().find("curvature_norm").unwrap(), &SmoothAmbient::new(&r, None).unwrap())
        .unwrap();
    let even0 = evaluate_contraction(library().find("curvature_norm").unwrap(), &SmoothAmbient::new(&m, None).unwrap())
        .unwrap();
    assert!(agree(even.scalar().unwrap(), &even0.scalar().unwrap().reflect(0)));
}

#[test]
fn exceptional_invariants_vanish_when_conformally_flat() {
    let m = diag(4, "(1 + x1/2 - x2^2/3 + x3*x4)^2").metric_data::<Q>((), 5, &[0, 1, 2, 3]).unwrap();
    let (f, s) = exceptional_n4(&SmoothAmbient::new(&m, None).unwrap()).unwrap();
    assert!(f.is_zero() && f.order() >= 0);
    assert!(s.is_zero() && s.order() >= 0);
    let m6 = random_six(3);
    assert!(matches!(exceptional_n4(&SmoothAmbient::new(&m6, None).unwrap()), Err(Error::Input(_))));
}

#[test]
fn weyl_invariants_are_conformally_invariant() {
    let m = random_four(0, 6);
    let omega = jet(&m, "2 + x1 - x2*x3/3 + x4^2");
    let mh = m.conformal_rescale(&omega).unwrap();
    let (sm, smh) = (SmoothAmbient::new(&m, None).unwrap(), SmoothAmbient::new(&mh, None).unwrap());
    for name in ["curvature_norm", "obstruction_norm", "curvature_cubic"] {
        let s = library().find(name).unwrap();
        let v = evaluate_contraction(s, &sm).unwrap();
        let vh = evaluate_contraction(s, &smh).unwrap();
        let want = v.scalar().unwrap().mul(&omega.pow(v.weight as i64).unwrap());
        assert!(!want.is_zero());
        assert!(agree(vh.scalar().unwrap(), &want), "{name}");
    }
}

#[test]
fn tractor_d_definition_and_domain() {
    let m = random_four(0, 5);
    let sm = SmoothAmbient::new(&m, None).unwrap();
    let geo = sm.geometry();
    let rsharp = sm.r_sharp().unwrap();
    let h = AmbComp::smooth(-1, jet(&m, "1 + x1*x2 - x3^2").to_space(sm.space()).unwrap(), 0);
    // f = r_# h vanishes on 𝒢, and so does Df
    let f = Tensor { dim: 6, rank: 0, comps: vec![rsharp.mul(&h)] };
    let df = tractor_d(geo, &f, 1).unwrap();
    let at = sm.restrict(&df).unwrap();
    assert!(at.comps.iter().all(|c| c.is_zero() && c.order() >= 0));
    assert!(!sm.restrict(&geo.cov_deriv(&f).unwrap()).unwrap().comps.iter().all(|c| c.is_zero()));
    // t x^1 is linear in flat ambient coordinates, hence harmonic: Df = ∇̃f
    let flat = diag(4, "1").metric_data::<Q>((), 5, &[0, 1, 2, 3]).unwrap();
    let smf = SmoothAmbient::new(&flat, None).unwrap();
    let gf = smf.geometry();
    let x1 = AmbComp::smooth(1, jet(&flat, "x1").to_space(smf.space()).unwrap(), 0);
    let lin = Tensor { dim: 6, rank: 0, comps: vec![x1] };
    assert!(gf.laplacian(&lin).unwrap().comps[0].is_zero());
    let dl = tractor_d(gf, &lin, 1).unwrap();
    let grad = gf.cov_deriv(&lin).unwrap();
    for (x, y) in dl.comps.iter().zip(&grad.comps) {
        assert!(x.f.agrees_with(&y.f));
    }
    assert!(grad.comps.iter().any(|c| !c.is_zero()));
    let t = f.clone();
    // w = p + 1 - n/2 is excluded
    assert!(matches!(tractor_d(geo, &t, -1), Err(Error::Domain(_))));
}

#[test]
fn p_matrix_is_the_identity_for_constant_rescaling() {
    let m = random_four(1, 3);
    let ups = log_derivative(&jet(&m, "3")).unwrap();
    let p = p_matrix(&m, &ups);
    for ix in p.indices() {
        let want = if ix[0] == ix[1] { 1 } else { 0 };
        assert!(agree(p.get(&ix), &MultiJet::from_i64(m.space(), want)));
    }
}

#[test]
fn curvature_obeys_the_cotractor_law_in_dimension_six() {
    let m = random_six(5);
    let omega = jet(&m, "1 + x1/2 - x2*x3 + x6^2/3");
    let report = check_tractor_law(&m, &omega, 0, None).unwrap();
    assert!(report.passed(), "{report:?}");
}

#[test]
fn modified_ambiguity_transforms_by_the_explicit_law() {
    let m = random_four(2, 6);
    let a = trace_free_sample(&m);
    let omega = jet(&m, "1 + x1 - x2/2 + x3*x4/3");
    let rep = check_a_transform(&m, &a, &omega).unwrap();
    assert!(rep.display_agrees, "display");
    assert!(rep.resolve_agrees, "re-solve");
    assert!(rep.natural.passed(), "{:?}", rep.natural);
    let unit = jet(&m, "1");
    let rep = check_a_transform(&m, &a, &unit).unwrap();
    assert!(rep.passed());
    for (x, y) in rep.law_rhs.comps.iter().zip(&rep.a_mod.comps) {
        assert!(agree(x, y));
    }
}

#[test]
fn hessian_invariant_matches_the_four_term_formula_in_dimension_six() {
    let m = random_six(8);
    let sm = SmoothAmbient::new(&m, None).unwrap();
    let v = evaluate_contraction(library().find("curvature_obstruction_hessian").unwrap(), &sm).unwrap();
    let o = obstruction(&m).unwrap();
    let want = base::curvature_obstruction_hessian(&m, &o, None).unwrap();
    assert!(!want.is_zero());
    assert!(agree(v.scalar().unwrap(), &want), "{:?} vs {want:?}", v.scalar());
}
