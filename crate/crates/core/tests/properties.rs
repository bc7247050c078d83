//! Property tests: series algebra, the expression parser and base-side
//! invariants, in exact and float arithmetic.

use std::sync::Arc;

use ambient_core::ambient::derived::obstruction;
use ambient_core::expr::{Expr, MetricSpec};
use ambient_core::{JetSpace, LogSeries, MultiJet, Real, Scalar, Q};
use proptest::prelude::*;

const ORDER: u32 = 6;
const BITS: usize = 256;

type Term = ([u8; 4], i64, i64);

fn space<S: Scalar>(ctx: S::Ctx) -> Arc<JetSpace<S>> {
    JetSpace::new(ctx, 3, &[0, 1, 2], true, ORDER).unwrap()
}

/// Monomials in `x¹, x², x³, ρ` of weighted degree at most `ORDER`.
fn terms() -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(
        ([0u8..3, 0u8..3, 0u8..3, 0u8..2], -6i64..=6, 1i64..=5)
            .prop_filter("weight", |(e, _, _)| (e[0] + e[1] + e[2] + 2 * e[3]) as u32 <= ORDER),
        0..6,
    )
}

fn jet<S: Scalar>(sp: &Arc<JetSpace<S>>, c0: i64, ts: &[Term]) -> MultiJet<S> {
    ts.iter().fold(MultiJet::from_i64(sp, c0), |acc, (e, p, q)| {
        acc.add(&MultiJet::monomial(sp, e, S::from_ratio(sp.ctx(), *p, *q)).unwrap())
    })
}

fn same<S: Scalar>(a: &MultiJet<S>, b: &MultiJet<S>) -> bool {
    if S::EXACT {
        return a.agrees_with(b);
    }
    let scale = a.max_abs_f64().max(b.max_abs_f64()).max(1.0);
    a.sub(b).max_abs_f64() <= 1e-9 * scale
}

fn ring_laws<S: Scalar>(ctx: S::Ctx, a: &[Term], b: &[Term], c: &[Term]) {
    let sp = space::<S>(ctx);
    let (x, y, z) = (jet(&sp, 0, a), jet(&sp, 1, b), jet(&sp, -2, c));
    assert!(same(&x.mul(&y), &y.mul(&x)));
    assert!(same(&x.mul(&y).mul(&z), &x.mul(&y.mul(&z))));
    assert!(same(&x.mul(&y.add(&z)), &x.mul(&y).add(&x.mul(&z))));
    assert!(same(&x.add(&y).sub(&y), &x));
    assert!(same(&x.add(&x.neg()), &MultiJet::exact_zero(&sp)));
}

fn unit_identities<S: Scalar>(ctx: S::Ctx, a: &[Term], b: &[Term]) {
    let sp = space::<S>(ctx);
    let one = MultiJet::from_i64(&sp, 1);
    let u = jet(&sp, 1, a);
    let v = jet(&sp, 3, b);
    if u.constant_term().unwrap().is_zero() || v.constant_term().unwrap().is_zero() {
        return;
    }
    assert!(same(&u.mul(&u.inverse().unwrap()), &one));
    let w = u.sub(&MultiJet::constant(&sp, u.constant_term().unwrap())).add(&one);
    let r = w.sqrt().unwrap();
    assert!(same(&r.mul(&r), &w));
    assert!(same(&v.pow(3).unwrap().mul(&v.pow(-3).unwrap()), &one));
    assert!(same(&u.mul(&v).inverse().unwrap(), &u.inverse().unwrap().mul(&v.inverse().unwrap())));
}

fn leibniz<S: Scalar>(ctx: S::Ctx, a: &[Term], b: &[Term], i: usize) {
    let sp = space::<S>(ctx);
    let (x, y) = (jet(&sp, 2, a), jet(&sp, -1, b));
    let lhs = x.mul(&y).partial_x(i);
    let rhs = x.partial_x(i).mul(&y).add(&x.mul(&y.partial_x(i)));
    assert!(same(&lhs, &rhs));
    let lhs = x.mul(&y).partial_rho();
    let rhs = x.partial_rho().mul(&y).add(&x.mul(&y.partial_rho()));
    assert!(same(&lhs, &rhs));
}

fn reflection<S: Scalar>(ctx: S::Ctx, a: &[Term], b: &[Term], i: usize) {
    let sp = space::<S>(ctx);
    let (x, y) = (jet(&sp, 1, a), jet(&sp, 0, b));
    assert!(same(&x.reflect(i).reflect(i), &x));
    assert!(same(&x.mul(&y).reflect(i), &x.reflect(i).mul(&y.reflect(i))));
    assert!(same(&x.inverse().unwrap().reflect(i), &x.reflect(i).inverse().unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jets_form_a_commutative_ring(a in terms(), b in terms(), c in terms()) {
        ring_laws::<Q>((), &a, &b, &c);
    }

    #[test]
    fn float_jets_form_a_commutative_ring(a in terms(), b in terms(), c in terms()) {
        ring_laws::<Real>(BITS, &a, &b, &c);
    }

    #[test]
    fn inverse_sqrt_and_powers_agree(a in terms(), b in terms()) {
        unit_identities::<Q>((), &a, &b);
    }

    #[test]
    fn float_inverse_sqrt_and_powers_agree(a in terms(), b in terms()) {
        unit_identities::<Real>(BITS, &a, &b);
    }

    #[test]
    fn derivatives_obey_the_product_rule(a in terms(), b in terms(), i in 0usize..3) {
        leibniz::<Q>((), &a, &b, i);
    }

    #[test]
    fn float_derivatives_obey_the_product_rule(a in terms(), b in terms(), i in 0usize..3) {
        leibniz::<Real>(BITS, &a, &b, i);
    }

    #[test]
    fn reflection_is_an_involutive_ring_map(a in terms(), b in terms(), i in 0usize..3) {
        reflection::<Q>((), &a, &b, i);
    }

    #[test]
    fn truncation_commutes_with_products(a in terms(), b in terms(), k in 0i32..=6) {
        let sp = space::<Q>(());
        let (x, y) = (jet(&sp, 1, &a), jet(&sp, 2, &b));
        prop_assert!(x.truncate(k).mul(&y.truncate(k)).agrees_with(&x.mul(&y).truncate(k)));
        prop_assert!(x.truncate(k).order() <= k);
    }

    #[test]
    fn log_series_multiply_levelwise(a in terms(), b in terms(), c in terms(), d in terms()) {
        let sp = space::<Q>(());
        let series = |x: MultiJet<Q>, y: MultiJet<Q>| {
            let mut s = LogSeries::smooth(x, 1);
            s.set_level(1, y);
            s
        };
        let f = series(jet(&sp, 1, &a), jet(&sp, 0, &b));
        let g = series(jet(&sp, 2, &c), jet(&sp, 0, &d));
        let (f0, f1, g0, g1) = (f.level(0), f.level(1), g.level(0), g.level(1));
        let fg = f.mul(&g);
        prop_assert!(fg.level(0).agrees_with(&f0.mul(g0)));
        prop_assert!(fg.level(1).agrees_with(&f0.mul(g1).add(&f1.mul(g0))));
        prop_assert!(fg.mul(&g.inverse().unwrap()).agrees_with(&f));
    }

    #[test]
    fn printed_expressions_reparse_to_the_same_jet(a in terms(), b in terms()) {
        let sp = space::<Q>(());
        let base = vec![Q::int(0); 3];
        let src = format!("({}) * ({}) - ({})^2", poly(&a), poly(&b), poly(&a));
        let e = Expr::parse(&src, 3).unwrap();
        let back = Expr::parse(&e.to_string(), 3).unwrap();
        prop_assert!(e.to_jet(&sp, &base).unwrap().agrees_with(&back.to_jet(&sp, &base).unwrap()));
    }

    #[test]
    fn parsed_polynomials_match_direct_construction(a in terms(), b in terms()) {
        let sp = space::<Q>(());
        let base = vec![Q::int(0); 3];
        let flat = |ts: &[Term]| -> Vec<Term> { ts.iter().map(|(e, p, q)| ([e[0], e[1], e[2], 0], *p, *q)).collect() };
        let (fa, fb) = (flat(&a), flat(&b));
        let e = Expr::parse(&format!("({}) * ({})", poly(&fa), poly(&fb)), 3).unwrap();
        let want = jet(&sp, 0, &fa).mul(&jet(&sp, 0, &fb));
        prop_assert!(e.to_jet(&sp, &base).unwrap().agrees_with(&want));
    }

    #[test]
    fn parser_rejects_dangling_operators(a in terms(), op in prop::sample::select(vec!["+", "*", "/", "^"])) {
        let src = format!("{} {op}", poly(&a));
        prop_assert!(Expr::parse(&src, 3).is_err());
    }
}

/// `p/q*x1^a*x2^b*x3^c` summed; ρ exponents are ignored.
fn poly(ts: &[Term]) -> String {
    if ts.is_empty() {
        return "0".into();
    }
    ts.iter()
        .map(|(e, p, q)| format!("({p}/{q})*x1^{}*x2^{}*x3^{}", e[0], e[1], e[2]))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// `δ + h` with `h` a sum of rational monomials of degree 1 to 3.
fn metric_spec(cells: &[(usize, usize, i64, i64, [u8; 4])]) -> MetricSpec {
    let n = 4;
    let mut g: Vec<Vec<String>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { "1".to_string() } else { "0".into() }).collect()).collect();
    for (i, j, p, q, e) in cells {
        let mono = format!("({p}/{q})*x1^{}*x2^{}*x3^{}*x4^{}", e[0], e[1], e[2], e[3]);
        g[*i][*j] = format!("{} + {mono}", g[*i][*j]);
        if i != j {
            g[*j][*i] = g[*i][*j].clone();
        }
    }
    let rows: Vec<Vec<&str>> = g.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
    let refs: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
    MetricSpec::from_strings((4, 0), &refs).unwrap()
}

fn cells() -> impl Strategy<Value = Vec<(usize, usize, i64, i64, [u8; 4])>> {
    prop::collection::vec(
        (0usize..4, 0usize..4, -3i64..=3, 1i64..=4, [0u8..2, 0u8..2, 0u8..3, 0u8..2])
            .prop_filter("degree", |(i, j, p, _, e)| {
                let d: u8 = e.iter().sum();
                i <= j && *p != 0 && (1..=3).contains(&d)
            }),
        1..5,
    )
}

fn obstruction_identities<S: Scalar>(ctx: S::Ctx, cs: &[(usize, usize, i64, i64, [u8; 4])]) {
    let spec = metric_spec(cs);
    let m = spec.metric_data::<S>(ctx, 5, &[0, 1, 2, 3]).unwrap();
    let o = obstruction(&m).unwrap();
    let scale = o.comps.iter().map(|c| c.max_abs_f64()).fold(1.0, f64::max);
    let small = |x: &MultiJet<S>| if S::EXACT { x.is_zero() } else { x.max_abs_f64() <= 1e-9 * scale };
    assert!(small(&m.trace(&o)));
    assert!(m.divergence(&o).unwrap().comps.iter().all(small));
    for (x, y) in o.comps.iter().zip(&m.bach().unwrap().comps) {
        assert!(same(x, y));
    }
    for i in 0..4 {
        for j in 0..4 {
            assert!(same(o.get(&[i, j]), o.get(&[j, i])));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn obstruction_is_symmetric_trace_free_and_divergence_free(cs in cells()) {
        obstruction_identities::<Q>((), &cs);
    }

    #[test]
    fn float_obstruction_is_symmetric_trace_free_and_divergence_free(cs in cells()) {
        obstruction_identities::<Real>(BITS, &cs);
    }

    #[test]
    fn obstruction_is_even_under_reflection(cs in cells(), i in 0usize..4) {
        let m = metric_spec(&cs).metric_data::<Q>((), 5, &[0, 1, 2, 3]).unwrap();
        let o = obstruction(&m).unwrap();
        let r = obstruction(&m.reflect(i).unwrap()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let want = o.get(&[a, b]).reflect(i);
                let want = if (a == i) != (b == i) { want.neg() } else { want };
                prop_assert!(r.get(&[a, b]).agrees_with(&want));
            }
        }
    }
}
