//! Closed forms and brute-force recomputations checked against the library.

use vexle::expr::parse_expression;
use vexle::hardy::{
    dual_hardy_apply, example42_admissible, hardy_apply, hardy_constants, HardyConstants, EXAMPLE42_Q,
};
use vexle::inequalities::{
    check_embedding, check_monotone_integral, check_reverse_holder, check_reverse_minkowski, embedding_constant,
    mixed_norm_constant, Monotonicity,
};
use vexle::pathology::{dual_triviality_sequence, find_modular_split, nonconvexity_probe};
use vexle::sequences::{check_sequence_inequality, decaying_profile, example41_sequence, ExponentSeq, SeqMode};
use vexle::space::{
    build_grid, conjugate_norm, integrate, modular, quasi_norm, ExponentField, GridFunction, Grid, Interval,
    Regime, Scheme, WeightField,
};

const TOL: f64 = 1e-10;

fn unit(n: usize) -> Grid {
    build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Uniform, n, None).unwrap()
}

fn field(g: &Grid, text: &str, regime: Regime) -> ExponentField {
    ExponentField::from_expr(&parse_expression(text).unwrap(), g, regime).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

/// Midpoint sum of `h(x)` over `n` equal cells of `(0, 1)`.
fn midpoint(n: usize, h: impl Fn(f64) -> f64) -> f64 {
    let dx = 1.0 / n as f64;
    (0..n).map(|i| h((i as f64 + 0.5) * dx) * dx).sum()
}

/// Root of the increasing function `phi` on `(lo, hi)` by plain bisection.
fn bisect(mut lo: f64, mut hi: f64, phi: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn singular_integrand() {
    let g = build_grid(Interval::bounded(0.0, 1.0).unwrap(), Scheme::Geometric, 4096, None).unwrap();
    let f = GridFunction::from_fn(&g, |x| x.powf(-0.5)).unwrap();
    assert!((integrate(&f) - 2.0).abs() < 1e-3);
}

#[test]
fn modular_of_constant_with_affine_exponent() {
    let g = unit(4096);
    let p = field(&g, "1/4 + x/2", Regime::SubOne);
    let f = GridFunction::constant(&g, std::f64::consts::E).unwrap();
    let exact = 2.0 * (0.75f64.exp() - 0.25f64.exp());
    assert!((modular(&f, &p, &WeightField::unit(4096)).unwrap() - exact).abs() < 1e-6);
}

#[test]
fn norm_matches_refined_bisection() {
    let g = unit(1024);
    let p = field(&g, "1/4 + x/2", Regime::SubOne);
    let f = GridFunction::constant(&g, 2.0).unwrap();
    let norm = quasi_norm(&f, &p, &WeightField::unit(1024), TOL).unwrap();
    // I(2/l) decreases in l, so bisect on 1 - I
    let oracle = bisect(1.0, 100.0, |l| 1.0 - midpoint(10_240, |x| (2.0 / l).powf(0.25 + x / 2.0)));
    assert!(close(norm, oracle, 1e-6), "{norm} vs {oracle}");
}

#[test]
fn conjugate_norm_of_constant() {
    let g = unit(512);
    let p = ExponentField::constant(0.5, 512, Regime::SubOne).unwrap();
    for c in [0.3, 1.0, 7.5] {
        let gc = GridFunction::constant(&g, c).unwrap();
        let mu = conjugate_norm(&gc, &p, &WeightField::unit(512), TOL).unwrap();
        assert!(close(mu, c, 1e-8), "{mu} vs {c}");
    }
}

#[test]
fn conjugate_norm_matches_refined_bisection() {
    let g = unit(1024);
    let p = field(&g, "1/4 + x/2", Regime::SubOne);
    let one = GridFunction::constant(&g, 1.0).unwrap();
    let mu = conjugate_norm(&one, &p, &WeightField::unit(1024), TOL).unwrap();
    // int (1/m)^{p'} increases in m for p' < 0; the norm is where it reaches 1
    let oracle = bisect(1e-3, 1e3, |m| {
        midpoint(10_240, |x| {
            let p = 0.25 + x / 2.0;
            (1.0 / m).powf(p / (p - 1.0))
        }) - 1.0
    });
    assert!(close(mu, oracle, 1e-6), "{mu} vs {oracle}");
}

#[test]
fn embedding_constant_parts() {
    let g = unit(256);
    let p = ExponentField::constant(1.0 / 3.0, 256, Regime::SubOne).unwrap();
    let q = ExponentField::constant(0.5, 256, Regime::SubOne).unwrap();
    let w = WeightField::unit(256);
    let parts = embedding_constant(&g, &p, &q, &w, &w, TOL).unwrap();
    assert!(close(parts.a, 2.0 / 3.0, 1e-12));
    assert!(close(parts.b, 1.0 / 3.0, 1e-12));
    assert_eq!(parts.chi2, 0.0);
    assert!(close(parts.constant, 1.0, 1e-6), "{}", parts.constant);
}

#[test]
fn mixed_norm_constant_by_substitution() {
    let p = ExponentField::constant(1.0, 32, Regime::GeneralPositive).unwrap();
    let q = ExponentField::constant(2.0, 32, Regime::GeneralPositive).unwrap();
    // (0 + 1 + 1/2 - 1/2) (0 + 1)
    assert!(close(mixed_norm_constant(&p, &q).constant, 1.0, 1e-12));
    let q = ExponentField::constant(1.0, 32, Regime::GeneralPositive).unwrap();
    assert!(close(mixed_norm_constant(&p, &q).constant, 1.0, 1e-12));
    let p = ExponentField::from_values((0..32).map(|i| 1.0 + 0.5 * i as f64 / 31.0).collect(), Regime::GeneralPositive).unwrap();
    let q = ExponentField::from_values((0..32).map(|i| 2.0 + i as f64 / 31.0).collect(), Regime::GeneralPositive).unwrap();
    // (0 + 1 + 1.5/2 - 1/3) (0 + 1)
    assert!(close(mixed_norm_constant(&p, &q).constant, 1.75 - 1.0 / 3.0, 1e-12));
}

#[test]
fn averaging_modular_closed_form() {
    let half = parse_expression("0.5").unwrap();
    let one = parse_expression("1").unwrap();
    for m in [1usize, 10, 100, 10_000] {
        let r = nonconvexity_probe(&half, &one, Interval::bounded(0.0, 1.0).unwrap(), m, 0.01).unwrap();
        let exact = 0.01 * (m as f64).sqrt();
        assert!(close(r.average_modular, exact, 1e-6), "m = {m}");
    }
    let p = parse_expression("0.75").unwrap();
    let r = nonconvexity_probe(&p, &one, Interval::bounded(0.0, 1.0).unwrap(), 10_000, 0.01).unwrap();
    assert!(r.average_modular >= 0.1 * (1.0 - 1e-9));
}

#[test]
fn halving_closed_form() {
    let g = unit(1024);
    let p = ExponentField::constant(0.5, 1024, Regime::SubOne).unwrap();
    let f = GridFunction::constant(&g, 1.0).unwrap();
    let r = dual_triviality_sequence(&f, &p, &WeightField::unit(1024), 20).unwrap();
    for (n, i) in r.modulars.iter().enumerate() {
        assert!(close(*i, 2f64.powf(-(n as f64) / 2.0), 1e-6), "n = {n}");
    }
    assert!(close(r.modulars[1], 0.5f64.sqrt(), 1e-12));

    let quarter = GridFunction::from_fn(&g, |x| if x < 0.25 { 1.0 } else { 0.0 }).unwrap();
    let t = find_modular_split(&quarter, &p, &WeightField::unit(1024), 0.5).unwrap();
    assert!((t - 0.125).abs() < 1e-12);
}

#[test]
fn two_term_sequence() {
    let p = ExponentSeq::new(vec![0.5, 0.5], 0.5).unwrap();
    let r = check_sequence_inequality(&[1.0, 1.0], &p, SeqMode::Finite).unwrap();
    assert!(close(r.lhs, 2f64.sqrt(), 1e-15));
    assert!(close(r.mid, 2f64.sqrt(), 1e-15));
    assert!(close(r.rhs, 2.0, 1e-15));
    assert!(r.left_holds && r.right_holds);
}

#[test]
fn counterexample_harmonic_sum() {
    let e = example41_sequence(0.4, decaying_profile(0.4, 0.6), 10_000).unwrap();
    let h100: f64 = (1..=100).map(|k| 1.0 / k as f64).sum();
    assert!(close(e.harmonic, h100, 1e-14));
    assert!((e.harmonic - (100f64.ln() + 0.577_215_664_901_532_9)).abs() < 0.01);
    let far = example41_sequence(0.4, decaying_profile(0.4, 0.6), 1_000_000).unwrap();
    assert!(far.ratio() > e.ratio());
    assert!(far.first_exceed.is_some());
}

#[test]
fn hardy_of_indicators() {
    let g = build_grid(Interval::half_line(0.0).unwrap(), Scheme::Geometric, 2000, None).unwrap();
    let chi = GridFunction::from_fn(&g, |x| if x < 1.0 { 1.0 } else { 0.0 }).unwrap();
    let h = hardy_apply(&chi).unwrap();
    let d = dual_hardy_apply(&chi).unwrap();
    let cut = g.edges()[g.cell_of(1.0)];
    for ((x, hv), dv) in g.nodes().iter().zip(h.values()).zip(d.values.values()) {
        if *x < 0.5 {
            assert!(close(*hv, 1.0, 1e-12));
            assert!(close(*dv, (cut - x) / x, 1e-9), "{x}: {dv}");
        } else if *x > 2.0 {
            assert!(close(*hv, 1.0 / x, 0.02));
            assert_eq!(*dv, 0.0);
        }
    }

    let tail = GridFunction::from_fn(&g, |x| if x >= 1.0 { x.powi(-2) } else { 0.0 }).unwrap();
    let d = dual_hardy_apply(&tail).unwrap();
    for (x, dv) in g.nodes().iter().zip(d.values.values()) {
        if *x > 2.0 && *x < 1e4 {
            assert!(close(*dv, x.powi(-2), 0.02), "{x}: {dv}");
        }
    }
}

#[test]
fn hardy_constants_by_substitution() {
    let g = build_grid(Interval::half_line(0.0).unwrap(), Scheme::Geometric, 256, None).unwrap();
    let q = field(&g, EXAMPLE42_Q, Regime::SubOne);
    // p = 0.3 exceeds q = 1/4 on (0, 1), so check the formula on its parts
    let c = HardyConstants::from_components(0.0, 1.0, 1.0, 0.0, 0.3, 0.3, 0.25, 0.5);
    assert!(close(c.c_pq, 1.6, 1e-12));
    let p = ExponentField::constant(0.3, 256, Regime::SubOne).unwrap();
    assert!(hardy_constants(&p, &q).is_err());
    let p = ExponentField::constant(0.2, 256, Regime::SubOne).unwrap();
    let c = hardy_constants(&p, &q).unwrap();
    assert_eq!((c.chi_s1, c.chi_s2, c.chi_delta1, c.chi_delta2), (1.0, 0.0, 0.0, 1.0));
    assert!(close(c.c_pq, 1.4, 1e-12));
}

#[test]
fn weight_pair_substitution() {
    assert!(example42_admissible(-4.5, -3.0, 0.2));
    assert!(!example42_admissible(-3.9, -3.0, 0.2));
    assert!(!example42_admissible(-4.5, -1.0, 0.2));
}

#[test]
fn ratios_are_refinement_stable() {
    let ratios = |n: usize| {
        let g = unit(n);
        let p = field(&g, "0.3 + 0.4*x", Regime::SubOne);
        let q = field(&g, "0.75 + 0.1*x", Regime::SubOne);
        let w = WeightField::from_expr(&parse_expression("exp(-x)").unwrap(), &g).unwrap();
        let f = GridFunction::from_fn(&g, |x| 1.0 + x * x).unwrap();
        let h = GridFunction::from_fn(&g, |x| 2.0 - x).unwrap();
        let tol = 1e-10;
        [
            check_reverse_minkowski(&f, &h, &p, &w, tol).unwrap().ratio,
            // a variable exponent can make the Hoelder constant negative
            check_reverse_holder(&f, &h, &field(&g, "0.4", Regime::SubOne), &w, tol).unwrap().ratio,
            check_embedding(&f, &p, &q, &w, &w, tol).unwrap().ratio,
            check_monotone_integral(&h, 0.5, Monotonicity::Decreasing, tol).unwrap().ratio,
        ]
    };
    let (coarse, fine) = (ratios(512), ratios(1024));
    for (c, f) in coarse.iter().zip(&fine) {
        assert!(close(*c, *f, 1e-2), "{c} vs {f}");
    }
}
