mod common;

use std::ops::Neg;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use tensorcas::kernel::{diff, eval, integrate_basic, simplify, trig_normalize};
use tensorcas::notation::print_plain;
use tensorcas::session::Session;
use tensorcas::Expr;

fn value(e: &Expr, theta: f64, r: f64) -> f64 {
    eval(e, &point(theta, r)).unwrap_or_else(|err| panic!("eval {}: {err}", print_plain(e)))
}

#[test]
fn diff_matches_finite_differences() {
    let mut g = rng(100);
    let h = 1e-6;
    for i in 0..100 {
        let src = random_scalar(&mut g, 3);
        let e = p(&src);
        let (theta, r) = (g.gen_range(0.2..1.3), g.gen_range(0.5..3.0));
        for var in ["theta", "r"] {
            let d = diff(&e, var).unwrap();
            let got = value(&d, theta, r);
            let (fp, fm) = if var == "theta" {
                (value(&e, theta + h, r), value(&e, theta - h, r))
            } else {
                (value(&e, theta, r + h), value(&e, theta, r - h))
            };
            let want = (fp - fm) / (2.0 * h);
            assert!(
                close(got, want, 1e-6),
                "case {i}: d/d{var} {src}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn diff_inverts_integrate_basic() {
    let mut g = rng(101);
    for _ in 0..100 {
        let src = random_integrand(&mut g);
        let e = p(&src);
        let back = diff(&integrate_basic(&e, "x").unwrap(), "x").unwrap();
        let zero = simplify(&Expr::sum([back.clone(), e.clone().neg()])).unwrap();
        assert!(
            zero.is_zero(),
            "{src}: d/dx of the integral is {}",
            print_plain(&back)
        );
    }
}

#[test]
fn unsupported_integrands_are_errors() {
    assert!(integrate_basic(&p(r"\sin(x)"), "x").is_err());
    assert!(integrate_basic(&p("(1 + x)**(-1)"), "x").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn simplify_preserves_value_and_is_idempotent(seed in any::<u64>()) {
        let mut g = rng(seed);
        let e = p(&random_scalar(&mut g, 3));
        let (theta, r) = (g.gen_range(0.2..1.3), g.gen_range(0.5..3.0));
        let s = simplify(&e).unwrap();
        prop_assert!(close(value(&s, theta, r), value(&e, theta, r), 1e-9));
        prop_assert_eq!(simplify(&s).unwrap(), s.clone());
        let t = trig_normalize(&e).unwrap();
        prop_assert!(close(value(&t, theta, r), value(&e, theta, r), 1e-9));
        prop_assert_eq!(trig_normalize(&t).unwrap(), t);
    }
}

/// Contracts `g_{αβ} g^{βγ}` and checks the result is the identity
/// pattern over the two coordinates.
fn assert_identity(metric: &str) {
    let mut s = Session::default();
    let text = format!(
        r"{{\theta,\varphi}}::Coordinate.
{{\alpha,\beta,\gamma}}::Indices(values={{\varphi,\theta}}, position=fixed).
g_{{\alpha\beta}}::Metric.
g^{{\alpha\beta}}::InverseMetric.
g:= {metric}.
complete(g, $g^{{\alpha\beta}}$).
id:= g_{{\alpha\beta}} g^{{\beta\gamma}}.
evaluate(id, g)."
    );
    s.run_script(&text).unwrap();
    let Some(Expr::Components(c)) = s.binding("id") else {
        panic!("{metric}: no component table: {:?}", s.binding("id"));
    };
    assert_eq!(
        c.entries.len(),
        2,
        "{metric}: {}",
        print_plain(&Expr::Components(c.clone()))
    );
    for e in &c.entries {
        assert_eq!(e.values[0], e.values[1]);
        assert!(
            e.value.is_one(),
            "{metric}: entry {:?} = {}",
            e.values,
            print_plain(&e.value)
        );
    }
}

#[test]
fn metric_inverse_contracts_to_identity() {
    assert_identity(r"{g_{\theta\theta} = r**2, g_{\varphi\varphi} = r**2 \sin(\theta)**2}");
    assert_identity(r"{g_{\theta\theta} = a, g_{\varphi\varphi} = b}");
    let mut g = rng(102);
    for _ in 0..10 {
        let (a, b) = (g.gen_range(1..50), g.gen_range(1..50));
        let (c, d) = (g.gen_range(1..9), g.gen_range(1..9));
        assert_identity(&format!(
            r"{{g_{{\theta\theta}} = {a}/{c}, g_{{\varphi\varphi}} = -{b}/{d}}}"
        ));
    }
}

#[test]
fn reciprocal_products_stay_in_normal_form() {
    for src in [
        r"1/2 r**(-1) (r + \theta)**(-1)",
        r"(r (r + \theta))**(-2)",
        r"(1/2 \theta)**2",
    ] {
        let e = p(src);
        let s = simplify(&e).unwrap();
        assert_eq!(simplify(&s).unwrap(), s, "{src}");
        let t = trig_normalize(&e).unwrap();
        assert_eq!(trig_normalize(&t).unwrap(), t, "{src}");
        assert!(
            close(value(&s, 0.7, 1.3), value(&e, 0.7, 1.3), 1e-12),
            "{src}"
        );
    }
}
