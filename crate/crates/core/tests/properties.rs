use proptest::prelude::*;
use snaking_core::comparison::{ComparisonBundle, ComparisonConstants, SmoothStep};
use snaking_core::geometry::{project, Curve, Projection, TubeFrame};
use snaking_core::profile::{beta, pressure, pressure_inverse, profile_value, wave_pressure};
use snaking_core::ProblemParams;

fn constants() -> ComparisonConstants {
    ComparisonConstants {
        r0: 0.2,
        r1: 0.05,
        r2: 0.1,
        r2_prime: 0.15,
        m_sub: 50.0,
        b_super: 10.0,
        b: 100.0,
        delta: 1e-6,
        blend_sigma_window: 2.0,
    }
}

fn bundle(eps_prime: f64) -> ComparisonBundle {
    let p = ProblemParams::new(3, 0.5, 1.0, 0.9, eps_prime).unwrap();
    ComparisonBundle::new(p, Curve::line(3, (-10.0, 10.0)).unwrap(), constants())
}

proptest! {
    #[test]
    fn beta_matches_the_naive_formula_when_safe(sigma in -10.0f64..10.0, rho in 0.01f64..10.0) {
        let naive = sigma.hypot(rho) + sigma;
        prop_assert!(beta(sigma, rho) > 0.0);
        prop_assert!((beta(sigma, rho) - naive).abs() <= 1e-12 * sigma.hypot(rho));
    }

    #[test]
    fn profile_and_wave_pressure_agree(n in 2usize..=4, m in 0.4f64..0.9, sigma in -50.0f64..5.0, rho in 1e-3f64..3.0) {
        let p = ProblemParams::wave(n, m, 1.3).unwrap();
        let w = pressure(m, profile_value(&p, sigma, rho));
        let direct = wave_pressure(&p, sigma, rho);
        prop_assert!((w - direct).abs() <= 1e-10 * direct);
    }

    #[test]
    fn pressure_round_trips(m in 0.05f64..0.95, u in 1e-6f64..1e6) {
        let back = pressure_inverse(m, pressure(m, u));
        prop_assert!((back - u).abs() <= 1e-10 * u);
    }

    #[test]
    fn smooth_step_is_a_decreasing_cutoff(lo in -3.0f64..1.0, width in 0.01f64..2.0, t in -0.5f64..1.5) {
        let step = SmoothStep::new(lo, lo + width);
        let j = step.eval(lo + t * width);
        prop_assert!((0.0..=1.0).contains(&j.value));
        prop_assert!(j.d1 <= 0.0);
        prop_assert!(j.d1.is_finite() && j.d2.is_finite());
    }

    #[test]
    fn larger_eps_prime_widens_the_bracket(a in 0.01f64..0.4, gap in 0.01f64..0.4, r in 1e-4f64..0.3, sigma in -100.0f64..2.0) {
        let (lo, hi) = (bundle(a), bundle(a + gap));
        prop_assert!(hi.u_minus(r, sigma) <= lo.u_minus(r, sigma));
        prop_assert!(hi.u_plus(r, sigma) >= lo.u_plus(r, sigma));
        prop_assert!(hi.u_bar(r, sigma) >= lo.u_bar(r, sigma) * (1.0 - 1e-14));
    }

    #[test]
    fn projection_recovers_tubular_coordinates(s in -8.0f64..8.0, r in 1e-3f64..0.3, angle in 0.0f64..std::f64::consts::TAU) {
        let curve = Curve::helix(3, 1.0, 1.0, (-10.0, 10.0)).unwrap();
        let frame = TubeFrame::new(&curve, curve.window(), 0.01);
        let w = [angle.cos(), angle.sin()];
        let x = frame.point(&curve, s, r, &w);
        let tp = match project(&curve, &x, curve.r_tilde0()).unwrap() {
            Projection::Inside(tp) => tp,
            Projection::Outside => return Err(TestCaseError::fail("point left the tube")),
        };
        prop_assert!((tp.s - s).abs() <= 1e-8);
        prop_assert!((tp.r - r).abs() <= 1e-8);
        // projecting the rebuilt point changes nothing
        let rebuilt = frame.point(&curve, tp.s, tp.r, &w);
        let again = project(&curve, &rebuilt, curve.r_tilde0()).unwrap().inside();
        prop_assert!(again.is_some_and(|t| (t.s - tp.s).abs() <= 1e-10 && (t.r - tp.r).abs() <= 1e-10));
    }
}
