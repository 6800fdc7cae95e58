use akns::families::{finite_transform, seed_soliton, Bundle, DeltaProfile, FieldName, Fields, Probe, Scalar};
use akns::jet::{Axis, Jet2D, NT, NX};
use akns::specfun::{ellip_k, jacobi_sn_cn_dn};
use akns::verify::{akns_residual, lax_residual, symmetry_residual, GeneratorCoeffs, GeneratorMode};
use num_complex::Complex64;
use proptest::prelude::*;

fn jet_strategy() -> impl Strategy<Value = Jet2D<f64>> {
    prop::collection::vec(-2.0f64..2.0, (NX + 1) * (NT + 1)).prop_map(|v| {
        let mut c = [[0.0; NT + 1]; NX + 1];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = v[i * (NT + 1) + j];
            }
        }
        Jet2D::from_coeffs(c, 0.3, -0.2)
    })
}

fn close(a: &Jet2D<f64>, b: &Jet2D<f64>, tol: f64) -> bool {
    (0..=NX).all(|i| (0..=NT).all(|j| (a.coeff(i, j) - b.coeff(i, j)).abs() <= tol))
}

fn seed() -> Bundle {
    seed_soliton(Scalar::real(1.0), DeltaProfile::Constant(1.0)).unwrap()
}

proptest! {
    #[test]
    fn ring_axioms(a in jet_strategy(), b in jet_strategy(), c in jet_strategy()) {
        prop_assert!(close(&(a * b), &(b * a), 1e-12));
        prop_assert!(close(&((a * b) * c), &(a * (b * c)), 1e-10));
        prop_assert!(close(&((a + b) * c), &(a * c + b * c), 1e-11));
        prop_assert!(close(&(a - a), &Jet2D::constant(0.0, 0.3, -0.2), 0.0));
    }

    #[test]
    fn chain_rule_against_finite_differences(x in -1.5f64..1.5, t in -1.0f64..1.0) {
        let g = |x: f64, t: f64| (0.7 * x - 0.4 * t + 0.1 * x * t).tanh();
        let arg = |x: f64, t: f64| {
            let xj = Jet2D::<f64>::coord(Axis::X, x, t);
            let tj = Jet2D::<f64>::coord(Axis::T, x, t);
            (xj.scale(0.7) - tj.scale(0.4) + (xj * tj).scale(0.1)).tanh()
        };
        let j = arg(x, t);
        let h = 1e-4;
        let dx = (g(x + h, t) - g(x - h, t)) / (2.0 * h);
        let dt = (g(x, t + h) - g(x, t - h)) / (2.0 * h);
        let dxx = (g(x + h, t) - 2.0 * g(x, t) + g(x - h, t)) / (h * h);
        prop_assert!((j.d(1, 0) - dx).abs() < 1e-7);
        prop_assert!((j.d(0, 1) - dt).abs() < 1e-7);
        prop_assert!((j.d(2, 0) - dxx).abs() < 1e-5);
    }

    #[test]
    fn complex_and_real_agree_bitwise(x in -8.0f64..8.0, t in -4.0f64..4.0, eps in -0.4f64..0.4) {
        let b = finite_transform(&seed(), eps).unwrap();
        let r = b.eval::<f64>(x, t).unwrap();
        let c = b.eval::<Complex64>(x, t).unwrap();
        for (p, q) in r.as_array().iter().zip(c.as_array()) {
            for i in 0..=NX {
                for j in 0..=NT {
                    prop_assert_eq!(p.coeff(i, j).to_bits(), q.coeff(i, j).re.to_bits());
                    prop_assert_eq!(q.coeff(i, j).im, 0.0);
                }
            }
        }
    }

    #[test]
    fn sn_periodicity(u in -20.0f64..20.0, k in 0.0f64..0.99) {
        let kk = ellip_k(k).unwrap();
        let (s, c, d) = jacobi_sn_cn_dn(u, k).unwrap();
        let (s4, c4, d4) = jacobi_sn_cn_dn(u + 4.0 * kk, k).unwrap();
        let (s2, c2, _) = jacobi_sn_cn_dn(u + 2.0 * kk, k).unwrap();
        prop_assert!((s - s4).abs() < 1e-10 && (c - c4).abs() < 1e-10 && (d - d4).abs() < 1e-10);
        prop_assert!((s + s2).abs() < 1e-10 && (c + c2).abs() < 1e-10);
        let (sm, cm, dm) = jacobi_sn_cn_dn(-u, k).unwrap();
        prop_assert!((s + sm).abs() < 1e-14 && (c - cm).abs() < 1e-14 && (d - dm).abs() < 1e-14);
    }

    #[test]
    fn sn_addition_theorem(u in -5.0f64..5.0, v in -5.0f64..5.0, k in 0.0f64..0.99) {
        let (su, cu, du) = jacobi_sn_cn_dn(u, k).unwrap();
        let (sv, cv, dv) = jacobi_sn_cn_dn(v, k).unwrap();
        let (s, _, _) = jacobi_sn_cn_dn(u + v, k).unwrap();
        let want = (su * cv * dv + sv * cu * du) / (1.0 - k * k * su * su * sv * sv);
        prop_assert!((s - want).abs() < 1e-12);
    }

    #[test]
    fn group_law(e1 in -0.2f64..0.2, e2 in -0.2f64..0.2, x in -5.0f64..5.0, t in -2.0f64..2.0) {
        let twice = finite_transform(&finite_transform(&seed(), e1).unwrap(), e2).unwrap();
        let once = finite_transform(&seed(), e1 + e2).unwrap();
        let (a, b) = (twice.eval::<f64>(x, t).unwrap(), once.eval::<f64>(x, t).unwrap());
        for (p, q) in a.as_array().iter().zip(b.as_array()) {
            prop_assert!((p.value() - q.value()).abs() <= 1e-12 * q.value().abs().max(1.0));
        }
    }

    #[test]
    fn symmetry_residual_is_linear(
        c in prop::array::uniform5(-1.0f64..1.0),
        d in prop::array::uniform5(-1.0f64..1.0),
        x in -3.0f64..3.0,
        t in -1.0f64..1.0,
    ) {
        let b = Bundle::Probed { base: Box::new(seed()), probe: Probe::Add(FieldName::V, 0.2) };
        let mk = |c: [f64; 5]| GeneratorCoeffs {
            c1: c[0], c2: c[1], c3: c[2], c4: c[3], c5: c[4],
            ffun: vec![c[0], c[1]],
            mode: GeneratorMode::Enlarged,
        };
        let sum: [f64; 5] = std::array::from_fn(|i| c[i] + d[i]);
        let ra = symmetry_residual::<f64>(&b, &mk(c), x, t).unwrap();
        let rb = symmetry_residual::<f64>(&b, &mk(d), x, t).unwrap();
        let rs = symmetry_residual::<f64>(&b, &mk(sum), x, t).unwrap();
        for ((a, b), s) in ra.iter().zip(&rb).zip(&rs) {
            let tol = 1e-12 * (a.scale + b.scale + s.scale).max(1.0);
            prop_assert!((a.value + b.value - s.value).abs() < tol);
        }
    }

    #[test]
    fn normalized_residual_is_gauge_invariant(k in 0.1f64..10.0, x in -3.0f64..3.0, t in -1.0f64..1.0) {
        // u ↦ ku, v ↦ v/k, φ₂ ↦ kφ₂, f ↦ kf preserves the system
        let b = Bundle::Probed { base: Box::new(seed()), probe: Probe::Add(FieldName::U, 0.3) };
        let fl = b.eval::<f64>(x, t).unwrap();
        let sc = Fields {
            u: fl.u.scale(k),
            v: fl.v.scale(1.0 / k),
            phi2: fl.phi2.scale(k),
            f: fl.f.scale(k),
            ..fl
        };
        let (r0, r1) = (akns_residual(&fl, 1.0), akns_residual(&sc, 1.0));
        for (a, b) in r0.iter().zip(&r1) {
            prop_assert!((a.normalized() - b.normalized()).abs() <= 1e-12 * a.normalized() + 1e-14);
        }
        let (l0, l1) = (lax_residual(&fl, 1.0, 0.0), lax_residual(&sc, 1.0, 0.0));
        for (a, b) in l0.iter().zip(&l1) {
            prop_assert!((a.normalized() - b.normalized()).abs() <= 1e-12 * a.normalized() + 1e-14);
        }
    }
}

#[test]
fn complex_parameters_need_complex_scalars() {
    let b = seed_soliton(Scalar { re: 1.0, im: 0.5 }, DeltaProfile::Constant(1.0)).unwrap();
    assert!(b.needs_complex());
    assert!(b.eval::<f64>(0.0, 0.0).is_err());
    let f = b.eval::<Complex64>(0.1, 0.2).unwrap();
    for r in akns_residual(&f, Complex64::new(1.0, 0.5)) {
        assert!(r.normalized() < 1e-13);
    }
}
