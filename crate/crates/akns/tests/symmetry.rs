use akns::families::{seed_soliton, Bundle, DeltaProfile, Scalar};
use akns::verify::{symmetry_residual, GeneratorCoeffs, GeneratorMode, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn seed(delta: DeltaProfile) -> Bundle {
    seed_soliton(Scalar::real(1.0), delta).unwrap()
}

fn worst(b: &Bundle, g: &GeneratorCoeffs) -> f64 {
    let grid = Grid::new((-6.0, 6.0), 25, (-2.0, 2.0), 9);
    grid.points()
        .iter()
        .flat_map(|p| symmetry_residual::<f64>(b, g, p.x, p.t).unwrap())
        .map(|r| r.normalized())
        .fold(0.0, f64::max)
}

#[test]
fn nonlocal_symmetry_original_mode() {
    let g = GeneratorCoeffs {
        c4: 1.0,
        ..Default::default()
    };
    let w = worst(&seed(DeltaProfile::Constant(1.0)), &g);
    assert!(w < 1e-10, "{w:e}");
}

#[test]
fn nonlocal_symmetry_enlarged_mode() {
    let g = GeneratorCoeffs {
        c3: -1.0,
        mode: GeneratorMode::Enlarged,
        ..Default::default()
    };
    for d in [DeltaProfile::Constant(1.0), DeltaProfile::Polynomial(vec![0.8, 0.1])] {
        let w = worst(&seed(d), &g);
        assert!(w < 1e-10, "{w:e}");
    }
}

#[test]
fn lie_point_sector() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let deltas = [DeltaProfile::Constant(1.0), DeltaProfile::Polynomial(vec![1.0, 0.2, -0.05])];
    for i in 0..20 {
        let g = GeneratorCoeffs {
            c1: rng.gen_range(-1.0..1.0),
            c2: rng.gen_range(-1.0..1.0),
            c3: rng.gen_range(-1.0..1.0),
            ffun: (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            ..Default::default()
        };
        let w = worst(&seed(deltas[i % 2].clone()), &g);
        assert!(w < 1e-10, "generator {g:?}: {w:e}");
    }
}

#[test]
fn enlarged_sector_with_all_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let g = GeneratorCoeffs {
            c1: rng.gen_range(-1.0..1.0),
            c2: rng.gen_range(-1.0..1.0),
            c3: rng.gen_range(-1.0..1.0),
            c4: rng.gen_range(-1.0..1.0),
            c5: rng.gen_range(-1.0..1.0),
            ffun: (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            mode: GeneratorMode::Enlarged,
        };
        let w = worst(&seed(DeltaProfile::Polynomial(vec![1.0, 0.3])), &g);
        assert!(w < 1e-10, "generator {g:?}: {w:e}");
    }
}

#[test]
fn non_generator_is_rejected() {
    // u ↦ φ₁² is not a symmetry direction
    let b = seed(DeltaProfile::Constant(1.0));
    let g = GeneratorCoeffs {
        c4: 1.0,
        ..Default::default()
    };
    let swapped = Bundle::Probed {
        base: Box::new(b),
        probe: akns::families::Probe::SwapPhi,
    };
    assert!(worst(&swapped, &g) > 1e-3);
}
