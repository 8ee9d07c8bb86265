//! The effective two-oscillator drift/diffusion pair against the ten scalar
//! second-moment equations written out one by one.

use nalgebra::DMatrix;
use phononflux_core::dynamics::{assemble_effective_two, evolve, lyapunov_solve, occupations};
use phononflux_core::{CovarianceState, EffectiveTwoOscModel, ModeLayout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ⟨x₁²⟩, ⟨x₂²⟩, ⟨x₁x₂⟩, ⟨{x₁,p₁}⟩, ⟨{x₂,p₂}⟩, ⟨{x₁,p₂}⟩, ⟨{x₂,p₁}⟩, ⟨p₁²⟩, ⟨p₂²⟩, ⟨p₁p₂⟩
type Moments = [f64; 10];

fn moments_of(v: &DMatrix<f64>) -> Moments {
    let (x1, p1, x2, p2) = (0, 1, 2, 3);
    [
        v[(x1, x1)],
        v[(x2, x2)],
        v[(x1, x2)],
        2.0 * v[(x1, p1)],
        2.0 * v[(x2, p2)],
        2.0 * v[(x1, p2)],
        2.0 * v[(x2, p1)],
        v[(p1, p1)],
        v[(p2, p2)],
        v[(p1, p2)],
    ]
}

/// Right-hand sides written term by term. Cross-mode products commute, so
/// ⟨x_i p_j⟩ = ⟨{x_i, p_j}⟩/2 for i ≠ j; the same-mode pair in the ⟨p₁p₂⟩
/// equation enters as the symmetrised product ⟨{x_j, p_j}⟩/2.
fn literal_rhs(m: &EffectiveTwoOscModel, y: &Moments) -> Moments {
    let (w, l, g, gb) = (m.omega, m.lambda_coupling, m.gamma, m.gamma_bar);
    let [x11, x22, x12, a11, a22, a12, a21, p11, p22, p12] = *y;
    let (x1p2, x2p1) = (a12 / 2.0, a21 / 2.0);
    let damp = 2.0 * g + gb;
    let common = gb * (2.0 * m.n_common + 1.0);
    [
        w * a11,
        w * a22,
        w * (x1p2 + x2p1),
        2.0 * w * (p11 - x11) - 2.0 * l * x12 - damp * a11 - 2.0 * gb * x1p2,
        2.0 * w * (p22 - x22) - 2.0 * l * x12 - damp * a22 - 2.0 * gb * x2p1,
        2.0 * w * (p12 - x12) - 2.0 * l * x11 - 2.0 * damp * x1p2 - gb * a11,
        2.0 * w * (p12 - x12) - 2.0 * l * x22 - 2.0 * damp * x2p1 - gb * a22,
        -w * a11 - 2.0 * l * x2p1 - 2.0 * damp * p11 - 2.0 * gb * p12
            + (2.0 * g * (2.0 * m.n1 + 1.0) + common),
        -w * a22 - 2.0 * l * x1p2 - 2.0 * damp * p22 - 2.0 * gb * p12
            + (2.0 * g * (2.0 * m.n2 + 1.0) + common),
        -w * (x1p2 + x2p1) - l * (a11 / 2.0 + a22 / 2.0) - 2.0 * damp * p12
            - gb * (p11 + p22)
            + common,
    ]
}

fn random_model(rng: &mut ChaCha8Rng) -> EffectiveTwoOscModel {
    EffectiveTwoOscModel::new(
        rng.gen_range(0.1..10.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.0..2.0),
        rng.gen_range(0.0..2.0),
        rng.gen_range(0.0..20.0),
        rng.gen_range(0.0..20.0),
        rng.gen_range(0.0..5.0),
    )
    .unwrap()
}

#[test]
fn covariance_flow_reproduces_every_moment_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = random_model(&mut rng);
        let lm = assemble_effective_two(&m).unwrap();
        let r = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-3.0..3.0));
        let v = (&r + r.transpose()) * 0.5;
        let vdot = &lm.drift * &v + &v * lm.drift.transpose() + &lm.diffusion;
        let from_matrix = moments_of(&vdot);
        let literal = literal_rhs(&m, &moments_of(&v));
        for (a, b) in from_matrix.iter().zip(&literal) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst <= 1e-12, "max deviation {worst:e}");
}

#[test]
fn uncoupled_oscillators_thermalise_independently() {
    let m = EffectiveTwoOscModel::new(3.0, 0.0, 0.2, 0.0, 7.0, 2.0, 0.0).unwrap();
    let v = lyapunov_solve(&assemble_effective_two(&m).unwrap()).unwrap();
    let n = occupations(&v).unwrap();
    assert!((n[0] - 7.0).abs() < 1e-10 && (n[1] - 2.0).abs() < 1e-10, "{n:?}");
}

#[test]
fn common_and_independent_baths_at_one_temperature() {
    // a position coupling Λ ≠ 0 correlates x₁ and x₂ in the Gibbs state, so only
    // Λ = 0 gives an exact product of thermal states
    let m = EffectiveTwoOscModel::new(5.0, 0.0, 0.3, 0.4, 2.5, 2.5, 2.5).unwrap();
    let v = lyapunov_solve(&assemble_effective_two(&m).unwrap()).unwrap();
    for n in occupations(&v).unwrap() {
        assert!((n - 2.5).abs() < 1e-10);
    }
    let report = phononflux_core::dynamics::heat_flows_weak(
        &v,
        &[(m.gamma, m.n1), (m.gamma, m.n2)],
        m.omega,
        phononflux_core::Solver::OdeSteady,
    )
    .unwrap();
    assert!(report.flows.iter().all(|j| j.abs() < 1e-9));
}

#[test]
fn closed_form_worked_example_matches_moment_steady_state() {
    // γ=1, γ̄=2, Λ=0, n=(10, 2), n̄=0 → (6, 2)
    for omega in [1e3, 1e4] {
        let m = EffectiveTwoOscModel::new(omega, 0.0, 1.0, 2.0, 10.0, 2.0, 0.0).unwrap();
        let v = lyapunov_solve(&assemble_effective_two(&m).unwrap()).unwrap();
        let n = occupations(&v).unwrap();
        let tol = 10.0 / omega;
        assert!((n[0] - 6.0).abs() / 6.0 < tol && (n[1] - 2.0).abs() / 2.0 < tol, "{omega}: {n:?}");
    }
}

#[test]
fn transient_relaxes_to_lyapunov_state() {
    let m = EffectiveTwoOscModel::new(2.0, 0.5, 0.5, 0.3, 6.0, 1.0, 0.2).unwrap();
    let lm = assemble_effective_two(&m).unwrap();
    let vss = lyapunov_solve(&lm).unwrap();
    let v0 = CovarianceState::vacuum(ModeLayout::Elements(2));
    let t_final = 20.0 / m.gamma;
    let tr = evolve(&lm, &v0, t_final, 0.01).unwrap();
    let dist = (&tr.last().matrix - &vss.matrix).abs().max();
    assert!(dist <= 1e-8, "{dist:e}");
}
