use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rislab::channel::{
    correlation_matrix, psd_sqrt, snr, ArrayGrid, ChannelRealization, Complex64, CorrelationSpec, RiceanLink,
    RiceanLinkSpec, SteeringSpec, ZERO_CHANNEL_SNR_DB,
};
use rislab::configuration::RisConfiguration;
use rislab::scenario::Scenario;

fn link(kappa: f64, grid: ArrayGrid, lambda: f64) -> RiceanLink {
    RiceanLink::new(&RiceanLinkSpec {
        beta: 2.0,
        kappa,
        steering: SteeringSpec::on_grid(grid, 0.5, 71.95, 25.1),
        correlation: CorrelationSpec::new(grid, lambda),
    })
    .unwrap()
}

#[test]
fn scattered_part_has_the_correlation_of_the_surface() {
    // kappa = 0 leaves only sqrt(beta) R^{1/2} u, so E[h h^H] = beta R.
    let grid = ArrayGrid::new(3, 3);
    let lambda = 0.25;
    let l = link(0.0, grid, lambda);
    let r = correlation_matrix(&CorrelationSpec::new(grid, lambda), 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let draws = 40_000;
    let mut cov = DMatrix::<Complex64>::zeros(9, 9);
    for _ in 0..draws {
        let h = l.draw(&mut rng);
        cov += &h * h.adjoint();
    }
    cov /= Complex64::new(draws as f64, 0.0);
    for i in 0..9 {
        for j in 0..9 {
            let want = 2.0 * r[(i, j)];
            assert!((cov[(i, j)].re - want).abs() < 0.05, "({i},{j}) {} vs {want}", cov[(i, j)].re);
            assert!(cov[(i, j)].im.abs() < 0.05);
        }
    }
}

#[test]
fn correlation_square_root_reconstructs_the_matrix() {
    let spec = CorrelationSpec::new(ArrayGrid::factorize(38), 0.3);
    let r = correlation_matrix(&spec, 38).unwrap();
    let s = psd_sqrt(&r).unwrap();
    assert!((&s * s.transpose() - &r).abs().max() < 1e-9);
    for i in 0..38 {
        assert!((r[(i, i)] - 1.0).abs() < 1e-9);
    }
}

#[test]
fn pure_line_of_sight_is_deterministic() {
    let l = link(1e12, ArrayGrid::new(2, 2), 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = l.draw(&mut rng);
    let b = l.draw(&mut rng);
    assert!((a - b).norm() < 1e-4);
}

#[test]
fn snr_matches_the_closed_form() {
    let h_bu = nalgebra::DVector::from_vec(vec![Complex64::new(0.5, 0.0)]);
    let h_br = DMatrix::from_element(1, 2, Complex64::new(1.0, 0.0));
    let h_ru = nalgebra::DVector::from_vec(vec![Complex64::new(0.25, 0.0), Complex64::new(0.0, 0.25)]);
    let ch = ChannelRealization::new(h_bu, h_br, h_ru, 10.0, -20.0).unwrap();
    // bit 1 maps to -1: h = 0.5 - 0.25 + 0.25i
    let got = snr(&ch, &RisConfiguration::from_bits(&[1, 0])).unwrap();
    let want = 10.0 + 20.0 + 10.0 * (0.25f64.powi(2) + 0.25f64.powi(2)).log10();
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn zero_channel_reports_the_sentinel() {
    let zero = Complex64::new(0.0, 0.0);
    let ch = ChannelRealization::new(
        nalgebra::DVector::from_element(1, zero),
        DMatrix::from_element(1, 3, zero),
        nalgebra::DVector::from_element(3, zero),
        0.0,
        0.0,
    )
    .unwrap();
    assert_eq!(snr(&ch, &RisConfiguration::zeros(3)).unwrap(), ZERO_CHANNEL_SNR_DB);
}

#[test]
fn scenario_model_draws_are_reproducible() {
    let model = Scenario::default().with_elements(38).channel_model().unwrap();
    let a = model.draw(&mut ChaCha8Rng::seed_from_u64(9));
    let b = model.draw(&mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(a.h_bu(), b.h_bu());
    assert_eq!(a.h_ru(), b.h_ru());
    assert_eq!((a.m(), a.n()), (1, 38));
}
