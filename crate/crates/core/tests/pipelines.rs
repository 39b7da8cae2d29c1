use std::sync::Arc;

use num_complex::Complex64;
use psqm_core::io::{decode_field, encode_field, slice_csv};
use psqm_core::oscillators::{
    ho3d_idempotency, ho3d_state, nc_hamiltonian, nc_state, nc_wigner, radial_eigensolve,
};
use psqm_core::star::{bopp_operator, polygauss_apply};
use psqm_core::star_grid::star_apply_poly;
use psqm_core::wigner::{expectation, marginal};
use psqm_core::{Field, NcParams, PhaseGrid, PolynomialSymbol, PsqmError};

#[test]
fn closed_form_wigner_gives_the_energy() {
    // ∫ H f_W = E for a normalised star-eigenfunction
    for (nx, ny, theta) in [(0, 0, 0.0), (1, 0, 0.5), (1, 1, 1.0)] {
        let g = Arc::new(PhaseGrid::uniform(2, 8.0, 32, 1.0, theta).unwrap());
        let fw = nc_wigner(nx, ny, theta).unwrap().sample(g).unwrap();
        let e = expectation(&nc_hamiltonian(), &fw).unwrap();
        let exact = (1.0f64 + theta * theta).sqrt() * (nx + ny + 1) as f64;
        assert!(
            (e - exact).abs() < 1e-8,
            "({nx},{ny},{theta}): {e} vs {exact}"
        );
    }
}

#[test]
fn grid_hamiltonian_reproduces_the_exact_eigenvalue() {
    let theta = 0.5;
    let r = nc_state(1, 0, theta).unwrap();
    let g = Arc::new(PhaseGrid::uniform(2, 5.5, 32, 1.0, theta).unwrap());
    let psi = Field::sample_polygauss(g.clone(), &r.state.to_complex64()).unwrap();
    let nc = g.nc_params().unwrap();
    let h = nc_hamiltonian().to_complex64();
    let hpsi = star_apply_poly(&h, &psi, &nc).unwrap();
    let diff = hpsi
        .sub(&psi.scale(Complex64::new(r.energy, 0.0)))
        .unwrap()
        .max_abs();
    assert!(diff < 1e-9 * psi.max_abs(), "{diff}");
}

#[test]
fn exact_and_float_backends_agree_on_ho3d() {
    let r = ho3d_state(3).unwrap();
    let nc = NcParams::moyal(num_complex::Complex64::new(1.0, 0.0)).unwrap();
    let h = psqm_core::oscillators::ho3d_hamiltonian().to_complex64();
    let out = polygauss_apply(&bopp_operator(&h, &nc).unwrap(), &r.state.to_complex64()).unwrap();
    let u = [0.3, -0.2, 0.5, 0.1, 0.4, -0.7];
    let lhs = out.eval(&u);
    let rhs = r.state.to_complex64().eval(&u) * r.energy;
    assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1e-300));
}

#[test]
fn shell_projectors_are_idempotent_up_to_scale() {
    for n in 0..3 {
        assert!(ho3d_idempotency(n).unwrap().exact, "n = {n}");
    }
}

#[test]
fn radial_and_exact_spectra_agree() {
    let s = radial_eigensolve(4.0, 1000).unwrap();
    for (n, e) in s.energies.iter().enumerate() {
        let exact = ho3d_state(n as u32).unwrap().energy;
        assert!((e - exact).abs() < 1e-6);
    }
}

#[test]
fn wigner_field_survives_a_file_round_trip_and_slices() {
    let g = Arc::new(PhaseGrid::uniform(2, 5.0, 16, 1.0, 2.0).unwrap());
    let fw = nc_wigner(0, 1, 2.0).unwrap().sample(g).unwrap();
    let back = decode_field(&encode_field(&fw)).unwrap();
    assert_eq!(back, fw);
    let csv = slice_csv(&back, &[(1, 0.0), (3, 0.0)]).unwrap();
    assert_eq!(csv.lines().count(), 257);
    let rho = marginal(&back, &[0, 1]).unwrap();
    assert!((rho.integrate() - 1.0).abs() < 1e-12);
}

#[test]
fn theta_on_a_one_dimensional_grid_is_rejected() {
    let g = Arc::new(PhaseGrid::uniform(1, 5.0, 16, 1.0, 0.5).unwrap());
    let f = Field::constant(g.clone(), Complex64::new(1.0, 0.0));
    let a = PolynomialSymbol::<Complex64>::var(1, 0);
    assert!(matches!(
        g.nc_params().and_then(|nc| star_apply_poly(&a, &f, &nc)),
        Err(PsqmError::DimensionMismatch(_) | PsqmError::InvalidParameter(_))
    ));
}
