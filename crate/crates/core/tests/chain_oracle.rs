//! Equilibria and modes checked against a plain gradient-descent minimizer
//! and a cyclic Jacobi eigensolver written independently of the library.

use iontrap_core::chain::{
    axial_modes, equilibrium_positions, max_com_frequency, min_spacing, ChainGeometry,
};
use iontrap_core::SpeciesConstants;

fn force(u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let mut g = u[i];
            for j in 0..u.len() {
                if j != i {
                    let d = u[i] - u[j];
                    g -= d.signum() / (d * d);
                }
            }
            g
        })
        .collect()
}

/// Steepest descent from unit spacing with step 1/L, L the Gershgorin bound
/// on the local curvature.
fn brute_force_equilibrium(n: usize) -> Vec<f64> {
    let mut u: Vec<f64> = (0..n).map(|i| i as f64 - 0.5 * (n - 1) as f64).collect();
    for _ in 0..1_000_000 {
        let g = force(&u);
        if g.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-12 {
            return u;
        }
        let h = oracle_hessian(&u);
        let bound = h
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        for (x, d) in u.iter_mut().zip(&g) {
            *x -= d / bound;
        }
    }
    panic!("gradient descent did not converge for N={n}");
}

fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn oracle_hessian(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        h[i][i] = 1.0;
        for j in 0..n {
            if i != j {
                let c = 2.0 / (u[i] - u[j]).abs().powi(3);
                h[i][i] += c;
                h[i][j] = -c;
            }
        }
    }
    h
}

#[test]
fn equilibria_match_gradient_descent() {
    for n in 2..=8 {
        let lib = equilibrium_positions(n).unwrap();
        let oracle = brute_force_equilibrium(n);
        for (a, b) in lib.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "N={n}: {a} vs {b}");
        }
    }
}

#[test]
fn two_ions_are_analytic() {
    let u = equilibrium_positions(2).unwrap();
    let x = 0.25_f64.cbrt();
    assert!((u[0] + x).abs() < 1e-10 && (u[1] - x).abs() < 1e-10);
}

#[test]
fn equilibria_have_vanishing_force_and_symmetry() {
    for n in 1..=10 {
        let u = equilibrium_positions(n).unwrap();
        let g = force(&u);
        assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
        for i in 0..n {
            assert!((u[i] + u[n - 1 - i]).abs() < 1e-9);
        }
        assert!(u.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn larger_strings_converge() {
    for n in [12, 16, 20] {
        let u = equilibrium_positions(n).unwrap();
        assert!(force(&u).iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
    }
    assert!(equilibrium_positions(0).is_err());
    assert!(equilibrium_positions(21).is_err());
}

#[test]
fn modes_match_jacobi() {
    let ca = SpeciesConstants::calcium40();
    for n in 2..=8 {
        let geo = ChainGeometry::new(&ca, n, 1e6).unwrap();
        let modes = axial_modes(&geo).unwrap();
        let (mut eig, _) = jacobi_eigenvalues(oracle_hessian(&geo.dimensionless_positions));
        eig.sort_by(f64::total_cmp);
        for (f, l) in modes.frequencies.iter().zip(&eig) {
            assert!((f / 1e6 - l.sqrt()).abs() < 1e-10, "N={n}");
        }
        assert!((modes.frequencies[0] / 1e6 - 1.0).abs() < 1e-9);
        let com = 1.0 / (n as f64).sqrt();
        for i in 0..n {
            assert!((modes.participation(i, 0) - com).abs() < 1e-10);
        }
        let v = &modes.eigenvectors;
        let gram = v.transpose() * v;
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - e).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn three_ion_spectrum() {
    let (mut eig, _) = jacobi_eigenvalues(oracle_hessian(&equilibrium_positions(3).unwrap()));
    eig.sort_by(f64::total_cmp);
    for (l, e) in eig.iter().zip([1.0, 3.0, 29.0 / 5.0]) {
        assert!((l - e).abs() < 1e-10);
    }
}

#[test]
fn positions_scale_with_frequency() {
    let ca = SpeciesConstants::calcium40();
    let a = ChainGeometry::new(&ca, 5, 500e3).unwrap();
    let b = ChainGeometry::new(&ca, 5, 4.0 * 500e3).unwrap();
    let factor = 4.0_f64.powf(-2.0 / 3.0);
    for (x, y) in a.positions.iter().zip(&b.positions) {
        assert!((y - factor * x).abs() <= 1e-12 * x.abs());
    }
}

#[test]
fn spacing_frequency_round_trip() {
    let ca = SpeciesConstants::calcium40();
    for n in 2..=8 {
        for f in [200e3, 700e3, 2e6] {
            let d = min_spacing(n, f, &ca).unwrap();
            let back = max_com_frequency(n, d, &ca).unwrap();
            assert!((back / f - 1.0).abs() < 1e-6);
        }
    }
}
