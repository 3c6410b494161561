use nalgebra::DMatrix;
use sprayfin_core::catalog;
use sprayfin_core::geom::{
    self, eigen_jets, first_order_eigen, numeric_eigen, EigenOptions, Frame, GeomError, SprayJets,
};
use sprayfin_core::model::Model;
use sprayfin_core::{PointTM, SprayModel};

const K: usize = 6;

fn spray(name: &str) -> SprayModel {
    match catalog::get(name).unwrap().model {
        Model::Spray(s) => s,
        Model::Frame(_) => panic!("{name} is a frame fixture"),
    }
}

fn points(name: &str, count: usize) -> Vec<PointTM> {
    let e = catalog::get(name).unwrap();
    e.sample.points(e.model.dim()).unwrap().into_iter().take(count).collect()
}

fn spray_frame(s: &SprayModel, u: &PointTM) -> (SprayJets, Frame) {
    let sj = SprayJets::compute(s, u, K).unwrap();
    let opts = EigenOptions::default();
    let num = numeric_eigen(&sj.jacobi(), &u.y, &opts).unwrap();
    let eig = eigen_jets(&sj.phi, &u.seed_jets(K)[s.n..], num, &opts);
    let frame = Frame::from_spray(&sj, &eig).unwrap();
    (sj, frame)
}

// closed forms for f1 = x1 y1 y3, f2 = x3 y2^2, f3 = y3^2, obtained by hand/sympy
fn example_connection(u: &PointTM) -> DMatrix<f64> {
    let (x, y) = (&u.x, &u.y);
    DMatrix::from_row_slice(
        3,
        3,
        &[-0.5 * x[0] * y[2], 0.0, -0.5 * x[0] * y[0], 0.0, -x[2] * y[1], 0.0, 0.0, 0.0, -y[2]],
    )
}

fn example_jacobi(u: &PointTM) -> DMatrix<f64> {
    let (x, y) = (&u.x, &u.y);
    let a = -x[0] * x[0] * y[2] + 2.0 * x[0] * y[2] - 2.0 * y[0];
    DMatrix::from_row_slice(
        3,
        3,
        &[y[2] * a / 4.0, 0.0, -y[0] * a / 4.0, 0.0, y[1] * y[2], -y[1] * y[1], 0.0, 0.0, 0.0],
    )
}

fn example_phi_prime(u: &PointTM) -> DMatrix<f64> {
    let (x, y) = (&u.x, &u.y);
    let b = -x[0] * y[2] - 2.0 * y[0] + 2.0 * y[2];
    let c = x[2] * y[1] + y[2];
    DMatrix::from_row_slice(
        3,
        3,
        &[
            x[0] * y[2] * y[2] * b / 2.0,
            0.0,
            -x[0] * y[0] * y[2] * b / 2.0,
            0.0,
            y[1] * y[2] * c,
            -y[1] * y[1] * c,
            0.0,
            0.0,
            0.0,
        ],
    )
}

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

#[test]
fn example_connection_at_unit_point() {
    let s = spray("paper-example");
    let u = PointTM::new(vec![1.0; 3], vec![1.0; 3]);
    let n = geom::connection(&s, &u).unwrap();
    assert_eq!(n[(0, 0)], -0.5);
    assert_eq!(n[(1, 1)], -1.0);
    assert_eq!(n[(2, 2)], -1.0);
}

#[test]
fn example_connection_matches_family_formula() {
    // for x1'' = g(x1, x3, y1/y3) y3^2: N^1_3 = ½ ∂_t g · y1 - g · y3, here g = x1 t
    let s = spray("paper-example");
    for u in points("paper-example", 20) {
        let n = geom::connection(&s, &u).unwrap();
        let t = u.y[0] / u.y[2];
        let g = u.x[0] * t;
        let expected = 0.5 * u.x[0] * u.y[0] - g * u.y[2];
        assert!((n[(0, 2)] - expected).abs() < 1e-12);
        assert!(max_diff(&n, &example_connection(&u)) < 1e-12);
    }
}

#[test]
fn example_jacobi_is_upper_triangular() {
    let s = spray("paper-example");
    for u in points("paper-example", 20) {
        let phi = geom::jacobi(&s, &u).unwrap();
        assert!(max_diff(&phi, &example_jacobi(&u)) < 1e-12);
        for (i, j) in [(1, 0), (2, 0), (2, 1), (2, 2)] {
            assert!(phi[(i, j)].abs() < 1e-12);
        }
        // diagonal against the family's eigenvalue formula with g1 = x1 t, g2 = x3 t^2, g3 = 1
        let (x, y) = (&u.x, &u.y);
        let lam1 = 0.5 * y[0] * y[2] + 0.5 * (x[0] - 2.0 * y[0] / y[2] - 0.5 * x[0] * x[0]) * y[2] * y[2];
        let t2 = y[1] / y[2];
        let lam2 = 0.5 * (-2.0 * x[2]) * y[1] * y[2]
            + 0.5 * (2.0 * t2 + 2.0 * x[2] * x[2] * t2 * t2 + 2.0 * x[2] * t2 - 2.0 * x[2] * x[2] * t2 * t2) * y[2] * y[2];
        assert!((phi[(0, 0)] - lam1).abs() < 1e-12 * (1.0 + lam1.abs()));
        assert!((phi[(1, 1)] - lam2).abs() < 1e-12 * (1.0 + lam2.abs()));
    }
}

#[test]
fn flat_spray_has_zero_geometry() {
    let s = spray("flat3");
    let u = &points("flat3", 1)[0];
    let sj = SprayJets::compute(&s, u, K).unwrap();
    assert_eq!(sj.connection().amax(), 0.0);
    assert_eq!(sj.jacobi().amax(), 0.0);
    assert_eq!(sj.phi_prime().unwrap().value().amax(), 0.0);
    assert!(sj.curvature().r.iter().all(|&v| v == 0.0));
    let err = numeric_eigen(&sj.jacobi(), &u.y, &EigenOptions::default()).unwrap_err();
    assert!(matches!(err, GeomError::EigenvalueCollision { .. }));
}

#[test]
fn isotropic_spray_has_equal_nonzero_eigenvalues() {
    let s = spray("isotropic3");
    for u in points("isotropic3", 10) {
        let phi = geom::jacobi(&s, &u).unwrap();
        let mut ev: Vec<f64> = phi.clone().schur().complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        assert!(ev[0].abs() < 1e-10);
        assert!(ev[1].abs() > 1e-3);
        assert!((ev[1] - ev[2]).abs() < 1e-8 * ev[1].abs());
        let err = numeric_eigen(&phi, &u.y, &EigenOptions::default()).unwrap_err();
        assert!(matches!(err, GeomError::EigenvalueCollision { .. }));
    }
}

#[test]
fn curvature_identities_on_catalog_sprays() {
    for name in ["flat3", "isotropic3", "paper-example", "perturbed-example"] {
        let s = spray(name);
        for u in points(name, 10) {
            let sj = SprayJets::compute(&s, &u, K).unwrap();
            let phi = sj.jacobi();
            let scale = 1.0 + geom::norm(&phi);
            let yv = nalgebra::DVector::from_column_slice(&u.y);
            assert!((&phi * &yv).amax() <= 1e-8 * scale, "{name}: Φy");
            let r = sj.curvature();
            assert!(max_diff(&r.contract(&u.y), &phi) <= 1e-8 * scale, "{name}: i_S R");
            assert!(r.max_abs_diff(&sj.curvature_from_jacobi().unwrap()) <= 1e-8 * scale, "{name}: ⅓[J,Φ]");
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert_eq!(r.get(i, j, k), -r.get(i, k, j));
                    }
                }
            }
            let (en, ep) = sj.homogeneity_residuals();
            assert!(en <= 1e-8 * scale && ep <= 1e-8 * scale, "{name}: Euler {en} {ep}");
        }
    }
}

#[test]
fn example_eigenframe() {
    let s = spray("paper-example");
    for u in points("paper-example", 20) {
        let phi = geom::jacobi(&s, &u).unwrap();
        let e = numeric_eigen(&phi, &u.y, &EigenOptions::default()).unwrap();
        assert_eq!(e.values[2], 0.0);
        assert!(e.values[0] > e.values[1]);
        assert!(e.min_gap > 1e-7 * geom::norm(&phi));
        let mut diag = [phi[(0, 0)], phi[(1, 1)]];
        diag.sort_by(|a, b| b.total_cmp(a));
        assert!((e.values[0] - diag[0]).abs() < 1e-10 && (e.values[1] - diag[1]).abs() < 1e-10);
        for k in 0..3 {
            let p = e.vectors.column(k);
            let r = &phi * p - p * e.values[k];
            assert!(r.amax() < 1e-10);
        }
        assert_eq!(e.vectors.column(2).as_slice(), u.y.as_slice());
    }
}

#[test]
fn eigen_jets_agree_with_first_order_perturbation() {
    for name in ["paper-example", "perturbed-example"] {
        let s = spray(name);
        for u in points(name, 8) {
            let sj = SprayJets::compute(&s, &u, K).unwrap();
            let opts = EigenOptions::default();
            let num = numeric_eigen(&sj.jacobi(), &u.y, &opts).unwrap();
            let eig = eigen_jets(&sj.phi, &u.seed_jets(K)[3..], num.clone(), &opts);
            let dphi: Vec<DMatrix<f64>> =
                (0..6).map(|d| DMatrix::from_fn(3, 3, |i, j| sj.phi.get(i, j).d1(d))).collect();
            let (dl, dp) = first_order_eigen(&num.values, &num.vectors, &dphi);
            for d in 0..6 {
                for k in 0..2 {
                    assert!((eig.values[k].d1(d) - dl[d][k]).abs() < 1e-9, "{name} dλ");
                    for i in 0..3 {
                        assert!((eig.vectors[k][i].d1(d) - dp[d][(i, k)]).abs() < 1e-9, "{name} dp");
                    }
                }
            }
        }
    }
}

#[test]
fn example_brackets_vanish_as_claimed() {
    let s = spray("paper-example");
    for u in points("paper-example", 20) {
        let (_, fr) = spray_frame(&s, &u);
        let data = fr.data();
        let (h1, h2, v1, v2) = (0, 1, 3, 4);
        let zero = |a: usize, b: usize| data.structure[a][b].iter().all(|c| c.abs() < 1e-8);
        // the claims are symmetric under swapping the two labelled directions
        assert!(zero(v1, h2) && zero(v2, h1) && zero(h1, h2));
        for (a, b, keep) in [(v1, h1, v1), (v2, h2, v2)] {
            for (k, c) in data.structure[a][b].iter().enumerate() {
                if k != keep {
                    assert!(c.abs() < 1e-8, "[{}, {}] leaves span", fr.label(a), fr.label(b));
                }
            }
        }
        assert!(data.reconstruction_residual < 1e-10);
    }
}

/// Frame fields from pointwise numerics only, for finite-difference brackets.
fn numeric_fields(s: &SprayModel, c: &[f64]) -> Vec<Vec<f64>> {
    let u = PointTM::from_coords(c);
    let n = s.n;
    let nmat = geom::connection(s, &u).unwrap();
    let phi = geom::jacobi(s, &u).unwrap();
    let e = numeric_eigen(&phi, &u.y, &EigenOptions::default()).unwrap();
    let mut out = Vec::new();
    for k in 0..n - 1 {
        let p = e.vectors.column(k).into_owned();
        let np = &nmat * &p;
        out.push(p.iter().copied().chain(np.iter().map(|t| -t)).collect());
    }
    let f: Vec<f64> = s.coeffs.iter().map(|e| e.eval(&u).unwrap()).collect();
    out.push(u.y.iter().copied().chain(f).collect());
    for k in 0..n {
        let p = e.vectors.column(k);
        out.push(std::iter::repeat_n(0.0, n).chain(p.iter().copied()).collect());
    }
    out
}

#[test]
fn frame_brackets_match_finite_differences() {
    let h = 1e-5;
    for name in ["paper-example", "perturbed-example"] {
        let s = spray(name);
        for u in points(name, 5) {
            let (_, fr) = spray_frame(&s, &u);
            let c = u.coords();
            let base = numeric_fields(&s, &c);
            // jac[v][a][i] = ∂_v of component i of field a
            let jac: Vec<Vec<Vec<f64>>> = (0..6)
                .map(|v| {
                    let mut p = c.clone();
                    let mut m = c.clone();
                    p[v] += h;
                    m[v] -= h;
                    let (fp, fm) = (numeric_fields(&s, &p), numeric_fields(&s, &m));
                    (0..6).map(|a| (0..6).map(|i| (fp[a][i] - fm[a][i]) / (2.0 * h)).collect()).collect()
                })
                .collect();
            for a in 0..6 {
                for b in a + 1..6 {
                    let z = fr.bracket(&fr.fields[a], &fr.fields[b]);
                    for i in 0..6 {
                        let fd: f64 = (0..6).map(|v| base[a][v] * jac[v][b][i] - base[b][v] * jac[v][a][i]).sum();
                        let got = z[i].value();
                        assert!(
                            (got - fd).abs() <= 1e-6 * (1.0 + fd.abs()),
                            "{name} [{}, {}]_{i}: {got} vs {fd}",
                            fr.label(a),
                            fr.label(b)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn frame_brackets_satisfy_jacobi_identity() {
    for name in ["paper-example", "perturbed-example"] {
        let s = spray(name);
        for u in points(name, 3) {
            let (_, fr) = spray_frame(&s, &u);
            assert!(fr.jacobi_residual() <= 1e-6, "{name}");
        }
    }
}

#[test]
fn phi_prime_routes_and_transport() {
    let eps = 1e-5;
    for name in ["paper-example", "perturbed-example", "isotropic3"] {
        let s = spray(name);
        for u in points(name, 10) {
            let sj = SprayJets::compute(&s, &u, K).unwrap();
            let pp = sj.phi_prime().unwrap().value();
            let scale = 1.0 + geom::norm(&pp);
            assert!(max_diff(&pp, &sj.phi_prime_by_brackets().unwrap()) <= 1e-8 * scale, "{name}");
            // S(Φ) by central differences along the spray field, then the connection terms
            let c = u.coords();
            let sv: Vec<f64> = sj.spray_field.iter().map(|j| j.value()).collect();
            let shifted = |t: f64| {
                let p: Vec<f64> = c.iter().zip(&sv).map(|(a, b)| a + t * b).collect();
                geom::jacobi(&s, &PointTM::from_coords(&p)).unwrap()
            };
            let sphi = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
            let nm = sj.connection();
            let phi = sj.jacobi();
            let fd = sphi + &nm * &phi - &phi * &nm;
            assert!(max_diff(&pp, &fd) <= 1e-6 * scale, "{name}: {}", max_diff(&pp, &fd));
            if name == "paper-example" {
                assert!(max_diff(&pp, &example_phi_prime(&u)) <= 1e-10 * scale);
            }
            let yv = nalgebra::DVector::from_column_slice(&u.y);
            assert!((&pp * &yv).amax() <= 1e-8 * scale, "{name}: Φ'(S)");
        }
    }
}

#[test]
fn order_and_velocity_guards() {
    let s = spray("paper-example");
    let u = PointTM::new(vec![0.1; 3], vec![0.0; 3]);
    assert!(matches!(SprayJets::compute(&s, &u, K), Err(GeomError::ZeroVelocity)));
    let u = PointTM::new(vec![0.1; 3], vec![1.0; 3]);
    assert!(matches!(SprayJets::compute(&s, &u, 1), Err(GeomError::OrderTooLow { .. })));
    let sj = SprayJets::compute(&s, &u, 2).unwrap();
    assert!(matches!(sj.phi_prime(), Err(GeomError::OrderTooLow { .. })));
}

#[test]
fn domain_errors_surface() {
    let s = SprayModel::parse(&["y1^2/y3", "0", "0"], "chart").unwrap();
    let u = PointTM::new(vec![0.0; 3], vec![1.0, 1.0, 0.0]);
    let err = SprayJets::compute(&s, &u, 3).unwrap_err();
    assert!(err.to_string().contains("y1^2/y3") || err.to_string().contains("y3"), "{err}");
}
