use sprayfin_core::catalog;
use sprayfin_core::geom::{eigen_jets, numeric_eigen, EigenOptions, Frame, SprayJets};
use sprayfin_core::jet::Jet;
use sprayfin_core::metriz::{
    adapted_phi_prime, aggregate, analyze_point, tilde_tau_columns, AnalysisOptions, Brackets, Classification, EtaSource,
    OmegaCalculus, OmegaLin, TildeTauForm, Verdict,
};
use sprayfin_core::model::{FrameModel, Model};
use sprayfin_core::{PointTM, SprayModel};

fn entry_points(name: &str, count: usize) -> (Model, Vec<PointTM>) {
    let e = catalog::get(name).unwrap();
    let pts = e.sample.points(e.model.dim()).unwrap().into_iter().take(count).collect();
    (e.model, pts)
}

fn frame_model(name: &str) -> FrameModel {
    match catalog::get(name).unwrap().model {
        Model::Frame(f) => f,
        Model::Spray(_) => panic!("{name} is a spray"),
    }
}

fn spray_model(name: &str) -> SprayModel {
    match catalog::get(name).unwrap().model {
        Model::Spray(s) => s,
        Model::Frame(_) => panic!("{name} is a frame"),
    }
}

fn explicit_frame(fm: &FrameModel, u: &PointTM, order: usize) -> Frame {
    Frame::from_exprs(&fm.h, &fm.v, &fm.eigenvalues, u, order).unwrap()
}

fn spray_frame(s: &SprayModel, u: &PointTM, order: usize) -> Frame {
    let sj = SprayJets::compute(s, u, order).unwrap();
    let opts = EigenOptions::default();
    let num = numeric_eigen(&sj.jacobi(), &u.y, &opts).unwrap();
    let eig = eigen_jets(&sj.phi, &u.seed_jets(order)[s.n..], num, &opts);
    Frame::from_spray(&sj, &eig).unwrap()
}

fn assert_forms_close(a: &OmegaLin, b: &OmegaLin, tol: f64, what: &str) {
    for (p, q) in a.values().iter().zip(b.values()) {
        assert!((p - q).abs() <= tol * (1.0 + p.abs().max(q.abs())), "{what}: {a:?} vs {b:?}");
    }
}

// η for the explicit frame fixtures, from an independent symbolic evaluation of the coefficient formulas
fn fixture_eta(name: &str, u: &PointTM) -> [f64; 2] {
    let (x, y) = (&u.x, &u.y);
    let d = y[0] * y[1] - 1.0;
    match name {
        "frame-rank1" | "frame-samesign" => [-4.0 * y[0] * x[1].exp() / d, 4.0 * y[1] * x[0].exp() / d],
        "frame-rank2" => [-2.0 * (y[0] + 1.0) * x[1].exp() / d, 2.0 * (y[1] + 1.0) * x[0].exp() / d],
        "frame-etazero" => [2.0 * x[1].exp(), 0.0],
        _ => unreachable!(),
    }
}

#[test]
fn example_family_conditions() {
    let (model, pts) = entry_points("paper-example", 20);
    let opts = AnalysisOptions::default();
    let reports: Vec<_> = pts.iter().enumerate().map(|(i, u)| analyze_point(&model, u, i, &opts)).collect();
    for r in &reports {
        let (x, y) = (&r.point.x, &r.point.y);
        assert_eq!(r.classification, Classification::GenericDistinct);
        let c = r.cond1.as_ref().unwrap();
        assert!(c.residual <= 1e-8, "cond1 residual {}", c.residual);
        // μ_i: diagonal of Φ' in the adapted frame, from the symbolic Φ'
        let mu1 = x[0] * y[2] * y[2] * (-x[0] * y[2] - 2.0 * y[0] + 2.0 * y[2]) / 2.0;
        let mu2 = y[1] * y[2] * (x[2] * y[1] + y[2]);
        let lam1 = y[2] * (-x[0] * x[0] * y[2] + 2.0 * x[0] * y[2] - 2.0 * y[0]) / 4.0;
        let lam2 = y[1] * y[2];
        let (l, m) = if lam1 > lam2 { ([lam1, lam2], [mu1, mu2]) } else { ([lam2, lam1], [mu2, mu1]) };
        let ev = r.eigenvalues.as_ref().unwrap();
        assert!((ev[0] - l[0]).abs() < 1e-10 && (ev[1] - l[1]).abs() < 1e-10);
        assert!((c.mu[0] - m[0]).abs() < 1e-9 * (1.0 + m[0].abs()));
        assert!((c.mu[1] - m[1]).abs() < 1e-9 * (1.0 + m[1].abs()));
        let a = (m[0] - m[1]) / (l[0] - l[1]);
        let b = (l[0] * m[1] - l[1] * m[0]) / (l[0] - l[1]);
        assert!((c.a - a).abs() < 1e-8 * (1.0 + a.abs()), "A {} vs {a}", c.a);
        assert!((c.b - b).abs() < 1e-8 * (1.0 + b.abs()), "B {} vs {b}", c.b);
        let t = r.coefficients.as_ref().unwrap();
        assert!(t.max_kappa_theta() <= 1e-8 && t.max_beta_gamma() <= 1e-8);
        assert_eq!(r.reducible, Some(true));
        assert_eq!(r.eta_source, Some(EtaSource::ThirdOrder));
        assert_eq!(r.verdict, Verdict::MetrizableIntegrable);
    }
    assert_eq!(aggregate(&reports), Verdict::MetrizableIntegrable);
}

#[test]
fn printed_lie_rules_against_closedness() {
    // rank-1 fixture and the perturbed spray both have nonvanishing brackets
    let fm = frame_model("frame-rank1");
    let s = spray_model("perturbed-example");
    let (_, fpts) = entry_points("frame-rank1", 4);
    let (_, spts) = entry_points("perturbed-example", 4);
    let frames: Vec<Frame> = fpts
        .iter()
        .map(|u| explicit_frame(&fm, u, 3))
        .chain(spts.iter().map(|u| spray_frame(&s, u, 5)))
        .collect();
    for fr in &frames {
        let calc = OmegaCalculus::new(fr);
        let xi = |k: usize, z: &[Jet]| fr.comps(z)[k].clone();
        let nu = |k: usize, z: &[Jet]| fr.comps(z)[fr.n + k].clone();
        for (i, j) in [(0usize, 1usize), (1, 0)] {
            let (hi, vi, hj, vj) = (fr.h(i), fr.v(i), fr.h(j), fr.v(j));
            let pair = |ci: Jet, cj: Jet| {
                let mut c = vec![Jet::zero(6, 0), Jet::zero(6, 0)];
                c[i] = ci;
                c[j] = cj;
                OmegaLin::from_coeffs(c)
            };
            let lv = calc.basis_derivative(fr.n + i, j).unwrap();
            let lh = calc.basis_derivative(i, j).unwrap();
            assert_forms_close(lv, &calc.cyc(vi, vj, hj), 1e-9, "printed cyclic L_v");
            assert_forms_close(lh, &calc.cyc(hi, vj, hj), 1e-9, "cyclic L_h");
            // the printed cyclic L_h takes the fields in the order (h_i, h_j, v_j)
            assert_forms_close(lh, &calc.cyc(hi, hj, vj).scale_f(-1.0), 1e-9, "printed cyclic L_h, opposite sign");
            let printed_v =
                pair(xi(i, &fr.bracket(hj, vj)), &nu(j, &fr.bracket(vi, vj)) + &xi(j, &fr.bracket(vi, hj)));
            assert_forms_close(lv, &printed_v, 1e-9, "printed L_v rule");
            let printed_h =
                pair(nu(i, &fr.bracket(hj, vj)), &xi(j, &fr.bracket(hj, hi)) + &nu(j, &fr.bracket(vj, hi)));
            assert_forms_close(lh, &printed_h.scale_f(-1.0), 1e-9, "printed L_h rule, opposite sign");
        }
    }
}

#[test]
fn reduced_relation_closes_the_calculus() {
    let fm = frame_model("frame-rank1");
    let (_, pts) = entry_points("frame-rank1", 5);
    for u in &pts {
        let fr = explicit_frame(&fm, u, 4);
        let b = Brackets::new(&fr);
        let eta = b.eta();
        let form = b.third_order_form(0, 1);
        assert!((form.c[0].value() - eta[0].value()).abs() < 1e-12);
        assert!((form.c[1].value() - eta[1].value()).abs() < 1e-12);
        let expected = fixture_eta("frame-rank1", u);
        for k in 0..2 {
            assert!((eta[k].value() - expected[k]).abs() < 1e-8 * (1.0 + expected[k].abs()), "η{k}");
        }
        let calc = OmegaCalculus::with_relation(&fr, &eta);
        // h1(a11) with a11 = r a22, r = -η2/η1
        let r = (-&eta[1]).div_jet(&eta[0]).unwrap();
        for b in [0, 3] {
            let e = &fr.fields[b];
            let got = calc.basis_derivative(b, 0).unwrap();
            let inner = calc.cyc(e, fr.v(1), fr.h(1));
            let want = OmegaLin::from_coeffs(vec![
                &inner.c[0] * &r,
                &(&inner.c[1] * &r) + &r.along(e),
            ]);
            assert_forms_close(got, &want, 1e-9, "derivative inside D_1");
        }
    }
}

#[test]
fn eta_derivative_along_liouville_matches_finite_differences() {
    // on a spray frame v3 = C and η = (-M'_12, M'_21) is 3-homogeneous
    let eps = 1e-6;
    let s = spray_model("perturbed-example");
    let (_, pts) = entry_points("perturbed-example", 8);
    let eta_jets = |u: &PointTM| {
        let sj = SprayJets::compute(&s, u, 5).unwrap();
        let opts = EigenOptions::default();
        let num = numeric_eigen(&sj.jacobi(), &u.y, &opts).unwrap();
        let eig = eigen_jets(&sj.phi, &u.seed_jets(5)[3..], num, &opts);
        let fr = Frame::from_spray(&sj, &eig).unwrap();
        let m = adapted_phi_prime(&sj, &eig.matrix()).unwrap();
        ([-m.get(0, 1), m.get(1, 0).clone()], fr)
    };
    for u in &pts {
        let (eta, fr) = eta_jets(u);
        let (p, m) = (eta_jets(&u.scale_y(1.0 + eps)).0, eta_jets(&u.scale_y(1.0 - eps)).0);
        for k in 0..2 {
            let fd = (p[k].value() - m[k].value()) / (2.0 * eps);
            let jet = eta[k].along(fr.v(2)).value();
            let scale = 1.0 + fd.abs();
            assert!((jet - fd).abs() <= 1e-6 * scale, "C(η{k}): {jet} vs {fd}");
            assert!((jet - 3.0 * eta[k].value()).abs() <= 1e-8 * scale);
        }
    }
}

#[test]
fn theta_first_column_is_derivative_along_last_vertical_field() {
    let eps = 1e-6;
    let opts = AnalysisOptions::default();
    for name in ["frame-rank1", "frame-rank2"] {
        let fm = frame_model(name);
        let (model, pts) = entry_points(name, 5);
        for u in &pts {
            let fr = explicit_frame(&fm, u, 4);
            let dir: Vec<f64> = fr.v(2).iter().map(Jet::value).collect();
            let eta_at = |t: f64| {
                let c: Vec<f64> = u.coords().iter().zip(&dir).map(|(a, b)| a + t * b).collect();
                let f = explicit_frame(&fm, &PointTM::from_coords(&c), 2);
                let e = Brackets::new(&f).eta();
                [e[0].value(), e[1].value()]
            };
            let (p, m) = (eta_at(eps), eta_at(-eps));
            let th = analyze_point(&model, u, 0, &opts).theta.unwrap();
            for k in 0..2 {
                let fd = (p[k] - m[k]) / (2.0 * eps);
                assert!((th.matrix[k][1] - fd).abs() <= 1e-6 * (1.0 + fd.abs()), "{name}");
            }
        }
    }
}

#[test]
fn frame_fixtures_reach_each_completed_outcome() {
    let opts = AnalysisOptions::default();
    let cases = [
        ("frame-rank1", Verdict::MetrizableCompleted, Some(1)),
        ("frame-samesign", Verdict::NotMetrizable, Some(1)),
        ("frame-rank2", Verdict::NotMetrizable, Some(2)),
        ("frame-etazero", Verdict::NotMetrizable, None),
    ];
    for (name, verdict, rank) in cases {
        let (model, pts) = entry_points(name, 12);
        let reports: Vec<_> = pts.iter().enumerate().map(|(i, u)| analyze_point(&model, u, i, &opts)).collect();
        for r in &reports {
            assert_eq!(r.verdict, verdict, "{name}: {:?}", r.reasons);
            assert_eq!(r.theta.as_ref().map(|t| t.rank), rank, "{name}");
            let eta = r.eta.unwrap();
            let want = fixture_eta(name, &r.point);
            for k in 0..2 {
                assert!((eta[k] - want[k]).abs() < 1e-8 * (1.0 + want[k].abs()), "{name} η{k}");
            }
        }
        assert_eq!(aggregate(&reports), verdict, "{name}");
    }
}

#[test]
fn printed_fifth_column_breaks_rank_one() {
    let fm = frame_model("frame-rank1");
    let (model, pts) = entry_points("frame-rank1", 6);
    let printed = AnalysisOptions { tilde_tau: TildeTauForm::AsPrinted, ..AnalysisOptions::default() };
    for (i, u) in pts.iter().enumerate() {
        let r = analyze_point(&model, u, i, &printed);
        assert_eq!(r.theta.as_ref().unwrap().rank, 2);
        assert_eq!(r.verdict, Verdict::NotMetrizable);
        // the corrected columns are each proportional to η
        let fr = explicit_frame(&fm, u, 4);
        let eta = Brackets::new(&fr).eta();
        let calc = OmegaCalculus::with_relation(&fr, &eta);
        let cols = tilde_tau_columns(&calc, &eta, TildeTauForm::Corrected).unwrap();
        let (e1, e2) = (eta[0].value(), eta[1].value());
        for col in &cols {
            let v = col.values();
            let cross = e1 * v[1] - e2 * v[0];
            assert!(cross.abs() <= 1e-7 * (1.0 + (e1.abs() + e2.abs()) * (v[0].abs() + v[1].abs())));
        }
    }
}

#[test]
fn verdicts_invariant_under_rescaling_and_relabeling() {
    let base = AnalysisOptions::default();
    let variants = [
        AnalysisOptions { eigen_scales: Some(vec![2.0, -0.5]), ..base.clone() },
        AnalysisOptions { eigen_permutation: Some(vec![1, 0]), ..base.clone() },
        AnalysisOptions { eigen_permutation: Some(vec![1, 0]), eigen_scales: Some(vec![-3.0, 0.25]), ..base.clone() },
    ];
    for name in ["paper-example", "perturbed-example", "flat3", "isotropic3", "shear3"] {
        let (model, pts) = entry_points(name, 8);
        for (i, u) in pts.iter().enumerate() {
            let r0 = analyze_point(&model, u, i, &base);
            for opts in &variants {
                let r = analyze_point(&model, u, i, opts);
                assert_eq!(r.verdict, r0.verdict, "{name} {opts:?}");
                assert_eq!(r.classification, r0.classification);
                assert_eq!(r.cond1.as_ref().map(|c| c.passed), r0.cond1.as_ref().map(|c| c.passed));
                assert_eq!(r.reducible, r0.reducible);
            }
            for t in [0.5, 3.0] {
                let r = analyze_point(&model, &u.scale_y(t), i, &base);
                assert_eq!(r.verdict, r0.verdict, "{name} y-scaling {t}");
                assert_eq!(r.classification, r0.classification);
                assert_eq!(r.cond1.as_ref().map(|c| c.passed), r0.cond1.as_ref().map(|c| c.passed));
            }
        }
    }
}

#[test]
fn collisions_are_never_generic() {
    let opts = AnalysisOptions::default();
    let (model, pts) = entry_points("shear3", 20);
    let mut collisions = 0;
    for (i, u) in pts.iter().enumerate() {
        let r = analyze_point(&model, u, i, &opts);
        assert_ne!(r.classification, Classification::GenericDistinct);
        if r.classification == Classification::Degenerate {
            assert_eq!(r.verdict, Verdict::Inconclusive);
            assert!(r.reasons.iter().any(|s| s.contains("eigenvalue collision")), "{:?}", r.reasons);
            collisions += 1;
        }
    }
    assert!(collisions > 15);
}

#[test]
fn flat_and_isotropic_are_metrizable() {
    let opts = AnalysisOptions::default();
    for (name, class) in [("flat3", Classification::Flat), ("isotropic3", Classification::Isotropic)] {
        let (model, pts) = entry_points(name, 20);
        let reports: Vec<_> = pts.iter().enumerate().map(|(i, u)| analyze_point(&model, u, i, &opts)).collect();
        assert!(reports.iter().all(|r| r.classification == class));
        assert_eq!(aggregate(&reports), Verdict::MetrizableIsotropic);
    }
}

#[test]
fn perturbed_example_fails_first_condition() {
    let opts = AnalysisOptions::default();
    let (model, pts) = entry_points("perturbed-example", 20);
    let reports: Vec<_> = pts.iter().enumerate().map(|(i, u)| analyze_point(&model, u, i, &opts)).collect();
    for r in &reports {
        let c = r.cond1.as_ref().unwrap();
        assert!(!c.passed && c.residual > 1e-3, "residual {}", c.residual);
        assert_eq!(r.eta_source, Some(EtaSource::PhiPrime));
    }
    assert_eq!(aggregate(&reports), Verdict::NotMetrizable);
}

#[test]
fn domain_error_becomes_inconclusive_point() {
    let s = SprayModel::parse(&["y1^2/y3", "0", "0"], "chart").unwrap();
    let u = PointTM::new(vec![0.0; 3], vec![1.0, 1.0, 0.0]);
    let r = analyze_point(&Model::Spray(s), &u, 0, &AnalysisOptions::default());
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.reasons[0].starts_with("error:"), "{:?}", r.reasons);
}

#[test]
fn theta_coefficients_are_symmetric_in_the_pair() {
    let rows = |r: [[&str; 6]; 3]| r.iter().map(|c| c.iter().map(|t| t.to_string()).collect()).collect::<Vec<_>>();
    let h = rows([["1", "0", "0", "0", "x1*y2", "0"], ["y1", "1", "0", "0", "0", "0"], ["0", "0", "1", "0", "0", "0"]]);
    let v = rows([["0", "x1*y1", "0", "1", "0", "0"], ["0", "0", "0", "x2*y2", "1", "0"], ["0", "0", "0", "0", "0", "1"]]);
    let lam = ["2".to_string(), "-1".to_string(), "0".to_string()];
    let fm = FrameModel::parse(3, &h, &v, &lam, "generic").unwrap();
    let (_, pts) = entry_points("frame-rank1", 4);
    for u in &pts {
        let fr = explicit_frame(&fm, u, 3);
        let b = Brackets::new(&fr);
        for k in 0..2 {
            let (a, c) = (b.theta(k, 0, 1).value(), b.theta(k, 1, 0).value());
            assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()));
        }
        assert!(b.theta(0, 0, 1).value().abs() + b.theta(1, 0, 1).value().abs() > 1e-6);
    }
}
