//! Pointwise metrizability conditions and verdicts.

pub mod coeffs;
pub mod omega;
pub mod theta;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geom::{eigen_jets, norm, numeric_eigen, EigenOptions, Frame, GeomError, SprayJets};
use crate::jet::Jet;
use crate::jetmat::JetMat;
use crate::model::{FrameModel, Model};
use crate::point::PointTM;
use crate::spray::SprayModel;

pub use coeffs::{Brackets, CoefficientTable};
pub use omega::{OmegaCalculus, OmegaLin};
pub use theta::{rank_2xk, theta_matrix, tilde_tau_columns, ThetaReport, TildeTauForm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Jet order of the spray coefficients; the full Θ path needs 6.
    pub order: usize,
    pub tol: f64,
    pub sep_rel: f64,
    pub rank_tol: f64,
    pub tilde_tau: TildeTauForm,
    pub eigen_permutation: Option<Vec<usize>>,
    pub eigen_scales: Option<Vec<f64>>,
    /// Also evaluate the Jacobi identity of the frame brackets (slow).
    pub jacobi_check: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            order: 6,
            tol: 1e-8,
            sep_rel: 1e-7,
            rank_tol: 1e-6,
            tilde_tau: TildeTauForm::Corrected,
            eigen_permutation: None,
            eigen_scales: None,
            jacobi_check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Flat,
    Isotropic,
    GenericDistinct,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Flat or isotropic: the compatibility conditions hold automatically.
    MetrizableIsotropic,
    /// Distinct eigenvalues, first condition holds, reducible third-order condition vanishes.
    MetrizableIntegrable,
    /// Reduced relation with `η1 η2 < 0` and rank Θ = 1.
    MetrizableCompleted,
    NotMetrizable,
    Inconclusive,
}

impl Verdict {
    pub fn is_metrizable(self) -> bool {
        matches!(self, Verdict::MetrizableIsotropic | Verdict::MetrizableIntegrable | Verdict::MetrizableCompleted)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::MetrizableIsotropic => "metrizable_isotropic",
            Verdict::MetrizableIntegrable => "metrizable_integrable",
            Verdict::MetrizableCompleted => "metrizable_completed",
            Verdict::NotMetrizable => "not_metrizable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaSource {
    /// `κ + θ` of the reducible third-order condition.
    ThirdOrder,
    /// Entries of `Φ'` in the adapted frame when `Φ'` leaves `span{J, Φ}`.
    PhiPrime,
}

/// Consistency residuals of the spray geometry at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SprayChecks {
    pub phi_norm: f64,
    pub phi_y_residual: f64,
    pub curvature_contraction_residual: f64,
    pub curvature_routes_residual: f64,
    pub euler_residual_connection: f64,
    pub euler_residual_jacobi: f64,
    pub phi_prime_routes_residual: f64,
}

/// Fit of `Φ' = AΦ + BJ` on the complement of `S` in the adapted frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cond1 {
    pub a: f64,
    pub b: f64,
    /// Relative to `‖Φ'‖`.
    pub residual: f64,
    pub passed: bool,
    /// Largest `C`-row entry of `Φ'` on the complement, relative to `‖Φ'‖`.
    pub c_row: f64,
    /// Largest entry of `Φ'(S)`, relative to `‖Φ'‖`.
    pub s_column: f64,
    /// `μ_i`: diagonal entries of `Φ'` in the adapted frame.
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub index: usize,
    pub point: PointTM,
    pub classification: Classification,
    pub eigenvalues: Option<Vec<f64>>,
    pub spray_checks: Option<SprayChecks>,
    pub frame_reconstruction_residual: Option<f64>,
    pub jacobi_identity_residual: Option<f64>,
    pub cond1: Option<Cond1>,
    pub coefficients: Option<CoefficientTable>,
    pub involutivity_defect: Option<f64>,
    pub reducible: Option<bool>,
    pub eta: Option<[f64; 2]>,
    pub eta_source: Option<EtaSource>,
    pub dropped_terms: Option<[f64; 2]>,
    pub theta: Option<ThetaReport>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl ConditionReport {
    fn new(index: usize, point: &PointTM) -> ConditionReport {
        ConditionReport {
            index,
            point: point.clone(),
            classification: Classification::Degenerate,
            eigenvalues: None,
            spray_checks: None,
            frame_reconstruction_residual: None,
            jacobi_identity_residual: None,
            cond1: None,
            coefficients: None,
            involutivity_defect: None,
            reducible: None,
            eta: None,
            eta_source: None,
            dropped_terms: None,
            theta: None,
            verdict: Verdict::Inconclusive,
            reasons: Vec::new(),
        }
    }

    fn finish(mut self, verdict: Verdict, reason: impl Into<String>) -> ConditionReport {
        self.verdict = verdict;
        self.reasons.push(reason.into());
        self
    }
}

/// Classification from the Jacobi endomorphism at a point with fiber coordinate `y`.
pub fn classify(phi: &DMatrix<f64>, y: &[f64], tol: f64, sep_rel: f64) -> Classification {
    let n = phi.nrows();
    let pn = norm(phi);
    if pn <= tol {
        return Classification::Flat;
    }
    let rho = phi.trace() / (n - 1) as f64;
    let yv = DVector::from_column_slice(y);
    let proj = DMatrix::identity(n, n) - &yv * yv.transpose() / yv.dot(&yv);
    let resid = norm(&(proj * (phi - DMatrix::identity(n, n) * rho)));
    if resid <= tol * pn {
        return Classification::Isotropic;
    }
    let opts = EigenOptions { sep_rel, ..EigenOptions::default() };
    match numeric_eigen(phi, y, &opts) {
        Ok(_) => Classification::GenericDistinct,
        Err(_) => Classification::Degenerate,
    }
}

/// Least-squares fit of `Φ' = AΦ + BJ` from the adapted matrix `m` of `Φ'`.
pub fn cond_phi_prime_span(m: &DMatrix<f64>, eigenvalues: &[f64], tol: f64) -> Cond1 {
    let n = m.nrows();
    let k = n - 1;
    let mu: Vec<f64> = (0..k).map(|i| m[(i, i)]).collect();
    let design = DMatrix::from_fn(k, 2, |i, c| if c == 0 { eigenvalues[i] } else { 1.0 });
    let rhs = DVector::from_vec(mu.clone());
    let sol = design.clone().svd(true, true).solve(&rhs, 1e-14).expect("svd solve");
    let (a, b) = (sol[0], sol[1]);
    let mut sq = 0.0;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { a * eigenvalues[i] + b } else { 0.0 };
            sq += (m[(i, j)] - target).powi(2);
        }
    }
    let mn = norm(m);
    let rel = |v: f64| if mn == 0.0 { 0.0 } else { v / mn };
    let residual = rel(sq.sqrt());
    let c_row = rel((0..k).fold(0.0f64, |acc, j| acc.max(m[(n - 1, j)].abs())));
    let s_column = rel((0..n).fold(0.0f64, |acc, i| acc.max(m[(i, n - 1)].abs())));
    Cond1 { a, b, residual, passed: residual <= tol, c_row, s_column, mu }
}

/// Decides reducibility from β, γ and cross-checks with involutivity of each `D_j`.
/// `Err` carries a description when the two tests disagree.
pub fn reducibility(
    table: &CoefficientTable,
    involutivity_defect: f64,
    bg_tol: f64,
    inv_tol: f64,
) -> Result<bool, String> {
    let by_coeffs = table.max_beta_gamma() <= bg_tol;
    let by_brackets = involutivity_defect <= inv_tol;
    if by_coeffs != by_brackets {
        return Err(format!(
            "inconsistent reducibility: max |β|,|γ| = {:e} but [h_j,v_j] leaves D_j by {:e}",
            table.max_beta_gamma(),
            involutivity_defect
        ));
    }
    Ok(by_coeffs)
}

/// Largest value or first derivative over all structure functions of the frame.
fn structure_scale(frame: &Frame) -> f64 {
    let m = 2 * frame.n;
    let mut s: f64 = 1.0;
    for a in 0..m {
        for b in a + 1..m {
            for c in frame.structure(a, b) {
                s = s.max(c.value().abs());
                for v in 0..c.nvars() {
                    s = s.max(c.d1(v).abs());
                }
            }
        }
    }
    s
}

/// Runs the full pointwise pipeline.
pub fn analyze_point(model: &Model, u: &PointTM, index: usize, opts: &AnalysisOptions) -> ConditionReport {
    let rep = ConditionReport::new(index, u);
    let result = match model {
        Model::Spray(s) => analyze_spray_point(s, u, rep, opts),
        Model::Frame(f) => analyze_frame_point(f, u, rep, opts),
    };
    match result {
        Ok(r) => r,
        Err((rep, e)) => rep.finish(Verdict::Inconclusive, format!("error: {e}")),
    }
}

type Step = Result<ConditionReport, (ConditionReport, GeomError)>;

fn analyze_spray_point(spray: &SprayModel, u: &PointTM, mut rep: ConditionReport, opts: &AnalysisOptions) -> Step {
    let sj = match SprayJets::compute(spray, u, opts.order) {
        Ok(s) => s,
        Err(e) => return Err((rep, e)),
    };
    let n = sj.n;
    let phi0 = sj.jacobi();
    let phi_norm = norm(&phi0);
    let yv = DVector::from_column_slice(&u.y);
    let curv = sj.curvature();
    let routes = sj.curvature_from_jacobi().map(|c| c.max_abs_diff(&curv)).unwrap_or(f64::NAN);
    let pp_routes = match (sj.phi_prime(), sj.phi_prime_by_brackets()) {
        (Ok(a), Ok(b)) => norm(&(a.value() - b)),
        _ => f64::NAN,
    };
    let (en, ep) = sj.homogeneity_residuals();
    rep.spray_checks = Some(SprayChecks {
        phi_norm,
        phi_y_residual: (&phi0 * &yv).amax(),
        curvature_contraction_residual: norm(&(curv.contract(&u.y) - &phi0)),
        curvature_routes_residual: routes,
        euler_residual_connection: en,
        euler_residual_jacobi: ep,
        phi_prime_routes_residual: pp_routes,
    });
    rep.classification = classify(&phi0, &u.y, opts.tol, opts.sep_rel);
    match rep.classification {
        Classification::Flat => return Ok(rep.finish(Verdict::MetrizableIsotropic, "flat: Φ = 0")),
        Classification::Isotropic => {
            return Ok(rep.finish(Verdict::MetrizableIsotropic, "isotropic: Φ = ρJ modulo C"));
        }
        _ => {}
    }
    let eopts = EigenOptions {
        sep_rel: opts.sep_rel,
        permutation: opts.eigen_permutation.clone(),
        scales: opts.eigen_scales.clone(),
    };
    let num = match numeric_eigen(&phi0, &u.y, &eopts) {
        Ok(v) => v,
        Err(e) => {
            rep.classification = Classification::Degenerate;
            return Ok(rep.finish(Verdict::Inconclusive, format!("degenerate: {e}")));
        }
    };
    rep.classification = Classification::GenericDistinct;
    rep.eigenvalues = Some(num.values.clone());
    let y_jets = &u.seed_jets(opts.order)[n..];
    let eig = eigen_jets(&sj.phi, y_jets, num, &eopts);
    let frame = match Frame::from_spray(&sj, &eig) {
        Ok(f) => f,
        Err(e) => return Err((rep, e)),
    };
    rep.frame_reconstruction_residual = Some(frame.data().reconstruction_residual);
    if opts.jacobi_check && frame.order() >= 2 {
        rep.jacobi_identity_residual = Some(frame.jacobi_residual());
    }

    let madapted = match adapted_phi_prime(&sj, &eig.matrix()) {
        Some(m) => m,
        None => return Err((rep, GeomError::SingularFrame)),
    };
    let mvals = madapted.value();
    let cond1 = cond_phi_prime_span(&mvals, &eig.numeric.values, opts.tol);
    let cond1_passed = cond1.passed;
    rep.cond1 = Some(cond1);

    if n != 3 {
        if frame.order() >= 2 {
            let b = Brackets::new(&frame);
            rep.coefficients = Some(CoefficientTable::compute(&b));
            rep.involutivity_defect = Some(b.involutivity_defect());
        }
        return Ok(rep.finish(Verdict::Inconclusive, format!("verdicts are implemented for n = 3, got n = {n}")));
    }
    if cond1_passed {
        return Ok(third_order_path(&frame, rep, opts));
    }
    rep.reasons.push("Φ' is not in span{J, Φ}: using the relation i_{Φ'}Ω = 0".into());
    let eta = [-madapted.get(0, 1), madapted.get(1, 0).clone()];
    let eta_tol = opts.tol * norm(&mvals);
    Ok(completed_path(&frame, rep, eta, EtaSource::PhiPrime, eta_tol, opts))
}

fn analyze_frame_point(model: &FrameModel, u: &PointTM, mut rep: ConditionReport, opts: &AnalysisOptions) -> Step {
    let order = opts.order.saturating_sub(2);
    let frame = match Frame::from_exprs(&model.h, &model.v, &model.eigenvalues, u, order) {
        Ok(f) => f,
        Err(e) => return Err((rep, e)),
    };
    let lam = frame.eigenvalues();
    rep.eigenvalues = Some(lam.clone());
    rep.frame_reconstruction_residual = Some(frame.data().reconstruction_residual);
    if opts.jacobi_check && frame.order() >= 2 {
        rep.jacobi_identity_residual = Some(frame.jacobi_residual());
    }
    let scale = lam.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let distinct = (0..lam.len()).all(|a| (a + 1..lam.len()).all(|b| (lam[a] - lam[b]).abs() > opts.sep_rel * scale));
    if scale == 0.0 || !distinct {
        rep.classification = Classification::Degenerate;
        return Ok(rep.finish(Verdict::Inconclusive, "degenerate: eigenvalues are not pairwise distinct"));
    }
    rep.classification = Classification::GenericDistinct;
    if model.n != 3 {
        return Ok(rep.finish(Verdict::Inconclusive, "verdicts are implemented for n = 3"));
    }
    Ok(third_order_path(&frame, rep, opts))
}

fn third_order_path(frame: &Frame, mut rep: ConditionReport, opts: &AnalysisOptions) -> ConditionReport {
    let b = Brackets::new(frame);
    let table = CoefficientTable::compute(&b);
    let defect = b.involutivity_defect();
    let scale_lam = frame.eigenvalues().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let scale_sf = structure_scale(frame);
    rep.involutivity_defect = Some(defect);
    let red = reducibility(&table, defect, opts.tol * scale_lam * scale_sf, opts.tol * scale_sf);
    rep.coefficients = Some(table);
    let reducible = match red {
        Ok(r) => r,
        Err(msg) => return rep.finish(Verdict::Inconclusive, msg),
    };
    rep.reducible = Some(reducible);
    if !reducible {
        return rep.finish(Verdict::Inconclusive, "third-order condition is not reducible");
    }
    let eta = b.eta();
    let calc = OmegaCalculus::new(frame);
    if let Some(d) = b.dropped_terms(&calc, 0, 1) {
        let v = d.values();
        rep.dropped_terms = Some([v[0], v[1]]);
    }
    let eta_tol = opts.tol * scale_lam * scale_sf * scale_sf;
    let [e1, e2] = [eta[0].value(), eta[1].value()];
    if e1.abs() <= eta_tol && e2.abs() <= eta_tol {
        rep.eta = Some([e1, e2]);
        rep.eta_source = Some(EtaSource::ThirdOrder);
        return rep.finish(Verdict::MetrizableIntegrable, "third-order condition vanishes: system is formally integrable");
    }
    completed_path(frame, rep, eta, EtaSource::ThirdOrder, eta_tol, opts)
}

fn completed_path(
    frame: &Frame,
    mut rep: ConditionReport,
    eta: [Jet; 2],
    source: EtaSource,
    eta_tol: f64,
    opts: &AnalysisOptions,
) -> ConditionReport {
    let ev = [eta[0].value(), eta[1].value()];
    rep.eta = Some(ev);
    rep.eta_source = Some(source);
    let zero = [ev[0].abs() <= eta_tol, ev[1].abs() <= eta_tol];
    if zero[0] && zero[1] {
        return rep.finish(Verdict::Inconclusive, "relation vanishes at this point");
    }
    if zero[0] || zero[1] {
        return rep.finish(Verdict::NotMetrizable, "one component of η vanishes: Ω would be degenerate");
    }
    let calc = OmegaCalculus::with_relation(frame, &eta);
    let cols = match tilde_tau_columns(&calc, &eta, opts.tilde_tau) {
        Some(c) => c,
        None => return rep.finish(Verdict::Inconclusive, "compatibility columns could not be expanded"),
    };
    let th = theta_matrix(&ev, &cols, opts.rank_tol);
    let rank = th.rank;
    rep.theta = Some(th);
    let sign_ok = ev[0] * ev[1] < 0.0;
    match (sign_ok, rank) {
        (true, 1) => rep.finish(Verdict::MetrizableCompleted, "η1·η2 < 0 and rank Θ = 1"),
        (false, 1) => rep.finish(Verdict::NotMetrizable, "η1·η2 > 0: Ω cannot be regular"),
        (_, r) => rep.finish(Verdict::NotMetrizable, format!("rank Θ = {r}: the completed system is not integrable")),
    }
}

/// Aggregates pointwise verdicts in point order.
pub fn aggregate(reports: &[ConditionReport]) -> Verdict {
    if reports.is_empty() {
        return Verdict::Inconclusive;
    }
    if reports.iter().any(|r| r.verdict == Verdict::NotMetrizable) {
        return Verdict::NotMetrizable;
    }
    let first = reports[0].verdict;
    if reports.iter().all(|r| r.verdict == first) {
        first
    } else {
        Verdict::Inconclusive
    }
}

/// Jets of `Φ'` in the adapted frame: `P⁻¹ Φ' P`.
pub fn adapted_phi_prime(sj: &SprayJets, eigenvectors: &JetMat) -> Option<JetMat> {
    let pp = sj.phi_prime().ok()?;
    Some(eigenvectors.inverse()?.mul(&pp).mul(eigenvectors))
}
