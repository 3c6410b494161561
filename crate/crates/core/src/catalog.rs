//! Built-in sprays and synthetic frames.

use crate::model::{FrameModel, Model};
use crate::sample::{FiberSampling, SampleSpec};
use crate::spray::SprayModel;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub provenance: &'static str,
    pub model: Model,
    /// Sampling region adapted to the entry's chart.
    pub sample: SampleSpec,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown catalog entry `{0}`")]
pub struct UnknownCatalogEntry(pub String);

fn spray(coeffs: &[&str], label: &str) -> Model {
    Model::Spray(SprayModel::parse(coeffs, label).expect("catalog expressions parse"))
}

fn frame3(v1: [&str; 2], v2: [&str; 2], lambdas: [&str; 2], label: &str) -> Model {
    let unit = |k: usize| (0..6).map(|i| if i == k { "1".to_string() } else { "0".to_string() }).collect();
    let vert = |c: [&str; 2]| vec!["0".into(), "0".into(), "0".into(), c[0].to_string(), c[1].to_string(), "0".into()];
    let h = vec![unit(0), unit(1), unit(2)];
    let v = vec![vert(v1), vert(v2), unit(5)];
    let l = vec![lambdas[0].to_string(), lambdas[1].to_string(), "0".to_string()];
    Model::Frame(FrameModel::parse(3, &h, &v, &l, label).expect("catalog expressions parse"))
}

fn fiber_box(ranges: &[[f64; 2]]) -> SampleSpec {
    SampleSpec { fiber: FiberSampling::Box { ranges: ranges.to_vec() }, ..SampleSpec::default() }
}

/// All entries, in listing order.
pub fn entries() -> Vec<CatalogEntry> {
    let positive = fiber_box(&[[0.1, 0.6]]);
    vec![
        CatalogEntry {
            name: "flat3",
            description: "f = 0 in dimension 3",
            provenance: "flat spray, straight-line geodesics",
            model: spray(&["0", "0", "0"], "flat3"),
            sample: SampleSpec::default(),
        },
        CatalogEntry {
            name: "isotropic3",
            description: "f^i = -|y| y^i: projectively flat with isotropic curvature",
            provenance: "projectively flat spray with projective factor |y|",
            model: spray(
                &["-sqrt(y1^2 + y2^2 + y3^2)*y1", "-sqrt(y1^2 + y2^2 + y3^2)*y2", "-sqrt(y1^2 + y2^2 + y3^2)*y3"],
                "isotropic3",
            ),
            sample: SampleSpec::default(),
        },
        CatalogEntry {
            name: "shear3",
            description: "f1 = x2 y3^2: Φ is nonzero and nilpotent, so all eigenvalues collide at 0",
            provenance: "degenerate spectrum that is neither flat nor isotropic",
            model: spray(&["x2*y3^2", "0", "0"], "shear3"),
            sample: SampleSpec::default(),
        },
        CatalogEntry {
            name: "paper-example",
            description: "f1 = x1 y1 y3, f2 = x3 y2^2, f3 = y3^2",
            provenance: "instance of the separable family x1'' = f1(x1, x3, x1'/x3') x3'^2, \
                         x2'' = f2(x2, x3, x2'/x3') x3'^2, x3'' = f3(x3) x3'^2",
            model: spray(&["x1*y1*y3", "x3*y2^2", "y3^2"], "paper-example"),
            sample: SampleSpec::default(),
        },
        CatalogEntry {
            name: "perturbed-example",
            description: "paper-example with f1 += x2 y1 y3",
            provenance: "perturbation that couples the first and second coordinates",
            model: spray(&["x1*y1*y3 + x2*y1*y3", "x3*y2^2", "y3^2"], "perturbed-example"),
            sample: SampleSpec::default(),
        },
        CatalogEntry {
            name: "frame-rank1",
            description: "explicit frame, h_i = ∂x_i, v1 = e^x1 (∂y1 + y2^2 ∂y2), v2 = e^x2 (y1^2 ∂y1 + ∂y2), \
                          λ = (3/2, -1/2); reduced relation with η1 η2 < 0 and rank Θ = 1",
            provenance: "synthetic reducible frame for the completed system",
            model: frame3(["exp(x1)", "exp(x1)*y2^2"], ["exp(x2)*y1^2", "exp(x2)"], ["1.5", "-0.5"], "frame-rank1"),
            sample: positive.clone(),
        },
        CatalogEntry {
            name: "frame-samesign",
            description: "frame-rank1 sampled where y1 y2 < 0, so η1 η2 > 0",
            provenance: "synthetic reducible frame for the completed system",
            model: frame3(["exp(x1)", "exp(x1)*y2^2"], ["exp(x2)*y1^2", "exp(x2)"], ["1.5", "-0.5"], "frame-samesign"),
            sample: fiber_box(&[[0.1, 0.6], [-0.6, -0.1], [0.1, 0.6]]),
        },
        CatalogEntry {
            name: "frame-rank2",
            description: "explicit frame, v1 = e^x1 (∂y1 + y2 ∂y2), v2 = e^x2 (y1 ∂y1 + ∂y2), λ = (3/2, -1/2); \
                          rank Θ = 2",
            provenance: "synthetic reducible frame for the completed system",
            model: frame3(["exp(x1)", "exp(x1)*y2"], ["exp(x2)*y1", "exp(x2)"], ["1.5", "-0.5"], "frame-rank2"),
            sample: positive.clone(),
        },
        CatalogEntry {
            name: "frame-etazero",
            description: "explicit frame, v1 = ∂y1, v2 = e^x2 (y1 ∂y1 + ∂y2), λ = (3/2, -1/2); η2 = 0, η1 ≠ 0",
            provenance: "synthetic reducible frame for the completed system",
            model: frame3(["1", "0"], ["exp(x2)*y1", "exp(x2)"], ["1.5", "-0.5"], "frame-etazero"),
            sample: positive,
        },
    ]
}

pub fn get(name: &str) -> Result<CatalogEntry, UnknownCatalogEntry> {
    entries().into_iter().find(|e| e.name == name).ok_or_else(|| UnknownCatalogEntry(name.to_string()))
}

pub fn names() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}
