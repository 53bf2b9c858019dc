//! Problem and family file formats (JSON) and their validation.
//!
//! Complex numbers are encoded as `[re, im]` pairs with a bare-number
//! shorthand for reals; the serializer always emits the shorthand where the
//! imaginary part vanishes, which is the canonical form.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use slp_core::Complex64;

use slp_core::branch::{FamilyTarget, ProblemFamily};
use slp_core::deriv::EquationTangent;
use slp_core::{
    BcTangent, BoundaryCondition, ChartId, CoupledParams, EquationClass, Mat2, SeparatedParams,
    SlEquation,
};

/// One failed validation with its location, printed to standard error.
#[derive(Debug)]
pub struct InputError {
    pub diagnostics: Vec<String>,
}

impl InputError {
    fn one(msg: impl Into<String>) -> InputError {
        InputError {
            diagnostics: vec![msg.into()],
        }
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in &self.diagnostics {
            writeln!(f, "error: {d}")?;
        }
        Ok(())
    }
}

/// A complex scalar in file form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx(pub Complex64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Real(re) => Cx(Complex64::new(re, 0.0)),
            Raw::Pair([re, im]) => Cx(Complex64::new(re, im)),
        })
    }
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx(z)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BcSpec {
    #[serde(rename = "matrix")]
    Matrix {
        #[serde(rename = "A")]
        a: [[Cx; 2]; 2],
        #[serde(rename = "B")]
        b: [[Cx; 2]; 2],
    },
    #[serde(rename = "separated")]
    Separated { alpha: f64, beta: f64 },
    #[serde(rename = "coupled")]
    Coupled {
        gamma: f64,
        #[serde(rename = "K")]
        k: [[f64; 2]; 2],
    },
}

/// A single problem: equation coefficients plus a boundary condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub f: Vec<Cx>,
    pub q: Vec<Cx>,
    pub w: Vec<Cx>,
    pub bc: BcSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

fn lift(v: &[Cx]) -> Vec<Complex64> {
    v.iter().map(|c| c.0).collect()
}

fn mat(m: &[[Cx; 2]; 2]) -> Mat2 {
    Mat2::new([[m[0][0].0, m[0][1].0], [m[1][0].0, m[1][1].0]])
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, InputError> {
        serde_json::from_str(text).map_err(|e| {
            InputError::one(format!(
                "parse failure at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    /// Converts to core types, collecting every violation with its position.
    pub fn to_problem(&self) -> Result<(SlEquation, BoundaryCondition), InputError> {
        let mut diagnostics = Vec::new();
        if self.f.len() != self.n + 1 {
            diagnostics.push(format!(
                "f has {} entries, expected N+1 = {}",
                self.f.len(),
                self.n + 1
            ));
        }
        if self.q.len() != self.n {
            diagnostics.push(format!(
                "q has {} entries, expected N = {}",
                self.q.len(),
                self.n
            ));
        }
        if self.w.len() != self.n {
            diagnostics.push(format!(
                "w has {} entries, expected N = {}",
                self.w.len(),
                self.n
            ));
        }
        let class = match self.class.as_deref() {
            Some("complex") => Some(EquationClass::Complex),
            Some("real") => Some(EquationClass::Real),
            Some("real_positive_weight") => Some(EquationClass::RealPositiveWeight),
            Some(other) => {
                diagnostics.push(format!(
                    "class \"{other}\" is not one of complex | real | real_positive_weight"
                ));
                None
            }
            None => None,
        };
        if !diagnostics.is_empty() {
            return Err(InputError { diagnostics });
        }

        let (f, q, w) = (lift(&self.f), lift(&self.q), lift(&self.w));
        let class = class.unwrap_or_else(|| {
            let all_real = f.iter().chain(&q).chain(&w).all(|z| z.im == 0.0);
            if all_real && w.iter().all(|z| z.re > 0.0) {
                EquationClass::RealPositiveWeight
            } else if all_real {
                EquationClass::Real
            } else {
                EquationClass::Complex
            }
        });
        let eq = SlEquation::new(f, q, w, class);
        for v in eq.validate() {
            diagnostics.push(v.to_string());
        }

        let bc = match &self.bc {
            BcSpec::Matrix { a, b } => {
                BoundaryCondition::new(mat(a), mat(b)).map_err(|e| format!("bc: {e}"))
            }
            BcSpec::Separated { alpha, beta } => SeparatedParams::new(*alpha, *beta)
                .map(|p| p.bc())
                .map_err(|e| format!("bc: {e}")),
            BcSpec::Coupled { gamma, k } => CoupledParams::new(*gamma, Mat2::from_real(*k))
                .map(|p| p.bc())
                .map_err(|e| format!("bc: {e}")),
        };
        match bc {
            Ok(bc) if diagnostics.is_empty() => Ok((eq, bc)),
            Ok(_) => Err(InputError { diagnostics }),
            Err(msg) => {
                diagnostics.push(msg);
                Err(InputError { diagnostics })
            }
        }
    }

    /// Canonical serialized form.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Direction payload of a family: a chart tangent or an equation tangent.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionSpec {
    SelfAdjointChart {
        chart: String,
        da: f64,
        dz: Cx,
        db: f64,
    },
    GeneralChart {
        chart: String,
        coords: [Cx; 4],
    },
    Equation {
        h: Vec<f64>,
        k: Vec<f64>,
        l: Vec<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionSpec>,
    pub range: [f64; 2],
    pub steps: usize,
}

/// A problem plus a one-parameter family over it and the branch start.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    #[serde(flatten)]
    pub problem: ProblemFile,
    pub family: FamilySpec,
    pub start_lambda: Cx,
}

impl FamilyFile {
    pub fn parse(text: &str) -> Result<FamilyFile, InputError> {
        serde_json::from_str(text).map_err(|e| {
            InputError::one(format!(
                "parse failure at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn to_family(&self) -> Result<(ProblemFamily, Complex64), InputError> {
        let (eq, bc) = self.problem.to_problem()?;
        let n = eq.n();
        let spec = &self.family;
        let target = match spec.target.as_str() {
            "separated_alpha" | "separated_beta" => {
                if bc.separated_params().is_err() {
                    return Err(InputError::one(format!(
                        "family.target {} requires a separated self-adjoint bc",
                        spec.target
                    )));
                }
                if spec.target == "separated_alpha" {
                    FamilyTarget::SeparatedAlpha
                } else {
                    FamilyTarget::SeparatedBeta
                }
            }
            "coupled_gamma" => {
                if bc.coupled_params().is_err() {
                    return Err(InputError::one(
                        "family.target coupled_gamma requires a coupled self-adjoint bc",
                    ));
                }
                FamilyTarget::CoupledGamma
            }
            t @ ("eq_inv_f" | "eq_q" | "eq_w") => {
                let Some(index) = spec.index else {
                    return Err(InputError::one(format!(
                        "family.target {t} requires family.index"
                    )));
                };
                let tangent = match t {
                    "eq_inv_f" if index <= n => EquationTangent::unit_inv_f(n, index),
                    "eq_q" if (1..=n).contains(&index) => EquationTangent::unit_q(n, index),
                    "eq_w" if (1..=n).contains(&index) => EquationTangent::unit_w(n, index),
                    _ => {
                        return Err(InputError::one(format!(
                            "family.index {index} out of range for target {t} with N = {n}"
                        )))
                    }
                };
                FamilyTarget::Equation(tangent)
            }
            "equation" => match &spec.direction {
                Some(DirectionSpec::Equation { h, k, l }) => {
                    let tangent = EquationTangent {
                        h: h.clone(),
                        k: k.clone(),
                        l: l.clone(),
                    };
                    if !tangent.shape_matches(n) {
                        return Err(InputError::one(format!(
                            "family.direction shape mismatch: h needs N+1 = {} entries, q and w need N = {n}",
                            n + 1
                        )));
                    }
                    FamilyTarget::Equation(tangent)
                }
                _ => {
                    return Err(InputError::one(
                        "family.target equation requires family.direction with h, k, l arrays",
                    ))
                }
            },
            "bc_chart_coord" => match &spec.direction {
                Some(DirectionSpec::SelfAdjointChart { chart, da, dz, db }) => {
                    let chart = parse_chart(chart)?;
                    let tangent = BcTangent::self_adjoint(chart, *da, dz.0, *db)
                        .map_err(|e| InputError::one(format!("family.direction: {e}")))?;
                    FamilyTarget::BcChart(tangent)
                }
                Some(DirectionSpec::GeneralChart { chart, coords }) => {
                    let chart = parse_chart(chart)?;
                    let coords = [coords[0].0, coords[1].0, coords[2].0, coords[3].0];
                    let tangent = BcTangent::general(chart, coords)
                        .map_err(|e| InputError::one(format!("family.direction: {e}")))?;
                    FamilyTarget::BcChart(tangent)
                }
                _ => return Err(InputError::one(
                    "family.target bc_chart_coord requires family.direction with a chart payload",
                )),
            },
            other => {
                return Err(InputError::one(format!(
                    "family.target \"{other}\" is not one of separated_alpha | separated_beta | \
                     coupled_gamma | eq_inv_f | eq_q | eq_w | equation | bc_chart_coord"
                )))
            }
        };
        if spec.steps < 2 {
            return Err(InputError::one("family.steps must be at least 2"));
        }
        let family = ProblemFamily {
            base_eq: eq,
            base_bc: bc,
            target,
            range: (spec.range[0], spec.range[1]),
            steps: spec.steps,
        };
        Ok((family, self.start_lambda.0))
    }
}

pub fn parse_chart(name: &str) -> Result<ChartId, InputError> {
    ChartId::parse(name)
        .ok_or_else(|| InputError::one(format!("unknown chart \"{name}\" (N12..N34, O13..O24)")))
}

/// Tangent payload of the `derivative` subcommand.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind")]
pub enum TangentSpec {
    #[serde(rename = "separated")]
    Separated,
    #[serde(rename = "bc_chart")]
    BcChart {
        chart: String,
        #[serde(default)]
        coords: Option<[Cx; 4]>,
        #[serde(default)]
        da: Option<f64>,
        #[serde(default)]
        dz: Option<Cx>,
        #[serde(default)]
        db: Option<f64>,
    },
    #[serde(rename = "equation")]
    Equation {
        h: Vec<f64>,
        k: Vec<f64>,
        l: Vec<f64>,
    },
}
