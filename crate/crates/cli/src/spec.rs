//! The JSON measure document.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "density": { "family": "semicircle", "poly": [1.0] },
//!   "masses": [ { "energy": 2.5, "weight": { "re": [[0.25, 0.25], [0.25, 0.25]] } } ],
//!   "quad_order": 4096,
//!   "normalize": "auto"
//! }
//! ```

use serde::{Deserialize, Serialize};
use szego_core::linalg::c64;
use szego_core::measure::DEFAULT_QUAD_ORDER;
use szego_core::{
    BoundarySampling, CMatrix, Density, Edge, MatField, MatrixMeasure, Normalization,
    ScalarDensity, Tolerances,
};

use crate::CliError;

/// A complex matrix as row-major real and imaginary parts. `im` may be omitted for real matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let part = |f: fn(&szego_core::C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        let im: Vec<Vec<f64>> = part(|z| z.im);
        MatrixSpec {
            re: part(|z| z.re),
            im: im.iter().flatten().any(|&x| x != 0.0).then_some(im),
        }
    }

    fn to_matrix(&self, dim: usize, path: &str) -> Result<CMatrix, CliError> {
        let square = |rows: &Vec<Vec<f64>>, part: &str| {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(CliError::Validation(format!(
                    "{path}.{part}: expected a {dim}x{dim} array"
                )));
            }
            if rows.iter().flatten().any(|x| !x.is_finite()) {
                return Err(CliError::Validation(format!(
                    "{path}.{part}: entries must be finite"
                )));
            }
            Ok(())
        };
        square(&self.re, "re")?;
        if let Some(im) = &self.im {
            square(im, "im")?;
        }
        Ok(CMatrix::from_fn(dim, dim, |i, j| {
            c64(self.re[i][j], self.im.as_ref().map_or(0.0, |m| m[i][j]))
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSpec {
    Semicircle,
    Arcsine,
}

impl From<EdgeSpec> for Edge {
    fn from(e: EdgeSpec) -> Edge {
        match e {
            EdgeSpec::Semicircle => Edge::Semicircle,
            EdgeSpec::Arcsine => Edge::Arcsine,
        }
    }
}

/// `edge(x) * (poly[0] + poly[1] x + ...)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarSpec {
    pub edge: EdgeSpec,
    pub poly: Vec<f64>,
}

impl ScalarSpec {
    fn to_density(&self) -> ScalarDensity {
        ScalarDensity::new(self.edge.into(), self.poly.clone())
    }
}

fn unit_poly() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    /// Scalar semicircle law (times `poly`) in every diagonal slot.
    Semicircle {
        #[serde(default = "unit_poly")]
        poly: Vec<f64>,
    },
    /// Scalar arcsine law (times `poly`) in every diagonal slot.
    Arcsine {
        #[serde(default = "unit_poly")]
        poly: Vec<f64>,
    },
    /// `U^* diag(f_1, .., f_l) U`; `unitary` defaults to the identity.
    Diagonal {
        entries: Vec<ScalarSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<MatrixSpec>,
    },
    /// `edge(x) sum_k C_k x^k`.
    MatrixPolynomial {
        edge: EdgeSpec,
        coeffs: Vec<MatrixSpec>,
    },
    /// Two scalar laws rotated by the angle `rate * x`.
    Twisted { entries: [ScalarSpec; 2], rate: f64 },
    /// Circle weight `w(theta_m)` on the midpoint grid `theta_m = -pi + (2m + 1) pi / M`.
    Table { samples: Vec<MatrixSpec> },
    /// Pure point measure.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassSpec {
    pub energy: f64,
    pub weight: MatrixSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizeSpec {
    #[default]
    Auto,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub dim: usize,
    pub density: DensitySpec,
    #[serde(default)]
    pub masses: Vec<MassSpec>,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    #[serde(default)]
    pub normalize: NormalizeSpec,
}

fn default_quad_order() -> usize {
    DEFAULT_QUAD_ORDER
}

/// Parses a document; errors carry the JSON path and line.
pub fn parse_spec(text: &str) -> Result<MeasureSpec, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::Parse(format!("at `{}`: {}", e.path(), e.inner())))
}

impl MeasureSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    fn density(&self) -> Result<Density, CliError> {
        let l = self.dim;
        Ok(match &self.density {
            DensitySpec::Semicircle { poly } => Density::Scalar {
                density: ScalarDensity::new(Edge::Semicircle, poly.clone()),
                dim: l,
            },
            DensitySpec::Arcsine { poly } => Density::Scalar {
                density: ScalarDensity::new(Edge::Arcsine, poly.clone()),
                dim: l,
            },
            DensitySpec::Diagonal { entries, unitary } => {
                if entries.len() != l {
                    return Err(CliError::Validation(format!(
                        "density.entries: expected {l} entries, found {}",
                        entries.len()
                    )));
                }
                let unitary = match unitary {
                    Some(u) => u.to_matrix(l, "density.unitary")?,
                    None => CMatrix::identity(l, l),
                };
                Density::Diagonal {
                    entries: entries.iter().map(ScalarSpec::to_density).collect(),
                    unitary,
                }
            }
            DensitySpec::MatrixPolynomial { edge, coeffs } => Density::MatrixPolynomial {
                edge: (*edge).into(),
                coeffs: coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.to_matrix(l, &format!("density.coeffs[{k}]")))
                    .collect::<Result<_, _>>()?,
            },
            DensitySpec::Twisted { entries, rate } => {
                if l != 2 {
                    return Err(CliError::Validation(
                        "density: the twisted family needs dim = 2".into(),
                    ));
                }
                Density::Twisted {
                    entries: [entries[0].to_density(), entries[1].to_density()],
                    rate: *rate,
                }
            }
            DensitySpec::Table { samples } => {
                let mats: Vec<CMatrix> = samples
                    .iter()
                    .enumerate()
                    .map(|(m, s)| s.to_matrix(l, &format!("density.samples[{m}]")))
                    .collect::<Result<_, _>>()?;
                let field = MatField::from_fn(l, mats.len(), |m| mats[m].clone());
                let samples = BoundarySampling::new(field)
                    .map_err(|e| CliError::Validation(format!("density.samples: {e}")))?;
                Density::Table { samples }
            }
            DensitySpec::None => Density::Zero { dim: l },
        })
    }

    /// Builds the measure. The Szegő condition is left to downstream stages,
    /// which report a degenerate weight as a numerical failure.
    pub fn to_measure(&self, tol: &Tolerances) -> Result<MatrixMeasure, CliError> {
        if self.dim == 0 {
            return Err(CliError::Validation("dim: must be positive".into()));
        }
        let mut builder = MatrixMeasure::builder(self.density()?)
            .quad_order(self.quad_order)
            .tolerances(*tol)
            .normalization(match self.normalize {
                NormalizeSpec::Auto => Normalization::Auto,
                NormalizeSpec::Strict => Normalization::Strict,
            })
            .allow_non_szego();
        for (j, m) in self.masses.iter().enumerate() {
            if !m.energy.is_finite() || m.energy.abs() <= 2.0 {
                return Err(CliError::Validation(format!(
                    "mass {}: E = {} inside [-2,2]",
                    j + 1,
                    m.energy
                )));
            }
            builder = builder.mass(
                m.energy,
                m.weight
                    .to_matrix(self.dim, &format!("masses[{j}].weight"))?,
            );
        }
        builder.build().map_err(CliError::from)
    }
}
