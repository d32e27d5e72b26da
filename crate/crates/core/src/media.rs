//! Elastic materials: Voigt stiffness matrices, symmetry-class constants,
//! stability bounds, and the material JSON format.

use crate::error::Error;
use crate::sym3::Sym3;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Tolerance on `|‖n‖ − 1|` for directions fed to the tensor contraction.
pub const UNIT_DIRECTION_TOL: f64 = 1e-12;

/// Voigt pair index: 11→0, 22→1, 33→2, 23→3, 13→4, 12→5.
pub fn voigt_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        (0, 1) => 5,
        _ => panic!("tensor index out of range: ({i}, {j})"),
    }
}

/// 6x6 symmetric stiffness matrix in Voigt notation, stress units (Pa).
///
/// Standard stiffness convention: no factor-of-two scaling on shear entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessVoigt {
    c: [[f64; 6]; 6],
}

impl StiffnessVoigt {
    /// Builds from full rows; entries must be finite and symmetric.
    pub fn from_rows(c: [[f64; 6]; 6]) -> Result<StiffnessVoigt, Error> {
        for row in &c {
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::NonFiniteStiffness);
                }
            }
        }
        let scale = c
            .iter()
            .flatten()
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(1e-300);
        for i in 0..6 {
            for j in (i + 1)..6 {
                if (c[i][j] - c[j][i]).abs() > 1e-9 * scale {
                    return Err(Error::AsymmetricStiffness { i, j });
                }
            }
        }
        let mut sym = c;
        for i in 0..6 {
            for j in (i + 1)..6 {
                let v = 0.5 * (c[i][j] + c[j][i]);
                sym[i][j] = v;
                sym[j][i] = v;
            }
        }
        Ok(StiffnessVoigt { c: sym })
    }

    fn from_rows_unchecked(c: [[f64; 6]; 6]) -> StiffnessVoigt {
        StiffnessVoigt { c }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i][j]
    }

    pub fn rows(&self) -> &[[f64; 6]; 6] {
        &self.c
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn scaled(&self, k: f64) -> StiffnessVoigt {
        let mut c = self.c;
        for row in &mut c {
            for v in row {
                *v *= k;
            }
        }
        StiffnessVoigt { c }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().flatten().all(|v| v.is_finite())
    }

    /// Contracts the full fourth-order tensor with `n` twice: the result is
    /// `ρΓ` with entries `C^{ijkl} n_j n_k`, reconstructed from the Voigt
    /// matrix with the minor symmetries applied.
    ///
    /// Requires `|‖n‖ − 1| ≤ 1e-12`.
    pub fn contract(&self, n: &Vector3<f64>) -> Result<Sym3, Error> {
        let deviation = (n.norm() - 1.0).abs();
        if !(deviation <= UNIT_DIRECTION_TOL) {
            return Err(Error::NonUnitDirection { deviation });
        }
        Ok(self.contract_unchecked(n))
    }

    pub(crate) fn contract_unchecked(&self, n: &Vector3<f64>) -> Sym3 {
        let mut m = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for l in i..3 {
                let mut acc = 0.0;
                for j in 0..3 {
                    for k in 0..3 {
                        acc += self.c[voigt_index(i, j)][voigt_index(k, l)] * n[j] * n[k];
                    }
                }
                m[i][l] = acc;
            }
        }
        Sym3 {
            xx: m[0][0],
            xy: m[0][1],
            xz: m[0][2],
            yy: m[1][1],
            yz: m[1][2],
            zz: m[2][2],
        }
    }
}

/// Symmetry-class constants, all in Pa.
#[derive(Debug, Clone, PartialEq)]
pub enum SymmetrySpec {
    Isotropic {
        lambda: f64,
        mu: f64,
    },
    Cubic {
        c11: f64,
        c12: f64,
        c44: f64,
    },
    Hexagonal {
        c11: f64,
        c12: f64,
        c13: f64,
        c33: f64,
        c44: f64,
    },
    Tetragonal {
        c11: f64,
        c12: f64,
        c13: f64,
        c33: f64,
        c44: f64,
        c66: f64,
    },
    Orthorhombic {
        c11: f64,
        c22: f64,
        c33: f64,
        c12: f64,
        c13: f64,
        c23: f64,
        c44: f64,
        c55: f64,
        c66: f64,
    },
    Triclinic {
        voigt: StiffnessVoigt,
    },
}

/// Expands class constants to the full 6x6 Voigt matrix. For hexagonal input
/// the closure C66 = (C11 − C12)/2 is applied; off-class entries are zero.
pub fn expand_symmetry(spec: &SymmetrySpec) -> StiffnessVoigt {
    let mut c = [[0.0f64; 6]; 6];
    let mut set = |i: usize, j: usize, v: f64| {
        c[i - 1][j - 1] = v;
        c[j - 1][i - 1] = v;
    };
    match *spec {
        SymmetrySpec::Isotropic { lambda, mu } => {
            for i in 1..=3 {
                set(i, i, lambda + 2.0 * mu);
                set(i + 3, i + 3, mu);
            }
            set(1, 2, lambda);
            set(1, 3, lambda);
            set(2, 3, lambda);
        }
        SymmetrySpec::Cubic { c11, c12, c44 } => {
            for i in 1..=3 {
                set(i, i, c11);
                set(i + 3, i + 3, c44);
            }
            set(1, 2, c12);
            set(1, 3, c12);
            set(2, 3, c12);
        }
        SymmetrySpec::Hexagonal {
            c11,
            c12,
            c13,
            c33,
            c44,
        } => {
            set(1, 1, c11);
            set(2, 2, c11);
            set(3, 3, c33);
            set(1, 2, c12);
            set(1, 3, c13);
            set(2, 3, c13);
            set(4, 4, c44);
            set(5, 5, c44);
            set(6, 6, (c11 - c12) / 2.0);
        }
        SymmetrySpec::Tetragonal {
            c11,
            c12,
            c13,
            c33,
            c44,
            c66,
        } => {
            set(1, 1, c11);
            set(2, 2, c11);
            set(3, 3, c33);
            set(1, 2, c12);
            set(1, 3, c13);
            set(2, 3, c13);
            set(4, 4, c44);
            set(5, 5, c44);
            set(6, 6, c66);
        }
        SymmetrySpec::Orthorhombic {
            c11,
            c22,
            c33,
            c12,
            c13,
            c23,
            c44,
            c55,
            c66,
        } => {
            set(1, 1, c11);
            set(2, 2, c22);
            set(3, 3, c33);
            set(1, 2, c12);
            set(1, 3, c13);
            set(2, 3, c23);
            set(4, 4, c44);
            set(5, 5, c55);
            set(6, 6, c66);
        }
        SymmetrySpec::Triclinic { ref voigt } => return *voigt,
    }
    StiffnessVoigt::from_rows_unchecked(c)
}

/// An elastic material: stiffness in Pa plus mass density in kg/m³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    stiffness: StiffnessVoigt,
    density: f64,
}

impl Material {
    pub fn new(stiffness: StiffnessVoigt, density: f64) -> Result<Material, Error> {
        if !density.is_finite() || density <= 0.0 {
            return Err(Error::InvalidDensity(density));
        }
        if !stiffness.is_finite() {
            return Err(Error::NonFiniteStiffness);
        }
        Ok(Material { stiffness, density })
    }

    pub fn from_spec(spec: &SymmetrySpec, density: f64) -> Result<Material, Error> {
        let stiffness = expand_symmetry(spec);
        if !stiffness.is_finite() {
            return Err(Error::NonFiniteStiffness);
        }
        Material::new(stiffness, density)
    }

    pub fn stiffness(&self) -> &StiffnessVoigt {
        &self.stiffness
    }

    pub fn density(&self) -> f64 {
        self.density
    }
}

/// Born's stability criterion for cubic crystals:
/// C11 − C12 > 0, C11 + 2 C12 > 0, C44 > 0.
pub fn born_stability_cubic(c11: f64, c12: f64, c44: f64) -> bool {
    c11 - c12 > 0.0 && c11 + 2.0 * c12 > 0.0 && c44 > 0.0
}

/// Positivity of both squared speeds along an axis: γ/2 > σ > −γ, strict.
pub fn speed_bound_check(gamma: f64, sigma: f64) -> bool {
    gamma / 2.0 > sigma && sigma > -gamma
}

// ---------------------------------------------------------------------------
// Material JSON format
// ---------------------------------------------------------------------------

/// Failure loading a material description.
#[derive(Debug, thiserror::Error)]
pub enum MaterialFileError {
    /// Structural problem: missing/unknown/ill-typed fields.
    #[error("material schema error: {0}")]
    Schema(String),
    /// A constant parsed but is not a finite number.
    #[error("non-finite material constant: {0}")]
    NonFinite(String),
}

/// Input unit system for stiffness constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    Pa,
    GPa,
}

impl Units {
    fn factor(self) -> f64 {
        match self {
            Units::Pa => 1.0,
            Units::GPa => 1e9,
        }
    }
}

const CLASS_CONSTANTS: &[(&str, &[&str])] = &[
    ("isotropic", &["lambda", "mu"]),
    ("cubic", &["C11", "C12", "C44"]),
    ("hexagonal", &["C11", "C12", "C13", "C33", "C44"]),
    ("tetragonal", &["C11", "C12", "C13", "C33", "C44", "C66"]),
    (
        "orthorhombic",
        &["C11", "C22", "C33", "C12", "C13", "C23", "C44", "C55", "C66"],
    ),
];

fn finite_number(v: &Value, field: &str) -> Result<f64, MaterialFileError> {
    let x = v
        .as_f64()
        .ok_or_else(|| MaterialFileError::Schema(format!("field `{field}` must be a number")))?;
    if !x.is_finite() {
        return Err(MaterialFileError::NonFinite(format!(
            "field `{field}` is {x}"
        )));
    }
    Ok(x)
}

/// Parses a material from its JSON value.
///
/// Accepted shapes:
/// `{ "density": ρ, "units": "Pa"|"GPa", "symmetry": class, "constants": {...} }` or
/// `{ "density": ρ, "units": ..., "voigt": [[6x6]] }`.
/// `units_override`, when given, wins over the file's `units` field.
pub fn material_from_json(
    value: &Value,
    units_override: Option<Units>,
) -> Result<Material, MaterialFileError> {
    let obj = value
        .as_object()
        .ok_or_else(|| MaterialFileError::Schema("top level must be a JSON object".into()))?;

    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "density" | "units" | "symmetry" | "constants" | "voigt"
        ) {
            return Err(MaterialFileError::Schema(format!(
                "unknown field `{key}`"
            )));
        }
    }

    let density = finite_number(
        obj.get("density")
            .ok_or_else(|| MaterialFileError::Schema("missing field `density`".into()))?,
        "density",
    )?;
    if density <= 0.0 {
        return Err(MaterialFileError::Schema(format!(
            "field `density` must be positive, got {density}"
        )));
    }

    let units = match units_override {
        Some(u) => u,
        None => match obj.get("units") {
            None => Units::Pa,
            Some(Value::String(s)) if s == "Pa" => Units::Pa,
            Some(Value::String(s)) if s == "GPa" => Units::GPa,
            Some(_) => {
                return Err(MaterialFileError::Schema(
                    "field `units` must be \"Pa\" or \"GPa\"".into(),
                ))
            }
        },
    };

    let symmetry = obj.get("symmetry");
    let voigt = obj.get("voigt");
    if let (Some(sym), Some(_)) = (symmetry, voigt) {
        if sym.as_str() != Some("triclinic") {
            return Err(MaterialFileError::Schema(
                "give either `symmetry`+`constants` or `voigt`, not both".into(),
            ));
        }
    }

    let stiffness = match (symmetry, voigt) {
        (Some(sym), None) => {
            let class = sym.as_str().ok_or_else(|| {
                MaterialFileError::Schema("field `symmetry` must be a string".into())
            })?;
            if class == "triclinic" {
                return Err(MaterialFileError::Schema(
                    "symmetry `triclinic` requires a `voigt` matrix".into(),
                ));
            }
            let names = CLASS_CONSTANTS
                .iter()
                .find(|(c, _)| *c == class)
                .map(|(_, names)| *names)
                .ok_or_else(|| {
                    MaterialFileError::Schema(format!("unknown symmetry class `{class}`"))
                })?;
            let constants = obj
                .get("constants")
                .and_then(Value::as_object)
                .ok_or_else(|| {
                    MaterialFileError::Schema("missing or ill-typed field `constants`".into())
                })?;
            for key in constants.keys() {
                if !names.contains(&key.as_str()) {
                    return Err(MaterialFileError::Schema(format!(
                        "unknown constant `constants.{key}` for symmetry `{class}`"
                    )));
                }
            }
            let get = |name: &str| -> Result<f64, MaterialFileError> {
                let v = constants.get(name).ok_or_else(|| {
                    MaterialFileError::Schema(format!(
                        "missing constant `constants.{name}` for symmetry `{class}`"
                    ))
                })?;
                Ok(finite_number(v, &format!("constants.{name}"))? * units.factor())
            };
            let spec = match class {
                "isotropic" => SymmetrySpec::Isotropic {
                    lambda: get("lambda")?,
                    mu: get("mu")?,
                },
                "cubic" => SymmetrySpec::Cubic {
                    c11: get("C11")?,
                    c12: get("C12")?,
                    c44: get("C44")?,
                },
                "hexagonal" => SymmetrySpec::Hexagonal {
                    c11: get("C11")?,
                    c12: get("C12")?,
                    c13: get("C13")?,
                    c33: get("C33")?,
                    c44: get("C44")?,
                },
                "tetragonal" => SymmetrySpec::Tetragonal {
                    c11: get("C11")?,
                    c12: get("C12")?,
                    c13: get("C13")?,
                    c33: get("C33")?,
                    c44: get("C44")?,
                    c66: get("C66")?,
                },
                "orthorhombic" => SymmetrySpec::Orthorhombic {
                    c11: get("C11")?,
                    c22: get("C22")?,
                    c33: get("C33")?,
                    c12: get("C12")?,
                    c13: get("C13")?,
                    c23: get("C23")?,
                    c44: get("C44")?,
                    c55: get("C55")?,
                    c66: get("C66")?,
                },
                _ => unreachable!(),
            };
            expand_symmetry(&spec)
        }
        (_, Some(voigt)) => {
            let rows = voigt.as_array().ok_or_else(|| {
                MaterialFileError::Schema("field `voigt` must be a 6x6 array".into())
            })?;
            if rows.len() != 6 {
                return Err(MaterialFileError::Schema(format!(
                    "field `voigt` must have 6 rows, got {}",
                    rows.len()
                )));
            }
            let mut c = [[0.0f64; 6]; 6];
            for (i, row) in rows.iter().enumerate() {
                let entries = row.as_array().ok_or_else(|| {
                    MaterialFileError::Schema(format!("field `voigt[{i}]` must be an array"))
                })?;
                if entries.len() != 6 {
                    return Err(MaterialFileError::Schema(format!(
                        "field `voigt[{i}]` must have 6 entries, got {}",
                        entries.len()
                    )));
                }
                for (j, e) in entries.iter().enumerate() {
                    c[i][j] = finite_number(e, &format!("voigt[{i}][{j}]"))? * units.factor();
                }
            }
            StiffnessVoigt::from_rows(c).map_err(|e| match e {
                Error::AsymmetricStiffness { i, j } => MaterialFileError::Schema(format!(
                    "field `voigt` is not symmetric at [{i}][{j}]"
                )),
                Error::NonFiniteStiffness => {
                    MaterialFileError::NonFinite("field `voigt`".into())
                }
                other => MaterialFileError::Schema(other.to_string()),
            })?
        }
        (None, None) => {
            return Err(MaterialFileError::Schema(
                "missing `symmetry`+`constants` or `voigt`".into(),
            ))
        }
    };

    Material::new(stiffness, density).map_err(|e| MaterialFileError::Schema(e.to_string()))
}

/// Parses a material from JSON text.
pub fn material_from_json_str(
    text: &str,
    units_override: Option<Units>,
) -> Result<Material, MaterialFileError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| MaterialFileError::Schema(format!("invalid JSON: {e}")))?;
    material_from_json(&value, units_override)
}

/// Normalized JSON echo of a material (always Pa + full Voigt matrix); the
/// output is itself a valid material file.
pub fn material_to_json(material: &Material) -> Value {
    let rows: Vec<Value> = material
        .stiffness()
        .rows()
        .iter()
        .map(|row| Value::Array(row.iter().map(|&v| serde_json::json!(v)).collect()))
        .collect();
    serde_json::json!({
        "density": material.density(),
        "units": "Pa",
        "voigt": rows,
    })
}
