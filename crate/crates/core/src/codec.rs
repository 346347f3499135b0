//! JSON documents and report serialization.
//!
//! Rationals are written as reduced `"p/q"` strings. Integers are JSON
//! numbers when their magnitude is below `2^53` and decimal strings
//! otherwise; both forms are accepted on input, as are rationals written
//! `"p"` or as plain JSON integers.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bieberbach::{BieberbachGroup, SpaceGroup};
use crate::exactlin::{IntMatrix, IntVector, Rat, RatMatrix, RatVector};
use crate::foliation::{FoliationReport, LeafGroup, OrbifoldData, SigmaEntry};
use crate::intersect::IntersectionReport;
use crate::invariant::{Factor, MatrixGroup};
use crate::lattice::{saturate, Sublattice};
use crate::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

const SAFE_INT: i64 = 1 << 53;

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.abs() < SAFE_INT => json!(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Invalid(format!("expected an integer, found {n}"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("expected an integer, found {s:?}"))),
        other => Err(Error::Invalid(format!(
            "expected an integer, found {other}"
        ))),
    }
}

pub fn rat_to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn rat_from_str(s: &str) -> Result<Rat> {
    let bad = || Error::Invalid(format!("expected a rational \"p/q\", found {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(p, q))
}

pub fn rat_to_json(x: &Rat) -> Value {
    Value::String(rat_to_string(x))
}

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => rat_from_str(s),
        Value::Number(_) => Ok(Rat::from_integer(int_from_json(v)?)),
        other => Err(Error::Invalid(format!(
            "expected a rational, found {other}"
        ))),
    }
}

pub fn int_vec_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn rat_vec_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_to_json).collect())
}

/// Matrix as an array of rows.
pub fn int_matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| int_vec_to_json(r)).collect())
}

pub fn rat_matrix_to_json(m: &RatMatrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| rat_vec_to_json(r)).collect())
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid(format!("{what} must be an array")))
}

pub fn int_vec_from_json(v: &Value) -> Result<IntVector> {
    as_array(v, "integer vector")?
        .iter()
        .map(int_from_json)
        .collect()
}

pub fn rat_vec_from_json(v: &Value) -> Result<RatVector> {
    as_array(v, "rational vector")?
        .iter()
        .map(rat_from_json)
        .collect()
}

fn check_rows<T>(rows: &[Vec<T>], cols: usize, what: &str) -> Result<()> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid(format!(
            "{what} rows must all have length {cols}"
        )));
    }
    Ok(())
}

/// Parses a rational vector from a comma-separated list such as `1/2,0,1/3`.
pub fn parse_rat_list(s: &str) -> Result<RatVector> {
    s.split(',').map(rat_from_str).collect()
}

/// Group input: Gram matrix, holonomy generators and their translational parts.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct GroupDocument {
    pub schema_version: String,
    pub n: usize,
    pub gram: Vec<Vec<Value>>,
    pub point_generators: Vec<Vec<Vec<Value>>>,
    pub vector_system_generators: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GroupDocument {
    /// Document listing every non-identity holonomy element as a generator.
    pub fn from_group(g: &SpaceGroup, labels: Option<Vec<String>>) -> Self {
        let hol = g.holonomy();
        GroupDocument {
            schema_version: SCHEMA_VERSION.into(),
            n: g.dim(),
            gram: g
                .gram()
                .row_vecs()
                .iter()
                .map(|r| r.iter().map(rat_to_json).collect())
                .collect(),
            point_generators: hol.elements()[1..]
                .iter()
                .map(|a| {
                    a.row_vecs()
                        .iter()
                        .map(|r| r.iter().map(int_to_json).collect())
                        .collect()
                })
                .collect(),
            vector_system_generators: (1..hol.order())
                .map(|i| g.translation(i).iter().map(rat_to_json).collect())
                .collect(),
            labels,
        }
    }

    pub fn gram_matrix(&self) -> Result<RatMatrix> {
        let rows: Vec<RatVector> = self
            .gram
            .iter()
            .map(|r| r.iter().map(rat_from_json).collect())
            .collect::<Result<_>>()?;
        if rows.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: rows.len(),
            });
        }
        check_rows(&rows, self.n, "gram")?;
        Ok(RatMatrix::from_rows(&rows))
    }

    pub fn generators(&self) -> Result<Vec<IntMatrix>> {
        self.point_generators
            .iter()
            .map(|m| {
                let rows: Vec<IntVector> = m
                    .iter()
                    .map(|r| r.iter().map(int_from_json).collect())
                    .collect::<Result<_>>()?;
                if rows.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        found: rows.len(),
                    });
                }
                check_rows(&rows, self.n, "point generator")?;
                Ok(IntMatrix::from_rows(&rows))
            })
            .collect()
    }

    pub fn translations(&self) -> Result<Vec<RatVector>> {
        self.vector_system_generators
            .iter()
            .map(|v| v.iter().map(rat_from_json).collect())
            .collect()
    }

    pub fn to_space_group(&self, bound: usize) -> Result<SpaceGroup> {
        SpaceGroup::build(
            self.gram_matrix()?,
            &self.generators()?,
            &self.translations()?,
            bound,
        )
    }

    pub fn to_bieberbach(&self, bound: usize) -> Result<BieberbachGroup> {
        BieberbachGroup::try_from_space_group(self.to_space_group(bound)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("group document: {e}")))
    }
}

/// Subspace input: spanning lattice vectors as columns.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SubspaceDocument {
    pub schema_version: String,
    pub n: usize,
    pub basis: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl SubspaceDocument {
    pub fn from_sublattice(s: &Sublattice, label: Option<String>) -> Self {
        SubspaceDocument {
            schema_version: SCHEMA_VERSION.into(),
            n: s.ambient_dim(),
            basis: s
                .basis()
                .columns()
                .iter()
                .map(|c| c.iter().map(int_to_json).collect())
                .collect(),
            label,
        }
    }

    /// The saturation of the span of the listed columns.
    pub fn to_sublattice(&self) -> Result<Sublattice> {
        let cols: Vec<IntVector> = self
            .basis
            .iter()
            .map(|c| c.iter().map(int_from_json).collect())
            .collect::<Result<_>>()?;
        check_rows(&cols, self.n, "basis")?;
        Ok(saturate(&Sublattice::from_columns(self.n, &cols)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("subspace document: {e}")))
    }
}

/// A bare finite matrix group given by generators.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MatricesDocument {
    pub schema_version: String,
    pub n: usize,
    pub matrices: Vec<Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatricesDocument {
    pub fn from_group(g: &MatrixGroup, label: Option<String>) -> Self {
        MatricesDocument {
            schema_version: SCHEMA_VERSION.into(),
            n: g.dim(),
            matrices: g.elements()[1..]
                .iter()
                .map(|a| {
                    a.row_vecs()
                        .iter()
                        .map(|r| r.iter().map(int_to_json).collect())
                        .collect()
                })
                .collect(),
            label,
        }
    }

    pub fn to_group(&self, bound: usize) -> Result<MatrixGroup> {
        let mats = self
            .matrices
            .iter()
            .map(|m| {
                let rows: Vec<IntVector> = m
                    .iter()
                    .map(|r| r.iter().map(int_from_json).collect())
                    .collect::<Result<_>>()?;
                if rows.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        found: rows.len(),
                    });
                }
                check_rows(&rows, self.n, "matrix")?;
                Ok(IntMatrix::from_rows(&rows))
            })
            .collect::<Result<Vec<_>>>()?;
        crate::invariant::close_group_in_dim(self.n, &mats, bound)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("matrices document: {e}")))
    }
}

/// Multiplication-table input for regular-representation fixtures.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TableDocument {
    pub table: Vec<Vec<usize>>,
}

pub fn sublattice_to_json(s: &Sublattice) -> Value {
    json!({
        "n": s.ambient_dim(),
        "rank": s.rank(),
        "basis": s.basis().columns().iter().map(|c| int_vec_to_json(c)).collect::<Vec<_>>(),
    })
}

pub fn matrix_group_to_json(g: &MatrixGroup) -> Value {
    json!({
        "order": g.order(),
        "elements": g.elements().iter().map(int_matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn validate_report(g: &SpaceGroup) -> Value {
    json!({
        "torsion_free": g.is_torsion_free(),
        "orientable": g.is_orientable(),
        "order": g.holonomy().order(),
        "determinants": crate::invariant::determinants(g.holonomy()).iter().map(int_to_json).collect::<Vec<_>>(),
    })
}

pub fn space_group_to_json(g: &SpaceGroup) -> Value {
    json!({
        "n": g.dim(),
        "gram": rat_matrix_to_json(g.gram()),
        "holonomy": g.holonomy().elements().iter().map(int_matrix_to_json).collect::<Vec<_>>(),
        "vector_system": g.vector_system().iter().map(|b| rat_vec_to_json(b)).collect::<Vec<_>>(),
        "torsion_free": g.is_torsion_free(),
        "orientable": g.is_orientable(),
    })
}

fn sigma_to_json(s: &SigmaEntry) -> Value {
    json!({ "element": s.element, "offset": int_vec_to_json(&s.offset) })
}

pub fn leaf_group_to_json(l: &LeafGroup) -> Value {
    json!({
        "group": space_group_to_json(l.group.space_group()),
        "lattice_basis": rat_matrix_to_json(&l.lattice_basis),
        "lattice_index": int_to_json(&l.lattice_index),
        "restriction": l.restriction.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn orbifold_to_json(o: &OrbifoldData) -> Value {
    json!({
        "dim": o.dim,
        "gram": rat_matrix_to_json(&o.gram),
        "point_matrices": o.point_matrices.iter().map(int_matrix_to_json).collect::<Vec<_>>(),
        "projected_translations": o.projected_translations.iter().map(|b| rat_vec_to_json(b)).collect::<Vec<_>>(),
        "translation_basis": rat_matrix_to_json(&o.translation_basis),
        "covolume": rat_to_json(&o.covolume),
        "group": space_group_to_json(&o.group),
        "torsion_free": o.torsion_free,
    })
}

pub fn foliation_report_to_json(r: &FoliationReport) -> Value {
    json!({
        "n": r.n,
        "rank": r.rank,
        "k_prime": r.k_prime,
        "sigma": r.sigma.iter().map(sigma_to_json).collect::<Vec<_>>(),
        "diagnostics": {
            "sigma_holonomy_equals_k_prime": r.sigma_equals_k_prime,
            "k_prime_order": r.k_prime.len(),
            "sigma_holonomy_order": r.sigma.len(),
        },
        "leaf_group": leaf_group_to_json(&r.leaf),
        "covering_degree": r.covering_degree,
        "leaf_orientable": r.leaf_orientable,
        "sample_generic_coset": rat_vec_to_json(&r.sample_generic),
        "cosets": r.cosets.iter().map(|c| json!({
            "point": rat_vec_to_json(&c.point),
            "generic": c.generic,
            "stabilizer_index": c.stabilizer_index,
            "stabilizing_elements": c.stabilizing_elements,
            "leaf_lattice_index": int_to_json(&c.leaf_lattice_index),
            "leaf_holonomy_order": c.leaf_holonomy_order,
        })).collect::<Vec<_>>(),
        "orbifold": orbifold_to_json(&r.orbifold),
    })
}

pub fn intersection_report_to_json(r: &IntersectionReport) -> Value {
    json!({
        "t": int_to_json(&r.t),
        "hhat": r.hhat,
        "m": int_to_json(&r.m),
        "oracle_t": r.oracle_t.as_ref().map(int_to_json),
        "oracle_m": r.oracle_m.as_ref().map(int_to_json),
        "witness1": rat_vec_to_json(&r.witness1),
        "witness2": rat_vec_to_json(&r.witness2),
    })
}

pub fn factors_to_json(factors: &[Factor]) -> Value {
    Value::Array(
        factors
            .iter()
            .map(|f| {
                let mut v = sublattice_to_json(&f.sublattice);
                v["minimal_at_bound"] = json!(f.minimal_at_bound);
                v
            })
            .collect(),
    )
}
