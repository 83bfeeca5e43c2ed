//! JSON instance files.
//!
//! ```json
//! {
//!   "name": "optional label",
//!   "ground_set": 3,
//!   "function": {"type": "modular", "weights": [1, 2, 3]},
//!   "matroid": {"type": "uniform", "rank": 2},
//!   "linear_weights": [0.5, 0.5, 0.5]
//! }
//! ```
//!
//! Function types: `modular {weights}`, `coverage {item_weights, sets}`,
//! `facility_location {benefits}` (one row per client, one column per element),
//! `table {values}` keyed by the decimal subset bitmask (bit `i` is element `i`).
//! Matroid types: `uniform {rank}`, `partition {blocks, capacities}`,
//! `graphic {vertices, edges}` (element `i` is `edges[i]`), `explicit_bases {bases}`.
//! `linear_weights` is optional and only used by the γ-guessing solver.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matroid::{MatroidKind, MatroidOracle};
use crate::set::ElementSet;
use crate::setfn::{FunctionKind, SetFunction, SetFunctionOracle, MAX_TABLE_GROUND, REL_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ground_set: usize,
    pub function: FunctionSpec,
    pub matroid: MatroidSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Modular {
        weights: Vec<f64>,
    },
    Coverage {
        item_weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
    },
    FacilityLocation {
        benefits: Vec<Vec<f64>>,
    },
    Table {
        values: TableValues,
    },
}

/// Table entries keyed by decimal bitmask strings, serialized in numeric key order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableValues(pub Vec<(String, f64)>);

impl Serialize for TableValues {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for TableValues {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(deserializer)?;
        Ok(TableValues(map.into_iter().collect()))
    }
}

impl TableValues {
    pub fn from_dense(values: &[f64]) -> Self {
        TableValues(
            values
                .iter()
                .enumerate()
                .map(|(mask, v)| (mask.to_string(), *v))
                .collect(),
        )
    }

    fn to_dense(&self, n: usize) -> Result<Vec<f64>> {
        if n > MAX_TABLE_GROUND {
            return Err(Error::validation(
                "ground_set",
                format!("table functions support at most {MAX_TABLE_GROUND} elements, got {n}"),
            ));
        }
        let size = 1usize << n;
        let mut dense = vec![None; size];
        for (key, v) in &self.0 {
            let location = format!("function.values[\"{key}\"]");
            let mask: usize = key
                .parse()
                .map_err(|_| Error::validation(&location, "key is not a decimal bitmask"))?;
            if mask >= size {
                return Err(Error::validation(
                    &location,
                    format!("bitmask names elements outside the ground set of size {n}"),
                ));
            }
            if dense[mask].replace(*v).is_some() {
                return Err(Error::validation(
                    &location,
                    "duplicate entry for this subset",
                ));
            }
        }
        dense
            .into_iter()
            .enumerate()
            .map(|(mask, v)| {
                v.ok_or_else(|| {
                    Error::validation(
                        format!("function.values[\"{mask}\"]"),
                        "missing entry; tables must list every subset",
                    )
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform {
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<[usize; 2]>,
    },
    ExplicitBases {
        bases: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Reject table functions that are not monotone and submodular.
    pub validate: bool,
}

/// Oracles built from an instance file.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: Option<String>,
    pub function: SetFunctionOracle,
    pub matroid: MatroidOracle,
    pub linear_weights: Option<Vec<f64>>,
    /// Non-fatal notes produced while loading, e.g. normalization shifts.
    pub warnings: Vec<String>,
}

impl InstanceFile {
    pub fn into_instance(self, opts: LoadOptions) -> Result<Instance> {
        let n = self.ground_set;
        if n == 0 {
            return Err(Error::validation("ground_set", "must be at least 1"));
        }
        let kind = match self.function {
            FunctionSpec::Modular { weights } => FunctionKind::Modular { weights },
            FunctionSpec::Coverage { item_weights, sets } => {
                FunctionKind::Coverage { item_weights, sets }
            }
            FunctionSpec::FacilityLocation { benefits } => {
                FunctionKind::FacilityLocation { benefits }
            }
            FunctionSpec::Table { values } => FunctionKind::Table {
                values: values.to_dense(n)?,
            },
        };
        let function = SetFunctionOracle::new(n, kind)?;

        let mut warnings = Vec::new();
        if function.offset() != 0.0 {
            warnings.push(format!(
                "function.values[\"0\"] = {}; all values shifted by {} so that f(∅) = 0",
                function.offset(),
                -function.offset()
            ));
        }
        if opts.validate && matches!(function.kind(), FunctionKind::Table { .. }) {
            validate_table(&function)?;
        }

        let element_set = |location: String, ids: Vec<usize>| -> Result<ElementSet> {
            match ids.iter().find(|&&e| e >= n) {
                Some(e) => Err(Error::validation(
                    location,
                    format!("element {e} is outside the ground set of size {n}"),
                )),
                None => Ok(ids.into_iter().collect()),
            }
        };
        let kind = match self.matroid {
            MatroidSpec::Uniform { rank } => MatroidKind::Uniform { rank },
            MatroidSpec::Partition { blocks, capacities } => {
                MatroidKind::Partition { blocks, capacities }
            }
            MatroidSpec::Graphic { vertices, edges } => MatroidKind::Graphic {
                vertices,
                edges: edges.into_iter().map(|[a, b]| (a, b)).collect(),
            },
            MatroidSpec::ExplicitBases { bases } => MatroidKind::ExplicitBases {
                bases: bases
                    .into_iter()
                    .enumerate()
                    .map(|(i, b)| element_set(format!("matroid.bases[{i}]"), b))
                    .collect::<Result<_>>()?,
            },
        };
        let matroid = MatroidOracle::new(n, kind)?;

        if let Some(w) = &self.linear_weights {
            if w.len() != n {
                return Err(Error::validation(
                    "linear_weights",
                    format!("expected {n} weights, got {}", w.len()),
                ));
            }
            if let Some(i) = w.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::validation(
                    format!("linear_weights[{i}]"),
                    "weight must be finite and non-negative",
                ));
            }
        }

        Ok(Instance {
            name: self.name,
            function,
            matroid,
            linear_weights: self.linear_weights,
            warnings,
        })
    }

    /// Describes existing oracles; raw (unshifted) table values are preserved.
    pub fn from_oracles(
        name: Option<String>,
        function: &SetFunctionOracle,
        matroid: &MatroidOracle,
        linear_weights: Option<Vec<f64>>,
    ) -> Self {
        let function_spec = match function.kind().clone() {
            FunctionKind::Modular { weights } => FunctionSpec::Modular { weights },
            FunctionKind::Coverage { item_weights, sets } => {
                FunctionSpec::Coverage { item_weights, sets }
            }
            FunctionKind::FacilityLocation { benefits } => {
                FunctionSpec::FacilityLocation { benefits }
            }
            FunctionKind::Table { values } => FunctionSpec::Table {
                values: TableValues::from_dense(&values),
            },
        };
        let matroid_spec = match matroid.kind().clone() {
            MatroidKind::Uniform { rank } => MatroidSpec::Uniform { rank },
            MatroidKind::Partition { blocks, capacities } => {
                MatroidSpec::Partition { blocks, capacities }
            }
            MatroidKind::Graphic { vertices, edges } => MatroidSpec::Graphic {
                vertices,
                edges: edges.into_iter().map(|(a, b)| [a, b]).collect(),
            },
            MatroidKind::ExplicitBases { bases } => MatroidSpec::ExplicitBases {
                bases: bases.into_iter().map(|b| b.to_vec()).collect(),
            },
        };
        InstanceFile {
            name,
            ground_set: function.ground().len(),
            function: function_spec,
            matroid: matroid_spec,
            linear_weights,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }
}

/// Monotonicity over all `(S, e)` and the local exchange form of
/// submodularity `f(S+a) + f(S+b) ≥ f(S+a+b) + f(S)`, which is equivalent to
/// the lattice inequality.
fn validate_table(f: &SetFunctionOracle) -> Result<()> {
    let tol = REL_TOL * f.scale();
    let ground = f.ground();
    let full = ground.full();
    for s in ground.subsets() {
        let fs = f.value(s);
        if fs < -tol {
            return Err(Error::validation(
                format!("function.values[\"{}\"]", s.mask()),
                format!("f({s}) = {fs} is negative after normalization"),
            ));
        }
        let outside: Vec<usize> = full.difference(s).to_vec();
        for (i, &a) in outside.iter().enumerate() {
            let fa = f.value(s.with(a));
            if fa < fs - tol {
                return Err(Error::validation(
                    format!("function.values[\"{}\"]", s.with(a).mask()),
                    format!("not monotone: f({}) < f({s})", s.with(a)),
                ));
            }
            for &b in &outside[i + 1..] {
                let fb = f.value(s.with(b));
                let fab = f.value(s.with(a).with(b));
                if fa + fb < fab + fs - tol {
                    return Err(Error::validation(
                        format!("function.values[\"{}\"]", s.with(a).with(b).mask()),
                        format!(
                            "not submodular: f({}) + f({}) < f({}) + f({s})",
                            s.with(a),
                            s.with(b),
                            s.with(a).with(b)
                        ),
                    ));
                }
            }
        }
    }
    Ok(())
}

pub fn parse_instance(json: &str, opts: LoadOptions) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(json)?;
    file.into_instance(opts)
}

/// Reads and builds an instance from a JSON file.
pub fn load_instance(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text, opts)
}
