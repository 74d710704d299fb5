//! JSON interchange format for spaces and maps.
//!
//! ```json
//! { "labels": ["x", "y", "z"],
//!   "dist": [[0, 1, 1], [1, 0, 1], [1, 1, 0]],
//!   "map": [0, 1, 0],
//!   "meta": { "source": "anything" } }
//! ```
//!
//! `map` and `meta` are optional; any other key is rejected.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use triperim_core::{DistanceMatrix, FiniteMetricSpace, SelfMap};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SchemaError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("`labels` has {0} entries; at least 3 points are required")]
    TooFewPoints(usize),
    #[error("`labels[{index}]` repeats the label {label:?}")]
    DuplicateLabel { index: usize, label: String },
    #[error("`dist` has {rows} rows but there are {n} labels")]
    RowCount { rows: usize, n: usize },
    #[error("`dist[{row}]` has {len} entries, expected {n}")]
    RowLength { row: usize, len: usize, n: usize },
    #[error("`map` has {len} entries, expected {n}")]
    MapLength { len: usize, n: usize },
    #[error("`map[{index}]` = {value} is not a point index below {n}")]
    MapRange { index: usize, value: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl SpaceDocument {
    /// Parses and checks the shape of a document. Metric axioms are not
    /// checked here.
    pub fn parse(text: &str) -> Result<Self, SchemaError> {
        let doc: SpaceDocument =
            serde_json::from_str(text).map_err(|e| SchemaError::Json(e.to_string()))?;
        doc.check()?;
        Ok(doc)
    }

    pub fn from_instance(
        space: &FiniteMetricSpace,
        map: Option<&SelfMap>,
        meta: Option<serde_json::Value>,
    ) -> Self {
        SpaceDocument {
            labels: space.labels().to_vec(),
            dist: space.matrix().rows().map(<[f64]>::to_vec).collect(),
            map: map.map(|m| m.image().to_vec()),
            meta,
        }
    }

    fn check(&self) -> Result<(), SchemaError> {
        let n = self.labels.len();
        if n < 3 {
            return Err(SchemaError::TooFewPoints(n));
        }
        let mut seen = HashSet::new();
        for (index, label) in self.labels.iter().enumerate() {
            if !seen.insert(label) {
                return Err(SchemaError::DuplicateLabel { index, label: label.clone() });
            }
        }
        if self.dist.len() != n {
            return Err(SchemaError::RowCount { rows: self.dist.len(), n });
        }
        for (row, r) in self.dist.iter().enumerate() {
            if r.len() != n {
                return Err(SchemaError::RowLength { row, len: r.len(), n });
            }
        }
        if let Some(map) = &self.map {
            if map.len() != n {
                return Err(SchemaError::MapLength { len: map.len(), n });
            }
            if let Some((index, &value)) = map.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(SchemaError::MapRange { index, value, n });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn matrix(&self) -> DistanceMatrix {
        DistanceMatrix::from_rows(&self.dist).expect("shape checked on parse")
    }

    pub fn self_map(&self) -> Option<SelfMap> {
        self.map.as_ref().map(|m| SelfMap::new(m.clone(), self.len()).expect("checked on parse"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}
