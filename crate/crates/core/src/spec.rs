//! JSON file formats: graph-of-groups specs, membership queries and RAAG
//! defining graphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::oracle::VertexKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    /// Defaults to the first vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<String>,
    /// Written by the RAAG compiler: each defining-graph vertex as a word of
    /// cycle type at the basepoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub name: String,
    pub kind: VertexKind,
    #[serde(default)]
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub name: String,
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub edge_generators: Vec<String>,
    #[serde(default)]
    pub alpha: BTreeMap<String, EndValue>,
    #[serde(default)]
    pub omega: BTreeMap<String, EndValue>,
}

/// Image of an edge generator: a word, or an exponent vector for
/// free-abelian targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndValue {
    Word(String),
    Vector(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryFile {
    #[serde(default)]
    pub subgroup: Vec<String>,
    pub element: String,
}

/// Defining graph of a right-angled Artin group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

impl SpecFile {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes") + "\n"
    }
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl QueryFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
