//! JSON instance format. Rationals are strings `"p/q"` (or `"p"`), sums of roots are `[coeff, radicand]` lists.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{Client, ClusteringInstance, MetricInstance};
use crate::error::{Error, Result};
use crate::geometry::radical::RadicalSum;
use crate::geometry::rational::{parse_rational, Rational};
use crate::geometry::Point;

/// Either kind of instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Geometric(ClusteringInstance),
    Metric(MetricInstance),
}

impl Instance {
    pub fn meta(&self) -> &Map<String, Value> {
        match self {
            Instance::Geometric(i) => i.meta(),
            Instance::Metric(i) => i.meta(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClient {
    coords: Vec<String>,
    weight: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    penalty: Option<Vec<[String; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometric {
    dimension: usize,
    power: u32,
    candidates: Vec<Vec<String>>,
    clients: Vec<RawClient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    threshold: Option<Vec<[String; 2]>>,
    #[serde(default)]
    meta: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    matrix: Vec<Vec<String>>,
    candidates: Vec<usize>,
    clients: Vec<usize>,
    threshold: String,
    #[serde(default)]
    meta: Map<String, Value>,
}

/// `[coefficient, radicand]` string pairs, the JSON form of a sum of roots.
pub fn radical_to_pairs(r: &RadicalSum) -> Vec<[String; 2]> {
    r.terms().map(|(c, s)| [c.to_string(), s.to_string()]).collect()
}

pub(crate) fn radical_from_pairs(pairs: &[[String; 2]]) -> Result<RadicalSum> {
    let parsed: Vec<(Rational, Rational)> = pairs
        .iter()
        .map(|[c, q]| Ok((parse_rational(c)?, parse_rational(q)?)))
        .collect::<Result<_>>()?;
    RadicalSum::from_pairs(parsed.iter().map(|(c, q)| (c, q)))
}

fn point_to_strings(p: &Point) -> Vec<String> {
    p.coords().iter().map(ToString::to_string).collect()
}

fn point_from_strings(s: &[String]) -> Result<Point> {
    Point::new(s.iter().map(|x| parse_rational(x)).collect::<Result<_>>()?)
}

fn to_raw_geometric(inst: &ClusteringInstance) -> RawGeometric {
    RawGeometric {
        dimension: inst.dimension(),
        power: inst.power(),
        candidates: inst.candidates().iter().map(point_to_strings).collect(),
        clients: inst
            .clients()
            .iter()
            .map(|c| RawClient {
                coords: point_to_strings(&c.location),
                weight: c.weight,
                penalty: c.penalty.as_ref().map(radical_to_pairs),
            })
            .collect(),
        threshold: inst.threshold().map(radical_to_pairs),
        meta: inst.meta().clone(),
    }
}

fn from_raw_geometric(raw: RawGeometric) -> Result<ClusteringInstance> {
    let candidates = raw.candidates.iter().map(|c| point_from_strings(c)).collect::<Result<_>>()?;
    let clients = raw
        .clients
        .iter()
        .map(|c| {
            let penalty = c.penalty.as_deref().map(radical_from_pairs).transpose()?;
            Client::new(point_from_strings(&c.coords)?, c.weight, penalty)
        })
        .collect::<Result<_>>()?;
    let mut inst = ClusteringInstance::new(raw.dimension, raw.power, candidates, clients)?.with_meta(raw.meta);
    if let Some(t) = raw.threshold {
        inst = inst.with_threshold(radical_from_pairs(&t)?);
    }
    Ok(inst)
}

fn to_raw_metric(inst: &MetricInstance) -> RawMetric {
    RawMetric {
        matrix: inst.matrix().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
        candidates: inst.candidates().to_vec(),
        clients: inst.clients().to_vec(),
        threshold: inst.threshold().to_string(),
        meta: inst.meta().clone(),
    }
}

fn from_raw_metric(raw: RawMetric) -> Result<MetricInstance> {
    let matrix = raw
        .matrix
        .iter()
        .map(|r| r.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok(MetricInstance::new(matrix, raw.candidates, raw.clients, parse_rational(&raw.threshold)?)?
        .with_meta(raw.meta))
}

/// Pretty-printed JSON followed by a newline; deterministic for equal instances.
pub fn serialize_instance(inst: &Instance) -> String {
    let text = match inst {
        Instance::Geometric(i) => serde_json::to_string_pretty(&to_raw_geometric(i)),
        Instance::Metric(i) => serde_json::to_string_pretty(&to_raw_metric(i)),
    }
    .expect("instance serialization cannot fail");
    text + "\n"
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let is_metric = value.get("matrix").is_some();
    if is_metric {
        let raw: RawMetric = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Instance::Metric(from_raw_metric(raw)?))
    } else {
        let raw: RawGeometric = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Instance::Geometric(from_raw_geometric(raw)?))
    }
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    std::fs::write(path, serialize_instance(inst))
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}
