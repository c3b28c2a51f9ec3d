//! JSON system files.
//!
//! ```json
//! {
//!   "blocks": [
//!     {"id": "a", "kind": "aperiodic",
//!      "vertices": [{"id": "x", "logmod": "0.5"}, {"id": "y", "logmod": "-1", "phase": "0.25"}],
//!      "edges": [["x", "y"], ["y", "x"], ["x", "x"]]},
//!     {"id": "c", "kind": "cycle", "weights": [{"logmod": "0.6931"}]},
//!     {"id": "p", "kind": "clopen_periodic", "period": 2,
//!      "products": [{"point": {"logmod": "1.3863", "phase": "0"}}, {"band": {"lo": "0", "hi": "1"}}]}
//!   ],
//!   "trajectories": [
//!     {"id": "t", "backward": {"block": "a", "cycle": ["x"], "offset": 0},
//!      "core": [{"logmod": "0"}, "zero"], "forward": {"block": "c", "offset": 0}}
//!   ]
//! }
//! ```
//!
//! Numbers may be JSON numbers or decimal strings; strings parse exactly
//! into rational scalars. Phases default to 0.

use serde_json::{json, Map, Value};

use crate::error::{Result, Rule, SpectraError, Violation};
use crate::model::{
    Anchor, AperiodicBlock, Block, ClopenPeriodicBlock, CoreEntry, CycleBlock, LogWeight, ProductSpec,
    SystemDescription, SystemDraft, Trajectory,
};
use crate::scalar::Scalar;

/// Parses and validates a system file.
pub fn parse_system<S: Scalar>(text: &str) -> Result<SystemDescription<S>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        SpectraError::Malformed(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })?;
    system_from_json(&value)
}

pub fn system_from_json<S: Scalar>(value: &Value) -> Result<SystemDescription<S>> {
    let mut reader = Reader::default();
    let draft = reader.draft(value)?;
    match draft.validate() {
        Ok(system) if reader.violations.is_empty() => Ok(system),
        Ok(_) => Err(SpectraError::Invalid(reader.violations)),
        Err(mut more) => {
            more.extend(reader.violations);
            more.sort();
            more.dedup();
            Err(SpectraError::Invalid(more))
        }
    }
}

#[derive(Default)]
struct Reader {
    violations: Vec<Violation>,
}

fn malformed(path: &str, what: &str) -> SpectraError {
    SpectraError::Malformed(format!("{path}: {what}"))
}

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| malformed(path, &format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| malformed(path, "expected an array"))
}

fn string(v: &Value, path: &str) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| malformed(path, "expected a string"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| malformed(path, "expected a non-negative integer"))
}

impl Reader {
    fn number<S: Scalar>(&mut self, v: Option<&Value>, subject: &str, path: &str) -> Result<S> {
        let Some(v) = v else {
            return Ok(S::zero());
        };
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(malformed(path, "expected a number or decimal string")),
        };
        match S::parse_decimal(&text) {
            Some(x) => Ok(x),
            None => {
                self.violations
                    .push(Violation::new(subject, Rule::BadNumber, format!("{path}: {text:?}")));
                Ok(S::zero())
            }
        }
    }

    /// `None` for the `"zero"` marker.
    fn weight<S: Scalar>(&mut self, v: &Value, subject: &str, path: &str) -> Result<Option<LogWeight<S>>> {
        if v.as_str() == Some("zero") {
            return Ok(None);
        }
        if !v.is_object() {
            return Err(malformed(path, "expected a weight object or \"zero\""));
        }
        let logmod = self.number(Some(field(v, "logmod", path)?), subject, &format!("{path}.logmod"))?;
        let phase = self.number(v.get("phase"), subject, &format!("{path}.phase"))?;
        Ok(Some(LogWeight::new(logmod, phase)))
    }

    fn block_weight<S: Scalar>(&mut self, v: &Value, subject: &str, path: &str) -> Result<LogWeight<S>> {
        match self.weight(v, subject, path)? {
            Some(w) => Ok(w),
            None => {
                self.violations
                    .push(Violation::new(subject, Rule::ZeroOutsideCore, path.to_string()));
                Ok(LogWeight::real(S::zero()))
            }
        }
    }

    fn anchor(&mut self, v: &Value, path: &str) -> Result<Anchor> {
        let cycle = match v.get("cycle") {
            None => Vec::new(),
            Some(c) => array(c, &format!("{path}.cycle"))?
                .iter()
                .map(|x| string(x, &format!("{path}.cycle")))
                .collect::<Result<_>>()?,
        };
        Ok(Anchor {
            block: string(field(v, "block", path)?, &format!("{path}.block"))?,
            cycle,
            offset: match v.get("offset") {
                None => 0,
                Some(o) => count(o, &format!("{path}.offset"))?,
            },
        })
    }

    fn block<S: Scalar>(&mut self, v: &Value, path: &str) -> Result<Block<S>> {
        let id = string(field(v, "id", path)?, &format!("{path}.id"))?;
        let kind = string(field(v, "kind", path)?, &format!("{path}.kind"))?;
        match kind.as_str() {
            "aperiodic" => {
                let mut vertices = std::collections::BTreeMap::new();
                for (i, x) in array(field(v, "vertices", path)?, path)?.iter().enumerate() {
                    let vpath = format!("{path}.vertices[{i}]");
                    let name = string(field(x, "id", &vpath)?, &vpath)?;
                    let w = self.block_weight(x, &id, &vpath)?;
                    if vertices.insert(name.clone(), w).is_some() {
                        self.violations
                            .push(Violation::new(id.clone(), Rule::DuplicateId, format!("vertex {name}")));
                    }
                }
                let mut edges = std::collections::BTreeSet::new();
                for (i, e) in array(field(v, "edges", path)?, path)?.iter().enumerate() {
                    let epath = format!("{path}.edges[{i}]");
                    match array(e, &epath)?.as_slice() {
                        [a, b] => {
                            edges.insert((string(a, &epath)?, string(b, &epath)?));
                        }
                        _ => return Err(malformed(&epath, "edge must be a pair [from, to]")),
                    }
                }
                Ok(Block::Aperiodic(AperiodicBlock { id, vertices, edges }))
            }
            "cycle" => {
                let weights = array(field(v, "weights", path)?, path)?
                    .iter()
                    .enumerate()
                    .map(|(i, w)| self.block_weight(w, &id, &format!("{path}.weights[{i}]")))
                    .collect::<Result<_>>()?;
                Ok(Block::Cycle(CycleBlock { id, weights }))
            }
            "clopen_periodic" => {
                let period = count(field(v, "period", path)?, &format!("{path}.period"))?;
                let mut products = Vec::new();
                for (i, p) in array(field(v, "products", path)?, path)?.iter().enumerate() {
                    let ppath = format!("{path}.products[{i}]");
                    if let Some(point) = p.get("point") {
                        products.push(ProductSpec::Point(self.block_weight(point, &id, &ppath)?));
                    } else if let Some(band) = p.get("band") {
                        let lo = self.number(Some(field(band, "lo", &ppath)?), &id, &format!("{ppath}.lo"))?;
                        let hi = self.number(Some(field(band, "hi", &ppath)?), &id, &format!("{ppath}.hi"))?;
                        products.push(ProductSpec::Band { lo, hi });
                    } else {
                        return Err(malformed(&ppath, "expected \"point\" or \"band\""));
                    }
                }
                Ok(Block::ClopenPeriodic(ClopenPeriodicBlock { id, period, products }))
            }
            other => Err(malformed(&format!("{path}.kind"), &format!("unknown block kind {other:?}"))),
        }
    }

    fn trajectory<S: Scalar>(&mut self, v: &Value, path: &str) -> Result<Trajectory<S>> {
        let id = string(field(v, "id", path)?, &format!("{path}.id"))?;
        let core = match v.get("core") {
            None => Vec::new(),
            Some(c) => {
                let mut core = Vec::new();
                for (i, w) in array(c, &format!("{path}.core"))?.iter().enumerate() {
                    core.push(match self.weight(w, &id, &format!("{path}.core[{i}]"))? {
                        Some(w) => CoreEntry::Weight(w),
                        None => CoreEntry::Zero,
                    });
                }
                core
            }
        };
        Ok(Trajectory {
            backward: self.anchor(field(v, "backward", path)?, &format!("{path}.backward"))?,
            forward: self.anchor(field(v, "forward", path)?, &format!("{path}.forward"))?,
            id,
            core,
        })
    }

    fn draft<S: Scalar>(&mut self, v: &Value) -> Result<SystemDraft<S>> {
        if !v.is_object() {
            return Err(malformed("$", "expected an object"));
        }
        let blocks = array(field(v, "blocks", "$")?, "$.blocks")?
            .iter()
            .enumerate()
            .map(|(i, b)| self.block(b, &format!("$.blocks[{i}]")))
            .collect::<Result<_>>()?;
        let trajectories = match v.get("trajectories") {
            None => Vec::new(),
            Some(t) => array(t, "$.trajectories")?
                .iter()
                .enumerate()
                .map(|(i, t)| self.trajectory(t, &format!("$.trajectories[{i}]")))
                .collect::<Result<_>>()?,
        };
        Ok(SystemDraft { blocks, trajectories })
    }
}

fn weight_value<S: Scalar>(w: &LogWeight<S>) -> Value {
    json!({ "logmod": w.logmod().to_string(), "phase": w.phase().to_string() })
}

fn anchor_value(a: &Anchor) -> Value {
    let mut out = Map::new();
    out.insert("block".into(), json!(a.block));
    if !a.cycle.is_empty() {
        out.insert("cycle".into(), json!(a.cycle));
    }
    out.insert("offset".into(), json!(a.offset));
    Value::Object(out)
}

/// Writes a system in the file format, numbers as exact strings.
pub fn system_to_json<S: Scalar>(system: &SystemDescription<S>) -> Value {
    let blocks: Vec<Value> = system
        .blocks()
        .iter()
        .map(|b| match b {
            Block::Aperiodic(a) => json!({
                "id": a.id,
                "kind": "aperiodic",
                "vertices": a.vertices.iter().map(|(id, w)| {
                    let mut v = weight_value(w);
                    v.as_object_mut().expect("object").insert("id".into(), json!(id));
                    v
                }).collect::<Vec<_>>(),
                "edges": a.edges.iter().map(|(u, v)| json!([u, v])).collect::<Vec<_>>(),
            }),
            Block::Cycle(c) => json!({
                "id": c.id,
                "kind": "cycle",
                "weights": c.weights.iter().map(weight_value).collect::<Vec<_>>(),
            }),
            Block::ClopenPeriodic(c) => json!({
                "id": c.id,
                "kind": "clopen_periodic",
                "period": c.period,
                "products": c.products.iter().map(|p| match p {
                    ProductSpec::Point(w) => json!({ "point": weight_value(w) }),
                    ProductSpec::Band { lo, hi } => json!({ "band": { "lo": lo.to_string(), "hi": hi.to_string() } }),
                }).collect::<Vec<_>>(),
            }),
        })
        .collect();
    let trajectories: Vec<Value> = system
        .trajectories()
        .iter()
        .map(|t| {
            json!({
                "id": t.id,
                "backward": anchor_value(&t.backward),
                "core": t.core.iter().map(|e| match e {
                    CoreEntry::Weight(w) => weight_value(w),
                    CoreEntry::Zero => json!("zero"),
                }).collect::<Vec<_>>(),
                "forward": anchor_value(&t.forward),
            })
        })
        .collect();
    json!({ "blocks": blocks, "trajectories": trajectories })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_system, rng, SystemShape};
    use crate::scalar::{rational, Rational};

    const SHIFT: &str = r#"{
        "blocks": [
            {"id": "low", "kind": "cycle", "weights": [{"logmod": "-0.6931"}]},
            {"id": "high", "kind": "cycle", "weights": [{"logmod": 0.6931}]}
        ],
        "trajectories": [
            {"id": "t", "backward": {"block": "low", "offset": 0}, "core": [], "forward": {"block": "high", "offset": 0}}
        ]
    }"#;

    #[test]
    fn parses_exact_decimals() {
        let s: SystemDescription<Rational> = parse_system(SHIFT).unwrap();
        assert_eq!(s.anchor_mean(&s.trajectories()[0].forward), rational(6931, 10000));
        assert_eq!(s.anchor_mean(&s.trajectories()[0].backward), rational(-6931, 10000));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_system::<f64>("{\n  \"blocks\": [,]\n}").unwrap_err();
        match err {
            SpectraError::Malformed(msg) => assert!(msg.starts_with("line 2, column"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_every_violation() {
        let text = r#"{
            "blocks": [
                {"id": "a", "kind": "aperiodic",
                 "vertices": [{"id": "x", "logmod": "abc"}, {"id": "y", "logmod": 0}, {"id": "z", "logmod": 0}],
                 "edges": [["x", "y"], ["y", "z"], ["z", "x"]]},
                {"id": "c", "kind": "cycle", "weights": ["zero"]},
                {"id": "p", "kind": "clopen_periodic", "period": 1, "products": [{"band": {"lo": 1, "hi": 0}}]}
            ],
            "trajectories": [
                {"id": "t", "backward": {"block": "p"}, "forward": {"block": "c"}}
            ]
        }"#;
        let SpectraError::Invalid(v) = parse_system::<Rational>(text).unwrap_err() else {
            panic!("expected violations");
        };
        let rules: Vec<Rule> = v.iter().map(|v| v.rule).collect();
        for rule in [
            Rule::BadNumber,
            Rule::AperiodicSimpleCycle,
            Rule::ZeroOutsideCore,
            Rule::BandOrder,
            Rule::IllegalLimitBlock,
        ] {
            assert!(rules.contains(&rule), "{rule} missing from {rules:?}");
        }
    }

    #[test]
    fn round_trip() {
        for seed in 0..40 {
            let s: SystemDescription<Rational> = random_system(&mut rng(seed), &SystemShape::default());
            let back: SystemDescription<Rational> = system_from_json(&system_to_json(&s)).unwrap();
            assert_eq!(back, s);
        }
    }
}
