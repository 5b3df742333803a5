//! Graph description documents.
//!
//! ```json
//! {
//!   "vertices": [{"id": 0, "condition": {"type": "delta", "sigma": "1"}}, {"id": 1}],
//!   "edges": [{"id": 0, "from": 0, "to": 1, "length": "3.141592653589793"}],
//!   "points": {"B": [{"edge": 0, "x": "1.5"}]}
//! }
//! ```
//!
//! Numbers may be given as decimal strings or JSON numbers; `"inf"` and
//! `"-inf"` both denote the single point at infinity. A missing condition is
//! Neumann–Kirchhoff. `delta_s` takes `alpha` (the Prüfer angle) or `s`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conditions::{ExtendedReal, PrueferAngle, VertexCondition};
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, PointOnEdge, Vertex};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Text(String),
    Number(f64),
}

impl Num {
    fn extended(&self) -> Result<ExtendedReal> {
        match self {
            Num::Text(s) => ExtendedReal::parse(s),
            Num::Number(x) => Ok(ExtendedReal::from(*x)),
        }
    }

    fn finite(&self, what: &str) -> Result<f64> {
        self.extended()?
            .finite()
            .ok_or_else(|| Error::Parse(format!("{what} must be finite")))
    }

    fn from_f64(x: f64) -> Num {
        Num::Text(format!("{x}"))
    }

    fn from_extended(x: ExtendedReal) -> Num {
        Num::Text(x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ConditionDoc {
    Nk,
    Delta {
        sigma: Num,
    },
    DeltaS {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<Num>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<Num>,
        t: Num,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    condition: Option<ConditionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: u64,
    from: u64,
    to: u64,
    length: Num,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    edge: u64,
    x: Num,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    points: BTreeMap<String, Vec<PointDoc>>,
}

/// A parsed document: the graph and its named point lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub graph: MetricGraph,
    pub points: BTreeMap<String, Vec<PointOnEdge>>,
}

fn condition_from_doc(doc: &ConditionDoc) -> Result<VertexCondition> {
    Ok(match doc {
        ConditionDoc::Nk => VertexCondition::NeumannKirchhoff,
        ConditionDoc::Delta { sigma } => VertexCondition::delta(sigma.extended()?),
        ConditionDoc::DeltaS { alpha, s, t } => {
            let angle = match (alpha, s) {
                (Some(a), None) => PrueferAngle::from_alpha(a.finite("alpha")?),
                (None, Some(s)) => PrueferAngle::from_s(s.extended()?),
                _ => {
                    return Err(Error::Parse(
                        "delta_s needs exactly one of \"alpha\" and \"s\"".into(),
                    ))
                }
            };
            VertexCondition::DeltaS { alpha: angle, t: t.extended()? }
        }
    })
}

fn condition_to_doc(c: &VertexCondition) -> Option<ConditionDoc> {
    match *c {
        VertexCondition::NeumannKirchhoff => None,
        VertexCondition::DeltaS { alpha, t } if alpha.is_dirichlet() => {
            Some(ConditionDoc::Delta { sigma: Num::from_extended(t) })
        }
        VertexCondition::DeltaS { alpha, t } => Some(ConditionDoc::DeltaS {
            alpha: Some(Num::from_f64(alpha.alpha())),
            s: None,
            t: Num::from_extended(t),
        }),
    }
}

/// Parses a document and checks that the graph is connected and non-empty.
pub fn parse(text: &str) -> Result<Document> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let vertices = doc
        .vertices
        .iter()
        .map(|v| {
            Ok(Vertex {
                id: v.id,
                condition: match &v.condition {
                    Some(c) => condition_from_doc(c)?,
                    None => VertexCondition::NeumannKirchhoff,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = doc
        .edges
        .iter()
        .map(|e| Ok((e.id, e.from, e.to, e.length.finite("length")?)))
        .collect::<Result<Vec<_>>>()?;
    let graph = MetricGraph::new(vertices, edges).map_err(|e| Error::Parse(e.to_string()))?;
    if graph.edge_count() == 0 || !graph.is_connected() {
        return Err(Error::Parse("graph must be connected with at least one edge".into()));
    }
    let mut points = BTreeMap::new();
    for (name, list) in &doc.points {
        let ps = list
            .iter()
            .map(|p| {
                graph.edge_index(p.edge).map_err(|e| Error::Parse(e.to_string()))?;
                Ok(PointOnEdge { edge: p.edge, x: p.x.finite("x")? })
            })
            .collect::<Result<Vec<_>>>()?;
        points.insert(name.clone(), ps);
    }
    Ok(Document { graph, points })
}

/// Serializes a document. Numbers are written as shortest round-trip decimal
/// strings, so `parse(&emit(d))` reproduces `d` bit for bit.
pub fn emit(document: &Document) -> String {
    let g = &document.graph;
    let doc = GraphDoc {
        vertices: g
            .vertices()
            .iter()
            .map(|v| VertexDoc { id: v.id, condition: condition_to_doc(&v.condition) })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.id,
                from: g.vertices()[e.tail].id,
                to: g.vertices()[e.head].id,
                length: Num::from_f64(e.length),
            })
            .collect(),
        points: document
            .points
            .iter()
            .map(|(k, ps)| {
                (
                    k.clone(),
                    ps.iter().map(|p| PointDoc { edge: p.edge, x: Num::from_f64(p.x) }).collect(),
                )
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("document serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const STAR: &str = r#"{
        "vertices": [
            {"id": 0, "condition": {"type": "delta", "sigma": "1"}},
            {"id": 1, "condition": {"type": "nk"}},
            {"id": 2},
            {"id": 3, "condition": {"type": "delta_s", "alpha": "0.5", "t": "-inf"}}
        ],
        "edges": [
            {"id": 0, "from": 0, "to": 1, "length": "1"},
            {"id": 1, "from": 0, "to": 2, "length": "1.4142135623730951"},
            {"id": 2, "from": 0, "to": 3, "length": 1.0471975511965976}
        ],
        "points": {"mid": [{"edge": 1, "x": "0.7"}]}
    }"#;

    #[test]
    fn parses_conditions_and_lengths() {
        let d = parse(STAR).unwrap();
        let g = &d.graph;
        assert_eq!(g.edges()[1].length, 2f64.sqrt());
        assert_eq!(g.edges()[2].length, std::f64::consts::PI / 3.0);
        assert_eq!(*g.condition(0), VertexCondition::delta(1.0));
        assert_eq!(*g.condition(2), VertexCondition::NeumannKirchhoff);
        match *g.condition(3) {
            VertexCondition::DeltaS { alpha, t } => {
                assert_eq!(alpha.alpha(), 0.5);
                assert_eq!(t, ExtendedReal::Infinity);
            }
            _ => panic!("expected delta_s"),
        }
        assert_eq!(d.points["mid"], vec![PointOnEdge { edge: 1, x: 0.7 }]);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let d = parse(STAR).unwrap();
        let text = emit(&d);
        assert_eq!(parse(&text).unwrap(), d);
        assert_eq!(emit(&parse(&text).unwrap()), text);
    }

    #[test]
    fn s_key_is_accepted() {
        let text = r#"{"vertices":[{"id":0,"condition":{"type":"delta_s","s":"0","t":"2"}},{"id":1},{"id":2}],
            "edges":[{"id":0,"from":1,"to":0,"length":"1"},{"id":1,"from":0,"to":2,"length":"1"}]}"#;
        let d = parse(text).unwrap();
        assert_eq!(*d.graph.condition(0), VertexCondition::delta_prime(2.0));
    }

    #[test]
    fn rejects_bad_documents() {
        for bad in [
            r#"{"vertices":[{"id":0}],"edges":[{"id":0,"from":0,"to":0,"length":"-1"}]}"#,
            r#"{"vertices":[{"id":0},{"id":1}],"edges":[]}"#,
            r#"{"vertices":[{"id":0},{"id":1},{"id":2}],"edges":[{"id":0,"from":0,"to":1,"length":"1"}]}"#,
            r#"{"vertices":[{"id":0}],"edges":[{"id":0,"from":0,"to":0,"length":"abc"}]}"#,
            r#"{"vertices":[{"id":0,"condition":{"type":"delta_s","t":"1"}}],"edges":[{"id":0,"from":0,"to":0,"length":"1"}]}"#,
            "not json",
        ] {
            assert!(matches!(parse(bad), Err(Error::Parse(_))), "{bad}");
        }
    }
}
