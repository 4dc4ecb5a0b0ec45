use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ArcRule, PotArc, PotGraph, SwpEdge, SwpGraph};
use crate::companion::{Rank, Swap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(Error::OutOfRange {
                what: "graph format",
                constraint: format!("expected `dot` or `json`, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExportedGraphs {
    Dot { swp: String, pot: String },
    Json(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphsDoc {
    t: usize,
    swp: SwpDoc,
    pot: PotDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SwpDoc {
    edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    a: usize,
    b: usize,
    swap: [Rank; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotDoc {
    arcs: Vec<ArcDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcDoc {
    from: usize,
    to: usize,
    swap: [Rank; 2],
    rule: String,
}

fn rule_name(rule: ArcRule) -> String {
    match rule {
        ArcRule::Condition(k) => format!("c{k}"),
        ArcRule::Boundary(k) => format!("b{k}"),
    }
}

fn parse_rule(s: &str) -> Result<ArcRule> {
    let bad = || Error::OutOfRange {
        what: "arc rule",
        constraint: format!("expected c1..c6 or b1..b2, got `{s}`"),
    };
    let (kind, num) = s.split_at_checked(1).ok_or_else(bad)?;
    let k: u8 = num.parse().map_err(|_| bad())?;
    match (kind, k) {
        ("c", 1..=6) => Ok(ArcRule::Condition(k)),
        ("b", 1..=2) => Ok(ArcRule::Boundary(k)),
        _ => Err(bad()),
    }
}

fn render_dot(swp: &SwpGraph, pot: &PotGraph) -> (String, String) {
    let mut s = String::from("graph swp {\n");
    for v in 1..=swp.t {
        let _ = writeln!(s, "  v{v};");
    }
    for e in &swp.edges {
        let _ = writeln!(s, "  v{} -- v{} [label=\"{}\"];", e.a, e.b, e.swap);
    }
    s.push_str("}\n");

    let mut p = String::from("digraph pot {\n");
    let _ = writeln!(p, "  v0 [shape=box, style=dashed];");
    for v in 1..=pot.t {
        let _ = writeln!(p, "  v{v};");
    }
    for a in &pot.arcs {
        let _ = writeln!(
            p,
            "  v{} -> v{} [label=\"swap=({},{});cond={}\"];",
            a.from,
            a.to,
            a.lower,
            a.lower + 1,
            a.rule
        );
    }
    p.push_str("}\n");
    (s, p)
}

/// Renders both graphs. DOT output is one undirected graph and one digraph;
/// JSON output is a single document accepted by [`import_graphs`].
pub fn export_graphs(swp: &SwpGraph, pot: &PotGraph, format: GraphFormat) -> Result<ExportedGraphs> {
    if swp.t != pot.t {
        return Err(Error::OutOfRange {
            what: "graphs",
            constraint: format!("swap graph has t={} but potential graph has t={}", swp.t, pot.t),
        });
    }
    Ok(match format {
        GraphFormat::Dot => {
            let (swp, pot) = render_dot(swp, pot);
            ExportedGraphs::Dot { swp, pot }
        }
        GraphFormat::Json => {
            let doc = GraphsDoc {
                t: swp.t,
                swp: SwpDoc {
                    edges: swp
                        .edges
                        .iter()
                        .map(|e| EdgeDoc {
                            a: e.a,
                            b: e.b,
                            swap: [e.swap.lower(), e.swap.upper()],
                        })
                        .collect(),
                },
                pot: PotDoc {
                    arcs: pot
                        .arcs
                        .iter()
                        .map(|a| ArcDoc {
                            from: a.from,
                            to: a.to,
                            swap: [a.lower, a.lower + 1],
                            rule: rule_name(a.rule),
                        })
                        .collect(),
                },
            };
            ExportedGraphs::Json(serde_json::to_string_pretty(&doc).expect("graph document serializes"))
        }
    })
}

/// Parses a JSON graph document written by [`export_graphs`].
pub fn import_graphs(json: &str) -> Result<(SwpGraph, PotGraph)> {
    let invalid = |msg: String| Error::OutOfRange {
        what: "graph document",
        constraint: msg,
    };
    let doc: GraphsDoc = serde_json::from_str(json).map_err(|e| invalid(e.to_string()))?;
    let t = doc.t;
    let mut edges = Vec::with_capacity(doc.swp.edges.len());
    for e in doc.swp.edges {
        if !(1..=t).contains(&e.a) || !(1..=t).contains(&e.b) {
            return Err(invalid(format!("edge ({},{}) has a node outside 1..={t}", e.a, e.b)));
        }
        edges.push(SwpEdge {
            a: e.a,
            b: e.b,
            swap: Swap::new(e.swap[0], e.swap[1])?,
        });
    }
    let mut arcs = Vec::with_capacity(doc.pot.arcs.len());
    for a in doc.pot.arcs {
        if !(1..=t).contains(&a.from) || a.to > t {
            return Err(invalid(format!("arc ({},{}) has a node out of range", a.from, a.to)));
        }
        if a.swap[1] != a.swap[0] + 1 {
            return Err(invalid(format!(
                "arc swap ({},{}) is not adjacent",
                a.swap[0], a.swap[1]
            )));
        }
        arcs.push(PotArc {
            from: a.from,
            to: a.to,
            lower: a.swap[0],
            rule: parse_rule(&a.rule)?,
        });
    }
    Ok((SwpGraph::from_edges(t, edges), PotGraph { t, arcs }))
}
