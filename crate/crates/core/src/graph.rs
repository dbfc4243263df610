//! Directed multigraphs, their pushouts, and parameter passing by gluing
//! an argument arrow onto a function arrow.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::category::Diagram;
use crate::quotient::{amalgamate, class_names, NamingPolicy, Side};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlainGraph {
    pub name: String,
    pub nodes: BTreeSet<String>,
    /// Edge name -> (source node, target node).
    pub edges: BTreeMap<String, (String, String)>,
}

impl PlainGraph {
    pub fn new(name: impl Into<String>) -> Self {
        PlainGraph {
            name: name.into(),
            ..PlainGraph::default()
        }
    }

    pub fn with_node(mut self, node: impl Into<String>) -> Self {
        self.nodes.insert(node.into());
        self
    }

    /// Adds the edge and its endpoints.
    pub fn with_edge(
        mut self,
        edge: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        let (source, target) = (source.into(), target.into());
        self.nodes.insert(source.clone());
        self.nodes.insert(target.clone());
        self.edges.insert(edge.into(), (source, target));
        self
    }

    pub fn edge(&self, name: &str) -> Option<(&str, &str)> {
        self.edges.get(name).map(|(s, t)| (s.as_str(), t.as_str()))
    }

    /// Specifications as nodes, morphisms as edges.
    pub fn from_diagram(name: impl Into<String>, d: &Diagram) -> Self {
        let mut g = PlainGraph::new(name);
        g.nodes.extend(d.specs.keys().cloned());
        for m in d.morphisms.values() {
            g = g.with_edge(&m.name, &m.source, &m.target);
        }
        g
    }

    pub fn is_well_formed(&self) -> bool {
        self.edges
            .values()
            .all(|(s, t)| self.nodes.contains(s) && self.nodes.contains(t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMorphism {
    pub nodes: BTreeMap<String, String>,
    pub edges: BTreeMap<String, String>,
}

impl GraphMorphism {
    /// Inclusion of `sub` into any graph containing it.
    pub fn inclusion(sub: &PlainGraph) -> Self {
        GraphMorphism {
            nodes: sub.nodes.iter().map(|n| (n.clone(), n.clone())).collect(),
            edges: sub.edges.keys().map(|e| (e.clone(), e.clone())).collect(),
        }
    }

    fn check(&self, source: &PlainGraph, target: &PlainGraph) -> Result<(), GraphError> {
        let ill = |what: String| Err(GraphError::IllFormedGraphMorphism(what));
        for n in &source.nodes {
            match self.nodes.get(n) {
                Some(img) if target.nodes.contains(img) => {}
                _ => return ill(format!("node `{n}` has no image in `{}`", target.name)),
            }
        }
        for (e, (s, t)) in &source.edges {
            let Some((ts, tt)) = self.edges.get(e).and_then(|img| target.edge(img)) else {
                return ill(format!("edge `{e}` has no image in `{}`", target.name));
            };
            if self.nodes.get(s).map(String::as_str) != Some(ts)
                || self.nodes.get(t).map(String::as_str) != Some(tt)
            {
                return ill(format!("edge `{e}` does not keep its endpoints"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("ill-formed graph morphism: {0}")]
    IllFormedGraphMorphism(String),
    #[error("graph `{graph}` has no edge `{edge}`")]
    UnknownEdge { graph: String, edge: String },
    #[error("`{argument}` does not end where `{function}` starts")]
    NoSharedApex { function: String, argument: String },
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::IllFormedGraphMorphism(_) => "IllFormedGraphMorphism",
            GraphError::UnknownEdge { .. } => "UnknownEdge",
            GraphError::NoSharedApex { .. } => "NoSharedApex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphPushout {
    pub graph: PlainGraph,
    pub left: GraphMorphism,
    pub right: GraphMorphism,
}

/// Pushout of `left_graph <- apex -> right_graph`.
pub fn graph_pushout(
    apex: &PlainGraph,
    left: &GraphMorphism,
    left_graph: &PlainGraph,
    right: &GraphMorphism,
    right_graph: &PlainGraph,
    vertex_name: &str,
) -> Result<GraphPushout, GraphError> {
    left.check(apex, left_graph)?;
    right.check(apex, right_graph)?;

    let glue = |left_items: Vec<&str>, right_items: Vec<&str>, pairs: Vec<(&str, &str)>| {
        let pos = |items: &[&str], x: &str| items.binary_search(&x).expect("checked image");
        let am = amalgamate(
            left_items.len(),
            right_items.len(),
            pairs
                .iter()
                .map(|(l, r)| (pos(&left_items, l), pos(&right_items, r))),
        );
        let names = class_names(
            &am,
            &left_graph.name,
            &left_items,
            &right_graph.name,
            &right_items,
            NamingPolicy::Qualified,
        );
        let left_map: BTreeMap<String, String> = left_items
            .iter()
            .enumerate()
            .map(|(i, x)| (x.to_string(), names[am.class_of_left(i)].clone()))
            .collect();
        let right_map: BTreeMap<String, String> = right_items
            .iter()
            .enumerate()
            .map(|(j, x)| (x.to_string(), names[am.class_of_right(j)].clone()))
            .collect();
        let representative: Vec<(Side, usize)> =
            am.classes().iter().map(|c| am.split(c[0])).collect();
        (names, representative, left_map, right_map)
    };

    let (node_names, _, left_nodes, right_nodes) = glue(
        left_graph.nodes.iter().map(String::as_str).collect(),
        right_graph.nodes.iter().map(String::as_str).collect(),
        apex.nodes
            .iter()
            .map(|n| (left.nodes[n].as_str(), right.nodes[n].as_str()))
            .collect(),
    );
    let left_edge_list: Vec<&str> = left_graph.edges.keys().map(String::as_str).collect();
    let right_edge_list: Vec<&str> = right_graph.edges.keys().map(String::as_str).collect();
    let (edge_names, representative, left_edges, right_edges) = glue(
        left_edge_list.clone(),
        right_edge_list.clone(),
        apex.edges
            .keys()
            .map(|e| (left.edges[e].as_str(), right.edges[e].as_str()))
            .collect(),
    );

    let mut graph = PlainGraph::new(vertex_name);
    graph.nodes.extend(node_names);
    for (name, (side, i)) in edge_names.into_iter().zip(representative) {
        let (s, t) = match side {
            Side::Left => {
                let (s, t) = &left_graph.edges[left_edge_list[i]];
                (left_nodes[s].clone(), left_nodes[t].clone())
            }
            Side::Right => {
                let (s, t) = &right_graph.edges[right_edge_list[i]];
                (right_nodes[s].clone(), right_nodes[t].clone())
            }
        };
        graph.edges.insert(name, (s, t));
    }
    Ok(GraphPushout {
        graph,
        left: GraphMorphism {
            nodes: left_nodes,
            edges: left_edges,
        },
        right: GraphMorphism {
            nodes: right_nodes,
            edges: right_edges,
        },
    })
}

/// A composite arrow, recorded by its component labels in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowDescriptor {
    pub label: String,
    pub source: String,
    pub target: String,
    pub path: Vec<String>,
}

impl ArrowDescriptor {
    fn from_path(path: Vec<String>, source: String, target: String) -> Self {
        let label = path.iter().rev().cloned().collect::<Vec<_>>().join(".");
        ArrowDescriptor {
            label,
            source,
            target,
            path,
        }
    }

    /// The one-edge graph carrying this arrow.
    pub fn as_graph(&self, name: impl Into<String>) -> PlainGraph {
        PlainGraph::new(name).with_edge(&self.label, &self.source, &self.target)
    }
}

impl fmt::Display for ArrowDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.label, self.source, self.target)
    }
}

fn is_identity_label(label: &str) -> bool {
    label == "id" || label.starts_with("id_")
}

/// Components of an edge label in application order: `g.f` is `[f, g]`.
fn components(label: &str) -> Vec<String> {
    label
        .rsplit('.')
        .filter(|c| !is_identity_label(c))
        .map(str::to_owned)
        .collect()
}

/// Glues the argument arrow `a: U -> X` onto `f: X -> Y` along `X` and
/// composes the resulting path into `f.a: U -> Y`.
pub fn parameter_passing(
    f_graph: &PlainGraph,
    f_edge: &str,
    a_graph: &PlainGraph,
    a_edge: &str,
) -> Result<(ArrowDescriptor, GraphPushout), GraphError> {
    let unknown = |g: &PlainGraph, e: &str| GraphError::UnknownEdge {
        graph: g.name.clone(),
        edge: e.to_owned(),
    };
    let (x, _) = f_graph
        .edge(f_edge)
        .ok_or_else(|| unknown(f_graph, f_edge))?;
    let (_, a_target) = a_graph
        .edge(a_edge)
        .ok_or_else(|| unknown(a_graph, a_edge))?;
    if a_target != x {
        return Err(GraphError::NoSharedApex {
            function: f_edge.to_owned(),
            argument: a_edge.to_owned(),
        });
    }
    let apex = PlainGraph::new("apex").with_node(x);
    let leg = GraphMorphism::inclusion(&apex);
    let pushout = graph_pushout(
        &apex,
        &leg,
        f_graph,
        &leg,
        a_graph,
        &format!("{}+{}", f_graph.name, a_graph.name),
    )?;

    let a_img = &pushout.right.edges[a_edge];
    let f_img = &pushout.left.edges[f_edge];
    let (source, mid) = pushout.graph.edge(a_img).expect("glued edge");
    let (mid2, target) = pushout.graph.edge(f_img).expect("glued edge");
    debug_assert_eq!(mid, mid2);
    let mut path = components(a_edge);
    path.extend(components(f_edge));
    Ok((
        ArrowDescriptor::from_path(path, source.to_owned(), target.to_owned()),
        pushout,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_graph() -> PlainGraph {
        PlainGraph::new("F").with_edge("f", "X", "Y")
    }

    fn a_graph() -> PlainGraph {
        PlainGraph::new("A").with_edge("a", "U", "X")
    }

    #[test]
    fn gluing_gives_two_edge_path() {
        let apex = PlainGraph::new("S").with_node("X");
        let inc = GraphMorphism::inclusion(&apex);
        let p = graph_pushout(&apex, &inc, &f_graph(), &inc, &a_graph(), "P").unwrap();
        assert_eq!(
            p.graph.nodes.iter().map(String::as_str).collect::<Vec<_>>(),
            ["U", "X", "Y"]
        );
        assert_eq!(p.graph.edge("f"), Some(("X", "Y")));
        assert_eq!(p.graph.edge("a"), Some(("U", "X")));
        assert!(p.graph.is_well_formed());
    }

    #[test]
    fn pushout_along_identity_is_other_graph() {
        let g = f_graph();
        let id = GraphMorphism::inclusion(&g);
        let other = PlainGraph::new("G")
            .with_edge("f", "X", "Y")
            .with_edge("h", "Y", "Z");
        let p = graph_pushout(&g, &id, &g, &id, &other, "P").unwrap();
        assert_eq!(p.graph.nodes, other.nodes);
        assert_eq!(p.graph.edges, other.edges);
    }

    #[test]
    fn empty_apex_is_disjoint_union() {
        let apex = PlainGraph::new("E");
        let none = GraphMorphism::inclusion(&apex);
        let l = PlainGraph::new("L").with_edge("e", "P", "Q");
        let r = PlainGraph::new("R").with_edge("e", "P", "Q");
        let p = graph_pushout(&apex, &none, &l, &none, &r, "S").unwrap();
        assert_eq!(p.graph.nodes.len(), 4);
        assert_eq!(p.graph.edges.len(), 2);
        assert!(p.graph.is_well_formed());
    }

    #[test]
    fn endpoint_breaking_morphism_is_rejected() {
        let apex = PlainGraph::new("S").with_edge("e", "A", "B");
        let bad = GraphMorphism {
            nodes: [("A", "X"), ("B", "X")]
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
            edges: [("e".to_owned(), "f".to_owned())].into(),
        };
        let err = graph_pushout(&apex, &bad, &f_graph(), &bad, &f_graph(), "P").unwrap_err();
        assert_eq!(err.code(), "IllFormedGraphMorphism");
    }

    #[test]
    fn composite_of_function_and_argument() {
        let (arrow, _) = parameter_passing(&f_graph(), "f", &a_graph(), "a").unwrap();
        assert_eq!(arrow.label, "f.a");
        assert_eq!((arrow.source.as_str(), arrow.target.as_str()), ("U", "Y"));
    }

    #[test]
    fn identity_argument_collapses() {
        let loop_graph = PlainGraph::new("I").with_edge("id_X", "X", "X");
        let (arrow, _) = parameter_passing(&f_graph(), "f", &loop_graph, "id_X").unwrap();
        assert_eq!(arrow.label, "f");
        assert_eq!(arrow.source, "X");
    }

    #[test]
    fn chaining_is_associative() {
        let g = PlainGraph::new("G").with_edge("g", "Y", "W");
        let (fa, _) = parameter_passing(&f_graph(), "f", &a_graph(), "a").unwrap();
        let (g_fa, _) = parameter_passing(&g, "g", &fa.as_graph("FA"), &fa.label).unwrap();
        let (gf, _) = parameter_passing(&g, "g", &f_graph(), "f").unwrap();
        let (gf_a, _) = parameter_passing(&gf.as_graph("GF"), &gf.label, &a_graph(), "a").unwrap();
        assert_eq!(g_fa.label, "g.f.a");
        assert_eq!(g_fa, gf_a);
    }

    #[test]
    fn mismatched_argument_is_rejected() {
        let b = PlainGraph::new("B").with_edge("b", "U", "V");
        let err = parameter_passing(&f_graph(), "f", &b, "b").unwrap_err();
        assert_eq!(err.code(), "NoSharedApex");
    }
}
