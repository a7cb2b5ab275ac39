//! The data graph: weighted directed graph plus dedicated keyword nodes.
//!
//! Every token of a node's text is represented by a keyword node, and every
//! node containing the token has an edge into it. Keyword nodes never have
//! outgoing edges. Paths are built backwards, so the graph keeps a parents
//! index (the transpose of the edge list) next to the forward adjacency.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::weight::{parse_milli, Weight};

/// Prefix reserved for keyword node ids.
pub const KEYWORD_PREFIX: &str = "kw:";

/// Dense internal node handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

// ---------------------------------------------------------------------------
// JSON document

/// A weight as it appears in a document: a decimal string, or a bare JSON
/// number for convenience.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightText {
    Text(String),
    Number(serde_json::Number),
}

impl WeightText {
    pub fn as_text(&self) -> String {
        match self {
            WeightText::Text(s) => s.clone(),
            WeightText::Number(n) => n.to_string(),
        }
    }
}

impl From<Weight> for WeightText {
    fn from(w: Weight) -> Self {
        WeightText::Text(w.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub text: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub keyword: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightText>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightText>,
}

/// The on-disk graph format. Absent weights default to `1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }

    pub fn node(&mut self, id: &str, text: &str, weight: Weight) -> &mut Self {
        self.nodes.push(NodeDoc {
            id: id.to_string(),
            text: text.to_string(),
            keyword: false,
            weight: Some(weight.into()),
        });
        self
    }

    pub fn keyword(&mut self, id: &str, weight: Weight) -> &mut Self {
        self.nodes.push(NodeDoc {
            id: id.to_string(),
            text: String::new(),
            keyword: true,
            weight: Some(weight.into()),
        });
        self
    }

    pub fn edge(&mut self, src: &str, dst: &str, weight: Weight) -> &mut Self {
        self.edges.push(EdgeDoc {
            src: src.to_string(),
            dst: dst.to_string(),
            weight: Some(weight.into()),
        });
        self
    }
}

fn weight_of(element: &str, text: Option<&WeightText>, out: &mut Vec<Violation>) -> Weight {
    let Some(text) = text else {
        return Weight::ONE;
    };
    let text = text.as_text();
    match parse_milli(&text) {
        Ok(milli) if milli > 0 => Weight(milli as u64),
        Ok(_) => {
            out.push(Violation::NonPositiveWeight {
                element: element.to_string(),
                weight: text,
            });
            Weight::ONE
        }
        Err(_) => {
            out.push(Violation::MalformedWeight {
                element: element.to_string(),
                weight: text,
            });
            Weight::ONE
        }
    }
}

/// Checks a document and reports every violation found, not just the first.
pub fn validate(doc: &GraphDocument) -> Result<()> {
    if doc.nodes.is_empty() {
        return Err(Error::NoNodes);
    }
    let mut violations = Vec::new();
    let mut ids: HashMap<&str, bool> = HashMap::new();
    for node in &doc.nodes {
        if ids.insert(node.id.as_str(), node.keyword).is_some() {
            violations.push(Violation::DuplicateNode(node.id.clone()));
        }
        if !node.keyword && node.id.starts_with(KEYWORD_PREFIX) {
            violations.push(Violation::ReservedId(node.id.clone()));
        }
        weight_of(&format!("node {}", node.id), node.weight.as_ref(), &mut violations);
    }
    let mut seen_edges = HashSet::new();
    for edge in &doc.edges {
        let element = format!("edge {} -> {}", edge.src, edge.dst);
        weight_of(&element, edge.weight.as_ref(), &mut violations);
        for endpoint in [&edge.src, &edge.dst] {
            if !ids.contains_key(endpoint.as_str()) {
                violations.push(Violation::DanglingEdge {
                    src: edge.src.clone(),
                    dst: edge.dst.clone(),
                    missing: endpoint.clone(),
                });
            }
        }
        if ids.get(edge.src.as_str()) == Some(&true) {
            violations.push(Violation::KeywordHasOutgoingEdge {
                keyword: edge.src.clone(),
                dst: edge.dst.clone(),
            });
        }
        if !seen_edges.insert((edge.src.as_str(), edge.dst.as_str())) {
            violations.push(Violation::DuplicateEdge {
                src: edge.src.clone(),
                dst: edge.dst.clone(),
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(violations))
    }
}

// ---------------------------------------------------------------------------
// Tokenizer and keyword configuration

fn fold_char(c: char) -> char {
    match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' => 'a',
        'ç' => 'c',
        'è' | 'é' | 'ê' | 'ë' => 'e',
        'ì' | 'í' | 'î' | 'ï' => 'i',
        'ñ' => 'n',
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' => 'o',
        'ù' | 'ú' | 'û' | 'ü' => 'u',
        'ý' | 'ÿ' => 'y',
        other => other,
    }
}

/// Lowercases, folds common Latin accents to ASCII and splits on anything
/// that is not alphanumeric. Tokens keep their first-occurrence order and
/// are deduplicated.
pub fn tokenize(text: &str) -> Vec<String> {
    let folded: String = text.chars().flat_map(char::to_lowercase).map(fold_char).collect();
    let mut seen = HashSet::new();
    folded
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| seen.insert(t.to_string()))
        .map(str::to_string)
        .collect()
}

fn normalize_token(token: &str) -> String {
    token
        .trim()
        .chars()
        .flat_map(char::to_lowercase)
        .map(fold_char)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeywordConfig {
    pub node_weight: Weight,
    pub edge_weight: Weight,
}

impl Default for KeywordConfig {
    fn default() -> Self {
        KeywordConfig {
            node_weight: Weight::ONE,
            edge_weight: Weight::ONE,
        }
    }
}

// ---------------------------------------------------------------------------
// The graph

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeData {
    pub id: String,
    pub text: String,
    pub weight: Weight,
    /// The token, for keyword nodes.
    pub keyword: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: Weight,
}

/// Immutable once built; safe to share across concurrent searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataGraph {
    nodes: Vec<NodeData>,
    edges: Vec<Edge>,
    children: Vec<Vec<(NodeId, Weight)>>,
    parents: Vec<Vec<(NodeId, Weight)>>,
    edge_index: HashMap<(NodeId, NodeId), Weight>,
    id_index: HashMap<String, NodeId>,
    keyword_index: BTreeMap<String, NodeId>,
    augmented: bool,
}

impl DataGraph {
    /// Builds the graph from a document. No keyword augmentation happens
    /// here; see [`DataGraph::augment_keywords`].
    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        validate(doc)?;
        let mut graph = DataGraph {
            nodes: Vec::with_capacity(doc.nodes.len()),
            edges: Vec::with_capacity(doc.edges.len()),
            children: Vec::new(),
            parents: Vec::new(),
            edge_index: HashMap::new(),
            id_index: HashMap::new(),
            keyword_index: BTreeMap::new(),
            augmented: false,
        };
        let mut scratch = Vec::new();
        for node in &doc.nodes {
            let weight = weight_of(&node.id, node.weight.as_ref(), &mut scratch);
            let keyword = node.keyword.then(|| {
                normalize_token(node.id.strip_prefix(KEYWORD_PREFIX).unwrap_or(&node.id))
            });
            graph.push_node(NodeData {
                id: node.id.clone(),
                text: node.text.clone(),
                weight,
                keyword,
            });
        }
        for edge in &doc.edges {
            let weight = weight_of(&edge.src, edge.weight.as_ref(), &mut scratch);
            let src = graph.id_index[&edge.src];
            let dst = graph.id_index[&edge.dst];
            graph.push_edge(src, dst, weight);
        }
        debug_assert!(scratch.is_empty());
        Ok(graph)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&GraphDocument::from_json(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn push_node(&mut self, data: NodeData) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.id_index.insert(data.id.clone(), id);
        if let Some(token) = &data.keyword {
            self.keyword_index.entry(token.clone()).or_insert(id);
        }
        self.nodes.push(data);
        self.children.push(Vec::new());
        self.parents.push(Vec::new());
        id
    }

    fn push_edge(&mut self, src: NodeId, dst: NodeId, weight: Weight) {
        self.edges.push(Edge { src, dst, weight });
        self.children[src.index()].push((dst, weight));
        self.parents[dst.index()].push((src, weight));
        self.edge_index.insert((src, dst), weight);
    }

    /// Adds one keyword node per distinct token and an edge from every node
    /// to each keyword it contains. Running it twice changes nothing.
    pub fn augment_keywords(mut self, cfg: &KeywordConfig) -> Self {
        for index in 0..self.nodes.len() {
            if self.nodes[index].keyword.is_some() {
                continue;
            }
            let src = NodeId(index as u32);
            for token in tokenize(&self.nodes[index].text) {
                let keyword = match self.keyword_index.get(&token) {
                    Some(&k) => k,
                    None => self.push_node(NodeData {
                        id: format!("{KEYWORD_PREFIX}{token}"),
                        text: String::new(),
                        weight: cfg.node_weight,
                        keyword: Some(token.clone()),
                    }),
                };
                if !self.edge_index.contains_key(&(src, keyword)) {
                    self.push_edge(src, keyword, cfg.edge_weight);
                }
            }
        }
        self.augmented = true;
        self
    }

    /// Maps query tokens to keyword nodes, dropping duplicates.
    pub fn resolve_query<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Query> {
        let mut keywords = Vec::new();
        for raw in tokens {
            let token = normalize_token(raw.as_ref());
            if token.is_empty() {
                continue;
            }
            let node = self
                .keyword_index
                .get(&token)
                .copied()
                .ok_or_else(|| Error::KeywordNotFound(raw.as_ref().trim().to_string()))?;
            if !keywords.contains(&node) {
                keywords.push(node);
            }
        }
        Query::new(self, keywords)
    }

    /// Re-checks the structural invariants of a built graph.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if !node.weight.is_positive() {
                violations.push(Violation::NonPositiveWeight {
                    element: format!("node {}", node.id),
                    weight: node.weight.to_string(),
                });
            }
            if node.keyword.is_some() {
                if let Some(&(dst, _)) = self.children[i].first() {
                    violations.push(Violation::KeywordHasOutgoingEdge {
                        keyword: node.id.clone(),
                        dst: self.nodes[dst.index()].id.clone(),
                    });
                }
            }
        }
        for edge in &self.edges {
            if !edge.weight.is_positive() {
                violations.push(Violation::NonPositiveWeight {
                    element: format!("edge {} -> {}", self.id(edge.src), self.id(edge.dst)),
                    weight: edge.weight.to_string(),
                });
            }
            let mirrored = self.parents[edge.dst.index()]
                .iter()
                .any(|&(p, w)| p == edge.src && w == edge.weight);
            if !mirrored {
                violations.push(Violation::DanglingEdge {
                    src: self.id(edge.src).to_string(),
                    dst: self.id(edge.dst).to_string(),
                    missing: "parents index entry".to_string(),
                });
            }
        }
        let parent_entries: usize = self.parents.iter().map(Vec::len).sum();
        if parent_entries != self.edges.len() {
            return Err(Error::Contract(format!(
                "parents index has {parent_entries} entries for {} edges",
                self.edges.len()
            )));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(violations))
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn node(&self, v: NodeId) -> &NodeData {
        &self.nodes[v.index()]
    }

    /// The external id of a node.
    pub fn id(&self, v: NodeId) -> &str {
        &self.nodes[v.index()].id
    }

    /// Keyword nodes render as their token, other nodes as their id.
    pub fn label(&self, v: NodeId) -> &str {
        let node = &self.nodes[v.index()];
        node.keyword.as_deref().unwrap_or(&node.id)
    }

    pub fn weight(&self, v: NodeId) -> Weight {
        self.nodes[v.index()].weight
    }

    pub fn is_keyword(&self, v: NodeId) -> bool {
        self.nodes[v.index()].keyword.is_some()
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn lookup(&self, id: &str) -> Option<NodeId> {
        self.id_index.get(id).copied()
    }

    pub fn keyword_node(&self, token: &str) -> Option<NodeId> {
        self.keyword_index.get(&normalize_token(token)).copied()
    }

    pub fn keyword_tokens(&self) -> impl Iterator<Item = &str> {
        self.keyword_index.keys().map(String::as_str)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_weight(&self, src: NodeId, dst: NodeId) -> Option<Weight> {
        self.edge_index.get(&(src, dst)).copied()
    }

    /// Incoming edges of `v` as `(parent, edge weight)`.
    pub fn parents(&self, v: NodeId) -> &[(NodeId, Weight)] {
        &self.parents[v.index()]
    }

    /// Outgoing edges of `v` as `(child, edge weight)`.
    pub fn children(&self, v: NodeId) -> &[(NodeId, Weight)] {
        &self.children[v.index()]
    }
}

/// A set of at least two keyword nodes. Keyword order is the order the
/// tokens were given in, and each keyword's position is its slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    keywords: Vec<NodeId>,
}

impl Query {
    pub fn new(graph: &DataGraph, keywords: Vec<NodeId>) -> Result<Self> {
        let mut unique: Vec<NodeId> = Vec::with_capacity(keywords.len());
        for k in keywords {
            if k.index() >= graph.node_count() || !graph.is_keyword(k) {
                return Err(Error::NotAKeyword(format!("{k}")));
            }
            if !unique.contains(&k) {
                unique.push(k);
            }
        }
        if unique.len() < 2 {
            return Err(Error::TooFewKeywords);
        }
        Ok(Query { keywords: unique })
    }

    pub fn keywords(&self) -> &[NodeId] {
        &self.keywords
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn slot_of(&self, keyword: NodeId) -> Option<usize> {
        self.keywords.iter().position(|&k| k == keyword)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.keywords.contains(&v)
    }
}
