//! Wire formats: answer records, event-log lines and tabular renderings.

use serde::{Deserialize, Serialize};

use crate::answer::Answer;
use crate::datagraph::{DataGraph, NodeId, Query};
use crate::engine::{EngineKind, Event};
use crate::error::{Error, Result};
use crate::weight::Weight;

/// One emitted answer as a JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub rank: usize,
    pub root: String,
    pub height: Weight,
    pub weight: Weight,
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
}

impl AnswerRecord {
    pub fn new(graph: &DataGraph, answer: &Answer, engine: Option<EngineKind>) -> Self {
        AnswerRecord {
            rank: answer.rank,
            root: graph.label(answer.root).to_string(),
            height: answer.height,
            weight: answer.total_weight,
            edges: answer
                .edges
                .iter()
                .map(|&(u, v)| [graph.label(u).to_string(), graph.label(v).to_string()])
                .collect(),
            engine: engine.map(|e| e.name().to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("answer records serialize")
    }

    pub fn from_json(line: &str) -> Result<Self> {
        Ok(serde_json::from_str(line)?)
    }

    /// Maps labels back to nodes. Query keyword tokens win over node ids.
    pub fn to_answer(&self, graph: &DataGraph, query: &Query) -> Result<Answer> {
        let resolve = |label: &str| -> Result<NodeId> {
            graph
                .keyword_node(label)
                .filter(|&k| query.contains(k))
                .or_else(|| graph.lookup(label))
                .or_else(|| graph.keyword_node(label))
                .ok_or_else(|| Error::Contract(format!("unknown node {label}")))
        };
        let edges = self
            .edges
            .iter()
            .map(|[u, v]| Ok((resolve(u)?, resolve(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Answer {
            root: resolve(&self.root)?,
            edges,
            keywords: query.keywords().to_vec(),
            height: self.height,
            total_weight: self.weight,
            rank: self.rank,
        })
    }

    pub fn edges_compact(&self) -> String {
        self.edges
            .iter()
            .map(|[u, v]| format!("{u}>{v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Serialize)]
struct EventRecord<'a> {
    engine: &'a str,
    event: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<u32>,
    weight: Weight,
    node: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
}

pub fn event_json(graph: &DataGraph, engine: EngineKind, event: &Event) -> String {
    serde_json::to_string(&EventRecord {
        engine: engine.name(),
        event: event.kind.name(),
        path: event.path.map(|p| p.0),
        weight: event.weight,
        node: graph.label(event.node),
        rank: event.rank,
    })
    .expect("event records serialize")
}

pub const TABLE_HEADER: &str = "engine  rank  height    weight    root        edges";

pub fn table_row(record: &AnswerRecord) -> String {
    format!(
        "{:<7} {:>4}  {:>8}  {:>8}  {:<10}  {}",
        record.engine.as_deref().unwrap_or("-"),
        record.rank,
        record.height.to_string(),
        record.weight.to_string(),
        record.root,
        record.edges_compact()
    )
}

pub const CSV_HEADER: &str = "engine,rank,root,height,weight,edges";

pub fn csv_row(record: &AnswerRecord) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer
        .write_record([
            record.engine.as_deref().unwrap_or(""),
            &record.rank.to_string(),
            &record.root,
            &record.height.to_string(),
            &record.weight.to_string(),
            &record.edges_compact(),
        ])
        .expect("in-memory csv");
    let bytes = writer.into_inner().expect("in-memory csv");
    String::from_utf8(bytes).expect("utf-8").trim_end().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineOptions;
    use crate::fixtures;
    use crate::gtf::run_gtf;

    #[test]
    fn first_fig1_record_matches_the_documented_line() {
        let g = fixtures::fig1();
        let q = g.resolve_query(&["france", "paris"]).unwrap();
        let mut records = Vec::new();
        run_gtf(&g, &q, EngineOptions::default(), &mut |a| {
            records.push(AnswerRecord::new(&g, a, None))
        })
        .unwrap();
        assert_eq!(
            records[0].to_json(),
            r#"{"rank":1,"root":"city","height":"5.000","weight":"7.000","edges":[["city","province"],["province","france"],["city","paris"]]}"#
        );
    }

    #[test]
    fn records_roundtrip_into_valid_answers() {
        let g = fixtures::apxa();
        let q = g.resolve_query(&["k1", "k2"]).unwrap();
        let mut lines = Vec::new();
        run_gtf(&g, &q, EngineOptions::default(), &mut |a| {
            lines.push(AnswerRecord::new(&g, a, Some(EngineKind::Gtf)).to_json())
        })
        .unwrap();
        for line in lines {
            let record = AnswerRecord::from_json(&line).unwrap();
            assert_eq!(record.engine.as_deref(), Some("gtf"));
            record.to_answer(&g, &q).unwrap().check(&g).unwrap();
        }
    }

    #[test]
    fn csv_quotes_nothing_for_plain_labels() {
        let record = AnswerRecord {
            rank: 1,
            root: "city".into(),
            height: Weight(5000),
            weight: Weight(7000),
            edges: vec![["city".into(), "paris".into()]],
            engine: Some("gtf".into()),
        };
        assert_eq!(csv_row(&record), "gtf,1,city,5.000,7.000,city>paris");
    }
}
