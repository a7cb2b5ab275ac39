//! Small reference graphs shipped with the crate.

use crate::datagraph::{DataGraph, KeywordConfig};

/// City, province and country with the keywords Paris, Ile, de and France.
pub const FIG1_JSON: &str = include_str!("../fixtures/fig1.json");
/// [`FIG1_JSON`] plus a river node pointing at the city and the keyword Seine.
pub const FIG1X_JSON: &str = include_str!("../fixtures/fig1x.json");
/// Seven-node graph whose second answer is only reachable through a cyclic
/// path that must be kept alive.
pub const APXA_JSON: &str = include_str!("../fixtures/apxa.json");
/// A graph with a keyword that has no incoming edges.
pub const ISOLATED_JSON: &str = include_str!("../fixtures/isolated.json");

fn load(text: &str) -> DataGraph {
    DataGraph::from_json(text)
        .expect("bundled fixture is valid")
        .augment_keywords(&KeywordConfig::default())
}

pub fn fig1() -> DataGraph {
    load(FIG1_JSON)
}

pub fn fig1x() -> DataGraph {
    load(FIG1X_JSON)
}

pub fn apxa() -> DataGraph {
    load(APXA_JSON)
}

pub fn isolated() -> DataGraph {
    load(ISOLATED_JSON)
}
