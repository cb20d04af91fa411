use std::fmt;

use serde::{Deserialize, Serialize};

use super::diagram::CylinderDiagram;

/// A model is either one of the numbered Prym(2,2) diagrams or a named test
/// fixture.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Number(u32),
    Name(String),
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelRef::Number(n) => write!(f, "{n}"),
            ModelRef::Name(s) => f.write_str(s),
        }
    }
}

const MODELS: [&str; 8] = [
    include_str!("../../data/diagrams/model-1.json"),
    include_str!("../../data/diagrams/model-2.json"),
    include_str!("../../data/diagrams/model-3.json"),
    include_str!("../../data/diagrams/model-4.json"),
    include_str!("../../data/diagrams/model-5.json"),
    include_str!("../../data/diagrams/model-6.json"),
    include_str!("../../data/diagrams/model-7.json"),
    include_str!("../../data/diagrams/model-8.json"),
];

const FIXTURES: [&str; 3] = [
    include_str!("../../data/fixtures/torus.json"),
    include_str!("../../data/fixtures/l-shape.json"),
    include_str!("../../data/fixtures/incommensurable.json"),
];

/// The shipped diagrams.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub models: Vec<CylinderDiagram>,
    pub fixtures: Vec<CylinderDiagram>,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        let parse = |text: &&str| CylinderDiagram::from_json(text).expect("shipped diagram is valid");
        Catalog {
            models: MODELS.iter().map(parse).collect(),
            fixtures: FIXTURES.iter().map(parse).collect(),
        }
    }

    pub fn get(&self, model: &ModelRef) -> Option<&CylinderDiagram> {
        match model {
            ModelRef::Number(n) => self.models.get((*n as usize).checked_sub(1)?),
            ModelRef::Name(name) => self.models.iter().chain(&self.fixtures).find(|d| &d.name == name),
        }
    }

    pub fn fixture(&self, name: &str) -> Option<&CylinderDiagram> {
        self.fixtures.iter().find(|d| d.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::prym_three_cylinder_diagrams;

    #[test]
    fn shipped_models_match_enumeration() {
        let generated = prym_three_cylinder_diagrams();
        if std::env::var_os("PRYM_WRITE_DIAGRAMS").is_some() {
            for d in &generated {
                let path = format!("{}/data/diagrams/{}.json", env!("CARGO_MANIFEST_DIR"), d.name);
                std::fs::write(path, d.to_json()).unwrap();
            }
        }
        assert_eq!(generated.len(), 8);
        assert_eq!(Catalog::builtin().models, generated);
    }
}
