use std::fs;
use std::path::Path;

use serde::Deserialize;
use tcgame_core::{Rule, TcSituation};

/// Input file: a situation plus optional payback fraction and rule list.
///
/// A bare situation object (`{"p": .., "c": .., "alpha": .., "beta": ..}`) is accepted too.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub situation: TcSituation,
    pub delta: Option<f64>,
    pub rules: Vec<Rule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Wrapped {
    situation: TcSituation,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    rules: Vec<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Wrapped(Wrapped),
    Bare(TcSituation),
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read scenario {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("invalid scenario {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        // decode twice so the error names the real problem rather than "no variant matched"
        let repr = if value.get("situation").is_some() {
            Repr::Wrapped(serde_json::from_value(value).map_err(|e| e.to_string())?)
        } else {
            Repr::Bare(serde_json::from_value(value).map_err(|e| e.to_string())?)
        };
        match repr {
            Repr::Bare(situation) => Ok(Self { situation, delta: None, rules: Vec::new() }),
            Repr::Wrapped(w) => {
                if let Some(d) = w.delta {
                    if !(d > 0.0 && d < 1.0) {
                        return Err(format!("delta must lie in (0, 1), got {d}"));
                    }
                }
                let rules = w.rules.iter().map(|r| r.parse::<Rule>()).collect::<Result<_, _>>()?;
                Ok(Self { situation: w.situation, delta: w.delta, rules })
            }
        }
    }
}
