use serde::{Deserialize, Serialize};

use super::{build_map_from_weights, LinearBranch, MapVariant, PiecewiseMap, WeightFunction, WeightOptions};
use crate::error::{Error, Result};
use crate::numeric::{rational_string, Interval, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDefinition {
    pub domain: Interval,
    #[serde(with = "rational_string")]
    pub slope: Rational,
    #[serde(with = "rational_string")]
    pub offset: Rational,
}

/// Wire format of a map:
///
/// ```json
/// {"type":"linear_markov","branches":[{"domain":["0","1/2"],"slope":"2","offset":"0"}]}
/// {"type":"smooth_weights","weights":[{"kind":"fourier","coeffs":[0.5,0.1,0.0]}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapDefinition {
    LinearMarkov {
        branches: Vec<BranchDefinition>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        smoothness: Option<f64>,
    },
    SmoothWeights {
        weights: Vec<WeightFunction>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        smoothness: Option<f64>,
        #[serde(default)]
        renormalize: bool,
    },
}

impl MapDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("bad map definition: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map definitions serialize")
    }

    pub fn build(&self) -> Result<PiecewiseMap> {
        let check_beta = |b: &Option<f64>| match b {
            Some(v) if !(v.is_finite() && *v > 0.0) => {
                Err(Error::Validation(format!("smoothness exponent must be positive, got {v}")))
            }
            _ => Ok(()),
        };
        match self {
            MapDefinition::LinearMarkov {
                branches,
                name,
                smoothness,
            } => {
                check_beta(smoothness)?;
                let branches = branches
                    .iter()
                    .map(|b| LinearBranch::new(b.domain.clone(), b.slope.clone(), b.offset.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let mut map = PiecewiseMap::linear(branches)?.with_smoothness(*smoothness);
                map.name = name.clone();
                Ok(map)
            }
            MapDefinition::SmoothWeights {
                weights,
                name,
                smoothness,
                renormalize,
            } => {
                check_beta(smoothness)?;
                let options = WeightOptions {
                    renormalize: *renormalize,
                    ..Default::default()
                };
                let mut map = build_map_from_weights(weights.clone(), options)?.with_smoothness(*smoothness);
                map.name = name.clone();
                Ok(map)
            }
        }
    }

    pub fn of(map: &PiecewiseMap) -> Self {
        match &map.variant {
            MapVariant::LinearMarkov { branches } => MapDefinition::LinearMarkov {
                branches: branches
                    .iter()
                    .map(|b| BranchDefinition {
                        domain: b.domain.clone(),
                        slope: b.slope.clone(),
                        offset: b.offset.clone(),
                    })
                    .collect(),
                name: map.name.clone(),
                smoothness: map.smoothness,
            },
            MapVariant::SmoothFullBranch { weights, .. } => MapDefinition::SmoothWeights {
                weights: weights.clone(),
                name: map.name.clone(),
                smoothness: map.smoothness,
                renormalize: false,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_linear_json() {
        let text = r#"{"type":"linear_markov","branches":[
            {"domain":["0","1/2"],"slope":"2","offset":"0"},
            {"domain":["1/2","1"],"slope":"2","offset":"-1"}]}"#;
        let map = MapDefinition::from_json(text).unwrap().build().unwrap();
        assert_eq!(map.k, 2);
        assert_eq!(map.evaluate(0.75).unwrap(), (0.5, 2.0, 1));
    }

    #[test]
    fn parses_smooth_json() {
        let text = r#"{"type":"smooth_weights","weights":[
            {"kind":"fourier","coeffs":[0.5,0.1,0.0]},
            {"kind":"fourier","coeffs":[0.5,-0.1,0.0]}]}"#;
        let map = MapDefinition::from_json(text).unwrap().build().unwrap();
        assert_eq!(map.variant, fixtures::w2().variant);
    }

    #[test]
    fn definitions_round_trip() {
        for map in [fixtures::d2(), fixtures::l3(), fixtures::w2()] {
            let def = MapDefinition::of(&map);
            let back = MapDefinition::from_json(&def.to_json()).unwrap();
            assert_eq!(back, def);
            assert_eq!(back.build().unwrap(), map);
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(MapDefinition::from_json(r#"{"type":"cubic"}"#).is_err());
        let text = r#"{"type":"linear_markov","branches":[{"domain":["0","1/2"],"slope":"2","offset":"0"}]}"#;
        assert!(MapDefinition::from_json(text).unwrap().build().is_err());
        let text = r#"{"type":"linear_markov","branches":[{"domain":["0","x"],"slope":"2","offset":"0"}]}"#;
        assert!(MapDefinition::from_json(text).is_err());
    }
}
