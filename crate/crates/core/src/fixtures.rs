//! Bundled maps used by tests, examples and the command line.

use crate::interval_maps::{MapDefinition, PiecewiseMap};

pub const D2_JSON: &str = r#"{"type":"linear_markov","name":"d2","branches":[
  {"domain":["0","1/2"],"slope":"2","offset":"0"},
  {"domain":["1/2","1"],"slope":"2","offset":"-1"}]}"#;

pub const L3_JSON: &str = r#"{"type":"linear_markov","name":"l3","branches":[
  {"domain":["0","1/2"],"slope":"2","offset":"0"},
  {"domain":["1/2","3/4"],"slope":"4","offset":"-2"},
  {"domain":["3/4","1"],"slope":"4","offset":"-3"}]}"#;

pub const W2_JSON: &str = r#"{"type":"smooth_weights","name":"w2","weights":[
  {"kind":"fourier","coeffs":[0.5,0.1,0.0]},
  {"kind":"fourier","coeffs":[0.5,-0.1,0.0]}]}"#;

/// Markov but not full-branch: the middle branch maps onto `[0, 1/2)`.
pub const MARKOV3_JSON: &str = r#"{"type":"linear_markov","name":"markov3","branches":[
  {"domain":["0","1/2"],"slope":"2","offset":"0"},
  {"domain":["1/2","3/4"],"slope":"2","offset":"-1"},
  {"domain":["3/4","1"],"slope":"4","offset":"-3"}]}"#;

fn load(text: &str) -> PiecewiseMap {
    MapDefinition::from_json(text)
        .and_then(|d| d.build())
        .expect("bundled fixture is valid")
}

/// Doubling map `2x mod 1`.
pub fn d2() -> PiecewiseMap {
    load(D2_JSON)
}

/// Full-branch map with slopes 2, 4, 4 on `[0,1/2), [1/2,3/4), [3/4,1)`.
pub fn l3() -> PiecewiseMap {
    load(L3_JSON)
}

/// Smooth full-branch map with inverse-branch weights `1/2 +- cos(2 pi x)/10`.
pub fn w2() -> PiecewiseMap {
    load(W2_JSON)
}

pub fn markov3() -> PiecewiseMap {
    load(MARKOV3_JSON)
}

/// Looks up a bundled map by name.
pub fn by_name(name: &str) -> Option<PiecewiseMap> {
    match name {
        "d2" => Some(d2()),
        "l3" => Some(l3()),
        "w2" => Some(w2()),
        "markov3" => Some(markov3()),
        _ => None,
    }
}

pub fn json_by_name(name: &str) -> Option<&'static str> {
    match name {
        "d2" => Some(D2_JSON),
        "l3" => Some(L3_JSON),
        "w2" => Some(W2_JSON),
        "markov3" => Some(MARKOV3_JSON),
        _ => None,
    }
}
