//! Built-in run configurations.

use crate::config::RunConfig;
use crate::CliError;

pub const PRESETS: &[(&str, &str, &str)] = &[
    (
        "cubic",
        "theta landscape of the cubic lattice Z^3",
        r#"{"lattice": {"preset": "cubic", "dim": 3}, "alphas": [0.5, 1, 2], "grid": 4}"#,
    ),
    (
        "triangular",
        "unit-density triangular lattice, Coulomb, N = 3",
        r#"{"lattice": {"preset": "triangular"}, "potential": {"kind": "riesz", "s": 1}, "N": 3,
            "charges": "honeycomb", "routes": ["ewald", "epstein"], "samples": 50}"#,
    ),
    (
        "madelung",
        "rock-salt Coulomb energy on Z^3",
        r#"{"lattice": {"preset": "cubic", "dim": 3}, "potential": {"kind": "riesz", "s": 1}, "N": 2,
            "charges": "alternating", "routes": ["ewald", "spectral", "epstein"]}"#,
    ),
    (
        "born-cubic",
        "optimal charges on Z^3 with Coulomb interaction, N = 2",
        r#"{"lattice": {"preset": "cubic", "dim": 3}, "potential": {"kind": "riesz", "s": 1}, "N": 2,
            "charges": "alternating", "routes": ["ewald"], "samples": 50}"#,
    ),
    (
        "coulomb-1d",
        "alternating charges on Z with Coulomb interaction",
        r#"{"lattice": {"preset": "cubic", "dim": 1}, "potential": {"kind": "riesz", "s": 1}, "N": 2,
            "charges": "alternating", "routes": ["convergence-factor", "ewald", "epstein"]}"#,
    ),
];

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let (_, _, text) = PRESETS
        .iter()
        .find(|p| p.0 == name)
        .ok_or_else(|| CliError::Config(format!("unknown preset {name:?}; see `presets`")))?;
    RunConfig::parse(text)
}
