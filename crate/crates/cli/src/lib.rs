//! Command-line front end for the oscillator model crate.
//!
//! A run is described by a small flat JSON config (or the equivalent
//! flags), executes one named scenario, and leaves three artifacts in the
//! output directory: a CSV time series, a JSON summary with every headline
//! metric and its tolerance, and for time-series scenarios an SVG plot.
//! Identical configs produce byte-identical CSV and JSON.

pub mod config;
pub mod report;
mod scenarios;
mod svg;

pub use config::{RunConfig, Scenario};
pub use report::{Metric, MetricKind, RunSummary};
pub use scenarios::{run, RunOutcome};

use oscillab_core::slle::{preset, RegimePreset};

/// One row per canonical operating point: key, populations, and the
/// mean-amplitude equation it produces.
pub fn presets_table() -> String {
    let mut out = String::new();
    for regime in RegimePreset::ALL {
        let p = preset(regime, 1.0, 0.1);
        let equation = match regime {
            RegimePreset::QuasilinearAmplifier => {
                "d<a>/dt = [gamma1 (n_up - n_dn)/2 + 2 gamma2 n_upp] <a>"
            }
            RegimePreset::PureNoiseAmplification => "d<a>/dt = gamma2 <a>",
            RegimePreset::PhenomenologicalVanDerPol => {
                "d<a>/dt = (gamma1/2) <a> - gamma2 <a^dag a^2>"
            }
        };
        out.push_str(&format!(
            "{:<9}  n_up={} n_dn={} n_upp={} n_ddn={}  {}  ({})\n",
            regime.key(),
            p.n_up,
            p.n_dn,
            p.n_upp,
            p.n_ddn,
            equation,
            regime.describe(),
        ));
    }
    out
}
