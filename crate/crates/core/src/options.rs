use serde::{Deserialize, Serialize};

use crate::envelope::DEFAULT_RESOLUTION;

/// How breakpoints of a modified utility are located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakpointSearch {
    /// Bisect on the distortion crossing each receiver switch belief when the
    /// distortion is monotone, otherwise scan.
    #[default]
    Auto,
    /// Scan a uniform grid for value changes and bisect each bracket.
    Scan,
}

/// Numerical settings shared by the solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Points in the uniform grid of the outer envelope.
    pub resolution: usize,
    /// Points in the grid of each interim envelope when no fast path applies.
    pub inner_resolution: usize,
    /// Two-step minus one-shot values within this margin are "indifferent".
    pub classification_margin: f64,
    pub breakpoint_search: BreakpointSearch,
    /// Let the sender stop after the first update instead of always running a second.
    pub allow_skip_second: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            inner_resolution: 2001,
            classification_margin: 1e-6,
            breakpoint_search: BreakpointSearch::Auto,
            allow_skip_second: false,
        }
    }
}
