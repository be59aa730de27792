//! From a run configuration to the analysed graph torus.

use anyhow::{Context, Result};
use graphtori_core::field::{Grid, ScalarField};
use graphtori_core::levelset::{uniform_heights, LevelSetAnalyzer, LevelSetOptions, LevelSetProfile};
use graphtori_core::stability::{StabilityOptions, StabilityReport};
use graphtori_core::GraphTorus;

use crate::config::{FieldSource, RunConfig};
use crate::rawfield::read_raw;

pub fn sample_field(config: &RunConfig) -> Result<ScalarField> {
    let torus = config.torus().context("building the torus from `generators`")?;
    let grid = Grid::new(torus, config.grid)?;
    match &config.field {
        FieldSource::Family(kind) => Ok(kind.family(grid.torus()).sample(grid)?),
        FieldSource::Raw(path) => read_raw(path, grid),
    }
}

pub fn level_options(config: &RunConfig) -> LevelSetOptions {
    LevelSetOptions { regular_floor: config.tolerances.delta_reg, ..LevelSetOptions::default() }
}

pub fn stability_options(config: &RunConfig) -> StabilityOptions {
    StabilityOptions {
        xi: config.xi,
        window: config.window,
        ode_step: config.ode_step,
        heights: config.heights,
        ..StabilityOptions::default()
    }
}

/// A graph torus with the perimeter profile over `[min f, max f]`.
pub struct Analysis {
    pub graph: GraphTorus,
    pub profile: LevelSetProfile,
    pub level_options: LevelSetOptions,
}

impl Analysis {
    pub fn new(field: ScalarField, level_options: LevelSetOptions, heights: usize) -> Result<Analysis> {
        let graph = GraphTorus::new(field)?;
        let analyzer = LevelSetAnalyzer::with_options(graph.field(), graph.derivatives(), level_options);
        let profile = analyzer.perimeter_profile(&uniform_heights(graph.min_f(), graph.field().max(), heights));
        Ok(Analysis { graph, profile, level_options })
    }

    pub fn from_config(config: &RunConfig) -> Result<Analysis> {
        Analysis::new(sample_field(config)?, level_options(config), config.heights)
    }

    pub fn analyzer(&self) -> LevelSetAnalyzer<'_> {
        LevelSetAnalyzer::with_options(self.graph.field(), self.graph.derivatives(), self.level_options)
    }

    pub fn stability(&self, options: &StabilityOptions) -> Result<StabilityReport> {
        Ok(StabilityReport::compute(&self.graph, &self.analyzer(), &self.profile, options)?)
    }
}
