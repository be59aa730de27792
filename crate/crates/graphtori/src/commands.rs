//! Subcommands other than `verify`. Each returns a summary for people and
//! a table for machines.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use graphtori_core::convergence::{sweep_instance, ConvergenceRecord, SweepFamily};
use graphtori_core::membership::{class_membership, MembershipTolerances};
use rayon::prelude::*;

use crate::config::{RunConfig, SweepKind};
use crate::format::{fmt_bool, fmt_num, fmt_opt, Table};
use crate::pipeline::{stability_options, Analysis};

/// Sample count per axis for the torus diameter estimate.
pub const DIAMETER_RESOLUTION: usize = 32;

pub struct Output {
    pub summary: Vec<String>,
    pub table: Table,
}

pub fn torus_info(config: &RunConfig) -> Result<Output> {
    let t = config.torus()?;
    let d = t.diameter(DIAMETER_RESOLUTION)?;
    let mut table = Table::new(&[
        "volume",
        "diameter",
        "diameter_uncertainty",
        "injectivity_radius",
        "shortest_vector",
        "boundary_area",
    ]);
    table.push(vec![
        fmt_num(t.volume()),
        fmt_num(d.value),
        fmt_num(d.uncertainty),
        fmt_num(t.injectivity_radius()),
        fmt_num(t.shortest_vector_length()),
        fmt_num(t.boundary_area()),
    ]);
    let summary = vec![
        format!("volume             {}", fmt_num(t.volume())),
        format!("diameter           {} ± {}", fmt_num(d.value), fmt_num(d.uncertainty)),
        format!("injectivity radius {}", fmt_num(t.injectivity_radius())),
        format!("boundary area      {}", fmt_num(t.boundary_area())),
    ];
    Ok(Output { summary, table })
}

pub fn field_analyze(config: &RunConfig) -> Result<Output> {
    let a = Analysis::from_config(config)?;
    let g = &a.graph;
    let diameter = g.diameter();
    let membership = class_membership(
        g.field(),
        &a.profile,
        membership_tolerances(config, g.field()),
        a.level_options.convexity_tol,
    );
    let mut table = Table::new(&[
        "m",
        "positive_part",
        "total_R",
        "min_R",
        "max_R",
        "min_f",
        "max_f",
        "vol_T",
        "vol_M",
        "graph_diameter",
        "admissible",
    ]);
    table.push(vec![
        fmt_num(g.excess()),
        fmt_num(g.positive_part()),
        fmt_num(g.total_curvature()),
        fmt_num(g.min_curvature()),
        fmt_num(g.max_curvature()),
        fmt_num(g.min_f()),
        fmt_num(g.field().max()),
        fmt_num(g.field().torus().volume()),
        fmt_num(g.graph_volume()),
        fmt_num(diameter.value),
        fmt_bool(membership.passes()),
    ]);
    let mut summary = vec![
        format!("m(f)          {}", fmt_num(g.excess())),
        format!("R range       [{}, {}]", fmt_num(g.min_curvature()), fmt_num(g.max_curvature())),
        format!("integral of R {}", fmt_num(g.total_curvature())),
        format!("vol(M)        {}", fmt_num(g.graph_volume())),
        format!("diam(M)      <= {}", fmt_num(diameter.value)),
    ];
    for (name, c) in membership.conditions() {
        summary.push(format!("{name:<17} {} (margin {})", if c.pass { "yes" } else { "no" }, fmt_num(c.margin)));
    }
    Ok(Output { summary, table })
}

pub fn membership_tolerances(config: &RunConfig, field: &graphtori_core::ScalarField) -> MembershipTolerances {
    let rel = MembershipTolerances::relative_to(field);
    MembershipTolerances {
        max: config.tolerances.max.unwrap_or(rel.max),
        boundary: config.tolerances.boundary.unwrap_or(rel.boundary),
    }
}

pub const PROFILE_HEADER: [&str; 10] =
    ["h", "regular", "V", "vol_sub", "intH", "weightedH", "vprime_fd", "vprime_surf", "minkowski_ratio", "iso_margin"];

pub fn levelset_profile(config: &RunConfig) -> Result<Output> {
    let a = Analysis::from_config(config)?;
    let mut table = Table::new(&PROFILE_HEADER);
    for r in &a.profile.records {
        table.push(vec![
            fmt_num(r.h),
            fmt_bool(r.regular),
            fmt_num(r.area),
            fmt_num(r.sublevel_volume),
            fmt_num(r.mean_integral),
            fmt_num(r.weighted_integral),
            fmt_opt(r.vprime_fd),
            fmt_num(r.vprime_surface),
            if r.area > 0.0 { fmt_num(r.minkowski_ratio()) } else { String::new() },
            fmt_num(r.isoperimetric_margin()),
        ]);
    }
    let regular = a.profile.regular().count();
    let summary = vec![
        format!("heights  {} ({} regular)", a.profile.records.len(), regular),
        format!("f range  [{}, {}]", fmt_num(a.profile.min_f), fmt_num(a.profile.max_f)),
    ];
    Ok(Output { summary, table })
}

pub fn stability_report(config: &RunConfig) -> Result<Output> {
    let a = Analysis::from_config(config)?;
    let r = a.stability(&stability_options(config))?;
    let min_comparison = r.comparison.iter().map(|c| c.rhs - c.lhs).fold(f64::INFINITY, f64::min);
    let residual = r.trajectory.as_ref().map(|t| t.final_residual());
    let mut table = Table::new(&[
        "m",
        "min_f",
        "xi",
        "L",
        "h0",
        "h0_uncertainty",
        "h0_bound",
        "threshold",
        "ode_residual",
        "comparison_min_margin",
        "vol_T",
        "vol_M",
        "deep_actual",
        "deep_bound",
        "bulk_actual",
        "bulk_bound",
        "vol_upper",
        "fill_plus",
        "fill_minus",
        "flat_bound_direct",
        "flat_bound_paper",
        "tracker",
        "rigid",
    ]);
    table.push(vec![
        fmt_num(r.m),
        fmt_num(r.min_f),
        fmt_num(r.xi),
        fmt_num(r.window),
        fmt_num(r.h0),
        fmt_num(r.h0_uncertainty()),
        fmt_num(r.h0_bound),
        fmt_num(r.threshold()),
        fmt_opt(residual),
        if r.comparison.is_empty() { String::new() } else { fmt_num(min_comparison) },
        fmt_num(r.volumes.torus_volume),
        fmt_num(r.volumes.graph_volume),
        fmt_num(r.volumes.deep_actual),
        fmt_num(r.volumes.deep_bound),
        fmt_num(r.volumes.bulk_actual),
        fmt_num(r.volumes.bulk_bound),
        fmt_num(r.volumes.upper),
        fmt_num(r.flat.fill_plus),
        fmt_num(r.flat.fill_minus),
        fmt_num(r.flat.direct()),
        fmt_num(r.flat.closed_form),
        fmt_num(r.flat.tracker),
        fmt_bool(r.rigid),
    ]);
    let mut summary = vec![format!("m(f)        {}", fmt_num(r.m))];
    if r.rigid {
        summary.push("rigidity branch: m(f) = 0".into());
    } else {
        summary.extend([
            format!("h0          {} ± {} (bound {})", fmt_num(r.h0), fmt_num(r.h0_uncertainty()), fmt_num(r.h0_bound)),
            format!(
                "vol(T) <= vol(M) <= upper: {} <= {} <= {}",
                fmt_num(r.volumes.torus_volume),
                fmt_num(r.volumes.graph_volume),
                fmt_num(r.volumes.upper)
            ),
            format!(
                "fills       {} + {} (bound {})",
                fmt_num(r.flat.fill_plus),
                fmt_num(r.flat.fill_minus),
                fmt_num(r.flat.closed_form)
            ),
        ]);
    }
    Ok(Output { summary, table })
}

pub const SWEEP_HEADER: [&str; 12] = [
    "j",
    "m",
    "min_f",
    "min_R",
    "h0",
    "h0_bound",
    "vol_T",
    "vol_M",
    "vol_upper",
    "flat_bound_paper",
    "flat_bound_direct",
    "tracker",
];

pub fn sweep_family(config: &RunConfig) -> Result<SweepFamily> {
    let torus = config.torus()?;
    let (depth0, radius) = (config.sweep.depth0, config.sweep.radius);
    Ok(match config.sweep.kind {
        SweepKind::RadialWell => SweepFamily::RadialWell { torus, depth0, radius },
        SweepKind::Collapsing => SweepFamily::Collapsing { torus, depth0, radius },
    })
}

/// Runs every index in parallel; rows come back in index order.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<ConvergenceRecord>> {
    let family = sweep_family(config)?;
    let options = stability_options(config);
    config
        .sweep
        .indices
        .par_iter()
        .map(|&j| sweep_instance(&family, j, config.grid, &options).with_context(|| format!("sweep instance j = {j}")))
        .collect()
}

pub fn sweep(config: &RunConfig) -> Result<Output> {
    let records = run_sweep(config)?;
    let mut table = Table::new(&SWEEP_HEADER);
    for r in &records {
        table.push(vec![
            r.j.to_string(),
            fmt_num(r.m),
            fmt_num(r.min_f),
            fmt_num(r.min_curvature),
            fmt_num(r.h0),
            fmt_num(r.h0_bound),
            fmt_num(r.vol_t),
            fmt_num(r.vol_m),
            fmt_num(r.vol_upper),
            fmt_num(r.flat_bound_closed_form),
            fmt_num(r.flat_bound_direct),
            fmt_num(r.tracker),
        ]);
    }
    if let Some(dir) = &config.plot_dir {
        write_plot_files(dir, &records)?;
    }
    let summary = records
        .iter()
        .map(|r| {
            format!(
                "j={:<3} m={} h0={} vol_M-vol_T={} flat<= {} checks {}",
                r.j,
                fmt_num(r.m),
                fmt_num(r.h0),
                fmt_num(r.vol_m - r.vol_t),
                fmt_num(r.flat_bound_closed_form),
                if r.checks_pass { "pass" } else { "FAIL" }
            )
        })
        .collect();
    Ok(Output { summary, table })
}

/// Two-column `j value` files, one per tracked quantity.
pub fn write_plot_files(dir: &Path, records: &[ConvergenceRecord]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    type Series = (&'static str, fn(&ConvergenceRecord) -> f64);
    let series: [Series; 6] = [
        ("m", |r| r.m),
        ("h0", |r| r.h0),
        ("volume_excess", |r| r.vol_m - r.vol_t),
        ("flat_bound_paper", |r| r.flat_bound_closed_form),
        ("flat_bound_direct", |r| r.flat_bound_direct),
        ("tracker", |r| r.tracker),
    ];
    for (name, value) in series {
        let mut text = format!("# j {name}\n");
        for r in records {
            text.push_str(&format!("{} {}\n", r.j, fmt_num(value(r))));
        }
        let path = dir.join(format!("{name}.dat"));
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
