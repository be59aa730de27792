//! The invariant battery behind `verify`.

use anyhow::Result;
use graphtori_core::convergence::lattice_sequence;
use graphtori_core::field::{bump, FieldFamily, Grid};
use graphtori_core::lattice::FlatTorus;
use graphtori_core::levelset::{check_mass_inequality, isoperimetric_check, vprime_estimates, LevelSetAnalyzer};
use graphtori_core::math::{Mat3, PI};
use graphtori_core::membership::class_membership;
use graphtori_core::stability::ode::CERTIFICATE_TOLERANCE;
use graphtori_core::stability::StabilityReport;
use graphtori_core::GraphTorus;

use crate::commands::{membership_tolerances, DIAMETER_RESOLUTION};
use crate::config::RunConfig;
use crate::format::{fmt_bool, fmt_num, Table};
use crate::pipeline::{stability_options, Analysis};

/// One checked inequality. `margin >= 0` is the passing side unless the
/// check states its own tolerance in `pass`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub group: &'static str,
    pub name: &'static str,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn add(&mut self, group: &'static str, name: &'static str, margin: f64, pass: bool) {
        self.checks.push(Check { group, name, margin, pass });
    }

    fn at_least(&mut self, group: &'static str, name: &'static str, margin: f64) {
        self.add(group, name, margin, margin >= 0.0);
    }

    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["check", "name", "margin", "pass"]);
        for c in &self.checks {
            t.push(vec![c.group.into(), c.name.into(), fmt_num(c.margin), fmt_bool(c.pass)]);
        }
        t
    }

    pub fn summary(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!("{} {}/{} margin {}", if c.pass { "PASS" } else { "FAIL" }, c.group, c.name, fmt_num(c.margin))
            })
            .collect();
        out.extend(self.notes.iter().cloned());
        match self.first_failure() {
            None => out.push(format!("all {} checks passed", self.checks.len())),
            Some(c) => out.push(format!(
                "{} of {} checks failed; first failure: {}/{}",
                self.failures(),
                self.checks.len(),
                c.group,
                c.name
            )),
        }
        out
    }
}

/// Perturbation of the identity with operator norm 0.1 used for the
/// lattice-sequence checks.
pub fn lattice_perturbation() -> Mat3 {
    let e = Mat3([[0.02, 0.05, 0.0], [-0.03, 0.01, 0.04], [0.0, 0.02, -0.05]]);
    e.scaled(0.1 / e.operator_norm())
}

/// `I + E/i` for `i = 1..=count`.
pub fn perturbed_identity_sequence(count: usize) -> Vec<Mat3> {
    let e = lattice_perturbation();
    (1..=count).map(|i| Mat3::IDENTITY.add(&e.scaled(1.0 / i as f64))).collect()
}

/// Well and height of the reference level sphere: depth 0.1, support
/// radius 0.4, level radius 0.25 on the unit cube.
pub const SPHERE_WELL: (f64, f64, f64) = (0.1, 0.4, 0.25);

pub fn sphere_height() -> f64 {
    let (depth, support, r) = SPHERE_WELL;
    -depth * bump(r / support)
}

/// Absolute slack for inequalities whose sides both vanish.
pub const ROUND_OFF: f64 = 1e-12;

pub fn verify(config: &RunConfig) -> Result<VerifyReport> {
    let mut rep = VerifyReport::default();
    let n = config.grid;
    let disc = config.tolerances.disc / n as f64;

    let torus = config.torus()?;
    let d = torus.diameter(DIAMETER_RESOLUTION)?;
    rep.at_least("lattice", "injectivity_within_diameter", d.value + d.uncertainty - torus.injectivity_radius());

    let a = Analysis::from_config(config)?;
    let g = &a.graph;
    let vol_t = g.field().torus().volume();
    let r_scale = g.max_curvature().abs().max(g.min_curvature().abs());
    let total = g.total_curvature().abs();
    let tol = 1e-10 * r_scale * vol_t;
    rep.add("curvature", "divergence_identity", tol - total, total <= tol);
    let balance = 1e-8 * g.excess() - (g.excess() - g.positive_part()).abs();
    rep.add("curvature", "excess_balance", balance, balance >= 0.0 || g.excess() == 0.0);

    let flat = GraphTorus::new(FieldFamily::Cosine1d { amplitude: 0.1 }.sample(Grid::new(torus.clone(), n)?)?)?;
    let max_r = flat.max_curvature().abs().max(flat.min_curvature().abs());
    rep.at_least("curvature", "one_dimensional_flatness", 1e-10 * 4.0 * PI * PI * 0.1 - max_r);

    sphere_checks(&mut rep, n)?;

    let m = g.excess();
    let mass_tol = disc * m + ROUND_OFF;
    let mass = check_mass_inequality(m, &a.profile, mass_tol);
    rep.at_least("levelset", "mass_inequality", min_or_zero(mass.iter().map(|x| x.margin + mass_tol)));
    let iso = isoperimetric_check(&a.profile, 0.0);
    let iso_margin = iso.iter().filter_map(|x| {
        let rec = a.profile.records.iter().find(|r| r.h == x.h)?;
        Some(x.margin + 0.01 * rec.sublevel_volume)
    });
    rep.at_least("levelset", "isoperimetric_profile", min_or_zero(iso_margin));
    if m > 0.0 {
        let est = vprime_estimates(&a.profile, m, config.xi);
        let scale = est
            .iter()
            .flat_map(|e| [e.alpha_bound.map(|b| b.1.abs()), e.minkowski_bound.map(|b| b.1.abs())])
            .flatten()
            .fold(0.0, f64::max);
        let alpha = min_or_zero(est.iter().filter_map(|e| e.alpha_bound.map(|(l, r)| l - r)));
        let mink = min_or_zero(est.iter().filter_map(|e| e.minkowski_bound.map(|(l, r)| l - r)));
        rep.add("levelset", "vprime_alpha_bound", alpha, alpha >= -disc * scale);
        rep.add("levelset", "vprime_minkowski_bound", mink, mink >= -disc * scale);
    }

    let membership = class_membership(
        g.field(),
        &a.profile,
        membership_tolerances(config, g.field()),
        a.level_options.convexity_tol,
    );
    for (name, c) in membership.conditions() {
        rep.add("membership", name, c.margin, c.pass);
    }

    match a.stability(&stability_options(config)) {
        Ok(s) => stability_checks(&mut rep, &s, vol_t),
        Err(e) => {
            rep.notes.push(format!("stability chain not computed: {e:#}"));
            rep.add("stability", "chain", f64::NEG_INFINITY, false);
        }
    }

    let recs = lattice_sequence(&perturbed_identity_sequence(10), &Mat3::IDENTITY)?;
    let steps = min_or_zero(recs.windows(2).map(|w| w[0].lipschitz_gap() - w[1].lipschitz_gap()));
    rep.at_least("convergence", "lattice_gap_non_increasing", steps);
    rep.at_least("convergence", "lattice_gap_final", 0.012 - recs[9].lipschitz_gap());
    Ok(rep)
}

fn stability_checks(rep: &mut VerifyReport, s: &StabilityReport, vol_t: f64) {
    let v = &s.volumes;
    if s.rigid {
        rep.notes.push("rigidity branch: m(f) = 0".into());
        rep.at_least("stability", "rigid_volume", 1e-12 * vol_t - (v.graph_volume - vol_t).abs());
    } else {
        rep.at_least("stability", "h0_range", (s.h0 - s.min_f).min(-s.h0));
        rep.add("stability", "h0_bound", s.h0_bound + s.h0_uncertainty() - s.h0.abs(), s.h0_bound_pass());
        let residual = s.trajectory.as_ref().map_or(0.0, |t| t.final_residual());
        rep.at_least("stability", "ode_certificate", CERTIFICATE_TOLERANCE - residual);
        let comparison = min_or_zero(s.comparison.iter().map(|c| c.rhs * (1.0 + 1e-3) - c.lhs));
        rep.add("stability", "ode_comparison", comparison, s.comparison_pass());
        rep.at_least("stability", "deep_volume", v.deep_bound - v.deep_actual);
        rep.at_least("stability", "bulk_volume", v.bulk_bound - v.bulk_actual);
        rep.at_least("stability", "volume_lower", v.graph_volume - v.torus_volume);
        rep.at_least("stability", "volume_upper", v.upper - v.graph_volume);
        rep.add("stability", "fill_plus", s.flat.plus_bound * (1.0 + 1e-6) - s.flat.fill_plus, s.flat.plus_pass());
        rep.at_least("stability", "fill_minus", s.flat.minus_bound - s.flat.fill_minus);
        rep.at_least("stability", "flat_bound", s.flat.closed_form - s.flat.direct());
    }
}

fn sphere_checks(rep: &mut VerifyReport, n: usize) -> Result<()> {
    let (depth, support, _) = SPHERE_WELL;
    let t = FlatTorus::unit_cube();
    let field = FieldFamily::centered_well(&t, depth, support).sample(Grid::new(t, n)?)?;
    let derivs = field.derivatives();
    let record = LevelSetAnalyzer::new(&field, &derivs).record(sphere_height());
    if record.regular {
        rep.at_least("levelset", "sphere_minkowski_equality", 0.02 - (record.minkowski_ratio() - 1.0).abs());
        rep.at_least("levelset", "sphere_isoperimetric_equality", 0.01 - (record.isoperimetric_ratio() - 1.0).abs());
    } else {
        rep.add("levelset", "sphere_minkowski_equality", f64::NEG_INFINITY, false);
    }
    Ok(())
}

/// Minimum of the margins, 0 when there are none.
fn min_or_zero(it: impl Iterator<Item = f64>) -> f64 {
    let m = it.fold(f64::INFINITY, f64::min);
    if m.is_finite() {
        m
    } else {
        0.0
    }
}
