//! Scenario pipelines: positive mass across a corner, and Brown-York
//! positivity of a fill-in through its scalar-flat extension.
//!
//! A single smoothing scale that fails is recorded in its row and the sweep
//! continues; solvability failure at some size is itself a finding.

use crate::bartnik::{brown_york, shi_tam_extend_to_horizon, verify_fill_in_bound, BartnikData};
use crate::conformal::{
    conformal_scalar, mass_change, solve_conformal, InnerBoundary, Potential,
};
use crate::corner::{miao_smooth, negative_part_l1, CornerMetric, Mollifier};
use crate::eigen::{neumann_principal_eigenvalue, EigenProblem};
use crate::error::{Error, Result};
use crate::geometry::{ricci_from_jet, End, EndKind, ProfileMetric};
use crate::par;
use crate::report::{Check, ScenarioReport, SweepRow, Verdict};
use crate::scenario::{PipelineKind, PotentialKind, Scenario};
use crate::shield::check_shield;
use crate::tolerances::Tolerances;

pub const CORNER_THEOREM: &str =
    "positive mass across a corner: R >= 0 on both sides and H_+ <= H_- imply m_ADM >= 0, with rigidity when m = 0";
pub const FILL_IN_THEOREM: &str =
    "Brown-York positivity: Bartnik data with a nonnegative-scalar-curvature fill-in has m_BY >= c >= 0";

/// Settings of a corner sweep.
#[derive(Debug, Clone)]
pub struct CornerSweep {
    pub deltas: Vec<f64>,
    pub mollifier: Mollifier,
    pub potential: PotentialKind,
    pub inner_boundary: InnerBoundary,
    pub eigen_domain: Option<(f64, f64)>,
}

impl CornerSweep {
    pub fn new(deltas: &[f64]) -> Self {
        Self {
            deltas: deltas.to_vec(),
            mollifier: Mollifier::standard(),
            potential: PotentialKind::NegativePart,
            inner_boundary: InnerBoundary::NeumannAtInner,
            eigen_domain: None,
        }
    }

    fn from_scenario(s: &Scenario) -> Result<Self> {
        Ok(Self {
            deltas: s.smoothing.deltas.clone(),
            mollifier: s.mollifier()?,
            potential: s.potential.kind,
            inner_boundary: s.potential.inner_boundary,
            eigen_domain: s.eigen.map(|e| (e.domain[0], e.domain[1])),
        })
    }
}

/// Runs the scenario's pipeline with tolerances `tol`.
pub fn run(scenario: &Scenario, tol: &Tolerances) -> Result<ScenarioReport> {
    match scenario.pipeline {
        PipelineKind::CornerPositiveMass => run_corner_positive_mass(scenario, tol),
        PipelineKind::ShiTam => run_shi_tam(scenario, tol),
    }
}

pub fn run_corner_positive_mass(scenario: &Scenario, tol: &Tolerances) -> Result<ScenarioReport> {
    let dim = scenario.dimension;
    let base = scenario.base_dir();
    let missing = |s: &str| Error::Scenario(format!("missing [{s}]"));
    let left = scenario.inner.as_ref().ok_or_else(|| missing("inner"))?.build(dim, base)?;
    let right = scenario.outer.as_ref().ok_or_else(|| missing("outer"))?.build(dim, base)?;
    let corner = CornerMetric::glue(left, &right)?;
    let sweep = CornerSweep::from_scenario(scenario)?;
    let mut report = ScenarioReport::new(&scenario.name, PipelineKind::CornerPositiveMass.name(), CORNER_THEOREM);
    corner_positive_mass(&corner, &sweep, tol, &mut report)?;
    Ok(report)
}

fn min_scalar(metric: &ProfileMetric) -> f64 {
    metric.scalar_curvature_samples().into_iter().fold(f64::INFINITY, f64::min)
}

/// The corner pipeline on an assembled corner, appending to `report` and
/// setting its verdict.
pub fn corner_positive_mass(
    corner: &CornerMetric,
    sweep: &CornerSweep,
    tol: &Tolerances,
    report: &mut ScenarioReport,
) -> Result<()> {
    let (h_plus, h_minus) = corner.mean_curvature_gap();
    report.quantity("H_plus", h_plus, "CornerMetric::mean_curvature_gap");
    report.quantity("H_minus", h_minus, "CornerMetric::mean_curvature_gap");
    let original = corner.right().adm_mass(End::Outer)?;
    report.quantity("adm_mass", original.extrapolated, "adm_mass(outer side)");
    report.quantity("adm_mass_flux", original.flux, "adm_mass(outer side)");

    report.checks.push(
        Check::at_most(
            "H_plus - H_minus",
            h_plus - h_minus,
            tol.mean_curvature,
            "CornerMetric::mean_curvature_gap",
        )
        .as_hypothesis(),
    );
    for (side, metric) in [("inner", corner.left()), ("outer", corner.right())] {
        report.checks.push(
            Check::at_least(
                &format!("min R ({side} side)"),
                min_scalar(metric),
                -tol.curvature,
                "scalar_curvature",
            )
            .as_hypothesis(),
        );
    }

    let rows = par::map(&sweep.deltas, |delta| sweep_row(corner, *delta, sweep));
    report.sweep = rows;
    let sorted: Vec<SweepRow> = report.sorted_sweep().into_iter().cloned().collect();
    let last = sorted.last().expect("nonempty delta schedule");

    let hypotheses_hold = report.checks.iter().filter(|c| c.hypothesis).all(|c| c.pass);
    let final_mass = if !hypotheses_hold {
        report.notes.push(
            "hypotheses fail, so the conformal correction proves nothing; final mass is the unsmoothed ADM mass".into(),
        );
        report.quantity("final_mass", original.extrapolated, "adm_mass(outer side)");
        original.extrapolated
    } else if last.ok() {
        report.quantity(
            "final_mass",
            last.conformal_mass.unwrap_or(f64::NAN),
            &format!("mass_change(delta={})", last.delta),
        );
        last.conformal_mass.unwrap_or(f64::NAN)
    } else {
        report.notes.push(format!(
            "smallest scale delta = {} failed ({}); final mass falls back to the unsmoothed ADM mass",
            last.delta, last.status
        ));
        report.quantity("final_mass", original.extrapolated, "adm_mass(outer side)");
        original.extrapolated
    };

    let ok_rows: Vec<&SweepRow> = sorted.iter().filter(|r| r.ok()).collect();
    if !ok_rows.is_empty() {
        let min_r = ok_rows
            .iter()
            .filter_map(|r| r.min_conformal_scalar)
            .fold(f64::INFINITY, f64::min);
        report
            .checks
            .push(Check::at_least("min conformal R over sweep", min_r, -tol.curvature, "conformal_scalar"));
        let disc = ok_rows.iter().filter_map(|r| r.mass_discrepancy()).fold(0.0, f64::max);
        report.checks.push(Check::at_most(
            "max |formula mass - direct ADM|",
            disc,
            tol.mass_formula,
            "mass_change",
        ));
    }
    report.checks.push(Check::at_least(
        "final mass",
        final_mass,
        -tol.mass,
        "mass_change at smallest delta",
    ));

    if final_mass.abs() <= tol.mass && last.ok() {
        // rigidity signature
        report.quantity("rigidity: H_plus - H_minus", h_plus - h_minus, "CornerMetric::mean_curvature_gap");
        report.checks.push(Check::at_most(
            "rigidity |H_plus - H_minus|",
            (h_plus - h_minus).abs(),
            tol.mean_curvature,
            "CornerMetric::mean_curvature_gap",
        ));
        let ric = last.max_conformal_ricci.unwrap_or(f64::NAN);
        report.quantity("rigidity: max |Ric|", ric, &format!("ricci of conformal metric (delta={})", last.delta));
        report
            .checks
            .push(Check::at_most("rigidity max |Ric|", ric, tol.ricci, "ricci of conformal metric"));
    }

    let checks_hold = report.checks.iter().filter(|c| !c.hypothesis).all(|c| c.pass);
    report.verdict = if !hypotheses_hold {
        Verdict::HypothesisViolated
    } else if !last.ok() {
        Verdict::Inconclusive
    } else if checks_hold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(())
}

const SWEEP_PROVENANCE: &str =
    "miao_smooth > c0_distance > negative_part_l1 > spike_integral > solve_conformal > conformal_scalar > mass_change";

/// One smoothing scale; failures land in `status`.
fn sweep_row(corner: &CornerMetric, delta: f64, sweep: &CornerSweep) -> SweepRow {
    let mut row = SweepRow {
        delta,
        eps: crate::corner::spike_scale(delta),
        c0_distance: None,
        negative_part_l1: None,
        spike_integral: None,
        adm_mass: None,
        conformal_mass: None,
        conformal_mass_direct: None,
        min_u: None,
        min_conformal_scalar: None,
        max_conformal_ricci: None,
        solver_residual: None,
        mu: None,
        status: "ok".into(),
        provenance: SWEEP_PROVENANCE.into(),
    };
    if let Err(e) = fill_row(corner, delta, sweep, &mut row) {
        row.status = format!("error: {e}");
    }
    row
}

fn fill_row(corner: &CornerMetric, delta: f64, sweep: &CornerSweep, row: &mut SweepRow) -> Result<()> {
    let smoothed = miao_smooth(corner, delta, &sweep.mollifier)?;
    let g = &smoothed.metric;
    row.c0_distance = Some(smoothed.c0_distance(corner)?);
    row.negative_part_l1 = Some(negative_part_l1(g, (smoothed.s0 - delta, smoothed.s0 + delta))?);
    row.spike_integral = Some(smoothed.spike_integral()?);
    if let Some(domain) = sweep.eigen_domain {
        let r = Potential::new(g, g.scalar_curvature_samples())?;
        row.mu = Some(neumann_principal_eigenvalue(&EigenProblem::new(g, domain, &r)?)?.mu);
    }
    let v = match sweep.potential {
        // outside U_delta the metric is the unsmoothed one, where R >= 0 up to roundoff
        PotentialKind::NegativePart => {
            Potential::negative_part_of_scalar(g)?.restricted(g, (smoothed.s0 - delta, smoothed.s0 + delta))?
        }
        PotentialKind::CappedCutoff => Potential::smoothed_scalar_cutoff(g, smoothed.s0, delta)?,
    };
    let sol = solve_conformal(g, &v, sweep.inner_boundary)?;
    row.min_u = Some(sol.min_u());
    row.solver_residual = Some(sol.residual);
    row.min_conformal_scalar = Some(conformal_scalar(&sol, &v, g).into_iter().fold(f64::INFINITY, f64::min));
    let dim = g.dim();
    row.max_conformal_ricci = Some(
        (0..sol.metric.len())
            .map(|i| ricci_from_jet(dim, sol.metric.jet(i)).max_abs())
            .fold(0.0, f64::max),
    );
    let change = mass_change(&sol, &v, g)?;
    row.adm_mass = Some(change.original.extrapolated);
    row.conformal_mass = Some(change.formula);
    row.conformal_mass_direct = Some(change.direct.extrapolated);
    Ok(())
}

/// Boundary mean curvature of the fill-in's outer sphere, toward the outside.
fn boundary_mean_curvature(fill_in: &ProfileMetric) -> f64 {
    let j = fill_in.jet(fill_in.len() - 1);
    (fill_in.dim() as f64 - 1.0) * j.d1 / j.value
}

pub fn run_shi_tam(scenario: &Scenario, tol: &Tolerances) -> Result<ScenarioReport> {
    let dim = scenario.dimension;
    let fill_in = scenario
        .fill_in
        .as_ref()
        .ok_or_else(|| Error::Scenario("missing [fill_in]".into()))?
        .build(dim, scenario.base_dir())?;
    let (data, lambda) = scenario
        .bartnik_data()?
        .ok_or_else(|| Error::Scenario("missing [bartnik]".into()))?;
    let mut report = ScenarioReport::new(&scenario.name, PipelineKind::ShiTam.name(), FILL_IN_THEOREM);
    let sweep = CornerSweep::from_scenario(scenario)?;
    fill_in_positivity(&fill_in, &data, lambda, scenario.shield.as_ref(), &sweep, tol, &mut report)?;
    Ok(report)
}

/// Brown-York pipeline on an assembled fill-in.
pub fn fill_in_positivity(
    fill_in: &ProfileMetric,
    data: &BartnikData,
    lambda: Option<f64>,
    shield: Option<&crate::shield::ShieldSpec>,
    sweep: &CornerSweep,
    tol: &Tolerances,
    report: &mut ScenarioReport,
) -> Result<()> {
    let rho = data.rho();
    let h_end = fill_in.warp()[fill_in.len() - 1];
    if (h_end - rho).abs() > tol.boundary_match * rho.max(1.0) {
        return Err(Error::InterfaceMismatch(format!(
            "fill-in boundary radius {h_end} differs from Bartnik radius {rho}"
        )));
    }
    let eta_fill = boundary_mean_curvature(fill_in);
    let eta = data.constant_eta().unwrap_or_else(|| data.eta_integral() / data.area());
    if (data.min_eta() - eta_fill).abs() > tol.boundary_match || (eta - eta_fill).abs() > tol.boundary_match {
        return Err(Error::InterfaceMismatch(format!(
            "fill-in boundary mean curvature {eta_fill} differs from Bartnik data (mean {eta}, min {})",
            data.min_eta()
        )));
    }

    let m_by = brown_york(data);
    report.quantity("m_BY", m_by, "brown_york");
    report.quantity("boundary mean curvature", eta_fill, "fill-in profile");
    let r_min = min_scalar(fill_in);
    report.quantity("min R (fill-in)", r_min, "scalar_curvature(fill-in)");
    report.checks.push(Check::at_least("min R (fill-in)", r_min, -tol.curvature, "scalar_curvature(fill-in)").as_hypothesis());
    report.checks.push(Check::at_least("boundary mean curvature", eta_fill, 0.0, "fill-in profile").as_hypothesis());

    let inner_kind = fill_in.ends()[0];
    let mut shield_ok = true;
    if let Some(spec) = shield {
        let shield_report = check_shield(fill_in, spec)?;
        for item in &shield_report.items {
            report.quantity(&format!("shield: {}", item.name), item.value, "check_shield");
        }
        report.quantity("shield: D0", shield_report.d0, "check_shield");
        report.quantity("shield: D1", shield_report.d1, "check_shield");
        shield_ok = shield_report.verdict();
        report.quantity("shield verdict", if shield_ok { 1.0 } else { 0.0 }, "check_shield");
    } else if matches!(inner_kind, EndKind::Boundary | EndKind::TruncatedIncomplete) {
        shield_ok = false;
        report.notes.push("fill-in has an incomplete inner end and no shield; nothing certifies it".into());
    }

    if let Some(lambda) = lambda {
        let (holds, margin) = verify_fill_in_bound(data, lambda);
        report.quantity("lambda - min eta", margin, "verify_fill_in_bound");
        report.checks.push(Check::at_least("lambda - min eta", margin, 0.0, "verify_fill_in_bound"));
        debug_assert_eq!(holds, margin >= 0.0);
    }

    if eta_fill < 0.0 {
        report.verdict = Verdict::HypothesisViolated;
        return Ok(());
    }
    let ext = shi_tam_extend_to_horizon(data.dim(), rho, eta_fill)?;
    report.quantity("c", ext.c, "shi_tam_extend");
    let ext_mass = ext.profile.adm_mass(End::Outer)?;
    report.quantity("extension ADM mass", ext_mass.extrapolated, "adm_mass(extension)");
    report.checks.push(Check::at_least("m_BY - c", m_by - ext.c, -tol.mass, "brown_york, shi_tam_extend"));
    report.checks.push(Check::at_least("m_BY", m_by, -tol.mass, "brown_york"));

    let corner = CornerMetric::glue(fill_in.clone(), &ext.profile)?;
    corner_positive_mass(&corner, sweep, tol, report)?;

    let hypotheses_hold = report.checks.iter().filter(|c| c.hypothesis).all(|c| c.pass);
    let checks_hold = report.checks.iter().filter(|c| !c.hypothesis).all(|c| c.pass);
    report.verdict = if !hypotheses_hold {
        Verdict::HypothesisViolated
    } else if !checks_hold {
        Verdict::Fail
    } else if !shield_ok {
        Verdict::Inconclusive
    } else {
        report.verdict
    };
    Ok(())
}
