//! The experiment runners behind each subcommand.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bergman_core::classical::{disk_density, univalence_criterion_scan, verify_pushforward_identity};
use bergman_core::convexity::{
    certify_convex_via_slices, check_convex, check_convex_on_segments, default_lambda_grid, second_difference_scan,
    ConvexityReport, ProbeSettings, Tolerance, Verdict,
};
use bergman_core::families::{
    kernel_sweep, verify_joint_convexity, verify_slice_identity, verify_theorem31, FiberedFamily,
};
use bergman_core::geometry::{ConvexDomain, Segment};
use bergman_core::kernel::{converge_table, BuildOptions, KernelApprox};
use bergman_core::C64;
use serde_json::{json, Value};

use crate::config::{taylor_map, to_c, Expectation, Experiment, ExperimentConfig};
use crate::report::{NamedDiagnostics, RunReport, Table, VerdictLine};

fn cj(z: C64) -> Value {
    json!([z.re, z.im])
}

fn segment_table(name: &str, r: &ConvexityReport) -> Table {
    let mut t = Table::new(name, &["segment", "min_slack"]);
    for (i, s) in r.per_segment.iter().enumerate() {
        t.push(vec![i.into(), (*s).into()]);
    }
    t
}

fn diagnostics(report: &mut RunReport, label: &str, k: &KernelApprox) {
    report.diagnostics.push(NamedDiagnostics {
        label: label.into(),
        diagnostics: k.diagnostics(),
    });
}

fn convexity_verdict(check: &str, r: &ConvexityReport) -> VerdictLine {
    VerdictLine {
        check: check.into(),
        passed: r.is_convex(),
        value: r.min_slack,
        threshold: -r.tol,
        detail: format!(
            "min slack {:.6e} >= -tol {:.6e} over {} segments",
            r.min_slack, -r.tol, r.probed_segments
        ),
    }
}

fn log_k(k: &KernelApprox) -> impl Fn(C64) -> Option<f64> + '_ {
    move |z| k.eval_k(z).ok().map(f64::ln)
}

/// Runs one experiment; the report's wall time covers the whole run.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = match &config.experiment {
        Experiment::KernelEval { .. } => kernel_eval(config),
        Experiment::KernelConverge { .. } => kernel_converge(config),
        Experiment::Theorem1 { .. } => run_theorem1(config),
        Experiment::NegativeControl { .. } => run_negative_control(config),
        Experiment::RemarkCounterexample { .. } => run_remark_counterexample(config),
        Experiment::QuestionExplorer { .. } => run_question_explorer(config),
        Experiment::FamilySweep { .. }
        | Experiment::FamilyIdentity { .. }
        | Experiment::FamilyTheorem31 { .. }
        | Experiment::FamilyJoint { .. } => run_family(config),
        Experiment::ClassicHyperbolic { .. } | Experiment::ClassicUnivalent { .. } => run_classic(config),
    }
    .with_context(|| format!("experiment {}", config.name))?;
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

fn build_opts(config: &ExperimentConfig) -> BuildOptions {
    config.build.into()
}

pub fn kernel_eval(config: &ExperimentConfig) -> Result<RunReport> {
    let Experiment::KernelEval {
        domain,
        weight,
        points,
        oracle,
        max_rel_error,
        dump_rule,
    } = &config.experiment
    else {
        bail!("not a kernel_eval config")
    };
    let mut report = RunReport::new(config);
    let k = KernelApprox::build_with(domain.build()?, &weight.build()?, config.degree, build_opts(config))?;
    diagnostics(&mut report, "kernel", &k);
    let oracle = oracle.as_ref().map(|o| o.build());
    let mut table = Table::new("values", &["re", "im", "k", "oracle", "rel_error"]);
    let mut worst: f64 = 0.0;
    for z in points.points() {
        let v = k.eval_k(z)?;
        let (o, e) = match &oracle {
            Some(o) => {
                let ov = o.eval(z)?;
                let e = (v - ov).abs() / ov;
                worst = worst.max(e);
                (Value::from(ov), Value::from(e))
            }
            None => (Value::Null, Value::Null),
        };
        table.push(vec![z.re.into(), z.im.into(), v.into(), o, e]);
    }
    report.tables.push(table);
    if let (Some(_), Some(bound)) = (&oracle, max_rel_error) {
        report.verdict(VerdictLine::at_most("max relative error vs closed form", worst, *bound));
    }
    if *dump_rule {
        let mut t = Table::new("rule", &["re", "im", "weight"]);
        for (z, w) in k.rule().nodes.iter().zip(&k.rule().weights) {
            t.push(vec![z.re.into(), z.im.into(), (*w).into()]);
        }
        report.tables.push(t);
    }
    Ok(report)
}

pub fn kernel_converge(config: &ExperimentConfig) -> Result<RunReport> {
    let Experiment::KernelConverge {
        domain,
        weight,
        point,
        degrees,
        threshold,
    } = &config.experiment
    else {
        bail!("not a kernel_converge config")
    };
    let mut report = RunReport::new(config);
    let t = converge_table(
        &domain.build()?,
        &weight.build()?,
        to_c(*point),
        degrees,
        build_opts(config),
        *threshold,
    )?;
    let mut table = Table::new("converge", &["degree", "k", "delta", "gram_stability"]);
    for r in &t.rows {
        table.push(vec![r.degree.into(), r.k.into(), r.delta.into(), r.gram_stability.into()]);
    }
    report.tables.push(table);
    let last = t.rows.last().and_then(|r| r.delta).unwrap_or(f64::INFINITY);
    report.verdict(VerdictLine::at_most("last relative change", last, *threshold));
    Ok(report)
}

pub fn run_theorem1(config: &ExperimentConfig) -> Result<RunReport> {
    let Experiment::Theorem1 {
        domain,
        weight,
        slice_spacing,
    } = &config.experiment
    else {
        bail!("not a theorem1 config")
    };
    let dom = domain.convex()?;
    let w = weight.build()?;
    if !w.is_convex() {
        bail!("weight is not convex; use a negative_control config for this input");
    }
    let mut report = RunReport::new(config);
    let k = KernelApprox::build_with(dom.clone(), &w, config.degree, build_opts(config))?;
    diagnostics(&mut report, "kernel", &k);
    let tol = Tolerance::Relative {
        floor: config.probes.tol_floor,
        source_error: k.gram_stability(),
    };
    let segs = check_convex(
        log_k(&k),
        &dom,
        &config.probes.settings(k.boundary_offset(), config.seed),
        tol,
    )?;
    report.verdict(convexity_verdict("log K convex along random segments", &segs));
    report.tables.push(segment_table("segments", &segs));
    report.probe("segments", &segs)?;
    if let Some(h) = slice_spacing {
        let slices = certify_convex_via_slices(
            log_k(&k),
            &dom,
            &default_lambda_grid(),
            *h,
            k.boundary_offset(),
            tol,
            true,
        )?;
        report.verdict(convexity_verdict("log K subharmonic on every slice", &slices));
        let mut t = Table::new("slices", &["lambda_re", "lambda_im", "min_laplacian"]);
        for (l, v) in default_lambda_grid().iter().zip(&slices.per_segment) {
            t.push(vec![l.re.into(), l.im.into(), (*v).into()]);
        }
        report.tables.push(t);
        report.probe("slices", &slices)?;
    }
    Ok(report)
}

pub fn run_negative_control(config: &ExperimentConfig) -> Result<RunReport> {
    let Experiment::NegativeControl {
        domain,
        weight,
        expect,
        min_violation,
    } = &config.experiment
    else {
        bail!("not a negative_control config")
    };
    let dom = domain.build()?;
    let mut report = RunReport::new(config);
    let k = KernelApprox::build_with(dom.clone(), &weight.build()?, config.degree, build_opts(config))?;
    diagnostics(&mut report, "kernel", &k);
    let tol = Tolerance::Relative {
        floor: config.probes.tol_floor,
        source_error: k.gram_stability(),
    };
    let r = check_convex(
        log_k(&k),
        &dom,
        &config.probes.settings(k.boundary_offset(), config.seed),
        tol,
    )?;
    match expect {
        Expectation::Violation => {
            report.verdict(VerdictLine {
                check: "log K violates convexity".into(),
                passed: r.verdict == Verdict::Violation,
                value: r.min_slack,
                threshold: -r.tol,
                detail: format!("min slack {:.6e} < -tol {:.6e}", r.min_slack, -r.tol),
            });
            if let Some(m) = min_violation {
                report.verdict(VerdictLine::at_least("violation magnitude", -r.min_slack, *m));
            }
        }
        Expectation::NoViolation => report.verdict(convexity_verdict("log K convex along random segments", &r)),
        Expectation::Unasserted => {}
    }
    report.tables.push(segment_table("segments", &r));
    report.probe("segments", &r)?;
    Ok(report)
}

pub fn run_remark_counterexample(config: &ExperimentConfig) -> Result<RunReport> {
    let Experiment::RemarkCounterexample {
        analytic_points,
        analytic_expected,
        analytic_tol,
        rectangle,
        segment,
        extra_segments,
        violation_factor,
    } = &config.experiment
    else {
        bail!("not a remark_counterexample config")
    };
    let mut report = RunReport::new(config);

    // Analytic part: only the shape e^{x²} of the plane kernel matters here.
    let q = |x: f64| -(-x * x / 2.0).exp();
    let values: Vec<f64> = analytic_points.iter().map(|&x| q(x)).collect();
    let (slack, _) = second_difference_scan(&values)?;
    report.verdict(VerdictLine::at_most(
        "analytic slack of -exp(-x^2/2) matches",
        (slack - analytic_expected).abs(),
        *analytic_tol,
    ));
    let dense: Vec<f64> = (0..=50).map(|i| q(0.1 * i as f64)).collect();
    let (dense_slack, at) = second_difference_scan(&dense)?;
    report.verdict(VerdictLine::at_most(
        "-exp(-x^2/2) violates convexity on [0, 5]",
        dense_slack,
        -1e-12,
    ));
    let sq: Vec<f64> = analytic_points.iter().map(|&x| x * x).collect();
    let (sq_slack, _) = second_difference_scan(&sq)?;
    report.verdict(VerdictLine::at_least("x^2 is convex on the same points", sq_slack, 0.0));
    let mut t = Table::new("analytic", &["x", "neg_inv_sqrt_shape", "log_shape"]);
    for (i, x) in analytic_points.iter().enumerate() {
        t.push(vec![(*x).into(), values[i].into(), sq[i].into()]);
    }
    report.tables.push(t);
    report.probe(
        "analytic_dense",
        &json!({"min_slack": dense_slack, "at_x": 0.1 * at as f64}),
    )?;

    // Numerical part on a rectangle standing in for the plane.
    let dom = rectangle.convex()?;
    let k = KernelApprox::build_with(dom, &bergman_core::weights::Weight::x_squared(), config.degree, build_opts(config))?;
    diagnostics(&mut report, "kernel", &k);
    let tol = Tolerance::Relative {
        floor: config.probes.tol_floor,
        source_error: k.gram_stability(),
    };
    let n = config.probes.samples;
    let main = Segment::new(to_c(segment[0]), to_c(segment[1]), n)?;
    let mut all = vec![main];
    for s in extra_segments {
        all.push(Segment::new(to_c(s[0]), to_c(s[1]), n)?);
    }
    for s in &all {
        for z in s.samples() {
            k.check_probe(z).context("segment sample too close to the rectangle boundary")?;
        }
    }
    let logk = check_convex_on_segments(log_k(&k), &all, tol, false)?;
    report.verdict(convexity_verdict("log K_N convex on all segments", &logk));
    let neg = |z: C64| k.eval_k(z).ok().map(|v| -1.0 / v.sqrt());
    let q_main = check_convex_on_segments(neg, &[main], tol, false)?;
    report.verdict(VerdictLine {
        check: "-1/sqrt(K_N) violates convexity on the main segment".into(),
        passed: q_main.min_slack < -violation_factor * q_main.tol,
        value: q_main.min_slack,
        threshold: -violation_factor * q_main.tol,
        detail: format!(
            "min slack {:.6e} < -{}·tol = {:.6e}",
            q_main.min_slack,
            violation_factor,
            -violation_factor * q_main.tol
        ),
    });
    let mut t = Table::new("main_segment", &["x", "y", "log_k", "neg_inv_sqrt_k"]);
    for z in main.samples() {
        let v = k.eval_k(z)?;
        t.push(vec![z.re.into(), z.im.into(), v.ln().into(), (-1.0 / v.sqrt()).into()]);
    }
    report.tables.push(t);
    report.probe("log_k", &logk)?;
    report.probe("neg_inv_sqrt_k", &q_main)?;
    Ok(report)
}

pub fn run_question_explorer(config: &ExperimentConfig) -> Result<RunReport> {
    let Experiment::QuestionExplorer { domain, closed_form } = &config.experiment else {
        bail!("not a question_explorer config")
    };
    let dom = domain.convex()?;
    let mut report = RunReport::exploratory(config);
    let tol = Tolerance::Relative {
        floor: config.probes.tol_floor,
        source_error: 0.0,
    };
    let r = if *closed_form {
        if *dom.shape() != *ConvexDomain::unit_disk().shape() {
            bail!("the closed form is only available on the unit disk");
        }
        let settings = config.probes.settings(0.0, config.seed);
        check_convex(|z| Some(-PI.sqrt() * (1.0 - z.norm_sqr())), &dom, &settings, tol)?
    } else {
        let k = KernelApprox::build_with(dom.clone(), &bergman_core::weights::Weight::Zero, config.degree, build_opts(config))?;
        diagnostics(&mut report, "kernel", &k);
        let tol = Tolerance::Relative {
            floor: config.probes.tol_floor,
            source_error: k.gram_stability(),
        };
        check_convex(
            |z| k.eval_k(z).ok().map(|v| -1.0 / v.sqrt()),
            &dom,
            &config.probes.settings(k.boundary_offset(), config.seed),
            tol,
        )?
    };
    report.tables.push(segment_table("segments", &r));
    report.probe("neg_inv_sqrt_k", &r)?;
    Ok(report)
}

pub fn run_family(config: &ExperimentConfig) -> Result<RunReport> {
    let opts = build_opts(config);
    let mut report = RunReport::new(config);
    match &config.experiment {
        Experiment::FamilySweep {
            family,
            ts,
            max_rel_error,
        } => {
            let fam = family.build()?;
            let ts: Vec<C64> = ts.iter().copied().map(to_c).collect();
            let base = match &fam {
                FiberedFamily::Oka { base, weight, .. } => {
                    Some(KernelApprox::build_with(base.clone(), weight, config.degree, opts)?)
                }
                FiberedFamily::NormBall { .. } => None,
            };
            let mut table = Table::new("sweep", &["t_re", "t_im", "k", "log_k", "expected", "rel_error", "error"]);
            let mut worst: f64 = 0.0;
            for p in kernel_sweep(&fam, &ts, config.degree, opts) {
                let expected = match (&fam, &base) {
                    (FiberedFamily::NormBall { radius }, _) => Some(1.0 / (PI * (radius - p.t.norm()).powi(2))),
                    (_, Some(b)) => b.eval_k(fam.path_point(p.t)).ok(),
                    _ => None,
                };
                let e = match (p.k, expected) {
                    (Some(k), Some(x)) => (k - x).abs() / x,
                    _ => f64::INFINITY,
                };
                worst = worst.max(e);
                table.push(vec![
                    p.t.re.into(),
                    p.t.im.into(),
                    p.k.into(),
                    p.log_k().into(),
                    expected.into(),
                    e.into(),
                    p.error.clone().into(),
                ]);
            }
            report.tables.push(table);
            report.verdict(VerdictLine::at_most("max relative sweep error", worst, *max_rel_error));
        }
        Experiment::FamilyIdentity { family, ts, floor } => {
            let fam = family.build()?;
            let mut table = Table::new("identity", &["t_re", "t_im", "slice_value", "base_value", "rel_error", "stability"]);
            for t in ts.iter().copied().map(to_c) {
                let id = verify_slice_identity(&fam, t, config.degree, opts)?;
                report.verdict(VerdictLine::at_most(
                    format!("slice identity at t = {}", t),
                    id.rel_error,
                    floor.max(3.0 * id.stability),
                ));
                table.push(vec![
                    t.re.into(),
                    t.im.into(),
                    id.slice_value.into(),
                    id.base_value.into(),
                    id.rel_error.into(),
                    id.stability.into(),
                ]);
            }
            report.tables.push(table);
        }
        Experiment::FamilyTheorem31 {
            family,
            t_region,
            min_slack,
        } => {
            let fam = family.build()?;
            let region = t_region.convex()?;
            let probes = ProbeSettings {
                n_segments: config.probes.segments,
                samples_per_segment: config.probes.samples,
                boundary_offset: config.probes.boundary_offset.unwrap_or(0.0),
                seed: config.seed,
            };
            let r = verify_theorem31(&fam, &region, config.degree, opts, &probes, config.probes.tol_floor)?;
            report.verdict(VerdictLine::at_least("min slack of t -> log K_t(0)", r.min_slack, *min_slack));
            report.verdict(convexity_verdict("t -> log K_t(0) convex within tol", &r));
            report.tables.push(segment_table("segments", &r));
            report.probe("theorem31", &r)?;
        }
        Experiment::FamilyJoint { family, t_region, .. } => {
            let fam = family.build()?;
            let region = t_region.convex()?;
            let settings = config.joint_settings().expect("joint config");
            let r = verify_joint_convexity(&fam, &region, config.degree, opts, &settings)?;
            report.verdict(convexity_verdict("(z, t) -> log K convex within tol", &r.report));
            if let Some(e) = r.oracle_max_rel_error {
                report.verdict(VerdictLine::at_most("max relative error vs closed form", e, 1e-6));
            }
            let mut t = Table::new("segments", &["z0_re", "z0_im", "t0_re", "t0_im", "z1_re", "z1_im", "t1_re", "t1_im"]);
            for ((z0, t0), (z1, t1)) in &r.segments {
                t.push(
                    [z0.re, z0.im, t0.re, t0.im, z1.re, z1.im, t1.re, t1.im]
                        .into_iter()
                        .map(Value::from)
                        .collect(),
                );
            }
            report.tables.push(t);
            report.tables.push(segment_table("slacks", &r.report));
            report.probe("joint", &r.report)?;
            report.probe("slice_builds", &r.slice_builds)?;
        }
        _ => bail!("not a family config"),
    }
    Ok(report)
}

pub fn run_classic(config: &ExperimentConfig) -> Result<RunReport> {
    let mut report = RunReport::new(config);
    match &config.experiment {
        Experiment::ClassicHyperbolic {
            points,
            max_rel_error,
            pushforward,
        } => {
            let k = KernelApprox::build_with(ConvexDomain::unit_disk(), &bergman_core::weights::Weight::Zero, config.degree, build_opts(config))?;
            diagnostics(&mut report, "kernel", &k);
            let mut t = Table::new("identity", &["re", "im", "four_pi_k", "lambda_sq", "rel_error"]);
            let mut worst: f64 = 0.0;
            for z in points.points() {
                let lhs = 4.0 * PI * k.eval_k(z)?;
                let rhs = disk_density(z)?.powi(2);
                let e = (lhs - rhs).abs() / rhs;
                worst = worst.max(e);
                t.push(vec![z.re.into(), z.im.into(), lhs.into(), rhs.into(), e.into()]);
            }
            report.tables.push(t);
            report.verdict(VerdictLine::at_most("4 pi K = lambda^2 on the disk", worst, *max_rel_error));
            if let Some(p) = pushforward {
                let map = taylor_map(&p.coeffs)?;
                let probes: Vec<C64> = p.probes.iter().copied().map(to_c).collect();
                let e = verify_pushforward_identity(&map, p.radius, p.vertices, &probes, config.degree, build_opts(config))?;
                report.verdict(VerdictLine::at_most("4 pi K = lambda^2 on a convex image", e, p.max_rel_error));
            }
        }
        Experiment::ClassicUnivalent {
            coeffs,
            r_grid,
            theta_count,
            expect,
            witness_near,
            witness_radius,
        } => {
            let f = taylor_map(coeffs)?;
            let scan = univalence_criterion_scan(&f, r_grid, *theta_count)?;
            match expect {
                Expectation::NoViolation => {
                    report.verdict(VerdictLine::at_least("min Re(z f''/f') >= -1", scan.min_value, -1.0))
                }
                Expectation::Violation => {
                    report.verdict(VerdictLine {
                        check: "min Re(z f''/f') < -1".into(),
                        passed: scan.min_value < -1.0,
                        value: scan.min_value,
                        threshold: -1.0,
                        detail: format!("{:.6e} < -1 at {}", scan.min_value, scan.witness),
                    });
                    if let (Some(p), Some(r)) = (witness_near, witness_radius) {
                        report.verdict(VerdictLine::at_most(
                            "witness location",
                            (scan.witness - to_c(*p)).norm(),
                            *r,
                        ));
                    }
                }
                Expectation::Unasserted => {}
            }
            let mut t = Table::new("scan", &["r", "theta", "value"]);
            for &r in r_grid {
                for k in 0..*theta_count {
                    let theta = 2.0 * PI * k as f64 / *theta_count as f64;
                    let z = C64::from_polar(r, theta);
                    let (_, d1, d2) = f.eval_with_derivatives(z);
                    t.push(vec![r.into(), theta.into(), (z * d2 / d1).re.into()]);
                }
            }
            report.tables.push(t);
            report.probe("witness", &json!({"min_value": scan.min_value, "at": cj(scan.witness)}))?;
        }
        _ => bail!("not a classic config"),
    }
    Ok(report)
}
