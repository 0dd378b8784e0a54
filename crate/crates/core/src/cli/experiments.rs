use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{relay_counts, ExperimentKind, ExperimentManifest, Output};
use crate::error::Result;
use crate::evt::{
    approx_max_cdf, approx_max_curve, auto_normalizing_constants, gumbel_cdf,
    normalized_max_samples, BetaCriterion,
};
use crate::exact_stats::{
    exact_max_cdf, ks_distance, mean_theta_iid_baseline, quantile_grid, CdfCurve, EmpiricalCdf,
    Provenance,
};
use crate::metrics::{outage_capacity, outage_probability, CapacityReport};
use crate::optimize::{
    maximize_ergodic, maximize_throughput, minimize_outage, protocol_comparison, step_grid,
    write_protocol_csv, OptimizationResult, ProtocolOptions,
};
use crate::ordering::{
    predict_order, reference_grid, verify_parameter_change, Direction, OrderingVerdict, Parameter,
    Regime, GRID_POINTS,
};
use crate::scenario::{build_links, db_to_linear, sample_maxima, LinkParams, ScenarioConfig};

pub(super) fn run(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    match m.experiment {
        ExperimentKind::CdfConvergence => cdf_convergence(m, out),
        ExperimentKind::CdfCompare => cdf_compare(m, out),
        ExperimentKind::IidPitfall => iid_pitfall(m, out),
        ExperimentKind::CapacitySweep => capacity_sweep(m, out),
        ExperimentKind::OutageSurface => outage_surface(m, out),
        ExperimentKind::OrderingCheck => ordering_check(m, out),
        ExperimentKind::OptimizeOutage => optimize_outage(m, out),
        ExperimentKind::OptimizeErgodic => optimize_ergodic(m, out),
        ExperimentKind::OptimizeThroughput => optimize_throughput(m, out),
        ExperimentKind::ProtocolCompare => protocol_compare(m, out),
    }
}

fn scenario(m: &ExperimentManifest, relays: usize) -> Result<ScenarioConfig> {
    m.scenario_file()?.resolve_for(relays)
}

fn base_scenario(m: &ExperimentManifest) -> Result<ScenarioConfig> {
    m.scenario_file()?.resolve()
}

fn criterion(m: &ExperimentManifest) -> BetaCriterion {
    BetaCriterion {
        count_fraction: m.settings.beta_count_fraction,
        tail_bound: m.settings.beta_tail_bound,
    }
}

fn write_curves(buf: &mut Vec<u8>, curves: &[&CdfCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(["gamma", "value", "provenance"])?;
    for c in curves {
        for (g, v) in c.grid.iter().zip(&c.values) {
            w.write_record([
                g.to_string(),
                v.to_string(),
                c.provenance.as_str().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn cdf_convergence(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let counts = relay_counts(m, &[10, 60, 200])?;
    let seed = m.sampling_seed();
    let z_grid = linear_grid(-3.0, 8.0, m.settings.grid_points);
    let gumbel = CdfCurve::from_fn(&z_grid, Provenance::EvtApprox, |z| Ok(gumbel_cdf(z)))?;
    let mut previous = f64::INFINITY;
    let mut nonincreasing = true;
    for l in counts {
        let links = build_links(&scenario(m, l)?)?;
        let maxima = sample_maxima(&links, m.monte_carlo_n, seed)?;
        let constants = auto_normalizing_constants(&links, m.settings.theta_bins, &criterion(m))?;
        let z = EmpiricalCdf::new(&normalized_max_samples(&maxima, &constants))?;
        let ks = z.ks_statistic(|x| Ok(gumbel_cdf(x)))?;
        let empirical = z.curve(&z_grid)?;
        out.file(&format!("convergence_L{l}.csv"), |buf| {
            write_curves(buf, &[&empirical, &gumbel])
        })?;
        let label = format!("L={l}");
        out.record(&label, "ks_gumbel", ks);
        out.record(&label, "a", constants.a);
        out.record(&label, "b", constants.b);
        out.record(&label, "beta", constants.beta.unwrap_or(1.0 / constants.a));
        nonincreasing &= ks <= previous;
        previous = ks;
    }
    out.record(
        "all",
        "ks_nonincreasing",
        f64::from(u8::from(nonincreasing)),
    );
    Ok(())
}

fn cdf_compare(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let counts = relay_counts(m, &[15, 20])?;
    for l in counts {
        let links = build_links(&scenario(m, l)?)?;
        let maxima = sample_maxima(&links, m.monte_carlo_n, m.sampling_seed())?;
        let emp = EmpiricalCdf::new(&maxima)?;
        let grid = quantile_grid(&emp, m.settings.grid_points)?;
        let empirical = emp.curve(&grid)?;
        let exact = CdfCurve::from_fn(&grid, Provenance::ExactProduct, |g| {
            exact_max_cdf(&links, g)
        })?;
        let approx = approx_max_curve(&links, &grid)?;
        out.file(&format!("compare_L{l}.csv"), |buf| {
            write_curves(buf, &[&empirical, &exact, &approx])
        })?;
        let label = format!("L={l}");
        out.record(&label, "ks_exact_grid", ks_distance(&exact, &empirical));
        out.record(
            &label,
            "ks_approx",
            emp.ks_statistic(|g| Ok(approx_max_cdf(&links, g)))?,
        );
        out.record(&label, "ks_exact_vs_approx", ks_distance(&exact, &approx));
    }
    Ok(())
}

/// `L` links with `θ = 1` for the first half and `θ = 3` for the rest.
pub(crate) fn half_half_links(relays: usize, nu: f64) -> Vec<LinkParams> {
    (0..relays)
        .map(|i| LinkParams {
            theta: if i < relays / 2 { 1.0 } else { 3.0 },
            nu,
            link_index: i,
        })
        .collect()
}

/// `L` links with `θ` drawn uniformly from `[1, 3]`.
pub(crate) fn uniform_theta_links(relays: usize, nu: f64, seed: u64) -> Vec<LinkParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..relays)
        .map(|i| LinkParams {
            theta: 1.0 + 2.0 * rng.random::<f64>(),
            nu,
            link_index: i,
        })
        .collect()
}

fn iid_pitfall(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let s = &m.settings;
    let families = [
        ("half", half_half_links(s.pitfall_relays, s.pitfall_nu)),
        (
            "uniform",
            uniform_theta_links(s.pitfall_relays, s.pitfall_nu, s.pitfall_theta_seed),
        ),
    ];
    for (name, links) in families {
        let baseline = mean_theta_iid_baseline(&links);
        let maxima = sample_maxima(&links, m.monte_carlo_n, m.sampling_seed())?;
        let emp = EmpiricalCdf::new(&maxima)?;
        let grid = quantile_grid(&emp, s.grid_points)?;
        let ks_inid = emp.ks_statistic(|g| Ok(approx_max_cdf(&links, g)))?;
        let ks_base = emp.ks_statistic(|g| Ok(approx_max_cdf(&baseline, g)))?;
        let empirical = emp.curve(&grid)?;
        let inid = approx_max_curve(&links, &grid)?;
        let base = approx_max_curve(&baseline, &grid)?;
        out.file(&format!("pitfall_{name}_empirical.csv"), |b| {
            write_curves(b, &[&empirical])
        })?;
        out.file(&format!("pitfall_{name}_inid.csv"), |b| {
            write_curves(b, &[&inid])
        })?;
        out.file(&format!("pitfall_{name}_baseline.csv"), |b| {
            write_curves(b, &[&base])
        })?;
        out.record(name, "ks_inid", ks_inid);
        out.record(name, "ks_mean_theta_baseline", ks_base);
        out.record(name, "ks_ratio", ks_base / ks_inid);
    }
    Ok(())
}

fn capacity_sweep(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let counts = relay_counts(m, &[10, 20, 40])?;
    let base = base_scenario(m)?;
    let sweep = if m.settings.gamma_s_sweep_dbm.is_empty() {
        vec![base.source_snr_dbm]
    } else {
        m.settings.gamma_s_sweep_dbm.clone()
    };
    let gamma_th = db_to_linear(m.settings.gamma_th_db);
    let mut rows = Vec::new();
    for &l in &counts {
        let cfg_l = scenario(m, l)?;
        for &gs in &sweep {
            let cfg = cfg_l.with_source_snr_dbm(gs);
            let links = build_links(&cfg)?;
            let report = CapacityReport::compute(&links, cfg.ts_factor, gamma_th)?;
            let maxima = sample_maxima(&links, m.monte_carlo_n, m.sampling_seed())?;
            let n = maxima.len() as f64;
            let mc_capacity = maxima.iter().map(|x| 0.5 * (1.0 + x).log2()).sum::<f64>() / n;
            let mc_outage = maxima.iter().filter(|&&x| x < gamma_th).count() as f64 / n;
            let label = format!("L={l},gamma_s={gs}");
            out.record(&label, "ergodic_capacity", report.ergodic_capacity);
            out.record(&label, "mc_ergodic_capacity", mc_capacity);
            out.record(
                &label,
                "relative_error",
                (report.ergodic_capacity - mc_capacity).abs() / mc_capacity,
            );
            rows.push((l, gs, report, mc_capacity, mc_outage));
        }
    }
    out.file("capacity.csv", |buf| {
        writeln!(
            buf,
            "L,gamma_s_dbm,ergodic_capacity,throughput,outage_probability,outage_capacity,gamma_th,quadrature_error_bound,mc_ergodic_capacity,mc_outage_probability"
        )?;
        for (l, gs, r, mc_c, mc_p) in &rows {
            writeln!(
                buf,
                "{l},{gs},{},{},{},{},{},{},{mc_c},{mc_p}",
                r.ergodic_capacity,
                r.throughput,
                r.outage_probability,
                r.outage_capacity,
                r.gamma_th,
                r.quadrature_error_bound
            )?;
        }
        Ok(())
    })
}

fn outage_surface(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let cfg = base_scenario(m)?;
    let s = &m.settings;
    let gamma_th = db_to_linear(s.gamma_th_db);
    let mut rows = Vec::new();
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for &a in &step_grid(s.alpha_max, s.factor_step) {
        for &l in &step_grid(s.lambda_max, s.factor_step) {
            let links = build_links(&cfg.with_factors(a, l))?;
            let p = outage_probability(&links, gamma_th)?;
            let c = outage_capacity(&links, gamma_th)?;
            if p < best.2 {
                best = (a, l, p);
            }
            rows.push((a, l, p, c));
        }
    }
    out.file("surface.csv", |buf| {
        writeln!(buf, "alpha,lambda,outage_probability,outage_capacity")?;
        for (a, l, p, c) in &rows {
            writeln!(buf, "{a},{l},{p},{c}")?;
        }
        Ok(())
    })?;
    out.record("grid_minimum", "alpha", best.0);
    out.record("grid_minimum", "lambda", best.1);
    out.record("grid_minimum", "outage_probability", best.2);
    Ok(())
}

fn direction_code(d: Direction) -> f64 {
    match d {
        Direction::StLarger => 1.0,
        Direction::StSmaller => -1.0,
        Direction::Indeterminate => 0.0,
    }
}

fn ordering_check(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let cfg = base_scenario(m)?;
    let regime = Regime::from_snr_db(cfg.source_snr_db());
    let changes = [
        (Parameter::SourcePower, cfg.source_snr_dbm + 3.0),
        (
            Parameter::TsFactor,
            (cfg.ts_factor + 0.2).min(m.settings.alpha_max),
        ),
        (Parameter::NoisePower, cfg.noise_power * 2.0),
        (
            Parameter::PsFactor,
            (cfg.ps_factor + 0.2).min(m.settings.lambda_max),
        ),
    ];
    let mut verdicts = Vec::new();
    for (p, new_value) in changes {
        let v = verify_parameter_change(&cfg, p, new_value, 1e-9)?;
        let predicted = predict_order(p, p.get(&cfg), new_value, regime);
        out.record(p.as_str(), "predicted", direction_code(predicted));
        out.record(p.as_str(), "observed", direction_code(v.direction));
        out.record(p.as_str(), "max_violation", v.max_violation);
        verdicts.push(v);
    }
    let links = build_links(&cfg)?;
    let grid = reference_grid(&links, GRID_POINTS)?;
    out.file("verdicts.csv", |buf| {
        OrderingVerdict::write_csv(&verdicts, buf)
    })?;
    out.file("reference_grid.csv", |buf| {
        writeln!(buf, "gamma")?;
        for g in &grid {
            writeln!(buf, "{g}")?;
        }
        Ok(())
    })
}

fn write_result(out: &mut Output, r: &OptimizationResult) -> Result<()> {
    out.file("result.csv", |buf| {
        OptimizationResult::write_csv(std::slice::from_ref(r), buf)
    })?;
    out.file("trace.csv", |buf| {
        writeln!(buf, "alpha,lambda,value")?;
        for t in &r.trace {
            writeln!(buf, "{},{},{}", t.alpha, t.lambda, t.value)?;
        }
        Ok(())
    })?;
    out.record("optimum", "alpha_star", r.alpha_star);
    out.record("optimum", "lambda_star", r.lambda_star);
    out.record("optimum", "objective_value", r.objective_value);
    out.record("optimum", "evaluations", r.evaluations as f64);
    out.record("optimum", "converged", f64::from(u8::from(r.converged)));
    Ok(())
}

fn optimize_outage(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let cfg = base_scenario(m)?;
    let s = &m.settings;
    let r = minimize_outage(&cfg, db_to_linear(s.gamma_th_db), s.alpha_max, s.lambda_max)?;
    out.record("optimum", "outage_probability", r.objective_value.exp());
    write_result(out, &r)
}

fn optimize_ergodic(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let cfg = base_scenario(m)?;
    let s = &m.settings;
    let r = maximize_ergodic(&cfg, s.alpha_max, &step_grid(s.lambda_max, s.factor_step))?;
    write_result(out, &r)
}

fn optimize_throughput(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let cfg = base_scenario(m)?;
    let s = &m.settings;
    let r = maximize_throughput(
        &cfg,
        &step_grid(s.alpha_max, s.factor_step),
        &step_grid(s.lambda_max, s.factor_step),
    )?;
    write_result(out, &r)
}

fn protocol_compare(m: &ExperimentManifest, out: &mut Output) -> Result<()> {
    let cfg = base_scenario(m)?;
    let s = &m.settings;
    let sweep = if s.gamma_s_sweep_dbm.is_empty() {
        step_grid(40.0, 5.0)
    } else {
        s.gamma_s_sweep_dbm.clone()
    };
    let options = ProtocolOptions {
        gamma_th: db_to_linear(s.gamma_th_db),
        alpha_max: s.alpha_max,
        lambda_max: s.lambda_max,
        grid_step: s.factor_step,
    };
    let rows = protocol_comparison(&cfg, &sweep, &options)?;
    for r in &rows {
        let label = format!("{},gamma_s={}", r.protocol.as_str(), r.gamma_s_dbm);
        out.record(&label, "outage_probability", r.outage_probability);
        out.record(&label, "ergodic_capacity", r.ergodic_capacity);
    }
    out.file("protocols.csv", |buf| write_protocol_csv(&rows, buf))
}
