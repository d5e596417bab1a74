//! Scenario execution: resolve defaults, run the physics, measure the
//! headline quantities, write artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use num_complex::Complex64;

use oscillab_core::fockspace::{annihilation, creation, number};
use oscillab_core::lindblad::{
    evolve_rk4_with, steady_state, validate_state, DensityMatrix, EvolveOptions,
};
use oscillab_core::sde::{
    drift_correction, integrate_sle, limit_cycle_amplitude, simulate_ensemble, steady_phase_velocity,
    steps_for, AmplifierSde, EnsembleConfig, Interpretation,
};
use oscillab_core::slle::{
    build_model, linear_gain_rate, map_to_classical_sle, preset, RegimePreset, SlleParams,
};
use oscillab_core::vdp::{
    equivalence_check, hamiltonian_damping_coefficient, hamiltonian_energy,
    hamiltonian_flow_strided, integrate_vdp_strided, limit_cycle_metrics,
    quantum_commutator_check, trajectory_deviation, HamState, HamiltonianParams, VdpParams,
};

use crate::config::{ParamEcho, RunConfig, Scenario};
use crate::report::{Artifacts, Metric, RunSummary};
use crate::svg::{line_chart, Series};

/// A completed run: the summary plus where its artifacts landed.
#[derive(Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    pub svg_path: Option<PathBuf>,
}

struct Product {
    csv: String,
    metrics: Vec<Metric>,
    diagnostics: BTreeMap<String, f64>,
    svg: Option<String>,
}

/// Executes the configured scenario and writes `<scenario>-<seed>.csv`,
/// `.json` and (for time-series scenarios) `.svg` into the output
/// directory (config key, else `OSCILLAB_OUTPUT_DIR`, else the working
/// directory).
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let scenario = config.check_keys()?;
    let seed = config.seed.unwrap_or(42);
    let out_dir = match &config.output_dir {
        Some(dir) => PathBuf::from(dir),
        None => std::env::var_os("OSCILLAB_OUTPUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let mut echo = ParamEcho::default();
    echo.text("scenario", scenario.key());
    echo.int("seed", seed);

    let product = match scenario {
        Scenario::Me | Scenario::PresetA | Scenario::PresetB | Scenario::PresetC => {
            run_master_equation(scenario, config, &mut echo)?
        }
        Scenario::Sde => run_ensemble(config, seed, &mut echo)?,
        Scenario::Sle => run_classical_cycle(config, &mut echo)?,
        Scenario::Vdp => run_oscillator(config, &mut echo)?,
        Scenario::VdpHam => run_hamiltonian(config, &mut echo)?,
        Scenario::Equivalence => run_equivalence(config, &mut echo)?,
        Scenario::CommutatorCheck => run_commutator(config, &mut echo)?,
    };

    let stem = format!("{}-{}", scenario.key(), seed);
    let csv_path = out_dir.join(format!("{stem}.csv"));
    let json_path = out_dir.join(format!("{stem}.json"));
    let svg_path = product.svg.as_ref().map(|_| out_dir.join(format!("{stem}.svg")));

    // Artifact names (not paths) go into the summary so identical configs
    // produce byte-identical JSON wherever the files land.
    let summary = RunSummary {
        scenario: scenario.key().to_string(),
        parameters: echo.0,
        pass: product.metrics.iter().all(|m| m.pass),
        metrics: product.metrics,
        diagnostics: product.diagnostics,
        artifacts: Artifacts {
            csv: format!("{stem}.csv"),
            summary: format!("{stem}.json"),
            plot: svg_path.as_ref().map(|_| format!("{stem}.svg")),
        },
    };

    fs::write(&csv_path, &product.csv)
        .with_context(|| format!("writing {}", csv_path.display()))?;
    fs::write(&json_path, summary.to_json())
        .with_context(|| format!("writing {}", json_path.display()))?;
    if let (Some(path), Some(svg)) = (&svg_path, &product.svg) {
        fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    }

    Ok(RunOutcome { summary, csv_path, json_path, svg_path })
}

fn csv_table(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

fn run_master_equation(
    scenario: Scenario,
    config: &RunConfig,
    echo: &mut ParamEcho,
) -> Result<Product> {
    let gamma1 = config.gamma1.unwrap_or(1.0);
    let gamma2 = config.gamma2.unwrap_or(0.1);
    let mut params = match scenario {
        Scenario::Me => SlleParams {
            omega0: 1.0,
            gamma1,
            gamma2,
            n_up: config.n_up.expect("required key"),
            n_dn: config.n_dn.expect("required key"),
            n_upp: config.n_upp.expect("required key"),
            n_ddn: config.n_ddn.expect("required key"),
            rotating_frame: true,
        },
        Scenario::PresetA => preset(RegimePreset::QuasilinearAmplifier, gamma1, gamma2),
        Scenario::PresetB => preset(RegimePreset::PureNoiseAmplification, gamma1, gamma2),
        Scenario::PresetC => preset(RegimePreset::PhenomenologicalVanDerPol, gamma1, gamma2),
        _ => unreachable!("not a master-equation scenario"),
    };
    if scenario == Scenario::PresetA {
        if let Some(v) = config.n_up {
            params.n_up = v;
        }
        if let Some(v) = config.n_dn {
            params.n_dn = v;
        }
    }
    if let Some(w) = config.omega0 {
        params.omega0 = w;
    }
    if let Some(r) = config.rotating_frame {
        params.rotating_frame = r;
    }

    // Loss-sided preset-c stays truncation-clean at small dim (and its
    // steady-state solve is cubic in dim^2); two-photon gain spreads the
    // number distribution, so the other operating points get more levels.
    let default_dim = if scenario == Scenario::PresetC { 30 } else { 96 };
    let dim = config.dim.unwrap_or(default_dim);
    let dt = config.dt.unwrap_or(1e-3);
    let t_final = config.t_final.unwrap_or(0.5);
    let stride = config.record_stride.unwrap_or(1);
    let steps = steps_for(dt, t_final)?;
    let alpha = Complex64::new(
        config.alpha_re.unwrap_or(0.2),
        config.alpha_im.unwrap_or(0.0),
    );

    echo.num("gamma1", params.gamma1);
    echo.num("gamma2", params.gamma2);
    echo.num("n_up", params.n_up);
    echo.num("n_dn", params.n_dn);
    echo.num("n_upp", params.n_upp);
    echo.num("n_ddn", params.n_ddn);
    echo.num("omega0", params.omega0);
    echo.flag("rotating_frame", params.rotating_frame);
    echo.int("dim", dim as u64);
    echo.num("dt", dt);
    echo.num("t_final", t_final);
    echo.int("record_stride", stride as u64);
    echo.num("alpha_re", alpha.re);
    echo.num("alpha_im", alpha.im);

    let model = build_model(&params, dim)?;
    let rho0 = DensityMatrix::coherent(dim, alpha)?;
    let a = annihilation(dim)?;
    let n_op = number(dim)?;
    let adag_a2 = &creation(dim)? * &(&a * &a);
    let opts = EvolveOptions::new(dt, steps).with_stride(stride);
    let traj = evolve_rk4_with(
        &model,
        &rho0,
        &opts,
        &[("mean_a", &a), ("mean_n", &n_op), ("mean_adag_a2", &adag_a2)],
    )
    .context("master-equation evolution")?;

    let mean_a = traj.observable("mean_a").expect("recorded above");
    let mean_n = traj.observable("mean_n").expect("recorded above");
    let mean_a2 = traj.observable("mean_adag_a2").expect("recorded above");
    let n_rec = traj.times.len();

    let csv = csv_table(
        "t,re_mean_a,im_mean_a,mean_n,re_mean_adag_a2,im_mean_adag_a2,trace_err,tail_pop",
        (0..n_rec).map(|k| {
            vec![
                traj.times[k],
                mean_a[k].re,
                mean_a[k].im,
                mean_n[k].re,
                mean_a2[k].re,
                mean_a2[k].im,
                traj.trace_error[k],
                traj.tail_population[k],
            ]
        }),
    );

    let mut metrics = Vec::new();
    let mut diagnostics = BTreeMap::new();

    // d<a>/dt from centered differences on the record grid against the
    // closed two-moment form, relative to the predicted magnitude.
    let h = dt * stride as f64;
    let mut ehrenfest_gap: f64 = 0.0;
    for k in 1..n_rec - 1 {
        let fd = (mean_a[k + 1] - mean_a[k - 1]) / (2.0 * h);
        let predicted = oscillab_core::slle::amplitude_derivative_from_moments(
            &params, mean_a[k], mean_a2[k],
        );
        let gap = (fd - predicted).norm() / predicted.norm().max(1e-9);
        ehrenfest_gap = ehrenfest_gap.max(gap);
    }
    metrics.push(Metric::absolute(
        "ehrenfest_max_relative_gap",
        ehrenfest_gap,
        0.0,
        1e-6,
    ));

    let max_trace = traj.trace_error.iter().copied().fold(0.0, f64::max);
    let max_tail = traj.tail_population.iter().copied().fold(0.0, f64::max);
    let min_eig = traj.min_eigenvalue.iter().copied().fold(f64::INFINITY, f64::min);
    let final_diag = validate_state(&traj.final_state);
    metrics.push(Metric::absolute("max_trace_error", max_trace, 0.0, 1e-9));
    metrics.push(Metric::absolute(
        "final_hermiticity_residual",
        final_diag.hermiticity_residual,
        0.0,
        1e-10,
    ));
    metrics.push(Metric::absolute(
        "eigenvalue_deficit",
        (-min_eig).max(0.0),
        0.0,
        1e-8,
    ));
    metrics.push(Metric::absolute("max_tail_population", max_tail, 0.0, 1e-6));

    // Balanced two-quantum channels close the mean-amplitude equation, so
    // the whole curve is a pure exponential at the linear gain rate.
    if params.n_upp == params.n_ddn && alpha.norm_sqr() > 0.0 {
        let target = linear_gain_rate(&params);
        let measured =
            (mean_a[n_rec - 1].norm() / mean_a[0].norm()).ln() / (traj.times[n_rec - 1]);
        metrics.push(Metric::absolute(
            "mean_amplitude_growth_rate",
            measured,
            target,
            1e-3,
        ));
        let mut fit_gap: f64 = 0.0;
        for k in 0..n_rec {
            let want = mean_a[0].norm() * (target * traj.times[k]).exp();
            fit_gap = fit_gap.max((mean_a[k].norm() - want).abs() / want);
        }
        metrics.push(Metric::absolute(
            "exponential_fit_max_relative_error",
            fit_gap,
            0.0,
            1e-3,
        ));
    }

    // The fully polarized preset has a unique steady state; in it the
    // one-quantum gain balances the two-quantum loss moment for moment.
    if scenario == Scenario::PresetC {
        let rho_ss = steady_state(&model).context("steady-state solve")?;
        let n2 = &n_op * &n_op;
        let mean_n_ss = n_op.expectation(&rho_ss)?.re;
        let mean_n2_ss = n2.expectation(&rho_ss)?.re;
        let lhs = params.kappa_up() * (mean_n_ss + 1.0);
        let rhs = 2.0 * params.kappa_ddn() * (mean_n2_ss - mean_n_ss);
        metrics.push(Metric::relative("steady_gain_loss_balance", lhs, rhs, 1e-6));
        diagnostics.insert("steady_mean_photons".into(), mean_n_ss);
    }

    diagnostics.insert("final_mean_photons".into(), mean_n[n_rec - 1].re);
    diagnostics.insert("final_abs_mean_a".into(), mean_a[n_rec - 1].norm());
    diagnostics.insert("min_eigenvalue".into(), min_eig);
    diagnostics.insert("linear_gain_rate".into(), linear_gain_rate(&params));
    let coeffs = map_to_classical_sle(&params);
    diagnostics.insert("classical_lambda1_re".into(), coeffs.lambda1.re);
    diagnostics.insert("classical_lambda1_im".into(), coeffs.lambda1.im);
    diagnostics.insert("classical_lambda2_re".into(), coeffs.lambda2.re);

    let abs_a: Vec<f64> = (0..n_rec).map(|k| mean_a[k].norm()).collect();
    let ns: Vec<f64> = (0..n_rec).map(|k| mean_n[k].re).collect();
    let svg = line_chart(
        "master equation expectations",
        "t",
        "value",
        &[
            Series { label: "|<a>|", x: &traj.times, y: &abs_a },
            Series { label: "<n>", x: &traj.times, y: &ns },
        ],
    );

    Ok(Product { csv, metrics, diagnostics, svg: Some(svg) })
}

fn run_ensemble(config: &RunConfig, seed: u64, echo: &mut ParamEcho) -> Result<Product> {
    let gamma1 = config.gamma1.unwrap_or(0.0);
    let n_up = config.n_up.unwrap_or(0.0);
    let n_dn = config.n_dn.unwrap_or(0.0);
    let interpretation: Interpretation = config
        .interpretation
        .as_deref()
        .expect("required key")
        .parse()?;
    let sde = AmplifierSde {
        kappa_up: gamma1 * n_up,
        kappa_dn: gamma1 * n_dn,
        sigma_v2: config.sigma_v2.unwrap_or(0.0),
        sigma_w2: config.sigma_w2.expect("required key"),
        interpretation,
    };
    let cfg = EnsembleConfig {
        n_traj: config.n_traj.unwrap_or(10_000),
        dt: config.dt.unwrap_or(1e-2),
        t_final: config.t_final.unwrap_or(1.0),
        seed,
        record_stride: config.record_stride.unwrap_or(10),
    };
    let alpha = Complex64::new(
        config.alpha_re.unwrap_or(0.2),
        config.alpha_im.unwrap_or(0.0),
    );

    echo.num("gamma1", gamma1);
    echo.num("n_up", n_up);
    echo.num("n_dn", n_dn);
    echo.num("sigma_v2", sde.sigma_v2);
    echo.num("sigma_w2", sde.sigma_w2);
    echo.text("interpretation", &interpretation.to_string());
    echo.int("n_traj", cfg.n_traj as u64);
    echo.num("dt", cfg.dt);
    echo.num("t_final", cfg.t_final);
    echo.int("record_stride", cfg.record_stride as u64);
    echo.num("alpha_re", alpha.re);
    echo.num("alpha_im", alpha.im);

    let stats = simulate_ensemble(&sde, alpha, &cfg).context("ensemble simulation")?;
    let n_rec = stats.times.len();

    let csv = csv_table(
        "t,re_mean,im_mean,mean_abs2,stderr_re,stderr_im,re_corr,im_corr",
        (0..n_rec).map(|k| {
            vec![
                stats.times[k],
                stats.mean_amplitude[k].re,
                stats.mean_amplitude[k].im,
                stats.mean_sq_amplitude[k],
                stats.stderr_re[k],
                stats.stderr_im[k],
                stats.correlation[k].re,
                stats.correlation[k].im,
            ]
        }),
    );

    let mut metrics = Vec::new();
    let strat = interpretation == Interpretation::Stratonovich;
    if alpha.norm_sqr() > 0.0 {
        let (rate, se) = stats.growth_rate();
        let target = 0.5 * (sde.kappa_up - sde.kappa_dn)
            + if strat { drift_correction(&sde) } else { 0.0 };
        // 3 standard errors plus the scheme's O(dt) rate bias allowance.
        let tol = 3.0 * se + cfg.dt * target * target + 1e-12;
        metrics.push(Metric::absolute("mean_growth_rate", rate, target, tol));
    }

    let last = n_rec - 1;
    let c_measured = stats.correlation[last];
    let c_target = if strat {
        -Complex64::i() * sde.sigma_w2 * stats.mean_amplitude[last].conj()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let corr_se = (stats.corr_stderr_re[last].powi(2) + stats.corr_stderr_im[last].powi(2)).sqrt();
    let mean_se = (stats.stderr_re[last].powi(2) + stats.stderr_im[last].powi(2)).sqrt();
    let tol = 3.0 * corr_se + 3.0 * sde.sigma_w2 * mean_se + 1e-12;
    metrics.push(Metric::absolute(
        "noise_correlation_gap",
        (c_measured - c_target).norm(),
        0.0,
        tol,
    ));

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("kappa_up".into(), sde.kappa_up);
    diagnostics.insert("kappa_dn".into(), sde.kappa_dn);
    diagnostics.insert("drift_correction".into(), drift_correction(&sde));
    diagnostics.insert("final_mean_abs2".into(), stats.mean_sq_amplitude[last]);
    diagnostics.insert("trajectories".into(), stats.n_traj as f64);

    let abs_mean: Vec<f64> = stats.mean_amplitude.iter().map(|z| z.norm()).collect();
    let rms: Vec<f64> = stats.mean_sq_amplitude.iter().map(|v| v.sqrt()).collect();
    let svg = line_chart(
        "amplifier ensemble",
        "t",
        "amplitude",
        &[
            Series { label: "|E a|", x: &stats.times, y: &abs_mean },
            Series { label: "sqrt(E |a|^2)", x: &stats.times, y: &rms },
        ],
    );

    Ok(Product { csv, metrics, diagnostics, svg: Some(svg) })
}

fn run_classical_cycle(config: &RunConfig, echo: &mut ParamEcho) -> Result<Product> {
    let params = SlleParams {
        omega0: config.omega0.unwrap_or(1.0),
        gamma1: config.gamma1.expect("required key"),
        gamma2: config.gamma2.expect("required key"),
        n_up: config.n_up.expect("required key"),
        n_dn: config.n_dn.expect("required key"),
        n_upp: config.n_upp.expect("required key"),
        n_ddn: config.n_ddn.expect("required key"),
        // The lab frame keeps the rotation visible in the phase velocity.
        rotating_frame: config.rotating_frame.unwrap_or(false),
    };
    params.validate()?;
    let dt = config.dt.unwrap_or(1e-3);
    let t_final = config.t_final.unwrap_or(30.0);
    let stride = config.record_stride.unwrap_or(10);
    let steps = steps_for(dt, t_final)?;
    anyhow::ensure!(
        stride > 0 && steps % stride == 0,
        "record_stride must divide the {steps} steps"
    );
    let alpha = Complex64::new(
        config.alpha_re.unwrap_or(0.1),
        config.alpha_im.unwrap_or(0.0),
    );

    echo.num("gamma1", params.gamma1);
    echo.num("gamma2", params.gamma2);
    echo.num("n_up", params.n_up);
    echo.num("n_dn", params.n_dn);
    echo.num("n_upp", params.n_upp);
    echo.num("n_ddn", params.n_ddn);
    echo.num("omega0", params.omega0);
    echo.flag("rotating_frame", params.rotating_frame);
    echo.num("dt", dt);
    echo.num("t_final", t_final);
    echo.int("record_stride", stride as u64);
    echo.num("alpha_re", alpha.re);
    echo.num("alpha_im", alpha.im);

    let coeffs = map_to_classical_sle(&params);
    let traj = integrate_sle(&coeffs, alpha, dt, t_final).context("limit-cycle integration")?;
    let radius_target = limit_cycle_amplitude(&coeffs)?;
    let velocity_target = steady_phase_velocity(&coeffs)?;
    let radius = traj.alpha.last().expect("nonempty").norm();
    let velocity = traj.tail_phase_velocity(0.25);

    let metrics = vec![
        Metric::absolute("final_amplitude", radius, radius_target, 1e-6),
        Metric::absolute("tail_phase_velocity", velocity, velocity_target, 1e-4),
    ];

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("lambda1_re".into(), coeffs.lambda1.re);
    diagnostics.insert("lambda1_im".into(), coeffs.lambda1.im);
    diagnostics.insert("lambda2_re".into(), coeffs.lambda2.re);
    diagnostics.insert("lambda2_im".into(), coeffs.lambda2.im);

    let rows: Vec<usize> = (0..traj.times.len()).step_by(stride).collect();
    let csv = csv_table(
        "t,re_alpha,im_alpha,abs_alpha",
        rows.iter().map(|&k| {
            vec![
                traj.times[k],
                traj.alpha[k].re,
                traj.alpha[k].im,
                traj.alpha[k].norm(),
            ]
        }),
    );

    let ts: Vec<f64> = rows.iter().map(|&k| traj.times[k]).collect();
    let res: Vec<f64> = rows.iter().map(|&k| traj.alpha[k].re).collect();
    let abs: Vec<f64> = rows.iter().map(|&k| traj.alpha[k].norm()).collect();
    let svg = line_chart(
        "classical amplitude equation",
        "t",
        "amplitude",
        &[
            Series { label: "Re alpha", x: &ts, y: &res },
            Series { label: "|alpha|", x: &ts, y: &abs },
        ],
    );

    Ok(Product { csv, metrics, diagnostics, svg: Some(svg) })
}

fn run_oscillator(config: &RunConfig, echo: &mut ParamEcho) -> Result<Product> {
    let params = VdpParams {
        mu: config.mu.expect("required key"),
        omega0: config.omega0.unwrap_or(1.0),
    };
    let x0 = config.x0.unwrap_or(1.0);
    let v0 = config.v0.unwrap_or(0.0);
    let dt = config.dt.unwrap_or(1e-3);
    let t_final = config.t_final.unwrap_or(50.0);
    let stride = config.record_stride.unwrap_or(10);

    echo.num("mu", params.mu);
    echo.num("omega0", params.omega0);
    echo.num("x0", x0);
    echo.num("v0", v0);
    echo.num("dt", dt);
    echo.num("t_final", t_final);
    echo.int("record_stride", stride as u64);

    let traj = integrate_vdp_strided(&params, x0, v0, dt, t_final, stride)
        .context("oscillator integration")?;
    let coarse = limit_cycle_metrics(&traj, 0.5).context("limit-cycle extraction")?;
    let halved = integrate_vdp_strided(&params, x0, v0, dt / 2.0, t_final, stride * 2)
        .context("step-halved rerun")?;
    let fine = limit_cycle_metrics(&halved, 0.5)?;

    let mut metrics = vec![
        Metric::absolute("limit_cycle_amplitude", coarse.amplitude, fine.amplitude, 1e-6),
        Metric::absolute("limit_cycle_period", coarse.period, fine.period, 1e-6),
    ];
    if params.mu == 0.0 {
        let radius = (x0 * x0 + (v0 / params.omega0).powi(2)).sqrt();
        metrics.push(Metric::absolute("harmonic_amplitude", coarse.amplitude, radius, 1e-6));
        metrics.push(Metric::absolute(
            "harmonic_period",
            coarse.period,
            std::f64::consts::TAU / params.omega0,
            1e-6,
        ));
    }

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("amplitude_maxima".into(), coarse.maxima_count as f64);
    diagnostics.insert("zero_crossings".into(), coarse.crossing_count as f64);

    let csv = csv_table(
        "t,x,v",
        (0..traj.times.len()).map(|k| vec![traj.times[k], traj.x[k], traj.v[k]]),
    );
    let svg = line_chart(
        "van der Pol oscillator",
        "t",
        "x",
        &[Series { label: "x(t)", x: &traj.times, y: &traj.x }],
    );

    Ok(Product { csv, metrics, diagnostics, svg: Some(svg) })
}

fn run_hamiltonian(config: &RunConfig, echo: &mut ParamEcho) -> Result<Product> {
    let params = HamiltonianParams {
        lambda: config.lambda.expect("required key"),
        omega0: config.omega0.unwrap_or(1.0),
    };
    let s0 = HamState {
        x: config.x0.unwrap_or(1.0),
        px: config.px0.unwrap_or(0.1),
        y: config.y0.unwrap_or(0.3),
        py: config.v0.unwrap_or(0.0),
    };
    let dt = config.dt.unwrap_or(1e-3);
    let t_final = config.t_final.unwrap_or(50.0);
    let stride = config.record_stride.unwrap_or(10);

    echo.num("lambda", params.lambda);
    echo.num("omega0", params.omega0);
    echo.num("x0", s0.x);
    echo.num("v0", s0.py);
    echo.num("y0", s0.y);
    echo.num("px0", s0.px);
    echo.num("dt", dt);
    echo.num("t_final", t_final);
    echo.int("record_stride", stride as u64);

    let traj = hamiltonian_flow_strided(&params, &s0, dt, t_final, stride)
        .context("hamiltonian integration")?;
    let sec = traj.secondary.as_ref().expect("full system recorded");

    let e0 = hamiltonian_energy(&params, &s0);
    let drift = (0..traj.times.len())
        .map(|k| {
            let s = HamState { x: traj.x[k], px: sec.px[k], y: sec.y[k], py: traj.v[k] };
            (hamiltonian_energy(&params, &s) - e0).abs()
        })
        .fold(0.0, f64::max);
    let drift_per_10 = drift / (t_final / 10.0);

    // Rerun with a displaced auxiliary pair: the oscillator half must not
    // move, the coupling being one-directional.
    let displaced = HamState { y: s0.y + 0.5, px: s0.px - 0.3, ..s0 };
    let other = hamiltonian_flow_strided(&params, &displaced, dt, t_final, stride)?;
    let x_shift = traj
        .x
        .iter()
        .zip(&other.x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let metrics = vec![
        Metric::absolute("energy_drift_per_10_units", drift_per_10, 0.0, 1e-8),
        Metric::absolute("oscillator_invariance_to_auxiliary", x_shift, 0.0, 1e-10),
    ];

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("initial_energy".into(), e0);
    diagnostics.insert(
        "derived_damping_mu".into(),
        hamiltonian_damping_coefficient(params.lambda),
    );

    let csv = csv_table(
        "t,x,v,y,px,py",
        (0..traj.times.len()).map(|k| {
            vec![traj.times[k], traj.x[k], traj.v[k], sec.y[k], sec.px[k], traj.v[k]]
        }),
    );
    let svg = line_chart(
        "hamiltonian embedding",
        "t",
        "coordinate",
        &[
            Series { label: "x(t)", x: &traj.times, y: &traj.x },
            Series { label: "y(t)", x: &traj.times, y: &sec.y },
        ],
    );

    Ok(Product { csv, metrics, diagnostics, svg: Some(svg) })
}

fn run_equivalence(config: &RunConfig, echo: &mut ParamEcho) -> Result<Product> {
    let params = HamiltonianParams {
        lambda: config.lambda.expect("required key"),
        omega0: config.omega0.unwrap_or(1.0),
    };
    let x0 = config.x0.unwrap_or(2.0);
    let v0 = config.v0.unwrap_or(0.0);
    let dt = config.dt.unwrap_or(1e-4);
    let t_final = config.t_final.unwrap_or(60.0);
    let stride = config.record_stride.unwrap_or(100);

    echo.num("lambda", params.lambda);
    echo.num("omega0", params.omega0);
    echo.num("x0", x0);
    echo.num("v0", v0);
    echo.num("dt", dt);
    echo.num("t_final", t_final);
    echo.int("record_stride", stride as u64);

    let deviation =
        equivalence_check(&params, x0, v0, dt, t_final).context("equivalence run")?;
    let control = trajectory_deviation(
        &VdpParams { mu: params.lambda, omega0: params.omega0 },
        &params,
        x0,
        v0,
        dt,
        t_final,
    )
    .context("factor-two control run")?;

    let metrics = vec![
        Metric::absolute("reduction_max_deviation", deviation, 0.0, 1e-6),
        Metric::exceeds("factor_two_control_deviation", control, 1e-2),
    ];

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert(
        "derived_damping_mu".into(),
        hamiltonian_damping_coefficient(params.lambda),
    );

    let reduced = VdpParams {
        mu: hamiltonian_damping_coefficient(params.lambda),
        omega0: params.omega0,
    };
    let traj = integrate_vdp_strided(&reduced, x0, v0, dt, t_final, stride)?;
    let csv = csv_table(
        "t,x,v",
        (0..traj.times.len()).map(|k| vec![traj.times[k], traj.x[k], traj.v[k]]),
    );
    let svg = line_chart(
        "reduced oscillator",
        "t",
        "x",
        &[Series { label: "x(t)", x: &traj.times, y: &traj.x }],
    );

    Ok(Product { csv, metrics, diagnostics, svg: Some(svg) })
}

fn run_commutator(config: &RunConfig, echo: &mut ParamEcho) -> Result<Product> {
    let params = HamiltonianParams {
        lambda: config.lambda.unwrap_or(0.3),
        omega0: config.omega0.unwrap_or(1.0),
    };
    let dim = config.dim.unwrap_or(12);

    echo.num("lambda", params.lambda);
    echo.num("omega0", params.omega0);
    echo.int("dim", dim as u64);

    let report = quantum_commutator_check(&params, dim).context("operator-identity check")?;

    let metrics = vec![
        Metric::absolute(
            "position_equation_residual",
            report.position_residual,
            0.0,
            1e-10,
        ),
        Metric::absolute(
            "momentum_equation_residual",
            report.momentum_residual,
            0.0,
            1e-10,
        ),
    ];

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("position_residual_full".into(), report.position_residual_full);
    diagnostics.insert("momentum_residual_full".into(), report.momentum_residual_full);
    diagnostics.insert("hamiltonian_hermiticity_defect".into(), report.hamiltonian_hermiticity);

    let mut csv = String::from("quantity,value\n");
    for (name, value) in [
        ("position_residual_interior", report.position_residual),
        ("momentum_residual_interior", report.momentum_residual),
        ("position_residual_full", report.position_residual_full),
        ("momentum_residual_full", report.momentum_residual_full),
        ("hermiticity_defect", report.hamiltonian_hermiticity),
    ] {
        csv.push_str(&format!("{name},{value}\n"));
    }

    Ok(Product { csv, metrics, diagnostics, svg: None })
}
