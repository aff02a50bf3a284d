//! Dispatch from a resolved config to the library operations.

use num_bigint::BigInt;
use num_rational::BigRational;
use pqec::adaptive::{adaptive_schedule, bacon_shor_fq, baselines, optimal_shape, ShapePolicy};
use pqec::decoder::{DecodeResult, Decoder};
use pqec::metrology::{
    fit_delta, fqx_analytic, fqx_enumeration_oracle, fqx_pair_oracle, fqz_monte_carlo, sign_tally,
    theorem1_compare, theorem1_exhaustive, ContrastPoint, QfiEstimate, SignTally,
};
use pqec::noise::{ErrorPattern, ErrorSampler, PauliChannel, RngSeed};
use pqec::{build_code, build_stabilizers, CodeParams, Error, Exact, Scalar, Support};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{value_name, Command, ExperimentConfig, Method};
use crate::report::{Cell, Report};
use crate::CliError;

/// Exact rational with the same decimal expansion as `x`'s shortest
/// representation, so `0.05` becomes `1/20` rather than the nearest double.
pub fn decimal_rational(x: f64) -> Result<Exact, CliError> {
    if !x.is_finite() {
        return Err(CliError::NonFinite("input".into()));
    }
    let text = format!("{x:e}");
    let (mantissa, exp) = text.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal digits");
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    })
}

fn code_of(config: &ExperimentConfig) -> CodeParams {
    config.code.expect("resolved config has code parameters for this command")
}

fn code_columns(params: &CodeParams) -> Vec<String> {
    let [(a, _), (b, _)] = params.dims();
    vec!["family".into(), a.into(), b.into()]
}

fn code_cells(params: &CodeParams) -> Vec<Cell> {
    let [(_, a), (_, b)] = params.dims();
    vec![params.family().name().into(), a.into(), b.into()]
}

fn columns(params: &CodeParams, rest: &[&str]) -> Vec<String> {
    let mut c = code_columns(params);
    c.extend(rest.iter().map(|s| s.to_string()));
    c
}

fn grid_points(config: &ExperimentConfig) -> Vec<f64> {
    config.grid.map(|g| g.points()).unwrap_or_default()
}

/// Computes the result table for `config`. Grid points run concurrently;
/// rows keep grid order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, CliError> {
    let mut report = match config.command {
        Command::Fqx => run_fqx(config)?,
        Command::Fqz => run_fqz(config)?,
        Command::FitDelta => run_fit_delta(config)?,
        Command::Adaptive => run_adaptive(config)?,
        Command::OptimalShape => run_optimal_shape(config)?,
        Command::Theorem1 => run_theorem1(config)?,
        Command::DecodeTrace => run_decode_trace(config)?,
    };
    report.metadata.insert("command".into(), json!(config.command.name()));
    Ok(report)
}

fn run_fqx(config: &ExperimentConfig) -> Result<Report, CliError> {
    let params = code_of(config);
    let group = build_stabilizers(params)?;
    let (sql, hl) = baselines::<f64>(group.n_imprinters());
    let mut report =
        Report::new(&columns(&params, &["p", "method", "fqx", "sql", "hl", "geometry_valid", "exact_flag"]));
    let exact = config.exact && config.method != Method::Analytic;
    let values = grid_points(config)
        .into_par_iter()
        .map(|p| -> Result<(f64, f64, bool), CliError> {
            let (value, valid) = match config.method {
                Method::Analytic => {
                    let a = fqx_analytic(&params, p)?;
                    (a.value, a.geometry_valid)
                }
                Method::Pair if exact => (fqx_pair_oracle(&group, &decimal_rational(p)?)?.as_f64(), true),
                Method::Pair => (fqx_pair_oracle(&group, &p)?, true),
                Method::Enumeration if exact => {
                    (fqx_enumeration_oracle(&group, &decimal_rational(p)?)?.as_f64(), true)
                }
                Method::Enumeration => (fqx_enumeration_oracle(&group, &p)?, true),
                Method::MonteCarlo | Method::Exhaustive => unreachable!("rejected while parsing"),
            };
            Ok((p, value, valid))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let method = value_name(config.method);
    for (p, value, valid) in values {
        let mut row = code_cells(&params);
        row.extend([
            p.into(),
            method.clone().into(),
            value.into(),
            sql.into(),
            hl.into(),
            valid.into(),
            exact.into(),
        ]);
        report.push(row)?;
    }
    report.metadata.insert("baseline_count".into(), json!("imprinter stabilizers"));
    Ok(report)
}

const FQZ_COLUMNS: [&str; 11] = [
    "p",
    "n_samples",
    "n_kept",
    "n_logical",
    "contrast_D",
    "qfi",
    "stderr",
    "seed",
    "shard_count",
    "exact_flag",
    "method",
];

/// One `F_{q,Z}` value per grid point.
struct FqzPoint {
    p: f64,
    est: QfiEstimate<f64>,
}

fn exhaustive_estimate(tally: &SignTally, p: f64, exact: bool) -> Result<QfiEstimate<f64>, CliError> {
    let d = if exact { tally.contrast(&decimal_rational(p)?)?.as_f64() } else { tally.contrast(&p)? };
    let nz = tally.n_imprinters as f64;
    let plus: u64 = tally.plus.iter().sum();
    let minus: u64 = tally.minus.iter().sum();
    let logical: u64 = tally.logical.iter().sum();
    Ok(QfiEstimate {
        value: 4.0 * d * d * nz * nz,
        contrast_d: d,
        stderr: 0.0,
        n_samples: plus + minus + logical,
        n_kept: plus + minus,
        n_logical: logical,
        n_plus: plus,
        n_minus: minus,
        exact: true,
    })
}

fn analytic_fqz(params: &CodeParams, p: f64) -> Result<QfiEstimate<f64>, CliError> {
    let (value, n_z) = match *params {
        CodeParams::Ghz { n } => {
            let nz = n as f64;
            (4.0 * (1.0 - 2.0 * p).powi(2 * n as i32) * nz * nz, n)
        }
        CodeParams::BaconShor { m, n } => (bacon_shor_fq(m, n, p)?.1, m),
        _ => {
            return Err(Error::UnsupportedFamily(format!(
                "{}: no closed form for parallel noise, use monte-carlo or exhaustive",
                params.family().name()
            ))
            .into())
        }
    };
    let nz = n_z as f64;
    Ok(QfiEstimate {
        value,
        contrast_d: (value / (4.0 * nz * nz)).sqrt(),
        stderr: 0.0,
        n_samples: 0,
        n_kept: 0,
        n_logical: 0,
        n_plus: 0,
        n_minus: 0,
        exact: false,
    })
}

fn fqz_points(config: &ExperimentConfig) -> Result<(Vec<FqzPoint>, usize), CliError> {
    let params = code_of(config);
    let points = grid_points(config);
    if config.method == Method::Analytic {
        let n_z = build_stabilizers(params)?.n_imprinters();
        let out = points
            .into_iter()
            .map(|p| Ok(FqzPoint { p, est: analytic_fqz(&params, p)? }))
            .collect::<Result<Vec<_>, CliError>>()?;
        return Ok((out, n_z));
    }
    let decoder = Decoder::new(&build_code(params)?)?;
    let n_z = decoder.code().n_imprinters();
    let out = match config.method {
        Method::Exhaustive => {
            let tally = sign_tally(&decoder)?;
            points
                .into_par_iter()
                .map(|p| Ok(FqzPoint { p, est: exhaustive_estimate(&tally, p, config.exact)? }))
                .collect::<Result<Vec<_>, CliError>>()?
        }
        _ => points
            .into_par_iter()
            .map(|p| {
                let channel = PauliChannel::single(decoder.corrected_type(), p)?;
                let est = fqz_monte_carlo::<f64, f64>(
                    &decoder,
                    &channel,
                    config.n_samples,
                    config.seed,
                    config.shard_count,
                )?;
                Ok(FqzPoint { p, est })
            })
            .collect::<Result<Vec<_>, CliError>>()?,
    };
    Ok((out, n_z))
}

fn fqz_cells(config: &ExperimentConfig, pt: &FqzPoint) -> Vec<Cell> {
    let e = &pt.est;
    let mut row = code_cells(&code_of(config));
    row.extend([
        pt.p.into(),
        e.n_samples.into(),
        e.n_kept.into(),
        e.n_logical.into(),
        e.contrast_d.into(),
        e.value.into(),
        e.stderr.into(),
        config.seed.into(),
        config.shard_count.into(),
        e.exact.into(),
        value_name(config.method).into(),
    ]);
    row
}

fn fqz_metadata(report: &mut Report, n_z: usize) {
    let (sql, hl) = baselines::<f64>(n_z);
    report.metadata.insert("n_imprinters".into(), json!(n_z));
    report.metadata.insert("sql".into(), json!(sql));
    report.metadata.insert("hl".into(), json!(hl));
    report.metadata.insert("baseline_count".into(), json!("imprinter stabilizers"));
    report.metadata.insert(
        "matching".into(),
        json!("exact branch-and-bound up to 16 defects, greedy with 2-swap above"),
    );
}

fn run_fqz(config: &ExperimentConfig) -> Result<Report, CliError> {
    let (points, n_z) = fqz_points(config)?;
    let mut report = Report::new(&columns(&code_of(config), &FQZ_COLUMNS));
    for pt in &points {
        report.push(fqz_cells(config, pt))?;
    }
    fqz_metadata(&mut report, n_z);
    Ok(report)
}

fn run_fit_delta(config: &ExperimentConfig) -> Result<Report, CliError> {
    let (points, n_z) = fqz_points(config)?;
    let series: Vec<ContrastPoint<f64>> =
        points.iter().map(|pt| ContrastPoint { p: pt.p, n_z, contrast_d: pt.est.contrast_d }).collect();
    let fit = fit_delta(&series, config.window)?;
    let mut cols = FQZ_COLUMNS.to_vec();
    cols.extend(["c", "delta", "window_min", "window_max", "residual_norm"]);
    let mut report = Report::new(&columns(&code_of(config), &cols));
    for pt in &points {
        let mut row = fqz_cells(config, pt);
        row.extend([
            fit.c.into(),
            fit.delta.into(),
            fit.fit_window.0.into(),
            fit.fit_window.1.into(),
            fit.residual_norm.into(),
        ]);
        report.push(row)?;
    }
    fqz_metadata(&mut report, n_z);
    report.metadata.insert("fit_points".into(), json!(fit.n_points));
    Ok(report)
}

fn run_adaptive(config: &ExperimentConfig) -> Result<Report, CliError> {
    let grid = grid_points(config);
    let schedules = config
        .qubits
        .par_iter()
        .map(|&budget| adaptive_schedule(budget, &grid, config.n_start))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = Report::new(&["n_qubits", "p", "n", "m", "fqx", "fqz", "sql", "incremented"]);
    let mut thresholds = serde_json::Map::new();
    for s in &schedules {
        for e in &s.entries {
            report.push(vec![
                s.n_qubits.into(),
                e.p.into(),
                e.n.into(),
                e.m.into(),
                e.fqx.into(),
                e.fqz.into(),
                e.sql.into(),
                e.incremented.into(),
            ])?;
        }
        thresholds.insert(s.n_qubits.to_string(), json!(s.threshold));
    }
    report.metadata.insert("threshold".into(), thresholds.into());
    report.metadata.insert("baseline_count".into(), json!("physical qubits"));
    Ok(report)
}

fn run_optimal_shape(config: &ExperimentConfig) -> Result<Report, CliError> {
    let grid = grid_points(config);
    let jobs: Vec<(usize, f64)> =
        config.qubits.iter().flat_map(|&b| grid.iter().map(move |&p| (b, p))).collect();
    let shapes = jobs
        .into_par_iter()
        .map(|(b, p)| optimal_shape(b, p, &ShapePolicy::All).map(|s| (b, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = Report::new(&["budget", "n_qubits", "m", "n", "p", "fqx", "fqz", "sql", "hl"]);
    for (b, s) in shapes {
        report.push(vec![
            b.into(),
            s.n_qubits.into(),
            s.m.into(),
            s.n.into(),
            s.p.into(),
            s.fqx.into(),
            s.fqz.into(),
            s.sql.into(),
            s.hl.into(),
        ])?;
    }
    report.metadata.insert("shape_policy".into(), json!("all n with m = floor(N/n) >= 2"));
    report.metadata.insert("baseline_count".into(), json!("physical qubits"));
    Ok(report)
}

fn run_theorem1(config: &ExperimentConfig) -> Result<Report, CliError> {
    let params = code_of(config);
    let spec = config.channel.expect("resolved theorem1 config has a channel");
    let channel = PauliChannel::new(spec.px, spec.py, spec.pz)?;
    let decoder = Decoder::new(&build_code(params)?)?;
    let n = decoder.code().n_qubits();
    let mut report = Report::new(&columns(
        &params,
        &[
            "px",
            "py",
            "pz",
            "p_dephasing",
            "n_samples",
            "contrast_pauli",
            "contrast_dephasing",
            "difference",
            "stderr_pauli",
            "stderr_dephasing",
            "z_score",
            "seed",
            "shard_count",
            "exact_flag",
        ],
    ));
    let (a, b, se_a, se_b, z, n_samples, exact) = match config.method {
        Method::Exhaustive => {
            let (a, b) = if config.exact {
                let ch = PauliChannel::new(
                    decimal_rational(spec.px)?,
                    decimal_rational(spec.py)?,
                    decimal_rational(spec.pz)?,
                )?;
                let (a, b) = theorem1_exhaustive(&decoder, &ch)?;
                report.metadata.insert("contrasts_equal_exactly".into(), json!(a == b));
                report.metadata.insert("contrast_pauli_exact".into(), json!(a.to_string()));
                (a.as_f64(), b.as_f64())
            } else {
                theorem1_exhaustive(&decoder, &channel)?
            };
            // no sampling noise, so no z-score
            (a, b, 0.0, 0.0, Cell::Str(String::new()), 1u64 << (2 * n), true)
        }
        _ => {
            let c = theorem1_compare::<f64, f64>(
                &decoder,
                &channel,
                config.n_samples,
                config.seed,
                config.shard_count,
            )?;
            let z = c.z_score;
            (
                c.contrast_pauli,
                c.contrast_dephasing,
                c.stderr_pauli,
                c.stderr_dephasing,
                z.into(),
                config.n_samples,
                false,
            )
        }
    };
    let mut row = code_cells(&params);
    row.extend([
        spec.px.into(),
        spec.py.into(),
        spec.pz.into(),
        (spec.py + spec.pz).into(),
        n_samples.into(),
        a.into(),
        b.into(),
        (a - b).into(),
        se_a.into(),
        se_b.into(),
        z,
        config.seed.into(),
        config.shard_count.into(),
        exact.into(),
    ]);
    report.push(row)?;
    Ok(report)
}

fn joined(s: &Support) -> String {
    s.indices().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

fn run_decode_trace(config: &ExperimentConfig) -> Result<Report, CliError> {
    let params = code_of(config);
    let decoder = Decoder::new(&build_code(params)?)?;
    let n = decoder.code().n_qubits();
    let channels: Vec<PauliChannel<f64>> = match config.channel {
        Some(c) => vec![PauliChannel::new(c.px, c.py, c.pz)?],
        None => grid_points(config)
            .into_iter()
            .map(|p| PauliChannel::single(decoder.corrected_type(), p))
            .collect::<Result<_, _>>()?,
    };
    let mut report = Report::new(&columns(
        &params,
        &[
            "sample",
            "px",
            "py",
            "pz",
            "x",
            "z",
            "defects",
            "pairing",
            "correction",
            "residual_class",
            "tx_sign",
            "exact_matching",
        ],
    ));
    let k = config.shard_count as u64;
    for channel in &channels {
        let sampler = ErrorSampler::new(channel);
        let shards = (0..config.shard_count)
            .into_par_iter()
            .map(|i| {
                let size = config.n_samples / k + u64::from((i as u64) < config.n_samples % k);
                let mut rng = RngSeed::new(config.seed, i, config.shard_count)?.rng();
                (0..size)
                    .map(|_| {
                        let err = sampler.sample(&mut rng, n);
                        let res = decoder.decode(&err)?;
                        Ok((err, res))
                    })
                    .collect::<Result<Vec<(ErrorPattern, DecodeResult)>, Error>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (index, (err, res)) in shards.into_iter().flatten().enumerate() {
            let mut row = code_cells(&params);
            let pairing = res.pairing.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(";");
            let defects = res.defects.0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";");
            let class = serde_json::to_value(res.residual_class)?;
            row.extend([
                index.into(),
                channel.px.into(),
                channel.py.into(),
                channel.pz.into(),
                joined(&err.x).into(),
                joined(&err.z).into(),
                defects.into(),
                pairing.into(),
                joined(&res.correction).into(),
                class.as_str().unwrap_or_default().into(),
                (res.tx_sign as f64).into(),
                res.exact_matching.into(),
            ]);
            report.push(row)?;
        }
    }
    Ok(report)
}
