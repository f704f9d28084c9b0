//! Subcommand parameters and their execution.

use clap::{Args, ValueEnum};
use gallagher_core::arith::{balance, moebius, sieve_dk, ArithmeticSequence};
use gallagher_core::verify::{
    check_cl_selberg, check_corollary, check_gallagher_series, check_plancherel, check_theorem,
    dirichlet_series_constant, emit_plot_data, estimate_constant, instance_seed, random_dirichlet,
    random_window_instance, rng_from_seed, window_suite, SweepConfig, SweepTable,
    VerificationReport, DEFAULT_SELBERG_CAP, DEFAULT_THEOREM_CAP, THEOREM_SLACK,
};
use gallagher_core::{
    explicit_constant, ArithmeticSequence64, Inequality, KernelShape, SelbergWindow64,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{bad, check_above, check_count, check_positive, check_theta, Format};
use crate::CliError;

/// Failure records list at most this many offending items.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqKind {
    /// k-fold divisor function (see `--k`).
    Dk,
    /// Möbius function.
    Mu,
    /// The constant 1.
    One,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    /// star, star-tilde, star-star, star-star-tilde, corollary, cl-selberg or plancherel.
    #[arg(long)]
    pub inequality: Option<Inequality>,
    /// Window parameter in (0, 1) [default: 0.5].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Half-length of the t-range [default: 10; 100 for corollary].
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    /// Number of random instances [default: 100].
    #[arg(long)]
    pub trials: Option<u64>,
    /// Maximum number of terms (windowed bounds) or support length (Dirichlet polynomials)
    /// [default: 10 / 100].
    #[arg(long)]
    pub terms: Option<u64>,
    /// Tail window `y/T + kappa y/T^2` [default: 1].
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Cap on the ratio for the asymptotic bounds [default: 100; 10 for cl-selberg].
    #[arg(long)]
    pub cap: Option<f64>,
    /// Corollary range start [default: 1].
    #[arg(long = "N1")]
    #[serde(rename = "N1")]
    pub n1: Option<u64>,
    /// Corollary range end [default: 500].
    #[arg(long = "N2")]
    #[serde(rename = "N2")]
    pub n2: Option<u64>,
    /// Corollary exponent [default: 0.1].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Arithmetic function for corollary and cl-selberg [default: mu / dk].
    #[arg(long, value_enum)]
    pub seq: Option<SeqKind>,
    /// k for `--seq dk` [default: 3].
    #[arg(long)]
    pub k: Option<u32>,
    /// Selberg window N [default: 10000].
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// Selberg short-interval length [default: 10].
    #[arg(long)]
    pub h: Option<f64>,
    /// Remove a least-squares fit in powers of log n of this degree [default: k-1 for dk].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Largest n tabulated for cl-selberg [default: 3N].
    #[arg(long)]
    pub limit: Option<u64>,
    /// Report parameter used as the first CSV column.
    #[arg(long)]
    pub plot_param: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    /// star, star-tilde, star-star or star-star-tilde.
    #[arg(long)]
    pub inequality: Option<Inequality>,
    /// Comma-separated theta grid [default: 0.5].
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    /// Comma-separated T grid [default: 10].
    #[arg(long = "T", value_delimiter = ',')]
    #[serde(rename = "T")]
    pub t: Option<Vec<f64>>,
    /// Comma-separated term counts (support lengths for Dirichlet polynomials) [default: 10].
    #[arg(long, value_delimiter = ',')]
    pub terms: Option<Vec<u64>>,
    /// Random instances per grid cell [default: 100].
    #[arg(long)]
    pub trials: Option<u64>,
    /// Tail window parameter [default: 1].
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Cap for star-star-tilde [default: 100].
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelbergParams {
    /// Arithmetic function [default: dk].
    #[arg(long, value_enum)]
    pub seq: Option<SeqKind>,
    /// k for `--seq dk` [default: 3].
    #[arg(long)]
    pub k: Option<u32>,
    /// Balance with a log-polynomial fit of this degree [default: k-1 for dk].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Window N [default: 1000].
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<u64>,
    /// Comma-separated short-interval lengths [default: 10].
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    /// Largest n tabulated (and fitted) [default: 3N].
    #[arg(long)]
    pub limit: Option<u64>,
    /// Cap on the modified-integral ratio [default: 10].
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveParams {
    /// Arithmetic function [default: dk].
    #[arg(long, value_enum)]
    pub seq: Option<SeqKind>,
    /// k for `--seq dk` [default: 3].
    #[arg(long)]
    pub k: Option<u32>,
    /// Tabulate 1..=limit [default: 100].
    #[arg(long)]
    pub limit: Option<u64>,
    /// Balance with a log-polynomial fit of this degree (no balancing by default).
    #[arg(long)]
    pub degree: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlancherelParams {
    /// Window parameter in (0, 1) [default: 0.5].
    #[arg(long)]
    pub theta: Option<f64>,
    /// T [default: 2].
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    /// Number of random sums [default: 20].
    #[arg(long)]
    pub trials: Option<u64>,
    /// Maximum number of terms per sum [default: 8].
    #[arg(long)]
    pub terms: Option<u64>,
}

enum CsvSource {
    Plot {
        reports: Vec<VerificationReport>,
        parameter: String,
    },
    Table(SweepTable),
    Sequence(ArithmeticSequence64),
}

/// Everything a subcommand produces: the JSON payload, what its CSV form
/// is built from, and the failure record if an asserted check failed.
pub struct Outcome {
    payload: Value,
    csv: CsvSource,
    pub failure: Option<Value>,
}

impl Outcome {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut buf, &self.payload)
                    .map_err(|e| CliError::Io(e.to_string()))?;
                buf.push(b'\n');
            }
            Format::Csv => match &self.csv {
                CsvSource::Plot { reports, parameter } => {
                    emit_plot_data(reports, parameter, &mut buf)?
                }
                CsvSource::Table(t) => t.write_csv(&mut buf)?,
                CsvSource::Sequence(s) => s.write_csv(&mut buf)?,
            },
        }
        Ok(buf)
    }
}

fn params_value<T: Serialize>(p: &T) -> Value {
    let mut v = serde_json::to_value(p).expect("parameters serialise");
    if let Value::Object(map) = &mut v {
        map.retain(|_, x| !x.is_null());
    }
    v
}

fn summary(reports: &[VerificationReport]) -> Value {
    let passed = reports.iter().filter(|r| r.pass).count();
    let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    json!({
        "total": reports.len(),
        "passed": passed,
        "failed": reports.len() - passed,
        "max_ratio": max_ratio,
    })
}

fn report_failures(command: &str, reports: &[VerificationReport]) -> Option<Value> {
    let failed: Vec<(usize, &VerificationReport)> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.pass)
        .collect();
    if failed.is_empty() {
        return None;
    }
    let listed: Vec<Value> = failed
        .iter()
        .take(MAX_LISTED_FAILURES)
        .map(|(i, r)| {
            json!({
                "index": i,
                "inequality": r.inequality,
                "seed": r.seed,
                "lhs": r.lhs,
                "rhs": r.rhs(),
                "ratio": r.ratio,
                "constant": r.constant,
                "bound": r.bound,
            })
        })
        .collect();
    Some(json!({
        "status": "fail",
        "command": command,
        "total": reports.len(),
        "failed": failed.len(),
        "failures": listed,
    }))
}

fn reports_outcome(
    command: &str,
    inequality: Inequality,
    seed: u64,
    params: Value,
    reports: Vec<VerificationReport>,
    plot_param: String,
) -> Outcome {
    let failure = report_failures(command, &reports);
    let payload = json!({
        "command": command,
        "inequality": inequality,
        "seed": seed,
        "parameters": params,
        "summary": summary(&reports),
        "reports": reports,
    });
    Outcome {
        payload,
        csv: CsvSource::Plot {
            reports,
            parameter: plot_param,
        },
        failure,
    }
}

fn sequence(kind: SeqKind, k: u32, limit: u64) -> Result<ArithmeticSequence64, CliError> {
    Ok(match kind {
        SeqKind::Dk => sieve_dk(k, limit)?,
        SeqKind::Mu => moebius(limit)?,
        SeqKind::One => ArithmeticSequence::from_fn("one", 1, limit, |_| 1.0)?,
    })
}

fn check_k(k: u32) -> Result<(), CliError> {
    if k >= 1 {
        Ok(())
    } else {
        Err(bad("k", "must be at least 1"))
    }
}

fn check_kappa(kappa: f64, t: f64) -> Result<(), CliError> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(bad(
            "kappa",
            format!("must be finite and >= 0, got {kappa}"),
        ));
    }
    if 1.0 / t + kappa / (t * t) >= 1.0 {
        return Err(bad(
            "kappa",
            format!("1/T + kappa/T^2 must be < 1 for T = {t}"),
        ));
    }
    Ok(())
}

/// Default balancing degree: `k - 1` for `d_k`, none for the others.
fn default_degree(kind: SeqKind, k: u32) -> Option<usize> {
    match kind {
        SeqKind::Dk => Some(k as usize - 1),
        _ => None,
    }
}

pub fn verify(mut p: VerifyParams, seed: u64) -> Result<Outcome, CliError> {
    let inequality = p
        .inequality
        .ok_or_else(|| bad("inequality", "is required"))?;
    let command = "verify";
    let reports = match inequality {
        Inequality::Star | Inequality::StarTilde | Inequality::Plancherel => {
            let theta = *p.theta.get_or_insert(0.5);
            let t = *p.t.get_or_insert(10.0);
            let trials = *p.trials.get_or_insert(100);
            let terms = *p.terms.get_or_insert(10);
            check_theta("theta", theta)?;
            check_positive("T", t)?;
            check_count("trials", trials)?;
            check_count("terms", terms)?;
            if inequality == Inequality::Plancherel {
                plancherel_reports(theta, t, trials, terms, seed)?
            } else {
                window_suite(
                    inequality,
                    &[theta],
                    trials as usize,
                    seed,
                    Some(t),
                    terms as usize,
                )?
            }
        }
        Inequality::StarStar | Inequality::StarStarTilde => {
            let t = *p.t.get_or_insert(10.0);
            let trials = *p.trials.get_or_insert(100);
            let terms = *p.terms.get_or_insert(100);
            check_count("trials", trials)?;
            check_count("terms", terms)?;
            let tilde = inequality == Inequality::StarStarTilde;
            let (kappa, cap) = if tilde {
                let kappa = *p
                    .kappa
                    .get_or_insert(gallagher_core::meansquare::DEFAULT_KAPPA);
                let cap = *p.cap.get_or_insert(DEFAULT_THEOREM_CAP);
                check_above("T", t, 1.0)?;
                check_kappa(kappa, t)?;
                check_positive("cap", cap)?;
                (kappa, cap)
            } else {
                check_positive("T", t)?;
                (0.0, 0.0)
            };
            (0..trials)
                .into_par_iter()
                .map(|i| {
                    let s = instance_seed(seed, 0, i);
                    let d = random_dirichlet::<f64, _>(&mut rng_from_seed(s), terms);
                    let r = if tilde {
                        check_theorem(&d, t, kappa, cap)?
                    } else {
                        check_gallagher_series(&d, t)?
                    };
                    Ok(r.with_seed(s))
                })
                .collect::<gallagher_core::Result<Vec<_>>>()?
        }
        Inequality::Corollary => {
            let n1 = *p.n1.get_or_insert(1);
            let n2 = *p.n2.get_or_insert(500);
            let t = *p.t.get_or_insert(100.0);
            let epsilon = *p.epsilon.get_or_insert(0.1);
            let cap = *p.cap.get_or_insert(DEFAULT_THEOREM_CAP);
            let kind = *p.seq.get_or_insert(SeqKind::Mu);
            let k = *p.k.get_or_insert(3);
            check_count("N1", n1)?;
            if n2 < n1 {
                return Err(bad("N2", format!("must be >= N1 = {n1}, got {n2}")));
            }
            check_above("T", t, 1.0)?;
            check_positive("epsilon", epsilon)?;
            check_positive("cap", cap)?;
            check_k(k)?;
            let w = ArithmeticSequence::from_fn("one", 1, n2, |_| 1.0)?;
            let b = sequence(kind, k, n2)?;
            vec![check_corollary(&w, &b, n1, n2, t, epsilon, cap)?]
        }
        Inequality::ClSelberg => {
            let big_n = *p.n.get_or_insert(10_000);
            let h = *p.h.get_or_insert(10.0);
            let cap = *p.cap.get_or_insert(DEFAULT_SELBERG_CAP);
            let kind = *p.seq.get_or_insert(SeqKind::Dk);
            let k = *p.k.get_or_insert(3);
            check_k(k)?;
            if p.degree.is_none() {
                p.degree = default_degree(kind, k);
            }
            let limit = *p.limit.get_or_insert(3 * big_n);
            check_count("N", big_n)?;
            check_positive("cap", cap)?;
            let win = selberg_window(big_n, h, limit)?;
            let seq = selberg_sequence(kind, k, p.degree, limit)?;
            vec![check_cl_selberg(&seq, &win, cap)?]
        }
    };
    let default_param = match inequality {
        Inequality::ClSelberg => "h",
        _ => "T",
    };
    let plot = p
        .plot_param
        .clone()
        .unwrap_or_else(|| default_param.to_string());
    if let Some(r) = reports.first() {
        if !r.params.contains_key(&plot) {
            return Err(bad(
                "plot_param",
                format!("reports have no parameter `{plot}`"),
            ));
        }
    }
    Ok(reports_outcome(
        command,
        inequality,
        seed,
        params_value(&p),
        reports,
        plot,
    ))
}

fn selberg_window(big_n: u64, h: f64, limit: u64) -> Result<SelbergWindow64, CliError> {
    if !(h > 0.0 && h < big_n as f64) {
        return Err(bad(
            "h",
            format!("must lie in (0, N) = (0, {big_n}), got {h}"),
        ));
    }
    let win = SelbergWindow64::new(big_n, h)?;
    let (_, hi) = win.required_range();
    if limit < hi {
        return Err(bad(
            "limit",
            format!("must be at least 2N + ceil(h) = {hi}, got {limit}"),
        ));
    }
    Ok(win)
}

fn selberg_sequence(
    kind: SeqKind,
    k: u32,
    degree: Option<usize>,
    limit: u64,
) -> Result<ArithmeticSequence64, CliError> {
    let seq = sequence(kind, k, limit)?;
    Ok(match degree {
        Some(d) => balance(&seq, d)?,
        None => seq,
    })
}

fn plancherel_reports(
    theta: f64,
    t: f64,
    trials: u64,
    terms: u64,
    seed: u64,
) -> Result<Vec<VerificationReport>, CliError> {
    Ok((0..trials)
        .into_par_iter()
        .map(|i| {
            let s = instance_seed(seed, 0, i);
            let inst = random_window_instance::<f64>(s, theta, t, terms as usize)?;
            Ok(check_plancherel(&inst.sum, &inst.window)?
                .with_seed(s)
                .with_param("span", inst.span))
        })
        .collect::<gallagher_core::Result<Vec<_>>>()?)
}

pub fn sweep(mut p: SweepParams, seed: u64) -> Result<Outcome, CliError> {
    let inequality = p
        .inequality
        .ok_or_else(|| bad("inequality", "is required"))?;
    let thetas = p.theta.get_or_insert_with(|| vec![0.5]).clone();
    let ts = p.t.get_or_insert_with(|| vec![10.0]).clone();
    let terms = p.terms.get_or_insert_with(|| vec![10]).clone();
    let trials = *p.trials.get_or_insert(100);
    let kappa = *p
        .kappa
        .get_or_insert(gallagher_core::meansquare::DEFAULT_KAPPA);
    check_count("trials", trials)?;
    for (key, empty) in [
        ("theta", thetas.is_empty()),
        ("T", ts.is_empty()),
        ("terms", terms.is_empty()),
    ] {
        if empty {
            return Err(bad(key, "needs at least one value"));
        }
    }
    for &n in &terms {
        check_count("terms", n)?;
    }
    let windowed = matches!(inequality, Inequality::Star | Inequality::StarTilde);
    match inequality {
        Inequality::Star | Inequality::StarTilde => {
            for &th in &thetas {
                check_theta("theta", th)?;
            }
            for &t in &ts {
                check_positive("T", t)?;
            }
        }
        Inequality::StarStar => {
            for &t in &ts {
                check_positive("T", t)?;
            }
        }
        Inequality::StarStarTilde => {
            let cap = *p.cap.get_or_insert(DEFAULT_THEOREM_CAP);
            check_positive("cap", cap)?;
            for &t in &ts {
                check_above("T", t, 1.0)?;
                check_kappa(kappa, t)?;
            }
        }
        other => {
            return Err(bad(
                "inequality",
                format!("no sweep is defined for `{other}`"),
            ))
        }
    }
    if !windowed {
        p.theta = None;
    }

    let cfg = SweepConfig {
        thetas,
        ts,
        terms: terms.iter().map(|&n| n as usize).collect(),
        seeds: trials as usize,
        base_seed: seed,
        kappa,
    };
    let table = estimate_constant(inequality, &cfg)?;
    let shape = if inequality == Inequality::Star {
        KernelShape::Rectangular
    } else {
        KernelShape::Cesaro
    };
    let mut bounds = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        bounds.push(match inequality {
            Inequality::Star | Inequality::StarTilde => {
                explicit_constant(row.params[0], shape)? * (1.0 + THEOREM_SLACK)
            }
            Inequality::StarStar => dirichlet_series_constant() * (1.0 + THEOREM_SLACK),
            _ => p.cap.unwrap_or(DEFAULT_THEOREM_CAP),
        });
    }
    let failures: Vec<Value> = table
        .rows
        .iter()
        .zip(&bounds)
        .enumerate()
        .filter(|(_, (row, &b))| !(row.max_ratio <= b))
        .take(MAX_LISTED_FAILURES)
        .map(|(i, (row, &b))| json!({"row": i, "params": row.params, "max_ratio": row.max_ratio, "bound": b}))
        .collect();
    let failure = (!failures.is_empty()).then(|| {
        json!({
            "status": "fail",
            "command": "sweep",
            "inequality": inequality,
            "failed_rows": failures.len(),
            "failures": failures,
        })
    });
    let payload = json!({
        "command": "sweep",
        "inequality": inequality,
        "seed": seed,
        "parameters": params_value(&p),
        "columns": table.columns,
        "rows": table.rows,
        "bounds": bounds,
    });
    Ok(Outcome {
        payload,
        csv: CsvSource::Table(table),
        failure,
    })
}

pub fn selberg(mut p: SelbergParams, seed: u64) -> Result<Outcome, CliError> {
    let kind = *p.seq.get_or_insert(SeqKind::Dk);
    let k = *p.k.get_or_insert(3);
    check_k(k)?;
    if p.degree.is_none() {
        p.degree = default_degree(kind, k);
    }
    let big_n = *p.n.get_or_insert(1000);
    let hs = p.h.get_or_insert_with(|| vec![10.0]).clone();
    let limit = *p.limit.get_or_insert(3 * big_n);
    let cap = *p.cap.get_or_insert(DEFAULT_SELBERG_CAP);
    check_count("N", big_n)?;
    check_positive("cap", cap)?;
    if hs.is_empty() {
        return Err(bad("h", "needs at least one value"));
    }
    let windows = hs
        .iter()
        .map(|&h| selberg_window(big_n, h, limit))
        .collect::<Result<Vec<_>, _>>()?;
    let seq = selberg_sequence(kind, k, p.degree, limit)?;
    let reports = windows
        .par_iter()
        .map(|w| check_cl_selberg(&seq, w, cap))
        .collect::<gallagher_core::Result<Vec<_>>>()?;
    let mut out = reports_outcome(
        "selberg",
        Inequality::ClSelberg,
        seed,
        params_value(&p),
        reports,
        "h".into(),
    );
    out.payload["sequence"] = json!(seq.name());
    Ok(out)
}

pub fn sieve(mut p: SieveParams, seed: u64) -> Result<Outcome, CliError> {
    let kind = *p.seq.get_or_insert(SeqKind::Dk);
    let k = *p.k.get_or_insert(3);
    let limit = *p.limit.get_or_insert(100);
    check_k(k)?;
    check_count("limit", limit)?;
    if kind != SeqKind::Dk {
        p.k = None;
    }
    let seq = selberg_sequence(kind, k, p.degree, limit)?;
    let payload = json!({
        "command": "sieve",
        "seed": seed,
        "parameters": params_value(&p),
        "name": seq.name(),
        "n_min": seq.n_min(),
        "values": seq.values(),
    });
    Ok(Outcome {
        payload,
        csv: CsvSource::Sequence(seq),
        failure: None,
    })
}

pub fn plancherel(mut p: PlancherelParams, seed: u64) -> Result<Outcome, CliError> {
    let theta = *p.theta.get_or_insert(0.5);
    let t = *p.t.get_or_insert(2.0);
    let trials = *p.trials.get_or_insert(20);
    let terms = *p.terms.get_or_insert(8);
    check_theta("theta", theta)?;
    check_positive("T", t)?;
    check_count("trials", trials)?;
    check_count("terms", terms)?;
    let reports = plancherel_reports(theta, t, trials, terms, seed)?;
    Ok(reports_outcome(
        "plancherel",
        Inequality::Plancherel,
        seed,
        params_value(&p),
        reports,
        "span".into(),
    ))
}
