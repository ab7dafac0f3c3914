use bidisk_core::kernel::{negativity_search, positivity_test, Certificate, ScreenVerdict, SearchOptions};
use bidisk_core::ops::{comp_norm_sequence, is_stabilized, theorem_m_bound, SymbolPair};
use bidisk_core::sampling::{point_set, sub_rng, SAMPLE_RADIUS};
use bidisk_core::subhardy::{com_sample_sets, mate_check, theorem_com_k, Form, MatePair};
use bidisk_core::{multiplier_norm_lb, BiPoly, Complex64, KernelExpr};
use log::{debug, info};
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::CliError;

/// Rendered results of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    /// JSON report.
    pub json: String,
    /// CSV companion (comp-norm only).
    pub csv: Option<String>,
    pub exit_code: i32,
}

impl Output {
    fn json<T: Serialize>(report: &T, exit_code: i32) -> Self {
        Output { json: to_json(report), csv: None, exit_code }
    }
}

pub(crate) fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn require<'a, T>(v: &'a Option<T>, name: &str, cmd: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Config(format!("{cmd} needs --{name}")))
}

pub fn run(cfg: &RunConfig) -> Result<Output, CliError> {
    info!("running {:?} with seed {}", cfg.command, cfg.seed);
    match cfg.command {
        Command::KernelCheck => run_kernel_check(cfg),
        Command::CompNorm => run_comp_norm(cfg),
        Command::MultNorm => run_mult_norm(cfg),
        Command::MateCheck => run_mate_check(cfg),
        Command::Decompose => run_decompose(cfg),
        Command::Examples => run_examples(cfg),
    }
}

#[derive(Debug, Serialize)]
pub struct KernelCheckReport {
    pub kernel: KernelExpr,
    pub verdict: ScreenVerdict,
    pub worst_min_eig: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub trials: usize,
    pub seed: u64,
}

/// Random screen followed by a coordinate-descent search; the more
/// negative certificate wins.
pub fn kernel_check(k: &KernelExpr, cfg: &RunConfig) -> KernelCheckReport {
    let screen = positivity_test(k, cfg.trials, cfg.set_size, cfg.seed, cfg.tol);
    debug!("screen worst min eig {}", screen.worst_min_eig);
    let opts = SearchOptions { seed: cfg.seed, tol: cfg.tol, ..SearchOptions::default() };
    let searched = negativity_search(k, &opts);
    let certificate = match (screen.certificate, searched) {
        (Some(a), Some(b)) => Some(if b.value < a.value { b } else { a }),
        (a, b) => a.or(b),
    };
    let worst = certificate.as_ref().map_or(screen.worst_min_eig, |c| c.value.min(screen.worst_min_eig));
    KernelCheckReport {
        kernel: k.clone(),
        verdict: if certificate.is_some() { ScreenVerdict::NotPositive } else { ScreenVerdict::NoCounterexampleFound },
        worst_min_eig: worst,
        certificate,
        trials: screen.trials,
        seed: cfg.seed,
    }
}

fn run_kernel_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let k = match (&cfg.kernel, &cfg.phi, &cfg.psi) {
        (Some(k), _, _) => k.clone(),
        (None, Some(phi), Some(psi)) => KernelExpr::r_kernel(phi.clone(), psi.clone())?,
        _ => return Err(CliError::Config("kernel-check needs --kernel or both --phi and --psi".into())),
    };
    k.validate()?;
    let report = kernel_check(&k, cfg);
    let code = if cfg.fail_on_negative && report.verdict == ScreenVerdict::NotPositive { 2 } else { 0 };
    Ok(Output::json(&report, code))
}

#[derive(Debug, Serialize)]
pub struct CompNormSummary {
    pub stabilized: bool,
    pub last_norm: f64,
    pub bound: Option<f64>,
}

fn run_comp_norm(cfg: &RunConfig) -> Result<Output, CliError> {
    let phi = require(&cfg.phi, "phi", "comp-norm")?;
    let psi = require(&cfg.psi, "psi", "comp-norm")?;
    let b = SymbolPair::new(phi.clone(), psi.clone())?;
    let norms = comp_norm_sequence(&b, &cfg.n_list);
    let bound = theorem_m_bound(&b).ok();

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(["N", "norm", "bound"]).map_err(io)?;
    for (n, v) in cfg.n_list.iter().zip(&norms) {
        let b = bound.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([n.to_string(), v.to_string(), b]).map_err(io)?;
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| CliError::Config(e.to_string()))?)
        .expect("csv is utf-8");

    let summary = CompNormSummary {
        stabilized: is_stabilized(&norms),
        last_norm: *norms.last().expect("n_list is nonempty"),
        bound,
    };
    Ok(Output { json: to_json(&summary), csv: Some(csv), exit_code: 0 })
}

#[derive(Debug, Serialize)]
pub struct SetDelta {
    pub size: usize,
    pub delta: f64,
}

#[derive(Debug, Serialize)]
pub struct MultNormReport {
    pub kernel: KernelExpr,
    pub psi: BiPoly,
    pub seed: u64,
    pub delta_by_set_size: Vec<SetDelta>,
}

/// Pencil lower bounds for `‖M_ψ‖` on nested seeded sets of size
/// `1..=set_size`. The kernel is `--kernel`, else the `H(φ)` kernel of
/// `--phi`, else Szegő.
fn run_mult_norm(cfg: &RunConfig) -> Result<Output, CliError> {
    let psi = require(&cfg.psi, "psi", "mult-norm")?;
    let kernel = match (&cfg.kernel, &cfg.phi) {
        (Some(k), _) => k.clone(),
        (None, Some(phi)) => KernelExpr::dbr2(phi.clone())?,
        (None, None) => KernelExpr::Szego,
    };
    kernel.validate()?;
    let full = point_set(&mut sub_rng(cfg.seed, 0), cfg.set_size, SAMPLE_RADIUS);
    let delta_by_set_size = (1..=cfg.set_size)
        .map(|size| {
            let s = full.prefix(size)?;
            Ok(SetDelta { size, delta: multiplier_norm_lb(psi, &kernel, &s)? })
        })
        .collect::<Result<Vec<_>, bidisk_core::Error>>()?;
    let report = MultNormReport { kernel, psi: psi.clone(), seed: cfg.seed, delta_by_set_size };
    Ok(Output::json(&report, 0))
}

fn run_mate_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let phi = require(&cfg.phi, "phi", "mate-check")?;
    let a = require(&cfg.a, "a", "mate-check")?;
    Ok(Output::json(&mate_check(phi, a), 0))
}

fn run_decompose(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = require(&cfg.f, "f", "decompose")?;
    let form = require(&cfg.form, "form", "decompose")?;
    let d = form.decompose(f)?;
    Ok(Output::json(&d, 0))
}

#[derive(Debug, Serialize)]
pub struct Item {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ExamplesReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub items: Vec<Item>,
}

fn mate_label(form: Form) -> &'static str {
    match form {
        Form::Ex1 => "(1+z1)/2",
        Form::Ex2 => "(1+z1z2)/2",
        Form::Ex3 => "(z1+z2)/2",
    }
}

/// Polynomials used by the round-trip items.
pub fn bundled_polys() -> Vec<BiPoly> {
    let i = Complex64::new(0.0, 1.0);
    vec![
        BiPoly::z1() * BiPoly::z2(),
        &BiPoly::z1() - &BiPoly::one(),
        BiPoly::z2(),
        BiPoly::from_real_terms([(0, 0, 3.0), (2, 1, 1.0), (0, 3, -2.0)]),
        BiPoly::from_terms([(1, 1, i), (3, 0, Complex64::new(2.0, -1.0)), (0, 0, Complex64::new(-1.0, 0.0))]),
        BiPoly::from_real_terms([(4, 4, 1.0), (1, 3, -5.0), (2, 0, 7.0)]),
    ]
}

pub fn multiplier_candidates() -> Vec<(&'static str, BiPoly)> {
    vec![
        ("z1", BiPoly::z1()),
        ("z2", BiPoly::z2()),
        ("z1z2", BiPoly::z1() * BiPoly::z2()),
        ("(z1+z2)/2", BiPoly::from_real_terms([(1, 0, 0.5), (0, 1, 0.5)])),
    ]
}

fn run_examples(cfg: &RunConfig) -> Result<Output, CliError> {
    let forms = [Form::Ex1, Form::Ex2, Form::Ex3];
    let mut items = Vec::new();

    for form in forms {
        let m = form.mate();
        let r = mate_check(&m.phi, &m.a);
        items.push(Item { name: format!("mate {}", mate_label(form)), pass: r.equal, value: Some(r.max_coeff_dev) });
    }

    for form in forms {
        for (k, f) in bundled_polys().iter().enumerate() {
            let tag = format!("{form:?}").to_lowercase();
            match form.decompose(f) {
                Ok(d) => {
                    let dev = d.assemble().max_coeff_dev(f);
                    items.push(Item { name: format!("roundtrip {tag} #{k}"), pass: dev == 0.0, value: Some(dev) });
                    let sup = d.g_function().sup_norm_grid(64);
                    items.push(Item { name: format!("g sup {tag} #{k}"), pass: sup.is_finite(), value: Some(sup) });
                }
                Err(e) => {
                    info!("{tag} #{k}: {e}");
                    items.push(Item { name: format!("roundtrip {tag} #{k}"), pass: false, value: None });
                }
            }
        }
    }

    let sets = com_sample_sets(cfg.seed);
    for form in forms {
        let MatePair { phi, .. } = form.mate();
        for (label, psi) in multiplier_candidates() {
            let est = theorem_com_k(&phi, &psi, &sets)?;
            for c in [0.0, 0.9 * est.k_est] {
                let r = KernelExpr::r_kernel(phi.clone(), psi.scale_real(c))?;
                let report = kernel_check(&r, cfg);
                items.push(Item {
                    name: format!("positivity phi={} psi={c}*{label}", mate_label(form)),
                    pass: report.verdict == ScreenVerdict::NoCounterexampleFound,
                    value: Some(report.worst_min_eig),
                });
            }
        }
    }

    let r = KernelExpr::r_kernel(BiPoly::z1(), BiPoly::z1())?;
    let cert = negativity_search(&r, &SearchOptions { seed: cfg.seed, tol: cfg.tol, ..SearchOptions::default() });
    let value = cert.map(|c| c.value);
    items.push(Item { name: "counterexample B=(z1,z1)".into(), pass: value.is_some_and(|v| v <= -0.3), value });

    let failed = items.iter().filter(|i| !i.pass).count();
    let report = ExamplesReport { seed: cfg.seed, passed: items.len() - failed, failed, items };
    Ok(Output::json(&report, if failed > 0 { 2 } else { 0 }))
}
