//! Command layer shared by the terminal binary and the language bindings:
//! every operation takes a plain run configuration and produces a JSON
//! document under the `stable-hhh/1` schema plus a pass flag.  Timing and
//! other nondeterministic data live only under the document's `meta` key.

use std::time::Instant;

use serde_json::json;
use thiserror::Error;

use crate::groebner::{
    comparison_ideal, GbConfig, GroebnerError, QuotientPresentation,
};
use crate::hhh::{
    e_ring, full_hhh, hh0_specialize, poincare_series, stable_homology_presentation,
    verify_e_isomorphism, FormalMatrices, HhhError, PermError, Permutation, PoincareSeries,
};
use crate::mf::{
    build_mn, dg_square_residual, phi_chain_map_residual, simplify_mn, to_dg_module, MfError,
};
use crate::oracle::{compare, homology_with_exterior, OracleError};
use crate::poly::{Poly, Registry, TriDegree};
use crate::schubert_aij::{a_poly, z_poly_sequences, z_poly_symfun};
use crate::series::SeriesError;
use crate::symcomb::{frobenius_pairing, sym_poly, SymFamily, SymFunSpec};
use crate::table::Window;

/// Version tag carried by every emitted document.
pub const SCHEMA: &str = "stable-hhh/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Hhh(#[from] HhhError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Mf(#[from] MfError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Inputs shared by all commands; unset window pieces fall back to the
/// standard box for the rank.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: u8,
    /// Permutation in cycle notation, e.g. `"(1 2)(3)"`.
    pub perm: Option<String>,
    /// Alternative to `perm`: pick the standard block form of this type.
    pub cycle_type: Option<Vec<u8>>,
    pub q_window: Option<(i32, i32)>,
    pub t_max: Option<i32>,
    pub a_max: Option<i32>,
    /// `0` means the global worker pool.
    pub jobs: usize,
    pub spair_budget: usize,
}

impl RunConfig {
    pub fn new(n: u8) -> RunConfig {
        RunConfig {
            n,
            perm: None,
            cycle_type: None,
            q_window: None,
            t_max: None,
            a_max: None,
            jobs: 0,
            spair_budget: GbConfig::default().spair_budget,
        }
    }

    pub fn gb(&self) -> GbConfig {
        GbConfig { spair_budget: self.spair_budget }
    }

    fn check(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(CliError::Usage("rank must be at least 1".into()));
        }
        if let Some((lo, hi)) = self.q_window {
            if lo > hi {
                return Err(CliError::Usage(format!("empty q window {lo}:{hi}")));
            }
        }
        Ok(())
    }

    pub fn permutation(&self) -> Result<Permutation, CliError> {
        match (&self.perm, &self.cycle_type) {
            (Some(_), Some(_)) => Err(CliError::Usage(
                "give either a permutation or a cycle type, not both".into(),
            )),
            (Some(p), None) => Ok(Permutation::parse_cycles(p, self.n)?),
            (None, Some(ct)) => {
                let total: u32 = ct.iter().map(|&l| l as u32).sum();
                if total != self.n as u32 || ct.iter().any(|&l| l == 0) {
                    return Err(CliError::Usage(format!(
                        "cycle type {ct:?} does not partition {}",
                        self.n
                    )));
                }
                Ok(crate::hhh::permutation_of_cycle_type(self.n, ct))
            }
            (None, None) => Ok(Permutation::identity(self.n)),
        }
    }

    pub fn window(&self) -> Window {
        let std = Window::standard(self.n);
        Window {
            q_min: self.q_window.map_or(std.q_min, |(a, _)| a),
            q_max: self.q_window.map_or(std.q_max, |(_, b)| b),
            t_max: self.t_max.unwrap_or(std.t_max),
            a_max: self.a_max.unwrap_or(std.a_max),
        }
    }
}

/// A finished command: the document to print and whether checks passed.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub document: serde_json::Value,
    pub passed: bool,
}

fn deg_json(d: TriDegree) -> serde_json::Value {
    json!({"q": d.q, "t": d.t, "a": d.a})
}

fn series_json(s: &PoincareSeries) -> serde_json::Value {
    json!({
        "prefactor": deg_json(s.prefactor),
        "numerator_factors": s
            .numerator_factors
            .iter()
            .map(|&(m, c)| json!({"m": deg_json(m), "c": c}))
            .collect::<Vec<_>>(),
        "denominator_factors": s
            .denominator_factors
            .iter()
            .map(|&m| deg_json(m))
            .collect::<Vec<_>>(),
    })
}

fn finish(
    mut document: serde_json::Value,
    passed: bool,
    started: Instant,
    jobs: usize,
) -> CommandOutput {
    document["meta"] = json!({
        "elapsed_ms": started.elapsed().as_millis() as u64,
        "jobs": jobs,
    });
    CommandOutput { document, passed }
}

/// Closed presentation, series, and windowed dimension table for one twist.
pub fn cmd_compute(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let started = Instant::now();
    cfg.check()?;
    let w = cfg.permutation()?;
    let window = cfg.window();
    let pres = stable_homology_presentation(&w, &cfg.gb())?;
    let series = poincare_series(cfg.n, &w.cycle_type());
    let table = full_hhh(&pres, &window)?;
    let doc = json!({
        "schema": SCHEMA,
        "command": "compute",
        "n": cfg.n,
        "permutation": w.to_string(),
        "cycle_type": w.cycle_type(),
        "window": serde_json::to_value(window).expect("window serializes"),
        "presentation": pres.ring.to_json(),
        "shift": deg_json(pres.unit_shift),
        "exterior_degrees": pres
            .exterior_degrees
            .iter()
            .map(|&d| deg_json(d))
            .collect::<Vec<_>>(),
        "poincare_closed_form": series_json(&series),
        "expansion": table.to_json(),
    });
    Ok(finish(doc, true, started, cfg.jobs))
}

/// The flag-matrix model ring with its reduced basis, plus the report
/// comparing it against the diagonal-column quotient.
pub fn cmd_e_ring(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let started = Instant::now();
    cfg.check()?;
    let fm = FormalMatrices::new(cfg.n);
    let model = e_ring(cfg.n, &cfg.gb())?;
    let w = cfg.window();
    let report_window = Window::bigraded(w.q_min, w.q_max, w.t_max);
    let report = verify_e_isomorphism(cfg.n, &report_window, &cfg.gb())?;
    let passed = report.passed();
    let doc = json!({
        "schema": SCHEMA,
        "command": "e-ring",
        "n": cfg.n,
        "relations": fm.relations().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "presentation": model.to_json(),
        "isomorphism_report": {
            "window": serde_json::to_value(report_window).expect("window serializes"),
            "forward_images_in_quotient": report.forward_ok,
            "backward_images_in_model": report.backward_ok,
            "hilbert_mismatches": report
                .hilbert_mismatches
                .iter()
                .map(|(d, a, b)| json!({"at": deg_json(*d), "model": a, "quotient": b}))
                .collect::<Vec<_>>(),
            "passed": passed,
        },
    });
    Ok(finish(doc, passed, started, cfg.jobs))
}

/// The move-by-move simplification record of the two-alphabet factorization.
pub fn cmd_mf_simplify(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let started = Instant::now();
    cfg.check()?;
    let w = cfg.permutation()?;
    let twist = (w != Permutation::identity(cfg.n)).then_some(&w);
    let trace = simplify_mn(cfg.n, twist, &cfg.gb())?;
    let doc = json!({
        "schema": SCHEMA,
        "command": "mf-simplify",
        "n": cfg.n,
        "twist": w.to_string(),
        "trace": trace.to_json(),
    });
    Ok(finish(doc, true, started, cfg.jobs))
}

/// The identity suite at one rank: column elements reduce into the
/// comparison ideal, the two closed forms of each column element agree,
/// the trace pairing is unimodular on the dual bases, the differential
/// squares to zero, and the splitting map commutes with the differentials.
pub fn cmd_verify_identities(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let started = Instant::now();
    cfg.check()?;
    let n = cfg.n;
    let reg = Registry::xy(n);
    let base = QuotientPresentation::new(comparison_ideal(&reg, n), &cfg.gb())?;
    let mut checks: Vec<(String, bool)> = Vec::new();

    for m in 1..=n {
        let seq = z_poly_sequences(&reg, m, n);
        let sym = z_poly_symfun(&reg, m, n);
        checks.push((format!("z{m}: sequence and symmetric forms agree"), seq == sym));
        checks.push((format!("z{m}: lies in the comparison ideal"), base.contains(&seq)));
    }
    for i in 1..=n {
        let mut acc = Poly::zero(&reg);
        for j in 1..=n {
            let xj = Poly::var(&reg, &format!("x{j}"));
            let yj = Poly::var(&reg, &format!("y{j}"));
            let term = &a_poly(&reg, i, j) * &(&xj - &yj);
            acc = &acc + &term;
        }
        checks.push((format!("row {i}: weighted column sum lies in the ideal"), base.contains(&acc)));
    }
    // Trace pairing of {(-1)^i x_n^i} against {e_{n-1-j} of the head block}.
    let xreg = Registry::x_only(n);
    let xn = Poly::var(&xreg, &format!("x{n}"));
    let mut pairing_ok = true;
    for i in 0..n {
        for j in 0..n {
            let mut f = xn.pow(i as u32);
            if i % 2 == 1 {
                f = -&f;
            }
            let g = sym_poly(
                &xreg,
                &SymFunSpec {
                    family: SymFamily::Elementary,
                    k: (n - 1 - j) as i32,
                    vars: (0..(n - 1) as usize).collect(),
                },
            );
            let got = frobenius_pairing(&f, &g, n);
            let want = if i == j { Poly::one(&xreg) } else { Poly::zero(&xreg) };
            pairing_ok &= got == want;
        }
    }
    checks.push(("trace pairing is the identity matrix on dual bases".into(), pairing_ok));

    let gb = cfg.gb();
    let module = to_dg_module(&build_mn(n, None, &gb)?);
    checks.push((
        "differential squares to zero on the untwisted module".into(),
        dg_square_residual(&module).is_empty(),
    ));
    if n >= 2 {
        checks.push((
            "splitting map commutes with the differentials".into(),
            phi_chain_map_residual(n, &gb)?.is_empty(),
        ));
    }

    let passed = checks.iter().all(|(_, ok)| *ok);
    let doc = json!({
        "schema": SCHEMA,
        "command": "verify-identities",
        "n": n,
        "checks": checks
            .iter()
            .map(|(name, ok)| json!({"name": name, "ok": ok}))
            .collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(finish(doc, passed, started, cfg.jobs))
}

/// Chain-level homology against the closed series and the closed table.
pub fn cmd_verify_homology(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let started = Instant::now();
    cfg.check()?;
    let w = cfg.permutation()?;
    let window = cfg.window();
    let gb = cfg.gb();
    let pres = stable_homology_presentation(&w, &gb)?;
    let series = poincare_series(cfg.n, &w.cycle_type());
    let twist = (w != Permutation::identity(cfg.n)).then_some(&w);
    let specialized = hh0_specialize(&build_mn(cfg.n, twist, &gb)?)?;
    let oracle = homology_with_exterior(&specialized, &pres.exterior_degrees, &window, cfg.jobs)?;
    let report = compare(&oracle, &series, &window)?;
    let closed = full_hhh(&pres, &window)?;
    let closed_mismatches = oracle.restricted(&window).mismatches(&closed);
    let passed = report.agrees() && closed_mismatches.is_empty();
    let doc = json!({
        "schema": SCHEMA,
        "command": "verify-homology",
        "n": cfg.n,
        "permutation": w.to_string(),
        "window": serde_json::to_value(window).expect("window serializes"),
        "cells_checked": report.checked,
        "series_mismatches": report
            .mismatches
            .iter()
            .map(|(d, a, b)| json!({"at": deg_json(*d), "table": a, "series": b}))
            .collect::<Vec<_>>(),
        "closed_table_mismatches": closed_mismatches
            .iter()
            .take(10)
            .map(|(d, a, b)| json!({"at": deg_json(*d), "oracle": a, "closed": b}))
            .collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(finish(doc, passed, started, cfg.jobs))
}

/// Expansion of the closed series on the window.
pub fn cmd_series_expand(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let started = Instant::now();
    cfg.check()?;
    let w = cfg.permutation()?;
    let window = cfg.window();
    let series = poincare_series(cfg.n, &w.cycle_type());
    let table = series.expand(&window)?;
    let doc = json!({
        "schema": SCHEMA,
        "command": "series-expand",
        "n": cfg.n,
        "cycle_type": w.cycle_type(),
        "window": serde_json::to_value(window).expect("window serializes"),
        "series": series_json(&series),
        "table": table.to_json(),
    });
    Ok(finish(doc, true, started, cfg.jobs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compute_document_shape() {
        let mut cfg = RunConfig::new(2);
        cfg.perm = Some("(1 2)".into());
        cfg.q_window = Some((-8, 8));
        cfg.t_max = Some(4);
        cfg.a_max = Some(2);
        let out = cmd_compute(&cfg).unwrap();
        assert!(out.passed);
        let doc = &out.document;
        assert_eq!(doc["schema"], SCHEMA);
        assert_eq!(doc["command"], "compute");
        assert_eq!(doc["cycle_type"], json!([2]));
        assert_eq!(doc["shift"], json!({"q": -2, "t": 1, "a": 0}));
        assert!(doc["presentation"]["generators"].is_array());
        assert!(doc["exterior_degrees"].as_array().map_or(false, |a| a.len() == 2));
        assert!(doc["poincare_closed_form"].is_object());
        assert!(doc["expansion"].as_array().map_or(false, |a| !a.is_empty()));
        assert!(doc["meta"]["elapsed_ms"].is_u64());
    }

    #[test]
    fn rank_zero_is_a_usage_error() {
        let cfg = RunConfig::new(0);
        for result in [
            cmd_compute(&cfg),
            cmd_e_ring(&cfg),
            cmd_mf_simplify(&cfg),
            cmd_verify_identities(&cfg),
            cmd_verify_homology(&cfg),
            cmd_series_expand(&cfg),
        ] {
            assert!(matches!(result, Err(CliError::Usage(_))));
        }
    }

    #[test]
    fn empty_window_is_a_usage_error() {
        let mut cfg = RunConfig::new(2);
        cfg.q_window = Some((5, -5));
        assert!(matches!(cmd_series_expand(&cfg), Err(CliError::Usage(_))));
    }

    #[test]
    fn identity_suite_passes_small() {
        let cfg = RunConfig::new(3);
        let out = cmd_verify_identities(&cfg).unwrap();
        assert!(out.passed, "{}", out.document);
    }

    #[test]
    fn simplify_documents_are_deterministic() {
        let cfg = RunConfig::new(2);
        let a = cmd_mf_simplify(&cfg).unwrap().document;
        let b = cmd_mf_simplify(&cfg).unwrap().document;
        let strip = |mut v: serde_json::Value| {
            v.as_object_mut().unwrap().remove("meta");
            v
        };
        assert_eq!(
            serde_json::to_string(&strip(a)).unwrap(),
            serde_json::to_string(&strip(b)).unwrap()
        );
    }

    #[test]
    fn homology_verification_passes_for_a_transposition() {
        let mut cfg = RunConfig::new(2);
        cfg.perm = Some("(1 2)".into());
        cfg.q_window = Some((-10, 6));
        cfg.t_max = Some(4);
        cfg.a_max = Some(2);
        cfg.jobs = 1;
        let out = cmd_verify_homology(&cfg).unwrap();
        assert!(out.passed, "{}", out.document);
        assert_eq!(out.document["series_mismatches"], json!([]));
    }

    #[test]
    fn conflicting_permutation_inputs_are_rejected() {
        let mut cfg = RunConfig::new(3);
        cfg.perm = Some("(1 2 3)".into());
        cfg.cycle_type = Some(vec![3]);
        assert!(matches!(cmd_compute(&cfg), Err(CliError::Usage(_))));
        let mut cfg2 = RunConfig::new(3);
        cfg2.cycle_type = Some(vec![2]);
        assert!(matches!(cmd_series_expand(&cfg2), Err(CliError::Usage(_))));
    }

    #[test]
    fn series_expansion_command_reports_the_type() {
        let mut cfg = RunConfig::new(3);
        cfg.cycle_type = Some(vec![1, 2]);
        cfg.q_window = Some((-8, 4));
        cfg.t_max = Some(3);
        cfg.a_max = Some(1);
        let out = cmd_series_expand(&cfg).unwrap();
        assert!(out.passed);
        assert_eq!(out.document["cycle_type"], json!([2, 1]));
    }
}
