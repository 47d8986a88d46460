//! Command implementations and report types for the `slink` binary.
//!
//! Everything user-visible lives here so integration tests can re-parse
//! structured output into the same types the binary serialized.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use slink::{
    bing_double_ds_bound, builtin_matrix, char_poly_at, char_poly_display, connected_sum,
    default_test_set, form_from_matrix, hyperbolic_obstruction, scan_pretzel_grid,
    search_metabolizer, signature_at, signature_at_numeric, signature_profile, CirclePoint,
    Epsilon, HyperbolicVerdict, IntMat, PretzelScanRow, RootOfUnity, SeifertMatrix, Sublattice,
};
use std::fmt::Write as _;
use std::fs;

/// Output rendering selected by `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Human-readable report.
    Text,
    /// Comma-separated rows with a header line.
    Csv,
    /// JSON that round-trips through the report types.
    Structured,
}

/// A finished command: what to emit and whether checks failed.
///
/// `failed` distinguishes a mathematical failure (exit 1) from the usage and
/// IO errors reported through `Err` (exit 2).
pub struct Outcome {
    pub rendered: String,
    pub failed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub matrix: String,
    pub omega: String,
    pub mode: String,
    pub value: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char_poly: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsBoundCliReport {
    pub matrix: String,
    pub bound: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<(String, i64)>,
    pub tested_points: Vec<String>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormCheckReport {
    pub matrix: String,
    pub rank: usize,
    pub epsilon: String,
    pub axioms_pass: bool,
    pub axioms_detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Vec<i64>>>,
    pub metabolizer_bound: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metabolizer: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metabolizer_display: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperbolic_verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperbolic_witness: Option<(String, i64)>,
    #[serde(default)]
    pub tested_points: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub matrix: String,
    pub resolution: u64,
    /// Open arcs (from, to, value), counterclockwise from 1.
    pub arcs: Vec<(String, String, i64)>,
    /// Values exactly at the jump candidates.
    pub point_values: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub p_max: u32,
    pub n_max: u32,
    pub rows: Vec<PretzelScanRow>,
    pub all_agree: bool,
}

/// Parses a matrix argument: a built-in name, a TOML file path, an inline
/// `[[..],[..]]` literal, or a `#`-joined connected sum of those.
pub fn parse_matrix_spec(spec: &str, epsilon: Option<Epsilon>) -> Result<SeifertMatrix> {
    let mut acc: Option<SeifertMatrix> = None;
    for part in spec.split('#') {
        let m = parse_matrix_token(part.trim(), epsilon)?;
        acc = Some(match acc {
            None => m,
            Some(a) => connected_sum(&a, &m)
                .with_context(|| format!("cannot form the connected sum {spec:?}"))?,
        });
    }
    acc.ok_or_else(|| anyhow!("empty matrix argument"))
}

fn parse_matrix_token(token: &str, epsilon: Option<Epsilon>) -> Result<SeifertMatrix> {
    if token.starts_with('[') {
        let rows: Vec<Vec<i64>> = serde_json::from_str(token)
            .with_context(|| format!("cannot parse inline matrix {token:?}"))?;
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                bail!("inline matrix {token:?} has rows of unequal length");
            }
        }
        let psi = IntMat::from_rows(&rows);
        return Ok(SeifertMatrix::new(psi, epsilon.unwrap_or(Epsilon::Minus))?);
    }
    if let Some(m) = builtin_matrix(token) {
        return with_epsilon(m, epsilon);
    }
    let text = fs::read_to_string(token).with_context(|| {
        format!("cannot load matrix {token:?}: not a built-in name or a readable file")
    })?;
    let (_, m) = SeifertMatrix::from_toml_str(&text)
        .with_context(|| format!("cannot parse matrix file {token:?}"))?;
    with_epsilon(m, epsilon)
}

fn with_epsilon(m: SeifertMatrix, epsilon: Option<Epsilon>) -> Result<SeifertMatrix> {
    match epsilon {
        Some(e) if e != m.epsilon() => Ok(SeifertMatrix::new(m.psi().clone(), e)?),
        _ => Ok(m),
    }
}

/// Parses `--test-set`: `auto` derives jump candidates plus arc midpoints
/// from the matrix; otherwise a comma-separated list of `k/m` fractions.
pub fn resolve_test_set(
    m: &SeifertMatrix,
    spec: &str,
    resolution: u64,
) -> Result<Vec<RootOfUnity>> {
    if spec.trim() == "auto" {
        return Ok(default_test_set(m, resolution));
    }
    let points: Vec<RootOfUnity> = spec
        .split(',')
        .map(|t| t.trim().parse::<RootOfUnity>().map_err(Into::into))
        .collect::<Result<_>>()?;
    if points.is_empty() {
        bail!("test set must contain at least one point");
    }
    Ok(points)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn int_rows(m: &IntMat) -> Result<Vec<Vec<i64>>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    i64::try_from(m.get(i, j)).map_err(|_| anyhow!("matrix entry exceeds i64"))
                })
                .collect()
        })
        .collect()
}

fn render_rows(rows: &[Vec<i64>]) -> String {
    serde_json::to_string(rows).expect("plain integers serialize")
}

fn sublattice_vectors(l: &Sublattice) -> Result<Vec<Vec<i64>>> {
    (0..l.rank())
        .map(|j| {
            l.basis_vector(j)
                .iter()
                .map(|c| i64::try_from(c).map_err(|_| anyhow!("basis entry exceeds i64")))
                .collect()
        })
        .collect()
}

fn circle_label(p: &CirclePoint) -> String {
    p.to_string()
}

fn to_json(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn cmd_signature(
    matrix_spec: &str,
    omega: &str,
    numeric: bool,
    precision: u32,
    format: Format,
) -> Result<Outcome> {
    let m = parse_matrix_spec(matrix_spec, None)?;
    let w: RootOfUnity = omega.parse()?;
    let report = if numeric {
        SignatureReport {
            matrix: matrix_spec.to_string(),
            omega: w.to_string(),
            mode: "numeric".to_string(),
            value: signature_at_numeric(&m, w, precision)?,
            precision: Some(precision),
            char_poly: None,
        }
    } else {
        SignatureReport {
            matrix: matrix_spec.to_string(),
            omega: w.to_string(),
            mode: "exact".to_string(),
            value: signature_at(&m, w),
            precision: None,
            char_poly: Some(char_poly_display(&char_poly_at(&m, w))),
        }
    };
    let rendered = match format {
        Format::Text => format!("{}\n", report.value),
        Format::Csv => format!(
            "matrix,omega,mode,value\n{},{},{},{}\n",
            csv_field(&report.matrix),
            report.omega,
            report.mode,
            report.value
        ),
        Format::Structured => to_json(&report)?,
    };
    Ok(Outcome { rendered, failed: false })
}

pub fn cmd_ds_bound(
    matrix_spec: &str,
    test_set: &str,
    resolution: u64,
    format: Format,
) -> Result<Outcome> {
    let m = parse_matrix_spec(matrix_spec, None)?;
    let points = resolve_test_set(&m, test_set, resolution)?;
    let r = bing_double_ds_bound(&m, &points);
    let report = DsBoundCliReport {
        matrix: matrix_spec.to_string(),
        bound: r.bound,
        witness: r.witness.map(|(w, v)| (w.to_string(), v)),
        tested_points: r.tested_points.iter().map(ToString::to_string).collect(),
        note: r.note.clone(),
    };
    let rendered = match format {
        Format::Text => {
            let mut s = format!("bound: {}\n", report.bound);
            match &report.witness {
                Some((w, v)) => {
                    let _ = writeln!(s, "witness: omega = {w}, signature = {v}");
                }
                None => s.push_str("witness: none\n"),
            }
            let _ = writeln!(s, "tested: {}", report.tested_points.join(", "));
            let _ = writeln!(s, "note: {}", report.note);
            s
        }
        Format::Csv => {
            let (w, v) = match &report.witness {
                Some((w, v)) => (w.clone(), v.to_string()),
                None => (String::new(), String::new()),
            };
            format!(
                "matrix,bound,witness_omega,witness_signature\n{},{},{},{}\n",
                csv_field(&report.matrix),
                report.bound,
                w,
                v
            )
        }
        Format::Structured => to_json(&report)?,
    };
    Ok(Outcome { rendered, failed: false })
}

pub fn cmd_form_check(
    matrix_spec: &str,
    epsilon: &str,
    bound: i64,
    test_set: &str,
    resolution: u64,
    format: Format,
) -> Result<Outcome> {
    let eps: Epsilon = epsilon.parse()?;
    let m = parse_matrix_spec(matrix_spec, Some(eps))?;
    let mut report = FormCheckReport {
        matrix: matrix_spec.to_string(),
        rank: m.rank(),
        epsilon: eps.to_string(),
        axioms_pass: false,
        axioms_detail: String::new(),
        b: None,
        t: None,
        metabolizer_bound: bound,
        metabolizer: None,
        metabolizer_display: None,
        hyperbolic_verdict: None,
        hyperbolic_witness: None,
        tested_points: Vec::new(),
    };
    match form_from_matrix(&m) {
        Err(e) => {
            report.axioms_detail = e.to_string();
        }
        Ok(form) => {
            let b = form.b();
            let t = form.t();
            let n = form.rank();
            let symmetric = b.transpose() == b.scale(&eps.sign().into());
            let unimodular = b.is_unimodular();
            let compatible =
                t.transpose().mul(b) == b.mul(&IntMat::identity(n).sub(t));
            report.axioms_pass = symmetric && unimodular && compatible;
            report.axioms_detail = if report.axioms_pass {
                format!("b^T = ({eps})*b, |det b| = 1, t^T b = b (I - t)")
            } else {
                let mut fails = Vec::new();
                if !symmetric {
                    fails.push("pairing symmetry");
                }
                if !unimodular {
                    fails.push("unimodularity");
                }
                if !compatible {
                    fails.push("t-compatibility");
                }
                fails.join(", ")
            };
            report.b = Some(int_rows(b)?);
            report.t = Some(int_rows(t)?);
            let found = search_metabolizer(&m, bound);
            if let Some(l) = &found {
                report.metabolizer = Some(sublattice_vectors(l)?);
                report.metabolizer_display = Some(l.to_string());
            }
            let points = resolve_test_set(&m, test_set, resolution)?;
            let certificate = hyperbolic_obstruction(&m, &points);
            report.hyperbolic_verdict = Some(
                match certificate.verdict {
                    HyperbolicVerdict::Violated => "Violated",
                    HyperbolicVerdict::VanishesOnTestSet => "VanishesOnTestSet",
                }
                .to_string(),
            );
            report.hyperbolic_witness = certificate.witness.map(|(w, v)| (w.to_string(), v));
            report.tested_points =
                certificate.tested_points.iter().map(ToString::to_string).collect();
        }
    }
    let failed = !report.axioms_pass;
    let rendered = match format {
        Format::Text => {
            let mut s = format!(
                "matrix: {} (rank {}, epsilon {})\n",
                report.matrix, report.rank, report.epsilon
            );
            if report.axioms_pass {
                let _ = writeln!(s, "axioms: pass ({})", report.axioms_detail);
            } else {
                let _ = writeln!(s, "axioms: fail ({})", report.axioms_detail);
            }
            if let (Some(b), Some(t)) = (&report.b, &report.t) {
                let _ = writeln!(s, "b: {}", render_rows(b));
                let _ = writeln!(s, "t: {}", render_rows(t));
            }
            if report.axioms_pass {
                match &report.metabolizer_display {
                    Some(d) => {
                        let _ = writeln!(s, "metabolizer: {d} (bound {})", report.metabolizer_bound);
                    }
                    None => {
                        let _ = writeln!(
                            s,
                            "metabolizer: none found (bound {})",
                            report.metabolizer_bound
                        );
                    }
                }
                match (&report.hyperbolic_verdict, &report.hyperbolic_witness) {
                    (Some(verdict), Some((w, v))) => {
                        let _ = writeln!(
                            s,
                            "hyperbolic: {verdict} at omega = {w} (signature = {v})"
                        );
                    }
                    (Some(verdict), None) => {
                        let _ = writeln!(
                            s,
                            "hyperbolic: {verdict} ({} points tested)",
                            report.tested_points.len()
                        );
                    }
                    _ => {}
                }
            }
            s
        }
        Format::Csv => {
            let metabolizer = if report.metabolizer.is_some() { "found" } else { "none" };
            let hyperbolic = report.hyperbolic_verdict.clone().unwrap_or_default();
            format!(
                "matrix,rank,epsilon,axioms,metabolizer,hyperbolic\n{},{},{},{},{},{}\n",
                csv_field(&report.matrix),
                report.rank,
                report.epsilon,
                if report.axioms_pass { "pass" } else { "fail" },
                metabolizer,
                hyperbolic
            )
        }
        Format::Structured => to_json(&report)?,
    };
    Ok(Outcome { rendered, failed })
}

pub fn cmd_profile(matrix_spec: &str, resolution: u64, format: Format) -> Result<Outcome> {
    let m = parse_matrix_spec(matrix_spec, None)?;
    let profile = signature_profile(&m, resolution);
    let report = ProfileReport {
        matrix: matrix_spec.to_string(),
        resolution,
        arcs: profile
            .arcs
            .iter()
            .map(|a| (circle_label(&a.from), circle_label(&a.to), a.value))
            .collect(),
        point_values: profile
            .point_values
            .iter()
            .map(|(w, v)| (w.to_string(), *v))
            .collect(),
    };
    let rendered = match format {
        Format::Text => {
            let mut lines: Vec<(String, i64)> = Vec::new();
            for (i, (from, to, value)) in report.arcs.iter().enumerate() {
                lines.push((format!("({from}, {to})"), *value));
                if let Some((w, v)) = report.point_values.get(i) {
                    lines.push((format!("[{w}]"), *v));
                }
            }
            let width = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
            let mut s = format!("matrix: {}\n", report.matrix);
            for (label, value) in lines {
                let _ = writeln!(s, "  {label:<width$}  {value:>4}");
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("kind,from,to,value\n");
            for (i, (from, to, value)) in report.arcs.iter().enumerate() {
                let _ = writeln!(s, "arc,{from},{to},{value}");
                if let Some((w, v)) = report.point_values.get(i) {
                    let _ = writeln!(s, "point,{w},{w},{v}");
                }
            }
            s
        }
        Format::Structured => to_json(&report)?,
    };
    Ok(Outcome { rendered, failed: false })
}

pub fn cmd_pretzel_scan(p_max: u32, n_max: u32, format: Format) -> Result<Outcome> {
    let rows = scan_pretzel_grid(p_max, n_max)?;
    let all_agree = rows.iter().all(|r| r.agree);
    let report = ScanReport { p_max, n_max, rows, all_agree };
    let rendered = match format {
        Format::Text => {
            let mut s = String::from("p   n    pipeline      closed_form  agree\n");
            for r in &report.rows {
                let verdict = if r.pipeline_obstructed { "Obstructed" } else { "Inconclusive" };
                let _ = writeln!(
                    s,
                    "{:<3} {:<4} {verdict:<13} {:<12} {}",
                    r.p,
                    r.n,
                    r.closed_form_obstructed,
                    if r.agree { "yes" } else { "NO" }
                );
            }
            let agreeing = report.rows.iter().filter(|r| r.agree).count();
            let _ = writeln!(s, "agreement: {agreeing}/{} rows", report.rows.len());
            s
        }
        Format::Csv => {
            let mut s = String::from("p,n,pipeline_obstructed,closed_form_obstructed,agree\n");
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.p, r.n, r.pipeline_obstructed, r.closed_form_obstructed, r.agree
                );
            }
            s
        }
        Format::Structured => to_json(&report)?,
    };
    Ok(Outcome { rendered, failed: !all_agree })
}
