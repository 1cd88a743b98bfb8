//! Deterministic CSV and JSON writers for transform tables, recovery
//! reports, and class-verification reports.
//!
//! Every float is printed in fixed scientific notation with 17
//! significant digits, which round-trips `f64` exactly, so identical
//! configurations produce byte-identical files. Each file embeds the
//! resolved configuration that produced it: CSV as `#`-prefixed comment
//! lines before the header, JSON as a `meta` object.

use num_complex::Complex64;
use std::fmt::Write as _;

use crate::equivalence::{CollapseReport, SeparationReport};
use crate::inverse::RecoveryReport;
use crate::transform::TransformSample;

/// Formats a float with 17 significant digits in scientific notation,
/// the shortest form that reproduces the exact bit pattern on parse.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Escapes a string for inclusion in a JSON document.
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Ordered key/value pairs describing the resolved run configuration.
pub type Meta = Vec<(String, String)>;

/// Convenience constructor for a meta entry.
pub fn meta_entry(key: &str, value: impl Into<String>) -> (String, String) {
    (key.to_string(), value.into())
}

fn csv_meta(out: &mut String, meta: &Meta) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

fn json_meta(out: &mut String, meta: &Meta) {
    out.push_str("\"meta\":{");
    for (i, (k, v)) in meta.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "\"{}\":\"{}\"", json_escape(k), json_escape(v));
    }
    out.push('}');
}

fn json_complex(v: Complex64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", fmt_float(v.re), fmt_float(v.im))
}

/// Transform batch as CSV: config echo, header, one row per sample.
pub fn transform_csv(meta: &Meta, samples: &[TransformSample]) -> String {
    let mut out = String::new();
    csv_meta(&mut out, meta);
    out.push_str("k_re,k_im,F_re,F_im,abs_err\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(s.k.re),
            fmt_float(s.k.im),
            fmt_float(s.value.re),
            fmt_float(s.value.im),
            fmt_float(s.abs_err_estimate)
        );
    }
    out
}

/// Transform batch as JSON: `meta` object plus a `samples` array.
pub fn transform_json(meta: &Meta, samples: &[TransformSample]) -> String {
    let mut out = String::from("{");
    json_meta(&mut out, meta);
    out.push_str(",\"samples\":[");
    for (i, s) in samples.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"k_re\":{},\"k_im\":{},\"F_re\":{},\"F_im\":{},\"abs_err\":{}}}",
            fmt_float(s.k.re),
            fmt_float(s.k.im),
            fmt_float(s.value.re),
            fmt_float(s.value.im),
            fmt_float(s.abs_err_estimate)
        );
    }
    out.push_str("]}\n");
    out
}

/// Recovery report as CSV: config echo, header, one row per x-point
/// (`flagged` is 0/1).
pub fn recovery_csv(meta: &Meta, report: &RecoveryReport) -> String {
    let mut out = String::new();
    csv_meta(&mut out, meta);
    out.push_str("x,f_true,f_recovered,abs_err,flagged\n");
    for p in &report.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(p.x),
            fmt_float(p.f_true),
            fmt_float(p.f_recovered),
            fmt_float(p.abs_err),
            u8::from(p.flagged)
        );
    }
    out
}

/// Recovery report as JSON with the aggregate diagnostics included.
pub fn recovery_json(meta: &Meta, report: &RecoveryReport) -> String {
    let mut out = String::from("{");
    json_meta(&mut out, meta);
    out.push_str(",\"points\":[");
    for (i, p) in report.points.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"x\":{},\"f_true\":{},\"f_recovered\":{},\"abs_err\":{},\"flagged\":{},\"imag_residue\":{}}}",
            fmt_float(p.x),
            fmt_float(p.f_true),
            fmt_float(p.f_recovered),
            fmt_float(p.abs_err),
            p.flagged,
            fmt_float(p.imag_residue)
        );
    }
    let _ = writeln!(
        out,
        "],\"l1_error\":{},\"max_imag_residue\":{},\"truncation_dominated\":{}}}",
        fmt_float(report.l1_error),
        fmt_float(report.max_imag_residue),
        report.truncation_dominated
    );
    out
}

/// Class-verification report as JSON: class descriptor, per-k collapse
/// table, optional separation table, and top-level verdict fields
/// `collapse_ok` / `separation_ok` (the latter `null` when no separation
/// was requested).
pub fn class_json(
    meta: &Meta,
    collapse: &CollapseReport,
    separation: Option<&SeparationReport>,
) -> String {
    let mut out = String::from("{");
    json_meta(&mut out, meta);
    let _ = write!(
        out,
        ",\"class\":{{\"q\":{},\"lambda\":{},\"members\":[",
        fmt_float(collapse.q),
        fmt_float(collapse.lambda)
    );
    for (i, (a, b)) in collapse.members.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "[{},{}]", fmt_float(*a), fmt_float(*b));
    }
    out.push_str("]},\"collapse\":{\"rows\":[");
    for (i, r) in collapse.rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"k\":{},\"values\":[",
            fmt_float(r.k)
        );
        for (j, v) in r.values.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&json_complex(*v));
        }
        let _ = write!(
            out,
            "],\"err_estimates\":[{}],\"max_pairwise\":{},\"budget\":{},\"closed_form\":{},\"max_vs_closed\":{},\"closed_budget\":{}}}",
            r.err_estimates
                .iter()
                .map(|e| fmt_float(*e))
                .collect::<Vec<_>>()
                .join(","),
            fmt_float(r.max_pairwise),
            fmt_float(r.budget),
            json_complex(r.closed_form),
            fmt_float(r.max_vs_closed),
            fmt_float(r.closed_budget)
        );
    }
    let _ = write!(
        out,
        "],\"max_pairwise_deviation\":{},\"max_closed_form_deviation\":{}}}",
        fmt_float(collapse.max_pairwise_deviation),
        fmt_float(collapse.max_closed_form_deviation)
    );
    match separation {
        Some(s) => {
            out.push_str(",\"separation\":{\"rows\":[");
            for (i, r) in s.rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(
                    out,
                    "{{\"k\":{},\"f1\":{},\"f2\":{},\"deviation\":{}}}",
                    fmt_float(r.k),
                    json_complex(r.f1),
                    json_complex(r.f2),
                    fmt_float(r.deviation)
                );
            }
            let _ = write!(
                out,
                "],\"lambda1\":{},\"lambda2\":{},\"min_deviation\":{},\"min_witness_k\":{},\"max_deviation\":{},\"max_witness_k\":{},\"floor\":{},\"grid_insufficient\":{}}}",
                fmt_float(s.lambda1),
                fmt_float(s.lambda2),
                fmt_float(s.min_deviation),
                fmt_float(s.min_witness_k),
                fmt_float(s.max_deviation),
                fmt_float(s.max_witness_k),
                fmt_float(s.floor),
                s.grid_insufficient
            );
        }
        None => out.push_str(",\"separation\":null"),
    }
    let _ = writeln!(
        out,
        ",\"collapse_ok\":{},\"separation_ok\":{}}}",
        collapse.collapse_ok && collapse.closed_form_ok,
        match separation {
            Some(s) => s.separation_ok.to_string(),
            None => "null".to_string(),
        }
    );
    out
}
