use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;

use super::parse::GcodeProgram;
use super::toolpath::{filament_length, travel_length, z_profile};
use super::GcodeError;

/// A filament-usage statement found in a comment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilamentClaim {
    pub line_number: usize,
    pub value_mm: f64,
    pub text: String,
}

/// Claims further apart than this fraction are reported as ambiguous.
pub const CLAIM_AGREEMENT: f64 = 1e-3;

pub const DEFAULT_MISMATCH_THRESHOLD: f64 = 0.02;

// Recognised comment forms (case-insensitive, after ';'):
//   filament used = <num>mm | <num>m | <num>in
//   filament used [mm] = <num>
//   filament_used: <num>
fn patterns() -> &'static [Regex] {
    static P: OnceLock<Vec<Regex>> = OnceLock::new();
    P.get_or_init(|| {
        const NUM: &str = r"([0-9]+(?:\.[0-9]*)?|\.[0-9]+)";
        [
            format!(r"(?i)^\s*filament used\s*\[mm\]\s*=\s*{NUM}"),
            format!(r"(?i)^\s*filament used\s*=\s*{NUM}\s*(mm|m|inch|in)\s*$"),
            format!(r"(?i)^\s*filament_used\s*:\s*{NUM}"),
        ]
        .iter()
        .map(|p| Regex::new(p).expect("claim pattern compiles"))
        .collect()
    })
}

fn unit_scale(unit: &str) -> f64 {
    match unit.to_ascii_lowercase().as_str() {
        "m" => 1000.0,
        "in" | "inch" => 25.4,
        _ => 1.0,
    }
}

fn match_claim(comment: &str) -> Option<f64> {
    patterns().iter().find_map(|p| {
        let caps = p.captures(comment)?;
        let value: f64 = caps[1].parse().ok()?;
        let scale = caps.get(2).map_or(1.0, |u| unit_scale(u.as_str()));
        Some(value * scale)
    })
}

/// Every filament claim in file order.
pub fn all_claims(program: &GcodeProgram) -> Vec<FilamentClaim> {
    program
        .commands
        .iter()
        .filter_map(|c| {
            let comment = c.raw_comment.as_deref()?;
            Some(FilamentClaim {
                line_number: c.line_number,
                value_mm: match_claim(comment)?,
                text: comment.trim().to_string(),
            })
        })
        .collect()
}

fn disagree(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale > 0.0 && (a - b).abs() / scale > CLAIM_AGREEMENT
}

/// The declared filament length, in mm. The first claim wins unless a later
/// one disagrees with it by more than [`CLAIM_AGREEMENT`].
pub fn metadata_claims(program: &GcodeProgram) -> Result<Option<f64>, GcodeError> {
    let claims = all_claims(program);
    let Some(first) = claims.first() else {
        return Ok(None);
    };
    if let Some(other) = claims.iter().find(|c| disagree(c.value_mm, first.value_mm)) {
        return Err(GcodeError::AmbiguousClaims {
            first: first.value_mm,
            second: other.value_mm,
        });
    }
    Ok(Some(first.value_mm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Mismatch,
    NoClaim,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForensicsReport {
    pub computed_filament_mm: f64,
    pub declared_filament_mm: Option<f64>,
    pub travel_mm: f64,
    pub z_levels: Vec<f64>,
    pub max_z_mm: f64,
    pub layer_count: usize,
    pub discrepancy_ratio: Option<f64>,
    pub mismatch_threshold: f64,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

/// Compares the filament the toolpath actually extrudes against what the
/// file's metadata comments claim.
///
/// The verdict is `mismatch` when `|1 - computed/declared|` exceeds
/// `mismatch_threshold`. Conflicting claims are reported as a warning and
/// treated as no claim.
pub fn audit(program: &GcodeProgram, mismatch_threshold: f64) -> ForensicsReport {
    let computed = filament_length(program);
    let z = z_profile(program);
    let mut warnings = Vec::new();
    let declared = match metadata_claims(program) {
        Ok(d) => d,
        Err(e) => {
            warnings.push(e.to_string());
            None
        }
    };
    let (ratio, verdict) = match declared {
        None => (None, Verdict::NoClaim),
        Some(d) if d > 0.0 => {
            let r = computed / d;
            let v = if (1.0 - r).abs() > mismatch_threshold {
                Verdict::Mismatch
            } else {
                Verdict::Consistent
            };
            (Some(r), v)
        }
        Some(_) => {
            warnings.push("declared filament length is zero".to_string());
            let v = if computed > 0.0 {
                Verdict::Mismatch
            } else {
                Verdict::Consistent
            };
            (None, v)
        }
    };
    ForensicsReport {
        computed_filament_mm: computed,
        declared_filament_mm: declared,
        travel_mm: travel_length(program),
        z_levels: z.z_levels,
        max_z_mm: z.max_z_mm,
        layer_count: z.layer_count,
        discrepancy_ratio: ratio,
        mismatch_threshold,
        verdict,
        warnings,
    }
}
