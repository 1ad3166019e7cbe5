//! Certificate and verification report files: JSON with every real stored
//! as a decimal string that parses back to the identical double.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::configs::Space;
use crate::conic::DualCertificate;
use crate::error::{Error, Result};
use crate::profiles::ConstraintProfile;
use crate::verifier::{Status, VerificationReport, VerifyPlan};

pub const FORMAT_VERSION: u32 = 1;
/// Precision hint for certificates whose reals are doubles.
pub const DOUBLE_PRECISION_BITS: u32 = 53;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileEntry {
    pub support: Vec<[String; 2]>,
    pub beta: String,
    pub y: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub version: u32,
    pub space: String,
    pub n: usize,
    pub forbidden: String,
    pub precision: u32,
    pub lambda: String,
    pub z1: String,
    pub z2: String,
    pub z3: String,
    /// Stated objective; repaired certificates carry an upward-rounded value
    /// that differs from z1 + Σ yβ in the last place.
    pub objective: String,
    pub profiles: Vec<ProfileEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
}

/// Shortest decimal that parses back to `x`; scientific notation outside a
/// moderate range keeps strings short.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn parse_real(s: &str, field: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("field {field}: malformed number {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Format(format!("field {field}: non-finite value {s:?}")));
    }
    Ok(v)
}

pub fn to_file(cert: &DualCertificate) -> CertificateFile {
    CertificateFile {
        version: FORMAT_VERSION,
        space: cert.space.to_string(),
        n: cert.n,
        forbidden: format_real(cert.forbidden),
        precision: DOUBLE_PRECISION_BITS,
        lambda: format_real(cert.lambda),
        z1: format_real(cert.z1),
        z2: format_real(cert.z2),
        z3: format_real(cert.z3),
        objective: format_real(cert.objective),
        profiles: cert
            .constraints
            .iter()
            .map(|(p, y)| ProfileEntry {
                support: p.support().iter().map(|&(v, c)| [format_real(v), format_real(c)]).collect(),
                beta: format_real(p.beta()),
                y: format_real(*y),
                note: p.note().to_string(),
            })
            .collect(),
        report: None,
    }
}

pub fn from_file(f: &CertificateFile) -> Result<DualCertificate> {
    if f.version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            f.version
        )));
    }
    let space: Space = f.space.parse().map_err(|_| Error::Format(format!("unknown space {:?}", f.space)))?;
    let mut constraints = Vec::with_capacity(f.profiles.len());
    for (i, e) in f.profiles.iter().enumerate() {
        let y = parse_real(&e.y, &format!("profiles[{i}].y"))?;
        if y > 0.0 {
            return Err(Error::Format(format!("profiles[{i}].y = {y:e} must be nonpositive")));
        }
        let mut support = Vec::with_capacity(e.support.len());
        for (j, [v, c]) in e.support.iter().enumerate() {
            support.push((
                parse_real(v, &format!("profiles[{i}].support[{j}]"))?,
                parse_real(c, &format!("profiles[{i}].support[{j}]"))?,
            ));
        }
        let beta = parse_real(&e.beta, &format!("profiles[{i}].beta"))?;
        let p = ConstraintProfile::new(space, f.n, support, beta, e.note.clone())
            .map_err(|err| Error::Format(format!("profiles[{i}]: {err}")))?;
        constraints.push((p, y));
    }
    Ok(DualCertificate {
        space,
        n: f.n,
        forbidden: parse_real(&f.forbidden, "forbidden")?,
        lambda: parse_real(&f.lambda, "lambda")?,
        z1: parse_real(&f.z1, "z1")?,
        z2: parse_real(&f.z2, "z2")?,
        z3: parse_real(&f.z3, "z3")?,
        constraints,
        objective: parse_real(&f.objective, "objective")?,
    })
}

fn to_text(f: &CertificateFile) -> String {
    let mut s = serde_json::to_string_pretty(f).expect("certificate serialization cannot fail");
    s.push('\n');
    s
}

pub fn encode(cert: &DualCertificate) -> String {
    to_text(&to_file(cert))
}

pub fn decode(text: &str) -> Result<DualCertificate> {
    // check the version before the schema so old or future files get a clear error
    let raw: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    match raw.get("version").and_then(Value::as_u64) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(Error::Format(format!(
                "unsupported format version {v} (expected {FORMAT_VERSION})"
            )))
        }
        None => return Err(Error::Format("missing or malformed version".into())),
    }
    let f: CertificateFile = serde_json::from_value(raw).map_err(|e| Error::Format(e.to_string()))?;
    from_file(&f)
}

fn real(x: f64) -> Value {
    Value::String(format_real(x))
}

fn plan_section(plan: &VerifyPlan) -> Value {
    match plan {
        VerifyPlan::Sphere(p) => json!({
            "kind": "sphere",
            "slack": real(p.slack),
            "xi0": real(p.xi0),
            "xi1": real(p.xi1),
            "eta": real(p.eta),
            "s": p.s.iter().map(|&v| real(v)).collect::<Vec<_>>(),
            "k0": p.k0,
            "decay_bound": real(p.decay_bound),
            "subintervals": p.subintervals,
            "min_margin": real(p.min_margin),
            "worst_k": p.worst_k,
            "violation": real(p.violation),
        }),
        VerifyPlan::Euclidean(p) => json!({
            "kind": "euclidean",
            "slack": real(p.slack),
            "w": real(p.w),
            "L": real(p.l),
            "bessel_bracket": [real(p.bracket.lo), real(p.bracket.hi)],
            "theta_tail": real(p.theta_tail),
            "tail_lhs": real(p.tail_lhs),
            "tail_rhs": real(p.tail_rhs),
            "r0": real(p.r0),
            "grid_accuracy": real(p.grid_accuracy),
            "chunks": p.chunks.len(),
            "grid_points": p.chunks.iter().map(|c| c.points).sum::<usize>(),
            "min_margin_lower": real(p.min_margin_lower),
            "origin_margin": real(p.origin_margin),
            "violation": real(p.violation),
        }),
    }
}

/// The repaired certificate with a `report` section describing the run.
pub fn encode_report(report: &VerificationReport) -> String {
    let mut f = to_file(&report.repaired);
    let mut m = Map::new();
    m.insert(
        "status".into(),
        Value::String(
            match report.status {
                Status::Verified => "verified",
                Status::Repaired => "repaired",
            }
            .into(),
        ),
    );
    m.insert("original_objective".into(), real(report.original_objective));
    m.insert("rigorous_bound".into(), real(report.rigorous_bound));
    m.insert("precision_bits".into(), Value::from(report.precision_bits));
    m.insert("plan".into(), plan_section(&report.plan));
    m.insert(
        "notes".into(),
        Value::Array(report.notes.iter().cloned().map(Value::String).collect()),
    );
    f.report = Some(Value::Object(m));
    to_text(&f)
}
