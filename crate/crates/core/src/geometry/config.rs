//! Domain specification files.
//!
//! Structured key-value text (TOML). Schema:
//!
//! ```text
//! kind = "disk" | "ellipse" | "rectangle" | "polar"
//! radius = 1.0                      # disk only
//! semi_axes = [1.2, 0.8333]         # ellipse only
//! side_lengths = [1.7725, 1.7725]   # rectangle only
//! polar = { r0 = 1.0, terms = [[1, 0.1], [3, -0.05]] }   # polar only
//!
//! [mesh]
//! h = 0.05                          # optional target mesh size
//! ```
//!
//! Unknown keys are rejected. A `terms` entry `[k, eps]` contributes
//! `eps * cos(2 k theta)` to the boundary radius.

use super::DomainSpec;
use crate::{Error, Result};

use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomainFile {
    kind: String,
    radius: Option<f64>,
    semi_axes: Option<[f64; 2]>,
    side_lengths: Option<[f64; 2]>,
    polar: Option<RawPolar>,
    mesh: Option<RawMesh>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolar {
    r0: f64,
    terms: Vec<(u32, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    h: f64,
}

/// Parsed domain file: the domain plus an optional mesh size.
#[derive(Debug, Clone)]
pub struct DomainFile {
    pub spec: DomainSpec,
    pub mesh_h: Option<f64>,
}

/// Parse a domain specification from TOML text.
pub fn parse_domain_str(text: &str) -> Result<DomainFile> {
    let raw: RawDomainFile =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let reject = |field: &str, kind: &str| {
        Error::Config(format!("field `{field}` is not valid for kind = \"{kind}\""))
    };
    let spec = match raw.kind.as_str() {
        "disk" => {
            if raw.semi_axes.is_some() || raw.side_lengths.is_some() || raw.polar.is_some() {
                return Err(reject("semi_axes/side_lengths/polar", "disk"));
            }
            let radius = raw
                .radius
                .ok_or_else(|| Error::Config("disk requires `radius`".into()))?;
            DomainSpec::Disk { radius }
        }
        "ellipse" => {
            if raw.radius.is_some() || raw.side_lengths.is_some() || raw.polar.is_some() {
                return Err(reject("radius/side_lengths/polar", "ellipse"));
            }
            let [a, b] = raw
                .semi_axes
                .ok_or_else(|| Error::Config("ellipse requires `semi_axes = [a, b]`".into()))?;
            DomainSpec::Ellipse { a, b }
        }
        "rectangle" => {
            if raw.radius.is_some() || raw.semi_axes.is_some() || raw.polar.is_some() {
                return Err(reject("radius/semi_axes/polar", "rectangle"));
            }
            let [a, b] = raw.side_lengths.ok_or_else(|| {
                Error::Config("rectangle requires `side_lengths = [a, b]`".into())
            })?;
            DomainSpec::Rectangle { a, b }
        }
        "polar" => {
            if raw.radius.is_some() || raw.semi_axes.is_some() || raw.side_lengths.is_some() {
                return Err(reject("radius/semi_axes/side_lengths", "polar"));
            }
            let polar = raw
                .polar
                .ok_or_else(|| Error::Config("polar requires `polar = { r0, terms }`".into()))?;
            DomainSpec::PolarPerturbed {
                r0: polar.r0,
                terms: polar.terms,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown kind \"{other}\" (expected disk, ellipse, rectangle, or polar)"
            )))
        }
    };
    spec.validate()
        .map_err(|e| Error::Config(format!("{e}")))?;
    if let Some(m) = &raw.mesh {
        if !(m.h > 0.0) {
            return Err(Error::Config(format!("mesh.h must be positive, got {}", m.h)));
        }
    }
    Ok(DomainFile {
        spec,
        mesh_h: raw.mesh.map(|m| m.h),
    })
}

/// Read and parse a domain specification file.
pub fn load_domain_file(path: &std::path::Path) -> Result<DomainFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_domain_str(&text)
}
