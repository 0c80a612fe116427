//! Scene files.
//!
//! ```json
//! {"dimension": 2, "ellipsoids": [{"matrix": [[5, 0], [0, 0.5]]}, {"shape": [[1, 2], [0, 1]]}]}
//! ```
//!
//! `matrix` is the SPD shape `A` of `E_A`; `shape` is any nonsingular `S`,
//! describing the image of the unit ball under `S`.

use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use ellipsum::geometry::{ellipsoid_from_general, Ellipsoid, EllipsoidSum};
use ellipsum::spd::SpdMatrix;
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    dimension: usize,
    ellipsoids: Vec<RawTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    matrix: Option<Vec<Vec<f64>>>,
    shape: Option<Vec<Vec<f64>>>,
}

/// Where a scene came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub tool_version: &'static str,
    /// Modification time of the scene file, seconds since the Unix epoch.
    pub modified: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct SceneFile {
    pub path: PathBuf,
    pub scene: EllipsoidSum,
    pub provenance: Provenance,
}

impl SceneFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let scene = parse_scene(&text)?;
        let modified = std::fs::metadata(path)
            .and_then(|m| m.modified())
            .ok()
            .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
            .map(|d| d.as_secs());
        Ok(Self {
            path: path.to_path_buf(),
            scene,
            provenance: Provenance {
                tool_version: env!("CARGO_PKG_VERSION"),
                modified,
            },
        })
    }
}

fn to_matrix(rows: &[Vec<f64>], n: usize, index: usize, field: &str) -> Result<DMatrix<f64>, CliError> {
    if rows.len() != n {
        return Err(CliError::Schema(format!(
            "ellipsoid {index}: `{field}` has {} rows, expected {n}",
            rows.len()
        )));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::Schema(format!(
                "ellipsoid {index}: `{field}` row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Parse and validate a scene document.
pub fn parse_scene(text: &str) -> Result<EllipsoidSum, CliError> {
    let raw: RawScene = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    let n = raw.dimension;
    if n < 2 {
        return Err(CliError::Schema(format!("dimension must be at least 2, got {n}")));
    }
    if raw.ellipsoids.is_empty() {
        return Err(CliError::Schema("scene has no ellipsoids".into()));
    }
    let mut terms = Vec::with_capacity(raw.ellipsoids.len());
    for (index, term) in raw.ellipsoids.iter().enumerate() {
        let ellipsoid = match (&term.matrix, &term.shape) {
            (Some(rows), None) => {
                let m = to_matrix(rows, n, index, "matrix")?;
                SpdMatrix::new(m)
                    .map(Ellipsoid::new)
                    .map_err(|e| CliError::Numeric(format!("ellipsoid {index}: {e}")))?
            }
            (None, Some(rows)) => {
                let s = to_matrix(rows, n, index, "shape")?;
                ellipsoid_from_general(&s).map_err(|e| CliError::Numeric(format!("ellipsoid {index}: {e}")))?
            }
            _ => {
                return Err(CliError::Schema(format!(
                    "ellipsoid {index}: exactly one of `matrix` or `shape` is required"
                )))
            }
        };
        terms.push(ellipsoid);
    }
    EllipsoidSum::new(terms).map_err(|e| CliError::Numeric(e.to_string()))
}
