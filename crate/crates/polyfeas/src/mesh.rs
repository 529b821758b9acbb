//! OFF export of three-dimensional hulls.

use std::collections::BTreeMap;
use std::fmt::Write;

use nalgebra::DVector;
use polyfeas_core::chull::{HullState, DEFAULT_REL_COPLANAR_TOL};

use crate::error::CliError;

/// Triangulated hull of `vertices` as an OFF document. Faces are listed
/// counter-clockwise seen from outside; unused input points are dropped.
pub fn off_string(vertices: &[DVector<f64>]) -> Result<String, CliError> {
    if vertices.first().map(|v| v.len()) != Some(3) {
        return Err(CliError::Usage("OFF export needs points in R^3".into()));
    }
    let hull = HullState::build(vertices, DEFAULT_REL_COPLANAR_TOL)?;
    let used = hull.vertex_indices();
    let index: BTreeMap<usize, usize> = used.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    let mut out = String::new();
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} {}", used.len(), hull.faces().len(), hull.edge_count())?;
    for &i in &used {
        let p = &hull.points()[i];
        writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
    }
    for f in hull.faces() {
        let ids: Vec<String> = hull.oriented_face(f).iter().map(|i| index[i].to_string()).collect();
        writeln!(out, "{} {}", ids.len(), ids.join(" "))?;
    }
    Ok(out)
}
