//! FOLD (JSON) import and export.

use serde::{Deserialize, Serialize};

use super::{Assignment, Crease, CreasePattern, PatternError, Result};

/// The subset of the FOLD schema this crate reads and writes. Fold angles are
/// in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldDocument {
    pub file_spec: f64,
    #[serde(default)]
    pub file_classes: Vec<String>,
    pub vertices_coords: Vec<Vec<f64>>,
    pub edges_vertices: Vec<[usize; 2]>,
    pub edges_assignment: Vec<String>,
    #[serde(rename = "edges_foldAngle", default, skip_serializing_if = "Option::is_none")]
    pub edges_fold_angle: Option<Vec<f64>>,
}

impl From<&CreasePattern> for FoldDocument {
    fn from(cp: &CreasePattern) -> Self {
        FoldDocument {
            file_spec: 1.1,
            file_classes: vec!["creasePattern".to_string()],
            vertices_coords: cp.vertices().iter().map(|v| v.to_vec()).collect(),
            edges_vertices: cp.creases().iter().map(|c| c.vertices).collect(),
            edges_assignment: cp.creases().iter().map(|c| c.assignment.letter().to_string()).collect(),
            edges_fold_angle: Some(cp.creases().iter().map(|c| c.fold_angle.to_degrees()).collect()),
        }
    }
}

impl TryFrom<FoldDocument> for CreasePattern {
    type Error = PatternError;

    fn try_from(doc: FoldDocument) -> Result<Self> {
        let malformed = |msg: String| PatternError::Fold(msg);
        let vertices = doc
            .vertices_coords
            .iter()
            .enumerate()
            .map(|(i, c)| match c.as_slice() {
                [x, y] => Ok([*x, *y]),
                [x, y, z] if *z == 0.0 => Ok([*x, *y]),
                _ => Err(malformed(format!("vertex {i} is not a planar coordinate"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let m = doc.edges_vertices.len();
        if doc.edges_assignment.len() != m {
            return Err(malformed(format!("{} assignments for {m} edges", doc.edges_assignment.len())));
        }
        if let Some(angles) = &doc.edges_fold_angle {
            if angles.len() != m {
                return Err(malformed(format!("{} fold angles for {m} edges", angles.len())));
            }
        }
        let creases = (0..m)
            .map(|i| {
                let assignment = Assignment::from_letter(&doc.edges_assignment[i])
                    .ok_or_else(|| malformed(format!("edge {i} has unsupported assignment {:?}", doc.edges_assignment[i])))?;
                let fold_angle = match &doc.edges_fold_angle {
                    Some(angles) => angles[i].to_radians(),
                    None => assignment.flat_folded_angle(),
                };
                Ok(Crease { vertices: doc.edges_vertices[i], assignment, fold_angle })
            })
            .collect::<Result<Vec<_>>>()?;
        CreasePattern::new(vertices, creases)
    }
}

/// Serialises a pattern as a FOLD document. Floats are written in shortest
/// round-trip form, so output is deterministic and lossless.
pub fn to_fold_json(cp: &CreasePattern) -> String {
    let mut out = serde_json::to_string_pretty(&FoldDocument::from(cp)).expect("FOLD document serialises");
    out.push('\n');
    out
}

pub fn from_fold_json(text: &str) -> Result<CreasePattern> {
    let doc: FoldDocument = serde_json::from_str(text).map_err(|e| PatternError::Fold(e.to_string()))?;
    CreasePattern::try_from(doc)
}
