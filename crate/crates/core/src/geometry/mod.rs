//! Tract geometries: 1D area functions and tagged tetrahedral meshes, their
//! ASCII file formats, and analytic test shapes.

mod area;
mod generate;
mod mesh;

use std::path::PathBuf;

pub use area::{AreaFunction, AreaSample};
pub use generate::{make_box_mesh, make_cylinder_mesh, make_tube, TubeShape};
pub(crate) use mesh::{signed_volume, triangle_area};
pub use mesh::{BoundaryFace, BoundaryTag, TetMesh};

#[cfg(test)]
pub(crate) use mesh::tests::CUBE5;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown boundary tag {tag}")]
    UnknownTag { line: usize, tag: String },
    #[error("invalid area function: {0}")]
    InvalidArea(String),
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("tet {tet} has zero volume")]
    DegenerateTet { tet: usize },
    #[error("boundary face {face:?} is not a face of any tet")]
    DanglingFace { face: [usize; 3] },
    #[error("boundary face {face:?} is interior (shared by two tets)")]
    InteriorFaceTagged { face: [usize; 3] },
    #[error("face {face:?} is shared by {count} tets")]
    NonManifoldFace { face: [usize; 3], count: usize },
    #[error("boundary face {face:?} has no tag")]
    UntaggedFace { face: [usize; 3] },
    #[error("boundary face {face:?} is listed more than once")]
    DuplicateBoundaryFace { face: [usize; 3] },
    #[error("mesh has no {0} faces")]
    MissingTag(BoundaryTag),
}

/// Strips a `#` comment and surrounding whitespace.
fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

fn read_file(path: &std::path::Path) -> Result<String, GeometryError> {
    std::fs::read_to_string(path).map_err(|source| GeometryError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), GeometryError> {
    std::fs::write(path, text).map_err(|source| GeometryError::Io {
        path: path.to_path_buf(),
        source,
    })
}
