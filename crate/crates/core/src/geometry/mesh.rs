use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use super::{read_file, strip_comment, write_file, GeometryError};

/// Boundary classes of the air column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Γ1, the mouth opening (Φ = 0).
    Mouth,
    /// Γ2, the air–tissue interface (wall dissipation).
    Wall,
    /// Γ3, the virtual plane above the glottis.
    Glottis,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 3] = [BoundaryTag::Mouth, BoundaryTag::Wall, BoundaryTag::Glottis];

    /// Numeric code used in mesh files.
    pub fn code(self) -> u8 {
        match self {
            BoundaryTag::Mouth => 1,
            BoundaryTag::Wall => 2,
            BoundaryTag::Glottis => 3,
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "1" => Some(BoundaryTag::Mouth),
            "2" => Some(BoundaryTag::Wall),
            "3" => Some(BoundaryTag::Glottis),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryTag::Mouth => "mouth (Γ1)",
            BoundaryTag::Wall => "wall (Γ2)",
            BoundaryTag::Glottis => "glottis (Γ3)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFace {
    pub tri: [usize; 3],
    pub tag: BoundaryTag,
}

/// Tetrahedral mesh of the air column with a tagged boundary.
///
/// After construction every tet has positive signed volume and every face is
/// either interior (two tets) or a tagged boundary face (one tet).
#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    vertices: Vec<[f64; 3]>,
    tets: Vec<[usize; 4]>,
    boundary: Vec<BoundaryFace>,
}

pub(crate) fn face_key(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

pub(crate) fn tet_faces(t: &[usize; 4]) -> [[usize; 3]; 4] {
    [
        [t[1], t[2], t[3]],
        [t[0], t[2], t[3]],
        [t[0], t[1], t[3]],
        [t[0], t[1], t[2]],
    ]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn signed_volume(p: [[f64; 3]; 4]) -> f64 {
    dot(sub(p[1], p[0]), cross(sub(p[2], p[0]), sub(p[3], p[0]))) / 6.0
}

pub(crate) fn triangle_area(p: [[f64; 3]; 3]) -> f64 {
    let n = cross(sub(p[1], p[0]), sub(p[2], p[0]));
    0.5 * dot(n, n).sqrt()
}

/// Counts how many tets own each face.
pub(crate) fn face_incidence(tets: &[[usize; 4]]) -> HashMap<[usize; 3], usize> {
    let mut counts = HashMap::with_capacity(tets.len() * 2 + 4);
    for t in tets {
        for f in tet_faces(t) {
            *counts.entry(face_key(f)).or_insert(0) += 1;
        }
    }
    counts
}

impl TetMesh {
    /// Validates and orients a mesh. Tets with negative volume are reordered.
    pub fn new(
        vertices: Vec<[f64; 3]>,
        mut tets: Vec<[usize; 4]>,
        boundary: Vec<BoundaryFace>,
    ) -> Result<Self, GeometryError> {
        let nv = vertices.len();
        let bad_index = |i: usize| {
            GeometryError::InvalidDimensions(format!(
                "vertex index {i} out of range ({nv} vertices)"
            ))
        };
        for (ti, t) in tets.iter_mut().enumerate() {
            if let Some(&i) = t.iter().find(|&&i| i >= nv) {
                return Err(bad_index(i));
            }
            let v = signed_volume(t.map(|i| vertices[i]));
            if v == 0.0 || !v.is_finite() {
                return Err(GeometryError::DegenerateTet { tet: ti });
            }
            if v < 0.0 {
                t.swap(2, 3);
            }
        }
        let incidence = face_incidence(&tets);
        if let Some((face, &count)) = incidence.iter().find(|(_, &c)| c > 2) {
            return Err(GeometryError::NonManifoldFace { face: *face, count });
        }
        let mut tagged: HashMap<[usize; 3], BoundaryTag> = HashMap::with_capacity(boundary.len());
        for b in &boundary {
            if let Some(&i) = b.tri.iter().find(|&&i| i >= nv) {
                return Err(bad_index(i));
            }
            let key = face_key(b.tri);
            match incidence.get(&key) {
                None => return Err(GeometryError::DanglingFace { face: b.tri }),
                Some(2) => return Err(GeometryError::InteriorFaceTagged { face: b.tri }),
                _ => {}
            }
            if tagged.insert(key, b.tag).is_some() {
                return Err(GeometryError::DuplicateBoundaryFace { face: b.tri });
            }
        }
        // deterministic error reporting: scan tets in order
        for t in &tets {
            for f in tet_faces(t) {
                let key = face_key(f);
                if incidence[&key] == 1 && !tagged.contains_key(&key) {
                    return Err(GeometryError::UntaggedFace { face: key });
                }
            }
        }
        Ok(Self {
            vertices,
            tets,
            boundary,
        })
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn boundary(&self) -> &[BoundaryFace] {
        &self.boundary
    }

    pub fn tet_points(&self, t: usize) -> [[f64; 3]; 4] {
        self.tets[t].map(|i| self.vertices[i])
    }

    pub fn face_points(&self, f: &BoundaryFace) -> [[f64; 3]; 3] {
        f.tri.map(|i| self.vertices[i])
    }

    pub fn volume(&self) -> f64 {
        (0..self.tets.len())
            .map(|t| signed_volume(self.tet_points(t)))
            .sum()
    }

    pub fn tag_area(&self, tag: BoundaryTag) -> f64 {
        self.boundary
            .iter()
            .filter(|b| b.tag == tag)
            .map(|b| triangle_area(self.face_points(b)))
            .sum()
    }

    pub fn tag_count(&self, tag: BoundaryTag) -> usize {
        self.boundary.iter().filter(|b| b.tag == tag).count()
    }

    /// Errors unless every tag class has at least one face.
    pub fn require_tags(&self, tags: &[BoundaryTag]) -> Result<(), GeometryError> {
        match tags.iter().find(|&&t| self.tag_count(t) == 0) {
            Some(&t) => Err(GeometryError::MissingTag(t)),
            None => Ok(()),
        }
    }

    /// Uniformly scaled copy.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|p| p.map(|x| x * factor))
                .collect(),
            tets: self.tets.clone(),
            boundary: self.boundary.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l)))
            .filter(|(_, l)| !l.is_empty());

        let mut vertices = Vec::new();
        let mut tets = Vec::new();
        let mut boundary = Vec::new();
        let mut seen = [false; 3];

        while let Some((line, header)) = lines.next() {
            let mut it = header.split_whitespace();
            let (section, count) = match (it.next(), it.next(), it.next()) {
                (Some(s), Some(c), None) => (s, parse_num::<usize>(c, line)?),
                _ => {
                    return Err(perr(
                        line,
                        format!("expected section header, got {header:?}"),
                    ))
                }
            };
            let slot = match section {
                "vertices" => 0,
                "tets" => 1,
                "boundary" => 2,
                other => return Err(perr(line, format!("unknown section {other:?}"))),
            };
            if std::mem::replace(&mut seen[slot], true) {
                return Err(perr(line, format!("duplicate section {section:?}")));
            }
            for _ in 0..count {
                let (line, row) = lines
                    .next()
                    .ok_or_else(|| perr(line, format!("section {section:?} ends early")))?;
                let fields: Vec<&str> = row.split_whitespace().collect();
                match slot {
                    0 => {
                        let [x, y, z] = fields[..] else {
                            return Err(perr(line, "vertex needs 3 coordinates".into()));
                        };
                        vertices.push([
                            parse_num(x, line)?,
                            parse_num(y, line)?,
                            parse_num(z, line)?,
                        ]);
                    }
                    1 => {
                        let [a, b, c, d] = fields[..] else {
                            return Err(perr(line, "tet needs 4 indices".into()));
                        };
                        tets.push([
                            parse_num(a, line)?,
                            parse_num(b, line)?,
                            parse_num(c, line)?,
                            parse_num(d, line)?,
                        ]);
                    }
                    _ => {
                        let [a, b, c, tag] = fields[..] else {
                            return Err(perr(
                                line,
                                "boundary face needs 3 indices and a tag".into(),
                            ));
                        };
                        let tag = BoundaryTag::from_code(tag).ok_or_else(|| {
                            GeometryError::UnknownTag {
                                line,
                                tag: tag.to_string(),
                            }
                        })?;
                        boundary.push(BoundaryFace {
                            tri: [
                                parse_num(a, line)?,
                                parse_num(b, line)?,
                                parse_num(c, line)?,
                            ],
                            tag,
                        });
                    }
                }
            }
        }
        if !seen[0] || !seen[1] {
            return Err(perr(0, "missing vertices or tets section".into()));
        }
        Self::new(vertices, tets, boundary)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GeometryError> {
        Self::parse(&read_file(path.as_ref())?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(
            64 * (self.vertices.len() + self.tets.len() + self.boundary.len()),
        );
        let _ = writeln!(out, "vertices {}", self.vertices.len());
        for [x, y, z] in &self.vertices {
            let _ = writeln!(out, "{x} {y} {z}");
        }
        let _ = writeln!(out, "tets {}", self.tets.len());
        for [a, b, c, d] in &self.tets {
            let _ = writeln!(out, "{a} {b} {c} {d}");
        }
        let _ = writeln!(out, "boundary {}", self.boundary.len());
        for f in &self.boundary {
            let [a, b, c] = f.tri;
            let _ = writeln!(out, "{a} {b} {c} {}", f.tag.code());
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GeometryError> {
        write_file(path.as_ref(), &self.to_text())
    }
}

fn perr(line: usize, msg: String) -> GeometryError {
    GeometryError::Parse { line, msg }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, GeometryError> {
    s.parse()
        .map_err(|_| perr(line, format!("not a number: {s:?}")))
}
