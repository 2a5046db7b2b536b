use std::f64::consts::PI;

use super::area::{AreaFunction, AreaSample};
use super::mesh::{face_incidence, signed_volume, tet_faces, BoundaryFace, BoundaryTag, TetMesh};
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TubeShape {
    Cylinder,
    /// `A(s) = A0 (1 + 0.5 cos(2πs/L))`
    CosineHorn,
}

impl std::str::FromStr for TubeShape {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cylinder" => Ok(TubeShape::Cylinder),
            "cosine-horn" => Ok(TubeShape::CosineHorn),
            other => Err(GeometryError::InvalidDimensions(format!(
                "unknown tube shape {other:?}"
            ))),
        }
    }
}

/// Analytic area function on `n_segments + 1` uniform samples, circular
/// cross-sections, `Σ = 1`.
pub fn make_tube(
    shape: TubeShape,
    length: f64,
    area0: f64,
    n_segments: usize,
) -> Result<AreaFunction, GeometryError> {
    if !(length > 0.0 && area0 > 0.0) || n_segments < 2 {
        return Err(GeometryError::InvalidDimensions(format!(
            "tube needs L > 0, A0 > 0 and at least 2 segments (L={length}, A0={area0}, n={n_segments})"
        )));
    }
    let samples = (0..=n_segments)
        .map(|i| {
            let s = if i == n_segments {
                length
            } else {
                length * i as f64 / n_segments as f64
            };
            let area = match shape {
                TubeShape::Cylinder => area0,
                TubeShape::CosineHorn => area0 * (1.0 + 0.5 * (2.0 * PI * s / length).cos()),
            };
            AreaSample::circular(s, area)
        })
        .collect();
    AreaFunction::new(samples)
}

/// Builds the boundary from faces owned by a single tet, tagging each one with
/// `classify(centroid)`.
fn tag_boundary(
    vertices: &[[f64; 3]],
    tets: &[[usize; 4]],
    classify: impl Fn([f64; 3]) -> BoundaryTag,
) -> Vec<BoundaryFace> {
    let incidence = face_incidence(tets);
    let mut out = Vec::new();
    for t in tets {
        for tri in tet_faces(t) {
            let mut key = tri;
            key.sort_unstable();
            if incidence[&key] == 1 {
                let c = (0..3).map(|d| tri.iter().map(|&i| vertices[i][d]).sum::<f64>() / 3.0);
                let c: Vec<f64> = c.collect();
                out.push(BoundaryFace {
                    tri,
                    tag: classify([c[0], c[1], c[2]]),
                });
            }
        }
    }
    out
}

fn orient(vertices: &[[f64; 3]], tets: &mut [[usize; 4]]) {
    for t in tets.iter_mut() {
        if signed_volume(t.map(|i| vertices[i])) < 0.0 {
            t.swap(2, 3);
        }
    }
}

/// Axis-aligned box `[0,lx]×[0,ly]×[0,lz]` on an `nx×ny×nz` grid, each cell
/// split into six tets sharing the main diagonal. The face `x = lx` is the
/// mouth, `x = 0` the glottis plane, the rest walls.
pub fn make_box_mesh(extent: [f64; 3], cells: [usize; 3]) -> Result<TetMesh, GeometryError> {
    if extent.iter().any(|&e| !(e > 0.0)) || cells.contains(&0) {
        return Err(GeometryError::InvalidDimensions(format!(
            "box {extent:?} with {cells:?} cells"
        )));
    }
    let [nx, ny, nz] = cells;
    let id = |i: usize, j: usize, k: usize| (i * (ny + 1) + j) * (nz + 1) + k;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                vertices.push([
                    extent[0] * i as f64 / nx as f64,
                    extent[1] * j as f64 / ny as f64,
                    extent[2] * k as f64 / nz as f64,
                ]);
            }
        }
    }
    const AXIS_ORDERS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                for order in AXIS_ORDERS {
                    let mut c = [i, j, k];
                    let mut t = [id(i, j, k); 4];
                    for (step, &axis) in order.iter().enumerate() {
                        c[axis] += 1;
                        t[step + 1] = id(c[0], c[1], c[2]);
                    }
                    tets.push(t);
                }
            }
        }
    }
    orient(&vertices, &mut tets);
    let tol = 1e-9 * extent[0];
    let boundary = tag_boundary(&vertices, &tets, |c| {
        if c[0] > extent[0] - tol {
            BoundaryTag::Mouth
        } else if c[0] < tol {
            BoundaryTag::Glottis
        } else {
            BoundaryTag::Wall
        }
    });
    TetMesh::new(vertices, tets, boundary)
}

/// Tetrahedralized circular cylinder of length `length` and radius `radius`
/// along the x axis. The end disk at `x = L` is the mouth, the disk at
/// `x = 0` the glottis plane, the lateral surface the wall.
///
/// The cross-section is a polygonal disk of concentric rings; each layer of
/// prisms is split into three tets with the diagonal rule "bottom of the
/// lower index to top of the higher index", which keeps neighbouring prisms
/// conforming.
pub fn make_cylinder_mesh(
    length: f64,
    radius: f64,
    target_h: f64,
) -> Result<TetMesh, GeometryError> {
    if !(length > 0.0 && radius > 0.0 && target_h > 0.0) {
        return Err(GeometryError::InvalidDimensions(format!(
            "cylinder needs positive L, r, h (L={length}, r={radius}, h={target_h})"
        )));
    }
    if target_h > length {
        return Err(GeometryError::InvalidDimensions(format!(
            "target_h {target_h} exceeds length {length}"
        )));
    }
    let n_theta = (2.0 * PI * radius / target_h).ceil() as usize;
    if n_theta < 3 {
        return Err(GeometryError::InvalidDimensions(format!(
            "only {n_theta} angular subdivisions at h = {target_h}, r = {radius}"
        )));
    }
    let n_rings = (radius / target_h).ceil() as usize;
    let n_outer = n_theta.max(6 * n_rings);

    // disk points in the (y, z) plane: centre then rings
    let mut disk = vec![[0.0, 0.0]];
    let mut ring_start = vec![0usize];
    let mut ring_len = vec![1usize];
    for j in 1..=n_rings {
        let count = ((n_outer as f64 * j as f64 / n_rings as f64).round() as usize).max(3);
        let rho = radius * j as f64 / n_rings as f64;
        ring_start.push(disk.len());
        ring_len.push(count);
        for a in 0..count {
            let th = 2.0 * PI * a as f64 / count as f64;
            disk.push([rho * th.cos(), rho * th.sin()]);
        }
    }

    let mut tris: Vec<[usize; 3]> = Vec::new();
    for j in 1..=n_rings {
        let (s_in, n_in) = (ring_start[j - 1], ring_len[j - 1]);
        let (s_out, n_out) = (ring_start[j], ring_len[j]);
        if n_in == 1 {
            for b in 0..n_out {
                tris.push([s_in, s_out + b, s_out + (b + 1) % n_out]);
            }
            continue;
        }
        // zipper the two rings by angle
        let (mut a, mut b) = (0usize, 0usize);
        while a < n_in || b < n_out {
            let next_in = (a + 1) as f64 / n_in as f64;
            let next_out = (b + 1) as f64 / n_out as f64;
            if b == n_out || (a < n_in && next_in < next_out) {
                tris.push([s_in + a, s_in + (a + 1) % n_in, s_out + b % n_out]);
                a += 1;
            } else {
                tris.push([s_in + a % n_in, s_out + b, s_out + (b + 1) % n_out]);
                b += 1;
            }
        }
    }

    let n_layers = (length / target_h).ceil() as usize;
    let nd = disk.len();
    let mut vertices = Vec::with_capacity(nd * (n_layers + 1));
    for l in 0..=n_layers {
        let x = if l == n_layers {
            length
        } else {
            length * l as f64 / n_layers as f64
        };
        vertices.extend(disk.iter().map(|&[y, z]| [x, y, z]));
    }
    let mut tets = Vec::with_capacity(3 * tris.len() * n_layers);
    for l in 0..n_layers {
        let (lo, hi) = (l * nd, (l + 1) * nd);
        for tri in &tris {
            let mut t = *tri;
            t.sort_unstable();
            let [a, b, c] = t;
            tets.push([lo + a, lo + b, lo + c, hi + c]);
            tets.push([lo + a, lo + b, hi + b, hi + c]);
            tets.push([lo + a, hi + a, hi + b, hi + c]);
        }
    }
    orient(&vertices, &mut tets);
    let tol = 1e-9 * length;
    let boundary = tag_boundary(&vertices, &tets, |c| {
        if c[0] > length - tol {
            BoundaryTag::Mouth
        } else if c[0] < tol {
            BoundaryTag::Glottis
        } else {
            BoundaryTag::Wall
        }
    });
    TetMesh::new(vertices, tets, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_tube_is_uniform() {
        let af = make_tube(TubeShape::Cylinder, 0.175, 3e-4, 20).unwrap();
        assert_eq!(af.len(), 21);
        assert!(af.samples().iter().all(|x| x.area == 3e-4));
        assert_eq!(af.length(), 0.175);
    }

    #[test]
    fn cosine_horn_starts_wide() {
        let af = make_tube(TubeShape::CosineHorn, 0.175, 3e-4, 4).unwrap();
        assert!((af.samples()[0].area - 4.5e-4).abs() < 1e-18);
        assert!((af.samples()[2].area - 1.5e-4).abs() < 1e-15);
    }

    #[test]
    fn tube_rejects_single_segment() {
        assert!(make_tube(TubeShape::Cylinder, 0.175, 3e-4, 1).is_err());
        assert!(make_tube(TubeShape::Cylinder, 0.0, 3e-4, 4).is_err());
    }

    #[test]
    fn make_tube_round_trips_through_text() {
        let af = make_tube(TubeShape::CosineHorn, 0.17, 2e-4, 19).unwrap();
        assert_eq!(af.len(), 20);
        assert_eq!(AreaFunction::parse(&af.to_text()).unwrap(), af);
    }

    #[test]
    fn cylinder_mesh_volume_and_tag_areas() {
        let (l, r) = (0.175, 0.01);
        let mesh = make_cylinder_mesh(l, r, 0.005).unwrap();
        let disk = PI * r * r;
        assert!(
            (mesh.volume() / (disk * l) - 1.0).abs() < 0.05,
            "volume {}",
            mesh.volume()
        );
        for tag in [BoundaryTag::Mouth, BoundaryTag::Glottis] {
            let a = mesh.tag_area(tag);
            assert!((a / disk - 1.0).abs() < 0.05, "{tag}: {a}");
        }
        assert!(mesh.tag_count(BoundaryTag::Wall) > 0);
        // polygonal disk areas agree exactly on both ends
        assert!(
            (mesh.tag_area(BoundaryTag::Mouth) - mesh.tag_area(BoundaryTag::Glottis)).abs() < 1e-15
        );
    }

    #[test]
    fn cylinder_mesh_rejects_coarse_input() {
        assert!(make_cylinder_mesh(0.175, 0.01, 0.2).is_err());
        assert!(make_cylinder_mesh(0.175, 0.01, 0.05).is_err());
        assert!(make_cylinder_mesh(0.175, -0.01, 0.005).is_err());
    }

    #[test]
    fn box_mesh_volume_and_tags() {
        let mesh = make_box_mesh([0.17, 0.03, 0.03], [10, 2, 3]).unwrap();
        assert_eq!(mesh.tets().len(), 6 * 60);
        assert!((mesh.volume() - 0.17 * 0.03 * 0.03).abs() < 1e-15);
        assert!((mesh.tag_area(BoundaryTag::Mouth) - 9e-4).abs() < 1e-15);
        assert!((mesh.tag_area(BoundaryTag::Glottis) - 9e-4).abs() < 1e-15);
        assert!((mesh.tag_area(BoundaryTag::Wall) - 4.0 * 0.17 * 0.03).abs() < 1e-14);
    }
}
