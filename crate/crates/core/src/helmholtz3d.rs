//! Helmholtz resonances of a tagged tetrahedral air column.
//!
//! Piecewise linear Galerkin discretization of
//!
//! ```text
//! λ²Φ − c²ΔΦ = 0           in Ω
//! Φ = 0                    on Γ1 (mouth)
//! αλΦ + ∂Φ/∂ν = 0          on Γ2 (walls)
//! gλΦ + c ∂Φ/∂ν = 0        on Γ3 (glottis plane)
//! ```
//!
//! gives `λ²M + λC + K = 0` with `M = ∫ΦΨ`, `K = c²∫∇Φ·∇Ψ` and
//! `C = c²α∮_{Γ2}ΦΨ + c·g∮_{Γ3}ΦΨ`. Γ1 vertices are eliminated.
//!
//! `g` is the glottis admittance relative to a plane wave. At `g = 1` the
//! glottis plane absorbs a normally incident plane wave completely, so a
//! uniform duct has no resonances at all. Smaller values reflect part of the
//! wave back into the tract.

use num_complex::Complex64;

use crate::geometry::{signed_volume, triangle_area, BoundaryTag, GeometryError, TetMesh};
use crate::numlin::{qep_solve, QepOptions, SparseMatrix, TripletBuilder};
use crate::resonance::{Method, ResonanceSet};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzParams {
    /// Sound speed (m/s).
    pub c: f64,
    /// Wall dissipation coefficient; 0 is a hard wall.
    pub alpha: f64,
    /// Glottis-plane admittance relative to the plane-wave admittance.
    pub glottis_admittance: f64,
}

pub const DEFAULT_SOUND_SPEED: f64 = 350.0;
pub const DEFAULT_GLOTTIS_ADMITTANCE: f64 = 0.05;

impl Default for HelmholtzParams {
    fn default() -> Self {
        Self {
            c: DEFAULT_SOUND_SPEED,
            alpha: 0.0,
            glottis_admittance: DEFAULT_GLOTTIS_ADMITTANCE,
        }
    }
}

impl HelmholtzParams {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.c > 0.0) || !(self.alpha >= 0.0) || !(self.glottis_admittance >= 0.0) {
            return Err(GeometryError::InvalidDimensions(format!(
                "need c > 0, alpha >= 0, glottis admittance >= 0 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Constant-gradient P1 stiffness `∫∇φᵢ·∇φⱼ` of one tet.
pub fn element_stiffness(p: [[f64; 3]; 4]) -> [[f64; 4]; 4] {
    let vol = signed_volume(p).abs();
    let grads = barycentric_gradients(p);
    let mut k = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            k[i][j] = vol * (0..3).map(|d| grads[i][d] * grads[j][d]).sum::<f64>();
        }
    }
    k
}

/// P1 mass `∫φᵢφⱼ = V(1 + δᵢⱼ)/20` of one tet.
pub fn element_mass(p: [[f64; 3]; 4]) -> [[f64; 4]; 4] {
    let vol = signed_volume(p).abs();
    let mut m = [[vol / 20.0; 4]; 4];
    (0..4).for_each(|i| m[i][i] = vol / 10.0);
    m
}

fn barycentric_gradients(p: [[f64; 3]; 4]) -> [[f64; 3]; 4] {
    // rows of J⁻¹ where J has columns p_i − p_0
    let e: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|d| p[i + 1][d] - p[0][d]));
    let j = |r: usize, c: usize| e[c][r];
    let det = j(0, 0) * (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1))
        - j(0, 1) * (j(1, 0) * j(2, 2) - j(1, 2) * j(2, 0))
        + j(0, 2) * (j(1, 0) * j(2, 1) - j(1, 1) * j(2, 0));
    let cof = |r: usize, c: usize| {
        let rows: Vec<usize> = (0..3).filter(|&x| x != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&x| x != c).collect();
        let minor =
            j(rows[0], cols[0]) * j(rows[1], cols[1]) - j(rows[0], cols[1]) * j(rows[1], cols[0]);
        if (r + c).is_multiple_of(2) {
            minor
        } else {
            -minor
        }
    };
    // (J⁻¹)[i][d] = cof(d, i) / det
    let mut g = [[0.0; 3]; 4];
    for i in 0..3 {
        for d in 0..3 {
            g[i + 1][d] = cof(d, i) / det;
        }
    }
    for d in 0..3 {
        g[0][d] = -(g[1][d] + g[2][d] + g[3][d]);
    }
    g
}

/// Galerkin matrices over all vertices, before Dirichlet elimination.
#[derive(Debug, Clone)]
pub struct Matrices {
    pub mass: SparseMatrix,
    pub damping: SparseMatrix,
    pub stiffness: SparseMatrix,
}

/// Matrices restricted to the free (non-mouth) vertices.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub mass: SparseMatrix,
    pub damping: SparseMatrix,
    pub stiffness: SparseMatrix,
    /// `dofs[i]` is the mesh vertex of unknown `i`.
    pub dofs: Vec<usize>,
    pub n_vertices: usize,
}

impl Assembly {
    /// Expands a vector over unknowns to all vertices, zero on the mouth.
    pub fn expand(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut full = vec![Complex64::new(0.0, 0.0); self.n_vertices];
        for (&v, &xi) in self.dofs.iter().zip(x) {
            full[v] = xi;
        }
        full
    }
}

pub fn assemble_unconstrained(
    mesh: &TetMesh,
    params: &HelmholtzParams,
) -> Result<Matrices, GeometryError> {
    params.validate()?;
    let n = mesh.vertices().len();
    let c2 = params.c * params.c;
    let mut m = TripletBuilder::with_capacity(n, 16 * mesh.tets().len());
    let mut k = TripletBuilder::with_capacity(n, 16 * mesh.tets().len());
    for (ti, tet) in mesh.tets().iter().enumerate() {
        let p = mesh.tet_points(ti);
        if signed_volume(p) == 0.0 {
            return Err(GeometryError::DegenerateTet { tet: ti });
        }
        let (me, ke) = (element_mass(p), element_stiffness(p));
        for a in 0..4 {
            for b in 0..4 {
                m.add(tet[a], tet[b], me[a][b]);
                k.add(tet[a], tet[b], c2 * ke[a][b]);
            }
        }
    }
    let mut damp = TripletBuilder::new(n);
    for face in mesh.boundary() {
        let weight = match face.tag {
            BoundaryTag::Wall => c2 * params.alpha,
            BoundaryTag::Glottis => params.c * params.glottis_admittance,
            BoundaryTag::Mouth => continue,
        };
        if weight == 0.0 {
            continue;
        }
        let area = triangle_area(mesh.face_points(face));
        for a in 0..3 {
            for b in 0..3 {
                let w = if a == b { area / 6.0 } else { area / 12.0 };
                damp.add(face.tri[a], face.tri[b], weight * w);
            }
        }
    }
    Ok(Matrices {
        mass: m.build(),
        damping: damp.build(),
        stiffness: k.build(),
    })
}

/// Assembles the quadratic eigenproblem with mouth vertices eliminated.
pub fn assemble(mesh: &TetMesh, params: &HelmholtzParams) -> Result<Assembly, GeometryError> {
    mesh.require_tags(&[BoundaryTag::Mouth, BoundaryTag::Glottis])?;
    let full = assemble_unconstrained(mesh, params)?;
    let n = mesh.vertices().len();
    let mut fixed = vec![false; n];
    for f in mesh
        .boundary()
        .iter()
        .filter(|f| f.tag == BoundaryTag::Mouth)
    {
        f.tri.iter().for_each(|&v| fixed[v] = true);
    }
    let dofs: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in dofs.iter().enumerate() {
        index[v] = i;
    }
    let restrict = |a: &SparseMatrix| {
        let mut b = TripletBuilder::with_capacity(dofs.len(), a.nnz());
        for (i, j, v) in a.triplets() {
            if !fixed[i] && !fixed[j] {
                b.add(index[i], index[j], v);
            }
        }
        b.build()
    };
    Ok(Assembly {
        mass: restrict(&full.mass),
        damping: restrict(&full.damping),
        stiffness: restrict(&full.stiffness),
        dofs,
        n_vertices: n,
    })
}

/// Resonances plus mode shapes over all mesh vertices.
#[derive(Debug, Clone)]
pub struct HelmholtzSolution {
    pub resonances: ResonanceSet,
    /// `shapes[i]` belongs to `resonances.modes[i]`.
    pub shapes: Vec<Vec<Complex64>>,
}

/// The `k` lowest-frequency Helmholtz resonances and their mode shapes.
pub fn solve(
    mesh: &TetMesh,
    params: &HelmholtzParams,
    k: usize,
    opts: &QepOptions,
) -> Result<HelmholtzSolution, Error> {
    let asm = assemble(mesh, params)?;
    // twice k for conjugates plus room for spurious modes
    let nev = (2 * k + 2).min(2 * asm.dofs.len());
    let pairs = qep_solve(&asm.mass, &asm.damping, &asm.stiffness, nev, opts)?;
    let resonances = ResonanceSet::from_eigenpairs(
        Method::HelmholtzResonance,
        &pairs,
        k,
        format!(
            "mesh ({} tets), c={}, alpha={}, g={}",
            mesh.tets().len(),
            params.c,
            params.alpha,
            params.glottis_admittance
        ),
    );
    let shapes = resonances
        .modes
        .iter()
        .map(|mode| {
            let pair = pairs
                .iter()
                .find(|p| p.lambda == mode.lambda)
                .expect("mode comes from pairs");
            asm.expand(&pair.vector)
        })
        .collect();
    Ok(HelmholtzSolution { resonances, shapes })
}

/// Resonances labelled H_R.
pub fn resonances(
    mesh: &TetMesh,
    params: &HelmholtzParams,
    k: usize,
) -> Result<ResonanceSet, Error> {
    Ok(solve(mesh, params, k, &QepOptions::default())?.resonances)
}

/// Quarter-wave resonance `(2k−1)c/4L` of a closed–open duct.
pub fn quarter_wave(c: f64, length: f64, k: usize) -> f64 {
    (2 * k - 1) as f64 * c / (4.0 * length)
}
