//! Antipodally exact triangulation of centrally symmetric domains.
//!
//! Node coordinates are generated only for a representative half of each
//! antipodal orbit; the partner is stored as the exact IEEE negation. The
//! involution is therefore bitwise, never a floating-point match, which is
//! what the signed master-slave reduction in assembly requires.
//!
//! Two generators are used:
//! - star-shaped domains (disk, ellipse, polar-perturbed) get a spiderweb
//!   mesh: ring j of radius (j/N) r(theta) carries 6j nodes, bands are
//!   stitched by an integer angle merge, and the innermost hexagon is split
//!   along a diagonal through the origin;
//! - rectangles get a tensor grid with odd subdivision counts (odd counts
//!   keep the origin and the symmetry axes free of nodes) and a uniform
//!   diagonal split, which is antipodally invariant.

use super::DomainSpec;
use crate::{Error, Result};

use std::collections::HashSet;
use std::f64::consts::PI;

/// Triangulation equipped with an exact antipodal node involution.
#[derive(Debug, Clone)]
pub struct SymmetricMesh {
    /// Node coordinates.
    pub nodes: Vec<[f64; 2]>,
    /// Counterclockwise node-index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Indices of nodes on the domain boundary.
    pub boundary_nodes: Vec<usize>,
    /// Antipodal involution: coords[sigma(i)] = -coords[i] bitwise.
    pub involution: Vec<usize>,
    /// Boundary pairs (master, slave), each orbit listed exactly once.
    /// The master is the node with x1 > 0, ties on x1 = 0 broken by x2 > 0.
    pub boundary_pairs: Vec<(usize, usize)>,
    /// Target mesh size used to generate this mesh.
    pub h: f64,
}

impl SymmetricMesh {
    /// Signed double area of a triangle (positive for counterclockwise).
    fn double_area(&self, tri: &[usize; 3]) -> f64 {
        let a = self.nodes[tri[0]];
        let b = self.nodes[tri[1]];
        let c = self.nodes[tri[2]];
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    }

    /// Sum of triangle areas (the polygonal approximation of the domain area).
    pub fn mesh_area(&self) -> f64 {
        self.triangles.iter().map(|t| 0.5 * self.double_area(t)).sum()
    }

    /// Longest edge over all triangles.
    pub fn max_edge(&self) -> f64 {
        let mut m: f64 = 0.0;
        for t in &self.triangles {
            for e in 0..3 {
                let p = self.nodes[t[e]];
                let q = self.nodes[t[(e + 1) % 3]];
                m = m.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        m
    }

    /// Check every structural invariant; used by tests and after generation.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.involution.len() != n {
            return Err(Error::SymmetryBroken("involution length mismatch".into()));
        }
        for i in 0..n {
            let s = self.involution[i];
            if s >= n || self.involution[s] != i {
                return Err(Error::SymmetryBroken(format!("sigma not an involution at {i}")));
            }
            if s == i {
                return Err(Error::SymmetryBroken(format!("sigma has fixed point {i}")));
            }
            let a = self.nodes[i];
            let b = self.nodes[s];
            if (-a[0]).to_bits() != b[0].to_bits() || (-a[1]).to_bits() != b[1].to_bits() {
                return Err(Error::SymmetryBroken(format!(
                    "coords of {s} are not the exact negation of {i}"
                )));
            }
        }
        // triangle set closed under sigma (up to cyclic rotation)
        let keys: HashSet<[usize; 3]> = self.triangles.iter().map(canonical_tri).collect();
        if keys.len() != self.triangles.len() {
            return Err(Error::MeshDegenerate("duplicate triangle".into()));
        }
        for t in &self.triangles {
            let image = [
                self.involution[t[0]],
                self.involution[t[1]],
                self.involution[t[2]],
            ];
            if !keys.contains(&canonical_tri(&image)) {
                return Err(Error::SymmetryBroken(format!(
                    "triangle {t:?} has no antipodal image"
                )));
            }
        }
        for t in &self.triangles {
            if self.double_area(t) <= 0.0 {
                return Err(Error::MeshDegenerate(format!("non-ccw triangle {t:?}")));
            }
        }
        // each boundary node in exactly one pair
        let mut seen = vec![false; n];
        let boundary: HashSet<usize> = self.boundary_nodes.iter().copied().collect();
        for &(a, b) in &self.boundary_pairs {
            if self.involution[a] != b {
                return Err(Error::SymmetryBroken(format!("pair ({a},{b}) not antipodal")));
            }
            if !boundary.contains(&a) || !boundary.contains(&b) {
                return Err(Error::SymmetryBroken(format!("pair ({a},{b}) off boundary")));
            }
            if seen[a] || seen[b] {
                return Err(Error::SymmetryBroken(format!("node in two pairs: ({a},{b})")));
            }
            seen[a] = true;
            seen[b] = true;
        }
        for &b in &self.boundary_nodes {
            if !seen[b] {
                return Err(Error::PairingIncomplete(b));
            }
        }
        Ok(())
    }
}

/// Rotate triangle indices so the smallest comes first (orientation kept).
fn canonical_tri(t: &[usize; 3]) -> [usize; 3] {
    let k = (0..3).min_by_key(|&k| t[k]).unwrap();
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}

/// Build a triangulation of `spec` with target mesh size `h`.
///
/// The node set is exactly invariant under x -> -x; the maximum triangle
/// diameter is at most 2h. Fails with `MeshDegenerate` if a triangle area
/// falls below 1e-12 h^2 even after refinement retries.
pub fn build_mesh(spec: &DomainSpec, h: f64) -> Result<SymmetricMesh> {
    spec.validate()?;
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("mesh size must be positive, got {h}")));
    }
    let inradius = spec.min_boundary_radius();
    if h >= inradius {
        return Err(Error::Invalid(format!(
            "mesh size {h} must be smaller than the domain inradius {inradius}"
        )));
    }
    let mut attempt = 0usize;
    let mut refine = 1.0f64;
    loop {
        let mesh = match spec {
            DomainSpec::Rectangle { a, b } => build_rect(*a, *b, h, refine)?,
            _ => build_spiderweb(spec, h, refine)?,
        };
        let max_edge = mesh.max_edge();
        let min_area = mesh
            .triangles
            .iter()
            .map(|t| 0.5 * mesh.double_area(t))
            .fold(f64::INFINITY, f64::min);
        if max_edge <= 2.0 * h && min_area > 1e-12 * h * h {
            mesh.validate()?;
            return Ok(mesh);
        }
        attempt += 1;
        if attempt > 12 {
            return Err(Error::MeshDegenerate(format!(
                "could not reach target size (max edge {max_edge:.3e}, min area {min_area:.3e})"
            )));
        }
        refine *= 1.3;
    }
}

/// Spiderweb mesh for star-shaped domains. Ring j in 1..=nr carries 6j
/// nodes; node t of ring j sits at angle fraction t / (6j) of a full turn
/// and radius (j/nr) r(theta).
fn build_spiderweb(spec: &DomainSpec, h: f64, refine: f64) -> Result<SymmetricMesh> {
    // initial ring count from the boundary perimeter and the max radius
    let samples = 4096;
    let mut perimeter = 0.0;
    let mut r_max: f64 = 0.0;
    let mut prev = [spec.boundary_radius(0.0), 0.0];
    for i in 1..=samples {
        let th = 2.0 * PI * i as f64 / samples as f64;
        let r = spec.boundary_radius(th);
        r_max = r_max.max(r);
        let p = [r * th.cos(), r * th.sin()];
        perimeter += ((p[0] - prev[0]).powi(2) + (p[1] - prev[1]).powi(2)).sqrt();
        prev = p;
    }
    let target = h / refine;
    let nr = ((perimeter / (6.0 * target)).max(r_max / target).ceil() as usize).max(3);

    // nodes, ring by ring; ring j starts at 3 j (j - 1)
    let ring_start = |j: usize| 3 * j * (j - 1);
    let n_nodes = 3 * nr * (nr + 1);
    let mut nodes = vec![[0.0f64; 2]; n_nodes];
    let mut involution = vec![0usize; n_nodes];
    for j in 1..=nr {
        let count = 6 * j;
        let half = count / 2;
        let rho = j as f64 / nr as f64;
        let base = ring_start(j);
        for t in 0..half {
            let theta = 2.0 * PI * t as f64 / count as f64;
            let r = rho * spec.boundary_radius(theta);
            nodes[base + t] = [r * theta.cos(), r * theta.sin()];
        }
        for t in half..count {
            let p = nodes[base + t - half];
            nodes[base + t] = [-p[0], -p[1]];
        }
        for t in 0..count {
            involution[base + t] = base + (t + half) % count;
        }
    }

    let mut triangles = Vec::new();
    // innermost hexagon split along the diagonal v0 - v3
    let hex = ring_start(1);
    let mut half_core = vec![[hex, hex + 1, hex + 2], [hex, hex + 2, hex + 3]];
    let imgs: Vec<[usize; 3]> = half_core
        .iter()
        .map(|t| [involution[t[0]], involution[t[1]], involution[t[2]]])
        .collect();
    half_core.extend(imgs);
    triangles.extend(half_core);

    // bands: stitch ring j (p = 6j) to ring j+1 (q = 6j+6) over the half
    // turn, then emit the antipodal image of every half-band triangle
    for j in 1..nr {
        let p = 6 * j;
        let q = 6 * (j + 1);
        let ib = ring_start(j);
        let ob = ring_start(j + 1);
        let mut half_band = Vec::with_capacity(p / 2 + q / 2);
        let mut i = 0usize; // inner pointer, 0..=p/2
        let mut o = 0usize; // outer pointer, 0..=q/2
        while i < p / 2 || o < q / 2 {
            // compare next angles (i+1)/p vs (o+1)/q exactly via integers
            let advance_outer = if o == q / 2 {
                false
            } else if i == p / 2 {
                true
            } else {
                (o + 1) * p <= (i + 1) * q
            };
            if advance_outer {
                half_band.push([ib + i, ob + o, ob + o + 1]);
                o += 1;
            } else {
                half_band.push([ib + i, ob + o, ib + i + 1]);
                i += 1;
            }
        }
        let imgs: Vec<[usize; 3]> = half_band
            .iter()
            .map(|t| [involution[t[0]], involution[t[1]], involution[t[2]]])
            .collect();
        triangles.extend(half_band);
        triangles.extend(imgs);
    }

    let boundary_nodes: Vec<usize> = (ring_start(nr)..ring_start(nr) + 6 * nr).collect();
    let boundary_pairs = collect_boundary_pairs(&nodes, &involution, &boundary_nodes);
    Ok(SymmetricMesh {
        nodes,
        triangles,
        boundary_nodes,
        involution,
        boundary_pairs,
        h,
    })
}

/// Tensor grid on the rectangle [-a/2, a/2] x [-b/2, b/2] with odd
/// subdivision counts, every cell split along the same diagonal.
fn build_rect(a: f64, b: f64, h: f64, refine: f64) -> Result<SymmetricMesh> {
    let target = h / refine;
    let make_odd = |n: usize| if n % 2 == 0 { n + 1 } else { n };
    let nx = make_odd(((a / target).ceil() as usize).max(1));
    let ny = make_odd(((b / target).ceil() as usize).max(1));
    let n_nodes = (nx + 1) * (ny + 1);
    let idx = |i: usize, j: usize| j * (nx + 1) + i;

    let mut nodes = vec![[0.0f64; 2]; n_nodes];
    let mut involution = vec![0usize; n_nodes];
    for j in 0..=ny {
        for i in 0..=nx {
            let here = idx(i, j);
            let partner = idx(nx - i, ny - j);
            involution[here] = partner;
            if here < partner {
                nodes[here] = [
                    -0.5 * a + i as f64 * (a / nx as f64),
                    -0.5 * b + j as f64 * (b / ny as f64),
                ];
            }
        }
    }
    for u in 0..n_nodes {
        let partner = involution[u];
        if u > partner {
            let p = nodes[partner];
            nodes[u] = [-p[0], -p[1]];
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let n00 = idx(i, j);
            let n10 = idx(i + 1, j);
            let n01 = idx(i, j + 1);
            let n11 = idx(i + 1, j + 1);
            triangles.push([n00, n10, n11]);
            triangles.push([n00, n11, n01]);
        }
    }

    let mut boundary_nodes = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            if i == 0 || i == nx || j == 0 || j == ny {
                boundary_nodes.push(idx(i, j));
            }
        }
    }
    let boundary_pairs = collect_boundary_pairs(&nodes, &involution, &boundary_nodes);
    Ok(SymmetricMesh {
        nodes,
        triangles,
        boundary_nodes,
        involution,
        boundary_pairs,
        h,
    })
}

/// Pair each boundary node with its antipode, master first.
fn collect_boundary_pairs(
    nodes: &[[f64; 2]],
    involution: &[usize],
    boundary_nodes: &[usize],
) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(boundary_nodes.len() / 2);
    for &i in boundary_nodes {
        let p = nodes[i];
        let is_master = p[0] > 0.0 || (p[0] == 0.0 && p[1] > 0.0);
        if is_master {
            pairs.push((i, involution[i]));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::area;
    use approx::assert_relative_eq;

    #[test]
    fn disk_mesh_invariants() {
        let mesh = build_mesh(&DomainSpec::Disk { radius: 1.0 }, 0.1).unwrap();
        mesh.validate().unwrap();
        for i in 0..mesh.nodes.len() {
            assert_ne!(mesh.involution[i], i);
            let r = (mesh.nodes[i][0].powi(2) + mesh.nodes[i][1].powi(2)).sqrt();
            assert!(r <= 1.0 + 1e-12, "node escaped the disk: r = {r}");
        }
        assert!(mesh.max_edge() <= 0.2);
    }

    #[test]
    fn rectangle_nodes_reflect_exactly() {
        let mesh = build_mesh(&DomainSpec::Rectangle { a: 1.0, b: 1.0 }, 0.25).unwrap();
        mesh.validate().unwrap();
        for i in 0..mesh.nodes.len() {
            let s = mesh.involution[i];
            assert_eq!((-mesh.nodes[i][0]).to_bits(), mesh.nodes[s][0].to_bits());
            assert_eq!((-mesh.nodes[i][1]).to_bits(), mesh.nodes[s][1].to_bits());
        }
    }

    #[test]
    fn ellipse_mesh_area_close_to_pi() {
        // a * b = 1 so the exact area is pi
        let spec = DomainSpec::Ellipse { a: 1.2, b: 1.0 / 1.2 };
        let mesh = build_mesh(&spec, 0.05).unwrap();
        let err = (mesh.mesh_area() - PI).abs() / PI;
        assert!(err < 0.01, "polygonal area error {err:.2e} exceeds 1%");
    }

    #[test]
    fn polygonal_area_second_order_convergence() {
        let spec = DomainSpec::Disk { radius: 1.0 };
        let exact = area(&spec);
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| (build_mesh(&spec, h).unwrap().mesh_area() - exact).abs())
            .collect();
        // each halving of h should cut the area defect by roughly 4; allow slack
        assert!(errs[1] < errs[0] / 2.5, "{errs:?}");
        assert!(errs[2] < errs[1] / 2.5, "{errs:?}");
    }

    #[test]
    fn polar_perturbed_mesh_valid() {
        let spec = DomainSpec::PolarPerturbed {
            r0: 1.0,
            terms: vec![(1, 0.2), (3, 0.05)],
        };
        let mesh = build_mesh(&spec, 0.08).unwrap();
        mesh.validate().unwrap();
        assert_relative_eq!(mesh.mesh_area(), area(&spec), max_relative = 0.01);
    }

    #[test]
    fn mesh_size_must_fit_inside() {
        let err = build_mesh(&DomainSpec::Disk { radius: 0.5 }, 0.6);
        assert!(err.is_err());
    }

    #[test]
    fn boundary_pair_masters_have_positive_x1() {
        let mesh = build_mesh(&DomainSpec::Disk { radius: 1.0 }, 0.2).unwrap();
        for &(master, slave) in &mesh.boundary_pairs {
            let m = mesh.nodes[master];
            let s = mesh.nodes[slave];
            assert!(m[0] > 0.0 || (m[0] == 0.0 && m[1] > 0.0), "master {m:?}");
            assert!(s[0] < 0.0 || (s[0] == 0.0 && s[1] < 0.0), "slave {s:?}");
        }
        assert_eq!(mesh.boundary_pairs.len() * 2, mesh.boundary_nodes.len());
    }
}
