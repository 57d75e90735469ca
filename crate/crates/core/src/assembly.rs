//! Linear finite element assembly and boundary-condition reduction.
//!
//! Stiffness entries come from exact triangle edge geometry, the mass
//! matrix is the exact (consistent, not lumped) P1 mass. Three boundary
//! conditions are supported:
//! - `FreeNeumann`: the unconstrained weak form; zero normal derivative is
//!   its natural condition.
//! - `Dirichlet`: boundary rows and columns eliminated.
//! - `NonlocalP`: for each antipodal boundary pair the slave DOF is
//!   eliminated with value -u(master). The normal-derivative symmetry
//!   across the pair is the natural condition of the constrained weak form
//!   and is never imposed algebraically; the reduced matrices are P^T K P
//!   and P^T M P with +1 on masters and interior nodes and -1 on slave rows.
//!
//! Assembly order is fixed (triangle index, then local index), so identical
//! meshes produce bitwise-identical matrices.

use crate::geometry::SymmetricMesh;
use crate::sparse::{EnvelopeCholesky, SparseSym};
use crate::{Error, Result};

use std::fmt;

/// Boundary-condition tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    FreeNeumann,
    Dirichlet,
    NonlocalP,
}

impl fmt::Display for Bc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Bc::FreeNeumann => "neumann",
            Bc::Dirichlet => "dirichlet",
            Bc::NonlocalP => "nonlocal",
        };
        f.write_str(s)
    }
}

/// Fate of a mesh node under boundary-condition reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofAssignment {
    /// Node carries reduced DOF `index` with the given sign (-1 marks a
    /// nonlocal slave whose value is the negative of its master's).
    Reduced { index: usize, sign: f64 },
    /// Node removed from the system (Dirichlet boundary).
    Eliminated,
}

/// Assembled stiffness/mass pair plus the reduction bookkeeping.
#[derive(Debug, Clone)]
pub struct OperatorMatrices {
    pub stiffness: SparseSym,
    pub mass: SparseSym,
    pub bc: Bc,
    /// Mesh node index -> reduced DOF assignment.
    pub dof_map: Vec<DofAssignment>,
}

impl OperatorMatrices {
    pub fn reduced_dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// Expand a reduced coefficient vector to full node numbering.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.dof_map.len()];
        for (node, assign) in self.dof_map.iter().enumerate() {
            if let DofAssignment::Reduced { index, sign } = assign {
                full[node] = sign * reduced[*index];
            }
        }
        full
    }

    /// Restrict a full nodal functional (load vector) to reduced DOFs:
    /// F_red = P^T F.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let mut red = vec![0.0; self.reduced_dim()];
        for (node, assign) in self.dof_map.iter().enumerate() {
            if let DofAssignment::Reduced { index, sign } = assign {
                red[*index] += sign * full[node];
            }
        }
        red
    }
}

/// Assemble the free (unconstrained) stiffness and mass matrices.
pub fn assemble_free(mesh: &SymmetricMesh) -> OperatorMatrices {
    let n = mesh.nodes.len();
    let mut kt = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mt = Vec::with_capacity(9 * mesh.triangles.len());
    for tri in &mesh.triangles {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        // edge opposite each vertex
        let e = [
            [p[2][0] - p[1][0], p[2][1] - p[1][1]],
            [p[0][0] - p[2][0], p[0][1] - p[2][1]],
            [p[1][0] - p[0][0], p[1][1] - p[0][1]],
        ];
        let double_area = e[2][0] * (-e[1][1]) - e[2][1] * (-e[1][0]);
        let area = 0.5 * double_area;
        for r in 0..3 {
            for c in 0..3 {
                let k = (e[r][0] * e[c][0] + e[r][1] * e[c][1]) / (4.0 * area);
                kt.push((tri[r], tri[c], k));
                let m = if r == c { area / 6.0 } else { area / 12.0 };
                mt.push((tri[r], tri[c], m));
            }
        }
    }
    OperatorMatrices {
        stiffness: SparseSym::from_triplets(n, &kt),
        mass: SparseSym::from_triplets(n, &mt),
        bc: Bc::FreeNeumann,
        dof_map: (0..n)
            .map(|i| DofAssignment::Reduced { index: i, sign: 1.0 })
            .collect(),
    }
}

/// Eliminate boundary rows and columns (homogeneous Dirichlet).
pub fn apply_dirichlet(ops: &OperatorMatrices, mesh: &SymmetricMesh) -> Result<OperatorMatrices> {
    if ops.bc != Bc::FreeNeumann {
        return Err(Error::AlreadyReduced(ops.bc.to_string()));
    }
    let n = mesh.nodes.len();
    let mut on_boundary = vec![false; n];
    for &b in &mesh.boundary_nodes {
        on_boundary[b] = true;
    }
    let mut dof_map = Vec::with_capacity(n);
    let mut next = 0usize;
    for i in 0..n {
        if on_boundary[i] {
            dof_map.push(DofAssignment::Eliminated);
        } else {
            dof_map.push(DofAssignment::Reduced { index: next, sign: 1.0 });
            next += 1;
        }
    }
    Ok(OperatorMatrices {
        stiffness: reduce_matrix(&ops.stiffness, &dof_map, next),
        mass: reduce_matrix(&ops.mass, &dof_map, next),
        bc: Bc::Dirichlet,
        dof_map,
    })
}

/// Apply the nonlocal antipodal conditions by signed master-slave
/// elimination over the boundary pairs.
pub fn apply_nonlocal(ops: &OperatorMatrices, mesh: &SymmetricMesh) -> Result<OperatorMatrices> {
    if ops.bc != Bc::FreeNeumann {
        return Err(Error::AlreadyReduced(ops.bc.to_string()));
    }
    let n = mesh.nodes.len();
    let mut master_of = vec![usize::MAX; n];
    let mut is_slave = vec![false; n];
    for &(master, slave) in &mesh.boundary_pairs {
        is_slave[slave] = true;
        master_of[slave] = master;
    }
    for &b in &mesh.boundary_nodes {
        let in_pair = is_slave[b] || mesh.boundary_pairs.iter().any(|&(m, _)| m == b);
        if !in_pair {
            return Err(Error::PairingIncomplete(b));
        }
    }
    // reduced indices for all non-slave nodes, in node order
    let mut index = vec![usize::MAX; n];
    let mut next = 0usize;
    for i in 0..n {
        if !is_slave[i] {
            index[i] = next;
            next += 1;
        }
    }
    let dof_map: Vec<DofAssignment> = (0..n)
        .map(|i| {
            if is_slave[i] {
                DofAssignment::Reduced {
                    index: index[master_of[i]],
                    sign: -1.0,
                }
            } else {
                DofAssignment::Reduced { index: index[i], sign: 1.0 }
            }
        })
        .collect();
    Ok(OperatorMatrices {
        stiffness: reduce_matrix(&ops.stiffness, &dof_map, next),
        mass: reduce_matrix(&ops.mass, &dof_map, next),
        bc: Bc::NonlocalP,
        dof_map,
    })
}

/// P^T A P for the signed selection encoded in `dof_map`.
fn reduce_matrix(a: &SparseSym, dof_map: &[DofAssignment], reduced_dim: usize) -> SparseSym {
    let mut triplets = Vec::with_capacity(a.nnz());
    for i in 0..a.dim() {
        let DofAssignment::Reduced { index: ri, sign: si } = dof_map[i] else {
            continue;
        };
        for (j, v) in a.row(i) {
            let DofAssignment::Reduced { index: rj, sign: sj } = dof_map[j] else {
                continue;
            };
            triplets.push((ri, rj, si * sj * v));
        }
    }
    SparseSym::from_triplets(reduced_dim, &triplets)
}

/// Signed permutation of reduced DOFs induced by the antipodal map, for
/// the free and Dirichlet systems: (S v)(i) = v(sigma(i)).
pub fn involution_action(ops: &OperatorMatrices, mesh: &SymmetricMesh) -> Result<SparseSym> {
    if ops.bc == Bc::NonlocalP {
        return Err(Error::Invalid(
            "involution action is built only for free and Dirichlet systems".into(),
        ));
    }
    let m = ops.reduced_dim();
    let mut triplets = Vec::with_capacity(m);
    for (node, assign) in ops.dof_map.iter().enumerate() {
        let DofAssignment::Reduced { index: i, .. } = assign else {
            continue;
        };
        let partner = mesh.involution[node];
        let DofAssignment::Reduced { index: j, .. } = ops.dof_map[partner] else {
            return Err(Error::SymmetryBroken(format!(
                "node {node} reduced but its antipode {partner} eliminated"
            )));
        };
        triplets.push((*i, j, 1.0));
    }
    Ok(SparseSym::from_triplets(m, &triplets))
}

/// Nodal load vector for the right-hand side f, by centroid quadrature.
pub fn assemble_load(mesh: &SymmetricMesh, f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut load = vec![0.0; mesh.nodes.len()];
    for tri in &mesh.triangles {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let area = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
        let cx = (p[0][0] + p[1][0] + p[2][0]) / 3.0;
        let cy = (p[0][1] + p[1][1] + p[2][1]) / 3.0;
        let contrib = area / 3.0 * f(cx, cy);
        for &v in tri {
            load[v] += contrib;
        }
    }
    load
}

/// Solve the source problem -Lap u = f under the operator's boundary
/// condition; returns the solution in full node numbering.
pub fn solve_poisson(ops: &OperatorMatrices, load_full: &[f64]) -> Result<Vec<f64>> {
    if ops.bc == Bc::FreeNeumann {
        return Err(Error::Invalid(
            "free Neumann source problem is singular; reduce the operator first".into(),
        ));
    }
    let rhs = ops.restrict(load_full);
    let chol = EnvelopeCholesky::factor(&ops.stiffness)?;
    let u_red = chol.solve(&rhs);
    Ok(ops.expand(&u_red))
}

/// Evaluate a P1 nodal field at an arbitrary point (linear interpolation
/// on the containing triangle). Returns None outside the mesh.
pub fn eval_p1(mesh: &SymmetricMesh, nodal: &[f64], x: f64, y: f64) -> Option<f64> {
    for tri in &mesh.triangles {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
            - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
        let l1 = ((x - p[0][0]) * (p[2][1] - p[0][1]) - (y - p[0][1]) * (p[2][0] - p[0][0])) / det;
        let l2 = ((p[1][0] - p[0][0]) * (y - p[0][1]) - (p[1][1] - p[0][1]) * (x - p[0][0])) / det;
        let l0 = 1.0 - l1 - l2;
        let eps = -1e-12;
        if l0 >= eps && l1 >= eps && l2 >= eps {
            return Some(l0 * nodal[tri[0]] + l1 * nodal[tri[1]] + l2 * nodal[tri[2]]);
        }
    }
    None
}
