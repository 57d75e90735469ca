//! Closed-form Green's kernels of the unit disk.
//!
//! With the image point y/|y|^2 of the circle inversion, the Dirichlet and
//! Neumann kernels are
//!
//! ```text
//! G_D(x,y) = -(1/2pi) [ ln|x-y| - ln( |y| |x - y/|y|^2| ) ]
//! G_N(x,y) = -(1/2pi) [ ln|x-y| + ln( |y| |x - y/|y|^2| ) ] + c
//! ```
//!
//! The reflected factor is evaluated as | |y| x - y/|y| |, which is stable
//! for every nonzero y; the y = 0 limit of that factor is 1, handled by an
//! explicit formula. With c = 0 the Neumann kernel has boundary average
//! zero (the mean of ln|x - z| over the unit circle is ln max(|z|, 1), so
//! the two log terms average to ln|y| - ln|y| = 0); the `normalization`
//! field exists because any constant is admissible and the combination
//! below must not depend on it.
//!
//! The nonlocal problem's kernel combines both with the antipode y* = -y:
//!
//! ```text
//! G_P(x,y) = (1/2) [ G_D(x,y) + G_D(x,y*) + G_N(x,y) - G_N(x,y*) ]
//! ```
//!
//! G_P is symmetric, vanishes antisymmetrically on the boundary
//! (G_P(x,y) + G_P(-x,y) = 0 for |x| = 1), and is independent of the
//! Neumann constant, which cancels in the difference.

use crate::geometry::SymmetricMesh;
use crate::{Error, Result};

use std::f64::consts::PI;

const COINCIDENCE_TOL: f64 = 1e-14;

/// Which kernel a `GreensKernel` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreensKind {
    DirichletDisk,
    NeumannDisk,
    ProblemPDisk,
}

/// A Green's kernel of the unit disk with an explicit Neumann constant.
#[derive(Debug, Clone, Copy)]
pub struct GreensKernel {
    pub kind: GreensKind,
    /// Additive constant of the Neumann kernel; zero gives a kernel with
    /// boundary average zero. ProblemPDisk does not depend on it.
    pub normalization: f64,
}

impl GreensKernel {
    pub fn new(kind: GreensKind) -> Self {
        GreensKernel {
            kind,
            normalization: 0.0,
        }
    }

    pub fn eval(&self, x: [f64; 2], y: [f64; 2]) -> Result<f64> {
        match self.kind {
            GreensKind::DirichletDisk => green_dirichlet_disk(x, y),
            GreensKind::NeumannDisk => green_neumann_disk_with(x, y, self.normalization),
            GreensKind::ProblemPDisk => green_p_disk_with(x, y, self.normalization),
        }
    }
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn check_args(x: [f64; 2], y: [f64; 2]) -> Result<()> {
    // x may sit on the closed disk (boundary traces are meaningful),
    // the source point must be interior
    if norm(x) > 1.0 + 1e-12 {
        return Err(Error::DomainError(format!("x = {x:?} outside the unit disk")));
    }
    if norm(y) >= 1.0 {
        return Err(Error::DomainError(format!("source y = {y:?} not interior")));
    }
    Ok(())
}

/// ln of the reflected-image factor |y| |x - y/|y|^2|, computed stably as
/// | |y| x - y/|y| |; zero at y = 0 by the explicit limit.
fn ln_image_factor(x: [f64; 2], y: [f64; 2]) -> f64 {
    let r = norm(y);
    if r == 0.0 {
        return 0.0;
    }
    let w = [r * x[0] - y[0] / r, r * x[1] - y[1] / r];
    norm(w).ln()
}

/// Dirichlet kernel of the unit disk.
pub fn green_dirichlet_disk(x: [f64; 2], y: [f64; 2]) -> Result<f64> {
    check_args(x, y)?;
    let d = norm([x[0] - y[0], x[1] - y[1]]);
    if d < COINCIDENCE_TOL {
        return Err(Error::CoincidentPoints(COINCIDENCE_TOL));
    }
    Ok(-(d.ln() - ln_image_factor(x, y)) / (2.0 * PI))
}

/// Neumann kernel of the unit disk with boundary-average-zero constant.
pub fn green_neumann_disk(x: [f64; 2], y: [f64; 2]) -> Result<f64> {
    green_neumann_disk_with(x, y, 0.0)
}

/// Neumann kernel with an explicit additive constant.
pub fn green_neumann_disk_with(x: [f64; 2], y: [f64; 2], c: f64) -> Result<f64> {
    check_args(x, y)?;
    let d = norm([x[0] - y[0], x[1] - y[1]]);
    if d < COINCIDENCE_TOL {
        return Err(Error::CoincidentPoints(COINCIDENCE_TOL));
    }
    Ok(-(d.ln() + ln_image_factor(x, y)) / (2.0 * PI) + c)
}

/// Kernel of the nonlocal problem on the unit disk.
pub fn green_p_disk(x: [f64; 2], y: [f64; 2]) -> Result<f64> {
    green_p_disk_with(x, y, 0.0)
}

/// As `green_p_disk` with an explicit Neumann constant; the value is
/// independent of `c` up to rounding, and exactly so for y = 0 where the
/// two Neumann terms coincide.
pub fn green_p_disk_with(x: [f64; 2], y: [f64; 2], c: f64) -> Result<f64> {
    let ystar = [-y[0], -y[1]];
    if norm([x[0] - ystar[0], x[1] - ystar[1]]) < COINCIDENCE_TOL {
        return Err(Error::CoincidentPoints(COINCIDENCE_TOL));
    }
    let gd = green_dirichlet_disk(x, y)?;
    let gd_star = green_dirichlet_disk(x, ystar)?;
    let gn = green_neumann_disk_with(x, y, c)?;
    let gn_star = green_neumann_disk_with(x, ystar, c)?;
    // grouped so that the y = 0 case collapses exactly to G_D(x, 0)
    Ok(0.5 * ((gd + gd_star) + (gn - gn_star)))
}

/// Solve -Lap u = f on the unit disk through the kernel representation
/// u(x) = int G_P(x, y) f(y) dy, by centroid quadrature over `quad_mesh`.
///
/// Evaluation points must be interior and must not collide with a
/// quadrature node or its antipode (the kernel is singular there); the
/// guard triggers below 1e-9 of the local cell diameter.
pub fn solve_via_green(
    f: &dyn Fn(f64, f64) -> f64,
    eval_points: &[[f64; 2]],
    quad_mesh: &SymmetricMesh,
) -> Result<Vec<f64>> {
    struct Cell {
        centroid: [f64; 2],
        weight: f64,
        diameter: f64,
    }
    let cells: Vec<Cell> = quad_mesh
        .triangles
        .iter()
        .map(|tri| {
            let p = [
                quad_mesh.nodes[tri[0]],
                quad_mesh.nodes[tri[1]],
                quad_mesh.nodes[tri[2]],
            ];
            let area = 0.5
                * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
            let centroid = [
                (p[0][0] + p[1][0] + p[2][0]) / 3.0,
                (p[0][1] + p[1][1] + p[2][1]) / 3.0,
            ];
            let mut diameter = 0.0f64;
            for e in 0..3 {
                let q = p[(e + 1) % 3];
                diameter = diameter.max((p[e][0] - q[0]).hypot(p[e][1] - q[1]));
            }
            Cell {
                centroid,
                weight: area,
                diameter,
            }
        })
        .collect();

    let mut out = Vec::with_capacity(eval_points.len());
    for &x in eval_points {
        if norm(x) >= 1.0 {
            return Err(Error::Invalid(format!("evaluation point {x:?} not interior")));
        }
        for cell in &cells {
            let c = cell.centroid;
            let d_direct = (x[0] - c[0]).hypot(x[1] - c[1]);
            let d_antipode = (x[0] + c[0]).hypot(x[1] + c[1]);
            if d_direct < 1e-9 * cell.diameter || d_antipode < 1e-9 * cell.diameter {
                return Err(Error::EvaluationTooClose(x[0], x[1]));
            }
        }
        let mut u = 0.0;
        for cell in &cells {
            let c = cell.centroid;
            let fv = f(c[0], c[1]);
            if fv != 0.0 {
                u += cell.weight * fv * green_p_disk(x, c)?;
            }
        }
        out.push(u);
    }
    Ok(out)
}
