//! Centrally symmetric planar domains and antipodally exact meshes.
//!
//! Every domain here satisfies r(theta + pi) = r(theta): with each point x
//! the domain contains its antipode x* = -x. Four parametric families are
//! supported; the disk and the rectangle admit exact spectra and serve as
//! oracles, the ellipse and the polar-perturbed disk exercise the
//! inequality harness away from closed forms.

mod config;
mod mesh;

pub use config::{load_domain_file, parse_domain_str, DomainFile};
pub use mesh::{build_mesh, SymmetricMesh};

use crate::{Error, Result};

use std::f64::consts::PI;

/// Parametric description of a centrally symmetric planar domain.
///
/// All variants are centered at the origin; central symmetry holds by
/// construction (the polar family uses only even angular frequencies).
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// Disk of the given radius.
    Disk { radius: f64 },
    /// Ellipse with semi-axes (a, b) along the coordinate axes.
    Ellipse { a: f64, b: f64 },
    /// Axis-aligned rectangle with side lengths (a, b), centered at the origin.
    Rectangle { a: f64, b: f64 },
    /// Perturbed disk with boundary r(theta) = r0 + sum eps_k cos(2k theta).
    PolarPerturbed { r0: f64, terms: Vec<(u32, f64)> },
}

impl DomainSpec {
    /// Check the domain invariants: positive dimensions, strictly positive
    /// boundary radius, origin interior.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            DomainSpec::Disk { radius } => *radius > 0.0,
            DomainSpec::Ellipse { a, b } => *a > 0.0 && *b > 0.0,
            DomainSpec::Rectangle { a, b } => *a > 0.0 && *b > 0.0,
            DomainSpec::PolarPerturbed { r0, terms } => {
                let eps_sum: f64 = terms.iter().map(|(_, e)| e.abs()).sum();
                *r0 > 0.0 && *r0 > eps_sum && terms.iter().all(|(k, _)| *k >= 1)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("invalid domain spec: {self:?}")))
        }
    }

    /// Boundary radius r(theta). For the rectangle this is the distance from
    /// the origin to the boundary along the ray of angle theta.
    pub fn boundary_radius(&self, theta: f64) -> f64 {
        match self {
            DomainSpec::Disk { radius } => *radius,
            DomainSpec::Ellipse { a, b } => {
                let (s, c) = theta.sin_cos();
                a * b / (b * b * c * c + a * a * s * s).sqrt()
            }
            DomainSpec::Rectangle { a, b } => {
                let (s, c) = theta.sin_cos();
                let rx = if c.abs() > 1e-300 {
                    0.5 * a / c.abs()
                } else {
                    f64::INFINITY
                };
                let ry = if s.abs() > 1e-300 {
                    0.5 * b / s.abs()
                } else {
                    f64::INFINITY
                };
                rx.min(ry)
            }
            DomainSpec::PolarPerturbed { r0, terms } => {
                r0 + terms
                    .iter()
                    .map(|(k, e)| e * (2.0 * *k as f64 * theta).cos())
                    .sum::<f64>()
            }
        }
    }

    /// Minimum of r(theta), a lower bound for the inradius of a star-shaped
    /// domain (exact for the disk and polar families).
    pub fn min_boundary_radius(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius } => *radius,
            DomainSpec::Ellipse { a, b } => a.min(*b),
            DomainSpec::Rectangle { a, b } => 0.5 * a.min(*b),
            DomainSpec::PolarPerturbed { r0, terms } => {
                r0 - terms.iter().map(|(_, e)| e.abs()).sum::<f64>()
            }
        }
    }

    /// Short identifier used in reports and output files.
    pub fn id(&self) -> String {
        match self {
            DomainSpec::Disk { radius } => format!("disk_r{radius:.4}"),
            DomainSpec::Ellipse { a, b } => format!("ellipse_{a:.4}x{b:.4}"),
            DomainSpec::Rectangle { a, b } => format!("rect_{a:.4}x{b:.4}"),
            DomainSpec::PolarPerturbed { r0, terms } => {
                let mut s = format!("polar_r{r0:.4}");
                for (k, e) in terms {
                    s.push_str(&format!("_c{}e{:.4}", 2 * k, e));
                }
                s
            }
        }
    }
}

/// Exact analytic area of the domain.
///
/// The polar family integrates in closed form:
/// (1/2) int r(theta)^2 dtheta = pi r0^2 + (pi/2) sum eps_k^2
/// (all cross terms between distinct even frequencies vanish).
pub fn area(spec: &DomainSpec) -> f64 {
    match spec {
        DomainSpec::Disk { radius } => PI * radius * radius,
        DomainSpec::Ellipse { a, b } => PI * a * b,
        DomainSpec::Rectangle { a, b } => a * b,
        DomainSpec::PolarPerturbed { r0, terms } => {
            PI * r0 * r0 + 0.5 * PI * terms.iter().map(|(_, e)| e * e).sum::<f64>()
        }
    }
}

/// Rescale the domain so that its area equals `target`.
///
/// The returned spec is the input scaled by s = sqrt(target / area).
/// Laplacian eigenvalues transform as lambda(s * Omega) = lambda(Omega) / s^2;
/// the inequality harness relies on this to compare equal-measure domains.
pub fn normalize_area(spec: &DomainSpec, target: f64) -> DomainSpec {
    let s = (target / area(spec)).sqrt();
    scale(spec, s)
}

/// Uniformly scale the domain by `s`.
pub fn scale(spec: &DomainSpec, s: f64) -> DomainSpec {
    match spec {
        DomainSpec::Disk { radius } => DomainSpec::Disk { radius: radius * s },
        DomainSpec::Ellipse { a, b } => DomainSpec::Ellipse { a: a * s, b: b * s },
        DomainSpec::Rectangle { a, b } => DomainSpec::Rectangle { a: a * s, b: b * s },
        DomainSpec::PolarPerturbed { r0, terms } => DomainSpec::PolarPerturbed {
            r0: r0 * s,
            terms: terms.iter().map(|(k, e)| (*k, e * s)).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn area_disk_unit() {
        assert_relative_eq!(area(&DomainSpec::Disk { radius: 1.0 }), PI);
    }

    #[test]
    fn area_square_sqrt_pi() {
        let s = PI.sqrt();
        assert_relative_eq!(area(&DomainSpec::Rectangle { a: s, b: s }), PI, epsilon = 1e-14);
    }

    #[test]
    fn area_polar_closed_form_matches_quadrature() {
        // eps = 0.1 at frequency 2 (k = 1): pi + 0.005 pi
        let spec = DomainSpec::PolarPerturbed {
            r0: 1.0,
            terms: vec![(1, 0.1)],
        };
        let exact = area(&spec);
        assert_relative_eq!(exact, 1.005 * PI, epsilon = 1e-14);
        assert_relative_eq!(exact, 3.1573006168577420, epsilon = 1e-13);

        // independent oracle: composite midpoint quadrature of (1/2) int r^2
        let n = 200_000;
        let mut quad = 0.0;
        for i in 0..n {
            let th = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            let r = spec.boundary_radius(th);
            quad += 0.5 * r * r * (2.0 * PI / n as f64);
        }
        assert_relative_eq!(exact, quad, epsilon = 1e-10);
    }

    #[test]
    fn area_polar_multi_term_matches_quadrature() {
        let spec = DomainSpec::PolarPerturbed {
            r0: 1.3,
            terms: vec![(1, 0.15), (3, -0.07)],
        };
        let exact = area(&spec);
        let n = 400_000;
        let mut quad = 0.0;
        for i in 0..n {
            let th = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            let r = spec.boundary_radius(th);
            quad += 0.5 * r * r * (2.0 * PI / n as f64);
        }
        assert_relative_eq!(exact, quad, max_relative = 1e-10);
    }

    #[test]
    fn normalize_disk() {
        let out = normalize_area(&DomainSpec::Disk { radius: 2.0 }, PI);
        match out {
            DomainSpec::Disk { radius } => assert_relative_eq!(radius, 1.0, epsilon = 1e-15),
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn normalize_rectangle() {
        let out = normalize_area(&DomainSpec::Rectangle { a: 1.0, b: 1.0 }, PI);
        match out {
            DomainSpec::Rectangle { a, b } => {
                assert_relative_eq!(a, PI.sqrt(), epsilon = 1e-15);
                assert_relative_eq!(b, PI.sqrt(), epsilon = 1e-15);
            }
            _ => panic!("kind changed"),
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn normalize_ellipse_scales_both_axes() {
        // area 2 pi -> pi means s = 1/sqrt(2)
        let out = normalize_area(&DomainSpec::Ellipse { a: 2.0, b: 1.0 }, PI);
        match out {
            DomainSpec::Ellipse { a, b } => {
                assert_relative_eq!(a, 2.0 / 2.0f64.sqrt(), epsilon = 1e-14);
                assert_relative_eq!(b, 1.0 / 2.0f64.sqrt(), epsilon = 1e-14);
                assert_relative_eq!(a, 1.41421356, epsilon = 1e-7);
                assert_relative_eq!(b, 0.70710678, epsilon = 1e-7);
            }
            _ => panic!("kind changed"),
        }
    }

    #[test]
    fn normalized_area_is_exact() {
        let specs = [
            DomainSpec::Disk { radius: 3.7 },
            DomainSpec::Ellipse { a: 1.2, b: 1.0 / 1.2 },
            DomainSpec::Rectangle { a: 0.4, b: 9.0 },
            DomainSpec::PolarPerturbed {
                r0: 2.0,
                terms: vec![(2, 0.3)],
            },
        ];
        for spec in &specs {
            let t = PI;
            let normalized = normalize_area(spec, t);
            assert_relative_eq!(area(&normalized), t, max_relative = 1e-12);
        }
    }

    #[test]
    fn polar_validation_rejects_large_perturbation() {
        let bad = DomainSpec::PolarPerturbed {
            r0: 1.0,
            terms: vec![(1, 0.7), (2, 0.5)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rectangle_boundary_radius_hits_corner() {
        let spec = DomainSpec::Rectangle { a: 2.0, b: 2.0 };
        let corner = spec.boundary_radius(PI / 4.0);
        assert_relative_eq!(corner, 2.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(spec.boundary_radius(0.0), 1.0, epsilon = 1e-15);
    }
}
