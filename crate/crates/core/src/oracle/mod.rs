//! Exact reference spectra and Green's kernels.
//!
//! The disk spectrum comes from Bessel zeros, the rectangle spectrum from
//! separation of variables. Both carry antipodal parity labels: a disk
//! mode of angular order m satisfies v(-x) = (-1)^m v(x), a rectangle mode
//! (m, n) satisfies v(-x) = (-1)^{m+n} v(x). The nonlocal problem's
//! spectrum is the merge of the even-parity Dirichlet series with the
//! odd-parity Neumann series.

mod bessel;
mod greens;

pub use bessel::{bessel_j, bessel_j_deriv, bessel_zero};
pub use greens::{
    green_dirichlet_disk, green_neumann_disk, green_neumann_disk_with, green_p_disk,
    green_p_disk_with, solve_via_green, GreensKernel, GreensKind,
};

use crate::{Error, Result};

use std::f64::consts::PI;
use std::fmt;

/// Which eigenvalue problem a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Dirichlet,
    Neumann,
    ProblemP,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Problem::Dirichlet => "dirichlet",
            Problem::Neumann => "neumann",
            Problem::ProblemP => "p",
        };
        f.write_str(s)
    }
}

/// Behavior under the antipodal map x -> -x.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// An exact eigenvalue with its mode identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEigenvalue {
    pub value: f64,
    pub problem: Problem,
    pub parity: Parity,
    /// (angular order m, radial index k) on the disk; (m, n) on the rectangle.
    pub indices: (u32, u32),
}

/// First `count` eigenvalues of the disk of given radius, ascending and
/// with multiplicity (each angular order m >= 1 appears twice).
///
/// Neumann includes the zero eigenvalue of the constant mode, labeled
/// (0, 0). ProblemP is the merge of even-m Dirichlet and odd-m Neumann.
pub fn disk_spectrum(radius: f64, problem: Problem, count: usize) -> Result<Vec<LabeledEigenvalue>> {
    if !(radius > 0.0) {
        return Err(Error::Invalid(format!("radius must be positive, got {radius}")));
    }
    if count == 0 || count > 100 {
        return Err(Error::Invalid(format!("count must be in 1..=100, got {count}")));
    }
    // collect every candidate whose Bessel zero is <= cutoff, growing the
    // cutoff until enough values are in; the truncated list is then
    // provably complete
    let mut cutoff = (4.0 * (count as f64 + 8.0)).sqrt() + 6.0;
    loop {
        let mut values = Vec::new();
        for m in 0u32.. {
            // j'_{m,1} is the smallest zero of order m and grows with m
            if bessel_zero(m, 1, true)? > cutoff {
                break;
            }
            let wants_d = matches!(problem, Problem::Dirichlet)
                || (matches!(problem, Problem::ProblemP) && m % 2 == 0);
            let wants_n = matches!(problem, Problem::Neumann)
                || (matches!(problem, Problem::ProblemP) && m % 2 == 1);
            let parity = if m % 2 == 0 { Parity::Even } else { Parity::Odd };
            let mult = if m == 0 { 1 } else { 2 };
            if wants_n && m == 0 {
                values.push(LabeledEigenvalue {
                    value: 0.0,
                    problem: Problem::Neumann,
                    parity: Parity::Even,
                    indices: (0, 0),
                });
            }
            for (derivative, wanted, tag) in
                [(false, wants_d, Problem::Dirichlet), (true, wants_n, Problem::Neumann)]
            {
                if !wanted {
                    continue;
                }
                for k in 1u32.. {
                    let z = bessel_zero(m, k, derivative)?;
                    if z > cutoff {
                        break;
                    }
                    for _ in 0..mult {
                        values.push(LabeledEigenvalue {
                            value: (z / radius).powi(2),
                            problem: tag,
                            parity,
                            indices: (m, k),
                        });
                    }
                }
            }
        }
        values.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.indices.cmp(&b.indices)));
        if values.len() >= count {
            values.truncate(count);
            return Ok(values);
        }
        cutoff *= 1.4;
        if cutoff > 60.0 {
            return Err(Error::Invalid(
                "disk spectrum pool exhausted below the supported order cap".into(),
            ));
        }
    }
}

/// First `count` eigenvalues pi^2 (m^2/a^2 + n^2/b^2) of the a x b
/// rectangle, ascending with multiplicity.
///
/// Dirichlet takes m, n >= 1; Neumann takes m, n >= 0; ProblemP merges
/// Dirichlet modes with m + n even and Neumann modes with m + n odd.
pub fn rectangle_spectrum(
    a: f64,
    b: f64,
    problem: Problem,
    count: usize,
) -> Result<Vec<LabeledEigenvalue>> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Invalid(format!("sides must be positive, got {a}, {b}")));
    }
    if count == 0 || count > 500 {
        return Err(Error::Invalid(format!("count must be in 1..=500, got {count}")));
    }
    let lambda = |m: u32, n: u32| {
        PI * PI * ((m * m) as f64 / (a * a) + (n * n) as f64 / (b * b))
    };
    // all candidates with lambda <= cut are included, so the truncated list
    // is complete; grow the cut until enough entries exist
    let mut cut = 4.0 * PI * (count as f64 + 10.0) / (a * b) + 4.0 * lambda(1, 1);
    loop {
        let mut values = Vec::new();
        let m_max = (a * cut.sqrt() / PI).ceil() as u32 + 1;
        let n_max = (b * cut.sqrt() / PI).ceil() as u32 + 1;
        for m in 0..=m_max {
            for n in 0..=n_max {
                let v = lambda(m, n);
                if v > cut {
                    continue;
                }
                let parity = if (m + n) % 2 == 0 { Parity::Even } else { Parity::Odd };
                let dirichlet_mode = m >= 1 && n >= 1;
                let keep_d = dirichlet_mode
                    && (matches!(problem, Problem::Dirichlet)
                        || (matches!(problem, Problem::ProblemP) && parity == Parity::Even));
                let keep_n = matches!(problem, Problem::Neumann)
                    || (matches!(problem, Problem::ProblemP) && parity == Parity::Odd);
                if keep_d {
                    values.push(LabeledEigenvalue {
                        value: v,
                        problem: Problem::Dirichlet,
                        parity,
                        indices: (m, n),
                    });
                }
                if keep_n {
                    values.push(LabeledEigenvalue {
                        value: v,
                        problem: Problem::Neumann,
                        parity,
                        indices: (m, n),
                    });
                }
            }
        }
        values.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.indices.cmp(&b.indices)));
        if values.len() >= count {
            values.truncate(count);
            return Ok(values);
        }
        cut *= 2.0;
    }
}
