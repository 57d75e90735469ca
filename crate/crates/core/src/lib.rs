//! Spectral toolkit for the nonlocal "antipodal" Laplacian problem on
//! centrally symmetric planar domains.
//!
//! The problem couples each boundary point x with its antipode x* = -x:
//! the eigenfunction value is antisymmetric across the pairing,
//! u(x) = -u(x*), while the outward normal derivative is symmetric,
//! du/dn(x) = du/dn(x*). The toolkit builds antipodally exact triangular
//! meshes, assembles linear finite element operators under free (Neumann),
//! Dirichlet, and nonlocal boundary conditions, solves the generalized
//! eigenpencil K u = lambda M u, and cross-checks everything against exact
//! machinery: Bessel-zero spectra of the disk, separated spectra of the
//! rectangle, and the closed-form Green's function of the unit disk.
//!
//! Module map:
//! - [`geometry`]: domain descriptions and antipodally symmetric meshing
//! - [`assembly`]: stiffness/mass assembly and boundary-condition reduction
//! - [`eigensolve`]: deflated shift-invert Lanczos for the smallest pairs
//! - [`oracle`]: Bessel functions and zeros, exact disk/rectangle spectra,
//!   Green's kernels of the unit disk
//! - [`analysis`]: parity classification, two-series verification, and the
//!   isoperimetric inequality harness
//! - [`cli`]: command-line front end

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod eigensolve;
mod error;
pub mod expr;
pub mod geometry;
pub mod oracle;
pub mod sparse;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
