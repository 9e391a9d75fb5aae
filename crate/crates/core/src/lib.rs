//! Classical multidimensional scaling through the dual basis of the
//! zero-centered symmetric matrices.
//!
//! A zero-centered Gram matrix `X` expands as `X = sum_a <X, w_a> v_a`
//! over pairs `a = (i, j)`, where `w_a` reads a squared distance off `X` and
//! `v_a = -1/2 (J(:,i) J(:,j)^T + J(:,j) J(:,i)^T)` is its dual. The crate
//! builds these objects, embeds squared-distance matrices, and checks the
//! closed-form spectra of the inner-product matrix `H`, the dual atoms, and
//! the metric-nearness constraint matrix.
//!
//! ```
//! use dualmds::{mds, pairspace::PointConfiguration};
//! use nalgebra::DMatrix;
//!
//! let square = DMatrix::from_row_slice(4, 2, &[0., 0., 1., 0., 1., 1., 0., 1.]);
//! let d = mds::squared_distances(&PointConfiguration::new(square).unwrap());
//! let x1 = mds::double_center(&d);
//! let x2 = mds::dual_expansion(&d);
//! assert!((x1.entries() - x2.entries()).amax() < 1e-12);
//! ```

pub mod basis;
pub mod error;
pub mod io;
pub mod mds;
pub mod nearness;
pub mod pairspace;
pub mod spectral;
pub mod stability;
pub mod verify;

pub use error::{Error, Result};
pub use nalgebra;
