//! Moment-based shape descriptors for voxelized molecules.
//!
//! The pipeline turns a molecular geometry into a cubic voxel grid
//! ([`voxel`], [`binvox`]) and projects that grid onto five orthogonal or
//! monomial basis families — geometric, Legendre, Hahn, complex, and
//! Zernike moments ([`moments`], with the underlying polynomials in
//! [`legendre`], [`hahn`], [`spherical`], and [`zernike`]). Every family
//! yields the same 165-slot feature vector at maximum total order 8.
//! Complex-valued features can be packed into 128-bit integers by bit
//! interleaving ([`encoding`]), and labeled feature sets can be compared by
//! robust dispersion statistics ([`stats`]).
//!
//! The Hahn family additionally supports the complete transform and its
//! inverse, reconstructing the original grid from its coefficients
//! ([`moments::reconstruct_hahn`]).

pub mod binvox;
pub mod encoding;
pub mod hahn;
pub mod legendre;
pub mod moments;
pub mod quadrature;
pub mod special;
pub mod spherical;
pub mod stats;
pub mod voxel;
pub mod zernike;
