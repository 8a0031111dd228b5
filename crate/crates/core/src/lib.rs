//! Index pairings of gapped lattice Hamiltonians as half-signatures of the spectral localizer,
//! with Chern, Fredholm and fuzzy-sphere cross-checks.
//!
//! Everything is written against `f64`; the linear algebra underneath is generic
//! (see `specloc_linalg`).

pub mod dirac;
pub mod error;
pub mod fuzzy;
pub mod localizer;
pub mod model;
pub mod oracle;
pub mod region;
pub mod sphere_map;
pub mod taper;

pub use dirac::{truncate, DiracData};
pub use error::{Error, Result};
pub use fuzzy::{
    build_fuzzy_sphere, fuzzy_homotopy, localizer_sphere_at, localizer_sphere_homotopy, map_fuzzy_sphere, sphere_to_matrix, taper_commutator_check,
    Component, FuzzySphere, HomotopyPoint, MappedSphereBuilder, Width,
};
pub use localizer::{
    assemble_localizer, half_signature_pairing, inertia, inertia_both, pairing_prepared, prepare, sweep, validate_params, InertiaResult, LocalizerParams,
    PairingOptions, PairingResult, PreparedModel, SweepRow, SweepSummary,
};
pub use model::{
    build_hamiltonian, compute_commutator_norm, flatten, interpolate_flatten, spectral_data, FlatHamiltonian, FlattenMethod, GapMethod, SpectralData,
    SpectralOptions, TightBindingModel,
};
pub use oracle::{build_index_sphere, chern_fhs, compare_spheres, fredholm_index_estimate, ChernResult, FredholmEstimate, Projection};
pub use region::{Shape, Site, TruncationRegion};
pub use sphere_map::{mapping_degree, DegreeResult, SphereMapChoice, SphereMapFunctions};
pub use specloc_linalg as linalg;
pub use taper::TaperPair;

pub type Mat = specloc_linalg::DMat64;
pub type Sparse = specloc_linalg::Csr64;
pub type Operator = specloc_linalg::HermOp64;
pub type Complex = specloc_linalg::C64;
