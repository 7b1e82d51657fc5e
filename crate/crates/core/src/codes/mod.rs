//! Finite codes on spheres and projective spaces, their energies and
//! triple distributions.

mod catalog;
mod code;
mod energy;
mod triples;

pub use catalog::{
    antipodal22, antiprism8, builtin, catalog_instances, cell600, cube4, icosa6, icosa_vf16,
    orthogonal_lines, pentagons10, petersen10, rhombic7, simplex_lines, CATALOG,
};
pub use code::{Code, Space};
pub use energy::{
    design_strength, energy, energy_from_triples, verify_code, CodeReport, Convention,
};
pub use triples::{
    canonical_triple, count_triples_direct, triple_distribution, IdentityCheck, TripleClass,
    TripleDistribution, EVEN_FLIPS,
};
