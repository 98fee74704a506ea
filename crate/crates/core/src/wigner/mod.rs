//! Spherical Wigner functions of Dicke-space operators.
//!
//! An operator `A` is expanded in the spherical tensor operators `T_KQ`,
//! `A_KQ = Tr(A T†_KQ)`, and mapped onto the sphere with spherical harmonics:
//!
//! ```text
//! W_ρ(θ, φ) = sqrt((2j+1)/4π) Σ_{K=0}^{2j} Σ_{Q=-K}^{K} ρ_KQ Y_KQ(θ, φ)
//! ```
//!
//! States use the normalized map above, so `∫ W_ρ dΩ = Tr ρ`. Operator fields
//! ([`operator_wigner`]) use the bare sum `Σ A_KQ Y_KQ`; with that pairing the
//! product rule reads `Tr(ρA) = sqrt(4π/(2j+1)) ∫ W_ρ W_A dΩ`.

mod closed_form;
mod field;
mod grid;
mod nonclassical;
mod tensor;

pub use closed_form::{
    nonpolar_cat_coefficients, nonpolar_cat_field, nonpolar_cat_wigner, polar_cat_field, polar_cat_wigner,
};
pub use field::{operator_wigner, product_rule_expectation, wigner_at, wigner_field, OperatorField};
pub use grid::{sphere_grid, SphereField, SphereGrid};
pub use nonclassical::{
    min_section, nonclassicality, nonclassicality_adaptive, NuEstimate, SectionMinimum, NEGATIVITY_THRESHOLD,
};
pub use tensor::{
    characteristic_matrix, operator_characteristic, tensor_coefficient, tensor_operator, CharacteristicMatrix,
    PolarCatProjector,
};
