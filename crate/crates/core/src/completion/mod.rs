//! Completeness constructions: monotone suprema, Douglas factorization,
//! codilations, order sums, ℓ²-products and (co)limits.

pub mod colimit;
pub mod dilation;
pub mod douglas;
pub mod l2;
pub mod order_sum;
pub mod sup;

pub use colimit::{
    archimedean_witness, cocone_defect, colimit_mediating, finite_directed_colimit_isometries, induced_colimit_map,
    l2_limit_truncated, mediating_via_codilator, truncation_chain_cone, CodirectedCone, ColimitMediator,
    IsometryColimit, L2Limit, MorFn,
};
pub use dilation::{
    codilation, codilator, codilator_mediator, Codilation, CodilationResiduals, Codilator, Mediator, UniversalityStatus,
};
pub use douglas::{douglas_factor, DouglasResiduals, DouglasTrace};
pub use l2::{epi_iso_factor, glue_isometries, l2_mediating, l2_product, L2Components, L2Product, ObjectFn};
pub use order_sum::{
    check_orthogonal, is_l2_family, order_sum, partial_sum_defects, plain_sum, FamilyFn, FamilyTerms, L2Verdict,
    OrderSum, OrderSumCertificate, OrthFamily, TailCertificate,
};
pub use sup::{
    approx_inverse_defect, monotone_infimum, monotone_supremum, sup_conjugation, ChainTerms, Direction, MonotoneChain,
    SupConjugation, Supremum, TermFn,
};
