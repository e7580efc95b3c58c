//! Irreducible components of genus-0 stable map and quasimap spaces to smooth
//! projective toric varieties, by enumeration of decorated marked trees.

pub mod linalg;
pub mod moduli;
pub mod nodalcoh;
pub mod stratcone;
pub mod toricfan;
pub mod treegen;

pub use moduli::{
    dimension_report, irreducible_components, nonempty_status, score_tree, ComponentReport, DimensionReport, Emptiness,
    EmptinessVerdict, ModuliError, Rule, RunOptions, TreeReport, TreeScore, TreeStatus,
};
pub use nodalcoh::{h0_tree, h1_tree, CohomologyResult, DegreeTree};
pub use stratcone::{component_strata, d_value, maximal_cover, ClosureOrder, Stratum};
pub use toricfan::{
    build_basis, effective_decompositions, validate_fan, ClassNames, CurveClass, DivisorClass, Fan, FanSpec,
    IrreducibleClasses, Target, ToricBasis, ToricError, ValidationReport, Violation,
};
pub use treegen::{canonical_form, contraction_closure, enumerate_trees, is_stable, CanonicalKey, DecoratedTree, Mode};
