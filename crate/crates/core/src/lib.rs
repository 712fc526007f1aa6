//! Symbolic calculus on jet spaces with noncommutative (matrix-valued)
//! dependent variables.
//!
//! Expressions are built against a [`Problem`], which declares coordinates,
//! the dependent variable, constants and base functions. They are brought to
//! a canonical [`NormalForm`] on which total and characteristic derivatives,
//! brackets, reduction modulo an equation and symmetry checks operate.

pub mod backlund;
pub mod calculus;
pub mod catalog;
mod error;
pub mod expr;
pub mod linsolve;
pub mod normalize;
mod parse;
mod print;
pub mod problem;
pub mod symmetry;

pub use backlund::{
    bt_apply, bt_integrability_check, bt_rhs, chiral_phi_condition, declare_potential,
    default_bt_basis, register_char_image, BtPair, PotentialDef,
};
pub use calculus::{
    bracket_characteristic, char_derivative, max_jet_order, scalar_prolongation_apply,
    total_derivative, total_derivative_multi, Characteristic, ConstFactor,
};
pub use catalog::{get_pde, CatalogEntry};
pub use error::{Error, Result};
pub use expr::{commutator, structural_eq, Atom, Dependent, Expr, Kind, MultiIndex, ScalarFn};
pub use normalize::{is_zero, normal_form, substitute, NormalForm};
pub use parse::parse_expr;
pub use print::render;
pub use problem::Problem;
pub use symmetry::{
    certify_operator, check_symmetry, find_operator, reduce_mod_pde, structure_constants,
    AnsatzConfig, LinearOperatorAnsatz, OperatorTerm, Pde, StructureConstants, SymmetryReport,
    Verdict,
};
