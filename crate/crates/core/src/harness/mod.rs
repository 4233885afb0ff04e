//! Fragment enumeration and exhaustive verification.

mod descent;
mod enumerate;
mod laws;
mod report;
mod succession;

pub use descent::{search_descending, DescentError, DescentResult, Strategy};
pub use enumerate::{enumerate_fragment, fragment_by_size, GeneratorConfig};
pub use laws::{
    check_axioms, check_normalization, check_order_laws, check_order_laws_by, check_same_base,
    denormalize, Comparator, TripleSampling,
};
pub use report::{CheckReport, LawViolation, Verdict, MAX_RECORDED_VIOLATIONS};
pub use succession::{run_succession, HaltReason, SuccessionPolicy, SuccessionTrace};
