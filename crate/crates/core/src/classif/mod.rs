//! Catalog of classification results and the drivers that verify them.

mod catalog;
mod report;
mod verify;

pub use catalog::{
    builtin_catalog, describe, find_case, instantiate, kernel, Assignment, CaseGroup, ClassificationCase, Constraint,
    Representative,
};
pub use report::{CaseReport, Check, DimRecord, Status, Summary, VerificationReport, SCHEMA};
pub use verify::{
    quadratic_tau_cases, verify_adjoint_actions, verify_all, verify_case, verify_case_with, verify_cases,
    verify_equivalence_algebra, verify_equivalence_group, verify_potential_link, verify_reductions,
    verify_subalgebra_lists, verify_table, table_scan, Settings, SCAN_ID, SUITES,
};
