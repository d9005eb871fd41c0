//! Workbench plumbing: group-spec loading, oracle-equivalence runs, traces
//! and combined audits.

mod audit;
mod bounds;
mod equiv;
mod schema;
mod trace;

#[cfg(test)]
mod tests;

pub use audit::{audit_all, AuditConfig, DivergenceScan, FullAudit, RobustSweep};
pub use bounds::{ht_witness_cost, BoundOverride, BoundRule};
pub use equiv::{equiv_check, Counts, EquivParams, EquivReport, Mismatch, WordRow, INSUFFICIENT_BOUND, REPORT_VERSION};
pub use schema::{load_group_spec, GeneratorDef, Group, GroupDef, GroupFile, OffSpineDef, PermDef, TableDef, TailDef};
pub use trace::{trace_run, TraceEvent};
