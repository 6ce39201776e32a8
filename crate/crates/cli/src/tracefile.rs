//! Trace CSV: one header row, one row per iteration, full double precision
//! via shortest round-trip decimals. `alpha` and `z_accepted` are empty for
//! algorithms that do not produce them.

use std::fs;
use std::path::Path;

use rankprox_core::Trace;

use crate::error::CliError;

pub const HEADER: &str =
    "iter,objective,g_part,rank,support_size,step_norm,fixpoint_residual,alpha,z_accepted";

pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in &trace.records {
        out.push_str(&r.iter.to_string());
        out.push(',');
        out.push_str(&r.objective.to_string());
        out.push(',');
        out.push_str(&r.g_part.to_string());
        out.push(',');
        out.push_str(&r.rank.to_string());
        out.push(',');
        out.push_str(&r.support_size.to_string());
        out.push(',');
        out.push_str(&r.step_norm.to_string());
        out.push(',');
        out.push_str(&r.fixpoint_residual.to_string());
        out.push(',');
        if let Some(alpha) = r.alpha {
            out.push_str(&alpha.to_string());
        }
        out.push(',');
        if let Some(accepted) = r.z_accepted {
            out.push_str(if accepted { "true" } else { "false" });
        }
        out.push('\n');
    }
    out
}

pub fn write_trace(path: &Path, trace: &Trace) -> Result<(), CliError> {
    fs::write(path, trace_to_csv(trace)).map_err(|e| CliError::io(path, e))
}
