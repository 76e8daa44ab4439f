//! Pseudo-regret traces and the CSV/JSONL writers for run artifacts.
//!
//! All float formatting goes through Rust's shortest-roundtrip `Display`,
//! which makes byte-identical output a function of the values alone.

use std::io::{self, Write};

use crate::env::CorruptionLedger;
use crate::learner::{Choice, EpochRecord};

/// One executed round as the harness saw it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRow {
    pub t: u64,
    pub epoch: u32,
    pub choice: Choice,
    pub actual: f64,
    pub observed: f64,
    pub inst_regret: f64,
    pub cum_regret: f64,
}

/// A full run's pseudo-regret record. `rows` is empty when the run was
/// executed in lean mode; `final_regret` is always populated.
#[derive(Debug, Clone)]
pub struct RegretTrace {
    pub algorithm: String,
    pub seed: u64,
    pub rows: Vec<StepRow>,
    pub final_regret: f64,
}

/// `t,epoch,action_id,actual,observed,inst_regret,cum_regret`
pub fn write_trace_csv(w: &mut impl Write, trace: &RegretTrace) -> io::Result<()> {
    writeln!(
        w,
        "t,epoch,action_id,actual,observed,inst_regret,cum_regret"
    )?;
    for r in &trace.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.t,
            r.epoch,
            r.choice.action_id(),
            r.actual,
            r.observed,
            r.inst_regret,
            r.cum_regret
        )?;
    }
    Ok(())
}

/// `t,declared_magnitude,cumulative_C`
pub fn write_ledger_csv(w: &mut impl Write, ledger: &CorruptionLedger) -> io::Result<()> {
    writeln!(w, "t,declared_magnitude,cumulative_C")?;
    for (t, m, cum) in ledger.per_step() {
        writeln!(w, "{t},{m},{cum}")?;
    }
    Ok(())
}

/// One JSON object per closed epoch.
pub fn write_epoch_jsonl(w: &mut impl Write, records: &[EpochRecord]) -> io::Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(io::Error::other)?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Sweep summary rows: `C,d,algorithm,seed,final_regret`.
pub fn write_sweep_csv(
    w: &mut impl Write,
    rows: &[(f64, usize, String, u64, f64)],
) -> io::Result<()> {
    writeln!(w, "C,d,algorithm,seed,final_regret")?;
    for (c, d, algo, seed, regret) in rows {
        writeln!(w, "{c},{d},{algo},{seed},{regret}")?;
    }
    Ok(())
}
