use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::machine::{LetterMap, Machine};
use crate::oracles::GroupOracle;

pub const REPORT_VERSION: u32 = 1;
pub const INSUFFICIENT_BOUND: &str = "initBound possibly insufficient";

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Counts {
    pub agree: usize,
    pub machine_only: usize,
    pub oracle_only: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Mismatch {
    pub word: String,
    pub machine_accepts: bool,
    pub oracle_nontrivial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Verdicts for one word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRow {
    pub word: String,
    pub machine: bool,
    pub oracle: bool,
    pub agree: bool,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EquivReport {
    pub report_version: u32,
    pub group: String,
    pub n: usize,
    pub init_bound: usize,
    pub bound_source: String,
    pub words: usize,
    pub counts: Counts,
    pub mismatches: Vec<Mismatch>,
    #[serde(skip)]
    pub rows: Vec<WordRow>,
}

impl EquivReport {
    pub fn agrees(&self) -> bool {
        self.counts.machine_only == 0 && self.counts.oracle_only == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EquivParams<'a> {
    pub group: &'a str,
    pub n: usize,
    pub init_bound: usize,
    pub bound_source: &'a str,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

/// Compares `accepts` against the oracle on every word of length at most
/// `n`, in the oracle alphabet's enumeration order.
pub fn equiv_check(machine: &Machine, oracle: &dyn GroupOracle, p: &EquivParams<'_>) -> Result<EquivReport> {
    let alphabet = oracle.alphabet();
    let map = LetterMap::new(machine, alphabet)?;
    let words: Vec<Vec<Letter>> = alphabet.words_up_to(p.n).collect();
    let eval = |w: &Vec<Letter>| -> Result<WordRow> {
        let r = machine.accepts(&map.symbols(w), p.init_bound)?;
        let nontrivial = !oracle.is_trivial(w);
        Ok(WordRow {
            word: alphabet.format_word(w),
            machine: r.accepted,
            oracle: nontrivial,
            agree: r.accepted == nontrivial,
            witness: r.witness.map(|i| machine.spec().format_symbols(&i.word)).unwrap_or_default(),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(p.jobs)
        .build()
        .map_err(|e| Error::IncompatibleParameters(e.to_string()))?;
    let results: Vec<Result<WordRow>> = pool.install(|| words.par_iter().map(eval).collect());
    let mut report = EquivReport {
        report_version: REPORT_VERSION,
        group: p.group.to_string(),
        n: p.n,
        init_bound: p.init_bound,
        bound_source: p.bound_source.to_string(),
        words: words.len(),
        counts: Counts::default(),
        mismatches: Vec::new(),
        rows: Vec::with_capacity(words.len()),
    };
    for row in results {
        let row = row?;
        match (row.machine, row.oracle) {
            (m, o) if m == o => report.counts.agree += 1,
            (true, false) => report.counts.machine_only += 1,
            _ => report.counts.oracle_only += 1,
        }
        if !row.agree {
            report.mismatches.push(Mismatch {
                word: row.word.clone(),
                machine_accepts: row.machine,
                oracle_nontrivial: row.oracle,
                witness: (!row.witness.is_empty()).then(|| row.witness.clone()),
                note: row.oracle.then(|| INSUFFICIENT_BOUND.to_string()),
            });
        }
        report.rows.push(row);
    }
    Ok(report)
}
