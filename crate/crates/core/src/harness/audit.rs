use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::machine::{validate_spec, AuditReport, LetterMap, Machine, RunOutcome, SearchLimits, ValidationReport};
use crate::oracles::GroupOracle;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AuditConfig {
    pub samples: usize,
    pub max_len: usize,
    pub init_bound: usize,
    pub seed: u64,
    /// Every input word up to this length is run from every init up to
    /// `scan_init_bound`.
    pub scan_len: usize,
    pub scan_init_bound: usize,
    /// Nontrivial words up to this length need an entry that survives all
    /// continuations of length `robust_n`.
    pub robust_len: usize,
    pub robust_n: usize,
}

impl AuditConfig {
    pub fn new(init_bound: usize) -> Self {
        Self {
            samples: 1000,
            max_len: 6,
            init_bound,
            seed: 1,
            scan_len: 4,
            scan_init_bound: init_bound.min(6),
            robust_len: 4,
            robust_n: 4,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DivergenceScan {
    pub inits: usize,
    pub runs: usize,
    pub diverged: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RobustSweep {
    pub words: usize,
    pub found: usize,
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullAudit {
    pub report_version: u32,
    pub group: String,
    pub config: AuditConfig,
    pub validation: ValidationReport,
    /// Absent when validation failed.
    pub property3: Option<AuditReport>,
    pub divergence: DivergenceScan,
    pub robust: RobustSweep,
    pub certified: bool,
}

/// Runs every audit section. Divergence found by the sampled audit or the
/// sweep is recorded rather than propagated.
pub fn audit_all(group: &str, machine: &Machine, oracle: &dyn GroupOracle, config: AuditConfig) -> Result<FullAudit> {
    let validation = validate_spec(machine.spec());
    let mut divergence = DivergenceScan::default();
    let limits = SearchLimits {
        samples: config.samples,
        max_len: config.max_len,
        init_bound: config.init_bound,
        seed: config.seed,
    };
    let property3 = match machine.audit_property3(oracle, limits) {
        Ok(r) => Some(r),
        Err(Error::DivergenceDetected(d)) => {
            divergence.diverged.push(format!("sampled audit: {d}"));
            None
        }
        Err(e) => return Err(e),
    };
    scan(machine, &config, &mut divergence)?;
    let robust = sweep(machine, oracle, &config, &mut divergence)?;
    let certified = validation.is_valid()
        && property3.as_ref().is_some_and(AuditReport::passed)
        && divergence.diverged.is_empty()
        && robust.missing.is_empty();
    Ok(FullAudit {
        report_version: super::REPORT_VERSION,
        group: group.to_string(),
        config,
        validation,
        property3,
        divergence,
        robust,
        certified,
    })
}

fn scan(machine: &Machine, config: &AuditConfig, out: &mut DivergenceScan) -> Result<()> {
    let inputs = machine.input_alphabet().to_vec();
    let spec = machine.spec();
    let words: Vec<Vec<_>> = crate::alphabet::WordsUpTo::new(inputs.len(), config.scan_len)
        .map(|w| w.iter().map(|&i| inputs[i]).collect())
        .collect();
    machine.visit_init_words::<()>(config.scan_init_bound, &mut |init| {
        out.inits += 1;
        let entry = machine.entry_configuration(&init);
        for w in &words {
            out.runs += 1;
            if let RunOutcome::Diverged(d) = machine.run_word(entry.clone(), w) {
                let (i, w) = (spec.format_symbols(&init.word), spec.format_symbols(w));
                out.diverged.push(format!("init `{i}`, word `{w}`: {d}"));
            }
        }
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(())
}

fn sweep(
    machine: &Machine,
    oracle: &dyn GroupOracle,
    config: &AuditConfig,
    divergence: &mut DivergenceScan,
) -> Result<RobustSweep> {
    let alphabet = oracle.alphabet();
    let map = LetterMap::new(machine, alphabet)?;
    let mut out = RobustSweep::default();
    for w in alphabet.words_up_to(config.robust_len).filter(|w| !oracle.is_trivial(w)) {
        out.words += 1;
        match machine.find_robust_entry(&map.symbols(&w), config.robust_n, config.init_bound) {
            Ok(Some(_)) => out.found += 1,
            Ok(None) => out.missing.push(alphabet.format_word(&w)),
            Err(Error::DivergenceDetected(d)) => {
                divergence.diverged.push(format!("robust sweep, word `{}`: {d}", alphabet.format_word(&w)))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
