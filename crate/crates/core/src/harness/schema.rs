//! Group-spec files: a JSON description of a group that yields both a
//! machine and its word-problem oracle.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::bounds::{BoundOverride, BoundRule};
use crate::alphabet::{Alphabet, LetterPairs};
use crate::constructions::{
    build_bounded_automata, build_higman_thompson, build_virtually_free, extend_finite, product_direct, product_free,
    product_wreath, rewrite_generators, spec_alphabet,
};
use crate::error::{Error, Result};
use crate::machine::{CspdaSpec, Machine};
use crate::oracles::{
    oracle_direct_product, oracle_finite_extension, oracle_free_product, oracle_rewritten, oracle_wreath,
    parse_ht_word, BoundedOracle, DirectedAutomorphism, FinitaryAutomorphism, FreeOracle, Generator, HtElement,
    HtOracle, OffSpine, RewriteEntry, SharedOracle, VirtuallyFreeData, VirtuallyFreeOracle,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_bound: Option<BoundOverride>,
    pub group: GroupDef,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDef {
    Free {
        alphabet: LetterPairs,
    },
    VirtuallyFree {
        alphabet: LetterPairs,
        basis: LetterPairs,
        #[serde(default)]
        transversal: Vec<String>,
        #[serde(default)]
        rows: Vec<RewriteEntry>,
    },
    BoundedAutomata {
        alphabet: LetterPairs,
        /// One generator per letter, keyed by letter name.
        generators: BTreeMap<String, GeneratorDef>,
    },
    HigmanThompson {
        alphabet: LetterPairs,
        n: usize,
        r: usize,
        /// Antichain bijections as `[domain, image]` pairs; inverses may be
        /// omitted.
        generators: BTreeMap<String, Vec<[String; 2]>>,
    },
    #[serde(rename = "rewritten")]
    Rewrite {
        alphabet: LetterPairs,
        /// Image of every letter as a word over the inner alphabet.
        images: BTreeMap<String, String>,
        inner: Box<GroupDef>,
    },
    FiniteExtension {
        alphabet: LetterPairs,
        #[serde(default)]
        transversal: Vec<String>,
        rows: Vec<RewriteEntry>,
        inner: Box<GroupDef>,
    },
    DirectProduct {
        left: Box<GroupDef>,
        right: Box<GroupDef>,
    },
    FreeProduct {
        left: Box<GroupDef>,
        right: Box<GroupDef>,
    },
    Wreath {
        base: Box<GroupDef>,
        top: TableDef,
    },
}

/// Transversal rewriting table over a free basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDef {
    pub alphabet: LetterPairs,
    pub basis: LetterPairs,
    #[serde(default)]
    pub transversal: Vec<String>,
    #[serde(default)]
    pub rows: Vec<RewriteEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorDef {
    Finitary {
        degree: usize,
        depth: usize,
        #[serde(default)]
        perms: Vec<PermDef>,
    },
    Directed {
        degree: usize,
        #[serde(default)]
        p: Vec<usize>,
        q: Vec<usize>,
        #[serde(default)]
        p_image: Vec<usize>,
        q_image: Vec<usize>,
        #[serde(default)]
        off_spine: Vec<OffSpineDef>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermDef {
    #[serde(default)]
    pub at: Vec<usize>,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffSpineDef {
    pub class: usize,
    pub letter: usize,
    pub image: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailDef>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailDef {
    pub depth: usize,
    #[serde(default)]
    pub perms: Vec<PermDef>,
}

/// A loaded group: validated machine, paired oracle and init-bound rule.
#[derive(Clone)]
pub struct Group {
    pub name: String,
    pub description: Option<String>,
    pub machine: Machine,
    pub oracle: SharedOracle,
    pub rule: BoundRule,
    pub file_bound: Option<BoundOverride>,
}

impl Group {
    /// The init bound for words of length at most `n`, and where it came
    /// from.
    pub fn init_bound(&self, n: usize) -> (usize, &'static str) {
        match &self.file_bound {
            Some(b) => (b.at(n), "file"),
            None if self.rule.is_calibrated() => (self.rule.at(n), "calibrated"),
            None => (self.rule.at(n), "rule"),
        }
    }
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let deeper = serde_json::from_str::<Value>(text).ok().and_then(|v| locate(&v, "."));
            Error::Schema(deeper.unwrap_or_else(|| format!("at `{path}`: {}", e.into_inner())))
        })
    }

    pub fn load(self) -> Result<Group> {
        let built = build(&self.group)?;
        let machine = Machine::new(built.spec)?;
        Ok(Group {
            name: self.name,
            description: self.description,
            machine,
            oracle: built.oracle,
            rule: built.rule,
            file_bound: self.init_bound,
        })
    }
}

/// Tagged enums buffer their content, which hides the path below them.
/// Finds the deepest tagged object that fails on its own.
fn locate(v: &Value, path: &str) -> Option<String> {
    let join = |k: &dyn std::fmt::Display| if path == "." { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(map) => {
            if let Some(e) = map.iter().find_map(|(k, child)| locate(child, &join(k))) {
                return Some(e);
            }
            let err = if map.contains_key("kind") {
                GroupDef::deserialize(v).err()
            } else if map.contains_key("type") {
                GeneratorDef::deserialize(v).err()
            } else {
                None
            };
            err.map(|e| format!("at `{path}`: {e}"))
        }
        Value::Array(items) => items.iter().enumerate().find_map(|(i, c)| locate(c, &format!("{path}[{i}]"))),
        _ => None,
    }
}

pub fn load_group_spec(path: impl AsRef<Path>) -> Result<Group> {
    GroupFile::parse(&std::fs::read_to_string(path)?)?.load()
}

struct Built {
    spec: CspdaSpec,
    oracle: SharedOracle,
    rule: BoundRule,
}

fn alphabet(pairs: &LetterPairs) -> Result<Alphabet> {
    Alphabet::from_letter_pairs(pairs)
}

fn max_row(data: &VirtuallyFreeData) -> usize {
    (0..data.cosets())
        .flat_map(|t| data.alphabet.letters().map(move |a| (t, a)))
        .map(|(t, a)| data.rewrite(t, a).0.len())
        .max()
        .unwrap_or(0)
}

fn table(def: &TableDef) -> Result<VirtuallyFreeData> {
    VirtuallyFreeData::new(alphabet(&def.alphabet)?, alphabet(&def.basis)?, def.transversal.clone(), &def.rows)
}

fn finitary(degree: usize, depth: usize, perms: &[PermDef]) -> Result<FinitaryAutomorphism> {
    let mut out = FinitaryAutomorphism { degree, depth, perms: BTreeMap::new() };
    for p in perms {
        if out.perms.insert(p.at.clone(), p.perm.clone()).is_some() {
            return Err(Error::InvalidGenerator(format!("two permutations at {:?}", p.at)));
        }
    }
    Ok(out)
}

fn generator(def: &GeneratorDef) -> Result<Generator> {
    Ok(match def {
        GeneratorDef::Finitary { degree, depth, perms } => Generator::Finitary(finitary(*degree, *depth, perms)?),
        GeneratorDef::Directed { degree, p, q, p_image, q_image, off_spine } => {
            let off_spine = off_spine
                .iter()
                .map(|o| {
                    let tail = match &o.tail {
                        Some(t) => finitary(*degree, t.depth, &t.perms)?,
                        None => FinitaryAutomorphism::identity(*degree),
                    };
                    Ok(OffSpine { class: o.class, letter: o.letter, image: o.image, tail })
                })
                .collect::<Result<_>>()?;
            Generator::Directed(DirectedAutomorphism {
                degree: *degree,
                p: p.clone(),
                q: q.clone(),
                p_image: p_image.clone(),
                q_image: q_image.clone(),
                off_spine,
            })
        }
    })
}

fn build(def: &GroupDef) -> Result<Built> {
    match def {
        GroupDef::Free { alphabet: pairs } => {
            let a = alphabet(pairs)?;
            let spec = build_virtually_free(&VirtuallyFreeData::free(a.clone()))?;
            Ok(Built {
                spec,
                oracle: Arc::new(FreeOracle::new(a)),
                rule: BoundRule::Linear { per_letter: 1, offset: 2 },
            })
        }
        GroupDef::VirtuallyFree { alphabet: pairs, basis, transversal, rows } => {
            let data = table(&TableDef {
                alphabet: pairs.clone(),
                basis: basis.clone(),
                transversal: transversal.clone(),
                rows: rows.clone(),
            })?;
            let spec = build_virtually_free(&data)?;
            let rule = BoundRule::Linear { per_letter: max_row(&data), offset: 2 };
            Ok(Built { spec, oracle: Arc::new(VirtuallyFreeOracle::new(data)?), rule })
        }
        GroupDef::BoundedAutomata { alphabet: pairs, generators } => {
            let a = alphabet(pairs)?;
            let mut gens = Vec::with_capacity(a.len());
            for x in a.letters() {
                let g = generators
                    .get(a.name(x))
                    .ok_or_else(|| Error::Schema(format!("generators: no entry for letter `{}`", a.name(x))))?;
                gens.push(generator(g)?);
            }
            if let Some(extra) = generators.keys().find(|k| !a.contains(k)) {
                return Err(Error::Schema(format!("generators: `{extra}` is not a letter")));
            }
            let spec = build_bounded_automata(&a, &gens)?;
            let oracle = Arc::new(BoundedOracle::new(a, &gens)?);
            Ok(Built { spec, oracle: oracle.clone(), rule: BoundRule::Bounded(oracle) })
        }
        GroupDef::HigmanThompson { alphabet: pairs, n, r, generators } => {
            let a = alphabet(pairs)?;
            let mut elements = BTreeMap::new();
            for (name, pairs) in generators {
                let pairs = pairs
                    .iter()
                    .map(|[b, c]| Ok((parse_ht_word(b)?, parse_ht_word(c)?)))
                    .collect::<Result<Vec<_>>>()?;
                elements.insert(name.clone(), HtElement::new(*n, *r, pairs)?);
            }
            let spec = build_higman_thompson(&a, *n, *r, &elements)?;
            let oracle = Arc::new(HtOracle::new(a, *n, *r, &elements)?);
            Ok(Built { spec, oracle: oracle.clone(), rule: BoundRule::Higman(oracle) })
        }
        GroupDef::Rewrite { alphabet: pairs, images, inner } => {
            let a = alphabet(pairs)?;
            let inner = build(inner)?;
            let base = spec_alphabet(&inner.spec);
            let mut words = Vec::with_capacity(a.len());
            for x in a.letters() {
                let text = images
                    .get(a.name(x))
                    .ok_or_else(|| Error::TableIncomplete(format!("no image for `{}`", a.name(x))))?;
                words.push(base.parse_word(text)?);
            }
            let spec = rewrite_generators(&inner.spec, &a, &words)?;
            let factor = words.iter().map(Vec::len).max().unwrap_or(1);
            let oracle = Arc::new(oracle_rewritten(inner.oracle, a, words)?);
            Ok(Built { spec, oracle, rule: BoundRule::Scaled { factor, inner: Box::new(inner.rule) } })
        }
        GroupDef::FiniteExtension { alphabet: pairs, transversal, rows, inner } => {
            let a = alphabet(pairs)?;
            let inner = build(inner)?;
            let basis = spec_alphabet(&inner.spec);
            let data = VirtuallyFreeData::new(a, basis, transversal.clone(), rows)?;
            let spec = extend_finite(&inner.spec, &data)?;
            let factor = max_row(&data).max(1);
            let oracle = Arc::new(oracle_finite_extension(inner.oracle, data)?);
            Ok(Built { spec, oracle, rule: BoundRule::Scaled { factor, inner: Box::new(inner.rule) } })
        }
        GroupDef::DirectProduct { left, right } => {
            let (h, k) = (build(left)?, build(right)?);
            let spec = product_direct(&h.spec, &k.spec)?;
            let oracle = Arc::new(oracle_direct_product(h.oracle, k.oracle)?);
            Ok(Built { spec, oracle, rule: BoundRule::Direct(Box::new(h.rule), Box::new(k.rule)) })
        }
        GroupDef::FreeProduct { left, right } => {
            let (h, k) = (build(left)?, build(right)?);
            let spec = product_free(&h.spec, &k.spec)?;
            let oracle = Arc::new(oracle_free_product(h.oracle, k.oracle)?);
            Ok(Built { spec, oracle, rule: BoundRule::Free(Box::new(h.rule), Box::new(k.rule)) })
        }
        GroupDef::Wreath { base, top } => {
            let h = build(base)?;
            let data = table(top)?;
            let spec = product_wreath(&h.spec, &data)?;
            let per_letter = max_row(&data);
            let oracle = Arc::new(oracle_wreath(h.oracle, data)?);
            Ok(Built { spec, oracle, rule: BoundRule::Wreath { base: Box::new(h.rule), per_letter } })
        }
    }
}
