//! JSON files for structures, temporal structures, instances and function
//! tables. Writers are canonical: re-reading an emitted file gives an equal
//! value and re-emitting it gives the same text.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::powfun::FunctionTable;
use crate::relcore::{Constraint, Instance, Signature, Structure};
use crate::temporal::{OrderPattern, TemporalRelation, TemporalStructure};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SigEntry {
    name: String,
    arity: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    signature: Vec<SigEntry>,
    size: usize,
    relations: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemporalRelFile {
    name: String,
    arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    patterns: Option<Vec<Vec<u8>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemporalFile {
    relations: Vec<TemporalRelFile>,
}

/// Constraint arguments may name variables or give their index.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Arg {
    Index(usize),
    Name(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    rel: String,
    args: Vec<Arg>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    variables: Vec<String>,
    constraints: Vec<ConstraintFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile<T> {
    arity: usize,
    dom: usize,
    entries: Vec<T>,
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn read_file(path: impl AsRef<Path>) -> Result<String> {
    let p = path.as_ref();
    std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    let f: StructureFile = from_json(text)?;
    let sig = Signature::new(f.signature.iter().map(|e| (e.name.clone(), e.arity)).collect());
    let mut rels = f.relations;
    let mut tuples = Vec::with_capacity(sig.len());
    for (name, _) in &sig.entries {
        tuples.push(rels.remove(name).unwrap_or_default());
    }
    if let Some(extra) = rels.keys().next() {
        return Err(Error::Parse(format!("relation `{extra}` is not in the signature")));
    }
    Structure::checked(sig, f.size, tuples).map_err(|e| Error::Parse(e.to_string()))
}

pub fn structure_to_json(s: &Structure) -> String {
    to_json(&StructureFile {
        signature: s.signature.entries.iter().map(|(n, a)| SigEntry { name: n.clone(), arity: *a }).collect(),
        size: s.size,
        relations: s.signature.entries.iter().map(|(n, _)| n.clone()).zip(s.relations.iter().cloned()).collect(),
    })
}

pub fn parse_temporal(text: &str) -> Result<TemporalStructure> {
    let f: TemporalFile = from_json(text)?;
    let mut rels = Vec::with_capacity(f.relations.len());
    for r in f.relations {
        let rel = match (&r.formula, &r.patterns) {
            (Some(src), None) => TemporalRelation::compile_str(r.arity, src),
            (None, Some(ps)) => {
                let ps = ps.iter().map(|p| OrderPattern::new(p.clone())).collect::<Result<Vec<_>>>();
                ps.and_then(|ps| TemporalRelation::new(r.arity, ps))
            }
            _ => Err(Error::Parse(format!("`{}` needs exactly one of formula or patterns", r.name))),
        }
        .map_err(|e| Error::Parse(format!("`{}`: {e}", r.name)))?;
        rels.push((r.name, rel));
    }
    TemporalStructure::new(rels).map_err(|e| Error::Parse(e.to_string()))
}

/// Always writes the pattern form.
pub fn temporal_to_json(b: &TemporalStructure) -> String {
    to_json(&TemporalFile {
        relations: b
            .declared()
            .iter()
            .map(|(n, r)| TemporalRelFile {
                name: n.clone(),
                arity: r.arity(),
                formula: None,
                patterns: Some(r.patterns().iter().map(|p| p.ranks().to_vec()).collect()),
            })
            .collect(),
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let f: InstanceFile = from_json(text)?;
    let index: BTreeMap<&str, usize> = f.variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut cons = Vec::with_capacity(f.constraints.len());
    for c in &f.constraints {
        let args = c
            .args
            .iter()
            .map(|a| match a {
                Arg::Index(i) if *i < f.variables.len() => Ok(*i),
                Arg::Index(i) => Err(Error::Parse(format!("variable index {i} out of range"))),
                Arg::Name(n) => index.get(n.as_str()).copied().ok_or_else(|| Error::Parse(format!("unknown variable `{n}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        cons.push(Constraint { rel: c.rel.clone(), args });
    }
    Instance::new(f.variables, cons).map_err(|e| Error::Parse(e.to_string()))
}

/// Arguments are written as variable names.
pub fn instance_to_json(x: &Instance) -> String {
    to_json(&InstanceFile {
        variables: x.variables.clone(),
        constraints: x
            .constraints
            .iter()
            .map(|c| ConstraintFile {
                rel: c.rel.clone(),
                args: c.args.iter().map(|&a| Arg::Name(x.variables[a].clone())).collect(),
            })
            .collect(),
    })
}

fn check_table<T>(t: &TableFile<T>) -> Result<()> {
    let cells = t.dom.checked_pow(t.arity as u32);
    if cells != Some(t.entries.len()) {
        return Err(Error::Parse(format!(
            "table with arity {} over {} elements needs {} entries, got {}",
            t.arity,
            t.dom,
            cells.map_or("too many".to_string(), |c| c.to_string()),
            t.entries.len()
        )));
    }
    Ok(())
}

/// Table of order patterns (a map `X^m → Γ`-style pattern table).
pub fn parse_pattern_table(text: &str) -> Result<FunctionTable<OrderPattern>> {
    let f: TableFile<Vec<u8>> = from_json(text)?;
    check_table(&f)?;
    let entries = f.entries.into_iter().map(OrderPattern::new).collect::<Result<Vec<_>>>()?;
    Ok(FunctionTable { arity: f.arity, dom: f.dom, entries })
}

pub fn pattern_table_to_json(t: &FunctionTable<OrderPattern>) -> String {
    to_json(&TableFile { arity: t.arity, dom: t.dom, entries: t.entries.iter().map(|p| p.ranks().to_vec()).collect() })
}

pub fn parse_table<T: for<'a> Deserialize<'a>>(text: &str) -> Result<FunctionTable<T>> {
    let f: TableFile<T> = from_json(text)?;
    check_table(&f)?;
    Ok(FunctionTable { arity: f.arity, dom: f.dom, entries: f.entries })
}

pub fn table_to_json<T: Serialize + Clone>(t: &FunctionTable<T>) -> String {
    to_json(&TableFile { arity: t.arity, dom: t.dom, entries: t.entries.clone() })
}
