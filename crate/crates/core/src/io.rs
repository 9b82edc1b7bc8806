//! The `fa/1` exchange format and the DOT renderer.
//!
//! A model file is one JSON document. Arrows are stored in function form
//! and every port reference is written `<box>.<port>`; labels are written
//! as words. [`save`] is canonical: keys sorted, records sorted by id,
//! two-space indentation, LF line ends and a final newline, so that
//! `save(load(save(m))) == save(m)` byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    dataflow_algebra, instance_new, mass_algebra, AlgebraError, Behavior, DataflowAlgebra, Instance, MassAlgebra,
    MassAssignment, MassVariant, UsageTable, Valuation,
};
use crate::error::StructureError;
use crate::matrix::{PortIndex, SemiringMatrix};
use crate::semiring::{Lang, LinkLabel, Word};
use crate::structure::{tensor_all, BoxShape, Link, LinkMap, MultiArrow, PortId, Registry, WiringArrow};

pub const FORMAT_VERSION: &str = "fa/1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format version {found:?}, expected {FORMAT_VERSION:?}")]
    Version { found: String },
    #[error("{at}: {source}")]
    Structure {
        at: String,
        #[source]
        source: StructureError,
    },
    #[error("{at}: {source}")]
    Algebra {
        at: String,
        #[source]
        source: AlgebraError,
    },
    #[error("{at}: port reference {reference:?} {reason}")]
    PortRef {
        at: String,
        reference: String,
        reason: &'static str,
    },
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
}

impl IoError {
    fn parse(e: serde_json::Error) -> Self {
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    /// The structure error behind a load failure, if any.
    pub fn structure(&self) -> Option<&StructureError> {
        match self {
            IoError::Structure { source, .. } => Some(source),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: String,
    #[serde(default)]
    pub boxes: Vec<BoxRecord>,
    #[serde(default)]
    pub arrows: Vec<ArrowRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multi_arrows: Vec<MultiArrowRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bindings: Option<Bindings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRecord {
    pub id: String,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    #[serde(rename = "out")]
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowRecord {
    pub id: String,
    /// Box ids whose tensor is the domain; empty for the unit.
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub in_links: Vec<LinkRecord>,
    pub out_links: Vec<LinkRecord>,
}

fn is_false(b: &bool) -> bool {
    !b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRecord {
    pub label: String,
    pub target: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub unit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiArrowRecord {
    pub id: String,
    pub arrow: String,
    pub domains: Vec<String>,
}

/// Data for one of the built-in algebras. Port keys use the on-disk
/// `<box>.<port>` form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algebra", rename_all = "snake_case")]
pub enum Bindings {
    Mass {
        variant: MassVariant,
        box_mass: BTreeMap<String, f64>,
        #[serde(default)]
        link_mass: BTreeMap<String, f64>,
    },
    Dataflow {
        behaviors: BTreeMap<String, Vec<TableRow>>,
        #[serde(default)]
        defaults: BTreeMap<String, i64>,
        #[serde(default = "bits")]
        value_domain: Vec<i64>,
    },
    Instance {
        usage_sets: BTreeMap<String, Vec<String>>,
        usage_fns: Vec<UsageFnRecord>,
    },
}

fn bits() -> Vec<i64> {
    vec![0, 1]
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    #[serde(rename = "in")]
    pub input: BTreeMap<String, i64>,
    pub out: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsageFnRecord {
    pub arrow: String,
    pub table: Vec<UsageRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsageRow {
    pub args: Vec<String>,
    pub value: String,
}

impl Bindings {
    pub fn name(&self) -> &'static str {
        match self {
            Bindings::Mass { .. } => "mass",
            Bindings::Dataflow { .. } => "dataflow",
            Bindings::Instance { .. } => "instance",
        }
    }

    fn canonicalize(&mut self) {
        match self {
            Bindings::Mass { .. } => {}
            Bindings::Dataflow {
                behaviors,
                value_domain,
                ..
            } => {
                behaviors.values_mut().for_each(|rows| rows.sort());
                value_domain.sort();
                value_domain.dedup();
            }
            Bindings::Instance { usage_sets, usage_fns } => {
                for s in usage_sets.values_mut() {
                    s.sort();
                    s.dedup();
                }
                for f in usage_fns.iter_mut() {
                    f.table.sort();
                }
                usage_fns.sort();
            }
        }
    }

    pub fn mass(&self) -> Result<MassAlgebra, AlgebraError> {
        let Bindings::Mass {
            variant,
            box_mass,
            link_mass,
        } = self
        else {
            return Err(AlgebraError::MissingAction(format!(
                "mass bindings (found {})",
                self.name()
            )));
        };
        let link_mass = link_mass
            .iter()
            .map(|(l, m)| Ok((LinkLabel::new(l.as_str()).map_err(StructureError::from)?, *m)))
            .collect::<Result<_, AlgebraError>>()?;
        mass_algebra(
            MassAssignment {
                box_mass: box_mass.clone(),
                link_mass,
            },
            *variant,
        )
    }

    pub fn dataflow(&self, reg: &Registry) -> Result<DataflowAlgebra, IoError> {
        let Bindings::Dataflow {
            behaviors,
            defaults,
            value_domain,
        } = self
        else {
            return Err(IoError::Algebra {
                at: "bindings".into(),
                source: AlgebraError::MissingAction(format!("dataflow bindings (found {})", self.name())),
            });
        };
        let mut fns = BTreeMap::new();
        for (id, rows) in behaviors {
            let at = format!("bindings.behaviors.{id}");
            let b = reg.get_box(id).map_err(|e| located(&at, e))?;
            let mut table = BTreeMap::new();
            for (k, row) in rows.iter().enumerate() {
                let at = format!("{at}[{k}]");
                let input = valuation(reg, &at, &row.input)?;
                let out = valuation(reg, &at, &row.out)?;
                if input.keys().cloned().collect::<BTreeSet<_>>() != *b.in_ports()
                    || out.keys().cloned().collect::<BTreeSet<_>>() != *b.out_ports()
                {
                    return Err(IoError::Algebra {
                        at,
                        source: AlgebraError::Arity {
                            arrow: format!("truth table of {id}"),
                            expected: b.in_ports().len() + b.out_ports().len(),
                            found: input.len() + out.len(),
                        },
                    });
                }
                table.insert(input, out);
            }
            fns.insert(id.clone(), Behavior::from_table(b, table));
        }
        let defaults = valuation(reg, "bindings.defaults", defaults)?;
        Ok(dataflow_algebra(fns)
            .with_defaults(defaults)
            .with_value_domain(value_domain.clone()))
    }

    pub fn instance(&self, reg: &Registry) -> Result<Instance, IoError> {
        let Bindings::Instance { usage_sets, usage_fns } = self else {
            return Err(IoError::Algebra {
                at: "bindings".into(),
                source: AlgebraError::MissingAction(format!("instance bindings (found {})", self.name())),
            });
        };
        let sets = usage_sets
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
            .collect();
        let mut fns = Vec::new();
        for f in usage_fns {
            let at = format!("bindings.usage_fns.{}", f.arrow);
            let ma = reg.multi(&f.arrow).map_err(|e| located(&at, e))?;
            let table: UsageTable = f.table.iter().map(|r| (r.args.clone(), r.value.clone())).collect();
            fns.push((ma, table));
        }
        instance_new(sets, fns).map_err(|source| IoError::Algebra {
            at: "bindings".into(),
            source,
        })
    }
}

fn valuation(reg: &Registry, at: &str, v: &BTreeMap<String, i64>) -> Result<Valuation, IoError> {
    v.iter().map(|(p, x)| Ok((resolve_port(reg, at, p)?, *x))).collect()
}

/// A loaded model: the validated structure plus optional algebra data.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub registry: Registry,
    pub bindings: Option<Bindings>,
}

fn located(at: &str, source: StructureError) -> IoError {
    IoError::Structure {
        at: at.to_string(),
        source,
    }
}

fn resolve_port(reg: &Registry, at: &str, reference: &str) -> Result<PortId, IoError> {
    let bad = |reason| IoError::PortRef {
        at: at.to_string(),
        reference: reference.to_string(),
        reason,
    };
    let (owner, port) = reference
        .split_once('.')
        .ok_or_else(|| bad("is not of the form <box>.<port>"))?;
    let port = PortId::new(port).map_err(|e| located(at, e.into()))?;
    match reg.owner_of(&port) {
        Some(o) if o == owner => Ok(port),
        Some(_) => Err(bad("names the wrong owner box")),
        None => Err(located(
            at,
            StructureError::UnknownPort {
                label: String::new(),
                port: reference.to_string(),
            },
        )),
    }
}

fn qualify(reg: &Registry, p: &PortId) -> String {
    match reg.owner_of(p) {
        Some(owner) => format!("{owner}.{p}"),
        None => p.to_string(),
    }
}

fn resolve_box(reg: &Registry, at: &str, ids: &[String]) -> Result<BoxShape, IoError> {
    if let [id] = ids {
        return reg.get_box(id).cloned().map_err(|e| located(at, e));
    }
    let parts = ids
        .iter()
        .map(|id| reg.get_box(id).cloned())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| located(at, e))?;
    Ok(tensor_all(&parts))
}

fn box_ids(reg: &Registry, b: &BoxShape) -> Vec<String> {
    if reg.get_box(b.id()).is_ok() {
        return vec![b.id().to_string()];
    }
    b.components().into_iter().map(str::to_string).collect()
}

/// Parses and fully validates a model.
pub fn load_str(text: &str) -> Result<Model, IoError> {
    let doc: ModelDocument = serde_json::from_str(text).map_err(IoError::parse)?;
    from_document(&doc)
}

pub fn load_bytes(bytes: &[u8]) -> Result<Model, IoError> {
    let doc: ModelDocument = serde_json::from_slice(bytes).map_err(IoError::parse)?;
    from_document(&doc)
}

pub fn load(path: impl AsRef<Path>) -> Result<Model, IoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_bytes(&bytes)
}

pub fn from_document(doc: &ModelDocument) -> Result<Model, IoError> {
    if doc.format_version != FORMAT_VERSION {
        return Err(IoError::Version {
            found: doc.format_version.clone(),
        });
    }
    let mut reg = Registry::new();
    for (k, rec) in doc.boxes.iter().enumerate() {
        let at = format!("boxes[{k}] ({})", rec.id);
        let strip = |refs: &[String]| -> Result<BTreeSet<PortId>, IoError> {
            refs.iter()
                .map(|r| match r.split_once('.') {
                    Some((owner, p)) if owner == rec.id => PortId::new(p).map_err(|e| located(&at, e.into())),
                    _ => Err(IoError::PortRef {
                        at: at.clone(),
                        reference: r.clone(),
                        reason: "must be prefixed with its own box id",
                    }),
                })
                .collect()
        };
        let b =
            BoxShape::new(rec.id.as_str(), strip(&rec.inputs)?, strip(&rec.outputs)?).map_err(|e| located(&at, e))?;
        reg.insert_box(b).map_err(|e| located(&at, e))?;
    }
    for (k, rec) in doc.arrows.iter().enumerate() {
        let at = format!("arrows[{k}] ({})", rec.id);
        let domain = resolve_box(&reg, &format!("{at}.domain"), &rec.domain)?;
        let codomain = resolve_box(&reg, &format!("{at}.codomain"), &rec.codomain)?;
        let links = |field: &str, recs: &[LinkRecord]| -> Result<LinkMap, IoError> {
            let mut out = LinkMap::new();
            for (j, l) in recs.iter().enumerate() {
                let at = format!("{at}.{field}[{j}] ({})", l.label);
                let word: Word = l
                    .label
                    .parse()
                    .map_err(|e: crate::error::IdentError| located(&at, e.into()))?;
                let target = resolve_port(&reg, &at, &l.target)?;
                let source = resolve_port(&reg, &at, &l.source)?;
                let link = if l.unit {
                    Link::unit(target, source)
                } else {
                    Link::new(target, source)
                };
                if out.insert(word, link).is_some() {
                    return Err(located(
                        &at,
                        StructureError::LabelCollision {
                            label: l.label.clone(),
                            owner: rec.id.clone(),
                        },
                    ));
                }
            }
            Ok(out)
        };
        let theta_in = links("in_links", &rec.in_links)?;
        let theta_out = links("out_links", &rec.out_links)?;
        let arrow = WiringArrow::new(domain, codomain, theta_in, theta_out).map_err(|e| {
            let at = link_location(&at, rec, &e);
            located(&at, e)
        })?;
        reg.insert_arrow(&rec.id, arrow).map_err(|e| {
            let at = link_location(&at, rec, &e);
            located(&at, e)
        })?;
    }
    for (k, rec) in doc.multi_arrows.iter().enumerate() {
        let at = format!("multi_arrows[{k}] ({})", rec.id);
        reg.declare_multi(&rec.id, &rec.arrow, rec.domains.clone())
            .map_err(|e| located(&at, e))?;
    }
    if let Some(b) = &doc.bindings {
        check_bindings(&reg, b)?;
    }
    Ok(Model {
        registry: reg,
        bindings: doc.bindings.clone(),
    })
}

/// Narrows an arrow-level error to the link it names, when it names one.
fn link_location(at: &str, rec: &ArrowRecord, e: &StructureError) -> String {
    let label = match e {
        StructureError::UnknownPort { label, .. }
        | StructureError::FeedbackProhibited { label, .. }
        | StructureError::PassthroughProhibited { label, .. }
        | StructureError::BadEndpoint { label, .. }
        | StructureError::LabelCollision { label, .. } => label.as_str(),
        StructureError::LinkInOutOverlap(label) => label.as_str(),
        _ => return at.to_string(),
    };
    let find = |field: &str, recs: &[LinkRecord]| {
        recs.iter()
            .position(|l| l.label == label)
            .map(|j| format!("{at}.{field}[{j}] ({label})"))
    };
    find("out_links", &rec.out_links)
        .or_else(|| find("in_links", &rec.in_links))
        .unwrap_or_else(|| at.to_string())
}

fn check_bindings(reg: &Registry, b: &Bindings) -> Result<(), IoError> {
    match b {
        Bindings::Mass { .. } => b.mass().map(|_| ()).map_err(|source| IoError::Algebra {
            at: "bindings".into(),
            source,
        }),
        Bindings::Dataflow { .. } => b.dataflow(reg).map(|_| ()),
        Bindings::Instance { .. } => b.instance(reg).map(|_| ()),
    }
}

/// The document `save` would write, before serialization.
pub fn to_document(reg: &Registry, bindings: Option<&Bindings>) -> ModelDocument {
    let boxes = reg
        .boxes()
        .map(|b| BoxRecord {
            id: b.id().to_string(),
            inputs: b.in_ports().iter().map(|p| format!("{}.{p}", b.id())).collect(),
            outputs: b.out_ports().iter().map(|p| format!("{}.{p}", b.id())).collect(),
        })
        .collect();
    let link_records = |links: &LinkMap| -> Vec<LinkRecord> {
        links
            .iter()
            .map(|(w, l)| LinkRecord {
                label: w.to_string(),
                target: qualify(reg, &l.target),
                source: qualify(reg, &l.source),
                unit: l.unit,
            })
            .collect()
    };
    let arrows = reg
        .arrows()
        .map(|(id, a)| ArrowRecord {
            id: id.to_string(),
            domain: box_ids(reg, a.domain()),
            codomain: box_ids(reg, a.codomain()),
            in_links: link_records(a.theta_in()),
            out_links: link_records(a.theta_out()),
        })
        .collect();
    let multi_arrows = reg
        .multi_decls()
        .map(|(id, d)| MultiArrowRecord {
            id: id.to_string(),
            arrow: d.arrow.clone(),
            domains: d.domains.clone(),
        })
        .collect();
    let bindings = bindings.cloned().map(|mut b| {
        b.canonicalize();
        b
    });
    ModelDocument {
        format_version: FORMAT_VERSION.to_string(),
        boxes,
        arrows,
        multi_arrows,
        bindings,
    }
}

/// Pretty JSON with sorted keys, LF line ends and a trailing newline.
pub fn canonical_json(value: &impl Serialize) -> String {
    // Round-tripping through `Value` sorts object keys: without the
    // `preserve_order` feature its maps are B-trees.
    let value = serde_json::to_value(value).expect("model records always serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("values always serialize");
    out.push('\n');
    out
}

pub fn save(reg: &Registry, bindings: Option<&Bindings>) -> String {
    canonical_json(&to_document(reg, bindings))
}

pub fn save_model(model: &Model) -> String {
    save(&model.registry, model.bindings.as_ref())
}

/// Named matrices in the same JSON conventions, for matrix fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub format_version: String,
    pub matrices: BTreeMap<String, MatrixRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRecord {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// `row → col → words`; absent entries are `∅`.
    pub entries: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

impl MatrixRecord {
    pub fn from_matrix(m: &SemiringMatrix) -> Self {
        let mut entries: BTreeMap<String, BTreeMap<String, Vec<String>>> = BTreeMap::new();
        for (r, c, l) in m.nonzero() {
            entries
                .entry(r.to_string())
                .or_default()
                .insert(c.to_string(), l.words().map(Word::to_string).collect());
        }
        MatrixRecord {
            rows: m.rows().iter().map(PortId::to_string).collect(),
            cols: m.cols().iter().map(PortId::to_string).collect(),
            entries,
        }
    }

    pub fn to_matrix(&self, at: &str) -> Result<SemiringMatrix, IoError> {
        let ports = |xs: &[String]| -> Result<Vec<PortId>, IoError> {
            xs.iter()
                .map(|p| PortId::new(p.as_str()).map_err(|e| located(at, e.into())))
                .collect()
        };
        let (rows, cols) = (ports(&self.rows)?, ports(&self.cols)?);
        let mut m = SemiringMatrix::zero(PortIndex::sorted(rows.clone()), PortIndex::sorted(cols.clone()));
        for (r, row) in &self.entries {
            for (c, words) in row {
                let (r, c) = (PortId::new(r.as_str()), PortId::new(c.as_str()));
                let (Ok(r), Ok(c)) = (r, c) else {
                    return Err(located(at, StructureError::MalformedMatrix("bad index".into())));
                };
                if !rows.contains(&r) || !cols.contains(&c) {
                    return Err(located(
                        at,
                        StructureError::MalformedMatrix(format!("entry ({r}, {c}) is outside the index")),
                    ));
                }
                let words = words
                    .iter()
                    .map(|w| w.parse::<Word>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| located(at, e.into()))?;
                m.set(r, c, Lang::from_words(words));
            }
        }
        Ok(m)
    }
}

pub fn load_matrices(text: &str) -> Result<BTreeMap<String, SemiringMatrix>, IoError> {
    let file: MatrixFile = serde_json::from_str(text).map_err(IoError::parse)?;
    if file.format_version != FORMAT_VERSION {
        return Err(IoError::Version {
            found: file.format_version,
        });
    }
    file.matrices
        .iter()
        .map(|(name, rec)| Ok((name.clone(), rec.to_matrix(&format!("matrices.{name}"))?)))
        .collect()
}

pub fn save_matrices(ms: &BTreeMap<String, SemiringMatrix>) -> String {
    canonical_json(&MatrixFile {
        format_version: FORMAT_VERSION.to_string(),
        matrices: ms
            .iter()
            .map(|(k, m)| (k.clone(), MatrixRecord::from_matrix(m)))
            .collect(),
    })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn record_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        if matches!(ch, '{' | '}' | '|' | '<' | '>' | '"' | '\\' | ' ') {
            out.push('\\');
        }
        out.push(ch);
    }
    out
}

fn port_fields(ports: &BTreeSet<PortId>) -> String {
    ports
        .iter()
        .map(|p| format!("<{}> {}", record_text(p.as_str()), record_text(p.as_str())))
        .collect::<Vec<_>>()
        .join("|")
}

/// DOT for one arrow: the codomain is a cluster holding one record node
/// for its inputs, one for its outputs and one per constituent; every
/// word of the matrices becomes an edge from source port to target port.
pub fn render_dot(arrow: &MultiArrow) -> String {
    let cod = arrow.codomain();
    let cod_in = format!("{}:in", cod.id());
    let cod_out = format!("{}:out", cod.id());
    let mut owner: BTreeMap<&PortId, &str> = BTreeMap::new();
    for d in arrow.domains() {
        for p in d.all_ports() {
            owner.insert(p, d.id());
        }
    }

    let mut s = String::new();
    let _ = writeln!(s, "digraph {} {{", quote(arrow.name()));
    let _ = writeln!(s, "  rankdir=LR;");
    let _ = writeln!(s, "  node [shape=record];");
    let _ = writeln!(s, "  subgraph {} {{", quote(&format!("cluster_{}", cod.id())));
    let _ = writeln!(s, "    label={};", quote(cod.id()));
    let _ = writeln!(
        s,
        "    {} [label=\"{{{}}}\"];",
        quote(&cod_in),
        port_fields(cod.in_ports())
    );
    let _ = writeln!(
        s,
        "    {} [label=\"{{{}}}\"];",
        quote(&cod_out),
        port_fields(cod.out_ports())
    );
    let mut seen = BTreeSet::new();
    for d in arrow.domains() {
        if !seen.insert(d.id()) {
            continue;
        }
        let _ = writeln!(
            s,
            "    {} [label=\"{{{{{}}}|{}|{{{}}}}}\"];",
            quote(d.id()),
            port_fields(d.in_ports()),
            record_text(d.id()),
            port_fields(d.out_ports()),
        );
    }
    let _ = writeln!(s, "  }}");
    // Input links end at a constituent and start at a constituent output
    // or a codomain input; output links run from a constituent to the
    // codomain outputs.
    let node = |p: &PortId, fallback: &str| {
        let name = owner.get(p).copied().unwrap_or(fallback);
        format!("{}:{}", quote(name), quote(p.as_str()))
    };
    let body = arrow.body();
    for (t, src, lang) in body.m_in().nonzero() {
        let from = match arrow.domains().iter().find(|d| d.out_ports().contains(src)) {
            Some(d) => format!("{}:{}", quote(d.id()), quote(src.as_str())),
            None => format!("{}:{}", quote(&cod_in), quote(src.as_str())),
        };
        for w in lang.words() {
            let _ = writeln!(s, "  {from} -> {} [label={}];", node(t, &cod_in), quote(&w.to_string()));
        }
    }
    for (t, src, lang) in body.m_out().nonzero() {
        let to = format!("{}:{}", quote(&cod_out), quote(t.as_str()));
        for w in lang.words() {
            let _ = writeln!(
                s,
                "  {} -> {to} [label={}];",
                node(src, &cod_out),
                quote(&w.to_string())
            );
        }
    }
    let _ = writeln!(s, "}}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::compose;

    #[test]
    fn chain_roundtrip() {
        let reg = fixtures::chain().unwrap();
        let text = save(&reg, None);
        let model = load_str(&text).unwrap();
        assert_eq!(model.registry, reg);
        assert_eq!(save_model(&model), text);
        assert!(text.ends_with("}\n"));
        assert!(text.contains("\"X.a\""));
    }

    #[test]
    fn unit_only_document() {
        let text = r#"{"format_version": "fa/1", "boxes": [{"id": "I", "in": [], "out": []}], "arrows": []}"#;
        let model = load_str(text).unwrap();
        assert_eq!(model.registry.boxes().count(), 1);
    }

    #[test]
    fn version_is_checked() {
        let text = r#"{"format_version": "fa/0"}"#;
        assert!(matches!(load_str(text), Err(IoError::Version { .. })));
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = load_str("{\n  \"format_version\": \n}").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn port_collision_is_located() {
        let text = r#"{"format_version": "fa/1", "boxes": [
            {"id": "A", "in": ["A.p"], "out": []},
            {"id": "B", "in": ["B.p"], "out": []}], "arrows": []}"#;
        let err = load_str(text).unwrap_err();
        assert!(matches!(err.structure(), Some(StructureError::PortCollision { .. })));
        assert!(err.to_string().starts_with("boxes[1] (B)"), "{err}");
    }

    #[test]
    fn foreign_port_prefix() {
        let text = r#"{"format_version": "fa/1", "boxes": [{"id": "A", "in": ["B.p"], "out": []}], "arrows": []}"#;
        assert!(matches!(load_str(text), Err(IoError::PortRef { .. })));
    }

    #[test]
    fn product_operands_roundtrip() {
        let (a, b) = fixtures::product_operands();
        let ms: BTreeMap<_, _> = [("A".to_string(), a), ("B".to_string(), b)].into();
        let text = save_matrices(&ms);
        assert_eq!(load_matrices(&text).unwrap(), ms);
    }

    #[test]
    fn dot_for_self_loop() {
        let reg = fixtures::self_loop().unwrap();
        let dot = render_dot(&reg.multi("theta").unwrap());
        assert!(dot.contains("subgraph \"cluster_Z\""));
        assert_eq!(dot.matches(" -> ").count(), 5);
        for l in 1..=5 {
            assert!(dot.contains(&format!("[label=\"l{l}\"]")));
        }
        assert!(dot.contains("\"X\":\"c\" -> \"X\":\"a\""));
        assert_eq!(dot, render_dot(&reg.multi("theta").unwrap()));
    }

    #[test]
    fn dot_for_chain_composite() {
        let reg = fixtures::chain().unwrap();
        let theta = reg.multi("theta").unwrap();
        let theta1 = reg.multi("theta1").unwrap();
        let o = compose(theta.body(), theta1.body()).unwrap();
        let dot = render_dot(&MultiArrow::from_body("o", theta1.domains().to_vec(), o).unwrap());
        for w in ["l1.l3", "l2.l4", "l5", "l6.l7", "l6.l8"] {
            assert!(dot.contains(&format!("[label=\"{w}\"]")), "{w}");
        }
        assert!(!dot.contains("l9"));
    }

    #[test]
    fn dot_for_identity() {
        let reg = fixtures::self_loop().unwrap();
        let x = reg.get_box("X").unwrap();
        let dot = render_dot(&MultiArrow::identity(x));
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert!(dot.contains("\"X:in\":\"a\" -> \"X\":\"a\""));
        assert!(dot.contains("\"X\":\"c\" -> \"X:out\":\"c\""));
    }

    #[test]
    fn dot_escapes_record_syntax() {
        assert_eq!(record_text("a|b{c}"), "a\\|b\\{c\\}");
        assert_eq!(quote("x\"y"), "\"x\\\"y\"");
    }
}
