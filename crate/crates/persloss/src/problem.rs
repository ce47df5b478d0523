//! The self-describing JSON problem format: poset, flow, the two modules,
//! and optionally a full assignment or representative maps to extend.
//!
//! Rationals travel as `"num/den"` strings (bare integers accepted on
//! input) and infinity as the literal string `"inf"`, so exact values
//! survive the wire. Maps are keyed by element label; Hasse edges by
//! `"p->q"`.

use crate::backend::{is_prime, Matrix, Morphism, Object, SetMap};
use crate::flow::{GridFlow, StepFlow, Translation};
use crate::loss::{Assignment, DiagramAlgorithm, Strategy};
use crate::pmodule::PersModule;
use crate::poset::FinitePoset;
use crate::rational::{parse_rat, Rat};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ProblemError {
    ProblemError::Invalid(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub poset: PosetSection,
    pub flow: FlowSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<u64>,
    pub modules: ModulesSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<AssignmentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representative_maps: Option<AssignmentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PosetSection {
    Grid { axes: Vec<usize> },
    Explicit { elements: Vec<String>, relations: Vec<(String, String)> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub breakpoints: Vec<String>,
    pub translations: TranslationsSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TranslationsSection {
    /// Clamped shift by floor(breakpoint) on every axis.
    FloorShift,
    /// Independent per-axis generators sharing the breakpoint list.
    PerAxis { axes: Vec<AxisTranslations> },
    /// One explicit map per breakpoint, keyed by element label.
    Explicit { maps: Vec<BTreeMap<String, String>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AxisTranslations {
    FloorShift,
    /// One coordinate map per breakpoint.
    Explicit { maps: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulesSection {
    #[serde(rename = "F")]
    pub f: ModuleSection,
    #[serde(rename = "G")]
    pub g: ModuleSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModuleSection {
    Finset {
        /// element label -> object labels
        objects: BTreeMap<String, Vec<String>>,
        /// "p->q" -> source label -> target label
        maps: BTreeMap<String, BTreeMap<String, String>>,
    },
    Vec {
        /// element label -> dimension
        objects: BTreeMap<String, usize>,
        /// "p->q" -> row-major matrix, target_dim x source_dim
        maps: BTreeMap<String, Vec<Vec<u64>>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentSection {
    pub epsilon: String,
    /// element label -> component map (table or matrix)
    pub phi: BTreeMap<String, ComponentMap>,
    pub psi: BTreeMap<String, ComponentMap>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentMap {
    Table(BTreeMap<String, String>),
    Matrix(Vec<Vec<u64>>),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
}

/// A fully built problem: validated domain objects ready for computation.
/// Epsilon plus the per-element phi and psi maps awaiting extension.
pub type RepresentativeMaps = (Rat, BTreeMap<usize, Morphism>, BTreeMap<usize, Morphism>);

pub struct Problem {
    pub poset: Arc<FinitePoset>,
    pub flow: StepFlow,
    pub module_f: Arc<PersModule>,
    pub module_g: Arc<PersModule>,
    pub assignment: Option<Assignment>,
    /// Representative maps (keyed by element index) awaiting extension.
    pub representative_maps: Option<RepresentativeMaps>,
    pub strategy: Option<Strategy>,
    pub algorithm: Option<DiagramAlgorithm>,
    pub field: u64,
}

pub fn parse_strategy(s: &str) -> Result<Strategy, ProblemError> {
    match s {
        "naive" => Ok(Strategy::Naive),
        "predecessor" => Ok(Strategy::Predecessor),
        "linear" => Ok(Strategy::Linear),
        "grid" => Ok(Strategy::Grid),
        other => Err(invalid(format!("unknown strategy `{other}`"))),
    }
}

pub fn parse_algorithm(s: &str) -> Result<DiagramAlgorithm, ProblemError> {
    match s {
        "naive" => Ok(DiagramAlgorithm::Naive),
        "fc" => Ok(DiagramAlgorithm::Fc),
        "vec" => Ok(DiagramAlgorithm::Vec),
        other => Err(invalid(format!("unknown algorithm `{other}`"))),
    }
}

impl ProblemFile {
    pub fn from_str(text: &str) -> Result<Self, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    /// Builds and validates every section. `field_override` substitutes the
    /// field characteristic for vector modules.
    pub fn build(&self, field_override: Option<u64>) -> Result<Problem, ProblemError> {
        let poset = Arc::new(self.build_poset()?);
        let flow = self.build_flow(&poset)?;
        let field = field_override.or(self.field).unwrap_or(2);
        if !is_prime(field) {
            return Err(invalid(format!("field characteristic {field} is not prime")));
        }
        let module_f = Arc::new(build_module(&self.modules.f, &poset, field, "F")?);
        let module_g = Arc::new(build_module(&self.modules.g, &poset, field, "G")?);
        let assignment = match &self.assignment {
            Some(section) => Some(build_assignment(
                section,
                &poset,
                &flow,
                Arc::clone(&module_f),
                Arc::clone(&module_g),
                field,
            )?),
            None => None,
        };
        let representative_maps = match &self.representative_maps {
            Some(section) => {
                let eps = parse_rat(&section.epsilon).map_err(invalid)?;
                let translation = flow.translation_at(eps).clone();
                let phi = build_partial_side(
                    &section.phi,
                    &poset,
                    &translation,
                    &module_f,
                    &module_g,
                    field,
                    "phi",
                )?;
                let psi = build_partial_side(
                    &section.psi,
                    &poset,
                    &translation,
                    &module_g,
                    &module_f,
                    field,
                    "psi",
                )?;
                Some((eps, phi, psi))
            }
            None => None,
        };
        let strategy = match self.options.as_ref().and_then(|o| o.strategy.as_deref()) {
            Some(s) => Some(parse_strategy(s)?),
            None => None,
        };
        let algorithm = match self.options.as_ref().and_then(|o| o.algorithm.as_deref()) {
            Some(s) => Some(parse_algorithm(s)?),
            None => None,
        };
        Ok(Problem {
            poset,
            flow,
            module_f,
            module_g,
            assignment,
            representative_maps,
            strategy,
            algorithm,
            field,
        })
    }

    fn build_poset(&self) -> Result<FinitePoset, ProblemError> {
        match &self.poset {
            PosetSection::Grid { axes } => {
                FinitePoset::grid(axes).map_err(|e| invalid(format!("poset: {e}")))
            }
            PosetSection::Explicit { elements, relations } => {
                FinitePoset::build(elements.clone(), relations)
                    .map_err(|e| invalid(format!("poset: {e}")))
            }
        }
    }

    fn build_flow(&self, poset: &FinitePoset) -> Result<StepFlow, ProblemError> {
        let breakpoints: Vec<Rat> = self
            .flow
            .breakpoints
            .iter()
            .map(|s| parse_rat(s).map_err(invalid))
            .collect::<Result<_, _>>()?;
        let flow = match &self.flow.translations {
            TranslationsSection::FloorShift => match poset.grid_shape() {
                Some(shape) if shape.len() == 1 => {
                    StepFlow::floor_shift(shape[0], breakpoints)
                        .map_err(|e| invalid(format!("flow: {e}")))?
                }
                Some(shape) => {
                    let axes = shape
                        .iter()
                        .map(|&len| StepFlow::floor_shift(len, breakpoints.clone()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| invalid(format!("flow: {e}")))?;
                    GridFlow::new(axes)
                        .and_then(|gf| gf.induce(poset))
                        .map_err(|e| invalid(format!("flow: {e}")))?
                }
                None => {
                    return Err(invalid(
                        "floor_shift flow needs a grid poset; use explicit maps",
                    ))
                }
            },
            TranslationsSection::PerAxis { axes } => {
                let shape = poset
                    .grid_shape()
                    .ok_or_else(|| invalid("per_axis flow needs a grid poset"))?
                    .to_vec();
                if axes.len() != shape.len() {
                    return Err(invalid(format!(
                        "{} axis flows for a {}-axis grid",
                        axes.len(),
                        shape.len()
                    )));
                }
                let axis_flows = axes
                    .iter()
                    .zip(&shape)
                    .map(|(spec, &len)| match spec {
                        AxisTranslations::FloorShift => {
                            StepFlow::floor_shift(len, breakpoints.clone())
                        }
                        AxisTranslations::Explicit { maps } => {
                            let translations = maps
                                .iter()
                                .map(|m| Translation::new(m.clone()))
                                .collect::<Vec<_>>();
                            StepFlow::new(breakpoints.clone(), translations)
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| invalid(format!("flow: {e}")))?;
                GridFlow::new(axis_flows)
                    .and_then(|gf| gf.induce(poset))
                    .map_err(|e| invalid(format!("flow: {e}")))?
            }
            TranslationsSection::Explicit { maps } => {
                let translations = maps
                    .iter()
                    .enumerate()
                    .map(|(i, table)| {
                        let mut map = vec![usize::MAX; poset.len()];
                        for (from, to) in table {
                            let fi = lookup(poset, from)?;
                            let ti = lookup(poset, to)?;
                            map[fi] = ti;
                        }
                        if let Some(missing) = map.iter().position(|&v| v == usize::MAX) {
                            return Err(invalid(format!(
                                "translation {i} misses element `{}`",
                                poset.label(missing)
                            )));
                        }
                        Ok(Translation::new(map))
                    })
                    .collect::<Result<Vec<_>, ProblemError>>()?;
                StepFlow::new(breakpoints, translations)
                    .map_err(|e| invalid(format!("flow: {e}")))?
            }
        };
        Ok(flow)
    }
}

fn lookup(poset: &FinitePoset, label: &str) -> Result<usize, ProblemError> {
    poset
        .index_of(label)
        .ok_or_else(|| invalid(format!("unknown element `{label}`")))
}

fn edge_key(key: &str) -> Result<(&str, &str), ProblemError> {
    key.split_once("->")
        .ok_or_else(|| invalid(format!("edge key `{key}` is not of the form `p->q`")))
}

fn build_module(
    section: &ModuleSection,
    poset: &Arc<FinitePoset>,
    field: u64,
    name: &str,
) -> Result<PersModule, ProblemError> {
    let n = poset.len();
    match section {
        ModuleSection::Finset { objects, maps } => {
            let mut objs: Vec<Option<Object>> = vec![None; n];
            for (label, elems) in objects {
                objs[lookup(poset, label)?] = Some(Object::set(elems.clone()));
            }
            let objs: Vec<Object> = objs
                .into_iter()
                .enumerate()
                .map(|(i, o)| {
                    o.ok_or_else(|| {
                        invalid(format!("module {name}: no object at `{}`", poset.label(i)))
                    })
                })
                .collect::<Result<_, _>>()?;
            let mut edges = HashMap::new();
            for (key, table) in maps {
                let (p, q) = edge_key(key)?;
                let (pi, qi) = (lookup(poset, p)?, lookup(poset, q)?);
                let Object::Set { labels: src } = &objs[pi] else { unreachable!() };
                let Object::Set { labels: tgt } = &objs[qi] else { unreachable!() };
                let mut t = Vec::with_capacity(src.len());
                for s in src {
                    let image = table.get(s).ok_or_else(|| {
                        invalid(format!("module {name}: map {key} misses `{s}`"))
                    })?;
                    let ti = tgt.iter().position(|l| l == image).ok_or_else(|| {
                        invalid(format!(
                            "module {name}: map {key} sends `{s}` to unknown `{image}`"
                        ))
                    })?;
                    t.push(ti);
                }
                let sm = SetMap::new(src.len(), tgt.len(), t)
                    .map_err(|e| invalid(format!("module {name}: map {key}: {e}")))?;
                edges.insert((pi, qi), Morphism::Map(sm));
            }
            PersModule::new(Arc::clone(poset), objs, edges)
                .map_err(|e| invalid(format!("module {name}: {e}")))
        }
        ModuleSection::Vec { objects, maps } => {
            let mut objs: Vec<Option<Object>> = vec![None; n];
            for (label, dim) in objects {
                objs[lookup(poset, label)?] = Some(Object::space(*dim, field));
            }
            let objs: Vec<Object> = objs
                .into_iter()
                .enumerate()
                .map(|(i, o)| {
                    o.ok_or_else(|| {
                        invalid(format!("module {name}: no object at `{}`", poset.label(i)))
                    })
                })
                .collect::<Result<_, _>>()?;
            let mut edges = HashMap::new();
            for (key, rows) in maps {
                let (p, q) = edge_key(key)?;
                let (pi, qi) = (lookup(poset, p)?, lookup(poset, q)?);
                let cols = objs[pi].size();
                let m = Matrix::from_rows(rows.clone(), cols, field)
                    .map_err(|e| invalid(format!("module {name}: map {key}: {e}")))?;
                if m.rows != objs[qi].size() {
                    return Err(invalid(format!(
                        "module {name}: map {key} has {} rows, object at `{q}` has dim {}",
                        m.rows,
                        objs[qi].size()
                    )));
                }
                edges.insert((pi, qi), Morphism::Linear(m));
            }
            PersModule::new(Arc::clone(poset), objs, edges)
                .map_err(|e| invalid(format!("module {name}: {e}")))
        }
    }
}

fn build_component(
    map: &ComponentMap,
    source: &Object,
    target: &Object,
    field: u64,
    context: &str,
) -> Result<Morphism, ProblemError> {
    match (map, source, target) {
        (ComponentMap::Table(table), Object::Set { labels: src }, Object::Set { labels: tgt }) => {
            let mut t = Vec::with_capacity(src.len());
            for s in src {
                let image = table
                    .get(s)
                    .ok_or_else(|| invalid(format!("{context}: missing `{s}`")))?;
                let ti = tgt
                    .iter()
                    .position(|l| l == image)
                    .ok_or_else(|| invalid(format!("{context}: unknown image `{image}`")))?;
                t.push(ti);
            }
            Ok(Morphism::Map(
                SetMap::new(src.len(), tgt.len(), t).map_err(|e| invalid(format!("{context}: {e}")))?,
            ))
        }
        (ComponentMap::Matrix(rows), Object::Space { dim: src, .. }, Object::Space { dim: tgt, .. }) => {
            let m = Matrix::from_rows(rows.clone(), *src, field)
                .map_err(|e| invalid(format!("{context}: {e}")))?;
            if m.rows != *tgt {
                return Err(invalid(format!(
                    "{context}: {} rows for a target of dim {tgt}",
                    m.rows
                )));
            }
            Ok(Morphism::Linear(m))
        }
        _ => Err(invalid(format!("{context}: component does not match the backend"))),
    }
}

fn build_assignment(
    section: &AssignmentSection,
    poset: &Arc<FinitePoset>,
    flow: &StepFlow,
    module_f: Arc<PersModule>,
    module_g: Arc<PersModule>,
    field: u64,
) -> Result<Assignment, ProblemError> {
    let eps = parse_rat(&section.epsilon).map_err(invalid)?;
    let translation = flow.translation_at(eps).clone();
    let mut phi = Vec::with_capacity(poset.len());
    let mut psi = Vec::with_capacity(poset.len());
    for p in 0..poset.len() {
        let label = poset.label(p);
        let sp = translation.apply(p);
        let phi_map = section
            .phi
            .get(label)
            .ok_or_else(|| invalid(format!("assignment: phi misses `{label}`")))?;
        phi.push(build_component(
            phi_map,
            module_f.object(p),
            module_g.object(sp),
            field,
            &format!("phi at `{label}`"),
        )?);
        let psi_map = section
            .psi
            .get(label)
            .ok_or_else(|| invalid(format!("assignment: psi misses `{label}`")))?;
        psi.push(build_component(
            psi_map,
            module_g.object(p),
            module_f.object(sp),
            field,
            &format!("psi at `{label}`"),
        )?);
    }
    Assignment::new(module_f, module_g, translation, Some(eps), phi, psi)
        .map_err(|e| invalid(format!("assignment: {e}")))
}

fn build_partial_side(
    maps: &BTreeMap<String, ComponentMap>,
    poset: &Arc<FinitePoset>,
    translation: &Translation,
    source: &PersModule,
    target: &PersModule,
    field: u64,
    side: &str,
) -> Result<BTreeMap<usize, Morphism>, ProblemError> {
    let mut out = BTreeMap::new();
    for (label, map) in maps {
        let p = lookup(poset, label)?;
        let sp = translation.apply(p);
        out.insert(
            p,
            build_component(
                map,
                source.object(p),
                target.object(sp),
                field,
                &format!("{side} at `{label}`"),
            )?,
        );
    }
    Ok(out)
}

/// Serializes a morphism back into the wire form, given the backend objects.
pub fn component_to_wire(m: &Morphism, source: &Object, target: &Object) -> ComponentMap {
    match (m, source, target) {
        (Morphism::Map(sm), Object::Set { labels: src }, Object::Set { labels: tgt }) => {
            ComponentMap::Table(
                src.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), tgt[sm.apply(i)].clone()))
                    .collect(),
            )
        }
        (Morphism::Linear(mat), _, _) => ComponentMap::Matrix(
            (0..mat.rows).map(|r| mat.row(r).to_vec()).collect(),
        ),
        _ => unreachable!("morphism matches its objects"),
    }
}

/// Rebuilds the assignment section from a computed assignment, e.g. after
/// extension or de-interleaving.
pub fn assignment_to_section(asgn: &Assignment, eps: Rat) -> AssignmentSection {
    let poset = asgn.module_f().poset();
    let translation = asgn.translation();
    let mut phi = BTreeMap::new();
    let mut psi = BTreeMap::new();
    for p in 0..poset.len() {
        let sp = translation.apply(p);
        phi.insert(
            poset.label(p).to_string(),
            component_to_wire(asgn.phi(p), asgn.module_f().object(p), asgn.module_g().object(sp)),
        );
        psi.insert(
            poset.label(p).to_string(),
            component_to_wire(asgn.psi(p), asgn.module_g().object(p), asgn.module_f().object(sp)),
        );
    }
    AssignmentSection { epsilon: crate::rational::format_rat(&eps), phi, psi }
}
