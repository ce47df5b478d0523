//! The JSON report emitted by the command-line front end. Field order and
//! map ordering are fixed so that identical inputs produce byte-identical
//! reports.

use crate::loss::{Counters, LossEntry, LossReport};
use crate::metric::ExtDistance;
use crate::poset::FinitePoset;
use crate::problem::AssignmentSection;
use crate::rational::format_rat;
use crate::reduce::{Cell, GridDecomposition, LinearDecomposition};
use serde::Serialize;
use std::collections::BTreeMap;

pub fn distance_to_wire(d: &ExtDistance) -> String {
    match d {
        ExtDistance::Finite(r) => format_rat(r),
        ExtDistance::Infinite => "inf".to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub validation: ValidationSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub poset_ok: bool,
    pub flow_ok: bool,
    pub module_f_ok: bool,
    pub module_g_ok: bool,
    pub assignment_ok: bool,
    pub issues: Vec<String>,
}

impl ValidationSummary {
    pub fn all_ok(&self) -> bool {
        self.poset_ok && self.flow_ok && self.module_f_ok && self.module_g_ok && self.assignment_ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LossSummary {
    pub strategy: String,
    pub algorithm: String,
    pub entries: Vec<EntryDump>,
    pub total: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    pub counters: CountersDump,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryDump {
    pub kind: String,
    pub p: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountersDump {
    pub par_left_evals: usize,
    pub par_right_evals: usize,
    pub tri_down_evals: usize,
    pub tri_up_evals: usize,
    pub bsearch_calls: usize,
    pub bsearch_iterations: usize,
    pub bsearch_iterations_max: usize,
    pub bsearch_within_bound: bool,
}

impl From<&Counters> for CountersDump {
    fn from(c: &Counters) -> Self {
        CountersDump {
            par_left_evals: c.par_left_evals,
            par_right_evals: c.par_right_evals,
            tri_down_evals: c.tri_down_evals,
            tri_up_evals: c.tri_up_evals,
            bsearch_calls: c.bsearch_calls,
            bsearch_iterations: c.bsearch_iterations,
            bsearch_iterations_max: c.bsearch_iterations_max,
            bsearch_within_bound: c.bsearch_within_bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub delta: String,
    pub epsilon_plus_delta: String,
    pub verified: bool,
    pub assignment: AssignmentSection,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum DecompositionDump {
    Linear(LinearDump),
    Grid(GridDump),
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearDump {
    pub criticals_f: Vec<String>,
    pub criticals_g: Vec<String>,
    pub pieces_f: Vec<PieceDump>,
    pub pieces_g: Vec<PieceDump>,
    pub b_f: Vec<String>,
    pub b_g: Vec<String>,
    pub r_f: Vec<String>,
    pub r_g: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceDump {
    pub members: Vec<String>,
    pub representative: String,
    pub target_cell: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridDump {
    pub criticals_f: Vec<Vec<usize>>,
    pub criticals_g: Vec<Vec<usize>>,
    pub cubes_f: Vec<CubeDump>,
    pub cubes_g: Vec<CubeDump>,
    pub alpha_pieces: Vec<SubCubeDump>,
    pub beta_pieces: Vec<SubCubeDump>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CubeDump {
    pub index: Vec<usize>,
    pub size: usize,
    pub min: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubCubeDump {
    pub cube: Vec<usize>,
    pub target: Vec<usize>,
    pub size: usize,
    pub min: String,
}

pub fn loss_summary(report: &LossReport, poset: &FinitePoset) -> LossSummary {
    let mut entries: Vec<&LossEntry> = report.entries.iter().collect();
    entries.sort_by_key(|e| (e.kind, e.p, e.q));
    LossSummary {
        strategy: report.strategy.as_str().to_string(),
        algorithm: report.algorithm.as_str().to_string(),
        entries: entries
            .into_iter()
            .map(|e| EntryDump {
                kind: e.kind.as_str().to_string(),
                p: poset.label(e.p).to_string(),
                q: e.q.map(|q| poset.label(q).to_string()),
                value: distance_to_wire(&e.value),
            })
            .collect(),
        total: distance_to_wire(&report.total),
        epsilon: report.epsilon.map(|e| format_rat(&e)),
        bound: report.bound.as_ref().map(distance_to_wire),
        counters: (&report.counters).into(),
    }
}

pub fn linear_dump(dec: &LinearDecomposition, poset: &FinitePoset) -> DecompositionDump {
    let label = |e: &usize| poset.label(*e).to_string();
    let cell_name = |cells: &[Cell], id: usize| match &cells[id] {
        Cell::Critical(c) => format!("critical {}", poset.label(*c)),
        Cell::Run(members) => format!(
            "run {}..{}",
            poset.label(members[0]),
            poset.label(*members.last().expect("runs are nonempty"))
        ),
    };
    let pieces = |pieces: &[crate::reduce::Piece], cells: &[Cell]| {
        pieces
            .iter()
            .map(|p| PieceDump {
                members: p.members.iter().map(label).collect(),
                representative: poset.label(p.rep).to_string(),
                target_cell: cell_name(cells, p.target_cell),
            })
            .collect()
    };
    DecompositionDump::Linear(LinearDump {
        criticals_f: dec.criticals_f.iter().map(label).collect(),
        criticals_g: dec.criticals_g.iter().map(label).collect(),
        pieces_f: pieces(&dec.pieces_f, &dec.cells_g),
        pieces_g: pieces(&dec.pieces_g, &dec.cells_f),
        b_f: dec.b_f.iter().map(label).collect(),
        b_g: dec.b_g.iter().map(label).collect(),
        r_f: dec.r_f.iter().map(label).collect(),
        r_g: dec.r_g.iter().map(label).collect(),
    })
}

pub fn grid_dump(dec: &GridDecomposition, poset: &FinitePoset) -> DecompositionDump {
    let cube = |c: &crate::reduce::GridCube| CubeDump {
        index: c.index.clone(),
        size: c.members.len(),
        min: poset.label(c.min).to_string(),
    };
    let sub = |cubes: &[crate::reduce::GridCube], s: &crate::reduce::SubCube| SubCubeDump {
        cube: cubes[s.cube].index.clone(),
        target: s.target.clone(),
        size: s.members.len(),
        min: poset.label(s.min).to_string(),
    };
    DecompositionDump::Grid(GridDump {
        criticals_f: dec.criticals_f.clone(),
        criticals_g: dec.criticals_g.clone(),
        cubes_f: dec.cubes_f.iter().map(cube).collect(),
        cubes_g: dec.cubes_g.iter().map(cube).collect(),
        alpha_pieces: dec.alpha.iter().map(|s| sub(&dec.cubes_f, s)).collect(),
        beta_pieces: dec.beta.iter().map(|s| sub(&dec.cubes_g, s)).collect(),
    })
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Convenience constructor for reports that carry only validation output.
pub fn validation_report(summary: ValidationSummary) -> ReportFile {
    ReportFile { validation: summary, loss: None, decomposition: None, certificate: None }
}

/// Map of per-element labels, used when embedding assignments in reports.
pub type LabelMap = BTreeMap<String, String>;
