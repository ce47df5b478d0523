//! Diagram reductions: instead of evaluating losses at every comparable
//! pair, split each module's index poset into constant cells, subdivide the
//! cells by where the flow sends them, and evaluate only at representative
//! points.
//!
//! Representatives are always the minimum of their cell, which realizes the
//! limit object of a constant cell concretely as the object at that
//! minimum and makes every correction term vanish, so the reduced totals
//! agree exactly with the naive ones on constructible assignments.

use crate::backend::Morphism;
use crate::flow::{is_line_preserving, LinePreserving, StepFlow};
use crate::loss::{
    Assignment, DiagramAlgorithm, DiagramKind, EvalScratch, LossEntry, LossError, LossReport,
    Strategy,
};
use crate::pmodule::{ModuleError, PersModule};
use crate::rational::{format_rat, Rat};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("poset is not a linear order")]
    NotLinear,
    #[error("poset has no grid shape")]
    NotAGrid,
    #[error("epsilon {0} is not a flow breakpoint")]
    EpsilonNotBreakpoint(String),
    #[error("assignment carries no epsilon label")]
    NoEpsilonLabel,
    #[error("flow translation at epsilon is not line-preserving (axis {axis}, elements {p} and {q})")]
    NotLinePreserving { axis: usize, p: usize, q: usize },
    #[error("assignment is not constructible: the {side} square at ({p}, {q}) does not commute")]
    NotConstructible { side: &'static str, p: String, q: String },
    #[error("missing {side} representative map at `{elem}`")]
    MissingRepresentativeMap { side: &'static str, elem: String },
    #[error("structure map {p} -> {q} is not invertible; decomposition bug")]
    NonInvertibleStructureMap { p: String, q: String },
    #[error("cube {0:?} is not a constant interval; decomposition bug")]
    CubeNotConstant(Vec<usize>),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// One subdivision piece of an inter-critical run: the consecutive elements
/// sent by the flow into a single constant cell of the other module.
#[derive(Debug, Clone)]
pub struct Piece {
    /// Elements of the piece, ascending along the chain.
    pub members: Vec<usize>,
    /// The piece minimum; all correction terms vanish there.
    pub rep: usize,
    /// Cell of the codomain module the piece maps into.
    pub target_cell: usize,
}

/// Cells of a module over a linear order: criticals alternate with maximal
/// constant runs.
#[derive(Debug, Clone)]
pub enum Cell {
    Critical(usize),
    Run(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct LinearDecomposition {
    pub criticals_f: Vec<usize>,
    pub criticals_g: Vec<usize>,
    pub cells_f: Vec<Cell>,
    pub cells_g: Vec<Cell>,
    pub pieces_f: Vec<Piece>,
    pub pieces_g: Vec<Piece>,
    /// Criticals plus the first-piece representative of every run.
    pub b_f: Vec<usize>,
    pub b_g: Vec<usize>,
    /// Criticals plus the representatives of all pieces.
    pub r_f: Vec<usize>,
    pub r_g: Vec<usize>,
}

struct CellStructure {
    cells: Vec<Cell>,
    /// cell id per chain position
    cell_of: Vec<usize>,
    criticals: Vec<usize>,
}

fn cell_structure(module: &PersModule, order: &[usize]) -> Result<CellStructure, ReduceError> {
    let criticals = module.critical_values().map_err(|_| ReduceError::NotLinear)?;
    let is_critical: Vec<bool> = order.iter().map(|e| criticals.contains(e)).collect();
    let mut cells = Vec::new();
    let mut cell_of = vec![0usize; order.len()];
    let mut i = 0;
    while i < order.len() {
        if is_critical[i] {
            cell_of[i] = cells.len();
            cells.push(Cell::Critical(order[i]));
            i += 1;
        } else {
            let start = i;
            while i < order.len() && !is_critical[i] {
                i += 1;
            }
            let members: Vec<usize> = order[start..i].to_vec();
            for j in start..i {
                cell_of[j] = cells.len();
            }
            cells.push(Cell::Run(members));
        }
    }
    Ok(CellStructure { cells, cell_of, criticals })
}

/// Splits every inter-critical run of `source` into pieces mapping into
/// single cells of `target` under the flow translation at `eps`.
fn subdivide(
    source: &CellStructure,
    target: &CellStructure,
    position: &HashMap<usize, usize>,
    translate: impl Fn(usize) -> usize,
) -> Vec<Piece> {
    let mut pieces = Vec::new();
    for cell in &source.cells {
        let Cell::Run(members) = cell else { continue };
        let mut current: Option<(usize, Vec<usize>)> = None;
        for &t in members {
            let image = translate(t);
            let image_cell = target.cell_of[position[&image]];
            match &mut current {
                Some((cell_id, acc)) if *cell_id == image_cell => acc.push(t),
                _ => {
                    if let Some((cell_id, acc)) = current.take() {
                        pieces.push(Piece { rep: acc[0], members: acc, target_cell: cell_id });
                    }
                    current = Some((image_cell, vec![t]));
                }
            }
        }
        if let Some((cell_id, acc)) = current.take() {
            pieces.push(Piece { rep: acc[0], members: acc, target_cell: cell_id });
        }
    }
    pieces
}

/// Decomposes a pair of modules over a finite linear order relative to the
/// flow translation at `eps`, choosing every representative as its piece
/// minimum.
pub fn decompose_linear(
    f: &PersModule,
    g: &PersModule,
    flow: &StepFlow,
    eps: Rat,
) -> Result<LinearDecomposition, ReduceError> {
    let poset = f.poset();
    let order = poset.linear_order().map_err(|_| ReduceError::NotLinear)?;
    if !flow.is_breakpoint(eps) {
        return Err(ReduceError::EpsilonNotBreakpoint(format_rat(&eps)));
    }
    let translation = flow.translation_at(eps);
    let position: HashMap<usize, usize> =
        order.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let sf = cell_structure(f, &order)?;
    let sg = cell_structure(g, &order)?;
    let pieces_f = subdivide(&sf, &sg, &position, |t| translation.apply(t));
    let pieces_g = subdivide(&sg, &sf, &position, |t| translation.apply(t));
    let b_and_r = |s: &CellStructure, pieces: &[Piece]| {
        let mut b: Vec<usize> = s.criticals.clone();
        let mut r: Vec<usize> = s.criticals.clone();
        for cell in &s.cells {
            if let Cell::Run(members) = cell {
                // the first piece of the run starts at the run minimum
                b.push(members[0]);
            }
        }
        for piece in pieces {
            r.push(piece.rep);
        }
        b.sort_by_key(|e| position[e]);
        r.sort_by_key(|e| position[e]);
        r.dedup();
        (b, r)
    };
    let (b_f, r_f) = b_and_r(&sf, &pieces_f);
    let (b_g, r_g) = b_and_r(&sg, &pieces_g);
    Ok(LinearDecomposition {
        criticals_f: sf.criticals,
        criticals_g: sg.criticals,
        cells_f: sf.cells,
        cells_g: sg.cells,
        pieces_f,
        pieces_g,
        b_f,
        b_g,
        r_f,
        r_g,
    })
}

/// Verifies that the phi squares commute exactly inside every constant run
/// of F and the psi squares inside every constant run of G.
fn check_constructible_linear(
    asgn: &Assignment,
    dec: &LinearDecomposition,
) -> Result<(), ReduceError> {
    check_cells(asgn, dec.cells_f.iter(), dec.cells_g.iter())
}

fn check_cells<'a>(
    asgn: &Assignment,
    cells_f: impl Iterator<Item = &'a Cell>,
    cells_g: impl Iterator<Item = &'a Cell>,
) -> Result<(), ReduceError> {
    let poset = asgn.module_f().poset();
    for cell in cells_f {
        let Cell::Run(members) = cell else { continue };
        for &p in members {
            for &q in members {
                if poset.leq(p, q) && !asgn.phi_square_commutes(p, q)? {
                    return Err(ReduceError::NotConstructible {
                        side: "phi",
                        p: poset.label(p).to_string(),
                        q: poset.label(q).to_string(),
                    });
                }
            }
        }
    }
    for cell in cells_g {
        let Cell::Run(members) = cell else { continue };
        for &p in members {
            for &q in members {
                if poset.leq(p, q) && !asgn.psi_square_commutes(p, q)? {
                    return Err(ReduceError::NotConstructible {
                        side: "psi",
                        p: poset.label(p).to_string(),
                        q: poset.label(q).to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Loss over a linear order via the decomposition: phi parallelograms only
/// at consecutive pairs of B_F, triangles at every representative, and the
/// symmetric terms on the psi side.
pub fn total_loss_linear(
    asgn: &Assignment,
    flow: &StepFlow,
    algorithm: DiagramAlgorithm,
) -> Result<(LossReport, LinearDecomposition), ReduceError> {
    let eps = asgn.epsilon().ok_or(ReduceError::NoEpsilonLabel)?;
    let dec = decompose_linear(asgn.module_f(), asgn.module_g(), flow, eps)?;
    check_constructible_linear(asgn, &dec)?;
    let mut scratch = EvalScratch::new();
    let mut entries = Vec::new();
    for w in dec.b_f.windows(2) {
        let value =
            asgn.diagram_loss(flow, DiagramKind::ParLeft, w[0], Some(w[1]), algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::ParLeft, p: w[0], q: Some(w[1]), value });
    }
    for &s in &dec.r_f {
        let value =
            asgn.diagram_loss(flow, DiagramKind::TriDown, s, None, algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::TriDown, p: s, q: None, value });
    }
    for w in dec.b_g.windows(2) {
        let value =
            asgn.diagram_loss(flow, DiagramKind::ParRight, w[0], Some(w[1]), algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::ParRight, p: w[0], q: Some(w[1]), value });
    }
    for &s in &dec.r_g {
        let value =
            asgn.diagram_loss(flow, DiagramKind::TriUp, s, None, algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::TriUp, p: s, q: None, value });
    }
    let report =
        LossReport::from_entries(Strategy::Linear, algorithm, entries, Some(eps), scratch.counters);
    Ok((report, dec))
}

/// Extends maps given at B_F and B_G to a constructible assignment: inside
/// every constant run the missing components are forced by conjugating the
/// anchor map with the run's (invertible) structure maps.
pub fn extend_constructible(
    f: Arc<PersModule>,
    g: Arc<PersModule>,
    flow: &StepFlow,
    eps: Rat,
    phi_b: &BTreeMap<usize, Morphism>,
    psi_b: &BTreeMap<usize, Morphism>,
) -> Result<Assignment, ReduceError> {
    let dec = decompose_linear(&f, &g, flow, eps)?;
    let translation = flow.translation_at(eps).clone();
    let phi = extend_side(&f, &g, &translation, &dec.cells_f, &dec.b_f, phi_b, "phi")?;
    let psi = extend_side(&g, &f, &translation, &dec.cells_g, &dec.b_g, psi_b, "psi")?;
    Ok(Assignment::new(f, g, translation, Some(eps), phi, psi)?)
}

fn extend_side(
    source: &PersModule,
    target: &PersModule,
    translation: &crate::flow::Translation,
    cells: &[Cell],
    anchors: &[usize],
    given: &BTreeMap<usize, Morphism>,
    side: &'static str,
) -> Result<Vec<Morphism>, ReduceError> {
    let poset = source.poset();
    let n = poset.len();
    let mut out: Vec<Option<Morphism>> = vec![None; n];
    for &b in anchors {
        let m = given.get(&b).ok_or_else(|| ReduceError::MissingRepresentativeMap {
            side,
            elem: poset.label(b).to_string(),
        })?;
        out[b] = Some(m.clone());
    }
    for cell in cells {
        let Cell::Run(members) = cell else { continue };
        let anchor = members[0];
        let anchor_map = out[anchor].clone().expect("anchors cover run minima");
        for &t in &members[1..] {
            if out[t].is_some() {
                continue;
            }
            let up = source.map_between(anchor, t)?;
            let inv = up.inverse().map_err(|_| ReduceError::NonInvertibleStructureMap {
                p: poset.label(anchor).to_string(),
                q: poset.label(t).to_string(),
            })?;
            let forward = target.map_between(translation.apply(anchor), translation.apply(t))?;
            let composed = crate::backend::compose(
                &crate::backend::compose(&inv, &anchor_map).map_err(LossError::from)?,
                forward.as_ref(),
            )
            .map_err(LossError::from)?;
            out[t] = Some(composed);
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(p, m)| {
            m.ok_or_else(|| ReduceError::MissingRepresentativeMap {
                side,
                elem: poset.label(p).to_string(),
            })
        })
        .collect()
}

/// A constant cube of a grid module: the product of per-axis cells.
#[derive(Debug, Clone)]
pub struct GridCube {
    /// Per-axis cell indices (criticals at even positions, open runs at
    /// odd ones; empty runs keep their index but are dropped).
    pub index: Vec<usize>,
    pub members: Vec<usize>,
    pub min: usize,
}

/// A subdivision piece: the part of one constant cube that the flow sends
/// into one constant cube of the other module.
#[derive(Debug, Clone)]
pub struct SubCube {
    /// Position of the owning cube in its cube list.
    pub cube: usize,
    /// Index vector of the target cube in the other module's numbering.
    pub target: Vec<usize>,
    pub members: Vec<usize>,
    pub min: usize,
}

#[derive(Debug, Clone)]
pub struct GridDecomposition {
    pub criticals_f: Vec<Vec<usize>>,
    pub criticals_g: Vec<Vec<usize>>,
    pub cubes_f: Vec<GridCube>,
    pub cubes_g: Vec<GridCube>,
    pub alpha: Vec<SubCube>,
    pub beta: Vec<SubCube>,
    /// Positions in `alpha` of the minimal-target piece of each cube.
    pub b_hat: Vec<usize>,
    pub b_tilde: Vec<usize>,
}

struct AxisCells {
    /// (cell index, coordinates) for each nonempty cell, ascending.
    cells: Vec<(usize, Vec<usize>)>,
    /// position in `cells` per axis coordinate
    cell_of: Vec<usize>,
}

fn axis_cells(criticals: &[usize], len: usize) -> AxisCells {
    let mut cells: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut cell_of = vec![0usize; len];
    let mut next_critical = 0usize;
    let mut coord = 0usize;
    while coord < len {
        if next_critical < criticals.len() && criticals[next_critical] == coord {
            let j = 2 * (next_critical + 1);
            cell_of[coord] = cells.len();
            cells.push((j, vec![coord]));
            next_critical += 1;
            coord += 1;
        } else {
            let j = 2 * next_critical + 1;
            let start = coord;
            while coord < len
                && !(next_critical < criticals.len() && criticals[next_critical] == coord)
            {
                coord += 1;
            }
            let run: Vec<usize> = (start..coord).collect();
            for c in start..coord {
                cell_of[c] = cells.len();
            }
            cells.push((j, run));
        }
    }
    AxisCells { cells, cell_of }
}

struct GridCells {
    axes: Vec<AxisCells>,
    cubes: Vec<GridCube>,
}

fn grid_cells(module: &PersModule, shape: &[usize]) -> Result<GridCells, ReduceError> {
    let poset = module.poset();
    let axes: Vec<AxisCells> = (0..shape.len())
        .map(|axis| {
            let criticals: Vec<usize> = module
                .critical_coordinates(axis)
                .map_err(|_| ReduceError::NotAGrid)?
                .into_iter()
                .collect();
            Ok(axis_cells(&criticals, shape[axis]))
        })
        .collect::<Result<_, ReduceError>>()?;
    // cartesian product of per-axis cells
    let mut cubes: Vec<GridCube> = Vec::new();
    let mut selector = vec![0usize; axes.len()];
    loop {
        let index: Vec<usize> = selector
            .iter()
            .zip(&axes)
            .map(|(&s, a)| a.cells[s].0)
            .collect();
        let mut members = vec![Vec::new()];
        for (s, a) in selector.iter().zip(&axes) {
            let mut next = Vec::new();
            for base in &members {
                for &c in &a.cells[*s].1 {
                    let mut coords: Vec<usize> = base.clone();
                    coords.push(c);
                    next.push(coords);
                }
            }
            members = next;
        }
        let member_ids: Vec<usize> = members
            .iter()
            .map(|coords| poset.grid_index(coords).expect("grid coords"))
            .collect();
        let min_coords: Vec<usize> = selector
            .iter()
            .zip(&axes)
            .map(|(&s, a)| a.cells[s].1[0])
            .collect();
        let min = poset.grid_index(&min_coords).expect("grid coords");
        cubes.push(GridCube { index, members: member_ids, min });
        // advance the selector, last axis fastest
        let mut axis = axes.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            selector[axis] += 1;
            if selector[axis] < axes[axis].cells.len() {
                break;
            }
            selector[axis] = 0;
        }
        if selector.iter().all(|&s| s == 0) {
            break;
        }
    }
    Ok(GridCells { axes, cubes })
}

fn subdivide_grid(
    source: &GridCells,
    target: &GridCells,
    poset: &crate::poset::FinitePoset,
    translate: impl Fn(usize) -> usize,
) -> Result<(Vec<SubCube>, Vec<usize>), ReduceError> {
    let mut pieces = Vec::new();
    let mut minimal = Vec::new();
    for (ci, cube) in source.cubes.iter().enumerate() {
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for &p in &cube.members {
            let image = translate(p);
            let coords = poset.coords(image).expect("grid coords");
            let key: Vec<usize> = coords
                .iter()
                .enumerate()
                .map(|(axis, &c)| target.axes[axis].cells[target.axes[axis].cell_of[c]].0)
                .collect();
            groups.entry(key).or_default().push(p);
        }
        // the target of the cube minimum is componentwise minimal among the
        // targets, because the flow is line-preserving and monotone
        let min_target: Vec<usize> = {
            let coords = poset.coords(translate(cube.min)).expect("grid coords");
            coords
                .iter()
                .enumerate()
                .map(|(axis, &c)| target.axes[axis].cells[target.axes[axis].cell_of[c]].0)
                .collect()
        };
        for target_idx in groups.keys() {
            debug_assert!(
                min_target.iter().zip(target_idx).all(|(a, b)| a <= b),
                "cube minimum target must be componentwise minimal"
            );
        }
        for (target_idx, mut members) in groups {
            members.sort_unstable();
            let min_coords: Vec<usize> = {
                let mut acc = poset.coords(members[0]).expect("grid coords");
                for &m in &members[1..] {
                    let c = poset.coords(m).expect("grid coords");
                    for (a, v) in acc.iter_mut().zip(&c) {
                        *a = (*a).min(*v);
                    }
                }
                acc
            };
            let min = poset.grid_index(&min_coords).expect("grid coords");
            if !members.contains(&min) {
                // only possible for a non-line-preserving translation
                return Err(ReduceError::NotLinePreserving { axis: 0, p: members[0], q: min });
            }
            if target_idx == min_target {
                minimal.push(pieces.len());
            }
            pieces.push(SubCube { cube: ci, target: target_idx, members, min });
        }
    }
    Ok((pieces, minimal))
}

/// Decomposes a pair of grid modules relative to the (line-preserving) flow
/// translation at `eps`: constant cubes from the per-axis critical
/// coordinates, subdivision cubes from the flow preimages, and the
/// minimal-piece families used for the parallelogram terms.
pub fn decompose_grid(
    f: &PersModule,
    g: &PersModule,
    flow: &StepFlow,
    eps: Rat,
) -> Result<GridDecomposition, ReduceError> {
    let poset = f.poset();
    let shape = poset.grid_shape().ok_or(ReduceError::NotAGrid)?.to_vec();
    if !flow.is_breakpoint(eps) {
        return Err(ReduceError::EpsilonNotBreakpoint(format_rat(&eps)));
    }
    let translation = flow.translation_at(eps);
    match is_line_preserving(translation, poset).map_err(|_| ReduceError::NotAGrid)? {
        LinePreserving::Yes(_) => {}
        LinePreserving::No { axis, p, q } => {
            return Err(ReduceError::NotLinePreserving { axis, p, q })
        }
    }
    let cf = grid_cells(f, &shape)?;
    let cg = grid_cells(g, &shape)?;
    // every cube must be a constant interval; anything else is a bug
    // in the critical-coordinate scan
    for (cells, module) in [(&cf, f), (&cg, g)] {
        for cube in &cells.cubes {
            let interval = crate::poset::Interval { members: cube.members.clone() };
            if !module.is_constant_on(&interval) {
                return Err(ReduceError::CubeNotConstant(cube.index.clone()));
            }
        }
    }
    let (alpha, b_hat) = subdivide_grid(&cf, &cg, poset, |p| translation.apply(p))?;
    let (beta, b_tilde) = subdivide_grid(&cg, &cf, poset, |p| translation.apply(p))?;
    Ok(GridDecomposition {
        criticals_f: (0..shape.len())
            .map(|a| f.critical_coordinates(a).map(|s| s.into_iter().collect()))
            .collect::<Result<_, _>>()?,
        criticals_g: (0..shape.len())
            .map(|a| g.critical_coordinates(a).map(|s| s.into_iter().collect()))
            .collect::<Result<_, _>>()?,
        cubes_f: cf.cubes,
        cubes_g: cg.cubes,
        alpha,
        beta,
        b_hat,
        b_tilde,
    })
}

/// Cover pairs of the minimal-piece family under the componentwise order on
/// (cube index, target index).
fn hasse_pairs(dec_pieces: &[SubCube], family: &[usize], cubes: &[GridCube]) -> Vec<(usize, usize)> {
    let key = |piece: &SubCube| -> (Vec<usize>, Vec<usize>) {
        (cubes[piece.cube].index.clone(), piece.target.clone())
    };
    let leq = |a: &(Vec<usize>, Vec<usize>), b: &(Vec<usize>, Vec<usize>)| {
        a.0.iter().zip(&b.0).all(|(x, y)| x <= y) && a.1.iter().zip(&b.1).all(|(x, y)| x <= y)
    };
    let keys: Vec<_> = family.iter().map(|&i| key(&dec_pieces[i])).collect();
    let mut pairs = Vec::new();
    for (ai, a) in keys.iter().enumerate() {
        for (bi, b) in keys.iter().enumerate() {
            if ai == bi || !leq(a, b) || a == b {
                continue;
            }
            let covered = keys.iter().enumerate().any(|(ci, c)| {
                ci != ai && ci != bi && leq(a, c) && leq(c, b) && c != a && c != b
            });
            if !covered {
                pairs.push((family[ai], family[bi]));
            }
        }
    }
    pairs
}

/// Loss over a product of linear orders via the grid decomposition: phi
/// parallelograms at cover pairs of the minimal-piece family (realized at
/// cube minima), triangles at every piece minimum, and symmetric psi terms.
pub fn total_loss_grid(
    asgn: &Assignment,
    flow: &StepFlow,
    algorithm: DiagramAlgorithm,
) -> Result<(LossReport, GridDecomposition), ReduceError> {
    let eps = asgn.epsilon().ok_or(ReduceError::NoEpsilonLabel)?;
    let dec = decompose_grid(asgn.module_f(), asgn.module_g(), flow, eps)?;
    // cube-wise constructibility
    let poset = asgn.module_f().poset();
    for cube in &dec.cubes_f {
        for &p in &cube.members {
            for &q in &cube.members {
                if poset.leq(p, q) && !asgn.phi_square_commutes(p, q)? {
                    return Err(ReduceError::NotConstructible {
                        side: "phi",
                        p: poset.label(p).to_string(),
                        q: poset.label(q).to_string(),
                    });
                }
            }
        }
    }
    for cube in &dec.cubes_g {
        for &p in &cube.members {
            for &q in &cube.members {
                if poset.leq(p, q) && !asgn.psi_square_commutes(p, q)? {
                    return Err(ReduceError::NotConstructible {
                        side: "psi",
                        p: poset.label(p).to_string(),
                        q: poset.label(q).to_string(),
                    });
                }
            }
        }
    }
    let mut scratch = EvalScratch::new();
    let mut entries = Vec::new();
    for (a, b) in hasse_pairs(&dec.alpha, &dec.b_hat, &dec.cubes_f) {
        let (p, q) = (dec.alpha[a].min, dec.alpha[b].min);
        let value = asgn.diagram_loss(flow, DiagramKind::ParLeft, p, Some(q), algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::ParLeft, p, q: Some(q), value });
    }
    for piece in &dec.alpha {
        let value = asgn.diagram_loss(flow, DiagramKind::TriDown, piece.min, None, algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::TriDown, p: piece.min, q: None, value });
    }
    for (a, b) in hasse_pairs(&dec.beta, &dec.b_tilde, &dec.cubes_g) {
        let (p, q) = (dec.beta[a].min, dec.beta[b].min);
        let value = asgn.diagram_loss(flow, DiagramKind::ParRight, p, Some(q), algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::ParRight, p, q: Some(q), value });
    }
    for piece in &dec.beta {
        let value = asgn.diagram_loss(flow, DiagramKind::TriUp, piece.min, None, algorithm, &mut scratch)?;
        entries.push(LossEntry { kind: DiagramKind::TriUp, p: piece.min, q: None, value });
    }
    let report = LossReport::from_entries(Strategy::Grid, algorithm, entries, Some(eps), scratch.counters);
    Ok((report, dec))
}

/// Grid analogue of the constructible extension: maps are given at cube
/// minima and conjugated through the cube's invertible structure maps.
pub fn extend_constructible_grid(
    f: Arc<PersModule>,
    g: Arc<PersModule>,
    flow: &StepFlow,
    eps: Rat,
    phi_b: &BTreeMap<usize, Morphism>,
    psi_b: &BTreeMap<usize, Morphism>,
) -> Result<Assignment, ReduceError> {
    let dec = decompose_grid(&f, &g, flow, eps)?;
    let translation = flow.translation_at(eps).clone();
    let extend = |source: &PersModule,
                  target: &PersModule,
                  cubes: &[GridCube],
                  given: &BTreeMap<usize, Morphism>,
                  side: &'static str|
     -> Result<Vec<Morphism>, ReduceError> {
        let poset = source.poset();
        let mut out: Vec<Option<Morphism>> = vec![None; poset.len()];
        for cube in cubes {
            let anchor = cube.min;
            let anchor_map = given
                .get(&anchor)
                .ok_or_else(|| ReduceError::MissingRepresentativeMap {
                    side,
                    elem: poset.label(anchor).to_string(),
                })?
                .clone();
            for &t in &cube.members {
                if t == anchor {
                    out[t] = Some(anchor_map.clone());
                    continue;
                }
                let up = source.map_between(anchor, t)?;
                let inv = up.inverse().map_err(|_| ReduceError::NonInvertibleStructureMap {
                    p: poset.label(anchor).to_string(),
                    q: poset.label(t).to_string(),
                })?;
                let forward =
                    target.map_between(translation.apply(anchor), translation.apply(t))?;
                let composed = crate::backend::compose(
                    &crate::backend::compose(&inv, &anchor_map).map_err(LossError::from)?,
                    forward.as_ref(),
                )
                .map_err(LossError::from)?;
                out[t] = Some(composed);
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(p, m)| {
                m.ok_or_else(|| ReduceError::MissingRepresentativeMap {
                    side,
                    elem: poset.label(p).to_string(),
                })
            })
            .collect()
    };
    let phi = extend(&f, &g, &dec.cubes_f, phi_b, "phi")?;
    let psi = extend(&g, &f, &dec.cubes_g, psi_b, "psi")?;
    Ok(Assignment::new(f, g, translation, Some(eps), phi, psi)?)
}
