//! Assignments and their loss.
//!
//! An assignment is a pair of per-point morphism families shaped like an
//! interleaving but with no commutativity promise. Each naturality
//! parallelogram and each triangle identity contributes a diagram loss (the
//! merging distance between its two composites); the total loss is their
//! supremum, and `epsilon + loss` bounds the interleaving distance.
//! Translating the assignment past its loss yields a genuine interleaving,
//! which `verify_interleaving` re-checks exactly.

use crate::backend::{compose, image_basis, restrict_image, BackendError, Matrix, Morphism};
use crate::flow::{compose_translations, StepFlow, Translation};
use crate::metric::{morphism_distance, reducing_constants, ExtDistance, MetricError};
use crate::pmodule::{ModuleError, PersModule};
use crate::rational::{format_rat, rat, rint, Rat};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LossError {
    #[error("assignment shape error: {0}")]
    Shape(String),
    #[error("modules live over different posets")]
    PosetMismatch,
    #[error("elements {0} and {1} are not comparable")]
    NotComparable(usize, usize),
    #[error("operation needs the {0} backend")]
    WrongBackend(&'static str),
    #[error("assignment has no declared epsilon for its translation")]
    NoEpsilonLabel,
    #[error("total loss is infinite")]
    InfiniteLoss,
    #[error("no breakpoint exceeds the de-interleaving bound {needed}; flow saturates at {last}")]
    InsufficientFlowRange { needed: String, last: String },
    #[error("strategy `{0}` is handled by the reduction module")]
    StrategyNeedsReduction(&'static str),
    #[error("de-interleaved assignment failed verification")]
    CertificateFailed,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagramKind {
    ParLeft,
    ParRight,
    TriDown,
    TriUp,
}

impl DiagramKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagramKind::ParLeft => "par_left",
            DiagramKind::ParRight => "par_right",
            DiagramKind::TriDown => "tri_down",
            DiagramKind::TriUp => "tri_up",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    Predecessor,
    Linear,
    Grid,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Predecessor => "predecessor",
            Strategy::Linear => "linear",
            Strategy::Grid => "grid",
        }
    }
}

/// How each individual diagram loss is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramAlgorithm {
    /// Linear scan over the breakpoints.
    Naive,
    /// Binary search over the reducing set, finite-set backend.
    Fc,
    /// Binary search shrinking an image subspace, vector backend.
    Vec,
}

impl DiagramAlgorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagramAlgorithm::Naive => "naive",
            DiagramAlgorithm::Fc => "fc",
            DiagramAlgorithm::Vec => "vec",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossEntry {
    pub kind: DiagramKind,
    pub p: usize,
    pub q: Option<usize>,
    pub value: ExtDistance,
}

#[derive(Debug, Clone)]
pub struct Counters {
    pub par_left_evals: usize,
    pub par_right_evals: usize,
    pub tri_down_evals: usize,
    pub tri_up_evals: usize,
    pub bsearch_calls: usize,
    pub bsearch_iterations: usize,
    pub bsearch_iterations_max: usize,
    /// Every binary search stayed within ceil(log2(|D|+1)) + 1 iterations.
    pub bsearch_within_bound: bool,
}

impl Default for Counters {
    fn default() -> Self {
        Counters {
            par_left_evals: 0,
            par_right_evals: 0,
            tri_down_evals: 0,
            tri_up_evals: 0,
            bsearch_calls: 0,
            bsearch_iterations: 0,
            bsearch_iterations_max: 0,
            bsearch_within_bound: true,
        }
    }
}

impl Counters {
    pub fn new() -> Self {
        Counters::default()
    }

    pub fn parallelogram_evals(&self) -> usize {
        self.par_left_evals + self.par_right_evals
    }

    pub fn diagrams_evaluated(&self) -> usize {
        self.parallelogram_evals() + self.tri_down_evals + self.tri_up_evals
    }

    fn record_search(&mut self, iterations: usize, set_len: usize) {
        self.bsearch_calls += 1;
        self.bsearch_iterations += iterations;
        self.bsearch_iterations_max = self.bsearch_iterations_max.max(iterations);
        self.bsearch_within_bound &= iterations <= search_iteration_bound(set_len);
    }
}

/// ceil(log2(m + 1)) + 1, the allowed iteration count for a binary search
/// over a reducing set of size m.
pub fn search_iteration_bound(set_len: usize) -> usize {
    let x = set_len + 1;
    let ceil_log2 = if x <= 1 { 0 } else { usize::BITS as usize - (x - 1).leading_zeros() as usize };
    ceil_log2 + 1
}

#[derive(Debug, Clone)]
pub struct LossReport {
    pub strategy: Strategy,
    pub algorithm: DiagramAlgorithm,
    pub entries: Vec<LossEntry>,
    pub total: ExtDistance,
    pub epsilon: Option<Rat>,
    /// epsilon + total when the assignment carries an epsilon label.
    pub bound: Option<ExtDistance>,
    pub counters: Counters,
}

impl LossReport {
    fn finish(
        strategy: Strategy,
        algorithm: DiagramAlgorithm,
        entries: Vec<LossEntry>,
        epsilon: Option<Rat>,
        counters: Counters,
    ) -> Self {
        let total = entries
            .iter()
            .map(|e| e.value)
            .max()
            .unwrap_or_else(ExtDistance::zero);
        let bound = epsilon.map(|e| total.plus(e));
        LossReport { strategy, algorithm, entries, total, epsilon, bound, counters }
    }

    /// Assembles a report from externally evaluated entries (used by the
    /// reduction strategies).
    pub fn from_entries(
        strategy: Strategy,
        algorithm: DiagramAlgorithm,
        entries: Vec<LossEntry>,
        epsilon: Option<Rat>,
        counters: Counters,
    ) -> Self {
        LossReport::finish(strategy, algorithm, entries, epsilon, counters)
    }
}

/// Which module a diagram loss is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Side {
    InF,
    InG,
}

/// Reducing-set cache plus instrumentation counters threaded through a
/// total-loss evaluation.
#[derive(Default)]
pub struct EvalScratch {
    pub cache: ReducingCache,
    pub counters: Counters,
}

impl EvalScratch {
    pub fn new() -> Self {
        EvalScratch { cache: ReducingCache::new(), counters: Counters::new() }
    }
}

/// Lazily computed reducing sets per (module, point).
#[derive(Default)]
pub struct ReducingCache {
    sets: HashMap<(bool, usize), Arc<Vec<Rat>>>,
}

impl ReducingCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(
        &mut self,
        side: Side,
        module: &PersModule,
        flow: &StepFlow,
        at: usize,
    ) -> Result<Arc<Vec<Rat>>, LossError> {
        let key = (matches!(side, Side::InG), at);
        if let Some(s) = self.sets.get(&key) {
            return Ok(Arc::clone(s));
        }
        let set = Arc::new(reducing_constants(module, flow, at)?.constants);
        self.sets.insert(key, Arc::clone(&set));
        Ok(set)
    }
}

/// A pair of unnatural transformations (phi, psi) relative to a translation
/// S, with an optional epsilon label when S is a flow translation.
#[derive(Debug, Clone)]
pub struct Assignment {
    f: Arc<PersModule>,
    g: Arc<PersModule>,
    translation: Translation,
    epsilon: Option<Rat>,
    phi: Vec<Morphism>,
    psi: Vec<Morphism>,
}

impl Assignment {
    pub fn new(
        f: Arc<PersModule>,
        g: Arc<PersModule>,
        translation: Translation,
        epsilon: Option<Rat>,
        phi: Vec<Morphism>,
        psi: Vec<Morphism>,
    ) -> Result<Self, LossError> {
        if !Arc::ptr_eq(f.poset(), g.poset()) {
            return Err(LossError::PosetMismatch);
        }
        let n = f.poset().len();
        if translation.len() != n {
            return Err(LossError::Shape(format!(
                "translation maps {} elements, poset has {n}",
                translation.len()
            )));
        }
        if phi.len() != n || psi.len() != n {
            return Err(LossError::Shape(format!(
                "{} phi and {} psi components for {n} elements",
                phi.len(),
                psi.len()
            )));
        }
        for p in 0..n {
            let sp = translation.apply(p);
            if phi[p].source_size() != f.object(p).size()
                || phi[p].target_size() != g.object(sp).size()
            {
                return Err(LossError::Shape(format!(
                    "phi at `{}` has shape {} -> {}, expected {} -> {}",
                    f.poset().label(p),
                    phi[p].source_size(),
                    phi[p].target_size(),
                    f.object(p).size(),
                    g.object(sp).size()
                )));
            }
            if psi[p].source_size() != g.object(p).size()
                || psi[p].target_size() != f.object(sp).size()
            {
                return Err(LossError::Shape(format!(
                    "psi at `{}` has shape {} -> {}, expected {} -> {}",
                    g.poset().label(p),
                    psi[p].source_size(),
                    psi[p].target_size(),
                    g.object(p).size(),
                    f.object(sp).size()
                )));
            }
        }
        Ok(Assignment { f, g, translation, epsilon, phi, psi })
    }

    /// The identity self-assignment of a module: S = id, epsilon = 0.
    pub fn identity_self(module: Arc<PersModule>) -> Self {
        let n = module.poset().len();
        let phi: Vec<Morphism> = (0..n).map(|p| Morphism::identity_of(module.object(p))).collect();
        Assignment {
            f: Arc::clone(&module),
            g: module,
            translation: Translation::identity(n),
            epsilon: Some(rint(0)),
            phi: phi.clone(),
            psi: phi,
        }
    }

    /// The natural self-assignment along the flow: phi = psi = the
    /// structure maps into the translated points. Always an interleaving.
    pub fn flow_self(module: Arc<PersModule>, flow: &StepFlow, eps: Rat) -> Result<Self, LossError> {
        let t = flow.translation_at(eps).clone();
        let n = module.poset().len();
        let maps: Vec<Morphism> = (0..n)
            .map(|p| module.map_between(p, t.apply(p)).map(|m| m.as_ref().clone()))
            .collect::<Result<_, _>>()?;
        Assignment::new(
            Arc::clone(&module),
            module,
            t,
            Some(eps),
            maps.clone(),
            maps,
        )
    }

    pub fn module_f(&self) -> &Arc<PersModule> {
        &self.f
    }

    pub fn module_g(&self) -> &Arc<PersModule> {
        &self.g
    }

    pub fn translation(&self) -> &Translation {
        &self.translation
    }

    pub fn epsilon(&self) -> Option<Rat> {
        self.epsilon
    }

    pub fn phi(&self, p: usize) -> &Morphism {
        &self.phi[p]
    }

    pub fn psi(&self, p: usize) -> &Morphism {
        &self.psi[p]
    }

    fn poset(&self) -> &crate::poset::FinitePoset {
        self.f.poset()
    }

    /// The two composites of the phi naturality parallelogram at (p, q),
    /// both landing in G(S q).
    fn par_left_pair(&self, p: usize, q: usize) -> Result<(Morphism, Morphism, usize), LossError> {
        if !self.poset().leq(p, q) {
            return Err(LossError::NotComparable(p, q));
        }
        let sp = self.translation.apply(p);
        let sq = self.translation.apply(q);
        let top = compose(self.f.map_between(p, q)?.as_ref(), &self.phi[q])?;
        let bottom = compose(&self.phi[p], self.g.map_between(sp, sq)?.as_ref())?;
        Ok((top, bottom, sq))
    }

    fn par_right_pair(&self, p: usize, q: usize) -> Result<(Morphism, Morphism, usize), LossError> {
        if !self.poset().leq(p, q) {
            return Err(LossError::NotComparable(p, q));
        }
        let sp = self.translation.apply(p);
        let sq = self.translation.apply(q);
        let top = compose(self.g.map_between(p, q)?.as_ref(), &self.psi[q])?;
        let bottom = compose(&self.psi[p], self.f.map_between(sp, sq)?.as_ref())?;
        Ok((top, bottom, sq))
    }

    /// The straight map F[p <= SSp] and the roundtrip through G, both
    /// landing in F(SS p).
    fn tri_down_pair(&self, p: usize) -> Result<(Morphism, Morphism, usize), LossError> {
        let sp = self.translation.apply(p);
        let ssp = self.translation.apply(sp);
        let straight = self.f.map_between(p, ssp)?.as_ref().clone();
        let roundtrip = compose(&self.phi[p], &self.psi[sp])?;
        Ok((straight, roundtrip, ssp))
    }

    fn tri_up_pair(&self, p: usize) -> Result<(Morphism, Morphism, usize), LossError> {
        let sp = self.translation.apply(p);
        let ssp = self.translation.apply(sp);
        let straight = self.g.map_between(p, ssp)?.as_ref().clone();
        let roundtrip = compose(&self.psi[p], &self.phi[sp])?;
        Ok((straight, roundtrip, ssp))
    }

    /// Exact commutation of the phi naturality square at (p, q).
    pub fn phi_square_commutes(&self, p: usize, q: usize) -> Result<bool, LossError> {
        let (a, b, _) = self.par_left_pair(p, q)?;
        Ok(a == b)
    }

    /// Exact commutation of the psi naturality square at (p, q).
    pub fn psi_square_commutes(&self, p: usize, q: usize) -> Result<bool, LossError> {
        let (a, b, _) = self.par_right_pair(p, q)?;
        Ok(a == b)
    }

    pub fn loss_par_left(&self, flow: &StepFlow, p: usize, q: usize) -> Result<ExtDistance, LossError> {
        let (f, g, at) = self.par_left_pair(p, q)?;
        Ok(morphism_distance(&self.g, flow, at, &f, &g)?)
    }

    pub fn loss_par_right(&self, flow: &StepFlow, p: usize, q: usize) -> Result<ExtDistance, LossError> {
        let (f, g, at) = self.par_right_pair(p, q)?;
        Ok(morphism_distance(&self.f, flow, at, &f, &g)?)
    }

    pub fn loss_tri_down(&self, flow: &StepFlow, p: usize) -> Result<ExtDistance, LossError> {
        let (f, g, at) = self.tri_down_pair(p)?;
        Ok(morphism_distance(&self.f, flow, at, &f, &g)?)
    }

    pub fn loss_tri_up(&self, flow: &StepFlow, p: usize) -> Result<ExtDistance, LossError> {
        let (f, g, at) = self.tri_up_pair(p)?;
        Ok(morphism_distance(&self.g, flow, at, &f, &g)?)
    }

    /// Binary-search evaluation of the phi parallelogram loss in an FC
    /// category, given the reducing set of S q on G. Returns the loss and
    /// the number of search iterations.
    pub fn loss_par_left_fc(
        &self,
        flow: &StepFlow,
        p: usize,
        q: usize,
        reducing: &[Rat],
    ) -> Result<(ExtDistance, usize), LossError> {
        let (f, g, at) = self.par_left_pair(p, q)?;
        fc_search(&self.g, flow, at, &f, &g, reducing)
    }

    /// Binary-search evaluation shrinking the image of the difference map,
    /// for vector-space modules.
    pub fn loss_par_left_vec(
        &self,
        flow: &StepFlow,
        p: usize,
        q: usize,
        reducing: &[Rat],
    ) -> Result<(ExtDistance, usize), LossError> {
        let (f, g, at) = self.par_left_pair(p, q)?;
        vec_search(&self.g, flow, at, &f, &g, reducing)
    }

    pub(crate) fn diagram_loss(
        &self,
        flow: &StepFlow,
        kind: DiagramKind,
        p: usize,
        q: Option<usize>,
        algorithm: DiagramAlgorithm,
        scratch: &mut EvalScratch,
    ) -> Result<ExtDistance, LossError> {
        let EvalScratch { cache, counters } = scratch;
        let (side, (fm, gm, at)) = match kind {
            DiagramKind::ParLeft => (Side::InG, self.par_left_pair(p, q.expect("pair"))?),
            DiagramKind::ParRight => (Side::InF, self.par_right_pair(p, q.expect("pair"))?),
            DiagramKind::TriDown => (Side::InF, self.tri_down_pair(p)?),
            DiagramKind::TriUp => (Side::InG, self.tri_up_pair(p)?),
        };
        let module = match side {
            Side::InF => &self.f,
            Side::InG => &self.g,
        };
        match kind {
            DiagramKind::ParLeft => counters.par_left_evals += 1,
            DiagramKind::ParRight => counters.par_right_evals += 1,
            DiagramKind::TriDown => counters.tri_down_evals += 1,
            DiagramKind::TriUp => counters.tri_up_evals += 1,
        }
        match algorithm {
            DiagramAlgorithm::Naive => Ok(morphism_distance(module, flow, at, &fm, &gm)?),
            DiagramAlgorithm::Fc => {
                let set = cache.get(side, module, flow, at)?;
                let (d, iters) = fc_search(module, flow, at, &fm, &gm, &set)?;
                counters.record_search(iters, set.len());
                Ok(d)
            }
            DiagramAlgorithm::Vec => {
                let set = cache.get(side, module, flow, at)?;
                let (d, iters) = vec_search(module, flow, at, &fm, &gm, &set)?;
                counters.record_search(iters, set.len());
                Ok(d)
            }
        }
    }

    /// The total loss. `Naive` evaluates parallelograms at every comparable
    /// pair; `Predecessor` only at Hasse edges. Triangles are evaluated at
    /// every element under both strategies.
    pub fn total_loss(
        &self,
        flow: &StepFlow,
        strategy: Strategy,
        algorithm: DiagramAlgorithm,
    ) -> Result<LossReport, LossError> {
        let pairs: Vec<(usize, usize)> = match strategy {
            Strategy::Naive => {
                let n = self.poset().len();
                let mut pairs = Vec::new();
                for p in 0..n {
                    for q in 0..n {
                        if self.poset().lt(p, q) {
                            pairs.push((p, q));
                        }
                    }
                }
                pairs
            }
            Strategy::Predecessor => self.poset().hasse_edges().to_vec(),
            Strategy::Linear => return Err(LossError::StrategyNeedsReduction("linear")),
            Strategy::Grid => return Err(LossError::StrategyNeedsReduction("grid")),
        };
        let mut scratch = EvalScratch::new();
        let mut entries = Vec::new();
        for &(p, q) in &pairs {
            for kind in [DiagramKind::ParLeft, DiagramKind::ParRight] {
                let value = self.diagram_loss(flow, kind, p, Some(q), algorithm, &mut scratch)?;
                entries.push(LossEntry { kind, p, q: Some(q), value });
            }
        }
        for p in 0..self.poset().len() {
            for kind in [DiagramKind::TriDown, DiagramKind::TriUp] {
                let value = self.diagram_loss(flow, kind, p, None, algorithm, &mut scratch)?;
                entries.push(LossEntry { kind, p, q: None, value });
            }
        }
        Ok(LossReport::finish(strategy, algorithm, entries, self.epsilon, scratch.counters))
    }

    /// The upper bound induced by the assignment: epsilon + total loss.
    pub fn bound(&self, flow: &StepFlow) -> Result<ExtDistance, LossError> {
        let eps = self.epsilon.ok_or(LossError::NoEpsilonLabel)?;
        let report = self.total_loss(flow, Strategy::Naive, DiagramAlgorithm::Naive)?;
        Ok(report.total.plus(eps))
    }

    /// Post-composes both families with the structure maps along `r`,
    /// yielding an assignment over the composite translation. The epsilon
    /// labels add when both are declared.
    pub fn translate(
        &self,
        r: &Translation,
        r_epsilon: Option<Rat>,
    ) -> Result<Assignment, LossError> {
        let n = self.poset().len();
        let mut phi = Vec::with_capacity(n);
        let mut psi = Vec::with_capacity(n);
        for p in 0..n {
            let sp = self.translation.apply(p);
            let rsp = r.apply(sp);
            phi.push(compose(&self.phi[p], self.g.map_between(sp, rsp)?.as_ref())?);
            psi.push(compose(&self.psi[p], self.f.map_between(sp, rsp)?.as_ref())?);
        }
        let translation = compose_translations(&self.translation, r);
        let epsilon = match (self.epsilon, r_epsilon) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Assignment::new(
            Arc::clone(&self.f),
            Arc::clone(&self.g),
            translation,
            epsilon,
            phi,
            psi,
        )
    }

    /// Re-targets the assignment at the flow translation for `eps`, which
    /// must dominate the current translation pointwise.
    pub fn promote_to(&self, flow: &StepFlow, eps: Rat) -> Result<Assignment, LossError> {
        let target = flow.translation_at(eps).clone();
        let n = self.poset().len();
        let mut phi = Vec::with_capacity(n);
        let mut psi = Vec::with_capacity(n);
        for p in 0..n {
            let sp = self.translation.apply(p);
            let tp = target.apply(p);
            if !self.poset().leq(sp, tp) {
                return Err(LossError::Shape(format!(
                    "flow translation at {} does not dominate the assignment translation",
                    format_rat(&eps)
                )));
            }
            phi.push(compose(&self.phi[p], self.g.map_between(sp, tp)?.as_ref())?);
            psi.push(compose(&self.psi[p], self.f.map_between(sp, tp)?.as_ref())?);
        }
        Assignment::new(
            Arc::clone(&self.f),
            Arc::clone(&self.g),
            target,
            Some(eps),
            phi,
            psi,
        )
    }

    /// Exact interleaving check: every naturality square and both triangle
    /// identities must commute on the nose (equivalently all diagram
    /// losses vanish, which coincides for these backends).
    pub fn verify_interleaving(&self) -> Result<InterleavingCheck, LossError> {
        let n = self.poset().len();
        let mut witnesses = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if !self.poset().lt(p, q) {
                    continue;
                }
                let (a, b, _) = self.par_left_pair(p, q)?;
                if a != b {
                    witnesses.push(InterleavingWitness::NaturalityPhi { p, q });
                }
                let (a, b, _) = self.par_right_pair(p, q)?;
                if a != b {
                    witnesses.push(InterleavingWitness::NaturalityPsi { p, q });
                }
            }
        }
        for p in 0..n {
            let (a, b, _) = self.tri_down_pair(p)?;
            if a != b {
                witnesses.push(InterleavingWitness::TriangleDown { p });
            }
            let (a, b, _) = self.tri_up_pair(p)?;
            if a != b {
                witnesses.push(InterleavingWitness::TriangleUp { p });
            }
        }
        Ok(InterleavingCheck { ok: witnesses.is_empty(), witnesses })
    }

    /// Translates the assignment by the smallest breakpoint exceeding the
    /// de-interleaving bound, then re-targets it at the flow translation
    /// for epsilon + delta. The result is verified to be an interleaving,
    /// certifying `d_I <= epsilon + delta`.
    pub fn deinterleave(&self, flow: &StepFlow) -> Result<(Assignment, Rat), LossError> {
        let report = self.total_loss(flow, Strategy::Naive, DiagramAlgorithm::Naive)?;
        if !report.total.is_finite() {
            return Err(LossError::InfiniteLoss);
        }
        if self.verify_interleaving()?.ok {
            return Ok((self.clone(), rint(0)));
        }
        // static part of the six-term bound: all parallelogram and triangle
        // losses of the assignment itself
        let static_max = report.total;
        let mut best: Option<Rat> = None;
        for (i, bp) in flow.breakpoints().iter().enumerate().skip(1) {
            let t_delta = &flow.translations()[i];
            // delta-dependent terms: parallelogram losses across the step
            // from S p up to T_delta S p, on both sides
            let mut six = static_max;
            for p in 0..self.poset().len() {
                let sp = self.translation.apply(p);
                let tsp = t_delta.apply(sp);
                six = six.max(self.loss_par_right(flow, sp, tsp)?);
                six = six.max(self.loss_par_left(flow, sp, tsp)?);
            }
            if ExtDistance::Finite(*bp) > six {
                best = Some(*bp);
                break;
            }
        }
        let Some(delta) = best else {
            let needed = match static_max {
                ExtDistance::Finite(r) => format_rat(&r),
                ExtDistance::Infinite => "inf".into(),
            };
            let last = format_rat(flow.breakpoints().last().expect("nonempty"));
            return Err(LossError::InsufficientFlowRange { needed, last });
        };
        let translated = self.translate(flow.translation_at(delta), Some(delta))?;
        let result = match self.epsilon {
            Some(eps) => translated.promote_to(flow, eps + delta)?,
            None => translated,
        };
        if !result.verify_interleaving()?.ok {
            return Err(LossError::CertificateFailed);
        }
        Ok((result, delta))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterleavingWitness {
    NaturalityPhi { p: usize, q: usize },
    NaturalityPsi { p: usize, q: usize },
    TriangleDown { p: usize },
    TriangleUp { p: usize },
}

#[derive(Debug, Clone)]
pub struct InterleavingCheck {
    pub ok: bool,
    pub witnesses: Vec<InterleavingWitness>,
}

/// Interleaved comparison values between consecutive reducing constants:
/// gamma_0 = 0, midpoints in between, and one value past the top.
fn gamma(reducing: &[Rat], i: usize) -> Rat {
    let m = reducing.len();
    if i == 0 {
        rint(0)
    } else if i < m {
        (reducing[i - 1] + reducing[i]) * rat(1, 2)
    } else {
        reducing[m - 1] + rint(1)
    }
}

/// Binary search for the least reducing constant at which the two
/// finite-set composites agree, keeping only the still-separated elements.
fn fc_search(
    module: &PersModule,
    flow: &StepFlow,
    at: usize,
    f: &Morphism,
    g: &Morphism,
    reducing: &[Rat],
) -> Result<(ExtDistance, usize), LossError> {
    let (Morphism::Map(fm), Morphism::Map(gm)) = (f, g) else {
        return Err(LossError::WrongBackend("finite-set"));
    };
    let m = reducing.len();
    let mut low = 0usize;
    let mut high = m + 1;
    let mut alive: Vec<usize> = (0..fm.source).collect();
    let mut iterations = 0usize;
    while low != high {
        iterations += 1;
        let i = (low + high) / 2;
        let target = flow.translation_at(gamma(reducing, i)).apply(at);
        let step = module.map_between(at, target)?;
        let Morphism::Map(step) = &*step else {
            return Err(LossError::WrongBackend("finite-set"));
        };
        let separated: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&a| step.apply(fm.apply(a)) != step.apply(gm.apply(a)))
            .collect();
        if separated.is_empty() {
            high = i;
        } else {
            low = i + 1;
            alive = separated;
        }
    }
    let value = if low == 0 {
        ExtDistance::zero()
    } else if low <= m {
        ExtDistance::Finite(reducing[low - 1])
    } else {
        ExtDistance::Infinite
    };
    Ok((value, iterations))
}

/// Binary search shrinking the image of the difference map through the
/// structure maps, for vector-space modules.
fn vec_search(
    module: &PersModule,
    flow: &StepFlow,
    at: usize,
    f: &Morphism,
    g: &Morphism,
    reducing: &[Rat],
) -> Result<(ExtDistance, usize), LossError> {
    let (Morphism::Linear(fm), Morphism::Linear(gm)) = (f, g) else {
        return Err(LossError::WrongBackend("vector-space"));
    };
    let diff: Matrix = fm.sub(gm)?;
    let mut image = image_basis(&diff);
    if image.is_zero() {
        return Ok((ExtDistance::zero(), 0));
    }
    let m = reducing.len();
    let mut low = 1usize;
    let mut high = m + 1;
    // the current image lives at the translate of `at` by gamma(low - 1)
    let mut home = at;
    let mut iterations = 0usize;
    while low != high {
        iterations += 1;
        let i = (low + high) / 2;
        let target = flow.translation_at(gamma(reducing, i)).apply(at);
        let step = module.map_between(home, target)?;
        let Morphism::Linear(step) = &*step else {
            return Err(LossError::WrongBackend("vector-space"));
        };
        let pushed = restrict_image(step, &image)?;
        if pushed.is_zero() {
            high = i;
        } else {
            low = i + 1;
            image = pushed;
            home = target;
        }
    }
    let value = if low <= m {
        ExtDistance::Finite(reducing[low - 1])
    } else {
        ExtDistance::Infinite
    };
    Ok((value, iterations))
}
