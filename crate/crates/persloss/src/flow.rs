//! Translations and step flows on finite posets.
//!
//! A flow here is a right-continuous step function over a finite breakpoint
//! list: `Trans(P)` is finite for a finite poset, so any flow is a step
//! function, and every infimum taken downstream (merging distance, loss) is
//! attained at a breakpoint. Breakpoints are exact rationals.

use crate::poset::FinitePoset;
use crate::rational::{floor_usize, format_rat, rint, Rat};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("breakpoints must start at 0, strictly increasing")]
    BadBreakpoints,
    #[error("expected {expected} translations for {expected} breakpoints, got {got}")]
    TranslationCount { expected: usize, got: usize },
    #[error("translation maps {0} elements but the poset has {1}")]
    WrongSize(usize, usize),
    #[error("negative epsilon {0}")]
    NegativeEpsilon(String),
    #[error("poset has no grid shape")]
    NotAGrid,
    #[error("per-axis flows disagree on breakpoints")]
    AxisBreakpointMismatch,
}

/// An endomorphism of the poset intended to be inflationary and
/// order-preserving; those two properties are checked by `validate_flow`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    map: Vec<usize>,
}

impl Translation {
    /// The map must be total: every image is an element index.
    pub fn new(map: Vec<usize>) -> Self {
        assert!(
            map.iter().all(|&v| v < map.len()),
            "translation image out of range; clamp at the poset top first"
        );
        Translation { map }
    }

    pub fn identity(n: usize) -> Self {
        Translation { map: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, p: usize) -> usize {
        self.map[p]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Pointwise order comparison: self(p) <= other(p) for all p.
    pub fn leq_pointwise(&self, other: &Translation, poset: &FinitePoset) -> bool {
        self.map
            .iter()
            .zip(&other.map)
            .all(|(&a, &b)| poset.leq(a, b))
    }
}

/// Diagrammatic composition: apply `first`, then `then`.
pub fn compose_translations(first: &Translation, then: &Translation) -> Translation {
    Translation { map: first.map.iter().map(|&p| then.map[p]).collect() }
}

/// A flow presented as a step function: `translation_at(e)` is the
/// translation stored at the largest breakpoint `<= e`.
#[derive(Debug, Clone)]
pub struct StepFlow {
    breakpoints: Vec<Rat>,
    translations: Vec<Translation>,
}

impl StepFlow {
    pub fn new(breakpoints: Vec<Rat>, translations: Vec<Translation>) -> Result<Self, FlowError> {
        if breakpoints.is_empty() || breakpoints[0] != rint(0) {
            return Err(FlowError::BadBreakpoints);
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FlowError::BadBreakpoints);
        }
        if translations.len() != breakpoints.len() {
            return Err(FlowError::TranslationCount {
                expected: breakpoints.len(),
                got: translations.len(),
            });
        }
        Ok(StepFlow { breakpoints, translations })
    }

    /// The clamped shift flow on a linear order of `len` elements:
    /// at breakpoint b the translation sends m to min(m + floor(b), len-1).
    pub fn floor_shift(len: usize, breakpoints: Vec<Rat>) -> Result<Self, FlowError> {
        let translations = breakpoints
            .iter()
            .map(|b| {
                let s = floor_usize(b);
                Translation::new((0..len).map(|m| (m + s).min(len - 1)).collect())
            })
            .collect();
        StepFlow::new(breakpoints, translations)
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn translations(&self) -> &[Translation] {
        &self.translations
    }

    pub fn translation_at(&self, eps: Rat) -> &Translation {
        assert!(eps >= rint(0), "translation_at needs epsilon >= 0");
        let idx = self
            .breakpoints
            .iter()
            .rposition(|b| *b <= eps)
            .expect("breakpoints start at 0");
        &self.translations[idx]
    }

    /// Whether `eps` is exactly one of the stored breakpoints.
    pub fn is_breakpoint(&self, eps: Rat) -> bool {
        self.breakpoints.contains(&eps)
    }

    pub fn validate(&self, poset: &FinitePoset) -> FlowValidation {
        let mut report = FlowValidation::default();
        let n = poset.len();
        for t in &self.translations {
            if t.len() != n {
                report.shape_errors.push(format!(
                    "translation maps {} elements but the poset has {n}",
                    t.len()
                ));
            }
        }
        if !report.shape_errors.is_empty() {
            return report;
        }
        if !self.translations[0].is_identity() {
            report.identity_at_zero = false;
        }
        let bps = &self.breakpoints;
        for (i, t) in self.translations.iter().enumerate() {
            // (1) order-preserving
            for p in 0..n {
                for q in 0..n {
                    if poset.leq(p, q) && !poset.leq(t.apply(p), t.apply(q)) {
                        report.order_preserving.push(FlowWitness {
                            eps: bps[i],
                            eps2: None,
                            p,
                            q: Some(q),
                        });
                    }
                }
            }
            // (3) inflationary
            for p in 0..n {
                if !poset.leq(p, t.apply(p)) {
                    report.inflationary.push(FlowWitness { eps: bps[i], eps2: None, p, q: None });
                }
            }
        }
        // (2) monotone in epsilon over consecutive breakpoints
        for i in 0..self.translations.len().saturating_sub(1) {
            let (a, b) = (&self.translations[i], &self.translations[i + 1]);
            for p in 0..n {
                if !poset.leq(a.apply(p), b.apply(p)) {
                    report.monotone.push(FlowWitness {
                        eps: bps[i],
                        eps2: Some(bps[i + 1]),
                        p,
                        q: None,
                    });
                }
            }
        }
        // (4) superadditive over the breakpoint grid
        for (i, bi) in bps.iter().enumerate() {
            for (j, bj) in bps.iter().enumerate() {
                let composite = compose_translations(&self.translations[j], &self.translations[i]);
                let direct = self.translation_at(bi + bj);
                for p in 0..n {
                    if !poset.leq(composite.apply(p), direct.apply(p)) {
                        report.superadditive.push(FlowWitness {
                            eps: *bi,
                            eps2: Some(*bj),
                            p,
                            q: None,
                        });
                    }
                }
            }
        }
        // commutativity over the breakpoint grid
        for i in 0..self.translations.len() {
            for j in (i + 1)..self.translations.len() {
                let ij = compose_translations(&self.translations[i], &self.translations[j]);
                let ji = compose_translations(&self.translations[j], &self.translations[i]);
                for p in 0..n {
                    if ij.apply(p) != ji.apply(p) {
                        report.commutative.push(FlowWitness {
                            eps: bps[i],
                            eps2: Some(bps[j]),
                            p,
                            q: None,
                        });
                    }
                }
            }
        }
        report
    }

    /// Checks the Archimedean property: every p < q is eventually overtaken,
    /// i.e. some breakpoint sends p at or above q. Returns the first
    /// violating pair if not.
    pub fn archimedean_witness(&self, poset: &FinitePoset) -> Option<(usize, usize)> {
        let n = poset.len();
        for p in 0..n {
            for q in 0..n {
                if poset.lt(p, q)
                    && !self
                        .translations
                        .iter()
                        .any(|t| poset.leq(q, t.apply(p)))
                {
                    return Some((p, q));
                }
            }
        }
        None
    }
}

/// Per-axiom validation outcome with counterexample witnesses.
#[derive(Debug)]
pub struct FlowValidation {
    pub shape_errors: Vec<String>,
    pub order_preserving: Vec<FlowWitness>,
    pub monotone: Vec<FlowWitness>,
    pub inflationary: Vec<FlowWitness>,
    pub superadditive: Vec<FlowWitness>,
    pub commutative: Vec<FlowWitness>,
    pub identity_at_zero: bool,
}

impl FlowValidation {
    pub fn is_valid(&self) -> bool {
        self.shape_errors.is_empty()
            && self.order_preserving.is_empty()
            && self.monotone.is_empty()
            && self.inflationary.is_empty()
            && self.superadditive.is_empty()
            && self.commutative.is_empty()
            && self.identity_at_zero
    }

    pub fn issues(&self) -> Vec<String> {
        let mut out = self.shape_errors.clone();
        if !self.identity_at_zero {
            out.push("translation at breakpoint 0 is not the identity".into());
        }
        let mut push = |name: &str, ws: &[FlowWitness]| {
            for w in ws.iter().take(3) {
                out.push(format!("{name} fails: {w}"));
            }
        };
        push("order-preservation (1)", &self.order_preserving);
        push("monotonicity (2)", &self.monotone);
        push("inflation (3)", &self.inflationary);
        push("superadditivity (4)", &self.superadditive);
        push("commutativity", &self.commutative);
        out
    }
}

impl Default for FlowValidation {
    fn default() -> Self {
        FlowValidation {
            shape_errors: Vec::new(),
            order_preserving: Vec::new(),
            monotone: Vec::new(),
            inflationary: Vec::new(),
            superadditive: Vec::new(),
            commutative: Vec::new(),
            identity_at_zero: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowWitness {
    pub eps: Rat,
    pub eps2: Option<Rat>,
    pub p: usize,
    pub q: Option<usize>,
}

impl std::fmt::Display for FlowWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "eps={}", format_rat(&self.eps))?;
        if let Some(e2) = &self.eps2 {
            write!(f, ", eps'={}", format_rat(e2))?;
        }
        write!(f, ", element {}", self.p)?;
        if let Some(q) = self.q {
            write!(f, ", element {q}")?;
        }
        Ok(())
    }
}

/// Outcome of the line-preserving test for a translation on a grid.
#[derive(Debug, Clone)]
pub enum LinePreserving {
    /// The per-axis translations whose product reconstructs the input.
    Yes(Vec<Translation>),
    /// A pair differing only in `axis` whose images differ in another axis.
    No { axis: usize, p: usize, q: usize },
}

impl LinePreserving {
    pub fn is_line_preserving(&self) -> bool {
        matches!(self, LinePreserving::Yes(_))
    }
}

/// Decides whether a translation on a product of linear orders decomposes
/// into independent per-axis translations.
pub fn is_line_preserving(t: &Translation, grid: &FinitePoset) -> Result<LinePreserving, FlowError> {
    let shape = grid.grid_shape().ok_or(FlowError::NotAGrid)?.to_vec();
    let k = shape.len();
    let n = grid.len();
    // candidate per-axis translations read off along the base lines
    let mut axes = Vec::with_capacity(k);
    for (axis, &len) in shape.iter().enumerate() {
        let mut axis_map = Vec::with_capacity(len);
        for x in 0..len {
            let mut coords = vec![0usize; k];
            coords[axis] = x;
            let idx = grid.grid_index(&coords).expect("grid coords");
            let img = grid.coords(t.apply(idx)).expect("grid coords");
            axis_map.push(img[axis]);
        }
        axes.push(Translation::new(axis_map));
    }
    // reconstruction check
    let reconstructs = (0..n).all(|idx| {
        let coords = grid.coords(idx).expect("grid coords");
        let image: Vec<usize> = coords
            .iter()
            .enumerate()
            .map(|(a, &x)| axes[a].apply(x))
            .collect();
        grid.grid_index(&image).expect("grid coords") == t.apply(idx)
    });
    if reconstructs {
        return Ok(LinePreserving::Yes(axes));
    }
    // find a witness pair differing in exactly one axis with images
    // differing somewhere else
    for p in 0..n {
        let cp = grid.coords(p).expect("grid coords");
        for q in 0..n {
            let cq = grid.coords(q).expect("grid coords");
            let diffs: Vec<usize> = (0..k).filter(|&a| cp[a] != cq[a]).collect();
            if diffs.len() != 1 {
                continue;
            }
            let axis = diffs[0];
            let ip = grid.coords(t.apply(p)).expect("grid coords");
            let iq = grid.coords(t.apply(q)).expect("grid coords");
            if (0..k).any(|a| a != axis && ip[a] != iq[a]) {
                return Ok(LinePreserving::No { axis, p, q });
            }
        }
    }
    unreachable!("a non-reconstructing translation must have a witness pair");
}

/// A family of per-axis step flows over the axis linear orders, inducing a
/// componentwise flow on the grid.
#[derive(Debug, Clone)]
pub struct GridFlow {
    axes: Vec<StepFlow>,
}

impl GridFlow {
    /// All axis flows must share one breakpoint list.
    pub fn new(axes: Vec<StepFlow>) -> Result<Self, FlowError> {
        if axes.is_empty() {
            return Err(FlowError::BadBreakpoints);
        }
        let bps = axes[0].breakpoints().to_vec();
        if axes.iter().any(|a| a.breakpoints() != bps.as_slice()) {
            return Err(FlowError::AxisBreakpointMismatch);
        }
        Ok(GridFlow { axes })
    }

    pub fn axes(&self) -> &[StepFlow] {
        &self.axes
    }

    /// Materializes the induced flow on the grid poset.
    pub fn induce(&self, grid: &FinitePoset) -> Result<StepFlow, FlowError> {
        let shape = grid.grid_shape().ok_or(FlowError::NotAGrid)?;
        if shape.len() != self.axes.len() {
            return Err(FlowError::WrongSize(self.axes.len(), shape.len()));
        }
        for (axis, flow) in self.axes.iter().enumerate() {
            for t in flow.translations() {
                if t.len() != shape[axis] {
                    return Err(FlowError::WrongSize(t.len(), shape[axis]));
                }
            }
        }
        let bps = self.axes[0].breakpoints().to_vec();
        let n = grid.len();
        let translations = (0..bps.len())
            .map(|bi| {
                let map = (0..n)
                    .map(|idx| {
                        let coords = grid.coords(idx).expect("grid coords");
                        let image: Vec<usize> = coords
                            .iter()
                            .enumerate()
                            .map(|(a, &x)| self.axes[a].translations()[bi].apply(x))
                            .collect();
                        grid.grid_index(&image).expect("grid coords")
                    })
                    .collect();
                Translation::new(map)
            })
            .collect();
        StepFlow::new(bps, translations)
    }
}
