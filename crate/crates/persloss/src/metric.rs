//! The merging distance, its extension to parallel morphisms, and
//! reducing-constant sets.
//!
//! All infima are taken over the flow's breakpoint grid: a step flow makes
//! the equality set of two flowing elements a union of right-closed
//! breakpoint intervals, so the infimum is attained at a breakpoint and no
//! real-valued search is needed.

use crate::backend::{BackendError, Matrix, Morphism};
use crate::flow::StepFlow;
use crate::pmodule::{ModuleError, PersModule};
use crate::rational::{format_rat, Rat};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("element {0} is not in the object at `{1}`")]
    ElementNotInObject(String, String),
    #[error("morphisms disagree on source or target: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// A non-negative rational distance or infinity; infinity is an explicit
/// value, never a sentinel number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtDistance {
    Finite(Rat),
    Infinite,
}

impl ExtDistance {
    pub fn zero() -> Self {
        ExtDistance::Finite(Rat::from_integer(0))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtDistance::Finite(r) if *r.numer() == 0)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtDistance::Finite(_))
    }

    pub fn finite(&self) -> Option<Rat> {
        match self {
            ExtDistance::Finite(r) => Some(*r),
            ExtDistance::Infinite => None,
        }
    }

    pub fn plus(&self, eps: Rat) -> ExtDistance {
        match self {
            ExtDistance::Finite(r) => ExtDistance::Finite(r + eps),
            ExtDistance::Infinite => ExtDistance::Infinite,
        }
    }
}

impl PartialOrd for ExtDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtDistance::Finite(a), ExtDistance::Finite(b)) => a.cmp(b),
            (ExtDistance::Finite(_), ExtDistance::Infinite) => Ordering::Less,
            (ExtDistance::Infinite, ExtDistance::Finite(_)) => Ordering::Greater,
            (ExtDistance::Infinite, ExtDistance::Infinite) => Ordering::Equal,
        }
    }
}

impl std::fmt::Display for ExtDistance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtDistance::Finite(r) => write!(f, "{}", format_rat(r)),
            ExtDistance::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of a module object: a set-element index, or a coordinate
/// vector over GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elem {
    Point(usize),
    Vector(Vec<u64>),
}

/// The merging distance between `a` and `b` in `module` at `p`: the least
/// flow amount after which the two images coincide. For vector spaces this
/// is the vanishing time of `a - b` under the structure maps.
pub fn merging_distance(
    module: &PersModule,
    flow: &StepFlow,
    p: usize,
    a: &Elem,
    b: &Elem,
) -> Result<ExtDistance, MetricError> {
    let size = module.object(p).size();
    let check = |e: &Elem| -> Result<(), MetricError> {
        let ok = match e {
            Elem::Point(i) => *i < size,
            Elem::Vector(v) => v.len() == size,
        };
        if ok {
            Ok(())
        } else {
            Err(MetricError::ElementNotInObject(
                format!("{e:?}"),
                module.poset().label(p).to_string(),
            ))
        }
    };
    check(a)?;
    check(b)?;
    for (bp, t) in flow.breakpoints().iter().zip(flow.translations()) {
        let q = t.apply(p);
        let map = module.map_between(p, q)?;
        let merged = match (&*map, a, b) {
            (Morphism::Map(m), Elem::Point(x), Elem::Point(y)) => m.apply(*x) == m.apply(*y),
            (Morphism::Linear(m), Elem::Vector(u), Elem::Vector(v)) => {
                let diff: Vec<u64> = u
                    .iter()
                    .zip(v)
                    .map(|(x, y)| (x + m.prime - y % m.prime) % m.prime)
                    .collect();
                m.apply(&diff)?.iter().all(|&c| c == 0)
            }
            _ => {
                return Err(MetricError::ShapeMismatch(
                    "element kind does not match the module backend".into(),
                ))
            }
        };
        if merged {
            return Ok(ExtDistance::Finite(*bp));
        }
    }
    Ok(ExtDistance::Infinite)
}

/// Distance between two parallel morphisms `f, g: A -> module(at)`: the sup
/// over the source of the merging distance of the two images. The sup over
/// an empty source is 0. For vector spaces this is the vanishing time of
/// the difference map, which equals the same sup.
pub fn morphism_distance(
    module: &PersModule,
    flow: &StepFlow,
    at: usize,
    f: &Morphism,
    g: &Morphism,
) -> Result<ExtDistance, MetricError> {
    if f.source_size() != g.source_size() || f.target_size() != g.target_size() {
        return Err(MetricError::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            f.source_size(),
            f.target_size(),
            g.source_size(),
            g.target_size()
        )));
    }
    if f.target_size() != module.object(at).size() {
        return Err(MetricError::ShapeMismatch(format!(
            "target size {} but object at `{}` has size {}",
            f.target_size(),
            module.poset().label(at),
            module.object(at).size()
        )));
    }
    match (f, g) {
        (Morphism::Map(fm), Morphism::Map(gm)) => {
            let mut worst = ExtDistance::zero();
            for i in 0..fm.source {
                let d = merging_distance(
                    module,
                    flow,
                    at,
                    &Elem::Point(fm.apply(i)),
                    &Elem::Point(gm.apply(i)),
                )?;
                worst = worst.max(d);
            }
            Ok(worst)
        }
        (Morphism::Linear(fm), Morphism::Linear(gm)) => {
            let diff = fm.sub(gm)?;
            vanishing_time(module, flow, at, &diff)
        }
        _ => Err(MetricError::ShapeMismatch(
            "mixed finite-set and linear morphisms".into(),
        )),
    }
}

/// Least breakpoint at which the structure map out of `at` kills the whole
/// image of `diff`.
fn vanishing_time(
    module: &PersModule,
    flow: &StepFlow,
    at: usize,
    diff: &Matrix,
) -> Result<ExtDistance, MetricError> {
    for (bp, t) in flow.breakpoints().iter().zip(flow.translations()) {
        let q = t.apply(at);
        let map = module.map_between(at, q)?;
        let Morphism::Linear(m) = &*map else {
            return Err(MetricError::ShapeMismatch("vector element in a set-valued module".into()));
        };
        if m.mul(diff)?.is_zero() {
            return Ok(ExtDistance::Finite(*bp));
        }
    }
    Ok(ExtDistance::Infinite)
}

/// The reducing constants of `q` on `module`: the breakpoints d > 0 such
/// that crossing d in the flow orbit of q always loses injectivity. A
/// breakpoint d qualifies iff the module map from every earlier breakpoint
/// image T_c q into T_d q fails to be mono; checking the window top at d
/// itself suffices because a mono composite would force the initial factor
/// mono as well.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducingSet {
    pub point: usize,
    pub constants: Vec<Rat>,
}

pub fn reducing_constants(
    module: &PersModule,
    flow: &StepFlow,
    q: usize,
) -> Result<ReducingSet, MetricError> {
    let mut constants = Vec::new();
    let bps = flow.breakpoints();
    for (i, bp) in bps.iter().enumerate().skip(1) {
        let upper = flow.translations()[i].apply(q);
        let reducing = (0..i).all(|j| {
            let lower = flow.translations()[j].apply(q);
            let map = module.map_between(lower, upper).expect("flow orbit is comparable");
            !map.is_mono()
        });
        if reducing {
            constants.push(*bp);
        }
    }
    Ok(ReducingSet { point: q, constants })
}
