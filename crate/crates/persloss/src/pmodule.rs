//! Generalized persistence modules: functors from a finite poset into
//! finite sets or GF(p) vector spaces, one object per element and one
//! morphism per Hasse edge.
//!
//! Derived morphisms for arbitrary comparable pairs are composites of
//! Hasse-edge maps; path independence is what `validate` checks, and the
//! composites are memoized because loss computations reuse them heavily.

use crate::backend::{compose, BackendError, Morphism, Object};
use crate::poset::{FinitePoset, Interval, PosetError};
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, RwLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error("elements {0} and {1} are not comparable")]
    NotComparable(String, String),
    #[error("poset is not a linear order")]
    NotLinear,
    #[error("poset has no grid shape")]
    NotAGrid,
    #[error("missing object for element `{0}`")]
    MissingObject(String),
    #[error("missing map for Hasse edge {0} -> {1}")]
    MissingEdge(String, String),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Critical data of a module: critical elements of a linear order, or the
/// per-axis critical coordinate sets of a grid module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriticalData {
    Linear(Vec<usize>),
    Grid(Vec<BTreeSet<usize>>),
}

pub struct PersModule {
    poset: Arc<FinitePoset>,
    objects: Vec<Object>,
    edge_maps: HashMap<(usize, usize), Morphism>,
    memo: RwLock<HashMap<(usize, usize), Arc<Morphism>>>,
}

impl Clone for PersModule {
    fn clone(&self) -> Self {
        PersModule {
            poset: Arc::clone(&self.poset),
            objects: self.objects.clone(),
            edge_maps: self.edge_maps.clone(),
            memo: RwLock::new(HashMap::new()),
        }
    }
}

impl std::fmt::Debug for PersModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PersModule")
            .field("poset", &self.poset.len())
            .field("objects", &self.objects.len())
            .finish()
    }
}

/// Outcome of functoriality validation.
#[derive(Debug, Default)]
pub struct ModuleValidation {
    pub shape_errors: Vec<String>,
    /// (p, r, q): the canonical composite p -> q disagrees with going
    /// p -> r and then across the Hasse edge r -> q.
    pub square_failures: Vec<(usize, usize, usize)>,
}

impl ModuleValidation {
    pub fn is_valid(&self) -> bool {
        self.shape_errors.is_empty() && self.square_failures.is_empty()
    }
}

impl PersModule {
    pub fn new(
        poset: Arc<FinitePoset>,
        objects: Vec<Object>,
        edge_maps: HashMap<(usize, usize), Morphism>,
    ) -> Result<Self, ModuleError> {
        if objects.len() != poset.len() {
            return Err(ModuleError::MissingObject(format!(
                "{} objects for {} elements",
                objects.len(),
                poset.len()
            )));
        }
        for &(p, q) in poset.hasse_edges() {
            if !edge_maps.contains_key(&(p, q)) {
                return Err(ModuleError::MissingEdge(
                    poset.label(p).to_string(),
                    poset.label(q).to_string(),
                ));
            }
        }
        Ok(PersModule { poset, objects, edge_maps, memo: RwLock::new(HashMap::new()) })
    }

    pub fn poset(&self) -> &Arc<FinitePoset> {
        &self.poset
    }

    pub fn object(&self, p: usize) -> &Object {
        &self.objects[p]
    }

    pub fn edge_map(&self, p: usize, q: usize) -> Option<&Morphism> {
        self.edge_maps.get(&(p, q))
    }

    /// Whether every object lives in finite sets (as opposed to GF(p)).
    pub fn is_set_valued(&self) -> bool {
        self.objects.iter().all(|o| matches!(o, Object::Set { .. }))
    }

    /// The derived morphism F[p <= q], memoized per pair.
    pub fn map_between(&self, p: usize, q: usize) -> Result<Arc<Morphism>, ModuleError> {
        if !self.poset.leq(p, q) {
            return Err(ModuleError::NotComparable(
                self.poset.label(p).to_string(),
                self.poset.label(q).to_string(),
            ));
        }
        if let Some(m) = self.memo.read().expect("memo lock").get(&(p, q)) {
            return Ok(Arc::clone(m));
        }
        let morphism = if p == q {
            Morphism::identity_of(&self.objects[p])
        } else {
            // walk any Hasse path p -> q; well-defined by validate()
            let mut current = p;
            let mut acc = Morphism::identity_of(&self.objects[p]);
            'outer: while current != q {
                for &s in self.poset.successors(current) {
                    if self.poset.leq(s, q) {
                        let edge = &self.edge_maps[&(current, s)];
                        acc = compose(&acc, edge)?;
                        current = s;
                        continue 'outer;
                    }
                }
                unreachable!("p <= q implies a Hasse path from p to q");
            }
            acc
        };
        let arc = Arc::new(morphism);
        // idempotent fill: concurrent first-writers store equal composites
        self.memo
            .write()
            .expect("memo lock")
            .entry((p, q))
            .or_insert_with(|| Arc::clone(&arc));
        Ok(arc)
    }

    /// Checks object/edge shapes and path independence. Every Hasse edge
    /// (r, q) must agree with the canonical composite from any p <= r.
    pub fn validate(&self) -> ModuleValidation {
        let mut report = ModuleValidation::default();
        for (&(p, q), m) in &self.edge_maps {
            if m.source_size() != self.objects[p].size() || m.target_size() != self.objects[q].size()
            {
                report.shape_errors.push(format!(
                    "edge {} -> {} has shape {}x{}, objects have sizes {} and {}",
                    self.poset.label(p),
                    self.poset.label(q),
                    m.source_size(),
                    m.target_size(),
                    self.objects[p].size(),
                    self.objects[q].size()
                ));
            }
        }
        if !report.shape_errors.is_empty() {
            return report;
        }
        for &(r, q) in self.poset.hasse_edges() {
            for p in 0..self.poset.len() {
                if !self.poset.leq(p, r) {
                    continue;
                }
                let canon = self.map_between(p, q).expect("comparable");
                let via_r = self.map_between(p, r).expect("comparable");
                let edge = &self.edge_maps[&(r, q)];
                let along = compose(&via_r, edge).expect("shapes validated");
                if along != *canon {
                    report.square_failures.push((p, r, q));
                }
            }
        }
        report
    }

    /// True iff every comparable pair inside the interval maps by an
    /// isomorphism.
    pub fn is_constant_on(&self, interval: &Interval) -> bool {
        for &p in &interval.members {
            for &q in &interval.members {
                if self.poset.leq(p, q) && !self.map_between(p, q).expect("comparable").is_iso() {
                    return false;
                }
            }
        }
        true
    }

    /// Critical values of a module over a finite linear order: an element is
    /// critical when an adjacent structure map touching it (incoming or
    /// outgoing) is not an isomorphism. Boundary elements consult only the
    /// side that exists.
    pub fn critical_values(&self) -> Result<Vec<usize>, ModuleError> {
        let order = self.poset.linear_order().map_err(|_| ModuleError::NotLinear)?;
        let mut criticals = Vec::new();
        for (i, &t) in order.iter().enumerate() {
            let pred_bad = i > 0 && {
                let m = self.map_between(order[i - 1], t)?;
                !m.is_iso()
            };
            let succ_bad = i + 1 < order.len() && {
                let m = self.map_between(t, order[i + 1])?;
                !m.is_iso()
            };
            if pred_bad || succ_bad {
                criticals.push(t);
            }
        }
        Ok(criticals)
    }

    /// Critical coordinates along one axis of a grid module: the union over
    /// all lines parallel to the axis of the critical values of the
    /// restricted 1-dimensional module.
    pub fn critical_coordinates(&self, axis: usize) -> Result<BTreeSet<usize>, ModuleError> {
        let shape = self.poset.grid_shape().ok_or(ModuleError::NotAGrid)?.to_vec();
        let mut out = BTreeSet::new();
        let len = shape[axis];
        for slice in slices(&shape, axis) {
            // line through `slice` along `axis`
            let line: Vec<usize> = (0..len)
                .map(|x| {
                    let mut coords = slice.clone();
                    coords[axis] = x;
                    self.poset.grid_index(&coords).expect("grid coords")
                })
                .collect();
            for (i, &t) in line.iter().enumerate() {
                if out.contains(&i) {
                    continue;
                }
                let pred_bad =
                    i > 0 && !self.map_between(line[i - 1], t)?.is_iso();
                let succ_bad =
                    i + 1 < len && !self.map_between(t, line[i + 1])?.is_iso();
                if pred_bad || succ_bad {
                    out.insert(i);
                }
            }
        }
        Ok(out)
    }

    /// Per-axis critical data for grids, sorted critical elements for
    /// linear orders. Finite-poset modules are always tame; this records
    /// the (finite) critical sets rather than assuming them.
    pub fn critical_data(&self) -> Result<CriticalData, ModuleError> {
        if let Some(shape) = self.poset.grid_shape() {
            if shape.len() > 1 {
                let sets = (0..shape.len())
                    .map(|axis| self.critical_coordinates(axis))
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok(CriticalData::Grid(sets));
            }
        }
        Ok(CriticalData::Linear(self.critical_values()?))
    }
}

/// All coordinate tuples with the given axis left free (set to 0).
fn slices(shape: &[usize], axis: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0usize; shape.len()]];
    for (a, &len) in shape.iter().enumerate() {
        if a == axis {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * len);
        for base in &out {
            for v in 0..len {
                let mut c = base.clone();
                c[a] = v;
                next.push(c);
            }
        }
        out = next;
    }
    out
}
