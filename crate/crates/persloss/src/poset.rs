//! Finite partially ordered sets: construction by relation closure, grid
//! products of linear orders, Hasse edges, and interval machinery.
//!
//! Elements carry opaque string ids from the input; internally everything is
//! dense indices `0..n`. The full `leq` relation is materialized so that
//! comparability queries are O(1); posets here are desk-scale.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PosetError {
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("unknown element id `{0}` in relation")]
    UnknownElement(String),
    #[error("cycle through `{0}` and `{1}` violates antisymmetry")]
    Cycle(String, String),
    #[error("grid axis {0} has length 0")]
    EmptyAxis(usize),
    #[error("poset is not a linear order")]
    NotLinear,
    #[error("poset has no grid shape")]
    NotAGrid,
}

#[derive(Debug, Error)]
pub enum IntervalError {
    #[error("interval subset is empty")]
    Empty,
    #[error("not convex: {p} < {r} < {q} with {r} outside the subset")]
    NotConvex { p: String, r: String, q: String },
    #[error("not connected in the comparability graph: {0} components")]
    NotConnected(usize),
    #[error("unknown element id `{0}`")]
    UnknownElement(String),
}

/// A non-empty convex connected subset of a poset. Members are sorted
/// element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FinitePoset {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    // row-major n*n comparability matrix, leq[p*n + q] == (p <= q)
    leq: Vec<bool>,
    hasse: Vec<(usize, usize)>,
    hasse_preds: Vec<Vec<usize>>,
    hasse_succs: Vec<Vec<usize>>,
    grid_shape: Option<Vec<usize>>,
    max_predecessors: usize,
}

impl FinitePoset {
    /// Builds the poset from a generating set of order relations. The
    /// stored relation is the reflexive-transitive closure.
    pub fn build(elements: Vec<String>, pairs: &[(String, String)]) -> Result<Self, PosetError> {
        let n = elements.len();
        let mut index = BTreeMap::new();
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(PosetError::DuplicateElement(e.clone()));
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (a, b) in pairs {
            let &ia = index.get(a).ok_or_else(|| PosetError::UnknownElement(a.clone()))?;
            let &ib = index.get(b).ok_or_else(|| PosetError::UnknownElement(b.clone()))?;
            adj[ia].push(ib);
        }
        // reflexive-transitive closure by DFS from each source
        let mut leq = vec![false; n * n];
        let mut stack = Vec::new();
        for s in 0..n {
            leq[s * n + s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !leq[s * n + w] {
                        leq[s * n + w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if leq[p * n + q] && leq[q * n + p] {
                    return Err(PosetError::Cycle(elements[p].clone(), elements[q].clone()));
                }
            }
        }
        Ok(Self::finish(elements, index, leq, None))
    }

    /// The product of `k` finite linear orders. Elements are coordinate
    /// tuples labelled `"c1,c2,...,ck"`, ordered componentwise.
    pub fn grid(axis_lengths: &[usize]) -> Result<Self, PosetError> {
        for (i, &len) in axis_lengths.iter().enumerate() {
            if len == 0 {
                return Err(PosetError::EmptyAxis(i));
            }
        }
        let n: usize = axis_lengths.iter().product();
        let k = axis_lengths.len();
        let mut labels = Vec::with_capacity(n);
        let mut coords = vec![0usize; k];
        for _ in 0..n {
            labels.push(
                coords
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            // row-major increment, last axis fastest
            for axis in (0..k).rev() {
                coords[axis] += 1;
                if coords[axis] < axis_lengths[axis] {
                    break;
                }
                coords[axis] = 0;
            }
        }
        let index: BTreeMap<String, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let all_coords: Vec<Vec<usize>> = (0..n).map(|i| decode(i, axis_lengths)).collect();
        let mut leq = vec![false; n * n];
        for p in 0..n {
            for q in 0..n {
                leq[p * n + q] = all_coords[p]
                    .iter()
                    .zip(&all_coords[q])
                    .all(|(a, b)| a <= b);
            }
        }
        Ok(Self::finish(labels, index, leq, Some(axis_lengths.to_vec())))
    }

    fn finish(
        labels: Vec<String>,
        index: BTreeMap<String, usize>,
        leq: Vec<bool>,
        grid_shape: Option<Vec<usize>>,
    ) -> Self {
        let n = labels.len();
        let mut hasse = Vec::new();
        let mut hasse_preds = vec![Vec::new(); n];
        let mut hasse_succs = vec![Vec::new(); n];
        for p in 0..n {
            for q in 0..n {
                if p != q && leq[p * n + q] {
                    let covered = (0..n)
                        .any(|r| r != p && r != q && leq[p * n + r] && leq[r * n + q]);
                    if !covered {
                        hasse.push((p, q));
                        hasse_preds[q].push(p);
                        hasse_succs[p].push(q);
                    }
                }
            }
        }
        hasse.sort_unstable();
        let max_predecessors = hasse_preds.iter().map(Vec::len).max().unwrap_or(0);
        FinitePoset {
            labels,
            index,
            leq,
            hasse,
            hasse_preds,
            hasse_succs,
            grid_shape,
            max_predecessors,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.leq[p * self.len() + q]
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq(p, q)
    }

    pub fn comparable(&self, p: usize, q: usize) -> bool {
        self.leq(p, q) || self.leq(q, p)
    }

    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// Hasse predecessors of `q` (elements covered by `q`).
    pub fn predecessors(&self, q: usize) -> &[usize] {
        &self.hasse_preds[q]
    }

    /// Hasse successors of `p` (elements covering `p`).
    pub fn successors(&self, p: usize) -> &[usize] {
        &self.hasse_succs[p]
    }

    /// d(P): the maximum number of Hasse predecessors of any element.
    pub fn max_predecessors(&self) -> usize {
        self.max_predecessors
    }

    pub fn grid_shape(&self) -> Option<&[usize]> {
        self.grid_shape.as_deref()
    }

    pub fn coords(&self, i: usize) -> Result<Vec<usize>, PosetError> {
        let shape = self.grid_shape.as_ref().ok_or(PosetError::NotAGrid)?;
        Ok(decode(i, shape))
    }

    pub fn grid_index(&self, coords: &[usize]) -> Result<usize, PosetError> {
        let shape = self.grid_shape.as_ref().ok_or(PosetError::NotAGrid)?;
        debug_assert_eq!(coords.len(), shape.len());
        let mut idx = 0;
        for (c, len) in coords.iter().zip(shape) {
            debug_assert!(c < len);
            idx = idx * len + c;
        }
        Ok(idx)
    }

    pub fn is_linear(&self) -> bool {
        let n = self.len();
        (0..n).all(|p| (p + 1..n).all(|q| self.comparable(p, q)))
    }

    /// Elements of a linear poset in ascending order.
    pub fn linear_order(&self) -> Result<Vec<usize>, PosetError> {
        if !self.is_linear() {
            return Err(PosetError::NotLinear);
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            if a == b || self.leq(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        Ok(order)
    }

    /// Checks that `subset` is a non-empty convex subset, connected in the
    /// comparability graph.
    pub fn interval_check(&self, subset: &[usize]) -> Result<Interval, IntervalError> {
        if subset.is_empty() {
            return Err(IntervalError::Empty);
        }
        let mut members: Vec<usize> = subset.to_vec();
        members.sort_unstable();
        members.dedup();
        let inside = |r: usize| members.binary_search(&r).is_ok();
        for &p in &members {
            for &q in &members {
                if !self.lt(p, q) {
                    continue;
                }
                for r in 0..self.len() {
                    if !inside(r) && self.lt(p, r) && self.lt(r, q) {
                        return Err(IntervalError::NotConvex {
                            p: self.labels[p].clone(),
                            r: self.labels[r].clone(),
                            q: self.labels[q].clone(),
                        });
                    }
                }
            }
        }
        // connectivity in the comparability (zigzag) graph
        let mut seen = vec![false; members.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..members.len() {
                if !seen[j] && self.comparable(members[i], members[j]) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        let reached = seen.iter().filter(|s| **s).count();
        if reached != members.len() {
            // components, for the error message
            let mut comps = 1;
            let mut assigned = seen;
            while let Some(start) = assigned.iter().position(|s| !s) {
                comps += 1;
                assigned[start] = true;
                let mut stack = vec![start];
                while let Some(i) = stack.pop() {
                    for j in 0..members.len() {
                        if !assigned[j] && self.comparable(members[i], members[j]) {
                            assigned[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
            return Err(IntervalError::NotConnected(comps));
        }
        Ok(Interval { members })
    }
}

impl fmt::Display for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "poset with {} elements, {} Hasse edges",
            self.len(),
            self.hasse.len()
        )
    }
}

fn decode(mut i: usize, shape: &[usize]) -> Vec<usize> {
    let mut coords = vec![0usize; shape.len()];
    for axis in (0..shape.len()).rev() {
        coords[axis] = i % shape[axis];
        i /= shape[axis];
    }
    coords
}
