//! Shared helpers for the integration suites: fixture loading and
//! deterministic random instances (chains, product grids, modules over both
//! backends, and arbitrary shape-correct assignments).

// each integration test target compiles its own copy, so some helpers are
// unused per target
#![allow(dead_code)]

use persloss::backend::{Matrix, Morphism, Object, SetMap};
use persloss::flow::{GridFlow, StepFlow, Translation};
use persloss::loss::Assignment;
use persloss::pmodule::PersModule;
use persloss::poset::FinitePoset;
use persloss::problem::{Problem, ProblemFile};
use persloss::rational::{rint, Rat};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load_fixture(name: &str) -> Problem {
    let path = fixture_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    ProblemFile::from_str(&text)
        .unwrap_or_else(|e| panic!("parsing {name}: {e}"))
        .build(None)
        .unwrap_or_else(|e| panic!("building {name}: {e}"))
}

/// The valid problem fixtures that carry a full assignment.
pub const ASSIGNMENT_FIXTURES: &[&str] = &[
    "example_F_G.json",
    "identity_self.json",
    "two_collapses.json",
    "vec_chain.json",
    "infinite_loss.json",
    "grid_4x4_interleaving.json",
];

/// Fixtures shipping representative maps for the extension pipeline.
pub const REPRESENTATIVE_FIXTURES: &[&str] = &[
    "fig_line.json",
    "grid_5x5_finset.json",
    "grid_6x6_vec.json",
    "grid_4x4x4.json",
];

/// splitmix64: tiny, deterministic, good enough for fixture generation.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.wrapping_add(0x9e3779b97f4a7c15))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn flip(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

/// A clamped-shift flow on a chain whose shift amounts are cumulative sums
/// of nondecreasing increments (hence superadditive), saturating at the
/// last breakpoint, with one extra breakpoint of headroom.
pub fn random_chain_flow(rng: &mut Rng, len: usize) -> StepFlow {
    let steps = rng.range(2, 4);
    let mut shifts = vec![0usize];
    let mut increment = rng.range(1, 2);
    for _ in 0..steps {
        increment += rng.below(2);
        shifts.push(shifts.last().unwrap() + increment);
    }
    // saturate: the final translation must push everything to the top
    let last = shifts.last().copied().unwrap();
    if last < len {
        shifts.push(len);
    }
    let extra = *shifts.last().unwrap();
    shifts.push(extra); // headroom breakpoint with the same translation
    let breakpoints: Vec<Rat> = (0..shifts.len() as i64).map(rint).collect();
    let translations = shifts
        .iter()
        .map(|&s| Translation::new((0..len).map(|m| (m + s).min(len - 1)).collect()))
        .collect();
    StepFlow::new(breakpoints, translations).expect("well-formed flow")
}

pub fn floor_chain_flow(len: usize) -> StepFlow {
    StepFlow::floor_shift(len, (0..=len as i64 + 1).map(rint).collect()).expect("well-formed flow")
}

pub fn floor_grid_flow(poset: &FinitePoset) -> StepFlow {
    let shape = poset.grid_shape().expect("grid poset");
    let top = *shape.iter().max().unwrap() as i64 + 1;
    let axes = shape
        .iter()
        .map(|&len| StepFlow::floor_shift(len, (0..=top).map(rint).collect()).unwrap())
        .collect();
    GridFlow::new(axes).unwrap().induce(poset).unwrap()
}

/// Random finite-set module over a chain: arbitrary object sizes and
/// arbitrary tables (chains impose no commutation constraints).
pub fn random_set_chain_module(rng: &mut Rng, poset: &Arc<FinitePoset>) -> PersModule {
    let n = poset.len();
    let sizes: Vec<usize> = (0..n).map(|_| rng.range(1, 4)).collect();
    let objects: Vec<Object> = sizes
        .iter()
        .map(|&s| Object::set((0..s).map(|i| format!("e{i}")).collect()))
        .collect();
    let mut edges = HashMap::new();
    for i in 0..n - 1 {
        let table: Vec<usize> = (0..sizes[i]).map(|_| rng.below(sizes[i + 1])).collect();
        edges.insert(
            (i, i + 1),
            Morphism::Map(SetMap::new(sizes[i], sizes[i + 1], table).unwrap()),
        );
    }
    PersModule::new(Arc::clone(poset), objects, edges).unwrap()
}

/// Random GF(p) module over a chain: arbitrary dimensions and matrices.
pub fn random_vec_chain_module(rng: &mut Rng, poset: &Arc<FinitePoset>, p: u64) -> PersModule {
    let n = poset.len();
    let dims: Vec<usize> = (0..n).map(|_| rng.range(0, 3)).collect();
    let objects: Vec<Object> = dims.iter().map(|&d| Object::space(d, p)).collect();
    let mut edges = HashMap::new();
    for i in 0..n - 1 {
        let rows = (0..dims[i + 1])
            .map(|_| (0..dims[i]).map(|_| rng.next_u64() % p).collect())
            .collect();
        edges.insert(
            (i, i + 1),
            Morphism::Linear(Matrix::from_rows(rows, dims[i], p).unwrap()),
        );
    }
    PersModule::new(Arc::clone(poset), objects, edges).unwrap()
}

/// Outer product of two random chain merge patterns: a functorial grid
/// module by construction.
pub fn random_product_grid_module(rng: &mut Rng, poset: &Arc<FinitePoset>) -> PersModule {
    let shape = poset.grid_shape().expect("grid poset").to_vec();
    // per axis: a nonincreasing branch count sequence (merge-tree style)
    let axis_sizes: Vec<Vec<usize>> = shape
        .iter()
        .map(|&len| {
            // branch counts only shrink going up the axis
            let mut sizes = Vec::with_capacity(len);
            let mut current = rng.range(1, 2);
            for _ in 0..len {
                sizes.push(current);
                if current > 1 && rng.flip() {
                    current -= 1;
                }
            }
            sizes
        })
        .collect();
    let size_at = |coords: &[usize]| -> usize {
        coords.iter().zip(&axis_sizes).map(|(&c, sizes)| sizes[c]).product()
    };
    let objects: Vec<Object> = (0..poset.len())
        .map(|i| {
            let c = poset.coords(i).unwrap();
            Object::set((0..size_at(&c)).map(|k| format!("e{k}")).collect())
        })
        .collect();
    let branch_map = |from: &[usize], to: &[usize]| -> Vec<usize> {
        // collapse-to-last per axis, mixed-radix reindexing
        let dims_p: Vec<usize> = from.iter().zip(&axis_sizes).map(|(&c, s)| s[c]).collect();
        let dims_q: Vec<usize> = to.iter().zip(&axis_sizes).map(|(&c, s)| s[c]).collect();
        let total: usize = dims_p.iter().product();
        (0..total)
            .map(|mut idx| {
                let mut digits = vec![0usize; dims_p.len()];
                for a in (0..dims_p.len()).rev() {
                    digits[a] = idx % dims_p[a];
                    idx /= dims_p[a];
                }
                let mut out = 0usize;
                for a in 0..dims_q.len() {
                    out = out * dims_q[a] + digits[a].min(dims_q[a] - 1);
                }
                out
            })
            .collect()
    };
    let mut edges = HashMap::new();
    for &(p, q) in poset.hasse_edges() {
        let cp = poset.coords(p).unwrap();
        let cq = poset.coords(q).unwrap();
        let table = branch_map(&cp, &cq);
        edges.insert(
            (p, q),
            Morphism::Map(SetMap::new(size_at(&cp), size_at(&cq), table).unwrap()),
        );
    }
    PersModule::new(Arc::clone(poset), objects, edges).unwrap()
}

/// Arbitrary shape-correct morphism between two objects.
pub fn random_component(rng: &mut Rng, source: &Object, target: &Object) -> Morphism {
    match (source, target) {
        (Object::Set { labels: s }, Object::Set { labels: t }) => Morphism::Map(
            SetMap::new(s.len(), t.len(), (0..s.len()).map(|_| rng.below(t.len())).collect())
                .unwrap(),
        ),
        (Object::Space { dim: s, prime }, Object::Space { dim: t, .. }) => {
            let rows = (0..*t)
                .map(|_| (0..*s).map(|_| rng.next_u64() % prime).collect())
                .collect();
            Morphism::Linear(Matrix::from_rows(rows, *s, *prime).unwrap())
        }
        _ => panic!("mismatched backends"),
    }
}

/// Arbitrary assignment between two modules over the same poset, at a
/// given flow breakpoint.
pub fn random_assignment(
    rng: &mut Rng,
    f: &Arc<PersModule>,
    g: &Arc<PersModule>,
    flow: &StepFlow,
    eps: Rat,
) -> Assignment {
    let t = flow.translation_at(eps).clone();
    let n = f.poset().len();
    let phi = (0..n)
        .map(|p| random_component(rng, f.object(p), g.object(t.apply(p))))
        .collect();
    let psi = (0..n)
        .map(|p| random_component(rng, g.object(p), f.object(t.apply(p))))
        .collect();
    Assignment::new(Arc::clone(f), Arc::clone(g), t, Some(eps), phi, psi).unwrap()
}

/// Every element of an object, as metric elements.
pub fn object_elements(obj: &Object) -> Vec<persloss::metric::Elem> {
    match obj {
        Object::Set { labels } => (0..labels.len()).map(persloss::metric::Elem::Point).collect(),
        Object::Space { dim, prime } => {
            // all vectors of GF(p)^dim, capped for sanity
            let p = *prime as usize;
            let total = p.pow(*dim as u32).min(64);
            (0..total)
                .map(|mut i| {
                    let mut v = vec![0u64; *dim];
                    for c in v.iter_mut() {
                        *c = (i % p) as u64;
                        i /= p;
                    }
                    persloss::metric::Elem::Vector(v)
                })
                .collect()
        }
    }
}
