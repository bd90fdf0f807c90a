//! Finite abstract simplicial complexes, their combinatorial open/closed
//! subsets, simplicial maps, piecewise-linear vertex data, and barycentric
//! subdivision.
//!
//! Open sets are modeled as up-closed simplex families: a family `S` with the
//! property that every coface of a member is a member. These are exactly the
//! unions of open simplex interiors in the geometric realization, so they are
//! closed under union, intersection, and simplicial preimage.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bits::SimplexSet;
use crate::error::{ComplexError, MapError, SetError};
use crate::rat::Rat;

/// A finite abstract simplicial complex.
///
/// Simplices are stored in a canonical order (by dimension, then
/// lexicographically) and addressed by index everywhere else in the engine.
#[derive(Clone)]
pub struct Complex {
    vertex_count: u32,
    simplices: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    vertex_stars: Vec<SimplexSet>,
    up_closures: Vec<SimplexSet>,
    down_closures: Vec<SimplexSet>,
    components: usize,
    component_of_vertex: Vec<usize>,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.simplices == other.simplices
    }
}
impl Eq for Complex {}

impl std::fmt::Debug for Complex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Complex")
            .field("vertex_count", &self.vertex_count)
            .field("simplices", &self.simplices)
            .finish()
    }
}

fn canonical(mut v: Vec<u32>) -> Result<Vec<u32>, ComplexError> {
    if v.is_empty() {
        return Err(ComplexError::EmptySimplex);
    }
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(ComplexError::RepeatedVertex(v));
    }
    Ok(v)
}

impl Complex {
    /// Builds a complex as the face closure of the given simplices.
    ///
    /// Every vertex `0..vertex_count` must appear in some simplex.
    pub fn from_maximal(vertex_count: u32, maximal: &[Vec<u32>]) -> Result<Arc<Self>, ComplexError> {
        if vertex_count == 0 {
            return Err(ComplexError::EmptyComplex);
        }
        let mut all: Vec<Vec<u32>> = Vec::new();
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        let mut push = |s: Vec<u32>, all: &mut Vec<Vec<u32>>| {
            if seen.insert(s.clone(), ()).is_none() {
                all.push(s);
            }
        };
        for s in maximal {
            let s = canonical(s.clone())?;
            if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                return Err(ComplexError::VertexOutOfRange { vertex: v, vertex_count });
            }
            // enumerate all nonempty subsets
            let n = s.len();
            for mask in 1u32..(1 << n) {
                let face: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
                push(face, &mut all);
            }
        }
        for v in 0..vertex_count {
            if !seen.contains_key(&vec![v]) {
                return Err(ComplexError::UncoveredVertex(v));
            }
        }
        all.sort_unstable_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
        Ok(Arc::new(Self::finish(vertex_count, all)))
    }

    fn finish(vertex_count: u32, simplices: Vec<Vec<u32>>) -> Self {
        let n = simplices.len();
        let index: HashMap<Vec<u32>, usize> =
            simplices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut vertex_stars = vec![SimplexSet::empty(n); vertex_count as usize];
        for (i, s) in simplices.iter().enumerate() {
            for &v in s {
                vertex_stars[v as usize].insert(i);
            }
        }
        let mut up_closures = vec![SimplexSet::empty(n); n];
        let mut down_closures = vec![SimplexSet::empty(n); n];
        for (i, a) in simplices.iter().enumerate() {
            for (j, b) in simplices.iter().enumerate() {
                if a.len() <= b.len() && a.iter().all(|v| b.binary_search(v).is_ok()) {
                    up_closures[i].insert(j);
                    down_closures[j].insert(i);
                }
            }
        }
        // connected components of the 1-skeleton
        let mut parent: Vec<usize> = (0..vertex_count as usize).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for s in &simplices {
            for w in s.windows(2) {
                let (a, b) = (find(&mut parent, w[0] as usize), find(&mut parent, w[1] as usize));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut component_of_vertex = vec![0usize; vertex_count as usize];
        for v in 0..vertex_count as usize {
            let r = find(&mut parent, v);
            let c = match roots.iter().position(|&x| x == r) {
                Some(p) => p,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
            component_of_vertex[v] = c;
        }
        Complex {
            vertex_count,
            simplices,
            index,
            vertex_stars,
            up_closures,
            down_closures,
            components: roots.len(),
            component_of_vertex,
        }
    }

    /// Path graph with `n` vertices `0 - 1 - ... - n-1`.
    pub fn path(n: u32) -> Arc<Self> {
        assert!(n >= 1);
        let maximal: Vec<Vec<u32>> = if n == 1 {
            vec![vec![0]]
        } else {
            (0..n - 1).map(|i| vec![i, i + 1]).collect()
        };
        Self::from_maximal(n, &maximal).expect("path complex")
    }

    /// Cycle graph with `n >= 3` vertices (for `n = 3` this is the hollow triangle).
    pub fn cycle(n: u32) -> Arc<Self> {
        assert!(n >= 3);
        let maximal: Vec<Vec<u32>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        Self::from_maximal(n, &maximal).expect("cycle complex")
    }

    /// Full simplex on `n` vertices (`n = 3` is the filled triangle).
    pub fn full_simplex(n: u32) -> Arc<Self> {
        assert!(n >= 1);
        Self::from_maximal(n, &[(0..n).collect()]).expect("full simplex")
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self) -> &[Vec<u32>] {
        &self.simplices
    }

    pub fn simplex(&self, id: usize) -> &[u32] {
        &self.simplices[id]
    }

    pub fn simplex_id(&self, vertices: &[u32]) -> Option<usize> {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        self.index.get(&v).copied()
    }

    pub fn vertex_simplex(&self, v: u32) -> usize {
        self.index[&vec![v]]
    }

    pub fn dimension(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    /// Simplices with no proper coface; they regenerate the complex.
    pub fn maximal_simplices(&self) -> Vec<Vec<u32>> {
        (0..self.simplex_count())
            .filter(|&s| self.up_closures[s].len() == 1)
            .map(|s| self.simplices[s].clone())
            .collect()
    }

    /// All cofaces of `id`, including `id` itself.
    pub fn up_closure(&self, id: usize) -> &SimplexSet {
        &self.up_closures[id]
    }

    /// All faces of `id`, including `id` itself.
    pub fn down_closure(&self, id: usize) -> &SimplexSet {
        &self.down_closures[id]
    }

    /// Open star of a single vertex: all simplices containing it.
    pub fn vertex_star(&self, v: u32) -> &SimplexSet {
        &self.vertex_stars[v as usize]
    }

    pub fn connected_components(&self) -> usize {
        self.components
    }

    pub fn component_of_vertex(&self, v: u32) -> usize {
        self.component_of_vertex[v as usize]
    }

    /// Vertices lying in the closure of any member of `set`.
    pub fn closure_vertices(&self, set: &SimplexSet) -> Vec<u32> {
        (0..self.vertex_count)
            .filter(|&v| self.vertex_stars[v as usize].intersects(set))
            .collect()
    }

    fn check_up_closed(&self, members: &SimplexSet) -> Result<(), SetError> {
        for m in members.iter() {
            for c in self.up_closures[m].iter() {
                if !members.contains(c) {
                    return Err(SetError::NotUpClosed { member: m, coface: c });
                }
            }
        }
        Ok(())
    }

    fn check_down_closed(&self, members: &SimplexSet) -> Result<(), SetError> {
        for m in members.iter() {
            for f in self.down_closures[m].iter() {
                if !members.contains(f) {
                    return Err(SetError::NotDownClosed { member: m, face: f });
                }
            }
        }
        Ok(())
    }
}

/// An up-closed simplex family of a fixed complex (a combinatorial open set).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpenSet {
    complex: Arc<Complex>,
    members: SimplexSet,
}

impl OpenSet {
    pub fn new(complex: Arc<Complex>, members: SimplexSet) -> Result<Self, SetError> {
        complex.check_up_closed(&members)?;
        Ok(OpenSet { complex, members })
    }

    /// Builds the set without the up-closedness check; callers must guarantee it.
    pub(crate) fn new_unchecked(complex: Arc<Complex>, members: SimplexSet) -> Self {
        debug_assert!(complex.check_up_closed(&members).is_ok());
        OpenSet { complex, members }
    }

    pub fn whole(complex: Arc<Complex>) -> Self {
        let members = SimplexSet::full(complex.simplex_count());
        OpenSet { complex, members }
    }

    pub fn empty(complex: Arc<Complex>) -> Self {
        let members = SimplexSet::empty(complex.simplex_count());
        OpenSet { complex, members }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn members(&self) -> &SimplexSet {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(id)
    }

    pub fn union(&self, other: &OpenSet) -> Result<OpenSet, SetError> {
        if self.complex != other.complex {
            return Err(SetError::ComplexMismatch);
        }
        Ok(OpenSet::new_unchecked(self.complex.clone(), self.members.union(&other.members)))
    }

    pub fn intersection(&self, other: &OpenSet) -> Result<OpenSet, SetError> {
        if self.complex != other.complex {
            return Err(SetError::ComplexMismatch);
        }
        Ok(OpenSet::new_unchecked(
            self.complex.clone(),
            self.members.intersection(&other.members),
        ))
    }

    pub fn is_subset(&self, other: &OpenSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// A down-closed simplex family (a subcomplex; the combinatorial closed sets).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedSet {
    complex: Arc<Complex>,
    members: SimplexSet,
}

impl ClosedSet {
    pub fn new(complex: Arc<Complex>, members: SimplexSet) -> Result<Self, SetError> {
        complex.check_down_closed(&members)?;
        Ok(ClosedSet { complex, members })
    }

    pub(crate) fn new_unchecked(complex: Arc<Complex>, members: SimplexSet) -> Self {
        debug_assert!(complex.check_down_closed(&members).is_ok());
        ClosedSet { complex, members }
    }

    pub fn empty(complex: Arc<Complex>) -> Self {
        let members = SimplexSet::empty(complex.simplex_count());
        ClosedSet { complex, members }
    }

    pub fn whole(complex: Arc<Complex>) -> Self {
        let members = SimplexSet::full(complex.simplex_count());
        ClosedSet { complex, members }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn members(&self) -> &SimplexSet {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Open star of a vertex set: all simplices meeting it.
pub fn open_star(complex: &Arc<Complex>, vertices: &[u32]) -> Result<OpenSet, ComplexError> {
    let mut members = SimplexSet::empty(complex.simplex_count());
    for &v in vertices {
        if v >= complex.vertex_count() {
            return Err(ComplexError::VertexOutOfRange {
                vertex: v,
                vertex_count: complex.vertex_count(),
            });
        }
        members.union_with(complex.vertex_star(v));
    }
    Ok(OpenSet::new_unchecked(complex.clone(), members))
}

/// Closure and combinatorial boundary of an open set.
///
/// The closure is the down-closure of the members; the boundary is the closure
/// minus the members themselves (for an up-closed family, these are exactly
/// the simplices all of whose cofaces lie in the set).
pub fn closure_and_boundary(u: &OpenSet) -> (ClosedSet, ClosedSet) {
    let complex = u.complex().clone();
    let mut closure = SimplexSet::empty(complex.simplex_count());
    for m in u.members().iter() {
        closure.union_with(complex.down_closure(m));
    }
    let boundary = closure.difference(u.members());
    (
        ClosedSet::new_unchecked(complex.clone(), closure),
        ClosedSet::new_unchecked(complex, boundary),
    )
}

/// Iterated closed star-neighborhood of a subcomplex.
///
/// One step replaces the set by the closure of the open star of its vertices;
/// radius 0 returns the set unchanged.
pub fn star_neighborhood(c: &ClosedSet, radius: usize) -> ClosedSet {
    let complex = c.complex().clone();
    let mut current = c.members().clone();
    for _ in 0..radius {
        if current.is_empty() {
            break;
        }
        let mut star = SimplexSet::empty(complex.simplex_count());
        for v in complex.closure_vertices(&current) {
            star.union_with(complex.vertex_star(v));
        }
        let mut next = SimplexSet::empty(complex.simplex_count());
        for m in star.iter() {
            next.union_with(complex.down_closure(m));
        }
        next.union_with(&current);
        current = next;
    }
    ClosedSet::new_unchecked(complex, current)
}

/// A simplicial map between complexes, stored as a vertex map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialMap {
    domain: Arc<Complex>,
    codomain: Arc<Complex>,
    vertex_image: Vec<u32>,
    simplex_image: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        domain: Arc<Complex>,
        codomain: Arc<Complex>,
        vertex_image: Vec<u32>,
    ) -> Result<Self, MapError> {
        if vertex_image.len() != domain.vertex_count() as usize {
            return Err(MapError::ImageLength {
                got: vertex_image.len(),
                expected: domain.vertex_count() as usize,
            });
        }
        if let Some(&v) = vertex_image.iter().find(|&&v| v >= codomain.vertex_count()) {
            return Err(MapError::ImageVertexOutOfRange { vertex: v });
        }
        let mut simplex_image = Vec::with_capacity(domain.simplex_count());
        for s in domain.simplices() {
            let mut img: Vec<u32> = s.iter().map(|&v| vertex_image[v as usize]).collect();
            img.sort_unstable();
            img.dedup();
            match codomain.simplex_id(&img) {
                Some(id) => simplex_image.push(id),
                None => return Err(MapError::NotSimplicial { simplex: s.clone() }),
            }
        }
        Ok(SimplicialMap {
            domain,
            codomain,
            vertex_image,
            simplex_image,
        })
    }

    pub fn identity(complex: Arc<Complex>) -> Self {
        let vertex_image: Vec<u32> = (0..complex.vertex_count()).collect();
        SimplicialMap::new(complex.clone(), complex, vertex_image).expect("identity map")
    }

    pub fn constant(domain: Arc<Complex>, codomain: Arc<Complex>, vertex: u32) -> Result<Self, MapError> {
        let vertex_image = vec![vertex; domain.vertex_count() as usize];
        SimplicialMap::new(domain, codomain, vertex_image)
    }

    pub fn domain(&self) -> &Arc<Complex> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Complex> {
        &self.codomain
    }

    pub fn vertex_image(&self) -> &[u32] {
        &self.vertex_image
    }

    pub fn apply_vertex(&self, v: u32) -> u32 {
        self.vertex_image[v as usize]
    }

    /// Image simplex id for a domain simplex id.
    pub fn apply_simplex(&self, id: usize) -> usize {
        self.simplex_image[id]
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self.vertex_image.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `self ∘ inner` (apply `inner` first).
    pub fn compose(&self, inner: &SimplicialMap) -> Result<SimplicialMap, MapError> {
        if inner.codomain != self.domain {
            return Err(MapError::NotComposable);
        }
        let vertex_image: Vec<u32> = inner
            .vertex_image
            .iter()
            .map(|&v| self.vertex_image[v as usize])
            .collect();
        SimplicialMap::new(inner.domain.clone(), self.codomain.clone(), vertex_image)
    }
}

/// Preimage of an open set under a simplicial map.
///
/// This is up-closed because the image of a coface contains the image of the
/// face, and the target set is up-closed.
pub fn preimage(f: &SimplicialMap, u: &OpenSet) -> Result<OpenSet, MapError> {
    if u.complex() != f.codomain() {
        return Err(MapError::ComplexMismatch);
    }
    let mut members = SimplexSet::empty(f.domain().simplex_count());
    for id in 0..f.domain().simplex_count() {
        if u.contains(f.apply_simplex(id)) {
            members.insert(id);
        }
    }
    Ok(OpenSet::new_unchecked(f.domain().clone(), members))
}

/// Vertex data interpolated affinely on each simplex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PLFunction {
    complex: Arc<Complex>,
    values: Vec<Rat>,
}

impl PLFunction {
    pub fn new(complex: Arc<Complex>, values: Vec<Rat>) -> Result<Self, SetError> {
        if values.len() != complex.vertex_count() as usize {
            return Err(SetError::ComplexMismatch);
        }
        Ok(PLFunction { complex, values })
    }

    pub fn constant(complex: Arc<Complex>, value: Rat) -> Self {
        let values = vec![value; complex.vertex_count() as usize];
        PLFunction { complex, values }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self, v: u32) -> &Rat {
        &self.values[v as usize]
    }

    pub fn add(&self, other: &PLFunction) -> Result<PLFunction, SetError> {
        if self.complex != other.complex {
            return Err(SetError::ComplexMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(PLFunction { complex: self.complex.clone(), values })
    }

    pub fn scale(&self, c: &Rat) -> PLFunction {
        PLFunction {
            complex: self.complex.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `self ∘ f` for a simplicial map into this function's complex.
    pub fn pullback(&self, f: &SimplicialMap) -> Result<PLFunction, MapError> {
        if f.codomain() != &self.complex {
            return Err(MapError::ComplexMismatch);
        }
        let values = f.vertex_image().iter().map(|&v| self.values[v as usize].clone()).collect();
        Ok(PLFunction { complex: f.domain().clone(), values })
    }

    pub fn max_value(&self) -> &Rat {
        self.values.iter().max().expect("nonempty complex")
    }

    pub fn min_value(&self) -> &Rat {
        self.values.iter().min().expect("nonempty complex")
    }

    /// max - min of the values over the closure vertices of `set`.
    ///
    /// Affine-on-simplices data attains its extrema at vertices, so this is
    /// the exact oscillation over the corresponding region.
    pub fn oscillation_on(&self, set: &SimplexSet) -> Rat {
        let mut min: Option<&Rat> = None;
        let mut max: Option<&Rat> = None;
        for v in self.complex.closure_vertices(set) {
            let val = &self.values[v as usize];
            if min.map_or(true, |m| val < m) {
                min = Some(val);
            }
            if max.map_or(true, |m| val > m) {
                max = Some(val);
            }
        }
        match (min, max) {
            (Some(a), Some(b)) => b - a,
            _ => Rat::from_integer(0.into()),
        }
    }
}

/// One barycentric subdivision step together with its carrier data.
///
/// Vertices of the subdivision are the simplices of the base complex; a
/// simplex of the subdivision is a chain of base simplices ordered by strict
/// face inclusion, and its carrier is the maximal element of the chain.
pub struct Subdivision {
    base: Arc<Complex>,
    complex: Arc<Complex>,
    carrier: Vec<usize>,
}

impl Subdivision {
    pub fn of(base: &Arc<Complex>) -> Subdivision {
        let n = base.simplex_count();
        // chains of the face poset, each recorded as a sorted vertex list of new ids
        let mut chains: Vec<Vec<u32>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        fn extend(
            base: &Complex,
            last: usize,
            stack: &mut Vec<usize>,
            chains: &mut Vec<Vec<u32>>,
        ) {
            chains.push(stack.iter().map(|&i| i as u32).collect());
            for next in base.up_closure(last).iter() {
                if next == last {
                    continue;
                }
                stack.push(next);
                extend(base, next, stack, chains);
                stack.pop();
            }
        }
        for start in 0..n {
            stack.push(start);
            extend(base, start, &mut stack, &mut chains);
            stack.pop();
        }
        for c in &mut chains {
            c.sort_unstable();
        }
        chains.sort_unstable_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
        chains.dedup();
        let complex = Arc::new(Complex::finish(n as u32, chains));
        // the carrier of a chain is its deepest element
        let carrier: Vec<usize> = complex
            .simplices()
            .iter()
            .map(|chain| {
                chain
                    .iter()
                    .map(|&i| i as usize)
                    .max_by_key(|&i| base.simplex(i).len())
                    .expect("nonempty chain")
            })
            .collect();
        Subdivision {
            base: base.clone(),
            complex,
            carrier,
        }
    }

    pub fn base(&self) -> &Arc<Complex> {
        &self.base
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    /// Base simplex whose interior contains the interior of the given chain.
    pub fn carrier(&self, chain_id: usize) -> usize {
        self.carrier[chain_id]
    }

    /// Lift of an open set: all chains whose carrier belongs to the set.
    pub fn lift_open(&self, u: &SimplexSet) -> SimplexSet {
        let mut members = SimplexSet::empty(self.complex.simplex_count());
        for (id, &c) in self.carrier.iter().enumerate() {
            if u.contains(c) {
                members.insert(id);
            }
        }
        members
    }

    /// Lift of PL data: the value at a barycenter vertex is the mean of the
    /// base values over the corresponding simplex.
    pub fn lift_pl(&self, f: &PLFunction) -> PLFunction {
        let values: Vec<Rat> = (0..self.complex.vertex_count())
            .map(|nv| {
                let s = self.base.simplex(nv as usize);
                let sum: Rat = s.iter().map(|&v| f.value(v).clone()).sum();
                sum / Rat::from_integer((s.len() as i64).into())
            })
            .collect();
        PLFunction::new(self.complex.clone(), values).expect("lifted values")
    }
}

/// An iterated barycentric subdivision.
pub struct Tower {
    base: Arc<Complex>,
    levels: Vec<Subdivision>,
}

impl Tower {
    pub fn new(base: &Arc<Complex>, level: usize) -> Tower {
        let mut levels = Vec::with_capacity(level);
        let mut current = base.clone();
        for _ in 0..level {
            let sub = Subdivision::of(&current);
            current = sub.complex().clone();
            levels.push(sub);
        }
        Tower { base: base.clone(), levels }
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    pub fn base(&self) -> &Arc<Complex> {
        &self.base
    }

    pub fn top(&self) -> &Arc<Complex> {
        self.levels.last().map(|s| s.complex()).unwrap_or(&self.base)
    }

    pub fn lift_open(&self, u: &SimplexSet) -> SimplexSet {
        let mut cur = u.clone();
        for s in &self.levels {
            cur = s.lift_open(&cur);
        }
        cur
    }

    pub fn lift_pl(&self, f: &PLFunction) -> PLFunction {
        let mut cur = f.clone();
        for s in &self.levels {
            cur = s.lift_pl(&cur);
        }
        cur
    }
}

/// Public subdivision operation: the subdivided complex plus the carrier map.
pub fn barycentric_subdivide(c: &Arc<Complex>) -> (Arc<Complex>, Vec<usize>) {
    let sub = Subdivision::of(c);
    (sub.complex().clone(), sub.carrier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn path_complex_shape() {
        let p = Complex::path(3);
        assert_eq!(p.vertex_count(), 3);
        assert_eq!(p.simplex_count(), 5);
        assert_eq!(p.dimension(), 1);
        assert_eq!(p.connected_components(), 1);
    }

    #[test]
    fn face_closure_and_ids() {
        let t = Complex::full_simplex(3);
        assert_eq!(t.simplex_count(), 7);
        assert!(t.simplex_id(&[2, 0]).is_some());
        assert!(t.simplex_id(&[0, 1, 2]).is_some());
        let boundary = Complex::cycle(3);
        assert_eq!(boundary.simplex_count(), 6);
        assert_eq!(boundary.dimension(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Complex::from_maximal(2, &[vec![0, 3]]).is_err());
        assert!(Complex::from_maximal(3, &[vec![0, 1]]).is_err()); // vertex 2 uncovered
        assert!(Complex::from_maximal(2, &[vec![1, 1]]).is_err());
    }

    #[test]
    fn open_star_examples() {
        // path 0-1-2, vertices {1} -> {{1},{0,1},{1,2}}
        let p = Complex::path(3);
        let star = open_star(&p, &[1]).unwrap();
        let expect: Vec<usize> = [vec![1u32], vec![0, 1], vec![1, 2]]
            .iter()
            .map(|s| p.simplex_id(s).unwrap())
            .collect();
        assert_eq!(star.members().iter().collect::<Vec<_>>().len(), 3);
        for id in expect {
            assert!(star.contains(id));
        }
        // all vertices -> everything
        let all = open_star(&p, &[0, 1, 2]).unwrap();
        assert_eq!(all.members().len(), p.simplex_count());
        // out of range
        assert!(open_star(&p, &[9]).is_err());
    }

    #[test]
    fn open_star_oracle_triangle_boundary() {
        // brute-force per-simplex intersection check
        let c = Complex::cycle(3);
        let star = open_star(&c, &[0, 2]).unwrap();
        for (id, s) in c.simplices().iter().enumerate() {
            let hits = s.contains(&0) || s.contains(&2);
            assert_eq!(star.contains(id), hits, "simplex {s:?}");
        }
    }

    #[test]
    fn preimage_identity_and_constant() {
        let t = Complex::full_simplex(3);
        let star0 = open_star(&t, &[0]).unwrap();
        let id = SimplicialMap::identity(t.clone());
        assert_eq!(preimage(&id, &star0).unwrap(), star0);

        let p = Complex::path(3);
        let cst = SimplicialMap::constant(p.clone(), t.clone(), 0).unwrap();
        let pre = preimage(&cst, &star0).unwrap();
        assert_eq!(pre.members().len(), p.simplex_count());
    }

    #[test]
    fn preimage_edge_collapse_brute_force() {
        // collapse path 0-1-2-3 onto path 0-1-2 by sending 3 -> 2
        let p4 = Complex::path(4);
        let p3 = Complex::path(3);
        let f = SimplicialMap::new(p4.clone(), p3.clone(), vec![0, 1, 2, 2]).unwrap();
        let u = open_star(&p3, &[2]).unwrap();
        let pre = preimage(&f, &u).unwrap();
        for (id, s) in p4.simplices().iter().enumerate() {
            let mut img: Vec<u32> = s.iter().map(|&v| [0, 1, 2, 2][v as usize]).collect();
            img.sort_unstable();
            img.dedup();
            let img_id = p3.simplex_id(&img).unwrap();
            assert_eq!(pre.contains(id), u.contains(img_id));
        }
    }

    #[test]
    fn invalid_map_rejected() {
        // path 0-1-2 has no edge {0,2}
        let p = Complex::path(3);
        assert!(SimplicialMap::new(p.clone(), p.clone(), vec![0, 2, 1]).is_err());
        assert!(SimplicialMap::new(p.clone(), p.clone(), vec![0, 1]).is_err());
    }

    #[test]
    fn closure_and_boundary_examples() {
        let p = Complex::path(3);
        // whole space has empty boundary
        let (cl, bd) = closure_and_boundary(&OpenSet::whole(p.clone()));
        assert_eq!(cl.members().len(), p.simplex_count());
        assert!(bd.is_empty());
        // star(1): closure is the whole path, boundary {{0},{2}}
        let star1 = open_star(&p, &[1]).unwrap();
        let (cl, bd) = closure_and_boundary(&star1);
        assert_eq!(cl.members().len(), p.simplex_count());
        let expect = SimplexSet::from_indices(
            p.simplex_count(),
            [p.simplex_id(&[0]).unwrap(), p.simplex_id(&[2]).unwrap()],
        );
        assert_eq!(bd.members(), &expect);
        // empty set
        let (cl, bd) = closure_and_boundary(&OpenSet::empty(p));
        assert!(cl.is_empty() && bd.is_empty());
    }

    #[test]
    fn subdivision_shapes() {
        // single edge -> path with 3 vertices
        let edge = Complex::path(2);
        let sub = Subdivision::of(&edge);
        assert_eq!(sub.complex().vertex_count(), 3);
        assert_eq!(sub.complex().dimension(), 1);
        assert_eq!(
            sub.complex()
                .simplices()
                .iter()
                .filter(|s| s.len() == 2)
                .count(),
            2
        );
        // single triangle -> 7 vertices, 6 triangles
        let t = Complex::full_simplex(3);
        let sub = Subdivision::of(&t);
        assert_eq!(sub.complex().vertex_count(), 7);
        assert_eq!(
            sub.complex()
                .simplices()
                .iter()
                .filter(|s| s.len() == 3)
                .count(),
            6
        );
    }

    #[test]
    fn subdivision_preserves_components() {
        let two = Complex::from_maximal(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(two.connected_components(), 2);
        let sub = Subdivision::of(&two);
        assert_eq!(sub.complex().connected_components(), 2);
    }

    #[test]
    fn lift_matches_carrier_membership() {
        let c = Complex::cycle(3);
        let u = open_star(&c, &[1]).unwrap();
        let sub = Subdivision::of(&c);
        let lifted = sub.lift_open(u.members());
        for id in 0..sub.complex().simplex_count() {
            assert_eq!(lifted.contains(id), u.contains(sub.carrier(id)));
        }
        // lifted sets stay up-closed
        assert!(OpenSet::new(sub.complex().clone(), lifted).is_ok());
    }

    #[test]
    fn pl_lift_means() {
        let edge = Complex::path(2);
        let f = PLFunction::new(edge.clone(), vec![rat_int(0), rat_int(1)]).unwrap();
        let sub = Subdivision::of(&edge);
        let lifted = sub.lift_pl(&f);
        // new vertex ids are base simplex ids: {0}, {1}, {0,1}
        let mid = sub.complex().vertex_count() - 1;
        let mid_simplex = sub.base().simplex_id(&[0, 1]).unwrap() as u32;
        assert_eq!(mid_simplex, mid);
        assert_eq!(lifted.value(mid), &rat(1, 2));
        assert_eq!(lifted.max_value(), &rat_int(1));
    }

    #[test]
    fn oscillation_at_vertices() {
        let p = Complex::path(3);
        let hat = PLFunction::new(p.clone(), vec![rat_int(0), rat_int(1), rat_int(0)]).unwrap();
        let everything = SimplexSet::full(p.simplex_count());
        assert_eq!(hat.oscillation_on(&everything), rat_int(1));
        let edge01 = SimplexSet::from_indices(p.simplex_count(), [p.simplex_id(&[0, 1]).unwrap()]);
        assert_eq!(hat.oscillation_on(&edge01), rat_int(1));
        let v0 = SimplexSet::from_indices(p.simplex_count(), [p.simplex_id(&[0]).unwrap()]);
        assert_eq!(hat.oscillation_on(&v0), rat_int(0));
    }
}
