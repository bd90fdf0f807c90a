//! Finite open covers, their order, joins, pullbacks, and the refinement
//! invariant: the minimum order over all covers refining a given one.
//!
//! The refinement search runs in shrinking normal form: a refinement of
//! `a = {U_1, ..., U_m}` is replaced by a tuple `(V_1, ..., V_m)` with each
//! `V_i` an up-closed subset of `U_i` (empty allowed) whose union covers.
//! Merging refinement elements that share a witness never increases the
//! order, so the minimum over shrinkings equals the minimum over all
//! combinatorial refinements.

use std::collections::HashSet;
use std::sync::Arc;

use crate::bits::SimplexSet;
use crate::error::CoverError;
use crate::rat::Rat;
use crate::simplicial::{preimage, Complex, OpenSet, SimplicialMap, Tower};

/// A finite open cover of a complex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cover {
    complex: Arc<Complex>,
    elements: Vec<OpenSet>,
}

impl Cover {
    pub fn new(complex: Arc<Complex>, elements: Vec<OpenSet>) -> Result<Self, CoverError> {
        if elements.is_empty() {
            return Err(CoverError::Empty);
        }
        let mut union = SimplexSet::empty(complex.simplex_count());
        for (i, e) in elements.iter().enumerate() {
            if e.complex() != &complex {
                return Err(CoverError::ComplexMismatch);
            }
            if e.is_empty() {
                return Err(CoverError::EmptyElement(i));
            }
            union.union_with(e.members());
        }
        if let Some(missing) = (0..complex.simplex_count()).find(|&s| !union.contains(s)) {
            return Err(CoverError::NotCovering(missing));
        }
        Ok(Cover { complex, elements })
    }

    /// The one-element cover by the whole space.
    pub fn whole(complex: Arc<Complex>) -> Self {
        let whole = OpenSet::whole(complex.clone());
        Cover { complex, elements: vec![whole] }
    }

    /// The cover by all vertex stars.
    pub fn stars(complex: Arc<Complex>) -> Self {
        let elements: Vec<OpenSet> = (0..complex.vertex_count())
            .map(|v| crate::simplicial::open_star(&complex, &[v]).expect("vertex star"))
            .collect();
        Cover { complex, elements }
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn elements(&self) -> &[OpenSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Maximal number of elements sharing a simplex, minus one.
pub fn ord(a: &Cover) -> usize {
    ord_of_sets(
        a.elements.iter().map(|e| e.members()),
        a.complex.simplex_count(),
    )
}

fn ord_of_sets<'a, I: Iterator<Item = &'a SimplexSet>>(sets: I, nsimp: usize) -> usize {
    let mut counts = vec![0usize; nsimp];
    for s in sets {
        for i in s.iter() {
            counts[i] += 1;
        }
    }
    counts.into_iter().max().unwrap_or(1).saturating_sub(1)
}

/// Common refinement: all nonempty pairwise intersections, deduplicated.
pub fn join(a: &Cover, b: &Cover) -> Result<Cover, CoverError> {
    if a.complex != b.complex {
        return Err(CoverError::ComplexMismatch);
    }
    let mut seen: HashSet<SimplexSet> = HashSet::new();
    let mut elements = Vec::new();
    for u in &a.elements {
        for v in &b.elements {
            let w = u.members().intersection(v.members());
            if !w.is_empty() && seen.insert(w.clone()) {
                elements.push(OpenSet::new_unchecked(a.complex.clone(), w));
            }
        }
    }
    Cover::new(a.complex.clone(), elements)
}

/// Elementwise preimage; empty preimages are dropped.
pub fn pullback_cover(f: &SimplicialMap, a: &Cover) -> Result<Cover, CoverError> {
    if a.complex() != f.codomain() {
        return Err(CoverError::ComplexMismatch);
    }
    let mut seen: HashSet<SimplexSet> = HashSet::new();
    let mut elements = Vec::new();
    for u in &a.elements {
        let v = preimage(f, u).map_err(|_| CoverError::ComplexMismatch)?;
        if !v.is_empty() && seen.insert(v.members().clone()) {
            elements.push(v);
        }
    }
    Cover::new(f.domain().clone(), elements)
}

/// Weighted mediant: `sum(m_i a_i) / sum(m_i b_i)`, which never exceeds
/// `max a_i / b_i` when all `b_i`, `m_i` are positive.
pub fn mediant_bound(numerators: &[Rat], denominators: &[Rat], weights: &[Rat]) -> Result<Rat, CoverError> {
    if numerators.is_empty()
        || numerators.len() != denominators.len()
        || numerators.len() != weights.len()
    {
        return Err(CoverError::BadMediant);
    }
    let zero = Rat::from_integer(0.into());
    if denominators.iter().any(|b| b <= &zero) || weights.iter().any(|m| m <= &zero) {
        return Err(CoverError::BadMediant);
    }
    let num: Rat = numerators.iter().zip(weights).map(|(a, m)| a * m).sum();
    let den: Rat = denominators.iter().zip(weights).map(|(b, m)| b * m).sum();
    Ok(num / den)
}

/// A witnessed shrinking of a cover at some subdivision level.
///
/// Each element lives on the `level`-fold barycentric subdivision of the
/// original complex and is contained in the lift of the witness element.
#[derive(Clone, Debug)]
pub struct RefinementCertificate {
    pub level: usize,
    /// `(witness index into the original cover, shrunken element)` pairs.
    pub shrinking: Vec<(usize, OpenSet)>,
    pub achieved_order: usize,
}

impl RefinementCertificate {
    /// Independently recheck the certificate against the cover it refines.
    pub fn verify(&self, original: &Cover) -> Result<(), CoverError> {
        let tower = Tower::new(original.complex(), self.level);
        let top = tower.top().clone();
        let mut union = SimplexSet::empty(top.simplex_count());
        for (w, v) in &self.shrinking {
            if *w >= original.len() || v.complex() != &top {
                return Err(CoverError::ComplexMismatch);
            }
            let lifted = tower.lift_open(original.elements()[*w].members());
            if !v.members().is_subset(&lifted) {
                return Err(CoverError::ComplexMismatch);
            }
            union.union_with(v.members());
        }
        if let Some(missing) = (0..top.simplex_count()).find(|&s| !union.contains(s)) {
            return Err(CoverError::NotCovering(missing));
        }
        let achieved = ord_of_sets(self.shrinking.iter().map(|(_, v)| v.members()), top.simplex_count());
        if achieved != self.achieved_order {
            return Err(CoverError::NotCovering(achieved));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RefinementResult {
    pub value: usize,
    pub certificate: RefinementCertificate,
    /// True when the branch-and-bound search was exhaustive within budget.
    pub exact: bool,
}

/// Search state shared by the exact and greedy shrinking searches.
struct ShrinkProblem {
    complex: Arc<Complex>,
    /// Deduplicated, domination-pruned lifted elements.
    elems: Vec<SimplexSet>,
    /// Original cover index for each search element.
    orig: Vec<usize>,
    /// For each simplex, the search elements containing it.
    membership: Vec<Vec<u32>>,
}

impl ShrinkProblem {
    fn build(complex: Arc<Complex>, lifted: Vec<SimplexSet>) -> ShrinkProblem {
        // dedup equal elements, keep first occurrence
        let mut elems: Vec<SimplexSet> = Vec::new();
        let mut orig: Vec<usize> = Vec::new();
        let mut seen: HashSet<SimplexSet> = HashSet::new();
        for (i, e) in lifted.into_iter().enumerate() {
            if !e.is_empty() && seen.insert(e.clone()) {
                elems.push(e);
                orig.push(i);
            }
        }
        // drop elements dominated by a superset: a shrinking inside a smaller
        // element is also a shrinking inside the larger one
        let mut keep = vec![true; elems.len()];
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                if i != j
                    && keep[i]
                    && keep[j]
                    && elems[i].is_subset(&elems[j])
                    && (elems[i] != elems[j] || i > j)
                {
                    keep[i] = false;
                }
            }
        }
        let (elems, orig): (Vec<_>, Vec<_>) = elems
            .into_iter()
            .zip(orig)
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .map(|(_, p)| p)
            .unzip();
        let nsimp = complex.simplex_count();
        let mut membership = vec![Vec::new(); nsimp];
        for (e, set) in elems.iter().enumerate() {
            for s in set.iter() {
                membership[s].push(e as u32);
            }
        }
        ShrinkProblem { complex, elems, orig, membership }
    }

    fn nsimp(&self) -> usize {
        self.complex.simplex_count()
    }

    /// Greedy star-assignment: each vertex adopts an element containing it,
    /// which automatically keeps every element up-closed and covers every
    /// simplex through its vertices.
    fn star_assignment(&self) -> Vec<SimplexSet> {
        let nsimp = self.nsimp();
        let mut cur = vec![SimplexSet::empty(nsimp); self.elems.len()];
        let mut counts = vec![0u32; nsimp];
        for v in 0..self.complex.vertex_count() {
            let v0 = self.complex.vertex_simplex(v);
            let star = self.complex.up_closure(v0);
            let mut best: Option<(u32, u32)> = None; // (score, element)
            for &e in &self.membership[v0] {
                let mut score = 0u32;
                for s in star.iter() {
                    if !cur[e as usize].contains(s) {
                        score += counts[s] + 1;
                    }
                }
                if best.map_or(true, |(bs, _)| score < bs) {
                    best = Some((score, e));
                }
            }
            let (_, e) = best.expect("covering element for vertex");
            for s in star.iter() {
                if !cur[e as usize].contains(s) {
                    cur[e as usize].insert(s);
                    counts[s] += 1;
                }
            }
        }
        cur
    }

    /// Deletion pass: peel doubly-covered minimal simplices off the most
    /// overlapping element until nothing improves.
    fn deletion_pass(&self, cur: &mut [SimplexSet]) {
        let nsimp = self.nsimp();
        let mut counts = vec![0u32; nsimp];
        for c in cur.iter() {
            for s in c.iter() {
                counts[s] += 1;
            }
        }
        loop {
            let mut best: Option<(u32, u64, usize, usize)> = None; // (mult, overlap, elem, simplex)
            for (e, c) in cur.iter().enumerate() {
                let overlap: u64 = c.iter().map(|s| (counts[s] - 1) as u64).sum();
                for s in c.iter() {
                    if counts[s] < 2 {
                        continue;
                    }
                    // removable only when s is minimal in the element
                    let removable = self
                        .complex
                        .down_closure(s)
                        .iter()
                        .all(|f| f == s || !c.contains(f));
                    if removable {
                        let key = (counts[s], overlap, e, s);
                        if best.map_or(true, |b| (key.0, key.1) > (b.0, b.1)) {
                            best = Some(key);
                        }
                    }
                }
            }
            match best {
                Some((_, _, e, s)) => {
                    cur[e].remove(s);
                    counts[s] -= 1;
                }
                None => break,
            }
        }
    }

    /// Depth-first feasibility search: is there a covering shrinking in which
    /// every simplex lies in at most `k + 1` elements?
    fn feasible(&self, k: usize, budget: &mut u64) -> SearchOutcome {
        let nsimp = self.nsimp();
        let cap = (k + 1) as u32;
        let mut cur = vec![SimplexSet::empty(nsimp); self.elems.len()];
        let mut counts = vec![0u32; nsimp];
        let mut uncovered = nsimp;
        self.dfs(cap, &mut cur, &mut counts, &mut uncovered, budget)
    }

    fn dfs(
        &self,
        cap: u32,
        cur: &mut Vec<SimplexSet>,
        counts: &mut Vec<u32>,
        uncovered: &mut usize,
        budget: &mut u64,
    ) -> SearchOutcome {
        if *uncovered == 0 {
            return SearchOutcome::Found(cur.clone());
        }
        // most constrained uncovered simplex
        let mut pick: Option<(usize, Vec<u32>)> = None;
        for s in 0..counts.len() {
            if counts[s] > 0 {
                continue;
            }
            let mut feas: Vec<u32> = Vec::new();
            for &e in &self.membership[s] {
                if self.fits(s, e as usize, cap, cur, counts) {
                    feas.push(e);
                }
            }
            if feas.is_empty() {
                return SearchOutcome::Infeasible;
            }
            let better = pick.as_ref().map_or(true, |(_, f)| feas.len() < f.len());
            if better {
                let single = feas.len() == 1;
                pick = Some((s, feas));
                if single {
                    break;
                }
            }
        }
        let (s, feas) = pick.expect("uncovered simplex exists");
        for e in feas {
            if *budget == 0 {
                return SearchOutcome::Exhausted;
            }
            *budget -= 1;
            let added = self.apply(s, e as usize, cur, counts, uncovered);
            match self.dfs(cap, cur, counts, uncovered, budget) {
                SearchOutcome::Infeasible => {
                    self.undo(e as usize, &added, cur, counts, uncovered);
                }
                other => return other,
            }
        }
        SearchOutcome::Infeasible
    }

    fn fits(&self, s: usize, e: usize, cap: u32, cur: &[SimplexSet], counts: &[u32]) -> bool {
        self.complex
            .up_closure(s)
            .iter()
            .all(|t| cur[e].contains(t) || counts[t] < cap)
    }

    fn apply(
        &self,
        s: usize,
        e: usize,
        cur: &mut [SimplexSet],
        counts: &mut [u32],
        uncovered: &mut usize,
    ) -> Vec<usize> {
        let mut added = Vec::new();
        for t in self.complex.up_closure(s).iter() {
            if !cur[e].contains(t) {
                cur[e].insert(t);
                if counts[t] == 0 {
                    *uncovered -= 1;
                }
                counts[t] += 1;
                added.push(t);
            }
        }
        added
    }

    fn undo(
        &self,
        e: usize,
        added: &[usize],
        cur: &mut [SimplexSet],
        counts: &mut [u32],
        uncovered: &mut usize,
    ) {
        for &t in added {
            cur[e].remove(t);
            counts[t] -= 1;
            if counts[t] == 0 {
                *uncovered += 1;
            }
        }
    }

    /// Exact order-0 test: each connected component must admit one element
    /// containing it entirely.
    fn order_zero_assignment(&self) -> Option<Vec<SimplexSet>> {
        let ncomp = self.complex.connected_components();
        let nsimp = self.nsimp();
        let mut comp_mask = vec![SimplexSet::empty(nsimp); ncomp];
        for s in 0..nsimp {
            let v = self.complex.simplex(s)[0];
            comp_mask[self.complex.component_of_vertex(v)].insert(s);
        }
        let mut cur = vec![SimplexSet::empty(nsimp); self.elems.len()];
        for mask in &comp_mask {
            let e = (0..self.elems.len()).find(|&e| mask.is_subset(&self.elems[e]))?;
            cur[e].union_with(mask);
        }
        Some(cur)
    }

    fn certificate(&self, level: usize, cur: &[SimplexSet]) -> RefinementCertificate {
        let achieved = ord_of_sets(cur.iter(), self.nsimp());
        let shrinking: Vec<(usize, OpenSet)> = cur
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(e, v)| {
                (
                    self.orig[e],
                    OpenSet::new_unchecked(self.complex.clone(), v.clone()),
                )
            })
            .collect();
        RefinementCertificate { level, shrinking, achieved_order: achieved }
    }
}

enum SearchOutcome {
    Found(Vec<SimplexSet>),
    Infeasible,
    Exhausted,
}

fn lift_problem(a: &Cover, level: usize) -> ShrinkProblem {
    let tower = Tower::new(a.complex(), level);
    let lifted: Vec<SimplexSet> = a
        .elements()
        .iter()
        .map(|e| tower.lift_open(e.members()))
        .collect();
    ShrinkProblem::build(tower.top().clone(), lifted)
}

/// Minimum order over all covers refining `a`, within the combinatorial
/// model at the given subdivision level.
///
/// The value is exact within the model when `exact` is true, and it is an
/// upper bound for the topological refinement invariant in every case.
pub fn refinement_dimension(a: &Cover, level: usize, budget: u64) -> Result<RefinementResult, CoverError> {
    if budget == 0 {
        return Err(CoverError::ZeroBudget);
    }
    let problem = lift_problem(a, level);
    if let Some(cur) = problem.order_zero_assignment() {
        let certificate = problem.certificate(level, &cur);
        return Ok(RefinementResult { value: 0, certificate, exact: true });
    }
    let greedy = problem.star_assignment();
    let mut best = problem.certificate(level, &greedy);
    let mut remaining = budget;
    let mut k = 1;
    while k < best.achieved_order {
        match problem.feasible(k, &mut remaining) {
            SearchOutcome::Found(cur) => {
                best = problem.certificate(level, &cur);
                debug_assert_eq!(best.achieved_order, k);
                break;
            }
            SearchOutcome::Infeasible => k += 1,
            SearchOutcome::Exhausted => {
                return Ok(RefinementResult {
                    value: best.achieved_order,
                    certificate: best,
                    exact: false,
                });
            }
        }
    }
    Ok(RefinementResult { value: best.achieved_order, certificate: best, exact: true })
}

/// Heuristic shrinking: greedy star assignment plus a deletion pass.
///
/// Always returns a valid certificate; its order never exceeds `ord(a)` and
/// never undercuts the exact refinement value.
pub fn greedy_refinement(a: &Cover, level: usize) -> RefinementCertificate {
    let problem = lift_problem(a, level);
    if let Some(cur) = problem.order_zero_assignment() {
        return problem.certificate(level, &cur);
    }
    let mut cur = problem.star_assignment();
    problem.deletion_pass(&mut cur);
    problem.certificate(level, &cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use crate::simplicial::open_star;

    /// Naive oracle: enumerate every tuple of up-closed subsets of the
    /// elements and take the minimum order over covering tuples.
    fn naive_refinement(a: &Cover) -> usize {
        let complex = a.complex();
        let nsimp = complex.simplex_count();
        let per_element: Vec<Vec<SimplexSet>> = a
            .elements()
            .iter()
            .map(|e| {
                let members: Vec<usize> = e.members().iter().collect();
                let mut subs = Vec::new();
                for mask in 0u64..(1 << members.len()) {
                    let set = SimplexSet::from_indices(
                        nsimp,
                        members
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, &s)| s),
                    );
                    let up_closed = set
                        .iter()
                        .all(|s| complex.up_closure(s).iter().all(|t| set.contains(t)));
                    if up_closed {
                        subs.push(set);
                    }
                }
                subs
            })
            .collect();
        let mut best = usize::MAX;
        let mut choice = vec![0usize; per_element.len()];
        loop {
            let union = choice
                .iter()
                .enumerate()
                .fold(SimplexSet::empty(nsimp), |mut acc, (e, &c)| {
                    acc.union_with(&per_element[e][c]);
                    acc
                });
            if union.len() == nsimp {
                let o = ord_of_sets(choice.iter().enumerate().map(|(e, &c)| &per_element[e][c]), nsimp);
                best = best.min(o);
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return best;
                }
                choice[i] += 1;
                if choice[i] < per_element[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn three_stars() -> Cover {
        let c = Complex::cycle(3);
        Cover::stars(c)
    }

    #[test]
    fn ord_examples() {
        let c = Complex::cycle(3);
        assert_eq!(ord(&Cover::whole(c.clone())), 0);
        // each edge lies in exactly two stars
        assert_eq!(ord(&three_stars()), 1);
    }

    #[test]
    fn ord_matches_brute_force() {
        let c = Complex::full_simplex(3);
        let a = Cover::new(
            c.clone(),
            vec![
                open_star(&c, &[0, 1]).unwrap(),
                open_star(&c, &[1, 2]).unwrap(),
                open_star(&c, &[2]).unwrap(),
            ],
        )
        .unwrap();
        let mut max = 0;
        for s in 0..c.simplex_count() {
            let m = a.elements().iter().filter(|e| e.contains(s)).count();
            max = max.max(m);
        }
        assert_eq!(ord(&a), max - 1);
    }

    #[test]
    fn join_identity_and_idempotence() {
        let a = three_stars();
        let whole = Cover::whole(a.complex().clone());
        let j = join(&a, &whole).unwrap();
        let mut left: Vec<_> = j.elements().iter().map(|e| e.members().clone()).collect();
        let mut right: Vec<_> = a.elements().iter().map(|e| e.members().clone()).collect();
        left.sort();
        right.sort();
        assert_eq!(left, right);

        let jj = join(&a, &a).unwrap();
        // same membership profile: every simplex lies in the same sets
        for s in 0..a.complex().simplex_count() {
            let in_a = a.elements().iter().any(|e| e.contains(s));
            let in_j = jj.elements().iter().any(|e| e.contains(s));
            assert_eq!(in_a, in_j);
        }
        // every join element is contained in an element of each factor
        for e in jj.elements() {
            assert!(a.elements().iter().any(|u| e.is_subset(u)));
        }
    }

    #[test]
    fn pullback_examples() {
        let a = three_stars();
        let c = a.complex().clone();
        let id = SimplicialMap::identity(c.clone());
        let p = pullback_cover(&id, &a).unwrap();
        assert_eq!(p.len(), a.len());

        let path = Complex::path(4);
        let cst = SimplicialMap::constant(path.clone(), c.clone(), 0).unwrap();
        let p = pullback_cover(&cst, &a).unwrap();
        // stars of 0 and its neighbors pull back to everything; star(1) and
        // star(2) both contain vertex 0's image? star(v) contains {0} iff v = 0
        assert!(p.elements().iter().any(|e| e.members().len() == path.simplex_count()));
        assert!(ord(&p) <= ord(&a));
    }

    #[test]
    fn mediant_examples() {
        let v = mediant_bound(
            &[rat_int(1), rat_int(2)],
            &[rat_int(2), rat_int(4)],
            &[rat_int(3), rat_int(5)],
        )
        .unwrap();
        assert_eq!(v, rat(1, 2));
        let v = mediant_bound(&[rat_int(0)], &[rat_int(1)], &[rat_int(7)]).unwrap();
        assert_eq!(v, rat_int(0));
        assert!(mediant_bound(&[rat_int(1)], &[rat_int(0)], &[rat_int(1)]).is_err());
        assert!(mediant_bound(&[], &[], &[]).is_err());
    }

    #[test]
    fn refinement_whole_is_zero() {
        let c = Complex::full_simplex(3);
        let r = refinement_dimension(&Cover::whole(c), 0, 1000).unwrap();
        assert_eq!(r.value, 0);
        assert!(r.exact);
    }

    #[test]
    fn refinement_three_stars_is_one() {
        let a = three_stars();
        let r = refinement_dimension(&a, 0, 100_000).unwrap();
        assert_eq!(r.value, 1);
        assert!(r.exact);
        r.certificate.verify(&a).unwrap();
        assert_eq!(naive_refinement(&a), 1);
    }

    #[test]
    fn path_covers_at_most_one() {
        let p = Complex::path(5);
        let a = Cover::stars(p.clone());
        let r = refinement_dimension(&a, 0, 100_000).unwrap();
        assert!(r.value <= 1);
        assert!(r.exact);
        let b = Cover::new(
            p.clone(),
            vec![
                open_star(&p, &[0, 1, 2]).unwrap(),
                open_star(&p, &[2, 3, 4]).unwrap(),
                open_star(&p, &[1, 3]).unwrap(),
            ],
        )
        .unwrap();
        let r = refinement_dimension(&b, 0, 100_000).unwrap();
        assert!(r.value <= 1);
        assert_eq!(r.value, naive_refinement(&b));
    }

    #[test]
    fn refinement_matches_naive_on_triangle() {
        let t = Complex::full_simplex(3);
        let covers = vec![
            Cover::stars(t.clone()),
            Cover::new(
                t.clone(),
                vec![
                    open_star(&t, &[0, 1]).unwrap(),
                    open_star(&t, &[2]).unwrap(),
                ],
            )
            .unwrap(),
            Cover::new(
                t.clone(),
                vec![
                    open_star(&t, &[0]).unwrap(),
                    open_star(&t, &[1]).unwrap(),
                    open_star(&t, &[2]).unwrap(),
                    OpenSet::whole(t.clone()),
                ],
            )
            .unwrap(),
        ];
        for a in covers {
            let r = refinement_dimension(&a, 0, 1_000_000).unwrap();
            assert!(r.exact);
            assert_eq!(r.value, naive_refinement(&a), "cover {a:?}");
            r.certificate.verify(&a).unwrap();
        }
    }

    #[test]
    fn level_monotonicity() {
        let a = three_stars();
        let r0 = refinement_dimension(&a, 0, 1_000_000).unwrap();
        let r1 = refinement_dimension(&a, 1, 1_000_000).unwrap();
        assert!(r1.exact && r0.exact);
        assert!(r1.value <= r0.value);
    }

    #[test]
    fn greedy_examples() {
        let c = Complex::full_simplex(3);
        let g = greedy_refinement(&Cover::whole(c), 0);
        assert_eq!(g.achieved_order, 0);
        let a = three_stars();
        let g = greedy_refinement(&a, 0);
        assert!(g.achieved_order <= ord(&a));
        g.verify(&a).unwrap();
        let exact = refinement_dimension(&a, 0, 1_000_000).unwrap();
        assert!(g.achieved_order >= exact.value);
    }

    #[test]
    fn budget_zero_is_error() {
        let a = three_stars();
        assert!(matches!(
            refinement_dimension(&a, 0, 0),
            Err(CoverError::ZeroBudget)
        ));
    }

    #[test]
    fn tiny_budget_degrades_to_upper_bound() {
        // filled triangle with vertex stars: the top simplex needs all three
        // elements, so the exact value is 2 and the order-1 probe must run
        let t = Complex::full_simplex(3);
        let a = Cover::stars(t);
        let exact = refinement_dimension(&a, 0, 1_000_000).unwrap();
        assert!(exact.exact);
        assert_eq!(exact.value, 2);
        let r = refinement_dimension(&a, 0, 1).unwrap();
        assert!(!r.exact);
        assert_eq!(r.value, 2);
        r.certificate.verify(&a).unwrap();
    }

    #[test]
    fn cover_validation() {
        let c = Complex::path(3);
        assert!(matches!(Cover::new(c.clone(), vec![]), Err(CoverError::Empty)));
        let partial = open_star(&c, &[0]).unwrap();
        assert!(matches!(
            Cover::new(c.clone(), vec![partial]),
            Err(CoverError::NotCovering(_))
        ));
        let empty = OpenSet::empty(c.clone());
        let whole = OpenSet::whole(c.clone());
        assert!(matches!(
            Cover::new(c, vec![whole, empty]),
            Err(CoverError::EmptyElement(1))
        ));
    }
}
