//! Oscillation-constrained covers and the variation mean dimension: the
//! least order of a cover all of whose elements keep every family member
//! within epsilon, and its finite-stage pushforward sequence.

use std::collections::HashSet;
use std::sync::Arc;

use num::Signed;

use crate::bits::SimplexSet;
use crate::cover::{ord, refinement_dimension, Cover, RefinementResult};
use crate::error::VariationError;
use crate::nerve::subordinate_partition;
use crate::rat::{rat_ratio_u, rat_zero, Rat};
use crate::simplicial::{Complex, OpenSet, PLFunction, Tower};
use crate::system::{compose_maps, AHSystem};

/// A finite family of elements represented by their diagonal-entry profiles.
///
/// A member models one element; its norm at a point is the largest absolute
/// entry value, so the oscillation of a member over a set is the largest
/// entry oscillation.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    complex: Arc<Complex>,
    members: Vec<Vec<PLFunction>>,
}

impl FunctionFamily {
    pub fn new(complex: Arc<Complex>, members: Vec<Vec<PLFunction>>) -> Result<Self, VariationError> {
        for m in &members {
            for entry in m {
                if entry.complex() != &complex {
                    return Err(VariationError::ComplexMismatch);
                }
            }
        }
        Ok(FunctionFamily { complex, members })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn members(&self) -> &[Vec<PLFunction>] {
        &self.members
    }

    fn entries(&self) -> impl Iterator<Item = &PLFunction> {
        self.members.iter().flatten()
    }
}

/// Largest entry oscillation of one member over an open set.
pub fn oscillation(member: &[PLFunction], u: &OpenSet) -> Result<Rat, VariationError> {
    for entry in member {
        if entry.complex() != u.complex() {
            return Err(VariationError::ComplexMismatch);
        }
    }
    Ok(member
        .iter()
        .map(|e| e.oscillation_on(u.members()))
        .max()
        .unwrap_or_else(rat_zero))
}

#[derive(Clone, Debug)]
pub struct VariationResult {
    pub value: usize,
    pub exact: bool,
    /// Number of maximal admissible sets the search ranged over.
    pub pool_size: usize,
    pub search: RefinementResult,
}

/// Maximal admissible open sets for the lifted family: one per maximal
/// clique of the vertex-compatibility graph, where two vertices are
/// compatible when every entry differs by less than epsilon between them.
///
/// Every admissible up-closed set is contained in one of these, so searching
/// their shrinkings is exact within the model.
fn admissible_pool(
    complex: &Arc<Complex>,
    entries: &[PLFunction],
    epsilon: &Rat,
) -> Result<Vec<SimplexSet>, VariationError> {
    let n = complex.vertex_count() as usize;
    // irreflexive compatibility graph; cliques are epsilon-thin vertex sets
    let mut compatible = vec![vec![false; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let ok = entries.iter().all(|e| {
                let d = e.value(a as u32) - e.value(b as u32);
                d.abs() < *epsilon
            });
            compatible[a][b] = ok;
            compatible[b][a] = ok;
        }
    }
    // Bron-Kerbosch with pivoting over the compatibility graph
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    fn bron(
        r: &mut Vec<usize>,
        p: &mut Vec<usize>,
        x: &mut Vec<usize>,
        adj: &Vec<Vec<bool>>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let pivot = p.iter().chain(x.iter()).copied().next().unwrap();
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in candidates {
            let mut p2: Vec<usize> = p.iter().copied().filter(|&u| adj[v][u]).collect();
            let mut x2: Vec<usize> = x.iter().copied().filter(|&u| adj[v][u]).collect();
            r.push(v);
            bron(r, &mut p2, &mut x2, adj, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut r = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    let mut x = Vec::new();
    bron(&mut r, &mut p, &mut x, &compatible, &mut cliques);
    cliques.sort();
    // the largest up-closed set whose closure vertices stay inside a clique
    let nsimp = complex.simplex_count();
    let mut up_vertex_masks: Vec<SimplexSet> = Vec::with_capacity(nsimp);
    for s in 0..nsimp {
        let mut mask = SimplexSet::empty(n);
        for t in complex.up_closure(s).iter() {
            for &v in complex.simplex(t) {
                mask.insert(v as usize);
            }
        }
        up_vertex_masks.push(mask);
    }
    let mut pool: Vec<SimplexSet> = Vec::new();
    let mut seen: HashSet<SimplexSet> = HashSet::new();
    for clique in cliques {
        let cmask = SimplexSet::from_indices(n, clique);
        let mut set = SimplexSet::empty(nsimp);
        for s in 0..nsimp {
            if up_vertex_masks[s].is_subset(&cmask) {
                set.insert(s);
            }
        }
        if !set.is_empty() && seen.insert(set.clone()) {
            pool.push(set);
        }
    }
    Ok(pool)
}

/// Least order of a combinatorial cover at the given subdivision level whose
/// elements all have oscillation below epsilon for every family member.
///
/// Errors when no admissible cover exists at this level, which signals that
/// the caller should subdivide further.
pub fn variation_dimension(
    family: &FunctionFamily,
    epsilon: &Rat,
    level: usize,
    budget: u64,
) -> Result<VariationResult, VariationError> {
    if epsilon <= &rat_zero() {
        return Err(VariationError::NonPositiveEpsilon);
    }
    let tower = Tower::new(family.complex(), level);
    let top = tower.top().clone();
    let lifted: Vec<PLFunction> = family.entries().map(|e| tower.lift_pl(e)).collect();
    let pool = admissible_pool(&top, &lifted, epsilon)?;
    let mut union = SimplexSet::empty(top.simplex_count());
    for s in &pool {
        union.union_with(s);
    }
    if union.len() != top.simplex_count() {
        let uncovered = (0..top.simplex_count()).find(|&s| !union.contains(s)).unwrap_or(0);
        return Err(VariationError::NoAdmissibleCover { uncovered });
    }
    let elements: Vec<OpenSet> = pool
        .iter()
        .map(|s| OpenSet::new_unchecked(top.clone(), s.clone()))
        .collect();
    let cover = Cover::new(top, elements)?;
    let search = refinement_dimension(&cover, 0, budget)?;
    Ok(VariationResult {
        value: search.value,
        exact: search.exact,
        pool_size: pool.len(),
        search,
    })
}

#[derive(Clone, Debug)]
pub struct VariationStage {
    pub stage: usize,
    pub value: Rat,
    pub exact: bool,
    pub per_block: Vec<Rat>,
}

/// Pushes a per-block family forward through the composed legs and computes
/// the normalized variation dimension per stage block.
pub fn variation_mean_dimension_sequence(
    sys: &AHSystem,
    i: usize,
    families: &[FunctionFamily],
    epsilon: &Rat,
    upto: usize,
    level: usize,
    budget: u64,
) -> Result<Vec<VariationStage>, VariationError> {
    let src = sys.blocks(i);
    if families.len() != src.len() {
        return Err(VariationError::System(crate::error::SystemError::DataMismatch));
    }
    let member_count = families.first().map(|f| f.members.len()).unwrap_or(0);
    for (l, f) in families.iter().enumerate() {
        if f.complex() != &src[l].space || f.members.len() != member_count {
            return Err(VariationError::System(crate::error::SystemError::DataMismatch));
        }
    }
    if upto < i || upto >= sys.stage_count() {
        return Err(VariationError::System(crate::error::SystemError::StageOutOfRange(upto)));
    }
    let mut out = Vec::new();
    for j in i..=upto {
        let mut per_block = Vec::new();
        let mut exact = true;
        for k in 0..sys.blocks(j).len() {
            let pushed = if j == i {
                families[k].clone()
            } else {
                let comp = compose_maps(sys, i, j).map_err(VariationError::System)?;
                let space = sys.block(j, k).map_err(VariationError::System)?.space.clone();
                let members: Vec<Vec<PLFunction>> = (0..member_count)
                    .map(|t| {
                        let mut entries = Vec::new();
                        for (l, row) in comp.legs.iter().enumerate() {
                            for leg in &row[k] {
                                for entry in &families[l].members[t] {
                                    entries.push(entry.pullback(&leg.map).expect("leg into block"));
                                }
                            }
                        }
                        entries
                    })
                    .collect();
                FunctionFamily::new(space, members)?
            };
            let r = variation_dimension(&pushed, epsilon, level, budget)?;
            exact &= r.exact;
            per_block.push(rat_ratio_u(r.value as u64, sys.size(j, k)));
        }
        let value = per_block.iter().cloned().max().expect("blocks");
        out.push(VariationStage { stage: j, value, exact, per_block });
    }
    Ok(out)
}

/// The partition family of a cover: its subordinate partition functions,
/// together with `d = ord(a)`.
///
/// Every cover admissible for this family at threshold `1/(d+1)` refines the
/// lifted cover, so the variation dimension at that threshold dominates the
/// refinement invariant.
pub fn partition_family_lower_bound(
    a: &Cover,
    level: usize,
) -> Result<(FunctionFamily, usize), VariationError> {
    let p = subordinate_partition(a, level)?;
    let members: Vec<Vec<PLFunction>> = p.functions().iter().map(|f| vec![f.clone()]).collect();
    let family = FunctionFamily::new(p.complex().clone(), members)?;
    Ok((family, ord(a)))
}
