//! Orbit capacities of positive elements and closed sets, variation of the
//! trace, and the finite-stage small-boundary probes.
//!
//! All values are exact: trace profiles are affine on simplices, so maxima
//! are attained at vertices, and closed-set hitting counts are constant on
//! open simplex interiors.

use crate::cover::Cover;
use crate::error::SystemError;
use crate::rat::{rat_ratio_u, rat_zero, Rat};
use crate::simplicial::{
    closure_and_boundary, open_star, star_neighborhood, ClosedSet, OpenSet, PLFunction,
};
use crate::system::{compose_maps, AHSystem, DiagonalMap};

/// Unnormalized trace profile of a central element of one block: the value
/// at a point x is Tr(f(x)).
#[derive(Clone, Debug)]
pub struct TraceData {
    pub stage: usize,
    pub block: usize,
    pub profile: PLFunction,
}

impl TraceData {
    pub fn validate(&self, sys: &AHSystem) -> Result<(), SystemError> {
        let b = sys.block(self.stage, self.block)?;
        if self.profile.complex() != &b.space {
            return Err(SystemError::DataMismatch);
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct StageCapacity {
    pub stage: usize,
    pub per_block: Vec<Rat>,
    pub max: Rat,
}

/// Truncated orbit-capacity data: per-(stage, block) values, the running
/// max per stage, and the last stage value as the limit estimate.
#[derive(Clone, Debug)]
pub struct CapacityReport {
    pub base_stage: usize,
    pub per_stage: Vec<StageCapacity>,
    /// True when the per-stage max sequence never increases.
    pub monotone_max: bool,
    pub limit_estimate: Rat,
}

impl CapacityReport {
    fn from_stages(base_stage: usize, per_stage: Vec<StageCapacity>) -> CapacityReport {
        let monotone_max = per_stage.windows(2).all(|w| w[1].max <= w[0].max);
        let limit_estimate = per_stage.last().map(|s| s.max.clone()).unwrap_or_else(rat_zero);
        CapacityReport { base_stage, per_stage, monotone_max, limit_estimate }
    }

    pub fn stage_max(&self, stage: usize) -> Option<&Rat> {
        self.per_stage
            .iter()
            .find(|s| s.stage == stage)
            .map(|s| &s.max)
    }
}

fn legs_into<'a>(comp: &'a DiagonalMap, l: usize, k: usize) -> &'a [crate::system::Leg] {
    &comp.legs[l][k]
}

/// Pushforward trace profile of a single-block element through the composed
/// map into block (j, k).
fn pushforward_profile(
    sys: &AHSystem,
    f: &TraceData,
    j: usize,
    k: usize,
) -> Result<PLFunction, SystemError> {
    let (i, l) = (f.stage, f.block);
    if j == i {
        if k == l {
            return Ok(f.profile.clone());
        }
        let space = sys.block(i, k)?.space.clone();
        return Ok(PLFunction::constant(space, rat_zero()));
    }
    let comp = compose_maps(sys, i, j)?;
    let space = sys.block(j, k)?.space.clone();
    let mut acc = PLFunction::constant(space, rat_zero());
    for leg in legs_into(&comp, l, k) {
        let pulled = f.profile.pullback(&leg.map)?;
        let weighted = pulled.scale(&Rat::from_integer((leg.rank() as i64).into()));
        acc = acc.add(&weighted).expect("same complex");
    }
    Ok(acc)
}

/// Orbit capacity of a positive element: per (j, k) the maximum over Dirac
/// traces of the normalized pushforward trace.
pub fn ocap_element(sys: &AHSystem, f: &TraceData, upto: usize) -> Result<CapacityReport, SystemError> {
    f.validate(sys)?;
    if let Some(v) = f.profile.values().iter().position(|v| v < &rat_zero()) {
        return Err(SystemError::NegativeTrace { vertex: v });
    }
    if upto < f.stage || upto >= sys.stage_count() {
        return Err(SystemError::StageOutOfRange(upto));
    }
    let mut per_stage = Vec::new();
    for j in f.stage..=upto {
        let mut per_block = Vec::new();
        for k in 0..sys.blocks(j).len() {
            let profile = pushforward_profile(sys, f, j, k)?;
            let n = sys.size(j, k);
            per_block.push(profile.max_value() / Rat::from_integer((n as i64).into()));
        }
        let max = per_block.iter().cloned().max().expect("blocks");
        per_stage.push(StageCapacity { stage: j, per_block, max });
    }
    Ok(CapacityReport::from_stages(f.stage, per_stage))
}

/// Orbit capacity of a closed set: per (j, k) the maximal normalized count
/// of legs landing in the set, over all simplices of the target space.
pub fn ocap_closed_set(
    sys: &AHSystem,
    i: usize,
    l: usize,
    set: &ClosedSet,
    upto: usize,
) -> Result<CapacityReport, SystemError> {
    let b = sys.block(i, l)?;
    if set.complex() != &b.space {
        return Err(SystemError::DataMismatch);
    }
    if upto < i || upto >= sys.stage_count() {
        return Err(SystemError::StageOutOfRange(upto));
    }
    let n_src = sys.size(i, l);
    let mut per_stage = Vec::new();
    for j in i..=upto {
        let mut per_block = Vec::new();
        if j == i {
            for k in 0..sys.blocks(j).len() {
                let hit = k == l && !set.is_empty();
                per_block.push(if hit {
                    rat_ratio_u(n_src, sys.size(j, k))
                } else {
                    rat_zero()
                });
            }
        } else {
            let comp = compose_maps(sys, i, j)?;
            for k in 0..sys.blocks(j).len() {
                let legs = legs_into(&comp, l, k);
                let target = &sys.block(j, k)?.space;
                let mut max_count = 0u64;
                for s in 0..target.simplex_count() {
                    let count: u64 = legs
                        .iter()
                        .filter(|leg| set.members().contains(leg.map.apply_simplex(s)))
                        .map(|leg| leg.rank())
                        .sum();
                    max_count = max_count.max(count);
                }
                per_block.push(rat_ratio_u(n_src * max_count, sys.size(j, k)));
            }
        }
        let max = per_block.iter().cloned().max().expect("blocks");
        per_stage.push(StageCapacity { stage: j, per_block, max });
    }
    Ok(CapacityReport::from_stages(i, per_stage))
}

/// Variation of the trace of a self-adjoint element given per-block profiles:
/// the largest normalized spread of any block's profile.
pub fn trace_variation(sizes: &[u64], profiles: &[PLFunction]) -> Result<Rat, SystemError> {
    if sizes.len() != profiles.len() || sizes.is_empty() {
        return Err(SystemError::DataMismatch);
    }
    let mut best = rat_zero();
    for (n, p) in sizes.iter().zip(profiles) {
        let spread = p.max_value() - p.min_value();
        let v = spread / Rat::from_integer((*n as i64).into());
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct SvtReport {
    /// First stage at which the variation drops below epsilon, if any.
    pub satisfied_by_stage: Option<usize>,
    /// Variation of the pushforward at each stage `i..=J`.
    pub values: Vec<Rat>,
}

/// Pushes per-block profiles forward stage by stage and reports the first
/// stage with trace variation below epsilon.
pub fn svt_probe(
    sys: &AHSystem,
    i: usize,
    profiles: &[PLFunction],
    upto: usize,
    epsilon: &Rat,
) -> Result<SvtReport, SystemError> {
    let src = sys.blocks(i);
    if profiles.len() != src.len() {
        return Err(SystemError::DataMismatch);
    }
    for (l, p) in profiles.iter().enumerate() {
        if p.complex() != &src[l].space {
            return Err(SystemError::DataMismatch);
        }
    }
    if upto < i || upto >= sys.stage_count() {
        return Err(SystemError::StageOutOfRange(upto));
    }
    let mut values = Vec::new();
    let mut satisfied = None;
    for j in i..=upto {
        let variation = if j == i {
            let sizes: Vec<u64> = (0..src.len()).map(|l| sys.size(i, l)).collect();
            trace_variation(&sizes, profiles)?
        } else {
            let comp = compose_maps(sys, i, j)?;
            let mut pushed = Vec::new();
            let mut sizes = Vec::new();
            for k in 0..sys.blocks(j).len() {
                let space = sys.block(j, k)?.space.clone();
                let mut acc = PLFunction::constant(space, rat_zero());
                for (l, row) in comp.legs.iter().enumerate() {
                    for leg in &row[k] {
                        let pulled = profiles[l].pullback(&leg.map)?;
                        let weighted = pulled.scale(&Rat::from_integer((leg.rank() as i64).into()));
                        acc = acc.add(&weighted).expect("same complex");
                    }
                }
                pushed.push(acc);
                sizes.push(sys.size(j, k));
            }
            trace_variation(&sizes, &pushed)?
        };
        if satisfied.is_none() && &variation < epsilon {
            satisfied = Some(j);
        }
        values.push(variation);
    }
    Ok(SvtReport { satisfied_by_stage: satisfied, values })
}

#[derive(Clone, Debug)]
pub struct SbpReport {
    /// A sub-open-set whose truncated boundary capacity is below epsilon.
    pub found: Option<OpenSet>,
    pub best_set: Option<OpenSet>,
    pub best_value: Option<Rat>,
    pub best_capacity: Option<CapacityReport>,
    pub candidates_tested: usize,
}

/// Searches star-generated open subsets `V` of `u` for one whose boundary
/// has truncated orbit capacity below epsilon.
///
/// A returned value below epsilon is a finite-stage certificate only; it
/// never proves that the limit capacity vanishes.
pub fn sbp_probe(
    sys: &AHSystem,
    i: usize,
    l: usize,
    u: &OpenSet,
    upto: usize,
    epsilon: &Rat,
    candidate_budget: u64,
) -> Result<SbpReport, SystemError> {
    let b = sys.block(i, l)?;
    if u.complex() != &b.space {
        return Err(SystemError::DataMismatch);
    }
    let space = &b.space;
    let seeds: Vec<u32> = (0..space.vertex_count())
        .filter(|&v| space.vertex_star(v).is_subset(u.members()))
        .collect();
    let mut seen = std::collections::HashSet::new();
    let mut best: Option<(Rat, OpenSet, CapacityReport)> = None;
    let mut tested = 0usize;
    let total = 1u64 << seeds.len().min(62);
    for mask in 1..total {
        if tested as u64 >= candidate_budget {
            break;
        }
        let vs: Vec<u32> = seeds
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &v)| v)
            .collect();
        let cand = open_star(space, &vs).expect("seed vertices in range");
        if !seen.insert(cand.members().clone()) {
            continue;
        }
        tested += 1;
        let (_, boundary) = closure_and_boundary(&cand);
        let report = ocap_closed_set(sys, i, l, &boundary, upto)?;
        let value = report.limit_estimate.clone();
        if best.as_ref().map_or(true, |(bv, _, _)| &value < bv) {
            best = Some((value, cand, report));
        }
    }
    let (found, best_set, best_value, best_capacity) = match best {
        Some((v, set, report)) => {
            let found = if &v < epsilon { Some(set.clone()) } else { None };
            (found, Some(set), Some(v), Some(report))
        }
        None => (None, None, None, None),
    };
    Ok(SbpReport { found, best_set, best_value, best_capacity, candidates_tested: tested })
}

#[derive(Clone, Debug)]
pub struct SbrpReport {
    /// One shrunken element per cover element (empty slots dropped from the
    /// cover but kept positionally here).
    pub refinement: Option<Vec<Option<OpenSet>>>,
    pub best_value: Option<Rat>,
    pub candidates_tested: u64,
}

/// Orbit capacity of one closed set at a single (j, k), used by the SBRP probe.
fn ocap_at(
    sys: &AHSystem,
    i: usize,
    l: usize,
    set: &ClosedSet,
    j: usize,
    k: usize,
) -> Result<Rat, SystemError> {
    let n_src = sys.size(i, l);
    if j == i {
        let hit = k == l && !set.is_empty();
        return Ok(if hit { rat_ratio_u(n_src, sys.size(j, k)) } else { rat_zero() });
    }
    let comp = compose_maps(sys, i, j)?;
    let legs = legs_into(&comp, l, k);
    let target = &sys.block(j, k)?.space;
    let mut max_count = 0u64;
    for s in 0..target.simplex_count() {
        let count: u64 = legs
            .iter()
            .filter(|leg| set.members().contains(leg.map.apply_simplex(s)))
            .map(|leg| leg.rank())
            .sum();
        max_count = max_count.max(count);
    }
    Ok(rat_ratio_u(n_src * max_count, sys.size(j, k)))
}

/// Searches one-to-one shrinkings of a cover whose fattened boundaries have
/// small orbit capacity at the given (j, k).
///
/// The closed delta-neighborhood of the paper is modeled as the radius-fold
/// simplicial star-neighborhood of the boundary subcomplex.
pub fn sbrp_probe(
    sys: &AHSystem,
    i: usize,
    l: usize,
    cover: &Cover,
    epsilon: &Rat,
    j: usize,
    k: usize,
    radius: usize,
    budget: u64,
) -> Result<SbrpReport, SystemError> {
    let b = sys.block(i, l)?;
    if cover.complex() != &b.space {
        return Err(SystemError::DataMismatch);
    }
    sys.block(j, k)?;
    if j < i {
        return Err(SystemError::BadStagePair { i: j, j: i });
    }
    let space = &b.space;
    let nsimp = space.simplex_count();
    // per element: star-unions whose closure stays inside the element
    let mut candidates: Vec<Vec<Option<OpenSet>>> = Vec::new();
    for e in cover.elements() {
        let vs: Vec<u32> = (0..space.vertex_count())
            .filter(|&v| {
                let star = open_star(space, &[v]).expect("vertex");
                let (cl, _) = closure_and_boundary(&star);
                cl.members().is_subset(e.members())
            })
            .collect();
        let mut opts: Vec<Option<OpenSet>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let total = 1u64 << vs.len().min(20);
        let mut masks: Vec<u64> = (1..total).collect();
        masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
        for mask in masks {
            let pick: Vec<u32> = vs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &v)| v)
                .collect();
            let cand = open_star(space, &pick).expect("vertices");
            if seen.insert(cand.members().clone()) {
                opts.push(Some(cand));
            }
        }
        opts.push(None);
        candidates.push(opts);
    }
    // suffix unions of the largest candidates, for covering pruning
    let mut suffix = vec![crate::bits::SimplexSet::empty(nsimp); candidates.len() + 1];
    for e in (0..candidates.len()).rev() {
        suffix[e] = suffix[e + 1].clone();
        if let Some(Some(c)) = candidates[e].first() {
            suffix[e].union_with(c.members());
        }
    }
    let mut tested = 0u64;
    let mut best: Option<(Rat, Vec<Option<OpenSet>>)> = None;
    let mut chosen: Vec<Option<OpenSet>> = Vec::new();

    fn dfs(
        sys: &AHSystem,
        i: usize,
        l: usize,
        j: usize,
        k: usize,
        radius: usize,
        epsilon: &Rat,
        candidates: &[Vec<Option<OpenSet>>],
        suffix: &[crate::bits::SimplexSet],
        chosen: &mut Vec<Option<OpenSet>>,
        covered: &crate::bits::SimplexSet,
        tested: &mut u64,
        budget: u64,
        best: &mut Option<(Rat, Vec<Option<OpenSet>>)>,
    ) -> Result<bool, SystemError> {
        let e = chosen.len();
        if e == candidates.len() {
            if covered.len() != covered.capacity() {
                return Ok(false);
            }
            *tested += 1;
            let space = covered.capacity();
            let mut fat = crate::bits::SimplexSet::empty(space);
            for v in chosen.iter().flatten() {
                let (_, bd) = closure_and_boundary(v);
                let nb = star_neighborhood(&bd, radius);
                fat.union_with(nb.members());
            }
            let set = ClosedSet::new(
                chosen.iter().flatten().next().expect("nonempty shrinking").complex().clone(),
                fat,
            )
            .expect("union of closed sets");
            let value = ocap_at(sys, i, l, &set, j, k)?;
            if best.as_ref().map_or(true, |(bv, _)| &value < bv) {
                *best = Some((value.clone(), chosen.clone()));
            }
            return Ok(&value < epsilon);
        }
        if *tested >= budget {
            return Ok(false);
        }
        // prune: the rest of the elements cannot cover what is missing
        let mut reach = covered.clone();
        reach.union_with(&suffix[e]);
        if reach.len() != reach.capacity() {
            return Ok(false);
        }
        for opt in &candidates[e] {
            let mut cov = covered.clone();
            if let Some(c) = opt {
                cov.union_with(c.members());
            }
            chosen.push(opt.clone());
            let hit = dfs(
                sys, i, l, j, k, radius, epsilon, candidates, suffix, chosen, &cov, tested,
                budget, best,
            )?;
            if hit {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    let found = dfs(
        sys,
        i,
        l,
        j,
        k,
        radius,
        epsilon,
        &candidates,
        &suffix,
        &mut chosen,
        &crate::bits::SimplexSet::empty(nsimp),
        &mut tested,
        budget,
        &mut best,
    )?;
    let refinement = if found { best.as_ref().map(|(_, c)| c.clone()) } else { None };
    Ok(SbrpReport {
        refinement,
        best_value: best.map(|(v, _)| v),
        candidates_tested: tested,
    })
}
