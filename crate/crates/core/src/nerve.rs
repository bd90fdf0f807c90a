//! The constructive local-approximation machinery: subordinate partitions of
//! unity, the approximation operator sending f to sum phi_U * f(x_U), the
//! nerve complex of a cover, and the barycentric-coordinate map into it.

use std::sync::Arc;

use crate::bits::SimplexSet;
use crate::cover::{ord, Cover};
use crate::error::NerveError;
use crate::rat::{rat_one, rat_zero, Rat};
use crate::simplicial::{Complex, OpenSet, PLFunction, Tower};

/// A partition of unity subordinate to a cover lifted to a subdivision level.
///
/// Each subdivision vertex adopts a witness element whose lift contains the
/// vertex star; the function of an element is the sum of the barycentric
/// coordinates of its adopted vertices. The functions sum to one everywhere
/// and each is supported inside its element.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    base: Arc<Complex>,
    level: usize,
    complex: Arc<Complex>,
    lifted_cover: Vec<OpenSet>,
    functions: Vec<PLFunction>,
    witnesses: Vec<usize>,
    anchors: Vec<Option<u32>>,
}

impl PartitionOfUnity {
    pub fn base(&self) -> &Arc<Complex> {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// The subdivided complex the functions live on.
    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn lifted_cover(&self) -> &[OpenSet] {
        &self.lifted_cover
    }

    pub fn functions(&self) -> &[PLFunction] {
        &self.functions
    }

    /// Witness element index of each subdivision vertex.
    pub fn witnesses(&self) -> &[usize] {
        &self.witnesses
    }

    /// Chosen anchor vertex of each element (None when the element carries
    /// the zero function).
    pub fn anchors(&self) -> &[Option<u32>] {
        &self.anchors
    }

    /// Largest oscillation of `f` over any element of the lifted cover.
    pub fn max_oscillation(&self, f: &PLFunction) -> Result<Rat, NerveError> {
        if f.complex() != &self.complex {
            return Err(NerveError::ComplexMismatch);
        }
        Ok(self
            .lifted_cover
            .iter()
            .map(|e| f.oscillation_on(e.members()))
            .max()
            .unwrap_or_else(rat_zero))
    }
}

/// Builds the subordinate partition of unity for a cover at a subdivision
/// level.
///
/// Fails when some vertex star fits in no lifted element; from level 1 on
/// this never happens, because the star of a barycenter vertex is contained
/// in the lift of any element containing its simplex.
pub fn subordinate_partition(a: &Cover, level: usize) -> Result<PartitionOfUnity, NerveError> {
    let tower = Tower::new(a.complex(), level);
    let top = tower.top().clone();
    let lifted: Vec<OpenSet> = a
        .elements()
        .iter()
        .map(|e| OpenSet::new_unchecked(top.clone(), tower.lift_open(e.members())))
        .collect();
    let mut witnesses = Vec::with_capacity(top.vertex_count() as usize);
    for v in 0..top.vertex_count() {
        let star = top.vertex_star(v);
        let w = lifted
            .iter()
            .position(|e| star.is_subset(e.members()))
            .ok_or(NerveError::LevelTooSmall { level, vertex: v as usize })?;
        witnesses.push(w);
    }
    let functions: Vec<PLFunction> = (0..a.len())
        .map(|e| {
            let values: Vec<Rat> = (0..top.vertex_count())
                .map(|v| if witnesses[v as usize] == e { rat_one() } else { rat_zero() })
                .collect();
            PLFunction::new(top.clone(), values).expect("one value per vertex")
        })
        .collect();
    let anchors: Vec<Option<u32>> = lifted
        .iter()
        .map(|e| (0..top.vertex_count()).find(|&v| top.vertex_star(v).is_subset(e.members())))
        .collect();
    Ok(PartitionOfUnity {
        base: a.complex().clone(),
        level,
        complex: top,
        lifted_cover: lifted,
        functions,
        witnesses,
        anchors,
    })
}

/// The approximation operator: `theta(f) = sum_U phi_U * f(x_U)`.
///
/// Its sup-distance from `f` is at most the largest oscillation of `f` over
/// a cover element.
pub fn theta(p: &PartitionOfUnity, f: &PLFunction) -> Result<PLFunction, NerveError> {
    if f.complex() != p.complex() {
        return Err(NerveError::ComplexMismatch);
    }
    let mut acc = PLFunction::constant(p.complex().clone(), rat_zero());
    for (e, phi) in p.functions.iter().enumerate() {
        if let Some(x) = p.anchors[e] {
            let scaled = phi.scale(f.value(x));
            acc = acc.add(&scaled).expect("same complex");
        }
    }
    Ok(acc)
}

/// The nerve of a cover: one vertex per element, a simplex for each
/// subfamily sharing a simplex of the base complex.
#[derive(Clone, Debug)]
pub struct NerveComplex {
    pub nerve: Arc<Complex>,
    /// Always equals `ord` of the cover.
    pub dimension: usize,
}

pub fn nerve(a: &Cover) -> NerveComplex {
    let m = a.len();
    let mut maximal: Vec<Vec<u32>> = Vec::new();
    for s in 0..a.complex().simplex_count() {
        let family: Vec<u32> = a
            .elements()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains(s))
            .map(|(i, _)| i as u32)
            .collect();
        if !family.is_empty() {
            maximal.push(family);
        }
    }
    let nerve = Complex::from_maximal(m as u32, &maximal).expect("cover elements are nonempty");
    let dimension = nerve.dimension();
    debug_assert_eq!(dimension, ord(a));
    NerveComplex { nerve, dimension }
}

/// Barycentric coordinates of each subdivision vertex on the nerve:
/// `xi(v) = (phi_U(v))_U`.
pub fn nerve_map(p: &PartitionOfUnity) -> Vec<Vec<Rat>> {
    let n = p.complex().vertex_count();
    (0..n)
        .map(|v| p.functions.iter().map(|phi| phi.value(v).clone()).collect())
        .collect()
}

/// Evaluates the affine extension of the anchor values at one coordinate
/// vector on the nerve: `breve(f)(xi) = sum_U xi_U * f(x_U)`.
pub fn breve_value(p: &PartitionOfUnity, f: &PLFunction, coords: &[Rat]) -> Result<Rat, NerveError> {
    if f.complex() != p.complex() || coords.len() != p.functions.len() {
        return Err(NerveError::ComplexMismatch);
    }
    let mut acc = rat_zero();
    for (e, c) in coords.iter().enumerate() {
        if c != &rat_zero() {
            let x = p.anchors[e].ok_or(NerveError::ComplexMismatch)?;
            acc += c * f.value(x);
        }
    }
    Ok(acc)
}

/// Checks that a coordinate vector is supported on a simplex of the nerve.
pub fn coords_span_nerve_simplex(nv: &NerveComplex, coords: &[Rat]) -> bool {
    let support: Vec<u32> = coords
        .iter()
        .enumerate()
        .filter(|(_, c)| *c != &rat_zero())
        .map(|(i, _)| i as u32)
        .collect();
    !support.is_empty() && nv.nerve.simplex_id(&support).is_some()
}

/// Sum-to-one and subordination, re-verified after construction.
pub fn verify_partition(p: &PartitionOfUnity) -> Result<(), NerveError> {
    let top = p.complex();
    for v in 0..top.vertex_count() {
        let sum: Rat = p.functions.iter().map(|phi| phi.value(v).clone()).sum();
        if sum != rat_one() {
            return Err(NerveError::ComplexMismatch);
        }
    }
    for (e, phi) in p.functions.iter().enumerate() {
        for v in 0..top.vertex_count() {
            if phi.value(v) > &rat_zero() {
                let star = top.vertex_star(v);
                if !star.is_subset(p.lifted_cover[e].members()) {
                    return Err(NerveError::ComplexMismatch);
                }
            }
        }
    }
    for (e, anchor) in p.anchors.iter().enumerate() {
        if let Some(x) = anchor {
            let zero = SimplexSet::from_indices(
                top.simplex_count(),
                [top.vertex_simplex(*x)],
            );
            if !zero.is_subset(p.lifted_cover[e].members()) {
                return Err(NerveError::ComplexMismatch);
            }
        }
    }
    Ok(())
}
