//! Deterministic random generators and brute-force oracles used by the
//! property and acceptance suites. Everything here is test support; the
//! oracles are deliberately naive and independent of the engine's search
//! paths.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ahmd_core::bits::SimplexSet;
use ahmd_core::cover::Cover;
use ahmd_core::simplicial::{open_star, Complex, OpenSet, PLFunction, SimplicialMap, Tower};
use ahmd_core::system::{AHSystem, Block, DiagonalMap, Leg};
use ahmd_core::rat::{rat, Rat};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small connected base complexes of dimension at most 2: paths, cycles,
/// the filled triangle, and a triangle with a whisker.
pub fn random_base(rng: &mut ChaCha8Rng) -> Arc<Complex> {
    match rng.gen_range(0..6) {
        0 => Complex::path(rng.gen_range(2..=4)),
        1 => Complex::path(rng.gen_range(4..=5)),
        2 => Complex::cycle(3),
        3 => Complex::cycle(rng.gen_range(4..=5)),
        4 => Complex::full_simplex(3),
        _ => Complex::from_maximal(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap(),
    }
}

/// One-dimensional connected bases only: paths and cycles.
pub fn random_base_1d(rng: &mut ChaCha8Rng) -> Arc<Complex> {
    match rng.gen_range(0..3) {
        0 => Complex::path(rng.gen_range(2..=4)),
        1 => Complex::path(5),
        _ => Complex::cycle(rng.gen_range(3..=5)),
    }
}

/// A random nonempty up-closed set: the union of a few up-closures.
pub fn random_open_set(rng: &mut ChaCha8Rng, complex: &Arc<Complex>) -> OpenSet {
    let n = complex.simplex_count();
    let seeds = rng.gen_range(1..=3.min(n));
    let mut members = SimplexSet::empty(n);
    for _ in 0..seeds {
        let s = rng.gen_range(0..n);
        members.union_with(complex.up_closure(s));
    }
    OpenSet::new(complex.clone(), members).expect("union of up-closures")
}

/// A random cover with at most `max_elements` elements; uncovered simplices
/// are patched into a random element.
pub fn random_cover(rng: &mut ChaCha8Rng, complex: &Arc<Complex>, max_elements: usize) -> Cover {
    let n = complex.simplex_count();
    let count = rng.gen_range(1..=max_elements.max(1));
    let mut sets: Vec<SimplexSet> = (0..count)
        .map(|_| random_open_set(rng, complex).members().clone())
        .collect();
    let mut union = SimplexSet::empty(n);
    for s in &sets {
        union.union_with(s);
    }
    for s in 0..n {
        if !union.contains(s) {
            let idx = rng.gen_range(0..sets.len());
            sets[idx].union_with(complex.up_closure(s));
            union.union_with(complex.up_closure(s));
        }
    }
    let elements = sets
        .into_iter()
        .map(|m| OpenSet::new(complex.clone(), m).expect("up-closed"))
        .collect();
    Cover::new(complex.clone(), elements).expect("covering by construction")
}

/// A random simplicial map between two complexes: identity (when possible),
/// a constant map, or a collapse onto a random simplex of the codomain.
pub fn random_map(
    rng: &mut ChaCha8Rng,
    domain: &Arc<Complex>,
    codomain: &Arc<Complex>,
) -> SimplicialMap {
    let same = domain == codomain;
    loop {
        match rng.gen_range(0..4) {
            0 if same => return SimplicialMap::identity(domain.clone()),
            1 => {
                let v = rng.gen_range(0..codomain.vertex_count());
                return SimplicialMap::constant(domain.clone(), codomain.clone(), v)
                    .expect("vertex in range");
            }
            _ => {
                // map every domain vertex into the vertex set of one codomain
                // simplex; subsets of a simplex are simplices, so this is
                // always simplicial
                let s = rng.gen_range(0..codomain.simplex_count());
                let verts = codomain.simplex(s).to_vec();
                let image: Vec<u32> = (0..domain.vertex_count())
                    .map(|_| verts[rng.gen_range(0..verts.len())])
                    .collect();
                if let Ok(m) = SimplicialMap::new(domain.clone(), codomain.clone(), image) {
                    return m;
                }
            }
        }
    }
}

/// A random PL profile with small rational vertex values.
pub fn random_profile(rng: &mut ChaCha8Rng, complex: &Arc<Complex>, max_num: i64) -> PLFunction {
    let values: Vec<Rat> = (0..complex.vertex_count())
        .map(|_| rat(rng.gen_range(0..=max_num), rng.gen_range(1..=3)))
        .collect();
    PLFunction::new(complex.clone(), values).expect("one value per vertex")
}

/// Configuration for random diagonal systems.
pub struct SystemShape {
    pub stages: usize,
    pub max_blocks: usize,
    pub max_legs: usize,
}

/// A random diagonal AH system over small 2-dimensional bases.
///
/// Matrix sizes are derived from the leg counts, so unitality always holds.
pub fn random_system(rng: &mut ChaCha8Rng, shape: &SystemShape) -> AHSystem {
    random_system_over(rng, shape, random_base)
}

/// A random diagonal system over path and cycle bases only; deep subdivision
/// stays cheap on these.
pub fn random_system_1d(rng: &mut ChaCha8Rng, shape: &SystemShape) -> AHSystem {
    random_system_over(rng, shape, random_base_1d)
}

fn random_system_over(
    rng: &mut ChaCha8Rng,
    shape: &SystemShape,
    base: fn(&mut ChaCha8Rng) -> Arc<Complex>,
) -> AHSystem {
    let stages = shape.stages.max(1);
    let mut spaces: Vec<Vec<Arc<Complex>>> = Vec::new();
    for _ in 0..stages {
        let blocks = rng.gen_range(1..=shape.max_blocks.max(1));
        spaces.push((0..blocks).map(|_| base(rng)).collect());
    }
    let mut sizes: Vec<Vec<u64>> = vec![spaces[0].iter().map(|_| 1u64).collect()];
    let mut maps = Vec::new();
    for i in 1..stages {
        let (src, tgt) = (&spaces[i - 1], &spaces[i]);
        let mut legs: Vec<Vec<Vec<Leg>>> = vec![vec![Vec::new(); tgt.len()]; src.len()];
        for (k, tspace) in tgt.iter().enumerate() {
            // at least one leg into every target block
            let total = rng.gen_range(1..=shape.max_legs.max(1));
            for t in 0..total {
                let l = if t == 0 {
                    rng.gen_range(0..src.len())
                } else {
                    rng.gen_range(0..src.len())
                };
                legs[l][k].push(Leg {
                    map: random_map(rng, tspace, &src[l]),
                    class: None,
                });
            }
        }
        let tsizes: Vec<u64> = (0..tgt.len())
            .map(|k| {
                (0..src.len())
                    .map(|l| legs[l][k].len() as u64 * sizes[i - 1][l])
                    .sum()
            })
            .collect();
        sizes.push(tsizes);
        maps.push(DiagonalMap { legs, alt_pairings: Vec::new() });
    }
    let stage_blocks: Vec<Vec<Block>> = spaces
        .iter()
        .zip(&sizes)
        .map(|(sp, sz)| {
            sp.iter()
                .zip(sz)
                .map(|(space, &n)| Block { space: space.clone(), matrix_size: n })
                .collect()
        })
        .collect();
    AHSystem::new(stage_blocks, maps).expect("unital by construction")
}

/// Re-labels every leg of a system with one shared rank-1 projection class.
pub fn with_common_label(sys: &AHSystem, label: &str) -> AHSystem {
    let stages: Vec<Vec<Block>> = (0..sys.stage_count()).map(|i| sys.blocks(i).to_vec()).collect();
    let maps: Vec<DiagonalMap> = sys
        .maps()
        .iter()
        .map(|m| DiagonalMap {
            legs: m
                .legs
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|legs| {
                            legs.iter()
                                .map(|leg| Leg {
                                    map: leg.map.clone(),
                                    class: Some(ahmd_core::system::ProjectionClass {
                                        label: label.to_string(),
                                        rank: 1,
                                    }),
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            alt_pairings: Vec::new(),
        })
        .collect();
    AHSystem::new(stages, maps).expect("same shape")
}

/// Per-block star covers of a stage (a convenient canonical choice).
pub fn stage_star_covers(sys: &AHSystem, stage: usize) -> Vec<Cover> {
    sys.blocks(stage)
        .iter()
        .map(|b| Cover::stars(b.space.clone()))
        .collect()
}

/// Per-block random covers of a stage.
pub fn stage_random_covers(
    rng: &mut ChaCha8Rng,
    sys: &AHSystem,
    stage: usize,
    max_elements: usize,
) -> Vec<Cover> {
    sys.blocks(stage)
        .iter()
        .map(|b| random_cover(rng, &b.space, max_elements))
        .collect()
}

/// Brute-force order: per-simplex membership counting.
pub fn ord_oracle(a: &Cover) -> usize {
    let mut max = 0usize;
    for s in 0..a.complex().simplex_count() {
        let m = a.elements().iter().filter(|e| e.contains(s)).count();
        max = max.max(m);
    }
    max - 1
}

/// All up-closed subsets of an up-closed set, the empty set included.
pub fn up_closed_subsets(complex: &Arc<Complex>, of: &SimplexSet) -> Vec<SimplexSet> {
    let members: Vec<usize> = of.iter().collect();
    let n = complex.simplex_count();
    let mut out = Vec::new();
    for mask in 0u64..(1 << members.len()) {
        let set = SimplexSet::from_indices(
            n,
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
            out.push(set);
        }
    }
    out
}

/// Naive refinement oracle at a subdivision level: enumerate every tuple of
/// up-closed subsets of the lifted elements and minimize the order over
/// covering tuples.
pub fn refinement_oracle(a: &Cover, level: usize) -> usize {
    let tower = Tower::new(a.complex(), level);
    let top = tower.top().clone();
    let n = top.simplex_count();
    let per_element: Vec<Vec<SimplexSet>> = a
        .elements()
        .iter()
        .map(|e| up_closed_subsets(&top, &tower.lift_open(e.members())))
        .collect();
    let mut best = usize::MAX;
    let mut choice = vec![0usize; per_element.len()];
    loop {
        let mut union = SimplexSet::empty(n);
        let mut counts = vec![0usize; n];
        for (e, &c) in choice.iter().enumerate() {
            union.union_with(&per_element[e][c]);
            for s in per_element[e][c].iter() {
                counts[s] += 1;
            }
        }
        if union.len() == n {
            let o = counts.iter().max().copied().unwrap_or(1) - 1;
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

/// All distinct nonempty up-closed sets of a complex (for exhaustive cover
/// enumeration on tiny instances).
pub fn all_open_sets(complex: &Arc<Complex>) -> Vec<SimplexSet> {
    let whole = SimplexSet::full(complex.simplex_count());
    up_closed_subsets(complex, &whole)
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect()
}

/// Goodearl star cover helper: the stars of a path complex.
pub fn path_stars(complex: &Arc<Complex>) -> Cover {
    Cover::new(
        complex.clone(),
        (0..complex.vertex_count())
            .map(|v| open_star(complex, &[v]).unwrap())
            .collect(),
    )
    .unwrap()
}
