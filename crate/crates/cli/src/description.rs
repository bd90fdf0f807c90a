//! The system-description JSON schema and its validation into engine values.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use ahmd_core::bits::SimplexSet;
use ahmd_core::capacity::TraceData;
use ahmd_core::cover::Cover;
use ahmd_core::rat::{format_rat, parse_rat, Rat};
use ahmd_core::simplicial::{open_star, ClosedSet, Complex, OpenSet, PLFunction, SimplicialMap};
use ahmd_core::system::{build_goodearl, AHSystem, Block, DiagonalMap, Leg, ProjectionClass};
use ahmd_core::variation::FunctionFamily;

use crate::CliError;

/// A rational scalar in the file: either a JSON number or a "p/q" string.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RatValue {
    Int(i64),
    Text(String),
}

impl RatValue {
    pub fn parse(&self, at: &str) -> Result<Rat, CliError> {
        match self {
            RatValue::Int(n) => Ok(ahmd_core::rat::rat_int(*n)),
            RatValue::Text(s) => parse_rat(s)
                .ok_or_else(|| CliError::validation(format!("{at}: cannot parse rational {s:?}"))),
        }
    }
}

impl Serialize for RatValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // canonical form: always the p/q string
        match self {
            RatValue::Int(n) => s.serialize_str(&n.to_string()),
            RatValue::Text(t) => s.serialize_str(t),
        }
    }
}

fn canonical_rat(r: &Rat) -> RatValue {
    RatValue::Text(format_rat(r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodearlDef {
    pub multiplicities: Vec<u64>,
    pub point_vertices: Vec<u32>,
    pub path_resolution: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDef {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goodearl: Option<GoodearlDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDef {
    pub name: String,
    pub vertex_count: u32,
    pub maximal_simplices: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDef {
    pub complex: String,
    pub matrix_size: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageDef {
    pub blocks: Vec<BlockDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDef {
    pub label: String,
    pub rank: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegDef {
    pub source_block: usize,
    pub target_block: usize,
    /// One codomain vertex per vertex of the target block's space.
    pub vertex_image: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDef {
    pub legs: Vec<LegDef>,
    /// Alternative per-leg class assignments, in canonical leg order
    /// (source block, then target block, then file order).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alt_pairings: Vec<Vec<ProjectionDef>>,
}

/// One open set: a star of vertices, an explicit simplex list, or "all".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetDef {
    Star { star_of: Vec<u32> },
    Explicit { simplices: Vec<Vec<u32>> },
    All(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverBlockDef {
    pub elements: Vec<SetDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverDef {
    pub name: String,
    pub stage: usize,
    pub blocks: Vec<CoverBlockDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenSetDef {
    pub name: String,
    pub stage: usize,
    pub block: usize,
    #[serde(flatten)]
    pub set: SetDefHolder,
}

/// Wrapper so the set variants flatten into the object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDefHolder {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star_of: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simplices: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedSetDef {
    pub name: String,
    pub stage: usize,
    pub block: usize,
    pub simplices: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDef {
    pub name: String,
    pub stage: usize,
    pub block: usize,
    pub values: Vec<RatValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMemberDef {
    /// Per block of the stage: the member's diagonal entries, each a vertex
    /// value list.
    pub blocks: Vec<Vec<Vec<RatValue>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDef {
    pub name: String,
    pub stage: usize,
    pub members: Vec<FamilyMemberDef>,
}

/// The on-disk system description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct SystemFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub complexes: Vec<ComplexDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covers: Vec<CoverDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub open_sets: Vec<OpenSetDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub closed_sets: Vec<ClosedSetDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<TraceDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<FamilyDef>,
}

/// A fully validated description: the engine objects plus the normalized file.
pub struct SystemDescription {
    pub file: SystemFile,
    pub system: AHSystem,
    pub covers: BTreeMap<String, (usize, Vec<Cover>)>,
    pub open_sets: BTreeMap<String, (usize, usize, OpenSet)>,
    pub closed_sets: BTreeMap<String, (usize, usize, ClosedSet)>,
    pub traces: BTreeMap<String, TraceData>,
    pub families: BTreeMap<String, (usize, Vec<FunctionFamily>)>,
}

fn build_set(
    complex: &Arc<Complex>,
    def: &SetDef,
    at: &str,
) -> Result<OpenSet, CliError> {
    match def {
        SetDef::Star { star_of } => open_star(complex, star_of)
            .map_err(|e| CliError::validation(format!("{at}: {e}"))),
        SetDef::Explicit { simplices } => {
            let mut members = SimplexSet::empty(complex.simplex_count());
            for s in simplices {
                let id = complex.simplex_id(s).ok_or_else(|| {
                    CliError::validation(format!("{at}: {s:?} is not a simplex of the complex"))
                })?;
                members.insert(id);
            }
            OpenSet::new(complex.clone(), members)
                .map_err(|e| CliError::validation(format!("{at}: {e}")))
        }
        SetDef::All(tag) if tag == "all" => Ok(OpenSet::whole(complex.clone())),
        SetDef::All(tag) => Err(CliError::validation(format!(
            "{at}: unknown set literal {tag:?} (expected \"all\")"
        ))),
    }
}

fn build_values(
    complex: &Arc<Complex>,
    values: &[RatValue],
    at: &str,
) -> Result<PLFunction, CliError> {
    if values.len() != complex.vertex_count() as usize {
        return Err(CliError::validation(format!(
            "{at}: expected {} vertex values, found {}",
            complex.vertex_count(),
            values.len()
        )));
    }
    let parsed: Result<Vec<Rat>, CliError> = values
        .iter()
        .enumerate()
        .map(|(i, v)| v.parse(&format!("{at}[{i}]")))
        .collect();
    PLFunction::new(complex.clone(), parsed?)
        .map_err(|e| CliError::validation(format!("{at}: {e}")))
}

impl SystemDescription {
    pub fn load(path: &std::path::Path) -> Result<SystemDescription, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::load_str(&text)
    }

    pub fn load_str(text: &str) -> Result<SystemDescription, CliError> {
        let file: SystemFile = serde_json::from_str(text).map_err(|e| {
            CliError::validation(format!(
                "parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Self::from_file(file)
    }

    pub fn from_file(file: SystemFile) -> Result<SystemDescription, CliError> {
        let system = build_system(&file)?;
        let mut covers = BTreeMap::new();
        for (ci, def) in file.covers.iter().enumerate() {
            let at = format!("covers[{ci}] ({})", def.name);
            let stage = def.stage;
            if stage >= system.stage_count() {
                return Err(CliError::validation(format!("{at}: stage out of range")));
            }
            let blocks = system.blocks(stage);
            if def.blocks.len() != blocks.len() {
                return Err(CliError::validation(format!(
                    "{at}: expected one element list per block ({} blocks)",
                    blocks.len()
                )));
            }
            let mut per_block = Vec::new();
            for (k, cb) in def.blocks.iter().enumerate() {
                let complex = &blocks[k].space;
                let elements: Result<Vec<OpenSet>, CliError> = cb
                    .elements
                    .iter()
                    .enumerate()
                    .map(|(ei, e)| build_set(complex, e, &format!("{at}.blocks[{k}].elements[{ei}]")))
                    .collect();
                let cover = Cover::new(complex.clone(), elements?)
                    .map_err(|e| CliError::validation(format!("{at}.blocks[{k}]: {e}")))?;
                per_block.push(cover);
            }
            if covers.insert(def.name.clone(), (stage, per_block)).is_some() {
                return Err(CliError::validation(format!("{at}: duplicate cover name")));
            }
        }
        let mut open_sets = BTreeMap::new();
        for (oi, def) in file.open_sets.iter().enumerate() {
            let at = format!("open_sets[{oi}] ({})", def.name);
            let block = system
                .block(def.stage, def.block)
                .map_err(|e| CliError::validation(format!("{at}: {e}")))?;
            let set_def = match (&def.set.star_of, &def.set.simplices) {
                (Some(v), None) => SetDef::Star { star_of: v.clone() },
                (None, Some(s)) => SetDef::Explicit { simplices: s.clone() },
                _ => {
                    return Err(CliError::validation(format!(
                        "{at}: exactly one of star_of / simplices required"
                    )))
                }
            };
            let set = build_set(&block.space, &set_def, &at)?;
            open_sets.insert(def.name.clone(), (def.stage, def.block, set));
        }
        let mut closed_sets = BTreeMap::new();
        for (ci, def) in file.closed_sets.iter().enumerate() {
            let at = format!("closed_sets[{ci}] ({})", def.name);
            let block = system
                .block(def.stage, def.block)
                .map_err(|e| CliError::validation(format!("{at}: {e}")))?;
            let complex = &block.space;
            let mut members = SimplexSet::empty(complex.simplex_count());
            for s in &def.simplices {
                let id = complex.simplex_id(s).ok_or_else(|| {
                    CliError::validation(format!("{at}: {s:?} is not a simplex"))
                })?;
                members.union_with(complex.down_closure(id));
            }
            let set = ClosedSet::new(complex.clone(), members)
                .map_err(|e| CliError::validation(format!("{at}: {e}")))?;
            closed_sets.insert(def.name.clone(), (def.stage, def.block, set));
        }
        let mut traces = BTreeMap::new();
        for (ti, def) in file.traces.iter().enumerate() {
            let at = format!("traces[{ti}] ({})", def.name);
            let block = system
                .block(def.stage, def.block)
                .map_err(|e| CliError::validation(format!("{at}: {e}")))?;
            let profile = build_values(&block.space, &def.values, &at)?;
            traces.insert(
                def.name.clone(),
                TraceData { stage: def.stage, block: def.block, profile },
            );
        }
        let mut families = BTreeMap::new();
        for (fi, def) in file.families.iter().enumerate() {
            let at = format!("families[{fi}] ({})", def.name);
            if def.stage >= system.stage_count() {
                return Err(CliError::validation(format!("{at}: stage out of range")));
            }
            let blocks = system.blocks(def.stage);
            let mut per_block_members: Vec<Vec<Vec<PLFunction>>> =
                vec![Vec::new(); blocks.len()];
            for (mi, member) in def.members.iter().enumerate() {
                if member.blocks.len() != blocks.len() {
                    return Err(CliError::validation(format!(
                        "{at}.members[{mi}]: expected entries for {} blocks",
                        blocks.len()
                    )));
                }
                for (k, entries) in member.blocks.iter().enumerate() {
                    let mut built = Vec::new();
                    for (ei, vals) in entries.iter().enumerate() {
                        built.push(build_values(
                            &blocks[k].space,
                            vals,
                            &format!("{at}.members[{mi}].blocks[{k}][{ei}]"),
                        )?);
                    }
                    per_block_members[k].push(built);
                }
            }
            let built: Result<Vec<FunctionFamily>, CliError> = per_block_members
                .into_iter()
                .enumerate()
                .map(|(k, members)| {
                    FunctionFamily::new(blocks[k].space.clone(), members)
                        .map_err(|e| CliError::validation(format!("{at}: {e}")))
                })
                .collect();
            families.insert(def.name.clone(), (def.stage, built?));
        }
        Ok(SystemDescription {
            file,
            system,
            covers,
            open_sets,
            closed_sets,
            traces,
            families,
        })
    }

    /// Canonical JSON rendering of the description.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.file).expect("serializable file") + "\n"
    }
}

fn build_system(file: &SystemFile) -> Result<AHSystem, CliError> {
    if let Some(generator) = &file.generator {
        if !file.stages.is_empty() || !file.maps.is_empty() || !file.complexes.is_empty() {
            return Err(CliError::validation(
                "generator and explicit stages/maps/complexes are mutually exclusive".into(),
            ));
        }
        let g = generator.goodearl.as_ref().ok_or_else(|| {
            CliError::validation("generator: only the goodearl generator is available".into())
        })?;
        return build_goodearl(&g.multiplicities, &g.point_vertices, g.path_resolution)
            .map_err(|e| CliError::validation(format!("generator.goodearl: {e}")));
    }
    if file.stages.is_empty() {
        return Err(CliError::validation(
            "description needs either a generator or explicit stages".into(),
        ));
    }
    let mut complexes: BTreeMap<String, Arc<Complex>> = BTreeMap::new();
    for (ci, def) in file.complexes.iter().enumerate() {
        let built = Complex::from_maximal(def.vertex_count, &def.maximal_simplices)
            .map_err(|e| CliError::validation(format!("complexes[{ci}] ({}): {e}", def.name)))?;
        if complexes.insert(def.name.clone(), built).is_some() {
            return Err(CliError::validation(format!(
                "complexes[{ci}]: duplicate name {}",
                def.name
            )));
        }
    }
    let mut stages: Vec<Vec<Block>> = Vec::new();
    for (si, stage) in file.stages.iter().enumerate() {
        let mut blocks = Vec::new();
        for (bi, b) in stage.blocks.iter().enumerate() {
            let space = complexes.get(&b.complex).ok_or_else(|| {
                CliError::validation(format!(
                    "stages[{si}].blocks[{bi}]: unknown complex {:?}",
                    b.complex
                ))
            })?;
            blocks.push(Block { space: space.clone(), matrix_size: b.matrix_size });
        }
        stages.push(blocks);
    }
    let mut maps = Vec::new();
    for (mi, def) in file.maps.iter().enumerate() {
        let at = format!("maps[{mi}]");
        if mi + 1 >= stages.len() {
            return Err(CliError::validation(format!("{at}: more maps than stage gaps")));
        }
        let (src, tgt) = (&stages[mi], &stages[mi + 1]);
        let mut legs: Vec<Vec<Vec<Leg>>> = vec![vec![Vec::new(); tgt.len()]; src.len()];
        for (li, leg) in def.legs.iter().enumerate() {
            let lat = format!("{at}.legs[{li}]");
            if leg.source_block >= src.len() || leg.target_block >= tgt.len() {
                return Err(CliError::validation(format!("{lat}: block index out of range")));
            }
            let map = SimplicialMap::new(
                tgt[leg.target_block].space.clone(),
                src[leg.source_block].space.clone(),
                leg.vertex_image.clone(),
            )
            .map_err(|e| CliError::validation(format!("{lat}: {e}")))?;
            let class = leg.projection.as_ref().map(|p| ProjectionClass {
                label: p.label.clone(),
                rank: p.rank,
            });
            legs[leg.source_block][leg.target_block].push(Leg { map, class });
        }
        let total: usize = legs.iter().flatten().map(|l| l.len()).sum();
        let alt_pairings: Vec<Vec<ProjectionClass>> = def
            .alt_pairings
            .iter()
            .enumerate()
            .map(|(pi, pairing)| {
                if pairing.len() != total {
                    return Err(CliError::validation(format!(
                        "{at}.alt_pairings[{pi}]: expected {total} classes (one per leg)"
                    )));
                }
                Ok(pairing
                    .iter()
                    .map(|p| ProjectionClass { label: p.label.clone(), rank: p.rank })
                    .collect())
            })
            .collect::<Result<_, _>>()?;
        maps.push(DiagonalMap { legs, alt_pairings });
    }
    AHSystem::new(stages, maps).map_err(|e| CliError::validation(format!("system: {e}")))
}

/// Canonical file form of an engine rational, used by report serialization.
pub fn rat_value(r: &Rat) -> RatValue {
    canonical_rat(r)
}
