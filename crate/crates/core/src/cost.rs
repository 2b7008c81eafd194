//! The polytopic complexity cost of a chord passage.
//!
//! Each vertex of a passage laid onto a polytope costs 0 or 1 units: the
//! primer always costs 1, an under-primer costs 1 unless it repeats the
//! primer, and any other vertex costs 1 unless one of its valid antecedents
//! implies it (the relation from the primer to the antecedent equals the
//! relation from the pivot to the vertex). A vertex that fails implication is
//! a contrast, and each of its successors keeps only the contrast and its
//! pivot as valid antecedents; an implied vertex never narrows anything.
//!
//! Relations all carry one unit of information, so only identity/non-identity
//! matters to the cost.

use serde::Serialize;

use crate::chord::Chord;
use crate::error::Error;
use crate::relations::{RelationSystem, SystemKind};
use crate::shapes::{PolytopeShape, ShapeCatalog, VertexGraph, DIM_LIMIT};

/// Cost model parameters. The per-relation information quantity is fixed at
/// one unit and is not configurable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostConfig {
    pub system: SystemKind,
    /// p_a, added once for an addition or a deletion and twice for both.
    pub alteration_penalty: f64,
    /// p_r, weighting the distance of the segment size from the target.
    pub regularity_penalty: f64,
    /// Preferred segment size in beats.
    pub target_size: usize,
}

impl CostConfig {
    pub fn new(system: SystemKind, alteration_penalty: f64, regularity_penalty: f64) -> Self {
        CostConfig {
            system,
            alteration_penalty,
            regularity_penalty,
            target_size: 32,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.alteration_penalty >= 0.0 && self.alteration_penalty.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alteration penalty must be a non-negative real, got {}",
                self.alteration_penalty
            )));
        }
        if !(self.regularity_penalty >= 0.0 && self.regularity_penalty.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "regularity penalty must be a non-negative real, got {}",
                self.regularity_penalty
            )));
        }
        if self.target_size == 0 {
            return Err(Error::InvalidConfig("target size must be positive".into()));
        }
        Ok(())
    }
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig::new(SystemKind::TriadCircle, 3.0, 0.1)
    }
}

/// Per-vertex costs of one passage on one shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub shape: PolytopeShape,
    /// 0/1 cost per chronological vertex; the primer entry is 1.
    pub per_vertex: Vec<u8>,
    /// True where implication failed and a contrast had to be encoded.
    pub contrastive: Vec<bool>,
    /// f_a actually charged for this shape (0 until passage-level costing).
    pub alteration_penalty: f64,
}

impl CostBreakdown {
    pub fn raw_cost(&self) -> u32 {
        self.per_vertex.iter().map(|&c| c as u32).sum()
    }

    pub fn penalized_cost(&self) -> f64 {
        self.raw_cost() as f64 + self.alteration_penalty
    }
}

/// Cost of a 4-chord passage on the square: one unit for the primer, one per
/// under-primer that differs from it, and one more unless the relation
/// between the first pair equals the relation between the second pair.
pub fn square_cost(passage: &[Chord], system: &RelationSystem) -> Result<CostBreakdown, Error> {
    if passage.len() != 4 {
        return Err(Error::LengthMismatch {
            expected: 4,
            got: passage.len(),
        });
    }
    let idx: Vec<u8> = passage.iter().map(|c| c.index()).collect();
    let contrast =
        system.between_idx(idx[0], idx[1]) != system.between_idx(idx[2], idx[3]);
    Ok(CostBreakdown {
        shape: PolytopeShape::regular(2),
        per_vertex: vec![
            1,
            (idx[1] != idx[0]) as u8,
            (idx[2] != idx[0]) as u8,
            contrast as u8,
        ],
        contrastive: vec![false, false, false, contrast],
        alteration_penalty: 0.0,
    })
}

/// Cost of a passage on an arbitrary vertex graph, processing vertices in
/// chronological order and propagating valid antecedents through contrasts.
pub fn polytope_cost(
    passage: &[Chord],
    graph: &VertexGraph,
    system: &RelationSystem,
) -> Result<CostBreakdown, Error> {
    let m = graph.vertex_count();
    if passage.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: passage.len(),
        });
    }
    debug_assert!(m <= 128, "vertex graphs fit in a u128 mask");
    let idx: Vec<u8> = passage.iter().map(|c| c.index()).collect();
    let mut per_vertex = vec![0u8; m];
    let mut contrastive = vec![false; m];
    per_vertex[0] = 1;
    let mut valid: Vec<u128> = graph
        .vertices()
        .iter()
        .map(|v| {
            v.antecedents
                .iter()
                .fold(0u128, |mask, e| mask | (1 << e.vertex))
        })
        .collect();
    for i in 1..m {
        let vertex = &graph.vertices()[i];
        if vertex.under_primer {
            per_vertex[i] = (idx[i] != idx[0]) as u8;
            continue;
        }
        let implied = vertex.antecedents.iter().any(|e| {
            valid[i] & (1 << e.vertex) != 0
                && system.between_idx(idx[0], idx[e.vertex])
                    == system.between_idx(idx[e.pivot], idx[i])
        });
        if !implied {
            per_vertex[i] = 1;
            contrastive[i] = true;
            for e in &vertex.successors {
                valid[e.vertex] &= (1 << i) | (1 << e.pivot);
            }
        }
    }
    Ok(CostBreakdown {
        shape: *graph.shape(),
        per_vertex,
        contrastive,
        alteration_penalty: 0.0,
    })
}

/// Best penalized cost of a passage over every shape of its size.
#[derive(Debug, Clone)]
pub struct PassageCost {
    /// min over shapes of raw cost + f_a; infinite when no shape exists.
    pub cost: f64,
    pub breakdown: Option<CostBreakdown>,
}

/// Relation system, cost parameters and compiled shape cache bundled for
/// repeated passage costing. Immutable and shareable across threads.
pub struct Engine {
    config: CostConfig,
    system: RelationSystem,
    catalog: ShapeCatalog,
}

impl Engine {
    pub fn new(config: CostConfig, max_passage: usize) -> Result<Self, Error> {
        config.validate()?;
        let system = RelationSystem::new(config.system);
        // no shape carries more than 2^6 + 2^4 vertices
        let catalog = ShapeCatalog::new(max_passage.min(80), DIM_LIMIT);
        Ok(Engine {
            config,
            system,
            catalog,
        })
    }

    pub fn config(&self) -> &CostConfig {
        &self.config
    }

    pub fn system(&self) -> &RelationSystem {
        &self.system
    }

    pub fn catalog(&self) -> &ShapeCatalog {
        &self.catalog
    }

    /// Minimum of raw cost + f_a over all shapes of the passage size, ties
    /// resolved by enumeration order. Sizes with no shape cost infinity.
    pub fn passage_cost(&self, passage: &[Chord]) -> PassageCost {
        let mut best: Option<(f64, CostBreakdown)> = None;
        for compiled in self.catalog.for_size(passage.len()) {
            let mut breakdown = polytope_cost(passage, &compiled.graph, &self.system)
                .expect("catalog sizes match the passage");
            breakdown.alteration_penalty =
                compiled.shape.alteration_units() as f64 * self.config.alteration_penalty;
            let total = breakdown.penalized_cost();
            if best.as_ref().is_none_or(|(c, _)| total < *c) {
                best = Some((total, breakdown));
            }
        }
        match best {
            Some((cost, breakdown)) => PassageCost {
                cost,
                breakdown: Some(breakdown),
            },
            None => PassageCost {
                cost: f64::INFINITY,
                breakdown: None,
            },
        }
    }

    /// Passage cost plus the size-regularity penalty f_r.
    pub fn segment_cost(&self, passage: &[Chord]) -> f64 {
        let off_target = passage.len().abs_diff(self.config.target_size);
        self.passage_cost(passage).cost + self.config.regularity_penalty * off_target as f64
    }
}
