//! Polytope shapes and their compiled vertex graphs.
//!
//! A shape is an n-dimensional hypercube with at most one added face and at
//! most one deleted face. A face is the sub-cube whose coordinates equal 1 on
//! every dimension outside a chosen set of free dimensions, so it always
//! contains the last vertex. Deleting a face removes its vertices; adding a
//! face attaches one new vertex to each of its surviving vertices (deletion
//! is preferred over addition on a shared vertex).
//!
//! The text form mirrors the nested-list notation: `[[1,1],[1,1]]` is a
//! square, a missing `1` is a deletion, and `(1,1)` marks a vertex carrying
//! an added element.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Hard upper bound on the base dimension (80 vertices at most, so valid
/// antecedent sets fit in a u128 mask).
pub const DIM_LIMIT: u8 = 6;

/// A set of free dimensions identifying an alteration face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DimSet(u8);

impl DimSet {
    pub const EMPTY: DimSet = DimSet(0);

    pub fn from_dims(dims: &[u8]) -> Self {
        let mut mask = 0u8;
        for &d in dims {
            assert!(d < 8);
            mask |= 1 << d;
        }
        DimSet(mask)
    }

    fn from_mask(mask: u8) -> Self {
        DimSet(mask)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, dim: u8) -> bool {
        self.0 & (1 << dim) != 0
    }

    pub fn dims(self) -> impl Iterator<Item = u8> {
        (0..8).filter(move |d| self.0 & (1 << d) != 0)
    }

    fn is_subset_of(self, other: DimSet) -> bool {
        self.0 & !other.0 == 0
    }
}

impl Ord for DimSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // lexicographic on the ascending dimension list
        self.dims().cmp(other.dims())
    }
}

impl PartialOrd for DimSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DimSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, d) in self.dims().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}}")
    }
}

/// A base n-hypercube plus at most one addition face and one deletion face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolytopeShape {
    dim: u8,
    addition: Option<DimSet>,
    deletion: Option<DimSet>,
}

impl PolytopeShape {
    pub fn regular(dim: u8) -> Self {
        PolytopeShape::new(dim, None, None).expect("regular shapes are always valid")
    }

    /// Validates the face constraints. A non-empty free set needs
    /// `|set| <= n-2`; the empty set (a single-vertex face) is accepted on
    /// any base of dimension >= 1 so that every nested-list form from the
    /// text notation stays constructible. An addition whose face lies
    /// entirely inside the deletion face is dropped.
    pub fn new(
        dim: u8,
        addition: Option<DimSet>,
        deletion: Option<DimSet>,
    ) -> Result<Self, Error> {
        if dim > DIM_LIMIT {
            return Err(Error::InvalidShape(format!(
                "dimension {dim} exceeds the limit {DIM_LIMIT}"
            )));
        }
        let check = |set: Option<DimSet>, what: &str| -> Result<(), Error> {
            let Some(set) = set else { return Ok(()) };
            if dim == 0 {
                return Err(Error::InvalidShape(format!(
                    "{what} face on a single-vertex polytope"
                )));
            }
            if set.mask() & !low_mask(dim) != 0 {
                return Err(Error::InvalidShape(format!(
                    "{what} face {set} uses dimensions outside 0..{dim}"
                )));
            }
            if !set.is_empty() && set.len() as i32 > dim as i32 - 2 {
                return Err(Error::InvalidShape(format!(
                    "{what} face {set} has dimension {} on a {dim}-polytope (needs <= {})",
                    set.len(),
                    dim as i32 - 2,
                )));
            }
            Ok(())
        };
        check(addition, "addition")?;
        check(deletion, "deletion")?;
        let mut addition = addition;
        if let (Some(add), Some(del)) = (addition, deletion) {
            if add.is_subset_of(del) {
                // deletion preferred over addition: every attachment is gone
                addition = None;
            }
        }
        Ok(PolytopeShape {
            dim,
            addition,
            deletion,
        })
    }

    pub fn dim(self) -> u8 {
        self.dim
    }

    pub fn addition(self) -> Option<DimSet> {
        self.addition
    }

    pub fn deletion(self) -> Option<DimSet> {
        self.deletion
    }

    pub fn is_regular(self) -> bool {
        self.addition.is_none() && self.deletion.is_none()
    }

    /// Number of alteration faces (0, 1 or 2); drives the f_a penalty.
    pub fn alteration_units(self) -> u8 {
        self.addition.is_some() as u8 + self.deletion.is_some() as u8
    }

    pub fn vertex_count(self) -> usize {
        let base = 1usize << self.dim;
        let deleted = self.deletion.map_or(0, |d| 1usize << d.len());
        let added = match self.addition {
            None => 0,
            Some(a) => {
                let swallowed = self
                    .deletion
                    .map_or(0, |d| 1usize << DimSet(a.mask() & d.mask()).len());
                (1usize << a.len()) - swallowed
            }
        };
        base - deleted + added
    }

    fn deleted(self, coords: u8) -> bool {
        self.deletion
            .is_some_and(|d| in_face(coords, d, self.dim))
    }

    fn attaches(self, coords: u8) -> bool {
        self.addition.is_some_and(|a| in_face(coords, a, self.dim)) && !self.deleted(coords)
    }

    /// Nested-list text form; also the canonical deduplication key.
    pub fn nested_representation(self) -> String {
        fn node(shape: PolytopeShape, level: u8, prefix: u8) -> Option<String> {
            if level == 0 {
                if shape.deleted(prefix) {
                    None
                } else if shape.attaches(prefix) {
                    Some("(1,1)".to_string())
                } else {
                    Some("1".to_string())
                }
            } else {
                let bit = level - 1;
                let lo = node(shape, bit, prefix);
                let hi = node(shape, bit, prefix | (1 << bit));
                debug_assert!(
                    !(lo.is_none() && hi.is_some()),
                    "deleted faces contain the last vertex"
                );
                let children: Vec<String> = [lo, hi].into_iter().flatten().collect();
                if children.is_empty() {
                    None
                } else {
                    Some(format!("[{}]", children.join(",")))
                }
            }
        }
        node(self, self.dim, 0).expect("the primer always survives")
    }

    /// Parse the nested-list text form.
    pub fn parse_nested(text: &str) -> Result<Self, Error> {
        parse_nested_impl(text)
    }
}

impl fmt::Display for PolytopeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.nested_representation())
    }
}

impl Serialize for PolytopeShape {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.nested_representation())
    }
}

impl<'de> Deserialize<'de> for PolytopeShape {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        PolytopeShape::parse_nested(&text).map_err(serde::de::Error::custom)
    }
}

fn low_mask(dim: u8) -> u8 {
    ((1u16 << dim) - 1) as u8
}

/// Coordinates equal 1 on every dimension outside the free set.
fn in_face(coords: u8, free: DimSet, dim: u8) -> bool {
    coords | free.mask() == low_mask(dim)
}

// ---------------------------------------------------------------------------
// nested-list parsing

enum Node {
    Leaf,
    AddedLeaf,
    List(Vec<Node>),
}

fn parse_nested_impl(text: &str) -> Result<PolytopeShape, Error> {
    let fail = |reason: &str| Error::ShapeParse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let node = parse_node(bytes, &mut pos).map_err(|r| fail(&r))?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(fail("trailing characters"));
    }
    let dim = node_depth(&node).map_err(|r| fail(&r))?;
    if dim > DIM_LIMIT {
        return Err(fail(&format!("dimension {dim} exceeds the limit {DIM_LIMIT}")));
    }
    let mut present: Vec<u8> = Vec::new();
    let mut attachments: Vec<u8> = Vec::new();
    collect_leaves(&node, dim, 0, &mut present, &mut attachments);
    if !present.contains(&0) {
        return Err(fail("the first vertex is missing"));
    }

    let full: Vec<u8> = (0..1u16 << dim).map(|c| c as u8).collect();
    let deleted: Vec<u8> = full
        .iter()
        .copied()
        .filter(|c| !present.contains(c))
        .collect();
    let deletion = if deleted.is_empty() {
        None
    } else {
        let and = deleted.iter().fold(low_mask(dim), |m, &c| m & c);
        let free = DimSet::from_mask(!and & low_mask(dim));
        if deleted.len() != 1usize << free.len() {
            return Err(fail("deleted vertices do not form a face"));
        }
        Some(free)
    };

    let addition = if attachments.is_empty() {
        None
    } else {
        let mut options: Vec<DimSet> = (0..1u16 << dim)
            .map(|m| DimSet::from_mask(m as u8))
            .collect();
        options.sort_by_key(|s| (s.len(), *s));
        options
            .into_iter()
            .find(|&s| {
                let mut face: Vec<u8> = full
                    .iter()
                    .copied()
                    .filter(|&c| in_face(c, s, dim) && !deleted.contains(&c))
                    .collect();
                face.sort_unstable();
                let mut want = attachments.clone();
                want.sort_unstable();
                face == want
            })
            .map(Some)
            .ok_or_else(|| fail("added vertices do not form a face"))?
    };

    let shape = PolytopeShape::new(dim, addition, deletion)
        .map_err(|e| fail(&e.to_string()))?;
    Ok(shape)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn expect(bytes: &[u8], pos: &mut usize, what: u8) -> Result<(), String> {
    skip_ws(bytes, pos);
    if bytes.get(*pos) == Some(&what) {
        *pos += 1;
        Ok(())
    } else {
        Err(format!("expected {:?} at offset {}", what as char, pos))
    }
}

fn parse_node(bytes: &[u8], pos: &mut usize) -> Result<Node, String> {
    skip_ws(bytes, pos);
    match bytes.get(*pos) {
        Some(b'1') => {
            *pos += 1;
            Ok(Node::Leaf)
        }
        Some(b'(') => {
            *pos += 1;
            expect(bytes, pos, b'1')?;
            expect(bytes, pos, b',')?;
            expect(bytes, pos, b'1')?;
            expect(bytes, pos, b')')?;
            Ok(Node::AddedLeaf)
        }
        Some(b'[') => {
            *pos += 1;
            let mut children = Vec::new();
            loop {
                children.push(parse_node(bytes, pos)?);
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    Some(b',') => *pos += 1,
                    Some(b']') => {
                        *pos += 1;
                        break;
                    }
                    _ => return Err(format!("expected ',' or ']' at offset {pos}")),
                }
            }
            Ok(Node::List(children))
        }
        _ => Err(format!("expected '1', '(' or '[' at offset {pos}")),
    }
}

fn node_depth(node: &Node) -> Result<u8, String> {
    match node {
        Node::Leaf | Node::AddedLeaf => Ok(0),
        Node::List(children) => {
            if children.is_empty() || children.len() > 2 {
                return Err("lists carry one or two entries".to_string());
            }
            let depths: Vec<u8> = children
                .iter()
                .map(node_depth)
                .collect::<Result<_, _>>()?;
            if depths.windows(2).any(|w| w[0] != w[1]) {
                return Err("uneven nesting depth".to_string());
            }
            Ok(depths[0] + 1)
        }
    }
}

fn collect_leaves(node: &Node, level: u8, prefix: u8, present: &mut Vec<u8>, added: &mut Vec<u8>) {
    match node {
        Node::Leaf => present.push(prefix),
        Node::AddedLeaf => {
            present.push(prefix);
            added.push(prefix);
        }
        Node::List(children) => {
            let bit = level - 1;
            collect_leaves(&children[0], bit, prefix, present, added);
            if let Some(second) = children.get(1) {
                collect_leaves(second, bit, prefix | (1 << bit), present, added);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// enumeration

/// All shapes with the given vertex count, base dimension at most
/// `dim_limit`, and alteration faces of dimension at most n-2. Deduplicated
/// by the nested representation; ordered by base dimension, then deletion
/// face, then addition face (lexicographic).
pub fn enumerate_shapes_bounded(size: usize, dim_limit: u8) -> Vec<PolytopeShape> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for shape in all_shapes(dim_limit) {
        if shape.vertex_count() == size && seen.insert(shape.nested_representation()) {
            out.push(shape);
        }
    }
    out
}

/// `enumerate_shapes_bounded` with the default dimension limit.
pub fn enumerate_shapes(size: usize) -> Vec<PolytopeShape> {
    enumerate_shapes_bounded(size, DIM_LIMIT)
}

fn alteration_options(dim: u8) -> Vec<Option<DimSet>> {
    let mut options = vec![None];
    if dim >= 2 {
        let limit = (dim - 2) as u32;
        let mut sets: Vec<DimSet> = (0..1u16 << dim)
            .map(|m| DimSet::from_mask(m as u8))
            .filter(|s| s.len() <= limit)
            .collect();
        sets.sort();
        options.extend(sets.into_iter().map(Some));
    }
    options
}

fn all_shapes(dim_limit: u8) -> impl Iterator<Item = PolytopeShape> {
    (0..=dim_limit.min(DIM_LIMIT)).flat_map(|n| {
        alteration_options(n).into_iter().flat_map(move |del| {
            alteration_options(n).into_iter().map(move |add| {
                PolytopeShape::new(n, add, del).expect("enumerated faces are valid")
            })
        })
    })
}

// ---------------------------------------------------------------------------
// vertex graphs

/// Oriented edge endpoint paired with the pivot used for the implication
/// test along this edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertex: usize,
    pub pivot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Base { coords: u8 },
    Added { attachment: u8, attached_to: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexInfo {
    pub kind: VertexKind,
    /// Antecedents in chronological order; `pivot` is the pivot of this
    /// vertex relative to that antecedent.
    pub antecedents: Vec<Edge>,
    /// Successors in chronological order; `pivot` is the pivot of the
    /// successor relative to this vertex.
    pub successors: Vec<Edge>,
    /// True iff the primer is the only antecedent.
    pub under_primer: bool,
}

/// A shape compiled to chronological vertices with antecedent, successor and
/// pivot structure. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexGraph {
    shape: PolytopeShape,
    vertices: Vec<VertexInfo>,
}

impl VertexGraph {
    pub fn shape(&self) -> &PolytopeShape {
        &self.shape
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[VertexInfo] {
        &self.vertices
    }
}

/// Compile a shape: base vertices in coordinate order (dimension k weighs
/// 2^k), deleted vertices skipped, added vertices right after their
/// attachment.
pub fn build_vertex_graph(shape: &PolytopeShape) -> VertexGraph {
    let shape = *shape;
    let n = shape.dim();
    let total = 1usize << n;
    let mut kinds: Vec<VertexKind> = Vec::new();
    let mut base_pos = vec![usize::MAX; total];
    let mut added_pos = vec![usize::MAX; total];
    for c in 0..total {
        let coords = c as u8;
        if shape.deleted(coords) {
            continue;
        }
        base_pos[c] = kinds.len();
        kinds.push(VertexKind::Base { coords });
        if shape.attaches(coords) {
            added_pos[c] = kinds.len();
            kinds.push(VertexKind::Added {
                attachment: coords,
                attached_to: base_pos[c],
            });
        }
    }

    let mut vertices: Vec<VertexInfo> = kinds
        .iter()
        .map(|&kind| {
            let mut antecedents = Vec::new();
            match kind {
                VertexKind::Base { coords } => {
                    for k in 0..n {
                        if coords & (1 << k) == 0 {
                            continue;
                        }
                        let origin = base_pos[(coords & !(1 << k)) as usize];
                        let pivot = base_pos[1usize << k];
                        debug_assert!(origin != usize::MAX && pivot != usize::MAX);
                        antecedents.push(Edge {
                            vertex: origin,
                            pivot,
                        });
                    }
                }
                VertexKind::Added {
                    attachment,
                    attached_to,
                } => {
                    // the attachment is an antecedent; its pivot is the primer
                    antecedents.push(Edge {
                        vertex: attached_to,
                        pivot: 0,
                    });
                    let free = shape.addition().expect("added vertex implies a face");
                    for k in free.dims() {
                        if attachment & (1 << k) == 0 {
                            continue;
                        }
                        let other = (attachment & !(1 << k)) as usize;
                        let origin = added_pos[other];
                        let pivot = base_pos[1usize << k];
                        debug_assert!(origin != usize::MAX && pivot != usize::MAX);
                        antecedents.push(Edge {
                            vertex: origin,
                            pivot,
                        });
                    }
                }
            }
            antecedents.sort_by_key(|e| e.vertex);
            let under_primer = antecedents.len() == 1 && antecedents[0].vertex == 0;
            VertexInfo {
                kind,
                antecedents,
                successors: Vec::new(),
                under_primer,
            }
        })
        .collect();

    for i in 0..vertices.len() {
        let edges = vertices[i].antecedents.clone();
        for edge in edges {
            vertices[edge.vertex].successors.push(Edge {
                vertex: i,
                pivot: edge.pivot,
            });
        }
    }

    VertexGraph { shape, vertices }
}

// ---------------------------------------------------------------------------
// shape catalog

/// A shape together with its compiled graph.
pub struct CompiledShape {
    pub shape: PolytopeShape,
    pub graph: VertexGraph,
}

/// Per-size cache of compiled shapes, built once and shared read-only.
pub struct ShapeCatalog {
    max_size: usize,
    by_size: Vec<Vec<CompiledShape>>,
}

impl ShapeCatalog {
    pub fn new(max_size: usize, dim_limit: u8) -> Self {
        let mut by_size: Vec<Vec<CompiledShape>> = (0..=max_size).map(|_| Vec::new()).collect();
        let mut seen = HashSet::new();
        for shape in all_shapes(dim_limit) {
            let size = shape.vertex_count();
            if size <= max_size && seen.insert(shape.nested_representation()) {
                let graph = build_vertex_graph(&shape);
                debug_assert_eq!(graph.vertex_count(), size);
                by_size[size].push(CompiledShape { shape, graph });
            }
        }
        ShapeCatalog { max_size, by_size }
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// Compiled shapes of the given vertex count, enumeration order.
    pub fn for_size(&self, size: usize) -> &[CompiledShape] {
        self.by_size
            .get(size)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}
