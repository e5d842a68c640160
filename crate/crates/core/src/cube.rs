//! Cube edges: which saddle a 0→1 flip performs, and the linear map it
//! induces between the tensor products attached to the two resolutions.
//!
//! A circle carries `V = span{v+, v-}`, an arc carries `W = span{w}`. Basis
//! vectors of a resolution are indexed by an integer whose bits give the
//! circle labels (1 = `v-`), the first circle in the most significant bit, so
//! that ascending indices list the labelings lexicographically with `v+`
//! before `v-`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::codec::{FreeComponents, TangleDiagram};
use crate::resolution::{resolve, ComponentKind, ResolutionError, ResolvedDiagram, SmoothingState};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("states {from} and {to} are not joined by a cube edge")]
    NotAdjacent { from: String, to: String },
    #[error("edge {from} -> {to}: component change {detail} is not one of the five saddle types")]
    UnrecognizedTransition { from: String, to: String, detail: String },
    #[error("generator lives over state {got}, but the edge starts at {expected}")]
    StateMismatch { expected: String, got: String },
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    VPlus,
    VMinus,
    W,
}

impl Factor {
    pub fn theta(self) -> i64 {
        match self {
            Factor::VPlus => 1,
            Factor::VMinus | Factor::W => -1,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::VPlus => "v_+",
            Factor::VMinus => "v_-",
            Factor::W => "w",
        })
    }
}

/// Component kinds of one resolution, followed by the free circles and arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub kinds: Vec<ComponentKind>,
    pub free: FreeComponents,
    // bit index of each labeled component's circle factor
    circle_bit: Vec<Option<u32>>,
    circles: usize,
}

impl Layout {
    pub fn new(resolved: &ResolvedDiagram, free: FreeComponents) -> Self {
        let kinds: Vec<ComponentKind> = resolved.components.iter().map(|c| c.kind).collect();
        let circles = resolved.circles + free.circles;
        let mut next = 0usize;
        let circle_bit = kinds
            .iter()
            .map(|k| {
                (*k == ComponentKind::Circle).then(|| {
                    next += 1;
                    (circles - next) as u32
                })
            })
            .collect();
        Layout { kinds, free, circle_bit, circles }
    }

    /// Circles, labeled and free.
    pub fn circles(&self) -> usize {
        self.circles
    }

    /// Arcs, labeled and free.
    pub fn arcs(&self) -> usize {
        self.kinds.len() - (self.circles - self.free.circles) + self.free.arcs
    }

    pub fn dimension(&self) -> usize {
        1 << self.circles
    }

    /// Bit of the `i`-th free circle.
    fn free_circle_bit(&self, i: usize) -> u32 {
        (self.free.circles - 1 - i) as u32
    }

    pub fn labeling(&self, index: usize) -> Vec<Factor> {
        let circle = |bit: u32| if index >> bit & 1 == 1 { Factor::VMinus } else { Factor::VPlus };
        let mut out: Vec<Factor> = self.circle_bit.iter().map(|b| b.map_or(Factor::W, circle)).collect();
        out.extend((0..self.free.circles).map(|i| circle(self.free_circle_bit(i))));
        out.extend(std::iter::repeat(Factor::W).take(self.free.arcs));
        out
    }

    pub fn index(&self, labeling: &[Factor]) -> Option<usize> {
        if labeling.len() != self.kinds.len() + self.free.circles + self.free.arcs {
            return None;
        }
        let mut idx = 0usize;
        let (labeled, rest) = labeling.split_at(self.kinds.len());
        let (free_circles, free_arcs) = rest.split_at(self.free.circles);
        for (factor, bit) in labeled.iter().zip(&self.circle_bit) {
            match (factor, bit) {
                (Factor::W, None) | (Factor::VPlus, Some(_)) => {}
                (Factor::VMinus, Some(b)) => idx |= 1 << b,
                _ => return None,
            }
        }
        for (i, factor) in free_circles.iter().enumerate() {
            match factor {
                Factor::VPlus => {}
                Factor::VMinus => idx |= 1 << self.free_circle_bit(i),
                Factor::W => return None,
            }
        }
        free_arcs.iter().all(|f| *f == Factor::W).then_some(idx)
    }

    /// θ of the basis vector with this index.
    pub fn theta(&self, index: usize) -> i64 {
        self.circles as i64 - 2 * index.count_ones() as i64 - self.arcs() as i64
    }
}

/// A basis vector: one factor per component of the resolution at `state`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub state: SmoothingState,
    pub labeling: Vec<Factor>,
}

impl Generator {
    pub fn theta(&self) -> i64 {
        self.labeling.iter().map(|f| f.theta()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransitionType {
    MergeCircles,
    SplitCircle,
    SaddleArcs,
    SplitArcCircle,
    MergeArcCircle,
}

impl TransitionType {
    pub fn tag(self) -> &'static str {
        match self {
            TransitionType::MergeCircles => "merge_circles",
            TransitionType::SplitCircle => "split_circle",
            TransitionType::SaddleArcs => "saddle_arcs",
            TransitionType::SplitArcCircle => "split_arc_circle",
            TransitionType::MergeArcCircle => "merge_arc_circle",
        }
    }
}

/// Report name; the arc-arc saddle prints as `saddle`.
impl fmt::Display for TransitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionType::SaddleArcs => f.write_str("saddle"),
            other => f.write_str(other.tag()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeTransition {
    pub from: SmoothingState,
    pub to: SmoothingState,
    pub crossing: usize,
    pub kind: TransitionType,
    /// Component indices touched by the saddle, in the source and the target.
    pub affected_source: Vec<usize>,
    pub affected_target: Vec<usize>,
    pub sign: i64,
    pub source_layout: Layout,
    pub target_layout: Layout,
    carry: Vec<(u32, u32)>,
    source_bits: Vec<u32>,
    target_bits: Vec<u32>,
}

impl EdgeTransition {
    /// Images of a source basis index; every coefficient is 1.
    pub fn apply_index(&self, index: usize) -> Vec<usize> {
        let mut base = 0usize;
        for &(s, t) in &self.carry {
            base |= (index >> s & 1) << t;
        }
        let src = |i: usize| index >> self.source_bits[i] & 1;
        let tgt = |i: usize| 1usize << self.target_bits[i];
        match self.kind {
            TransitionType::SaddleArcs => vec![],
            TransitionType::MergeCircles => match src(0) + src(1) {
                0 => vec![base],
                1 => vec![base | tgt(0)],
                _ => vec![],
            },
            TransitionType::SplitCircle => {
                if src(0) == 0 {
                    vec![base | tgt(1), base | tgt(0)]
                } else {
                    vec![base | tgt(0) | tgt(1)]
                }
            }
            TransitionType::SplitArcCircle => vec![base | tgt(0)],
            TransitionType::MergeArcCircle => {
                if src(0) == 0 {
                    vec![base]
                } else {
                    vec![]
                }
            }
        }
    }
}

/// Classifies the edge `from -> to` of the diagram's cube.
pub fn classify_transition(
    diagram: &TangleDiagram,
    from: SmoothingState,
    to: SmoothingState,
) -> Result<EdgeTransition, CubeError> {
    let adjacent = from.len() == to.len()
        && (to.mask() ^ from.mask()).count_ones() == 1
        && to.mask() & !from.mask() != 0;
    if !adjacent {
        return Err(CubeError::NotAdjacent { from: from.to_string(), to: to.to_string() });
    }
    let source = resolve(diagram, from)?;
    let target = resolve(diagram, to)?;
    classify_resolved(diagram, &source, &target)
}

/// As [`classify_transition`], for resolutions already computed.
pub fn classify_resolved(
    diagram: &TangleDiagram,
    source: &ResolvedDiagram,
    target: &ResolvedDiagram,
) -> Result<EdgeTransition, CubeError> {
    let (from, to) = (source.state, target.state);
    let flipped = to.mask() ^ from.mask();
    if from.len() != to.len() || flipped.count_ones() != 1 || to.mask() & flipped == 0 {
        return Err(CubeError::NotAdjacent { from: from.to_string(), to: to.to_string() });
    }
    let j = flipped.trailing_zeros() as usize;
    let touched = diagram.crossing_label_ids(j);
    let affected_source: Vec<usize> =
        touched.iter().map(|&l| source.component_of[l]).collect::<BTreeSet<_>>().into_iter().collect();
    let affected_target: Vec<usize> =
        touched.iter().map(|&l| target.component_of[l]).collect::<BTreeSet<_>>().into_iter().collect();

    use ComponentKind::{Arc, Circle};
    let kinds = |r: &ResolvedDiagram, idx: &[usize]| {
        let mut k: Vec<ComponentKind> = idx.iter().map(|&i| r.components[i].kind).collect();
        k.sort();
        k
    };
    let (ks, kt) = (kinds(source, &affected_source), kinds(target, &affected_target));
    let kind = match (ks.as_slice(), kt.as_slice()) {
        ([Circle, Circle], [Circle]) => TransitionType::MergeCircles,
        ([Circle], [Circle, Circle]) => TransitionType::SplitCircle,
        ([Arc, Arc], [Arc, Arc]) => TransitionType::SaddleArcs,
        ([Arc], [Circle, Arc]) => TransitionType::SplitArcCircle,
        ([Circle, Arc], [Arc]) => TransitionType::MergeArcCircle,
        _ => {
            return Err(CubeError::UnrecognizedTransition {
                from: from.to_string(),
                to: to.to_string(),
                detail: format!("{ks:?} -> {kt:?}"),
            })
        }
    };

    let free = diagram.free();
    let source_layout = Layout::new(source, free);
    let target_layout = Layout::new(target, free);
    let mut carry = Vec::new();
    for (i, c) in source.components.iter().enumerate() {
        if affected_source.contains(&i) {
            continue;
        }
        let t = target.component_of[c.labels[0]];
        if target.components[t] != *c {
            return Err(CubeError::UnrecognizedTransition {
                from: from.to_string(),
                to: to.to_string(),
                detail: format!("component {i} changed away from the saddle"),
            });
        }
        if let (Some(sb), Some(tb)) = (source_layout.circle_bit[i], target_layout.circle_bit[t]) {
            carry.push((sb, tb));
        }
    }
    for i in 0..free.circles {
        carry.push((source_layout.free_circle_bit(i), target_layout.free_circle_bit(i)));
    }
    let source_bits = affected_source.iter().filter_map(|&i| source_layout.circle_bit[i]).collect();
    let target_bits = affected_target.iter().filter_map(|&i| target_layout.circle_bit[i]).collect();

    Ok(EdgeTransition {
        from,
        to,
        crossing: j,
        kind,
        affected_source,
        affected_target,
        sign: from.edge_sign(j),
        source_layout,
        target_layout,
        carry,
        source_bits,
        target_bits,
    })
}

/// The unsigned local map of `edge` applied to `g`, in the target's
/// canonical component order.
pub fn local_map(edge: &EdgeTransition, g: &Generator) -> Result<Vec<(Generator, i64)>, CubeError> {
    let index = edge
        .source_layout
        .index(&g.labeling)
        .filter(|_| g.state == edge.from)
        .ok_or_else(|| CubeError::StateMismatch { expected: edge.from.to_string(), got: g.state.to_string() })?;
    Ok(edge
        .apply_index(index)
        .into_iter()
        .map(|t| (Generator { state: edge.to, labeling: edge.target_layout.labeling(t) }, 1))
        .collect())
}

fn describe_components(diagram: &TangleDiagram, r: &ResolvedDiagram) -> Vec<String> {
    let mut out: Vec<String> = r
        .components
        .iter()
        .map(|c| {
            let reps: Vec<String> = c.labels.iter().map(|&l| format!("'{}'", diagram.label_text(l))).collect();
            format!("[{}]", reps.join(","))
        })
        .collect();
    let free = diagram.free();
    out.extend((1..=free.circles).map(|i| format!("[free circle {i}]")));
    out.extend((1..=free.arcs).map(|i| format!("[free arc {i}]")));
    out
}

fn describe_generator(names: &[String], labeling: &[Factor]) -> String {
    labeling.iter().zip(names).map(|(f, n)| format!("{f}({n})")).collect::<Vec<_>>().join(" ⊗ ")
}

/// Lists the edge's type, both resolutions and the coefficient of every
/// (source basis vector, target basis vector) pair.
pub fn local_map_report(diagram: &TangleDiagram, from: SmoothingState, to: SmoothingState) -> Result<String, CubeError> {
    let edge = classify_transition(diagram, from, to)?;
    let source = resolve(diagram, from)?;
    let target = resolve(diagram, to)?;
    let (src_names, tgt_names) = (describe_components(diagram, &source), describe_components(diagram, &target));
    let kinds = |layout: &Layout| -> Vec<String> {
        layout
            .kinds
            .iter()
            .map(|k| k.to_string())
            .chain(std::iter::repeat("circle".to_string()).take(layout.free.circles))
            .chain(std::iter::repeat("arc".to_string()).take(layout.free.arcs))
            .collect()
    };
    let mut out = format!("Transition Type: {}\n\nPre-State Elements:\n", edge.kind);
    for (k, n) in kinds(&edge.source_layout).iter().zip(&src_names) {
        out.push_str(&format!("  - Type: {k}, Representative: {n}\n"));
    }
    out.push_str("\nPost-State Elements:\n");
    for (k, n) in kinds(&edge.target_layout).iter().zip(&tgt_names) {
        out.push_str(&format!("  - Type: {k}, Representative: {n}\n"));
    }
    out.push_str("\nCalculated Coefficients:\n");
    for s in 0..edge.source_layout.dimension() {
        let images = edge.apply_index(s);
        let src = describe_generator(&src_names, &edge.source_layout.labeling(s));
        for t in 0..edge.target_layout.dimension() {
            let coefficient = images.iter().filter(|&&i| i == t).count();
            let tgt = describe_generator(&tgt_names, &edge.target_layout.labeling(t));
            out.push_str(&format!("  {src} → {tgt} : Coefficient = {coefficient}\n"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_pd_code;
    use proptest::prelude::*;

    const EXAMPLE: &str = r#"[["3","10|","4","9"],["|1","8","2","|7"],["9","4","8","5"],["2","5","3","6|"]]"#;
    const TRITANGLE: &str = r#"[["2","5","3","6"],["4","|1","5","2"],["6","3","7|","4"]]"#;

    fn diagram(text: &str) -> TangleDiagram {
        parse_pd_code(text).unwrap().diagram
    }

    fn st(s: &str) -> SmoothingState {
        SmoothingState::parse(s).unwrap()
    }

    fn edge(d: &TangleDiagram, a: &str, b: &str) -> EdgeTransition {
        classify_transition(d, st(a), st(b)).unwrap()
    }

    #[test]
    fn five_types_appear() {
        let kink_split = diagram(r#"[["1","1","2","2"]]"#);
        assert_eq!(edge(&kink_split, "0", "1").kind, TransitionType::SplitCircle);
        let kink_merge = diagram(r#"[["1","2","2","1"]]"#);
        assert_eq!(edge(&kink_merge, "0", "1").kind, TransitionType::MergeCircles);
        let t = diagram(TRITANGLE);
        assert_eq!(edge(&t, "000", "100").kind, TransitionType::MergeArcCircle);
        assert_eq!(edge(&t, "100", "110").kind, TransitionType::SplitArcCircle);
        let crossing = diagram(r#"[["|1","|2","|3","|4"]]"#);
        assert_eq!(edge(&crossing, "0", "1").kind, TransitionType::SaddleArcs);
    }

    #[test]
    fn non_adjacent_states() {
        let d = diagram(EXAMPLE);
        for (a, b) in [("0000", "0000"), ("0000", "0011"), ("0001", "0000"), ("0000", "000")] {
            assert!(matches!(classify_transition(&d, st(a), st(b)), Err(CubeError::NotAdjacent { .. })));
        }
    }

    #[test]
    fn map_tables() {
        let split = edge(&diagram(r#"[["1","1","2","2"]]"#), "0", "1");
        assert_eq!(split.apply_index(0), vec![0b01, 0b10]);
        assert_eq!(split.apply_index(1), vec![0b11]);
        let merge = edge(&diagram(r#"[["1","2","2","1"]]"#), "0", "1");
        assert_eq!(merge.apply_index(0b00), vec![0]);
        assert_eq!(merge.apply_index(0b01), vec![1]);
        assert_eq!(merge.apply_index(0b10), vec![1]);
        assert!(merge.apply_index(0b11).is_empty());
    }

    #[test]
    fn generator_level_maps() {
        let split = edge(&diagram(r#"[["1","1","2","2"]]"#), "0", "1");
        let g = Generator { state: st("0"), labeling: vec![Factor::VPlus] };
        let image: Vec<Vec<Factor>> = local_map(&split, &g).unwrap().into_iter().map(|(g, c)| {
            assert_eq!(c, 1);
            g.labeling
        }).collect();
        assert_eq!(image, vec![vec![Factor::VPlus, Factor::VMinus], vec![Factor::VMinus, Factor::VPlus]]);

        let t = diagram(TRITANGLE);
        let e = edge(&t, "100", "110");
        let g = Generator { state: st("100"), labeling: vec![Factor::W] };
        let out = local_map(&e, &g).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0.labeling.iter().filter(|f| **f == Factor::VMinus).count(), 1);

        let wrong = Generator { state: st("000"), labeling: vec![Factor::W] };
        assert!(matches!(local_map(&e, &wrong), Err(CubeError::StateMismatch { .. })));
    }

    #[test]
    fn untouched_factors_pass_through() {
        // the circle {3,5,9} sits away from crossing 1 in both resolutions
        let d = diagram(EXAMPLE);
        let e = edge(&d, "0000", "0100");
        assert_eq!(e.kind, TransitionType::SaddleArcs);
        let e = edge(&d, "1011", "1111");
        assert_eq!(e.kind, TransitionType::MergeArcCircle);
        for s in 0..e.source_layout.dimension() {
            for t in e.apply_index(s) {
                let src = e.source_layout.labeling(s);
                let tgt = e.target_layout.labeling(t);
                assert_eq!(src.iter().filter(|f| **f == Factor::VMinus).count(), tgt.iter().filter(|f| **f == Factor::VMinus).count());
            }
        }
    }

    #[test]
    fn layout_round_trip() {
        let d = parse_pd_code(r#"{"pd":[["3","10|","4","9"],["|1","8","2","|7"],["9","4","8","5"],["2","5","3","6|"]],"free":{"circles":2,"arcs":1}}"#)
            .unwrap()
            .diagram;
        let r = resolve(&d, st("0000")).unwrap();
        let layout = Layout::new(&r, d.free());
        assert_eq!(layout.circles(), 3);
        assert_eq!(layout.arcs(), 3);
        for i in 0..layout.dimension() {
            let lab = layout.labeling(i);
            assert_eq!(layout.index(&lab), Some(i));
            assert_eq!(layout.theta(i), Generator { state: r.state, labeling: lab }.theta());
        }
        // most significant bit is the first circle
        assert_eq!(layout.labeling(0b100)[2], Factor::VMinus);
    }

    #[test]
    fn report_layout() {
        let t = diagram(TRITANGLE);
        let text = local_map_report(&t, st("100"), st("110")).unwrap();
        assert!(text.starts_with("Transition Type: split_arc_circle\n\nPre-State Elements:\n  - Type: arc"));
        assert_eq!(text.matches("Coefficient = 1").count(), 1);
        assert_eq!(text.matches("Coefficient = 0").count(), 1);
        let c = diagram(r#"[["|1","|2","|3","|4"]]"#);
        let text = local_map_report(&c, st("0"), st("1")).unwrap();
        assert!(text.starts_with("Transition Type: saddle\n"));
        assert!(text.contains("w(['|1','|4']) ⊗ w(['|2','|3']) → w(['|1','|2']) ⊗ w(['|3','|4']) : Coefficient = 0"));
    }

    fn all_edges(d: &TangleDiagram) -> Vec<EdgeTransition> {
        let n = d.crossing_count();
        let mut out = Vec::new();
        for mask in 0..(1u64 << n) {
            for j in 0..n {
                if mask >> j & 1 == 0 {
                    out.push(classify_transition(d, SmoothingState::new(mask, n), SmoothingState::new(mask | 1 << j, n)).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn theta_drops_by_one() {
        for text in [EXAMPLE, TRITANGLE, r#"[["1","1","2","2"]]"#, r#"[["1","2","2","1"]]"#] {
            for e in all_edges(&diagram(text)) {
                for s in 0..e.source_layout.dimension() {
                    for t in e.apply_index(s) {
                        assert_eq!(e.target_layout.theta(t), e.source_layout.theta(s) - 1);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn square_faces_anticommute(mask in 0u64..64, (i, j) in (0usize..5).prop_flat_map(|i| (Just(i), i + 1..6))) {
            let mask = mask & !(1 << i) & !(1 << j);
            let s = SmoothingState::new(mask, 6);
            let si = s.with_bit(i, true);
            let sj = s.with_bit(j, true);
            prop_assert_eq!(s.edge_sign(i) * si.edge_sign(j), -(s.edge_sign(j) * sj.edge_sign(i)));
        }
    }
}
