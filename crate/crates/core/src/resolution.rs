//! Smoothing states and the resolved diagrams they produce.

use std::fmt;

use thiserror::Error;

use crate::codec::TangleDiagram;
use crate::union_find::UnionFind;

/// Largest crossing count accepted unless the caller raises it.
pub const DEFAULT_MAX_CROSSINGS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("state has {got} bit(s) but the diagram has {expected} crossing(s)")]
    StateLengthMismatch { expected: usize, got: usize },
    #[error("invalid state string `{0}` (expected 0s and 1s)")]
    InvalidState(String),
    #[error("{n} crossings exceeds the configured maximum of {max}")]
    TooManyCrossings { n: usize, max: usize },
}

/// A vertex of the cube {0,1}^n. Bit `i` of the mask is crossing `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmoothingState {
    mask: u64,
    len: usize,
}

impl SmoothingState {
    pub fn new(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "at most 64 crossings");
        assert!(len == 64 || mask >> len == 0, "mask {mask:#b} wider than {len} bits");
        SmoothingState { mask, len }
    }

    pub fn zero(len: usize) -> Self {
        SmoothingState::new(0, len)
    }

    /// Parses a bit string; the leftmost character is crossing 0.
    pub fn parse(text: &str) -> Result<Self, ResolutionError> {
        let text = text.trim();
        if text.len() > 64 {
            return Err(ResolutionError::InvalidState(text.to_string()));
        }
        let mut mask = 0u64;
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => mask |= 1 << i,
                _ => return Err(ResolutionError::InvalidState(text.to_string())),
            }
        }
        Ok(SmoothingState { mask, len: text.chars().count() })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn bit(&self, i: usize) -> bool {
        self.mask >> i & 1 == 1
    }

    /// Number of 1-smoothings.
    pub fn weight(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn with_bit(&self, i: usize, value: bool) -> Self {
        assert!(i < self.len);
        let mask = if value { self.mask | 1 << i } else { self.mask & !(1 << i) };
        SmoothingState { mask, len: self.len }
    }

    /// Sign of the cube edge that flips bit `j` from 0 to 1: +1 or -1
    /// according to the parity of the 1s before position `j`.
    pub fn edge_sign(&self, j: usize) -> i64 {
        if (self.mask & ((1u64 << j) - 1)).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Key that orders states like their bit strings.
    pub fn string_order_key(&self) -> u64 {
        (0..self.len).filter(|&i| self.bit(i)).map(|i| 1u64 << (self.len - 1 - i)).sum()
    }
}

impl fmt::Display for SmoothingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (0..self.len).try_for_each(|i| f.write_str(if self.bit(i) { "1" } else { "0" }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Circle,
    Arc,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentKind::Circle => "circle",
            ComponentKind::Arc => "arc",
        })
    }
}

/// A circle or arc of a resolved diagram, as the set of labels it runs along.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub kind: ComponentKind,
    /// Indices into `TangleDiagram::labels`, ascending (hence canonically sorted).
    pub labels: Vec<usize>,
}

impl Component {
    pub fn identifiers<'a>(&self, diagram: &'a TangleDiagram) -> Vec<&'a str> {
        self.labels.iter().map(|&l| diagram.labels()[l].id.as_str()).collect()
    }

    /// Labels as written in the input, joined by `~`.
    pub fn render(&self, diagram: &TangleDiagram) -> String {
        self.labels.iter().map(|&l| diagram.label_text(l)).collect::<Vec<_>>().join("~")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedDiagram {
    pub state: SmoothingState,
    /// Sorted by smallest label.
    pub components: Vec<Component>,
    /// Component index of every label.
    pub component_of: Vec<usize>,
    pub circles: usize,
    pub arcs: usize,
}

impl ResolvedDiagram {
    /// One line per component: `3~6|~10| (Type: arc)`.
    pub fn render(&self, diagram: &TangleDiagram) -> String {
        let mut out = format!("Smoothing State: {}\n", self.state);
        for c in &self.components {
            out.push_str(&format!("{} (Type: {})\n", c.render(diagram), c.kind));
        }
        out
    }
}

/// Joins `a~d, b~c` at 0-smoothed crossings and `a~b, c~d` at 1-smoothed
/// ones, then reads off the components.
pub fn resolve(diagram: &TangleDiagram, state: SmoothingState) -> Result<ResolvedDiagram, ResolutionError> {
    let n = diagram.crossing_count();
    if state.len() != n {
        return Err(ResolutionError::StateLengthMismatch { expected: n, got: state.len() });
    }
    let labels = diagram.labels();
    let mut uf = UnionFind::new(labels.len());
    for i in 0..n {
        let [a, b, c, d] = diagram.crossing_label_ids(i);
        if state.bit(i) {
            uf.union(a, b);
            uf.union(c, d);
        } else {
            uf.union(a, d);
            uf.union(b, c);
        }
    }
    let mut slot_of_root = vec![usize::MAX; labels.len()];
    let mut component_of = vec![0; labels.len()];
    let mut components: Vec<Component> = Vec::new();
    for (l, info) in labels.iter().enumerate() {
        let root = uf.find(l);
        if slot_of_root[root] == usize::MAX {
            slot_of_root[root] = components.len();
            components.push(Component { kind: ComponentKind::Circle, labels: Vec::new() });
        }
        let idx = slot_of_root[root];
        component_of[l] = idx;
        components[idx].labels.push(l);
        if info.boundary {
            components[idx].kind = ComponentKind::Arc;
        }
    }
    let arcs = components.iter().filter(|c| c.kind == ComponentKind::Arc).count();
    Ok(ResolvedDiagram { state, circles: components.len() - arcs, arcs, components, component_of })
}

/// All 2^n states grouped by weight; within a group, in bit-string order.
pub fn enumerate_states(diagram: &TangleDiagram, max_crossings: usize) -> Result<Vec<Vec<SmoothingState>>, ResolutionError> {
    let n = diagram.crossing_count();
    if n > max_crossings || n >= 64 {
        return Err(ResolutionError::TooManyCrossings { n, max: max_crossings });
    }
    Ok(states_by_weight(n))
}

pub(crate) fn states_by_weight(n: usize) -> Vec<Vec<SmoothingState>> {
    let mut groups: Vec<Vec<SmoothingState>> = vec![Vec::new(); n + 1];
    for mask in 0..(1u64 << n) {
        groups[mask.count_ones() as usize].push(SmoothingState::new(mask, n));
    }
    for g in &mut groups {
        g.sort_by_key(SmoothingState::string_order_key);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{parse_pd_code, Crossing, SignType, TangleDiagram};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    const EXAMPLE: &str = r#"[["3","10|","4","9"],["|1","8","2","|7"],["9","4","8","5"],["2","5","3","6|"]]"#;
    const TRITANGLE: &str = r#"[["2","5","3","6"],["4","|1","5","2"],["6","3","7|","4"]]"#;

    fn diagram(text: &str) -> TangleDiagram {
        parse_pd_code(text).unwrap().diagram
    }

    fn listing(d: &TangleDiagram, state: &str) -> BTreeSet<(ComponentKind, Vec<String>)> {
        resolve(d, SmoothingState::parse(state).unwrap())
            .unwrap()
            .components
            .iter()
            .map(|c| (c.kind, c.identifiers(d).into_iter().map(String::from).collect()))
            .collect()
    }

    fn set(items: &[(ComponentKind, &[&str])]) -> BTreeSet<(ComponentKind, Vec<String>)> {
        items.iter().map(|(k, ls)| (*k, ls.iter().map(|s| s.to_string()).collect())).collect()
    }

    #[test]
    fn state_strings() {
        let s = SmoothingState::parse("0101").unwrap();
        assert_eq!(s.weight(), 2);
        assert!(s.bit(1) && s.bit(3) && !s.bit(0));
        assert_eq!(s.to_string(), "0101");
        assert!(SmoothingState::parse("01a").is_err());
        assert_eq!(s.edge_sign(0), 1);
        assert_eq!(s.edge_sign(2), -1);
        assert_eq!(s.edge_sign(3), -1);
    }

    #[test]
    fn example_all_zero_state() {
        use ComponentKind::*;
        let d = diagram(EXAMPLE);
        let r = resolve(&d, SmoothingState::zero(4)).unwrap();
        assert_eq!((r.circles, r.arcs), (1, 2));
        assert_eq!(
            listing(&d, "0000"),
            set(&[(Arc, &["1", "7"]), (Arc, &["2", "4", "6", "8", "10"]), (Circle, &["3", "5", "9"])])
        );
    }

    // Listing the crossings clockwise instead of counterclockwise swaps the
    // two smoothings, so the all-ones state here reproduces the component
    // lists a clockwise reading assigns to the all-zeros state.
    #[test]
    fn example_mirror_states() {
        use ComponentKind::*;
        let d = diagram(EXAMPLE);
        assert_eq!(
            listing(&d, "1111"),
            set(&[(Arc, &["3", "6", "10"]), (Circle, &["4", "9"]), (Arc, &["1", "2", "5", "7", "8"])])
        );
        assert_eq!(
            listing(&d, "1110"),
            set(&[(Arc, &["1", "3", "5", "8", "10"]), (Circle, &["4", "9"]), (Arc, &["2", "6", "7"])])
        );
    }

    #[test]
    fn tritangle_states() {
        let d = diagram(TRITANGLE);
        let counts = |s: &str| {
            let r = resolve(&d, SmoothingState::parse(s).unwrap()).unwrap();
            (r.circles, r.arcs)
        };
        assert_eq!(counts("000"), (1, 1));
        for s in ["100", "010", "001"] {
            assert_eq!(counts(s), (0, 1));
        }
        for s in ["110", "101", "011"] {
            assert_eq!(counts(s), (1, 1));
        }
        assert_eq!(counts("111"), (2, 1));
    }

    #[test]
    fn render_format() {
        let d = diagram(EXAMPLE);
        let text = resolve(&d, SmoothingState::parse("1111").unwrap()).unwrap().render(&d);
        assert!(text.starts_with("Smoothing State: 1111\n"));
        assert!(text.contains("3~6|~10| (Type: arc)\n"));
        assert!(text.contains("4~9 (Type: circle)\n"));
    }

    #[test]
    fn length_mismatch() {
        let d = diagram(EXAMPLE);
        assert_eq!(
            resolve(&d, SmoothingState::parse("00").unwrap()),
            Err(ResolutionError::StateLengthMismatch { expected: 4, got: 2 })
        );
    }

    #[test]
    fn empty_diagram_has_no_components() {
        let d = diagram("[]");
        let r = resolve(&d, SmoothingState::zero(0)).unwrap();
        assert!(r.components.is_empty());
        let groups = enumerate_states(&d, DEFAULT_MAX_CROSSINGS).unwrap();
        assert_eq!(groups, vec![vec![SmoothingState::zero(0)]]);
    }

    #[test]
    fn enumeration_groups() {
        let d = diagram(r#"[["|1","2","2","3"],["3","4","4","5|"]]"#);
        let groups = enumerate_states(&d, DEFAULT_MAX_CROSSINGS).unwrap();
        let text: Vec<Vec<String>> = groups.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect();
        assert_eq!(text, vec![vec!["00"], vec!["01", "10"], vec!["11"]]);
        let sizes: Vec<usize> = enumerate_states(&diagram(TRITANGLE), 20).unwrap().iter().map(Vec::len).collect();
        assert_eq!(sizes, [1, 3, 3, 1]);
        assert_eq!(enumerate_states(&d, 1), Err(ResolutionError::TooManyCrossings { n: 2, max: 1 }));
    }

    fn partition(d: &TangleDiagram, r: &ResolvedDiagram) -> BTreeSet<BTreeSet<String>> {
        r.components.iter().map(|c| c.identifiers(d).into_iter().map(String::from).collect()).collect()
    }

    proptest! {
        #[test]
        fn components_partition_labels(mask in 0u64..16) {
            let d = diagram(EXAMPLE);
            let r = resolve(&d, SmoothingState::new(mask, 4)).unwrap();
            let mut seen = vec![0; d.labels().len()];
            for c in &r.components {
                let boundary = c.labels.iter().filter(|&&l| d.labels()[l].boundary).count();
                prop_assert_eq!(boundary, if c.kind == ComponentKind::Arc { 2 } else { 0 });
                for &l in &c.labels {
                    seen[l] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&k| k == 1));
            prop_assert_eq!(r.circles + r.arcs, r.components.len());
        }

        #[test]
        fn crossing_order_does_not_matter(mask in 0u64..16, perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
            let d = diagram(EXAMPLE);
            let crossings: Vec<Crossing> = perm.iter().map(|&i| d.crossings()[i].clone()).collect();
            let permuted = TangleDiagram::new(crossings, SignType::all_plus(4), d.free()).unwrap();
            let state = SmoothingState::new(mask, 4);
            let mut pmask = 0;
            for (new, &old) in perm.iter().enumerate() {
                if state.bit(old) {
                    pmask |= 1 << new;
                }
            }
            let a = resolve(&d, state).unwrap();
            let b = resolve(&permuted, SmoothingState::new(pmask, 4)).unwrap();
            prop_assert_eq!(partition(&d, &a), partition(&permuted, &b));
        }

        #[test]
        fn neighbours_differ_by_at_most_one(mask in 0u64..16, j in 0usize..4) {
            let d = diagram(EXAMPLE);
            let s = SmoothingState::new(mask, 4);
            let a = resolve(&d, s).unwrap();
            let b = resolve(&d, s.with_bit(j, !s.bit(j))).unwrap();
            let diff = a.components.len().abs_diff(b.components.len());
            prop_assert!(diff == 1 || (diff == 0 && a.arcs == b.arcs));
        }
    }
}
