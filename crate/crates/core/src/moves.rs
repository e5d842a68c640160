//! Reidemeister rewrites and random planar tangles.
//!
//! Face tracing relies on the PD convention: positions `0..4` of a crossing
//! run counterclockwise, so a walk that arrives at position `p` and leaves
//! from position `p + 3` keeps the same region on its left.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codec::{
    relabel, CodecError, Crossing, FreeComponents, FreshLabels, Sign, SignType, StrandLabel, TangleDiagram,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("no strand `{0}` in the diagram")]
    UnknownStrand(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("not removable: {0}")]
    NotRemovable(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// A strand to rewrite: a label, or one of the diagram's free components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StrandRef {
    Label(String),
    FreeArc(usize),
    FreeCircle(usize),
}

impl FromStr for StrandRef {
    type Err = MoveError;

    /// `free-arc:<i>`, `free-circle:<i>`, or a label (markers allowed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let index = |rest: &str| rest.parse::<usize>().map_err(|_| MoveError::UnknownStrand(s.to_string()));
        if let Some(rest) = s.strip_prefix("free-arc:") {
            Ok(StrandRef::FreeArc(index(rest)?))
        } else if let Some(rest) = s.strip_prefix("free-circle:") {
            Ok(StrandRef::FreeCircle(index(rest)?))
        } else {
            let label = StrandLabel::parse(s).map_err(|_| MoveError::UnknownStrand(s.to_string()))?;
            Ok(StrandRef::Label(label.id().to_string()))
        }
    }
}

impl fmt::Display for StrandRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrandRef::Label(l) => f.write_str(l),
            StrandRef::FreeArc(i) => write!(f, "free-arc:{i}"),
            StrandRef::FreeCircle(i) => write!(f, "free-circle:{i}"),
        }
    }
}

/// One traversal of an edge: from a crossing slot (or the boundary) to a
/// crossing slot (or the boundary).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    /// Index into `TangleDiagram::labels`.
    pub label: usize,
    pub from: Option<(usize, usize)>,
    pub to: Option<(usize, usize)>,
}

/// The darts bounding one region, in order. Closed faces touch no boundary
/// point; an open face is a maximal run between two boundary points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<Dart>,
    pub closed: bool,
}

fn occurrences(diagram: &TangleDiagram) -> Vec<Vec<(usize, usize)>> {
    let mut occ = vec![Vec::new(); diagram.labels().len()];
    for c in 0..diagram.crossing_count() {
        for (p, l) in diagram.crossing_label_ids(c).iter().enumerate() {
            occ[*l].push((c, p));
        }
    }
    occ
}

fn other_end(occ: &[(usize, usize)], slot: (usize, usize)) -> Option<(usize, usize)> {
    occ.iter().copied().find(|s| *s != slot)
}

/// Traces every region of the diagram.
pub fn faces(diagram: &TangleDiagram) -> Vec<Face> {
    let occ = occurrences(diagram);
    let mut darts: Vec<Dart> = Vec::new();
    for (l, slots) in occ.iter().enumerate() {
        match slots.as_slice() {
            [s] => {
                darts.push(Dart { label: l, from: Some(*s), to: None });
                darts.push(Dart { label: l, from: None, to: Some(*s) });
            }
            [s1, s2] => {
                darts.push(Dart { label: l, from: Some(*s1), to: Some(*s2) });
                darts.push(Dart { label: l, from: Some(*s2), to: Some(*s1) });
            }
            _ => unreachable!("validated diagram"),
        }
    }
    darts.sort();
    let successor = |d: &Dart| -> Option<Dart> {
        let (c, p) = d.to?;
        let slot = (c, (p + 3) % 4);
        let label = diagram.crossing_label_ids(c)[slot.1];
        Some(Dart { label, from: Some(slot), to: other_end(&occ[label], slot) })
    };
    let mut seen: HashSet<Dart> = HashSet::new();
    let mut out = Vec::new();
    for start in darts.iter().filter(|d| d.from.is_none()) {
        let mut chain = vec![*start];
        seen.insert(*start);
        let mut cur = *start;
        while let Some(next) = successor(&cur) {
            seen.insert(next);
            chain.push(next);
            cur = next;
        }
        out.push(Face { darts: chain, closed: false });
    }
    for start in &darts {
        if seen.contains(start) {
            continue;
        }
        let mut cycle = vec![*start];
        seen.insert(*start);
        let mut cur = successor(start).expect("closed darts have successors");
        while cur != *start {
            seen.insert(cur);
            cycle.push(cur);
            cur = successor(&cur).expect("closed darts have successors");
        }
        out.push(Face { darts: cycle, closed: true });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RewriteKind {
    R1Add,
    R1Remove,
    R2Add,
    R2Remove,
}

/// Where a rewrite happened, with enough bookkeeping to undo an add exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteSite {
    pub kind: RewriteKind,
    pub strands: Vec<StrandRef>,
    /// Indices of the crossings the move introduced (add moves append).
    pub crossings: Vec<usize>,
    original_free: FreeComponents,
    original_slots: Vec<(usize, usize, StrandLabel)>,
}

impl RewriteSite {
    /// Reverts an add move on the diagram it produced.
    pub fn undo(&self, diagram: &TangleDiagram) -> Result<TangleDiagram, MoveError> {
        if !matches!(self.kind, RewriteKind::R1Add | RewriteKind::R2Add) {
            return Err(MoveError::NotRemovable("only add moves can be undone".into()));
        }
        let keep = self.crossings.iter().min().copied().unwrap_or(diagram.crossing_count());
        let mut crossings: Vec<Crossing> = diagram.crossings()[..keep].to_vec();
        for (c, p, label) in &self.original_slots {
            crossings[*c].strands[*p] = label.clone();
        }
        let signs = SignType(diagram.sign_type().0[..keep].to_vec());
        Ok(TangleDiagram::new(crossings, signs, self.original_free)?)
    }
}

enum End {
    Slot(usize, usize),
    Boundary(StrandLabel),
}

enum Ends {
    Open(End, End),
    Circle,
}

struct Draft {
    crossings: Vec<Crossing>,
    signs: Vec<Sign>,
    free: FreeComponents,
    fresh: FreshLabels,
    original_free: FreeComponents,
    original_slots: Vec<(usize, usize, StrandLabel)>,
    first_new: usize,
}

impl Draft {
    fn new(diagram: &TangleDiagram) -> Self {
        Draft {
            crossings: diagram.crossings().to_vec(),
            signs: diagram.sign_type().0.clone(),
            free: diagram.free(),
            fresh: FreshLabels::for_diagram(diagram),
            original_free: diagram.free(),
            original_slots: Vec::new(),
            first_new: diagram.crossing_count(),
        }
    }

    fn internal(&mut self) -> StrandLabel {
        StrandLabel::internal(&self.fresh.next())
    }

    /// New label for the piece of strand between `end` and a new crossing.
    fn piece(&mut self, end: &End) -> StrandLabel {
        let id = self.fresh.next();
        match end {
            End::Slot(c, p) => {
                let old = std::mem::replace(&mut self.crossings[*c].strands[*p], StrandLabel::internal(&id));
                self.original_slots.push((*c, *p, old));
                StrandLabel::internal(&id)
            }
            End::Boundary(template) => relabel(template, &id),
        }
    }

    /// Tail and head pieces of a strand; a circle gets one label for both.
    fn pieces(&mut self, ends: &Ends) -> (StrandLabel, StrandLabel) {
        match ends {
            Ends::Open(tail, head) => {
                let t = self.piece(tail);
                let h = self.piece(head);
                (t, h)
            }
            Ends::Circle => {
                let z = self.internal();
                (z.clone(), z)
            }
        }
    }

    fn push(&mut self, strands: [StrandLabel; 4], sign: Sign) {
        self.crossings.push(Crossing::new(strands));
        self.signs.push(sign);
    }

    fn finish(self, kind: RewriteKind, strands: Vec<StrandRef>) -> Result<(TangleDiagram, RewriteSite), MoveError> {
        let site = RewriteSite {
            kind,
            strands,
            crossings: (self.first_new..self.crossings.len()).collect(),
            original_free: self.original_free,
            original_slots: self.original_slots,
        };
        let diagram = TangleDiagram::new(self.crossings, SignType(self.signs), self.free)?;
        Ok((diagram, site))
    }
}

fn label_index(diagram: &TangleDiagram, id: &str) -> Option<usize> {
    diagram.labels().iter().position(|l| l.id == id)
}

/// Takes the strand out of the draft's free components if needed and
/// returns its ends, tail first.
fn strand_ends(diagram: &TangleDiagram, draft: &mut Draft, strand: &StrandRef) -> Result<Ends, MoveError> {
    match strand {
        StrandRef::Label(id) => {
            let l = label_index(diagram, id).ok_or_else(|| MoveError::UnknownStrand(id.clone()))?;
            let occ = &diagram.label_index()[id];
            Ok(match occ.as_slice() {
                [s] => Ends::Open(End::Slot(s.0, s.1), End::Boundary(slot_label(diagram, *s))),
                [s1, s2] => Ends::Open(End::Slot(s1.0, s1.1), End::Slot(s2.0, s2.1)),
                _ => unreachable!("validated diagram, label {l}"),
            })
        }
        StrandRef::FreeArc(i) => {
            if *i >= diagram.free().arcs {
                return Err(MoveError::UnknownStrand(strand.to_string()));
            }
            draft.free.arcs -= 1;
            Ok(Ends::Open(End::Boundary(StrandLabel::boundary_front("x")), End::Boundary(StrandLabel::boundary_back("x"))))
        }
        StrandRef::FreeCircle(i) => {
            if *i >= diagram.free().circles {
                return Err(MoveError::UnknownStrand(strand.to_string()));
            }
            draft.free.circles -= 1;
            Ok(Ends::Circle)
        }
    }
}

fn slot_label(diagram: &TangleDiagram, (c, p): (usize, usize)) -> StrandLabel {
    diagram.crossings()[c].strands[p].clone()
}

fn dart_ends(diagram: &TangleDiagram, d: &Dart) -> Ends {
    let end = |slot: Option<(usize, usize)>, other: Option<(usize, usize)>| match slot {
        Some((c, p)) => End::Slot(c, p),
        None => End::Boundary(slot_label(diagram, other.expect("a dart touches at least one crossing"))),
    };
    Ends::Open(end(d.from, d.to), end(d.to, d.from))
}

/// Adds a kink on `strand`. A `+` kink sits where its 0-smoothing splits
/// off the loop, a `-` kink where its 1-smoothing does.
pub fn apply_r1(diagram: &TangleDiagram, strand: &StrandRef, handedness: Sign) -> Result<TangleDiagram, MoveError> {
    apply_r1_site(diagram, strand, handedness).map(|(d, _)| d)
}

pub fn apply_r1_site(
    diagram: &TangleDiagram,
    strand: &StrandRef,
    handedness: Sign,
) -> Result<(TangleDiagram, RewriteSite), MoveError> {
    let mut draft = Draft::new(diagram);
    let ends = strand_ends(diagram, &mut draft, strand)?;
    let (tail, head) = draft.pieces(&ends);
    let loop_label = draft.internal();
    let strands = match handedness {
        Sign::Plus => [tail, loop_label.clone(), loop_label, head],
        Sign::Minus => [loop_label.clone(), loop_label, tail, head],
    };
    draft.push(strands, handedness);
    draft.finish(RewriteKind::R1Add, vec![strand.clone()])
}

/// Pushes `second` across `first`, creating a bigon: one `+` and one `-`
/// crossing. The two strands should border a common region; when they do,
/// that region fixes the orientation of the finger. The same strand twice
/// gives a curl folded over itself.
pub fn apply_r2(diagram: &TangleDiagram, first: &StrandRef, second: &StrandRef) -> Result<TangleDiagram, MoveError> {
    apply_r2_site(diagram, first, second).map(|(d, _)| d)
}

pub fn apply_r2_site(
    diagram: &TangleDiagram,
    first: &StrandRef,
    second: &StrandRef,
) -> Result<(TangleDiagram, RewriteSite), MoveError> {
    let strands = vec![first.clone(), second.clone()];
    let mut draft = Draft::new(diagram);
    if first == second {
        let ends = strand_ends(diagram, &mut draft, first)?;
        self_r2(&mut draft, &ends);
        return draft.finish(RewriteKind::R2Add, strands);
    }
    let label_of = |s: &StrandRef| match s {
        StrandRef::Label(id) => label_index(diagram, id).map(Some).ok_or_else(|| MoveError::UnknownStrand(id.clone())),
        _ => Ok(None),
    };
    let (l1, l2) = (label_of(first)?, label_of(second)?);
    let shared = match (l1, l2) {
        (Some(a), Some(b)) => faces(diagram).into_iter().find_map(|f| {
            let d1 = f.darts.iter().find(|d| d.label == a)?;
            let d2 = f.darts.iter().find(|d| d.label == b)?;
            Some((*d1, *d2))
        }),
        _ => None,
    };
    let (e1, e2) = match shared {
        Some((d1, d2)) => (dart_ends(diagram, &d1), dart_ends(diagram, &d2)),
        None => (strand_ends(diagram, &mut draft, first)?, strand_ends(diagram, &mut draft, second)?),
    };
    bigon(&mut draft, &e1, &e2);
    draft.finish(RewriteKind::R2Add, strands)
}

/// R2 between the strands of two darts bounding the same face.
pub fn apply_r2_darts(diagram: &TangleDiagram, first: &Dart, second: &Dart) -> Result<(TangleDiagram, RewriteSite), MoveError> {
    let name = |d: &Dart| StrandRef::Label(diagram.labels()[d.label].id.clone());
    let strands = vec![name(first), name(second)];
    let mut draft = Draft::new(diagram);
    if first.label == second.label {
        self_r2(&mut draft, &dart_ends(diagram, first));
    } else {
        bigon(&mut draft, &dart_ends(diagram, first), &dart_ends(diagram, second));
    }
    draft.finish(RewriteKind::R2Add, strands)
}

// `e1` runs tail→head with the shared face on its left, and so does `e2`.
fn bigon(draft: &mut Draft, e1: &Ends, e2: &Ends) {
    let (x1a, x1b) = draft.pieces(e1);
    let (x2a, x2b) = draft.pieces(e2);
    let m1 = draft.internal();
    let m2 = draft.internal();
    draft.push([x1a, m2.clone(), m1.clone(), x2b], Sign::Plus);
    draft.push([m1, m2, x1b, x2a], Sign::Minus);
}

fn self_r2(draft: &mut Draft, ends: &Ends) {
    let (xa, xb) = draft.pieces(ends);
    let y = draft.internal();
    let m1 = draft.internal();
    let m2 = draft.internal();
    draft.push([xa, m2.clone(), m1.clone(), xb], Sign::Plus);
    draft.push([m1, m2, y.clone(), y], Sign::Minus);
}

/// Deletes the given crossings and reconnects the strands running through
/// them; strands closing up entirely inside become free components.
fn remove_crossings(diagram: &TangleDiagram, removed: &[usize]) -> Result<TangleDiagram, MoveError> {
    let occ = occurrences(diagram);
    let is_removed = |c: usize| removed.contains(&c);
    let labels = diagram.labels();
    let mut visited: HashSet<(usize, usize)> = HashSet::new();
    let mut crossings = diagram.crossings().to_vec();
    let mut free = diagram.free();
    let outside = |l: usize, slot: (usize, usize)| -> Option<Option<(usize, usize)>> {
        // Some(Some(s)): continues at a kept slot; Some(None): boundary
        match other_end(&occ[l], slot) {
            Some(s) if is_removed(s.0) => None,
            other => Some(other),
        }
    };
    let mut joins: Vec<(usize, Option<(usize, usize)>, usize, Option<(usize, usize)>)> = Vec::new();
    for &c in removed {
        for p in 0..4 {
            let l = diagram.crossing_label_ids(c)[p];
            let Some(entry) = outside(l, (c, p)) else { continue };
            if visited.contains(&(c, p)) {
                continue;
            }
            let (mut cc, mut pp) = (c, p);
            loop {
                visited.insert((cc, pp));
                let through = (cc, (pp + 2) % 4);
                visited.insert(through);
                let l2 = diagram.crossing_label_ids(cc)[through.1];
                match outside(l2, through) {
                    Some(exit) => {
                        joins.push((l, entry, l2, exit));
                        break;
                    }
                    None => {
                        let next = other_end(&occ[l2], through).expect("internal label");
                        cc = next.0;
                        pp = next.1;
                    }
                }
            }
        }
    }
    for &c in removed {
        for p in 0..4 {
            if visited.contains(&(c, p)) {
                continue;
            }
            let (mut cc, mut pp) = (c, p);
            while visited.insert((cc, pp)) {
                let through = (cc, (pp + 2) % 4);
                visited.insert(through);
                let l2 = diagram.crossing_label_ids(cc)[through.1];
                let next = other_end(&occ[l2], through).expect("closed loop");
                cc = next.0;
                pp = next.1;
            }
            free.circles += 1;
        }
    }
    for (l1, s1, l2, s2) in joins {
        match (s1, s2) {
            (Some(a), Some(b)) => {
                let keep = StrandLabel::internal(&labels[l1.min(l2)].id);
                crossings[a.0].strands[a.1] = keep.clone();
                crossings[b.0].strands[b.1] = keep;
            }
            (Some(a), None) => crossings[a.0].strands[a.1] = relabel(&slot_label(diagram, occ[l2][0]), &labels[l2].id),
            (None, Some(b)) => crossings[b.0].strands[b.1] = relabel(&slot_label(diagram, occ[l1][0]), &labels[l1].id),
            (None, None) => free.arcs += 1,
        }
    }
    let mut kept = Vec::new();
    let mut signs = Vec::new();
    for (c, crossing) in crossings.into_iter().enumerate() {
        if !is_removed(c) {
            kept.push(crossing);
            signs.push(diagram.sign_type().0[c]);
        }
    }
    Ok(TangleDiagram::new(kept, SignType(signs), free)?)
}

/// Removes a kink. The crossing's sign must agree with the side of its loop.
pub fn remove_r1(diagram: &TangleDiagram, crossing: usize) -> Result<TangleDiagram, MoveError> {
    if crossing >= diagram.crossing_count() {
        return Err(MoveError::NotRemovable(format!("no crossing {crossing}")));
    }
    let ids = diagram.crossing_label_ids(crossing);
    let loop_at = (0..4).find(|&p| ids[p] == ids[(p + 1) % 4]);
    let Some(p) = loop_at else {
        return Err(MoveError::NotRemovable(format!("crossing {crossing} is not a kink")));
    };
    let expected = if p % 2 == 1 { Sign::Plus } else { Sign::Minus };
    if diagram.sign_type().0[crossing] != expected {
        return Err(MoveError::NotRemovable(format!("kink at crossing {crossing} carries the wrong sign")));
    }
    remove_crossings(diagram, &[crossing])
}

/// Removes a bigon between crossings `c1` and `c2`.
pub fn remove_r2(diagram: &TangleDiagram, c1: usize, c2: usize) -> Result<TangleDiagram, MoveError> {
    let n = diagram.crossing_count();
    if c1 >= n || c2 >= n || c1 == c2 {
        return Err(MoveError::NotRemovable(format!("crossings {c1}, {c2}")));
    }
    let (a, b) = (diagram.crossing_label_ids(c1), diagram.crossing_label_ids(c2));
    let shared: Vec<(usize, usize)> =
        (0..4).flat_map(|p| (0..4).map(move |q| (p, q))).filter(|&(p, q)| a[p] == b[q]).collect();
    let [(p1, q1), (p2, q2)] = shared.as_slice() else {
        return Err(MoveError::NotRemovable(format!("crossings {c1} and {c2} do not bound a bigon")));
    };
    let adjacent = |x: usize, y: usize| (x + 1) % 4 == y || (y + 1) % 4 == x;
    // one bigon edge runs under at both crossings, the other over at both
    if !adjacent(*p1, *p2) || !adjacent(*q1, *q2) || p1 % 2 != q1 % 2 {
        return Err(MoveError::NotRemovable(format!("crossings {c1} and {c2} do not bound a bigon")));
    }
    let signs = &diagram.sign_type().0;
    let pairs_bigon_at_zero = |x: usize, y: usize| {
        // the 0-smoothing joins positions 0~3 and 1~2
        let pair = (x.min(y), x.max(y));
        pair == (0, 3) || pair == (1, 2)
    };
    let plus_at_c1 = pairs_bigon_at_zero(*p1, *p2);
    let plus_at_c2 = pairs_bigon_at_zero(*q1, *q2);
    let ok = plus_at_c1 != plus_at_c2
        && (signs[c1] == Sign::Plus) == plus_at_c1
        && (signs[c2] == Sign::Plus) == plus_at_c2;
    if !ok {
        return Err(MoveError::NotRemovable(format!("signs of crossings {c1} and {c2} do not cancel")));
    }
    remove_crossings(diagram, &[c1, c2])
}

/// A crossing-free arc with one kink of each given handedness stacked on it.
pub fn twisted_arc(handedness: &[Sign]) -> TangleDiagram {
    let mut d = TangleDiagram::empty(FreeComponents { circles: 0, arcs: 1 });
    for (i, h) in handedness.iter().enumerate() {
        let strand = if i == 0 {
            StrandRef::FreeArc(0)
        } else {
            let end = d.labels().iter().rev().find(|l| l.boundary).expect("arc has ends");
            StrandRef::Label(end.id.clone())
        };
        d = apply_r1(&d, &strand, *h).expect("strand exists");
    }
    d
}

/// Random planar diagram with `n` crossings and `arcs` open strands,
/// deterministic in `seed`.
///
/// Starting from a one-crossing figure eight, each step either joins two
/// edges of a region through a new crossing placed inside it or adds a kink.
/// Finally `arcs` edges of one region are cut, which makes that region the
/// outside of the tangle.
pub fn random_tangle(seed: u64, n: usize, arcs: usize) -> Result<TangleDiagram, MoveError> {
    if n > 63 {
        return Err(MoveError::InfeasibleParameters(format!("{n} crossings")));
    }
    if n == 0 {
        return Ok(TangleDiagram::empty(FreeComponents { circles: 0, arcs }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let figure_eight = Crossing::from_tokens(["1", "1", "2", "2"])?;
    let mut d = TangleDiagram::new(vec![figure_eight], SignType::all_plus(1), FreeComponents::default())?;
    while d.crossing_count() < n {
        let candidates: Vec<Face> = faces(&d).into_iter().filter(|f| distinct_labels(f) >= 2).collect();
        if rng.gen_bool(0.7) && !candidates.is_empty() {
            let face = candidates.choose(&mut rng).expect("nonempty");
            let (e1, e2) = two_darts(face, &mut rng);
            d = join_through_crossing(&d, &e1, &e2, rng.gen_bool(0.5))?;
        } else {
            let l = rng.gen_range(0..d.labels().len());
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            d = apply_r1(&d, &StrandRef::Label(d.labels()[l].id.clone()), sign)?;
        }
    }
    if arcs > 0 {
        let candidates: Vec<Face> = faces(&d).into_iter().filter(|f| distinct_labels(f) >= arcs).collect();
        let face = candidates.choose(&mut rng).ok_or_else(|| {
            MoveError::InfeasibleParameters(format!("no region of the {n}-crossing diagram has {arcs} edges"))
        })?;
        let mut ids: Vec<usize> = face.darts.iter().map(|d| d.label).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        ids.shuffle(&mut rng);
        d = cut_edges(&d, &ids[..arcs])?;
    }
    let signs = SignType((0..n).map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect());
    Ok(compact_labels(&d.with_signs(signs)?))
}

fn distinct_labels(face: &Face) -> usize {
    face.darts.iter().map(|d| d.label).collect::<HashSet<_>>().len()
}

fn two_darts<R: Rng>(face: &Face, rng: &mut R) -> (Dart, Dart) {
    loop {
        let a = *face.darts.choose(rng).expect("nonempty");
        let b = *face.darts.choose(rng).expect("nonempty");
        if a.label != b.label {
            return (a, b);
        }
    }
}

// Cuts both edges and joins the four loose ends at a new crossing inside
// the face; their counterclockwise order there is tail1, head1, tail2, head2.
fn join_through_crossing(diagram: &TangleDiagram, e1: &Dart, e2: &Dart, rotate: bool) -> Result<TangleDiagram, MoveError> {
    let mut draft = Draft::new(diagram);
    let (a, b) = draft.pieces(&dart_ends(diagram, e1));
    let (c, d) = draft.pieces(&dart_ends(diagram, e2));
    let strands = if rotate { [b, c, d, a] } else { [a, b, c, d] };
    draft.push(strands, Sign::Plus);
    Ok(draft.finish(RewriteKind::R2Add, Vec::new())?.0)
}

fn cut_edges(diagram: &TangleDiagram, labels: &[usize]) -> Result<TangleDiagram, MoveError> {
    let mut crossings = diagram.crossings().to_vec();
    let mut fresh = FreshLabels::for_diagram(diagram);
    for &l in labels {
        let id = &diagram.labels()[l].id;
        let occ = &diagram.label_index()[id];
        let (s1, s2) = (occ[0], occ[1]);
        crossings[s1.0].strands[s1.1] = StrandLabel::boundary_front(&fresh.next());
        crossings[s2.0].strands[s2.1] = StrandLabel::boundary_back(&fresh.next());
    }
    Ok(TangleDiagram::new(crossings, diagram.sign_type().clone(), diagram.free())?)
}

/// Renames labels to `1, 2, ...` in order of first appearance.
fn compact_labels(diagram: &TangleDiagram) -> TangleDiagram {
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let crossings = diagram
        .crossings()
        .iter()
        .map(|c| Crossing {
            strands: c.strands.clone().map(|s| {
                let next = (names.len() + 1).to_string();
                let id = names.entry(s.id().to_string()).or_insert(next).clone();
                relabel(&s, &id)
            }),
        })
        .collect();
    TangleDiagram::new(crossings, diagram.sign_type().clone(), diagram.free()).expect("renaming keeps validity")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveKind {
    R1,
    R2,
}

impl FromStr for MoveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r1" => Ok(MoveKind::R1),
            "r2" => Ok(MoveKind::R2),
            other => Err(format!("unknown move `{other}` (expected r1 or r2)")),
        }
    }
}

/// Applies one randomly chosen add move of an allowed kind at a random site.
pub fn random_add_move<R: Rng>(
    diagram: &TangleDiagram,
    rng: &mut R,
    allowed: &[MoveKind],
) -> Result<(TangleDiagram, RewriteSite), MoveError> {
    let kind = *allowed.choose(rng).ok_or_else(|| MoveError::InfeasibleParameters("no moves allowed".into()))?;
    let free = diagram.free();
    let mut strands: Vec<StrandRef> = diagram.labels().iter().map(|l| StrandRef::Label(l.id.clone())).collect();
    strands.extend((0..free.arcs).map(StrandRef::FreeArc));
    strands.extend((0..free.circles).map(StrandRef::FreeCircle));
    if strands.is_empty() {
        return Err(MoveError::InfeasibleParameters("the diagram has no strands".into()));
    }
    match kind {
        MoveKind::R1 => {
            let s = strands.choose(rng).expect("nonempty");
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            apply_r1_site(diagram, s, sign)
        }
        MoveKind::R2 if diagram.crossing_count() == 0 => {
            let a = strands.choose(rng).expect("nonempty");
            let b = strands.choose(rng).expect("nonempty");
            apply_r2_site(diagram, a, b)
        }
        MoveKind::R2 => {
            let all = faces(diagram);
            let face = all.choose(rng).expect("a diagram with crossings has faces");
            let a = *face.darts.choose(rng).expect("faces are nonempty");
            let b = *face.darts.choose(rng).expect("faces are nonempty");
            apply_r2_darts(diagram, &a, &b)
        }
    }
}
