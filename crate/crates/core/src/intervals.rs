//! Labeled partitions of the terrain's x-range.
//!
//! A map stores its breakpoints and one label per interval between
//! consecutive breakpoints. Adjacent labels always differ and no interval
//! has zero length, so two maps describing the same partition compare equal.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geometry::{ExactX, QuadExt};
use crate::terrain::Terrain;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalMap<L> {
    breaks: Vec<ExactX>,
    labels: Vec<L>,
}

/// Visible (`true`) / invisible (`false`).
pub type VisMap = IntervalMap<bool>;
/// Closest visible viewpoint ordinal, or `None`.
pub type VorVisMap = IntervalMap<Option<usize>>;

impl<L: Clone + PartialEq> IntervalMap<L> {
    pub fn constant(lo: ExactX, hi: ExactX, label: L) -> Self {
        assert!(lo < hi, "empty domain");
        IntervalMap {
            breaks: vec![lo, hi],
            labels: vec![label],
        }
    }

    /// Builds a map from raw pieces, dropping zero-length intervals and
    /// merging equal neighbours.
    pub fn from_pieces(breaks: Vec<ExactX>, labels: Vec<L>) -> Self {
        assert_eq!(breaks.len(), labels.len() + 1, "one label per interval");
        assert!(!labels.is_empty(), "empty map");
        let hi = breaks[breaks.len() - 1].clone();
        let mut b = MapBuilder::new(breaks[0].clone(), labels[0].clone());
        for (x, l) in breaks.into_iter().zip(labels).skip(1) {
            b.set(x, l);
        }
        b.finish(hi)
    }

    pub fn breaks(&self) -> &[ExactX] {
        &self.breaks
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn lo(&self) -> &ExactX {
        &self.breaks[0]
    }

    pub fn hi(&self) -> &ExactX {
        &self.breaks[self.breaks.len() - 1]
    }

    pub fn intervals(&self) -> impl Iterator<Item = (&ExactX, &ExactX, &L)> {
        self.labels
            .iter()
            .enumerate()
            .map(move |(i, l)| (&self.breaks[i], &self.breaks[i + 1], l))
    }

    /// Label of the interval containing `x`; at a breakpoint, the label on
    /// its right (or the last label at the upper end).
    pub fn label_at(&self, x: &ExactX) -> &L {
        let k = self.breaks.partition_point(|b| b <= x);
        &self.labels[k.saturating_sub(1).min(self.labels.len() - 1)]
    }

    pub fn map_labels<M: Clone + PartialEq>(&self, f: impl Fn(&L) -> M) -> IntervalMap<M> {
        IntervalMap::from_pieces(self.breaks.clone(), self.labels.iter().map(f).collect())
    }

    /// Pointwise combination of two maps over the same domain.
    pub fn overlay<R: Clone + PartialEq, M: Clone + PartialEq>(
        &self,
        other: &IntervalMap<R>,
        f: impl Fn(&L, &R) -> M,
    ) -> Result<IntervalMap<M>> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(Error::DomainMismatch);
        }
        let (mut i, mut j) = (0, 0);
        let mut b = MapBuilder::new(self.lo().clone(), f(&self.labels[0], &other.labels[0]));
        while i + 1 < self.labels.len() || j + 1 < other.labels.len() {
            let next_a = self.breaks.get(i + 1).filter(|_| i + 1 < self.labels.len());
            let next_b = other
                .breaks
                .get(j + 1)
                .filter(|_| j + 1 < other.labels.len());
            let x = match (next_a, next_b) {
                (Some(a), Some(c)) => {
                    let x = a.min(c).clone();
                    if *a == x {
                        i += 1;
                    }
                    if *c == x {
                        j += 1;
                    }
                    x
                }
                (Some(a), None) => {
                    i += 1;
                    a.clone()
                }
                (None, Some(c)) => {
                    j += 1;
                    c.clone()
                }
                (None, None) => unreachable!(),
            };
            b.set(x, f(&self.labels[i], &other.labels[j]));
        }
        Ok(b.finish(self.hi().clone()))
    }

    /// Reflection `x -> -x`, relabeling through `f`.
    pub fn mirrored_with(&self, f: impl Fn(&L) -> L) -> Self {
        IntervalMap::from_pieces(
            self.breaks.iter().rev().map(QuadExt::neg).collect(),
            self.labels.iter().rev().map(f).collect(),
        )
    }

    /// Number of breakpoints strictly inside each edge of `t`.
    pub fn interior_breaks_per_edge(&self, t: &Terrain) -> Vec<usize> {
        let mut counts = vec![0; t.n() - 1];
        let v = t.vertices();
        for x in &self.breaks[1..self.breaks.len() - 1] {
            let k = t.edge_at_exact(x).expect("breakpoint inside the domain");
            if *x != QuadExt::from(&v[k].x) {
                counts[k] += 1;
            }
        }
        counts
    }

    /// Number of intervals meeting each edge in a set of positive length.
    pub fn regions_per_edge(&self, t: &Terrain) -> Vec<usize> {
        self.interior_breaks_per_edge(t)
            .into_iter()
            .map(|c| c + 1)
            .collect()
    }
}

/// Incremental construction from left to right: `set(x, l)` labels
/// everything from `x` onward with `l`.
pub struct MapBuilder<L> {
    breaks: Vec<ExactX>,
    labels: Vec<L>,
}

impl<L: Clone + PartialEq> MapBuilder<L> {
    pub fn new(lo: ExactX, label: L) -> Self {
        MapBuilder {
            breaks: vec![lo],
            labels: vec![label],
        }
    }

    pub fn current(&self) -> &L {
        self.labels.last().expect("builder is never empty")
    }

    pub fn set(&mut self, x: ExactX, label: L) {
        let last = self.breaks.last().expect("builder is never empty");
        assert!(&x >= last, "breakpoints must be pushed in order");
        if &x == last {
            *self.labels.last_mut().unwrap() = label;
            let k = self.labels.len();
            if k >= 2 && self.labels[k - 2] == self.labels[k - 1] {
                self.labels.pop();
                self.breaks.pop();
            }
        } else if *self.current() != label {
            self.breaks.push(x);
            self.labels.push(label);
        }
    }

    pub fn finish(mut self, hi: ExactX) -> IntervalMap<L> {
        while self.breaks.len() > 1 && self.breaks.last() == Some(&hi) {
            // a change exactly at the upper end only labels a point
            self.breaks.pop();
            self.labels.pop();
        }
        assert!(&hi > self.breaks.last().unwrap(), "empty domain");
        self.breaks.push(hi);
        IntervalMap {
            breaks: self.breaks,
            labels: self.labels,
        }
    }
}

/// Additions and removals at one breakpoint of a [`ColVisMap`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SetDelta {
    pub added: Vec<usize>,
    pub removed: Vec<usize>,
}

/// Colored visibility map: the viewpoint set of the first interval plus the
/// changes at every later breakpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColVisMap {
    breaks: Vec<ExactX>,
    first: Vec<usize>,
    deltas: Vec<SetDelta>,
}

impl ColVisMap {
    pub fn breaks(&self) -> &[ExactX] {
        &self.breaks
    }

    pub fn first(&self) -> &[usize] {
        &self.first
    }

    /// `deltas()[i]` applies at `breaks()[i + 1]`.
    pub fn deltas(&self) -> &[SetDelta] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lo(&self) -> &ExactX {
        &self.breaks[0]
    }

    pub fn hi(&self) -> &ExactX {
        &self.breaks[self.breaks.len() - 1]
    }

    /// Total number of additions and removals.
    pub fn delta_size(&self) -> usize {
        self.deltas
            .iter()
            .map(|d| d.added.len() + d.removed.len())
            .sum()
    }

    /// Full viewpoint subsets, one per interval.
    pub fn materialize(&self) -> IntervalMap<Vec<usize>> {
        let mut cur: BTreeSet<usize> = self.first.iter().copied().collect();
        let mut labels = vec![cur.iter().copied().collect::<Vec<_>>()];
        for d in &self.deltas {
            for r in &d.removed {
                cur.remove(r);
            }
            cur.extend(d.added.iter().copied());
            labels.push(cur.iter().copied().collect());
        }
        IntervalMap {
            breaks: self.breaks.clone(),
            labels,
        }
    }

    pub fn from_map(map: &IntervalMap<Vec<usize>>) -> ColVisMap {
        let mut b = ColVisBuilder::new(map.lo().clone(), map.labels()[0].iter().copied());
        for (i, (lo, _, l)) in map.intervals().enumerate().skip(1) {
            let prev: BTreeSet<usize> = map.labels()[i - 1].iter().copied().collect();
            let next: BTreeSet<usize> = l.iter().copied().collect();
            for r in prev.difference(&next) {
                b.remove(lo.clone(), *r);
            }
            for a in next.difference(&prev) {
                b.add(lo.clone(), *a);
            }
        }
        b.finish(map.hi().clone())
    }

    /// Visible where the subset is non-empty.
    pub fn coarsen(&self) -> VisMap {
        let mut count = self.first.len();
        let mut b = MapBuilder::new(self.lo().clone(), count > 0);
        for (d, x) in self.deltas.iter().zip(&self.breaks[1..]) {
            count = count + d.added.len() - d.removed.len();
            b.set(x.clone(), count > 0);
        }
        b.finish(self.hi().clone())
    }

    /// Pointwise union, walking both delta streams.
    pub fn union(&self, other: &ColVisMap) -> Result<ColVisMap> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(Error::DomainMismatch);
        }
        let mut left: BTreeSet<usize> = self.first.iter().copied().collect();
        let mut right: BTreeSet<usize> = other.first.iter().copied().collect();
        let mut b = ColVisBuilder::new(self.lo().clone(), left.union(&right).copied());
        let (mut i, mut j) = (0, 0);
        loop {
            let next_a = self.breaks.get(i + 1).filter(|_| i < self.deltas.len());
            let next_b = other.breaks.get(j + 1).filter(|_| j < other.deltas.len());
            let x = match (next_a, next_b) {
                (None, None) => break,
                (Some(a), None) => a.clone(),
                (None, Some(c)) => c.clone(),
                (Some(a), Some(c)) => a.min(c).clone(),
            };
            let mut touched = BTreeSet::new();
            if next_a == Some(&x) {
                let d = &self.deltas[i];
                for r in &d.removed {
                    left.remove(r);
                }
                left.extend(d.added.iter().copied());
                touched.extend(d.removed.iter().chain(&d.added).copied());
                i += 1;
            }
            if next_b == Some(&x) {
                let d = &other.deltas[j];
                for r in &d.removed {
                    right.remove(r);
                }
                right.extend(d.added.iter().copied());
                touched.extend(d.removed.iter().chain(&d.added).copied());
                j += 1;
            }
            for v in touched {
                if left.contains(&v) || right.contains(&v) {
                    b.add(x.clone(), v);
                } else {
                    b.remove(x.clone(), v);
                }
            }
        }
        Ok(b.finish(self.hi().clone()))
    }

    /// Reflection `x -> -x` with ordinal `i` becoming `m - 1 - i`.
    pub fn mirrored(&self, m: usize) -> ColVisMap {
        let map = self.materialize();
        let flipped = map.mirrored_with(|s| {
            let mut v: Vec<usize> = s.iter().map(|&i| m - 1 - i).collect();
            v.sort_unstable();
            v
        });
        ColVisMap::from_map(&flipped)
    }

    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> ColVisMap {
        let mut first: Vec<usize> = self.first.iter().map(|&i| f(i)).collect();
        first.sort_unstable();
        let deltas = self
            .deltas
            .iter()
            .map(|d| {
                let mut added: Vec<usize> = d.added.iter().map(|&i| f(i)).collect();
                let mut removed: Vec<usize> = d.removed.iter().map(|&i| f(i)).collect();
                added.sort_unstable();
                removed.sort_unstable();
                SetDelta { added, removed }
            })
            .collect();
        ColVisMap {
            breaks: self.breaks.clone(),
            first,
            deltas,
        }
    }
}

/// Incremental construction of a [`ColVisMap`] from membership changes in
/// nondecreasing x order. Changes at equal x are composed, and a breakpoint
/// whose net change is empty disappears.
pub struct ColVisBuilder {
    breaks: Vec<ExactX>,
    first: Vec<usize>,
    deltas: Vec<SetDelta>,
    current: BTreeSet<usize>,
    pending_x: Option<ExactX>,
    /// Membership before the pending breakpoint, for every touched ordinal.
    pending: BTreeMap<usize, bool>,
}

impl ColVisBuilder {
    pub fn new(lo: ExactX, initial: impl IntoIterator<Item = usize>) -> Self {
        let current: BTreeSet<usize> = initial.into_iter().collect();
        ColVisBuilder {
            breaks: vec![lo],
            first: current.iter().copied().collect(),
            deltas: Vec::new(),
            current,
            pending_x: None,
            pending: BTreeMap::new(),
        }
    }

    pub fn current(&self) -> &BTreeSet<usize> {
        &self.current
    }

    fn at(&mut self, x: ExactX) {
        match &self.pending_x {
            Some(p) if *p == x => {}
            Some(p) => {
                assert!(x > *p, "changes must be pushed in order");
                self.flush();
                self.pending_x = Some(x);
            }
            None => {
                assert!(x >= self.breaks[0], "change before the domain");
                self.pending_x = Some(x);
            }
        }
    }

    fn flush(&mut self) {
        let Some(x) = self.pending_x.take() else {
            return;
        };
        let mut delta = SetDelta::default();
        for (v, before) in std::mem::take(&mut self.pending) {
            match (before, self.current.contains(&v)) {
                (false, true) => delta.added.push(v),
                (true, false) => delta.removed.push(v),
                _ => {}
            }
        }
        if delta.added.is_empty() && delta.removed.is_empty() {
            return;
        }
        if x == self.breaks[0] {
            self.first = self.current.iter().copied().collect();
        } else {
            self.breaks.push(x);
            self.deltas.push(delta);
        }
    }

    pub fn add(&mut self, x: ExactX, v: usize) {
        self.at(x);
        let was = self.current.insert(v);
        self.pending.entry(v).or_insert(!was);
    }

    pub fn remove(&mut self, x: ExactX, v: usize) {
        self.at(x);
        let was = self.current.remove(&v);
        self.pending.entry(v).or_insert(was);
    }

    pub fn finish(mut self, hi: ExactX) -> ColVisMap {
        if self.pending_x.as_ref() == Some(&hi) {
            self.pending_x = None;
            self.pending.clear();
        }
        self.flush();
        assert!(hi > *self.breaks.last().unwrap(), "empty domain");
        self.breaks.push(hi);
        ColVisMap {
            breaks: self.breaks,
            first: self.first,
            deltas: self.deltas,
        }
    }
}
