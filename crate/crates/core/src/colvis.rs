//! Colored visibility map: a left-to-right sweep over vertex events and
//! reappearance events, with the currently visible viewpoints kept in an
//! ordered set. Viewpoints that lose sight at a vertex are found by scanning
//! the set from its right end; each one's reappearance point is a ray
//! shooting query along its shadow ray. The right map comes from the
//! mirrored instance, and the two are merged.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::geometry::{orient, ExactX, Rational, Ray2};
use crate::intervals::{ColVisBuilder, ColVisMap};
use crate::shoot::ShootIndex;
use crate::terrain::{validate_instance, Instance};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ColVisStats {
    pub vertex_events: usize,
    pub reappearance_events: usize,
    pub ray_shots: usize,
    /// Viewpoints removed at vertex events, summed.
    pub removals: usize,
    /// Vertex events where the disappearing viewpoints were not a suffix of
    /// the visible set. Only counted by audited runs.
    pub suffix_violations: usize,
}

impl ColVisStats {
    fn add(self, o: ColVisStats) -> ColVisStats {
        ColVisStats {
            vertex_events: self.vertex_events + o.vertex_events,
            reappearance_events: self.reappearance_events + o.reappearance_events,
            ray_shots: self.ray_shots + o.ray_shots,
            removals: self.removals + o.removals,
            suffix_violations: self.suffix_violations + o.suffix_violations,
        }
    }
}

/// Viewpoints (ordinals) becoming visible again at one abscissa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reappearance {
    pub x: Rational,
    pub viewpoints: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColVisOutput {
    pub map: ColVisMap,
    /// Reappearance points of every sweep that contributed to `map`.
    pub reappearances: Vec<Reappearance>,
    pub stats: ColVisStats,
}

/// Outcome of [`simultaneous_reappearance_audit`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReappearanceAudit {
    /// Points where at least two viewpoints reappear.
    pub multi_points: usize,
    /// Largest number of points shared by one viewpoint pair.
    pub max_pair_share: usize,
}

impl ReappearanceAudit {
    /// Whether every pair shares at most one point, so that there are at
    /// most `m choose 2` multi-reappearance points.
    pub fn holds(&self, m: usize) -> bool {
        self.max_pair_share <= 1 && self.multi_points <= m * m.saturating_sub(1) / 2
    }
}

pub fn simultaneous_reappearance_audit(trace: &[Reappearance]) -> ReappearanceAudit {
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    let mut audit = ReappearanceAudit::default();
    for r in trace.iter().filter(|r| r.viewpoints.len() > 1) {
        audit.multi_points += 1;
        for (i, &a) in r.viewpoints.iter().enumerate() {
            for &b in &r.viewpoints[i + 1..] {
                let c = shared.entry((a.min(b), a.max(b))).or_default();
                *c += 1;
                audit.max_pair_share = audit.max_pair_share.max(*c);
            }
        }
    }
    audit
}

fn check(inst: &Instance) -> Result<()> {
    if inst.viewpoints.radius().is_some() {
        return Err(Error::LimitedSightUnsupported);
    }
    validate_instance(inst)?.require_colvis()
}

fn left_sweep(inst: &Instance, audit: bool) -> ColVisOutput {
    let t = &inst.terrain;
    let v = t.vertices();
    let n = t.n();
    let shoot = ShootIndex::new(t);
    let mut stats = ColVisStats::default();
    let mut visible: BTreeSet<usize> = BTreeSet::new();
    let mut queue: BinaryHeap<Reverse<(Rational, usize)>> = BinaryHeap::new();
    let mut trace: Vec<Reappearance> = Vec::new();
    let mut b = ColVisBuilder::new(ExactX::from(t.x_min()), []);

    for k in 0..n {
        while let Some(Reverse((x, _))) = queue.peek() {
            if *x >= v[k].x {
                break;
            }
            let Reverse((x, p)) = queue.pop().unwrap();
            stats.reappearance_events += 1;
            visible.insert(p);
            b.add(ExactX::from(&x), p);
            match trace.last_mut() {
                Some(r) if r.x == x => r.viewpoints.push(p),
                _ => trace.push(Reappearance {
                    x,
                    viewpoints: vec![p],
                }),
            }
        }
        if k + 1 < n {
            stats.vertex_events += 1;
            let loses = |p: usize| orient(inst.viewpoint(p), &v[k], &v[k + 1]) < 0;
            let gone: Vec<usize> = visible
                .iter()
                .rev()
                .copied()
                .take_while(|&p| loses(p))
                .collect();
            if audit {
                let rest = visible.len() - gone.len();
                if visible.iter().take(rest).any(|&p| loses(p)) {
                    stats.suffix_violations += 1;
                }
            }
            let at = ExactX::from(&v[k].x);
            for p in gone {
                stats.removals += 1;
                stats.ray_shots += 1;
                visible.remove(&p);
                b.remove(at.clone(), p);
                let ray = Ray2::through(inst.viewpoint(p), &v[k]);
                if let Some(hit) = shoot.shoot_ray(&ray, &at) {
                    queue.push(Reverse((hit.x, p)));
                }
            }
        }
        if let Some(o) = inst.viewpoints.ordinal_of_vertex(k) {
            visible.insert(o);
            b.add(ExactX::from(&v[k].x), o);
        }
    }
    ColVisOutput {
        map: b.finish(ExactX::from(t.x_max())),
        reappearances: trace,
        stats,
    }
}

fn right_sweep(inst: &Instance, audit: bool) -> ColVisOutput {
    let m = inst.viewpoints.m();
    let out = left_sweep(&inst.mirrored(), audit);
    let reappearances = out
        .reappearances
        .into_iter()
        .rev()
        .map(|r| {
            let mut vs: Vec<usize> = r.viewpoints.iter().map(|&i| m - 1 - i).collect();
            vs.sort_unstable();
            Reappearance {
                x: -r.x,
                viewpoints: vs,
            }
        })
        .collect();
    ColVisOutput {
        map: out.map.mirrored(m),
        reappearances,
        stats: out.stats,
    }
}

/// Left colors: each point labeled with the viewpoints at or left of it
/// that see it. Refuses instances with collinear vertex triples.
pub fn build_left_colvis(inst: &Instance) -> Result<ColVisOutput> {
    check(inst)?;
    Ok(left_sweep(inst, false))
}

/// Right colors, computed on the mirrored instance.
pub fn build_right_colvis(inst: &Instance) -> Result<ColVisOutput> {
    check(inst)?;
    Ok(right_sweep(inst, false))
}

/// Pointwise union of left and right colors.
pub fn merge_colvis(left: &ColVisOutput, right: &ColVisOutput) -> Result<ColVisOutput> {
    let mut reappearances = right.reappearances.clone();
    reappearances.extend(left.reappearances.iter().cloned());
    Ok(ColVisOutput {
        map: left.map.union(&right.map)?,
        reappearances,
        stats: left.stats.add(right.stats),
    })
}

pub fn build_colvis(inst: &Instance) -> Result<ColVisOutput> {
    check(inst)?;
    merge_colvis(&left_sweep(inst, false), &right_sweep(inst, false))
}

/// [`build_colvis`] that also checks the suffix property at every vertex
/// event, at `O(m)` extra cost per vertex.
pub fn build_colvis_audited(inst: &Instance) -> Result<ColVisOutput> {
    check(inst)?;
    merge_colvis(&left_sweep(inst, true), &right_sweep(inst, true))
}
