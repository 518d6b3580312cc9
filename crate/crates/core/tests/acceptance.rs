//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use terrainvis::colvis::build_colvis;
use terrainvis::fixtures;
use terrainvis::generate::{gen_comb, gen_comb_with_n, gen_limited_witness, gen_random};
use terrainvis::geometry::{int, rat, ExactX, Point2, Rational};
use terrainvis::intervals::IntervalMap;
use terrainvis::limited::{build_colvis_limited, build_vis_limited, build_vorvis_limited};
use terrainvis::oracle::{oracle_maps, oracle_maps_until, OracleMaps};
use terrainvis::terrain::{Instance, Terrain};
use terrainvis::vis::{build_left_vis, build_right_vis, build_vis};
use terrainvis::vorvis::{build_vorvis_dnc, build_vorvis_sweep, is_always_closer};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Breakpoints strictly inside each edge.
fn inner_breaks(t: &Terrain, breaks: &[ExactX]) -> Vec<usize> {
    let xs: Vec<ExactX> = t.vertices().iter().map(|v| ExactX::from(&v.x)).collect();
    let mut counts = vec![0; xs.len() - 1];
    let mut k = 0;
    for b in breaks {
        while k + 1 < xs.len() && xs[k + 1] <= *b {
            k += 1;
        }
        if k + 1 < xs.len() && xs[k] < *b {
            counts[k] += 1;
        }
    }
    counts
}

#[derive(Default)]
struct EdgeAudit {
    vis: usize,
    colvis: usize,
    vorvis: usize,
    worst: (usize, usize, usize),
}

impl EdgeAudit {
    fn record(&mut self, t: &Terrain, m: usize, maps: &OracleMaps) {
        let vis = inner_breaks(t, maps.vis.breaks());
        let col = inner_breaks(t, maps.colvis.breaks());
        let vor = inner_breaks(t, maps.vorvis.breaks());
        self.vis += vis.iter().filter(|&&c| c > 2).count();
        self.colvis += col.iter().filter(|&&c| c + 1 > m + 1).count();
        self.vorvis += vor.iter().filter(|&&c| c + 1 > 4 * m - 2).count();
        let max = |v: &[usize]| v.iter().copied().max().unwrap_or(0);
        self.worst.0 = self.worst.0.max(max(&vis));
        self.worst.1 = self.worst.1.max(max(&col) + 1);
        self.worst.2 = self.worst.2.max(max(&vor) + 1);
    }

    fn violations(&self) -> usize {
        self.vis + self.colvis + self.vorvis
    }
}

#[derive(Default)]
struct SweepAudit {
    runs: usize,
    insertions: usize,
    ray_events: usize,
    short_rounds: usize,
    rounds: usize,
}

impl SweepAudit {
    fn violations(&self) -> usize {
        self.insertions + self.ray_events + self.short_rounds
    }
}

fn random_params(seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(4..=40);
    (n, rng.gen_range(1..=6usize.min(n)))
}

/// Fast maps of an unlimited instance against the oracle; the returned
/// strings name what disagreed.
fn compare_unlimited(inst: &Instance, o: &OracleMaps, sweep: &mut SweepAudit) -> Vec<String> {
    let mut bad = Vec::new();
    let m = inst.viewpoints.m();
    let left = build_left_vis(inst).unwrap();
    let right = build_right_vis(inst).unwrap();
    for s in [left.stats, right.stats] {
        sweep.runs += 1;
        sweep.insertions += usize::from(s.envelope_insertions > m);
        sweep.ray_events += usize::from(s.ray_events > m);
    }
    if build_vis(inst).unwrap().map != o.vis {
        bad.push("vis".into());
    }
    if build_colvis(inst).unwrap().map.materialize() != o.colvis {
        bad.push("colvis".into());
    }
    if build_vorvis_dnc(inst).unwrap() != o.vorvis {
        bad.push("vorvis dnc".into());
    }
    let sw = build_vorvis_sweep(inst).unwrap();
    sweep.short_rounds += sw.stats.prune.short_rounds;
    sweep.rounds += sw.stats.prune.rounds;
    if sw.map != o.vorvis {
        bad.push("vorvis sweep".into());
    }
    bad
}

fn compare_limited(inst: &Instance, o: &OracleMaps) -> Vec<String> {
    let mut bad = Vec::new();
    if build_vis_limited(inst).unwrap() != o.vis {
        bad.push("vis".into());
    }
    if build_colvis_limited(inst).unwrap().map.materialize() != o.colvis {
        bad.push("colvis".into());
    }
    if build_vorvis_limited(inst).unwrap().map != o.vorvis {
        bad.push("vorvis".into());
    }
    bad
}

fn oracle_equivalence(edges: &mut EdgeAudit, sweep: &mut SweepAudit) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let (n, m) = random_params(seed);
        let inst = gen_random(n, m, seed, 20).unwrap();
        let o = oracle_maps(&inst);
        edges.record(&inst.terrain, m, &o);
        for what in compare_unlimited(&inst, &o, sweep) {
            failures.push(format!("seed {seed} {what}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "500 instances, {} mismatches, {:.1}s{}",
            failures.len(),
            elapsed.as_secs_f64(),
            failures
                .first()
                .map_or(String::new(), |f| format!(", first: {f}"))
        ),
    )
}

fn limited_equivalence(edges: &mut EdgeAudit) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    for i in 0..200u64 {
        let seed = 10_000 + i;
        let (n, m) = random_params(seed);
        let r = rat(rng.gen_range(20..=1600), rng.gen_range(1..=8));
        let inst = gen_random(n, m, seed, 20)
            .unwrap()
            .with_radius(Some(r.clone()))
            .unwrap();
        let o = oracle_maps(&inst);
        edges.record(&inst.terrain, m, &o);
        for what in compare_limited(&inst, &o) {
            failures.push(format!("seed {seed} r {r} {what}"));
        }
    }
    for (m, t) in [(2, 3), (3, 4)] {
        let inst = gen_limited_witness(m, t).unwrap();
        for what in compare_limited(&inst, &oracle_maps(&inst)) {
            failures.push(format!("witness ({m},{t}) {what}"));
        }
    }
    let mut huge = 0;
    for seed in 0..100u64 {
        let (n, m) = random_params(seed);
        let inst = gen_random(n, m, seed, 20).unwrap();
        let far = inst.with_radius(Some(int(1_000_000))).unwrap();
        let same = build_vis_limited(&far).unwrap() == build_vis(&inst).unwrap().map
            && build_colvis_limited(&far).unwrap().map.materialize()
                == build_colvis(&inst).unwrap().map.materialize()
            && build_vorvis_limited(&far).unwrap().map == build_vorvis_dnc(&inst).unwrap();
        if !same {
            huge += 1;
            failures.push(format!("seed {seed} r = 10^6 differs from unlimited"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "200 random radii + 2 witnesses, 100 instances at r = 10^6 ({huge} differ), {} mismatches{}",
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(", first: {f}"))
        ),
    )
}

fn per_edge_bounds(edges: &EdgeAudit) -> Outcome {
    outcome(
        edges.violations() == 0,
        format!(
            "violations vis {} colvis {} vorvis {}; worst per edge: {} transitions, {} colored regions, {} Voronoi regions",
            edges.vis, edges.colvis, edges.vorvis, edges.worst.0, edges.worst.1, edges.worst.2
        ),
    )
}

fn lower_bound_witnesses() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, t) in [(2, 4), (3, 8), (4, 16)] {
        let comb = gen_comb(m, t, 1).unwrap();
        let inst = &comb.instance;
        let col = build_colvis(inst).unwrap().map.materialize();
        let vor = build_vorvis_sweep(inst).unwrap().map;
        let o = oracle_maps(inst);
        let good = col == o.colvis && vor == o.vorvis && col.len() >= m * t && vor.len() >= m * t;
        ok &= good;
        parts.push(format!(
            "({m},{t}) colvis {} vorvis {}",
            col.len(),
            vor.len()
        ));
    }
    outcome(ok, parts.join(", "))
}

fn q(n: i64, d: i64) -> ExactX {
    ExactX::from(rat(n, d))
}

fn fixture_exactness() -> Outcome {
    let mut bad = Vec::new();
    let peak = fixtures::peak();
    let vis = build_vis(&peak).unwrap().map;
    if vis != IntervalMap::from_pieces(vec![q(0, 1), q(1, 1), q(2, 1)], vec![true, false]) {
        bad.push("peak vis");
    }
    let valley = fixtures::valley();
    let vis = build_vis(&valley).unwrap().map;
    let expected = IntervalMap::from_pieces(
        vec![q(0, 1), q(2, 1), q(28, 9), q(4, 1)],
        vec![true, false, true],
    );
    if vis != expected {
        bad.push("valley vis");
    }
    let apex = fixtures::apex();
    let expected =
        IntervalMap::from_pieces(vec![q(0, 1), q(2, 1), q(10, 1)], vec![Some(0), Some(1)]);
    if build_vorvis_dnc(&apex).unwrap() != expected
        || build_vorvis_sweep(&apex).unwrap().map != expected
    {
        bad.push("apex vorvis");
    }
    let flat = fixtures::flat();
    let expected =
        IntervalMap::from_pieces(vec![q(0, 1), q(5, 1), q(10, 1)], vec![Some(0), Some(1)]);
    if build_vorvis_dnc(&flat).unwrap() != expected
        || build_vorvis_sweep(&flat).unwrap().map != expected
    {
        bad.push("flat vorvis");
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "peak, valley (28/9), apex (x = 2), flat (x = 5) exact".to_string()
        } else {
            format!("wrong: {}", bad.join(", "))
        },
    )
}

/// `D(x) = |x − p1|² − |x − p2|²` is affine along each edge, so it is
/// non-positive over an interval iff it is at the endpoints and at every
/// vertex strictly inside.
fn scan_always_closer(t: &Terrain, r: &ExactX, s: &ExactX, p1: &Point2, p2: &Point2) -> bool {
    let d = |x: &ExactX| {
        let pt = t.point_at(x).unwrap();
        pt.dist2(p1).sub(&pt.dist2(p2)).signum()
    };
    d(r) <= 0
        && d(s) <= 0
        && t.vertices().iter().all(|v| {
            let x = ExactX::from(&v.x);
            !(*r < x && x < *s) || d(&x) <= 0
        })
}

fn closer_characterization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // intervals seen in full by at least two viewpoints
    let mut pool: Vec<(Instance, Rational, Rational, Vec<usize>)> = Vec::new();
    for seed in 0..200u64 {
        let inst = gen_random(
            rng.gen_range(6..=16),
            rng.gen_range(2..=5),
            50_000 + seed,
            20,
        )
        .unwrap();
        let o = oracle_maps(&inst);
        for (lo, hi, set) in o.colvis.intervals() {
            if set.len() >= 2 {
                pool.push((
                    inst.clone(),
                    lo.as_rational().unwrap().clone(),
                    hi.as_rational().unwrap().clone(),
                    set.clone(),
                ));
            }
        }
    }
    let mut disagreements = 0;
    let total = 100_000;
    for _ in 0..total {
        let (inst, lo, hi, set) = &pool[rng.gen_range(0..pool.len())];
        let a = rng.gen_range(0..set.len());
        let b = (a + rng.gen_range(1..set.len())) % set.len();
        let (p1, p2) = (inst.viewpoint(set[a]), inst.viewpoint(set[b]));
        let mut pick = || ExactX::from(lo + (hi - lo) * rat(rng.gen_range(0..=16), 16));
        let (mut r, mut s) = (pick(), pick());
        if r > s {
            std::mem::swap(&mut r, &mut s);
        }
        let t = &inst.terrain;
        if is_always_closer(t, &r, &s, p1, p2) != scan_always_closer(t, &r, &s, p1, p2) {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!(
            "{total} triples from {} intervals, {disagreements} disagreements",
            pool.len()
        ),
    )
}

fn instrumentation(sweep: &mut SweepAudit) -> Outcome {
    for (m, t) in [(2, 4), (3, 8), (4, 16), (8, 64)] {
        let inst = gen_comb(m, t, 1).unwrap().instance;
        for s in [
            build_left_vis(&inst).unwrap().stats,
            build_right_vis(&inst).unwrap().stats,
        ] {
            sweep.runs += 1;
            sweep.insertions += usize::from(s.envelope_insertions > m);
            sweep.ray_events += usize::from(s.ray_events > m);
        }
        let sw = build_vorvis_sweep(&inst).unwrap();
        sweep.short_rounds += sw.stats.prune.short_rounds;
        sweep.rounds += sw.stats.prune.rounds;
    }
    outcome(
        sweep.violations() == 0,
        format!(
            "{} sweeps: insertions > m in {}, ray events > m in {}; {} prune rounds, {} discarding under a quarter",
            sweep.runs, sweep.insertions, sweep.ray_events, sweep.rounds, sweep.short_rounds
        ),
    )
}

fn best_of(runs: usize, f: impl Fn() -> Duration) -> Duration {
    (0..runs).map(|_| f()).min().unwrap()
}

fn scaling() -> Outcome {
    let sizes = [1usize << 12, 1 << 13, 1 << 14];
    let insts: Vec<Instance> = sizes
        .iter()
        .map(|&n| gen_comb_with_n(8, n, 1).unwrap().instance)
        .collect();
    let times: Vec<Duration> = insts
        .iter()
        .map(|inst| {
            best_of(3, || {
                let start = Instant::now();
                build_vis(inst).unwrap();
                start.elapsed()
            })
        })
        .collect();
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    // the oracle only has to be outlasted: stopping it at 50 times the sweep
    // time already bounds the speedup from below
    let last = &insts[2];
    let budget = times[2] * 50;
    let start = Instant::now();
    let finished = oracle_maps_until(last, start + budget).is_some();
    let oracle_time = start.elapsed();
    let speedup = oracle_time.as_secs_f64() / times[2].as_secs_f64();
    let pass = ratios.iter().all(|&r| r <= 3.0) && !finished;
    outcome(
        pass,
        format!(
            "build_vis {} ms; growth {}; oracle {} after {:.0} ms (speedup {}{:.0}x)",
            times
                .iter()
                .map(|t| format!("{:.1}", t.as_secs_f64() * 1e3))
                .collect::<Vec<_>>()
                .join(" / "),
            ratios
                .iter()
                .map(|r| format!("{r:.2}"))
                .collect::<Vec<_>>()
                .join(", "),
            if finished { "finished" } else { "stopped" },
            oracle_time.as_secs_f64() * 1e3,
            if finished { "" } else { ">= " },
            speedup
        ),
    )
}

fn main() -> ExitCode {
    let mut edges = EdgeAudit::default();
    let mut sweep = SweepAudit::default();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let o = f();
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((name, o));
    };
    run("1 oracle equivalence", &mut || {
        oracle_equivalence(&mut edges, &mut sweep)
    });
    run("2 limited-sight equivalence", &mut || {
        limited_equivalence(&mut edges)
    });
    run("3 per-edge bounds", &mut || per_edge_bounds(&edges));
    run("4 lower-bound witnesses", &mut lower_bound_witnesses);
    run("5 fixture exactness", &mut fixture_exactness);
    run(
        "6 always-closer characterization",
        &mut closer_characterization,
    );
    run("7 sweep instrumentation", &mut || {
        instrumentation(&mut sweep)
    });
    run("8 scaling", &mut scaling);
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!(
        "{} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
