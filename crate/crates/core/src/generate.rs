//! Instance generators: seeded random terrains and the comb family whose
//! colored and Voronoi maps have Θ(m) regions on every valley floor.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::geometry::{int, rat, Line2, Point2, Rational};
use crate::terrain::{validate, Instance, Terrain, ViewpointSet};

/// A comb instance with the region counts its construction guarantees.
#[derive(Clone, Debug)]
pub struct Comb {
    pub instance: Instance,
    pub teeth: usize,
    /// Lower bound on the number of colored-map regions.
    pub expected_colvis: usize,
    /// Lower bound on the number of Voronoi-map regions.
    pub expected_vorvis: usize,
}

/// Viewpoints on a convex staircase at the far left, followed by `t` teeth.
///
/// Each tooth is a peak, a deep notch right behind it, and a long floor
/// rising to the next peak. The shadow every viewpoint casts over a peak
/// lands on the following floor, the higher viewpoints' shadows ending
/// first, so a floor is covered by `{}`, `{0}`, `{0,1}`, ..., and the
/// closest visible viewpoint changes each time a new one appears.
pub fn gen_comb(m: usize, t: usize, seed: u64) -> Result<Comb> {
    if m == 0 || t == 0 {
        return Err(Error::InvalidParameters(format!(
            "comb needs m >= 1 and t >= 1, got m = {m}, t = {t}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mi, ti) = (m as i64, t as i64);
    let big = mi + ti + 2;
    let width = 10;
    let x0 = 10 * mi + 10;
    let depth = 4 * big * big;
    let step = 2 * big;
    // peak heights: a shallow convex descent, ending at 0
    let peak_y = |j: i64| (ti + 1 - j) * (ti + 1 - j);
    let top = peak_y(0) + depth;
    // floors sit on a tilted copy of the peak parabola, so no three vertices
    // of the teeth are collinear
    let tilt = rng.gen_range(0..=(depth / (8 * ti)).max(1));

    let mut pts = Vec::with_capacity(m + 2 * t + 1);
    for i in 0..mi {
        let k = mi - 1 - i;
        pts.push((i, top + step * (k * k + k)));
    }
    for j in 0..=ti {
        let x = x0 + width * j;
        pts.push((x, peak_y(j)));
        if j < ti {
            pts.push((x + 1, peak_y(j) - depth - tilt * j));
        }
    }
    let n = pts.len();
    let terrain = Terrain::new(
        pts.into_iter()
            .map(|(x, y)| Point2::from_ints(x, y))
            .collect(),
    )?;
    let viewpoints = ViewpointSet::new((0..m).collect(), None, n)?;
    Ok(Comb {
        instance: Instance::new(terrain, viewpoints)?,
        teeth: t,
        expected_colvis: t * (m + 1),
        expected_vorvis: t * (m + 1),
    })
}

/// The comb with `m` viewpoints and as many teeth as fit in `n` vertices.
pub fn gen_comb_with_n(m: usize, n: usize, seed: u64) -> Result<Comb> {
    if n < m + 3 {
        return Err(Error::InvalidParameters(format!(
            "a comb with {m} viewpoints needs at least {} vertices",
            m + 3
        )));
    }
    gen_comb(m, (n - m - 1) / 2, seed)
}

/// Whether `(ax, ay)`, `(bx, by)`, `(cx, cy)` are collinear.
fn collinear(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> bool {
    let cross =
        (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128;
    cross == 0
}

const ATTEMPTS: usize = 200;

/// A random instance in general position: integer vertices with x gaps in
/// `1..=range` and heights in `0..=range`, viewpoints on `m` random vertices.
pub fn gen_random(n: usize, m: usize, seed: u64, range: i64) -> Result<Instance> {
    if n < 2 || m == 0 || m > n || range < 2 {
        return Err(Error::InvalidParameters(format!(
            "need 2 <= n, 1 <= m <= n and range >= 2, got n = {n}, m = {m}, range = {range}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
        let mut x = 0;
        while pts.len() < n {
            if !pts.is_empty() {
                x += rng.gen_range(1..=range);
            }
            // a height that is not collinear with any earlier pair
            let y = (0..64).map(|_| rng.gen_range(0..=range)).find(|&y| {
                (0..pts.len())
                    .all(|i| (i + 1..pts.len()).all(|j| !collinear(pts[i], pts[j], (x, y))))
            });
            match y {
                Some(y) => pts.push((x, y)),
                None => break,
            }
        }
        if pts.len() < n {
            continue;
        }
        let mut idx = sample(&mut rng, n, m).into_vec();
        idx.sort_unstable();
        let terrain = Terrain::new(
            pts.into_iter()
                .map(|(x, y)| Point2::from_ints(x, y))
                .collect(),
        )?;
        let viewpoints = ViewpointSet::new(idx, None, n)?;
        let report = validate(&terrain, &viewpoints)?;
        if report.collinear_triples.is_empty() && report.bisector_edge_collinearities.is_empty() {
            return Instance::new(terrain, viewpoints);
        }
    }
    Err(Error::InvalidParameters(format!(
        "no instance in general position found for n = {n}, range = {range}"
    )))
}

/// Rounds to a multiple of `2^-bits`, keeping witness coordinates compact.
fn dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::one() << bits);
    (x * &scale).floor() / scale
}

/// Square root to within about `2^-bits`, by Newton steps from a float seed.
fn sqrt_approx(x: &Rational, bits: u32) -> Rational {
    let seed = x.to_f64().expect("finite").sqrt();
    let mut y = Rational::from_float(seed).expect("finite seed");
    for _ in 0..(bits / 32 + 3) {
        y = dyadic(&((&y + x / &y) / int(2)), bits + 8);
    }
    y
}

/// A limited-sight instance (radius 1) whose visibility map has at least
/// `m·t` visible intervals on `m + 1 + 3t` vertices.
///
/// The viewpoints sit on a steep cliff. Further right, `t` gadgets follow the
/// lower right arc of the unit circle toward its rightmost point, each a tip
/// shading a horizontal floor. A lower viewpoint sees less of a floor but
/// reaches further along it; the tip is placed so the `m` visible pieces
/// interleave without touching. Gadget sizes shrink geometrically, so the
/// coordinates need `O(t)` bits.
pub fn gen_limited_witness(m: usize, t: usize) -> Result<Instance> {
    if m == 0 || t == 0 {
        return Err(Error::InvalidParameters(format!(
            "witness needs m >= 1 and t >= 1, got m = {m}, t = {t}"
        )));
    }
    let bits = 40 + 8 * t as u32;
    let third = rat(1, 3);
    let thetas: Vec<Rational> = (0..t)
        .scan(rat(1, 4), |th, _| {
            let cur = th.clone();
            *th = &*th * &third;
            Some(cur)
        })
        .collect();
    let last = thetas[t - 1].clone();
    let g = &last / int(4 * (m * m) as i64);
    let p: Vec<Point2> = (0..m as i64)
        .map(|i| {
            let run = (int(i) * &g / int(8) + int(i * (i - 1) / 2) * &g / int(64)) * &last;
            Point2::new(run, -int(i) * &g)
        })
        .collect();
    let mut verts = p.clone();
    verts.push(Point2::new(&p[m - 1].x + &g, int(-1)));

    let collide =
        || Error::InvalidParameters(format!("witness gadgets collide at m = {m}, t = {t}"));
    for th in &thetas {
        let y = -th.clone();
        let reach: Vec<Rational> = p
            .iter()
            .map(|q| {
                let dy = &q.y - &y;
                &q.x + sqrt_approx(&(int(1) - &dy * &dy), bits)
            })
            .collect();
        // floor abscissas the shadows of the first and last viewpoints
        // should land on
        let (first_target, last_target) = if m >= 2 {
            (
                &reach[0] - (&reach[1] - &reach[0]) / int(2),
                (&reach[m - 2] + &reach[m - 1]) / int(2),
            )
        } else {
            let s = &reach[0] - th * th / int(4);
            (s.clone(), s)
        };
        let tip = if m >= 2 {
            let a = Line2::through(&p[0], &Point2::new(first_target, y.clone()));
            let b = Line2::through(&p[m - 1], &Point2::new(last_target, y.clone()));
            let x = a.intersect_x(&b).ok_or_else(collide)?;
            Point2::new(dyadic(&x, bits), dyadic(&a.y_at(&x), bits))
        } else {
            let depth = th - th * th * th;
            let a = Line2::through(&p[0], &Point2::new(first_target, y.clone()));
            let x = a.x_at(&-depth.clone()).ok_or_else(collide)?;
            Point2::new(dyadic(&x, bits), -depth)
        };
        let shadow: Vec<Rational> = p
            .iter()
            .map(|q| &q.x + (&tip.x - &q.x) * (&q.y - &y) / (&q.y - &tip.y))
            .collect();
        let interleaved =
            (0..m).all(|i| shadow[i] < reach[i] && (i + 1 == m || reach[i] < shadow[i + 1]));
        if !interleaved || tip.y <= y || tip.x <= verts[verts.len() - 1].x {
            return Err(collide());
        }
        let floor_start = dyadic(&((&tip.x + &shadow[0]) / int(2)), bits);
        let floor_end = dyadic(&(&reach[m - 1] + th * th / int(16)), bits);
        verts.push(tip);
        verts.push(Point2::new(floor_start, y.clone()));
        verts.push(Point2::new(floor_end, y));
    }
    let n = verts.len();
    let inst = Instance::new(
        Terrain::new(verts)?,
        ViewpointSet::new((0..m).collect(), Some(int(1)), n)?,
    )?;
    validate(&inst.terrain, &inst.viewpoints)?.require_colvis()?;
    Ok(inst)
}
