//! SVG rendering of a terrain profile with a map drawn as colored bands
//! underneath. Coordinates are converted to floats for display only.

use std::fmt::Write as _;

use crate::geometry::ExactX;
use crate::io::AnyMap;
use crate::terrain::Instance;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];
const WIDTH: f64 = 800.0;
const PROFILE: f64 = 300.0;
const MARGIN: f64 = 20.0;
const BAND: f64 = 12.0;

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

struct Frame {
    x0: f64,
    xs: f64,
    y1: f64,
    ys: f64,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.xs
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.y1 - y) * self.ys
    }
}

/// One band row per viewpoint for colored maps, one row otherwise.
fn band_rows(map: &AnyMap, m: usize) -> usize {
    match map {
        AnyMap::Colvis(_) => m,
        _ => 1,
    }
}

pub fn render_svg(inst: &Instance, map: &AnyMap) -> String {
    let t = &inst.terrain;
    let pts: Vec<(f64, f64)> = t
        .vertices()
        .iter()
        .map(|p| (ExactX::from(&p.x).to_f64(), ExactX::from(&p.y).to_f64()))
        .collect();
    let (x0, x1) = (pts[0].0, pts[pts.len() - 1].0);
    let y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let f = Frame {
        x0,
        xs: (WIDTH - 2.0 * MARGIN) / (x1 - x0),
        y1,
        ys: (PROFILE - 2.0 * MARGIN) / (y1 - y0).max(f64::EPSILON),
    };
    let m = inst.viewpoints.m();
    let rows = band_rows(map, m);
    let height = PROFILE + rows as f64 * BAND + MARGIN;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<clipPath id="frame"><rect width="{WIDTH}" height="{PROFILE}"/></clipPath>"#
    );

    if let Some(r) = inst.viewpoints.radius() {
        let r = ExactX::from(r).to_f64();
        for p in inst.viewpoint_points() {
            let (cx, cy) = (ExactX::from(&p.x).to_f64(), ExactX::from(&p.y).to_f64());
            let _ = writeln!(
                s,
                r##"<ellipse cx="{:.2}" cy="{:.2}" rx="{:.2}" ry="{:.2}" fill="none" stroke="#bbb" stroke-dasharray="4 3" clip-path="url(#frame)"/>"##,
                f.x(cx),
                f.y(cy),
                r * f.xs,
                r * f.ys
            );
        }
    }

    let path: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", f.x(x), f.y(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        path.join(" ")
    );
    for (i, p) in inst.viewpoint_points().iter().enumerate() {
        let (cx, cy) = (ExactX::from(&p.x).to_f64(), ExactX::from(&p.y).to_f64());
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"><title>viewpoint {} (vertex {})</title></circle>"#,
            f.x(cx),
            f.y(cy),
            color(i),
            i,
            inst.viewpoints.indices()[i]
        );
    }

    let breaks: Vec<f64> = map.breaks().iter().map(|b| b.to_f64()).collect();
    let band = |s: &mut String, row: usize, i: usize, fill: &str| {
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{}" fill="{}"/>"#,
            f.x(breaks[i]),
            PROFILE + row as f64 * BAND,
            (f.x(breaks[i + 1]) - f.x(breaks[i])).max(0.5),
            BAND - 2.0,
            fill
        );
    };
    match map {
        AnyMap::Vis(v) => {
            for (i, &l) in v.labels().iter().enumerate() {
                band(&mut s, 0, i, if l { "#2ca02c" } else { "#dddddd" });
            }
        }
        AnyMap::Colvis(c) => {
            for (i, l) in c.labels().iter().enumerate() {
                for &vp in l {
                    band(&mut s, vp, i, color(vp));
                }
            }
        }
        AnyMap::Vorvis(v) => {
            for (i, l) in v.labels().iter().enumerate() {
                band(&mut s, 0, i, l.map_or("#dddddd", color));
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geometry::int;
    use crate::oracle::oracle_maps;

    #[test]
    fn bands_follow_the_map() {
        let inst = fixtures::valley();
        let maps = oracle_maps(&inst);
        let svg = render_svg(&inst, &AnyMap::Vis(maps.vis.clone()));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<rect x=").count(), maps.vis.len());
        let svg = render_svg(&inst, &AnyMap::Colvis(maps.colvis.clone()));
        let filled: usize = maps.colvis.labels().iter().map(Vec::len).sum();
        assert_eq!(svg.matches("<rect x=").count(), filled);
    }

    #[test]
    fn limited_sight_draws_circles() {
        let inst = fixtures::flat().with_radius(Some(int(3))).unwrap();
        let maps = oracle_maps(&inst);
        let svg = render_svg(&inst, &AnyMap::Vorvis(maps.vorvis));
        assert_eq!(svg.matches("<ellipse").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}
