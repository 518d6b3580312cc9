use num_bigint::BigInt;
use proptest::prelude::*;

use terrainvis::colvis::build_colvis;
use terrainvis::generate::gen_random;
use terrainvis::geometry::{rat, Point2, QuadExt};
use terrainvis::io::{parse_instance, parse_map, write_instance, write_map, AnyMap};
use terrainvis::oracle::{oracle_maps, oracle_sees};
use terrainvis::vis::build_vis;
use terrainvis::vorvis::build_vorvis_dnc;

fn instance() -> impl Strategy<Value = terrainvis::terrain::Instance> {
    (4usize..24, 1usize..5, any::<u64>())
        .prop_map(|(n, m, seed)| gen_random(n, m.min(n), seed, 20).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_claim(inst in instance(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 4)) {
        let v = inst.terrain.vertices();
        let mut idx: Vec<usize> = picks.iter().map(|i| i.index(v.len())).collect();
        idx.sort_unstable();
        idx.dedup();
        prop_assume!(idx.len() == 4);
        let [a, b, c, d] = [&v[idx[0]], &v[idx[1]], &v[idx[2]], &v[idx[3]]];
        let t = &inst.terrain;
        if oracle_sees(t, a, c).unwrap() && oracle_sees(t, b, d).unwrap() {
            prop_assert!(oracle_sees(t, a, d).unwrap());
        }
    }

    #[test]
    fn sight_is_symmetric(inst in instance(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let v = inst.terrain.vertices();
        let (a, b) = (&v[i.index(v.len())], &v[j.index(v.len())]);
        prop_assert_eq!(oracle_sees(&inst.terrain, a, b).unwrap(), oracle_sees(&inst.terrain, b, a).unwrap());
    }

    #[test]
    fn mirroring_mirrors_the_maps(inst in instance()) {
        let m = inst.viewpoints.m();
        let mirror = inst.mirrored();
        prop_assert_eq!(
            build_vis(&mirror).unwrap().map,
            build_vis(&inst).unwrap().map.mirrored_with(|l| *l)
        );
        let flip = |s: &Vec<usize>| {
            let mut s: Vec<usize> = s.iter().map(|i| m - 1 - i).collect();
            s.sort_unstable();
            s
        };
        prop_assert_eq!(
            build_colvis(&mirror).unwrap().map.materialize(),
            build_colvis(&inst).unwrap().map.materialize().mirrored_with(flip)
        );
        prop_assert_eq!(
            build_vorvis_dnc(&mirror).unwrap(),
            build_vorvis_dnc(&inst).unwrap().mirrored_with(|l| l.map(|i| m - 1 - i))
        );
    }

    #[test]
    fn quadratic_comparison_matches_floats(
        a in -1000i64..1000, b in -50i64..50, c in 2i64..200,
        d in -1000i64..1000, e in -50i64..50, f in 2i64..200,
    ) {
        let x = QuadExt::new(rat(a, 7), rat(b, 3), BigInt::from(c));
        let y = QuadExt::new(rat(d, 7), rat(e, 3), BigInt::from(f));
        let (fx, fy) = (x.to_f64(), y.to_f64());
        prop_assume!((fx - fy).abs() > 1e-6);
        prop_assert_eq!(x < y, fx < fy);
        // same radicand: the difference is itself in the extension
        let z = QuadExt::new(rat(d, 7), rat(e, 3), BigInt::from(c));
        let fz = z.to_f64();
        prop_assume!((fx - fz).abs() > 1e-6);
        prop_assert_eq!(x.sub(&z).signum() < 0, fx < fz);
    }

    #[test]
    fn text_formats_round_trip(inst in instance(), radius in proptest::option::of((1i64..500, 1i64..9))) {
        let inst = inst.with_radius(radius.map(|(p, q)| rat(p, q))).unwrap();
        let text = write_instance(&inst);
        prop_assert_eq!(&parse_instance(&text).unwrap(), &inst);
        let o = oracle_maps(&inst);
        for map in [AnyMap::Vis(o.vis), AnyMap::Colvis(o.colvis), AnyMap::Vorvis(o.vorvis)] {
            prop_assert_eq!(parse_map(&write_map(&map)).unwrap(), map);
        }
    }
}

#[test]
fn grazing_a_vertex_does_not_block() {
    let t = terrainvis::terrain::Terrain::from_ints(&[(0, 0), (2, 1), (3, 0), (4, 2)]).unwrap();
    let (a, b) = (Point2::from_ints(0, 0), Point2::from_ints(4, 2));
    assert!(oracle_sees(&t, &a, &b).unwrap());
    let t = terrainvis::terrain::Terrain::from_ints(&[(0, 0), (2, 2), (3, 0), (4, 2)]).unwrap();
    assert!(!oracle_sees(&t, &a, &b).unwrap());
}
