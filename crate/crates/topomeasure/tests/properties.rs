use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use topomeasure::builders::builtin;
use topomeasure::extend::{mu, TopMeasure};
use topomeasure::region::Region;
use topomeasure::solid::{self, Model};
use topomeasure::space::FiniteSpace;
use topomeasure::ssf::parse_descriptor;
use topomeasure::value::Value;

fn spaces() -> &'static [FiniteSpace] {
    static S: OnceLock<Vec<FiniteSpace>> = OnceLock::new();
    S.get_or_init(|| {
        let sphere = builtin("sphere(3)").unwrap();
        let n = sphere.index_of("n").unwrap();
        vec![
            builtin("interval(3)").unwrap(),
            builtin("circle(5)").unwrap(),
            builtin("line(5)").unwrap(),
            builtin("plane(2)").unwrap(),
            builtin("punctured-disk(2)").unwrap(),
            sphere.punctured(n).unwrap(),
            sphere,
        ]
    })
}

fn space_and_region() -> impl Strategy<Value = (&'static FiniteSpace, Region)> {
    (0..spaces().len(), any::<u128>()).prop_map(|(i, bits)| {
        let s = &spaces()[i];
        (s, Region::from_bits(bits) & s.points())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closure_and_interior_are_dual((s, r) in space_and_region()) {
        prop_assert_eq!(s.complement(s.closure(r)), s.interior(s.complement(r)));
        prop_assert!(r.is_subset(s.closure(r)));
        prop_assert!(s.interior(r).is_subset(r));
        prop_assert_eq!(s.closure(s.closure(r)), s.closure(r));
        prop_assert!(s.is_closed(s.closure(r)));
        prop_assert!(s.is_open(s.star(r)));
        prop_assert!(s.is_open(s.interior(r)));
    }

    #[test]
    fn components_partition_the_region((s, r) in space_and_region()) {
        let comps = s.components(r);
        let mut union = Region::EMPTY;
        for c in &comps {
            prop_assert!(s.is_connected(*c));
            prop_assert!(!c.is_empty());
            prop_assert!(union.is_disjoint(*c));
            union |= *c;
        }
        prop_assert_eq!(union, r);
        prop_assert_eq!(s.is_connected(r), comps.len() <= 1);
    }

    #[test]
    fn hull_is_extensive_and_idempotent((s, r) in space_and_region()) {
        let h = solid::hull_of(s, r);
        prop_assert!(r.is_subset(h));
        prop_assert_eq!(solid::hull_of(s, h), h);
        for c in solid::bounded_complement_components(s, r) {
            prop_assert!(c.is_subset(h));
        }
    }

    #[test]
    fn hull_is_monotone(i in 0..spaces().len(), seed in any::<usize>(), steps in prop::collection::vec(any::<usize>(), 0..12), cut in any::<usize>()) {
        let s = &spaces()[i];
        prop_assume!(!s.is_compact_space());
        let inner = s.points() - s.frontier();
        let cells: Vec<usize> = inner.iter().collect();
        let mut at = cells[seed % cells.len()];
        let mut walk = vec![at];
        for k in &steps {
            let next: Vec<usize> = (s.adjacent(at) & inner).iter().collect();
            if next.is_empty() {
                break;
            }
            at = next[k % next.len()];
            walk.push(at);
        }
        let cut = 1 + cut % walk.len();
        let a = s.closure(walk[..cut].iter().copied().collect());
        let b = s.closure(walk.iter().copied().collect());
        prop_assert!(s.is_connected(a) && s.is_bounded(b));
        prop_assert!(solid::hull_of(s, a).is_subset(solid::hull_of(s, b)));
        let (ua, ub) = (s.interior(b), s.interior(b) | s.star(Region::singleton(walk[0])) & inner);
        if s.is_connected(ua) && s.is_connected(ub) && s.is_bounded(ub) {
            prop_assert!(solid::hull_of(s, ua).is_subset(solid::hull_of(s, ub)));
        }
    }

    #[test]
    fn kmax_is_the_largest_compact_inside((s, r) in space_and_region()) {
        let u = s.star(r);
        let k = s.kmax(u);
        prop_assert!(k.is_subset(u));
        prop_assert!(s.is_compact(k));
        for x in u.iter() {
            let below = s.closure(Region::singleton(x));
            if below.is_subset(u) && s.is_compact(below) {
                prop_assert!(k.contains(x));
            }
        }
    }

    #[test]
    fn descriptor_round_trip_is_byte_identical((s, _r) in space_and_region()) {
        let text = s.to_descriptor();
        let back = FiniteSpace::from_descriptor(&text).unwrap();
        prop_assert_eq!(back.to_descriptor(), text);
        let lit = s.format_region(_r);
        prop_assert_eq!(back.parse_region(&lit).unwrap(), _r);
    }

    #[test]
    fn values_add_and_subtract(a in 0i64..1000, b in 1i64..50, c in 0i64..1000, d in 1i64..50) {
        let x = Value::ratio(a, b);
        let y = Value::ratio(c, d);
        prop_assert_eq!((x + y).checked_sub(y).unwrap(), x);
        prop_assert_eq!(x + Value::Infinite, Value::Infinite);
        prop_assert!(x <= x + y);
        prop_assert_eq!(x.to_string().parse::<Value>().unwrap(), x);
    }
}

fn plane_measure() -> &'static TopMeasure {
    static M: OnceLock<TopMeasure> = OnceLock::new();
    M.get_or_init(|| {
        let model = Model::new(builtin("plane(2)").unwrap());
        let l = parse_descriptor(Arc::clone(&model), "measure w=@uniform").unwrap();
        TopMeasure::extend(Arc::new(l))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The extension of a restricted measure is the measure itself on open
    /// and closed sets, hence monotone and additive.
    #[test]
    fn restricted_measure_extends_to_itself(bits in any::<u128>(), other in any::<u128>()) {
        let m = plane_measure();
        let s = m.space();
        let l = m.lambda().unwrap();
        let u = s.star(Region::from_bits(bits) & s.points());
        let f = s.closure(Region::from_bits(other) & s.points());
        let weight = |r: Region| Value::int(r.iter().filter(|&x| s.vertices().contains(x)).count() as i64);
        prop_assert_eq!(mu(l, u).unwrap(), weight(u));
        prop_assert_eq!(mu(l, f).unwrap(), weight(f));
        if f.is_subset(u) {
            prop_assert!(m.value(f).unwrap() <= m.value(u).unwrap());
        }
    }
}
