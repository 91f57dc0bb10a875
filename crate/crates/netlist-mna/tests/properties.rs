use netlist_mna::{
    ac_sweep, kcl_residual, parse_netlist, serialize_netlist, solve, stamp, tellegen_gap,
    Element, ElementKind, Netlist, SweepDirective,
};
use proptest::prelude::*;
use sweep_analysis::Scale;

fn kind_strategy() -> impl Strategy<Value = ElementKind> {
    prop_oneof![
        Just(ElementKind::R),
        Just(ElementKind::L),
        Just(ElementKind::C),
    ]
}

fn value_for(kind: ElementKind) -> BoxedStrategy<f64> {
    match kind {
        ElementKind::R => (1.0f64..1e3).boxed(),
        ElementKind::L => (1e-4f64..1e-1).boxed(),
        ElementKind::C => (1e-8f64..1e-5).boxed(),
        ElementKind::Vsrc => (0.5f64..10.0).boxed(),
    }
}

/// Series chain 1 - 2 - ... with shunts to ground; always solvable and
/// connected, exactly one source.
fn ladder_strategy() -> impl Strategy<Value = Netlist> {
    (2usize..7, proptest::collection::vec(any::<bool>(), 6))
        .prop_flat_map(|(rungs, shunt_mask)| {
            let mut element_strats = Vec::new();
            for k in 0..rungs {
                element_strats.push(
                    kind_strategy()
                        .prop_flat_map(move |kind| {
                            value_for(kind).prop_map(move |v| (kind, v, k))
                        })
                        .boxed(),
                );
            }
            (element_strats, Just(shunt_mask))
        })
        .prop_map(|(series, shunt_mask)| {
            let mut elements = vec![Element {
                kind: ElementKind::Vsrc,
                name: "V1".into(),
                node_a: 1,
                node_b: 0,
                value: 1.0,
                phase: 0.0,
            }];
            let rungs = series.len();
            for (kind, value, k) in series {
                let letter = match kind {
                    ElementKind::R => 'R',
                    ElementKind::L => 'L',
                    ElementKind::C => 'C',
                    ElementKind::Vsrc => unreachable!(),
                };
                elements.push(Element {
                    kind,
                    name: format!("{letter}s{k}"),
                    node_a: k + 1,
                    node_b: k + 2,
                    value,
                    phase: 0.0,
                });
                // shunt resistor keeps every junction referenced to ground
                if k + 1 == rungs || shunt_mask[k] {
                    elements.push(Element {
                        kind: ElementKind::R,
                        name: format!("Rg{k}"),
                        node_a: k + 2,
                        node_b: 0,
                        value: 75.0,
                        phase: 0.0,
                    });
                }
            }
            Netlist {
                elements,
                sweep: SweepDirective {
                    scale: Scale::Lin,
                    points: 3,
                    start: 1e3,
                    stop: 1e4,
                },
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn serialize_then_parse_is_identity(nl in ladder_strategy()) {
        let text = serialize_netlist(&nl);
        let parsed = parse_netlist(&text).unwrap();
        prop_assert_eq!(parsed, nl);
    }

    #[test]
    fn rlc_subblock_is_symmetric(nl in ladder_strategy(), omega in 1e2f64..1e5) {
        let sys = stamp(&nl, omega).unwrap();
        let m = sys.node_ids.len();
        for i in 0..m {
            for j in 0..m {
                prop_assert_eq!(sys.matrix[i][j], sys.matrix[j][i]);
            }
        }
    }

    #[test]
    fn kirchhoff_and_power_balance(nl in ladder_strategy(), omega in 1e2f64..1e5) {
        let sol = solve(&stamp(&nl, omega).unwrap()).unwrap();
        prop_assert!(kcl_residual(&sol, &nl) <= 1e-9);
        prop_assert!(tellegen_gap(&sol, &nl) <= 1e-9);
    }

    #[test]
    fn element_order_does_not_change_the_solution(
        nl in ladder_strategy(),
        omega in 1e2f64..1e5,
        seed in any::<u64>(),
    ) {
        let base = solve(&stamp(&nl, omega).unwrap()).unwrap();

        // cheap deterministic shuffle of the element lines
        let mut shuffled = nl.clone();
        let n = shuffled.elements.len();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.elements.swap(i, j);
        }
        let other = solve(&stamp(&shuffled, omega).unwrap()).unwrap();

        let scale = base.source_current.norm().max(1e-30);
        prop_assert!((base.source_current - other.source_current).norm() <= 1e-12 * scale);
        for &id in base.node_ids() {
            let (va, vb) = (base.voltage(id), other.voltage(id));
            let s = va.norm().max(vb.norm()).max(1e-30);
            prop_assert!((va - vb).norm() <= 1e-12 * s, "node {} differs", id);
        }
    }

    #[test]
    fn sweep_power_is_consistent_with_current(nl in ladder_strategy()) {
        let sw = ac_sweep(&nl).unwrap();
        // delivered P_R is a sum of resistor dissipations, never negative
        for (k, p) in sw.p_r.iter().enumerate() {
            prop_assert!(*p >= 0.0, "negative dissipation {} at index {}", p, k);
            prop_assert!(sw.source_currents[k].norm().is_finite());
        }
    }
}
