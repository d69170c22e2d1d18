use ceqec::circuitfile::{parse_circuit, serialize_circuit, CircuitFile};
use ceqec::twirl::Sweep;
use ceqec_core::circuit::{Gate, GateKind, Layer, LayeredCircuit};
use proptest::prelude::*;

const ONE: [GateKind; 4] = [GateKind::PauliX, GateKind::PauliZ, GateKind::MeasX, GateKind::MeasZ];
const TWO: [GateKind; 4] = [GateKind::CX, GateKind::C0X, GateKind::CZ, GateKind::C0Z];

/// Layers of gates on disjoint qubits: each layer is a qubit order plus a
/// list of (arity, kind) picks consumed from that order.
fn circuit() -> impl Strategy<Value = LayeredCircuit> {
    (1usize..4, 0usize..5).prop_flat_map(|(nd, na)| {
        let n = nd + na;
        let layer = (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec((0usize..3, 0usize..4), 0..4));
        prop::collection::vec(layer, 1..6).prop_map(move |layers| {
            let mut c = LayeredCircuit::with_counts(nd, na);
            for (order, picks) in layers {
                let mut free = order.into_iter();
                let mut gates = Vec::new();
                for (arity, k) in picks {
                    match arity {
                        0 => {
                            if let Some(q) = free.next() {
                                gates.push(Gate::new(ONE[k].clone(), vec![q]));
                            }
                        }
                        _ => {
                            if let (Some(a), Some(b)) = (free.next(), free.next()) {
                                gates.push(Gate::two(TWO[k].clone(), a, b));
                            }
                        }
                    }
                }
                c.push_layer(Layer::new(gates));
            }
            c
        })
    })
}

proptest! {
    #[test]
    fn circuits_round_trip(c in circuit()) {
        prop_assume!(c.validate().is_ok());
        let f = CircuitFile { circuit: c, meta: None };
        let text = serialize_circuit(&f);
        let back = parse_circuit(&text).unwrap();
        prop_assert_eq!(back.circuit.depth(), f.circuit.depth());
        prop_assert_eq!(back.circuit.roles(), f.circuit.roles());
        prop_assert_eq!(serialize_circuit(&back), text);
    }

    #[test]
    fn sweeps_hit_both_ends(a in -5.0f64..5.0, b in -5.0f64..5.0, n in 2usize..40) {
        let s: Sweep = format!("theta={a}:{b}:{n}").parse().unwrap();
        prop_assert_eq!(s.values.len(), n);
        prop_assert_eq!(s.values[0], a);
        prop_assert!((s.values[n - 1] - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}
