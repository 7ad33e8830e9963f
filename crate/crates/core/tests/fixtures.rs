use std::path::PathBuf;

use tdvpsim::circuits::{heisenberg_1d, ising_2d, load_circuit, save_circuit, Circuit};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn assert_matches_golden(built: &Circuit, name: &str) {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    assert_eq!(built.to_json().unwrap().trim_end(), text.trim_end(), "{name} drifted from the builder");
    assert_eq!(&load_circuit(fixture(name)).unwrap(), built);
}

#[test]
fn open_heisenberg_n5_golden() {
    assert_matches_golden(&heisenberg_1d(5, 1.0, 1.0, 0.1, 1, false).unwrap(), "heisenberg_open_n5.json");
}

// rows before columns, each as even-odd then odd-even
#[test]
fn ising_3x3_golden() {
    assert_matches_golden(&ising_2d(3, 3, 1.0, 1.0, 0.1, 1).unwrap(), "ising2d_3x3.json");
}

#[test]
fn save_then_load_is_identity() {
    let c = heisenberg_1d(6, 0.7, -0.3, 0.05, 3, true).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    save_circuit(&c, &path).unwrap();
    assert_eq!(load_circuit(&path).unwrap(), c);
}

#[test]
fn bad_gate_is_named() {
    let text = r#"{"version":1,"num_qubits":3,"seed":null,"layer_marks":[],
        "gates":[{"name":"h","qubits":[1],"params":[]},{"name":"cx","qubits":[0,2],"params":[]}]}"#;
    let err = Circuit::from_json(text).unwrap_err().to_string();
    assert!(err.contains("gate #1") && err.contains("cx"), "{err}");

    let text = r#"{"version":1,"num_qubits":3,"seed":null,"layer_marks":[],
        "gates":[{"name":"toffoli","qubits":[1,2,3],"params":[]}]}"#;
    let err = Circuit::from_json(text).unwrap_err().to_string();
    assert!(err.contains("gate #0") && err.contains("toffoli"), "{err}");
}
