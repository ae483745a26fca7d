use qpip::mathcore::CodeParams;
use qpip::protocol::{
    estimate, exact_acceptance, replay_verifier, run_protocol, Circuit, Gate, MessageKind, Outcome, Party, Payload,
    ProverStrategy, RunSpec, VerifierConfig,
};
use qpip::rng::RandomStream;

fn poly_circuit(gates: Vec<Gate>) -> Circuit {
    Circuit::new(1, gates).unwrap()
}

fn run(circuit: &Circuit, input: &[u64], strategy: &ProverStrategy, config: &VerifierConfig, i: u64) -> qpip::protocol::TrialResult {
    run_protocol(circuit, input, strategy, config, &mut RandomStream::for_trial(config.seed, i)).unwrap()
}

#[test]
fn honest_bell_run_is_accepted_exactly() {
    let bell = Circuit::bell();
    for c in [4, 3] {
        let cfg = VerifierConfig::clifford(11).with_memory_bound(c);
        for i in 0..20 {
            let r = run(&bell, &[0, 0], &ProverStrategy::Honest, &cfg, i);
            assert_eq!(r.outcome, Outcome::Accepted);
            assert!(r.logical_fidelity.unwrap() > 1.0 - 1e-9);
            assert!(r.peak_verifier_memory <= c);
            for w in 0..2 {
                assert!((r.output_marginals[w][0] - 0.5).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn sequenced_verifier_needs_three_registers() {
    let cfg = VerifierConfig::clifford(2).with_memory_bound(2);
    let r = run(&Circuit::bell(), &[0, 0], &ProverStrategy::Honest, &cfg, 0);
    assert!(matches!(r.outcome, Outcome::Aborted(_)));
    assert!(r.transcript.aborted.is_some());
    assert!(r.peak_verifier_memory <= 2);
}

#[test]
fn polynomial_gate_examples() {
    let params = CodeParams::desk();
    let cfg = VerifierConfig::polynomial(params, 5).with_memory_bound(3);
    let xq = poly_circuit(vec![Gate::Xq { wire: 0 }]);
    let ff = poly_circuit(vec![Gate::Fourier { wire: 0 }, Gate::Fourier { wire: 0 }]);
    for i in 0..10 {
        let r = run(&xq, &[0], &ProverStrategy::Honest, &cfg, i);
        assert!(r.accepted);
        assert!((r.output_marginals[0][1] - 1.0).abs() < 1e-9);
        let r = run(&ff, &[1], &ProverStrategy::Honest, &cfg, i);
        assert!(r.accepted);
        assert!((r.output_marginals[0][4] - 1.0).abs() < 1e-9);
        assert!(r.logical_fidelity.unwrap() > 1.0 - 1e-9);
    }
}

#[test]
fn polynomial_protocol_is_classical_after_encoding() {
    let cfg = VerifierConfig::polynomial(CodeParams::desk(), 1);
    let c = poly_circuit(vec![Gate::Fourier { wire: 0 }, Gate::Xq { wire: 0 }, Gate::Fourier { wire: 0 }]);
    let r = run(&c, &[3], &ProverStrategy::Honest, &cfg, 0);
    let quantum: Vec<_> = r.transcript.messages.iter().filter(|m| m.kind == MessageKind::Quantum).collect();
    assert_eq!(quantum.len(), 2);
    assert_eq!(quantum[0].step, 0);
    assert!(r.transcript.messages.iter().any(|m| matches!(m.payload, Payload::ApplyFourier { .. })));
}

#[test]
fn transcript_registers_alternate_owners() {
    let cfg = VerifierConfig::clifford(9).with_memory_bound(3);
    let r = run(&Circuit::bell(), &[1, 0], &ProverStrategy::Honest, &cfg, 0);
    for m in r.transcript.messages.iter().filter(|m| matches!(m.payload, Payload::Registers { .. })) {
        assert_ne!(m.sender, m.receiver);
        assert!(matches!(m.sender, Party::Verifier | Party::Prover));
    }
    let lines = r.transcript.to_json_lines();
    assert_eq!(lines.lines().count(), r.transcript.len());
}

#[test]
fn replay_agrees_with_recorded_runs() {
    let bell = Circuit::bell();
    let strategies = [
        ProverStrategy::Honest,
        ProverStrategy::FixedPauli { step: 1, wire: 1, pauli: "ZX".into() },
        ProverStrategy::NoMemory,
        ProverStrategy::MeasureAndResend,
    ];
    for c in [4, 3, 2] {
        let mut cfg = VerifierConfig::clifford(21).with_memory_bound(c);
        cfg.log_keys = true;
        for s in &strategies {
            for i in 0..10 {
                let r = run(&bell, &[0, 1], s, &cfg, i);
                let report = replay_verifier(&bell, &cfg, &r).unwrap();
                assert!(report.consistent(), "{s:?} c={c} trial {i}: {report:?}");
            }
        }
    }
    let mut cfg = VerifierConfig::polynomial(CodeParams::desk(), 4);
    cfg.log_keys = true;
    let c = poly_circuit(vec![Gate::Fourier { wire: 0 }, Gate::Xq { wire: 0 }]);
    for s in [ProverStrategy::Honest, ProverStrategy::MeasureAndResend] {
        for i in 0..10 {
            let r = run(&c, &[2], &s, &cfg, i);
            assert!(replay_verifier(&c, &cfg, &r).unwrap().consistent());
        }
    }
}

#[test]
fn replay_detects_a_flipped_check() {
    let bell = Circuit::bell();
    let cfg = VerifierConfig::clifford(3);
    let mut r = run(&bell, &[0, 0], &ProverStrategy::Honest, &cfg, 0);
    r.transcript.checks[2].passed = false;
    assert!(!replay_verifier(&bell, &cfg, &r).unwrap().consistent());
}

#[test]
fn estimate_is_independent_of_parallelism() {
    let spec = RunSpec {
        circuit: Circuit::bell(),
        input: vec![0, 0],
        strategy: ProverStrategy::RandomUnitary { step: 1, wire: 0, theta: 0.7 },
        config: VerifierConfig::clifford(77),
    };
    let a = estimate(&spec, 200, 1).unwrap();
    let b = estimate(&spec, 200, 4).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.accepted + a.rejected + a.aborted, 200);
}

#[test]
fn identity_attack_matches_honest() {
    let spec = RunSpec {
        circuit: Circuit::bell(),
        input: vec![0, 0],
        strategy: ProverStrategy::FixedPauli { step: 0, wire: 0, pauli: "II".into() },
        config: VerifierConfig::clifford(5),
    };
    assert_eq!(estimate(&spec, 100, 2).unwrap().acceptance_rate, 1.0);
}

#[test]
fn single_coordinate_shift_is_always_caught() {
    let cfg = VerifierConfig::polynomial(CodeParams::desk(), 8);
    let c = poly_circuit(vec![Gate::Xq { wire: 0 }]);
    let s = ProverStrategy::FixedPauli { step: 0, wire: 0, pauli: "1:0,0:0,0:0".into() };
    assert_eq!(exact_acceptance(&c, &[0], &s, &cfg).unwrap(), 0.0);
    let spec = RunSpec { circuit: c, input: vec![0], strategy: s, config: cfg };
    assert_eq!(estimate(&spec, 200, 2).unwrap().accepted, 0);
}
