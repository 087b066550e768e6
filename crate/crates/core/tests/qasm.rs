mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use ditkit_core::qasm::{emit, parse, parse_bytes, parse_expr, ParseDiagnostic};
use ditkit_core::{Circuit, Error, GateKind, Instruction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REFERENCE_PROGRAM: &str = "DITQASM 2.0;
qreg reg_1 [2][2, 3];
qreg reg_2 [2][4, 7];
creg meas[4];
h reg_2[0] ctl reg_1[0] reg_1[1] [0,0];
csum reg_2[0], reg_1[0];
rxy (0, 2, pi, pi/2) reg_1[1]; 
rxy (0, 1, pi, pi/2) reg_2[1]; 
measure reg_1[0] -> meas[0];
measure reg_1[1] -> meas[1];
measure reg_2[0] -> meas[2];
measure reg_2[1] -> meas[3];
";

fn diagnostics(text: &str) -> Vec<ParseDiagnostic> {
    match parse(text) {
        Err(Error::Parse(d)) => d,
        other => panic!("expected diagnostics, got {other:?}"),
    }
}

#[test]
fn reference_program_structure() {
    let c = parse(REFERENCE_PROGRAM).unwrap();
    assert_eq!(c.qregs()[0].name, "reg_1");
    assert_eq!(c.qregs()[0].dims, vec![2, 3]);
    assert_eq!(c.qregs()[1].name, "reg_2");
    assert_eq!(c.qregs()[1].dims, vec![4, 7]);
    assert_eq!(c.cregs()[0].name, "meas");
    assert_eq!(c.cregs()[0].size, 4);
    assert_eq!(c.dims(), &[2, 3, 4, 7]);
    let gates: Vec<_> = c.gates().collect();
    assert_eq!(gates.len(), 4);
    assert_eq!(gates[0].kind, GateKind::H);
    assert_eq!(gates[0].lines, vec![2]);
    assert_eq!(gates[0].control.as_ref().unwrap().controls, vec![(0, 0), (1, 0)]);
    assert_eq!(gates[1].kind, GateKind::Csum);
    assert_eq!(gates[1].lines, vec![2, 0]);
    assert_eq!(gates[2].kind, GateKind::Rxy { l1: 0, l2: 2, theta: PI, phi: PI / 2.0 });
    assert_eq!(gates[2].lines, vec![1]);
    assert_eq!(gates[3].kind, GateKind::Rxy { l1: 0, l2: 1, theta: PI, phi: PI / 2.0 });
    assert_eq!(gates[3].lines, vec![3]);
    let measures: Vec<_> = c
        .instructions()
        .iter()
        .filter_map(|i| match i {
            Instruction::Measure { line, creg, cell } => Some((*line, *creg, *cell)),
            _ => None,
        })
        .collect();
    assert_eq!(measures, vec![(0, 0, 0), (1, 0, 1), (2, 0, 2), (3, 0, 3)]);
}

#[test]
fn reference_program_roundtrip() {
    let c = parse(REFERENCE_PROGRAM).unwrap();
    let text = emit(&c);
    let again = parse(&text).unwrap();
    assert_eq!(again, c);
    assert_eq!(emit(&again), text);
    assert!(text.contains("rxy (0, 2, 3.1415926535897931, 1.5707963267948966) reg_1[1];"));
}

#[test]
fn minimal_program() {
    let c = parse("DITQASM 2.0; qreg q [1][3]; x q[0];").unwrap();
    assert_eq!(c.dims(), &[3]);
    assert_eq!(c.gates().count(), 1);
    assert_eq!(c.gates().next().unwrap().kind, GateKind::X);
}

#[test]
fn empty_register_emits_two_lines() {
    let c = parse("DITQASM 2.0; qreg q [2][3, 5];").unwrap();
    assert_eq!(emit(&c), "DITQASM 2.0;\nqreg q [2][3, 5];\n");
}

#[test]
fn comments_and_whitespace() {
    let c = parse("// leading\nDITQASM 2.0;\n  qreg q [1][3]; // trailing\n\n x   q[0] ;").unwrap();
    assert_eq!(c.gates().count(), 1);
}

#[test]
fn level_out_of_range() {
    let d = diagnostics("DITQASM 2.0;\nqreg q [1][3];\nrxy (0, 3, pi, 0) q[0];\n");
    assert_eq!(d.len(), 1);
    assert!(d[0].message.contains("subspace level 3 ≥ dimension 3"), "{}", d[0]);
    assert_eq!(d[0].span.line, 3);
}

#[test]
fn error_catalogue() {
    let cases = [
        ("", "missing DITQASM header"),
        ("DITQASM 3.0;", "2.0"),
        ("DITQASM 2.0; qreg q [1][3]; foo q[0];", "unknown gate"),
        ("DITQASM 2.0; qreg q [1][3]; qreg q [1][2];", "q"),
        ("DITQASM 2.0; qreg q [1][3]; x q[1];", "1"),
        ("DITQASM 2.0; qreg q [2][3]; x q[0];", "2"),
        ("DITQASM 2.0; qreg q [2][3,3]; x q[0] ctl q[1] [3];", "3"),
        ("DITQASM 2.0; qreg q [1][3]; rxy (0, 1) q[0];", "4"),
        ("DITQASM 2.0; qreg q [1][3]; rz (0, 1, 1/0) q[0];", "zero"),
        ("DITQASM 2.0; qreg q [1][3]; x q[0]", ";"),
    ];
    for (text, needle) in cases {
        let d = diagnostics(text);
        assert!(!d.is_empty(), "{text}");
        let all: String = d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n");
        assert!(all.contains(needle), "{text}: {all}");
    }
}

#[test]
fn diagnostics_are_sorted_and_collected() {
    let d = diagnostics("DITQASM 2.0;\nqreg q [1][3];\nfoo q[0];\nx q[4];\nbar q[0];\n");
    assert!(d.len() >= 3);
    assert!(d.windows(2).all(|w| (w[0].span.line, w[0].span.column) <= (w[1].span.line, w[1].span.column)));
}

#[test]
fn expressions() {
    assert_eq!(parse_expr("pi/2").unwrap(), 1.5707963267948966);
    assert_eq!(parse_expr("-pi").unwrap(), -PI);
    assert!((parse_expr("3*pi/4 + 0.5").unwrap() - 2.856194490192345).abs() < 1e-15);
    assert!(parse_expr("1/0").is_err());
    assert!(parse_expr("1 +").is_err());
}

#[test]
fn invalid_utf8_is_a_diagnostic() {
    assert!(matches!(parse_bytes(b"DITQASM 2.0;\xff\xfe"), Err(Error::Parse(_))));
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new();
    c.add_qreg("a", &[2, 3]).unwrap();
    c.add_qreg("b", &[4]).unwrap();
    c.add_creg("m", 3).unwrap();
    let dims = [2usize, 3, 4];
    for _ in 0..15 {
        let q = rng.random_range(0..3);
        let r = (q + rng.random_range(1..3)) % 3;
        let angle = rng.random_range(-10.0..10.0);
        match rng.random_range(0..9) {
            0 => c.gate(GateKind::S, &[q]).unwrap(),
            1 => c.gate(GateKind::Rxy { l1: 0, l2: dims[q] - 1, theta: angle, phi: rng.random() }, &[q]).unwrap(),
            2 => c.gate(GateKind::Rz { l1: 0, l2: 1, theta: angle }, &[q]).unwrap(),
            3 => c.gate(GateKind::Csum, &[q, r]).unwrap(),
            4 => c.gate(GateKind::Ms { theta: angle }, &[q, r]).unwrap(),
            5 => c.gate(GateKind::Ls { theta: angle }, &[q, r]).unwrap(),
            6 => c.gate(GateKind::Pswap { a: [0, 0], b: [1, 1], theta: angle, phi: 0.25 }, &[q, r]).unwrap(),
            7 => c.gate(GateKind::Cu(Arc::new(common::haar(dims[q], rng))), &[q]).unwrap(),
            _ => c.controlled_gate(GateKind::H, &[q], &[(r, rng.random_range(0..dims[r]))]).unwrap(),
        };
    }
    for k in 0..3 {
        c.push_measure(k, 0, k).unwrap();
    }
    c
}

#[test]
fn random_circuit_roundtrips_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let c = random_circuit(&mut rng);
        let back = parse(&emit(&c)).unwrap();
        assert_eq!(back, c);
    }
}

fn check_spans(text: &str, d: &[ParseDiagnostic]) {
    let lines = text.split('\n').count();
    for x in d {
        assert!(x.span.start <= x.span.end && x.span.end <= text.len(), "{x:?}");
        assert!(x.span.line >= 1 && x.span.line <= lines && x.span.column >= 1, "{x:?}");
    }
}

proptest! {
    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        if let Err(Error::Parse(d)) = parse_bytes(&bytes) {
            prop_assert!(!d.is_empty());
            if let Ok(text) = std::str::from_utf8(&bytes) {
                check_spans(text, &d);
            }
        }
    }

    #[test]
    fn mutated_programs_never_panic(cut in 0usize..400, insert in "[ -~]{0,6}") {
        let mut text = REFERENCE_PROGRAM.to_string();
        let at = text.char_indices().map(|(i, _)| i).nth(cut % REFERENCE_PROGRAM.chars().count()).unwrap_or(0);
        text.insert_str(at, &insert);
        if let Err(e) = parse(&text) {
            match e {
                Error::Parse(d) => check_spans(&text, &d),
                other => prop_assert!(false, "unexpected error kind {other:?}"),
            }
        }
    }

    #[test]
    fn token_soup_never_panics(words in proptest::collection::vec(
        prop_oneof![
            Just("DITQASM"), Just("2.0"), Just(";"), Just("qreg"), Just("creg"), Just("q"), Just("["),
            Just("]"), Just("("), Just(")"), Just(","), Just("ctl"), Just("measure"), Just("->"),
            Just("rxy"), Just("x"), Just("pi"), Just("1"), Just("0"), Just("-"), Just("/"), Just("3"),
        ],
        0..40,
    )) {
        let text = words.join(" ");
        if let Err(Error::Parse(d)) = parse(&text) {
            check_spans(&text, &d);
        }
    }
}
