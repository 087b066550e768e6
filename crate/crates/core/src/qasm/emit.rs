use std::fmt::Write;

use crate::circuit::{Circuit, Instruction};
use crate::gate::GateSpec;

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// positional notation for exponents in `[-5, 17)`. Always round-trips.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if (-5..17).contains(&exp) {
        let mut out = String::from(sign);
        if exp < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat('0').take((-exp - 1) as usize));
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                out.extend(std::iter::repeat('0').take(int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
        out
    } else {
        let (head, tail) = digits.split_at(1);
        let frac = if tail.is_empty() { String::new() } else { format!(".{tail}") };
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{head}{frac}e{esign}{:02}", exp.abs())
    }
}

fn operand(circuit: &Circuit, line: usize) -> String {
    let (reg, idx) = circuit.register_of(line).expect("line belongs to a register");
    format!("{}[{idx}]", circuit.qregs()[reg].name)
}

fn gate_line(circuit: &Circuit, g: &GateSpec, out: &mut String) {
    out.push_str(g.name());
    let params = g.kind.params();
    if !params.is_empty() {
        let levels = g.kind.level_param_count();
        let parts: Vec<String> = params
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < levels { format!("{}", v as usize) } else { format_float(v) })
            .collect();
        let _ = write!(out, " ({})", parts.join(", "));
    }
    let targets: Vec<String> = g.lines.iter().map(|&l| operand(circuit, l)).collect();
    let _ = write!(out, " {}", targets.join(", "));
    if let Some(ctl) = &g.control {
        let lines: Vec<String> = ctl.lines().map(|l| operand(circuit, l)).collect();
        let levels: Vec<String> = ctl.levels().map(|v| v.to_string()).collect();
        let _ = write!(out, " ctl {} [{}]", lines.join(" "), levels.join(","));
    }
    out.push_str(";\n");
}

/// Canonical DITQASM text: header, registers in declaration order, then one
/// statement per line. The initial state is not part of the language and is
/// not printed.
pub fn emit(circuit: &Circuit) -> String {
    let mut out = String::from("DITQASM 2.0;\n");
    for r in circuit.qregs() {
        let dims: Vec<String> = r.dims.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "qreg {} [{}][{}];", r.name, r.size(), dims.join(", "));
    }
    for r in circuit.cregs() {
        let _ = writeln!(out, "creg {}[{}];", r.name, r.size);
    }
    for inst in circuit.instructions() {
        match inst {
            Instruction::Gate(g) => gate_line(circuit, g, &mut out),
            Instruction::Measure { line, creg, cell } => {
                let _ = writeln!(
                    out,
                    "measure {} -> {}[{cell}];",
                    operand(circuit, *line),
                    circuit.cregs()[*creg].name
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(format_float(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(format_float(std::f64::consts::FRAC_PI_2), "1.5707963267948966");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(-2.0), "-2");
        assert_eq!(format_float(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_float(1e20), "1e+20");
        assert_eq!(format_float(0.0001), "0.0001");
        assert_eq!(format_float(-0.0), "-0");
    }

    proptest! {
        #[test]
        fn g17_roundtrips(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = format_float(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
