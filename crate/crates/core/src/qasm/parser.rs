use super::lexer::{describe, lex, Tok, Token};
use super::{ParseDiagnostic, SourceSpan};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{ControlSpec, GateKind, GateSpec, GATE_NAMES};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str, tokens: &'a [Token]) -> Self {
        Cursor { src, tokens, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    /// Advances and returns the index of the consumed token. Never moves past `Eof`.
    pub fn bump(&mut self) -> usize {
        let idx = self.pos;
        if !matches!(self.tokens[idx].tok, Tok::Eof) {
            self.pos += 1;
        }
        idx
    }

    pub fn span_of(&self, idx: usize) -> SourceSpan {
        let t = &self.tokens[idx];
        SourceSpan::from_offsets(self.src, t.start, t.end)
    }

    pub fn span_here(&self) -> SourceSpan {
        self.span_of(self.pos)
    }

    fn span_between(&self, first: usize, last: usize) -> SourceSpan {
        SourceSpan::from_offsets(self.src, self.tokens[first].start, self.tokens[last].end)
    }

    pub fn expect(&mut self, tok: &Tok, context: &str) -> Result<usize, ParseDiagnostic> {
        if self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(ParseDiagnostic::error(
                format!("expected {} {context}, found {}", describe(tok), describe(self.peek())),
                self.span_here(),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseDiagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump())),
            other => Err(ParseDiagnostic::error(
                format!("expected {what}, found {}", describe(&other)),
                self.span_here(),
            )),
        }
    }

    fn int(&mut self, what: &str) -> Result<usize, ParseDiagnostic> {
        match *self.peek() {
            Tok::Number { value, integral: true } if value < 1e15 => {
                self.bump();
                Ok(value as usize)
            }
            ref other => Err(ParseDiagnostic::error(
                format!("expected {what} (a non-negative integer), found {}", describe(other)),
                self.span_here(),
            )),
        }
    }

    /// Skips past the next `;` (or to end of input).
    /// Skips to the end of the current statement unless it already ended.
    fn recover(&mut self) {
        if self.pos > 0 && self.tokens[self.pos - 1].tok == Tok::Semi {
            return;
        }
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }
}

struct Operand {
    reg: String,
    index: usize,
    span: SourceSpan,
}

struct Parser<'a> {
    cur: Cursor<'a>,
    circuit: Circuit,
}

type Step<T> = std::result::Result<T, ParseDiagnostic>;

impl Parser<'_> {
    fn operand(&mut self) -> Step<Operand> {
        let (reg, first) = self.cur.ident("a register name")?;
        self.cur.expect(&Tok::LBracket, "after register name")?;
        let index = self.cur.int("an index")?;
        let last = self.cur.expect(&Tok::RBracket, "after index")?;
        Ok(Operand { reg, index, span: self.cur.span_between(first, last) })
    }

    fn qudit_line(&self, op: &Operand) -> Step<usize> {
        if let Some(line) = self.circuit.line_of(&op.reg, op.index) {
            return Ok(line);
        }
        let msg = match self.circuit.qregs().iter().find(|r| r.name == op.reg) {
            Some(r) => format!("index {} out of range for register `{}` of size {}", op.index, op.reg, r.size()),
            None if self.circuit.creg_index(&op.reg).is_some() => {
                format!("`{}` is a classical register, expected a quantum operand", op.reg)
            }
            None => format!("unknown quantum register `{}`", op.reg),
        };
        Err(ParseDiagnostic::error(msg, op.span))
    }

    fn header(&mut self) -> Step<()> {
        match self.cur.peek() {
            Tok::Ident(s) if s == "DITQASM" => {
                self.cur.bump();
            }
            _ => {
                return Err(ParseDiagnostic::error("missing DITQASM header", self.cur.span_here())
                    .with_hint("programs start with `DITQASM 2.0;`"))
            }
        }
        let version = self.cur.pos;
        match self.cur.peek() {
            Tok::Number { .. } => {
                self.cur.bump();
            }
            other => {
                return Err(ParseDiagnostic::error(
                    format!("expected a version number, found {}", describe(other)),
                    self.cur.span_here(),
                ))
            }
        }
        let text = self.cur.tokens[version].text(self.cur.src);
        if text != "2.0" {
            return Err(ParseDiagnostic::error(
                format!("unsupported DITQASM version `{text}`"),
                self.cur.span_of(version),
            )
            .with_hint("only version 2.0 is supported"));
        }
        self.cur.expect(&Tok::Semi, "after the header")?;
        Ok(())
    }

    fn statement(&mut self) -> Step<()> {
        let start = self.cur.pos;
        let (word, _) = self.cur.ident("a statement")?;
        match word.as_str() {
            "qreg" => self.qreg(start),
            "creg" => self.creg(start),
            "measure" => self.measure(start),
            "DITQASM" => Err(ParseDiagnostic::error("duplicate DITQASM header", self.cur.span_of(start))),
            _ => self.gate(word, start),
        }
    }

    fn lift(&self, e: Error, start: usize) -> ParseDiagnostic {
        let end = self.cur.pos.saturating_sub(1).max(start);
        ParseDiagnostic::error(e.to_string(), self.cur.span_between(start, end))
    }

    fn qreg(&mut self, start: usize) -> Step<()> {
        let (name, _) = self.cur.ident("a register name")?;
        self.cur.expect(&Tok::LBracket, "before the register size")?;
        let size_tok = self.cur.pos;
        let size = self.cur.int("a register size")?;
        self.cur.expect(&Tok::RBracket, "after the register size")?;
        if size == 0 {
            return Err(ParseDiagnostic::error("register size must be positive", self.cur.span_of(size_tok)));
        }
        let list_start = self.cur.expect(&Tok::LBracket, "before the dimension list").map_err(|d| {
            d.with_hint("qudit registers list their dimensions, e.g. `qreg q [2][3, 3];`")
        })?;
        let mut dims = vec![self.cur.int("a dimension")?];
        while *self.cur.peek() == Tok::Comma {
            self.cur.bump();
            dims.push(self.cur.int("a dimension")?);
        }
        let list_end = self.cur.expect(&Tok::RBracket, "after the dimension list")?;
        self.cur.expect(&Tok::Semi, "after qreg")?;
        if dims.len() != size {
            return Err(ParseDiagnostic::error(
                format!("dimension list has {} entries but register `{name}` declares {size} qudits", dims.len()),
                self.cur.span_between(list_start, list_end),
            ));
        }
        self.circuit.add_qreg(&name, &dims).map(|_| ()).map_err(|e| self.lift(e, start))
    }

    fn creg(&mut self, start: usize) -> Step<()> {
        let (name, _) = self.cur.ident("a register name")?;
        self.cur.expect(&Tok::LBracket, "before the register size")?;
        let size = self.cur.int("a register size")?;
        self.cur.expect(&Tok::RBracket, "after the register size")?;
        self.cur.expect(&Tok::Semi, "after creg")?;
        self.circuit.add_creg(&name, size).map(|_| ()).map_err(|e| self.lift(e, start))
    }

    fn measure(&mut self, start: usize) -> Step<()> {
        let q = self.operand()?;
        self.cur.expect(&Tok::Arrow, "in measure")?;
        let c = self.operand()?;
        self.cur.expect(&Tok::Semi, "after measure")?;
        let line = self.qudit_line(&q)?;
        let creg = self
            .circuit
            .creg_index(&c.reg)
            .ok_or_else(|| ParseDiagnostic::error(format!("unknown classical register `{}`", c.reg), c.span))?;
        let size = self.circuit.cregs()[creg].size;
        if c.index >= size {
            return Err(ParseDiagnostic::error(
                format!("index {} out of range for classical register `{}` of size {size}", c.index, c.reg),
                c.span,
            ));
        }
        self.circuit.push_measure(line, creg, c.index).map_err(|e| self.lift(e, start))
    }

    fn gate(&mut self, name: String, start: usize) -> Step<()> {
        if !GATE_NAMES.contains(&name.as_str()) {
            return Err(ParseDiagnostic::error(format!("unknown gate `{name}`"), self.cur.span_of(start))
                .with_hint(format!("supported gates: {}", GATE_NAMES.join(", "))));
        }
        let mut params = Vec::new();
        if *self.cur.peek() == Tok::LParen {
            self.cur.bump();
            if *self.cur.peek() != Tok::RParen {
                params.push(self.cur.expr()?);
                while *self.cur.peek() == Tok::Comma {
                    self.cur.bump();
                    params.push(self.cur.expr()?);
                }
            }
            self.cur.expect(&Tok::RParen, "after gate parameters")?;
        }
        let mut targets = vec![self.operand()?];
        while *self.cur.peek() == Tok::Comma {
            self.cur.bump();
            targets.push(self.operand()?);
        }
        let mut controls = Vec::new();
        let mut levels = Vec::new();
        let mut level_span = None;
        if matches!(self.cur.peek(), Tok::Ident(s) if s == "ctl") {
            self.cur.bump();
            controls.push(self.operand()?);
            loop {
                match self.cur.peek() {
                    Tok::Comma => {
                        self.cur.bump();
                        controls.push(self.operand()?);
                    }
                    Tok::Ident(_) => controls.push(self.operand()?),
                    _ => break,
                }
            }
            let open = self.cur.expect(&Tok::LBracket, "before the control levels")?;
            levels.push(self.cur.int("a control level")?);
            while *self.cur.peek() == Tok::Comma {
                self.cur.bump();
                levels.push(self.cur.int("a control level")?);
            }
            let close = self.cur.expect(&Tok::RBracket, "after the control levels")?;
            level_span = Some(self.cur.span_between(open, close));
        }
        self.cur.expect(&Tok::Semi, "after gate")?;

        let mut lines = Vec::with_capacity(targets.len());
        for t in &targets {
            lines.push(self.qudit_line(t)?);
        }
        if controls.len() != levels.len() {
            return Err(ParseDiagnostic::error(
                format!("{} control qudit(s) but {} control level(s)", controls.len(), levels.len()),
                level_span.unwrap_or_else(|| self.cur.span_of(start)),
            ));
        }
        let mut ctl = Vec::with_capacity(controls.len());
        for (c, &level) in controls.iter().zip(&levels) {
            let line = self.qudit_line(c)?;
            let dim = self.circuit.dims()[line];
            if level >= dim {
                return Err(ParseDiagnostic::error(
                    format!("control level {level} ≥ dimension {dim} of control qudit {}[{}]", c.reg, c.index),
                    level_span.unwrap_or(c.span),
                ));
            }
            ctl.push((line, level));
        }
        let target_dims: Vec<usize> = lines.iter().map(|&l| self.circuit.dims()[l]).collect();
        let kind = GateKind::from_name(&name, &params, &target_dims).map_err(|e| self.lift(e, start))?;
        let spec = GateSpec::controlled(kind, lines, ControlSpec::new(ctl));
        self.circuit.push_gate(spec).map_err(|e| self.lift(e, start))
    }
}

/// Parses DITQASM 2.0 source. All errors found are reported, ordered by position.
pub fn parse(text: &str) -> Result<Circuit> {
    let (tokens, mut diags) = lex(text);
    let mut p = Parser { cur: Cursor::new(text, &tokens), circuit: Circuit::new() };
    if let Err(d) = p.header() {
        let missing = d.message == "missing DITQASM header";
        diags.push(d);
        if missing && *p.cur.peek() == Tok::Eof {
            return Err(finish(diags));
        }
        if !missing {
            p.cur.recover();
        }
    }
    while *p.cur.peek() != Tok::Eof {
        let before = p.cur.pos;
        if let Err(d) = p.statement() {
            diags.push(d);
            if p.cur.pos == before {
                p.cur.bump();
            }
            p.cur.recover();
        }
    }
    if diags.is_empty() {
        Ok(p.circuit)
    } else {
        Err(finish(diags))
    }
}

fn finish(mut diags: Vec<ParseDiagnostic>) -> Error {
    diags.sort_by_key(|d| (d.span.start, d.span.end));
    Error::Parse(diags)
}

/// Like [`parse`] but accepts raw bytes and reports invalid UTF-8 as a diagnostic.
pub fn parse_bytes(bytes: &[u8]) -> Result<Circuit> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let at = e.valid_up_to();
            let valid = std::str::from_utf8(&bytes[..at]).unwrap_or_default();
            let mut span = SourceSpan::from_offsets(valid, at, at);
            span.end = (at + 1).min(bytes.len());
            Err(Error::Parse(vec![ParseDiagnostic::error("input is not valid UTF-8", span)]))
        }
    }
}
