use std::collections::HashMap;

use super::lexer::{Tok, Token};
use super::{
    Construct, ErrorCategory, ForeignInstruction, FrontendError, Program, ALLOWED_INCLUDE,
    FOREIGN_INSTRUCTIONS,
};
use crate::circuit::{Circuit, GateInstance, GateKind};

type PResult<T> = Result<T, FrontendError>;

fn resolve_gate(name: &str) -> Option<GateKind> {
    match name {
        "U" | "u3" => Some(GateKind::U),
        "CX" => Some(GateKind::Cx),
        "u1" => Some(GateKind::P),
        "cu1" => Some(GateKind::Cp),
        _ => name.parse().ok(),
    }
}

struct Register {
    offset: usize,
    size: usize,
}

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    registers: HashMap<String, Register>,
    n_qubits: usize,
    seen_include: bool,
    gates: Vec<GateInstance>,
    foreign: Vec<ForeignInstruction>,
}

impl Parser {
    pub(crate) fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            pos: 0,
            registers: HashMap::new(),
            n_qubits: 0,
            seen_include: false,
            gates: Vec::new(),
            foreign: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    /// Line of the current token, or of the last token at end of input.
    fn line(&self) -> usize {
        self.peek()
            .or_else(|| self.tokens.last())
            .map(|t| t.line)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_err(&self, message: impl Into<String>) -> FrontendError {
        FrontendError::new(ErrorCategory::Parse, self.line(), message)
    }

    fn unexpected(&self, wanted: &str) -> FrontendError {
        match self.peek() {
            Some(t) => self.parse_err(format!("expected {wanted}, found {}", t.tok.describe())),
            None => self.parse_err(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<Token> {
        match self.peek() {
            Some(t) if t.tok == tok => Ok(self.next().unwrap()),
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn ident(&mut self, wanted: &str) -> PResult<(String, usize)> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(name),
                line,
            }) => {
                let out = (name.clone(), *line);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn integer(&mut self) -> PResult<usize> {
        match self.peek() {
            Some(Token {
                tok: Tok::Number { text, .. },
                ..
            }) if text.chars().all(|c| c.is_ascii_digit()) => {
                let value = text
                    .parse::<usize>()
                    .map_err(|_| self.parse_err(format!("integer `{text}` is too large")))?;
                self.pos += 1;
                Ok(value)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    pub(crate) fn program(mut self) -> PResult<Program> {
        self.header()?;
        while let Some(token) = self.peek().cloned() {
            self.statement(token)?;
        }
        if self.n_qubits == 0 {
            return Err(FrontendError::new(
                ErrorCategory::Semantic,
                self.line(),
                "program declares no qubit register",
            ));
        }
        Ok(Program {
            circuit: Circuit::with_gates(self.n_qubits, self.gates),
            foreign: self.foreign,
        })
    }

    fn header(&mut self) -> PResult<()> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(name),
                ..
            }) if name == "OPENQASM" => {
                self.pos += 1;
            }
            _ => return Err(self.parse_err("missing `OPENQASM 2.0;` header")),
        }
        let line = self.line();
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Number { value, text }) => {
                if value != 2.0 {
                    return Err(FrontendError::new(
                        ErrorCategory::Semantic,
                        line,
                        format!("unsupported OpenQASM version {text}; only 2.0 is accepted"),
                    ));
                }
                self.next();
            }
            _ => return Err(self.unexpected("a version number")),
        }
        self.expect(Tok::Semi, "`;`")?;
        Ok(())
    }

    fn statement(&mut self, token: Token) -> PResult<()> {
        let line = token.line;
        let name = match &token.tok {
            Tok::Ident(name) => name.clone(),
            other => {
                return Err(
                    self.parse_err(format!("expected a statement, found {}", other.describe()))
                )
            }
        };
        let unsupported = |construct: Construct, what: &str| {
            Err(FrontendError::unsupported(
                line,
                construct,
                format!("{what} is not supported"),
            ))
        };
        match name.as_str() {
            "OPENQASM" => Err(self.parse_err("duplicate `OPENQASM` header")),
            "include" => self.include(),
            "qreg" => self.qreg(),
            "creg" => unsupported(Construct::Creg, "classical register `creg`"),
            "measure" => unsupported(Construct::Measure, "measurement"),
            "reset" => unsupported(Construct::Reset, "`reset`"),
            "if" => unsupported(Construct::If, "classically controlled `if`"),
            "opaque" => unsupported(Construct::Opaque, "`opaque` declaration"),
            "barrier" => unsupported(Construct::Barrier, "`barrier`"),
            "gate" => unsupported(Construct::GateDefinition, "user-defined `gate`"),
            _ => self.application(),
        }
    }

    fn include(&mut self) -> PResult<()> {
        let (_, line) = self.ident("`include`")?;
        let file = match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Str(s)) => {
                self.next();
                s
            }
            _ => return Err(self.unexpected("a quoted file name")),
        };
        if file != ALLOWED_INCLUDE {
            return Err(FrontendError::unsupported(
                line,
                Construct::Include(file.clone()),
                format!("include of \"{file}\" is not allowed"),
            ));
        }
        if self.seen_include {
            return Err(FrontendError::new(
                ErrorCategory::Semantic,
                line,
                format!("\"{ALLOWED_INCLUDE}\" included more than once"),
            ));
        }
        self.seen_include = true;
        self.expect(Tok::Semi, "`;`")?;
        Ok(())
    }

    fn qreg(&mut self) -> PResult<()> {
        self.ident("`qreg`")?;
        let (name, line) = self.ident("a register name")?;
        self.expect(Tok::LBracket, "`[`")?;
        let size = self.integer()?;
        self.expect(Tok::RBracket, "`]`")?;
        self.expect(Tok::Semi, "`;`")?;
        if size == 0 {
            return Err(FrontendError::new(
                ErrorCategory::Semantic,
                line,
                format!("register `{name}` must have at least one qubit"),
            ));
        }
        if self.registers.contains_key(&name) {
            return Err(FrontendError::new(
                ErrorCategory::Semantic,
                line,
                format!("register `{name}` declared twice"),
            ));
        }
        self.registers.insert(
            name,
            Register {
                offset: self.n_qubits,
                size,
            },
        );
        self.n_qubits += size;
        Ok(())
    }

    fn application(&mut self) -> PResult<()> {
        let (name, line) = self.ident("a gate name")?;
        let semantic = |message: String| FrontendError::new(ErrorCategory::Semantic, line, message);

        if FOREIGN_INSTRUCTIONS.contains(&name.as_str()) {
            if self.peek().is_some_and(|t| t.tok == Tok::LParen) {
                self.skip_parenthesized()?;
            }
            let qubits = self.qubit_args(line)?;
            self.foreign.push(ForeignInstruction {
                name,
                qubits,
                line,
                position: self.gates.len(),
            });
            return Ok(());
        }

        let kind = resolve_gate(&name).ok_or_else(|| semantic(format!("unknown gate `{name}`")))?;
        let params = if self.peek().is_some_and(|t| t.tok == Tok::LParen) {
            self.next();
            let mut params = Vec::new();
            if !self.peek().is_some_and(|t| t.tok == Tok::RParen) {
                loop {
                    let expr_line = self.line();
                    let value = self.expr()?;
                    if !value.is_finite() {
                        return Err(FrontendError::new(
                            ErrorCategory::Semantic,
                            expr_line,
                            format!("parameter of `{name}` is not a finite number"),
                        ));
                    }
                    params.push(value);
                    if self.peek().is_some_and(|t| t.tok == Tok::Comma) {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen, "`)`")?;
            params
        } else {
            Vec::new()
        };
        let qubits = self.qubit_args(line)?;

        if params.len() != kind.param_count() {
            return Err(semantic(format!(
                "gate `{name}` takes {} parameter(s), got {}",
                kind.param_count(),
                params.len()
            )));
        }
        if qubits.len() != kind.arity() {
            return Err(semantic(format!(
                "gate `{name}` takes {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        self.gates.push(GateInstance::new(kind, qubits, params));
        Ok(())
    }

    /// Comma-separated `reg[i]` operands followed by `;`.
    fn qubit_args(&mut self, line: usize) -> PResult<Vec<usize>> {
        let mut qubits = Vec::new();
        loop {
            let (reg, reg_line) = self.ident("a qubit operand")?;
            if !self.peek().is_some_and(|t| t.tok == Tok::LBracket) {
                return Err(FrontendError::new(
                    ErrorCategory::Semantic,
                    reg_line,
                    format!("operand `{reg}` must be indexed; register broadcast is not supported"),
                ));
            }
            self.next();
            let index = self.integer()?;
            self.expect(Tok::RBracket, "`]`")?;
            let register = self.registers.get(&reg).ok_or_else(|| {
                FrontendError::new(
                    ErrorCategory::Semantic,
                    reg_line,
                    format!("undeclared register `{reg}`"),
                )
            })?;
            if index >= register.size {
                return Err(FrontendError::new(
                    ErrorCategory::Semantic,
                    reg_line,
                    format!(
                        "index {index} out of range for register `{reg}[{}]`",
                        register.size
                    ),
                ));
            }
            let qubit = register.offset + index;
            if qubits.contains(&qubit) {
                return Err(FrontendError::new(
                    ErrorCategory::Semantic,
                    line,
                    format!("duplicate operand `{reg}[{index}]`"),
                ));
            }
            qubits.push(qubit);
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Comma) => {
                    self.next();
                }
                Some(Tok::Semi) => {
                    self.next();
                    return Ok(qubits);
                }
                _ => return Err(self.unexpected("`,` or `;`")),
            }
        }
    }

    fn skip_parenthesized(&mut self) -> PResult<()> {
        self.expect(Tok::LParen, "`(`")?;
        let mut depth = 1;
        while depth > 0 {
            match self.next().map(|t| t.tok) {
                Some(Tok::LParen) => depth += 1,
                Some(Tok::RParen) => depth -= 1,
                Some(Tok::Semi) | None => {
                    return Err(FrontendError::new(
                        ErrorCategory::Parse,
                        self.line(),
                        "unclosed `(`",
                    ));
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn expr(&mut self) -> PResult<f64> {
        let mut value = self.term()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => {
                    self.next();
                    value += self.term()?;
                }
                Some(Tok::Minus) => {
                    self.next();
                    value -= self.term()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn term(&mut self) -> PResult<f64> {
        let mut value = self.unary()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Star) => {
                    self.next();
                    value *= self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.next();
                    value /= self.unary()?;
                }
                _ => return Ok(value),
            }
        }
    }

    fn unary(&mut self) -> PResult<f64> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Minus) => {
                self.next();
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.next();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<f64> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Number { value, .. }) => {
                self.next();
                Ok(value)
            }
            Some(Tok::Ident(name)) if name == "pi" => {
                self.next();
                Ok(std::f64::consts::PI)
            }
            Some(Tok::LParen) => {
                self.next();
                let value = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(value)
            }
            _ => Err(self.unexpected("a number, `pi` or `(`")),
        }
    }
}
