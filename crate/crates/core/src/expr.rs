//! Polynomial expression syntax and the instance file format.
//!
//! Expressions:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary ("*" unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" exp)?
//! exp    := INT ("^" exp)?          (right-associative, non-negative)
//! atom   := INT | IDENT | "(" expr ")"
//! ```
//!
//! Integer literals are reduced modulo `p`. `t` names the coefficient
//! transcendental when the coefficient ring is `Fp[t]`. Juxtaposition is not
//! multiplication: `2x` is a syntax error.
//!
//! Instance files are line oriented:
//!
//! ```text
//! # comment
//! p: 3
//! coeff: Fp            # or Fp[t]
//! vars: x, y
//! f1: x^2*y
//! option.degree_bound: 2
//! ```
//!
//! The order of the `f` lines is the tuple order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::coeff::KKind;
use crate::mpoly::{MPoly, Ring};

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u64 = 1 << 16;

/// Largest number of variables an instance may declare.
pub const MAX_ARITY: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<&'static str>, found: String },
    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("`t` at byte {offset} is only available over Fp[t]")]
    TUsedInPrimeField { offset: usize },
    #[error("negative exponent at byte {offset}")]
    NegativeExponent { offset: usize },
    #[error("exponent at byte {offset} exceeds {max}", max = MAX_EXPONENT)]
    ExponentTooLarge { offset: usize },
}

impl ExprError {
    /// Byte offset of the problem within the parsed text.
    pub fn offset(&self) -> usize {
        match self {
            ExprError::Syntax { offset, .. }
            | ExprError::UnknownVariable { offset, .. }
            | ExprError::TUsedInPrimeField { offset }
            | ExprError::NegativeExponent { offset }
            | ExprError::ExponentTooLarge { offset } => *offset,
        }
    }
}

/// A ring together with the names of its variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyContext {
    ring: Ring,
    vars: Vec<String>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PolyContext {
    pub fn new(kind: KKind, vars: Vec<String>) -> Result<Self, String> {
        if vars.is_empty() {
            return Err("at least one variable is required".into());
        }
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(format!("`{v}` is not a valid variable name"));
            }
            if vars[..i].contains(v) {
                return Err(format!("variable `{v}` declared twice"));
            }
            if kind.has_t() && v == "t" {
                return Err("`t` is reserved for the coefficient ring Fp[t]".into());
            }
        }
        let ring = Ring::new(kind, vars.len()).map_err(|e| e.to_string())?;
        Ok(PolyContext { ring, vars })
    }

    /// Context with variables `x, y, z` (up to three) or `x1..xn`.
    pub fn with_default_names(kind: KKind, n: usize) -> Self {
        let vars = if n <= 3 {
            ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
        } else {
            MPoly::default_names(n)
        };
        PolyContext::new(kind, vars).expect("default names are valid")
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn parse(&self, text: &str) -> Result<MPoly, ExprError> {
        parse_poly(text, self)
    }

    pub fn print(&self, f: &MPoly) -> String {
        print_canonical(f, &self.vars)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Int(&'a str),
    Ident(&'a str),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok<'_>, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(&text[start..i]), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(&text[start..i]), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    expected: vec!["an expression token"],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a, 'c> {
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    ctx: &'c PolyContext,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> &Tok<'a> {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok<'a>, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: Vec<&'static str>) -> ExprError {
        ExprError::Syntax { offset: self.offset(), expected, found: self.peek().describe() }
    }

    fn expr(&mut self) -> Result<MPoly, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, ExprError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MPoly, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<MPoly, ExprError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let e = self.exponent()?;
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u64, ExprError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Minus => Err(ExprError::NegativeExponent { offset }),
            Tok::Int(s) => {
                self.bump();
                let base: u64 = s.parse().map_err(|_| ExprError::ExponentTooLarge { offset })?;
                let value = if *self.peek() == Tok::Caret {
                    self.bump();
                    let e = self.exponent()?;
                    checked_pow(base, e).ok_or(ExprError::ExponentTooLarge { offset })?
                } else {
                    base
                };
                if value > MAX_EXPONENT {
                    return Err(ExprError::ExponentTooLarge { offset });
                }
                Ok(value)
            }
            _ => Err(self.error(vec!["a non-negative integer exponent"])),
        }
    }

    fn atom(&mut self) -> Result<MPoly, ExprError> {
        let ring = self.ctx.ring();
        let (tok, offset) = self.toks[self.pos].clone();
        match tok {
            Tok::Int(s) => {
                self.bump();
                let p = ring.p() as u64;
                let v = s.bytes().fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % p);
                Ok(MPoly::scalar(ring, v))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(i) = self.ctx.vars.iter().position(|v| v == name) {
                    return Ok(MPoly::var(ring, i).expect("index in range"));
                }
                if name == "t" {
                    return MPoly::t(ring).ok_or(ExprError::TUsedInPrimeField { offset });
                }
                Err(ExprError::UnknownVariable { name: name.to_string(), offset })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(vec!["`)`", "an operator"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(vec!["an integer", "a variable", "`(`"])),
        }
    }
}

fn checked_pow(base: u64, e: u64) -> Option<u64> {
    if e > MAX_EXPONENT {
        return match base {
            0 | 1 => Some(base),
            _ => None,
        };
    }
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(base)?;
        if acc > MAX_EXPONENT && base > 1 {
            return None;
        }
    }
    Some(acc)
}

/// Parses an expression in the given context.
pub fn parse_poly(text: &str, ctx: &PolyContext) -> Result<MPoly, ExprError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0, ctx };
    let f = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(vec!["an operator", "end of input"]));
    }
    Ok(f)
}

/// Canonical text: terms in decreasing graded-lex order, least non-negative
/// residues, `t`-polynomial coefficients parenthesized when not monomials.
pub fn print_canonical(f: &MPoly, names: &[String]) -> String {
    Printer { poly: f, names }.to_string()
}

pub(crate) struct Printer<'a> {
    pub(crate) poly: &'a MPoly,
    pub(crate) names: &'a [String],
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.poly.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (mono, c)) in terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let xs: Vec<String> = mono
                .iter()
                .zip(self.names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, name)| if *e == 1 { name.clone() } else { format!("{name}^{e}") })
                .collect();
            let nonzero = c.t_coeffs().iter().filter(|&&v| v != 0).count();
            let coeff = if nonzero > 1 { format!("({c})") } else { c.to_string() };
            if xs.is_empty() {
                f.write_str(&coeff)?;
            } else if c.is_one() {
                f.write_str(&xs.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", xs.join("*"))?;
            }
        }
        Ok(())
    }
}

/// One diagnostic of an instance file, with a 1-based line number (0 when
/// the problem concerns the file as a whole).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct InstanceError {
    pub diagnostics: Vec<Diagnostic>,
}

/// A tuple of polynomials together with its ring and run options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub context: PolyContext,
    pub fs: Vec<MPoly>,
    pub options: BTreeMap<String, String>,
}

impl Instance {
    pub fn new(context: PolyContext, fs: Vec<MPoly>) -> Self {
        Instance { context, fs, options: BTreeMap::new() }
    }

    pub fn kind(&self) -> KKind {
        self.context.ring().kind()
    }

    pub fn ring(&self) -> Ring {
        self.context.ring()
    }

    pub fn p(&self) -> u32 {
        self.kind().p()
    }

    /// Renders back to the instance file format.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "p: {}\ncoeff: {}\nvars: {}\n",
            self.p(),
            self.kind().label(),
            self.context.vars().join(", ")
        );
        for (i, f) in self.fs.iter().enumerate() {
            s.push_str(&format!("f{}: {}\n", i + 1, self.context.print(f)));
        }
        for (k, v) in &self.options {
            s.push_str(&format!("option.{k}: {v}\n"));
        }
        s
    }
}

/// Parses the instance file format.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut diags = Vec::new();
    let mut header: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut f_lines: Vec<(usize, &str, &str)> = Vec::new();
    let mut options = BTreeMap::new();
    let mut option_lines: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            diags.push(Diagnostic { line: line_no, message: "expected `key: value`".into() });
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "p" | "coeff" | "vars" => {
                if let Some((first, _)) = header.get(key) {
                    diags.push(Diagnostic {
                        line: line_no,
                        message: format!("duplicate key `{key}` (first given on line {first})"),
                    });
                } else {
                    header.insert(key, (line_no, value));
                }
            }
            k if k.starts_with('f') && k.len() > 1 && k[1..].bytes().all(|b| b.is_ascii_digit()) => {
                if let Some((first, _, _)) = f_lines.iter().find(|(_, name, _)| *name == k) {
                    diags.push(Diagnostic {
                        line: line_no,
                        message: format!("duplicate key `{k}` (first given on line {first})"),
                    });
                } else {
                    f_lines.push((line_no, k, value));
                }
            }
            k if k.starts_with("option.") && k.len() > "option.".len() => {
                let name = k["option.".len()..].to_string();
                if let Some(first) = option_lines.get(&name) {
                    diags.push(Diagnostic {
                        line: line_no,
                        message: format!("duplicate key `{k}` (first given on line {first})"),
                    });
                } else {
                    option_lines.insert(name.clone(), line_no);
                    options.insert(name, value.to_string());
                }
            }
            k => diags.push(Diagnostic { line: line_no, message: format!("unknown key `{k}`") }),
        }
    }

    for key in ["p", "coeff", "vars"] {
        if !header.contains_key(key) {
            diags.push(Diagnostic { line: 0, message: format!("missing required key `{key}`") });
        }
    }
    if f_lines.is_empty() {
        diags.push(Diagnostic { line: 0, message: "no polynomials given (expected `f1: ...`)".into() });
    }

    let p = header.get("p").and_then(|&(line, v)| match v.parse::<u32>() {
        Ok(p) if crate::coeff::Prime::new(p).is_ok() => Some(p),
        _ => {
            diags.push(Diagnostic { line, message: format!("`{v}` is not a supported prime (2..=13)") });
            None
        }
    });
    let kind = match (p, header.get("coeff")) {
        (Some(p), Some(&(line, v))) => match v {
            "Fp" => KKind::prime_field(p).ok(),
            "Fp[t]" => KKind::poly_over_prime_field(p).ok(),
            other => {
                diags.push(Diagnostic { line, message: format!("unknown coefficient ring `{other}` (use Fp or Fp[t])") });
                None
            }
        },
        _ => None,
    };
    let context = match (kind, header.get("vars")) {
        (Some(kind), Some(&(line, v))) => {
            let names: Vec<String> = v.split(',').map(|s| s.trim().to_string()).collect();
            if names.len() > MAX_ARITY {
                diags.push(Diagnostic { line, message: format!("at most {MAX_ARITY} variables are supported") });
                None
            } else {
                match PolyContext::new(kind, names) {
                    Ok(c) => Some(c),
                    Err(msg) => {
                        diags.push(Diagnostic { line, message: msg });
                        None
                    }
                }
            }
        }
        _ => None,
    };

    let mut fs = Vec::new();
    if let Some(ctx) = &context {
        for &(line, _, expr) in &f_lines {
            match ctx.parse(expr) {
                Ok(f) => fs.push(f),
                Err(e) => diags.push(Diagnostic { line, message: e.to_string() }),
            }
        }
        if fs.len() > ctx.vars().len() {
            diags.push(Diagnostic {
                line: 0,
                message: format!("need m <= n, got {} polynomials in {} variables", fs.len(), ctx.vars().len()),
            });
        }
    }

    match context {
        Some(context) if diags.is_empty() => Ok(Instance { context, fs, options }),
        _ => Err(InstanceError { diagnostics: diags }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, t: bool, vars: &[&str]) -> PolyContext {
        let kind = if t { KKind::poly_over_prime_field(p) } else { KKind::prime_field(p) }.unwrap();
        PolyContext::new(kind, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn parses_and_prints() {
        let c = ctx(3, false, &["x", "y"]);
        let f = c.parse("x^2*y + 2*x").unwrap();
        assert_eq!(c.print(&f), "x^2*y + 2*x");
        let f = c.parse("  x ^ 2 * y+5 *x - 7").unwrap();
        assert_eq!(c.print(&f), "x^2*y + 2*x + 2");
        let ct = ctx(2, true, &["x"]);
        let g = ct.parse("(t+1)*x^2").unwrap();
        assert_eq!(ct.print(&g), "(t + 1)*x^2");
        assert_eq!(ct.parse(&ct.print(&g)).unwrap(), g);
        assert_eq!(c.print(&MPoly::zero(c.ring())), "0");
    }

    #[test]
    fn exponents() {
        let c = ctx(5, false, &["x"]);
        assert_eq!(c.parse("x^2^3").unwrap(), c.parse("x^8").unwrap());
        assert!(matches!(c.parse("x^-1"), Err(ExprError::NegativeExponent { offset: 2 })));
        assert!(matches!(c.parse("x^70000"), Err(ExprError::ExponentTooLarge { .. })));
        assert!(matches!(c.parse("x^(2)"), Err(ExprError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn errors_carry_offsets() {
        let c = ctx(3, false, &["x", "y"]);
        assert_eq!(c.parse("2x"), Err(ExprError::Syntax {
            offset: 1,
            expected: vec!["an operator", "end of input"],
            found: "identifier `x`".into()
        }));
        assert_eq!(c.parse("x + w"), Err(ExprError::UnknownVariable { name: "w".into(), offset: 4 }));
        assert_eq!(c.parse("x*t"), Err(ExprError::TUsedInPrimeField { offset: 2 }));
        assert!(matches!(c.parse("(x+y"), Err(ExprError::Syntax { offset: 4, .. })));
        assert!(matches!(c.parse("x $ y"), Err(ExprError::Syntax { offset: 2, .. })));
        // `t` may be an ordinary variable over a prime field.
        let ct = ctx(3, false, &["t"]);
        assert!(ct.parse("t^2").is_ok());
    }

    #[test]
    fn instance_round_trip() {
        let text = "# worked instance\np: 3\ncoeff: Fp\nvars: x,y\nf1: x^2*y\noption.seed: 7\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.fs.len(), 1);
        assert_eq!(inst.context.print(&inst.fs[0]), "x^2*y");
        assert_eq!(inst.options["seed"], "7");
        assert_eq!(parse_instance(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn instance_diagnostics() {
        let e = parse_instance("coeff: Fp\nvars: x\nf1: x\n").unwrap_err();
        assert!(e.diagnostics.iter().any(|d| d.message.contains("`p`")));
        let e = parse_instance("p: 2\ncoeff: Fp[t]\nvars: x, t\nf1: x\n").unwrap_err();
        assert_eq!(e.diagnostics[0].line, 3);
        assert!(e.diagnostics[0].message.contains("reserved"));
        let e = parse_instance("p: 2\np: 3\ncoeff: Fp\nvars: x\nf1: x\n").unwrap_err();
        assert_eq!(e.diagnostics[0].line, 2);
        let e = parse_instance("p: 2\ncoeff: Fp\nvars: x\nf1: x\nf2: x+1\n").unwrap_err();
        assert!(e.diagnostics[0].message.contains("m <= n"));
        let e = parse_instance("p: 2\ncoeff: Fp\nvars: x\nf1: x +\n").unwrap_err();
        assert_eq!(e.diagnostics[0].line, 4);
    }
}
