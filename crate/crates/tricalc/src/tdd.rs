//! The .tdd diagram data format: a line-oriented, hand-auditable encoding of
//! an arrangement together with its three curve families.
//!
//! ```text
//! tdd 1
//! genus 4
//! basepoint z : x1@3/4 primary
//! curve alpha1 alpha : +x2@1/2 -x1@1/3
//! arc s13 from alpha1@0:1/2 to alpha3@1:1/4 : +x3@2/5
//! twistbox beta4 p-2 over delta1b
//! ```
//!
//! Loops are written x1..x2g (1-based); heights are rationals. Twist boxes
//! are expanded at load time once the parameter p is bound.

use crate::curves::{Anchor, ArcPath, Arrangement, Basepoint, Curve, Family, Occ, Token};
use crate::geom::Rat;
use crate::moves::{dehn_twist, Targets};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum TddError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("unbound parameter {0}")]
    UnboundParam(String),
    #[error("twistbox expansion failed: {0}")]
    Twist(String),
    #[error("arrangement invalid: {0}")]
    Arr(#[from] crate::curves::ArrError),
}

/// Integer expressions in the parameter p: k, p, p-2, -(p-2), 2*p+1, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, binds: &BTreeMap<String, i64>) -> Result<i64, TddError> {
        Ok(match self {
            Expr::Int(k) => *k,
            Expr::Param(n) => *binds
                .get(n)
                .ok_or_else(|| TddError::UnboundParam(n.clone()))?,
            Expr::Neg(e) => -e.eval(binds)?,
            Expr::Add(a, b) => a.eval(binds)? + b.eval(binds)?,
            Expr::Sub(a, b) => a.eval(binds)? - b.eval(binds)?,
            Expr::Mul(a, b) => a.eval(binds)? * b.eval(binds)?,
        })
    }

    pub fn parse(s: &str) -> Result<Expr, String> {
        let toks = lex_expr(s)?;
        let mut pos = 0usize;
        let e = parse_sum(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(format!("trailing tokens in expression '{}'", s));
        }
        Ok(e)
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Int(k) => write!(f, "{}", k),
            Expr::Param(n) => write!(f, "{}", n),
            Expr::Neg(e) => write!(f, "-({})", e),
            Expr::Add(a, b) => write!(f, "({}+{})", a, b),
            Expr::Sub(a, b) => write!(f, "({}-{})", a, b),
            Expr::Mul(a, b) => write!(f, "({}*{})", a, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum ETok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LPar,
    RPar,
}

fn lex_expr(s: &str) -> Result<Vec<ETok>, String> {
    let mut out = Vec::new();
    let mut it = s.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            ' ' | '\t' => {
                it.next();
            }
            '0'..='9' => {
                let mut v = 0i64;
                while let Some(&d) = it.peek() {
                    if let Some(x) = d.to_digit(10) {
                        v = v * 10 + x as i64;
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(ETok::Int(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut n = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        n.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(ETok::Ident(n));
            }
            '+' => {
                it.next();
                out.push(ETok::Plus);
            }
            '-' => {
                it.next();
                out.push(ETok::Minus);
            }
            '*' => {
                it.next();
                out.push(ETok::Star);
            }
            '(' => {
                it.next();
                out.push(ETok::LPar);
            }
            ')' => {
                it.next();
                out.push(ETok::RPar);
            }
            _ => return Err(format!("bad character '{}' in expression", c)),
        }
    }
    Ok(out)
}

fn parse_sum(t: &[ETok], pos: &mut usize) -> Result<Expr, String> {
    let mut e = parse_prod(t, pos)?;
    while *pos < t.len() {
        match t[*pos] {
            ETok::Plus => {
                *pos += 1;
                e = Expr::Add(Box::new(e), Box::new(parse_prod(t, pos)?));
            }
            ETok::Minus => {
                *pos += 1;
                e = Expr::Sub(Box::new(e), Box::new(parse_prod(t, pos)?));
            }
            _ => break,
        }
    }
    Ok(e)
}

fn parse_prod(t: &[ETok], pos: &mut usize) -> Result<Expr, String> {
    let mut e = parse_atom(t, pos)?;
    while *pos < t.len() && t[*pos] == ETok::Star {
        *pos += 1;
        e = Expr::Mul(Box::new(e), Box::new(parse_atom(t, pos)?));
    }
    Ok(e)
}

fn parse_atom(t: &[ETok], pos: &mut usize) -> Result<Expr, String> {
    match t.get(*pos) {
        Some(ETok::Int(v)) => {
            *pos += 1;
            Ok(Expr::Int(*v))
        }
        Some(ETok::Ident(n)) => {
            *pos += 1;
            Ok(Expr::Param(n.clone()))
        }
        Some(ETok::Minus) => {
            *pos += 1;
            Ok(Expr::Neg(Box::new(parse_atom(t, pos)?)))
        }
        Some(ETok::LPar) => {
            *pos += 1;
            let e = parse_sum(t, pos)?;
            if t.get(*pos) != Some(&ETok::RPar) {
                return Err("missing ')'".into());
            }
            *pos += 1;
            Ok(e)
        }
        _ => Err("expected expression atom".into()),
    }
}

#[derive(Clone, Debug)]
pub struct TwistBox {
    pub target: String,
    pub exponent: Expr,
    pub over: String,
}

/// Parsed .tdd file before twist boxes are expanded.
#[derive(Clone, Debug, Default)]
pub struct TddFile {
    pub arr: Arrangement,
    pub alpha: Vec<String>,
    pub beta: Vec<String>,
    pub gamma: Vec<String>,
    pub boxes: Vec<TwistBox>,
}

impl TddFile {
    /// Expand twist boxes with the given parameter bindings and reduce.
    pub fn instantiate(&self, binds: &BTreeMap<String, i64>) -> Result<TddFile, TddError> {
        let mut arr = self.arr.clone();
        for b in &self.boxes {
            let e = b.exponent.eval(binds)?;
            if e == 0 {
                continue;
            }
            arr = dehn_twist(&arr, &b.over, e, &Targets::Named([b.target.clone()].into()))
                .map_err(|er| TddError::Twist(er.to_string()))?;
        }
        Ok(TddFile {
            arr,
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            gamma: self.gamma.clone(),
            boxes: Vec::new(),
        })
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| format!("bad rational '{}'", s))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad rational '{}'", s))?;
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| format!("bad rational '{}'", s))?;
        Ok(Rat::from_integer(n))
    }
}

fn parse_token(s: &str) -> Result<Token, String> {
    // +x3@1/2
    let (sign, rest) = match s.chars().next() {
        Some('+') => (1i8, &s[1..]),
        Some('-') => (-1i8, &s[1..]),
        _ => return Err(format!("token '{}' must start with + or -", s)),
    };
    let rest = rest
        .strip_prefix('x')
        .ok_or_else(|| format!("token '{}' missing loop name", s))?;
    let (l, h) = rest
        .split_once('@')
        .ok_or_else(|| format!("token '{}' missing @height", s))?;
    let l: usize = l.parse().map_err(|_| format!("bad loop in '{}'", s))?;
    if l == 0 {
        return Err("loops are numbered from x1".into());
    }
    Ok(Token::new(sign, l - 1, parse_rat(h)?))
}

fn token_str(t: &Token) -> String {
    format!(
        "{}x{}@{}",
        if t.sign > 0 { "+" } else { "-" },
        t.loop_id + 1,
        t.height
    )
}

fn parse_anchor(s: &str) -> Result<Anchor, String> {
    // curve@chord:pos
    let (c, rest) = s
        .split_once('@')
        .ok_or_else(|| format!("anchor '{}' missing @", s))?;
    let (k, p) = rest
        .split_once(':')
        .ok_or_else(|| format!("anchor '{}' missing :pos", s))?;
    Ok(Anchor {
        curve: c.to_string(),
        chord: k.parse().map_err(|_| format!("bad chord in '{}'", s))?,
        pos: parse_rat(p)?,
    })
}

pub fn parse_tdd(text: &str) -> Result<TddFile, TddError> {
    let mut f = TddFile::default();
    let mut saw_header = false;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let kw = words.next().unwrap();
        let err = |m: String| TddError::Parse(ln + 1, m);
        match kw {
            "tdd" => {
                saw_header = true;
            }
            "genus" => {
                let g: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("genus needs a number".into()))?;
                f.arr.genus = g;
            }
            "basepoint" => {
                // basepoint NAME : x1@3/4 primary|inverse
                let name = words.next().ok_or_else(|| err("basepoint name".into()))?;
                let colon = words.next();
                if colon != Some(":") {
                    return Err(err("expected ':'".into()));
                }
                let at = words.next().ok_or_else(|| err("basepoint anchor".into()))?;
                let side = words.next().ok_or_else(|| err("basepoint side".into()))?;
                let tok = parse_token(&format!("+{}", at)).map_err(err)?;
                let occ = match side {
                    "primary" => Occ::Primary,
                    "inverse" => Occ::Inverse,
                    _ => return Err(err("side must be primary or inverse".into())),
                };
                f.arr.basepoints.insert(
                    name.to_string(),
                    Basepoint {
                        loop_id: tok.loop_id,
                        height: tok.height,
                        occ,
                    },
                );
            }
            "curve" => {
                let name = words.next().ok_or_else(|| err("curve name".into()))?;
                let fam = words
                    .next()
                    .and_then(Family::parse)
                    .ok_or_else(|| err("curve family".into()))?;
                let colon = words.next();
                if colon != Some(":") {
                    return Err(err("expected ':'".into()));
                }
                let mut word = Vec::new();
                for w in words {
                    word.push(parse_token(w).map_err(err)?);
                }
                f.arr
                    .curves
                    .insert(name.to_string(), Curve { family: fam, word });
                match fam {
                    Family::Alpha => f.alpha.push(name.to_string()),
                    Family::Beta => f.beta.push(name.to_string()),
                    Family::Gamma => f.gamma.push(name.to_string()),
                    Family::Aux => {}
                }
            }
            "arc" => {
                // arc NAME from A@c:p to B@c:p : tokens
                let name = words.next().ok_or_else(|| err("arc name".into()))?;
                if words.next() != Some("from") {
                    return Err(err("expected 'from'".into()));
                }
                let start = parse_anchor(words.next().ok_or_else(|| err("anchor".into()))?)
                    .map_err(err)?;
                if words.next() != Some("to") {
                    return Err(err("expected 'to'".into()));
                }
                let end = parse_anchor(words.next().ok_or_else(|| err("anchor".into()))?)
                    .map_err(err)?;
                let mut word = Vec::new();
                let rest: Vec<&str> = words.collect();
                if !rest.is_empty() {
                    if rest[0] != ":" {
                        return Err(err("expected ':'".into()));
                    }
                    for w in &rest[1..] {
                        word.push(parse_token(w).map_err(err)?);
                    }
                }
                f.arr
                    .arcs
                    .insert(name.to_string(), ArcPath { start, end, word });
            }
            "twistbox" => {
                // twistbox TARGET EXPR over CURVE
                let target = words.next().ok_or_else(|| err("twistbox target".into()))?;
                let mut expr_words = Vec::new();
                let mut over = None;
                let mut saw_over = false;
                for w in words {
                    if w == "over" {
                        saw_over = true;
                    } else if saw_over {
                        over = Some(w.to_string());
                    } else {
                        expr_words.push(w);
                    }
                }
                let over = over.ok_or_else(|| err("twistbox needs 'over CURVE'".into()))?;
                let expr = Expr::parse(&expr_words.join(" ")).map_err(err)?;
                f.boxes.push(TwistBox {
                    target: target.to_string(),
                    exponent: expr,
                    over,
                });
            }
            other => return Err(err(format!("unknown keyword '{}'", other))),
        }
    }
    if !saw_header {
        return Err(TddError::Parse(1, "missing 'tdd 1' header".into()));
    }
    // validate
    f.arr.realize().map(|_| ()).or_else(|e| {
        if f.arr.genus == 0 && f.arr.curves.is_empty() {
            Ok(())
        } else {
            Err(e)
        }
    })?;
    Ok(f)
}

pub fn write_tdd(f: &TddFile, header_note: &str) -> String {
    let mut s = String::new();
    if !header_note.is_empty() {
        for line in header_note.lines() {
            let _ = writeln!(s, "# {}", line);
        }
    }
    let _ = writeln!(s, "tdd 1");
    let _ = writeln!(s, "genus {}", f.arr.genus);
    for (n, b) in &f.arr.basepoints {
        let _ = writeln!(
            s,
            "basepoint {} : x{}@{} {}",
            n,
            b.loop_id + 1,
            b.height,
            match b.occ {
                Occ::Primary => "primary",
                Occ::Inverse => "inverse",
            }
        );
    }
    for (n, c) in &f.arr.curves {
        let toks: Vec<String> = c.word.iter().map(token_str).collect();
        let _ = writeln!(s, "curve {} {} : {}", n, c.family.tag(), toks.join(" "));
    }
    for (n, a) in &f.arr.arcs {
        let toks: Vec<String> = a.word.iter().map(token_str).collect();
        let tail = if toks.is_empty() {
            String::new()
        } else {
            format!(" : {}", toks.join(" "))
        };
        let _ = writeln!(
            s,
            "arc {} from {}@{}:{} to {}@{}:{}{}",
            n, a.start.curve, a.start.chord, a.start.pos, a.end.curve, a.end.chord, a.end.pos, tail
        );
    }
    for b in &f.boxes {
        let _ = writeln!(s, "twistbox {} {} over {}", b.target, b.exponent, b.over);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let text = "\
tdd 1
genus 1
basepoint z : x1@3/4 primary
curve c alpha : +x1@1/2
curve d aux : +x2@1/3 -x2@2/3
arc a from c@0:1/2 to d@1:1/4
twistbox c p-2 over d
";
        let f = parse_tdd(text).unwrap();
        assert_eq!(f.arr.genus, 1);
        assert_eq!(f.alpha, vec!["c"]);
        let out = write_tdd(&f, "");
        let f2 = parse_tdd(&out).unwrap();
        assert_eq!(write_tdd(&f2, ""), out);
    }

    #[test]
    fn expr_eval() {
        let binds: BTreeMap<String, i64> = [("p".to_string(), 4)].into();
        for (src, want) in [
            ("p-2", 2),
            ("-(p-2)", -2),
            ("2*p+1", 9),
            ("-1", -1),
            ("p", 4),
        ] {
            assert_eq!(Expr::parse(src).unwrap().eval(&binds).unwrap(), want, "{}", src);
        }
    }

    #[test]
    fn twistbox_expansion_identity_at_zero() {
        let text = "\
tdd 1
genus 1
curve c aux : +x1@1/2
curve d aux : +x2@1/2
twistbox d p-2 over c
";
        let f = parse_tdd(text).unwrap();
        let binds: BTreeMap<String, i64> = [("p".to_string(), 2)].into();
        let inst = f.instantiate(&binds).unwrap();
        assert_eq!(inst.arr.curves["d"].word.len(), 1);
        let binds3: BTreeMap<String, i64> = [("p".to_string(), 3)].into();
        let inst3 = f.instantiate(&binds3).unwrap();
        assert!(inst3.arr.curves["d"].word.len() > 1);
    }
}
