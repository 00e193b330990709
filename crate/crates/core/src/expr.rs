//! Surface syntax for building parameters: an s-expression DSL with a
//! typed AST, a JSON form, and an evaluator producing Weil-Deligne
//! representations over a group context.
//!
//! Grammar (text form):
//!
//! ```text
//! expr    := (irrep I) | (linchar I) | (ind HREF expr) | (twist expr (linchar I))
//!          | (dsum expr expr+) | (box expr N) | (dual expr)
//! HREF    := H1 | H2 | ...      ; 1-based index-2 subgroups of the
//!                                 current context group, in canonical
//!                                 (member-list) order
//! param   := (param (group NAME) (phi expr) [(sim I)] [(p two|odd)])
//! ```
//!
//! Inside `(ind Hk e)` the sub-expression is evaluated over Hk's own
//! character table, so irreducible indices are local to that subgroup;
//! nesting `ind` descends further.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charalg::{induce, VirtualChar};
use crate::error::{Error, Result};
use crate::group::catalog::GroupDescriptor;
use crate::group::{char_table, CharTable, GroupTable};
use crate::gsp4::ResidueChar;
use crate::wd::{WdRep, WdTerm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ParamExpr {
    Irrep { index: usize },
    Linchar { index: usize },
    Ind { subgroup: usize, arg: Box<ParamExpr> },
    Twist { arg: Box<ParamExpr>, chi: usize },
    Dsum { args: Vec<ParamExpr> },
    #[serde(rename = "box")]
    BoxSl2 { arg: Box<ParamExpr>, n: u32 },
    Dual { arg: Box<ParamExpr> },
}

/// A complete parameter specification: group, expression (or raw terms),
/// optional similitude, residue metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub group: GroupDescriptor,
    pub phi: PhiSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<usize>,
    #[serde(default = "default_residue")]
    pub p: ResidueChar,
}

fn default_residue() -> ResidueChar {
    ResidueChar::Unspecified
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSpec {
    Expr(ParamExpr),
    Terms(Vec<WdTerm>),
}

// ---------------------------------------------------------------------------
// Lexer / parser with source positions.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Word(String),
    Int(i64),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.to_string(),
        }
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn next_tok(&mut self) -> Result<Option<(Tok, usize, usize)>> {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.bump(c);
            } else if c == ';' {
                while let Some(c) = self.src[self.pos..].chars().next() {
                    self.bump(c);
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.src[self.pos..].chars().next() else {
            return Ok(None);
        };
        let tok = match c {
            '(' => {
                self.bump(c);
                Tok::LParen
            }
            ')' => {
                self.bump(c);
                Tok::RParen
            }
            _ => {
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    self.bump(c);
                }
                let word = &self.src[start..self.pos];
                if let Ok(n) = word.parse::<i64>() {
                    Tok::Int(n)
                } else {
                    Tok::Word(word.to_string())
                }
            }
        };
        Ok(Some((tok, line, col)))
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    at: usize,
}

impl Parser {
    fn error_at(&self, msg: &str) -> Error {
        let (line, col) = self
            .toks
            .get(self.at.min(self.toks.len().saturating_sub(1)))
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((0, 0));
        Error::Parse {
            line,
            col,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _, _)| t)
    }

    fn next(&mut self) -> Result<Tok> {
        let t = self
            .toks
            .get(self.at)
            .map(|(t, _, _)| t.clone())
            .ok_or_else(|| self.error_at("unexpected end of input"))?;
        self.at += 1;
        Ok(t)
    }

    fn expect_lparen(&mut self) -> Result<()> {
        match self.next()? {
            Tok::LParen => Ok(()),
            _ => Err(self.error_at("expected '('")),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.next()? {
            Tok::RParen => Ok(()),
            _ => Err(self.error_at("expected ')'")),
        }
    }

    fn expect_word(&mut self) -> Result<String> {
        match self.next()? {
            Tok::Word(w) => Ok(w),
            _ => Err(self.error_at("expected a symbol")),
        }
    }

    fn expect_int(&mut self) -> Result<i64> {
        match self.next()? {
            Tok::Int(n) => Ok(n),
            _ => Err(self.error_at("expected an integer")),
        }
    }

    fn expr(&mut self) -> Result<ParamExpr> {
        self.expect_lparen()?;
        let head = self.expect_word()?;
        let out = match head.as_str() {
            "irrep" => ParamExpr::Irrep {
                index: self.expect_int()? as usize,
            },
            "linchar" => ParamExpr::Linchar {
                index: self.expect_int()? as usize,
            },
            "ind" => {
                let href = self.expect_word()?;
                let idx: usize = href
                    .strip_prefix('H')
                    .and_then(|s| s.parse().ok())
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| self.error_at("expected a subgroup reference H1, H2, ..."))?;
                let arg = self.expr()?;
                ParamExpr::Ind {
                    subgroup: idx,
                    arg: Box::new(arg),
                }
            }
            "twist" => {
                let arg = self.expr()?;
                match self.expr()? {
                    ParamExpr::Linchar { index } => ParamExpr::Twist {
                        arg: Box::new(arg),
                        chi: index,
                    },
                    _ => return Err(self.error_at("twist expects a (linchar i) argument")),
                }
            }
            "dsum" => {
                let mut args = vec![self.expr()?];
                while matches!(self.peek(), Some(Tok::LParen)) {
                    args.push(self.expr()?);
                }
                if args.len() < 2 {
                    return Err(self.error_at("dsum needs at least two summands"));
                }
                ParamExpr::Dsum { args }
            }
            "box" => {
                let arg = self.expr()?;
                let n = self.expect_int()?;
                if n < 1 {
                    return Err(self.error_at("box needs n >= 1"));
                }
                ParamExpr::BoxSl2 {
                    arg: Box::new(arg),
                    n: n as u32,
                }
            }
            "dual" => ParamExpr::Dual {
                arg: Box::new(self.expr()?),
            },
            other => return Err(self.error_at(&format!("unknown constructor `{other}`"))),
        };
        self.expect_rparen()?;
        Ok(out)
    }
}

/// Parse the text form of a bare expression.
pub fn parse_expr(text: &str) -> Result<ParamExpr> {
    let mut lex = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lex.next_tok()? {
        toks.push(t);
    }
    if toks.is_empty() {
        return Err(lex.error("empty input"));
    }
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.error_at("trailing input after expression"));
    }
    Ok(e)
}

/// Parse either a bare expression or a full (param ...) form; the group
/// falls back to `default_group` for bare expressions.
pub fn parse_param_text(text: &str, default_group: Option<&str>) -> Result<ParamSpec> {
    let trimmed = text.trim_start();
    if trimmed.starts_with("(param") {
        let mut lex = Lexer::new(text);
        let mut toks = Vec::new();
        while let Some(t) = lex.next_tok()? {
            toks.push(t);
        }
        let mut p = Parser { toks, at: 0 };
        p.expect_lparen()?;
        let head = p.expect_word()?;
        if head != "param" {
            return Err(p.error_at("expected (param ...)"));
        }
        let mut group = None;
        let mut phi = None;
        let mut sim = None;
        let mut residue = ResidueChar::Unspecified;
        while matches!(p.peek(), Some(Tok::LParen)) {
            let save = p.at;
            p.expect_lparen()?;
            let key = p.expect_word()?;
            match key.as_str() {
                "group" => {
                    group = Some(GroupDescriptor::Catalog {
                        catalog: p.expect_word()?,
                    });
                    p.expect_rparen()?;
                }
                "phi" => {
                    p.at = save;
                    // Re-enter: (phi expr) — consume manually.
                    p.expect_lparen()?;
                    let _ = p.expect_word()?;
                    phi = Some(p.expr()?);
                    p.expect_rparen()?;
                }
                "sim" => {
                    sim = Some(p.expect_int()? as usize);
                    p.expect_rparen()?;
                }
                "p" => {
                    let w = p.expect_word()?;
                    residue = match w.as_str() {
                        "two" | "2" => ResidueChar::Two,
                        "odd" => ResidueChar::Odd,
                        "unspecified" => ResidueChar::Unspecified,
                        _ => return Err(p.error_at("p must be two, odd or unspecified")),
                    };
                    p.expect_rparen()?;
                }
                other => return Err(p.error_at(&format!("unknown param field `{other}`"))),
            }
        }
        p.expect_rparen()?;
        let group = group.ok_or_else(|| p.error_at("missing (group ...)"))?;
        let phi = phi.ok_or_else(|| p.error_at("missing (phi ...)"))?;
        Ok(ParamSpec {
            group,
            phi: PhiSpec::Expr(phi),
            sim,
            p: residue,
        })
    } else {
        let expr = parse_expr(text)?;
        let name = default_group.ok_or_else(|| Error::Parse {
            line: 1,
            col: 1,
            msg: "bare expression needs a group context (--group)".into(),
        })?;
        Ok(ParamSpec {
            group: GroupDescriptor::Catalog {
                catalog: name.to_string(),
            },
            phi: PhiSpec::Expr(expr),
            sim: None,
            p: ResidueChar::Unspecified,
        })
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Irrep { index } => write!(f, "(irrep {index})"),
            ParamExpr::Linchar { index } => write!(f, "(linchar {index})"),
            ParamExpr::Ind { subgroup, arg } => write!(f, "(ind H{subgroup} {arg})"),
            ParamExpr::Twist { arg, chi } => write!(f, "(twist {arg} (linchar {chi}))"),
            ParamExpr::Dsum { args } => {
                write!(f, "(dsum")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            ParamExpr::BoxSl2 { arg, n } => write!(f, "(box {arg} {n})"),
            ParamExpr::Dual { arg } => write!(f, "(dual {arg})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

/// Evaluate an expression over a group context into an effective
/// Weil-Deligne representation.
pub fn eval(expr: &ParamExpr, group: &Arc<GroupTable>) -> Result<WdRep> {
    let table = char_table(group);
    let rep = eval_inner(expr, group, &table)?;
    if !rep.is_effective() {
        return Err(Error::ExprType(
            "expression evaluates to a virtual (non-effective) representation".into(),
        ));
    }
    Ok(rep)
}

fn eval_inner(expr: &ParamExpr, group: &Arc<GroupTable>, table: &Arc<CharTable>) -> Result<WdRep> {
    match expr {
        ParamExpr::Irrep { index } => WdRep::single(table, *index, 1),
        ParamExpr::Linchar { index } => {
            if *index >= table.n_linear() {
                return Err(Error::ExprType(format!(
                    "linchar {index} out of range ({} linear characters)",
                    table.n_linear()
                )));
            }
            WdRep::single(table, *index, 1)
        }
        ParamExpr::Ind { subgroup, arg } => {
            let subs = group.index2_subgroups();
            let sub = subs.get(subgroup - 1).ok_or_else(|| {
                Error::ExprType(format!(
                    "H{subgroup} out of range ({} index-2 subgroups)",
                    subs.len()
                ))
            })?;
            let (ht, _) = sub.table();
            let htab = char_table(&ht);
            let inner = eval_inner(arg, &ht, &htab)?;
            // Induction passes through the SL2 layer termwise.
            let mut acc = WdRep::zero(table);
            for t in inner.terms() {
                let chi = VirtualChar::irreducible(&htab, t.irrep)?;
                let ind = induce(sub, &chi)?;
                let weil = WdRep::from_weil(&ind);
                let lifted = WdRep::new(
                    table,
                    weil.terms()
                        .iter()
                        .map(|w| WdTerm {
                            n: t.n,
                            mult: w.mult * t.mult,
                            irrep: w.irrep,
                        })
                        .collect(),
                )?;
                acc = acc.add(&lifted)?;
            }
            Ok(acc)
        }
        ParamExpr::Twist { arg, chi } => {
            if *chi >= table.n_linear() {
                return Err(Error::ExprType(format!("linchar {chi} out of range")));
            }
            Ok(eval_inner(arg, group, table)?.twist(*chi))
        }
        ParamExpr::Dsum { args } => {
            let mut acc = WdRep::zero(table);
            for a in args {
                acc = acc.add(&eval_inner(a, group, table)?)?;
            }
            Ok(acc)
        }
        ParamExpr::BoxSl2 { arg, n } => {
            let inner = eval_inner(arg, group, table)?;
            if !inner.is_pure_weil() {
                return Err(Error::ExprType(
                    "box requires a pure Weil-layer operand".into(),
                ));
            }
            WdRep::new(
                table,
                inner
                    .terms()
                    .iter()
                    .map(|t| WdTerm { n: *n, ..*t })
                    .collect(),
            )
        }
        ParamExpr::Dual { arg } => Ok(eval_inner(arg, group, table)?.dual()),
    }
}

/// Resolve a full specification into (group, phi, sim, residue).
pub fn resolve_spec(
    spec: &ParamSpec,
    bound: usize,
) -> Result<(Arc<GroupTable>, WdRep, Option<usize>, ResidueChar)> {
    let group = spec.group.build(bound)?;
    let table = char_table(&group);
    let phi = match &spec.phi {
        PhiSpec::Expr(e) => eval(e, &group)?,
        PhiSpec::Terms(terms) => {
            let rep = WdRep::new(&table, terms.clone())?;
            if !rep.is_effective() {
                return Err(Error::ExprType("terms must be effective".into()));
            }
            rep
        }
    };
    Ok((group, phi, spec.sim, spec.p))
}
