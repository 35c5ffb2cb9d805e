//! Bound expressions.
//!
//! Prefix text: integers, variables, `(+ …)`, `(* …)`, `(max …)`,
//! `(f a …)` for a named function, `(nest n k x)` for `Iter(n, ·)` applied
//! `k` times to `x`, and `(len j d e)` for the chain length of `j ↦ e` in
//! dimension `d`.

use std::fmt;

use num_bigint::BigInt;

use super::KolchinError;

/// Named functions. All but `A` are primitives supplied by bindings; `A` can
/// be bound too, and is otherwise expanded through its definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Components,
    KolchinProj,
    Iter,
    PrimeComp,
    CharSet,
    Rg,
    Gustavson,
    Size,
    A,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Components,
        Func::KolchinProj,
        Func::Iter,
        Func::PrimeComp,
        Func::CharSet,
        Func::Rg,
        Func::Gustavson,
        Func::Size,
        Func::A,
    ];

    pub fn arity(self) -> usize {
        match self {
            Func::KolchinProj | Func::A => 1,
            Func::Components | Func::Iter | Func::PrimeComp | Func::Size => 2,
            Func::CharSet | Func::Rg => 3,
            Func::Gustavson => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Components => "Components",
            Func::KolchinProj => "KolchinProj",
            Func::Iter => "Iter",
            Func::PrimeComp => "PrimeComp",
            Func::CharSet => "CharSet",
            Func::Rg => "RG",
            Func::Gustavson => "Gustavson",
            Func::Size => "Size",
            Func::A => "A",
        }
    }

    fn prefix_name(self) -> String {
        match self {
            Func::A => "A".into(),
            f => f.name().to_lowercase(),
        }
    }

    /// Accepts the display name or its lowercase form.
    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL
            .into_iter()
            .find(|f| f.name() == s || (*f != Func::A && f.prefix_name() == s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoundExpr {
    Lit(BigInt),
    Var(String),
    Add(Vec<BoundExpr>),
    Mul(Vec<BoundExpr>),
    Max(Vec<BoundExpr>),
    Call(Func, Vec<BoundExpr>),
    Nest {
        n: Box<BoundExpr>,
        times: Box<BoundExpr>,
        init: Box<BoundExpr>,
    },
    Len {
        var: String,
        dim: Box<BoundExpr>,
        body: Box<BoundExpr>,
    },
}

impl BoundExpr {
    pub fn lit(n: i64) -> Self {
        BoundExpr::Lit(n.into())
    }

    pub fn var(s: &str) -> Self {
        BoundExpr::Var(s.into())
    }

    pub fn call(f: Func, args: Vec<BoundExpr>) -> Self {
        assert_eq!(args.len(), f.arity(), "{} arity", f.name());
        BoundExpr::Call(f, args)
    }

    pub fn nest(n: BoundExpr, times: BoundExpr, init: BoundExpr) -> Self {
        BoundExpr::Nest {
            n: Box::new(n),
            times: Box::new(times),
            init: Box::new(init),
        }
    }

    pub fn chain_len(var: &str, dim: BoundExpr, body: BoundExpr) -> Self {
        BoundExpr::Len {
            var: var.into(),
            dim: Box::new(dim),
            body: Box::new(body),
        }
    }

    /// Every named function the expression calls, `A` included.
    pub fn funcs(&self) -> Vec<Func> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let BoundExpr::Call(f, _) = e {
                if !out.contains(f) {
                    out.push(*f);
                }
            }
        });
        out.sort();
        out
    }

    fn walk(&self, f: &mut impl FnMut(&BoundExpr)) {
        f(self);
        match self {
            BoundExpr::Lit(_) | BoundExpr::Var(_) => {}
            BoundExpr::Add(xs)
            | BoundExpr::Mul(xs)
            | BoundExpr::Max(xs)
            | BoundExpr::Call(_, xs) => xs.iter().for_each(|x| x.walk(f)),
            BoundExpr::Nest { n, times, init } => {
                n.walk(f);
                times.walk(f);
                init.walk(f);
            }
            BoundExpr::Len { dim, body, .. } => {
                dim.walk(f);
                body.walk(f);
            }
        }
    }

    /// Nested prefix text.
    pub fn to_prefix(&self) -> String {
        let list = |head: &str, xs: &[&BoundExpr]| {
            let mut s = format!("({head}");
            for x in xs {
                s.push(' ');
                s.push_str(&x.to_prefix());
            }
            s.push(')');
            s
        };
        match self {
            BoundExpr::Lit(n) => n.to_string(),
            BoundExpr::Var(v) => v.clone(),
            BoundExpr::Add(xs) => list("+", &xs.iter().collect::<Vec<_>>()),
            BoundExpr::Mul(xs) => list("*", &xs.iter().collect::<Vec<_>>()),
            BoundExpr::Max(xs) => list("max", &xs.iter().collect::<Vec<_>>()),
            BoundExpr::Call(f, xs) => list(&f.prefix_name(), &xs.iter().collect::<Vec<_>>()),
            BoundExpr::Nest { n, times, init } => list("nest", &[n, times, init]),
            BoundExpr::Len { var, dim, body } => {
                format!("(len {var} {} {})", dim.to_prefix(), body.to_prefix())
            }
        }
    }

    fn fmt_in_product(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundExpr::Add(_) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, xs: &[BoundExpr], sep: &str) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundExpr::Lit(n) => write!(f, "{n}"),
            BoundExpr::Var(v) => write!(f, "{v}"),
            BoundExpr::Add(xs) => join(f, xs, "+"),
            BoundExpr::Mul(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "·")?;
                    }
                    x.fmt_in_product(f)?;
                }
                Ok(())
            }
            BoundExpr::Max(xs) => {
                write!(f, "max{{")?;
                join(f, xs, ",")?;
                write!(f, "}}")
            }
            BoundExpr::Call(func, xs) => {
                write!(f, "{}(", func.name())?;
                join(f, xs, ", ")?;
                write!(f, ")")
            }
            BoundExpr::Nest { n, times, init } => write!(f, "Iter({n}, ·)^[{times}]({init})"),
            BoundExpr::Len { var, dim, body } => write!(f, "Len[{var} ↦ {body}; dim {dim}]"),
        }
    }
}

enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(usize, &'a str),
}

fn tokenize(s: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(st) = start.take() {
                out.push(Tok::Atom(st, &s[st..i]));
            }
            match c {
                '(' => out.push(Tok::Open(i)),
                ')' => out.push(Tok::Close(i)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(Tok::Atom(st, &s[st..]));
    }
    out
}

fn perr<T>(pos: usize, msg: impl Into<String>) -> Result<T, KolchinError> {
    Err(KolchinError::Parse {
        pos,
        msg: msg.into(),
    })
}

fn is_ident(s: &str) -> bool {
    s.chars()
        .next()
        .is_some_and(|c| c.is_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

fn parse_at(toks: &[Tok<'_>], i: &mut usize, end: usize) -> Result<BoundExpr, KolchinError> {
    match toks.get(*i) {
        None => perr(end, "unexpected end of input"),
        Some(Tok::Close(p)) => perr(*p, "unexpected `)`"),
        Some(Tok::Atom(p, a)) => {
            *i += 1;
            if let Ok(n) = a.parse::<BigInt>() {
                Ok(BoundExpr::Lit(n))
            } else if is_ident(a) {
                Ok(BoundExpr::Var(a.to_string()))
            } else {
                perr(*p, format!("bad atom `{a}`"))
            }
        }
        Some(Tok::Open(p)) => {
            let p = *p;
            *i += 1;
            let Some(Tok::Atom(hp, head)) = toks.get(*i) else {
                return perr(p, "expected an operator");
            };
            let (hp, head) = (*hp, *head);
            *i += 1;
            let mut args = Vec::new();
            let mut binder = None;
            if head == "len" {
                match toks.get(*i) {
                    Some(Tok::Atom(_, v)) if is_ident(v) => {
                        binder = Some(v.to_string());
                        *i += 1;
                    }
                    _ => return perr(hp, "len needs a variable"),
                }
            }
            loop {
                match toks.get(*i) {
                    Some(Tok::Close(_)) => {
                        *i += 1;
                        break;
                    }
                    None => return perr(end, "missing `)`"),
                    _ => args.push(parse_at(toks, i, end)?),
                }
            }
            let want = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    perr(hp, format!("{head} takes {k} arguments"))
                }
            };
            match head {
                "+" | "*" | "max" => {
                    if args.is_empty() {
                        return perr(hp, format!("{head} needs arguments"));
                    }
                    Ok(match head {
                        "+" => BoundExpr::Add(args),
                        "*" => BoundExpr::Mul(args),
                        _ => BoundExpr::Max(args),
                    })
                }
                "nest" => {
                    want(3)?;
                    let mut it = args.into_iter();
                    let (n, k, x) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                    Ok(BoundExpr::nest(n, k, x))
                }
                "len" => {
                    want(2)?;
                    let mut it = args.into_iter();
                    let (d, b) = (it.next().unwrap(), it.next().unwrap());
                    Ok(BoundExpr::chain_len(&binder.expect("len binder"), d, b))
                }
                _ => match Func::from_name(head) {
                    Some(f) => {
                        want(f.arity())?;
                        Ok(BoundExpr::Call(f, args))
                    }
                    None => perr(hp, format!("unknown function `{head}`")),
                },
            }
        }
    }
}

pub fn parse_bound_expr(s: &str) -> Result<BoundExpr, KolchinError> {
    let toks = tokenize(s);
    let mut i = 0;
    let e = parse_at(&toks, &mut i, s.len())?;
    match toks.get(i) {
        None => Ok(e),
        Some(Tok::Open(p) | Tok::Close(p) | Tok::Atom(p, _)) => perr(*p, "trailing input"),
    }
}
