//! Concrete functions for the named primitives.
//!
//! Table files hold one value per line, `Name(a, b) = v`, with `#`
//! comments. Named stub sets: `example` (Components(a,b) = b,
//! KolchinProj(a) = a, Iter(a,d) = a+d), `example-b` (Gustavson = sum of
//! its arguments, A = identity) and `zero` (every primitive 0).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Func, KolchinError};
use crate::extract::{extract_bound_all_inputs, BoundResult, ExtractConfig};
use crate::oracle::builtin_from_spec;
use crate::theory::Theory;

pub type PrimFn = Arc<dyn Fn(&[BigInt]) -> Result<BigInt, KolchinError> + Send + Sync>;

#[derive(Clone, Default)]
pub struct Bindings {
    map: BTreeMap<Func, (PrimFn, String)>,
}

impl fmt::Debug for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.map.iter().map(|(k, (_, p))| (k.name(), p)))
            .finish()
    }
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind<F>(&mut self, func: Func, provenance: &str, f: F)
    where
        F: Fn(&[BigInt]) -> Result<BigInt, KolchinError> + Send + Sync + 'static,
    {
        self.map.insert(func, (Arc::new(f), provenance.to_string()));
    }

    pub fn bind_arc(&mut self, func: Func, provenance: &str, f: PrimFn) {
        self.map.insert(func, (f, provenance.to_string()));
    }

    pub fn is_bound(&self, func: Func) -> bool {
        self.map.contains_key(&func)
    }

    /// Bound names with where their values come from.
    pub fn provenance(&self) -> Vec<(Func, &str)> {
        self.map
            .iter()
            .map(|(k, (_, p))| (*k, p.as_str()))
            .collect()
    }

    /// Entries of `other` replace those of `self`.
    pub fn merge(&mut self, other: &Bindings) {
        for (k, v) in &other.map {
            self.map.insert(*k, v.clone());
        }
    }

    pub fn call(&self, func: Func, args: &[BigInt]) -> Result<BigInt, KolchinError> {
        if args.len() != func.arity() {
            return Err(KolchinError::Arity {
                name: func.name().into(),
                expected: func.arity(),
                got: args.len(),
            });
        }
        let (f, _) = self
            .map
            .get(&func)
            .ok_or_else(|| KolchinError::Unbound(func.name().into()))?;
        f(args)
    }

    pub fn stub(name: &str) -> Option<Bindings> {
        let mut b = Bindings::new();
        let prov = format!("stub {name}");
        match name {
            "example" => {
                b.bind(Func::Components, &prov, |a| Ok(a[1].clone()));
                b.bind(Func::KolchinProj, &prov, |a| Ok(a[0].clone()));
                b.bind(Func::Iter, &prov, |a| Ok(&a[0] + &a[1]));
            }
            "example-b" => {
                b.bind(Func::Gustavson, &prov, |a| Ok(a.iter().sum()));
                b.bind(Func::A, &prov, |a| Ok(a[0].clone()));
            }
            "zero" => {
                for f in Func::ALL {
                    if f != Func::A {
                        b.bind(f, &prov, |_| Ok(BigInt::zero()));
                    }
                }
            }
            _ => return None,
        }
        Some(b)
    }

    pub fn stub_names() -> &'static [&'static str] {
        &["example", "example-b", "zero"]
    }

    pub fn from_table(text: &str, source: &str) -> Result<Bindings, KolchinError> {
        let mut rows: BTreeMap<Func, HashMap<Vec<BigInt>, BigInt>> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| KolchinError::Table {
                line: k + 1,
                msg: msg.to_string(),
            };
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `Name(args) = value`"))?;
            let (name, args) = lhs
                .trim()
                .split_once('(')
                .ok_or_else(|| bad("expected `(`"))?;
            let args = args
                .trim()
                .strip_suffix(')')
                .ok_or_else(|| bad("expected `)`"))?;
            let func = Func::from_name(name.trim()).ok_or_else(|| bad("unknown primitive"))?;
            let args = args
                .split(',')
                .map(|a| {
                    a.trim()
                        .parse::<BigInt>()
                        .map_err(|_| bad("arguments must be integers"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if args.len() != func.arity() {
                return Err(bad(&format!(
                    "{} takes {} arguments",
                    func.name(),
                    func.arity()
                )));
            }
            let v = rhs
                .trim()
                .parse::<BigInt>()
                .map_err(|_| bad("value must be an integer"))?;
            if v < BigInt::zero() {
                return Err(bad("values must be non-negative"));
            }
            rows.entry(func).or_default().insert(args, v);
        }
        let mut b = Bindings::new();
        for (func, table) in rows {
            b.bind(func, &format!("table {source}"), move |a| {
                table.get(a).cloned().ok_or_else(|| KolchinError::NoRow {
                    name: func.name().into(),
                    args: a
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                })
            });
        }
        Ok(b)
    }
}

/// `Size(ℓ, r)` from the bound extractor: the proven output bound of
/// `family(ℓ)` over all inputs of length at most `r`.
pub fn extractor_size(theory: Theory, family: &str, cfg: ExtractConfig) -> PrimFn {
    let family = family.to_string();
    let memo: Mutex<HashMap<(usize, usize), BigInt>> = Mutex::new(HashMap::new());
    Arc::new(move |a: &[BigInt]| {
        let to_usize = |x: &BigInt| {
            x.to_usize()
                .ok_or_else(|| KolchinError::Negative(x.clone()))
        };
        let key = (to_usize(&a[0])?, to_usize(&a[1])?);
        if let Some(v) = memo.lock().expect("memo").get(&key) {
            return Ok(v.clone());
        }
        let err = |e: &dyn fmt::Display| KolchinError::Extractor(e.to_string());
        let alg =
            builtin_from_spec(&format!("{family}({})", key.0), &theory).map_err(|e| err(&e))?;
        let res =
            extract_bound_all_inputs(&theory, alg.as_ref(), key.1, &cfg).map_err(|e| err(&e))?;
        let v = match res.result {
            BoundResult::Proven { n, .. } => BigInt::from(n),
            BoundResult::Undetermined { depth } => {
                return Err(KolchinError::Extractor(format!(
                    "{family}({}) undetermined at depth {depth}",
                    key.0
                )))
            }
        };
        memo.lock().expect("memo").insert(key, v.clone());
        Ok(v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn stubs() {
        let b = Bindings::stub("example").unwrap();
        assert_eq!(b.call(Func::Iter, &ints(&[1, 2])).unwrap(), 3.into());
        assert_eq!(b.call(Func::Components, &ints(&[4, 7])).unwrap(), 7.into());
        assert!(matches!(
            b.call(Func::Gustavson, &ints(&[1, 1, 1, 1])),
            Err(KolchinError::Unbound(_))
        ));
        assert!(matches!(
            b.call(Func::Iter, &ints(&[1])),
            Err(KolchinError::Arity { .. })
        ));
        assert!(Bindings::stub("nope").is_none());
    }

    #[test]
    fn table() {
        let b = Bindings::from_table(
            "# demo\nIter(1, 2) = 5\nkolchinproj(3) = 9 # note\n",
            "t.txt",
        )
        .unwrap();
        assert_eq!(b.call(Func::Iter, &ints(&[1, 2])).unwrap(), 5.into());
        assert_eq!(b.call(Func::KolchinProj, &ints(&[3])).unwrap(), 9.into());
        assert!(matches!(
            b.call(Func::Iter, &ints(&[1, 3])),
            Err(KolchinError::NoRow { .. })
        ));
        assert_eq!(b.provenance()[0].1, "table t.txt");
        assert!(matches!(
            Bindings::from_table("Iter(1) = 2", "t"),
            Err(KolchinError::Table { line: 1, .. })
        ));
        assert!(Bindings::from_table("Iter(1, 2) = -1", "t").is_err());
    }

    #[test]
    fn extractor_backed_size() {
        let f = extractor_size(Theory::lovs(), "first_nonzero", ExtractConfig::default());
        // The empty input scans both parameters.
        assert_eq!(f(&ints(&[2, 1])).unwrap(), 4.into());
        assert_eq!(f(&ints(&[2, 1])).unwrap(), 4.into());
    }
}
