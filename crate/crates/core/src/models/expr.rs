//! Affine expressions in the model parameters `w2`, `h2` and `s`, written as
//! strings such as `"2 - s - w2"`, `"1/2*w2"` or `"2*sqrt(2)"`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::qfield::{is_valid_field, parse_rational, QuadElem, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    One,
    W2,
    H2,
    S,
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Param::One => "1",
            Param::W2 => "w2",
            Param::H2 => "h2",
            Param::S => "s",
        }
    }
}

/// Values substituted for the parameters.
#[derive(Debug, Clone)]
pub struct ParamValues {
    pub w2: QuadElem,
    pub h2: QuadElem,
    pub s: QuadElem,
}

/// One coefficient `r` or `r·√D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Term {
    coeff: Rational,
    surd: Option<u64>,
    param: Param,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Affine {
    terms: Vec<Term>,
}

impl Affine {
    pub fn constant(r: Rational) -> Self {
        Affine::from_terms(vec![Term {
            coeff: r,
            surd: None,
            param: Param::One,
        }])
    }

    /// Rational affine combination `c0 + cw·w2 + cs·s`.
    pub fn rational(c0: Rational, cw: Rational, cs: Rational) -> Self {
        let mk = |coeff, param| Term {
            coeff,
            surd: None,
            param,
        };
        Affine::from_terms(vec![mk(c0, Param::One), mk(cw, Param::W2), mk(cs, Param::S)])
    }

    fn from_terms(mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| (a.param, a.surd).cmp(&(b.param, b.surd)));
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.param == t.param && last.surd == t.surd => {
                    last.coeff = &last.coeff + &t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Affine { terms: merged }
    }

    /// Coefficient of `param` when the expression is rational.
    pub fn rational_coeff(&self, param: Param) -> Option<Rational> {
        let mut out = Rational::zero();
        for t in &self.terms {
            if t.surd.is_some() {
                return None;
            }
            if t.param == param {
                out = &out + &t.coeff;
            }
        }
        Some(out)
    }

    pub fn uses(&self, param: Param) -> bool {
        self.terms.iter().any(|t| t.param == param)
    }

    pub fn eval(&self, field: u64, values: &ParamValues) -> Result<QuadElem, String> {
        let mut acc = QuadElem::zero(field);
        for t in &self.terms {
            let base = match t.surd {
                None => QuadElem::rational(t.coeff.clone(), field),
                Some(d) if d == field => QuadElem::sqrt_d(field).scale(&t.coeff),
                Some(d) => return Err(format!("sqrt({d}) used in Q(sqrt {field})")),
            };
            let v = match t.param {
                Param::One => base,
                Param::W2 => base * values.w2.clone(),
                Param::H2 => base * values.h2.clone(),
                Param::S => base * values.s.clone(),
            };
            acc = acc + v;
        }
        Ok(acc)
    }

    pub fn parse(text: &str) -> Result<Affine, String> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err("empty expression".into());
        }
        let mut pieces: Vec<String> = Vec::new();
        let mut cur = String::new();
        let mut depth = 0i32;
        for c in compact.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && !cur.is_empty() => pieces.push(std::mem::take(&mut cur)),
                _ => {}
            }
            cur.push(c);
        }
        pieces.push(cur);
        let mut terms = Vec::new();
        for piece in pieces {
            let (neg, body) = match piece.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, piece.strip_prefix('+').unwrap_or(&piece)),
            };
            if body.is_empty() {
                return Err(format!("dangling sign in {text:?}"));
            }
            let mut coeff = Rational::one();
            let mut surd = None;
            let mut param = Param::One;
            for factor in body.split('*') {
                match factor {
                    "w2" | "h2" | "s" if param == Param::One => {
                        param = match factor {
                            "w2" => Param::W2,
                            "h2" => Param::H2,
                            _ => Param::S,
                        }
                    }
                    f if f.starts_with("sqrt(") && f.ends_with(')') && surd.is_none() => {
                        let d: i64 = f[5..f.len() - 1]
                            .parse()
                            .map_err(|_| format!("bad radical {f:?}"))?;
                        if !is_valid_field(d) {
                            return Err(format!("bad radical {f:?}"));
                        }
                        surd = Some(d as u64);
                    }
                    f => {
                        let r = parse_rational(f).ok_or_else(|| format!("bad factor {f:?} in {text:?}"))?;
                        coeff *= r;
                    }
                }
            }
            if neg {
                coeff = -coeff;
            }
            terms.push(Term { coeff, surd, param });
        }
        Ok(Affine::from_terms(terms))
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (t.surd.is_none() && t.param == Param::One) {
                factors.push(mag.to_string());
            }
            if let Some(d) = t.surd {
                factors.push(format!("sqrt({d})"));
            }
            if t.param != Param::One {
                factors.push(t.param.name().to_string());
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for Affine {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Affine {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Affine::parse(&s).map_err(serde::de::Error::custom)
    }
}
