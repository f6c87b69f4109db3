//! Plain-text formats.
//!
//! Group algebra elements are one term per line, `re im c_1 ... c_k`, where
//! the coefficient parts are decimals (or `p/q` for exact scalars) and the
//! c_i are the coordinates of the group element. Toeplitz operators use the
//! same lines after a `lambda <Λ>` header. Blank lines and `#` comments are
//! ignored. Matrices are written sparsely: a `dim <n>` header, then
//! `row col re im` for each nonzero entry.

use std::path::Path;

use nalgebra::DMatrix;

use crate::cayley::{CayleyGraph, Element, Group};
use crate::error::{Error, Result};
use crate::groupalg::AlgebraElement;
use crate::scalar::Scalar;
use crate::truncation::ToeplitzOperator;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_term<S: Scalar, G: Group>(line: usize, text: &str, cayley: &CayleyGraph<G>) -> Result<(Element, S)> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    let arity = cayley.group().arity();
    if fields.len() != 2 + arity {
        return Err(Error::Parse {
            line,
            msg: format!("expected `re im` and {arity} coordinates, got {} fields", fields.len()),
        });
    }
    let c = S::parse_parts(fields[0], fields[1])
        .ok_or_else(|| Error::Parse { line, msg: format!("bad coefficient `{} {}`", fields[0], fields[1]) })?;
    let coords = fields[2..]
        .iter()
        .map(|f| f.parse::<i64>().map_err(|_| Error::Parse { line, msg: format!("bad coordinate `{f}`") }))
        .collect::<Result<Vec<i64>>>()?;
    Ok((Element::new(&coords), c))
}

/// Repeated elements are summed.
pub fn parse_element<S: Scalar, G: Group>(text: &str, cayley: &CayleyGraph<G>) -> Result<AlgebraElement<S>> {
    let mut f = AlgebraElement::zero();
    for (line, l) in content_lines(text) {
        let (g, c) = parse_term(line, l, cayley)?;
        f.add_term(g, c);
    }
    Ok(f)
}

pub fn format_element<S: Scalar>(f: &AlgebraElement<S>) -> String {
    let mut out = String::new();
    for (g, c) in f.iter() {
        let (re, im) = c.format_parts();
        out.push_str(&format!("{re} {im} {g}\n"));
    }
    out
}

pub fn parse_toeplitz<S: Scalar, G: Group>(text: &str, cayley: &CayleyGraph<G>) -> Result<ToeplitzOperator<S>> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing `lambda` header".into() })?;
    let lambda = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["lambda", v] => v.parse::<u32>().map_err(|_| Error::Parse { line, msg: format!("bad radius `{v}`") })?,
        _ => return Err(Error::Parse { line, msg: "expected `lambda <radius>`".into() }),
    };
    let mut symbol = AlgebraElement::zero();
    for (line, l) in lines {
        let (g, c) = parse_term(line, l, cayley)?;
        symbol.add_term(g, c);
    }
    ToeplitzOperator::new(lambda, symbol, cayley)
}

pub fn format_toeplitz<S: Scalar>(t: &ToeplitzOperator<S>) -> String {
    format!("lambda {}\n{}", t.radius(), format_element(t.symbol()))
}

pub fn format_matrix<S: Scalar + nalgebra::Scalar>(m: &DMatrix<S>) -> String {
    let mut out = format!("dim {}\n", m.nrows());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = &m[(r, c)];
            if !v.is_zero() {
                let (re, im) = v.format_parts();
                out.push_str(&format!("{r} {c} {re} {im}\n"));
            }
        }
    }
    out
}

pub fn parse_matrix<S: Scalar + nalgebra::Scalar>(text: &str) -> Result<DMatrix<S>> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing `dim` header".into() })?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dim", v] => v.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad dimension `{v}`") })?,
        _ => return Err(Error::Parse { line, msg: "expected `dim <n>`".into() }),
    };
    let mut m = DMatrix::from_element(n, n, S::zero());
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::Parse { line, msg: "expected `row col re im`".into() });
        }
        let idx = |v: &str| match v.parse::<usize>() {
            Ok(i) if i < n => Ok(i),
            _ => Err(Error::Parse { line, msg: format!("bad index `{v}`") }),
        };
        let (r, c) = (idx(f[0])?, idx(f[1])?);
        m[(r, c)] = S::parse_parts(f[2], f[3])
            .ok_or_else(|| Error::Parse { line, msg: format!("bad entry `{} {}`", f[2], f[3]) })?;
    }
    Ok(m)
}

/// First content line starts with `word`.
pub fn has_header(text: &str, word: &str) -> bool {
    content_lines(text).next().is_some_and(|(_, l)| l.split_whitespace().next() == Some(word))
}

pub fn read_element<S: Scalar, G: Group>(path: &Path, cayley: &CayleyGraph<G>) -> Result<AlgebraElement<S>> {
    parse_element(&std::fs::read_to_string(path)?, cayley)
}

pub fn read_toeplitz<S: Scalar, G: Group>(path: &Path, cayley: &CayleyGraph<G>) -> Result<ToeplitzOperator<S>> {
    parse_toeplitz(&std::fs::read_to_string(path)?, cayley)
}
