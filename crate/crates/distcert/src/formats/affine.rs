//! Affine expressions over `V0..V{n-1}` and affine atoms.
//!
//! `Vi` is the probability of the `i`-th state in file order. Expressions
//! are sums of terms `c*Vi`, `Vi` or `c`, with `c` a fraction or decimal.
//! Atoms compare two expressions with `>=`, `<=`, `>` or `<`; strict
//! comparisons are read as their closures.

use distcert_core::logic::AffineAtom;
use distcert_core::rational::{format_rational, parse_rational};
use distcert_core::Rational;
use num_traits::{One, Signed, Zero};

/// Parse failure with a 1-based column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

fn err(column: usize, message: impl Into<String>) -> ExprError {
    ExprError {
        column,
        message: message.into(),
    }
}

/// `coeffs·V + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub coeffs: Vec<Rational>,
    pub offset: Rational,
}

impl Affine {
    fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); n],
            offset: Rational::zero(),
        }
    }

    fn sub(mut self, other: &Affine) -> Self {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        self.offset -= &other.offset;
        self
    }
}

/// Parses `text` as an affine expression over `n` variables.
pub fn parse_affine(text: &str, n: usize) -> Result<Affine, ExprError> {
    let mut out = Affine::zero(n);
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    let skip = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_whitespace() {
            *i += 1;
        }
    };
    let mut first = true;
    loop {
        skip(&mut i);
        if i >= bytes.len() {
            if first {
                return Err(err(i + 1, "empty expression"));
            }
            return Ok(out);
        }
        let mut sign = Rational::one();
        if bytes[i] == '+' || bytes[i] == '-' {
            if bytes[i] == '-' {
                sign = -sign;
            }
            i += 1;
            skip(&mut i);
        } else if !first {
            return Err(err(i + 1, format!("expected `+` or `-`, found `{}`", bytes[i])));
        }
        first = false;
        let start = i;
        let mut coeff: Option<Rational> = None;
        if i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.' || bytes[i] == '/') {
                i += 1;
            }
            let lit: String = bytes[start..i].iter().collect();
            coeff = Some(parse_rational(&lit).map_err(|_| err(start + 1, format!("bad number `{lit}`")))?);
            skip(&mut i);
            if i < bytes.len() && bytes[i] == '*' {
                i += 1;
                skip(&mut i);
                if i >= bytes.len() || bytes[i] != 'V' {
                    return Err(err(i + 1, "expected a variable `Vi` after `*`"));
                }
            }
        }
        if i < bytes.len() && bytes[i] == 'V' {
            let vstart = i;
            i += 1;
            let dstart = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = bytes[dstart..i].iter().collect();
            let idx: usize = digits
                .parse()
                .map_err(|_| err(vstart + 1, "expected a variable index after `V`"))?;
            if idx >= n {
                return Err(err(
                    vstart + 1,
                    format!("variable V{idx} out of range for {n} states"),
                ));
            }
            out.coeffs[idx] += sign * coeff.unwrap_or_else(Rational::one);
        } else if let Some(c) = coeff {
            out.offset += sign * c;
        } else {
            let found = bytes.get(i).map_or("end of input".to_string(), |c| format!("`{c}`"));
            return Err(err(i + 1, format!("expected a number or variable, found {found}")));
        }
    }
}

/// Parses `lhs op rhs` into an atom `coeffs·μ + offset ≥ 0`.
pub fn parse_atom(text: &str, n: usize) -> Result<AffineAtom, ExprError> {
    let ops = [">=", "<=", ">", "<"];
    let (pos, op) = ops
        .iter()
        .filter_map(|op| text.find(op).map(|p| (p, *op)))
        .min_by_key(|(p, op)| (*p, std::cmp::Reverse(op.len())))
        .ok_or_else(|| {
            if text.contains('=') {
                err(1, "equality atoms are not supported; use two inequalities")
            } else {
                err(1, "expected a comparison `>=`, `<=`, `>` or `<`")
            }
        })?;
    let lhs = parse_affine(&text[..pos], n)?;
    let rhs_start = pos + op.len();
    let rhs = parse_affine(&text[rhs_start..], n).map_err(|e| ExprError {
        column: e.column + text[..rhs_start].chars().count(),
        message: e.message,
    })?;
    let diff = if op.starts_with('>') {
        lhs.sub(&rhs)
    } else {
        rhs.sub(&lhs)
    };
    Ok(AffineAtom::new(diff.coeffs, diff.offset))
}

/// `c0*V0 + c1*V1 + c`, zero terms dropped.
pub fn format_affine(coeffs: &[Rational], offset: &Rational) -> String {
    let mut out = String::new();
    let mut push = |c: &Rational, var: Option<usize>| {
        if c.is_zero() {
            return;
        }
        let body = match var {
            Some(i) if c.abs().is_one() => format!("V{i}"),
            Some(i) => format!("{}*V{i}", format_rational(&c.abs())),
            None => format_rational(&c.abs()),
        };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    };
    for (i, c) in coeffs.iter().enumerate() {
        push(c, Some(i));
    }
    push(offset, None);
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn format_atom(a: &AffineAtom) -> String {
    format!("{} >= 0", format_affine(&a.coeffs, &a.offset))
}
