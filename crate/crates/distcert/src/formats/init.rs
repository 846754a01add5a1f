//! Initial-distribution sets.
//!
//! One item per line (or separated by `;`): `point: v0 v1 ...` (spaces or
//! commas), `simplex`, `uniform`, or an affine relation such as
//! `V0 + V1 >= 1/2` or `V2 = 0`. Points and relations do not mix.

use distcert_core::constraints::InitRegion;
use distcert_core::lp::Constraint as LinRow;
use distcert_core::rational::{format_vector, parse_rational};
use distcert_core::Rational;

use super::affine::parse_affine;
use crate::error::{Error, Result};

fn uniform_point(n: usize) -> Vec<Rational> {
    vec![Rational::new(1.into(), (n as i64).into()); n]
}

fn relation(item: &str, n: usize, file: &str, line: usize) -> Result<LinRow> {
    let ops = [">=", "<=", "=", ">", "<"];
    let (pos, op) = ops
        .iter()
        .filter_map(|op| item.find(op).map(|p| (p, *op)))
        .min_by_key(|(p, op)| (*p, std::cmp::Reverse(op.len())))
        .ok_or_else(|| Error::syntax(file, line, 1, format!("expected a point or a relation, found `{item}`")))?;
    let lhs = parse_affine(&item[..pos], n).map_err(|e| Error::syntax(file, line, e.column, e.message))?;
    let rhs = parse_affine(&item[pos + op.len()..], n)
        .map_err(|e| Error::syntax(file, line, pos + op.len() + e.column, e.message))?;
    let (a, b) = if op.starts_with('<') { (rhs, lhs) } else { (lhs, rhs) };
    let coeffs: Vec<Rational> = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
    let offset = &a.offset - &b.offset;
    Ok(if op == "=" {
        LinRow::eq(coeffs, offset)
    } else {
        LinRow::ge(coeffs, offset)
    })
}

/// Parses and validates an initial set for `n` states.
pub fn parse_init(text: &str, n: usize, file: &str) -> Result<InitRegion> {
    let mut region = InitRegion::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for item in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(rest) = item.strip_prefix("point:") {
                let vals: Vec<Rational> = rest
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        parse_rational(s)
                            .map_err(|_| Error::syntax(file, ln + 1, 1, format!("bad number `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                if vals.len() != n {
                    return Err(Error::syntax(
                        file,
                        ln + 1,
                        1,
                        format!("point has {} entries, expected {n}", vals.len()),
                    ));
                }
                region.points.push(vals);
            } else if item == "simplex" {
            } else if item == "uniform" {
                region.points.push(uniform_point(n));
            } else {
                region.rows.push(relation(item, n, file, ln + 1)?);
            }
        }
    }
    if !region.points.is_empty() && !region.rows.is_empty() {
        return Err(Error::Usage(format!(
            "{file}: an initial set is either points or relations, not both"
        )));
    }
    region.validate(n)?;
    Ok(region)
}

/// Writes an initial set in the same format.
pub fn write_init(init: &InitRegion) -> String {
    let mut out = String::new();
    for p in &init.points {
        out.push_str(&format!("point: {}\n", format_vector(p).replace(',', " ")));
    }
    for r in &init.rows {
        let op = match r.rel {
            distcert_core::lp::Rel::Ge => ">=",
            distcert_core::lp::Rel::Eq => "=",
        };
        out.push_str(&format!(
            "{} {op} 0\n",
            super::affine::format_affine(&r.coeffs, &r.offset)
        ));
    }
    if out.is_empty() {
        out.push_str("simplex\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use distcert_core::rational::{int, rat};

    #[test]
    fn inline_point() {
        let r = parse_init("point:1/3,1/3,1/3", 3, "x").unwrap();
        assert_eq!(r.points, vec![vec![rat(1, 3); 3]]);
        assert_eq!(parse_init(&write_init(&r), 3, "x").unwrap(), r);
    }

    #[test]
    fn relations() {
        let r = parse_init("V0 + V1 >= 1/2; V2 <= 1/4\n", 3, "x").unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[1].coeffs, vec![int(0), int(0), int(-1)]);
        assert_eq!(r.rows[1].offset, rat(1, 4));
        assert_eq!(parse_init(&write_init(&r), 3, "x").unwrap(), r);
    }

    #[test]
    fn whole_simplex_and_uniform() {
        assert_eq!(parse_init("simplex", 2, "x").unwrap(), InitRegion::whole_simplex());
        assert_eq!(parse_init("uniform", 2, "x").unwrap().points[0], vec![rat(1, 2); 2]);
    }

    #[test]
    fn invalid_sets() {
        assert!(parse_init("point: 1 1 0", 3, "x").is_err());
        assert!(parse_init("point: 1 0", 3, "x").is_err());
        assert!(parse_init("V0 >= 2", 3, "x").is_err());
        assert!(parse_init("point: 1 0 0; V0 >= 0", 3, "x").is_err());
    }
}
