//! Plain-text weight files.
//!
//! Header lines fix the format version, the dimension (`d 3` or `d inf`),
//! the family, and the arithmetic mode. Dense and explicit families list
//! entries as `{1,3} 0.25` (empty set `{}`), with omitted subsets equal to
//! zero; values are decimals or `p/q` fractions. Structured families give
//! parameter lines such as `gamma_seq = powerlaw c=1 lambda=2`. `#` starts
//! a comment. Files are UTF-8 and serialization is byte-deterministic.

use crate::error::{Error, Result};
use crate::families::{OrderSeq, SequenceSpec, WeightSpec};
use crate::kernels::WeightsRepr;
use crate::lattice::{check_coords, format_coords, Coords, Dim};
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::table::WeightTable;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Dense { entries: Vec<(Coords, Rational)> },
    Product { seq: SequenceSpec },
    Pod {
        seq: SequenceSpec,
        order: OrderSeq,
        a: f64,
        c_a: f64,
    },
    FiniteOrder {
        order: u32,
        entries: Vec<(Coords, Rational)>,
    },
    FinSupport { entries: Vec<(Coords, Rational)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightFile {
    pub version: u32,
    pub dim: Dim,
    pub exact: bool,
    pub body: Body,
}

impl WeightFile {
    pub fn family_name(&self) -> &'static str {
        match &self.body {
            Body::Dense { .. } => "dense",
            Body::Product { .. } => "product",
            Body::Pod { .. } => "pod",
            Body::FiniteOrder { .. } => "finite-order",
            Body::FinSupport { .. } => "finsupport",
        }
    }

    /// Dense table in floating point (dense files only).
    pub fn dense_table(&self) -> Result<WeightTable<f64>> {
        let Body::Dense { entries } = &self.body else {
            return Err(Error::InvalidArgument(
                "not a dense weight file; truncate the family first".into(),
            ));
        };
        let d = self.dim.require_finite()?;
        let mut values = vec![0.0f64; crate::lattice::table_len(d)];
        for (coords, value) in entries {
            let u = coords_to_subset(coords, d)?;
            values[u.bits() as usize] = ToPrimitive::to_f64(value).unwrap_or(f64::NAN);
        }
        WeightTable::new(d, values)
    }

    /// Dense table in exact rationals (dense files only).
    pub fn dense_table_exact(&self) -> Result<WeightTable<Rational>> {
        let Body::Dense { entries } = &self.body else {
            return Err(Error::InvalidArgument(
                "not a dense weight file; truncate the family first".into(),
            ));
        };
        let d = self.dim.require_finite()?;
        let mut values = vec![Rational::zero(); crate::lattice::table_len(d)];
        for (coords, value) in entries {
            let u = coords_to_subset(coords, d)?;
            values[u.bits() as usize] = value.clone();
        }
        WeightTable::new(d, values)
    }

    /// Structured family (non-dense files only).
    pub fn to_spec(&self) -> Result<WeightSpec> {
        let spec = match &self.body {
            Body::Dense { .. } => {
                return Err(Error::InvalidArgument(
                    "dense files carry a table, not a family".into(),
                ))
            }
            Body::Product { seq } => WeightSpec::Product {
                seq: seq.clone(),
                d: self.dim,
            },
            Body::Pod { seq, order, a, c_a } => WeightSpec::Pod {
                seq: seq.clone(),
                order: order.clone(),
                a: *a,
                c_a: *c_a,
                d: self.dim,
            },
            Body::FiniteOrder { order, entries } => WeightSpec::FiniteOrder {
                order: *order,
                entries: entries_to_map(entries)?,
                d: self.dim,
            },
            Body::FinSupport { entries } => WeightSpec::FinSupport {
                entries: entries_to_map(entries)?,
                d: self.dim,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform handle for kernel and error operations.
    pub fn to_weights_repr(&self) -> Result<WeightsRepr> {
        match &self.body {
            Body::Dense { .. } => Ok(WeightsRepr::Table(self.dense_table()?)),
            _ => Ok(WeightsRepr::Spec(self.to_spec()?)),
        }
    }
}

fn coords_to_subset(coords: &[u32], d: u32) -> Result<crate::lattice::Subset> {
    check_coords(coords)?;
    if let Some(&max) = coords.last() {
        if max > d {
            return Err(Error::DimensionMismatch(max, d));
        }
    }
    Ok(crate::lattice::Subset::from_members(coords))
}

fn entries_to_map(entries: &[(Coords, Rational)]) -> Result<BTreeMap<Coords, f64>> {
    let mut map = BTreeMap::new();
    for (coords, value) in entries {
        map.insert(coords.clone(), ToPrimitive::to_f64(value).unwrap_or(f64::NAN));
    }
    Ok(map)
}

/// Parses a weight file.
pub fn parse(text: &str) -> Result<WeightFile> {
    let mut version: Option<u32> = None;
    let mut dim: Option<Dim> = None;
    let mut family: Option<String> = None;
    let mut exact = false;
    let mut entries: Vec<(Coords, Rational)> = Vec::new();
    let mut seen: std::collections::BTreeSet<Coords> = std::collections::BTreeSet::new();
    let mut gamma_seq: Option<SequenceSpec> = None;
    let mut order_seq: Option<OrderSeq> = None;
    let mut a: Option<f64> = None;
    let mut c_a: Option<f64> = None;
    let mut order: Option<u32> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));

        if let Some(rest) = line.strip_prefix("version") {
            version = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| err(format!("bad version: {e}")))?,
            );
        } else if let Some(rest) = line.strip_prefix("d ") {
            let rest = rest.trim();
            dim = Some(if rest == "inf" {
                Dim::Infinite
            } else {
                Dim::Finite(rest.parse().map_err(|e| err(format!("bad dimension: {e}")))?)
            });
        } else if let Some(rest) = line.strip_prefix("family") {
            family = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("mode") {
            exact = match rest.trim() {
                "exact" => true,
                "float" => false,
                other => return Err(err(format!("unknown mode `{other}`"))),
            };
        } else if line.starts_with('{') {
            let (coords, value) = parse_entry_line(line).map_err(|e| err(e.to_string()))?;
            if !seen.insert(coords.clone()) {
                return Err(err(format!("duplicate subset {}", format_coords(&coords))));
            }
            if value < Rational::zero() {
                return Err(err("weights must be non-negative".into()));
            }
            entries.push((coords, value));
        } else if let Some(rest) = strip_key(line, "gamma_seq") {
            gamma_seq = Some(parse_sequence(rest).map_err(|e| err(e.to_string()))?);
        } else if let Some(rest) = strip_key(line, "Gamma_seq") {
            order_seq = Some(parse_order_seq(rest).map_err(|e| err(e.to_string()))?);
        } else if let Some(rest) = strip_key(line, "a") {
            a = Some(parse_number(rest).ok_or_else(|| err("bad value for a".into()))?);
        } else if let Some(rest) = strip_key(line, "C_a") {
            c_a = Some(parse_number(rest).ok_or_else(|| err("bad value for C_a".into()))?);
        } else if let Some(rest) = strip_key(line, "order") {
            order = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| err(format!("bad order: {e}")))?,
            );
        } else {
            return Err(err(format!("unrecognized line `{line}`")));
        }
    }

    let version = version.ok_or_else(|| Error::Parse("missing `version` header".into()))?;
    if version != 1 {
        return Err(Error::Parse(format!("unsupported version {version}")));
    }
    let dim = dim.ok_or_else(|| Error::Parse("missing `d` header".into()))?;
    let family = family.ok_or_else(|| Error::Parse("missing `family` header".into()))?;

    let body = match family.as_str() {
        "dense" => {
            dim.require_finite()
                .map_err(|_| Error::Parse("dense files need a finite dimension".into()))?;
            Body::Dense { entries }
        }
        "product" | "pod" if !entries.is_empty() => {
            return Err(Error::Parse(format!(
                "family `{family}` takes parameter lines, not subset entries"
            )))
        }
        "product" => Body::Product {
            seq: gamma_seq.ok_or_else(|| Error::Parse("product files need gamma_seq".into()))?,
        },
        "pod" => Body::Pod {
            seq: gamma_seq.ok_or_else(|| Error::Parse("pod files need gamma_seq".into()))?,
            order: order_seq.ok_or_else(|| Error::Parse("pod files need Gamma_seq".into()))?,
            a: a.ok_or_else(|| Error::Parse("pod files need a".into()))?,
            c_a: c_a.ok_or_else(|| Error::Parse("pod files need C_a".into()))?,
        },
        "finite-order" => Body::FiniteOrder {
            order: order.ok_or_else(|| Error::Parse("finite-order files need order".into()))?,
            entries,
        },
        "finsupport" => Body::FinSupport { entries },
        other => return Err(Error::Parse(format!("unknown family `{other}`"))),
    };
    let file = WeightFile {
        version,
        dim,
        exact,
        body,
    };
    // Validate families eagerly so parse errors carry line-free context.
    if !matches!(file.body, Body::Dense { .. }) {
        file.to_spec()?;
    } else {
        file.dense_table_exact()?;
    }
    Ok(file)
}

fn strip_key<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(key)?;
    let rest = rest.trim_start();
    rest.strip_prefix('=').map(str::trim)
}

fn parse_entry_line(line: &str) -> Result<(Coords, Rational)> {
    let close = line
        .find('}')
        .ok_or_else(|| Error::Parse("missing `}`".into()))?;
    let inner = &line[1..close];
    let coords: Coords = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad index `{t}`: {e}")))
            })
            .collect::<Result<_>>()?
    };
    check_coords(&coords)?;
    let value_str = line[close + 1..].trim();
    let value =
        parse_rational(value_str).ok_or_else(|| Error::Parse(format!("bad value `{value_str}`")))?;
    Ok((coords, value))
}

fn parse_number(token: &str) -> Option<f64> {
    let token = token.trim();
    if let Ok(v) = token.parse::<f64>() {
        return Some(v);
    }
    parse_rational(token).and_then(|r| ToPrimitive::to_f64(&r))
}

fn parse_kv(token: &str, key: &str) -> Option<f64> {
    let rest = token.strip_prefix(key)?.strip_prefix('=')?;
    parse_number(rest)
}

fn parse_sequence(text: &str) -> Result<SequenceSpec> {
    let mut tokens = text.split_whitespace();
    let kind = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty sequence spec".into()))?;
    let seq = match kind {
        "powerlaw" => {
            let mut c = None;
            let mut lambda = None;
            for t in tokens {
                if let Some(v) = parse_kv(t, "c") {
                    c = Some(v);
                } else if let Some(v) = parse_kv(t, "lambda") {
                    lambda = Some(v);
                } else {
                    return Err(Error::Parse(format!("unexpected token `{t}`")));
                }
            }
            SequenceSpec::PowerLaw {
                c: c.ok_or_else(|| Error::Parse("powerlaw needs c=".into()))?,
                lambda: lambda.ok_or_else(|| Error::Parse("powerlaw needs lambda=".into()))?,
            }
        }
        "geometric" => {
            let mut c = None;
            let mut q = None;
            for t in tokens {
                if let Some(v) = parse_kv(t, "c") {
                    c = Some(v);
                } else if let Some(v) = parse_kv(t, "q") {
                    q = Some(v);
                } else {
                    return Err(Error::Parse(format!("unexpected token `{t}`")));
                }
            }
            SequenceSpec::Geometric {
                c: c.ok_or_else(|| Error::Parse("geometric needs c=".into()))?,
                q: q.ok_or_else(|| Error::Parse("geometric needs q=".into()))?,
            }
        }
        "explicit" => {
            let values: Option<Vec<f64>> = tokens.map(parse_number).collect();
            SequenceSpec::Explicit(
                values.ok_or_else(|| Error::Parse("bad explicit sequence value".into()))?,
            )
        }
        "squash" => {
            // squash k=<r> mul=<r> of <base sequence>
            let rest: Vec<&str> = tokens.collect();
            let of_pos = rest
                .iter()
                .position(|t| *t == "of")
                .ok_or_else(|| Error::Parse("squash needs `of <base>`".into()))?;
            let mut k = None;
            let mut mul = None;
            for t in &rest[..of_pos] {
                if let Some(v) = parse_kv(t, "k") {
                    k = Some(v);
                } else if let Some(v) = parse_kv(t, "mul") {
                    mul = Some(v);
                } else {
                    return Err(Error::Parse(format!("unexpected token `{t}`")));
                }
            }
            let base = parse_sequence(&rest[of_pos + 1..].join(" "))?;
            SequenceSpec::Squash {
                base: Box::new(base),
                k: k.ok_or_else(|| Error::Parse("squash needs k=".into()))?,
                mul: mul.unwrap_or(1.0),
            }
        }
        other => return Err(Error::Parse(format!("unknown sequence kind `{other}`"))),
    };
    seq.validate()?;
    Ok(seq)
}

fn parse_order_seq(text: &str) -> Result<OrderSeq> {
    let mut tokens = text.split_whitespace();
    let kind = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty order spec".into()))?;
    match kind {
        "constant" => {
            let v = tokens
                .next()
                .and_then(parse_number)
                .ok_or_else(|| Error::Parse("constant needs a value".into()))?;
            Ok(OrderSeq::Constant(v))
        }
        "explicit" => {
            let values: Option<Vec<f64>> = tokens.map(parse_number).collect();
            Ok(OrderSeq::Explicit(values.ok_or_else(|| {
                Error::Parse("bad explicit order value".into())
            })?))
        }
        "factorial" => {
            let mut a = None;
            let mut scale = None;
            for t in tokens {
                if let Some(v) = parse_kv(t, "a") {
                    a = Some(v);
                } else if let Some(v) = parse_kv(t, "scale") {
                    scale = Some(v);
                } else {
                    return Err(Error::Parse(format!("unexpected token `{t}`")));
                }
            }
            Ok(OrderSeq::Factorial {
                a: a.ok_or_else(|| Error::Parse("factorial needs a=".into()))?,
                scale: scale.unwrap_or(1.0),
            })
        }
        other => Err(Error::Parse(format!("unknown order kind `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

fn format_f64(x: f64) -> String {
    // `Display` for f64 is the shortest representation that round-trips and
    // never uses scientific notation, so emitted files re-parse exactly.
    format!("{x}")
}

/// Serializes a dense float table; zero entries are omitted.
pub fn serialize_dense(table: &WeightTable<f64>) -> String {
    let mut out = String::new();
    out.push_str("version 1\n");
    out.push_str(&format!("d {}\n", table.dim()));
    out.push_str("family dense\n");
    out.push_str("mode float\n");
    for (u, v) in table.iter() {
        if *v != 0.0 {
            out.push_str(&format!("{} {}\n", u, format_f64(*v)));
        }
    }
    out
}

/// Serializes a dense exact table as `p/q` fractions.
pub fn serialize_dense_exact(table: &WeightTable<Rational>) -> String {
    let mut out = String::new();
    out.push_str("version 1\n");
    out.push_str(&format!("d {}\n", table.dim()));
    out.push_str("family dense\n");
    out.push_str("mode exact\n");
    for (u, v) in table.iter() {
        if !v.is_zero() {
            out.push_str(&format!("{} {}\n", u, format_rational(v)));
        }
    }
    out
}

fn serialize_sequence(seq: &SequenceSpec) -> String {
    match seq {
        SequenceSpec::PowerLaw { c, lambda } => {
            format!("powerlaw c={} lambda={}", format_f64(*c), format_f64(*lambda))
        }
        SequenceSpec::Geometric { c, q } => {
            format!("geometric c={} q={}", format_f64(*c), format_f64(*q))
        }
        SequenceSpec::Explicit(v) => {
            let vals: Vec<String> = v.iter().map(|x| format_f64(*x)).collect();
            format!("explicit {}", vals.join(" "))
        }
        SequenceSpec::Squash { base, k, mul } => format!(
            "squash k={} mul={} of {}",
            format_f64(*k),
            format_f64(*mul),
            serialize_sequence(base)
        ),
    }
}

fn serialize_order(order: &OrderSeq) -> String {
    match order {
        OrderSeq::Constant(v) => format!("constant {}", format_f64(*v)),
        OrderSeq::Explicit(v) => {
            let vals: Vec<String> = v.iter().map(|x| format_f64(*x)).collect();
            format!("explicit {}", vals.join(" "))
        }
        OrderSeq::Factorial { a, scale } => {
            format!("factorial a={} scale={}", format_f64(*a), format_f64(*scale))
        }
    }
}

/// Serializes a structured family.
pub fn serialize_spec(spec: &WeightSpec) -> String {
    let mut out = String::new();
    out.push_str("version 1\n");
    out.push_str(&format!("d {}\n", spec.dim()));
    out.push_str(&format!("family {}\n", spec.family_name()));
    out.push_str("mode float\n");
    match spec {
        WeightSpec::Product { seq, .. } => {
            out.push_str(&format!("gamma_seq = {}\n", serialize_sequence(seq)));
        }
        WeightSpec::Pod {
            seq,
            order,
            a,
            c_a,
            ..
        } => {
            out.push_str(&format!("gamma_seq = {}\n", serialize_sequence(seq)));
            out.push_str(&format!("Gamma_seq = {}\n", serialize_order(order)));
            out.push_str(&format!("a = {}\n", format_f64(*a)));
            out.push_str(&format!("C_a = {}\n", format_f64(*c_a)));
        }
        WeightSpec::FiniteOrder { order, entries, .. } => {
            out.push_str(&format!("order = {order}\n"));
            for (coords, v) in entries {
                if *v != 0.0 {
                    out.push_str(&format!("{} {}\n", format_coords(coords), format_f64(*v)));
                }
            }
        }
        WeightSpec::FinSupport { entries, .. } => {
            for (coords, v) in entries {
                if *v != 0.0 {
                    out.push_str(&format!("{} {}\n", format_coords(coords), format_f64(*v)));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dense_file() {
        let text = "# the running counterexample\nversion 1\nd 2\nfamily dense\n{} 5\n{1} 5\n{2} 3\n{1,2} 1\n";
        let file = parse(text).unwrap();
        let table = file.dense_table().unwrap();
        assert_eq!(table.values(), &[5.0, 5.0, 3.0, 1.0]);
        let exact = file.dense_table_exact().unwrap();
        assert_eq!(exact.values()[3], <Rational as crate::scalar::Scalar>::from_f64(1.0));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(parse("version 1\nd 2\nfamily dense\n{1} 1\n{1} 2\n").is_err()); // duplicate
        assert!(parse("version 1\nd 2\nfamily dense\n{2,1} 1\n").is_err()); // not increasing
        assert!(parse("version 1\nd 2\nfamily dense\n{1} -3\n").is_err()); // negative
        assert!(parse("version 1\nd 2\nfamily dense\n{3} 1\n").is_err()); // out of range
        assert!(parse("version 2\nd 2\nfamily dense\n").is_err()); // version
        assert!(parse("version 1\nd inf\nfamily dense\n").is_err()); // dense needs finite d
        assert!(parse("version 1\nd 2\nfamily dense\nnonsense\n").is_err());
    }

    #[test]
    fn parses_product_and_pod_files() {
        let text = "version 1\nd inf\nfamily product\ngamma_seq = powerlaw c=1 lambda=2\n";
        let file = parse(text).unwrap();
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.eval(&[2]), 0.25);

        let text = "version 1\nd 3\nfamily pod\ngamma_seq = explicit 3 2 1\nGamma_seq = explicit 1 3 4 5\na = 1\nC_a = 5\n";
        let file = parse(text).unwrap();
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.eval(&[1, 2]), 24.0);
    }

    #[test]
    fn exact_values_parse_exactly() {
        let text = "version 1\nd 1\nfamily dense\nmode exact\n{} 1/3\n{1} 0.2\n";
        let file = parse(text).unwrap();
        assert!(file.exact);
        let exact = file.dense_table_exact().unwrap();
        assert_eq!(exact.values()[0], Rational::new(1.into(), 3.into()));
        assert_eq!(exact.values()[1], Rational::new(1.into(), 5.into()));
    }

    #[test]
    fn serialize_parse_roundtrip() {
        let table = WeightTable::new(2, vec![0.5, 0.0, 1.25, 3.0]).unwrap();
        let text = serialize_dense(&table);
        let back = parse(&text).unwrap().dense_table().unwrap();
        assert_eq!(back.values(), table.values());

        let spec = WeightSpec::Pod {
            seq: SequenceSpec::Squash {
                base: Box::new(SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 }),
                k: 1.0,
                mul: 1.0,
            },
            order: OrderSeq::Constant(3.0),
            a: 0.5,
            c_a: 3.0,
            d: Dim::Infinite,
        };
        let text = serialize_spec(&spec);
        let back = parse(&text).unwrap().to_spec().unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn serialization_is_deterministic() {
        let table = WeightTable::new(1, vec![0.1, 0.7]).unwrap();
        assert_eq!(serialize_dense(&table), serialize_dense(&table));
    }
}
