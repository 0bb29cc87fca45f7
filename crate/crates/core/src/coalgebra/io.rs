use std::collections::BTreeSet;
use std::fmt::Write;

use serde::Deserialize;

use crate::algebra::Scalar;
use crate::error::{Error, Result};

use super::model::{CoproductFamily, Counit, VertexCoalgebra};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoalgebra {
    #[serde(default)]
    name: Option<String>,
    dimension: i64,
    counit: Vec<String>,
    coproducts: Vec<RawCoproduct>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoproduct {
    n: i64,
    entries: Vec<(i64, i64, i64, String)>,
}

fn invalid(msg: String) -> Error {
    Error::Parse(msg)
}

fn scalar(field: &str, s: &str) -> Result<Scalar> {
    s.parse()
        .map_err(|_| invalid(format!("{field}: `{s}` is not a canonical rational (use `a` or `a/b` in lowest terms)")))
}

/// Parses and validates a coalgebra file. Diagnostics name the offending
/// field, or give line and column for syntax errors.
pub fn parse_coalgebra(text: &str) -> Result<VertexCoalgebra> {
    let raw: RawCoalgebra = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
    let dim = usize::try_from(raw.dimension)
        .map_err(|_| invalid(format!("dimension: must be nonnegative, got {}", raw.dimension)))?;
    if raw.counit.len() != dim {
        return Err(invalid(format!("counit: expected {dim} entries, found {}", raw.counit.len())));
    }
    let counit =
        raw.counit.iter().enumerate().map(|(i, s)| scalar(&format!("counit[{i}]"), s)).collect::<Result<Vec<_>>>()?;
    let mut family = CoproductFamily::new(dim);
    let mut seen_n = BTreeSet::new();
    for (r, rec) in raw.coproducts.iter().enumerate() {
        if !seen_n.insert(rec.n) {
            return Err(invalid(format!("coproducts[{r}].n: duplicate record for n = {}", rec.n)));
        }
        let mut seen = BTreeSet::new();
        for (e, (i, j, k, c)) in rec.entries.iter().enumerate() {
            let at = format!("coproducts[{r}].entries[{e}]");
            let idx = [*i, *j, *k].map(|x| usize::try_from(x).ok().filter(|&x| x < dim));
            let [Some(i), Some(j), Some(k)] = idx else {
                return Err(invalid(format!("{at}: basis index out of range for dimension {dim}")));
            };
            if !seen.insert((i, j, k)) {
                return Err(invalid(format!("{at}: duplicate entry ({i}, {j}, {k})")));
            }
            let c = scalar(&at, c)?;
            if c.is_zero() {
                return Err(invalid(format!("{at}: zero coefficients must be omitted")));
            }
            family.add_entry(rec.n, i, j, k, &c)?;
        }
    }
    VertexCoalgebra::new(raw.name.unwrap_or_default(), family, Counit::new(&counit))
}

/// Canonical text form: coproducts by increasing `n`, entries in
/// lexicographic order, zero maps omitted, the name omitted when empty.
pub fn write_coalgebra(v: &VertexCoalgebra) -> String {
    let q = |s: &str| serde_json::to_string(s).expect("strings serialize");
    let mut out = String::from("{\n");
    if !v.name().is_empty() {
        let _ = writeln!(out, "  \"name\": {},", q(v.name()));
    }
    let _ = writeln!(out, "  \"dimension\": {},", v.dim());
    let counit: Vec<String> = v.counit().values().iter().map(|c| q(&c.to_string())).collect();
    let _ = writeln!(out, "  \"counit\": [{}],", counit.join(", "));
    let records: Vec<String> = v
        .delta()
        .iter()
        .map(|(n, map)| {
            let entries: Vec<String> =
                map.entries().map(|(i, [j, k], c)| format!("[{i}, {j}, {k}, {}]", q(&c.to_string()))).collect();
            format!("    {{\"n\": {n}, \"entries\": [{}]}}", entries.join(", "))
        })
        .collect();
    if records.is_empty() {
        out.push_str("  \"coproducts\": []\n");
    } else {
        let _ = writeln!(out, "  \"coproducts\": [\n{}\n  ]", records.join(",\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIVIAL: &str = "{\n  \"name\": \"trivial\",\n  \"dimension\": 1,\n  \"counit\": [\"1\"],\n  \"coproducts\": [\n    {\"n\": -1, \"entries\": [[0, 0, 0, \"1\"]]}\n  ]\n}\n";

    #[test]
    fn round_trip_is_bit_exact() {
        let v = parse_coalgebra(TRIVIAL).unwrap();
        assert_eq!(v.dim(), 1);
        assert_eq!(write_coalgebra(&v), TRIVIAL);
    }

    #[test]
    fn unsorted_input_is_canonicalized() {
        let text = r#"{"dimension": 2, "counit": ["1", "0"], "coproducts": [
            {"n": -1, "entries": [[1, 1, 0, "1"], [0, 0, 0, "1"], [1, 0, 1, "1"]]},
            {"n": -2, "entries": [[0, 1, 0, "1"]]}]}"#;
        let v = parse_coalgebra(text).unwrap();
        let canon = write_coalgebra(&v);
        assert!(canon.find("\"n\": -2").unwrap() < canon.find("\"n\": -1").unwrap());
        assert!(!canon.contains("name"));
        assert_eq!(parse_coalgebra(&canon).unwrap(), v);
        assert_eq!(write_coalgebra(&parse_coalgebra(&canon).unwrap()), canon);
    }

    #[test]
    fn empty_dimension_is_valid() {
        let v = parse_coalgebra(r#"{"dimension": 0, "counit": [], "coproducts": []}"#).unwrap();
        assert_eq!(v.dim(), 0);
        assert_eq!(parse_coalgebra(&write_coalgebra(&v)).unwrap(), v);
    }

    fn err(text: &str) -> String {
        parse_coalgebra(text).unwrap_err().to_string()
    }

    #[test]
    fn diagnostics_name_the_field() {
        assert!(err(r#"{"dimension": -1, "counit": [], "coproducts": []}"#).contains("dimension"));
        assert!(err(r#"{"dimension": 1, "counit": [], "coproducts": []}"#).contains("counit"));
        assert!(err(r#"{"dimension": 1, "counit": ["2/4"], "coproducts": []}"#).contains("counit[0]"));
        assert!(err(r#"{"dimension": 1, "counit": ["1"], "coproducts": [], "extra": 1}"#).contains("extra"));
        assert!(err(r#"{"dimension": 1, "counit": ["1"], "coproducts": [{"n": 0, "entries": [[0, 1, 0, "1"]]}]}"#)
            .contains("coproducts[0].entries[0]"));
        assert!(err(
            r#"{"dimension": 1, "counit": ["1"], "coproducts": [{"n": 0, "entries": []}, {"n": 0, "entries": []}]}"#
        )
        .contains("duplicate"));
        assert!(err(r#"{"dimension": 1, "counit": ["1"], "coproducts": [{"n": 0, "entries": [[0, 0, 0, "0"]]}]}"#)
            .contains("zero"));
        assert!(err("{\n  \"dimension\": 1,\n  oops\n}").contains("line 3"));
    }
}
