//! Comparison tables of every applicable bound per `(family, param, k)`.

use std::io::Write;
use std::time::Duration;

use num_traits::ToPrimitive;
use ramsey_core::bounds::{
    gowers_upper, is_prime, q1_new_base, q1_vijay_beta, q_exact, q_landman_coeff, rational_to_string, sp_lower_constructive,
    sp_lower_probabilistic, sp_upper, vdw_lower_primes, vdw_lower_probabilistic, BoundNumber, BoundValue,
};
use ramsey_core::search::SearchConfig;
use ramsey_core::ProgressionKind;
use serde::Serialize;

use crate::error::LabResult;
use crate::parallel::{parallel_ramsey_number, SearchOptions};

pub const NA: &str = "n/a";

pub const HEADER: [&str; 12] = [
    "family",
    "param",
    "k",
    "constructive_lower",
    "probabilistic_lower",
    "formula_exact",
    "exact",
    "upper",
    "vijay_beta_pow",
    "new_base_pow",
    "flags",
    "violation",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Ap,
    Semi,
    Quasi,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableSpec {
    pub families: Vec<Family>,
    /// Inclusive scope/diameter range for semi and quasi rows.
    pub params: (usize, usize),
    /// Inclusive `k` range; empty when `lo > hi`.
    pub k_range: (usize, usize),
    /// Run the exact search for each cell.
    pub exact: bool,
    /// Search ceiling when no upper bound applies.
    pub max_n: usize,
    pub cell_time: Duration,
}

/// One CSV row; every cell is already rendered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub family: String,
    pub param: String,
    pub k: String,
    pub constructive_lower: String,
    pub probabilistic_lower: String,
    pub formula_exact: String,
    pub exact: String,
    pub upper: String,
    pub vijay_beta_pow: String,
    pub new_base_pow: String,
    pub flags: String,
    pub violation: String,
}

impl TableRow {
    pub fn cells(&self) -> [&str; 12] {
        [
            &self.family,
            &self.param,
            &self.k,
            &self.constructive_lower,
            &self.probabilistic_lower,
            &self.formula_exact,
            &self.exact,
            &self.upper,
            &self.vijay_beta_pow,
            &self.new_base_pow,
            &self.flags,
            &self.violation,
        ]
    }

    pub fn has_violation(&self) -> bool {
        self.violation != "none"
    }
}

/// Parses an inclusive range `a..b` (or `a..=b`, or a single `a`).
pub fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected a range like 3..6, got {s:?}");
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        }
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            Ok((v, v))
        }
    }
}

fn num(b: &BoundValue) -> String {
    match &b.value {
        BoundNumber::Rational(r) => rational_to_string(r),
        v => v.to_string(),
    }
}

fn float(x: f64) -> String {
    format!("{x}")
}

/// Quasi rows: `Q_{k-i}(k)` from the large-diameter formula when
/// `k = m·i + r` meets its side conditions.
fn quasi_formula(k: usize, diameter: usize) -> Option<BoundValue> {
    let i = k.checked_sub(diameter).filter(|&i| i > 0)? as u64;
    let (m, r) = (k as u64 / i, k as u64 % i);
    q_exact(i, m, r).ok().map(|q| q.value)
}

struct Cell {
    lowers: Vec<(&'static str, f64)>,
    upper: Option<f64>,
    formula: Option<f64>,
    strict_lower: Option<f64>,
}

pub fn emit_table(spec: &TableSpec, opts: &SearchOptions) -> LabResult<Vec<TableRow>> {
    let (klo, khi) = spec.k_range;
    let mut rows = Vec::new();
    let q1 = q1_new_base();
    let beta = q1_vijay_beta(1e-12)?.beta;
    for &family in &spec.families {
        let params: Vec<usize> = match family {
            Family::Ap => vec![0],
            _ => (spec.params.0..=spec.params.1)
                .filter(|&p| family == Family::Quasi || p >= 1)
                .collect(),
        };
        for param in params {
            for k in klo.max(2)..=khi {
                let kind = match family {
                    Family::Ap => ProgressionKind::Arithmetic,
                    Family::Semi => ProgressionKind::Semi(param),
                    Family::Quasi => ProgressionKind::Quasi(param),
                };
                rows.push(row(spec, opts, family, kind, k, beta, q1.g)?);
            }
        }
    }
    Ok(rows)
}

fn row(spec: &TableSpec, opts: &SearchOptions, family: Family, kind: ProgressionKind, k: usize, beta: f64, g: f64) -> LabResult<TableRow> {
    let mut r = TableRow {
        family: kind.name().to_string(),
        param: if family == Family::Ap {
            NA.into()
        } else {
            kind.param().to_string()
        },
        k: k.to_string(),
        constructive_lower: NA.into(),
        probabilistic_lower: NA.into(),
        formula_exact: NA.into(),
        exact: NA.into(),
        upper: NA.into(),
        vijay_beta_pow: NA.into(),
        new_base_pow: NA.into(),
        flags: String::new(),
        violation: "none".into(),
    };
    let mut flags = Vec::new();
    let mut cell = Cell {
        lowers: Vec::new(),
        upper: None,
        formula: None,
        strict_lower: None,
    };
    let k64 = k as u64;
    match kind {
        ProgressionKind::Arithmetic => {
            if k >= 6 && is_prime(k64 - 1) {
                let b = vdw_lower_primes(k64 - 1, 2)?;
                r.constructive_lower = num(&b);
                cell.lowers.push(("constructive", b.to_f64().unwrap_or(f64::INFINITY)));
            }
            let p = vdw_lower_probabilistic(k as u32)?;
            r.probabilistic_lower = num(&p);
            cell.lowers.push(("probabilistic", p.to_f64().unwrap_or(0.0)));
            r.upper = gowers_upper(k64, 2)?.to_string();
        }
        ProgressionKind::Semi(m) => {
            let c = sp_lower_constructive(m as u64, k64)?;
            r.constructive_lower = num(&c);
            cell.lowers.push(("constructive", c.to_f64().unwrap_or(f64::INFINITY)));
            let p = sp_lower_probabilistic(m as u32, k as u32)?;
            r.probabilistic_lower = num(&p);
            cell.lowers.push(("probabilistic", p.to_f64().unwrap_or(0.0)));
            if let Ok(u) = sp_upper(m as u64, k64) {
                r.upper = num(&u);
                cell.upper = u.to_f64();
            }
        }
        ProgressionKind::Quasi(n) => {
            if let Some(f) = quasi_formula(k, n) {
                r.formula_exact = num(&f);
                cell.formula = f.to_f64();
            }
            let landman = q_landman_coeff(k64)?;
            if landman.diameter as usize == n {
                r.upper = num(&landman.value);
                flags.push("upper asymptotic".to_string());
            }
            if n == 1 {
                let bk = beta.powi(k as i32);
                r.vijay_beta_pow = float(bk);
                r.new_base_pow = float(g.powi(k as i32));
                cell.strict_lower = Some(bk);
                flags.push("new_base_pow omits an unspecified constant".to_string());
            }
        }
    }

    let mut violations = Vec::new();
    if let Some(u) = cell.upper {
        for (name, l) in &cell.lowers {
            if *l > u {
                violations.push(format!("{name} lower bound exceeds upper bound"));
            }
        }
    }
    if spec.exact {
        let max_n = cell.upper.map_or(spec.max_n, |u| (u as usize + 1).max(k));
        let mut cfg = SearchConfig::new(kind, k, max_n);
        cfg.node_budget = u64::MAX;
        let cell_opts = SearchOptions {
            time_budget: Some(spec.cell_time),
            ..opts.clone()
        };
        match parallel_ramsey_number(&cfg, &cell_opts) {
            Ok(t) => {
                let e = t.result.value as f64;
                r.exact = t.result.value.to_string();
                for (name, l) in &cell.lowers {
                    if e < *l {
                        violations.push(format!("exact below {name} lower bound"));
                    }
                }
                if cell.upper.is_some_and(|u| e > u) {
                    violations.push("exact above upper bound".into());
                }
                if cell.formula.is_some_and(|f| e != f) {
                    violations.push("exact differs from formula".into());
                }
                if cell.strict_lower.is_some_and(|b| e <= b) {
                    violations.push("exact not above vijay_beta_pow".into());
                }
            }
            Err(e) => match e.search_lower_bound() {
                Some(l) => flags.push(format!("incomplete (value >= {l})")),
                None => flags.push("incomplete".into()),
            },
        }
    }
    r.flags = flags.join("; ");
    if !violations.is_empty() {
        r.violation = violations.join("; ");
    }
    Ok(r)
}

/// Writes the table as CSV with LF line endings. An empty table is the
/// header alone.
pub fn write_csv(rows: &[TableRow], out: &mut dyn Write) -> LabResult<()> {
    let mut w = csv_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.cells())?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// `f64` helper for numeric table cells; `None` for `n/a` and text.
pub fn cell_value(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().or_else(|| {
        let (a, b) = cell.split_once('/')?;
        Some(a.parse::<num_bigint::BigInt>().ok()?.to_f64()? / b.parse::<num_bigint::BigInt>().ok()?.to_f64()?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(families: Vec<Family>, params: (usize, usize), k_range: (usize, usize), exact: bool) -> TableSpec {
        TableSpec {
            families,
            params,
            k_range,
            exact,
            max_n: 200,
            cell_time: Duration::from_secs(30),
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..6"), Ok((3, 6)));
        assert_eq!(parse_range("3..=6"), Ok((3, 6)));
        assert_eq!(parse_range("4"), Ok((4, 4)));
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn semi_rows_bracket() {
        let rows = emit_table(
            &spec(vec![Family::Semi], (2, 2), (3, 6), true),
            &SearchOptions {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| !r.has_violation()), "{rows:?}");
        assert_eq!(rows[0].exact, "9");
        assert_eq!(rows[0].upper, "9");
        assert_eq!(rows[1].upper, NA);
    }

    #[test]
    fn quasi_rows_have_both_bases() {
        let rows = emit_table(&spec(vec![Family::Quasi], (1, 1), (3, 5), false), &SearchOptions::default()).unwrap();
        for r in &rows {
            assert!(cell_value(&r.new_base_pow).unwrap() > cell_value(&r.vijay_beta_pow).unwrap());
        }
    }

    #[test]
    fn empty_range_is_header_only() {
        let rows = emit_table(&spec(vec![Family::Semi], (2, 2), (6, 3), false), &SearchOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), HEADER.join(",") + "\n");
    }
}
