//! Grid sweeps: one row per cell with exact values, matching bounds and
//! whether each bound holds. Cells run in parallel; rows come out in grid
//! order, so the emitted tables are identical across runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{parse_function_spec, BooleanFunction};
use crate::error::{Error, Result};
use crate::extremal::{epsilon, nc_scan, Method};
use crate::moments::{and_upper_bound, closed_m2, closed_m3, deviation_bound, small_p_exact, DeviationKind};
use crate::rational::{approx, fmt_rational, uint, Enclosure, Rational};

/// An epsilon sweep over functions, strengths and marginals. Cells with
/// `k > n` are skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub functions: Vec<String>,
    pub ks: Vec<usize>,
    pub ps: Vec<Rational>,
    pub method: Method,
}

/// A bound evaluated next to a cell's values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    /// `a/b`, or `[lo,hi]` for a certified enclosure.
    pub value: String,
    pub holds: bool,
}

impl BoundCheck {
    fn exact(name: &str, value: &Rational, holds: bool) -> Self {
        BoundCheck { name: name.into(), value: fmt_rational(value), holds }
    }

    /// `x <= bound`, judged against the low end of the enclosure.
    fn at_most(name: &str, x: &Rational, bound: &Enclosure) -> Self {
        let value = if bound.is_exact() {
            fmt_rational(&bound.lo)
        } else {
            format!("[{},{}]", fmt_rational(&bound.lo), fmt_rational(&bound.hi))
        };
        BoundCheck { name: name.into(), value, holds: *x <= bound.lo }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub function: String,
    pub n: usize,
    pub k: usize,
    pub p: String,
    pub method: String,
    pub max: String,
    pub min: String,
    pub epsilon: String,
    /// Decimal approximation of `epsilon`, for reading only.
    pub epsilon_approx: String,
    pub checks: Vec<BoundCheck>,
}

impl EpsilonRow {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NcSweepRow {
    pub k: usize,
    pub p: String,
    pub n_c: usize,
    pub lower_bound: usize,
    pub lower_holds: bool,
    pub hankel_consistent: bool,
}

fn family_param(name: &str, family: &str, key: &str) -> Option<usize> {
    let rest = name.strip_prefix(family)?.strip_prefix(':')?;
    rest.split(',').find_map(|kv| {
        let (k, v) = kv.split_once('=')?;
        (k == key).then(|| v.parse().ok()).flatten()
    })
}

fn checks(f: &BooleanFunction, k: usize, p: &Rational, max: &Rational, eps: &Rational) -> Result<Vec<BoundCheck>> {
    let name = f.name().unwrap_or("");
    let n = f.n();
    let half = Rational::new(1.into(), 2.into());
    let mut out = Vec::new();
    if name.starts_with("and:") {
        if k % 2 == 0 {
            let bound = and_upper_bound(n, k, p)?;
            out.push(BoundCheck::exact("and_upper_bound", &bound.main, *max <= bound.main));
        }
        if k == 2 && n >= 2 {
            let c = closed_m2(n, p)?;
            out.push(BoundCheck::exact("closed_m2", &c, *max == c));
        }
        if k == 3 && n >= 3 {
            let c = closed_m3(n, p)?;
            out.push(BoundCheck::exact("closed_m3", &c, *max == c));
        }
        if n >= 2 && *p <= uint(n - 1).recip() {
            let c = small_p_exact(n, k, p)?;
            out.push(BoundCheck::exact("small_p_exact", &c, *max == c));
        }
    }
    if name.starts_with("maj:") && *p == half && k % 2 == 0 && k >= 2 {
        let bound = deviation_bound(DeviationKind::Majority, k)?;
        out.push(BoundCheck::at_most("maj_eps_half", &(eps / uint(2)), &bound));
    }
    if let Some(w) = family_param(name, "tribes", "w") {
        let j = k / w;
        if *p == half && k % w == 0 && j % 2 == 0 && j >= 2 {
            let bound = deviation_bound(DeviationKind::Tribes, j)?;
            out.push(BoundCheck::at_most("tribes_eps_upper", eps, &bound));
        }
    }
    Ok(out)
}

fn first_error<T>(cells: Vec<Result<T>>, ids: impl Fn(usize) -> String) -> Result<Vec<T>> {
    cells
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::Cell { cell: ids(i), source: Box::new(e) }))
        .collect()
}

/// Runs every `(function, k, p)` cell; any failing cell aborts the sweep
/// with its id.
pub fn epsilon_sweep(spec: &SweepSpec) -> Result<Vec<EpsilonRow>> {
    let functions = spec
        .functions
        .iter()
        .map(|s| parse_function_spec(s).map(|f| (s.clone(), f)))
        .collect::<Result<Vec<_>>>()?;
    let mut cells = Vec::new();
    for (label, f) in &functions {
        for &k in &spec.ks {
            if k == 0 || k > f.n() {
                continue;
            }
            for p in &spec.ps {
                cells.push((label, f, k, p));
            }
        }
    }
    let results: Vec<Result<EpsilonRow>> = cells
        .par_iter()
        .map(|&(label, f, k, p)| {
            let e = epsilon(f, k, p, spec.method)?;
            Ok(EpsilonRow {
                function: label.clone(),
                n: f.n(),
                k,
                p: fmt_rational(p),
                method: e.max.method.to_string(),
                max: fmt_rational(&e.max.value),
                min: fmt_rational(&e.min.value),
                epsilon_approx: format!("~{:.6}", approx(&e.epsilon)),
                checks: checks(f, k, p, &e.max.value, &e.epsilon)?,
                epsilon: fmt_rational(&e.epsilon),
            })
        })
        .collect();
    first_error(results, |i| {
        let (label, _, k, p) = cells[i];
        format!("{label} k={k} p={}", fmt_rational(p))
    })
}

/// `n_c(k, p)` for every pair, scanning up to `max_n`.
pub fn nc_sweep(ks: &[usize], ps: &[Rational], max_n: Option<usize>) -> Result<Vec<NcSweepRow>> {
    let cells: Vec<(usize, &Rational)> = ks.iter().flat_map(|&k| ps.iter().map(move |p| (k, p))).collect();
    let results: Vec<Result<NcSweepRow>> = cells
        .par_iter()
        .map(|&(k, p)| {
            let scan = nc_scan(k, p, max_n)?;
            Ok(NcSweepRow {
                k,
                p: fmt_rational(p),
                n_c: scan.n_c,
                lower_bound: scan.lower_bound.ceiling,
                lower_holds: scan.n_c >= scan.lower_bound.ceiling,
                hankel_consistent: scan.hankel_consistent(),
            })
        })
        .collect();
    first_error(results, |i| format!("k={} p={}", cells[i].0, fmt_rational(cells[i].1)))
}

/// Pretty JSON array with a trailing newline.
pub fn to_json<T: Serialize>(rows: &[T]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)? + "\n")
}

/// CSV with a header row.
pub trait CsvRow {
    fn header() -> Vec<&'static str>;
    fn fields(&self) -> Vec<String>;
}

impl CsvRow for EpsilonRow {
    fn header() -> Vec<&'static str> {
        vec!["function", "n", "k", "p", "method", "max", "min", "epsilon", "epsilon_approx", "checks", "all_hold"]
    }

    fn fields(&self) -> Vec<String> {
        let checks: Vec<String> = self.checks.iter().map(|c| format!("{}={}:{}", c.name, c.value, c.holds)).collect();
        vec![
            self.function.clone(),
            self.n.to_string(),
            self.k.to_string(),
            self.p.clone(),
            self.method.clone(),
            self.max.clone(),
            self.min.clone(),
            self.epsilon.clone(),
            self.epsilon_approx.clone(),
            checks.join(";"),
            self.all_hold().to_string(),
        ]
    }
}

impl CsvRow for NcSweepRow {
    fn header() -> Vec<&'static str> {
        vec!["k", "p", "n_c", "lower_bound", "lower_holds", "hankel_consistent"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.p.clone(),
            self.n_c.to_string(),
            self.lower_bound.to_string(),
            self.lower_holds.to_string(),
            self.hankel_consistent.to_string(),
        ]
    }
}

pub fn to_csv<T: CsvRow>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(T::header()).map_err(io)?;
    for row in rows {
        w.write_record(row.fields()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn majority_and_and_sweeps() {
        let spec = SweepSpec {
            functions: vec!["maj:n=3".into(), "maj:n=5".into(), "maj:n=7".into()],
            ks: vec![2, 4, 6],
            ps: vec![rat(1, 2)],
            method: Method::Auto,
        };
        let rows = epsilon_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1 + 2 + 3);
        assert!(rows.iter().all(|r| r.all_hold() && !r.checks.is_empty()));
        let and = SweepSpec {
            functions: vec!["and:n=3".into(), "and:n=4".into()],
            ks: vec![3, 4],
            ps: vec![rat(1, 3), rat(1, 2)],
            method: Method::Auto,
        };
        let rows = epsilon_sweep(&and).unwrap();
        assert!(rows.iter().filter(|r| r.k == r.n).all(|r| r.epsilon == "0"));
        assert!(rows.iter().all(EpsilonRow::all_hold));
        let again = epsilon_sweep(&and).unwrap();
        assert_eq!(to_csv(&rows).unwrap(), to_csv(&again).unwrap());
        assert_eq!(to_json(&rows).unwrap(), to_json(&again).unwrap());
    }

    #[test]
    fn critical_size_sweep() {
        let rows = nc_sweep(&[2, 3, 4], &[rat(1, 2)], Some(30)).unwrap();
        assert!(rows.iter().all(|r| r.n_c == r.k + 1 && r.lower_holds));
        let csv = to_csv(&rows).unwrap();
        assert!(csv.starts_with("k,p,n_c,"));
    }

    #[test]
    fn failing_cell_is_named() {
        let spec = SweepSpec { functions: vec!["and:n=3".into()], ks: vec![2], ps: vec![rat(3, 2)], method: Method::Full };
        let err = epsilon_sweep(&spec).unwrap_err();
        assert!(err.to_string().contains("and:n=3 k=2 p=3/2"));
    }
}
