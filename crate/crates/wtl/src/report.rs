//! Table assembly and report rendering.
//!
//! Builders turn library values into flat, ordered row lists; writers
//! render rows as CSV or JSON onto any output. Row order is fixed by the
//! builders and every map is sorted, so identical inputs produce
//! byte-identical reports regardless of scheduling.
//!
//! Formats:
//!
//! * pairing tables — CSV columns `alpha,p,beta,q,kind,value`. For a
//!   moduli point, `alpha`/`beta` are sector labels (`e`, `h0(k)`,
//!   `h1(k)`) and `p`/`q` descendent levels. For a superpotential,
//!   `alpha`/`beta` are coordinate families (`v0`, `v(k)`) and `p`/`q`
//!   flat slot indices. `kind` is `scalar` or `log`; a `log` row's value
//!   is the exact logarithm argument. A superpotential entry
//!   `scale·log(arg)` is folded exactly into `log(arg^scale)`, keeping
//!   one value column.
//! * stabilization reports — CSV columns
//!   `family,i,p,j,q,threshold_ok,deviation`; the JSON form adds the
//!   exact `lhs`/`rhs` entries.
//! * open reports — CSV columns
//!   `family,index,p,threshold_ok,max_coeff_dev,s_trunc_order`, preceded
//!   by a `#` comment line carrying the structural limitation notice
//!   ([`OPEN_SIGMA_LIMITATION`]).
//! * verification results — CSV columns
//!   `suite,invariant,cases,failures,first_failure`, or one summary line
//!   per invariant via [`summary_lines`].

use crate::coeff::Coeff;
use crate::even::{omega_even_h, EvenHurwitzData, EvenIndex};
use crate::hurwitz::{flat_directions, omega_h, HurwitzData, HurwitzOmega, StabRow};
use crate::open::{OpenStabRow, OPEN_SIGMA_LIMITATION};
use crate::verify::CheckResult;
use crate::whitham::{omega, OmegaValue, Sector, WhithamPoint};
use crate::{Error, Result};
use serde::Serialize;
use std::io::Write;
use std::str::FromStr;

/// Output encoding for a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Parse(format!(
                "unknown format '{other}': expected json or csv"
            ))),
        }
    }
}

/// One pairing-table entry.
#[derive(Clone, Debug, Serialize)]
pub struct OmegaRow {
    pub alpha: String,
    pub p: usize,
    pub beta: String,
    pub q: usize,
    pub kind: &'static str,
    pub value: String,
}

fn m_value_row<F: Coeff>(
    alpha: String,
    p: usize,
    beta: String,
    q: usize,
    v: &OmegaValue<F>,
) -> OmegaRow {
    let (kind, value) = match v {
        OmegaValue::Scalar(x) => ("scalar", x.repr()),
        OmegaValue::Log(arg) => ("log", arg.repr()),
    };
    OmegaRow {
        alpha,
        p,
        beta,
        q,
        kind,
        value,
    }
}

fn h_value_row<F: Coeff>(
    alpha: String,
    p: usize,
    beta: String,
    q: usize,
    v: &HurwitzOmega<F>,
) -> Result<OmegaRow> {
    let (kind, value) = match v {
        HurwitzOmega::Scalar(x) => ("scalar", x.repr()),
        // scale·log(arg) = log(arg^scale), exactly.
        HurwitzOmega::Log { scale, arg } => ("log", arg.pow_int(*scale)?.repr()),
    };
    Ok(OmegaRow {
        alpha,
        p,
        beta,
        q,
        kind,
        value,
    })
}

/// All descendent slots of a point up to the level caps: `e` and every
/// `h0(k)` at levels `0..=pmax`, every `h1(k)` at level 0.
pub fn point_slots(m: usize, pmax: usize) -> Vec<(Sector, usize)> {
    let mut slots: Vec<(Sector, usize)> = (0..=pmax).map(|p| (Sector::E, p)).collect();
    for k in 1..=m {
        for p in 0..=pmax {
            slots.push((Sector::H0(k), p));
        }
    }
    for k in 1..=m {
        slots.push((Sector::H1(k), 0));
    }
    slots
}

/// The full ordered pairing table of a point: one row per ordered slot
/// pair, first indices at levels `0..=pmax`, second at `0..=qmax`.
pub fn omega_table_m<F: Coeff>(
    pt: &WhithamPoint<F>,
    pmax: usize,
    qmax: usize,
) -> Result<Vec<OmegaRow>> {
    let mut rows = Vec::new();
    for (alpha, p) in point_slots(pt.m(), pmax) {
        for (beta, q) in point_slots(pt.m(), qmax) {
            let v = omega(pt, alpha, p, beta, q)?;
            rows.push(m_value_row(alpha.to_string(), p, beta.to_string(), q, &v));
        }
    }
    Ok(rows)
}

/// Column label of the coordinate family `i`: `v0` for the polynomial
/// coefficients, `v(i)` for the `i`-th pole block.
pub fn flat_label(i: usize) -> String {
    if i == 0 {
        "v0".to_string()
    } else {
        format!("v({i})")
    }
}

/// The full ordered table of prepotential second derivatives of a
/// superpotential, over all flat directions.
pub fn omega_table_h<F: Coeff>(data: &HurwitzData<F>) -> Result<Vec<OmegaRow>> {
    let dirs = flat_directions(data);
    let mut rows = Vec::with_capacity(dirs.len() * dirs.len());
    for &(i, j) in &dirs {
        for &(k, l) in &dirs {
            let v = omega_h(data, (i, j), (k, l))?;
            rows.push(h_value_row(flat_label(i), j, flat_label(k), l, &v)?);
        }
    }
    Ok(rows)
}

/// The reduced slots of an even superpotential: surviving odd slots at
/// infinity and the central pole, then each pair's difference slots.
fn even_slots<F: Coeff>(data: &EvenHurwitzData<F>) -> Vec<EvenIndex> {
    let mut slots = Vec::new();
    for j in (1..2 * data.n0_prime()).step_by(2) {
        slots.push(EvenIndex::Inf(j));
    }
    for j in (1..2 * data.n_prime(1)).step_by(2) {
        slots.push(EvenIndex::Central(j));
    }
    for k in 2..=data.m_prime() {
        for j in 0..=data.n_prime(k) {
            slots.push(EvenIndex::Pair(k, j));
        }
    }
    slots
}

/// The full ordered table of an even superpotential over the reduced
/// slots of its fixed locus. Levels are not meaningful here; the slot
/// index is carried in the label and the `p`/`q` columns are zero.
pub fn omega_table_even<F: Coeff>(data: &EvenHurwitzData<F>) -> Result<Vec<OmegaRow>> {
    let slots = even_slots(data);
    let mut rows = Vec::with_capacity(slots.len() * slots.len());
    for &a in &slots {
        for &b in &slots {
            let v = omega_even_h(data, a, b)?;
            rows.push(h_value_row(a.to_string(), 0, b.to_string(), 0, &v)?);
        }
    }
    Ok(rows)
}

/// JSON form of a stabilization row: the CSV columns plus the exact
/// table entries.
#[derive(Clone, Debug, Serialize)]
pub struct StabRowJson {
    pub family: &'static str,
    pub i: usize,
    pub p: usize,
    pub j: usize,
    pub q: usize,
    pub threshold_ok: bool,
    pub lhs: String,
    pub rhs: String,
    pub deviation: f64,
}

impl StabRowJson {
    pub fn of<F: Coeff>(row: &StabRow<F>) -> Self {
        StabRowJson {
            family: row.family,
            i: row.i,
            p: row.p,
            j: row.j,
            q: row.q,
            threshold_ok: row.threshold_ok,
            lhs: row.lhs.repr(),
            rhs: row.rhs.repr(),
            deviation: row.deviation,
        }
    }
}

/// Writes rows as JSON (a pretty-printed array, one trailing newline).
pub fn write_json<T: Serialize, W: Write>(mut w: W, rows: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Writes a pairing table as CSV.
pub fn write_omega_csv<W: Write>(w: W, rows: &[OmegaRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["alpha", "p", "beta", "q", "kind", "value"])?;
    for r in rows {
        out.write_record([
            r.alpha.as_str(),
            &r.p.to_string(),
            r.beta.as_str(),
            &r.q.to_string(),
            r.kind,
            r.value.as_str(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a stabilization report as CSV.
pub fn write_stab_csv<F: Coeff, W: Write>(w: W, rows: &[StabRow<F>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["family", "i", "p", "j", "q", "threshold_ok", "deviation"])?;
    for r in rows {
        out.write_record([
            r.family,
            &r.i.to_string(),
            &r.p.to_string(),
            &r.j.to_string(),
            &r.q.to_string(),
            &r.threshold_ok.to_string(),
            &r.deviation.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes an open report as CSV, preceded by the structural limitation
/// notice as a `#` comment line.
pub fn write_open_csv<W: Write>(mut w: W, rows: &[OpenStabRow]) -> Result<()> {
    writeln!(w, "# {OPEN_SIGMA_LIMITATION}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "family",
        "index",
        "p",
        "threshold_ok",
        "max_coeff_dev",
        "s_trunc_order",
    ])?;
    for r in rows {
        out.write_record([
            r.family,
            &r.i.to_string(),
            &r.p.to_string(),
            &r.threshold_ok.to_string(),
            &r.max_coeff_dev.to_string(),
            &r.s_trunc_order.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// JSON form of an open report row, under the same column names as the
/// CSV and carrying the limitation notice once at top level.
#[derive(Clone, Debug, Serialize)]
pub struct OpenReportJson {
    pub limitation: &'static str,
    pub rows: Vec<OpenRowJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpenRowJson {
    pub family: &'static str,
    pub index: usize,
    pub p: usize,
    pub threshold_ok: bool,
    pub max_coeff_dev: f64,
    pub s_trunc_order: i64,
}

impl OpenReportJson {
    pub fn of(rows: &[OpenStabRow]) -> Self {
        OpenReportJson {
            limitation: OPEN_SIGMA_LIMITATION,
            rows: rows
                .iter()
                .map(|r| OpenRowJson {
                    family: r.family,
                    index: r.i,
                    p: r.p,
                    threshold_ok: r.threshold_ok,
                    max_coeff_dev: r.max_coeff_dev,
                    s_trunc_order: r.s_trunc_order,
                })
                .collect(),
        }
    }
}

/// Writes verification results as CSV.
pub fn write_check_csv<W: Write>(w: W, results: &[CheckResult]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["suite", "invariant", "cases", "failures", "first_failure"])?;
    for r in results {
        out.write_record([
            r.suite,
            r.invariant,
            &r.cases.to_string(),
            &r.failures.to_string(),
            r.first_failure.as_deref().unwrap_or(""),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One human-readable summary line per invariant.
pub fn summary_lines(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        if r.passed() {
            out.push_str(&format!(
                "{}/{}: PASS ({} cases)\n",
                r.suite, r.invariant, r.cases
            ));
        } else {
            out.push_str(&format!(
                "{}/{}: FAIL ({} of {} cases) first failure: {}\n",
                r.suite,
                r.invariant,
                r.failures,
                r.cases,
                r.first_failure.as_deref().unwrap_or("(no dump)")
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Rat;
    use crate::even::EvenBlock;
    use crate::hurwitz::{stabilization_report, HurwitzPole};
    use crate::open::open_stabilization_report;
    use crate::whitham::{point_of_u, UCoords};

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn sample_point() -> WhithamPoint<Rat> {
        let mut u0 = vec![r(2), r(5), r(0), r(1)];
        u0.resize(12, r(0));
        let mut u1 = vec![r(3), r(4), r(1)];
        u1.resize(14, r(0));
        point_of_u(&UCoords { u0, u: vec![u1] }).unwrap()
    }

    fn sample_data() -> HurwitzData<Rat> {
        HurwitzData::new(
            2,
            vec![r(1)],
            vec![HurwitzPole {
                loc: r(2),
                coeffs: vec![r(5)],
                root: None,
            }],
        )
        .unwrap()
    }

    #[test]
    fn point_table_covers_all_ordered_slot_pairs() {
        let pt = sample_point();
        let rows = omega_table_m(&pt, 2, 2).unwrap();
        // Slots: e×3, h0(1)×3, h1(1)×1 — 7 of them, 49 ordered pairs.
        assert_eq!(rows.len(), 49);
        // The diagonal log entry: Ω_{h_{1,1},0;h_{1,1},0} = log u_{1,1}.
        let diag = rows
            .iter()
            .find(|r| r.alpha == "h1(1)" && r.beta == "h1(1)")
            .unwrap();
        assert_eq!(diag.kind, "log");
        assert_eq!(diag.value, "4");
        // Symmetry is visible in the emitted table.
        let ab = rows
            .iter()
            .find(|r| (r.alpha.as_str(), r.p, r.beta.as_str(), r.q) == ("e", 1, "h0(1)", 2))
            .unwrap();
        let ba = rows
            .iter()
            .find(|r| (r.alpha.as_str(), r.p, r.beta.as_str(), r.q) == ("h0(1)", 2, "e", 1))
            .unwrap();
        assert_eq!(ab.value, ba.value);
        assert_eq!(ab.kind, "scalar");
    }

    #[test]
    fn superpotential_table_folds_log_scales() {
        let data = sample_data();
        let rows = omega_table_h(&data).unwrap();
        // Directions: (0,1), (1,0), (1,1) — 9 ordered pairs.
        assert_eq!(rows.len(), 9);
        // The log diagonal (1,1)×(1,1): scale n₁² = 1, arg = a_{1,1} = 5.
        let diag = rows
            .iter()
            .find(|r| r.alpha == "v(1)" && r.p == 1 && r.beta == "v(1)" && r.q == 1)
            .unwrap();
        assert_eq!((diag.kind, diag.value.as_str()), ("log", "5"));
        for row in &rows {
            let t = rows
                .iter()
                .find(|s| {
                    (s.alpha.as_str(), s.p) == (row.beta.as_str(), row.q)
                        && (s.beta.as_str(), s.q) == (row.alpha.as_str(), row.p)
                })
                .unwrap();
            assert_eq!(t.kind, row.kind, "{row:?}");
        }
    }

    #[test]
    fn even_table_uses_reduced_slot_labels() {
        let data = EvenHurwitzData::new(
            1,
            vec![r(7)],
            vec![r(4)],
            Some(r(2)),
            vec![EvenBlock {
                loc2: r(9),
                coeffs: vec![r(3)],
                root: Some(r(3)),
                branch: None,
            }],
        )
        .unwrap();
        let rows = omega_table_even(&data).unwrap();
        // Slots: v0(1), v1(1), pair(2,0), pair(2,1) — 16 ordered pairs.
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().any(|r| r.alpha == "pair(2,1)"));
        assert!(rows.iter().all(|r| r.p == 0 && r.q == 0));
    }

    #[test]
    fn csv_emitters_match_the_column_contracts() {
        let pt = sample_point();
        let rows = omega_table_m(&pt, 1, 1).unwrap();
        let mut buf = Vec::new();
        write_omega_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("alpha,p,beta,q,kind,value\n"));
        assert_eq!(text.lines().count(), 1 + rows.len());

        let data = sample_data();
        let stab = stabilization_report(&data, 2, 2).unwrap();
        let mut buf = Vec::new();
        write_stab_csv(&mut buf, &stab).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,i,p,j,q,threshold_ok,deviation\n"));

        let open = open_stabilization_report(&data, 2).unwrap();
        let mut buf = Vec::new();
        write_open_csv(&mut buf, &open).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let first = lines.next().unwrap();
        assert!(first.starts_with("# "));
        assert!(first.contains("no s-family rows"));
        assert_eq!(
            lines.next().unwrap(),
            "family,index,p,threshold_ok,max_coeff_dev,s_trunc_order"
        );

        // JSON rendering is deterministic byte-for-byte.
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_json(&mut a, &OpenReportJson::of(&open)).unwrap();
        write_json(&mut b, &OpenReportJson::of(&open)).unwrap();
        assert_eq!(a, b);
        assert!(a.ends_with(b"\n"));
    }

    #[test]
    fn verification_summaries_are_one_line_per_invariant() {
        let results = vec![
            CheckResult {
                suite: "series",
                invariant: "ring-laws",
                cases: 10,
                failures: 0,
                first_failure: None,
            },
            CheckResult {
                suite: "series",
                invariant: "bogus",
                cases: 10,
                failures: 2,
                first_failure: Some("{\"case\":3}".into()),
            },
        ];
        let text = summary_lines(&results);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "series/ring-laws: PASS (10 cases)");
        assert!(lines[1].starts_with("series/bogus: FAIL (2 of 10 cases)"));

        let mut buf = Vec::new();
        write_check_csv(&mut buf, &results).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("suite,invariant,cases,failures,first_failure\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
