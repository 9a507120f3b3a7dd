//! Minimal representatives of `C(Z[θₙ])` for one trace.
//!
//! Candidates `(c, d, n)` are scanned in the order `d = 1, 2, …` and
//! `c = 1..=d`; a candidate is kept when its ideal is provably not
//! equivalent to any class kept so far, so each kept triple is the minimal
//! representative of its class among the candidates scanned.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cancel::{cancelled, CancelToken};
use crate::cstriple::{trace_poly, CsTriple};
use crate::cubicorder::{ideal_from_triple, ClassData, ClassVerdict};
use crate::error::Result;
use crate::families::SolvedTraceSet;
use crate::gompf::descend_step;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepresentativeEntry {
    pub triple: CsTriple,
    /// The descend lemma does not reduce this triple.
    pub special: bool,
    /// Some comparison against an earlier class was inconclusive.
    pub inconclusive: bool,
    /// Annotation carried over from a reference table.
    pub uncertain: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentativeList {
    #[serde(with = "crate::serde_int")]
    pub trace: BigInt,
    pub d_bound: u64,
    pub entries: Vec<RepresentativeEntry>,
    /// `(candidate, kept class)` pairs the search could not decide.
    pub inconclusive_pairs: Vec<(CsTriple, CsTriple)>,
    /// Stopped early by a cancellation token.
    pub cancelled: bool,
}

impl RepresentativeList {
    pub fn triples(&self) -> Vec<CsTriple> {
        self.entries.iter().map(|e| e.triple.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One TSV line: `n, count, semicolon-joined triples, flags`.
    ///
    /// Flags are one character per entry: `.` plain, `s` special,
    /// `u` special and uncertain, `?` inconclusive.
    pub fn to_tsv_line(&self) -> String {
        let triples: Vec<String> = self.entries.iter().map(|e| e.triple.to_string()).collect();
        let flags: String = self
            .entries
            .iter()
            .map(|e| match (e.inconclusive, e.special, e.uncertain) {
                (true, _, _) => '?',
                (_, true, true) => 'u',
                (_, true, false) => 's',
                _ => '.',
            })
            .collect();
        format!("{}\t{}\t{}\t{}", self.trace, self.entries.len(), triples.join(";"), flags)
    }
}

/// All valid canonical triples `(c, d, n)` with `d ≤ d_max`, in minimal order.
pub fn candidates(n: &BigInt, d_max: u64) -> Vec<CsTriple> {
    let mut out = Vec::new();
    for d in 1..=d_max {
        let db = BigInt::from(d);
        for c in 1..=d {
            let cb = BigInt::from(c);
            if (trace_poly(n, &cb) % &db).is_zero() {
                out.push(CsTriple::new(cb, db.clone(), n.clone()).expect("divisibility checked"));
            }
        }
    }
    out
}

/// Enumerates minimal class representatives at trace `n` with `d ≤ d_max`.
///
/// `bound_cap` caps the witness-search escalation. Candidates whose
/// comparisons are inconclusive are kept and flagged, never merged.
pub fn minimal_representatives(
    n: &BigInt,
    d_max: u64,
    bound_cap: u64,
    cancel: Option<&CancelToken>,
) -> Result<RepresentativeList> {
    let mut kept: Vec<(CsTriple, ClassData)> = Vec::new();
    let mut entries = Vec::new();
    let mut inconclusive_pairs = Vec::new();
    let mut was_cancelled = false;
    'candidates: for t in candidates(n, d_max.max(1)) {
        if cancelled(cancel) {
            was_cancelled = true;
            break;
        }
        let data = ClassData::new(ideal_from_triple(&t));
        let mut open = Vec::new();
        for (kt, kd) in &kept {
            match data.compare_escalating(kd, bound_cap)? {
                ClassVerdict::Equivalent { .. } => continue 'candidates,
                ClassVerdict::NotEquivalent(_) => {}
                ClassVerdict::Inconclusive { .. } => open.push(kt.clone()),
            }
        }
        let inconclusive = !open.is_empty();
        inconclusive_pairs.extend(open.into_iter().map(|k| (t.clone(), k)));
        entries.push(RepresentativeEntry { triple: t.clone(), special: false, inconclusive, uncertain: false });
        kept.push((t, data));
    }
    Ok(RepresentativeList { trace: n.clone(), d_bound: d_max, entries, inconclusive_pairs, cancelled: was_cancelled })
}

/// Flags entries the descend lemma cannot reduce. `d = 1` is never special:
/// it shifts straight to `(1,1,2)`.
pub fn mark_special(mut list: RepresentativeList, solved: &SolvedTraceSet) -> RepresentativeList {
    for e in &mut list.entries {
        e.special = !e.triple.d().magnitude().is_one() && descend_step(&e.triple, solved).is_none();
    }
    list
}

/// One row of a reference table: `trace, count, representatives`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub trace: BigInt,
    pub count: usize,
    pub entries: Vec<RepresentativeEntry>,
}

/// Parses rows `n<TAB>count<TAB>triples`, triples separated by spaces and
/// marked `_(c,d,n)_` when special or `__(c,d,n)__` when also uncertain.
pub fn parse_table_fixture(text: &str) -> Result<Vec<TableRow>> {
    let bad = |msg: String| crate::error::Error::Parse(msg);
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let cols: Vec<&str> = line.split('\t').collect();
        let [trace, count, triples] = cols[..] else {
            return Err(bad(format!("expected three tab-separated columns: {line:?}")));
        };
        let trace: BigInt = trace.trim().parse().map_err(|e| bad(format!("{trace:?}: {e}")))?;
        let count: usize = count.trim().parse().map_err(|e| bad(format!("{count:?}: {e}")))?;
        let mut entries = Vec::new();
        for tok in triples.split_whitespace() {
            let marks = tok.len() - tok.trim_start_matches('_').len();
            let triple: CsTriple = tok.trim_matches('_').parse()?;
            entries.push(RepresentativeEntry {
                triple,
                special: marks >= 1,
                inconclusive: false,
                uncertain: marks >= 2,
            });
        }
        rows.push(TableRow { trace, count, entries });
    }
    Ok(rows)
}

/// Copies the `uncertain` annotation from a reference row onto matching entries.
pub fn annotate_uncertain(mut list: RepresentativeList, row: &TableRow) -> RepresentativeList {
    for e in &mut list.entries {
        e.uncertain = row.entries.iter().any(|r| r.uncertain && r.triple == e.triple);
    }
    list
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(c: i64, d: i64, n: i64) -> CsTriple {
        CsTriple::new(c, d, n).unwrap()
    }

    #[test]
    fn candidate_order() {
        let c = candidates(&70.into(), 5);
        assert_eq!(c, vec![t(1, 1, 70), t(2, 3, 70), t(2, 5, 70)]);
        assert!(candidates(&70.into(), 1).len() == 1);
    }

    #[test]
    fn trace_two_is_principal() {
        let l = minimal_representatives(&2.into(), 10, 4096, None).unwrap();
        assert_eq!(l.entries[0].triple, t(1, 1, 2));
        assert_eq!(l.len(), 1);
        assert!(l.inconclusive_pairs.is_empty());
    }

    #[test]
    fn trace_71_prefix() {
        let l = minimal_representatives(&71.into(), 20, 4096, None).unwrap();
        assert_eq!(l.triples()[..2], [t(1, 1, 71), t(10, 11, 71)]);
    }

    #[test]
    fn cancellation_stops_early() {
        let tok = CancelToken::new();
        tok.cancel();
        let l = minimal_representatives(&70.into(), 260, 4096, Some(&tok)).unwrap();
        assert!(l.cancelled && l.is_empty());
    }

    #[test]
    fn fixture_rows() {
        let rows = parse_table_fixture("# x\n74\t2\t(1,1,74) _(121,191,74)_ __(2,11,74)__\n").unwrap();
        assert_eq!(rows[0].count, 2);
        let e = &rows[0].entries;
        assert!(!e[0].special && e[1].special && !e[1].uncertain && e[2].uncertain);
        assert!(parse_table_fixture("74\t1").is_err());
    }

    #[test]
    fn special_flags() {
        let l = minimal_representatives(&74.into(), 200, 4096, None).unwrap();
        let l = mark_special(l, &SolvedTraceSet::default());
        let special: Vec<_> = l.entries.iter().filter(|e| e.special).map(|e| e.triple.clone()).collect();
        assert_eq!(special, vec![t(121, 191, 74)]);
        assert!(!l.entries[0].special);
    }
}
