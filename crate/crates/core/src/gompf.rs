//! Gompf-equivalence moves, chain checking and reduction toward `(1,1,2)`.
//!
//! Triples are related by similarity (`∼S`, equivalent ideals at one trace)
//! and by Gompf shifts `(c,d,n) ∼G (c,d,n+kd)`. A triple whose trace lies in
//! the [`SolvedTraceSet`] is equivalent to `(1,1,2)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cancel::{cancelled, CancelToken};
use crate::cstriple::{c_shift, dual, gompf_shift, is_valid_triple, CsTriple};
use crate::cubicorder::{ideal_from_triple, verify_witness, ClassData, ClassVerdict, Coords};
use crate::enumerate::candidates;
use crate::error::{Error, Result};
use crate::families::SolvedTraceSet;

/// A witness `λ = num/den` with `λ·J = I`, as stored in chain files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "crate::serde_int::vec")]
    pub num: Vec<BigInt>,
    #[serde(with = "crate::serde_int")]
    pub den: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move")]
pub enum Move {
    /// `(c, d, n) → (c, d, n + kd)`.
    #[serde(rename = "G")]
    GompfShift {
        #[serde(with = "crate::serde_int")]
        k: BigInt,
    },
    /// `(c, d, n) → (c + kd, d, n)`.
    #[serde(rename = "C")]
    CShift {
        #[serde(with = "crate::serde_int")]
        k: BigInt,
    },
    /// Equivalent ideal at the same trace.
    #[serde(rename = "S")]
    SimilarityJump {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<Witness>,
    },
    /// `(c, d, n) → (p_n(c), d, 5 − n)`.
    #[serde(rename = "D")]
    Dual,
}

impl Move {
    pub fn symbol(&self) -> &'static str {
        match self {
            Move::GompfShift { .. } => "G",
            Move::CShift { .. } => "C",
            Move::SimilarityJump { .. } => "S",
            Move::Dual => "D",
        }
    }
}

/// Unvalidated `[c, d, n]`, so that broken chains can still be loaded and
/// rejected step by step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawTriple(#[serde(with = "crate::serde_int::vec")] pub Vec<BigInt>);

impl RawTriple {
    pub fn validate(&self) -> Result<CsTriple> {
        match self.0.as_slice() {
            [c, d, n] => CsTriple::new(c.clone(), d.clone(), n.clone()),
            _ => Err(Error::Parse(format!("expected [c, d, n], got {} entries", self.0.len()))),
        }
    }
}

impl From<&CsTriple> for RawTriple {
    fn from(t: &CsTriple) -> Self {
        Self(vec![t.c().clone(), t.d().clone(), t.n().clone()])
    }
}

impl fmt::Display for RawTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    #[serde(flatten)]
    pub mv: Move,
    pub to: RawTriple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceChain {
    pub start: RawTriple,
    #[serde(default)]
    pub steps: Vec<ChainStep>,
}

impl EquivalenceChain {
    pub fn new(start: &CsTriple) -> Self {
        Self { start: start.into(), steps: Vec::new() }
    }

    pub fn push(&mut self, mv: Move, to: &CsTriple) {
        self.steps.push(ChainStep { mv, to: to.into() });
    }

    pub fn end(&self) -> &RawTriple {
        self.steps.last().map_or(&self.start, |s| &s.to)
    }
}

impl fmt::Display for EquivalenceChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for s in &self.steps {
            write!(f, " ~{} {}", s.mv.symbol(), s.to)?;
        }
        Ok(())
    }
}

/// Outcome of checking a chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub ok: bool,
    /// One entry per step that was checked; stops at the first failure.
    pub steps: Vec<StepReport>,
    /// Set when the start triple itself is invalid.
    pub start_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    /// 1-based step number.
    pub step: usize,
    pub ok: bool,
    /// The failure is an undecided equivalence, not a refutation.
    pub inconclusive: bool,
    pub detail: String,
}

impl ChainReport {
    pub fn first_failure(&self) -> Option<&StepReport> {
        self.steps.iter().find(|s| !s.ok)
    }

    pub fn is_inconclusive(&self) -> bool {
        self.first_failure().is_some_and(|s| s.inconclusive)
    }
}

fn same_raw(a: &CsTriple, c: &BigInt, d: &BigInt, n: &BigInt) -> bool {
    a.c() == c && a.d() == d && a.n() == n
}

const INCONCLUSIVE: &str = "equivalence undecided";

fn check_step(from: &CsTriple, step: &ChainStep, bound_cap: u64) -> std::result::Result<String, String> {
    let to = step.to.validate().map_err(|e| format!("target {} is not valid: {e}", step.to))?;
    match &step.mv {
        Move::GompfShift { k } => {
            if same_raw(&to, from.c(), from.d(), &(from.n() + k * from.d())) {
                Ok(format!("n {} + {}·{} = {}", from.n(), k, from.d(), to.n()))
            } else {
                Err(format!("shift by k = {k} does not reach {}", step.to))
            }
        }
        Move::CShift { k } => {
            if same_raw(&to, &(from.c() + k * from.d()), from.d(), from.n()) {
                Ok(format!("c {} + {}·{} = {}", from.c(), k, from.d(), to.c()))
            } else {
                Err(format!("c-shift by k = {k} does not reach {}", step.to))
            }
        }
        Move::Dual => {
            let expected = dual(from).map_err(|e| e.to_string())?;
            if expected == to {
                Ok(format!("dual is {expected}"))
            } else {
                Err(format!("dual is {expected}, not {}", step.to))
            }
        }
        Move::SimilarityJump { witness } => {
            if from.n() != to.n() {
                return Err(format!("similarity changes the trace {} → {}", from.n(), to.n()));
            }
            let i = ideal_from_triple(from);
            let j = ideal_from_triple(&to);
            if let Some(w) = witness {
                let num: Coords =
                    w.num.clone().try_into().map_err(|_| "witness needs three coordinates".to_string())?;
                return if verify_witness(&i, &j, &num, &w.den) {
                    Ok("stored witness verified".into())
                } else {
                    Err("stored witness does not map the ideals onto each other".into())
                };
            }
            match ClassData::new(i).compare_escalating(&ClassData::new(j), bound_cap) {
                Ok(ClassVerdict::Equivalent { .. }) => Ok("ideals are equivalent".into()),
                Ok(ClassVerdict::NotEquivalent(sep)) => Err(format!("ideals are not equivalent ({sep:?})")),
                Ok(ClassVerdict::Inconclusive { bound }) => Err(format!("{INCONCLUSIVE} at bound {bound}")),
                Err(e) => Err(e.to_string()),
            }
        }
    }
}

/// Re-checks every step of `chain` independently.
pub fn verify_chain(chain: &EquivalenceChain, bound_cap: u64) -> ChainReport {
    let mut from = match chain.start.validate() {
        Ok(t) => t,
        Err(e) => {
            return ChainReport { ok: false, steps: Vec::new(), start_error: Some(e.to_string()) };
        }
    };
    let mut steps = Vec::with_capacity(chain.steps.len());
    for (i, step) in chain.steps.iter().enumerate() {
        match check_step(&from, step, bound_cap) {
            Ok(detail) => steps.push(StepReport { step: i + 1, ok: true, inconclusive: false, detail }),
            Err(detail) => {
                let inconclusive = detail.starts_with(INCONCLUSIVE);
                steps.push(StepReport { step: i + 1, ok: false, inconclusive, detail });
                return ChainReport { ok: false, steps, start_error: None };
            }
        }
        from = step.to.validate().expect("checked above");
    }
    ChainReport { ok: true, steps, start_error: None }
}

/// Gompf shift of `t` to the largest solved trace `n₀ ≡ n (mod d)` with
/// `6 − n ≤ n₀ ≤ n − 1`.
pub fn descend_step(t: &CsTriple, solved: &SolvedTraceSet) -> Option<CsTriple> {
    let n = t.n().to_i64()?;
    let d = t.d().abs();
    let lo = BigInt::from(6 - n);
    let hi = BigInt::from(n - 1);
    let nb = BigInt::from(n);
    solved
        .iter()
        .rev()
        .map(BigInt::from)
        .filter(|n0| *n0 >= lo && *n0 <= hi && (&nb - n0).is_multiple_of(&d))
        .map(|n0| CsTriple::new(t.c().clone(), t.d().clone(), n0).expect("shift preserves validity"))
        .next()
}

/// Triples at the trace of `t` with `d ≤ d_max` and an equivalent ideal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EquivalentTriples {
    /// Sorted by `(d, c)`.
    pub equivalent: Vec<CsTriple>,
    pub inconclusive: Vec<CsTriple>,
}

pub fn find_equivalent_triples(t: &CsTriple, d_max: u64, bound_cap: u64) -> Result<EquivalentTriples> {
    let target = ClassData::new(ideal_from_triple(t));
    let mut out = EquivalentTriples::default();
    for u in candidates(t.n(), d_max) {
        match ClassData::new(ideal_from_triple(&u)).compare_escalating(&target, bound_cap)? {
            ClassVerdict::Equivalent { .. } => out.equivalent.push(u),
            ClassVerdict::Inconclusive { .. } => out.inconclusive.push(u),
            ClassVerdict::NotEquivalent(_) => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ReduceOptions {
    /// Maximum number of expanded nodes.
    pub budget: usize,
    pub bound_cap: u64,
    /// Largest `d` tried for similarity jumps.
    pub d_max: u64,
    pub cancel: Option<CancelToken>,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { budget: 64, bound_cap: crate::cubicorder::DEFAULT_BOUND_CAP, d_max: 260, cancel: None }
    }
}

/// Gompf shift from `t` to a solved trace: `(1,1,2)` when `d = 1`, else
/// the descend target, else the solved `n′ ≡ n (mod d)` nearest zero.
fn shift_to_solved(t: &CsTriple, solved: &SolvedTraceSet) -> Option<CsTriple> {
    if t.d().abs().is_one() {
        return Some(CsTriple::base(2));
    }
    descend_step(t, solved).or_else(|| {
        let w = solved.witness_mod(t.n(), &t.d().abs())?;
        Some(CsTriple::new(t.c().clone(), t.d().clone(), w).expect("shift preserves validity"))
    })
}

fn shift_k(from: &CsTriple, to: &CsTriple) -> BigInt {
    (to.n() - from.n()) / from.d()
}

/// Shifts of `t` to the representatives of `n mod d` nearest zero.
fn small_shifts(t: &CsTriple) -> Vec<CsTriple> {
    let d = t.d().abs();
    let r = t.n().mod_floor(&d);
    let mut out = Vec::new();
    for n in [r.clone(), r - &d] {
        if &n != t.n() && !n.is_zero() {
            out.push(gompf_shift(t, &((&n - t.n()) / t.d())));
        }
    }
    out
}

/// Best-first search for a chain from `t` to a triple with solved trace.
///
/// Nodes are expanded in order of depth, then `|n|`. Similarity jumps use
/// [`find_equivalent_triples`]; inconclusive comparisons are not edges.
/// `None` means the budget ran out, not that `t` is exotic.
pub fn reduce_to_base(t: &CsTriple, solved: &SolvedTraceSet, opts: &ReduceOptions) -> Result<Option<EquivalenceChain>> {
    let start = t.canonical();
    if solved.contains(start.n()) {
        return Ok(Some(EquivalenceChain::new(t)));
    }
    let mut parent: HashMap<CsTriple, (CsTriple, Move)> = HashMap::new();
    let mut seen: HashSet<CsTriple> = HashSet::from([start.clone()]);
    let mut frontier: VecDeque<CsTriple> = VecDeque::from([start.clone()]);
    let mut expanded = 0usize;

    let build = |end: &CsTriple, last: Option<(CsTriple, Move)>, parent: &HashMap<CsTriple, (CsTriple, Move)>| {
        let mut rev = Vec::new();
        if let Some((to, mv)) = last {
            rev.push((mv, to));
        }
        let mut cur = end.clone();
        while let Some((prev, mv)) = parent.get(&cur) {
            rev.push((mv.clone(), cur.clone()));
            cur = prev.clone();
        }
        let mut chain = EquivalenceChain::new(&start);
        for (mv, to) in rev.into_iter().rev() {
            chain.push(mv, &to);
        }
        chain
    };

    while let Some(u) = frontier.pop_front() {
        if expanded >= opts.budget || cancelled(opts.cancel.as_ref()) {
            break;
        }
        expanded += 1;
        if let Some(v) = shift_to_solved(&u, solved) {
            let mv = Move::GompfShift { k: shift_k(&u, &v) };
            return Ok(Some(build(&u, Some((v, mv)), &parent)));
        }
        let mut children: Vec<(CsTriple, Move)> = Vec::new();
        for v in small_shifts(&u) {
            let k = shift_k(&u, &v);
            children.push((v, Move::GompfShift { k }));
        }
        let du = dual(&u)?;
        children.push((du, Move::Dual));
        for v in find_equivalent_triples(&u, opts.d_max, opts.bound_cap)?.equivalent {
            if v != u {
                children.push((v, Move::SimilarityJump { witness: None }));
            }
        }
        children.sort_by(|a, b| a.0.n().abs().cmp(&b.0.n().abs()).then_with(|| a.0.cmp(&b.0)));
        for (v, mv) in children {
            if !seen.insert(v.clone()) {
                continue;
            }
            parent.insert(v.clone(), (u.clone(), mv));
            if solved.contains(v.n()) {
                return Ok(Some(build(&v, None, &parent)));
            }
            frontier.push_back(v);
        }
    }
    Ok(None)
}

/// Parses a chain file: a JSON array of chains, or a single chain.
pub fn parse_chains(text: &str) -> Result<Vec<EquivalenceChain>> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let chains = if v.is_array() { v } else { serde_json::Value::Array(vec![v]) };
    serde_json::from_value(chains).map_err(|e| Error::Parse(e.to_string()))
}

/// `[c, d, n]` forms a valid triple.
pub fn is_valid_raw(t: &RawTriple) -> bool {
    matches!(t.0.as_slice(), [c, d, n] if is_valid_triple(c, d, n))
}

/// The triple a move leads to; similarity jumps have no fixed target.
pub fn apply_move(t: &CsTriple, mv: &Move) -> Option<CsTriple> {
    match mv {
        Move::GompfShift { k } => Some(gompf_shift(t, k)),
        Move::CShift { k } => Some(c_shift(t, k)),
        Move::Dual => dual(t).ok(),
        Move::SimilarityJump { .. } => None,
    }
}
