//! The space of marked groups: the distance `2^(−ν)` between the marked
//! groups of two labellings, convergence of periodic approximations, and the
//! circle quotient of a periodic group.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::grho::{GenSymbol, GroupWord, LazyHomeo};
use crate::labelling::{periodic_approximation, Labelling, Recursive};
use crate::plmap::{Interval, Rational};
use crate::thompson::{self, CircleMap, RotationNumber};

/// A labelling's group with its standard six-generator marking.
#[derive(Clone, Debug)]
pub struct MarkedGroup {
    labelling: Arc<dyn Labelling>,
}

impl MarkedGroup {
    pub fn new(labelling: Arc<dyn Labelling>) -> MarkedGroup {
        MarkedGroup { labelling }
    }

    pub fn labelling(&self) -> &Arc<dyn Labelling> {
        &self.labelling
    }

    pub fn is_trivial(&self, w: &GroupWord) -> Result<bool> {
        Ok(LazyHomeo::from_word(self.labelling.clone(), w).is_trivial()?.is_trivial())
    }
}

/// Number of freely reduced words of length `len` over the twelve symbols.
pub fn reduced_word_count(len: usize) -> u64 {
    if len == 0 {
        1
    } else {
        12 * 11u64.pow(len as u32 - 1)
    }
}

/// All freely reduced words of length `len`, in lexicographic order of
/// [`GenSymbol::all`].
pub fn reduced_words(len: usize) -> Vec<GroupWord> {
    let syms = GenSymbol::all();
    let mut out = vec![Vec::<GenSymbol>::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 11);
        for w in &out {
            for s in syms {
                if w.last() == Some(&s.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(GroupWord::new).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NuBound {
    /// `ν` is exactly `nu`: `witness` (of length `nu + 1`) is trivial in
    /// exactly one of the two groups.
    Exact { nu: usize, #[serde(serialize_with = "ser_display")] witness: GroupWord },
    /// All words up to length `k_max` agree.
    AtLeast { k_max: usize },
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl NuBound {
    pub fn lower_bound(&self) -> usize {
        match self {
            NuBound::Exact { nu, .. } => *nu,
            NuBound::AtLeast { k_max } => *k_max,
        }
    }

    pub fn witness(&self) -> Option<&GroupWord> {
        match self {
            NuBound::Exact { witness, .. } => Some(witness),
            NuBound::AtLeast { .. } => None,
        }
    }
}

/// Compares triviality of all reduced words of length `1..=k_max`; the first
/// disagreement (in enumeration order) fixes `ν`.
pub fn nu_bound(a: &MarkedGroup, b: &MarkedGroup, k_max: usize) -> Result<NuBound> {
    if k_max == 0 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    for len in 1..=k_max {
        let words = reduced_words(len);
        let hit = words
            .par_iter()
            .map(|w| -> Result<bool> { Ok(a.is_trivial(w)? != b.is_trivial(w)?) })
            .position_first(|r| !matches!(r, Ok(false)));
        if let Some(i) = hit {
            // re-run the hit to surface an error rather than a witness
            if a.is_trivial(&words[i])? == b.is_trivial(&words[i])? {
                return Err(Error::Internal("nondeterministic triviality".into()));
            }
            return Ok(NuBound::Exact { nu: len - 1, witness: words[i].clone() });
        }
    }
    Ok(NuBound::AtLeast { k_max })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Factor length matched by the approximation, `4n`.
    pub k: usize,
    pub period_letters: usize,
    pub nu: NuBound,
    pub wall_time_ms: u128,
}

impl ConvergenceRow {
    pub fn passes(&self) -> bool {
        self.nu.lower_bound() >= self.n
    }
}

/// For `n = 1..=n_max`: `ρ_n = periodic_approximation(ρ, 4n)` and a bound on
/// `ν(ρ_n, ρ)` from all words of length `≤ n`.
pub fn convergence_table(rho: Arc<Recursive>, n_max: usize) -> Result<Vec<ConvergenceRow>> {
    let target = MarkedGroup::new(rho.clone());
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let start = Instant::now();
        let approx = periodic_approximation(&rho, 4 * n)?;
        let period_letters = approx.period_letters().expect("periodic");
        let m = MarkedGroup::new(Arc::new(approx));
        let nu = nu_bound(&m, &target, n)?;
        rows.push(ConvergenceRow { n, k: 4 * n, period_letters, nu, wall_time_ms: start.elapsed().as_millis() });
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,k,period_letters,nu_lower_bound,witness_word,wall_time_ms\n");
    for r in rows {
        let wit = r.nu.witness().map(|w| w.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{},{}", r.n, r.k, r.period_letters, r.nu.lower_bound(), wit, r.wall_time_ms);
    }
    out
}

pub fn convergence_json(rows: &[ConvergenceRow]) -> String {
    let v: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "n": r.n,
                "k": r.k,
                "period_letters": r.period_letters,
                "nu_lower_bound": r.nu.lower_bound(),
                "nu_exact": matches!(r.nu, NuBound::Exact { .. }),
                "witness_word": r.nu.witness().map(|w| w.to_string()).unwrap_or_default(),
                "wall_time_ms": r.wall_time_ms,
            })
        })
        .collect();
    serde_json::to_string_pretty(&v).expect("plain values serialize")
}

/// Real period `p` of a periodic labelling.
pub fn real_period(rho: &dyn Labelling) -> Result<i64> {
    rho.period_letters()
        .map(|p| p as i64 / 2)
        .ok_or_else(|| Error::Precondition("a periodic labelling is required".into()))
}

/// The image of `h` in the homeomorphisms of the circle `R/pZ`.
///
/// Checks `(x + p)·h = x·h + p` on `[0, 2p]` before reducing.
pub fn quotient_circle(h: &LazyHomeo) -> Result<CircleMap> {
    let p = real_period(h.labelling().as_ref())?;
    let g = h.window_restrict(&Interval::int(0, 2 * p))?;
    let first = g.restrict(&Interval::int(0, p))?;
    let second = g.restrict(&Interval::int(p, 2 * p))?;
    let pd = Dyadic::from(p);
    if second.shift(&-&pd, &-&pd) != first {
        return Err(Error::Internal("element does not commute with the period translation".into()));
    }
    CircleMap::from_lift(first, p)
}

/// `0·h = c + k p` with `0 ≤ c < p`: returns `k`.
fn lift_shift(h: &LazyHomeo, p: i64) -> Result<i64> {
    Ok(h.eval(&Dyadic::zero())?.floor_i64().div_euclid(p))
}

/// Translation number `lim (0·hⁿ)/n` of `h` on the line.
pub fn translation_number(h: &LazyHomeo, max_q: u32, n_iter: u32) -> Result<RotationNumber> {
    let p = real_period(h.labelling().as_ref())?;
    let circle = quotient_circle(h)?;
    let k = Rational::from_integer((lift_shift(h, p)? * p).into());
    Ok(match thompson::lift_translation_number(&circle, max_q, n_iter) {
        RotationNumber::Exact { value, q, witness } => RotationNumber::Exact { value: value + k, q, witness },
        RotationNumber::Bounds { lo, hi } => RotationNumber::Bounds { lo: lo + &k, hi: hi + k },
    })
}
