//! Labellings `ρ: ½Z → {a, a⁻¹, b, b⁻¹}` with `a`-letters at integers and
//! `b`-letters at half-integers.
//!
//! Positions are stored in half-units: the integer `h` stands for the point
//! `h/2`, so `a`-letters sit at even `h`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::plmap::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    A,
    B,
}

impl Letter {
    pub fn kind(self) -> Kind {
        match self {
            Letter::A | Letter::AInv => Kind::A,
            Letter::B | Letter::BInv => Kind::B,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Letter::A | Letter::B)
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::AInv => "a'",
            Letter::B => "b",
            Letter::BInv => "b'",
        }
    }

    pub fn parse(tok: &str) -> Result<Letter> {
        match tok {
            "a" => Ok(Letter::A),
            "a'" | "a⁻¹" => Ok(Letter::AInv),
            "b" => Ok(Letter::B),
            "b'" | "b⁻¹" => Ok(Letter::BInv),
            _ => Err(Error::Parse(format!("unknown letter {tok:?}"))),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

fn check_alternation(letters: &[Letter]) -> Result<()> {
    for i in 1..letters.len() {
        if letters[i].kind() == letters[i - 1].kind() {
            return Err(Error::Alternation {
                index: i,
                detail: format!("{} follows {}", letters[i], letters[i - 1]),
            });
        }
    }
    Ok(())
}

/// A finite alternating word; its first letter's kind fixes the parity of
/// the position it starts at.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LWord {
    letters: Vec<Letter>,
}

impl LWord {
    pub fn new(letters: Vec<Letter>) -> Result<LWord> {
        check_alternation(&letters)?;
        Ok(LWord { letters })
    }

    pub(crate) fn from_trusted(letters: Vec<Letter>) -> LWord {
        debug_assert!(check_alternation(&letters).is_ok());
        LWord { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// True when the word starts at an integer position (first letter is an
    /// `a`-letter).
    pub fn starts_integer(&self) -> bool {
        self.letters.first().map(|l| l.kind() == Kind::A).unwrap_or(true)
    }

    pub fn formal_inverse(&self) -> LWord {
        LWord { letters: inverse_letters(&self.letters) }
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        contains(&self.letters, w)
    }
}

pub fn inverse_letters(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

fn contains(hay: &[Letter], needle: &[Letter]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|win| win == needle)
}

impl fmt::Display for LWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(l.token())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<LWord> {
        let letters = s.split_whitespace().map(Letter::parse).collect::<Result<Vec<_>>>()?;
        LWord::new(letters)
    }
}

/// All factors of one length, each with the half-unit position of one
/// occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSet {
    k: usize,
    words: BTreeMap<Vec<Letter>, i64>,
}

impl FactorSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word_length(&self) -> usize {
        self.k
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.words.contains_key(w)
    }

    pub fn witness(&self, w: &[Letter]) -> Option<i64> {
        self.words.get(w).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Letter], i64)> {
        self.words.iter().map(|(w, h)| (w.as_slice(), *h))
    }

    pub fn same_words(&self, other: &FactorSet) -> bool {
        self.k == other.k && self.words.keys().eq(other.words.keys())
    }

    fn from_scan(k: usize, letters: &[Letter], base: i64) -> FactorSet {
        let mut words = BTreeMap::new();
        for (i, win) in letters.windows(k).enumerate() {
            words.entry(win.to_vec()).or_insert(base + i as i64);
        }
        FactorSet { k, words }
    }
}

pub trait Labelling: Send + Sync + fmt::Debug {
    /// Letter at the half-unit position `h` (the point `h/2`).
    fn letter_at(&self, h: i64) -> Letter;

    /// Period in letters (always even) when the labelling is periodic.
    fn period_letters(&self) -> Option<usize>;

    /// Every factor of length `k`, with a witness position each.
    fn factors(&self, k: usize) -> Result<Arc<FactorSet>>;

    fn describe(&self) -> String;

    fn as_recursive(&self) -> Option<&Recursive> {
        None
    }
}

/// Letters at half-unit positions `h0..=h1`.
pub fn letters_between(rho: &dyn Labelling, h0: i64, h1: i64) -> Vec<Letter> {
    (h0..=h1).map(|h| rho.letter_at(h)).collect()
}

/// `W(x, n)`: the `2n+1` letters centred at the half-integer `y` with
/// `x ∈ [y − ½, y + ½)`, i.e. `y = ⌊x⌋ + ½`.
pub fn word_at(rho: &dyn Labelling, x: &Dyadic, n: usize) -> LWord {
    let yh = 2 * x.floor_i64() + 1;
    LWord::from_trusted(letters_between(rho, yh - n as i64, yh + n as i64))
}

/// `W(I, n)`: letters from `inf I − n/2` through `sup I + n/2`.
pub fn word_on_interval(rho: &dyn Labelling, iv: &Interval, n: usize) -> Result<LWord> {
    let lo = half_units(iv.lo())?;
    let hi = half_units(iv.hi())?;
    Ok(LWord::from_trusted(letters_between(rho, lo - n as i64, hi + n as i64)))
}

/// `x` in half-units, when `x ∈ ½Z`.
pub fn half_units(x: &Dyadic) -> Result<i64> {
    if !x.is_half_integer_lattice() {
        return Err(Error::Domain(format!("{x} is not in ½Z")));
    }
    Ok(x.mul_pow2(1).floor_i64())
}

/// A periodic labelling: `σ(h) = word[(h − offset) mod |word|]`.
#[derive(Clone, Debug)]
pub struct Periodic {
    word: Vec<Letter>,
    offset: i64,
    cache: Arc<Mutex<HashMap<usize, Arc<FactorSet>>>>,
}

impl Periodic {
    /// Repeats `w` with its first letter at position 0.
    pub fn from_word(w: &LWord) -> Result<Periodic> {
        Periodic::with_offset(w, 0)
    }

    /// Repeats `w` with its first letter at the even half-unit position
    /// `offset`.
    pub fn with_offset(w: &LWord, offset: i64) -> Result<Periodic> {
        let letters = w.letters();
        if letters.is_empty() || letters.len() % 2 == 1 {
            return Err(Error::Precondition(format!(
                "a period needs an even, positive number of letters (got {})",
                letters.len()
            )));
        }
        if letters[0].kind() != Kind::A {
            return Err(Error::Alternation {
                index: 0,
                detail: "a period must start with an a-letter".into(),
            });
        }
        if offset.rem_euclid(2) != 0 {
            return Err(Error::Precondition("a period must start at an integer".into()));
        }
        check_alternation(letters)?;
        Ok(Periodic {
            word: letters.to_vec(),
            offset,
            cache: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    pub fn word(&self) -> LWord {
        LWord::from_trusted(self.word.clone())
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Period in real units.
    pub fn period_real(&self) -> i64 {
        self.word.len() as i64 / 2
    }

    /// Smallest even period (in letters).
    pub fn minimal_period_letters(&self) -> usize {
        let n = self.word.len();
        (2..=n)
            .step_by(2)
            .find(|d| n.is_multiple_of(*d) && (0..n).all(|i| self.word[i] == self.word[i % d]))
            .unwrap_or(n)
    }
}

impl PartialEq for Periodic {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word && self.offset == other.offset
    }
}

impl Eq for Periodic {}

impl Labelling for Periodic {
    fn letter_at(&self, h: i64) -> Letter {
        let n = self.word.len() as i64;
        self.word[(h - self.offset).rem_euclid(n) as usize]
    }

    fn period_letters(&self) -> Option<usize> {
        Some(self.word.len())
    }

    fn factors(&self, k: usize) -> Result<Arc<FactorSet>> {
        if k == 0 {
            return Err(Error::Precondition("factor length must be positive".into()));
        }
        let mut cache = self.cache.lock().expect("factor cache poisoned");
        if let Some(f) = cache.get(&k) {
            return Ok(f.clone());
        }
        let n = self.word.len() as i64;
        let letters = letters_between(self, self.offset, self.offset + n + k as i64 - 2);
        let mut words = BTreeMap::new();
        for (i, win) in letters.windows(k).enumerate().take(n as usize) {
            words.entry(win.to_vec()).or_insert(self.offset + i as i64);
        }
        let set = Arc::new(FactorSet { k, words });
        cache.insert(k, set.clone());
        Ok(set)
    }

    fn describe(&self) -> String {
        format!("periodic {}", self.word())
    }
}

const MAX_DEPTH: usize = 36;

/// The recursive quasi-periodic labelling built from
/// `W₀ = ab`, `W_{n+1} = W_n · p_a · W_n⁻¹ · p_b · W_n`.
///
/// `W_n` sits at half-unit position `start(n)`; for even `n` it is the
/// prefix copy inside `W_{n+1}`, for odd `n` the suffix copy, so the blocks
/// grow alternately to the right and to the left and cover all of `½Z`.
#[derive(Debug)]
pub struct Recursive {
    pads: (Letter, Letter),
    lengths: Vec<i64>,
    starts: Vec<i64>,
    words: Mutex<Vec<Arc<Vec<Letter>>>>,
    cache: Mutex<HashMap<usize, Arc<FactorSet>>>,
}

impl Recursive {
    pub fn new(pad_a: Letter, pad_b: Letter) -> Result<Recursive> {
        if pad_a.kind() != Kind::A || pad_b.kind() != Kind::B {
            return Err(Error::Precondition(format!(
                "pads must be an a-letter then a b-letter (got {pad_a} {pad_b})"
            )));
        }
        let mut lengths = vec![2i64];
        let mut starts = vec![0i64];
        for n in 0..MAX_DEPTH {
            let l = lengths[n];
            lengths.push(3 * l + 2);
            starts.push(if n % 2 == 0 { starts[n] } else { starts[n] - (2 * l + 2) });
        }
        Ok(Recursive {
            pads: (pad_a, pad_b),
            lengths,
            starts,
            words: Mutex::new(vec![Arc::new(vec![Letter::A, Letter::B])]),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn standard() -> Recursive {
        Recursive::new(Letter::A, Letter::B).expect("default pads are valid")
    }

    pub fn pads(&self) -> (Letter, Letter) {
        self.pads
    }

    /// `|W_n|` in letters.
    pub fn block_length(&self, n: usize) -> i64 {
        self.lengths[n]
    }

    /// Half-unit position of the first letter of `W_n`.
    pub fn block_start(&self, n: usize) -> i64 {
        self.starts[n]
    }

    /// `W_n`, materialized and cached.
    pub fn block(&self, n: usize) -> Arc<Vec<Letter>> {
        let mut words = self.words.lock().expect("word cache poisoned");
        while words.len() <= n {
            let prev = words.last().expect("W0 present").clone();
            let mut next = Vec::with_capacity(3 * prev.len() + 2);
            next.extend_from_slice(&prev);
            next.push(self.pads.0);
            next.extend(inverse_letters(&prev));
            next.push(self.pads.1);
            next.extend_from_slice(&prev);
            words.push(Arc::new(next));
        }
        words[n].clone()
    }

    fn letter_in_block(&self, mut n: usize, mut i: i64) -> Letter {
        let mut inverted = false;
        loop {
            if n == 0 {
                let l = if i == 0 { Letter::A } else { Letter::B };
                return if inverted { l.inverse() } else { l };
            }
            let l = self.lengths[n - 1];
            if i < l {
                n -= 1;
            } else if i == l {
                return if inverted { self.pads.0.inverse() } else { self.pads.0 };
            } else if i <= 2 * l {
                i = l - 1 - (i - l - 1);
                inverted = !inverted;
                n -= 1;
            } else if i == 2 * l + 1 {
                return if inverted { self.pads.1.inverse() } else { self.pads.1 };
            } else {
                i -= 2 * l + 2;
                n -= 1;
            }
        }
    }

    /// Least `m` with `|W_m| ≥ k`.
    pub fn depth_for(&self, k: usize) -> usize {
        (0..=MAX_DEPTH).find(|&m| self.lengths[m] >= k as i64).unwrap_or(MAX_DEPTH)
    }

    /// The block `W_{m₀+2}` (start position and letters), which carries every
    /// factor of length `k`.
    pub fn covering_block(&self, k: usize) -> (i64, Arc<Vec<Letter>>) {
        let m = self.depth_for(k) + 2;
        (self.starts[m], self.block(m))
    }
}

impl Labelling for Recursive {
    fn letter_at(&self, h: i64) -> Letter {
        let n = (0..=MAX_DEPTH)
            .find(|&n| h >= self.starts[n] && h < self.starts[n] + self.lengths[n])
            .expect("position within the supported range");
        self.letter_in_block(n, h - self.starts[n])
    }

    fn period_letters(&self) -> Option<usize> {
        None
    }

    fn factors(&self, k: usize) -> Result<Arc<FactorSet>> {
        if k == 0 {
            return Err(Error::Precondition("factor length must be positive".into()));
        }
        if let Some(f) = self.cache.lock().expect("factor cache poisoned").get(&k) {
            return Ok(f.clone());
        }
        let m = self.depth_for(k);
        if m + 3 > MAX_DEPTH {
            return Err(Error::Unsupported(format!("factor length {k} is too large")));
        }
        let set = FactorSet::from_scan(k, &self.block(m + 2), self.starts[m + 2]);
        let next = FactorSet::from_scan(k, &self.block(m + 3), self.starts[m + 3]);
        if !set.same_words(&next) {
            return Err(Error::Internal(format!(
                "factor sets of length {k} did not stabilize at depth {}",
                m + 2
            )));
        }
        let set = Arc::new(set);
        self.cache.lock().expect("factor cache poisoned").insert(k, set.clone());
        Ok(set)
    }

    fn describe(&self) -> String {
        format!("recursive pads {} {}", self.pads.0, self.pads.1)
    }

    fn as_recursive(&self) -> Option<&Recursive> {
        Some(self)
    }
}

/// `τ(α) = σ(−α)⁻¹`.
#[derive(Debug, Clone)]
pub struct Mirrored {
    inner: Arc<dyn Labelling>,
}

impl Mirrored {
    pub fn new(inner: Arc<dyn Labelling>) -> Mirrored {
        Mirrored { inner }
    }
}

impl Labelling for Mirrored {
    fn letter_at(&self, h: i64) -> Letter {
        self.inner.letter_at(-h).inverse()
    }

    fn period_letters(&self) -> Option<usize> {
        self.inner.period_letters()
    }

    fn factors(&self, k: usize) -> Result<Arc<FactorSet>> {
        let inner = self.inner.factors(k)?;
        let words = inner
            .iter()
            .map(|(w, h)| (inverse_letters(w), -(h + k as i64 - 1)))
            .collect();
        Ok(Arc::new(FactorSet { k, words }))
    }

    fn describe(&self) -> String {
        format!("mirror of {}", self.inner.describe())
    }
}

/// Periodic labelling with factor sets of length `≤ k` equal to those of
/// `rho`.
///
/// `X` is the block carrying `W_{m₀+2}` (which contains every length-`k`
/// factor). The first later position `ℓ` past `X` where the first `k` letters
/// of `X` recur is found, and the letters from the start of `X` up to `ℓ − ½`
/// are repeated. The factor sets are compared before returning.
pub fn periodic_approximation(rho: &Recursive, k: usize) -> Result<Periodic> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let (start, block) = rho.covering_block(k);
    let head: Vec<Letter> = block[..k].to_vec();
    let mut h = start + block.len() as i64;
    let limit = h + 50_000_000;
    let mut window: Vec<Letter> = letters_between(rho, h, h + k as i64 - 1);
    loop {
        if window == head {
            break;
        }
        if h > limit {
            return Err(Error::Budget(format!("no recurrence of the head of X within {limit}")));
        }
        window.remove(0);
        window.push(rho.letter_at(h + k as i64));
        h += 1;
    }
    let period = LWord::from_trusted(letters_between(rho, start, h - 1));
    let sigma = Periodic::with_offset(&period, start)?;
    for j in 1..=k {
        let a = rho.factors(j)?;
        let b = sigma.factors(j)?;
        if !a.same_words(&b) {
            return Err(Error::Internal(format!("factor sets of length {j} differ")));
        }
    }
    Ok(sigma)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomEntry {
    pub word: LWord,
    /// Least `n` such that every factor of length `n` contains `word`.
    pub recurrence: Option<usize>,
    pub inverse_present: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub k: usize,
    pub entries: Vec<AxiomEntry>,
}

impl AxiomReport {
    pub fn all_recurrent(&self) -> bool {
        self.entries.iter().all(|e| e.recurrence.is_some())
    }

    pub fn inverse_closed(&self) -> bool {
        self.entries.iter().all(|e| e.inverse_present)
    }
}

/// Recurrence bounds and inverse closure for every factor of length `≤ k`.
/// Window sizes are searched up to `max_window`.
pub fn axiom_report(rho: &dyn Labelling, k: usize, max_window: usize) -> Result<AxiomReport> {
    let mut entries = Vec::new();
    for j in 1..=k {
        let fs = rho.factors(j)?;
        for (w, _) in fs.iter() {
            entries.push(AxiomEntry {
                word: LWord::from_trusted(w.to_vec()),
                recurrence: None,
                inverse_present: fs.contains(&inverse_letters(w)),
            });
        }
    }
    let mut pending: Vec<usize> = (0..entries.len()).collect();
    let mut n = 1;
    while !pending.is_empty() && n <= max_window {
        let windows = rho.factors(n)?;
        pending.retain(|&i| {
            let w = entries[i].word.letters();
            if w.len() <= n && windows.iter().all(|(f, _)| contains(f, w)) {
                entries[i].recurrence = Some(n);
                false
            } else {
                true
            }
        });
        n += 1;
    }
    Ok(AxiomReport { k, entries })
}

/// Parses the labelling file format:
///
/// ```text
/// type: periodic
/// word: a b a' b'
/// ```
///
/// or `type: recursive` with `pads: a b` and optional `depth-hint: N`.
pub fn parse_labelling(text: &str) -> Result<Arc<dyn Labelling>> {
    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key: value`", lineno + 1)))?;
        fields.insert(key.trim().to_string(), (lineno + 1, value.trim().to_string()));
    }
    let kind = fields
        .get("type")
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Parse("missing `type:` line".into()))?;
    match kind {
        "periodic" => {
            let (_, word) = fields
                .get("word")
                .ok_or_else(|| Error::Parse("periodic labelling needs a `word:` line".into()))?;
            let letters = word.split_whitespace().map(Letter::parse).collect::<Result<Vec<_>>>()?;
            let w = LWord::new(letters)?;
            Ok(Arc::new(Periodic::from_word(&w)?))
        }
        "recursive" => {
            let (pa, pb) = match fields.get("pads") {
                Some((_, v)) => {
                    let toks: Vec<&str> = v.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(Error::Parse("`pads:` needs two letters".into()));
                    }
                    (Letter::parse(toks[0])?, Letter::parse(toks[1])?)
                }
                None => (Letter::A, Letter::B),
            };
            let rho = Recursive::new(pa, pb)?;
            if let Some((line, v)) = fields.get("depth-hint") {
                let d: usize = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {line}: bad depth-hint {v:?}")))?;
                rho.block(d.min(12));
            }
            Ok(Arc::new(rho))
        }
        other => Err(Error::Parse(format!("unknown labelling type {other:?}"))),
    }
}
