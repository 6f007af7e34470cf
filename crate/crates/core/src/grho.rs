//! The groups `G_ρ` generated by `ζ₁, ζ₂, ζ₃` (acting on the integer cells
//! `[n, n+1]`) and `χ₁, χ₂, χ₃` (acting on the half-integer cells
//! `[n−½, n+½]`), with each cell map a copy of `ν_i` or of its flip according
//! to the labelling.
//!
//! Elements are kept as products of lazily evaluated factors; every question
//! about an element is answered through exact finite restrictions.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::dyadic::{dy, Dyadic};
use crate::error::{Error, Result};
use crate::labelling::{inverse_letters, letters_between, Kind, Labelling, Letter};
use crate::plmap::{dyadic_transporter, Interval, Orientation, PLMap, Rational};
use crate::thompson;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `ζ`: integer cells `[n, n+1]`, governed by `ρ(n+½)`.
    Zeta,
    /// `χ`: half-integer cells `[n−½, n+½]`, governed by `ρ(n)`.
    Chi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenSymbol {
    pub family: Family,
    pub index: u8,
    pub inverted: bool,
}

impl GenSymbol {
    pub fn new(family: Family, index: u8, inverted: bool) -> GenSymbol {
        assert!((1..=3).contains(&index), "generator index must be 1, 2 or 3");
        GenSymbol { family, index, inverted }
    }

    /// The twelve symbols in enumeration order `z1 z1' z2 z2' z3 z3' x1 … x3'`.
    pub fn all() -> [GenSymbol; 12] {
        let mut out = [GenSymbol::new(Family::Zeta, 1, false); 12];
        let mut i = 0;
        for family in [Family::Zeta, Family::Chi] {
            for index in 1..=3 {
                for inverted in [false, true] {
                    out[i] = GenSymbol::new(family, index, inverted);
                    i += 1;
                }
            }
        }
        out
    }

    pub fn inverse(self) -> GenSymbol {
        GenSymbol { inverted: !self.inverted, ..self }
    }

    /// Position in [`GenSymbol::all`].
    pub fn ordinal(self) -> usize {
        let f = match self.family {
            Family::Zeta => 0,
            Family::Chi => 6,
        };
        f + 2 * (self.index as usize - 1) + self.inverted as usize
    }
}

impl fmt::Display for GenSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.family {
            Family::Zeta => 'z',
            Family::Chi => 'x',
        };
        write!(f, "{c}{}{}", self.index, if self.inverted { "'" } else { "" })
    }
}

impl FromStr for GenSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<GenSymbol> {
        let (body, inverted) = match s.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let mut chars = body.chars();
        let family = match chars.next() {
            Some('z') => Family::Zeta,
            Some('x') => Family::Chi,
            _ => return Err(Error::Parse(format!("bad generator {s:?}"))),
        };
        let index: u8 = chars
            .as_str()
            .parse()
            .ok()
            .filter(|i| (1..=3).contains(i))
            .ok_or_else(|| Error::Parse(format!("bad generator {s:?}")))?;
        Ok(GenSymbol::new(family, index, inverted))
    }
}

/// A freely reduced word in the standard generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    symbols: Vec<GenSymbol>,
}

impl GroupWord {
    pub fn new(symbols: impl IntoIterator<Item = GenSymbol>) -> GroupWord {
        let mut out: Vec<GenSymbol> = Vec::new();
        for s in symbols {
            if out.last() == Some(&s.inverse()) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        GroupWord { symbols: out }
    }

    pub fn empty() -> GroupWord {
        GroupWord::default()
    }

    pub fn symbols(&self) -> &[GenSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { symbols: self.symbols.iter().rev().map(|s| s.inverse()).collect() }
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        GroupWord::new(self.symbols.iter().chain(&other.symbols).copied())
    }

    pub fn commutator(a: &GroupWord, b: &GroupWord) -> GroupWord {
        a.inverse().concat(&b.inverse()).concat(a).concat(b)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<GroupWord> {
        let syms = s.split_whitespace().map(GenSymbol::from_str).collect::<Result<Vec<_>>>()?;
        Ok(GroupWord::new(syms))
    }
}

/// One lazily evaluated factor of an element.
pub trait Elementary: Send + Sync + fmt::Debug {
    /// A restriction of the factor whose domain contains `[lo, hi]`
    /// (`lo == hi` allowed). Self-map factors return a self-map of an
    /// interval.
    fn cover(&self, rho: &dyn Labelling, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap>;

    /// Same for the inverse factor.
    fn cover_inverse(&self, rho: &dyn Labelling, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
        Ok(self.cover(rho, lo, hi)?.invert())
    }

    /// The displacement on `[m, m+1]` depends only on letters within this
    /// distance of the cell.
    fn radius(&self) -> i64;

    fn label(&self) -> String;

    /// `(family, f)` when the factor is `λ(f)` or `π(f)`.
    fn as_cellwise(&self) -> Option<(Family, &PLMap)> {
        None
    }
}

/// Inclusive range of integer cells `[n, n+1]` meeting `[lo, hi]`.
pub fn integer_cells(lo: &Dyadic, hi: &Dyadic) -> (i64, i64) {
    let n0 = lo.floor_i64();
    let n1 = (hi.ceil_i64() - 1).max(n0);
    (n0, n1)
}

/// `λ(f)` (family `Zeta`) or `π(f)` (family `Chi`) for a self-map `f` of
/// `[0,1]`.
#[derive(Debug)]
pub struct Cellwise {
    family: Family,
    map: PLMap,
    flipped: PLMap,
    name: String,
}

impl Cellwise {
    pub fn new(family: Family, f: &PLMap, name: impl Into<String>) -> Result<Cellwise> {
        let unit = Interval::unit();
        if f.domain() != unit || f.range() != unit {
            return Err(Error::Precondition(format!(
                "embedded maps must be self-maps of [0, 1], got {} -> {}",
                f.domain(),
                f.range()
            )));
        }
        if !f.is_power2() {
            return Err(Error::Precondition("embedded maps need power-of-two slopes".into()));
        }
        Ok(Cellwise { family, map: f.clone(), flipped: f.flip_conjugate(&unit)?, name: name.into() })
    }

    /// Cell map on the cell with index `n`.
    pub fn cell_map(&self, rho: &dyn Labelling, n: i64) -> PLMap {
        let (h, shift) = match self.family {
            Family::Zeta => (2 * n + 1, Dyadic::from(n)),
            Family::Chi => (2 * n, &Dyadic::from(n) - &Dyadic::half()),
        };
        let base = if rho.letter_at(h).is_positive() { &self.map } else { &self.flipped };
        base.translate(&shift)
    }

    /// Inclusive range of cell indices meeting `[lo, hi]`.
    pub fn cells(&self, lo: &Dyadic, hi: &Dyadic) -> (i64, i64) {
        match self.family {
            Family::Zeta => integer_cells(lo, hi),
            Family::Chi => {
                let h = Dyadic::half();
                let n0 = (lo + &h).floor_i64();
                let n1 = (hi - &h).ceil_i64().max(n0);
                (n0, n1)
            }
        }
    }
}

impl Elementary for Cellwise {
    fn cover(&self, rho: &dyn Labelling, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
        let (n0, n1) = self.cells(lo, hi);
        let parts: Vec<PLMap> = (n0..=n1).map(|n| self.cell_map(rho, n)).collect();
        PLMap::concat(&parts)
    }

    fn radius(&self) -> i64 {
        1
    }

    fn label(&self) -> String {
        self.name.clone()
    }

    fn as_cellwise(&self) -> Option<(Family, &PLMap)> {
        Some((self.family, &self.map))
    }
}

/// The translation `x ↦ x + d`.
#[derive(Debug)]
pub struct Translation {
    d: Dyadic,
}

impl Elementary for Translation {
    fn cover(&self, _: &dyn Labelling, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
        let (a, b) = (Dyadic::from(lo.floor_i64()), Dyadic::from(hi.floor_i64() + 1));
        Ok(PLMap::translation(&Interval::new(a, b)?, &self.d))
    }

    fn cover_inverse(&self, _: &dyn Labelling, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
        let (a, b) = (Dyadic::from(lo.floor_i64()), Dyadic::from(hi.floor_i64() + 1));
        Ok(PLMap::translation(&Interval::new(a, b)?, &-&self.d))
    }

    fn radius(&self) -> i64 {
        self.d.abs().ceil_i64()
    }

    fn label(&self) -> String {
        format!("t({})", self.d)
    }
}

fn generator_table() -> &'static [Arc<dyn Elementary>; 6] {
    static T: OnceLock<[Arc<dyn Elementary>; 6]> = OnceLock::new();
    T.get_or_init(|| {
        let nus = thompson::h_generators();
        let mk = |fam: Family, i: usize, name: &str| -> Arc<dyn Elementary> {
            Arc::new(Cellwise::new(fam, nus[i], name).expect("nu_i are self-maps of [0,1]"))
        };
        [
            mk(Family::Zeta, 0, "z1"),
            mk(Family::Zeta, 1, "z2"),
            mk(Family::Zeta, 2, "z3"),
            mk(Family::Chi, 0, "x1"),
            mk(Family::Chi, 1, "x2"),
            mk(Family::Chi, 2, "x3"),
        ]
    })
}

fn generator_elementary(s: GenSymbol) -> Arc<dyn Elementary> {
    let base = match s.family {
        Family::Zeta => 0,
        Family::Chi => 3,
    };
    generator_table()[base + s.index as usize - 1].clone()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triviality {
    Trivial,
    /// A dyadic point the element moves.
    Nontrivial { witness: Dyadic },
}

impl Triviality {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Triviality::Trivial)
    }
}

/// An element of `G_ρ` (or of the ambient group of homeomorphisms commuting
/// with the labelling's structure) as a product of lazy factors, applied left
/// to right.
#[derive(Clone)]
pub struct LazyHomeo {
    rho: Arc<dyn Labelling>,
    factors: Vec<(Arc<dyn Elementary>, bool)>,
}

impl fmt::Debug for LazyHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LazyHomeo[{}]", self.describe())
    }
}

impl LazyHomeo {
    pub fn identity(rho: Arc<dyn Labelling>) -> LazyHomeo {
        LazyHomeo { rho, factors: Vec::new() }
    }

    pub fn from_elementary(rho: Arc<dyn Labelling>, e: Arc<dyn Elementary>) -> LazyHomeo {
        LazyHomeo { rho, factors: vec![(e, false)] }
    }

    pub fn generator(rho: Arc<dyn Labelling>, s: GenSymbol) -> LazyHomeo {
        LazyHomeo { rho, factors: vec![(generator_elementary(s), s.inverted)] }
    }

    pub fn from_word(rho: Arc<dyn Labelling>, w: &GroupWord) -> LazyHomeo {
        let factors = w.symbols().iter().map(|s| (generator_elementary(*s), s.inverted)).collect();
        LazyHomeo { rho, factors }
    }

    /// `λ(f)`: `f` on each `[n, n+1]`, flipped where `ρ(n+½) = b⁻¹`.
    pub fn lambda(rho: Arc<dyn Labelling>, f: &PLMap) -> Result<LazyHomeo> {
        let e = Cellwise::new(Family::Zeta, f, "lambda(f)")?;
        Ok(LazyHomeo::from_elementary(rho, Arc::new(e)))
    }

    /// `π(f)`: `f` on each `[n−½, n+½]`, flipped where `ρ(n) = a⁻¹`.
    pub fn pi(rho: Arc<dyn Labelling>, f: &PLMap) -> Result<LazyHomeo> {
        let e = Cellwise::new(Family::Chi, f, "pi(f)")?;
        Ok(LazyHomeo::from_elementary(rho, Arc::new(e)))
    }

    /// Translation by `d`; only offered over periodic labellings, where
    /// translation by a period lies in the group.
    pub fn translation(rho: Arc<dyn Labelling>, d: &Dyadic) -> Result<LazyHomeo> {
        if rho.period_letters().is_none() {
            return Err(Error::Unsupported("translations need a periodic labelling".into()));
        }
        Ok(LazyHomeo::from_elementary(rho, Arc::new(Translation { d: d.clone() })))
    }

    pub fn labelling(&self) -> &Arc<dyn Labelling> {
        &self.rho
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn describe(&self) -> String {
        if self.factors.is_empty() {
            return "e".into();
        }
        self.factors
            .iter()
            .map(|(e, inv)| format!("{}{}", e.label(), if *inv { "'" } else { "" }))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn same_labelling(&self, other: &LazyHomeo) {
        assert!(
            Arc::ptr_eq(&self.rho, &other.rho),
            "elements over different labellings cannot be multiplied"
        );
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &LazyHomeo) -> LazyHomeo {
        self.same_labelling(other);
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        LazyHomeo { rho: self.rho.clone(), factors }
    }

    pub fn inverse(&self) -> LazyHomeo {
        let factors = self.factors.iter().rev().map(|(e, inv)| (e.clone(), !inv)).collect();
        LazyHomeo { rho: self.rho.clone(), factors }
    }

    pub fn pow(&self, k: i64) -> LazyHomeo {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = LazyHomeo::identity(self.rho.clone());
        for _ in 0..k.unsigned_abs() {
            out = out.then(&base);
        }
        out
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &LazyHomeo, b: &LazyHomeo) -> LazyHomeo {
        a.inverse().then(&b.inverse()).then(a).then(b)
    }

    /// `b⁻¹ a b`.
    pub fn conjugate(a: &LazyHomeo, b: &LazyHomeo) -> LazyHomeo {
        b.inverse().then(a).then(b)
    }

    /// Locality radius: the displacement on `[m, m+1]` depends only on the
    /// letters in `[m − R, m + 1 + R]`.
    pub fn radius(&self) -> i64 {
        self.factors.iter().map(|(e, _)| e.radius()).sum()
    }

    fn factor_cover(&self, i: usize, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
        let (e, inv) = &self.factors[i];
        if *inv {
            e.cover_inverse(self.rho.as_ref(), lo, hi)
        } else {
            e.cover(self.rho.as_ref(), lo, hi)
        }
    }

    pub fn eval(&self, x: &Dyadic) -> Result<Dyadic> {
        let mut y = x.clone();
        for i in 0..self.factors.len() {
            y = self.factor_cover(i, &y, &y)?.evaluate(&y)?;
        }
        Ok(y)
    }

    /// Exact restriction to `w`: a map `w → w·h`.
    pub fn window_restrict(&self, w: &Interval) -> Result<PLMap> {
        let mut cur = PLMap::identity(w);
        for i in 0..self.factors.len() {
            let r = cur.range();
            let c = self.factor_cover(i, r.lo(), r.hi())?.restrict(&r)?;
            cur = cur.compose(&c)?;
        }
        Ok(cur)
    }

    /// Restriction to the integer cell `[m, m+1]`.
    pub fn cell_restrict(&self, m: i64) -> Result<PLMap> {
        self.window_restrict(&Interval::int(m, m + 1))
    }

    /// Decides whether the element is the identity.
    ///
    /// Periodic labellings: every factor commutes with translation by the
    /// period `p`, so the cells of `[0, p]` decide. Otherwise the cell
    /// `[m, m+1]` is decided by the letters in `[m − R, m + 1 + R]`, and one
    /// witness cell per factor class of those letter windows is checked.
    pub fn is_trivial(&self) -> Result<Triviality> {
        if self.factors.is_empty() {
            return Ok(Triviality::Trivial);
        }
        let cells: Vec<i64> = match self.rho.period_letters() {
            Some(p) => (0..(p as i64 / 2)).collect(),
            None => {
                let r = self.radius();
                let len = (4 * r + 3) as usize;
                let fs = self.rho.factors(len)?;
                fs.iter()
                    .filter(|(w, _)| w[0].kind() == Kind::A)
                    .map(|(_, h)| h / 2 + r)
                    .collect()
            }
        };
        for m in cells {
            let g = self.cell_restrict(m)?;
            if !g.is_identity() {
                let witness = g.moved_point().expect("non-identity map moves a breakpoint");
                return Ok(Triviality::Nontrivial { witness });
            }
        }
        Ok(Triviality::Trivial)
    }

    /// `(family, f)` with `self = λ(f)` or `π(f)` when every factor belongs to
    /// one family.
    pub fn h_preimage(&self) -> Option<(Family, PLMap)> {
        let mut family = None;
        let mut acc = PLMap::identity(&Interval::unit());
        for (e, inv) in &self.factors {
            let (fam, f) = e.as_cellwise()?;
            if family.is_some() && family != Some(fam) {
                return None;
            }
            family = Some(fam);
            let f = if *inv { f.invert() } else { f.clone() };
            acc = acc.compose(&f).ok()?;
        }
        family.map(|fam| (fam, acc))
    }

    /// Transition points of the element strictly inside `w`, computed from
    /// the restriction to `w` widened by one cell on each side.
    pub fn transition_points_window(&self, w: &Interval) -> Result<Vec<Rational>> {
        let wide = Interval::new(w.lo() - &Dyadic::one(), w.hi() + &Dyadic::one())?;
        let g = self.window_restrict(&wide)?;
        let (lo, hi) = (w.lo().to_rational(), w.hi().to_rational());
        Ok(g.transition_points().into_iter().filter(|p| p > &lo && p < &hi).collect())
    }
}

/// `ζ_i`/`χ_i` restricted to one of its cells: `[n, n+1]` for `ζ`,
/// `[n−½, n+½]` for `χ`.
pub fn generator_cell_map(rho: &dyn Labelling, g: GenSymbol, cell: &Interval) -> Result<PLMap> {
    if cell.length() != Dyadic::one() {
        return Err(Error::Domain(format!("{cell} is not a cell")));
    }
    let n = match g.family {
        Family::Zeta if cell.lo().is_integer() => cell.lo().floor_i64(),
        Family::Chi if !cell.lo().is_integer() && cell.lo().is_half_integer_lattice() => {
            cell.lo().floor_i64() + 1
        }
        _ => return Err(Error::Domain(format!("{cell} is not a cell of {g}"))),
    };
    let e = generator_elementary(g);
    let cw = e.as_cellwise().expect("generators are cellwise");
    let c = Cellwise::new(cw.0, cw.1, g.to_string())?;
    let m = c.cell_map(rho, n);
    Ok(if g.inverted { m.invert() } else { m })
}

fn check_compact_support(f: &PLMap) -> Result<()> {
    let unit = Interval::unit();
    if f.domain() != unit || f.range() != unit {
        return Err(Error::Precondition("expected a self-map of [0, 1]".into()));
    }
    let comps = f.support_components()?;
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if comps.first().map(|c| c.0 == zero).unwrap_or(false) || comps.last().map(|c| c.1 == one).unwrap_or(false) {
        return Err(Error::Precondition("map must be supported in a compact subset of (0, 1)".into()));
    }
    Ok(())
}

/// The element `g` that acts as the transported copy of `φ_I(f)` on every
/// integer interval `J` with `|J| = |I|` and `W(J,n) = W(I,n)`, as the
/// orientation-reversed copy where `W(J,n)⁻¹ = W(I,n)`, and trivially
/// elsewhere.
#[derive(Debug)]
pub struct Special {
    carrier: Interval,
    n: usize,
    length: i64,
    target: Vec<Letter>,
    target_inv: Vec<Letter>,
    phi: PLMap,
    f: PLMap,
}

impl Special {
    pub fn carrier(&self) -> &Interval {
        &self.carrier
    }

    pub fn context(&self) -> &[Letter] {
        &self.target
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn map(&self) -> &PLMap {
        &self.f
    }

    /// The locality constant `2|W(I, n)|`.
    pub fn locality_constant(&self) -> usize {
        2 * self.target.len()
    }

    /// Letters of `W(J, n)` for `J = [j, j+ℓ]`.
    fn context_at(&self, rho: &dyn Labelling, j: i64) -> Vec<Letter> {
        let n = self.n as i64;
        letters_between(rho, 2 * j - n, 2 * (j + self.length) + n)
    }

    /// `(j, reversed)` of the interval `J = [j, j+ℓ]` containing the cell
    /// `[m, m+1]` whose context matches, if any.
    pub fn match_for_cell(&self, rho: &dyn Labelling, m: i64) -> Option<(i64, bool)> {
        for j in (m - self.length + 1)..=m {
            let ctx = self.context_at(rho, j);
            if ctx == self.target {
                return Some((j, false));
            }
            if ctx == self.target_inv {
                return Some((j, true));
            }
        }
        None
    }

    fn transported(&self, j: i64, reversed: bool) -> PLMap {
        let target = self.carrier.translate(&Dyadic::from(j - self.carrier.lo().floor_i64()));
        let orient = if reversed { Orientation::Reversing } else { Orientation::Preserving };
        self.phi.isometry_conjugate(&target, orient).expect("same length")
    }

    fn cell(&self, rho: &dyn Labelling, m: i64) -> PLMap {
        let cell = Interval::int(m, m + 1);
        match self.match_for_cell(rho, m) {
            Some((j, rev)) => self.transported(j, rev).restrict(&cell).expect("cell inside J"),
            None => PLMap::identity(&cell),
        }
    }
}

impl Elementary for Special {
    fn cover(&self, rho: &dyn Labelling, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
        let (n0, n1) = integer_cells(lo, hi);
        let parts: Vec<PLMap> = (n0..=n1).map(|m| self.cell(rho, m)).collect();
        PLMap::concat(&parts)
    }

    fn radius(&self) -> i64 {
        2 * self.length + self.n as i64 + 1
    }

    fn label(&self) -> String {
        format!("special({}, {})", self.carrier, self.n)
    }
}

/// Builds the special element for `I` (integer endpoints), depth `n ≥ 1` and
/// `f` compactly supported in `(0,1)`.
///
/// Errors with [`Error::Ambiguous`] when two distinct matching intervals can
/// overlap somewhere in the labelling.
pub fn special_element(rho: Arc<dyn Labelling>, carrier: &Interval, n: usize, f: &PLMap) -> Result<LazyHomeo> {
    Ok(LazyHomeo::from_elementary(rho.clone(), Arc::new(special_parts(rho.as_ref(), carrier, n, f)?)))
}

pub fn special_parts(rho: &dyn Labelling, carrier: &Interval, n: usize, f: &PLMap) -> Result<Special> {
    if n == 0 {
        return Err(Error::Precondition("context depth n must be at least 1".into()));
    }
    if !carrier.lo().is_integer() || !carrier.hi().is_integer() {
        return Err(Error::Precondition(format!("{carrier} needs integer endpoints")));
    }
    check_compact_support(f)?;
    let length = carrier.length().floor_i64();
    let lo = carrier.lo().floor_i64();
    let ni = n as i64;
    let target = letters_between(rho, 2 * lo - ni, 2 * (lo + length) + ni);
    let target_inv = inverse_letters(&target);
    let s = Special {
        carrier: carrier.clone(),
        n,
        length,
        target,
        target_inv,
        phi: f.affine_conjugate(carrier)?,
        f: f.clone(),
    };
    // overlapping matches J, J + d with 0 < d < ℓ
    let ctx_len = s.target.len();
    for d in 1..length {
        let len = ctx_len + 2 * d as usize;
        let start_kind = if n.is_multiple_of(2) { Kind::A } else { Kind::B };
        for (w, h) in rho.factors(len)?.iter() {
            if w[0].kind() != start_kind {
                continue;
            }
            let a = &w[..ctx_len];
            let b = &w[2 * d as usize..];
            let hit = |x: &[Letter]| x == s.target.as_slice() || x == s.target_inv.as_slice();
            if hit(a) && hit(b) {
                return Err(Error::Ambiguous(format!(
                    "matching intervals overlap near position {}; raise n",
                    Dyadic::new(h, 1)
                )));
            }
        }
    }
    Ok(s)
}

/// `(λ(f), π(f))` for the fixed `f` with `Supp(f) = (1/16, 15/16)`,
/// `x·f > x` on the support and `(1/8)·f = 29/32 > 7/8`.
pub fn free_pair(rho: Arc<dyn Labelling>) -> Result<(LazyHomeo, LazyHomeo)> {
    let f = free_pair_map();
    Ok((LazyHomeo::lambda(rho.clone(), f)?, LazyHomeo::pi(rho, f)?))
}

pub fn free_pair_map() -> &'static PLMap {
    static F: OnceLock<PLMap> = OnceLock::new();
    F.get_or_init(|| {
        let iv = |a: Dyadic, b: Dyadic| Interval::new(a, b).unwrap();
        let f = PLMap::concat(&[
            PLMap::identity(&iv(dy(0, 0), dy(1, 4))),
            crate::plmap::dyadic_interval_map(&iv(dy(1, 4), dy(1, 3)), &iv(dy(1, 4), dy(29, 5))),
            crate::plmap::dyadic_interval_map(&iv(dy(1, 3), dy(15, 4)), &iv(dy(29, 5), dy(15, 4))),
            PLMap::identity(&iv(dy(15, 4), dy(1, 0))),
        ])
        .expect("pieces abut");
        assert_eq!(
            f.support_components().unwrap(),
            vec![(dy(1, 4).to_rational(), dy(15, 4).to_rational())],
            "free pair support"
        );
        for x in f.breakpoints() {
            if x > &dy(1, 4) && x < &dy(15, 4) {
                assert!(f.evaluate(x).unwrap() > *x, "free pair map moves right");
            }
        }
        assert!(f.evaluate(&dy(1, 3)).unwrap() > dy(7, 3));
        assert!(f.is_power2());
        f
    })
}

/// Certificate of the support bounds behind a commuting chain.
#[derive(Clone, Debug)]
pub struct ChainCertificate {
    pub eps: Rational,
    pub eps_prime: Dyadic,
    pub delta: Rational,
    pub delta_prime: Dyadic,
}

#[derive(Clone, Debug)]
pub struct CommutingChain {
    pub h1: LazyHomeo,
    pub h2: LazyHomeo,
    pub certificate: ChainCertificate,
}

/// Distance of the support of a self-map of `[0,1]` from `{0, 1}`.
fn support_margin(f: &PLMap) -> Result<Rational> {
    let comps = f.support_components()?;
    let (first, last) = match (comps.first(), comps.last()) {
        (Some(a), Some(b)) => (a.0.clone(), b.1.clone()),
        _ => return Err(Error::Precondition("the element is trivial".into())),
    };
    let margin = first.min(Rational::from_integer(1.into()) - last);
    if margin <= Rational::from_integer(0.into()) {
        return Err(Error::Precondition("support touches a cell endpoint".into()));
    }
    Ok(margin)
}

/// Largest power of two `≤ min(r, 1/8)`.
fn pow2_below(r: &Rational) -> Dyadic {
    let mut e = dy(1, 3);
    while e.to_rational() > *r {
        e = e.mul_pow2(-1);
    }
    e
}

/// A map of `[0,1]` supported in `(0, e) ∪ (1−e, 1)`: copies of `ν₂` on
/// `[e/4, e/2]` and, flipped, on `[1−e/2, 1−e/4]`.
fn edge_map(e: &Dyadic) -> PLMap {
    let a = Interval::new(e.mul_pow2(-2), e.mul_pow2(-1)).unwrap();
    let left = thompson::nu2().affine_conjugate(&a).unwrap();
    let b = Interval::new(&Dyadic::one() - &e.mul_pow2(-1), &Dyadic::one() - &e.mul_pow2(-2)).unwrap();
    let right = thompson::nu2().affine_conjugate(&b).unwrap().flip_conjugate(&b).unwrap();
    PLMap::concat(&[
        PLMap::identity(&Interval::new(Dyadic::zero(), a.lo().clone()).unwrap()),
        left,
        PLMap::identity(&Interval::new(a.hi().clone(), b.lo().clone()).unwrap()),
        right,
        PLMap::identity(&Interval::new(b.hi().clone(), Dyadic::one()).unwrap()),
    ])
    .unwrap()
}

/// Given `f = λ(f₀)` and `g = π(g₀)` with supports clear of the cell
/// endpoints, returns `h₁ = λ(·)` supported near the integers and
/// `h₂ = π(·)` supported near the half-integers with
/// `[f,h₁] = [h₁,h₂] = [h₂,g] = e`.
pub fn commuting_chain(f: &LazyHomeo, g: &LazyHomeo) -> Result<CommutingChain> {
    let (ff, f0) = f.h_preimage().ok_or_else(|| Error::Precondition("f is not a λ-image".into()))?;
    let (fg, g0) = g.h_preimage().ok_or_else(|| Error::Precondition("g is not a π-image".into()))?;
    if ff != Family::Zeta || fg != Family::Chi {
        return Err(Error::Precondition("need f in the ζ-family and g in the χ-family".into()));
    }
    let eps = support_margin(&f0)?;
    let delta = support_margin(&g0)?;
    let eps_prime = pow2_below(&eps);
    let delta_prime = pow2_below(&delta);
    let rho = f.labelling().clone();
    let h1 = LazyHomeo::lambda(rho.clone(), &edge_map(&eps_prime))?;
    let h2 = LazyHomeo::pi(rho, &edge_map(&delta_prime))?;
    for (name, c) in [
        ("[f, h1]", LazyHomeo::commutator(f, &h1)),
        ("[h1, h2]", LazyHomeo::commutator(&h1, &h2)),
        ("[h2, g]", LazyHomeo::commutator(&h2, g)),
    ] {
        if !c.is_trivial()?.is_trivial() {
            return Err(Error::Internal(format!("commutator {name} is not trivial")));
        }
    }
    Ok(CommutingChain { h1, h2, certificate: ChainCertificate { eps, eps_prime, delta, delta_prime } })
}

/// Finds `g` with `r·g = 0`: a short generator word `w` with `r·w ∈ (0, ½)`
/// (beam search, at most `max_len` letters), followed by `π` of a transporter
/// moving `r·w` to 0 inside `[−½, ½]`.
pub fn map_dyadic_to_zero(rho: Arc<dyn Labelling>, r: &Dyadic, max_len: usize) -> Result<(LazyHomeo, GroupWord)> {
    if r.is_zero() {
        return Ok((LazyHomeo::identity(rho), GroupWord::empty()));
    }
    let half = Dyadic::half();
    let inside = |x: &Dyadic| x.is_positive() && x < &half;
    let quarter = dy(1, 2);
    let mut frontier: Vec<(Dyadic, GroupWord)> = vec![(r.clone(), GroupWord::empty())];
    let mut seen: HashSet<Dyadic> = HashSet::from([r.clone()]);
    let mut found = if inside(r) { Some(frontier[0].clone()) } else { None };
    let mut depth = 0;
    while found.is_none() && depth < max_len && !frontier.is_empty() {
        depth += 1;
        let mut next: BTreeMap<(Dyadic, GroupWord), ()> = BTreeMap::new();
        'outer: for (x, w) in &frontier {
            for s in GenSymbol::all() {
                if w.symbols().last() == Some(&s.inverse()) {
                    continue;
                }
                let y = LazyHomeo::generator(rho.clone(), s).eval(x)?;
                if !seen.insert(y.clone()) {
                    continue;
                }
                let w2 = w.concat(&GroupWord::new([s]));
                if inside(&y) {
                    found = Some((y, w2));
                    break 'outer;
                }
                next.insert((y, w2), ());
            }
        }
        let mut cand: Vec<(Dyadic, GroupWord)> = next.into_keys().collect();
        cand.sort_by(|a, b| (&a.0 - &quarter).abs().cmp(&(&b.0 - &quarter).abs()).then_with(|| a.cmp(b)));
        cand.truncate(256);
        frontier = cand;
    }
    let (y, w) = found.ok_or_else(|| {
        Error::Budget(format!("no word of length <= {max_len} moves {r} into (0, 1/2)"))
    })?;
    // cell coordinates of [−½, ½]: t = x + ½
    let t = &y + &half;
    let mut f0 = dyadic_transporter(&t, &half, &Interval::unit())?;
    if !rho.letter_at(0).is_positive() {
        f0 = f0.flip_conjugate(&Interval::unit())?;
    }
    let g = LazyHomeo::from_word(rho.clone(), &w).then(&LazyHomeo::pi(rho, &f0)?);
    let check = g.eval(r)?;
    if !check.is_zero() {
        return Err(Error::Internal(format!("transport ended at {check}, not 0")));
    }
    Ok((g, w))
}

/// Anything that can be restricted to integer cells; lets the window check
/// run on perturbed maps.
pub trait WindowMap {
    fn cell_map(&self, m: i64) -> Result<PLMap>;
}

impl WindowMap for LazyHomeo {
    fn cell_map(&self, m: i64) -> Result<PLMap> {
        self.cell_restrict(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// Equal contexts, translated displacements.
    Direct,
    /// Inverse contexts, flipped displacements.
    Flipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrhoFailure {
    pub clause: Clause,
    pub cell_x: i64,
    pub cell_y: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrhoReport {
    pub k: usize,
    pub cells: usize,
    pub pairs_checked: usize,
    pub failures: Vec<KrhoFailure>,
}

impl KrhoReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `x ↦ s − (s − x)·h`: the map conjugated by the point reflection about
/// `s/2`.
pub fn reflect_map(h: &PLMap, s: &Dyadic) -> PLMap {
    let xs: Vec<Dyadic> = h.breakpoints().iter().rev().map(|x| s - x).collect();
    let ys: Vec<Dyadic> = h.values().iter().rev().map(|y| s - y).collect();
    PLMap::from_points(xs, ys).expect("reflection of an increasing map is increasing")
}

/// Checks both clauses of the locality condition with constant `k` on every
/// pair of integer cells of `w`.
///
/// `W(x, k)` is constant on each cell `[m, m+1)`, so the clauses compare whole
/// cell restrictions: equal contexts need translated copies, inverse
/// contexts need copies related by `y' = n₁ + n₂ + 1 − x`.
pub fn krho_window_check(rho: &dyn Labelling, h: &dyn WindowMap, k: usize, w: &Interval) -> Result<KrhoReport> {
    let lo = w.lo().ceil_i64();
    let hi = w.hi().floor_i64();
    let mut groups: BTreeMap<Vec<Letter>, Vec<(i64, PLMap)>> = BTreeMap::new();
    for m in lo..hi {
        let ctx = letters_between(rho, 2 * m + 1 - k as i64, 2 * m + 1 + k as i64);
        groups.entry(ctx).or_default().push((m, h.cell_map(m)?));
    }
    let mut failures = Vec::new();
    let mut pairs = 0usize;
    for (ctx, cells) in &groups {
        let (m0, g0) = &cells[0];
        for (m, g) in &cells[1..] {
            pairs += 1;
            if g.shift(&Dyadic::from(m0 - m), &Dyadic::from(m0 - m)) != *g0 {
                failures.push(KrhoFailure { clause: Clause::Direct, cell_x: *m0, cell_y: *m });
            }
        }
        let inv = inverse_letters(ctx);
        if inv > *ctx {
            if let Some(others) = groups.get(&inv) {
                let (m1, g1) = &others[0];
                pairs += 1;
                let s = Dyadic::from(m0 + m1 + 1);
                if reflect_map(g1, &s) != *g0 {
                    failures.push(KrhoFailure { clause: Clause::Flipped, cell_x: *m0, cell_y: *m1 });
                }
            }
        }
    }
    Ok(KrhoReport { k, cells: (hi - lo).max(0) as usize, pairs_checked: pairs, failures })
}
