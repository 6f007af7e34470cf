//! Atoms, decorated atoms and cellular decompositions of stable elements.
//!
//! An integer `m` is *fixed* for `h` when `h` is the identity on a
//! neighbourhood of `m`. Atoms are the closed integer intervals between
//! consecutive fixed integers on which `h` is not the identity.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::grho::{Elementary, LazyHomeo};
use crate::labelling::{inverse_letters, letters_between, LWord, Labelling, Letter};
use crate::plmap::{Interval, PLMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub carrier: Interval,
    pub restriction: PLMap,
    /// Cut by the window: the true atom may extend beyond it.
    pub partial: bool,
}

impl Atom {
    pub fn lo(&self) -> i64 {
        self.carrier.lo().floor_i64()
    }

    pub fn hi(&self) -> i64 {
        self.carrier.hi().floor_i64()
    }

    pub fn length(&self) -> i64 {
        self.hi() - self.lo()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedAtom {
    pub atom: Atom,
    pub n: usize,
    pub context: Vec<Letter>,
}

/// `W([m₁, m₂], n)`: letters from `m₁ − (n−1)/2` through `m₂ + (n−1)/2`.
pub fn atom_context(rho: &dyn Labelling, m1: i64, m2: i64, n: usize) -> Vec<Letter> {
    let r = n as i64 - 1;
    letters_between(rho, 2 * m1 - r, 2 * m2 + r)
}

pub fn decorate(rho: &dyn Labelling, atom: Atom, n: usize) -> DecoratedAtom {
    let context = atom_context(rho, atom.lo(), atom.hi(), n);
    DecoratedAtom { atom, n, context }
}

/// Canonical class key: the lesser of (restriction at the origin, context)
/// and its flip (flipped restriction, inverse context).
pub type ClassKey = (Vec<Dyadic>, Vec<Dyadic>, Vec<Letter>);

fn key_of(restriction: &PLMap, lo: i64, context: &[Letter]) -> ClassKey {
    let at0 = restriction.translate(&Dyadic::from(-lo));
    let flipped = at0.flip_conjugate(&at0.domain()).expect("atoms are self-maps");
    let a = (at0.breakpoints().to_vec(), at0.values().to_vec(), context.to_vec());
    let b = (flipped.breakpoints().to_vec(), flipped.values().to_vec(), inverse_letters(context));
    a.min(b)
}

impl DecoratedAtom {
    pub fn class_key(&self) -> ClassKey {
        key_of(&self.atom.restriction, self.atom.lo(), &self.context)
    }
}

/// Whether `h` fixes a neighbourhood of the integer `m`.
pub fn fixes_integer(h: &LazyHomeo, m: i64) -> Result<bool> {
    let g = h.window_restrict(&Interval::int(m - 1, m + 1))?;
    Ok(g.fixes_neighbourhood(&Dyadic::from(m)))
}

/// Atoms of `h` meeting the window `w` (integer endpoints). Atoms whose
/// extent cannot be decided inside `w` are returned with `partial` set.
pub fn atoms_in_window(h: &LazyHomeo, w: &Interval) -> Result<Vec<Atom>> {
    let (a, b) = integer_window(w)?;
    let g = h.window_restrict(&Interval::int(a - 1, b + 1))?;
    let fixed: Vec<i64> = (a..=b).filter(|m| g.fixes_neighbourhood(&Dyadic::from(*m))).collect();
    let mut atoms = Vec::new();
    let mut push = |lo: i64, hi: i64, partial: bool| -> Result<()> {
        let r = g.restrict(&Interval::int(lo, hi))?;
        if !r.is_identity() {
            atoms.push(Atom { carrier: Interval::int(lo, hi), restriction: r, partial });
        }
        Ok(())
    };
    match (fixed.first(), fixed.last()) {
        (None, _) | (_, None) => push(a, b, true)?,
        (Some(&first), Some(&last)) => {
            if first > a {
                push(a, first, true)?;
            }
            for pair in fixed.windows(2) {
                push(pair[0], pair[1], false)?;
            }
            if last < b {
                push(last, b, true)?;
            }
        }
    }
    Ok(atoms)
}

fn integer_window(w: &Interval) -> Result<(i64, i64)> {
    if !w.lo().is_integer() || !w.hi().is_integer() {
        return Err(Error::Precondition(format!("window {w} needs integer endpoints")));
    }
    Ok((w.lo().floor_i64(), w.hi().floor_i64()))
}

/// Partition of decorated atoms into equivalence classes, as index lists in
/// order of first appearance.
pub fn classify(atoms: &[DecoratedAtom]) -> Vec<Vec<usize>> {
    let mut order: Vec<ClassKey> = Vec::new();
    let mut classes: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
    for (i, a) in atoms.iter().enumerate() {
        let k = a.class_key();
        if !classes.contains_key(&k) {
            order.push(k.clone());
        }
        classes.entry(k).or_default().push(i);
    }
    order.into_iter().map(|k| classes.remove(&k).unwrap()).collect()
}

/// The part of `base` on the atoms of one class; identity elsewhere.
#[derive(Debug)]
pub struct ClassPiece {
    base: LazyHomeo,
    n: usize,
    key: ClassKey,
    max_len: i64,
    scan_limit: i64,
}

impl ClassPiece {
    fn fixed(&self, m: i64) -> Result<bool> {
        fixes_integer(&self.base, m)
    }

    fn scan(&self, from: i64, step: i64) -> Result<i64> {
        let mut m = from;
        for _ in 0..self.scan_limit {
            if self.fixed(m)? {
                return Ok(m);
            }
            m += step;
        }
        Err(Error::Unsupported(format!(
            "no fixed integer within {} cells of {from}; the element is not stable here",
            self.scan_limit
        )))
    }
}

impl Elementary for ClassPiece {
    fn cover(&self, rho: &dyn Labelling, lo: &Dyadic, hi: &Dyadic) -> Result<PLMap> {
        let a = self.scan(lo.floor_i64(), -1)?;
        let b = self.scan(hi.ceil_i64().max(a + 1), 1)?;
        let g = self.base.window_restrict(&Interval::int(a, b))?;
        let mut parts = Vec::new();
        let mut start = a;
        for m in (a + 1)..=b {
            if m < b && !g.fixes_neighbourhood(&Dyadic::from(m)) {
                continue;
            }
            let r = g.restrict(&Interval::int(start, m))?;
            let member = !r.is_identity() && key_of(&r, start, &atom_context(rho, start, m, self.n)) == self.key;
            parts.push(if member { r } else { PLMap::identity(&Interval::int(start, m)) });
            start = m;
        }
        PLMap::concat(&parts)
    }

    fn radius(&self) -> i64 {
        self.base.radius() + 2 * self.max_len + self.n as i64 + 1
    }

    fn label(&self) -> String {
        format!("piece({})", self.base.describe())
    }
}

#[derive(Clone, Debug)]
pub struct CellularPiece {
    pub piece: LazyHomeo,
    /// Indices into the decorated atoms of the window.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CellularDecomposition {
    pub n: usize,
    pub atoms: Vec<DecoratedAtom>,
    pub pieces: Vec<CellularPiece>,
}

/// One piece per class of the decorated atoms of `h` in `w`, at depth `n`.
pub fn cellular_decomposition(h: &LazyHomeo, n: usize, w: &Interval) -> Result<CellularDecomposition> {
    let atoms = atoms_in_window(h, w)?;
    if let Some(p) = atoms.iter().find(|a| a.partial) {
        return Err(Error::PartialAtoms(format!("atom cut by the window at {}", p.carrier)));
    }
    let rho = h.labelling().clone();
    let max_len = atoms.iter().map(|a| a.length()).max().unwrap_or(0);
    let (wa, wb) = integer_window(w)?;
    let scan_limit = (wb - wa).max(1) + 1;
    let decorated: Vec<DecoratedAtom> = atoms.into_iter().map(|a| decorate(rho.as_ref(), a, n)).collect();
    let pieces = classify(&decorated)
        .into_iter()
        .map(|members| {
            let key = decorated[members[0]].class_key();
            let e = ClassPiece { base: h.clone(), n, key, max_len, scan_limit };
            CellularPiece { piece: LazyHomeo::from_elementary(rho.clone(), Arc::new(e)), members }
        })
        .collect();
    Ok(CellularDecomposition { n, atoms: decorated, pieces })
}

#[derive(Clone, Debug)]
pub enum Stability {
    Stable {
        /// Real period of the labelling.
        period: i64,
        /// Atoms with left endpoint in one period, starting at a fixed integer.
        atoms: Vec<DecoratedAtom>,
        classes: Vec<Vec<usize>>,
    },
    /// No integer of a period is fixed: the support runs across the whole
    /// window.
    Unstable { run: Interval },
}

impl Stability {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable { .. })
    }
}

/// Exact stability over a periodic labelling: one period decides, because
/// every element commutes with translation by the period.
pub fn periodic_stability(h: &LazyHomeo, n: usize) -> Result<Stability> {
    let rho = h.labelling().clone();
    let p = match rho.period_letters() {
        Some(p) => p as i64 / 2,
        None => return Err(Error::Precondition("periodic_stability needs a periodic labelling".into())),
    };
    let g = h.window_restrict(&Interval::int(-1, p + 1))?;
    let first_fixed = (0..p).find(|m| g.fixes_neighbourhood(&Dyadic::from(*m)));
    let m0 = match first_fixed {
        Some(m) => m,
        None => return Ok(Stability::Unstable { run: Interval::int(0, p) }),
    };
    let atoms = atoms_in_window(h, &Interval::int(m0, m0 + p))?;
    debug_assert!(atoms.iter().all(|a| !a.partial));
    let atoms: Vec<DecoratedAtom> = atoms.into_iter().map(|a| decorate(rho.as_ref(), a, n)).collect();
    let classes = classify(&atoms);
    Ok(Stability::Stable { period: p, atoms, classes })
}

/// `l_f = k_h + l` with `l` the largest atom length in the window.
pub fn l_f_constant(h: &LazyHomeo, k_h: usize, w: &Interval) -> Result<usize> {
    let atoms = atoms_in_window(h, w)?;
    if let Some(p) = atoms.iter().find(|a| a.partial) {
        return Err(Error::PartialAtoms(format!("atom cut by the window at {}", p.carrier)));
    }
    Ok(k_h + atoms.iter().map(|a| a.length() as usize).max().unwrap_or(0))
}

/// CSV rows `carrier_lo,carrier_hi,class,context`.
pub fn atoms_csv(atoms: &[DecoratedAtom]) -> String {
    let classes = classify(atoms);
    let mut class_of = vec![0usize; atoms.len()];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }
    let mut out = String::from("carrier_lo,carrier_hi,class,context\n");
    for (i, a) in atoms.iter().enumerate() {
        let ctx = LWord::new(a.context.clone()).map(|w| w.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", a.atom.lo(), a.atom.hi(), class_of[i], ctx);
    }
    out
}
