//! Seeded random elements for experiments and property suites.

use rand::Rng;

use crate::grho::{GenSymbol, GroupWord};
use crate::plmap::{Interval, PLMap};
use crate::thompson;

/// A freely reduced word of exactly `len` symbols.
pub fn group_word<R: Rng>(rng: &mut R, len: usize) -> GroupWord {
    let all = GenSymbol::all();
    let mut syms: Vec<GenSymbol> = Vec::with_capacity(len);
    while syms.len() < len {
        let s = all[rng.gen_range(0..12)];
        if syms.last() != Some(&s.inverse()) {
            syms.push(s);
        }
    }
    GroupWord::new(syms)
}

/// A product of `len` random letters `x₀^±1, x₁^±1` in `F`.
pub fn f_element<R: Rng>(rng: &mut R, len: usize) -> PLMap {
    let mut acc = PLMap::identity(&Interval::unit());
    for _ in 0..len {
        let g = if rng.gen_bool(0.5) { thompson::x0() } else { thompson::x1() };
        let g = if rng.gen_bool(0.5) { g.invert() } else { g.clone() };
        acc = acc.compose(&g).expect("self-maps of [0,1]");
    }
    acc
}

/// A nontrivial commutator `[a, b]` of random elements of `F`; its support is
/// compact in `(0, 1)`.
pub fn f_prime_element<R: Rng>(rng: &mut R, len: usize) -> PLMap {
    loop {
        let a = f_element(rng, len);
        let b = f_element(rng, len);
        let c = thompson::commutator(&a, &b).expect("self-maps of [0,1]");
        if !c.is_identity() {
            return c;
        }
    }
}
