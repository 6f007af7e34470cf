//! Independent pointwise model of the generators, built straight from the
//! breakpoint tables with plain rationals. Shared by the integration tests.
#![allow(dead_code)]

use lineorder::grho::{Family, GenSymbol, GroupWord};
use lineorder::labelling::Labelling;
use lineorder::Dyadic;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Linear interpolation through `(xs, ys)`.
#[derive(Clone, Debug)]
pub struct Table {
    xs: Vec<Q>,
    ys: Vec<Q>,
}

impl Table {
    pub fn new(pts: &[(i64, i64, i64, i64)]) -> Table {
        Table {
            xs: pts.iter().map(|p| q(p.0, p.1)).collect(),
            ys: pts.iter().map(|p| q(p.2, p.3)).collect(),
        }
    }

    pub fn inverse(&self) -> Table {
        Table { xs: self.ys.clone(), ys: self.xs.clone() }
    }

    pub fn at(&self, x: &Q) -> Q {
        assert!(x >= &self.xs[0] && x <= self.xs.last().unwrap(), "outside table domain");
        let i = (1..self.xs.len()).find(|&i| x <= &self.xs[i]).unwrap();
        let (x0, x1, y0, y1) = (&self.xs[i - 1], &self.xs[i], &self.ys[i - 1], &self.ys[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

fn c0() -> Table {
    Table::new(&[(0, 1, 0, 1), (1, 16, 1, 8), (1, 8, 3, 16), (1, 4, 1, 4), (1, 1, 1, 1)])
}

fn x0() -> Table {
    Table::new(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 3, 4), (1, 1, 1, 1)])
}

fn x1() -> Table {
    Table::new(&[(0, 1, 0, 1), (1, 2, 1, 2), (5, 8, 3, 4), (3, 4, 7, 8), (1, 1, 1, 1)])
}

fn psi() -> Table {
    Table::new(&[(0, 1, 1, 16), (1, 2, 9, 16), (3, 4, 13, 16), (1, 1, 15, 16)])
}

fn flip(x: &Q) -> Q {
    Q::one() - x
}

/// `x·ν_i` (or `x·ν_i⁻¹`) on `[0,1]`.
pub fn nu(i: u8, inverted: bool, x: &Q) -> Q {
    match i {
        1 => {
            // ν₁ = c₀ then c₁, with c₁ = ι c₀ ι
            let c = c0();
            if !inverted {
                let y = c.at(x);
                flip(&c.at(&flip(&y)))
            } else {
                let ci = c.inverse();
                let y = flip(&ci.at(&flip(x)));
                ci.at(&y)
            }
        }
        2 | 3 => {
            let lo = q(1, 16);
            let hi = q(15, 16);
            if x <= &lo || x >= &hi {
                return x.clone();
            }
            let inner = if i == 2 { x0() } else { x1() };
            let inner = if inverted { inner.inverse() } else { inner };
            let p = psi();
            p.at(&inner.at(&p.inverse().at(x)))
        }
        _ => panic!("generator index {i}"),
    }
}

pub fn floor(x: &Q) -> i64 {
    let f = x.floor().to_integer();
    i64::try_from(f).expect("small")
}

/// `x·s` for one generator symbol, read directly off the labelling.
pub fn act(rho: &dyn Labelling, s: GenSymbol, x: &Q) -> Q {
    let (n, h, base) = match s.family {
        Family::Zeta => {
            let n = floor(x);
            (n, 2 * n + 1, Q::from_integer(n.into()))
        }
        Family::Chi => {
            let n = floor(&(x + q(1, 2)));
            (n, 2 * n, Q::from_integer(n.into()) - q(1, 2))
        }
    };
    let _ = n;
    let t = x - &base;
    let u = if rho.letter_at(h).is_positive() {
        nu(s.index, s.inverted, &t)
    } else {
        flip(&nu(s.index, s.inverted, &flip(&t)))
    };
    u + base
}

pub fn act_word(rho: &dyn Labelling, w: &GroupWord, x: &Q) -> Q {
    w.symbols().iter().fold(x.clone(), |acc, s| act(rho, *s, &acc))
}

/// Does the word fix every point of a grid of step `2^-bits` over `[lo, hi]`?
pub fn fixes_grid(rho: &dyn Labelling, w: &GroupWord, lo: i64, hi: i64, bits: u32) -> bool {
    let step = Q::new(BigInt::one(), BigInt::from(1u64 << bits));
    let mut x = Q::from_integer(lo.into());
    let end = Q::from_integer(hi.into());
    while x <= end {
        if act_word(rho, w, &x) != x {
            return false;
        }
        x += &step;
    }
    true
}

pub fn to_q(d: &Dyadic) -> Q {
    d.to_rational()
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}
