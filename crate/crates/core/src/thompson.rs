//! Thompson's group F, the group H = ⟨F′, ν₁⟩ acting on [0,1], and the
//! circle groups T(p) of power-of-two PL homeomorphisms of [0,p]/{0,p}.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;


use crate::dyadic::{dy, Dyadic};
use crate::error::{Error, Result};
use crate::plmap::{Interval, PLMap, Rational};

struct Tables {
    c0: PLMap,
    c1: PLMap,
    nu1: PLMap,
    nu2: PLMap,
    nu3: PLMap,
    x0: PLMap,
    x1: PLMap,
    psi: PLMap,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let unit = Interval::unit();
        let c0 = PLMap::from_points(
            vec![dy(0, 0), dy(1, 4), dy(1, 3), dy(1, 2), dy(1, 0)],
            vec![dy(0, 0), dy(1, 3), dy(3, 4), dy(1, 2), dy(1, 0)],
        )
        .expect("c0 table");
        let c1 = c0.flip_conjugate(&unit).expect("c0 is a self-map of [0,1]");
        let nu1 = c0.compose(&c1).expect("same domain");
        let x0 = PLMap::from_points(
            vec![dy(0, 0), dy(1, 2), dy(1, 1), dy(1, 0)],
            vec![dy(0, 0), dy(1, 1), dy(3, 2), dy(1, 0)],
        )
        .expect("x0 table");
        let x1 = PLMap::concat(&[
            PLMap::identity(&Interval::new(dy(0, 0), dy(1, 1)).unwrap()),
            x0.affine_conjugate(&Interval::new(dy(1, 1), dy(1, 0)).unwrap()).unwrap(),
        ])
        .expect("x1 pieces abut");
        let psi = PLMap::from_points(
            vec![dy(0, 0), dy(1, 1), dy(3, 2), dy(1, 0)],
            vec![dy(1, 4), dy(9, 4), dy(13, 4), dy(15, 4)],
        )
        .expect("psi table");
        let inner = Interval::new(dy(1, 4), dy(15, 4)).unwrap();
        let conj = |g: &PLMap| -> PLMap {
            let mid = psi.invert().compose(g).unwrap().compose(&psi).unwrap();
            PLMap::concat(&[
                PLMap::identity(&Interval::new(dy(0, 0), inner.lo().clone()).unwrap()),
                mid,
                PLMap::identity(&Interval::new(inner.hi().clone(), dy(1, 0)).unwrap()),
            ])
            .unwrap()
        };
        let nu2 = conj(&x0);
        let nu3 = conj(&x1);
        let t = Tables { c0, c1, nu1, nu2, nu3, x0, x1, psi };
        startup_checks(&t);
        t
    })
}

fn startup_checks(t: &Tables) {
    let unit = Interval::unit();
    let quarter = (dy(0, 0).to_rational(), dy(1, 2).to_rational());
    assert_eq!(t.c0.support_components().unwrap(), vec![quarter], "support of c0");
    let sixteenth = Interval::new(dy(0, 0), dy(1, 4)).unwrap();
    assert_eq!(
        t.c0.restrict(&sixteenth).unwrap(),
        PLMap::affine(&sixteenth, &Interval::new(dy(0, 0), dy(1, 3)).unwrap()),
        "c0 doubles near 0"
    );
    for x in t.c0.breakpoints() {
        if x > &dy(0, 0) && x < &dy(1, 2) {
            assert!(t.c0.evaluate(x).unwrap() > *x, "c0 moves right on its support");
        }
    }
    assert_eq!(t.nu1.flip_conjugate(&unit).unwrap(), t.nu1, "nu1 is symmetric");
    for g in [&t.nu2, &t.nu3] {
        for (a, b) in g.support_components().unwrap() {
            assert!(a >= dy(1, 4).to_rational() && b <= dy(15, 4).to_rational());
        }
    }
    for g in [&t.c0, &t.nu1, &t.nu2, &t.nu3, &t.x0, &t.x1, &t.psi] {
        assert!(g.is_power2());
    }
}

/// `c₀`: doubling on [0,1/16], support (0,1/4).
pub fn c0() -> &'static PLMap {
    &tables().c0
}

/// `c₁ = ι c₀ ι`, support (3/4,1).
pub fn c1() -> &'static PLMap {
    &tables().c1
}

pub fn nu1() -> &'static PLMap {
    &tables().nu1
}

pub fn nu2() -> &'static PLMap {
    &tables().nu2
}

pub fn nu3() -> &'static PLMap {
    &tables().nu3
}

pub fn x0() -> &'static PLMap {
    &tables().x0
}

pub fn x1() -> &'static PLMap {
    &tables().x1
}

/// The map [0,1] → [1/16,15/16] used to carry F onto the middle of [0,1].
pub fn psi() -> &'static PLMap {
    &tables().psi
}

/// `(ν₁, ν₂, ν₃)`, the generators of H.
pub fn h_generators() -> [&'static PLMap; 3] {
    [nu1(), nu2(), nu3()]
}

/// Product of a sequence of self-maps of one interval, applied left to right.
pub fn product(maps: &[&PLMap], on: &Interval) -> Result<PLMap> {
    let mut acc = PLMap::identity(on);
    for m in maps {
        acc = acc.compose(m)?;
    }
    Ok(acc)
}

/// `a⁻¹ b⁻¹ a b`.
pub fn commutator(a: &PLMap, b: &PLMap) -> Result<PLMap> {
    a.invert().compose(&b.invert())?.compose(a)?.compose(b)
}

/// `f⁻¹ g f`.
pub fn conjugate(g: &PLMap, f: &PLMap) -> Result<PLMap> {
    f.invert().compose(g)?.compose(f)
}

/// The two relators `[fg⁻¹, g^f]` and `[fg⁻¹, g^{f²}]`.
pub fn f_relators(f: &PLMap, g: &PLMap) -> Result<[PLMap; 2]> {
    let a = f.compose(&g.invert())?;
    let g_f = conjugate(g, f)?;
    let g_ff = conjugate(&g_f, f)?;
    Ok([commutator(&a, &g_f)?, commutator(&a, &g_ff)?])
}

pub fn check_f_relations_for(f: &PLMap, g: &PLMap) -> bool {
    match f_relators(f, g) {
        Ok(rs) => rs.iter().all(PLMap::is_identity),
        Err(_) => false,
    }
}

/// Whether both relators of the finite presentation of F are trivial on
/// `(x₀, x₁)`.
pub fn check_f_relations() -> bool {
    check_f_relations_for(x0(), x1())
}

/// A power-of-two PL homeomorphism of the circle `[0,p]/{0,p}`, stored as a
/// lift `[0,p] → [c, c+p]` with `0 ≤ c < p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircleMap {
    lift: PLMap,
    period: i64,
}

fn rational_floor_div(x: &Rational, p: i64) -> BigInt {
    (x / Rational::from_integer(p.into())).floor().to_integer()
}

impl CircleMap {
    /// Normalizes a lift `[0,p] → [c, c+p]` to `0 ≤ c < p`.
    pub fn from_lift(lift: PLMap, period: i64) -> Result<CircleMap> {
        if period < 1 {
            return Err(Error::Domain(format!("period must be positive, got {period}")));
        }
        let p = Dyadic::from(period);
        if lift.domain() != Interval::new(Dyadic::zero(), p.clone())? {
            return Err(Error::Domain(format!("lift domain {} is not [0, {period}]", lift.domain())));
        }
        if lift.range().length() != p {
            return Err(Error::Domain(format!("lift range {} has length != {period}", lift.range())));
        }
        if !lift.is_power2() {
            return Err(Error::Domain("circle map slopes must be powers of two".into()));
        }
        let k = lift.range_lo().floor().div_floor(&BigInt::from(period));
        let shift = Dyadic::from(-k * BigInt::from(period));
        Ok(CircleMap { lift: lift.shift(&Dyadic::zero(), &shift), period })
    }

    pub fn identity(period: i64) -> CircleMap {
        CircleMap { lift: PLMap::identity(&Interval::int(0, period)), period }
    }

    pub fn rotation(d: &Dyadic, period: i64) -> CircleMap {
        CircleMap::from_lift(PLMap::translation(&Interval::int(0, period), d), period)
            .expect("translation is a valid lift")
    }

    /// Element of F(p): a power-of-two self-map of [0,p].
    pub fn from_interval_map(f: &PLMap, period: i64) -> Result<CircleMap> {
        if f.domain() != Interval::int(0, period) || f.range() != f.domain() {
            return Err(Error::Domain(format!("expected a self-map of [0, {period}]")));
        }
        CircleMap::from_lift(f.clone(), period)
    }

    pub fn lift(&self) -> &PLMap {
        &self.lift
    }

    pub fn period(&self) -> i64 {
        self.period
    }

    /// `0·f`, in `[0, p)`.
    pub fn offset(&self) -> &Dyadic {
        self.lift.range_lo()
    }

    pub fn is_identity(&self) -> bool {
        self.lift.is_identity()
    }

    /// The lift extended equivariantly to the whole line.
    pub fn evaluate_lift(&self, x: &Dyadic) -> Dyadic {
        let p = BigInt::from(self.period);
        let k = x.floor().div_floor(&p);
        let kp = Dyadic::from(k * p);
        let r = x - &kp;
        &self.lift.evaluate(&r).expect("reduced point lies in [0,p]") + &kp
    }

    pub fn evaluate(&self, x: &Dyadic) -> Dyadic {
        let y = self.evaluate_lift(x);
        let p = BigInt::from(self.period);
        let k = y.floor().div_floor(&p);
        &y - &Dyadic::from(k * p)
    }

    /// The equivariant extension of the lift restricted to `[lo, hi]`.
    pub fn lift_on(&self, on: &Interval) -> PLMap {
        let p = BigInt::from(self.period);
        let k0 = on.lo().floor().div_floor(&p);
        let k1 = on.hi().floor().div_floor(&p);
        let mut parts = Vec::new();
        let mut k = k0;
        while k <= k1 {
            let kp = Dyadic::from(&k * &p);
            parts.push(self.lift.shift(&kp, &kp));
            k += 1;
        }
        PLMap::concat(&parts).expect("lifts abut").restrict(on).expect("inside the union")
    }

    fn check_period(&self, other: &CircleMap) -> Result<()> {
        if self.period != other.period {
            return Err(Error::Domain(format!(
                "period mismatch: {} vs {}",
                self.period, other.period
            )));
        }
        Ok(())
    }

    /// `self` then `g`.
    pub fn compose(&self, g: &CircleMap) -> Result<CircleMap> {
        self.check_period(g)?;
        let ext = g.lift_on(&self.lift.range());
        CircleMap::from_lift(self.lift.compose(&ext)?, self.period)
    }

    pub fn inverse(&self) -> CircleMap {
        let inv = self.lift.invert();
        let p = Dyadic::from(self.period);
        let wide = PLMap::concat(&[inv.shift(&-&p, &-&p), inv]).expect("copies abut");
        let lift = wide.restrict(&Interval::int(0, self.period)).expect("c lies in [0,p)");
        CircleMap::from_lift(lift, self.period).expect("valid lift")
    }

    pub fn power(&self, k: u32) -> CircleMap {
        let mut acc = CircleMap::identity(self.period);
        for _ in 0..k {
            acc = acc.compose(self).expect("same period");
        }
        acc
    }
}

/// Splits `t` into the rotation `s` by `0·t` and `f = t s⁻¹` fixing 0, so that
/// `t` is `f` followed by `s`.
pub fn decompose_t(t: &CircleMap) -> (CircleMap, CircleMap) {
    let s = CircleMap::rotation(t.offset(), t.period);
    let f = t.compose(&s.inverse()).expect("same period");
    (s, f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotationNumber {
    /// Exact value in `[0, p)` with a periodic point witnessing it.
    Exact { value: Rational, q: u32, witness: Rational },
    /// Not resolved up to the search bound; the value lies in `[lo, hi]`.
    Bounds { lo: Rational, hi: Rational },
}

impl RotationNumber {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            RotationNumber::Exact { value, .. } => Some(value),
            RotationNumber::Bounds { .. } => None,
        }
    }
}

impl std::fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RotationNumber::Exact { value, .. } => write!(f, "{value}"),
            RotationNumber::Bounds { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

pub const DEFAULT_Q: u32 = 64;
pub const DEFAULT_N: u32 = 4096;

/// Rotation number of `f` (lift normalized so `0 ≤ 0·f < p`), reduced into
/// `[0, p)`.
///
/// For `q = 1..=max_q` the iterate `F^q` of the lift is built exactly and
/// `F^q(x) = x + r p` is solved piece by piece; the first solution gives
/// `r p / q`. Otherwise the orbit of 0 under `n_iter` iterations bounds the
/// value.
pub fn rotation_number(f: &CircleMap, max_q: u32, n_iter: u32) -> RotationNumber {
    match lift_translation_number(f, max_q, n_iter) {
        RotationNumber::Exact { value, q, witness } => {
            let pr = Rational::from_integer(f.period.into());
            let value = &value - Rational::from_integer(rational_floor_div(&value, f.period)) * &pr;
            RotationNumber::Exact { value, q, witness }
        }
        b => b,
    }
}

/// Translation number `lim (x·Fⁿ − x)/n` of the normalized lift `F`, not
/// reduced modulo `p`.
pub fn lift_translation_number(f: &CircleMap, max_q: u32, n_iter: u32) -> RotationNumber {
    let p = f.period;
    let pr = Rational::from_integer(p.into());
    let mut iter = f.lift.clone();
    for q in 1..=max_q.max(1) {
        if q > 1 {
            let ext = f.lift_on(&iter.range());
            iter = iter.compose(&ext).expect("range matches extension");
        }
        if let Some((r, x)) = periodic_point(&iter, p) {
            let value = Rational::from_integer(r) * &pr / Rational::from_integer(q.into());
            return RotationNumber::Exact { value, q, witness: x };
        }
    }
    let n = n_iter.max(1);
    let mut x = Dyadic::zero();
    for _ in 0..n {
        x = f.evaluate_lift(&x);
    }
    let mean = x.to_rational() / Rational::from_integer(n.into());
    let slack = &pr / Rational::from_integer(n.into());
    RotationNumber::Bounds { lo: &mean - &slack, hi: &mean + &slack }
}

/// Solves `x·G = x + r p` for `x ∈ [0,p]`, where `G` is an iterate of a lift.
fn periodic_point(g: &PLMap, p: i64) -> Option<(BigInt, Rational)> {
    let xs = g.breakpoints();
    let ys = g.values();
    let ds: Vec<Rational> = xs.iter().zip(ys).map(|(x, y)| (y - x).to_rational()).collect();
    let lo = ds.iter().min()?;
    let hi = ds.iter().max()?;
    let r = rational_ceil_div(lo, p);
    let target = Rational::from_integer(&r * BigInt::from(p));
    if &target > hi {
        return None;
    }
    for i in 0..ds.len() - 1 {
        let (d0, d1) = (&ds[i], &ds[i + 1]);
        let between = (d0 <= &target && &target <= d1) || (d1 <= &target && &target <= d0);
        if !between {
            continue;
        }
        let x0 = xs[i].to_rational();
        if d0 == d1 {
            return Some((r, x0));
        }
        let w = (&xs[i + 1] - &xs[i]).to_rational();
        let x = &x0 + (&target - d0) * w / (d1 - d0);
        return Some((r, x));
    }
    None
}

fn rational_ceil_div(x: &Rational, p: i64) -> BigInt {
    (x / Rational::from_integer(p.into())).ceil().to_integer()
}

/// `true` when `value` agrees with `expect` modulo `p`.
pub fn congruent_mod(value: &Rational, expect: &Rational, p: i64) -> bool {
    let d = (value - expect) / Rational::from_integer(p.into());
    d.is_integer()
}
