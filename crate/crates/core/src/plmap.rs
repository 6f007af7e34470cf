//! Finite, strictly increasing piecewise-linear bijections between compact
//! dyadic intervals.
//!
//! Maps act on the right: `x·(fg) = (x·f)·g`, so [`PLMap::compose`] applies
//! `self` first. Every map is stored in canonical form (no breakpoint where
//! the two adjacent slopes agree), which makes `==` the equality test for the
//! underlying functions.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

pub type Rational = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// Integer-endpoint interval; panics when `lo >= hi`.
    pub fn int(lo: i64, hi: i64) -> Self {
        Interval::new(Dyadic::from(lo), Dyadic::from(hi)).expect("lo < hi")
    }

    pub fn unit() -> Self {
        Interval::int(0, 1)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn length(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_open(&self, x: &Dyadic) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn translate(&self, d: &Dyadic) -> Interval {
        Interval { lo: &self.lo + d, hi: &self.hi + d }
    }

    /// `x ↦ lo + hi - x`, the orientation-reversing isometry of the interval.
    pub fn reflect(&self, x: &Dyadic) -> Dyadic {
        &(&self.lo + &self.hi) - x
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLMap {
    xs: Vec<Dyadic>,
    ys: Vec<Dyadic>,
    /// log2 of every slope, present iff all slopes are powers of two.
    log_slopes: Option<Vec<i64>>,
}

fn piece_log_slope(x0: &Dyadic, x1: &Dyadic, y0: &Dyadic, y1: &Dyadic) -> Option<i64> {
    let ratio = (y1 - y0).checked_div(&(x1 - x0))?;
    ratio.log2_exact().ok().flatten()
}

fn same_slope(a: (&Dyadic, &Dyadic), b: (&Dyadic, &Dyadic), c: (&Dyadic, &Dyadic)) -> bool {
    // (yb - ya)(xc - xb) == (yc - yb)(xb - xa)
    (b.1 - a.1) * (c.0 - b.0) == (c.1 - b.1) * (b.0 - a.0)
}

impl PLMap {
    /// Builds the canonical map through the points `(xs[i], ys[i])`.
    pub fn from_points(xs: Vec<Dyadic>, ys: Vec<Dyadic>) -> Result<PLMap> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Domain(format!(
                "need at least two matching breakpoints (got {} and {})",
                xs.len(),
                ys.len()
            )));
        }
        for w in 0..xs.len() - 1 {
            if xs[w] >= xs[w + 1] || ys[w] >= ys[w + 1] {
                return Err(Error::Domain(format!(
                    "breakpoints or values not strictly increasing at index {w}"
                )));
            }
        }
        Ok(Self::canonical(xs, ys))
    }

    fn canonical(xs: Vec<Dyadic>, ys: Vec<Dyadic>) -> PLMap {
        let mut cx: Vec<Dyadic> = Vec::with_capacity(xs.len());
        let mut cy: Vec<Dyadic> = Vec::with_capacity(ys.len());
        for (x, y) in xs.into_iter().zip(ys) {
            while cx.len() >= 2 {
                let n = cx.len();
                if same_slope((&cx[n - 2], &cy[n - 2]), (&cx[n - 1], &cy[n - 1]), (&x, &y)) {
                    cx.pop();
                    cy.pop();
                } else {
                    break;
                }
            }
            cx.push(x);
            cy.push(y);
        }
        let log_slopes = (0..cx.len() - 1)
            .map(|i| piece_log_slope(&cx[i], &cx[i + 1], &cy[i], &cy[i + 1]))
            .collect::<Option<Vec<_>>>();
        PLMap { xs: cx, ys: cy, log_slopes }
    }

    pub fn identity(on: &Interval) -> PLMap {
        PLMap {
            xs: vec![on.lo.clone(), on.hi.clone()],
            ys: vec![on.lo.clone(), on.hi.clone()],
            log_slopes: Some(vec![0]),
        }
    }

    /// The single affine piece `from -> to`.
    pub fn affine(from: &Interval, to: &Interval) -> PLMap {
        Self::canonical(
            vec![from.lo.clone(), from.hi.clone()],
            vec![to.lo.clone(), to.hi.clone()],
        )
    }

    /// The translation `x ↦ x + d` on `on`.
    pub fn translation(on: &Interval, d: &Dyadic) -> PLMap {
        PLMap {
            xs: vec![on.lo.clone(), on.hi.clone()],
            ys: vec![&on.lo + d, &on.hi + d],
            log_slopes: Some(vec![0]),
        }
    }

    pub fn breakpoints(&self) -> &[Dyadic] {
        &self.xs
    }

    pub fn values(&self) -> &[Dyadic] {
        &self.ys
    }

    pub fn pieces(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn domain(&self) -> Interval {
        Interval { lo: self.xs[0].clone(), hi: self.xs[self.xs.len() - 1].clone() }
    }

    pub fn range(&self) -> Interval {
        Interval { lo: self.ys[0].clone(), hi: self.ys[self.ys.len() - 1].clone() }
    }

    pub fn domain_lo(&self) -> &Dyadic {
        &self.xs[0]
    }

    pub fn domain_hi(&self) -> &Dyadic {
        &self.xs[self.xs.len() - 1]
    }

    pub fn range_lo(&self) -> &Dyadic {
        &self.ys[0]
    }

    pub fn range_hi(&self) -> &Dyadic {
        &self.ys[self.ys.len() - 1]
    }

    pub fn is_power2(&self) -> bool {
        self.log_slopes.is_some()
    }

    pub fn log_slopes(&self) -> Option<&[i64]> {
        self.log_slopes.as_deref()
    }

    pub fn is_identity(&self) -> bool {
        self.xs.len() == 2 && self.xs == self.ys
    }

    /// Index of the piece containing `x` (the right piece at breakpoints,
    /// the last piece at the right end).
    fn piece_at(&self, x: &Dyadic) -> usize {
        let idx = self.xs.partition_point(|b| b <= x);
        idx.saturating_sub(1).min(self.xs.len() - 2)
    }

    fn eval_piece(&self, i: usize, x: &Dyadic) -> Result<Dyadic> {
        let dx = x - &self.xs[i];
        let delta = match &self.log_slopes {
            Some(ls) => dx.mul_pow2(ls[i]),
            None => (&dx * &(&self.ys[i + 1] - &self.ys[i]))
                .checked_div(&(&self.xs[i + 1] - &self.xs[i]))
                .ok_or_else(|| Error::NonDyadic(format!("image of {x}")))?,
        };
        Ok(&self.ys[i] + &delta)
    }

    fn inv_eval_piece(&self, i: usize, y: &Dyadic) -> Result<Dyadic> {
        let dy = y - &self.ys[i];
        let delta = match &self.log_slopes {
            Some(ls) => dy.mul_pow2(-ls[i]),
            None => (&dy * &(&self.xs[i + 1] - &self.xs[i]))
                .checked_div(&(&self.ys[i + 1] - &self.ys[i]))
                .ok_or_else(|| Error::NonDyadic(format!("preimage of {y}")))?,
        };
        Ok(&self.xs[i] + &delta)
    }

    pub fn evaluate(&self, x: &Dyadic) -> Result<Dyadic> {
        if x < self.domain_lo() || x > self.domain_hi() {
            return Err(Error::Domain(format!("{x} outside domain {}", self.domain())));
        }
        self.eval_piece(self.piece_at(x), x)
    }

    /// Image of a (possibly non-dyadic) rational point.
    pub fn evaluate_rational(&self, x: &Rational) -> Result<Rational> {
        let lo = self.domain_lo().to_rational();
        let hi = self.domain_hi().to_rational();
        if x < &lo || x > &hi {
            return Err(Error::Domain(format!("{x} outside domain {}", self.domain())));
        }
        let i = self.xs.partition_point(|b| &b.to_rational() <= x).saturating_sub(1).min(self.xs.len() - 2);
        let (x0, x1) = (self.xs[i].to_rational(), self.xs[i + 1].to_rational());
        let (y0, y1) = (self.ys[i].to_rational(), self.ys[i + 1].to_rational());
        Ok(&y0 + (x - &x0) * (y1 - &y0) / (x1 - x0))
    }

    pub fn evaluate_inverse(&self, y: &Dyadic) -> Result<Dyadic> {
        if y < self.range_lo() || y > self.range_hi() {
            return Err(Error::Domain(format!("{y} outside range {}", self.range())));
        }
        let idx = self.ys.partition_point(|b| b <= y);
        let i = idx.saturating_sub(1).min(self.ys.len() - 2);
        self.inv_eval_piece(i, y)
    }

    pub fn invert(&self) -> PLMap {
        PLMap {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
            log_slopes: self.log_slopes.as_ref().map(|v| v.iter().map(|k| -k).collect()),
        }
    }

    /// `self` then `g`. Requires `range(self) == domain(g)`.
    pub fn compose(&self, g: &PLMap) -> Result<PLMap> {
        if self.range_lo() != g.domain_lo() || self.range_hi() != g.domain_hi() {
            return Err(Error::Domain(format!(
                "cannot compose: range {} != domain {}",
                self.range(),
                g.domain()
            )));
        }
        let mut xs = Vec::with_capacity(self.xs.len() + g.xs.len());
        let mut zs = Vec::with_capacity(self.xs.len() + g.xs.len());
        let (mut i, mut j) = (0usize, 0usize);
        let (n, m) = (self.ys.len(), g.xs.len());
        while i < n || j < m {
            let u = match (self.ys.get(i), g.xs.get(j)) {
                (Some(a), Some(b)) => match a.cmp(b) {
                    Ordering::Less => {
                        i += 1;
                        a
                    }
                    Ordering::Greater => {
                        j += 1;
                        b
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        a
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    a
                }
                (None, Some(b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            // piece indices: the last piece whose left end is <= u
            let fi = i.saturating_sub(1).min(n - 2);
            let gj = j.saturating_sub(1).min(m - 2);
            let fi = if &self.ys[fi] > u { fi - 1 } else { fi };
            let gj = if &g.xs[gj] > u { gj - 1 } else { gj };
            xs.push(self.inv_eval_piece(fi, u)?);
            zs.push(g.eval_piece(gj, u)?);
        }
        Ok(Self::canonical(xs, zs))
    }

    /// Restriction to `to`, which must lie inside the domain.
    pub fn restrict(&self, to: &Interval) -> Result<PLMap> {
        if !self.domain().contains_interval(to) {
            return Err(Error::Domain(format!("{to} not inside domain {}", self.domain())));
        }
        let mut xs = vec![to.lo.clone()];
        let mut ys = vec![self.evaluate(&to.lo)?];
        for (x, y) in self.xs.iter().zip(&self.ys) {
            if x > &to.lo && x < &to.hi {
                xs.push(x.clone());
                ys.push(y.clone());
            }
        }
        xs.push(to.hi.clone());
        ys.push(self.evaluate(&to.hi)?);
        Ok(Self::canonical(xs, ys))
    }

    /// Joins maps whose domains and ranges abut end to end.
    pub fn concat(parts: &[PLMap]) -> Result<PLMap> {
        let first = parts.first().ok_or_else(|| Error::Domain("nothing to concatenate".into()))?;
        let mut xs = first.xs.clone();
        let mut ys = first.ys.clone();
        for p in &parts[1..] {
            if xs.last() != Some(p.domain_lo()) || ys.last() != Some(p.range_lo()) {
                return Err(Error::Domain(format!(
                    "pieces do not abut at {}",
                    p.domain_lo()
                )));
            }
            xs.extend(p.xs[1..].iter().cloned());
            ys.extend(p.ys[1..].iter().cloned());
        }
        Ok(Self::canonical(xs, ys))
    }

    /// Shifts the domain by `dx` and the range by `dy`.
    pub fn shift(&self, dx: &Dyadic, dy: &Dyadic) -> PLMap {
        PLMap {
            xs: self.xs.iter().map(|x| x + dx).collect(),
            ys: self.ys.iter().map(|y| y + dy).collect(),
            log_slopes: self.log_slopes.clone(),
        }
    }

    /// Conjugate by a translation: the same map moved along by `d`.
    pub fn translate(&self, d: &Dyadic) -> PLMap {
        self.shift(d, d)
    }

    pub fn one_sided_slope(&self, x: &Dyadic, side: Side) -> Result<Rational> {
        let dom = self.domain();
        let ok = match side {
            Side::Left => x > &dom.lo && x <= &dom.hi,
            Side::Right => x >= &dom.lo && x < &dom.hi,
        };
        if !ok {
            return Err(Error::Domain(format!("no {side:?} slope at {x} on {dom}")));
        }
        let mut i = self.piece_at(x);
        if side == Side::Left && &self.xs[i] == x {
            i -= 1;
        }
        Ok(self.piece_slope(i))
    }

    pub fn piece_slope(&self, i: usize) -> Rational {
        (&self.ys[i + 1] - &self.ys[i]).to_rational() / (&self.xs[i + 1] - &self.xs[i]).to_rational()
    }

    /// True when `self` is the identity on a neighbourhood of the interior
    /// point `x`.
    pub fn fixes_neighbourhood(&self, x: &Dyadic) -> bool {
        if !self.domain().contains_open(x) {
            return false;
        }
        let i = self.piece_at(x);
        let slope_one = |k: usize| &self.ys[k + 1] - &self.ys[k] == &self.xs[k + 1] - &self.xs[k];
        if self.evaluate(x).ok().as_ref() != Some(x) {
            return false;
        }
        if &self.xs[i] == x {
            slope_one(i - 1) && slope_one(i)
        } else {
            slope_one(i)
        }
    }

    fn require_self_map(&self, on: &Interval) -> Result<()> {
        if self.domain() != *on || self.range() != *on {
            return Err(Error::Domain(format!(
                "expected a self-map of {on}, got {} -> {}",
                self.domain(),
                self.range()
            )));
        }
        Ok(())
    }

    /// `ι ∘ f ∘ ι` for the orientation-reversing isometry ι of `on`.
    pub fn flip_conjugate(&self, on: &Interval) -> Result<PLMap> {
        self.require_self_map(on)?;
        Ok(self.flipped_unchecked())
    }

    fn flipped_unchecked(&self) -> PLMap {
        let dom = self.domain();
        let xs: Vec<Dyadic> = self.ys.iter().rev().map(|y| dom.reflect(y)).collect();
        let ys: Vec<Dyadic> = self.xs.iter().rev().map(|x| dom.reflect(x)).collect();
        // x·(ιfι) at ι(y_i) is ι(x_i): breakpoints come from values of f
        let (xs, ys) = (ys, xs);
        PLMap {
            xs,
            ys,
            log_slopes: self.log_slopes.as_ref().map(|v| v.iter().rev().cloned().collect()),
        }
    }

    /// Copy of the self-map `self` moved onto `target` by the unique isometry
    /// with the given orientation.
    pub fn isometry_conjugate(&self, target: &Interval, orient: Orientation) -> Result<PLMap> {
        let dom = self.domain();
        self.require_self_map(&dom)?;
        if dom.length() != target.length() {
            return Err(Error::Domain(format!(
                "length mismatch: {} vs {}",
                dom,
                target
            )));
        }
        let moved = self.translate(&(&target.lo - &dom.lo));
        Ok(match orient {
            Orientation::Preserving => moved,
            Orientation::Reversing => moved.flipped_unchecked(),
        })
    }

    /// Conjugate of the self-map `self` by the increasing affine map from its
    /// domain onto `target` (the two lengths may differ).
    pub fn affine_conjugate(&self, target: &Interval) -> Result<PLMap> {
        let dom = self.domain();
        self.require_self_map(&dom)?;
        let scale = target
            .length()
            .checked_div(&dom.length())
            .ok_or_else(|| Error::NonDyadic("interval length ratio".into()))?;
        let map = |v: &Dyadic| &target.lo + &(&(v - &dom.lo) * &scale);
        Ok(PLMap {
            xs: self.xs.iter().map(map).collect(),
            ys: self.ys.iter().map(map).collect(),
            log_slopes: self.log_slopes.clone(),
        })
    }

    /// Maximal open subintervals of the domain on which `x·f != x`, with
    /// exact (rational) endpoints. Works for any map; see
    /// [`PLMap::support_components`] for the self-map version.
    pub fn moved_components(&self) -> Vec<(Rational, Rational)> {
        // points with the sign of d(x) = x·f - x, including interior crossings
        let mut pts: Vec<(Rational, i8)> = Vec::with_capacity(self.xs.len() * 2);
        let sgn = |d: &Dyadic| -> i8 {
            if d.is_zero() {
                0
            } else if d.is_positive() {
                1
            } else {
                -1
            }
        };
        let ds: Vec<Dyadic> = self.xs.iter().zip(&self.ys).map(|(x, y)| y - x).collect();
        for i in 0..self.xs.len() {
            pts.push((self.xs[i].to_rational(), sgn(&ds[i])));
            if i + 1 < self.xs.len() && sgn(&ds[i]) * sgn(&ds[i + 1]) < 0 {
                let d0 = ds[i].to_rational();
                let d1 = ds[i + 1].to_rational();
                let w = (&self.xs[i + 1] - &self.xs[i]).to_rational();
                pts.push((self.xs[i].to_rational() + &d0 * w / (&d0 - d1), 0));
            }
        }
        let mut out = Vec::new();
        let mut start: Option<Rational> = None;
        for k in 0..pts.len() - 1 {
            let (a, sa) = &pts[k];
            let (b, sb) = &pts[k + 1];
            let moving = *sa != 0 || *sb != 0;
            if moving && start.is_none() {
                start = Some(a.clone());
            }
            if start.is_some() && (!moving || *sb == 0) {
                if moving {
                    out.push((start.take().unwrap(), b.clone()));
                } else {
                    start = None;
                }
            }
        }
        if let Some(s) = start {
            out.push((s, pts[pts.len() - 1].0.clone()));
        }
        out
    }

    pub fn support_components(&self) -> Result<Vec<(Rational, Rational)>> {
        self.require_self_map(&self.domain())?;
        Ok(self.moved_components())
    }

    /// Boundary points of the support that lie in the open domain.
    pub fn transition_points(&self) -> Vec<Rational> {
        let lo = self.domain_lo().to_rational();
        let hi = self.domain_hi().to_rational();
        let mut pts: Vec<Rational> = self
            .moved_components()
            .into_iter()
            .flat_map(|(a, b)| [a, b])
            .filter(|p| p > &lo && p < &hi)
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }

    /// A dyadic point moved by the map, if any.
    pub fn moved_point(&self) -> Option<Dyadic> {
        self.xs.iter().zip(&self.ys).find(|(x, y)| x != y).map(|(x, _)| x.clone())
    }

    pub fn to_json(&self) -> String {
        let pairs: Vec<[String; 2]> = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(x, y)| [x.to_string(), y.to_string()])
            .collect();
        serde_json::to_string(&pairs).expect("strings serialize")
    }

    pub fn from_json(s: &str) -> Result<PLMap> {
        let pairs: Vec<[Dyadic; 2]> =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let (xs, ys) = pairs.into_iter().map(|[x, y]| (x, y)).unzip();
        PLMap::from_points(xs, ys)
    }

    /// SVG drawing of the graph over the bounding box of domain and range.
    pub fn to_svg(&self) -> String {
        let lo = self.domain_lo().min(self.range_lo()).to_f64();
        let hi = self.domain_hi().max(self.range_hi()).to_f64();
        let span = (hi - lo).max(f64::MIN_POSITIVE);
        let size = 480.0;
        let px = |v: f64| 10.0 + (v - lo) / span * size;
        let py = |v: f64| 10.0 + size - (v - lo) / span * size;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="500" height="500" viewBox="0 0 500 500">"#
        );
        let _ = writeln!(
            out,
            r##"<rect x="10" y="10" width="{size}" height="{size}" fill="none" stroke="#999"/>"##
        );
        let _ = writeln!(
            out,
            r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#ccc" stroke-dasharray="4"/>"##,
            px(lo),
            py(lo),
            px(hi),
            py(hi)
        );
        let points: Vec<String> = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(x, y)| format!("{:.3},{:.3}", px(x.to_f64()), py(y.to_f64())))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        out.push_str("</svg>\n");
        out
    }
}

/// Decomposition of `[a, b]` into standard dyadic intervals, left to right.
fn standard_pieces(iv: &Interval) -> Vec<Dyadic> {
    let mut lengths = Vec::new();
    let mut x = iv.lo.clone();
    while x < iv.hi {
        let rem = &iv.hi - &x;
        // largest power of two <= rem
        let k = rem.numerator().bits() as i64 - 1 - rem.exponent() as i64;
        let step_cap = Dyadic::pow2(k);
        let step = if x.is_zero() {
            step_cap
        } else {
            let tz = x.numerator().trailing_zeros().unwrap_or(0) as i64;
            let align = Dyadic::pow2(tz - x.exponent() as i64);
            Dyadic::min(&align, &step_cap).clone()
        };
        x = &x + &step;
        lengths.push(step);
    }
    lengths
}

/// Splits the leftmost longest piece in half until `pieces.len() == n`.
fn refine(pieces: &mut Vec<Dyadic>, n: usize) {
    while pieces.len() < n {
        let mut best = 0;
        for (i, p) in pieces.iter().enumerate() {
            if p > &pieces[best] {
                best = i;
            }
        }
        let half = pieces[best].mul_pow2(-1);
        pieces[best] = half.clone();
        pieces.insert(best + 1, half);
    }
}

/// Power-of-two-slope map `from -> to` between dyadic intervals.
///
/// Both intervals are cut into standard dyadic intervals; the side with fewer
/// pieces has its leftmost longest piece halved until the counts agree, and
/// the pieces are then matched in order.
pub fn dyadic_interval_map(from: &Interval, to: &Interval) -> PLMap {
    let ratio = to.length().checked_div(&from.length());
    if let Some(r) = ratio {
        if r.log2_exact().ok().flatten().is_some() {
            return PLMap::affine(from, to);
        }
    }
    let mut a = standard_pieces(from);
    let mut b = standard_pieces(to);
    let n = a.len().max(b.len());
    refine(&mut a, n);
    refine(&mut b, n);
    let mut xs = vec![from.lo.clone()];
    let mut ys = vec![to.lo.clone()];
    for (da, db) in a.iter().zip(&b) {
        let nx = xs.last().unwrap() + da;
        let ny = ys.last().unwrap() + db;
        xs.push(nx);
        ys.push(ny);
    }
    PLMap::canonical(xs, ys)
}

/// Power-of-two-slope self-map of `within`, supported in a compact subinterval
/// of its interior, sending `u` to `v`.
pub fn dyadic_transporter(u: &Dyadic, v: &Dyadic, within: &Interval) -> Result<PLMap> {
    if !within.contains_open(u) || !within.contains_open(v) {
        return Err(Error::Domain(format!("{u} and {v} must lie inside the open {within}")));
    }
    if u == v {
        return Ok(PLMap::identity(within));
    }
    let a = Dyadic::midpoint(within.lo(), u.min(v));
    let b = Dyadic::midpoint(u.max(v), within.hi());
    let parts = [
        PLMap::identity(&Interval::new(within.lo.clone(), a.clone())?),
        dyadic_interval_map(&Interval::new(a.clone(), u.clone())?, &Interval::new(a, v.clone())?),
        dyadic_interval_map(&Interval::new(u.clone(), b.clone())?, &Interval::new(v.clone(), b.clone())?),
        PLMap::identity(&Interval::new(b, within.hi.clone())?),
    ];
    PLMap::concat(&parts)
}

/// Sign of `x·f - x` on the open piece just right of `x`.
pub fn displacement_sign(f: &PLMap, x: &Dyadic) -> Option<Ordering> {
    let y = f.evaluate(x).ok()?;
    let d = &y - x;
    if !d.is_zero() {
        return Some(d.cmp(&Dyadic::zero()));
    }
    let s = f.one_sided_slope(x, Side::Right).ok()?;
    Some((s - Rational::from_integer(1.into())).signum().numer().cmp(&0.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::dy;
    use proptest::prelude::*;

    fn c0() -> PLMap {
        PLMap::from_points(
            vec![dy(0, 0), dy(1, 4), dy(1, 3), dy(1, 2), dy(1, 0)],
            vec![dy(0, 0), dy(1, 3), dy(3, 4), dy(1, 2), dy(1, 0)],
        )
        .unwrap()
    }

    #[test]
    fn canonical_form_merges_collinear_pieces() {
        let f = PLMap::from_points(
            vec![dy(0, 0), dy(1, 1), dy(3, 2), dy(1, 0)],
            vec![dy(0, 0), dy(1, 0), dy(3, 1), dy(7, 2)],
        )
        .unwrap();
        assert_eq!(f.breakpoints(), &[dy(0, 0), dy(3, 2), dy(1, 0)]);
        assert!(f.is_power2());
    }

    #[test]
    fn rejects_bad_points() {
        assert!(PLMap::from_points(vec![dy(0, 0)], vec![dy(0, 0)]).is_err());
        assert!(PLMap::from_points(vec![dy(0, 0), dy(0, 0)], vec![dy(0, 0), dy(1, 0)]).is_err());
        assert!(PLMap::from_points(vec![dy(0, 0), dy(1, 0)], vec![dy(1, 0), dy(0, 0)]).is_err());
    }

    #[test]
    fn evaluation_and_slopes() {
        let f = c0();
        assert_eq!(f.evaluate(&dy(1, 5)).unwrap(), dy(1, 4));
        assert_eq!(f.evaluate(&dy(1, 2)).unwrap(), dy(1, 2));
        assert_eq!(f.evaluate(&dy(3, 4)).unwrap(), dy(7, 5));
        assert_eq!(f.one_sided_slope(&dy(0, 0), Side::Right).unwrap(), Rational::from_integer(2.into()));
        assert_eq!(
            f.one_sided_slope(&dy(1, 3), Side::Right).unwrap(),
            Rational::new(1.into(), 2.into())
        );
        assert_eq!(f.one_sided_slope(&dy(1, 3), Side::Left).unwrap(), Rational::from_integer(1.into()));
        assert!(f.one_sided_slope(&dy(0, 0), Side::Left).is_err());
        assert!(f.evaluate(&dy(2, 0)).is_err());
        assert_eq!(f.invert().evaluate(&dy(1, 4)).unwrap(), dy(1, 5));
    }

    #[test]
    fn compose_examples() {
        let f = c0();
        let ff = f.compose(&f).unwrap().restrict(&Interval::new(dy(0, 0), dy(1, 5)).unwrap()).unwrap();
        assert_eq!(ff, PLMap::affine(&Interval::new(dy(0, 0), dy(1, 5)).unwrap(), &Interval::new(dy(0, 0), dy(1, 3)).unwrap()));
        assert!(f.compose(&f.invert()).unwrap().is_identity());
        let id = PLMap::identity(&Interval::unit());
        assert_eq!(id.compose(&f).unwrap(), f);
        let g = PLMap::identity(&Interval::int(0, 2));
        assert!(f.compose(&g).is_err());
    }

    #[test]
    fn flip_and_transport() {
        let f = c0();
        let c1 = f.flip_conjugate(&Interval::unit()).unwrap();
        let supp = c1.support_components().unwrap();
        assert_eq!(supp, vec![(dy(3, 2).to_rational(), dy(1, 0).to_rational())]);
        assert_eq!(c1.flip_conjugate(&Interval::unit()).unwrap(), f);
        let moved = f.isometry_conjugate(&Interval::int(5, 6), Orientation::Preserving).unwrap();
        assert_eq!(
            moved.support_components().unwrap(),
            vec![(dy(5, 0).to_rational(), (dy(5, 0) + dy(1, 2)).to_rational())]
        );
        assert_eq!(f.isometry_conjugate(&Interval::unit(), Orientation::Reversing).unwrap(), c1);
        assert!(f.isometry_conjugate(&Interval::int(0, 2), Orientation::Preserving).is_err());
        let id = PLMap::identity(&Interval::int(3, 4));
        assert_eq!(id.flip_conjugate(&Interval::int(3, 4)).unwrap(), id);
    }

    #[test]
    fn support_and_transition_points() {
        let f = c0();
        let nu1 = f.compose(&f.flip_conjugate(&Interval::unit()).unwrap()).unwrap();
        assert_eq!(
            nu1.support_components().unwrap(),
            vec![
                (dy(0, 0).to_rational(), dy(1, 2).to_rational()),
                (dy(3, 2).to_rational(), dy(1, 0).to_rational())
            ]
        );
        assert_eq!(f.transition_points(), vec![dy(1, 2).to_rational()]);
        assert_eq!(nu1.transition_points(), vec![dy(1, 2).to_rational(), dy(3, 2).to_rational()]);
        let id = PLMap::identity(&Interval::unit());
        assert!(id.support_components().unwrap().is_empty());
        assert!(id.transition_points().is_empty());
    }

    #[test]
    fn crossing_fixed_point_is_rational() {
        // displacement 0, 1/4, -1/8, 0 at 0, 1/4, 3/4, 1: crosses zero at 7/12
        let g = PLMap::from_points(
            vec![dy(0, 0), dy(1, 2), dy(3, 2), dy(1, 0)],
            vec![dy(0, 0), dy(1, 1), dy(5, 3), dy(1, 0)],
        )
        .unwrap();
        assert!(!g.is_power2());
        let comps = g.support_components().unwrap();
        let cross = Rational::new(7.into(), 12.into());
        assert_eq!(
            comps,
            vec![(Rational::from_integer(0.into()), cross.clone()), (cross.clone(), Rational::from_integer(1.into()))]
        );
        assert_eq!(g.evaluate_rational(&cross).unwrap(), cross);
        assert_eq!(g.transition_points(), vec![cross]);
    }

    #[test]
    fn interval_map_examples() {
        let unit = Interval::unit();
        let half = Interval::new(dy(0, 0), dy(1, 1)).unwrap();
        assert_eq!(dyadic_interval_map(&unit, &half), PLMap::affine(&unit, &half));
        let three_q = Interval::new(dy(0, 0), dy(3, 2)).unwrap();
        let m = dyadic_interval_map(&unit, &three_q);
        assert_eq!(m.breakpoints(), &[dy(0, 0), dy(1, 1), dy(1, 0)]);
        assert_eq!(m.values(), &[dy(0, 0), dy(1, 1), dy(3, 2)]);
        assert!(dyadic_interval_map(&unit, &unit).is_identity());
    }

    #[test]
    fn transporter_examples() {
        let t = dyadic_transporter(&dy(1, 2), &dy(1, 1), &Interval::unit()).unwrap();
        assert_eq!(t.evaluate(&dy(1, 2)).unwrap(), dy(1, 1));
        assert!(t.fixes_neighbourhood(&dy(1, 5)) || t.evaluate(&dy(1, 20)).unwrap() == dy(1, 20));
        assert!(t.is_power2());
        assert!(dyadic_transporter(&dy(1, 2), &dy(1, 2), &Interval::unit()).unwrap().is_identity());
        assert_eq!(t.invert().evaluate(&dy(1, 1)).unwrap(), dy(1, 2));
        assert!(dyadic_transporter(&dy(0, 0), &dy(1, 1), &Interval::unit()).is_err());
    }

    fn arb_dyadic() -> impl Strategy<Value = Dyadic> {
        (1i64..64, 0i64..7).prop_map(|(n, e)| dy(n, e))
    }

    fn arb_map() -> impl Strategy<Value = PLMap> {
        (proptest::collection::vec((arb_dyadic(), -3i64..=3), 1..6)).prop_map(|steps| {
            let mut xs = vec![dy(0, 0)];
            let mut ys = vec![dy(0, 0)];
            for (a, k) in steps {
                let b = a.mul_pow2(k);
                xs.push(xs.last().unwrap() + &a);
                ys.push(ys.last().unwrap() + &b);
            }
            PLMap::from_points(xs, ys).unwrap()
        })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(f in arb_map()) {
            prop_assert!(f.compose(&f.invert()).unwrap().is_identity());
            prop_assert!(f.invert().compose(&f).unwrap().is_identity());
            prop_assert_eq!(f.invert().invert(), f);
        }

        #[test]
        fn compose_matches_pointwise(f in arb_map(), t in 0i64..=64) {
            let g = dyadic_interval_map(&f.range(), &f.domain());
            let h = f.compose(&g).unwrap();
            let x = f.domain_lo() + &(&f.domain().length() * &dy(t, 6));
            prop_assert_eq!(h.evaluate(&x).unwrap(), g.evaluate(&f.evaluate(&x).unwrap()).unwrap());
            prop_assert!(g.is_power2());
        }

        #[test]
        fn interval_map_inverse_symmetry(a in arb_dyadic(), b in arb_dyadic(), s in arb_dyadic()) {
            let i = Interval::new(s.clone(), &s + &a).unwrap();
            let j = Interval::new(dy(0, 0), b).unwrap();
            prop_assert_eq!(dyadic_interval_map(&i, &j).invert(), dyadic_interval_map(&j, &i));
        }

        #[test]
        fn flip_reverses_support(f in arb_map()) {
            let g = dyadic_interval_map(&f.range(), &f.domain());
            let h = f.compose(&g).unwrap();
            let dom = h.domain();
            let flipped = h.flip_conjugate(&dom).unwrap();
            let sum = (dom.lo() + dom.hi()).to_rational();
            let mut expect: Vec<_> = h.support_components().unwrap().into_iter()
                .map(|(a, b)| (&sum - b, &sum - a)).collect();
            expect.reverse();
            prop_assert_eq!(flipped.support_components().unwrap(), expect);
        }
    }
}
