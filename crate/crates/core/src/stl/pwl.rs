//! Exact piecewise-linear function algebra for the monitor.
//!
//! A `Pwl` is a continuous function given by breakpoints with strictly
//! increasing times; between breakpoints it interpolates linearly. All
//! operations insert the kinks they create (crossings of operands, moving
//! window boundaries) explicitly, so min, max, and sliding window extrema
//! are computed exactly rather than on a sample grid.
//!
//! Sliding minima are derived from sliding maxima by negation, which makes
//! the always/eventually duality hold bit for bit.

/// Minimum spacing between breakpoints; closer points are merged.
const T_MERGE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Pwl {
    ts: Vec<f64>,
    vs: Vec<f64>,
}

impl Pwl {
    /// Build from breakpoints, merging near-coincident times.
    pub fn new(ts: Vec<f64>, vs: Vec<f64>) -> Pwl {
        assert_eq!(ts.len(), vs.len());
        assert!(!ts.is_empty());
        let mut out = Pwl { ts: Vec::with_capacity(ts.len()), vs: Vec::with_capacity(vs.len()) };
        for (t, v) in ts.into_iter().zip(vs) {
            out.push(t, v);
        }
        out
    }

    pub fn point(t: f64, v: f64) -> Pwl {
        Pwl { ts: vec![t], vs: vec![v] }
    }

    fn push(&mut self, t: f64, v: f64) {
        if let Some(&last) = self.ts.last() {
            debug_assert!(t > last - T_MERGE, "breakpoints out of order");
            if t - last <= T_MERGE {
                return;
            }
        }
        self.ts.push(t);
        self.vs.push(v);
    }

    pub fn start(&self) -> f64 {
        self.ts[0]
    }

    pub fn end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.vs
    }

    /// Exact value at `t`; breakpoint hits return the stored value.
    pub fn value_at(&self, t: f64) -> f64 {
        debug_assert!(
            t >= self.start() - 1e-9 && t <= self.end() + 1e-9,
            "evaluation at {t} outside [{}, {}]",
            self.start(),
            self.end()
        );
        match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => self.vs[i],
            Err(0) => self.vs[0],
            Err(i) if i == self.ts.len() => *self.vs.last().unwrap(),
            Err(i) => {
                let (t0, t1) = (self.ts[i - 1], self.ts[i]);
                let (v0, v1) = (self.vs[i - 1], self.vs[i]);
                v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
            }
        }
    }

    /// Pointwise negation. Exact, involutive.
    pub fn neg(&self) -> Pwl {
        Pwl { ts: self.ts.clone(), vs: self.vs.iter().map(|v| -v).collect() }
    }

    /// Restriction to `[lo, hi]`, interpolating the new endpoints.
    pub fn restrict(&self, lo: f64, hi: f64) -> Pwl {
        debug_assert!(lo <= hi + T_MERGE);
        if hi - lo <= T_MERGE {
            return Pwl::point(lo, self.value_at(lo));
        }
        let mut out = Pwl { ts: Vec::new(), vs: Vec::new() };
        out.push(lo, self.value_at(lo));
        for (&t, &v) in self.ts.iter().zip(&self.vs) {
            if t > lo + T_MERGE && t < hi - T_MERGE {
                out.push(t, v);
            }
        }
        out.push(hi, self.value_at(hi));
        out
    }

    /// Shift the time axis by `dt`.
    pub fn shift(&self, dt: f64) -> Pwl {
        Pwl { ts: self.ts.iter().map(|t| t + dt).collect(), vs: self.vs.clone() }
    }

    /// Largest breakpoint value; equals the maximum of the function because a
    /// linear piece attains its extrema at its endpoints.
    pub fn max_value(&self) -> f64 {
        self.vs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.vs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Running minimum from the left endpoint, as an exact Pwl.
    ///
    /// Flat while the past minimum dominates, tracking the function while it
    /// sets new minima; the switch points are inserted as breakpoints.
    pub fn running_min(&self) -> Pwl {
        let mut out = Pwl { ts: Vec::new(), vs: Vec::new() };
        out.push(self.ts[0], self.vs[0]);
        let mut cur = self.vs[0];
        for i in 1..self.ts.len() {
            let (t0, v0) = (self.ts[i - 1], self.vs[i - 1]);
            let (t1, v1) = (self.ts[i], self.vs[i]);
            if v1 >= cur {
                out.push(t1, cur);
            } else if v0 <= cur {
                // already tracking a descent
                out.push(t1, v1);
                cur = v1;
            } else {
                // descends through the running minimum mid-segment
                let tc = t0 + (t1 - t0) * ((v0 - cur) / (v0 - v1));
                out.push(tc, cur);
                out.push(t1, v1);
                cur = v1;
            }
        }
        out
    }

    /// Pointwise binary min/max with crossings inserted, so the result is the
    /// exact envelope.
    fn combine(&self, other: &Pwl, take_max: bool) -> Pwl {
        let grid = merge_grids(&self.ts, &other.ts);
        let pick = |a: f64, b: f64| if take_max { a.max(b) } else { a.min(b) };
        let mut out = Pwl { ts: Vec::new(), vs: Vec::new() };
        let mut prev: Option<(f64, f64, f64)> = None;
        for &t in &grid {
            let (fa, fb) = (self.value_at(t), other.value_at(t));
            if let Some((tp, pa, pb)) = prev {
                let (dp, dc) = (pa - pb, fa - fb);
                if dp * dc < 0.0 {
                    // operands cross strictly inside the segment
                    let theta = dp / (dp - dc);
                    let tc = tp + (t - tp) * theta;
                    let va = pa + (fa - pa) * theta;
                    let vb = pb + (fb - pb) * theta;
                    out.push(tc, pick(va, vb));
                }
            }
            out.push(t, pick(fa, fb));
            prev = Some((t, fa, fb));
        }
        out
    }

    pub fn pointwise_max(&self, other: &Pwl) -> Pwl {
        self.combine(other, true)
    }

    pub fn pointwise_min(&self, other: &Pwl) -> Pwl {
        self.combine(other, false)
    }

    /// Exact sliding-window maximum: `g(t) = max over [t+a, t+b] of self`,
    /// returned over `[lo, hi]`. Needs `self` to cover `[lo+a, hi+b]`.
    ///
    /// Between consecutive critical points `beta - a`, `beta - b` the set of
    /// breakpoints inside the window is constant, so the window maximum is
    /// the upper envelope of two moving endpoint values and one constant; its
    /// kinks are the pairwise crossings, inserted per cell.
    pub fn sliding_max(&self, a: f64, b: f64, lo: f64, hi: f64) -> Pwl {
        debug_assert!(a <= b);
        debug_assert!(lo >= self.start() - a - 1e-9 && hi <= self.end() - b + 1e-9);
        if b - a <= T_MERGE {
            // point window: pure shift
            return self.restrict(lo + a, hi + a).shift(-a);
        }
        if hi - lo <= T_MERGE {
            return Pwl::point(lo, self.restrict(lo + a, lo + b).max_value());
        }

        let mut crit = vec![lo, hi];
        for &beta in &self.ts {
            for cand in [beta - a, beta - b] {
                if cand > lo + T_MERGE && cand < hi - T_MERGE {
                    crit.push(cand);
                }
            }
        }
        crit.sort_by(|x, y| x.partial_cmp(y).unwrap());
        crit.dedup_by(|x, y| (*x - *y).abs() <= T_MERGE);

        let mut out = Pwl { ts: Vec::new(), vs: Vec::new() };
        for w in crit.windows(2) {
            let (tl, tr) = (w[0], w[1]);
            // constant candidate: breakpoints strictly inside every window of the cell
            let mid = 0.5 * (tl + tr);
            let mut interior = f64::NEG_INFINITY;
            for (&beta, &v) in self.ts.iter().zip(&self.vs) {
                if beta > mid + a && beta < mid + b {
                    interior = interior.max(v);
                }
            }
            let eval = |t: f64| {
                self.value_at(t + a).max(self.value_at(t + b)).max(interior)
            };
            // kinks of the three-function upper envelope: pairwise crossings
            let mut pts = vec![tl, tr];
            let (ea_l, ea_r) = (self.value_at(tl + a), self.value_at(tr + a));
            let (eb_l, eb_r) = (self.value_at(tl + b), self.value_at(tr + b));
            push_crossing(&mut pts, tl, tr, ea_l, ea_r, eb_l, eb_r);
            if interior.is_finite() {
                push_crossing(&mut pts, tl, tr, ea_l, ea_r, interior, interior);
                push_crossing(&mut pts, tl, tr, eb_l, eb_r, interior, interior);
            }
            pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for t in pts {
                out.push(t, eval(t));
            }
        }
        out
    }

    /// Exact sliding-window minimum, defined by duality with `sliding_max`.
    pub fn sliding_min(&self, a: f64, b: f64, lo: f64, hi: f64) -> Pwl {
        self.neg().sliding_max(a, b, lo, hi).neg()
    }
}

/// Crossing time of two segments over `[tl, tr]` given endpoint values.
fn push_crossing(pts: &mut Vec<f64>, tl: f64, tr: f64, f_l: f64, f_r: f64, g_l: f64, g_r: f64) {
    let (dl, dr) = (f_l - g_l, f_r - g_r);
    if dl * dr < 0.0 {
        let tc = tl + (tr - tl) * (dl / (dl - dr));
        if tc > tl + T_MERGE && tc < tr - T_MERGE {
            pts.push(tc);
        }
    }
}

/// Sorted union of two breakpoint grids.
fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => {
                if x <= y {
                    i += 1;
                    x
                } else {
                    j += 1;
                    y
                }
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last().map_or(true, |&last: &f64| t - last > T_MERGE) {
            out.push(t);
        }
    }
    out
}
