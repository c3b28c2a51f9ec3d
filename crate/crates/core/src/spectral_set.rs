//! Closed subsets of the complex plane of the shape the spectra here take:
//! finitely many closed annuli and circles (full rotation invariance), a
//! finite set of phase-sensitive points, and possibly the origin.

use serde_json::{json, Value};

use crate::error::{Result, SpectraError};
use crate::model::{Lambda, LogWeight};
use crate::scalar::{max_of, min_of, Scalar};

/// Normal form: `radial` holds sorted, pairwise disjoint closed log-modulus
/// intervals `[a, b]` (`a == b` is a circle); `points` is sorted, deduplicated
/// and never inside an annulus of `radial`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralSet<S: Scalar> {
    radial: Vec<(S, S)>,
    points: Vec<LogWeight<S>>,
    includes_zero: bool,
}

impl<S: Scalar> Default for SpectralSet<S> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<S: Scalar> SpectralSet<S> {
    pub fn empty() -> Self {
        Self {
            radial: Vec::new(),
            points: Vec::new(),
            includes_zero: false,
        }
    }

    /// `e^lo <= |z| <= e^hi`; the bounds are swapped if given out of order.
    pub fn annulus(lo: S, hi: S) -> Self {
        let (lo, hi) = if lo > hi { (hi, lo) } else { (lo, hi) };
        Self {
            radial: vec![(lo, hi)],
            points: Vec::new(),
            includes_zero: false,
        }
    }

    pub fn circle(logmod: S) -> Self {
        Self::annulus(logmod.clone(), logmod)
    }

    pub fn point(p: LogWeight<S>) -> Self {
        Self {
            radial: Vec::new(),
            points: vec![p],
            includes_zero: false,
        }
    }

    pub fn zero() -> Self {
        Self {
            radial: Vec::new(),
            points: Vec::new(),
            includes_zero: true,
        }
    }

    pub fn from_parts(radial: Vec<(S, S)>, points: Vec<LogWeight<S>>, includes_zero: bool) -> Self {
        let mut set = Self {
            radial,
            points,
            includes_zero,
        };
        set.normalize();
        set
    }

    pub fn radial(&self) -> &[(S, S)] {
        &self.radial
    }

    pub fn points(&self) -> &[LogWeight<S>] {
        &self.points
    }

    pub fn includes_zero(&self) -> bool {
        self.includes_zero
    }

    pub fn is_empty(&self) -> bool {
        self.radial.is_empty() && self.points.is_empty() && !self.includes_zero
    }

    /// Largest log-modulus in the set, ignoring the origin.
    pub fn max_logmod(&self) -> Option<S> {
        let r = self.radial.last().map(|(_, b)| b.clone());
        let p = self.points.iter().map(|p| p.logmod().clone()).reduce(|a, b| max_of(&a, &b));
        match (r, p) {
            (Some(a), Some(b)) => Some(max_of(&a, &b)),
            (a, b) => a.or(b),
        }
    }

    pub fn min_logmod(&self) -> Option<S> {
        let r = self.radial.first().map(|(a, _)| a.clone());
        let p = self.points.iter().map(|p| p.logmod().clone()).reduce(|a, b| min_of(&a, &b));
        match (r, p) {
            (Some(a), Some(b)) => Some(min_of(&a, &b)),
            (a, b) => a.or(b),
        }
    }

    /// Whether the whole circle `|z| = e^t` lies in the set.
    pub fn contains_radius(&self, t: &S) -> bool {
        self.radial_index(t).is_some()
    }

    fn radial_index(&self, t: &S) -> Option<usize> {
        // first interval whose upper end is >= t
        let i = self.radial.partition_point(|(_, b)| b < t);
        (i < self.radial.len() && &self.radial[i].0 <= t).then_some(i)
    }

    pub fn contains(&self, lambda: &Lambda<S>) -> bool {
        match lambda {
            Lambda::Zero => self.includes_zero,
            Lambda::Polar(w) => self.contains_point(w),
        }
    }

    pub fn contains_point(&self, w: &LogWeight<S>) -> bool {
        self.contains_radius(w.logmod()) || self.points.binary_search(w).is_ok()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut radial = self.radial.clone();
        radial.extend(other.radial.iter().cloned());
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        Self::from_parts(radial, points, self.includes_zero || other.includes_zero)
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a Self>) -> Self {
        let mut radial = Vec::new();
        let mut points = Vec::new();
        let mut zero = false;
        for s in sets {
            radial.extend(s.radial.iter().cloned());
            points.extend(s.points.iter().cloned());
            zero |= s.includes_zero;
        }
        Self::from_parts(radial, points, zero)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut radial = Vec::new();
        for (a1, b1) in &self.radial {
            for (a2, b2) in &other.radial {
                let lo = max_of(a1, a2);
                let hi = min_of(b1, b2);
                if lo <= hi {
                    radial.push((lo, hi));
                }
            }
        }
        let points = self
            .points
            .iter()
            .filter(|p| other.contains_point(p))
            .chain(other.points.iter().filter(|p| self.contains_point(p)))
            .cloned()
            .collect();
        Self::from_parts(radial, points, self.includes_zero && other.includes_zero)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        if self.includes_zero && !other.includes_zero {
            return false;
        }
        // a connected interval must sit inside a single interval of `other`
        let radial_ok = self.radial.iter().all(|(a, b)| match other.radial_index(a) {
            Some(i) => b <= &other.radial[i].1,
            None => false,
        });
        radial_ok && self.points.iter().all(|p| other.contains_point(p))
    }

    fn normalize(&mut self) {
        self.radial.retain(|(a, b)| a <= b);
        self.radial.sort_by(|x, y| x.0.cmp_total(&y.0).then_with(|| x.1.cmp_total(&y.1)));
        let mut merged: Vec<(S, S)> = Vec::with_capacity(self.radial.len());
        for (a, b) in self.radial.drain(..) {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        self.radial = merged;

        let mut points = std::mem::take(&mut self.points);
        points.sort();
        points.dedup();
        points.retain(|p| !self.contains_radius(p.logmod()));
        self.points = points;
    }

    /// `{"radial":[[a,b],...], "points":[[logmod,phase],...], "zero":bool}`
    /// with shortest round-trip decimals.
    pub fn to_json(&self) -> Value {
        json!({
            "radial": self.radial.iter().map(|(a, b)| json!([a.as_f64(), b.as_f64()])).collect::<Vec<_>>(),
            "points": self.points.iter().map(|p| json!([p.logmod().as_f64(), p.phase().as_f64()])).collect::<Vec<_>>(),
            "zero": self.includes_zero,
        })
    }

    /// Inverse of [`Self::to_json`]; numbers may also be decimal strings.
    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| SpectraError::Malformed(format!("spectral set: {what}"));
        let number = |v: &Value| -> Result<S> {
            match v {
                Value::String(s) => S::parse_decimal(s),
                Value::Number(n) => S::parse_decimal(&n.to_string()),
                _ => None,
            }
            .ok_or_else(|| bad("expected a number"))
        };
        let pairs = |key: &str| -> Result<Vec<(S, S)>> {
            value
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|pair| match pair.as_array().map(Vec::as_slice) {
                    Some([a, b]) => Ok((number(a)?, number(b)?)),
                    _ => Err(bad("expected a pair")),
                })
                .collect()
        };
        let radial = pairs("radial")?;
        let points = pairs("points")?
            .into_iter()
            .map(|(l, p)| LogWeight::new(l, p))
            .collect();
        let zero = value.get("zero").and_then(Value::as_bool).ok_or_else(|| bad("zero"))?;
        Ok(Self::from_parts(radial, points, zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    fn pt(l: Rational, p: Rational) -> LogWeight<Rational> {
        LogWeight::new(l, p)
    }

    #[test]
    fn membership_examples() {
        let s = SpectralSet::annulus(r(-1, 2), r(1, 2));
        assert!(s.contains(&Lambda::polar(r(0, 1), r(3, 10))));

        let ln2 = r(6931, 10000);
        let c = SpectralSet::circle(ln2.clone());
        for phase in [r(0, 1), r(1, 3), r(9, 10)] {
            assert!(c.contains(&Lambda::polar(ln2.clone(), phase)));
        }

        let p = SpectralSet::point(pt(r(0, 1), r(0, 1)));
        assert!(p.contains(&Lambda::polar(r(0, 1), r(0, 1))));
        assert!(!p.contains(&Lambda::polar(r(0, 1), r(1, 2))));
        assert!(!p.contains(&Lambda::Zero));
        assert!(SpectralSet::<Rational>::zero().contains(&Lambda::Zero));
    }

    #[test]
    fn union_examples() {
        let u = SpectralSet::annulus(r(-1, 1), r(0, 1)).union(&SpectralSet::annulus(r(0, 1), r(1, 1)));
        assert_eq!(u, SpectralSet::annulus(r(-1, 1), r(1, 1)));

        let absorbed = SpectralSet::annulus(r(0, 1), r(1, 1)).union(&SpectralSet::point(pt(r(1, 2), r(3, 10))));
        assert_eq!(absorbed, SpectralSet::annulus(r(0, 1), r(1, 1)));

        assert!(SpectralSet::circle(r(0, 1)).is_subset(&SpectralSet::annulus(r(-1, 1), r(1, 1))));
    }

    #[test]
    fn subset_needs_a_single_covering_interval() {
        let two = SpectralSet::from_parts(vec![(r(0, 1), r(1, 1)), (r(2, 1), r(3, 1))], vec![], false);
        assert!(!SpectralSet::annulus(r(1, 2), r(5, 2)).is_subset(&two));
        assert!(SpectralSet::annulus(r(2, 1), r(5, 2)).is_subset(&two));
        assert!(!SpectralSet::zero().is_subset(&two));
    }

    #[test]
    fn intersection_examples() {
        let a = SpectralSet::from_parts(
            vec![(r(0, 1), r(2, 1))],
            vec![pt(r(5, 1), r(1, 4)), pt(r(-3, 1), r(0, 1))],
            true,
        );
        let b = SpectralSet::from_parts(vec![(r(1, 1), r(5, 1))], vec![pt(r(-3, 1), r(0, 1))], false);
        let i = a.intersection(&b);
        assert_eq!(
            i,
            SpectralSet::from_parts(vec![(r(1, 1), r(2, 1))], vec![pt(r(5, 1), r(1, 4)), pt(r(-3, 1), r(0, 1))], false)
        );
    }

    #[test]
    fn json_round_trip() {
        let s = SpectralSet::from_parts(
            vec![(r(-1, 2), r(1, 2))],
            vec![pt(r(2, 1), r(1, 2))],
            true,
        );
        let v = s.to_json();
        assert_eq!(v.to_string(), r#"{"radial":[[-0.5,0.5]],"points":[[2.0,0.5]],"zero":true}"#);
        assert_eq!(SpectralSet::<Rational>::from_json(&v).unwrap(), s);
    }

    fn arb_set() -> impl Strategy<Value = SpectralSet<Rational>> {
        let interval = (-8i64..8, 0i64..4).prop_map(|(a, len)| (r(a, 2), r(a + len, 2)));
        let point = (-8i64..8, 0i64..4).prop_map(|(l, p)| pt(r(l, 2), r(p, 4)));
        (
            prop::collection::vec(interval, 0..4),
            prop::collection::vec(point, 0..4),
            any::<bool>(),
        )
            .prop_map(|(radial, points, zero)| SpectralSet::from_parts(radial, points, zero))
    }

    fn is_normal(s: &SpectralSet<Rational>) -> bool {
        s.radial().windows(2).all(|w| w[0].1 < w[1].0)
            && s.radial().iter().all(|(a, b)| a <= b)
            && s.points().windows(2).all(|w| w[0] < w[1])
            && s.points().iter().all(|p| !s.contains_radius(p.logmod()))
    }

    proptest! {
        #[test]
        fn union_laws(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert_eq!(a.union(&b), b.union(&a));
            prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
            prop_assert_eq!(a.union(&a), a.clone());
            prop_assert!(a.is_subset(&a.union(&b)));
            prop_assert!(is_normal(&a.union(&b)));
            prop_assert!(is_normal(&a.intersection(&b)));
        }

        #[test]
        fn intersection_is_contained_in_both(a in arb_set(), b in arb_set()) {
            let i = a.intersection(&b);
            prop_assert!(i.is_subset(&a));
            prop_assert!(i.is_subset(&b));
            prop_assert_eq!(i, b.intersection(&a));
        }

        #[test]
        fn membership_agrees_with_set_operations(a in arb_set(), b in arb_set(), l in -10i64..10, p in 0i64..4) {
            let z = Lambda::polar(r(l, 2), r(p, 4));
            prop_assert_eq!(a.union(&b).contains(&z), a.contains(&z) || b.contains(&z));
            prop_assert_eq!(a.intersection(&b).contains(&z), a.contains(&z) && b.contains(&z));
            if a.is_subset(&b) && a.contains(&z) {
                prop_assert!(b.contains(&z));
            }
        }
    }
}
