//! Multiset-intersection similarity between two labeled graphs.
//!
//! All intermediate values are exact rationals. Percentages are rendered to
//! two decimals, rounding half away from zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::graph::{LabelMultiset, LabeledGraph, node_multiset};

pub type Rational = BigRational;

/// Entries of `n1`, at their multiplicity in `n1`, whose label occurs in `n2`.
///
/// Not symmetric: `filter_intersection(a, b)` and `filter_intersection(b, a)`
/// share a support but generally differ in cardinality.
pub fn filter_intersection(n1: &LabelMultiset, n2: &LabelMultiset) -> LabelMultiset {
    n1.iter()
        .filter(|(label, _)| n2.contains(label))
        .map(|(label, count)| (label.clone(), count))
        .collect()
}

/// |i| / |n|, or zero when `n` is empty.
pub fn percent_intersection(i: &LabelMultiset, n: &LabelMultiset) -> Rational {
    ratio(i.cardinality(), n.cardinality())
}

pub fn percentages_distance(p1: &Rational, p2: &Rational) -> Rational {
    (p1 - p2).abs()
}

pub fn lower_bound(p1: &Rational, p2: &Rational, eta: &Rational) -> Rational {
    (p1.min(p2) - eta).abs()
}

fn ratio(num: u64, den: u64) -> Rational {
    if den == 0 {
        Rational::zero()
    } else {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// A fraction rendered as a percentage in hundredths of a percent.
pub fn hundredths(r: &Rational) -> BigInt {
    (r * Rational::from_integer(BigInt::from(10_000))).round().to_integer()
}

/// Formats a hundredths-of-a-percent integer as `"64.21"`.
pub fn format_hundredths(h: &BigInt) -> String {
    let sign = if h.is_negative() { "-" } else { "" };
    let abs = h.abs();
    let hundred = BigInt::from(100);
    format!("{sign}{}.{:02}", &abs / &hundred, &abs % &hundred)
}

/// Two-decimal percentage text of `r`, without the `%` sign.
pub fn render_percent(r: &Rational) -> String {
    format_hundredths(&hundredths(r))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityReport {
    pub n1_card: u64,
    pub n2_card: u64,
    pub i1_card: u64,
    pub i2_card: u64,
    pub p1: Rational,
    pub p2: Rational,
    pub eta: Rational,
    pub lower: Rational,
    pub range_lo: Rational,
    pub range_hi: Rational,
    pub average: Rational,
}

impl SimilarityReport {
    /// Builds a report from the four cardinalities alone.
    pub fn from_cardinalities(n1: u64, n2: u64, i1: u64, i2: u64) -> Self {
        let p1 = ratio(i1, n1);
        let p2 = ratio(i2, n2);
        let eta = percentages_distance(&p1, &p2);
        let lower = lower_bound(&p1, &p2, &eta);
        let hi = p1.clone().min(p2.clone());
        let average = (&lower + &hi) / Rational::from_integer(BigInt::from(2));
        SimilarityReport {
            n1_card: n1,
            n2_card: n2,
            i1_card: i1,
            i2_card: i2,
            p1,
            p2,
            eta,
            range_lo: lower.clone(),
            lower,
            range_hi: hi,
            average,
        }
    }

    /// The average as displayed: midpoint of the two displayed range ends,
    /// rounded half away from zero, in hundredths of a percent.
    ///
    /// This can differ by one hundredth from rounding the exact average
    /// (382/595 is 64.201..%, shown as 64.21%).
    pub fn average_hundredths(&self) -> BigInt {
        let sum = hundredths(&self.range_lo) + hundredths(&self.range_hi);
        let half = Rational::new(sum, BigInt::from(2));
        half.round().to_integer()
    }

    pub fn p1_percent(&self) -> String {
        render_percent(&self.p1)
    }

    pub fn p2_percent(&self) -> String {
        render_percent(&self.p2)
    }

    pub fn eta_percent(&self) -> String {
        render_percent(&self.eta)
    }

    pub fn lower_percent(&self) -> String {
        render_percent(&self.lower)
    }

    pub fn range_lo_percent(&self) -> String {
        render_percent(&self.range_lo)
    }

    pub fn range_hi_percent(&self) -> String {
        render_percent(&self.range_hi)
    }

    pub fn average_percent(&self) -> String {
        format_hundredths(&self.average_hundredths())
    }
}

pub fn similarity_report(n1: &LabelMultiset, n2: &LabelMultiset) -> SimilarityReport {
    let i1 = filter_intersection(n1, n2);
    let i2 = filter_intersection(n2, n1);
    SimilarityReport::from_cardinalities(n1.cardinality(), n2.cardinality(), i1.cardinality(), i2.cardinality())
}

/// Compares the node multisets of two graphs.
pub fn compare_graphs<A: LabeledGraph + ?Sized, B: LabeledGraph + ?Sized>(a: &A, b: &B) -> SimilarityReport {
    similarity_report(&node_multiset(a), &node_multiset(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Label;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn ms(entries: &[(&str, u64)]) -> LabelMultiset {
        entries.iter().map(|(l, c)| (Label::new(*l).unwrap(), *c)).collect()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn filter_keeps_own_multiplicity() {
        let got = filter_intersection(&ms(&[("a", 2), ("b", 1)]), &ms(&[("a", 1), ("c", 3)]));
        assert_eq!(got, ms(&[("a", 2)]));
    }

    #[test]
    fn filter_of_identical_sets_is_identity() {
        let m = ms(&[("x", 3), ("y", 1)]);
        assert_eq!(filter_intersection(&m, &m), m);
    }

    #[test]
    fn percent_of_empty_base_is_zero() {
        assert_eq!(percent_intersection(&LabelMultiset::new(), &LabelMultiset::new()), Rational::zero());
    }

    #[test]
    fn spt_pair_steps() {
        let r = SimilarityReport::from_cardinalities(68, 35, 44, 23);
        assert_eq!(r.p1, q(11, 17));
        assert_eq!(r.p2, q(23, 35));
        assert_eq!(r.eta, q(6, 595));
        assert_eq!(r.lower, q(379, 595));
        assert_eq!(r.average, q(382, 595));
        assert_eq!(r.p1_percent(), "64.71");
        assert_eq!(r.p2_percent(), "65.71");
        assert_eq!(r.range_lo_percent(), "63.70");
        assert_eq!(r.range_hi_percent(), "64.71");
        assert_eq!(r.average_percent(), "64.21");
        // The exact average alone would display as 64.20.
        assert_eq!(render_percent(&r.average), "64.20");
    }

    #[test]
    fn psg_pair_steps() {
        let r = SimilarityReport::from_cardinalities(24, 27, 17, 19);
        assert_eq!(r.eta, q(1, 216));
        assert_eq!(r.lower, q(151, 216));
        assert_eq!(r.average, q(303, 432));
        assert_eq!(r.range_lo_percent(), "69.91");
        assert_eq!(r.range_hi_percent(), "70.37");
        assert_eq!(r.average_percent(), "70.14");
    }

    #[test]
    fn lower_bound_of_identical_is_one() {
        let one = q(1, 1);
        assert_eq!(lower_bound(&one, &one, &Rational::zero()), one);
    }

    #[test]
    fn lower_bound_takes_absolute_value() {
        // eta larger than min: 1/10 vs 9/10
        let (a, b) = (q(1, 10), q(9, 10));
        let eta = percentages_distance(&a, &b);
        assert_eq!(lower_bound(&a, &b, &eta), q(7, 10));
    }

    #[test]
    fn rendering_rounds_half_away_from_zero() {
        assert_eq!(render_percent(&q(1, 80000)), "0.00");
        assert_eq!(render_percent(&q(1, 20000)), "0.01");
        assert_eq!(render_percent(&q(1, 1)), "100.00");
        assert_eq!(format_hundredths(&BigInt::from(-5)), "-0.05");
    }

    #[test]
    fn self_similarity_report() {
        let m = ms(&[("a", 2), ("b", 5)]);
        let r = similarity_report(&m, &m);
        assert_eq!(r.average_percent(), "100.00");
        assert_eq!(r.lower, q(1, 1));
    }

    fn oracle(n1: &BTreeMap<String, u64>, n2: &BTreeMap<String, u64>) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for (label, count) in n1 {
            let mut seen = false;
            for other in n2.keys() {
                if other == label {
                    seen = true;
                }
            }
            if seen {
                out.insert(label.clone(), *count);
            }
        }
        out
    }

    fn to_ms(m: &BTreeMap<String, u64>) -> LabelMultiset {
        m.iter().map(|(l, c)| (Label::new(l.clone()).unwrap(), *c)).collect()
    }

    fn raw() -> impl Strategy<Value = BTreeMap<String, u64>> {
        prop::collection::btree_map("[a-f]{1,2}", 1u64..5, 0..12)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn filter_matches_oracle(a in raw(), b in raw()) {
            prop_assert_eq!(filter_intersection(&to_ms(&a), &to_ms(&b)), to_ms(&oracle(&a, &b)));
        }
    }

    proptest! {
        #[test]
        fn swap_preserves_summary(a in raw(), b in raw()) {
            let (x, y) = (similarity_report(&to_ms(&a), &to_ms(&b)), similarity_report(&to_ms(&b), &to_ms(&a)));
            prop_assert_eq!(&x.p1, &y.p2);
            prop_assert_eq!(x.i1_card, y.i2_card);
            prop_assert_eq!(&x.eta, &y.eta);
            prop_assert_eq!(&x.lower, &y.lower);
            prop_assert_eq!(&x.range_hi, &y.range_hi);
            prop_assert_eq!(&x.average, &y.average);
        }

        #[test]
        fn bounds_hold(a in raw(), b in raw()) {
            let r = similarity_report(&to_ms(&a), &to_ms(&b));
            let one = q(1, 1);
            prop_assert!(r.eta >= Rational::zero() && r.eta <= one);
            if r.eta <= r.range_hi {
                prop_assert!(r.lower >= Rational::zero() && r.lower <= r.range_hi);
            }
            prop_assert!(r.range_hi <= one);
            prop_assert_eq!(&r.average * q(2, 1), &r.range_lo + &r.range_hi);
        }

        #[test]
        fn self_and_disjoint(a in raw()) {
            prop_assume!(!a.is_empty());
            let m = to_ms(&a);
            prop_assert_eq!(similarity_report(&m, &m).average, q(1, 1));
            let other: BTreeMap<String, u64> = a.iter().map(|(l, c)| (format!("Z{l}"), *c)).collect();
            let d = similarity_report(&m, &to_ms(&other));
            prop_assert!(d.average.is_zero() && d.eta.is_zero() && d.p1.is_zero());
        }
    }
}
