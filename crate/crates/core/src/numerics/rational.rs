use num_rational::Ratio;

/// Exact rational, always normalized (lowest terms, positive denominator).
pub type Rational = Ratio<i64>;

/// Shorthand for `num / den`; panics on a zero denominator.
pub fn rational(num: i64, den: i64) -> Rational {
    Ratio::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalized_on_construction() {
        let r = rational(4, -6);
        assert_eq!(*r.numer(), -2);
        assert_eq!(*r.denom(), 3);
        assert_eq!(rational(2, 3).to_string(), "2/3");
        assert_eq!(rational(3, 1).to_string(), "3");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn sum_matches_cross_multiplication(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
            let s = rational(a, b) + rational(c, d);
            // (a/b + c/d) = (ad + cb) / bd
            prop_assert_eq!(*s.numer() * (b * d), (a * d + c * b) * *s.denom());
            prop_assert!(*s.denom() > 0);
            prop_assert_eq!(num_integer_gcd(*s.numer(), *s.denom()), 1);
        }
    }

    fn num_integer_gcd(mut a: i64, mut b: i64) -> i64 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        if a == 0 { 1 } else { a }
    }
}
