use std::cmp::Ordering;
use std::fmt;

/// Non-negative dyadic rational `num / 2^exp`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: u64, exp: u32) -> Self {
        assert!(exp < 64, "dyadic exponent out of range");
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator_exp(&self) -> u32 {
        self.exp
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.exp as f64).exp2()
    }

    /// Numerator over the common denominator `2^exp` (`exp` must be at least
    /// `self`'s exponent).
    fn scaled(&self, exp: u32) -> u128 {
        (self.num as u128) << (exp - self.exp)
    }

    pub fn checked_add(self, other: Dyadic) -> Option<Dyadic> {
        let exp = self.exp.max(other.exp);
        let sum = self.scaled(exp) + other.scaled(exp);
        u64::try_from(sum).ok().map(|n| Dyadic::new(n, exp))
    }

    pub fn checked_sub(self, other: Dyadic) -> Option<Dyadic> {
        let exp = self.exp.max(other.exp);
        let a = self.scaled(exp);
        let b = other.scaled(exp);
        (a >= b).then(|| Dyadic::new((a - b) as u64, exp))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.scaled(exp).cmp(&other.scaled(exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_prints() {
        assert_eq!(Dyadic::new(12, 5).to_string(), "3/8");
        assert_eq!(Dyadic::new(32, 5).to_string(), "1");
        assert_eq!(Dyadic::new(0, 9), Dyadic::ZERO);
    }

    #[test]
    fn arithmetic_and_order() {
        let a = Dyadic::new(3, 3);
        let b = Dyadic::new(5, 5);
        assert_eq!(a.checked_add(b).unwrap(), Dyadic::new(17, 5));
        assert_eq!(a.checked_sub(b).unwrap(), Dyadic::new(7, 5));
        assert!(b.checked_sub(a).is_none());
        assert!(b < a);
        assert_eq!(a.to_f64(), 0.375);
    }
}
