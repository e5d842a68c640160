use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

/// Integer Laurent polynomial in `q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Laurent {
    terms: BTreeMap<i64, i64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn one() -> Self {
        Laurent::monomial(1, 0)
    }

    pub fn monomial(coefficient: i64, exponent: i64) -> Self {
        let mut p = Laurent::zero();
        p.add_term(coefficient, exponent);
        p
    }

    /// `q + q^-1`.
    pub fn circle() -> Self {
        &Laurent::monomial(1, 1) + &Laurent::monomial(1, -1)
    }

    pub fn add_term(&mut self, coefficient: i64, exponent: i64) {
        if coefficient == 0 {
            return;
        }
        let c = self.terms.entry(exponent).or_insert(0);
        *c += coefficient;
        if *c == 0 {
            self.terms.remove(&exponent);
        }
    }

    pub fn coefficient(&self, exponent: i64) -> i64 {
        self.terms.get(&exponent).copied().unwrap_or(0)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pow(&self, k: u32) -> Laurent {
        (0..k).fold(Laurent::one(), |acc, _| &acc * self)
    }

    pub fn shift(&self, by: i64) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(e, c)| (e + by, *c)).collect() }
    }
}

impl Add for &Laurent {
    type Output = Laurent;

    fn add(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(c, e);
        }
        out
    }
}

impl Mul for &Laurent {
    type Output = Laurent;

    fn mul(self, rhs: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(c1 * c2, e1 + e2);
            }
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;

    fn neg(self) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

/// Increasing exponents: `q^-1 + 2 - q^3`.
impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let magnitude = c.unsigned_abs();
            match (i, c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (magnitude, e) {
                (m, 0) => write!(f, "{m}")?,
                (1, 1) => f.write_str("q")?,
                (1, e) => write!(f, "q^{e}")?,
                (m, 1) => write!(f, "{m}q")?,
                (m, e) => write!(f, "{m}q^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        let mut p = Laurent::zero();
        p.add_term(1, 1);
        p.add_term(1, 5);
        p.add_term(-1, 7);
        assert_eq!(p.to_string(), "q + q^5 - q^7");
        assert_eq!(Laurent::circle().to_string(), "q^-1 + q");
        assert_eq!((&Laurent::monomial(-2, 0) + &Laurent::monomial(3, -2)).to_string(), "3q^-2 - 2");
        assert_eq!(Laurent::zero().to_string(), "0");
    }

    #[test]
    fn binomial_powers() {
        let p = Laurent::circle().pow(3);
        assert_eq!(p.coefficient(3), 1);
        assert_eq!(p.coefficient(1), 3);
        assert_eq!(p.coefficient(-1), 3);
        assert_eq!(p.coefficient(0), 0);
        let cancel = &p + &(-&p);
        assert!(cancel.is_zero());
        assert_eq!(Laurent::one().shift(-4), Laurent::monomial(1, -4));
    }
}
