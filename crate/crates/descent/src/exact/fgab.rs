use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// Finitely generated abelian group in invariant-factor form:
/// Z^rank + Z/d1 + ... + Z/dk with d1 | d2 | ... and each di >= 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FgAb {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAb {
    pub fn zero() -> Self {
        FgAb { rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FgAb { rank, torsion: vec![] }
    }

    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 2);
        FgAb { rank: 0, torsion: vec![BigInt::from(n)] }
    }

    /// Build from a list of diagonal entries (zeros mean free summands,
    /// units are dropped). Entries need not be ordered or form a chain;
    /// they are renormalized into one.
    pub fn from_diagonal(diag: &[BigInt]) -> Self {
        let mut rank = 0usize;
        let mut torsion: Vec<BigInt> = vec![];
        for d in diag {
            if d.is_zero() {
                rank += 1;
            } else {
                let a = if d < &BigInt::zero() { -d.clone() } else { d.clone() };
                if !a.is_one() {
                    torsion.push(a);
                }
            }
        }
        FgAb { rank, torsion: normalize_factors(torsion) }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.rank > 0 {
            return None;
        }
        let mut n = BigInt::one();
        for t in &self.torsion {
            n *= t;
        }
        Some(n)
    }

    /// Tensor product over the integers, on invariant factors.
    pub fn tensor(&self, other: &FgAb) -> FgAb {
        use num_integer::Integer;
        let mut diag: Vec<BigInt> = vec![];
        // Z^r (x) other = other^r
        for _ in 0..(self.rank * other.rank) {
            diag.push(BigInt::zero());
        }
        for t in &other.torsion {
            for _ in 0..self.rank {
                diag.push(t.clone());
            }
        }
        for s in &self.torsion {
            for _ in 0..other.rank {
                diag.push(s.clone());
            }
            for t in &other.torsion {
                diag.push(s.gcd(t));
            }
        }
        FgAb::from_diagonal(&diag)
    }

    /// Tor_1 over the integers, on invariant factors.
    pub fn tor(&self, other: &FgAb) -> FgAb {
        use num_integer::Integer;
        let mut diag: Vec<BigInt> = vec![];
        for s in &self.torsion {
            for t in &other.torsion {
                diag.push(s.gcd(t));
            }
        }
        FgAb::from_diagonal(&diag)
    }

    /// Direct sum, renormalizing the invariant factors.
    pub fn direct_sum(&self, other: &FgAb) -> FgAb {
        let mut diag: Vec<BigInt> = vec![];
        diag.extend(self.torsion.iter().cloned());
        diag.extend(other.torsion.iter().cloned());
        let g = normalize_factors(diag);
        FgAb { rank: self.rank + other.rank, torsion: g }
    }
}

/// Renormalize an arbitrary multiset of moduli into a divisibility chain.
fn normalize_factors(mut v: Vec<BigInt>) -> Vec<BigInt> {
    use num_integer::Integer;
    v.retain(|x| !x.is_one());
    loop {
        let mut changed = false;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                let a = v[i].clone();
                let b = v[j].clone();
                if (&b % &a).is_zero() {
                    continue;
                }
                let g = a.gcd(&b);
                let l = &a / &g * &b;
                v[i] = g;
                v[j] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    v.retain(|x| !x.is_one());
    v.sort();
    v
}

impl fmt::Display for FgAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = vec![];
        if self.rank == 1 {
            parts.push("Z".to_string());
        } else if self.rank > 1 {
            parts.push(format!("Z^{}", self.rank));
        }
        for t in &self.torsion {
            parts.push(format!("Z/{}", t));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(FgAb::zero().to_string(), "0");
        assert_eq!(FgAb::free(1).to_string(), "Z");
        assert_eq!(FgAb::free(2).to_string(), "Z^2");
        assert_eq!(FgAb::cyclic(2).to_string(), "Z/2");
        assert_eq!(
            FgAb { rank: 1, torsion: vec![BigInt::from(2), BigInt::from(4)] }.to_string(),
            "Z + Z/2 + Z/4"
        );
    }

    #[test]
    fn sum_renormalizes() {
        // Z/2 + Z/3 = Z/6
        let a = FgAb::cyclic(2);
        let b = FgAb::cyclic(3);
        assert_eq!(a.direct_sum(&b), FgAb::cyclic(6));
        // Z/2 + Z/2 stays Z/2 + Z/2
        let c = FgAb::cyclic(2). direct_sum(&FgAb::cyclic(2));
        assert_eq!(c.torsion, vec![BigInt::from(2), BigInt::from(2)]);
    }
}
