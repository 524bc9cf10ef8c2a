//! Finite groups as multiplication tables, with homomorphisms and the
//! little structure theory the cocycle enumerations need.

use crate::error::DescentError;
use crate::exact::FgAb;
use num_bigint::BigInt;

/// Finite group given by its full multiplication table. Element 0 is the
/// identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteGroup {
    pub name: String,
    pub mul: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn from_table(name: &str, mul: Vec<Vec<usize>>) -> Result<Self, DescentError> {
        let n = mul.len();
        for row in &mul {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(DescentError::Invalid("malformed multiplication table".into()));
            }
        }
        // identity must be element 0
        for a in 0..n {
            if mul[0][a] != a || mul[a][0] != a {
                return Err(DescentError::Invalid("element 0 is not an identity".into()));
            }
        }
        // associativity and inverses
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a][b] == 0 {
                    inv[a] = b;
                }
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(DescentError::Invalid(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        if inv.iter().any(|&x| x == usize::MAX) {
            return Err(DescentError::Invalid("missing inverses".into()));
        }
        Ok(FiniteGroup { name: name.to_string(), mul, inv })
    }

    pub fn trivial() -> Self {
        FiniteGroup { name: "1".into(), mul: vec![vec![0]], inv: vec![0] }
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        FiniteGroup { name: if n == 1 { "1".into() } else { format!("Z/{n}") }, mul, inv }
    }

    /// Symmetric group on three letters; elements are permutations of 0,1,2
    /// listed identity-first.
    pub fn s3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
        ];
        let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
            // (p o q)(x) = p(q(x))
            [p[q[0]], p[q[1]], p[q[2]]]
        };
        let idx = |r: &[usize; 3]| perms.iter().position(|p| p == r).unwrap();
        let mul: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| perms.iter().map(|q| idx(&compose(p, q))).collect())
            .collect();
        let inv = perms
            .iter()
            .map(|p| {
                let mut r = [0usize; 3];
                for (i, &pi) in p.iter().enumerate() {
                    r[pi] = i;
                }
                idx(&r)
            })
            .collect();
        FiniteGroup { name: "S3".into(), mul, inv }
    }

    pub fn product(&self, other: &FiniteGroup) -> FiniteGroup {
        let n = self.order();
        let m = other.order();
        let code = |a: usize, b: usize| a * m + b;
        let mul = (0..n * m)
            .map(|x| {
                let (a1, b1) = (x / m, x % m);
                (0..n * m)
                    .map(|y| {
                        let (a2, b2) = (y / m, y % m);
                        code(self.mul[a1][a2], other.mul[b1][b2])
                    })
                    .collect()
            })
            .collect();
        let inv = (0..n * m)
            .map(|x| code(self.inv[x / m], other.inv[x % m]))
            .collect();
        FiniteGroup { name: format!("{}x{}", self.name, other.name), mul, inv }
    }

    /// n-fold direct power.
    pub fn power(&self, n: usize) -> FiniteGroup {
        let mut g = FiniteGroup::trivial();
        for _ in 0..n {
            g = g.product(self);
        }
        g
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    pub fn elem_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    pub fn conjugacy_class_count(&self) -> usize {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut classes = 0;
        for a in 0..n {
            if seen[a] {
                continue;
            }
            classes += 1;
            for g in 0..n {
                let c = self.mul[self.mul[g][a]][self.inv[g]];
                seen[c] = true;
            }
        }
        classes
    }

    /// Invariant factors of a finite abelian table group, found by checking
    /// candidate divisor chains against element-order counts.
    pub fn invariant_factors(&self) -> Option<FgAb> {
        if !self.is_abelian() {
            return None;
        }
        let n = self.order();
        if n == 1 {
            return Some(FgAb::zero());
        }
        let count_div = |m: usize| (0..n).filter(|&a| self.elem_order(a) <= m && m % self.elem_order(a) == 0).count();
        let mut chains: Vec<Vec<usize>> = vec![];
        divisor_chains(n, n, &mut vec![], &mut chains);
        'chain: for chain in chains {
            for m in 1..=n {
                let expect: usize = chain.iter().map(|&d| num_integer::gcd(d, m)).product();
                if count_div(m) != expect {
                    continue 'chain;
                }
            }
            let diag: Vec<BigInt> = chain.iter().map(|&d| BigInt::from(d)).collect();
            return Some(FgAb::from_diagonal(&diag));
        }
        None
    }
}

fn divisor_chains(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 1 {
        out.push(cur.clone());
        return;
    }
    let mut d = 2;
    while d <= n.min(max) {
        if n % d == 0 {
            cur.push(d);
            divisor_chains(n / d, d, cur, out);
            cur.pop();
        }
        d += 1;
    }
}

/// Group homomorphism as an element map.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupHom {
    pub map: Vec<usize>,
}

impl GroupHom {
    pub fn new(src: &FiniteGroup, tgt: &FiniteGroup, map: Vec<usize>) -> Result<Self, DescentError> {
        if map.len() != src.order() || map.iter().any(|&x| x >= tgt.order()) {
            return Err(DescentError::Invalid("hom map has wrong shape".into()));
        }
        for a in 0..src.order() {
            for b in 0..src.order() {
                if map[src.mul[a][b]] != tgt.mul[map[a]][map[b]] {
                    return Err(DescentError::Invalid(format!(
                        "not a homomorphism at ({a},{b})"
                    )));
                }
            }
        }
        Ok(GroupHom { map })
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        GroupHom { map: (0..g.order()).collect() }
    }

    pub fn compose(&self, inner: &GroupHom) -> GroupHom {
        GroupHom { map: inner.map.iter().map(|&x| self.map[x]).collect() }
    }

    pub fn is_isomorphism(&self, src: &FiniteGroup, tgt: &FiniteGroup) -> bool {
        if src.order() != tgt.order() {
            return false;
        }
        let mut seen = vec![false; tgt.order()];
        for &x in &self.map {
            if seen[x] {
                return false;
            }
            seen[x] = true;
        }
        true
    }
}

/// Subgroup of `g` induced on a subset closed under the operations; elements
/// are re-indexed in the given order.
pub fn subgroup(g: &FiniteGroup, elems: &[usize]) -> Result<FiniteGroup, DescentError> {
    let pos: std::collections::BTreeMap<usize, usize> =
        elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    if !pos.contains_key(&0) {
        return Err(DescentError::Invalid("subgroup must contain the identity".into()));
    }
    let mut mul = vec![vec![0usize; elems.len()]; elems.len()];
    for (i, &a) in elems.iter().enumerate() {
        for (j, &b) in elems.iter().enumerate() {
            let c = g.mul[a][b];
            let Some(&k) = pos.get(&c) else {
                return Err(DescentError::Invalid("subset not closed under product".into()));
            };
            mul[i][j] = k;
        }
    }
    // reorder so that identity is index 0
    let id_at = pos[&0];
    if id_at != 0 {
        let mut order: Vec<usize> = (0..elems.len()).collect();
        order.swap(0, id_at);
        let remap: Vec<usize> = {
            let mut r = vec![0; elems.len()];
            for (new, &old) in order.iter().enumerate() {
                r[old] = new;
            }
            r
        };
        let mut mul2 = vec![vec![0usize; elems.len()]; elems.len()];
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                mul2[remap[i]][remap[j]] = remap[mul[i][j]];
            }
        }
        mul = mul2;
    }
    FiniteGroup::from_table(&format!("{}-sub", g.name), mul)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_structure() {
        let g = FiniteGroup::s3();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.conjugacy_class_count(), 3);
    }

    #[test]
    fn cyclic_and_products() {
        let z6 = FiniteGroup::cyclic(6);
        assert_eq!(z6.invariant_factors().unwrap(), FgAb::cyclic(6));
        let v4 = FiniteGroup::cyclic(2).product(&FiniteGroup::cyclic(2));
        let f = v4.invariant_factors().unwrap();
        assert_eq!(f.torsion, vec![BigInt::from(2), BigInt::from(2)]);
        assert!(FiniteGroup::s3().invariant_factors().is_none());
    }

    #[test]
    fn homs_validated() {
        let z4 = FiniteGroup::cyclic(4);
        let z2 = FiniteGroup::cyclic(2);
        assert!(GroupHom::new(&z4, &z2, vec![0, 1, 0, 1]).is_ok());
        assert!(GroupHom::new(&z4, &z2, vec![0, 1, 1, 0]).is_err());
    }
}
