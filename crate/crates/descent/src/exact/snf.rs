use super::matrix::IntMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Smith normal form `u * m * v = d` with `u`, `v` unimodular and `d`
/// diagonal with a divisibility chain. `u_inv` is the inverse of `u`,
/// kept so that image bases can be read off without solving.
#[derive(Debug)]
pub struct Smith {
    pub d: IntMat,
    pub u: IntMat,
    pub u_inv: IntMat,
    pub v: IntMat,
}

fn swap_rows(m: &mut IntMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols {
        let x = m.get(a, j).clone();
        let y = m.get(b, j).clone();
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

fn swap_cols(m: &mut IntMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows {
        let x = m.get(i, a).clone();
        let y = m.get(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

// row a += c * row b
fn row_axpy(m: &mut IntMat, a: usize, b: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    for j in 0..m.cols {
        let v = m.get(a, j) + c * m.get(b, j);
        m.set(a, j, v);
    }
}

fn col_axpy(m: &mut IntMat, a: usize, b: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    for i in 0..m.rows {
        let v = m.get(i, a) + c * m.get(i, b);
        m.set(i, a, v);
    }
}

fn negate_row(m: &mut IntMat, a: usize) {
    for j in 0..m.cols {
        let v = -(m.get(a, j).clone());
        m.set(a, j, v);
    }
}

/// Smith normal form by minimal-pivot elimination with gcd reduction.
pub fn smith_normal_form(m: &IntMat) -> Smith {
    let mut d = m.clone();
    let mut u = IntMat::identity(m.rows);
    let mut u_inv = IntMat::identity(m.rows);
    let mut v = IntMat::identity(m.cols);

    let rank_bound = m.rows.min(m.cols);
    let mut t = 0usize;
    while t < rank_bound {
        // find the nonzero entry of minimal absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        let mut best: Option<BigInt> = None;
        for i in t..d.rows {
            for j in t..d.cols {
                let a = d.get(i, j).abs();
                if !a.is_zero() && (best.is_none() || a < *best.as_ref().unwrap()) {
                    best = Some(a);
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            None => break,
            Some(p) => p,
        };
        swap_rows(&mut d, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut u_inv, t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        if d.get(t, t).is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
            for i in 0..u_inv.rows {
                let x = -(u_inv.get(i, t).clone());
                u_inv.set(i, t, x);
            }
        }

        // clear the rest of row/column t; restart if a remainder got smaller
        let mut clean = true;
        for i in (t + 1)..d.rows {
            let q = -(d.get(i, t).div_floor(d.get(t, t)));
            row_axpy(&mut d, i, t, &q);
            row_axpy(&mut u, i, t, &q);
            // inverse gets the opposite column operation
            let nq = -q;
            col_axpy(&mut u_inv, t, i, &nq);
            if !d.get(i, t).is_zero() {
                clean = false;
            }
        }
        for j in (t + 1)..d.cols {
            let q = -(d.get(t, j).div_floor(d.get(t, t)));
            col_axpy(&mut d, j, t, &q);
            col_axpy(&mut v, j, t, &q);
            if !d.get(t, j).is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }

        // force divisibility of the remaining block by the pivot
        let p = d.get(t, t).clone();
        let mut bad: Option<usize> = None;
        'scan: for i in (t + 1)..d.rows {
            for j in (t + 1)..d.cols {
                if !d.get(i, j).mod_floor(&p).is_zero() {
                    bad = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = bad {
            // fold row i into row t and re-run this pivot step
            row_axpy(&mut d, t, i, &BigInt::from(1));
            row_axpy(&mut u, t, i, &BigInt::from(1));
            col_axpy(&mut u_inv, i, t, &BigInt::from(-1));
            continue;
        }
        t += 1;
    }
    Smith { d, u, u_inv, v }
}

impl Smith {
    /// Diagonal entries (invariant factors first, then zeros).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Determinant of a square matrix via fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMat) -> BigInt {
    assert_eq!(m.rows, m.cols);
    bareiss_det(m.clone())
}

fn bareiss_det(mut a: IntMat) -> BigInt {
    use num_traits::One;
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            let swap = (k + 1..n).find(|&i| !a.get(i, k).is_zero());
            match swap {
                None => return BigInt::zero(),
                Some(i) => {
                    swap_rows(&mut a, k, i);
                    sign = -sign;
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j);
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                a.set(i, j, q);
            }
        }
        prev = a.get(k, k).clone();
    }
    sign * a.get(n - 1, n - 1).clone()
}

/// Basis for the integer kernel of `m` (as a map Z^cols -> Z^rows),
/// returned as columns.
pub fn kernel_basis(m: &IntMat) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(m);
    let r = s.rank();
    (r..m.cols).map(|j| s.v.column(j)).collect()
}

/// Basis for the image lattice of `m` inside Z^rows, returned as columns.
pub fn image_basis(m: &IntMat) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(m);
    let r = s.rank();
    (0..r)
        .map(|i| {
            let di = s.d.get(i, i).clone();
            let col = s.u_inv.column(i);
            col.into_iter().map(|x| x * &di).collect()
        })
        .collect()
}

/// Solve m * x = b over the integers; None when no integral solution exists.
pub fn solve(m: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows);
    let s = smith_normal_form(m);
    let c = s.u.apply(b);
    let r = s.rank();
    let mut y = vec![BigInt::zero(); m.cols];
    for i in 0..m.rows.min(m.cols).max(r) {
        if i < r {
            let di = s.d.get(i, i);
            let (q, rem) = c[i].div_rem(di);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    for (i, ci) in c.iter().enumerate().skip(r) {
        if i >= r && !ci.is_zero() {
            return None;
        }
    }
    Some(s.v.apply(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn check_snf(m: &IntMat) {
        let s = smith_normal_form(m);
        assert_eq!(&s.u.mul(m).mul(&s.v), &s.d, "U*M*V != D");
        assert_eq!(s.u.mul(&s.u_inv), IntMat::identity(m.rows));
        let du = determinant(&s.u);
        let dv = determinant(&s.v);
        assert!(du.abs().is_one() && dv.abs().is_one(), "transforms not unimodular");
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "no divisibility chain: {:?}", diag);
            }
        }
    }

    #[test]
    fn snf_small_example() {
        let m = IntMat::from_rows(&[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        check_snf(&m);
    }

    #[test]
    fn snf_identity_and_zero() {
        let m = IntMat::identity(3);
        let s = smith_normal_form(&m);
        assert_eq!(s.d, IntMat::identity(3));
        let z = IntMat::zero(2, 3);
        let s = smith_normal_form(&z);
        assert!(s.d.is_zero());
        check_snf(&m);
        check_snf(&z);
    }

    #[test]
    fn snf_random_matrices() {
        // deterministic pseudo-random fill
        let mut seed: i64 = 12345;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) % 7 - 3
        };
        for rows in 1..5usize {
            for cols in 1..5usize {
                let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| next()).collect()).collect();
                check_snf(&IntMat::from_rows(&data));
            }
        }
    }

    #[test]
    fn kernel_and_image() {
        let m = IntMat::from_rows(&[vec![1, 1, 0], vec![0, 0, 0]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for col in &k {
            assert!(m.apply(col).iter().all(|x| x.is_zero()));
        }
        let im = image_basis(&m);
        assert_eq!(im.len(), 1);
    }

    #[test]
    fn solve_works() {
        let m = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        let b = vec![BigInt::from(4), BigInt::from(9)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.apply(&x), b);
        let b2 = vec![BigInt::from(1), BigInt::from(0)];
        assert!(solve(&m, &b2).is_none());
    }
}
