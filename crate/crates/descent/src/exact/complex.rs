use super::fgab::FgAb;
use super::matrix::IntMat;
use super::snf::{kernel_basis, smith_normal_form, solve};
use crate::error::DescentError;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Display orientation for a complex of free abelian groups.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    /// differentials lower the degree
    Homological,
    /// differentials raise the degree
    Cohomological,
}

/// Bounded complex of finitely generated free abelian groups.
///
/// Internally the differential `d[k]` maps degree `lo + k + 1` to degree
/// `lo + k`; a cohomological complex is stored the same way with degrees
/// negated on input and output, so `homology(i)` always answers in the
/// caller's grading.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub lo: i64,
    pub dims: Vec<usize>,
    pub diffs: Vec<IntMat>,
    pub orientation: Orientation,
}

impl ChainComplex {
    /// Build a homological complex from component dimensions and
    /// differentials `d_k : C_{lo+k} -> C_{lo+k-1}` for k = 1..dims.len()-1.
    pub fn homological(lo: i64, dims: Vec<usize>, diffs: Vec<IntMat>) -> Result<Self, DescentError> {
        let c = ChainComplex { lo, dims, diffs, orientation: Orientation::Homological };
        c.validate()?;
        Ok(c)
    }

    /// Build a cohomological complex; `dims[k]` is the component in degree
    /// `lo + k` and `diffs[k]` maps degree `lo + k` to `lo + k + 1`.
    pub fn cohomological(lo: i64, dims: Vec<usize>, diffs: Vec<IntMat>) -> Result<Self, DescentError> {
        // store reversed so that stored diffs lower the internal index
        let n = dims.len();
        let rdims: Vec<usize> = dims.iter().rev().cloned().collect();
        let rdiffs: Vec<IntMat> = diffs.into_iter().rev().collect();
        let hi = lo + n as i64 - 1;
        let c = ChainComplex {
            lo: -hi,
            dims: rdims,
            diffs: rdiffs,
            orientation: Orientation::Cohomological,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    fn validate(&self) -> Result<(), DescentError> {
        if !self.dims.is_empty() && self.diffs.len() + 1 != self.dims.len() {
            return Err(DescentError::Invalid(format!(
                "complex needs {} differentials, got {}",
                self.dims.len().saturating_sub(1),
                self.diffs.len()
            )));
        }
        for (k, d) in self.diffs.iter().enumerate() {
            if d.rows != self.dims[k] || d.cols != self.dims[k + 1] {
                return Err(DescentError::Invalid(format!(
                    "differential {} has shape {}x{}, expected {}x{}",
                    k, d.rows, d.cols, self.dims[k], self.dims[k + 1]
                )));
            }
        }
        for k in 0..self.diffs.len().saturating_sub(1) {
            if !self.diffs[k].mul(&self.diffs[k + 1]).is_zero() {
                return Err(DescentError::Invalid(format!(
                    "d o d != 0 between internal degrees {} and {}",
                    k + 2,
                    k
                )));
            }
        }
        Ok(())
    }

    /// Internal index of an external degree, respecting orientation.
    fn index_of(&self, degree: i64) -> Option<usize> {
        let internal = match self.orientation {
            Orientation::Homological => degree,
            Orientation::Cohomological => -degree,
        };
        if internal < self.lo || internal > self.hi() {
            None
        } else {
            Some((internal - self.lo) as usize)
        }
    }

    pub fn dim_at(&self, degree: i64) -> usize {
        self.index_of(degree).map(|k| self.dims[k]).unwrap_or(0)
    }

    /// Differential leaving external degree `degree` (toward lower internal
    /// index), as a matrix; zero-sized when out of range.
    pub fn diff_out(&self, degree: i64) -> IntMat {
        match self.index_of(degree) {
            Some(k) if k >= 1 => self.diffs[k - 1].clone(),
            Some(k) => IntMat::zero(0, self.dims[k]),
            None => IntMat::zero(0, 0),
        }
    }

    /// Differential arriving into external degree `degree`.
    pub fn diff_in(&self, degree: i64) -> IntMat {
        match self.index_of(degree) {
            Some(k) if k + 1 < self.dims.len() => self.diffs[k].clone(),
            Some(k) => IntMat::zero(self.dims[k], 0),
            None => IntMat::zero(0, 0),
        }
    }

    /// Homology (or cohomology, per orientation) in the given degree.
    pub fn homology(&self, degree: i64) -> Result<FgAb, DescentError> {
        if self.index_of(degree).is_none() {
            return Err(DescentError::DegreeOutOfRange(degree));
        }
        let d_out = self.diff_out(degree);
        let d_in = self.diff_in(degree);
        Ok(subquotient(&d_out, &d_in))
    }

    pub fn homology_all(&self) -> Vec<(i64, FgAb)> {
        let mut out = vec![];
        for k in 0..self.dims.len() {
            let internal = self.lo + k as i64;
            let ext = match self.orientation {
                Orientation::Homological => internal,
                Orientation::Cohomological => -internal,
            };
            out.push((ext, self.homology(ext).unwrap()));
        }
        if self.orientation == Orientation::Cohomological {
            out.reverse();
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for k in 0..self.dims.len() {
            let internal = self.lo + k as i64;
            let sign = if internal.rem_euclid(2) == 0 { 1 } else { -1 };
            chi += sign * self.dims[k] as i64;
        }
        chi
    }
}

/// ker(d_out) / im(d_in) as an abstract group, computed by change of basis
/// to the kernel lattice followed by Smith normal form.
pub fn subquotient(d_out: &IntMat, d_in: &IntMat) -> FgAb {
    let n = d_out.cols;
    debug_assert_eq!(d_in.rows, n);
    let kb = kernel_basis(d_out);
    let k = kb.len();
    if k == 0 {
        return FgAb::zero();
    }
    let kmat = IntMat::from_columns(n, &kb);
    // express each image generator in the kernel basis
    let mut cols: Vec<Vec<BigInt>> = vec![];
    for j in 0..d_in.cols {
        let b = d_in.column(j);
        let x = solve(&kmat, &b).expect("image must lie in the kernel (d o d = 0)");
        cols.push(x);
    }
    let rel = IntMat::from_columns(k, &cols);
    cokernel_of(&rel, k)
}

/// Z^n modulo the column lattice of `rel`.
pub fn cokernel_of(rel: &IntMat, n: usize) -> FgAb {
    debug_assert_eq!(rel.rows, n);
    if rel.cols == 0 {
        return FgAb::free(n);
    }
    let s = smith_normal_form(rel);
    let mut diag = s.diagonal();
    while diag.len() < n {
        diag.push(BigInt::zero());
    }
    FgAb::from_diagonal(&diag)
}

struct Reduced {
    mat: IntMat,
    killed_rows: usize,
}

/// Strike +-1 pivots: each such pivot removes one row and one column without
/// changing the cokernel up to isomorphism.
fn unit_reduce(m: IntMat) -> Reduced {
    // We operate on a sparse triplet representation for speed.
    let mut rows_alive: Vec<bool> = vec![true; m.rows];
    let mut cols_alive: Vec<bool> = vec![true; m.cols];
    let mut entries: std::collections::BTreeMap<(usize, usize), BigInt> = Default::default();
    for i in 0..m.rows {
        for j in 0..m.cols {
            let v = m.get(i, j);
            if !v.is_zero() {
                entries.insert((i, j), v.clone());
            }
        }
    }
    let mut killed_rows = 0usize;
    loop {
        let one = BigInt::one();
        let pivot = entries
            .iter()
            .find(|((i, j), v)| rows_alive[*i] && cols_alive[*j] && (v.abs() == one))
            .map(|((i, j), _)| (*i, *j));
        let (pi, pj) = match pivot {
            None => break,
            Some(p) => p,
        };
        let pval = entries.get(&(pi, pj)).unwrap().clone();
        // gather pivot row and column
        let row_entries: Vec<(usize, BigInt)> = entries
            .iter()
            .filter(|((i, j), _)| *i == pi && *j != pj && cols_alive[*j])
            .map(|((_, j), v)| (*j, v.clone()))
            .collect();
        let col_entries: Vec<(usize, BigInt)> = entries
            .iter()
            .filter(|((i, j), _)| *j == pj && *i != pi && rows_alive[*i])
            .map(|((i, _), v)| (*i, v.clone()))
            .collect();
        for (i, a) in &col_entries {
            for (j, b) in &row_entries {
                let delta = -(a * b * &pval); // pval = ±1 so pval == 1/pval
                let e = entries.entry((*i, *j)).or_insert_with(BigInt::zero);
                *e += delta;
                if e.is_zero() {
                    entries.remove(&(*i, *j));
                }
            }
        }
        rows_alive[pi] = false;
        cols_alive[pj] = false;
        killed_rows += 1;
        entries.retain(|(i, j), _| rows_alive[*i] && cols_alive[*j]);
    }
    // pack the surviving block densely
    let rmap: Vec<usize> = (0..m.rows).filter(|i| rows_alive[*i]).collect();
    let cmap: Vec<usize> = (0..m.cols).filter(|j| cols_alive[*j]).collect();
    let rpos: std::collections::BTreeMap<usize, usize> =
        rmap.iter().enumerate().map(|(a, b)| (*b, a)).collect();
    let cpos: std::collections::BTreeMap<usize, usize> =
        cmap.iter().enumerate().map(|(a, b)| (*b, a)).collect();
    let mut out = IntMat::zero(rmap.len(), cmap.len());
    for ((i, j), v) in entries {
        out.set(rpos[&i], cpos[&j], v);
    }
    Reduced { mat: out, killed_rows }
}

/// Rank of an integer matrix, striking unit pivots first.
pub fn sparse_rank(m: &IntMat) -> usize {
    let red = unit_reduce(m.clone());
    red.killed_rows + smith_normal_form(&red.mat).rank()
}

/// Homology of a (possibly large, sparse, unit-heavy) complex at `degree`,
/// avoiding a full dense Smith pass.
///
/// The sequence 0 -> H -> coker(d_in) -> im(d_out) -> 0 splits because
/// im(d_out) is free, so torsion(H) = torsion(coker d_in) and
/// rank(H) = dim - rank(d_in) - rank(d_out). Both ranks and the cokernel
/// torsion survive unit-pivot striking, which is where the speed comes from.
pub fn homology_sparse(c: &ChainComplex, degree: i64) -> Result<FgAb, DescentError> {
    let d_out = c.diff_out(degree);
    let d_in = c.diff_in(degree);
    let n = c.dim_at(degree);
    let r_out = sparse_rank(&d_out);
    let r_in = sparse_rank(&d_in);
    let free_rank = n - r_out - r_in;
    let red = unit_reduce(d_in.clone());
    let s = smith_normal_form(&red.mat);
    let torsion: Vec<BigInt> = s
        .diagonal()
        .into_iter()
        .filter(|x| !x.is_zero() && !x.is_one())
        .collect();
    let mut g = FgAb::from_diagonal(&torsion);
    g.rank = free_rank;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_boundary_circle() {
        // simplicial chain complex of the boundary of a triangle
        // C1 = Z^3 (edges), C0 = Z^3 (vertices)
        let d1 = IntMat::from_rows(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        let c = ChainComplex::homological(0, vec![3, 3], vec![d1]).unwrap();
        assert_eq!(c.homology(0).unwrap(), FgAb::free(1));
        assert_eq!(c.homology(1).unwrap(), FgAb::free(1));
    }

    #[test]
    fn point_complex() {
        let c = ChainComplex::homological(0, vec![1], vec![]).unwrap();
        assert_eq!(c.homology(0).unwrap(), FgAb::free(1));
        assert!(c.homology(1).is_err());
    }

    #[test]
    fn multiplication_by_two() {
        // Z --2--> Z in degrees 1 -> 0
        let d = IntMat::from_rows(&[vec![2]]);
        let c = ChainComplex::homological(0, vec![1, 1], vec![d]).unwrap();
        assert_eq!(c.homology(0).unwrap(), FgAb::cyclic(2));
        assert_eq!(c.homology(1).unwrap(), FgAb::zero());
    }

    #[test]
    fn d_squared_checked() {
        let d1 = IntMat::from_rows(&[vec![1]]);
        let d2 = IntMat::from_rows(&[vec![1]]);
        assert!(ChainComplex::homological(0, vec![1, 1, 1], vec![d1, d2]).is_err());
    }

    #[test]
    fn cohomological_orientation() {
        // 0 -> Z --2--> Z -> 0 in degrees 0 -> 1
        let d = IntMat::from_rows(&[vec![2]]);
        let c = ChainComplex::cohomological(0, vec![1, 1], vec![d]).unwrap();
        assert_eq!(c.homology(0).unwrap(), FgAb::zero());
        assert_eq!(c.homology(1).unwrap(), FgAb::cyclic(2));
    }

    #[test]
    fn sparse_matches_dense() {
        let d1 = IntMat::from_rows(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        let c = ChainComplex::homological(0, vec![3, 3], vec![d1]).unwrap();
        for deg in 0..=1 {
            assert_eq!(homology_sparse(&c, deg).unwrap(), c.homology(deg).unwrap());
        }
    }
}
