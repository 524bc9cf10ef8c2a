use super::complex::cokernel_of;
use super::fgab::FgAb;
use super::matrix::IntMat;
use super::snf::{kernel_basis, smith_normal_form, solve, Smith};
use crate::error::DescentError;
use num_bigint::BigInt;
use num_traits::Zero;

/// Abelian group presented as Z^gens modulo the column lattice of `rels`.
#[derive(Clone, Debug)]
pub struct PresAb {
    pub gens: usize,
    pub rels: IntMat,
    smith: std::rc::Rc<Smith>,
}

impl PresAb {
    pub fn new(gens: usize, rels: IntMat) -> Self {
        assert_eq!(rels.rows, gens);
        let smith = std::rc::Rc::new(smith_normal_form(&rels));
        PresAb { gens, rels, smith }
    }

    pub fn free(n: usize) -> Self {
        PresAb::new(n, IntMat::zero(n, 0))
    }

    pub fn zero() -> Self {
        PresAb::free(0)
    }

    /// Canonical presentation of an invariant-factor group: one generator
    /// per torsion factor plus `rank` free generators; relations are the
    /// diagonal torsion multiplicities (an injective relation matrix).
    pub fn from_fgab(g: &FgAb) -> Self {
        let t = g.torsion.len();
        let gens = t + g.rank;
        let mut rels = IntMat::zero(gens, t);
        for (j, d) in g.torsion.iter().enumerate() {
            rels.set(j, j, d.clone());
        }
        PresAb::new(gens, rels)
    }

    /// Invariant-factor form of this group.
    pub fn to_fgab(&self) -> FgAb {
        cokernel_of(&self.rels, self.gens)
    }

    pub fn is_trivial(&self) -> bool {
        self.to_fgab().is_trivial()
    }

    /// Canonical form of an element: coordinates in the Smith basis with
    /// torsion coordinates reduced mod the invariant factor.
    pub fn canon(&self, x: &[BigInt]) -> Vec<BigInt> {
        use num_integer::Integer;
        assert_eq!(x.len(), self.gens);
        let s = &self.smith;
        let mut y = s.u.apply(x);
        let r = s.rank();
        for (i, yi) in y.iter_mut().enumerate() {
            if i < r {
                let d = s.d.get(i, i);
                *yi = yi.mod_floor(d);
            }
        }
        y
    }

    pub fn elems_equal(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        self.canon(a) == self.canon(b)
    }

    pub fn is_zero_elem(&self, a: &[BigInt]) -> bool {
        self.canon(a).iter().all(|v| v.is_zero())
    }
}

/// Homomorphism between presented groups, given by a matrix on generators
/// that carries the source relation lattice into the target one.
#[derive(Clone, Debug)]
pub struct PresHom {
    pub src: PresAb,
    pub tgt: PresAb,
    pub map: IntMat,
}

impl PresHom {
    pub fn new(src: PresAb, tgt: PresAb, map: IntMat) -> Result<Self, DescentError> {
        if map.rows != tgt.gens || map.cols != src.gens {
            return Err(DescentError::Invalid(format!(
                "hom has shape {}x{}, expected {}x{}",
                map.rows, map.cols, tgt.gens, src.gens
            )));
        }
        // every relation of the source must map into the target lattice
        for j in 0..src.rels.cols {
            let img = map.apply(&src.rels.column(j));
            if !lattice_member(&tgt.rels, &img) {
                return Err(DescentError::Invalid(
                    "matrix does not respect the relation lattices".into(),
                ));
            }
        }
        Ok(PresHom { src, tgt, map })
    }

    pub fn identity(g: &PresAb) -> Self {
        PresHom { src: g.clone(), tgt: g.clone(), map: IntMat::identity(g.gens) }
    }

    pub fn zero(src: &PresAb, tgt: &PresAb) -> Self {
        PresHom { src: src.clone(), tgt: tgt.clone(), map: IntMat::zero(tgt.gens, src.gens) }
    }

    pub fn compose(&self, inner: &PresHom) -> PresHom {
        // self o inner
        PresHom {
            src: inner.src.clone(),
            tgt: self.tgt.clone(),
            map: self.map.mul(&inner.map),
        }
    }

    pub fn equals(&self, other: &PresHom) -> bool {
        if self.src.gens != other.src.gens || self.tgt.gens != other.tgt.gens {
            return false;
        }
        for j in 0..self.src.gens {
            if !self.tgt.elems_equal(&self.map.column(j), &other.map.column(j)) {
                return false;
            }
        }
        true
    }

    /// Kernel as a presented group with its inclusion into the source.
    pub fn kernel(&self) -> (PresAb, PresHom) {
        // lattice K = { x : map x in rels_tgt } = projection of
        // null([map | -rels_tgt]) to the x-part, spanned together with ker(map)
        let stacked = self.map.hcat(&self.tgt.rels.neg());
        let null = kernel_basis(&stacked);
        let proj: Vec<Vec<BigInt>> = null
            .iter()
            .map(|v| v[..self.src.gens].to_vec())
            .collect();
        let raw = IntMat::from_columns(self.src.gens, &proj);
        // a basis of the projected lattice
        let basis = lattice_basis(&raw);
        let k = basis.len();
        let kmat = IntMat::from_columns(self.src.gens, &basis);
        // relations: source relations expressed in the kernel basis
        let mut rel_cols: Vec<Vec<BigInt>> = vec![];
        for j in 0..self.src.rels.cols {
            let r = self.src.rels.column(j);
            let x = solve(&kmat, &r).expect("source relations lie in the kernel lattice");
            rel_cols.push(x);
        }
        let group = PresAb::new(k, IntMat::from_columns(k, &rel_cols));
        let incl = PresHom { src: group.clone(), tgt: self.src.clone(), map: kmat };
        (group, incl)
    }

    /// Cokernel: target generators with the image columns added as relations.
    pub fn cokernel(&self) -> PresAb {
        PresAb::new(self.tgt.gens, self.tgt.rels.hcat(&self.map))
    }

    pub fn is_injective(&self) -> bool {
        let (k, _) = self.kernel();
        k.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// Does `v` lie in the column lattice of `l`?
pub fn lattice_member(l: &IntMat, v: &[BigInt]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    if l.cols == 0 {
        return false;
    }
    solve(l, v).is_some()
}

/// A basis (as columns) of the lattice spanned by the columns of `m`.
pub fn lattice_basis(m: &IntMat) -> Vec<Vec<BigInt>> {
    if m.cols == 0 {
        return vec![];
    }
    // columns of U^{-1} * D span the same lattice as the columns of m
    let s = smith_normal_form(m);
    let r = s.rank();
    (0..r)
        .map(|i| {
            let di = s.d.get(i, i).clone();
            s.u_inv.column(i).into_iter().map(|x| x * &di).collect()
        })
        .collect()
}

/// Bounded complex of presented abelian groups (homological indexing:
/// `maps[k]` goes from degree `lo + k + 1` to `lo + k`).
#[derive(Clone, Debug)]
pub struct PresComplex {
    pub lo: i64,
    pub groups: Vec<PresAb>,
    pub maps: Vec<PresHom>,
}

impl PresComplex {
    pub fn new(lo: i64, groups: Vec<PresAb>, maps: Vec<PresHom>) -> Result<Self, DescentError> {
        if !groups.is_empty() && maps.len() + 1 != groups.len() {
            return Err(DescentError::Invalid("presented complex shape mismatch".into()));
        }
        for k in 0..maps.len().saturating_sub(1) {
            let comp = maps[k].compose(&maps[k + 1]);
            let zero = PresHom::zero(&comp.src, &comp.tgt);
            if !comp.equals(&zero) {
                return Err(DescentError::Invalid(format!(
                    "d o d != 0 at internal degree {}",
                    k
                )));
            }
        }
        Ok(PresComplex { lo, groups, maps })
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.groups.len() as i64 - 1
    }

    fn index_of(&self, degree: i64) -> Option<usize> {
        if degree < self.lo || degree > self.hi() {
            None
        } else {
            Some((degree - self.lo) as usize)
        }
    }

    pub fn homology(&self, degree: i64) -> Result<FgAb, DescentError> {
        let k = self.index_of(degree).ok_or(DescentError::DegreeOutOfRange(degree))?;
        let ident = PresHom::identity(&self.groups[k]);
        let d_out = if k >= 1 { &self.maps[k - 1] } else { &ident };
        let (ker, incl) = if k >= 1 {
            d_out.kernel()
        } else {
            (self.groups[k].clone(), PresHom::identity(&self.groups[k]))
        };
        // relations for H: kernel's own relations plus incoming image
        let mut rels = ker.rels.clone();
        if k + 1 < self.groups.len() {
            let d_in = &self.maps[k];
            // express each image of a generator of C_{k+1} in the kernel basis
            let mut cols: Vec<Vec<BigInt>> = vec![];
            for j in 0..d_in.src.gens {
                let img = d_in.map.column(j);
                // solve incl.map * x = img modulo target relations:
                // [incl.map | rels_src_of_incl.tgt] * (x, y) = img
                let stacked = incl.map.hcat(&incl.tgt.rels);
                let sol = solve(&stacked, &img)
                    .expect("image must lie in the kernel modulo relations");
                cols.push(sol[..ker.gens].to_vec());
            }
            if !cols.is_empty() {
                rels = rels.hcat(&IntMat::from_columns(ker.gens, &cols));
            }
        }
        Ok(cokernel_of(&rels, ker.gens))
    }

    pub fn homology_all(&self) -> Vec<(i64, FgAb)> {
        (self.lo..=self.hi())
            .map(|d| (d, self.homology(d).unwrap()))
            .collect()
    }

    /// Convenience for complexes stored with negated (cochain) degrees.
    pub fn cohomology(&self, k: i64) -> Result<FgAb, DescentError> {
        self.homology(-k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fgab_roundtrip() {
        let g = FgAb { rank: 2, torsion: vec![BigInt::from(2), BigInt::from(6)] };
        let p = PresAb::from_fgab(&g);
        assert_eq!(p.to_fgab(), g);
    }

    #[test]
    fn hom_validation() {
        let z2 = PresAb::from_fgab(&FgAb::cyclic(2));
        let z = PresAb::free(1);
        // Z -> Z/2 reduction is fine
        assert!(PresHom::new(z.clone(), z2.clone(), IntMat::from_rows(&[vec![1]])).is_ok());
        // Z/2 -> Z by 1 is not a homomorphism
        assert!(PresHom::new(z2, z, IntMat::from_rows(&[vec![1]])).is_err());
    }

    #[test]
    fn kernel_cokernel() {
        // multiplication by 2 on Z
        let z = PresAb::free(1);
        let f = PresHom::new(z.clone(), z.clone(), IntMat::from_rows(&[vec![2]])).unwrap();
        let (k, _) = f.kernel();
        assert!(k.is_trivial());
        assert_eq!(f.cokernel().to_fgab(), FgAb::cyclic(2));
        // projection Z -> Z/4: kernel 4Z free of rank 1
        let z4 = PresAb::from_fgab(&FgAb::cyclic(4));
        let p = PresHom::new(z.clone(), z4, IntMat::from_rows(&[vec![1]])).unwrap();
        let (k, incl) = p.kernel();
        assert_eq!(k.to_fgab(), FgAb::free(1));
        assert!(incl.map.get(0, 0).clone() == BigInt::from(4) || incl.map.get(0, 0).clone() == BigInt::from(-4));
    }

    #[test]
    fn presented_complex_homology() {
        // Z --2--> Z in degrees 1 -> 0 via presentations
        let z = PresAb::free(1);
        let f = PresHom::new(z.clone(), z.clone(), IntMat::from_rows(&[vec![2]])).unwrap();
        let c = PresComplex::new(0, vec![z.clone(), z.clone()], vec![f]).unwrap();
        assert_eq!(c.homology(0).unwrap(), FgAb::cyclic(2));
        assert_eq!(c.homology(1).unwrap(), FgAb::zero());
        // Hom(point complex, Z/3): single Z/3 in degree 0
        let z3 = PresAb::from_fgab(&FgAb::cyclic(3));
        let c = PresComplex::new(0, vec![z3], vec![]).unwrap();
        assert_eq!(c.homology(0).unwrap(), FgAb::cyclic(3));
    }
}
