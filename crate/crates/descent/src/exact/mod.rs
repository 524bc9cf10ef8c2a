//! Exact integer linear algebra: Smith normal form, finitely generated
//! abelian groups, bounded chain complexes and their homology, presented
//! groups for coefficient-twisted complexes.

pub mod complex;
pub mod fgab;
pub mod matrix;
pub mod presented;
pub mod snf;

pub use complex::{homology_sparse, subquotient, ChainComplex, Orientation};
pub use fgab::FgAb;
pub use matrix::IntMat;
pub use presented::{PresAb, PresComplex, PresHom};
pub use snf::{determinant, image_basis, kernel_basis, smith_normal_form, solve, Smith};

use crate::error::DescentError;

/// Cochain complex Hom(C, G) of an integer complex with coefficients in a
/// finitely generated abelian group, with transposed differentials.
pub fn hom_complex_with_coefficients(c: &ChainComplex, g: &FgAb) -> Result<PresComplex, DescentError> {
    let gp = PresAb::from_fgab(g);
    let n = c.dims.len();
    let mut groups: Vec<PresAb> = vec![];
    let mut maps: Vec<PresHom> = vec![];
    // Hom(C_k, G) = G^{dims[k]}; the cochain differential raises k, so the
    // cohomological complex stored homologically runs in reverse order.
    for k in (0..n).rev() {
        groups.push(power(&gp, c.dims[k]));
    }
    for k in (0..n.saturating_sub(1)).rev() {
        // delta: Hom(C_k, G) -> Hom(C_{k+1}, G), matrix = d_{k+1}^T (x) id_G
        let d = &c.diffs[k]; // C_{k+1} -> C_k
        let src = power(&gp, c.dims[k]);
        let tgt = power(&gp, c.dims[k + 1]);
        let m = kron_transpose(d, gp.gens);
        maps.push(PresHom::new(src, tgt, m)?);
    }
    // stored with negated degrees: cochain degree k answers at homology(-k)
    PresComplex::new(-(c.lo + n as i64 - 1), groups, maps)
}

fn power(g: &PresAb, n: usize) -> PresAb {
    let gens = g.gens * n;
    let mut rels = IntMat::zero(gens, g.rels.cols * n);
    for b in 0..n {
        for j in 0..g.rels.cols {
            for i in 0..g.gens {
                rels.set(b * g.gens + i, b * g.rels.cols + j, g.rels.get(i, j).clone());
            }
        }
    }
    PresAb::new(gens, rels)
}

/// (d^T (x) I_g): block matrix whose (j,i) block is d[i][j] * I_g.
fn kron_transpose(d: &IntMat, g: usize) -> IntMat {
    let mut m = IntMat::zero(d.cols * g, d.rows * g);
    for i in 0..d.rows {
        for j in 0..d.cols {
            let v = d.get(i, j);
            if num_traits::Zero::is_zero(v) {
                continue;
            }
            for b in 0..g {
                m.set(j * g + b, i * g + b, v.clone());
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_point_with_z3() {
        let point = ChainComplex::homological(0, vec![1], vec![]).unwrap();
        let hc = hom_complex_with_coefficients(&point, &FgAb::cyclic(3)).unwrap();
        // cohomological degrees are negated homological ones
        assert_eq!(hc.homology(0).unwrap(), FgAb::cyclic(3));
    }

    #[test]
    fn hom_circle_with_z_and_z2() {
        let d1 = IntMat::from_rows(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        let circle = ChainComplex::homological(0, vec![3, 3], vec![d1]).unwrap();
        let hz = hom_complex_with_coefficients(&circle, &FgAb::free(1)).unwrap();
        // stored homologically with negated degrees: H^0 at degree 0, H^1 at -1
        assert_eq!(hz.homology(0).unwrap(), FgAb::free(1));
        assert_eq!(hz.homology(-1).unwrap(), FgAb::free(1));
        let h2 = hom_complex_with_coefficients(&circle, &FgAb::cyclic(2)).unwrap();
        assert_eq!(h2.homology(-1).unwrap(), FgAb::cyclic(2));
    }
}
