//! Finite simplicial sets presented by their nondegenerate simplices, with
//! face maps allowed to land in degenerate simplices via normalized
//! degeneracy words. Coskeleta, Kan checks, products and nerves live here.

use crate::error::DescentError;
use crate::exact::{ChainComplex, IntMat};
use crate::fincat::FiniteCategory;
use std::collections::BTreeMap;

/// Reference to a (possibly degenerate) simplex: `degens` is the strictly
/// increasing list of degeneracies applied to `base`, first entry applied
/// first (so the last entry is the outermost).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SimplexRef {
    pub base_dim: usize,
    pub base: usize,
    pub degens: Vec<usize>,
}

impl SimplexRef {
    pub fn nondeg(dim: usize, idx: usize) -> Self {
        SimplexRef { base_dim: dim, base: idx, degens: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.base_dim + self.degens.len()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degens.is_empty()
    }
}

/// s_i s_j = s_{j+1} s_i for i <= j, maintained as a sorted application list.
fn push_degen(degens: &mut Vec<usize>, i: usize) {
    let mut pos = degens.len();
    while pos > 0 && i <= degens[pos - 1] {
        degens[pos - 1] += 1;
        pos -= 1;
    }
    degens.insert(pos, i);
}

#[derive(Clone, Debug)]
pub struct FiniteSimplicialSet {
    /// nondegenerate simplex labels per dimension
    pub labels: Vec<Vec<String>>,
    /// faces\[d\]\[s\] = the d+1 face refs (dimension d-1) of nondegenerate s
    pub faces: Vec<Vec<Vec<SimplexRef>>>,
    pub dim_cap: usize,
}

impl FiniteSimplicialSet {
    pub fn count(&self, dim: usize) -> usize {
        self.labels.get(dim).map(|v| v.len()).unwrap_or(0)
    }

    pub fn top_dim(&self) -> usize {
        (0..self.labels.len()).rev().find(|&d| self.count(d) > 0).unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for d in 0..self.labels.len() {
            let sign = if d % 2 == 0 { 1 } else { -1 };
            chi += sign * self.count(d) as i64;
        }
        chi
    }

    pub fn degen(&self, r: &SimplexRef, i: usize) -> SimplexRef {
        debug_assert!(i <= r.dim());
        let mut out = r.clone();
        push_degen(&mut out.degens, i);
        out
    }

    pub fn face(&self, r: &SimplexRef, i: usize) -> SimplexRef {
        debug_assert!(r.dim() >= 1 && i <= r.dim());
        match r.degens.last().copied() {
            None => self.faces[r.base_dim][r.base][i].clone(),
            Some(a) => {
                let inner = SimplexRef {
                    base_dim: r.base_dim,
                    base: r.base,
                    degens: r.degens[..r.degens.len() - 1].to_vec(),
                };
                if i == a || i == a + 1 {
                    inner
                } else if i < a {
                    let f = self.face(&inner, i);
                    self.degen(&f, a - 1)
                } else {
                    let f = self.face(&inner, i - 1);
                    self.degen(&f, a)
                }
            }
        }
    }

    /// All simplex references of the given dimension (degenerate included).
    pub fn refs_of_dim(&self, m: usize) -> Vec<SimplexRef> {
        let mut out = vec![];
        for bd in 0..=m.min(self.labels.len().saturating_sub(1)) {
            let extra = m - bd;
            for idx in 0..self.count(bd) {
                // strictly increasing degeneracy words of length `extra`
                // with entries valid at each application step: after applying
                // j degeneracies the dimension is bd + j, so the next entry
                // may range up to bd + j; increasing normal forms are exactly
                // the increasing subsets of 0..m-1 that are valid stepwise.
                for word in increasing_words(bd, extra) {
                    out.push(SimplexRef { base_dim: bd, base: idx, degens: word });
                }
            }
        }
        out
    }

    /// Exhaustive simplicial-identity check on all stored faces.
    pub fn validate(&self) -> Result<(), DescentError> {
        for d in 0..self.labels.len() {
            if d >= 1 {
                for s in 0..self.count(d) {
                    if self.faces[d][s].len() != d + 1 {
                        return Err(DescentError::Invalid(format!(
                            "simplex {}#{} has {} faces, expected {}",
                            d,
                            s,
                            self.faces[d][s].len(),
                            d + 1
                        )));
                    }
                    for f in &self.faces[d][s] {
                        if f.dim() + 1 != d {
                            return Err(DescentError::Invalid(format!(
                                "face of {}#{} has dimension {}",
                                d,
                                s,
                                f.dim()
                            )));
                        }
                    }
                }
            }
            if d >= 2 {
                for s in 0..self.count(d) {
                    let r = SimplexRef::nondeg(d, s);
                    for j in 1..=d {
                        for i in 0..j {
                            let a = self.face(&self.face(&r, j), i);
                            let b = self.face(&self.face(&r, i), j - 1);
                            if a != b {
                                return Err(DescentError::Invalid(format!(
                                    "simplicial identity fails at {}#{} (i={}, j={})",
                                    d, s, i, j
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Normalized chain complex: free on nondegenerate simplices, degenerate
    /// faces contribute zero.
    pub fn chain_complex(&self) -> ChainComplex {
        let top = self.labels.len();
        let dims: Vec<usize> = (0..top).map(|d| self.count(d)).collect();
        let mut diffs = vec![];
        for d in 1..top {
            let mut m = IntMat::zero(self.count(d - 1), self.count(d));
            for s in 0..self.count(d) {
                for (i, f) in self.faces[d][s].iter().enumerate() {
                    if f.is_degenerate() {
                        continue;
                    }
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    let cur = m.get(f.base, s) + num_bigint::BigInt::from(sign);
                    m.set(f.base, s, cur);
                }
            }
            diffs.push(m);
        }
        ChainComplex::homological(0, dims, diffs).expect("chain complex of a valid simplicial set")
    }

    /// Homology of the normalized chain complex in one degree.
    pub fn homology(&self, degree: i64) -> crate::exact::FgAb {
        let c = self.chain_complex();
        if degree < 0 || degree >= c.dims.len() as i64 {
            return crate::exact::FgAb::zero();
        }
        crate::exact::homology_sparse(&c, degree).expect("degree checked")
    }

    pub fn has_point_homology(&self, up_to: usize) -> bool {
        if self.homology(0) != crate::exact::FgAb::free(1) {
            return false;
        }
        (1..=up_to as i64).all(|d| self.homology(d).is_trivial())
    }
}

/// Strictly increasing degeneracy words of length `len` valid on a base of
/// dimension `base_dim` (entry k may be at most base_dim + k).
fn increasing_words(base_dim: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(base_dim: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let k = cur.len();
        for i in start..=(base_dim + k) {
            cur.push(i);
            go(base_dim, len, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(base_dim, len, 0, &mut vec![], &mut out);
    out
}

/// Builder for simplicial sets defined by arbitrary keys per dimension.
pub struct SsetBuilder<K: Ord + Clone> {
    pub index: Vec<BTreeMap<K, usize>>,
    pub labels: Vec<Vec<String>>,
    pub faces: Vec<Vec<Vec<SimplexRef>>>,
}

impl<K: Ord + Clone> SsetBuilder<K> {
    pub fn new(dim_cap: usize) -> Self {
        SsetBuilder {
            index: vec![BTreeMap::new(); dim_cap + 1],
            labels: vec![vec![]; dim_cap + 1],
            faces: vec![vec![]; dim_cap + 1],
        }
    }

    pub fn add(&mut self, dim: usize, key: K, label: String, faces: Vec<SimplexRef>) -> usize {
        if let Some(&i) = self.index[dim].get(&key) {
            return i;
        }
        let i = self.labels[dim].len();
        self.index[dim].insert(key, i);
        self.labels[dim].push(label);
        self.faces[dim].push(faces);
        i
    }

    pub fn get(&self, dim: usize, key: &K) -> Option<usize> {
        self.index[dim].get(key).copied()
    }

    pub fn finish(self, dim_cap: usize) -> FiniteSimplicialSet {
        FiniteSimplicialSet { labels: self.labels, faces: self.faces, dim_cap }
    }
}

/// Nerve of a finite category: nondegenerate k-simplices are composable
/// identity-free words read as paths x0 -> x1 -> ... -> xk.
pub fn nerve_of_category(c: &FiniteCategory, dim_cap: usize) -> FiniteSimplicialSet {
    let mut b: SsetBuilder<Vec<usize>> = SsetBuilder::new(dim_cap);
    for x in 0..c.objects.len() {
        b.add(0, vec![x], c.objects[x].clone(), vec![]);
    }
    // normalize a word (with possible identity letters) into a ref
    fn word_ref(c: &FiniteCategory, b: &SsetBuilder<Vec<usize>>, word: &[usize], src_obj: usize) -> SimplexRef {
        // find identity letters and strip them
        if let Some(pos) = word.iter().position(|&f| c.is_identity(f)) {
            let mut rest = word.to_vec();
            rest.remove(pos);
            let inner = word_ref(c, b, &rest, src_obj);
            let mut degens = inner.degens.clone();
            push_degen(&mut degens, pos);
            return SimplexRef { base_dim: inner.base_dim, base: inner.base, degens };
        }
        if word.is_empty() {
            return SimplexRef::nondeg(0, b.get(0, &vec![src_obj]).expect("vertex exists"));
        }
        let dim = word.len();
        let idx = b.get(dim, &word.to_vec()).expect("face word added at lower level");
        SimplexRef::nondeg(dim, idx)
    }

    for k in 1..=dim_cap {
        // words of length k of non-identity morphisms forming a path
        let words: Vec<Vec<usize>> = {
            let mut out: Vec<Vec<usize>> = vec![];
            let nonid: Vec<usize> =
                (0..c.morphisms.len()).filter(|&f| !c.is_identity(f)).collect();
            fn extend(
                c: &FiniteCategory,
                nonid: &[usize],
                cur: &mut Vec<usize>,
                k: usize,
                out: &mut Vec<Vec<usize>>,
            ) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for &f in nonid {
                    if cur.is_empty() || c.src(f) == c.tgt(*cur.last().unwrap()) {
                        cur.push(f);
                        extend(c, nonid, cur, k, out);
                        cur.pop();
                    }
                }
            }
            extend(c, &nonid, &mut vec![], k, &mut out);
            out
        };
        for w in words {
            // faces: drop first, compose interiors, drop last
            let mut faces: Vec<SimplexRef> = vec![];
            for i in 0..=k {
                if i == 0 {
                    let rest = w[1..].to_vec();
                    let src_obj = c.tgt(w[0]);
                    faces.push(word_ref(c, &b, &rest, src_obj));
                } else if i == k {
                    let rest = w[..k - 1].to_vec();
                    let src_obj = c.src(w[0]);
                    faces.push(word_ref(c, &b, &rest, src_obj));
                } else {
                    // compose letters i-1 and i (path convention)
                    let comp = c.comp(w[i], w[i - 1]).expect("word is composable");
                    let mut rest = w.clone();
                    rest[i - 1] = comp;
                    rest.remove(i);
                    let src_obj = c.src(w[0]);
                    faces.push(word_ref(c, &b, &rest, src_obj));
                }
            }
            let label = w
                .iter()
                .map(|&f| c.morphisms[f].name.clone())
                .collect::<Vec<_>>()
                .join("|");
            b.add(k, w, label, faces);
        }
    }
    b.finish(dim_cap)
}

/// Report of a Kan-condition search.
#[derive(Clone, Debug, Default)]
pub struct KanReport {
    pub unfilled: Vec<String>,
    pub horns_checked: usize,
}

impl KanReport {
    pub fn is_kan(&self) -> bool {
        self.unfilled.is_empty()
    }
}

/// Exhaustively search horn fillers up to `dim_cap` (fillers and horn faces
/// may be degenerate).
pub fn kan_check(x: &FiniteSimplicialSet, dim_cap: usize) -> KanReport {
    let mut report = KanReport::default();
    let top = dim_cap.min(x.labels.len().saturating_sub(1));
    for n in 1..=top {
        let lower = x.refs_of_dim(n - 1);
        let candidates = x.refs_of_dim(n);
        for k in 0..=n {
            // enumerate horns: families (y_i) for i != k compatible on faces
            let mut stack: Vec<Vec<SimplexRef>> = vec![vec![]];
            let idxs: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
            while let Some(cur) = stack.pop() {
                if cur.len() == idxs.len() {
                    report.horns_checked += 1;
                    let filled = candidates.iter().any(|z| {
                        idxs.iter()
                            .enumerate()
                            .all(|(t, &i)| x.face(z, i) == cur[t])
                    });
                    if !filled {
                        report.unfilled.push(format!("horn ({n},{k})"));
                    }
                    continue;
                }
                let t = cur.len();
                let i = idxs[t];
                'next: for y in &lower {
                    if n >= 2 {
                        // compatibility with already chosen faces
                        for (t2, y2) in cur.iter().enumerate() {
                            let j = idxs[t2];
                            // require d_{j'} y_i = d_{i'} y_j per identities
                            let (lo, hi, ylo, yhi) = if j < i { (j, i, y2, y) } else { (i, j, y, y2) };
                            if x.face(yhi, lo) != x.face(ylo, hi - 1) {
                                continue 'next;
                            }
                        }
                    }
                    let mut nxt = cur.clone();
                    nxt.push(y.clone());
                    stack.push(nxt);
                }
            }
            // cap blowup: the unfilled list already dedups by (n,k) label
            report.unfilled.dedup();
        }
    }
    report
}

/// n-coskeleton computed degreewise as compatible face tuples.
pub fn coskeleton(x: &FiniteSimplicialSet, n: usize, dim_cap: usize) -> FiniteSimplicialSet {
    let mut out = FiniteSimplicialSet {
        labels: x.labels.iter().take(n + 1).cloned().collect(),
        faces: x.faces.iter().take(n + 1).cloned().collect(),
        dim_cap,
    };
    while out.labels.len() < n + 1 {
        out.labels.push(vec![]);
        out.faces.push(vec![]);
    }
    for k in (n + 1)..=dim_cap {
        let lower = out.refs_of_dim(k - 1);
        // enumerate compatible (k+1)-tuples by backtracking
        let mut tuples: Vec<Vec<SimplexRef>> = vec![];
        let mut cur: Vec<SimplexRef> = vec![];
        backtrack_tuples(&out, &lower, k, &mut cur, &mut tuples);
        // a tuple is degenerate when it equals the face tuple of s_j(z)
        let mut degenerate: std::collections::BTreeSet<Vec<SimplexRef>> = Default::default();
        for z in out.refs_of_dim(k - 1) {
            for j in 0..k {
                let sz = out.degen(&z, j);
                let ft: Vec<SimplexRef> = (0..=k).map(|i| out.face(&sz, i)).collect();
                degenerate.insert(ft);
            }
        }
        let mut labels = vec![];
        let mut faces = vec![];
        for t in tuples {
            if degenerate.contains(&t) {
                continue;
            }
            labels.push(format!("cosk{}#{}", k, labels.len()));
            faces.push(t);
        }
        out.labels.push(labels);
        out.faces.push(faces);
    }
    out
}

fn backtrack_tuples(
    x: &FiniteSimplicialSet,
    lower: &[SimplexRef],
    k: usize,
    cur: &mut Vec<SimplexRef>,
    out: &mut Vec<Vec<SimplexRef>>,
) {
    if cur.len() == k + 1 {
        out.push(cur.clone());
        return;
    }
    let j = cur.len();
    'next: for y in lower {
        if k >= 2 {
            for (i, yi) in cur.iter().enumerate() {
                // need d_i y_j = d_{j-1} y_i for i < j
                if x.face(y, i) != x.face(yi, j - 1) {
                    continue 'next;
                }
            }
        }
        cur.push(y.clone());
        backtrack_tuples(x, lower, k, cur, out);
        cur.pop();
    }
}

/// The canonical map X -> cosk_n(X): checks it is an isomorphism up to
/// dim_cap by building the unit level by level (dimensions <= n are copied,
/// above them a simplex goes to the unique coskeleton simplex with the
/// matching, already-translated face tuple).
pub fn coskeleton_unit_is_iso(x: &FiniteSimplicialSet, n: usize, dim_cap: usize) -> bool {
    let c = coskeleton(x, n, dim_cap);
    let top = dim_cap.min(x.labels.len().saturating_sub(1));
    // unit[d][s] = index in c of the image of nondegenerate x-simplex (d, s)
    let mut unit: Vec<Vec<usize>> = vec![];
    for d in 0..=top {
        if x.count(d) != c.count(d) {
            return false;
        }
        if d <= n {
            unit.push((0..x.count(d)).collect());
            continue;
        }
        let translate = |r: &SimplexRef| SimplexRef {
            base_dim: r.base_dim,
            base: unit[r.base_dim][r.base],
            degens: r.degens.clone(),
        };
        let mut level = vec![];
        let mut used = vec![false; c.count(d)];
        for s in 0..x.count(d) {
            let ft: Vec<SimplexRef> = x.faces[d][s].iter().map(translate).collect();
            let found: Vec<usize> =
                (0..c.count(d)).filter(|&t| c.faces[d][t] == ft).collect();
            match found.as_slice() {
                [t] if !used[*t] => {
                    used[*t] = true;
                    level.push(*t);
                }
                _ => return false,
            }
        }
        unit.push(level);
    }
    true
}

/// Discrete simplicial set on a list of point labels.
pub fn discrete(points: &[&str], dim_cap: usize) -> FiniteSimplicialSet {
    let mut b: SsetBuilder<usize> = SsetBuilder::new(dim_cap);
    for (i, p) in points.iter().enumerate() {
        b.add(0, i, p.to_string(), vec![]);
    }
    b.finish(dim_cap)
}

/// Product simplicial set; nondegenerate simplices are the jointly
/// nondegenerate pairs of references.
pub fn product(x: &FiniteSimplicialSet, y: &FiniteSimplicialSet, dim_cap: usize) -> FiniteSimplicialSet {
    // pair refs with a computational nondegeneracy test
    let is_pair_degen_at = |x_: &FiniteSimplicialSet,
                            y_: &FiniteSimplicialSet,
                            r: &SimplexRef,
                            s: &SimplexRef,
                            i: usize| {
        let fr = x_.face(r, i + 1);
        let fs = y_.face(s, i + 1);
        x_.degen(&fr, i) == *r && y_.degen(&fs, i) == *s
    };
    let mut b: SsetBuilder<(SimplexRef, SimplexRef)> = SsetBuilder::new(dim_cap);
    // collect nondegenerate pairs per dimension
    let mut pairs_at: Vec<Vec<(SimplexRef, SimplexRef)>> = vec![];
    for m in 0..=dim_cap {
        let rx = x.refs_of_dim(m);
        let ry = y.refs_of_dim(m);
        let mut cur = vec![];
        for r in &rx {
            for s in &ry {
                let degen = (0..m).any(|i| is_pair_degen_at(x, y, r, s, i));
                if !degen {
                    cur.push((r.clone(), s.clone()));
                }
            }
        }
        pairs_at.push(cur);
    }
    // normalize an arbitrary pair into (degens, nondegenerate pair)
    fn normalize_pair(
        x: &FiniteSimplicialSet,
        y: &FiniteSimplicialSet,
        r: SimplexRef,
        s: SimplexRef,
    ) -> (Vec<usize>, (SimplexRef, SimplexRef)) {
        let m = r.dim();
        for i in 0..m {
            let fr = x.face(&r, i + 1);
            let fs = y.face(&s, i + 1);
            if x.degen(&fr, i) == r && y.degen(&fs, i) == s {
                let (mut ds, core) = normalize_pair(x, y, fr, fs);
                push_degen(&mut ds, i);
                return (ds, core);
            }
        }
        (vec![], (r, s))
    }
    for m in 0..=dim_cap {
        for (r, s) in &pairs_at[m] {
            let mut faces = vec![];
            if m >= 1 {
                for i in 0..=m {
                    let fr = x.face(r, i);
                    let fs = y.face(s, i);
                    let (degens, core) = normalize_pair(x, y, fr, fs);
                    let idx = b
                        .get(core.0.dim(), &core)
                        .expect("face pair added at lower dimension");
                    faces.push(SimplexRef { base_dim: core.0.dim(), base: idx, degens });
                }
            }
            b.add(m, (r.clone(), s.clone()), format!("pair{}#{}", m, b.labels[m].len()), faces);
        }
    }
    b.finish(dim_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::FgAb;

    #[test]
    fn nerve_terminal_is_point() {
        let c = FiniteCategory::terminal();
        let n = nerve_of_category(&c, 3);
        assert_eq!(n.count(0), 1);
        assert_eq!(n.count(1), 0);
        n.validate().unwrap();
    }

    #[test]
    fn nerve_arrow() {
        let c = FiniteCategory::arrow();
        let n = nerve_of_category(&c, 3);
        assert_eq!(n.count(0), 2);
        assert_eq!(n.count(1), 1);
        assert_eq!(n.count(2), 0);
        n.validate().unwrap();
    }

    #[test]
    fn nerve_circle_poset() {
        // 4-point model of the circle: a,b below c,d
        let c = FiniteCategory::poset(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
        );
        let n = nerve_of_category(&c, 2);
        assert_eq!(n.euler_characteristic(), 0);
        assert_eq!(n.homology(0), FgAb::free(1));
        assert_eq!(n.homology(1), FgAb::free(1));
        n.validate().unwrap();
    }

    #[test]
    fn cosk0_of_two_points() {
        let x = discrete(&["p", "q"], 3);
        let c = coskeleton(&x, 0, 3);
        // k-simplices are (k+1)-tuples of points: 2^{k+1} total refs,
        // of which the nondegenerate ones in dim 1 are the 2 mixed pairs
        assert_eq!(c.count(0), 2);
        assert_eq!(c.count(1), 2);
        c.validate().unwrap();
        // idempotence
        let cc = coskeleton(&c, 0, 3);
        for d in 0..=3 {
            assert_eq!(cc.count(d), c.count(d));
        }
    }

    #[test]
    fn nerves_are_2_coskeletal() {
        let sq = FiniteCategory::poset(
            &["00", "01", "10", "11"],
            &[("00", "01"), ("00", "10"), ("01", "11"), ("10", "11")],
        );
        let n = nerve_of_category(&sq, 4);
        assert!(coskeleton_unit_is_iso(&n, 2, 4));
    }

    #[test]
    fn kan_examples() {
        let pt = discrete(&["p"], 3);
        assert!(kan_check(&pt, 2).is_kan());
        let arrow = nerve_of_category(&FiniteCategory::arrow(), 3);
        let rep = kan_check(&arrow, 2);
        assert!(!rep.is_kan());
        assert!(rep.unfilled.iter().any(|h| h.contains("(2,0)") || h.contains("(2,2)")));
    }

    #[test]
    fn product_of_intervals() {
        let a = nerve_of_category(&FiniteCategory::arrow(), 3);
        let p = product(&a, &a, 3);
        p.validate().unwrap();
        // square: 4 vertices, 5 edges (4 sides + diagonal), 2 triangles
        assert_eq!(p.count(0), 4);
        assert_eq!(p.count(1), 5);
        assert_eq!(p.count(2), 2);
        assert_eq!(p.euler_characteristic(), 1);
    }

    #[test]
    fn cosk_preserves_products_on_counts() {
        let a = nerve_of_category(&FiniteCategory::arrow(), 3);
        let b = discrete(&["p", "q"], 3);
        let lhs = coskeleton(&product(&a, &b, 3), 1, 3);
        let rhs = product(&coskeleton(&a, 1, 3), &coskeleton(&b, 1, 3), 3);
        for d in 0..=3 {
            assert_eq!(lhs.count(d), rhs.count(d), "dim {}", d);
        }
    }
}
