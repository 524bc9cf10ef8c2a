//! Finite categories with interned identifiers and a dense composition
//! table, plus the constructions everything downstream leans on: slices,
//! the factorization category, categories of objects inside a morphism,
//! and the nerve.

use crate::error::DescentError;
use crate::sset::FiniteSimplicialSet;
use std::collections::BTreeMap;
use std::fmt;

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Clone, Debug)]
pub struct MorData {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
}

/// Finite category: objects and morphisms are indices into name tables,
/// composition is a dense partial table, identities are recorded per object.
#[derive(Clone)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorData>,
    /// compose[g][f] = Some(g o f) exactly when tgt(f) = src(g)
    pub compose: Vec<Vec<Option<MorId>>>,
    pub identity: Vec<MorId>,
}

impl fmt::Debug for FiniteCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteCategory({} objects, {} morphisms)",
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

/// One axiom violation found by `check_category`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatViolation {
    BadComposeSrcTgt { g: MorId, f: MorId },
    MissingCompose { g: MorId, f: MorId },
    SpuriousCompose { g: MorId, f: MorId },
    NotAssociative { h: MorId, g: MorId, f: MorId },
    BadIdentity { x: ObjId },
    IdentityNotUnit { f: MorId },
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub struct CategoryBuilder {
    objects: Vec<String>,
    morphisms: Vec<MorData>,
    compose: BTreeMap<(MorId, MorId), MorId>,
    obj_index: BTreeMap<String, ObjId>,
    mor_index: BTreeMap<String, MorId>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        CategoryBuilder {
            objects: vec![],
            morphisms: vec![],
            compose: BTreeMap::new(),
            obj_index: BTreeMap::new(),
            mor_index: BTreeMap::new(),
        }
    }

    pub fn object(&mut self, name: &str) -> ObjId {
        if let Some(&i) = self.obj_index.get(name) {
            return i;
        }
        let id = self.objects.len();
        self.objects.push(name.to_string());
        self.obj_index.insert(name.to_string(), id);
        id
    }

    pub fn morphism(&mut self, name: &str, src: ObjId, tgt: ObjId) -> MorId {
        if let Some(&i) = self.mor_index.get(name) {
            return i;
        }
        let id = self.morphisms.len();
        self.morphisms.push(MorData { name: name.to_string(), src, tgt });
        self.mor_index.insert(name.to_string(), id);
        id
    }

    pub fn rule(&mut self, g: MorId, f: MorId, gf: MorId) {
        self.compose.insert((g, f), gf);
    }

    /// Finish the category, adding identities (named `id_<obj>`) and all
    /// composition rules involving them automatically.
    pub fn build(mut self) -> Result<FiniteCategory, DescentError> {
        let mut identity = vec![0; self.objects.len()];
        for x in 0..self.objects.len() {
            let name = format!("id_{}", self.objects[x]);
            let id = match self.mor_index.get(&name) {
                Some(&m) => m,
                None => {
                    let id = self.morphisms.len();
                    self.morphisms.push(MorData { name: name.clone(), src: x, tgt: x });
                    self.mor_index.insert(name, id);
                    id
                }
            };
            identity[x] = id;
        }
        let n = self.morphisms.len();
        let mut table = vec![vec![None; n]; n];
        for ((g, f), gf) in &self.compose {
            table[*g][*f] = Some(*gf);
        }
        for f in 0..n {
            let (s, t) = (self.morphisms[f].src, self.morphisms[f].tgt);
            table[identity[t]][f] = Some(f);
            table[f][identity[s]] = Some(f);
        }
        let cat = FiniteCategory {
            objects: self.objects,
            morphisms: self.morphisms,
            compose: table,
            identity,
        };
        let report = check_category(&cat);
        if report.is_valid() {
            Ok(cat)
        } else {
            Err(DescentError::Invalid(format!(
                "not a category: {}",
                report.violations.join("; ")
            )))
        }
    }

    /// Build without validating; used by tests that construct violations.
    pub fn build_unchecked(mut self) -> FiniteCategory {
        let mut identity = vec![0; self.objects.len()];
        for x in 0..self.objects.len() {
            let name = format!("id_{}", self.objects[x]);
            let id = match self.mor_index.get(&name) {
                Some(&m) => m,
                None => {
                    let id = self.morphisms.len();
                    self.morphisms.push(MorData { name: name.clone(), src: x, tgt: x });
                    self.mor_index.insert(name, id);
                    id
                }
            };
            identity[x] = id;
        }
        let n = self.morphisms.len();
        let mut table = vec![vec![None; n]; n];
        for ((g, f), gf) in &self.compose {
            table[*g][*f] = Some(*gf);
        }
        for f in 0..n {
            let (s, t) = (self.morphisms[f].src, self.morphisms[f].tgt);
            if table[identity[t]][f].is_none() {
                table[identity[t]][f] = Some(f);
            }
            if table[f][identity[s]].is_none() {
                table[f][identity[s]] = Some(f);
            }
        }
        FiniteCategory { objects: self.objects, morphisms: self.morphisms, compose: table, identity }
    }
}

impl FiniteCategory {
    pub fn obj(&self, name: &str) -> Result<ObjId, DescentError> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| DescentError::UnknownObject(name.to_string()))
    }

    pub fn mor(&self, name: &str) -> Result<MorId, DescentError> {
        self.morphisms
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| DescentError::UnknownMorphism(name.to_string()))
    }

    pub fn src(&self, f: MorId) -> ObjId {
        self.morphisms[f].src
    }

    pub fn tgt(&self, f: MorId) -> ObjId {
        self.morphisms[f].tgt
    }

    pub fn comp(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.compose[g][f]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.identity[self.morphisms[f].src] == f && self.morphisms[f].src == self.morphisms[f].tgt
    }

    /// Compose a left-to-right word f0 o f1 o ... o fk (f_{i+1} feeds f_i).
    pub fn compose_word(&self, word: &[MorId]) -> Option<MorId> {
        let mut it = word.iter();
        let mut acc = *it.next()?;
        for &f in it {
            acc = self.comp(acc, f)?;
        }
        Some(acc)
    }

    pub fn morphisms_between(&self, a: ObjId, b: ObjId) -> Vec<MorId> {
        (0..self.morphisms.len())
            .filter(|&f| self.src(f) == a && self.tgt(f) == b)
            .collect()
    }

    pub fn morphisms_into(&self, b: ObjId) -> Vec<MorId> {
        (0..self.morphisms.len()).filter(|&f| self.tgt(f) == b).collect()
    }

    /// The one-object one-morphism category.
    pub fn terminal() -> FiniteCategory {
        let mut b = CategoryBuilder::new();
        b.object("pt");
        b.build().unwrap()
    }

    /// The arrow category 0 -> 1 as a poset.
    pub fn arrow() -> FiniteCategory {
        FiniteCategory::poset(&["0", "1"], &[("0", "1")])
    }

    /// Poset as a category: one morphism `x->y` per related pair. `leq`
    /// lists a relation whose reflexive-transitive closure is taken.
    pub fn poset(objects: &[&str], leq: &[(&str, &str)]) -> FiniteCategory {
        let n = objects.len();
        let idx: BTreeMap<&str, usize> = objects.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let mut rel = vec![vec![false; n]; n];
        for i in 0..n {
            rel[i][i] = true;
        }
        for (a, b) in leq {
            rel[idx[a]][idx[b]] = true;
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if rel[i][j] {
                        for k in 0..n {
                            if rel[j][k] && !rel[i][k] {
                                rel[i][k] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut b = CategoryBuilder::new();
        for o in objects {
            b.object(o);
        }
        let mut mor = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] && i != j {
                    let m = b.morphism(&format!("{}->{}", objects[i], objects[j]), i, j);
                    mor[i][j] = Some(m);
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if let (Some(f), Some(g)) = (mor[i][j], mor[j][k]) {
                        if let Some(gf) = mor[i][k] {
                            b.rule(g, f, gf);
                        }
                    }
                }
            }
        }
        b.build().unwrap()
    }

    /// Product category.
    pub fn product(&self, other: &FiniteCategory) -> FiniteCategory {
        let mut b = CategoryBuilder::new();
        for x in &self.objects {
            for y in &other.objects {
                b.object(&format!("({x},{y})"));
            }
        }
        let code_obj = |x: ObjId, y: ObjId| x * other.objects.len() + y;
        let mut code_mor: BTreeMap<(MorId, MorId), MorId> = BTreeMap::new();
        for (f, fd) in self.morphisms.iter().enumerate() {
            for (g, gd) in other.morphisms.iter().enumerate() {
                // identity pairs become the canonical identity of the pair object
                let name = if self.is_identity(f) && other.is_identity(g) {
                    format!("id_({},{})", self.objects[fd.src], other.objects[gd.src])
                } else {
                    format!("({},{})", fd.name, gd.name)
                };
                let m = b.morphism(&name, code_obj(fd.src, gd.src), code_obj(fd.tgt, gd.tgt));
                code_mor.insert((f, g), m);
            }
        }
        for (&(f1, g1), &m1) in &code_mor {
            for (&(f2, g2), &m2) in &code_mor {
                if let (Some(fc), Some(gc)) = (self.comp(f1, f2), other.comp(g1, g2)) {
                    b.rule(m1, m2, code_mor[&(fc, gc)]);
                }
            }
        }
        b.build().unwrap()
    }

    /// Composable words of a given length (tuples (f0,...,fk) with
    /// src(fi) = tgt(f_{i+1})), identities included.
    pub fn composable_words(&self, len: usize) -> Vec<Vec<MorId>> {
        if len == 0 {
            return vec![vec![]];
        }
        let mut out: Vec<Vec<MorId>> = (0..self.morphisms.len()).map(|f| vec![f]).collect();
        for _ in 1..len {
            let mut next = vec![];
            for w in &out {
                let last = *w.last().unwrap();
                for f in 0..self.morphisms.len() {
                    if self.tgt(f) == self.src(last) {
                        let mut w2 = w.clone();
                        w2.push(f);
                        next.push(w2);
                    }
                }
            }
            out = next;
        }
        out
    }
}

/// Exhaustive category-axiom check; violations are report entries.
pub fn check_category(c: &FiniteCategory) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = c.morphisms.len();
    for (x, &e) in c.identity.iter().enumerate() {
        if c.src(e) != x || c.tgt(e) != x {
            report
                .violations
                .push(format!("identity of {} has wrong endpoints", c.objects[x]));
        }
    }
    for g in 0..n {
        for f in 0..n {
            let composable = c.tgt(f) == c.src(g);
            match c.compose[g][f] {
                None => {
                    if composable {
                        report.violations.push(format!(
                            "missing composite {} o {}",
                            c.morphisms[g].name, c.morphisms[f].name
                        ));
                    }
                }
                Some(gf) => {
                    if !composable {
                        report.violations.push(format!(
                            "spurious composite {} o {}",
                            c.morphisms[g].name, c.morphisms[f].name
                        ));
                    } else if c.src(gf) != c.src(f) || c.tgt(gf) != c.tgt(g) {
                        report.violations.push(format!(
                            "composite {} o {} = {} has wrong endpoints",
                            c.morphisms[g].name, c.morphisms[f].name, c.morphisms[gf].name
                        ));
                    }
                }
            }
        }
    }
    // identities act as units
    for f in 0..n {
        let (s, t) = (c.src(f), c.tgt(f));
        if c.compose[c.identity[t]][f] != Some(f) || c.compose[f][c.identity[s]] != Some(f) {
            report
                .violations
                .push(format!("identity not a unit for {}", c.morphisms[f].name));
        }
    }
    // associativity wherever defined
    for h in 0..n {
        for g in 0..n {
            for f in 0..n {
                if c.tgt(f) != c.src(g) || c.tgt(g) != c.src(h) {
                    continue;
                }
                let left = c.comp(g, f).and_then(|gf| c.comp(h, gf));
                let right = c.comp(h, g).and_then(|hg| c.comp(hg, f));
                if left != right || left.is_none() {
                    report.violations.push(format!(
                        "associativity fails on ({}, {}, {})",
                        c.morphisms[h].name, c.morphisms[g].name, c.morphisms[f].name
                    ));
                }
            }
        }
    }
    report
}

/// Functor between finite categories.
#[derive(Clone, Debug)]
pub struct CatFunctor {
    pub obj_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
}

impl CatFunctor {
    pub fn new(
        src: &FiniteCategory,
        tgt: &FiniteCategory,
        obj_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Result<Self, DescentError> {
        let f = CatFunctor { obj_map, mor_map };
        f.validate(src, tgt)?;
        Ok(f)
    }

    pub fn validate(&self, src: &FiniteCategory, tgt: &FiniteCategory) -> Result<(), DescentError> {
        if self.obj_map.len() != src.objects.len() || self.mor_map.len() != src.morphisms.len() {
            return Err(DescentError::Invalid("functor tables have wrong size".into()));
        }
        for (m, &fm) in self.mor_map.iter().enumerate() {
            if tgt.src(fm) != self.obj_map[src.src(m)] || tgt.tgt(fm) != self.obj_map[src.tgt(m)] {
                return Err(DescentError::Invalid(format!(
                    "functor breaks endpoints at {}",
                    src.morphisms[m].name
                )));
            }
        }
        for (x, &e) in src.identity.iter().enumerate() {
            if self.mor_map[e] != tgt.identity[self.obj_map[x]] {
                return Err(DescentError::Invalid(format!(
                    "functor breaks identity at {}",
                    src.objects[x]
                )));
            }
        }
        for g in 0..src.morphisms.len() {
            for f in 0..src.morphisms.len() {
                if let Some(gf) = src.comp(g, f) {
                    let lhs = tgt.comp(self.mor_map[g], self.mor_map[f]);
                    if lhs != Some(self.mor_map[gf]) {
                        return Err(DescentError::Invalid(format!(
                            "functor breaks composition on ({}, {})",
                            src.morphisms[g].name, src.morphisms[f].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Slice category c/X together with the forgetful projection.
pub fn slice(c: &FiniteCategory, x: ObjId) -> Result<(FiniteCategory, CatFunctor), DescentError> {
    if x >= c.objects.len() {
        return Err(DescentError::UnknownObject(format!("#{x}")));
    }
    let objs: Vec<MorId> = c.morphisms_into(x);
    let mut b = CategoryBuilder::new();
    for &f in &objs {
        b.object(&format!("[{}]", c.morphisms[f].name));
    }
    let pos: BTreeMap<MorId, usize> = objs.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    // a slice morphism (g: f' -> f) is w: src(f') -> src(f) with f o w = f'
    let mut slice_mors: Vec<(usize, usize, MorId)> = vec![];
    for (i, &fp) in objs.iter().enumerate() {
        for (j, &f) in objs.iter().enumerate() {
            for w in c.morphisms_between(c.src(fp), c.src(f)) {
                if c.comp(f, w) == Some(fp) && !(i == j && c.is_identity(w)) {
                    slice_mors.push((i, j, w));
                }
            }
        }
    }
    let mut ids: Vec<MorId> = vec![];
    for (i, j, w) in &slice_mors {
        let m = b.morphism(
            &format!("[{}]:{}=>{}", c.morphisms[*w].name, i, j),
            *i,
            *j,
        );
        ids.push(m);
    }
    for (a, (i1, j1, w1)) in slice_mors.iter().enumerate() {
        for (bq, (i2, j2, w2)) in slice_mors.iter().enumerate() {
            // compose (second after first): w2 o w1 when j1 == i2
            if j1 == i2 {
                if let Some(wc) = c.comp(*w2, *w1) {
                    if c.is_identity(wc) && i1 == j2 {
                        continue; // composite is an identity, added by builder
                    }
                    let k = slice_mors
                        .iter()
                        .position(|(i, j, w)| i == i1 && j == j2 && *w == wc)
                        .expect("slice closed under composition");
                    b.rule(ids[bq], ids[a], ids[k]);
                }
            }
        }
    }
    let cat = b.build()?;
    // projection sends [f] to src(f) and a slice morphism to w
    let obj_map: Vec<ObjId> = objs.iter().map(|&f| c.src(f)).collect();
    let mut mor_map: Vec<MorId> = vec![0; cat.morphisms.len()];
    for (a, (_, _, w)) in slice_mors.iter().enumerate() {
        mor_map[ids[a]] = *w;
    }
    for (i, &f) in objs.iter().enumerate() {
        mor_map[cat.identity[i]] = c.identity[c.src(f)];
    }
    let _ = pos;
    let proj = CatFunctor::new(&cat, c, obj_map, mor_map)?;
    Ok((cat, proj))
}

/// Factorization category: objects are morphisms of c, a morphism from psi
/// to phi is a pair (u, v) with psi = u o phi o v.
pub fn factorization_category(c: &FiniteCategory) -> FiniteCategory {
    let mut b = CategoryBuilder::new();
    for m in &c.morphisms {
        b.object(&format!("<{}>", m.name));
    }
    let mut arrows: Vec<(usize, usize, MorId, MorId)> = vec![];
    for (psi, pd) in c.morphisms.iter().enumerate() {
        for (phi, fd) in c.morphisms.iter().enumerate() {
            for u in c.morphisms_between(fd.tgt, pd.tgt) {
                for v in c.morphisms_between(pd.src, fd.src) {
                    if c.comp(u, phi).and_then(|up| c.comp(up, v)) == Some(psi) {
                        if psi == phi && c.is_identity(u) && c.is_identity(v) {
                            continue;
                        }
                        arrows.push((psi, phi, u, v));
                    }
                }
            }
        }
    }
    let mut ids = vec![];
    for (psi, phi, u, v) in &arrows {
        let m = b.morphism(
            &format!("({},{}):{}=>{}", c.morphisms[*u].name, c.morphisms[*v].name, psi, phi),
            *psi,
            *phi,
        );
        ids.push(m);
    }
    for (a, (p1, q1, u1, v1)) in arrows.iter().enumerate() {
        for (bq, (p2, q2, u2, v2)) in arrows.iter().enumerate() {
            if q1 == p2 {
                // (u2,v2) o (u1,v1) = (u1 u2, v2 v1) : p1 => q2
                let u = c.comp(*u1, *u2);
                let v = c.comp(*v2, *v1);
                if let (Some(u), Some(v)) = (u, v) {
                    if p1 == q2 && c.is_identity(u) && c.is_identity(v) {
                        continue;
                    }
                    let k = arrows
                        .iter()
                        .position(|(p, q, uu, vv)| p == p1 && q == q2 && *uu == u && *vv == v)
                        .expect("factorization category closed under composition");
                    b.rule(ids[bq], ids[a], ids[k]);
                }
            }
        }
    }
    b.build().expect("factorization category satisfies the axioms")
}

/// Subcategory described by explicit object and morphism subsets; closure
/// under composition and identities is validated, not inferred.
#[derive(Clone, Debug)]
pub struct Subcategory {
    pub objects: Vec<ObjId>,
    pub morphisms: Vec<MorId>,
}

impl Subcategory {
    pub fn full(c: &FiniteCategory) -> Self {
        Subcategory {
            objects: (0..c.objects.len()).collect(),
            morphisms: (0..c.morphisms.len()).collect(),
        }
    }

    pub fn validate(&self, c: &FiniteCategory) -> Result<(), DescentError> {
        let oset: std::collections::BTreeSet<_> = self.objects.iter().collect();
        let mset: std::collections::BTreeSet<_> = self.morphisms.iter().collect();
        for &m in &self.morphisms {
            if !oset.contains(&c.src(m)) || !oset.contains(&c.tgt(m)) {
                return Err(DescentError::Invalid(format!(
                    "subcategory morphism {} has endpoints outside",
                    c.morphisms[m].name
                )));
            }
        }
        for &x in &self.objects {
            if !mset.contains(&c.identity[x]) {
                return Err(DescentError::Invalid(format!(
                    "subcategory misses identity of {}",
                    c.objects[x]
                )));
            }
        }
        for &g in &self.morphisms {
            for &f in &self.morphisms {
                if let Some(gf) = c.comp(g, f) {
                    if !mset.contains(&gf) {
                        return Err(DescentError::Invalid(format!(
                            "subcategory not closed under {} o {}",
                            c.morphisms[g].name, c.morphisms[f].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn contains_mor(&self, m: MorId) -> bool {
        self.morphisms.contains(&m)
    }
}

/// Category of objects sitting inside a morphism: objects are factorizations
/// phi = alpha o beta through an object of one of the listed subcategories;
/// morphisms are generated by subcategory morphisms commuting with the
/// factorizations (closed up under composition inside the ambient category
/// of all factorizations).
pub fn inside_category(
    c: &FiniteCategory,
    subcats: &[Subcategory],
    phi: MorId,
) -> Result<FiniteCategory, DescentError> {
    if phi >= c.morphisms.len() {
        return Err(DescentError::UnknownMorphism(format!("#{phi}")));
    }
    for s in subcats {
        s.validate(c)?;
    }
    // objects: (Z, alpha, beta) with phi = alpha o beta, Z in some subcat
    let mut objs: Vec<(ObjId, MorId, MorId)> = vec![];
    for s in subcats {
        for &z in &s.objects {
            for beta in c.morphisms_between(c.src(phi), z) {
                for alpha in c.morphisms_between(z, c.tgt(phi)) {
                    if c.comp(alpha, beta) == Some(phi) && !objs.contains(&(z, alpha, beta)) {
                        objs.push((z, alpha, beta));
                    }
                }
            }
        }
    }
    objs.sort();
    // generating morphisms: g in some subcat with commuting triangles
    let gen_ok = |g: MorId| subcats.iter().any(|s| s.contains_mor(g));
    let mut arrows: std::collections::BTreeSet<(usize, usize, MorId)> = Default::default();
    for (i, &(z1, a1, b1)) in objs.iter().enumerate() {
        for (j, &(z2, a2, b2)) in objs.iter().enumerate() {
            for g in c.morphisms_between(z1, z2) {
                if gen_ok(g) && c.comp(g, b1) == Some(b2) && c.comp(a2, g) == Some(a1) {
                    if i == j && c.is_identity(g) {
                        continue;
                    }
                    arrows.insert((i, j, g));
                }
            }
        }
    }
    // close under composition inside the category of all factorizations
    loop {
        let mut new: Vec<(usize, usize, MorId)> = vec![];
        for &(i, j, g) in &arrows {
            for &(j2, k, h) in &arrows {
                if j == j2 {
                    if let Some(hg) = c.comp(h, g) {
                        if !(i == k && c.is_identity(hg)) && !arrows.contains(&(i, k, hg)) {
                            new.push((i, k, hg));
                        }
                    }
                }
            }
        }
        if new.is_empty() {
            break;
        }
        arrows.extend(new);
    }
    let arrows: Vec<(usize, usize, MorId)> = arrows.into_iter().collect();
    let mut b = CategoryBuilder::new();
    for (i, &(z, ref a, ref bb)) in objs.iter().enumerate() {
        let _ = (a, bb);
        b.object(&format!("({}@{})", c.objects[z], i));
    }
    let mut ids = vec![];
    for (i, j, g) in &arrows {
        ids.push(b.morphism(&format!("{}:{}=>{}", c.morphisms[*g].name, i, j), *i, *j));
    }
    for (x, (i1, j1, g1)) in arrows.iter().enumerate() {
        for (y, (i2, j2, g2)) in arrows.iter().enumerate() {
            if j1 == i2 {
                if let Some(gc) = c.comp(*g2, *g1) {
                    if *i1 == *j2 && c.is_identity(gc) {
                        continue;
                    }
                    let k = arrows
                        .iter()
                        .position(|(i, j, g)| i == i1 && j == j2 && *g == gc)
                        .expect("inside category closed by construction");
                    b.rule(ids[y], ids[x], ids[k]);
                }
            }
        }
    }
    b.build()
}

/// Nerve of a finite category: nondegenerate k-simplices are composable
/// words of non-identity morphisms; face maps compose or drop at the ends,
/// and may land in degenerate simplices when a composite is an identity.
pub fn nerve(c: &FiniteCategory, dim_cap: usize) -> FiniteSimplicialSet {
    crate::sset::nerve_of_category(c, dim_cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_is_valid() {
        let c = FiniteCategory::terminal();
        assert!(check_category(&c).is_valid());
        assert_eq!(c.objects.len(), 1);
        assert_eq!(c.morphisms.len(), 1);
    }

    #[test]
    fn constructed_violation_is_reported() {
        // 2 objects; compose(g, f) bound to a morphism with wrong source
        let mut b = CategoryBuilder::new();
        let x = b.object("X");
        let y = b.object("Y");
        let f = b.morphism("f", x, y);
        let g = b.morphism("g", y, x);
        let bad = b.morphism("bad", x, y); // g o f should land X -> X
        b.rule(g, f, bad);
        b.rule(f, g, bad);
        let c = b.build_unchecked();
        let rep = check_category(&c);
        assert!(!rep.is_valid());
        assert!(rep.violations.iter().any(|v| v.contains("g o f")));
    }

    #[test]
    fn slice_terminal_and_arrow() {
        let t = FiniteCategory::terminal();
        let (s, _) = slice(&t, 0).unwrap();
        assert_eq!(s.objects.len(), 1);
        assert_eq!(s.morphisms.len(), 1);

        let a = FiniteCategory::arrow();
        let one = a.obj("1").unwrap();
        let (s, proj) = slice(&a, one).unwrap();
        assert_eq!(s.objects.len(), 2);
        let nonid = s.morphisms.iter().filter(|m| !m.name.starts_with("id_")).count();
        assert_eq!(nonid, 1);
        assert!(check_category(&s).is_valid());
        proj.validate(&s, &a).unwrap();
    }

    #[test]
    fn factorization_counts() {
        let t = FiniteCategory::terminal();
        let fl = factorization_category(&t);
        assert_eq!(fl.objects.len(), 1);
        assert_eq!(fl.morphisms.len(), 1);

        let a = FiniteCategory::arrow();
        let fl = factorization_category(&a);
        assert_eq!(fl.objects.len(), 3);
        // enumeration oracle for the morphism count: pairs (u, v) with
        // psi = u o phi o v, three identities plus arrow=>id_0 and arrow=>id_1
        assert_eq!(fl.morphisms.len(), 5);
        assert!(check_category(&fl).is_valid());

        let square = FiniteCategory::poset(
            &["00", "01", "10", "11"],
            &[("00", "01"), ("00", "10"), ("01", "11"), ("10", "11")],
        );
        let fl = factorization_category(&square);
        assert_eq!(fl.objects.len(), 9);
        assert!(check_category(&fl).is_valid());
    }

    #[test]
    fn inside_category_examples() {
        let t = FiniteCategory::terminal();
        let ins = inside_category(&t, &[Subcategory::full(&t)], 0).unwrap();
        assert_eq!(ins.objects.len(), 1);

        let a = FiniteCategory::arrow();
        let arrow = a.mor("0->1").unwrap();
        let ins = inside_category(&a, &[Subcategory::full(&a)], arrow).unwrap();
        assert_eq!(ins.objects.len(), 2);
        let nonid = ins.morphisms.iter().filter(|m| !m.name.starts_with("id_")).count();
        assert_eq!(nonid, 1);
    }

    #[test]
    fn slice_of_poset_counts_opens() {
        // inclusion poset shaped like the opens of a small topology
        let p = FiniteCategory::poset(
            &["e", "a", "b", "ab", "abc", "abd", "x"],
            &[
                ("e", "a"),
                ("e", "b"),
                ("a", "ab"),
                ("b", "ab"),
                ("ab", "abc"),
                ("ab", "abd"),
                ("abc", "x"),
                ("abd", "x"),
            ],
        );
        let top = p.obj("x").unwrap();
        let (s, _) = slice(&p, top).unwrap();
        assert_eq!(s.objects.len(), p.objects.len());
    }

    #[test]
    fn composable_word_counts() {
        let a = FiniteCategory::arrow();
        assert_eq!(a.composable_words(1).len(), 3);
        // enumeration: (id0,id0), (id1,id1), (id1,u), (u,id0)
        assert_eq!(a.composable_words(2).len(), 4);
    }

    #[test]
    fn product_category_valid() {
        let a = FiniteCategory::arrow();
        let sq = a.product(&a);
        assert!(check_category(&sq).is_valid());
        assert_eq!(sq.objects.len(), 4);
        assert_eq!(sq.morphisms.len(), 9);
    }
}
