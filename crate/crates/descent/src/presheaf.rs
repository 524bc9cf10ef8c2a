//! Presheaves of finite sets, finite groups, and finitely generated abelian
//! groups on a finite site; sections over sieves, the sheaf condition, the
//! plus construction (a filtered colimit over covering sieves, evaluated at
//! the minimal one), and sheafification by applying it twice.

use crate::error::DescentError;
use crate::exact::{FgAb, IntMat, PresAb, PresHom};
use crate::fincat::{FiniteCategory, MorId, ObjId};
use crate::groups::{FiniteGroup, GroupHom};
use crate::site::{Sieve, Site};
use std::collections::{BTreeMap, BTreeSet};

/// A compatible family over the arrows of a sieve, valued in element indices.
pub type Family = BTreeMap<MorId, usize>;

/// Presheaf of finite sets: element labels per object, index maps per
/// morphism (contravariant: `restrict[f]` maps values at tgt(f) to values
/// at src(f)).
#[derive(Clone, Debug)]
pub struct SetPresheaf {
    pub values: Vec<Vec<String>>,
    pub restrict: Vec<Vec<usize>>,
}

/// Presheaf of finite groups.
#[derive(Clone, Debug)]
pub struct GroupPresheaf {
    pub values: Vec<FiniteGroup>,
    pub restrict: Vec<GroupHom>,
}

/// Presheaf of finitely generated abelian groups, presented on the
/// canonical generators of each invariant-factor form.
#[derive(Clone, Debug)]
pub struct AbPresheaf {
    pub values: Vec<PresAb>,
    pub restrict: Vec<IntMat>,
    /// Set when the presheaf is a power of one base group with restrictions
    /// acting on component indices (restrict = comp_map (x) id_base); large
    /// Cech computations then run on the component lattice with exact
    /// universal-coefficient bookkeeping.
    pub uniform: Option<UniformAb>,
}

/// Component structure of a uniform abelian presheaf.
#[derive(Clone, Debug)]
pub struct UniformAb {
    pub base: FgAb,
    pub comp_counts: Vec<usize>,
    pub comp_maps: Vec<IntMat>,
}

fn check_shapes(cat: &FiniteCategory, nobj: usize, nmor: usize) -> Result<(), DescentError> {
    if nobj != cat.objects.len() || nmor != cat.morphisms.len() {
        return Err(DescentError::Invalid("presheaf tables have wrong size".into()));
    }
    Ok(())
}

impl SetPresheaf {
    pub fn validate(&self, cat: &FiniteCategory) -> Result<(), DescentError> {
        check_shapes(cat, self.values.len(), self.restrict.len())?;
        for (f, r) in self.restrict.iter().enumerate() {
            if r.len() != self.values[cat.tgt(f)].len()
                || r.iter().any(|&x| x >= self.values[cat.src(f)].len())
            {
                return Err(DescentError::Invalid(format!(
                    "restriction along {} has wrong shape",
                    cat.morphisms[f].name
                )));
            }
        }
        for (x, &e) in cat.identity.iter().enumerate() {
            if self.restrict[e] != (0..self.values[x].len()).collect::<Vec<_>>() {
                return Err(DescentError::Invalid(format!(
                    "identity restriction at {} not the identity",
                    cat.objects[x]
                )));
            }
        }
        for g in 0..cat.morphisms.len() {
            for f in 0..cat.morphisms.len() {
                if let Some(gf) = cat.comp(g, f) {
                    // F(g o f) = F(f) o F(g)
                    for v in 0..self.values[cat.tgt(g)].len() {
                        if self.restrict[gf][v] != self.restrict[f][self.restrict[g][v]] {
                            return Err(DescentError::Invalid(format!(
                                "functoriality fails on ({}, {})",
                                cat.morphisms[g].name, cat.morphisms[f].name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, f: MorId, v: usize) -> usize {
        self.restrict[f][v]
    }
}

impl GroupPresheaf {
    pub fn validate(&self, cat: &FiniteCategory) -> Result<(), DescentError> {
        check_shapes(cat, self.values.len(), self.restrict.len())?;
        for (f, r) in self.restrict.iter().enumerate() {
            GroupHom::new(&self.values[cat.tgt(f)], &self.values[cat.src(f)], r.map.clone())?;
        }
        let as_sets = self.as_set_presheaf();
        as_sets.validate(cat)
    }

    pub fn as_set_presheaf(&self) -> SetPresheaf {
        SetPresheaf {
            values: self
                .values
                .iter()
                .map(|g| (0..g.order()).map(|i| format!("g{i}")).collect())
                .collect(),
            restrict: self.restrict.iter().map(|h| h.map.clone()).collect(),
        }
    }
}

impl AbPresheaf {
    pub fn validate(&self, cat: &FiniteCategory) -> Result<(), DescentError> {
        check_shapes(cat, self.values.len(), self.restrict.len())?;
        for (f, m) in self.restrict.iter().enumerate() {
            PresHom::new(
                self.values[cat.tgt(f)].clone(),
                self.values[cat.src(f)].clone(),
                m.clone(),
            )?;
        }
        for (x, &e) in cat.identity.iter().enumerate() {
            if self.restrict[e] != IntMat::identity(self.values[x].gens) {
                return Err(DescentError::Invalid(format!(
                    "identity restriction at {} not the identity",
                    cat.objects[x]
                )));
            }
        }
        for g in 0..cat.morphisms.len() {
            for f in 0..cat.morphisms.len() {
                if let Some(gf) = cat.comp(g, f) {
                    let lhs = self.restrict[f].mul(&self.restrict[g]);
                    let tgt = &self.values[cat.src(f)];
                    for j in 0..lhs.cols {
                        if !tgt.elems_equal(&lhs.column(j), &self.restrict[gf].column(j)) {
                            return Err(DescentError::Invalid(format!(
                                "functoriality fails on ({}, {})",
                                cat.morphisms[g].name, cat.morphisms[f].name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn hom(&self, cat: &FiniteCategory, f: MorId) -> PresHom {
        PresHom::new(
            self.values[cat.tgt(f)].clone(),
            self.values[cat.src(f)].clone(),
            self.restrict[f].clone(),
        )
        .expect("validated presheaf")
    }
}

/// Arrows of a sieve that do not properly factor through other arrows of
/// the sieve; every arrow factors through one of these, which keeps section
/// enumeration small.
fn sieve_generators(cat: &FiniteCategory, sieve: &Sieve) -> Vec<MorId> {
    let arrows: Vec<MorId> = sieve.arrows.iter().copied().collect();
    // preorder: g <= f iff g = f o h
    let leq = |g: MorId, f: MorId| -> bool {
        cat.morphisms_between(cat.src(g), cat.src(f))
            .into_iter()
            .any(|h| cat.comp(f, h) == Some(g))
    };
    let mut gens: Vec<MorId> = vec![];
    'outer: for &g in &arrows {
        for &f in &arrows {
            if f != g && leq(g, f) && !leq(f, g) {
                continue 'outer; // strictly below f
            }
        }
        // keep one representative per mutual-factorization class
        if gens.iter().any(|&f| leq(g, f) && leq(f, g)) {
            continue;
        }
        gens.push(g);
    }
    gens
}

/// All compatible families of a set presheaf over a sieve.
pub fn sections_set(f: &SetPresheaf, site: &Site, sieve: &Sieve) -> Vec<Family> {
    let cat = &site.cat;
    let arrows: Vec<MorId> = sieve.arrows.iter().copied().collect();
    if arrows.is_empty() {
        return vec![BTreeMap::new()];
    }
    let gens = sieve_generators(cat, sieve);
    let mut out = vec![];
    let mut choice = vec![0usize; gens.len()];
    loop {
        // propagate a full family from the generator choice
        let mut fam: Family = BTreeMap::new();
        for (i, &g) in gens.iter().enumerate() {
            fam.insert(g, choice[i]);
        }
        loop {
            let mut progressed = false;
            for &g in &arrows {
                if fam.contains_key(&g) {
                    continue;
                }
                // find an assigned f with g = f o h
                'search: for (&fm, &xv) in fam.clone().iter() {
                    for h in cat.morphisms_between(cat.src(g), cat.src(fm)) {
                        if cat.comp(fm, h) == Some(g) {
                            fam.insert(g, f.apply(h, xv));
                            progressed = true;
                            break 'search;
                        }
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        if fam.len() == arrows.len() && family_compatible(f, cat, sieve, &fam) {
            out.push(fam);
        }
        // odometer over generator values
        let mut i = 0;
        loop {
            if i == gens.len() {
                out.sort();
                out.dedup();
                return out;
            }
            choice[i] += 1;
            if choice[i] < f.values[cat.src(gens[i])].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if gens.iter().any(|&g| f.values[cat.src(g)].is_empty()) {
            return vec![];
        }
    }
}

fn family_compatible(f: &SetPresheaf, cat: &FiniteCategory, sieve: &Sieve, fam: &Family) -> bool {
    for (&g, &xv) in fam {
        for h in 0..cat.morphisms.len() {
            if let Some(gh) = cat.comp(g, h) {
                if sieve.arrows.contains(&gh) {
                    if fam.get(&gh) != Some(&f.apply(h, xv)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Canonical comparison map F(X) -> sections over a sieve on X.
pub fn canonical_family_set(f: &SetPresheaf, cat: &FiniteCategory, sieve: &Sieve, v: usize) -> Family {
    sieve.arrows.iter().map(|&g| (g, f.apply(g, v))).collect()
}

/// Sections of a group presheaf over a sieve: the compatible families with
/// componentwise multiplication, realized as a finite group. Returns the
/// group together with the families indexing its elements.
pub fn sections_group(
    f: &GroupPresheaf,
    site: &Site,
    sieve: &Sieve,
) -> (FiniteGroup, Vec<Family>) {
    let fams = sections_set(&f.as_set_presheaf(), site, sieve);
    let mul_fam = |a: &Family, b: &Family| -> Family {
        a.iter()
            .map(|(&g, &x)| {
                let gp = &f.values[site.cat.src(g)];
                (g, gp.mul[x][b[&g]])
            })
            .collect()
    };
    let idx: BTreeMap<&Family, usize> = fams.iter().enumerate().map(|(i, fa)| (fa, i)).collect();
    let mut mul = vec![vec![0usize; fams.len()]; fams.len()];
    for (i, a) in fams.iter().enumerate() {
        for (j, b) in fams.iter().enumerate() {
            mul[i][j] = idx[&mul_fam(a, b)];
        }
    }
    // reorder so the identity family is element 0
    let id_fam: Family = sieve.arrows.iter().map(|&g| (g, 0usize)).collect();
    let id_at = idx[&id_fam];
    let mut order: Vec<usize> = (0..fams.len()).collect();
    order.swap(0, id_at);
    let remap: Vec<usize> = {
        let mut r = vec![0; fams.len()];
        for (new, &old) in order.iter().enumerate() {
            r[old] = new;
        }
        r
    };
    let mut mul2 = vec![vec![0usize; fams.len()]; fams.len()];
    for i in 0..fams.len() {
        for j in 0..fams.len() {
            mul2[remap[i]][remap[j]] = remap[mul[i][j]];
        }
    }
    let fams2: Vec<Family> = order.into_iter().map(|o| fams[o].clone()).collect();
    let g = FiniteGroup::from_table("sections", mul2).expect("sections form a group");
    (g, fams2)
}

/// Sections of an abelian presheaf over a sieve, as a presented group with
/// one block of generators per sieve arrow (the kernel of the compatibility
/// map out of the product).
pub struct AbSections {
    pub arrows: Vec<MorId>,
    /// offsets of each arrow block inside the ambient product
    pub offsets: Vec<usize>,
    pub ambient: PresAb,
    pub group: PresAb,
    /// inclusion of the section group into the ambient product
    pub include: PresHom,
}

pub fn sections_ab(f: &AbPresheaf, site: &Site, sieve: &Sieve) -> AbSections {
    let cat = &site.cat;
    let arrows: Vec<MorId> = sieve.arrows.iter().copied().collect();
    let mut offsets = vec![];
    let mut gens = 0usize;
    for &g in &arrows {
        offsets.push(gens);
        gens += f.values[cat.src(g)].gens;
    }
    let mut rel_cols: Vec<Vec<num_bigint::BigInt>> = vec![];
    let mut ambient_rels = IntMat::zero(gens, 0);
    for (ai, &g) in arrows.iter().enumerate() {
        let v = &f.values[cat.src(g)];
        for j in 0..v.rels.cols {
            let mut col = vec![num_bigint::BigInt::from(0); gens];
            for i in 0..v.gens {
                col[offsets[ai] + i] = v.rels.get(i, j).clone();
            }
            rel_cols.push(col);
        }
    }
    if !rel_cols.is_empty() {
        ambient_rels = IntMat::from_columns(gens, &rel_cols);
    }
    let ambient = PresAb::new(gens, ambient_rels);
    // compatibility map: for every (g in sieve, h) with g o h in sieve,
    // the difference F(h)(x_g) - x_{g o h}
    let mut rows: Vec<(MorId, MorId, MorId)> = vec![]; // (g, h, gh)
    for &g in &arrows {
        for h in 0..cat.morphisms.len() {
            if let Some(gh) = cat.comp(g, h) {
                if sieve.arrows.contains(&gh) && !cat.is_identity(h) {
                    rows.push((g, h, gh));
                }
            }
        }
    }
    let tgt_gens: usize = rows.iter().map(|&(_, h, _)| f.values[cat.src(h)].gens).sum();
    let mut map = IntMat::zero(tgt_gens, gens);
    let mut tgt_rel_cols: Vec<Vec<num_bigint::BigInt>> = vec![];
    let mut roff = 0usize;
    for &(g, h, gh) in &rows {
        let vy = &f.values[cat.src(h)];
        let r = &f.restrict[h]; // F(tgt h) -> F(src h); tgt(h) = src(g)
        let ai = arrows.iter().position(|&a| a == g).unwrap();
        let bi = arrows.iter().position(|&a| a == gh).unwrap();
        for i in 0..vy.gens {
            for j in 0..f.values[cat.src(g)].gens {
                map.set(roff + i, offsets[ai] + j, r.get(i, j).clone());
            }
            let cur = map.get(roff + i, offsets[bi] + i).clone() - num_bigint::BigInt::from(1);
            map.set(roff + i, offsets[bi] + i, cur);
        }
        for j in 0..vy.rels.cols {
            let mut col = vec![num_bigint::BigInt::from(0); tgt_gens];
            for i in 0..vy.gens {
                col[roff + i] = vy.rels.get(i, j).clone();
            }
            tgt_rel_cols.push(col);
        }
        roff += vy.gens;
    }
    let tgt_rels = if tgt_rel_cols.is_empty() {
        IntMat::zero(tgt_gens, 0)
    } else {
        IntMat::from_columns(tgt_gens, &tgt_rel_cols)
    };
    let tgt = PresAb::new(tgt_gens, tgt_rels);
    let hom = PresHom::new(ambient.clone(), tgt, map).expect("compatibility map is a hom");
    let (group, include) = hom.kernel();
    AbSections { arrows, offsets, ambient, group, include }
}

impl AbSections {
    /// Canonical map F(X) -> sections (restrict along every arrow), as a
    /// hom into the section group.
    pub fn canonical_from(&self, f: &AbPresheaf, site: &Site, base: ObjId) -> PresHom {
        let cat = &site.cat;
        let v = &f.values[base];
        let mut m = IntMat::zero(self.ambient.gens, v.gens);
        for (ai, &g) in self.arrows.iter().enumerate() {
            let r = &f.restrict[g];
            for i in 0..r.rows {
                for j in 0..r.cols {
                    m.set(self.offsets[ai] + i, j, r.get(i, j).clone());
                }
            }
        }
        // solve through the kernel inclusion, modulo ambient relations
        let stacked = self.include.map.hcat(&self.ambient.rels);
        let mut cols = vec![];
        for j in 0..v.gens {
            let sol = crate::exact::solve(&stacked, &m.column(j))
                .expect("canonical family lies in the section group");
            cols.push(sol[..self.group.gens].to_vec());
        }
        let mm = if cols.is_empty() {
            IntMat::zero(self.group.gens, 0)
        } else {
            IntMat::from_columns(self.group.gens, &cols)
        };
        PresHom::new(v.clone(), self.group.clone(), mm).expect("canonical map is a hom")
    }
}

/// Report from a sheaf check.
#[derive(Clone, Debug, Default)]
pub struct SheafReport {
    pub failures: Vec<String>,
    pub checked: usize,
}

impl SheafReport {
    pub fn is_sheaf(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Which covering sieves a sheaf check runs over. Checking only the minimal
/// covering sieve of every object is equivalent to checking all of them
/// (stability transports agreement over a minimal sieve to any larger one),
/// and is the default on sites with many sieves.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SheafCheckMode {
    Exhaustive,
    MinimalOnly,
    Auto,
}

fn covering_sieves_for_check(site: &Site, x: ObjId, mode: SheafCheckMode) -> Vec<Sieve> {
    match mode {
        SheafCheckMode::MinimalOnly => vec![site.minimal_covering_sieve(x)],
        SheafCheckMode::Exhaustive => site
            .enumerate_sieves(x)
            .into_iter()
            .filter(|(_, cov)| *cov)
            .map(|(s, _)| s)
            .collect(),
        SheafCheckMode::Auto => {
            let arrows = site.cat.morphisms_into(x).len();
            if arrows <= 8 {
                covering_sieves_for_check(site, x, SheafCheckMode::Exhaustive)
            } else {
                covering_sieves_for_check(site, x, SheafCheckMode::MinimalOnly)
            }
        }
    }
}

pub fn is_sheaf_set(f: &SetPresheaf, site: &Site, mode: SheafCheckMode) -> SheafReport {
    let mut rep = SheafReport::default();
    for x in 0..site.cat.objects.len() {
        for sieve in covering_sieves_for_check(site, x, mode) {
            rep.checked += 1;
            let secs = sections_set(f, site, &sieve);
            let canon: Vec<Family> = (0..f.values[x].len())
                .map(|v| canonical_family_set(f, &site.cat, &sieve, v))
                .collect();
            let injective = {
                let mut seen = BTreeSet::new();
                canon.iter().all(|fam| seen.insert(fam.clone()))
            };
            let surjective = secs.iter().all(|s| canon.contains(s));
            if !(injective && surjective && canon.len() == secs.len()) {
                rep.failures.push(format!(
                    "sections over a covering sieve of {} differ from values ({} vs {})",
                    site.cat.objects[x],
                    f.values[x].len(),
                    secs.len()
                ));
                return rep;
            }
        }
    }
    rep
}

pub fn is_sheaf_group(f: &GroupPresheaf, site: &Site, mode: SheafCheckMode) -> SheafReport {
    // bijectivity of the canonical map is an isomorphism test for groups:
    // the map is always a homomorphism
    is_sheaf_set(&f.as_set_presheaf(), site, mode)
}

pub fn is_sheaf_ab(f: &AbPresheaf, site: &Site, mode: SheafCheckMode) -> SheafReport {
    let mut rep = SheafReport::default();
    for x in 0..site.cat.objects.len() {
        for sieve in covering_sieves_for_check(site, x, mode) {
            rep.checked += 1;
            let secs = sections_ab(f, site, &sieve);
            let canon = secs.canonical_from(f, site, x);
            if !canon.is_isomorphism() {
                rep.failures.push(format!(
                    "sections over a covering sieve of {} differ from values",
                    site.cat.objects[x]
                ));
                return rep;
            }
        }
    }
    rep
}

/// Map of set presheaves (one function per object).
#[derive(Clone, Debug)]
pub struct SetPshMap {
    pub maps: Vec<Vec<usize>>,
}

impl SetPshMap {
    pub fn validate(&self, cat: &FiniteCategory, src: &SetPresheaf, tgt: &SetPresheaf) -> Result<(), DescentError> {
        if self.maps.len() != cat.objects.len() {
            return Err(DescentError::Invalid("presheaf map has wrong length".into()));
        }
        for (x, m) in self.maps.iter().enumerate() {
            if m.len() != src.values[x].len() || m.iter().any(|&v| v >= tgt.values[x].len()) {
                return Err(DescentError::Invalid(format!(
                    "presheaf map at {} has wrong shape",
                    cat.objects[x]
                )));
            }
        }
        for f in 0..cat.morphisms.len() {
            let (a, b) = (cat.tgt(f), cat.src(f));
            for v in 0..src.values[a].len() {
                if self.maps[b][src.apply(f, v)] != tgt.apply(f, self.maps[a][v]) {
                    return Err(DescentError::Invalid(format!(
                        "presheaf map not natural along {}",
                        cat.morphisms[f].name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_isomorphism(&self, src: &SetPresheaf, tgt: &SetPresheaf) -> bool {
        self.maps.iter().enumerate().all(|(x, m)| {
            let mut seen = vec![false; tgt.values[x].len()];
            m.len() == tgt.values[x].len() && m.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
                && src.values[x].len() == tgt.values[x].len()
        })
    }
}

/// Plus construction for set presheaves: value at X is the set of sections
/// over the minimal covering sieve (the covering sieves are closed under
/// intersection, so the filtered colimit over them is attained there).
pub fn plus_set(f: &SetPresheaf, site: &Site) -> (SetPresheaf, SetPshMap) {
    let cat = &site.cat;
    let min_sieves: Vec<Sieve> =
        (0..cat.objects.len()).map(|x| site.minimal_covering_sieve(x)).collect();
    let secs: Vec<Vec<Family>> =
        (0..cat.objects.len()).map(|x| sections_set(f, site, &min_sieves[x])).collect();
    let label = |fam: &Family| -> String {
        let parts: Vec<String> = fam.iter().map(|(g, v)| format!("{g}:{v}")).collect();
        format!("[{}]", parts.join(","))
    };
    let values: Vec<Vec<String>> = secs.iter().map(|s| s.iter().map(label).collect()).collect();
    let mut restrict = vec![];
    for m in 0..cat.morphisms.len() {
        let (x, y) = (cat.tgt(m), cat.src(m));
        let mut table = vec![];
        for fam in &secs[x] {
            // restricted family: h in minimal sieve of y picks up m o h
            let rfam: Family = min_sieves[y]
                .arrows
                .iter()
                .map(|&h| {
                    let mh = cat.comp(m, h).expect("sieve arrows compose");
                    (h, fam[&mh])
                })
                .collect();
            let pos = secs[y].iter().position(|s| s == &rfam).expect("restriction is a section");
            table.push(pos);
        }
        restrict.push(table);
    }
    let plus = SetPresheaf { values, restrict };
    let maps: Vec<Vec<usize>> = (0..cat.objects.len())
        .map(|x| {
            (0..f.values[x].len())
                .map(|v| {
                    let fam = canonical_family_set(f, cat, &min_sieves[x], v);
                    secs[x].iter().position(|s| s == &fam).expect("canonical family is compatible")
                })
                .collect()
        })
        .collect();
    (plus, SetPshMap { maps })
}

pub fn sheafify_set(f: &SetPresheaf, site: &Site) -> (SetPresheaf, SetPshMap) {
    let (p1, m1) = plus_set(f, site);
    let (p2, m2) = plus_set(&p1, site);
    let maps = m1
        .maps
        .iter()
        .enumerate()
        .map(|(x, m)| m.iter().map(|&v| m2.maps[x][v]).collect())
        .collect();
    (p2, SetPshMap { maps })
}

/// Group-valued plus construction: the section groups with the induced
/// restriction homomorphisms.
pub fn plus_group(f: &GroupPresheaf, site: &Site) -> (GroupPresheaf, Vec<GroupHom>) {
    let cat = &site.cat;
    let min_sieves: Vec<Sieve> =
        (0..cat.objects.len()).map(|x| site.minimal_covering_sieve(x)).collect();
    let mut groups = vec![];
    let mut fams_at = vec![];
    for x in 0..cat.objects.len() {
        let (g, fams) = sections_group(f, site, &min_sieves[x]);
        groups.push(g);
        fams_at.push(fams);
    }
    let mut restrict = vec![];
    for m in 0..cat.morphisms.len() {
        let (x, y) = (cat.tgt(m), cat.src(m));
        let map: Vec<usize> = fams_at[x]
            .iter()
            .map(|fam| {
                let rfam: Family = min_sieves[y]
                    .arrows
                    .iter()
                    .map(|&h| {
                        let mh = cat.comp(m, h).expect("sieve arrows compose");
                        (h, fam[&mh])
                    })
                    .collect();
                fams_at[y].iter().position(|s| s == &rfam).expect("restriction is a section")
            })
            .collect();
        restrict.push(GroupHom { map });
    }
    let plus = GroupPresheaf { values: groups, restrict };
    let canon: Vec<GroupHom> = (0..cat.objects.len())
        .map(|x| {
            let map = (0..f.values[x].order())
                .map(|v| {
                    let fam: Family = min_sieves[x]
                        .arrows
                        .iter()
                        .map(|&g| (g, f.restrict[g].map[v]))
                        .collect();
                    fams_at[x].iter().position(|s| s == &fam).expect("canonical family compatible")
                })
                .collect();
            GroupHom { map }
        })
        .collect();
    (plus, canon)
}

pub fn sheafify_group(f: &GroupPresheaf, site: &Site) -> (GroupPresheaf, Vec<GroupHom>) {
    let (p1, c1) = plus_group(f, site);
    let (p2, c2) = plus_group(&p1, site);
    let canon = c1
        .iter()
        .enumerate()
        .map(|(x, h)| c2[x].compose(h))
        .collect();
    (p2, canon)
}

/// Abelian plus construction through the presented-group machinery.
pub fn plus_ab(f: &AbPresheaf, site: &Site) -> (AbPresheaf, Vec<PresHom>) {
    let cat = &site.cat;
    let min_sieves: Vec<Sieve> =
        (0..cat.objects.len()).map(|x| site.minimal_covering_sieve(x)).collect();
    let secs: Vec<AbSections> =
        (0..cat.objects.len()).map(|x| sections_ab(f, site, &min_sieves[x])).collect();
    let values: Vec<PresAb> = secs.iter().map(|s| s.group.clone()).collect();
    let mut restrict = vec![];
    for m in 0..cat.morphisms.len() {
        let (x, y) = (cat.tgt(m), cat.src(m));
        // ambient-level restriction: block (h, m o h) identity
        let sx = &secs[x];
        let sy = &secs[y];
        let mut amb = IntMat::zero(sy.ambient.gens, sx.ambient.gens);
        for (bi, &h) in sy.arrows.iter().enumerate() {
            let mh = cat.comp(m, h).expect("sieve arrows compose");
            let ai = sx.arrows.iter().position(|&a| a == mh).expect("restricted arrow in sieve");
            let block = f.values[cat.src(h)].gens;
            for i in 0..block {
                amb.set(sy.offsets[bi] + i, sx.offsets[ai] + i, num_bigint::BigInt::from(1));
            }
        }
        // conjugate through the kernel inclusions
        let through = amb.mul(&sx.include.map);
        let stacked = sy.include.map.hcat(&sy.ambient.rels);
        let mut cols = vec![];
        for j in 0..through.cols {
            let sol = crate::exact::solve(&stacked, &through.column(j))
                .expect("restricted section is a section");
            cols.push(sol[..sy.group.gens].to_vec());
        }
        let mm = if cols.is_empty() {
            IntMat::zero(sy.group.gens, 0)
        } else {
            IntMat::from_columns(sy.group.gens, &cols)
        };
        restrict.push(mm);
    }
    let plus = AbPresheaf { values, restrict, uniform: None };
    let canon: Vec<PresHom> = (0..cat.objects.len())
        .map(|x| secs[x].canonical_from(f, site, x))
        .collect();
    (plus, canon)
}

pub fn sheafify_ab(f: &AbPresheaf, site: &Site) -> (AbPresheaf, Vec<PresHom>) {
    let (p1, c1) = plus_ab(f, site);
    let (p2, c2) = plus_ab(&p1, site);
    let canon = c1
        .iter()
        .enumerate()
        .map(|(x, h)| c2[x].compose(h))
        .collect();
    (p2, canon)
}

/// Group presheaf sheafification, exposed under the homotopy-group-sheaf
/// interface used by the stack machinery.
pub fn homotopy_group_sheaf(f: &GroupPresheaf, site: &Site) -> GroupPresheaf {
    sheafify_group(f, site).0
}

// ---------------------------------------------------------------------------
// constructors

/// Honestly constant set presheaf: the same value everywhere, identity
/// restrictions (including the empty open of a space site, where
/// sheafification later collapses the value).
pub fn constant_set(site: &Site, labels: &[&str]) -> SetPresheaf {
    let cat = &site.cat;
    let values: Vec<Vec<String>> = (0..cat.objects.len())
        .map(|_| labels.iter().map(|s| s.to_string()).collect())
        .collect();
    let restrict = (0..cat.morphisms.len()).map(|_| (0..labels.len()).collect()).collect();
    SetPresheaf { values, restrict }
}

/// Locally constant sheaf of sets: value = labels^(components), restriction
/// follows the refinement of components.
pub fn locally_constant_set(site: &Site, labels: &[&str]) -> SetPresheaf {
    let sp = site.space.as_ref().expect("locally constant needs a space site");
    let cat = &site.cat;
    let comps: Vec<Vec<BTreeSet<usize>>> =
        (0..cat.objects.len()).map(|x| sp.components(x)).collect();
    let k = labels.len();
    let sizes: Vec<usize> = comps.iter().map(|c| k.pow(c.len() as u32)).collect();
    let decode = |x: ObjId, mut code: usize| -> Vec<usize> {
        let mut out = vec![];
        for _ in 0..comps[x].len() {
            out.push(code % k);
            code /= k;
        }
        out
    };
    let encode = |x: ObjId, digits: &[usize]| -> usize {
        let mut code = 0usize;
        for (i, &d) in digits.iter().enumerate().rev() {
            code = code * k + d;
            let _ = i;
        }
        code
    };
    let values: Vec<Vec<String>> = (0..cat.objects.len())
        .map(|x| {
            (0..sizes[x])
                .map(|c| {
                    let d = decode(x, c);
                    d.iter().map(|&i| labels[i]).collect::<Vec<_>>().join("|")
                })
                .collect()
        })
        .collect();
    let restrict: Vec<Vec<usize>> = (0..cat.morphisms.len())
        .map(|f| {
            let (x, y) = (cat.tgt(f), cat.src(f));
            (0..sizes[x])
                .map(|c| {
                    let dx = decode(x, c);
                    // each component of y sits inside a unique component of x
                    let dy: Vec<usize> = comps[y]
                        .iter()
                        .map(|cy| {
                            let rep = *cy.iter().next().expect("component nonempty");
                            let ci = comps[x]
                                .iter()
                                .position(|cx| cx.contains(&rep))
                                .expect("component refines");
                            dx[ci]
                        })
                        .collect();
                    encode(y, &dy)
                })
                .collect()
        })
        .collect();
    SetPresheaf { values, restrict }
}

/// Honestly constant group presheaf (same group everywhere, identity
/// restrictions).
pub fn constant_group(site: &Site, g: &FiniteGroup) -> GroupPresheaf {
    let cat = &site.cat;
    let values: Vec<FiniteGroup> = (0..cat.objects.len()).map(|_| g.clone()).collect();
    let restrict = (0..cat.morphisms.len())
        .map(|_| GroupHom { map: (0..g.order()).collect() })
        .collect();
    GroupPresheaf { values, restrict }
}

pub fn locally_constant_group(site: &Site, g: &FiniteGroup) -> GroupPresheaf {
    let sp = site.space.as_ref().expect("locally constant needs a space site");
    let cat = &site.cat;
    let comps: Vec<Vec<BTreeSet<usize>>> =
        (0..cat.objects.len()).map(|x| sp.components(x)).collect();
    let values: Vec<FiniteGroup> = comps.iter().map(|c| g.power(c.len())).collect();
    let n = g.order();
    let restrict: Vec<GroupHom> = (0..cat.morphisms.len())
        .map(|f| {
            let (x, y) = (cat.tgt(f), cat.src(f));
            let cx = comps[x].len();
            let cy = comps[y].len();
            // component i of y lies in component pos(i) of x
            let pos: Vec<usize> = comps[y]
                .iter()
                .map(|c| {
                    let rep = *c.iter().next().unwrap();
                    comps[x].iter().position(|cc| cc.contains(&rep)).unwrap()
                })
                .collect();
            let decode = |mut code: usize, len: usize| -> Vec<usize> {
                let mut out = vec![0; len];
                for d in (0..len).rev() {
                    out[d] = code % n;
                    code /= n;
                }
                out
            };
            let encode = |digits: &[usize]| -> usize {
                digits.iter().fold(0usize, |acc, &d| acc * n + d)
            };
            let map = (0..values[x].order())
                .map(|code| {
                    let dx = decode(code, cx);
                    let dy: Vec<usize> = (0..cy).map(|i| dx[pos[i]]).collect();
                    encode(&dy)
                })
                .collect();
            GroupHom { map }
        })
        .collect();
    GroupPresheaf { values, restrict }
}

/// Honestly constant abelian presheaf (same group everywhere, identity
/// restrictions; sheafification kills the value on the empty open).
pub fn constant_ab(site: &Site, g: &FgAb) -> AbPresheaf {
    let cat = &site.cat;
    let p = PresAb::from_fgab(g);
    let values: Vec<PresAb> = (0..cat.objects.len()).map(|_| p.clone()).collect();
    let restrict = (0..cat.morphisms.len()).map(|_| IntMat::identity(p.gens)).collect();
    let uniform = Some(UniformAb {
        base: g.clone(),
        comp_counts: vec![1; cat.objects.len()],
        comp_maps: (0..cat.morphisms.len()).map(|_| IntMat::identity(1)).collect(),
    });
    AbPresheaf { values, restrict, uniform }
}

pub fn locally_constant_ab(site: &Site, g: &FgAb) -> AbPresheaf {
    let sp = site.space.as_ref().expect("locally constant needs a space site");
    let cat = &site.cat;
    let comps: Vec<Vec<BTreeSet<usize>>> =
        (0..cat.objects.len()).map(|x| sp.components(x)).collect();
    let p = PresAb::from_fgab(g);
    let block = p.gens;
    let power = |n: usize| -> PresAb {
        let gens = block * n;
        let mut cols = vec![];
        for b in 0..n {
            for j in 0..p.rels.cols {
                let mut col = vec![num_bigint::BigInt::from(0); gens];
                for i in 0..block {
                    col[b * block + i] = p.rels.get(i, j).clone();
                }
                cols.push(col);
            }
        }
        let rels = if cols.is_empty() { IntMat::zero(gens, 0) } else { IntMat::from_columns(gens, &cols) };
        PresAb::new(gens, rels)
    };
    let values: Vec<PresAb> = comps.iter().map(|c| power(c.len())).collect();
    let restrict: Vec<IntMat> = (0..cat.morphisms.len())
        .map(|f| {
            let (x, y) = (cat.tgt(f), cat.src(f));
            let mut m = IntMat::zero(values[y].gens, values[x].gens);
            for (i, cy) in comps[y].iter().enumerate() {
                let rep = *cy.iter().next().unwrap();
                let ci = comps[x].iter().position(|cx| cx.contains(&rep)).unwrap();
                for t in 0..block {
                    m.set(i * block + t, ci * block + t, num_bigint::BigInt::from(1));
                }
            }
            m
        })
        .collect();
    let comp_maps: Vec<IntMat> = (0..cat.morphisms.len())
        .map(|f| {
            let (x, y) = (cat.tgt(f), cat.src(f));
            let mut m = IntMat::zero(comps[y].len(), comps[x].len());
            for (i, cy) in comps[y].iter().enumerate() {
                let rep = *cy.iter().next().unwrap();
                let ci = comps[x].iter().position(|cx| cx.contains(&rep)).unwrap();
                m.set(i, ci, num_bigint::BigInt::from(1));
            }
            m
        })
        .collect();
    let uniform = Some(UniformAb {
        base: g.clone(),
        comp_counts: comps.iter().map(|c| c.len()).collect(),
        comp_maps,
    });
    AbPresheaf { values, restrict, uniform }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::site::fixture;

    #[test]
    fn constant_z_is_not_a_sheaf_locally_constant_is() {
        let s = fixture("pseudocircle").unwrap();
        let cz = constant_ab(&s, &FgAb::free(1));
        cz.validate(&s.cat).unwrap();
        assert!(!is_sheaf_ab(&cz, &s, SheafCheckMode::Exhaustive).is_sheaf());
        let lz = locally_constant_ab(&s, &FgAb::free(1));
        lz.validate(&s.cat).unwrap();
        assert!(is_sheaf_ab(&lz, &s, SheafCheckMode::Exhaustive).is_sheaf());
    }

    #[test]
    fn coarse_site_everything_is_a_sheaf() {
        let s = fixture("coarse:square").unwrap();
        let c = constant_set(&s, &["x", "y", "z"]);
        c.validate(&s.cat).unwrap();
        assert!(is_sheaf_set(&c, &s, SheafCheckMode::Exhaustive).is_sheaf());
    }

    #[test]
    fn sections_of_constant_over_generated_sieve() {
        let s = fixture("pseudocircle").unwrap();
        let x = s.cat.obj("X").unwrap();
        let uc = s.cat.obj("Uc").unwrap();
        let ud = s.cat.obj("Ud").unwrap();
        let fam = crate::site::CoveringFamily {
            target: x,
            members: vec![
                s.cat.morphisms_between(uc, x)[0],
                s.cat.morphisms_between(ud, x)[0],
            ],
        };
        let sieve = s.generate_sieve(&fam);
        // constant two-element set: all components forced equal
        let c = constant_set(&s, &["0", "1"]);
        assert_eq!(sections_set(&c, &s, &sieve).len(), 2);
        // locally constant: still forced equal over this connected glueing?
        // the sieve identifies values on Uc and Ud through ab, which is
        // disconnected, so sections match the circle: still 2 for sets of
        // labels but the abelian version distinguishes rank
        let lz = locally_constant_ab(&s, &FgAb::free(1));
        let secs = sections_ab(&lz, &s, &sieve);
        assert_eq!(secs.group.to_fgab(), FgAb::free(1));
        let cz = constant_ab(&s, &FgAb::free(1));
        let secs = sections_ab(&cz, &s, &sieve);
        assert_eq!(secs.group.to_fgab(), FgAb::free(1));
    }

    #[test]
    fn plus_construction_on_constant_z() {
        let s = fixture("pseudocircle").unwrap();
        let cz = constant_ab(&s, &FgAb::free(1));
        let (hf, _) = plus_ab(&cz, &s);
        hf.validate(&s.cat).unwrap();
        let ab = s.cat.obj("ab").unwrap();
        // one pass fixes the empty open but the disconnected open still
        // carries the old glued-through-empty value, so it is not a sheaf yet
        assert_eq!(hf.values[ab].to_fgab(), FgAb::free(1));
        let e = s.cat.obj("empty").unwrap();
        assert!(hf.values[e].to_fgab().is_trivial());
        assert!(!is_sheaf_ab(&hf, &s, SheafCheckMode::Exhaustive).is_sheaf());
        let (shf, _) = sheafify_ab(&cz, &s);
        shf.validate(&s.cat).unwrap();
        assert!(is_sheaf_ab(&shf, &s, SheafCheckMode::Exhaustive).is_sheaf());
        let x = s.cat.obj("X").unwrap();
        assert_eq!(shf.values[x].to_fgab(), FgAb::free(1));
        assert_eq!(shf.values[ab].to_fgab(), FgAb::free(2));
        assert!(shf.values[e].to_fgab().is_trivial());
    }

    #[test]
    fn sheaf_input_is_fixed_by_plus() {
        let s = fixture("pseudocircle").unwrap();
        let lz = locally_constant_set(&s, &["0", "1"]);
        lz.validate(&s.cat).unwrap();
        let (hf, canon) = plus_set(&lz, &s);
        hf.validate(&s.cat).unwrap();
        canon.validate(&s.cat, &lz, &hf).unwrap();
        assert!(canon.is_isomorphism(&lz, &hf));
    }

    #[test]
    fn empty_open_forced_trivial() {
        let s = fixture("pseudocircle").unwrap();
        // presheaf with a fat value on the empty open
        let mut f = locally_constant_set(&s, &["0", "1"]);
        let e = s.cat.obj("empty").unwrap();
        f.values[e] = vec!["junk0".into(), "junk1".into(), "junk2".into()];
        for m in 0..s.cat.morphisms.len() {
            if s.cat.src(m) == e && !s.cat.is_identity(m) {
                f.restrict[m] = vec![0; f.values[s.cat.tgt(m)].len()];
            }
            if s.cat.src(m) == e && s.cat.is_identity(m) {
                f.restrict[m] = (0..3).collect();
            }
        }
        f.validate(&s.cat).unwrap();
        let (sf, _) = sheafify_set(&f, &s);
        assert_eq!(sf.values[e].len(), 1);
        assert!(is_sheaf_set(&sf, &s, SheafCheckMode::Exhaustive).is_sheaf());
    }

    #[test]
    fn group_sheafification_s3() {
        let s = fixture("pseudocircle").unwrap();
        let c = constant_group(&s, &FiniteGroup::s3());
        c.validate(&s.cat).unwrap();
        let (sf, _) = sheafify_group(&c, &s);
        sf.validate(&s.cat).unwrap();
        assert!(is_sheaf_group(&sf, &s, SheafCheckMode::Exhaustive).is_sheaf());
        let ab = s.cat.obj("ab").unwrap();
        assert_eq!(sf.values[ab].order(), 36);
    }

    #[test]
    fn canonical_map_iso_iff_sheaf() {
        let s = fixture("pseudocircle").unwrap();
        // a sheaf: canonical map to the plus construction is iso
        let lz = locally_constant_set(&s, &["0", "1"]);
        let (p, c) = plus_set(&lz, &s);
        assert!(c.is_isomorphism(&lz, &p));
        assert!(is_sheaf_set(&lz, &s, SheafCheckMode::Exhaustive).is_sheaf());
        // not a sheaf: canonical map is not iso
        let cs = constant_set(&s, &["0", "1"]);
        let (p, c) = plus_set(&cs, &s);
        assert!(!c.is_isomorphism(&cs, &p));
        assert!(!is_sheaf_set(&cs, &s, SheafCheckMode::Exhaustive).is_sheaf());
    }
}
