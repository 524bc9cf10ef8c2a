//! Grothendieck topologies on finite categories: sieves, covering families,
//! chosen fiber products, site axioms, and the fixture sites everything is
//! tested against.

use crate::error::DescentError;
use crate::fincat::{CategoryBuilder, FiniteCategory, MorId, ObjId};
use std::collections::{BTreeMap, BTreeSet};

/// Sieve over a fixed object: a set of arrows into it closed under
/// precomposition.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Sieve {
    pub base: ObjId,
    pub arrows: BTreeSet<MorId>,
}

impl Sieve {
    pub fn maximal(cat: &FiniteCategory, base: ObjId) -> Sieve {
        Sieve { base, arrows: cat.morphisms_into(base).into_iter().collect() }
    }

    pub fn empty(base: ObjId) -> Sieve {
        Sieve { base, arrows: BTreeSet::new() }
    }

    pub fn is_closed(&self, cat: &FiniteCategory) -> bool {
        self.arrows.iter().all(|&f| {
            cat.tgt(f) == self.base
                && (0..cat.morphisms.len()).all(|g| {
                    cat.comp(f, g).map_or(true, |fg| self.arrows.contains(&fg))
                })
        })
    }

    pub fn contains(&self, other: &Sieve) -> bool {
        self.base == other.base && other.arrows.is_subset(&self.arrows)
    }

    /// Any sieve on a finite site contains the finite family of all its
    /// arrows; this extracts that witness.
    pub fn finite_cover_witness(&self) -> Vec<MorId> {
        self.arrows.iter().copied().collect()
    }
}

/// Covering family: a list of morphisms with a common target.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CoveringFamily {
    pub target: ObjId,
    pub members: Vec<MorId>,
}

/// Structure of an underlying finite topological space, kept by sites that
/// come from spaces; drives component counts and canonical covers.
#[derive(Clone, Debug)]
pub struct SpaceStructure {
    pub points: Vec<String>,
    /// minimal open of each point, as a point set
    pub min_open: Vec<BTreeSet<usize>>,
    /// point set of each site object
    pub obj_points: Vec<BTreeSet<usize>>,
}

impl SpaceStructure {
    /// Connected components of the point set of an object, each returned as
    /// a sorted set. Two points are adjacent when their minimal opens nest.
    pub fn components(&self, obj: ObjId) -> Vec<BTreeSet<usize>> {
        let pts: Vec<usize> = self.obj_points[obj].iter().copied().collect();
        let mut comp: BTreeMap<usize, usize> = pts.iter().map(|&p| (p, p)).collect();
        fn find(comp: &mut BTreeMap<usize, usize>, p: usize) -> usize {
            let mut root = p;
            while comp[&root] != root {
                root = comp[&root];
            }
            let mut cur = p;
            while comp[&cur] != root {
                let next = comp[&cur];
                comp.insert(cur, root);
                cur = next;
            }
            root
        }
        for (i, &p) in pts.iter().enumerate() {
            for &q in pts.iter().skip(i + 1) {
                let adj = self.min_open[p].contains(&q)
                    || self.min_open[q].contains(&p)
                    || self.min_open[p].is_subset(&self.min_open[q])
                    || self.min_open[q].is_subset(&self.min_open[p]);
                if adj {
                    let (a, b) = (find(&mut comp, p), find(&mut comp, q));
                    if a != b {
                        comp.insert(a, b);
                    }
                }
            }
        }
        let mut buckets: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &p in &pts {
            let r = find(&mut comp, p);
            buckets.entry(r).or_default().insert(p);
        }
        buckets.into_values().collect()
    }
}

/// Finite site: category, covering families, chosen fiber products, and an
/// optional space structure.
#[derive(Clone, Debug)]
pub struct Site {
    pub cat: FiniteCategory,
    /// listed covering families per object; always includes the identity
    /// singleton, and for space sites enough families to generate the
    /// topology (coverage itself is decided semantically)
    pub covers: Vec<Vec<CoveringFamily>>,
    /// chosen pullback (p, p1: p -> a, p2: p -> b) per cospan (f: a -> x, g: b -> x)
    pub pullbacks: BTreeMap<(MorId, MorId), (ObjId, MorId, MorId)>,
    pub space: Option<SpaceStructure>,
    /// canonical finest covering family per object (minimal opens for space
    /// sites, the identity for coarse ones)
    pub canonical_cover: Vec<CoveringFamily>,
}

impl Site {
    /// Is the sieve a covering sieve? For space sites this is the union
    /// condition on points; otherwise the sieve must contain a listed family.
    pub fn is_covering_sieve(&self, s: &Sieve) -> bool {
        if let Some(sp) = &self.space {
            let mut union: BTreeSet<usize> = BTreeSet::new();
            for &f in &s.arrows {
                union.extend(sp.obj_points[self.cat.src(f)].iter().copied());
            }
            return union == sp.obj_points[s.base];
        }
        self.covers[s.base]
            .iter()
            .any(|fam| fam.members.iter().all(|m| s.arrows.contains(m)))
    }

    pub fn generate_sieve(&self, fam: &CoveringFamily) -> Sieve {
        let mut arrows = BTreeSet::new();
        for &m in &fam.members {
            for g in self.cat.morphisms_into(fam.target) {
                // g factors through m?
                let factors = self
                    .cat
                    .morphisms_between(self.cat.src(g), self.cat.src(m))
                    .into_iter()
                    .any(|h| self.cat.comp(m, h) == Some(g));
                if factors {
                    arrows.insert(g);
                }
            }
        }
        Sieve { base: fam.target, arrows }
    }

    pub fn pullback_sieve(&self, f: MorId, s: &Sieve) -> Result<Sieve, DescentError> {
        if self.cat.tgt(f) != s.base {
            return Err(DescentError::Invalid(
                "pullback along a morphism with the wrong target".into(),
            ));
        }
        let y = self.cat.src(f);
        let arrows = self
            .cat
            .morphisms_into(y)
            .into_iter()
            .filter(|&g| self.cat.comp(f, g).map_or(false, |fg| s.arrows.contains(&fg)))
            .collect();
        Ok(Sieve { base: y, arrows })
    }

    /// The minimal covering sieve over an object (covering sieves on a
    /// finite site are closed under intersection, so it exists).
    pub fn minimal_covering_sieve(&self, x: ObjId) -> Sieve {
        let mut cur = Sieve::maximal(&self.cat, x);
        loop {
            let mut shrunk = false;
            let arrows: Vec<MorId> = cur.arrows.iter().copied().collect();
            for &a in &arrows {
                let mut cand = cur.clone();
                cand.arrows.remove(&a);
                // keep closure under precomposition: removing a requires
                // removing everything that factors only through it; simplest
                // is to intersect with all covering sieves directly below
                if cand.is_closed(&self.cat) && self.is_covering_sieve(&cand) {
                    cur = cand;
                    shrunk = true;
                }
            }
            if !shrunk {
                break;
            }
        }
        cur
    }

    /// All sieves over an object, with covering flags, ordered by inclusion
    /// (listed smallest-first by arrow count).
    pub fn enumerate_sieves(&self, x: ObjId) -> Vec<(Sieve, bool)> {
        let arrows = self.cat.morphisms_into(x);
        // precompute: below[f] = arrows that factor through f (f o h)
        let mut below: BTreeMap<MorId, BTreeSet<MorId>> = BTreeMap::new();
        for &f in &arrows {
            let mut set = BTreeSet::new();
            for g in 0..self.cat.morphisms.len() {
                if let Some(fg) = self.cat.comp(f, g) {
                    set.insert(fg);
                }
            }
            below.insert(f, set);
        }
        let mut out: Vec<BTreeSet<MorId>> = vec![BTreeSet::new()];
        for &f in &arrows {
            let mut next = out.clone();
            for s in &out {
                if s.contains(&f) {
                    continue;
                }
                let mut t = s.clone();
                t.extend(below[&f].iter().copied());
                t.insert(f);
                if !next.contains(&t) {
                    next.push(t);
                }
            }
            out = next;
        }
        let mut sieves: Vec<Sieve> = out
            .into_iter()
            .map(|arrows| Sieve { base: x, arrows })
            .filter(|s| s.is_closed(&self.cat))
            .collect();
        sieves.sort_by_key(|s| (s.arrows.len(), s.arrows.iter().copied().collect::<Vec<_>>()));
        sieves.dedup();
        sieves
            .into_iter()
            .map(|s| {
                let cov = self.is_covering_sieve(&s);
                (s, cov)
            })
            .collect()
    }

    /// Does `fine` refine `coarse` (every member factors through a member)?
    pub fn refines(&self, fine: &CoveringFamily, coarse: &CoveringFamily) -> bool {
        fine.members.iter().all(|&v| {
            coarse.members.iter().any(|&u| {
                self.cat
                    .morphisms_between(self.cat.src(v), self.cat.src(u))
                    .into_iter()
                    .any(|h| self.cat.comp(u, h) == Some(v))
            })
        })
    }

    /// One refinement witness per member of `fine`: (index of coarse member, h).
    pub fn refinement_witness(
        &self,
        fine: &CoveringFamily,
        coarse: &CoveringFamily,
    ) -> Option<Vec<(usize, MorId)>> {
        fine.members
            .iter()
            .map(|&v| {
                coarse.members.iter().enumerate().find_map(|(i, &u)| {
                    self.cat
                        .morphisms_between(self.cat.src(v), self.cat.src(u))
                        .into_iter()
                        .find(|&h| self.cat.comp(u, h) == Some(v))
                        .map(|h| (i, h))
                })
            })
            .collect()
    }

    pub fn pullback(&self, f: MorId, g: MorId) -> Result<(ObjId, MorId, MorId), DescentError> {
        self.pullbacks.get(&(f, g)).copied().ok_or_else(|| {
            DescentError::MissingPullback(
                self.cat.morphisms[f].name.clone(),
                self.cat.morphisms[g].name.clone(),
            )
        })
    }
}

/// Report from `check_site`.
#[derive(Clone, Debug, Default)]
pub struct SiteReport {
    pub violations: Vec<String>,
}

impl SiteReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify the sieve-topology axioms and the universal property of every
/// chosen pullback. Exhaustive; intended for desk-scale sites.
pub fn check_site(s: &Site) -> SiteReport {
    let mut rep = SiteReport::default();
    let cat = &s.cat;
    // identity singletons cover
    for x in 0..cat.objects.len() {
        let max = Sieve::maximal(cat, x);
        if !s.is_covering_sieve(&max) {
            rep.violations.push(format!("maximal sieve over {} not covering", cat.objects[x]));
        }
    }
    // listed families have the right targets and generate covering sieves
    for x in 0..cat.objects.len() {
        for fam in &s.covers[x] {
            if fam.target != x || fam.members.iter().any(|&m| cat.tgt(m) != x) {
                rep.violations.push(format!("family over {} malformed", cat.objects[x]));
                continue;
            }
            if !s.is_covering_sieve(&s.generate_sieve(fam)) {
                rep.violations
                    .push(format!("listed family over {} does not cover", cat.objects[x]));
            }
        }
    }
    // stability: pullback of a covering sieve along any morphism is covering
    for x in 0..cat.objects.len() {
        for fam in &s.covers[x] {
            let sieve = s.generate_sieve(fam);
            for f in cat.morphisms_into(x) {
                match s.pullback_sieve(f, &sieve) {
                    Ok(pb) => {
                        if !s.is_covering_sieve(&pb) {
                            rep.violations.push(format!(
                                "stability fails: pullback of a cover of {} along {}",
                                cat.objects[x], cat.morphisms[f].name
                            ));
                        }
                    }
                    Err(e) => rep.violations.push(e.to_string()),
                }
            }
        }
    }
    // transitivity (local character), checked against listed covers
    for x in 0..cat.objects.len() {
        for (cand, covering) in s.enumerate_sieves(x) {
            if covering {
                continue;
            }
            for fam in &s.covers[x] {
                let base = s.generate_sieve(fam);
                let locally_covering = base.arrows.iter().all(|&f| {
                    s.pullback_sieve(f, &cand)
                        .map(|pb| s.is_covering_sieve(&pb))
                        .unwrap_or(false)
                });
                if locally_covering {
                    rep.violations.push(format!(
                        "transitivity fails over {}: a non-covering sieve covers locally",
                        cat.objects[x]
                    ));
                }
            }
        }
    }
    // pullback table: universal property
    for (&(f, g), &(p, p1, p2)) in &s.pullbacks {
        if cat.tgt(f) != cat.tgt(g) {
            rep.violations.push("pullback entry for a non-cospan".into());
            continue;
        }
        let ok_cone = cat.comp(f, p1) == cat.comp(g, p2)
            && cat.src(p1) == p
            && cat.src(p2) == p
            && cat.tgt(p1) == cat.src(f)
            && cat.tgt(p2) == cat.src(g);
        if !ok_cone {
            rep.violations.push(format!(
                "pullback of ({}, {}) is not a cone",
                cat.morphisms[f].name, cat.morphisms[g].name
            ));
            continue;
        }
        for t in 0..cat.objects.len() {
            for q1 in cat.morphisms_between(t, cat.src(f)) {
                for q2 in cat.morphisms_between(t, cat.src(g)) {
                    if cat.comp(f, q1) != cat.comp(g, q2) {
                        continue;
                    }
                    let mediators: Vec<MorId> = cat
                        .morphisms_between(t, p)
                        .into_iter()
                        .filter(|&u| cat.comp(p1, u) == Some(q1) && cat.comp(p2, u) == Some(q2))
                        .collect();
                    if mediators.len() != 1 {
                        rep.violations.push(format!(
                            "universal property fails for pullback of ({}, {}): {} mediators from {}",
                            cat.morphisms[f].name,
                            cat.morphisms[g].name,
                            mediators.len(),
                            cat.objects[t]
                        ));
                    }
                }
            }
        }
    }
    rep
}

/// Finite topological space presented by points and open sets.
#[derive(Clone, Debug)]
pub struct FiniteTopSpace {
    pub points: Vec<String>,
    pub opens: Vec<BTreeSet<usize>>,
}

impl FiniteTopSpace {
    pub fn new(points: Vec<String>, mut opens: Vec<BTreeSet<usize>>) -> Result<Self, DescentError> {
        let total: BTreeSet<usize> = (0..points.len()).collect();
        opens.sort();
        opens.dedup();
        if !opens.contains(&BTreeSet::new()) || !opens.contains(&total) {
            return Err(DescentError::NotATopology("missing empty or total open".into()));
        }
        for a in &opens {
            for b in &opens {
                let inter: BTreeSet<usize> = a.intersection(b).copied().collect();
                let uni: BTreeSet<usize> = a.union(b).copied().collect();
                if !opens.contains(&inter) || !opens.contains(&uni) {
                    return Err(DescentError::NotATopology(
                        "opens not closed under union/intersection".into(),
                    ));
                }
            }
        }
        Ok(FiniteTopSpace { points, opens })
    }

    /// Build from the minimal opens of each point (unions are generated).
    pub fn from_minimal_opens(points: Vec<String>, minimal: Vec<BTreeSet<usize>>) -> Result<Self, DescentError> {
        let mut opens: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        opens.insert(BTreeSet::new());
        let mut frontier: Vec<BTreeSet<usize>> = minimal.clone();
        while let Some(u) = frontier.pop() {
            if opens.contains(&u) {
                continue;
            }
            for v in opens.clone() {
                let uni: BTreeSet<usize> = u.union(&v).copied().collect();
                if !opens.contains(&uni) {
                    frontier.push(uni);
                }
            }
            opens.insert(u);
        }
        FiniteTopSpace::new(points, opens.into_iter().collect())
    }

    pub fn min_open_of(&self, p: usize) -> BTreeSet<usize> {
        let mut cur: Option<BTreeSet<usize>> = None;
        for o in &self.opens {
            if o.contains(&p) {
                cur = Some(match cur {
                    None => o.clone(),
                    Some(c) => c.intersection(o).copied().collect(),
                });
            }
        }
        cur.expect("total set contains every point")
    }
}

fn open_name(space: &FiniteTopSpace, o: &BTreeSet<usize>, minimal: &[BTreeSet<usize>]) -> String {
    if o.is_empty() {
        return "empty".into();
    }
    if o.len() == space.points.len() {
        return "X".into();
    }
    if let Some(p) = (0..space.points.len()).find(|&p| &minimal[p] == o) {
        return format!("U{}", space.points[p]);
    }
    o.iter().map(|&p| space.points[p].clone()).collect::<Vec<_>>().join("")
}

/// Internal: assemble a site whose objects are the given opens (which must
/// be closed under pairwise intersection and contain empty and total).
fn site_from_opens(space: &FiniteTopSpace, opens: Vec<BTreeSet<usize>>) -> Result<Site, DescentError> {
    let minimal: Vec<BTreeSet<usize>> = (0..space.points.len()).map(|p| space.min_open_of(p)).collect();
    let mut b = CategoryBuilder::new();
    let names: Vec<String> = opens.iter().map(|o| open_name(space, o, &minimal)).collect();
    for n in &names {
        b.object(n);
    }
    let idx_of: BTreeMap<&BTreeSet<usize>, usize> = opens.iter().enumerate().map(|(i, o)| (o, i)).collect();
    // inclusion morphisms
    let mut incl: BTreeMap<(usize, usize), MorId> = BTreeMap::new();
    for (i, a) in opens.iter().enumerate() {
        for (j, bo) in opens.iter().enumerate() {
            if i != j && a.is_subset(bo) {
                let m = b.morphism(&format!("{}<{}", names[i], names[j]), i, j);
                incl.insert((i, j), m);
            }
        }
    }
    for (&(i, j), &m1) in &incl {
        for (&(j2, k), &m2) in &incl {
            if j == j2 {
                if let Some(&m3) = incl.get(&(i, k)) {
                    b.rule(m2, m1, m3);
                }
            }
        }
    }
    let cat = b.build()?;
    let arrow = |i: usize, j: usize| -> MorId {
        if i == j {
            cat.identity[i]
        } else {
            incl[&(i, j)]
        }
    };
    // pullbacks: intersections
    let mut pullbacks = BTreeMap::new();
    for (i, a) in opens.iter().enumerate() {
        for (j, bo) in opens.iter().enumerate() {
            for (k, _x) in opens.iter().enumerate() {
                if a.is_subset(&opens[k]) && bo.is_subset(&opens[k]) {
                    let inter: BTreeSet<usize> = a.intersection(bo).copied().collect();
                    let Some(&p) = idx_of.get(&inter) else {
                        return Err(DescentError::NotATopology(
                            "site opens not closed under intersection".into(),
                        ));
                    };
                    let f = arrow(i, k);
                    let g = arrow(j, k);
                    pullbacks.insert((f, g), (p, arrow(p, i), arrow(p, j)));
                }
            }
        }
    }
    // listed covering families per object
    let mut covers: Vec<Vec<CoveringFamily>> = vec![vec![]; opens.len()];
    let mut canonical: Vec<CoveringFamily> = vec![];
    for (k, x) in opens.iter().enumerate() {
        let mut fams: BTreeSet<Vec<MorId>> = BTreeSet::new();
        fams.insert(vec![cat.identity[k]]);
        // canonical finest cover: minimal opens of the points of x
        let mut canon_members: Vec<MorId> = vec![];
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for &p in x.iter() {
            let i = idx_of[&minimal[p]];
            if seen.insert(i) {
                canon_members.push(arrow(i, k));
            }
        }
        canon_members.sort();
        canonical.push(CoveringFamily { target: k, members: canon_members.clone() });
        if !x.is_empty() {
            fams.insert(canon_members);
        } else {
            // the empty family covers the empty open
            fams.insert(vec![]);
        }
        // all subset covers when the slice is small, otherwise a ladder of
        // representative families
        let proper: Vec<usize> = (0..opens.len())
            .filter(|&i| i != k && opens[i].is_subset(x))
            .collect();
        if proper.len() <= 8 {
            for mask in 0u32..(1 << proper.len()) {
                let chosen: Vec<usize> =
                    (0..proper.len()).filter(|&t| mask >> t & 1 == 1).map(|t| proper[t]).collect();
                let mut union: BTreeSet<usize> = BTreeSet::new();
                for &i in &chosen {
                    union.extend(opens[i].iter().copied());
                }
                if &union == x {
                    let mut members: Vec<MorId> = chosen.iter().map(|&i| arrow(i, k)).collect();
                    members.sort();
                    fams.insert(members);
                }
            }
        } else {
            let mut members: Vec<MorId> = proper.iter().map(|&i| arrow(i, k)).collect();
            members.sort();
            let mut union: BTreeSet<usize> = BTreeSet::new();
            for &i in &proper {
                union.extend(opens[i].iter().copied());
            }
            if &union == x {
                fams.insert(members);
            }
        }
        covers[k] = fams
            .into_iter()
            .map(|members| CoveringFamily { target: k, members })
            .collect();
    }
    let sp = SpaceStructure {
        points: space.points.clone(),
        min_open: minimal,
        obj_points: opens.clone(),
    };
    Ok(Site { cat, covers, pullbacks, space: Some(sp), canonical_cover: canonical })
}

/// Open-cover site of a finite topological space: objects are all opens,
/// covers are the union-covering families, pullbacks are intersections.
pub fn open_cover_site(space: &FiniteTopSpace) -> Result<Site, DescentError> {
    site_from_opens(space, space.opens.clone())
}

/// Site on a basis of a finite space: objects are the minimal opens of the
/// points together with the empty and total opens. The basis is closed
/// under intersection, so fiber products stay inside.
pub fn basis_site(space: &FiniteTopSpace) -> Result<Site, DescentError> {
    let mut opens: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    opens.insert(BTreeSet::new());
    opens.insert((0..space.points.len()).collect());
    for p in 0..space.points.len() {
        opens.insert(space.min_open_of(p));
    }
    // close under pairwise intersection
    loop {
        let cur: Vec<BTreeSet<usize>> = opens.iter().cloned().collect();
        let before = opens.len();
        for a in &cur {
            for b in &cur {
                opens.insert(a.intersection(b).copied().collect());
            }
        }
        if opens.len() == before {
            break;
        }
    }
    site_from_opens(space, opens.into_iter().collect())
}

/// Coarse topology on any finite category: only maximal sieves cover.
pub fn coarse_site(cat: &FiniteCategory) -> Site {
    let covers: Vec<Vec<CoveringFamily>> = (0..cat.objects.len())
        .map(|x| vec![CoveringFamily { target: x, members: vec![cat.identity[x]] }])
        .collect();
    let mut pullbacks = BTreeMap::new();
    for x in 0..cat.objects.len() {
        // identity cospans pull back trivially; other cospans are only added
        // when a genuine product exists is left to richer sites
        pullbacks.insert(
            (cat.identity[x], cat.identity[x]),
            (x, cat.identity[x], cat.identity[x]),
        );
        for f in cat.morphisms_into(x) {
            pullbacks.insert((f, cat.identity[x]), (cat.src(f), cat.identity[cat.src(f)], f));
            pullbacks.insert((cat.identity[x], f), (cat.src(f), f, cat.identity[cat.src(f)]));
        }
    }
    let canonical = (0..cat.objects.len())
        .map(|x| CoveringFamily { target: x, members: vec![cat.identity[x]] })
        .collect();
    Site { cat: cat.clone(), covers, pullbacks, space: None, canonical_cover: canonical }
}

/// 4-point circle: open points a, b; c and d have minimal opens {a,b,c}
/// and {a,b,d}.
pub fn pseudocircle_space() -> FiniteTopSpace {
    let pts = vec!["a".to_string(), "b".into(), "c".into(), "d".into()];
    let min = vec![
        BTreeSet::from([0]),
        BTreeSet::from([1]),
        BTreeSet::from([0, 1, 2]),
        BTreeSet::from([0, 1, 3]),
    ];
    FiniteTopSpace::from_minimal_opens(pts, min).unwrap()
}

/// 6-point sphere: the double non-Hausdorff suspension of two points.
pub fn six_point_sphere_space() -> FiniteTopSpace {
    let pts: Vec<String> = ["a", "b", "c", "d", "e", "f"].iter().map(|s| s.to_string()).collect();
    let min = vec![
        BTreeSet::from([0]),
        BTreeSet::from([1]),
        BTreeSet::from([0, 1, 2]),
        BTreeSet::from([0, 1, 3]),
        BTreeSet::from([0, 1, 2, 3, 4]),
        BTreeSet::from([0, 1, 2, 3, 5]),
    ];
    FiniteTopSpace::from_minimal_opens(pts, min).unwrap()
}

/// Face space of the boundary of the 3-simplex: 14 points (4 vertices,
/// 6 edges, 4 facets); the minimal open of a face is the set of faces
/// containing it. A finite model of the 2-sphere whose basis site computes
/// its cohomology through covers.
pub fn sphere_face_space() -> FiniteTopSpace {
    let faces: Vec<Vec<u8>> = vec![
        vec![0], vec![1], vec![2], vec![3],
        vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3],
        vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3],
    ];
    let name = |f: &Vec<u8>| -> String {
        let body: String = f.iter().map(|v| v.to_string()).collect();
        match f.len() {
            1 => format!("v{}", body),
            2 => format!("e{}", body),
            _ => format!("t{}", body),
        }
    };
    let pts: Vec<String> = faces.iter().map(name).collect();
    let min: Vec<BTreeSet<usize>> = faces
        .iter()
        .map(|f| {
            faces
                .iter()
                .enumerate()
                .filter(|(_, g)| f.iter().all(|v| g.contains(v)))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    FiniteTopSpace::from_minimal_opens(pts, min).unwrap()
}

/// 3-point interval: two closed endpoints, open middle.
pub fn interval_space() -> FiniteTopSpace {
    let pts = vec!["l".to_string(), "m".into(), "r".into()];
    let min = vec![
        BTreeSet::from([0, 1]),
        BTreeSet::from([1]),
        BTreeSet::from([1, 2]),
    ];
    FiniteTopSpace::from_minimal_opens(pts, min).unwrap()
}

/// Named fixture sites.
pub fn fixture(name: &str) -> Result<Site, DescentError> {
    match name {
        "point" => open_cover_site(&FiniteTopSpace::new(
            vec!["p".into()],
            vec![BTreeSet::new(), BTreeSet::from([0])],
        )?),
        "pseudocircle" => open_cover_site(&pseudocircle_space()),
        "pseudosphere" => basis_site(&sphere_face_space()),
        "two_cover_interval" => open_cover_site(&interval_space()),
        other => {
            if let Some(catname) = other.strip_prefix("coarse:") {
                let cat = match catname {
                    "terminal" => FiniteCategory::terminal(),
                    "arrow" => FiniteCategory::arrow(),
                    "square" => FiniteCategory::poset(
                        &["00", "01", "10", "11"],
                        &[("00", "01"), ("00", "10"), ("01", "11"), ("10", "11")],
                    ),
                    "circleposet" => FiniteCategory::poset(
                        &["a", "b", "c", "d"],
                        &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
                    ),
                    _ => return Err(DescentError::Invalid(format!("unknown category `{catname}`"))),
                };
                Ok(coarse_site(&cat))
            } else {
                Err(DescentError::Invalid(format!("unknown site fixture `{other}`")))
            }
        }
    }
}

/// Cech products: iterated chosen fiber products over the cover, indexed by
/// tuples with repeats allowed.
#[derive(Clone, Debug)]
pub struct CechIndexing {
    pub fam: CoveringFamily,
    /// per length n (tuples of length n+1): map tuple -> (object, structure
    /// morphism to the target)
    pub levels: Vec<BTreeMap<Vec<usize>, (ObjId, MorId)>>,
    /// face projections: (tuple, dropped index) -> morphism between the
    /// tuple objects
    pub proj: BTreeMap<(Vec<usize>, usize), MorId>,
}

pub fn cech_products(site: &Site, fam: &CoveringFamily, depth: usize) -> Result<CechIndexing, DescentError> {
    let cat = &site.cat;
    let k = fam.members.len();
    let mut levels: Vec<BTreeMap<Vec<usize>, (ObjId, MorId)>> = vec![];
    let mut level0 = BTreeMap::new();
    for (i, &m) in fam.members.iter().enumerate() {
        level0.insert(vec![i], (cat.src(m), m));
    }
    levels.push(level0);
    for n in 1..=depth {
        let mut level = BTreeMap::new();
        for (tuple, &(_, sm)) in levels[n - 1].clone().iter() {
            for i in 0..k {
                let m = fam.members[i];
                let (p, p1, _p2) = site.pullback(sm, m)?;
                let mut t = tuple.clone();
                t.push(i);
                let struct_mor = cat.comp(sm, p1).ok_or_else(|| {
                    DescentError::Invalid("pullback projection does not compose".into())
                })?;
                level.insert(t, (p, struct_mor));
            }
        }
        levels.push(level);
    }
    // face projections by mediating-morphism search
    let mut proj = BTreeMap::new();
    for n in 1..=depth {
        let lev = levels[n].clone();
        for (tuple, &(obj, sm)) in lev.iter() {
            for drop in 0..=n {
                let mut t = tuple.clone();
                t.remove(drop);
                let &(tobj, tsm) = levels[n - 1].get(&t).expect("sub-tuple exists");
                let mut found: Vec<MorId> = vec![];
                for u in cat.morphisms_between(obj, tobj) {
                    if cat.comp(tsm, u) == Some(sm) {
                        found.push(u);
                    }
                }
                if found.len() != 1 {
                    return Err(DescentError::Invalid(format!(
                        "expected a unique face projection, found {}",
                        found.len()
                    )));
                }
                proj.insert((tuple.clone(), drop), found[0]);
            }
        }
    }
    Ok(CechIndexing { fam: fam.clone(), levels, proj })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudocircle_site_shape() {
        let s = fixture("pseudocircle").unwrap();
        assert_eq!(s.cat.objects.len(), 7);
        assert!(check_site(&s).is_valid());
    }

    #[test]
    fn point_and_interval_sites() {
        let p = fixture("point").unwrap();
        assert_eq!(p.cat.objects.len(), 2);
        assert!(check_site(&p).is_valid());
        let i = fixture("two_cover_interval").unwrap();
        assert_eq!(i.cat.objects.len(), 5);
        assert!(check_site(&i).is_valid());
    }

    #[test]
    fn six_point_sphere_site() {
        let sp = six_point_sphere_space();
        let s = open_cover_site(&sp).unwrap();
        assert_eq!(s.cat.objects.len(), 10);
        assert!(check_site(&s).is_valid());
    }

    #[test]
    fn coarse_site_is_valid() {
        let s = fixture("coarse:square").unwrap();
        assert!(check_site(&s).is_valid());
        // only maximal sieves cover
        for x in 0..s.cat.objects.len() {
            for (sieve, cov) in s.enumerate_sieves(x) {
                assert_eq!(cov, sieve == Sieve::maximal(&s.cat, x));
            }
        }
    }

    #[test]
    fn generate_sieve_examples() {
        let s = fixture("pseudocircle").unwrap();
        let x = s.cat.obj("X").unwrap();
        let idfam = CoveringFamily { target: x, members: vec![s.cat.identity[x]] };
        assert_eq!(s.generate_sieve(&idfam), Sieve::maximal(&s.cat, x));
        let empty = CoveringFamily { target: x, members: vec![] };
        assert_eq!(s.generate_sieve(&empty), Sieve::empty(x));
        // {Uc, Ud} generates everything below except X itself
        let uc = s.cat.obj("Uc").unwrap();
        let ud = s.cat.obj("Ud").unwrap();
        let fam = CoveringFamily {
            target: x,
            members: vec![
                s.cat.morphisms_between(uc, x)[0],
                s.cat.morphisms_between(ud, x)[0],
            ],
        };
        let sieve = s.generate_sieve(&fam);
        let all_proper: BTreeSet<MorId> = s
            .cat
            .morphisms_into(x)
            .into_iter()
            .filter(|&f| f != s.cat.identity[x])
            .collect();
        assert_eq!(sieve.arrows, all_proper);
    }

    #[test]
    fn pullback_sieve_examples() {
        let s = fixture("pseudocircle").unwrap();
        let x = s.cat.obj("X").unwrap();
        let uc = s.cat.obj("Uc").unwrap();
        let max = Sieve::maximal(&s.cat, x);
        let f = s.cat.morphisms_between(uc, x)[0];
        assert_eq!(s.pullback_sieve(f, &max).unwrap(), Sieve::maximal(&s.cat, uc));
        // identity pullback is the same sieve
        assert_eq!(s.pullback_sieve(s.cat.identity[x], &max).unwrap(), max);
        // pullback of the {Uc, Ud} sieve along Uc -> X is maximal over Uc
        let ud = s.cat.obj("Ud").unwrap();
        let fam = CoveringFamily {
            target: x,
            members: vec![
                s.cat.morphisms_between(uc, x)[0],
                s.cat.morphisms_between(ud, x)[0],
            ],
        };
        let sieve = s.generate_sieve(&fam);
        assert_eq!(s.pullback_sieve(f, &sieve).unwrap(), Sieve::maximal(&s.cat, uc));
        // composition law: pullback along g then f equals pullback along f o g
        let ab = s.cat.obj("ab").unwrap();
        let g = s.cat.morphisms_between(ab, uc)[0];
        let fg = s.cat.comp(f, g).unwrap();
        let via_two = s.pullback_sieve(g, &s.pullback_sieve(f, &sieve).unwrap()).unwrap();
        let via_one = s.pullback_sieve(fg, &sieve).unwrap();
        assert_eq!(via_two, via_one);
    }

    #[test]
    fn sieve_enumeration_counts() {
        // terminal category, coarse: 2 sieves (empty, maximal)
        let t = coarse_site(&FiniteCategory::terminal());
        assert_eq!(t.enumerate_sieves(0).len(), 2);
        // arrow category at object 1: 3 sieves
        let a = coarse_site(&FiniteCategory::arrow());
        let one = a.cat.obj("1").unwrap();
        assert_eq!(a.enumerate_sieves(one).len(), 3);
        // covering sieves over pseudocircle X have a minimum: the sieve of
        // all proper opens
        let s = fixture("pseudocircle").unwrap();
        let x = s.cat.obj("X").unwrap();
        let min = s.minimal_covering_sieve(x);
        for (sieve, cov) in s.enumerate_sieves(x) {
            if cov {
                assert!(sieve.contains(&min));
            }
        }
        assert_eq!(min.arrows.len(), s.cat.morphisms_into(x).len() - 1);
    }

    #[test]
    fn cech_products_intersections() {
        let s = fixture("pseudocircle").unwrap();
        let x = s.cat.obj("X").unwrap();
        let uc = s.cat.obj("Uc").unwrap();
        let ud = s.cat.obj("Ud").unwrap();
        let fam = CoveringFamily {
            target: x,
            members: vec![
                s.cat.morphisms_between(uc, x)[0],
                s.cat.morphisms_between(ud, x)[0],
            ],
        };
        let ix = cech_products(&s, &fam, 2).unwrap();
        let ab = s.cat.obj("ab").unwrap();
        assert_eq!(ix.levels[1][&vec![0, 1]].0, ab);
        // repeats are idempotent: U_cdc = {a,b}
        assert_eq!(ix.levels[2][&vec![0, 1, 0]].0, ab);
        assert_eq!(ix.levels[1][&vec![0, 0]].0, uc);
        // singleton family of the identity: everything is X
        let idfam = CoveringFamily { target: x, members: vec![s.cat.identity[x]] };
        let ix = cech_products(&s, &idfam, 2).unwrap();
        assert!(ix.levels.iter().all(|lev| lev.values().all(|&(o, _)| o == x)));
    }

    #[test]
    fn quasicompact_witness() {
        let s = fixture("pseudocircle").unwrap();
        let x = s.cat.obj("X").unwrap();
        for (sieve, covering) in s.enumerate_sieves(x) {
            if covering {
                let w = sieve.finite_cover_witness();
                let fam = CoveringFamily { target: x, members: w };
                assert!(s.is_covering_sieve(&s.generate_sieve(&fam)));
            }
        }
    }

    #[test]
    fn sphere_basis_site_valid() {
        let s = fixture("pseudosphere").unwrap();
        assert_eq!(s.cat.objects.len(), 16);
        let rep = check_site(&s);
        assert!(rep.is_valid(), "{:?}", rep.violations);
    }
}
