//! Finite categories as explicit tables, with exhaustive law checking and
//! builders for the standard index categories.
//!
//! Objects and morphisms are dense integer ids. Builders assign morphism ids
//! in the canonical order `(dom, cod, intrinsic key)` where the intrinsic key
//! is the tuple encoding of the morphism (monotone map, substitution, ...).
//! `opposite` keeps ids and swaps endpoints, so it is an involution on the
//! nose.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::guard::SizeGuards;

const NONE: u32 = u32::MAX;

/// A finite category: object count, morphism endpoint tables, identity
/// assignment and a total composition table on composable pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinCat {
    n_objects: usize,
    mor_dom: Vec<usize>,
    mor_cod: Vec<usize>,
    identity: Vec<usize>,
    /// `compose[g * n_mor + f]` = id of `g . f`, or `NONE` when not composable.
    compose: Vec<u32>,
}

/// Candidate tables before validation.
#[derive(Debug, Clone, Default)]
pub struct RawCategory {
    pub n_objects: usize,
    /// (dom, cod) per morphism.
    pub morphisms: Vec<(usize, usize)>,
    /// Identity morphism per object, if declared.
    pub identities: Vec<Option<usize>>,
    /// Entries (g, f, g.f).
    pub composites: Vec<(usize, usize, usize)>,
}

impl FinCat {
    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_morphisms(&self) -> usize {
        self.mor_dom.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.n_objects
    }

    pub fn morphisms(&self) -> std::ops::Range<usize> {
        0..self.mor_dom.len()
    }

    pub fn dom(&self, m: usize) -> usize {
        self.mor_dom[m]
    }

    pub fn cod(&self, m: usize) -> usize {
        self.mor_cod[m]
    }

    pub fn identity(&self, c: usize) -> usize {
        self.identity[c]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identity[self.mor_dom[m]] == m
    }

    /// `g . f`, defined when `cod(f) = dom(g)`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        let v = self.compose[g * self.mor_dom.len() + f];
        if v == NONE {
            None
        } else {
            Some(v as usize)
        }
    }

    pub fn hom(&self, c: usize, d: usize) -> Vec<usize> {
        self.morphisms().filter(|&m| self.mor_dom[m] == c && self.mor_cod[m] == d).collect()
    }

    pub fn morphisms_into(&self, c: usize) -> Vec<usize> {
        self.morphisms().filter(|&m| self.mor_cod[m] == c).collect()
    }

    pub fn morphisms_from(&self, c: usize) -> Vec<usize> {
        self.morphisms().filter(|&m| self.mor_dom[m] == c).collect()
    }

    /// Dom/cod swapped, composition transposed; morphism ids are kept.
    pub fn opposite(&self) -> FinCat {
        let n = self.n_morphisms();
        let mut compose = vec![NONE; n * n];
        for g in 0..n {
            for f in 0..n {
                compose[g * n + f] = self.compose[f * n + g];
            }
        }
        FinCat {
            n_objects: self.n_objects,
            mor_dom: self.mor_cod.clone(),
            mor_cod: self.mor_dom.clone(),
            identity: self.identity.clone(),
            compose,
        }
    }
}

/// Checks every law exhaustively; on failure returns all violations with
/// concrete witnesses.
pub fn validate_category(raw: &RawCategory) -> std::result::Result<FinCat, Vec<Error>> {
    let n_mor = raw.morphisms.len();
    let mut errors = Vec::new();

    for (m, &(d, c)) in raw.morphisms.iter().enumerate() {
        if d >= raw.n_objects || c >= raw.n_objects {
            errors.push(Error::BadMorphism { morphism: m });
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let mut identity = vec![usize::MAX; raw.n_objects];
    for obj in 0..raw.n_objects {
        match raw.identities.get(obj).copied().flatten() {
            Some(m) if m < n_mor && raw.morphisms[m] == (obj, obj) => identity[obj] = m,
            _ => errors.push(Error::MissingIdentity { object: obj }),
        }
    }

    let mut compose = vec![NONE; n_mor * n_mor];
    for &(g, f, gf) in &raw.composites {
        if g >= n_mor || f >= n_mor || gf >= n_mor {
            errors.push(Error::IllTypedComposite { g, f });
            continue;
        }
        let (fd, fc) = raw.morphisms[f];
        let (gd, gc) = raw.morphisms[g];
        if fc != gd || raw.morphisms[gf] != (fd, gc) {
            errors.push(Error::IllTypedComposite { g, f });
            continue;
        }
        compose[g * n_mor + f] = gf as u32;
    }
    // Identity composites may be left implicit in the raw tables.
    for m in 0..n_mor {
        let (d, c) = raw.morphisms[m];
        if d < raw.n_objects && identity[d] != usize::MAX && compose[m * n_mor + identity[d]] == NONE {
            compose[m * n_mor + identity[d]] = m as u32;
        }
        if c < raw.n_objects && identity[c] != usize::MAX && compose[identity[c] * n_mor + m] == NONE {
            compose[identity[c] * n_mor + m] = m as u32;
        }
    }
    for g in 0..n_mor {
        for f in 0..n_mor {
            if raw.morphisms[f].1 == raw.morphisms[g].0 && compose[g * n_mor + f] == NONE {
                errors.push(Error::MissingComposite { g, f });
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let cat = FinCat {
        n_objects: raw.n_objects,
        mor_dom: raw.morphisms.iter().map(|p| p.0).collect(),
        mor_cod: raw.morphisms.iter().map(|p| p.1).collect(),
        identity,
        compose,
    };

    for f in cat.morphisms() {
        if cat.compose(f, cat.identity(cat.dom(f))) != Some(f)
            || cat.compose(cat.identity(cat.cod(f)), f) != Some(f)
        {
            errors.push(Error::BrokenIdentityLaw { f });
        }
    }
    for h in cat.morphisms() {
        for g in cat.morphisms() {
            if cat.cod(g) != cat.dom(h) {
                continue;
            }
            let hg = cat.compose(h, g).unwrap();
            for f in cat.morphisms() {
                if cat.cod(f) != cat.dom(g) {
                    continue;
                }
                let gf = cat.compose(g, f).unwrap();
                if cat.compose(h, gf) != cat.compose(hg, f) {
                    errors.push(Error::NonAssociative { h, g, f });
                }
            }
        }
    }

    if errors.is_empty() {
        Ok(cat)
    } else {
        Err(errors)
    }
}

fn build_from_keys<K: Ord + Clone>(
    n_objects: usize,
    mut keyed: Vec<(usize, usize, K)>,
    identity_key: impl Fn(usize) -> K,
    compose_key: impl Fn(&(usize, usize, K), &(usize, usize, K)) -> K,
) -> FinCat {
    keyed.sort();
    let index: BTreeMap<(usize, usize, K), usize> =
        keyed.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let n_mor = keyed.len();
    let mut identity = vec![0; n_objects];
    for c in 0..n_objects {
        identity[c] = index[&(c, c, identity_key(c))];
    }
    let mut compose = vec![NONE; n_mor * n_mor];
    for (g, gt) in keyed.iter().enumerate() {
        for (f, ft) in keyed.iter().enumerate() {
            if ft.1 == gt.0 {
                let key = compose_key(gt, ft);
                compose[g * n_mor + f] = index[&(ft.0, gt.1, key)] as u32;
            }
        }
    }
    FinCat {
        n_objects,
        mor_dom: keyed.iter().map(|k| k.0).collect(),
        mor_cod: keyed.iter().map(|k| k.1).collect(),
        identity,
        compose,
    }
}

/// The one-object, one-morphism category.
pub fn terminal_category() -> FinCat {
    build_from_keys(1, vec![(0, 0, vec![0usize])], |_| vec![0], |_, _| vec![0])
}

/// Two objects `0, 1` and a single non-identity arrow `0 -> 1`.
pub fn walking_arrow() -> FinCat {
    // Hom sets here are at most singletons, so a constant key suffices.
    let keyed = vec![(0usize, 0usize, vec![0usize]), (0, 1, vec![0]), (1, 1, vec![0])];
    build_from_keys(2, keyed, |_| vec![0], |_, _| vec![0])
}

fn monotone_maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    // Monotone maps [from] -> [to] on {0..from} -> {0..to}, lexicographic.
    let mut out = Vec::new();
    let mut cur = vec![0usize; from + 1];
    loop {
        if cur.windows(2).all(|w| w[0] <= w[1]) {
            out.push(cur.clone());
        }
        let mut k = from + 1;
        while k > 0 {
            k -= 1;
            if cur[k] < to {
                cur[k] += 1;
                for v in cur.iter_mut().skip(k + 1) {
                    *v = 0;
                }
                break;
            }
            if k == 0 {
                return out;
            }
        }
    }
}

/// Full subcategory of the simplex category on `[0] .. [n]`.
/// Object `k` stands for the linear order with `k + 1` points; morphisms are
/// the monotone maps, keyed by their value tuple.
pub fn delta_trunc(n: usize, guards: &SizeGuards) -> Result<FinCat> {
    let mut keyed = Vec::new();
    for d in 0..=n {
        for c in 0..=n {
            for t in monotone_maps(d, c) {
                keyed.push((d, c, t));
            }
        }
    }
    guards.check_morphisms(keyed.len())?;
    Ok(build_from_keys(
        n + 1,
        keyed,
        |c| (0..=c).collect(),
        |gt, ft| ft.2.iter().map(|&v| gt.2[v]).collect(),
    ))
}

/// Full subcategory of the substitution presentation of the cube category on
/// name-sets of size `0 ..= n`. Object `k` is a set of `k` names; a morphism
/// `I -> J` is a function from the names of `I` to the names of `J` plus the
/// two endpoints, injective on the name part. In the key tuple, name `j` of
/// the codomain is encoded as `j` and the endpoints as `|J|` and `|J| + 1`.
pub fn cube_trunc(n: usize, guards: &SizeGuards) -> Result<FinCat> {
    fn substitutions(from: usize, to: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; from];
        if from == 0 {
            return vec![vec![]];
        }
        loop {
            let names: Vec<usize> = cur.iter().copied().filter(|&v| v < to).collect();
            let mut seen = vec![false; to];
            let mut inj = true;
            for v in names {
                if seen[v] {
                    inj = false;
                    break;
                }
                seen[v] = true;
            }
            if inj {
                out.push(cur.clone());
            }
            let mut k = from;
            while k > 0 {
                k -= 1;
                if cur[k] < to + 1 {
                    cur[k] += 1;
                    for v in cur.iter_mut().skip(k + 1) {
                        *v = 0;
                    }
                    break;
                }
                if k == 0 {
                    return out;
                }
            }
        }
    }
    let mut keyed = Vec::new();
    for d in 0..=n {
        for c in 0..=n {
            for t in substitutions(d, c) {
                keyed.push((d, c, t));
            }
        }
    }
    guards.check_morphisms(keyed.len())?;
    Ok(build_from_keys(
        n + 1,
        keyed,
        |c| (0..c).collect(),
        |gt, ft| {
            // g : J -> K after f : I -> J. Names of J go through g, endpoints
            // pass through but are re-encoded relative to |K|.
            let (j, k) = (gt.0, gt.1);
            ft.2.iter().map(|&v| if v < j { gt.2[v] } else { v - j + k }).collect()
        },
    ))
}

/// Named standard categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Standard {
    Terminal,
    WalkingArrow,
    DeltaTrunc(usize),
    CubeTrunc(usize),
}

pub fn build_standard(which: Standard, guards: &SizeGuards) -> Result<FinCat> {
    match which {
        Standard::Terminal => Ok(terminal_category()),
        Standard::WalkingArrow => Ok(walking_arrow()),
        Standard::DeltaTrunc(n) => delta_trunc(n, guards),
        Standard::CubeTrunc(n) => cube_trunc(n, guards),
    }
}

/// A functor between finite categories, tabulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    pub source: Arc<FinCat>,
    pub target: Arc<FinCat>,
    pub on_objects: Vec<usize>,
    pub on_morphisms: Vec<usize>,
}

impl Functor {
    /// Checks the functor laws exhaustively.
    pub fn validate(source: Arc<FinCat>, target: Arc<FinCat>, on_objects: Vec<usize>, on_morphisms: Vec<usize>) -> Result<Functor> {
        if on_objects.len() != source.n_objects() || on_morphisms.len() != source.n_morphisms() {
            return Err(Error::Invalid("functor tables have wrong length".into()));
        }
        for m in source.morphisms() {
            let fm = on_morphisms[m];
            if fm >= target.n_morphisms()
                || target.dom(fm) != on_objects[source.dom(m)]
                || target.cod(fm) != on_objects[source.cod(m)]
            {
                return Err(Error::NotAFunctor { law: "dom/cod", witness: m });
            }
        }
        for c in source.objects() {
            if on_morphisms[source.identity(c)] != target.identity(on_objects[c]) {
                return Err(Error::NotAFunctor { law: "identities", witness: source.identity(c) });
            }
        }
        for g in source.morphisms() {
            for f in source.morphisms() {
                if let Some(gf) = source.compose(g, f) {
                    if target.compose(on_morphisms[g], on_morphisms[f]) != Some(on_morphisms[gf]) {
                        return Err(Error::NotAFunctor { law: "composition", witness: gf });
                    }
                }
            }
        }
        Ok(Functor { source, target, on_objects, on_morphisms })
    }

    pub fn identity(cat: Arc<FinCat>) -> Functor {
        Functor {
            source: cat.clone(),
            target: cat.clone(),
            on_objects: cat.objects().collect(),
            on_morphisms: cat.morphisms().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::GuardKind;

    fn raw_of(cat: &FinCat) -> RawCategory {
        RawCategory {
            n_objects: cat.n_objects(),
            morphisms: cat.morphisms().map(|m| (cat.dom(m), cat.cod(m))).collect(),
            identities: cat.objects().map(|c| Some(cat.identity(c))).collect(),
            composites: {
                let mut v = Vec::new();
                for g in cat.morphisms() {
                    for f in cat.morphisms() {
                        if let Some(gf) = cat.compose(g, f) {
                            v.push((g, f, gf));
                        }
                    }
                }
                v
            },
        }
    }

    #[test]
    fn walking_arrow_shape() {
        let c = walking_arrow();
        assert_eq!(c.n_objects(), 2);
        assert_eq!(c.n_morphisms(), 3);
        assert_eq!(c.hom(0, 1).len(), 1);
        assert_eq!(c.hom(1, 0).len(), 0);
    }

    #[test]
    fn delta_trunc_1_has_seven_morphisms() {
        let c = delta_trunc(1, &SizeGuards::default()).unwrap();
        assert_eq!(c.n_objects(), 2);
        assert_eq!(c.n_morphisms(), 7);
        assert_eq!(c.hom(0, 1).len(), 2);
        assert_eq!(c.hom(1, 1).len(), 3);
    }

    #[test]
    fn cube_trunc_1_homs() {
        let c = cube_trunc(1, &SizeGuards::default()).unwrap();
        assert_eq!(c.n_objects(), 2);
        // two endpoint substitutions {i} -> {}
        assert_eq!(c.hom(1, 0).len(), 2);
        assert_eq!(c.hom(0, 1).len(), 1);
        assert_eq!(c.hom(1, 1).len(), 3);
    }

    #[test]
    fn standard_categories_validate() {
        let guards = SizeGuards::default();
        for cat in [
            terminal_category(),
            walking_arrow(),
            delta_trunc(2, &guards).unwrap(),
            cube_trunc(2, &guards).unwrap(),
        ] {
            let revalidated = validate_category(&raw_of(&cat)).unwrap();
            assert_eq!(revalidated, cat);
        }
    }

    #[test]
    fn missing_identity_is_reported() {
        let mut raw = raw_of(&walking_arrow());
        raw.identities[1] = None;
        let errs = validate_category(&raw).unwrap_err();
        assert!(errs.contains(&Error::MissingIdentity { object: 1 }));
    }

    #[test]
    fn wrong_composite_is_caught() {
        // Corrupt one non-identity composite in a 3-object chain category;
        // validation must report a law violation with a witness triple.
        let guards = SizeGuards::default();
        let delta = delta_trunc(2, &guards).unwrap();
        let mut raw = raw_of(&delta);
        let (pos, &(g, f, gf)) = raw
            .composites
            .iter()
            .enumerate()
            .find(|(_, &(g, f, gf))| {
                !delta.is_identity(g)
                    && !delta.is_identity(f)
                    && delta.hom(delta.dom(f), delta.cod(g)).iter().any(|&m| m != gf)
            })
            .unwrap();
        let other = *delta.hom(delta.dom(f), delta.cod(g)).iter().find(|&&m| m != gf).unwrap();
        raw.composites[pos] = (g, f, other);
        let errs = validate_category(&raw).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, Error::NonAssociative { .. } | Error::BrokenIdentityLaw { .. })));
    }

    #[test]
    fn opposite_is_involutive() {
        let guards = SizeGuards::default();
        let delta = delta_trunc(2, &guards).unwrap();
        assert_eq!(delta.opposite().opposite(), delta);
        assert_eq!(terminal_category().opposite(), terminal_category());
        assert_eq!(walking_arrow().opposite().n_morphisms(), 3);
    }

    #[test]
    fn builders_are_deterministic() {
        let guards = SizeGuards::default();
        assert_eq!(delta_trunc(2, &guards).unwrap(), delta_trunc(2, &guards).unwrap());
        assert_eq!(cube_trunc(2, &guards).unwrap(), cube_trunc(2, &guards).unwrap());
    }

    #[test]
    fn size_guard_fires() {
        let guards = SizeGuards { max_morphisms: 5, ..Default::default() };
        assert!(matches!(
            delta_trunc(2, &guards),
            Err(Error::SizeGuardExceeded { guard: GuardKind::Morphisms, .. })
        ));
    }

    #[test]
    fn functor_validation() {
        let wa = Arc::new(walking_arrow());
        let t = Arc::new(terminal_category());
        let f = Functor::validate(wa.clone(), t.clone(), vec![0, 0], vec![0, 0, 0]).unwrap();
        assert_eq!(f.on_objects, vec![0, 0]);
        // breaking dom/cod preservation
        let delta = Arc::new(delta_trunc(1, &SizeGuards::default()).unwrap());
        let bad = Functor::validate(wa, delta, vec![0, 1], vec![0, 0, 0]);
        assert!(bad.is_err());
    }
}
