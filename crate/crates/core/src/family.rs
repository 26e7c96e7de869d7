//! Set families, union closure, and the family of all unions of translates.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::group::{GroupSpec, DEFAULT_MAX_ORDER};
use crate::subset::{parse_set, GSubset};

/// Default cap on the number of members a closure may produce.
pub const DEFAULT_FAMILY_LIMIT: usize = 1 << 22;

/// Largest group the brute-force enumeration accepts.
pub const NAIVE_MAX_ORDER: usize = 20;

/// A duplicate-free family of subsets of one group, kept in canonical order.
#[derive(Clone, PartialEq, Eq)]
pub struct SetFamily {
    spec: GroupSpec,
    members: Vec<GSubset>,
}

impl SetFamily {
    /// Builds a family from arbitrary members, sorting and deduplicating them.
    pub fn new(spec: &GroupSpec, members: impl IntoIterator<Item = GSubset>) -> Result<Self> {
        let mut members: Vec<GSubset> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|m| m.spec() != spec) {
            return Err(Error::SpecMismatch {
                left: spec.to_string(),
                right: bad.spec().to_string(),
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily {
            spec: spec.clone(),
            members,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn members(&self) -> &[GSubset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GSubset> {
        self.members.iter()
    }

    pub fn position(&self, s: &GSubset) -> Option<usize> {
        if s.spec() != &self.spec {
            return None;
        }
        self.members.binary_search(s).ok()
    }

    pub fn contains(&self, s: &GSubset) -> bool {
        self.position(s).is_some()
    }

    /// Sum of member cardinalities.
    pub fn size_sum(&self) -> u64 {
        self.members.iter().map(|m| m.len() as u64).sum()
    }

    fn contains_words(&self, words: &[u64]) -> bool {
        self.members
            .binary_search_by(|m| m.words().iter().rev().cmp(words.iter().rev()))
            .is_ok()
    }

    /// Checks `S ∪ J ∈ F` for every member `S` and join-irreducible `J`.
    /// Every member is a union of join-irreducibles, so this is equivalent to
    /// closure under all pairwise unions.
    pub fn is_union_closed(&self) -> bool {
        let irreducible = self.join_irreducibles();
        let mut buf = vec![0u64; self.spec.order().div_ceil(64)];
        for a in &self.members {
            for j in &irreducible {
                for ((o, x), y) in buf.iter_mut().zip(a.words()).zip(j.words()) {
                    *o = x | y;
                }
                if !self.contains_words(&buf) {
                    return false;
                }
            }
        }
        true
    }

    /// Join-irreducible members: nonempty sets that are not the union of the
    /// members strictly below them.
    pub fn minimal_generators(&self) -> Result<Vec<GSubset>> {
        if !self.is_union_closed() {
            return Err(Error::NotUnionClosed);
        }
        Ok(self.join_irreducibles())
    }

    /// Members that are not the union of the members strictly below them;
    /// the minimal generators when the family is union-closed.
    pub(crate) fn join_irreducibles(&self) -> Vec<GSubset> {
        let mut below = vec![0u64; self.spec.order().div_ceil(64)];
        let mut out = Vec::new();
        for (i, s) in self.members.iter().enumerate() {
            if s.is_empty() {
                continue;
            }
            below.iter_mut().for_each(|w| *w = 0);
            // anything contained in s sorts before it
            for t in &self.members[..i] {
                if t.words().iter().zip(s.words()).all(|(x, y)| x & !y == 0) {
                    below.iter_mut().zip(t.words()).for_each(|(o, x)| *o |= x);
                }
            }
            if below != s.words() {
                out.push(s.clone());
            }
        }
        out
    }

    /// Serializes in the family file format.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("# group: {}\n", self.spec);
        for m in &self.members {
            let _ = writeln!(out, "{m}");
        }
        out
    }

    /// Reads the family file format; members may appear in any order.
    pub fn parse_file(text: &str) -> Result<Self> {
        Self::parse_file_with_ceiling(text, DEFAULT_MAX_ORDER)
    }

    pub fn parse_file_with_ceiling(text: &str, ceiling: usize) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty family file".into()))?;
        let group = header
            .strip_prefix("# group:")
            .map(str::trim)
            .ok_or_else(|| Error::Parse(format!("expected '# group: <spec>' header, got {header:?}")))?;
        let spec = GroupSpec::parse_with_ceiling(group, ceiling)?;
        let mut members = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let m = parse_set(&spec, line).map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)))?;
            members.push(m);
        }
        Self::new(&spec, members)
    }
}

impl std::fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetFamily")
            .field("spec", &self.spec)
            .field("members", &self.members)
            .finish()
    }
}

/// Smallest union-closed family containing `generators`, plus `∅` when
/// `include_empty` is set.
pub fn union_closure(generators: &[GSubset], include_empty: bool) -> Result<SetFamily> {
    union_closure_bounded(generators, include_empty, DEFAULT_FAMILY_LIMIT)
}

/// [`union_closure`] that gives up once the family exceeds `limit` members.
///
/// Generators are added one at a time: if `C` is closed, the closure of
/// `C ∪ {g}` is `C ∪ {g} ∪ {S ∪ g : S ∈ C}`, so each step is one linear
/// pass over the current family.
pub fn union_closure_bounded(
    generators: &[GSubset],
    include_empty: bool,
    limit: usize,
) -> Result<SetFamily> {
    let first = generators.first().ok_or(Error::NoGenerators)?;
    let spec = first.spec().clone();
    if let Some(bad) = generators.iter().find(|g| g.spec() != &spec) {
        return Err(Error::SpecMismatch {
            left: spec.to_string(),
            right: bad.spec().to_string(),
        });
    }

    let mut seen: HashSet<GSubset> = HashSet::new();
    let mut members: Vec<GSubset> = Vec::new();
    // Ok(true) iff `s` was new
    let mut push = |s: GSubset, members: &mut Vec<GSubset>| -> Result<bool> {
        if !seen.insert(s.clone()) {
            return Ok(false);
        }
        if members.len() >= limit {
            return Err(Error::FamilyTooLarge { limit });
        }
        members.push(s);
        Ok(true)
    };

    for g in generators {
        let known = members.len();
        // a generator already in the closed family adds nothing
        if !push(g.clone(), &mut members)? {
            continue;
        }
        for i in 0..known {
            let u = members[i].union_unchecked(g);
            push(u, &mut members)?;
        }
    }
    if include_empty {
        push(GSubset::empty(&spec), &mut members)?;
    }
    SetFamily::new(&spec, members)
}

/// Distinct translates `g + R`, in canonical order.
pub fn distinct_translates(r: &GSubset) -> Vec<GSubset> {
    let mut out: Vec<GSubset> = r
        .spec()
        .elements()
        .map(|g| r.translate(g).expect("element in range"))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `{A + R : A ⊆ G}`, the union closure of the translates of `R` together with `∅`.
pub fn translate_family(r: &GSubset) -> Result<SetFamily> {
    translate_family_bounded(r, DEFAULT_FAMILY_LIMIT)
}

pub fn translate_family_bounded(r: &GSubset, limit: usize) -> Result<SetFamily> {
    if r.is_empty() {
        return Err(Error::EmptyR);
    }
    union_closure_bounded(&distinct_translates(r), true, limit)
}

/// Brute force: computes `A + R` elementwise for every one of the `2^|G|`
/// subsets `A`. Limited to groups of order [`NAIVE_MAX_ORDER`].
pub fn naive_translate_family(r: &GSubset) -> Result<SetFamily> {
    if r.is_empty() {
        return Err(Error::EmptyR);
    }
    let spec = r.spec();
    let n = spec.order();
    if n > NAIVE_MAX_ORDER {
        return Err(Error::GroupTooLarge {
            order: n,
            limit: NAIVE_MAX_ORDER,
        });
    }
    // x + R as a mask, by direct group addition
    let shifted: Vec<u64> = spec
        .elements()
        .map(|x| {
            r.iter()
                .map(|y| 1u64 << spec.add(x, y).expect("in range").index())
                .fold(0, |acc, b| acc | b)
        })
        .collect();
    // sums[A] = sums[A minus its lowest element] | shifted[lowest]
    let mut sums = vec![0u64; 1 << n];
    for a in 1usize..(1 << n) {
        let low = a.trailing_zeros() as usize;
        sums[a] = sums[a & (a - 1)] | shifted[low];
    }
    sums.sort_unstable();
    sums.dedup();
    let members = sums
        .into_iter()
        .map(|m| GSubset::from_mask(spec, m))
        .collect::<Result<Vec<_>>>()?;
    SetFamily::new(spec, members)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    fn set(spec: &GroupSpec, idx: &[usize]) -> GSubset {
        GSubset::from_indices(spec, idx.iter().copied()).unwrap()
    }

    fn literals(f: &SetFamily) -> Vec<String> {
        f.iter().map(|m| m.to_string()).collect()
    }

    #[test]
    fn closure_of_z3_pairs() {
        let z3 = g("Z3");
        let gens = [set(&z3, &[0, 1]), set(&z3, &[1, 2]), set(&z3, &[0, 2])];
        let f = union_closure(&gens, true).unwrap();
        assert_eq!(literals(&f), ["-", "0,1", "0,2", "1,2", "0,1,2"]);
        assert!(f.is_union_closed());
    }

    #[test]
    fn closure_single_generator() {
        let z5 = g("Z5");
        let a = set(&z5, &[1, 3]);
        let f = union_closure(std::slice::from_ref(&a), false).unwrap();
        assert_eq!(f.members(), &[a]);
    }

    #[test]
    fn closure_is_idempotent() {
        let z6 = g("Z6");
        let gens = [set(&z6, &[0, 1]), set(&z6, &[3]), set(&z6, &[2, 4])];
        let f = union_closure(&gens, false).unwrap();
        let again = union_closure(f.members(), false).unwrap();
        assert_eq!(f, again);
        assert_eq!(f.len(), 7);
    }

    #[test]
    fn closure_errors() {
        assert_eq!(union_closure(&[], true).unwrap_err(), Error::NoGenerators);
        let mixed = [GSubset::full(&g("Z3")), GSubset::full(&g("Z4"))];
        assert!(matches!(union_closure(&mixed, true), Err(Error::SpecMismatch { .. })));
        let z10 = g("Z10");
        let singles: Vec<_> = (0..10).map(|i| set(&z10, &[i])).collect();
        assert_eq!(
            union_closure_bounded(&singles, true, 1000).unwrap_err(),
            Error::FamilyTooLarge { limit: 1000 }
        );
        assert_eq!(union_closure_bounded(&singles, true, 1024).unwrap().len(), 1024);
    }

    #[test]
    fn translate_family_examples() {
        let z3 = g("Z3");
        let f = translate_family(&set(&z3, &[0, 1])).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f.len() % 2, 1);
        assert_eq!(f, naive_translate_family(&set(&z3, &[0, 1])).unwrap());

        for s in ["Z1", "Z3", "Z2xZ4", "Z7"] {
            let spec = g(s);
            let f = translate_family(&GSubset::full(&spec)).unwrap();
            assert_eq!(f.members(), &[GSubset::empty(&spec), GSubset::full(&spec)]);
        }

        let z4 = g("Z4");
        let f = translate_family(&set(&z4, &[0, 1])).unwrap();
        assert_eq!(f.len(), 10);
        assert_eq!(f, naive_translate_family(&set(&z4, &[0, 1])).unwrap());
        let sizes: Vec<usize> = f.iter().map(GSubset::len).collect();
        assert_eq!(sizes.iter().filter(|&&k| k == 2).count(), 4);
        assert_eq!(sizes.iter().filter(|&&k| k == 3).count(), 4);
    }

    #[test]
    fn translate_family_rejects_empty_r() {
        let z3 = g("Z3");
        assert_eq!(translate_family(&GSubset::empty(&z3)).unwrap_err(), Error::EmptyR);
        assert_eq!(naive_translate_family(&GSubset::empty(&z3)).unwrap_err(), Error::EmptyR);
    }

    #[test]
    fn naive_guard() {
        let z21 = g("Z21");
        assert!(matches!(
            naive_translate_family(&set(&z21, &[0])),
            Err(Error::GroupTooLarge { order: 21, limit: 20 })
        ));
    }

    #[test]
    fn union_closed_checks() {
        let z2 = g("Z2");
        let f = SetFamily::new(&z2, [set(&z2, &[0]), set(&z2, &[1])]).unwrap();
        assert!(!f.is_union_closed());
        assert_eq!(f.minimal_generators().unwrap_err(), Error::NotUnionClosed);
        let single = SetFamily::new(&z2, [set(&z2, &[1])]).unwrap();
        assert!(single.is_union_closed());
    }

    #[test]
    fn minimal_generator_examples() {
        let z3 = g("Z3");
        let f = translate_family(&set(&z3, &[0, 1])).unwrap();
        let gens: Vec<String> = f.minimal_generators().unwrap().iter().map(|m| m.to_string()).collect();
        assert_eq!(gens, ["0,1", "0,2", "1,2"]);

        let a = set(&z3, &[2]);
        let one = SetFamily::new(&z3, [a.clone()]).unwrap();
        assert_eq!(one.minimal_generators().unwrap(), vec![a.clone()]);
        let two = SetFamily::new(&z3, [GSubset::empty(&z3), a.clone()]).unwrap();
        assert_eq!(two.minimal_generators().unwrap(), vec![a]);
    }

    #[test]
    fn membership_is_exact() {
        let z6 = g("Z6");
        let f = translate_family(&set(&z6, &[0, 2])).unwrap();
        for mask in 0u64..64 {
            let s = GSubset::from_mask(&z6, mask).unwrap();
            assert_eq!(f.contains(&s), f.members().contains(&s));
        }
        assert!(!f.contains(&GSubset::empty(&g("Z2xZ3"))));
    }

    #[test]
    fn new_canonicalizes() {
        let z4 = g("Z4");
        let f = SetFamily::new(&z4, [set(&z4, &[3]), set(&z4, &[0]), set(&z4, &[3])]).unwrap();
        assert_eq!(literals(&f), ["0", "3"]);
        assert!(SetFamily::new(&z4, [GSubset::full(&g("Z3"))]).is_err());
    }

    #[test]
    fn family_file_round_trip() {
        let z3 = g("Z3");
        let f = translate_family(&set(&z3, &[0, 1])).unwrap();
        let text = f.to_file_string();
        assert_eq!(text, "# group: Z3\n-\n0,1\n0,2\n1,2\n0,1,2\n");
        assert_eq!(SetFamily::parse_file(&text).unwrap(), f);

        let shuffled = "# group: Z3\n0,1,2\n1,2\n\n-\n# comment\n0,2\n2,0\n0,1\n";
        let g2 = SetFamily::parse_file(shuffled).unwrap();
        assert_eq!(g2.to_file_string(), text);
    }

    #[test]
    fn family_file_errors() {
        assert!(SetFamily::parse_file("").is_err());
        assert!(SetFamily::parse_file("0,1\n").is_err());
        assert!(SetFamily::parse_file("# group: Q3\n").is_err());
        assert!(SetFamily::parse_file("# group: Z3\n0,3\n").is_err());
        let empty = SetFamily::parse_file("# group: Z3\n").unwrap();
        assert!(empty.is_empty());
    }
}
