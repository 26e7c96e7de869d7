//! Subsets of a finite Abelian group as bit-vectors, with sumsets,
//! translates, negation, and the R-neighbourhood / R-interior operators.
//!
//! Bit `i` of a [`GSubset`] is set iff element `i` is a member. Storage is
//! little-endian `u64` words; bits at positions `>= order` are always zero.
//!
//! Translating by an element is done one cyclic factor at a time. For the
//! factor with modulus `n` and stride `s`, the index space splits into
//! super-blocks of `n * s` bits, and translating by `c` in that factor
//! rotates each super-block by `c * s` bits. Each rotation is two
//! word-parallel range copies.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};

const WORD: usize = 64;

fn word_count(order: usize) -> usize {
    order.div_ceil(WORD)
}

fn read_bits(src: &[u64], off: usize, len: usize) -> u64 {
    debug_assert!((1..=WORD).contains(&len));
    let (w, b) = (off / WORD, off % WORD);
    let mut v = src[w] >> b;
    if b != 0 && b + len > WORD {
        v |= src[w + 1] << (WORD - b);
    }
    if len < WORD {
        v &= (1u64 << len) - 1;
    }
    v
}

fn or_bits(dst: &mut [u64], off: usize, val: u64, len: usize) {
    let (w, b) = (off / WORD, off % WORD);
    dst[w] |= val << b;
    if b != 0 && b + len > WORD {
        dst[w + 1] |= val >> (WORD - b);
    }
}

/// `dst[dst_off..dst_off+len] |= src[src_off..src_off+len]`.
fn or_range(dst: &mut [u64], mut dst_off: usize, src: &[u64], mut src_off: usize, mut len: usize) {
    if dst_off.is_multiple_of(WORD) && src_off.is_multiple_of(WORD) {
        while len >= WORD {
            dst[dst_off / WORD] |= src[src_off / WORD];
            dst_off += WORD;
            src_off += WORD;
            len -= WORD;
        }
    }
    while len > 0 {
        let k = len.min(WORD);
        let v = read_bits(src, src_off, k);
        or_bits(dst, dst_off, v, k);
        dst_off += k;
        src_off += k;
        len -= k;
    }
}

/// A subset of `G`.
#[derive(Clone)]
pub struct GSubset {
    spec: GroupSpec,
    words: Vec<u64>,
}

impl GSubset {
    pub fn empty(spec: &GroupSpec) -> Self {
        GSubset {
            spec: spec.clone(),
            words: vec![0; word_count(spec.order())],
        }
    }

    /// The whole group.
    pub fn full(spec: &GroupSpec) -> Self {
        let mut s = Self::empty(spec);
        s.words.iter_mut().for_each(|w| *w = !0);
        s.clear_padding();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(spec: &GroupSpec, indices: I) -> Result<Self> {
        let mut s = Self::empty(spec);
        for i in indices {
            s.insert(spec.element(i)?);
        }
        Ok(s)
    }

    pub fn from_elements<I: IntoIterator<Item = Element>>(spec: &GroupSpec, elements: I) -> Result<Self> {
        Self::from_indices(spec, elements.into_iter().map(Element::index))
    }

    /// Builds a subset from raw little-endian words; bits beyond the order must be clear.
    pub fn from_words(spec: &GroupSpec, words: Vec<u64>) -> Result<Self> {
        let s = GSubset {
            spec: spec.clone(),
            words,
        };
        if s.words.len() != word_count(spec.order()) {
            return Err(Error::Parse(format!(
                "expected {} words for {spec}, got {}",
                word_count(spec.order()),
                s.words.len()
            )));
        }
        let mut masked = s.clone();
        masked.clear_padding();
        if masked.words != s.words {
            return Err(Error::Parse(format!("bits set beyond order {}", spec.order())));
        }
        Ok(s)
    }

    /// Subset whose members are the set bits of `mask`; the group order must be at most 64.
    pub fn from_mask(spec: &GroupSpec, mask: u64) -> Result<Self> {
        if spec.order() > WORD {
            return Err(Error::GroupTooLarge {
                order: spec.order(),
                limit: WORD,
            });
        }
        Self::from_words(spec, vec![mask])
    }

    fn clear_padding(&mut self) {
        let rem = self.spec.order() % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The member bits as a `u64`, for groups of order at most 64.
    pub fn mask(&self) -> Option<u64> {
        match self.words.as_slice() {
            [w] => Some(*w),
            _ => None,
        }
    }

    pub fn contains(&self, a: Element) -> bool {
        a.0 < self.spec.order() && self.words[a.0 / WORD] >> (a.0 % WORD) & 1 == 1
    }

    /// Inserts `a`; panics if `a` is out of range.
    pub fn insert(&mut self, a: Element) {
        assert!(a.0 < self.spec.order(), "element {a} out of range for {}", self.spec);
        self.words[a.0 / WORD] |= 1 << (a.0 % WORD);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.spec.order()
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(Element(wi * WORD + b))
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().map(Element::index).collect()
    }

    fn same_spec(&self, other: &GSubset) -> Result<()> {
        if self.spec.same_as(&other.spec) {
            Ok(())
        } else {
            Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: other.spec.to_string(),
            })
        }
    }

    pub fn is_subset(&self, other: &GSubset) -> Result<bool> {
        self.same_spec(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    pub fn union(&self, other: &GSubset) -> Result<GSubset> {
        self.same_spec(other)?;
        Ok(self.union_unchecked(other))
    }

    pub(crate) fn union_unchecked(&self, other: &GSubset) -> GSubset {
        GSubset {
            spec: self.spec.clone(),
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &GSubset) -> Result<GSubset> {
        self.same_spec(other)?;
        Ok(GSubset {
            spec: self.spec.clone(),
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        })
    }

    /// `G \ A`.
    pub fn complement(&self) -> GSubset {
        let mut out = GSubset {
            spec: self.spec.clone(),
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_padding();
        out
    }

    /// `-A`.
    pub fn negate(&self) -> GSubset {
        let mut out = Self::empty(&self.spec);
        for a in self.iter() {
            out.insert(self.spec.neg_unchecked(a.0));
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.negate() == *self
    }

    /// `g + A`.
    pub fn translate(&self, g: Element) -> Result<GSubset> {
        self.spec.check(g)?;
        Ok(self.translate_unchecked(g.0))
    }

    fn translate_unchecked(&self, g: usize) -> GSubset {
        let spec = &self.spec;
        let mut cur: Option<GSubset> = None;
        for (&n, &s) in spec.moduli().iter().zip(spec.strides()) {
            let c = (g / s) % n;
            if c == 0 {
                continue;
            }
            let src = cur.as_ref().unwrap_or(self);
            let mut dst = Self::empty(spec);
            let block = n * s;
            let shift = c * s;
            let mut base = 0;
            while base < spec.order() {
                // [base, base+block-shift) -> [base+shift, base+block)
                or_range(&mut dst.words, base + shift, &src.words, base, block - shift);
                // [base+block-shift, base+block) -> [base, base+shift)
                or_range(&mut dst.words, base, &src.words, base + block - shift, shift);
                base += block;
            }
            cur = Some(dst);
        }
        cur.unwrap_or_else(|| self.clone())
    }

    /// `A + B`, built as the union of translates of the larger operand by
    /// members of the smaller.
    pub fn sumset(&self, other: &GSubset) -> Result<GSubset> {
        self.same_spec(other)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::empty(&self.spec);
        for a in small.iter() {
            let t = large.translate_unchecked(a.0);
            out.words.iter_mut().zip(&t.words).for_each(|(o, w)| *o |= w);
        }
        Ok(out)
    }

    /// `N_R(A) = A + R`.
    pub fn neighbourhood(&self, r: &GSubset) -> Result<GSubset> {
        self.sumset(r)
    }

    /// `Int_R(A) = {x : x + R ⊆ A}`, computed as the intersection of
    /// `A - r` over `r ∈ R`. For empty `R` this is all of `G`.
    pub fn interior(&self, r: &GSubset) -> Result<GSubset> {
        self.same_spec(r)?;
        let mut out = Self::full(&self.spec);
        for x in r.iter() {
            let t = self.translate_unchecked(self.spec.neg_unchecked(x.0).0);
            out.words.iter_mut().zip(&t.words).for_each(|(o, w)| *o &= w);
            if out.is_empty() {
                break;
            }
        }
        Ok(out)
    }
}

/// The pairing map `f(S) = -(G \ Int_R(S))`.
pub fn f_map(s: &GSubset, r: &GSubset) -> Result<GSubset> {
    if r.is_empty() {
        return Err(Error::EmptyR);
    }
    Ok(s.interior(r)?.complement().negate())
}

/// The same map through the closed form `(-(G \ S)) + R`.
pub fn f_map_alt(s: &GSubset, r: &GSubset) -> Result<GSubset> {
    if r.is_empty() {
        return Err(Error::EmptyR);
    }
    s.complement().negate().sumset(r)
}

impl PartialEq for GSubset {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words && self.spec.same_as(&other.spec)
    }
}

impl Eq for GSubset {}

impl Hash for GSubset {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.words.hash(state);
    }
}

/// Canonical order: the bit-vector read as an integer with bit `i` weighted
/// `2^i`. Subsets of different groups are ordered by factor list first.
impl Ord for GSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        if !self.spec.same_as(&other.spec) {
            return self.spec.moduli().cmp(other.spec.moduli());
        }
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

impl PartialOrd for GSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Set literal: ascending comma-separated indices, `-` for the empty set.
impl fmt::Display for GSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}} in {}", self.spec)
    }
}

/// Parses a set literal (`0,1,3` or `-`).
pub fn parse_set(spec: &GroupSpec, s: &str) -> Result<GSubset> {
    if s == "-" {
        return Ok(GSubset::empty(spec));
    }
    let mut out = GSubset::empty(spec);
    for tok in s.split(',') {
        if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("invalid set literal {s:?}")));
        }
        let i: usize = tok
            .parse()
            .map_err(|_| Error::Parse(format!("invalid element {tok:?}")))?;
        out.insert(spec.element(i)?);
    }
    Ok(out)
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

    #[test]
    fn translate_examples() {
        let z3 = g("Z3");
        assert_eq!(set(&z3, &[0, 1]).translate(Element(1)).unwrap(), set(&z3, &[1, 2]));
        let a = set(&z3, &[0, 2]);
        assert_eq!(a.translate(Element::ZERO).unwrap(), a);
        let z24 = g("Z2xZ4");
        assert_eq!(set(&z24, &[0]).translate(Element(5)).unwrap(), set(&z24, &[5]));
        assert!(a.translate(Element(3)).is_err());
    }

    #[test]
    fn translate_matches_elementwise_addition() {
        for s in ["Z7", "Z2xZ4", "Z3xZ5", "Z2xZ3xZ2", "Z70", "Z3xZ40", "Z130", "Z5xZ1xZ29"] {
            let spec = g(s);
            let a = GSubset::from_indices(&spec, spec.elements().map(|e| e.0).filter(|i| i % 3 == 0 || i % 7 == 2)).unwrap();
            for t in spec.elements() {
                let expected =
                    GSubset::from_elements(&spec, a.iter().map(|x| spec.add(t, x).unwrap())).unwrap();
                assert_eq!(a.translate(t).unwrap(), expected, "{s} by {t}");
            }
        }
    }

    #[test]
    fn sumset_examples() {
        let z3 = g("Z3");
        let a = set(&z3, &[0, 1]);
        assert_eq!(a.sumset(&a).unwrap(), GSubset::full(&z3));
        assert_eq!(a.sumset(&set(&z3, &[0])).unwrap(), a);
        assert_eq!(GSubset::empty(&z3).sumset(&a).unwrap(), GSubset::empty(&z3));
    }

    #[test]
    fn negate_complement_symmetric() {
        let z3 = g("Z3");
        let a = set(&z3, &[1, 2]);
        assert_eq!(a.negate(), a);
        assert!(GSubset::empty(&z3).negate().is_empty());
        assert!(GSubset::full(&z3).negate().is_full());
        assert_eq!(set(&z3, &[0]).complement(), a);
        assert!(GSubset::full(&z3).complement().is_empty());
        assert!(GSubset::empty(&z3).complement().is_full());

        assert!(a.is_symmetric());
        assert!(GSubset::empty(&z3).is_symmetric());
        assert!(!set(&g("Z4"), &[1]).is_symmetric());
    }

    #[test]
    fn complement_keeps_padding_clear() {
        let z70 = g("Z70");
        let c = GSubset::empty(&z70).complement();
        assert_eq!(c.len(), 70);
        assert_eq!(c.words()[1], (1u64 << 6) - 1);
    }

    #[test]
    fn neighbourhood_examples() {
        let z3 = g("Z3");
        let r = set(&z3, &[0, 1]);
        assert_eq!(set(&z3, &[0]).neighbourhood(&r).unwrap(), r);
        assert!(GSubset::empty(&z3).neighbourhood(&r).unwrap().is_empty());
        assert!(set(&z3, &[0, 1]).neighbourhood(&r).unwrap().is_full());
    }

    #[test]
    fn interior_examples() {
        let z3 = g("Z3");
        let r = set(&z3, &[0, 1]);
        assert_eq!(set(&z3, &[0, 1]).interior(&r).unwrap(), set(&z3, &[0]));
        assert!(GSubset::full(&z3).interior(&r).unwrap().is_full());
        assert!(GSubset::empty(&z3).interior(&r).unwrap().is_empty());
        // vacuous for empty R
        assert!(set(&z3, &[1]).interior(&GSubset::empty(&z3)).unwrap().is_full());
    }

    #[test]
    fn f_map_examples() {
        let z3 = g("Z3");
        let r = set(&z3, &[0, 1]);
        let s = set(&z3, &[0, 1]);
        assert_eq!(f_map(&s, &r).unwrap(), set(&z3, &[1, 2]));
        assert_eq!(f_map_alt(&s, &r).unwrap(), set(&z3, &[1, 2]));
        assert!(f_map(&GSubset::empty(&z3), &r).unwrap().is_full());
        assert!(f_map_alt(&GSubset::empty(&z3), &r).unwrap().is_full());
        assert!(f_map(&GSubset::full(&z3), &r).unwrap().is_empty());
        assert!(f_map_alt(&GSubset::full(&z3), &r).unwrap().is_empty());
    }

    #[test]
    fn f_map_rejects_empty_r() {
        let z3 = g("Z3");
        let e = GSubset::empty(&z3);
        assert_eq!(f_map(&e, &e), Err(Error::EmptyR));
        assert_eq!(f_map_alt(&e, &e), Err(Error::EmptyR));
    }

    #[test]
    fn spec_mismatch_is_rejected() {
        let a = GSubset::full(&g("Z3"));
        let b = GSubset::full(&g("Z1xZ3"));
        assert!(matches!(a.sumset(&b), Err(Error::SpecMismatch { .. })));
        assert!(matches!(a.interior(&b), Err(Error::SpecMismatch { .. })));
        assert!(matches!(f_map(&a, &b), Err(Error::SpecMismatch { .. })));
        assert!(matches!(a.union(&b), Err(Error::SpecMismatch { .. })));
        assert_ne!(a, b);
        // separately constructed but identical groups are the same universe
        assert_eq!(a, GSubset::full(&g("Z3")));
    }

    #[test]
    fn canonical_order_is_integer_order() {
        let z70 = g("Z70");
        let lo = set(&z70, &[0, 1, 2, 63]);
        let hi = set(&z70, &[64]);
        assert!(lo < hi);
        assert!(set(&z70, &[1]) > set(&z70, &[0]));
        assert!(GSubset::empty(&z70) < set(&z70, &[0]));
    }

    #[test]
    fn set_literals() {
        let z5 = g("Z5");
        assert_eq!(parse_set(&z5, "3,0,1").unwrap().to_string(), "0,1,3");
        assert_eq!(parse_set(&z5, "-").unwrap(), GSubset::empty(&z5));
        assert_eq!(GSubset::empty(&z5).to_string(), "-");
        assert_eq!(parse_set(&z5, "1,1").unwrap().to_string(), "1");
        for bad in ["", ",", "1,", "a", "1 ,2", "-1", "--"] {
            assert!(matches!(parse_set(&z5, bad), Err(Error::Parse(_))), "{bad:?}");
        }
        assert!(matches!(parse_set(&z5, "5"), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn words_and_masks() {
        let z3 = g("Z3");
        assert_eq!(GSubset::from_mask(&z3, 0b011).unwrap(), set(&z3, &[0, 1]));
        assert!(GSubset::from_mask(&z3, 0b1000).is_err());
        assert!(GSubset::from_mask(&g("Z65"), 1).is_err());
        assert_eq!(set(&z3, &[2]).mask(), Some(4));
    }

    #[test]
    fn iteration_is_ascending() {
        let z200 = g("Z200");
        let s = set(&z200, &[199, 3, 64, 0, 128]);
        assert_eq!(s.indices(), vec![0, 3, 64, 128, 199]);
        assert_eq!(s.len(), 5);
    }
}
