//! Finite Abelian groups given as a product of cyclic factors.
//!
//! Elements are flat mixed-radix indices with the last factor varying
//! fastest, so `Z2xZ4` numbers `(a, b)` as `4 * a + b`. The flat index is
//! also the bit position of the element in a [`GSubset`](crate::GSubset).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on the group order.
pub const DEFAULT_MAX_ORDER: usize = 4096;

/// A group element, addressed by its mixed-radix index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub usize);

impl Element {
    pub const ZERO: Element = Element(0);

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Inner {
    moduli: Vec<usize>,
    // strides[i] = product of moduli[i+1..]
    strides: Vec<usize>,
    order: usize,
}

/// `Z_{n_1} x ... x Z_{n_k}`.
///
/// Cheap to clone; clones share storage and compare equal by factor list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    inner: Arc<Inner>,
}

impl GroupSpec {
    /// Builds a group with the default order ceiling.
    pub fn new(moduli: &[usize]) -> Result<Self> {
        Self::with_ceiling(moduli, DEFAULT_MAX_ORDER)
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn with_ceiling(moduli: &[usize], ceiling: usize) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::NoFactors);
        }
        let mut order: u128 = 1;
        for &n in moduli {
            if n == 0 {
                return Err(Error::InvalidModulus(0));
            }
            order = order.saturating_mul(n as u128);
        }
        if order > ceiling as u128 {
            return Err(Error::OrderTooLarge { order, ceiling });
        }
        let mut strides = vec![1; moduli.len()];
        for i in (0..moduli.len() - 1).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1];
        }
        Ok(GroupSpec {
            inner: Arc::new(Inner {
                moduli: moduli.to_vec(),
                strides,
                order: order as usize,
            }),
        })
    }

    /// Parses `Z<n>` or factors joined by `x` (`Z2xZ4`) against a custom ceiling.
    pub fn parse_with_ceiling(s: &str, ceiling: usize) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid group spec {s:?}; expected e.g. Z12 or Z2xZ4"));
        if s.is_empty() {
            return Err(bad());
        }
        let mut moduli = Vec::new();
        for factor in s.split('x') {
            let digits = factor
                .strip_prefix('Z')
                .or_else(|| factor.strip_prefix('z'))
                .ok_or_else(bad)?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let n: u64 = digits.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(Error::InvalidModulus(0));
            }
            moduli.push(usize::try_from(n).map_err(|_| bad())?);
        }
        Self::with_ceiling(&moduli, ceiling)
    }

    pub fn moduli(&self) -> &[usize] {
        &self.inner.moduli
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.inner.strides
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    /// Returns the element for `index`, checking the range.
    pub fn element(&self, index: usize) -> Result<Element> {
        self.check(Element(index))?;
        Ok(Element(index))
    }

    pub(crate) fn check(&self, a: Element) -> Result<()> {
        if a.0 < self.order() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: a.0,
                order: self.order(),
            })
        }
    }

    pub fn decode(&self, a: Element) -> Result<Vec<usize>> {
        self.check(a)?;
        Ok(self
            .moduli()
            .iter()
            .zip(self.strides())
            .map(|(&n, &s)| (a.0 / s) % n)
            .collect())
    }

    pub fn encode(&self, coords: &[usize]) -> Result<Element> {
        let moduli = self.moduli();
        if coords.len() != moduli.len() || coords.iter().zip(moduli).any(|(&c, &n)| c >= n) {
            return Err(Error::InvalidCoordinates {
                coords: coords.to_vec(),
                moduli: moduli.to_vec(),
            });
        }
        Ok(Element(
            coords.iter().zip(self.strides()).map(|(&c, &s)| c * s).sum(),
        ))
    }

    pub fn add(&self, a: Element, b: Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a.0, b.0))
    }

    pub fn neg(&self, a: Element) -> Result<Element> {
        self.check(a)?;
        Ok(self.neg_unchecked(a.0))
    }

    pub fn sub(&self, a: Element, b: Element) -> Result<Element> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    pub(crate) fn add_unchecked(&self, a: usize, b: usize) -> Element {
        let mut out = 0;
        for (&n, &s) in self.moduli().iter().zip(self.strides()) {
            let c = ((a / s) % n + (b / s) % n) % n;
            out += c * s;
        }
        Element(out)
    }

    pub(crate) fn neg_unchecked(&self, a: usize) -> Element {
        let mut out = 0;
        for (&n, &s) in self.moduli().iter().zip(self.strides()) {
            let c = (a / s) % n;
            out += ((n - c) % n) * s;
        }
        Element(out)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = Element> + '_ {
        (0..self.order()).map(Element)
    }

    pub(crate) fn same_as(&self, other: &GroupSpec) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.moduli == other.inner.moduli
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.moduli().iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_ceiling(s, DEFAULT_MAX_ORDER)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(g("Z3").order(), 3);
        assert_eq!(g("Z2xZ4").order(), 8);
        assert_eq!(g("Z1").order(), 1);
    }

    #[test]
    fn add_examples() {
        let z3 = g("Z3");
        assert_eq!(z3.add(Element(1), Element(2)).unwrap(), Element(0));
        let z24 = g("Z2xZ4");
        assert_eq!(z24.add(Element(7), Element(6)).unwrap(), Element(1));
        for a in z24.elements() {
            assert_eq!(z24.add(a, Element::ZERO).unwrap(), a);
        }
    }

    #[test]
    fn neg_examples() {
        assert_eq!(g("Z3").neg(Element(1)).unwrap(), Element(2));
        assert_eq!(g("Z2xZ4").neg(Element(7)).unwrap(), Element(5));
        assert_eq!(g("Z5").neg(Element(0)).unwrap(), Element(0));
    }

    #[test]
    fn coordinates() {
        let z24 = g("Z2xZ4");
        assert_eq!(z24.decode(Element(7)).unwrap(), vec![1, 3]);
        assert_eq!(z24.encode(&[0, 0]).unwrap(), Element(0));
        assert_eq!(g("Z12").decode(Element(5)).unwrap(), vec![5]);
        assert!(z24.encode(&[2, 0]).is_err());
        assert!(z24.encode(&[1]).is_err());
        assert!(z24.decode(Element(8)).is_err());
    }

    #[test]
    fn elements_listing() {
        let idx = |s: &str| g(s).elements().map(Element::index).collect::<Vec<_>>();
        assert_eq!(idx("Z3"), vec![0, 1, 2]);
        assert_eq!(idx("Z1"), vec![0]);
        assert_eq!(idx("Z2xZ2"), vec![0, 1, 2, 3]);
    }

    #[test]
    fn out_of_range_is_an_error() {
        let z3 = g("Z3");
        assert_eq!(
            z3.add(Element(3), Element(0)),
            Err(Error::IndexOutOfRange { index: 3, order: 3 })
        );
        assert!(z3.neg(Element(9)).is_err());
        assert!(z3.element(2).is_ok());
        assert!(z3.element(3).is_err());
    }

    #[test]
    fn group_axioms_exhaustive() {
        for s in ["Z1", "Z2", "Z5", "Z7", "Z12", "Z16", "Z2xZ2", "Z2xZ4", "Z3xZ3", "Z2xZ2xZ2", "Z1xZ3xZ1", "Z4xZ4", "Z2xZ2xZ2xZ2"] {
            let spec = g(s);
            for a in spec.elements() {
                assert_eq!(spec.add(a, spec.neg(a).unwrap()).unwrap(), Element::ZERO);
                assert_eq!(spec.encode(&spec.decode(a).unwrap()).unwrap(), a);
                for b in spec.elements() {
                    let ab = spec.add(a, b).unwrap();
                    assert_eq!(ab, spec.add(b, a).unwrap());
                    for c in spec.elements() {
                        assert_eq!(
                            spec.add(ab, c).unwrap(),
                            spec.add(a, spec.add(b, c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_factors_do_not_change_order() {
        assert_eq!(g("Z1xZ5xZ1").order(), 5);
        assert_eq!(GroupSpec::new(&[1, 1]).unwrap().order(), 1);
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(g("z12").moduli(), &[12]);
        assert_eq!(g("Z2xz4").to_string(), "Z2xZ4");
        for bad in ["", "Z", "12", "Z2x", "xZ2", "Z2 xZ4", "Z-3", "Z2*Z4", "Z+4", " Z3"] {
            assert!(matches!(bad.parse::<GroupSpec>(), Err(Error::Parse(_))), "{bad:?}");
        }
        assert_eq!("Z0".parse::<GroupSpec>(), Err(Error::InvalidModulus(0)));
    }

    #[test]
    fn ceiling() {
        assert!(matches!("Z4097".parse::<GroupSpec>(), Err(Error::OrderTooLarge { .. })));
        assert!("Z64xZ64".parse::<GroupSpec>().is_ok());
        assert!(GroupSpec::parse_with_ceiling("Z10", 9).is_err());
        assert!(GroupSpec::parse_with_ceiling("Z10000", 10000).is_ok());
        let huge = "Z99999999999x".repeat(4) + "Z2";
        assert!(matches!(huge.parse::<GroupSpec>(), Err(Error::OrderTooLarge { .. })));
    }
}
