//! The four `Z^2`-graded Lie algebras and their structure constants.
//!
//! * `VirasoroGeneric` / `VirasoroRoot`: basis `L_m`, `[L_m, L_n] = λ(m,n) L_{m+n}`
//!   with `λ(m,n) = q^{m2 n1} - q^{m1 n2}`.
//! * `TorusGeneric` / `TorusRoot`: basis `x^m`, `D(m)` of the quantum torus Lie
//!   algebra; at a root of unity the `D`-brackets use the piecewise `h` and `g`.
//!
//! Degree `(0,0)` is never a basis vector; anything landing there is zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{parse_rational, Scalar, ScalarField};

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Degree {
    pub m1: i64,
    pub m2: i64,
}

impl Degree {
    pub const ZERO: Degree = Degree { m1: 0, m2: 0 };

    pub const fn new(m1: i64, m2: i64) -> Self {
        Degree { m1, m2 }
    }

    pub fn is_zero(self) -> bool {
        self.m1 == 0 && self.m2 == 0
    }

    /// Sup norm, the window radius this degree needs.
    pub fn radius(self) -> i64 {
        self.m1.abs().max(self.m2.abs())
    }

    pub fn divisible_by(self, t: u32) -> bool {
        self.m1 % t as i64 == 0 && self.m2 % t as i64 == 0
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, o: Degree) -> Degree {
        Degree::new(self.m1 + o.m1, self.m2 + o.m2)
    }
}

impl Sub for Degree {
    type Output = Degree;
    fn sub(self, o: Degree) -> Degree {
        Degree::new(self.m1 - o.m1, self.m2 - o.m2)
    }
}

impl Neg for Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree::new(-self.m1, -self.m2)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m1, self.m2)
    }
}

impl FromStr for Degree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad degree `{s}`")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad degree `{s}`")))
        };
        Ok(Degree::new(parse(a)?, parse(b)?))
    }
}

/// `det(n over m) = m2 n1 - m1 n2`; the first argument supplies `m`.
pub fn det2(m: Degree, n: Degree) -> i64 {
    m.m2 * n.m1 - m.m1 * n.m2
}

/// Which family a basis vector belongs to. `L` for the Virasoro-like
/// algebras, `X` (`x^m`) and `D` (`D(m)`) for the quantum torus.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Tag {
    L,
    X,
    D,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::L => "L",
            Tag::X => "X",
            Tag::D => "D",
        })
    }
}

/// Basis vector; orders lexicographically by `(m1, m2, tag)`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BasisElem {
    pub degree: Degree,
    pub tag: Tag,
}

impl BasisElem {
    pub const fn new(tag: Tag, degree: Degree) -> Self {
        BasisElem { degree, tag }
    }

    pub const fn l(m1: i64, m2: i64) -> Self {
        BasisElem::new(Tag::L, Degree::new(m1, m2))
    }

    pub const fn x(m1: i64, m2: i64) -> Self {
        BasisElem::new(Tag::X, Degree::new(m1, m2))
    }

    pub const fn d(m1: i64, m2: i64) -> Self {
        BasisElem::new(Tag::D, Degree::new(m1, m2))
    }
}

impl fmt::Display for BasisElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.tag, self.degree)
    }
}

/// Finite linear combination of basis vectors with no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Element {
    terms: BTreeMap<BasisElem, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn term(b: BasisElem, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(b, c);
        e
    }

    pub fn basis(b: BasisElem) -> Self {
        Element::term(b, Scalar::one())
    }

    /// Adds `c * b`; terms at degree zero vanish by convention.
    pub fn add_term(&mut self, b: BasisElem, c: Scalar) {
        if c.is_zero() || b.degree.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (b, v) in &other.terms {
            self.add_term(*b, v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Element {
        let mut out = Element::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, b: &BasisElem) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisElem, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::int(-1));
        out
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    VirasoroGeneric,
    VirasoroRoot,
    TorusGeneric,
    TorusRoot,
}

impl Variant {
    pub const ALL: [Variant; 4] =
        [Variant::VirasoroGeneric, Variant::VirasoroRoot, Variant::TorusGeneric, Variant::TorusRoot];

    pub fn name(self) -> &'static str {
        match self {
            Variant::VirasoroGeneric => "virasoro-generic",
            Variant::VirasoroRoot => "virasoro-root",
            Variant::TorusGeneric => "torus-generic",
            Variant::TorusRoot => "torus-root",
        }
    }

    pub fn is_root(self) -> bool {
        matches!(self, Variant::VirasoroRoot | Variant::TorusRoot)
    }

    pub fn is_torus(self) -> bool {
        matches!(self, Variant::TorusGeneric | Variant::TorusRoot)
    }

    /// Basis tags of this variant, in layout order.
    pub fn tags(self) -> &'static [Tag] {
        if self.is_torus() {
            &[Tag::X, Tag::D]
        } else {
            &[Tag::L]
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algebra `{s}`")))
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
pub enum GammaClass {
    /// `(tZ)^2 \ {0}`
    Gamma1,
    /// `Z^2 \ (tZ)^2`
    Gamma2,
}

/// Square window `|m1|, |m2| <= n` without the origin.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Window {
    pub n: u32,
}

impl Window {
    pub fn new(n: u32) -> Self {
        Window { n }
    }

    pub fn contains(&self, d: Degree) -> bool {
        !d.is_zero() && d.radius() <= self.n as i64
    }

    pub fn contains_or_zero(&self, d: Degree) -> bool {
        d.radius() <= self.n as i64
    }

    /// All points, lexicographic by `(m1, m2)`.
    pub fn points(&self) -> Vec<Degree> {
        let n = self.n as i64;
        (-n..=n)
            .flat_map(|a| (-n..=n).map(move |b| Degree::new(a, b)))
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn len(&self) -> usize {
        let side = 2 * self.n as usize + 1;
        side * side - 1
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Wire form of an algebra choice: `{"variant": "virasoro-root", "t": 3}`
/// or `{"variant": "virasoro-generic", "q": "2"}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AlgebraSelection {
    pub variant: Variant,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<u32>,
}

/// Anything with basis-level structure constants that can be checked.
pub trait StructureConstants {
    fn variant(&self) -> Variant;

    /// `[a, b]` as a single scaled basis vector, or `None` when zero.
    fn bracket_basis(&self, a: BasisElem, b: BasisElem) -> Result<Option<(BasisElem, Scalar)>>;

    fn basis(&self, w: &Window) -> Vec<BasisElem> {
        let tags = self.variant().tags();
        w.points()
            .into_iter()
            .flat_map(|d| tags.iter().map(move |&t| BasisElem::new(t, d)))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    variant: Variant,
    field: ScalarField,
}

impl AlgebraSpec {
    pub fn new(variant: Variant, field: ScalarField) -> Result<Self> {
        let ok = match field {
            ScalarField::GenericQ { .. } => !variant.is_root(),
            ScalarField::Cyclotomic { .. } => variant.is_root(),
        };
        if !ok {
            return Err(Error::Config(format!("{variant} cannot be paired with this scalar field")));
        }
        Ok(AlgebraSpec { variant, field })
    }

    pub fn virasoro_generic(q: crate::scalars::Rational) -> Result<Self> {
        AlgebraSpec::new(Variant::VirasoroGeneric, ScalarField::generic(q)?)
    }

    pub fn virasoro_root(t: u32) -> Result<Self> {
        AlgebraSpec::new(Variant::VirasoroRoot, ScalarField::cyclotomic(t)?)
    }

    pub fn torus_generic(q: crate::scalars::Rational) -> Result<Self> {
        AlgebraSpec::new(Variant::TorusGeneric, ScalarField::generic(q)?)
    }

    pub fn torus_root(t: u32) -> Result<Self> {
        AlgebraSpec::new(Variant::TorusRoot, ScalarField::cyclotomic(t)?)
    }

    pub fn from_selection(sel: &AlgebraSelection) -> Result<Self> {
        let field = if sel.variant.is_root() {
            let t = sel.t.ok_or_else(|| Error::Config(format!("{} needs t", sel.variant)))?;
            ScalarField::cyclotomic(t)?
        } else {
            let q = sel.q.as_deref().unwrap_or("2");
            ScalarField::generic(parse_rational(q)?)?
        };
        AlgebraSpec::new(sel.variant, field)
    }

    pub fn selection(&self) -> AlgebraSelection {
        AlgebraSelection {
            variant: self.variant,
            q: self.field.q0().map(|q| q.to_string()),
            t: self.field.t(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn t(&self) -> Option<u32> {
        self.field.t()
    }

    fn root_t(&self) -> Result<u32> {
        self.t()
            .ok_or_else(|| Error::UnsupportedVariant(format!("{} has no root-of-unity order", self.variant)))
    }

    /// `λ(m,n) = q^{m2 n1} - q^{m1 n2}`.
    pub fn lambda_coeff(&self, m: Degree, n: Degree) -> Scalar {
        let (a, b) = (m.m2 * n.m1, m.m1 * n.m2);
        if a == b {
            return Scalar::zero();
        }
        self.field.qpow(a) - self.field.qpow(b)
    }

    pub fn gamma_class(&self, m: Degree) -> Result<GammaClass> {
        let t = self.root_t()?;
        Ok(if m.divisible_by(t) { GammaClass::Gamma1 } else { GammaClass::Gamma2 })
    }

    fn require(&self, v: Variant) -> Result<()> {
        if self.variant != v {
            return Err(Error::UnsupportedVariant(format!("requires {v}, got {}", self.variant)));
        }
        Ok(())
    }

    /// `h(m,n)`: `det` when `m` is central-lattice, `λ` otherwise.
    pub fn h_coeff(&self, m: Degree, n: Degree) -> Result<Scalar> {
        self.require(Variant::TorusRoot)?;
        Ok(match self.gamma_class(m)? {
            GammaClass::Gamma1 => Scalar::int(det2(m, n)),
            GammaClass::Gamma2 => self.lambda_coeff(m, n),
        })
    }

    /// `g(m,n)`: `λ` when both arguments are off the central lattice, `det` otherwise.
    pub fn g_coeff(&self, m: Degree, n: Degree) -> Result<Scalar> {
        self.require(Variant::TorusRoot)?;
        let both_gamma2 =
            self.gamma_class(m)? == GammaClass::Gamma2 && self.gamma_class(n)? == GammaClass::Gamma2;
        Ok(if both_gamma2 { self.lambda_coeff(m, n) } else { Scalar::int(det2(m, n)) })
    }

    pub fn bracket(&self, a: BasisElem, b: BasisElem) -> Result<Element> {
        Ok(match self.bracket_basis(a, b)? {
            Some((e, c)) => Element::term(e, c),
            None => Element::zero(),
        })
    }

    /// Bilinear extension of the bracket.
    pub fn bracket_elements(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                if let Some((e, c)) = self.bracket_basis(*a, *b)? {
                    out.add_term(e, &(&c * ca) * cb);
                }
            }
        }
        Ok(out)
    }

    fn torus_coeff(&self, a: BasisElem, b: BasisElem) -> Result<(Tag, Scalar)> {
        let (m, n) = (a.degree, b.degree);
        let generic = self.variant == Variant::TorusGeneric;
        Ok(match (a.tag, b.tag) {
            (Tag::X, Tag::X) => (Tag::X, self.lambda_coeff(m, n)),
            (Tag::D, Tag::X) if generic => (Tag::X, self.lambda_coeff(m, n)),
            (Tag::X, Tag::D) if generic => (Tag::X, -self.lambda_coeff(n, m)),
            (Tag::D, Tag::D) if generic => (Tag::D, self.lambda_coeff(m, n)),
            (Tag::D, Tag::X) => (Tag::X, self.h_coeff(m, n)?),
            (Tag::X, Tag::D) => (Tag::X, -self.h_coeff(n, m)?),
            (Tag::D, Tag::D) => (Tag::D, self.g_coeff(m, n)?),
            _ => return Err(self.tag_mismatch(a, b)),
        })
    }

    fn tag_mismatch(&self, a: BasisElem, b: BasisElem) -> Error {
        Error::UnsupportedVariant(format!("basis vectors {a}, {b} do not belong to {}", self.variant))
    }
}

impl StructureConstants for AlgebraSpec {
    fn variant(&self) -> Variant {
        self.variant
    }

    fn bracket_basis(&self, a: BasisElem, b: BasisElem) -> Result<Option<(BasisElem, Scalar)>> {
        let tags = self.variant.tags();
        if !tags.contains(&a.tag) || !tags.contains(&b.tag) {
            return Err(self.tag_mismatch(a, b));
        }
        let target = a.degree + b.degree;
        if a.degree.is_zero() || b.degree.is_zero() || target.is_zero() {
            return Ok(None);
        }
        let (tag, c) = if self.variant.is_torus() {
            self.torus_coeff(a, b)?
        } else {
            (Tag::L, self.lambda_coeff(a.degree, b.degree))
        };
        Ok((!c.is_zero()).then(|| (BasisElem::new(tag, target), c)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiViolation {
    pub a: String,
    pub b: String,
    pub c: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AntisymmetryViolation {
    pub a: String,
    pub b: String,
    pub residual: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct JacobiReport {
    pub pairs_checked: u64,
    pub triples_checked: u64,
    pub antisymmetry_violations: Vec<AntisymmetryViolation>,
    pub jacobi_violations: Vec<JacobiViolation>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.antisymmetry_violations.is_empty() && self.jacobi_violations.is_empty()
    }
}

fn format_element(field: &ScalarField, e: &Element) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = e.terms().map(|(b, c)| format!("{}*{b}", field.format(c))).collect();
    parts.join(" + ")
}

/// Antisymmetry on every pair of window basis vectors, and the Jacobi
/// identity on every ordered triple whose pairwise and total degrees stay in
/// the window (or hit zero).
pub fn jacobi_check<S>(spec: &S, field: &ScalarField, w: &Window) -> Result<JacobiReport>
where
    S: StructureConstants + Sync,
{
    use crate::par::*;
    use std::collections::HashMap;

    let basis = spec.basis(w);
    let mut table: HashMap<(BasisElem, BasisElem), Option<(BasisElem, Scalar)>> =
        HashMap::with_capacity(basis.len() * basis.len());
    let mut report = JacobiReport::default();
    for &a in &basis {
        for &b in &basis {
            table.insert((a, b), spec.bracket_basis(a, b)?);
        }
    }
    for (i, &a) in basis.iter().enumerate() {
        for &b in &basis[i..] {
            report.pairs_checked += 1;
            let mut sum = Element::zero();
            for (x, y) in [(a, b), (b, a)] {
                if let Some((e, c)) = &table[&(x, y)] {
                    sum.add_term(*e, c.clone());
                }
            }
            if !sum.is_zero() {
                report.antisymmetry_violations.push(AntisymmetryViolation {
                    a: a.to_string(),
                    b: b.to_string(),
                    residual: format_element(field, &sum),
                });
            }
        }
    }

    // [x, [y, z]] with the inner bracket looked up, the outer computed
    let nested = |x: BasisElem, y: BasisElem, z: BasisElem| -> Result<Option<(BasisElem, Scalar)>> {
        match &table[&(y, z)] {
            None => Ok(None),
            Some((e, c)) => {
                let outer = match table.get(&(x, *e)) {
                    Some(v) => v.clone(),
                    None => spec.bracket_basis(x, *e)?,
                };
                Ok(outer.map(|(f, d)| (f, &d * c)))
            }
        }
    };

    let admissible = |a: BasisElem, b: BasisElem, c: BasisElem| {
        let (x, y, z) = (a.degree, b.degree, c.degree);
        [x + y, y + z, z + x, x + y + z].into_iter().all(|d| w.contains_or_zero(d))
    };

    let per_a: Vec<Result<(u64, Vec<JacobiViolation>)>> = basis
        .par_iter()
        .map(|&a| {
            let mut count = 0u64;
            let mut bad = Vec::new();
            for &b in &basis {
                for &c in &basis {
                    if !admissible(a, b, c) {
                        continue;
                    }
                    count += 1;
                    let mut sum = Element::zero();
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        if let Some((e, v)) = nested(x, y, z)? {
                            sum.add_term(e, v);
                        }
                    }
                    if !sum.is_zero() {
                        bad.push(JacobiViolation {
                            a: a.to_string(),
                            b: b.to_string(),
                            c: c.to_string(),
                            residual: format_element(field, &sum),
                        });
                    }
                }
            }
            Ok((count, bad))
        })
        .collect();
    for r in per_a {
        let (count, bad) = r?;
        report.triples_checked += count;
        report.jacobi_violations.extend(bad);
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// The defining relations among the generators `x^{(±1,0)}, x^{(0,±1)},
/// D(±1,0), D(0,±1)` of the generic quantum torus Lie algebra, each
/// evaluated by bracketing.
pub fn lemma41_relations(spec: &AlgebraSpec) -> Result<Vec<RelationCheck>> {
    spec.require(Variant::TorusGeneric)?;
    let f = spec.field();
    let q = f.q();
    let qi = q.inv()?;
    let one = Scalar::one();
    let e = |tag: Tag, a: i64, b: i64| BasisElem::new(tag, Degree::new(a, b));

    let mut out = Vec::new();
    for tag in [Tag::X, Tag::D] {
        for (u, v) in [((1, 0), (-1, 0)), ((0, 1), (0, -1))] {
            let (a, b) = (e(tag, u.0, u.1), e(tag, v.0, v.1));
            let lhs = spec.bracket(a, b)?;
            out.push(RelationCheck {
                relation: format!("[{a},{b}] = 0"),
                lhs: format_element(f, &lhs),
                rhs: "0".into(),
                holds: lhs.is_zero(),
            });
        }
        let cases: [((i64, i64), (i64, i64), (i64, i64), Scalar, (i64, i64)); 4] = [
            ((1, 0), (0, 1), (-1, 0), (&one - &q) * (&qi - &one), (0, 1)),
            ((1, 0), (0, -1), (-1, 0), (&one - &qi) * (&q - &one), (0, -1)),
            ((0, 1), (1, 0), (0, -1), (&q - &one) * (&one - &qi), (1, 0)),
            ((0, 1), (-1, 0), (0, -1), (&qi - &one) * (&one - &q), (-1, 0)),
        ];
        for (u, v, w, coeff, target) in cases {
            let (a, b, c) = (e(tag, u.0, u.1), e(tag, v.0, v.1), e(tag, w.0, w.1));
            let lhs = spec.bracket_elements(&spec.bracket(a, b)?, &Element::basis(c))?;
            let rhs = Element::term(e(tag, target.0, target.1), coeff);
            out.push(RelationCheck {
                relation: format!("[[{a},{b}],{c}] = c*{}", e(tag, target.0, target.1)),
                lhs: format_element(f, &lhs),
                rhs: format_element(f, &rhs),
                holds: lhs == rhs,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_frac};

    fn vg(q: i64) -> AlgebraSpec {
        AlgebraSpec::virasoro_generic(rat(q)).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let s = vg(2);
        assert_eq!(s.lambda_coeff(Degree::new(1, 2), Degree::new(3, 4)), Scalar::int(48));
        let m = Degree::new(5, -3);
        assert!(s.lambda_coeff(m, m).is_zero());

        let r = AlgebraSpec::virasoro_root(3).unwrap();
        assert!(r.lambda_coeff(Degree::new(3, 0), Degree::new(0, 3)).is_zero());
        let expected = &Scalar::one() - &r.field().q();
        assert_eq!(r.lambda_coeff(Degree::new(1, 0), Degree::new(0, 1)), expected);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det2(Degree::new(3, 0), Degree::new(0, 1)), -3);
        assert_eq!(det2(Degree::new(3, 3), Degree::new(1, 1)), 0);
        assert_eq!(det2(Degree::new(0, 3), Degree::new(1, 0)), 3);
    }

    #[test]
    fn gamma_examples() {
        let r3 = AlgebraSpec::virasoro_root(3).unwrap();
        assert_eq!(r3.gamma_class(Degree::new(3, -6)).unwrap(), GammaClass::Gamma1);
        assert_eq!(r3.gamma_class(Degree::new(3, 1)).unwrap(), GammaClass::Gamma2);
        let r4 = AlgebraSpec::torus_root(4).unwrap();
        assert_eq!(r4.gamma_class(Degree::new(2, 2)).unwrap(), GammaClass::Gamma2);
        assert!(matches!(vg(2).gamma_class(Degree::new(1, 1)), Err(Error::UnsupportedVariant(_))));
    }

    #[test]
    fn h_and_g_examples() {
        let s = AlgebraSpec::torus_root(3).unwrap();
        let one_minus_z = &Scalar::one() - &s.field().q();
        let d = Degree::new;
        assert_eq!(s.h_coeff(d(3, 0), d(0, 1)).unwrap(), Scalar::int(-3));
        assert_eq!(s.h_coeff(d(1, 0), d(0, 1)).unwrap(), one_minus_z);
        assert!(s.h_coeff(d(3, 3), d(1, 1)).unwrap().is_zero());
        assert_eq!(s.g_coeff(d(1, 0), d(0, 1)).unwrap(), one_minus_z);
        assert_eq!(s.g_coeff(d(3, 0), d(0, 3)).unwrap(), Scalar::int(-9));
        assert!(s.g_coeff(d(3, 0), d(1, 0)).unwrap().is_zero());
        assert!(vg(2).h_coeff(d(1, 0), d(0, 1)).is_err());
        assert!(AlgebraSpec::virasoro_root(3).unwrap().g_coeff(d(1, 0), d(0, 1)).is_err());
    }

    #[test]
    fn bracket_examples() {
        let s = vg(2);
        assert_eq!(
            s.bracket(BasisElem::l(1, 0), BasisElem::l(0, 1)).unwrap(),
            Element::term(BasisElem::l(1, 1), Scalar::int(-1))
        );
        assert!(s.bracket(BasisElem::l(2, 1), BasisElem::l(2, 1)).unwrap().is_zero());
        assert!(s.bracket(BasisElem::l(2, 1), BasisElem::l(-2, -1)).unwrap().is_zero());

        let r = AlgebraSpec::torus_root(3).unwrap();
        assert_eq!(
            r.bracket(BasisElem::d(3, 0), BasisElem::x(0, 1)).unwrap(),
            Element::term(BasisElem::x(3, 1), Scalar::int(-3))
        );
        assert_eq!(
            r.bracket(BasisElem::x(0, 1), BasisElem::d(3, 0)).unwrap(),
            Element::term(BasisElem::x(3, 1), Scalar::int(3))
        );
        assert!(r.bracket(BasisElem::d(1, 0), BasisElem::d(2, 0)).unwrap().is_zero());
        assert!(matches!(r.bracket(BasisElem::l(1, 0), BasisElem::x(1, 0)), Err(Error::UnsupportedVariant(_))));
    }

    #[test]
    fn spec_pairing_is_checked() {
        let f = ScalarField::cyclotomic(3).unwrap();
        assert!(AlgebraSpec::new(Variant::VirasoroGeneric, f).is_err());
        let g = ScalarField::generic(rat(2)).unwrap();
        assert!(AlgebraSpec::new(Variant::TorusRoot, g).is_err());
    }

    #[test]
    fn selection_json() {
        let sel: AlgebraSelection = serde_json::from_str(r#"{"variant": "virasoro-root", "t": 3}"#).unwrap();
        let s = AlgebraSpec::from_selection(&sel).unwrap();
        assert_eq!(s.t(), Some(3));
        assert_eq!(serde_json::to_string(&s.selection()).unwrap(), r#"{"variant":"virasoro-root","t":3}"#);
        let sel: AlgebraSelection =
            serde_json::from_str(r#"{"variant": "virasoro-generic", "q": "3/2"}"#).unwrap();
        let s = AlgebraSpec::from_selection(&sel).unwrap();
        assert_eq!(s.field().q0(), Some(&rat_frac(3, 2)));
    }

    #[test]
    fn window_points() {
        let w = Window::new(2);
        let pts = w.points();
        assert_eq!(pts.len(), 24);
        assert_eq!(w.len(), 24);
        assert!(!pts.contains(&Degree::ZERO));
        assert!(pts.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn center_of_root_virasoro() {
        let s = AlgebraSpec::virasoro_root(3).unwrap();
        let w = Window::new(6);
        for m in w.points().into_iter().filter(|m| m.divisible_by(3)) {
            for n in w.points() {
                assert!(s.bracket(BasisElem::new(Tag::L, m), BasisElem::new(Tag::L, n)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn root_lambda_vanishing_criterion() {
        for t in [3u32, 4, 5] {
            let s = AlgebraSpec::virasoro_root(t).unwrap();
            let w = Window::new(5);
            for m in w.points() {
                for n in w.points() {
                    let vanishes = det2(m, n).rem_euclid(t as i64) == 0;
                    assert_eq!(s.lambda_coeff(m, n).is_zero(), vanishes, "t={t} m={m} n={n}");
                    let both_off = !m.divisible_by(t) && !n.divisible_by(t);
                    if both_off && (m + n).divisible_by(t) {
                        assert!(s.lambda_coeff(m, n).is_zero());
                    }
                }
            }
        }
    }

    struct Corrupted(AlgebraSpec);

    impl StructureConstants for Corrupted {
        fn variant(&self) -> Variant {
            self.0.variant()
        }
        fn bracket_basis(&self, a: BasisElem, b: BasisElem) -> Result<Option<(BasisElem, Scalar)>> {
            let target = a.degree + b.degree;
            if target.is_zero() {
                return Ok(None);
            }
            let c = &self.0.lambda_coeff(a.degree, b.degree) + &Scalar::one();
            Ok(Some((BasisElem::new(Tag::L, target), c)))
        }
    }

    #[test]
    fn jacobi_small_windows() {
        for s in [vg(2), AlgebraSpec::virasoro_root(3).unwrap(), AlgebraSpec::torus_generic(rat(2)).unwrap()] {
            let r = jacobi_check(&s, s.field(), &Window::new(2)).unwrap();
            assert!(r.passed(), "{}", s.variant());
            assert!(r.triples_checked > 0);
        }
    }

    #[test]
    fn jacobi_detects_corruption() {
        let s = vg(2);
        let r = jacobi_check(&Corrupted(s.clone()), s.field(), &Window::new(2)).unwrap();
        assert!(!r.jacobi_violations.is_empty());
        assert!(!r.antisymmetry_violations.is_empty());
    }

    #[test]
    fn lemma41_relations_hold() {
        let s = AlgebraSpec::torus_generic(rat(2)).unwrap();
        let checks = lemma41_relations(&s).unwrap();
        assert_eq!(checks.len(), 12);
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
        assert_eq!(checks[2].rhs, "1/2*X(0,1)");
        assert!(lemma41_relations(&vg(2)).is_err());
    }
}
