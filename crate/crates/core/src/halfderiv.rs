//! Windowed ½-derivation systems.
//!
//! A degree-`i` map sends each basis vector of degree `m` to a combination of
//! basis vectors of degree `m + i`. The unknowns are those coefficients for
//! sources in the window; the equations are the graded components of
//! `2φ([a, b]) - [φ(a), b] - [a, φ(b)]` for every admissible pair.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::par::*;
use serde::Serialize;

use crate::algebra::{AlgebraSpec, BasisElem, Degree, Element, StructureConstants, Tag, Variant, Window};
use crate::linalg::{self, Matrix, NullspaceBasis, SparseRow};
use crate::scalars::{Scalar, ScalarField};
use crate::{Error, Result};

/// Column layout: one unknown per (source, target tag), sorted by
/// `(m1, m2, source tag, target tag)`.
#[derive(Clone, Debug)]
pub struct UnknownLayout {
    pub variant: Variant,
    pub window: Window,
    pub shift: Degree,
    pub entries: Vec<(BasisElem, Tag)>,
    index: HashMap<(BasisElem, Tag), usize>,
}

impl UnknownLayout {
    /// Unknowns for every source in `window`. Targets at degree zero are
    /// omitted, and so are targets outside `targets` when it is given.
    pub fn new(variant: Variant, window: Window, shift: Degree, targets: Option<Window>) -> Self {
        let tags = variant.tags();
        let mut entries = Vec::new();
        for m in window.points() {
            let target = m + shift;
            if target.is_zero() || targets.is_some_and(|w| !w.contains(target)) {
                continue;
            }
            for &src in tags {
                for &dst in tags {
                    entries.push((BasisElem::new(src, m), dst));
                }
            }
        }
        let index = entries.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        UnknownLayout { variant, window, shift, entries, index }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_source(&self, d: Degree) -> bool {
        let tag = self.variant.tags()[0];
        self.index.contains_key(&(BasisElem::new(tag, d), tag))
    }

    pub fn column(&self, source: BasisElem, target: Tag) -> Option<usize> {
        self.index.get(&(source, target)).copied()
    }

    /// The map encoded by a coefficient vector, applied to a basis vector.
    pub fn apply(&self, v: &[Scalar], e: BasisElem) -> Element {
        let mut out = Element::zero();
        for &dst in self.variant.tags() {
            if let Some(c) = self.column(e, dst) {
                out.add_term(BasisElem::new(dst, e.degree + self.shift), v[c].clone());
            }
        }
        out
    }

    /// Coefficients of a closed-form map in this layout.
    pub fn coefficients_of(&self, map: &ClosedFormMap) -> Vec<Scalar> {
        self.entries
            .iter()
            .map(|(src, dst)| map.apply(*src).coeff(&BasisElem::new(*dst, src.degree + self.shift)))
            .collect()
    }

    /// Short label such as `a(1,0)` or `alpha(1,0)`.
    pub fn label(&self, col: usize) -> String {
        let (src, dst) = self.entries[col];
        let name = match (src.tag, dst) {
            (Tag::L, _) => "alpha",
            (Tag::X, Tag::X) => "a",
            (Tag::X, _) => "b",
            (_, Tag::X) => "c",
            _ => "d",
        };
        format!("{name}{}", src.degree)
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub spec: AlgebraSpec,
    pub window: Window,
    pub shift: Degree,
    pub layout: UnknownLayout,
    pub matrix: Matrix,
    /// Number of admissible basis pairs that generated rows.
    pub pairs: usize,
}

impl ConstraintSystem {
    pub fn is_satisfied_by(&self, v: &[Scalar]) -> bool {
        self.matrix.rows.iter().all(|r| linalg::dot(r, v).is_zero())
    }
}

/// Admissible pairs of distinct basis vectors `(a, b)` with `a < b`, ordered
/// so that pairs close to the origin come first.
pub fn admissible_pairs(variant: Variant, w: &Window) -> Vec<(BasisElem, BasisElem)> {
    let pts = w.points();
    let tags = variant.tags();
    let mut degree_pairs: Vec<(i64, Degree, Degree)> = Vec::new();
    for (k, &m) in pts.iter().enumerate() {
        for &n in &pts[k..] {
            if w.contains_or_zero(m + n) {
                let r = m.radius().max(n.radius()).max((m + n).radius());
                degree_pairs.push((r, m, n));
            }
        }
    }
    degree_pairs.sort();
    let mut out = Vec::new();
    for (_, m, n) in degree_pairs {
        for &ta in tags {
            for &tb in tags {
                if m == n && ta >= tb {
                    continue;
                }
                out.push((BasisElem::new(ta, m), BasisElem::new(tb, n)));
            }
        }
    }
    out
}

fn pair_rows(spec: &AlgebraSpec, layout: &UnknownLayout, a: BasisElem, b: BasisElem) -> Result<Vec<SparseRow>> {
    let tags = spec.variant().tags();
    let i = layout.shift;
    let mut acc: BTreeMap<BasisElem, Vec<(usize, Scalar)>> = BTreeMap::new();
    if let Some((c, k)) = spec.bracket_basis(a, b)? {
        let two_k = &k + &k;
        for &dst in tags {
            if let Some(col) = layout.column(c, dst) {
                acc.entry(BasisElem::new(dst, c.degree + i)).or_default().push((col, two_k.clone()));
            }
        }
    }
    for &dst in tags {
        if let Some(col) = layout.column(a, dst) {
            if let Some((e, k)) = spec.bracket_basis(BasisElem::new(dst, a.degree + i), b)? {
                acc.entry(e).or_default().push((col, -k));
            }
        }
        if let Some(col) = layout.column(b, dst) {
            if let Some((e, k)) = spec.bracket_basis(a, BasisElem::new(dst, b.degree + i))? {
                acc.entry(e).or_default().push((col, -k));
            }
        }
    }
    Ok(acc
        .into_values()
        .map(linalg::normalize_row)
        .filter(|r| !r.is_empty())
        .collect())
}

/// Constraint rows for the degree-`i` system on `w`.
pub fn build_constraints(spec: &AlgebraSpec, w: &Window, i: Degree) -> Result<ConstraintSystem> {
    build_constraints_in(spec, w, i, None)
}

/// Same as [`build_constraints`], but unknowns whose target leaves `targets`
/// are fixed to zero.
pub fn build_constraints_in(
    spec: &AlgebraSpec,
    w: &Window,
    i: Degree,
    targets: Option<Window>,
) -> Result<ConstraintSystem> {
    let layout = UnknownLayout::new(spec.variant(), *w, i, targets);
    let mut pairs = admissible_pairs(spec.variant(), w);
    if targets.is_some() {
        pairs.retain(|(a, b)| {
            layout.has_source(a.degree) || layout.has_source(b.degree) || layout.has_source(a.degree + b.degree)
        });
    }
    let blocks: Vec<Vec<SparseRow>> = pairs
        .par_iter()
        .map(|&(a, b)| pair_rows(spec, &layout, a, b))
        .collect::<Result<_>>()?;
    let mut matrix = Matrix::new(layout.len());
    matrix.rows = blocks.into_iter().flatten().collect();
    Ok(ConstraintSystem { spec: spec.clone(), window: *w, shift: i, layout, matrix, pairs: pairs.len() })
}

pub fn nullspace(sys: &ConstraintSystem) -> NullspaceBasis {
    linalg::nullspace(sys.spec.field(), &sys.matrix)
}

/// Rank of the kernel restricted to unknowns with source in `|m1|, |m2| <= m`.
pub fn interior_dimension(basis: &NullspaceBasis, layout: &UnknownLayout, m: u32) -> Result<usize> {
    if m >= layout.window.n {
        return Err(Error::InvalidInterior { interior: m, window: layout.window.n });
    }
    let keep: Vec<bool> = layout.entries.iter().map(|(src, _)| src.degree.radius() <= m as i64).collect();
    let restricted: Vec<SparseRow> = basis
        .vectors
        .iter()
        .map(|v| v.iter().filter(|(c, _)| keep[*c]).cloned().collect())
        .collect();
    Ok(linalg::rank(&restricted, basis.ncols))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftDims {
    pub full: usize,
    pub interior: usize,
}

/// Kernel and interior dimensions for one shift.
pub fn solve_shift(spec: &AlgebraSpec, w: &Window, i: Degree, m: u32) -> Result<(ShiftDims, NullspaceBasis, ConstraintSystem)> {
    if m >= w.n {
        return Err(Error::InvalidInterior { interior: m, window: w.n });
    }
    let sys = build_constraints(spec, w, i)?;
    let basis = nullspace(&sys);
    let interior = interior_dimension(&basis, &sys.layout, m)?;
    Ok((ShiftDims { full: basis.dim(), interior }, basis, sys))
}

/// Every shift with `|i1|, |i2| <= bound`.
pub fn shifts(bound: u32) -> Vec<Degree> {
    let b = bound as i64;
    (-b..=b).flat_map(|x| (-b..=b).map(move |y| Degree::new(x, y))).collect()
}

pub fn shift_sweep(spec: &AlgebraSpec, w: &Window, bound: u32, m: u32) -> Result<BTreeMap<Degree, ShiftDims>> {
    sweep(spec, w, &shifts(bound), m)
}

/// Dimensions for an explicit list of shifts, solved in parallel.
pub fn sweep(spec: &AlgebraSpec, w: &Window, list: &[Degree], m: u32) -> Result<BTreeMap<Degree, ShiftDims>> {
    if m >= w.n {
        return Err(Error::InvalidInterior { interior: m, window: w.n });
    }
    list.par_iter()
        .map(|&i| solve_shift(spec, w, i, m).map(|(d, _, _)| (i, d)))
        .collect()
}

/// A map given by a formula on basis vectors.
#[derive(Clone)]
pub struct ClosedFormMap {
    pub name: String,
    pub shift: Degree,
    f: Arc<dyn Fn(BasisElem) -> Element + Send + Sync>,
}

impl std::fmt::Debug for ClosedFormMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClosedFormMap({}, shift {})", self.name, self.shift)
    }
}

impl ClosedFormMap {
    pub fn new(name: impl Into<String>, shift: Degree, f: impl Fn(BasisElem) -> Element + Send + Sync + 'static) -> Self {
        ClosedFormMap { name: name.into(), shift, f: Arc::new(f) }
    }

    pub fn apply(&self, e: BasisElem) -> Element {
        (self.f)(e)
    }

    pub fn apply_element(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (b, c) in x.terms() {
            out.add_scaled(&self.apply(*b), c);
        }
        out
    }

    /// `c·φ`.
    pub fn scaled(&self, c: Scalar) -> ClosedFormMap {
        let f = self.f.clone();
        ClosedFormMap::new(format!("{}-scaled", self.name), self.shift, move |e| f(e).scaled(&c))
    }
}

/// Per-degree coefficients: a default value with finitely many overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeFunction {
    pub default: Scalar,
    pub overrides: BTreeMap<Degree, Scalar>,
}

impl DegreeFunction {
    pub fn constant(c: Scalar) -> Self {
        DegreeFunction { default: c, overrides: BTreeMap::new() }
    }

    pub fn at(&self, m: Degree) -> Scalar {
        self.overrides.get(&m).cloned().unwrap_or_else(|| self.default.clone())
    }
}

pub fn identity() -> ClosedFormMap {
    ClosedFormMap::new("identity", Degree::ZERO, Element::basis)
}

/// `L_m ↦ κ L_{m+i}` on the non-central degrees and `center(m) L_{m+i}` on
/// the central ones, for a shift `i` in `(tZ)^2`.
pub fn thm_f_family(t: u32, i: Degree, kappa: Scalar, center: DegreeFunction) -> Result<ClosedFormMap> {
    if !i.divisible_by(t) {
        return Err(Error::InvalidShift(i));
    }
    if let Some(m) = center.overrides.keys().find(|m| !m.divisible_by(t) || m.is_zero()) {
        return Err(Error::Config(format!("center coefficient given at non-central degree {m}")));
    }
    Ok(ClosedFormMap::new("thmF", i, move |e| {
        let m = e.degree;
        let c = if m.divisible_by(t) { center.at(m) } else { kappa.clone() };
        Element::term(BasisElem::l(m.m1 + i.m1, m.m2 + i.m2), c)
    }))
}

/// `x^m ↦ a x^m`, `D(m) ↦ c x^m + a D(m)` on central degrees and `a D(m)`
/// elsewhere.
pub fn thm_h_family(t: u32, a: Scalar, c: Scalar) -> ClosedFormMap {
    ClosedFormMap::new("thmH", Degree::ZERO, move |e| {
        let m = e.degree;
        let mut out = Element::term(e, a.clone());
        if e.tag == Tag::D && m.divisible_by(t) {
            out.add_term(BasisElem::new(Tag::X, m), c.clone());
        }
        out
    })
}

/// `x^m ↦ (c + d) x^m`, `D(m) ↦ c x^m + d D(m)`.
pub fn torus_generic_family(c: Scalar, d: Scalar) -> ClosedFormMap {
    ClosedFormMap::new("torus-generic", Degree::ZERO, move |e| {
        let m = e.degree;
        match e.tag {
            Tag::X => Element::term(e, &c + &d),
            _ => {
                let mut out = Element::term(e, d.clone());
                out.add_term(BasisElem::new(Tag::X, m), c.clone());
                out
            }
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Term {
    pub basis: String,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateViolation {
    pub a: String,
    pub b: String,
    pub residual: Vec<Term>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub constraints_checked: usize,
    pub violations: Vec<CandidateViolation>,
}

impl CandidateReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn element_terms(field: &ScalarField, x: &Element) -> Vec<Term> {
    x.terms().map(|(b, c)| Term { basis: b.to_string(), coeff: field.format(c) }).collect()
}

/// `2φ([a, b]) - [φ(a), b] - [a, φ(b)]`.
pub fn half_residual(spec: &AlgebraSpec, phi: &ClosedFormMap, a: BasisElem, b: BasisElem) -> Result<Element> {
    let lhs = phi.apply_element(&spec.bracket(a, b)?);
    let left = spec.bracket_elements(&phi.apply(a), &Element::basis(b))?;
    let right = spec.bracket_elements(&Element::basis(a), &phi.apply(b))?;
    Ok(&(&(&lhs + &lhs) - &left) - &right)
}

/// Evaluates every windowed constraint against `phi`.
pub fn verify_candidate(spec: &AlgebraSpec, w: &Window, phi: &ClosedFormMap) -> Result<CandidateReport> {
    let pairs = admissible_pairs(spec.variant(), w);
    let residuals: Vec<Option<CandidateViolation>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let r = half_residual(spec, phi, a, b)?;
            Ok((!r.is_zero()).then(|| CandidateViolation {
                a: a.to_string(),
                b: b.to_string(),
                residual: element_terms(spec.field(), &r),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(CandidateReport { constraints_checked: pairs.len(), violations: residuals.into_iter().flatten().collect() })
}
