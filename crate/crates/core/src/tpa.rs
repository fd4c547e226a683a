//! Commutative products compatible with the bracket.
//!
//! A product `·` is compatible when `2z·[x,y] = [z·x, y] + [x, z·y]` for all
//! `x, y, z`. Fixing `z`, this says left multiplication by `z` is a
//! ½-derivation, which is what [`triviality_probe`] exploits: it solves the
//! ½-derivation systems once per degree and then imposes commutativity.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::par::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, BasisElem, Degree, Element, StructureConstants, Tag, Variant, Window};
use crate::halfderiv::{self, element_terms, Term, UnknownLayout};
use crate::linalg::{self, Matrix, NullspaceBasis, SparseRow};
use crate::scalars::{Scalar, ScalarField};
use crate::{Error, Result};

fn key(a: BasisElem, b: BasisElem) -> (BasisElem, BasisElem) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Symmetric product on the basis of a window. Missing entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTable {
    pub window: Window,
    entries: BTreeMap<(BasisElem, BasisElem), Element>,
}

impl ProductTable {
    pub fn zero(window: Window) -> Self {
        ProductTable { window, entries: BTreeMap::new() }
    }

    /// Tabulates `f` on every unordered pair of `basis`, keeping only terms
    /// whose degree lies in the window.
    pub fn from_fn(window: Window, basis: &[BasisElem], f: impl Fn(BasisElem, BasisElem) -> Element) -> Self {
        let mut t = ProductTable::zero(window);
        for (i, &a) in basis.iter().enumerate() {
            for &b in &basis[i..] {
                let mut e = Element::zero();
                for (bb, c) in f(a, b).terms() {
                    if window.contains(bb.degree) {
                        e.add_term(*bb, c.clone());
                    }
                }
                t.set(a, b, e).expect("terms filtered to the window");
            }
        }
        t
    }

    pub fn set(&mut self, a: BasisElem, b: BasisElem, value: Element) -> Result<()> {
        if let Some((bb, _)) = value.terms().find(|(bb, _)| !self.window.contains(bb.degree)) {
            return Err(Error::Config(format!("product term {bb} lies outside the window")));
        }
        if value.is_zero() {
            self.entries.remove(&key(a, b));
        } else {
            self.entries.insert(key(a, b), value);
        }
        Ok(())
    }

    pub fn get(&self, a: BasisElem, b: BasisElem) -> Element {
        self.entries.get(&key(a, b)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries with `a <= b`.
    pub fn entries(&self) -> impl Iterator<Item = (&(BasisElem, BasisElem), &Element)> {
        self.entries.iter()
    }

    pub fn mul_elements(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                out.add_scaled(&self.get(*a, *b), &(ca * cb));
            }
        }
        out
    }

    pub fn from_entries(field: &ScalarField, window: Window, entries: &[TableEntry]) -> Result<Self> {
        let mut t = ProductTable::zero(window);
        for en in entries {
            let (a, b) = (BasisElem::new(en.a_tag, en.a), BasisElem::new(en.b_tag, en.b));
            if !window.contains(a.degree) || !window.contains(b.degree) {
                return Err(Error::Config(format!("product factor {a} or {b} lies outside the window")));
            }
            let mut e = t.get(a, b);
            for term in &en.terms {
                e.add_term(BasisElem::new(term.tag, term.degree), field.parse(&term.coeff)?);
            }
            t.set(a, b, e)?;
        }
        Ok(t)
    }

    pub fn to_json(&self, field: &ScalarField) -> Vec<TableEntry> {
        self.entries
            .iter()
            .map(|((a, b), e)| TableEntry {
                a: a.degree,
                a_tag: a.tag,
                b: b.degree,
                b_tag: b.tag,
                terms: e
                    .terms()
                    .map(|(bb, c)| TableTerm { degree: bb.degree, tag: bb.tag, coeff: field.format(c) })
                    .collect(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableTerm {
    pub degree: Degree,
    pub tag: Tag,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    pub a: Degree,
    pub a_tag: Tag,
    pub b: Degree,
    pub b_tag: Tag,
    pub terms: Vec<TableTerm>,
}

/// Linear functional supported on central degrees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CenterFunctional {
    pub coeffs: BTreeMap<Degree, Scalar>,
}

impl CenterFunctional {
    pub fn indicator(m: Degree) -> Self {
        CenterFunctional { coeffs: BTreeMap::from([(m, Scalar::one())]) }
    }

    pub fn at(&self, m: Degree) -> Scalar {
        self.coeffs.get(&m).cloned().unwrap_or_else(Scalar::zero)
    }
}

fn root_t(spec: &AlgebraSpec) -> Result<u32> {
    match (spec.variant(), spec.t()) {
        (Variant::VirasoroRoot, Some(t)) => Ok(t),
        (v, _) => Err(Error::UnsupportedVariant(format!("requires virasoro-root, got {v}"))),
    }
}

fn central(t: u32, m: Degree) -> bool {
    !m.is_zero() && m.divisible_by(t)
}

/// `L_a · L_b = τ(a) τ(b) L_v`.
pub fn rank_one_center_product(spec: &AlgebraSpec, w: &Window, tau: &CenterFunctional, v: Degree) -> Result<ProductTable> {
    let t = root_t(spec)?;
    if !central(t, v) {
        return Err(Error::InvalidCenterVector(v));
    }
    if let Some(m) = tau.coeffs.keys().find(|m| !central(t, **m) || !w.contains(**m)) {
        return Err(Error::InvalidCenterVector(*m));
    }
    let mut table = ProductTable::zero(*w);
    for (&a, ta) in &tau.coeffs {
        for (&b, tb) in tau.coeffs.range(a..) {
            table.set(BasisElem::l(a.m1, a.m2), BasisElem::l(b.m1, b.m2), Element::term(BasisElem::l(v.m1, v.m2), ta * tb))?;
        }
    }
    Ok(table)
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleViolation {
    pub x: String,
    pub y: String,
    pub z: String,
    pub residual: Vec<Term>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub commutativity_ok: bool,
    /// Triples with every intermediate degree inside the window.
    pub associativity_triples: usize,
    pub compatibility_triples: usize,
    /// Triples where a residual could be nonzero; the rest vanish identically.
    pub triples_evaluated: usize,
    pub associativity_violations: Vec<TripleViolation>,
    pub compatibility_violations: Vec<TripleViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.commutativity_ok && self.associativity_violations.is_empty() && self.compatibility_violations.is_empty()
    }
}

fn by_degree(basis: &[BasisElem]) -> HashMap<Degree, Vec<BasisElem>> {
    let mut m: HashMap<Degree, Vec<BasisElem>> = HashMap::new();
    for b in basis {
        m.entry(b.degree).or_default().push(*b);
    }
    m
}

/// `(a·b)·c - a·(b·c)`.
pub fn associator(p: &ProductTable, a: BasisElem, b: BasisElem, c: BasisElem) -> Element {
    let (ea, ec) = (Element::basis(a), Element::basis(c));
    &p.mul_elements(&p.get(a, b), &ec) - &p.mul_elements(&ea, &p.get(b, c))
}

/// `2z·[x,y] - [z·x, y] - [x, z·y]`.
pub fn compatibility_residual(spec: &AlgebraSpec, p: &ProductTable, z: BasisElem, x: BasisElem, y: BasisElem) -> Result<Element> {
    let ez = Element::basis(z);
    let lhs = p.mul_elements(&ez, &spec.bracket(x, y)?);
    let r1 = spec.bracket_elements(&p.get(z, x), &Element::basis(y))?;
    let r2 = spec.bracket_elements(&Element::basis(x), &p.get(z, y))?;
    Ok(&(&(&lhs + &lhs) - &r1) - &r2)
}

/// Checks associativity and compatibility on every window triple.
pub fn verify_axioms(spec: &AlgebraSpec, w: &Window, p: &ProductTable) -> Result<AxiomReport> {
    let basis = spec.basis(w);
    let groups = by_degree(&basis);
    let nb = basis.len();
    let mut ordered: Vec<(BasisElem, BasisElem, &Element)> = Vec::new();
    for ((a, b), e) in p.entries() {
        ordered.push((*a, *b, e));
        if a != b {
            ordered.push((*b, *a, e));
        }
    }

    let mut assoc: BTreeSet<(BasisElem, BasisElem, BasisElem)> = BTreeSet::new();
    for &(a, b, _) in &ordered {
        for &c in &basis {
            assoc.insert((a, b, c));
            assoc.insert((c, a, b));
        }
    }

    let mut compat: BTreeSet<(BasisElem, BasisElem, BasisElem)> = BTreeSet::new();
    for &(z, u, _) in &ordered {
        for &o in &basis {
            if w.contains_or_zero(u.degree + o.degree) {
                compat.insert((z, u, o));
                compat.insert((z, o, u));
            }
            let rest = u.degree - o.degree;
            if w.contains(rest) {
                for &y in &groups[&rest] {
                    compat.insert((z, o, y));
                }
            }
        }
    }

    let compat_total = {
        let pts = w.points();
        let tags = spec.variant().tags().len();
        let mut pairs = 0usize;
        for &m in &pts {
            for &n in &pts {
                if w.contains_or_zero(m + n) {
                    pairs += 1;
                }
            }
        }
        pairs * tags * tags * nb
    };

    let field = spec.field();
    let violation = |x: BasisElem, y: BasisElem, z: BasisElem, r: &Element| TripleViolation {
        x: x.to_string(),
        y: y.to_string(),
        z: z.to_string(),
        residual: element_terms(field, r),
    };
    let assoc_list: Vec<_> = assoc.iter().copied().collect();
    let associativity_violations: Vec<TripleViolation> = assoc_list
        .par_iter()
        .filter_map(|&(a, b, c)| {
            let r = associator(p, a, b, c);
            (!r.is_zero()).then(|| violation(a, b, c, &r))
        })
        .collect();
    let compat_list: Vec<_> = compat.iter().copied().collect();
    let compatibility_violations: Vec<Option<TripleViolation>> = compat_list
        .par_iter()
        .map(|&(z, x, y)| {
            let r = compatibility_residual(spec, p, z, x, y)?;
            Ok((!r.is_zero()).then(|| violation(x, y, z, &r)))
        })
        .collect::<Result<_>>()?;

    Ok(AxiomReport {
        commutativity_ok: true,
        associativity_triples: nb * nb * nb,
        compatibility_triples: compat_total,
        triples_evaluated: assoc.len() + compat.len(),
        associativity_violations,
        compatibility_violations: compatibility_violations.into_iter().flatten().collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionViolation {
    pub condition: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThmGReport {
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub vanishing_ok: bool,
    pub gamma2_ok: bool,
    pub gamma1_ok: bool,
    pub violations: Vec<ConditionViolation>,
}

impl ThmGReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the shape a compatible product on the root-of-unity Virasoro-like
/// algebra is claimed to have:
///
/// * (a) `L_m · L_n = 0` whenever `m - n` is not in `(tZ)^2`;
/// * (b) for non-central `m, n` the product is `Σ α^i_m L_{n+i}` over central
///   `i`, with `α^i_m` independent of `n`;
/// * (c) for central `m, n` the product is `Σ α^i_{m,n} L_{n+i}` over central
///   `i`, and for central `m, n, r` not all equal the sums
///   `Σ_i α^i_{m,n} α^j_{n+i,r}` and `Σ_i α^i_{n,r} α^j_{r+i,m}` vanish for
///   central `j ∉ {-m, -r}`.
///
/// Sums are only formed where every coefficient involved lies in the window.
pub fn thm_g_check(spec: &AlgebraSpec, p: &ProductTable) -> Result<ThmGReport> {
    let t = root_t(spec)?;
    let w = p.window;
    let pts = w.points();
    let field = spec.field();
    let mut violations = Vec::new();
    let l = |m: Degree| BasisElem::l(m.m1, m.m2);
    let mut pairs_checked = 0;

    // (a) and the shape parts of (b), (c)
    for &m in &pts {
        for &n in &pts {
            pairs_checked += 1;
            let e = p.get(l(m), l(n));
            if e.is_zero() {
                continue;
            }
            if !(m - n).divisible_by(t) {
                violations.push(ConditionViolation {
                    condition: "a",
                    detail: format!("L{m}·L{n} = {} with difference outside the central lattice", show(field, &e)),
                });
                continue;
            }
            let cond = if central(t, m) { "c" } else { "b" };
            for (b, _) in e.terms() {
                let i = b.degree - n;
                if !central(t, i) {
                    violations.push(ConditionViolation {
                        condition: cond,
                        detail: format!("L{m}·L{n} has a term at {} that is not n plus a central degree", b.degree),
                    });
                }
            }
        }
    }

    // (b): α^i_m must not depend on n
    for &m in pts.iter().filter(|m| !central(t, **m)) {
        let partners: Vec<Degree> = pts.iter().copied().filter(|n| !central(t, *n) && central(t, m - *n)).collect();
        for (k, &n1) in partners.iter().enumerate() {
            for &n2 in &partners[k + 1..] {
                let e1 = p.get(l(m), l(n1));
                let e2 = p.get(l(m), l(n2));
                for i in pts.iter().copied().filter(|i| central(t, *i)) {
                    let (d1, d2) = (n1 + i, n2 + i);
                    if !w.contains(d1) || !w.contains(d2) {
                        continue;
                    }
                    let (c1, c2) = (e1.coeff(&l(d1)), e2.coeff(&l(d2)));
                    if c1 != c2 {
                        violations.push(ConditionViolation {
                            condition: "b",
                            detail: format!(
                                "coefficient of shift {i} in L{m}·L{n1} is {} but in L{m}·L{n2} is {}",
                                field.format(&c1),
                                field.format(&c2)
                            ),
                        });
                    }
                }
            }
        }
    }

    // (c): quadratic sums over central triples
    let cen: Vec<Degree> = pts.iter().copied().filter(|m| central(t, *m)).collect();
    let alpha = |i: Degree, m: Degree, n: Degree| -> Option<Scalar> {
        let target = n + i;
        (w.contains(target)).then(|| p.get(l(m), l(n)).coeff(&l(target)))
    };
    // shifts that can carry a nonzero coefficient in the window
    let shifts: Vec<Degree> = {
        let b = 2 * w.n as i64;
        (-b..=b)
            .flat_map(|x| (-b..=b).map(move |y| Degree::new(x, y)))
            .filter(|i| central(t, *i))
            .collect()
    };
    let quad = |m: Degree, n: Degree, r: Degree, j: Degree| -> Option<Scalar> {
        let mut acc = Scalar::zero();
        for &i in &shifts {
            let Some(a1) = alpha(i, m, n) else { continue };
            if a1.is_zero() {
                continue;
            }
            let u = n + i;
            if !w.contains(u) {
                return None;
            }
            let a2 = alpha(j, u, r)?;
            acc = acc + &a1 * &a2;
        }
        Some(acc)
    };
    let mut triples_checked = 0;
    for &m in &cen {
        for &n in &cen {
            for &r in &cen {
                if m == n && n == r {
                    continue;
                }
                triples_checked += 1;
                for &j in &shifts {
                    if j == -m || j == -r {
                        continue;
                    }
                    for (label, s) in [("first", quad(m, n, r, j)), ("second", quad(n, r, m, j))] {
                        if let Some(s) = s.filter(|s| !s.is_zero()) {
                            violations.push(ConditionViolation {
                                condition: "c",
                                detail: format!(
                                    "{label} sum for m={m}, n={n}, r={r}, j={j} is {}",
                                    field.format(&s)
                                ),
                            });
                        }
                    }
                }
            }
        }
    }

    let has = |c: &str| violations.iter().any(|v| v.condition == c);
    Ok(ThmGReport {
        pairs_checked,
        triples_checked,
        vanishing_ok: !has("a"),
        gamma2_ok: !has("b"),
        gamma1_ok: !has("c"),
        violations,
    })
}

fn show(field: &ScalarField, e: &Element) -> String {
    let parts: Vec<String> = e.terms().map(|(b, c)| format!("{}*{b}", field.format(c))).collect();
    parts.join(" + ")
}

/// Default product-shift bound: `t` for root variants, 2 otherwise.
pub fn default_shift_bound(spec: &AlgebraSpec) -> u32 {
    spec.t().unwrap_or(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeShift {
    pub full: usize,
    pub interior: usize,
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub full_dim: usize,
    pub interior_dim: usize,
    pub shift_bound: u32,
    /// Shifts with a nonzero solution space.
    pub per_shift: BTreeMap<Degree, ProbeShift>,
    pub basis: Vec<ProductTable>,
    /// Indices of basis products that fail associativity.
    pub non_associative: Vec<usize>,
    /// Indices of basis products with a nonzero entry on two non-central
    /// factors (root variants only).
    pub gamma2_entries: Vec<usize>,
}

struct Stage1 {
    layout: UnknownLayout,
    kernel: Vec<Vec<Scalar>>,
}

/// Solves for every symmetric product on `w` satisfying the compatibility
/// identity on all window triples, one product shift at a time.
///
/// An entry `a·b` may only have terms of degree `a + b + s` with `|s1|, |s2|`
/// at most `shift_bound`, inside the window. Associativity is then checked on
/// each basis product separately.
pub fn triviality_probe(spec: &AlgebraSpec, w: &Window, m: u32, shift_bound: u32) -> Result<ProbeResult> {
    if m >= w.n {
        return Err(Error::InvalidInterior { interior: m, window: w.n });
    }
    let pts = w.points();
    let s_list = halfderiv::shifts(shift_bound);

    let mut needed: BTreeSet<Degree> = BTreeSet::new();
    for &z in &pts {
        for &s in &s_list {
            needed.insert(z + s);
        }
    }
    let needed: Vec<Degree> = needed.into_iter().collect();
    let stage1: Vec<(Degree, Stage1)> = needed
        .par_iter()
        .map(|&i| {
            let sys = halfderiv::build_constraints_in(spec, w, i, Some(*w))?;
            let k = halfderiv::nullspace(&sys);
            let kernel = (0..k.dim()).map(|j| k.dense(j)).collect();
            Ok((i, Stage1 { layout: sys.layout, kernel }))
        })
        .collect::<Result<_>>()?;
    let stage1: HashMap<Degree, Stage1> = stage1.into_iter().collect();

    let per: Vec<(Degree, usize, usize, Vec<ProductTable>)> = s_list
        .par_iter()
        .map(|&s| {
            let (full, interior, tables) = probe_shift(spec, w, m, s, &stage1)?;
            Ok((s, full, interior, tables))
        })
        .collect::<Result<_>>()?;

    let mut per_shift = BTreeMap::new();
    let mut basis = Vec::new();
    let (mut full_dim, mut interior_dim) = (0, 0);
    for (s, full, interior, tables) in per {
        full_dim += full;
        interior_dim += interior;
        if full > 0 {
            per_shift.insert(s, ProbeShift { full, interior });
        }
        basis.extend(tables);
    }

    let non_associative: Vec<usize> = basis
        .par_iter()
        .enumerate()
        .filter_map(|(k, p)| (!associative(spec, w, p)).then_some(k))
        .collect();
    let gamma2_entries = match spec.t() {
        Some(t) => basis
            .iter()
            .enumerate()
            .filter(|(_, p)| p.entries().any(|((a, b), _)| !a.degree.divisible_by(t) && !b.degree.divisible_by(t)))
            .map(|(k, _)| k)
            .collect(),
        None => Vec::new(),
    };

    Ok(ProbeResult { full_dim, interior_dim, shift_bound, per_shift, basis, non_associative, gamma2_entries })
}

fn associative(spec: &AlgebraSpec, w: &Window, p: &ProductTable) -> bool {
    let basis = spec.basis(w);
    p.entries().all(|((a, b), _)| {
        basis.iter().all(|&c| {
            associator(p, *a, *b, c).is_zero()
                && associator(p, *b, *a, c).is_zero()
                && associator(p, c, *a, *b).is_zero()
                && associator(p, c, *b, *a).is_zero()
        })
    })
}

/// Products of a single shift `s`: returns (dimension, interior dimension, basis).
fn probe_shift(
    spec: &AlgebraSpec,
    w: &Window,
    m: u32,
    s: Degree,
    stage1: &HashMap<Degree, Stage1>,
) -> Result<(usize, usize, Vec<ProductTable>)> {
    let basis = spec.basis(w);
    let tags = spec.variant().tags();

    // columns: (z, k) for each kernel vector k of the map x ↦ z·x
    let mut offset: HashMap<BasisElem, usize> = HashMap::new();
    let mut ncols = 0;
    for &z in &basis {
        let st = &stage1[&(z.degree + s)];
        if !st.kernel.is_empty() {
            offset.insert(z, ncols);
            ncols += st.kernel.len();
        }
    }
    if ncols == 0 {
        return Ok((0, 0, Vec::new()));
    }

    // coefficient of tag T in z·x as a combination of the (z, k) columns
    let entry = |z: BasisElem, x: BasisElem, tag: Tag| -> Vec<(usize, Scalar)> {
        let Some(&off) = offset.get(&z) else { return Vec::new() };
        let st = &stage1[&(z.degree + s)];
        let src = BasisElem::new(x.tag, x.degree);
        let Some(col) = st.layout.column(src, tag) else { return Vec::new() };
        st.kernel
            .iter()
            .enumerate()
            .filter(|(_, v)| !v[col].is_zero())
            .map(|(k, v)| (off + k, v[col].clone()))
            .collect()
    };

    let mut matrix = Matrix::new(ncols);
    for (i, &z) in basis.iter().enumerate() {
        for &x in &basis[i + 1..] {
            let target = z.degree + x.degree + s;
            if !w.contains(target) {
                continue;
            }
            for &tag in tags {
                let left = entry(z, x, tag);
                let right = entry(x, z, tag);
                if left.is_empty() && right.is_empty() {
                    continue;
                }
                matrix.push_row(left.into_iter().chain(right.into_iter().map(|(c, v)| (c, -v))));
            }
        }
    }
    let kernel: NullspaceBasis = linalg::nullspace(spec.field(), &matrix);

    let mut tables = Vec::with_capacity(kernel.dim());
    let inner = Window::new(m);
    let mut entry_index: HashMap<(BasisElem, BasisElem, Tag), usize> = HashMap::new();
    let mut restricted: Vec<SparseRow> = Vec::new();
    for v in &kernel.vectors {
        let dense = linalg::to_dense(v, ncols);
        let mut table = ProductTable::zero(*w);
        let mut rv: Vec<(usize, Scalar)> = Vec::new();
        for (i, &z) in basis.iter().enumerate() {
            for &x in &basis[i..] {
                let target = z.degree + x.degree + s;
                if !w.contains(target) {
                    continue;
                }
                let mut e = Element::zero();
                for &tag in tags {
                    let c = entry(z, x, tag)
                        .into_iter()
                        .fold(Scalar::zero(), |acc, (col, coef)| acc + &coef * &dense[col]);
                    if c.is_zero() {
                        continue;
                    }
                    if inner.contains(z.degree) && inner.contains(x.degree) {
                        let n = entry_index.len();
                        let idx = *entry_index.entry((z, x, tag)).or_insert(n);
                        rv.push((idx, c.clone()));
                    }
                    e.add_term(BasisElem::new(tag, target), c);
                }
                table.set(z, x, e)?;
            }
        }
        restricted.push(rv);
        tables.push(table);
    }
    let interior = linalg::rank(&restricted, entry_index.len());
    Ok((kernel.dim(), interior, tables))
}
