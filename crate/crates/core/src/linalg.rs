//! Exact sparse kernels.
//!
//! [`nullspace`] runs an incremental reduced elimination modulo a word-sized
//! prime to pick a maximal independent set of rows, eliminates those rows
//! exactly, and then substitutes every kernel vector back into every row.
//! Rows that fail the substitution (possible only for an unlucky prime) are
//! added to the exact pass and the loop repeats, so the result is always the
//! exact kernel of the full system.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::scalars::{Rational, Scalar, ScalarField};

/// Sparse vector sorted by column, without zero entries.
pub type SparseRow = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, Default)]
pub struct Matrix {
    pub ncols: usize,
    pub rows: Vec<SparseRow>,
}

impl Matrix {
    pub fn new(ncols: usize) -> Self {
        Matrix { ncols, rows: Vec::new() }
    }

    /// Adds a row given as unsorted `(column, coefficient)` pairs; repeated
    /// columns are summed and zero rows dropped.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, Scalar)>) {
        let row = normalize_row(entries);
        if !row.is_empty() {
            self.rows.push(row);
        }
    }
}

pub fn normalize_row(entries: impl IntoIterator<Item = (usize, Scalar)>) -> SparseRow {
    let mut v: Vec<(usize, Scalar)> = entries.into_iter().collect();
    v.sort_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(v.len());
    for (c, x) in v {
        match out.last_mut() {
            Some((lc, lx)) if *lc == c => *lx = &*lx + &x,
            _ => out.push((c, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

pub fn dot(row: &[(usize, Scalar)], v: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (c, x) in row {
        if !v[*c].is_zero() {
            acc = acc + x * &v[*c];
        }
    }
    acc
}

/// Kernel basis in reduced echelon form (leading coefficient 1 on the
/// smallest column of each vector, which is zero in all other vectors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullspaceBasis {
    pub ncols: usize,
    pub vectors: Vec<SparseRow>,
}

impl NullspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn dense(&self, i: usize) -> Vec<Scalar> {
        to_dense(&self.vectors[i], self.ncols)
    }
}

pub fn to_dense(v: &[(usize, Scalar)], ncols: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); ncols];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

trait Arith {
    type E: Clone;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
}

struct Exact;

impl Arith for Exact {
    type E = Scalar;
    fn zero(&self) -> Scalar {
        Scalar::zero()
    }
    fn one(&self) -> Scalar {
        Scalar::one()
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }
    fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a - b
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }
    fn inv(&self, a: &Scalar) -> Scalar {
        a.inv().expect("pivot is nonzero")
    }
}

#[derive(Clone, Copy, Debug)]
struct ModP {
    p: u64,
}

impl ModP {
    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    fn reduce_int(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().unwrap()
    }

    fn reduce_rational(&self, r: &Rational) -> Option<u64> {
        let d = self.reduce_int(r.denom());
        if d == 0 {
            return None;
        }
        Some(self.mul(&self.reduce_int(r.numer()), &self.inv(&d)))
    }
}

impl Arith for ModP {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        self.pow(*a, self.p - 2)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let m = ModP { p: n };
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = m.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = m.mul(&x, &x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime together with the image of the field generator.
#[derive(Clone, Copy, Debug)]
struct PrimeImage {
    arith: ModP,
    /// Image of `ζ_t` (unused in the generic field).
    omega: u64,
}

impl PrimeImage {
    /// The `index`-th prime below `2^61` suitable for `field`, descending.
    fn nth(field: &ScalarField, index: usize) -> PrimeImage {
        let t = field.t().unwrap_or(1) as u64;
        let mut k = ((1u64 << 61) - 1) / t;
        let mut found = 0;
        loop {
            let p = k * t + 1;
            k -= 1;
            if !is_prime_u64(p) {
                continue;
            }
            if found < index {
                found += 1;
                continue;
            }
            let arith = ModP { p };
            let omega = if t == 1 { 1 } else { element_of_order(arith, t) };
            return PrimeImage { arith, omega };
        }
    }

    fn image(&self, field: &ScalarField, s: &Scalar) -> Option<u64> {
        match s {
            Scalar::Rat(r) => self.arith.reduce_rational(r),
            Scalar::Cyc(_) => {
                let a = &self.arith;
                let mut acc = 0u64;
                let mut w = 1u64;
                for c in field.coefficients(s) {
                    acc = a.add(&acc, &a.mul(&a.reduce_rational(&c)?, &w));
                    w = a.mul(&w, &self.omega);
                }
                Some(acc)
            }
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn element_of_order(a: ModP, t: u64) -> u64 {
    let factors = prime_factors(t);
    (2..)
        .map(|g| a.pow(g, (a.p - 1) / t))
        .find(|&w| factors.iter().all(|&r| a.pow(w, t / r) != 1))
        .unwrap()
}

/// Incremental reduced elimination: every pivot column occurs in exactly one
/// stored row, where its coefficient is 1.
struct Echelon<A: Arith> {
    arith: A,
    ncols: usize,
    pivot_row: Vec<Option<usize>>,
    rows: Vec<Vec<(usize, A::E)>>,
    row_pivot: Vec<usize>,
    /// Rows that may hold a non-pivot entry in each column (superset).
    occurs: Vec<Vec<usize>>,
    scratch: Vec<Option<A::E>>,
    touched: Vec<usize>,
}

impl<A: Arith> Echelon<A> {
    fn new(arith: A, ncols: usize) -> Self {
        Echelon {
            arith,
            ncols,
            pivot_row: vec![None; ncols],
            rows: Vec::new(),
            row_pivot: Vec::new(),
            occurs: vec![Vec::new(); ncols],
            scratch: vec![None; ncols],
            touched: Vec::new(),
        }
    }

    fn accumulate(&mut self, c: usize, v: A::E) {
        match &mut self.scratch[c] {
            Some(x) => *x = self.arith.add(x, &v),
            slot @ None => {
                *slot = Some(v);
                self.touched.push(c);
            }
        }
    }

    /// Reduces `row` against the stored rows; returns true if it added a pivot.
    fn insert(&mut self, row: &[(usize, A::E)]) -> bool {
        for (c, v) in row {
            if self.arith.is_zero(v) {
                continue;
            }
            match self.pivot_row[*c] {
                Some(r) => {
                    let pivot_entries = std::mem::take(&mut self.rows[r]);
                    for (c2, w) in &pivot_entries {
                        if *c2 != *c {
                            let prod = self.arith.mul(v, w);
                            let neg = self.arith.sub(&self.arith.zero(), &prod);
                            self.accumulate(*c2, neg);
                        }
                    }
                    self.rows[r] = pivot_entries;
                }
                None => self.accumulate(*c, v.clone()),
            }
        }
        self.touched.sort_unstable();
        let mut reduced: Vec<(usize, A::E)> = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let v = self.scratch[c].take().unwrap();
            if !self.arith.is_zero(&v) {
                reduced.push((c, v));
            }
        }
        self.touched.clear();
        if reduced.is_empty() {
            return false;
        }

        let pc = reduced[0].0;
        let lead_inv = self.arith.inv(&reduced[0].1);
        for e in reduced.iter_mut() {
            e.1 = self.arith.mul(&e.1, &lead_inv);
        }

        // clear the new pivot column from the other rows
        let holders = std::mem::take(&mut self.occurs[pc]);
        for r in holders {
            let Ok(pos) = self.rows[r].binary_search_by_key(&pc, |e| e.0) else {
                continue;
            };
            let factor = self.rows[r][pos].1.clone();
            let old = std::mem::take(&mut self.rows[r]);
            let merged = merge_sub(&self.arith, &old, &reduced, &factor);
            for (c, _) in &merged {
                if self.pivot_row[*c].is_none() && *c != pc && old.binary_search_by_key(c, |e| e.0).is_err() {
                    self.occurs[*c].push(r);
                }
            }
            self.rows[r] = merged;
        }

        let idx = self.rows.len();
        for (c, _) in &reduced[1..] {
            self.occurs[*c].push(idx);
        }
        self.pivot_row[pc] = Some(idx);
        self.row_pivot.push(pc);
        self.rows.push(reduced);
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Kernel vectors `e_f - Σ row[f] e_pivot(row)` for each free column `f`.
    fn kernel(&self) -> Vec<Vec<(usize, A::E)>> {
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if self.pivot_row[f].is_some() {
                continue;
            }
            let mut v = vec![(f, self.arith.one())];
            let mut holders = self.occurs[f].clone();
            holders.sort_unstable();
            holders.dedup();
            for r in holders {
                if let Ok(pos) = self.rows[r].binary_search_by_key(&f, |e| e.0) {
                    let x = &self.rows[r][pos].1;
                    v.push((self.row_pivot[r], self.arith.sub(&self.arith.zero(), x)));
                }
            }
            v.sort_by_key(|e| e.0);
            out.push(v);
        }
        out
    }
}

fn merge_sub<A: Arith>(
    arith: &A,
    a: &[(usize, A::E)],
    b: &[(usize, A::E)],
    factor: &A::E,
) -> Vec<(usize, A::E)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let prod = arith.mul(factor, &b[j].1);
            out.push((b[j].0, arith.sub(&arith.zero(), &prod)));
            j += 1;
        } else {
            let prod = arith.mul(factor, &b[j].1);
            let v = arith.sub(&a[i].1, &prod);
            if !arith.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn exact_kernel(rows: &[&SparseRow], ncols: usize) -> Vec<SparseRow> {
    let mut ech = Echelon::new(Exact, ncols);
    for r in rows {
        ech.insert(r);
    }
    ech.kernel()
}

/// Indices of a maximal set of rows independent modulo the prime.
fn select_rows(field: &ScalarField, m: &Matrix, prime: &PrimeImage) -> Option<Vec<usize>> {
    let mut ech = Echelon::new(prime.arith, m.ncols);
    let mut chosen = Vec::new();
    let mut buf = Vec::new();
    for (i, row) in m.rows.iter().enumerate() {
        buf.clear();
        for (c, x) in row {
            buf.push((*c, prime.image(field, x)?));
        }
        if ech.insert(&buf) {
            chosen.push(i);
            if ech.rank() == m.ncols {
                break;
            }
        }
    }
    Some(chosen)
}

/// Exact kernel of `m`, returned in reduced echelon form.
pub fn nullspace(field: &ScalarField, m: &Matrix) -> NullspaceBasis {
    let mut selected: Vec<usize> = Vec::new();
    for attempt in 0.. {
        let prime = PrimeImage::nth(field, attempt);
        if let Some(sel) = select_rows(field, m, &prime) {
            selected = sel;
            break;
        }
    }
    loop {
        let rows: Vec<&SparseRow> = selected.iter().map(|&i| &m.rows[i]).collect();
        let kernel = exact_kernel(&rows, m.ncols);
        let dense: Vec<Vec<Scalar>> = kernel.iter().map(|v| to_dense(v, m.ncols)).collect();
        let mut failing: Vec<usize> = Vec::new();
        let chosen: std::collections::HashSet<usize> = selected.iter().copied().collect();
        for (i, row) in m.rows.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            if dense.iter().any(|v| !dot(row, v).is_zero()) {
                failing.push(i);
            }
        }
        if failing.is_empty() {
            return NullspaceBasis { ncols: m.ncols, vectors: canonical_rref(&kernel, m.ncols) };
        }
        selected.extend(failing);
        selected.sort_unstable();
    }
}

/// Canonical reduced row echelon form of a set of vectors (zero vectors dropped).
pub fn canonical_rref(vectors: &[SparseRow], ncols: usize) -> Vec<SparseRow> {
    let mut rows: Vec<Vec<Scalar>> = vectors.iter().map(|v| to_dense(v, ncols)).collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().unwrap();
        for x in rows[rank].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows.into_iter()
        .map(|r| r.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
        .collect()
}

/// Exact rank of a set of sparse vectors.
pub fn rank(vectors: &[SparseRow], ncols: usize) -> usize {
    let mut ech = Echelon::new(Exact, ncols);
    vectors.iter().filter(|v| ech.insert(v)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, ScalarField};

    fn g() -> ScalarField {
        ScalarField::generic(rat(2)).unwrap()
    }

    fn row(v: &[i64]) -> Vec<(usize, Scalar)> {
        v.iter().enumerate().map(|(i, &x)| (i, Scalar::int(x))).collect()
    }

    #[test]
    fn single_row_kernel() {
        let mut m = Matrix::new(2);
        m.push_row(row(&[1, -1]));
        let k = nullspace(&g(), &m);
        assert_eq!(k.dim(), 1);
        assert_eq!(k.dense(0), vec![Scalar::one(), Scalar::one()]);
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let mut m = Matrix::new(2);
        m.push_row(row(&[1, 0]));
        m.push_row(row(&[0, 1]));
        assert_eq!(nullspace(&g(), &m).dim(), 0);
    }

    #[test]
    fn empty_system_is_everything() {
        let m = Matrix::new(3);
        let k = nullspace(&g(), &m);
        assert_eq!(k.dim(), 3);
    }

    #[test]
    fn primes_are_primes() {
        assert!(is_prime_u64(2_305_843_009_213_693_951));
        assert!(!is_prime_u64(2_305_843_009_213_693_953));
        let f = ScalarField::cyclotomic(7).unwrap();
        let p = PrimeImage::nth(&f, 0);
        assert_eq!(p.arith.p % 7, 1);
        assert_eq!(p.arith.pow(p.omega, 7), 1);
        assert_ne!(p.omega, 1);
    }

    #[test]
    fn cyclotomic_kernel_is_exact() {
        let f = ScalarField::cyclotomic(3).unwrap();
        let z = f.q();
        // (1, -z, 0), (0, 1, -z): kernel spanned by (z^2, z, 1)
        let mut m = Matrix::new(3);
        m.push_row(vec![(0, Scalar::one()), (1, -&z)]);
        m.push_row(vec![(1, Scalar::one()), (2, -&z)]);
        let k = nullspace(&f, &m);
        assert_eq!(k.dim(), 1);
        let v = k.dense(0);
        assert!(v[0].is_one());
        for r in &m.rows {
            assert!(dot(r, &v).is_zero());
        }
        assert_eq!(v[1], f.qpow(-1));
        assert_eq!(v[2], f.qpow(-2));
    }

    #[test]
    fn rref_is_canonical() {
        let a = vec![row(&[2, 4, 0]), row(&[1, 2, 1])];
        let b = vec![row(&[0, 0, 3]), row(&[1, 2, 0])];
        assert_eq!(canonical_rref(&a, 3), canonical_rref(&b, 3));
        assert_eq!(rank(&a, 3), 2);
        assert_eq!(rank(&[row(&[1, 1]), row(&[2, 2])], 2), 1);
    }
}
