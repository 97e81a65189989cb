//! The field tower `F_p ⊆ F_{p^ℓ} ⊆ F_{p^m}`, `m = ℓ s`, and the vector
//! spaces built on it.
//!
//! Elements of `F_{p^m}` are `u64` values whose base-`p` digits are the
//! coefficients of a residue polynomial (digit `i` is the coefficient of
//! `x^i`). Elements of the subfield `F_{p^ℓ}` are `u32` indices whose base-`p`
//! digits are coordinates over [`FieldTower::subfield_basis`].

use std::collections::HashSet;

use num_traits::ToPrimitive;
use rand::Rng;

use crate::combinatorics::{nat, qbinom, BigNat};
use crate::config::Guards;
use crate::error::{Error, Result};
use crate::linalg::{self, FieldOps, PrimeField};

/// Largest extension degree `m = ℓ s` a tower may have.
pub const MAX_DEGREE: usize = 24;

/// Subfields up to this order get a full multiplication table.
const TABLE_ORDER: u64 = 256;

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1u64 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, n);
        }
        a = mul_mod(a, a, n);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `Some((p, e))` with `q = p^e` if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q {
        if q.is_multiple_of(p) {
            let mut rest = q;
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            return (rest == 1).then_some((p, e));
        }
        p += 1;
    }
    Some((q, 1))
}

// Polynomials over F_p, coefficient vectors from low to high degree.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(f: &PrimeField, a: &[u32], modulus: &[u32]) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let modulus = trim(modulus.to_vec());
    let dm = modulus.len() - 1;
    let lead_inv = f.inv(modulus[dm]);
    while a.len() > dm {
        let top = a.len() - 1;
        let factor = f.mul(a[top], lead_inv);
        let shift = top - dm;
        for (i, &c) in modulus.iter().enumerate() {
            a[shift + i] = f.sub(a[shift + i], f.mul(factor, c));
        }
        a = trim(a);
    }
    a
}

fn poly_mul(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

fn poly_mulmod(f: &PrimeField, a: &[u32], b: &[u32], modulus: &[u32]) -> Vec<u32> {
    poly_rem(f, &poly_mul(f, a, b), modulus)
}

fn poly_powmod(f: &PrimeField, a: &[u32], mut e: u64, modulus: &[u32]) -> Vec<u32> {
    let mut acc = poly_rem(f, &[1], modulus);
    let mut base = poly_rem(f, a, modulus);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(f, &acc, &base, modulus);
        }
        base = poly_mulmod(f, &base, &base, modulus);
        e >>= 1;
    }
    acc
}

fn poly_gcd(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn poly_sub(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let len = a.len().max(b.len());
    let get = |v: &[u32], i: usize| v.get(i).copied().unwrap_or(0);
    trim((0..len).map(|i| f.sub(get(a, i), get(b, i))).collect())
}

/// `x^{p^j} mod modulus`.
fn frobenius_x(f: &PrimeField, j: usize, modulus: &[u32]) -> Vec<u32> {
    let mut y = poly_rem(f, &[0, 1], modulus);
    for _ in 0..j {
        y = poly_powmod(f, &y, f.p as u64, modulus);
    }
    y
}

/// Rabin's irreducibility test for a monic polynomial of degree `m >= 1`.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let f = PrimeField::new(p);
    let poly = trim(poly.to_vec());
    let m = poly.len() - 1;
    if m == 1 {
        return true;
    }
    let x = [0u32, 1];
    if !poly_sub(&f, &frobenius_x(&f, m, &poly), &poly_rem(&f, &x, &poly)).is_empty() {
        return false;
    }
    let mut rest = m;
    let mut r = 2;
    while rest > 1 {
        if rest.is_multiple_of(r) {
            while rest.is_multiple_of(r) {
                rest /= r;
            }
            let h = poly_sub(&f, &frobenius_x(&f, m / r, &poly), &x);
            if poly_gcd(&f, &h, &poly).len() != 1 {
                return false;
            }
        }
        r += 1;
    }
    true
}

/// The first monic irreducible polynomial of degree `m` over `F_p` when the
/// lower coefficients are read as the base-`p` number `Σ c_i p^i`.
pub fn smallest_irreducible(p: u32, m: usize) -> Vec<u32> {
    let mut index = 0u64;
    loop {
        let mut poly = Vec::with_capacity(m + 1);
        let mut rest = index;
        for _ in 0..m {
            poly.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        poly.push(1);
        if (m == 1 || poly[0] != 0) && is_irreducible(p, &poly) {
            return poly;
        }
        index += 1;
    }
}

/// `F_{p^m}` as `F_p[x] / (modulus)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    fp: PrimeField,
    m: usize,
    modulus: Vec<u32>,
    order: u64,
}

impl ExtField {
    pub fn new(p: u32, modulus: Vec<u32>) -> Self {
        let m = modulus.len() - 1;
        let order = (p as u64).pow(m as u32);
        ExtField {
            fp: PrimeField::new(p),
            m,
            modulus,
            order,
        }
    }

    pub fn p(&self) -> u32 {
        self.fp.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn prime_field(&self) -> &PrimeField {
        &self.fp
    }

    /// The `m` coefficients of `x`, constant term first.
    pub fn digits(&self, mut x: u64) -> Vec<u32> {
        let p = self.fp.p as u64;
        (0..self.m)
            .map(|_| {
                let d = (x % p) as u32;
                x /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u64 {
        let p = self.fp.p as u64;
        digits.iter().rev().fold(0u64, |acc, &d| acc * p + d as u64)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.fp.p == 2 {
            return a ^ b;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| self.fp.add(x, y))
            .collect();
        self.from_digits(&sum)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if self.fp.p == 2 {
            return a ^ b;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let diff: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| self.fp.sub(x, y))
            .collect();
        self.from_digits(&diff)
    }

    pub fn scale(&self, c: u32, a: u64) -> u64 {
        let d: Vec<u32> = self.digits(a).iter().map(|&x| self.fp.mul(c, x)).collect();
        self.from_digits(&d)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let prod = poly_mulmod(&self.fp, &self.digits(a), &self.digits(b), &self.modulus);
        self.from_digits(&prod)
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.order - 2)
    }

    /// `a^{p^j}`.
    pub fn frobenius(&self, a: u64, j: usize) -> u64 {
        (0..j).fold(a, |acc, _| self.pow(acc, self.fp.p as u64))
    }
}

/// The subfield `F_{p^ℓ}` of a tower, indexed by coordinates over its basis.
#[derive(Debug, Clone)]
pub struct Subfield {
    ext: ExtField,
    ell: usize,
    order: u64,
    basis: Vec<u64>,
    pivots: Vec<usize>,
    table: Option<Vec<u32>>,
}

impl Subfield {
    fn new(ext: ExtField, ell: usize, basis_rows: Vec<Vec<u32>>, pivots: Vec<usize>) -> Self {
        let basis = basis_rows.iter().map(|r| ext.from_digits(r)).collect();
        let order = (ext.p() as u64).pow(ell as u32);
        let mut sub = Subfield {
            ext,
            ell,
            order,
            basis,
            pivots,
            table: None,
        };
        if order <= TABLE_ORDER {
            let q = order as u32;
            let mut table = vec![0u32; (order * order) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = sub.mul_slow(a, b);
                }
            }
            sub.table = Some(table);
        }
        sub
    }

    pub fn degree(&self) -> usize {
        self.ell
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let p = self.ext.p();
        (0..self.ell)
            .map(|_| {
                let d = a % p;
                a /= p;
                d
            })
            .collect()
    }

    fn index_of(&self, digits: &[u32]) -> u32 {
        let p = self.ext.p();
        digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
    }

    /// The element of `F_{p^m}` with subfield index `a`.
    pub fn embed(&self, a: u32) -> u64 {
        let fp = self.ext.prime_field();
        let mut acc = vec![0u32; self.ext.degree()];
        for (d, b) in self.digits(a).into_iter().zip(&self.basis) {
            if d == 0 {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(self.ext.digits(*b)) {
                *x = fp.add(*x, fp.mul(d, y));
            }
        }
        self.ext.from_digits(&acc)
    }

    /// Subfield index of `x`, or `None` if `x` lies outside the subfield.
    pub fn project(&self, x: u64) -> Option<u32> {
        let digits = self.ext.digits(x);
        let coords: Vec<u32> = self.pivots.iter().map(|&c| digits[c]).collect();
        let idx = self.index_of(&coords);
        (self.embed(idx) == x).then_some(idx)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let prod = self.ext.mul(self.embed(a), self.embed(b));
        self.project(prod)
            .expect("subfield is not closed under multiplication")
    }
}

impl FieldOps for Subfield {
    fn order(&self) -> u64 {
        self.order
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        if self.ext.p() == 2 {
            return a ^ b;
        }
        let fp = self.ext.prime_field();
        let d: Vec<u32> = self
            .digits(a)
            .iter()
            .zip(self.digits(b))
            .map(|(&x, y)| fp.add(x, y))
            .collect();
        self.index_of(&d)
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        if self.ext.p() == 2 {
            return a ^ b;
        }
        let fp = self.ext.prime_field();
        let d: Vec<u32> = self
            .digits(a)
            .iter()
            .zip(self.digits(b))
            .map(|(&x, y)| fp.sub(x, y))
            .collect();
        self.index_of(&d)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[(a as u64 * self.order + b as u64) as usize],
            None => self.mul_slow(a, b),
        }
    }

    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let inv = self.ext.inv(self.embed(a));
        self.project(inv)
            .expect("subfield is not closed under inversion")
    }
}

/// A vector of `F_{p^m}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword {
    pub coords: Vec<u64>,
}

impl Codeword {
    pub fn new(coords: Vec<u64>) -> Self {
        Codeword { coords }
    }

    pub fn zero(n: usize) -> Self {
        Codeword { coords: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// The tower `F_p ⊆ F_{p^ℓ} ⊆ F_{p^m}` with the bases that identify
/// `F_{p^m}^n` with `F_{p^ℓ}^{ns}`.
#[derive(Debug, Clone)]
pub struct FieldTower {
    pub p: u32,
    pub ell: usize,
    pub s: usize,
    pub m: usize,
    ext: ExtField,
    sub: Subfield,
    relative_basis: Vec<u64>,
    /// Columns are the `F_p` coordinates of `e_i b_j`, column `j ℓ + i`.
    to_prime: Vec<Vec<u32>>,
    from_prime: Vec<Vec<u32>>,
}

impl FieldTower {
    /// Build the tower for a prime `p`, `ℓ, s >= 1`, `ℓ s <= 24`.
    pub fn build(p: u64, ell: usize, s: usize) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(Error::invalid(format!(
                "tower base must be a prime below 2^32, got {p}"
            )));
        }
        if ell == 0 || s == 0 {
            return Err(Error::invalid("ℓ and s must be positive"));
        }
        let m = ell * s;
        if m > MAX_DEGREE {
            return Err(Error::invalid(format!(
                "extension degree ℓs = {m} exceeds {MAX_DEGREE}"
            )));
        }
        if (p as f64).powi(m as i32) >= 2f64.powi(63) {
            return Err(Error::invalid(format!(
                "field of size {p}^{m} does not fit in 63 bits"
            )));
        }
        let p = p as u32;
        let ext = ExtField::new(p, smallest_irreducible(p, m));
        let fp = *ext.prime_field();

        // Subfield = kernel of y -> y^{p^ℓ} - y.
        let images: Vec<Vec<u32>> = (0..m)
            .map(|i| ext.digits(ext.frobenius((p as u64).pow(i as u32), ell)))
            .collect();
        let frob_minus_id: Vec<Vec<u32>> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|c| fp.sub(images[c][r], u32::from(r == c)))
                    .collect()
            })
            .collect();
        let mut basis_rows = linalg::kernel(&fp, &frob_minus_id);
        if basis_rows.len() != ell {
            return Err(Error::invalid(format!(
                "Frobenius-fixed space has dimension {}, expected {ell}",
                basis_rows.len()
            )));
        }
        let pivots = linalg::rref(&fp, &mut basis_rows);
        let sub = Subfield::new(ext.clone(), ell, basis_rows, pivots);

        // Greedy relative basis from the monomials.
        let mut relative_basis = Vec::with_capacity(s);
        let mut columns: Vec<Vec<u32>> = Vec::with_capacity(m);
        for j in 0..m {
            if relative_basis.len() == s {
                break;
            }
            let b = (p as u64).pow(j as u32);
            let candidate: Vec<Vec<u32>> = sub
                .basis
                .iter()
                .map(|&e| ext.digits(ext.mul(e, b)))
                .collect();
            let mut trial = columns.clone();
            trial.extend(candidate.iter().cloned());
            if linalg::rank(&fp, &trial) == trial.len() {
                columns = trial;
                relative_basis.push(b);
            }
        }
        assert_eq!(
            relative_basis.len(),
            s,
            "monomials failed to span the extension"
        );
        let to_prime: Vec<Vec<u32>> = (0..m)
            .map(|r| columns.iter().map(|c| c[r]).collect())
            .collect();
        let from_prime = linalg::invert(&fp, &to_prime).expect("relative basis is not independent");

        Ok(FieldTower {
            p,
            ell,
            s,
            m,
            ext,
            sub,
            relative_basis,
            to_prime,
            from_prime,
        })
    }

    pub fn ext(&self) -> &ExtField {
        &self.ext
    }

    pub fn subfield(&self) -> &Subfield {
        &self.sub
    }

    pub fn modulus(&self) -> &[u32] {
        self.ext.modulus()
    }

    pub fn subfield_basis(&self) -> &[u64] {
        self.sub.basis()
    }

    pub fn relative_basis(&self) -> &[u64] {
        &self.relative_basis
    }

    /// `q^ℓ`, the size of the subfield.
    pub fn subfield_order(&self) -> u64 {
        self.sub.order
    }

    /// Number of vectors in `F_{p^m}^n`, if it fits in a `u64`.
    pub fn space_size(&self, n: usize) -> Option<u64> {
        self.ext.order().checked_pow(n as u32)
    }

    /// `F_{p^ℓ}` coordinates of one field element over the relative basis.
    fn flatten_element(&self, x: u64) -> Vec<u32> {
        let a = linalg::mat_vec(
            self.ext.prime_field(),
            &self.from_prime,
            &self.ext.digits(x),
        );
        a.chunks(self.ell).map(|c| self.sub.index_of(c)).collect()
    }

    fn unflatten_element(&self, coords: &[u32]) -> u64 {
        let a: Vec<u32> = coords.iter().flat_map(|&c| self.sub.digits(c)).collect();
        self.ext
            .from_digits(&linalg::mat_vec(self.ext.prime_field(), &self.to_prime, &a))
    }

    /// `F_{q^m}^n -> F_{q^ℓ}^{ns}`; coordinate `i` occupies entries
    /// `i s .. (i+1) s`.
    pub fn flatten(&self, x: &Codeword) -> Vec<u32> {
        x.coords
            .iter()
            .flat_map(|&c| self.flatten_element(c))
            .collect()
    }

    pub fn unflatten(&self, v: &[u32]) -> Codeword {
        assert_eq!(v.len() % self.s, 0, "length is not a multiple of s");
        Codeword::new(
            v.chunks(self.s)
                .map(|c| self.unflatten_element(c))
                .collect(),
        )
    }

    /// The `m × n` matrix over `F_p` whose column `j` holds the coordinates of
    /// `x_j`.
    pub fn expand_to_prime_field(&self, x: &Codeword) -> Vec<Vec<u32>> {
        let cols: Vec<Vec<u32>> = x.coords.iter().map(|&c| self.ext.digits(c)).collect();
        (0..self.m)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect()
    }

    /// Index of a codeword in `0..p^{mn}`: coordinate `i` is digit `i` in base
    /// `p^m`.
    pub fn pack(&self, x: &Codeword) -> u64 {
        let order = self.ext.order();
        x.coords.iter().rev().fold(0u64, |acc, &c| acc * order + c)
    }

    pub fn unpack(&self, mut index: u64, n: usize) -> Codeword {
        let order = self.ext.order();
        Codeword::new(
            (0..n)
                .map(|_| {
                    let c = index % order;
                    index /= order;
                    c
                })
                .collect(),
        )
    }

    /// Multiply every coordinate by the subfield element `c`.
    pub fn scale(&self, c: u32, x: &Codeword) -> Codeword {
        let e = self.sub.embed(c);
        Codeword::new(x.coords.iter().map(|&v| self.ext.mul(e, v)).collect())
    }

    pub fn add(&self, x: &Codeword, y: &Codeword) -> Codeword {
        Codeword::new(
            x.coords
                .iter()
                .zip(&y.coords)
                .map(|(&a, &b)| self.ext.add(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, x: &Codeword, y: &Codeword) -> Codeword {
        Codeword::new(
            x.coords
                .iter()
                .zip(&y.coords)
                .map(|(&a, &b)| self.ext.sub(a, b))
                .collect(),
        )
    }
}

/// A `k`-dimensional subspace of `F_{q^ℓ}^{ns}` as its canonical RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    pub rows: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
    pub len: usize,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Canonical basis of the span of arbitrary rows.
    pub fn from_rows<F: FieldOps>(f: &F, rows: Vec<Vec<u32>>, len: usize) -> Self {
        let mut rows = rows;
        let pivots = linalg::rref(f, &mut rows);
        SubspaceBasis { rows, pivots, len }
    }

    /// `Σ c_i row_i` over the subfield.
    pub fn combine<F: FieldOps>(&self, f: &F, coeffs: &[u32]) -> Vec<u32> {
        let mut v = vec![0u32; self.len];
        for (&c, row) in coeffs.iter().zip(&self.rows) {
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                *x = f.add(*x, f.mul(c, y));
            }
        }
        v
    }
}

/// Uniform `k`-dimensional `F_{q^ℓ}`-subspace of `F_{q^m}^n ≅ F_{q^ℓ}^{ns}`.
pub fn sample_subspace<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    tower: &FieldTower,
    n: usize,
) -> Result<SubspaceBasis> {
    let len = n * tower.s;
    if k == 0 || k > len {
        return Err(Error::invalid(format!(
            "dimension k = {k} outside 1..={len}"
        )));
    }
    let q = tower.subfield_order();
    loop {
        let mut rows: Vec<Vec<u32>> = (0..k)
            .map(|_| (0..len).map(|_| rng.gen_range(0..q) as u32).collect())
            .collect();
        let pivots = linalg::rref(tower.subfield(), &mut rows);
        if pivots.len() == k {
            return Ok(SubspaceBasis { rows, pivots, len });
        }
    }
}

/// Every `k`-dimensional subspace of `F_Q^len`, each once, by pivot profile.
#[derive(Debug, Clone)]
pub struct Subspaces {
    k: usize,
    len: usize,
    order: u32,
    pivots: Option<Vec<usize>>,
    free: Vec<(usize, usize)>,
    values: Vec<u32>,
}

impl Subspaces {
    /// Enumerate subspaces of `F_order^len` without a guard.
    pub fn new(k: usize, len: usize, order: u64) -> Self {
        let pivots = (k <= len).then(|| (0..k).collect::<Vec<_>>());
        let mut it = Subspaces {
            k,
            len,
            order: order as u32,
            pivots,
            free: Vec::new(),
            values: Vec::new(),
        };
        it.reset_free();
        it
    }

    fn reset_free(&mut self) {
        self.free.clear();
        if let Some(pivots) = &self.pivots {
            for (row, &pc) in pivots.iter().enumerate() {
                for col in pc + 1..self.len {
                    if !pivots.contains(&col) {
                        self.free.push((row, col));
                    }
                }
            }
        }
        self.values = vec![0; self.free.len()];
    }

    fn next_pivots(&mut self) {
        let Some(p) = self.pivots.as_mut() else {
            return;
        };
        let (k, len) = (self.k, self.len);
        let mut i = k;
        while i > 0 {
            i -= 1;
            if p[i] < len - k + i {
                p[i] += 1;
                for j in i + 1..k {
                    p[j] = p[j - 1] + 1;
                }
                self.reset_free();
                return;
            }
        }
        self.pivots = None;
    }
}

impl Iterator for Subspaces {
    type Item = SubspaceBasis;

    fn next(&mut self) -> Option<SubspaceBasis> {
        let pivots = self.pivots.clone()?;
        let mut rows = vec![vec![0u32; self.len]; self.k];
        for (row, &pc) in pivots.iter().enumerate() {
            rows[row][pc] = 1;
        }
        for (&(r, c), &v) in self.free.iter().zip(&self.values) {
            rows[r][c] = v;
        }
        let out = SubspaceBasis {
            rows,
            pivots,
            len: self.len,
        };
        // Advance the odometer over the free entries, then the pivot set.
        let mut carried = true;
        for v in self.values.iter_mut() {
            *v += 1;
            if *v < self.order {
                carried = false;
                break;
            }
            *v = 0;
        }
        if carried {
            self.next_pivots();
        }
        Some(out)
    }
}

/// All `k`-dimensional `F_{q^ℓ}`-subspaces of `F_{q^m}^n`, refusing when
/// their number exceeds the enumeration guard.
pub fn enumerate_subspaces(
    k: usize,
    tower: &FieldTower,
    n: usize,
    guards: &Guards,
) -> Result<Subspaces> {
    let len = n * tower.s;
    let q = tower.subfield_order();
    let count = qbinom(len as i64, k as i64, &nat(q))?;
    if count > nat(guards.enumeration) {
        return Err(Error::SizeLimit {
            what: format!("{k}-dimensional subspaces of F_{q}^{len}"),
            count,
            guard: guards.enumeration,
        });
    }
    Ok(Subspaces::new(k, len, q))
}

/// `count` distinct uniform indices from `0..total` (Floyd's algorithm),
/// sorted.
pub fn sample_indices<R: Rng + ?Sized>(rng: &mut R, count: u64, total: u64) -> Vec<u64> {
    assert!(count <= total, "cannot draw {count} of {total}");
    let mut chosen = HashSet::with_capacity(count as usize);
    for j in total - count..total {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut out: Vec<u64> = chosen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Uniform `S`-subset of `F_{q^m}^n`.
pub fn sample_code_subset<R: Rng + ?Sized>(
    rng: &mut R,
    size: &BigNat,
    tower: &FieldTower,
    n: usize,
    guards: &Guards,
) -> Result<Vec<Codeword>> {
    let total = tower
        .space_size(n)
        .filter(|&t| t <= guards.space)
        .ok_or_else(|| Error::SizeLimit {
            what: "vectors in the ambient space".into(),
            count: nat(tower.ext().order()).pow(n as u32),
            guard: guards.space,
        })?;
    let s = size
        .to_u64()
        .filter(|&s| (2..=total).contains(&s))
        .ok_or_else(|| Error::invalid(format!("code size {size} outside 2..={total}")))?;
    Ok(sample_indices(rng, s, total)
        .into_iter()
        .map(|i| tower.unpack(i, n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    /// Critical values of the chi-square distribution at significance 10^-3.
    const CHI2_999_DF2: f64 = 13.816;
    const CHI2_999_DF5: f64 = 20.515;

    fn chi_square(counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        let expected = total as f64 / counts.len() as f64;
        counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    }

    /// Trial division by every monic polynomial of degree 1..=m/2.
    fn irreducible_by_division(p: u32, poly: &[u32]) -> bool {
        let f = PrimeField::new(p);
        let m = poly.len() - 1;
        for deg in 1..=m / 2 {
            for idx in 0..(p as u64).pow(deg as u32) {
                let mut d: Vec<u32> = (0..deg)
                    .map(|i| ((idx / (p as u64).pow(i as u32)) % p as u64) as u32)
                    .collect();
                d.push(1);
                if poly_rem(&f, poly, &d).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1009));
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(4_294_967_297));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(101), Some((101, 1)));
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn modulus_is_first_irreducible() {
        for (p, max_m) in [(2u32, 8usize), (3, 5), (5, 3)] {
            for m in 1..=max_m {
                let modulus = smallest_irreducible(p, m);
                assert!(irreducible_by_division(p, &modulus), "p={p} m={m}");
                let target: u64 = modulus[..m]
                    .iter()
                    .rev()
                    .fold(0, |a, &c| a * p as u64 + c as u64);
                for idx in 0..target {
                    let mut poly: Vec<u32> = (0..m)
                        .map(|i| ((idx / (p as u64).pow(i as u32)) % p as u64) as u32)
                        .collect();
                    poly.push(1);
                    assert!(!irreducible_by_division(p, &poly));
                }
            }
        }
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn tower_examples() {
        let t = FieldTower::build(2, 1, 2).unwrap();
        assert_eq!(t.m, 2);
        assert_eq!(t.subfield_order(), 2);
        assert_eq!(t.subfield().embed(0), 0);
        assert_eq!(t.subfield().embed(1), 1);

        let t = FieldTower::build(2, 2, 1).unwrap();
        let image: HashSet<u64> = (0..4).map(|a| t.subfield().embed(a)).collect();
        assert_eq!(image.len(), 4);

        let t = FieldTower::build(3, 1, 2).unwrap();
        let fixed = (0..9).filter(|&x| t.ext().pow(x, 3) == x).count();
        assert_eq!(fixed, 3);
        assert_eq!(t.subfield_order(), 3);
    }

    #[test]
    fn tower_rejects_bad_input() {
        assert!(FieldTower::build(4, 1, 1).is_err());
        assert!(FieldTower::build(2, 5, 5).is_err());
        assert!(FieldTower::build(2, 0, 1).is_err());
    }

    #[test]
    fn frobenius_fixed_count() {
        for (p, max_m) in [(2u64, 8usize), (3, 8), (5, 4)] {
            for m in 1..=max_m {
                for ell in (1..=m).filter(|l| m % l == 0) {
                    let t = FieldTower::build(p, ell, m / ell).unwrap();
                    let q_ell = p.pow(ell as u32);
                    let fixed = (0..t.ext().order())
                        .filter(|&x| t.ext().frobenius(x, ell) == x)
                        .count() as u64;
                    assert_eq!(fixed, q_ell, "p={p} ℓ={ell} m={m}");
                    for &e in t.subfield_basis() {
                        assert_eq!(t.ext().pow(e, q_ell), e);
                    }
                }
            }
        }
    }

    #[test]
    fn subfield_is_a_field() {
        for (p, ell, s) in [(2u64, 2usize, 2usize), (3, 2, 1), (2, 3, 2), (5, 1, 3)] {
            let t = FieldTower::build(p, ell, s).unwrap();
            let f = t.subfield();
            let q = f.order() as u32;
            for a in 0..q {
                assert_eq!(f.project(f.embed(a)), Some(a));
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q {
                    let (ea, eb) = (f.embed(a), f.embed(b));
                    assert_eq!(f.embed(f.add(a, b)), t.ext().add(ea, eb));
                    assert_eq!(f.embed(f.mul(a, b)), t.ext().mul(ea, eb));
                    assert_eq!(f.add(f.sub(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let t = FieldTower::build(2, 1, 2).unwrap();
        let fp = PrimeField::new(2);
        let zero = t.expand_to_prime_field(&Codeword::zero(3));
        assert!(zero.iter().flatten().all(|&x| x == 0));
        // x generates F_4^* over F_2.
        let g = 2u64;
        assert_eq!(
            linalg::rank(&fp, &t.expand_to_prime_field(&Codeword::new(vec![g]))),
            1
        );
        assert_eq!(
            linalg::rank(&fp, &t.expand_to_prime_field(&Codeword::new(vec![1, g]))),
            2
        );
        for idx in 0..16 {
            let x = t.unpack(idx, 2);
            let r = linalg::rank(&fp, &t.expand_to_prime_field(&x));
            for c in 1..4 {
                let y = Codeword::new(x.coords.iter().map(|&v| t.ext().mul(c, v)).collect());
                assert_eq!(linalg::rank(&fp, &t.expand_to_prime_field(&y)), r);
            }
        }
    }

    #[test]
    fn flatten_roundtrip_and_linearity() {
        let t = FieldTower::build(2, 1, 2).unwrap();
        assert_eq!(t.flatten(&Codeword::zero(2)), vec![0; 4]);
        let mut image = HashSet::new();
        for idx in 0..16 {
            let x = t.unpack(idx, 2);
            let v = t.flatten(&x);
            assert_eq!(t.unflatten(&v), x);
            image.insert(v);
        }
        assert_eq!(image.len(), 16);

        let t = FieldTower::build(3, 1, 2).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                let (x, y) = (Codeword::new(vec![a]), Codeword::new(vec![b]));
                let lhs = t.flatten(&t.add(&x, &y));
                let rhs: Vec<u32> = t
                    .flatten(&x)
                    .iter()
                    .zip(t.flatten(&y))
                    .map(|(&u, v)| t.subfield().add(u, v))
                    .collect();
                assert_eq!(lhs, rhs);
            }
        }

        for (p, ell, s, n) in [
            (2u64, 2usize, 2usize, 1usize),
            (3, 2, 2, 1),
            (2, 2, 3, 1),
            (2, 1, 3, 2),
        ] {
            let t = FieldTower::build(p, ell, s).unwrap();
            let size = t.space_size(n).unwrap();
            let mut image = HashSet::new();
            for idx in 0..size {
                let x = t.unpack(idx, n);
                let v = t.flatten(&x);
                assert_eq!(t.unflatten(&v), x);
                for c in 0..t.subfield_order() as u32 {
                    let scaled: Vec<u32> = v.iter().map(|&e| t.subfield().mul(c, e)).collect();
                    assert_eq!(t.flatten(&t.scale(c, &x)), scaled);
                }
                image.insert(v);
            }
            assert_eq!(image.len() as u64, t.subfield_order().pow((n * s) as u32));
        }
    }

    #[test]
    fn enumeration_counts_match_qbinom() {
        let guards = Guards::default();
        for (p, ell) in [(2u64, 1usize), (3, 1), (2, 2)] {
            for s in 1..=3usize {
                for n in 1..=6 / s {
                    let t = FieldTower::build(p, ell, s).unwrap();
                    let len = n * s;
                    for k in 0..=len {
                        let expected =
                            qbinom(len as i64, k as i64, &nat(t.subfield_order())).unwrap();
                        let mut seen = HashSet::new();
                        for b in enumerate_subspaces(k, &t, n, &guards).unwrap() {
                            assert_eq!(b.dim(), k);
                            assert_eq!(linalg::rank(t.subfield(), &b.rows), k);
                            seen.insert(b);
                        }
                        assert_eq!(
                            nat(seen.len() as u64),
                            expected,
                            "p={p} ℓ={ell} len={len} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_guard_names_count() {
        let t = FieldTower::build(2, 2, 3).unwrap();
        let err =
            enumerate_subspaces(3, &t, 2, &Guards::default().with_enumeration(1000)).unwrap_err();
        match err {
            Error::SizeLimit { count, .. } => assert_eq!(count, qbinom(6, 3, &nat(4)).unwrap()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sampled_subspaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = FieldTower::build(2, 1, 2).unwrap();
        let full = sample_subspace(&mut rng, 4, &t, 2).unwrap();
        assert_eq!(full.pivots, vec![0, 1, 2, 3]);
        assert!(sample_subspace(&mut rng, 0, &t, 2).is_err());

        let t = FieldTower::build(3, 2, 1).unwrap();
        for _ in 0..200 {
            let b = sample_subspace(&mut rng, 2, &t, 3).unwrap();
            assert_eq!(linalg::rank(t.subfield(), &b.rows), 2);
            // Another basis of the same space reduces to the same RREF.
            let f = t.subfield();
            let mixed = vec![
                b.combine(f, &[1, 1]),
                b.combine(f, &[rng.gen_range(1..9), 0]),
                b.combine(f, &[rng.gen_range(0..9), rng.gen_range(1..9)]),
            ];
            assert_eq!(SubspaceBasis::from_rows(f, mixed, b.len), b);
        }
    }

    #[test]
    fn subspace_sampling_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = FieldTower::build(2, 1, 1).unwrap();
        let mut counts: HashMap<Vec<Vec<u32>>, u64> = HashMap::new();
        for _ in 0..30_000 {
            *counts
                .entry(sample_subspace(&mut rng, 1, &t, 2).unwrap().rows)
                .or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        let c: Vec<u64> = counts.values().copied().collect();
        assert!(chi_square(&c) < CHI2_999_DF2, "{c:?}");
    }

    #[test]
    fn code_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let guards = Guards::default();
        let t = FieldTower::build(2, 1, 2).unwrap();
        let whole = sample_code_subset(&mut rng, &nat(4), &t, 1, &guards).unwrap();
        assert_eq!(whole.len(), 4);
        assert!(sample_code_subset(&mut rng, &nat(5), &t, 1, &guards).is_err());
        assert!(sample_code_subset(&mut rng, &nat(1), &t, 1, &guards).is_err());

        let t3 = FieldTower::build(3, 1, 1).unwrap();
        for _ in 0..100 {
            let code = sample_code_subset(&mut rng, &nat(5), &t3, 2, &guards).unwrap();
            let distinct: HashSet<_> = code.iter().collect();
            assert_eq!(distinct.len(), 5);
        }

        let mut counts: HashMap<Vec<Codeword>, u64> = HashMap::new();
        for _ in 0..30_000 {
            *counts
                .entry(sample_code_subset(&mut rng, &nat(2), &t, 1, &guards).unwrap())
                .or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let c: Vec<u64> = counts.values().copied().collect();
        assert!(chi_square(&c) < CHI2_999_DF5, "{c:?}");
    }
}
