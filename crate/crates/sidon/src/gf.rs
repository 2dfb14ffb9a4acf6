//! Small finite fields GF(p^n) with u64-encoded elements.
//!
//! Elements are polynomials of degree below n over GF(p), encoded as
//! integers in base p (the constant term is the least significant digit).
//! The modulus is the lexicographically smallest monic irreducible
//! polynomial of degree n, "smallest" meaning smallest base-p encoding, so
//! a given order always produces the same field and the same element
//! labels. Orders stay small here (the constructions need at most a few
//! hundred thousand elements), so multiplication is schoolbook and
//! primality testing is trial division.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} is too large")]
    OrderTooLarge(u64),
}

/// Trial-division primality; intended for the small moduli used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, as (prime, exponent) pairs.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Decomposes q as p^n for prime p, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factor(q);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

const MAX_ORDER: u64 = 1 << 28;

/// GF(p^n) with a fixed irreducible modulus.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    p: u64,
    n: u32,
    q: u64,
    /// Monic modulus, little-endian coefficients, length n+1.
    modulus: Vec<u64>,
    primitive: u64,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(GF({}^{}))", self.p, self.n)
    }
}

impl Field {
    /// Builds GF(q) for a prime power q, choosing the smallest irreducible
    /// modulus and the smallest primitive element.
    pub fn new(q: u64) -> Result<Field, FieldError> {
        let (p, n) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if q > MAX_ORDER {
            return Err(FieldError::OrderTooLarge(q));
        }
        let modulus = smallest_irreducible(p, n);
        let mut field = Field {
            p,
            n,
            q,
            modulus,
            primitive: 0,
        };
        field.primitive = field.find_primitive();
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Little-endian coefficients of the modulus polynomial.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The cached smallest primitive element.
    pub fn primitive_element(&self) -> u64 {
        self.primitive
    }

    pub fn decode(&self, e: u64) -> Vec<u64> {
        debug_assert!(e < self.q);
        let mut coeffs = vec![0u64; self.n as usize];
        let mut rest = e;
        for c in coeffs.iter_mut() {
            *c = rest % self.p;
            rest /= self.p;
        }
        coeffs
    }

    pub fn encode(&self, coeffs: &[u64]) -> u64 {
        let mut e = 0u64;
        for &c in coeffs.iter().rev() {
            debug_assert!(c < self.p);
            e = e * self.p + c;
        }
        e
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        let (mut a, mut b, p) = (a, b, self.p);
        let mut e = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            e += (a % p + b % p) % p * place;
            a /= p;
            b /= p;
            place *= p;
        }
        e
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.q);
        let (mut a, p) = (a, self.p);
        let mut e = 0u64;
        let mut place = 1u64;
        for _ in 0..self.n {
            e += (p - a % p) % p * place;
            a /= p;
            place *= p;
        }
        e
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        if self.n == 1 {
            return a * b % self.p;
        }
        let n = self.n as usize;
        let av = self.decode(a);
        let bv = self.decode(b);
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &ai) in av.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in bv.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % self.p;
            }
        }
        // Reduce by the monic modulus.
        for i in (n..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &mj) in self.modulus.iter().enumerate().take(n) {
                let idx = i - n + j;
                prod[idx] = (prod[idx] + c * (self.p - mj)) % self.p;
            }
        }
        self.encode(&prod[..n])
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        Some(self.pow(a, self.q - 2))
    }

    fn find_primitive(&self) -> u64 {
        let group = self.q - 1;
        let factors = factor(group);
        for g in 1..self.q {
            if factors
                .iter()
                .all(|&(f, _)| self.pow(g, group / f) != 1)
            {
                return g;
            }
        }
        unreachable!("a finite field always has a primitive element")
    }
}

/// Smallest primitive root mod prime p.
pub fn primitive_root(p: u64) -> u64 {
    debug_assert!(is_prime(p));
    if p == 2 {
        return 1;
    }
    let factors = factor(p - 1);
    for g in 2..p {
        if factors
            .iter()
            .all(|&(f, _)| mod_pow(g, (p - 1) / f, p) != 1)
        {
            return g;
        }
    }
    unreachable!("a prime modulus always has a primitive root")
}

pub fn mod_pow(mut a: u64, mut e: u64, m: u64) -> u64 {
    debug_assert!(m > 0 && m < (1 << 32), "modulus must fit 32 bits");
    a %= m;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % m;
        }
        a = a * a % m;
        e >>= 1;
    }
    acc
}

// Polynomial helpers over GF(p), little-endian coefficient vectors. These
// run on candidate moduli before any field exists.

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    debug_assert_eq!(m[dm], 1, "modulus must be monic");
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                r[shift + j] = (r[shift + j] + c * (p - mj)) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() <= dm {
            break;
        }
    }
    r
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_trim(&mut prod);
    poly_rem(&prod, m, p)
}

fn poly_pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = poly_rem(a, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &base, m, p);
        }
        base = poly_mul_mod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        // Make y monic so poly_rem applies.
        let lead = *y.last().unwrap();
        let inv = mod_pow(lead, p - 2, p);
        let monic: Vec<u64> = y.iter().map(|&c| c * inv % p).collect();
        let mut r = if x.len() > monic.len() - 1 {
            poly_rem(&x, &monic, p)
        } else {
            x.clone()
        };
        poly_trim(&mut r);
        x = y;
        y = r;
    }
    x
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out = vec![0u64; len];
    for (i, o) in out.iter_mut().enumerate() {
        let av = a.get(i).copied().unwrap_or(0);
        let bv = b.get(i).copied().unwrap_or(0);
        *o = (av + p - bv) % p;
    }
    poly_trim(&mut out);
    out
}

/// Irreducibility of a monic polynomial of degree n over GF(p): the
/// Frobenius map must close after exactly n steps (x^{p^n} ≡ x mod f) and
/// must not fix any proper subfield (gcd(x^{p^{n/r}} - x, f) = 1 for each
/// prime r dividing n).
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // Frobenius chain: chain[j] = x^{p^j} mod f, for j = 0..n-1.
    let mut frob = poly_rem(&x, f, p);
    let mut chain = vec![frob.clone()];
    for _ in 1..n {
        frob = poly_pow_mod(&frob, p, f, p);
        chain.push(frob.clone());
    }
    // x^{p^n} = (x^{p^{n-1}})^p
    let full = poly_pow_mod(chain.last().unwrap(), p, f, p);
    let x_red = poly_rem(&x, f, p);
    if full != x_red {
        return false;
    }
    for (r, _) in factor(n as u64) {
        let j = (n as u64 / r) as usize;
        let diff = poly_sub(&chain[j], &x_red, p);
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The monic irreducible polynomial of degree n over GF(p) with the
/// smallest base-p encoding of its coefficient vector.
fn smallest_irreducible(p: u64, n: u32) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1]; // x itself
    }
    let count = (p as u128).pow(n);
    let mut low = 0u128;
    while low < count {
        let mut coeffs = vec![0u64; n as usize + 1];
        let mut rest = low;
        for c in coeffs.iter_mut().take(n as usize) {
            *c = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        coeffs[n as usize] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
        low += 1;
    }
    unreachable!("irreducible polynomials exist in every degree")
}
