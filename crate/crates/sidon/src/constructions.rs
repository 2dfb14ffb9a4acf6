//! Classical modular Sidon constructions: Singer, Bose, and Ruzsa.
//!
//! Each produces a set of residues whose pairwise differences are distinct
//! mod m. Singer difference sets are perfect: every nonzero residue mod
//! q²+q+1 occurs exactly once. Every set is re-verified at generation
//! time; a construction that fails its own contract returns an error
//! instead of an unverified set.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::gf::{is_prime, mod_pow, prime_power, primitive_root, Field, FieldError};
use crate::set::{is_modular_sidon, SidonSet};

/// Largest construction parameter accepted; keeps the Singer field GF(q³)
/// within the field module's order limit.
pub const CONSTRUCTION_CAP: u64 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("parameter {q} exceeds the construction cap {cap}")]
    CapExceeded { q: u64, cap: u64 },
    #[error("construction failed self-verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construction {
    Singer,
    Bose,
    Ruzsa,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Construction::Singer => "singer",
            Construction::Bose => "bose",
            Construction::Ruzsa => "ruzsa",
        };
        f.write_str(name)
    }
}

impl Construction {
    pub fn parse(s: &str) -> Option<Construction> {
        match s {
            "singer" => Some(Construction::Singer),
            "bose" => Some(Construction::Bose),
            "ruzsa" => Some(Construction::Ruzsa),
            _ => None,
        }
    }
}

/// How a modular set was produced: which construction, its parameter, and
/// the generator (primitive element encoding, or primitive root mod p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub construction: Construction,
    pub q: u64,
    pub generator: u64,
}

/// Sorted distinct residues in [0, m) with all differences distinct mod m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularSidonSet {
    residues: Vec<u64>,
    modulus: u64,
    provenance: Provenance,
}

impl ModularSidonSet {
    pub(crate) fn from_verified_parts(
        residues: Vec<u64>,
        modulus: u64,
        provenance: Provenance,
    ) -> ModularSidonSet {
        debug_assert!(residues.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(is_modular_sidon(&residues, modulus), Ok(true));
        ModularSidonSet {
            residues,
            modulus,
            provenance,
        }
    }

    /// Like `from_verified_parts` but without the quadratic modular
    /// re-check in debug builds. For callers whose inputs carry the
    /// property structurally (dilating by a unit is an automorphism of
    /// the difference structure); the property suite exercises those
    /// paths against the full check on sampled cases.
    pub(crate) fn from_parts_trusted(
        residues: Vec<u64>,
        modulus: u64,
        provenance: Provenance,
    ) -> ModularSidonSet {
        debug_assert!(residues.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(residues.last().copied().unwrap_or(0) < modulus);
        ModularSidonSet {
            residues,
            modulus,
            provenance,
        }
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Reads the residues as plain integers; any modular Sidon set is an
    /// integer Sidon set, so this cannot fail.
    pub fn lift(&self) -> SidonSet {
        let signed: Vec<i64> = self.residues.iter().map(|&r| r as i64).collect();
        SidonSet::normalize(&signed).expect("modular Sidon sets lift to integer Sidon sets")
    }
}

fn check_cap(q: u64) -> Result<(), ConstructError> {
    if q > CONSTRUCTION_CAP {
        return Err(ConstructError::CapExceeded {
            q,
            cap: CONSTRUCTION_CAP,
        });
    }
    Ok(())
}

/// Singer difference set: q+1 residues mod q²+q+1 covering every nonzero
/// residue exactly once as a difference.
///
/// Take GF(q³) with primitive element g and the two-dimensional GF(q)-
/// subspace W spanned by {1, g}. Because g^{q²+q+1} generates exactly the
/// scalars GF(q)*, membership of g^r in W depends only on r mod q²+q+1,
/// so the first q²+q+1 powers of g suffice: the exponents whose power
/// lands in W are the set.
pub fn singer(q: u64) -> Result<ModularSidonSet, ConstructError> {
    prime_power(q).ok_or(ConstructError::NotPrimePower(q))?;
    check_cap(q)?;
    let m = q * q + q + 1;
    let field = Field::new(q * q * q)?;
    let g = field.primitive_element();
    let scalars = subfield_elements(&field, q);
    let mut w: HashSet<u64> = HashSet::with_capacity((q * q) as usize);
    for &a in &scalars {
        for &b in &scalars {
            w.insert(field.add(a, field.mul(b, g)));
        }
    }
    let mut residues = Vec::with_capacity(q as usize + 1);
    let mut acc = 1u64; // g^0
    for r in 0..m {
        if w.contains(&acc) {
            residues.push(r);
        }
        acc = field.mul(acc, g);
    }
    if residues.len() != q as usize + 1 {
        return Err(ConstructError::Verification(format!(
            "singer q={q}: expected {} residues, found {}",
            q + 1,
            residues.len()
        )));
    }
    if !is_perfect_difference_set(&residues, m) {
        return Err(ConstructError::Verification(format!(
            "singer q={q}: differences do not cover residues mod {m} exactly once"
        )));
    }
    Ok(ModularSidonSet::from_verified_parts(
        residues,
        m,
        Provenance {
            construction: Construction::Singer,
            q,
            generator: g,
        },
    ))
}

/// Bose set: q residues mod q²−1, the discrete logs i (base g, primitive
/// in GF(q²)) of the elements g^i lying in g + GF(q).
pub fn bose(q: u64) -> Result<ModularSidonSet, ConstructError> {
    prime_power(q).ok_or(ConstructError::NotPrimePower(q))?;
    check_cap(q)?;
    let m = q * q - 1;
    let field = Field::new(q * q)?;
    let g = field.primitive_element();
    let scalars: HashSet<u64> = subfield_elements(&field, q).into_iter().collect();
    let mut residues = Vec::with_capacity(q as usize);
    let mut acc = 1u64;
    for i in 0..m {
        if scalars.contains(&field.sub(acc, g)) {
            residues.push(i);
        }
        acc = field.mul(acc, g);
    }
    if residues.len() != q as usize {
        return Err(ConstructError::Verification(format!(
            "bose q={q}: expected {q} residues, found {}",
            residues.len()
        )));
    }
    if is_modular_sidon(&residues, m) != Ok(true) {
        return Err(ConstructError::Verification(format!(
            "bose q={q}: differences collide mod {m}"
        )));
    }
    Ok(ModularSidonSet::from_verified_parts(
        residues,
        m,
        Provenance {
            construction: Construction::Bose,
            q,
            generator: g,
        },
    ))
}

/// Ruzsa set: p−1 residues mod p(p−1). For a primitive root g mod p, the
/// i-th element solves x ≡ i (mod p−1) and x ≡ g^i (mod p); with
/// p ≡ 1 (mod p−1) and (p−1)² ≡ 1 (mod p) the CRT solution is simply
/// x = i·p + g^i·(p−1)² mod p(p−1).
pub fn ruzsa(p: u64) -> Result<ModularSidonSet, ConstructError> {
    if !is_prime(p) || p == 2 {
        return Err(ConstructError::NotOddPrime(p));
    }
    check_cap(p)?;
    let g = primitive_root(p);
    let m = p * (p - 1);
    let sq = (p - 1) * (p - 1);
    let mut residues: Vec<u64> = (1..p)
        .map(|i| (i * p + mod_pow(g, i, p) * sq) % m)
        .collect();
    residues.sort_unstable();
    if residues.windows(2).any(|w| w[0] == w[1]) || residues.len() != p as usize - 1 {
        return Err(ConstructError::Verification(format!(
            "ruzsa p={p}: residues are not distinct"
        )));
    }
    if is_modular_sidon(&residues, m) != Ok(true) {
        return Err(ConstructError::Verification(format!(
            "ruzsa p={p}: differences collide mod {m}"
        )));
    }
    Ok(ModularSidonSet::from_verified_parts(
        residues,
        m,
        Provenance {
            construction: Construction::Ruzsa,
            q: p,
            generator: g,
        },
    ))
}

/// Runs the named construction with its parameter.
pub fn construct(c: Construction, q: u64) -> Result<ModularSidonSet, ConstructError> {
    match c {
        Construction::Singer => singer(q),
        Construction::Bose => bose(q),
        Construction::Ruzsa => ruzsa(q),
    }
}

/// The elements of the subfield GF(q) inside a larger field: zero plus the
/// powers of h^{(Q-1)/(q-1)} for primitive h, the unique subgroup of order
/// q−1.
fn subfield_elements(field: &Field, q: u64) -> Vec<u64> {
    let big_order = field.order() - 1;
    debug_assert_eq!(big_order % (q - 1), 0);
    let u = field.pow(field.primitive_element(), big_order / (q - 1));
    let mut out = vec![0u64, 1];
    let mut acc = u;
    while acc != 1 {
        out.push(acc);
        acc = field.mul(acc, u);
    }
    debug_assert_eq!(out.len() as u64, q);
    out
}

/// Every nonzero residue mod m occurs exactly once among ordered pairwise
/// differences.
fn is_perfect_difference_set(residues: &[u64], m: u64) -> bool {
    let mut counts = vec![0u32; m as usize];
    for &a in residues {
        for &b in residues {
            if a != b {
                let d = (a + m - b) % m;
                counts[d as usize] += 1;
            }
        }
    }
    counts[0] == 0 && counts[1..].iter().all(|&c| c == 1)
}
