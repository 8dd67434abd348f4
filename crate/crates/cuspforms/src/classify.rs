//! Cusp cross-section classification: which flat 3- and 4-manifolds (and
//! which members of several parametric families) appear in the
//! commensurability class of arithmetic hyperbolic manifolds attached to a
//! form with given invariants.
//!
//! All predicates operate on [`FormInvariants`] only. Since the Hasse
//! invariant is `+1` off the stored negative set, conditions quantified over
//! all primes in a residue class reduce to finite scans of that set; the one
//! genuinely infinite quantifier (local squareness of the discriminant at
//! all primes in a residue class) is decided by the conductor criterion.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::form::FormInvariants;
use crate::rational::{is_prime, SquareClass};
use crate::symbols::{is_square_local, Place};

/// Condition class of a table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableCondition {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "MOD3")]
    Mod3,
    #[serde(rename = "MOD4")]
    Mod4,
    #[serde(rename = "A4")]
    A4,
}

/// One row of the embedded flat-manifold tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatManifoldRecord {
    pub id: String,
    pub dimension: u32,
    pub holonomy_name: String,
    pub holonomy_order: u32,
    pub holonomy_exponent: u32,
    pub b1: u32,
    pub condition: TableCondition,
}

static MANIFEST: OnceLock<Vec<FlatManifoldRecord>> = OnceLock::new();

/// The embedded manifest of all orientable flat 3- and 4-manifolds.
pub fn manifest() -> &'static [FlatManifoldRecord] {
    MANIFEST.get_or_init(|| {
        serde_json::from_str(include_str!("manifest_v1.json"))
            .expect("embedded manifest parses")
    })
}

pub fn find_record(id: &str) -> Result<&'static FlatManifoldRecord, Error> {
    manifest()
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::UnknownRecord(id.to_owned()))
}

/// Outcome of a classification predicate. `Appears`/`DoesNotAppear` come
/// from if-and-only-if results; `NotObstructed` is the weaker outcome of
/// necessary conditions that all passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Appears,
    DoesNotAppear,
    NotObstructed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: Outcome,
    pub reasons: Vec<String>,
}

impl Verdict {
    fn new(verdict: Outcome, reasons: Vec<String>) -> Self {
        Verdict { verdict, reasons }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.verdict, self.reasons.join("; "))
    }
}

fn residue_is(p: &BigInt, modulus: u64, residue: u64) -> bool {
    let m = BigInt::from(modulus);
    let r = ((p % &m) + &m) % &m;
    r == BigInt::from(residue)
}

fn expect_signature(q: &FormInvariants, lorentz_rank: usize) -> Result<(), Error> {
    let (r, s) = q.signature();
    if s != 1 || r + 1 != lorentz_rank {
        return Err(Error::WrongSignature(format!(
            "expected signature ({}, 1), got ({r}, {s})",
            lorentz_rank - 1
        )));
    }
    Ok(())
}

/// Decides whether a flat 3-manifold appears as a cusp cross-section in the
/// commensurability class of `q` (signature `(4,1)`): no condition for the
/// 2-group rows, and `eps_p(q) = 1` for all `p = 1 mod 3` (resp. mod 4) for
/// the rows with 3-torsion (resp. 4-torsion) holonomy.
pub fn classify_3d(record: &FlatManifoldRecord, q: &FormInvariants) -> Result<Verdict, Error> {
    if record.dimension != 3 {
        return Err(Error::UnknownRecord(format!(
            "{} is not a flat 3-manifold record",
            record.id
        )));
    }
    expect_signature(q, 5)?;
    let residue_violations = |modulus: u64| -> Vec<String> {
        q.finite_hasse_negative()
            .filter(|p| residue_is(p, modulus, 1))
            .map(|p| format!("eps_{p}(q) = -1 with {p} = 1 mod {modulus}"))
            .collect()
    };
    let (modulus, label) = match record.condition {
        TableCondition::None => {
            return Ok(Verdict::new(
                Outcome::Appears,
                vec![format!(
                    "holonomy {} imposes no condition on q",
                    record.holonomy_name
                )],
            ));
        }
        TableCondition::Mod3 => (3, "eps_p(q) = 1 for all p = 1 mod 3"),
        TableCondition::Mod4 => (4, "eps_p(q) = 1 for all p = 1 mod 4"),
        TableCondition::A4 => {
            return Err(Error::UnknownRecord(format!(
                "{} carries a condition that does not occur in dimension 3",
                record.id
            )));
        }
    };
    let violations = residue_violations(modulus);
    if violations.is_empty() {
        Ok(Verdict::new(
            Outcome::Appears,
            vec![format!("condition holds: {label}")],
        ))
    } else {
        Ok(Verdict::new(Outcome::DoesNotAppear, violations))
    }
}

/// Decides whether a flat 4-manifold appears in the class of `q` (signature
/// `(5,1)`). The residue conditions now apply only at primes where `-d(q)`
/// is a local square, and the `A4` rows drop the residue restriction.
pub fn classify_4d(record: &FlatManifoldRecord, q: &FormInvariants) -> Result<Verdict, Error> {
    if record.dimension != 4 {
        return Err(Error::UnknownRecord(format!(
            "{} is not a flat 4-manifold record",
            record.id
        )));
    }
    expect_signature(q, 6)?;
    let minus_d = -q.disc().to_rational();
    let violations = |modulus: Option<u64>| -> Result<Vec<String>, Error> {
        let mut out = Vec::new();
        for p in q.finite_hasse_negative() {
            if let Some(m) = modulus {
                if !residue_is(p, m, 1) {
                    continue;
                }
            }
            if is_square_local(&minus_d, &Place::Finite(p.clone()))? {
                let residue_note = modulus
                    .map(|m| format!(" and {p} = 1 mod {m}"))
                    .unwrap_or_default();
                out.push(format!(
                    "eps_{p}(q) = -1 with -d(q) = {minus_d} a square in Q_{p}{residue_note}"
                ));
            }
        }
        Ok(out)
    };
    let (modulus, label) = match record.condition {
        TableCondition::None => {
            return Ok(Verdict::new(
                Outcome::Appears,
                vec![format!(
                    "holonomy {} imposes no condition on q",
                    record.holonomy_name
                )],
            ));
        }
        TableCondition::Mod3 => (
            Some(3),
            "eps_p(q) = 1 whenever p = 1 mod 3 and -d(q) is a square in Q_p",
        ),
        TableCondition::Mod4 => (
            Some(4),
            "eps_p(q) = 1 whenever p = 1 mod 4 and -d(q) is a square in Q_p",
        ),
        TableCondition::A4 => (
            None,
            "eps_p(q) = 1 whenever -d(q) is a square in Q_p",
        ),
    };
    let violations = violations(modulus)?;
    if violations.is_empty() {
        Ok(Verdict::new(
            Outcome::Appears,
            vec![format!("condition holds: {label}")],
        ))
    } else {
        Ok(Verdict::new(Outcome::DoesNotAppear, violations))
    }
}

/// Whether `d` is a square in `Q_p` for every prime `p = 1 mod modulus`.
///
/// Decided by the conductor criterion: with `d0` the squarefree part of `d`,
/// the quadratic field discriminant is `D = d0` if `d0 = 1 mod 4` and
/// `4 d0` otherwise, and the answer is yes iff `|D|` divides the modulus.
pub fn square_for_all_residue_primes(d: &SquareClass, modulus: u64) -> Result<bool, Error> {
    if modulus == 0 {
        return Err(Error::BadParameters("modulus must be >= 1".into()));
    }
    let d0 = d.representative();
    let field_disc = if residue_is(d0, 4, 1) {
        d0.clone()
    } else {
        d0 * BigInt::from(4)
    };
    Ok((BigInt::from(modulus) % field_disc.abs()) == BigInt::from(0))
}

/// Necessary conditions for a flat manifold with odd-order holonomy of
/// exponent `e` and first Betti number `b1 <= 2` to appear in the class of
/// `q`, evaluated at the primes `p = 1 mod 4e`:
/// `b1 = 0` forces `d(q)` square and `eps_p = 1`; `b1 = 1` forces
/// `eps_p = 1`; `b1 = 2` forces `eps_p = 1` whenever `d(q)` is a square.
pub fn odd_holonomy_obstruction(
    b1: u32,
    exponent: u64,
    q: &FormInvariants,
) -> Result<Verdict, Error> {
    if exponent < 3 || exponent % 2 == 0 {
        return Err(Error::BadParameters(format!(
            "holonomy exponent must be odd and >= 3, got {exponent}"
        )));
    }
    if b1 > 2 {
        return Err(Error::BadParameters(format!(
            "obstruction applies to b1 <= 2, got {b1}"
        )));
    }
    let (r, s) = q.signature();
    if s != 1 || r < 4 {
        return Err(Error::BadParameters(format!(
            "expected signature (n+1, 1) with n >= 3, got ({r}, {s})"
        )));
    }
    let modulus = 4 * exponent;
    let mut failures = Vec::new();

    if b1 == 0 && !square_for_all_residue_primes(q.disc(), modulus)? {
        failures.push(format!(
            "d(q) = {} is not a square in Q_p for some prime p = 1 mod {modulus}",
            q.disc()
        ));
    }
    for p in q.finite_hasse_negative() {
        if !residue_is(p, modulus, 1) {
            continue;
        }
        match b1 {
            0 | 1 => failures.push(format!("eps_{p}(q) = -1 with {p} = 1 mod {modulus}")),
            2 => {
                if is_square_local(&q.disc().to_rational(), &Place::Finite(p.clone()))? {
                    failures.push(format!(
                        "eps_{p}(q) = -1 with {p} = 1 mod {modulus} and d(q) a square in Q_{p}"
                    ));
                }
            }
            _ => unreachable!(),
        }
    }
    if failures.is_empty() {
        Ok(Verdict::new(
            Outcome::NotObstructed,
            vec![format!(
                "all necessary conditions hold at primes p = 1 mod {modulus} (b1 = {b1})"
            )],
        ))
    } else {
        Ok(Verdict::new(Outcome::DoesNotAppear, failures))
    }
}

/// Full classification for flat `n`-manifolds with holonomy `(C_3)^k` and
/// first Betti number zero: such a manifold appears in the class of `q` iff
/// `d(q)` is `-1` (for `n = 0 mod 4`) or `-3` (for `n = 2 mod 4`) and
/// `eps_p(q) = 1` at every prime `p = 1 mod 3`.
pub fn c3k_b1zero_classify(n: u64, q: &FormInvariants) -> Result<Verdict, Error> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::BadParameters(format!(
            "family requires even dimension n >= 4, got {n}"
        )));
    }
    expect_signature(q, n as usize + 2).map_err(|e| Error::BadParameters(e.to_string()))?;
    let expected = if n % 4 == 0 {
        SquareClass::minus_one()
    } else {
        SquareClass::from_squarefree(-3).expect("-3 is squarefree")
    };
    let mut failures = Vec::new();
    if q.disc() != &expected {
        failures.push(format!(
            "d(q) = {} but the family forces d(q) = {expected} in dimension {n}",
            q.disc()
        ));
    }
    for p in q.finite_hasse_negative() {
        if residue_is(p, 3, 1) {
            failures.push(format!("eps_{p}(q) = -1 with {p} = 1 mod 3"));
        }
    }
    if failures.is_empty() {
        Ok(Verdict::new(
            Outcome::Appears,
            vec![format!(
                "d(q) = {expected} and eps_p(q) = 1 at every prime p = 1 mod 3"
            )],
        ))
    } else {
        Ok(Verdict::new(Outcome::DoesNotAppear, failures))
    }
}

/// Discriminant obstruction for flat `n`-manifolds with holonomy `(C_p)^k`
/// and first Betti number zero: membership in the class of `q` forces
/// `d(q) = -1` when `n = 0 mod 2(p-1)` and `d(q) = -p` when
/// `n = p-1 mod 2(p-1)`.
pub fn cpk_b1zero_disc_obstruction(
    p: u64,
    n: u64,
    q: &FormInvariants,
) -> Result<Verdict, Error> {
    if p < 3 || p % 2 == 0 || !is_prime(&BigInt::from(p)) {
        return Err(Error::NotOddPrime(p.to_string()));
    }
    if n == 0 || n % (p - 1) != 0 {
        return Err(Error::BadParameters(format!(
            "dimension {n} is not a positive multiple of p - 1 = {}",
            p - 1
        )));
    }
    expect_signature(q, n as usize + 2).map_err(|e| Error::BadParameters(e.to_string()))?;
    let expected = if n % (2 * (p - 1)) == 0 {
        SquareClass::minus_one()
    } else {
        SquareClass::from_squarefree(-(p as i64)).expect("-p is squarefree")
    };
    if q.disc() == &expected {
        Ok(Verdict::new(
            Outcome::NotObstructed,
            vec![format!("d(q) = {expected} as the family requires in dimension {n}")],
        ))
    } else {
        Ok(Verdict::new(
            Outcome::DoesNotAppear,
            vec![format!(
                "d(q) = {} but the family forces d(q) = {expected} in dimension {n}",
                q.disc()
            )],
        ))
    }
}

/// A family of flat manifolds with a known set of admissible discriminant
/// classes, used for the incompatibility predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CuspFamily {
    /// Flat manifolds with holonomy `(C_p)^k` and first Betti number zero;
    /// admissible classes `{-1, -p}`.
    PrimePowerB1Zero { p: u64 },
    /// Product of the fixed `(C_p)^2` manifold of dimension `(p-1)(p+2)`
    /// (the smallest with discriminant class `-p`) with a varying
    /// `(C_3)^k`, `b1 = 0` factor; admissible classes `{-p, -3p}`.
    ProductWithC3Part { p: u64 },
    /// A family with an explicitly known class set, available from the
    /// stated minimum dimension.
    Explicit {
        classes: BTreeSet<SquareClass>,
        min_dim: u64,
    },
}

impl CuspFamily {
    /// The admissible discriminant classes of commensurability classes that
    /// can contain a member of the family, provided members of dimension `n`
    /// exist; errors otherwise.
    pub fn admissible_discriminants(&self, n: u64) -> Result<BTreeSet<SquareClass>, Error> {
        match self {
            CuspFamily::PrimePowerB1Zero { p } => {
                let p = *p;
                if p < 3 || p % 2 == 0 || !is_prime(&BigInt::from(p)) {
                    return Err(Error::NotOddPrime(p.to_string()));
                }
                // b1 = 0 examples exist in dimensions p^2 - 1 + k(p - 1)
                if n < p * p - 1 || n % (p - 1) != 0 {
                    return Err(Error::UnsupportedFamily(format!(
                        "no (C_{p})^k manifolds with b1 = 0 in dimension {n}"
                    )));
                }
                Ok([
                    SquareClass::minus_one(),
                    SquareClass::from_squarefree(-(p as i64)).expect("-p squarefree"),
                ]
                .into_iter()
                .collect())
            }
            CuspFamily::ProductWithC3Part { p } => {
                let p = *p;
                if p < 3 || p % 2 == 0 || !is_prime(&BigInt::from(p)) {
                    return Err(Error::NotOddPrime(p.to_string()));
                }
                let block_dim = (p - 1) * (p + 2);
                if n < block_dim + 8 || (n - block_dim) % 2 != 0 {
                    return Err(Error::UnsupportedFamily(format!(
                        "no product manifolds with the fixed (C_{p})^2 block in dimension {n}"
                    )));
                }
                // d(q) = -d1 d2 with d1 = -p fixed and d2 in {-1, -3}
                Ok([-(p as i64), -3 * (p as i64)]
                    .into_iter()
                    .map(|c| SquareClass::from_squarefree(c).expect("squarefree"))
                    .collect())
            }
            CuspFamily::Explicit { classes, min_dim } => {
                if n < *min_dim {
                    return Err(Error::UnsupportedFamily(format!(
                        "family has no members below dimension {min_dim}"
                    )));
                }
                Ok(classes.clone())
            }
        }
    }
}

/// Whether two families can never share a commensurability class in
/// dimension `n`: their admissible discriminant-class sets are disjoint.
pub fn incompatible_pair(a: &CuspFamily, b: &CuspFamily, n: u64) -> Result<bool, Error> {
    let ca = a.admissible_discriminants(n)?;
    let cb = b.admissible_discriminants(n)?;
    Ok(ca.intersection(&cb).next().is_none())
}

/// Sufficiency predicate: a holonomy representation with at least three
/// odd-dimensional rational blocks puts the manifold in every
/// commensurability class of the matching dimension.
pub fn three_odd_blocks_guarantee(block_ranks: &[usize]) -> Result<bool, Error> {
    if block_ranks.is_empty() {
        return Err(Error::EmptyList);
    }
    if block_ranks.contains(&0) {
        return Err(Error::BadParameters("block ranks must be positive".into()));
    }
    Ok(block_ranks.iter().filter(|r| *r % 2 == 1).count() >= 3)
}
