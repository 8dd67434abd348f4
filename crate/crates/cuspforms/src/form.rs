//! Rational quadratic forms: diagonal and Gram representations, the complete
//! invariant triple (signature, discriminant class, Hasse set), equivalence
//! and projective-equivalence deciders, direct-sum and scaling calculus,
//! hyperbolic splitting and the parabolic block embedding.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::matrix::{bilinear, Matrix};
use crate::rational::{square_class, Rational, SquareClass};
use crate::symbols::{hilbert_symbol, is_square_local, symbol_support, Place};

/// A nondegenerate diagonal form `<a_1, ..., a_n>` with nonzero entries.
#[derive(Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    entries: Vec<Rational>,
}

impl DiagonalForm {
    pub fn new(entries: Vec<Rational>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::WrongDimension("diagonal form must have rank >= 1".into()));
        }
        if entries.iter().any(Rational::is_zero) {
            return Err(Error::ZeroEntry);
        }
        Ok(DiagonalForm { entries })
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self, Error> {
        DiagonalForm::new(entries.iter().map(|&e| Rational::from_int(e)).collect())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// Entrywise rescaling by a nonzero rational.
    pub fn scale(&self, m: &Rational) -> Result<DiagonalForm, Error> {
        if m.is_zero() {
            return Err(Error::ZeroInput);
        }
        DiagonalForm::new(self.entries.iter().map(|e| e * m).collect())
    }

    /// Concatenation `f (+) g`.
    pub fn direct_sum(&self, other: &DiagonalForm) -> DiagonalForm {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        DiagonalForm { entries }
    }

    pub fn to_gram(&self) -> GramMatrix {
        GramMatrix(Matrix::diagonal(&self.entries))
    }

    /// Signature, discriminant class and Hasse set of the form.
    ///
    /// The Hasse set is computed over the finite superset of places dividing
    /// the entries (plus 2 and the real place); the pairwise symbol product
    /// is `+1` everywhere else.
    pub fn invariants(&self) -> Result<FormInvariants, Error> {
        let r = self.entries.iter().filter(|e| e.is_positive()).count();
        let s = self.rank() - r;

        let mut disc = Rational::one();
        for e in &self.entries {
            disc = disc * e.clone();
        }
        let disc = square_class(&disc)?;

        let mut support: BTreeSet<Place> = BTreeSet::new();
        for e in &self.entries {
            support.extend(symbol_support(e, &Rational::one())?);
        }

        let mut hasse_negative = BTreeSet::new();
        for v in support {
            if self.epsilon_at(&v)? < 0 {
                hasse_negative.insert(v);
            }
        }
        FormInvariants::new(r, s, disc, hasse_negative)
    }

    /// The Hasse-Witt invariant at one place: the product of the pairwise
    /// Hilbert symbols of the diagonal entries.
    pub fn epsilon_at(&self, v: &Place) -> Result<i32, Error> {
        let n = self.rank();
        let mut eps = 1;
        for i in 0..n {
            for j in i + 1..n {
                eps *= hilbert_symbol(&self.entries[i], &self.entries[j], v)?;
            }
        }
        Ok(eps)
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{self}>")
    }
}

impl FromStr for DiagonalForm {
    type Err = Error;

    /// Parses the comma-separated grammar, e.g. `"3,1,1,1,-1"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let entries = s
            .split(',')
            .map(|part| part.parse())
            .collect::<Result<Vec<Rational>, Error>>()?;
        DiagonalForm::new(entries)
    }
}

impl Serialize for DiagonalForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DiagonalForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// A symmetric matrix presenting a quadratic form `q(v) = v^T Q v`.
#[derive(Clone, PartialEq, Eq)]
pub struct GramMatrix(Matrix);

impl GramMatrix {
    pub fn new(m: Matrix) -> Result<Self, Error> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::WrongDimension("Gram matrix must be square and nonempty".into()));
        }
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(GramMatrix(m))
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        GramMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.rows()
    }

    pub fn evaluate(&self, v: &[Rational]) -> Rational {
        bilinear(&self.0, v, v)
    }

    /// Symmetric congruence diagonalization: returns `(d, c)` with
    /// `c^T * Q * c = diag(d)` exactly and `c` invertible.
    ///
    /// Pivot rule: the first nonzero diagonal entry of the remaining block is
    /// swapped in. When the whole remaining diagonal vanishes, the first
    /// nonzero off-diagonal pair is turned into a `(+1, -1)` pair by the
    /// explicit two-column hyperbolic transformation, and elimination
    /// continues.
    pub fn diagonalize(&self) -> Result<(DiagonalForm, Matrix), Error> {
        let n = self.rank();
        let mut g = self.0.clone();
        let mut c = Matrix::identity(n);
        let mut k = 0;
        while k < n {
            if g[(k, k)].is_zero() {
                if let Some(l) = (k + 1..n).find(|&l| !g[(l, l)].is_zero()) {
                    let t = swap_columns(n, k, l);
                    g = g.congruent(&t);
                    c = c.mul(&t);
                } else {
                    let pair = (k..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .find(|&(i, j)| !g[(i, j)].is_zero());
                    let (i, j) = match pair {
                        Some(p) => p,
                        None => return Err(Error::Degenerate),
                    };
                    // Send (e_i, e_j) to (e_i/2 + e_j/a, -e_i/2 + e_j/a),
                    // which takes the off-diagonal block [[0,a],[a,0]] to
                    // diag(1,-1).
                    let a = g[(i, j)].clone();
                    let half = Rational::new(1, 2).unwrap();
                    let inv_a = a.recip()?;
                    let mut t = Matrix::identity(n);
                    t[(i, i)] = half.clone();
                    t[(i, j)] = -half;
                    t[(j, i)] = inv_a.clone();
                    t[(j, j)] = inv_a;
                    g = g.congruent(&t);
                    c = c.mul(&t);
                    continue;
                }
            }
            let pivot = g[(k, k)].clone();
            let mut t = Matrix::identity(n);
            for j in k + 1..n {
                if !g[(k, j)].is_zero() {
                    t[(k, j)] = -(g[(k, j)].clone() / pivot.clone());
                }
            }
            g = g.congruent(&t);
            c = c.mul(&t);
            k += 1;
        }
        let entries: Vec<Rational> = (0..n).map(|i| g[(i, i)].clone()).collect();
        debug_assert_eq!(self.0.congruent(&c), Matrix::diagonal(&entries));
        Ok((DiagonalForm::new(entries)?, c))
    }

    pub fn invariants(&self) -> Result<FormInvariants, Error> {
        self.diagonalize()?.0.invariants()
    }
}

impl fmt::Debug for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        matrix_rows(&self.0).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GramMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Rational>>::deserialize(deserializer)?;
        GramMatrix::from_rows(rows).map_err(|e| D::Error::custom(format!("{e}")))
    }
}

pub(crate) fn matrix_rows(m: &Matrix) -> Vec<Vec<Rational>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect())
        .collect()
}

fn swap_columns(n: usize, a: usize, b: usize) -> Matrix {
    let mut t = Matrix::identity(n);
    t[(a, a)] = Rational::zero();
    t[(b, b)] = Rational::zero();
    t[(a, b)] = Rational::one();
    t[(b, a)] = Rational::one();
    t
}

/// The complete rational-equivalence datum of a nondegenerate form: rank,
/// signature `(r, s)`, discriminant square class, and the finite set of
/// places where the Hasse-Witt invariant is `-1`.
///
/// `epsilon_v = +1` at every place not listed; this makes the "almost all"
/// clause of the classification structural.
#[derive(Clone, PartialEq, Eq)]
pub struct FormInvariants {
    positives: usize,
    negatives: usize,
    disc: SquareClass,
    hasse_negative: BTreeSet<Place>,
}

impl FormInvariants {
    /// Validates the structural coherence conditions:
    /// the discriminant sign is `(-1)^s`, the real place lies in the Hasse
    /// set exactly when `(-1)^{s(s-1)/2} = -1`, and the set has even size
    /// (the global product formula).
    pub fn new(
        positives: usize,
        negatives: usize,
        disc: SquareClass,
        hasse_negative: BTreeSet<Place>,
    ) -> Result<Self, Error> {
        if positives + negatives == 0 {
            return Err(Error::WrongDimension("rank must be >= 1".into()));
        }
        let disc_sign_ok = if negatives % 2 == 0 {
            disc.is_positive()
        } else {
            !disc.is_positive()
        };
        if !disc_sign_ok {
            return Err(Error::InvalidTarget(format!(
                "discriminant {disc} has the wrong sign for signature ({positives},{negatives})"
            )));
        }
        let eps_inf_negative = (negatives * negatives.saturating_sub(1) / 2) % 2 == 1;
        if hasse_negative.contains(&Place::Infinity) != eps_inf_negative {
            return Err(Error::InvalidTarget(format!(
                "real place must be in the Hasse set iff (-1)^(s(s-1)/2) = -1 for s = {negatives}"
            )));
        }
        if hasse_negative.len() % 2 != 0 {
            return Err(Error::InvalidTarget(
                "Hasse set must have even cardinality (product formula)".into(),
            ));
        }
        Ok(FormInvariants {
            positives,
            negatives,
            disc,
            hasse_negative,
        })
    }

    /// Builds invariants from the finite part of the Hasse set, inserting the
    /// real place when the signature forces it.
    pub fn from_finite_hasse(
        positives: usize,
        negatives: usize,
        disc: SquareClass,
        finite_hasse: BTreeSet<Place>,
    ) -> Result<Self, Error> {
        let mut hasse = finite_hasse;
        if hasse.contains(&Place::Infinity) {
            return Err(Error::InvalidTarget(
                "finite Hasse set must not contain the real place".into(),
            ));
        }
        if (negatives * negatives.saturating_sub(1) / 2) % 2 == 1 {
            hasse.insert(Place::Infinity);
        }
        FormInvariants::new(positives, negatives, disc, hasse)
    }

    pub fn rank(&self) -> usize {
        self.positives + self.negatives
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.positives, self.negatives)
    }

    pub fn disc(&self) -> &SquareClass {
        &self.disc
    }

    pub fn hasse_negative(&self) -> &BTreeSet<Place> {
        &self.hasse_negative
    }

    pub fn finite_hasse_negative(&self) -> impl Iterator<Item = &BigInt> {
        self.hasse_negative.iter().filter_map(|v| v.prime())
    }

    /// The Hasse-Witt invariant at `v`.
    pub fn epsilon(&self, v: &Place) -> i32 {
        if self.hasse_negative.contains(v) {
            -1
        } else {
            1
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.negatives == 0
    }
}

impl fmt::Debug for FormInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let places: Vec<String> = self.hasse_negative.iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "rank {} sig ({},{}) d={} hasse_neg {{{}}}",
            self.rank(),
            self.positives,
            self.negatives,
            self.disc,
            places.join(",")
        )
    }
}

impl Serialize for FormInvariants {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FormInvariants", 4)?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("signature", &[self.positives, self.negatives])?;
        st.serialize_field("disc", &self.disc)?;
        let places: Vec<String> = self.hasse_negative.iter().map(|v| v.to_string()).collect();
        st.serialize_field("hasse_neg", &places)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FormInvariants {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rank: usize,
            signature: [usize; 2],
            disc: SquareClass,
            hasse_neg: Vec<Place>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.rank != raw.signature[0] + raw.signature[1] {
            return Err(D::Error::custom("rank does not match signature"));
        }
        FormInvariants::new(
            raw.signature[0],
            raw.signature[1],
            raw.disc,
            raw.hasse_neg.into_iter().collect(),
        )
        .map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// Invariants of the direct sum: ranks and signatures add, discriminants
/// multiply, and `eps_v(f+g) = eps_v(f) eps_v(g) (d(f), d(g))_v`.
pub fn sum_invariants(f: &FormInvariants, g: &FormInvariants) -> FormInvariants {
    let disc = f.disc.mul(&g.disc);
    let mut candidates: BTreeSet<Place> = f.hasse_negative.union(&g.hasse_negative).cloned().collect();
    candidates.extend(
        symbol_support(&f.disc.to_rational(), &g.disc.to_rational())
            .expect("square class representatives are nonzero and factorable"),
    );
    let mut hasse = BTreeSet::new();
    for v in candidates {
        let cross = hilbert_symbol(&f.disc.to_rational(), &g.disc.to_rational(), &v)
            .expect("nonzero arguments");
        if f.epsilon(&v) * g.epsilon(&v) * cross < 0 {
            hasse.insert(v);
        }
    }
    FormInvariants::new(
        f.positives + g.positives,
        f.negatives + g.negatives,
        disc,
        hasse,
    )
    .expect("sum of coherent invariants is coherent")
}

/// Invariants of `m * q` for positive `m`, by the rank mod 4 scaling rule:
/// the Hasse invariant picks up `(m, -d)_v`, `(m, -1)_v` or `(m, d)_v` for
/// rank 2, 3, 0 mod 4 respectively, and is unchanged for rank 1 mod 4.
pub fn scale_invariants(f: &FormInvariants, m: &Rational) -> Result<FormInvariants, Error> {
    if !m.is_positive() {
        return Err(Error::NonPositiveScalar);
    }
    let n = f.rank();
    let disc = if n % 2 == 1 {
        f.disc.mul(&square_class(m)?)
    } else {
        f.disc.clone()
    };
    let twist: Option<Rational> = match n % 4 {
        1 => None,
        2 => Some(-f.disc.to_rational()),
        3 => Some(-Rational::one()),
        0 => Some(f.disc.to_rational()),
        _ => unreachable!(),
    };
    let hasse = match twist {
        None => f.hasse_negative.clone(),
        Some(t) => {
            let mut candidates = f.hasse_negative.clone();
            candidates.extend(symbol_support(m, &t)?);
            let mut out = BTreeSet::new();
            for v in candidates {
                if f.epsilon(&v) * hilbert_symbol(m, &t, &v)? < 0 {
                    out.insert(v);
                }
            }
            out
        }
    };
    FormInvariants::new(f.positives, f.negatives, disc, hasse)
}

/// Rational equivalence: by completeness of the invariant triple, exactly
/// coincidence of rank, signature, discriminant class and Hasse set.
pub fn is_equivalent(f: &FormInvariants, g: &FormInvariants) -> bool {
    f == g
}

/// Projective equivalence (equivalence up to positive rational scaling).
///
/// For odd rank the signatures must agree and the twisted invariant
/// `(d, (-1)^((n-1)/2))_v * eps_v` must coincide at every place. For even
/// rank the signatures and discriminants must agree and the Hasse invariants
/// must coincide at every place where `(-1)^(n/2) * d` is a local square.
pub fn is_proj_equivalent(f: &FormInvariants, g: &FormInvariants) -> Result<bool, Error> {
    if f.rank() != g.rank() {
        return Err(Error::RankMismatch(f.rank(), g.rank()));
    }
    if f.signature() != g.signature() {
        return Ok(false);
    }
    let n = f.rank();
    if n % 2 == 1 {
        let twisted = |h: &FormInvariants| -> Result<BTreeSet<Place>, Error> {
            if ((n - 1) / 2) % 2 == 0 {
                return Ok(h.hasse_negative.clone());
            }
            let d = h.disc.to_rational();
            let minus_one = -Rational::one();
            let mut out = h.hasse_negative.clone();
            for v in symbol_support(&d, &minus_one)? {
                if hilbert_symbol(&d, &minus_one, &v)? < 0 {
                    // toggle membership
                    if !out.remove(&v) {
                        out.insert(v);
                    }
                }
            }
            Ok(out)
        };
        Ok(twisted(f)? == twisted(g)?)
    } else {
        if f.disc != g.disc {
            return Ok(false);
        }
        let sign = if (n / 2) % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        let test_arg = sign * f.disc.to_rational();
        for v in f.hasse_negative.symmetric_difference(&g.hasse_negative) {
            if is_square_local(&test_arg, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Given `q` of signature `(n+1, 1)` with `n >= 3`, the invariants of the
/// positive-definite `f` with `q = f (+) <1,-1>`: rank drops by two,
/// `d(f) = -d(q)`, and `eps_v(f) = eps_v(q) * (d(f), -1)_v` (inverting the
/// direct-sum rule against the hyperbolic plane).
pub fn cusp_complement_invariants(q: &FormInvariants) -> Result<FormInvariants, Error> {
    let (r, s) = q.signature();
    if s != 1 || r < 4 {
        return Err(Error::WrongSignature(format!(
            "expected signature (n+1, 1) with n >= 3, got ({r},{s})"
        )));
    }
    let disc_f = q.disc.neg();
    let df = disc_f.to_rational();
    let minus_one = -Rational::one();
    let mut candidates = q.hasse_negative.clone();
    candidates.extend(symbol_support(&df, &minus_one)?);
    let mut hasse = BTreeSet::new();
    for v in candidates {
        if q.epsilon(&v) * hilbert_symbol(&df, &minus_one, &v)? < 0 {
            hasse.insert(v);
        }
    }
    FormInvariants::new(r - 1, 0, disc_f, hasse)
}

/// The invariants of the hyperbolic plane `<1, -1>`.
pub fn hyperbolic_plane_invariants() -> FormInvariants {
    DiagonalForm::from_ints(&[1, -1])
        .unwrap()
        .invariants()
        .expect("hyperbolic plane invariants")
}

/// Splits a rank `2n` form that vanishes on an `n`-dimensional subspace into
/// `diag(1,...,1,-1,...,-1)`, returning the transition matrix. Uses the two
/// explicit block transformations: first clear the lower-right block with
/// `[[I, -(B A^-1)^T / 2], [0, I]]`, then map the off-diagonal pairing to
/// `diag(I, -I)` with `[[I/2, -I/2], [A^-1, A^-1]]`.
pub fn split_hyperbolic(g: &GramMatrix, iso_basis: &[Vec<Rational>]) -> Result<Matrix, Error> {
    let dim = g.rank();
    let n = iso_basis.len();
    if n == 0 || dim != 2 * n {
        return Err(Error::WrongDimension(format!(
            "form of rank {dim} needs an isotropic basis of {} vectors, got {n}",
            dim / 2
        )));
    }
    if iso_basis.iter().any(|v| v.len() != dim) {
        return Err(Error::WrongDimension("isotropic vectors have the wrong length".into()));
    }
    if g.matrix().determinant().is_zero() {
        return Err(Error::Degenerate);
    }
    for (i, v) in iso_basis.iter().enumerate() {
        for (j, w) in iso_basis.iter().enumerate().skip(i) {
            let val = bilinear(g.matrix(), v, w);
            if !val.is_zero() {
                return Err(Error::NotIsotropic(format!(
                    "pairing of basis vectors {i} and {j} is {val}, not 0"
                )));
            }
        }
    }

    // Complete the isotropic basis with standard vectors, greedily keeping
    // linear independence.
    let mut columns: Vec<Vec<Rational>> = iso_basis.to_vec();
    for j in 0..dim {
        if columns.len() == dim {
            break;
        }
        let mut e = vec![Rational::zero(); dim];
        e[j] = Rational::one();
        let mut trial = columns.clone();
        trial.push(e);
        let trial_matrix = Matrix::from_fn(dim, trial.len(), |r, c| trial[c][r].clone());
        if trial_matrix.nullspace().is_empty() {
            columns = trial;
        }
    }
    if columns.len() != dim {
        return Err(Error::WrongDimension(
            "isotropic vectors are not linearly independent".into(),
        ));
    }
    let p = Matrix::from_fn(dim, dim, |r, c| columns[c][r].clone());
    let m = g.matrix().congruent(&p);

    let a = Matrix::from_fn(n, n, |i, j| m[(i, n + j)].clone());
    let b = Matrix::from_fn(n, n, |i, j| m[(n + i, n + j)].clone());
    let a_inv = a.inverse().map_err(|_| Error::Degenerate)?;
    let half = Rational::new(1, 2).unwrap();

    let ba_t = b.mul(&a_inv).transpose().scale(&-half.clone());
    let mut c1 = Matrix::identity(dim);
    for i in 0..n {
        for j in 0..n {
            c1[(i, n + j)] = ba_t[(i, j)].clone();
        }
    }

    let mut c2 = Matrix::zeros(dim, dim);
    for i in 0..n {
        c2[(i, i)] = half.clone();
        c2[(i, n + i)] = -half.clone();
        for j in 0..n {
            c2[(n + i, j)] = a_inv[(i, j)].clone();
            c2[(n + i, n + j)] = a_inv[(i, j)].clone();
        }
    }

    let c = p.mul(&c1).mul(&c2);
    let expected = Matrix::diagonal(
        &(0..dim)
            .map(|i| {
                if i < n {
                    Rational::one()
                } else {
                    -Rational::one()
                }
            })
            .collect::<Vec<_>>(),
    );
    debug_assert_eq!(g.matrix().congruent(&c), expected);
    Ok(c)
}

/// The parabolic block embedding: for `a` an isometry of `f` (given by the
/// symmetric matrix `m_f`) and a translation vector `v`, assembles the
/// `(n+2) x (n+2)` matrix
///
/// ```text
/// [ a        -v          v        ]
/// [ v^T M a   1 - f(v)/2  f(v)/2  ]
/// [ v^T M a  -f(v)/2      1 + f(v)/2 ]
/// ```
///
/// which preserves `diag(M, 1, -1)` and fixes `(0, ..., 0, 1, 1)^T`.
pub fn parabolic_embed(m_f: &GramMatrix, a: &Matrix, v: &[Rational]) -> Result<Matrix, Error> {
    let n = m_f.rank();
    if a.rows() != n || a.cols() != n || v.len() != n {
        return Err(Error::WrongDimension(format!(
            "expected an {n} x {n} isometry and a vector of length {n}"
        )));
    }
    if &m_f.matrix().congruent(a) != m_f.matrix() {
        return Err(Error::NotIsometry);
    }
    let f_v = m_f.evaluate(v);
    let half_f = f_v * Rational::new(1, 2).unwrap();
    let mv = m_f.matrix().mul_vec(v);
    let row = a.transpose().mul_vec(&mv); // (v^T M a) as a vector

    let mut x = Matrix::zeros(n + 2, n + 2);
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] = a[(i, j)].clone();
        }
        x[(i, n)] = -v[i].clone();
        x[(i, n + 1)] = v[i].clone();
        x[(n, i)] = row[i].clone();
        x[(n + 1, i)] = row[i].clone();
    }
    x[(n, n)] = Rational::one() - half_f.clone();
    x[(n, n + 1)] = half_f.clone();
    x[(n + 1, n)] = -half_f.clone();
    x[(n + 1, n + 1)] = Rational::one() + half_f;
    Ok(x)
}

/// `diag(M, 1, -1)`: the Gram matrix of `f (+) <1, -1>` preserved by the
/// image of [`parabolic_embed`].
pub fn parabolic_gram(m_f: &GramMatrix) -> GramMatrix {
    let one = Matrix::diagonal(&[Rational::one()]);
    let minus_one = Matrix::diagonal(&[-Rational::one()]);
    GramMatrix(Matrix::block_diag(&[m_f.matrix(), &one, &minus_one]))
}
