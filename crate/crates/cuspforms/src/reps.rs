//! Invariant symmetric bilinear forms of finite-group representations over
//! `Q`: the exact solution space of `g^T Q g = Q`, the averaged positive
//! definite form, the canonical cyclic-prime representation, and block
//! operations.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::form::GramMatrix;
use crate::matrix::Matrix;
use crate::rational::{is_prime, Rational};

/// A rational representation given by its generator matrices.
///
/// `group_order` and `group_exponent` are optional metadata; when an order is
/// given, every generator's order must divide it.
#[derive(Clone)]
pub struct RepGenerators {
    dimension: usize,
    generators: Vec<Matrix>,
    group_order: Option<usize>,
    group_exponent: Option<usize>,
}

/// Cap on closure enumeration; the groups of interest are far smaller.
const CLOSURE_CAP: usize = 10_000;

impl RepGenerators {
    pub fn new(
        dimension: usize,
        generators: Vec<Matrix>,
        group_order: Option<usize>,
        group_exponent: Option<usize>,
    ) -> Result<Self, Error> {
        if dimension == 0 {
            return Err(Error::WrongDimension("representation dimension must be >= 1".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != dimension || g.cols() != dimension {
                return Err(Error::WrongDimension(format!(
                    "generator {i} is not {dimension} x {dimension}"
                )));
            }
            if !g.is_invertible() {
                return Err(Error::Singular);
            }
        }
        if let Some(order) = group_order {
            if order == 0 {
                return Err(Error::BadParameters("group order must be positive".into()));
            }
            for (i, g) in generators.iter().enumerate() {
                if !element_order_divides(g, order) {
                    return Err(Error::BadParameters(format!(
                        "generator {i} has order not dividing {order}"
                    )));
                }
            }
        }
        Ok(RepGenerators {
            dimension,
            generators,
            group_order,
            group_exponent,
        })
    }

    pub fn trivial(dimension: usize) -> Result<Self, Error> {
        RepGenerators::new(dimension, Vec::new(), Some(1), Some(1))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn group_order(&self) -> Option<usize> {
        self.group_order
    }

    pub fn group_exponent(&self) -> Option<usize> {
        self.group_exponent
    }
}

fn element_order_divides(g: &Matrix, order: usize) -> bool {
    let mut power = Matrix::identity(g.rows());
    for _ in 0..order {
        power = power.mul(g);
    }
    power == Matrix::identity(g.rows())
}

/// A basis of the space of symmetric matrices fixed by every generator.
#[derive(Debug, Clone)]
pub struct SymFormSpace {
    dimension: usize,
    basis: Vec<Matrix>,
}

impl SymFormSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }
}

/// Solves `g^T Q g = Q` over all generators for symmetric `Q`, by exact
/// nullspace computation on the stacked linear system in the n(n+1)/2
/// independent entries of `Q`.
pub fn invariant_form_space(rep: &RepGenerators) -> SymFormSpace {
    let n = rep.dimension;
    let unknowns: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let unknown_index = |i: usize, j: usize| -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        unknowns.iter().position(|&(x, y)| (x, y) == (a, b)).unwrap()
    };

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for g in &rep.generators {
        // (g^T Q g)_{ij} - Q_{ij} = sum_{k,l} g_{ki} Q_{kl} g_{lj} - Q_{ij}
        for &(i, j) in &unknowns {
            let mut row = vec![Rational::zero(); unknowns.len()];
            for k in 0..n {
                for l in 0..n {
                    let coeff = g[(k, i)].clone() * g[(l, j)].clone();
                    let idx = unknown_index(k, l);
                    row[idx] = row[idx].clone() + coeff;
                }
            }
            let idx = unknown_index(i, j);
            row[idx] = row[idx].clone() - Rational::one();
            rows.push(row);
        }
    }
    if rows.is_empty() {
        // no constraints: the full space of symmetric matrices
        rows.push(vec![Rational::zero(); unknowns.len()]);
    }

    let system = Matrix::from_rows(rows).expect("constraint rows have equal length");
    let basis = system
        .nullspace()
        .into_iter()
        .map(|coords| {
            let mut q = Matrix::zeros(n, n);
            for (idx, &(i, j)) in unknowns.iter().enumerate() {
                q[(i, j)] = coords[idx].clone();
                q[(j, i)] = coords[idx].clone();
            }
            q
        })
        .collect();
    SymFormSpace {
        dimension: n,
        basis,
    }
}

/// Enumerates the group generated by the representation matrices, up to the
/// closure cap.
pub fn group_elements(rep: &RepGenerators) -> Result<Vec<Matrix>, Error> {
    let n = rep.dimension;
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut elements = vec![Matrix::identity(n)];
    seen.insert(matrix_key(&elements[0]));
    let mut frontier = elements.clone();
    while let Some(m) = frontier.pop() {
        for g in &rep.generators {
            let next = m.mul(g);
            let key = matrix_key(&next);
            if seen.insert(key) {
                if elements.len() >= CLOSURE_CAP {
                    return Err(Error::ClosureBudgetExceeded(CLOSURE_CAP));
                }
                elements.push(next.clone());
                frontier.push(next);
            }
        }
    }
    Ok(elements)
}

fn matrix_key(m: &Matrix) -> Vec<Rational> {
    let mut key = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            key.push(m[(i, j)].clone());
        }
    }
    key
}

/// The averaged inner product `(1/|G|) sum_g g^T g`: a positive definite
/// invariant form for the generated group.
pub fn average_form(rep: &RepGenerators) -> Result<GramMatrix, Error> {
    let elements = group_elements(rep)?;
    let n = rep.dimension;
    let mut sum = Matrix::zeros(n, n);
    for g in &elements {
        sum = sum.add(&g.transpose().mul(g));
    }
    let avg = sum.scale(&Rational::new(1, elements.len() as i64).expect("nonzero order"));
    GramMatrix::new(avg)
}

/// Exact positive definiteness via leading principal minors.
pub fn is_positive_definite(g: &GramMatrix) -> bool {
    let n = g.rank();
    for k in 1..=n {
        let minor = Matrix::from_fn(k, k, |i, j| g.matrix()[(i, j)].clone());
        if !minor.determinant().is_positive() {
            return false;
        }
    }
    true
}

/// The canonical faithful irreducible representation of the cyclic group of
/// odd prime order `p` on `Q^(p-1)`, together with its invariant tridiagonal
/// Gram matrix (2 on the diagonal, -1 off); `det Q = p`.
pub fn cyclic_prime_rep(p: u64) -> Result<(RepGenerators, GramMatrix), Error> {
    if p < 3 || p % 2 == 0 || !is_prime(&BigInt::from(p)) {
        return Err(Error::NotOddPrime(p.to_string()));
    }
    let n = (p - 1) as usize;
    // companion-style generator: subdiagonal 1, last column all -1
    let zeta = Matrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -Rational::one()
        } else if i == j + 1 {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let gram = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            Rational::from_int(2)
        } else if i.abs_diff(j) == 1 {
            -Rational::one()
        } else {
            Rational::zero()
        }
    });
    let rep = RepGenerators::new(n, vec![zeta], Some(p as usize), Some(p as usize))?;
    let gram = GramMatrix::new(gram)?;
    debug_assert_eq!(
        gram.matrix().congruent(&rep.generators[0]),
        gram.matrix().clone()
    );
    Ok((rep, gram))
}

/// Generator-wise block-diagonal sum of two representations of the same
/// group presented by parallel generator lists.
pub fn block_sum(a: &RepGenerators, b: &RepGenerators) -> Result<RepGenerators, Error> {
    if a.generators.len() != b.generators.len() {
        return Err(Error::GeneratorCountMismatch(
            a.generators.len(),
            b.generators.len(),
        ));
    }
    let generators = a
        .generators
        .iter()
        .zip(&b.generators)
        .map(|(ga, gb)| Matrix::block_diag(&[ga, gb]))
        .collect();
    let group_order = match (a.group_order, b.group_order) {
        (Some(x), Some(y)) if x == y => Some(x),
        _ => None,
    };
    let group_exponent = match (a.group_exponent, b.group_exponent) {
        (Some(x), Some(y)) if x == y => Some(x),
        _ => None,
    };
    RepGenerators::new(
        a.dimension + b.dimension,
        generators,
        group_order,
        group_exponent,
    )
}

/// Transports a form along a basis change: `c^T q c`. If `g` preserves `q`,
/// then `c^-1 g c` preserves the result.
pub fn transport_form(q: &GramMatrix, c: &Matrix) -> Result<GramMatrix, Error> {
    if c.rows() != q.rank() || c.cols() != q.rank() {
        return Err(Error::WrongDimension(format!(
            "expected a {0} x {0} basis change",
            q.rank()
        )));
    }
    if !c.is_invertible() {
        return Err(Error::Singular);
    }
    GramMatrix::new(q.matrix().congruent(c))
}

/// JSON shape of [`RepGenerators`]:
/// `{"dim": 2, "generators": [[["0","-1"],["1","-1"]]], "order": 3}`.
#[derive(Serialize, Deserialize)]
pub struct RepGeneratorsJson {
    pub dim: usize,
    pub generators: Vec<Vec<Vec<Rational>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<usize>,
}

impl RepGenerators {
    pub fn from_json(json: &RepGeneratorsJson) -> Result<Self, Error> {
        let generators = json
            .generators
            .iter()
            .map(|rows| Matrix::from_rows(rows.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        RepGenerators::new(json.dim, generators, json.order, json.exponent)
    }

    pub fn to_json(&self) -> RepGeneratorsJson {
        RepGeneratorsJson {
            dim: self.dimension,
            generators: self
                .generators
                .iter()
                .map(crate::form::matrix_rows)
                .collect(),
            order: self.group_order,
            exponent: self.group_exponent,
        }
    }
}
