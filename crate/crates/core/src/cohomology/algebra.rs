//! Finitely presented graded-commutative algebras over `F_p`.
//!
//! Elements of the free graded-commutative algebra are combinations of
//! monomials `x_1^{e_1} ⋯ x_n^{e_n}` written in increasing generator order;
//! `ab = (−1)^{|a||b|} ba` fixes the sign of every reordering. In odd
//! characteristic an odd-degree generator squares to zero, so its exponent is
//! capped at one.
//!
//! The quotient by the ideal of relations is computed one degree at a time:
//! the degree-`n` part of the ideal is spanned by `m·r` for relations `r` and
//! monomials `m` of complementary degree, and Gaussian elimination over `F_p`
//! (pivoting on the largest monomials) leaves the smallest monomials as the
//! standard basis. Single-monomial relations are applied by discarding the
//! monomials they divide.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::PrimeField;
use super::CohomologyError;

/// Exponent vector indexed by generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(n_generators: usize) -> Self {
        Monomial(vec![0; n_generators])
    }

    pub fn generator(n_generators: usize, index: usize) -> Self {
        let mut e = vec![0; n_generators];
        e[index] = 1;
        Monomial(e)
    }

    pub fn factor_count(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Column ordering key: more factors first, then reverse lexicographic.
    fn order_key(&self) -> (u32, &[u16]) {
        (self.factor_count(), &self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: usize) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

/// A linear combination of monomials with nonzero `F_p` coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, u32>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial, coeff: u32) -> Self {
        let mut p = Self::zero();
        if coeff != 0 {
            p.terms.insert(m, coeff);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, field: PrimeField, m: Monomial, coeff: u32) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                let v = field.add(*o.get(), coeff);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                if coeff % field.characteristic() != 0 {
                    v.insert(coeff % field.characteristic());
                }
            }
        }
    }
}

/// Product of two monomials in the free graded-commutative algebra with
/// generator degrees `degrees`. Returns the sign (as an `F_p` element) and the
/// sorted product, or `None` when an odd generator would square to zero.
pub(crate) fn monomial_product(
    field: PrimeField,
    degrees: &[usize],
    a: &Monomial,
    b: &Monomial,
) -> Option<(u32, Monomial)> {
    let odd_char = field.characteristic() != 2;
    let mut exps = Vec::with_capacity(a.0.len());
    for (i, (&ea, &eb)) in a.0.iter().zip(&b.0).enumerate() {
        let e = ea + eb;
        if odd_char && degrees[i] % 2 == 1 && e > 1 {
            return None;
        }
        exps.push(e);
    }
    // Moving each odd factor of `b` left past the odd factors of `a` with a
    // larger index costs one sign per transposition.
    let mut swaps = 0u64;
    if odd_char {
        let mut odd_in_a_after = 0u64;
        for i in (0..a.0.len()).rev() {
            if degrees[i] % 2 == 1 {
                swaps += b.0[i] as u64 * odd_in_a_after;
                odd_in_a_after += a.0[i] as u64;
            }
        }
    }
    let sign = if swaps % 2 == 0 {
        1 % field.characteristic()
    } else {
        field.neg(1)
    };
    Some((sign, Monomial(exps)))
}

pub(crate) fn polynomial_product(
    field: PrimeField,
    degrees: &[usize],
    a: &Polynomial,
    b: &Polynomial,
) -> Polynomial {
    let mut out = Polynomial::zero();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            if let Some((sign, m)) = monomial_product(field, degrees, ma, mb) {
                out.add_term(field, m, field.mul(sign, field.mul(ca, cb)));
            }
        }
    }
    out
}

type SparseRow = Vec<(usize, u32)>;

/// One graded piece: candidate monomials, the row-echelon form of the ideal
/// in this degree, and the surviving standard monomials.
#[derive(Debug, Clone)]
struct Component {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    pivots: Vec<Option<SparseRow>>,
    rank: usize,
    basis: Vec<Monomial>,
}

impl Component {
    fn new(mut monomials: Vec<Monomial>) -> Self {
        monomials.sort_by(|a, b| b.order_key().cmp(&a.order_key()));
        let index = monomials
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let n = monomials.len();
        Component {
            monomials,
            index,
            pivots: vec![None; n],
            rank: 0,
            basis: Vec::new(),
        }
    }

    fn is_full(&self) -> bool {
        self.rank == self.monomials.len()
    }

    /// Reduce against the pivots; what remains lies on non-pivot columns.
    fn reduce(&self, field: PrimeField, row: &mut BTreeMap<usize, u32>) {
        let mut cursor = 0;
        while let Some((&col, &val)) = row.range(cursor..).next() {
            if let Some(piv) = &self.pivots[col] {
                for &(c, v) in piv {
                    let entry = row.entry(c).or_insert(0);
                    *entry = field.sub(*entry, field.mul(val, v));
                    if *entry == 0 {
                        row.remove(&c);
                    }
                }
            }
            cursor = col + 1;
        }
    }

    fn insert(&mut self, field: PrimeField, mut row: BTreeMap<usize, u32>) {
        self.reduce(field, &mut row);
        let Some((&lead, &lead_val)) = row.iter().next() else {
            return;
        };
        let scale = field.inv(lead_val);
        let normalized: SparseRow = row
            .into_iter()
            .map(|(c, v)| (c, field.mul(v, scale)))
            .collect();
        self.pivots[lead] = Some(normalized);
        self.rank += 1;
    }

    fn finalize(&mut self) {
        let mut basis: Vec<Monomial> = (0..self.monomials.len())
            .filter(|&c| self.pivots[c].is_none())
            .map(|c| self.monomials[c].clone())
            .collect();
        basis.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        self.basis = basis;
    }
}

/// Dimensions over `F_p`, degree by degree (zero degrees omitted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub dims: BTreeMap<usize, usize>,
    pub top_degree: usize,
}

impl BettiTable {
    pub fn dim(&self, degree: usize) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A finitely presented graded-commutative `F_p`-algebra with its additive
/// basis computed in every degree up to the top nonzero one.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    field: PrimeField,
    generators: Vec<Generator>,
    degrees: Vec<usize>,
    relations: Vec<Polynomial>,
    killed: Vec<Monomial>,
    components: Vec<Component>,
    top_degree: usize,
}

impl GradedAlgebra {
    /// Computes the quotient degree by degree until a run of zero degrees as
    /// long as the largest generator degree certifies that nothing higher
    /// survives. Fails if that does not happen by `max_degree`.
    pub fn new(
        prime: u32,
        generators: Vec<Generator>,
        relations: Vec<Polynomial>,
        max_degree: usize,
    ) -> Result<Self, CohomologyError> {
        let field = PrimeField::new(prime)
            .ok_or_else(|| CohomologyError::InvalidParams(format!("{prime} is not prime")))?;
        if generators.is_empty() {
            return Err(CohomologyError::InvalidParams("no generators".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.degree == 0) {
            return Err(CohomologyError::InvalidParams(format!(
                "generator {} has degree 0",
                g.name
            )));
        }
        let degrees: Vec<usize> = generators.iter().map(|g| g.degree).collect();
        let n_gen = degrees.len();

        let mut killed = Vec::new();
        let mut linear: Vec<(usize, Polynomial)> = Vec::new();
        for r in &relations {
            let mut reduced = Polynomial::zero();
            let mut degree = None;
            for (m, c) in r.terms() {
                if m.0.len() != n_gen {
                    return Err(CohomologyError::InvalidParams(
                        "relation monomial has the wrong number of exponents".into(),
                    ));
                }
                let deg = Self::degree_of(&degrees, m);
                if *degree.get_or_insert(deg) != deg {
                    return Err(CohomologyError::InvalidParams(
                        "inhomogeneous relation".into(),
                    ));
                }
                reduced.add_term(field, m.clone(), c % prime);
            }
            match (reduced.len(), degree) {
                (0, _) | (_, None) => {}
                (1, Some(_)) => killed.push(reduced.terms().next().unwrap().0.clone()),
                (_, Some(deg)) => linear.push((deg, reduced)),
            }
        }

        let g_max = *degrees.iter().max().unwrap();
        let mut alg = GradedAlgebra {
            field,
            generators,
            degrees,
            relations,
            killed,
            components: Vec::new(),
            top_degree: 0,
        };
        let mut zero_run = 0;
        for n in 0..=max_degree {
            let comp = alg.build_component(n, &linear);
            if comp.basis.is_empty() {
                zero_run += 1;
            } else {
                zero_run = 0;
                alg.top_degree = n;
            }
            alg.components.push(comp);
            if zero_run == g_max {
                alg.components.truncate(alg.top_degree + 1);
                return Ok(alg);
            }
        }
        Err(CohomologyError::NotFinite(max_degree))
    }

    fn degree_of(degrees: &[usize], m: &Monomial) -> usize {
        m.0.iter().zip(degrees).map(|(&e, &d)| e as usize * d).sum()
    }

    fn survives(&self, m: &Monomial) -> bool {
        let odd_char = self.field.characteristic() != 2;
        if odd_char
            && m.0
                .iter()
                .zip(&self.degrees)
                .any(|(&e, &d)| d % 2 == 1 && e > 1)
        {
            return false;
        }
        !self.killed.iter().any(|k| k.divides(m))
    }

    fn enumerate(&self, degree: usize) -> Vec<Monomial> {
        fn rec(
            alg: &GradedAlgebra,
            i: usize,
            remaining: usize,
            cur: &mut Vec<u16>,
            out: &mut Vec<Monomial>,
        ) {
            if i == alg.degrees.len() {
                if remaining == 0 {
                    let m = Monomial(cur.clone());
                    if alg.survives(&m) {
                        out.push(m);
                    }
                }
                return;
            }
            let d = alg.degrees[i];
            let mut e = 0;
            while e * d <= remaining {
                cur.push(e as u16);
                rec(alg, i + 1, remaining - e * d, cur, out);
                cur.pop();
                e += 1;
            }
        }
        let mut out = Vec::new();
        rec(
            self,
            0,
            degree,
            &mut Vec::with_capacity(self.degrees.len()),
            &mut out,
        );
        out
    }

    fn build_component(&self, n: usize, linear: &[(usize, Polynomial)]) -> Component {
        let mut comp = Component::new(self.enumerate(n));
        'rows: for (deg, rel) in linear {
            if *deg > n {
                continue;
            }
            let Some(lower) = self.components.get(n - deg) else {
                continue;
            };
            for m in &lower.monomials {
                if comp.is_full() {
                    break 'rows;
                }
                let mut row = BTreeMap::new();
                for (t, c) in rel.terms() {
                    if let Some((sign, prod)) = monomial_product(self.field, &self.degrees, m, t) {
                        if let Some(&col) = comp.index.get(&prod) {
                            let entry = row.entry(col).or_insert(0);
                            *entry = self.field.add(*entry, self.field.mul(sign, c));
                            if *entry == 0 {
                                row.remove(&col);
                            }
                        }
                    }
                }
                comp.insert(self.field, row);
            }
        }
        comp.finalize();
        comp
    }

    pub fn prime(&self) -> u32 {
        self.field.characteristic()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn degree(&self, m: &Monomial) -> usize {
        Self::degree_of(&self.degrees, m)
    }

    pub fn top_degree(&self) -> usize {
        self.top_degree
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.components.get(degree).map_or(0, |c| c.basis.len())
    }

    /// Standard monomials of the given degree, smallest first.
    pub fn basis(&self, degree: usize) -> &[Monomial] {
        self.components.get(degree).map_or(&[], |c| &c.basis)
    }

    pub fn total_dim(&self) -> usize {
        self.components.iter().map(|c| c.basis.len()).sum()
    }

    pub fn betti(&self) -> BettiTable {
        let dims = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.basis.is_empty())
            .map(|(n, c)| (n, c.basis.len()))
            .collect();
        BettiTable {
            dims,
            top_degree: self.top_degree,
        }
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::monomial(Monomial::one(self.degrees.len()), 1)
    }

    pub fn gen(&self, index: usize) -> Polynomial {
        Polynomial::monomial(Monomial::generator(self.degrees.len(), index), 1)
    }

    /// Unique expansion in the standard monomial basis.
    pub fn normal_form(&self, x: &Polynomial) -> Polynomial {
        let mut by_degree: BTreeMap<usize, BTreeMap<usize, u32>> = BTreeMap::new();
        for (m, c) in x.terms() {
            let n = self.degree(m);
            let Some(comp) = self.components.get(n) else {
                continue;
            };
            if let Some(&col) = comp.index.get(m) {
                let row = by_degree.entry(n).or_default();
                let entry = row.entry(col).or_insert(0);
                *entry = self.field.add(*entry, c);
                if *entry == 0 {
                    row.remove(&col);
                }
            }
        }
        let mut out = Polynomial::zero();
        for (n, mut row) in by_degree {
            let comp = &self.components[n];
            comp.reduce(self.field, &mut row);
            for (col, c) in row {
                out.add_term(self.field, comp.monomials[col].clone(), c);
            }
        }
        out
    }

    pub fn multiply(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        self.normal_form(&polynomial_product(self.field, &self.degrees, a, b))
    }

    /// Normal form of the `k`-th power of a generator.
    pub fn power(&self, generator: usize, k: u32) -> Polynomial {
        let g = self.gen(generator);
        (0..k).fold(self.one(), |acc, _| self.multiply(&acc, &g))
    }

    /// Checks that `(a·b)·x = a·(b·x)` after reduction, for all basis
    /// monomials `a`, `b` and generators `x`; i.e. that reducing a product in
    /// two different orders gives the same normal form.
    pub fn check_associativity(&self) -> bool {
        let all: Vec<Polynomial> = (0..=self.top_degree)
            .flat_map(|n| {
                self.basis(n)
                    .iter()
                    .map(|m| Polynomial::monomial(m.clone(), 1))
            })
            .collect();
        for a in &all {
            for b in &all {
                let ab = self.multiply(a, b);
                for x in 0..self.degrees.len() {
                    let g = self.gen(x);
                    if self.multiply(&ab, &g) != self.multiply(a, &self.multiply(b, &g)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Checks `ab − (−1)^{|a||b|} ba = 0` for all pairs of basis monomials.
    pub fn check_graded_commutativity(&self) -> bool {
        for n in 0..=self.top_degree {
            for m in 0..=self.top_degree {
                for a in self.basis(n) {
                    for b in self.basis(m) {
                        let pa = Polynomial::monomial(a.clone(), 1);
                        let pb = Polynomial::monomial(b.clone(), 1);
                        let ab = self.multiply(&pa, &pb);
                        let mut ba = self.multiply(&pb, &pa);
                        if (n * m) % 2 == 1 {
                            ba = self.scale(&ba, self.field.neg(1));
                        }
                        if ab != ba {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn scale(&self, x: &Polynomial, c: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, v) in x.terms() {
            out.add_term(self.field, m.clone(), self.field.mul(v, c));
        }
        out
    }

    pub fn monomial_name(&self, m: &Monomial) -> String {
        let parts: Vec<String> =
            m.0.iter()
                .zip(&self.generators)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, g)| {
                    if e == 1 {
                        g.name.clone()
                    } else {
                        format!("{}^{}", g.name, e)
                    }
                })
                .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("·")
        }
    }

    pub fn format(&self, x: &Polynomial) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = x
            .terms()
            .map(|(m, c)| {
                if c == 1 {
                    self.monomial_name(m)
                } else {
                    format!("{c}·{}", self.monomial_name(m))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exterior(n: usize, p: u32) -> GradedAlgebra {
        let gens = (0..n)
            .map(|i| Generator::new(format!("e_{}", i + 1), 1))
            .collect();
        GradedAlgebra::new(p, gens, Vec::new(), 64).unwrap()
    }

    #[test]
    fn exterior_algebra_dimensions() {
        let ext = exterior(4, 3);
        let b = ext.betti();
        assert_eq!(
            b.dims.values().copied().collect::<Vec<_>>(),
            [1, 4, 6, 4, 1]
        );
        assert_eq!(b.top_degree, 4);
        assert!(ext.check_graded_commutativity());
    }

    #[test]
    fn anticommuting_signs() {
        let ext = exterior(2, 5);
        let e1 = ext.gen(0);
        let e2 = ext.gen(1);
        let e12 = ext.multiply(&e1, &e2);
        let e21 = ext.multiply(&e2, &e1);
        assert_eq!(e21, ext.scale(&e12, 4));
        assert!(ext.multiply(&e1, &e1).is_zero());
    }

    #[test]
    fn truncated_polynomial_ring() {
        // F_3[x]/(x^3), |x| = 2
        let gens = vec![Generator::new("x", 2)];
        let rel = Polynomial::monomial(Monomial(vec![3]), 1);
        let alg = GradedAlgebra::new(3, gens, vec![rel], 64).unwrap();
        assert_eq!(alg.betti().dims, BTreeMap::from([(0, 1), (2, 1), (4, 1)]));
        assert!(alg.power(0, 3).is_zero());
        assert!(alg.check_associativity());
    }

    #[test]
    fn infinite_algebra_is_reported() {
        let gens = vec![Generator::new("x", 2)];
        let err = GradedAlgebra::new(3, gens, Vec::new(), 20).unwrap_err();
        assert_eq!(err, CohomologyError::NotFinite(20));
    }

    #[test]
    fn rejects_inhomogeneous_relation() {
        let gens = vec![Generator::new("x", 2), Generator::new("y", 3)];
        let mut rel = Polynomial::monomial(Monomial(vec![1, 0]), 1);
        rel.add_term(PrimeField::new(3).unwrap(), Monomial(vec![0, 1]), 1);
        assert!(GradedAlgebra::new(3, gens, vec![rel], 20).is_err());
    }
}
