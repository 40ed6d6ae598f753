//! The presented cohomology rings of the cyclic configuration spaces
//! `G(R^d, p)` and `G(S^{d−1}, p)` with `F_p` coefficients.

use super::algebra::{polynomial_product, Generator, GradedAlgebra, Monomial, Polynomial};
use super::field::{is_prime, PrimeField};
use super::CohomologyError;

/// Largest prime accepted by the builders.
pub const MAX_PRIME: u32 = 13;
/// Largest ambient dimension accepted by the builders.
pub const MAX_DIMENSION: usize = 6;

fn check_ranges(
    d: usize,
    p: u32,
    min_d: usize,
    odd_p: bool,
) -> Result<PrimeField, CohomologyError> {
    if d < min_d || d > MAX_DIMENSION {
        return Err(CohomologyError::InvalidParams(format!(
            "dimension {d} outside [{min_d}, {MAX_DIMENSION}]"
        )));
    }
    if !is_prime(p as u64) || p > MAX_PRIME || (odd_p && p == 2) {
        let what = if odd_p { "an odd prime" } else { "a prime" };
        return Err(CohomologyError::InvalidParams(format!(
            "p = {p} must be {what} not exceeding {MAX_PRIME}"
        )));
    }
    Ok(PrimeField::new(p).expect("checked prime"))
}

/// Degree cap handed to the algebra engine; comfortably above every top
/// degree plus the vanishing window for the supported ranges.
fn degree_cap(d: usize, p: u32) -> usize {
    4 * d * p as usize + 8
}

/// `H*(G(R^d, p); F_p)`: generators `s_1, …, s_p` of degree `d − 1` with
/// `s_i^2 = 0` and the sum of the `p` cyclic products
/// `s_i s_{i+1} ⋯ s_{i+p−2}` (each omitting one generator) equal to zero.
/// Each product is brought to increasing index order with graded signs.
pub fn build_plane_conf_algebra(d: usize, p: u32) -> Result<GradedAlgebra, CohomologyError> {
    let field = check_ranges(d, p, 2, false)?;
    let n = p as usize;
    let generators: Vec<Generator> = (1..=n)
        .map(|i| Generator::new(format!("s_{i}"), d - 1))
        .collect();
    let degrees = vec![d - 1; n];

    let mut relations = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut sq = vec![0; n];
        sq[i] = 2;
        relations.push(Polynomial::monomial(Monomial(sq), 1));
    }
    let mut cyclic = Polynomial::zero();
    for start in 0..n {
        let mut prod = Polynomial::monomial(Monomial::one(n), 1);
        for k in 0..n - 1 {
            let g = Polynomial::monomial(Monomial::generator(n, (start + k) % n), 1);
            prod = polynomial_product(field, &degrees, &prod, &g);
        }
        for (m, c) in prod.terms() {
            cyclic.add_term(field, m.clone(), c);
        }
    }
    relations.push(cyclic);
    GradedAlgebra::new(p, generators, relations, degree_cap(d, p))
}

/// `H*(G(S^{d−1}, p); F_p)` for an odd prime `p`.
///
/// Even `d ≥ 4`: `u` in degree `d − 1` and `s_i` in degree `i(d − 2)` for
/// `i ∈ [p − 2]`, with `u^2 = 0` and `s_i s_j = C(i+j, i) s_{i+j}` when
/// `i + j ≤ p − 2`, zero otherwise.
///
/// Odd `d ≥ 3`: `w` in degree `2d − 3` and `t_i` in degree `i(2d − 4)` for
/// `i ∈ [(p − 3)/2]`, with the same rules truncated at `(p − 3)/2`.
pub fn build_sphere_conf_algebra(d: usize, p: u32) -> Result<GradedAlgebra, CohomologyError> {
    let field = check_ranges(d, p, 3, true)?;
    let (odd_name, odd_degree, even_name, step, count) = if d % 2 == 0 {
        ("u", d - 1, "s", d - 2, p as usize - 2)
    } else {
        ("w", 2 * d - 3, "t", 2 * d - 4, (p as usize - 3) / 2)
    };
    let n = count + 1;
    let mut generators = vec![Generator::new(odd_name, odd_degree)];
    generators.extend((1..=count).map(|i| Generator::new(format!("{even_name}_{i}"), i * step)));

    // Exponent vector with the given (generator index → exponent) entries.
    let mono = |entries: &[(usize, u16)]| {
        let mut e = vec![0u16; n];
        for &(i, k) in entries {
            e[i] += k;
        }
        Monomial(e)
    };
    let mut relations = vec![Polynomial::monomial(mono(&[(0, 2)]), 1)];
    for i in 1..=count {
        for j in i..=count {
            let mut rel = Polynomial::monomial(mono(&[(i, 1), (j, 1)]), 1);
            if i + j <= count {
                let c = field.binomial(i as u64, j as u64);
                rel.add_term(field, mono(&[(i + j, 1)]), field.neg(c));
            }
            relations.push(rel);
        }
    }
    GradedAlgebra::new(p, generators, relations, degree_cap(d, p))
}
