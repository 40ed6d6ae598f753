/// Arithmetic in the prime field `F_p`, elements stored as `u32` in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl PrimeField {
    /// Returns `None` unless `p` is prime.
    pub fn new(p: u32) -> Option<Self> {
        is_prime(p as u64).then_some(PrimeField { p })
    }

    pub fn characteristic(self) -> u32 {
        self.p
    }

    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// `n!` reduced mod `p`.
    pub fn factorial(self, n: u64) -> u32 {
        (1..=n).fold(1 % self.p, |acc, k| {
            self.mul(acc, (k % self.p as u64) as u32)
        })
    }

    /// `(i+j)! / (i! j!)` in `F_p`; requires `i + j < p` so the denominators
    /// are invertible.
    pub fn binomial(self, i: u64, j: u64) -> u32 {
        assert!(
            i + j < self.p as u64,
            "binomial denominators vanish mod {}",
            self.p
        );
        let num = self.factorial(i + j);
        let den = self.mul(self.factorial(i), self.factorial(j));
        self.mul(num, self.inv(den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(PrimeField::new(9).is_none());
    }

    #[test]
    fn arithmetic_mod_5() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.inv(2), 3);
        assert_eq!(f.reduce(-1), 4);
        assert_eq!(f.factorial(3), 1); // 6 ≡ 1
        assert_eq!(f.binomial(1, 2), 3);
        assert_eq!(f.sub(1, 3), 3);
    }
}
