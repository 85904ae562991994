use std::fmt;

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported truncation depth.
pub const MAX_DEPTH: u32 = 256;

/// Default truncation depth: residues mod 6! = 720.
pub const DEFAULT_DEPTH: u32 = 6;

static FACTORIALS: Lazy<Vec<BigUint>> = Lazy::new(|| {
    let mut out = Vec::with_capacity(MAX_DEPTH as usize + 1);
    let mut acc = BigUint::from(1u32);
    out.push(acc.clone());
    for k in 1..=MAX_DEPTH {
        acc *= k;
        out.push(acc.clone());
    }
    out
});

/// `k!` for `k <= MAX_DEPTH`.
pub fn factorial(k: u32) -> &'static BigUint {
    &FACTORIALS[k as usize]
}

fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        Err(Error::InvalidDepth(depth))
    } else {
        Ok(())
    }
}

/// A profinite integer truncated at depth `K`, stored as its residue mod `K!`.
///
/// Since every positive integer divides some factorial, the residue mod `K!`
/// determines the residue mod every `n | K!`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProfiniteInt {
    depth: u32,
    residue: BigUint,
}

impl ProfiniteInt {
    /// Euclidean reduction of any integer into `[0, K!)`.
    pub fn new(depth: u32, value: impl Into<BigInt>) -> Result<Self> {
        check_depth(depth)?;
        let m = factorial(depth)
            .to_bigint()
            .expect("factorial is nonnegative");
        let r = value.into().mod_floor(&m);
        Ok(ProfiniteInt {
            depth,
            residue: r.to_biguint().expect("mod_floor is nonnegative"),
        })
    }

    pub fn zero(depth: u32) -> Result<Self> {
        check_depth(depth)?;
        Ok(ProfiniteInt {
            depth,
            residue: BigUint::zero(),
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &'static BigUint {
        factorial(self.depth)
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    fn same_depth(&self, other: &Self) -> Result<()> {
        if self.depth != other.depth {
            Err(Error::DepthMismatch(self.depth, other.depth))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_depth(other)?;
        let mut r = &self.residue + &other.residue;
        let m = self.modulus();
        if &r >= m {
            r -= m;
        }
        Ok(ProfiniteInt {
            depth: self.depth,
            residue: r,
        })
    }

    pub fn neg(&self) -> Self {
        let residue = if self.residue.is_zero() {
            BigUint::zero()
        } else {
            self.modulus() - &self.residue
        };
        ProfiniteInt {
            depth: self.depth,
            residue,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Adds an ordinary integer (the image of `Z` in the profinite integers).
    pub fn add_integer(&self, n: i64) -> Self {
        if n == 0 {
            return self.clone();
        }
        let m = self.modulus();
        let residue = if n > 0 {
            let mut r = &self.residue + BigUint::from(n as u64);
            if &r >= m {
                r %= m;
            }
            r
        } else {
            let k = BigUint::from(n.unsigned_abs()) % m;
            if self.residue >= k {
                &self.residue - k
            } else {
                m - k + &self.residue
            }
        };
        ProfiniteInt {
            depth: self.depth,
            residue,
        }
    }

    /// Canonical projection to the depth-`j` truncation.
    pub fn project(&self, j: u32) -> Result<Self> {
        if j > self.depth {
            return Err(Error::CannotRefine {
                requested: j,
                depth: self.depth,
            });
        }
        check_depth(j)?;
        Ok(ProfiniteInt {
            depth: j,
            residue: &self.residue % factorial(j),
        })
    }

    /// Residue modulo an arbitrary positive `b` (meaningful when `b | K!`).
    pub fn residue_mod(&self, b: &BigUint) -> BigUint {
        &self.residue % b
    }

    pub fn residue_mod_u64(&self, b: u64) -> u64 {
        (&self.residue % b)
            .to_u64()
            .expect("residue below u64 modulus")
    }

    /// Whether this element generates a dense subgroup of the truncation
    /// `Z/K!Z`, i.e. is coprime to `K!`. This certifies "irrational up to
    /// depth K" only.
    pub fn is_monothetic_generator(&self) -> bool {
        // gcd(r, K!) = 1  <=>  r mod p != 0 for every prime p <= K.
        if self.depth == 1 {
            // Z/1Z is trivial and generated by anything.
            return true;
        }
        (2..=self.depth)
            .filter(|&p| is_prime(p))
            .all(|p| !(&self.residue % p).is_zero())
    }

    /// `max { j <= K : j! | r }`, or `None` when `r = 0` (divisible by every level).
    pub fn factorial_valuation(&self) -> Option<u32> {
        if self.residue.is_zero() {
            return None;
        }
        let mut j = 1;
        while j < self.depth && (&self.residue % factorial(j + 1)).is_zero() {
            j += 1;
        }
        Some(j)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

impl fmt::Display for ProfiniteInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}!)", self.residue, self.depth)
    }
}

#[derive(Serialize, Deserialize)]
struct ProfiniteRepr {
    depth: u32,
    residue: String,
}

impl Serialize for ProfiniteInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ProfiniteRepr {
            depth: self.depth,
            residue: self.residue.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProfiniteInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ProfiniteRepr::deserialize(deserializer)?;
        let value: BigInt = repr
            .residue
            .trim()
            .parse()
            .map_err(|_| serde::de::Error::custom(format!("bad residue {:?}", repr.residue)))?;
        ProfiniteInt::new(repr.depth, value).map_err(serde::de::Error::custom)
    }
}
