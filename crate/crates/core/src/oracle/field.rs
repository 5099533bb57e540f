//! Finite field arithmetic: prime fields below 2^32 on `u64`, and table
//! driven fields of order 2, 3, 4 and 5 on `u8`.

/// Trial division; adequate for the 32-bit moduli used here.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field `F_p` with `p < 2^32`, so products fit in `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Returns `None` unless `p` is a prime below 2^32.
    pub fn new(p: u64) -> Option<Fp> {
        (p < (1 << 32) && is_prime(p)).then_some(Fp { p })
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.p
    }

    /// Maps a signed integer to its residue.
    pub fn from_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero element.
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        self.pow(a, self.p - 2)
    }
}

/// A field of order 2, 3, 4 or 5 with precomputed tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallField {
    q: u8,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    generator: u8,
}

impl SmallField {
    pub fn new(q: u64) -> Option<SmallField> {
        let q = u8::try_from(q).ok()?;
        let (add, mul): (Vec<u8>, Vec<u8>) = match q {
            2 | 3 | 5 => (0..q)
                .flat_map(|a| (0..q).map(move |b| ((a + b) % q, a * b % q)))
                .unzip(),
            4 => {
                // F_2[x]/(x^2+x+1); element a = a0 + a1 x encoded as a0 + 2 a1
                let mul = |a: u8, b: u8| {
                    let (a0, a1, b0, b1) = (a & 1, a >> 1, b & 1, b >> 1);
                    let c0 = (a0 & b0) ^ (a1 & b1);
                    let c1 = (a0 & b1) ^ (a1 & b0) ^ (a1 & b1);
                    c0 | (c1 << 1)
                };
                (0..4)
                    .flat_map(|a| (0..4).map(move |b| (a ^ b, mul(a, b))))
                    .unzip()
            }
            _ => return None,
        };
        let idx = |a: u8, b: u8| a as usize * q as usize + b as usize;
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[idx(a, b)] == 0).unwrap())
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q).find(|&b| mul[idx(a, b)] == 1).unwrap()
                }
            })
            .collect();
        let order = |a: u8| {
            let mut x = a;
            let mut k = 1;
            while x != 1 {
                x = mul[idx(x, a)];
                k += 1;
            }
            k
        };
        let generator = (1..q).find(|&a| order(a) == q - 1).unwrap();
        Some(SmallField {
            q,
            add,
            mul,
            neg,
            inv,
            generator,
        })
    }

    pub fn order(&self) -> u8 {
        self.q
    }

    /// A generator of the multiplicative group.
    pub fn generator(&self) -> u8 {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }
}
