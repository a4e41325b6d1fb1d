//! Arithmetic in F_p[x]/(f) on raw coefficient vectors.

use rand::Rng;

/// Dense polynomial helpers over F_p, coefficients low degree first.
pub mod fp {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        pow(a, p - 2, p)
    }

    pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % p;
            }
            a = a * a % p;
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut r: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut r);
        r
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        trim(&mut r);
        r
    }

    /// Returns (quotient, remainder); `b` must be nonzero.
    pub fn divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let li = inv(b[db], p);
        if r.len() < b.len() {
            return (vec![], r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() >= b.len() {
            let d = r.len() - 1;
            let c = r[d] * li % p;
            q[d - db] = c;
            for (i, &bi) in b.iter().enumerate() {
                let idx = d - db + i;
                r[idx] = (r[idx] + p - c * bi % p) % p;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    /// Extended gcd: (g, s) with s*a = g mod b, g monic.
    pub fn gcdext(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        trim(&mut r0);
        trim(&mut r1);
        let (mut s0, mut s1) = (vec![1u64], vec![]);
        while !r1.is_empty() {
            let (q, r) = divmod(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if let Some(&l) = r0.last() {
            let li = inv(l, p);
            r0.iter_mut().for_each(|c| *c = *c * li % p);
            s0.iter_mut().for_each(|c| *c = *c * li % p);
        }
        (r0, s0)
    }
}

/// The field F_p[x]/(f) with f monic irreducible of degree n.
#[derive(Debug, Clone)]
pub struct FiniteField {
    pub p: u64,
    pub n: usize,
    pub defpoly: Vec<u64>,
    /// x^{n+i} mod f for i in 0..n-1.
    red: Vec<Vec<u64>>,
}

impl FiniteField {
    pub fn new(p: u64, defpoly: Vec<u64>) -> Self {
        let n = defpoly.len() - 1;
        let mut red = Vec::new();
        if n > 1 {
            let mut cur: Vec<u64> = (0..n).map(|i| (p - defpoly[i]) % p).collect();
            red.push(cur.clone());
            for _ in 1..n.saturating_sub(1) {
                let top = cur[n - 1];
                let mut next = vec![0u64; n];
                for i in (1..n).rev() {
                    next[i] = cur[i - 1];
                }
                for i in 0..n {
                    next[i] = (next[i] + top * red[0][i]) % p;
                }
                cur = next;
                red.push(cur.clone());
            }
        }
        FiniteField { p, n, defpoly, red }
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.n]
    }

    pub fn from_u64(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    pub fn gen(&self) -> Vec<u64> {
        let mut v = self.zero();
        if self.n > 1 {
            v[1] = 1;
        } else {
            v[0] = (self.p - self.defpoly[0]) % self.p;
        }
        v
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (p, n) = (self.p, self.n);
        if n == 1 {
            return vec![a[0] * b[0] % p];
        }
        let mut c = vec![0u64; 2 * n - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                c[i + j] = (c[i + j] + x * y) % p;
            }
        }
        let mut r = c[..n].to_vec();
        for (k, &hi) in c[n..].iter().enumerate() {
            if hi == 0 {
                continue;
            }
            for i in 0..n {
                r[i] = (r[i] + hi * self.red[k][i]) % p;
            }
        }
        r
    }

    pub fn inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        if a.iter().all(|&c| c == 0) {
            return None;
        }
        if self.n == 1 {
            return Some(vec![fp::inv(a[0], self.p)]);
        }
        let (g, s) = fp::gcdext(a, &self.defpoly, self.p);
        debug_assert_eq!(g, vec![1]);
        let mut r = self.zero();
        let (_, s) = fp::divmod(&s, &self.defpoly, self.p);
        r[..s.len()].copy_from_slice(&s);
        Some(r)
    }

    pub fn pow_big(&self, a: &[u64], e: &num_bigint::BigUint) -> Vec<u64> {
        let mut r = self.from_u64(1);
        for i in (0..e.bits()).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    pub fn pow(&self, a: &[u64], e: u64) -> Vec<u64> {
        self.pow_big(a, &num_bigint::BigUint::from(e))
    }

    /// a^{p^k}
    pub fn frob(&self, a: &[u64], k: u32) -> Vec<u64> {
        let mut r = a.to_vec();
        for _ in 0..(k as usize % self.n.max(1)) {
            r = self.pow(&r, self.p);
        }
        r
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.n).map(|_| rng.gen_range(0..self.p)).collect()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.n as u32)
    }

    pub fn element(&self, mut idx: u128) -> Vec<u64> {
        let mut v = self.zero();
        for c in v.iter_mut() {
            *c = (idx % self.p as u128) as u64;
            idx /= self.p as u128;
        }
        v
    }
}
