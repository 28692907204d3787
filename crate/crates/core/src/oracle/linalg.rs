//! Linear solvers for absorbing-chain systems `A x = b` with small integer
//! `A` and `b`.
//!
//! The exact path is Dixon's p-adic lifting: factor `A` once modulo a 31-bit
//! prime, lift the solution one base-`p` digit at a time, then recover
//! rationals by reconstruction and confirm them by exact substitution. The
//! float path is Gauss-Seidel with an explicit residual bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const PRIMES: [u64; 4] = [2_147_483_647, 2_147_483_629, 2_147_483_587, 2_147_483_579];
const MAX_LIFT_STEPS: usize = 1 << 13;

/// Square sparse integer matrix, row-major.
#[derive(Debug, Clone)]
pub(crate) struct SparseMatrix {
    pub rows: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        SparseMatrix {
            rows: vec![Vec::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `value` at `(row, col)`, merging with an existing entry.
    pub fn add(&mut self, row: usize, col: usize, value: i64) {
        let r = &mut self.rows[row];
        match r.iter_mut().find(|(c, _)| *c == col) {
            Some((_, v)) => *v += value,
            None => r.push((col, value)),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = SparseMatrix::new(self.dim());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                t.rows[j].push((i, v));
            }
        }
        t
    }

    fn diagonal(&self, i: usize) -> i64 {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == i)
            .map_or(0, |&(_, v)| v)
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn reduce(v: i128, p: u64) -> u64 {
    v.rem_euclid(p as i128) as u64
}

/// Dense LU factorisation modulo `p` with row pivoting.
struct ModLu {
    p: u64,
    n: usize,
    lu: Vec<u64>,
    perm: Vec<usize>,
}

impl ModLu {
    fn factor(a: &SparseMatrix, p: u64) -> Option<Self> {
        let n = a.dim();
        let mut lu = vec![0u64; n * n];
        for (i, row) in a.rows.iter().enumerate() {
            for &(j, v) in row {
                lu[i * n + j] = reduce(v as i128, p);
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot_row = (k..n).find(|&i| lu[i * n + k] != 0)?;
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let inv = mod_pow(lu[k * n + k], p - 2, p);
            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot = &upper[k * n..(k + 1) * n];
            for i in 0..n - k - 1 {
                let row = &mut lower[i * n..(i + 1) * n];
                if row[k] == 0 {
                    continue;
                }
                let factor = row[k] * inv % p;
                row[k] = factor;
                let neg = p - factor;
                for j in k + 1..n {
                    if pivot[j] != 0 {
                        row[j] = (row[j] + neg * pivot[j]) % p;
                    }
                }
            }
        }
        Some(ModLu { p, n, lu, perm })
    }

    fn solve(&self, b: &[u64]) -> Vec<u64> {
        let (n, p) = (self.n, self.p);
        let mut y: Vec<u64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                let l = self.lu[i * n + j];
                if l != 0 {
                    acc = (acc + (p - l) * y[j]) % p;
                }
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                if u != 0 {
                    acc = (acc + (p - u) * y[j]) % p;
                }
            }
            y[i] = acc * mod_pow(self.lu[i * n + i], p - 2, p) % p;
        }
        y
    }
}

/// Finds `a / b` with `a = b u (mod m)`, `|a|, b <= sqrt(m / 2)`.
fn rational_reconstruction(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<BigRational> {
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || &t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn verify(a: &SparseMatrix, b: &[i64], x: &[BigRational]) -> bool {
    let den = x
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let nums: Vec<BigInt> = x
        .iter()
        .map(|q| q.numer() * (&den / q.denom()))
        .collect();
    a.rows.iter().zip(b).all(|(row, &bi)| {
        let lhs: BigInt = row.iter().map(|&(j, v)| &nums[j] * v).sum();
        lhs == &den * bi
    })
}

fn reconstruct(digits: &[Vec<u32>], p: u64) -> Option<Vec<BigRational>> {
    let n = digits.first()?.len();
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), digits.len());
    let bound = (&modulus / 2u32).sqrt();
    let half = &modulus / 2u32;
    let mut den = BigInt::one();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut u = BigInt::zero();
        for step in digits.iter().rev() {
            u = u * &pb + step[i];
        }
        let mut v = (&u * &den).mod_floor(&modulus);
        if v > half {
            v -= &modulus;
        }
        if v.abs() <= bound {
            out.push(BigRational::new(v, den.clone()));
        } else {
            let q = rational_reconstruction(&v, &modulus, &bound)?;
            let x = BigRational::new(q.numer().clone(), q.denom() * &den);
            den *= q.denom();
            out.push(x);
        }
    }
    Some(out)
}

/// Exact solutions of `A x = b` for each right-hand side.
pub(crate) fn solve_exact(a: &SparseMatrix, rhs: &[Vec<i64>]) -> Result<Vec<Vec<BigRational>>> {
    let n = a.dim();
    if n == 0 {
        return Ok(rhs.iter().map(|_| Vec::new()).collect());
    }
    let lu = PRIMES
        .iter()
        .find_map(|&p| ModLu::factor(a, p))
        .ok_or_else(|| Error::InvalidArgument("singular absorbing-chain system".into()))?;
    let p = lu.p;
    rhs.iter()
        .map(|b| {
            let mut residual: Vec<i128> = b.iter().map(|&v| v as i128).collect();
            let mut digits: Vec<Vec<u32>> = Vec::new();
            let mut next_check = 2;
            while digits.len() < MAX_LIFT_STEPS {
                let r_mod: Vec<u64> = residual.iter().map(|&v| reduce(v, p)).collect();
                let y = lu.solve(&r_mod);
                for (i, row) in a.rows.iter().enumerate() {
                    let ay: i128 = row.iter().map(|&(j, v)| v as i128 * y[j] as i128).sum();
                    let diff = residual[i] - ay;
                    debug_assert_eq!(diff.rem_euclid(p as i128), 0);
                    residual[i] = diff / p as i128;
                }
                digits.push(y.iter().map(|&d| d as u32).collect());
                if digits.len() >= next_check || residual.iter().all(|&r| r == 0) {
                    next_check *= 2;
                    if let Some(x) = reconstruct(&digits, p) {
                        if verify(a, b, &x) {
                            return Ok(x);
                        }
                    }
                }
            }
            Err(Error::TooLarge(format!(
                "exact solve did not settle after {MAX_LIFT_STEPS} lifting steps"
            )))
        })
        .collect()
}

/// Gauss-Seidel solution of `A x = b`; fails unless `|Ax - b|_inf / scale`
/// falls below `tolerance`.
pub(crate) fn solve_float(
    a: &SparseMatrix,
    b: &[f64],
    scale: f64,
    tolerance: f64,
    max_sweeps: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = a.dim();
    let diag: Vec<f64> = (0..n).map(|i| a.diagonal(i) as f64).collect();
    let mut x = vec![0.0; n];
    let residual = |x: &[f64]| {
        a.rows
            .iter()
            .zip(b)
            .map(|(row, &bi)| {
                let ax: f64 = row.iter().map(|&(j, v)| v as f64 * x[j]).sum();
                (ax - bi).abs() / scale
            })
            .fold(0.0, f64::max)
    };
    for sweep in 0..max_sweeps {
        for i in 0..n {
            let off: f64 = a.rows[i]
                .iter()
                .filter(|(j, _)| *j != i)
                .map(|&(j, v)| v as f64 * x[j])
                .sum();
            x[i] = (b[i] - off) / diag[i];
        }
        if sweep % 16 == 15 {
            let r = residual(&x);
            if r < tolerance {
                return Ok((x, r));
            }
        }
    }
    let r = residual(&x);
    if r < tolerance {
        Ok((x, r))
    } else {
        Err(Error::TooLarge(format!(
            "iterative solve stalled at residual {r:e} after {max_sweeps} sweeps"
        )))
    }
}

pub(crate) fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        let mut a = SparseMatrix::new(rows.len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    a.add(i, j, v);
                }
            }
        }
        a
    }

    #[test]
    fn small_rational_system() {
        // 3x + y = 1, x + 2y = 0  =>  x = 2/5, y = -1/5
        let a = dense(&[&[3, 1], &[1, 2]]);
        let x = solve_exact(&a, &[vec![1, 0]]).unwrap();
        assert_eq!(x[0], vec![q(2, 5), q(-1, 5)]);
    }

    #[test]
    fn needs_several_lifting_steps() {
        // Hilbert-like integer matrix with a large determinant denominator
        let n = 8;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1000 + i as i64 } else { (i * 7 + j * 13) as i64 % 97 - 40 }).collect())
            .collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let a = dense(&refs);
        let b: Vec<i64> = (0..n as i64).map(|i| i * i - 3).collect();
        let x = solve_exact(&a, &[b.clone()]).unwrap().remove(0);
        assert!(verify(&a, &b, &x));
        let (xf, r) = solve_float(&a, &b.iter().map(|&v| v as f64).collect::<Vec<_>>(), 1.0, 1e-12, 10_000).unwrap();
        assert!(r < 1e-12);
        for (e, f) in x.iter().zip(&xf) {
            assert!((to_f64(e) - f).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let a = dense(&[&[1, 1], &[2, 2]]);
        assert!(solve_exact(&a, &[vec![1, 2]]).is_err());
    }

    #[test]
    fn reconstruction_recovers_fraction() {
        let m = BigInt::from(1_000_003i64) * BigInt::from(1_000_033i64);
        let bound = (&m / 2u32).sqrt();
        // u = 3 / 7 mod m
        let u = (0..7i64)
            .map(|k| BigInt::from(k) * &m + 3)
            .find(|v: &BigInt| (v % 7i64).is_zero())
            .map(|v| v / 7i64)
            .unwrap();
        assert_eq!(rational_reconstruction(&u, &m, &bound), Some(q(3, 7)));
    }
}
