//! Small dense linear algebra on stack-allocated types.
//!
//! Everything here is sized for ambient dimensions up to 6 and chart
//! dimensions up to 4, so no heap allocation happens in per-node loops.

use crate::math::{abs, sqrt};
use crate::{Error, Result};

pub const MAX_N: usize = 6;

/// Vector of runtime length `n <= MAX_N`; unused slots stay zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vn {
    pub n: usize,
    pub a: [f64; MAX_N],
}

impl Vn {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_N);
        Self { n, a: [0.0; MAX_N] }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        let mut v = Self::zeros(s.len());
        v.a[..s.len()].copy_from_slice(s);
        v
    }

    #[inline]
    pub fn slice(&self) -> &[f64] {
        &self.a[..self.n]
    }

    #[inline]
    pub fn add(&self, o: &Vn) -> Vn {
        debug_assert_eq!(self.n, o.n);
        let mut r = *self;
        for i in 0..self.n {
            r.a[i] += o.a[i];
        }
        r
    }

    #[inline]
    pub fn sub(&self, o: &Vn) -> Vn {
        debug_assert_eq!(self.n, o.n);
        let mut r = *self;
        for i in 0..self.n {
            r.a[i] -= o.a[i];
        }
        r
    }

    #[inline]
    pub fn scale(&self, c: f64) -> Vn {
        let mut r = *self;
        for i in 0..self.n {
            r.a[i] *= c;
        }
        r
    }

    /// Euclidean dot product of the raw coordinates.
    #[inline]
    pub fn dot(&self, o: &Vn) -> f64 {
        debug_assert_eq!(self.n, o.n);
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.a[i] * o.a[i];
        }
        s
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn is_finite(&self) -> bool {
        self.slice().iter().all(|x| x.is_finite())
    }
}

/// Row-major square matrix of runtime size `n <= MAX_N`.
#[derive(Clone, Copy, Debug)]
pub struct Mn {
    pub n: usize,
    pub a: [f64; MAX_N * MAX_N],
}

impl Mn {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_N);
        Self { n, a: [0.0; MAX_N * MAX_N] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * MAX_N + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * MAX_N + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * MAX_N + j] = v;
    }

    pub fn matvec(&self, v: &Vn) -> Vn {
        debug_assert_eq!(self.n, v.n);
        let mut r = Vn::zeros(self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for j in 0..self.n {
                s += self.get(i, j) * v.a[j];
            }
            r.a[i] = s;
        }
        r
    }

    pub fn matmul(&self, o: &Mn) -> Mn {
        debug_assert_eq!(self.n, o.n);
        let mut r = Mn::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    r.a[i * MAX_N + j] += aik * o.get(k, j);
                }
            }
        }
        r
    }

    pub fn transpose(&self) -> Mn {
        let mut r = Mn::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                r.set(j, i, self.get(i, j));
            }
        }
        r
    }

    pub fn column(&self, j: usize) -> Vn {
        let mut v = Vn::zeros(self.n);
        for i in 0..self.n {
            v.a[i] = self.get(i, j);
        }
        v
    }

    /// Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &Vn) -> Result<Vn> {
        debug_assert_eq!(self.n, b.n);
        let n = self.n;
        let mut m = *self;
        let mut x = *b;
        for col in 0..n {
            let mut piv = col;
            let mut best = abs(m.get(col, col));
            for r in col + 1..n {
                let v = abs(m.get(r, col));
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-300 {
                return Err(Error::DegenerateImmersion { cond: f64::INFINITY });
            }
            if piv != col {
                for j in 0..n {
                    let t = m.get(col, j);
                    m.set(col, j, m.get(piv, j));
                    m.set(piv, j, t);
                }
                x.a.swap(col, piv);
            }
            let d = m.get(col, col);
            for r in col + 1..n {
                let f = m.get(r, col) / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = m.get(r, j) - f * m.get(col, j);
                    m.set(r, j, v);
                }
                x.a[r] -= f * x.a[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x.a[i];
            for j in i + 1..n {
                s -= m.get(i, j) * x.a[j];
            }
            x.a[i] = s / m.get(i, i);
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mn> {
        let n = self.n;
        let mut inv = Mn::zeros(n);
        for j in 0..n {
            let mut e = Vn::zeros(n);
            e.a[j] = 1.0;
            let col = self.solve(&e)?;
            for i in 0..n {
                inv.set(i, j, col.a[i]);
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut m = *self;
        let mut sign = 1.0;
        for col in 0..n {
            let mut piv = col;
            let mut best = abs(m.get(col, col));
            for r in col + 1..n {
                let v = abs(m.get(r, col));
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != col {
                sign = -sign;
                for j in 0..n {
                    let t = m.get(col, j);
                    m.set(col, j, m.get(piv, j));
                    m.set(piv, j, t);
                }
            }
            let d = m.get(col, col);
            for r in col + 1..n {
                let f = m.get(r, col) / d;
                for j in col..n {
                    let v = m.get(r, j) - f * m.get(col, j);
                    m.set(r, j, v);
                }
            }
        }
        let mut det = sign;
        for i in 0..n {
            det *= m.get(i, i);
        }
        det
    }

    /// Cyclic Jacobi for symmetric input. Returns eigenvalues ascending and
    /// the matching eigenvector columns.
    pub fn sym_eigen(&self) -> (Vn, Mn) {
        let n = self.n;
        let mut a = *self;
        let mut q = Mn::identity(n);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
            if off <= 1e-300 {
                break;
            }
            for p in 0..n {
                for r in p + 1..n {
                    let apr = a.get(p, r);
                    if abs(apr) < 1e-300 {
                        continue;
                    }
                    let app = a.get(p, p);
                    let arr = a.get(r, r);
                    let theta = (arr - app) / (2.0 * apr);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + sqrt(1.0 + theta * theta))
                    } else {
                        -1.0 / (-theta + sqrt(1.0 + theta * theta))
                    };
                    let c = 1.0 / sqrt(1.0 + t * t);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akr = a.get(k, r);
                        a.set(k, p, c * akp - s * akr);
                        a.set(k, r, s * akp + c * akr);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let ark = a.get(r, k);
                        a.set(p, k, c * apk - s * ark);
                        a.set(r, k, s * apk + c * ark);
                    }
                    for k in 0..n {
                        let qkp = q.get(k, p);
                        let qkr = q.get(k, r);
                        q.set(k, p, c * qkp - s * qkr);
                        q.set(k, r, s * qkp + c * qkr);
                    }
                }
            }
        }
        let mut idx = [0usize; MAX_N];
        for (i, v) in idx.iter_mut().enumerate() {
            *v = i;
        }
        let vals: [f64; MAX_N] = core::array::from_fn(|i| if i < n { a.get(i, i) } else { 0.0 });
        idx[..n].sort_unstable_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
        let mut ev = Vn::zeros(n);
        let mut vecs = Mn::zeros(n);
        for (pos, &i) in idx[..n].iter().enumerate() {
            ev.a[pos] = vals[i];
            for k in 0..n {
                vecs.set(k, pos, q.get(k, i));
            }
        }
        (ev, vecs)
    }

    /// Q f(L) Q^T for symmetric input; `f` is applied to each eigenvalue.
    pub fn sym_map(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Mn> {
        let (ev, q) = self.sym_eigen();
        let n = self.n;
        let mut d = Mn::zeros(n);
        for i in 0..n {
            d.set(i, i, f(ev.a[i])?);
        }
        Ok(q.matmul(&d).matmul(&q.transpose()))
    }
}

/// Generalized cross product: for d-1 vectors in R^d, the vector orthogonal
/// to all of them whose length is the parallelotope (d-1)-volume.
pub fn cross_general(vs: &[Vn]) -> Vn {
    let d = vs[0].n;
    debug_assert_eq!(vs.len(), d - 1);
    let mut out = Vn::zeros(d);
    for j in 0..d {
        // minor: drop column j
        let mut minor = Mn::zeros(d - 1);
        for (r, v) in vs.iter().enumerate() {
            let mut cc = 0;
            for c in 0..d {
                if c == j {
                    continue;
                }
                minor.set(r, cc, v.a[c]);
                cc += 1;
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.a[j] = sign * minor.det();
    }
    out
}
