//! Small dense complex-matrix helpers for the link simulator. Dimensions
//! here never exceed a handful, so plain Gaussian elimination is plenty.

use num::complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = Vec<Vec<Complex64>>;

/// One CN(0, var) sample via paired unit normals.
pub fn cn_sample<R: Rng>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// `rows x cols` matrix of i.i.d. CN(0, var) entries.
pub fn cn_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, var: f64) -> CMat {
    (0..rows)
        .map(|_| (0..cols).map(|_| cn_sample(rng, var)).collect())
        .collect()
}

/// `a * b^H` for equally-sized column spaces: `(r x k) * (k x c)` given
/// `b` as `c x k`.
pub fn mul_hermitian_t(a: &CMat, b: &CMat) -> CMat {
    let rows = a.len();
    let cols = b.len();
    let inner = a[0].len();
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .map(|k| a[i][k] * b[j][k].conj())
                        .sum::<Complex64>()
                })
                .collect()
        })
        .collect()
}

/// `a^H * a`: the `cols x cols` Gram matrix.
pub fn gram(a: &CMat) -> CMat {
    let rows = a.len();
    let cols = a[0].len();
    (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    (0..rows)
                        .map(|k| a[k][i].conj() * a[k][j])
                        .sum::<Complex64>()
                })
                .collect()
        })
        .collect()
}

/// `log2 det(I + c * h h^H)` for an `n x s` matrix `h`; evaluated on the
/// smaller Gram side. The argument is Hermitian positive definite, so the
/// determinant is real.
pub fn log2_det_identity_plus(c: f64, h: &CMat) -> f64 {
    let n = h.len();
    let s = h[0].len();
    let mut g = if s <= n {
        gram(h)
    } else {
        mul_hermitian_t(h, h)
    };
    let dim = g.len();
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= c;
            if i == j {
                *v += Complex64::new(1.0, 0.0);
            }
        }
    }
    det_hermitian(&mut g).max(f64::MIN_POSITIVE).log2()
}

/// Determinant of a Hermitian positive-definite matrix via in-place
/// elimination; returns the real part.
fn det_hermitian(m: &mut CMat) -> f64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .norm_sqr()
                    .partial_cmp(&m[b][col].norm_sqr())
                    .expect("finite")
            })
            .expect("nonempty");
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        let p = m[col][col];
        if p.norm_sqr() == 0.0 {
            return 0.0;
        }
        det *= p;
        for row in col + 1..n {
            let f = m[row][col] / p;
            for j in col..n {
                let sub = f * m[col][j];
                m[row][j] -= sub;
            }
        }
    }
    det.re
}

/// Inverse of a small Hermitian positive-definite matrix.
pub fn invert(m: &CMat) -> CMat {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| {
                a[x][col]
                    .norm_sqr()
                    .partial_cmp(&a[y][col].norm_sqr())
                    .expect("finite")
            })
            .expect("nonempty");
        a.swap(col, pivot);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f.norm_sqr() > 0.0 {
                    for j in 0..2 * n {
                        let sub = f * a[col][j];
                        a[row][j] -= sub;
                    }
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn log_det_of_identity_is_zero() {
        let h = vec![vec![Complex64::new(0.0, 0.0); 2]; 2];
        assert_eq!(log2_det_identity_plus(3.0, &h), 0.0);
    }

    #[test]
    fn log_det_scalar_case() {
        let h = vec![vec![Complex64::new(1.0, 0.0)]];
        let got = log2_det_identity_plus(3.0, &h);
        assert!((got - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gram_side_equivalence() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let h = cn_matrix(&mut rng, 3, 2, 1.0);
        let a = log2_det_identity_plus(0.7, &h);
        // det(I_n + c h h^H) = det(I_s + c h^H h)
        let ht: CMat = (0..2)
            .map(|i| (0..3).map(|j| h[j][i].conj()).collect())
            .collect();
        let b = log2_det_identity_plus(0.7, &ht);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let h = cn_matrix(&mut rng, 4, 3, 1.0);
        let g = gram(&h);
        let inv = invert(&g);
        for i in 0..3 {
            for j in 0..3 {
                let v: Complex64 = (0..3).map(|k| g[i][k] * inv[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v.re - want).abs() < 1e-9 && v.im.abs() < 1e-9);
            }
        }
    }
}
