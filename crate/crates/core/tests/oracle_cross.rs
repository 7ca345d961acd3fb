mod common;

use common::{gaussian, instances, low_rank};
use l1pca::oracle::{brute_force_fmax, tau_star};
use l1pca::polar_core::{compact_svd, polar_decompose, singular_values, DenseMatrix};
use l1pca::solvers::objective_f;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// `X S` for a sign pattern given as a flat row-major `n x K` slice.
fn xs_na(x: &DMatrix<f64>, signs: &[f64], k: usize) -> DMatrix<f64> {
    x * DMatrix::from_row_slice(x.ncols(), k, signs)
}

/// Depth-first walk over every pattern with entries drawn from `alphabet`.
fn for_each_pattern(len: usize, alphabet: &[f64], f: &mut dyn FnMut(&[f64])) {
    fn go(buf: &mut Vec<f64>, len: usize, alphabet: &[f64], f: &mut dyn FnMut(&[f64])) {
        if buf.len() == len {
            f(buf);
            return;
        }
        for &a in alphabet {
            buf.push(a);
            go(buf, len, alphabet, f);
            buf.pop();
        }
    }
    go(&mut Vec::with_capacity(len), len, alphabet, f);
}

fn fmax_na(x: &DenseMatrix, k: usize) -> f64 {
    let xn = to_na(x);
    let mut best = 0.0f64;
    for_each_pattern(x.cols() * k, &[1.0, -1.0], &mut |s| {
        best = best.max(xs_na(&xn, s, k).singular_values().sum());
    });
    best
}

/// U = P Q^T from nalgebra's SVD of a full-rank `c`.
fn polar_na(c: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = c.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

#[test]
fn fmax_matches_independent_enumeration() {
    for inst in instances(40, 5, 10, 2, 12, 21) {
        let lib = brute_force_fmax(&inst.x, inst.k, 1 << 24).unwrap();
        let ours = fmax_na(&inst.x, inst.k);
        assert!((lib.f_max - ours).abs() <= 1e-10 * ours.max(1.0), "{}: {} vs {ours}", inst.label, lib.f_max);
        assert_eq!(lib.enumerated, 1u64 << (inst.x.cols() * inst.k));
        let at_star = objective_f(&inst.x, &lib.u_star).unwrap();
        assert!((at_star - lib.f_max).abs() <= 1e-9 * ours.max(1.0), "{}", inst.label);
    }
}

#[test]
fn fmax_in_the_plane_matches_a_fine_angle_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10 {
        let x = gaussian(&mut rng, 2, 7);
        let f = brute_force_fmax(&x, 1, 1 << 24).unwrap().f_max;
        let steps = 200_000;
        let grid = (0..steps)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / steps as f64;
                let (s, c) = t.sin_cos();
                (0..7).map(|j| (c * x.get(0, j) + s * x.get(1, j)).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max);
        assert!(grid <= f + 1e-10 && grid >= f - 1e-6 * f, "grid {grid} vs {f}");
    }
}

#[test]
fn identity_example() {
    let r = brute_force_fmax(&DenseMatrix::eye(2, 2), 1, 1 << 24).unwrap();
    assert!((r.f_max - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(r.s_star.as_slice(), &[1, 1]);
}

#[test]
fn tau_star_matches_independent_enumeration() {
    for inst in instances(15, 3, 4, 2, 6, 23) {
        let lib = tau_star(&inst.x, inst.k, 14_348_907).unwrap();
        let xn = to_na(&inst.x);
        let zero_tol = 1e-9 * inst.x.column_norms().into_iter().fold(0.0, f64::max);
        let mut best = f64::INFINITY;
        for_each_pattern(inst.x.cols() * inst.k, &[-1.0, 0.0, 1.0], &mut |s| {
            let c = xs_na(&xn, s, inst.k);
            if c.iter().all(|&v| v == 0.0) {
                return;
            }
            let svd = c.clone().svd(true, true);
            let sv = &svd.singular_values;
            let smax = sv.max();
            // Rank-deficient X S has a non-unique U-factor; reuse the crate's.
            let u = if sv.iter().all(|&s| s > 1e-10 * smax) {
                polar_na(&c)
            } else {
                let d = DenseMatrix::new(c.nrows(), c.ncols(), c.transpose().as_slice().to_vec()).unwrap();
                to_na(polar_decompose(&d).unwrap().u.as_matrix())
            };
            let proj = xn.transpose() * u;
            for &p in proj.iter() {
                if p.abs() > zero_tol {
                    best = best.min(p.abs());
                }
            }
        });
        assert!((lib - best).abs() <= 1e-9 * best.max(1.0), "{}: {lib} vs {best}", inst.label);
    }
}

#[test]
fn singular_values_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for i in 0..200 {
        let n = 1 + i % 8;
        let m = n + i % 13;
        let c = if i % 5 == 0 { low_rank(&mut rng, m, n, n / 2) } else { gaussian(&mut rng, m, n) };
        let ours = singular_values(&c).unwrap();
        let mut theirs: Vec<f64> = to_na(&c).singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        let scale = theirs[0].max(1.0);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-12 * scale, "#{i}: {a} vs {b}");
        }
    }
}

#[test]
fn polar_factor_matches_nalgebra_for_full_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for i in 0..200 {
        let n = 1 + i % 6;
        let m = n + i % 9;
        let c = gaussian(&mut rng, m, n);
        let ours = polar_decompose(&c).unwrap();
        let theirs = polar_na(&to_na(&c));
        let diff = (to_na(ours.u.as_matrix()) - &theirs).norm();
        assert!(diff <= 1e-10, "#{i}: {diff:e}");
        // H = sqrt(C^T C) from the symmetric eigen-decomposition of C^T C.
        let ctc = to_na(&c).transpose() * to_na(&c);
        let eig = ctc.symmetric_eigen();
        let sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()))
            * eig.eigenvectors.transpose();
        let hdiff = (to_na(&ours.h) - sqrt).norm();
        assert!(hdiff <= 1e-8 * c.frobenius_norm().max(1.0), "#{i}: H {hdiff:e}");
    }
}

#[test]
fn compact_svd_reconstructs_and_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for i in 0..50 {
        let c = low_rank(&mut rng, 9, 5, i % 6);
        let a = compact_svd(&c).unwrap();
        let b = compact_svd(&c).unwrap();
        assert!(a.p.bits_eq(&b.p) && a.q.bits_eq(&b.q));
        assert_eq!(a.sigma.iter().map(|s| s.to_bits()).collect::<Vec<_>>(), b.sigma.iter().map(|s| s.to_bits()).collect::<Vec<_>>());
        assert!(a.reconstruct().sub(&c).unwrap().frobenius_norm() <= 1e-10 * c.frobenius_norm().max(1.0));
    }
}
