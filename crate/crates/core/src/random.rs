//! Seeded random matrices and states.

use crate::linalg::{CMatrix, HermitianMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for partition `k` of a run started with `seed` (splitmix64 step).
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_c64<R: Rng + ?Sized>(r: &mut R) -> C64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, r: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(r))
}

/// Haar-distributed unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(n: usize, r: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian_c64(r)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, r: &mut R) -> HermitianMatrix {
    HermitianMatrix::outer(&random_pure_vector(n, r))
}

/// Hermitian matrix with independent Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, r: &mut R) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&ginibre(n, n, r))
}

/// Full-rank density matrix G G† / tr (Hilbert-Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(n: usize, r: &mut R) -> HermitianMatrix {
    let g = ginibre(n, n, r);
    let p = HermitianMatrix::hermitian_part(&(&g * &g.adjoint()));
    let t = p.trace();
    p.scale(1.0 / t)
}

/// Density matrix of rank `k` (G is n×k).
pub fn random_density_rank<R: Rng + ?Sized>(n: usize, k: usize, r: &mut R) -> HermitianMatrix {
    let g = ginibre(n, k, r);
    let p = HermitianMatrix::hermitian_part(&(&g * &g.adjoint()));
    let t = p.trace();
    p.scale(1.0 / t)
}

/// Unnormalized full-rank psd matrix with trace scale in (0.1, 10).
pub fn random_psd<R: Rng + ?Sized>(n: usize, r: &mut R) -> HermitianMatrix {
    let scale: f64 = 10f64.powf(r.random_range(-1.0..1.0));
    random_density(n, r).scale(scale)
}

/// Kraus operators of a random channel: stack of k Ginibre blocks,
/// orthonormalized so that Σ K†K = I.
pub fn random_kraus<R: Rng + ?Sized>(d_in: usize, d_out: usize, k: usize, r: &mut R) -> Vec<CMatrix> {
    let blocks: Vec<CMatrix> = (0..k).map(|_| ginibre(d_out, d_in, r)).collect();
    let mut s = HermitianMatrix::zeros(d_in);
    for b in &blocks {
        s += &HermitianMatrix::hermitian_part(&(&b.adjoint() * b));
    }
    let inv = crate::linalg::pseudo_inv_sqrt(&s, 1e-12);
    blocks.iter().map(|b| b * inv.matrix()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_are_normalized_and_psd() {
        let mut r = rng(1);
        for n in 1..5 {
            let rho = random_density(n, &mut r);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(rho.min_eigenvalue() > 0.0);
        }
    }

    #[test]
    fn kraus_sets_are_trace_preserving() {
        let mut r = rng(2);
        let ks = random_kraus(3, 2, 4, &mut r);
        let mut s = CMatrix::zeros(3, 3);
        for k in &ks {
            s = &s + &(&k.adjoint() * k);
        }
        assert!((&s - &CMatrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_stream() {
        let a = random_pure_vector(4, &mut rng(9));
        let b = random_pure_vector(4, &mut rng(9));
        assert_eq!(a, b);
        assert_ne!(derive_seed(9, 0), derive_seed(9, 1));
    }
}
