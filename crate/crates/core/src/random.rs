//! Random states, observables, and POVMs for property checks and sweeps.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::measurement::{Effect, Povm};
use crate::qcore::{ComplexMatrix, StateDescriptor};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::new(rows, cols, (0..rows * cols).map(|_| gaussian(rng)).collect()).expect("shape")
}

/// Haar-distributed pure state.
pub fn pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateDescriptor {
    StateDescriptor::normalized((0..dim).map(|_| gaussian(rng)).collect()).expect("gaussian vector has positive norm")
}

/// Full-rank density operator `G G† / Tr(G G†)` with complex Gaussian `G`.
pub fn density_operator<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateDescriptor {
    let g = gaussian_matrix(dim, dim, rng);
    let w = g.matmul(&g.adjoint()).expect("square");
    let tr = w.trace().expect("square").re;
    // symmetrize away rounding so the Hermiticity check sees exact symmetry
    let rho = w.add(&w.adjoint()).expect("square").scale(0.5 / tr);
    StateDescriptor::Mixed(rho)
}

/// Either a pure state or a density operator, with equal odds.
pub fn state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateDescriptor {
    if rng.random_bool(0.5) {
        pure_state(dim, rng)
    } else {
        density_operator(dim, rng)
    }
}

/// Hermitian matrix `(G + G†)/2`.
pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    g.add(&g.adjoint()).expect("square").scale(0.5)
}

/// Random `outcomes`-element POVM on dimension `dim`.
///
/// A random isometry `V` of shape `(outcomes·dim)×dim` is split into square
/// blocks `V_k`; the effects `V_k† V_k` then sum to `V†V = I`.
pub fn povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Povm {
    let rows = outcomes * dim;
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while columns.len() < dim {
        let mut v: Vec<Complex64> = (0..rows).map(|_| gaussian(rng)).collect();
        for u in &columns {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        columns.push(v);
    }
    let effects = (0..outcomes)
        .map(|k| {
            let mut block = ComplexMatrix::zeros(dim, dim);
            for (j, col) in columns.iter().enumerate() {
                for i in 0..dim {
                    block.set(i, j, col[k * dim + i]);
                }
            }
            let m = block.adjoint().matmul(&block).expect("square");
            let m = m.add(&m.adjoint()).expect("square").scale(0.5);
            Effect::new(format!("{k}"), m)
        })
        .collect();
    Povm::new(effects).expect("isometry blocks form a POVM")
}
