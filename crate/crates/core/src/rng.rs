//! Seeded random streams.
//!
//! Every randomized routine takes an explicit `seed` and draws from
//! ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with `seed_from_u64(seed)`.
//! Independent sub-streams (one per tensor mode, one per retry, ...) are
//! obtained with `set_stream`, so results do not depend on evaluation order.
//! Gaussian variates come from `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::Matrix;

/// Generator for `seed` on sub-stream `stream`.
pub fn seeded(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `rows × cols` matrix with i.i.d. standard normal entries, filled column by column.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    Matrix::from_vec(rows, cols, data)
}

/// Matrix with `cols` orthonormal columns, from the QR factor of a Gaussian matrix.
pub fn orthonormal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    assert!(cols <= rows, "cannot build {cols} orthonormal columns in R^{rows}");
    let g = gaussian_matrix(rng, rows, cols);
    crate::linalg::thin_qr(&g).0
}
