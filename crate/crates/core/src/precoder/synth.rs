//! Precoder synthesis and the low-rank fast path.
//!
//! `W` is the unitary matrix nearest to the masked conjugate DFT `Fᴴ ⊙ M`.
//! Because the pattern `M` is block diagonal up to a permutation (active
//! positions, null positions), the projection splits into one projection per
//! block. Each block is rotated into a real basis with [`hermitian_basis`],
//! projected there and rotated back, which keeps `P = F W` real.
//!
//! Some masks make a block singular (for `N = 256, Z = 2` the null block is
//! `[[1, 1], [1, 1]]/√N` and the active block loses one rank as well), so the
//! nearest unitary matrix is not unique. The tie is broken by requiring `P` to
//! be a proper rotation (`det P = +1`); the reflection alternative collapses
//! two of the nulling directions into a single `-1` eigenvalue.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    centered_to_natural, nearest_unitary, svd, ComplexMatrix, Direction, RealMatrix, UnitaryFft,
};
use crate::precoder::mask::SpectralMask;

/// Relative cutoff for the compact SVD of `E`.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Counts of scalar operations performed by the fast path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpTally {
    pub macs: u64,
    pub adds: u64,
}

/// Static cost of the fast path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpCount {
    /// Multiplies for `x + U_rΣ_r V_rᵀ x`: `2·N·r`.
    pub encode_macs: u64,
    /// Multiplies of a single factor pass: `N·r`.
    pub per_pass_macs: u64,
    /// Reals held in `U_rΣ_r` and `V_r`: `2·N·r`.
    pub storage_reals: u64,
}

/// Synthesised precoder with dense and factored forms.
#[derive(Clone, Debug)]
pub struct Precoder {
    mask: SpectralMask,
    w: ComplexMatrix,
    p: RealMatrix,
    us_r: RealMatrix,
    u_r: RealMatrix,
    sigma_r: Vec<f64>,
    v_r: RealMatrix,
}

/// Residuals measured on a synthesised precoder.
#[derive(Clone, Copy, Debug)]
pub struct Diagnostics {
    pub unitarity: f64,
    pub orthogonality: f64,
    pub realness: f64,
    pub distance_from_identity: f64,
}

/// Unitary `C` whose rows pair each position with its mirror `-k`, so that
/// `C·A` is real whenever row `-k` of `A` is the conjugate of row `k`.
///
/// A pair `(k, -k)` becomes `(e_k + e_-k)/√2` and `-j(e_k - e_-k)/√2`;
/// the self-mirrored bins `0` and `-N/2` keep `e_k`.
pub fn hermitian_basis(positions: &[usize], n: usize) -> Result<ComplexMatrix> {
    let size = positions.len();
    let local = |p: usize| positions.iter().position(|&x| x == p);
    let half = n / 2;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut c = ComplexMatrix::zeros(size, size);
    let mut row = 0;
    for (i, &p) in positions.iter().enumerate() {
        if p == 0 || p == half {
            c[(row, i)] = Complex64::new(1.0, 0.0);
            row += 1;
        } else if p > half {
            let j = local(n - p)
                .ok_or_else(|| Error::Symmetry(format!("bin {} has no mirror in its block", p as i64 - half as i64)))?;
            c[(row, i)] = Complex64::new(r, 0.0);
            c[(row, j)] = Complex64::new(r, 0.0);
            c[(row + 1, i)] = Complex64::new(0.0, -r);
            c[(row + 1, j)] = Complex64::new(0.0, r);
            row += 2;
        }
    }
    if row != size {
        return Err(Error::Symmetry("block is not closed under k -> -k".into()));
    }
    Ok(c)
}

/// Entry `(p, q)` of `Fᴴ`: `exp(-j2π k_p q / N)/√N` with `k_p = p - N/2`.
fn conj_dft(n: usize, p: usize, q: usize) -> Complex64 {
    let k = p as i64 - n as i64 / 2;
    let phase = -2.0 * std::f64::consts::PI * ((k * q as i64).rem_euclid(n as i64)) as f64 / n as f64;
    Complex64::from_polar(1.0 / (n as f64).sqrt(), phase)
}

/// `Fᴴ ⊙ M` in centered layout.
pub fn masked_conj_dft(mask: &SpectralMask) -> ComplexMatrix {
    let n = mask.n_total();
    ComplexMatrix::from_fn(n, n, |p, q| {
        if mask.position_active(p) == mask.position_active(q) {
            conj_dft(n, p, q)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

struct Block {
    positions: Vec<usize>,
    c: ComplexMatrix,
    r: RealMatrix,
    /// Last completed singular pair, if the block was rank deficient.
    free: Option<(Vec<f64>, Vec<f64>)>,
}

fn project_block(a: &ComplexMatrix, positions: Vec<usize>, n: usize) -> Result<Block> {
    let c = hermitian_basis(&positions, n)?;
    let sub = ComplexMatrix::from_fn(positions.len(), positions.len(), |i, j| a[(positions[i], positions[j])]);
    let g = c.matmul(&sub)?;
    let imag = g.max_imag();
    if imag > 1e-10 {
        return Err(Error::Synthesis(format!("real-basis block has imaginary part {imag:e}")));
    }
    let (r, f) = nearest_unitary(&g.re())?;
    let size = positions.len();
    let free = (f.rank < size).then(|| (f.u.col(size - 1).to_vec(), f.v.col(size - 1).to_vec()));
    Ok(Block { positions, c, r, free })
}

fn assemble_w(n: usize, blocks: &[Block]) -> Result<ComplexMatrix> {
    let mut w = ComplexMatrix::zeros(n, n);
    for b in blocks {
        let wb = b.c.adjoint().matmul(&b.r.to_complex())?;
        for (i, &p) in b.positions.iter().enumerate() {
            for (j, &q) in b.positions.iter().enumerate() {
                w[(p, q)] = wb[(i, j)];
            }
        }
    }
    Ok(w)
}

/// `F W` with rows in time order and columns in input-position order.
fn composite(w: &ComplexMatrix, fft: &UnitaryFft) -> Result<ComplexMatrix> {
    let n = w.rows();
    let mut p = ComplexMatrix::zeros(n, n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for q in 0..n {
        for (pos, &v) in w.col(q).iter().enumerate() {
            buf[centered_to_natural(pos as i64 - n as i64 / 2, n)] = v;
        }
        fft.process(&mut buf, Direction::Inverse)?;
        p.col_mut(q).copy_from_slice(&buf);
    }
    Ok(p)
}

/// `Fᴴ P` back in centered layout.
fn precoder_from_composite(p: &RealMatrix, fft: &UnitaryFft) -> Result<ComplexMatrix> {
    let n = p.rows();
    let mut w = ComplexMatrix::zeros(n, n);
    for q in 0..n {
        let spec = fft.forward_real(p.col(q))?;
        for pos in 0..n {
            w[(pos, q)] = spec[centered_to_natural(pos as i64 - n as i64 / 2, n)];
        }
    }
    Ok(w)
}

/// Compact SVD of `E = P - I`.
fn nulling_factors(p: &RealMatrix) -> Result<(RealMatrix, Vec<f64>, RealMatrix)> {
    let n = p.rows();
    let e = p.sub(&RealMatrix::identity(n))?;
    let f = svd(&e)?;
    let smax = f.sigma.first().copied().unwrap_or(0.0);
    // The cutoff is relative to max(σ_max, ‖P‖₂ = 1) so that E = 0 up to rounding has rank 0.
    let r = f.sigma.iter().filter(|&&s| s > RANK_CUTOFF * smax.max(1.0)).count();
    let u_r = RealMatrix::from_fn(n, r, |i, j| f.u[(i, j)]);
    let v_r = RealMatrix::from_fn(n, r, |i, j| f.v[(i, j)]);
    Ok((u_r, f.sigma[..r].to_vec(), v_r))
}

impl Precoder {
    /// Builds `W`, `P` and the factors of `E` for `mask`.
    pub fn synthesize(mask: &SpectralMask) -> Result<Self> {
        let n = mask.n_total();
        let fft = UnitaryFft::new(n)?;
        let a = masked_conj_dft(mask);
        let active: Vec<usize> = (0..n).filter(|&p| mask.position_active(p)).collect();
        let null: Vec<usize> = (0..n).filter(|&p| !mask.position_active(p)).collect();
        let mut blocks = Vec::new();
        for positions in [active, null] {
            if !positions.is_empty() {
                blocks.push(project_block(&a, positions, n)?);
            }
        }

        let mut w = assemble_w(n, &blocks)?;
        let mut pc = composite(&w, &fft)?;
        if pc.re().det_sign()? < 0 {
            if let Some(b) = blocks.iter_mut().rev().find(|b| b.free.is_some()) {
                let (u, v) = b.free.as_ref().expect("checked above");
                let size = b.positions.len();
                for i in 0..size {
                    for j in 0..size {
                        b.r[(i, j)] -= 2.0 * u[i] * v[j];
                    }
                }
                w = assemble_w(n, &blocks)?;
                pc = composite(&w, &fft)?;
            }
        }

        let realness = pc.max_imag();
        if realness >= 1e-10 {
            return Err(Error::Synthesis(format!("F W is not real: max imaginary part {realness:e}")));
        }
        Self::finish(mask.clone(), w, pc.re(), None)
    }

    /// Rebuilds a precoder from a dense composite matrix, recomputing the factors.
    pub fn from_composite(mask: &SpectralMask, p: RealMatrix) -> Result<Self> {
        Self::from_parts(mask, p, None)
    }

    /// Rebuilds a precoder from `P` and, if given, the stored factors `U_rΣ_r`
    /// and `V_r`. `σ_r` is recovered from the column norms of `U_rΣ_r`.
    pub fn from_parts(mask: &SpectralMask, p: RealMatrix, factors: Option<(RealMatrix, RealMatrix)>) -> Result<Self> {
        let n = mask.n_total();
        if p.rows() != n || p.cols() != n {
            return Err(Error::Size(format!("composite is {}x{}, mask has N={n}", p.rows(), p.cols())));
        }
        let fft = UnitaryFft::new(n)?;
        let mut w = precoder_from_composite(&p, &fft)?;
        for q in 0..n {
            for pos in 0..n {
                if mask.position_active(pos) != mask.position_active(q) {
                    if w[(pos, q)].norm() >= 1e-12 {
                        return Err(Error::Synthesis(format!("entry ({pos}, {q}) breaks the pattern")));
                    }
                    w[(pos, q)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Self::finish(mask.clone(), w, p, factors)
    }

    fn finish(
        mask: SpectralMask,
        w: ComplexMatrix,
        p: RealMatrix,
        factors: Option<(RealMatrix, RealMatrix)>,
    ) -> Result<Self> {
        let n = mask.n_total();
        for q in 0..n {
            for pos in 0..n {
                if mask.position_active(pos) != mask.position_active(q) && w[(pos, q)] != Complex64::new(0.0, 0.0) {
                    return Err(Error::Synthesis(format!("entry ({pos}, {q}) breaks the pattern")));
                }
            }
        }
        let unitarity = w.unitarity_residual();
        if unitarity >= 1e-10 {
            return Err(Error::Synthesis(format!("W is not unitary: residual {unitarity:e}")));
        }
        let orth = p.unitarity_residual();
        if orth >= 1e-10 {
            return Err(Error::Synthesis(format!("P is not orthogonal: residual {orth:e}")));
        }
        let (us_r, u_r, sigma_r, v_r) = match factors {
            Some((us_r, v_r)) => {
                if us_r.rows() != n || v_r.rows() != n || us_r.cols() != v_r.cols() {
                    return Err(Error::Size("factor shapes do not match N".into()));
                }
                let sigma_r: Vec<f64> =
                    (0..us_r.cols()).map(|j| us_r.col(j).iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
                let u_r = RealMatrix::from_fn(n, us_r.cols(), |i, j| us_r[(i, j)] / sigma_r[j]);
                let recon = u_r.matmul(&RealMatrix::from_diag(&sigma_r))?.matmul(&v_r.transpose())?;
                let err = recon.sub(&p.sub(&RealMatrix::identity(n))?)?.max_abs();
                if err >= 1e-10 {
                    return Err(Error::Synthesis(format!("stored factors do not reproduce P - I: {err:e}")));
                }
                (us_r, u_r, sigma_r, v_r)
            }
            None => {
                let (u_r, sigma_r, v_r) = nulling_factors(&p)?;
                let mut us_r = u_r.clone();
                for (j, &s) in sigma_r.iter().enumerate() {
                    for x in us_r.col_mut(j) {
                        *x *= s;
                    }
                }
                (us_r, u_r, sigma_r, v_r)
            }
        };
        Ok(Self { mask, w, p, us_r, u_r, sigma_r, v_r })
    }

    pub fn mask(&self) -> &SpectralMask {
        &self.mask
    }

    pub fn n(&self) -> usize {
        self.mask.n_total()
    }

    /// `W` in centered layout: row = frequency position, column = input position.
    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    /// Dense composite `P = F W`.
    pub fn p(&self) -> &RealMatrix {
        &self.p
    }

    pub fn u_r(&self) -> &RealMatrix {
        &self.u_r
    }

    /// `U_r Σ_r`.
    pub fn us_r(&self) -> &RealMatrix {
        &self.us_r
    }

    pub fn sigma_r(&self) -> &[f64] {
        &self.sigma_r
    }

    pub fn v_r(&self) -> &RealMatrix {
        &self.v_r
    }

    pub fn rank(&self) -> usize {
        self.sigma_r.len()
    }

    pub fn op_count(&self) -> OpCount {
        let nr = (self.n() * self.rank()) as u64;
        OpCount { encode_macs: 2 * nr, per_pass_macs: nr, storage_reals: 2 * nr }
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let n = self.n();
        let fft = UnitaryFft::new(n).expect("valid length");
        let realness = composite(&self.w, &fft).map(|c| c.max_imag()).unwrap_or(f64::INFINITY);
        Diagnostics {
            unitarity: self.w.unitarity_residual(),
            orthogonality: self.p.unitarity_residual(),
            realness,
            distance_from_identity: self.p.sub(&RealMatrix::identity(n)).expect("square").frobenius_norm(),
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::Size(format!("vector of length {} for N = {}", x.len(), self.n())));
        }
        Ok(())
    }

    /// `x + a (bᵀ x)` for factor pair `(a, b)`, counting scalar operations.
    fn low_rank_update(&self, a: &RealMatrix, b: &RealMatrix, x: &[f64], tally: &mut OpTally) -> Vec<f64> {
        let n = x.len() as u64;
        let mut y = x.to_vec();
        for j in 0..self.rank() {
            let t: f64 = b.col(j).iter().zip(x).map(|(bi, xi)| bi * xi).sum();
            for (yi, ai) in y.iter_mut().zip(a.col(j)) {
                *yi += ai * t;
            }
            tally.macs += 2 * n;
        }
        tally.adds += n;
        y
    }

    /// `P x = x + U_rΣ_r V_rᵀ x`.
    pub fn encode_fast(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.encode_fast_counted(x, &mut OpTally::default())
    }

    pub fn encode_fast_counted(&self, x: &[f64], tally: &mut OpTally) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.low_rank_update(&self.us_r, &self.v_r, x, tally))
    }

    /// `Pᵀ y = y + V_r Σ_r U_rᵀ y`.
    pub fn decode_fast(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.decode_fast_counted(y, &mut OpTally::default())
    }

    pub fn decode_fast_counted(&self, y: &[f64], tally: &mut OpTally) -> Result<Vec<f64>> {
        self.check_len(y)?;
        let n = self.n() as u64;
        let mut out = y.to_vec();
        for j in 0..self.rank() {
            let t: f64 = self.us_r.col(j).iter().zip(y).map(|(a, b)| a * b).sum();
            for (o, v) in out.iter_mut().zip(self.v_r.col(j)) {
                *o += v * t;
            }
            tally.macs += 2 * n;
        }
        tally.adds += n;
        Ok(out)
    }

    /// Dense `P x`, kept as a test oracle.
    pub fn encode_dense(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        self.p.mul_vec(x)
    }

    /// Dense `Pᵀ y`, kept as a test oracle.
    pub fn decode_dense(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        self.p.adjoint_mul_vec(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::project_unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_active_mask_gives_identity() {
        let pre = Precoder::synthesize(&SpectralMask::all_active(16).unwrap()).unwrap();
        assert_eq!(pre.rank(), 0);
        assert!(pre.p().sub(&RealMatrix::identity(16)).unwrap().max_abs() < 1e-12);
        let fh = masked_conj_dft(pre.mask());
        assert!(pre.w().sub(&fh).unwrap().max_abs() < 1e-12);
        assert_eq!(pre.op_count().encode_macs, 0);
    }

    #[test]
    fn hermitian_basis_is_unitary_and_realifies() {
        let mask = SpectralMask::build(32, 2, 3).unwrap();
        let a = masked_conj_dft(&mask);
        let active: Vec<usize> = (0..32).filter(|&p| mask.position_active(p)).collect();
        let c = hermitian_basis(&active, 32).unwrap();
        assert!(c.unitarity_residual() < 1e-15);
        let sub = ComplexMatrix::from_fn(active.len(), active.len(), |i, j| a[(active[i], active[j])]);
        assert!(c.matmul(&sub).unwrap().max_imag() < 1e-14);
    }

    #[test]
    fn full_rank_mask_matches_strict_projection() {
        let mask = SpectralMask::build(32, 2, 3).unwrap();
        let pre = Precoder::synthesize(&mask).unwrap();
        let direct = project_unitary(&masked_conj_dft(&mask)).unwrap();
        let diff = pre.w().sub(&direct).unwrap().max_abs();
        assert!(diff < 1e-9, "blockwise and direct projections differ by {diff:e}");
    }

    #[test]
    fn rank_deficient_mask_is_a_proper_rotation_with_rank_2z() {
        let mask = SpectralMask::build(256, 0, 0).unwrap();
        assert!(matches!(project_unitary(&masked_conj_dft(&mask)), Err(Error::Singular { .. })));
        let pre = Precoder::synthesize(&mask).unwrap();
        assert_eq!(pre.p().det_sign().unwrap(), 1);
        assert_eq!(pre.rank(), 4);
    }

    #[test]
    fn fast_path_matches_dense() {
        let pre = Precoder::synthesize(&SpectralMask::build(64, 0, 5).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = pre.encode_fast(&x).unwrap();
        let dense = pre.encode_dense(&x).unwrap();
        assert!(fast.iter().zip(&dense).all(|(a, b)| (a - b).abs() < 1e-10));
        let back = pre.decode_fast(&fast).unwrap();
        assert!(back.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-9));
        assert!(pre.encode_fast(&x[..10]).is_err());
    }

    #[test]
    fn tally_counts_two_n_r() {
        let pre = Precoder::synthesize(&SpectralMask::build(64, 0, 5).unwrap()).unwrap();
        let mut t = OpTally::default();
        pre.encode_fast_counted(&vec![0.5; 64], &mut t).unwrap();
        assert_eq!(t.macs, pre.op_count().encode_macs);
        assert_eq!(t.adds, 64);
    }

    #[test]
    fn composite_round_trip_rebuilds_precoder() {
        let mask = SpectralMask::build(32, 2, 3).unwrap();
        let pre = Precoder::synthesize(&mask).unwrap();
        let again = Precoder::from_composite(&mask, pre.p().clone()).unwrap();
        assert!(again.w().sub(pre.w()).unwrap().max_abs() < 1e-12);
        assert_eq!(again.rank(), pre.rank());
    }
}
