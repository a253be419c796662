//! Active/null subcarrier masks and the checkerboard pattern matrix.
//!
//! A mask is held in the centered layout used by the precoder matrices:
//! position `p = k + N/2` for centered frequency `k = -N/2..N/2`.

use crate::error::{Error, Result};
use crate::numerics::{centered_to_natural, RealMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralMask {
    n: usize,
    /// Indexed by position `k + N/2`.
    active: Vec<bool>,
    n_middle: Option<usize>,
    n_edge: Option<usize>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Config(format!("subcarrier count {n} is not an even power of two")));
    }
    Ok(())
}

impl SpectralMask {
    /// Structured mask: DC plus `n_middle` bins on each side of it are null,
    /// `n_edge + 1` bins at the lower band edge and `n_edge` at the upper edge.
    pub fn build(n: usize, n_middle: usize, n_edge: usize) -> Result<Self> {
        check_n(n)?;
        let nulls = 2 * (n_middle + n_edge + 1);
        if nulls + 2 > n {
            return Err(Error::Config(format!(
                "no active subcarriers remain: N={n}, N_middle={n_middle}, N_edge={n_edge}"
            )));
        }
        let half = n as i64 / 2;
        let (nm, ne) = (n_middle as i64, n_edge as i64);
        let active = (0..n)
            .map(|p| {
                let k = p as i64 - half;
                let middle = k.abs() <= nm;
                let lower = k <= -half + ne;
                let upper = k >= half - ne;
                !(middle || lower || upper)
            })
            .collect();
        Ok(Self { n, active, n_middle: Some(n_middle), n_edge: Some(n_edge) })
    }

    /// Mask with exactly the given centered active indices.
    pub fn from_active_set(n: usize, active_set: &[i64]) -> Result<Self> {
        check_n(n)?;
        let half = n as i64 / 2;
        let mut active = vec![false; n];
        for &k in active_set {
            if k < -half || k >= half {
                return Err(Error::Config(format!("bin {k} outside -{half}..{half}")));
            }
            active[(k + half) as usize] = true;
        }
        if active[0] {
            return Err(Error::Symmetry(format!("edge bin -{half} has no mirror and must be null")));
        }
        for k in 1..half {
            if active[(k + half) as usize] != active[(half - k) as usize] {
                return Err(Error::Symmetry(format!("bin {k} and bin -{k} differ")));
            }
        }
        if !active.iter().any(|&a| a) {
            return Err(Error::Config("no active subcarriers".into()));
        }
        Ok(Self { n, active, n_middle: None, n_edge: None })
    }

    /// Every bin active (`Z = 0`). Not Hermitian-symmetric at `-N/2`; only
    /// meaningful as the degenerate precoder `W = Fᴴ`.
    pub fn all_active(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, active: vec![true; n], n_middle: None, n_edge: None })
    }

    pub fn n_total(&self) -> usize {
        self.n
    }

    pub fn n_middle(&self) -> Option<usize> {
        self.n_middle
    }

    pub fn n_edge(&self) -> Option<usize> {
        self.n_edge
    }

    /// Active count `M`.
    pub fn m_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Null count `Z = N - M`.
    pub fn z_null(&self) -> usize {
        self.n - self.m_active()
    }

    /// Whether centered bin `k` is active.
    pub fn is_active(&self, k: i64) -> bool {
        self.active[(k + self.n as i64 / 2) as usize]
    }

    /// Whether matrix position `p` (centered bin `p - N/2`) is active.
    pub fn position_active(&self, p: usize) -> bool {
        self.active[p]
    }

    /// Whether natural-order storage slot `b` is active.
    pub fn bin_active(&self, b: usize) -> bool {
        self.is_active(crate::numerics::natural_to_centered(b, self.n))
    }

    /// Ascending centered active indices.
    pub fn active_set(&self) -> Vec<i64> {
        let half = self.n as i64 / 2;
        (0..self.n).filter(|&p| self.active[p]).map(|p| p as i64 - half).collect()
    }

    /// Ascending centered null indices.
    pub fn null_set(&self) -> Vec<i64> {
        let half = self.n as i64 / 2;
        (0..self.n).filter(|&p| !self.active[p]).map(|p| p as i64 - half).collect()
    }

    /// Natural-order storage slots of the null bins.
    pub fn null_bins(&self) -> Vec<usize> {
        self.null_set().iter().map(|&k| centered_to_natural(k, self.n)).collect()
    }

    /// Natural-order storage slots of the active bins.
    pub fn active_bins(&self) -> Vec<usize> {
        self.active_set().iter().map(|&k| centered_to_natural(k, self.n)).collect()
    }

    /// The binary vector `m` in centered order.
    pub fn m(&self) -> Vec<u8> {
        self.active.iter().map(|&a| a as u8).collect()
    }

    /// Hermitian symmetry about DC with the lower edge bin null.
    pub fn is_symmetric(&self) -> bool {
        let half = self.n as i64 / 2;
        !self.is_active(-half) && (1..half).all(|k| self.is_active(k) == self.is_active(-k))
    }
}

/// Checkerboard pattern `M = m mᵀ + (1 - m)(1 - m)ᵀ` in centered order.
pub fn pattern_matrix(mask: &SpectralMask) -> RealMatrix {
    let m = mask.m();
    RealMatrix::from_fn(m.len(), m.len(), |i, j| if m[i] == m[j] { 1.0 } else { 0.0 })
}
