//! Square Gray-coded QAM.
//!
//! A symbol of `2k` bits uses the first `k` bits for the in-phase axis and the
//! last `k` for quadrature, MSB first. On each axis the Gray word `g` is
//! converted to its binary index `i` and placed at level `(2^k - 1) - 2i`, so
//! all-zero bits give the most positive level (4-QAM `00` is `(1 + j)/√2`).

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct QamMap {
    order: usize,
    bits_per_axis: usize,
    scale: f64,
}

fn gray_to_binary(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

impl QamMap {
    pub fn new(order: usize) -> Result<Self> {
        if !matches!(order, 4 | 16 | 64 | 256) {
            return Err(Error::Config(format!("unsupported QAM order {order}, expected 4, 16, 64 or 256")));
        }
        let bits_per_axis = order.trailing_zeros() as usize / 2;
        // Mean square of a centered L-PAM alphabet with spacing 2 is (L² - 1)/3 per axis.
        let scale = 1.0 / (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
        Ok(Self { order, bits_per_axis, scale })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    pub fn bits_per_axis(&self) -> usize {
        self.bits_per_axis
    }

    /// Amplitude of one axis step (half the minimum distance).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn axis_level(&self, bits: &[u8]) -> f64 {
        let g = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let i = gray_to_binary(g);
        let top = (1usize << self.bits_per_axis) - 1;
        (top as f64 - 2.0 * i as f64) * self.scale
    }

    fn axis_bits(&self, v: f64, out: &mut Vec<u8>) {
        let top = (1usize << self.bits_per_axis) - 1;
        let i = ((top as f64 - v / self.scale) / 2.0).round().clamp(0.0, top as f64) as usize;
        let g = i ^ (i >> 1);
        for b in (0..self.bits_per_axis).rev() {
            out.push(((g >> b) & 1) as u8);
        }
    }

    pub fn map(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let per = self.bits_per_symbol();
        if !bits.len().is_multiple_of(per) {
            return Err(Error::Size(format!("{} bits is not a multiple of {per}", bits.len())));
        }
        let k = self.bits_per_axis;
        Ok(bits.chunks_exact(per).map(|c| Complex64::new(self.axis_level(&c[..k]), self.axis_level(&c[k..]))).collect())
    }

    /// Minimum-distance hard decisions, per axis.
    pub fn demap(&self, points: &[Complex64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(points.len() * self.bits_per_symbol());
        for p in points {
            self.axis_bits(p.re, &mut out);
            self.axis_bits(p.im, &mut out);
        }
        out
    }

    /// Nearest constellation point.
    pub fn slice(&self, p: Complex64) -> Complex64 {
        let bits = self.demap(&[p]);
        self.map(&bits).expect("one symbol of bits")[0]
    }

    /// All points, indexed by their bit pattern.
    pub fn alphabet(&self) -> Vec<Complex64> {
        let per = self.bits_per_symbol();
        (0..self.order)
            .map(|s| {
                let bits: Vec<u8> = (0..per).rev().map(|b| ((s >> b) & 1) as u8).collect();
                self.map(&bits).expect("one symbol of bits")[0]
            })
            .collect()
    }
}
