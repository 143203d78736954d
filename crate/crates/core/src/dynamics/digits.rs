//! Exact orbits of `k x mod 1` as shifts of an i.i.d. base-`k` digit stream.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::real::Real;

/// Default number of window digits.
pub const DEFAULT_WINDOW: usize = 64;

/// Lebesgue-random point of the circle under `x -> k x mod 1`.
///
/// The window holds digits `d_t .. d_{t+W-1}` as an integer; digits beyond
/// the window are drawn lazily into `ahead`.
#[derive(Clone, Debug)]
pub struct DigitOrbit {
    base: u32,
    window: usize,
    value: u128,
    high: u128,
    scale: f64,
    ahead: VecDeque<u8>,
    rng: ChaCha8Rng,
    chunk_digits: u32,
    chunk_bound: u64,
    time: u64,
}

impl DigitOrbit {
    pub fn new(base: u32, window: usize, rng: ChaCha8Rng) -> Self {
        assert!(base >= 2, "digit base must be at least 2");
        let max_w = (126.0 / (base as f64).log2()).floor() as usize;
        let window = window.clamp(1, max_w);
        let mut chunk_digits = 0u32;
        let mut chunk_bound: u64 = 1;
        while let Some(next) = chunk_bound.checked_mul(base as u64) {
            chunk_bound = next;
            chunk_digits += 1;
        }
        let mut orbit = DigitOrbit {
            base,
            window,
            value: 0,
            high: (base as u128).pow(window as u32 - 1),
            scale: (base as f64).powi(window as i32),
            ahead: VecDeque::new(),
            rng,
            chunk_digits,
            chunk_bound,
            time: 0,
        };
        for _ in 0..window {
            let d = orbit.next_digit();
            orbit.value = orbit.value * base as u128 + d as u128;
        }
        orbit
    }

    fn refill(&mut self) {
        if self.base == 2 {
            let bits: u64 = self.rng.gen();
            for i in (0..64).rev() {
                self.ahead.push_back(((bits >> i) & 1) as u8);
            }
            return;
        }
        let mut draw: u64 = if self.chunk_digits == 64 {
            self.rng.gen()
        } else {
            self.rng.gen_range(0..self.chunk_bound)
        };
        let mut digits = Vec::with_capacity(self.chunk_digits as usize);
        for _ in 0..self.chunk_digits {
            digits.push((draw % self.base as u64) as u8);
            draw /= self.base as u64;
        }
        self.ahead.extend(digits);
    }

    fn next_digit(&mut self) -> u8 {
        if self.ahead.is_empty() {
            self.refill();
        }
        self.ahead.pop_front().expect("refilled")
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Applies `f` once (left shift).
    pub fn advance(&mut self) {
        let d = self.next_digit();
        self.value = (self.value % self.high) * self.base as u128 + d as u128;
        self.time += 1;
    }

    /// Position from the window digits, accurate to `k^-W` plus rounding.
    pub fn position_f64(&self) -> f64 {
        self.value as f64 / self.scale
    }

    /// Exact rational truncation of the position to `W + extra` digits.
    pub fn position_rational(&mut self, extra: usize) -> BigRational {
        while self.ahead.len() < extra {
            self.refill();
        }
        let base = BigInt::from(self.base);
        let mut num = BigInt::from(self.value);
        for &d in self.ahead.iter().take(extra) {
            num = num * &base + BigInt::from(d);
        }
        let den = num_traits::pow(base, self.window + extra);
        BigRational::new(num, den)
    }

    /// Position with absolute error below `2^-bits`, extending the window
    /// with look-ahead digits as needed.
    pub fn position_hp(&mut self, bits: usize) -> Real {
        let per_digit = (self.base as f64).log2();
        let needed = (bits as f64 / per_digit).ceil() as usize + 2;
        let extra = needed.saturating_sub(self.window);
        let r = self.position_rational(extra);
        Real::from_rational(&r, bits + 16)
    }
}
