use num_bigint::BigInt;
use num_traits::Zero;

use super::BooleanFunction;
use crate::caps::{self, caps};
use crate::error::Result;
use crate::rational::Rational;

/// Walsh spectrum of the ±1 version of a function (`0 -> +1`, `1 -> -1`).
///
/// Coefficients are dyadic: `coefficient(S) = numerators[S] / 2^n`, so
/// Parseval reads `sum numerators^2 = 4^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierSpectrum {
    n: usize,
    numerators: Vec<i64>,
}

/// In-place unnormalized Walsh-Hadamard butterfly.
pub(crate) fn walsh_hadamard(data: &mut [i64]) {
    let mut h = 1;
    while h < data.len() {
        for block in data.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

pub fn fourier(f: &BooleanFunction) -> Result<FourierSpectrum> {
    caps::check("fourier n", f.n(), caps().table_n)?;
    let n = f.n();
    let mut data: Vec<i64> = (0..1u64 << n)
        .map(|x| if f.eval_index(x) { -1 } else { 1 })
        .collect();
    walsh_hadamard(&mut data);
    Ok(FourierSpectrum { n, numerators: data })
}

impl FourierSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, subset: u64) -> Rational {
        Rational::new(BigInt::from(self.numerators[subset as usize]), BigInt::from(1u64) << self.n)
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    /// Nonzero coefficients keyed by subset mask.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, Rational)> + '_ {
        self.numerators
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(s, _)| (s as u64, self.coefficient(s as u64)))
    }

    pub fn parseval_sum(&self) -> Rational {
        let num: BigInt = self.numerators.iter().map(|&c| BigInt::from(c) * c).sum();
        Rational::new(num, BigInt::from(1u64) << (2 * self.n))
    }

    /// The ±1 table recovered by the inverse transform.
    pub fn inverse(&self) -> Vec<i64> {
        let mut data = self.numerators.clone();
        walsh_hadamard(&mut data);
        data.iter().map(|v| v >> self.n).collect()
    }
}

/// Squared Fourier mass per level `0..=n`; sums to 1.
pub fn fourier_mass_by_level(spec: &FourierSpectrum) -> Vec<Rational> {
    let mut levels = vec![BigInt::zero(); spec.n + 1];
    for (s, &c) in spec.numerators.iter().enumerate() {
        if c != 0 {
            levels[s.count_ones() as usize] += BigInt::from(c) * c;
        }
    }
    let den = BigInt::from(1u64) << (2 * spec.n);
    levels.into_iter().map(|v| Rational::new(v, den.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use num_traits::One;

    #[test]
    fn parity_is_a_character() {
        for n in 1..=6 {
            let s = fourier(&BooleanFunction::parity(n).unwrap()).unwrap();
            let full = (1u64 << n) - 1;
            assert_eq!(s.coefficient(full), int(1));
            assert_eq!(s.nonzero().count(), 1);
        }
    }

    #[test]
    fn majority_of_three_levels() {
        let s = fourier(&BooleanFunction::maj(3).unwrap()).unwrap();
        assert_eq!(fourier_mass_by_level(&s), vec![int(0), rat(3, 4), int(0), rat(1, 4)]);
        assert_eq!(s.coefficient(0b001), rat(1, 2));
        assert_eq!(s.coefficient(0b111), rat(-1, 2));
    }

    #[test]
    fn constant_and_small_cases() {
        let s = fourier(&BooleanFunction::constant(4, false).unwrap()).unwrap();
        assert_eq!(s.coefficient(0), int(1));
        assert_eq!(s.nonzero().count(), 1);
        let lv = fourier_mass_by_level(&fourier(&BooleanFunction::parity(2).unwrap()).unwrap());
        assert_eq!(lv, vec![int(0), int(0), int(1)]);
    }

    #[test]
    fn empty_set_coefficient_tracks_bias() {
        let f = BooleanFunction::grid_crossing(3).unwrap();
        let s = fourier(&f).unwrap();
        let ones = f.count_ones().unwrap() as i64;
        assert_eq!(s.coefficient(0), Rational::one() - int(2) * rat(ones, 512));
    }

    #[test]
    fn round_trip_and_parseval() {
        let fs = [
            BooleanFunction::grid_crossing(3).unwrap(),
            BooleanFunction::tribes(3, 4).unwrap(),
            BooleanFunction::maj(11).unwrap(),
            BooleanFunction::maj2(3, 3).unwrap(),
        ];
        for f in &fs {
            let s = fourier(f).unwrap();
            assert!(s.parseval_sum().is_one());
            let back = s.inverse();
            for (x, v) in back.iter().enumerate() {
                assert_eq!(*v, if f.eval_index(x as u64) { -1 } else { 1 });
            }
        }
    }
}
