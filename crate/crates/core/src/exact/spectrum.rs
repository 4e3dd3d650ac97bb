use std::io::{self, Write};

use serde::{Serialize, Serializer};

use super::TruthTable;

/// Unnormalized in-place fast Walsh–Hadamard transform. The butterfly order
/// is fixed, so results are bit-identical from run to run.
pub fn fwht_in_place(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "transform length must be a power of two");
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// Fourier–Walsh coefficients `f̂(S) = E[f·χ_S]` under the uniform measure,
/// indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    coefficients: Vec<f64>,
}

/// Transform of a truth table, ternary values embedded as `-1, 0, 1`.
pub fn wht(t: &TruthTable) -> Spectrum {
    Spectrum::of_reals(t.arity(), t.as_reals())
}

impl Spectrum {
    /// Transform of an arbitrary real function given by its values.
    pub fn of_reals(n: usize, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), 1 << n);
        fwht_in_place(&mut values);
        // A set bit is +1, while the butterfly treats it as the -1 side.
        let scale = (-(n as i32) as f64).exp2();
        for (mask, v) in values.iter_mut().enumerate() {
            *v *= if mask.count_ones() % 2 == 0 { scale } else { -scale };
        }
        Spectrum { n, coefficients: values }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, mask: usize) -> f64 {
        self.coefficients[mask]
    }

    /// `Σ_S f̂(S)²`, equal to `E[f²]`.
    pub fn parseval_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// Weight per level: entry `m` is `Σ_{|S| = m} f̂(S)²`.
    pub fn level_weights(&self) -> Vec<f64> {
        self.level_cross_weights(self)
    }

    /// Entry `m` is `Σ_{|S| = m} f̂(S)·ĝ(S)`.
    pub fn level_cross_weights(&self, other: &Spectrum) -> Vec<f64> {
        assert_eq!(self.n, other.n);
        let mut out = vec![0.0; self.n + 1];
        for (mask, (a, b)) in self.coefficients.iter().zip(&other.coefficients).enumerate() {
            out[mask.count_ones() as usize] += a * b;
        }
        out
    }

    /// `Σ_S f̂(S)·ĝ(S)`, equal to `E[f·g]`.
    pub fn inner_product(&self, other: &Spectrum) -> f64 {
        self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a * b).sum()
    }

    /// `Σ_S ρ^{|S|} f̂(S)²` = `E[f(ω) f(ω')]` for `ρ`-correlated `ω, ω'`.
    pub fn stability(&self, rho: f64) -> f64 {
        polynomial_in_rho(&self.level_weights(), rho)
    }

    /// `(mask, coefficient)` for every coefficient that is not exactly zero.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coefficients.iter().copied().enumerate().filter(|(_, c)| *c != 0.0)
    }

    /// CSV with columns `mask,coefficient`, masks in hex; zero coefficients omitted.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "mask,coefficient")?;
        for (mask, c) in self.nonzero() {
            writeln!(w, "{mask:#x},{c}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CoefficientRow {
    mask: String,
    coefficient: f64,
}

impl Serialize for Spectrum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            coefficients: Vec<CoefficientRow>,
        }
        Repr {
            n: self.n,
            coefficients: self.nonzero().map(|(m, c)| CoefficientRow { mask: format!("{m:#x}"), coefficient: c }).collect(),
        }
        .serialize(s)
    }
}

/// Horner evaluation of `Σ_m weights[m]·ρ^m`.
pub(crate) fn polynomial_in_rho(weights: &[f64], rho: f64) -> f64 {
    weights.iter().rev().fold(0.0, |acc, w| acc * rho + w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{Constant, Majority, Parity, TieRule};
    use crate::hypercube::Ternary;
    use approx::assert_abs_diff_eq;

    // Direct O(4^n) transform.
    fn naive(values: &[f64], n: usize) -> Vec<f64> {
        (0..1usize << n)
            .map(|s| {
                values
                    .iter()
                    .enumerate()
                    .map(|(x, v)| {
                        // χ_S(x) = Π_{i∈S} x_i with x_i = +1 iff bit set.
                        let minus = (s & !x).count_ones();
                        if minus % 2 == 0 { *v } else { -*v }
                    })
                    .sum::<f64>()
                    / (1u64 << n) as f64
            })
            .collect()
    }

    #[test]
    fn parity_is_a_character() {
        let s = wht(&TruthTable::build(&Parity::new(4)).unwrap());
        for (mask, c) in s.coefficients().iter().enumerate() {
            assert_eq!(*c, if mask == 0xf { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn majority_of_three() {
        let t = TruthTable::build(&Majority::new(3, TieRule::Error).unwrap()).unwrap();
        let s = wht(&t);
        let expected = naive(&t.as_reals(), 3);
        assert_eq!(s.coefficients(), expected.as_slice());
        for mask in [1, 2, 4] {
            assert_eq!(s.coefficient(mask), 0.5);
        }
        assert_eq!(s.coefficient(7), -0.5);
        assert_eq!(s.nonzero().count(), 4);
    }

    #[test]
    fn constant_plus() {
        let s = wht(&TruthTable::build(&Constant::new(3, Ternary::Plus)).unwrap());
        assert_eq!(s.coefficient(0), 1.0);
        assert_eq!(s.nonzero().count(), 1);
    }

    #[test]
    fn fast_matches_naive_on_random_reals() {
        use rand::Rng;
        let mut rng = crate::rng::RandomStream::new(1, 1).rng();
        let vals: Vec<f64> = (0..64).map(|_| rng.random::<f64>() - 0.5).collect();
        let s = Spectrum::of_reals(6, vals.clone());
        for (a, b) in s.coefficients().iter().zip(naive(&vals, 6)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn csv_and_json_export() {
        let s = wht(&TruthTable::build(&Majority::new(3, TieRule::Error).unwrap()).unwrap());
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "mask,coefficient\n0x1,0.5\n0x2,0.5\n0x4,0.5\n0x7,-0.5\n");
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["coefficients"][3]["mask"], "0x7");
    }
}
