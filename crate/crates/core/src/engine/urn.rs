//! Three-colour urn with two drawings. Red, black and green balls stand for
//! `+1`, `-1` and `0` steps.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::rng::{below, rademacher, uniform};
use crate::theory::MemoryParam;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Red,
    Black,
    Green,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UrnState {
    pub red: u64,
    pub black: u64,
    pub green: u64,
}

impl UrnState {
    pub fn total(&self) -> u64 {
        self.red + self.black + self.green
    }

    /// Completed draws.
    pub fn draws(&self) -> u64 {
        self.total() - 2
    }

    /// `R - B`, distributed as the walk position after `total()` steps.
    pub fn imbalance(&self) -> i64 {
        self.red as i64 - self.black as i64
    }

    pub fn counts(&self) -> [u64; 3] {
        [self.red, self.black, self.green]
    }

    fn add(mut self, c: Color) -> Self {
        match c {
            Color::Red => self.red += 1,
            Color::Black => self.black += 1,
            Color::Green => self.green += 1,
        }
        self
    }
}

/// `(2,0,0)`, `(1,1,0)`, `(0,2,0)` with probabilities `¼, ½, ¼`.
pub fn urn_init<R: RngCore + ?Sized>(rng: &mut R) -> UrnState {
    let mut u = UrnState {
        red: 0,
        black: 0,
        green: 0,
    };
    for _ in 0..2 {
        u = u.add(if rademacher(rng, 0.5) > 0 {
            Color::Red
        } else {
            Color::Black
        });
    }
    u
}

/// Colour law of the added ball for an unordered drawn pair, as
/// `[P(red), P(black), P(green)]`.
pub fn replacement_row(p: f64, a: Color, b: Color) -> [f64; 3] {
    use Color::*;
    let q = 1.0 - p;
    match (a, b) {
        (Red, Red) => [p * p, q * q, 2.0 * p * q],
        (Red, Black) | (Black, Red) => [p * q, p * q, p * p + q * q],
        (Red, Green) | (Green, Red) => [p, q, 0.0],
        (Black, Black) => [q * q, p * p, 2.0 * p * q],
        (Black, Green) | (Green, Black) => [q, p, 0.0],
        (Green, Green) => [0.0, 0.0, 1.0],
    }
}

fn draw<R: RngCore + ?Sized>(u: &UrnState, rng: &mut R) -> Color {
    let k = below(rng, u.total());
    if k < u.red {
        Color::Red
    } else if k < u.red + u.black {
        Color::Black
    } else {
        Color::Green
    }
}

pub fn urn_step<R: RngCore + ?Sized>(p: MemoryParam, u: UrnState, rng: &mut R) -> UrnState {
    let a = draw(&u, rng);
    let b = draw(&u, rng);
    let row = replacement_row(p.value(), a, b);
    let x = uniform(rng);
    let added = if x < row[0] {
        Color::Red
    } else if x < row[0] + row[1] {
        Color::Black
    } else {
        Color::Green
    };
    u.add(added)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::rng::SeedSpec;

    #[test]
    fn rows_are_distributions() {
        use Color::*;
        for p in [0.1, 0.5, 0.93] {
            for a in [Red, Black, Green] {
                for b in [Red, Black, Green] {
                    let r = replacement_row(p, a, b);
                    assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-15);
                    assert_eq!(r, replacement_row(p, b, a));
                }
            }
        }
    }

    #[test]
    fn all_red_start_adds_red_with_p_squared() {
        let p = MemoryParam::new(0.7).unwrap();
        let mut rng = SeedSpec::new(8).replica_rng(0);
        let start = UrnState {
            red: 2,
            black: 0,
            green: 0,
        };
        let trials = 200_000;
        let reds = (0..trials)
            .filter(|_| urn_step(p, start, &mut rng).red == 3)
            .count() as f64
            / trials as f64;
        assert!((reds - 0.49).abs() < 4.0 * (0.49f64 * 0.51 / trials as f64).sqrt());
    }

    #[test]
    fn mixed_pair_green_weight() {
        let p = 0.8;
        assert!((replacement_row(p, Color::Red, Color::Black)[2] - 0.68).abs() < 1e-15);
    }

    #[test]
    fn total_grows_by_one() {
        let p = MemoryParam::new(0.6).unwrap();
        let mut rng = SeedSpec::new(9).replica_rng(0);
        let mut u = urn_init(&mut rng);
        assert_eq!((u.total(), u.green), (2, 0));
        for k in 1..=500 {
            u = urn_step(p, u, &mut rng);
            assert_eq!(u.total(), 2 + k);
        }
    }
}
