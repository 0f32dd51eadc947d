//! Exact rational arithmetic, base-2 logarithms, and an exact solver for
//! small zero-sum matrix games.
//!
//! Every probability, risk, and measure value in this crate is a [`Rational`]
//! (arbitrary-precision, always in lowest terms). Logarithms are the only
//! inexact quantities anywhere in the system; they are base 2 throughout
//! ("bits") and accurate to well below 1e-12, so inequalities involving a log
//! are asserted with 1e-9 slack.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, stored in lowest terms with positive
/// denominator. All arithmetic is exact.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor for small rationals. Panics on zero denominator,
/// which is fine for literals in tests and instance builders.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 2^-k as an exact rational.
pub fn pow2_inv(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Lossy conversion for rendering and for slack comparisons against
/// log-valued bounds. Uses a bit-shift path so huge numerators and
/// denominators cannot overflow the exponent.
pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.numer().is_negative() { -1.0 } else { 1.0 };
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    // log2 of the magnitude tells us whether a direct conversion is safe.
    let approx_bits = n.bits() as i64 - d.bits() as i64;
    if approx_bits.abs() < 900 {
        if let (Some(nf), Some(df)) = (n.to_f64(), d.to_f64()) {
            if nf.is_finite() && df.is_finite() && df != 0.0 {
                return sign * nf / df;
            }
        }
    }
    sign * (log2_biguint(n) - log2_biguint(d)).exp2()
}

fn log2_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 53 {
        n.to_f64().unwrap().log2()
    } else {
        let shift = bits - 53;
        let top = (n >> shift).to_f64().unwrap();
        top.log2() + shift as f64
    }
}

/// Binary logarithm of a positive rational.
///
/// Exact (an integer-valued f64) when the argument is a power of two;
/// otherwise accurate to absolute error far below 1e-12: the top 53 bits of
/// numerator and denominator carry relative error under 2^-52, and the
/// f64 `log2` adds at most an ulp.
pub fn log2(r: &Rational) -> Result<f64> {
    if r <= &Rational::zero() {
        return Err(Error::LogDomain);
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    if n.count_ones() == 1 && d.count_ones() == 1 {
        return Ok((n.bits() as i64 - d.bits() as i64) as f64);
    }
    Ok(log2_biguint(n) - log2_biguint(d))
}

/// log2 of a positive integer count.
pub fn log2_count(n: u64) -> f64 {
    assert!(n > 0, "log2_count needs a positive count");
    if n.count_ones() == 1 {
        n.trailing_zeros() as f64
    } else {
        (n as f64).log2()
    }
}

/// A finite two-player zero-sum game in matrix form. The row player picks a
/// mixed strategy over rows and pays `payoff[i][j]`; the row player minimizes,
/// the column player maximizes.
#[derive(Debug, Clone)]
pub struct MatrixGame {
    payoff: Vec<Vec<Rational>>,
}

impl MatrixGame {
    pub fn new(payoff: Vec<Vec<Rational>>) -> Result<Self> {
        if payoff.is_empty() || payoff[0].is_empty() {
            return Err(Error::InvalidInput(
                "matrix game needs at least one row and one column".into(),
            ));
        }
        let cols = payoff[0].len();
        if payoff.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidInput("ragged payoff matrix".into()));
        }
        Ok(MatrixGame { payoff })
    }

    pub fn rows(&self) -> usize {
        self.payoff.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.payoff[i][j]
    }

    /// Expected payoff per column under a row mixture.
    pub fn column_payoffs(&self, strategy: &[Rational]) -> Vec<Rational> {
        (0..self.cols())
            .map(|j| {
                self.payoff
                    .iter()
                    .zip(strategy)
                    .map(|(row, p)| &row[j] * p)
                    .sum()
            })
            .collect()
    }
}

/// Exact minimax solution of a matrix game: the game value and one optimal
/// row mixture.
///
/// The game is normalized affinely so all entries lie in [1, 2] (value and
/// optimal strategies are equivariant under positive scaling and shifts,
/// and the normalized tableau is identical for scaled inputs, so the
/// returned support is scale-stable). The normalized game is then solved as
/// the standard LP `max sum(x) s.t. payoff^T x <= 1, x >= 0` with an exact
/// rational simplex using Bland's rule.
pub fn solve_matrix_game(game: &MatrixGame) -> (Rational, Vec<Rational>) {
    let m = game.rows();
    let k = game.cols();

    let mut lo = game.payoff[0][0].clone();
    let mut hi = lo.clone();
    for row in &game.payoff {
        for v in row {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
    }
    let range = &hi - &lo;
    if range.is_zero() {
        // Constant game: every strategy is optimal; return the first row.
        let mut strategy = vec![Rational::zero(); m];
        strategy[0] = Rational::one();
        return (lo, strategy);
    }

    let one = Rational::one();
    let norm = |v: &Rational| (v - &lo) / &range + &one;

    // Constraints: for each column j, sum_i B[i][j] x_i <= 1.
    let constraints: Vec<Vec<Rational>> = (0..k)
        .map(|j| (0..m).map(|i| norm(&game.payoff[i][j])).collect())
        .collect();
    let x = simplex_max_sum(&constraints);

    let total: Rational = x.iter().sum();
    debug_assert!(!total.is_zero(), "normalized game value must be positive");
    let value_norm = total.recip();
    let strategy: Vec<Rational> = x.iter().map(|xi| xi * &value_norm).collect();
    let value = (&value_norm - &one) * &range + &lo;
    (value, strategy)
}

/// Solve `max sum(x) s.t. C x <= 1, x >= 0` where every entry of `C` is
/// >= 1, by primal simplex on the slack basis with Bland's rule (no cycling,
/// exact rationals). Returns the optimal `x`.
fn simplex_max_sum(constraints: &[Vec<Rational>]) -> Vec<Rational> {
    let k = constraints.len();
    let m = constraints[0].len();
    let total = m + k;

    // tableau[i] = [coefficients over x and slacks | rhs]
    let mut tableau: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            let mut row = Vec::with_capacity(total + 1);
            row.extend(constraints[i].iter().cloned());
            for s in 0..k {
                row.push(if s == i {
                    Rational::one()
                } else {
                    Rational::zero()
                });
            }
            row.push(Rational::one());
            row
        })
        .collect();
    // Objective row holds reduced costs; positive entry => improving column.
    let mut objective: Vec<Rational> = (0..=total)
        .map(|j| {
            if j < m {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mut basis: Vec<usize> = (m..total).collect();

    loop {
        let Some(enter) = (0..total).find(|&j| objective[j] > Rational::zero()) else {
            break;
        };
        // Ratio test; Bland tie-break on the leaving basic variable index.
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[enter] > Rational::zero() {
                let ratio = &row[total] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pivot_row, _) = leave.expect("bounded LP cannot have an unbounded column");

        let pivot = tableau[pivot_row][enter].clone();
        for v in tableau[pivot_row].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..k {
            if i != pivot_row && !tableau[i][enter].is_zero() {
                let factor = tableau[i][enter].clone();
                for j in 0..=total {
                    let delta = &tableau[pivot_row][j] * &factor;
                    tableau[i][j] -= delta;
                }
            }
        }
        if !objective[enter].is_zero() {
            let factor = objective[enter].clone();
            for j in 0..=total {
                let delta = &tableau[pivot_row][j] * &factor;
                objective[j] -= delta;
            }
        }
        basis[pivot_row] = enter;
    }

    let mut x = vec![Rational::zero(); m];
    for (i, &b) in basis.iter().enumerate() {
        if b < m {
            x[b] = tableau[i][total].clone();
        }
    }
    x
}

/// Signed big integer from parts, used by tests cross-checking rational
/// arithmetic against a direct big-integer oracle.
pub fn bigint_from_sign_magnitude(negative: bool, magnitude: u64) -> BigInt {
    let sign = if magnitude == 0 {
        Sign::NoSign
    } else if negative {
        Sign::Minus
    } else {
        Sign::Plus
    };
    BigInt::from_biguint(sign, BigUint::from(magnitude))
}
