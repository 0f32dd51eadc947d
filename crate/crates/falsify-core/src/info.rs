//! Induced distributions, Bayes posteriors, KL divergence, information gain,
//! and mutual information for finite channels.
//!
//! Conventions: the prior defaults to uniform when a caller has no better
//! one; `0 * log(0/q) = 0`; the gain at an output with zero induced mass is
//! a typed error rather than a sentinel.

use std::fmt::Debug;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{log2, Rational};

/// A probability distribution on a finite ordered set of atoms, with exact
/// rational masses summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution<A> {
    atoms: Vec<A>,
    mass: Vec<Rational>,
}

impl<A: Clone + PartialEq + Debug> FiniteDistribution<A> {
    pub fn new(pairs: Vec<(A, Rational)>) -> Result<Self> {
        let mut atoms = Vec::with_capacity(pairs.len());
        let mut mass = Vec::with_capacity(pairs.len());
        for (a, p) in pairs {
            if atoms.contains(&a) {
                return Err(Error::InvalidInput(format!("duplicate atom {a:?}")));
            }
            if p < Rational::zero() {
                return Err(Error::InvalidInput(format!("negative mass on {a:?}")));
            }
            atoms.push(a);
            mass.push(p);
        }
        let total: Rational = mass.iter().sum();
        if total != Rational::from_integer(1.into()) {
            return Err(Error::InvalidInput(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(FiniteDistribution { atoms, mass })
    }

    pub fn uniform(atoms: Vec<A>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("empty support".into()));
        }
        let n = atoms.len();
        let p = Rational::new(1.into(), (n as i64).into());
        Ok(FiniteDistribution {
            atoms,
            mass: vec![p; n],
        })
    }

    pub fn point_mass(atom: A) -> Self {
        FiniteDistribution {
            atoms: vec![atom],
            mass: vec![Rational::from_integer(1.into())],
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[A] {
        &self.atoms
    }

    pub fn mass_of(&self, atom: &A) -> Rational {
        match self.atoms.iter().position(|a| a == atom) {
            Some(i) => self.mass[i].clone(),
            None => Rational::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&A, &Rational)> {
        self.atoms.iter().zip(self.mass.iter())
    }

    /// Atoms with nonzero mass.
    pub fn support(&self) -> impl Iterator<Item = &A> {
        self.iter().filter(|(_, p)| !p.is_zero()).map(|(a, _)| a)
    }

    pub fn total_mass(&self) -> Rational {
        self.mass.iter().sum()
    }
}

impl FiniteDistribution<Rational> {
    /// Expectation of a distribution whose atoms are themselves values.
    pub fn mean(&self) -> Rational {
        self.iter().map(|(a, p)| a * p).sum()
    }
}

/// A noisy channel from a finite input set to a finite output set:
/// `conditional[x][y]` is the probability of output `y` given input `x`,
/// so each inner vector is a distribution over the outputs.
#[derive(Debug, Clone)]
pub struct Channel<A, B> {
    inputs: Vec<A>,
    outputs: Vec<B>,
    conditional: Vec<Vec<Rational>>,
}

impl<A: Clone + PartialEq + Debug, B: Clone + PartialEq + Debug> Channel<A, B> {
    pub fn new(inputs: Vec<A>, outputs: Vec<B>, conditional: Vec<Vec<Rational>>) -> Result<Self> {
        if inputs.is_empty() || outputs.is_empty() {
            return Err(Error::InvalidInput("channel needs inputs and outputs".into()));
        }
        if conditional.len() != inputs.len() {
            return Err(Error::InvalidInput(
                "one conditional row per input required".into(),
            ));
        }
        for (x, row) in inputs.iter().zip(&conditional) {
            if row.len() != outputs.len() {
                return Err(Error::InvalidInput(format!(
                    "conditional row for {x:?} has wrong arity"
                )));
            }
            if row.iter().any(|p| *p < Rational::zero()) {
                return Err(Error::InvalidInput(format!(
                    "negative conditional mass at input {x:?}"
                )));
            }
            let total: Rational = row.iter().sum();
            if total != Rational::from_integer(1.into()) {
                return Err(Error::InvalidInput(format!(
                    "conditional at input {x:?} sums to {total}, not 1"
                )));
            }
        }
        Ok(Channel {
            inputs,
            outputs,
            conditional,
        })
    }

    /// Embed a deterministic function as a channel with 0/1 conditionals.
    pub fn deterministic(inputs: Vec<A>, outputs: Vec<B>, f: impl Fn(&A) -> B) -> Result<Self> {
        let one = Rational::from_integer(1.into());
        let conditional = inputs
            .iter()
            .map(|x| {
                let fx = f(x);
                let Some(j) = outputs.iter().position(|y| *y == fx) else {
                    return Err(Error::InvalidInput(format!(
                        "function value {fx:?} not in output set"
                    )));
                };
                let mut row = vec![Rational::zero(); outputs.len()];
                row[j] = one.clone();
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Channel::new(inputs, outputs, conditional)
    }

    pub fn inputs(&self) -> &[A] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[B] {
        &self.outputs
    }

    pub fn conditional(&self, y: &B, x: &A) -> Result<Rational> {
        let i = self
            .inputs
            .iter()
            .position(|a| a == x)
            .ok_or_else(|| Error::InvalidInput(format!("unknown input {x:?}")))?;
        let j = self
            .outputs
            .iter()
            .position(|b| b == y)
            .ok_or_else(|| Error::InvalidInput(format!("unknown output {y:?}")))?;
        Ok(self.conditional[i][j].clone())
    }

    pub fn uniform_prior(&self) -> FiniteDistribution<A> {
        FiniteDistribution::uniform(self.inputs.clone()).expect("channel inputs are nonempty")
    }
}

/// Pushforward of the prior through the channel: `y -> sum_x prior(x) p(y|x)`.
pub fn induced_distribution<A, B>(
    channel: &Channel<A, B>,
    prior: &FiniteDistribution<A>,
) -> Result<FiniteDistribution<B>>
where
    A: Clone + PartialEq + Debug,
    B: Clone + PartialEq + Debug,
{
    let weights = prior_weights(channel, prior)?;
    let mass: Vec<Rational> = (0..channel.outputs.len())
        .map(|j| {
            weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * &channel.conditional[i][j])
                .sum()
        })
        .collect();
    FiniteDistribution::new(channel.outputs.iter().cloned().zip(mass).collect())
}

fn prior_weights<A, B>(
    channel: &Channel<A, B>,
    prior: &FiniteDistribution<A>,
) -> Result<Vec<Rational>>
where
    A: Clone + PartialEq + Debug,
    B: Clone + PartialEq + Debug,
{
    for (a, p) in prior.iter() {
        if !p.is_zero() && !channel.inputs.contains(a) {
            return Err(Error::InvalidInput(format!(
                "prior atom {a:?} outside the channel input set"
            )));
        }
    }
    Ok(channel
        .inputs
        .iter()
        .map(|x| prior.mass_of(x))
        .collect())
}

/// Bayes posterior on the inputs after observing output `y`.
pub fn bayes_posterior<A, B>(
    channel: &Channel<A, B>,
    y: &B,
    prior: &FiniteDistribution<A>,
) -> Result<FiniteDistribution<A>>
where
    A: Clone + PartialEq + Debug,
    B: Clone + PartialEq + Debug,
{
    let weights = prior_weights(channel, prior)?;
    let j = channel
        .outputs
        .iter()
        .position(|b| b == y)
        .ok_or(Error::UndefinedPosterior)?;
    let evidence: Rational = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * &channel.conditional[i][j])
        .sum();
    if evidence.is_zero() {
        return Err(Error::UndefinedPosterior);
    }
    let pairs = channel
        .inputs
        .iter()
        .cloned()
        .zip(
            weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * &channel.conditional[i][j] / &evidence),
        )
        .collect();
    FiniteDistribution::new(pairs)
}

/// `D(p || q)` in bits. Requires the two distributions to share an atom set;
/// infinite divergence (p-mass where q has none) is a typed error.
pub fn kl_divergence<A>(p: &FiniteDistribution<A>, q: &FiniteDistribution<A>) -> Result<f64>
where
    A: Clone + PartialEq + Debug,
{
    if p.len() != q.len() || p.atoms().iter().any(|a| !q.atoms().contains(a)) {
        return Err(Error::InvalidInput(
            "kl divergence needs a shared atom set".into(),
        ));
    }
    let mut total = 0.0;
    for (a, pa) in p.iter() {
        if pa.is_zero() {
            continue;
        }
        let qa = q.mass_of(a);
        if qa.is_zero() {
            return Err(Error::DivergenceInfinite);
        }
        total += crate::numerics::to_f64(pa) * log2(&(pa / &qa))?;
    }
    Ok(total)
}

/// Bayesian information gain of observing output `y`: the KL divergence of
/// the posterior from the prior. For a deterministic channel under the
/// uniform prior this equals `-log2` of the induced mass of `y`.
pub fn info_gain<A, B>(
    channel: &Channel<A, B>,
    y: &B,
    prior: &FiniteDistribution<A>,
) -> Result<f64>
where
    A: Clone + PartialEq + Debug,
    B: Clone + PartialEq + Debug,
{
    let posterior = match bayes_posterior(channel, y, prior) {
        Err(Error::UndefinedPosterior) => return Err(Error::UndefinedGain),
        other => other?,
    };
    kl_divergence(&posterior, prior)
}

/// Mutual information across the channel: the expected information gain
/// under the induced output distribution.
pub fn mutual_information<A, B>(
    channel: &Channel<A, B>,
    prior: &FiniteDistribution<A>,
) -> Result<f64>
where
    A: Clone + PartialEq + Debug,
    B: Clone + PartialEq + Debug,
{
    let induced = induced_distribution(channel, prior)?;
    let mut total = 0.0;
    for (y, py) in induced.iter() {
        if py.is_zero() {
            continue;
        }
        total += crate::numerics::to_f64(py) * info_gain(channel, y, prior)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    fn det_channel(m: usize, f: impl Fn(usize) -> u8) -> Channel<usize, u8> {
        Channel::deterministic((0..m).collect(), vec![0, 1], |x| f(*x)).unwrap()
    }

    #[test]
    fn induced_constant_function() {
        let ch = det_channel(2, |_| 0);
        let induced = induced_distribution(&ch, &ch.uniform_prior()).unwrap();
        assert_eq!(induced.mass_of(&0), rat(1, 1));
        assert_eq!(induced.mass_of(&1), rat(0, 1));
    }

    #[test]
    fn induced_counts_preimages() {
        // f^{-1}(0) = {0} over a 4-point domain.
        let ch = det_channel(4, |x| u8::from(x != 0));
        let induced = induced_distribution(&ch, &ch.uniform_prior()).unwrap();
        assert_eq!(induced.mass_of(&0), rat(1, 4));
        assert_eq!(induced.mass_of(&1), rat(3, 4));
        assert_eq!(induced.total_mass(), rat(1, 1));
    }

    #[test]
    fn induced_binary_symmetric_channel() {
        // Flip probability 1/3, uniform prior: hand oracle gives (1/2, 1/2).
        let ch = Channel::new(
            vec![0usize, 1],
            vec![0u8, 1],
            vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]],
        )
        .unwrap();
        let induced = induced_distribution(&ch, &ch.uniform_prior()).unwrap();
        assert_eq!(induced.mass_of(&0), rat(1, 2));
        assert_eq!(induced.mass_of(&1), rat(1, 2));
    }

    #[test]
    fn posterior_is_uniform_on_fiber() {
        let ch = det_channel(4, |x| u8::from(x != 0));
        let posterior = bayes_posterior(&ch, &1, &ch.uniform_prior()).unwrap();
        assert_eq!(posterior.mass_of(&0), rat(0, 1));
        for x in 1..4 {
            assert_eq!(posterior.mass_of(&x), rat(1, 3));
        }
    }

    #[test]
    fn posterior_undefined_outside_image() {
        let ch = det_channel(2, |_| 0);
        assert_eq!(
            bayes_posterior(&ch, &1, &ch.uniform_prior()),
            Err(Error::UndefinedPosterior)
        );
        assert_eq!(
            info_gain(&ch, &1, &ch.uniform_prior()),
            Err(Error::UndefinedGain)
        );
    }

    #[test]
    fn kl_of_identical_distributions_is_zero() {
        let p = FiniteDistribution::uniform(vec![0, 1, 2]).unwrap();
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_point_mass_against_uniform_four() {
        let q = FiniteDistribution::uniform(vec![0, 1, 2, 3]).unwrap();
        let p = FiniteDistribution::new(vec![
            (0, rat(1, 1)),
            (1, rat(0, 1)),
            (2, rat(0, 1)),
            (3, rat(0, 1)),
        ])
        .unwrap();
        assert!((kl_divergence(&p, &q).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kl_half_half_vs_quarter_three_quarters() {
        let p = FiniteDistribution::new(vec![(0, rat(1, 2)), (1, rat(1, 2))]).unwrap();
        let q = FiniteDistribution::new(vec![(0, rat(1, 4)), (1, rat(3, 4))]).unwrap();
        // High-precision oracle: 0.5*log2(2) + 0.5*log2(2/3).
        let expected = 0.5 + 0.5 * (2.0f64 / 3.0).log2();
        assert!((kl_divergence(&p, &q).unwrap() - expected).abs() < 1e-9);
        assert!((kl_divergence(&p, &q).unwrap() - 0.20751874963942).abs() < 1e-9);
    }

    #[test]
    fn kl_detects_infinite_divergence() {
        let p = FiniteDistribution::new(vec![(0, rat(1, 2)), (1, rat(1, 2))]).unwrap();
        let q = FiniteDistribution::new(vec![(0, rat(1, 1)), (1, rat(0, 1))]).unwrap();
        assert_eq!(kl_divergence(&p, &q), Err(Error::DivergenceInfinite));
    }

    #[test]
    fn gain_on_deterministic_fibers() {
        let ch = det_channel(4, |x| u8::from(x != 0));
        let prior = ch.uniform_prior();
        assert!((info_gain(&ch, &0, &prior).unwrap() - 2.0).abs() < 1e-12);
        let expected = -(3.0f64 / 4.0).log2();
        assert!((info_gain(&ch, &1, &prior).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn gain_one_bit_for_balanced_fiber() {
        let ch = det_channel(4, |x| u8::from(x >= 2));
        let prior = ch.uniform_prior();
        assert!((info_gain(&ch, &0, &prior).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gain_zero_iff_constant() {
        // Exhaustive over all f: X -> {0,1} with |X| <= 4.
        for m in 1..=4usize {
            for code in 0..(1u32 << m) {
                let ch = det_channel(m, |x| ((code >> x) & 1) as u8);
                let prior = ch.uniform_prior();
                let constant = code == 0 || code == (1 << m) - 1;
                for y in [0u8, 1] {
                    match info_gain(&ch, &y, &prior) {
                        Ok(g) => {
                            let is_constant_value =
                                constant && ((y == 0) == (code == 0));
                            assert_eq!(g == 0.0, is_constant_value, "m={m} code={code} y={y}");
                        }
                        Err(Error::UndefinedGain) => {
                            // y outside the image; cannot be the constant value.
                        }
                        Err(e) => panic!("unexpected error {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn mutual_information_matches_expected_gain() {
        let ch = det_channel(4, |x| u8::from(x != 0));
        let prior = ch.uniform_prior();
        let mi = mutual_information(&ch, &prior).unwrap();
        let expected = 0.25 * 2.0 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((mi - expected).abs() < 1e-9);
        assert!((mi - 0.8112781244591).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_identity_channel() {
        let ch = Channel::deterministic(vec![0u8, 1], vec![0u8, 1], |x| *x).unwrap();
        let mi = mutual_information(&ch, &ch.uniform_prior()).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_constant_channel_is_zero() {
        let ch = det_channel(3, |_| 1);
        assert_eq!(mutual_information(&ch, &ch.uniform_prior()).unwrap(), 0.0);
    }

    #[test]
    fn randomized_channels_expected_gain_identity() {
        // The mutual-information identity on a grid of small random-ish
        // channels with exact rational entries.
        for seed in 0..60u64 {
            let nx = 2 + (seed % 5) as usize;
            let ny = 2 + (seed / 12 % 5) as usize;
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) % 5
            };
            let conditional: Vec<Vec<Rational>> = (0..nx)
                .map(|_| {
                    let raw: Vec<u64> = (0..ny).map(|_| next() + 1).collect();
                    let total: u64 = raw.iter().sum();
                    raw.iter()
                        .map(|&w| Rational::new((w as i64).into(), (total as i64).into()))
                        .collect()
                })
                .collect();
            let ch = Channel::new((0..nx).collect(), (0..ny as u8).collect(), conditional).unwrap();
            let prior = ch.uniform_prior();
            let mi = mutual_information(&ch, &prior).unwrap();
            let mut expected = 0.0;
            let induced = induced_distribution(&ch, &prior).unwrap();
            for (y, py) in induced.iter() {
                if !py.is_zero() {
                    expected += crate::numerics::to_f64(py) * info_gain(&ch, y, &prior).unwrap();
                }
            }
            assert!((mi - expected).abs() < 1e-9);
        }
    }
}
