//! Statistical-learning measures on finite instances: risk, effective
//! hypotheses, soft/hard falsifiability, exact Rademacher complexity,
//! covering numbers, VC dimension, ERM, and the statistical verification
//! harness for the generalization-bound chain.
//!
//! Inputs are points of a finite domain `{0, .., m-1}`, labels are binary,
//! and a theory is a finite set of label vectors. All measures are exact
//! rationals except hard falsifiability, which carries one base-2 log.
//!
//! Sign conventions for the two Rademacher forms: the loss form correlates
//! signs with 0/1 losses, the class form with predictors mapped to
//! `2 f(x) - 1` in `{-1, +1}`. Under these conventions the exact identities
//! `F = 1 - 2 * rademacher_loss = 1 - rademacher` hold on distinct inputs.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::info::FiniteDistribution;
use crate::numerics::{log2_count, to_f64, Rational};

/// Hard ceiling for plain 2^n sign/labeling enumerations.
pub const RADEMACHER_MAX_N: usize = 20;
/// Hard ceiling for materialized risk profiles (2^n entries).
pub const PROFILE_MAX_N: usize = 16;
/// Hard ceiling on the domain size for exhaustive theory sweeps.
pub const SWEEP_MAX_DOMAIN: usize = 4;
/// Work budget for the grouped exact sign enumeration (product of
/// per-group state counts).
const GROUPED_WORK_BUDGET: u128 = 50_000_000;

/// `sqrt(2 / log2(e))`: deviation coefficient of the soft data-dependent bound.
pub const BOUND_C_SOFT: f64 = 1.177_410_022_515_474_6;
/// `sqrt(6 / log2(e))`: capacity coefficient of the hard data-dependent bound.
pub const BOUND_D1_HARD: f64 = 2.039_333_980_337_617_6;
/// `sqrt(1 / log2(e))`: deviation coefficient of the hard data-dependent bound.
pub const BOUND_D2_HARD: f64 = 0.832_554_611_157_697_9;
/// `sqrt(8)`: constant of the falsifiability chain inequality.
pub const CHAIN_D: f64 = 2.828_427_124_746_190_3;

/// A finite input domain; points are the indices `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidInput("domain must be nonempty".into()));
        }
        Ok(Domain { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A finite set of binary predictors over a domain, each stored as the label
/// vector `(f(0), .., f(m-1))`. Nonempty, duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    domain: Domain,
    predictors: Vec<Vec<u8>>,
}

impl Theory {
    pub fn new(domain: Domain, predictors: Vec<Vec<u8>>) -> Result<Self> {
        if predictors.is_empty() {
            return Err(Error::InvalidInput("theory must be nonempty".into()));
        }
        for (i, p) in predictors.iter().enumerate() {
            if p.len() != domain.size() {
                return Err(Error::InvalidInput(format!(
                    "predictor {i} has length {}, domain has size {}",
                    p.len(),
                    domain.size()
                )));
            }
            if p.iter().any(|&b| b > 1) {
                return Err(Error::InvalidInput(format!("predictor {i} has non-binary labels")));
            }
            if predictors[..i].contains(p) {
                return Err(Error::InvalidInput(format!("duplicate predictor {i}")));
            }
        }
        Ok(Theory { domain, predictors })
    }

    /// Build from bitmasks; bit `x` of a mask is the label at input `x`.
    pub fn from_masks(m: usize, masks: &[u32]) -> Result<Self> {
        let domain = Domain::new(m)?;
        let predictors = masks
            .iter()
            .map(|&mask| (0..m).map(|x| ((mask >> x) & 1) as u8).collect())
            .collect();
        Theory::new(domain, predictors)
    }

    /// All `2^m` label vectors.
    pub fn full_class(m: usize) -> Result<Self> {
        if m > 16 {
            return Err(Error::Capacity {
                what: "full hypothesis class",
                limit: 16,
                requested: m,
            });
        }
        let masks: Vec<u32> = (0..(1u32 << m)).collect();
        Theory::from_masks(m, &masks)
    }

    /// The two constant predictors.
    pub fn constants(m: usize) -> Result<Self> {
        let all_ones = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        Theory::from_masks(m, &[0, all_ones])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn size(&self) -> usize {
        self.predictors.len()
    }

    pub fn predictors(&self) -> &[Vec<u8>] {
        &self.predictors
    }

    pub fn label(&self, predictor: usize, x: usize) -> u8 {
        self.predictors[predictor][x]
    }

    /// A copy with one more predictor, for monotonicity checks.
    pub fn with_predictor(&self, predictor: Vec<u8>) -> Result<Self> {
        let mut predictors = self.predictors.clone();
        predictors.push(predictor);
        Theory::new(self.domain, predictors)
    }

    /// Restriction bitmask of a predictor to a point sequence: bit `t` is the
    /// label at `points[t]`.
    fn restriction_mask(&self, predictor: usize, points: &[usize]) -> u32 {
        points
            .iter()
            .enumerate()
            .fold(0u32, |acc, (t, &x)| acc | ((self.predictors[predictor][x] as u32) << t))
    }
}

/// A sequence of distinct inputs (repeated observation points are rejected,
/// not deduplicated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSequence {
    domain: Domain,
    points: Vec<usize>,
}

impl InputSequence {
    pub fn new(domain: Domain, points: Vec<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("input sequence must be nonempty".into()));
        }
        for (t, &x) in points.iter().enumerate() {
            if x >= domain.size() {
                return Err(Error::InvalidInput(format!("point {x} outside domain")));
            }
            if points[..t].contains(&x) {
                return Err(Error::InvalidInput(format!(
                    "repeated point {x}; input sequences must be distinct"
                )));
            }
        }
        Ok(InputSequence { domain, points })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }
}

/// Inputs plus one label per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    inputs: InputSequence,
    labels: Vec<u8>,
}

impl LabeledSample {
    pub fn new(inputs: InputSequence, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != inputs.len() {
            return Err(Error::InvalidInput("labels and inputs differ in length".into()));
        }
        if labels.iter().any(|&b| b > 1) {
            return Err(Error::InvalidInput("labels must be binary".into()));
        }
        Ok(LabeledSample { inputs, labels })
    }

    pub fn inputs(&self) -> &InputSequence {
        &self.inputs
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    fn events(&self) -> Vec<(usize, u8)> {
        self.inputs
            .points()
            .iter()
            .copied()
            .zip(self.labels.iter().copied())
            .collect()
    }
}

/// The risk of a theory on a fixed input sequence, tabulated over all `2^n`
/// effective hypotheses (labelings of the inputs). Entry `bits` holds the
/// mismatch count for the labeling whose position-`t` label is bit `t`.
#[derive(Debug, Clone)]
pub struct RiskProfile {
    inputs: InputSequence,
    mismatches: Vec<u32>,
}

impl RiskProfile {
    pub fn inputs(&self) -> &InputSequence {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.mismatches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Exact risk of one effective hypothesis.
    pub fn error(&self, labeling: &[u8]) -> Result<Rational> {
        if labeling.len() != self.inputs.len() {
            return Err(Error::InvalidInput("labeling length mismatch".into()));
        }
        let bits = labeling
            .iter()
            .enumerate()
            .fold(0usize, |acc, (t, &b)| acc | ((b as usize & 1) << t));
        Ok(self.error_at(bits))
    }

    fn error_at(&self, bits: usize) -> Rational {
        Rational::new(
            BigInt::from(self.mismatches[bits]),
            BigInt::from(self.inputs.len() as u32),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = Rational> + '_ {
        (0..self.mismatches.len()).map(|bits| self.error_at(bits))
    }
}

/// A distribution over events `(input, label)`.
#[derive(Debug, Clone)]
pub struct EventDistribution {
    domain: Domain,
    dist: FiniteDistribution<(usize, u8)>,
}

impl EventDistribution {
    pub fn new(domain: Domain, pairs: Vec<((usize, u8), Rational)>) -> Result<Self> {
        for ((x, y), _) in &pairs {
            if *x >= domain.size() {
                return Err(Error::InvalidInput(format!("event input {x} outside domain")));
            }
            if *y > 1 {
                return Err(Error::InvalidInput("event label must be binary".into()));
            }
        }
        Ok(EventDistribution {
            domain,
            dist: FiniteDistribution::new(pairs)?,
        })
    }

    pub fn uniform(domain: Domain, events: Vec<(usize, u8)>) -> Result<Self> {
        let n = events.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty event set".into()));
        }
        let p = Rational::new(1.into(), (n as i64).into());
        Self::new(domain, events.into_iter().map(|e| (e, p.clone())).collect())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, u8), &Rational)> {
        self.dist.iter()
    }

    pub fn mass(&self, event: (usize, u8)) -> Rational {
        self.dist.mass_of(&event)
    }

    fn sample(&self, rng: &mut impl Rng) -> (usize, u8) {
        let r: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = None;
        for (event, mass) in self.dist.iter() {
            acc += to_f64(mass);
            last = Some(*event);
            if r < acc {
                return *event;
            }
        }
        last.expect("distribution has atoms")
    }
}

fn check_domains(theory: &Theory, domain: Domain) -> Result<()> {
    if theory.domain() != domain {
        return Err(Error::InvalidInput("theory and instance domains differ".into()));
    }
    Ok(())
}

fn mismatch_count(theory: &Theory, predictor: usize, events: &[(usize, u8)]) -> usize {
    events
        .iter()
        .filter(|&&(x, y)| theory.predictors[predictor][x] != y)
        .count()
}

fn best_mismatches(theory: &Theory, events: &[(usize, u8)]) -> usize {
    (0..theory.size())
        .map(|f| mismatch_count(theory, f, events))
        .min()
        .expect("theory is nonempty")
}

/// Minimum over predictors of the average 0/1 loss on the sample.
pub fn empirical_risk(theory: &Theory, sample: &LabeledSample) -> Result<Rational> {
    check_domains(theory, sample.inputs().domain())?;
    let events = sample.events();
    Ok(Rational::new(
        BigInt::from(best_mismatches(theory, &events)),
        BigInt::from(events.len()),
    ))
}

/// Minimum over predictors of the exact expected 0/1 loss under the event
/// distribution.
pub fn distributional_risk(theory: &Theory, dist: &EventDistribution) -> Result<Rational> {
    check_domains(theory, dist.domain())?;
    (0..theory.size())
        .map(|f| predictor_distributional_risk(theory, f, dist))
        .min()
        .ok_or_else(|| Error::InvalidInput("empty theory".into()))
}

fn predictor_distributional_risk(
    theory: &Theory,
    predictor: usize,
    dist: &EventDistribution,
) -> Rational {
    dist.iter()
        .filter(|(&(x, y), _)| theory.predictors[predictor][x] != y)
        .map(|(_, mass)| mass.clone())
        .sum()
}

/// The exact risk of every effective hypothesis about the inputs.
pub fn risk_profile(theory: &Theory, inputs: &InputSequence) -> Result<RiskProfile> {
    check_domains(theory, inputs.domain())?;
    let n = inputs.len();
    if n > PROFILE_MAX_N {
        return Err(Error::Capacity {
            what: "risk profile enumeration",
            limit: PROFILE_MAX_N,
            requested: n,
        });
    }
    let restrictions: Vec<u32> = (0..theory.size())
        .map(|f| theory.restriction_mask(f, inputs.points()))
        .collect();
    let mismatches = (0..(1usize << n))
        .map(|bits| {
            restrictions
                .iter()
                .map(|&r| (r ^ bits as u32).count_ones())
                .min()
                .expect("theory is nonempty")
        })
        .collect();
    Ok(RiskProfile {
        inputs: inputs.clone(),
        mismatches,
    })
}

/// The risk-induced distribution on error values: mass of `eps` is the
/// fraction of effective hypotheses with risk exactly `eps`.
pub fn risk_induced_error_distribution(profile: &RiskProfile) -> FiniteDistribution<Rational> {
    let n = profile.inputs.len() as u32;
    let mut counts = vec![0u64; n as usize + 1];
    for &c in &profile.mismatches {
        counts[c as usize] += 1;
    }
    let total = profile.mismatches.len() as i64;
    let pairs = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| {
            (
                Rational::new((k as i64).into(), (n as i64).into()),
                Rational::new((c as i64).into(), total.into()),
            )
        })
        .collect();
    FiniteDistribution::new(pairs).expect("profile counts sum to 2^n")
}

fn sum_of_min_mismatches(restrictions: &[u32], n: usize) -> u64 {
    (0..(1u64 << n))
        .map(|bits| {
            restrictions
                .iter()
                .map(|&r| (r ^ bits as u32).count_ones() as u64)
                .min()
                .expect("nonempty restrictions")
        })
        .sum()
}

/// Soft falsifiability on fixed inputs: twice the expected error under the
/// risk-induced distribution, as an exact rational.
pub fn soft_falsifiability(theory: &Theory, inputs: &InputSequence) -> Result<Rational> {
    check_domains(theory, inputs.domain())?;
    let n = inputs.len();
    if n > RADEMACHER_MAX_N {
        return Err(Error::Capacity {
            what: "soft falsifiability enumeration",
            limit: RADEMACHER_MAX_N,
            requested: n,
        });
    }
    let restrictions: Vec<u32> = (0..theory.size())
        .map(|f| theory.restriction_mask(f, inputs.points()))
        .collect();
    let total = sum_of_min_mismatches(&restrictions, n);
    // F = 2 * total / (2^n * n)
    Ok(Rational::new(
        BigInt::from(2 * total),
        BigInt::from(n as u64) * (BigInt::one() << n),
    ))
}

/// Worst-case soft falsifiability over all `n`-point input sets. The risk is
/// permutation-invariant, so unordered subsets suffice.
pub fn soft_falsifiability_n(theory: &Theory, n: usize) -> Result<Rational> {
    subsets_inf(theory, n, |inputs| soft_falsifiability(theory, inputs))
}

/// Count of distinct labelings the theory realizes on the inputs.
pub fn covering_number(theory: &Theory, inputs: &InputSequence) -> Result<usize> {
    check_domains(theory, inputs.domain())?;
    let mut seen: Vec<u32> = (0..theory.size())
        .map(|f| theory.restriction_mask(f, inputs.points()))
        .collect();
    seen.sort_unstable();
    seen.dedup();
    Ok(seen.len())
}

/// Hard falsifiability on fixed inputs: the normalized information gain of
/// observing zero risk, `(n - log2 |zero-risk labelings|) / n`.
pub fn hard_falsifiability(theory: &Theory, inputs: &InputSequence) -> Result<f64> {
    let n = inputs.len() as f64;
    let cover = covering_number(theory, inputs)? as u64;
    Ok((n - log2_count(cover)) / n)
}

/// Worst-case hard falsifiability over all `n`-point input sets.
pub fn hard_falsifiability_n(theory: &Theory, n: usize) -> Result<f64> {
    check_domains(theory, theory.domain())?;
    let mut best: Option<f64> = None;
    for inputs in enumerate_input_subsets(theory.domain(), n)? {
        let g = hard_falsifiability(theory, &inputs)?;
        best = Some(match best {
            None => g,
            Some(b) => b.min(g),
        });
    }
    best.ok_or_else(|| Error::InvalidInput("no input subsets of requested size".into()))
}

fn subsets_inf(
    theory: &Theory,
    n: usize,
    mut value: impl FnMut(&InputSequence) -> Result<Rational>,
) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for inputs in enumerate_input_subsets(theory.domain(), n)? {
        let v = value(&inputs)?;
        best = Some(match best {
            None => v,
            Some(b) => b.min(v),
        });
    }
    best.ok_or_else(|| Error::InvalidInput("no input subsets of requested size".into()))
}

/// All sorted `n`-point subsets of the domain, as input sequences.
pub fn enumerate_input_subsets(domain: Domain, n: usize) -> Result<Vec<InputSequence>> {
    let m = domain.size();
    if n == 0 || n > m {
        return Err(Error::InvalidInput(format!(
            "subset size {n} out of range for domain of size {m}"
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(m: usize, n: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for x in start..m {
            current.push(x);
            rec(m, n, x + 1, current, out);
            current.pop();
        }
    }
    let mut raw = Vec::new();
    rec(m, n, 0, &mut current, &mut raw);
    for points in raw {
        out.push(InputSequence::new(domain, points)?);
    }
    Ok(out)
}

/// All ordered sequences of `n` distinct domain points.
pub fn enumerate_input_sequences(domain: Domain, n: usize) -> Result<Vec<InputSequence>> {
    let m = domain.size();
    if n == 0 || n > m {
        return Err(Error::InvalidInput(format!(
            "sequence length {n} out of range for domain of size {m}"
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(
        domain: Domain,
        n: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<InputSequence>,
    ) {
        if current.len() == n {
            out.push(InputSequence::new(domain, current.clone()).expect("distinct by construction"));
            return;
        }
        for x in 0..domain.size() {
            if !current.contains(&x) {
                current.push(x);
                rec(domain, n, current, out);
                current.pop();
            }
        }
    }
    rec(domain, n, &mut current, &mut out);
    Ok(out)
}

/// Does the theory realize all `2^n` labelings of the inputs?
pub fn shatters(theory: &Theory, inputs: &InputSequence) -> Result<bool> {
    Ok(covering_number(theory, inputs)? == 1usize << inputs.len())
}

/// Largest `n` such that some `n`-point subset is shattered, by brute force
/// over subsets.
pub fn vc_dimension(theory: &Theory) -> usize {
    let m = theory.domain().size();
    for n in (1..=m).rev() {
        let subsets = enumerate_input_subsets(theory.domain(), n).expect("valid range");
        if subsets
            .iter()
            .any(|s| shatters(theory, s).expect("same domain"))
        {
            return n;
        }
    }
    0
}

/// Empirical risk minimization. Ties break to the lowest predictor index, so
/// the strategy is deterministic.
pub fn erm(theory: &Theory, sample: &LabeledSample) -> Result<usize> {
    check_domains(theory, sample.inputs().domain())?;
    Ok(erm_on_events(theory, &sample.events()))
}

fn erm_on_events(theory: &Theory, events: &[(usize, u8)]) -> usize {
    (0..theory.size())
        .min_by_key(|&f| (mismatch_count(theory, f, events), f))
        .expect("theory is nonempty")
}

// ---------------------------------------------------------------------------
// Exact Rademacher complexity.
//
// The engine computes, over all 2^n sign vectors, the total of
// `sup_f sum_t zeta_t a_f(t)` where `a_f(t)` is predictor f's 0/1 loss column
// at position t. Positions with identical columns are grouped; the group's
// signed sum is binomially distributed, so the enumeration cost is the
// product of (group size + 1) over groups instead of 2^n.
// ---------------------------------------------------------------------------

struct SignedSupTotals {
    /// Total over sign vectors of `sup_f sum_t zeta_t a_f(t)` (0/1 columns).
    loss_total: i128,
    /// Same with columns mapped to `2 a - 1` in {-1,+1}.
    pm_total: i128,
    /// Number of sign vectors, `2^n`.
    weight: u128,
}

fn binomial_row(k: usize) -> Vec<u128> {
    let mut row = vec![1u128; k + 1];
    for j in 1..=k {
        row[j] = row[j - 1] * (k - j + 1) as u128 / j as u128;
    }
    row
}

fn signed_sup_totals(columns: &[u64], predictors: usize, budget: u128) -> Result<SignedSupTotals> {
    let n = columns.len();
    assert!(predictors <= 64, "predictor count exceeds column width");
    let mut groups: Vec<(u64, usize)> = Vec::new();
    for &c in columns {
        match groups.iter_mut().find(|(mask, _)| *mask == c) {
            Some((_, k)) => *k += 1,
            None => groups.push((c, 1)),
        }
    }
    let work: u128 = groups.iter().map(|&(_, k)| (k + 1) as u128).product();
    if work > budget {
        return Err(Error::Capacity {
            what: "grouped sign enumeration",
            limit: budget as usize,
            requested: work as usize,
        });
    }
    let binomials: Vec<Vec<u128>> = groups.iter().map(|&(_, k)| binomial_row(k)).collect();

    struct Ctx<'a> {
        groups: &'a [(u64, usize)],
        binomials: &'a [Vec<u128>],
        predictors: usize,
        loss_total: i128,
        pm_total: i128,
    }

    fn rec(ctx: &mut Ctx, g: usize, weight: u128, sums: &mut [i64], sign_sum: i64) {
        if g == ctx.groups.len() {
            let mut sup_loss = i64::MIN;
            let mut sup_pm = i64::MIN;
            for f in 0..ctx.predictors {
                sup_loss = sup_loss.max(sums[f]);
                sup_pm = sup_pm.max(2 * sums[f] - sign_sum);
            }
            ctx.loss_total += weight as i128 * sup_loss as i128;
            ctx.pm_total += weight as i128 * sup_pm as i128;
            return;
        }
        let (mask, k) = ctx.groups[g];
        for j in 0..=k {
            let s = 2 * j as i64 - k as i64;
            let w = weight * ctx.binomials[g][j];
            for f in 0..ctx.predictors {
                if (mask >> f) & 1 == 1 {
                    sums[f] += s;
                }
            }
            rec(ctx, g + 1, w, sums, sign_sum + s);
            for f in 0..ctx.predictors {
                if (mask >> f) & 1 == 1 {
                    sums[f] -= s;
                }
            }
        }
    }

    let mut ctx = Ctx {
        groups: &groups,
        binomials: &binomials,
        predictors,
        loss_total: 0,
        pm_total: 0,
    };
    let mut sums = vec![0i64; predictors];
    rec(&mut ctx, 0, 1, &mut sums, 0);
    Ok(SignedSupTotals {
        loss_total: ctx.loss_total,
        pm_total: ctx.pm_total,
        weight: 1u128 << n,
    })
}

fn loss_columns(theory: &Theory, events: &[(usize, u8)]) -> Vec<u64> {
    events
        .iter()
        .map(|&(x, y)| {
            (0..theory.size()).fold(0u64, |acc, f| {
                acc | (u64::from(theory.predictors[f][x] != y) << f)
            })
        })
        .collect()
}

fn totals_to_rational(total: i128, weight: u128, n: usize) -> Rational {
    Rational::new(
        BigInt::from(total),
        BigInt::from(weight) * BigInt::from(n as u64),
    )
}

/// Exact Rademacher complexity, class form: expectation over all sign vectors
/// of `sup_f (1/n) sum_t zeta_t (2 f(x_t) - 1)`.
pub fn rademacher(theory: &Theory, inputs: &InputSequence) -> Result<Rational> {
    check_domains(theory, inputs.domain())?;
    check_rademacher_len(inputs.len())?;
    let events: Vec<(usize, u8)> = inputs.points().iter().map(|&x| (x, 0)).collect();
    let columns = loss_columns(theory, &events);
    let totals = signed_sup_totals(&columns, theory.size(), GROUPED_WORK_BUDGET)?;
    Ok(totals_to_rational(totals.pm_total, totals.weight, inputs.len()))
}

/// Exact Rademacher complexity with respect to the 0/1 loss. Label
/// independent; computed with the all-zero labeling.
pub fn rademacher_loss(theory: &Theory, inputs: &InputSequence) -> Result<Rational> {
    check_domains(theory, inputs.domain())?;
    check_rademacher_len(inputs.len())?;
    let events: Vec<(usize, u8)> = inputs.points().iter().map(|&x| (x, 0)).collect();
    rademacher_loss_events(theory, &events)
}

/// Loss-form Rademacher complexity computed against explicit labels; used to
/// assert label independence.
pub fn rademacher_loss_labeled(theory: &Theory, sample: &LabeledSample) -> Result<Rational> {
    check_domains(theory, sample.inputs().domain())?;
    check_rademacher_len(sample.inputs().len())?;
    rademacher_loss_events(theory, &sample.events())
}

fn rademacher_loss_events(theory: &Theory, events: &[(usize, u8)]) -> Result<Rational> {
    let columns = loss_columns(theory, events);
    let totals = signed_sup_totals(&columns, theory.size(), GROUPED_WORK_BUDGET)?;
    Ok(totals_to_rational(totals.loss_total, totals.weight, events.len()))
}

fn check_rademacher_len(n: usize) -> Result<()> {
    if n > RADEMACHER_MAX_N {
        return Err(Error::Capacity {
            what: "rademacher sign enumeration",
            limit: RADEMACHER_MAX_N,
            requested: n,
        });
    }
    Ok(())
}

/// Every nonempty theory of at most `max_size` predictors over an `m`-point
/// domain, in canonical (predictor-bitmask) order.
pub fn enumerate_theories(m: usize, max_size: usize) -> Result<Vec<Theory>> {
    if m > SWEEP_MAX_DOMAIN {
        return Err(Error::Capacity {
            what: "theory sweep domain",
            limit: SWEEP_MAX_DOMAIN,
            requested: m,
        });
    }
    let hypotheses = 1usize << m;
    if max_size == 0 || max_size > hypotheses {
        return Err(Error::InvalidInput(format!(
            "theory size bound {max_size} out of range (hypothesis space has {hypotheses})"
        )));
    }
    let mut out = Vec::new();
    for selection in 1u32..(1u32 << hypotheses) {
        if (selection.count_ones() as usize) > max_size {
            continue;
        }
        let masks: Vec<u32> = (0..hypotheses as u32)
            .filter(|&h| (selection >> h) & 1 == 1)
            .collect();
        out.push(Theory::from_masks(m, &masks)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Statistical verification of the data-dependent generalization bounds.
// ---------------------------------------------------------------------------

/// Outcome of one Monte-Carlo generalization experiment.
#[derive(Debug, Clone)]
pub struct GeneralizationReport {
    pub n: usize,
    pub trials: usize,
    pub delta: f64,
    /// Trials where the observed gap exceeded the soft data-dependent bound.
    pub soft_violations: usize,
    /// Same for the hard (capacity) bound.
    pub hard_violations: usize,
    pub mean_gap: f64,
    pub max_gap: f64,
    /// Smallest `bound - gap` seen across trials, per bound.
    pub min_soft_margin: f64,
    pub min_hard_margin: f64,
}

impl GeneralizationReport {
    pub fn soft_violation_rate(&self) -> f64 {
        self.soft_violations as f64 / self.trials as f64
    }

    pub fn hard_violation_rate(&self) -> f64 {
        self.hard_violations as f64 / self.trials as f64
    }

    /// Acceptance threshold: `delta` plus three binomial sigmas.
    pub fn violation_threshold(&self) -> f64 {
        self.delta + 3.0 * (self.delta * (1.0 - self.delta) / self.trials as f64).sqrt()
    }
}

/// Draw `n` events i.i.d. per trial, run ERM, and compare the exact expected
/// generalization gap against both data-dependent bounds evaluated on the
/// drawn inputs.
///
/// The drawn sequences may repeat inputs, so the `1 - F` term is evaluated
/// through its Rademacher form (exact, via grouped sign enumeration) and the
/// capacity term through the covering number of the drawn positions; on
/// distinct points these coincide with the falsifiability definitions.
pub fn generalization_experiment(
    theory: &Theory,
    dist: &EventDistribution,
    n: usize,
    trials: usize,
    delta: f64,
    seed: u64,
) -> Result<GeneralizationReport> {
    check_domains(theory, dist.domain())?;
    if trials < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 trials, got {trials}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta {delta} outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be positive".into()));
    }
    if theory.size() > 64 {
        return Err(Error::Capacity {
            what: "experiment theory size",
            limit: 64,
            requested: theory.size(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deviation = ((1.0 - delta.log2()) / n as f64).sqrt();

    let mut report = GeneralizationReport {
        n,
        trials,
        delta,
        soft_violations: 0,
        hard_violations: 0,
        mean_gap: 0.0,
        max_gap: f64::NEG_INFINITY,
        min_soft_margin: f64::INFINITY,
        min_hard_margin: f64::INFINITY,
    };

    for _ in 0..trials {
        let events: Vec<(usize, u8)> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        let chosen = erm_on_events(theory, &events);
        let train = Rational::new(
            BigInt::from(mismatch_count(theory, chosen, &events)),
            BigInt::from(n as u64),
        );
        let test = predictor_distributional_risk(theory, chosen, dist);
        let gap = to_f64(&(&test - &train));

        let columns = loss_columns(theory, &events);
        let totals = signed_sup_totals(&columns, theory.size(), GROUPED_WORK_BUDGET)?;
        let radem_loss = to_f64(&totals_to_rational(totals.loss_total, totals.weight, n));
        let one_minus_f = 2.0 * radem_loss;

        let mut restrictions: Vec<Vec<u8>> = (0..theory.size())
            .map(|f| events.iter().map(|&(x, _)| theory.predictors[f][x]).collect())
            .collect();
        restrictions.sort_unstable();
        restrictions.dedup();
        let one_minus_g = log2_count(restrictions.len() as u64) / n as f64;

        let soft_bound = one_minus_f + BOUND_C_SOFT * deviation;
        let hard_bound = BOUND_D1_HARD * one_minus_g.sqrt() + BOUND_D2_HARD * deviation;

        if gap > soft_bound + 1e-12 {
            report.soft_violations += 1;
        }
        if gap > hard_bound + 1e-12 {
            report.hard_violations += 1;
        }
        report.mean_gap += gap / trials as f64;
        report.max_gap = report.max_gap.max(gap);
        report.min_soft_margin = report.min_soft_margin.min(soft_bound - gap);
        report.min_hard_margin = report.min_hard_margin.min(hard_bound - gap);
    }
    Ok(report)
}

/// Outcome of the falsifiability chain verification on one theory.
#[derive(Debug, Clone)]
pub struct SltChainReport {
    pub n: usize,
    pub soft: Rational,
    pub hard: f64,
    /// Margin of `1 - F <= sqrt(8) sqrt(1 - G)`, nonnegative iff the chain holds.
    pub chain_margin: f64,
    pub chain_ok: bool,
    /// Largest mean ERM generalization gap over the supplied distributions.
    pub proxy: Option<f64>,
    pub proxy_slack: f64,
    pub proxy_ok: bool,
}

/// Verify the falsifiability chain for one theory at sequence length `n`:
/// the exact inequality `1 - F_n <= sqrt(8) sqrt(1 - G_n)` (1e-9 slack for
/// the log), plus an empirical lower proxy for the minimax predictive risk:
/// the ERM sup-gap over a caller-supplied family of distributions. The proxy
/// comparison carries Monte-Carlo slack; the exact assertion of the chain is
/// the F-vs-G inequality.
pub fn verify_chain_slt(
    theory: &Theory,
    n: usize,
    family: &[EventDistribution],
    trials: usize,
    seed: u64,
) -> Result<SltChainReport> {
    let soft = soft_falsifiability_n(theory, n)?;
    let hard = hard_falsifiability_n(theory, n)?;
    let one_minus_f = 1.0 - to_f64(&soft);
    let rhs = CHAIN_D * (1.0 - hard).max(0.0).sqrt();
    let chain_margin = rhs - one_minus_f;
    let chain_ok = one_minus_f <= rhs + 1e-9;

    let mut proxy = None;
    let mut proxy_ok = true;
    let proxy_slack = if trials > 0 {
        3.0 / (trials as f64).sqrt()
    } else {
        0.0
    };
    if !family.is_empty() && trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = f64::NEG_INFINITY;
        for dist in family {
            check_domains(theory, dist.domain())?;
            let baseline = distributional_risk(theory, dist)?;
            let mut mean = 0.0;
            for _ in 0..trials {
                let events: Vec<(usize, u8)> = (0..n).map(|_| dist.sample(&mut rng)).collect();
                let chosen = erm_on_events(theory, &events);
                let test = predictor_distributional_risk(theory, chosen, dist);
                mean += to_f64(&(&test - &baseline)) / trials as f64;
            }
            worst = worst.max(mean);
        }
        proxy = Some(worst);
        proxy_ok = worst <= one_minus_f + proxy_slack;
    }

    Ok(SltChainReport {
        n,
        soft,
        hard,
        chain_margin,
        chain_ok,
        proxy,
        proxy_slack,
        proxy_ok,
    })
}

/// Hindsight comparator: the fewest mismatches any predictor makes on a fixed
/// event sequence. Exposed for monotonicity checks of the game's terminal
/// payoff.
pub fn comparator_mismatches(theory: &Theory, events: &[(usize, u8)]) -> usize {
    best_mismatches(theory, events)
}
