//! A bit-exact toy prefix-free program machine with padded-program
//! enumeration, exact Solomonoff-style prior and induction, hard
//! falsifiability, and Kolmogorov complexity.
//!
//! Machine `toy-v1` reads instructions two bits at a time:
//!
//! | pair | effect                                            |
//! |------|---------------------------------------------------|
//! | `00` | emit 0                                            |
//! | `01` | emit 1                                            |
//! | `11` | halt; output = emitted buffer (finite)             |
//! | `10` | halt; output = emitted buffer repeated forever     |
//!
//! (`10` with an empty buffer yields the empty finite output.) Valid
//! programs are `(00|01)* (10|11)` with nothing after the terminator, so
//! the program set is prefix-free by construction and satisfies Kraft
//! equality: programs with `k` emit instructions contribute
//! `2^(k+1) * 2^-(2k+2)` and the total mass is exactly 1. Every prior value
//! is an exactly computable rational via geometric series.
//!
//! The machine is deliberately not universal; it is rich enough for
//! nontrivial complexity (periodic strings compress) while keeping every
//! measure exact. "Output extends y" (prefix semantics) is used uniformly
//! for the prior, the complexity, and explaining-set counts. Positions of a
//! target beyond the end of a finite output count as loss 1, so zero risk
//! coincides with the output extending the target.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::{log2, pow2_inv, Rational};

/// Identifier of the fixed machine semantics, embedded in reports so results
/// are reproducible bit for bit.
pub const MACHINE_ID: &str = "toy-v1";

/// Ceiling for public program enumeration (8190 programs at length 24).
pub const PROGRAM_ENUM_MAX_LEN: usize = 24;
/// Ceiling for brute-force complexity search targets.
pub const KOLMOGOROV_MAX_LEN: usize = 12;
/// Ceiling on the ambient padded length for ledger computations.
pub const LEDGER_MAX_AMBIENT: usize = 24;

fn check_bits(bits: &[u8]) -> Result<()> {
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("bit strings must be over {0,1}".into()));
    }
    Ok(())
}

/// Parse an ASCII '0'/'1' string into bits.
pub fn bits_from_str(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidInput(format!("invalid bit character {other:?}"))),
        })
        .collect()
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// A valid program of the toy machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyProgram {
    bits: Vec<u8>,
}

impl ToyProgram {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The machine's output: a finite string, or a nonempty period repeated
/// forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineOutput {
    Finite(Vec<u8>),
    Periodic(Vec<u8>),
}

impl MachineOutput {
    /// Bit at 0-based position, `None` past the end of a finite output.
    pub fn bit(&self, t: usize) -> Option<u8> {
        match self {
            MachineOutput::Finite(w) => w.get(t).copied(),
            MachineOutput::Periodic(w) => Some(w[t % w.len()]),
        }
    }

    /// Does the (possibly infinite) output have `y` as a prefix?
    pub fn extends(&self, y: &[u8]) -> bool {
        y.iter().enumerate().all(|(t, &b)| self.bit(t) == Some(b))
    }
}

/// Accept exactly the strings `(00|01)* (10|11)` with nothing trailing;
/// rejection is a value, not an error.
pub fn parse_program(bits: &[u8]) -> Option<ToyProgram> {
    if bits.len() < 2 || bits.len() % 2 != 0 || bits.iter().any(|&b| b > 1) {
        return None;
    }
    let pairs = bits.len() / 2;
    for i in 0..pairs {
        let first = bits[2 * i];
        if first == 1 {
            // Terminator: must be the final pair.
            return if i + 1 == pairs {
                Some(ToyProgram { bits: bits.to_vec() })
            } else {
                None
            };
        }
    }
    None
}

/// Execute a program.
pub fn run_machine(program: &ToyProgram) -> MachineOutput {
    let bits = &program.bits;
    let mut buffer = Vec::new();
    for i in 0..bits.len() / 2 {
        let (a, b) = (bits[2 * i], bits[2 * i + 1]);
        if a == 0 {
            buffer.push(b);
        } else if b == 1 {
            return MachineOutput::Finite(buffer);
        } else if buffer.is_empty() {
            return MachineOutput::Finite(buffer);
        } else {
            return MachineOutput::Periodic(buffer);
        }
    }
    unreachable!("valid programs end with a terminator")
}

/// The unique valid-program prefix of a padded string, if any.
pub fn strip_padding(padded: &[u8]) -> Option<ToyProgram> {
    if padded.iter().any(|&b| b > 1) {
        return None;
    }
    let mut i = 0;
    while i + 1 < padded.len() + 1 && i + 2 <= padded.len() {
        if padded[i] == 1 {
            return Some(ToyProgram {
                bits: padded[..i + 2].to_vec(),
            });
        }
        i += 2;
    }
    None
}

fn enumerate_unchecked(max_len: usize) -> Vec<ToyProgram> {
    let mut out = Vec::new();
    let mut k = 0usize;
    while 2 * k + 2 <= max_len {
        for pattern in 0..(1u64 << k) {
            let mut emits = Vec::with_capacity(2 * k);
            for i in 0..k {
                emits.push(0);
                emits.push(((pattern >> (k - 1 - i)) & 1) as u8);
            }
            for terminator in [[1u8, 0], [1, 1]] {
                let mut bits = emits.clone();
                bits.extend_from_slice(&terminator);
                out.push(ToyProgram { bits });
            }
        }
        k += 1;
    }
    out
}

/// All valid programs of length at most `max_len`, in length-then-lex order.
pub fn enumerate_programs(max_len: usize) -> Result<Vec<ToyProgram>> {
    if max_len > PROGRAM_ENUM_MAX_LEN {
        return Err(Error::Capacity {
            what: "program enumeration length",
            limit: PROGRAM_ENUM_MAX_LEN,
            requested: max_len,
        });
    }
    Ok(enumerate_unchecked(max_len))
}

/// Finite-stage prior: the mass, under the uniform distribution on length-`n`
/// strings pushed through strip-then-run, of outputs extending `y`.
/// Equals the sum of `2^-len(p)` over valid programs of length at most `n`
/// whose output extends `y`.
pub fn solomonoff_prior_finite(y: &[u8], n: usize) -> Result<Rational> {
    check_bits(y)?;
    if n > PROGRAM_ENUM_MAX_LEN {
        return Err(Error::Capacity {
            what: "finite prior ambient length",
            limit: PROGRAM_ENUM_MAX_LEN,
            requested: n,
        });
    }
    let mut total = Rational::zero();
    for program in enumerate_unchecked(n) {
        if run_machine(&program).extends(y) {
            total += pow2_inv(program.len());
        }
    }
    Ok(total)
}

/// Is `j` a period of `y` (`y[t] == y[t-j]` for all `t >= j`)?
fn has_period(y: &[u8], j: usize) -> bool {
    (j..y.len()).all(|t| y[t] == y[t - j])
}

/// Exact prior of `y`: total `2^-len` mass over all programs whose output
/// extends `y`, in closed form.
///
/// Halt programs contribute a geometric series over emit counts `k >= |y|`
/// matching `y` as a prefix; repeat programs with period `j >= |y|` likewise;
/// repeat programs with period `j < |y|` contribute one term per period of
/// `y`. Every finite string has positive prior (explicit emission always
/// works), so conditioning never divides by zero.
pub fn solomonoff_prior_exact(y: &[u8]) -> Result<Rational> {
    check_bits(y)?;
    let len = y.len();
    if len == 0 {
        return Ok(Rational::one());
    }
    // Halt series and long-period repeat series are each 2^-(2L+1).
    let mut total = pow2_inv(2 * len);
    for j in 1..len {
        if has_period(y, j) {
            total += pow2_inv(2 * j + 2);
        }
    }
    Ok(total)
}

/// Exact mass of programs of length greater than `n` whose output extends
/// `y`: the analytic tail that `solomonoff_prior_finite` has not yet
/// enumerated. `prior_finite(y, n) + prior_tail_beyond(y, n)` equals
/// `prior_exact(y)` exactly.
pub fn prior_tail_beyond(y: &[u8], n: usize) -> Result<Rational> {
    check_bits(y)?;
    let len = y.len();
    // Smallest emit count whose program length 2k+2 exceeds n.
    let k_min = n / 2;
    let halt_start = len.max(k_min);
    let mut total = pow2_inv(len + halt_start + 1);
    let repeat_start = len.max(1).max(k_min);
    total += pow2_inv(len + repeat_start + 1);
    if len == 0 && n < 2 {
        // The empty-buffer repeat program "10".
        total += pow2_inv(2);
    }
    for j in 1..len {
        if has_period(y, j) && 2 * j + 2 > n {
            total += pow2_inv(2 * j + 2);
        }
    }
    Ok(total)
}

/// Conditional next-bit semimeasure `(q0, q1)` with
/// `q_b = Q(history b) / Q(history)`. The pair sums to at most one; the
/// deficit is mass on outputs that end inside the history.
pub fn solomonoff_predict(history: &[u8]) -> Result<(Rational, Rational)> {
    check_bits(history)?;
    let base = solomonoff_prior_exact(history)?;
    if base.is_zero() {
        return Err(Error::ZeroPrior(bits_to_string(history)));
    }
    let mut with0 = history.to_vec();
    with0.push(0);
    let mut with1 = history.to_vec();
    with1.push(1);
    Ok((
        solomonoff_prior_exact(&with0)? / &base,
        solomonoff_prior_exact(&with1)? / &base,
    ))
}

/// Normalized variant of the predictor, provided for comparison only; the
/// theorem checks use the unnormalized semimeasure conditional.
pub fn solomonoff_predict_normalized(history: &[u8]) -> Result<(Rational, Rational)> {
    let (q0, q1) = solomonoff_predict(history)?;
    let total = &q0 + &q1;
    if total.is_zero() {
        return Err(Error::ZeroPrior(bits_to_string(history)));
    }
    Ok((q0 / &total, q1 / &total))
}

/// Mismatches of a program's output against `y` over positions `1..=|y|`;
/// positions beyond a finite output count as loss 1.
pub fn risk_uni(y: &[u8], program: &ToyProgram) -> Result<usize> {
    check_bits(y)?;
    let output = run_machine(program);
    Ok((0..y.len())
        .filter(|&t| output.bit(t) != Some(y[t]))
        .count())
}

/// Best risk over all programs of length at most `max_len`.
pub fn theory_risk_uni(y: &[u8], max_len: usize) -> Result<usize> {
    check_bits(y)?;
    if max_len < 2 {
        return Err(Error::InvalidInput(
            "no valid programs of length below 2".into(),
        ));
    }
    let programs = enumerate_programs(max_len)?;
    programs
        .iter()
        .map(|p| risk_uni(y, p))
        .collect::<Result<Vec<_>>>()
        .map(|risks| risks.into_iter().min().expect("program set nonempty"))
}

/// Hard falsifiability of a string: `-log2` of its exact prior.
pub fn hard_falsifiability_uni(y: &[u8]) -> Result<f64> {
    let prior = solomonoff_prior_exact(y)?;
    if prior.is_zero() {
        return Err(Error::ZeroPrior(bits_to_string(y)));
    }
    log2(&prior).map(|v| if v == 0.0 { 0.0 } else { -v })
}

/// Number of length-`n` padded strings whose stripped program's output
/// extends `y`.
pub fn explaining_count(y: &[u8], n: usize) -> Result<u64> {
    check_bits(y)?;
    if n > LEDGER_MAX_AMBIENT {
        return Err(Error::Capacity {
            what: "explaining-set ambient length",
            limit: LEDGER_MAX_AMBIENT,
            requested: n,
        });
    }
    let mut count = 0u64;
    for program in enumerate_unchecked(n) {
        if run_machine(&program).extends(y) {
            count += 1 << (n - program.len());
        }
    }
    Ok(count)
}

/// Finite-stage gain at ambient length `n`: `n - log2 |explaining set|`,
/// which equals `-log2` of the finite-stage prior. Converges from above to
/// the hard falsifiability as `n` grows.
pub fn finite_gain(y: &[u8], n: usize) -> Result<f64> {
    let count = explaining_count(y, n)?;
    if count == 0 {
        return Err(Error::ZeroPrior(format!(
            "no length-{n} strings explain {}",
            bits_to_string(y)
        )));
    }
    Ok(n as f64 - crate::numerics::log2_count(count))
}

/// One step of the falsification ledger: observing bit `t` of the target
/// shrinks the explaining set by `ratio`, eliminating `bits` worth of
/// hypotheses.
#[derive(Debug, Clone)]
pub struct LedgerEntry {
    pub step: usize,
    /// `|explains y_{1:t-1}| / |explains y_{1:t}|` at the ambient length.
    pub ratio: Rational,
    pub bits: f64,
}

/// Per-step hypothesis eliminations at ambient length `n`. The entries
/// telescope: their product of ratios is exactly `|all programs| /
/// |explains y|`, i.e. the gain accumulated from the initial theory (the
/// strings with no valid program never enter).
pub fn falsification_ledger(y: &[u8], n: usize) -> Result<Vec<LedgerEntry>> {
    check_bits(y)?;
    let mut entries = Vec::with_capacity(y.len());
    let mut previous = explaining_count(&[], n)?;
    for t in 1..=y.len() {
        let current = explaining_count(&y[..t], n)?;
        if current == 0 {
            return Err(Error::ZeroPrior(format!(
                "no length-{n} strings explain {} at step {t}",
                bits_to_string(&y[..t])
            )));
        }
        let ratio = Rational::new(BigInt::from(previous), BigInt::from(current));
        let bits = log2(&ratio)?;
        entries.push(LedgerEntry { step: t, ratio, bits });
        previous = current;
    }
    Ok(entries)
}

/// Length of the shortest program whose output extends `y`, by enumeration
/// in increasing length. Search up to `2|y| + 2` always suffices: explicit
/// emission of `y` followed by halt is a witness.
pub fn kolmogorov_complexity(y: &[u8]) -> Result<usize> {
    check_bits(y)?;
    if y.len() > KOLMOGOROV_MAX_LEN {
        return Err(Error::Capacity {
            what: "complexity target length",
            limit: KOLMOGOROV_MAX_LEN,
            requested: y.len(),
        });
    }
    for program in enumerate_unchecked(2 * y.len() + 2) {
        if run_machine(&program).extends(y) {
            return Ok(program.len());
        }
    }
    unreachable!("explicit emission always explains y")
}

/// One prediction step in the theorem-E verification.
#[derive(Debug, Clone)]
pub struct PredictionStep {
    pub t: usize,
    /// Conditional semimeasure of the bit that actually occurred.
    pub q: Rational,
    /// Expected instantaneous loss `1 - q`.
    pub loss: Rational,
    /// `-log2 q`; per-step, `loss <= -log2 q` since `1 - x <= -log2 x`.
    pub neg_log_q: f64,
}

/// Verification record for the induction chain on one string:
/// cumulative expected loss `<=` hard falsifiability `<=` complexity.
#[derive(Debug, Clone)]
pub struct TheoremEReport {
    pub machine_id: &'static str,
    pub target: String,
    pub steps: Vec<PredictionStep>,
    /// Exact cumulative expected loss of the predictor on the target.
    pub loss: Rational,
    /// `-log2` of the exact prior.
    pub gain: f64,
    pub kolmogorov: usize,
    pub loss_le_gain: bool,
    pub gain_le_complexity: bool,
}

impl TheoremEReport {
    pub fn ok(&self) -> bool {
        self.loss_le_gain && self.gain_le_complexity
    }
}

/// Compute the full chain for one target string with exact rationals (one
/// log for the gain, 1e-9 slack on its inequalities).
pub fn verify_theorem_e(y: &[u8]) -> Result<TheoremEReport> {
    check_bits(y)?;
    let mut steps = Vec::with_capacity(y.len());
    let mut loss = Rational::zero();
    for t in 1..=y.len() {
        let (q0, q1) = solomonoff_predict(&y[..t - 1])?;
        let q = if y[t - 1] == 0 { q0 } else { q1 };
        if q.is_zero() {
            return Err(Error::ZeroPrior(bits_to_string(&y[..t])));
        }
        let step_loss = Rational::one() - &q;
        loss += &step_loss;
        steps.push(PredictionStep {
            t,
            neg_log_q: -log2(&q)?,
            q,
            loss: step_loss,
        });
    }
    let gain = hard_falsifiability_uni(y)?;
    let kolmogorov = kolmogorov_complexity(y)?;
    let loss_f = crate::numerics::to_f64(&loss);
    Ok(TheoremEReport {
        machine_id: MACHINE_ID,
        target: bits_to_string(y),
        steps,
        loss,
        gain,
        kolmogorov,
        loss_le_gain: loss_f <= gain + 1e-9,
        gain_le_complexity: gain <= kolmogorov as f64 + 1e-9,
    })
}

/// Bitwise complement; the instruction set is 0/1-symmetric, so prior,
/// gain, and complexity are invariant under it.
pub fn complement(y: &[u8]) -> Vec<u8> {
    y.iter().map(|&b| 1 - b).collect()
}
