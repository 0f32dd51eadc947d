//! Scenario runners behind the CLI subcommands: single-instance measurement,
//! theorem-sweep verification, the exact sequential game, the induction
//! corpus table, and dry-run planning.

use falsify_core::error::Error as CoreError;
use falsify_core::numerics::{pow2_inv, to_f64, Rational};
use falsify_core::seq::{
    enumerate_trees, hard_falsifiability_seq, littlestone_dimension,
    littlestone_dimension_by_trees, minimax_value_seq, q_image_count, seq_rademacher,
    soft_falsifiability_seq, verify_chain_seq, vc_lifted, zero_cover_number, GameSpec,
    LiftedTheory, Tree, ZERO_COVER_DEPTH_MAX, ZERO_COVER_THEORY_MAX,
};
use falsify_core::slt::{
    covering_number, enumerate_input_sequences, enumerate_input_subsets, enumerate_theories,
    generalization_experiment, hard_falsifiability, hard_falsifiability_n, rademacher,
    rademacher_loss, shatters, soft_falsifiability, soft_falsifiability_n, vc_dimension,
    verify_chain_slt, Domain, InputSequence, Theory, CHAIN_D,
};
use falsify_core::uni::{
    bits_from_str, bits_to_string, falsification_ledger, prior_tail_beyond, solomonoff_predict,
    solomonoff_prior_exact, solomonoff_prior_finite, verify_theorem_e, MACHINE_ID,
    PROGRAM_ENUM_MAX_LEN,
};

use crate::config::{
    parse_distribution, parse_predictors, ConfigError, ExperimentConfig, Scenario, SeqConfig,
    SltConfig, SweepConfig, UniConfig,
};
use crate::report::{fmt_f64, fmt_rational, AssertionRecord, CsvTable, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Measure,
    Verify,
    Game,
    Sol,
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::Measure => "measure",
            Action::Verify => "verify",
            Action::Game => "game",
            Action::Sol => "sol",
        }
    }
}

/// Ceiling overrides, only honored when the caller passed `--unsafe`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub ceiling: Option<usize>,
}

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Core(CoreError),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(msg) => write!(f, "{msg}"),
            RunError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Core(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Usage(e.to_string())
    }
}

/// Default sweep ceilings; `--ceiling-override` with `--unsafe` raises them.
const VERIFY_SLT_DOMAIN_CEILING: usize = 3;
const VERIFY_SEQ_DEPTH_CEILING: usize = 3;
const VERIFY_UNI_CORPUS_CEILING: usize = 8;

fn effective_ceiling(default: usize, overrides: &Overrides) -> usize {
    overrides.ceiling.unwrap_or(default)
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn theory_label(theory: &Theory) -> String {
    theory
        .predictors()
        .iter()
        .map(|p| p.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect::<String>())
        .collect::<Vec<_>>()
        .join("+")
}

struct Aggregate {
    tag: &'static str,
    instances: usize,
    failures: usize,
    min_margin: f64,
}

impl Aggregate {
    fn new(tag: &'static str) -> Self {
        Aggregate {
            tag,
            instances: 0,
            failures: 0,
            min_margin: f64::INFINITY,
        }
    }

    fn record(&mut self, margin: f64, pass: bool) {
        self.instances += 1;
        if !pass {
            self.failures += 1;
        }
        self.min_margin = self.min_margin.min(margin);
    }

    fn into_record(self) -> AssertionRecord {
        let margin = if self.instances == 0 {
            0.0
        } else {
            self.min_margin
        };
        AssertionRecord::new(
            self.tag,
            format!("{} instances, {} failed", self.instances, self.failures),
            margin,
            self.failures == 0,
        )
    }
}

pub fn run(
    action: Action,
    config: &ExperimentConfig,
    overrides: &Overrides,
) -> Result<Report, RunError> {
    match (action, config.scenario) {
        (Action::Measure, Scenario::Slt) => measure_slt(config),
        (Action::Measure, Scenario::Seq) => measure_seq(config),
        (Action::Measure, Scenario::Uni) => measure_uni(config),
        (Action::Verify, Scenario::Slt) => verify_slt(config, overrides),
        (Action::Verify, Scenario::Seq) => verify_seq(config, overrides),
        (Action::Verify, Scenario::Uni) => verify_uni(config, overrides),
        (Action::Verify | Action::Measure, Scenario::Sweep) => sweep_table(config),
        (Action::Game, Scenario::Seq) => game(config),
        (Action::Game, _) => Err(usage("game requires scenario = \"seq\"")),
        (Action::Sol, Scenario::Uni) => sol(config),
        (Action::Sol, _) => Err(usage("sol requires scenario = \"uni\"")),
    }
}

fn slt_section(config: &ExperimentConfig) -> Result<&SltConfig, RunError> {
    config
        .slt
        .as_ref()
        .ok_or_else(|| usage("config: missing [slt] section"))
}

fn seq_section(config: &ExperimentConfig) -> Result<&SeqConfig, RunError> {
    config
        .seq
        .as_ref()
        .ok_or_else(|| usage("config: missing [seq] section"))
}

fn uni_section(config: &ExperimentConfig) -> Result<&UniConfig, RunError> {
    config
        .uni
        .as_ref()
        .ok_or_else(|| usage("config: missing [uni] section"))
}

fn slt_theory(section: &SltConfig) -> Result<Theory, RunError> {
    let m = section
        .domain_size
        .ok_or_else(|| usage("config: [slt] domain_size is required"))?;
    let predictors = section
        .predictors
        .as_ref()
        .ok_or_else(|| usage("config: [slt] predictors is required"))?;
    Ok(parse_predictors(m, predictors)?)
}

fn seq_theory(section: &SeqConfig) -> Result<Theory, RunError> {
    let m = section
        .domain_size
        .ok_or_else(|| usage("config: [seq] domain_size is required"))?;
    let predictors = section
        .predictors
        .as_ref()
        .ok_or_else(|| usage("config: [seq] predictors is required"))?;
    Ok(parse_predictors(m, predictors)?)
}

fn measure_slt(config: &ExperimentConfig) -> Result<Report, RunError> {
    let section = slt_section(config)?;
    let theory = slt_theory(section)?;
    let mut report = Report::new("measure", "slt", config.seed, &config.raw);

    let mut csv = CsvTable {
        header: ["instance", "n", "f_frac", "f_dec", "g_dec", "radem_frac", "cover", "pass"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: Vec::new(),
    };

    if let Some(points) = &section.inputs {
        let inputs = InputSequence::new(theory.domain(), points.clone())?;
        let f = soft_falsifiability(&theory, &inputs)?;
        let g = hard_falsifiability(&theory, &inputs)?;
        let radem = rademacher(&theory, &inputs)?;
        let radem_l = rademacher_loss(&theory, &inputs)?;
        let cover = covering_number(&theory, &inputs)?;
        report.row(format!(
            "theory={} inputs={:?}: F={} G={} radem={} radem_loss={} cover={} shattered={}",
            theory_label(&theory),
            points,
            fmt_rational(&f),
            fmt_f64(g),
            fmt_rational(&radem),
            fmt_rational(&radem_l),
            cover,
            shatters(&theory, &inputs)?,
        ));
        let identity = &f + &radem;
        let identity_pass = identity == Rational::from_integer(1.into());
        report.assert_record(AssertionRecord::new(
            "radem-identity",
            format!("F + radem = {identity}"),
            0.0,
            identity_pass,
        ));
        let expect_g = 1.0 - falsify_core::numerics::log2_count(cover as u64) / inputs.len() as f64;
        report.assert_record(AssertionRecord::new(
            "cover-identity",
            format!("G vs 1 - log2(cover)/n"),
            1e-9 - (g - expect_g).abs(),
            (g - expect_g).abs() <= 1e-9,
        ));
        csv.rows.push(vec![
            theory_label(&theory),
            inputs.len().to_string(),
            f.to_string(),
            fmt_f64(to_f64(&f)),
            fmt_f64(g),
            radem.to_string(),
            cover.to_string(),
            (identity_pass && (g - expect_g).abs() <= 1e-9).to_string(),
        ]);
    }

    if let Some(n) = section.n {
        let f_n = soft_falsifiability_n(&theory, n)?;
        let g_n = hard_falsifiability_n(&theory, n)?;
        report.row(format!(
            "worst-case n={n}: F_n={} G_n={}",
            fmt_rational(&f_n),
            fmt_f64(g_n)
        ));
        let lhs = 1.0 - to_f64(&f_n);
        let rhs = CHAIN_D * (1.0 - g_n).max(0.0).sqrt();
        report.assert_record(AssertionRecord::new(
            "D",
            format!("1-F_n={} vs sqrt(8)sqrt(1-G_n)={}", fmt_f64(lhs), fmt_f64(rhs)),
            rhs + 1e-9 - lhs,
            lhs <= rhs + 1e-9,
        ));
    }

    report.row(format!("vc={}", vc_dimension(&theory)));
    report.csv = Some(csv);
    Ok(report)
}

fn measure_seq(config: &ExperimentConfig) -> Result<Report, RunError> {
    let section = seq_section(config)?;
    let theory = seq_theory(section)?;
    let mut report = Report::new("measure", "seq", config.seed, &config.raw);

    let trees: Vec<Tree> = if let Some(nodes) = &section.tree {
        let depth = (nodes.len() + 1).trailing_zeros() as usize;
        vec![Tree::new(theory.domain(), depth, nodes.clone())?]
    } else {
        let depth = section
            .depth
            .ok_or_else(|| usage("config: [seq] needs `tree` or `depth`"))?;
        enumerate_trees(theory.domain(), depth)?
    };
    if trees.is_empty() {
        return Err(usage("config: no valid trees at this depth/domain"));
    }

    let mut zero_cover_vs_q = Aggregate::new("zero-cover<=q-image");
    for tree in &trees {
        let f = soft_falsifiability_seq(&theory, tree)?;
        let hard = hard_falsifiability_seq(&theory, tree)?;
        let radem = seq_rademacher(&theory, tree)?;
        let lifted = LiftedTheory::new(theory.clone(), tree.depth())?;
        let q = q_image_count(&lifted, tree)?;
        let mut line = format!(
            "tree={:?}: F={} G={} radem={} q_image={} effective={} degenerate={}",
            tree.nodes(),
            fmt_rational(&f),
            fmt_f64(hard.value),
            fmt_rational(&radem),
            q,
            hard.effective_count,
            hard.degenerate,
        );
        if tree.depth() <= ZERO_COVER_DEPTH_MAX && theory.size() <= ZERO_COVER_THEORY_MAX {
            let z = zero_cover_number(&theory, tree)?;
            line.push_str(&format!(" zero_cover={z}"));
            zero_cover_vs_q.record((q - z) as f64, z <= q);
        }
        report.row(line);
    }
    if zero_cover_vs_q.instances > 0 {
        report.assert_record(zero_cover_vs_q.into_record());
    }

    let ldim = littlestone_dimension(&theory);
    let vc = vc_lifted(&theory, 3.min(trees[0].depth().max(1)))?;
    report.row(format!("ldim={ldim} vc_lifted={vc}"));
    report.assert_record(AssertionRecord::new(
        "vc<=ldim",
        format!("vc_lifted={vc} ldim={ldim}"),
        (ldim as f64) - (vc as f64),
        vc <= ldim,
    ));
    Ok(report)
}

fn measure_uni(config: &ExperimentConfig) -> Result<Report, RunError> {
    let section = uni_section(config)?;
    let target = section
        .target
        .as_ref()
        .ok_or_else(|| usage("config: [uni] target is required"))?;
    let y = bits_from_str(target)?;
    let ambient = section.ambient.unwrap_or(2 * y.len() + 4).min(PROGRAM_ENUM_MAX_LEN);

    let mut report = Report::new("measure", "uni", config.seed, &config.raw);
    report.machine_id = Some(MACHINE_ID);

    let exact = solomonoff_prior_exact(&y)?;
    let finite = solomonoff_prior_finite(&y, ambient)?;
    let tail = prior_tail_beyond(&y, ambient)?;
    let (q0, q1) = solomonoff_predict(&y)?;
    let chain = verify_theorem_e(&y)?;
    report.row(format!(
        "target={target}: Q={} Q_{ambient}={} tail={} gain={} K={}",
        fmt_rational(&exact),
        fmt_rational(&finite),
        fmt_rational(&tail),
        fmt_f64(chain.gain),
        chain.kolmogorov,
    ));
    report.row(format!(
        "predict: q0={} q1={} loss={}",
        fmt_rational(&q0),
        fmt_rational(&q1),
        fmt_rational(&chain.loss),
    ));
    let ledger = falsification_ledger(&y, ambient)?;
    for entry in &ledger {
        report.row(format!(
            "ledger step {}: ratio={} bits={}",
            entry.step,
            entry.ratio,
            fmt_f64(entry.bits)
        ));
    }

    report.assert_record(AssertionRecord::new(
        "finite-plus-tail",
        "Q_n + tail = Q exactly".into(),
        0.0,
        &finite + &tail == exact,
    ));
    report.assert_record(AssertionRecord::new(
        "E",
        format!("loss={} gain={} K={}", chain.loss, fmt_f64(chain.gain), chain.kolmogorov),
        (chain.gain - to_f64(&chain.loss)).min(chain.kolmogorov as f64 - chain.gain),
        chain.ok(),
    ));
    Ok(report)
}

fn verify_slt(config: &ExperimentConfig, overrides: &Overrides) -> Result<Report, RunError> {
    let section = slt_section(config)?;
    let m = section.domain_size.unwrap_or(3);
    let ceiling = effective_ceiling(VERIFY_SLT_DOMAIN_CEILING, overrides);
    if m > ceiling {
        return Err(RunError::Core(CoreError::Capacity {
            what: "verify sweep domain size",
            limit: ceiling,
            requested: m,
        }));
    }
    let mut report = Report::new("verify", "slt", config.seed, &config.raw);
    let mut csv = CsvTable {
        header: [
            "theory", "n", "f_frac", "f_dec", "g_dec", "radem_frac", "cover_max", "chain_lhs",
            "chain_rhs", "pass",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: Vec::new(),
    };

    let mut identity = Aggregate::new("radem-identity");
    let mut cover_identity = Aggregate::new("cover-identity");
    let mut range = Aggregate::new("range");
    let mut chain = Aggregate::new("D");
    let domain = Domain::new(m)?;
    let theories = enumerate_theories(m, 1 << m)?;
    let one = Rational::from_integer(1.into());

    for theory in &theories {
        let mut all_ones = true;
        for n in 1..=m {
            for inputs in enumerate_input_sequences(domain, n)? {
                let f = soft_falsifiability(theory, &inputs)?;
                let radem = rademacher(theory, &inputs)?;
                let radem_l = rademacher_loss(theory, &inputs)?;
                let ok = (&f + &radem == one)
                    && (f == &one - Rational::from_integer(2.into()) * &radem_l);
                identity.record(0.0, ok);

                let g = hard_falsifiability(theory, &inputs)?;
                let cover = covering_number(theory, &inputs)? as u64;
                let expect = 1.0 - falsify_core::numerics::log2_count(cover) / n as f64;
                cover_identity.record(1e-9 - (g - expect).abs(), (g - expect).abs() <= 1e-9);

                let f_dec = to_f64(&f);
                let in_range = (0.0..=1.0).contains(&f_dec) && (-1e-12..=1.0 + 1e-12).contains(&g);
                let shattered = shatters(theory, &inputs)?;
                let zero_iff = (f_dec == 0.0 && g.abs() <= 1e-12) == shattered;
                range.record(0.0, in_range && zero_iff);
            }

            let f_n = soft_falsifiability_n(theory, n)?;
            let g_n = hard_falsifiability_n(theory, n)?;
            if !(f_n == one && g_n == 1.0) {
                all_ones = false;
            }
            let lhs = 1.0 - to_f64(&f_n);
            let rhs = CHAIN_D * (1.0 - g_n).max(0.0).sqrt();
            let pass = lhs <= rhs + 1e-9;
            chain.record(rhs + 1e-9 - lhs, pass);

            let cover_max = enumerate_input_subsets(domain, n)?
                .iter()
                .map(|s| covering_number(theory, s))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .max()
                .unwrap_or(1);
            let radem_n = (&one - &f_n) / Rational::from_integer(2.into());
            csv.rows.push(vec![
                theory_label(theory),
                n.to_string(),
                f_n.to_string(),
                fmt_f64(to_f64(&f_n)),
                fmt_f64(g_n),
                radem_n.to_string(),
                cover_max.to_string(),
                fmt_f64(lhs),
                fmt_f64(rhs),
                pass.to_string(),
            ]);
        }
        // Singleton characterization: F_n = G_n = 1 for all n iff |O| = 1.
        range.record(0.0, all_ones == (theory.size() == 1));
    }

    report.row(format!(
        "sweep: m={m} theories={} rows={}",
        theories.len(),
        csv.rows.len()
    ));
    report.assert_record(identity.into_record());
    report.assert_record(cover_identity.into_record());
    report.assert_record(range.into_record());
    report.assert_record(chain.into_record());

    // Optional statistical checks against the configured theory.
    if let (Some(_), Some(dists)) = (&section.predictors, &section.distributions) {
        let theory = slt_theory(section)?;
        let n = section.n.unwrap_or(50);
        let trials = section.trials.unwrap_or(1000);
        let delta = section.delta.unwrap_or(0.1);
        let seed = config.require_seed()?;
        for (i, pairs) in dists.iter().enumerate() {
            let dist = parse_distribution(theory.domain().size(), pairs)?;
            let outcome =
                generalization_experiment(&theory, &dist, n, trials, delta, seed.wrapping_add(i as u64))?;
            let threshold = outcome.violation_threshold();
            report.row(format!(
                "experiment dist {i}: soft_rate={} hard_rate={} threshold={} mean_gap={} max_gap={}",
                fmt_f64(outcome.soft_violation_rate()),
                fmt_f64(outcome.hard_violation_rate()),
                fmt_f64(threshold),
                fmt_f64(outcome.mean_gap),
                fmt_f64(outcome.max_gap),
            ));
            report.assert_record(AssertionRecord::new(
                "D''-s",
                format!("dist {i}: violation rate vs threshold"),
                threshold - outcome.soft_violation_rate(),
                outcome.soft_violation_rate() <= threshold,
            ));
            report.assert_record(AssertionRecord::new(
                "D''-h",
                format!("dist {i}: violation rate vs threshold"),
                threshold - outcome.hard_violation_rate(),
                outcome.hard_violation_rate() <= threshold,
            ));
            let chain_report = verify_chain_slt(
                &theory,
                section.n.unwrap_or(2).min(theory.domain().size()),
                std::slice::from_ref(&dist),
                trials.min(300),
                seed.wrapping_add(1000 + i as u64),
            )?;
            report.assert_record(AssertionRecord::new(
                "V<=1-F",
                format!(
                    "dist {i}: proxy={} vs 1-F+slack",
                    chain_report.proxy.map(fmt_f64).unwrap_or_else(|| "none".into())
                ),
                chain_report.proxy_slack,
                chain_report.proxy_ok,
            ));
        }
    }

    report.csv = Some(csv);
    Ok(report)
}

fn verify_seq(config: &ExperimentConfig, overrides: &Overrides) -> Result<Report, RunError> {
    let section = config.seq.clone().unwrap_or_default();
    let m = section.domain_size.unwrap_or(2);
    let max_size = section.max_theory_size.unwrap_or(4);
    let depth_limit = section.depth.unwrap_or(2);
    let ceiling = effective_ceiling(VERIFY_SEQ_DEPTH_CEILING, overrides);
    if depth_limit > ceiling {
        return Err(RunError::Core(CoreError::Capacity {
            what: "verify sweep depth",
            limit: ceiling,
            requested: depth_limit,
        }));
    }

    let mut report = Report::new("verify", "seq", config.seed, &config.raw);
    let mut csv = CsvTable {
        header: [
            "theory", "n", "v_frac", "f_frac", "g_dec", "value_ok", "chain_ok",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: Vec::new(),
    };

    let mut identity = Aggregate::new("radem-identity-seq");
    let mut value_chain = Aggregate::new("D-SEQ:V<=1-F");
    let mut fg_chain = Aggregate::new("D-SEQ:1-F<=c*sqrt(1-G)");
    let mut zero_cover = Aggregate::new("zero-cover<=q-image");
    let mut falsect = Aggregate::new("gain-counts");
    let mut reduction = Aggregate::new("vc<=ldim");
    let domain = Domain::new(m)?;
    let theories = enumerate_theories(m, max_size.min(1 << m))?;
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());

    for theory in &theories {
        for n in 1..=depth_limit.min(m) {
            let trees = enumerate_trees(domain, n)?;
            if trees.is_empty() {
                continue;
            }
            for tree in &trees {
                let hard = hard_falsifiability_seq(theory, tree)?;
                if !hard.degenerate {
                    let f = soft_falsifiability_seq(theory, tree)?;
                    let radem = seq_rademacher(theory, tree)?;
                    identity.record(0.0, f == &one - &two * &radem);
                }
                // Effective-class count must match 2^n on valid trees, and
                // the gain must be built from verified counts.
                falsect.record(0.0, hard.effective_count == 1 << n);
                let lifted = LiftedTheory::new(theory.clone(), n)?;
                let q = q_image_count(&lifted, tree)?;
                if n <= ZERO_COVER_DEPTH_MAX && theory.size() <= ZERO_COVER_THEORY_MAX {
                    let z = zero_cover_number(theory, tree)?;
                    zero_cover.record((q - z) as f64, z <= q);
                }
            }

            let chain = verify_chain_seq(theory, n, &trees)?;
            value_chain.record(to_f64(&chain.value_margin), chain.value_ok);
            fg_chain.record(chain.chain_margin, chain.chain_ok);
            csv.rows.push(vec![
                theory_label(theory),
                n.to_string(),
                chain.value.to_string(),
                chain.soft.to_string(),
                fmt_f64(chain.hard),
                chain.value_ok.to_string(),
                chain.chain_ok.to_string(),
            ]);
        }

        let ldim = littlestone_dimension(theory);
        let by_trees = littlestone_dimension_by_trees(theory, depth_limit.min(3))?;
        let vc = vc_lifted(theory, depth_limit.min(3))?;
        reduction.record(
            (ldim as f64) - (vc as f64),
            vc <= ldim && by_trees == ldim.min(depth_limit.min(3)),
        );
    }

    report.row(format!(
        "sweep: m={m} theories={} depth<={depth_limit}",
        theories.len()
    ));
    report.assert_record(identity.into_record());
    report.assert_record(value_chain.into_record());
    report.assert_record(fg_chain.into_record());
    report.assert_record(zero_cover.into_record());
    report.assert_record(falsect.into_record());
    report.assert_record(reduction.into_record());
    report.csv = Some(csv);
    Ok(report)
}

fn verify_uni(config: &ExperimentConfig, overrides: &Overrides) -> Result<Report, RunError> {
    let section = config.uni.clone().unwrap_or_default();
    let max_len = section.corpus_max_len.unwrap_or(4);
    let ceiling = effective_ceiling(VERIFY_UNI_CORPUS_CEILING, overrides);
    if max_len > ceiling {
        return Err(RunError::Core(CoreError::Capacity {
            what: "verify corpus string length",
            limit: ceiling,
            requested: max_len,
        }));
    }

    let mut report = Report::new("verify", "uni", config.seed, &config.raw);
    report.machine_id = Some(MACHINE_ID);
    let mut csv = CsvTable {
        header: ["y", "prior_frac", "loss_frac", "gain", "kolmogorov", "pass"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: Vec::new(),
    };

    let mut chain = Aggregate::new("E");
    let mut monotone = Aggregate::new("monotone-prior");
    for y in corpus(max_len) {
        let outcome = verify_theorem_e(&y)?;
        chain.record(
            (outcome.gain - to_f64(&outcome.loss)).min(outcome.kolmogorov as f64 - outcome.gain),
            outcome.ok(),
        );
        let exact = solomonoff_prior_exact(&y)?;
        let mut last = Rational::from_integer(0.into());
        let mut ok = true;
        for n in (2..=12).step_by(2) {
            let fin = solomonoff_prior_finite(&y, n)?;
            ok &= fin >= last;
            ok &= &fin + &prior_tail_beyond(&y, n)? == exact;
            last = fin;
        }
        monotone.record(0.0, ok);
        csv.rows.push(vec![
            bits_to_string(&y),
            exact.to_string(),
            outcome.loss.to_string(),
            fmt_f64(outcome.gain),
            outcome.kolmogorov.to_string(),
            outcome.ok().to_string(),
        ]);
    }

    // Structural checks: Kraft partial sums and prefix-freeness.
    let mut kraft_ok = true;
    for m in 0..=10usize {
        let mass = solomonoff_prior_finite(&[], (2 * m + 2).min(PROGRAM_ENUM_MAX_LEN))?;
        if 2 * m + 2 <= PROGRAM_ENUM_MAX_LEN {
            let expected = Rational::from_integer(1.into()) - pow2_inv(m + 1);
            kraft_ok &= mass == expected;
        }
    }
    report.assert_record(AssertionRecord::new(
        "kraft",
        "partial sums 1 - 2^-(m+1)".into(),
        0.0,
        kraft_ok,
    ));
    let programs = falsify_core::uni::enumerate_programs(PROGRAM_ENUM_MAX_LEN)?;
    let mut strings: Vec<String> = programs.iter().map(|p| bits_to_string(p.bits())).collect();
    strings.sort();
    let prefix_free = strings
        .windows(2)
        .all(|pair| !pair[1].starts_with(&pair[0]));
    report.assert_record(AssertionRecord::new(
        "prefix-free",
        format!("{} programs up to length {PROGRAM_ENUM_MAX_LEN}", strings.len()),
        0.0,
        prefix_free,
    ));
    report.assert_record(chain.into_record());
    report.assert_record(monotone.into_record());
    report.row(format!("corpus: strings of length <= {max_len}: {}", csv.rows.len()));
    report.csv = Some(csv);
    Ok(report)
}

fn corpus(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for len in 1..=max_len {
        for raw in 0..(1u64 << len) {
            out.push((0..len).map(|i| ((raw >> (len - 1 - i)) & 1) as u8).collect());
        }
    }
    out
}

fn sweep_table(config: &ExperimentConfig) -> Result<Report, RunError> {
    let section: &SweepConfig = config
        .sweep
        .as_ref()
        .ok_or_else(|| usage("config: missing [sweep] section"))?;
    let m = section
        .domain_size
        .ok_or_else(|| usage("config: [sweep] domain_size is required"))?;
    let n = section
        .n
        .ok_or_else(|| usage("config: [sweep] n is required"))?;
    let max_size = section.max_theory_size.unwrap_or(1 << m);

    let mut report = Report::new("verify", "sweep", config.seed, &config.raw);
    let mut csv = CsvTable {
        header: ["theory", "n", "f_frac", "f_dec", "g_dec", "chain_lhs", "chain_rhs", "pass"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: Vec::new(),
    };
    let mut chain = Aggregate::new("D");
    for theory in enumerate_theories(m, max_size.min(1 << m))? {
        let f_n = soft_falsifiability_n(&theory, n)?;
        let g_n = hard_falsifiability_n(&theory, n)?;
        let lhs = 1.0 - to_f64(&f_n);
        let rhs = CHAIN_D * (1.0 - g_n).max(0.0).sqrt();
        let pass = lhs <= rhs + 1e-9;
        chain.record(rhs + 1e-9 - lhs, pass);
        report.row(format!(
            "theory={}: F_{n}={} G_{n}={} chain {} <= {}",
            theory_label(&theory),
            fmt_rational(&f_n),
            fmt_f64(g_n),
            fmt_f64(lhs),
            fmt_f64(rhs),
        ));
        csv.rows.push(vec![
            theory_label(&theory),
            n.to_string(),
            f_n.to_string(),
            fmt_f64(to_f64(&f_n)),
            fmt_f64(g_n),
            fmt_f64(lhs),
            fmt_f64(rhs),
            pass.to_string(),
        ]);
    }
    report.assert_record(chain.into_record());
    report.csv = Some(csv);
    Ok(report)
}

fn game(config: &ExperimentConfig) -> Result<Report, RunError> {
    let section = seq_section(config)?;
    let theory = seq_theory(section)?;
    let rounds = section
        .rounds
        .ok_or_else(|| usage("config: [seq] rounds is required for game"))?;
    let spec = GameSpec::new(theory.clone(), rounds)?;
    let value = minimax_value_seq(&spec)?;

    let mut report = Report::new("game", "seq", config.seed, &config.raw);
    report.row(format!(
        "theory={} rounds={rounds}: V={}",
        theory_label(&theory),
        fmt_rational(&value)
    ));
    let mut csv = CsvTable {
        header: ["theory", "rounds", "v_frac", "v_dec"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: vec![vec![
            theory_label(&theory),
            rounds.to_string(),
            value.to_string(),
            fmt_f64(to_f64(&value)),
        ]],
    };
    csv.rows.truncate(1);
    report.csv = Some(csv);
    Ok(report)
}

fn sol(config: &ExperimentConfig) -> Result<Report, RunError> {
    let section = config.uni.clone().unwrap_or_default();
    let max_len = section.corpus_max_len.unwrap_or(4);
    if max_len > 8 {
        return Err(RunError::Core(CoreError::Capacity {
            what: "sol corpus string length",
            limit: 8,
            requested: max_len,
        }));
    }
    let mut report = Report::new("sol", "uni", config.seed, &config.raw);
    report.machine_id = Some(MACHINE_ID);
    let mut csv = CsvTable {
        header: ["y", "prior_frac", "prior_dec", "loss_frac", "loss_dec", "gain", "kolmogorov", "pass"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: Vec::new(),
    };
    let mut chain = Aggregate::new("E");
    for y in corpus(max_len) {
        let outcome = verify_theorem_e(&y)?;
        let prior = solomonoff_prior_exact(&y)?;
        report.row(format!(
            "y={}: Q={} loss={} G={} K={} {}",
            bits_to_string(&y),
            fmt_rational(&prior),
            fmt_rational(&outcome.loss),
            fmt_f64(outcome.gain),
            outcome.kolmogorov,
            if outcome.ok() { "PASS" } else { "FAIL" },
        ));
        chain.record(
            (outcome.gain - to_f64(&outcome.loss)).min(outcome.kolmogorov as f64 - outcome.gain),
            outcome.ok(),
        );
        csv.rows.push(vec![
            bits_to_string(&y),
            prior.to_string(),
            fmt_f64(to_f64(&prior)),
            outcome.loss.to_string(),
            fmt_f64(to_f64(&outcome.loss)),
            fmt_f64(outcome.gain),
            outcome.kolmogorov.to_string(),
            outcome.ok().to_string(),
        ]);
    }
    report.assert_record(chain.into_record());
    report.csv = Some(csv);
    Ok(report)
}

/// Dry-run plan: instance counts, enumeration sizes, and the check tags a
/// run would assert. Refuses configurations that breach ceilings.
pub fn describe(config: &ExperimentConfig, overrides: &Overrides) -> Result<String, RunError> {
    let mut out = String::new();
    match config.scenario {
        Scenario::Slt => {
            let section = config.slt.clone().unwrap_or_default();
            let m = section.domain_size.unwrap_or(3);
            let ceiling = effective_ceiling(VERIFY_SLT_DOMAIN_CEILING, overrides);
            if m > ceiling {
                return Err(RunError::Core(CoreError::Capacity {
                    what: "verify sweep domain size",
                    limit: ceiling,
                    requested: m,
                }));
            }
            let theories = (1u64 << (1 << m)) - 1;
            let sequences: usize = (1..=m)
                .map(|n| enumerate_input_sequences(Domain::new(m).unwrap(), n).unwrap().len())
                .sum();
            out.push_str(&format!(
                "plan: slt sweep over m={m}: {theories} theories x {sequences} input sequences\n"
            ));
            out.push_str("asserts: radem-identity, cover-identity, range, D");
            if section.distributions.is_some() {
                out.push_str(", D''-s, D''-h, V<=1-F");
            }
            out.push('\n');
        }
        Scenario::Seq => {
            let section = config.seq.clone().unwrap_or_default();
            let m = section.domain_size.unwrap_or(2);
            let depth = section.depth.unwrap_or(2);
            let ceiling = effective_ceiling(VERIFY_SEQ_DEPTH_CEILING, overrides);
            if depth > ceiling {
                return Err(RunError::Core(CoreError::Capacity {
                    what: "verify sweep depth",
                    limit: ceiling,
                    requested: depth,
                }));
            }
            let theories = (1u64 << (1 << m)) - 1;
            let trees: usize = (1..=depth.min(m))
                .map(|d| (m as u64).pow(((1usize << d) - 1) as u32) as usize)
                .sum();
            out.push_str(&format!(
                "plan: seq sweep over m={m} depth<={depth}: {theories} theories x <= {trees} trees\n"
            ));
            out.push_str(
                "asserts: radem-identity-seq, D-SEQ:V<=1-F, D-SEQ:1-F<=c*sqrt(1-G), zero-cover<=q-image, gain-counts, vc<=ldim\n",
            );
        }
        Scenario::Uni => {
            let section = config.uni.clone().unwrap_or_default();
            let max_len = section.corpus_max_len.unwrap_or(4);
            let ceiling = effective_ceiling(VERIFY_UNI_CORPUS_CEILING, overrides);
            if max_len > ceiling {
                return Err(RunError::Core(CoreError::Capacity {
                    what: "verify corpus string length",
                    limit: ceiling,
                    requested: max_len,
                }));
            }
            let count = (1u64 << (max_len + 1)) - 1;
            out.push_str(&format!(
                "plan: uni corpus of all strings length <= {max_len}: {count} strings\n"
            ));
            out.push_str("asserts: E, kraft, prefix-free, monotone-prior\n");
        }
        Scenario::Sweep => {
            let section = config.sweep.clone().unwrap_or_default();
            let m = section
                .domain_size
                .ok_or_else(|| usage("config: [sweep] domain_size is required"))?;
            if m > effective_ceiling(VERIFY_SLT_DOMAIN_CEILING, overrides) {
                return Err(RunError::Core(CoreError::Capacity {
                    what: "sweep domain size",
                    limit: effective_ceiling(VERIFY_SLT_DOMAIN_CEILING, overrides),
                    requested: m,
                }));
            }
            let max_size = section.max_theory_size.unwrap_or(1 << m).min(1 << m);
            let count = enumerate_theories(m, max_size)
                .map(|v| v.len())
                .unwrap_or_default();
            out.push_str(&format!("plan: sweep table m={m}: {count} theory rows\n"));
            out.push_str("asserts: D\n");
        }
    }
    Ok(out)
}

