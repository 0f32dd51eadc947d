//! Python bindings for the falsifiability measures. Exact rationals cross
//! the boundary as `"p/q"` strings (feed them to `fractions.Fraction`);
//! bit strings as ASCII '0'/'1' text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use falsify_core::error::Error as CoreError;
use falsify_core::numerics::{solve_matrix_game as solve_game, MatrixGame, Rational};
use falsify_core::{seq, slt, uni};

fn pyerr(e: CoreError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rational(text: &str) -> PyResult<Rational> {
    text.parse::<Rational>()
        .map_err(|e| PyValueError::new_err(format!("bad rational {text:?}: {e}")))
}

fn parse_labels(s: &str) -> PyResult<Vec<u8>> {
    uni::bits_from_str(s).map_err(pyerr)
}

/// A finite set of binary predictors over the domain `{0, .., m-1}`.
#[pyclass]
struct Theory {
    inner: slt::Theory,
}

#[pymethods]
impl Theory {
    #[new]
    fn new(domain_size: usize, predictors: Vec<String>) -> PyResult<Self> {
        let domain = slt::Domain::new(domain_size).map_err(pyerr)?;
        let vectors = predictors
            .iter()
            .map(|s| parse_labels(s))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Theory {
            inner: slt::Theory::new(domain, vectors).map_err(pyerr)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __repr__(&self) -> String {
        let labels: Vec<String> = self
            .inner
            .predictors()
            .iter()
            .map(|p| uni::bits_to_string(p))
            .collect();
        format!("Theory({}, {:?})", self.inner.domain().size(), labels)
    }

    fn soft_falsifiability(&self, points: Vec<usize>) -> PyResult<String> {
        let inputs = self.input_sequence(points)?;
        Ok(slt::soft_falsifiability(&self.inner, &inputs)
            .map_err(pyerr)?
            .to_string())
    }

    fn hard_falsifiability(&self, points: Vec<usize>) -> PyResult<f64> {
        let inputs = self.input_sequence(points)?;
        slt::hard_falsifiability(&self.inner, &inputs).map_err(pyerr)
    }

    fn soft_falsifiability_n(&self, n: usize) -> PyResult<String> {
        Ok(slt::soft_falsifiability_n(&self.inner, n)
            .map_err(pyerr)?
            .to_string())
    }

    fn hard_falsifiability_n(&self, n: usize) -> PyResult<f64> {
        slt::hard_falsifiability_n(&self.inner, n).map_err(pyerr)
    }

    fn rademacher(&self, points: Vec<usize>) -> PyResult<String> {
        let inputs = self.input_sequence(points)?;
        Ok(slt::rademacher(&self.inner, &inputs).map_err(pyerr)?.to_string())
    }

    fn rademacher_loss(&self, points: Vec<usize>) -> PyResult<String> {
        let inputs = self.input_sequence(points)?;
        Ok(slt::rademacher_loss(&self.inner, &inputs)
            .map_err(pyerr)?
            .to_string())
    }

    fn covering_number(&self, points: Vec<usize>) -> PyResult<usize> {
        let inputs = self.input_sequence(points)?;
        slt::covering_number(&self.inner, &inputs).map_err(pyerr)
    }

    fn shatters(&self, points: Vec<usize>) -> PyResult<bool> {
        let inputs = self.input_sequence(points)?;
        slt::shatters(&self.inner, &inputs).map_err(pyerr)
    }

    fn vc_dimension(&self) -> usize {
        slt::vc_dimension(&self.inner)
    }

    fn littlestone_dimension(&self) -> usize {
        seq::littlestone_dimension(&self.inner)
    }

    fn vc_lifted(&self, depth_bound: usize) -> PyResult<usize> {
        seq::vc_lifted(&self.inner, depth_bound).map_err(pyerr)
    }

    fn erm(&self, points: Vec<usize>, labels: &str) -> PyResult<usize> {
        let inputs = self.input_sequence(points)?;
        let sample = slt::LabeledSample::new(inputs, parse_labels(labels)?).map_err(pyerr)?;
        slt::erm(&self.inner, &sample).map_err(pyerr)
    }

    fn empirical_risk(&self, points: Vec<usize>, labels: &str) -> PyResult<String> {
        let inputs = self.input_sequence(points)?;
        let sample = slt::LabeledSample::new(inputs, parse_labels(labels)?).map_err(pyerr)?;
        Ok(slt::empirical_risk(&self.inner, &sample)
            .map_err(pyerr)?
            .to_string())
    }

    /// Exact minimax value of the n-round prediction game.
    fn minimax_value(&self, rounds: usize) -> PyResult<String> {
        let spec = seq::GameSpec::new(self.inner.clone(), rounds).map_err(pyerr)?;
        Ok(seq::minimax_value_seq(&spec).map_err(pyerr)?.to_string())
    }

    fn seq_soft_falsifiability(&self, tree: &Tree) -> PyResult<String> {
        Ok(seq::soft_falsifiability_seq(&self.inner, &tree.inner)
            .map_err(pyerr)?
            .to_string())
    }

    /// Returns `(value, effective_count, zero_count, degenerate)`.
    fn seq_hard_falsifiability(&self, tree: &Tree) -> PyResult<(f64, u64, u64, bool)> {
        let report = seq::hard_falsifiability_seq(&self.inner, &tree.inner).map_err(pyerr)?;
        Ok((
            report.value,
            report.effective_count,
            report.zero_count,
            report.degenerate,
        ))
    }

    fn seq_rademacher(&self, tree: &Tree) -> PyResult<String> {
        Ok(seq::seq_rademacher(&self.inner, &tree.inner)
            .map_err(pyerr)?
            .to_string())
    }

    fn q_image_count(&self, tree: &Tree) -> PyResult<usize> {
        let lifted =
            seq::LiftedTheory::new(self.inner.clone(), tree.inner.depth()).map_err(pyerr)?;
        seq::q_image_count(&lifted, &tree.inner).map_err(pyerr)
    }

    fn zero_cover_number(&self, tree: &Tree) -> PyResult<usize> {
        seq::zero_cover_number(&self.inner, &tree.inner).map_err(pyerr)
    }
}

impl Theory {
    fn input_sequence(&self, points: Vec<usize>) -> PyResult<slt::InputSequence> {
        slt::InputSequence::new(self.inner.domain(), points).map_err(pyerr)
    }
}

/// A complete binary input-valued tree, nodes in heap order.
#[pyclass]
struct Tree {
    inner: seq::Tree,
}

#[pymethods]
impl Tree {
    #[new]
    fn new(domain_size: usize, depth: usize, nodes: Vec<usize>) -> PyResult<Self> {
        let domain = slt::Domain::new(domain_size).map_err(pyerr)?;
        Ok(Tree {
            inner: seq::Tree::new(domain, depth, nodes).map_err(pyerr)?,
        })
    }

    fn all_paths_distinct(&self) -> bool {
        self.inner.all_paths_distinct()
    }

    fn __repr__(&self) -> String {
        format!(
            "Tree(depth={}, nodes={:?})",
            self.inner.depth(),
            self.inner.nodes()
        )
    }
}

/// Exact minimax solution of a zero-sum matrix game (row player minimizes).
/// Entries are rational strings; returns `(value, row_strategy)`.
#[pyfunction]
fn solve_matrix_game(payoff: Vec<Vec<String>>) -> PyResult<(String, Vec<String>)> {
    let rows = payoff
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| parse_rational(s))
                .collect::<PyResult<Vec<_>>>()
        })
        .collect::<PyResult<Vec<_>>>()?;
    let game = MatrixGame::new(rows).map_err(pyerr)?;
    let (value, strategy) = solve_game(&game);
    Ok((
        value.to_string(),
        strategy.iter().map(|p| p.to_string()).collect(),
    ))
}

#[pyfunction]
fn solomonoff_prior(y: &str) -> PyResult<String> {
    Ok(uni::solomonoff_prior_exact(&parse_labels(y)?)
        .map_err(pyerr)?
        .to_string())
}

#[pyfunction]
fn solomonoff_prior_finite(y: &str, n: usize) -> PyResult<String> {
    Ok(uni::solomonoff_prior_finite(&parse_labels(y)?, n)
        .map_err(pyerr)?
        .to_string())
}

#[pyfunction]
fn solomonoff_predict(history: &str) -> PyResult<(String, String)> {
    let (q0, q1) = uni::solomonoff_predict(&parse_labels(history)?).map_err(pyerr)?;
    Ok((q0.to_string(), q1.to_string()))
}

#[pyfunction]
fn kolmogorov_complexity(y: &str) -> PyResult<usize> {
    uni::kolmogorov_complexity(&parse_labels(y)?).map_err(pyerr)
}

#[pyfunction]
fn hard_falsifiability_uni(y: &str) -> PyResult<f64> {
    uni::hard_falsifiability_uni(&parse_labels(y)?).map_err(pyerr)
}

/// Full induction chain for one string: `(loss, gain, kolmogorov, ok)`.
#[pyfunction]
fn verify_theorem_e(y: &str) -> PyResult<(String, f64, usize, bool)> {
    let report = uni::verify_theorem_e(&parse_labels(y)?).map_err(pyerr)?;
    Ok((
        report.loss.to_string(),
        report.gain,
        report.kolmogorov,
        report.ok(),
    ))
}

/// Run a program on the toy machine: `(kind, content)` where kind is
/// "finite" or "periodic".
#[pyfunction]
fn run_program(bits: &str) -> PyResult<(String, String)> {
    let parsed = uni::parse_program(&parse_labels(bits)?)
        .ok_or_else(|| PyValueError::new_err(format!("not a valid program: {bits:?}")))?;
    Ok(match uni::run_machine(&parsed) {
        uni::MachineOutput::Finite(w) => ("finite".to_string(), uni::bits_to_string(&w)),
        uni::MachineOutput::Periodic(w) => ("periodic".to_string(), uni::bits_to_string(&w)),
    })
}

#[pyfunction]
fn machine_id() -> &'static str {
    uni::MACHINE_ID
}

#[pymodule]
fn falsify_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Theory>()?;
    m.add_class::<Tree>()?;
    m.add_function(wrap_pyfunction!(solve_matrix_game, m)?)?;
    m.add_function(wrap_pyfunction!(solomonoff_prior, m)?)?;
    m.add_function(wrap_pyfunction!(solomonoff_prior_finite, m)?)?;
    m.add_function(wrap_pyfunction!(solomonoff_predict, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(hard_falsifiability_uni, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem_e, m)?)?;
    m.add_function(wrap_pyfunction!(run_program, m)?)?;
    m.add_function(wrap_pyfunction!(machine_id, m)?)?;
    m.add("MACHINE_ID", uni::MACHINE_ID)?;
    Ok(())
}
