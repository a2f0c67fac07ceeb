//! Orthonormal tensor Legendre basis under the uniform probability
//! measure on `[−1,1]`, Gauss–Legendre quadrature, coefficient
//! computation, and certified order-one test functions.
//!
//! `Ψ_ν(y) = Π_k Ψ_{ν_k}(y_k)` with `Ψ_n = √(2n+1) P_n`, where `P_n` is
//! the classical Legendre polynomial normalized by `P_n(1) = 1`. The
//! empty product makes `Ψ_0 ≡ 1`.

use std::sync::Arc;

use thiserror::Error;

use crate::anisotropy::AnisotropySequence;
use crate::multiindex::{IndexSet, MultiIndex, MultiIndexError};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LegendreError {
    #[error("evaluation point {0} lies outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("point supplies {found} dimensions but the index needs dimension {needed}")]
    MissingDimension { needed: u32, found: usize },
    #[error("tensor grid of {nodes} nodes exceeds the budget of {budget}")]
    NodeBudgetExceeded { nodes: u128, budget: usize },
    #[error("blocks have inconsistent codomain dimensions")]
    RaggedBlocks,
    #[error("block count {found} does not match index set cardinality {expected}")]
    BlockCountMismatch { expected: usize, found: usize },
    #[error("codomain vector v must be nonzero")]
    ZeroCodomainVector,
    #[error("coefficients violate the attached anisotropy: |c_{i}| = {c} > b_{i} = {b}")]
    AnisotropyViolation { i: usize, c: f64, b: f64 },
    #[error(transparent)]
    Index(#[from] MultiIndexError),
    #[error("malformed coefficient CSV line {0:?}")]
    CsvParse(String),
}

/// Default cap on tensor-grid evaluations; jobs above it fail loudly
/// instead of silently grinding.
pub const DEFAULT_NODE_BUDGET: usize = 100_000_000;

/// First and second moment `(τ, σ)` of a univariate measure on `[−1,1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub tau: f64,
    pub sigma: f64,
}

/// `Ψ_degree(y) = √(2·degree+1) · P_degree(y)` by the three-term
/// recurrence.
pub fn legendre_eval(degree: usize, y: f64) -> Result<f64, LegendreError> {
    if !(-1.0..=1.0).contains(&y) {
        return Err(LegendreError::OutOfDomain(y));
    }
    Ok(((2 * degree + 1) as f64).sqrt() * legendre_p(degree, y))
}

/// Classical `P_n(y)` with `P_n(1) = 1`.
fn legendre_p(n: usize, y: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => y,
        _ => {
            let (mut prev, mut cur) = (1.0, y);
            for k in 1..n {
                let next = ((2 * k + 1) as f64 * y * cur - k as f64 * prev) / (k + 1) as f64;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Fills `out[d] = Ψ_d(y)` for `d = 0..=max_degree` in one recurrence pass.
pub(crate) fn legendre_values_into(max_degree: usize, y: f64, out: &mut [f64]) {
    debug_assert!(out.len() > max_degree);
    let mut prev = 1.0;
    out[0] = 1.0;
    if max_degree == 0 {
        return;
    }
    let mut cur = y;
    out[1] = 3f64.sqrt() * y;
    for k in 1..max_degree {
        let next = ((2 * k + 1) as f64 * y * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
        out[k + 1] = ((2 * (k + 1) + 1) as f64).sqrt() * cur;
    }
}

/// `Ψ_ν(y) = Π_{k ∈ supp(ν)} Ψ_{ν_k}(y_k)` with `y` dense over dimensions
/// `1..=y.len()`.
pub fn tensor_legendre_eval(nu: &MultiIndex, y: &[f64]) -> Result<f64, LegendreError> {
    let mut prod = 1.0;
    for (dim, exp) in nu.pairs() {
        if dim as usize > y.len() {
            return Err(LegendreError::MissingDimension {
                needed: dim,
                found: y.len(),
            });
        }
        prod *= legendre_eval(exp as usize, y[dim as usize - 1])?;
    }
    Ok(prod)
}

/// A univariate quadrature rule on `[−1,1]` normalized to the uniform
/// probability measure (weights sum to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// The `q`-point Gauss–Legendre rule; exact on polynomials of degree
/// `≤ 2q−1`. Nodes are Newton-refined roots of `P_q` to 1e−14.
pub fn gauss_legendre_rule(q: usize) -> QuadratureRule {
    assert!(q >= 1);
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..(q + 1) / 2 {
        // Chebyshev-style initial guess, then Newton on P_q
        let mut x = (std::f64::consts::PI * (4 * i + 3) as f64 / (4 * q + 2) as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_p_and_derivative(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-14 {
                break;
            }
        }
        let (_, dp) = legendre_p_and_derivative(q, x);
        // classical weight 2/((1-x^2) P_q'(x)^2), halved for d\rho = dy/2
        let w = 1.0 / ((1.0 - x * x) * dp * dp);
        nodes[q - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    QuadratureRule { nodes, weights }
}

fn legendre_p_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    // (1 - x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x))
    let dp = n as f64 * (prev - x * cur) / (1.0 - x * x);
    (cur, dp)
}

/// An indexed family of codomain vectors `c_ν ∈ R^K`, laid out in the
/// deterministic order of its index set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    index_set: IndexSet,
    blocks: Vec<Vec<f64>>,
    codomain_dim: usize,
}

impl CoefficientVector {
    pub fn new(
        index_set: IndexSet,
        blocks: Vec<Vec<f64>>,
        codomain_dim: usize,
    ) -> Result<Self, LegendreError> {
        if blocks.len() != index_set.len() {
            return Err(LegendreError::BlockCountMismatch {
                expected: index_set.len(),
                found: blocks.len(),
            });
        }
        if blocks.iter().any(|b| b.len() != codomain_dim) {
            return Err(LegendreError::RaggedBlocks);
        }
        Ok(Self {
            index_set,
            blocks,
            codomain_dim,
        })
    }

    pub fn zeros(index_set: IndexSet, codomain_dim: usize) -> Self {
        let blocks = vec![vec![0.0; codomain_dim]; index_set.len()];
        Self {
            index_set,
            blocks,
            codomain_dim,
        }
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn block(&self, nu: &MultiIndex) -> Option<&[f64]> {
        self.index_set
            .position(nu)
            .map(|i| self.blocks[i].as_slice())
    }

    /// Euclidean norms `‖c_ν‖` in index order.
    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| norm2(b)).collect()
    }

    /// `‖c‖_{p;V} = (Σ ‖c_ν‖^p)^{1/p}`.
    pub fn lp_block_norm(&self, p: f64) -> f64 {
        assert!(p > 0.0);
        self.blocks
            .iter()
            .map(|b| norm2(b).powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Best `s`-term block error `σ_s(c)_{p;V}`: the `ℓ^p` norm of all but
    /// the `s` largest blocks.
    pub fn best_s_term_block_error(&self, s: usize, p: f64) -> f64 {
        let mut norms = self.block_norms();
        norms.sort_by(|a, b| b.partial_cmp(a).unwrap());
        norms
            .iter()
            .skip(s)
            .map(|x| x.powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// `‖self − other‖_{2;V}` over the union of the two index sets;
    /// missing blocks count as zero.
    pub fn l2_distance(&self, other: &CoefficientVector) -> f64 {
        let mut sq = 0.0;
        for (nu, b) in self.index_set.iter().zip(&self.blocks) {
            match other.block(nu) {
                Some(ob) => sq += b.iter().zip(ob).map(|(x, y)| (x - y) * (x - y)).sum::<f64>(),
                None => sq += b.iter().map(|x| x * x).sum::<f64>(),
            }
        }
        for (nu, b) in other.index_set.iter().zip(&other.blocks) {
            if self.index_set.position(nu).is_none() {
                sq += b.iter().map(|x| x * x).sum::<f64>();
            }
        }
        sq.sqrt()
    }

    /// `(Σ_ν ‖c_ν‖²)^{1/2}`; by Parseval, the `L²` norm of the expansion.
    pub fn l2_norm(&self) -> f64 {
        self.lp_block_norm(2.0)
    }

    /// CSV with columns `index,k,value`; the index column uses the
    /// `dim:exp` text form (empty for the zero index).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,k,value\n");
        for (nu, block) in self.index_set.iter().zip(&self.blocks) {
            for (k, v) in block.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", nu.to_text(), k, v));
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, LegendreError> {
        let mut entries: Vec<(MultiIndex, usize, f64)> = Vec::new();
        for line in text.lines().skip(1) {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.rsplitn(3, ',');
            let v: f64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| LegendreError::CsvParse(line.to_string()))?;
            let k: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| LegendreError::CsvParse(line.to_string()))?;
            let nu = MultiIndex::parse_text(parts.next().unwrap_or(""))?;
            entries.push((nu, k, v));
        }
        let codomain_dim = entries.iter().map(|(_, k, _)| k + 1).max().unwrap_or(1);
        let set = IndexSet::from_members(entries.iter().map(|(nu, _, _)| nu.clone()).collect());
        let mut blocks = vec![vec![0.0; codomain_dim]; set.len()];
        for (nu, k, v) in entries {
            let pos = set.position(&nu).unwrap();
            blocks[pos][k] = v;
        }
        CoefficientVector::new(set, blocks, codomain_dim)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

type EvalFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// An evaluable map from a finite-dimensional slice of `[−1,1]^∞` into
/// `R^K`, with optional ground truth attached.
///
/// Evaluation is a pure function of the point, so instances may be
/// shared freely across parallel workers.
#[derive(Clone)]
pub struct TestFunction {
    active_dims: usize,
    codomain_dim: usize,
    eval: Arc<EvalFn>,
    truth_coeffs: Option<CoefficientVector>,
    anisotropy: Option<AnisotropySequence>,
    sup_bound: Option<f64>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("active_dims", &self.active_dims)
            .field("codomain_dim", &self.codomain_dim)
            .field("has_truth", &self.truth_coeffs.is_some())
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        active_dims: usize,
        codomain_dim: usize,
        eval: Arc<EvalFn>,
    ) -> Self {
        Self {
            active_dims,
            codomain_dim,
            eval,
            truth_coeffs: None,
            anisotropy: None,
            sup_bound: None,
        }
    }

    pub fn zero(codomain_dim: usize) -> Self {
        let mut f = Self::new(
            0,
            codomain_dim,
            Arc::new(|_, out: &mut [f64]| out.fill(0.0)),
        );
        f.truth_coeffs = Some(CoefficientVector::zeros(IndexSet::default(), codomain_dim));
        f
    }

    /// The truncated expansion `Σ_ν c_ν Ψ_ν` of a coefficient vector,
    /// with the coefficients themselves as ground truth.
    pub fn from_expansion(coeffs: CoefficientVector) -> Self {
        let k = coeffs.codomain_dim();
        let dims = coeffs
            .index_set()
            .iter()
            .map(|nu| nu.max_dim())
            .max()
            .unwrap_or(0) as usize;
        let eval_coeffs = coeffs.clone();
        let eval = Arc::new(move |y: &[f64], out: &mut [f64]| {
            out.fill(0.0);
            for (nu, block) in eval_coeffs.index_set().iter().zip(eval_coeffs.blocks()) {
                let psi = tensor_legendre_eval(nu, y).expect("point covers active dims");
                for (o, b) in out.iter_mut().zip(block) {
                    *o += psi * b;
                }
            }
        });
        let mut f = Self::new(dims, k, eval);
        f.truth_coeffs = Some(coeffs);
        f
    }

    /// `α f + β g` with truth combined when both carry it.
    pub fn linear_combination(alpha: f64, f: &TestFunction, beta: f64, g: &TestFunction) -> Self {
        assert_eq!(f.codomain_dim, g.codomain_dim);
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let k = f.codomain_dim;
        let eval = Arc::new(move |y: &[f64], out: &mut [f64]| {
            let mut tmp = vec![0.0; k];
            fe(y, out);
            ge(y, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o = alpha * *o + beta * t;
            }
        });
        let mut h = Self::new(f.active_dims.max(g.active_dims), k, eval);
        if let (Some(fc), Some(gc)) = (&f.truth_coeffs, &g.truth_coeffs) {
            let set = IndexSet::from_members(
                fc.index_set()
                    .iter()
                    .chain(gc.index_set().iter())
                    .cloned()
                    .collect(),
            );
            let blocks = set
                .iter()
                .map(|nu| {
                    let mut b = vec![0.0; k];
                    if let Some(fb) = fc.block(nu) {
                        for (x, y) in b.iter_mut().zip(fb) {
                            *x += alpha * y;
                        }
                    }
                    if let Some(gb) = gc.block(nu) {
                        for (x, y) in b.iter_mut().zip(gb) {
                            *x += beta * y;
                        }
                    }
                    b
                })
                .collect();
            h.truth_coeffs = Some(CoefficientVector::new(set, blocks, k).unwrap());
        }
        h
    }

    /// Attaches an anisotropy certificate; fails when some truth unit
    /// coefficient exceeds its budget `b_i`.
    pub fn with_anisotropy(mut self, b: AnisotropySequence) -> Result<Self, LegendreError> {
        if let Some(truth) = &self.truth_coeffs {
            for (nu, block) in truth.index_set().iter().zip(truth.blocks()) {
                if let Some(i) = nu.as_unit() {
                    let c = norm2(block);
                    let budget = b.entry(i as usize);
                    if c > budget + 1e-12 {
                        return Err(LegendreError::AnisotropyViolation {
                            i: i as usize,
                            c,
                            b: budget,
                        });
                    }
                }
            }
        }
        self.anisotropy = Some(b);
        Ok(self)
    }

    pub fn active_dims(&self) -> usize {
        self.active_dims
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn truth_coeffs(&self) -> Option<&CoefficientVector> {
        self.truth_coeffs.as_ref()
    }

    pub fn anisotropy(&self) -> Option<&AnisotropySequence> {
        self.anisotropy.as_ref()
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    /// Evaluates into a caller-provided buffer of length `codomain_dim`.
    /// `y` is dense over dimensions `1..=y.len()`; dimensions beyond
    /// `active_dims` are ignored by construction.
    pub fn evaluate_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.codomain_dim);
        (self.eval)(y, out)
    }

    pub fn evaluate(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.codomain_dim];
        self.evaluate_into(y, &mut out);
        out
    }

    /// `‖f‖_{L²}` via Parseval when ground truth is available.
    pub fn l2_norm_from_truth(&self) -> Option<f64> {
        self.truth_coeffs.as_ref().map(|c| c.l2_norm())
    }
}

/// Computes `c_ν = ∫ f(y) Ψ_ν(y) dϱ(y)` for every `ν` in the set by full
/// tensor-product Gauss–Legendre quadrature over the set's active
/// dimensions, with the default node budget.
///
/// Dimensions of `f` outside the set's active dimensions are frozen at
/// the measure mean `y = 0`; for expansions supported inside the set
/// (and for the order-one families, whose stray terms are mean-zero
/// linear factors) this is exact.
pub fn compute_coefficients(
    f: &TestFunction,
    set: &IndexSet,
    q: usize,
) -> Result<CoefficientVector, LegendreError> {
    compute_coefficients_budgeted(f, set, q, DEFAULT_NODE_BUDGET)
}

/// [`compute_coefficients`] with an explicit node budget.
pub fn compute_coefficients_budgeted(
    f: &TestFunction,
    set: &IndexSet,
    q: usize,
    budget: usize,
) -> Result<CoefficientVector, LegendreError> {
    let k = f.codomain_dim();
    if set.is_empty() {
        return Ok(CoefficientVector::zeros(set.clone(), k));
    }
    let dims = set.active_dims();
    let d = dims.len();

    // per-dim order: (max degree)+1, rounded up to the caller's q
    let orders: Vec<usize> = dims
        .iter()
        .map(|&dim| (set.max_degree_in_dim(dim) as usize + 1).max(q))
        .collect();
    let total_nodes: u128 = orders.iter().map(|&o| o as u128).product();
    if total_nodes > budget as u128 {
        return Err(LegendreError::NodeBudgetExceeded {
            nodes: total_nodes,
            budget,
        });
    }

    let rules: Vec<QuadratureRule> = orders.iter().map(|&o| gauss_legendre_rule(o)).collect();
    // vals[pos][node * stride + deg] = Psi_deg(node)
    let strides: Vec<usize> = dims
        .iter()
        .map(|&dim| set.max_degree_in_dim(dim) as usize + 1)
        .collect();
    let tables: Vec<Vec<f64>> = (0..d)
        .map(|pos| {
            let stride = strides[pos];
            let mut t = vec![0.0; rules[pos].nodes.len() * stride];
            for (ni, &x) in rules[pos].nodes.iter().enumerate() {
                legendre_values_into(stride - 1, x, &mut t[ni * stride..(ni + 1) * stride]);
            }
            t
        })
        .collect();

    // flattened support of each member as (dim position, exponent)
    let supports: Vec<Vec<(usize, usize)>> = set
        .iter()
        .map(|nu| {
            nu.pairs()
                .map(|(dim, exp)| {
                    let pos = dims.binary_search(&dim).unwrap();
                    (pos, exp as usize)
                })
                .collect()
        })
        .collect();

    let y_len = (f.active_dims()).max(dims.last().map_or(0, |&d| d as usize));
    let mut y = vec![0.0; y_len];
    let mut fval = vec![0.0; k];
    let mut acc = vec![0.0; set.len() * k];
    let mut digits = vec![0usize; d];

    let total = total_nodes as usize;
    for _ in 0..total {
        let mut weight = 1.0;
        for pos in 0..d {
            let ni = digits[pos];
            weight *= rules[pos].weights[ni];
            y[dims[pos] as usize - 1] = rules[pos].nodes[ni];
        }
        f.evaluate_into(&y, &mut fval);
        for (mi, support) in supports.iter().enumerate() {
            let mut psi = 1.0;
            for &(pos, exp) in support {
                psi *= tables[pos][digits[pos] * strides[pos] + exp];
            }
            let w = weight * psi;
            let row = &mut acc[mi * k..(mi + 1) * k];
            for (a, &fv) in row.iter_mut().zip(fval.iter()) {
                *a += w * fv;
            }
        }
        // odometer increment
        for pos in 0..d {
            digits[pos] += 1;
            if digits[pos] < rules[pos].nodes.len() {
                break;
            }
            digits[pos] = 0;
        }
    }

    let blocks = (0..set.len())
        .map(|i| acc[i * k..(i + 1) * k].to_vec())
        .collect();
    CoefficientVector::new(set.clone(), blocks, k)
}

/// The certified order-one family `f = Σ_i c_i v ψ_i` with
/// `ψ_i(y) = (y_i − τ)/σ`, together with its exact expansion in the
/// uniform-measure Legendre basis and the holomorphy sup bound
/// `(‖v‖/σ)(1 + (|τ|+1)‖c‖_1)`.
pub fn order_one_test_function(
    c: &[f64],
    v: &[f64],
    moments: Moments,
) -> Result<TestFunction, LegendreError> {
    let vnorm = norm2(v);
    if vnorm == 0.0 || v.is_empty() {
        return Err(LegendreError::ZeroCodomainVector);
    }
    let k = v.len();
    let (tau, sigma) = (moments.tau, moments.sigma);
    let c_owned = c.to_vec();
    let v_owned = v.to_vec();
    let dims = c.len();

    let (ce, ve) = (c_owned.clone(), v_owned.clone());
    let eval = Arc::new(move |y: &[f64], out: &mut [f64]| {
        let mut scalar = 0.0;
        for (i, &ci) in ce.iter().enumerate() {
            scalar += ci * (y[i] - tau) / sigma;
        }
        for (o, &vk) in out.iter_mut().zip(ve.iter()) {
            *o = scalar * vk;
        }
    });

    // Legendre expansion under the uniform measure: psi_i = (y_i - tau)/sigma
    // contributes c_i/(sigma*sqrt(3)) at e_i and -tau c_i/sigma at 0.
    let mut members = vec![MultiIndex::zero()];
    members.extend((1..=dims as u32).map(MultiIndex::unit));
    let set = IndexSet::from_members(members);
    let zero_coef = -tau / sigma * c_owned.iter().sum::<f64>();
    let blocks = set
        .iter()
        .map(|nu| {
            let scale = match nu.as_unit() {
                Some(i) => c_owned[i as usize - 1] / (sigma * 3f64.sqrt()),
                None => zero_coef,
            };
            v_owned.iter().map(|&vk| scale * vk).collect()
        })
        .collect();
    let truth = CoefficientVector::new(set, blocks, k)?;

    let l1: f64 = c.iter().map(|x| x.abs()).sum();
    let mut f = TestFunction::new(dims, k, eval);
    f.truth_coeffs = Some(truth);
    f.sup_bound = Some(vnorm / sigma * (1.0 + (tau.abs() + 1.0) * l1));
    Ok(f)
}
