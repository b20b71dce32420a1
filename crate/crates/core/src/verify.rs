//! Fidelity, bipartite entropy and projective Pauli measurements.
//!
//! Measurements return both outcome branches with their Born weights;
//! nothing here draws random numbers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::state::{digit, embed_qubit, Pauli, StateVector, TOLERANCE};

/// Singular values below this are treated as exact zeros.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

/// Entropy threshold slack for the Bell-pair checks.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

/// `|<a|b>|^2`, normalized by both norms and clamped to `[0, 1]`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr();
    let den = a.norm_sqr() * b.norm_sqr();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((overlap / den).clamp(0.0, 1.0))
}

/// Von Neumann entropy in bits of the reduced state on `left_sites`
/// (1-based), from the Schmidt coefficients of the reshaped amplitudes.
pub fn entanglement_entropy(state: &StateVector, left_sites: &[usize]) -> Result<f64> {
    let n = state.n_sites();
    let mut left = left_sites.to_vec();
    left.sort_unstable();
    left.dedup();
    if left.len() != left_sites.len() {
        return Err(SimError::InvalidPartition("duplicate site".into()));
    }
    if left.is_empty() || left.len() >= n {
        return Err(SimError::InvalidPartition(format!(
            "left side must be a proper nonempty subset of 1..={n}, got {left_sites:?}"
        )));
    }
    if let Some(&bad) = left.iter().find(|&&s| s == 0 || s > n) {
        return Err(SimError::InvalidPartition(format!(
            "site {bad} outside 1..={n}"
        )));
    }
    let right: Vec<usize> = (1..=n).filter(|s| !left.contains(s)).collect();
    let rows = 3usize.pow(left.len() as u32);
    let cols = 3usize.pow(right.len() as u32);
    let pack = |i: usize, sites: &[usize]| {
        sites
            .iter()
            .rev()
            .fold(0usize, |acc, &s| acc * 3 + digit(i, s))
    };
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (i, a) in state.amplitudes().iter().enumerate() {
        if *a != Complex64::new(0.0, 0.0) {
            m[(pack(i, &left), pack(i, &right))] = *a;
        }
    }
    let norm = state.norm_sqr();
    let sv = m.singular_values();
    let entropy = sv
        .iter()
        .filter(|&&s| s > SINGULAR_CUTOFF)
        .map(|&s| {
            let p = s * s / norm;
            -p * p.log2()
        })
        .sum::<f64>();
    Ok(entropy.max(0.0))
}

/// Single-site measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub site: usize,
    pub basis: Basis,
    /// `+1` or `-1`.
    pub outcome: i8,
    pub probability: f64,
}

/// One outcome of a projective measurement. `state` is `None` when the
/// outcome has zero weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub record: MeasurementRecord,
    pub state: Option<StateVector>,
}

/// Projects `site` onto both eigenspaces of the chosen Pauli. The `+1`
/// branch comes first.
pub fn measure_pauli(state: &StateVector, site: usize, basis: Basis) -> Result<[Branch; 2]> {
    let vac = state.vac_population_at(site)?;
    if vac > TOLERANCE {
        return Err(SimError::VacPopulated {
            site,
            population: vac,
        });
    }
    let p = basis.pauli().matrix();
    let total = state.norm_sqr();
    let branch = |sign: i8| -> Result<Branch> {
        let half = Complex64::new(0.5, 0.0);
        let s = Complex64::new(sign as f64 * 0.5, 0.0);
        let projector = embed_qubit([
            [half + s * p[1][1], s * p[1][2]],
            [s * p[2][1], half + s * p[2][2]],
        ]);
        let mut post = state.clone();
        post.apply_site_matrix(site, &projector, false)?;
        let weight = post.norm_sqr();
        let probability = if total > 0.0 { weight / total } else { 0.0 };
        let state = if probability > TOLERANCE {
            post.normalize();
            Some(post)
        } else {
            None
        };
        Ok(Branch {
            record: MeasurementRecord {
                site,
                basis,
                outcome: sign,
                probability,
            },
            state,
        })
    };
    Ok([branch(1)?, branch(-1)?])
}

/// One branch of the interior `X` measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionBranch {
    /// Outcomes on sites `2..n`, in order.
    pub outcomes: Vec<i8>,
    pub probability: f64,
    /// Entropy between site 1 and the rest; measured sites are in product
    /// states, so this is the entanglement between the two end sites.
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellExtraction {
    pub n_sites: usize,
    pub branches: Vec<ExtractionBranch>,
}

impl BellExtraction {
    pub fn min_entropy(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.entropy)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Every branch leaves a maximally entangled end pair and the branch
    /// weights are complete.
    pub fn passed(&self) -> bool {
        !self.branches.is_empty()
            && (self.total_probability() - 1.0).abs() < TOLERANCE
            && self.min_entropy() >= 1.0 - ENTROPY_TOLERANCE
    }
}

/// Measures every interior site of `state` in `X`, sequentially, and
/// records the end-pair entropy on each branch.
pub fn bell_extraction(state: &StateVector) -> Result<BellExtraction> {
    let n = state.n_sites();
    if n < 3 {
        return Err(SimError::NoInteriorSites(n));
    }
    let mut branches = Vec::with_capacity(1 << (n - 2));
    let mut stack = vec![(state.clone(), Vec::<i8>::new(), 1.0f64)];
    while let Some((s, outcomes, prob)) = stack.pop() {
        let site = outcomes.len() + 2;
        if site == n {
            let entropy = entanglement_entropy(&s, &[1])?;
            branches.push(ExtractionBranch {
                outcomes,
                probability: prob,
                entropy,
            });
            continue;
        }
        let [plus, minus] = measure_pauli(&s, site, Basis::X)?;
        // reverse push so branches come out in (+, -) lexicographic order
        for b in [minus, plus] {
            if let Some(post) = b.state {
                let mut o = outcomes.clone();
                o.push(b.record.outcome);
                stack.push((post, o, prob * b.record.probability));
            }
        }
    }
    Ok(BellExtraction {
        n_sites: n,
        branches,
    })
}

/// Bell-extraction result for the protocol output on `n` sites.
pub fn bell_extraction_check(n: usize) -> Result<bool> {
    if n < 3 {
        return Err(SimError::NoInteriorSites(n));
    }
    let state = crate::protocol::run_protocol(n)?;
    Ok(bell_extraction(&state)?.passed())
}

/// True when every single-site reduced state is pure.
pub fn is_fully_product(state: &StateVector) -> Result<bool> {
    let n = state.n_sites();
    if n == 1 {
        return Ok(true);
    }
    for site in 1..=n {
        if entanglement_entropy(state, &[site])? > ENTROPY_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

fn pattern_disentangles(state: &StateVector, pattern: &[(usize, Basis)]) -> Result<bool> {
    let Some((&(site, basis), rest)) = pattern.split_first() else {
        return is_fully_product(state);
    };
    for b in measure_pauli(state, site, basis)? {
        if let Some(post) = b.state {
            if !pattern_disentangles(&post, rest)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest number of single-site Pauli measurements that leaves `state`
/// fully product on every outcome branch, found by exhaustive search over
/// site subsets and bases. Exponential; meant for four sites or fewer.
pub fn pauli_persistency(state: &StateVector) -> Result<usize> {
    let n = state.n_sites();
    for k in 0..=n {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let sites: Vec<usize> = (1..=n).filter(|s| mask & (1 << (s - 1)) != 0).collect();
            let combos = 3usize.pow(k as u32);
            for c in 0..combos {
                let pattern: Vec<(usize, Basis)> = sites
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| (s, Basis::ALL[(c / 3usize.pow(j as u32)) % 3]))
                    .collect();
                if pattern_disentangles(state, &pattern)? {
                    return Ok(k);
                }
            }
        }
    }
    Ok(n)
}
