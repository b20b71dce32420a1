//! Dense state vectors over three-level sites.
//!
//! Every site is one atomic ensemble and holds at most one collective
//! excitation: vacuum, an `h` excitation or a `v` excitation. A register of
//! `n` sites is stored as `3^n` complex amplitudes. Site `k` (1-based) is
//! digit `k - 1` of the basis index written in base 3, so site 1 is the
//! least significant digit and appending a site never reshuffles the array.
//!
//! The logical qubit lives on `{H, V}` with `|0> = H`, `|1> = V`, and the
//! Pauli `Z` is `+1` on `H`, `-1` on `V`. Every Pauli acts as identity on
//! the vacuum level.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Tolerance for unitarity and normalization checks.
pub const TOLERANCE: f64 = 1e-12;

/// A 3x3 single-site operator, `m[row][col]` mapping input level `col` to
/// output level `row`, in the order `[VAC, H, V]`.
pub type SiteMatrix = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// State of one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteLevel {
    Vac = 0,
    H = 1,
    V = 2,
}

impl SiteLevel {
    pub const ALL: [SiteLevel; 3] = [SiteLevel::Vac, SiteLevel::H, SiteLevel::V];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(SiteLevel::Vac),
            1 => Some(SiteLevel::H),
            2 => Some(SiteLevel::V),
            _ => None,
        }
    }

    /// Eigenvalue of `Z`: `+1` on `H`, `-1` on `V`, `+1` on vacuum (identity).
    pub fn z_sign(self) -> f64 {
        match self {
            SiteLevel::V => -1.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for SiteLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiteLevel::Vac => "vac",
            SiteLevel::H => "h",
            SiteLevel::V => "v",
        })
    }
}

/// `3^n`.
pub fn dimension(n_sites: usize) -> usize {
    3usize.pow(n_sites as u32)
}

/// Basis index of a product of site levels (site 1 least significant).
pub fn encode(levels: &[SiteLevel]) -> usize {
    levels.iter().rev().fold(0, |acc, l| acc * 3 + l.index())
}

/// Inverse of [`encode`] for a register of `n_sites`.
pub fn decode(mut index: usize, n_sites: usize) -> Vec<SiteLevel> {
    let mut out = Vec::with_capacity(n_sites);
    for _ in 0..n_sites {
        out.push(SiteLevel::from_index(index % 3).expect("digit < 3"));
        index /= 3;
    }
    out
}

/// Level of `site` (1-based) inside basis index `index`.
#[inline]
pub fn digit(index: usize, site: usize) -> usize {
    (index / 3usize.pow(site as u32 - 1)) % 3
}

/// Dense amplitude vector of `n_sites` three-level sites.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

/// Product basis state with amplitude 1 on `levels`.
pub fn basis_state(levels: &[SiteLevel]) -> Result<StateVector> {
    StateVector::basis(levels)
}

/// `<a|b>`, conjugating `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner(b)
}

impl StateVector {
    pub fn basis(levels: &[SiteLevel]) -> Result<Self> {
        if levels.is_empty() {
            return Err(SimError::InvalidArity);
        }
        let n = levels.len();
        let mut amps = vec![ZERO; dimension(n)];
        amps[encode(levels)] = ONE;
        Ok(Self { n_sites: n, amps })
    }

    /// Wraps raw amplitudes. The vector is taken as given, not normalized.
    pub fn from_amplitudes(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_sites == 0 {
            return Err(SimError::InvalidArity);
        }
        if amps.len() != dimension(n_sites) {
            return Err(SimError::InvalidArity);
        }
        Ok(Self { n_sites, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, levels: &[SiteLevel]) -> Result<Complex64> {
        self.check_len(levels.len())?;
        Ok(self.amps[encode(levels)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm. Returns the squared norm before rescaling.
    pub fn normalize(&mut self) -> f64 {
        let n2 = self.norm_sqr();
        if n2 > 0.0 {
            let inv = 1.0 / n2.sqrt();
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
        n2
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_len(other.n_sites)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_len(&self, other: usize) -> Result<()> {
        if self.n_sites != other {
            return Err(SimError::DimensionMismatch {
                left: self.n_sites,
                right: other,
            });
        }
        Ok(())
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(SimError::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            });
        }
        Ok(())
    }

    /// Applies `m` to the tensor factor of `site`. With `require_unitary`
    /// the matrix is rejected unless `m^dagger m = I` within [`TOLERANCE`].
    pub fn apply_site_matrix(
        &mut self,
        site: usize,
        m: &SiteMatrix,
        require_unitary: bool,
    ) -> Result<()> {
        self.check_site(site)?;
        if require_unitary {
            let deviation = unitarity_deviation(m);
            if deviation > TOLERANCE {
                return Err(SimError::NotUnitary { deviation });
            }
        }
        let stride = 3usize.pow(site as u32 - 1);
        let block = 3 * stride;
        for outer in (0..self.amps.len()).step_by(block) {
            for inner in 0..stride {
                let i0 = outer + inner;
                let v = [
                    self.amps[i0],
                    self.amps[i0 + stride],
                    self.amps[i0 + 2 * stride],
                ];
                for (row, out) in m.iter().enumerate() {
                    self.amps[i0 + row * stride] = out[0] * v[0] + out[1] * v[1] + out[2] * v[2];
                }
            }
        }
        Ok(())
    }

    /// Probability that `site` is in the vacuum level.
    pub fn vac_population_at(&self, site: usize) -> Result<f64> {
        self.check_site(site)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| digit(*i, site) == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Total weight on basis states with at least one vacuum site.
    pub fn vac_population(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| decode(*i, self.n_sites).contains(&SiteLevel::Vac))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Zeroes every amplitude whose level at `site` fails `keep`. No
    /// renormalization; returns the weight that survived.
    pub fn project_site<F>(&mut self, site: usize, keep: F) -> Result<f64>
    where
        F: Fn(SiteLevel) -> bool,
    {
        self.check_site(site)?;
        let mut kept = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            let level = SiteLevel::from_index(digit(i, site)).expect("digit < 3");
            if keep(level) {
                kept += a.norm_sqr();
            } else {
                *a = ZERO;
            }
        }
        Ok(kept)
    }

    /// Applies a Pauli string (including its sign) in place.
    pub fn apply_pauli_string(&mut self, p: &PauliString) -> Result<()> {
        self.check_len(p.len())?;
        for (k, op) in p.ops().iter().enumerate() {
            if *op != Pauli::I {
                self.apply_site_matrix(k + 1, &op.matrix(), false)?;
            }
        }
        if p.sign() < 0 {
            self.amps.iter_mut().for_each(|a| *a = -*a);
        }
        Ok(())
    }

    /// `<psi|P|psi>` for a Pauli string. Fails if the imaginary part
    /// exceeds [`TOLERANCE`].
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        let mut applied = self.clone();
        applied.apply_pauli_string(p)?;
        let z = self.inner(&applied)?;
        if z.im.abs() > TOLERANCE {
            return Err(SimError::NonHermitian(z.im));
        }
        Ok(z.re)
    }
}

/// Pauli expectation value; see [`StateVector::expectation`].
pub fn expectation(state: &StateVector, p: &PauliString) -> Result<f64> {
    state.expectation(p)
}

/// Largest entry of `|m^dagger m - I|`.
pub fn unitarity_deviation(m: &SiteMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = ZERO;
            for row in m {
                acc += row[i].conj() * row[j];
            }
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

/// Conjugate transpose.
pub fn adjoint(m: &SiteMatrix) -> SiteMatrix {
    let mut out = [[ZERO; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = v.conj();
        }
    }
    out
}

/// Matrix product `a * b`.
pub fn matmul(a: &SiteMatrix, b: &SiteMatrix) -> SiteMatrix {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Largest entry of `|a - b|`.
pub fn max_entry_diff(a: &SiteMatrix, b: &SiteMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Embeds a 2x2 operator on `{H, V}` into a [`SiteMatrix`] with vacuum
/// fixed. `q[row][col]` uses `0 = H`, `1 = V`.
pub fn embed_qubit(q: [[Complex64; 2]; 2]) -> SiteMatrix {
    [
        [ONE, ZERO, ZERO],
        [ZERO, q[0][0], q[0][1]],
        [ZERO, q[1][0], q[1][1]],
    ]
}

/// Single-site Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> SiteMatrix {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => embed_qubit([[ONE, ZERO], [ZERO, ONE]]),
            Pauli::X => embed_qubit([[ZERO, ONE], [ONE, ZERO]]),
            Pauli::Y => embed_qubit([[ZERO, -i], [i, ZERO]]),
            Pauli::Z => embed_qubit([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

/// Signed tensor product of single-site Paulis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
    negative: bool,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        Self {
            ops,
            negative: false,
        }
    }

    pub fn identity(n_sites: usize) -> Self {
        Self::new(vec![Pauli::I; n_sites])
    }

    /// Identity everywhere except the given `(site, op)` pairs (1-based).
    pub fn with_ops(n_sites: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n_sites);
        for &(site, op) in ops {
            s.ops[site - 1] = op;
        }
        s
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for op in &self.ops {
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use SiteLevel::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_amplitudes(1, vec![c(0.0), c(s), c(s)]).unwrap()
    }

    #[test]
    fn basis_state_indices() {
        assert_eq!(basis_state(&[V]).unwrap().amplitudes()[2], ONE);
        let vv = basis_state(&[V, V]).unwrap();
        assert_eq!(vv.amplitudes()[8], ONE);
        assert_eq!(vv.norm_sqr(), 1.0);
        assert_eq!(basis_state(&[Vac]).unwrap().amplitudes()[0], ONE);
        assert_eq!(basis_state(&[]), Err(SimError::InvalidArity));
    }

    #[test]
    fn site_level_encoding_is_fixed() {
        for l in SiteLevel::ALL {
            assert_eq!(SiteLevel::from_index(l.index()), Some(l));
        }
        assert_eq!((Vac as usize, H as usize, V as usize), (0, 1, 2));
        assert_eq!(SiteLevel::from_index(3), None);
    }

    #[test]
    fn inner_products() {
        let v = basis_state(&[V]).unwrap();
        let h = basis_state(&[H]).unwrap();
        assert_eq!(inner_product(&v, &v).unwrap(), ONE);
        assert_eq!(inner_product(&h, &v).unwrap(), ZERO);
        let vv = basis_state(&[V, V]).unwrap();
        assert_eq!(
            inner_product(&v, &vv),
            Err(SimError::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn identity_matrix_is_bitwise_noop() {
        let mut s = plus();
        let before = s.clone();
        s.apply_site_matrix(1, &Pauli::I.matrix(), true).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn x_block_swaps_h_and_v() {
        let mut s = basis_state(&[H]).unwrap();
        s.apply_site_matrix(1, &Pauli::X.matrix(), true).unwrap();
        assert_eq!(s, basis_state(&[V]).unwrap());
    }

    #[test]
    fn matrix_then_adjoint_restores_state() {
        let t = 0.37_f64;
        let i = Complex64::new(0.0, 1.0);
        let m = embed_qubit([
            [c(t.cos()), -i * t.sin()],
            [-i * t.sin(), c(t.cos())],
        ]);
        let mut s = basis_state(&[H, V, H]).unwrap();
        s.apply_site_matrix(2, &Pauli::X.matrix(), true).unwrap();
        let before = s.clone();
        s.apply_site_matrix(2, &m, true).unwrap();
        s.apply_site_matrix(2, &adjoint(&m), true).unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn site_and_unitarity_errors() {
        let mut s = basis_state(&[H, H]).unwrap();
        assert_eq!(
            s.apply_site_matrix(3, &Pauli::X.matrix(), true),
            Err(SimError::SiteOutOfRange { site: 3, n_sites: 2 })
        );
        assert!(matches!(
            s.apply_site_matrix(0, &Pauli::X.matrix(), true),
            Err(SimError::SiteOutOfRange { .. })
        ));
        let mut bad = Pauli::I.matrix();
        bad[1][1] = c(2.0);
        assert!(matches!(
            s.apply_site_matrix(1, &bad, true),
            Err(SimError::NotUnitary { .. })
        ));
        // accepted without the flag
        s.apply_site_matrix(1, &bad, false).unwrap();
        assert!((s.norm_sqr() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn z_expectations() {
        let h = basis_state(&[H]).unwrap();
        let v = basis_state(&[V]).unwrap();
        let z = PauliString::new(vec![Pauli::Z]);
        assert_eq!(h.expectation(&z).unwrap(), 1.0);
        assert_eq!(v.expectation(&z).unwrap(), -1.0);
        assert_eq!(h.expectation(&z.clone().negated()).unwrap(), -1.0);
        let vac = basis_state(&[Vac]).unwrap();
        assert_eq!(vac.expectation(&z).unwrap(), 1.0);
        assert!(matches!(
            h.expectation(&PauliString::identity(2)),
            Err(SimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projection_keeps_selected_levels() {
        let mut s = plus();
        let kept = s.project_site(1, |l| l == H).unwrap();
        assert!((kept - 0.5).abs() < 1e-15);
        s.normalize();
        assert_eq!(s, basis_state(&[H]).unwrap());
    }

    #[test]
    fn vac_population_counts_any_vacuum_site() {
        let s = basis_state(&[H, Vac]).unwrap();
        assert_eq!(s.vac_population(), 1.0);
        assert_eq!(s.vac_population_at(1).unwrap(), 0.0);
        assert_eq!(s.vac_population_at(2).unwrap(), 1.0);
    }

    fn arb_state(n: usize) -> impl Strategy<Value = StateVector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dimension(n)).prop_filter_map(
            "nonzero",
            move |v| {
                let amps: Vec<_> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
                let mut s = StateVector::from_amplitudes(n, amps).ok()?;
                (s.normalize() > 1e-6).then_some(s)
            },
        )
    }

    fn arb_unitary() -> impl Strategy<Value = SiteMatrix> {
        (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(
            |(theta, alpha, beta, phi, vac_phase)| {
                let e = |x: f64| Complex64::from_polar(1.0, x);
                let g = e(phi);
                let mut m = embed_qubit([
                    [g * e(alpha) * theta.cos(), g * e(beta) * theta.sin()],
                    [-g * e(-beta) * theta.sin(), g * e(-alpha) * theta.cos()],
                ]);
                m[0][0] = e(vac_phase);
                m
            },
        )
    }

    proptest! {
        #[test]
        fn index_round_trip(n in 1usize..=6, seed in any::<u64>()) {
            let i = (seed as usize) % dimension(n);
            prop_assert_eq!(encode(&decode(i, n)), i);
        }

        #[test]
        fn unitary_ops_preserve_norm(s in arb_state(3), m in arb_unitary(), site in 1usize..=3) {
            let mut s = s;
            s.apply_site_matrix(site, &m, true).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn disjoint_site_ops_commute(s in arb_state(3), m1 in arb_unitary(), m2 in arb_unitary()) {
            let mut a = s.clone();
            a.apply_site_matrix(1, &m1, false).unwrap();
            a.apply_site_matrix(3, &m2, false).unwrap();
            let mut b = s;
            b.apply_site_matrix(3, &m2, false).unwrap();
            b.apply_site_matrix(1, &m1, false).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn all_identity_string_has_unit_expectation(s in arb_state(3)) {
            let e = s.expectation(&PauliString::identity(3)).unwrap();
            prop_assert!((e - 1.0).abs() < 1e-12);
        }
    }
}
