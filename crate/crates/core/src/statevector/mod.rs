//! Dense pure-state simulator.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian). Only the
//! primitives the delegation protocols need are provided: product-state
//! preparation, CZ, Paulis, and X-Y-plane / computational-basis
//! measurements with collapse.

mod noise;

pub use noise::{apply_noise, flip_outcome, NoiseError, NoiseModel, NoiseSite};

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::angle::Angle;
use crate::pauli::{Pauli, PauliString};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 22;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("{0} qubits requested; the simulator supports at most {MAX_QUBITS}")]
    QubitLimit(usize),
    #[error("state needs at least one qubit")]
    Empty,
    #[error("qubit {qubit} out of range for {n} qubits")]
    OutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("pauli acts on {got} qubits, state has {expected}")]
    PauliSize { expected: usize, got: usize },
    #[error("post-selected outcome has zero probability")]
    ZeroProbability,
}

/// Single-qubit state `(|0⟩ + e^{iθ}|1⟩)/√2`.
pub fn prepare_plus_theta(theta: Angle) -> [Complex64; 2] {
    [Complex64::new(H, 0.0), theta.phase() * H]
}

/// Single-qubit state `X^r |0⟩`.
pub fn prepare_dummy(r: bool) -> [Complex64; 2] {
    let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    if r {
        [zero, one]
    } else {
        [one, zero]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    fn check_size(n: usize) -> Result<(), StateError> {
        match n {
            0 => Err(StateError::Empty),
            n if n > MAX_QUBITS => Err(StateError::QubitLimit(n)),
            _ => Ok(()),
        }
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self, StateError> {
        Self::check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    /// Tensor product of single-qubit states; `qubits[q]` lands on qubit `q`.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self, StateError> {
        let n = qubits.len();
        Self::check_size(n)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        amps.reserve_exact((1 << n) - 1);
        for (q, single) in qubits.iter().enumerate() {
            let half = 1usize << q;
            amps.resize(half << 1, Complex64::new(0.0, 0.0));
            for idx in 0..half {
                let a = amps[idx];
                amps[idx] = a * single[0];
                amps[idx | half] = a * single[1];
            }
        }
        Ok(Statevector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<usize, StateError> {
        if qubit >= self.n {
            Err(StateError::OutOfRange { qubit, n: self.n })
        } else {
            Ok(1 << qubit)
        }
    }

    /// Pairs of indices `(i0, i1)` differing only in the bit `mask`.
    fn pairs(&self, mask: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..self.amps.len()).filter(move |i| i & mask == 0).map(move |i| (i, i | mask))
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<(), StateError> {
        let (ma, mb) = (self.check_qubit(a)?, self.check_qubit(b)?);
        if a == b {
            return Err(StateError::SameQubit(a));
        }
        let both = ma | mb;
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & both == both {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<(), StateError> {
        let mask = self.check_qubit(qubit)?;
        let i = Complex64::new(0.0, 1.0);
        for (i0, i1) in self.pairs(mask).collect::<Vec<_>>() {
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            let (b0, b1) = match pauli {
                Pauli::I => (a0, a1),
                Pauli::X => (a1, a0),
                Pauli::Y => (-i * a1, i * a0),
                Pauli::Z => (a0, -a1),
            };
            self.amps[i0] = b0;
            self.amps[i1] = b1;
        }
        Ok(())
    }

    /// Applies every factor of `p` (global phase dropped).
    pub fn apply_pauli_string(&mut self, p: &PauliString) -> Result<(), StateError> {
        if p.num_qubits() != self.n {
            return Err(StateError::PauliSize { expected: self.n, got: p.num_qubits() });
        }
        for q in 0..self.n {
            match p.get(q) {
                Pauli::I => {}
                other => self.apply_pauli(q, other)?,
            }
        }
        Ok(())
    }

    /// Amplitude weights of the projections onto `|±_δ⟩`.
    fn xy_components(&self, mask: usize, delta: Angle) -> (f64, f64) {
        let back = delta.phase().conj();
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i0, i1) in self.pairs(mask) {
            let rotated = back * self.amps[i1];
            p0 += (self.amps[i0] + rotated).norm_sqr();
            p1 += (self.amps[i0] - rotated).norm_sqr();
        }
        (p0 / 2.0, p1 / 2.0)
    }

    /// Probability of outcome 0 (`|+_δ⟩`) when measuring `qubit`.
    pub fn prob_xy_zero(&self, qubit: usize, delta: Angle) -> Result<f64, StateError> {
        let mask = self.check_qubit(qubit)?;
        let (p0, p1) = self.xy_components(mask, delta);
        Ok(p0 / (p0 + p1))
    }

    /// Projects `qubit` onto `|+_δ⟩` (outcome false) or `|−_δ⟩` (outcome
    /// true), renormalizes, and returns the outcome's probability.
    pub fn project_xy(&mut self, qubit: usize, delta: Angle, outcome: bool) -> Result<f64, StateError> {
        let mask = self.check_qubit(qubit)?;
        let (p0, p1) = self.xy_components(mask, delta);
        let prob = if outcome { p1 } else { p0 } / (p0 + p1);
        if prob <= 0.0 {
            return Err(StateError::ZeroProbability);
        }
        let sign = if outcome { -1.0 } else { 1.0 };
        let fwd = delta.phase();
        let back = fwd.conj();
        let scale = 1.0 / (2.0 * prob.sqrt());
        for (i0, i1) in self.pairs(mask).collect::<Vec<_>>() {
            // ⟨±_δ| on the qubit, then re-attach |±_δ⟩.
            let reduced = (self.amps[i0] + sign * back * self.amps[i1]) * scale;
            self.amps[i0] = reduced;
            self.amps[i1] = sign * fwd * reduced;
        }
        Ok(prob)
    }

    /// Measures in the `|±_δ⟩` basis; `false` ↔ `|+_δ⟩`.
    pub fn measure_xy<R: Rng + ?Sized>(&mut self, qubit: usize, delta: Angle, rng: &mut R) -> Result<bool, StateError> {
        let p0 = self.prob_xy_zero(qubit, delta)?;
        let outcome = rng.random::<f64>() >= p0;
        self.project_xy(qubit, delta, outcome)?;
        Ok(outcome)
    }

    pub fn prob_z_one(&self, qubit: usize) -> Result<f64, StateError> {
        let mask = self.check_qubit(qubit)?;
        let p1: f64 = self.pairs(mask).map(|(_, i1)| self.amps[i1].norm_sqr()).sum();
        Ok(p1 / self.norm_sqr())
    }

    pub fn project_z(&mut self, qubit: usize, outcome: bool) -> Result<f64, StateError> {
        let mask = self.check_qubit(qubit)?;
        let p1 = self.prob_z_one(qubit)?;
        let prob = if outcome { p1 } else { 1.0 - p1 };
        if prob <= 0.0 {
            return Err(StateError::ZeroProbability);
        }
        let scale = 1.0 / prob.sqrt();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) == outcome {
                *amp *= scale;
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        Ok(prob)
    }

    /// Computational-basis measurement.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<bool, StateError> {
        let p1 = self.prob_z_one(qubit)?;
        let outcome = rng.random::<f64>() < p1;
        self.project_z(qubit, outcome)?;
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_amps(state: &Statevector, expected: &[Complex64]) {
        for (a, b) in state.amplitudes().iter().zip(expected) {
            assert!((a - b).norm() < EPS, "{a} vs {b}");
        }
    }

    #[test]
    fn plus_theta_examples() {
        let s = prepare_plus_theta(Angle::new(0));
        assert!((s[0] - c(H, 0.0)).norm() < EPS && (s[1] - c(H, 0.0)).norm() < EPS);
        let s = prepare_plus_theta(Angle::new(4));
        assert!((s[1] - c(-H, 0.0)).norm() < EPS);
        let s = prepare_plus_theta(Angle::new(2));
        assert!((s[1] - c(0.0, H)).norm() < EPS);
    }

    #[test]
    fn dummy_examples() {
        assert_eq!(prepare_dummy(false), [c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(prepare_dummy(true), [c(0.0, 0.0), c(1.0, 0.0)]);
        // CZ(|1⟩ ⊗ |+⟩) = |1⟩ ⊗ |−⟩ (qubit 0 is the dummy).
        let mut s = Statevector::product(&[prepare_dummy(true), prepare_plus_theta(Angle::ZERO)]).unwrap();
        s.apply_cz(0, 1).unwrap();
        let expected = Statevector::product(&[prepare_dummy(true), prepare_plus_theta(Angle::PI)]).unwrap();
        assert_amps(&s, expected.amplitudes());
    }

    #[test]
    fn cz_on_plus_plus() {
        let plus = prepare_plus_theta(Angle::ZERO);
        let mut s = Statevector::product(&[plus, plus]).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_amps(&s, &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)]);
        s.apply_cz(1, 0).unwrap();
        assert_amps(&s, &[c(0.5, 0.0); 4]);
        assert_eq!(s.apply_cz(0, 0), Err(StateError::SameQubit(0)));
        assert_eq!(s.apply_cz(0, 2), Err(StateError::OutOfRange { qubit: 2, n: 2 }));
    }

    #[test]
    fn cz_with_control_zero_is_identity() {
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        let mut s = Statevector::product(&[prepare_dummy(false), psi]).unwrap();
        let before = s.clone();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for theta in Angle::all() {
            let s = Statevector::product(&[prepare_plus_theta(theta)]).unwrap();
            assert_abs_diff_eq!(s.prob_xy_zero(0, theta).unwrap(), 1.0, epsilon = EPS);
            let mut t = s.clone();
            assert!(!t.measure_xy(0, theta, &mut rng).unwrap());
        }
    }

    #[test]
    fn xy_probabilities() {
        let plus = Statevector::product(&[prepare_plus_theta(Angle::ZERO)]).unwrap();
        // |⟨+_{π/2}|+⟩|² = |(1 − i)/2|² = 1/2
        assert_abs_diff_eq!(plus.prob_xy_zero(0, Angle::new(2)).unwrap(), 0.5, epsilon = EPS);
        let zero = Statevector::zero(1).unwrap();
        for d in Angle::all() {
            assert_abs_diff_eq!(zero.prob_xy_zero(0, d).unwrap(), 0.5, epsilon = EPS);
        }
        // Generic angle: |⟨+_δ|+_θ⟩|² = cos²((θ − δ)/2).
        for t in Angle::all() {
            let s = Statevector::product(&[prepare_plus_theta(t)]).unwrap();
            for d in Angle::all() {
                let expected = ((t.radians() - d.radians()) / 2.0).cos().powi(2);
                assert_abs_diff_eq!(s.prob_xy_zero(0, d).unwrap(), expected, epsilon = EPS);
            }
        }
    }

    #[test]
    fn z_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut zero = Statevector::zero(1).unwrap();
        assert!(!zero.measure_z(0, &mut rng).unwrap());
        let plus = Statevector::product(&[prepare_plus_theta(Angle::ZERO)]).unwrap();
        let ones = (0..4000).filter(|_| plus.clone().measure_z(0, &mut rng).unwrap()).count();
        assert!((ones as f64 / 4000.0 - 0.5).abs() < 4.0 * (0.25f64 / 4000.0).sqrt());
    }

    #[test]
    fn graph_pair_z_then_x_statistics() {
        // |G⟩ on two vertices; Z on qubit 0 with outcome z leaves qubit 1 in
        // Z^z|+⟩, so an X measurement on qubit 1 returns z deterministically.
        let plus = prepare_plus_theta(Angle::ZERO);
        for outcome in [false, true] {
            let mut s = Statevector::product(&[plus, plus]).unwrap();
            s.apply_cz(0, 1).unwrap();
            assert_abs_diff_eq!(s.project_z(0, outcome).unwrap(), 0.5, epsilon = EPS);
            let p0 = s.prob_xy_zero(1, Angle::ZERO).unwrap();
            assert_abs_diff_eq!(p0, if outcome { 0.0 } else { 1.0 }, epsilon = EPS);
        }
    }

    #[test]
    fn projection_collapses_into_basis_state() {
        let plus = prepare_plus_theta(Angle::ZERO);
        let mut s = Statevector::product(&[plus, plus, plus]).unwrap();
        s.apply_cz(0, 1).unwrap();
        s.apply_cz(1, 2).unwrap();
        s.project_xy(1, Angle::new(3), true).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.prob_xy_zero(1, Angle::new(3)).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn qubit_limit_enforced() {
        assert_eq!(Statevector::zero(MAX_QUBITS + 1), Err(StateError::QubitLimit(MAX_QUBITS + 1)));
        assert_eq!(Statevector::zero(0), Err(StateError::Empty));
    }

    #[test]
    fn paulis_match_definitions() {
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        let base = Statevector::product(&[psi]).unwrap();
        let mut y = base.clone();
        y.apply_pauli(0, Pauli::Y).unwrap();
        // Y (a, b) = (−i b, i a)
        assert_amps(&y, &[c(0.8, 0.0), c(0.0, 0.6)]);
        let mut x = base.clone();
        x.apply_pauli(0, Pauli::X).unwrap();
        assert_amps(&x, &[psi[1], psi[0]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        fn random_state(n: usize, seed: u64) -> Statevector {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let qubits: Vec<_> = (0..n).map(|_| prepare_plus_theta(Angle::new(rng.random_range(0..8)))).collect();
            let mut s = Statevector::product(&qubits).unwrap();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random_bool(0.5) {
                        s.apply_cz(a, b).unwrap();
                    }
                }
            }
            s
        }

        proptest! {
            #[test]
            fn norm_preserved(seed in any::<u64>(), ops in proptest::collection::vec((0usize..4, 0usize..4, 0u8..8, 0u8..4), 1..12)) {
                let mut s = random_state(4, seed);
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
                for (a, b, angle, kind) in ops {
                    match kind {
                        0 if a != b => s.apply_cz(a, b).unwrap(),
                        1 => { s.measure_xy(a, Angle::new(angle), &mut rng).unwrap(); }
                        2 => { s.measure_z(a, &mut rng).unwrap(); }
                        _ => s.apply_pauli(a, [Pauli::X, Pauli::Y, Pauli::Z, Pauli::I][b]).unwrap(),
                    }
                    prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
                }
            }
        }
    }
}
