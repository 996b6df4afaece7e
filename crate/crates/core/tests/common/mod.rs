//! Reference models used to check the library. Nothing here calls the
//! library's Pauli algebra, simulator or correction logic; each model is
//! built from closed forms or plain matrix arithmetic.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use std::f64::consts::FRAC_PI_4;

pub fn grid_edges(width: usize, depth: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for r in 0..width {
        for c in 0..depth {
            let v = r * depth + c;
            if c + 1 < depth {
                edges.push((v, v + 1));
            }
            if r + 1 < width {
                edges.push((v, v + depth));
            }
        }
    }
    edges
}

pub fn neighbors(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// `2^{-n/2} Σ_x (−1)^{Σ_{ab∈E} x_a x_b} |x⟩`, qubit `v` on bit `v`.
pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Vec<C> {
    let norm = (0.5f64).powf(n as f64 / 2.0);
    (0..1usize << n)
        .map(|x| {
            let odd = edges.iter().filter(|&&(a, b)| x >> a & 1 == 1 && x >> b & 1 == 1).count() % 2 == 1;
            C::new(if odd { -norm } else { norm }, 0.0)
        })
        .collect()
}

fn phase(k: u8) -> C {
    C::from_polar(1.0, f64::from(k) * FRAC_PI_4)
}

/// Contracts qubit `v` of `psi` with `⟨±_φ|` (sign by `outcome`), leaving
/// the bit-`v`-clear slots holding the result and zeros elsewhere.
fn contract(psi: &mut [C], v: usize, phi: u8, outcome: bool) {
    let bra1 = phase((8 - phi % 8) % 8) * if outcome { -1.0 } else { 1.0 };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for x in 0..psi.len() {
        if x >> v & 1 == 0 {
            let y = x | 1 << v;
            psi[x] = (psi[x] + bra1 * psi[y]) * s;
            psi[y] = C::new(0.0, 0.0);
        }
    }
}

fn norm_sqr(psi: &[C]) -> f64 {
    psi.iter().map(|a| a.norm_sqr()).sum()
}

/// Output distribution of a grid pattern with flow-determinism: every
/// non-output qubit is projected onto `|+_φ⟩`, then the outputs are
/// measured at their own angles. Index bit `i` is `outputs[i]`.
pub fn output_distribution(width: usize, depth: usize, angles: &[u8]) -> Vec<f64> {
    let n = width * depth;
    let mut psi = graph_state(n, &grid_edges(width, depth));
    let outputs: Vec<usize> = (0..width).map(|r| r * depth + depth - 1).collect();
    for (v, &phi) in angles.iter().enumerate().take(n) {
        if !outputs.contains(&v) {
            contract(&mut psi, v, phi, false);
        }
    }
    let total = norm_sqr(&psi);
    (0..1usize << outputs.len())
        .map(|s| {
            let mut branch = psi.clone();
            for (i, &o) in outputs.iter().enumerate() {
                contract(&mut branch, o, angles[o], s >> i & 1 == 1);
            }
            norm_sqr(&branch) / total
        })
        .collect()
}

/// `S_X(i)` and `S_Z(i)` for the row-wise flow `f(r, c) = (r, c + 1)`.
pub fn grid_corrections(width: usize, depth: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = width * depth;
    let adj = neighbors(n, &grid_edges(width, depth));
    let succ = |j: usize| if j % depth + 1 < depth { Some(j + 1) } else { None };
    let mut sx = vec![Vec::new(); n];
    let mut sz = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if let Some(fj) = succ(j) {
                if fj == i {
                    sx[i].push(j);
                }
                if j != i && adj[fj].contains(&i) {
                    sz[i].push(j);
                }
            }
        }
    }
    (sx, sz)
}

/// Column-major measurement order of a grid.
pub fn grid_order(width: usize, depth: usize) -> Vec<usize> {
    (0..depth).flat_map(|c| (0..width).map(move |r| r * depth + c)).collect()
}

/// Exact distribution of the reported output bits of a grid pattern when
/// every reported outcome is independently flipped with probability `q`
/// and later angles are corrected from the reported bits.
pub fn noisy_mbqc_distribution(width: usize, depth: usize, angles: &[u8], q: f64) -> Vec<f64> {
    let n = width * depth;
    let order = grid_order(width, depth);
    let (sx, sz) = grid_corrections(width, depth);
    let outputs: Vec<usize> = (0..width).map(|r| r * depth + depth - 1).collect();
    let mut dist = vec![0.0; 1 << outputs.len()];
    let psi = graph_state(n, &grid_edges(width, depth));

    struct Ctx<'a> {
        order: Vec<usize>,
        sx: Vec<Vec<usize>>,
        sz: Vec<Vec<usize>>,
        outputs: Vec<usize>,
        angles: &'a [u8],
        q: f64,
    }

    fn walk(step: usize, psi: Vec<C>, weight: f64, reported: &mut Vec<bool>, ctx: &Ctx, dist: &mut [f64]) {
        let Ctx { order, sx, sz, outputs, angles, q } = ctx;
        if weight == 0.0 {
            return;
        }
        if step == order.len() {
            let s = outputs.iter().enumerate().fold(0, |acc, (i, &o)| acc | (reported[o] as usize) << i);
            dist[s] += weight;
            return;
        }
        let v = order[step];
        let parity = |set: &[usize]| set.iter().fold(false, |a, &j| a ^ reported[j]);
        let mut phi = angles[v] % 8;
        if parity(&sx[v]) {
            phi = (8 - phi) % 8;
        }
        if parity(&sz[v]) {
            phi = (phi + 4) % 8;
        }
        let total = norm_sqr(&psi);
        for outcome in [false, true] {
            let mut branch = psi.clone();
            contract(&mut branch, v, phi, outcome);
            let p = norm_sqr(&branch) / total;
            for (flip, pf) in [(false, 1.0 - q), (true, *q)] {
                reported[v] = outcome ^ flip;
                walk(step + 1, branch.clone(), weight * p * pf, reported, ctx, dist);
            }
        }
    }

    let ctx = Ctx { order, sx, sz, outputs, angles, q };
    walk(0, psi, 1.0, &mut vec![false; n], &ctx, &mut dist);
    dist
}

/// Single-qubit Pauli as a character and a product table.
fn mul1(a: char, b: char) -> (C, char) {
    let i = C::new(0.0, 1.0);
    match (a, b) {
        ('I', p) | (p, 'I') => (C::new(1.0, 0.0), p),
        (p, q) if p == q => (C::new(1.0, 0.0), 'I'),
        ('X', 'Y') => (i, 'Z'),
        ('Y', 'Z') => (i, 'X'),
        ('Z', 'X') => (i, 'Y'),
        ('Y', 'X') => (-i, 'Z'),
        ('Z', 'Y') => (-i, 'X'),
        ('X', 'Z') => (-i, 'Y'),
        _ => unreachable!(),
    }
}

/// A Pauli operator as a phase times a tensor of single-qubit letters.
#[derive(Clone, Debug, PartialEq)]
pub struct RefPauli {
    pub phase: C,
    pub ops: Vec<char>,
}

impl RefPauli {
    pub fn identity(n: usize) -> Self {
        RefPauli { phase: C::new(1.0, 0.0), ops: vec!['I'; n] }
    }

    pub fn mul(&self, other: &RefPauli) -> RefPauli {
        let mut phase = self.phase * other.phase;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (p, c) = mul1(a, b);
                phase *= p;
                c
            })
            .collect();
        RefPauli { phase, ops }
    }

    pub fn anticommutes(&self, other: &RefPauli) -> bool {
        self.ops.iter().zip(&other.ops).filter(|&(&a, &b)| a != 'I' && b != 'I' && a != b).count() % 2 == 1
    }

    /// `+1`/`−1` as a bool: true when the phase is −1.
    pub fn is_negative(&self) -> bool {
        assert!(self.phase.im.abs() < 1e-9, "non-Hermitian phase {}", self.phase);
        self.phase.re < 0.0
    }

    pub fn signed_string(&self) -> String {
        let p = self.phase;
        let prefix = if (p - C::new(1.0, 0.0)).norm() < 1e-9 {
            "+"
        } else if (p + C::new(1.0, 0.0)).norm() < 1e-9 {
            "-"
        } else if (p - C::new(0.0, 1.0)).norm() < 1e-9 {
            "+i"
        } else {
            "-i"
        };
        format!("{prefix}{}", self.ops.iter().collect::<String>())
    }
}

/// `K_a = X_a ∏_{b∈N(a)} Z_b`.
pub fn generator(n: usize, adj: &[Vec<usize>], a: usize) -> RefPauli {
    let mut p = RefPauli::identity(n);
    p.ops[a] = 'X';
    for &b in &adj[a] {
        p.ops[b] = 'Z';
    }
    p
}

/// `∏_{a∈A} K_a` multiplied in increasing vertex order.
pub fn stabilizer(n: usize, adj: &[Vec<usize>], subset: &[usize]) -> RefPauli {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.iter().fold(RefPauli::identity(n), |acc, &a| acc.mul(&generator(n, adj, a)))
}

pub fn subset_of(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|v| mask >> v & 1 == 1).collect()
}

/// Fraction of all `2^n` stabilizer group elements anticommuting with `e`,
/// as (numerator, denominator).
pub fn detection_count(n: usize, adj: &[Vec<usize>], e: &RefPauli) -> (u64, u64) {
    let hits = (0..1usize << n).filter(|&m| stabilizer(n, adj, &subset_of(m, n)).anticommutes(e)).count();
    (hits as u64, 1 << n)
}

/// Exact failed-trap rate of uniform nonempty-subset traps when every
/// prepared qubit is depolarized with probability `p` (Pauli-frame model:
/// pre-entangling errors are pushed through the CZs, X parts on dummy
/// vertices are dropped, and a vertex contributes iff its error can
/// anticommute with the checked part of the observable).
pub fn prep_noise_fail_rate(width: usize, depth: usize, p: f64) -> f64 {
    let n = width * depth;
    let adj = neighbors(n, &grid_edges(width, depth));
    let mut total = 0.0;
    for mask in 1..1usize << n {
        let obs = stabilizer(n, &adj, &subset_of(mask, n));
        let checked = |v: usize| matches!(obs.ops[v], 'X' | 'Y');
        let sensitive = (0..n)
            .filter(|&v| {
                let x_flip =
                    (checked(v) && obs.ops[v] == 'Y') ^ (adj[v].iter().filter(|&&u| checked(u)).count() % 2 == 1);
                let z_flip = checked(v);
                x_flip || z_flip
            })
            .count();
        total += (1.0 - (1.0 - p).powi(sensitive as i32)) / 2.0;
    }
    total / ((1usize << n) - 1) as f64
}

/// Dense `d×d` complex matrix.
#[derive(Clone, Debug)]
pub struct Mat {
    pub d: usize,
    pub a: Vec<C>,
}

impl Mat {
    pub fn zeros(d: usize) -> Self {
        Mat { d, a: vec![C::new(0.0, 0.0); d * d] }
    }

    pub fn at(&self, i: usize, j: usize) -> C {
        self.a[i * self.d + j]
    }

    pub fn kron(&self, other: &Mat) -> Mat {
        let d = self.d * other.d;
        let mut m = Mat::zeros(d);
        for i in 0..self.d {
            for j in 0..self.d {
                for k in 0..other.d {
                    for l in 0..other.d {
                        m.a[(i * other.d + k) * d + j * other.d + l] = self.at(i, j) * other.at(k, l);
                    }
                }
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let d = self.d;
        let mut m = Mat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let x = self.at(i, k);
                for j in 0..d {
                    m.a[i * d + j] += x * other.at(k, j);
                }
            }
        }
        m
    }

    pub fn trace(&self) -> C {
        (0..self.d).map(|i| self.at(i, i)).sum()
    }

    pub fn from_ket(ket: &[C]) -> Mat {
        let d = ket.len();
        let mut m = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.a[i * d + j] = ket[i] * ket[j].conj();
            }
        }
        m
    }
}

/// `(1−p)|ψ⟩⟨ψ| + p·I/2` for a single qubit.
pub fn depolarized(ket: [C; 2], p: f64) -> Mat {
    let mut m = Mat::from_ket(&ket);
    for v in m.a.iter_mut() {
        *v *= 1.0 - p;
    }
    m.a[0] += p / 2.0;
    m.a[3] += p / 2.0;
    m
}

pub fn plus_ket(phi: u8) -> [C; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C::new(s, 0.0), phase(phi) * s]
}

pub fn minus_ket(phi: u8) -> [C; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C::new(s, 0.0), -phase(phi) * s]
}

/// Exact failed-trap rate on the two-vertex path with every prepared qubit
/// depolarized at rate `p`, by density-matrix evaluation over the three
/// traps and both dummy bits.
pub fn path2_prep_noise_fail_rate(p: f64) -> f64 {
    let zero = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let one = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
    let mut cz = Mat::zeros(4);
    for (i, s) in [1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
        cz.a[i * 4 + i] = C::new(s, 0.0);
    }
    // Qubit 0 is the left tensor factor here.
    // (role of vertex 0, role of vertex 1, sign of the observable)
    // 'x': measured at 0, 'y': measured at π/2, 'd': dummy.
    let traps = [('x', 'd', false), ('d', 'x', false), ('y', 'y', false)];
    let mut total = 0.0;
    for &(r0, r1, negative) in &traps {
        let mut fail = 0.0;
        for bits in 0..4 {
            let dummy = [bits & 1 == 1, bits & 2 == 2];
            let prep = |role: char, r: bool| match role {
                // Blind preparation and measurement rotations cancel, so
                // checked qubits start in |+⟩ and are measured at their
                // target angle.
                'x' | 'y' => plus_ket(0),
                _ => {
                    if r {
                        one
                    } else {
                        zero
                    }
                }
            };
            let rho = depolarized(prep(r0, dummy[0]), p).kron(&depolarized(prep(r1, dummy[1]), p));
            let rho = cz.mul(&rho).mul(&cz);
            let mut dummy_parity = negative;
            if r0 == 'd' {
                dummy_parity ^= dummy[0];
            }
            if r1 == 'd' {
                dummy_parity ^= dummy[1];
            }
            // Probability that the XOR of checked outcomes differs from the
            // expectation; unchecked qubits are traced out via the identity.
            let basis = |role: char, b: bool| -> Option<Mat> {
                let phi = if role == 'y' { 2 } else { 0 };
                match role {
                    'd' => None,
                    _ => Some(Mat::from_ket(&if b { minus_ket(phi) } else { plus_ket(phi) })),
                }
            };
            let mut identity = Mat::zeros(2);
            identity.a[0] = C::new(1.0, 0.0);
            identity.a[3] = C::new(1.0, 0.0);
            for b0 in [false, true] {
                for b1 in [false, true] {
                    let (m0, m1) = (basis(r0, b0), basis(r1, b1));
                    if (m0.is_none() && b0) || (m1.is_none() && b1) {
                        continue;
                    }
                    let observed = (m0.is_some() && b0) ^ (m1.is_some() && b1);
                    if observed != dummy_parity {
                        let proj = m0.unwrap_or(identity.clone()).kron(&m1.unwrap_or(identity.clone()));
                        fail += proj.mul(&rho).trace().re;
                    }
                }
            }
        }
        total += fail / 4.0;
    }
    total / traps.len() as f64
}

/// Total-variation distance between two distributions on the same support.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

pub fn empirical(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// `P[X ≤ k]` for `X ~ Binomial(n, p)`, summed exactly.
pub fn binomial_cdf(k: i64, n: u64, p: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let mut term = (1.0 - p).powi(n as i32);
    let mut sum = 0.0;
    for i in 0..=n {
        if i as i64 > k {
            break;
        }
        sum += term;
        term *= (n - i) as f64 / (i + 1) as f64 * p / (1.0 - p);
    }
    sum.min(1.0)
}
