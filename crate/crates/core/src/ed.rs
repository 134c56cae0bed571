//! Dense exact diagonalization of small spin chains.
//!
//! Basis state `i` has spin `j` down (`σ^z_j = -1`) when bit `j` of `i` is set.
//! `σ^x_j` flips bit `j`; global parity `Π = Π_j σ^x_j` flips all bits.

use faer::{Mat, Side};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::{TimeGrid, TimeSeries};

/// Largest chain handled densely (a 16384² matrix).
pub const MAX_SITES: usize = 14;
/// Eigenvalue spacing below which the ground state is flagged degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Overlaps below this are dropped from the spectral sum.
const OVERLAP_CUTOFF: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SpinModel {
    /// `-J Σ (g σ^x_j + σ^z_j σ^z_{j+1}) + J h Σ σ^z_j`, periodic.
    TfimLongitudinal { g: f64, h: f64, j: f64 },
    /// `Σ_{i<j} J |i-j|^{-r} σ^z_i σ^z_j + J g Σ σ^x_j`, open chain.
    LongRangeIsing { g: f64, r: f64, j: f64 },
}

pub struct SpinHamiltonian {
    pub n: usize,
    pub model: SpinModel,
    pub matrix: Mat<f64>,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SITES {
        return Err(Error::SizeLimit { n, max: MAX_SITES });
    }
    if n < 2 {
        return Err(invalid(format!("need at least 2 sites, got {n}")));
    }
    Ok(())
}

fn spin(i: usize, j: usize) -> f64 {
    1.0 - 2.0 * ((i >> j) & 1) as f64
}

fn with_transverse(n: usize, diagonal: impl Fn(usize) -> f64, flip: f64) -> Mat<f64> {
    let dim = 1usize << n;
    let mut m = Mat::<f64>::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = diagonal(i);
        for j in 0..n {
            m[(i ^ (1 << j), i)] += flip;
        }
    }
    m
}

pub fn build_longitudinal(n: usize, g: f64, h: f64, j: f64) -> Result<SpinHamiltonian> {
    check_size(n)?;
    if ![g, h, j].iter().all(|v| v.is_finite()) {
        return Err(invalid("couplings must be finite"));
    }
    let diagonal = |i: usize| {
        let bonds: f64 = (0..n).map(|s| spin(i, s) * spin(i, (s + 1) % n)).sum();
        let field: f64 = (0..n).map(|s| spin(i, s)).sum();
        -j * bonds + j * h * field
    };
    Ok(SpinHamiltonian {
        n,
        model: SpinModel::TfimLongitudinal { g, h, j },
        matrix: with_transverse(n, diagonal, -j * g),
    })
}

pub fn build_long_range(n: usize, g: f64, r: f64, j: f64) -> Result<SpinHamiltonian> {
    check_size(n)?;
    if ![g, r, j].iter().all(|v| v.is_finite()) {
        return Err(invalid("couplings must be finite"));
    }
    if !(r > 0.0) {
        return Err(invalid(format!("interaction exponent must be positive, got {r}")));
    }
    let couplings: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { j * (d as f64).powf(-r) }).collect();
    let diagonal = |i: usize| {
        let mut e = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                e += couplings[b - a] * spin(i, a) * spin(i, b);
            }
        }
        e
    };
    Ok(SpinHamiltonian {
        n,
        model: SpinModel::LongRangeIsing { g, r, j },
        matrix: with_transverse(n, diagonal, j * g),
    })
}

impl SpinModel {
    pub fn build(&self, n: usize) -> Result<SpinHamiltonian> {
        match *self {
            SpinModel::TfimLongitudinal { g, h, j } => build_longitudinal(n, g, h, j),
            SpinModel::LongRangeIsing { g, r, j } => build_long_range(n, g, r, j),
        }
    }
}

pub struct EigenSystem {
    pub n: usize,
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal columns matching `values`.
    pub vectors: Mat<f64>,
}

pub fn diagonalize(h: &SpinHamiltonian) -> Result<EigenSystem> {
    let eig = h
        .matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let dim = h.matrix.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values = order.iter().map(|&i| s[i]).collect();
    let vectors = Mat::from_fn(dim, dim, |r, c| u[(r, order[c])]);
    Ok(EigenSystem { n: h.n, values, vectors })
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// Set when the next level lies within [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

pub fn ground_state(eig: &EigenSystem) -> GroundState {
    let degenerate = eig.values.len() > 1
        && eig.values[1] - eig.values[0] < DEGENERACY_TOL * eig.values[0].abs().max(1.0);
    if degenerate {
        warn!("ground state of the {}-site chain is degenerate", eig.n);
    }
    GroundState {
        energy: eig.values[0],
        vector: eig.vectors.col_as_slice(0).to_vec(),
        degenerate,
    }
}

/// `M_x v` with `M_x = (1/N) Σ_j σ^x_j`.
pub fn apply_mx(n: usize, v: &[f64]) -> Vec<f64> {
    let inv = 1.0 / n as f64;
    (0..v.len())
        .map(|i| inv * (0..n).map(|j| v[i ^ (1 << j)]).sum::<f64>())
        .collect()
}

/// `Π v`.
pub fn parity(n: usize, v: &[f64]) -> Vec<f64> {
    let mask = (1usize << n) - 1;
    (0..v.len()).map(|i| v[i ^ mask]).collect()
}

/// Eigenvalues of `H` restricted to the parity sector `Π = ±1`.
///
/// Fails when `H` does not commute with parity.
pub fn sector_eigenvalues(h: &SpinHamiltonian, even: bool) -> Result<Vec<f64>> {
    let n = h.n;
    let dim = 1usize << n;
    let mask = dim - 1;
    let m = &h.matrix;
    let mut asym = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            asym = asym.max((m[(a, b)] - m[(a ^ mask, b ^ mask)]).abs());
        }
    }
    if asym > 1e-12 {
        return Err(invalid(format!("Hamiltonian breaks parity (deviation {asym:e})")));
    }
    // Representatives have the top bit clear; |s_a⟩ = (|a⟩ ± |ā⟩)/√2.
    let half = dim / 2;
    let sign = if even { 1.0 } else { -1.0 };
    let block = Mat::from_fn(half, half, |a, b| m[(a, b)] + sign * m[(a, b ^ mask)]);
    let mut values: Vec<f64> = block
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Precomputed spectral data for repeated measurements of `M_x`.
pub struct SpectralEvolution {
    energies: Vec<f64>,
    amplitudes: Vec<f64>,
    /// `⟨v_a|M_x|v_b⟩` on the populated eigenstates.
    mx: Mat<f64>,
}

impl SpectralEvolution {
    pub fn new(eig: &EigenSystem, psi0: &[f64]) -> Result<Self> {
        let dim = eig.vectors.nrows();
        if psi0.len() != dim {
            return Err(invalid(format!("state has length {}, expected {dim}", psi0.len())));
        }
        let norm = psi0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Normalization(norm));
        }
        let v = &eig.vectors;
        let mut kept = Vec::new();
        let mut amplitudes = Vec::new();
        for c in 0..dim {
            let col = v.col_as_slice(c);
            let overlap: f64 = col.iter().zip(psi0).map(|(a, b)| a * b).sum();
            if overlap.abs() > OVERLAP_CUTOFF {
                kept.push(c);
                amplitudes.push(overlap);
            }
        }
        let s = kept.len();
        let vs = Mat::from_fn(dim, s, |r, c| v[(r, kept[c])]);
        let mut mvs = Mat::<f64>::zeros(dim, s);
        for c in 0..s {
            let applied = apply_mx(eig.n, vs.col_as_slice(c));
            mvs.col_as_slice_mut(c).copy_from_slice(&applied);
        }
        let mx = vs.transpose() * &mvs;
        let energies = kept.iter().map(|&c| eig.values[c]).collect();
        Ok(Self { energies, amplitudes, mx })
    }

    /// Number of eigenstates with non-negligible weight.
    pub fn populated(&self) -> usize {
        self.energies.len()
    }

    /// `Σ |c_n|²` over the populated states.
    pub fn weight(&self) -> f64 {
        self.amplitudes.iter().map(|c| c * c).sum()
    }

    /// `⟨ψ(t)|M_x|ψ(t)⟩` at each time.
    pub fn measure(&self, times: &[f64]) -> Vec<f64> {
        let s = self.populated();
        let nt = times.len();
        let re = Mat::from_fn(s, nt, |a, t| self.amplitudes[a] * (self.energies[a] * times[t]).cos());
        let im = Mat::from_fn(s, nt, |a, t| -self.amplitudes[a] * (self.energies[a] * times[t]).sin());
        let are = &self.mx * &re;
        let aim = &self.mx * &im;
        (0..nt)
            .map(|t| {
                let mut acc = 0.0;
                for a in 0..s {
                    acc += re[(a, t)] * are[(a, t)] + im[(a, t)] * aim[(a, t)];
                }
                acc
            })
            .collect()
    }
}

/// `⟨ψ(t)|M_x|ψ(t)⟩` for `ψ(t) = e^{-iHt} ψ0`, from the eigensystem of `H`.
pub fn evolve_and_measure(eig: &EigenSystem, psi0: &[f64], grid: &TimeGrid) -> Result<TimeSeries> {
    let evo = SpectralEvolution::new(eig, psi0)?;
    let times = grid.times();
    let values = evo.measure(&times);
    Ok(TimeSeries::new(times, values)?.with_meta("observable", "mx").with_meta("n", eig.n))
}

/// Complex state `e^{-iHt} ψ0` as (real, imaginary) parts.
pub fn state_at(eig: &EigenSystem, psi0: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let dim = psi0.len();
    let (mut re, mut im) = (vec![0.0; dim], vec![0.0; dim]);
    for c in 0..dim {
        let col = eig.vectors.col_as_slice(c);
        let overlap: f64 = col.iter().zip(psi0).map(|(a, b)| a * b).sum();
        let (s, co) = (eig.values[c] * t).sin_cos();
        for r in 0..dim {
            re[r] += overlap * co * col[r];
            im[r] -= overlap * s * col[r];
        }
    }
    (re, im)
}

/// Ground state of `before`, evolved with `after`, measuring `M_x`.
pub fn quench_response(before: &SpinModel, after: &SpinModel, n: usize, grid: &TimeGrid) -> Result<TimeSeries> {
    let h0 = before.build(n)?;
    let gs = ground_state(&diagonalize(&h0)?);
    drop(h0);
    let eig = diagonalize(&after.build(n)?)?;
    Ok(evolve_and_measure(&eig, &gs.vector, grid)?.with_meta("ground_degenerate", gs.degenerate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tfim::{ground_energy, tfim_gap, tfim_sector_gap, TfimParams};

    fn residual(h: &SpinHamiltonian, eig: &EigenSystem) -> f64 {
        let hv = &h.matrix * &eig.vectors;
        let mut worst = 0.0f64;
        for c in 0..eig.values.len() {
            let mut r = 0.0;
            for i in 0..eig.values.len() {
                r += (hv[(i, c)] - eig.values[c] * eig.vectors[(i, c)]).powi(2);
            }
            worst = worst.max(r.sqrt());
        }
        worst
    }

    #[test]
    fn two_site_ferromagnet() {
        let h = build_longitudinal(2, 0.0, 0.0, 1.0).unwrap();
        let eig = diagonalize(&h).unwrap();
        let expect = [-2.0, -2.0, 2.0, 2.0];
        for (a, b) in eig.values.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(ground_state(&eig).degenerate);
    }

    #[test]
    fn two_site_long_range() {
        // |01⟩ - |10⟩ and |00⟩ - |11⟩ are annihilated by σx1 + σx2 and sit at -J
        // and J; |00⟩ + |11⟩ and |01⟩ + |10⟩ form the block [[J, 2Jg], [2Jg, -J]].
        let (g, j) = (0.7, -1.0);
        let eig = diagonalize(&build_long_range(2, g, 2.0, j).unwrap()).unwrap();
        let r = (j * j + 4.0 * j * j * g * g).sqrt();
        let mut expect = vec![-j, j, r, -r];
        expect.sort_by(f64::total_cmp);
        for (a, b) in eig.values.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{:?}", eig.values);
        }
    }

    #[test]
    fn eigensystem_is_accurate() {
        let h = build_long_range(6, 2.52, 2.0, -1.0).unwrap();
        let eig = diagonalize(&h).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let norm = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(residual(&h, &eig) < 1e-9 * norm);
        let gram = eig.vectors.transpose() * &eig.vectors;
        for i in 0..64 {
            for k in 0..64 {
                let target = if i == k { 1.0 } else { 0.0 };
                assert!((gram[(i, k)] - target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hermitian_and_parity_symmetric() {
        let h = build_longitudinal(6, 0.8, 0.0, 1.0).unwrap();
        let dim = 64;
        for a in 0..dim {
            for b in 0..dim {
                assert_eq!(h.matrix[(a, b)], h.matrix[(b, a)]);
                assert_eq!(h.matrix[(a, b)], h.matrix[(a ^ 63, b ^ 63)]);
            }
        }
        let broken = build_longitudinal(6, 0.8, 0.1, 1.0).unwrap();
        assert!(sector_eigenvalues(&broken, true).is_err());
    }

    #[test]
    fn size_limit() {
        assert!(matches!(build_longitudinal(15, 1.0, 0.0, 1.0), Err(Error::SizeLimit { .. })));
        assert!(build_long_range(1, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn free_fermion_energies() {
        for n in [4usize, 6, 8] {
            for g in [0.5, 1.0, 1.5] {
                let h = build_longitudinal(n, g, 0.0, 1.0).unwrap();
                let p = TfimParams::new(1.0, g, n).unwrap();
                let even = sector_eigenvalues(&h, true).unwrap();
                let odd = sector_eigenvalues(&h, false).unwrap();
                assert!((even[0] - ground_energy(&p).unwrap()).abs() < 1e-9);
                assert!((even[1] - even[0] - tfim_gap(&p).unwrap()).abs() < 1e-9);
                assert!((odd[0] - even[0] - tfim_sector_gap(&p).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn critical_first_gap_is_sector_gap() {
        let h = build_longitudinal(8, 1.0, 0.0, 1.0).unwrap();
        let eig = diagonalize(&h).unwrap();
        let p = TfimParams::new(1.0, 1.0, 8).unwrap();
        assert!((eig.values[1] - eig.values[0] - tfim_sector_gap(&p).unwrap()).abs() < 1e-9);
        assert!((eig.values[0] - ground_energy(&p).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn paramagnet_ground_state_is_x_polarized() {
        let n = 6;
        let g = 50.0;
        let gs = ground_state(&diagonalize(&build_longitudinal(n, g, 0.0, 1.0).unwrap()).unwrap());
        let amp = 1.0 / ((1usize << n) as f64).sqrt();
        let overlap: f64 = gs.vector.iter().map(|x| x * amp).sum::<f64>().abs();
        assert!(overlap > 1.0 - 1.0 / g, "{overlap}");
        assert!(!gs.degenerate);
    }

    #[test]
    fn eigenstate_gives_constant_trace_and_unitary_evolution() {
        let h = build_long_range(6, 1.3, 2.0, -1.0).unwrap();
        let eig = diagonalize(&h).unwrap();
        let psi = eig.vectors.col_as_slice(3).to_vec();
        let grid = TimeGrid::new(40.0, 200).unwrap();
        let s = evolve_and_measure(&eig, &psi, &grid).unwrap();
        assert!(s.values.iter().all(|v| (v - s.values[0]).abs() < 1e-12));

        let gs = ground_state(&diagonalize(&build_long_range(6, 1.0, 2.0, -1.0).unwrap()).unwrap());
        for t in [0.3, 7.0, 31.0] {
            let (re, im) = state_at(&eig, &gs.vector, t);
            let norm: f64 = re.iter().chain(&im).map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_trace_matches_direct_state() {
        let eig = diagonalize(&build_longitudinal(6, 1.0, 0.05, 1.0).unwrap()).unwrap();
        let gs = ground_state(&diagonalize(&build_longitudinal(6, 1.0, 0.0, 1.0).unwrap()).unwrap());
        let grid = TimeGrid::new(10.0, 7).unwrap();
        let s = evolve_and_measure(&eig, &gs.vector, &grid).unwrap();
        for (i, &t) in s.times.iter().enumerate() {
            let (re, im) = state_at(&eig, &gs.vector, t);
            let (mre, mim) = (apply_mx(6, &re), apply_mx(6, &im));
            let direct: f64 = re.iter().zip(&mre).map(|(a, b)| a * b).sum::<f64>()
                + im.iter().zip(&mim).map(|(a, b)| a * b).sum::<f64>();
            assert!((s.values[i] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unnormalized_state() {
        let eig = diagonalize(&build_longitudinal(4, 1.0, 0.0, 1.0).unwrap()).unwrap();
        let psi = vec![0.25; 16];
        let grid = TimeGrid::new(1.0, 4).unwrap();
        assert!(evolve_and_measure(&eig, &psi, &grid).is_ok());
        let bad = vec![0.3; 16];
        assert!(matches!(evolve_and_measure(&eig, &bad, &grid), Err(Error::Normalization(_))));
    }

    #[test]
    fn longitudinal_response_is_even_in_field() {
        // h → -h is a parity conjugation, so ⟨M_x⟩ is even in δh and the
        // antisymmetrized linear part vanishes.
        let n = 6;
        let grid = TimeGrid::new(30.0, 60).unwrap();
        let before = SpinModel::TfimLongitudinal { g: 1.0, h: 0.0, j: 1.0 };
        let plus = quench_response(&before, &SpinModel::TfimLongitudinal { g: 1.0, h: 1e-3, j: 1.0 }, n, &grid).unwrap();
        let minus = quench_response(&before, &SpinModel::TfimLongitudinal { g: 1.0, h: -1e-3, j: 1.0 }, n, &grid).unwrap();
        for (a, b) in plus.values.iter().zip(&minus.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
