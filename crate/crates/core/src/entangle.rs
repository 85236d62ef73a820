//! Concurrences, the concurrence-triangle measure ℱ₃ and the entanglement classes
//! of stabiliser and maximal-magic qubit states.
//!
//! Reduced density matrices keep Gaussian-integer numerators over the state's
//! squared norm, so purities and squared one-to-other concurrences are exact.  The
//! Wootters concurrence of a two-qubit reduction needs the square roots of the
//! eigenvalues of `ρ·ρ̃`; those come from the exact characteristic polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{big_ratio, rational_to_f64, BigRational, GaussianInt, Ring};
use crate::error::{Error, Result};
use crate::magic::MagicClass;
use crate::poly::{real_roots, Poly};
use crate::state::PureStateExact;
use crate::tolerances::{CLASSIFY_TOL, HERON_CLAMP};

type G = GaussianInt;

/// Density matrix `num/den` with Gaussian-integer numerators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityMatrixExact {
    pub dim: usize,
    pub num: Vec<Vec<G>>,
    pub den: i64,
}

impl DensityMatrixExact {
    /// `|c⟩⟨c|/‖c‖²`.
    pub fn pure(psi: &PureStateExact<G>) -> Self {
        let c = &psi.components;
        let num = c
            .iter()
            .map(|&ci| c.iter().map(|&cj| ci * cj.conj()).collect())
            .collect();
        Self {
            dim: c.len(),
            num,
            den: psi.norm_sq,
        }
    }

    pub fn trace(&self) -> BigRational {
        let t: i64 = (0..self.dim).map(|i| self.num[i][i].re).sum();
        big_ratio(t, self.den)
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.num[i][j] == self.num[j][i].conj()))
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> BigRational {
        let s: i64 = self.num.iter().flatten().map(|z| z.norm()).sum();
        big_ratio(s, self.den * self.den)
    }

    /// Every principal minor is nonnegative (exact).
    pub fn is_psd(&self) -> bool {
        (1u32..(1 << self.dim)).all(|mask| {
            let idx: Vec<usize> = (0..self.dim).filter(|i| mask & (1 << i) != 0).collect();
            let m: Vec<Vec<G>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.num[i][j]).collect())
                .collect();
            let d = det(&m);
            d.im == 0 && d.re >= 0
        })
    }
}

/// Laplace expansion; only used on matrices of size at most 8.
fn det(m: &[Vec<G>]) -> G {
    match m.len() {
        0 => G::one(),
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n).fold(G::zero(), |acc, j| {
            if m[0][j].is_zero() {
                return acc;
            }
            let minor: Vec<Vec<G>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let t = m[0][j] * det(&minor);
            if j % 2 == 0 {
                acc + t
            } else {
                acc - t
            }
        }),
    }
}

fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Unsupported(format!(
            "dimension {dim} is not a qubit register"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Partial trace onto the qubits in `keep` (0 = first qubit), in ascending order.
pub fn reduced_density(psi: &PureStateExact<G>, keep: &[usize]) -> Result<DensityMatrixExact> {
    let n = qubit_count(psi.dim())?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.len() >= n || keep.iter().any(|&q| q >= n) {
        return Err(Error::Density(format!(
            "invalid subsystem {keep:?} of {n} qubits"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |bits: usize, qs: &[usize]| {
        qs.iter()
            .enumerate()
            .filter(|&(k, _)| bits & (1 << (qs.len() - 1 - k)) != 0)
            .fold(0usize, |acc, (_, &q)| acc | bit(q))
    };
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    let c = &psi.components;
    let mut num = vec![vec![G::zero(); dk]; dk];
    for (i, row) in num.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let (bi, bj) = (spread(i, &keep), spread(j, &keep));
            for t in 0..dt {
                let bt = spread(t, &traced);
                *x += c[bi | bt] * c[bj | bt].conj();
            }
        }
    }
    Ok(DensityMatrixExact {
        dim: dk,
        num,
        den: psi.norm_sq,
    })
}

/// `C_{i(rest)}² = 2(1 − Tr ρ_i²)` and its square root.
pub fn one_to_other_concurrence(psi: &PureStateExact<G>, i: usize) -> Result<(f64, BigRational)> {
    let rho = reduced_density(psi, &[i])?;
    let sq = (BigRational::one() - rho.purity()) * big_ratio(2, 1);
    Ok((rational_to_f64(&sq).max(0.0).sqrt(), sq))
}

/// Pure two-qubit concurrence `√(2(1 − Tr ρ_A²))` and its square.
pub fn pairwise_concurrence_2qubit(psi: &PureStateExact<G>) -> Result<(f64, BigRational)> {
    if psi.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: psi.dim(),
        });
    }
    one_to_other_concurrence(psi, 0)
}

fn mat_mul(a: &[Vec<G>], b: &[Vec<G>]) -> Vec<Vec<G>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(G::zero(), |acc, k| acc + a[i][k] * b[k][j]))
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(x − A)` by Faddeev–LeVerrier, exactly.
pub fn char_poly(a: &[Vec<G>]) -> Result<Poly> {
    let n = a.len();
    let mut coeffs = vec![G::zero(); n + 1];
    coeffs[n] = G::one();
    let mut m = vec![vec![G::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·1
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr = (0..n).fold(G::zero(), |acc, i| acc + am[i][i]);
        let kk = k as i64;
        if tr.re % kk != 0 || tr.im % kk != 0 {
            return Err(Error::Invariant(
                "Faddeev–LeVerrier trace not divisible".into(),
            ));
        }
        coeffs[n - k] = G::new(-tr.re / kk, -tr.im / kk);
    }
    if coeffs.iter().any(|c| c.im != 0) {
        return Err(Error::Invariant(
            "characteristic polynomial is not real".into(),
        ));
    }
    Ok(Poly::from_ints(
        &coeffs.iter().map(|c| c.re).collect::<Vec<_>>(),
    ))
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn wootters_concurrence(rho: &DensityMatrixExact) -> Result<f64> {
    if rho.dim != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho.dim,
        });
    }
    // σy⊗σy is real: −1 on the anti-diagonal corners, +1 on the inner anti-diagonal.
    let yy = |i: usize, j: usize| -> i64 {
        match (i, j) {
            (0, 3) | (3, 0) => -1,
            (1, 2) | (2, 1) => 1,
            _ => 0,
        }
    };
    let mut tilde = vec![vec![G::zero(); 4]; 4];
    for (i, row) in tilde.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            // (YY ρ* YY)_{ij} = yy(i, 3−i)·ρ*_{3−i,3−j}·yy(3−j, j)
            let s = yy(i, 3 - i) * yy(3 - j, j);
            *x = rho.num[3 - i][3 - j].conj().scale(s);
        }
    }
    let r = mat_mul(&rho.num, &tilde);
    let p = char_poly(&r)?;
    let roots = real_roots(&p)?;
    let n = rho.den as f64;
    let eta: Vec<f64> = roots.iter().map(|&l| l.max(0.0).sqrt() / n).collect();
    Ok((eta[0] - eta[1] - eta[2] - eta[3]).max(0.0))
}

/// Wootters concurrence between qubits `i` and `j` of a three-qubit state.
pub fn pairwise_concurrence(psi: &PureStateExact<G>, i: usize, j: usize) -> Result<f64> {
    if psi.dim() != 8 {
        return Err(Error::Dimension {
            expected: 8,
            got: psi.dim(),
        });
    }
    wootters_concurrence(&reduced_density(psi, &[i, j])?)
}

/// `ℱ₃ = (4/√3)·√(Q(Q−C₁)(Q−C₂)(Q−C₃))` with `Q` the half-perimeter of the
/// one-to-other concurrences.  The square is exact:
/// `ℱ₃² = (2Σ C_i²C_j² − Σ C_i⁴)/3`.
pub fn f3_from_sides(sq: &[BigRational; 3]) -> Result<(f64, BigRational)> {
    let two = big_ratio(2, 1);
    let cross = &sq[0] * &sq[1] + &sq[1] * &sq[2] + &sq[2] * &sq[0];
    let quartic = &sq[0] * &sq[0] + &sq[1] * &sq[1] + &sq[2] * &sq[2];
    let f3_sq = (two * cross - quartic) / big_ratio(3, 1);
    if f3_sq.is_negative() {
        let v = rational_to_f64(&f3_sq);
        if v < -HERON_CLAMP {
            return Err(Error::NegativeRadicand(v));
        }
        return Ok((0.0, BigRational::zero()));
    }
    Ok((rational_to_f64(&f3_sq).sqrt(), f3_sq))
}

pub fn f3(psi: &PureStateExact<G>) -> Result<(f64, BigRational)> {
    let sq = one_to_other_sq(psi)?;
    f3_from_sides(&sq)
}

fn one_to_other_sq(psi: &PureStateExact<G>) -> Result<[BigRational; 3]> {
    Ok([
        one_to_other_concurrence(psi, 0)?.1,
        one_to_other_concurrence(psi, 1)?.1,
        one_to_other_concurrence(psi, 2)?.1,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntanglementClass {
    /// Fully separable stabiliser state.
    I,
    /// One qubit separable, the other two maximally entangled.
    II,
    /// GHZ-type stabiliser state.
    III,
    /// Maximal magic, no two-qubit entanglement.
    A,
    /// Maximal magic, every pair with concurrence √2/3.
    B,
    Unclassified,
}

impl EntanglementClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EntanglementClass::I => "I",
            EntanglementClass::II => "II",
            EntanglementClass::III => "III",
            EntanglementClass::A => "A",
            EntanglementClass::B => "B",
            EntanglementClass::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Concurrences of a three-qubit state.  Pairs are ordered AB, AC, BC; one-to-other
/// values A(BC), B(AC), C(AB).
#[derive(Clone, Debug)]
pub struct ConcurrenceProfile {
    pub pairwise: [f64; 3],
    pub one_to_other: [f64; 3],
    pub one_to_other_sq: [BigRational; 3],
    pub f3: f64,
    pub f3_sq: BigRational,
    pub class: EntanglementClass,
}

/// Pair order used in profiles.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

pub fn concurrence_profile(
    psi: &PureStateExact<G>,
    magic: MagicClass,
) -> Result<ConcurrenceProfile> {
    let pairwise = [
        pairwise_concurrence(psi, 0, 1)?,
        pairwise_concurrence(psi, 0, 2)?,
        pairwise_concurrence(psi, 1, 2)?,
    ];
    let sq = one_to_other_sq(psi)?;
    let one_to_other = [0, 1, 2].map(|k| rational_to_f64(&sq[k]).max(0.0).sqrt());
    let (f3, f3_sq) = f3_from_sides(&sq)?;
    let class = classify_profile(magic, &pairwise, &sq, &f3_sq);
    Ok(ConcurrenceProfile {
        pairwise,
        one_to_other,
        one_to_other_sq: sq,
        f3,
        f3_sq,
        class,
    })
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= CLASSIFY_TOL
}

fn classify_profile(
    magic: MagicClass,
    pairwise: &[f64; 3],
    sq: &[BigRational; 3],
    f3_sq: &BigRational,
) -> EntanglementClass {
    let one = BigRational::one();
    let count = |v: &BigRational| sq.iter().filter(|s| *s == v).count();
    match magic {
        MagicClass::Stabiliser => {
            if sq.iter().all(|s| s.is_zero()) {
                return EntanglementClass::I;
            }
            if count(&one) == 2 && count(&BigRational::zero()) == 1 {
                // the entangled pair is the one not containing the separable qubit
                let free = sq.iter().position(|s| s.is_zero()).unwrap();
                let pair = PAIRS
                    .iter()
                    .position(|&(a, b)| a != free && b != free)
                    .unwrap();
                let others_zero = (0..3)
                    .filter(|&k| k != pair)
                    .all(|k| close(pairwise[k], 0.0));
                if close(pairwise[pair], 1.0) && others_zero {
                    return EntanglementClass::II;
                }
            }
            if count(&one) == 3 && pairwise.iter().all(|&c| close(c, 0.0)) && f3_sq.is_one() {
                return EntanglementClass::III;
            }
            EntanglementClass::Unclassified
        }
        MagicClass::MaxMagicSic => {
            let two_thirds = big_ratio(2, 3);
            if count(&two_thirds) != 3 || *f3_sq != big_ratio(4, 9) {
                return EntanglementClass::Unclassified;
            }
            if pairwise.iter().all(|&c| close(c, 0.0)) {
                EntanglementClass::A
            } else if pairwise.iter().all(|&c| close(c, 2f64.sqrt() / 3.0)) {
                EntanglementClass::B
            } else {
                EntanglementClass::Unclassified
            }
        }
        _ => EntanglementClass::Unclassified,
    }
}

/// Exact histogram key for a squared concurrence (e.g. `1/4` for C = 1/2).
pub fn concurrence_sq_key(sq: &BigRational) -> String {
    if sq.denom() == &BigInt::one() {
        sq.numer().to_string()
    } else {
        format!("{}/{}", sq.numer(), sq.denom())
    }
}
