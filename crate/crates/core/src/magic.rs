//! Weyl–Heisenberg operators and the stabiliser Rényi entropy.
//!
//! Operators are never built as matrices for expectation values.  Every element of
//! the (phase-quotiented) WH group sends a basis vector to a unit multiple of another
//! basis vector, so an operator is a table `k ↦ (k', phase)` and `⟨c|O|c⟩` is a single
//! pass over the components.
//!
//! Conventions: `X|k⟩ = |k+1⟩`, `Z|k⟩ = ω^k|k⟩`, `τ = −exp(iπ/d)` and
//! `D_{a1,a2} = τ^{a1 a2} X^{a1} Z^{a2}`, which gives
//! `D_a D_b = τ^{a2 b1 − a1 b2} D_{a+b}`.  For qubits `D_{1,1} = −iXZ = −Y`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{big_ratio, BigRational, Ring, RingKind};
use crate::error::{Error, Result};
use crate::state::{overlap_sq_raw, vector_to_state, PureStateExact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// Tensor product of single-qubit Paulis; `labels[0]` acts on the first
/// (most significant) qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub labels: Vec<Pauli>,
}

impl PauliString {
    pub fn parse(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::Unsupported(format!("Pauli label {c}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self { labels })
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&p| p == Pauli::I)
    }

    /// Bit masks of the X part and the Z part, and the number of Y factors.
    fn masks(&self) -> (usize, usize, u32) {
        let n = self.labels.len();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (q, p) in self.labels.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.labels {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

/// All `4^n` Pauli strings in lexicographic order (I < X < Y < Z), identity first.
pub fn pauli_strings(n: usize) -> Result<Vec<PauliString>> {
    if n == 0 {
        return Err(Error::Unsupported("Pauli strings need n >= 1".into()));
    }
    let mut out = vec![PauliString { labels: Vec::new() }];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                Pauli::ALL.iter().map(move |&p| {
                    let mut l = s.labels.clone();
                    l.push(p);
                    PauliString { labels: l }
                })
            })
            .collect();
    }
    Ok(out)
}

/// Single-qudit displacement `D_{a1,a2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WHDisplacement {
    pub d: u32,
    pub a1: u32,
    pub a2: u32,
}

impl WHDisplacement {
    pub fn new(d: u32, a1: u32, a2: u32) -> Self {
        Self {
            d,
            a1: a1 % d,
            a2: a2 % d,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a1 == 0 && self.a2 == 0
    }

    /// `D|k⟩ = ζ^e |k + a1⟩` with `ζ = exp(iπ/d)`; returns `(k + a1, e)`.
    fn action(&self, k: usize) -> (usize, i64) {
        let d = self.d as i64;
        let (a1, a2) = (self.a1 as i64, self.a2 as i64);
        // τ = ζ^{d+1}, ω = ζ^2
        let e = ((d + 1) * a1 * a2 + 2 * a2 * k as i64).rem_euclid(2 * d);
        ((k + self.a1 as usize) % self.d as usize, e)
    }

    /// Dense matrix (column `k` is `D|k⟩`), if the phases lie in `R`.
    pub fn matrix<R: Ring>(&self) -> Result<Vec<Vec<R>>> {
        let d = self.d as usize;
        let mut m = vec![vec![R::zero(); d]; d];
        for k in 0..d {
            let (t, e) = self.action(k);
            m[t][k] = R::root_of_unity(2 * self.d, e).ok_or_else(|| {
                Error::Unsupported(format!("phases of D at d={} in {}", self.d, R::NAME))
            })?;
        }
        Ok(m)
    }
}

impl fmt::Display for WHDisplacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{},{}", self.a1, self.a2)
    }
}

/// All `d^2` displacements, ordered by `(a1, a2)`.
pub fn wh_displacements(d: u32) -> Result<Vec<WHDisplacement>> {
    if d < 2 {
        return Err(Error::Unsupported(format!(
            "WH displacements need d >= 2, got {d}"
        )));
    }
    Ok((0..d)
        .flat_map(|a1| (0..d).map(move |a2| WHDisplacement { d, a1, a2 }))
        .collect())
}

/// One element of the phase-quotiented WH group of a supported system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WhElement {
    Pauli(PauliString),
    Displacement(WHDisplacement),
}

impl WhElement {
    pub fn is_identity(&self) -> bool {
        match self {
            WhElement::Pauli(p) => p.is_identity(),
            WhElement::Displacement(d) => d.is_identity(),
        }
    }

    /// Basis-vector permutation with phases: `O|k⟩ = phase_k |target_k⟩`.
    pub fn table<R: Ring>(&self, dim: usize) -> Result<Vec<(usize, R)>> {
        let missing = || Error::Unsupported(format!("{self} phases in {}", R::NAME));
        match self {
            WhElement::Pauli(p) => {
                if dim != 1 << p.labels.len() {
                    return Err(Error::Dimension {
                        expected: 1 << p.labels.len(),
                        got: dim,
                    });
                }
                let (x, z, ny) = p.masks();
                (0..dim)
                    .map(|k| {
                        let sign = 2 * ((k & z).count_ones() as i64 % 2);
                        let ph = R::root_of_unity(4, ny as i64 + sign).ok_or_else(missing)?;
                        Ok((k ^ x, ph))
                    })
                    .collect()
            }
            WhElement::Displacement(d) => {
                if dim != d.d as usize {
                    return Err(Error::Dimension {
                        expected: d.d as usize,
                        got: dim,
                    });
                }
                (0..dim)
                    .map(|k| {
                        let (t, e) = d.action(k);
                        Ok((t, R::root_of_unity(2 * d.d, e).ok_or_else(missing)?))
                    })
                    .collect()
            }
        }
    }

    pub fn apply<R: Ring>(&self, v: &[R]) -> Result<Vec<R>> {
        let t = self.table::<R>(v.len())?;
        let mut out = vec![R::zero(); v.len()];
        for (k, &(tk, ph)) in t.iter().enumerate() {
            out[tk] = ph * v[k];
        }
        Ok(out)
    }
}

impl fmt::Display for WhElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhElement::Pauli(p) => write!(f, "{p}"),
            WhElement::Displacement(d) => write!(f, "{d}"),
        }
    }
}

/// A supported Hilbert space together with its WH group.
#[derive(Clone, Debug)]
pub struct WhTable<R: Ring> {
    pub dim: usize,
    pub elements: Vec<WhElement>,
    maps: Vec<Vec<(usize, R)>>,
}

impl<R: Ring> WhTable<R> {
    /// Qubit registers over Z[i] (`dim = 2^n`) or a single qutrit over Z[ω] (`dim = 3`).
    pub fn for_dim(dim: usize) -> Result<Self> {
        let elements: Vec<WhElement> = match (R::KIND, dim) {
            (RingKind::Gaussian, d) if d >= 2 && d.is_power_of_two() => {
                pauli_strings(d.trailing_zeros() as usize)?
                    .into_iter()
                    .map(WhElement::Pauli)
                    .collect()
            }
            (RingKind::Eisenstein, 3) => wh_displacements(3)?
                .into_iter()
                .map(WhElement::Displacement)
                .collect(),
            _ => {
                return Err(Error::Unsupported(format!(
                    "WH group of dimension {dim} over {}",
                    R::NAME
                )))
            }
        };
        let maps = elements
            .iter()
            .map(|e| e.table::<R>(dim))
            .collect::<Result<_>>()?;
        Ok(Self {
            dim,
            elements,
            maps,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `⟨c|O_j|c⟩` as a ring element.
    pub fn expectation(&self, j: usize, c: &[R]) -> R {
        self.maps[j]
            .iter()
            .zip(c)
            .fold(R::zero(), |acc, (&(t, ph), &ck)| {
                acc + c[t].conj() * ph * ck
            })
    }

    /// `|⟨c|O_j|c⟩|^2` unnormalised, for every element.
    pub fn expectation_norms(&self, c: &[R]) -> Vec<i64> {
        (0..self.len())
            .map(|j| self.expectation(j, c).norm())
            .collect()
    }

    /// `O_j·c`.
    pub fn apply(&self, j: usize, c: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); c.len()];
        for (k, &(t, ph)) in self.maps[j].iter().enumerate() {
            out[t] = ph * c[k];
        }
        out
    }

    /// The Δ of the applicable magic bound and a short system name.
    pub fn system(&self) -> Result<(u32, &'static str)> {
        match (R::KIND, self.dim) {
            (RingKind::Gaussian, 2) => Ok((1, "1-qubit")),
            (RingKind::Gaussian, 4) => Ok((0, "2-qubit")),
            (RingKind::Gaussian, 8) => Ok((1, "3-qubit")),
            (RingKind::Eisenstein, 3) => Ok((1, "1-qutrit")),
            _ => Err(Error::Unsupported(format!(
                "no magic bound for dimension {}",
                self.dim
            ))),
        }
    }
}

fn check_dim<R: Ring>(table: &WhTable<R>, psi: &PureStateExact<R>) -> Result<()> {
    if psi.dim() != table.dim {
        return Err(Error::Dimension {
            expected: table.dim,
            got: psi.dim(),
        });
    }
    Ok(())
}

/// `|⟨ψ|O|ψ⟩|^2` for a normalised ψ.
pub fn expectation_sq<R: Ring>(psi: &PureStateExact<R>, op: &WhElement) -> Result<BigRational> {
    let t = op.table::<R>(psi.dim())?;
    let c = &psi.components;
    let e = t.iter().zip(c).fold(R::zero(), |acc, (&(tk, ph), &ck)| {
        acc + c[tk].conj() * ph * ck
    });
    Ok(big_ratio(e.norm(), BigInt::from(psi.norm_sq).pow(2u32)))
}

/// `Ξ_α(ψ) = d^{-n} Σ_O |⟨ψ|O|ψ⟩|^{2α}`.
pub fn xi_alpha<R: Ring>(
    table: &WhTable<R>,
    psi: &PureStateExact<R>,
    alpha: u32,
) -> Result<BigRational> {
    check_dim(table, psi)?;
    if alpha == 0 {
        return Err(Error::Unsupported("α must be a positive integer".into()));
    }
    Ok(xi_from_norms(
        &table.expectation_norms(&psi.components),
        psi.norm_sq,
        alpha,
        table.dim,
    ))
}

/// Ξ_α from the unnormalised squared expectations `E_O`, `N = ‖c‖²` and the
/// Hilbert-space dimension.
pub fn xi_from_norms(norms: &[i64], norm_sq: i64, alpha: u32, dim: usize) -> BigRational {
    let num: BigInt = norms.iter().map(|&e| BigInt::from(e).pow(alpha)).sum();
    let den = BigInt::from(dim) * BigInt::from(norm_sq).pow(2 * alpha);
    BigRational::new(num, den)
}

/// `M_α = log2(1/Ξ_α)/(α − 1)`.
pub fn m_alpha(xi: &BigRational, alpha: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::Unsupported("M_α needs α >= 2".into()));
    }
    Ok(-log2_rational(xi) / (alpha as f64 - 1.0))
}

fn log2_rational(r: &BigRational) -> f64 {
    // both parts fit in f64 range for everything this crate produces
    let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
    n.log2() - d.log2()
}

/// Lower bound on Ξ₂ and the matching maximal M₂.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalBounds {
    pub dim: u64,
    pub delta: u32,
    pub xi_min: BigRational,
    pub m_max: f64,
}

/// Δ = 1: `2/(D+1)`; Δ = 0: `(2D−1)/D²`.
pub fn extremal_bounds(dim: u64, delta: u32) -> Result<ExtremalBounds> {
    if dim < 2 {
        return Err(Error::Unsupported(format!("dimension {dim} < 2")));
    }
    let d = dim as i64;
    let xi_min = match delta {
        1 => big_ratio(2, d + 1),
        0 => big_ratio(2 * d - 1, d * d),
        _ => return Err(Error::Unsupported(format!("Δ must be 0 or 1, got {delta}"))),
    };
    let m_max = -log2_rational(&xi_min);
    Ok(ExtremalBounds {
        dim,
        delta,
        xi_min,
        m_max,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MagicClass {
    Stabiliser,
    MaxMagicSic,
    MaxMagicMub,
    Intermediate,
}

impl MagicClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MagicClass::Stabiliser => "stabiliser",
            MagicClass::MaxMagicSic => "max-magic-sic",
            MagicClass::MaxMagicMub => "max-magic-mub",
            MagicClass::Intermediate => "intermediate",
        }
    }

    pub fn is_max_magic(self) -> bool {
        matches!(self, MagicClass::MaxMagicSic | MagicClass::MaxMagicMub)
    }
}

impl fmt::Display for MagicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MagicReport {
    pub xi2: BigRational,
    pub m2: f64,
    pub class: MagicClass,
}

/// Classify a state against 1 and the bound of its system.
pub fn classify<R: Ring>(table: &WhTable<R>, psi: &PureStateExact<R>) -> Result<MagicReport> {
    let xi2 = xi_alpha(table, psi, 2)?;
    classify_xi(table, xi2)
}

pub fn classify_xi<R: Ring>(table: &WhTable<R>, xi2: BigRational) -> Result<MagicReport> {
    let (delta, _) = table.system()?;
    let bounds = extremal_bounds(table.dim as u64, delta)?;
    let class = if xi2.is_one() {
        MagicClass::Stabiliser
    } else if xi2 == bounds.xi_min {
        if delta == 1 {
            MagicClass::MaxMagicSic
        } else {
            MagicClass::MaxMagicMub
        }
    } else {
        MagicClass::Intermediate
    };
    let m2 = m_alpha(&xi2, 2)?;
    Ok(MagicReport { xi2, m2, class })
}

/// Classify every state of a list in parallel, preserving order.
pub fn classify_all<R: Ring>(
    table: &WhTable<R>,
    states: &[PureStateExact<R>],
) -> Result<Vec<MagicReport>> {
    states.par_iter().map(|s| classify(table, s)).collect()
}

/// Number of n-qubit stabiliser states, `2^n Π_{k=0}^{n-1} (2^{n-k} + 1)`.
pub fn stabiliser_count(n: u32) -> u128 {
    (0..n).fold(1u128 << n, |acc, k| acc * ((1u128 << (n - k)) + 1))
}

/// Distinct states `O|ψ⟩` over the WH group, in group order.
pub fn wh_orbit<R: Ring>(
    table: &WhTable<R>,
    psi: &PureStateExact<R>,
) -> Result<Vec<PureStateExact<R>>> {
    check_dim(table, psi)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for j in 0..table.len() {
        let s = vector_to_state(&table.apply(j, &psi.components))?;
        if seen.insert(s.components.clone()) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Pairwise check of a state list against the SIC overlap `1/(D+1)`.
#[derive(Clone, Debug)]
pub struct SicReport {
    pub holds: bool,
    pub target: BigRational,
    pub pairs_checked: usize,
    pub violations: Vec<(usize, usize, BigRational)>,
}

/// True iff every distinct pair in `states` has overlap `1/(D+1)`.
pub fn sic_check<R: Ring>(states: &[PureStateExact<R>]) -> Result<SicReport> {
    let dim = states.first().map_or(0, |s| s.dim()) as i64;
    let target = big_ratio(1, dim + 1);
    let mut violations = Vec::new();
    let mut pairs = 0;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            pairs += 1;
            let o = overlap_sq_raw(&states[i].components, &states[j].components)?;
            if o != target {
                violations.push((i, j, o));
            }
        }
    }
    Ok(SicReport {
        holds: violations.is_empty(),
        target,
        pairs_checked: pairs,
        violations,
    })
}

/// SIC check on the WH orbit of every state; the orbit must have `D²` members.
pub fn sic_check_orbits<R: Ring>(table: &WhTable<R>, states: &[PureStateExact<R>]) -> Result<bool> {
    let ok = states
        .par_iter()
        .map(|s| {
            let orbit = wh_orbit(table, s)?;
            Ok(orbit.len() == table.dim * table.dim && sic_check(&orbit)?.holds)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(ok.into_iter().all(|b| b))
}

/// Values `|⟨ψ|g|ψ⟩|²` over nonidentity WH elements and whether all equal `1/(D+1)`.
#[derive(Clone, Debug)]
pub struct CovarianceReport {
    pub holds: bool,
    pub values: Vec<BigRational>,
}

pub fn wh_covariance_check<R: Ring>(
    table: &WhTable<R>,
    psi: &PureStateExact<R>,
) -> Result<CovarianceReport> {
    check_dim(table, psi)?;
    let target = big_ratio(1, table.dim as i64 + 1);
    let n2 = BigInt::from(psi.norm_sq).pow(2u32);
    let values: Vec<BigRational> = (0..table.len())
        .filter(|&j| !table.elements[j].is_identity())
        .map(|j| {
            BigRational::new(
                BigInt::from(table.expectation(j, &psi.components).norm()),
                n2.clone(),
            )
        })
        .collect();
    Ok(CovarianceReport {
        holds: values.iter().all(|v| *v == target),
        values,
    })
}

/// Two-qubit signature `{1, 0×3, (1/4)×12}` of the expectation values.
pub fn mub_orbit_check<R: Ring>(table: &WhTable<R>, psi: &PureStateExact<R>) -> Result<bool> {
    check_dim(table, psi)?;
    if table.dim != 4 {
        return Ok(false);
    }
    let n2 = psi.norm_sq * psi.norm_sq;
    let norms = table.expectation_norms(&psi.components);
    let ones = norms.iter().filter(|&&e| e == n2).count();
    let zeros = norms.iter().filter(|&&e| e == 0).count();
    let quarters = norms.iter().filter(|&&e| 4 * e == n2).count();
    Ok(ones == 1 && zeros == 3 && quarters == 12)
}

/// Orbit-level cross-validation of the MUB property: the WH orbit splits into
/// orthonormal bases that are pairwise unbiased.
#[derive(Clone, Debug)]
pub struct MubOrbitReport {
    pub orbit_size: usize,
    pub bases: Vec<Vec<usize>>,
    pub holds: bool,
}

pub fn mub_orbit_construct<R: Ring>(
    table: &WhTable<R>,
    psi: &PureStateExact<R>,
) -> Result<MubOrbitReport> {
    let orbit = wh_orbit(table, psi)?;
    let d = table.dim;
    let unbiased = big_ratio(1, d as i64);
    let n = orbit.len();
    let mut ov = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            ov[i][j] = overlap_sq_raw(&orbit[i].components, &orbit[j].components)?;
        }
    }
    // Orthogonality classes: states joined when their overlap is zero.
    let mut basis_of = vec![usize::MAX; n];
    let mut bases: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if basis_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| j == i || ov[i][j].is_zero()).collect();
        for &m in &members {
            basis_of[m] = bases.len();
        }
        bases.push(members);
    }
    let mut holds = bases.iter().all(|b| b.len() == d);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let same = basis_of[i] == basis_of[j];
            holds &= if same {
                ov[i][j].is_zero()
            } else {
                ov[i][j] == unbiased
            };
        }
    }
    Ok(MubOrbitReport {
        orbit_size: n,
        bases,
        holds,
    })
}
