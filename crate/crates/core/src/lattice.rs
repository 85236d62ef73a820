//! The E8, BW16 and E6 lattices and exhaustive enumeration of their shells.
//!
//! Enumeration is a depth-first Fincke–Pohst search driven by an exact LDLᵀ
//! factorisation of the Gram matrix.  The factorisation is scaled to integers once
//! per lattice, so every pruning decision is an integer comparison and nothing is
//! ever lost to rounding.  E6 is enumerated through its real 6-dimensional
//! embedding (coefficients `a_k, b_k` of `β_k = a_k + b_k ω`) and reassembled into
//! Eisenstein coordinates afterwards.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{isqrt, BigRational, EisensteinInt, Ring};
use crate::error::{Error, Result};

/// Default cap on visited search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeName {
    E8,
    BW16,
    E6,
}

impl LatticeName {
    pub const ALL: [LatticeName; 3] = [LatticeName::E8, LatticeName::BW16, LatticeName::E6];

    pub fn as_str(self) -> &'static str {
        match self {
            LatticeName::E8 => "E8",
            LatticeName::BW16 => "BW16",
            LatticeName::E6 => "E6",
        }
    }
}

impl fmt::Display for LatticeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LatticeName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "E8" => Ok(LatticeName::E8),
            "BW16" => Ok(LatticeName::BW16),
            "E6" => Ok(LatticeName::E6),
            _ => Err(Error::UnknownLattice(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientField {
    Integers,
    Eisenstein,
}

/// Exact Gram matrix of the integer coefficient space and its inverse.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub entries: Vec<Vec<BigRational>>,
    pub inverse: Vec<Vec<BigRational>>,
}

impl GramMatrix {
    fn new(entries: Vec<Vec<BigRational>>) -> Result<Self> {
        let inverse =
            invert(&entries).ok_or_else(|| Error::Invariant("singular Gram matrix".into()))?;
        Ok(Self { entries, inverse })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn inverse_diagonal(&self) -> Vec<BigRational> {
        (0..self.dim())
            .map(|i| self.inverse[i][i].clone())
            .collect()
    }

    /// `a·G·aᵀ` for an integer coefficient vector.
    pub fn quadratic_form(&self, a: &[i64]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                acc += g * BigRational::from_integer(BigInt::from(a[i] * a[j]));
            }
        }
        acc
    }
}

#[derive(Clone, Debug)]
enum Generator {
    /// Rows of `s·M`.
    Real(Vec<Vec<i64>>),
    Eisenstein(Vec<Vec<EisensteinInt>>),
}

/// A lattice together with everything needed to enumerate it.
#[derive(Clone, Debug)]
pub struct LatticeSpec {
    pub name: LatticeName,
    pub field: CoefficientField,
    /// Complex dimension of the ambient Hilbert space.
    pub complex_dim: usize,
    pub real_dim: usize,
    /// Coordinates times `scale` are ring integers.
    pub scale: i64,
    pub known_counts: BTreeMap<u64, u64>,
    /// Gram matrix of the integer coefficients used for enumeration (for E6 the
    /// real embedding, coefficients ordered `a1 a2 a3 b1 b2 b3`).
    pub gram: GramMatrix,
    generator: Generator,
    /// Inverse of the scaled real generator, used to recover coefficients.
    scaled_inverse: Option<Vec<Vec<BigRational>>>,
}

fn e8_scaled() -> Vec<Vec<i64>> {
    let mut rows = Vec::new();
    for k in 0..6 {
        let mut r = vec![0; 8];
        r[k] = 2;
        r[k + 1] = -2;
        rows.push(r);
    }
    rows.push(vec![-1, -1, -1, -1, -1, -1, 1, 1]);
    rows.push(vec![0, 0, 0, 0, 0, 2, 2, 0]);
    rows
}

fn bw16_scaled() -> Vec<Vec<i64>> {
    // Support of each row of the integer matrix, with the value on that support.
    let rows: [(&[usize], i64); 16] = [
        (&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15], 1),
        (&[1, 7, 11, 13], 2),
        (&[2, 7, 11, 14], 2),
        (&[3, 7, 11, 15], 2),
        (&[4, 7, 13, 14], 2),
        (&[5, 7, 13, 15], 2),
        (&[6, 7, 14, 15], 2),
        (&[7], 4),
        (&[8, 11, 13, 14], 2),
        (&[9, 11, 13, 15], 2),
        (&[10, 11, 14, 15], 2),
        (&[11], 4),
        (&[12, 13, 14, 15], 2),
        (&[13], 4),
        (&[14], 4),
        (&[15], 4),
    ];
    rows.iter()
        .map(|(support, v)| {
            let mut r = vec![0; 16];
            for &k in *support {
                r[k] = *v;
            }
            r
        })
        .collect()
}

fn e6_rows() -> Vec<Vec<EisensteinInt>> {
    let t = EisensteinInt::THETA;
    let (z, o) = (EisensteinInt::zero(), EisensteinInt::one());
    vec![vec![t, z, z], vec![z, t, z], vec![o, o, o]]
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Real part of `u·conj(v)` summed over components.
fn re_hermitian(u: &[EisensteinInt], v: &[EisensteinInt]) -> BigRational {
    u.iter().zip(v).fold(BigRational::zero(), |acc, (&x, &y)| {
        acc + (x * y.conj()).re_rational()
    })
}

/// Real embedding of an Eisenstein row: the row for `a_k` is `e_k·M`, the row for
/// `b_k` is `ω·e_k·M`.
fn e6_real_rows() -> Vec<Vec<EisensteinInt>> {
    let rows = e6_rows();
    let w = EisensteinInt::OMEGA;
    let mut out: Vec<Vec<EisensteinInt>> = rows.clone();
    out.extend(rows.iter().map(|r| r.iter().map(|&z| w * z).collect()));
    out
}

/// The real 6×6 embedding of the E6 generator.  Entry `(p, q)` stands for
/// `(p + q√3)/2`; columns are `Re c1, Re c2, Re c3, Im c1, Im c2, Im c3`.
pub fn e6_real_generator() -> Vec<Vec<(i64, i64)>> {
    e6_real_rows()
        .iter()
        .map(|row| {
            let re: Vec<(i64, i64)> = row.iter().map(|z| (2 * z.a - z.b, 0)).collect();
            let im: Vec<(i64, i64)> = row.iter().map(|z| (0, z.b)).collect();
            re.into_iter().chain(im).collect()
        })
        .collect()
}

/// Construct one of the three lattices.
pub fn build_lattice(name: LatticeName) -> Result<LatticeSpec> {
    let known: &[(u64, u64)] = match name {
        LatticeName::E8 => &[(2, 240), (4, 2160), (6, 6720), (8, 17520), (10, 30240)],
        LatticeName::BW16 => &[(2, 0), (4, 4320), (6, 61440), (8, 522720), (10, 2211840)],
        LatticeName::E6 => &[(3, 72), (6, 270), (9, 720), (12, 936), (15, 2160)],
    };
    let known_counts = known.iter().copied().collect();
    match name {
        LatticeName::E8 | LatticeName::BW16 => {
            let scaled = if name == LatticeName::E8 {
                e8_scaled()
            } else {
                bw16_scaled()
            };
            let s = 2;
            let n = scaled.len();
            let mut g = vec![vec![BigRational::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let dot: i64 = scaled[i].iter().zip(&scaled[j]).map(|(x, y)| x * y).sum();
                    g[i][j] = BigRational::new(BigInt::from(dot), BigInt::from(s * s));
                }
            }
            let sm: Vec<Vec<BigRational>> = scaled
                .iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect();
            let scaled_inverse =
                Some(invert(&sm).ok_or_else(|| Error::Invariant("singular generator".into()))?);
            Ok(LatticeSpec {
                name,
                field: CoefficientField::Integers,
                complex_dim: n / 2,
                real_dim: n,
                scale: s,
                known_counts,
                gram: GramMatrix::new(g)?,
                generator: Generator::Real(scaled),
                scaled_inverse,
            })
        }
        LatticeName::E6 => {
            let real_rows = e6_real_rows();
            let g = real_rows
                .iter()
                .map(|u| real_rows.iter().map(|v| re_hermitian(u, v)).collect())
                .collect();
            Ok(LatticeSpec {
                name,
                field: CoefficientField::Eisenstein,
                complex_dim: 3,
                real_dim: 6,
                scale: 1,
                known_counts,
                gram: GramMatrix::new(g)?,
                generator: Generator::Eisenstein(e6_rows()),
                scaled_inverse: None,
            })
        }
    }
}

/// One lattice vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShellVector {
    /// Integer coefficients in enumeration order (E6: `a1 a2 a3 b1 b2 b3`).
    pub coeffs: Vec<i64>,
    /// Ambient coordinates times the lattice scale.  E6 stores Eisenstein pairs
    /// `a1 b1 a2 b2 a3 b3`.
    pub coords: Vec<i64>,
    pub norm: u64,
}

impl ShellVector {
    /// Eisenstein coordinates (E6 only).
    pub fn eisenstein_coords(&self) -> Vec<EisensteinInt> {
        self.coords
            .chunks(2)
            .map(|p| EisensteinInt::new(p[0], p[1]))
            .collect()
    }

    /// Eisenstein coefficients `β_k = a_k + b_k ω` (E6 only).
    pub fn eisenstein_coeffs(&self) -> Vec<EisensteinInt> {
        let h = self.coeffs.len() / 2;
        (0..h)
            .map(|k| EisensteinInt::new(self.coeffs[k], self.coeffs[h + k]))
            .collect()
    }
}

/// All lattice vectors of one squared norm.
#[derive(Clone, Debug)]
pub struct Shell {
    pub lattice: LatticeName,
    pub norm: u64,
    pub vectors: Vec<ShellVector>,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Result of comparing a shell size against the known counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaCheck {
    pub ok: bool,
    /// False when the norm is not in the known list (then `ok` is vacuously true).
    pub checked: bool,
    pub expected: Option<u64>,
}

impl LatticeSpec {
    /// Number of integer coefficients.
    pub fn rank(&self) -> usize {
        self.gram.dim()
    }

    /// Rows of `s·M` (real lattices only).
    pub fn scaled_generator(&self) -> Option<&[Vec<i64>]> {
        match &self.generator {
            Generator::Real(rows) => Some(rows),
            Generator::Eisenstein(_) => None,
        }
    }

    /// Rows of the Eisenstein generator (E6 only).
    pub fn eisenstein_generator(&self) -> Option<&[Vec<EisensteinInt>]> {
        match &self.generator {
            Generator::Eisenstein(rows) => Some(rows),
            Generator::Real(_) => None,
        }
    }

    /// Scaled ambient coordinates of `a·M`.
    pub fn coordinates(&self, a: &[i64]) -> Vec<i64> {
        match &self.generator {
            Generator::Real(rows) => {
                let mut x = vec![0i64; self.real_dim];
                for (ak, row) in a.iter().zip(rows) {
                    if *ak != 0 {
                        for (xi, r) in x.iter_mut().zip(row) {
                            *xi += ak * r;
                        }
                    }
                }
                x
            }
            Generator::Eisenstein(rows) => {
                let h = rows.len();
                let beta: Vec<EisensteinInt> =
                    (0..h).map(|k| EisensteinInt::new(a[k], a[h + k])).collect();
                let mut c = vec![EisensteinInt::zero(); self.complex_dim];
                for (b, row) in beta.iter().zip(rows) {
                    for (ck, &m) in c.iter_mut().zip(row) {
                        *ck += *b * m;
                    }
                }
                c.iter().flat_map(|z| [z.a, z.b]).collect()
            }
        }
    }

    /// Squared norm recomputed from scaled coordinates alone.
    pub fn norm_of_coords(&self, coords: &[i64]) -> BigRational {
        match self.field {
            CoefficientField::Integers => {
                let s: i64 = coords.iter().map(|x| x * x).sum();
                BigRational::new(BigInt::from(s), BigInt::from(self.scale * self.scale))
            }
            CoefficientField::Eisenstein => {
                let s: i64 = coords
                    .chunks(2)
                    .map(|p| EisensteinInt::new(p[0], p[1]).norm())
                    .sum();
                BigRational::new(BigInt::from(s), BigInt::from(self.scale * self.scale))
            }
        }
    }

    /// Recover integer coefficients from scaled coordinates, if the point is in the lattice.
    pub fn coefficients_of(&self, coords: &[i64]) -> Option<Vec<i64>> {
        match self.field {
            CoefficientField::Integers => {
                let inv = self.scaled_inverse.as_ref()?;
                if coords.len() != inv.len() {
                    return None;
                }
                let mut a = Vec::with_capacity(inv.len());
                for j in 0..inv.len() {
                    let mut acc = BigRational::zero();
                    for (i, &x) in coords.iter().enumerate() {
                        if x != 0 {
                            acc += &inv[i][j] * rat(x);
                        }
                    }
                    if !acc.is_integer() {
                        return None;
                    }
                    a.push(acc.to_integer().to_i64()?);
                }
                Some(a)
            }
            CoefficientField::Eisenstein => {
                if coords.len() != 2 * self.complex_dim {
                    return None;
                }
                let target: Vec<EisensteinInt> = coords
                    .chunks(2)
                    .map(|p| EisensteinInt::new(p[0], p[1]))
                    .collect();
                let beta = self.solve_eisenstein_coefficients(&target)?;
                Some(
                    beta.iter()
                        .map(|z| z.a)
                        .chain(beta.iter().map(|z| z.b))
                        .collect(),
                )
            }
        }
    }

    /// Solve `β·M = target` exactly over Z[ω] (E6 only).
    pub fn solve_eisenstein_coefficients(
        &self,
        target: &[EisensteinInt],
    ) -> Option<Vec<EisensteinInt>> {
        let Generator::Eisenstein(m) = &self.generator else {
            return None;
        };
        solve_left(m, target)
    }
}

/// Solve `β·M = t` for a 3×3 Eisenstein matrix by the adjugate, returning `None`
/// when the solution leaves the ring.
fn solve_left(m: &[Vec<EisensteinInt>], t: &[EisensteinInt]) -> Option<Vec<EisensteinInt>> {
    if m.len() != 3 || t.len() != 3 {
        return None;
    }
    let minor =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    // cofactor C[i][j]
    let others = |k: usize| match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut cof = [[EisensteinInt::zero(); 3]; 3];
    for (i, row) in cof.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let (r0, r1) = others(i);
            let (c0, c1) = others(j);
            let v = minor(r0, r1, c0, c1);
            *c = if (i + j) % 2 == 0 { v } else { -v };
        }
    }
    let det = (0..3).fold(EisensteinInt::zero(), |acc, j| acc + m[0][j] * cof[0][j]);
    if det.is_zero() {
        return None;
    }
    // β_j = Σ_i t_i (M⁻¹)_{ij} = Σ_i t_i C[j][i] / det
    (0..3)
        .map(|j| {
            let num = (0..3).fold(EisensteinInt::zero(), |acc, i| acc + t[i] * cof[j][i]);
            num.div_exact(det)
        })
        .collect()
}

/// Per-coefficient bounds `⌊√(ℓ·(G⁻¹)_ii)⌋`.
pub fn coordinate_bounds(spec: &LatticeSpec, norm: u64) -> Result<Vec<i64>> {
    if norm == 0 {
        return Err(Error::InvalidNorm {
            lattice: spec.name.to_string(),
            norm,
            reason: "norm must be positive".into(),
        });
    }
    spec.gram
        .inverse_diagonal()
        .iter()
        .map(|d| {
            let x = (d * rat(norm as i64)).floor().to_integer();
            let x = x.to_i128().ok_or(Error::Overflow("coordinate bound"))?;
            Ok(isqrt(x) as i64)
        })
        .collect()
}

/// Compare a shell against the known counts.
pub fn theta_check(shell: &Shell, spec: &LatticeSpec) -> ThetaCheck {
    match spec.known_counts.get(&shell.norm) {
        Some(&n) => ThetaCheck {
            ok: n == shell.len() as u64,
            checked: true,
            expected: Some(n),
        },
        None => ThetaCheck {
            ok: true,
            checked: false,
            expected: None,
        },
    }
}

/// Enumerate every lattice vector of squared norm `norm` with the default budget.
pub fn enumerate_shell(spec: &LatticeSpec, norm: u64) -> Result<Shell> {
    enumerate_shell_with_budget(spec, norm, DEFAULT_NODE_BUDGET)
}

/// Enumerate every lattice vector of squared norm `norm`, failing once more than
/// `budget` search nodes have been visited.
pub fn enumerate_shell_with_budget(spec: &LatticeSpec, norm: u64, budget: u64) -> Result<Shell> {
    if norm == 0 {
        return Err(Error::InvalidNorm {
            lattice: spec.name.to_string(),
            norm,
            reason: "norm must be positive".into(),
        });
    }
    let plan = SearchPlan::new(&spec.gram.entries)?;
    let mut coeffs = plan.run(norm, budget).map_err(|e| match e {
        Error::BudgetExceeded { budget, .. } => Error::BudgetExceeded {
            lattice: spec.name.to_string(),
            norm,
            budget,
        },
        other => other,
    })?;
    coeffs.sort_unstable();

    let target = rat(norm as i64);
    let vectors = coeffs
        .into_par_iter()
        .map(|a| {
            let coords = spec.coordinates(&a);
            if spec.norm_of_coords(&coords) != target {
                return Err(Error::Invariant(format!(
                    "{} vector {:?} does not have norm {}",
                    spec.name, a, norm
                )));
            }
            Ok(ShellVector {
                coeffs: a,
                coords,
                norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Shell {
        lattice: spec.name,
        norm,
        vectors,
    })
}

/// Exact LDLᵀ factorisation `G = L·D·Lᵀ` with unit lower-triangular `L`.
pub fn ldl(g: &[Vec<BigRational>]) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let n = g.len();
    let mut l = vec![vec![BigRational::zero(); n]; n];
    let mut d = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut dj = g[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: dj.to_string(),
            });
        }
        l[j][j] = BigRational::one();
        for i in j + 1..n {
            let mut v = g[i][j].clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &dj;
        }
        d[j] = dj;
    }
    Ok((l, d))
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Integer form of the quadratic form: `Q(a)·lc = Σ_j w_j·Y_j²` where
/// `Y_j = den_j·a_j + Σ_{i>j} n[j][i]·a_i`.
struct SearchPlan {
    n: usize,
    den: Vec<i128>,
    /// `offdiag[j]` lists `(i, n_ji)` for `i > j` with nonzero multiplier.
    offdiag: Vec<Vec<(usize, i128)>>,
    w: Vec<i128>,
    lc: i128,
}

const FLUSH_EVERY: u64 = 1 << 14;

struct NodeCounter<'a> {
    local: u64,
    total: &'a AtomicU64,
    abort: &'a AtomicBool,
    budget: u64,
}

impl NodeCounter<'_> {
    #[inline]
    fn tick(&mut self) -> Result<()> {
        self.local += 1;
        if self.local >= FLUSH_EVERY {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let t = self.total.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if t > self.budget || self.abort.load(Ordering::Relaxed) {
            self.abort.store(true, Ordering::Relaxed);
            return Err(Error::BudgetExceeded {
                lattice: String::new(),
                norm: 0,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

fn to_i128(r: &BigInt, what: &'static str) -> Result<i128> {
    r.to_i128().ok_or(Error::Overflow(what))
}

impl SearchPlan {
    fn new(g: &[Vec<BigRational>]) -> Result<Self> {
        let n = g.len();
        let (l, d) = ldl(g)?;
        let mut den = Vec::with_capacity(n);
        let mut offdiag = Vec::with_capacity(n);
        let mut wq = Vec::with_capacity(n);
        for j in 0..n {
            let dj = (j + 1..n).fold(BigInt::one(), |acc, i| acc.lcm(l[i][j].denom()));
            let djr = BigRational::from_integer(dj.clone());
            let mut row = Vec::new();
            for i in j + 1..n {
                let v = (&l[i][j] * &djr).to_integer();
                if !v.is_zero() {
                    row.push((i, to_i128(&v, "search plan")?));
                }
            }
            wq.push(&d[j] / (&djr * &djr));
            den.push(to_i128(&dj, "search plan")?);
            offdiag.push(row);
        }
        let lc = wq.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let lcr = BigRational::from_integer(lc.clone());
        let w = wq
            .iter()
            .map(|x| to_i128(&(x * &lcr).to_integer(), "search plan"))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            den,
            offdiag,
            w,
            lc: to_i128(&lc, "search plan")?,
        })
    }

    /// Range of `a_j` given the remaining budget and the partial sum `t`.
    #[inline]
    fn range(&self, j: usize, rem: i128, t: i128) -> (i128, i128) {
        let s = isqrt(rem / self.w[j]);
        let den = self.den[j];
        (ceil_div(-s - t, den), floor_div(s - t, den))
    }

    #[inline]
    fn partial(&self, j: usize, a: &[i64]) -> i128 {
        self.offdiag[j].iter().map(|&(i, m)| m * a[i] as i128).sum()
    }

    fn run(&self, norm: u64, budget: u64) -> Result<Vec<Vec<i64>>> {
        let total_target = (norm as i128)
            .checked_mul(self.lc)
            .ok_or(Error::Overflow("shell target"))?;
        let total = AtomicU64::new(0);
        let abort = AtomicBool::new(false);

        // Expand the top levels serially into independent prefixes.
        let split = (self.n - 1).min(2);
        let mut prefixes: Vec<(Vec<i64>, i128)> = vec![(vec![0; self.n], total_target)];
        for step in 0..split {
            let j = self.n - 1 - step;
            let mut next = Vec::new();
            for (a, rem) in prefixes {
                let t = self.partial(j, &a);
                let (lo, hi) = self.range(j, rem, t);
                for aj in lo..=hi {
                    let y = self.den[j] * aj + t;
                    let mut b = a.clone();
                    b[j] = aj as i64;
                    next.push((b, rem - self.w[j] * y * y));
                }
            }
            prefixes = next;
        }
        let start = self.n - 1 - split;

        let parts = prefixes
            .into_par_iter()
            .map(|(mut a, rem)| {
                let mut counter = NodeCounter {
                    local: 0,
                    total: &total,
                    abort: &abort,
                    budget,
                };
                let mut out = Vec::new();
                self.dfs(start, rem, &mut a, &mut out, &mut counter)?;
                counter.flush()?;
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.into_iter().flatten().collect())
    }

    fn dfs(
        &self,
        j: usize,
        rem: i128,
        a: &mut [i64],
        out: &mut Vec<Vec<i64>>,
        counter: &mut NodeCounter<'_>,
    ) -> Result<()> {
        let t = self.partial(j, a);
        let (lo, hi) = self.range(j, rem, t);
        for aj in lo..=hi {
            counter.tick()?;
            let y = self.den[j] * aj + t;
            let r = rem - self.w[j] * y * y;
            a[j] = aj as i64;
            if j == 0 {
                if r == 0 {
                    out.push(a.to_vec());
                }
            } else {
                self.dfs(j - 1, r, a, out, counter)?;
            }
        }
        a[j] = 0;
        Ok(())
    }
}

fn floor_div(a: i128, d: i128) -> i128 {
    Integer::div_floor(&a, &d)
}

fn ceil_div(a: i128, d: i128) -> i128 {
    -floor_div(-a, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn generator_first_rows() {
        let e8 = build_lattice(LatticeName::E8).unwrap();
        assert_eq!(
            e8.scaled_generator().unwrap()[0],
            vec![2, -2, 0, 0, 0, 0, 0, 0]
        );
        let bw = build_lattice(LatticeName::BW16).unwrap();
        assert_eq!(bw.scaled_generator().unwrap()[0], vec![1; 16]);
        let e6 = build_lattice(LatticeName::E6).unwrap();
        let t = EisensteinInt::THETA;
        let z = EisensteinInt::zero();
        assert_eq!(e6.eisenstein_generator().unwrap()[0], vec![t, z, z]);
        assert_eq!(
            e6.eisenstein_generator().unwrap()[2],
            vec![EisensteinInt::one(); 3]
        );
    }

    #[test]
    fn inverse_diagonals() {
        let want = |xs: &[i64], d: i64| xs.iter().map(|&x| ratio(x, d)).collect::<Vec<_>>();
        let e8 = build_lattice(LatticeName::E8).unwrap();
        assert_eq!(
            e8.gram.inverse_diagonal(),
            want(&[2, 6, 12, 20, 30, 14, 4, 8], 1)
        );
        let bw = build_lattice(LatticeName::BW16).unwrap();
        assert_eq!(
            bw.gram.inverse_diagonal(),
            want(&[4, 2, 2, 2, 2, 2, 2, 8, 2, 2, 2, 8, 2, 8, 8, 8], 1)
        );
        let e6 = build_lattice(LatticeName::E6).unwrap();
        assert_eq!(e6.gram.inverse_diagonal(), want(&[8, 8, 12, 8, 8, 12], 9));
    }

    #[test]
    fn bounds_examples() {
        let e8 = build_lattice(LatticeName::E8).unwrap();
        assert_eq!(
            coordinate_bounds(&e8, 2).unwrap(),
            vec![2, 3, 4, 6, 7, 5, 2, 4]
        );
        let bw = build_lattice(LatticeName::BW16).unwrap();
        assert_eq!(coordinate_bounds(&bw, 4).unwrap()[0], 4);
        let e6 = build_lattice(LatticeName::E6).unwrap();
        assert_eq!(coordinate_bounds(&e6, 3).unwrap(), vec![1, 1, 2, 1, 1, 2]);
        assert!(coordinate_bounds(&e6, 0).is_err());
    }

    #[test]
    fn small_shells() {
        let e8 = build_lattice(LatticeName::E8).unwrap();
        assert_eq!(enumerate_shell(&e8, 2).unwrap().len(), 240);
        let bw = build_lattice(LatticeName::BW16).unwrap();
        assert_eq!(enumerate_shell(&bw, 2).unwrap().len(), 0);
        let e6 = build_lattice(LatticeName::E6).unwrap();
        assert_eq!(enumerate_shell(&e6, 6).unwrap().len(), 270);
    }

    #[test]
    fn budget_is_enforced() {
        let e8 = build_lattice(LatticeName::E8).unwrap();
        match enumerate_shell_with_budget(&e8, 4, 1000) {
            Err(Error::BudgetExceeded { lattice, norm, .. }) => {
                assert_eq!(lattice, "E8");
                assert_eq!(norm, 4);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn theta_examples() {
        let e6 = build_lattice(LatticeName::E6).unwrap();
        let mut shell = enumerate_shell(&e6, 3).unwrap();
        assert!(theta_check(&shell, &e6).ok);
        shell.vectors.pop();
        assert!(!theta_check(&shell, &e6).ok);
        let odd = Shell {
            lattice: LatticeName::E6,
            norm: 4,
            vectors: vec![],
        };
        let c = theta_check(&odd, &e6);
        assert!(c.ok && !c.checked);
    }

    #[test]
    fn eisenstein_solve_examples() {
        let e6 = build_lattice(LatticeName::E6).unwrap();
        let (o, z, t) = (
            EisensteinInt::one(),
            EisensteinInt::zero(),
            EisensteinInt::THETA,
        );
        assert_eq!(
            e6.solve_eisenstein_coefficients(&[o, o, o]),
            Some(vec![z, z, o])
        );
        assert_eq!(
            e6.solve_eisenstein_coefficients(&[t, z, z]),
            Some(vec![o, z, z])
        );
        assert_eq!(e6.solve_eisenstein_coefficients(&[o, z, z]), None);
    }

    #[test]
    fn coefficient_recovery() {
        for name in LatticeName::ALL {
            let spec = build_lattice(name).unwrap();
            let l = *spec.known_counts.keys().nth(1).unwrap();
            for v in enumerate_shell(&spec, l).unwrap().vectors.iter().take(50) {
                assert_eq!(spec.coefficients_of(&v.coords).as_ref(), Some(&v.coeffs));
            }
        }
    }
}
