//! The single-qutrit Clifford group modulo phases, its orbits on state sets, and
//! the twelve qutrit stabiliser groups and states.
//!
//! A Clifford element is stored as an Eisenstein matrix `E` and a power `k`, standing
//! for `E/θ^k` up to a global phase (`θ = i√3`).  The Hadamard gate is the Fourier
//! matrix `(ω^{jk})` over `θ`, the phase gate is `diag(1, 1, ω)`.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::arith::{EisensteinInt, Ring};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Shell};
use crate::magic::WHDisplacement;
use crate::state::{vector_to_state, PureStateExact, StateSet};

type E = EisensteinInt;

/// 3×3 Eisenstein matrix.
pub type Mat3 = [[E; 3]; 3];

/// `|C(1,3)/U(1)| = d³(d²−1)` at `d = 3`.
pub const QUTRIT_CLIFFORD_ORDER: usize = 216;

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[E::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).fold(E::zero(), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    c
}

pub fn mat_identity() -> Mat3 {
    let mut m = [[E::zero(); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = E::one();
    }
    m
}

fn mat_adjoint(a: &Mat3) -> Mat3 {
    let mut c = [[E::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

fn mat_vec(a: &Mat3, v: &[E]) -> Vec<E> {
    (0..3)
        .map(|i| (0..3).fold(E::zero(), |acc, k| acc + a[i][k] * v[k]))
        .collect()
}

fn is_scalar(a: &Mat3) -> bool {
    (0..3).all(|i| (0..3).all(|j| i == j || a[i][j].is_zero()))
        && a[0][0] == a[1][1]
        && a[1][1] == a[2][2]
}

fn from_vecs(m: &[Vec<E>]) -> Mat3 {
    let mut out = [[E::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j];
        }
    }
    out
}

/// A Clifford unitary `entries/θ^k` modulo global phase.
#[derive(Clone, Debug)]
pub struct CliffordElement {
    pub entries: Mat3,
    pub theta_power: u32,
    pub canonical_key: Vec<i64>,
}

impl PartialEq for CliffordElement {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_key == other.canonical_key
    }
}

impl Eq for CliffordElement {}

impl CliffordElement {
    pub fn new(entries: Mat3, theta_power: u32) -> Self {
        let (entries, theta_power) = reduce_theta(entries, theta_power);
        let canonical_key = canonical_key(&entries);
        Self {
            entries,
            theta_power,
            canonical_key,
        }
    }

    pub fn identity() -> Self {
        Self::new(mat_identity(), 0)
    }

    /// `F/θ`.
    pub fn hadamard() -> Self {
        let mut f = [[E::zero(); 3]; 3];
        for (j, row) in f.iter_mut().enumerate() {
            for (k, x) in row.iter_mut().enumerate() {
                *x = E::omega_pow((j * k) as i64);
            }
        }
        Self::new(f, 1)
    }

    /// `diag(1, 1, ω)`.
    pub fn phase() -> Self {
        let mut s = mat_identity();
        s[2][2] = E::OMEGA;
        Self::new(s, 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(
            mat_mul(&self.entries, &other.entries),
            self.theta_power + other.theta_power,
        )
    }

    /// `E·E† = 3^k·1`.
    pub fn is_unitary(&self) -> bool {
        let p = mat_mul(&self.entries, &mat_adjoint(&self.entries));
        let s = E::from_int(3i64.pow(self.theta_power));
        (0..3).all(|i| (0..3).all(|j| p[i][j] == if i == j { s } else { E::zero() }))
    }

    /// `U ≡ V` iff `U·V†` is an exact scalar matrix.
    pub fn phase_equal(&self, other: &Self) -> bool {
        is_scalar(&mat_mul(&self.entries, &mat_adjoint(&other.entries)))
    }
}

/// Divide by θ while every entry allows it.
fn reduce_theta(mut m: Mat3, mut k: u32) -> (Mat3, u32) {
    while k > 0 {
        let mut q = [[E::zero(); 3]; 3];
        let ok = (0..3).all(|i| {
            (0..3).all(|j| match m[i][j].div_exact(E::THETA) {
                Some(x) => {
                    q[i][j] = x;
                    true
                }
                None => false,
            })
        });
        if !ok {
            break;
        }
        m = q;
        k -= 1;
    }
    (m, k)
}

/// Multiply by the conjugate of the first nonzero entry (making it a positive
/// integer), then divide by the integer content.  The result no longer depends on
/// the global phase or on the θ-power.
fn canonical_key(m: &Mat3) -> Vec<i64> {
    let lead = m
        .iter()
        .flatten()
        .find(|z| !z.is_zero())
        .copied()
        .unwrap_or(E::one())
        .conj();
    let scaled: Vec<E> = m.iter().flatten().map(|&z| z * lead).collect();
    let (prim, _) = crate::arith::primitive_part(&scaled).expect("nonzero matrix");
    prim.iter().flat_map(|z| [z.a, z.b]).collect()
}

/// Breadth-first closure of `{H, S}`.
pub fn generate_clifford_qutrit() -> Result<Vec<CliffordElement>> {
    let gens = [CliffordElement::hadamard(), CliffordElement::phase()];
    let id = CliffordElement::identity();
    let mut seen: HashSet<Vec<i64>> = HashSet::from([id.canonical_key.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(u) = queue.pop_front() {
        for g in &gens {
            let v = u.mul(g);
            if seen.insert(v.canonical_key.clone()) {
                if out.len() >= QUTRIT_CLIFFORD_ORDER {
                    return Err(Error::ClosureTooLarge {
                        limit: QUTRIT_CLIFFORD_ORDER,
                    });
                }
                out.push(v.clone());
                queue.push_back(v);
            }
        }
    }
    Ok(out)
}

/// Check closure and inverses of a finite set under canonical multiplication.
pub fn check_group_axioms(group: &[CliffordElement]) -> bool {
    let keys: HashSet<&Vec<i64>> = group.iter().map(|g| &g.canonical_key).collect();
    let id = CliffordElement::identity().canonical_key;
    group.iter().all(|a| {
        let mut has_inverse = false;
        for b in group {
            let p = a.mul(b);
            if !keys.contains(&p.canonical_key) {
                return false;
            }
            has_inverse |= p.canonical_key == id;
        }
        has_inverse
    })
}

/// `U·ψ` as a canonical state.
pub fn act(u: &CliffordElement, psi: &PureStateExact<E>) -> Result<PureStateExact<E>> {
    if psi.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: psi.dim(),
        });
    }
    vector_to_state(&mat_vec(&u.entries, &psi.components))
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub representative: usize,
    pub members: Vec<usize>,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Partition a qutrit state set into orbits of `group`, largest first.
pub fn orbit_partition(set: &StateSet<E>, group: &[CliffordElement]) -> Result<Vec<Orbit>> {
    let index = set.index();
    let mut assigned = vec![false; set.len()];
    let mut orbits = Vec::new();
    for rep in 0..set.len() {
        if assigned[rep] {
            continue;
        }
        let mut members = Vec::new();
        for u in group {
            let img = act(u, &set.states[rep])?;
            let Some(&id) = index.get(&img.components) else {
                return Err(Error::OrbitEscape { state: img.label() });
            };
            if !assigned[id] {
                assigned[id] = true;
                members.push(id);
            }
        }
        members.sort_unstable();
        orbits.push(Orbit {
            representative: rep,
            members,
        });
    }
    orbits.sort_by(|a, b| {
        b.size()
            .cmp(&a.size())
            .then(a.representative.cmp(&b.representative))
    });
    Ok(orbits)
}

/// `⟨ω^s·D_{a1,a2}⟩`.
#[derive(Clone, Debug)]
pub struct StabiliserGroupQutrit {
    pub phase_power: u32,
    pub displacement: WHDisplacement,
    /// `1, ŝ, ŝ²`.
    pub elements: [Mat3; 3],
}

impl StabiliserGroupQutrit {
    pub fn new(phase_power: u32, a1: u32, a2: u32) -> Result<Self> {
        let displacement = WHDisplacement::new(3, a1, a2);
        let d = from_vecs(&displacement.matrix::<E>()?);
        let w = E::omega_pow(phase_power as i64);
        let mut s = d;
        for row in s.iter_mut() {
            for x in row.iter_mut() {
                *x = w * *x;
            }
        }
        let s2 = mat_mul(&s, &s);
        let name = format!("ω^{phase_power}·{displacement}");
        if is_scalar(&s) || is_scalar(&s2) {
            return Err(Error::ScalarInGroup(name));
        }
        if mat_mul(&s2, &s) != mat_identity() {
            return Err(Error::Invariant(format!("{name} does not have order 3")));
        }
        Ok(Self {
            phase_power,
            displacement,
            elements: [mat_identity(), s, s2],
        })
    }

    pub fn generator(&self) -> &Mat3 {
        &self.elements[1]
    }

    /// Elements pairwise commute (always true for a cyclic group; checked anyway).
    pub fn is_abelian(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| mat_mul(a, b) == mat_mul(b, a)))
    }
}

/// The twelve groups `⟨ω^s D⟩`, `D ∈ {D10, D01, D11, D12}`, `s = 0, 1, 2`.
pub fn stabiliser_groups_qutrit() -> Result<Vec<StabiliserGroupQutrit>> {
    let mut out = Vec::with_capacity(12);
    for (a1, a2) in [(1, 0), (0, 1), (1, 1), (1, 2)] {
        for s in 0..3 {
            out.push(StabiliserGroupQutrit::new(s, a1, a2)?);
        }
    }
    Ok(out)
}

/// The +1 eigenvector of `ŝ`, from the projector `1 + ŝ + ŝ²`.
pub fn stabiliser_state(group: &StabiliserGroupQutrit) -> Result<PureStateExact<E>> {
    let [a, b, c] = &group.elements;
    let mut p = [[E::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            p[i][j] = a[i][j] + b[i][j] + c[i][j];
        }
    }
    for j in 0..3 {
        let col: Vec<E> = (0..3).map(|i| p[i][j]).collect();
        if col.iter().any(|z| !z.is_zero()) {
            return vector_to_state(&col);
        }
    }
    Err(Error::Invariant("stabiliser projector vanishes".into()))
}

/// Outcome of matching stabiliser states against the shortest E6 vectors.
#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub holds: bool,
    /// Shell vectors reproduced.
    pub covered: usize,
    pub shell_size: usize,
    /// Coefficients `β` of the norm-3 representative of each state (None when the
    /// state has no lattice representative of norm 3).
    pub betas: Vec<Option<Vec<[i64; 2]>>>,
    /// Shell vectors not reached, as Eisenstein coordinate pairs.
    pub missing: Vec<Vec<i64>>,
    /// Produced vectors that are not in the shell.
    pub extra: Vec<Vec<i64>>,
    pub unsolved: Vec<String>,
}

/// Scale each state to squared norm 3, solve `β·M = u·c` for every unit `u`, and
/// compare the resulting vectors with the E6 shell of norm 3.
pub fn verify_e6_correspondence(
    spec: &LatticeSpec,
    shell: &Shell,
    states: &[PureStateExact<E>],
) -> CorrespondenceReport {
    let shell_set: HashSet<Vec<i64>> = shell.vectors.iter().map(|v| v.coords.clone()).collect();
    let mut produced: HashSet<Vec<i64>> = HashSet::new();
    let mut betas = Vec::new();
    let mut unsolved = Vec::new();
    for s in states {
        let base: Vec<E> = match s.norm_sq {
            3 => s.components.clone(),
            1 => s.components.iter().map(|&z| E::THETA * z).collect(),
            _ => {
                betas.push(None);
                unsolved.push(s.label());
                continue;
            }
        };
        let mut first = None;
        for u in E::units() {
            let target: Vec<E> = base.iter().map(|&z| u * z).collect();
            match spec.solve_eisenstein_coefficients(&target) {
                Some(beta) => {
                    if first.is_none() {
                        first = Some(beta.iter().map(|z| [z.a, z.b]).collect());
                    }
                    produced.insert(target.iter().flat_map(|z| [z.a, z.b]).collect());
                }
                None => unsolved.push(format!("{} (unit {u})", s.label())),
            }
        }
        betas.push(first);
    }
    let mut missing: Vec<Vec<i64>> = shell_set.difference(&produced).cloned().collect();
    let mut extra: Vec<Vec<i64>> = produced.difference(&shell_set).cloned().collect();
    missing.sort();
    extra.sort();
    let covered = produced.intersection(&shell_set).count();
    CorrespondenceReport {
        holds: missing.is_empty() && extra.is_empty() && unsolved.is_empty(),
        covered,
        shell_size: shell.len(),
        betas,
        missing,
        extra,
        unsolved,
    }
}

/// Index clifford elements by key, for callers that need lookups.
pub fn key_index(group: &[CliffordElement]) -> HashMap<Vec<i64>, usize> {
    group
        .iter()
        .enumerate()
        .map(|(i, g)| (g.canonical_key.clone(), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(v: [E; 3]) -> PureStateExact<E> {
        vector_to_state(&v).unwrap()
    }

    #[test]
    fn group_has_216_elements() {
        let g = generate_clifford_qutrit().unwrap();
        assert_eq!(g.len(), 216);
        assert!(g
            .iter()
            .any(|u| u.phase_equal(&CliffordElement::identity())));
        assert!(g.iter().all(|u| u.is_unitary()));
    }

    #[test]
    fn hadamard_squared_swaps_last_two() {
        let h = CliffordElement::hadamard();
        let h2 = h.mul(&h);
        let (o, z) = (E::one(), E::zero());
        assert_eq!(act(&h2, &st([o, z, z])).unwrap().components, vec![o, z, z]);
        assert_eq!(act(&h2, &st([z, o, z])).unwrap().components, vec![z, z, o]);
        assert_eq!(act(&h2, &st([z, z, o])).unwrap().components, vec![z, o, z]);
    }

    #[test]
    fn act_examples() {
        let (o, z) = (E::one(), E::zero());
        let psi = st([o, o, z]);
        assert_eq!(act(&CliffordElement::identity(), &psi).unwrap(), psi);
        assert_eq!(
            act(&CliffordElement::phase(), &psi).unwrap().components,
            psi.components
        );
        let h = act(&CliffordElement::hadamard(), &st([o, z, z])).unwrap();
        assert_eq!(h.components, vec![o, o, o]);
    }

    #[test]
    fn stabiliser_group_examples() {
        let groups = stabiliser_groups_qutrit().unwrap();
        assert_eq!(groups.len(), 12);
        assert!(groups.iter().all(|g| g.is_abelian()));
        let s4 = &groups[3];
        let w = E::OMEGA;
        assert_eq!(s4.generator()[1][1], w);
        assert_eq!(s4.generator()[2][2], w * w);
        assert!(matches!(
            StabiliserGroupQutrit::new(1, 0, 0),
            Err(Error::ScalarInGroup(_))
        ));
    }

    #[test]
    fn stabiliser_state_examples() {
        let groups = stabiliser_groups_qutrit().unwrap();
        let (o, z) = (E::one(), E::zero());
        assert_eq!(
            stabiliser_state(&groups[0]).unwrap().components,
            vec![o, o, o]
        );
        assert_eq!(
            stabiliser_state(&groups[3]).unwrap().components,
            vec![o, z, z]
        );
    }
}
