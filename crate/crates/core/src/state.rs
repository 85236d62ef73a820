//! From lattice vectors to pure states.
//!
//! A real vector `x ∈ R^{2D}` becomes `c_k = x_k + i·x_{D+k}`; an Eisenstein vector is
//! used as is.  States are stored unnormalised: the canonical representative of the
//! ray `C·c` is the ring-primitive vector whose first nonzero component lies in the
//! canonical unit sector, together with its exact squared norm.
//!
//! Qubit registers are big-endian: `|b1 b2 … bn⟩` is component `Σ b_j 2^{n-j}`
//! (0-based).  Qutrit basis states `|1⟩, |2⟩, |3⟩` are components 0, 1, 2.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    inner, norm_sq, ring_primitive_part, unit_canonicalize, BigRational, EisensteinInt,
    GaussianInt, Ring,
};
use crate::error::{Error, Result};
use crate::lattice::{LatticeName, Shell, ShellVector};

/// Canonical unnormalised pure state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PureStateExact<R: Ring> {
    pub components: Vec<R>,
    pub norm_sq: i64,
    /// Indices of the shell vectors that map to this state.
    pub provenance: Vec<usize>,
}

impl<R: Ring> PureStateExact<R> {
    /// Build the canonical state of an arbitrary nonzero vector.
    pub fn new(v: &[R]) -> Result<Self> {
        vector_to_state(v)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Short human-readable form such as `(1, -i, 0, 0)`.
    pub fn label(&self) -> String {
        let mut s = String::from("(");
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{c}");
        }
        s.push(')');
        s
    }

    /// Components as `[x, y]` integer pairs.
    pub fn pairs(&self) -> Vec<[i64; 2]> {
        self.components
            .iter()
            .map(|z| {
                let (x, y) = z.parts();
                [x, y]
            })
            .collect()
    }
}

/// `c_k = x_k + i·x_{D+k}`.
pub fn real_to_complex(x: &[i64]) -> Result<Vec<GaussianInt>> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::Dimension {
            expected: x.len() + 1,
            got: x.len(),
        });
    }
    let d = x.len() / 2;
    Ok((0..d).map(|k| GaussianInt::new(x[k], x[d + k])).collect())
}

/// Canonical state of a nonzero ring vector: divide by the ring gcd of the
/// components, then rotate by the unit that puts the leading entry in the sector.
pub fn vector_to_state<R: Ring>(v: &[R]) -> Result<PureStateExact<R>> {
    if v.iter().all(|z| z.is_zero()) {
        return Err(Error::ZeroVector);
    }
    let (components, _) = unit_canonicalize(&ring_primitive_part(v))?;
    let norm_sq = norm_sq(&components);
    Ok(PureStateExact {
        components,
        norm_sq,
        provenance: Vec::new(),
    })
}

/// Rings that shell vectors can be read into.
pub trait ShellRing: Ring {
    fn from_shell_vector(lattice: LatticeName, v: &ShellVector) -> Result<Vec<Self>>;
}

impl ShellRing for GaussianInt {
    fn from_shell_vector(lattice: LatticeName, v: &ShellVector) -> Result<Vec<Self>> {
        match lattice {
            LatticeName::E8 | LatticeName::BW16 => real_to_complex(&v.coords),
            LatticeName::E6 => Err(Error::Unsupported("E6 vectors live in Z[ω]".into())),
        }
    }
}

impl ShellRing for EisensteinInt {
    fn from_shell_vector(lattice: LatticeName, v: &ShellVector) -> Result<Vec<Self>> {
        match lattice {
            LatticeName::E6 => Ok(v.eisenstein_coords()),
            _ => Err(Error::Unsupported(format!(
                "{lattice} vectors live in Z[i]"
            ))),
        }
    }
}

/// Distinct states of one shell.
#[derive(Clone, Debug)]
pub struct StateSet<R: Ring> {
    pub lattice: LatticeName,
    pub norm: u64,
    pub shell_size: usize,
    /// Sorted by components.
    pub states: Vec<PureStateExact<R>>,
}

impl<R: Ring> StateSet<R> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn multiplicity(&self, id: usize) -> usize {
        self.states[id].provenance.len()
    }

    /// The common multiplicity if every state has the same one.
    pub fn uniform_multiplicity(&self) -> Option<usize> {
        let first = self.states.first()?.provenance.len();
        self.states
            .iter()
            .all(|s| s.provenance.len() == first)
            .then_some(first)
    }

    /// Look up a state by its canonical components.
    pub fn index(&self) -> HashMap<Vec<R>, usize> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.components.clone(), i))
            .collect()
    }

    /// A subset with fresh ids, keeping provenance.
    pub fn subset(&self, ids: &[usize]) -> StateSet<R> {
        StateSet {
            lattice: self.lattice,
            norm: self.norm,
            shell_size: ids.iter().map(|&i| self.multiplicity(i)).sum(),
            states: ids.iter().map(|&i| self.states[i].clone()).collect(),
        }
    }

    /// CSV export: `state_id,components,norm_sq,multiplicity` with components as
    /// space-separated `x:y` ring-integer pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("state_id,components,norm_sq,multiplicity\n");
        for (i, s) in self.states.iter().enumerate() {
            let comps: Vec<String> = s.pairs().iter().map(|[x, y]| format!("{x}:{y}")).collect();
            let _ = writeln!(
                out,
                "{i},{},{},{}",
                comps.join(" "),
                s.norm_sq,
                s.provenance.len()
            );
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row {
            state_id: usize,
            components: Vec<[i64; 2]>,
            norm_sq: i64,
            multiplicity: usize,
        }
        let rows: Vec<Row> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| Row {
                state_id: i,
                components: s.pairs(),
                norm_sq: s.norm_sq,
                multiplicity: s.provenance.len(),
            })
            .collect();
        serde_json::json!({
            "lattice": self.lattice.as_str(),
            "norm": self.norm,
            "ring": R::NAME,
            "states": rows,
        })
    }
}

/// Group the vectors of a shell into distinct states.
pub fn dedup<R: ShellRing>(shell: &Shell) -> Result<StateSet<R>> {
    let canon: Vec<Vec<R>> = shell
        .vectors
        .par_iter()
        .map(|v| Ok(vector_to_state(&R::from_shell_vector(shell.lattice, v)?)?.components))
        .collect::<Result<_>>()?;

    let mut groups: HashMap<Vec<R>, Vec<usize>> = HashMap::new();
    for (i, c) in canon.into_iter().enumerate() {
        groups.entry(c).or_default().push(i);
    }
    let mut states: Vec<PureStateExact<R>> = groups
        .into_iter()
        .map(|(components, provenance)| PureStateExact {
            norm_sq: norm_sq(&components),
            components,
            provenance,
        })
        .collect();
    states.sort_by(|a, b| a.components.cmp(&b.components));
    Ok(StateSet {
        lattice: shell.lattice,
        norm: shell.norm,
        shell_size: shell.len(),
        states,
    })
}

/// `|⟨ψ|χ⟩|² / (‖ψ‖²‖χ‖²)` exactly.
pub fn overlap_sq<R: Ring>(
    psi: &PureStateExact<R>,
    chi: &PureStateExact<R>,
) -> Result<BigRational> {
    overlap_sq_raw(&psi.components, &chi.components)
}

pub(crate) fn overlap_sq_raw<R: Ring>(u: &[R], v: &[R]) -> Result<BigRational> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            got: v.len(),
        });
    }
    let num = inner(u, v).norm();
    let den = BigInt::from(norm_sq(u)) * BigInt::from(norm_sq(v));
    Ok(BigRational::new(BigInt::from(num), den))
}
