//! Dense univariate polynomials over Q and real-root isolation for real-rooted ones.
//!
//! Factorisation (squarefree decomposition, powers of x) is exact; only the final
//! bisection runs in `f64`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::arith::BigRational;
use crate::error::{Error, Result};
use crate::tolerances::ROOT_TOL;

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(
            c.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has degree 0 here as well.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn monic(&self) -> Poly {
        let l = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// `(q, r)` with `self = q·d + r`, `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let mut r = self.0.clone();
        let dl = d.lead().clone();
        let dd = d.degree();
        if self.0.len() < d.0.len() {
            return (Poly(Vec::new()), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.0.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Yun's algorithm: `self = c·Π f_i^i` with squarefree, pairwise coprime `f_i`.
    /// Returns `(f_i, i)` for the non-constant factors.
    pub fn squarefree(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.divrem(&a0).0;
        let mut c = fp.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&z) - o.0.get(k).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Real roots of a squarefree polynomial, ascending, found by isolating each root
/// between consecutive critical points and bisecting.
fn squarefree_real_roots(p: &Poly) -> Vec<f64> {
    let c = p.monic().to_f64();
    let n = c.len() - 1;
    match n {
        0 => return Vec::new(),
        1 => return vec![-c[0]],
        _ => {}
    }
    // Cauchy bound on root magnitude.
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let dp = p.derivative();
    let crit: Vec<f64> = dp
        .squarefree()
        .iter()
        .flat_map(|(f, _)| squarefree_real_roots(f))
        .filter(|x| x.abs() < bound)
        .collect();
    let mut pts = vec![-bound];
    let mut crit = crit;
    crit.sort_by(|a, b| a.total_cmp(b));
    pts.extend(crit);
    pts.push(bound);
    let mut roots = Vec::new();
    for w in pts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(&c, lo), horner(&c, hi));
        if flo == 0.0 {
            if roots
                .last()
                .is_none_or(|&r: &f64| (r - lo).abs() > ROOT_TOL)
            {
                roots.push(lo);
            }
            continue;
        }
        if fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = horner(&c, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= ROOT_TOL * mid.abs().max(1.0) {
                break;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if let Some(&last) = pts.last() {
        if horner(&c, last) == 0.0 {
            roots.push(last);
        }
    }
    roots
}

/// All real roots with multiplicity, descending.  Fails unless the number of real
/// roots found equals the degree (the polynomial must be real-rooted).
pub fn real_roots(p: &Poly) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::RootFinding("zero polynomial".into()));
    }
    // Strip the exact power of x first so zero roots are exact.
    let zeros = p.0.iter().take_while(|c| c.is_zero()).count();
    let rest = Poly::new(p.0[zeros..].to_vec());
    let mut roots = vec![0.0; zeros];
    for (f, mult) in rest.squarefree() {
        let r = squarefree_real_roots(&f);
        if r.len() != f.degree() {
            return Err(Error::RootFinding(format!(
                "found {} real roots of a degree-{} factor; polynomial coefficients {}",
                r.len(),
                f.degree(),
                coeff_list(p)
            )));
        }
        for x in r {
            roots.extend(std::iter::repeat_n(x, mult));
        }
    }
    if roots.len() != p.degree() {
        return Err(Error::RootFinding(format!(
            "found {} roots of a degree-{} polynomial; coefficients {}",
            roots.len(),
            p.degree(),
            coeff_list(p)
        )));
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

fn coeff_list(p: &Poly) -> String {
    let parts: Vec<String> = p.0.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}
