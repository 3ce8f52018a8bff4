use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::tensor::{Field, MultilinearTensor};
use crate::pauli::{BooleanSpectrum, SuperopSpectrum};
use crate::random::gaussian_c64;
use crate::rng::stream;
use crate::{Error, Result, C64};

/// Default number of vertex evaluations allowed in a brute-force sup norm.
pub const SUP_EVAL_CAP: u64 = 1 << 22;
/// Largest `n` for the dense `S_1→S_∞` estimates.
pub const S1_DENSE_CAP: usize = 3;

const REFINE_STEPS: usize = 50;
const REFINE_TOL: f64 = 1e-13;

/// Objects whose sup norm over the `±1` cube can be found by enumeration.
pub trait BruteForceSup {
    fn sup_bruteforce(&self, cap: u64) -> Result<f64>;
}

/// Exact maximum of `|T|` over all `±1` assignments, within [`SUP_EVAL_CAP`].
pub fn sup_norm_bruteforce<T: BruteForceSup + ?Sized>(object: &T) -> Result<f64> {
    object.sup_bruteforce(SUP_EVAL_CAP)
}

impl BruteForceSup for MultilinearTensor {
    fn sup_bruteforce(&self, cap: u64) -> Result<f64> {
        let (n, d) = (self.n(), self.d());
        let bits = n * d;
        if bits >= 64 || (1u64 << bits) > cap {
            return Err(Error::CapExceeded {
                what: "brute-force sup norm vertices",
                n: bits,
                cap: cap.ilog2() as usize,
            });
        }
        let outer = 1u64 << (n * (d - 1));
        let mut best: f64 = 0.0;
        let mut x = vec![0u64; d];
        for code in 0..outer {
            for (t, slot) in x.iter_mut().take(d - 1).enumerate() {
                *slot = (code >> (n * t)) & ((1u64 << n) - 1);
            }
            // contract the first d-1 blocks, leaving the coefficients of x_d
            let mut v = self.entries().to_vec();
            let mut width = v.len();
            for &xt in x.iter().take(d - 1) {
                width /= n;
                let mut next = vec![C64::new(0.0, 0.0); width];
                for i in 0..n {
                    let sign = if xt >> i & 1 == 1 { -1.0 } else { 1.0 };
                    for (k, out) in next.iter_mut().enumerate() {
                        *out += v[i * width + k] * sign;
                    }
                }
                v = next;
            }
            let m = match self.field() {
                // max over signs of a real linear form is its ℓ1 norm
                Field::Real => v.iter().map(|c| c.re.abs()).sum(),
                Field::Complex => (0..1u64 << n)
                    .map(|xd| {
                        v.iter()
                            .enumerate()
                            .map(|(i, c)| if xd >> i & 1 == 1 { -c } else { *c })
                            .sum::<C64>()
                            .norm()
                    })
                    .fold(0.0, f64::max),
            };
            best = best.max(m);
        }
        Ok(best)
    }
}

impl BruteForceSup for BooleanSpectrum<f64> {
    fn sup_bruteforce(&self, cap: u64) -> Result<f64> {
        if self.n() >= 64 || (1u64 << self.n()) > cap {
            return Err(Error::CapExceeded {
                what: "brute-force sup norm points",
                n: self.n(),
                cap: cap.ilog2() as usize,
            });
        }
        self.sup_norm()
    }
}

impl BruteForceSup for BooleanSpectrum<C64> {
    fn sup_bruteforce(&self, cap: u64) -> Result<f64> {
        if self.n() >= 64 || (1u64 << self.n()) > cap {
            return Err(Error::CapExceeded {
                what: "brute-force sup norm points",
                n: self.n(),
                cap: cap.ilog2() as usize,
            });
        }
        Ok(self.to_truth_table()?.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

/// Choi matrix as `J[(p,i),(q,j)]` with `Φ(|i⟩⟨j|)[p,q] = J[p·N+i, q·N+j]`.
struct DenseMap {
    dim: usize,
    j: DMatrix<C64>,
}

impl DenseMap {
    fn new(phi: &SuperopSpectrum) -> Result<Self> {
        if phi.n() > S1_DENSE_CAP {
            return Err(Error::CapExceeded {
                what: "dense S1→S∞ estimate",
                n: phi.n(),
                cap: S1_DENSE_CAP,
            });
        }
        Ok(Self {
            dim: 1 << phi.n(),
            j: phi.choi_matrix()?,
        })
    }

    fn at(&self, p: usize, i: usize, q: usize, j: usize) -> C64 {
        self.j[(p * self.dim + i, q * self.dim + j)]
    }

    /// `Φ(|u⟩⟨v|)`.
    fn apply_rank_one(&self, u: &DVector<C64>, v: &DVector<C64>) -> DMatrix<C64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |p, q| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    s += u[i] * v[j].conj() * self.at(p, i, q, j);
                }
            }
            s
        })
    }

    /// `Z` with `⟨a|Φ(|u⟩⟨v|)|b⟩ = Σ u_i Z_ij conj(v_j)`.
    fn dual(&self, a: &DVector<C64>, b: &DVector<C64>) -> DMatrix<C64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for p in 0..n {
                for q in 0..n {
                    s += a[p].conj() * b[q] * self.at(p, i, q, j);
                }
            }
            s
        })
    }

    /// Alternating maximisation of `|⟨a|Φ(|u⟩⟨v|)|b⟩|` from a given start.
    fn refine(&self, mut u: DVector<C64>, mut v: DVector<C64>) -> f64 {
        let mut best = 0.0;
        for _ in 0..REFINE_STEPS {
            let (s, a, b) = top_singular(&self.apply_rank_one(&u, &v));
            if s <= best + REFINE_TOL {
                best = best.max(s);
                break;
            }
            best = s;
            let (_, p, q) = top_singular(&self.dual(&a, &b));
            u = p.map(|c| c.conj());
            v = q.map(|c| c.conj());
        }
        best
    }
}

/// Largest singular value with its left and right singular vectors.
fn top_singular(m: &DMatrix<C64>) -> (f64, DVector<C64>, DVector<C64>) {
    let svd = m.clone().svd(true, true);
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (k, &s)| if s > acc.1 { (k, s) } else { acc });
    let u = svd.u.expect("requested").column(k).into_owned();
    let v = svd.v_t.expect("requested").row(k).adjoint();
    (s, u, v)
}

fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| gaussian_c64(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Lower bound on `‖Φ‖_{S_1→S_∞}`: the best `‖Φ(|u⟩⟨v|)‖_op` over `trials`
/// random unit `u, v`, each locally improved by alternating singular-vector
/// updates. Every value reported is attained, so the result never exceeds
/// the true norm.
pub fn s1_to_sinfty_lb(phi: &SuperopSpectrum, trials: usize, seed: u64) -> Result<f64> {
    let map = DenseMap::new(phi)?;
    let mut rng = stream(seed, 0);
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let u = random_unit(map.dim, &mut rng);
        let v = random_unit(map.dim, &mut rng);
        best = best.max(map.refine(u, v));
    }
    Ok(best)
}

/// Doubles the trial count from `start` until the lower bound changes by less
/// than `rel_tol` relative over one doubling, or `max_trials` is reached.
/// Returns the bound and the trials spent.
pub fn s1_to_sinfty_converged(
    phi: &SuperopSpectrum,
    start: usize,
    max_trials: usize,
    rel_tol: f64,
    seed: u64,
) -> Result<(f64, usize)> {
    let map = DenseMap::new(phi)?;
    let mut rng = stream(seed, 0);
    let mut best: f64 = 0.0;
    let mut done = 0usize;
    let mut target = start.max(1);
    loop {
        let before = best;
        while done < target {
            let u = random_unit(map.dim, &mut rng);
            let v = random_unit(map.dim, &mut rng);
            best = best.max(map.refine(u, v));
            done += 1;
        }
        let converged = done > start && (best - before) <= rel_tol * best.abs().max(f64::MIN_POSITIVE);
        if converged || done >= max_trials {
            return Ok((best, done));
        }
        target = (2 * done).min(max_trials);
    }
}

/// Upper bound on `‖Φ‖_{S_1→S_∞}`: the smaller of `Σ|Φ̂(x,y)|` and the
/// Hilbert–Schmidt operator norm of the map.
pub fn s1_to_sinfty_ub(phi: &SuperopSpectrum) -> Result<f64> {
    let map = DenseMap::new(phi)?;
    let l1: f64 = phi.iter().map(|(_, c)| c.norm()).sum();
    let n = map.dim;
    let s = DMatrix::from_fn(n * n, n * n, |r, c| map.at(r / n, c / n, r % n, c % n));
    Ok(l1.min(s.singular_values().max()))
}
