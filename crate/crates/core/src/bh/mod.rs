//! Numerical checks of Bohnenblust–Hille type inequalities and the explicit
//! constructions behind them.

mod address;
mod fphi;
mod norms;
mod report;
mod tensor;
mod varopoulos;

pub use address::{address_bits, address_function, ADDRESS_MAX_D};
pub use fphi::{f_phi_build, f_phi_direct, f_phi_truth_table, fphi_key, FPHI_CAP};
pub use norms::{
    s1_to_sinfty_converged, s1_to_sinfty_lb, s1_to_sinfty_ub, sup_norm_bruteforce, BruteForceSup, S1_DENSE_CAP,
    SUP_EVAL_CAP,
};
pub use report::{InequalityReport, RATIO_GUARD};
pub use tensor::{Field, MultilinearTensor, TENSOR_ENTRY_CAP};
pub use varopoulos::{varopoulos_contractions, VaropoulosWitness, VAROPOULOS_DIM_CAP};

use crate::pauli::{bh_exponent, BooleanSpectrum, ChannelFlag, OperatorSpectrum, Spectrum, SuperopSpectrum};
use crate::{Error, Result};

/// Tolerance for inequalities expected to hold with constant 1.
pub const BH_TOL: f64 = 1e-9;

/// Trial schedule for the non-channel `S_1→S_∞` estimate.
const S1_START: usize = 64;
const S1_MAX: usize = 1 << 14;
const S1_REL_TOL: f64 = 1e-4;

fn check_degree(found: usize, bound: usize) -> Result<()> {
    if found > bound.max(1) {
        return Err(Error::DegreeExceeded { found, bound });
    }
    Ok(())
}

/// `(Σ |Φ̂|^{2d/(d+1)})^{(d+1)/2d}` against `‖Φ‖_{S_1→S_∞}`. For channels the
/// norm is 1. Otherwise (`n ≤ 3`) `rhs` is a random-search lower bound and
/// `rhs_upper` an upper bound.
pub fn bh_check_channel(phi: &SuperopSpectrum, d: usize) -> Result<InequalityReport> {
    check_degree(phi.degree(), d)?;
    let lhs = phi.pnorm(bh_exponent(d));
    let is_channel = match phi.channel_flag() {
        ChannelFlag::Yes => true,
        ChannelFlag::No => false,
        ChannelFlag::Unknown => phi.check_channel(crate::pauli::CHANNEL_TOL).is_ok(),
    };
    if is_channel {
        return Ok(InequalityReport::new("channel", d, phi.n(), Field::Complex, lhs, 1.0, BH_TOL)
            .with("regime", "channel")
            .with("degree", phi.degree()));
    }
    let (lb, trials) = s1_to_sinfty_converged(phi, S1_START, S1_MAX, S1_REL_TOL, 0)?;
    let ub = s1_to_sinfty_ub(phi)?;
    let mut r = InequalityReport::new("channel", d, phi.n(), Field::Complex, lhs, lb, BH_TOL)
        .with("regime", "superoperator")
        .with("degree", phi.degree())
        .with("s1_trials", trials);
    r.rhs_upper = Some(ub);
    Ok(r)
}

/// Boolean BH: `lhs ≤ 2^{(d−1)/d}` for `±1`-valued `f` of degree `≤ d`.
pub fn bh_check_boolean(f: &BooleanSpectrum<f64>, d: usize) -> Result<InequalityReport> {
    if !f.is_boolean(BH_TOL)? {
        return Err(Error::NotBoolean);
    }
    check_degree(f.degree(), d)?;
    let dd = d.max(1) as f64;
    let rhs = 2f64.powf((dd - 1.0) / dd);
    let lhs = f.pnorm(bh_exponent(d));
    Ok(InequalityReport::new("boolean", d, f.n(), Field::Real, lhs, rhs, BH_TOL)
        .with("degree", f.degree())
        .with("support", f.len()))
}

/// `‖M̂‖_{2d/(d+1)}` against `‖M‖_op`.
pub fn bh_check_operator(m: &OperatorSpectrum, d: usize) -> Result<InequalityReport> {
    check_degree(m.degree(), d)?;
    let lhs = m.pnorm(bh_exponent(d));
    let rhs = m.to_dense()?.op_norm();
    Ok(InequalityReport::new("operator", d, m.n(), Field::Complex, lhs, rhs, BH_TOL).with("degree", m.degree()))
}

/// `‖T̂‖_{2d/(d+1)}` against the best Varopoulos lower bound on `‖T‖_cb`.
/// Fails with an invariant error if an emitted matrix is not a contraction,
/// an evaluated norm falls below its bound, or `lhs` exceeds the Blei mixed
/// norm.
pub fn bh_cb_check(t: &MultilinearTensor) -> Result<InequalityReport> {
    let lhs = t.bh_norm();
    let blei = blei_mixed_norm(t)?;
    let mut best: f64 = 0.0;
    let mut evaluated = Vec::with_capacity(t.d());
    let mut contraction: f64 = 0.0;
    for s in 1..=t.d() {
        let w = varopoulos_contractions(t, s)?;
        if w.max_contraction_norm > 1.0 + BH_TOL {
            return Err(Error::Invariant(format!(
                "slot {s}: emitted matrix has norm {}",
                w.max_contraction_norm
            )));
        }
        if w.evaluated < w.bound - BH_TOL {
            return Err(Error::Invariant(format!(
                "slot {s}: evaluated norm {} below bound {}",
                w.evaluated, w.bound
            )));
        }
        best = best.max(w.bound);
        contraction = contraction.max(w.max_contraction_norm);
        evaluated.push(format!("{:.12e}", w.evaluated));
    }
    if lhs > blei + BH_TOL {
        return Err(Error::Invariant(format!("p-norm {lhs} exceeds Blei mixed norm {blei}")));
    }
    Ok(InequalityReport::new("cb", t.d(), t.n(), t.field(), lhs, best, BH_TOL)
        .with("blei", format!("{blei:.15e}"))
        .with("evaluated", evaluated.join(";"))
        .with("max_contraction_norm", format!("{contraction:.15e}")))
}

/// `(Π_s Σ_{i_s} √(Σ_{others} |T̂_i|²))^{1/d}`.
pub fn blei_mixed_norm(t: &MultilinearTensor) -> Result<f64> {
    let mut log_sum = 0.0;
    for s in 1..=t.d() {
        let factor: f64 = t.slot_norms(s)?.iter().sum();
        if factor == 0.0 {
            return Ok(0.0);
        }
        log_sum += factor.ln();
    }
    Ok((log_sum / t.d() as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    #[test]
    fn depolarizing_lhs() {
        let rates = ["0", "1", "2", "3"]
            .iter()
            .zip([0.7, 0.1, 0.1, 0.1])
            .map(|(s, p)| (s.parse::<PauliString>().unwrap(), p));
        let phi = SuperopSpectrum::from_pauli_rates(1, rates).unwrap();
        let r = bh_check_channel(&phi, 2).unwrap();
        let want = (0.7f64.powf(4.0 / 3.0) + 3.0 * 0.1f64.powf(4.0 / 3.0)).powf(0.75);
        assert!((r.lhs - want).abs() < 1e-12);
        assert_eq!(r.rhs, 1.0);
    }

    #[test]
    fn address_saturates() {
        for d in 2..=4 {
            let r = bh_check_boolean(&address_function(d).unwrap(), d).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-9, "d = {d}: {}", r.ratio);
        }
    }

    #[test]
    fn cb_witness_is_tight() {
        let t = MultilinearTensor::single(3, 3, &[0, 0, 0]).unwrap();
        let r = bh_cb_check(&t).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.rhs, 1.0);
    }

    #[test]
    fn degree_is_enforced() {
        let f = address_function(3).unwrap();
        assert!(matches!(bh_check_boolean(&f, 2), Err(Error::DegreeExceeded { .. })));
    }
}
