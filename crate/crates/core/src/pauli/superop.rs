use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use super::dense::{log2_exact, Caps, DenseOperator};
use super::operator::{spectrum_of_operator, OperatorSpectrum};
use super::string::{strings_up_to_weight, BasisAction, PauliString};
use super::{Spectrum, ZERO_TOL};
use crate::{Error, Result, C64};

/// Tolerance used when validating CPTP inputs.
pub const CHANNEL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelFlag {
    Yes,
    No,
    Unknown,
}

/// Ways to hand a superoperator to [`spectrum_of_superop`].
#[derive(Clone, Debug)]
pub enum ChannelInput {
    Kraus(Vec<DenseOperator>),
    /// `J(Φ) = Σ_{ij} Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, channel acting on the first factor.
    Choi(DMatrix<C64>),
    /// `Φ(ρ) = Σ_k A_k ρ B_k`; never flagged as a channel.
    Pairs(Vec<(DenseOperator, DenseOperator)>),
}

/// Sparse expansion `Φ = Σ_{x,y} Φ̂(x,y) σ_x · σ_y`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperopSpectrum {
    n: usize,
    coeffs: BTreeMap<(PauliString, PauliString), C64>,
    degree: usize,
    channel: ChannelFlag,
}

impl SuperopSpectrum {
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = ((PauliString, PauliString), C64)>,
        channel: ChannelFlag,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        let mut coeffs: BTreeMap<(PauliString, PauliString), C64> = BTreeMap::new();
        for ((x, y), c) in entries {
            for p in [&x, &y] {
                if p.n() != n {
                    return Err(Error::QubitMismatch {
                        expected: n,
                        found: p.n(),
                    });
                }
            }
            *coeffs.entry((x, y)).or_default() += c;
        }
        coeffs.retain(|_, c| c.norm() >= ZERO_TOL);
        let degree = coeffs
            .keys()
            .map(|(x, y)| x.weight() + y.weight())
            .max()
            .unwrap_or(0);
        let out = Self {
            n,
            coeffs,
            degree,
            channel,
        };
        if channel == ChannelFlag::Yes {
            out.check_channel(CHANNEL_TOL)?;
        }
        Ok(out)
    }

    pub fn identity_channel(n: usize) -> Self {
        let id = PauliString::identity(n);
        Self::new(n, [((id.clone(), id), C64::new(1.0, 0.0))], ChannelFlag::Yes).expect("valid")
    }

    /// Pauli channel `ρ ↦ Σ_x p(x) σ_x ρ σ_x`.
    pub fn from_pauli_rates(n: usize, rates: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let rates: Vec<_> = rates.into_iter().collect();
        if let Some((x, p)) = rates.iter().find(|(_, p)| *p < -CHANNEL_TOL || !p.is_finite()) {
            return Err(Error::NotCptp(format!("negative rate {p} on {x}")));
        }
        Self::new(
            n,
            rates.into_iter().map(|(x, p)| ((x.clone(), x), C64::new(p, 0.0))),
            ChannelFlag::Yes,
        )
    }

    /// Conjugation `ρ ↦ UρU*` given the spectrum of `U`; checks `U*U = I`.
    pub fn from_unitary(u: &OperatorSpectrum) -> Result<Self> {
        let uu = u.adjoint().mul(u)?;
        let dev = uu.l2_distance(&OperatorSpectrum::identity(u.n()));
        if dev > CHANNEL_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Self::from_kraus_spectra(&[u.clone()], true)
    }

    /// `Φ̂(x,y) = Σ_k K̂_k(x) conj(K̂_k(y))`, with trace preservation checked
    /// algebraically when `require_channel` is set.
    pub fn from_kraus_spectra(kraus: &[OperatorSpectrum], require_channel: bool) -> Result<Self> {
        let n = kraus.first().ok_or(Error::EmptyInput("Kraus list"))?.n();
        let mut entries = Vec::new();
        for k in kraus {
            if k.n() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    found: k.n(),
                });
            }
            for (x, a) in k.iter() {
                for (y, b) in k.iter() {
                    entries.push(((x.clone(), y.clone()), a * b.conj()));
                }
            }
        }
        let mut s = Self::new(n, entries, ChannelFlag::Unknown)?;
        match s.check_channel(CHANNEL_TOL) {
            Ok(()) => s.channel = ChannelFlag::Yes,
            Err(e) if require_channel => return Err(e),
            Err(_) => s.channel = ChannelFlag::No,
        }
        Ok(s)
    }

    /// `ρ ↦ ρ·M`, the map whose `S_1 → S_∞` norm is `‖M‖_op`.
    pub fn right_multiplication(m: &OperatorSpectrum) -> Self {
        let id = PauliString::identity(m.n());
        Self::new(
            m.n(),
            m.iter().map(|(y, c)| ((id.clone(), y.clone()), *c)),
            ChannelFlag::Unknown,
        )
        .expect("same shape")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channel_flag(&self) -> ChannelFlag {
        self.channel
    }

    pub fn get(&self, x: &PauliString, y: &PauliString) -> C64 {
        // avoid cloning into a tuple key for the common miss
        self.coeffs
            .get(&(x.clone(), y.clone()))
            .copied()
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(PauliString, PauliString), &C64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// All strings appearing in some key, sorted.
    pub fn support_strings(&self) -> Vec<PauliString> {
        let set: BTreeSet<&PauliString> = self.coeffs.keys().flat_map(|(x, y)| [x, y]).collect();
        set.into_iter().cloned().collect()
    }

    /// Real parts of the diagonal `Φ̂(x,x)`, keyed by `x`.
    pub fn diagonal(&self) -> BTreeMap<PauliString, f64> {
        self.coeffs
            .iter()
            .filter(|((x, y), _)| x == y)
            .map(|((x, _), c)| (x.clone(), c.re))
            .collect()
    }

    pub fn trace(&self) -> C64 {
        self.coeffs
            .iter()
            .filter(|((x, y), _)| x == y)
            .map(|(_, c)| *c)
            .sum()
    }

    /// Diagonal in the Pauli basis and flagged as a channel.
    pub fn is_pauli_channel(&self) -> bool {
        self.channel == ChannelFlag::Yes && self.coeffs.keys().all(|(x, y)| x == y)
    }

    /// `Σ_{x,y} Φ̂(x,y) σ_y σ_x`, the operator whose trace against `ρ` is `Tr Φ(ρ)`.
    pub fn trace_operator(&self) -> OperatorSpectrum {
        let entries = self.coeffs.iter().map(|((x, y), c)| {
            let (z, ph) = y.mul(x);
            (z, c * ph)
        });
        OperatorSpectrum::new(self.n, entries.collect::<Vec<_>>()).expect("same shape")
    }

    /// The coefficient matrix restricted to its support strings.
    pub fn support_matrix(&self) -> (Vec<PauliString>, DMatrix<C64>) {
        let keys = self.support_strings();
        let index: BTreeMap<&PauliString, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut m = DMatrix::zeros(keys.len(), keys.len());
        for ((x, y), c) in &self.coeffs {
            m[(index[x], index[y])] = *c;
        }
        (keys, m)
    }

    /// Verifies the channel invariants: the coefficient matrix is Hermitian PSD
    /// with unit trace, and the map is trace preserving.
    pub fn check_channel(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::NotCptp(format!("trace of coefficient matrix is {tr}")));
        }
        let (_, m) = self.support_matrix();
        let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > tol {
            return Err(Error::NotCptp(format!("coefficient matrix not Hermitian ({herm:.3e})")));
        }
        let h = (&m + m.adjoint()).scale(0.5);
        let min = h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(Error::NotCptp(format!("coefficient matrix has eigenvalue {min:.3e}")));
        }
        let dev = self
            .trace_operator()
            .l2_distance(&OperatorSpectrum::identity(self.n));
        if dev > tol {
            return Err(Error::NotCptp(format!("not trace preserving ({dev:.3e})")));
        }
        Ok(())
    }

    /// `‖Φ̂ − Ψ̂‖_2` over all pairs.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for (k, c) in &self.coeffs {
            s += (c - other.coeffs.get(k).copied().unwrap_or_default()).norm_sqr();
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                s += c.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Applies the map to a dense operator.
    pub fn apply(&self, m: &DenseOperator) -> Result<DenseOperator> {
        if m.n() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: m.n(),
            });
        }
        let dim = m.dim();
        let src = m.matrix();
        let mut out = DMatrix::<C64>::zeros(dim, dim);
        for ((x, y), c) in &self.coeffs {
            let ax = BasisAction::new(x);
            let ay = BasisAction::new(y);
            // (σ_x M σ_y)[a,b] = ph_x(a⊕fx) ph_y(b) M[a⊕fx, b⊕fy]
            for a in 0..dim {
                let (_, pa) = ax.apply(a ^ ax.flip());
                for b in 0..dim {
                    let (bb, pb) = ay.apply(b);
                    out[(a, b)] += c * pa * pb * src[(a ^ ax.flip(), bb)];
                }
            }
        }
        DenseOperator::new(out)
    }

    /// Dense Choi matrix `J(Φ)` of size `4^n`.
    pub fn choi_matrix(&self) -> Result<DMatrix<C64>> {
        let cap = Caps::default().choi_qubits;
        if self.n > cap {
            return Err(Error::CapExceeded {
                what: "dense Choi matrix",
                n: self.n,
                cap,
            });
        }
        let dim = 1usize << self.n;
        let mut j = DMatrix::zeros(dim * dim, dim * dim);
        for ((x, y), c) in &self.coeffs {
            let ax = BasisAction::new(x);
            let ay = BasisAction::new(y);
            for i in 0..dim {
                let (a, pa) = ax.apply(i);
                for jj in 0..dim {
                    let (b, pb) = ay.apply(jj);
                    j[(a * dim + i, b * dim + jj)] += c * pa * pb.conj();
                }
            }
        }
        Ok(j)
    }
}

impl Spectrum for SuperopSpectrum {
    fn moduli(&self) -> Vec<f64> {
        self.coeffs.values().map(|c| c.norm()).collect()
    }

    fn degree(&self) -> usize {
        self.degree
    }
}

/// Pauli coefficients of a superoperator given as Kraus operators, a Choi
/// matrix or an explicit pair form. With `require_channel`, non-CPTP input is
/// rejected; otherwise the channel flag records what was found.
pub fn spectrum_of_superop(input: &ChannelInput, require_channel: bool) -> Result<SuperopSpectrum> {
    match input {
        ChannelInput::Kraus(ks) => {
            let n = ks.first().ok_or(Error::EmptyInput("Kraus list"))?.n();
            let mut sum = DMatrix::<C64>::zeros(1 << n, 1 << n);
            for k in ks {
                if k.n() != n {
                    return Err(Error::QubitMismatch {
                        expected: n,
                        found: k.n(),
                    });
                }
                sum += k.matrix().adjoint() * k.matrix();
            }
            let tp_dev = (sum - DMatrix::identity(1 << n, 1 << n))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if require_channel && tp_dev > CHANNEL_TOL {
                return Err(Error::NotCptp(format!("Σ K*K deviates from I by {tp_dev:.3e}")));
            }
            let spectra: Vec<_> = ks.iter().map(spectrum_of_operator).collect();
            SuperopSpectrum::from_kraus_spectra(&spectra, require_channel)
        }
        ChannelInput::Choi(j) => spectrum_of_choi(j, require_channel),
        ChannelInput::Pairs(pairs) => {
            let n = pairs.first().ok_or(Error::EmptyInput("pair list"))?.0.n();
            let mut entries = Vec::new();
            for (a, b) in pairs {
                if a.n() != n || b.n() != n {
                    return Err(Error::QubitMismatch {
                        expected: n,
                        found: a.n().max(b.n()),
                    });
                }
                let sa = spectrum_of_operator(a);
                let sb = spectrum_of_operator(b);
                for (x, ca) in sa.iter() {
                    for (y, cb) in sb.iter() {
                        entries.push(((x.clone(), y.clone()), ca * cb));
                    }
                }
            }
            let s = SuperopSpectrum::new(n, entries, ChannelFlag::Unknown)?;
            if require_channel {
                s.check_channel(CHANNEL_TOL)?;
                return SuperopSpectrum::new(n, s.coeffs, ChannelFlag::Yes);
            }
            Ok(s)
        }
    }
}

/// `Φ̂(x,y) = ⟨v_x|J|v_y⟩/N` with `|v_x⟩ = (σ_x ⊗ I)|Ω⟩/√N`.
fn spectrum_of_choi(j: &DMatrix<C64>, require_channel: bool) -> Result<SuperopSpectrum> {
    if j.nrows() != j.ncols() {
        return Err(Error::ShapeMismatch("Choi matrix is not square".into()));
    }
    let n2 = log2_exact(j.nrows())?;
    if n2 % 2 != 0 || n2 == 0 {
        return Err(Error::ShapeMismatch(format!("Choi dimension {} is not 4^n", j.nrows())));
    }
    let n = n2 / 2;
    let cap = Caps::default().choi_qubits;
    if n > cap {
        return Err(Error::CapExceeded {
            what: "dense Choi matrix",
            n,
            cap,
        });
    }
    let dim = 1usize << n;
    let keys = strings_up_to_weight(n, n);
    let actions: Vec<_> = keys.iter().map(BasisAction::new).collect();
    // Z[:, y] = J · (√N |v_y⟩)
    let mut z = DMatrix::<C64>::zeros(dim * dim, keys.len());
    for (yi, ay) in actions.iter().enumerate() {
        for jj in 0..dim {
            let (b, pb) = ay.apply(jj);
            let col = b * dim + jj;
            for r in 0..dim * dim {
                z[(r, yi)] += j[(r, col)] * pb;
            }
        }
    }
    let norm = 1.0 / (dim * dim) as f64;
    let mut entries = Vec::new();
    for (xi, ax) in actions.iter().enumerate() {
        for yi in 0..keys.len() {
            let mut acc = C64::default();
            for i in 0..dim {
                let (a, pa) = ax.apply(i);
                acc += pa.conj() * z[(a * dim + i, yi)];
            }
            entries.push(((keys[xi].clone(), keys[yi].clone()), acc * norm));
        }
    }
    let mut s = SuperopSpectrum::new(n, entries, ChannelFlag::Unknown)?;
    let herm = (j - j.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cp = herm <= CHANNEL_TOL && {
        let h = (j + j.adjoint()).scale(0.5);
        h.symmetric_eigenvalues().iter().all(|&e| e >= -CHANNEL_TOL)
    };
    let cptp = cp && s.check_channel(CHANNEL_TOL).is_ok();
    if require_channel && !cptp {
        return Err(Error::NotCptp("Choi matrix is not CPTP".into()));
    }
    s.channel = if cptp { ChannelFlag::Yes } else { ChannelFlag::No };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn amplitude_damping(g: f64) -> Vec<DenseOperator> {
        let z = c(0.0, 0.0);
        vec![
            DenseOperator::from_rows(&[&[c(1.0, 0.0), z], &[z, c((1.0 - g).sqrt(), 0.0)]]).unwrap(),
            DenseOperator::from_rows(&[&[z, c(g.sqrt(), 0.0)], &[z, z]]).unwrap(),
        ]
    }

    /// Independent route: build `J` entrywise from Kraus operators.
    fn choi_from_kraus(ks: &[DenseOperator]) -> DMatrix<C64> {
        let dim = ks[0].dim();
        let mut j = DMatrix::zeros(dim * dim, dim * dim);
        for k in ks {
            let m = k.matrix();
            for a in 0..dim {
                for i in 0..dim {
                    for b in 0..dim {
                        for jj in 0..dim {
                            j[(a * dim + i, b * dim + jj)] += m[(a, i)] * m[(b, jj)].conj();
                        }
                    }
                }
            }
        }
        j
    }

    #[test]
    fn identity_channel_from_kraus() {
        let s = spectrum_of_superop(&ChannelInput::Kraus(vec![DenseOperator::identity(1).unwrap()]), true).unwrap();
        assert_eq!(s, SuperopSpectrum::identity_channel(1));
        assert_eq!(s.degree(), 0);
    }

    #[test]
    fn depolarizing_is_diagonal() {
        let p: f64 = 0.3;
        let ks: Vec<_> = ["0", "1", "2", "3"]
            .iter()
            .zip([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
            .map(|(x, w)| {
                let m = DenseOperator::pauli(&ps(x)).unwrap().into_matrix().scale(w.sqrt());
                DenseOperator::new(m).unwrap()
            })
            .collect();
        let s = spectrum_of_superop(&ChannelInput::Kraus(ks), true).unwrap();
        let want = SuperopSpectrum::from_pauli_rates(
            1,
            [(ps("0"), 0.7), (ps("1"), 0.1), (ps("2"), 0.1), (ps("3"), 0.1)],
        )
        .unwrap();
        assert!(s.l2_distance(&want) < 1e-12);
        assert!(s.is_pauli_channel());
        assert_eq!(s.degree(), 2);
    }

    #[test]
    fn amplitude_damping_matches_choi_route() {
        let ks = amplitude_damping(0.5);
        let via_kraus = spectrum_of_superop(&ChannelInput::Kraus(ks.clone()), true).unwrap();
        let via_choi = spectrum_of_superop(&ChannelInput::Choi(choi_from_kraus(&ks)), true).unwrap();
        assert!(via_kraus.l2_distance(&via_choi) < 1e-12);
        assert_eq!(via_choi.channel_flag(), ChannelFlag::Yes);
        // closed form: a = (1+√(1−γ))/2, b = (1−√(1−γ))/2
        let r = 0.5f64.sqrt();
        let (a, b) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        let checks = [
            ("0", "0", c(a * a, 0.0)),
            ("3", "3", c(b * b, 0.0)),
            ("0", "3", c(0.125, 0.0)),
            ("3", "0", c(0.125, 0.0)),
            ("1", "1", c(0.125, 0.0)),
            ("2", "2", c(0.125, 0.0)),
            ("1", "2", c(0.0, -0.125)),
            ("2", "1", c(0.0, 0.125)),
        ];
        for (x, y, v) in checks {
            assert!((via_kraus.get(&ps(x), &ps(y)) - v).norm() < 1e-12, "{x},{y}");
        }
        assert_eq!(via_kraus.len(), 8);
        assert!(via_kraus.choi_matrix().unwrap().iter().zip(choi_from_kraus(&ks).iter()).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn apply_matches_kraus() {
        let ks = amplitude_damping(0.3);
        let s = spectrum_of_superop(&ChannelInput::Kraus(ks.clone()), true).unwrap();
        let rho = DenseOperator::from_rows(&[&[c(0.2, 0.0), c(0.1, 0.3)], &[c(0.1, -0.3), c(0.8, 0.0)]]).unwrap();
        let mut want = DMatrix::zeros(2, 2);
        for k in &ks {
            want += k.matrix() * rho.matrix() * k.matrix().adjoint();
        }
        let got = s.apply(&rho).unwrap();
        assert!(got.max_abs_diff(&DenseOperator::new(want).unwrap()) < 1e-12);
    }

    #[test]
    fn rejects_non_cptp() {
        let k = DenseOperator::new(DMatrix::identity(2, 2).scale(0.5)).unwrap();
        assert!(matches!(
            spectrum_of_superop(&ChannelInput::Kraus(vec![k.clone()]), true),
            Err(Error::NotCptp(_))
        ));
        let s = spectrum_of_superop(&ChannelInput::Kraus(vec![k]), false).unwrap();
        assert_eq!(s.channel_flag(), ChannelFlag::No);
        assert!(SuperopSpectrum::from_pauli_rates(1, [(ps("0"), 0.5)]).is_err());
    }

    #[test]
    fn pairs_give_right_multiplication() {
        let x = DenseOperator::pauli(&ps("1")).unwrap();
        let s = spectrum_of_superop(
            &ChannelInput::Pairs(vec![(DenseOperator::identity(1).unwrap(), x.clone())]),
            false,
        )
        .unwrap();
        let want = SuperopSpectrum::right_multiplication(&spectrum_of_operator(&x));
        assert_eq!(s, want);
        assert_eq!(s.channel_flag(), ChannelFlag::Unknown);
    }
}
