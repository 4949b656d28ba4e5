//! Kraus channels: classicalisation, relaxation, interruptions and channel calculus.

use crate::error::{Error, Result};
use crate::linalg::{tensor, BipartiteLayout, ComplexMatrix};
use crate::real::Real;
use crate::state::{DensityMatrix, Effect, PreferredBasis};
use nalgebra::DMatrix;
use num_complex::Complex;

/// Completely positive trace-preserving map `ρ ↦ Σ_k K_k ρ K_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T: Real> {
    dim_in: usize,
    dim_out: usize,
    kraus_ops: Vec<ComplexMatrix<T>>,
}

/// Heisenberg-picture map `M ↦ Σ_k K_k† M K_k` of a channel.
///
/// Unital and completely positive, but not trace preserving in general, so it
/// is kept apart from [`KrausChannel`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualMap<T: Real> {
    channel_in: usize,
    channel_out: usize,
    kraus_ops: Vec<ComplexMatrix<T>>,
}

fn completeness_defect<T: Real>(ops: &[ComplexMatrix<T>], dim_in: usize) -> T {
    let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
    for k in ops {
        sum = &sum + &(&k.adjoint() * k);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dim_in))
}

fn apply_family<T: Real>(ops: &[ComplexMatrix<T>], m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut iter = ops.iter();
    let first = iter.next().expect("nonempty Kraus family");
    let mut out = m.conjugate_by(first);
    for k in iter {
        out = &out + &m.conjugate_by(k);
    }
    out
}

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ F(|i⟩⟨j|)` of the linear map `F`.
fn choi_of<T: Real>(
    dim_in: usize,
    dim_out: usize,
    map: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let n = dim_in * dim_out;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..dim_in {
        for j in 0..dim_in {
            let block = map(&ComplexMatrix::matrix_unit(dim_in, i, j));
            for a in 0..dim_out {
                for b in 0..dim_out {
                    out[(i * dim_out + a, j * dim_out + b)] = block.get(a, b);
                }
            }
        }
    }
    ComplexMatrix::from_dmatrix(out)
}

impl<T: Real> KrausChannel<T> {
    pub fn new(kraus_ops: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus family".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if kraus_ops.iter().any(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        let defect = completeness_defect(&kraus_ops, dim_in);
        if defect > T::channel_tol() {
            return Err(Error::NotTracePreserving(defect.as_f64()));
        }
        Ok(Self { dim_in, dim_out, kraus_ops })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim_in: dim, dim_out: dim, kraus_ops: vec![ComplexMatrix::identity(dim)] }
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: &ComplexMatrix<T>) -> Result<Self> {
        u.ensure_unitary()?;
        Ok(Self { dim_in: u.cols(), dim_out: u.rows(), kraus_ops: vec![u.clone()] })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix<T>] {
        &self.kraus_ops
    }

    /// `Σ_k K_k† K_k − I`, measured entrywise.
    pub fn completeness_defect(&self) -> T {
        completeness_defect(&self.kraus_ops, self.dim_in)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel input dimension {} applied to a {}-dimensional state",
                self.dim_in,
                rho.dim()
            )));
        }
        Ok(DensityMatrix::from_trusted(apply_family(&self.kraus_ops, rho.matrix())))
    }

    /// Linear extension to arbitrary operators (correlation matrices, differences).
    pub fn apply_matrix(&self, m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if m.rows() != self.dim_in || m.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel input dimension {} applied to a {}x{} operator",
                self.dim_in,
                m.rows(),
                m.cols()
            )));
        }
        Ok(apply_family(&self.kraus_ops, m))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &KrausChannel<T>) -> Result<Self> {
        compose(self, first)
    }

    pub fn dual(&self) -> DualMap<T> {
        dual(self)
    }

    pub fn choi(&self) -> ComplexMatrix<T> {
        choi(self)
    }

    /// Channel equality through Choi matrices.
    pub fn approx_eq(&self, other: &KrausChannel<T>, tol: T) -> bool {
        self.dim_in == other.dim_in
            && self.dim_out == other.dim_out
            && self.choi().approx_eq(&other.choi(), tol)
    }
}

impl<T: Real> DualMap<T> {
    /// Input dimension of the Heisenberg map (the original channel's output).
    pub fn dim_in(&self) -> usize {
        self.channel_out
    }

    pub fn dim_out(&self) -> usize {
        self.channel_in
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix<T>] {
        &self.kraus_ops
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if m.rows() != self.channel_out || m.cols() != self.channel_out {
            return Err(Error::DimensionMismatch(format!(
                "dual map input dimension {} applied to a {}x{} operator",
                self.channel_out,
                m.rows(),
                m.cols()
            )));
        }
        Ok(apply_family(&self.kraus_ops, m))
    }

    /// Duals of channels map effects to effects.
    pub fn apply_effect(&self, m: &Effect<T>) -> Result<Effect<T>> {
        Ok(Effect::from_trusted(self.apply_matrix(m.matrix())?.hermitian_part()))
    }

    pub fn choi(&self) -> ComplexMatrix<T> {
        choi_of(self.channel_out, self.channel_in, |m| apply_family(&self.kraus_ops, m))
    }

    /// The dual of the dual, revalidated as a channel.
    pub fn dual(&self) -> Result<KrausChannel<T>> {
        KrausChannel::new(self.kraus_ops.iter().map(ComplexMatrix::adjoint).collect())
    }
}

/// Kraus family of `a ∘ b` (apply `b` first).
pub fn compose<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>) -> Result<KrausChannel<T>> {
    if b.dim_out != a.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "cannot feed a {}-dimensional output into a {}-dimensional input",
            b.dim_out, a.dim_in
        )));
    }
    let ops = a
        .kraus_ops
        .iter()
        .flat_map(|ka| b.kraus_ops.iter().map(move |kb| ka * kb))
        .collect();
    Ok(KrausChannel { dim_in: b.dim_in, dim_out: a.dim_out, kraus_ops: ops })
}

/// Kraus family of `a ⊗ b` under the crate's bipartite index convention.
pub fn tensor_channels<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>) -> KrausChannel<T> {
    let ops = a
        .kraus_ops
        .iter()
        .flat_map(|ka| b.kraus_ops.iter().map(move |kb| tensor(ka, kb)))
        .collect();
    KrausChannel { dim_in: a.dim_in * b.dim_in, dim_out: a.dim_out * b.dim_out, kraus_ops: ops }
}

/// Daggered Kraus family, satisfying `tr(M a(ρ)) = tr(a†(M) ρ)`.
pub fn dual<T: Real>(a: &KrausChannel<T>) -> DualMap<T> {
    DualMap {
        channel_in: a.dim_in,
        channel_out: a.dim_out,
        kraus_ops: a.kraus_ops.iter().map(ComplexMatrix::adjoint).collect(),
    }
}

pub fn choi<T: Real>(ch: &KrausChannel<T>) -> ComplexMatrix<T> {
    choi_of(ch.dim_in, ch.dim_out, |m| apply_family(&ch.kraus_ops, m))
}

/// Blind measurement in the preferred basis: Kraus operators `|i⟩⟨i|`.
pub fn classicalise<T: Real>(basis: &PreferredBasis) -> KrausChannel<T> {
    let d = basis.dim();
    let ops = basis.ordering().iter().map(|&i| ComplexMatrix::matrix_unit(d, i, i)).collect();
    KrausChannel { dim_in: d, dim_out: d, kraus_ops: ops }
}

/// Discrete distribution over phase vectors `θ ∈ [0, 2π)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution<T: Real> {
    dim: usize,
    atoms: Vec<(Vec<T>, T)>,
}

impl<T: Real> PhaseDistribution<T> {
    pub fn new(atoms: Vec<(Vec<T>, T)>) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|(theta, _)| theta.len())
            .ok_or_else(|| Error::InvalidArgument("empty phase distribution".into()))?;
        if dim == 0 || atoms.iter().any(|(theta, _)| theta.len() != dim) {
            return Err(Error::DimensionMismatch("phase vectors differ in length".into()));
        }
        if atoms.iter().any(|(_, w)| *w < T::zero()) {
            return Err(Error::InvalidArgument("negative phase weight".into()));
        }
        let total = atoms.iter().fold(T::zero(), |acc, (_, w)| acc + *w);
        if (total - T::one()).abs() > T::algebra_tol() {
            return Err(Error::InvalidArgument(format!("phase weights sum to {total}")));
        }
        Ok(Self { dim, atoms })
    }

    /// Point mass at `theta`.
    pub fn point(theta: Vec<T>) -> Result<Self> {
        Self::new(vec![(theta, T::one())])
    }

    /// Independent phases `θ_j ∈ {0, π}` with probability one half each: `2^d` atoms.
    pub fn independent_flips(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if d > crate::linalg::MAX_FACTOR_DIM {
            return Err(Error::DimensionCap { dim: d, cap: crate::linalg::MAX_FACTOR_DIM });
        }
        let count = 1usize << d;
        let weight = T::one() / T::from_count(count);
        let atoms = (0..count)
            .map(|mask| {
                let theta = (0..d)
                    .map(|j| if mask >> j & 1 == 1 { T::pi() } else { T::zero() })
                    .collect();
                (theta, weight)
            })
            .collect();
        Self::new(atoms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(Vec<T>, T)] {
        &self.atoms
    }
}

/// Random diagonal-unitary conjugation: Kraus operators `√w · diag(e^{iθ_j})`.
pub fn dephase<T: Real>(dist: &PhaseDistribution<T>) -> Result<KrausChannel<T>> {
    let ops = dist
        .atoms
        .iter()
        .filter(|(_, w)| *w > T::zero())
        .map(|(theta, w)| {
            let s = w.sqrt();
            let diag: Vec<_> = theta.iter().map(|&t| Complex::new(s * t.cos(), s * t.sin())).collect();
            ComplexMatrix::diagonal_from(&diag)
        })
        .collect();
    KrausChannel::new(ops)
}

/// Constant channel onto `target`: Kraus operators `√q_m |v_m⟩⟨j|` over its eigen-decomposition.
pub fn relax_environment<T: Real>(target: &DensityMatrix<T>) -> Result<KrausChannel<T>> {
    let d = target.dim();
    let eig = target.matrix().hermitian_eigen()?;
    let cutoff = T::algebra_tol();
    let mut ops = Vec::new();
    for (q, v) in eig.values.iter().zip(&eig.vectors) {
        if *q <= cutoff {
            continue;
        }
        let s = Complex::new(q.sqrt(), T::zero());
        for j in 0..d {
            let mut k = DMatrix::zeros(d, d);
            for a in 0..d {
                k[(a, j)] = v[a] * s;
            }
            ops.push(ComplexMatrix::from_dmatrix(k));
        }
    }
    KrausChannel::new(ops)
}

/// Reduced dynamics of `ρ ↦ tr_E(U (ρ ⊗ σ_E) U†)`.
///
/// Kraus operators are `K_{ik} = √p_i ⟨e_k|U|v_i⟩` where `σ_E = Σ_i p_i |v_i⟩⟨v_i|`
/// and `|e_k⟩` runs over the computational basis of the environment.
pub fn kraus_from_joint_unitary<T: Real>(
    u: &ComplexMatrix<T>,
    env_state: &DensityMatrix<T>,
    layout: BipartiteLayout,
) -> Result<KrausChannel<T>> {
    if u.rows() != layout.joint() || u.cols() != layout.joint() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} unitary for layout {}x{}",
            u.rows(),
            u.cols(),
            layout.dim_s,
            layout.dim_e
        )));
    }
    if env_state.dim() != layout.dim_e {
        return Err(Error::DimensionMismatch("environment state does not match layout".into()));
    }
    u.ensure_unitary()?;
    let (ds, de) = (layout.dim_s, layout.dim_e);
    let eig = env_state.matrix().hermitian_eigen()?;
    let cutoff = T::algebra_tol();
    let mut ops = Vec::new();
    for (p, v) in eig.values.iter().zip(&eig.vectors) {
        if *p <= cutoff {
            continue;
        }
        let s = p.sqrt();
        for k in 0..de {
            let block = DMatrix::from_fn(ds, ds, |r, c| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for b in 0..de {
                    acc += u.get(layout.index(r, k), layout.index(c, b)) * v[b];
                }
                acc * s
            });
            ops.push(ComplexMatrix::from_dmatrix(block));
        }
    }
    KrausChannel::new(ops)
}

/// The four interruption operations applied at the intermediate time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum InterruptionKind {
    /// `id ⊗ id`
    #[serde(rename = "I")]
    DoNothing,
    /// `Γ ⊗ id`
    #[serde(rename = "II")]
    DynamicallyClassicalise,
    /// `id ⊗ relax`
    #[serde(rename = "III")]
    ResetEnvironment,
    /// `Γ ⊗ relax`
    #[serde(rename = "IV")]
    PiecewiseClassicalise,
}

impl InterruptionKind {
    pub const ALL: [InterruptionKind; 4] = [
        InterruptionKind::DoNothing,
        InterruptionKind::DynamicallyClassicalise,
        InterruptionKind::ResetEnvironment,
        InterruptionKind::PiecewiseClassicalise,
    ];

    pub fn classicalises(self) -> bool {
        matches!(self, Self::DynamicallyClassicalise | Self::PiecewiseClassicalise)
    }

    pub fn resets_environment(self) -> bool {
        matches!(self, Self::ResetEnvironment | Self::PiecewiseClassicalise)
    }

    pub fn numeral(self) -> &'static str {
        match self {
            Self::DoNothing => "I",
            Self::DynamicallyClassicalise => "II",
            Self::ResetEnvironment => "III",
            Self::PiecewiseClassicalise => "IV",
        }
    }
}

impl std::str::FromStr for InterruptionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.numeral().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown interruption kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interruption<T: Real> {
    pub kind: InterruptionKind,
    pub layout: BipartiteLayout,
    pub env_reset_target: DensityMatrix<T>,
}

impl<T: Real> Interruption<T> {
    pub fn new(
        kind: InterruptionKind,
        layout: BipartiteLayout,
        env_reset_target: DensityMatrix<T>,
    ) -> Result<Self> {
        if env_reset_target.dim() != layout.dim_e {
            return Err(Error::DimensionMismatch(format!(
                "reset target of dimension {} for environment dimension {}",
                env_reset_target.dim(),
                layout.dim_e
            )));
        }
        Ok(Self { kind, layout, env_reset_target })
    }

    /// Interruption that resets the environment to its first basis vector.
    pub fn zero_temperature(kind: InterruptionKind, layout: BipartiteLayout) -> Result<Self> {
        Self::new(kind, layout, DensityMatrix::basis(layout.dim_e, 0)?)
    }
}

/// Joint-space channel realising an interruption.
pub fn interruption_channel<T: Real>(
    intr: &Interruption<T>,
    basis: &PreferredBasis,
) -> Result<KrausChannel<T>> {
    let layout = intr.layout;
    if basis.dim() != layout.dim_s {
        return Err(Error::DimensionMismatch(format!(
            "basis of dimension {} for system dimension {}",
            basis.dim(),
            layout.dim_s
        )));
    }
    if intr.env_reset_target.dim() != layout.dim_e {
        return Err(Error::DimensionMismatch("reset target does not match layout".into()));
    }
    let system = if intr.kind.classicalises() {
        classicalise(basis)
    } else {
        KrausChannel::identity(layout.dim_s)
    };
    let environment = if intr.kind.resets_environment() {
        relax_environment(&intr.env_reset_target)?
    } else {
        KrausChannel::identity(layout.dim_e)
    };
    Ok(tensor_channels(&system, &environment))
}
