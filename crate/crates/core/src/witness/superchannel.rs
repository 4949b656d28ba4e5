use super::scenario::Scenario;
use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::real::Real;
use crate::state::DensityMatrix;
use nalgebra::DMatrix;
use num_complex::Complex;

/// Six-index tensor `S_{r r′ r″ s s′ s″}` sending a system channel applied at
/// the interruption time to the final system state.
#[derive(Debug, Clone, PartialEq)]
pub struct Superchannel<T: Real> {
    dim: usize,
    tensor: Vec<Complex<T>>,
}

impl<T: Real> Superchannel<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn offset(&self, idx: [usize; 6]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Entry `S_{r r′ r″ s s′ s″}` with the indices in that order.
    pub fn get(&self, idx: [usize; 6]) -> Complex<T> {
        self.tensor[self.offset(idx)]
    }
}

/// `S_{rr′r″ss′s″} = Σ_{ε,α,β} U_{rε,r′α} ρ_{r″α,s″β}(τ) conj(U_{sε,s′β})` with `U = U(T,τ)`.
pub fn build_superchannel<T: Real>(sc: &Scenario<T>) -> Superchannel<T> {
    let layout = sc.layout();
    let (d, de) = (layout.dim_s, layout.dim_e);
    let rho_binding = sc.state_at_tau();
    let rho = rho_binding.matrix();
    let u = sc.u_t_tau();
    let zero = Complex::new(T::zero(), T::zero());

    // a[r,ε,r′,r″,s″,β] = Σ_α U_{rε,r′α} ρ_{r″α,s″β}
    let idx_a = |r: usize, e: usize, r1: usize, r2: usize, s2: usize, b: usize| {
        ((((r * de + e) * d + r1) * d + r2) * d + s2) * de + b
    };
    let mut a = vec![zero; d * de * d * d * d * de];
    for r in 0..d {
        for e in 0..de {
            for r1 in 0..d {
                for r2 in 0..d {
                    for s2 in 0..d {
                        for b in 0..de {
                            let mut acc = zero;
                            for al in 0..de {
                                acc += u.get(layout.index(r, e), layout.index(r1, al))
                                    * rho.get(layout.index(r2, al), layout.index(s2, b));
                            }
                            a[idx_a(r, e, r1, r2, s2, b)] = acc;
                        }
                    }
                }
            }
        }
    }

    let mut out = Superchannel { dim: d, tensor: vec![zero; d.pow(6)] };
    for r in 0..d {
        for r1 in 0..d {
            for r2 in 0..d {
                for s in 0..d {
                    for s1 in 0..d {
                        for s2 in 0..d {
                            let mut acc = zero;
                            for e in 0..de {
                                for b in 0..de {
                                    acc += a[idx_a(r, e, r1, r2, s2, b)]
                                        * u.get(layout.index(s, e), layout.index(s1, b)).conj();
                                }
                            }
                            let k = out.offset([r, r1, r2, s, s1, s2]);
                            out.tensor[k] = acc;
                        }
                    }
                }
            }
        }
    }
    out
}

/// `ρ_{rs}(T) = Σ S_{rr′r″ss′s″} E_{r′r″s′s″}` with `E_{r′r″s′s″} = Σ_k K_k[r′,r″] conj(K_k[s′,s″])`.
pub fn apply_superchannel<T: Real>(s: &Superchannel<T>, ch: &KrausChannel<T>) -> Result<DensityMatrix<T>> {
    let d = s.dim;
    if ch.dim_in() != d || ch.dim_out() != d {
        return Err(Error::DimensionMismatch(format!(
            "channel {}→{} for superchannel on dimension {d}",
            ch.dim_in(),
            ch.dim_out()
        )));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut transfer = vec![zero; d.pow(4)];
    for k in ch.kraus_ops() {
        for r1 in 0..d {
            for r2 in 0..d {
                for s1 in 0..d {
                    for s2 in 0..d {
                        transfer[((r1 * d + r2) * d + s1) * d + s2] += k.get(r1, r2) * k.get(s1, s2).conj();
                    }
                }
            }
        }
    }
    let out = DMatrix::from_fn(d, d, |r, s_| {
        let mut acc = zero;
        for r1 in 0..d {
            for r2 in 0..d {
                for s1 in 0..d {
                    for s2 in 0..d {
                        acc += s.get([r, r1, r2, s_, s1, s2]) * transfer[((r1 * d + r2) * d + s1) * d + s2];
                    }
                }
            }
        }
        acc
    });
    Ok(DensityMatrix::from_trusted(ComplexMatrix::from_dmatrix(out).hermitian_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{classicalise, InterruptionKind};
    use crate::linalg::BipartiteLayout;
    use crate::state::{random_effect, random_mixed_state, random_unitary, PreferredBasis};
    use crate::witness::engine::{final_system_state, probability};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(layout: BipartiteLayout, rng: &mut ChaCha8Rng) -> Scenario<f64> {
        Scenario::new(
            layout,
            random_mixed_state(layout.dim_s, layout.dim_s, rng).unwrap(),
            random_mixed_state(layout.dim_e, 1, rng).unwrap(),
            random_unitary(layout.joint(), rng),
            random_unitary(layout.joint(), rng),
            random_effect(layout.dim_s, rng),
            PreferredBasis::computational(layout.dim_s),
        )
        .unwrap()
    }

    #[test]
    fn contraction_matches_direct_propagation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (ds, de) in [(2, 2), (2, 3), (3, 2)] {
            let layout = BipartiteLayout::new(ds, de).unwrap();
            for _ in 0..10 {
                let sc = random(layout, &mut rng);
                let s = build_superchannel(&sc);
                let basis = PreferredBasis::computational(ds);
                let id = apply_superchannel(&s, &KrausChannel::identity(ds)).unwrap();
                let g = apply_superchannel(&s, &classicalise(&basis)).unwrap();
                let direct_i = final_system_state(&sc, &sc.interruption(InterruptionKind::DoNothing)).unwrap();
                let direct_ii =
                    final_system_state(&sc, &sc.interruption(InterruptionKind::DynamicallyClassicalise)).unwrap();
                assert!(id.matrix().approx_eq(direct_i.matrix(), 1e-12));
                assert!(g.matrix().approx_eq(direct_ii.matrix(), 1e-12));
                let w_a = probability(&sc, &sc.interruption(InterruptionKind::DoNothing)).unwrap()
                    - probability(&sc, &sc.interruption(InterruptionKind::DynamicallyClassicalise)).unwrap();
                let via_s = sc.effect().matrix().trace_product_re(&(id.matrix() - g.matrix()));
                assert!((w_a - via_s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contraction_of_random_channel_is_a_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let layout = BipartiteLayout::new(2, 2).unwrap();
        let sc = random(layout, &mut rng);
        let s = build_superchannel(&sc);
        let env = random_mixed_state::<f64, _>(2, 1, &mut rng).unwrap();
        let ch = crate::channel::kraus_from_joint_unitary(&random_unitary(4, &mut rng), &env, layout).unwrap();
        let out = apply_superchannel(&s, &ch).unwrap();
        assert!(DensityMatrix::new(out.into_matrix()).is_ok());
        assert!(apply_superchannel(&s, &KrausChannel::identity(3)).is_err());
    }
}
