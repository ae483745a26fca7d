use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::layout::SubsystemLayout;
use super::operator::{LocalOperator, Projector};
use crate::config::{DUMP_THRESHOLD, TOLERANCE};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Unit-norm pure state over a [`SubsystemLayout`].
#[derive(Clone, Debug)]
pub struct QuditState {
    layout: SubsystemLayout,
    amps: Vec<Complex64>,
}

/// Outcome of a two-outcome projective measurement `{P, I − P}`.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcome: bool,
    pub post_state: QuditState,
    /// Probability of the `P` branch, independent of which branch was sampled.
    pub probability: f64,
}

#[derive(Serialize)]
struct DumpEntry(usize, f64, f64);

impl QuditState {
    /// `|0…0⟩`.
    pub fn zero(layout: SubsystemLayout) -> Self {
        let mut amps = vec![ZERO; layout.total_dim()];
        amps[0] = ONE;
        Self { layout, amps }
    }

    pub fn basis(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        let idx = layout.index_of(digits)?;
        let mut amps = vec![ZERO; layout.total_dim()];
        amps[idx] = ONE;
        Ok(Self { layout, amps })
    }

    /// Single site of dimension `dim` in basis state `k`.
    pub fn single(dim: usize, k: usize) -> Result<Self> {
        Self::basis(SubsystemLayout::new(vec![dim])?, &[k])
    }

    pub fn from_amplitudes(layout: SubsystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        let state = Self { layout, amps };
        let norm = state.norm_sqr().sqrt();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::Invariant(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Normalise an arbitrary nonzero vector.
    pub fn normalized(layout: SubsystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= TOLERANCE {
            return Err(Error::Invariant("cannot normalise the zero vector".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.layout.index_of(digits)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_norm(&self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if (n - 1.0).abs() > TOLERANCE * 10.0 {
            return Err(Error::Invariant(format!("norm drifted to {n}")));
        }
        Ok(())
    }

    fn local_dim_for(&self, sites: &[usize], expected: usize) -> Result<()> {
        let dim = self.layout.local_dim(sites)?;
        if dim != expected {
            return Err(Error::DimensionMismatch(format!(
                "operator of dimension {expected} on sites {sites:?} of dimension {dim}"
            )));
        }
        Ok(())
    }

    fn transform(&mut self, op: &LocalOperator) -> Result<()> {
        let m = op.matrix();
        self.local_dim_for(op.sites(), m.dim())?;
        let (offsets, bases) = self.layout.split(op.sites());
        let mut local = vec![ZERO; m.dim()];
        for base in bases {
            for (l, &o) in local.iter_mut().zip(&offsets) {
                *l = self.amps[base + o];
            }
            for (out, &o) in m.apply(&local).into_iter().zip(&offsets) {
                self.amps[base + o] = out;
            }
        }
        Ok(())
    }

    /// Apply a unitary operator in place.
    pub fn apply(&mut self, op: &LocalOperator) -> Result<()> {
        if !op.is_unitary() {
            return Err(Error::Invariant(
                "non-unitary operator passed to apply; use apply_linear".into(),
            ));
        }
        self.transform(op)?;
        self.check_norm()
    }

    /// Apply any linear operator, renormalise, and return the retained weight `‖Aψ‖²`.
    pub fn apply_linear(&mut self, op: &LocalOperator) -> Result<f64> {
        self.transform(op)?;
        let weight = self.norm_sqr();
        if weight <= TOLERANCE * TOLERANCE {
            return Err(Error::Invariant("operator annihilated the state".into()));
        }
        let norm = weight.sqrt();
        self.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(weight)
    }

    fn projected_amplitudes(&self, p: &Projector) -> Result<Vec<Complex64>> {
        self.local_dim_for(p.sites(), p.dim())?;
        let (offsets, bases) = self.layout.split(p.sites());
        let mut out = vec![ZERO; self.amps.len()];
        let mut local = vec![ZERO; p.dim()];
        for base in bases {
            for (l, &o) in local.iter_mut().zip(&offsets) {
                *l = self.amps[base + o];
            }
            for (x, &o) in p.project(&local).into_iter().zip(&offsets) {
                out[base + o] = x;
            }
        }
        Ok(out)
    }

    /// Exact probability `‖Pψ‖²`.
    pub fn projector_probability(&self, p: &Projector) -> Result<f64> {
        let prob = self.projected_amplitudes(p)?.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(-TOLERANCE..=1.0 + TOLERANCE).contains(&prob) {
            return Err(Error::Invariant(format!("projector probability {prob} outside [0, 1]")));
        }
        Ok(prob.clamp(0.0, 1.0))
    }

    /// Sample `{P, I − P}` in place; returns the sampled branch and the probability of `P`.
    pub fn measure<R: Rng + ?Sized>(&mut self, p: &Projector, rng: &mut R) -> Result<(bool, f64)> {
        let projected = self.projected_amplitudes(p)?;
        let prob = projected.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(-TOLERANCE..=1.0 + TOLERANCE).contains(&prob) {
            return Err(Error::Invariant(format!("projector probability {prob} outside [0, 1]")));
        }
        let prob = prob.clamp(0.0, 1.0);
        let outcome = rng.gen::<f64>() < prob;
        let (kept, weight) = if outcome {
            (projected, prob)
        } else {
            let rest = self.amps.iter().zip(&projected).map(|(a, b)| a - b).collect();
            (rest, 1.0 - prob)
        };
        if weight <= 0.0 {
            return Err(Error::Invariant("sampled a zero-probability branch".into()));
        }
        let norm = weight.sqrt();
        self.amps = kept.into_iter().map(|a| a / norm).collect();
        Ok((outcome, prob))
    }

    /// Computational-basis measurement of one site; returns the digit and its probability.
    pub fn measure_site<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<(usize, f64)> {
        let dim = self.layout.local_dim(&[site])?;
        let mut probs = vec![0.0; dim];
        for (i, a) in self.amps.iter().enumerate() {
            probs[self.layout.digit(i, site)] += a.norm_sqr();
        }
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = dim - 1;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                outcome = k;
                break;
            }
        }
        // Guard against landing on a zero-weight tail through rounding.
        while probs[outcome] <= 0.0 && outcome > 0 {
            outcome -= 1;
        }
        let prob = probs[outcome];
        let norm = prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if self.layout.digit(i, site) == outcome {
                *a /= norm;
            } else {
                *a = ZERO;
            }
        }
        Ok((outcome, prob))
    }

    /// Measure `site` and rotate the result back to `|0⟩` (discard and replace).
    pub fn reset_site<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<()> {
        let (outcome, _) = self.measure_site(site, rng)?;
        if outcome != 0 {
            let stride = self.layout.stride(site);
            for i in 0..self.amps.len() {
                if self.layout.digit(i, site) == outcome {
                    let j = i - outcome * stride;
                    self.amps.swap(i, j);
                }
            }
        }
        Ok(())
    }

    /// Replace sites currently in `|0…0⟩` (as a product factor) by `local`.
    pub fn prepare_sites(&mut self, sites: &[usize], local: &[Complex64]) -> Result<()> {
        self.local_dim_for(sites, local.len())?;
        let (offsets, bases) = self.layout.split(sites);
        let outside: f64 = bases
            .iter()
            .flat_map(|b| offsets[1..].iter().map(move |o| b + o))
            .map(|i| self.amps[i].norm_sqr())
            .sum();
        if outside > TOLERANCE {
            return Err(Error::Invariant(format!("sites {sites:?} are not in |0…0⟩")));
        }
        let local_norm: f64 = local.iter().map(|a| a.norm_sqr()).sum();
        if (local_norm - 1.0).abs() > TOLERANCE {
            return Err(Error::Invariant("prepared local state is not normalised".into()));
        }
        for base in bases {
            let a = self.amps[base];
            for (&o, &l) in offsets.iter().zip(local) {
                self.amps[base + o] = a * l;
            }
        }
        Ok(())
    }

    /// `⟨t|ρ_S|t⟩` where `ρ_S` is the reduced state on `sites`.
    pub fn site_overlap(&self, sites: &[usize], target: &[Complex64]) -> Result<f64> {
        self.local_dim_for(sites, target.len())?;
        let (offsets, bases) = self.layout.split(sites);
        Ok(bases
            .iter()
            .map(|&b| {
                offsets
                    .iter()
                    .zip(target)
                    .map(|(&o, t)| t.conj() * self.amps[b + o])
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum())
    }

    /// Amplitudes above the dump threshold as `(index, re, im)` triples.
    pub fn dump(&self) -> Vec<(usize, f64, f64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > DUMP_THRESHOLD)
            .map(|(i, a)| (i, a.re, a.im))
            .collect()
    }

    pub fn dump_json(&self) -> String {
        let entries: Vec<_> = self.dump().into_iter().map(|(i, r, m)| DumpEntry(i, r, m)).collect();
        serde_json::to_string(&entries).expect("dump entries serialise")
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.layout.dims() != other.layout.dims() {
            return Err(Error::DimensionMismatch("states have different layouts".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &QuditState, b: &QuditState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Sample the projective measurement `{P, I − P}` on a copy of `state`.
pub fn measure_projector<R: Rng + ?Sized>(
    state: &QuditState,
    p: &Projector,
    rng: &mut R,
) -> Result<Measurement> {
    let mut post_state = state.clone();
    let (outcome, probability) = post_state.measure(p, rng)?;
    Ok(Measurement { outcome, post_state, probability })
}

/// Tensor product; layouts are concatenated in order.
pub fn embed_product(states: &[QuditState]) -> Result<QuditState> {
    let Some((first, rest)) = states.split_first() else {
        return Err(Error::Config("empty tensor product".into()));
    };
    rest.iter().try_fold(first.clone(), |acc, s| {
        let layout = acc.layout.concat(&s.layout)?;
        let mut amps = Vec::with_capacity(layout.total_dim());
        for a in &acc.amps {
            amps.extend(s.amps.iter().map(|b| a * b));
        }
        Ok(QuditState { layout, amps })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::rng::RandomStream;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn plus() -> QuditState {
        QuditState::from_amplitudes(
            SubsystemLayout::new(vec![2]).unwrap(),
            vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2],
        )
        .unwrap()
    }

    fn shift(q: usize) -> CMatrix {
        let mut m = CMatrix::zeros(q);
        for a in 0..q {
            m.set((a + 1) % q, a, ONE);
        }
        m
    }

    fn phase(q: usize) -> CMatrix {
        CMatrix::diagonal(
            &(0..q)
                .map(|x| Complex64::from_polar(1.0, 2.0 * PI * x as f64 / q as f64))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn apply_examples() {
        let mut s = QuditState::single(5, 2).unwrap();
        s.apply(&LocalOperator::unitary(vec![0], shift(5)).unwrap()).unwrap();
        assert_eq!(s.amplitude(&[3]).unwrap(), ONE);

        let mut s = QuditState::single(5, 1).unwrap();
        s.apply(&LocalOperator::unitary(vec![0], phase(5)).unwrap()).unwrap();
        let expected = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
        assert!((s.amplitude(&[1]).unwrap() - expected).norm() < 1e-12);

        let psi = plus();
        let mut t = psi.clone();
        t.apply(&LocalOperator::unitary(vec![0], CMatrix::identity(2)).unwrap()).unwrap();
        assert!((fidelity(&psi, &t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let mut s = QuditState::single(5, 0).unwrap();
        let op = LocalOperator::unitary(vec![0], CMatrix::identity(2)).unwrap();
        assert!(matches!(s.apply(&op), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn projector_examples() {
        let p0 = Projector::basis_state(vec![0], 2, 0).unwrap();
        let mut rng = RandomStream::new(1);
        let m = measure_projector(&QuditState::single(2, 0).unwrap(), &p0, &mut rng).unwrap();
        assert!(m.outcome);
        assert_eq!(m.probability, 1.0);
        let m = measure_projector(&QuditState::single(2, 1).unwrap(), &p0, &mut rng).unwrap();
        assert!(!m.outcome);
        assert_eq!(m.probability, 0.0);
        let m = measure_projector(&plus(), &p0, &mut rng).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-12);
        assert!((m.post_state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let zero = QuditState::single(2, 0).unwrap();
        let one = QuditState::single(2, 1).unwrap();
        assert_eq!(fidelity(&zero, &zero).unwrap(), 1.0);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&zero, &plus()).unwrap() - 0.5).abs() < 1e-12);
        let other = QuditState::single(3, 0).unwrap();
        assert!(fidelity(&zero, &other).is_err());
    }

    #[test]
    fn product_examples() {
        let zero = QuditState::single(2, 0).unwrap();
        let one = QuditState::single(2, 1).unwrap();
        let zz = embed_product(&[zero.clone(), zero]).unwrap();
        assert_eq!(zz.amplitude(&[0, 0]).unwrap(), ONE);

        let s = embed_product(&[plus(), one]).unwrap();
        assert!((s.amplitude(&[0, 1]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.amplitude(&[1, 1]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(s.amplitude(&[0, 0]).unwrap(), ZERO);

        let parts: Vec<_> = (1..=3).map(|k| QuditState::single(5, k).unwrap()).collect();
        let s = embed_product(&parts).unwrap();
        assert_eq!(s.layout().total_dim(), 125);
        assert_eq!(s.amplitude(&[1, 2, 3]).unwrap(), ONE);
    }

    #[test]
    fn product_respects_guard() {
        let big = QuditState::zero(SubsystemLayout::uniform(12, 2).unwrap());
        assert!(matches!(embed_product(&[big.clone(), big]), Err(Error::ResourceGuard(_))));
    }

    #[test]
    fn reset_and_prepare() {
        let mut rng = RandomStream::new(3);
        let mut s = embed_product(&[plus(), QuditState::single(2, 1).unwrap()]).unwrap();
        s.reset_site(1, &mut rng).unwrap();
        assert!((s.amplitude(&[0, 0]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-12);
        s.prepare_sites(&[1], &[ZERO, ONE]).unwrap();
        assert!((s.amplitude(&[1, 1]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(s.prepare_sites(&[1], &[ONE, ZERO]).is_err());
    }

    #[test]
    fn site_overlap_matches_reduced_state() {
        // Bell pair: each qubit alone is maximally mixed.
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        let bell = QuditState::from_amplitudes(
            layout,
            vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                ZERO,
                ZERO,
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        assert!((bell.site_overlap(&[0], &[ONE, ZERO]).unwrap() - 0.5).abs() < 1e-12);
        let bell_local = vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            ZERO,
            ZERO,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ];
        assert!((bell.site_overlap(&[0, 1], &bell_local).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dump_lists_nonzero_amplitudes() {
        let s = embed_product(&[plus(), QuditState::single(2, 1).unwrap()]).unwrap();
        let dump = s.dump();
        assert_eq!(dump.iter().map(|e| e.0).collect::<Vec<_>>(), vec![1, 3]);
        let json: serde_json::Value = serde_json::from_str(&s.dump_json()).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 2);
    }
}
