//! Seeded invariant bank behind the `checks` command.
//!
//! Each check draws its own instances from a sampler derived from the run
//! seed and reports the largest violation it saw. For an inequality
//! `lhs ≤ rhs` the violation is `lhs - rhs`; for an identity it is the
//! absolute difference. A check passes when its worst violation is at most
//! its tolerance.

use serde::Serialize;

use crate::codesim::{build_repetition_scheme, error_report};
use crate::commuting::{eigenvalues_by_formula, gap_regular, ClassicalPair, EnumerationLimits};
use crate::cqchannel::{
    codebook_cost, codebook_holevo, holevo_identity_residual, holevo_quantity, induced_mutual_information, Codebook,
    CqChannel, InputDistribution,
};
use crate::entropy::{bs_relative_entropy, umegaki_relative_entropy, von_neumann_entropy};
use crate::error::Result;
use crate::matcore::{kron, DensityMatrix, HermitianOperator};
use crate::mixture::{build_mixture, entropy_gap, identity_residual, DEFAULT_SIZE_CAP};
use crate::random::StateSampler;
use crate::stein::{classical_np_errors, np_test_projection, test_errors};

const CAP: usize = DEFAULT_SIZE_CAP;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_name: &'static str,
    pub pass: bool,
    /// `None` when the check itself errored.
    pub worst_violation: Option<f64>,
}

struct Check {
    name: &'static str,
    tolerance: f64,
    run: fn(&mut StateSampler) -> Result<f64>,
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn hermitian_reconstruction(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..20 {
        let h = s.hermitian(2 + k % 4);
        let spec = h.spectrum()?;
        w = w.max(spec.compose(spec.eigenvalues()).max_abs_diff(&h)?);
    }
    Ok(w)
}

fn kron_trace(s: &mut StateSampler) -> Result<f64> {
    Ok(worst((0..20).map(|k| {
        let a = s.hermitian(2 + k % 3);
        let b = s.hermitian(2 + k % 2);
        (kron(&a, &b).trace() - a.trace() * b.trace()).abs()
    })))
}

fn density_spectrum(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..20 {
        let dim = 2 + k % 3;
        let rho = s.density_of_rank(dim, 1 + k % dim);
        let ev = rho.spectrum()?.eigenvalues();
        let total: f64 = ev.iter().sum();
        w = w.max((total - 1.0).abs()).max(-ev.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    Ok(w)
}

fn entropy_range(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..20 {
        let dim = 2 + k % 3;
        let e = von_neumann_entropy(&s.density_of_rank(dim, 1 + k % dim))?;
        w = w.max(-e).max(e - (dim as f64).ln());
    }
    Ok(w)
}

fn entropy_unitary_invariance(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..20 {
        let dim = 2 + k % 3;
        let rho = s.density(dim);
        let u = s.unitary(dim);
        let rotated = DensityMatrix::new(rho.congruence(u.as_ref())?)?;
        w = w.max((von_neumann_entropy(&rotated)? - von_neumann_entropy(&rho)?).abs());
    }
    Ok(w)
}

fn klein_inequality(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..30 {
        let dim = 2 + k % 3;
        let (a, b) = (s.density(dim), s.density(dim));
        w = w.max(-umegaki_relative_entropy(&a, &b)?.value());
    }
    Ok(w)
}

fn bs_dominance(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..30 {
        let dim = 2 + k % 3;
        let (a, b) = (s.density(dim), s.density(dim));
        w = w.max(umegaki_relative_entropy(&a, &b)?.value() - bs_relative_entropy(&a, &b)?.value());
    }
    Ok(w)
}

fn mixture_identity(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for _ in 0..3 {
        let (sigma, rho) = (s.density(2), s.density(2));
        for n in 2..=6 {
            w = w.max(identity_residual(&sigma, &rho, n, CAP)?);
        }
    }
    Ok(w)
}

fn gap_bounds(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for _ in 0..3 {
        let (sigma, rho) = (s.density(2), s.density(2));
        for n in 1..=7 {
            let r = entropy_gap(&sigma, &rho, 1, n, CAP)?;
            w = w.max(-r.gap).max(r.gap - r.target.value());
        }
    }
    Ok(w)
}

fn commuting_spectrum(s: &mut StateSampler) -> Result<f64> {
    let limits = EnumerationLimits::default();
    let mut w = f64::NEG_INFINITY;
    for k in 0..4 {
        let d = 2 + k % 2;
        let mu = s.probability_vector(d);
        let lambda = s.probability_vector(d);
        let pair = ClassicalPair::new(&mu, &lambda)?;
        let (sigma, rho) = (pair.sigma_state(), pair.rho_state());
        for n in 2..=4 {
            let mut formula = eigenvalues_by_formula(&pair, n, &limits)?;
            let dense = build_mixture(&sigma, &rho, 1, n, CAP)?;
            let mut direct = dense.diagonal_real();
            formula.sort_by(f64::total_cmp);
            direct.sort_by(f64::total_cmp);
            w = w.max(worst(formula.iter().zip(&direct).map(|(a, b)| (a - b).abs())));
            let g = gap_regular(&pair, n, &limits)?;
            w = w.max((g - entropy_gap(&sigma, &rho, 1, n, CAP)?.gap).abs());
        }
    }
    Ok(w)
}

fn random_channel(s: &mut StateSampler) -> (CqChannel, InputDistribution) {
    let dim = 2 + s.below(2);
    let k = 2 + s.below(2);
    let w = CqChannel::new((0..k).map(|_| s.density(dim)).collect()).expect("same dimension");
    let p = InputDistribution::new(s.probability_vector(k)).expect("simplex point");
    (w, p)
}

fn holevo_bound(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for _ in 0..30 {
        let (ch, p) = random_channel(s);
        let m = s.povm(ch.dim(), 2.min(ch.dim()));
        w = w.max(induced_mutual_information(&ch, &p, &m)? - holevo_quantity(&ch, &p)?);
    }
    Ok(w)
}

fn holevo_identity(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for _ in 0..20 {
        let (ch, p) = random_channel(s);
        let reference = s.density(ch.dim());
        w = w.max(holevo_identity_residual(&ch, &p, &reference)?);
    }
    Ok(w)
}

fn cost_bound(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..20 {
        let (r0, r1) = (s.density(2), s.density(2));
        let a = s.codebook(2 + k % 5, 12);
        let d = umegaki_relative_entropy(&r0, &r1)?.value();
        w = w.max(codebook_holevo(&a, &r0, &r1, CAP)? - codebook_cost(&a) * d);
    }
    Ok(w)
}

fn weight_one_gap(s: &mut StateSampler) -> Result<f64> {
    let (r0, r1) = (s.density(2), s.density(2));
    let mut w = f64::NEG_INFINITY;
    for n in 2..=7 {
        let h = codebook_holevo(&Codebook::weight_one(n), &r0, &r1, CAP)?;
        w = w.max((h - entropy_gap(&r0, &r1, 1, n, CAP)?.gap).abs());
    }
    Ok(w)
}

fn stein_beta_bound(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for _ in 0..3 {
        let (r0, r1) = (s.density(2), s.density(2));
        let rate = 0.5 * umegaki_relative_entropy(&r0, &r1)?.value();
        for n in 1..=7 {
            let e = np_test_projection(&r0, &r1, n, (n as f64 * rate).exp(), CAP)?;
            w = w.max(test_errors(&e, &r0, &r1)?.beta - (-(n as f64) * rate).exp());
        }
    }
    Ok(w)
}

fn stein_classical_oracle(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for _ in 0..3 {
        let (p, q) = (s.probability_vector(2), s.probability_vector(2));
        let (r0, r1) = (DensityMatrix::from_spectrum(&p)?, DensityMatrix::from_spectrum(&q)?);
        let rate = 0.5 * umegaki_relative_entropy(&r0, &r1)?.value();
        for n in 1..=8 {
            let t = (n as f64 * rate).exp();
            let errs = test_errors(&np_test_projection(&r0, &r1, n, t, CAP)?, &r0, &r1)?;
            let (a, b) = classical_np_errors(&p, &q, n, t);
            w = w.max((errs.alpha - a).abs()).max((errs.beta - b).abs());
        }
    }
    Ok(w)
}

fn repetition_code_bound(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..6 {
        let (r0, r1) = (s.density(2), s.density(2));
        let rate = 0.5 * umegaki_relative_entropy(&r0, &r1)?.value();
        let a = if k % 2 == 0 { Codebook::weight_one(3 + k) } else { s.codebook(3 + k, 10) };
        let scheme = build_repetition_scheme(&r0, &r1, a, 2 + k, rate, CAP)?;
        let report = error_report(&scheme)?;
        w = w.max(report.max_error - report.bound);
    }
    Ok(w)
}

fn decoder_completeness(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for k in 0..4 {
        let (r0, r1) = (s.density(2), s.density(2));
        let n = 3 + k;
        let scheme = build_repetition_scheme(&r0, &r1, Codebook::weight_one(n), 3, 0.1, CAP)?;
        for word in scheme.codebook().words() {
            let mut total = 0.0;
            for y in 0..1usize << n {
                let decoded = |i: usize| ((y >> (n - 1 - i)) & 1) as u8;
                total += (0..n)
                    .map(|i| scheme.position_probability(word.bits()[i], decoded(i)))
                    .product::<f64>();
            }
            w = w.max((total - 1.0).abs());
        }
    }
    Ok(w)
}

fn projection_idempotence(s: &mut StateSampler) -> Result<f64> {
    let mut w = f64::NEG_INFINITY;
    for n in 1..=4 {
        let (r0, r1) = (s.density(2), s.density(2));
        let e = np_test_projection(&r0, &r1, n, 1.0 + s.uniform(), CAP)?;
        let sq = HermitianOperator::hermitize(e.op().matmul(e.op())?);
        w = w.max(sq.max_abs_diff(e.op())?);
    }
    Ok(w)
}

const CHECKS: &[Check] = &[
    Check { name: "hermitian_reconstruction", tolerance: 1e-10, run: hermitian_reconstruction },
    Check { name: "kron_trace_multiplicative", tolerance: 1e-10, run: kron_trace },
    Check { name: "density_spectrum", tolerance: 1e-10, run: density_spectrum },
    Check { name: "entropy_range", tolerance: 1e-10, run: entropy_range },
    Check { name: "entropy_unitary_invariance", tolerance: 1e-10, run: entropy_unitary_invariance },
    Check { name: "klein_inequality", tolerance: 1e-10, run: klein_inequality },
    Check { name: "bs_dominance", tolerance: 1e-9, run: bs_dominance },
    Check { name: "mixture_identity", tolerance: 1e-8, run: mixture_identity },
    Check { name: "gap_bounds", tolerance: 1e-9, run: gap_bounds },
    Check { name: "commuting_spectrum", tolerance: 1e-9, run: commuting_spectrum },
    Check { name: "holevo_bound", tolerance: 1e-9, run: holevo_bound },
    Check { name: "holevo_identity", tolerance: 1e-8, run: holevo_identity },
    Check { name: "cost_bound", tolerance: 1e-9, run: cost_bound },
    Check { name: "weight_one_gap", tolerance: 1e-9, run: weight_one_gap },
    Check { name: "stein_beta_bound", tolerance: 1e-12, run: stein_beta_bound },
    Check { name: "stein_classical_oracle", tolerance: 1e-10, run: stein_classical_oracle },
    Check { name: "test_idempotence", tolerance: 1e-10, run: projection_idempotence },
    Check { name: "repetition_code_bound", tolerance: 1e-9, run: repetition_code_bound },
    Check { name: "decoder_completeness", tolerance: 1e-9, run: decoder_completeness },
];

/// Runs the bank sequentially; each check gets its own sampler derived from `seed`.
pub fn run_checks(seed: u64) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut sampler = StateSampler::new(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1)));
            match (c.run)(&mut sampler) {
                Ok(v) => CheckResult {
                    check_name: c.name,
                    pass: v <= c.tolerance,
                    worst_violation: Some(v),
                },
                Err(_) => CheckResult {
                    check_name: c.name,
                    pass: false,
                    worst_violation: None,
                },
            }
        })
        .collect()
}
