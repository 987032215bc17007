#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use relsin_core::analysis::{AnalysisOptions, PerturbationAnalysis};
use relsin_core::bounds::{bound_step1, PNorm};
use relsin_core::matpair::{cholesky, SymMatrix};

/// Slack on every bound comparison.
pub const SLACK: f64 = 1e-12;

pub fn random_orthogonal(n: usize, rng: &mut ChaCha20Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

/// `Q diag(10^u) Qᵀ` with `u` uniform in `[-spread, spread]`.
pub fn random_spd(n: usize, spread: f64, rng: &mut ChaCha20Rng) -> SymMatrix {
    let q = random_orthogonal(n, rng);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| 10f64.powf(rng.random_range(-spread..=spread))));
    SymMatrix::symmetrize(&(&q * d * q.transpose())).unwrap()
}

/// Random symmetric matrix scaled to spectral norm `norm`.
pub fn random_symmetric(n: usize, norm: f64, rng: &mut ChaCha20Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let s = (&a + a.transpose()) * 0.5;
    let current = s.clone().symmetric_eigenvalues().amax();
    if current == 0.0 {
        return DMatrix::zeros(n, n);
    }
    s * (norm / current)
}

/// `L (I + E) Lᵀ` with `A = L Lᵀ` and `‖E‖₂ = eta`, so that the relative
/// distance of the result to `A` is exactly `eta`.
pub fn congruence_perturb(a: &SymMatrix, eta: f64, rng: &mut ChaCha20Rng) -> SymMatrix {
    let n = a.dim();
    let l = cholesky(a).unwrap().into_l();
    let e = random_symmetric(n, eta, rng);
    SymMatrix::symmetrize(&(&l * (DMatrix::identity(n, n) + e) * l.transpose())).unwrap()
}

pub struct Instance {
    pub h: SymMatrix,
    pub m: SymMatrix,
    pub h_tilde: SymMatrix,
    pub m_tilde: SymMatrix,
    pub k: usize,
}

/// `n ∈ [2, 8]`, `k ∈ [1, n−1]`, both relative perturbation sizes in `[0, 0.1]`.
pub fn random_instance(rng: &mut ChaCha20Rng) -> Instance {
    let n = rng.random_range(2..=8);
    let k = rng.random_range(1..n);
    let h = random_spd(n, 2.0, rng);
    let m = random_spd(n, 1.0, rng);
    let eta_h = rng.random_range(0.0..=0.1);
    let eta_m = rng.random_range(0.0..=0.1);
    let h_tilde = congruence_perturb(&h, eta_h, rng);
    let m_tilde = congruence_perturb(&m, eta_m, rng);
    Instance { h, m, h_tilde, m_tilde, k }
}

#[derive(Debug, Default)]
pub struct ValidityTally {
    pub instances: usize,
    pub checks: usize,
    pub skipped: usize,
    pub violations: Vec<String>,
}

impl ValidityTally {
    fn check(&mut self, label: &str, exact: f64, bound: f64, seed: u64) {
        self.checks += 1;
        if !(exact <= bound + SLACK) {
            self.violations.push(format!("seed {seed}: {label}: exact {exact:e} > bound {bound:e}"));
        }
    }
}

/// Checks every bound whose hypotheses hold against the exact angles.
pub fn validity_run(instances: usize, seed: u64) -> ValidityTally {
    use rand::SeedableRng;
    let mut tally = ValidityTally::default();
    for i in 0..instances {
        let s = seed.wrapping_add(i as u64);
        let mut rng = ChaCha20Rng::seed_from_u64(s);
        let inst = random_instance(&mut rng);
        let a = match PerturbationAnalysis::run(
            &inst.h,
            &inst.m,
            &inst.h_tilde,
            &inst.m_tilde,
            inst.k,
            &AnalysisOptions::default(),
        ) {
            Ok(a) => a,
            Err(_) => {
                tally.skipped += 1;
                continue;
            }
        };
        tally.instances += 1;
        if a.degenerate_split {
            tally.skipped += 1;
            continue;
        }

        if let Ok(b) = bound_step1(a.measure_h.psi2, a.gaps.relgap) {
            tally.check("step1 spectral", a.angle_step1.norm2, b, s);
        }
        if let Ok(b) = bound_step1(a.measure_h.psi_f, a.gaps.relgap) {
            tally.check("step1 frobenius", a.angle_step1.norm_f, b, s);
        }
        if a.gaps.relgap_comp > 0.0 {
            tally.check("step2 coupling frobenius", a.coupling.norm_f, a.measure_m.psi_f / a.gaps.relgap_comp, s);
        }
        for p in PNorm::ALL {
            let main = a.main_bound(p);
            if main.applicable {
                tally.check(&format!("step2 coupling p={p}"), a.coupling.norm2, main.step2, s);
                tally.check(&format!("step2 corrected p={p}"), a.angle_step2.norm2, main.step2 * main.correction_factor, s);
                tally.check(&format!("main p={p}"), a.angle_total.norm2, main.total, s);
            }
            let phi = a.phi_bound(p);
            if phi.applicable {
                tally.check(&format!("phi p={p}"), a.angle_total.norm2, phi.total, s);
            }
        }
        if a.bound_frobenius.applicable {
            tally.check("frobenius", a.angle_total.norm_f, a.bound_frobenius.total, s);
        }
    }
    tally
}

fn quad(a: &DMatrix<f64>, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    (x.transpose() * a * y)[(0, 0)]
}

#[derive(Debug, Default)]
pub struct MeasureTally {
    pub instances: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl MeasureTally {
    /// `lhs <= rhs` up to a relative `SLACK` of `scale`.
    fn check(&mut self, label: &str, lhs: f64, rhs: f64, scale: f64, seed: u64) {
        self.checks += 1;
        if !(lhs <= rhs + SLACK * scale.abs().max(1.0)) {
            self.violations.push(format!("seed {seed}: {label}: {lhs:e} > {rhs:e}"));
        }
    }
}

/// Relative-measure inequalities between `η`, `Ψ` and `Φ`, the quadratic-form
/// bounds on `A`, on its inverse and on a lumped diagonal, on random SPD data.
pub fn measure_inequality_run(instances: usize, seed: u64) -> MeasureTally {
    use rand::SeedableRng;
    use relsin_core::matpair::spd_inverse;
    use relsin_core::perturb::{eta_of_inverse, lump, measure, psi_bound_from_eta};

    let mut tally = MeasureTally::default();
    for i in 0..instances {
        let s = seed.wrapping_add(i as u64);
        let mut rng = ChaCha20Rng::seed_from_u64(s);
        let n = rng.random_range(2..=8);
        let a = random_spd(n, 1.0, &mut rng);
        let eta_target = rng.random_range(0.0..0.9);
        let at = congruence_perturb(&a, eta_target, &mut rng);
        let m = measure(&a, &at).unwrap();
        tally.instances += 1;

        let psi_cap = psi_bound_from_eta(m.eta).unwrap();
        tally.check("psi2 <= eta/sqrt(1-eta)", m.psi2, psi_cap, 1.0, s);
        tally.check("psi_f <= phi_f/sqrt(1-eta)", m.psi_f, m.phi_f / (1.0 - m.eta).sqrt(), m.phi_f, s);
        tally.check("phi2 == eta", (m.phi2 - m.eta).abs(), 0.0, 1.0, s);

        let delta = a.as_matrix() - at.as_matrix();
        let inv = spd_inverse(&a).unwrap();
        let inv_t = spd_inverse(&at).unwrap();
        let delta_inv = inv_t.as_matrix() - inv.as_matrix();
        let eta_inv = eta_of_inverse(m.eta).unwrap();
        for _ in 0..4 {
            let x = DMatrix::from_fn(n, 1, |_, _| rng.random_range(-1.0..1.0));
            let y = DMatrix::from_fn(n, 1, |_, _| rng.random_range(-1.0..1.0));
            let xax = quad(a.as_matrix(), &x, &x);
            tally.check("|x*dA x| <= eta x*Ax", quad(&delta, &x, &x).abs(), m.eta * xax, xax, s);
            let cross = (xax * quad(at.as_matrix(), &y, &y)).sqrt();
            tally.check("|x*dA y| <= psi-cap sqrt(x*Ax y*A~y)", quad(&delta, &x, &y).abs(), psi_cap * cross, cross, s);
            let xix = quad(inv.as_matrix(), &x, &x);
            tally.check(
                "|x*(A~^-1 - A^-1)x| <= eta/(1-eta) x*A^-1 x",
                quad(&delta_inv, &x, &x).abs(),
                eta_inv * xix,
                xix,
                s,
            );
        }
        let inverse_measure = measure(&inv, &inv_t).unwrap();
        tally.check("eta(A^-1, A~^-1) <= eta/(1-eta)", inverse_measure.eta, eta_inv, 1.0, s);

        let d = SymMatrix::from_diagonal(&a.diagonal()).unwrap();
        let (lumped, eta_lump) = lump(&a, &d).unwrap();
        let x = DMatrix::from_fn(n, 1, |_, _| rng.random_range(-1.0..1.0));
        let xlx = quad(lumped.as_matrix(), &x, &x);
        let lumped_delta = a.as_matrix() - lumped.as_matrix();
        tally.check("|x*(M-M~)x| <= eta x*M~x", quad(&lumped_delta, &x, &x).abs(), eta_lump * xlx, xlx, s);
        let back = measure(&lumped, &a).unwrap();
        tally.check("lumped eta is the relative distance", (back.eta - eta_lump).abs(), 0.0, 1.0, s);
    }
    tally
}

/// Random sparse symmetric matrix with values spread over many magnitudes.
pub fn random_sparse_symmetric(rng: &mut ChaCha20Rng) -> SymMatrix {
    let n = rng.random_range(1..=12);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            if i == j || rng.random_bool(0.4) {
                let magnitude = 10f64.powf(rng.random_range(-30.0..30.0));
                let v = if rng.random_bool(0.5) { -magnitude } else { magnitude };
                a[(i, j)] = v;
            }
        }
    }
    SymMatrix::from_lower(a).unwrap()
}

/// Number of matrices whose written form does not parse back bit for bit.
pub fn mtx_round_trip_failures(count: usize, seed: u64) -> Vec<String> {
    use rand::SeedableRng;
    use relsin_core::io::{parse_mtx, write_mtx};
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..count {
        let a = random_sparse_symmetric(&mut rng);
        let mut buf = Vec::new();
        write_mtx(&a, &mut buf).unwrap();
        match parse_mtx(&buf[..]) {
            Ok(b) if a.as_matrix().iter().zip(b.as_matrix().iter()).all(|(x, y)| x.to_bits() == y.to_bits()) => {}
            Ok(_) => failures.push(format!("matrix {i}: values differ after round trip")),
            Err(e) => failures.push(format!("matrix {i}: {e}")),
        }
    }
    failures
}

#[derive(Debug, Default)]
pub struct FuzzTally {
    pub cases: usize,
    pub rejected: usize,
    pub accepted: usize,
    pub failures: Vec<String>,
}

fn mutate(bytes: &mut Vec<u8>, rng: &mut ChaCha20Rng) {
    const ALPHABET: &[u8] = b"0123456789 -+.eE%\n\rxX\t\xff\x00";
    for _ in 0..rng.random_range(1..=4) {
        if bytes.is_empty() {
            bytes.push(ALPHABET[rng.random_range(0..ALPHABET.len())]);
            continue;
        }
        let at = rng.random_range(0..bytes.len());
        match rng.random_range(0..6) {
            0 => bytes[at] = rng.random(),
            1 => bytes[at] = ALPHABET[rng.random_range(0..ALPHABET.len())],
            2 => {
                bytes.remove(at);
            }
            3 => bytes.insert(at, ALPHABET[rng.random_range(0..ALPHABET.len())]),
            4 => bytes.truncate(at),
            _ => {
                let end = (at + rng.random_range(1..20)).min(bytes.len());
                let chunk: Vec<u8> = bytes[at..end].to_vec();
                let to = rng.random_range(0..=bytes.len());
                bytes.splice(to..to, chunk);
            }
        }
    }
}

/// Random byte mutations of valid files: every rejection must carry a
/// line number and nothing may panic.
pub fn mtx_fuzz(count: usize, seed: u64) -> FuzzTally {
    use rand::SeedableRng;
    use relsin_core::io::{parse_mtx, write_mtx};
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut tally = FuzzTally::default();
    for i in 0..count {
        let a = random_sparse_symmetric(&mut rng);
        let mut bytes = Vec::new();
        write_mtx(&a, &mut bytes).unwrap();
        mutate(&mut bytes, &mut rng);
        tally.cases += 1;
        match std::panic::catch_unwind(|| parse_mtx(&bytes[..])) {
            Ok(Ok(_)) => tally.accepted += 1,
            Ok(Err(e)) if e.line() >= 1 => tally.rejected += 1,
            Ok(Err(e)) => tally.failures.push(format!("case {i}: error without line number: {e}")),
            Err(_) => tally.failures.push(format!("case {i}: parser panicked")),
        }
    }
    tally
}
