//! Self-test suite: re-runs the oracle equivalences, period scans,
//! round-trips and shift probes, and renders one line per check.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::oracle::{irreducible_by_root_scan, period_scan, seq_iterative, shift_probe};
use crate::scheme::{
    decrypt, encrypt_det, encrypt_prob, keygen, l_map, KeyMaterial, SchemeError,
};
use crate::sequence::{is_irreducible_cubic_unchecked, reciprocal_pair, seq_pair, Generator};

/// One line of the report. Informational lines carry no pass/fail verdict
/// and never affect the exit status.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub passed: Option<bool>,
    pub detail: String,
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Default)]
pub struct SelftestReport {
    pub lines: Vec<CheckLine>,
}

impl SelftestReport {
    pub fn hard_pass(&self) -> bool {
        self.lines.iter().all(|l| l.passed != Some(false))
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.lines.push(CheckLine {
            name: name.to_string(),
            passed: Some(passed),
            detail,
        });
    }

    fn info(&mut self, name: &str, detail: String) {
        self.lines.push(CheckLine {
            name: name.to_string(),
            passed: None,
            detail,
        });
    }
}

/// Run the suite. `full` scales up the randomized case counts.
pub fn run(full: bool) -> SelftestReport {
    let mut report = SelftestReport::default();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC0DEC0DE);

    engine_vs_oracle(&mut report, &mut rng, full);
    irreducibility_equivalence(&mut report, full);
    period_scans(&mut report, &mut rng, full);
    reciprocal_identity(&mut report, &mut rng, full);
    composition_identity(&mut report, &mut rng, full);
    round_trips(&mut report, &mut rng);
    shift_probes(&mut report, &mut rng);

    report
}

fn engine_vs_oracle(report: &mut SelftestReport, rng: &mut ChaCha20Rng, full: bool) {
    let cases = if full { 2500 } else { 300 };
    let max_k: i64 = if full { 10_000 } else { 2_000 };
    let mut failures = 0;
    for _ in 0..cases {
        let m = rng.gen_range(2u64..1_000_000);
        let g = Generator::new(
            BigUint::from(rng.gen_range(0..m)),
            BigUint::from(rng.gen_range(0..m)),
            BigUint::from(m),
        );
        let k = BigInt::from(rng.gen_range(-max_k..=max_k));
        if seq_iterative(&g, &k).unwrap() != seq_pair(&g, &k) {
            failures += 1;
        }
    }
    // exhaustive small exponents on a handful of generators
    for (a, b, m) in [(0u64, 1u64, 1225u64), (2, 9, 99991), (7, 13, 1 << 20)] {
        let g = Generator::new(BigUint::from(a), BigUint::from(b), BigUint::from(m));
        for k in -64i64..=64 {
            let k = BigInt::from(k);
            if seq_iterative(&g, &k).unwrap() != seq_pair(&g, &k) {
                failures += 1;
            }
        }
    }
    report.check(
        "engine-vs-oracle",
        failures == 0,
        format!("{failures} disagreements over {cases} random + 3x129 exhaustive cases"),
    );
}

fn irreducibility_equivalence(report: &mut SelftestReport, full: bool) {
    let primes: &[u64] = if full { &[3, 5, 7, 11, 13] } else { &[3, 5, 7, 11] };
    let mut failures = 0;
    let mut total = 0;
    for &p in primes {
        let pb = BigUint::from(p);
        for a in 0..p {
            for b in 0..p {
                total += 1;
                let fast =
                    is_irreducible_cubic_unchecked(&BigUint::from(a), &BigUint::from(b), &pb);
                if fast != irreducible_by_root_scan(a, b, p) {
                    failures += 1;
                }
            }
        }
    }
    report.check(
        "irreducibility-equivalence",
        failures == 0,
        format!("{failures} disagreements over {total} exhaustive (a, b, p) cases"),
    );
}

fn period_scans(report: &mut SelftestReport, rng: &mut ChaCha20Rng, full: bool) {
    let wanted = if full { 20 } else { 10 };
    let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43];
    let mut failures = 0;
    let mut found = 0;
    while found < wanted {
        let p = primes[rng.gen_range(0..primes.len())];
        let a = rng.gen_range(0..p);
        let b = rng.gen_range(0..p);
        if !irreducible_by_root_scan(a, b, p) {
            continue;
        }
        found += 1;
        match period_scan(a, b, p) {
            Ok(t) if (p * p + p + 1).is_multiple_of(t) => {}
            _ => failures += 1,
        }
        // the full-period claim itself
        let g = Generator::new(BigUint::from(a), BigUint::from(b), BigUint::from(p));
        let t = BigInt::from(p * p + p + 1);
        let sp = seq_pair(&g, &t);
        if sp.s_k != BigUint::from(3u32) % BigUint::from(p)
            || sp.s_neg_k != BigUint::from(3u32) % BigUint::from(p)
        {
            failures += 1;
        }
    }
    report.check(
        "period-divides-p2p1",
        failures == 0,
        format!("{failures} failures over {wanted} irreducible generators"),
    );
}

fn reciprocal_identity(report: &mut SelftestReport, rng: &mut ChaCha20Rng, full: bool) {
    let cases = if full { 1000 } else { 200 };
    let mut failures = 0;
    for _ in 0..cases {
        let m = rng.gen_range(2u64..1_000_000);
        let g = Generator::new(
            BigUint::from(rng.gen_range(0..m)),
            BigUint::from(rng.gen_range(0..m)),
            BigUint::from(m),
        );
        let k = BigInt::from(rng.gen::<i64>() >> 8);
        if seq_pair(&g, &k).s_neg_k != seq_pair(&reciprocal_pair(&g), &k).s_k {
            failures += 1;
        }
    }
    report.check(
        "reciprocal-identity",
        failures == 0,
        format!("{failures} failures over {cases} random cases"),
    );
}

fn composition_identity(report: &mut SelftestReport, rng: &mut ChaCha20Rng, full: bool) {
    let km = KeyMaterial::sample(16, rng);
    let g = km.generator();
    let n2 = km.n_squared();
    let cases = if full { 100 } else { 30 };
    let mut failures = 0;
    for _ in 0..cases {
        let k = rng.gen_biguint(64);
        let e = rng.gen_biguint(64);
        let inner = seq_pair(&g, &BigInt::from(k.clone()));
        let composed = seq_pair(
            &Generator::new(inner.s_k, inner.s_neg_k, n2.clone()),
            &BigInt::from(e.clone()),
        );
        let direct = seq_pair(&g, &BigInt::from(&k * &e));
        if composed.s_k != direct.s_k {
            failures += 1;
        }
    }
    report.check(
        "composition-identity",
        failures == 0,
        format!("{failures} failures over {cases} random (k, e) pairs"),
    );
}

fn round_trips(report: &mut SelftestReport, rng: &mut ChaCha20Rng) {
    match keygen(16, rng) {
        Ok((pk, sk)) => {
            let mut failures = 0;
            for _ in 0..20 {
                let m = rng.gen_biguint_below(&pk.n);
                let det_ok = encrypt_det(&pk, &m)
                    .and_then(|ct| decrypt(&sk, &ct))
                    .map(|d| d == m)
                    .unwrap_or(false);
                let prob_ok = encrypt_prob(&pk, &m, rng)
                    .and_then(|ct| decrypt(&sk, &ct))
                    .map(|d| d == m)
                    .unwrap_or(false);
                if !det_ok || !prob_ok {
                    failures += 1;
                }
            }
            report.check("keygen", true, "16-bit key generated".to_string());
            report.check(
                "round-trip",
                failures == 0,
                format!("{failures} failures over 20 messages, both modes"),
            );
        }
        Err(SchemeError::KeygenExhausted { attempts, .. }) => {
            report.check(
                "keygen",
                false,
                format!(
                    "exhausted after {attempts} attempts: L(a, b) is 0 mod n for every \
                     irreducible generator, so no key can satisfy the invertibility invariant"
                ),
            );
            report.check(
                "round-trip",
                false,
                "skipped: no key available (keygen exhausted)".to_string(),
            );
        }
        Err(e) => {
            report.check("keygen", false, format!("unexpected error: {e}"));
            report.check("round-trip", false, "skipped".to_string());
        }
    }
}

fn shift_probes(report: &mut SelftestReport, rng: &mut ChaCha20Rng) {
    let km = KeyMaterial::sample(8, rng);
    for k in [BigInt::one(), BigInt::from(2)] {
        let probe = shift_probe(&km.p, &km.q, &km.a, &km.b, &k);
        report.info("shift-probe", probe.to_string());
    }
    let probe = shift_probe(
        &km.p,
        &km.q,
        &km.a,
        &km.b,
        &BigInt::from(km.lambda.clone()),
    );
    report.info("shift-probe", format!("(k = lambda) {probe}"));
    // L values before and after the shift, for the record
    let ell = l_map(&km.a, &km.b, &km.n, &km.lambda).expect("generator in Gamma");
    let shifted = (&km.a + &km.n) % km.n_squared();
    let ell_shifted = l_map(&shifted, &km.b, &km.n, &km.lambda).expect("shifted in Gamma");
    report.info(
        "shift-probe",
        format!("L(a, b) = {ell}, L(a + n, b) = {ell_shifted} (mod n = {})", km.n),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_structure() {
        let report = run(false);
        // hard checks all pass except the keygen/round-trip pair, which
        // honestly reports the trapdoor degeneracy
        for line in &report.lines {
            match line.name.as_str() {
                "keygen" | "round-trip" => assert_eq!(line.passed, Some(false), "{line}"),
                "shift-probe" => assert_eq!(line.passed, None),
                _ => assert_eq!(line.passed, Some(true), "{line}"),
            }
        }
        assert!(!report.hard_pass());
        // probe lines present for k = 1, 2, lambda
        let probes: Vec<_> = report
            .lines
            .iter()
            .filter(|l| l.name == "shift-probe")
            .collect();
        assert_eq!(probes.len(), 4);
    }

    #[test]
    fn shift_probe_verdict_stable_across_runs() {
        let a = run(false);
        let b = run(false);
        let probes = |r: &SelftestReport| {
            r.lines
                .iter()
                .filter(|l| l.name == "shift-probe")
                .map(|l| l.detail.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(probes(&a), probes(&b));
    }
}
