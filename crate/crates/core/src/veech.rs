//! Elimination of candidate surfaces via the Veech dichotomy.
//!
//! On a lattice surface every completely periodic direction has pairwise
//! commensurable cylinder moduli. The audit scans saddle-connection
//! directions in order of increasing length and stops at the first
//! completely periodic direction with two incommensurable moduli, recording
//! it as a [`Certificate`] that [`verify_certificate`] rechecks from scratch.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{
    cylinder_modulus, decompose, direction_sort_key, projective_direction, saddle_connections,
    DecompositionStatus, FlowError, DEFAULT_STEP_CAP,
};
use crate::geom::Vec2;
use crate::models::{CandidateSpec, Catalog, ModelError};
use crate::qfield::QuadElem;
use crate::surface::TranslationSurface;

pub const DISCLAIMER: &str = "A not_eliminated verdict only means that no periodic direction with \
incommensurable moduli was found within the configured bounds. It is not evidence that the \
surface is a lattice surface.";

pub const DEFAULT_LENGTH_BOUND: i64 = 20;
pub const DEFAULT_MAX_DIRECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VeechError {
    #[error("modulus {index} is not positive")]
    NonPositiveModulus { index: usize },
    #[error("invalid audit configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// First pair `(i, j)`, `i < j` in lexicographic order, whose modulus ratio
/// `m_i / m_j` is irrational, with that ratio.
pub fn commensurability_witness(moduli: &[QuadElem]) -> Result<Option<(usize, usize, QuadElem)>, VeechError> {
    if let Some(index) = moduli.iter().position(|m| !m.is_positive()) {
        return Err(VeechError::NonPositiveModulus { index });
    }
    for i in 0..moduli.len() {
        for j in i + 1..moduli.len() {
            let ratio = &moduli[i] / &moduli[j];
            if !ratio.is_rational() {
                return Ok(Some((i, j, ratio)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    /// Saddle connections up to this length supply the scanned directions.
    pub length_bound: QuadElem,
    pub step_cap: usize,
    pub max_directions: usize,
}

impl AuditConfig {
    pub fn with_field(d: u64) -> Self {
        AuditConfig {
            length_bound: QuadElem::int(DEFAULT_LENGTH_BOUND, d),
            step_cap: DEFAULT_STEP_CAP,
            max_directions: DEFAULT_MAX_DIRECTIONS,
        }
    }

    fn validate(&self) -> Result<(), VeechError> {
        if !self.length_bound.is_positive() {
            return Err(VeechError::BadConfig("length bound must be positive".into()));
        }
        if self.step_cap == 0 || self.max_directions == 0 {
            return Err(VeechError::BadConfig("caps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderRecord {
    pub circumference: QuadElem,
    pub height: QuadElem,
    pub modulus: QuadElem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub direction: Vec2,
    pub cylinders: Vec<CylinderRecord>,
    pub witness: [usize; 2],
    pub ratio: QuadElem,
    /// Step cap under which the decomposition was found.
    pub step_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanStats {
    pub directions_scanned: usize,
    pub periodic: usize,
    /// Periodic directions whose moduli are pairwise commensurable.
    pub parabolic: usize,
    pub undetermined: usize,
    /// Saddle connections found at the largest length bound reached.
    pub saddle_connections: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Eliminated,
    NotEliminated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditOutcome {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub stats: ScanStats,
}

/// One report per audited candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditReport {
    pub candidate: CandidateSpec,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub config: AuditConfig,
    pub stats: ScanStats,
    pub disclaimer: String,
}

impl AuditReport {
    pub fn new(candidate: CandidateSpec, outcome: AuditOutcome, config: AuditConfig) -> Self {
        AuditReport {
            candidate,
            verdict: outcome.verdict,
            certificate: outcome.certificate,
            config,
            stats: outcome.stats,
            disclaimer: DISCLAIMER.to_string(),
        }
    }
}

enum Probe {
    Undetermined,
    Parabolic,
    Witness(Certificate),
}

fn probe(s: &TranslationSurface, dir: &Vec2, step_cap: usize) -> Result<Probe, VeechError> {
    let dec = decompose(s, dir, step_cap)?;
    let periodic = match &dec.status {
        DecompositionStatus::Periodic(p) => p,
        DecompositionStatus::Undetermined { .. } => return Ok(Probe::Undetermined),
    };
    debug_assert!(periodic.area_check.holds());
    let moduli: Vec<QuadElem> = periodic.cylinders.iter().map(cylinder_modulus).collect();
    Ok(match commensurability_witness(&moduli)? {
        None => Probe::Parabolic,
        Some((i, j, ratio)) => Probe::Witness(Certificate {
            direction: dec.direction.clone(),
            cylinders: periodic
                .cylinders
                .iter()
                .zip(moduli)
                .map(|(c, modulus)| CylinderRecord {
                    circumference: c.circumference.clone(),
                    height: c.height.clone(),
                    modulus,
                })
                .collect(),
            witness: [i, j],
            ratio,
            step_cap,
        }),
    })
}

/// Directions of saddle connections no longer than `bound`, each taken up to
/// sign, ordered by the length of the shortest saddle connection in that
/// direction and then lexicographically.
fn sc_directions(s: &TranslationSurface, bound: &QuadElem) -> Result<(Vec<Vec2>, usize), VeechError> {
    let scs = saddle_connections(s, bound)?;
    let mut keyed: Vec<(QuadElem, [BigInt; 4], Vec2)> = scs
        .iter()
        .map(|sc| {
            let dir = projective_direction(&sc.holonomy)?;
            Ok((sc.holonomy.norm2(), direction_sort_key(&dir), dir))
        })
        .collect::<Result<_, FlowError>>()?;
    keyed.sort_by(|a, b| a.0.cmp_value(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut seen: BTreeSet<[BigInt; 4]> = BTreeSet::new();
    let dirs = keyed
        .into_iter()
        .filter(|(_, key, _)| seen.insert(key.clone()))
        .map(|(_, _, dir)| dir)
        .collect();
    Ok((dirs, scs.len()))
}

/// Scans the horizontal and vertical directions, then saddle-connection
/// directions by increasing length, with the length bound doubled from 2 up
/// to `config.length_bound`. Directions are decomposed in parallel batches;
/// the first witness in scan order wins, so the outcome does not depend on
/// the number of worker threads.
pub fn audit_candidate(s: &TranslationSurface, config: &AuditConfig) -> Result<AuditOutcome, VeechError> {
    config.validate()?;
    let d = s.field();
    let mut stats = ScanStats::default();
    let mut scanned: BTreeSet<[BigInt; 4]> = BTreeSet::new();
    let batch = 4 * rayon::current_num_threads().max(1);

    let mut run = |dirs: Vec<Vec2>, stats: &mut ScanStats| -> Result<Option<Certificate>, VeechError> {
        let fresh: Vec<Vec2> = dirs
            .into_iter()
            .filter(|v| scanned.insert(direction_sort_key(v)))
            .collect();
        for chunk in fresh.chunks(batch) {
            let room = config.max_directions - stats.directions_scanned;
            let chunk = &chunk[..chunk.len().min(room)];
            let results: Vec<Result<Probe, VeechError>> =
                chunk.par_iter().map(|v| probe(s, v, config.step_cap)).collect();
            for r in results {
                stats.directions_scanned += 1;
                match r? {
                    Probe::Undetermined => stats.undetermined += 1,
                    Probe::Parabolic => {
                        stats.periodic += 1;
                        stats.parabolic += 1;
                    }
                    Probe::Witness(cert) => {
                        stats.periodic += 1;
                        return Ok(Some(cert));
                    }
                }
            }
            if stats.directions_scanned >= config.max_directions {
                break;
            }
        }
        Ok(None)
    };

    let eliminated = |cert: Certificate, stats: ScanStats| AuditOutcome {
        verdict: Verdict::Eliminated,
        certificate: Some(cert),
        stats,
    };
    let axes = vec![Vec2::ints(1, 0, d), Vec2::ints(0, 1, d)];
    if let Some(cert) = run(axes, &mut stats)? {
        return Ok(eliminated(cert, stats));
    }
    let mut bound = QuadElem::int(2, d).min_value(&config.length_bound).clone();
    loop {
        if stats.directions_scanned >= config.max_directions {
            break;
        }
        let (dirs, count) = sc_directions(s, &bound)?;
        stats.saddle_connections = count;
        if let Some(cert) = run(dirs, &mut stats)? {
            return Ok(eliminated(cert, stats));
        }
        if bound == config.length_bound {
            break;
        }
        bound = (&bound + &bound).min_value(&config.length_bound).clone();
    }
    Ok(AuditOutcome {
        verdict: Verdict::NotEliminated,
        certificate: None,
        stats,
    })
}

/// Rechecks a certificate using only the surface: the decomposition is
/// recomputed, the recorded cylinders must match it up to order, and the
/// witness ratio is recomputed from the moduli.
pub fn verify_certificate(s: &TranslationSurface, cert: &Certificate) -> bool {
    let Ok(dec) = decompose(s, &cert.direction, cert.step_cap.max(1)) else {
        return false;
    };
    let Some(periodic) = dec.periodic() else {
        return false;
    };
    if !periodic.area_check.holds() {
        return false;
    }
    let mut actual: Vec<(String, String)> = periodic
        .cylinders
        .iter()
        .map(|c| (c.circumference.to_string(), c.height.to_string()))
        .collect();
    let mut recorded: Vec<(String, String)> = cert
        .cylinders
        .iter()
        .map(|c| (c.circumference.to_string(), c.height.to_string()))
        .collect();
    actual.sort();
    recorded.sort();
    if actual != recorded {
        return false;
    }
    let moduli: Vec<QuadElem> = cert
        .cylinders
        .iter()
        .map(|c| &c.height / &c.circumference)
        .collect();
    if cert.cylinders.iter().zip(&moduli).any(|(c, m)| &c.modulus != m) {
        return false;
    }
    let [i, j] = cert.witness;
    if i == j || i >= moduli.len() || j >= moduli.len() || !moduli[j].is_positive() {
        return false;
    }
    let ratio = &moduli[i] / &moduli[j];
    !ratio.is_rational() && ratio == cert.ratio
}

/// Builds a spec from the catalog and audits it.
pub fn audit_spec(
    spec: &CandidateSpec,
    catalog: &Catalog,
    config: &AuditConfig,
) -> Result<AuditReport, VeechError> {
    let cand = spec.build(catalog)?;
    let outcome = audit_candidate(&cand.surface, config)?;
    Ok(AuditReport::new(spec.clone(), outcome, config.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{table1_rows, ModelParams, ModelRef};
    use crate::surface::fixtures;

    fn fixture(name: &str) -> TranslationSurface {
        let d = 2;
        let p = ModelParams {
            d,
            w2: QuadElem::one(d),
            h2: QuadElem::one(d),
            t1: QuadElem::zero(d),
            t2: QuadElem::zero(d),
            s: QuadElem::zero(d),
        };
        Catalog::builtin()
            .fixture(name)
            .unwrap()
            .build(&p)
            .unwrap()
            .surface
    }

    fn config(d: u64, bound: i64) -> AuditConfig {
        AuditConfig {
            length_bound: QuadElem::int(bound, d),
            ..AuditConfig::with_field(d)
        }
    }

    #[test]
    fn witnesses() {
        let d = 2;
        let q = |a: i64, b: i64| QuadElem::frac(a, b, d);
        assert_eq!(commensurability_witness(&[q(1, 1), q(1, 5)]).unwrap(), None);
        let (i, j, r) = commensurability_witness(&[q(1, 1), q(1, 1), QuadElem::sqrt_d(d)])
            .unwrap()
            .unwrap();
        assert_eq!((i, j), (0, 2));
        assert_eq!(r, QuadElem::from_parts(0, 1, 1, 2, d));
        // (-1+√3)/2 and (-2+2√3)/4 are equal
        let a = QuadElem::from_parts(-1, 2, 1, 2, 3);
        let b = QuadElem::from_parts(-2, 4, 2, 4, 3);
        assert_eq!(commensurability_witness(&[a, b]).unwrap(), None);
        assert_eq!(
            commensurability_witness(&[q(1, 1), q(0, 1)]).unwrap_err(),
            VeechError::NonPositiveModulus { index: 1 }
        );
    }

    #[test]
    fn torus_is_not_eliminated() {
        let out = audit_candidate(&fixtures::torus(2), &config(2, 10)).unwrap();
        assert_eq!(out.verdict, Verdict::NotEliminated);
        assert!(out.certificate.is_none());
        assert_eq!(out.stats.periodic, out.stats.directions_scanned);
        assert_eq!(out.stats.parabolic, out.stats.periodic);
        assert_eq!(out.stats.undetermined, 0);
    }

    #[test]
    fn incommensurable_fixture_is_eliminated_horizontally() {
        let s = fixture("incommensurable");
        let out = audit_candidate(&s, &config(2, 10)).unwrap();
        assert_eq!(out.verdict, Verdict::Eliminated);
        assert_eq!(out.stats.directions_scanned, 1);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.direction, Vec2::ints(1, 0, 2));
        let sqrt2 = QuadElem::sqrt_d(2);
        assert!(cert.ratio == sqrt2 || cert.ratio == QuadElem::from_parts(0, 1, 1, 2, 2));
        assert!(verify_certificate(&s, &cert));
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let s = fixture("incommensurable");
        let cert = audit_candidate(&s, &config(2, 10)).unwrap().certificate.unwrap();
        let d = 2;
        let mut bad = Vec::new();
        let mut c = cert.clone();
        c.direction = Vec2::ints(1, 1, d);
        bad.push(c);
        let mut c = cert.clone();
        c.direction = Vec2::ints(0, 1, d);
        bad.push(c);
        let mut c = cert.clone();
        c.ratio = &c.ratio + &QuadElem::one(d);
        bad.push(c);
        let mut c = cert.clone();
        c.cylinders[0].height = &c.cylinders[0].height + &QuadElem::one(d);
        bad.push(c);
        let mut c = cert.clone();
        c.cylinders[1].circumference = c.cylinders[1].circumference.scale(&crate::qfield::rat(2, 1));
        bad.push(c);
        let mut c = cert.clone();
        c.cylinders[0].modulus = QuadElem::one(d);
        bad.push(c);
        let mut c = cert.clone();
        c.witness = [0, 0];
        bad.push(c);
        let mut c = cert.clone();
        c.witness = [0, 5];
        bad.push(c);
        let mut c = cert.clone();
        c.cylinders.pop();
        bad.push(c);
        for c in &bad {
            assert!(!verify_certificate(&s, c), "{c:?}");
        }
        // the certificate is about this surface, not the L
        assert!(!verify_certificate(&fixture("l-shape"), &cert));
    }

    #[test]
    fn bad_configs() {
        let s = fixtures::torus(2);
        let mut c = config(2, 0);
        assert!(matches!(audit_candidate(&s, &c), Err(VeechError::BadConfig(_))));
        c = config(2, 5);
        c.max_directions = 0;
        assert!(matches!(audit_candidate(&s, &c), Err(VeechError::BadConfig(_))));
    }

    #[test]
    fn max_directions_caps_the_scan() {
        let mut c = config(2, 10);
        c.max_directions = 3;
        let out = audit_candidate(&fixtures::torus(2), &c).unwrap();
        assert_eq!(out.stats.directions_scanned, 3);
        assert_eq!(out.verdict, Verdict::NotEliminated);
    }

    #[test]
    fn outcome_does_not_depend_on_threads() {
        let row = &table1_rows()[0];
        let d = row.d;
        let spec = CandidateSpec {
            model: ModelRef::Number(6),
            d,
            w2: row.w2.clone(),
            h2: row.h2.clone(),
            t1: QuadElem::frac(1, 3, d),
            t2: QuadElem::frac(2, 3, d),
            s: QuadElem::frac(2, 3, d),
            matrix: None,
        };
        let cat = Catalog::builtin();
        let cfg = config(d, 8);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| audit_spec(&spec, &cat, &cfg).unwrap())
        };
        let one = run(1);
        assert_eq!(one.verdict, Verdict::Eliminated);
        let cand = spec.build(&cat).unwrap();
        assert!(verify_certificate(
            &cand.surface,
            one.certificate.as_ref().unwrap()
        ));
        for t in [2, 3, 8] {
            assert_eq!(run(t), one);
        }
        let json = serde_json::to_string(&one).unwrap();
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, one);
    }
}
