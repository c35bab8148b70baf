//! Training/test data for flux surrogates: sampled Riemann state pairs,
//! Godunov targets, optional low-fidelity fluxes, stress scenarios, and
//! CSV persistence.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::ApproxError;
use crate::exact::{self, RiemannError, RiemannFluxQuery};
use crate::neural::TrainingSet;
use crate::physics::PdeSystem;
use crate::state::{FluxVector, StateVector};
use crate::surrogate::{lf_flux, LfSolver, SurrogateKind};

/// Depths this close to zero are rejected while sampling so the Roe
/// low-fidelity flux stays evaluable on every record.
const MIN_SAMPLED_DEPTH: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid sampling spec: {0}")]
    InvalidSpec(String),
    #[error("{path}:{line}: {message}")]
    Malformed { path: String, line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("exact solver failed on sample {index}: {source}")]
    Solver {
        index: usize,
        #[source]
        source: RiemannError,
    },
    #[error("low-fidelity solver failed on sample {index}: {source}")]
    LowFidelity {
        index: usize,
        #[source]
        source: ApproxError,
    },
    #[error("samples are not homogeneous: {0}")]
    Inhomogeneous(String),
}

/// Uniform ranges the input states are drawn from.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "pde", rename_all = "snake_case")]
pub enum StateRanges {
    Burgers { u_plus: [f64; 2], u_minus: [f64; 2] },
    /// Primitive height/velocity ranges applied to both sides.
    Swe { h: [f64; 2], u: [f64; 2] },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub ranges: StateRanges,
    pub count: usize,
    pub seed: u64,
}

impl SamplingSpec {
    /// Interior/exterior scalars from U(-3, 3), as in the Burgers study.
    pub fn burgers_uniform(count: usize, seed: u64) -> Self {
        SamplingSpec {
            ranges: StateRanges::Burgers { u_plus: [-3.0, 3.0], u_minus: [-3.0, 3.0] },
            count,
            seed,
        }
    }

    /// Heights from U(0, 3.5) and velocities from U(-2.5, 2.5).
    pub fn swe_uniform(count: usize, seed: u64) -> Self {
        SamplingSpec {
            ranges: StateRanges::Swe { h: [0.0, 3.5], u: [-2.5, 2.5] },
            count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let check = |r: [f64; 2], name: &str| {
            if r[0] > r[1] || !r[0].is_finite() || !r[1].is_finite() {
                Err(DatasetError::InvalidSpec(format!("range {name} = [{}, {}]", r[0], r[1])))
            } else {
                Ok(())
            }
        };
        match self.ranges {
            StateRanges::Burgers { u_plus, u_minus } => {
                check(u_plus, "u_plus")?;
                check(u_minus, "u_minus")?;
            }
            StateRanges::Swe { h, u } => {
                check(h, "h")?;
                check(u, "u")?;
                if h[0] < 0.0 {
                    return Err(DatasetError::InvalidSpec(
                        "SWE height range must start at or above zero".into(),
                    ));
                }
            }
        }
        if self.count == 0 {
            return Err(DatasetError::InvalidSpec("zero sample count".into()));
        }
        Ok(())
    }
}

fn draw_range(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.gen_range(r[0]..r[1])
    }
}

fn draw_depth(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    loop {
        let h = draw_range(rng, r);
        if h >= MIN_SAMPLED_DEPTH {
            return h;
        }
    }
}

/// Draw (U+, U-) pairs. SWE states are sampled in primitive variables and
/// converted to conserved form.
pub fn sample_states(spec: &SamplingSpec) -> Result<Vec<(StateVector, StateVector)>, DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let pair = match spec.ranges {
            StateRanges::Burgers { u_plus, u_minus } => (
                StateVector::scalar(draw_range(&mut rng, u_plus)),
                StateVector::scalar(draw_range(&mut rng, u_minus)),
            ),
            StateRanges::Swe { h, u } => {
                let h_p = draw_depth(&mut rng, h);
                let u_p = draw_range(&mut rng, u);
                let h_m = draw_depth(&mut rng, h);
                let u_m = draw_range(&mut rng, u);
                (StateVector::pair(h_p, h_p * u_p), StateVector::pair(h_m, h_m * u_m))
            }
        };
        out.push(pair);
    }
    Ok(out)
}

/// Transonic-rarefaction stress pairs: u+ from U(-3, 0) and u- from
/// U(0, 3), so the interior state expands into the exterior one across the
/// sonic point and the exact flux is identically zero.
pub fn rarefaction_scenario_burgers(count: usize, seed: u64) -> Vec<(StateVector, StateVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                StateVector::scalar(rng.gen_range(-3.0..0.0)),
                StateVector::scalar(rng.gen_range(0.0..3.0)),
            )
        })
        .collect()
}

/// Scenario-I stress pairs for the SWE: equal depths from U(0, 3) and
/// diverging velocities (interior from U(-2, 0), exterior from U(0, 2)),
/// which produces two rarefactions and a star depth below the initial one.
pub fn scenario_one_swe(count: usize, seed: u64) -> Vec<(StateVector, StateVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let h = draw_depth(&mut rng, [0.0, 3.0]);
            let u_p = rng.gen_range(-2.0..0.0);
            let u_m = rng.gen_range(0.0..2.0);
            (StateVector::pair(h, h * u_p), StateVector::pair(h, h * u_m))
        })
        .collect()
}

/// One supervised record: input states, optional low-fidelity flux, and
/// the Godunov target.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxSample {
    pub u_plus: StateVector,
    pub u_minus: StateVector,
    pub lf_flux: Option<FluxVector>,
    pub target: FluxVector,
}

/// Evaluate Godunov targets (and low-fidelity fluxes when requested) for
/// every state pair. Solver failures carry the offending sample index.
pub fn build_dataset(
    states: &[(StateVector, StateVector)],
    pde: &PdeSystem,
    with_lf: Option<LfSolver>,
) -> Result<Vec<FluxSample>, DatasetError> {
    let mut out = Vec::with_capacity(states.len());
    for (index, (u_plus, u_minus)) in states.iter().enumerate() {
        let q = RiemannFluxQuery { pde: *pde, u_plus: *u_plus, u_minus: *u_minus };
        let target =
            exact::godunov_flux(&q).map_err(|source| DatasetError::Solver { index, source })?;
        let lf = match with_lf {
            Some(solver) => Some(
                lf_flux(solver, pde, u_plus, u_minus)
                    .map_err(|source| DatasetError::LowFidelity { index, source })?,
            ),
            None => None,
        };
        out.push(FluxSample { u_plus: *u_plus, u_minus: *u_minus, lf_flux: lf, target });
    }
    Ok(out)
}

/// Pack samples into flat training arrays: vanilla models see (U+, U-),
/// bi-fidelity models see (U+, U-, H_L) and learn the residual through a
/// constant offset.
pub fn to_training_set(
    samples: &[FluxSample],
    kind: SurrogateKind,
) -> Result<TrainingSet, DatasetError> {
    if samples.is_empty() {
        return Err(DatasetError::InvalidSpec("empty sample list".into()));
    }
    let m = samples[0].target.len();
    let needs_lf = kind == SurrogateKind::BiFidelity;
    let input_dim = if needs_lf { 3 * m } else { 2 * m };
    let mut inputs = Vec::with_capacity(samples.len() * input_dim);
    let mut targets = Vec::with_capacity(samples.len() * m);
    let mut offsets = if needs_lf { Some(Vec::with_capacity(samples.len() * m)) } else { None };
    for (i, s) in samples.iter().enumerate() {
        if s.target.len() != m || s.u_plus.len() != m {
            return Err(DatasetError::Inhomogeneous(format!("sample {i} has a different width")));
        }
        inputs.extend_from_slice(s.u_plus.as_slice());
        inputs.extend_from_slice(s.u_minus.as_slice());
        if needs_lf {
            let lf = s.lf_flux.ok_or_else(|| {
                DatasetError::Inhomogeneous(format!(
                    "sample {i} lacks the low-fidelity flux a bi-fidelity model trains on"
                ))
            })?;
            inputs.extend_from_slice(lf.as_slice());
            offsets.as_mut().unwrap().extend_from_slice(lf.as_slice());
        }
        targets.extend_from_slice(s.target.as_slice());
    }
    TrainingSet::new(inputs, targets, offsets, input_dim, m)
        .map_err(|e| DatasetError::InvalidSpec(e.to_string()))
}

/// Per-flux a priori evaluation against the stored Godunov targets.
pub struct FluxEval {
    /// Relative l1 error over all samples and components.
    pub rel_l1: f64,
    /// Absolute errors indexed `[component][sample]`.
    pub abs_err: Vec<Vec<f64>>,
    pub predictions: Vec<FluxVector>,
}

pub fn evaluate_flux<E>(
    samples: &[FluxSample],
    flux: impl Fn(&StateVector, &StateVector) -> Result<FluxVector, E>,
) -> Result<FluxEval, E> {
    assert!(!samples.is_empty());
    let m = samples[0].target.len();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut abs_err = vec![Vec::with_capacity(samples.len()); m];
    let mut predictions = Vec::with_capacity(samples.len());
    for s in samples {
        let p = flux(&s.u_plus, &s.u_minus)?;
        for c in 0..m {
            let e = (s.target[c] - p[c]).abs();
            num += e;
            den += s.target[c].abs();
            abs_err[c].push(e);
        }
        predictions.push(p);
    }
    Ok(FluxEval { rel_l1: num / den, abs_err, predictions })
}

/// Shuffle 0..n with a seeded RNG and split off `n_test` indices; the two
/// halves partition the index set exactly.
pub fn split_indices(n: usize, n_test: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    assert!(n_test <= n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = idx.split_off(n - n_test);
    (idx, test)
}

fn sample_width(samples: &[FluxSample]) -> Result<(usize, bool), DatasetError> {
    if samples.is_empty() {
        return Err(DatasetError::InvalidSpec("cannot write an empty dataset".into()));
    }
    let m = samples[0].target.len();
    let has_lf = samples[0].lf_flux.is_some();
    for (i, s) in samples.iter().enumerate() {
        if s.u_plus.len() != m || s.u_minus.len() != m || s.target.len() != m {
            return Err(DatasetError::Inhomogeneous(format!("sample {i} has a different width")));
        }
        if s.lf_flux.is_some() != has_lf {
            return Err(DatasetError::Inhomogeneous(format!(
                "sample {i} disagrees about the low-fidelity column"
            )));
        }
    }
    Ok((m, has_lf))
}

fn csv_header(m: usize, has_lf: bool) -> String {
    let mut cols = Vec::new();
    for c in 0..m {
        cols.push(format!("u_plus_{c}"));
    }
    for c in 0..m {
        cols.push(format!("u_minus_{c}"));
    }
    if has_lf {
        for c in 0..m {
            cols.push(format!("lf_{c}"));
        }
    }
    for c in 0..m {
        cols.push(format!("target_{c}"));
    }
    cols.join(",")
}

/// Serialize samples to CSV. `metadata` lines are written first as
/// `# key=value` comments. Floats print in shortest round-trip form, so
/// read-back is lossless.
pub fn write_dataset_with_meta(
    path: impl AsRef<Path>,
    samples: &[FluxSample],
    metadata: &[(String, String)],
) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let (m, has_lf) = sample_width(samples)?;
    let mut text = String::new();
    for (k, v) in metadata {
        let _ = writeln!(text, "# {k}={v}");
    }
    let _ = writeln!(text, "{}", csv_header(m, has_lf));
    for s in samples {
        let mut fields: Vec<String> = Vec::with_capacity(4 * m);
        let push_vec = |fields: &mut Vec<String>, v: &StateVector| {
            for x in v.iter() {
                fields.push(format!("{x}"));
            }
        };
        push_vec(&mut fields, &s.u_plus);
        push_vec(&mut fields, &s.u_minus);
        if let Some(lf) = &s.lf_flux {
            push_vec(&mut fields, lf);
        }
        push_vec(&mut fields, &s.target);
        let _ = writeln!(text, "{}", fields.join(","));
    }
    fs::write(path, text).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_dataset(path: impl AsRef<Path>, samples: &[FluxSample]) -> Result<(), DatasetError> {
    write_dataset_with_meta(path, samples, &[])
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<FluxSample>, DatasetError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: display.clone(),
        source,
    })?;
    let malformed = |line: usize, message: String| DatasetError::Malformed {
        path: display.clone(),
        line,
        message,
    };

    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| malformed(0, "empty dataset file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();

    // infer m and the lf column block from the header layout
    let m = cols.iter().take_while(|c| c.starts_with("u_plus_")).count();
    if m == 0 || m > 3 {
        return Err(malformed(header_line + 1, format!("unrecognized header {header:?}")));
    }
    let has_lf = cols.iter().any(|c| c.starts_with("lf_"));
    if cols != csv_header(m, has_lf).split(',').collect::<Vec<_>>() {
        return Err(malformed(header_line + 1, format!("unrecognized header {header:?}")));
    }
    let expect = if has_lf { 4 * m } else { 3 * m };

    let mut samples = Vec::new();
    for (line_idx, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expect {
            return Err(malformed(
                line_idx + 1,
                format!("{} fields, {expect} expected", fields.len()),
            ));
        }
        let mut vals = Vec::with_capacity(expect);
        for f in &fields {
            let v: f64 = f.trim().parse().map_err(|e| {
                malformed(line_idx + 1, format!("bad float {f:?}: {e}"))
            })?;
            vals.push(v);
        }
        let take = |start: usize| StateVector::from_slice(&vals[start..start + m]);
        samples.push(FluxSample {
            u_plus: take(0),
            u_minus: take(m),
            lf_flux: if has_lf { Some(take(2 * m)) } else { None },
            target: take(if has_lf { 3 * m } else { 2 * m }),
        });
    }
    if samples.is_empty() {
        return Err(malformed(header_line + 1, "dataset has a header but no rows".into()));
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_swe_star, WaveKind};
    use crate::physics;

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let spec = SamplingSpec::burgers_uniform(500, 9);
        let a = sample_states(&spec).unwrap();
        let b = sample_states(&spec).unwrap();
        assert_eq!(a, b);
        for (up, um) in &a {
            assert!(up[0] >= -3.0 && up[0] <= 3.0);
            assert!(um[0] >= -3.0 && um[0] <= 3.0);
        }
    }

    #[test]
    fn swe_samples_convert_primitives() {
        let spec = SamplingSpec::swe_uniform(200, 4);
        for (up, um) in sample_states(&spec).unwrap() {
            for s in [up, um] {
                assert!(s[0] >= MIN_SAMPLED_DEPTH && s[0] <= 3.5);
                let u = s[1] / s[0];
                assert!(u >= -2.5 && u <= 2.5);
                assert_eq!(s[1], s[0] * u);
            }
        }
    }

    #[test]
    fn spec_validation_rejects_negative_depth_range() {
        let spec = SamplingSpec {
            ranges: StateRanges::Swe { h: [-0.5, 3.5], u: [-1.0, 1.0] },
            count: 10,
            seed: 0,
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn build_dataset_examples() {
        let pde = PdeSystem::burgers_1d();
        let pairs = vec![
            (StateVector::scalar(1.0), StateVector::scalar(1.0)),
            (StateVector::scalar(-1.0), StateVector::scalar(1.0)),
        ];
        let ds = build_dataset(&pairs, &pde, Some(LfSolver::Roe)).unwrap();
        assert_eq!(ds[0].target[0], 0.5);
        assert_eq!(ds[1].target[0], 0.0);
        assert_eq!(ds[1].lf_flux.unwrap()[0], 0.5);
    }

    #[test]
    fn rarefaction_pairs_have_zero_target() {
        let pairs = rarefaction_scenario_burgers(500, 3);
        assert_eq!(pairs.len(), 500);
        let mut roe_nonzero = 0usize;
        for (up, um) in &pairs {
            assert!(up[0] < 0.0 && um[0] > 0.0);
            assert_eq!(exact::godunov_flux_burgers(up[0], um[0]), 0.0);
            let q = RiemannFluxQuery {
                pde: PdeSystem::burgers_1d(),
                u_plus: *up,
                u_minus: *um,
            };
            if crate::approx::roe_flux(&q).unwrap()[0].abs() > 1e-12 {
                roe_nonzero += 1;
            }
        }
        assert!(roe_nonzero > 450, "Roe should be generically wrong here");
    }

    #[test]
    fn scenario_one_is_double_rarefaction_with_falling_depth() {
        let pairs = scenario_one_swe(300, 11);
        for (up, um) in &pairs {
            assert_eq!(up[0], um[0]);
            let h = up[0];
            assert!(h > 0.0 && h < 3.0);
            let (ul, ur) = (up[1] / h, um[1] / h);
            assert!(ul < 0.0 && ul > -2.0 && ur > 0.0 && ur < 2.0);
            let star = solve_swe_star(h, ul, h, ur, 1.0).unwrap();
            assert_eq!(star.left_wave, WaveKind::Rarefaction);
            assert_eq!(star.right_wave, WaveKind::Rarefaction);
            assert!(star.h_star < h);
        }
    }

    #[test]
    fn regenerating_targets_reproduces_them() {
        let spec = SamplingSpec::swe_uniform(200, 21);
        let pde = PdeSystem::swe_1d();
        let ds = build_dataset(&sample_states(&spec).unwrap(), &pde, None).unwrap();
        for s in &ds {
            let q = RiemannFluxQuery { pde, u_plus: s.u_plus, u_minus: s.u_minus };
            let again = exact::godunov_flux(&q).unwrap();
            assert!(s.target.abs_diff_max(&again) < 1e-12);
        }
    }

    #[test]
    fn csv_roundtrip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let spec = SamplingSpec::swe_uniform(100, 5);
        let pde = PdeSystem::swe_1d();
        let ds =
            build_dataset(&sample_states(&spec).unwrap(), &pde, Some(LfSolver::Roe)).unwrap();
        write_dataset_with_meta(&path, &ds, &[("seed".into(), "5".into())]).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn reader_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.csv");
        fs::write(&empty, "").unwrap();
        assert!(matches!(
            read_dataset(&empty),
            Err(DatasetError::Malformed { .. })
        ));

        let bad_header = dir.path().join("bad.csv");
        fs::write(&bad_header, "a,b,c\n1,2,3\n").unwrap();
        assert!(read_dataset(&bad_header).is_err());

        let bad_row = dir.path().join("row.csv");
        fs::write(&bad_row, "u_plus_0,u_minus_0,target_0\n1.0,2.0\n").unwrap();
        match read_dataset(&bad_row) {
            Err(DatasetError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed row, got {other:?}"),
        }

        let headers_only = dir.path().join("hdr.csv");
        fs::write(&headers_only, "u_plus_0,u_minus_0,target_0\n").unwrap();
        assert!(read_dataset(&headers_only).is_err());
    }

    #[test]
    fn split_partitions_indices() {
        let (train, test) = split_indices(100, 25, 8);
        assert_eq!(train.len(), 75);
        assert_eq!(test.len(), 25);
        let mut all: Vec<usize> = train.iter().chain(test.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn training_set_shapes() {
        let pde = PdeSystem::swe_1d();
        let pairs = sample_states(&SamplingSpec::swe_uniform(50, 2)).unwrap();
        let ds = build_dataset(&pairs, &pde, Some(LfSolver::Roe)).unwrap();
        let vanilla = to_training_set(&ds, SurrogateKind::Vanilla).unwrap();
        assert_eq!(vanilla.input_dim, 4);
        assert_eq!(vanilla.output_dim, 2);
        assert!(vanilla.offsets.is_none());
        let bf = to_training_set(&ds, SurrogateKind::BiFidelity).unwrap();
        assert_eq!(bf.input_dim, 6);
        assert!(bf.offsets.is_some());

        let no_lf = build_dataset(&pairs, &pde, None).unwrap();
        assert!(to_training_set(&no_lf, SurrogateKind::BiFidelity).is_err());
    }

    #[test]
    fn evaluate_flux_on_exact_targets_is_zero() {
        let pde = PdeSystem::burgers_1d();
        let pairs = sample_states(&SamplingSpec::burgers_uniform(100, 7)).unwrap();
        let ds = build_dataset(&pairs, &pde, None).unwrap();
        let eval = evaluate_flux(&ds, |a, b| {
            Ok::<_, std::convert::Infallible>(StateVector::scalar(
                exact::godunov_flux_burgers(a[0], b[0]),
            ))
        })
        .unwrap();
        assert_eq!(eval.rel_l1, 0.0);
        assert!(eval.abs_err[0].iter().all(|&e| e == 0.0));
        let _ = physics::max_wave_speed(&pde, &ds[0].u_plus);
    }
}
