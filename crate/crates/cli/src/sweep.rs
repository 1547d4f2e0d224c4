//! Parameter sweeps and the CSV row contract shared with the plotting scripts.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use mzi_core::metrology::{optimize_phase, qfi_report, sensitivity, total_photon_number, DEFAULT_PHASE_INTERVAL};
use mzi_core::{Detector, ExperimentParams, MetrologyError, ParamError, QfiReport, Scheme, SensitivityReport};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Upper bound on the number of values along a sweep axis.
pub const MAX_STEPS: usize = 100_000;

/// Column order of every sweep and figure CSV.
pub const CSV_COLUMNS: [&str; 17] = [
    "axis",
    "value",
    "scheme",
    "m",
    "detector",
    "phi",
    "delta_phi",
    "sigma",
    "slope",
    "n_total",
    "sql",
    "hl",
    "f_ideal",
    "f_lossy",
    "qcrb_ideal",
    "qcrb_lossy",
    "status",
];

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("empty sweep range")]
    EmptyRange,
    #[error("sweep range has {0} steps (limit {MAX_STEPS})")]
    TooManySteps(usize),
    #[error("bad range `{0}`: expected `start:stop:steps` or a comma-separated list")]
    BadRange(String),
    #[error("unknown sweep axis `{0}` (expected phi, alpha, r, T, eta or m)")]
    UnknownAxis(String),
    #[error("axis m needs non-negative integer values, got {0}")]
    NonIntegerM(f64),
    #[error("sweep needs at least one {0}")]
    EmptyList(&'static str),
    #[error("{axis} = {value}: {source}")]
    Param {
        axis: Axis,
        value: f64,
        source: ParamError,
    },
    #[error("{scheme}, m = {m}, {detector}, {axis} = {value}: {source}")]
    Point {
        axis: Axis,
        value: f64,
        scheme: Scheme,
        m: u32,
        detector: Detector,
        source: MetrologyError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    Phi,
    Alpha,
    R,
    T,
    Eta,
    M,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Phi => "phi",
            Axis::Alpha => "alpha",
            Axis::R => "r",
            Axis::T => "T",
            Axis::Eta => "eta",
            Axis::M => "m",
        }
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: ExperimentParams, value: f64) -> ExperimentParams {
        let mut p = base;
        match self {
            Axis::Phi => p.phi = value,
            Axis::Alpha => p.alpha_mag = value,
            Axis::R => p.r = value,
            Axis::T => p.transmittance = value,
            Axis::Eta => p.eta = value,
            Axis::M => p.m = value as u32,
        }
        p
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "phi" => Axis::Phi,
            "alpha" => Axis::Alpha,
            "r" => Axis::R,
            "T" | "t" => Axis::T,
            "eta" => Axis::Eta,
            "m" => Axis::M,
            other => return Err(SweepError::UnknownAxis(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisRange {
    /// `steps` evenly spaced values from `start` to `stop` inclusive; a single
    /// step yields `start`.
    Linear { start: f64, stop: f64, steps: usize },
    List(Vec<f64>),
}

impl AxisRange {
    pub fn linear(start: f64, stop: f64, steps: usize) -> Self {
        AxisRange::Linear { start, stop, steps }
    }

    pub fn len(&self) -> usize {
        match self {
            AxisRange::Linear { steps, .. } => *steps,
            AxisRange::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisRange::Linear { start, stop, steps } => {
                let n = *steps;
                (0..n)
                    .map(|i| match i {
                        0 => *start,
                        _ if i + 1 == n => *stop,
                        _ => start + (stop - start) * i as f64 / (n - 1) as f64,
                    })
                    .collect()
            }
            AxisRange::List(v) => v.clone(),
        }
    }
}

impl FromStr for AxisRange {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::BadRange(s.to_string());
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [start, stop, steps] => Ok(AxisRange::Linear {
                start: start.parse().map_err(|_| bad())?,
                stop: stop.parse().map_err(|_| bad())?,
                steps: steps.parse().map_err(|_| bad())?,
            }),
            [list] => list
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()
                .map(AxisRange::List),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub range: AxisRange,
    /// Baseline configuration; its `scheme` and `m` are replaced per row.
    pub fixed: ExperimentParams,
    pub schemes: Vec<Scheme>,
    /// Photon-addition orders for schemes A and B (the original scheme always
    /// runs once with `m = 0`). Ignored when the axis is `m`.
    pub ms: Vec<u32>,
    pub detectors: Vec<Detector>,
    pub optimize_phi: bool,
}

/// Why a row carries NaN instead of a sensitivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// `|∂⟨O⟩/∂φ|` vanished at the requested φ.
    ZeroSlope,
    /// Every φ of the optimization grid had a vanishing slope.
    NoFinitePoint,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::ZeroSlope => "zero_slope",
            RowStatus::NoFinitePoint => "no_finite_point",
        }
    }
}

/// One `(axis value, scheme, m, detector)` record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub axis: Axis,
    pub value: f64,
    pub scheme: Scheme,
    pub m: u32,
    pub detector: Detector,
    pub phi: f64,
    pub delta_phi: f64,
    pub sigma: f64,
    pub slope: f64,
    pub n_total: f64,
    pub sql: f64,
    pub hl: f64,
    pub f_ideal: f64,
    pub f_lossy: f64,
    pub qcrb_ideal: f64,
    pub qcrb_lossy: f64,
    pub status: RowStatus,
}

/// Everything computed for one configuration and detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// The configuration actually evaluated (φ replaced by the optimum when
    /// φ was optimized).
    pub params: ExperimentParams,
    pub sensitivity: Option<SensitivityReport>,
    pub qfi: QfiReport,
    pub status: RowStatus,
}

/// Sensitivity and QFI of one configuration. A vanishing slope is reported in
/// the status instead of failing; any other error is returned.
pub fn evaluate(params: &ExperimentParams, detector: Detector, optimize_phi: bool) -> Result<Evaluation, MetrologyError> {
    let qfi = qfi_report(params, 1)?;
    let found = if optimize_phi {
        optimize_phase(detector, params, DEFAULT_PHASE_INTERVAL)
    } else {
        sensitivity(detector, params)
    };
    let (report, status) = match found {
        Ok(r) => (Some(r), RowStatus::Ok),
        Err(MetrologyError::ZeroSlope { .. }) => (None, RowStatus::ZeroSlope),
        Err(MetrologyError::NoFinitePoint) => (None, RowStatus::NoFinitePoint),
        Err(e) => return Err(e),
    };
    Ok(Evaluation {
        params: report.map_or(*params, |r| params.with_phi(r.phi)),
        sensitivity: report,
        qfi,
        status,
    })
}

fn row_for(
    axis: Axis,
    value: f64,
    params: &ExperimentParams,
    detector: Detector,
    optimize_phi: bool,
) -> Result<Row, MetrologyError> {
    let Evaluation {
        params: at,
        sensitivity,
        qfi,
        status,
    } = evaluate(params, detector, optimize_phi)?;
    let (delta_phi, sigma, slope, n_total) = match sensitivity {
        Some(r) => (r.delta_phi, r.sigma, r.slope, r.n_total),
        None => {
            let n = total_photon_number(&at)?;
            let slope = if status == RowStatus::ZeroSlope { 0.0 } else { f64::NAN };
            (f64::NAN, f64::NAN, slope, n)
        }
    };
    Ok(Row {
        axis,
        value,
        scheme: params.scheme,
        m: params.added_photons(),
        detector,
        phi: if status == RowStatus::NoFinitePoint { f64::NAN } else { at.phi },
        delta_phi,
        sigma,
        slope,
        n_total,
        sql: n_total.sqrt().recip(),
        hl: n_total.recip(),
        f_ideal: qfi.f_ideal,
        f_lossy: qfi.f_lossy,
        qcrb_ideal: qfi.qcrb_ideal,
        qcrb_lossy: qfi.qcrb_lossy,
        status,
    })
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.range.is_empty() {
            return Err(SweepError::EmptyRange);
        }
        if self.range.len() > MAX_STEPS {
            return Err(SweepError::TooManySteps(self.range.len()));
        }
        if self.schemes.is_empty() {
            return Err(SweepError::EmptyList("scheme"));
        }
        if self.detectors.is_empty() {
            return Err(SweepError::EmptyList("detector"));
        }
        if self.axis != Axis::M && self.ms.is_empty() && self.schemes.iter().any(|&s| s != Scheme::Original) {
            return Err(SweepError::EmptyList("m"));
        }
        for (value, params) in self.configurations() {
            if self.axis == Axis::M && (value < 0.0 || value.fract() != 0.0) {
                return Err(SweepError::NonIntegerM(value));
            }
            params.validate().map_err(|source| SweepError::Param {
                axis: self.axis,
                value,
                source,
            })?;
        }
        Ok(())
    }

    /// `(axis value, params)` in row order: axis-major, then scheme, then `m`.
    fn configurations(&self) -> Vec<(f64, ExperimentParams)> {
        let mut out = Vec::new();
        for value in self.range.values() {
            let base = self.axis.apply(self.fixed, value);
            for &scheme in &self.schemes {
                let ms: Vec<u32> = match (scheme, self.axis) {
                    (Scheme::Original, _) => vec![0],
                    (_, Axis::M) => vec![base.m],
                    _ => self.ms.clone(),
                };
                for m in ms {
                    if scheme == Scheme::Original && self.axis == Axis::M && value != 0.0 {
                        continue;
                    }
                    out.push((value, ExperimentParams { scheme, m, ..base }));
                }
            }
        }
        out
    }

    /// Evaluates every row; rows are computed in parallel and returned in the
    /// deterministic order `(axis value, scheme, m, detector)`.
    pub fn run(&self) -> Result<Vec<Row>, SweepError> {
        self.validate()?;
        let jobs: Vec<(f64, ExperimentParams, Detector)> = self
            .configurations()
            .into_iter()
            .flat_map(|(v, p)| self.detectors.iter().map(move |&d| (v, p, d)))
            .collect();
        jobs.par_iter()
            .map(|&(value, params, detector)| {
                row_for(self.axis, value, &params, detector, self.optimize_phi).map_err(|source| SweepError::Point {
                    axis: self.axis,
                    value,
                    scheme: params.scheme,
                    m: params.m,
                    detector,
                    source,
                })
            })
            .collect()
    }
}

/// Floats with 17 significant digits; NaN is spelled `NaN`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

impl Row {
    pub fn record(&self) -> Vec<String> {
        let f = format_float;
        vec![
            self.axis.to_string(),
            f(self.value),
            self.scheme.to_string(),
            self.m.to_string(),
            self.detector.to_string(),
            f(self.phi),
            f(self.delta_phi),
            f(self.sigma),
            f(self.slope),
            f(self.n_total),
            f(self.sql),
            f(self.hl),
            f(self.f_ideal),
            f(self.f_lossy),
            f(self.qcrb_ideal),
            f(self.qcrb_lossy),
            self.status.as_str().to_string(),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(axis: Axis, range: AxisRange) -> SweepSpec {
        SweepSpec {
            axis,
            range,
            fixed: ExperimentParams::new(Scheme::Original, 0, 1.0, 0.5),
            schemes: vec![Scheme::Original, Scheme::A, Scheme::B],
            ms: vec![1, 2],
            detectors: Detector::ALL.to_vec(),
            optimize_phi: false,
        }
    }

    #[test]
    fn linear_range_hits_both_ends() {
        let v = AxisRange::linear(0.1, 0.9, 5).values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[4], 0.9);
        assert!((v[2] - 0.5).abs() < 1e-15);
        assert_eq!(AxisRange::linear(0.3, 7.0, 1).values(), vec![0.3]);
    }

    #[test]
    fn range_parsing() {
        assert_eq!("0:1:3".parse::<AxisRange>().unwrap(), AxisRange::linear(0.0, 1.0, 3));
        assert_eq!("0.5, 1,2".parse::<AxisRange>().unwrap(), AxisRange::List(vec![0.5, 1.0, 2.0]));
        assert!("0:1".parse::<AxisRange>().is_err());
        assert!("a,b".parse::<AxisRange>().is_err());
    }

    #[test]
    fn row_order_is_axis_scheme_m_detector() {
        let rows = spec(Axis::Phi, AxisRange::List(vec![0.7, 1.4])).run().unwrap();
        // original once, A and B for each m, two detectors each
        assert_eq!(rows.len(), 2 * (1 + 2 + 2) * 2);
        let keys: Vec<_> = rows.iter().map(|r| (r.value, r.scheme, r.m, r.detector)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        assert_eq!(keys, sorted);
        assert_eq!(rows[0].detector, Detector::IntensityDiff);
        assert_eq!(rows[1].detector, Detector::Homodyne);
    }

    #[test]
    fn single_step_gives_one_row_per_scheme_and_detector() {
        let mut s = spec(Axis::T, AxisRange::linear(0.8, 0.8, 1));
        s.ms = vec![1];
        assert_eq!(s.run().unwrap().len(), 3 * 2);
    }

    #[test]
    fn m_axis_overrides_the_list() {
        let mut s = spec(Axis::M, AxisRange::List(vec![0.0, 1.0, 3.0]));
        s.schemes = vec![Scheme::Original, Scheme::B];
        s.detectors = vec![Detector::Homodyne];
        let rows = s.run().unwrap();
        let ms: Vec<_> = rows.iter().map(|r| (r.scheme, r.m)).collect();
        assert_eq!(
            ms,
            vec![(Scheme::Original, 0), (Scheme::B, 0), (Scheme::B, 1), (Scheme::B, 3)]
        );
        assert!(matches!(
            spec(Axis::M, AxisRange::List(vec![1.5])).validate(),
            Err(SweepError::NonIntegerM(_))
        ));
    }

    #[test]
    fn zero_slope_rows_are_kept() {
        let mut s = spec(Axis::Alpha, AxisRange::List(vec![0.0]));
        s.fixed.r = 0.0;
        s.schemes = vec![Scheme::Original];
        let rows = s.run().unwrap();
        for row in &rows {
            assert_eq!(row.status, RowStatus::ZeroSlope);
            assert!(row.delta_phi.is_nan());
            assert_eq!(row.f_ideal, 0.0);
        }
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",zero_slope"));
        assert!(text.contains(",NaN,"));
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(matches!(spec(Axis::Phi, AxisRange::List(vec![])).validate(), Err(SweepError::EmptyRange)));
        assert!(matches!(
            spec(Axis::Phi, AxisRange::linear(0.0, 1.0, MAX_STEPS + 1)).validate(),
            Err(SweepError::TooManySteps(_))
        ));
        assert!(matches!(
            spec(Axis::T, AxisRange::List(vec![1.5])).validate(),
            Err(SweepError::Param { .. })
        ));
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(f64::NAN), "NaN");
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(format_float(f64::INFINITY), "inf");
    }
}
