//! Datasets behind each published figure, with the captioned parameters
//! baked in. Every panel is one sweep written to `fig<id>_<panel>.csv`.

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mzi_core::{Detector, ExperimentParams, Scheme};
use thiserror::Error;

use crate::sweep::{write_csv, Axis, AxisRange, SweepError, SweepSpec};

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("unknown figure `{0}` (expected one of F2..F9, F11)")]
    UnknownFigure(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{figure} panel {panel}: {source}")]
    Sweep {
        figure: FigureId,
        panel: &'static str,
        source: SweepError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FigureId {
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
    F11,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::F2,
        FigureId::F3,
        FigureId::F4,
        FigureId::F5,
        FigureId::F6,
        FigureId::F7,
        FigureId::F8,
        FigureId::F9,
        FigureId::F11,
    ];

    pub fn number(self) -> u32 {
        match self {
            FigureId::F2 => 2,
            FigureId::F3 => 3,
            FigureId::F4 => 4,
            FigureId::F5 => 5,
            FigureId::F6 => 6,
            FigureId::F7 => 7,
            FigureId::F8 => 8,
            FigureId::F9 => 9,
            FigureId::F11 => 11,
        }
    }

    /// The sweeps behind each panel, in panel order.
    pub fn panels(self) -> Vec<Panel> {
        use Detector::{Homodyne, IntensityDiff};
        let both = [Scheme::A, Scheme::B];
        let all_m = [0, 1, 2, 3];
        match self {
            FigureId::F2 => [IntensityDiff, Homodyne]
                .into_iter()
                .zip(["a", "b"])
                .map(|(d, name)| {
                    Panel::new(name, Axis::Phi, AxisRange::linear(0.01, PI - 0.01, 400), base(1.0, 1.0))
                        .schemes(&both, &all_m)
                        .detectors(&[d])
                })
                .collect(),
            FigureId::F3 | FigureId::F4 => {
                let schemes: &[Scheme] = if self == FigureId::F4 { &[Scheme::Original] } else { &both };
                let mut out = Vec::new();
                for (d, names) in [(IntensityDiff, ["a", "b"]), (Homodyne, ["c", "d"])] {
                    out.push(
                        Panel::new(names[0], Axis::Alpha, AxisRange::linear(0.05, 3.0, 40), base(1.0, 1.0))
                            .schemes(schemes, &all_m)
                            .detectors(&[d])
                            .optimized(),
                    );
                    out.push(
                        Panel::new(names[1], Axis::R, AxisRange::linear(0.0, 2.0, 40), base(1.0, 1.0))
                            .schemes(schemes, &all_m)
                            .detectors(&[d])
                            .optimized(),
                    );
                }
                out
            }
            FigureId::F5 => [IntensityDiff, Homodyne]
                .into_iter()
                .zip(["a", "b"])
                .map(|(d, name)| {
                    Panel::new(name, Axis::T, AxisRange::linear(0.01, 1.0, 50), base(1.0, 1.0))
                        .schemes(&both, &all_m)
                        .detectors(&[d])
                        .optimized()
                })
                .collect(),
            FigureId::F6 => ["a", "b", "c", "d"]
                .into_iter()
                .zip(0u32..)
                .map(|(name, m)| {
                    let schemes: &[Scheme] = if m == 0 { &[Scheme::Original] } else { &both };
                    Panel::new(name, Axis::T, AxisRange::linear(0.01, 1.0, 50), base(2.0, 0.6))
                        .schemes(schemes, &[m])
                        .detectors(&Detector::ALL)
                        .optimized()
                })
                .collect(),
            // QFI, its bound and the photon number do not depend on φ or the
            // detector; one detector keeps the files small.
            FigureId::F7 | FigureId::F8 | FigureId::F9 => vec![
                Panel::new("a", Axis::Alpha, AxisRange::linear(0.0, 3.0, 61), base(1.0, 1.0))
                    .schemes(&both, &all_m)
                    .detectors(&[IntensityDiff]),
                Panel::new("b", Axis::R, AxisRange::linear(0.0, 2.0, 41), base(1.0, 1.0))
                    .schemes(&both, &all_m)
                    .detectors(&[IntensityDiff]),
            ],
            FigureId::F11 => ["a", "b"]
                .into_iter()
                .map(|name| {
                    Panel::new(name, Axis::Eta, AxisRange::linear(0.0, 1.0, 51), base(1.0, 1.0))
                        .schemes(&both, &all_m)
                        .detectors(&[IntensityDiff])
                })
                .collect(),
        }
    }
}

fn base(alpha: f64, r: f64) -> ExperimentParams {
    ExperimentParams::new(Scheme::Original, 0, alpha, r)
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.number())
    }
}

impl FromStr for FigureId {
    type Err = FigureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim_start_matches(['F', 'f']);
        FigureId::ALL
            .into_iter()
            .find(|id| digits.parse::<u32>().ok() == Some(id.number()))
            .ok_or_else(|| FigureError::UnknownFigure(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: &'static str,
    pub spec: SweepSpec,
}

impl Panel {
    fn new(name: &'static str, axis: Axis, range: AxisRange, fixed: ExperimentParams) -> Self {
        Panel {
            name,
            spec: SweepSpec {
                axis,
                range,
                fixed,
                schemes: Vec::new(),
                ms: Vec::new(),
                detectors: Vec::new(),
                optimize_phi: false,
            },
        }
    }

    fn schemes(mut self, schemes: &[Scheme], ms: &[u32]) -> Self {
        self.spec.schemes = schemes.to_vec();
        self.spec.ms = ms.to_vec();
        self
    }

    fn detectors(mut self, detectors: &[Detector]) -> Self {
        self.spec.detectors = detectors.to_vec();
        self
    }

    fn optimized(mut self) -> Self {
        self.spec.optimize_phi = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureJob {
    pub figure_id: FigureId,
    pub output_dir: PathBuf,
}

impl FigureJob {
    pub fn file_name(&self, panel: &Panel) -> PathBuf {
        self.output_dir
            .join(format!("fig{}_{}.csv", self.figure_id.number(), panel.name))
    }

    /// Writes every panel and returns the paths written.
    pub fn run(&self) -> Result<Vec<PathBuf>, FigureError> {
        std::fs::create_dir_all(&self.output_dir).map_err(|source| io_error(&self.output_dir, source))?;
        let mut written = Vec::new();
        for panel in self.figure_id.panels() {
            let sweep_error = |source| FigureError::Sweep {
                figure: self.figure_id,
                panel: panel.name,
                source,
            };
            let rows = panel.spec.run().map_err(sweep_error)?;
            let path = self.file_name(&panel);
            let file = File::create(&path).map_err(|source| io_error(&path, source))?;
            write_csv(&rows, BufWriter::new(file)).map_err(sweep_error)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> FigureError {
    FigureError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ids() {
        assert_eq!("F2".parse::<FigureId>().unwrap(), FigureId::F2);
        assert_eq!("f11".parse::<FigureId>().unwrap(), FigureId::F11);
        assert_eq!("6".parse::<FigureId>().unwrap(), FigureId::F6);
        assert!("F10".parse::<FigureId>().is_err());
        assert!("F1".parse::<FigureId>().is_err());
    }

    #[test]
    fn captioned_parameters() {
        for p in FigureId::F2.panels() {
            assert_eq!((p.spec.fixed.alpha_mag, p.spec.fixed.r), (1.0, 1.0));
            assert_eq!(p.spec.axis, Axis::Phi);
        }
        for p in FigureId::F6.panels() {
            assert_eq!((p.spec.fixed.alpha_mag, p.spec.fixed.r), (2.0, 0.6));
            assert!(p.spec.optimize_phi);
        }
        let f7 = FigureId::F7.panels();
        assert_eq!(f7.len(), 2);
        assert_eq!((f7[0].spec.axis, f7[0].spec.fixed.r), (Axis::Alpha, 1.0));
        assert_eq!((f7[1].spec.axis, f7[1].spec.fixed.alpha_mag), (Axis::R, 1.0));
        assert_eq!(f7[0].spec.ms, vec![0, 1, 2, 3]);
        assert_eq!(FigureId::F4.panels()[0].spec.schemes, vec![Scheme::Original]);
        assert_eq!(FigureId::F11.panels()[0].spec.axis, Axis::Eta);
    }

    #[test]
    fn every_panel_is_a_valid_sweep() {
        for id in FigureId::ALL {
            let panels = id.panels();
            assert!(!panels.is_empty());
            for p in panels {
                p.spec.validate().unwrap();
            }
        }
    }
}
