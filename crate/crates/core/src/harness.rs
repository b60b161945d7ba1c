//! Experiment configuration, CSV results and threshold estimates.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::code::{build_from_text, build_toric_4d, load_fixture, CodeError, CssCode};
use crate::decoders::{run_global_memory, run_passive_memory, DecoderConfig, MemoryError, MemoryStats};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("bad value for '{key}': {msg}")]
    Value { key: String, msg: String },
    #[error("missing required setting '{0}'")]
    Missing(&'static str),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Memory(#[from] MemoryError),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("threshold analysis needs {0}")]
    Insufficient(&'static str),
}

/// How a code is named in a config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSelector {
    Fixture(String),
    Inline {
        ell: u32,
        m: u32,
        q: u32,
        a: String,
        b: String,
    },
    Toric4d(usize),
}

impl CodeSelector {
    /// Fixture names, or `toric4d:L` for the 4D toric code.
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        let toric = lower
            .strip_prefix("toric4d:")
            .or_else(|| lower.strip_prefix("toric4d-l"));
        if let Some(l) = toric {
            return l.parse().map(Self::Toric4d).map_err(|_| HarnessError::Value {
                key: "code".into(),
                msg: format!("bad toric size in '{s}'"),
            });
        }
        Ok(Self::Fixture(s.to_string()))
    }

    pub fn build(&self) -> Result<CssCode, HarnessError> {
        Ok(match self {
            Self::Fixture(name) => load_fixture(name)?,
            Self::Inline { ell, m, q, a, b } => build_from_text(format!("ZSZ({ell},{m},{q})"), *ell, *m, *q, a, b)?,
            Self::Toric4d(l) => build_toric_4d(*l)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Global,
    Passive,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "global" => Self::Global,
            "passive" => Self::Passive,
            other => return Err(format!("unknown mode '{other}'")),
        })
    }
}

/// Flat key=value experiment description. Later assignments win, so
/// command-line overrides are applied after the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub codes: Vec<CodeSelector>,
    pub mode: Mode,
    pub p_grid: Vec<f64>,
    /// Rounds for global decoding, cycles for passive decoding.
    pub rounds: usize,
    pub shots: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the default pool.
    pub workers: usize,
    pub output: Option<String>,
    pub decoder: DecoderConfig,
    /// Fill the `wall_time` column; off keeps output byte-reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            codes: Vec::new(),
            mode: Mode::Global,
            p_grid: Vec::new(),
            rounds: 0,
            shots: 0,
            seed: 0,
            workers: 0,
            output: None,
            decoder: DecoderConfig::default(),
            timing: false,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e: T::Err| HarnessError::Value {
        key: key.into(),
        msg: e.to_string(),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, HarnessError>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), HarnessError> {
        let mut inline: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(HarnessError::Syntax { line: i + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if matches!(k, "ell" | "m" | "q" | "a" | "b") {
                inline.push((k.to_string(), v.to_string()));
            } else {
                self.set(k, v)?;
            }
        }
        if !inline.is_empty() {
            self.set_inline(&inline)?;
        }
        Ok(())
    }

    /// Inline group code from `ell`, `m`, `q`, `a`, `b` settings.
    pub fn set_inline(&mut self, fields: &[(String, String)]) -> Result<(), HarnessError> {
        let get = |k: &'static str| {
            fields
                .iter()
                .rev()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.clone())
                .ok_or(HarnessError::Missing(k))
        };
        self.codes = vec![CodeSelector::Inline {
            ell: parse_value("ell", &get("ell")?)?,
            m: parse_value("m", &get("m")?)?,
            q: parse_value("q", &get("q").unwrap_or_else(|_| "1".into()))?,
            a: get("a")?,
            b: get("b").unwrap_or_else(|_| "1".into()),
        }];
        Ok(())
    }

    /// Sets one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "code" | "codes" => {
                self.codes = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(CodeSelector::parse)
                    .collect::<Result<_, _>>()?;
            }
            "mode" => self.mode = parse_value(key, value)?,
            "p" | "p_grid" => self.p_grid = parse_list(key, value)?,
            "rounds" | "cycles" | "d" => self.rounds = parse_value(key, value)?,
            "shots" => self.shots = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "workers" => self.workers = parse_value(key, value)?,
            "output" => self.output = Some(value.to_string()),
            "timing" => self.timing = parse_value(key, value)?,
            "bp_iters" => self.decoder.bp_iters = parse_value(key, value)?,
            "osd_depth" => self.decoder.osd_depth = parse_value(key, value)?,
            "sweep_strategy" => self.decoder.sweep_strategy = parse_value(key, value)?,
            "corrupt_mode" => self.decoder.corrupt_mode = parse_value(key, value)?,
            other => return Err(HarnessError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Mode-specific required fields and value ranges.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.codes.is_empty() {
            return Err(HarnessError::Missing("code"));
        }
        if let Some(p) = self.p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(HarnessError::Value {
                key: "p".into(),
                msg: format!("{p} is outside [0, 1]"),
            });
        }
        if self.p_grid.is_empty() {
            return Err(HarnessError::Missing("p"));
        }
        if self.shots == 0 {
            return Err(HarnessError::Missing("shots"));
        }
        if self.rounds == 0 {
            return Err(HarnessError::Missing("rounds"));
        }
        Ok(())
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub stats: MemoryStats,
    /// Seconds; `None` when timing is off.
    pub wall_time: Option<f64>,
}

pub const CSV_HEADER: &str =
    "# zsz-sim csv v1\ncode,p,d_or_cycles,shots,failures,bler,stderr,bler_per_cycle,seed,wall_time\n";

/// Runs every (code, p) point of a global or passive config.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    cfg.validate()?;
    crate::par::with_workers(cfg.workers, || run_points(cfg))
}

fn run_points(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    let mut rows = Vec::new();
    for sel in &cfg.codes {
        let code = sel.build()?;
        for &p in &cfg.p_grid {
            let start = Instant::now();
            let stats = match cfg.mode {
                Mode::Passive => run_passive_memory(&code, p, cfg.rounds, cfg.shots, cfg.seed, &cfg.decoder)?,
                Mode::Global => run_global_memory(&code, p, cfg.rounds, cfg.shots, cfg.seed, &cfg.decoder)?,
            };
            let wall_time = cfg.timing.then(|| start.elapsed().as_secs_f64());
            rows.push(ResultRow { stats, wall_time });
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    for r in rows {
        let s = &r.stats;
        let per_cycle = s.bler_per_cycle.map_or(String::new(), |v| v.to_string());
        let wall = r.wall_time.map_or("0".to_string(), |t| format!("{t:.3}"));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.code, s.p, s.d_or_cycles, s.shots, s.failures, s.bler, s.stderr, per_cycle, s.seed, wall
        );
    }
    out
}

/// One point of a BLER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub p: f64,
    pub bler: f64,
    pub stderr: f64,
}

/// BLER curve of one code; `size` orders codes (larger is "bigger").
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub code: String,
    pub size: usize,
    pub points: Vec<CurvePoint>,
}

/// Reads CSV v1 rows back into per-code curves, in order of appearance.
pub fn parse_csv(text: &str) -> Result<Vec<Curve>, HarnessError> {
    let mut curves: Vec<Curve> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("code,") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(HarnessError::Csv {
                line: i + 1,
                msg: format!("expected 10 fields, got {}", f.len()),
            });
        }
        let num = |k: usize| -> Result<f64, HarnessError> {
            f[k].parse().map_err(|_| HarnessError::Csv {
                line: i + 1,
                msg: format!("bad number '{}'", f[k]),
            })
        };
        let point = CurvePoint {
            p: num(1)?,
            bler: num(5)?,
            stderr: num(6)?,
        };
        match curves.iter_mut().find(|c| c.code == f[0]) {
            Some(c) => c.points.push(point),
            None => curves.push(Curve {
                code: f[0].to_string(),
                size: 0,
                points: vec![point],
            }),
        }
    }
    Ok(curves)
}

/// Least-squares fit `y = slope * x + intercept` with its R^2.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Where two curves cross, by log-log interpolation between the first
/// bracketing pair of shared p values.
pub fn crossing_point(a: &[CurvePoint], b: &[CurvePoint]) -> Option<f64> {
    let mut shared: Vec<(f64, f64)> = Vec::new();
    for pa in a {
        if let Some(pb) = b.iter().find(|pb| pb.p == pa.p) {
            if pa.p > 0.0 && pa.bler > 0.0 && pb.bler > 0.0 {
                shared.push((pa.p.ln(), pa.bler.ln() - pb.bler.ln()));
            }
        }
    }
    shared.sort_by(|x, y| x.0.total_cmp(&y.0));
    shared.windows(2).find_map(|w| {
        let ((x0, d0), (x1, d1)) = (w[0], w[1]);
        if d0 == 0.0 && d1 == 0.0 {
            return None;
        }
        if d0 == 0.0 {
            return Some(x0.exp());
        }
        (d0 * d1 < 0.0 || d1 == 0.0).then(|| (x0 + d0 / (d0 - d1) * (x1 - x0)).exp())
    })
}

/// Ordering of one (smaller, larger) pair at one p.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Ordering {
    pub p: f64,
    /// `bler_small - bler_large`.
    pub gap: f64,
    /// `2 * sqrt(stderr_small^2 + stderr_large^2)`.
    pub two_sigma: f64,
}

impl Ordering {
    /// The larger code is better by at least two standard errors.
    pub fn subthreshold(&self) -> bool {
        self.gap > self.two_sigma
    }

    /// The larger code is worse by at least two standard errors.
    pub fn reversed(&self) -> bool {
        -self.gap > self.two_sigma
    }
}

pub fn pair_ordering(small: &[CurvePoint], large: &[CurvePoint]) -> Vec<Ordering> {
    small
        .iter()
        .filter_map(|s| {
            large.iter().find(|l| l.p == s.p).map(|l| Ordering {
                p: s.p,
                gap: s.bler - l.bler,
                two_sigma: 2.0 * (s.stderr.powi(2) + l.stderr.powi(2)).sqrt(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CurveFitReport {
    pub code: String,
    pub fit: Option<LinearFit>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PairReport {
    pub smaller: String,
    pub larger: String,
    pub crossing: Option<f64>,
    pub orderings: Vec<Ordering>,
    /// Largest p up to which every point shows 2-sigma subthreshold
    /// ordering.
    pub ordered_up_to: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ThresholdReport {
    pub fits: Vec<CurveFitReport>,
    pub pairs: Vec<PairReport>,
}

/// Log-log fits per code and pairwise crossings, smaller code first.
pub fn threshold_report(curves: &[Curve]) -> Result<ThresholdReport, HarnessError> {
    if curves.len() < 2 {
        return Err(HarnessError::Insufficient("at least two codes"));
    }
    if curves.iter().any(|c| c.points.len() < 3) {
        return Err(HarnessError::Insufficient("at least three p values per code"));
    }
    let mut sorted: Vec<&Curve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.size);
    let fits = sorted
        .iter()
        .map(|c| {
            let pts: Vec<&CurvePoint> = c.points.iter().filter(|p| p.p > 0.0 && p.bler > 0.0).collect();
            let xs: Vec<f64> = pts.iter().map(|p| p.p.ln()).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.bler.ln()).collect();
            CurveFitReport {
                code: c.code.clone(),
                fit: linear_fit(&xs, &ys),
            }
        })
        .collect();
    let mut pairs = Vec::new();
    for (i, s) in sorted.iter().enumerate() {
        for l in &sorted[i + 1..] {
            let mut orderings = pair_ordering(&s.points, &l.points);
            orderings.sort_by(|a, b| a.p.total_cmp(&b.p));
            let ordered_up_to = orderings.iter().take_while(|o| o.subthreshold()).last().map(|o| o.p);
            pairs.push(PairReport {
                smaller: s.code.clone(),
                larger: l.code.clone(),
                crossing: crossing_point(&s.points, &l.points),
                orderings,
                ordered_up_to,
            });
        }
    }
    Ok(ThresholdReport { fits, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let cfg = ExperimentConfig::parse(
            "# passive run\ncode = ZSZ144-3, toric4d:3\nmode = passive\np = 1e-4, 3e-4\ncycles = 100\nshots = 64\nseed = 9\nosd_depth = 3\ncorrupt_mode = off\n",
        )
        .unwrap();
        assert_eq!(
            cfg.codes,
            vec![CodeSelector::Fixture("ZSZ144-3".into()), CodeSelector::Toric4d(3)]
        );
        assert_eq!(cfg.mode, Mode::Passive);
        assert_eq!(cfg.p_grid, vec![1e-4, 3e-4]);
        assert_eq!(
            (cfg.rounds, cfg.shots, cfg.seed, cfg.decoder.osd_depth),
            (100, 64, 9, 3)
        );
        cfg.validate().unwrap();
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            ExperimentConfig::parse("shots"),
            Err(HarnessError::Syntax { line: 1 })
        ));
        assert!(matches!(
            ExperimentConfig::parse("colour = red"),
            Err(HarnessError::UnknownKey(_))
        ));
        let cfg = ExperimentConfig::parse("code = ZSZ80\np = 1.5\nshots = 1\nrounds = 1").unwrap();
        assert!(matches!(cfg.validate(), Err(HarnessError::Value { .. })));
        let cfg = ExperimentConfig::parse("code = ZSZ80\np = 0.1\nrounds = 1").unwrap();
        assert!(matches!(cfg.validate(), Err(HarnessError::Missing("shots"))));
    }

    #[test]
    fn inline_code() {
        let cfg = ExperimentConfig::parse("ell = 3\nm = 1\nq = 1\na = 1+x").unwrap();
        let code = cfg.codes[0].build().unwrap();
        assert_eq!(code.n(), 6);
    }

    #[test]
    fn fit_of_a_line() {
        let f = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
    }
}
