//! Declarative parameter sweeps over the squeezing strength and their CSV output.
//!
//! Configuration files hold one `key = value` pair per line; `#` starts a
//! comment. Every output file begins with a `#`-prefixed echo of the fully
//! resolved configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{build_bogoliubov_liouvillian, build_liouvillian, SqueezedBath, SystemParams};
use crate::observables::{self, symmetric_axis, Moments, QuadratureMoments, WignerGrid};
use crate::ops::{self, Operator};
use crate::solvers::{self, steady_state, steady_state_adaptive, DensityMatrix, TruncationPolicy};

/// Ceiling for adaptive cutoff growth unless the configuration sets one.
pub const DEFAULT_MAX_CUTOFF: usize = 400;

/// Cross-frame agreement required by the Bogoliubov check.
pub const BOGOLIUBOV_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    MomentsSweep,
    Distribution,
    Wigner,
    BogoliubovCheck,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::MomentsSweep => "moments_sweep",
            Mode::Distribution => "distribution",
            Mode::Wigner => "wigner",
            Mode::BogoliubovCheck => "bogoliubov_check",
        }
    }

    /// Squeezing strengths used when the configuration gives none.
    pub fn default_r_values(self) -> Vec<f64> {
        match self {
            Mode::MomentsSweep | Mode::BogoliubovCheck => default_r_grid(),
            Mode::Distribution => vec![0.25, 0.5, 1.0],
            Mode::Wigner => vec![0.5],
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moments_sweep" => Ok(Mode::MomentsSweep),
            "distribution" => Ok(Mode::Distribution),
            "wigner" => Ok(Mode::Wigner),
            "bogoliubov_check" => Ok(Mode::BogoliubovCheck),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// r ∈ {0, 0.05, …, 1.5}.
pub fn default_r_grid() -> Vec<f64> {
    (0..=30).map(|k| round12(k as f64 * 0.05)).collect()
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    /// `None` selects [`Mode::default_r_values`].
    pub r_values: Option<Vec<f64>>,
    pub phi: f64,
    pub g0: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub delta_a: f64,
    pub delta_c: f64,
    pub atom_present: bool,
    pub fock_cutoff: usize,
    /// Largest cutoff the adaptive solver may grow to; `None` selects
    /// [`DEFAULT_MAX_CUTOFF`]. Setting it to `fock_cutoff` disables growth.
    pub max_cutoff: Option<usize>,
    /// `None` selects [`solvers::default_guard`].
    pub guard: Option<usize>,
    pub epsilon: f64,
    pub wigner_extent: f64,
    pub wigner_points: usize,
    pub output_path: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            mode: Mode::MomentsSweep,
            r_values: None,
            phi: 0.0,
            g0: 15.0,
            gamma: 1.0,
            kappa: 1.0,
            delta_a: 0.0,
            delta_c: 0.0,
            atom_present: true,
            fock_cutoff: 60,
            max_cutoff: None,
            guard: None,
            epsilon: solvers::DEFAULT_TRUNCATION_EPSILON,
            wigner_extent: 5.0,
            wigner_points: 101,
            output_path: PathBuf::from("output.csv"),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}` expects true or false, got `{value}`"))),
    }
}

/// Parses `a, b, c` or an inclusive range `start:step:stop`.
pub fn parse_r_values(value: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let values = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop): (f64, f64, f64) =
                (parse_value("r_values", start)?, parse_value("r_values", step)?, parse_value("r_values", stop)?);
            if !step.is_finite() || step <= 0.0 || stop < start {
                return Err(Error::Config(format!("bad r range `{value}`")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|k| round12(start + k as f64 * step)).collect()
        }
        [_] => value
            .split(',')
            .map(|v| parse_value::<f64>("r_values", v.trim()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Config(format!("bad r range `{value}`"))),
    };
    Ok(values)
}

impl SweepConfig {
    /// Parse a configuration file's contents on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mode" => self.mode = value.parse()?,
            "r_values" => self.r_values = Some(parse_r_values(value)?),
            "phi" => self.phi = parse_value(key, value)?,
            "g0" => self.g0 = parse_value(key, value)?,
            "gamma" => self.gamma = parse_value(key, value)?,
            "kappa" => self.kappa = parse_value(key, value)?,
            "delta_a" => self.delta_a = parse_value(key, value)?,
            "delta_c" => self.delta_c = parse_value(key, value)?,
            "atom_present" => self.atom_present = parse_bool(key, value)?,
            "fock_cutoff" => self.fock_cutoff = parse_value(key, value)?,
            "max_cutoff" => self.max_cutoff = Some(parse_value(key, value)?),
            "guard" => self.guard = Some(parse_value(key, value)?),
            "epsilon" => self.epsilon = parse_value(key, value)?,
            "wigner_extent" => self.wigner_extent = parse_value(key, value)?,
            "wigner_points" => self.wigner_points = parse_value(key, value)?,
            "output_path" => self.output_path = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn r_values(&self) -> Vec<f64> {
        self.r_values.clone().unwrap_or_else(|| self.mode.default_r_values())
    }

    pub fn max_cutoff(&self) -> usize {
        self.max_cutoff.unwrap_or(DEFAULT_MAX_CUTOFF).max(self.fock_cutoff)
    }

    pub fn guard(&self) -> usize {
        self.truncation().guard_for(self.fock_cutoff)
    }

    pub fn truncation(&self) -> TruncationPolicy {
        TruncationPolicy { guard: self.guard, epsilon: self.epsilon }
    }

    pub fn params(&self) -> SystemParams {
        SystemParams {
            delta_a: self.delta_a,
            delta_c: self.delta_c,
            g0: self.g0,
            gamma: self.gamma,
            kappa: self.kappa,
            atom_present: self.atom_present,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r_values = self.r_values();
        if r_values.is_empty() {
            return Err(Error::Config("r_values must not be empty".into()));
        }
        if let Some(r) = r_values.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::Config(format!("r values must be finite and ≥ 0, got {r}")));
        }
        self.params().validate().map_err(|e| Error::Config(e.to_string()))?;
        if !self.phi.is_finite() {
            return Err(Error::Config("phi must be finite".into()));
        }
        if self.fock_cutoff < 2 {
            return Err(Error::Config(format!("fock_cutoff must be ≥ 2, got {}", self.fock_cutoff)));
        }
        if let Some(guard) = self.guard {
            if guard == 0 || guard >= self.fock_cutoff {
                return Err(Error::Config(format!(
                    "guard must lie in [1, fock_cutoff), got {guard}"
                )));
            }
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.mode == Mode::Wigner && (self.wigner_points == 0 || !self.wigner_extent.is_finite() || self.wigner_extent <= 0.0) {
            return Err(Error::Config("wigner grid needs points ≥ 1 and extent > 0".into()));
        }
        if self.mode == Mode::BogoliubovCheck
            && (self.delta_a != 0.0 || self.delta_c != 0.0 || self.phi != 0.0)
        {
            return Err(Error::Config(
                "bogoliubov_check requires delta_a = delta_c = 0 and phi = 0".into(),
            ));
        }
        Ok(())
    }

    /// Resolved configuration as `# key = value` lines.
    pub fn echo(&self) -> String {
        let r_list: Vec<String> = self.r_values().iter().map(|r| r.to_string()).collect();
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "# {k} = {v}");
        };
        line("mode", self.mode.as_str().into());
        line("r_values", r_list.join(", "));
        line("phi", self.phi.to_string());
        line("g0", self.g0.to_string());
        line("gamma", self.gamma.to_string());
        line("kappa", self.kappa.to_string());
        line("delta_a", self.delta_a.to_string());
        line("delta_c", self.delta_c.to_string());
        line("atom_present", self.atom_present.to_string());
        line("fock_cutoff", self.fock_cutoff.to_string());
        line("max_cutoff", self.max_cutoff().to_string());
        line("guard", self.guard().to_string());
        line("epsilon", self.epsilon.to_string());
        line("wigner_extent", self.wigner_extent.to_string());
        line("wigner_points", self.wigner_points.to_string());
        line("output_path", self.output_path.display().to_string());
        out
    }

    /// Steady state at squeezing strength `r`, growing the cutoff up to
    /// [`SweepConfig::max_cutoff`] when the guard levels are too populated.
    pub fn solve(&self, r: f64) -> Result<DensityMatrix> {
        let params = self.params();
        let bath = SqueezedBath::new(r, self.phi)?;
        let policy = self.truncation();
        let build = |n| build_liouvillian(&params, &bath, params.space(n)?);
        steady_state_adaptive(build, self.fock_cutoff, self.max_cutoff(), &policy)
    }
}

fn at_point<T>(r: f64, res: Result<T>) -> Result<T> {
    res.map_err(|e| Error::AtPoint { r, source: Box::new(e) })
}

fn guard_of(cfg: &SweepConfig, rho: &DensityMatrix) -> usize {
    cfg.truncation().guard_for(rho.space().fock_cutoff().unwrap_or(cfg.fock_cutoff))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentsRow {
    pub r: f64,
    pub moments: Moments,
    pub fock_cutoff: usize,
}

pub fn run_moments_sweep(cfg: &SweepConfig) -> Result<Vec<MomentsRow>> {
    cfg.validate()?;
    cfg.r_values()
        .par_iter()
        .map(|&r| {
            at_point(r, (|| {
                let rho = cfg.solve(r)?;
                Ok(MomentsRow {
                    r,
                    moments: observables::moments(&rho, guard_of(cfg, &rho))?,
                    fock_cutoff: rho.space().fock_cutoff().unwrap_or(0),
                })
            })())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionRecord {
    pub r: f64,
    pub fock_cutoff: usize,
    /// P(n) for n below the guard levels.
    pub probabilities: Vec<f64>,
    pub tail_mass: f64,
}

pub fn run_distribution(cfg: &SweepConfig) -> Result<Vec<DistributionRecord>> {
    cfg.validate()?;
    cfg.r_values()
        .par_iter()
        .map(|&r| {
            at_point(r, (|| {
                let rho = cfg.solve(r)?;
                let dist = observables::photon_distribution_with_guard(&rho, guard_of(cfg, &rho))?;
                Ok(DistributionRecord {
                    r,
                    fock_cutoff: rho.space().fock_cutoff().unwrap_or(0),
                    probabilities: dist.reported().to_vec(),
                    tail_mass: dist.tail_mass,
                })
            })())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerRecord {
    pub r: f64,
    pub g0: f64,
    pub fock_cutoff: usize,
    pub grid: WignerGrid,
    pub moments: QuadratureMoments,
}

pub fn run_wigner(cfg: &SweepConfig) -> Result<Vec<WignerRecord>> {
    cfg.validate()?;
    let axis = symmetric_axis(cfg.wigner_extent, cfg.wigner_points);
    cfg.r_values()
        .iter()
        .map(|&r| {
            at_point(r, (|| {
                let rho = cfg.solve(r)?;
                let field = if rho.space().has_atom() { observables::partial_trace_atom(&rho)? } else { rho };
                let grid = observables::wigner(&field, &axis, &axis)?;
                let moments = grid.moments();
                Ok(WignerRecord {
                    r,
                    g0: if cfg.atom_present { cfg.g0 } else { 0.0 },
                    fock_cutoff: field.space().fock_cutoff().unwrap_or(0),
                    grid,
                    moments,
                })
            })())
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovRow {
    pub r: f64,
    pub fock_cutoff: usize,
    pub mean_n_lab: f64,
    pub mean_n_bog: f64,
    pub rho_ee_lab: f64,
    pub rho_ee_bog: f64,
    /// Largest disagreement among the compared observables.
    pub discrepancy: f64,
    pub pass: bool,
}

/// ⟨a†a⟩ evaluated with a written in terms of the Bogoliubov mode,
/// a = cosh r·b + sinh r·b†.
pub fn mean_photon_number_via_b(rho: &DensityMatrix, r: f64) -> Result<f64> {
    let n = rho
        .space()
        .fock_cutoff()
        .ok_or_else(|| Error::DimensionMismatch("state has no cavity mode".into()))?;
    let b = ops::bogoliubov_b(r, n)?;
    let a: Operator = b.scaled(r.cosh()).plus(&b.dagger().scaled(r.sinh()))?;
    let value = observables::expectation(rho, &a.dagger().compose(&a)?)?;
    if value.im.abs() > observables::IMAG_TOL {
        return Err(Error::CorruptedState(format!("⟨a†a⟩ has imaginary part {:.3e}", value.im)));
    }
    Ok(value.re)
}

/// Solve a point in both frames at the same cutoff and compare.
pub fn bogoliubov_point(cfg: &SweepConfig, r: f64) -> Result<BogoliubovRow> {
    let params = cfg.params();
    let bath = SqueezedBath::new(r, cfg.phi)?;
    let lab = cfg.solve(r)?;
    let space = lab.space();
    let bog = steady_state(&build_bogoliubov_liouvillian(&params, &bath, space)?, &cfg.truncation())?;
    let mean_n_lab = observables::mean_photon_number(&lab)?;
    let mean_n_bog = mean_photon_number_via_b(&bog, r)?;
    let (rho_ee_lab, rho_ee_bog) = if space.has_atom() {
        (observables::atom_excited_population(&lab)?, observables::atom_excited_population(&bog)?)
    } else {
        (0.0, 0.0)
    };
    let discrepancy = (mean_n_lab - mean_n_bog).abs().max((rho_ee_lab - rho_ee_bog).abs());
    Ok(BogoliubovRow {
        r,
        fock_cutoff: space.fock_cutoff().unwrap_or(0),
        mean_n_lab,
        mean_n_bog,
        rho_ee_lab,
        rho_ee_bog,
        discrepancy,
        pass: discrepancy < BOGOLIUBOV_TOL,
    })
}

pub fn run_bogoliubov_check(cfg: &SweepConfig) -> Result<Vec<BogoliubovRow>> {
    cfg.validate()?;
    cfg.r_values()
        .par_iter()
        .map(|&r| at_point(r, bogoliubov_point(cfg, r)))
        .collect()
}

fn header(cfg: &SweepConfig) -> String {
    format!("# simulate: atom in a squeezed-vacuum-driven cavity\n{}", cfg.echo())
}

pub fn render_moments(cfg: &SweepConfig, rows: &[MomentsRow]) -> String {
    let mut out = header(cfg);
    out.push_str("r,mean_n,P0,P1,abs_aa,arg_aa,rho_ee,purity,tail_mass,fock_cutoff\n");
    for row in rows {
        let m = &row.moments;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.r,
            m.mean_n,
            m.p0,
            m.p1,
            m.pair.norm(),
            m.pair.arg(),
            m.rho_ee,
            m.purity,
            m.tail_mass,
            row.fock_cutoff
        );
    }
    out
}

pub fn render_distribution(cfg: &SweepConfig, record: &DistributionRecord) -> String {
    let mut out = header(cfg);
    let _ = writeln!(out, "# r = {}", record.r);
    let _ = writeln!(out, "# fock_cutoff_used = {}", record.fock_cutoff);
    let _ = writeln!(out, "# tail_mass = {}", record.tail_mass);
    out.push_str("n,P\n");
    for (n, p) in record.probabilities.iter().enumerate() {
        let _ = writeln!(out, "{n},{p}");
    }
    out
}

pub fn render_wigner(cfg: &SweepConfig, record: &WignerRecord) -> String {
    let mut out = header(cfg);
    let m = &record.moments;
    let _ = writeln!(out, "# r = {}", record.r);
    let _ = writeln!(out, "# g0 = {}", record.g0);
    let _ = writeln!(out, "# fock_cutoff_used = {}", record.fock_cutoff);
    let _ = writeln!(out, "# integral = {}", m.norm);
    let _ = writeln!(out, "# variance_ratio = {}", m.variance_ratio());
    out.push_str("q\\p");
    for p in &record.grid.p_axis {
        let _ = write!(out, ",{p}");
    }
    out.push('\n');
    for (i, q) in record.grid.q_axis.iter().enumerate() {
        let _ = write!(out, "{q}");
        for w in record.grid.values.row(i) {
            let _ = write!(out, ",{w}");
        }
        out.push('\n');
    }
    out
}

pub fn render_bogoliubov(cfg: &SweepConfig, rows: &[BogoliubovRow]) -> String {
    let mut out = header(cfg);
    out.push_str("r,mean_n_lab,mean_n_bog,rho_ee_lab,rho_ee_bog,discrepancy,pass,fock_cutoff\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.r,
            row.mean_n_lab,
            row.mean_n_bog,
            row.rho_ee_lab,
            row.rho_ee_bog,
            row.discrepancy,
            row.pass,
            row.fock_cutoff
        );
    }
    out
}

/// `dir/stem_r{r}.ext` for per-point files.
pub fn point_path(base: &Path, r: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    let name = match base.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}_r{r}.{ext}"),
        None => format!("{stem}_r{r}"),
    };
    base.with_file_name(name)
}

/// Run the configured mode and return the rendered files, without touching disk.
pub fn render(cfg: &SweepConfig) -> Result<Vec<(PathBuf, String)>> {
    Ok(match cfg.mode {
        Mode::MomentsSweep => {
            vec![(cfg.output_path.clone(), render_moments(cfg, &run_moments_sweep(cfg)?))]
        }
        Mode::BogoliubovCheck => {
            vec![(cfg.output_path.clone(), render_bogoliubov(cfg, &run_bogoliubov_check(cfg)?))]
        }
        Mode::Distribution => run_distribution(cfg)?
            .iter()
            .map(|rec| (point_path(&cfg.output_path, rec.r), render_distribution(cfg, rec)))
            .collect(),
        Mode::Wigner => run_wigner(cfg)?
            .iter()
            .map(|rec| (point_path(&cfg.output_path, rec.r), render_wigner(cfg, rec)))
            .collect(),
    })
}

/// Run the configured mode and write its files. Nothing is written unless
/// every point succeeds.
pub fn run(cfg: &SweepConfig) -> Result<Vec<PathBuf>> {
    let files = render(cfg)?;
    for (path, text) in &files {
        fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

/// Convenience for callers comparing phases: arg⟨aa⟩ shifted into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI { y - two_pi } else { y }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config_text() {
        let text = "# distribution run\nmode = distribution\nr_values = 0.25, 0.5 # two points\n\
                    g0 = 5\natom_present = false\nfock_cutoff = 40\nmax_cutoff = 80\n";
        let cfg = SweepConfig::parse(text).unwrap();
        assert_eq!(cfg.mode, Mode::Distribution);
        assert_eq!(cfg.r_values(), vec![0.25, 0.5]);
        assert_eq!(cfg.g0, 5.0);
        assert!(!cfg.atom_present);
        assert_eq!(cfg.fock_cutoff, 40);
        assert_eq!(cfg.max_cutoff(), 80);
        assert_eq!(cfg.guard(), 8);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(SweepConfig::parse("bogus = 1"), Err(Error::Config(_))));
        assert!(matches!(SweepConfig::parse("g0 = fifteen"), Err(Error::Config(_))));
        assert!(matches!(SweepConfig::parse("just text"), Err(Error::Config(_))));
        assert!(matches!(SweepConfig::parse("mode = plot"), Err(Error::Config(_))));
        let cfg = SweepConfig::parse("r_values = -0.1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = SweepConfig::parse("mode = bogoliubov_check\nphi = 0.3").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert_eq!(Error::Config("x".into()).exit_code(), 2);
    }

    #[test]
    fn r_ranges() {
        assert_eq!(parse_r_values("0:0.25:1").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let grid = default_r_grid();
        assert_eq!(grid.len(), 31);
        assert_eq!(grid[3], 0.15);
        assert_eq!(parse_r_values("0:0.05:1.5").unwrap(), grid);
        assert!(parse_r_values("1:0.1:0").is_err());
    }

    #[test]
    fn echo_lists_every_key() {
        let echo = SweepConfig::default().echo();
        for key in [
            "mode", "r_values", "phi", "g0", "gamma", "kappa", "delta_a", "delta_c", "atom_present",
            "fock_cutoff", "max_cutoff", "guard", "epsilon", "wigner_extent", "wigner_points", "output_path",
        ] {
            assert!(echo.contains(&format!("# {key} = ")), "missing {key}");
        }
        // echoed config parses back to the same thing
        let stripped: String = echo.lines().map(|l| format!("{}\n", l.trim_start_matches("# "))).collect();
        let back = SweepConfig::parse(&stripped).unwrap();
        assert_eq!(back.r_values(), SweepConfig::default().r_values());
        assert_eq!(back.guard(), 12);
    }

    #[test]
    fn per_point_paths() {
        assert_eq!(point_path(Path::new("out/dist.csv"), 0.25), PathBuf::from("out/dist_r0.25.csv"));
        assert_eq!(point_path(Path::new("grid"), 1.0), PathBuf::from("grid_r1"));
    }

    #[test]
    fn vacuum_sweep_row() {
        let cfg = SweepConfig {
            atom_present: false,
            r_values: Some(vec![0.0]),
            fock_cutoff: 20,
            ..SweepConfig::default()
        };
        let rows = run_moments_sweep(&cfg).unwrap();
        let m = rows[0].moments;
        assert!(m.mean_n.abs() < 1e-14 && m.p1.abs() < 1e-14 && m.pair.norm() < 1e-14);
        assert_eq!(m.rho_ee, 0.0);
        assert!((m.p0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn truncation_failure_names_the_point() {
        let cfg = SweepConfig {
            atom_present: false,
            r_values: Some(vec![0.0, 1.0]),
            fock_cutoff: 10,
            max_cutoff: Some(10),
            ..SweepConfig::default()
        };
        let err = run_moments_sweep(&cfg).unwrap_err();
        assert!(matches!(err, Error::AtPoint { r, .. } if r == 1.0));
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn phase_wrapping() {
        use std::f64::consts::PI;
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_phase(-PI / 4.0) + PI / 4.0).abs() < 1e-15);
    }
}
