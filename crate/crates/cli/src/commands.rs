use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use hardy_core::constants::{a_coeff, d0_threshold, kp_constant, mu2, sphere_moment, unit_ball_volume};
use hardy_core::functional::{
    sharpness_family, sharpness_probe, theorem_a_cases, verify_classical, Classical, Integrator, LevelSetRule,
    PointwiseRule, TestFunction, SHARPNESS_ALPHAS,
};
use hardy_core::geometry::{
    check_bmean_bound, check_mean_distance_lemma, min_ratio_identity, volume_identity, SphereQuadrature, SphereScheme,
};
use hardy_core::hardyfn::{
    check_a_monotone, check_lemma22_ii, condition_i_margin, taylor_remainder_check, Expansion, LemmaConfig, GRID_TOL,
};
use hardy_core::report::{records_to_csv, slack_reports_to_csv, to_json, write_text, SLACK_ERROR_FACTOR};
use hardy_core::spectral::{cn_lower_bound, cn_transformed_estimate, u_eps_quotient, Grading, RadialMesh};
use hardy_core::{ConvexDomain, Format, HardyError, SlackReport};

use crate::config::ConfigFile;
use crate::settings::{parse_domains, parse_f64_list, parse_usize_list};
use crate::Common;

/// Keys accepted in a config file.
pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "out",
    "format",
    "jobs",
    "domain",
    "N",
    "p",
    "k",
    "bigD-mult",
    "grid",
    "b",
    "which",
    "quad",
    "points",
    "sphere",
    "gamma",
];

/// Step sizes of the three-dimensional trial family.
const EPS_SWEEP: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];
const EPS_LIMIT: f64 = 1e-3;

/// Sphere rule resolution for the volume identity, whose integrand `tau^N`
/// is too rough for Monte Carlo at 0.5%.
const VOLUME_RESOLUTION: usize = 256;

#[derive(Debug)]
pub enum CliError {
    /// bad flags or configuration: exit 2
    Usage(String),
    /// a computation failed: exit 1
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Failure(_) => ExitCode::from(1),
        }
    }
}

impl From<HardyError> for CliError {
    fn from(e: HardyError) -> Self {
        match e {
            HardyError::NoConvergence(_)
            | HardyError::IndefiniteMass(_)
            | HardyError::Quadrature(_)
            | HardyError::Io(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Ctx {
    section: &'static str,
    file: ConfigFile,
    common: Common,
    format: Format,
    out: Option<PathBuf>,
    seed: u64,
    pool: rayon::ThreadPool,
}

impl Ctx {
    pub fn new(section: &'static str, file: ConfigFile, common: Common) -> Result<Self> {
        let mut ctx = Ctx {
            section,
            file,
            common,
            format: Format::Json,
            out: None,
            seed: 0,
            pool: rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .map_err(|e| CliError::Failure(e.to_string()))?,
        };
        ctx.format = ctx.value(&ctx.common.format.clone(), "format", "json", |s| {
            s.parse::<Format>().map_err(|e| e.to_string())
        })?;
        ctx.out = ctx
            .raw(&ctx.common.out.as_ref().map(|p| p.display().to_string()), "out")
            .map(PathBuf::from);
        ctx.seed = ctx.value(&ctx.common.seed.clone(), "seed", "0", |s| {
            s.parse::<u64>().map_err(|e| e.to_string())
        })?;
        let jobs = ctx.value(&ctx.common.jobs.clone(), "jobs", "0", |s| {
            s.parse::<usize>().map_err(|e| e.to_string())
        })?;
        ctx.pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Failure(e.to_string()))?;
        Ok(ctx)
    }

    fn raw(&self, cli: &Option<String>, key: &str) -> Option<String> {
        cli.clone()
            .or_else(|| self.file.get(self.section, key).map(str::to_string))
    }

    fn value<T>(
        &self,
        cli: &Option<String>,
        key: &str,
        default: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<T> {
        let s = self.raw(cli, key).unwrap_or_else(|| default.to_string());
        parse(&s).map_err(|e| CliError::Usage(format!("--{key}: {e}")))
    }

    fn f64s(&self, cli: &Option<String>, key: &str, default: &str) -> Result<Vec<f64>> {
        self.value(cli, key, default, parse_f64_list)
    }

    fn usizes(&self, cli: &Option<String>, key: &str, default: &str) -> Result<Vec<usize>> {
        self.value(cli, key, default, parse_usize_list)
    }

    fn grid(&self, default: usize) -> Result<usize> {
        let g = self.value(&self.common.grid, "grid", &default.to_string(), |s| {
            s.parse::<usize>().map_err(|e| e.to_string())
        })?;
        if g < 2 {
            return Err(CliError::Usage("--grid: must be at least 2".into()));
        }
        Ok(g)
    }

    fn ps(&self, default: &str) -> Result<Vec<f64>> {
        let ps = self.f64s(&self.common.p, "p", default)?;
        if let Some(p) = ps.iter().find(|p| !(**p > 1.0)) {
            return Err(CliError::Usage(format!("--p: {p} is not > 1")));
        }
        Ok(ps)
    }

    fn mults(&self, default: &str) -> Result<Vec<f64>> {
        let ms = self.f64s(&self.common.big_d_mult, "bigD-mult", default)?;
        if let Some(m) = ms.iter().find(|m| !(**m >= 1.0)) {
            return Err(CliError::Usage(format!("--bigD-mult: {m} is below 1")));
        }
        Ok(ms)
    }

    fn domains(&self, default_domain: &str, default_n: &str) -> Result<Vec<(String, ConvexDomain)>> {
        let specs = self.value(&self.common.domain, "domain", default_domain, parse_domains)?;
        let dims = self.usizes(&self.common.n, "N", default_n)?;
        if let Some(n) = dims.iter().find(|n| **n < 1) {
            return Err(CliError::Usage(format!("--N: {n} is not a dimension")));
        }
        let mut out = Vec::new();
        for s in &specs {
            out.extend(
                s.instantiate(&dims)
                    .map_err(|e| CliError::Usage(format!("--domain: {e}")))?,
            );
        }
        if out.is_empty() {
            return Err(CliError::Usage("--domain: no domains".into()));
        }
        Ok(out)
    }

    fn emit<T: Serialize>(&self, rows: &[T], csv: impl Fn(&[T]) -> hardy_core::Result<String>) -> Result<()> {
        let text = match self.format {
            Format::Json => to_json(rows)? + "\n",
            Format::Csv => csv(rows)?,
        };
        match &self.out {
            Some(path) => write_text(path, &text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                        Err(CliError::Failure(format!("stdout: {e}")))
                    }
                    _ => Ok(()),
                }
            }
        }
    }

    fn finish(&self, total: usize, failed: usize) -> ExitCode {
        eprintln!("{}: {total} rows, {failed} failed", self.section);
        if failed == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    }

    /// `D0` for each distinct `(p, k, diam)`, computed in parallel.
    fn thresholds(&self, keys: Vec<(f64, usize, f64)>) -> BTreeMap<(u64, usize, u64), f64> {
        let mut uniq: Vec<(f64, usize, f64)> = Vec::new();
        for key in keys {
            if !uniq.iter().any(|u| u.0 == key.0 && u.1 == key.1 && u.2 == key.2) {
                uniq.push(key);
            }
        }
        let vals: Vec<f64> = self
            .pool
            .install(|| uniq.par_iter().map(|&(p, k, d)| d0_threshold(p, k, d)).collect());
        uniq.iter()
            .zip(vals)
            .map(|(&(p, k, d), v)| ((p.to_bits(), k, d.to_bits()), v))
            .collect()
    }

    pub fn constants(self) -> Result<ExitCode> {
        let doms = self.domains("ball:1", "2..5")?;
        let ps = self.ps("1.5,2,3")?;
        let ks = self.usizes(&self.common.k, "k", "0,1,2")?;
        let mut keys = Vec::new();
        for (_, dom) in &doms {
            for &p in &ps {
                for &k in &ks {
                    keys.push((p, k, dom.diameter()));
                }
            }
        }
        let d0 = self.thresholds(keys);
        let mut rows = Vec::new();
        for (label, dom) in &doms {
            let n = dom.dim();
            let diam = dom.diameter();
            for &p in &ps {
                for &k in &ks {
                    rows.push(ConstantsRow {
                        case: format!("constants/{label}/N={n}/p={p}/k={k}"),
                        n,
                        p,
                        k,
                        a_n: unit_ball_volume(n)?,
                        k_p: kp_constant(n, p)?,
                        big_k_p: sphere_moment(n, p)?,
                        a: a_coeff(p, k),
                        mu2: mu2(),
                        diam,
                        d0: d0[&(p.to_bits(), k, diam.to_bits())],
                    });
                }
            }
        }
        rows.sort_by(|a, b| a.case.cmp(&b.case));
        self.emit(&rows, records_to_csv)?;
        Ok(self.finish(rows.len(), 0))
    }

    pub fn lemma_check(self, b: Option<String>) -> Result<ExitCode> {
        let doms = self.domains("ball:1", "2")?;
        let ps = self.ps("1.5,2,3")?;
        let ks = self.usizes(&self.common.k, "k", "0,1,2")?;
        let mults = self.mults("1,2,10")?;
        let grid = self.grid(1000)?;
        let b_opt = match self.raw(&b, "b") {
            Some(s) => Some(s.parse::<f64>().map_err(|e| CliError::Usage(format!("--b: {e}")))?),
            None => None,
        };
        let mut keys = Vec::new();
        for (_, dom) in &doms {
            for &p in &ps {
                for &k in &ks {
                    keys.push((p, k, dom.diameter()));
                }
            }
        }
        let d0 = self.thresholds(keys);
        let mut jobs = Vec::new();
        for (label, dom) in &doms {
            let diam = dom.diameter();
            let b = b_opt.unwrap_or(0.5 * diam);
            for &p in &ps {
                for &k in &ks {
                    for &m in &mults {
                        let big_d = m * d0[&(p.to_bits(), k, diam.to_bits())];
                        let cfg = LemmaConfig::with_geometric_grid(p, k, big_d, b, grid)?;
                        let prefix = format!("{label}/N={}/p={p}/k={k}/D={m}D0", dom.dim());
                        jobs.push((prefix, cfg, diam));
                    }
                }
            }
        }
        let mut rows: Vec<LemmaRow> = self.pool.install(|| {
            jobs.par_iter()
                .flat_map_iter(|(prefix, cfg, diam)| {
                    let margin = condition_i_margin(cfg.p, cfg.k, cfg.big_d, *diam);
                    let cond = LemmaRow {
                        case: format!("condition-i/{prefix}"),
                        check: "condition-i".into(),
                        p: cfg.p,
                        k: cfg.k,
                        big_d: Some(cfg.big_d),
                        b: Some(cfg.b),
                        points: 1,
                        worst_s: None,
                        worst_value: margin,
                        tolerance: Some(GRID_TOL),
                        passed: margin >= -GRID_TOL,
                    };
                    let grids = [check_lemma22_ii(cfg), check_a_monotone(cfg)]
                        .into_iter()
                        .map(move |g| LemmaRow {
                            case: format!("{}/{prefix}", g.check),
                            check: g.check.clone(),
                            p: g.p,
                            k: g.k,
                            big_d: Some(g.big_d),
                            b: Some(g.b),
                            points: g.points,
                            worst_s: Some(g.worst_s),
                            worst_value: g.worst_value,
                            tolerance: Some(g.tolerance),
                            passed: g.passed,
                        });
                    std::iter::once(cond).chain(grids).collect::<Vec<_>>()
                })
                .collect()
        });
        for &p in &ps {
            for &k in &ks {
                for (which, name) in [(Expansion::Hop, "taylor-hop"), (Expansion::Snow, "taylor-snow")] {
                    let t = taylor_remainder_check(p, k, which)?;
                    rows.push(LemmaRow {
                        case: format!("{name}/p={p}/k={k}"),
                        check: name.into(),
                        p,
                        k,
                        big_d: None,
                        b: None,
                        points: t.etas.len(),
                        worst_s: None,
                        worst_value: t.ratios.iter().fold(0.0, |m, r| m.max(r.abs())),
                        tolerance: None,
                        passed: t.passed,
                    });
                }
            }
        }
        rows.sort_by(|a, b| a.case.cmp(&b.case));
        let failed = rows.iter().filter(|r| !r.passed).count();
        self.emit(&rows, records_to_csv)?;
        Ok(self.finish(rows.len(), failed))
    }

    fn integrator(&self, quad: &Option<String>) -> Result<Integrator> {
        let kind = self.raw(quad, "quad").unwrap_or_else(|| "level-set".into());
        match kind.as_str() {
            "level-set" => {
                let grid = self.grid(2)?;
                Ok(Integrator::LevelSet(LevelSetRule {
                    panel_width: 1.0 / grid as f64,
                    ..Default::default()
                }))
            }
            "pointwise" => {
                let grid = self.grid(16)?;
                Ok(Integrator::Pointwise(PointwiseRule {
                    panels: grid,
                    seed: self.seed,
                    ..Default::default()
                }))
            }
            other => Err(CliError::Usage(format!("--quad: unknown scheme {other:?}"))),
        }
    }

    pub fn verify(self, which: Option<String>, quad: Option<String>) -> Result<ExitCode> {
        let doms = self.domains("ball:1;box:1", "2..3")?;
        let ps = self.ps("1.5,2,3")?;
        let integ = self.integrator(&quad)?;
        let which = match self.raw(&which, "which").as_deref() {
            None => None,
            Some("hi") => Some((Classical::Hi, "hi")),
            Some("l") => Some((Classical::L, "l")),
            Some("t") => Some((Classical::T, "t")),
            Some(other) => return Err(CliError::Usage(format!("--which: expected hi, l or t, got {other:?}"))),
        };
        let results: Vec<hardy_core::Result<SlackReport>> = match which {
            None => {
                let ks = self.usizes(&self.common.k, "k", "0,1,2")?;
                let mults = self.mults("1,2,10")?;
                let cases = theorem_a_cases(&doms, &ps, &ks, &mults)?;
                self.pool.install(|| cases.par_iter().map(|c| c.run(&integ)).collect())
            }
            Some((kind, tag)) => {
                if kind == Classical::L && !ps.contains(&2.0) {
                    return Err(CliError::Usage("--which l is defined only for p = 2".into()));
                }
                let mut cases = Vec::new();
                for (label, dom) in &doms {
                    for &p in &ps {
                        if kind == Classical::L && p != 2.0 {
                            continue;
                        }
                        for u in TestFunction::suite(dom)? {
                            let key = format!("classical-{tag}/{label}/N={}/p={p}/{}", dom.dim(), u.label());
                            cases.push((key, dom, p, u));
                        }
                    }
                }
                cases.sort_by(|a, b| a.0.cmp(&b.0));
                self.pool.install(|| {
                    cases
                        .par_iter()
                        .map(|(key, dom, p, u)| {
                            verify_classical(dom, u, *p, kind, &integ).map(|mut r| {
                                r.case = key.clone();
                                r
                            })
                        })
                        .collect()
                })
            }
        };
        let reports = results.into_iter().collect::<hardy_core::Result<Vec<_>>>()?;
        let failed = reports.iter().filter(|r| !r.passed).count();
        self.emit(&reports, slack_reports_to_csv)?;
        Ok(self.finish(reports.len(), failed))
    }

    pub fn geometry_check(self, points: Option<String>, sphere: Option<String>) -> Result<ExitCode> {
        let doms = self.domains("box:1", "3")?;
        let ps = self.ps("2")?;
        let count = self.value(&points, "points", "100", |s| {
            s.parse::<usize>().map_err(|e| e.to_string())
        })?;
        let scheme = self.raw(&sphere, "sphere").unwrap_or_else(|| "mc".into());
        let grid = match scheme.as_str() {
            "mc" => self.grid(100_000)?,
            "grid" => self.grid(256)?,
            other => return Err(CliError::Usage(format!("--sphere: expected mc or grid, got {other:?}"))),
        };
        let mut rows = Vec::new();
        for (label, dom) in &doms {
            let n = dom.dim();
            let quad = match scheme.as_str() {
                "mc" => SphereQuadrature::new(
                    n,
                    SphereScheme::MonteCarlo {
                        n: grid,
                        seed: self.seed,
                    },
                )?,
                _ => SphereQuadrature::default_for(n, grid, self.seed)?,
            };
            let vol_quad = SphereQuadrature::default_for(n, VOLUME_RESOLUTION, self.seed)?;
            let diam = dom.diameter();
            let xs = dom.sample_interior(count, 1e-3 * diam, self.seed);
            if xs.len() < count {
                return Err(CliError::Failure(format!(
                    "{label}: could not sample {count} interior points"
                )));
            }
            let prefix = format!("{label}/N={n}");
            let out = Mutex::new(Vec::new());
            self.pool.install(|| {
                xs.par_iter().enumerate().try_for_each(|(i, x)| -> Result<()> {
                    let mut local = Vec::new();
                    for &p in &ps {
                        let r = check_mean_distance_lemma(dom, x, p, &quad)?;
                        local.push(GeometryRow::slack(
                            format!("mean-distance/{prefix}/p={p}/x{i:04}"),
                            "mean-distance",
                            &r,
                        ));
                        let r = check_bmean_bound(dom, x, p, &quad)?;
                        local.push(GeometryRow::slack(format!("bmean/{prefix}/p={p}/x{i:04}"), "bmean", &r));
                    }
                    if i < 5 {
                        let v = volume_identity(dom, x, &vol_quad, 5e-3)?;
                        local.push(GeometryRow {
                            case: format!("volume/{prefix}/x{i:04}"),
                            check: "volume".into(),
                            value: v.estimate,
                            reference: v.exact,
                            slack: v.exact.map(|e| v.estimate - e),
                            quad_error: Some(v.quad_error),
                            passed: v.passed,
                        });
                    }
                    out.lock().expect("row buffer").extend(local);
                    Ok(())
                })
            })?;
            rows.extend(out.into_inner().expect("row buffer"));
            if let ConvexDomain::Ball { center, .. } = dom {
                for &p in &ps {
                    let r = check_bmean_bound(dom, center, p, &quad)?;
                    let mut row = GeometryRow::slack(format!("bmean-center/{prefix}/p={p}"), "bmean-center", &r);
                    row.passed = Some(r.slack.abs() <= SLACK_ERROR_FACTOR * r.quad_error + 1e-12 * r.rhs.abs());
                    rows.push(row);
                }
            }
        }
        for n in 1..=6usize {
            let (m, _) = min_ratio_identity(n)?;
            let want = 0.5f64.powi(n as i32 - 1);
            rows.push(GeometryRow {
                case: format!("min-ratio/N={n}"),
                check: "min-ratio".into(),
                value: m,
                reference: Some(want),
                slack: Some(m - want),
                quad_error: None,
                passed: Some((m - want).abs() <= 1e-10),
            });
        }
        rows.sort_by(|a, b| a.case.cmp(&b.case));
        let failed = rows.iter().filter(|r| r.passed == Some(false)).count();
        self.emit(&rows, records_to_csv)?;
        Ok(self.finish(rows.len(), failed))
    }

    pub fn best_constant(self) -> Result<ExitCode> {
        let dims = self.usizes(&self.common.n, "N", "2..5")?;
        if let Some(n) = dims.iter().find(|n| **n < 2) {
            return Err(CliError::Usage(format!("--N: {n} is below 2")));
        }
        let grid = self.grid(4000)?;
        let mesh = RadialMesh::new(grid, Grading::GeometricToZeroAndOne)?;
        let mu = mu2();
        let estimates: Vec<hardy_core::Result<_>> = self
            .pool
            .install(|| dims.par_iter().map(|&n| cn_transformed_estimate(n, &mesh)).collect());
        let mut rows = Vec::new();
        for (&n, est) in dims.iter().zip(estimates) {
            let est = est?;
            let lb = cn_lower_bound(n)?;
            let passed = match n {
                2 => None,
                3 => Some((est.value - mu).abs() <= 5e-3),
                _ => Some(est.value >= lb - 5e-3),
            };
            rows.push(BestRow::new(
                format!("estimate/N={n}"),
                "transformed-estimate",
                Some(n),
                None,
                est.value,
                Some(lb),
                Some(est.residual),
                passed,
            ));
            rows.push(BestRow::new(
                format!("lower-bound/N={n}"),
                "lower-bound",
                Some(n),
                None,
                lb,
                None,
                None,
                None,
            ));
            if n == 3 {
                let gap = est.value - lb;
                rows.push(BestRow::new(
                    "pinch-gap/N=3".into(),
                    "pinch-gap",
                    Some(3),
                    None,
                    gap,
                    Some(0.0),
                    None,
                    Some(gap.abs() <= 5e-3),
                ));
            }
        }
        if dims.contains(&3) {
            let mut eps: Vec<f64> = EPS_SWEEP.to_vec();
            eps.push(EPS_LIMIT);
            let qs: Vec<hardy_core::Result<f64>> = self
                .pool
                .install(|| eps.par_iter().map(|&e| u_eps_quotient(e, &mesh)).collect());
            let qs = qs.into_iter().collect::<hardy_core::Result<Vec<_>>>()?;
            for (&e, &q) in eps.iter().zip(&qs) {
                rows.push(BestRow::new(
                    format!("u-eps/eps={e}"),
                    "u-eps-quotient",
                    Some(3),
                    Some(e),
                    q,
                    Some(mu),
                    None,
                    Some(q >= mu - 1e-6),
                ));
            }
            let sweep = &qs[..EPS_SWEEP.len()];
            let decreasing = sweep.windows(2).all(|w| w[1] < w[0]);
            rows.push(BestRow::new(
                "u-eps/monotone".into(),
                "u-eps-monotone",
                Some(3),
                None,
                sweep[sweep.len() - 1] - sweep[0],
                None,
                None,
                Some(decreasing),
            ));
            let gap = qs[EPS_SWEEP.len()] - mu;
            rows.push(BestRow::new(
                "u-eps/limit".into(),
                "u-eps-limit",
                Some(3),
                Some(EPS_LIMIT),
                gap,
                Some(0.05),
                None,
                Some(gap <= 0.05),
            ));
        }
        rows.sort_by(|a, b| a.case.cmp(&b.case));
        let failed = rows.iter().filter(|r| r.passed == Some(false)).count();
        self.emit(&rows, records_to_csv)?;
        Ok(self.finish(rows.len(), failed))
    }

    pub fn probe_sharpness(self, gamma: Option<String>) -> Result<ExitCode> {
        let doms = self.domains("box:1", "2")?;
        let ps = self.ps("1.5,2,3")?;
        let ks = self.usizes(&self.common.k, "k", "1,2")?;
        if ks.contains(&0) {
            return Err(CliError::Usage("--k: the probe needs k >= 1".into()));
        }
        let mults = self.mults("1")?;
        let gammas = self.f64s(&gamma, "gamma", "2,1.5")?;
        let integ = self.integrator(&None)?;
        let mut keys = Vec::new();
        for (_, dom) in &doms {
            for &p in &ps {
                for &k in &ks {
                    keys.push((p, k, dom.diameter()));
                }
            }
        }
        let d0 = self.thresholds(keys);
        let mut jobs = Vec::new();
        for (label, dom) in &doms {
            for &p in &ps {
                for &k in &ks {
                    for &m in &mults {
                        for &g in &gammas {
                            let big_d = m * d0[&(p.to_bits(), k, dom.diameter().to_bits())];
                            jobs.push((
                                format!("{label}/N={}/p={p}/k={k}/D={m}D0/gamma={g}", dom.dim()),
                                dom,
                                p,
                                k,
                                g,
                                big_d,
                            ));
                        }
                    }
                }
            }
        }
        let results: Vec<hardy_core::Result<Vec<_>>> = self.pool.install(|| {
            jobs.par_iter()
                .map(|(prefix, dom, p, k, g, big_d)| {
                    let fam = sharpness_family(*p, *big_d, &SHARPNESS_ALPHAS);
                    let rows = sharpness_probe(dom, *p, *k, *g, *big_d, &fam, &integ)?;
                    Ok(rows
                        .into_iter()
                        .map(|mut r| {
                            r.case = format!("sharpness/{prefix}/{}", r.function);
                            r
                        })
                        .collect())
                })
                .collect()
        });
        let mut rows = Vec::new();
        for r in results {
            rows.extend(r?);
        }
        rows.sort_by(|a, b| a.case.cmp(&b.case));
        let failed = rows.iter().filter(|r| r.passed == Some(false)).count();
        self.emit(&rows, records_to_csv)?;
        Ok(self.finish(rows.len(), failed))
    }
}

#[derive(Debug, Serialize)]
struct ConstantsRow {
    case: String,
    n: usize,
    p: f64,
    k: usize,
    a_n: f64,
    k_p: f64,
    big_k_p: f64,
    a: f64,
    mu2: f64,
    diam: f64,
    d0: f64,
}

#[derive(Debug, Serialize)]
struct LemmaRow {
    case: String,
    check: String,
    p: f64,
    k: usize,
    big_d: Option<f64>,
    b: Option<f64>,
    points: usize,
    worst_s: Option<f64>,
    worst_value: f64,
    tolerance: Option<f64>,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct GeometryRow {
    case: String,
    check: String,
    value: f64,
    reference: Option<f64>,
    slack: Option<f64>,
    quad_error: Option<f64>,
    passed: Option<bool>,
}

impl GeometryRow {
    fn slack(case: String, check: &str, r: &SlackReport) -> Self {
        GeometryRow {
            case,
            check: check.into(),
            value: r.lhs,
            reference: Some(r.rhs),
            slack: Some(r.slack),
            quad_error: Some(r.quad_error),
            passed: Some(r.passed),
        }
    }
}

#[derive(Debug, Serialize)]
struct BestRow {
    case: String,
    quantity: String,
    n: Option<usize>,
    eps: Option<f64>,
    value: f64,
    reference: Option<f64>,
    residual: Option<f64>,
    passed: Option<bool>,
}

impl BestRow {
    #[allow(clippy::too_many_arguments)]
    fn new(
        case: String,
        quantity: &str,
        n: Option<usize>,
        eps: Option<f64>,
        value: f64,
        reference: Option<f64>,
        residual: Option<f64>,
        passed: Option<bool>,
    ) -> Self {
        BestRow {
            case,
            quantity: quantity.into(),
            n,
            eps,
            value,
            reference,
            residual,
            passed,
        }
    }
}
