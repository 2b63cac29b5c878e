use std::fmt::Write as _;

use serde::Serialize;

use tdiam::extremal::{
    markov_factor, verify_lemma1, verify_lemma3, verify_theorem, HarnessOptions, MarkovParams, TheoremFlavor,
    VerificationReport,
};
use tdiam::multiindex::enumerate;
use tdiam::setmodel::{PointCloudFile, SetDescriptor, SetModel};
use tdiam::vandermonde::{diameter_curve, fekete_bruteforce, LejaState};

use crate::args::{
    DiameterArgs, EnumerateArgs, FeketeArgs, Flavor, Format, LejaArgs, MarkovArgs, OutputArgs, VerifyLemmaArgs,
    VerifyTheoremArgs,
};
use crate::sets;
use crate::Failure;

/// A rendered artifact plus the one-line summary for the terminal.
pub struct Output {
    pub body: String,
    pub summary: String,
}

#[derive(Serialize)]
struct Artifact<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a C,
    #[serde(skip_serializing_if = "Option::is_none")]
    set: Option<&'a SetDescriptor>,
    result: R,
}

struct Emitter<'a, C: Serialize> {
    command: &'static str,
    config: &'a C,
    set: Option<&'a SetDescriptor>,
    output: &'a OutputArgs,
}

impl<'a, C: Serialize> Emitter<'a, C> {
    fn render<R: Serialize>(&self, result: R, csv: impl FnOnce(&R) -> String, summary: String) -> Result<Output, Failure> {
        let body = match self.output.resolved_format() {
            Format::Json => {
                let artifact = Artifact {
                    tool: env!("CARGO_BIN_NAME"),
                    version: env!("CARGO_PKG_VERSION"),
                    command: self.command,
                    config: self.config,
                    set: self.set,
                    result,
                };
                let mut s = serde_json::to_string_pretty(&artifact).map_err(|e| Failure::Domain(e.to_string()))?;
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::new();
                writeln!(s, "# {} {} {}", env!("CARGO_BIN_NAME"), env!("CARGO_PKG_VERSION"), self.command).unwrap();
                writeln!(s, "# config {}", json_line(self.config)?).unwrap();
                if let Some(set) = self.set {
                    writeln!(s, "# set {}", json_line(set)?).unwrap();
                }
                s.push_str(&csv(&result));
                s
            }
        };
        Ok(Output { body, summary })
    }
}

fn json_line<T: Serialize + ?Sized>(value: &T) -> Result<String, Failure> {
    serde_json::to_string(value).map_err(|e| Failure::Domain(e.to_string()))
}

fn pair(z: tdiam::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

// ─── enumerate ────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct IndexRow {
    index: usize,
    exponents: Vec<u32>,
    length: u64,
}

pub fn run_enumerate(args: &EnumerateArgs) -> Result<Output, Failure> {
    if args.n == 0 || args.count == 0 {
        return Err(Failure::Usage("--n and --count must be at least 1".into()));
    }
    let rows: Vec<IndexRow> = enumerate(args.n, args.count)?
        .into_iter()
        .enumerate()
        .map(|(index, a)| IndexRow {
            index,
            length: a.length(),
            exponents: a.exponents().to_vec(),
        })
        .collect();
    let last = rows.last().map(|r| format!("{:?}", r.exponents)).unwrap_or_default();
    let summary = format!("enumerate: n={}, {} indices, last {last}", args.n, rows.len());
    let emitter = Emitter {
        command: "enumerate",
        config: args,
        set: None,
        output: &args.output,
    };
    let n = args.n;
    emitter.render(
        rows,
        |rows| {
            let mut s = String::from("index,length");
            for t in 1..=n {
                write!(s, ",e{t}").unwrap();
            }
            s.push('\n');
            for r in rows {
                write!(s, "{},{}", r.index, r.length).unwrap();
                for e in &r.exponents {
                    write!(s, ",{e}").unwrap();
                }
                s.push('\n');
            }
            s
        },
        summary,
    )
}

// ─── leja ─────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct LejaRow {
    step: usize,
    index: usize,
    point: Vec<[f64; 2]>,
    log_increment: f64,
    log_vdm: f64,
}

#[derive(Serialize)]
struct LejaResult {
    count: usize,
    log_vdm: f64,
    recomputed_log_vdm: f64,
    steps: Vec<LejaRow>,
    configuration: PointCloudFile,
}

pub fn run_leja(args: &LejaArgs) -> Result<Output, Failure> {
    let set = sets::build(&args.set)?;
    if args.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let mut state = LejaState::new(&set)?;
    state.extend_to(args.count)?;
    let mut running = 0.0;
    let steps: Vec<LejaRow> = state
        .chosen()
        .iter()
        .zip(state.log_increments())
        .enumerate()
        .map(|(step, (&index, &g))| {
            running += g;
            LejaRow {
                step,
                index,
                point: set.point(index).iter().map(|&z| pair(z)).collect(),
                log_increment: g,
                log_vdm: running,
            }
        })
        .collect();
    let result = LejaResult {
        count: state.len(),
        log_vdm: state.log_vdm(),
        recomputed_log_vdm: state.recompute()?.log_mag,
        steps,
        configuration: state.configuration()?.to_point_cloud(),
    };
    let summary = format!(
        "leja: {} points, log|VDM| = {:.12} (recomputed {:.12})",
        result.count, result.log_vdm, result.recomputed_log_vdm
    );
    let n = set.dim();
    Emitter {
        command: "leja",
        config: args,
        set: Some(set.descriptor()),
        output: &args.output,
    }
    .render(
        result,
        |r| {
            let mut s = String::from("step,index,log_increment,log_vdm");
            for t in 1..=n {
                write!(s, ",re{t},im{t}").unwrap();
            }
            s.push('\n');
            for row in &r.steps {
                write!(s, "{},{},{},{}", row.step, row.index, row.log_increment, row.log_vdm).unwrap();
                for [re, im] in &row.point {
                    write!(s, ",{re},{im}").unwrap();
                }
                s.push('\n');
            }
            s
        },
        summary,
    )
}

// ─── diameter ─────────────────────────────────────────────────────────────

pub fn run_diameter(args: &DiameterArgs) -> Result<Output, Failure> {
    let set = sets::build(&args.set)?;
    let curve = diameter_curve(&set, args.dmax)?;
    let summary = match curve.last_delta() {
        Some(delta) => format!("diameter: d_max={}, delta_{} = {delta:.12}", args.dmax, args.dmax),
        None => format!("diameter: d_max={}, no delta (l_d = 0)", args.dmax),
    };
    Emitter {
        command: "diameter",
        config: args,
        set: Some(set.descriptor()),
        output: &args.output,
    }
    .render(&curve, |c| c.to_csv(), summary)
}

// ─── markov ───────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct FactorRow {
    d: usize,
    /// 1-based.
    coordinate: usize,
    lower: f64,
    upper: f64,
    m_hat: f64,
    real_mode: bool,
    phase_count: usize,
}

#[derive(Serialize)]
struct MarkovResult {
    params: MarkovParams,
    cloud_restricted: bool,
    rows: Vec<FactorRow>,
}

fn parse_range(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("--drange expects `lo..hi`, got `{text}`"));
    let (lo, hi) = text.split_once("..").or_else(|| text.split_once(':')).ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

pub fn run_markov(args: &MarkovArgs) -> Result<Output, Failure> {
    let set = sets::build(&args.set)?;
    let degrees: Vec<usize> = match &args.drange {
        Some(text) => parse_range(text)?,
        None => (1..=args.dmax).collect(),
    };
    let degrees: Vec<usize> = degrees.into_iter().filter(|&d| d > 0).collect();
    if degrees.is_empty() {
        return Err(Failure::Usage("degree range must contain a degree ≥ 1".into()));
    }
    let coords: Vec<usize> = match args.coord {
        Some(c) if c >= 1 && c <= set.dim() => vec![c - 1],
        Some(c) => {
            return Err(Failure::Usage(format!(
                "--coord {c} outside 1..={} for this set",
                set.dim()
            )))
        }
        None => (0..set.dim()).collect(),
    };
    let mut rows = Vec::new();
    for &d in &degrees {
        for &m in &coords {
            let f = markov_factor(&set, d, m, args.phases)?;
            rows.push(FactorRow {
                d,
                coordinate: m + 1,
                lower: f.lower,
                upper: f.upper,
                m_hat: f.upper / (d as f64).powf(args.r),
                real_mode: f.real_mode,
                phase_count: f.phase_count,
            });
        }
    }
    let constant = rows.iter().map(|r| r.m_hat).fold(0.0, f64::max);
    let params = MarkovParams::new(constant, args.r)?;
    let summary = format!(
        "markov: M_hat = {constant:.6} with r = {} over d in {}..={} (cloud-restricted)",
        args.r,
        degrees[0],
        degrees[degrees.len() - 1]
    );
    let result = MarkovResult {
        params,
        cloud_restricted: true,
        rows,
    };
    Emitter {
        command: "markov",
        config: args,
        set: Some(set.descriptor()),
        output: &args.output,
    }
    .render(
        result,
        |r| {
            let mut s = String::from("d,coordinate,lower,upper,m_hat\n");
            for row in &r.rows {
                writeln!(s, "{},{},{},{},{}", row.d, row.coordinate, row.lower, row.upper, row.m_hat).unwrap();
            }
            s
        },
        summary,
    )
}

// ─── verification ─────────────────────────────────────────────────────────

fn report_csv(r: &VerificationReport) -> String {
    let mut s = String::new();
    if !r.samples.is_empty() {
        s.push_str("trial,index,degree,lhs,sup_norm,log_rhs,margin\n");
        for t in &r.samples {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                t.trial, t.index, t.degree, t.lhs, t.sup_norm, t.log_rhs, t.margin
            )
            .unwrap();
        }
    } else {
        s.push_str("d,l_d,log_vdm,log_vdm_bound,delta_d,delta_bound,margin\n");
        for c in &r.degrees {
            let delta = c.delta_d.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                c.d, c.l_d, c.log_vdm, c.log_vdm_bound, delta, c.delta_bound, c.margin
            )
            .unwrap();
        }
    }
    s
}

fn report_summary(label: &str, r: &VerificationReport) -> String {
    let worst = r.worst_margin.map(|m| format!("{m:.3e}")).unwrap_or_else(|| "n/a".into());
    format!("{label}: {} checks, {} violations, worst log margin {worst}", r.trials, r.violations)
}

pub fn run_verify_lemma(args: &VerifyLemmaArgs) -> Result<Output, Failure> {
    let set = sets::build(&args.set)?;
    let params = MarkovParams::new(args.m, args.r)?;
    let opts = HarnessOptions {
        trials: args.trials,
        degree_cap: args.degree_cap,
        seed: args.seed,
    };
    let report = if args.lemma == 3 {
        verify_lemma3(&set, params, opts)?
    } else {
        verify_lemma1(&set, params, opts)?
    };
    let summary = report_summary(&format!("verify-lemma{}", args.lemma), &report);
    Emitter {
        command: "verify-lemma",
        config: args,
        set: Some(set.descriptor()),
        output: &args.output,
    }
    .render(&report, |r| report_csv(r), summary)
}

pub fn run_verify_theorem(args: &VerifyTheoremArgs) -> Result<Output, Failure> {
    let set = sets::build(&args.set)?;
    let params = MarkovParams::bernstein(args.m)?;
    let curve = diameter_curve(&set, args.dmax)?;
    let flavor = match args.flavor {
        Flavor::General => TheoremFlavor::General,
        Flavor::Product => TheoremFlavor::Product,
    };
    let report = verify_theorem(&set, params, flavor, &curve)?;
    let summary = report_summary("verify-theorem", &report);
    Emitter {
        command: "verify-theorem",
        config: args,
        set: Some(set.descriptor()),
        output: &args.output,
    }
    .render(&report, |r| report_csv(r), summary)
}

// ─── fekete-oracle ────────────────────────────────────────────────────────

#[derive(Serialize)]
struct FeketeResult {
    k: usize,
    indices: Vec<usize>,
    log_mag: f64,
    magnitude: f64,
    points: Vec<Vec<[f64; 2]>>,
}

pub fn run_fekete(args: &FeketeArgs) -> Result<Output, Failure> {
    let set: SetModel = sets::build(&args.set)?;
    if args.k == 0 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let best = fekete_bruteforce(&set, args.k, args.budget)?;
    let result = FeketeResult {
        k: args.k,
        points: best
            .indices
            .iter()
            .map(|&i| set.point(i).iter().map(|&z| pair(z)).collect())
            .collect(),
        indices: best.indices,
        log_mag: best.value.log_mag,
        magnitude: best.value.magnitude(),
    };
    let summary = format!(
        "fekete-oracle: k={}, |VDM| = {:.12} at {:?}",
        result.k, result.magnitude, result.indices
    );
    let n = set.dim();
    Emitter {
        command: "fekete-oracle",
        config: args,
        set: Some(set.descriptor()),
        output: &args.output,
    }
    .render(
        result,
        |r| {
            let mut s = String::from("index");
            for t in 1..=n {
                write!(s, ",re{t},im{t}").unwrap();
            }
            s.push('\n');
            for (i, p) in r.indices.iter().zip(&r.points) {
                write!(s, "{i}").unwrap();
                for [re, im] in p {
                    write!(s, ",{re},{im}").unwrap();
                }
                s.push('\n');
            }
            s
        },
        summary,
    )
}
