//! Sweeps over `n` and growth classification of the 88 elementary classes.
//!
//! The classes name the growth of the worst-split `d` (so `⌈log₂ d⌉` is the
//! one-round complexity): bounded `d` means constant complexity, linear `d`
//! means `log n + O(1)`, and so on. Labels are empirical: they describe the
//! measured range only.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Config, GrowthThresholds};
use crate::error::{Error, Result};
use crate::iterated::IterTable;
use crate::profile::{profile_from_table, CCProfile};
use crate::rule::{canonical_codes, orbit, RuleTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    /// Every `n` up to `n_max` was computed.
    Completed,
    /// `n` did not fit the memory budget; profiles stop at `n - 1`.
    Budget { n: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub rule: RuleTable,
    pub n_max: usize,
    /// Profiles for `n = 1, 2, …`.
    pub profiles: Vec<CCProfile>,
    pub stop: StopReason,
}

impl Sweep {
    /// Worst-split `d` for each computed `n`.
    pub fn worst_d(&self) -> Vec<u64> {
        self.profiles.iter().map(CCProfile::worst_d).collect()
    }

    pub fn last_n(&self) -> usize {
        self.profiles.len()
    }
}

/// Profiles for `n = 1..=n_max`, each table built from the previous one.
/// Running out of budget ends the sweep and is recorded in `stop`.
pub fn sweep(rule: &RuleTable, n_max: usize, cfg: &Config) -> Result<Sweep> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    let budget = cfg.budget();
    let mut profiles = Vec::with_capacity(n_max);
    let mut stop = StopReason::Completed;
    let mut table: Option<IterTable> = None;
    for n in 1..=n_max {
        let step = match &table {
            None => IterTable::build(rule, 1, budget),
            Some(prev) => prev.next(rule, budget),
        }
        .and_then(|t| profile_from_table(rule, &t, cfg).map(|p| (t, p)));
        match step {
            Ok((t, p)) => {
                profiles.push(p);
                table = Some(t);
            }
            Err(e) if e.is_resource() => {
                stop = StopReason::Budget {
                    n,
                    message: e.to_string(),
                };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Sweep {
        rule: rule.clone(),
        n_max,
        profiles,
        stop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthLabel {
    Bounded,
    Linear,
    Quadratic,
    Superquadratic,
    NonPolynomial,
    Undetermined,
}

impl GrowthLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthLabel::Bounded => "bounded",
            GrowthLabel::Linear => "linear",
            GrowthLabel::Quadratic => "quadratic",
            GrowthLabel::Superquadratic => "superquadratic",
            GrowthLabel::NonPolynomial => "non-polynomial",
            GrowthLabel::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthClass {
    pub label: GrowthLabel,
    /// Slope of `log d` against `log n` over the trailing half.
    pub exponent: Option<f64>,
    /// Root-mean-square residual of that fit.
    pub residual: Option<f64>,
    pub r_squared: Option<f64>,
    /// Root-mean-square residual of `log d` against `n`.
    pub exp_residual: Option<f64>,
    /// Length of the trailing run of equal values.
    pub plateau: usize,
    pub reason: Option<String>,
}

struct Fit {
    slope: f64,
    rms: f64,
    r_squared: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Fit {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    Fit {
        slope,
        rms: (sse / k).sqrt(),
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
    }
}

/// Classifies the worst-split `d` sequence `d[k]` measured at `n = k+1`.
pub fn classify_growth(d: &[u64], th: &GrowthThresholds) -> GrowthClass {
    let plateau = d.last().map_or(0, |&last| {
        d.iter().rev().take_while(|&&v| v == last).count()
    });
    let mut class = GrowthClass {
        label: GrowthLabel::Undetermined,
        exponent: None,
        residual: None,
        r_squared: None,
        exp_residual: None,
        plateau,
        reason: None,
    };
    if d.len() < th.min_points {
        class.reason = Some(format!(
            "{} points, at least {} needed",
            d.len(),
            th.min_points
        ));
        return class;
    }
    if plateau >= th.plateau {
        class.label = GrowthLabel::Bounded;
        return class;
    }
    let start = d.len() / 2;
    let ns: Vec<f64> = (start + 1..=d.len()).map(|n| n as f64).collect();
    let log_d: Vec<f64> = d[start..].iter().map(|&v| (v.max(1) as f64).ln()).collect();
    let log_n: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let power = least_squares(&log_n, &log_d);
    let expo = least_squares(&ns, &log_d);
    class.exponent = Some(power.slope);
    class.residual = Some(power.rms);
    class.r_squared = Some(power.r_squared);
    class.exp_residual = Some(expo.rms);
    let tol = th.exponent_tolerance;
    class.label = if (power.slope - 1.0).abs() <= tol {
        GrowthLabel::Linear
    } else if (power.slope - 2.0).abs() <= tol {
        GrowthLabel::Quadratic
    } else if power.slope > th.superquadratic_exponent && power.r_squared >= th.min_r_squared {
        GrowthLabel::Superquadratic
    } else if expo.rms < power.rms {
        GrowthLabel::NonPolynomial
    } else {
        class.reason = Some(format!("exponent {:.3} matches no class", power.slope));
        GrowthLabel::Undetermined
    };
    class
}

/// Rules whose class is established by proof, with that class.
pub fn proven_class(code: u32) -> Option<GrowthLabel> {
    const BOUNDED: [u32; 44] = [
        0, 1, 2, 3, 4, 5, 7, 8, 10, 12, 13, 15, 19, 24, 27, 28, 29, 32, 34, 36, 38, 42, 46, 51, 60,
        72, 76, 78, 90, 105, 108, 128, 130, 136, 138, 140, 150, 156, 160, 162, 170, 172, 200, 204,
    ];
    if BOUNDED.contains(&code) {
        Some(GrowthLabel::Bounded)
    } else if code == 178 || code == 50 {
        Some(GrowthLabel::Linear)
    } else if code == 218 {
        Some(GrowthLabel::Quadratic)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub canonical: u32,
    /// Orbit under reflex and conjugation, ascending.
    pub members: Vec<u32>,
    /// Largest `n` reached; the label is empirical up to it.
    pub empirical_at_n_max: usize,
    pub worst_d: Vec<u64>,
    pub worst_cc1: Vec<u32>,
    pub s_n: Vec<Vec<usize>>,
    pub rank_lb: Vec<u64>,
    pub growth: GrowthClass,
    /// Class established by proof for some orbit member, if any.
    pub proven_class: Option<GrowthLabel>,
    /// The measured label agrees with `proven_class`.
    pub paper_confirmed: bool,
    /// Every orbit member produced the same worst-`d` sequence.
    pub orbit_consistent: bool,
    pub stop: StopReason,
}

impl ClassReport {
    pub const CSV_HEADER: &'static str = "canonical,members,n,d,cc1,rank_lb,class,paper_confirmed";

    pub fn csv_lines(&self) -> Vec<String> {
        let members = self
            .members
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(";");
        (0..self.worst_d.len())
            .map(|k| {
                format!(
                    "{},{},{},{},{},{},{},{}",
                    self.canonical,
                    members,
                    k + 1,
                    self.worst_d[k],
                    self.worst_cc1[k],
                    self.rank_lb[k],
                    self.growth.label.as_str(),
                    self.paper_confirmed
                )
            })
            .collect()
    }
}

/// Sweeps one orbit and classifies it.
pub fn classify_orbit(canonical: u32, n_max: usize, cfg: &Config) -> Result<ClassReport> {
    let members = orbit(canonical)?;
    let main = sweep(&RuleTable::eca(canonical)?, n_max, cfg)?;
    let d = main.worst_d();
    let mut orbit_consistent = true;
    for &m in members.iter().filter(|&&m| m != canonical) {
        let other = sweep(&RuleTable::eca(m)?, n_max, cfg)?;
        orbit_consistent &= other.worst_d() == d;
    }
    let growth = classify_growth(&d, &cfg.growth);
    let proven = members.iter().find_map(|&m| proven_class(m));
    Ok(ClassReport {
        canonical,
        empirical_at_n_max: main.last_n(),
        worst_cc1: main.profiles.iter().map(|p| p.worst_cc1).collect(),
        s_n: main.profiles.iter().map(|p| p.s_n.clone()).collect(),
        rank_lb: main.profiles.iter().map(|p| p.rank_lb).collect(),
        worst_d: d,
        paper_confirmed: proven == Some(growth.label),
        proven_class: proven,
        growth,
        members,
        orbit_consistent,
        stop: main.stop,
    })
}

/// One report per canonical elementary rule, in ascending canonical order.
pub fn classify_all(n_max: usize, cfg: &Config) -> Result<Vec<ClassReport>> {
    canonical_codes()
        .into_par_iter()
        .map(|c| classify_orbit(c, n_max, cfg))
        .collect()
}

/// Fixed-width summary table.
pub fn summary_table(reports: &[ClassReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>9}  {:<16}  {:<15}  {:>8}  {:>6}  {:<15}  worst d",
        "canonical", "members", "class", "exponent", "n_max", "proven"
    );
    for r in reports {
        let members = r
            .members
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let exponent = r
            .growth
            .exponent
            .map_or("-".to_string(), |e| format!("{e:.3}"));
        let proven = match r.proven_class {
            Some(p) if r.paper_confirmed => format!("{} (agrees)", p.as_str()),
            Some(p) => format!("{} (DIFFERS)", p.as_str()),
            None => "-".to_string(),
        };
        let d = r
            .worst_d
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            "{:>9}  {:<16}  {:<15}  {:>8}  {:>6}  {:<15}  {}",
            r.canonical,
            members,
            r.growth.label.as_str(),
            exponent,
            r.empirical_at_n_max,
            proven,
            d
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rule: u32,
    pub n: usize,
    pub d: u64,
    pub rank_lb: u64,
    /// `log₂ rank / log₂ d`; absent when `d = 1`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVsCc1Report {
    pub rows: Vec<RankRow>,
    /// Rules whose ratio is below 1/2 at the two largest `n`.
    pub flagged: Vec<u32>,
    /// Rules with `d = 1` at the largest `n`, for which the ratio is undefined.
    pub degenerate: Vec<u32>,
}

/// Rank bound against one-round complexity on the worst split of each `n`.
pub fn rank_vs_cc1_report(rules: &[u32], n_max: usize, cfg: &Config) -> Result<RankVsCc1Report> {
    let sweeps: Vec<Sweep> = rules
        .par_iter()
        .map(|&c| sweep(&RuleTable::eca(c)?, n_max, cfg))
        .collect::<Result<_>>()?;
    let mut report = RankVsCc1Report {
        rows: Vec::new(),
        flagged: Vec::new(),
        degenerate: Vec::new(),
    };
    for (&code, s) in rules.iter().zip(&sweeps) {
        let rows: Vec<RankRow> = s
            .profiles
            .iter()
            .map(|p| {
                let d = p.worst_d();
                RankRow {
                    rule: code,
                    n: p.n,
                    d,
                    rank_lb: p.rank_lb,
                    ratio: (d > 1).then(|| (p.rank_lb.max(1) as f64).log2() / (d as f64).log2()),
                }
            })
            .collect();
        if rows.last().is_some_and(|r| r.d == 1) {
            report.degenerate.push(code);
        } else if rows.len() >= 2
            && rows[rows.len() - 2..]
                .iter()
                .all(|r| r.ratio.is_some_and(|q| q < 0.5))
        {
            report.flagged.push(code);
        }
        report.rows.extend(rows);
    }
    Ok(report)
}
