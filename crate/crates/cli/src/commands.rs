use std::fmt::Write as _;
use std::fs;

use cacomm_core::classify::{rank_vs_cc1_report, summary_table, ClassReport};
use cacomm_core::matrix::ceil_log2;
use cacomm_core::profile::CCProfile;
use cacomm_core::protocol::{
    linear_protocol, rule178_displayed_set, rule178_fooling_set, rule218_lower_bound_family,
    verify_tree, LinearProtocol, Rule178Protocol, Rule218Protocol, VerificationReport,
};
use cacomm_core::rank::rank_report;
use cacomm_core::{
    build_matrix, cc1_profile, check_simulation, classify_all, distinct_counts,
    export_matrix_image, rescale, sweep, verify_fooling_set, verify_one_round, Config,
    OneRoundProtocol, RescalingParams, RuleTable, SplitSpec,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::settings::CliError;
use crate::{Command, FoolingTarget, SimcheckArgs, VerifyArgs, VerifyTarget};

/// What a command produced, in every format it supports.
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
    /// A verification found counterexamples or a check did not hold.
    pub failed: bool,
}

impl Outcome {
    fn new(json: impl Serialize, text: String) -> Self {
        Outcome {
            json: serde_json::to_value(json).expect("serializable"),
            text,
            csv: None,
            failed: false,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn failed_if(mut self, failed: bool) -> Self {
        self.failed = failed;
        self
    }
}

pub fn execute(command: &Command, cfg: &Config) -> Result<Outcome, CliError> {
    match command {
        Command::Matrix {
            rule,
            n,
            split,
            image,
        } => matrix(rule, *n, *split, image.as_deref(), cfg),
        Command::Profile { rule, n } => {
            let p = cc1_profile(rule, *n, cfg)?;
            let text = profile_text(&p);
            let csv = csv(CCProfile::CSV_HEADER, p.csv_lines());
            Ok(Outcome::new(&p, text).with_csv(csv))
        }
        Command::Sweep { rule, n_max } => {
            let s = sweep(rule, n_max.unwrap_or(cfg.n_max), cfg)?;
            let text = s.profiles.iter().map(profile_text).collect::<String>();
            let csv = csv(
                CCProfile::CSV_HEADER,
                s.profiles.iter().flat_map(|p| p.csv_lines()),
            );
            Ok(Outcome::new(&s, text).with_csv(csv))
        }
        Command::Classify { n_max } => {
            let reports = classify_all(n_max.unwrap_or(cfg.n_max), cfg)?;
            let text = summary_table(&reports);
            let csv = csv(
                ClassReport::CSV_HEADER,
                reports.iter().flat_map(|r| r.csv_lines()),
            );
            Ok(Outcome::new(&reports, text).with_csv(csv))
        }
        Command::RankReport { rules, n_max } => {
            let report = rank_vs_cc1_report(rules, n_max.unwrap_or(cfg.n_max), cfg)?;
            let lines: Vec<String> = report
                .rows
                .iter()
                .map(|r| {
                    let ratio = r.ratio.map_or(String::new(), |q| format!("{q:.4}"));
                    format!("{},{},{},{},{}", r.rule, r.n, r.d, r.rank_lb, ratio)
                })
                .collect();
            let mut text = lines
                .iter()
                .map(|l| format!("{}\n", l.replace(',', " ")))
                .collect::<String>();
            let _ = writeln!(text, "flagged: {:?}", report.flagged);
            let _ = writeln!(text, "degenerate: {:?}", report.degenerate);
            let csv = csv("rule,n,d,rank_lb,ratio", lines);
            Ok(Outcome::new(&report, text).with_csv(csv))
        }
        Command::Verify(args) => verify(args, cfg),
        Command::Fooling { target, n } => fooling(*target, *n, cfg),
        Command::Rank { rule, n, split } => {
            let m = build_matrix(rule, SplitSpec::new(*n, *split), cfg.budget())?;
            let counts = distinct_counts(&m);
            let report = rank_report(&m, &cfg.primes, None)?;
            let mut text = format!(
                "{rule} n={n} i={split} d={} cc1={}\n",
                counts.d,
                counts.cc1()
            );
            for p in &report.per_prime {
                let _ = writeln!(
                    text,
                    "rank mod {}: {}",
                    p.prime,
                    p.rank.map_or("skipped".into(), |r| r.to_string())
                );
            }
            let _ = writeln!(text, "rank lower bound: {}", report.max);
            let json = json!({
                "rule": rule,
                "n": n,
                "i": split,
                "rows": counts.rows,
                "cols": counts.cols,
                "d": counts.d,
                "cc1": counts.cc1(),
                "rank": report,
            });
            Ok(Outcome::new(json, text))
        }
        Command::Rescale { rule, m, t, z } => {
            let p = RescalingParams::new(*m, *t, *z)?;
            let out = rescale(rule, p, cfg.budget())?;
            let json = json!({
                "rule": rule,
                "params": p,
                "states": out.states(),
                "radius": out.radius(),
                "rescaled": out,
            });
            Ok(Outcome::new(json, format!("{out}\n")))
        }
        Command::Simcheck(args) => simcheck(args, cfg),
    }
}

fn csv(header: &str, lines: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("{header}\n");
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn profile_text(p: &CCProfile) -> String {
    let d: Vec<String> = p.splits.iter().map(|s| s.d.to_string()).collect();
    format!(
        "{} n={} worst_cc1={} s_n={:?} rank_lb={} d=[{}]\n",
        p.rule,
        p.n,
        p.worst_cc1,
        p.s_n,
        p.rank_lb,
        d.join(" ")
    )
}

fn matrix(
    rule: &RuleTable,
    n: usize,
    split: usize,
    image: Option<&std::path::Path>,
    cfg: &Config,
) -> Result<Outcome, CliError> {
    let m = build_matrix(rule, SplitSpec::new(n, split), cfg.budget())?;
    let counts = distinct_counts(&m);
    if let Some(path) = image {
        let bytes = export_matrix_image(&m)?;
        fs::write(path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let text = format!(
        "{rule} n={n} i={split}: {}x{} matrix, {} distinct rows, {} distinct columns, cc1={}\n",
        m.rows(),
        m.cols(),
        counts.rows,
        counts.cols,
        counts.cc1()
    );
    let json = json!({
        "rule": rule,
        "n": n,
        "i": split,
        "matrix_rows": m.rows(),
        "matrix_cols": m.cols(),
        "rows": counts.rows,
        "cols": counts.cols,
        "d": counts.d,
        "cc1": counts.cc1(),
        "image": image.map(|p| p.display().to_string()),
    });
    Ok(Outcome::new(json, text))
}

fn verification(
    protocol: &dyn OneRoundProtocol,
    rule: &RuleTable,
    center: Option<u8>,
    cfg: &Config,
) -> Result<Outcome, CliError> {
    let v = verify_one_round(protocol, rule, center, cfg.budget())?;
    let report = VerificationReport::new(protocol, rule, &v);
    let mut text = format!(
        "{} on {} n={}: cost {}, {} inputs, {} counterexamples\n",
        report.protocol,
        report.rule,
        report.n,
        report.cost,
        report.domain_size,
        report.counterexample_count
    );
    for c in &report.first_counterexamples {
        let _ = writeln!(text, "  {c}");
    }
    Ok(Outcome::new(&report, text).failed_if(!v.holds()))
}

fn verify(args: &VerifyArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let n = args.n;
    match args.target {
        VerifyTarget::Rule178 => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let p = Rule178Protocol::new(n);
            verification(&p, &p.rule().clone(), None, cfg)
        }
        VerifyTarget::Rule218 => {
            let p = Rule218Protocol::new(n)?;
            verification(&p, &p.rule().clone(), Some(0), cfg)
        }
        VerifyTarget::Linear => {
            let p = match args.split {
                Some(i) => LinearProtocol::new(&args.rule, SplitSpec::new(n, i))?,
                None => linear_protocol(&args.rule, n)?,
            };
            verification(&p, &args.rule, None, cfg)
        }
        VerifyTarget::Tree => {
            let v = verify_tree(n, args.samples, args.seed)?;
            let text = format!(
                "tree h={}: {} instances ({}), {} counterexamples\n",
                v.height,
                v.instances,
                if v.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                },
                v.counterexample_count
            );
            let failed = v.counterexample_count > 0;
            Ok(Outcome::new(&v, text).failed_if(failed))
        }
    }
}

fn fooling(target: FoolingTarget, n: usize, cfg: &Config) -> Result<Outcome, CliError> {
    match target {
        FoolingTarget::Rule178 => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let rule = RuleTable::eca(178)?;
            let split = SplitSpec::new(n, n);
            let set = rule178_fooling_set(n);
            let verdict = verify_fooling_set(&rule, split, &set)?;
            let displayed = rule178_displayed_set(n);
            let displayed_verdict = verify_fooling_set(&rule, split, &displayed)?;
            let counts = distinct_counts(&build_matrix(&rule, split, cfg.budget())?);
            let bound_holds = counts.d >= set.len() as u64;
            let text = format!(
                "rule 178 n={n}: fooling set of size {} {}; d={} at split {n}, bound {}; \
                 displayed family of size {} {}; formula size {}\n",
                set.len(),
                if verdict.holds { "holds" } else { "fails" },
                counts.d,
                if bound_holds { "holds" } else { "fails" },
                displayed.len(),
                if displayed_verdict.holds {
                    "holds"
                } else {
                    "fails"
                },
                2 * (n / 2)
            );
            let json = json!({
                "rule": rule,
                "n": n,
                "i": n,
                "set": set,
                "verdict": verdict,
                "lower_bound_bits": ceil_log2(set.len() as u64),
                "distinct": counts,
                "bound_holds": bound_holds,
                "displayed_size": displayed.len(),
                "displayed_verdict": displayed_verdict,
                "formula_size": 2 * (n / 2),
            });
            Ok(Outcome::new(json, text).failed_if(!verdict.holds || !bound_holds))
        }
        FoolingTarget::Rule218 => {
            let family = rule218_lower_bound_family(n, cfg.budget())?;
            let text = format!(
                "rule 218 n={n}: {} Alice words in {} sets, rows {}\n",
                family.total,
                family.sets.len(),
                if family.distinct {
                    "pairwise distinct"
                } else {
                    "NOT distinct"
                }
            );
            let failed = !family.distinct;
            Ok(Outcome::new(&family, text).failed_if(failed))
        }
    }
}

fn simcheck(args: &SimcheckArgs, cfg: &Config) -> Result<Outcome, CliError> {
    let p1 = RescalingParams::new(args.m1, args.t1, args.z1)?;
    let p2 = RescalingParams::new(args.m2, args.t2, args.z2)?;
    let witness = check_simulation(&args.a, &args.b, p1, p2, cfg.budget())?;
    let params = |p: RescalingParams| format!("(m={}, t={}, z={})", p.m, p.t, p.z);
    let text = match &witness {
        Some(w) => format!(
            "{} {} embeds in {} {} via {:?}\n",
            args.a,
            params(p1),
            args.b,
            params(p2),
            w.map
        ),
        None => format!(
            "no sub-automaton witness for {} {} in {} {}\n",
            args.a,
            params(p1),
            args.b,
            params(p2)
        ),
    };
    let json = json!({
        "a": args.a,
        "b": args.b,
        "params_a": p1,
        "params_b": p2,
        "found": witness.is_some(),
        "witness": witness,
    });
    Ok(Outcome::new(json, text))
}
