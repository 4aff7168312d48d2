//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria in `KNOWN_RED` are expected to fail; the run fails when the set
//! of failing criteria differs from it in either direction.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use cacomm_core::classify::ClassReport;
use cacomm_core::matrix::ceil_log2;
use cacomm_core::pnm::parse_plain;
use cacomm_core::profile::split_counts;
use cacomm_core::protocol::{
    linear_protocol, rule178_displayed_set, rule178_fooling_set, rule218_lower_bound_family,
    tree_matrix, verify_tree, Rule178Protocol, Rule218Protocol,
};
use cacomm_core::rescale::{pack, rescale};
use cacomm_core::rule::{canonical_codes, orbit};
use cacomm_core::{
    build_matrix, cc1_profile, distinct_counts, partition_number_exact, rank_lower_bound, sweep,
    verify_fooling_set, verify_one_round, Budget, Config, IterTable, OneRoundProtocol,
    RescalingParams, RuleTable, SplitSpec, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 6: six listed rules oscillate or grow slowly up to n = 12.
/// Criterion 9: the partition-number inequality compares against `cc1`,
/// which leaves out the receiver's answer bit.
/// Criterion 10: for rule 170 some packed splits leave one output cell to
/// Alice and the other to Bob; each has d = 1 but the pair has d = 2.
/// Criterion 11: the distinct-row counts of the tree matrices are 2, 6, 8, 70.
const KNOWN_RED: [u32; 4] = [6, 9, 10, 11];

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn eca(code: u32) -> RuleTable {
    RuleTable::eca(code).unwrap()
}

fn cacomm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cacomm"))
        .args(args)
        .env_remove("CACOMM_CONFIG")
        .output()
        .expect("binary runs")
}

fn matrix_178() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.pbm");
    let out = cacomm(&[
        "matrix",
        "eca:178",
        "--n",
        "6",
        "--split",
        "6",
        "--image",
        path.to_str().unwrap(),
    ]);
    if !out.status.success() {
        return outcome(false, format!("exit {:?}", out.status.code()));
    }
    let image = parse_plain(&std::fs::read(&path).unwrap()).unwrap();
    let rule = eca(178);
    let mut mismatches = 0;
    for r in 0..image.height {
        let alice = Word::from_index(r as u64, 6, 2);
        for c in 0..image.width {
            let bob = Word::from_index(c as u64, 7, 2);
            let expected = u32::from(rule.iterate(6, &alice.concat(&bob)).unwrap());
            mismatches += usize::from(image.samples[r * image.width + c] != expected);
        }
    }
    let shape = (image.height, image.width) == (64, 128);
    outcome(
        shape && mismatches == 0,
        format!(
            "{}x{} bitmap, {} entries checked, {mismatches} mismatches",
            image.height,
            image.width,
            image.samples.len()
        ),
    )
}

fn protocol_178() -> Outcome {
    let mut bad = Vec::new();
    let mut max_cost = 0;
    for n in 1..=12 {
        let p = Rule178Protocol::new(n);
        let v = verify_one_round(&p, p.rule(), None, Budget::default()).unwrap();
        let bound = ceil_log2(n as u64 + 2) + 1;
        max_cost = max_cost.max(p.cost());
        if !v.holds() || p.cost() > bound {
            bad.push(format!(
                "n={n}: {} counterexamples, cost {} > {bound}?",
                v.counterexample_count,
                p.cost()
            ));
        }
    }
    outcome(
        bad.is_empty(),
        format!("n=1..12 exhaustive, max cost {max_cost}; {bad:?}"),
    )
}

fn fooling_178() -> Outcome {
    let rule = eca(178);
    let cfg = Config::default();
    let mut bad = Vec::new();
    let mut ratios = Vec::new();
    let mut displayed_failures = 0;
    for n in 1..=12 {
        let split = SplitSpec::new(n, n);
        let set = rule178_fooling_set(n);
        let verdict = verify_fooling_set(&rule, split, &set).unwrap();
        let d_split = distinct_counts(&build_matrix(&rule, split, Budget::default()).unwrap()).d;
        let worst = cc1_profile(&rule, n, &cfg).unwrap().worst_d();
        let size = set.len() as u64;
        if !verdict.holds || d_split < size || worst < size {
            bad.push(format!(
                "n={n}: holds={} d={d_split} worst={worst} |C|={size}",
                verdict.holds
            ));
        }
        if n >= 6 {
            let ratio = worst as f64 / n as f64;
            if !(0.5..=8.0).contains(&ratio) {
                bad.push(format!("n={n}: d/n = {ratio:.2}"));
            }
            ratios.push(format!("{ratio:.2}"));
        }
        let displayed = rule178_displayed_set(n);
        displayed_failures +=
            usize::from(!verify_fooling_set(&rule, split, &displayed).unwrap().holds);
    }
    outcome(
        bad.is_empty(),
        format!(
            "set of size ceil(n/2) holds for n=1..12, d/n for n=6..12: [{}]; \
             displayed family of size 2*ceil(n/2) fails for {displayed_failures}/12 n; {bad:?}",
            ratios.join(", ")
        ),
    )
}

fn protocol_218() -> Outcome {
    let mut bad = Vec::new();
    let mut archived = Vec::new();
    for n in 2..=10 {
        let p = Rule218Protocol::new(n).unwrap();
        let v = verify_one_round(&p, p.rule(), Some(0), Budget::default()).unwrap();
        let expected_cost = 2 * ceil_log2(n as u64 + 1) + 1;
        if p.cost() != expected_cost {
            bad.push(format!("n={n}: cost {} != {expected_cost}", p.cost()));
        }
        if !v.holds() {
            bad.push(format!("n={n}: {} counterexamples", v.counterexample_count));
            archived.extend(v.counterexamples.iter().take(4).map(|c| {
                format!(
                    "n={n} {}|{} expected {} got {}",
                    c.alice, c.bob, c.expected, c.got
                )
            }));
        }
    }
    outcome(
        bad.is_empty(),
        format!("center 0, n=2..10 exhaustive; {bad:?} {archived:?}"),
    )
}

fn family_218() -> Outcome {
    let mut bad = Vec::new();
    let mut totals = Vec::new();
    for n in 3..=12 {
        let f = rule218_lower_bound_family(n, Budget::default()).unwrap();
        totals.push(f.total);
        if !f.distinct || (n >= 8 && (f.total * 32) < n * n) {
            bad.push(format!("n={n}: distinct={} total={}", f.distinct, f.total));
        }
    }
    outcome(
        bad.is_empty(),
        format!("totals for n=3..12: {totals:?}; {bad:?}"),
    )
}

fn bounded_44(reports: &[ClassReport]) -> Outcome {
    let listed: Vec<u32> = (0..256)
        .filter(|&c| {
            cacomm_core::classify::proven_class(c) == Some(cacomm_core::GrowthLabel::Bounded)
        })
        .collect();
    let mut misses = Vec::new();
    for &code in &listed {
        let Some(r) = reports.iter().find(|r| r.members.contains(&code)) else {
            misses.push(format!("{code} (no classification)"));
            continue;
        };
        if r.growth.label != cacomm_core::GrowthLabel::Bounded || !r.orbit_consistent {
            let d: Vec<String> = r.worst_d.iter().map(u64::to_string).collect();
            misses.push(format!(
                "{code} ({}: {})",
                r.growth.label.as_str(),
                d.join(" ")
            ));
        }
    }
    outcome(
        listed.len() == 44 && misses.is_empty(),
        format!(
            "{}/{} listed rules bounded at n_max=12; misses: {misses:?}",
            listed.len() - misses.len(),
            listed.len()
        ),
    )
}

fn symmetry() -> Outcome {
    let cfg = Config::default();
    let cc: Vec<Vec<u32>> = (0..256)
        .map(|c| {
            sweep(&eca(c), 7, &cfg)
                .unwrap()
                .profiles
                .iter()
                .map(|p| p.worst_cc1)
                .collect()
        })
        .collect();
    let mut inconsistent = Vec::new();
    let mut covered = vec![false; 256];
    let canon = canonical_codes();
    for &c in &canon {
        for m in orbit(c).unwrap() {
            covered[m as usize] = true;
            if cc[m as usize] != cc[c as usize] {
                inconsistent.push(m);
            }
        }
    }
    let all_covered = covered.iter().all(|&b| b);
    outcome(
        inconsistent.is_empty() && canon.len() == 88 && all_covered,
        format!(
            "{} canonical classes covering all 256 rules: {all_covered}; inconsistent: {inconsistent:?}",
            canon.len()
        ),
    )
}

fn linear_rules() -> Outcome {
    let detected: Vec<u32> = (0..256)
        .filter(|&c| eca(c).detect_linearity().unwrap().is_linear_or_affine())
        .collect();
    let required = [0, 60, 90, 102, 105, 150, 170, 204, 240];
    let missing: Vec<u32> = required
        .iter()
        .copied()
        .filter(|c| !detected.contains(c))
        .collect();
    let mut bad = Vec::new();
    for &code in &detected {
        let rule = eca(code);
        for n in 1..=12 {
            let p = linear_protocol(&rule, n).unwrap();
            let v = verify_one_round(&p, &rule, None, Budget::default()).unwrap();
            if !v.holds() || p.cost() != 1 {
                bad.push(format!("{code} n={n}"));
            }
        }
    }
    outcome(
        missing.is_empty() && bad.is_empty(),
        format!(
            "{} rules detected {detected:?}, n=1..12; missing {missing:?}; failures {bad:?}",
            detected.len()
        ),
    )
}

fn rank_sandwich() -> Outcome {
    let mut rank_violations = 0;
    let mut matrices = 0;
    let mut tiny = 0;
    let mut literal = 0;
    let mut with_answer_bit = 0;
    let mut cp_below_rank = 0;
    for code in canonical_codes() {
        let rule = eca(code);
        for n in 1..=8 {
            let table = IterTable::build(&rule, n, Budget::default()).unwrap();
            for (i, counts) in split_counts(&table).iter().enumerate() {
                let m = build_matrix(&rule, SplitSpec::new(n, i), Budget::default()).unwrap();
                let rank = rank_lower_bound(&m, &PRIMES).unwrap();
                matrices += 1;
                rank_violations += usize::from(rank > counts.rows || rank > counts.cols);
                if m.rows() * m.cols() <= 64 {
                    tiny += 1;
                    let cp = u64::from(partition_number_exact(&m).unwrap());
                    literal += usize::from(ceil_log2(cp) > counts.cc1());
                    with_answer_bit += usize::from(ceil_log2(cp) > counts.cc1() + 1);
                    cp_below_rank += usize::from(cp < rank);
                }
            }
        }
    }
    outcome(
        rank_violations == 0 && literal == 0 && cp_below_rank == 0,
        format!(
            "rank <= distinct rows/cols: {rank_violations} violations in {matrices} matrices; \
             on {tiny} tiny matrices CP >= rank: {cp_below_rank} violations, \
             ceil(log2 CP) <= cc1: {literal} violations, <= cc1 + 1: {with_answer_bit} violations"
        ),
    )
}

/// Steps the whole word `t` times, then reads the shifted center blocks.
fn blocked_oracle(rule: &RuleTable, p: RescalingParams, cells: &Word) -> Word {
    let mut w = cells.clone();
    for _ in 0..p.t {
        w = rule.step_word(&w).unwrap();
    }
    let big_r = p.radius(rule);
    let blocks = cells.len() / p.m - 2 * big_r;
    let reach = (rule.radius() * p.t) as i64;
    let out: Vec<u8> = (0..blocks * p.m)
        .map(|k| w.symbols()[((big_r * p.m + k) as i64 + p.z - reach) as usize])
        .collect();
    pack(&Word::new(out), p.m, rule.states()).unwrap()
}

fn rescaling() -> Outcome {
    let identity_bad: Vec<u32> = (0..256)
        .filter(|&c| {
            rescale(&eca(c), RescalingParams::identity(), Budget::default()).unwrap() != eca(c)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut blocked_bad = Vec::new();
    let mut combos = 0;
    for code in [90, 110, 178] {
        let rule = eca(code);
        for m in 1..=2 {
            for t in 1..=2 {
                for z in -1..=1 {
                    combos += 1;
                    let p = RescalingParams::new(m, t, z).unwrap();
                    let packed = rescale(&rule, p, Budget::default()).unwrap();
                    let failures = (0..10_000)
                        .filter(|_| {
                            let blocks = 2 * p.radius(&rule) + rng.gen_range(1..6);
                            let cells =
                                Word::new((0..blocks * m).map(|_| rng.gen_range(0..2)).collect());
                            packed.step_word(&pack(&cells, m, 2).unwrap()).unwrap()
                                != blocked_oracle(&rule, p, &cells)
                        })
                        .count();
                    if failures > 0 {
                        blocked_bad.push(format!("{code} {p:?}: {failures}"));
                    }
                }
            }
        }
    }

    // Split i of the packed rule h = <f>_{2,1,0} gives Alice 2i cells; the two
    // output cells of h^n are f^n at cell splits 2i-n and 2i-n-1.
    let mut packing_bad = Vec::new();
    let mut cells_bad = Vec::new();
    let mut checked = 0;
    for code in [90, 170, 178] {
        let rule = eca(code);
        let h = rescale(
            &rule,
            RescalingParams::new(2, 1, 0).unwrap(),
            Budget::default(),
        )
        .unwrap();
        for n in 1..=6 {
            let packed = split_counts(&IterTable::build(&h, n, Budget::default()).unwrap());
            let orig = split_counts(&IterTable::build(&rule, n, Budget::default()).unwrap());
            let w = (2 * n + 1) as i64;
            for (i, hc) in packed.iter().enumerate() {
                checked += 1;
                let i0 = (2 * i as i64 - n as i64).clamp(0, w) as usize;
                let i1 = (2 * i as i64 - n as i64 - 1).clamp(0, w) as usize;
                let (a, b) = (orig[i0], orig[i1]);
                if hc.rows > a.rows * b.rows || hc.cols > a.cols * b.cols {
                    cells_bad.push(format!("{code} n={n} i={i}"));
                }
                let bound = a.d.max(b.d).pow(2);
                if hc.d > bound {
                    packing_bad.push(format!("{code} n={n} i={i}: {} > {bound}", hc.d));
                }
            }
        }
    }
    outcome(
        identity_bad.is_empty()
            && blocked_bad.is_empty()
            && cells_bad.is_empty()
            && packing_bad.is_empty(),
        format!(
            "identity: {} mismatches of 256; blocked evaluation: {combos} combos x 10^4 words, \
             failures {blocked_bad:?}; packing bound on {checked} splits: {packing_bad:?}, \
             row/col products {cells_bad:?}",
            identity_bad.len()
        ),
    )
}

fn tree_separation() -> Outcome {
    let mut transcript_bad = Vec::new();
    let mut coverage = Vec::new();
    for h in 1..=4 {
        let v = verify_tree(h, 10_000, 7).unwrap();
        coverage.push(format!(
            "h={h} {} {}",
            v.instances,
            if v.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            }
        ));
        if v.counterexample_count > 0 {
            transcript_bad.push(h);
        }
    }
    let rows: Vec<u64> = (1..=4)
        .map(|h| tree_matrix(h, Budget::default()).unwrap().distinct_rows() as u64)
        .collect();
    // Super-polynomial: the local exponent log(a[h+1]/a[h]) / log((h+1)/h)
    // rises strictly.
    let exponents: Vec<f64> = (1..rows.len())
        .map(|k| (rows[k] as f64 / rows[k - 1] as f64).ln() / ((k + 1) as f64 / k as f64).ln())
        .collect();
    let rising = rows.windows(2).all(|w| w[1] > w[0]) && exponents.windows(2).all(|e| e[1] > e[0]);
    let shown: Vec<String> = exponents.iter().map(|e| format!("{e:.2}")).collect();
    outcome(
        transcript_bad.is_empty() && rising,
        format!(
            "transcripts of length h: {coverage:?}, failures at {transcript_bad:?}; \
             distinct rows {rows:?}, local exponents [{}]",
            shown.join(", ")
        ),
    )
}

fn determinism(reports: &mut Vec<ClassReport>) -> Outcome {
    let mut runs = Vec::new();
    for workers in ["1", "2"] {
        let start = Instant::now();
        let out = cacomm(&["--workers", workers, "classify", "--n-max", "12"]);
        runs.push((workers, start.elapsed(), out));
    }
    let ok = runs.iter().all(|(_, _, o)| o.status.success());
    let identical = runs[0].2.stdout == runs[1].2.stdout;
    let limit = Duration::from_secs(30 * 60);
    let fast = runs.iter().all(|(_, t, _)| *t < limit);
    if ok {
        *reports = serde_json::from_slice(&runs[0].2.stdout).unwrap();
    }
    let times: Vec<String> = runs
        .iter()
        .map(|(w, t, _)| format!("{w} worker(s) {:.0} s", t.as_secs_f64()))
        .collect();
    outcome(
        ok && identical && fast && reports.len() == 88,
        format!(
            "{} reports, byte-identical: {identical}, {} on {} available core(s)",
            reports.len(),
            times.join(", "),
            std::thread::available_parallelism().map_or(1, |n| n.get())
        ),
    )
}

fn main() {
    let names: BTreeMap<u32, &str> = [
        (1, "rule 178 matrix reproduction"),
        (2, "rule 178 protocol"),
        (3, "rule 178 fooling set"),
        (4, "rule 218 protocol"),
        (5, "rule 218 lower-bound family"),
        (6, "bounded class reproduction"),
        (7, "symmetry invariance"),
        (8, "linear-rule protocols"),
        (9, "rank sandwich"),
        (10, "rescaling properties"),
        (11, "tree separation witness"),
        (12, "determinism and performance"),
    ]
    .into();
    let mut results: BTreeMap<u32, Outcome> = BTreeMap::new();
    let mut reports = Vec::new();
    let mut run = |id: u32, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        println!(
            "criterion {id:>2} {} {} ({:.1} s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            names[&id],
            start.elapsed().as_secs_f64(),
            o.detail
        );
        results.insert(id, o);
    };
    run(1, &mut matrix_178);
    run(2, &mut protocol_178);
    run(3, &mut fooling_178);
    run(4, &mut protocol_218);
    run(5, &mut family_218);
    run(7, &mut symmetry);
    run(8, &mut linear_rules);
    run(9, &mut rank_sandwich);
    run(10, &mut rescaling);
    run(11, &mut tree_separation);
    // The bounded-class check reads the classification produced here.
    run(12, &mut || determinism(&mut reports));
    run(6, &mut || bounded_44(&reports));

    println!();
    for (id, o) in &results {
        println!("{id:>2} {}", if o.pass { "PASS" } else { "FAIL" });
    }
    let failing: Vec<u32> = results
        .iter()
        .filter(|(_, o)| !o.pass)
        .map(|(&id, _)| id)
        .collect();
    let passing = results.len() - failing.len();
    println!(
        "{passing}/{} criteria pass; failing {failing:?}, expected {KNOWN_RED:?}",
        results.len()
    );
    if failing != KNOWN_RED {
        eprintln!("failing criteria differ from the expected set");
        std::process::exit(1);
    }
}
