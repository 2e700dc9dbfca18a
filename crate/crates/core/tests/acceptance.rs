//! Acceptance runner: one PASS/FAIL line per criterion.
//!
//! Some criteria fail against the oracle. Those failures are printed as FAIL
//! and pinned below; the process exits non-zero only when an outcome differs
//! from what is pinned, so a regression or a newly fixed criterion is noticed.

mod support;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use towerdigits::conjecture::tables::{TableId, FLAGGED_ANOMALIES};
use towerdigits::conjecture::Variant;
use towerdigits::tower::{min_stable_height, tet_mod, TowerSpec};
use towerdigits::verify::{sweep, table_gen, verify_cell, CellStatus, SweepConfig, GOLDEN};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
    /// Key compared against the pinned expectation.
    signature: String,
}

/// Heights claimed for the six worked examples.
const CLAIMED_HEIGHTS: [u64; 6] = [5, 7, 7, 4, 3, 4];

/// Expected signature of each criterion. Failing ones are analysed in the
/// project's decisions log.
const PINNED: [(u32, &str); 6] = [
    (1, "pass"),
    (2, "fail: example-5 oracle=2 claimed=3"),
    (3, "fail: p=2 x=2 n=1 oracle=1 table=0; p=2 x=3 n=1 oracle=1 table=0"),
    (4, "pass"),
    (5, "fail: example-5 cell EXAMPLE_CONSISTENT predicted=3 oracle=2"),
    (6, "pass"),
];

fn criterion_1() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut slowest = 0.0f64;
    for g in &GOLDEN {
        let start = Instant::now();
        let outcome = g.check(Variant::default()).expect("golden inputs are valid");
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        let ok = outcome.digits_match && outcome.predecessor_match != Some(false);
        pass &= ok;
        details.push(format!(
            "{} q={} n={} residue={} predecessor={} time={secs:.3}s",
            g.label,
            g.q,
            g.n,
            if outcome.digits_match { "match" } else { "DIFFERS" },
            match outcome.predecessor_match {
                Some(true) => "match",
                Some(false) => "DIFFERS",
                None => "not printed",
            }
        ));
    }
    Outcome {
        pass,
        summary: format!("golden residues: six worked examples bit-exact (slowest {slowest:.3}s)"),
        details,
        signature: if pass { "pass".into() } else { "fail: residues".into() },
    }
}

fn criterion_2() -> Outcome {
    let mut details = Vec::new();
    let mut failures = Vec::new();
    for (g, &claimed) in GOLDEN.iter().zip(&CLAIMED_HEIGHTS) {
        let base = g.base();
        let record = min_stable_height(&base, g.n).expect("golden inputs are valid");
        let u = record.u_min;
        // Minimality re-checked with the recursive evaluator alone.
        let at = |h: u64| tet_mod(&TowerSpec { base, height: h }, g.n).unwrap();
        let settled = (u..=record.stable_height).all(|h| at(h) == record.stable_digits);
        let minimal = u == 0 || at(u - 1) != record.stable_digits;
        assert!(settled && minimal, "{}: evaluators disagree", g.label);
        details.push(format!(
            "{} oracle={u} claimed={claimed} (height {} still differs)",
            g.label,
            u.saturating_sub(1)
        ));
        if u != claimed {
            failures.push(format!("{} oracle={u} claimed={claimed}", g.label));
        }
    }
    let pass = failures.is_empty();
    Outcome {
        pass,
        summary: "golden heights: minimum stable heights equal 5, 7, 7, 4, 3, 4".into(),
        details,
        signature: if pass { "pass".into() } else { format!("fail: {}", failures.join("; ")) },
    }
}

fn criterion_3() -> Outcome {
    let n_values: Vec<u32> = (1..=12).collect();
    let report = table_gen(TableId::T7, &n_values).expect("table 7 regenerates");
    let cells: Vec<_> = report.cells.iter().filter(|c| c.x >= 2 && c.q <= 281).collect();
    let rows: BTreeSet<u64> = cells.iter().map(|c| c.q).collect();
    let backed: BTreeSet<u64> = rows
        .iter()
        .copied()
        .filter(|&q| cells.iter().filter(|c| c.q == q).all(|c| c.tabulated_u == c.formula_u.map(|u| u as i64)))
        .collect();
    let mut findings = Vec::new();
    let mut asserted = Vec::new();
    for c in &cells {
        if c.agree == Some(true) {
            continue;
        }
        let line =
            format!("p={} x={} n={} oracle={} table={}", c.q, c.x, c.n, c.oracle_u.unwrap(), c.tabulated_u.unwrap());
        if backed.contains(&c.q) {
            asserted.push(line.clone());
        }
        findings.push(line);
    }
    let deviating_rows: BTreeSet<u64> = cells.iter().filter(|c| c.agree == Some(false)).map(|c| c.q).collect();
    let mut details = vec![
        format!(
            "{} rows, {} cells; {} backed by the x >= 2 formulas; {} deviating cells in rows {:?}",
            rows.len(),
            cells.len(),
            backed.len(),
            findings.len(),
            deviating_rows
        ),
        format!("rows not backed by the formulas: {:?}", rows.difference(&backed).collect::<Vec<_>>()),
    ];
    details.extend(findings.iter().map(|f| format!("finding: {f}")));
    let pass = asserted.is_empty();
    Outcome {
        pass,
        summary: "table 7 x>=2 column: formula-backed rows match the oracle for n in 1..12".into(),
        details,
        signature: if pass { "pass".into() } else { format!("fail: {}", asserted.join("; ")) },
    }
}

fn criterion_4() -> Outcome {
    let n_values: Vec<u32> = (1..=10).collect();
    let mut details = Vec::new();
    let mut pass = true;
    for id in TableId::SMALL_X {
        let first = table_gen(id, &n_values).expect("table regenerates");
        let second = table_gen(id, &n_values).expect("table regenerates");
        let deterministic = serde_json::to_vec(&first).unwrap() == serde_json::to_vec(&second).unwrap();
        let expected_cells = id.rows().len() * 2 * n_values.len();
        let unchecked: Vec<_> = first.cells.iter().filter(|c| c.agree.is_none() && !c.convention).collect();
        let complete = first.cells.len() == expected_cells && unchecked.is_empty();
        pass &= deterministic && complete;
        let mut disagreeing: BTreeSet<(u64, u32)> = BTreeSet::new();
        for c in first.cells.iter().filter(|c| c.agree == Some(false)) {
            disagreeing.insert((c.q, c.x));
        }
        details.push(format!(
            "{id}: cells={} agree={} disagree={} unchecked={} complete={complete} deterministic={deterministic} disagreeing (q, x): {disagreeing:?}",
            first.cells.len(),
            first.agree_count,
            first.disagree_count,
            first.unchecked_count
        ));
        for &q in FLAGGED_ANOMALIES {
            for x in [0, 1] {
                let cells: Vec<_> = first.cells.iter().filter(|c| c.q == q && c.x == x).collect();
                if cells.is_empty() {
                    continue;
                }
                let agree = cells.iter().filter(|c| c.agree == Some(true)).count();
                details.push(format!("{id}: flagged q={q} x={x} agrees in {agree}/{} cells", cells.len()));
            }
        }
    }
    Outcome {
        pass,
        summary: "small-x tables 1-5: every cell checked for n in 1..10, report complete and deterministic".into(),
        details,
        signature: if pass { "pass".into() } else { "fail: incomplete or nondeterministic".into() },
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let config = SweepConfig { parallel: true, ..SweepConfig::default() };
    let report = sweep(&config).expect("default grid is valid");
    let secs = start.elapsed().as_secs_f64();
    let w = &report.variant_wins;
    let winner = w.winner().map_or("tie", |v| v.as_str());
    let cell = verify_cell(255, 4, 3, 1, 34, Variant::ExampleConsistent).expect("valid cell");
    let predicted = cell.predicted_u_example.expect("x >= 2 is always predicted");
    let pass = cell.status == CellStatus::Match;
    Outcome {
        pass,
        summary: format!(
            "default sweep: {} cells in {secs:.1}s; MOD10_5 winner {winner}; default variant matches the oracle on example 5",
            report.total()
        ),
        details: vec![
            report.config_digest.clone(),
            format!("pass={} fail={} skip={}", report.pass_count, report.fail_count, report.skip_count),
            format!(
                "MOD10_5 cells={} as_written={} example_consistent={} both={} neither={}",
                w.cells, w.as_written, w.example_consistent, w.both, w.neither
            ),
            format!(
                "example-5 cell: oracle={} as_written={} example_consistent={predicted}",
                cell.oracle_u,
                cell.predicted_u_as_written.unwrap()
            ),
        ],
        signature: if pass {
            "pass".into()
        } else {
            format!("fail: example-5 cell EXAMPLE_CONSISTENT predicted={predicted} oracle={}", cell.oracle_u)
        },
    }
}

fn criterion_6() -> Outcome {
    let mut details = Vec::new();
    let mut failed = Vec::new();
    for (module, name, check) in support::SUITES {
        match check() {
            Ok(()) => details.push(format!("ok   {module}: {name}")),
            Err(e) => {
                details.push(format!("FAIL {module}: {name}: {e}"));
                failed.push(*name);
            }
        }
    }
    let pass = failed.is_empty();
    Outcome {
        pass,
        summary: format!("property suites: {} of {} pass", support::SUITES.len() - failed.len(), support::SUITES.len()),
        details,
        signature: if pass { "pass".into() } else { format!("fail: {}", failed.join(", ")) },
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 6] =
        [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4), (5, criterion_5), (6, criterion_6)];
    let mut unexpected = Vec::new();
    let mut failures = 0;
    for (id, run) in criteria {
        let outcome = run();
        println!("{} [{id}] {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.summary);
        for d in &outcome.details {
            println!("    {d}");
        }
        failures += usize::from(!outcome.pass);
        let pinned = PINNED.iter().find(|(k, _)| *k == id).map(|(_, s)| *s).unwrap();
        if outcome.signature != pinned {
            println!("    outcome changed: expected `{pinned}`, got `{}`", outcome.signature);
            unexpected.push(id);
        }
    }
    println!(
        "acceptance: {} PASS, {failures} FAIL; {}",
        criteria.len() - failures,
        if unexpected.is_empty() {
            "every failure matches a recorded finding".to_string()
        } else {
            format!("unexpected outcome for criteria {unexpected:?}")
        }
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
