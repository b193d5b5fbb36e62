use std::io::Write;
use std::time::{Duration, Instant};

use omc_core::report::CheckReport;
use omc_core::suite::{run_one, SuiteConfig};

struct Line {
    id: usize,
    name: &'static str,
    suites: &'static [&'static str],
    limit: Option<Duration>,
}

const LINES: &[Line] = &[
    Line { id: 1, name: "cylinder laws on 200 seeded random categories", suites: &["cylinder-laws"], limit: Some(Duration::from_secs(300)) },
    Line { id: 2, name: "gamma structure, Top/Bot trivial fibrations, Triv weak equivalence", suites: &["gamma"], limit: None },
    Line { id: 3, name: "weq(f) iff tfib(lambda f) over exhaustive functor families", suites: &["charweq", "lifting"], limit: None },
    Line { id: 4, name: "transport oracle equivalence and weak uniqueness", suites: &["transport"], limit: None },
    Line { id: 5, name: "3-for-2 and retract closure of weak equivalences", suites: &["three-for-two", "retract"], limit: None },
    Line { id: 6, name: "immersions are weq, closed under pushout, negatives refused", suites: &["immersion", "pushout-immersion"], limit: None },
    Line { id: 7, name: "transfer identities, collapsing maps, n = 1 equivalences", suites: &["transfer"], limit: None },
    Line { id: 8, name: "globe and boundary counts, boundary pushout squares", suites: &["structural"], limit: None },
    Line { id: 9, name: "fibrancy extension through the retraction", suites: &["fibrancy"], limit: None },
];

fn run(line: &Line, cfg: &SuiteConfig) -> (bool, String) {
    let start = Instant::now();
    let mut rep = CheckReport::new(line.name);
    for s in line.suites {
        match run_one(s, cfg) {
            Ok(r) => rep.merge(r),
            Err(e) => return (false, format!("{s}: error {e}")),
        }
    }
    let elapsed = start.elapsed();
    let in_time = line.limit.is_none_or(|l| elapsed <= l);
    let ok = rep.holds() && in_time;
    let stats: Vec<String> = rep.stats.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut detail = format!("{:.1}s {}", elapsed.as_secs_f64(), stats.join(" "));
    if !rep.holds() {
        detail = format!("{} | {detail}", rep.summary());
    }
    if !in_time {
        detail = format!("over time limit | {detail}");
    }
    (ok, detail)
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for line in LINES {
        let (ok, detail) = run(line, &cfg);
        writeln!(out, "[{}] {}: {} ({detail})", if ok { "PASS" } else { "FAIL" }, line.id, line.name).unwrap();
        if !ok {
            failed.push(line.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
