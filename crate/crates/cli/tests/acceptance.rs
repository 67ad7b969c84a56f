//! Acceptance criteria. Each prints one PASS/FAIL line; the process exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use flopcheck::config::Config;
use flopcheck::numeric;
use flopcheck::report::Check;
use flopcheck::suites;

struct Outcome {
    label: &'static str,
    checks: Vec<Check>,
    budget: Duration,
    elapsed: Duration,
    note: String,
}

impl Outcome {
    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed) && self.elapsed < self.budget
    }

    fn line(&self, n: usize) -> String {
        let mark = if self.passed() { "PASS" } else { "FAIL" };
        let worst = self
            .checks
            .iter()
            .filter(|c| c.tolerance.is_some() && c.status != flopcheck::report::Status::Info)
            .filter(|c| !c.name.starts_with("runtime") && !c.name.starts_with("u.det"))
            .filter_map(|c| c.residual.map(|r| (r, c.tolerance.unwrap())))
            .filter(|(r, t)| r < t)
            .map(|(r, _)| r)
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
        let mut s = format!(
            "{mark} [{n}] {}: {} checks, {:.2}s (budget {}s)",
            self.label,
            self.checks.len(),
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        );
        if let Some(w) = worst {
            s.push_str(&format!(", worst residual {w:.2e}"));
        }
        if !self.note.is_empty() {
            s.push_str(&format!(", {}", self.note));
        }
        for c in self.checks.iter().filter(|c| !c.passed()) {
            s.push_str(&format!("\n      failed {} {:?} {}", c.name, c.residual, c.detail.clone().unwrap_or_default()));
        }
        if self.elapsed >= self.budget {
            s.push_str("\n      over time budget");
        }
        s
    }
}

fn run(label: &'static str, budget_s: u64, f: impl FnOnce() -> (Vec<Check>, String)) -> Outcome {
    let start = Instant::now();
    let (checks, note) = f();
    Outcome {
        label,
        checks,
        budget: Duration::from_secs(budget_s),
        elapsed: start.elapsed(),
        note,
    }
}

fn cfg(r: usize) -> Config {
    Config {
        rank: r,
        ..Config::default()
    }
}

fn main() {
    let mut results = Vec::new();

    results.push(run("exact GRR for r <= 3", 1, || (suites::grr_suite(3), String::new())));

    results.push(run("intersections, push-pull, correspondence, crepancy", 5, || {
        let mut cs = suites::intersection_suite(1, false);
        cs.extend(suites::intersection_suite(2, false));
        (cs, String::new())
    }));

    results.push(run("FM transform", 30, || {
        let mut cs = suites::fm_suite(1);
        cs.extend(suites::fm_suite(2));
        (cs, String::new())
    }));

    results.push(run("Gamma classes", 5, || (suites::gamma_suite(), String::new())));

    results.push(run("QDE through q^24", 60, || {
        let mut cs = suites::qde_suite(1, 24);
        cs.extend(suites::qde_suite(2, 24));
        (cs, String::new())
    }));

    results.push(run("transport at 60 digits", 120, || {
        let mut cs = Vec::new();
        for r in 1..=2 {
            let c = cfg(r);
            cs.extend(numeric::transport_suite(&c, r, &c.z[0]));
        }
        (cs, String::new())
    }));

    results.push(run("U extraction and precision drift", 300, || {
        let mut cs = Vec::new();
        for r in 1..=2 {
            cs.extend(numeric::u_suite(&cfg(r), r));
        }
        (cs, String::new())
    }));

    results.push(run("commutativity at z = 1, 2 for r = 1, 2", 630, || {
        let mut out = Vec::new();
        let mut notes = Vec::new();
        for (r, budget) in [(1, 30.0), (2, 600.0)] {
            let start = Instant::now();
            let c = cfg(r);
            let (cs, extra) = numeric::verify(&c, r);
            let secs = start.elapsed().as_secs_f64();
            let conv = extra.get("convention").and_then(|v| v.as_str()).unwrap_or("none");
            notes.push(format!("r={r} {secs:.1}s under {conv}"));
            out.extend(
                cs.into_iter()
                    .filter(|c| c.name.starts_with("main.") || c.name.starts_with("convention.")),
            );
            out.push(Check::below(format!("runtime[r={r}]"), secs, budget));
        }
        (out, notes.join("; "))
    }));

    let mut all = true;
    for (i, o) in results.iter().enumerate() {
        println!("{}", o.line(i + 1));
        all &= o.passed();
    }
    if !all {
        eprintln!("acceptance criteria failed");
        std::process::exit(1);
    }
}
