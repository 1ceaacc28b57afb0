//! Check execution. Each check is evaluated independently on one thread, so
//! results are numerically identical for every worker count; assembly is by
//! config order, which keeps the JSON byte-identical as well.

use crate::config::{self, ConfigFile};
use curvlab_core::{CheckResult, Error, Immersion};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub type Outcome = (String, Result<CheckResult, Error>);

pub fn run_all(
    im: &Immersion,
    cfg: &ConfigFile,
    workers: usize,
    grid_scale: usize,
    filter: Option<&str>,
) -> Vec<Outcome> {
    let picked: Vec<usize> = (0..cfg.checks.len())
        .filter(|&i| match filter {
            Some(name) => config::effective_name(&cfg.checks[i], i) == name,
            None => true,
        })
        .collect();
    let n = picked.len();
    let slots: Vec<Mutex<Option<Outcome>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let threads = workers.clamp(1, n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= n {
                    break;
                }
                let idx = picked[k];
                let name = config::effective_name(&cfg.checks[idx], idx);
                let res = config::run_check(im, cfg, idx, grid_scale);
                *slots[k].lock().expect("result slot") = Some((name, res));
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("result slot").expect("worker filled slot"))
        .collect()
}

/// Exit code policy: any Fail is 1; otherwise hypothesis violations and
/// checker errors are 2; otherwise 0. Config errors never reach this point.
pub fn exit_code(outcomes: &[Outcome]) -> i32 {
    let mut saw_fail = false;
    let mut saw_violation = false;
    for (_, res) in outcomes {
        match res {
            Ok(cr) => match cr.report.verdict {
                curvlab_core::Verdict::Fail => saw_fail = true,
                curvlab_core::Verdict::HypothesisViolation => saw_violation = true,
                _ => {}
            },
            Err(_) => saw_violation = true,
        }
    }
    if saw_fail {
        1
    } else if saw_violation {
        2
    } else {
        0
    }
}
