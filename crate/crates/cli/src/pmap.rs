//! Bounded deterministic job execution.
//!
//! Jobs are independent; results land in slots keyed by submission index, so
//! the output is identical for every worker count.

use std::collections::VecDeque;
use std::sync::{mpsc, Mutex};

pub type Job<'a, T> = Box<dyn FnOnce() -> T + Send + 'a>;

pub fn run_jobs<'a, T: Send>(threads: usize, jobs: Vec<Job<'a, T>>) -> Vec<T> {
    let worker_count = threads.max(1).min(jobs.len().max(1));
    if worker_count <= 1 {
        return jobs.into_iter().map(|job| job()).collect();
    }
    let n = jobs.len();
    let queue: Mutex<VecDeque<(usize, Job<'a, T>)>> =
        Mutex::new(jobs.into_iter().enumerate().collect());
    let (tx, rx) = mpsc::channel::<(usize, T)>();
    std::thread::scope(|scope| {
        for _ in 0..worker_count {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || loop {
                let next = queue.lock().unwrap().pop_front();
                match next {
                    Some((idx, job)) => {
                        let result = job();
                        let _ = tx.send((idx, result));
                    }
                    None => break,
                }
            });
        }
    });
    drop(tx);
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for (idx, result) in rx {
        slots[idx] = Some(result);
    }
    slots
        .into_iter()
        .map(|slot| slot.expect("every job reports a result"))
        .collect()
}
