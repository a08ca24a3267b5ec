//! Elapsed-time filter over goal paths: a path is a solution when the sum
//! of its firing durations is within the bound.

use crate::prtnet::PrTNet;
use crate::reach::{format_path, SolutionPath};
use crate::scalar::Scalar;

/// Sum of the path's firing durations; zero for the empty path.
pub fn path_elapsed<T: Scalar>(p: &SolutionPath<T>) -> T {
    p.firings.iter().fold(T::zero(), |acc, f| acc + f.duration)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimedVerdict<'p, T> {
    pub path: &'p SolutionPath<T>,
    pub elapsed: T,
    /// `elapsed <= t_max`
    pub within_bound: bool,
}

/// One verdict per path, in input order.
pub fn filter_paths<T: Scalar>(paths: &[SolutionPath<T>], t_max: T) -> Vec<TimedVerdict<'_, T>> {
    paths
        .iter()
        .map(|path| {
            let elapsed = path_elapsed(path);
            TimedVerdict { path, elapsed, within_bound: elapsed <= t_max }
        })
        .collect()
}

/// The path block followed by `t_elapsed = <n>`.
pub fn format_verdict<T: Scalar>(net: &PrTNet<T>, number: usize, v: &TimedVerdict<'_, T>) -> String {
    let mut out = format_path(net, number, v.path);
    out.push_str(&format!("t_elapsed = {}\n", v.elapsed));
    out
}
