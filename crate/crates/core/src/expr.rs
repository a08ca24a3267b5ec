//! Small expression types shared by the metamodel, PDDL and net layers.

use std::fmt;

use crate::scalar::Scalar;

/// Duration of an event: the maximum over several variables' times, or the
/// time of a single variable. Variable names keep their `?` prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DurationExpr {
    Max(Vec<String>),
    Single(String),
}

impl DurationExpr {
    pub fn vars(&self) -> &[String] {
        match self {
            DurationExpr::Max(vars) => vars,
            DurationExpr::Single(v) => std::slice::from_ref(v),
        }
    }

    /// Renames every variable through `f`.
    pub fn map_vars(&self, mut f: impl FnMut(&str) -> String) -> DurationExpr {
        match self {
            DurationExpr::Max(vars) => DurationExpr::Max(vars.iter().map(|v| f(v)).collect()),
            DurationExpr::Single(v) => DurationExpr::Single(f(v)),
        }
    }

    /// Evaluates with `time_of` giving each variable's time; `None` if any
    /// variable is unknown or the max is empty.
    pub fn eval<T: Scalar>(&self, mut time_of: impl FnMut(&str) -> Option<T>) -> Option<T> {
        match self {
            DurationExpr::Single(v) => time_of(v),
            DurationExpr::Max(vars) => {
                let mut best: Option<T> = None;
                for v in vars {
                    let t = time_of(v)?;
                    best = Some(best.map_or(t, |b| b.max(t)));
                }
                best
            }
        }
    }
}

/// Comparison used by time bounds. Only `<=` occurs in scheduling goals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Comparator {
    #[default]
    Le,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Le => "<=",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        (s == "<=").then_some(Comparator::Le)
    }

    pub fn holds<T: Ord>(self, lhs: T, rhs: T) -> bool {
        match self {
            Comparator::Le => lhs <= rhs,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
