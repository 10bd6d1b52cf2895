//! Order-preserving batch execution, parallel when the `parallel` feature is
//! enabled and sequential otherwise.

/// How a batch of independent work items is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// `jobs = 0` uses the global pool.
    Parallel { jobs: usize },
    #[default]
    Auto,
}

impl Execution {
    pub fn from_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            Some(1) => Execution::Sequential,
            Some(n) => Execution::Parallel { jobs: n },
            None => Execution::Auto,
        }
    }
}

/// Maps `f` over `items`, returning results in input order regardless of
/// how the work was scheduled.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], exec: Execution, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Auto | Execution::Parallel { jobs: 0 } => items.par_iter().map(f).collect(),
        Execution::Parallel { jobs } => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], _exec: Execution, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
