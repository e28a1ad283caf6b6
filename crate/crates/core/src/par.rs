//! Indexed map over a range, parallel with the `parallel` feature and
//! sequential otherwise. Output order always follows the index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Sequential reference path, available regardless of features.
pub fn map_indexed_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

/// Run `op` on a dedicated pool of `threads` workers (`None` = global pool).
#[cfg(feature = "parallel")]
pub fn with_threads<R, OP>(threads: Option<usize>, op: OP) -> Result<R>
where
    R: Send,
    OP: FnOnce() -> R + Send,
{
    match threads {
        None => Ok(op()),
        Some(0) => Err(Error::Config("thread count must be positive".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(op))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R, OP>(threads: Option<usize>, op: OP) -> Result<R>
where
    R: Send,
    OP: FnOnce() -> R + Send,
{
    if threads == Some(0) {
        return Err(Error::Config("thread count must be positive".into()));
    }
    Ok(op())
}
