//! Execution devices.
//!
//! A [`Device`] decides where kernels run. `reference` executes everything
//! sequentially on the calling thread; `omp` (parallel host) owns a fixed-size
//! thread pool and splits row-oriented kernels into one contiguous block per
//! thread. Block boundaries depend only on the problem and the thread count,
//! so results are reproducible for a given device.

use std::fmt;
use std::sync::Arc;

use rayon::ThreadPool;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceKind {
    Reference,
    ParallelHost,
}

impl DeviceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DeviceKind::Reference => "reference",
            DeviceKind::ParallelHost => "omp",
        }
    }
}

/// Execution context shared by every buffer and operator created on it.
///
/// Cloning is cheap; clones share the thread pool.
#[derive(Clone)]
pub struct Device {
    kind: DeviceKind,
    threads: usize,
    id: usize,
    pool: Option<Arc<ThreadPool>>,
}

/// Creates a device by name (`"reference"` or `"omp"`, case-insensitive).
///
/// `threads` only applies to `omp`, where it defaults to the available
/// hardware parallelism. GPU backend names are recognized and rejected.
pub fn create_device(name: &str, id: usize, threads: Option<usize>) -> Result<Device> {
    match name.to_ascii_lowercase().as_str() {
        "reference" => Ok(Device::reference().with_id(id)),
        "omp" => {
            let threads = threads.unwrap_or_else(hardware_threads);
            Ok(Device::parallel_host(threads)?.with_id(id))
        }
        "cuda" | "hip" | "dpcpp" | "sycl" => Err(Error::UnsupportedBackend(name.to_string())),
        _ => Err(Error::UnknownDevice(name.to_string())),
    }
}

pub fn hardware_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

impl Device {
    pub fn reference() -> Self {
        Device {
            kind: DeviceKind::Reference,
            threads: 1,
            id: 0,
            pool: None,
        }
    }

    /// Parallel host device with exactly `threads` worker threads.
    pub fn parallel_host(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .thread_name(|i| format!("sparsekit-omp-{i}"))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start thread pool: {e}")))?;
        Ok(Device {
            kind: DeviceKind::ParallelHost,
            threads,
            id: 0,
            pool: Some(Arc::new(pool)),
        })
    }

    fn with_id(mut self, id: usize) -> Self {
        self.id = id;
        self
    }

    pub fn kind(&self) -> DeviceKind {
        self.kind
    }

    pub fn thread_count(&self) -> usize {
        self.threads
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn name(&self) -> &'static str {
        self.kind.as_str()
    }

    /// Runs `work(block, first_row, rows)` for every block in `0..blocks`.
    ///
    /// `out` is split into disjoint row ranges `[bound(k), bound(k + 1))`,
    /// each row being `unit` elements long. `bound` must be non-decreasing
    /// with `bound(0) == 0`. No heap allocation happens here, so timed
    /// kernels built on top stay allocation-free.
    pub(crate) fn for_each_block<T, B, F>(
        &self,
        out: &mut [T],
        unit: usize,
        blocks: usize,
        bound: &B,
        work: &F,
    ) where
        T: Send,
        B: Fn(usize) -> usize + Sync,
        F: Fn(usize, usize, &mut [T]) + Sync,
    {
        match &self.pool {
            Some(pool) if blocks > 1 => {
                pool.install(|| split_blocks(out, unit, 0, blocks, bound, work));
            }
            _ => {
                for k in 0..blocks {
                    let (lo, hi) = (bound(k), bound(k + 1));
                    work(k, lo, &mut out[lo * unit..hi * unit]);
                }
            }
        }
    }

    /// Number of blocks row-oriented kernels should use on this device.
    pub(crate) fn blocks(&self) -> usize {
        self.threads
    }
}

fn split_blocks<T, B, F>(out: &mut [T], unit: usize, k0: usize, k1: usize, bound: &B, work: &F)
where
    T: Send,
    B: Fn(usize) -> usize + Sync,
    F: Fn(usize, usize, &mut [T]) + Sync,
{
    if k1 - k0 == 1 {
        work(k0, bound(k0), out);
        return;
    }
    let mid = (k0 + k1) / 2;
    let split = (bound(mid) - bound(k0)) * unit;
    let (left, right) = out.split_at_mut(split);
    rayon::join(
        || split_blocks(left, unit, k0, mid, bound, work),
        || split_blocks(right, unit, mid, k1, bound, work),
    );
}

/// Boundary of block `k` when `n` items are split evenly into `blocks`.
#[inline]
pub(crate) fn even_bound(n: usize, blocks: usize, k: usize) -> usize {
    ((n as u128 * k as u128) / blocks as u128) as usize
}

impl PartialEq for Device {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.threads == other.threads && self.id == other.id
    }
}

impl Eq for Device {}

impl fmt::Debug for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Device")
            .field("kind", &self.kind)
            .field("threads", &self.threads)
            .field("id", &self.id)
            .finish()
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.id)
    }
}

impl Default for Device {
    fn default() -> Self {
        Device::reference()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_device() {
        let dev = create_device("reference", 0, None).unwrap();
        assert_eq!(dev.kind(), DeviceKind::Reference);
        assert_eq!(dev.thread_count(), 1);
        // thread hint is ignored for the reference device
        let dev = create_device("Reference", 3, Some(8)).unwrap();
        assert_eq!(dev.thread_count(), 1);
        assert_eq!(dev.id(), 3);
    }

    #[test]
    fn omp_device() {
        let dev = create_device("omp", 0, Some(4)).unwrap();
        assert_eq!(dev.kind(), DeviceKind::ParallelHost);
        assert_eq!(dev.thread_count(), 4);
        let dev = create_device("OMP", 0, None).unwrap();
        assert_eq!(dev.thread_count(), hardware_threads());
        assert!(matches!(
            create_device("omp", 0, Some(0)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn gpu_and_unknown_names() {
        assert!(matches!(
            create_device("cuda", 0, None),
            Err(Error::UnsupportedBackend(name)) if name == "cuda"
        ));
        assert!(matches!(
            create_device("hip", 0, None),
            Err(Error::UnsupportedBackend(_))
        ));
        assert!(matches!(
            create_device("tpu", 0, None),
            Err(Error::UnknownDevice(_))
        ));
    }

    #[test]
    fn blocks_cover_output_once() {
        let dev = Device::parallel_host(3).unwrap();
        let mut out = vec![0usize; 10 * 2];
        let bound = |k| even_bound(10, 4, k);
        dev.for_each_block(&mut out, 2, 4, &bound, &|k, first, rows: &mut [usize]| {
            assert_eq!(first, bound(k));
            for v in rows.iter_mut() {
                *v += k + 1;
            }
        });
        let expected: Vec<usize> = (0..10)
            .flat_map(|r| {
                let k = (0..4).find(|&k| r < bound(k + 1)).unwrap();
                [k + 1, k + 1]
            })
            .collect();
        assert_eq!(out, expected);
    }
}
