use std::time::Instant;

/// Measures one execution of a kernel, in seconds.
pub trait Timer {
    fn time(&mut self, kernel: &mut dyn FnMut()) -> f64;
}

/// Monotonic wall-clock timer. Kernels return only after their parallel
/// region has joined, so stopping the clock after the call is a completion
/// barrier.
#[derive(Debug, Default, Clone, Copy)]
pub struct SteadyTimer;

impl Timer for SteadyTimer {
    fn time(&mut self, kernel: &mut dyn FnMut()) -> f64 {
        let start = Instant::now();
        kernel();
        start.elapsed().as_secs_f64()
    }
}

/// Runs the kernel but reports scripted times, cycling through the list.
#[derive(Debug, Clone)]
pub struct StubTimer {
    times: Vec<f64>,
    next: usize,
    calls: usize,
}

impl StubTimer {
    pub fn new(times: Vec<f64>) -> Self {
        assert!(!times.is_empty(), "stub timer needs at least one time");
        StubTimer {
            times,
            next: 0,
            calls: 0,
        }
    }

    pub fn constant(seconds: f64) -> Self {
        Self::new(vec![seconds])
    }

    /// How many kernel executions this timer has measured.
    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl Timer for StubTimer {
    fn time(&mut self, kernel: &mut dyn FnMut()) -> f64 {
        kernel();
        self.calls += 1;
        let t = self.times[self.next];
        self.next = (self.next + 1) % self.times.len();
        t
    }
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "median of an empty sample");
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    if s.len() % 2 == 1 {
        s[mid]
    } else {
        (s[mid - 1] + s[mid]) / 2.0
    }
}
