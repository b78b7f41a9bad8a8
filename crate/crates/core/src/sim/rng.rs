//! Seed derivation and replication scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Named substreams inside one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Fading,
    /// Controller randomness for the `k`-th entry of the gain sweep.
    Controller(usize),
    Arrivals(usize),
    Decoding(usize),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Fading => 0,
            Stream::Controller(k) => 1 + 4 * k as u64,
            Stream::Arrivals(k) => 2 + 4 * k as u64,
            Stream::Decoding(k) => 3 + 4 * k as u64,
        }
    }
}

/// Generator for `(seed, replication, stream)`. Distinct triples give
/// non-overlapping ChaCha streams.
pub fn substream(seed: u64, replication: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((replication as u64) << 24) | stream.id());
    rng
}

/// Runs `f(0..n)` on worker threads and returns the results by index.
pub fn run_replications<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let order: Vec<usize> = (0..n).collect();
    run_in_order(&order, f)
}

/// Like [`run_replications`] but hands indices to workers in `order`.
/// The returned vector is still indexed by replication.
pub fn run_in_order<T, F>(order: &[usize], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let n = order.len();
    let workers = std::thread::available_parallelism().map_or(1, usize::from).min(n.max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let j = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if j >= n {
                            break;
                        }
                        done.push((order[j], f(order[j])));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (rep, out) in h.join().expect("replication worker panicked") {
                slots[rep] = Some(out);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("replication order must be a permutation"))
        .collect()
}
