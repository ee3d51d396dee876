//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! rayon's pool; without it the same functions run sequentially. Results are
//! always returned in input order, so output never depends on scheduling.

/// State vectors at least this long have their amplitude loops split across
/// threads.
pub const AMPLITUDE_THRESHOLD: usize = 1 << 14;

/// Mixes a base seed with an index (SplitMix64), for per-trial RNG streams.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub mod sequential {
    pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
    where
        F: Fn(&T) -> R,
    {
        items.iter().map(f).collect()
    }

    pub fn fill<T, F>(out: &mut [T], f: F)
    where
        F: Fn(usize) -> T,
    {
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }
}

#[cfg(feature = "parallel")]
pub mod threaded {
    use rayon::prelude::*;

    pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.par_iter().map(f).collect()
    }

    pub fn fill<T, F>(out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    }
}

/// Maps `f` over `items`, in parallel when the feature is on.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        threaded::map(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sequential::map(items, f)
    }
}

/// `out[i] = f(i)`; threaded only for long slices.
pub fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if out.len() >= AMPLITUDE_THRESHOLD {
        return threaded::fill(out, f);
    }
    sequential::fill(out, f)
}

/// Runs `f` on each disjoint chunk; threaded only for long slices.
pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(&mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if data.len() >= AMPLITUDE_THRESHOLD {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).for_each(f);
        return;
    }
    data.chunks_mut(chunk).for_each(f)
}
