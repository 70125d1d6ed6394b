//! Fixed-order reductions.
//!
//! Every reduction over grid values goes through [`pairwise_sum`], which
//! splits at fixed midpoints so the result depends only on the input order,
//! never on how work was scheduled.

const LEAF: usize = 64;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f(x)` over `xs`, without materializing the mapped slice.
pub fn pairwise_sum_by<T, F>(xs: &[T], f: &F) -> f64
where
    F: Fn(&T) -> f64,
{
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for x in xs {
            acc += f(x);
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum_by(&xs[..mid], f) + pairwise_sum_by(&xs[mid..], f)
}

pub fn pairwise_mean_by<T, F>(xs: &[T], f: F) -> f64
where
    F: Fn(&T) -> f64,
{
    if xs.is_empty() {
        return 0.0;
    }
    pairwise_sum_by(xs, &f) / xs.len() as f64
}
