//! Gauss–Legendre rules on `[-1, 1]` computed by Newton iteration on `P_n`.

use crate::scalar::Real;

/// Nodes and weights of an n-point Gauss–Legendre rule, nodes ascending.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let nf = T::from_count(n as u64);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let half = T::lit(0.5);
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root
            let k = T::from_count(i as u64 + 1);
            let mut x = (T::PI() * (k - T::lit(0.25)) / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Iterates over (node, weight) pairs mapped to `[lo, hi]`.
    pub fn mapped(&self, lo: T, hi: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = T::lit(0.5) * (hi - lo);
        let mid = T::lit(0.5) * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Plain (uncompensated) application of the rule on `[lo, hi]`.
    pub fn integrate<F: FnMut(T) -> T>(&self, lo: T, hi: T, mut f: F) -> T {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_count(k as u64);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_count(n as u64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    if n == 1 {
        (x, T::one())
    } else {
        (p1, d)
    }
}
