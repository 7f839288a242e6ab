//! Halton low-discrepancy points for sampling certificates.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Iterator over points of the Halton sequence in `[0,1)^dim`.
///
/// The sequence starts at `offset + 1` so that the all-zero point is never
/// produced; different offsets give disjoint (and reproducible) streams.
#[derive(Debug, Clone)]
pub struct Halton {
    dim: usize,
    next: u64,
}

impl Halton {
    pub fn new(dim: usize, offset: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension {dim} not supported");
        Self {
            dim,
            next: offset + 1,
        }
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let i = self.next;
        self.next += 1;
        Some(
            PRIMES[..self.dim]
                .iter()
                .map(|&p| radical_inverse(i, p))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_prefix() {
        let v: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn points_in_unit_cube() {
        for p in Halton::new(5, 17).take(1000) {
            assert!(p.iter().all(|&x| (0.0..1.0).contains(&x) && x > 0.0));
        }
    }
}
