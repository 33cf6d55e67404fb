//! Finite metric spaces, balls and candidate width grids.
//!
//! A ball of width `w` around `x` is `{y : d(x,y) <= w/2}`; every width
//! functional in this crate jumps only at widths of the form `2 d(x,y)`, so
//! `candidate_widths` is the exact search grid for their infima.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// Outcome set with a metric, immutable after construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>, // n x n, row-major
}

impl FiniteMetricSpace {
    /// Validate the metric axioms on an explicit matrix.
    pub fn explicit(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetric {
                reason: format!("distance matrix must be {n}x{n}"),
            });
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = matrix[i][j];
            }
        }
        let space = Self { labels, dist };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.dist(i, i).abs() > tol::METRIC {
                return Err(Error::InvalidMetric {
                    reason: format!("d({i},{i}) != 0"),
                });
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if d < 0.0 {
                    return Err(Error::InvalidMetric {
                        reason: format!("d({i},{j}) = {d} < 0"),
                    });
                }
                if i != j && d <= tol::METRIC {
                    return Err(Error::InvalidMetric {
                        reason: format!("d({i},{j}) = {d} vanishes for distinct points"),
                    });
                }
                if (d - self.dist(j, i)).abs() > tol::METRIC {
                    return Err(Error::InvalidMetric {
                        reason: format!("d({i},{j}) != d({j},{i})"),
                    });
                }
                for k in 0..n {
                    if self.dist(i, k) > d + self.dist(j, k) + tol::METRIC {
                        return Err(Error::InvalidMetric {
                            reason: format!("triangle inequality fails at ({i},{j},{k})"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Discrete metric: `d(x,y) = 1` for distinct points.
    pub fn discrete(n: usize) -> Self {
        assert!(n >= 1, "need at least one point");
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut dist = vec![1.0; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        Self { labels, dist }
    }

    /// Circular metric on `Z_n`: `d(m,k) = scale * min((m-k) mod n, (k-m) mod n)`.
    pub fn cyclic(n: usize, scale: f64) -> Self {
        assert!(n >= 2 && scale > 0.0, "need n >= 2 and positive scale");
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let fwd = (j + n - i) % n;
                let bwd = (i + n - j) % n;
                dist[i * n + j] = scale * fwd.min(bwd) as f64;
            }
        }
        Self { labels, dist }
    }

    /// Hamming metric on `{0,1}^n_bits` rescaled by `1/(2 n_bits)`.
    ///
    /// Labels are bitstrings, most significant bit first.
    pub fn hamming_rescaled(n_bits: usize) -> Self {
        assert!((1..=16).contains(&n_bits), "bit count out of range");
        let n = 1usize << n_bits;
        let labels = (0..n)
            .map(|i| format!("{i:0width$b}", width = n_bits))
            .collect();
        let scale = 1.0 / (2.0 * n_bits as f64);
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = scale * (i ^ j).count_ones() as f64;
            }
        }
        Self { labels, dist }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Structural compatibility: same labels, same distances (to METRIC tol).
    pub fn compatible(&self, other: &FiniteMetricSpace) -> bool {
        self.labels == other.labels
            && self
                .dist
                .iter()
                .zip(&other.dist)
                .all(|(a, b)| (a - b).abs() <= tol::METRIC)
    }

    /// Ball of width `w`: `{y : d(x,y) <= w/2 + BALL_SLACK}`.
    pub fn ball(&self, x: usize, w: f64) -> Result<Vec<usize>> {
        if x >= self.len() {
            return Err(Error::UnknownOutcome {
                index: x,
                size: self.len(),
            });
        }
        if w < 0.0 {
            return Err(Error::DomainViolation {
                value: w,
                domain: "width must be nonnegative",
            });
        }
        Ok((0..self.len())
            .filter(|&y| self.dist(x, y) <= w / 2.0 + tol::BALL_SLACK)
            .collect())
    }

    /// Largest ball cardinality at width `w`.
    pub fn max_ball_cardinality(&self, w: f64) -> Result<usize> {
        let mut best = 0;
        for x in 0..self.len() {
            best = best.max(self.ball(x, w)?.len());
        }
        Ok(best)
    }

    /// Sorted distinct grid `{0} U {2 d(x,y)}` on which every width
    /// functional attains its infimum.
    pub fn candidate_widths(&self) -> Vec<f64> {
        let mut ws = vec![0.0];
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                ws.push(2.0 * self.dist(i, j));
            }
        }
        ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ws.dedup_by(|a, b| (*a - *b).abs() <= tol::METRIC);
        ws
    }
}
