use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("standard deviation needs at least 2 samples, got {0}")]
    InsufficientSamples(usize),
}

/// Mean and sample standard deviation of repeated timings.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchStats {
    pub n: usize,
    pub samples: Vec<Duration>,
    /// Rounded to whole nanoseconds.
    pub mean: Duration,
    pub stddev: Duration,
    pub mean_secs: f64,
    pub stddev_secs: f64,
}

/// Arithmetic mean and standard deviation with the `N - 1` denominator.
pub fn stats(samples: &[Duration]) -> Result<BenchStats, StatsError> {
    let n = samples.len();
    if n < 2 {
        return Err(StatsError::InsufficientSamples(n));
    }
    // Whole nanoseconds are exact in f64 up to about 104 days.
    let ns: Vec<f64> = samples.iter().map(|d| d.as_nanos() as f64).collect();
    let mean = ns.iter().sum::<f64>() / n as f64;
    let squares: f64 = ns.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sigma = (squares / (n - 1) as f64).sqrt();
    Ok(BenchStats {
        n,
        samples: samples.to_vec(),
        mean: Duration::from_nanos(mean.round() as u64),
        stddev: Duration::from_nanos(sigma.round() as u64),
        mean_secs: mean / 1e9,
        stddev_secs: sigma / 1e9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: u64) -> Duration {
        Duration::from_millis(v)
    }

    #[test]
    fn three_samples() {
        let s = stats(&[ms(128), ms(130), ms(126)]).unwrap();
        assert_eq!(s.mean, ms(128));
        assert_eq!(s.stddev, ms(2));
        assert_eq!(s.stddev_secs, 0.002);
    }

    #[test]
    fn equal_samples_have_no_spread() {
        assert_eq!(stats(&[ms(5), ms(5)]).unwrap().stddev, Duration::ZERO);
    }

    #[test]
    fn two_samples() {
        let s = stats(&[Duration::from_secs(1), Duration::from_secs(3)]).unwrap();
        assert_eq!(s.mean, Duration::from_secs(2));
        assert!((s.stddev_secs - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn one_sample_is_not_enough() {
        assert_eq!(stats(&[ms(1)]), Err(StatsError::InsufficientSamples(1)));
    }
}
