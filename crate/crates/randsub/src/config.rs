//! Parsing of parameter grids and iteration ranges.

use std::fmt;
use std::str::FromStr;

/// Largest number of points a grid may hold.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// An inclusive grid `start:stop:step` on `[0, 1]`.
///
/// Points are `start + (stop - start) * j / n`, so `0:1:0.001` yields exactly
/// the doubles nearest `j / 1000` and always ends on `stop`.
#[derive(Debug, Clone, PartialEq)]
pub struct PGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    points: Vec<f64>,
}

impl PGrid {
    pub fn single(p: f64) -> Result<Self, String> {
        check_unit(p)?;
        Ok(PGrid {
            start: p,
            stop: p,
            step: 0.0,
            points: vec![p],
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

fn check_unit(p: f64) -> Result<(), String> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(format!("{p} is outside [0, 1]"))
    }
}

impl FromStr for PGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got {s:?}"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        check_unit(start)?;
        check_unit(stop)?;
        if stop < start {
            return Err(format!("grid stop {stop} is below start {start}"));
        }
        if step.is_nan() || step <= 0.0 {
            return Err("grid step must be positive".into());
        }
        let span = stop - start;
        let n = (span / step).round();
        if (n * step - span).abs() > 1e-9 * span.max(1.0) {
            return Err(format!("step {step} does not divide [{start}, {stop}]"));
        }
        if n + 1.0 > MAX_GRID_POINTS as f64 {
            return Err(format!("grid has more than {MAX_GRID_POINTS} points"));
        }
        let n = n as usize;
        let points = if n == 0 {
            vec![start]
        } else {
            (0..=n)
                .map(|j| start + span * j as f64 / n as f64)
                .collect()
        };
        Ok(PGrid {
            start,
            stop,
            step,
            points,
        })
    }
}

impl fmt::Display for PGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// An inclusive iteration range `first:last`, or a single iteration `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IRange {
    pub first: u32,
    pub last: u32,
}

impl IRange {
    pub fn single(i: u32) -> Self {
        IRange { first: i, last: i }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u32> {
        self.first..=self.last
    }
}

impl FromStr for IRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
        match s.split_once(':') {
            None => Ok(IRange::single(num(s)?)),
            Some((a, b)) => {
                let (first, last) = (num(a)?, num(b)?);
                if last < first {
                    return Err(format!("iteration range {s:?} is empty"));
                }
                Ok(IRange { first, last })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_are_exact() {
        let g: PGrid = "0:1:0.001".parse().unwrap();
        assert_eq!(g.points().len(), 1001);
        assert_eq!(g.points()[990], 0.99);
        assert_eq!(g.points()[850], 0.85);
        assert_eq!(*g.points().last().unwrap(), 1.0);
        let g: PGrid = "0.5:0.5:0.1".parse().unwrap();
        assert_eq!(g.points(), &[0.5]);
    }

    #[test]
    fn grid_rejects_bad_input() {
        for s in [
            "0:1",
            "0:1.5:0.1",
            "0.6:0.5:0.1",
            "0:1:0",
            "0:1:-1",
            "0:1:0.3",
            "a:1:0.1",
        ] {
            assert!(s.parse::<PGrid>().is_err(), "{s}");
        }
    }

    #[test]
    fn iteration_ranges() {
        assert_eq!("7".parse::<IRange>().unwrap(), IRange::single(7));
        let r: IRange = "2:40".parse().unwrap();
        assert_eq!(r.iter().count(), 39);
        assert!("5:3".parse::<IRange>().is_err());
        assert!("x".parse::<IRange>().is_err());
    }
}
