use std::fmt;
use std::str::FromStr;

/// Largest number of points a single sweep may produce.
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    V,
    Beta,
    N,
    Epsilon,
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "v" => Ok(SweepVariable::V),
            "beta" => Ok(SweepVariable::Beta),
            "n" => Ok(SweepVariable::N),
            "epsilon" | "eps" => Ok(SweepVariable::Epsilon),
            _ => Err(format!("unknown sweep variable {s:?} (expected v, beta, n or epsilon)")),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::V => "v",
            SweepVariable::Beta => "beta",
            SweepVariable::N => "n",
            SweepVariable::Epsilon => "epsilon",
        })
    }
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got {s:?}"));
        };
        let parse = |field: &str| {
            field
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("bad number {field:?} in range {s:?}"))
        };
        let range = Range {
            start: parse(start)?,
            stop: parse(stop)?,
            step: parse(step)?,
        };
        if range.start >= range.stop {
            return Err(format!("range {s:?} needs start < stop"));
        }
        if range.step <= 0.0 {
            return Err(format!("range {s:?} needs step > 0"));
        }
        if (range.stop - range.start) / range.step > MAX_POINTS as f64 {
            return Err(format!("range {s:?} has more than {MAX_POINTS} points"));
        }
        Ok(range)
    }
}

impl Range {
    /// Points are `start + i·step`, so they do not accumulate rounding.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// `variable=start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: Range,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| format!("expected variable=start:stop:step, got {s:?}"))?;
        Ok(SweepSpec {
            variable: name.trim().parse()?,
            range: range.parse()?,
        })
    }
}
