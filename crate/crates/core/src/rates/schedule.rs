use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of one schedule segment. Temperatures in Kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SegmentShape {
    Constant {
        kelvin: f64,
    },
    Linear {
        from_k: f64,
        to_k: f64,
    },
    /// Exponential approach from `from_k` toward `to_k` with time constant
    /// `tau_s`, rescaled so the segment ends exactly at `to_k`.
    ExponentialApproach {
        from_k: f64,
        to_k: f64,
        tau_s: f64,
    },
}

impl SegmentShape {
    fn start_value(&self) -> f64 {
        match *self {
            SegmentShape::Constant { kelvin } => kelvin,
            SegmentShape::Linear { from_k, .. } | SegmentShape::ExponentialApproach { from_k, .. } => from_k,
        }
    }

    fn end_value(&self) -> f64 {
        match *self {
            SegmentShape::Constant { kelvin } => kelvin,
            SegmentShape::Linear { to_k, .. } | SegmentShape::ExponentialApproach { to_k, .. } => to_k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start_s: f64,
    pub t_end_s: f64,
    #[serde(flatten)]
    pub shape: SegmentShape,
}

impl Segment {
    fn eval(&self, t: f64) -> f64 {
        let len = self.t_end_s - self.t_start_s;
        let frac = ((t - self.t_start_s) / len).clamp(0.0, 1.0);
        if frac >= 1.0 {
            return self.shape.end_value();
        }
        match self.shape {
            SegmentShape::Constant { kelvin } => kelvin,
            SegmentShape::Linear { from_k, to_k } => from_k + (to_k - from_k) * frac,
            SegmentShape::ExponentialApproach { from_k, to_k, tau_s } => {
                let num = -(-(t - self.t_start_s) / tau_s).exp_m1();
                let den = -(-len / tau_s).exp_m1();
                from_k + (to_k - from_k) * (num / den)
            }
        }
    }

    fn extrema(&self) -> (f64, f64) {
        let (a, b) = (self.shape.start_value(), self.shape.end_value());
        (a.min(b), a.max(b))
    }
}

/// Piecewise temperature path `T(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct TemperatureSchedule {
    segments: Vec<Segment>,
}

impl TemperatureSchedule {
    /// Segments must join without gaps and stay above 0 K.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::config("schedule", "at least one segment is required"));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.t_end_s > s.t_start_s) {
                return Err(Error::config(
                    format!("schedule[{i}]"),
                    format!("t_end_s {} must exceed t_start_s {}", s.t_end_s, s.t_start_s),
                ));
            }
            let (lo, _) = s.extrema();
            if !(lo > 0.0) || !lo.is_finite() {
                return Err(Error::config(format!("schedule[{i}]"), "temperatures must be positive and finite"));
            }
            if let SegmentShape::ExponentialApproach { tau_s, .. } = s.shape {
                if !(tau_s > 0.0) {
                    return Err(Error::config(format!("schedule[{i}].tau_s"), "must be positive"));
                }
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            if w[0].t_end_s != w[1].t_start_s {
                return Err(Error::config(format!("schedule[{}]", i + 1), "segments must be contiguous"));
            }
            if w[0].shape.end_value() != w[1].shape.start_value() {
                return Err(Error::config(
                    format!("schedule[{}]", i + 1),
                    format!("temperature jumps from {} K to {} K", w[0].shape.end_value(), w[1].shape.start_value()),
                ));
            }
        }
        Ok(Self { segments })
    }

    pub fn constant(kelvin: f64, t_end_s: f64) -> Result<Self> {
        Self::new(vec![Segment { t_start_s: 0.0, t_end_s, shape: SegmentShape::Constant { kelvin } }])
    }

    pub fn linear(from_k: f64, to_k: f64, t_end_s: f64) -> Result<Self> {
        Self::new(vec![Segment { t_start_s: 0.0, t_end_s, shape: SegmentShape::Linear { from_k, to_k } }])
    }

    /// Cooling from `from_k` to `to_k` by an exponential approach on
    /// `[0, cool_end_s]`, then held until `hold_until_s`.
    pub fn quench(from_k: f64, to_k: f64, tau_s: f64, cool_end_s: f64, hold_until_s: f64) -> Result<Self> {
        let mut segs = vec![Segment {
            t_start_s: 0.0,
            t_end_s: cool_end_s,
            shape: SegmentShape::ExponentialApproach { from_k, to_k, tau_s },
        }];
        if hold_until_s > cool_end_s {
            segs.push(Segment {
                t_start_s: cool_end_s,
                t_end_s: hold_until_s,
                shape: SegmentShape::Constant { kelvin: to_k },
            });
        }
        Self::new(segs)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn at(&self, t: f64) -> f64 {
        temperature_at(self, t)
    }

    /// Segment boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segments.iter().map(|s| s.t_start_s).collect();
        b.push(self.segments[self.segments.len() - 1].t_end_s);
        b
    }

    /// Time after which the temperature is constant.
    pub fn settle_time(&self) -> f64 {
        let mut t = self.segments[0].t_start_s;
        for s in &self.segments {
            if !matches!(s.shape, SegmentShape::Constant { .. }) {
                t = s.t_end_s;
            }
        }
        t
    }

    /// Lowest and highest temperature reached. Every shape is monotone
    /// within its segment, so endpoints suffice.
    pub fn range(&self) -> (f64, f64) {
        self.segments.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            let (a, b) = s.extrema();
            (lo.min(a), hi.max(b))
        })
    }
}

impl TryFrom<Vec<Segment>> for TemperatureSchedule {
    type Error = Error;
    fn try_from(v: Vec<Segment>) -> Result<Self> {
        TemperatureSchedule::new(v)
    }
}

impl From<TemperatureSchedule> for Vec<Segment> {
    fn from(s: TemperatureSchedule) -> Self {
        s.segments
    }
}

/// Piecewise evaluation; before the first segment the initial temperature is
/// held, after the last one the final temperature.
pub fn temperature_at(sched: &TemperatureSchedule, t: f64) -> f64 {
    let segs = &sched.segments;
    if t <= segs[0].t_start_s {
        return segs[0].shape.start_value();
    }
    for s in segs {
        if t < s.t_end_s {
            return s.eval(t);
        }
    }
    segs[segs.len() - 1].shape.end_value()
}
