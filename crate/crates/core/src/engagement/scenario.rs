use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Angles, EngagementState};
use crate::error::{Error, Result};

/// A scalar that is either fixed or drawn uniformly per engagement.
///
/// Written as a bare number or as `{ low = .., high = .. }`; bounds given in
/// descending order are swapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Fixed(f64),
    Uniform { low: f64, high: f64 },
}

impl Param {
    pub fn uniform(a: f64, b: f64) -> Self {
        Self::Uniform { low: a, high: b }.normalized()
    }

    pub fn normalized(self) -> Self {
        match self {
            Self::Uniform { low, high } if low > high => Self::Uniform { low: high, high: low },
            p => p,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self.normalized() {
            Self::Fixed(v) => v,
            Self::Uniform { low, high } if low == high => low,
            Self::Uniform { low, high } => rng.gen_range(low..high),
        }
    }

    /// Midpoint of the range.
    pub fn nominal(&self) -> f64 {
        match *self {
            Self::Fixed(v) => v,
            Self::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            Self::Fixed(v) => v.is_finite(),
            Self::Uniform { low, high } => low.is_finite() && high.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("`{name}` must be finite")))
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Self::Fixed(v)
    }
}

/// Initial engagement geometry, each entry possibly randomized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub range: Param,
    pub los_elevation: Param,
    pub los_azimuth: Param,
    pub interceptor_elevation: Param,
    pub interceptor_azimuth: Param,
    pub interceptor_speed: Param,
    pub target_elevation: Param,
    pub target_azimuth: Param,
    pub target_speed: Param,
}

impl InitialSpec {
    pub fn case1() -> Self {
        Self {
            range: 4000.0.into(),
            los_elevation: (-0.7).into(),
            los_azimuth: 0.65.into(),
            interceptor_elevation: (-0.36).into(),
            interceptor_azimuth: (-0.2).into(),
            interceptor_speed: 800.0.into(),
            target_elevation: (-0.32).into(),
            target_azimuth: (-0.22).into(),
            target_speed: 270.0.into(),
        }
    }

    pub fn case2() -> Self {
        Self {
            los_azimuth: 0.9.into(),
            interceptor_elevation: (-0.1).into(),
            interceptor_azimuth: (-0.07).into(),
            target_elevation: 0.592.into(),
            target_azimuth: (-0.706).into(),
            ..Self::case1()
        }
    }

    pub fn monte_carlo() -> Self {
        Self {
            range: 3800.0.into(),
            los_elevation: Param::uniform(-0.7, -0.9),
            los_azimuth: Param::uniform(0.5, 0.7),
            interceptor_elevation: Param::uniform(-PI / 9.0, PI / 9.0),
            interceptor_azimuth: Param::uniform(-PI / 9.0, PI / 9.0),
            interceptor_speed: 800.0.into(),
            target_elevation: 0.0.into(),
            target_azimuth: 0.0.into(),
            target_speed: 270.0.into(),
        }
    }

    fn fields(&self) -> [(&'static str, &Param); 9] {
        [
            ("range", &self.range),
            ("los_elevation", &self.los_elevation),
            ("los_azimuth", &self.los_azimuth),
            ("interceptor_elevation", &self.interceptor_elevation),
            ("interceptor_azimuth", &self.interceptor_azimuth),
            ("interceptor_speed", &self.interceptor_speed),
            ("target_elevation", &self.target_elevation),
            ("target_azimuth", &self.target_azimuth),
            ("target_speed", &self.target_speed),
        ]
    }

    pub fn normalized(mut self) -> Self {
        for p in [
            &mut self.range,
            &mut self.los_elevation,
            &mut self.los_azimuth,
            &mut self.interceptor_elevation,
            &mut self.interceptor_azimuth,
            &mut self.interceptor_speed,
            &mut self.target_elevation,
            &mut self.target_azimuth,
            &mut self.target_speed,
        ] {
            *p = p.normalized();
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in self.fields() {
            p.validate(name)?;
        }
        let positive = |name: &str, p: &Param| {
            let lo = match p.normalized() {
                Param::Fixed(v) => v,
                Param::Uniform { low, .. } => low,
            };
            if lo > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("`{name}` must be positive")))
            }
        };
        positive("range", &self.range)?;
        positive("interceptor_speed", &self.interceptor_speed)?;
        positive("target_speed", &self.target_speed)
    }

    /// Draws every field in declaration order.
    pub fn sample(&self, rng: &mut impl Rng) -> EngagementState {
        let mut v = self.fields().map(|(_, p)| p.sample(rng)).into_iter();
        let mut next = || v.next().unwrap_or_default();
        let range = next();
        let los = Angles::new(next(), next());
        let interceptor = Angles::new(next(), next());
        let interceptor_speed = next();
        let target = Angles::new(next(), next());
        EngagementState {
            range,
            los,
            interceptor,
            target,
            interceptor_speed,
            target_speed: next(),
            time: 0.0,
        }
    }
}
