use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Named response-strategy families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProfileKind {
    /// Responses affine in the commenter's alignment with the group.
    Linear,
    /// Replies and antipathies peak for mildly aligned commenters.
    InvertedU,
    /// Responses independent of the commenter.
    Flat,
    Custom,
}

/// A piecewise-linear function on `[-1, 1]` with outputs in `[0, 1]`.
///
/// The argument is the commenter's *aligned* leaning `g * x`, where `g` is the
/// medium group's sign, so one shape serves both groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    points: Vec<(f64, f64)>,
}

impl Shape {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfig(
                "a shape needs at least two breakpoints".into(),
            ));
        }
        if points.first().unwrap().0 != -1.0 || points.last().unwrap().0 != 1.0 {
            return Err(Error::InvalidConfig("shape breakpoints must span [-1, 1]".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidConfig(
                "shape breakpoints must be strictly increasing".into(),
            ));
        }
        if points.iter().any(|p| !(0.0..=1.0).contains(&p.1)) {
            return Err(Error::InvalidConfig("shape values must lie in [0, 1]".into()));
        }
        Ok(Shape { points })
    }

    fn sampled(f: impl Fn(f64) -> f64) -> Self {
        const N: usize = 80;
        let points = (0..=N)
            .map(|i| {
                let u = -1.0 + 2.0 * i as f64 / N as f64;
                (u, f(u).clamp(0.0, 1.0))
            })
            .collect();
        Shape { points }
    }

    pub fn constant(v: f64) -> Self {
        Shape {
            points: vec![(-1.0, v), (1.0, v)],
        }
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(-1.0, 1.0);
        let i = self.points.partition_point(|p| p.0 <= u);
        if i == 0 {
            return self.points[0].1;
        }
        if i == self.points.len() {
            return self.points[i - 1].1;
        }
        let (x0, y0) = self.points[i - 1];
        let (x1, y1) = self.points[i];
        y0 + (y1 - y0) * (u - x0) / (x1 - x0)
    }
}

/// Relative response intensities for one comment, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseShape {
    pub replies: f64,
    pub sympathies: f64,
    pub antipathies: f64,
}

impl ResponseShape {
    pub fn average(a: ResponseShape, b: ResponseShape) -> ResponseShape {
        ResponseShape {
            replies: (a.replies + b.replies) / 2.0,
            sympathies: (a.sympathies + b.sympathies) / 2.0,
            antipathies: (a.antipathies + b.antipathies) / 2.0,
        }
    }
}

/// How a media group's readers respond to commenters across the leaning axis.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub kind: ProfileKind,
    pub reply: Shape,
    pub sympathy: Shape,
    pub antipathy: Shape,
}

/// Center of the reply/antipathy bump on the aligned axis.
const BUMP_CENTER: f64 = 0.3;
const BUMP_WIDTH: f64 = 0.35;
/// Baseline under the bump, so strongly opposed commenters still draw some
/// antipathy.
const BUMP_FLOOR: f64 = 0.3;
const DIP_CENTER: f64 = 0.5;
const DIP_WIDTH: f64 = 0.15;
const DIP_DEPTH: f64 = 0.3;

fn gaussian(u: f64, center: f64, width: f64) -> f64 {
    let z = (u - center) / width;
    (-0.5 * z * z).exp()
}

impl StrategyProfile {
    pub fn of_kind(kind: ProfileKind) -> Result<Self> {
        match kind {
            ProfileKind::Linear => Ok(Self::linear()),
            ProfileKind::InvertedU => Ok(Self::inverted_u()),
            ProfileKind::Flat => Ok(Self::flat()),
            ProfileKind::Custom => Err(Error::InvalidConfig(
                "custom profiles must be supplied programmatically".into(),
            )),
        }
    }

    /// Sympathy `(1 + u) / 2`; replies and antipathies `(1 - u) / 2`.
    pub fn linear() -> Self {
        let rising = Shape {
            points: vec![(-1.0, 0.0), (1.0, 1.0)],
        };
        let falling = Shape {
            points: vec![(-1.0, 1.0), (1.0, 0.0)],
        };
        StrategyProfile {
            kind: ProfileKind::Linear,
            reply: falling.clone(),
            sympathy: rising,
            antipathy: falling,
        }
    }

    /// Replies and antipathies follow a floored Gaussian bump centred on
    /// mildly aligned commenters; sympathy rises with alignment with a mild
    /// dip among moderately aligned commenters.
    pub fn inverted_u() -> Self {
        let bump = Shape::sampled(|u| BUMP_FLOOR + (1.0 - BUMP_FLOOR) * gaussian(u, BUMP_CENTER, BUMP_WIDTH));
        let sympathy =
            Shape::sampled(|u| (1.0 + u) / 2.0 * (1.0 - DIP_DEPTH * gaussian(u, DIP_CENTER, DIP_WIDTH)));
        StrategyProfile {
            kind: ProfileKind::InvertedU,
            reply: bump.clone(),
            sympathy,
            antipathy: bump,
        }
    }

    pub fn flat() -> Self {
        StrategyProfile {
            kind: ProfileKind::Flat,
            reply: Shape::constant(0.5),
            sympathy: Shape::constant(0.5),
            antipathy: Shape::constant(0.5),
        }
    }

    pub fn custom(reply: Shape, sympathy: Shape, antipathy: Shape) -> Self {
        StrategyProfile {
            kind: ProfileKind::Custom,
            reply,
            sympathy,
            antipathy,
        }
    }

    /// Shapes at aligned leaning `u = g * x`.
    pub fn eval_aligned(&self, u: f64) -> ResponseShape {
        ResponseShape {
            replies: self.reply.eval(u),
            sympathies: self.sympathy.eval(u),
            antipathies: self.antipathy.eval(u),
        }
    }

    /// Shapes for commenter leaning `x` on a medium of group sign `g`.
    pub fn eval(&self, x: f64, g: f64) -> ResponseShape {
        self.eval_aligned(g * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_profile_values() {
        let p = StrategyProfile::linear();
        let r = p.eval(0.5, 1.0);
        assert!((r.sympathies - 0.75).abs() < 1e-15);
        assert!((r.antipathies - 0.25).abs() < 1e-15);
        let flipped = p.eval(0.5, -1.0);
        assert!((flipped.sympathies - 0.25).abs() < 1e-15);
    }

    #[test]
    fn inverted_u_peaks_near_center() {
        let p = StrategyProfile::inverted_u();
        let peak = (0..=200)
            .map(|i| -1.0 + i as f64 / 100.0)
            .max_by(|a, b| p.reply.eval(*a).total_cmp(&p.reply.eval(*b)))
            .unwrap();
        assert!((peak - BUMP_CENTER).abs() <= 0.03, "peak at {peak}");
        // for the negative group this is x = -0.3
        assert!(p.eval(-0.3, -1.0).replies > p.eval(0.8, -1.0).replies);
    }

    #[test]
    fn shapes_stay_in_unit_interval() {
        for p in [
            StrategyProfile::linear(),
            StrategyProfile::inverted_u(),
            StrategyProfile::flat(),
        ] {
            for i in 0..=400 {
                let u = -1.0 + i as f64 / 200.0;
                let r = p.eval_aligned(u);
                for v in [r.replies, r.sympathies, r.antipathies] {
                    assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(Shape::new(vec![(-1.0, 0.0), (0.5, 1.0)]).is_err());
        assert!(Shape::new(vec![(-1.0, 0.0), (1.0, 1.5)]).is_err());
        assert!(Shape::new(vec![(-1.0, 0.0), (0.0, 0.5), (0.0, 0.6), (1.0, 1.0)]).is_err());
        assert_eq!(Shape::new(vec![(-1.0, 0.0), (1.0, 1.0)]).unwrap().eval(0.0), 0.5);
    }
}
