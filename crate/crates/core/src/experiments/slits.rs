use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Normalization, Pattern, SpacetimePoint};
use crate::error::{Error, Result};
use crate::invariants::{invariant, ParticleParams, Trajectory};
use crate::probability::intensity;

/// Source, slit screen and detector screen, without the coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitGeometry {
    pub source: SpacetimePoint,
    pub slit_time: f64,
    pub slit_positions: Vec<f64>,
    pub screen_time: f64,
    pub screen_points: Vec<f64>,
    pub particle: ParticleParams,
}

impl SlitGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.source.t < self.slit_time && self.slit_time < self.screen_time) {
            return Err(Error::InvalidExperiment(format!(
                "times must satisfy source {} < slits {} < screen {}",
                self.source.t, self.slit_time, self.screen_time
            )));
        }
        if self.slit_positions.is_empty() {
            return Err(Error::InvalidExperiment("no slits".into()));
        }
        if self.screen_points.is_empty() {
            return Err(Error::InvalidExperiment("no screen points".into()));
        }
        let mut sorted = self.slit_positions.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidExperiment("slit positions must be distinct".into()));
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !finite(&self.slit_positions) || !finite(&self.screen_points) {
            return Err(Error::InvalidExperiment("non-finite coordinate".into()));
        }
        self.particle.validate()
    }

    pub fn with_kappa(self, kappa: f64) -> SlitExperiment {
        SlitExperiment {
            geometry: self,
            kappa,
        }
    }
}

/// A slit geometry plus the coupling; the JSON config of the `pattern`
/// command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitExperiment {
    #[serde(flatten)]
    pub geometry: SlitGeometry,
    pub kappa: f64,
}

impl SlitExperiment {
    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() {
            return Err(Error::NonFiniteKappa(self.kappa));
        }
        self.geometry.validate()
    }
}

/// Source to slit to screen point, one segment per leg.
pub fn slit_trajectory(geometry: &SlitGeometry, slit: f64, screen_x: f64) -> Result<Trajectory> {
    Trajectory::new(
        vec![geometry.source.t, geometry.slit_time, geometry.screen_time],
        vec![geometry.source.x, slit, screen_x],
    )
}

/// Invariants of every slit path, indexed `[screen point][slit]`.
pub fn path_invariants(geometry: &SlitGeometry) -> Result<Vec<Vec<f64>>> {
    geometry.validate()?;
    geometry
        .screen_points
        .par_iter()
        .enumerate()
        .map(|(point, &x)| {
            geometry
                .slit_positions
                .iter()
                .enumerate()
                .map(|(slit, &s)| {
                    let path = slit_trajectory(geometry, s, x)?;
                    invariant(&path, &geometry.particle).map_err(|e| match e {
                        Error::SuperluminalSegment { .. } => Error::SuperluminalLeg { slit, point, x },
                        other => other,
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        // first failing screen point in order, independent of scheduling
        .collect()
}

/// Unnormalized intensity `|sum_slits exp(i kappa phi)|^2` at each screen
/// point.
pub fn slit_pattern(exp: &SlitExperiment) -> Result<Pattern> {
    exp.validate()?;
    let phis = path_invariants(&exp.geometry)?;
    let intensities = phis.iter().map(|p| intensity(p, exp.kappa)).collect();
    Ok(Pattern {
        screen_points: exp.geometry.screen_points.clone(),
        intensities,
        normalization: Normalization::None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry(slits: Vec<f64>, screen: Vec<f64>) -> SlitGeometry {
        SlitGeometry {
            source: SpacetimePoint::new(0.0, 0.0),
            slit_time: 10.0,
            slit_positions: slits,
            screen_time: 20.0,
            screen_points: screen,
            particle: ParticleParams::relativistic(1.0).unwrap(),
        }
    }

    #[test]
    fn single_slit_is_flat() {
        let exp = geometry(vec![0.5], vec![-3.0, 0.0, 2.0]).with_kappa(4.0);
        let p = slit_pattern(&exp).unwrap();
        assert!(p.intensities.iter().all(|&i| (i - 1.0).abs() < 1e-15));
    }

    #[test]
    fn central_maximum() {
        let exp = geometry(vec![-1.0, 1.0], vec![0.0]).with_kappa(3.0);
        let p = slit_pattern(&exp).unwrap();
        assert!((p.intensities[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn superluminal_leg_reports_slit_and_point() {
        let exp = geometry(vec![0.0, 9.0], vec![0.0, 12.0]).with_kappa(1.0);
        assert_eq!(
            slit_pattern(&exp),
            Err(Error::SuperluminalLeg {
                slit: 0,
                point: 1,
                x: 12.0
            })
        );
    }

    #[test]
    fn geometry_validation() {
        let mut g = geometry(vec![0.0, 0.0], vec![0.0]);
        assert!(matches!(g.validate(), Err(Error::InvalidExperiment(_))));
        g.slit_positions = vec![0.0];
        g.slit_time = 25.0;
        assert!(matches!(g.validate(), Err(Error::InvalidExperiment(_))));
        g.slit_time = 10.0;
        g.screen_points.clear();
        assert!(matches!(g.validate(), Err(Error::InvalidExperiment(_))));
        let exp = geometry(vec![0.0], vec![0.0]).with_kappa(f64::INFINITY);
        assert!(exp.validate().is_err());
    }

    #[test]
    fn json_config_is_flat() {
        let exp = geometry(vec![-1.0, 1.0], vec![0.0]).with_kappa(2.5);
        let json = serde_json::to_value(&exp).unwrap();
        assert_eq!(json["kappa"], 2.5);
        assert_eq!(json["slit_time"], 10.0);
        assert_eq!(json["particle"]["mode"], "relativistic-proper-time");
        let back: SlitExperiment = serde_json::from_value(json).unwrap();
        assert_eq!(back, exp);
    }
}
