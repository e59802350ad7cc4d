//! The hypi-semimetric on grid functions.
//!
//! Two functions are close when the closures of their epigraphs and of their
//! hypographs are close as sets. Closures are taken through the grid hulls
//! and the set distance is the Hausdorff distance of the rasterised graphs,
//! truncated to a fixed window `T × [y_low, y_high]`, under the max metric.

mod extension;
mod transform;

pub use extension::{check_hypi_convergence, sc_extension, ConvergenceReport, ScExtension};
pub(crate) use extension::gradient_extension;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gridfn::{GridDomain, GridFunction};

/// How to evaluate the Hausdorff distance between two rasters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HausdorffBackend {
    /// Exhaustive search, `O(|A| |B|)`; the reference implementation.
    BruteForce,
    /// Exact separable Chebyshev distance maps.
    #[default]
    DistanceTransform,
}

impl std::str::FromStr for HausdorffBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" | "brute_force" => Ok(Self::BruteForce),
            "dt" | "distance_transform" => Ok(Self::DistanceTransform),
            other => Err(invalid("backend", format!("unknown backend `{other}`"))),
        }
    }
}

/// Everything needed to turn the hypi-semimetric into a number.
#[derive(Debug, Clone, PartialEq)]
pub struct HypiConfig {
    pub y_low: f64,
    pub y_high: f64,
    pub y_points: usize,
    pub hull_radius: usize,
    pub backend: HausdorffBackend,
}

impl HypiConfig {
    /// Window `[y_low, y_high]` with `y_points` levels, hull radius 1.
    pub fn new(y_low: f64, y_high: f64, y_points: usize) -> Result<Self> {
        let cfg = Self {
            y_low,
            y_high,
            y_points,
            hull_radius: 1,
            backend: HausdorffBackend::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.hull_radius = radius;
        self
    }

    pub fn with_backend(mut self, backend: HausdorffBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y_low.is_finite() && self.y_high.is_finite() && self.y_low < self.y_high) {
            return Err(invalid(
                "y_low/y_high",
                format!("need finite y_low < y_high, got [{}, {}]", self.y_low, self.y_high),
            ));
        }
        if self.y_points < 2 {
            return Err(invalid("y_points", "need at least 2 levels"));
        }
        Ok(())
    }

    /// Spacing of the y levels.
    pub fn y_spacing(&self) -> f64 {
        (self.y_high - self.y_low) / (self.y_points - 1) as f64
    }

    fn raster_domain(&self, base: &GridDomain) -> Result<GridDomain> {
        base.with_axis(self.y_low, self.y_high, self.y_points)
    }

    fn check_range(&self, f: &GridFunction) -> Result<()> {
        for &v in f.values() {
            if v < self.y_low || v > self.y_high {
                return Err(Error::OutsideWindow {
                    value: v,
                    low: self.y_low,
                    high: self.y_high,
                });
            }
        }
        Ok(())
    }
}

/// A subset of the raster `T × {y levels}`; the y axis is last.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterSet {
    domain: GridDomain,
    members: Vec<bool>,
}

impl RasterSet {
    pub fn new(domain: GridDomain, members: Vec<bool>) -> Result<Self> {
        if members.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: members.len(),
            });
        }
        Ok(Self { domain, members })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, idx: &[usize]) -> bool {
        self.members[self.domain.ravel(idx)]
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    /// Whether every member of `self` is a member of `other`.
    pub fn is_subset_of(&self, other: &RasterSet) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }
}

fn graph_raster(
    hull: &GridFunction,
    cfg: &HypiConfig,
    member: impl Fn(f64, f64) -> bool,
) -> Result<RasterSet> {
    let domain = cfg.raster_domain(hull.domain())?;
    let ys = domain.axis_coords(domain.dim() - 1);
    let mut members = Vec::with_capacity(domain.len());
    for &v in hull.values() {
        members.extend(ys.iter().map(|&y| member(v, y)));
    }
    RasterSet::new(domain, members)
}

/// Rasterised epigraph of the lower semicontinuous hull of `f`.
pub fn epigraph(f: &GridFunction, cfg: &HypiConfig) -> Result<RasterSet> {
    cfg.validate()?;
    cfg.check_range(f)?;
    // Slack of a tiny fraction of a level absorbs rounding in level coordinates.
    let tol = 1e-9 * cfg.y_spacing();
    graph_raster(&f.lsc_hull(cfg.hull_radius), cfg, |v, y| v <= y + tol)
}

/// Rasterised hypograph of the upper semicontinuous hull of `f`.
pub fn hypograph(f: &GridFunction, cfg: &HypiConfig) -> Result<RasterSet> {
    cfg.validate()?;
    cfg.check_range(f)?;
    let tol = 1e-9 * cfg.y_spacing();
    graph_raster(&f.usc_hull(cfg.hull_radius), cfg, |v, y| y <= v + tol)
}

fn max_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn directed_brute(a: &RasterSet, b: &RasterSet) -> f64 {
    let d = &a.domain;
    let b_points: Vec<Vec<f64>> = (0..d.len())
        .filter(|&k| b.members[k])
        .map(|k| d.point(k))
        .collect();
    (0..d.len())
        .into_par_iter()
        .filter(|&k| a.members[k] && !b.members[k])
        .map(|k| {
            let p = d.point(k);
            b_points
                .iter()
                .map(|q| max_distance(&p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

fn directed_transform(a: &RasterSet, b: &RasterSet) -> f64 {
    let dist = transform::chebyshev_distance_map(&b.domain, &b.members);
    dist.iter()
        .zip(&a.members)
        .filter(|(_, &m)| m)
        .map(|(&x, _)| x)
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two non-empty rasters on the same grid.
pub fn hausdorff_distance(a: &RasterSet, b: &RasterSet, backend: HausdorffBackend) -> Result<f64> {
    if !a.domain.same_grid(&b.domain) {
        return Err(Error::DomainMismatch);
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let directed = match backend {
        HausdorffBackend::BruteForce => directed_brute,
        HausdorffBackend::DistanceTransform => directed_transform,
    };
    let (ab, ba) = rayon::join(|| directed(a, b), || directed(b, a));
    Ok(ab.max(ba))
}

/// `max{ H(epi f_∧, epi g_∧), H(hypo f_∨, hypo g_∨) }` on the window of `cfg`.
pub fn hypi_distance(f: &GridFunction, g: &GridFunction, cfg: &HypiConfig) -> Result<f64> {
    if !f.domain().same_grid(g.domain()) {
        return Err(Error::DomainMismatch);
    }
    let (epi, hypo) = rayon::join(
        || -> Result<f64> {
            let (ef, eg) = (epigraph(f, cfg)?, epigraph(g, cfg)?);
            hausdorff_distance(&ef, &eg, cfg.backend)
        },
        || -> Result<f64> {
            let (hf, hg) = (hypograph(f, cfg)?, hypograph(g, cfg)?);
            hausdorff_distance(&hf, &hg, cfg.backend)
        },
    );
    Ok(epi?.max(hypo?))
}

#[cfg(test)]
mod tests;
