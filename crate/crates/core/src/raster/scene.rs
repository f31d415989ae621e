use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::raster::{DisparityMap, Grid};
use crate::Scalar;

/// Synthetic scene families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SceneKind {
    /// Constant ellipse on a flat background.
    Ellipse,
    /// Triangle overlapping an ellipse on a flat background.
    TriangleEllipse,
    /// Several slanted planar objects over a slanted background plane.
    PiecewisePlanar,
}

impl SceneKind {
    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Ellipse => "ellipse",
            SceneKind::TriangleEllipse => "triangle-ellipse",
            SceneKind::PiecewisePlanar => "piecewise-planar",
        }
    }
}

impl FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ellipse" => Ok(SceneKind::Ellipse),
            "triangle-ellipse" | "triangle_ellipse" => Ok(SceneKind::TriangleEllipse),
            "piecewise-planar" | "piecewise_planar" | "planar" => Ok(SceneKind::PiecewisePlanar),
            other => Err(Error::Parameter(format!("unknown scene kind '{other}'"))),
        }
    }
}

/// Region test plus an affine depth model `d0 + gx * (x - cx) + gy * (y - cy)`.
/// Coordinates are normalized to `[0, 1]` along each axis.
#[derive(Clone, Debug)]
struct Shape {
    region: Region,
    d0: f64,
    gx: f64,
    gy: f64,
    cx: f64,
    cy: f64,
}

#[derive(Clone, Debug)]
enum Region {
    Ellipse { cx: f64, cy: f64, a: f64, b: f64, theta: f64 },
    Polygon(Vec<(f64, f64)>),
}

impl Region {
    fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Region::Ellipse { cx, cy, a, b, theta } => {
                let (s, c) = theta.sin_cos();
                let (dx, dy) = (x - cx, y - cy);
                let u = c * dx + s * dy;
                let v = -s * dx + c * dy;
                (u / a).powi(2) + (v / b).powi(2) <= 1.0
            }
            Region::Polygon(pts) => {
                // Even-odd ray casting.
                let mut inside = false;
                let n = pts.len();
                for k in 0..n {
                    let (x1, y1) = pts[k];
                    let (x2, y2) = pts[(k + 1) % n];
                    if (y1 > y) != (y2 > y) && x < x1 + (y - y1) * (x2 - x1) / (y2 - y1) {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }
}

impl Shape {
    fn flat(region: Region, d0: f64) -> Self {
        Self { region, d0, gx: 0.0, gy: 0.0, cx: 0.0, cy: 0.0 }
    }

    fn depth(&self, x: f64, y: f64) -> f64 {
        self.d0 + self.gx * (x - self.cx) + self.gy * (y - self.cy)
    }
}

/// Generates a deterministic synthetic disparity map with hard edges.
pub fn synth_scene<T: Scalar>(kind: SceneKind, width: usize, height: usize, seed: u64) -> Result<DisparityMap<T>> {
    if width < 32 || height < 32 {
        return Err(Error::Parameter(format!("synthetic scenes need at least 32x32, got {width}x{height}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (background, shapes) = match kind {
        SceneKind::Ellipse => ellipse_scene(&mut rng),
        SceneKind::TriangleEllipse => triangle_ellipse_scene(&mut rng),
        SceneKind::PiecewisePlanar => planar_scene(&mut rng),
    };
    let grid = Grid::from_fn(height, width, |i, j| {
        let x = (j as f64 + 0.5) / width as f64;
        let y = (i as f64 + 0.5) / height as f64;
        // Later shapes occlude earlier ones.
        let d = shapes
            .iter()
            .rev()
            .find(|s| s.region.contains(x, y))
            .map_or_else(|| background.depth(x, y), |s| s.depth(x, y));
        T::lit(d.clamp(0.0, 1.0))
    });
    DisparityMap::from_grid(grid)
}

fn ellipse_scene(rng: &mut ChaCha20Rng) -> (Shape, Vec<Shape>) {
    let region = Region::Ellipse {
        cx: rng.random_range(0.45..0.55),
        cy: rng.random_range(0.45..0.55),
        a: rng.random_range(0.25..0.35),
        b: rng.random_range(0.18..0.26),
        theta: rng.random_range(0.0..std::f64::consts::PI),
    };
    (Shape::flat(Region::Polygon(Vec::new()), 0.3), vec![Shape::flat(region, 0.65)])
}

fn triangle_ellipse_scene(rng: &mut ChaCha20Rng) -> (Shape, Vec<Shape>) {
    let ellipse = Region::Ellipse {
        cx: rng.random_range(0.36..0.42),
        cy: rng.random_range(0.45..0.55),
        a: rng.random_range(0.22..0.27),
        b: rng.random_range(0.16..0.2),
        theta: rng.random_range(-0.5..0.5),
    };
    let jitter = |rng: &mut ChaCha20Rng, x: f64, y: f64| (x + rng.random_range(-0.04..0.04), y + rng.random_range(-0.04..0.04));
    let tri = Region::Polygon(vec![jitter(rng, 0.5, 0.2), jitter(rng, 0.85, 0.78), jitter(rng, 0.38, 0.72)]);
    (
        Shape::flat(Region::Polygon(Vec::new()), 0.4),
        vec![Shape::flat(ellipse, 0.5), Shape::flat(tri, 0.6)],
    )
}

fn planar_scene(rng: &mut ChaCha20Rng) -> (Shape, Vec<Shape>) {
    let background = Shape {
        region: Region::Polygon(Vec::new()),
        d0: 0.22,
        gx: rng.random_range(-0.05..0.05),
        gy: rng.random_range(0.08..0.14),
        cx: 0.5,
        cy: 0.5,
    };
    let mut shapes = Vec::new();
    // Ellipses standing in for heads and bodies, polygons for boxes; nearer objects drawn last.
    let layouts = [(0.22, 0.35), (0.55, 0.3), (0.8, 0.45), (0.35, 0.7), (0.68, 0.72)];
    let mut depths: Vec<f64> = (0..layouts.len()).map(|_| rng.random_range(0.35..0.9)).collect();
    depths.sort_by(f64::total_cmp);
    for (k, (&(cx, cy), &d0)) in layouts.iter().zip(&depths).enumerate() {
        let cx = cx + rng.random_range(-0.04..0.04);
        let cy = cy + rng.random_range(-0.04..0.04);
        let region = if k % 2 == 0 {
            Region::Ellipse {
                cx,
                cy,
                a: rng.random_range(0.09..0.16),
                b: rng.random_range(0.1..0.2),
                theta: rng.random_range(-0.6..0.6),
            }
        } else {
            let w = rng.random_range(0.08..0.14);
            let h = rng.random_range(0.08..0.16);
            let skew = rng.random_range(-0.04..0.04);
            Region::Polygon(vec![
                (cx - w + skew, cy - h),
                (cx + w + skew, cy - h),
                (cx + w - skew, cy + h),
                (cx - w - skew, cy + h),
            ])
        };
        shapes.push(Shape {
            region,
            d0,
            gx: rng.random_range(-0.15..0.15),
            gy: rng.random_range(-0.15..0.15),
            cx,
            cy,
        });
    }
    (background, shapes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn distinct(m: &DisparityMap<f64>) -> usize {
        let mut v: Vec<u64> = m.as_slice().iter().map(|x| x.to_bits()).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    #[test]
    fn ellipse_has_two_values() {
        for seed in 0..5 {
            let m = synth_scene::<f64>(SceneKind::Ellipse, 64, 48, seed).unwrap();
            assert_eq!(distinct(&m), 2);
        }
    }

    #[test]
    fn triangle_ellipse_has_three_plateaus() {
        for seed in 0..5 {
            let m = synth_scene::<f64>(SceneKind::TriangleEllipse, 64, 64, seed).unwrap();
            assert!(distinct(&m) >= 3);
        }
    }

    #[test]
    fn deterministic_and_in_range() {
        for kind in [SceneKind::Ellipse, SceneKind::TriangleEllipse, SceneKind::PiecewisePlanar] {
            let a = synth_scene::<f64>(kind, 40, 36, 17).unwrap();
            assert_eq!(a, synth_scene::<f64>(kind, 40, 36, 17).unwrap());
            assert!(a.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn rejects_small_sizes() {
        assert!(synth_scene::<f64>(SceneKind::Ellipse, 31, 64, 0).is_err());
    }
}
