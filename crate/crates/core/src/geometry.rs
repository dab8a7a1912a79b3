//! Planar helpers shared by the stability and fractal modules: rectangular
//! windows, sampled polylines, even-odd point-in-polygon and shoelace area.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Axis-aligned rectangle in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidArgument(format!(
                "window [{x_min}, {x_max}] x [{y_min}, {y_max}] is empty or not finite"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    /// Square window `[-half, half]²`.
    pub fn centered_square(half: f64) -> Result<Self> {
        Self::new(-half, half, -half, half)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains_disk(&self, radius: f64) -> bool {
        self.x_min <= -radius && self.x_max >= radius && self.y_min <= -radius && self.y_max >= radius
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x_min, self.x_max, self.y_min, self.y_max]
    }
}

/// Maps a `width × height` pixel lattice onto a [`Window`].
///
/// Row 0 is the top edge (`y_max`); samples sit at cell centers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelMap {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    dx: f64,
    dy: f64,
}

impl PixelMap {
    pub fn new(window: Window, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!("raster size {width}x{height} must be at least 1x1")));
        }
        Ok(Self { window, width, height, dx: window.width() / width as f64, dy: window.height() / height as f64 })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn center(&self, col: usize, row: usize) -> Complex64 {
        // Bottom half measured from y_min so that rows of a window symmetric
        // about the real axis are exact negations of each other.
        let y = if 2 * row < self.height {
            self.window.y_max - (row as f64 + 0.5) * self.dy
        } else {
            self.window.y_min + ((self.height - row) as f64 - 0.5) * self.dy
        };
        Complex64::new(self.window.x_min + (col as f64 + 0.5) * self.dx, y)
    }

    /// Center of the pixel with flat (row-major) index `idx`.
    pub fn center_of(&self, idx: usize) -> Complex64 {
        self.center(idx % self.width, idx / self.width)
    }

    /// Pixel containing `z`, or `None` outside the window.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = (z.re - self.window.x_min) / self.dx;
        let fy = (self.window.y_max - z.im) / self.dy;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (col, row) = (fx.floor() as usize, fy.floor() as usize);
        (col < self.width && row < self.height).then_some((col, row))
    }
}

/// An ordered sample of a parametric curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Complex64>,
    pub parameters: Vec<f64>,
    pub closed: bool,
}

impl Polyline {
    /// Samples `curve` at `samples` uniformly spaced parameters on `[start, end]`.
    pub fn sample<F>(start: f64, end: f64, samples: usize, closed: bool, curve: F) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        debug_assert!(samples >= 2 && start < end);
        let step = (end - start) / (samples - 1) as f64;
        let parameters: Vec<f64> =
            (0..samples).map(|i| if i + 1 == samples { end } else { start + i as f64 * step }).collect();
        let points = parameters.iter().map(|&t| curve(t)).collect();
        Self { points, parameters, closed }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Edges of the polyline, including the closing edge when `closed`.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n.saturating_sub(1) };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    /// Signed shoelace area of the closed polygon through the samples.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        let mut twice = 0.0;
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            twice += a.re * b.im - a.im * b.re;
        }
        0.5 * twice
    }

    /// Area centroid of the closed polygon. Falls back to the vertex mean for
    /// degenerate (zero-area) input.
    pub fn centroid(&self) -> Complex64 {
        let n = self.points.len();
        let (mut cx, mut cy, mut twice) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            let cross = a.re * b.im - b.re * a.im;
            twice += cross;
            cx += (a.re + b.re) * cross;
            cy += (a.im + b.im) * cross;
        }
        if twice.abs() < f64::EPSILON {
            let sum: Complex64 = self.points.iter().sum();
            return sum / n as f64;
        }
        Complex64::new(cx / (3.0 * twice), cy / (3.0 * twice))
    }

    /// Even-odd ray-casting test against the closed polygon.
    pub fn contains(&self, p: Complex64) -> bool {
        let n = self.points.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[j]);
            if (a.im > p.im) != (b.im > p.im) {
                let x_cross = (b.re - a.re) * (p.im - a.im) / (b.im - a.im) + a.re;
                if p.re < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}
