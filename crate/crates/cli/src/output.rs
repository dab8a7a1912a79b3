use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use fracstab::{PixelMap, Polyline};

use crate::CliError;

pub type Rgb = [u8; 3];

/// Formats a real with 17 significant digits, enough to round-trip any f64.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// An 8-bit RGB raster, row 0 on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        Self { width, height, pixels: vec![fill; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize) -> Rgb) -> Self {
        Self { width, height, pixels: (0..width * height).map(f).collect() }
    }

    pub fn set(&mut self, col: usize, row: usize, color: Rgb) {
        self.pixels[row * self.width + col] = color;
    }

    /// Paints every pixel the polyline passes through. Segments are walked in
    /// steps shorter than half a pixel.
    pub fn draw_polyline(&mut self, map: &PixelMap, line: &Polyline, color: Rgb) {
        let (px, py) = (map.window.width() / map.width as f64, map.window.height() / map.height as f64);
        for (a, b) in line.segments() {
            let d = b - a;
            let steps = (2.0 * (d.re.abs() / px).max(d.im.abs() / py)).ceil().max(1.0) as usize;
            for k in 0..=steps {
                let t = k as f64 / steps as f64;
                if let Some((col, row)) = map.locate(a + d * t) {
                    self.set(col, row, color);
                }
            }
        }
    }

    /// Binary PPM (P6) encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut bytes = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        bytes.reserve(3 * self.pixels.len());
        for p in &self.pixels {
            bytes.extend_from_slice(p);
        }
        bytes
    }
}

/// Rectangular CSV with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "CSV row width differs from header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }
}

/// A polyline as `theta,x,y` rows.
pub fn polyline_csv(line: &Polyline) -> CsvTable {
    let mut table = CsvTable::new(["theta", "x", "y"]);
    for (t, z) in line.parameters.iter().zip(&line.points) {
        table.push(vec![real(*t), real(z.re), real(z.im)]);
    }
    table
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.to_path_buf(), source }
}

/// Files produced by one command, written together once computation is done.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
    appends: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn file(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn append_line(&mut self, path: PathBuf, line: String) {
        self.appends.push((path, format!("{line}\n").into_bytes()));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().chain(&self.appends).map(|(p, _)| p.as_path())
    }

    pub fn write_all(self) -> Result<(), CliError> {
        for (path, _) in self.files.iter().chain(&self.appends) {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            }
        }
        for (path, bytes) in &self.files {
            fs::write(path, bytes).map_err(|e| io_error(path, e))?;
        }
        for (path, bytes) in &self.appends {
            let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| io_error(path, e))?;
            file.write_all(bytes).map_err(|e| io_error(path, e))?;
        }
        Ok(())
    }
}
