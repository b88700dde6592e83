//! Classification of 2D slices of C² by first entry into `L`.
//!
//! A pixel is `EnteredL(k)` when `F^k` of its center is the first orbit
//! point in `L`, `Overflowed(k)` when the orbit leaves `f64` range after `k`
//! finite steps without having entered, and `NotEntered` otherwise. The
//! entered pixels approximate `A = ⋃ F^{-n}(L)` within the step budget.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{in_l_with_threshold, L_THRESHOLD};
use crate::dynamics::{apply_f, PlanePoint};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PixelClass {
    EnteredL(usize),
    Overflowed(usize),
    NotEntered,
}

impl PixelClass {
    pub fn tag(&self) -> &'static str {
        match self {
            PixelClass::EnteredL(_) => "entered",
            PixelClass::Overflowed(_) => "overflowed",
            PixelClass::NotEntered => "not_entered",
        }
    }

    pub fn step(&self) -> Option<usize> {
        match *self {
            PixelClass::EnteredL(k) | PixelClass::Overflowed(k) => Some(k),
            PixelClass::NotEntered => None,
        }
    }
}

/// Membership rule used for "entered L": `sup_alpha > threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub threshold: f64,
}

impl Default for Membership {
    fn default() -> Self {
        Self {
            threshold: L_THRESHOLD,
        }
    }
}

impl Membership {
    pub fn new(threshold: f64) -> Result<Self> {
        if threshold > 0.0 && threshold.is_finite() {
            Ok(Self { threshold })
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha threshold must be positive, got {threshold}"
            )))
        }
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        in_l_with_threshold(p, self.threshold)
    }
}

/// Classify `p` using at most `budget` applications of `F`.
pub fn classify_point(p: PlanePoint, budget: usize) -> PixelClass {
    classify_point_with(p, budget, Membership::default())
}

pub fn classify_point_with(p: PlanePoint, budget: usize, membership: Membership) -> PixelClass {
    let mut state = p;
    for k in 0..=budget {
        if membership.contains(&state) {
            return PixelClass::EnteredL(k);
        }
        if k == budget {
            break;
        }
        match apply_f(state) {
            Ok(next) => state = next,
            Err(_) => return PixelClass::Overflowed(k),
        }
    }
    PixelClass::NotEntered
}

/// Affine 2D slice `base + u·dir_u + v·dir_v` of C².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub base: PlanePoint,
    pub dir_u: PlanePoint,
    pub dir_v: PlanePoint,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub width: usize,
    pub height: usize,
}

impl SliceSpec {
    /// The z-plane through `(0, w)`: `u = Re z`, `v = Im z`.
    pub fn z_plane(w: Complex64, extent: (f64, f64), width: usize, height: usize) -> Self {
        Self {
            base: PlanePoint::new(Complex64::new(0.0, 0.0), w),
            dir_u: PlanePoint::real(1.0, 0.0),
            dir_v: PlanePoint::new(Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)),
            u_range: extent,
            v_range: extent,
            width,
            height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let zero = Complex64::new(0.0, 0.0);
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.width == 0 || self.height == 0 {
            return bad("slice width and height must be at least 1");
        }
        if !(self.u_range.0 <= self.u_range.1) || !(self.v_range.0 <= self.v_range.1) {
            return bad("slice ranges must satisfy min <= max");
        }
        if [self.u_range.0, self.u_range.1, self.v_range.0, self.v_range.1]
            .iter()
            .any(|x| !x.is_finite())
        {
            return bad("slice ranges must be finite");
        }
        for d in [&self.dir_u, &self.dir_v] {
            if d.z == zero && d.w == zero {
                return bad("slice directions must be nonzero");
            }
        }
        if !self.base.is_finite() || !self.dir_u.is_finite() || !self.dir_v.is_finite() {
            return bad("slice coordinates must be finite");
        }
        Ok(())
    }

    /// Slice coordinates of the center of column `i`, row `j`.
    /// Row 0 is the top of the image (largest `v`).
    pub fn pixel_coords(&self, i: usize, j: usize) -> (f64, f64) {
        let du = (self.u_range.1 - self.u_range.0) / self.width as f64;
        let dv = (self.v_range.1 - self.v_range.0) / self.height as f64;
        let u = self.u_range.0 + (i as f64 + 0.5) * du;
        let v = self.v_range.1 - (j as f64 + 0.5) * dv;
        (u, v)
    }

    pub fn pixel_point(&self, i: usize, j: usize) -> PlanePoint {
        let (u, v) = self.pixel_coords(i, j);
        PlanePoint::new(
            self.base.z + u * self.dir_u.z + v * self.dir_v.z,
            self.base.w + u * self.dir_u.w + v * self.dir_v.w,
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassStats {
    pub entered: usize,
    pub overflowed: usize,
    pub not_entered: usize,
}

impl ClassStats {
    pub fn total(&self) -> usize {
        self.entered + self.overflowed + self.not_entered
    }

    fn add(&mut self, c: &PixelClass) {
        match c {
            PixelClass::EnteredL(_) => self.entered += 1,
            PixelClass::Overflowed(_) => self.overflowed += 1,
            PixelClass::NotEntered => self.not_entered += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasterResult {
    pub spec: SliceSpec,
    pub budget: usize,
    pub membership: Membership,
    /// Row-major, `width * height` entries.
    pub classes: Vec<PixelClass>,
    pub stats: ClassStats,
}

impl RasterResult {
    pub fn class_at(&self, i: usize, j: usize) -> PixelClass {
        self.classes[j * self.spec.width + i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub budget: usize,
    pub membership: Membership,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            membership: Membership::default(),
            workers: None,
        }
    }
}

pub fn render_slice(spec: &SliceSpec, budget: usize) -> Result<RasterResult> {
    render_slice_with(
        spec,
        &RenderOptions {
            budget,
            ..RenderOptions::default()
        },
    )
}

/// Classify every pixel center. Rows are distributed over workers and
/// written into disjoint segments of the grid, so the result does not
/// depend on the worker count.
pub fn render_slice_with(spec: &SliceSpec, opts: &RenderOptions) -> Result<RasterResult> {
    spec.validate()?;
    if opts.budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let mut classes = vec![PixelClass::NotEntered; spec.width * spec.height];
    let fill = |classes: &mut [PixelClass]| {
        classes
            .par_chunks_mut(spec.width)
            .enumerate()
            .for_each(|(j, row)| {
                for (i, cell) in row.iter_mut().enumerate() {
                    *cell = classify_point_with(spec.pixel_point(i, j), opts.budget, opts.membership);
                }
            });
    };
    match opts.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| fill(&mut classes));
        }
        None => fill(&mut classes),
    }
    let mut stats = ClassStats::default();
    classes.iter().for_each(|c| stats.add(c));
    Ok(RasterResult {
        spec: *spec,
        budget: opts.budget,
        membership: opts.membership,
        classes,
        stats,
    })
}

pub type Rgb = [u8; 3];

/// Colors per class. Step counts index the lists cyclically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaletteSpec {
    pub entered: Vec<Rgb>,
    pub overflowed: Vec<Rgb>,
    pub not_entered: Rgb,
}

impl Default for PaletteSpec {
    fn default() -> Self {
        let entered = vec![
            [255, 255, 255],
            [66, 30, 15],
            [25, 7, 26],
            [9, 1, 47],
            [4, 4, 73],
            [0, 7, 100],
            [12, 44, 138],
            [24, 82, 177],
            [57, 125, 209],
            [134, 181, 229],
            [211, 236, 248],
            [241, 233, 191],
            [248, 201, 95],
            [255, 170, 0],
            [204, 128, 0],
            [153, 87, 0],
        ];
        let overflowed = (0..16u8).map(|k| [255 - 12 * k, 0, 0]).collect();
        Self {
            entered,
            overflowed,
            not_entered: [0, 0, 0],
        }
    }
}

impl PaletteSpec {
    pub fn validate(&self) -> Result<()> {
        if self.entered.is_empty() || self.overflowed.is_empty() {
            return Err(Error::InvalidParameter(
                "palette color lists must be nonempty".into(),
            ));
        }
        Ok(())
    }

    pub fn color(&self, c: &PixelClass) -> Rgb {
        match *c {
            PixelClass::EnteredL(k) => self.entered[k % self.entered.len()],
            PixelClass::Overflowed(k) => self.overflowed[k % self.overflowed.len()],
            PixelClass::NotEntered => self.not_entered,
        }
    }
}

/// Binary P6 portable pixmap, rows top to bottom.
pub fn write_ppm(r: &RasterResult, palette: &PaletteSpec) -> Result<Vec<u8>> {
    palette.validate()?;
    let header = format!("P6\n{} {}\n255\n", r.spec.width, r.spec.height);
    let mut out = Vec::with_capacity(header.len() + 3 * r.classes.len());
    out.extend_from_slice(header.as_bytes());
    for c in &r.classes {
        out.extend_from_slice(&palette.color(c));
    }
    Ok(out)
}

pub const GRID_CSV_HEADER: &str = "i,j,re_z,im_z,re_w,im_w,tag,step";

/// One row per pixel with the pixel-center coordinates and class.
pub fn write_grid_csv(r: &RasterResult) -> Vec<u8> {
    let mut out = String::with_capacity(64 * (r.classes.len() + 1));
    out.push_str(GRID_CSV_HEADER);
    out.push('\n');
    for j in 0..r.spec.height {
        for i in 0..r.spec.width {
            let p = r.spec.pixel_point(i, j);
            let c = r.class_at(i, j);
            let step = c.step().map(|k| k.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{i},{j},{},{},{},{},{},{step}",
                p.z.re,
                p.z.im,
                p.w.re,
                p.w.im,
                c.tag()
            );
        }
    }
    out.into_bytes()
}

/// Parse the `(i, j, class)` triples back out of [`write_grid_csv`] output.
pub fn parse_grid_csv(text: &str) -> Result<Vec<(usize, usize, PixelClass)>> {
    let bad = |line: &str| Error::InvalidParameter(format!("malformed grid row: {line}"));
    let mut lines = text.lines();
    if lines.next() != Some(GRID_CSV_HEADER) {
        return Err(Error::InvalidParameter("missing grid header".into()));
    }
    lines
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(bad(line));
            }
            let i = fields[0].parse().map_err(|_| bad(line))?;
            let j = fields[1].parse().map_err(|_| bad(line))?;
            let step = || fields[7].parse::<usize>().map_err(|_| bad(line));
            let class = match fields[6] {
                "entered" => PixelClass::EnteredL(step()?),
                "overflowed" => PixelClass::Overflowed(step()?),
                "not_entered" if fields[7].is_empty() => PixelClass::NotEntered,
                _ => return Err(bad(line)),
            };
            Ok((i, j, class))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_pixel(class: PixelClass) -> RasterResult {
        let spec = SliceSpec {
            base: PlanePoint::real(2.0, 4.0),
            dir_u: PlanePoint::real(1.0, 0.0),
            dir_v: PlanePoint::real(0.0, 1.0),
            u_range: (0.0, 0.0),
            v_range: (0.0, 0.0),
            width: 1,
            height: 1,
        };
        let mut stats = ClassStats::default();
        stats.add(&class);
        RasterResult {
            spec,
            budget: 1,
            membership: Membership::default(),
            classes: vec![class],
            stats,
        }
    }

    #[test]
    fn classify_seed_in_l() {
        assert_eq!(classify_point(PlanePoint::real(2.0, 4.0), 1), PixelClass::EnteredL(0));
    }

    #[test]
    fn classify_immediate_overflow() {
        let p = PlanePoint::real(-360.0, -360.0);
        assert_eq!(classify_point(p, 1), PixelClass::Overflowed(0));
    }

    #[test]
    fn lowered_threshold_accepts_more() {
        let p = PlanePoint::real(2.0, 2.5);
        assert_ne!(classify_point(p, 0), PixelClass::EnteredL(0));
        let m = Membership::new(0.25).unwrap();
        assert_eq!(classify_point_with(p, 0, m), PixelClass::EnteredL(0));
        assert!(Membership::new(0.0).is_err());
    }

    #[test]
    fn slice_validation() {
        let mut s = SliceSpec::z_plane(Complex64::new(4.0, 0.0), (-1.0, 1.0), 4, 4);
        assert!(s.validate().is_ok());
        s.width = 0;
        assert!(s.validate().is_err());
        let mut s = SliceSpec::z_plane(Complex64::new(4.0, 0.0), (1.0, -1.0), 4, 4);
        assert!(s.validate().is_err());
        s.u_range = (-1.0, 1.0);
        s.v_range = (-1.0, 1.0);
        s.dir_v = PlanePoint::real(0.0, 0.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn ppm_single_white_pixel() {
        let r = single_pixel(PixelClass::EnteredL(0));
        let palette = PaletteSpec {
            entered: vec![[255, 255, 255]],
            overflowed: vec![[255, 0, 0]],
            not_entered: [0, 0, 0],
        };
        let bytes = write_ppm(&r, &palette).unwrap();
        let mut expect = b"P6\n1 1\n255\n".to_vec();
        expect.extend_from_slice(&[0xFF, 0xFF, 0xFF]);
        assert_eq!(bytes, expect);
    }

    #[test]
    fn ppm_rejects_empty_palette() {
        let r = single_pixel(PixelClass::NotEntered);
        let palette = PaletteSpec {
            entered: vec![],
            overflowed: vec![[1, 2, 3]],
            not_entered: [0, 0, 0],
        };
        assert!(write_ppm(&r, &palette).is_err());
    }

    #[test]
    fn ppm_two_pixels_in_order() {
        let mut r = single_pixel(PixelClass::EnteredL(1));
        r.spec.width = 2;
        r.classes.push(PixelClass::NotEntered);
        let palette = PaletteSpec {
            entered: vec![[1, 2, 3], [4, 5, 6]],
            overflowed: vec![[7, 8, 9]],
            not_entered: [10, 11, 12],
        };
        let bytes = write_ppm(&r, &palette).unwrap();
        let header = b"P6\n2 1\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[4, 5, 6, 10, 11, 12]);
    }

    #[test]
    fn csv_single_pixel() {
        let r = single_pixel(PixelClass::EnteredL(0));
        let text = String::from_utf8(write_grid_csv(&r)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec![GRID_CSV_HEADER, "0,0,2,0,4,0,entered,0"]);
        let r = single_pixel(PixelClass::NotEntered);
        let text = String::from_utf8(write_grid_csv(&r)).unwrap();
        assert!(text.ends_with(",not_entered,\n"));
        assert_eq!(parse_grid_csv(&text).unwrap(), vec![(0, 0, PixelClass::NotEntered)]);
    }

    #[test]
    fn default_palette_is_valid() {
        let p = PaletteSpec::default();
        assert!(p.validate().is_ok());
        assert_eq!(p.entered.len(), 16);
        assert_eq!(p.color(&PixelClass::NotEntered), [0, 0, 0]);
        assert_eq!(p.color(&PixelClass::EnteredL(16)), p.entered[0]);
    }
}
