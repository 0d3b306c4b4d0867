//! Feature vectors for points and regions.
//!
//! Point descriptors are `(x, y)` or `(x, y, phi)` with `phi` the Sobel
//! gradient orientation of an underlying image. Region descriptors are
//! `(centroid_x, centroid_y, area, diameter, edge_count)`.

mod gradient;

use thiserror::Error;

use crate::geom::{BoundingBox, ConvexPolygon, Point2};

pub use gradient::{fold_angle, gradient_magnitude, gradient_orientation, sobel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DescriptorError {
    #[error("point {0} maps outside the image")]
    OutOfImageBounds(Point2),
    #[error("pixel ({px}, {py}) has no full 3x3 neighbourhood in a {width}x{height} image")]
    StencilOutOfBounds {
        px: usize,
        py: usize,
        width: usize,
        height: usize,
    },
    #[error("polygon with {0} vertices is too degenerate to describe")]
    DegeneratePolygon(usize),
    #[error("image of {width}x{height} needs {expected} pixels, got {got}")]
    PixelCount {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
}

/// How an entry of a feature vector is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Real value, relative tolerance.
    Scalar,
    /// Orientation in `[0, pi)`, compared on the circle.
    Angle,
    /// Integer count, absolute tolerance.
    Count,
}

/// Ordered named features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    schema: Vec<&'static str>,
    kinds: Vec<FeatureKind>,
}

impl FeatureVector {
    pub fn new(entries: impl IntoIterator<Item = (&'static str, FeatureKind, f64)>) -> Self {
        let mut v = Self {
            values: Vec::new(),
            schema: Vec::new(),
            kinds: Vec::new(),
        };
        for (name, kind, value) in entries {
            v.schema.push(name);
            v.kinds.push(kind);
            v.values.push(if kind == FeatureKind::Angle {
                fold_angle(value)
            } else {
                value
            });
        }
        v
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn schema(&self) -> &[&'static str] {
        &self.schema
    }

    pub fn kinds(&self) -> &[FeatureKind] {
        &self.kinds
    }

    pub fn angular_mask(&self) -> Vec<bool> {
        self.kinds
            .iter()
            .map(|&k| k == FeatureKind::Angle)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.schema
            .iter()
            .position(|&s| s == name)
            .map(|i| self.values[i])
    }

    /// Copy without the named entries.
    pub fn without(&self, names: &[&str]) -> Self {
        Self::new(
            (0..self.len())
                .filter(|&i| !names.contains(&self.schema[i]))
                .map(|i| (self.schema[i], self.kinds[i], self.values[i])),
        )
    }
}

/// Grayscale raster, row-major, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, DescriptorError> {
        let expected = width * height;
        if width == 0 || height == 0 || pixels.len() != expected {
            return Err(DescriptorError::PixelCount {
                width,
                height,
                expected,
                got: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// The frame mapping this image onto `[0, width] x [0, height]`.
    pub fn frame(&self) -> ImageFrame {
        ImageFrame::new(
            BoundingBox::from_bounds(0.0, 0.0, self.width as f64, self.height as f64)
                .expect("non-empty image"),
            self.width,
            self.height,
        )
    }
}

/// Maps a plane box onto an image. The plane's y axis points up, so the top
/// image row sits at `bbox.max().y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageFrame {
    bbox: BoundingBox,
    width: usize,
    height: usize,
}

impl ImageFrame {
    pub fn new(bbox: BoundingBox, width: usize, height: usize) -> Self {
        Self {
            bbox,
            width,
            height,
        }
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    /// Pixel holding `p`; points on the far edges belong to the last pixel.
    pub fn to_pixel(&self, p: Point2) -> Option<(usize, usize)> {
        if !self.bbox.contains(p) {
            return None;
        }
        let u = (p.x - self.bbox.min().x) / self.bbox.width() * self.width as f64;
        let v = (self.bbox.max().y - p.y) / self.bbox.height() * self.height as f64;
        Some((
            (u.floor() as usize).min(self.width - 1),
            (v.floor() as usize).min(self.height - 1),
        ))
    }

    pub fn pixel_center(&self, px: usize, py: usize) -> Point2 {
        let sx = self.bbox.width() / self.width as f64;
        let sy = self.bbox.height() / self.height as f64;
        Point2::new(
            self.bbox.min().x + (px as f64 + 0.5) * sx,
            self.bbox.max().y - (py as f64 + 0.5) * sy,
        )
    }
}

/// `(x, y)` for a bare point, `(x, y, phi)` when an image is supplied.
///
/// Points on the image border use the nearest pixel with a full Sobel
/// stencil.
pub fn point_descriptor(
    p: Point2,
    img: Option<(&GrayImage, &ImageFrame)>,
) -> Result<FeatureVector, DescriptorError> {
    let mut entries = vec![
        ("x", FeatureKind::Scalar, p.x),
        ("y", FeatureKind::Scalar, p.y),
    ];
    if let Some((img, frame)) = img {
        let (px, py) = frame
            .to_pixel(p)
            .ok_or(DescriptorError::OutOfImageBounds(p))?;
        let (w, h) = (img.width(), img.height());
        if w < 3 || h < 3 {
            return Err(DescriptorError::StencilOutOfBounds {
                px,
                py,
                width: w,
                height: h,
            });
        }
        let phi = gradient_orientation(img, px.clamp(1, w - 2), py.clamp(1, h - 2))?;
        entries.push(("phi", FeatureKind::Angle, phi));
    }
    Ok(FeatureVector::new(entries))
}

/// Names of the location entries of a region descriptor.
pub const REGION_LOCATION: [&str; 2] = ["centroid_x", "centroid_y"];

/// `(centroid_x, centroid_y, area, diameter, edge_count)`.
pub fn region_descriptor(r: &ConvexPolygon) -> Result<FeatureVector, DescriptorError> {
    if r.len() < 3 {
        return Err(DescriptorError::DegeneratePolygon(r.len()));
    }
    let c = r.centroid().expect("non-empty polygon");
    Ok(FeatureVector::new([
        ("centroid_x", FeatureKind::Scalar, c.x),
        ("centroid_y", FeatureKind::Scalar, c.y),
        ("area", FeatureKind::Scalar, r.area()),
        ("diameter", FeatureKind::Scalar, r.diameter()),
        ("edge_count", FeatureKind::Count, r.len() as f64),
    ]))
}

/// Undirected direction of each polygon edge, in `[0, pi)`.
pub fn edge_orientations(r: &ConvexPolygon) -> Result<Vec<f64>, DescriptorError> {
    if r.len() < 2 {
        return Err(DescriptorError::DegeneratePolygon(r.len()));
    }
    Ok(r.edges()
        .map(|(a, b)| fold_angle((b.y - a.y).atan2(b.x - a.x)))
        .collect())
}

/// Region descriptor selection used by the descriptive proximities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegionDescriptor {
    /// Keep the centroid entries. Off by default, so matching is by shape.
    pub include_location: bool,
}

impl RegionDescriptor {
    pub const LOCATION_FREE: Self = Self {
        include_location: false,
    };
    pub const WITH_LOCATION: Self = Self {
        include_location: true,
    };

    pub fn name(&self) -> &'static str {
        if self.include_location {
            "region"
        } else {
            "region-shape"
        }
    }

    pub fn describe(&self, r: &ConvexPolygon) -> Result<FeatureVector, DescriptorError> {
        let full = region_descriptor(r)?;
        Ok(if self.include_location {
            full
        } else {
            full.without(&REGION_LOCATION)
        })
    }
}

/// What describes a region in region-level descriptive proximity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descriptor {
    /// The point descriptor of the region's generating site.
    Site,
    Region(RegionDescriptor),
}

impl From<RegionDescriptor> for Descriptor {
    fn from(r: RegionDescriptor) -> Self {
        Descriptor::Region(r)
    }
}

impl Descriptor {
    pub fn name(&self) -> &'static str {
        match self {
            Descriptor::Site => "site",
            Descriptor::Region(r) => r.name(),
        }
    }
}
