use super::{DescriptorError, GrayImage};

/// Folds an angle onto `[0, pi)`, the orientation of an undirected line.
pub fn fold_angle(a: f64) -> f64 {
    let f = a.rem_euclid(std::f64::consts::PI);
    if f >= std::f64::consts::PI {
        0.0
    } else {
        f
    }
}

/// 3x3 Sobel response `(gx, gy)` at an interior pixel. `gx` grows with the
/// column index, `gy` with the row index.
pub fn sobel(img: &GrayImage, px: usize, py: usize) -> Result<(f64, f64), DescriptorError> {
    let (w, h) = (img.width(), img.height());
    if px < 1 || py < 1 || px + 2 > w || py + 2 > h {
        return Err(DescriptorError::StencilOutOfBounds {
            px,
            py,
            width: w,
            height: h,
        });
    }
    let p = |x: usize, y: usize| img.get(x, y) as f64;
    let gx = (p(px + 1, py - 1) + 2.0 * p(px + 1, py) + p(px + 1, py + 1))
        - (p(px - 1, py - 1) + 2.0 * p(px - 1, py) + p(px - 1, py + 1));
    let gy = (p(px - 1, py + 1) + 2.0 * p(px, py + 1) + p(px + 1, py + 1))
        - (p(px - 1, py - 1) + 2.0 * p(px, py - 1) + p(px + 1, py - 1));
    Ok((gx, gy))
}

/// Orientation of the intensity gradient in `[0, pi)`. Flat pixels report 0;
/// use [`gradient_magnitude`] to tell them apart.
pub fn gradient_orientation(img: &GrayImage, px: usize, py: usize) -> Result<f64, DescriptorError> {
    let (gx, gy) = sobel(img, px, py)?;
    if gx == 0.0 && gy == 0.0 {
        return Ok(0.0);
    }
    Ok(fold_angle(gy.atan2(gx)))
}

pub fn gradient_magnitude(img: &GrayImage, px: usize, py: usize) -> Result<f64, DescriptorError> {
    let (gx, gy) = sobel(img, px, py)?;
    Ok(gx.hypot(gy))
}
