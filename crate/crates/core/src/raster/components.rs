use super::{BinaryImage, Pixel};

const N8: [(i32, i32); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
const N4: [(i32, i32); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// One 8-connected foreground region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Member pixels in scan order.
    pub pixels: Vec<Pixel>,
    /// `(min_x, min_y, max_x, max_y)`.
    pub bbox: (i32, i32, i32, i32),
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn to_image(&self, width: usize, height: usize) -> BinaryImage {
        let mut img = BinaryImage::empty(width, height);
        for &(x, y) in &self.pixels {
            img.set(x as usize, y as usize, true);
        }
        img
    }
}

/// Flood-fills every region reachable through `steps`, starting from seeds
/// in scan order. Returns one pixel list per region.
fn flood(img: &BinaryImage, value: bool, steps: &[(i32, i32)]) -> Vec<Vec<Pixel>> {
    let (w, h) = img.dims();
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if seen[start] || img.pixels()[start] != value {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            let (x, y) = ((i % w) as i32, (i / w) as i32);
            members.push((x, y));
            for &(dx, dy) in steps {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i32 || ny >= h as i32 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !seen[j] && img.pixels()[j] == value {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable_by_key(|&(x, y)| (y, x));
        regions.push(members);
    }
    regions
}

/// 8-connected foreground components, largest first. Equal areas keep scan
/// order of their first pixel.
pub fn connected_components(img: &BinaryImage) -> Vec<Component> {
    let mut comps: Vec<Component> = flood(img, true, &N8)
        .into_iter()
        .map(|pixels| {
            let bbox = pixels.iter().fold((i32::MAX, i32::MAX, i32::MIN, i32::MIN), |b, &(x, y)| {
                (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y))
            });
            Component { pixels, bbox }
        })
        .collect();
    comps.sort_by(|a, b| b.area().cmp(&a.area()));
    comps
}

/// The largest component alone, or an empty image.
pub fn largest_component(img: &BinaryImage) -> BinaryImage {
    match connected_components(img).first() {
        Some(c) => c.to_image(img.width(), img.height()),
        None => BinaryImage::empty(img.width(), img.height()),
    }
}

/// Sets every background pixel not 4-connected to the image border.
pub fn fill_holes(img: &BinaryImage) -> BinaryImage {
    let (w, h) = img.dims();
    let mut out = img.clone();
    for region in flood(img, false, &N4) {
        let touches_border = region.iter().any(|&(x, y)| x == 0 || y == 0 || x == w as i32 - 1 || y == h as i32 - 1);
        if !touches_border {
            for (x, y) in region {
                out.set(x as usize, y as usize, true);
            }
        }
    }
    out
}
