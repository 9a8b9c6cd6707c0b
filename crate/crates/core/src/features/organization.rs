use crate::raster::{connected_components, erode, odd_diameter, BinaryImage};

use super::Organization;

const ELEMENT_FRACTION: f64 = 0.03;
const MIN_PART_FRACTION: f64 = 0.001;

/// Number of substantial pieces left after eroding with a disk of 3% of the
/// image width.
pub fn count_leaflets(leaf: &BinaryImage) -> usize {
    let d = odd_diameter(ELEMENT_FRACTION * leaf.width() as f64);
    let eroded = erode(leaf, d);
    let min_area = MIN_PART_FRACTION * leaf.count() as f64;
    connected_components(&eroded).iter().filter(|c| c.area() as f64 >= min_area).count()
}

/// Two or more pieces after erosion mean leaflets joined only by a thin
/// rachis. A leaf that vanishes entirely is thinner than the element and
/// reads as simple.
pub fn classify_organization(leaf: &BinaryImage) -> Organization {
    if count_leaflets(leaf) >= 2 {
        Organization::Compound
    } else {
        Organization::Simple
    }
}
