//! The simulation square and its administrative partitions.
//!
//! The square spans [-10, 10] on both axes. Three regional designs exist:
//!
//! * one region (code 0) covering the whole square;
//! * four quadrants split at x = 0, y = 0: 0 = NW, 1 = NE, 2 = SW, 3 = SE;
//! * seven regions: 0..=2 as above, with the SE quadrant split at (5, -5)
//!   into 3 = NW, 4 = NE, 5 = SW, 6 = SE sub-quadrants.
//!
//! Rectangles are half-open `[min, max)` on each axis, except that edges
//! lying on the outer square boundary are closed.

use std::fmt;

use crate::error::{Error, Result};

pub const HALF_EXTENT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Design {
    One,
    Four,
    Seven,
}

impl Design {
    pub const ALL: [Design; 3] = [Design::One, Design::Four, Design::Seven];

    pub fn from_count(n: u32) -> Result<Self> {
        match n {
            1 => Ok(Design::One),
            4 => Ok(Design::Four),
            7 => Ok(Design::Seven),
            other => Err(Error::InvalidRegionCount(other)),
        }
    }

    pub fn count(self) -> usize {
        match self {
            Design::One => 1,
            Design::Four => 4,
            Design::Seven => 7,
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn in_square(&self) -> bool {
        (-HALF_EXTENT..=HALF_EXTENT).contains(&self.x) && (-HALF_EXTENT..=HALF_EXTENT).contains(&self.y)
    }
}

/// Euclidean distance.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Squared Euclidean distance, for ranking without the square root.
#[inline]
pub fn distance_sq(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    fn axis_contains(v: f64, lo: f64, hi: f64) -> bool {
        v >= lo && (v < hi || (hi == HALF_EXTENT && v == hi))
    }

    /// Membership under the half-open convention.
    pub fn contains(&self, p: Point) -> bool {
        Self::axis_contains(p.x, self.x_min, self.x_max) && Self::axis_contains(p.y, self.y_min, self.y_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionGeometry {
    pub region_id: usize,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub design: Design,
    pub regions: Vec<RegionGeometry>,
}

const E: f64 = HALF_EXTENT;

impl Partition {
    pub fn build(design: Design) -> Self {
        let nw = Rect::new(-E, 0.0, 0.0, E);
        let ne = Rect::new(0.0, E, 0.0, E);
        let sw = Rect::new(-E, 0.0, -E, 0.0);
        let se = Rect::new(0.0, E, -E, 0.0);
        let rects = match design {
            Design::One => vec![Rect::new(-E, E, -E, E)],
            Design::Four => vec![nw, ne, sw, se],
            Design::Seven => vec![
                nw,
                ne,
                sw,
                Rect::new(0.0, 5.0, -5.0, 0.0),
                Rect::new(5.0, E, -5.0, 0.0),
                Rect::new(0.0, 5.0, -E, -5.0),
                Rect::new(5.0, E, -E, -5.0),
            ],
        };
        let regions =
            rects.into_iter().enumerate().map(|(region_id, rect)| RegionGeometry { region_id, rect }).collect();
        Partition { design, regions }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Region code containing `p`.
    pub fn locate(&self, p: Point) -> Result<usize> {
        if !p.in_square() {
            return Err(Error::OutsideSquare { x: p.x, y: p.y });
        }
        self.regions
            .iter()
            .find(|r| r.rect.contains(p))
            .map(|r| r.region_id)
            .ok_or(Error::OutsideSquare { x: p.x, y: p.y })
    }

    /// Rows of `region_id,x_min,x_max,y_min,y_max` for output metadata.
    pub fn table(&self) -> String {
        let mut out = String::from("region_id,x_min,x_max,y_min,y_max\n");
        for r in &self.regions {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.region_id, r.rect.x_min, r.rect.x_max, r.rect.y_min, r.rect.y_max
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_examples() {
        let one = Partition::build(Design::One);
        let four = Partition::build(Design::Four);
        let seven = Partition::build(Design::Seven);
        assert_eq!(one.locate(Point::new(3.0, -7.0)).unwrap(), 0);
        assert_eq!(four.locate(Point::new(-1.0, 1.0)).unwrap(), 0);
        assert_eq!(seven.locate(Point::new(7.0, -2.0)).unwrap(), 4);
    }

    #[test]
    fn boundary_convention() {
        let four = Partition::build(Design::Four);
        let seven = Partition::build(Design::Seven);
        assert_eq!(four.locate(Point::new(0.0, 0.0)).unwrap(), 1);
        assert_eq!(four.locate(Point::new(10.0, 10.0)).unwrap(), 1);
        assert_eq!(seven.locate(Point::new(0.0, -10.0)).unwrap(), 5);
        assert_eq!(seven.locate(Point::new(-10.0, -10.0)).unwrap(), 2);
        assert_eq!(seven.locate(Point::new(10.0, -10.0)).unwrap(), 6);
        assert_eq!(seven.locate(Point::new(5.0, -5.0)).unwrap(), 4);
    }

    #[test]
    fn outside_square_rejected() {
        let four = Partition::build(Design::Four);
        assert!(four.locate(Point::new(10.5, 0.0)).is_err());
        assert!(four.locate(Point::new(0.0, f64::NAN)).is_err());
    }

    #[test]
    fn invalid_design_rejected() {
        assert!(Design::from_count(3).is_err());
        assert_eq!(Design::from_count(7).unwrap().count(), 7);
    }

    #[test]
    fn areas() {
        let four: Vec<f64> = Partition::build(Design::Four).regions.iter().map(|r| r.rect.area()).collect();
        assert_eq!(four, vec![100.0; 4]);
        let seven: Vec<f64> = Partition::build(Design::Seven).regions.iter().map(|r| r.rect.area()).collect();
        assert_eq!(seven, vec![100.0, 100.0, 100.0, 25.0, 25.0, 25.0, 25.0]);
        assert_eq!(Partition::build(Design::One).regions[0].rect.area(), 400.0);
    }

    #[test]
    fn distances() {
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Point::new(2.5, 2.5), Point::new(2.5, 2.5)), 0.0);
        let d = distance(Point::new(-10.0, -10.0), Point::new(10.0, 10.0));
        assert!((d - 20.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn partition_table_lists_every_region() {
        let t = Partition::build(Design::Seven).table();
        assert_eq!(t.lines().count(), 8);
        assert!(t.contains("4,5,10,-5,0"));
    }
}
