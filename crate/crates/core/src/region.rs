//! Finite site sets of ℤ² with a canonical ordering.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Site = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Disc,
    Square,
}

impl std::str::FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disc" => Ok(Shape::Disc),
            "square" => Ok(Shape::Square),
            _ => Err(Error::Parse(format!("unknown shape '{s}' (disc|square)"))),
        }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Shape::Disc => "disc",
            Shape::Square => "square",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TruncationRegion {
    shape: Shape,
    radius: f64,
    sites: Vec<Site>,
    index: HashMap<Site, usize>,
}

impl TruncationRegion {
    /// Sites with ‖n‖₂ ≤ ρ (disc) or ‖n‖∞ ≤ ρ (square), in lexicographic order.
    pub fn new(shape: Shape, radius: f64) -> Result<Self> {
        if !(radius >= 1.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("region radius must be >= 1, got {radius}")));
        }
        let r = radius.floor() as i64;
        let mut sites = Vec::new();
        for n1 in -r..=r {
            for n2 in -r..=r {
                let inside = match shape {
                    Shape::Disc => ((n1 * n1 + n2 * n2) as f64) <= radius * radius,
                    Shape::Square => true,
                };
                if inside {
                    sites.push((n1, n2));
                }
            }
        }
        Ok(Self::from_sites(shape, radius, sites))
    }

    fn from_sites(shape: Shape, radius: f64, sites: Vec<Site>) -> Self {
        let index = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        TruncationRegion { shape, radius, sites, index }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn index_of(&self, s: Site) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn contains(&self, s: Site) -> bool {
        self.index.contains_key(&s)
    }

    /// Sites whose whole ‖·‖∞-neighbourhood of the given range lies in the region.
    pub fn interior(&self, range: i64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let (a, b) = self.sites[i];
                (-range..=range).all(|d1| (-range..=range).all(|d2| self.contains((a + d1, b + d2))))
            })
            .collect()
    }

    /// Distance (in ‖·‖∞ steps) from each site to the complement of the region.
    pub fn boundary_distance(&self) -> Vec<i64> {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.sites[i];
                let mut d = 0;
                loop {
                    let r = d + 1;
                    let ring_inside = (-r..=r).all(|x| (-r..=r).all(|y| self.contains((a + x, b + y))));
                    if !ring_inside {
                        return d;
                    }
                    d = r;
                }
            })
            .collect()
    }

    /// Writes `index,n1,n2` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "index,n1,n2")?;
        for (i, (a, b)) in self.sites.iter().enumerate() {
            writeln!(out, "{i},{a},{b}")?;
        }
        Ok(())
    }
}
