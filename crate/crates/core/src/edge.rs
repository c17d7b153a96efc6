//! Edge labeling on the inter-pixel lattice.
//!
//! Sites sit between adjacent pixels. A vertical site separates pixel
//! `(x, y)` from `(x + 1, y)`; a horizontal site separates `(x, y)` from
//! `(x, y + 1)`. Vertical sites are numbered first, row-major, then the
//! horizontal ones.
//!
//! Geometrically each site is a unit segment on the grid of pixel corners.
//! Its neighbors are the six other segments sharing one of its two corners
//! plus the two parallel segments one pixel away, which gives interior
//! sites eight neighbors.

use rand_distr::{Distribution, Normal};

use crate::error::{MrfError, Result};
use crate::mrf::{Clique, DataTerm, Field, Label, LabelSet};
use crate::rng;

pub const NON_EDGE: Label = 0;
pub const EDGE: Label = 1;

/// 8-bit greyscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(pixels.len()) {
            return Err(MrfError::Shape(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
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
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// A site located on the lattice: orientation plus the coordinates of the
/// pixel on its left (vertical) or above it (horizontal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SitePos {
    pub orientation: Orientation,
    pub x: usize,
    pub y: usize,
}

/// Site indexing for a `width x height` image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeLattice {
    width: usize,
    height: usize,
}

impl EdgeLattice {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(MrfError::InvalidParameter(format!(
                "edge lattice needs at least 2x2 pixels, got {width}x{height}"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vertical_count(&self) -> usize {
        (self.width - 1) * self.height
    }

    pub fn horizontal_count(&self) -> usize {
        self.width * (self.height - 1)
    }

    pub fn num_sites(&self) -> usize {
        self.vertical_count() + self.horizontal_count()
    }

    pub fn site(&self, pos: SitePos) -> Option<usize> {
        let SitePos { orientation, x, y } = pos;
        match orientation {
            Orientation::Vertical if x + 1 < self.width && y < self.height => {
                Some(y * (self.width - 1) + x)
            }
            Orientation::Horizontal if x < self.width && y + 1 < self.height => {
                Some(self.vertical_count() + y * self.width + x)
            }
            _ => None,
        }
    }

    pub fn position(&self, site: usize) -> SitePos {
        let v = self.vertical_count();
        if site < v {
            SitePos {
                orientation: Orientation::Vertical,
                x: site % (self.width - 1),
                y: site / (self.width - 1),
            }
        } else {
            let h = site - v;
            SitePos {
                orientation: Orientation::Horizontal,
                x: h % self.width,
                y: h / self.width,
            }
        }
    }

    /// The two pixels a site separates.
    pub fn pixels(&self, site: usize) -> ((usize, usize), (usize, usize)) {
        let p = self.position(site);
        match p.orientation {
            Orientation::Vertical => ((p.x, p.y), (p.x + 1, p.y)),
            Orientation::Horizontal => ((p.x, p.y), (p.x, p.y + 1)),
        }
    }

    /// Corner coordinates of the segment's two ends.
    fn corners(&self, pos: SitePos) -> [(usize, usize); 2] {
        match pos.orientation {
            Orientation::Vertical => [(pos.x + 1, pos.y), (pos.x + 1, pos.y + 1)],
            Orientation::Horizontal => [(pos.x, pos.y + 1), (pos.x + 1, pos.y + 1)],
        }
    }

    /// Sites whose segment ends at corner `(cx, cy)`.
    fn at_corner(&self, cx: usize, cy: usize) -> impl Iterator<Item = usize> + '_ {
        let v = |x: Option<usize>, y: Option<usize>| {
            x.zip(y).and_then(|(x, y)| {
                self.site(SitePos { orientation: Orientation::Vertical, x, y })
            })
        };
        let h = |x: Option<usize>, y: Option<usize>| {
            x.zip(y).and_then(|(x, y)| {
                self.site(SitePos { orientation: Orientation::Horizontal, x, y })
            })
        };
        [
            v(cx.checked_sub(1), cy.checked_sub(1)),
            v(cx.checked_sub(1), Some(cy)),
            h(cx.checked_sub(1), cy.checked_sub(1)),
            h(Some(cx), cy.checked_sub(1)),
        ]
        .into_iter()
        .flatten()
    }

    /// Neighbors of `site` with the relation each one has to it, ascending.
    pub fn neighbors(&self, site: usize) -> Vec<(usize, PairKind)> {
        let pos = self.position(site);
        let mut out = Vec::with_capacity(8);
        for (cx, cy) in self.corners(pos) {
            for r in self.at_corner(cx, cy).filter(|&r| r != site) {
                let kind = if self.position(r).orientation == pos.orientation {
                    PairKind::Collinear
                } else {
                    PairKind::Turn
                };
                out.push((r, kind));
            }
        }
        let parallel = match pos.orientation {
            Orientation::Vertical => [
                pos.x.checked_sub(1).map(|x| SitePos { x, ..pos }),
                Some(SitePos { x: pos.x + 1, ..pos }),
            ],
            Orientation::Horizontal => [
                pos.y.checked_sub(1).map(|y| SitePos { y, ..pos }),
                Some(SitePos { y: pos.y + 1, ..pos }),
            ],
        };
        for r in parallel.into_iter().flatten().filter_map(|p| self.site(p)) {
            out.push((r, PairKind::Parallel));
        }
        out.sort_unstable_by_key(|&(r, _)| r);
        out
    }
}

/// How two neighboring edge sites relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// Same orientation, sharing a corner.
    Collinear,
    /// Perpendicular, sharing a corner.
    Turn,
    /// Same orientation, one pixel apart.
    Parallel,
}

/// Clique energies for the edge field. Only edge-edge pairs and the unary
/// edge label carry energy; every other table entry is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePotentials {
    pub continuity: f64,
    pub turn: f64,
    pub parallel: f64,
    pub edge_prior: f64,
}

impl Default for EdgePotentials {
    fn default() -> Self {
        Self {
            continuity: -0.5,
            turn: 0.3,
            parallel: 0.3,
            edge_prior: 0.4,
        }
    }
}

impl EdgePotentials {
    pub fn validate(&self) -> Result<()> {
        let all = [self.continuity, self.turn, self.parallel, self.edge_prior];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(MrfError::InvalidParameter("edge potentials must be finite".into()));
        }
        Ok(())
    }

    /// Settings that work against line continuation, smooth lines or sparse
    /// edges. Not an error, but usually a mistake.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.continuity >= 0.0 {
            w.push(format!("continuity {} does not reward continuing lines", self.continuity));
        }
        if self.turn <= 0.0 {
            w.push(format!("turn {} does not discourage sharp turns", self.turn));
        }
        if self.parallel <= 0.0 {
            w.push(format!("parallel {} does not discourage close parallel lines", self.parallel));
        }
        if self.edge_prior <= 0.0 {
            w.push(format!("edge prior {} does not discourage edges", self.edge_prior));
        }
        w
    }

    pub fn pair_energy(&self, kind: PairKind) -> f64 {
        match kind {
            PairKind::Collinear => self.continuity,
            PairKind::Turn => self.turn,
            PairKind::Parallel => self.parallel,
        }
    }
}

/// Builds the edge-labeling field: one unary clique per site, then one pair
/// clique per neighboring pair in ascending `(a, b)` order.
pub fn build_edge_field(width: usize, height: usize, potentials: &EdgePotentials) -> Result<Field> {
    potentials.validate()?;
    let lattice = EdgeLattice::new(width, height)?;
    let n = lattice.num_sites();
    let mut adjacency = Vec::with_capacity(n);
    let mut cliques: Vec<Clique> = (0..n)
        .map(|s| Clique::unary(s, vec![0.0, potentials.edge_prior]))
        .collect();
    let mut pairs = Vec::new();
    for s in 0..n {
        let nbrs = lattice.neighbors(s);
        for &(r, kind) in &nbrs {
            if s < r {
                pairs.push((s, r, kind));
            }
        }
        adjacency.push(nbrs.into_iter().map(|(r, _)| r).collect());
    }
    for (a, b, kind) in pairs {
        cliques.push(Clique::pair(a, b, vec![0.0, 0.0, 0.0, potentials.pair_energy(kind)]));
    }
    Field::new(LabelSet::new(2)?, adjacency, cliques)
}

/// Two-Gaussian step model: intensity differences across a true edge are
/// centred on `mu_e`, elsewhere on zero, both with deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeModel {
    pub mu_e: f64,
    pub sigma: f64,
}

impl Default for EdgeModel {
    fn default() -> Self {
        Self {
            mu_e: 128.0,
            sigma: 16.0,
        }
    }
}

impl EdgeModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu_e > 0.0 && self.mu_e.is_finite() && self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(MrfError::InvalidParameter(format!(
                "edge model needs positive finite mu_e and sigma, got {} and {}",
                self.mu_e, self.sigma
            )));
        }
        Ok(())
    }

    /// `log N(d; mu_e, sigma) - log N(d; 0, sigma)` for `d = |diff|`.
    pub fn llr(&self, diff: f64) -> f64 {
        let d = diff.abs();
        (d - self.mu_e / 2.0) * self.mu_e / (self.sigma * self.sigma)
    }
}

/// Edge log likelihood ratio of every site, in site order.
pub fn site_llrs(image: &Image, model: &EdgeModel) -> Result<Vec<f64>> {
    model.validate()?;
    let lattice = EdgeLattice::new(image.width(), image.height())?;
    Ok((0..lattice.num_sites())
        .map(|s| {
            let ((x0, y0), (x1, y1)) = lattice.pixels(s);
            model.llr(f64::from(image.get(x0, y0)) - f64::from(image.get(x1, y1)))
        })
        .collect())
}

/// Data term with `D(edge) = -LLR` and `D(non-edge) = 0`.
pub fn data_from_llrs(llrs: &[f64]) -> Result<DataTerm> {
    let mut values = Vec::with_capacity(2 * llrs.len());
    for &l in llrs {
        values.push(0.0);
        values.push(-l);
    }
    DataTerm::new(2, values)
}

/// Edge data term for an image under `model`.
pub fn compute_llr(image: &Image, model: &EdgeModel) -> Result<DataTerm> {
    data_from_llrs(&site_llrs(image, model)?)
}

/// Checkerboard with squares of side `square` alternating `low`/`high`
/// (top-left square is `low`), plus seeded Gaussian noise, rounded and
/// clamped to `0..=255`.
#[allow(clippy::too_many_arguments)]
pub fn make_checkerboard(
    width: usize,
    height: usize,
    square: usize,
    low: u8,
    high: u8,
    noise_sigma: f64,
    seed: u64,
) -> Result<Image> {
    if square == 0 {
        return Err(MrfError::InvalidParameter("square size must be positive".into()));
    }
    if low >= high {
        return Err(MrfError::InvalidParameter(format!(
            "low intensity {low} must be below high intensity {high}"
        )));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(MrfError::InvalidParameter(format!("noise sigma {noise_sigma}")));
    }
    if width == 0 || height == 0 {
        return Err(MrfError::InvalidParameter("image dimensions must be positive".into()));
    }
    let noise = Normal::new(0.0, noise_sigma).expect("sigma checked above");
    let mut r = rng::stream(seed, rng::IMAGE_STREAM);
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let base = if (x / square + y / square).is_multiple_of(2) { low } else { high };
            let v = if noise_sigma > 0.0 {
                f64::from(base) + noise.sample(&mut r)
            } else {
                f64::from(base)
            };
            pixels.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    Image::new(width, height, pixels)
}

/// Log likelihood ratios of the eight-site chain fixture.
pub const CHAIN_LLRS: [f64; 8] = [4.0, -0.2, -0.4, -0.5, -0.3, 0.1, -0.3, -0.4];

/// Pair table of the chain fixture, indexed `[a * 2 + b]` with
/// `0 = non-edge`, `1 = edge`.
pub const CHAIN_PAIR_TABLE: [f64; 4] = [-0.5, 1.0, 1.0, -0.5];

/// Eight sites in a line, each pair of consecutive sites sharing a clique
/// that rewards equal labels (-0.5) and penalizes a break (+1). Unary
/// cliques are zero and omitted.
pub fn make_chain_fixture() -> (Field, DataTerm) {
    let n = CHAIN_LLRS.len();
    let adjacency = (0..n)
        .map(|s| {
            let mut v = Vec::with_capacity(2);
            if s > 0 {
                v.push(s - 1);
            }
            if s + 1 < n {
                v.push(s + 1);
            }
            v
        })
        .collect();
    let cliques = (0..n - 1)
        .map(|s| Clique::pair(s, s + 1, CHAIN_PAIR_TABLE.to_vec()))
        .collect();
    let field = Field::new(LabelSet::new(2).expect("two labels"), adjacency, cliques)
        .expect("fixture is well formed");
    let data = data_from_llrs(&CHAIN_LLRS).expect("finite");
    (field, data)
}
