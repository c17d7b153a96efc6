//! File formats: binary PGM images, likelihood files, labeling files,
//! `key = value` run configs and comparison tables.
//!
//! Likelihood file (`MRFLLR 1`):
//!
//! ```text
//! MRFLLR 1
//! <width> <height>
//! <llr of site 0>
//! <llr of site 1>
//! ...
//! ```
//!
//! Labeling file (`MRFL 1`): the second line is `<width> <height>` for an
//! image lattice or `chain <n>` for a chain, followed by one `<site> <label>`
//! line per site in site order. Two-label fields write `n` (non-edge) and
//! `e` (edge); other label counts write the label index.
//!
//! Reals are written as the shortest decimal that parses back to the same
//! `f64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use thiserror::Error;

use crate::edge::{EdgeLattice, Image, Orientation, EDGE};
use crate::mrf::{Configuration, Label, UNCOMMITTED};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse {
        line,
        message: message.into(),
    })
}

// ---------------------------------------------------------------- PGM

pub fn write_pgm(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}

/// Reads a binary (P5) PGM with maxval 255. Comments are allowed in the
/// header.
pub fn read_pgm(bytes: &[u8]) -> Result<Image, FormatError> {
    let mut pos = 0;
    let mut line = 1;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b'\n' => {
                    line += 1;
                    pos += 1;
                }
                b if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return parse_err(line, "truncated PGM header");
        }
        tokens.push((String::from_utf8_lossy(&bytes[start..pos]).into_owned(), line));
    }
    if tokens[0].0 != "P5" {
        return parse_err(tokens[0].1, format!("expected magic P5, found {:?}", tokens[0].0));
    }
    let num = |i: usize, what: &str| -> Result<usize, FormatError> {
        tokens[i]
            .0
            .parse::<usize>()
            .or_else(|_| parse_err(tokens[i].1, format!("bad {what} {:?}", tokens[i].0)))
    };
    let width = num(1, "width")?;
    let height = num(2, "height")?;
    let maxval = num(3, "maxval")?;
    if maxval != 255 {
        return parse_err(tokens[3].1, format!("maxval must be 255, found {maxval}"));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return parse_err(tokens[3].1, "missing whitespace after maxval");
    }
    if bytes[pos] == b'\n' {
        line += 1;
    }
    pos += 1;
    let expected = width.saturating_mul(height);
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return parse_err(
            line,
            format!("raster has {} bytes, expected {expected}", raster.len()),
        );
    }
    Image::new(width, height, raster[..expected].to_vec())
        .or_else(|e| parse_err(tokens[1].1, e.to_string()))
}

// ---------------------------------------------------------------- likelihoods

/// Likelihood ratios for an image lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFile {
    pub width: usize,
    pub height: usize,
    pub llrs: Vec<f64>,
}

pub fn write_llr(file: &LlrFile) -> String {
    let mut out = format!("MRFLLR 1\n{} {}\n", file.width, file.height);
    for v in &file.llrs {
        let _ = writeln!(out, "{v}");
    }
    out
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()))
}

fn parse_dims(line: usize, text: &str) -> Result<(usize, usize), FormatError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    match parts.as_slice() {
        [w, h] => match (w.parse::<usize>(), h.parse::<usize>()) {
            (Ok(w), Ok(h)) => Ok((w, h)),
            _ => parse_err(line, format!("bad dimensions {text:?}")),
        },
        _ => parse_err(line, format!("expected `<width> <height>`, found {text:?}")),
    }
}

pub fn read_llr(text: &str) -> Result<LlrFile, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, "MRFLLR 1")) => {}
        Some((l, other)) => return parse_err(l, format!("expected header `MRFLLR 1`, found {other:?}")),
        None => return parse_err(1, "empty likelihood file"),
    }
    let (width, height) = match it.next() {
        Some((l, t)) => parse_dims(l, t)?,
        None => return parse_err(2, "missing dimensions"),
    };
    let lattice = EdgeLattice::new(width, height).or_else(|e| parse_err(2, e.to_string()))?;
    let mut llrs = Vec::with_capacity(lattice.num_sites());
    let mut last = 2;
    for (l, t) in it {
        last = l;
        if t.is_empty() {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => llrs.push(v),
            _ => return parse_err(l, format!("bad likelihood ratio {t:?}")),
        }
    }
    if llrs.len() != lattice.num_sites() {
        return parse_err(
            last,
            format!(
                "{} likelihood ratios for a {width}x{height} lattice of {} sites",
                llrs.len(),
                lattice.num_sites()
            ),
        );
    }
    Ok(LlrFile { width, height, llrs })
}

// ---------------------------------------------------------------- labelings

/// What the sites of a labeling are laid out on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Lattice { width: usize, height: usize },
    Chain { sites: usize },
}

impl Domain {
    pub fn num_sites(&self) -> usize {
        match *self {
            Domain::Lattice { width, height } => {
                EdgeLattice::new(width, height).map_or(0, |l| l.num_sites())
            }
            Domain::Chain { sites } => sites,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Labeling {
    pub domain: Domain,
    pub label_count: u32,
    pub config: Configuration,
}

pub fn label_token(label: Label, label_count: u32) -> String {
    match (label, label_count) {
        (UNCOMMITTED, _) => "?".into(),
        (l, 2) if l == EDGE => "e".into(),
        (_, 2) => "n".into(),
        (l, _) => l.to_string(),
    }
}

/// Space-separated label tokens.
pub fn format_labels(config: &Configuration, label_count: u32) -> String {
    config
        .as_slice()
        .iter()
        .map(|&l| label_token(l, label_count))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_labeling(labeling: &Labeling) -> String {
    let mut out = String::from("MRFL 1\n");
    match labeling.domain {
        Domain::Lattice { width, height } => {
            let _ = writeln!(out, "{width} {height}");
        }
        Domain::Chain { sites } => {
            let _ = writeln!(out, "chain {sites}");
        }
    }
    for (s, &l) in labeling.config.as_slice().iter().enumerate() {
        let _ = writeln!(out, "{s} {}", label_token(l, labeling.label_count));
    }
    out
}

/// Parses a labeling. `n`/`e` read as 0/1; integers as themselves.
pub fn read_labeling(text: &str) -> Result<Labeling, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, "MRFL 1")) => {}
        Some((l, other)) => return parse_err(l, format!("expected header `MRFL 1`, found {other:?}")),
        None => return parse_err(1, "empty labeling file"),
    }
    let domain = match it.next() {
        Some((l, t)) => match t.strip_prefix("chain ") {
            Some(n) => Domain::Chain {
                sites: n
                    .trim()
                    .parse()
                    .or_else(|_| parse_err(l, format!("bad chain length {n:?}")))?,
            },
            None => {
                let (width, height) = parse_dims(l, t)?;
                EdgeLattice::new(width, height).or_else(|e| parse_err(l, e.to_string()))?;
                Domain::Lattice { width, height }
            }
        },
        None => return parse_err(2, "missing dimensions"),
    };
    let n = domain.num_sites();
    let mut labels = vec![UNCOMMITTED; n];
    let mut symbolic = false;
    let mut max_label = 0;
    let mut last = 2;
    for (l, t) in it {
        last = l;
        if t.is_empty() {
            continue;
        }
        let mut parts = t.split_whitespace();
        let (Some(site), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
            return parse_err(l, format!("expected `<site> <label>`, found {t:?}"));
        };
        let site: usize = site
            .parse()
            .or_else(|_| parse_err(l, format!("bad site id {site:?}")))?;
        if site >= n {
            return parse_err(l, format!("site {site} out of range for {n} sites"));
        }
        if labels[site] != UNCOMMITTED {
            return parse_err(l, format!("site {site} listed twice"));
        }
        let label = match label {
            "n" => {
                symbolic = true;
                0
            }
            "e" => {
                symbolic = true;
                EDGE
            }
            other => other
                .parse::<Label>()
                .ok()
                .filter(|&v| v != UNCOMMITTED)
                .map_or_else(|| parse_err(l, format!("bad label {other:?}")), Ok)?,
        };
        max_label = max_label.max(label);
        labels[site] = label;
    }
    if let Some(missing) = labels.iter().position(|&l| l == UNCOMMITTED) {
        return parse_err(last, format!("no label for site {missing}"));
    }
    let label_count = if symbolic { 2 } else { (max_label + 1).max(2) };
    Ok(Labeling {
        domain,
        label_count,
        config: Configuration::from_labels(labels),
    })
}

/// Renders a labeling on a 2x upsampled grid: pixel `(x, y)` lands on
/// `(2x, 2y)`, sites on the odd rows/columns between pixels. Edge sites and
/// any corner they touch are black; everything else copies the nearest
/// pixel, or white when there is no source image.
pub fn render_overlay(lattice: &EdgeLattice, image: Option<&Image>, config: &Configuration) -> Image {
    let (w, h) = (lattice.width(), lattice.height());
    let (ow, oh) = (2 * w, 2 * h);
    let mut px = vec![255u8; ow * oh];
    if let Some(img) = image {
        for y in 0..oh {
            for x in 0..ow {
                px[y * ow + x] = img.get((x / 2).min(w - 1), (y / 2).min(h - 1));
            }
        }
    }
    for s in 0..lattice.num_sites() {
        if config.get(s) != EDGE {
            continue;
        }
        let p = lattice.position(s);
        let (cx, cy) = match p.orientation {
            Orientation::Vertical => (2 * p.x + 1, 2 * p.y),
            Orientation::Horizontal => (2 * p.x, 2 * p.y + 1),
        };
        px[cy * ow + cx] = 0;
        // the corners at both ends of the segment
        let ends = match p.orientation {
            Orientation::Vertical => [(Some(cx), cy.checked_sub(1)), (Some(cx), Some(cy + 1))],
            Orientation::Horizontal => [(cx.checked_sub(1), Some(cy)), (Some(cx + 1), Some(cy))],
        };
        for (x, y) in ends {
            if let (Some(x), Some(y)) = (x, y) {
                if x < ow && y < oh {
                    px[y * ow + x] = 0;
                }
            }
        }
    }
    Image::new(ow, oh, px).expect("overlay dimensions")
}

// ---------------------------------------------------------------- config

/// Parses `key = value` lines. `#` starts a comment. Keys not in `allowed`
/// and repeated keys are errors.
pub fn read_config(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, (usize, String)>, FormatError> {
    let mut out = BTreeMap::new();
    for (l, raw) in lines(text) {
        let t = raw.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        let Some((k, v)) = t.split_once('=') else {
            return parse_err(l, format!("expected `key = value`, found {t:?}"));
        };
        let (k, v) = (k.trim(), v.trim());
        if !allowed.contains(&k) {
            return parse_err(l, format!("unknown key {k:?}"));
        }
        if out.insert(k.to_string(), (l, v.to_string())).is_some() {
            return parse_err(l, format!("key {k:?} given twice"));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- tables

pub const COMPARE_CSV_HEADER: &str = "method,energy_mean,energy_best,runs,iterations_mean";

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: String,
    pub energy_mean: f64,
    pub energy_best: f64,
    pub runs: usize,
    pub iterations_mean: f64,
}

pub fn write_compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(COMPARE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.method, r.energy_mean, r.energy_best, r.runs, r.iterations_mean
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pgm_with_comments() {
        let mut bytes = b"P5\n# made by hand\n3 2\n# another\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let img = read_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.get(2, 1), 6);
        assert_eq!(read_pgm(&write_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn pgm_errors_name_lines() {
        let err = read_pgm(b"P2\n2 2\n255\n1 2 3 4").unwrap_err().to_string();
        assert!(err.starts_with("line 1:"), "{err}");
        let err = read_pgm(b"P5\n2 2\n\n65535\n\0\0\0\0").unwrap_err().to_string();
        assert!(err.starts_with("line 4:"), "{err}");
        assert!(read_pgm(b"P5\n2 2\n255\n\0").is_err());
    }

    #[test]
    fn llr_errors_name_lines() {
        let err = read_llr("MRFLLR 1\n2 2\n0.5\nabc\n1\n2\n").unwrap_err().to_string();
        assert!(err.starts_with("line 4:"), "{err}");
        assert!(read_llr("MRFLLR 2\n2 2\n").is_err());
        assert!(read_llr("MRFLLR 1\n2 2\n1\n2\n3\n").is_err());
    }

    #[test]
    fn labeling_parse() {
        let l = read_labeling("MRFL 1\nchain 3\n0 e\n2 n\n1 n\n").unwrap();
        assert_eq!(l.domain, Domain::Chain { sites: 3 });
        assert_eq!(l.config.as_slice(), &[1, 0, 0]);
        let err = read_labeling("MRFL 1\nchain 3\n0 e\n0 n\n").unwrap_err().to_string();
        assert!(err.starts_with("line 4:"), "{err}");
        assert!(read_labeling("MRFL 1\nchain 2\n0 e\n").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let cfg = read_config("# comment\nsigma = 3 # trailing\n\nmu=10\n", &["sigma", "mu"]).unwrap();
        assert_eq!(cfg["sigma"], (2, "3".to_string()));
        assert_eq!(cfg["mu"], (4, "10".to_string()));
        let err = read_config("sigma = 1\nbogus = 2\n", &["sigma"]).unwrap_err().to_string();
        assert!(err.starts_with("line 2:"), "{err}");
        assert!(read_config("sigma\n", &["sigma"]).is_err());
    }

    #[test]
    fn overlay_marks_edges() {
        let lattice = EdgeLattice::new(2, 2).unwrap();
        let img = Image::new(2, 2, vec![10, 20, 30, 40]).unwrap();
        let config = Configuration::from_labels(vec![1, 0, 0, 0]);
        let o = render_overlay(&lattice, Some(&img), &config);
        assert_eq!((o.width(), o.height()), (4, 4));
        assert_eq!(o.get(1, 0), 0);
        assert_eq!(o.get(1, 1), 0);
        assert_eq!(o.get(0, 0), 10);
        assert_eq!(o.get(2, 2), 40);
    }

    proptest! {
        #[test]
        fn llr_round_trip(w in 2usize..6, h in 2usize..6, seed in any::<u64>()) {
            use rand::Rng as _;
            let n = EdgeLattice::new(w, h).unwrap().num_sites();
            let mut r = crate::rng::stream(seed, 0);
            let llrs: Vec<f64> = (0..n).map(|_| r.random_range(-1e3..1e3) * r.random::<f64>()).collect();
            let file = LlrFile { width: w, height: h, llrs };
            let back = read_llr(&write_llr(&file)).unwrap();
            prop_assert!(back.llrs.iter().zip(&file.llrs).all(|(a, b)| a.to_bits() == b.to_bits()));
            prop_assert_eq!(back, file);
        }

        #[test]
        fn labeling_round_trip(labels in prop::collection::vec(0u32..2, 12)) {
            let l = Labeling {
                domain: Domain::Lattice { width: 3, height: 3 },
                label_count: 2,
                config: Configuration::from_labels(labels),
            };
            prop_assert_eq!(read_labeling(&write_labeling(&l)).unwrap(), l);
        }
    }
}
