//! Fields, configurations and Gibbs energies.
//!
//! A [`Field`] is the neighborhood graph together with its clique potentials,
//! a [`DataTerm`] holds the per-site observation energies, and a
//! [`Configuration`] assigns each site either a label or [`UNCOMMITTED`].
//!
//! All energy sums run over cliques in ascending clique id and then over
//! sites in ascending site id, so results are bit-reproducible.

use std::fmt;

use crate::error::{MrfError, Result};

/// Index of a committed label, `0..count`.
pub type Label = u32;

/// The distinguished "not yet labeled" state. Never a member of `0..count`.
pub const UNCOMMITTED: Label = Label::MAX;

/// Number of labels available at every site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelSet {
    count: u32,
}

impl LabelSet {
    pub fn new(count: u32) -> Result<Self> {
        if count == 0 || count == UNCOMMITTED {
            return Err(MrfError::InvalidParameter(format!(
                "label count must be in 1..{UNCOMMITTED}, got {count}"
            )));
        }
        Ok(Self { count })
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn contains(&self, label: Label) -> bool {
        label < self.count
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> {
        0..self.count
    }
}

/// A clique of the neighborhood graph with a dense potential table.
///
/// The table is row-major over the members: the entry for labels
/// `(l_0, .., l_{k-1})` lives at `((l_0 * L + l_1) * L + ..) + l_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Clique {
    members: Vec<usize>,
    table: Vec<f64>,
}

impl Clique {
    pub fn new(members: Vec<usize>, table: Vec<f64>) -> Self {
        Self { members, table }
    }

    /// Unary clique with one energy per label.
    pub fn unary(site: usize, table: Vec<f64>) -> Self {
        Self::new(vec![site], table)
    }

    /// Pair clique; `table[a * L + b]` is the energy of `(a, b)`.
    pub fn pair(a: usize, b: usize, table: Vec<f64>) -> Self {
        Self::new(vec![a, b], table)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Potential for committed member labels given in member order.
    pub fn potential(&self, labels: &[Label], label_count: u32) -> f64 {
        let idx = labels
            .iter()
            .fold(0usize, |acc, &l| acc * label_count as usize + l as usize);
        self.table[idx]
    }
}

/// The neighborhood graph with its cliques.
///
/// Construction checks shapes (site ids in range, table sizes). Graph-level
/// invariants (symmetry, cliques inducing complete subgraphs) are reported
/// by [`validate_field`] so that malformed fields can still be inspected.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    labels: LabelSet,
    adjacency: Vec<Vec<usize>>,
    cliques: Vec<Clique>,
    incident: Vec<Vec<usize>>,
}

impl Field {
    pub fn new(labels: LabelSet, adjacency: Vec<Vec<usize>>, cliques: Vec<Clique>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(MrfError::Shape("a field needs at least one site".into()));
        }
        for (s, nbrs) in adjacency.iter().enumerate() {
            if let Some(&r) = nbrs.iter().find(|&&r| r >= n) {
                return Err(MrfError::Shape(format!(
                    "site {s} lists neighbor {r}, but there are only {n} sites"
                )));
            }
        }
        let l = labels.count() as usize;
        let mut incident = vec![Vec::new(); n];
        for (c, clique) in cliques.iter().enumerate() {
            if clique.members.is_empty() {
                return Err(MrfError::Shape(format!("clique {c} has no members")));
            }
            if let Some(&m) = clique.members.iter().find(|&&m| m >= n) {
                return Err(MrfError::Shape(format!(
                    "clique {c} references site {m}, but there are only {n} sites"
                )));
            }
            let expected = u32::try_from(clique.members.len())
                .ok()
                .and_then(|k| l.checked_pow(k));
            if expected != Some(clique.table.len()) {
                return Err(MrfError::Shape(format!(
                    "clique {c} has {} table entries, expected {}^{}",
                    clique.table.len(),
                    l,
                    clique.members.len()
                )));
            }
            for &m in &clique.members {
                if incident[m].last() != Some(&c) {
                    incident[m].push(c);
                }
            }
        }
        Ok(Self {
            labels,
            adjacency,
            cliques,
            incident,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.adjacency.len()
    }

    pub fn labels(&self) -> LabelSet {
        self.labels
    }

    pub fn label_count(&self) -> u32 {
        self.labels.count()
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.adjacency[site]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    /// Ids of the cliques containing `site`, ascending.
    pub fn incident_cliques(&self, site: usize) -> &[usize] {
        &self.incident[site]
    }

    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(&b)
    }
}

/// Per-site, per-label observation energies `D_s(l)`.
///
/// Only differences between labels at a site matter to the estimators, so
/// any per-site constant may be folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTerm {
    label_count: usize,
    values: Vec<f64>,
}

impl DataTerm {
    /// `values` is row-major, `num_sites x label_count`.
    pub fn new(label_count: u32, values: Vec<f64>) -> Result<Self> {
        let lc = label_count as usize;
        if lc == 0 || !values.len().is_multiple_of(lc) || values.is_empty() {
            return Err(MrfError::Shape(format!(
                "{} data values do not form rows of {label_count} labels",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MrfError::InvalidParameter(format!(
                "data value for site {} label {} is not finite",
                i / lc,
                i % lc
            )));
        }
        Ok(Self {
            label_count: lc,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let lc = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != lc) {
            return Err(MrfError::Shape("data rows differ in length".into()));
        }
        Self::new(lc as u32, rows.concat())
    }

    /// All-zero data term.
    pub fn zeros(num_sites: usize, label_count: u32) -> Self {
        Self {
            label_count: label_count as usize,
            values: vec![0.0; num_sites * label_count as usize],
        }
    }

    pub fn num_sites(&self) -> usize {
        self.values.len() / self.label_count
    }

    pub fn label_count(&self) -> u32 {
        self.label_count as u32
    }

    pub fn get(&self, site: usize, label: Label) -> f64 {
        self.values[site * self.label_count + label as usize]
    }

    pub fn site(&self, site: usize) -> &[f64] {
        &self.values[site * self.label_count..(site + 1) * self.label_count]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checks that the shape matches `field`.
    pub fn check_against(&self, field: &Field) -> Result<()> {
        if self.num_sites() != field.num_sites() || self.label_count() != field.label_count() {
            return Err(MrfError::Shape(format!(
                "data term is {}x{}, field is {}x{}",
                self.num_sites(),
                self.label_count(),
                field.num_sites(),
                field.label_count()
            )));
        }
        Ok(())
    }
}

/// A label (or [`UNCOMMITTED`]) for every site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    labels: Vec<Label>,
}

impl Configuration {
    pub fn uncommitted(num_sites: usize) -> Self {
        Self {
            labels: vec![UNCOMMITTED; num_sites],
        }
    }

    pub fn uniform(num_sites: usize, label: Label) -> Self {
        Self {
            labels: vec![label; num_sites],
        }
    }

    pub fn from_labels(labels: Vec<Label>) -> Self {
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, site: usize) -> Label {
        self.labels[site]
    }

    pub fn set(&mut self, site: usize, label: Label) {
        self.labels[site] = label;
    }

    pub fn is_committed(&self, site: usize) -> bool {
        self.labels[site] != UNCOMMITTED
    }

    pub fn is_fully_committed(&self) -> bool {
        self.labels.iter().all(|&l| l != UNCOMMITTED)
    }

    pub fn committed_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != UNCOMMITTED).count()
    }

    pub fn first_uncommitted(&self) -> Option<usize> {
        self.labels.iter().position(|&l| l == UNCOMMITTED)
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<Label> {
        self.labels
    }

    /// Copy with `site` set to `label`.
    pub fn with(&self, site: usize, label: Label) -> Self {
        let mut next = self.clone();
        next.labels[site] = label;
        next
    }

    /// Checks length and that every committed entry is a valid label.
    pub fn check_against(&self, field: &Field) -> Result<()> {
        if self.len() != field.num_sites() {
            return Err(MrfError::Shape(format!(
                "configuration has {} sites, field has {}",
                self.len(),
                field.num_sites()
            )));
        }
        let labels = field.labels();
        if let Some(site) = self
            .labels
            .iter()
            .position(|&l| l != UNCOMMITTED && !labels.contains(l))
        {
            return Err(MrfError::LabelOutOfRange {
                site,
                label: self.labels[site],
                count: labels.count(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if l == UNCOMMITTED {
                f.write_str("?")?;
            } else {
                write!(f, "{l}")?;
            }
        }
        Ok(())
    }
}

fn clique_value(field: &Field, clique: &Clique, labels: &[Label], scratch: &mut Vec<Label>) -> Option<f64> {
    scratch.clear();
    for &m in &clique.members {
        let l = labels[m];
        if l == UNCOMMITTED {
            return None;
        }
        scratch.push(l);
    }
    Some(clique.potential(scratch, field.label_count()))
}

/// Full Gibbs energy `sum_c V_c + sum_s D_s` of a fully committed configuration.
pub fn energy(field: &Field, data: &DataTerm, config: &Configuration) -> Result<f64> {
    data.check_against(field)?;
    config.check_against(field)?;
    if let Some(site) = config.first_uncommitted() {
        return Err(MrfError::Uncommitted { site });
    }
    Ok(augmented_energy(field, data, config))
}

/// Energy with cliques touching an uncommitted site suppressed, and
/// uncommitted sites contributing no data term. Equals [`energy`] on fully
/// committed configurations.
///
/// Panics if the data term or configuration does not fit the field.
pub fn augmented_energy(field: &Field, data: &DataTerm, config: &Configuration) -> f64 {
    let labels = config.as_slice();
    let mut scratch = Vec::with_capacity(4);
    let mut total = 0.0;
    for clique in &field.cliques {
        if let Some(v) = clique_value(field, clique, labels, &mut scratch) {
            total += v;
        }
    }
    for (s, &l) in labels.iter().enumerate() {
        if l != UNCOMMITTED {
            total += data.get(s, l);
        }
    }
    total
}

/// Augmented local energy `E_s(label)`: the incident cliques evaluated with
/// `site` set to `label` (suppressed if any other member is uncommitted),
/// plus the site's own data term.
pub fn local_energy(
    field: &Field,
    data: &DataTerm,
    config: &Configuration,
    site: usize,
    label: Label,
) -> Result<f64> {
    data.check_against(field)?;
    config.check_against(field)?;
    if site >= field.num_sites() {
        return Err(MrfError::Shape(format!("site {site} out of range")));
    }
    if !field.labels().contains(label) {
        return Err(MrfError::LabelOutOfRange {
            site,
            label,
            count: field.label_count(),
        });
    }
    Ok(local_energy_unchecked(field, data, config.as_slice(), site, label))
}

pub(crate) fn local_energy_unchecked(
    field: &Field,
    data: &DataTerm,
    labels: &[Label],
    site: usize,
    label: Label,
) -> f64 {
    let lc = field.label_count() as usize;
    let mut total = 0.0;
    'cliques: for &c in &field.incident[site] {
        let clique = &field.cliques[c];
        let mut idx = 0usize;
        for &m in &clique.members {
            let l = if m == site { label } else { labels[m] };
            if l == UNCOMMITTED {
                continue 'cliques;
            }
            idx = idx * lc + l as usize;
        }
        total += clique.table[idx];
    }
    total + data.get(site, label)
}

/// Local energies `E_s(l)` for every label, written into `out`.
pub(crate) fn local_energies_into(
    field: &Field,
    data: &DataTerm,
    labels: &[Label],
    site: usize,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.extend(field.labels().iter().map(|l| local_energy_unchecked(field, data, labels, site, l)));
}

/// A broken field invariant, naming the offending site or clique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { site: usize },
    DuplicateNeighbor { site: usize, neighbor: usize },
    Asymmetric { site: usize, neighbor: usize },
    RepeatedMember { clique: usize, site: usize },
    NonAdjacentMembers { clique: usize, a: usize, b: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::SelfLoop { site } => write!(f, "site {site} lists itself as a neighbor"),
            Violation::DuplicateNeighbor { site, neighbor } => {
                write!(f, "site {site} lists neighbor {neighbor} more than once")
            }
            Violation::Asymmetric { site, neighbor } => write!(
                f,
                "site {neighbor} is a neighbor of {site} but not the other way round"
            ),
            Violation::RepeatedMember { clique, site } => {
                write!(f, "clique {clique} repeats site {site}")
            }
            Violation::NonAdjacentMembers { clique, a, b } => {
                write!(f, "clique {clique} joins non-adjacent sites {a} and {b}")
            }
        }
    }
}

/// Lists every violated field invariant; empty iff the field is well formed.
pub fn validate_field(field: &Field) -> Vec<Violation> {
    let mut out = Vec::new();
    for (s, nbrs) in field.adjacency.iter().enumerate() {
        for (i, &r) in nbrs.iter().enumerate() {
            if r == s {
                out.push(Violation::SelfLoop { site: s });
                continue;
            }
            if nbrs[..i].contains(&r) {
                out.push(Violation::DuplicateNeighbor { site: s, neighbor: r });
                continue;
            }
            if !field.adjacency[r].contains(&s) {
                out.push(Violation::Asymmetric { site: s, neighbor: r });
            }
        }
    }
    for (c, clique) in field.cliques.iter().enumerate() {
        let m = &clique.members;
        for i in 0..m.len() {
            if m[..i].contains(&m[i]) {
                out.push(Violation::RepeatedMember { clique: c, site: m[i] });
                continue;
            }
            for j in i + 1..m.len() {
                if m[i] != m[j] && !field.are_neighbors(m[i], m[j]) {
                    out.push(Violation::NonAdjacentMembers { clique: c, a: m[i], b: m[j] });
                }
            }
        }
    }
    out
}

/// Rejects fields, data terms and label sets the estimators cannot run on.
pub(crate) fn check_estimator_inputs(field: &Field, data: &DataTerm) -> Result<()> {
    data.check_against(field)?;
    let violations = validate_field(field);
    if let Some(v) = violations.first() {
        return Err(MrfError::InvalidField(format!(
            "{v} ({} violation(s) in total)",
            violations.len()
        )));
    }
    if field.label_count() < 2 {
        return Err(MrfError::SingleLabel);
    }
    Ok(())
}
