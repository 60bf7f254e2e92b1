use std::cmp::Ordering;
use std::path::Path;

use super::image::AspectImage;
use crate::error::{Error, Result};

/// Acquisition metadata needed to group items into sweeps.
pub trait AspectTagged {
    fn class_id(&self) -> usize;
    fn serial(&self) -> &str;
    fn depression_deg(&self) -> f64;
    fn aspect_deg(&self) -> f64;
    fn source_file(&self) -> &Path;
}

impl AspectTagged for AspectImage {
    fn class_id(&self) -> usize {
        self.class_id
    }
    fn serial(&self) -> &str {
        &self.serial
    }
    fn depression_deg(&self) -> f64 {
        self.depression_deg
    }
    fn aspect_deg(&self) -> f64 {
        self.aspect_deg
    }
    fn source_file(&self) -> &Path {
        &self.source_file
    }
}

/// Sweeps of one (class, serial, depression) group.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceGroup<T = AspectImage> {
    pub class_id: usize,
    pub serial: String,
    pub depression_deg: f64,
    /// Full-circle sweeps first, then the leftover sequence if any.
    pub sequences: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawSequenceSet<T = AspectImage> {
    pub groups: Vec<SequenceGroup<T>>,
}

impl<T> Default for RawSequenceSet<T> {
    fn default() -> Self {
        RawSequenceSet { groups: Vec::new() }
    }
}

impl<T> RawSequenceSet<T> {
    pub fn sequence_count(&self) -> usize {
        self.groups.iter().map(|g| g.sequences.len()).sum()
    }

    pub fn image_count(&self) -> usize {
        self.groups
            .iter()
            .flat_map(|g| &g.sequences)
            .map(Vec::len)
            .sum()
    }

    /// `(group, sequence)` pairs in order with a stable identifier.
    pub fn iter(&self) -> impl Iterator<Item = (String, &SequenceGroup<T>, &Vec<T>)> {
        self.groups.iter().flat_map(|g| {
            g.sequences.iter().enumerate().map(move |(j, s)| {
                (
                    format!("c{}-{}-d{}-seq{}", g.class_id, g.serial, g.depression_deg, j + 1),
                    g,
                    s,
                )
            })
        })
    }
}

fn group_key_cmp<T: AspectTagged>(a: &T, b: &T) -> Ordering {
    a.class_id()
        .cmp(&b.class_id())
        .then_with(|| a.serial().cmp(b.serial()))
        .then_with(|| a.depression_deg().total_cmp(&b.depression_deg()))
}

fn same_group<T: AspectTagged>(a: &T, b: &T) -> bool {
    group_key_cmp(a, b) == Ordering::Equal
}

/// Splits each (class, serial, depression) group into sweeps.
///
/// Images are sorted by aspect and bucketed into fixed `bin_deg` aspect
/// bins. Within a bin the j-th image goes to sweep j for `j < circles`;
/// any further images go to one leftover sequence. Empty sweeps are
/// dropped, so a group with one image per bin yields a single sequence.
pub fn build_sequences<T: AspectTagged>(
    mut images: Vec<T>,
    circles: usize,
    bin_deg: f64,
) -> Result<RawSequenceSet<T>> {
    if images.is_empty() {
        return Err(Error::invalid("no images to build sequences from"));
    }
    if circles == 0 {
        return Err(Error::invalid("circles must be >= 1"));
    }
    if !(bin_deg > 0.0 && bin_deg.is_finite()) {
        return Err(Error::invalid(format!("aspect bin width must be > 0, got {bin_deg}")));
    }
    images.sort_by(|a, b| {
        group_key_cmp(a, b)
            .then_with(|| a.aspect_deg().total_cmp(&b.aspect_deg()))
            .then_with(|| a.source_file().cmp(b.source_file()))
    });
    let mut groups = Vec::new();
    let mut rest = images.into_iter().peekable();
    while let Some(first) = rest.next() {
        let mut members = vec![first];
        while rest.peek().is_some_and(|n| same_group(&members[0], n)) {
            members.push(rest.next().unwrap());
        }
        let (class_id, serial, depression_deg) = (
            members[0].class_id(),
            members[0].serial().to_string(),
            members[0].depression_deg(),
        );
        let mut sweeps: Vec<Vec<T>> = (0..=circles).map(|_| Vec::new()).collect();
        let mut bin = i64::MIN;
        let mut j = 0usize;
        for img in members {
            let b = (img.aspect_deg() / bin_deg).floor() as i64;
            if b != bin {
                bin = b;
                j = 0;
            }
            sweeps[j.min(circles)].push(img);
            j += 1;
        }
        sweeps.retain(|s| !s.is_empty());
        groups.push(SequenceGroup {
            class_id,
            serial,
            depression_deg,
            sequences: sweeps,
        });
    }
    Ok(RawSequenceSet { groups })
}

/// Largest gap between consecutive aspects of a sorted sweep, counting the
/// wrap from the last aspect back to the first.
pub fn max_wrapped_gap(aspects: &[f64]) -> f64 {
    match aspects.len() {
        0 => 360.0,
        1 => 360.0,
        n => {
            let inner = aspects.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            inner.max(aspects[0] + 360.0 - aspects[n - 1])
        }
    }
}
