//! Undecimated dyadic wavelet decomposition.
//!
//! The transform is the à trous scheme driven by a Daubechies scaling
//! filter rescaled by 1/√2 (so it sums to one). At level `j` the filter is
//! dilated by `2^(j-1)`:
//!
//! ```text
//! c_0 = y
//! c_j[t] = Σ_k h̃[k] · c_{j-1}[t - k·2^(j-1)]
//! D_j   = c_{j-1} - c_j
//! A_J   = c_J
//! ```
//!
//! Every component keeps the input length and time axis, and
//! `Σ D_j + A_J = y` holds up to rounding. The filters only look backwards
//! in time, so the boundary rule only touches the start of the series and
//! the most recent component values never depend on an extension of the
//! future.

mod filter;

use std::fmt;
use std::str::FromStr;

pub use filter::{make_filter, WaveletFilter, SUPPORTED_FILTERS};

use crate::error::{check_finite, Error, Result};

/// Extension rule for samples before the start of the series.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Wrap around to the end of the series.
    Periodic,
    /// Mirror about the first sample (half-sample symmetric).
    #[default]
    Reflect,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Reflect => "reflect",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" => Ok(Boundary::Periodic),
            "reflect" => Ok(Boundary::Reflect),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary `{other}` (expected periodic or reflect)"
            ))),
        }
    }
}

/// Filter, depth and boundary rule of a dyadic decomposition.
///
/// The grid is always dyadic: dilation 2, translation 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionSpec {
    filter: WaveletFilter,
    levels: usize,
    boundary: Boundary,
}

pub const DEFAULT_FILTER: &str = "db4";
pub const DEFAULT_LEVELS: usize = 9;

impl DecompositionSpec {
    pub fn new(filter: WaveletFilter, levels: usize, boundary: Boundary) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParameter(
                "decomposition needs at least one level".into(),
            ));
        }
        // Keep 2^(levels-1) well inside usize.
        if levels > 40 {
            return Err(Error::InvalidParameter(format!(
                "{levels} levels is beyond any practical series length"
            )));
        }
        Ok(Self {
            filter,
            levels,
            boundary,
        })
    }

    pub fn filter(&self) -> &WaveletFilter {
        &self.filter
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub const fn dilation(&self) -> usize {
        2
    }

    pub const fn translation(&self) -> usize {
        1
    }

    /// Support of the dilated filter at the deepest level: `(L-1)·2^(J-1) + 1`.
    pub fn deepest_support(&self) -> usize {
        upsampled_support(self.filter.len(), self.levels)
    }

    /// Checks that a series of length `n` can carry this many levels.
    pub fn check_length(&self, n: usize) -> Result<()> {
        if self.deepest_support() > n {
            return Err(Error::SeriesTooShort {
                len: n,
                levels: self.levels,
                filter_len: self.filter.len(),
                max_levels: max_levels(n, self.filter.len()),
            });
        }
        Ok(())
    }
}

impl Default for DecompositionSpec {
    fn default() -> Self {
        Self {
            filter: make_filter(DEFAULT_FILTER).expect("default filter exists"),
            levels: DEFAULT_LEVELS,
            boundary: Boundary::Reflect,
        }
    }
}

fn upsampled_support(filter_len: usize, level: usize) -> usize {
    (filter_len - 1) * (1usize << (level - 1)) + 1
}

/// Largest `J` whose level-J dilated filter fits in `n` samples (0 if none).
pub fn max_levels(n: usize, filter_len: usize) -> usize {
    let mut j = 0;
    while j < 40 && upsampled_support(filter_len, j + 1) <= n {
        j += 1;
    }
    j
}

/// `J` detail series plus one smooth series, all aligned with the input.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    spec: DecompositionSpec,
    details: Vec<Vec<f64>>,
    smooth: Vec<f64>,
}

impl Decomposition {
    /// Assembles a decomposition from raw parts without validating lengths;
    /// [`reconstruct`] rejects inconsistent parts.
    pub fn from_parts(spec: DecompositionSpec, details: Vec<Vec<f64>>, smooth: Vec<f64>) -> Self {
        Self {
            spec,
            details,
            smooth,
        }
    }

    pub fn spec(&self) -> &DecompositionSpec {
        &self.spec
    }

    /// Detail series, finest (level 1) first.
    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    /// Detail series at `level` (1-based).
    pub fn detail(&self, level: usize) -> Option<&[f64]> {
        level
            .checked_sub(1)
            .and_then(|i| self.details.get(i))
            .map(Vec::as_slice)
    }

    pub fn smooth(&self) -> &[f64] {
        &self.smooth
    }

    pub fn original_length(&self) -> usize {
        self.smooth.len()
    }

    /// All components in level order: `D_1, …, D_J, A_J`.
    pub fn components(&self) -> impl Iterator<Item = &[f64]> {
        self.details
            .iter()
            .map(Vec::as_slice)
            .chain(std::iter::once(self.smooth.as_slice()))
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        let mut out = self.details;
        out.push(self.smooth);
        out
    }
}

#[inline]
fn source_index(t: usize, offset: usize, n: usize, boundary: Boundary) -> usize {
    if offset <= t {
        return t - offset;
    }
    let back = offset - t; // how far before index 0, >= 1
    match boundary {
        Boundary::Periodic => (n - back % n) % n,
        Boundary::Reflect => {
            // x[-i] = x[i-1], folded with period 2n.
            let p = (back - 1) % (2 * n);
            if p < n {
                p
            } else {
                2 * n - 1 - p
            }
        }
    }
}

/// Splits `series` into `J` detail components and one smooth component.
pub fn decompose(series: &[f64], spec: &DecompositionSpec) -> Result<Decomposition> {
    check_finite(series)?;
    spec.check_length(series.len())?;

    let n = series.len();
    let taps: Vec<f64> = spec
        .filter
        .scaling()
        .iter()
        .map(|h| h * std::f64::consts::FRAC_1_SQRT_2)
        .collect();

    let mut details = Vec::with_capacity(spec.levels);
    let mut current = series.to_vec();
    for level in 1..=spec.levels {
        let step = 1usize << (level - 1);
        let next: Vec<f64> = (0..n)
            .map(|t| {
                taps.iter()
                    .enumerate()
                    .map(|(k, hk)| hk * current[source_index(t, k * step, n, spec.boundary)])
                    .sum()
            })
            .collect();
        details.push(current.iter().zip(&next).map(|(c, s)| c - s).collect());
        current = next;
    }

    Ok(Decomposition {
        spec: spec.clone(),
        details,
        smooth: current,
    })
}

/// Sums all components back into a series.
pub fn reconstruct(d: &Decomposition) -> Result<Vec<f64>> {
    let n = d.smooth.len();
    if d.details.len() != d.spec.levels {
        return Err(Error::LengthMismatch(format!(
            "expected {} detail series, found {}",
            d.spec.levels,
            d.details.len()
        )));
    }
    for (i, detail) in d.details.iter().enumerate() {
        if detail.len() != n {
            return Err(Error::LengthMismatch(format!(
                "detail level {} has length {}, smooth has length {n}",
                i + 1,
                detail.len()
            )));
        }
    }
    let mut out = d.smooth.clone();
    for detail in &d.details {
        for (o, v) in out.iter_mut().zip(detail) {
            *o += v;
        }
    }
    Ok(out)
}
