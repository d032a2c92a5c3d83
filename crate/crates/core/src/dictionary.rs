//! Reference-signal dictionaries.
//!
//! The distortion block is linear in the unknown channel products once the
//! nonlinear polynomial is expanded term by term. Each expansion term is a
//! product of delayed (possibly conjugated) powers of the uplink baseband
//! signals; materializing every term over a block of `P` samples yields the
//! `P x J` reference matrix whose columns the estimators combine.
//!
//! Three models are built here:
//!
//! * `Exact`: the full multinomial expansion of the filtered-then-distorted
//!   signal. For one source of order `Q` over an `L`-tap channel this has
//!   `C(Q+L-1, L-1)` columns; a two-source product multiplies the per-source
//!   counts.
//! * `PriorArt`: one column per lag pair, each source raised to its whole
//!   exponent at a single lag (`u1^|p|(n-k1) * u2^|q|(n-k2)`), as if each
//!   source were distorted before its channel. Misses every cross-lag term.
//! * `Hammerstein`: static nonlinearity followed by one shared filter: one
//!   column per shared lag `k`, `u1^|p|(n-k) * u2^|q|(n-k)`.
//!
//! Columns are stored with unit 2-norm; the original norms are retained so
//! coefficient estimates can be mapped back to the raw reference signals.
//! Multinomial coefficients are not baked into columns; they are absorbed
//! into the estimated coefficients, which is what makes the expansion linear
//! in new parameters.

use num_complex::Complex64;
use std::fmt;

use crate::distortion::{DistortionKind, DistortionSpec};
use crate::error::{Error, Result};
use crate::signal::BasebandSignal;

/// One delayed-power factor of a term: `sig(n - lag)^exponent`, optionally
/// conjugated first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermFactor {
    pub lag: usize,
    pub exponent: u32,
    pub conjugated: bool,
}

/// A dictionary column described symbolically: one factor list per source
/// (one source for harmonic terms, two for inter-modulation terms).
///
/// Within a source, lags are strictly increasing and the exponents sum to
/// that source's total exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermDescriptor {
    pub sources: Vec<Vec<TermFactor>>,
}

impl TermDescriptor {
    /// Structural well-formedness: nonempty factor lists, positive exponents,
    /// strictly increasing lags per source.
    pub fn is_well_formed(&self) -> bool {
        !self.sources.is_empty()
            && self.sources.iter().all(|factors| {
                !factors.is_empty()
                    && factors.iter().all(|f| f.exponent >= 1)
                    && factors.windows(2).all(|w| w[0].lag < w[1].lag)
            })
    }

    /// Sum of exponents for source `i`.
    pub fn source_order(&self, i: usize) -> u32 {
        self.sources[i].iter().map(|f| f.exponent).sum()
    }
}

impl fmt::Display for TermDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, factors) in self.sources.iter().enumerate() {
            for factor in factors {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if factor.conjugated {
                    write!(f, "conj(s{})[{}]", i + 1, factor.lag)?;
                } else {
                    write!(f, "s{}[{}]", i + 1, factor.lag)?;
                }
                if factor.exponent > 1 {
                    write!(f, "^{}", factor.exponent)?;
                }
            }
        }
        Ok(())
    }
}

/// Model-length argument of [`build_dictionary`]: one channel length for
/// single-source models, a pair for two-source models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lengths {
    Single(usize),
    Pair(usize, usize),
}

/// Which construction produced a dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Exact,
    PriorArt,
    Hammerstein,
    /// Columns supplied directly by the caller (no symbolic terms).
    External,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Exact => "exact",
            ModelKind::PriorArt => "prior",
            ModelKind::Hammerstein => "hammerstein",
            ModelKind::External => "external",
        };
        f.write_str(s)
    }
}

/// `C(n, k)` with an explicit overflow error.
fn binomial(n: u64, k: u64) -> Result<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k})")))?;
        acc /= i as u128;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("C({n}, {k})")))
}

/// Number of exact-model columns for one source of order `order` over an
/// `len`-tap channel: `C(order + len - 1, len - 1)`.
pub fn hd_term_count(order: u32, len: usize) -> Result<u64> {
    if order == 0 || len == 0 {
        return Err(Error::InvalidArgument(
            "order and channel length must be >= 1".into(),
        ));
    }
    binomial(order as u64 + len as u64 - 1, len as u64 - 1)
}

/// Number of exact-model columns for a two-source inter-modulation term:
/// the product of the per-source counts.
pub fn imd_term_count(p: i32, q: i32, len1: usize, len2: usize) -> Result<u64> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(
            "inter-modulation exponents must be nonzero".into(),
        ));
    }
    let a = hd_term_count(p.unsigned_abs(), len1)?;
    let b = hd_term_count(q.unsigned_abs(), len2)?;
    a.checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("{a} * {b} exact-model columns")))
}

/// All exponent vectors of length `slots` summing to `total`, in descending
/// lexicographic order. `(3, 2)` yields `(3,0), (2,1), (1,2), (0,3)`.
fn compositions(total: u32, slots: usize) -> Vec<Vec<u32>> {
    fn rec(slot: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = remaining;
            out.push(cur.clone());
            return;
        }
        for e in (0..=remaining).rev() {
            cur[slot] = e;
            rec(slot + 1, remaining - e, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; slots];
    rec(0, total, &mut cur, &mut out);
    out
}

fn factors_from_exponents(exponents: &[u32], conjugated: bool) -> Vec<TermFactor> {
    exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(lag, &e)| TermFactor {
            lag,
            exponent: e,
            conjugated,
        })
        .collect()
}

/// Enumerate the exact-model terms for a distortion spec in the canonical
/// (descending lexicographic per source, first source outermost) order.
/// Sources with a negative exponent carry conjugation on every factor.
pub fn enumerate_terms(spec: &DistortionSpec, lengths: Lengths) -> Result<Vec<TermDescriptor>> {
    match (spec.kind(), lengths) {
        (DistortionKind::Harmonic { order }, Lengths::Single(len)) => {
            if len == 0 {
                return Err(Error::InvalidArgument("model length must be >= 1".into()));
            }
            Ok(compositions(order, len)
                .iter()
                .map(|e| TermDescriptor {
                    sources: vec![factors_from_exponents(e, false)],
                })
                .collect())
        }
        (DistortionKind::Intermod { p, q }, Lengths::Pair(len1, len2)) => {
            if len1 == 0 || len2 == 0 {
                return Err(Error::InvalidArgument("model lengths must be >= 1".into()));
            }
            let first = compositions(p.unsigned_abs(), len1);
            let second = compositions(q.unsigned_abs(), len2);
            let mut terms = Vec::with_capacity(first.len() * second.len());
            for e1 in &first {
                for e2 in &second {
                    terms.push(TermDescriptor {
                        sources: vec![
                            factors_from_exponents(e1, p < 0),
                            factors_from_exponents(e2, q < 0),
                        ],
                    });
                }
            }
            Ok(terms)
        }
        (DistortionKind::Harmonic { .. }, Lengths::Pair(..)) => Err(Error::InvalidArgument(
            "harmonic spec takes a single model length".into(),
        )),
        (DistortionKind::Intermod { .. }, Lengths::Single(..)) => Err(Error::InvalidArgument(
            "inter-modulation spec takes a pair of model lengths".into(),
        )),
    }
}

/// A `P x J` reference matrix: unit-norm columns, their symbolic terms, and
/// the pre-normalization column norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    rows: usize,
    columns: Vec<Vec<Complex64>>,
    norms: Vec<f64>,
    terms: Vec<TermDescriptor>,
    model: ModelKind,
}

impl Dictionary {
    /// Wrap caller-supplied raw columns (normalizing them) into a dictionary
    /// with no symbolic terms. Intended for externally measured reference
    /// signals and synthetic test matrices.
    pub fn from_columns(raw_columns: Vec<Vec<Complex64>>) -> Result<Dictionary> {
        if raw_columns.is_empty() {
            return Err(Error::InvalidArgument(
                "dictionary needs at least one column".into(),
            ));
        }
        let rows = raw_columns[0].len();
        if rows == 0 {
            return Err(Error::InvalidArgument("columns must be nonempty".into()));
        }
        if let Some(bad) = raw_columns.iter().find(|c| c.len() != rows) {
            return Err(Error::LengthMismatch {
                context: "dictionary columns",
                expected: rows,
                got: bad.len(),
            });
        }
        let mut columns = Vec::with_capacity(raw_columns.len());
        let mut norms = Vec::with_capacity(raw_columns.len());
        for (j, raw) in raw_columns.into_iter().enumerate() {
            let (col, norm) = normalize_column(raw, || format!("column {j}"))?;
            columns.push(col);
            norms.push(norm);
        }
        Ok(Dictionary {
            rows,
            columns,
            norms,
            terms: Vec::new(),
            model: ModelKind::External,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Unit-norm column `j`.
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.columns[j]
    }

    /// Pre-normalization 2-norms, one per column.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Symbolic terms (empty for [`ModelKind::External`] dictionaries).
    pub fn terms(&self) -> &[TermDescriptor] {
        &self.terms
    }

    pub fn term(&self, j: usize) -> Option<&TermDescriptor> {
        self.terms.get(j)
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    /// The raw (de-normalized) reference signal behind column `j`.
    pub fn raw_column(&self, j: usize) -> Vec<Complex64> {
        let norm = self.norms[j];
        self.columns[j].iter().map(|&v| v * norm).collect()
    }

    /// Conjugate inner product of column `j` with a vector: `d_j^H v`.
    pub fn correlate(&self, j: usize, v: &[Complex64]) -> Complex64 {
        debug_assert_eq!(v.len(), self.rows);
        self.columns[j]
            .iter()
            .zip(v)
            .map(|(&d, &x)| d.conj() * x)
            .sum()
    }
}

fn normalize_column(
    mut raw: Vec<Complex64>,
    describe: impl Fn() -> String,
) -> Result<(Vec<Complex64>, f64)> {
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite reference column: {}",
            describe()
        )));
    }
    let norm = raw.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateInput(format!(
            "all-zero reference column: {}",
            describe()
        )));
    }
    for v in &mut raw {
        *v /= norm;
    }
    Ok((raw, norm))
}

/// Materialize one term over `rows` samples with the zero-prefix convention.
fn materialize(term: &TermDescriptor, signals: &[&BasebandSignal], rows: usize) -> Vec<Complex64> {
    let max_lag = term
        .sources
        .iter()
        .flat_map(|fs| fs.iter().map(|f| f.lag))
        .max()
        .unwrap_or(0);
    (0..rows)
        .map(|n| {
            if n < max_lag {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = Complex64::new(1.0, 0.0);
            for (i, factors) in term.sources.iter().enumerate() {
                let samples = signals[i].samples();
                for f in factors {
                    let mut v = samples[n - f.lag];
                    if f.conjugated {
                        v = v.conj();
                    }
                    acc *= v.powu(f.exponent);
                }
            }
            acc
        })
        .collect()
}

/// Build the reference dictionary for `model` from the uplink baseband
/// blocks. `s2` is required exactly when the spec is inter-modulation.
///
/// For `Hammerstein`, `lengths` must be `Single(taps)`: the tap budget sets
/// the column count directly. `PriorArt` is only defined for
/// inter-modulation specs.
pub fn build_dictionary(
    model: ModelKind,
    s1: &BasebandSignal,
    s2: Option<&BasebandSignal>,
    spec: &DistortionSpec,
    lengths: Lengths,
) -> Result<Dictionary> {
    let is_imd = matches!(spec.kind(), DistortionKind::Intermod { .. });
    if is_imd && s2.is_none() {
        return Err(Error::InvalidArgument(
            "inter-modulation dictionary needs a second uplink signal".into(),
        ));
    }
    if !is_imd && s2.is_some() {
        return Err(Error::InvalidArgument(
            "harmonic dictionary takes a single uplink signal".into(),
        ));
    }
    if let Some(s2) = s2 {
        if s2.len() != s1.len() {
            return Err(Error::LengthMismatch {
                context: "uplink signal blocks",
                expected: s1.len(),
                got: s2.len(),
            });
        }
    }

    let terms = match model {
        ModelKind::Exact => enumerate_terms(spec, lengths)?,
        ModelKind::PriorArt => prior_art_terms(spec, lengths)?,
        ModelKind::Hammerstein => hammerstein_terms(spec, lengths)?,
        ModelKind::External => {
            return Err(Error::InvalidArgument(
                "external dictionaries are built with Dictionary::from_columns".into(),
            ))
        }
    };

    let signals: Vec<&BasebandSignal> = match s2 {
        Some(s2) => vec![s1, s2],
        None => vec![s1],
    };
    let rows = s1.len();
    let mut columns = Vec::with_capacity(terms.len());
    let mut norms = Vec::with_capacity(terms.len());
    for term in &terms {
        let raw = materialize(term, &signals, rows);
        let (col, norm) = normalize_column(raw, || term.to_string())?;
        columns.push(col);
        norms.push(norm);
    }
    Ok(Dictionary {
        rows,
        columns,
        norms,
        terms,
        model,
    })
}

/// One column per lag pair, whole exponent at a single lag per source.
fn prior_art_terms(spec: &DistortionSpec, lengths: Lengths) -> Result<Vec<TermDescriptor>> {
    let DistortionKind::Intermod { p, q } = spec.kind() else {
        return Err(Error::InvalidArgument(
            "the prior-art model is defined for inter-modulation only".into(),
        ));
    };
    let Lengths::Pair(len1, len2) = lengths else {
        return Err(Error::InvalidArgument(
            "the prior-art model takes a pair of lengths".into(),
        ));
    };
    if len1 == 0 || len2 == 0 {
        return Err(Error::InvalidArgument("model lengths must be >= 1".into()));
    }
    let mut terms = Vec::with_capacity(len1 * len2);
    for k1 in 0..len1 {
        for k2 in 0..len2 {
            terms.push(TermDescriptor {
                sources: vec![
                    vec![TermFactor {
                        lag: k1,
                        exponent: p.unsigned_abs(),
                        conjugated: p < 0,
                    }],
                    vec![TermFactor {
                        lag: k2,
                        exponent: q.unsigned_abs(),
                        conjugated: q < 0,
                    }],
                ],
            });
        }
    }
    Ok(terms)
}

/// One column per shared lag: static nonlinearity then a single filter.
fn hammerstein_terms(spec: &DistortionSpec, lengths: Lengths) -> Result<Vec<TermDescriptor>> {
    let Lengths::Single(taps) = lengths else {
        return Err(Error::InvalidArgument(
            "the Hammerstein model takes a single tap budget".into(),
        ));
    };
    if taps == 0 {
        return Err(Error::InvalidArgument("tap budget must be >= 1".into()));
    }
    let terms = (0..taps)
        .map(|k| match spec.kind() {
            DistortionKind::Harmonic { order } => TermDescriptor {
                sources: vec![vec![TermFactor {
                    lag: k,
                    exponent: order,
                    conjugated: false,
                }]],
            },
            DistortionKind::Intermod { p, q } => TermDescriptor {
                sources: vec![
                    vec![TermFactor {
                        lag: k,
                        exponent: p.unsigned_abs(),
                        conjugated: p < 0,
                    }],
                    vec![TermFactor {
                        lag: k,
                        exponent: q.unsigned_abs(),
                        conjugated: q < 0,
                    }],
                ],
            },
        })
        .collect();
    Ok(terms)
}
