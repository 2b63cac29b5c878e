//! Finite point clouds standing in for compact sets `K ⊂ ℂⁿ`.
//!
//! Discs are sampled on their boundary circle only: the modulus of a
//! holomorphic polynomial attains its maximum there. Polydiscs likewise use
//! the torus, built as a [`SetModel::product`] of circles.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of samples on a circle.
pub const DEFAULT_CIRCLE_POINTS: usize = 512;
/// Default number of samples on a segment.
pub const DEFAULT_SEGMENT_POINTS: usize = 1000;
/// Points closer than this in every coordinate are merged.
pub const DEDUP_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Circle,
    Segment,
    Product,
    Union,
    Custom,
}

/// Where a cloud came from and how densely it was sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetDescriptor {
    pub kind: SetKind,
    pub params: BTreeMap<String, f64>,
    /// Number of points in the cloud.
    pub points: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<SetDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl SetDescriptor {
    fn new(kind: SetKind, points: usize) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            points,
            components: Vec::new(),
            source: None,
        }
    }

    /// Descriptor for a user-supplied cloud of `points` points.
    pub fn custom(points: usize) -> Self {
        Self::new(SetKind::Custom, points)
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// A nonempty, duplicate-free cloud of points in ℂⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct SetModel {
    n: usize,
    /// Row-major: point `p` occupies `cloud[p*n..(p+1)*n]`.
    cloud: Vec<Complex64>,
    descriptor: SetDescriptor,
    product_factors: Option<Vec<SetModel>>,
}

/// `e^{2πi k / count}` with exact values at multiples of `π/2` and exact
/// conjugate/antipodal symmetry.
fn unit_root(k: usize, count: usize) -> Complex64 {
    let quarter = (4 * k) / count;
    let rem = 4 * k - quarter * count;
    let (c, s) = if 2 * rem == count {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else if 2 * rem < count {
        let t = FRAC_PI_2 * rem as f64 / count as f64;
        (t.cos(), t.sin())
    } else {
        let t = FRAC_PI_2 * (count - rem) as f64 / count as f64;
        (t.sin(), t.cos())
    };
    match quarter % 4 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

impl SetModel {
    /// Builds a model from raw points, removing duplicates.
    pub fn from_points(n: usize, points: Vec<Vec<Complex64>>, mut descriptor: SetDescriptor) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("setmodel", "dimension must be at least 1"));
        }
        if points.is_empty() {
            return Err(Error::invalid("setmodel", "point cloud must be nonempty"));
        }
        let mut cloud = Vec::with_capacity(points.len() * n);
        for (p, z) in points.iter().enumerate() {
            if z.len() != n {
                return Err(Error::invalid(
                    "setmodel",
                    format!("point {p} has {} coordinates, expected {n}", z.len()),
                ));
            }
            if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::invalid("setmodel", format!("point {p} is not finite")));
            }
            cloud.extend_from_slice(z);
        }
        let cloud = dedup(n, cloud);
        descriptor.points = cloud.len() / n;
        Ok(Self {
            n,
            cloud,
            descriptor,
            product_factors: None,
        })
    }

    /// `count` equally spaced points on `|z − center| = R`, starting at `center + R`.
    pub fn circle(center: Complex64, radius: f64, count: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("setmodel", "circle radius must be positive"));
        }
        if count < 3 {
            return Err(Error::invalid("setmodel", "a circle needs at least 3 points"));
        }
        let cloud: Vec<Complex64> = (0..count).map(|k| center + unit_root(k, count) * radius).collect();
        let descriptor = SetDescriptor::new(SetKind::Circle, count)
            .with("center_re", center.re)
            .with("center_im", center.im)
            .with("radius", radius);
        Ok(Self {
            n: 1,
            cloud,
            descriptor,
            product_factors: None,
        })
    }

    /// Chebyshev extremal points `cos(πk/(count−1))` mapped onto `[a, b]`,
    /// in increasing order with both endpoints included.
    pub fn segment(a: f64, b: f64, count: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("setmodel", "segment needs finite a < b"));
        }
        if count < 2 {
            return Err(Error::invalid("setmodel", "a segment needs at least 2 points"));
        }
        let m = (count - 1) as f64;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let cloud: Vec<Complex64> = (0..count)
            .map(|k| {
                // sin form keeps the nodes exactly symmetric with an exact midpoint
                let x = (FRAC_PI_2 * (2.0 * k as f64 - m) / m).sin();
                let x = match k {
                    0 => a,
                    _ if k == count - 1 => b,
                    _ => mid + half * x,
                };
                Complex64::new(x, 0.0)
            })
            .collect();
        let descriptor = SetDescriptor::new(SetKind::Segment, count).with("a", a).with("b", b);
        Ok(Self {
            n: 1,
            cloud,
            descriptor,
            product_factors: None,
        })
    }

    /// Cartesian product `K₁ × ⋯ × Kₙ` of one-dimensional sets. The first
    /// factor varies slowest.
    pub fn product(factors: Vec<SetModel>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("setmodel", "product needs at least one factor"));
        }
        if let Some(f) = factors.iter().find(|f| f.n != 1) {
            return Err(Error::invalid(
                "setmodel",
                format!("product factors must be one-dimensional, got n = {}", f.n),
            ));
        }
        let n = factors.len();
        let total: usize = factors.iter().map(|f| f.len()).product();
        let mut cloud = Vec::with_capacity(total * n);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            for (t, f) in factors.iter().enumerate() {
                cloud.push(f.cloud[idx[t]]);
            }
            for t in (0..n).rev() {
                idx[t] += 1;
                if idx[t] < factors[t].len() {
                    break;
                }
                idx[t] = 0;
            }
        }
        let mut descriptor = SetDescriptor::new(SetKind::Product, total);
        descriptor.components = factors.iter().map(|f| f.descriptor.clone()).collect();
        Ok(Self {
            n,
            cloud,
            descriptor,
            product_factors: Some(factors),
        })
    }

    /// Deduplicated union; product structure is dropped.
    pub fn union(models: Vec<SetModel>) -> Result<Self> {
        let first = models
            .first()
            .ok_or_else(|| Error::invalid("setmodel", "union needs at least one set"))?;
        let n = first.n;
        if let Some(m) = models.iter().find(|m| m.n != n) {
            return Err(Error::DimensionMismatch { left: n, right: m.n });
        }
        let cloud: Vec<Complex64> = models.iter().flat_map(|m| m.cloud.iter().copied()).collect();
        let cloud = dedup(n, cloud);
        let mut descriptor = SetDescriptor::new(SetKind::Union, cloud.len() / n);
        descriptor.components = models.iter().map(|m| m.descriptor.clone()).collect();
        Ok(Self {
            n,
            cloud,
            descriptor,
            product_factors: None,
        })
    }

    /// Loads a point-cloud file; `.csv` is read as CSV, anything else as JSON.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let is_csv = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("csv"))
            .unwrap_or(false);
        let mut model = if is_csv {
            Self::from_csv_str(&text)?
        } else {
            Self::from_json_str(&text)?
        };
        model.descriptor.source = Some(path.display().to_string());
        Ok(model)
    }

    /// Parses `{"n": …, "points": [[[re, im], …], …]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: PointCloudFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let mut points = Vec::with_capacity(file.points.len());
        for (p, z) in file.points.iter().enumerate() {
            if z.len() != file.n {
                return Err(Error::Parse {
                    location: format!("point {p}"),
                    message: format!("expected {} coordinates, found {}", file.n, z.len()),
                });
            }
            points.push(z.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
        }
        let count = points.len();
        Self::from_points(file.n, points, SetDescriptor::new(SetKind::Custom, count))
    }

    /// Parses CSV rows `re₁,im₁,…,reₙ,imₙ`. A non-numeric first row is treated
    /// as a header; lines starting with `#` are skipped.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        let mut width: Option<usize> = None;
        for (r, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                location: e
                    .position()
                    .map(|p| format!("line {}", p.line()))
                    .unwrap_or_else(|| format!("record {}", r + 1)),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(r as u64 + 1);
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if r == 0 && record.iter().all(|f| f.parse::<f64>().is_err()) => continue,
                Err(e) => {
                    return Err(Error::Parse {
                        location: format!("line {line}"),
                        message: format!("non-numeric field: {e}"),
                    })
                }
            };
            if values.is_empty() || values.len() % 2 != 0 {
                return Err(Error::Parse {
                    location: format!("line {line}"),
                    message: format!("expected an even number of columns, found {}", values.len()),
                });
            }
            match width {
                None => width = Some(values.len()),
                Some(w) if w != values.len() => {
                    return Err(Error::Parse {
                        location: format!("line {line}"),
                        message: format!("expected {w} columns, found {}", values.len()),
                    })
                }
                _ => {}
            }
            points.push(
                values
                    .chunks_exact(2)
                    .map(|c| Complex64::new(c[0], c[1]))
                    .collect::<Vec<_>>(),
            );
        }
        let n = width.ok_or_else(|| Error::Parse {
            location: "end of input".into(),
            message: "no points found".into(),
        })? / 2;
        let count = points.len();
        Self::from_points(n, points, SetDescriptor::new(SetKind::Custom, count))
    }

    /// The point-cloud JSON document for this set.
    pub fn to_point_cloud(&self) -> PointCloudFile {
        PointCloudFile {
            n: self.n,
            points: self
                .points()
                .map(|z| z.iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }

    /// The sub-cloud at the given indices, in order, as a custom set.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.point(i).to_vec()).collect();
        Self::from_points(self.n, points, SetDescriptor::new(SetKind::Custom, indices.len()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.cloud.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn point(&self, p: usize) -> &[Complex64] {
        &self.cloud[p * self.n..(p + 1) * self.n]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, Complex64> {
        self.cloud.chunks_exact(self.n)
    }

    pub fn descriptor(&self) -> &SetDescriptor {
        &self.descriptor
    }

    pub fn product_factors(&self) -> Option<&[SetModel]> {
        self.product_factors.as_deref()
    }

    pub fn is_real(&self) -> bool {
        self.cloud.iter().all(|c| c.im == 0.0)
    }
}

/// On-disk point-cloud format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloudFile {
    pub n: usize,
    pub points: Vec<Vec<[f64; 2]>>,
}

fn close(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x.re - y.re).abs() <= DEDUP_TOLERANCE && (x.im - y.im).abs() <= DEDUP_TOLERANCE)
}

/// Removes near-duplicate points, keeping first occurrences in order.
fn dedup(n: usize, cloud: Vec<Complex64>) -> Vec<Complex64> {
    let count = cloud.len() / n;
    let key = |p: usize| cloud[p * n].re;
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
    let mut keep = vec![true; count];
    for (pos, &p) in order.iter().enumerate() {
        if !keep[p] {
            continue;
        }
        for &q in &order[pos + 1..] {
            if key(q) - key(p) > DEDUP_TOLERANCE {
                break;
            }
            if keep[q] && close(&cloud[p * n..(p + 1) * n], &cloud[q * n..(q + 1) * n]) {
                // drop whichever came later in the input
                if q > p {
                    keep[q] = false;
                } else {
                    keep[p] = false;
                    break;
                }
            }
        }
    }
    cloud
        .chunks_exact(n)
        .zip(&keep)
        .filter(|(_, &k)| k)
        .flat_map(|(z, _)| z.iter().copied())
        .collect()
}
