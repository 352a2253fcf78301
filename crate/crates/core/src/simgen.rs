//! Synthetic benchmark data with ground-truth labels.
//!
//! The setting layout splits `p` columns into ten blocks of `p/10`. Blocks
//! 0..9 each start with a standard normal signal followed by `p/10 − 1`
//! near-copies `signal + λ·ε`; the last block is sparse noise. The response is
//! `2·X_t1·X_t2 + cos(π·X_t3·X_t4) + ε` with `t_g` the first column of block
//! `g − 1`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// Standard deviation of the nonzero entries of sparse columns.
pub const SPARSE_SD: f64 = 0.1;
/// Signal blocks that enter the response.
pub const RELEVANT_GROUPS: usize = 4;
pub const SIGNAL_GROUPS: usize = 9;

const RESPONSE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub n: usize,
    pub p: usize,
    /// Scale of the noise added to companion columns.
    pub lambda: f64,
    /// Fraction of nonzero entries in sparse columns.
    pub nonzero_prop: f64,
    /// Standard deviation of the response noise.
    pub noise_sd: f64,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn new(n: usize, p: usize, seed: u64) -> Self {
        Self {
            n,
            p,
            lambda: 0.01,
            nonzero_prop: 0.001,
            noise_sd: 0.1,
            seed,
        }
    }

    /// Settings 1–3: n = 2000 with p = 1000, 2000, 5000.
    pub fn setting(which: u8, seed: u64) -> Result<Self> {
        let p = match which {
            1 => 1000,
            2 => 2000,
            3 => 5000,
            other => return Err(Error::InvalidParameter(format!("unknown setting {other}"))),
        };
        Ok(Self::new(2000, p, seed))
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || !self.p.is_multiple_of(10) {
            return Err(Error::NotDivisibleByTen(self.p));
        }
        if self.n < 10 {
            return Err(Error::TooFewRows {
                min: 10,
                found: self.n,
            });
        }
        if !(self.lambda >= 0.0) || !(self.noise_sd >= 0.0) {
            return Err(Error::InvalidParameter(
                "lambda and noise_sd must be >= 0".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.nonzero_prop) {
            return Err(Error::InvalidParameter(
                "nonzero_prop must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn group_width(&self) -> usize {
        self.p / 10
    }

    /// 0-based column of signal `g` (0..9).
    pub fn signal_index(&self, g: usize) -> usize {
        g * self.group_width()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    RelevantSignal,
    RedundantCompanion,
    Uninformative,
    OtherSignal,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::RelevantSignal => "relevant-signal",
            Label::RedundantCompanion => "redundant-companion",
            Label::Uninformative => "uninformative",
            Label::OtherSignal => "other-signal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnLabel {
    pub label: Label,
    pub group: Option<usize>,
}

/// A set of interchangeable columns of which `required` must be selected to
/// capture the signal; `defaults` stand in for the unselected ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevantBlock {
    pub members: Vec<usize>,
    pub required: usize,
    pub defaults: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub labels: Vec<ColumnLabel>,
    pub blocks: Vec<RelevantBlock>,
    pub signal_indices: Vec<usize>,
    pub uninformative_indices: Vec<usize>,
}

impl GroundTruth {
    pub fn p(&self) -> usize {
        self.labels.len()
    }

    pub fn relevant_groups(&self) -> impl Iterator<Item = &[usize]> {
        self.blocks.iter().map(|b| b.members.as_slice())
    }

    /// Coverage reached when every block is fully represented.
    pub fn full_coverage(&self) -> usize {
        self.blocks.iter().map(|b| b.required).sum()
    }

    /// Write `column_name,label,group_id`.
    pub fn write_csv(&self, names: &[String], path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w =
            csv::Writer::from_writer(std::io::BufWriter::new(File::create(path).map_err(io)?));
        w.write_record(["column_name", "label", "group_id"])?;
        for (name, l) in names.iter().zip(&self.labels) {
            let group = l.group.map(|g| g.to_string()).unwrap_or_default();
            w.write_record([name.as_str(), l.label.as_str(), group.as_str()])?;
        }
        w.into_inner()
            .map_err(|e| io(e.into_error()))?
            .flush()
            .map_err(io)
    }
}

fn normals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Zero column with `round(prop·n)` entries, at uniformly drawn rows, from
/// N(0, SPARSE_SD²).
fn sparse_column(rng: &mut impl Rng, n: usize, prop: f64) -> Vec<f64> {
    let k = ((prop * n as f64).round() as usize).min(n);
    let mut col = vec![0.0; n];
    let normal = Normal::new(0.0, SPARSE_SD).expect("valid normal");
    let mut rows = sample(rng, n, k).into_vec();
    rows.sort_unstable();
    for r in rows {
        col[r] = normal.sample(rng);
    }
    col
}

fn names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("X{j}")).collect()
}

pub fn generate_setting(spec: &SimulationSpec) -> Result<(Dataset<f64>, GroundTruth)> {
    spec.validate()?;
    let (n, p, w) = (spec.n, spec.p, spec.group_width());
    let column_stream = |j: u64| seed::stream(&[spec.seed, j]);

    let mut columns = Vec::with_capacity(p);
    let mut labels = Vec::with_capacity(p);
    for g in 0..SIGNAL_GROUPS {
        let base = g * w;
        let signal = normals(&mut column_stream(base as u64), n);
        let companions: Vec<Vec<f64>> = (base + 1..base + w)
            .map(|j| {
                let mut rng = column_stream(j as u64);
                signal
                    .iter()
                    .map(|&s| s + spec.lambda * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        columns.push(signal);
        columns.extend(companions);
        let (lead, rest) = if g < RELEVANT_GROUPS {
            (Label::RelevantSignal, Label::RedundantCompanion)
        } else {
            (Label::OtherSignal, Label::OtherSignal)
        };
        labels.push(ColumnLabel {
            label: lead,
            group: Some(g),
        });
        labels.extend((1..w).map(|_| ColumnLabel {
            label: rest,
            group: Some(g),
        }));
    }
    for j in 9 * w..p {
        columns.push(sparse_column(
            &mut column_stream(j as u64),
            n,
            spec.nonzero_prop,
        ));
        labels.push(ColumnLabel {
            label: Label::Uninformative,
            group: None,
        });
    }

    let t: Vec<&[f64]> = (0..RELEVANT_GROUPS)
        .map(|g| columns[g * w].as_slice())
        .collect();
    let mut rng = column_stream(RESPONSE_STREAM);
    let noise =
        Normal::new(0.0, spec.noise_sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let y: Vec<f64> = (0..n)
        .map(|i| 2.0 * t[0][i] * t[1][i] + (PI * t[2][i] * t[3][i]).cos() + noise.sample(&mut rng))
        .collect();

    let gt = GroundTruth {
        labels,
        blocks: (0..RELEVANT_GROUPS)
            .map(|g| RelevantBlock {
                members: (g * w..(g + 1) * w).collect(),
                required: 1,
                defaults: vec![g * w],
            })
            .collect(),
        signal_indices: (0..SIGNAL_GROUPS).map(|g| g * w).collect(),
        uninformative_indices: (9 * w..p).collect(),
    };
    let d = Dataset::from_columns(columns, y, names(p), "Y")?;
    Ok((d, gt))
}

/// Six-predictor example: `X4 = X1 + X2`, `X5 = X1 + X3`, sparse `X6`,
/// `Y = X1·X2`.
pub fn generate_toy(n: usize, seed: u64) -> Result<(Dataset<f64>, GroundTruth)> {
    if n < 10 {
        return Err(Error::TooFewRows { min: 10, found: n });
    }
    let stream = |j: u64| seed::stream(&[seed, 0x70, j]);
    let x1 = normals(&mut stream(0), n);
    let x2 = normals(&mut stream(1), n);
    let x3 = normals(&mut stream(2), n);
    let x4: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
    let x5: Vec<f64> = x1.iter().zip(&x3).map(|(a, b)| a + b).collect();
    let x6 = sparse_column(&mut stream(5), n, 0.001);
    let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a * b).collect();

    let lab = |label, group| ColumnLabel { label, group };
    let gt = GroundTruth {
        labels: vec![
            lab(Label::RelevantSignal, Some(0)),
            lab(Label::RelevantSignal, Some(0)),
            lab(Label::OtherSignal, None),
            lab(Label::RedundantCompanion, Some(0)),
            lab(Label::OtherSignal, None),
            lab(Label::Uninformative, None),
        ],
        blocks: vec![RelevantBlock {
            members: vec![0, 1, 3],
            required: 2,
            defaults: vec![0, 1],
        }],
        signal_indices: vec![0, 1],
        uninformative_indices: vec![5],
    };
    let d = Dataset::from_columns(vec![x1, x2, x3, x4, x5, x6], y, names(6), "Y")?;
    Ok((d, gt))
}

/// Write `<stem>.csv` (predictors plus `Y`) and `<stem>.truth.csv`. Returns
/// both paths.
pub fn write_csv(
    d: &Dataset<f64>,
    gt: &GroundTruth,
    dir: &Path,
    stem: &str,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let data = dir.join(format!("{stem}.csv"));
    let truth = dir.join(format!("{stem}.truth.csv"));
    d.write_csv(&data)?;
    gt.write_csv(d.column_names(), &truth)?;
    Ok((data, truth))
}
