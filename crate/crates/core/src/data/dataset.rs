use nalgebra::DMatrix;

use crate::error::{GlccError, Result};

/// One feature modality: `n` samples by `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureView {
    pub name: String,
    pub data: DMatrix<f64>,
}

impl FeatureView {
    pub fn new(name: impl Into<String>, data: DMatrix<f64>) -> Self {
        FeatureView {
            name: name.into(),
            data,
        }
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }
}

/// Aligned feature views plus (partial) class labels.
///
/// Row `j` of every view and of `y` describes the same sample. Labeled rows
/// of `y` are one-hot; unlabeled rows are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiFeatureDataset {
    views: Vec<FeatureView>,
    y: DMatrix<f64>,
    labeled_mask: Vec<bool>,
    class_names: Vec<String>,
}

impl MultiFeatureDataset {
    /// Builds a dataset from per-sample labels (`None` = unlabeled).
    pub fn new(
        views: Vec<FeatureView>,
        labels: &[Option<usize>],
        class_names: Vec<String>,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(GlccError::Data("a dataset needs at least one view".into()));
        }
        let n = views[0].n();
        for v in &views {
            if v.n() != n {
                return Err(GlccError::Data(format!(
                    "view '{}' has {} rows but view '{}' has {}",
                    v.name,
                    v.n(),
                    views[0].name,
                    n
                )));
            }
            if v.dim() == 0 {
                return Err(GlccError::Data(format!("view '{}' has no columns", v.name)));
            }
        }
        if labels.len() != n {
            return Err(GlccError::Data(format!(
                "{} labels given for {n} samples",
                labels.len()
            )));
        }
        let c = class_names.len();
        let mut y = DMatrix::zeros(n, c);
        let mut mask = vec![false; n];
        for (i, l) in labels.iter().enumerate() {
            if let Some(k) = *l {
                if k >= c {
                    return Err(GlccError::Data(format!(
                        "sample {i} has class index {k} but only {c} classes exist"
                    )));
                }
                y[(i, k)] = 1.0;
                mask[i] = true;
            }
        }
        Ok(MultiFeatureDataset {
            views,
            y,
            labeled_mask: mask,
            class_names,
        })
    }

    pub fn views(&self) -> &[FeatureView] {
        &self.views
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn labeled_mask(&self) -> &[bool] {
        &self.labeled_mask
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn m(&self) -> usize {
        self.views.len()
    }

    pub fn c(&self) -> usize {
        self.class_names.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.views.iter().map(|v| v.dim()).collect()
    }

    pub fn num_labeled(&self) -> usize {
        self.labeled_mask.iter().filter(|&&b| b).count()
    }

    pub fn label(&self, i: usize) -> Option<usize> {
        if !self.labeled_mask[i] {
            return None;
        }
        (0..self.c()).find(|&k| self.y[(i, k)] == 1.0)
    }

    pub fn labels(&self) -> Vec<Option<usize>> {
        (0..self.n()).map(|i| self.label(i)).collect()
    }

    /// Labels of a fully labeled dataset.
    pub fn full_labels(&self) -> Result<Vec<usize>> {
        self.labels()
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or_else(|| GlccError::Data(format!("sample {i} has no ground-truth label")))
            })
            .collect()
    }

    /// Same samples with different labels.
    pub fn with_labels(&self, labels: &[Option<usize>]) -> Result<Self> {
        MultiFeatureDataset::new(self.views.clone(), labels, self.class_names.clone())
    }

    /// Reorders samples so that new row `j` is old row `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(GlccError::Param("not a permutation of the samples".into()));
        }
        let views = self
            .views
            .iter()
            .map(|v| FeatureView::new(v.name.clone(), v.data.select_rows(perm)))
            .collect();
        let old = self.labels();
        let labels: Vec<Option<usize>> = perm.iter().map(|&p| old[p]).collect();
        MultiFeatureDataset::new(views, &labels, self.class_names.clone())
    }

    /// Dataset restricted to the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Self {
        let views = self
            .views
            .iter()
            .map(|v| FeatureView::new(v.name.clone(), v.data.select_rows(rows)))
            .collect();
        let old = self.labels();
        let labels: Vec<Option<usize>> = rows.iter().map(|&p| old[p]).collect();
        MultiFeatureDataset::new(views, &labels, self.class_names.clone())
            .expect("subset of a valid dataset is valid")
    }
}
