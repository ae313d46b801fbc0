//! Datasets: in-memory representation, text I/O, labeled/unlabeled splits and
//! synthetic generators.

mod dataset;
mod io;
mod split;
mod synthetic;

pub use dataset::{FeatureView, MultiFeatureDataset};
pub use io::{
    encode_labels, load_dataset, load_views, read_label_rows, read_label_tokens, read_matrix,
    save_dataset, write_labels, write_matrix, SavedDataset, TextFormat, UNLABELED,
};
pub use split::{apply_split, labeled_count, LabeledSplit, SplitSpec};
pub use synthetic::{generate_synthetic, Manifold, SyntheticSpec};
