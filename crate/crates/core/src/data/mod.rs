//! Dataset ingestion: IDX parsing, average-pooling downsampling, grey-level
//! normalization and class-subset extraction.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// Standard MNIST file names looked up under a data directory.
pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

/// Raw byte images straight out of the IDX files.
#[derive(Debug, Clone)]
pub struct RawDataset {
    pub images: Vec<Vec<u8>>,
    pub labels: Vec<u8>,
    pub rows: usize,
    pub cols: usize,
}

/// Normalized image set with local class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Row-major pixel values in `[0, 1]`.
    pub images: Vec<Vec<f64>>,
    /// Local class index per image.
    pub labels: Vec<usize>,
    /// Original digit to local class index.
    pub class_map: BTreeMap<u8, usize>,
    pub shape: (usize, usize),
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_map.len()
    }
}

fn read_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::Format(format!("{what}: file truncated in header")));
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Parses a pair of IDX files (big-endian headers, pixels as bytes 0-255).
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<RawDataset> {
    let image_bytes = std::fs::read(images_path)?;
    let label_bytes = std::fs::read(labels_path)?;

    let magic = read_u32(&image_bytes, 0, "images")?;
    if magic != IMAGES_MAGIC {
        return Err(Error::Format(format!(
            "images: bad magic number {magic:#010x}, expected {IMAGES_MAGIC:#010x}"
        )));
    }
    let count = read_u32(&image_bytes, 4, "images")? as usize;
    let rows = read_u32(&image_bytes, 8, "images")? as usize;
    let cols = read_u32(&image_bytes, 12, "images")? as usize;
    let pixel_count = rows * cols;
    let expected = 16 + count * pixel_count;
    if image_bytes.len() < expected {
        return Err(Error::Format(format!(
            "images: truncated file, header promises {count} images of {rows}x{cols}"
        )));
    }

    let magic = read_u32(&label_bytes, 0, "labels")?;
    if magic != LABELS_MAGIC {
        return Err(Error::Format(format!(
            "labels: bad magic number {magic:#010x}, expected {LABELS_MAGIC:#010x}"
        )));
    }
    let label_count = read_u32(&label_bytes, 4, "labels")? as usize;
    if label_count != count {
        return Err(Error::Format(format!(
            "label count {label_count} does not match image count {count}"
        )));
    }
    if label_bytes.len() < 8 + count {
        return Err(Error::Format("labels: truncated file".into()));
    }

    let images = (0..count)
        .map(|i| {
            let start = 16 + i * pixel_count;
            image_bytes[start..start + pixel_count].to_vec()
        })
        .collect();
    let labels = label_bytes[8..8 + count].to_vec();
    Ok(RawDataset {
        images,
        labels,
        rows,
        cols,
    })
}

/// Average-pools a 28x28 byte image down to `target` x `target` and scales
/// grey levels to `[0, 1]`.
///
/// 28 divides evenly into 4; for targets 8 and 16 the image is zero-padded
/// symmetrically to 32 first.
pub fn downsample(image: &[u8], rows: usize, cols: usize, target: usize) -> Result<Vec<f64>> {
    if image.len() != rows * cols {
        return Err(Error::LengthMismatch {
            expected: rows * cols,
            got: image.len(),
        });
    }
    if rows != 28 || cols != 28 {
        return Err(Error::Format(format!(
            "downsampling expects 28x28 sources, got {rows}x{cols}"
        )));
    }
    let (padded, size) = match target {
        4 => (image.to_vec(), 28usize),
        8 | 16 => {
            // center the 28x28 image in a 32x32 zero canvas
            let mut canvas = vec![0u8; 32 * 32];
            for r in 0..28 {
                for c in 0..28 {
                    canvas[(r + 2) * 32 + (c + 2)] = image[r * 28 + c];
                }
            }
            (canvas, 32usize)
        }
        other => return Err(Error::UnsupportedResolution(other)),
    };
    let block = size / target;
    let mut out = Vec::with_capacity(target * target);
    for br in 0..target {
        for bc in 0..target {
            let mut sum = 0u32;
            for r in 0..block {
                for c in 0..block {
                    sum += padded[(br * block + r) * size + (bc * block + c)] as u32;
                }
            }
            out.push(sum as f64 / (block * block) as f64 / 255.0);
        }
    }
    Ok(out)
}

/// Scales grey levels into `[0, 1]`; already-normalized data passes through
/// unchanged, so applying it twice is harmless.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    if max > 1.0 {
        values.iter().map(|v| v / 255.0).collect()
    } else {
        values.to_vec()
    }
}

/// Downsamples and normalizes every image, keeping original digits as labels
/// via an identity class map.
pub fn prepare(raw: &RawDataset, resolution: usize) -> Result<Dataset> {
    let mut images = Vec::with_capacity(raw.images.len());
    for image in &raw.images {
        images.push(downsample(image, raw.rows, raw.cols, resolution)?);
    }
    let class_map: BTreeMap<u8, usize> = (0..=9).map(|d| (d, d as usize)).collect();
    Ok(Dataset {
        images,
        labels: raw.labels.iter().map(|&l| l as usize).collect(),
        class_map,
        shape: (resolution, resolution),
    })
}

/// Filters to the requested digits and relabels them `0..c-1` in ascending
/// digit order.
pub fn subset(dataset: &Dataset, digits: &[u8]) -> Result<Dataset> {
    if digits.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut wanted: Vec<u8> = digits.to_vec();
    wanted.sort_unstable();
    wanted.dedup();

    // map local labels back to original digits
    let mut original: BTreeMap<usize, u8> = BTreeMap::new();
    for (&digit, &local) in &dataset.class_map {
        original.insert(local, digit);
    }
    let class_map: BTreeMap<u8, usize> =
        wanted.iter().enumerate().map(|(i, &d)| (d, i)).collect();

    let mut images = Vec::new();
    let mut labels = Vec::new();
    for (image, &label) in dataset.images.iter().zip(&dataset.labels) {
        let digit = match original.get(&label) {
            Some(d) => *d,
            None => continue,
        };
        if let Some(&local) = class_map.get(&digit) {
            images.push(image.clone());
            labels.push(local);
        }
    }
    if images.is_empty() {
        return Err(Error::NoMatchingSamples);
    }
    Ok(Dataset {
        images,
        labels,
        class_map,
        shape: dataset.shape,
    })
}

/// Loads the train and test splits for a digit subset at a target
/// resolution, using the standard MNIST file names under `data_dir`.
pub fn load_mnist_split(
    data_dir: &Path,
    digits: &[u8],
    resolution: usize,
) -> Result<(Dataset, Dataset)> {
    let train_raw = load_idx(&data_dir.join(TRAIN_IMAGES), &data_dir.join(TRAIN_LABELS))?;
    let test_raw = load_idx(&data_dir.join(TEST_IMAGES), &data_dir.join(TEST_LABELS))?;
    let train = subset(&prepare(&train_raw, resolution)?, digits)?;
    let test = subset(&prepare(&test_raw, resolution)?, digits)?;
    Ok((train, test))
}

#[cfg(test)]
mod tests;
