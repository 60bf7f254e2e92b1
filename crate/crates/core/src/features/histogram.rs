use super::tplbp::CodeGrid;
use crate::error::{Error, Result};

/// Number of blocks along one side, trailing partial block included.
pub fn blocks_along(len: usize, block_size: usize) -> usize {
    len.div_ceil(block_size)
}

/// Per-block code histograms, L1-normalized, concatenated in row-major
/// block order. The block grid is `ceil(rows/b) × ceil(cols/b)`; the last
/// row and column of blocks may be partial.
pub fn block_histograms(codes: &CodeGrid, block_size: usize, bins: usize) -> Result<Vec<f64>> {
    if block_size == 0 {
        return Err(Error::invalid("histogram block size must be >= 1"));
    }
    let (rows, cols) = (codes.rows(), codes.cols());
    let br = blocks_along(rows, block_size);
    let bc = blocks_along(cols, block_size);
    let mut out = vec![0.0; br * bc * bins];
    for bi in 0..br {
        for bj in 0..bc {
            let hist = &mut out[(bi * bc + bj) * bins..(bi * bc + bj + 1) * bins];
            let r_end = ((bi + 1) * block_size).min(rows);
            let c_end = ((bj + 1) * block_size).min(cols);
            let mut count = 0usize;
            for r in bi * block_size..r_end {
                for c in bj * block_size..c_end {
                    let code = codes.at(r, c) as usize;
                    if code >= bins {
                        return Err(Error::invalid(format!(
                            "code {code} at ({r}, {c}) outside {bins} bins"
                        )));
                    }
                    hist[code] += 1.0;
                    count += 1;
                }
            }
            if count > 0 {
                let inv = 1.0 / count as f64;
                hist.iter_mut().for_each(|h| *h *= inv);
            }
        }
    }
    Ok(out)
}
