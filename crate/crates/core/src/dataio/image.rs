use std::fs;
use std::io::{BufReader, BufWriter, Cursor};
use std::path::{Path, PathBuf};

use image::codecs::pnm::{GraymapHeader, PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ColorType, DynamicImage};

use crate::error::{Error, Result};
use crate::numkit::{Grid2D, RealGrid};

pub const META_FILE: &str = "meta.csv";
pub const META_HEADER: [&str; 5] = ["file", "classId", "serial", "depressionDeg", "aspectDeg"];

/// One gray-scale target chip with its acquisition metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct AspectImage {
    /// Intensities in `[0, 1]`.
    pub pixels: RealGrid,
    /// Degrees in `[0, 360)`.
    pub aspect_deg: f64,
    pub depression_deg: f64,
    pub class_id: usize,
    pub serial: String,
    /// Path as listed in meta.csv, relative to the dataset directory.
    pub source_file: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

/// Rounds intensities to the grid a file of `depth` can store.
pub fn quantize(pixels: &RealGrid, depth: BitDepth) -> RealGrid {
    let m = depth.max_value() as f64;
    pixels.map(|v| (v.clamp(0.0, 1.0) * m).round() / m)
}

/// Decodes a binary graymap (P5), scaling intensities by the format's maximum.
pub fn read_pgm(path: &Path) -> Result<RealGrid> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: String| Error::Image {
        path: path.to_path_buf(),
        message,
    };
    let decoder = PnmDecoder::new(BufReader::new(Cursor::new(&bytes)))
        .map_err(|e| bad(format!("not a portable graymap: {e}")))?;
    if decoder.subtype() != PnmSubtype::Graymap(SampleEncoding::Binary) {
        return Err(bad(format!(
            "expected a binary graymap (P5), found {:?}",
            decoder.subtype()
        )));
    }
    let img = DynamicImage::from_decoder(decoder).map_err(|e| bad(e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    // The decoder rescales any maxval to the full 8- or 16-bit range.
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(b) => {
            b.into_raw().into_iter().map(|v| v as f64 / 65535.0).collect()
        }
        other => return Err(bad(format!("unexpected pixel layout {:?}", other.color()))),
    };
    Grid2D::from_vec(h, w, data).map_err(|e| bad(e.to_string()))
}

/// Encodes intensities (clamped to `[0, 1]`) as a binary graymap.
pub fn encode_pgm(pixels: &RealGrid, depth: BitDepth) -> Result<Vec<u8>> {
    let (w, h) = (pixels.cols() as u32, pixels.rows() as u32);
    let m = depth.max_value() as f64;
    let mut out = Vec::new();
    let header = GraymapHeader {
        encoding: SampleEncoding::Binary,
        height: h,
        width: w,
        maxwhite: depth.max_value(),
    };
    let mut enc = PnmEncoder::new(&mut out).with_header(header.into());
    let q = |v: f64| (v.clamp(0.0, 1.0) * m).round();
    let result = match depth {
        BitDepth::Eight => {
            let buf: Vec<u8> = pixels.data().iter().map(|&v| q(v) as u8).collect();
            enc.encode(&buf[..], w, h, ColorType::L8)
        }
        BitDepth::Sixteen => {
            let buf: Vec<u16> = pixels.data().iter().map(|&v| q(v) as u16).collect();
            enc.encode(&buf[..], w, h, ColorType::L16)
        }
    };
    result.map_err(|e| Error::Format(format!("graymap encoding failed: {e}")))?;
    Ok(out)
}

fn meta_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Metadata {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads `dir/meta.csv` and every graymap it lists.
pub fn load_dataset(dir: &Path) -> Result<Vec<AspectImage>> {
    let meta = dir.join(META_FILE);
    let file = fs::File::open(&meta).map_err(|e| Error::io(&meta, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| meta_error(&meta, 1, e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != META_HEADER {
        return Err(meta_error(
            &meta,
            1,
            format!("header must be `{}`", META_HEADER.join(",")),
        ));
    }
    let mut images = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            meta_error(&meta, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |m: String| meta_error(&meta, line, m);
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let file = field(0);
        if file.is_empty() {
            return Err(err("empty file name".into()));
        }
        let class_id: usize = field(1)
            .parse()
            .map_err(|_| err(format!("classId `{}` is not a non-negative integer", field(1))))?;
        let serial = field(2).to_string();
        let depression_deg: f64 = field(3)
            .parse()
            .map_err(|_| err(format!("depressionDeg `{}` is not a number", field(3))))?;
        let aspect_deg: f64 = field(4)
            .parse()
            .map_err(|_| err(format!("aspectDeg `{}` is not a number", field(4))))?;
        if !(0.0..360.0).contains(&aspect_deg) {
            return Err(err(format!("aspectDeg {aspect_deg} outside [0, 360)")));
        }
        if !depression_deg.is_finite() {
            return Err(err(format!("depressionDeg {depression_deg} is not finite")));
        }
        let pixels = read_pgm(&dir.join(file))?;
        images.push(AspectImage {
            pixels,
            aspect_deg,
            depression_deg,
            class_id,
            serial,
            source_file: PathBuf::from(file),
        });
    }
    Ok(images)
}

/// Writes graymaps and meta.csv so that [`load_dataset`] reads them back.
/// Each image is stored under its `source_file` name.
pub fn write_dataset(dir: &Path, images: &[AspectImage], depth: BitDepth) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let meta = dir.join(META_FILE);
    let file = fs::File::create(&meta).map_err(|e| Error::io(&meta, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    let csv_err = |e: csv::Error| Error::Format(format!("{}: {e}", meta.display()));
    w.write_record(META_HEADER).map_err(csv_err)?;
    for img in images {
        let name = img.source_file.to_string_lossy().into_owned();
        let path = dir.join(&img.source_file);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, encode_pgm(&img.pixels, depth)?).map_err(|e| Error::io(&path, e))?;
        w.write_record([
            name,
            img.class_id.to_string(),
            img.serial.clone(),
            img.depression_deg.to_string(),
            img.aspect_deg.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&meta, e))?;
    Ok(())
}
