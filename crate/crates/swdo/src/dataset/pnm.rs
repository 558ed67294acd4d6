//! Minimal binary PGM (P5) / PPM (P6) codec, maxval 255 only.
//!
//! The formats are bit-exactly specified and need no external codec: an
//! ASCII header (magic, width, height, maxval, `#` comments allowed) followed
//! by a single whitespace byte and raw sample data, row-major, RGB
//! interleaved for P6.

use std::path::Path;

use crate::error::{Error, Result};

/// A decoded 8-bit image; `data` is channel-major (all of channel 0, then
/// channel 1, ...), row-major within each channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawImage {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<u8>,
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_separators(&mut self) -> Result<()> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => return Ok(()),
                None => return Err(Error::data("truncated header".to_string())),
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_separators()?;
        let start = self.pos;
        while let Some(b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| {
                Error::data(format!(
                    "invalid {what} '{}' in header",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

/// Decode a binary PGM or PPM byte stream.
pub fn decode(bytes: &[u8]) -> Result<RawImage> {
    let mut cursor = HeaderCursor { bytes, pos: 0 };
    let magic = cursor.token()?;
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        other => {
            return Err(Error::data(format!(
                "unsupported magic '{}' (want binary P5 or P6)",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    let maxval = cursor.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::data(format!(
            "degenerate image dimensions {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(Error::data(format!("maxval {maxval} unsupported (want 255)")));
    }
    // Exactly one whitespace byte separates header from raster.
    match bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => return Err(Error::data("missing separator before raster".to_string())),
    }
    let expected = width * height * channels;
    let raster = &bytes[cursor.pos.min(bytes.len())..];
    if raster.len() < expected {
        return Err(Error::data(format!(
            "raster has {} bytes, expected {expected}",
            raster.len()
        )));
    }
    // De-interleave to channel-major.
    let mut data = vec![0u8; expected];
    for i in 0..width * height {
        for c in 0..channels {
            data[c * width * height + i] = raster[i * channels + c];
        }
    }
    Ok(RawImage {
        channels,
        height,
        width,
        data,
    })
}

/// Encode channel-major 8-bit samples as binary PGM (1 channel) or PPM (3).
pub fn encode(image: &RawImage) -> Result<Vec<u8>> {
    let RawImage {
        channels,
        height,
        width,
        data,
    } = image;
    if data.len() != channels * height * width {
        return Err(Error::shape(format!(
            "{} samples for {channels}x{height}x{width}",
            data.len()
        )));
    }
    let magic = match channels {
        1 => "P5",
        3 => "P6",
        c => {
            return Err(Error::config(format!(
                "{c} channels unsupported (want 1 or 3)"
            )))
        }
    };
    let mut out = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    for i in 0..width * height {
        for c in 0..*channels {
            out.push(data[c * width * height + i]);
        }
    }
    Ok(out)
}

pub fn read_file(path: &Path) -> Result<RawImage> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    decode(&bytes)
}

pub fn write_file(path: &Path, image: &RawImage) -> Result<()> {
    let bytes = encode(image)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let image = RawImage {
            channels: 1,
            height: 2,
            width: 3,
            data: vec![0, 128, 255, 7, 8, 9],
        };
        let decoded = decode(&encode(&image).unwrap()).unwrap();
        assert_eq!(decoded, image);
    }

    #[test]
    fn ppm_round_trip_deinterleaves() {
        let image = RawImage {
            channels: 3,
            height: 1,
            width: 2,
            data: vec![10, 11, 20, 21, 30, 31], // R plane, G plane, B plane
        };
        let bytes = encode(&image).unwrap();
        // Raster must be interleaved RGBRGB.
        let raster = &bytes[bytes.len() - 6..];
        assert_eq!(raster, &[10, 20, 30, 11, 21, 31]);
        assert_eq!(decode(&bytes).unwrap(), image);
    }

    #[test]
    fn comments_in_header_are_skipped() {
        let bytes = b"P5\n# made by hand\n2 1\n# another note\n255\n\x05\x06";
        let image = decode(bytes).unwrap();
        assert_eq!((image.height, image.width), (1, 2));
        assert_eq!(image.data, vec![5, 6]);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(decode(b"P4\n2 2\n255\n....").is_err()); // wrong magic
        assert!(decode(b"P5\n2 2\n65535\n....").is_err()); // wide maxval
        assert!(decode(b"P5\n2 2\n255\n\x01").is_err()); // truncated raster
        assert!(decode(b"P5\n0 2\n255\n").is_err()); // zero dimension
        assert!(decode(b"P5\nx 2\n255\n..").is_err()); // non-numeric width
        assert!(decode(b"P5\n2").is_err()); // truncated header
    }

    #[test]
    fn encode_validates_shape_and_channels() {
        let bad = RawImage {
            channels: 1,
            height: 2,
            width: 2,
            data: vec![1, 2, 3],
        };
        assert!(encode(&bad).is_err());
        let two = RawImage {
            channels: 2,
            height: 1,
            width: 1,
            data: vec![1, 2],
        };
        assert!(encode(&two).is_err());
    }
}
