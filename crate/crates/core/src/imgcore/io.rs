//! PGM (P5, maxval 255) and PNG codecs.

use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::GrayImage;
use crate::error::{Error, Result};

/// BT.601 luma, rounded half-up: `(299 R + 587 G + 114 B + 500) / 1000`.
#[inline]
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let acc = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b) + 500;
    (acc / 1000) as u8
}

/// Reads a binary PGM or an 8-bit gray/RGB(A) PNG. Color is reduced to luminance.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes).map_err(|reason| Error::Format {
            path: path.to_path_buf(),
            reason,
        })
    } else if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes).map_err(|reason| Error::Format {
            path: path.to_path_buf(),
            reason,
        })
    } else {
        Err(Error::Format {
            path: path.to_path_buf(),
            reason: "expected a binary PGM (P5) or PNG file".into(),
        })
    }
}

/// Writes PNG when the extension is `.png`, binary PGM otherwise.
pub fn save_image(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let bytes = if is_png {
        encode_png(img)
    } else {
        encode_pgm(img)
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

fn encode_png(img: &GrayImage) -> Vec<u8> {
    let buf =
        image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec())
            .expect("dimensions are consistent");
    let mut out = std::io::Cursor::new(Vec::new());
    DynamicImage::ImageLuma8(buf)
        .write_to(&mut out, ImageFormat::Png)
        .expect("in-memory PNG encoding");
    out.into_inner()
}

fn decode_png(bytes: &[u8]) -> std::result::Result<GrayImage, String> {
    let img =
        image::load_from_memory_with_format(bytes, ImageFormat::Png).map_err(|e| e.to_string())?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        DynamicImage::ImageRgb8(buf) => buf
            .pixels()
            .map(|p| luminance(p.0[0], p.0[1], p.0[2]))
            .collect(),
        DynamicImage::ImageRgba8(buf) => buf
            .pixels()
            .map(|p| luminance(p.0[0], p.0[1], p.0[2]))
            .collect(),
        other => {
            return Err(format!(
                "only 8-bit gray or RGB PNG is supported, got {:?}",
                other.color()
            ))
        }
    };
    GrayImage::new(w, h, data).map_err(|e| e.to_string())
}

fn decode_pgm(bytes: &[u8]) -> std::result::Result<GrayImage, String> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err("malformed PGM header".into());
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| "PGM header value out of range".to_string())?;
    }
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(format!("PGM maxval must be 255, got {maxval}"));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("malformed PGM header".into());
    }
    pos += 1;
    let n = w.checked_mul(h).ok_or("PGM dimensions overflow")?;
    let raster = bytes
        .get(pos..pos + n)
        .ok_or_else(|| format!("PGM raster truncated: expected {n} bytes"))?;
    GrayImage::new(w, h, raster.to_vec()).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_pixel_pgm() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        fs::write(&p, b"P5\n# comment\n1 1\n255\n\x80").unwrap();
        let img = load_image(&p).unwrap();
        assert_eq!(
            (img.width(), img.height(), img.data()),
            (1, 1, &[128u8][..])
        );
    }

    #[test]
    fn rgb_png_is_converted_with_bt601() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.png");
        let buf =
            image::RgbImage::from_raw(3, 1, vec![255, 255, 255, 255, 0, 0, 0, 0, 255]).unwrap();
        buf.save(&p).unwrap();
        let img = load_image(&p).unwrap();
        // white, round(0.299*255)=76, round(0.114*255)=29
        assert_eq!(img.data(), &[255, 76, 29]);
    }

    #[test]
    fn luminance_half_up() {
        assert_eq!(luminance(255, 255, 255), 255);
        assert_eq!(luminance(0, 0, 0), 0);
        assert_eq!(luminance(255, 0, 0), 76);
        assert_eq!(luminance(0, 255, 0), 150);
    }

    #[test]
    fn errors_name_the_path() {
        let err = load_image("/nonexistent/x.pgm").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/x.pgm"));

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.pgm");
        fs::write(&p, b"GIF89a").unwrap();
        assert!(matches!(load_image(&p), Err(Error::Format { .. })));
        fs::write(&p, b"P5 2 2 65535\n\0\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(load_image(&p), Err(Error::Format { .. })));
        fs::write(&p, b"P5 4 4 255\n\0\0").unwrap();
        assert!(matches!(load_image(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn small_round_trip_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let img = GrayImage::new(2, 2, vec![0, 255, 17, 99]).unwrap();
        for name in ["x.pgm", "x.png"] {
            let p = dir.path().join(name);
            save_image(&img, &p).unwrap();
            assert_eq!(load_image(&p).unwrap(), img);
        }
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let img = GrayImage::filled(1, 1, 0).unwrap();
        assert!(matches!(
            save_image(&img, "/nonexistent/dir/x.pgm"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn full_resolution_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = 12345u32;
        let img = GrayImage::from_fn(717, 1080, |_, _| {
            s ^= s << 13;
            s ^= s >> 17;
            s ^= s << 5;
            s as u8
        })
        .unwrap();
        for name in ["big.pgm", "big.png"] {
            let p = dir.path().join(name);
            save_image(&img, &p).unwrap();
            assert_eq!(load_image(&p).unwrap(), img);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn pgm_round_trip_is_identity(w in 1usize..40, h in 1usize..40, seed in any::<u64>()) {
            let mut st = seed | 1;
            let img = GrayImage::from_fn(w, h, |_, _| {
                st ^= st << 13; st ^= st >> 7; st ^= st << 17;
                st as u8
            }).unwrap();
            let bytes = encode_pgm(&img);
            prop_assert_eq!(decode_pgm(&bytes).unwrap(), img);
        }
    }
}
