//! Image dimensions from PNG, GIF and JPEG headers.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    Png,
    Jpeg,
    Gif,
}

impl ImageFormat {
    pub fn name(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Jpeg => "jpeg",
            ImageFormat::Gif => "gif",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            ImageFormat::Png => "image/png",
            ImageFormat::Jpeg => "image/jpeg",
            ImageFormat::Gif => "image/gif",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageHeader {
    pub format: ImageFormat,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImageHeaderError {
    #[error("not a PNG, JPEG or GIF image")]
    UnknownFormat,
    #[error("truncated or malformed {0} header")]
    Malformed(&'static str),
}

pub fn read_header(bytes: &[u8]) -> Result<ImageHeader, ImageHeaderError> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        png(bytes)
    } else if bytes.starts_with(b"GIF87a") || bytes.starts_with(b"GIF89a") {
        gif(bytes)
    } else if bytes.starts_with(b"\xFF\xD8\xFF") {
        jpeg(bytes)
    } else {
        Err(ImageHeaderError::UnknownFormat)
    }
}

fn be_u32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}

fn png(bytes: &[u8]) -> Result<ImageHeader, ImageHeaderError> {
    // signature (8) + chunk length (4) + "IHDR" (4) + width (4) + height (4)
    let bad = ImageHeaderError::Malformed("PNG");
    if bytes.len() < 24 || &bytes[12..16] != b"IHDR" {
        return Err(bad);
    }
    let width = be_u32(&bytes[16..20]);
    let height = be_u32(&bytes[20..24]);
    if width == 0 || height == 0 {
        return Err(bad);
    }
    Ok(ImageHeader {
        format: ImageFormat::Png,
        width,
        height,
    })
}

fn gif(bytes: &[u8]) -> Result<ImageHeader, ImageHeaderError> {
    if bytes.len() < 10 {
        return Err(ImageHeaderError::Malformed("GIF"));
    }
    let width = u16::from_le_bytes([bytes[6], bytes[7]]) as u32;
    let height = u16::from_le_bytes([bytes[8], bytes[9]]) as u32;
    if width == 0 || height == 0 {
        return Err(ImageHeaderError::Malformed("GIF"));
    }
    Ok(ImageHeader {
        format: ImageFormat::Gif,
        width,
        height,
    })
}

fn jpeg(bytes: &[u8]) -> Result<ImageHeader, ImageHeaderError> {
    let bad = ImageHeaderError::Malformed("JPEG");
    let mut i = 2;
    loop {
        // skip fill bytes before the marker code
        while bytes.get(i) == Some(&0xFF) && bytes.get(i + 1) == Some(&0xFF) {
            i += 1;
        }
        if bytes.get(i) != Some(&0xFF) {
            return Err(bad);
        }
        let marker = *bytes.get(i + 1).ok_or(bad.clone())?;
        i += 2;
        match marker {
            0xD8 | 0x01 | 0xD0..=0xD7 => continue,
            0xD9 | 0xDA => return Err(bad),
            _ => {}
        }
        let len = bytes
            .get(i..i + 2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]) as usize)
            .ok_or(bad.clone())?;
        if len < 2 {
            return Err(bad);
        }
        let is_sof = matches!(marker, 0xC0..=0xCF) && !matches!(marker, 0xC4 | 0xC8 | 0xCC);
        if is_sof {
            let seg = bytes.get(i + 2..i + 7).ok_or(bad.clone())?;
            let height = u16::from_be_bytes([seg[1], seg[2]]) as u32;
            let width = u16::from_be_bytes([seg[3], seg[4]]) as u32;
            if width == 0 || height == 0 {
                return Err(bad);
            }
            return Ok(ImageHeader {
                format: ImageFormat::Jpeg,
                width,
                height,
            });
        }
        i += len;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png_header(w: u32, h: u32) -> Vec<u8> {
        let mut v = b"\x89PNG\r\n\x1a\n\0\0\0\rIHDR".to_vec();
        v.extend_from_slice(&w.to_be_bytes());
        v.extend_from_slice(&h.to_be_bytes());
        v.extend_from_slice(&[8, 6, 0, 0, 0]);
        v
    }

    #[test]
    fn png_dimensions() {
        let h = read_header(&png_header(1024, 205)).unwrap();
        assert_eq!((h.format, h.width, h.height), (ImageFormat::Png, 1024, 205));
        assert!(read_header(&png_header(0, 5)).is_err());
        assert!(read_header(&png_header(3, 5)[..20]).is_err());
    }

    #[test]
    fn gif_dimensions() {
        let mut g = b"GIF89a".to_vec();
        g.extend_from_slice(&[0x2C, 0x01, 0x10, 0x00, 0, 0, 0]);
        let h = read_header(&g).unwrap();
        assert_eq!((h.width, h.height), (300, 16));
    }

    #[test]
    fn jpeg_skips_app_segments() {
        let mut j = vec![0xFF, 0xD8];
        j.extend_from_slice(&[0xFF, 0xE0, 0x00, 0x04, 0xAA, 0xBB]);
        j.extend_from_slice(&[0xFF, 0xC0, 0x00, 0x0B, 0x08, 0x00, 0x20, 0x01, 0x40, 0x03]);
        let h = read_header(&j).unwrap();
        assert_eq!((h.format, h.width, h.height), (ImageFormat::Jpeg, 320, 32));
        assert!(read_header(&j[..8]).is_err());
    }

    #[test]
    fn unknown() {
        assert_eq!(read_header(b"nope"), Err(ImageHeaderError::UnknownFormat));
    }
}
