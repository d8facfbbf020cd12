use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::GeometryError;

/// Row-major 8-bit image, 1 (gray) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, channels: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        Self {
            width,
            height,
            channels,
            data: vec![0; width as usize * height as usize * channels as usize],
        }
    }

    pub fn from_data(
        width: u32,
        height: u32,
        channels: u8,
        data: Vec<u8>,
    ) -> Result<Self, GeometryError> {
        let expected = width as usize * height as usize * channels as usize;
        if channels != 1 && channels != 3 {
            return Err(GeometryError::ImageFormat(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != expected {
            return Err(GeometryError::ImageFormat(format!(
                "data length {} does not match {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Self {
        let mut img = Self::new(width, height, channels);
        img.data.fill(value);
        img
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    /// Sample of one channel; callers must pass in-bounds coordinates.
    #[inline]
    pub fn get(&self, x: u32, y: u32, c: u8) -> u8 {
        self.data[self.offset(x, y) + c as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, c: u8, value: u8) {
        let off = self.offset(x, y) + c as usize;
        self.data[off] = value;
    }

    /// Writes one value to every channel of a pixel, ignoring out-of-bounds
    /// coordinates.
    pub fn put_pixel(&mut self, x: i64, y: i64, value: u8) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let off = self.offset(x as u32, y as u32);
        for c in 0..self.channels as usize {
            self.data[off + c] = value;
        }
    }

    /// Mean of the channels at one pixel, as gray intensity.
    #[inline]
    pub fn gray(&self, x: u32, y: u32) -> u8 {
        let off = self.offset(x, y);
        match self.channels {
            1 => self.data[off],
            _ => {
                let sum = self.data[off] as u16 + self.data[off + 1] as u16 + self.data[off + 2] as u16;
                (sum / 3) as u8
            }
        }
    }

    /// Converts gray to RGB by channel replication; RGB images are returned
    /// unchanged.
    pub fn to_rgb(&self) -> ImageBuffer {
        if self.channels == 3 {
            return self.clone();
        }
        let mut data = Vec::with_capacity(self.data.len() * 3);
        for &v in &self.data {
            data.extend_from_slice(&[v, v, v]);
        }
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: 3,
            data,
        }
    }

    /// Writes binary PGM (P5) for gray images or PPM (P6) for RGB.
    pub fn write_pnm<W: Write>(&self, w: &mut W) -> Result<(), GeometryError> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        write!(w, "{magic}\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn read_pnm<R: Read>(r: &mut R) -> Result<Self, GeometryError> {
        let mut reader = BufReader::new(r);
        let magic = read_token(&mut reader)?;
        let channels = match magic.as_str() {
            "P5" => 1,
            "P6" => 3,
            other => {
                return Err(GeometryError::ImageFormat(format!(
                    "unsupported magic {other:?} (want P5 or P6)"
                )))
            }
        };
        let width: u32 = parse_token(&mut reader, "width")?;
        let height: u32 = parse_token(&mut reader, "height")?;
        let maxval: u32 = parse_token(&mut reader, "maxval")?;
        if maxval != 255 {
            return Err(GeometryError::ImageFormat(format!(
                "unsupported maxval {maxval} (want 255)"
            )));
        }
        let len = width as usize * height as usize * channels as usize;
        let mut data = vec![0u8; len];
        reader.read_exact(&mut data)?;
        Self::from_data(width, height, channels as u8, data)
    }

    pub fn save_pnm(&self, path: &Path) -> Result<(), GeometryError> {
        let mut f = std::fs::File::create(path)?;
        self.write_pnm(&mut f)
    }

    pub fn load_pnm(path: &Path) -> Result<Self, GeometryError> {
        let mut f = std::fs::File::open(path)?;
        Self::read_pnm(&mut f)
    }
}

/// Reads one whitespace-delimited header token, skipping `#` comment lines.
fn read_token<R: BufRead>(r: &mut R) -> Result<String, GeometryError> {
    let mut token = Vec::new();
    let mut in_comment = false;
    loop {
        let mut byte = [0u8; 1];
        match r.read_exact(&mut byte) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof && !token.is_empty() => break,
            Err(e) => return Err(e.into()),
        }
        let b = byte[0];
        if in_comment {
            if b == b'\n' {
                in_comment = false;
            }
            continue;
        }
        if b == b'#' {
            in_comment = true;
            continue;
        }
        if b.is_ascii_whitespace() {
            if token.is_empty() {
                continue;
            }
            break;
        }
        token.push(b);
    }
    Ok(String::from_utf8_lossy(&token).into_owned())
}

fn parse_token<R: BufRead>(r: &mut R, what: &str) -> Result<u32, GeometryError> {
    let token = read_token(r)?;
    token
        .parse()
        .map_err(|_| GeometryError::ImageFormat(format!("bad {what}: {token:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip_is_bit_exact() {
        let mut img = ImageBuffer::new(5, 3, 1);
        for y in 0..3 {
            for x in 0..5 {
                img.set(x, y, 0, (x * 10 + y) as u8);
            }
        }
        let mut buf = Vec::new();
        img.write_pnm(&mut buf).unwrap();
        let back = ImageBuffer::read_pnm(&mut buf.as_slice()).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn ppm_round_trip_is_bit_exact() {
        let mut img = ImageBuffer::new(2, 2, 3);
        img.set(1, 0, 2, 200);
        let mut buf = Vec::new();
        img.write_pnm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n2 2\n255\n"));
        let back = ImageBuffer::read_pnm(&mut buf.as_slice()).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn header_comments_are_skipped() {
        let bytes = b"P5\n# comment line\n2 1\n255\n\x01\x02";
        let img = ImageBuffer::read_pnm(&mut bytes.as_slice()).unwrap();
        assert_eq!(img.get(0, 0, 0), 1);
        assert_eq!(img.get(1, 0, 0), 2);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(ImageBuffer::from_data(2, 2, 1, vec![0; 3]).is_err());
    }
}
