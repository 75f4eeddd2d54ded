//! Flat little-endian binary container used by every checkpoint.
//!
//! Layout is a sequence of primitive fields; each composite type writes its
//! own tag and fields in a fixed order. Floats are stored as raw IEEE-754
//! bits so a decode followed by an encode reproduces the input bytes.

use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"QLCK";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("unexpected end of checkpoint data at byte {0}")]
    Truncated(usize),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("invalid {what} at byte {offset}")]
    Invalid { what: &'static str, offset: usize },
    #[error("{0} trailing bytes after checkpoint payload")]
    Trailing(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn header(&mut self) {
        self.buf.extend_from_slice(MAGIC);
        self.u32(VERSION);
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    pub fn f64s(&mut self, v: &[f64]) {
        self.u64(v.len() as u64);
        for x in v {
            self.f64(*x);
        }
    }

    pub fn usizes(&mut self, v: &[usize]) {
        self.u64(v.len() as u64);
        for x in v {
            self.u64(*x as u64);
        }
    }

    pub fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.data.len() - self.pos < n {
            return Err(CheckpointError::Truncated(self.pos));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn header(&mut self) -> Result<(), CheckpointError> {
        if self.take(4)? != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let v = self.u32()?;
        if v != VERSION {
            return Err(CheckpointError::Version(v));
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8, CheckpointError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64, CheckpointError> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn len(&mut self, elem: usize) -> Result<usize, CheckpointError> {
        let at = self.pos;
        let n = self.u64()?;
        let remaining = (self.data.len() - self.pos) as u64;
        if n.checked_mul(elem as u64).map_or(true, |b| b > remaining) {
            return Err(CheckpointError::Truncated(at));
        }
        Ok(n as usize)
    }

    pub fn f64s(&mut self) -> Result<Vec<f64>, CheckpointError> {
        let n = self.len(8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn usizes(&mut self) -> Result<Vec<usize>, CheckpointError> {
        let n = self.len(8)?;
        (0..n).map(|_| self.u64().map(|v| v as usize)).collect()
    }

    pub fn str(&mut self) -> Result<String, CheckpointError> {
        let at = self.pos;
        let n = self.len(1)?;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| CheckpointError::Invalid {
            what: "utf-8 string",
            offset: at,
        })
    }

    pub fn finish(self) -> Result<(), CheckpointError> {
        let rest = self.data.len() - self.pos;
        if rest != 0 {
            return Err(CheckpointError::Trailing(rest));
        }
        Ok(())
    }
}
