//! Binary snapshots: a little-endian header followed by either the real
//! `w0` field or the full 4×4 complex matrix at every grid point.
//!
//! Layout: magic `DWPS`, version `u32`, `n_x` and `n_p` as `u32`,
//! `x_min, x_max, p_min, p_max, time` as `f64`, payload kind `u32`, then
//! the payload in row-major order (x outer, p inner). `FULL_MATRIX` stores
//! 16 complex values per point, row-major over the matrix, each as
//! `(re, im)`.

use std::fs;
use std::io;
use std::path::Path;

use dwps_core::observables::w0;
use dwps_core::phase_grid::{make_grid, MatrixPhaseField, PhaseGrid, Representation};
use dwps_core::PhaseFieldF64;
use num_complex::Complex;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"DWPS";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 5 * 8 + 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PayloadKind {
    W0Real,
    FullMatrix,
}

impl PayloadKind {
    fn code(self) -> u32 {
        match self {
            PayloadKind::W0Real => 0,
            PayloadKind::FullMatrix => 1,
        }
    }

    fn from_code(c: u32) -> Option<Self> {
        match c {
            0 => Some(PayloadKind::W0Real),
            1 => Some(PayloadKind::FullMatrix),
            _ => None,
        }
    }

    /// Number of `f64` values per grid point.
    fn width(self) -> usize {
        match self {
            PayloadKind::W0Real => 1,
            PayloadKind::FullMatrix => 32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub version: u32,
    pub n_x: u32,
    pub n_p: u32,
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub time: f64,
    pub kind: PayloadKind,
}

impl SnapshotHeader {
    pub fn new(grid: &PhaseGrid<f64>, time: f64, kind: PayloadKind) -> Self {
        Self {
            version: VERSION,
            n_x: grid.n_x() as u32,
            n_p: grid.n_p() as u32,
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            p_min: grid.p_min(),
            p_max: grid.p_max(),
            time,
            kind,
        }
    }

    pub fn points(&self) -> usize {
        self.n_x as usize * self.n_p as usize
    }

    pub fn payload_len(&self) -> usize {
        self.points() * self.kind.width()
    }

    pub fn grid(&self) -> Result<PhaseGrid<f64>, SnapshotError> {
        make_grid(self.n_x as usize, self.n_p as usize, self.x_min, self.x_max, self.p_min, self.p_max)
            .map_err(|e| SnapshotError::Header(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    /// `f64` values in file order.
    pub payload: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("bad magic {0:?}, not a snapshot")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("unknown payload kind {0}")]
    Kind(u32),
    #[error("truncated snapshot: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("snapshot has {0} trailing bytes")]
    Trailing(usize),
    #[error("invalid header: {0}")]
    Header(String),
    #[error("payload has {found} values, header requires {expected}")]
    PayloadLength { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Snapshot {
    /// `w0` of an X_P state.
    pub fn w0(q: &PhaseFieldF64, time: f64) -> Result<Self, SnapshotError> {
        let values = w0(q).map_err(|e| SnapshotError::Header(e.to_string()))?.values;
        Ok(Self { header: SnapshotHeader::new(q.grid(), time, PayloadKind::W0Real), payload: values })
    }

    /// Every matrix component of an X_P state.
    pub fn full(q: &PhaseFieldF64, time: f64) -> Result<Self, SnapshotError> {
        q.expect_repr(&[Representation::XP]).map_err(|e| SnapshotError::Header(e.to_string()))?;
        let mut payload = Vec::with_capacity(q.grid().len() * 32);
        for m in q.to_matrices() {
            for z in m.iter() {
                payload.push(z.re);
                payload.push(z.im);
            }
        }
        Ok(Self { header: SnapshotHeader::new(q.grid(), time, PayloadKind::FullMatrix), payload })
    }

    pub fn of_kind(q: &PhaseFieldF64, time: f64, kind: PayloadKind) -> Result<Self, SnapshotError> {
        match kind {
            PayloadKind::W0Real => Self::w0(q, time),
            PayloadKind::FullMatrix => Self::full(q, time),
        }
    }

    /// Rebuilds the X_P state of a `FULL_MATRIX` snapshot.
    pub fn to_field(&self) -> Result<PhaseFieldF64, SnapshotError> {
        if self.header.kind != PayloadKind::FullMatrix {
            return Err(SnapshotError::Header("only FULL_MATRIX snapshots hold the state".into()));
        }
        let grid = self.header.grid()?;
        let data = self
            .payload
            .chunks_exact(32)
            .map(|c| dwps_core::Matrix4f64::from_fn(|a, b| Complex::new(c[8 * a + 2 * b], c[8 * a + 2 * b + 1])))
            .collect();
        MatrixPhaseField::from_data(grid, Representation::XP, data).map_err(|e| SnapshotError::Header(e.to_string()))
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, SnapshotError> {
        let h = &self.header;
        if self.payload.len() != h.payload_len() {
            return Err(SnapshotError::PayloadLength { expected: h.payload_len(), found: self.payload.len() });
        }
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.payload.len());
        out.extend_from_slice(&MAGIC);
        for v in [h.version, h.n_x, h.n_p] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [h.x_min, h.x_max, h.p_min, h.p_max, h.time] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&h.kind.code().to_le_bytes());
        for v in &self.payload {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SnapshotError> {
        if bytes.len() < HEADER_LEN {
            return Err(SnapshotError::Truncated { expected: HEADER_LEN, found: bytes.len() });
        }
        let magic: [u8; 4] = bytes[..4].try_into().expect("four bytes");
        if magic != MAGIC {
            return Err(SnapshotError::BadMagic(magic));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("four bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("eight bytes"));
        let version = u32_at(4);
        if version != VERSION {
            return Err(SnapshotError::Version(version));
        }
        let code = u32_at(56);
        let kind = PayloadKind::from_code(code).ok_or(SnapshotError::Kind(code))?;
        let header = SnapshotHeader {
            version,
            n_x: u32_at(8),
            n_p: u32_at(12),
            x_min: f64_at(16),
            x_max: f64_at(24),
            p_min: f64_at(32),
            p_max: f64_at(40),
            time: f64_at(48),
            kind,
        };
        let expected = HEADER_LEN + 8 * header.payload_len();
        if bytes.len() < expected {
            return Err(SnapshotError::Truncated { expected, found: bytes.len() });
        }
        if bytes.len() > expected {
            return Err(SnapshotError::Trailing(bytes.len() - expected));
        }
        let payload = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
            .collect();
        Ok(Self { header, payload })
    }
}

pub fn write_snapshot(snapshot: &Snapshot, path: &Path) -> Result<(), SnapshotError> {
    fs::write(path, snapshot.to_bytes()?)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, SnapshotError> {
    Snapshot::from_bytes(&fs::read(path)?)
}
