//! Quantization, adaptive run-length Golomb-Rice (RLGR) entropy coding and
//! the container bitstream.
//!
//! # RLGR
//!
//! Signed symbols are interleaved to unsigned (`0, -1, 1, -2, ..` becomes
//! `0, 1, 2, 3, ..`). The coder keeps two backward-adaptive parameters in
//! fixed point with [`LSGR`] fractional bits: `k` for runs of zeros and `kr`
//! for Golomb-Rice codes. When `k > 0` it is in run mode: each complete run
//! of `2^k` zeros costs one `0` bit, a partial run is sent as a `1` followed
//! by its length in `k` bits, then the interrupting symbol `u - 1` is sent
//! with Golomb-Rice. When `k == 0` every symbol is Golomb-Rice coded
//! directly. A Golomb-Rice code is the quotient `u >> kr` in unary (ones,
//! terminated by a zero) followed by the low `kr` bits; quotients of
//! [`GR_ESCAPE`] or more are sent as `GR_ESCAPE` ones, a 7-bit width and the
//! raw value.
//!
//! | constant | value | update |
//! |----------|-------|--------|
//! | `UP_GR`  | 4 | `k += 4/8` after a complete zero run |
//! | `DN_GR`  | 6 | `k -= 6/8` after a partial run |
//! | `UQ_GR`  | 3 | `k += 3/8` after a zero in Golomb-Rice mode |
//! | `DQ_GR`  | 3 | `k -= 3/8` after a nonzero in Golomb-Rice mode |
//! | `kr`     |   | `-= 2/8` when the quotient is 0, `+= q/8` when it exceeds 1 |
//!
//! Both parameters start at 1 and saturate at `KPMAX / 8 = 10`.
//!
//! # Bitstream layout
//!
//! All integers little-endian.
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `RAGF` |
//! | 1 | version (1) |
//! | 1 | backend: 0 RA-GFT, 1 RAHT, 2 block-GFT |
//! | 1 | voxel depth `J` |
//! | 1 | number of schedule levels `S` |
//! | S | `log2` of each block size, root side first |
//! | 8 | graph threshold (f64) |
//! | 8 | quantization step (f64) |
//! | 4 | point count `N` (u32) |
//! | 12 | payload byte length of Y, U, V (3 x u32) |
//!
//! The Y, U and V payloads follow back to back, each holding the `N`
//! quantized coefficients of that channel in canonical order.

use crate::error::{Error, Result};
use crate::hierarchy::BlockSchedule;
use crate::io::VoxelizedCloud;
use crate::transforms::{Backend, CoeffKind, CoeffMeta, SpectralConfig, TransformPlan};

pub const LSGR: u32 = 3;
pub const KPMAX: u32 = 80;
const UP_GR: u32 = 4;
const DN_GR: u32 = 6;
const UQ_GR: u32 = 3;
const DQ_GR: u32 = 3;
pub const GR_ESCAPE: u64 = 32;

pub const MAGIC: [u8; 4] = *b"RAGF";
pub const VERSION: u8 = 1;

/// Round-half-away-from-zero uniform quantization.
pub fn quantize(values: &[f64], step: f64) -> Result<Vec<i64>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "quantization step {step} must be positive"
        )));
    }
    values
        .iter()
        .map(|&v| {
            let q = (v / step).round();
            if q.is_finite() && q.abs() < (1u64 << 61) as f64 {
                Ok(q as i64)
            } else {
                Err(Error::SymbolOverflow(q))
            }
        })
        .collect()
}

pub fn dequantize(symbols: &[i64], step: f64) -> Vec<f64> {
    symbols.iter().map(|&q| q as f64 * step).collect()
}

#[inline]
pub fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

#[inline]
pub fn unzigzag(u: u64) -> i64 {
    ((u >> 1) as i64) ^ -((u & 1) as i64)
}

/// Sort coefficient positions into canonical order: DCs by node, then ACs by
/// level, block and in-block index.
pub fn canonical_order(meta: &[CoeffMeta]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..meta.len()).collect();
    idx.sort_by_key(|&i| {
        let m = &meta[i];
        (m.kind == CoeffKind::Ac, m.level, m.block, m.index)
    });
    idx
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    filled: u32,
}

impl BitWriter {
    fn new() -> Self {
        Self {
            bytes: Vec::new(),
            acc: 0,
            filled: 0,
        }
    }

    /// Append the low `n` bits of `value`, most significant first (`n <= 32`).
    fn put(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 32);
        if n == 0 {
            return;
        }
        self.acc = (self.acc << n) | (value & ((1u64 << n) - 1));
        self.filled += n;
        while self.filled >= 8 {
            self.filled -= 8;
            self.bytes.push((self.acc >> self.filled) as u8);
        }
        self.acc &= (1u64 << self.filled) - 1;
    }

    fn put_wide(&mut self, value: u64, n: u32) {
        if n > 32 {
            self.put(value >> 32, n - 32);
            self.put(value, 32);
        } else {
            self.put(value, n);
        }
    }

    fn put_ones(&mut self, mut n: u64) {
        while n >= 32 {
            self.put(u64::from(u32::MAX), 32);
            n -= 32;
        }
        self.put((1u64 << n) - 1, n as u32);
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            let pad = 8 - self.filled;
            self.put(0, pad);
        }
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn bit(&mut self) -> Result<u64> {
        let byte = self.bytes.get(self.pos / 8).ok_or(Error::Truncated)?;
        let b = (byte >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        Ok(u64::from(b))
    }

    fn get(&mut self, n: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.bit()?;
        }
        Ok(v)
    }

    /// Count ones up to the terminating zero, stopping early at `limit`.
    fn ones(&mut self, limit: u64) -> Result<u64> {
        let mut n = 0;
        while n < limit && self.bit()? == 1 {
            n += 1;
        }
        Ok(n)
    }
}

/// Adaptive parameter state shared by encoder and decoder.
#[derive(Clone, Copy)]
struct Adapt {
    kp: u32,
    krp: u32,
}

impl Adapt {
    fn new() -> Self {
        Self {
            kp: 1 << LSGR,
            krp: 1 << LSGR,
        }
    }

    fn k(&self) -> u32 {
        self.kp >> LSGR
    }

    fn kr(&self) -> u32 {
        self.krp >> LSGR
    }

    fn up(&mut self, by: u32) {
        self.kp = (self.kp + by).min(KPMAX);
    }

    fn down(&mut self, by: u32) {
        self.kp = self.kp.saturating_sub(by);
    }

    fn adapt_gr(&mut self, quotient: u64) {
        if quotient == 0 {
            self.krp = self.krp.saturating_sub(2);
        } else if quotient > 1 {
            self.krp = (u64::from(self.krp) + quotient).min(u64::from(KPMAX)) as u32;
        }
    }
}

fn put_gr(w: &mut BitWriter, state: &mut Adapt, u: u64) {
    let kr = state.kr();
    let q = u >> kr;
    if q < GR_ESCAPE {
        w.put_ones(q);
        w.put(0, 1);
        w.put(u, kr);
    } else {
        w.put_ones(GR_ESCAPE);
        let width = 64 - u.leading_zeros();
        w.put(u64::from(width), 7);
        w.put_wide(u, width);
    }
    state.adapt_gr(q);
}

fn get_gr(r: &mut BitReader, state: &mut Adapt) -> Result<u64> {
    let kr = state.kr();
    let q = r.ones(GR_ESCAPE)?;
    let u = if q < GR_ESCAPE {
        (q << kr) | r.get(kr)?
    } else {
        let width = r.get(7)? as u32;
        if width > 64 {
            return Err(Error::Truncated);
        }
        r.get(width)?
    };
    state.adapt_gr(u >> kr);
    Ok(u)
}

/// Entropy-code a symbol sequence. The decoder needs the count.
pub fn rlgr_encode(symbols: &[i64]) -> Vec<u8> {
    let mut w = BitWriter::new();
    let mut s = Adapt::new();
    let mut i = 0;
    while i < symbols.len() {
        let k = s.k();
        if k > 0 {
            let mut zeros = 0u64;
            while i < symbols.len() && symbols[i] == 0 {
                zeros += 1;
                i += 1;
            }
            let mut run = 1u64 << s.k();
            while zeros >= run {
                w.put(0, 1);
                zeros -= run;
                s.up(UP_GR);
                run = 1u64 << s.k();
            }
            w.put(1, 1);
            w.put(zeros, s.k());
            if i < symbols.len() {
                put_gr(&mut w, &mut s, zigzag(symbols[i]) - 1);
                i += 1;
            }
            s.down(DN_GR);
        } else {
            let u = zigzag(symbols[i]);
            i += 1;
            put_gr(&mut w, &mut s, u);
            if u == 0 {
                s.up(UQ_GR);
            } else {
                s.down(DQ_GR);
            }
        }
    }
    w.finish()
}

pub fn rlgr_decode(bytes: &[u8], count: usize) -> Result<Vec<i64>> {
    let mut r = BitReader::new(bytes);
    let mut s = Adapt::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if s.k() > 0 {
            let mut zeros = 0u64;
            while r.bit()? == 0 {
                zeros += 1u64 << s.k();
                s.up(UP_GR);
            }
            zeros += r.get(s.k())?;
            if zeros > (count - out.len()) as u64 {
                return Err(Error::Truncated);
            }
            out.resize(out.len() + zeros as usize, 0);
            if out.len() < count {
                let u = get_gr(&mut r, &mut s)?;
                out.push(unzigzag(u + 1));
            }
            s.down(DN_GR);
        } else {
            let u = get_gr(&mut r, &mut s)?;
            out.push(unzigzag(u));
            if u == 0 {
                s.up(UQ_GR);
            } else {
                s.down(DQ_GR);
            }
        }
    }
    Ok(out)
}

/// Fixed-size container header.
#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub backend: Backend,
    pub depth: u32,
    pub threshold: f64,
    pub step: f64,
    pub count: usize,
    pub channel_bytes: [usize; 3],
}

impl Header {
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.backend.tag());
        out.push(self.depth as u8);
        let sizes = self.backend.schedule_sizes();
        out.push(sizes.len() as u8);
        out.extend(sizes.iter().map(|b| b.trailing_zeros() as u8));
        out.extend_from_slice(&self.threshold.to_le_bytes());
        out.extend_from_slice(&self.step.to_le_bytes());
        out.extend_from_slice(&(self.count as u32).to_le_bytes());
        for n in self.channel_bytes {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
    }

    /// Parse a header, returning it with its length in bytes.
    fn read(bytes: &[u8]) -> Result<(Self, usize)> {
        let short = || Error::Header("stream shorter than its header".into());
        let take = |at: usize, n: usize| bytes.get(at..at + n).ok_or_else(short);
        if take(0, 4)? != MAGIC {
            return Err(Error::Header("bad magic".into()));
        }
        let fixed = take(4, 4)?;
        if fixed[0] != VERSION {
            return Err(Error::Header(format!("unsupported version {}", fixed[0])));
        }
        let (tag, depth, levels) = (fixed[1], u32::from(fixed[2]), fixed[3] as usize);
        let mut at = 8;
        let sizes: Vec<u32> = take(at, levels)?
            .iter()
            .map(|&l| {
                if l < 32 {
                    Ok(1u32 << l)
                } else {
                    Err(Error::Header(format!("bad block size 2^{l}")))
                }
            })
            .collect::<Result<_>>()?;
        at += levels;
        let f64_at = |at: usize| -> Result<f64> { Ok(f64::from_le_bytes(take(at, 8)?.try_into().expect("8 bytes"))) };
        let u32_at =
            |at: usize| -> Result<usize> { Ok(u32::from_le_bytes(take(at, 4)?.try_into().expect("4 bytes")) as usize) };
        let threshold = f64_at(at)?;
        let step = f64_at(at + 8)?;
        let count = u32_at(at + 16)?;
        let channel_bytes = [u32_at(at + 20)?, u32_at(at + 24)?, u32_at(at + 28)?];
        at += 32;

        let backend = match (tag, sizes.len()) {
            (0, _) => Backend::RaGft(BlockSchedule::new(sizes).map_err(|e| Error::Header(e.to_string()))?),
            (1, 0) => Backend::Raht,
            (2, 1) => Backend::BlockGft(sizes[0]),
            _ => return Err(Error::Header(format!("bad backend tag {tag} with {levels} levels"))),
        };
        Ok((
            Self {
                backend,
                depth,
                threshold,
                step,
                count,
                channel_bytes,
            },
            at,
        ))
    }
}

/// Header plus the three entropy-coded channel payloads.
#[derive(Clone, Debug, PartialEq)]
pub struct Bitstream {
    pub header: Header,
    pub payload: [Vec<u8>; 3],
}

impl Bitstream {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.header.write(&mut out);
        for p in &self.payload {
            out.extend_from_slice(p);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, mut at) = Header::read(bytes)?;
        let mut payload: [Vec<u8>; 3] = Default::default();
        for (ch, p) in payload.iter_mut().enumerate() {
            let n = header.channel_bytes[ch];
            *p = bytes
                .get(at..at + n)
                .ok_or_else(|| Error::Header("payload shorter than declared".into()))?
                .to_vec();
            at += n;
        }
        if at != bytes.len() {
            return Err(Error::Header(format!("{} trailing bytes", bytes.len() - at)));
        }
        Ok(Self { header, payload })
    }

    /// Total size in bits, header included.
    pub fn bits(&self) -> usize {
        self.byte_len() * 8
    }

    pub fn byte_len(&self) -> usize {
        let mut header = Vec::new();
        self.header.write(&mut header);
        header.len() + self.payload.iter().map(Vec::len).sum::<usize>()
    }
}

/// Quantize and entropy-code coefficients produced by `plan`.
pub fn encode_with_plan(
    plan: &TransformPlan,
    attributes: &[[f64; 3]],
    backend: &Backend,
    depth: u32,
    step: f64,
    config: &SpectralConfig,
) -> Result<Bitstream> {
    let coeffs = plan.forward(attributes)?;
    let mut payload: [Vec<u8>; 3] = Default::default();
    for (ch, p) in payload.iter_mut().enumerate() {
        *p = rlgr_encode(&quantize(&coeffs.channel(ch), step)?);
    }
    if coeffs.len() > u32::MAX as usize {
        return Err(Error::InvalidArgument("too many points for the container".into()));
    }
    Ok(Bitstream {
        header: Header {
            backend: backend.clone(),
            depth,
            threshold: config.threshold,
            step,
            count: coeffs.len(),
            channel_bytes: [0, 1, 2].map(|ch| payload[ch].len()),
        },
        payload,
    })
}

/// Encode a cloud whose attributes are already YUV.
pub fn encode(cloud: &VoxelizedCloud, backend: &Backend, step: f64, config: &SpectralConfig) -> Result<Bitstream> {
    let plan = TransformPlan::for_backend(cloud, backend, config)?;
    encode_with_plan(&plan, &cloud.attributes, backend, cloud.depth, step, config)
}

/// Dequantized coefficients in canonical order.
pub fn decode_coefficients(stream: &Bitstream) -> Result<Vec<[f64; 3]>> {
    let h = &stream.header;
    let mut values = vec![[0.0; 3]; h.count];
    for ch in 0..3 {
        let symbols = rlgr_decode(&stream.payload[ch], h.count)?;
        for (v, x) in values.iter_mut().zip(dequantize(&symbols, h.step)) {
            v[ch] = x;
        }
    }
    Ok(values)
}

pub fn decode_with_plan(stream: &Bitstream, plan: &TransformPlan) -> Result<Vec<[f64; 3]>> {
    if stream.header.count != plan.len() {
        return Err(Error::Header(format!(
            "stream holds {} points but the geometry has {}",
            stream.header.count,
            plan.len()
        )));
    }
    plan.inverse(&decode_coefficients(stream)?)
}

/// Decode YUV attributes; `geometry` supplies coordinates and weights.
pub fn decode(stream: &Bitstream, geometry: &VoxelizedCloud) -> Result<Vec<[f64; 3]>> {
    let h = &stream.header;
    if h.depth != geometry.depth {
        return Err(Error::Header(format!(
            "stream depth {} differs from geometry depth {}",
            h.depth, geometry.depth
        )));
    }
    if h.count != geometry.len() {
        return Err(Error::Header(format!(
            "stream holds {} points but the geometry has {}",
            h.count,
            geometry.len()
        )));
    }
    let config = SpectralConfig { threshold: h.threshold };
    let plan = TransformPlan::for_backend(geometry, &h.backend, &config)?;
    decode_with_plan(stream, &plan)
}
