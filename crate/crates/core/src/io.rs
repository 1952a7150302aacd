//! Point cloud I/O: PLY reading and writing, voxelization, and color
//! conversion between RGB and full-range BT.601 YUV.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::morton;

/// A point cloud as read from disk: real-valued positions with 8-bit colors.
#[derive(Clone, Debug, PartialEq)]
pub struct RawCloud {
    pub positions: Vec<[f64; 3]>,
    pub colors: Vec<[u8; 3]>,
}

impl RawCloud {
    pub fn new(positions: Vec<[f64; 3]>, colors: Vec<[u8; 3]>) -> Result<Self> {
        if positions.len() != colors.len() {
            return Err(Error::LengthMismatch {
                expected: positions.len(),
                found: colors.len(),
            });
        }
        Ok(Self { positions, colors })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// A cloud whose coordinates lie on the integer grid `{0, .., 2^depth - 1}^3`.
///
/// Coordinates are unique and stored in Morton order. `attributes` carry
/// whatever color space the caller put in; [`voxelize`] keeps RGB and
/// [`VoxelizedCloud::to_yuv`] converts.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelizedCloud {
    pub depth: u32,
    pub coords: Vec<[u32; 3]>,
    pub attributes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl VoxelizedCloud {
    /// Validate, merge duplicate voxels and sort into Morton order.
    ///
    /// Duplicates are merged with a weight-averaged attribute and summed weight.
    pub fn from_parts(depth: u32, coords: Vec<[u32; 3]>, attributes: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<Self> {
        if depth == 0 || depth > morton::MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "depth must be in 1..={}, got {depth}",
                morton::MAX_DEPTH
            )));
        }
        if coords.is_empty() {
            return Err(Error::EmptyCloud);
        }
        for len in [attributes.len(), weights.len()] {
            if len != coords.len() {
                return Err(Error::LengthMismatch {
                    expected: coords.len(),
                    found: len,
                });
            }
        }
        let side = 1u64 << depth;
        for (i, c) in coords.iter().enumerate() {
            if c.iter().any(|&v| u64::from(v) >= side) {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {c:?} of point {i} is outside the 2^{depth} grid"
                )));
            }
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::NonPositiveWeight { index, weight });
            }
        }

        let mut order: Vec<(u64, usize)> = coords
            .iter()
            .enumerate()
            .map(|(i, &c)| (morton::encode(c), i))
            .collect();
        order.sort_unstable();

        let mut out = Self {
            depth,
            coords: Vec::with_capacity(order.len()),
            attributes: Vec::with_capacity(order.len()),
            weights: Vec::with_capacity(order.len()),
        };
        let mut last = None;
        for (code, i) in order {
            let w = weights[i];
            let a = attributes[i];
            if last == Some(code) {
                let k = out.coords.len() - 1;
                let (prev, total) = (out.weights[k], out.weights[k] + w);
                for (m, x) in out.attributes[k].iter_mut().zip(a) {
                    *m = (*m * prev + x * w) / total;
                }
                out.weights[k] = total;
            } else {
                out.coords.push(coords[i]);
                out.attributes.push(a);
                out.weights.push(w);
                last = Some(code);
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Same geometry with attributes replaced.
    pub fn with_attributes(&self, attributes: Vec<[f64; 3]>) -> Result<Self> {
        if attributes.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: attributes.len(),
            });
        }
        Ok(Self {
            attributes,
            ..self.clone()
        })
    }

    /// Interpret the attributes as RGB and convert them to YUV.
    pub fn to_yuv(&self) -> Self {
        Self {
            attributes: self.attributes.iter().map(|&c| rgb_to_yuv_f64(c)).collect(),
            ..self.clone()
        }
    }

    /// Interpret the attributes as YUV and convert them back to RGB (still real valued).
    pub fn to_rgb(&self) -> Self {
        Self {
            attributes: self.attributes.iter().map(|&c| yuv_to_rgb_f64(c)).collect(),
            ..self.clone()
        }
    }

    /// Drop weights and round attributes (taken as RGB) back to 8-bit colors.
    pub fn to_raw(&self) -> RawCloud {
        RawCloud {
            positions: self
                .coords
                .iter()
                .map(|c| [f64::from(c[0]), f64::from(c[1]), f64::from(c[2])])
                .collect(),
            colors: self.attributes.iter().map(|&c| clamp_rgb(c)).collect(),
        }
    }
}

/// Map a raw cloud onto the `2^depth` voxel grid.
///
/// Positions that already fit `[0, 2^depth)` are floored in place. Otherwise
/// they are translated to the bounding-box minimum and, if still too large,
/// uniformly scaled so the longest extent spans the grid.
pub fn voxelize(cloud: &RawCloud, depth: u32) -> Result<VoxelizedCloud> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if depth == 0 || depth > morton::MAX_DEPTH {
        return Err(Error::InvalidArgument(format!("depth {depth} out of range")));
    }
    if cloud.positions.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite position".into()));
    }
    let side = f64::from(1u32 << depth);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &cloud.positions {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }

    let fits = lo.iter().all(|&v| v >= 0.0) && hi.iter().all(|&v| v < side);
    let (offset, scale) = if fits {
        ([0.0; 3], 1.0)
    } else {
        let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
        let scale = if extent < side { 1.0 } else { (side - 1.0) / extent };
        (lo, scale)
    };

    let max = (1u32 << depth) - 1;
    let coords = cloud
        .positions
        .iter()
        .map(|p| {
            let mut c = [0u32; 3];
            for k in 0..3 {
                let v = ((p[k] - offset[k]) * scale).floor();
                c[k] = (v.max(0.0) as u32).min(max);
            }
            c
        })
        .collect();
    let attributes = cloud
        .colors
        .iter()
        .map(|c| [f64::from(c[0]), f64::from(c[1]), f64::from(c[2])])
        .collect();
    VoxelizedCloud::from_parts(depth, coords, attributes, vec![1.0; cloud.len()])
}

/// Full-range BT.601, chroma centered on 128.
#[inline]
pub fn rgb_to_yuv_f64(c: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = c;
    [
        0.299 * r + 0.587 * g + 0.114 * b,
        -0.168_735_891_647_856_5 * r - 0.331_264_108_352_143_5 * g + 0.5 * b + 128.0,
        0.5 * r - 0.418_687_589_158_345_2 * g - 0.081_312_410_841_654_8 * b + 128.0,
    ]
}

#[inline]
pub fn yuv_to_rgb_f64(c: [f64; 3]) -> [f64; 3] {
    let y = c[0];
    let u = c[1] - 128.0;
    let v = c[2] - 128.0;
    [
        y + 1.402 * v,
        y - 0.344_136_286_201_022_1 * u - 0.714_136_286_201_022_1 * v,
        y + 1.772 * u,
    ]
}

fn clamp_rgb(c: [f64; 3]) -> [u8; 3] {
    c.map(|v| v.round().clamp(0.0, 255.0) as u8)
}

pub fn rgb_to_yuv(colors: &[[u8; 3]]) -> Vec<[f64; 3]> {
    colors.iter().map(|c| rgb_to_yuv_f64(c.map(f64::from))).collect()
}

/// Inverse of [`rgb_to_yuv`], rounded and clamped to 8 bits.
pub fn yuv_to_rgb(colors: &[[f64; 3]]) -> Vec<[u8; 3]> {
    colors.iter().map(|&c| clamp_rgb(yuv_to_rgb_f64(c))).collect()
}

/// PLY body encodings this crate reads and writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Self::I8 => f64::from(b[0] as i8),
            Self::U8 => f64::from(b[0]),
            Self::I16 => f64::from(i16::from_le_bytes([b[0], b[1]])),
            Self::U16 => f64::from(u16::from_le_bytes([b[0], b[1]])),
            Self::I32 => f64::from(i32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::U32 => f64::from(u32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::F32 => f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::F64 => f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]),
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar(String, Scalar),
    List(String),
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug)]
struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
    body_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    const END: &[u8] = b"end_header";
    let end = bytes
        .windows(END.len())
        .position(|w| w == END)
        .ok_or_else(|| Error::MalformedHeader("no end_header".into()))?;
    let mut body_offset = end + END.len();
    if bytes.get(body_offset) == Some(&b'\r') {
        body_offset += 1;
    }
    if bytes.get(body_offset) == Some(&b'\n') {
        body_offset += 1;
    }
    let text =
        std::str::from_utf8(&bytes[..end]).map_err(|_| Error::MalformedHeader("header is not valid utf-8".into()))?;

    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some("ply") {
        return Err(Error::MalformedHeader("missing `ply` magic".into()));
    }
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    for line in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("format") => {
                let kind = tok.next().unwrap_or_default();
                format = Some(match kind {
                    "ascii" => PlyFormat::Ascii,
                    "binary_little_endian" => PlyFormat::BinaryLittleEndian,
                    other => return Err(Error::UnsupportedFormat(other.to_string())),
                });
            }
            Some("comment") | Some("obj_info") => {}
            Some("element") => {
                let name = tok
                    .next()
                    .ok_or_else(|| Error::MalformedHeader(format!("bad element line `{line}`")))?;
                let count = tok
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| Error::MalformedHeader(format!("bad element count in `{line}`")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| Error::MalformedHeader("property before element".into()))?;
                let kind = tok.next().unwrap_or_default();
                let prop = if kind == "list" {
                    let name = tok.nth(2).unwrap_or_default();
                    Property::List(name.to_string())
                } else {
                    let scalar =
                        Scalar::parse(kind).ok_or_else(|| Error::MalformedHeader(format!("unknown type `{kind}`")))?;
                    let name = tok
                        .next()
                        .ok_or_else(|| Error::MalformedHeader(format!("bad property `{line}`")))?;
                    Property::Scalar(name.to_string(), scalar)
                };
                element.properties.push(prop);
            }
            Some(other) => {
                return Err(Error::MalformedHeader(format!("unexpected keyword `{other}`")));
            }
            None => {}
        }
    }
    let format = format.ok_or_else(|| Error::MalformedHeader("missing format line".into()))?;
    Ok(Header {
        format,
        elements,
        body_offset,
    })
}

/// Positions plus colors when the file carries them.
struct PlyPoints {
    positions: Vec<[f64; 3]>,
    /// Colors, or the name of the first missing color property.
    colors: std::result::Result<Vec<[u8; 3]>, &'static str>,
}

fn find_scalar(element: &Element, name: &str) -> Option<usize> {
    element
        .properties
        .iter()
        .position(|p| matches!(p, Property::Scalar(n, _) if n == name))
}

fn parse_points(bytes: &[u8]) -> Result<PlyPoints> {
    let header = parse_header(bytes)?;
    let vertex_at = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| Error::MalformedHeader("no vertex element".into()))?;
    let vertex = &header.elements[vertex_at];

    let mut pos_idx = [0usize; 3];
    for (k, name) in ["x", "y", "z"].into_iter().enumerate() {
        pos_idx[k] = find_scalar(vertex, name).ok_or(Error::MissingPosition(name))?;
    }
    const COLOR_NAMES: [&str; 3] = ["red", "green", "blue"];
    let color_idx: Vec<Option<usize>> = COLOR_NAMES.iter().map(|n| find_scalar(vertex, n)).collect();
    let has_colors = color_idx.iter().all(Option::is_some);
    let missing_color = color_idx.iter().position(Option::is_none).map(|k| COLOR_NAMES[k]);

    let n = vertex.count;
    let mut positions = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(if has_colors { n } else { 0 });
    let mut row = vec![0.0f64; vertex.properties.len()];

    let mut push_row = |row: &[f64], i: usize| -> Result<()> {
        positions.push([row[pos_idx[0]], row[pos_idx[1]], row[pos_idx[2]]]);
        if has_colors {
            let mut c = [0u8; 3];
            for k in 0..3 {
                let v = row[color_idx[k].unwrap_or_default()];
                if !(0.0..=255.0).contains(&v) || v.fract() != 0.0 {
                    return Err(Error::BadValue {
                        vertex: i,
                        reason: format!("color channel {v} is not an integer in 0..=255"),
                    });
                }
                c[k] = v as u8;
            }
            colors.push(c);
        }
        Ok(())
    };

    let body = &bytes[header.body_offset..];
    match header.format {
        PlyFormat::Ascii => {
            let text =
                std::str::from_utf8(body).map_err(|_| Error::MalformedHeader("ascii body is not utf-8".into()))?;
            let mut lines = text.lines().filter(|l| !l.trim().is_empty());
            for e in &header.elements[..vertex_at] {
                for _ in 0..e.count {
                    lines.next();
                }
            }
            for i in 0..n {
                let line = lines.next().ok_or(Error::CountMismatch { expected: n, found: i })?;
                if vertex.properties.iter().any(|p| matches!(p, Property::List(_))) {
                    return Err(Error::MalformedHeader("list properties on vertex".into()));
                }
                let mut tok = line.split_whitespace();
                for slot in row.iter_mut() {
                    let t = tok.next().ok_or(Error::BadValue {
                        vertex: i,
                        reason: "too few values".into(),
                    })?;
                    *slot = t.parse().map_err(|_| Error::BadValue {
                        vertex: i,
                        reason: format!("cannot parse `{t}`"),
                    })?;
                }
                push_row(&row, i)?;
            }
        }
        PlyFormat::BinaryLittleEndian => {
            let scalars = |e: &Element| -> Result<Vec<Scalar>> {
                e.properties
                    .iter()
                    .map(|p| match p {
                        Property::Scalar(_, s) => Ok(*s),
                        Property::List(name) => Err(Error::MalformedHeader(format!(
                            "binary list property `{name}` before or on vertex element"
                        ))),
                    })
                    .collect()
            };
            let mut off = 0usize;
            for e in &header.elements[..vertex_at] {
                let stride: usize = scalars(e)?.iter().map(|s| s.size()).sum();
                off += stride * e.count;
            }
            let types = scalars(vertex)?;
            let stride: usize = types.iter().map(|s| s.size()).sum();
            for i in 0..n {
                let start = off + i * stride;
                let rec = body
                    .get(start..start + stride)
                    .ok_or(Error::CountMismatch { expected: n, found: i })?;
                let mut p = 0;
                for (slot, ty) in row.iter_mut().zip(&types) {
                    *slot = ty.read_le(&rec[p..]);
                    p += ty.size();
                }
                push_row(&row, i)?;
            }
        }
    }

    Ok(PlyPoints {
        positions,
        colors: match missing_color {
            Some(name) => Err(name),
            None => Ok(colors),
        },
    })
}

/// Read a PLY with `x,y,z` and `red,green,blue` vertex properties.
pub fn read_ply(path: impl AsRef<Path>) -> Result<RawCloud> {
    let bytes = fs::read(path)?;
    read_ply_bytes(&bytes)
}

pub fn read_ply_bytes(bytes: &[u8]) -> Result<RawCloud> {
    let points = parse_points(bytes)?;
    let colors = points.colors.map_err(Error::MissingColor)?;
    RawCloud::new(points.positions, colors)
}

/// Read only vertex positions; color properties are optional.
///
/// Used by the decoder, which receives geometry separately from the bitstream.
pub fn read_ply_positions(path: impl AsRef<Path>) -> Result<Vec<[f64; 3]>> {
    let bytes = fs::read(path)?;
    Ok(parse_points(&bytes)?.positions)
}

pub fn write_ply(cloud: &RawCloud, path: impl AsRef<Path>, format: PlyFormat) -> Result<()> {
    let bytes = write_ply_bytes(cloud, format)?;
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

pub fn write_ply_bytes(cloud: &RawCloud, format: PlyFormat) -> Result<Vec<u8>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if cloud.positions.len() != cloud.colors.len() {
        return Err(Error::LengthMismatch {
            expected: cloud.positions.len(),
            found: cloud.colors.len(),
        });
    }
    let mut out = Vec::new();
    let fmt = match format {
        PlyFormat::Ascii => "ascii",
        PlyFormat::BinaryLittleEndian => "binary_little_endian",
    };
    write!(
        out,
        "ply\nformat {fmt} 1.0\nelement vertex {}\n\
         property double x\nproperty double y\nproperty double z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        cloud.len()
    )?;
    for (p, c) in cloud.positions.iter().zip(&cloud.colors) {
        match format {
            PlyFormat::Ascii => {
                writeln!(out, "{} {} {} {} {} {}", p[0], p[1], p[2], c[0], c[1], c[2])?;
            }
            PlyFormat::BinaryLittleEndian => {
                for v in p {
                    out.extend_from_slice(&v.to_le_bytes());
                }
                out.extend_from_slice(c);
            }
        }
    }
    Ok(out)
}

/// Group points by voxel without merging; handy for diagnostics.
pub fn duplicate_count(coords: &[[u32; 3]]) -> usize {
    let mut seen: HashMap<[u32; 3], usize> = HashMap::with_capacity(coords.len());
    for c in coords {
        *seen.entry(*c).or_default() += 1;
    }
    coords.len() - seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_red() -> RawCloud {
        RawCloud::new(vec![[0.0, 0.0, 0.0]], vec![[255, 0, 0]]).unwrap()
    }

    #[test]
    fn ascii_single_vertex() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n\
                    property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n\
                    end_header\n0 0 0 255 0 0\n";
        let cloud = read_ply_bytes(text.as_bytes()).unwrap();
        assert_eq!(cloud, one_red());
    }

    #[test]
    fn missing_red_is_reported() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n\
                    property float z\nproperty uchar green\nproperty uchar blue\nend_header\n0 0 0 0 0\n";
        assert!(matches!(
            read_ply_bytes(text.as_bytes()),
            Err(Error::MissingColor("red"))
        ));
    }

    #[test]
    fn big_endian_rejected() {
        let text = "ply\nformat binary_big_endian 1.0\nelement vertex 0\nend_header\n";
        assert!(matches!(
            read_ply_bytes(text.as_bytes()),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn short_body_is_count_mismatch() {
        let text = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n\
                    property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n\
                    end_header\n0 0 0 1 2 3\n";
        assert!(matches!(
            read_ply_bytes(text.as_bytes()),
            Err(Error::CountMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn skips_preceding_elements_and_trailing_faces() {
        let text = "ply\nformat ascii 1.0\nelement camera 1\nproperty float f\n\
                    element vertex 1\nproperty float x\nproperty float y\nproperty float z\n\
                    property uchar red\nproperty uchar green\nproperty uchar blue\n\
                    element face 1\nproperty list uchar int vertex_indices\nend_header\n\
                    3.5\n1 2 3 4 5 6\n3 0 0 0\n";
        let cloud = read_ply_bytes(text.as_bytes()).unwrap();
        assert_eq!(cloud.positions, vec![[1.0, 2.0, 3.0]]);
        assert_eq!(cloud.colors, vec![[4, 5, 6]]);
    }

    #[test]
    fn empty_cloud_cannot_be_written() {
        let empty = RawCloud::new(vec![], vec![]).unwrap();
        assert!(matches!(
            write_ply_bytes(&empty, PlyFormat::Ascii),
            Err(Error::EmptyCloud)
        ));
    }

    #[test]
    fn ascii_and_binary_agree() {
        let cloud = RawCloud::new(
            vec![[0.1, -2.5, 1e-7], [1023.0, 512.25, 3.0]],
            vec![[1, 2, 3], [250, 128, 0]],
        )
        .unwrap();
        let a = read_ply_bytes(&write_ply_bytes(&cloud, PlyFormat::Ascii).unwrap()).unwrap();
        let b = read_ply_bytes(&write_ply_bytes(&cloud, PlyFormat::BinaryLittleEndian).unwrap()).unwrap();
        assert_eq!(a, cloud);
        assert_eq!(b, cloud);
    }

    #[test]
    fn voxelize_identity_on_grid_data() {
        let cloud = RawCloud::new(
            vec![[5.0, 7.0, 1.0], [1000.0, 0.0, 3.0], [0.0, 0.0, 0.0]],
            vec![[1, 1, 1], [2, 2, 2], [3, 3, 3]],
        )
        .unwrap();
        let v = voxelize(&cloud, 10).unwrap();
        let mut got = v.coords.clone();
        got.sort();
        assert_eq!(got, vec![[0, 0, 0], [5, 7, 1], [1000, 0, 3]]);
        assert!(v.weights.iter().all(|&w| w == 1.0));
    }

    #[test]
    fn voxelize_merges_duplicates() {
        let cloud = RawCloud::new(vec![[0.2, 0.2, 0.2], [0.7, 0.1, 0.9]], vec![[0, 0, 0], [2, 2, 2]]).unwrap();
        let v = voxelize(&cloud, 3).unwrap();
        assert_eq!(v.coords, vec![[0, 0, 0]]);
        assert_eq!(v.attributes, vec![[1.0, 1.0, 1.0]]);
        assert_eq!(v.weights, vec![2.0]);
    }

    #[test]
    fn voxelize_scales_large_extent() {
        let cloud = RawCloud::new(vec![[-10.0, 0.0, 0.0], [10.0, 5.0, 0.0]], vec![[0, 0, 0], [0, 0, 0]]).unwrap();
        let v = voxelize(&cloud, 4).unwrap();
        assert!(v.coords.contains(&[0, 0, 0]));
        assert!(v.coords.contains(&[15, 3, 0]));
    }

    #[test]
    fn weighted_merge_in_from_parts() {
        let v = VoxelizedCloud::from_parts(2, vec![[1, 1, 1], [1, 1, 1]], vec![[0.0; 3], [4.0; 3]], vec![3.0, 1.0])
            .unwrap();
        assert_eq!(v.attributes, vec![[1.0; 3]]);
        assert_eq!(v.weights, vec![4.0]);
    }

    #[test]
    fn from_parts_rejects_bad_input() {
        assert!(VoxelizedCloud::from_parts(1, vec![[2, 0, 0]], vec![[0.0; 3]], vec![1.0]).is_err());
        assert!(matches!(
            VoxelizedCloud::from_parts(1, vec![[1, 0, 0]], vec![[0.0; 3]], vec![0.0]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            VoxelizedCloud::from_parts(1, vec![], vec![], vec![]),
            Err(Error::EmptyCloud)
        ));
    }

    #[test]
    fn black_and_white() {
        let yuv = rgb_to_yuv(&[[0, 0, 0], [255, 255, 255]]);
        for (got, want) in yuv.iter().zip([[0.0, 128.0, 128.0], [255.0, 128.0, 128.0]]) {
            for k in 0..3 {
                assert!((got[k] - want[k]).abs() < 1e-9, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn duplicates_counted() {
        assert_eq!(duplicate_count(&[[0, 0, 0], [1, 0, 0], [0, 0, 0]]), 1);
    }
}
