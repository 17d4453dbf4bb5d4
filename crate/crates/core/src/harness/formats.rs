//! On-disk formats.
//!
//! All binary formats are little-endian:
//!
//! * PCSET: magic `PCSET1\0\0`, u32 cloud count, then per cloud a u32 point
//!   count followed by that many (x, y, z) float32 triples.
//! * LATC: magic `LATC1\0\0\0`, u32 rows, u32 dims, row-major float32 values.
//! * VOXG: magic `VOXG1\0\0\0`, u32 resolution, six float32 (center xyz,
//!   half-widths xyz), then resolution^3 bytes of 0/1 in x-major order.
//!
//! Text formats: ASCII OFF meshes, whitespace-separated XYZ point lists, and
//! a run-length voxel text format (see [`read_voxel_text`]).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::aux_metrics::BinaryVoxelGrid;
use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Point, PointCloud, TriangleMesh};
use crate::latent_models::LatentCodeSet;

pub const PCSET_MAGIC: &[u8; 8] = b"PCSET1\0\0";
pub const LATC_MAGIC: &[u8; 8] = b"LATC1\0\0\0";
pub const VOXG_MAGIC: &[u8; 8] = b"VOXG1\0\0\0";

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], format: &'static str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::format(format, "truncated data"),
        _ => Error::RawIo(e),
    })
}

fn read_u32<R: Read>(r: &mut R, format: &'static str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact_or(r, &mut b, format)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f32s<R: Read>(r: &mut R, count: usize, format: &'static str) -> Result<Vec<f32>> {
    let mut bytes = vec![0u8; count * 4];
    read_exact_or(r, &mut bytes, format)?;
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 8], format: &'static str) -> Result<()> {
    let mut b = [0u8; 8];
    read_exact_or(r, &mut b, format)?;
    if &b != magic {
        return Err(Error::format(format, "bad magic"));
    }
    Ok(())
}

fn expect_eof<R: Read>(r: &mut R, format: &'static str) -> Result<()> {
    let mut b = [0u8; 1];
    match r.read(&mut b)? {
        0 => Ok(()),
        _ => Err(Error::format(format, "trailing bytes after payload")),
    }
}

fn to_u32(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::InvalidArgument(format!("{what} {n} exceeds u32")))
}

pub fn write_pcset<W: Write>(w: &mut W, clouds: &[PointCloud]) -> Result<()> {
    w.write_all(PCSET_MAGIC)?;
    w.write_all(&to_u32(clouds.len(), "cloud count")?.to_le_bytes())?;
    for pc in clouds {
        w.write_all(&to_u32(pc.len(), "point count")?.to_le_bytes())?;
        for p in pc.points() {
            for v in p {
                w.write_all(&(*v as f32).to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_pcset<R: Read>(r: &mut R) -> Result<Vec<PointCloud>> {
    expect_magic(r, PCSET_MAGIC, "PCSET")?;
    let count = read_u32(r, "PCSET")? as usize;
    let mut clouds = Vec::with_capacity(count.min(1 << 16));
    for i in 0..count {
        let n = read_u32(r, "PCSET")? as usize;
        let values = read_f32s(r, n * 3, "PCSET")?;
        let points: Vec<Point> = values
            .chunks_exact(3)
            .map(|c| [c[0] as f64, c[1] as f64, c[2] as f64])
            .collect();
        let pc = PointCloud::new(points)
            .map_err(|e| Error::format("PCSET", format!("cloud {i}: {e}")))?;
        clouds.push(pc);
    }
    expect_eof(r, "PCSET")?;
    Ok(clouds)
}

pub fn write_latc<W: Write>(w: &mut W, codes: &LatentCodeSet) -> Result<()> {
    w.write_all(LATC_MAGIC)?;
    w.write_all(&to_u32(codes.rows(), "row count")?.to_le_bytes())?;
    w.write_all(&to_u32(codes.dims(), "dimension")?.to_le_bytes())?;
    for v in codes.values() {
        w.write_all(&(*v as f32).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_latc<R: Read>(r: &mut R) -> Result<LatentCodeSet> {
    expect_magic(r, LATC_MAGIC, "LATC")?;
    let rows = read_u32(r, "LATC")? as usize;
    let dims = read_u32(r, "LATC")? as usize;
    let values = read_f32s(r, rows * dims, "LATC")?;
    expect_eof(r, "LATC")?;
    LatentCodeSet::new(rows, dims, values.into_iter().map(f64::from).collect())
        .map_err(|e| Error::format("LATC", e.to_string()))
}

pub fn write_voxg<W: Write>(w: &mut W, grid: &BinaryVoxelGrid) -> Result<()> {
    let spec = grid.spec();
    w.write_all(VOXG_MAGIC)?;
    w.write_all(&to_u32(spec.resolution, "resolution")?.to_le_bytes())?;
    for v in spec.center {
        w.write_all(&(v as f32).to_le_bytes())?;
    }
    for _ in 0..3 {
        w.write_all(&(spec.half_width as f32).to_le_bytes())?;
    }
    let bytes: Vec<u8> = grid.occupancy().iter().map(|&b| u8::from(b)).collect();
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_voxg<R: Read>(r: &mut R) -> Result<BinaryVoxelGrid> {
    expect_magic(r, VOXG_MAGIC, "VOXG")?;
    let resolution = read_u32(r, "VOXG")? as usize;
    let ext = read_f32s(r, 6, "VOXG")?;
    if ext[3] != ext[4] || ext[3] != ext[5] {
        return Err(Error::format("VOXG", "only cubic extents are supported"));
    }
    let spec = GridSpec::new(
        resolution,
        [ext[0] as f64, ext[1] as f64, ext[2] as f64],
        ext[3] as f64,
    )
    .map_err(|e| Error::format("VOXG", e.to_string()))?;
    let mut bytes = vec![0u8; spec.cell_count()];
    read_exact_or(r, &mut bytes, "VOXG")?;
    expect_eof(r, "VOXG")?;
    let occupancy = bytes
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::format("VOXG", format!("cell byte {other} is not 0 or 1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    BinaryVoxelGrid::new(spec, occupancy)
}

/// Significant tokens of a text file: comments after `#` and blank lines dropped.
fn content_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<String>> {
    r.lines().filter_map(|line| match line {
        Err(e) => Some(Err(Error::RawIo(e))),
        Ok(l) => {
            let l = l.split('#').next().unwrap_or("").trim().to_string();
            (!l.is_empty()).then_some(Ok(l))
        }
    })
}

fn parse_num<T: std::str::FromStr>(tok: &str, format: &'static str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::format(format, format!("cannot parse {tok:?}")))
}

/// ASCII OFF mesh. Polygons with more than three vertices are fan-triangulated.
pub fn read_off<R: BufRead>(r: R) -> Result<TriangleMesh> {
    let mut tokens = Vec::new();
    for line in content_lines(r) {
        tokens.extend(line?.split_whitespace().map(str::to_string));
    }
    let mut it = tokens.into_iter();
    let header = it.next().ok_or_else(|| Error::format("OFF", "empty file"))?;
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| Error::format("OFF", "missing OFF header"))?;
    let mut counts = Vec::new();
    if !rest.is_empty() {
        counts.push(rest.to_string());
    }
    while counts.len() < 3 {
        counts.push(it.next().ok_or_else(|| Error::format("OFF", "missing counts"))?);
    }
    let nv: usize = parse_num(&counts[0], "OFF")?;
    let nf: usize = parse_num(&counts[1], "OFF")?;
    let mut next = |what: &str| it.next().ok_or_else(|| Error::format("OFF", format!("missing {what}")));
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut p = [0.0; 3];
        for v in &mut p {
            *v = parse_num(&next("vertex coordinate")?, "OFF")?;
        }
        vertices.push(p);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let k: usize = parse_num(&next("face size")?, "OFF")?;
        if k < 3 {
            return Err(Error::format("OFF", format!("face with {k} vertices")));
        }
        let idx = (0..k)
            .map(|_| parse_num::<usize>(&next("face index")?, "OFF"))
            .collect::<Result<Vec<_>>>()?;
        for t in 1..k - 1 {
            faces.push([idx[0], idx[t], idx[t + 1]]);
        }
    }
    TriangleMesh::new(vertices, faces)
}

pub fn write_off<W: Write>(w: &mut W, mesh: &TriangleMesh) -> Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} 0", mesh.vertices().len(), mesh.faces().len())?;
    for v in mesh.vertices() {
        writeln!(w, "{} {} {}", v[0], v[1], v[2])?;
    }
    for f in mesh.faces() {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

/// One point per line, `x y z`; extra columns are ignored.
pub fn read_xyz<R: BufRead>(r: R) -> Result<PointCloud> {
    let mut points = Vec::new();
    for line in content_lines(r) {
        let line = line?;
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() < 3 {
            return Err(Error::format("XYZ", format!("line {line:?} has fewer than 3 values")));
        }
        points.push([
            parse_num(vals[0], "XYZ")?,
            parse_num(vals[1], "XYZ")?,
            parse_num(vals[2], "XYZ")?,
        ]);
    }
    PointCloud::new(points).map_err(|e| Error::format("XYZ", e.to_string()))
}

pub fn write_xyz<W: Write>(w: &mut W, pc: &PointCloud) -> Result<()> {
    for p in pc.points() {
        writeln!(w, "{} {} {}", p[0], p[1], p[2])?;
    }
    Ok(())
}

/// Run-length voxel text, for hand-written grids:
///
/// ```text
/// # comment
/// resolution 2
/// extent 0 0 0 1        # optional: center xyz and half-width
/// 3*0 1 2*1 2*0         # runs "count*value" or single 0/1 cells, x-major
/// ```
pub fn read_voxel_text<R: BufRead>(r: R) -> Result<BinaryVoxelGrid> {
    let mut resolution = None;
    let mut center = [0.0; 3];
    let mut half_width = 1.0;
    let mut cells = Vec::new();
    for line in content_lines(r) {
        let line = line?;
        let mut toks = line.split_whitespace();
        match toks.clone().next() {
            Some("resolution") => {
                toks.next();
                let v = toks.next().ok_or_else(|| Error::format("voxel text", "resolution needs a value"))?;
                resolution = Some(parse_num::<usize>(v, "voxel text")?);
            }
            Some("extent") => {
                toks.next();
                let v = toks
                    .map(|t| parse_num::<f64>(t, "voxel text"))
                    .collect::<Result<Vec<_>>>()?;
                if v.len() != 4 {
                    return Err(Error::format("voxel text", "extent needs center xyz and half-width"));
                }
                center = [v[0], v[1], v[2]];
                half_width = v[3];
            }
            _ => {
                for tok in toks {
                    let (count, value) = match tok.split_once('*') {
                        Some((c, v)) => (parse_num::<usize>(c, "voxel text")?, v),
                        None => (1, tok),
                    };
                    let bit = match value {
                        "0" => false,
                        "1" => true,
                        other => return Err(Error::format("voxel text", format!("cell value {other:?}"))),
                    };
                    cells.extend(std::iter::repeat_n(bit, count));
                }
            }
        }
    }
    let resolution = resolution.ok_or_else(|| Error::format("voxel text", "missing resolution line"))?;
    let spec = GridSpec::new(resolution, center, half_width)?;
    if cells.len() != spec.cell_count() {
        return Err(Error::format(
            "voxel text",
            format!("{} cells given for a grid of {}", cells.len(), spec.cell_count()),
        ));
    }
    BinaryVoxelGrid::new(spec, cells)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::RawIo(source) => Error::io(path, source),
        other => other,
    })
}

fn is_ext(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

/// Loads clouds from a PCSET file, or a single cloud from `.xyz`.
pub fn load_clouds(path: &Path) -> Result<Vec<PointCloud>> {
    let mut r = open(path)?;
    if is_ext(path, "xyz") || is_ext(path, "txt") {
        return with_path(path, read_xyz(r).map(|pc| vec![pc]));
    }
    with_path(path, read_pcset(&mut r))
}

pub fn save_clouds(path: &Path, clouds: &[PointCloud]) -> Result<()> {
    let mut w = create(path)?;
    with_path(path, write_pcset(&mut w, clouds))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_codes(path: &Path) -> Result<LatentCodeSet> {
    with_path(path, read_latc(&mut open(path)?))
}

pub fn save_codes(path: &Path, codes: &LatentCodeSet) -> Result<()> {
    let mut w = create(path)?;
    with_path(path, write_latc(&mut w, codes))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads a binary VOXG grid, or the run-length text format for `.txt`/`.vox.txt`.
pub fn load_voxel_grid(path: &Path) -> Result<BinaryVoxelGrid> {
    let mut r = open(path)?;
    if is_ext(path, "txt") {
        return with_path(path, read_voxel_text(r));
    }
    with_path(path, read_voxg(&mut r))
}

pub fn save_voxel_grid(path: &Path, grid: &BinaryVoxelGrid) -> Result<()> {
    let mut w = create(path)?;
    with_path(path, write_voxg(&mut w, grid))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_mesh(path: &Path) -> Result<TriangleMesh> {
    with_path(path, read_off(open(path)?))
}
