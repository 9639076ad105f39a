//! On-disk caches for feature sequences and distance tables.
//!
//! Feature record: 16-byte header `b"WXFS"`, version (u32), dimension (u32),
//! frame count (u32), then row-major frames as little-endian f64.
//!
//! Distance table: 24-byte header `b"WXDT"`, version (u32), token count (u64),
//! FNV-1a hash of the newline-joined token ids (u64), then the packed lower
//! triangle (rows `i = 1..n`, columns `j < i`) as little-endian f64.

use std::io::{self, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::distance::DistanceTable;
use crate::features::FeatureSequence;
use crate::scalar::Scalar;

const FEATURE_MAGIC: &[u8; 4] = b"WXFS";
const TABLE_MAGIC: &[u8; 4] = b"WXDT";
const VERSION: u32 = 1;

/// Hex SHA-256 of `parts`, each length-prefixed.
pub fn content_hash<I, B>(parts: I) -> String
where
    I: IntoIterator<Item = B>,
    B: AsRef<[u8]>,
{
    let mut h = Sha256::new();
    for p in parts {
        let p = p.as_ref();
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64s(r: &mut impl Read, n: usize) -> io::Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

pub fn write_features<T: Scalar, W: Write>(mut w: W, seq: &FeatureSequence<T>) -> io::Result<()> {
    w.write_all(FEATURE_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(seq.dim() as u32).to_le_bytes())?;
    w.write_all(&(seq.len() as u32).to_le_bytes())?;
    for v in seq.as_slice() {
        w.write_all(&v.as_f64().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_features<T: Scalar, R: Read>(mut r: R, token_id: &str) -> io::Result<FeatureSequence<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FEATURE_MAGIC {
        return Err(invalid("not a feature record"));
    }
    if read_u32(&mut r)? != VERSION {
        return Err(invalid("unsupported feature record version"));
    }
    let dim = read_u32(&mut r)? as usize;
    let frames = read_u32(&mut r)? as usize;
    if dim == 0 || frames == 0 {
        return Err(invalid("empty feature record"));
    }
    let data = read_f64s(&mut r, dim * frames)?.into_iter().map(T::lit).collect();
    Ok(FeatureSequence::new(token_id, dim, data))
}

fn ids_hash(ids: &[String]) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    ids.join("\n")
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

pub fn write_table<T: Scalar, W: Write>(mut w: W, table: &DistanceTable<T>) -> io::Result<()> {
    w.write_all(TABLE_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(table.len() as u64).to_le_bytes())?;
    w.write_all(&ids_hash(table.token_ids()).to_le_bytes())?;
    for i in 1..table.len() {
        for j in 0..i {
            w.write_all(&table.get(i, j).as_f64().to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a table written for exactly `token_ids` (same order).
pub fn read_table<T: Scalar, R: Read>(mut r: R, token_ids: Vec<String>) -> io::Result<DistanceTable<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != TABLE_MAGIC {
        return Err(invalid("not a distance table"));
    }
    if read_u32(&mut r)? != VERSION {
        return Err(invalid("unsupported distance table version"));
    }
    let n = read_u64(&mut r)? as usize;
    if n != token_ids.len() || read_u64(&mut r)? != ids_hash(&token_ids) {
        return Err(invalid("distance table was built for other tokens"));
    }
    let lower = read_f64s(&mut r, n * n.saturating_sub(1) / 2)?;
    // lower index of (i, j), j < i: i(i-1)/2 + j
    DistanceTable::from_fn(token_ids, |i, j| T::lit(lower[j * (j - 1) / 2 + i])).map_err(|e| invalid(e.to_string()))
}

/// Reads `path` if it exists and parses; `None` on any failure.
pub fn load_if_valid<V>(path: &Path, parse: impl FnOnce(std::fs::File) -> io::Result<V>) -> Option<V> {
    std::fs::File::open(path).ok().and_then(|f| parse(f).ok())
}

/// Writes through a temporary file and renames into place.
pub fn store<F>(path: &Path, write: F) -> io::Result<()>
where
    F: FnOnce(&mut io::BufWriter<std::fs::File>) -> io::Result<()>,
{
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut w = io::BufWriter::new(std::fs::File::create(&tmp)?);
        write(&mut w)?;
        w.flush()?;
    }
    std::fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_record_layout() {
        let seq = FeatureSequence::<f64>::new("t", 2, vec![1.0, 2.0, 3.0, 4.5]);
        let mut buf = Vec::new();
        write_features(&mut buf, &seq).unwrap();
        assert_eq!(buf.len(), 16 + 4 * 8);
        assert_eq!(&buf[..4], b"WXFS");
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(buf[40..48].try_into().unwrap()), 4.5);
        let back: FeatureSequence<f64> = read_features(&buf[..], "t").unwrap();
        assert_eq!(back, seq);
        assert!(read_features::<f64, _>(&buf[..20], "t").is_err());
    }

    #[test]
    fn table_lower_triangle() {
        let ids: Vec<String> = (0..4).map(|i| format!("t{i}")).collect();
        let t = DistanceTable::<f64>::from_fn(ids.clone(), |i, j| (10 * i + j) as f64).unwrap();
        let mut buf = Vec::new();
        write_table(&mut buf, &t).unwrap();
        assert_eq!(buf.len(), 24 + 6 * 8);
        // first packed value is (1, 0)
        assert_eq!(f64::from_le_bytes(buf[24..32].try_into().unwrap()), t.get(1, 0));
        assert_eq!(f64::from_le_bytes(buf[32..40].try_into().unwrap()), t.get(2, 0));
        assert_eq!(f64::from_le_bytes(buf[40..48].try_into().unwrap()), t.get(2, 1));
        let back: DistanceTable<f64> = read_table(&buf[..], ids.clone()).unwrap();
        assert_eq!(back, t);
        let mut other = ids;
        other.swap(0, 1);
        assert!(read_table::<f64, _>(&buf[..], other).is_err());
    }

    #[test]
    fn hash_is_length_prefixed() {
        assert_ne!(content_hash(["ab", "c"]), content_hash(["a", "bc"]));
        assert_eq!(content_hash(["x"]).len(), 64);
    }
}
