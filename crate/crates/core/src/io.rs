//! File formats: row tables as CSV, clusterings and covers as JSON, and the
//! provenance and layout sidecars written next to a built instance.
//!
//! Row indices in clusterings are 0-based. Vertex and gadget indices in files
//! are 1-based.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::abp::{AbpInstance, BlockLayout3};
use crate::ap8::ApInstance;
use crate::error::{Error, Result};
use crate::graphs::VertexCover;
use crate::model::{Clustering, Row, Symbol};

/// Serde adapter writing a 0-based index as 1-based.
pub(crate) mod one_based {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = u64::deserialize(d)?;
        if v == 0 {
            return Err(de::Error::custom("indices are 1-based"));
        }
        Ok(v as usize - 1)
    }
}

/// One row per line, one symbol token per field, no header.
pub fn write_rows_csv(rows: &[Row]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in rows {
        w.write_record(r.entries().iter().map(Symbol::to_string))
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("tokens are ASCII")
}

pub fn read_rows_csv(text: &str) -> Result<Vec<Row>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("rows line {}: {e}", line + 1)))?;
        let entries = record
            .iter()
            .map(|t| t.parse::<Symbol>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse(format!("rows line {}: {e}", line + 1)))?;
        rows.push(Row::new(entries));
    }
    Ok(rows)
}

/// Lower-case hex SHA-256 of a file's bytes.
pub fn fingerprint(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn write_clustering_json(p: &Clustering) -> String {
    serde_json::to_string(p).expect("plain integers")
}

pub fn read_clustering_json(text: &str) -> Result<Clustering> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("clustering: {e}")))
}

/// A cover as a JSON array of 1-based vertices.
pub fn write_cover_json(cover: &VertexCover) -> String {
    let labels: Vec<usize> = cover.vertices().iter().map(|v| v + 1).collect();
    serde_json::to_string(&labels).expect("plain integers")
}

pub fn read_cover_json(text: &str) -> Result<VertexCover> {
    let labels: Vec<usize> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("cover: {e}")))?;
    if labels.contains(&0) {
        return Err(Error::Parse("cover vertices are 1-based".into()));
    }
    Ok(VertexCover::new(labels.into_iter().map(|v| v - 1)))
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Layout sidecar of a binary instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout3 {
    pub reduction: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub width: usize,
    /// First 1-based column of each block.
    pub vertex_block_start: usize,
    pub vertex_block_width: usize,
    pub jolly_block_start: usize,
    pub edge_block_start: usize,
    /// Per vertex, the 1-based neighbour docked at slots 1, 2, 3.
    pub docking: Vec<[usize; 3]>,
}

impl Layout3 {
    pub fn of(inst: &AbpInstance) -> Self {
        let layout: BlockLayout3 = inst.layout();
        let g = inst.graph();
        Layout3 {
            reduction: "3abp".into(),
            n: g.n(),
            m: g.m(),
            k: inst.instance().k(),
            width: layout.width(),
            vertex_block_start: 1,
            vertex_block_width: BlockLayout3::VERTEX_BLOCK,
            jolly_block_start: layout.jolly_offset() + 1,
            edge_block_start: layout.edge_offset() + 1,
            docking: (0..g.n()).map(|v| g.neighbors(v).map(|u| u + 1)).collect(),
        }
    }
}

/// Layout sidecar of an 8-column instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout4 {
    pub reduction: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub width: usize,
    /// Edge block (1..=4) of vertices 1..=n.
    pub blocks: Vec<u8>,
}

impl Layout4 {
    pub fn of(inst: &ApInstance) -> Self {
        Layout4 {
            reduction: "4ap8".into(),
            n: inst.n(),
            m: inst.m(),
            k: inst.instance().k(),
            width: inst.instance().width(),
            blocks: inst.blocks().blocks().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::{build_3abp_instance, Provenance3};
    use crate::ap8::{build_4ap8_instance, Provenance4};
    use crate::graphs::Builtin;

    #[test]
    fn rows_round_trip() {
        let inst = build_4ap8_instance(&Builtin::K4.graph());
        let text = write_rows_csv(inst.instance().rows());
        assert!(text.lines().next().unwrap().split(',').count() == 8);
        assert_eq!(read_rows_csv(&text).unwrap(), inst.instance().rows());
        let inst = build_3abp_instance(&Builtin::K4.graph());
        let text = write_rows_csv(inst.instance().rows());
        assert_eq!(read_rows_csv(&text).unwrap(), inst.instance().rows());
        assert!(read_rows_csv("0,1\n0,x\n").is_err());
    }

    #[test]
    fn provenance_is_one_based_in_files() {
        let p = vec![Provenance3::EdgeGadget {
            i: 0,
            j: 2,
            x: 1,
            y: 3,
        }];
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"[{"kind":"edge_gadget","i":1,"j":3,"x":1,"y":3}]"#);
        assert_eq!(from_json::<Vec<Provenance3>>(&text, "p").unwrap(), p);
        let q = vec![Provenance4::VertexRow { vertex: 4, h: 2 }];
        let text = serde_json::to_string(&q).unwrap();
        assert_eq!(text, r#"[{"kind":"vertex_row","vertex":5,"h":2}]"#);
        assert!(
            from_json::<Vec<Provenance4>>(r#"[{"kind":"vertex_row","vertex":0,"h":2}]"#, "p")
                .is_err()
        );
    }

    #[test]
    fn clustering_and_cover_json() {
        let p = Clustering::new(vec![vec![0, 2], vec![1]]);
        let text = write_clustering_json(&p);
        assert_eq!(text, "[[0,2],[1]]");
        assert_eq!(read_clustering_json(&text).unwrap(), p);
        let c = VertexCover::new([0, 3]);
        assert_eq!(write_cover_json(&c), "[1,4]");
        assert_eq!(read_cover_json("[1,4]").unwrap(), c);
        assert!(read_cover_json("[0]").is_err());
    }

    #[test]
    fn fingerprint_is_sha256() {
        assert_eq!(
            fingerprint(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn layouts() {
        let l = Layout3::of(&build_3abp_instance(&Builtin::K4.graph()));
        assert_eq!(
            (l.width, l.jolly_block_start, l.edge_block_start),
            (120, 85, 109)
        );
        let l = Layout4::of(&build_4ap8_instance(&Builtin::K33.graph()));
        assert_eq!(l.blocks.len(), 6);
    }
}
