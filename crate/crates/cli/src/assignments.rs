//! Assignment CSV files: `node_id,cluster` with one row per node.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flowclust_core::partition::Partition;
use flowclust_core::{Error, Result};

pub fn write_assignments(path: &Path, node_ids: &[u32], partition: &Partition) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "node_id,cluster")?;
    for (id, label) in node_ids.iter().zip(partition.labels()) {
        writeln!(out, "{id},{label}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_assignments(path: &Path) -> Result<Vec<(u32, i32)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line_no == 1 {
            if line != "node_id,cluster" {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header 'node_id,cluster', got '{line}'"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(id), Some(label), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 'node_id,cluster', got '{line}'"),
            });
        };
        let id: u32 = id.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad node id '{id}'"),
        })?;
        let label: i32 = label.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad cluster label '{label}'"),
        })?;
        rows.push((id, label));
    }
    Ok(rows)
}

/// Align two assignment files over an identical node-id set and build the
/// partitions in shared (sorted) node order.
pub fn aligned_partitions(
    a: &[(u32, i32)],
    b: &[(u32, i32)],
) -> Result<(Partition, Partition)> {
    let to_map = |rows: &[(u32, i32)]| -> Result<std::collections::BTreeMap<u32, i32>> {
        let mut m = std::collections::BTreeMap::new();
        for &(id, label) in rows {
            if m.insert(id, label).is_some() {
                return Err(Error::InvalidInput(format!(
                    "node id {id} appears twice in an assignments file"
                )));
            }
        }
        Ok(m)
    };
    let ma = to_map(a)?;
    let mb = to_map(b)?;
    if ma.keys().ne(mb.keys()) {
        return Err(Error::InvalidInput(
            "assignment files cover different node sets".into(),
        ));
    }
    let build = |m: &std::collections::BTreeMap<u32, i32>| -> Result<Partition> {
        let labels: Vec<i32> = m.values().copied().collect();
        let k = labels.iter().copied().max().map_or(0, |x| (x.max(-1) + 1) as usize);
        Partition::new(labels, k)
    };
    Ok((build(&ma)?, build(&mb)?))
}
