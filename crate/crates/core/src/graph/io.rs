//! Plain-text graph file format.
//!
//! ```text
//! digraph <n>
//! <id>,<id>,...            (node ids, one line)
//! <src>,<dst>,<weight>,<count>   (one line per stored edge, sorted by ids)
//! ```
//!
//! Weights are written as shortest round-trip decimals, so `read(write(g))`
//! reproduces the graph exactly. Duplicate (src, dst) lines are an error:
//! files stay canonical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::matrix::DenseMatrix;

pub fn write_graph<W: Write>(g: &WeightedDigraph, sink: &mut W) -> Result<()> {
    let n = g.n();
    writeln!(sink, "digraph {n}")?;
    let ids: Vec<String> = g.node_ids().iter().map(|id| id.to_string()).collect();
    writeln!(sink, "{}", ids.join(","))?;

    let mut edges: Vec<(u32, u32, f64, u64)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let w = g.weights().get(i, j);
            let c = g.count(i, j);
            if w != 0.0 || c != 0 {
                edges.push((g.node_ids()[i], g.node_ids()[j], w, c));
            }
        }
    }
    edges.sort_by_key(|&(s, d, _, _)| (s, d));
    for (src, dst, w, c) in edges {
        writeln!(sink, "{src},{dst},{w},{c}")?;
    }
    Ok(())
}

pub fn write_graph_file<P: AsRef<Path>>(g: &WeightedDigraph, path: P) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    write_graph(g, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn read_graph<R: Read>(source: R) -> Result<WeightedDigraph> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate();

    let (line_no, header) = next_line(&mut lines)?;
    let n: usize = match header.strip_prefix("digraph ") {
        Some(count) => count.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad node count '{count}'"),
        })?,
        None => {
            return Err(Error::Parse {
                line: line_no,
                message: "expected 'digraph <n>' header".into(),
            })
        }
    };

    let (line_no, id_line) = next_line(&mut lines)?;
    let node_ids: Vec<u32> = if id_line.is_empty() {
        vec![]
    } else {
        id_line
            .split(',')
            .map(|tok| {
                tok.parse::<u32>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad node id '{tok}'"),
                })
            })
            .collect::<Result<_>>()?
    };
    if node_ids.len() != n {
        return Err(Error::Parse {
            line: line_no,
            message: format!("declared {n} nodes but listed {}", node_ids.len()),
        });
    }

    let mut weights = DenseMatrix::zeros(n, n);
    let mut counts = vec![0u64; n * n];
    let mut seen = vec![false; n * n];
    let index_of = |id: u32, line: usize| -> Result<usize> {
        node_ids.iter().position(|&x| x == id).ok_or(Error::Parse {
            line,
            message: format!("edge references unknown node id {id}"),
        })
    };

    for (line_idx, line) in lines {
        let line_no = line_idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 'src,dst,weight,count', got '{line}'"),
            });
        }
        let parse_id = |tok: &str| {
            tok.parse::<u32>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad node id '{tok}'"),
            })
        };
        let src = index_of(parse_id(fields[0])?, line_no)?;
        let dst = index_of(parse_id(fields[1])?, line_no)?;
        let weight: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad weight '{}'", fields[2]),
        })?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("weight must be finite and nonnegative, got {weight}"),
            });
        }
        let count: u64 = fields[3].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad count '{}'", fields[3]),
        })?;
        if seen[src * n + dst] {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate edge {},{}", fields[0], fields[1]),
            });
        }
        seen[src * n + dst] = true;
        weights[(src, dst)] = weight;
        counts[src * n + dst] = count;
    }

    WeightedDigraph::from_parts(node_ids, weights, counts)
}

pub fn read_graph_file<P: AsRef<Path>>(path: P) -> Result<WeightedDigraph> {
    read_graph(File::open(path)?)
}

type NumberedLines<'a, R> = &'a mut std::iter::Enumerate<std::io::Lines<BufReader<R>>>;

fn next_line<R: Read>(lines: NumberedLines<R>) -> Result<(usize, String)> {
    match lines.next() {
        Some((idx, line)) => {
            let line = line?;
            Ok((idx + 1, line.trim_end_matches(['\r', '\n']).to_string()))
        }
        None => Err(Error::Parse {
            line: 0,
            message: "unexpected end of file".into(),
        }),
    }
}
