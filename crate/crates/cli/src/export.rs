//! DOT and GraphML rendering of a clustered graph: nodes colored by
//! cluster, edge thickness by weight quantile.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use flowclust_core::{Result, WeightedDigraph};

/// Qualitative palette (ColorBrewer Set3 order), cycled by cluster id.
const PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffed6f", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    "#d9d9d9", "#bc80bd", "#ccebc5", "#ffffb3",
];
const UNASSIGNED_COLOR: &str = "#999999";

fn color_for(label: i32) -> &'static str {
    if label < 0 {
        UNASSIGNED_COLOR
    } else {
        PALETTE[label as usize % PALETTE.len()]
    }
}

/// Pen widths by weight quartile: thicker edges carry more weight.
fn penwidths(g: &WeightedDigraph) -> HashMap<(usize, usize), f64> {
    let n = g.n();
    let mut weights: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let w = g.weights().get(i, j);
            if w > 0.0 {
                weights.push(w);
            }
        }
    }
    weights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |q: f64| -> f64 {
        if weights.is_empty() {
            return 0.0;
        }
        let idx = ((weights.len() - 1) as f64 * q).round() as usize;
        weights[idx]
    };
    let (q1, q2, q3) = (quantile(0.25), quantile(0.5), quantile(0.75));
    let widths = [0.5, 1.25, 2.25, 3.5];
    let mut out = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            let w = g.weights().get(i, j);
            if w <= 0.0 {
                continue;
            }
            let band = if w <= q1 {
                0
            } else if w <= q2 {
                1
            } else if w <= q3 {
                2
            } else {
                3
            };
            out.insert((i, j), widths[band]);
        }
    }
    out
}

pub fn write_dot(g: &WeightedDigraph, labels: &[i32], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let widths = penwidths(g);
    writeln!(out, "digraph clusters {{")?;
    writeln!(out, "  node [style=filled];")?;
    for (i, id) in g.node_ids().iter().enumerate() {
        writeln!(out, "  \"{id}\" [fillcolor=\"{}\"];", color_for(labels[i]))?;
    }
    let n = g.n();
    for i in 0..n {
        for j in 0..n {
            if let Some(width) = widths.get(&(i, j)) {
                writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [penwidth={width}];",
                    g.node_ids()[i],
                    g.node_ids()[j]
                )?;
            }
        }
    }
    writeln!(out, "}}")?;
    out.flush()?;
    Ok(())
}

pub fn write_graphml(g: &WeightedDigraph, labels: &[i32], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#
    )?;
    writeln!(
        out,
        r#"  <key id="cluster" for="node" attr.name="cluster" attr.type="int"/>"#
    )?;
    writeln!(
        out,
        r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#
    )?;
    writeln!(
        out,
        r#"  <key id="count" for="edge" attr.name="count" attr.type="long"/>"#
    )?;
    writeln!(out, r#"  <graph id="G" edgedefault="directed">"#)?;
    for (i, id) in g.node_ids().iter().enumerate() {
        writeln!(
            out,
            r#"    <node id="{id}"><data key="cluster">{}</data></node>"#,
            labels[i]
        )?;
    }
    let n = g.n();
    for i in 0..n {
        for j in 0..n {
            let w = g.weights().get(i, j);
            let c = g.count(i, j);
            if w == 0.0 && c == 0 {
                continue;
            }
            writeln!(
                out,
                r#"    <edge source="{}" target="{}"><data key="weight">{w}</data><data key="count">{c}</data></edge>"#,
                g.node_ids()[i],
                g.node_ids()[j]
            )?;
        }
    }
    writeln!(out, "  </graph>")?;
    writeln!(out, "</graphml>")?;
    out.flush()?;
    Ok(())
}
