use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::warn;

use super::{AttributedGraph, DenseMatrix, Labels, LoadStats};
use crate::error::{Error, Result, Source};

fn strip_bom(line: &str, line_no: usize) -> &str {
    if line_no == 1 {
        line.strip_prefix('\u{feff}').unwrap_or(line)
    } else {
        line
    }
}

fn lines<'a>(reader: &'a mut dyn BufRead, kind: Source) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader.lines().enumerate().map(move |(i, l)| {
        let line_no = i + 1;
        l.map(|s| (line_no, strip_bom(&s, line_no).to_string()))
            .map_err(|e| Error::parse(kind, line_no, e.to_string()))
    })
}

/// Parses an edge list plus optional attribute and label tables.
///
/// Edge records are `src dst [weight]`, whitespace separated, `#` starts a
/// comment line. When no record carries a weight the graph is unweighted and
/// repeated edges keep weight 1; otherwise repeated edges have their weights
/// summed. Node indices follow first appearance in the edge list.
pub fn load_graph(
    edges: &mut dyn BufRead,
    attributes: Option<&mut dyn BufRead>,
    labels: Option<&mut dyn BufRead>,
) -> Result<AttributedGraph> {
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |id: &str| -> usize {
        if let Some(&i) = index.get(id) {
            return i;
        }
        index.insert(id.to_string(), ids.len());
        ids.push(id.to_string());
        ids.len() - 1
    };

    let mut raw = Vec::new();
    let mut weighted = false;
    for item in lines(edges, Source::Edges) {
        let (line_no, line) = item?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let weight = match fields.len() {
            2 => 1.0,
            3 => {
                weighted = true;
                let w: f64 = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(Source::Edges, line_no, format!("invalid weight `{}`", fields[2])))?;
                if !w.is_finite() {
                    return Err(Error::parse(Source::Edges, line_no, "non-finite weight"));
                }
                if w < 0.0 {
                    return Err(Error::NegativeWeight {
                        line: line_no,
                        weight: w,
                    });
                }
                w
            }
            n => {
                return Err(Error::parse(
                    Source::Edges,
                    line_no,
                    format!("expected `src dst [weight]`, found {n} fields"),
                ))
            }
        };
        let u = intern(fields[0]);
        let v = intern(fields[1]);
        raw.push((u, v, weight));
    }

    let mut stats = LoadStats::default();
    let edges: Vec<(usize, usize, f64)> = if weighted {
        raw
    } else {
        let mut seen = std::collections::HashSet::new();
        raw.into_iter()
            .filter(|&(u, v, _)| {
                if u == v {
                    return true;
                }
                let fresh = seen.insert((u.min(v), u.max(v)));
                if !fresh {
                    stats.duplicate_edges_merged += 1;
                }
                fresh
            })
            .collect()
    };

    let mut graph = AttributedGraph::new(ids, edges)?.with_stats(stats);
    let stats = graph.load_stats();
    if stats.duplicate_edges_merged > 0 {
        warn!("merged {} duplicate edges", stats.duplicate_edges_merged);
    }
    if stats.self_loops_dropped > 0 {
        warn!("dropped {} self-loops", stats.self_loops_dropped);
    }
    if stats.zero_weight_edges_dropped > 0 {
        warn!("dropped {} zero-weight edges", stats.zero_weight_edges_dropped);
    }

    if let Some(reader) = attributes {
        let x = parse_attributes(reader, &graph)?;
        graph = graph.with_attributes(x)?;
    }
    if let Some(reader) = labels {
        let l = parse_labels(reader, &graph)?;
        graph = graph.with_labels(l)?;
    }
    Ok(graph)
}

fn parse_attributes(reader: &mut dyn BufRead, graph: &AttributedGraph) -> Result<DenseMatrix> {
    let mut it = lines(reader, Source::Attributes).filter(|r| match r {
        Ok((_, l)) => !l.trim().is_empty(),
        Err(_) => true,
    });
    let (header_line, header) = it
        .next()
        .ok_or_else(|| Error::parse(Source::Attributes, 1, "missing header row"))??;
    let header: Vec<&str> = header.split(',').map(str::trim).collect();
    if header.len() < 2 {
        return Err(Error::parse(
            Source::Attributes,
            header_line,
            "header must be `id,f1,...,fd` with at least one feature",
        ));
    }
    let d = header.len() - 1;
    let n = graph.num_nodes();
    let mut x = DenseMatrix::zeros(n, d);
    let mut seen = vec![false; n];
    for item in it {
        let (line_no, line) = item?;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d + 1 {
            return Err(Error::parse(
                Source::Attributes,
                line_no,
                format!("expected {} fields, found {}", d + 1, fields.len()),
            ));
        }
        let node = graph.index_of(fields[0]).ok_or_else(|| Error::UnknownNode {
            source_kind: Source::Attributes,
            line: line_no,
            id: fields[0].to_string(),
        })?;
        if seen[node] {
            return Err(Error::parse(
                Source::Attributes,
                line_no,
                format!("duplicate row for node `{}`", fields[0]),
            ));
        }
        seen[node] = true;
        let row = x.row_mut(node);
        for (slot, f) in row.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| Error::parse(Source::Attributes, line_no, format!("invalid number `{f}`")))?;
            if !slot.is_finite() {
                return Err(Error::parse(Source::Attributes, line_no, "non-finite attribute value"));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::MissingAttributes(graph.id(missing).to_string()));
    }
    Ok(x)
}

fn parse_labels(reader: &mut dyn BufRead, graph: &AttributedGraph) -> Result<Labels> {
    let mut classes: Vec<String> = Vec::new();
    let mut class_index: HashMap<String, usize> = HashMap::new();
    let mut per_node = vec![Vec::new(); graph.num_nodes()];
    let mut multilabel = false;
    let mut first = true;
    for item in lines(reader, Source::Labels) {
        let (line_no, line) = item?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (id, rest) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(Source::Labels, line_no, "expected `id,label` or `id,label1;label2`"))?;
        let (id, rest) = (id.trim(), rest.trim());
        if std::mem::take(&mut first) && id == "id" && graph.index_of("id").is_none() {
            continue;
        }
        let node = graph.index_of(id).ok_or_else(|| Error::UnknownNode {
            source_kind: Source::Labels,
            line: line_no,
            id: id.to_string(),
        })?;
        let names: Vec<&str> = rest.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
        if names.is_empty() {
            return Err(Error::parse(Source::Labels, line_no, "empty label"));
        }
        if rest.contains(';') {
            multilabel = true;
        }
        for name in names {
            let c = *class_index.entry(name.to_string()).or_insert_with(|| {
                classes.push(name.to_string());
                classes.len() - 1
            });
            if !per_node[node].contains(&c) {
                per_node[node].push(c);
            }
        }
    }
    if per_node.iter().any(|l| l.len() > 1) {
        multilabel = true;
    }
    per_node.iter_mut().for_each(|l| l.sort_unstable());
    Labels::new(classes, per_node, multilabel)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

/// File-path front end for [`load_graph`].
pub fn load_graph_files(edges: &Path, attributes: Option<&Path>, labels: Option<&Path>) -> Result<AttributedGraph> {
    let mut e = open(edges)?;
    let mut a = attributes.map(open).transpose()?;
    let mut l = labels.map(open).transpose()?;
    load_graph(
        &mut e,
        a.as_mut().map(|r| r as &mut dyn BufRead),
        l.as_mut().map(|r| r as &mut dyn BufRead),
    )
}

/// Writes `src dst` lines using external ids.
pub fn write_edge_list(out: &mut dyn Write, graph: &AttributedGraph, edges: &[(usize, usize)]) -> std::io::Result<()> {
    for &(u, v) in edges {
        writeln!(out, "{} {}", graph.id(u), graph.id(v))?;
    }
    Ok(())
}
