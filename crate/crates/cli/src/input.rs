//! Reading graphs from graph6 or edge-list files.

use std::path::Path;

use pathwl::graph::{parse_edge_list, parse_graph6_file};
use pathwl::SimpleGraph;

use crate::{CliError, InputFormat};

fn looks_like_edge_list(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.split_whitespace().next() == Some("n"))
}

fn resolve(path: &Path, text: &str, format: InputFormat) -> InputFormat {
    match format {
        InputFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("g6") => InputFormat::Graph6,
            Some("edges") | Some("el") => InputFormat::Edges,
            _ if looks_like_edge_list(text) => InputFormat::Edges,
            _ => InputFormat::Graph6,
        },
        f => f,
    }
}

/// Every graph in the file (edge lists hold exactly one).
pub fn read_graphs(path: &Path, format: InputFormat) -> Result<Vec<SimpleGraph>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let at = |m: String| CliError::Input(format!("{}: {m}", path.display()));
    match resolve(path, &text, format) {
        InputFormat::Edges => Ok(vec![parse_edge_list(&text).map_err(|e| at(e.to_string()))?]),
        _ => {
            let graphs =
                parse_graph6_file(&text).map_err(|(line, e)| at(format!("line {line}: {e}")))?;
            if graphs.is_empty() {
                return Err(at("no graphs in file".into()));
            }
            Ok(graphs)
        }
    }
}

pub fn read_graph(path: &Path, format: InputFormat, index: usize) -> Result<SimpleGraph, CliError> {
    let mut graphs = read_graphs(path, format)?;
    let count = graphs.len();
    if index >= count {
        return Err(CliError::Input(format!(
            "{}: index {index} out of range ({count} graphs)",
            path.display()
        )));
    }
    Ok(graphs.swap_remove(index))
}
