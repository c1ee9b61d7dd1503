//! The network text format.
//!
//! Line 1 holds `n d`; the following `d` lines hold each layer's comparators
//! as space-separated `i:j` tokens in canonical ascending order. An empty
//! line is an empty layer and `#` starts a comment line. Printing a parsed
//! canonical file reproduces it byte for byte.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{Comparator, Layer, Network};

pub fn format_network(net: &Network) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", net.channels(), net.depth()));
    for layer in net.layers() {
        out.push_str(&format_layer_line(layer));
        out.push('\n');
    }
    out
}

fn format_layer_line(layer: &Layer) -> String {
    layer
        .comparators()
        .iter()
        .map(|c| format!("{}:{}", c.i, c.j))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_network(source: &str, origin: &str) -> Result<Network> {
    let mut nets = parse_networks(source, origin)?;
    match nets.len() {
        0 => Err(parse_err(origin, 1, "empty input")),
        _ => Ok(nets.swap_remove(0)),
    }
}

/// Parses a concatenation of network records (records are self-delimiting:
/// the header announces how many layer lines follow).
pub fn parse_networks(source: &str, origin: &str) -> Result<Vec<Network>> {
    let mut nets = Vec::new();
    let mut lines = source
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim_start().starts_with('#'));
    loop {
        let (lineno, header) = match lines.by_ref().find(|(_, l)| !l.trim().is_empty()) {
            Some(pair) => pair,
            None => break,
        };
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .ok_or_else(|| parse_err(origin, lineno + 1, "missing channel count"))?
            .parse()
            .map_err(|_| parse_err(origin, lineno + 1, "channel count is not a number"))?;
        let d: usize = parts
            .next()
            .ok_or_else(|| parse_err(origin, lineno + 1, "missing depth"))?
            .parse()
            .map_err(|_| parse_err(origin, lineno + 1, "depth is not a number"))?;
        if parts.next().is_some() {
            return Err(parse_err(origin, lineno + 1, "trailing tokens after `n d`"));
        }
        if n == 0 || n > 32 {
            return Err(parse_err(origin, lineno + 1, "channel count out of range 1..=32"));
        }
        let mut layers = Vec::with_capacity(d);
        for _ in 0..d {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| parse_err(origin, lineno + 1, "fewer layer lines than depth"))?;
            layers.push(parse_layer_line(line, n, origin, lineno + 1)?);
        }
        nets.push(Network::new(n, layers));
    }
    Ok(nets)
}

fn parse_layer_line(line: &str, n: usize, origin: &str, lineno: usize) -> Result<Layer> {
    let mut comparators = Vec::new();
    let mut used = 0u64;
    for token in line.split_whitespace() {
        let (a, b) = token
            .split_once(':')
            .ok_or_else(|| parse_err(origin, lineno, &format!("bad token `{token}`")))?;
        let i: usize = a
            .parse()
            .map_err(|_| parse_err(origin, lineno, &format!("bad channel in `{token}`")))?;
        let j: usize = b
            .parse()
            .map_err(|_| parse_err(origin, lineno, &format!("bad channel in `{token}`")))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_err(origin, lineno, &format!("channel out of range in `{token}`")));
        }
        if i == j {
            return Err(parse_err(origin, lineno, &format!("self-comparator `{token}`")));
        }
        let mask = (1u64 << (i - 1)) | (1u64 << (j - 1));
        if used & mask != 0 {
            return Err(parse_err(origin, lineno, &format!("channel reused at `{token}`")));
        }
        used |= mask;
        comparators.push(Comparator::new(i, j));
    }
    Ok(Layer::new(comparators))
}

pub fn read_network_file(path: &Path) -> Result<Network> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| Error::FileIo { path: path.to_path_buf(), source: e })?;
    parse_network(&source, &path.display().to_string())
}

pub fn read_networks(reader: impl BufRead, origin: &str) -> Result<Vec<Network>> {
    let mut source = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut source)?;
    parse_networks(&source, origin)
}

fn parse_err(path: &str, line: usize, msg: &str) -> Error {
    Error::Parse { path: path.to_string(), line, msg: msg.to_string() }
}
