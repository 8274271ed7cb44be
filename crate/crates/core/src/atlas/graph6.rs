//! graph6 text encoding, short (single size byte) form only.
//!
//! The size byte is `63 + n`; the upper triangle follows column by column,
//! `x(0,1), x(0,2), x(1,2), x(0,3), ..`, six bits per byte, most significant
//! bit first, each byte offset by 63 and the last one zero padded.

use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, MAX_ORDER};

const OFFSET: u8 = 63;
const HEADER: &str = ">>graph6<<";

pub fn encode_graph6(g: &Graph) -> String {
    let n = g.order();
    let mut out = Vec::with_capacity(1 + pair_count(n).div_ceil(6));
    out.push(OFFSET + n as u8);
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        let col = g.neighbor_mask(j);
        for i in 0..j {
            acc = (acc << 1) | u8::from(col & (1 << i) != 0);
            filled += 1;
            if filled == 6 {
                out.push(OFFSET + acc);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push(OFFSET + (acc << (6 - filled)));
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

pub fn decode_graph6(line: &str) -> Result<Graph> {
    let line = line.strip_prefix(HEADER).unwrap_or(line);
    let line = line.trim_end_matches(['\n', '\r']);
    let bytes = line.as_bytes();
    let (&size, body) = bytes
        .split_first()
        .ok_or_else(|| Error::Codec("empty line".into()))?;
    if !(OFFSET..=126).contains(&size) {
        return Err(Error::Codec(format!("invalid size byte {size:#04x}")));
    }
    if size == 126 {
        // Long size forms only encode orders of 63 and above.
        return Err(Error::OrderTooLarge {
            n: 63,
            max: MAX_ORDER,
        });
    }
    let n = (size - OFFSET) as usize;
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge { n, max: MAX_ORDER });
    }
    if n == 0 {
        return Err(Error::OrderTooSmall { n, min: 1 });
    }
    let bits = pair_count(n);
    if body.len() != bits.div_ceil(6) {
        return Err(Error::Codec(format!(
            "expected {} data bytes for order {n}, found {}",
            bits.div_ceil(6),
            body.len()
        )));
    }
    let mut values = Vec::with_capacity(body.len());
    for &b in body {
        if !(OFFSET..=126).contains(&b) {
            return Err(Error::Codec(format!("invalid data byte {b:#04x}")));
        }
        values.push(b - OFFSET);
    }
    let bit = |k: usize| values[k / 6] & (0x20 >> (k % 6)) != 0;
    if (bits..body.len() * 6).any(bit) {
        return Err(Error::Codec("non-zero padding bits".into()));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edge_list(n, edges)
}
