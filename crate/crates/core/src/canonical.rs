//! Canonical JSON encoding.
//!
//! Every artifact exchanged between the CLI, the HTTP service and the golden
//! files goes through here: object keys are sorted (serde_json's default map
//! is ordered) and numbers use the shortest round-trip representation, so
//! equal values always produce equal bytes.

use serde::Serialize;

/// Pretty-printed canonical form with a trailing newline. Used for files.
pub fn to_pretty<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let tree = serde_json::to_value(value).expect("value serializes to JSON");
    let mut out = serde_json::to_vec_pretty(&tree).expect("JSON tree serializes");
    out.push(b'\n');
    out
}

/// Single-line canonical form without trailing newline. Used for JSONL
/// records and HTTP bodies.
pub fn to_line<T: Serialize + ?Sized>(value: &T) -> String {
    let tree = serde_json::to_value(value).expect("value serializes to JSON");
    serde_json::to_string(&tree).expect("JSON tree serializes")
}

/// Translate a 1-based (line, column) pair reported by serde_json into a
/// byte offset within `input`.
pub fn byte_offset(input: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut current = 1;
    let mut line_start = 0;
    for (i, b) in input.iter().enumerate() {
        if current == line {
            break;
        }
        if *b == b'\n' {
            current += 1;
            line_start = i + 1;
        }
    }
    (line_start + column.saturating_sub(1)).min(input.len())
}
