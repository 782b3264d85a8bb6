pub mod certify;
pub mod cli;
pub mod construct;
pub mod error;
pub mod exactmat;
pub mod framework;
pub mod rigidity;
pub mod selftest;
pub mod veronese;

pub use error::{Error, Result};

/// Pretty-printed JSON with a trailing newline; field order is fixed by the
/// types, so equal values always produce identical bytes.
pub fn to_canonical_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory serialization");
    text.push('\n');
    text
}
