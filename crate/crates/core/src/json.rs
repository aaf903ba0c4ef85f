use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Parse JSON, reporting failures with a JSON pointer to the offending field.
pub fn from_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(s);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        let inner = e.into_inner();
        match inner.to_string() {
            // Validation errors raised by `TryFrom` impls already carry a pointer.
            msg if msg.starts_with("invalid input at `") => Error::Input {
                pointer: join_pointer(&pointer, &msg),
                message: msg,
            },
            msg => Error::input(pointer, msg),
        }
    })?;
    Ok(value)
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push('/');
                out.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { variant } => {
                out.push('/');
                out.push_str(variant);
            }
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

fn join_pointer(outer: &str, msg: &str) -> String {
    let inner = msg
        .trim_start_matches("invalid input at `")
        .split('`')
        .next()
        .unwrap_or("");
    format!("{outer}{inner}")
}
