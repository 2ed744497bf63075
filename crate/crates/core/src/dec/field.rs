//! Field files: one `index value` pair per line, 17 significant digits.
//! Face fields start with a `#FACES` header line.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::error::MeshError;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile<T> {
    pub faces: bool,
    pub values: Vec<T>,
}

fn write_field<T: Scalar, W: Write>(values: &[T], faces: bool, mut w: W) -> std::io::Result<()> {
    let mut s = String::with_capacity(32 * values.len() + 8);
    if faces {
        s.push_str("#FACES\n");
    }
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i} {v:.16e}");
    }
    w.write_all(s.as_bytes())
}

pub fn write_vertex_field<T: Scalar, W: Write>(values: &[T], w: W) -> std::io::Result<()> {
    write_field(values, false, w)
}

pub fn write_face_field<T: Scalar, W: Write>(values: &[T], w: W) -> std::io::Result<()> {
    write_field(values, true, w)
}

/// Reads a field file; every index `0..n` must appear exactly once.
pub fn read_field<T: Scalar, R: Read>(mut r: R) -> Result<FieldFile<T>, MeshError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut faces = false;
    let mut pairs: Vec<(usize, T, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if t == "#FACES" {
            if !pairs.is_empty() {
                return Err(MeshError::Parse {
                    line,
                    msg: "#FACES must come first".into(),
                });
            }
            faces = true;
            continue;
        }
        if t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(MeshError::Parse {
                line,
                msg: "expected 'index value'".into(),
            });
        };
        let idx = a.parse::<usize>().map_err(|_| MeshError::Parse {
            line,
            msg: format!("bad index '{a}'"),
        })?;
        let val = b
            .parse::<f64>()
            .ok()
            .and_then(T::from_f64)
            .ok_or_else(|| MeshError::Parse {
                line,
                msg: format!("bad value '{b}'"),
            })?;
        pairs.push((idx, val, line));
    }
    let n = pairs.len();
    let mut values = vec![None; n];
    for (idx, val, line) in pairs {
        if idx >= n || values[idx].is_some() {
            return Err(MeshError::Parse {
                line,
                msg: format!("index {idx} is out of range or repeated"),
            });
        }
        values[idx] = Some(val);
    }
    Ok(FieldFile {
        faces,
        values: values.into_iter().map(|v| v.expect("filled")).collect(),
    })
}
