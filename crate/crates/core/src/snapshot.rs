//! Binary snapshot files.
//!
//! A snapshot is a 1024-byte ASCII header followed by the `u` block and then
//! the `v` block, each `n^3` little-endian `f64` values in x-fastest order.
//! Header lines are `key value...`; unused header bytes are spaces and the
//! last byte is a newline, so `head -c 1024` shows the metadata.

use std::fs;
use std::path::Path;

use crate::dynamics::{MediumState, ModelParams};
use crate::error::{Error, Result};
use crate::grid::{AxisKind, BoundarySpec, FaceCondition, Grid3, ScalarField};

pub const MAGIC: &str = "KNOTMEDIA-SNAPSHOT";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 1024;

/// A state together with the model and walls that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: MediumState,
    pub params: ModelParams,
    pub bc: BoundarySpec,
}

fn face_token(c: &FaceCondition) -> String {
    match c {
        FaceCondition::Dirichlet { u, v } => format!("dirichlet:{u:?}:{v:?}"),
        FaceCondition::NeumannZero => "neumann".into(),
        FaceCondition::Periodic => "periodic".into(),
    }
}

fn parse_face(tok: &str) -> Option<FaceCondition> {
    let mut parts = tok.split(':');
    match parts.next()? {
        "neumann" => Some(FaceCondition::NeumannZero),
        "periodic" => Some(FaceCondition::Periodic),
        "dirichlet" => {
            let u = parts.next()?.parse().ok()?;
            let v = parts.next()?.parse().ok()?;
            Some(FaceCondition::Dirichlet { u, v })
        }
        _ => None,
    }
}

fn header_text(snap: &Snapshot) -> Result<Vec<u8>> {
    let s = &snap.state;
    let g = s.grid();
    let p = &snap.params;
    let axes: Vec<&str> = g
        .axes()
        .iter()
        .map(|a| match a {
            AxisKind::Bounded => "bounded",
            AxisKind::Periodic => "periodic",
        })
        .collect();
    let faces: Vec<String> = snap.bc.faces.iter().map(face_token).collect();
    let text = format!(
        "{MAGIC}\nversion {VERSION}\nn {}\nhalf_edge {:?}\naxes {}\nt {:?}\nstep {}\n\
         params {:?} {:?} {:?} {:?} {:?}\nbc {}\n",
        g.n(),
        g.half_edge(),
        axes.join(" "),
        s.t,
        s.step,
        p.eps,
        p.beta,
        p.gamma,
        p.du,
        p.dv,
        faces.join(" "),
    );
    if text.len() >= HEADER_LEN {
        return Err(Error::Config(
            "snapshot header does not fit in 1024 bytes".into(),
        ));
    }
    let mut bytes = text.into_bytes();
    bytes.resize(HEADER_LEN - 1, b' ');
    bytes.push(b'\n');
    Ok(bytes)
}

/// Serializes a snapshot to bytes.
pub fn encode(snap: &Snapshot) -> Result<Vec<u8>> {
    snap.state.u.check_finite()?;
    snap.state.v.check_finite()?;
    let mut out = header_text(snap)?;
    out.reserve(16 * snap.state.grid().len());
    for x in snap.state.u.values().iter().chain(snap.state.v.values()) {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

/// Parses bytes produced by [`encode`]. `path` is used only in errors.
pub fn decode(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let bad = |message: String| Error::Snapshot {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    let header = std::str::from_utf8(&bytes[..HEADER_LEN])
        .map_err(|_| bad(format!("header is not text; expected magic {MAGIC}")))?;
    let mut lines = header.lines();
    let magic = lines.next().unwrap_or("").trim_end();
    if magic != MAGIC {
        return Err(bad(format!("bad magic `{magic}`, expected {MAGIC}")));
    }

    let mut fields = std::collections::HashMap::new();
    for line in lines {
        let line = line.trim();
        if let Some((k, v)) = line.split_once(' ') {
            fields.insert(k, v.trim());
        }
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| bad(format!("header is missing `{k}`")))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?
            .parse()
            .map_err(|_| bad(format!("header field `{k}` is not a number")))
    };

    let version: u32 = get("version")?
        .parse()
        .map_err(|_| bad("unreadable version".into()))?;
    if version != VERSION {
        return Err(bad(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let n: usize = get("n")?.parse().map_err(|_| bad("unreadable n".into()))?;
    let half_edge = num("half_edge")?;
    let t = num("t")?;
    let step: u64 = get("step")?
        .parse()
        .map_err(|_| bad("unreadable step".into()))?;

    let axes: Vec<AxisKind> = get("axes")?
        .split_whitespace()
        .map(|a| match a {
            "bounded" => Ok(AxisKind::Bounded),
            "periodic" => Ok(AxisKind::Periodic),
            _ => Err(bad(format!("unknown axis kind `{a}`"))),
        })
        .collect::<Result<_>>()?;
    let axes: [AxisKind; 3] = axes
        .try_into()
        .map_err(|_| bad("`axes` needs three entries".into()))?;

    let pv: Vec<f64> = get("params")?
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| bad(format!("bad parameter `{x}`"))))
        .collect::<Result<_>>()?;
    if pv.len() != 5 {
        return Err(bad("`params` needs eps beta gamma du dv".into()));
    }
    let params = ModelParams {
        eps: pv[0],
        beta: pv[1],
        gamma: pv[2],
        du: pv[3],
        dv: pv[4],
    };

    let faces: Vec<FaceCondition> = get("bc")?
        .split_whitespace()
        .map(|tok| parse_face(tok).ok_or_else(|| bad(format!("bad boundary token `{tok}`"))))
        .collect::<Result<_>>()?;
    let faces: [FaceCondition; 6] = faces
        .try_into()
        .map_err(|_| bad("`bc` needs six faces".into()))?;
    let bc = BoundarySpec::new(faces)?;

    let grid = Grid3::new(half_edge, n, axes)?;
    let count = grid.len();
    let expected = HEADER_LEN + 16 * count;
    if bytes.len() != expected {
        return Err(Error::PayloadLength {
            expected: expected - HEADER_LEN,
            found: bytes.len() - HEADER_LEN,
        });
    }
    let read_block = |offset: usize| -> Vec<f64> {
        bytes[offset..offset + 8 * count]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect()
    };
    let u = ScalarField::new(grid, read_block(HEADER_LEN))?;
    let v = ScalarField::new(grid, read_block(HEADER_LEN + 8 * count))?;
    let mut state = MediumState::new(t, u, v)?;
    state.step = step;
    Ok(Snapshot { state, params, bc })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let bytes = encode(snap)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{hopf_initial_condition, HopfICParams};

    fn sample() -> Snapshot {
        let g = Grid3::new(
            2.0,
            9,
            [AxisKind::Bounded, AxisKind::Bounded, AxisKind::Periodic],
        )
        .unwrap();
        let mut state = hopf_initial_condition(&g, &HopfICParams::default());
        state.t = 0.1 + 0.2;
        state.step = 17;
        Snapshot {
            state,
            params: ModelParams::default(),
            bc: BoundarySpec::new([
                FaceCondition::Dirichlet {
                    u: -1.0327898697433582,
                    v: -0.6655797394867164,
                },
                FaceCondition::NeumannZero,
                FaceCondition::NeumannZero,
                FaceCondition::Dirichlet { u: 0.1, v: 0.2 },
                FaceCondition::Periodic,
                FaceCondition::Periodic,
            ])
            .unwrap(),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = sample();
        let bytes = encode(&s).unwrap();
        assert_eq!(bytes.len(), HEADER_LEN + 16 * 729);
        let back = decode(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.state.t.to_bits(), s.state.t.to_bits());
    }

    #[test]
    fn corrupted_magic_names_expected() {
        let mut bytes = encode(&sample()).unwrap();
        bytes[0] = b'X';
        let msg = decode(&bytes, Path::new("mem")).unwrap_err().to_string();
        assert!(msg.contains(MAGIC), "{msg}");
    }

    #[test]
    fn truncated_payload_is_structured() {
        let bytes = encode(&sample()).unwrap();
        let err = decode(&bytes[..bytes.len() - 8], Path::new("mem")).unwrap_err();
        assert!(matches!(
            err,
            Error::PayloadLength { expected, found } if expected == 16 * 729 && found == expected - 8
        ));
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn version_mismatch_rejected() {
        let bytes = encode(&sample()).unwrap();
        let text = String::from_utf8(bytes[..HEADER_LEN].to_vec()).unwrap();
        let mut patched = text.replacen("version 1", "version 9", 1).into_bytes();
        patched.extend_from_slice(&bytes[HEADER_LEN..]);
        let msg = decode(&patched, Path::new("mem")).unwrap_err().to_string();
        assert!(msg.contains("version 9"), "{msg}");
    }
}
