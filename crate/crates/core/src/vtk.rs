//! Legacy ASCII VTK polydata for meshes and curves.

use std::fs;
use std::path::Path;

use vtkio::model::{
    Attributes, ByteOrder, DataSet, IOBuffer, PolyDataPiece, Version, VertexNumbers, Vtk,
};

use crate::curves::Polyline;
use crate::error::{Error, Result};
use crate::isosurface::TriMesh;

fn to_text(
    title: &str,
    points: Vec<f64>,
    lines: Option<VertexNumbers>,
    polys: Option<VertexNumbers>,
) -> Result<String> {
    let vtk = Vtk {
        version: Version::new((3, 0)),
        title: title.to_string(),
        byte_order: ByteOrder::BigEndian,
        file_path: None,
        data: DataSet::inline(PolyDataPiece {
            points: IOBuffer::F64(points),
            verts: None,
            lines,
            polys,
            strips: None,
            data: Attributes::new(),
        }),
    };
    let mut out = String::new();
    vtk.write_legacy_ascii(&mut out)
        .map_err(|e| Error::Config(format!("vtk encoding failed: {e}")))?;
    Ok(out)
}

fn legacy(cells: Vec<Vec<u32>>) -> Option<VertexNumbers> {
    if cells.is_empty() {
        return None;
    }
    let num_cells = cells.len() as u32;
    let vertices = cells
        .into_iter()
        .flat_map(|c| std::iter::once(c.len() as u32).chain(c))
        .collect();
    Some(VertexNumbers::Legacy {
        num_cells,
        vertices,
    })
}

/// Triangle mesh as `POINTS` + `POLYGONS`.
pub fn mesh_to_vtk(mesh: &TriMesh, title: &str) -> Result<String> {
    let points = mesh.vertices.iter().flatten().copied().collect();
    let tris = mesh
        .triangles
        .iter()
        .map(|t| t.iter().map(|&i| i as u32).collect())
        .collect();
    to_text(title, points, None, legacy(tris))
}

/// Polylines as `POINTS` + `LINES`. A closed curve repeats its first index
/// at the end of its cell.
pub fn polylines_to_vtk(curves: &[Polyline], title: &str) -> Result<String> {
    let mut points = Vec::new();
    let mut cells = Vec::new();
    let mut base = 0u32;
    for c in curves {
        points.extend(c.points.iter().flatten().copied());
        let mut cell: Vec<u32> = (base..base + c.len() as u32).collect();
        if c.closed && !cell.is_empty() {
            cell.push(base);
        }
        base += c.len() as u32;
        cells.push(cell);
    }
    to_text(title, points, legacy(cells), None)
}

pub fn write_mesh(path: &Path, mesh: &TriMesh, title: &str) -> Result<()> {
    fs::write(path, mesh_to_vtk(mesh, title)?).map_err(|e| Error::io(path, e))
}

pub fn write_polylines(path: &Path, curves: &[Polyline], title: &str) -> Result<()> {
    fs::write(path, polylines_to_vtk(curves, title)?).map_err(|e| Error::io(path, e))
}

/// Polydata contents of a legacy VTK file: points, line cells and polygon
/// cells, each cell as a list of point indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolyData {
    pub points: Vec<[f64; 3]>,
    pub lines: Vec<Vec<usize>>,
    pub polys: Vec<Vec<usize>>,
}

fn cells(v: Option<VertexNumbers>) -> Vec<Vec<usize>> {
    match v {
        None => Vec::new(),
        Some(VertexNumbers::Legacy { vertices, .. }) => {
            let mut out = Vec::new();
            let mut it = vertices.into_iter();
            while let Some(k) = it.next() {
                out.push(it.by_ref().take(k as usize).map(|i| i as usize).collect());
            }
            out
        }
        Some(VertexNumbers::XML {
            connectivity,
            offsets,
        }) => {
            let mut start = 0usize;
            offsets
                .iter()
                .map(|&end| {
                    let c = connectivity[start..end as usize]
                        .iter()
                        .map(|&i| i as usize)
                        .collect();
                    start = end as usize;
                    c
                })
                .collect()
        }
    }
}

pub fn read_polydata(path: &Path) -> Result<PolyData> {
    let bad = |message: String| Error::Snapshot {
        path: path.to_path_buf(),
        message,
    };
    let vtk = Vtk::import(path).map_err(|e| bad(format!("not a readable VTK file: {e}")))?;
    let DataSet::PolyData { pieces, .. } = vtk.data else {
        return Err(bad("expected POLYDATA".into()));
    };
    let mut out = PolyData::default();
    for piece in pieces {
        let piece = piece
            .into_loaded_piece_data(None)
            .map_err(|e| bad(format!("cannot load piece: {e}")))?;
        let base = out.points.len();
        let coords: Vec<f64> = piece
            .points
            .cast_into()
            .ok_or_else(|| bad("unsupported point type".into()))?;
        out.points
            .extend(coords.chunks_exact(3).map(|c| [c[0], c[1], c[2]]));
        let shift = |cs: Vec<Vec<usize>>| -> Vec<Vec<usize>> {
            cs.into_iter()
                .map(|c| c.into_iter().map(|i| i + base).collect())
                .collect()
        };
        out.lines.extend(shift(cells(piece.lines)));
        out.polys.extend(shift(cells(piece.polys)));
    }
    let n = out.points.len();
    if out
        .lines
        .iter()
        .chain(&out.polys)
        .flatten()
        .any(|&i| i >= n)
    {
        return Err(bad("cell index out of range".into()));
    }
    Ok(out)
}

/// Reads the `LINES` cells of a file written by [`write_polylines`]. A cell
/// whose last index equals its first is a closed curve.
pub fn read_polylines(path: &Path) -> Result<Vec<Polyline>> {
    let data = read_polydata(path)?;
    Ok(data
        .lines
        .into_iter()
        .map(|cell| {
            let closed = cell.len() > 2 && cell.first() == cell.last();
            let idx = if closed {
                &cell[..cell.len() - 1]
            } else {
                &cell[..]
            };
            let points = idx.iter().map(|&i| data.points[i]).collect();
            if closed {
                Polyline::closed(points)
            } else {
                Polyline::open(points)
            }
        })
        .collect())
}
