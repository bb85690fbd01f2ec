//! Field export: CSV rows per interior voxel and legacy ASCII VTK
//! structured points over the bounding lattice.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use starcurl::algebra::FieldValue;
use starcurl::{GridField, VoxelGrid};
use vtkio::model::{
    Attribute, Attributes, ByteOrder, DataArray, DataSet, Extent, ImageDataPiece, Piece, Version,
    Vtk,
};

use crate::config::Format;
use crate::error::CliError;

/// Writes `field` with one column per entry of `components`.
pub fn export_field<T: FieldValue>(
    field: &GridField<T>,
    components: &[&str],
    format: Format,
    path: &Path,
) -> Result<(), CliError> {
    assert_eq!(components.len(), T::COMPONENTS, "one name per component");
    match format {
        Format::Csv => write_csv(field, components, path),
        Format::Vtk => write_vtk(field, components, path),
    }
}

/// 17 significant digits, enough to read every `f64` back exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<T: FieldValue>(
    field: &GridField<T>,
    components: &[&str],
    path: &Path,
) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::io(path, e.into());
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let mut header = vec!["x", "y", "z"];
    header.extend_from_slice(components);
    w.write_record(&header).map_err(io)?;
    let grid = field.grid();
    let mut row = Vec::with_capacity(3 + T::COMPONENTS);
    for (idx, v) in field.values().iter().enumerate() {
        let x = grid.center(idx);
        row.clear();
        row.extend([x.x, x.y, x.z].into_iter().map(fmt_f64));
        row.extend((0..T::COMPONENTS).map(|c| fmt_f64(v.component(c))));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Columns of a CSV export: names after `x,y,z` and one row per voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub components: Vec<String>,
    pub points: Vec<[f64; 3]>,
    pub values: Vec<Vec<f64>>,
}

pub fn read_csv(path: &Path) -> Result<CsvTable, CliError> {
    let bad = |msg: String| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg));
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers().map_err(|e| CliError::io(path, e.into()))?.clone();
    if header.len() < 4 || &header[0] != "x" || &header[1] != "y" || &header[2] != "z" {
        return Err(bad("header must start with x,y,z and name at least one component".into()));
    }
    let components: Vec<String> = header.iter().skip(3).map(str::to_string).collect();
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::io(path, e.into()))?;
        let nums = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
        if nums.len() != header.len() {
            return Err(bad(format!("row {}: expected {} columns", i + 2, header.len())));
        }
        points.push([nums[0], nums[1], nums[2]]);
        values.push(nums[3..].to_vec());
    }
    Ok(CsvTable {
        components,
        points,
        values,
    })
}

/// Rebuilds a field on `grid` from a CSV table whose rows are the interior
/// voxels in grid order.
pub fn field_from_table<T: FieldValue>(
    table: &CsvTable,
    grid: &std::sync::Arc<VoxelGrid>,
) -> Result<GridField<T>, String> {
    if table.components.len() != T::COMPONENTS {
        return Err(format!(
            "expected {} component column(s), found {}",
            T::COMPONENTS,
            table.components.len()
        ));
    }
    if table.points.len() != grid.len() {
        return Err(format!(
            "expected {} rows (interior voxels), found {}",
            grid.len(),
            table.points.len()
        ));
    }
    let tol = 1e-6 * grid.spacing();
    for (idx, p) in table.points.iter().enumerate() {
        let c = grid.center(idx);
        if (c.x - p[0]).abs() > tol || (c.y - p[1]).abs() > tol || (c.z - p[2]).abs() > tol {
            return Err(format!("row {} is not at voxel center {:?}", idx + 2, c.as_slice()));
        }
    }
    let values = table.values.iter().map(|v| T::from_components(v)).collect();
    GridField::new(grid.clone(), values).map_err(|e| e.to_string())
}

fn vtk_document<T: FieldValue>(field: &GridField<T>, components: &[&str]) -> Vtk {
    let grid = field.grid();
    let [nx, ny, nz] = grid.dims();
    let total = nx * ny * nz;
    let mut data = vec![0.0f64; total * T::COMPONENTS];
    let mut mask = vec![0.0f64; total];
    for (idx, v) in field.values().iter().enumerate() {
        let [i, j, k] = grid.cell(idx);
        let p = i + nx * (j + ny * k);
        mask[p] = 1.0;
        for c in 0..T::COMPONENTS {
            data[p * T::COMPONENTS + c] = v.component(c);
        }
    }
    let name = components.join("_");
    let array = if T::COMPONENTS == 3 {
        DataArray::vectors(name)
    } else {
        DataArray::scalars(name, T::COMPONENTS as u32)
    };
    let extent = Extent::Dims([nx as u32, ny as u32, nz as u32]);
    let origin = grid.lattice_point(0, 0, 0);
    let h = grid.spacing() as f32;
    Vtk {
        version: Version::new((3, 0)),
        title: format!("starcurl field {}", components.join(",")),
        byte_order: ByteOrder::BigEndian,
        file_path: None,
        data: DataSet::ImageData {
            extent: extent.clone(),
            origin: [origin.x as f32, origin.y as f32, origin.z as f32],
            spacing: [h, h, h],
            meta: None,
            pieces: vec![Piece::Inline(Box::new(ImageDataPiece {
                extent,
                data: Attributes {
                    point: vec![
                        Attribute::DataArray(array.with_data(data)),
                        Attribute::DataArray(DataArray::scalars("interior", 1).with_data(mask)),
                    ],
                    cell: Vec::new(),
                },
            }))],
        },
    }
}

pub fn write_vtk<T: FieldValue>(
    field: &GridField<T>,
    components: &[&str],
    path: &Path,
) -> Result<(), CliError> {
    let mut text = String::new();
    vtk_document(field, components)
        .write_legacy_ascii(&mut text)
        .map_err(|e| CliError::io(path, std::io::Error::other(e.to_string())))?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
