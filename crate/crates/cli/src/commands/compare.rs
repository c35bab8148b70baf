//! `compare`: per-cell error fields and global L1/Linf summaries between
//! two completed runs on the same mesh and snapshot schedule.

use std::path::Path;

use nnflux::mesh::read_mesh;

use crate::util::{ensure_dir, CsvDoc};
use crate::CliError;

struct Snapshot {
    t: f64,
    rows: Vec<Vec<f64>>, // x, y, u_0..u_{m-1}
}

fn load_run(dir: &Path) -> Result<(serde_json::Value, Vec<Snapshot>), CliError> {
    let run_path = dir.join("run.json");
    let text = std::fs::read_to_string(&run_path).map_err(|e| {
        CliError::validation(format!("cannot read {}: {e}", run_path.display()))
    })?;
    let run: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", run_path.display())))?;
    let mut snapshots = Vec::new();
    for entry in run["snapshots"].as_array().into_iter().flatten() {
        let t = entry["t"].as_f64().ok_or_else(|| {
            CliError::validation(format!("{}: snapshot without time", run_path.display()))
        })?;
        let file = entry["file"].as_str().ok_or_else(|| {
            CliError::validation(format!("{}: snapshot without file", run_path.display()))
        })?;
        let csv = std::fs::read_to_string(dir.join(file)).map_err(|e| {
            CliError::validation(format!("cannot read snapshot {file}: {e}"))
        })?;
        let mut rows = Vec::new();
        for line in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
            let vals: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse()).collect();
            rows.push(vals.map_err(|e| {
                CliError::validation(format!("snapshot {file}: bad row: {e}"))
            })?);
        }
        snapshots.push(Snapshot { t, rows });
    }
    Ok((run, snapshots))
}

pub fn run(run_a: &Path, run_b: &Path, out: &Path) -> Result<(), CliError> {
    ensure_dir(out)?;
    let (meta_a, snaps_a) = load_run(run_a)?;
    let (_meta_b, snaps_b) = load_run(run_b)?;

    let mesh_a = std::fs::read_to_string(run_a.join("mesh.txt"))
        .map_err(|e| CliError::validation(format!("run A has no mesh.txt: {e}")))?;
    let mesh_b = std::fs::read_to_string(run_b.join("mesh.txt"))
        .map_err(|e| CliError::validation(format!("run B has no mesh.txt: {e}")))?;
    if mesh_a != mesh_b {
        return Err(CliError::validation("runs use different meshes".into()));
    }
    let mesh = read_mesh(run_a.join("mesh.txt")).map_err(|e| CliError::validation(e.to_string()))?;

    if snaps_a.len() != snaps_b.len()
        || snaps_a
            .iter()
            .zip(&snaps_b)
            .any(|(a, b)| (a.t - b.t).abs() > 1e-12)
    {
        return Err(CliError::validation("runs have different snapshot times".into()));
    }
    if snaps_a.is_empty() {
        return Err(CliError::validation("runs contain no snapshots to compare".into()));
    }

    let m = snaps_a[0].rows[0].len() - 2;
    let mut summary_header: Vec<String> = vec!["t".into()];
    for c in 0..m {
        summary_header.push(format!("l1_{c}"));
        summary_header.push(format!("linf_{c}"));
        summary_header.push(format!("l1_norm_a_{c}"));
    }
    let header_refs: Vec<&str> = summary_header.iter().map(String::as_str).collect();
    let hash_a = meta_a["config_hash"].as_str().unwrap_or("").to_string();
    let mut summary = CsvDoc::new(&[("run_a_config_hash", hash_a.as_str())], &header_refs);

    for (snap_a, snap_b) in snaps_a.iter().zip(&snaps_b) {
        if snap_a.rows.len() != snap_b.rows.len() || snap_a.rows.len() != mesh.n_cells() {
            return Err(CliError::validation(format!(
                "snapshot t = {}: row counts differ from the mesh",
                snap_a.t
            )));
        }
        let mut field_header: Vec<String> = vec!["x".into(), "y".into()];
        for c in 0..m {
            field_header.push(format!("abs_err_{c}"));
        }
        let refs: Vec<&str> = field_header.iter().map(String::as_str).collect();
        let mut field = CsvDoc::new(&[], &refs);

        let mut l1 = vec![0.0f64; m];
        let mut linf = vec![0.0f64; m];
        let mut norm_a = vec![0.0f64; m];
        for (i, (ra, rb)) in snap_a.rows.iter().zip(&snap_b.rows).enumerate() {
            let w = mesh.cells[i].measure;
            let mut fields = vec![ra[0], ra[1]];
            for c in 0..m {
                let err = (ra[2 + c] - rb[2 + c]).abs();
                fields.push(err);
                l1[c] += w * err;
                linf[c] = linf[c].max(err);
                norm_a[c] += w * ra[2 + c].abs();
            }
            field.row_f64(&fields);
        }
        field.write(&out.join(format!("error_t{}.csv", snap_a.t)))?;

        let mut row = vec![snap_a.t];
        for c in 0..m {
            row.push(l1[c]);
            row.push(linf[c]);
            row.push(norm_a[c]);
        }
        summary.row_f64(&row);
        for c in 0..m {
            println!(
                "compare: t = {} component {c}: L1 {:.4e}, Linf {:.4e}",
                snap_a.t, l1[c], linf[c]
            );
        }
    }
    summary.write(&out.join("summary.csv"))?;
    Ok(())
}
