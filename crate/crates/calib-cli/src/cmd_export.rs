//! `calib export`: evaluate an integrated family over a two-dimensional
//! parameter grid and write a triangulated OBJ mesh (three projected
//! coordinates) plus the full-coordinate point cloud.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use crate::cmd_verify::integrated_family;
use crate::config::{self, ExportConfig};
use crate::manifest::ManifestBuilder;
use crate::Failure;

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Export configuration (JSON)
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Seed recorded in the manifest (the grid is deterministic)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Three 1-based coordinate indices projected into the mesh
    #[arg(long, default_value = "1,2,3", value_name = "I,J,K")]
    pub coords: String,
}

fn parse_coords(text: &str, ambient: usize) -> Result<[usize; 3], Failure> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::invalid(format!("--coords must be three integers, got '{text}'")))?;
    let [i, j, k]: [usize; 3] = parts
        .try_into()
        .map_err(|_| Failure::invalid("--coords must name exactly three coordinates"))?;
    for v in [i, j, k] {
        if v == 0 || v > ambient {
            return Err(Failure::invalid(format!(
                "--coords index {v} is outside 1..={ambient}"
            )));
        }
    }
    if i == j || j == k || i == k {
        return Err(Failure::invalid("--coords indices must be distinct"));
    }
    Ok([i - 1, j - 1, k - 1])
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

pub fn run(args: &ExportArgs) -> Result<(), Failure> {
    let (cfg, bytes) = config::load::<ExportConfig>(&args.config)?;
    let (family, _) =
        integrated_family(&cfg.system, &cfg.parameters, &cfg.initial_state, &cfg.integrator)?;
    let ambient = family.ambient_dim();
    let coords = parse_coords(&args.coords, ambient)?;
    if cfg.grid.s < 2 || cfg.grid.t < 2 {
        return Err(Failure::invalid("degenerate grid: both axes need at least 2 points"));
    }

    let d = family.param_dim();
    let slice: Vec<f64> = if cfg.slice.is_empty() && d == 3 {
        vec![1.0]
    } else {
        cfg.slice.clone()
    };
    if slice.len() != d - 2 {
        return Err(Failure::invalid(format!(
            "{} has {d} parameters; slice must fix the leading {} (got {})",
            family.name(),
            d - 2,
            slice.len()
        )));
    }
    for (value, (lo, hi)) in slice.iter().zip(family.domain()) {
        if !value.is_finite() || value < lo || value > hi {
            return Err(Failure::invalid(format!(
                "slice value {value} is outside the parameter range [{lo}, {hi}]"
            )));
        }
    }

    let (s_lo, s_hi) = family.domain()[d - 2];
    let (t_lo, t_hi) = family.domain()[d - 1];
    let s_values = linspace(s_lo, s_hi, cfg.grid.s);
    let t_values = linspace(t_lo, t_hi, cfg.grid.t);

    let mut obj = String::new();
    let mut csv = String::from("s,t");
    for j in 1..=ambient {
        csv.push_str(&format!(",x{j}"));
    }
    csv.push('\n');

    let mut params = slice.clone();
    params.push(0.0);
    params.push(0.0);
    for &s in &s_values {
        for &t in &t_values {
            params[d - 2] = s;
            params[d - 1] = t;
            let point = family.evaluate(&params);
            if point.iter().any(|v| !v.is_finite()) {
                return Err(Failure::numerical(format!(
                    "family evaluation is nonfinite at s = {s}, t = {t}"
                )));
            }
            obj.push_str(&format!(
                "v {} {} {}\n",
                point[coords[0]], point[coords[1]], point[coords[2]]
            ));
            csv.push_str(&s.to_string());
            csv.push(',');
            csv.push_str(&t.to_string());
            for v in &point {
                csv.push(',');
                csv.push_str(&v.to_string());
            }
            csv.push('\n');
        }
    }

    let cols = cfg.grid.t;
    let mut faces = 0usize;
    for i in 0..cfg.grid.s - 1 {
        for j in 0..cols - 1 {
            let a = i * cols + j + 1;
            let b = a + 1;
            let c = a + cols;
            let e = c + 1;
            obj.push_str(&format!("f {a} {b} {e}\n"));
            obj.push_str(&format!("f {a} {e} {c}\n"));
            faces += 2;
        }
    }

    fs::create_dir_all(&args.out).map_err(Failure::io)?;
    let mut manifest = ManifestBuilder::new("export", Some(&args.config), &bytes, args.seed);
    let obj_path = args.out.join("mesh.obj");
    fs::write(&obj_path, obj).map_err(Failure::io)?;
    manifest.record(&obj_path);
    let csv_path = args.out.join("points.csv");
    fs::write(&csv_path, csv).map_err(Failure::io)?;
    manifest.record(&csv_path);
    manifest.write(&args.out).map_err(Failure::io)?;

    println!(
        "export: {} vertices, {} faces to {}",
        cfg.grid.s * cfg.grid.t,
        faces,
        obj_path.display()
    );
    Ok(())
}
