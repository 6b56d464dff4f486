//! Line-oriented `key=value` reports for single scoring runs, plus the
//! combined function CSV written next to them.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;

use crate::experiment::CellData;

/// Formats a scored cell as `key=value` lines.
pub fn format_report(name: &str, data: &CellData) -> String {
    let mut out = String::new();
    let grid = data.k_theo.grid();
    writeln!(out, "name={name}").unwrap();
    writeln!(out, "sample_size={}", data.report.sample_size).unwrap();
    writeln!(out, "grid_steps={}", grid.len()).unwrap();
    writeln!(out, "r_max={}", grid.r_max()).unwrap();
    writeln!(
        out,
        "scaling={}",
        data.report.scaling.as_deref().unwrap_or("flat")
    )
    .unwrap();
    writeln!(out, "volume={}", data.volume).unwrap();
    writeln!(out, "volume_source={}", data.volume_source).unwrap();
    writeln!(out, "intrinsic={}", data.intrinsic).unwrap();
    writeln!(out, "score={}", data.report.score).unwrap();
    writeln!(out, "error_counts={}", data.report.error).unwrap();
    writeln!(out, "degenerate={}", data.report.is_degenerate()).unwrap();
    out
}

/// Writes the theoretical and empirical functions side by side.
pub fn write_function_pair(path: impl AsRef<Path>, data: &CellData) -> Result<()> {
    let mut out = String::from("r,theoretical,empirical\n");
    for ((r, t), e) in data
        .k_theo
        .grid()
        .radii()
        .iter()
        .zip(data.k_theo.values())
        .zip(data.k_hat.values())
    {
        writeln!(out, "{r},{t},{e}").unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}
