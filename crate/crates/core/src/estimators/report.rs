//! CSV and text renderings of estimator reports.

use super::scan::MomentScanReport;
use super::tail::TailFitReport;
use std::fmt::Write as _;
use std::io::{self, Write};

/// Header `v,estimate,std_error,max_share,n_eff,verdict`.
pub fn write_scan_csv<W: Write>(report: &MomentScanReport, mut out: W) -> io::Result<()> {
    writeln!(out, "v,estimate,std_error,max_share,n_eff,verdict")?;
    for p in &report.points {
        let e = &p.estimate;
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            e.v, e.estimate, e.std_error, e.max_contribution_share, e.n_effective, p.verdict
        )?;
    }
    Ok(())
}

/// Header `slope,intercept,r2,q_lo,q_hi`.
pub fn write_tail_csv<W: Write>(report: &TailFitReport, mut out: W) -> io::Result<()> {
    writeln!(out, "slope,intercept,r2,q_lo,q_hi")?;
    writeln!(
        out,
        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
        report.slope, report.intercept, report.r_squared, report.quantile_lo, report.quantile_hi
    )
}

pub fn scan_text(report: &MomentScanReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "moment scan: {} paths, center {}",
        report.n_paths, report.center
    );
    let _ = writeln!(
        s,
        "{:>10} {:>14} {:>10} {:>10} {:>9} {:>10}",
        "v", "ln estimate", "rel se", "max share", "growth", "verdict"
    );
    for p in &report.points {
        let e = &p.estimate;
        let _ = writeln!(
            s,
            "{:>10.4} {:>14.6} {:>10.4} {:>10.4} {:>9.4} {:>10}",
            e.v, e.ln_estimate, e.rel_std_error, e.max_contribution_share, p.growth, p.verdict
        );
    }
    let (lo, hi) = report.bracket;
    let _ = writeln!(s, "bracket: [{lo}, {hi}]");
    if let Some(theory) = report.theoretical {
        let verdict = if report.bracket_contains(theory) {
            "inside"
        } else {
            "OUTSIDE"
        };
        let _ = writeln!(
            s,
            "theoretical critical exponent: {theory} ({verdict} the bracket, width {:.1}% of it)",
            100.0 * report.bracket_width() / theory
        );
    }
    for w in &report.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

pub fn tail_text(report: &TailFitReport, reference: Option<f64>) -> String {
    let mut s = format!(
        "tail fit over quantiles ({}, {}), {} points\nslope {:.6}  intercept {:.6}  R² {:.6}\n",
        report.quantile_lo,
        report.quantile_hi,
        report.points,
        report.slope,
        report.intercept,
        report.r_squared
    );
    if let Some(r) = reference {
        let _ = writeln!(
            s,
            "reference 1/(2 σ²) = {r}, relative deviation {:+.2}%",
            100.0 * (report.slope / r - 1.0)
        );
    }
    s
}
