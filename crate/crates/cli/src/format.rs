//! Human-readable rendering.

use semiconv_core::bench::BenchmarkTable;
use semiconv_core::spectral::ComplexValue;

/// Fixed 10-decimal rendering with trailing zeros removed, so that `0.5`
/// prints as `0.5` even when computed as `0.5000000000000001`.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_owned() } else { s.to_owned() }
}

pub fn complex(z: ComplexValue) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", num(z.re), num(z.im.abs()))
    }
}

pub fn angle_list(angles: &[f64]) -> String {
    angles.iter().map(|&t| num(t)).collect::<Vec<_>>().join(", ")
}

/// Primary-category summary: one block of rows per method.
pub fn table(t: &BenchmarkTable) -> String {
    let mut categories: Vec<&str> = t.primary_stats.iter().map(|s| s.category.as_str()).collect();
    categories.dedup();
    let method_width = t.methods.iter().map(|m| m.to_string().len()).max().unwrap_or(0).max(6);
    let col = 12;
    let mut out = format!("{:<method_width$}  {:<8}", "method", "stat");
    for c in &categories {
        out += &format!("{c:>col$}");
    }
    out.push('\n');
    if let Some(first) = t.methods.first() {
        out += &format!("{:<method_width$}  {:<8}", "", "n");
        for c in &categories {
            let n = t.stats_for(c, first).map_or(0, |s| s.instances);
            out += &format!("{n:>col$}");
        }
        out.push('\n');
    }
    for m in &t.methods {
        for (k, stat) in ["median", "mean", "std", "unsolved"].iter().enumerate() {
            let label = if k == 0 { m.to_string() } else { String::new() };
            out += &format!("{label:<method_width$}  {stat:<8}");
            for c in &categories {
                let cell = t.stats_for(c, m).map_or(String::new(), |s| match *stat {
                    "median" => num(s.median),
                    "mean" => format!("{:.1}", s.mean),
                    "std" => format!("{:.1}", s.std),
                    _ => s.unsolved.to_string(),
                });
                out += &format!("{cell:>col$}");
            }
            out.push('\n');
        }
    }
    out
}
