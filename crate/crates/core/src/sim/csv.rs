use std::fmt::Write as _;

use super::stats::BlerPoint;

/// Column names of a curve file.
pub const CSV_COLUMNS: &str = "ebn0_db,trials,errors,bler,ci_low,ci_high";

/// Renders one curve. `comments` are emitted as `# ` lines after the
/// header line.
pub fn render_curve(code_desc: &str, list_size: usize, seed: u64, comments: &[String], points: &[BlerPoint]) -> String {
    let mut out = format!("# code={code_desc} decoder=L{list_size} seed={seed}\n");
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(CSV_COLUMNS);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{:.6e},{:.6e},{:.6e}",
            p.ebn0_db, p.trials, p.errors, p.bler, p.ci95_low, p.ci95_high
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_layout() {
        let pts = vec![BlerPoint::new(1.5, 1000, 10, 0)];
        let text = render_curve("(8>=4,2)", 8, 42, &["mother.n=3".into()], &pts);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# code=(8>=4,2) decoder=L8 seed=42");
        assert_eq!(lines[1], "# mother.n=3");
        assert_eq!(lines[2], CSV_COLUMNS);
        assert!(lines[3].starts_with("1.5,1000,10,1.000000e-2,"));
    }
}
