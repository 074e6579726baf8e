//! Table formatting and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

/// A CSV table with `# key: value` metadata and the resolved config above
/// the header row.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub config_echo: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    /// `run_line` carries the only run-dependent fields (timestamp, timing)
    /// and is written on its own `# run:` line.
    pub fn to_csv(&self, run_line: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("# panel-flutter {}\n", env!("CARGO_PKG_VERSION")));
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&format!("# run: {run_line}\n"));
        out.push_str("# config:\n");
        for line in self.config_echo.lines() {
            out.push_str(&format!("#   {line}\n").replace("#   \n", "#\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields"));
        out
    }
}

/// Two-column whitespace-separated plot data.
pub fn plot_data(x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let mut out = format!("# {x_label} {y_label}\n");
    for (x, y) in points {
        out.push_str(&format!("{} {}\n", num(*x), num(*y)));
    }
    out
}

/// Ten significant digits, plain notation for moderate magnitudes.
pub fn num(v: f64) -> String {
    if !v.is_finite() {
        return "nan".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{v:.9e}");
    }
    let s = format!("{:.*}", (9 - mag).max(0) as usize, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(dir: &Path, file_name: &str, contents: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(file_name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

/// Monotonicity summary of `y(x)`: `increasing`, `decreasing`, `constant`
/// or the `x` values where the direction turns.
pub fn describe_trend(points: &[(f64, f64)]) -> String {
    if points.len() < 2 {
        return "single point".into();
    }
    let signs: Vec<i8> = points
        .windows(2)
        .map(|w| match w[1].1.partial_cmp(&w[0].1) {
            Some(std::cmp::Ordering::Greater) => 1,
            Some(std::cmp::Ordering::Less) => -1,
            _ => 0,
        })
        .collect();
    if signs.iter().all(|&s| s == 1) {
        return "increasing".into();
    }
    if signs.iter().all(|&s| s == -1) {
        return "decreasing".into();
    }
    if signs.iter().all(|&s| s == 0) {
        return "constant".into();
    }
    let mut turns = Vec::new();
    let mut last = 0i8;
    for (i, &s) in signs.iter().enumerate() {
        if s != 0 {
            if last != 0 && s != last {
                let kind = if last == 1 { "max" } else { "min" };
                turns.push(format!("{kind} at {}", num(points[i].0)));
            }
            last = s;
        }
    }
    if turns.is_empty() {
        // monotone with flat steps
        return if last == 1 { "non-decreasing".into() } else { "non-increasing".into() };
    }
    format!("turning points: {}", turns.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(513.48), "513.48");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-0.125), "-0.125");
        assert_eq!(num(1.0 / 3.0), "0.3333333333");
        assert_eq!(num(1.9634e11), "196340000000");
        assert_eq!(num(2.5e-7), "2.500000000e-7");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn formatted_numbers_parse_back() {
        for v in [513.48, 1e-3, 42.0, 123456.789, 9.87654321e-6] {
            let back: f64 = num(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-9 * v.abs());
        }
    }

    #[test]
    fn trends() {
        let p = |ys: &[f64]| ys.iter().enumerate().map(|(i, &y)| (10.0 * i as f64, y)).collect::<Vec<_>>();
        assert_eq!(describe_trend(&p(&[1.0, 2.0, 3.0])), "increasing");
        assert_eq!(describe_trend(&p(&[3.0, 2.0])), "decreasing");
        assert_eq!(describe_trend(&p(&[1.0, 1.0])), "constant");
        assert_eq!(describe_trend(&p(&[1.0, 1.0, 2.0])), "non-decreasing");
        assert_eq!(describe_trend(&p(&[1.0, 3.0, 2.0, 1.0, 2.0])), "turning points: max at 10, min at 30");
        assert_eq!(describe_trend(&p(&[1.0])), "single point");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["mode", "omega"]);
        t.meta("mesh", "5x5");
        t.config_echo = "[geometry]\na = 1.0\n\n[mesh]".into();
        t.rows.push(vec!["1".into(), "2.5".into()]);
        let csv = t.to_csv("generated_unix=0");
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# panel-flutter "));
        assert_eq!(lines[1], "# mesh: 5x5");
        assert_eq!(lines[2], "# run: generated_unix=0");
        assert_eq!(lines[3], "# config:");
        assert_eq!(lines[4], "#   [geometry]");
        assert_eq!(lines[6], "#");
        assert_eq!(&lines[8..], ["mode,omega", "1,2.5"]);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "x.csv", "one").unwrap();
        write_atomic(dir.path(), "x.csv", "two").unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
