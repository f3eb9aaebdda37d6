use std::fmt::Write as _;

use super::{MeshError, PointCloud, Vec3};

/// Parses whitespace- or comma-separated `x y z` lines. Blank lines and
/// lines starting with `#` are skipped; line numbers in errors are 1-based.
pub fn parse_xyz(text: &str) -> Result<PointCloud, MeshError> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 3 {
            return Err(MeshError::BadLine(i + 1));
        }
        let mut c = [0.0; 3];
        for (slot, f) in c.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or(MeshError::BadLine(i + 1))?;
        }
        points.push(Vec3::new(c[0], c[1], c[2]));
    }
    PointCloud::new(points)
}

/// One `x y z` line per point, preceded by `#`-prefixed comment lines.
pub fn write_xyz(points: &[Vec3], comments: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        let _ = writeln!(s, "#{c}");
    }
    for p in points {
        // `{}` on f64 prints the shortest representation that round-trips
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.z);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_separators() {
        let c = parse_xyz("0 0 0\n1,2,3").unwrap();
        assert_eq!(c.points, vec![Vec3::ZERO, Vec3::new(1.0, 2.0, 3.0)]);
    }

    #[test]
    fn comment_lines_skipped() {
        let c = parse_xyz("# hdr\n1 1 1").unwrap();
        assert_eq!(c.points, vec![Vec3::new(1.0, 1.0, 1.0)]);
        let c = parse_xyz("\n  \n1, 1 ,1\n").unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn arity_and_number_errors() {
        assert_eq!(parse_xyz("1 2"), Err(MeshError::BadLine(1)));
        assert_eq!(parse_xyz("1 2 3\n1 2 x"), Err(MeshError::BadLine(2)));
        assert_eq!(parse_xyz("1 2 3 4"), Err(MeshError::BadLine(1)));
        assert_eq!(parse_xyz("1 nan 3"), Err(MeshError::BadLine(1)));
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_xyz(""), Err(MeshError::EmptyCloud));
        assert_eq!(parse_xyz("# only\n"), Err(MeshError::EmptyCloud));
    }

    #[test]
    fn writer_round_trips_exactly() {
        let pts = vec![
            Vec3::new(0.1, -2.5e-7, 1.0 / 3.0),
            Vec3::new(1e12, 0.0, -0.0),
        ];
        let text = write_xyz(&pts, &["radius=0.7".to_string()]);
        assert!(text.starts_with("#radius=0.7\n"));
        assert_eq!(parse_xyz(&text).unwrap().points, pts);
    }
}
