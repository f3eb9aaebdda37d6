use serde::Serialize;

use super::parse::{GcodeCommand, GcodeProgram};
use crate::mesh::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionMode {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Millimeters,
    Inches,
}

impl Units {
    fn scale(self) -> f64 {
        match self {
            Units::Millimeters => 1.0,
            Units::Inches => 25.4,
        }
    }
}

/// Machine state after replaying some prefix of a program. All lengths are
/// stored in millimetres regardless of the active unit mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToolpathState {
    pub position: Vec3,
    pub e_position: f64,
    pub xyz_mode: PositionMode,
    pub e_mode: PositionMode,
    pub units: Units,
}

impl Default for ToolpathState {
    fn default() -> Self {
        ToolpathState {
            position: Vec3::ZERO,
            e_position: 0.0,
            xyz_mode: PositionMode::Absolute,
            e_mode: PositionMode::Absolute,
            units: Units::Millimeters,
        }
    }
}

/// One G0-G3 move. Arcs are represented by their chord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub line_number: usize,
    pub from: Vec3,
    pub to: Vec3,
    pub e_delta: f64,
}

impl Move {
    pub fn extrudes(&self) -> bool {
        self.e_delta > 0.0
    }

    pub fn length(&self) -> f64 {
        (self.to - self.from).norm()
    }
}

impl ToolpathState {
    /// Applies one command, returning the move it produced, if any.
    pub fn apply(&mut self, cmd: &GcodeCommand, last_motion: &mut Option<f64>) -> Option<Move> {
        let scale = self.units.scale();
        let code = match cmd.code {
            Some(c) => c,
            None if !cmd.arguments.is_empty() && last_motion.is_some() => {
                crate::gcode::parse::Code {
                    letter: 'G',
                    number: last_motion.unwrap(),
                }
            }
            None => return None,
        };
        match (code.letter, code.number) {
            ('G', n) if n == 0.0 || n == 1.0 || n == 2.0 || n == 3.0 => {
                *last_motion = Some(n);
                let from = self.position;
                let axis = |cur: f64, letter: char| match cmd.arg(letter) {
                    Some(v) => match self.xyz_mode {
                        PositionMode::Absolute => v * scale,
                        PositionMode::Relative => cur + v * scale,
                    },
                    None => cur,
                };
                let to = Vec3::new(axis(from.x, 'X'), axis(from.y, 'Y'), axis(from.z, 'Z'));
                let e_delta = match cmd.arg('E') {
                    Some(v) => match self.e_mode {
                        PositionMode::Absolute => v * scale - self.e_position,
                        PositionMode::Relative => v * scale,
                    },
                    None => 0.0,
                };
                self.position = to;
                self.e_position += e_delta;
                Some(Move {
                    line_number: cmd.line_number,
                    from,
                    to,
                    e_delta,
                })
            }
            ('G', 20.0) => {
                self.units = Units::Inches;
                None
            }
            ('G', 21.0) => {
                self.units = Units::Millimeters;
                None
            }
            ('G', 28.0) => {
                let all = !['X', 'Y', 'Z'].iter().any(|&l| cmd.arg(l).is_some());
                if all || cmd.arg('X').is_some() {
                    self.position.x = 0.0;
                }
                if all || cmd.arg('Y').is_some() {
                    self.position.y = 0.0;
                }
                if all || cmd.arg('Z').is_some() {
                    self.position.z = 0.0;
                }
                None
            }
            ('G', 90.0) => {
                self.xyz_mode = PositionMode::Absolute;
                None
            }
            ('G', 91.0) => {
                self.xyz_mode = PositionMode::Relative;
                None
            }
            ('G', 92.0) => {
                if cmd.arguments.is_empty() {
                    self.position = Vec3::ZERO;
                    self.e_position = 0.0;
                } else {
                    if let Some(v) = cmd.arg('X') {
                        self.position.x = v * scale;
                    }
                    if let Some(v) = cmd.arg('Y') {
                        self.position.y = v * scale;
                    }
                    if let Some(v) = cmd.arg('Z') {
                        self.position.z = v * scale;
                    }
                    if let Some(v) = cmd.arg('E') {
                        self.e_position = v * scale;
                    }
                }
                None
            }
            ('M', 82.0) => {
                self.e_mode = PositionMode::Absolute;
                None
            }
            ('M', 83.0) => {
                self.e_mode = PositionMode::Relative;
                None
            }
            _ => None,
        }
    }
}

/// Replays the program from the default state (absolute XYZ and E, mm,
/// origin) and returns every move in order.
pub fn replay(program: &GcodeProgram) -> Vec<Move> {
    let mut state = ToolpathState::default();
    let mut last_motion = None;
    program
        .commands
        .iter()
        .filter_map(|c| state.apply(c, &mut last_motion))
        .collect()
}

/// Total filament pushed through the nozzle: the sum of positive E deltas.
/// Retractions and the re-primes that undo them are not netted out; a
/// retraction simply contributes nothing.
pub fn filament_length(program: &GcodeProgram) -> f64 {
    replay(program)
        .iter()
        .filter(|m| m.extrudes())
        .map(|m| m.e_delta)
        .sum()
}

/// Quantum used to merge nearly equal layer heights, mm.
pub const Z_QUANTUM_MM: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZProfile {
    pub z_levels: Vec<f64>,
    pub layer_count: usize,
    pub max_z_mm: f64,
}

/// Distinct heights at which material was deposited, merged to
/// [`Z_QUANTUM_MM`]. `max_z_mm` is 0 when nothing was extruded.
pub fn z_profile(program: &GcodeProgram) -> ZProfile {
    let mut keys: Vec<i64> = replay(program)
        .iter()
        .filter(|m| m.extrudes())
        .map(|m| (m.to.z / Z_QUANTUM_MM).round() as i64)
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let z_levels: Vec<f64> = keys.iter().map(|&k| k as f64 / 1000.0).collect();
    ZProfile {
        layer_count: z_levels.len(),
        max_z_mm: z_levels.last().copied().unwrap_or(0.0),
        z_levels,
    }
}

/// Length of all moves that deposit no material, mm.
pub fn travel_length(program: &GcodeProgram) -> f64 {
    replay(program)
        .iter()
        .filter(|m| !m.extrudes())
        .map(Move::length)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gcode::parse_gcode;

    fn filament(text: &str) -> f64 {
        filament_length(&parse_gcode(text).unwrap())
    }

    #[test]
    fn absolute_e() {
        assert_eq!(filament("M82\nG1 E5\nG1 E12"), 12.0);
    }

    #[test]
    fn retraction_ignored() {
        assert_eq!(filament("M82\nG1 E12\nG1 E10\nG1 E15"), 17.0);
    }

    #[test]
    fn relative_e() {
        assert_eq!(filament("M83\nG1 E3\nG1 E4"), 7.0);
        assert_eq!(filament("M83\nG1 E3\nG1 E-1\nG1 E1"), 4.0);
    }

    #[test]
    fn g92_resets_extruder() {
        assert_eq!(filament("G1 E10\nG92 E0\nG1 E4"), 14.0);
        assert_eq!(filament("G1 E10\nG92\nG1 E4"), 14.0);
    }

    #[test]
    fn inches_scaled_on_ingest() {
        assert!((filament("G20\nG1 E1\nG21\nG1 E30.4") - 30.4).abs() < 1e-12);
        let p = parse_gcode("G20\nG1 X1 Y0").unwrap();
        assert_eq!(replay(&p)[0].to, Vec3::new(25.4, 0.0, 0.0));
    }

    #[test]
    fn empty_program() {
        assert_eq!(filament(""), 0.0);
        let z = z_profile(&parse_gcode("").unwrap());
        assert_eq!(z.layer_count, 0);
    }

    #[test]
    fn relative_xyz_and_travel() {
        let p = parse_gcode("G91\nG0 X3\nG0 Y4\nG1 X1 E1").unwrap();
        let moves = replay(&p);
        assert_eq!(moves[2].to, Vec3::new(4.0, 4.0, 0.0));
        assert_eq!(travel_length(&p), 7.0);
    }

    #[test]
    fn modal_moves_follow_last_motion_code() {
        let p = parse_gcode("G1 X1 E1\nX2 E2\n; note").unwrap();
        assert_eq!(filament_length(&p), 2.0);
    }

    #[test]
    fn arcs_use_chord() {
        let p = parse_gcode("G0 X0 Y0\nG2 X10 Y0 I5 J0 E1").unwrap();
        let m = replay(&p);
        assert_eq!(m[1].length(), 10.0);
    }

    #[test]
    fn layers_from_extruding_moves() {
        let p = parse_gcode("G1 Z0.2\nG1 X1 E1\nG1 Z0.4\nG1 X2 E2\nG0 Z5").unwrap();
        let z = z_profile(&p);
        assert_eq!(z.z_levels, vec![0.2, 0.4]);
        assert_eq!(z.layer_count, 2);
        assert_eq!(z.max_z_mm, 0.4);
    }

    #[test]
    fn travel_only_has_no_layers() {
        let z = z_profile(&parse_gcode("G0 Z0.2\nG0 X10\nG0 Z0.4 X0").unwrap());
        assert!(z.z_levels.is_empty());
        assert_eq!(z.layer_count, 0);
    }

    #[test]
    fn close_heights_merge() {
        let p = parse_gcode("G1 Z0.2000 X1 E1\nG1 Z0.2004 X2 E2").unwrap();
        assert_eq!(z_profile(&p).z_levels, vec![0.2]);
    }
}
