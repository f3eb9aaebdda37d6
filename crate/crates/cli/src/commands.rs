use std::path::Path;

use serde_json::{json, Value};
use stegkit_core::gcode::{audit, parse_gcode};
use stegkit_core::mesh::{mesh_volume, parse_stl, parse_xyz, stl_format, write_stl_binary};
use stegkit_core::qr3d::{
    grid_to_spheres, project_to_grid, search_direction, spheres_to_mesh, BitGrid, EmbedParams,
    SearchParams, SphereCloud, DEFAULT_SEED,
};
use stegkit_core::recon::{group_layers, loft_layers, orientation_scan};
use stegkit_core::stego::{
    embed_stl_header, extract_stl_header, segments_from_json, segments_to_json, segments_to_text,
    text_to_segments, MorseParams, FRAME_OVERHEAD, MAX_HEADER_MESSAGE,
};
use stegkit_core::vrml::{
    capacity_bytes, embed_green_digits, extract_green_digits, parse_vrml, ChannelParams,
    VrmlWarning,
};

use crate::report::{DomainError, Session};
use crate::{ChannelArgs, Command, MessageArgs};

pub const SEED_ENV: &str = "DM_STEGKIT_SEED";

type Outcome = Result<Value, DomainError>;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("core types serialize")
}

fn message_bytes(args: &MessageArgs, s: &mut Session) -> Result<Vec<u8>, DomainError> {
    match (&args.message, &args.message_file) {
        (Some(m), _) => Ok(m.as_bytes().to_vec()),
        (None, Some(path)) => s.read(path),
        (None, None) => unreachable!("clap requires one of the message flags"),
    }
}

fn message_value(bytes: &[u8]) -> Value {
    let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "message": String::from_utf8_lossy(bytes),
        "message_hex": hex,
        "message_bytes": bytes.len(),
    })
}

fn channel(args: &ChannelArgs) -> Result<ChannelParams, DomainError> {
    Ok(ChannelParams::new(args.start_slot, args.digits)?)
}

fn grid_rows(grid: &BitGrid) -> Vec<String> {
    grid.bits()
        .chunks(grid.n())
        .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
        .collect()
}

fn grid_value(grid: &BitGrid) -> Value {
    json!({ "n": grid.n(), "ones": grid.count_ones(), "rows": grid_rows(grid) })
}

fn parse_seed(text: &str) -> Option<u64> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => t.parse().ok(),
    }
}

/// Explicit flag, then the environment, then the built-in default.
fn resolve_seed(flag: Option<u64>) -> Result<u64, DomainError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => parse_seed(&v).ok_or_else(|| {
            DomainError::new(
                "InvalidSeed",
                format!("{SEED_ENV}={v:?} is not an unsigned integer"),
            )
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

pub fn run(cmd: &Command, s: &mut Session) -> Outcome {
    match cmd {
        Command::StlInfo { input } => stl_info(input, s),
        Command::HeaderEmbed {
            input,
            message,
            output,
        } => {
            let mesh = parse_stl(&s.read(input)?)?;
            let payload = message_bytes(message, s)?;
            let marked = embed_stl_header(&mesh, &payload)?;
            s.write(output, &write_stl_binary(&marked))?;
            Ok(json!({
                "message_bytes": payload.len(),
                "capacity_bytes": MAX_HEADER_MESSAGE,
                "triangles": marked.triangles.len(),
                "output": path_value(output),
            }))
        }
        Command::HeaderExtract { input } => {
            let mesh = parse_stl(&s.read(input)?)?;
            Ok(message_value(&extract_stl_header(&mesh)?))
        }
        Command::GcodeAudit { input, threshold } => {
            let bytes = s.read(input)?;
            let program = parse_gcode(&String::from_utf8_lossy(&bytes))?;
            let report = audit(&program, *threshold);
            for w in &report.warnings {
                s.warn(w.clone());
            }
            Ok(to_value(&report))
        }
        Command::VrmlEmbed {
            input,
            message,
            channel: ch,
            output,
        } => {
            let params = channel(ch)?;
            let stream = parse_vrml(&s.read_text(input)?)?;
            note_vrml_warnings(&stream.warnings, s);
            let payload = message_bytes(message, s)?;
            let capacity = capacity_bytes(&stream, params)?;
            let text = embed_green_digits(&stream, &payload, params)?;
            s.write(output, text.as_bytes())?;
            let bits = (payload.len() + FRAME_OVERHEAD) * 8;
            Ok(json!({
                "message_bytes": payload.len(),
                "capacity_bytes": capacity,
                "slots_used": bits.div_ceil(params.digits_per_value),
                "slots_available": stream.color_green_slots.len().saturating_sub(params.start_slot),
                "output": path_value(output),
            }))
        }
        Command::VrmlExtract { input, channel: ch } => {
            let params = channel(ch)?;
            let text = s.read_text(input)?;
            Ok(message_value(&extract_green_digits(&text, params)?))
        }
        Command::MorseEncode { text, unit, output } => {
            let params = MorseParams::new(*unit)?;
            let segments = text_to_segments(text, params)?;
            if let Some(out) = output {
                s.write(out, segments_to_json(&segments).as_bytes())?;
            }
            Ok(json!({
                "text": text,
                "unit": params.unit,
                "segment_count": segments.len(),
                "segments": to_value(&segments),
            }))
        }
        Command::MorseDecode { input, unit } => {
            let segments = segments_from_json(&s.read_text(input)?)?;
            let params = match unit {
                Some(u) => MorseParams::new(*u)?,
                None => MorseParams::fitted(&segments)?,
            };
            let text = segments_to_text(&segments, params)?;
            Ok(json!({ "text": text, "unit": params.unit, "segment_count": segments.len() }))
        }
        Command::Qr3dEmbed {
            grid,
            dir,
            pitch,
            radius,
            jitter,
            seed,
            output,
            stl,
            subdivisions,
        } => {
            let bits = BitGrid::from_pbm(&s.read_text(grid)?)?;
            let mut params = EmbedParams::new(*pitch, *dir);
            params.radius = radius.unwrap_or(params.radius);
            params.depth_jitter = jitter.unwrap_or(params.depth_jitter);
            params.seed = resolve_seed(*seed)?;
            let cloud = grid_to_spheres(&bits, &params)?;
            // build the mesh before writing anything so a bad level fails cleanly
            let mesh = match stl {
                Some(_) => Some(spheres_to_mesh(&cloud, *subdivisions)?),
                None => None,
            };
            s.write(output, cloud.to_xyz().as_bytes())?;
            if let (Some(path), Some(mesh)) = (stl, &mesh) {
                s.write(path, &write_stl_binary(mesh))?;
            }
            Ok(json!({
                "modules": bits.n(),
                "spheres": cloud.centers.len(),
                "params": to_value(&params),
                "output": path_value(output),
                "stl": stl.as_deref().map(path_value),
                "triangles": mesh.map(|m| m.triangles.len()),
            }))
        }
        Command::Qr3dProject {
            input,
            dir,
            pitch,
            output,
        } => {
            let cloud = SphereCloud::from_xyz(&s.read_text(input)?)?;
            let grid = project_to_grid(&cloud, *dir, *pitch)?;
            if let Some(out) = output {
                s.write(out, grid.to_pbm().as_bytes())?;
            }
            Ok(json!({ "direction": to_value(dir), "pitch": pitch, "grid": grid_value(&grid) }))
        }
        Command::Qr3dSearch {
            input,
            coarse_step,
            refine_to,
            output,
        } => {
            let cloud = SphereCloud::from_xyz(&s.read_text(input)?)?;
            let params = SearchParams {
                coarse_step_deg: *coarse_step,
                refine_to_deg: *refine_to,
                ..SearchParams::default()
            };
            let r = search_direction(&cloud, params)?;
            if r.degenerate {
                s.warn("centers are collinear or have no usable pitch; direction is arbitrary");
            }
            if let Some(out) = output {
                s.write(out, r.grid.to_pbm().as_bytes())?;
            }
            Ok(json!({
                "direction": to_value(&r.direction),
                "score": r.score,
                "estimated_pitch": r.estimated_pitch,
                "candidates_evaluated": r.candidates_evaluated,
                "degenerate": r.degenerate,
                "grid": grid_value(&r.grid),
            }))
        }
        Command::Recon {
            input,
            z_tol,
            resample,
            output,
        } => {
            let cloud = parse_xyz(&s.read_text(input)?)?;
            let stack = group_layers(&cloud, *z_tol)?;
            let mesh = loft_layers(&stack, *resample)?;
            if let Some(out) = output {
                s.write(out, &write_stl_binary(&mesh))?;
            }
            Ok(json!({
                "points": cloud.len(),
                "layer_count": stack.layer_count(),
                "z_tol": stack.z_tol,
                "spacing": to_value(&stack.spacing),
                "vertices": mesh.vertices.len(),
                "triangles": mesh.triangles.len(),
                "volume_mm3": mesh_volume(&mesh).signed(),
            }))
        }
        Command::OrientScan {
            input,
            step,
            layer_height,
            top,
        } => {
            let mesh = parse_stl(&s.read(input)?)?;
            let report = orientation_scan(&mesh, *step, *layer_height)?;
            let ranked: Vec<Value> = report.candidates.iter().take(*top).map(to_value).collect();
            Ok(json!({
                "angle_step_deg": report.angle_step_deg,
                "layer_height": report.layer_height,
                "candidates_evaluated": report.candidates_evaluated,
                "top": ranked,
            }))
        }
    }
}

fn note_vrml_warnings(warnings: &[VrmlWarning], s: &mut Session) {
    for w in warnings {
        match w {
            VrmlWarning::NoColorNode => s.warn("file has no Color node; channel capacity is zero"),
        }
    }
}

fn stl_info(input: &Path, s: &mut Session) -> Outcome {
    let bytes = s.read(input)?;
    let mesh = parse_stl(&bytes)?;
    let volume = mesh_volume(&mesh);
    if volume.negative {
        s.warn("signed volume is negative; facet winding is probably inverted");
    }
    let header_text: String = mesh
        .header
        .iter()
        .take_while(|&&b| b != 0)
        .map(|&b| {
            if b.is_ascii_graphic() || b == b' ' {
                b as char
            } else {
                '.'
            }
        })
        .collect();
    let header_hex: String = mesh.header.iter().map(|b| format!("{b:02x}")).collect();
    let bounds = mesh
        .bounds()
        .map(|(lo, hi)| json!({ "min": to_value(&lo), "max": to_value(&hi) }));
    Ok(json!({
        "format": to_value(&stl_format(&bytes)),
        "triangles": mesh.triangles.len(),
        "vertices": mesh.vertices.len(),
        "bounds": bounds,
        "volume_mm3": volume.signed(),
        "header_text": header_text.trim_end(),
        "header_hex": header_hex,
    }))
}
