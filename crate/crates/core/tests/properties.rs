mod common;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use stegkit_core::gcode::{audit, filament_length, parse_gcode, Verdict};
use stegkit_core::mesh::{
    cuboid, icosphere, mesh_volume, parse_stl, rotate_mesh, slice_mesh, write_stl_binary,
    PointCloud, Rotation, TriMesh, Vec2, Vec3, STL_HEADER_LEN,
};
use stegkit_core::qr3d::{
    basis_for, canonical_direction, grid_to_spheres, lattice_score, project_to_grid,
    search_direction, BitGrid, EmbedParams, SearchParams, SphereCloud, SplitMix64,
};
use stegkit_core::recon::{group_layers, loft_layers, orientation_scan};
use stegkit_core::stego::{
    embed_stl_header, extract_stl_header, frame_bytes, frame_payload, segments_to_text,
    text_to_segments, unframe_bytes, unframe_payload, MorseParams, SketchSegment, FRAME_OVERHEAD,
};
use stegkit_core::vrml::{
    capacity_bytes, embed_green_digits, extract_green_digits, parse_vrml, ChannelParams, VrmlError,
};

fn edge_counts(mesh: &TriMesh) -> HashMap<(u32, u32), usize> {
    let mut counts = HashMap::new();
    for t in &mesh.triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
}

// ---------------------------------------------------------------- mesh

fn f32_point() -> impl Strategy<Value = Vec3> {
    (-1e3f32..1e3, -1e3f32..1e3, -1e3f32..1e3)
        .prop_map(|(x, y, z)| Vec3::new(x as f64, y as f64, z as f64))
}

fn triangle_soup() -> impl Strategy<Value = TriMesh> {
    (
        prop::collection::vec((f32_point(), f32_point(), f32_point()), 1..40),
        prop::array::uniform32(any::<u8>()),
    )
        .prop_filter_map("distinct corners", |(tris, head)| {
            let mut vertices = Vec::new();
            let mut triangles = Vec::new();
            for (a, b, c) in tris {
                if a == b || b == c || a == c {
                    return None;
                }
                let base = vertices.len() as u32;
                vertices.extend([a, b, c]);
                triangles.push([base, base + 1, base + 2]);
            }
            let mut mesh = TriMesh::new(vertices, triangles).ok()?;
            mesh.header[..32].copy_from_slice(&head);
            Some(mesh)
        })
}

fn corner_multiset(mesh: &TriMesh) -> Vec<[u64; 3]> {
    let mut v: Vec<[u64; 3]> = mesh
        .triangle_iter()
        .flatten()
        .map(|p| [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()])
        .collect();
    v.sort_unstable();
    v
}

fn rotation() -> impl Strategy<Value = Rotation> {
    (0.0..360.0, 0.0..360.0, 0.0..360.0).prop_map(|(a, b, c)| Rotation::new(a, b, c))
}

proptest! {
    #[test]
    fn stl_binary_round_trip(mesh in triangle_soup()) {
        let back = parse_stl(&write_stl_binary(&mesh)).unwrap();
        prop_assert_eq!(back.triangles.len(), mesh.triangles.len());
        prop_assert_eq!(back.header, mesh.header);
        prop_assert_eq!(corner_multiset(&back), corner_multiset(&mesh));
    }

    #[test]
    fn volume_is_rigid_invariant(
        r in rotation(),
        size in (0.1f64..50.0, 0.1f64..50.0, 0.1f64..50.0),
        sphere in any::<bool>(),
    ) {
        let mesh = if sphere {
            icosphere(Vec3::new(3.0, -2.0, 7.0), size.0, 2)
        } else {
            cuboid(Vec3::new(-1.0, 2.0, 0.5), Vec3::new(size.0, size.1, size.2))
        };
        let before = mesh_volume(&mesh).signed();
        let after = mesh_volume(&rotate_mesh(&mesh, r)).signed();
        prop_assert!((after - before).abs() <= 1e-9 * before.abs(), "{before} vs {after}");
    }

    #[test]
    fn disjoint_boxes_slice_to_one_loop_each(
        widths in prop::collection::vec((0.1f64..3.0, 0.1f64..3.0, -1.0f64..1.0), 1..8),
        t in 0.01f64..0.99,
    ) {
        let mut mesh = TriMesh::default();
        let mut x = 0.0;
        for (w, d, y) in &widths {
            mesh.merge(&cuboid(Vec3::new(x, *y, -0.5), Vec3::new(x + w, y + d, 1.5)));
            x += w + 0.5;
        }
        let z = -0.5 + 2.0 * t;
        let s = slice_mesh(&mesh, z, 1e-9);
        prop_assert_eq!(s.loops.len(), widths.len());
        prop_assert!(s.open_chains.is_empty());
        prop_assert!(s.loops.iter().all(|l| l.len() >= 3));
    }
}

// ---------------------------------------------------------------- gcode

#[derive(Debug, Clone)]
struct Extrusion {
    x: f64,
    y: f64,
    e: f64,
}

fn extrusions() -> impl Strategy<Value = Vec<Extrusion>> {
    prop::collection::vec(
        (-50.0f64..50.0, -50.0f64..50.0, -2.0f64..5.0).prop_map(|(x, y, e)| Extrusion { x, y, e }),
        0..60,
    )
}

fn relative_program(moves: &[Extrusion]) -> String {
    let mut g = String::from("G21\nG90\nM83\n");
    for m in moves {
        g.push_str(&format!("G1 X{:.3} Y{:.3} E{:.5}\n", m.x, m.y, m.e));
    }
    g
}

fn absolute_program(moves: &[Extrusion]) -> String {
    // accumulate the same rounded deltas the relative program writes
    let mut g = String::from("G21\nG90\nM82\nG92 E0\n");
    let mut units: i64 = 0;
    for m in moves {
        units += (m.e * 1e5).round() as i64;
        let sign = if units < 0 { "-" } else { "" };
        let a = units.unsigned_abs();
        g.push_str(&format!(
            "G1 X{:.3} Y{:.3} E{sign}{}.{:05}\n",
            m.x,
            m.y,
            a / 100_000,
            a % 100_000
        ));
    }
    g
}

fn positive_sum(moves: &[Extrusion]) -> f64 {
    moves
        .iter()
        .map(|m| (m.e * 1e5).round() / 1e5)
        .filter(|&e| e > 0.0)
        .sum()
}

proptest! {
    #[test]
    fn filament_matches_delta_replay(moves in extrusions()) {
        let rel = filament_length(&parse_gcode(&relative_program(&moves)).unwrap());
        let abs = filament_length(&parse_gcode(&absolute_program(&moves)).unwrap());
        let oracle = positive_sum(&moves);
        prop_assert!(rel >= 0.0);
        prop_assert!((rel - oracle).abs() <= 1e-6 * (1.0 + oracle), "{rel} vs {oracle}");
        prop_assert!((abs - oracle).abs() <= 1e-6 * (1.0 + oracle), "{abs} vs {oracle}");
    }

    #[test]
    fn comments_and_travel_do_not_count(
        moves in extrusions(),
        inserts in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>(), -9.0f64..9.0), 0..20),
    ) {
        let text = absolute_program(&moves);
        let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
        for (at, comment, v) in inserts {
            let line = if comment {
                format!("; note {v:.2}")
            } else {
                format!("G0 X{v:.3} Y{:.3} F9000", -v)
            };
            let i = 4 + at.index(lines.len() - 3);
            lines.insert(i, line);
        }
        let base = filament_length(&parse_gcode(&text).unwrap());
        let noisy = filament_length(&parse_gcode(&lines.join("\n")).unwrap());
        prop_assert_eq!(base, noisy);
    }

    #[test]
    fn verdict_monotone_in_threshold(
        moves in extrusions(),
        claim in 1.0f64..500.0,
        t1 in 0.0f64..0.5,
        dt in 0.0f64..0.5,
    ) {
        let text = format!("; filament used = {claim:.2}mm\n{}", relative_program(&moves));
        let program = parse_gcode(&text).unwrap();
        let low = audit(&program, t1);
        let high = audit(&program, t1 + dt);
        if low.verdict == Verdict::Consistent {
            prop_assert_eq!(high.verdict, Verdict::Consistent);
        }
        let ratio = low.discrepancy_ratio.unwrap();
        prop_assert_eq!(low.verdict == Verdict::Mismatch, (1.0 - ratio).abs() > t1);
    }
}

// ---------------------------------------------------------------- stego

proptest! {
    #[test]
    fn frame_round_trip_anywhere(
        payload in prop::collection::vec(any::<u8>(), 0..1024),
        prefix in prop::collection::vec(any::<bool>(), 0..64),
        suffix in prop::collection::vec(any::<bool>(), 0..64),
    ) {
        let frame = frame_payload(&payload).unwrap();
        prop_assert_eq!(frame.len(), 8 * (FRAME_OVERHEAD + payload.len()));
        let bits: Vec<bool> = prefix.iter().chain(&frame).chain(&suffix).copied().collect();
        prop_assert_eq!(unframe_payload(&bits).unwrap(), payload);
    }

    #[test]
    fn single_byte_corruption_detected(
        payload in prop::collection::vec(any::<u8>(), 0..256),
        at in any::<prop::sample::Index>(),
        mask in 1u8..=255,
    ) {
        let mut frame = frame_bytes(&payload).unwrap();
        let i = at.index(frame.len());
        frame[i] ^= mask;
        prop_assert!(unframe_bytes(&frame).is_err());
    }

    #[test]
    fn header_channel_keeps_geometry(
        mesh in triangle_soup(),
        message in prop::collection::vec(any::<u8>(), 0..=69),
    ) {
        let marked = embed_stl_header(&mesh, &message).unwrap();
        prop_assert_eq!(&marked.vertices, &mesh.vertices);
        prop_assert_eq!(&marked.triangles, &mesh.triangles);
        let bytes = write_stl_binary(&marked);
        prop_assert_eq!(&bytes[STL_HEADER_LEN..], &write_stl_binary(&mesh)[STL_HEADER_LEN..]);
        prop_assert_eq!(extract_stl_header(&parse_stl(&bytes).unwrap()).unwrap(), message);
    }

    #[test]
    fn morse_round_trip_and_scale_invariance(
        words in prop::collection::vec("[A-Z0-9]{1,8}", 1..5),
        unit in 0.05f64..10.0,
        scale in 0.01f64..100.0,
    ) {
        let text = words.join(" ");
        let params = MorseParams::new(unit).unwrap();
        let segments = text_to_segments(&text, params).unwrap();
        prop_assert_eq!(segments_to_text(&segments, params).unwrap(), text.clone());

        // a sketch of only T's has no unit-length feature to fit against
        prop_assume!(text.chars().any(|c| c != 'T' && c != ' '));
        let scaled: Vec<SketchSegment> = segments
            .iter()
            .map(|s| SketchSegment { x: s.x * scale, y0: s.y0 * scale, y1: s.y1 * scale })
            .collect();
        let fitted = MorseParams::fitted(&scaled).unwrap();
        prop_assert_eq!(segments_to_text(&scaled, fitted).unwrap(), text);
    }
}

#[test]
fn morse_full_alphabet() {
    let text = "THE QUICK BROWN FOX JUMPS OVER THE LAZY DOG 0123456789";
    let params = MorseParams::default();
    let segments = text_to_segments(text, params).unwrap();
    assert_eq!(segments_to_text(&segments, params).unwrap(), text);
}

// ---------------------------------------------------------------- vrml

/// Scene with `triples` colors, formatted with a per-case layout.
fn scene(values: &[(f64, f64, f64)], layout: u8) -> String {
    let sep = match layout % 3 {
        0 => ", ",
        1 => ",\n\t",
        _ => "  ",
    };
    let body: Vec<String> = values
        .iter()
        .map(|(r, g, b)| match layout % 2 {
            0 => format!("{r:.3} {g:.3} {b:.3}"),
            _ => format!("{r:.2e} {g:.4} {b}"),
        })
        .collect();
    format!(
        "#VRML V2.0 utf8\n# color [ 1 1 1 ] in a comment\nWorldInfo {{ title \"Color {{ color [ 0 0 0 ] }}\" }}\nShape {{\n  appearance Appearance {{ material Material {{ diffuseColor 0.5 0.5 0.5 }} }}\n  geometry IndexedFaceSet {{\n    coord Coordinate {{ point [ 0 0 0, 1 0 0, 0 1 0 ] }}\n    color Color {{ color [ {} ] }}\n  }}\n}}\n",
        body.join(sep)
    )
}

fn colors() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0), 1..120)
}

proptest! {
    #[test]
    fn vrml_parse_is_idempotent(values in colors(), layout in any::<u8>()) {
        let text = scene(&values, layout);
        let stream = parse_vrml(&text).unwrap();
        prop_assert_eq!(stream.emit(), text);
        prop_assert_eq!(stream.color_green_slots.len(), values.len());
        prop_assert!(stream.color_green_slots.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn vrml_embed_touches_only_green_tokens(
        values in colors(),
        layout in any::<u8>(),
        payload in prop::collection::vec(any::<u8>(), 0..40),
        start in 0usize..4,
        digits in 1usize..=9,
    ) {
        let text = scene(&values, layout);
        let stream = parse_vrml(&text).unwrap();
        let params = ChannelParams::new(start, digits).unwrap();
        let out = match embed_green_digits(&stream, &payload, params) {
            Ok(out) => out,
            Err(e) => {
                let short = matches!(e, VrmlError::InsufficientSlots { .. });
                prop_assert!(short, "{}", e);
                let available = values.len().saturating_sub(start) * digits;
                prop_assert!(available < 8 * (payload.len() + FRAME_OVERHEAD));
                return Ok(());
            }
        };
        prop_assert_eq!(extract_green_digits(&out, params).unwrap(), payload.clone());
        let used = ((payload.len() + FRAME_OVERHEAD) * 8).div_ceil(digits);
        let marked = parse_vrml(&out).unwrap();
        prop_assert_eq!(marked.tokens.len(), stream.tokens.len());
        let rewritten: Vec<usize> = stream.color_green_slots[start..start + used].to_vec();
        for k in 0..stream.tokens.len() {
            if !rewritten.contains(&k) {
                prop_assert_eq!(stream.token_text(k), marked.token_text(k));
            }
        }
        // whitespace between tokens is untouched too
        let gaps = |s: &stegkit_core::vrml::VrmlTokenStream| -> Vec<String> {
            let mut at = 0;
            let mut out = Vec::new();
            for t in &s.tokens {
                out.push(s.text[at..t.span.start].to_owned());
                at = t.span.end;
            }
            out.push(s.text[at..].to_owned());
            out
        };
        prop_assert_eq!(gaps(&stream), gaps(&marked));
    }

    #[test]
    fn vrml_capacity_law(triples in 12usize..150, start in 0usize..4, digits in 1usize..=9) {
        let values: Vec<(f64, f64, f64)> = (0..triples).map(|k| (0.5, k as f64 / triples as f64, 0.25)).collect();
        let stream = parse_vrml(&scene(&values, 0)).unwrap();
        let params = ChannelParams::new(start, digits).unwrap();
        let bits = triples.saturating_sub(start) * digits;
        let expected = bits.saturating_sub(8 * FRAME_OVERHEAD) / 8;
        let cap = capacity_bytes(&stream, params).unwrap();
        prop_assert_eq!(cap, expected);
        if bits >= 8 * FRAME_OVERHEAD {
            let fits = vec![0xA5; cap];
            let out = embed_green_digits(&stream, &fits, params).unwrap();
            prop_assert_eq!(extract_green_digits(&out, params).unwrap(), fits);
        }
        let over = vec![0x5A; cap + 1];
        let is_insufficient = matches!(
            embed_green_digits(&stream, &over, params),
            Err(VrmlError::InsufficientSlots { .. })
        );
        prop_assert!(is_insufficient);
    }
}

// ---------------------------------------------------------------- qr3d

fn unit_vector() -> impl Strategy<Value = Vec3> {
    (0.0f64..1.0, 0.0f64..TAU).prop_map(|(u, phi)| {
        let z = 2.0 * u - 1.0;
        let r = (1.0 - z * z).sqrt();
        Vec3::new(r * phi.cos(), r * phi.sin(), z)
    })
}

/// Random grid whose true bits touch every border.
fn bordered_grid() -> impl Strategy<Value = BitGrid> {
    (2usize..=25, 0.2f64..0.8, any::<u64>()).prop_map(|(n, density, seed)| {
        let mut rng = SplitMix64::new(seed);
        let mut bits: Vec<bool> = (0..n * n).map(|_| rng.next_f64() < density).collect();
        let pick = |rng: &mut SplitMix64| (rng.next_u64() % n as u64) as usize;
        let (a, b, c, d) = (
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
        );
        bits[a] = true;
        bits[(n - 1) * n + b] = true;
        bits[c * n] = true;
        bits[d * n + n - 1] = true;
        BitGrid::new(n, bits).unwrap()
    })
}

proptest! {
    #[test]
    fn basis_is_orthonormal_and_right_handed(v in unit_vector()) {
        let (u, w) = basis_for(v);
        prop_assert!((u.norm() - 1.0).abs() < 1e-12 && (w.norm() - 1.0).abs() < 1e-12);
        prop_assert!(u.dot(v).abs() < 1e-12 && w.dot(v).abs() < 1e-12 && u.dot(w).abs() < 1e-12);
        prop_assert!((u.cross(w) - v).norm() < 1e-12);
    }

    #[test]
    fn projection_round_trip(
        grid in bordered_grid(),
        v in unit_vector(),
        pitch in 0.2f64..10.0,
        jitter in 0usize..3,
        seed in any::<u64>(),
    ) {
        let mut params = EmbedParams::new(pitch, v);
        params.depth_jitter = [0.0, pitch, 10.0 * pitch][jitter];
        params.seed = seed;
        let cloud = grid_to_spheres(&grid, &params).unwrap();
        prop_assert_eq!(cloud.centers.len(), grid.count_ones());
        prop_assert_eq!(project_to_grid(&cloud, v, pitch).unwrap(), grid);
    }

    #[test]
    fn lattice_score_ignores_sign(grid in bordered_grid(), v in unit_vector(), probe in unit_vector()) {
        let cloud = grid_to_spheres(&grid, &EmbedParams::new(1.0, v)).unwrap();
        prop_assert_eq!(lattice_score(&cloud, probe), lattice_score(&cloud, -probe));
    }
}

fn planted(seed: u64, n: usize, d_pitches: f64) -> (SphereCloud, Vec3, BitGrid) {
    let mut rng = SplitMix64::new(seed);
    let grid = common::qr_like_grid(n, &mut rng);
    let dir = common::random_direction(&mut rng);
    let mut params = EmbedParams::new(1.0, dir);
    params.depth_jitter = d_pitches;
    params.seed = rng.next_u64();
    (grid_to_spheres(&grid, &params).unwrap(), dir, grid)
}

#[test]
fn planted_direction_beats_every_far_direction() {
    // every direction of a 1 degree hemisphere grid at least 5 degrees away
    let mut probes = Vec::new();
    for i in 0..=90 {
        for j in 0..360 {
            let (t, p) = ((i as f64).to_radians(), (j as f64).to_radians());
            probes.push(Vec3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos()));
        }
    }
    for seed in 0..20 {
        let (cloud, dir, _) = planted(
            0xBEEF + seed,
            15 + (seed as usize % 7),
            2.0 + seed as f64 / 5.0,
        );
        let at = lattice_score(&cloud, dir).score;
        let far = probes
            .iter()
            .filter(|&&p| common::axis_angle_deg(p, dir) >= 5.0)
            .map(|&p| lattice_score(&cloud, p).score)
            .fold(f64::INFINITY, f64::min);
        assert!(at <= far, "seed {seed}: planted {at} vs far {far}");
    }
}

#[test]
fn search_is_rotation_equivariant() {
    let rotations = [
        Rotation::new(30.0, 0.0, 0.0),
        Rotation::new(12.0, 47.0, 200.0),
        Rotation::new(271.0, 133.0, 9.0),
    ];
    let params = SearchParams::default();
    for (k, r) in rotations.into_iter().enumerate() {
        let (cloud, _, _) = planted(0xE0 + k as u64, 15, 5.0);
        let base = search_direction(&cloud, params).unwrap();
        let turned = SphereCloud {
            centers: cloud.centers.iter().map(|&c| r.apply(c)).collect(),
            radius: cloud.radius,
        };
        let found = search_direction(&turned, params).unwrap();
        let expected = r.apply(base.direction);
        let err = common::axis_angle_deg(found.direction, expected);
        assert!(
            err <= params.refine_to_deg,
            "rotation {k}: off by {err} deg"
        );
        assert_eq!(found.direction, canonical_direction(found.direction));
    }
}

#[test]
fn search_ignores_thread_count() {
    let (cloud, _, _) = planted(0x7777, 17, 5.0);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| search_direction(&cloud, SearchParams::default()).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}

// ---------------------------------------------------------------- recon

proptest! {
    #[test]
    fn group_layers_partitions(
        layers in prop::collection::vec((0.05f64..2.0, 3usize..30), 2..30),
        jitter in 0.0f64..0.2,
        seed in any::<u64>(),
    ) {
        let mut rng = SplitMix64::new(seed);
        let mut pts = Vec::new();
        let mut z = 0.0;
        let mut gaps = Vec::new();
        for (gap, count) in &layers {
            z += gap;
            gaps.push(*gap);
            for _ in 0..*count {
                let dz = jitter * gap * (rng.next_f64() - 0.5) * 0.5;
                pts.push(Vec3::new(rng.next_f64(), rng.next_f64(), z + dz));
            }
        }
        let cloud = PointCloud::new(pts).unwrap();
        let stack = group_layers(&cloud, None).unwrap();
        prop_assert_eq!(stack.point_count(), cloud.len());
        prop_assert!(stack.layers.windows(2).all(|w| w[0].z < w[1].z));
        for layer in &stack.layers {
            let zs: Vec<f64> = cloud
                .points
                .iter()
                .filter(|p| layer.points.iter().any(|q| q.x == p.x && q.y == p.y))
                .map(|p| p.z)
                .collect();
            let spread = zs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - zs.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(spread <= stack.z_tol, "spread {spread} > {}", stack.z_tol);
        }
    }

    #[test]
    fn loft_is_watertight(
        radii in prop::collection::vec(prop::collection::vec(2.0f64..3.0, 24), 2..12),
        m in 8usize..200,
    ) {
        let mut pts = Vec::new();
        for (k, ring) in radii.iter().enumerate() {
            for (i, r) in ring.iter().enumerate() {
                let a = TAU * i as f64 / ring.len() as f64;
                pts.push(Vec3::new(r * a.cos(), r * a.sin(), k as f64));
            }
        }
        let stack = group_layers(&PointCloud::new(pts).unwrap(), None).unwrap();
        let mesh = loft_layers(&stack, m).unwrap();
        prop_assert!(edge_counts(&mesh).values().all(|&c| c == 2));
        prop_assert!(mesh_volume(&mesh).signed() > 0.0);
    }

    #[test]
    fn cube_quarter_turns_score_alike(side in 0.5f64..20.0, layer in 0.05f64..0.5) {
        prop_assume!(side / layer < 200.0);
        let cube = cuboid(Vec3::ZERO, Vec3::new(side, side, side));
        let report = orientation_scan(&cube, 90.0, layer).unwrap();
        let first = report.candidates[0];
        for c in &report.candidates {
            prop_assert!((c.fragmentation_score - first.fragmentation_score).abs() <= 1e-9);
            prop_assert!((c.bottom_layer_area - first.bottom_layer_area).abs() <= 1e-9 * side * side);
        }
    }
}

#[test]
fn cylinder_error_shrinks_with_resolution() {
    let cloud = common::cylinder_cloud(5.0, 20.0, 0.5, 720);
    let stack = group_layers(&cloud, None).unwrap();
    let analytic = PI * 25.0 * 20.0;
    let errors: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&m| {
            (mesh_volume(&loft_layers(&stack, m).unwrap()).signed() - analytic).abs() / analytic
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[3] < 0.01);
}

#[test]
fn polygon_area_of_lofted_rings() {
    // a lofted prism of a regular hexagon has exactly area * height
    let hex: Vec<Vec2> = (0..6)
        .map(|k| {
            let a = TAU * k as f64 / 6.0;
            Vec2::new(a.cos(), a.sin())
        })
        .collect();
    let pts: Vec<Vec3> = [0.0, 2.0]
        .iter()
        .flat_map(|&z| hex.iter().map(move |p| Vec3::new(p.x, p.y, z)))
        .collect();
    let stack = group_layers(&PointCloud::new(pts).unwrap(), None).unwrap();
    let v = mesh_volume(&loft_layers(&stack, 6).unwrap()).signed();
    let area = 1.5 * 3f64.sqrt();
    assert!((v - 2.0 * area).abs() < 1e-9, "{v}");
}

#[test]
fn frame_bits_are_msb_first() {
    let bits = frame_payload(b"").unwrap();
    // 'H' = 0x48 = 0100_1000
    assert_eq!(
        &bits[..8],
        &[false, true, false, false, true, false, false, false]
    );
}
