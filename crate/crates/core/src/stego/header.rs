use super::frame::{frame_bytes, unframe_bytes, FRAME_OVERHEAD};
use super::StegoError;
use crate::mesh::{TriMesh, STL_HEADER_LEN};

/// Largest message that fits a single frame in the 80-byte header.
pub const MAX_HEADER_MESSAGE: usize = STL_HEADER_LEN - FRAME_OVERHEAD;

/// Writes a framed `message` at the start of the STL header and zero-fills
/// the rest. Geometry is copied unchanged.
pub fn embed_stl_header(mesh: &TriMesh, message: &[u8]) -> Result<TriMesh, StegoError> {
    if message.len() > MAX_HEADER_MESSAGE {
        return Err(StegoError::MessageTooLong {
            len: message.len(),
            max: MAX_HEADER_MESSAGE,
        });
    }
    let frame = frame_bytes(message)?;
    let mut out = mesh.clone();
    out.header = [0; STL_HEADER_LEN];
    out.header[..frame.len()].copy_from_slice(&frame);
    Ok(out)
}

pub fn extract_stl_header(mesh: &TriMesh) -> Result<Vec<u8>, StegoError> {
    unframe_bytes(&mesh.header)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cuboid, Vec3};

    fn part() -> TriMesh {
        cuboid(Vec3::ZERO, Vec3::new(20.0, 10.0, 5.0))
    }

    #[test]
    fn address_and_user_message() {
        let msg = b"ip=10.0.0.7 user=hack3d";
        assert_eq!(msg.len(), 23);
        let m = embed_stl_header(&part(), msg).unwrap();
        assert_eq!(&m.header[..4], b"H3D1");
        assert!(m.header[34..].iter().all(|&b| b == 0));
        assert_eq!(extract_stl_header(&m).unwrap(), msg);
    }

    #[test]
    fn capacity_edges() {
        let full = vec![b'a'; 69];
        let m = embed_stl_header(&part(), &full).unwrap();
        assert_eq!(extract_stl_header(&m).unwrap(), full);
        assert_eq!(
            embed_stl_header(&part(), &[b'a'; 70]),
            Err(StegoError::MessageTooLong { len: 70, max: 69 })
        );
    }

    #[test]
    fn geometry_untouched() {
        let p = part();
        let m = embed_stl_header(&p, b"QWERTY").unwrap();
        assert_eq!(m.vertices, p.vertices);
        assert_eq!(m.triangles, p.triangles);
        assert_eq!(extract_stl_header(&m).unwrap(), b"QWERTY");
    }

    #[test]
    fn slicer_header_has_no_frame() {
        let mut p = part();
        let text = b"Exported by a slicer; units=mm; 12 facets";
        p.header[..text.len()].copy_from_slice(text);
        assert_eq!(extract_stl_header(&p), Err(StegoError::NoFrameFound));
    }

    #[test]
    fn bad_crc_detected() {
        let mut m = embed_stl_header(&part(), b"QWERTY").unwrap();
        m.header[16] ^= 0x40;
        assert_eq!(extract_stl_header(&m), Err(StegoError::CrcMismatch));
    }
}
